//! Čech descent data on an abstract nerve.
//!
//! Every chart shares the global polynomial model and restriction to an
//! overlap is the identity, so the descent identities reduce to algebra in
//! the transition data. A transition `Φ_ij: W_j → W_i` is the quantization
//! of the point map `φ_ij: chart j → chart i`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{format_rational, MultiPoly, PolyError, Rational};
use crate::quantize::{
    apply_automorphism, compose_automorphisms, invert_automorphism, quantize_map, recognize_inner,
    AutomorphismRecord, QuantizeError, SymplecticMapSpec, Verdict,
};
use crate::symbol::{format_scalar_series, SymbolError, WkbSymbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescentError {
    #[error("no transition from chart {from} to chart {to}")]
    MissingTransition { from: usize, to: usize },
    #[error("chart {0} is not in the covering")]
    UnknownChart(usize),
    #[error("duplicate transition from chart {from} to chart {to}")]
    DuplicateTransition { from: usize, to: usize },
    #[error("transition from chart {from} to chart {to}: {reason}")]
    BadTransition { from: usize, to: usize, reason: String },
    #[error("primitives inconsistent on {indices:?}: c-expression {residual} is not constant")]
    NonConstantC { indices: [usize; 3], residual: String },
    #[error("defect on {indices:?} is not central: residual {residual}")]
    NonCentral { indices: Vec<usize>, residual: String },
    #[error("missing section for {0:?}")]
    MissingSection(Vec<usize>),
    #[error("twist on {0:?} must be a central scalar series")]
    BadTwist([usize; 3]),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("covering data inconsistent on {indices:?}: {source}")]
    Inconsistent {
        indices: [usize; 3],
        #[source]
        source: QuantizeError,
    },
    #[error(transparent)]
    Quantize(#[from] QuantizeError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportVerdict {
    Pass,
    Fail,
    /// Well-defined but not the trivial value; informational only.
    Nontrivial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub check: String,
    pub indices: Vec<usize>,
    pub verdict: ReportVerdict,
    pub witness: String,
}

impl Report {
    fn new(check: &str, indices: &[usize], verdict: ReportVerdict, witness: impl Into<String>) -> Self {
        Report {
            check: check.to_string(),
            indices: indices.to_vec(),
            verdict,
            witness: witness.into(),
        }
    }

    fn trivial_if(check: &str, indices: &[usize], trivial: bool, witness: impl Into<String>) -> Self {
        let verdict = if trivial {
            ReportVerdict::Pass
        } else {
            ReportVerdict::Nontrivial
        };
        Report::new(check, indices, verdict, witness)
    }

    fn pass_if(check: &str, indices: &[usize], ok: bool, witness: impl Into<String>) -> Self {
        let verdict = if ok { ReportVerdict::Pass } else { ReportVerdict::Fail };
        Report::new(check, indices, verdict, witness)
    }
}

pub fn any_failed(reports: &[Report]) -> bool {
    reports.iter().any(|r| r.verdict == ReportVerdict::Fail)
}

pub fn all_trivial(reports: &[Report]) -> bool {
    reports.iter().all(|r| r.verdict == ReportVerdict::Pass)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    /// `φ: chart from → chart to`.
    pub map: SymplecticMapSpec,
    /// `Φ: W_from → W_to`.
    pub record: AutomorphismRecord,
    /// `a` with `λ_from = λ_to + da`, in chart-`to` coordinates.
    pub primitive: MultiPoly,
}

impl Transition {
    /// Quantizes `map` and takes its normalized, shifted primitive.
    pub fn from_map(from: usize, to: usize, map: SymplecticMapSpec, depth: u32) -> Result<Self, DescentError> {
        let bad = |reason: String| DescentError::BadTransition { from, to, reason };
        if let Verdict::Fail(msg) = map.check_symplectic() {
            return Err(bad(msg));
        }
        let mut record = quantize_map(&map.inverse(), depth)?;
        record.c = map.primitive_shift().clone();
        let primitive = map.compute_primitive()?;
        Ok(Transition {
            from,
            to,
            map,
            record,
            primitive,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringSpec {
    dim: usize,
    depth: u32,
    charts: Vec<usize>,
    transitions: BTreeMap<(usize, usize), Transition>,
    twists: BTreeMap<[usize; 3], WkbSymbol>,
}

impl CoveringSpec {
    pub fn new(
        dim: usize,
        depth: u32,
        charts: Vec<usize>,
        transitions: Vec<Transition>,
    ) -> Result<Self, DescentError> {
        let mut map = BTreeMap::new();
        for t in transitions {
            for id in [t.from, t.to] {
                if !charts.contains(&id) {
                    return Err(DescentError::UnknownChart(id));
                }
            }
            let bad = |reason: String| DescentError::BadTransition {
                from: t.from,
                to: t.to,
                reason,
            };
            if t.map.dim() != dim || t.record.dim != dim {
                return Err(DescentError::DimensionMismatch {
                    left: dim,
                    right: t.map.dim().max(t.record.dim),
                });
            }
            if let Verdict::Fail(msg) = t.map.check_symplectic() {
                return Err(bad(msg));
            }
            if t.from == t.to && !t.map.is_identity() {
                return Err(bad("self-transition is not the identity".into()));
            }
            if !t.record.defects_vanish() {
                return Err(bad("record has nonzero commutator defects".into()));
            }
            if map.insert((t.to, t.from), t.clone()).is_some() {
                return Err(DescentError::DuplicateTransition {
                    from: t.from,
                    to: t.to,
                });
            }
        }
        Ok(CoveringSpec {
            dim,
            depth,
            charts,
            transitions: map,
            twists: BTreeMap::new(),
        })
    }

    /// The covering with transitions `Φ_ij = Ψ_i ∘ Ψ_j^{-1}` for charts
    /// `σ_i: chart i → global` and `Ψ_i` the quantization of `σ_i`, for every
    /// pair `i < j`. Primitives are the telescoped differences of the chart
    /// primitives plus the optional constant `shifts[(i, j)]`.
    pub fn coboundary(
        dim: usize,
        depth: u32,
        charts: &[SymplecticMapSpec],
        shifts: &BTreeMap<(usize, usize), Rational>,
    ) -> Result<Self, DescentError> {
        let records = charts
            .iter()
            .map(|s| quantize_map(s, depth))
            .collect::<Result<Vec<_>, _>>()?;
        let inverses = records
            .iter()
            .map(invert_automorphism)
            .collect::<Result<Vec<_>, _>>()?;
        let prims = charts
            .iter()
            .map(|s| s.compute_primitive())
            .collect::<Result<Vec<_>, _>>()?;
        let mut transitions = Vec::new();
        for i in 0..charts.len() {
            for j in i + 1..charts.len() {
                let shift = shifts.get(&(i, j)).cloned().unwrap_or_else(Rational::zero);
                let map = charts[j].then(&charts[i].inverse())?.with_shift(shift.clone());
                let mut record = compose_automorphisms(&records[i], &inverses[j])?;
                record.c = shift.clone();
                let diff = &prims[j] - &prims[i];
                let primitive =
                    &diff.pullback(charts[i].forward())? + &MultiPoly::constant(dim, shift);
                transitions.push(Transition {
                    from: j,
                    to: i,
                    map,
                    record,
                    primitive,
                });
            }
        }
        CoveringSpec::new(dim, depth, (0..charts.len()).collect(), transitions)
    }

    /// Multiplies the inner part of one triple by a central scalar series.
    pub fn with_twist(mut self, indices: [usize; 3], series: WkbSymbol) -> Result<Self, DescentError> {
        if series.dim() != 0 || series.is_zero() {
            return Err(DescentError::BadTwist(indices));
        }
        self.twists.insert(indices, series);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn charts(&self) -> &[usize] {
        &self.charts
    }

    pub fn transitions(&self) -> impl Iterator<Item = &Transition> {
        self.transitions.values()
    }

    pub fn twists(&self) -> &BTreeMap<[usize; 3], WkbSymbol> {
        &self.twists
    }

    /// `Φ_ij: W_j → W_i`.
    pub fn transition(&self, i: usize, j: usize) -> Result<&Transition, DescentError> {
        self.transitions
            .get(&(i, j))
            .ok_or(DescentError::MissingTransition { from: j, to: i })
    }

    /// Index triples `i < j < k` in chart order whose three transitions are
    /// all present.
    pub fn triples(&self) -> Vec<[usize; 3]> {
        let c = &self.charts;
        let mut out = Vec::new();
        for a in 0..c.len() {
            for b in a + 1..c.len() {
                for d in b + 1..c.len() {
                    let (i, j, k) = (c[a], c[b], c[d]);
                    if [(i, j), (j, k), (i, k)].iter().all(|p| self.transitions.contains_key(p)) {
                        out.push([i, j, k]);
                    }
                }
            }
        }
        out
    }

    /// Index quadruples `i < j < k < l` whose six transitions are present.
    pub fn quadruples(&self) -> Vec<[usize; 4]> {
        let c = &self.charts;
        let mut out = Vec::new();
        for a in 0..c.len() {
            for b in a + 1..c.len() {
                for d in b + 1..c.len() {
                    for e in d + 1..c.len() {
                        let q = [c[a], c[b], c[d], c[e]];
                        let pairs = [(0, 1), (1, 2), (2, 3), (0, 2), (0, 3), (1, 3)];
                        if pairs
                            .iter()
                            .all(|&(x, y)| self.transitions.contains_key(&(q[x], q[y])))
                        {
                            out.push(q);
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleDefect {
    pub indices: [usize; 3],
    /// Canonical `P_ijk` with `Ad(P_ijk) = Φ_ij ∘ Φ_jk ∘ Φ_ik^{-1}`.
    pub inner: WkbSymbol,
    /// Star-unitary rescaling of `inner`, when one exists.
    pub unitary: Option<WkbSymbol>,
    pub twist: Option<WkbSymbol>,
    pub c: Rational,
}

impl TripleDefect {
    /// The representative entering the quadruple identity: the unitary
    /// rescaling when available, times the twist.
    pub fn representative(&self) -> Result<WkbSymbol, DescentError> {
        let base = self.unitary.clone().unwrap_or_else(|| self.inner.clone());
        match &self.twist {
            None => Ok(base),
            Some(s) => {
                let s = s.embed_scalar(base.dim()).ok_or(DescentError::BadTwist(self.indices))?;
                Ok(base.star(&s)?)
            }
        }
    }
}

pub fn triple_defect(cov: &CoveringSpec, i: usize, j: usize, k: usize) -> Result<TripleDefect, DescentError> {
    let indices = [i, j, k];
    let tij = cov.transition(i, j)?;
    let tjk = cov.transition(j, k)?;
    let tik = cov.transition(i, k)?;
    let inconsistent = |source| DescentError::Inconsistent { indices, source };
    let d = compose_automorphisms(&tij.record, &tjk.record)
        .and_then(|r| Ok((r, invert_automorphism(&tik.record)?)))
        .and_then(|(r, inv)| compose_automorphisms(&r, &inv))
        .map_err(inconsistent)?;
    let rec = recognize_inner(&d).map_err(inconsistent)?;

    let expr = &(&tij.primitive + &tjk.primitive.pullback(tij.map.inverse_images())?) - &tik.primitive;
    let c = expr.as_constant().ok_or_else(|| DescentError::NonConstantC {
        indices,
        residual: expr.to_string(),
    })?;
    Ok(TripleDefect {
        indices,
        inner: rec.inner,
        unitary: rec.unitary,
        twist: cov.twists.get(&indices).cloned(),
        c,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadrupleCheck {
    pub indices: [usize; 4],
    /// Central part of `ζ`, a dimension-0 series.
    pub zeta: WkbSymbol,
    pub zeta_residual: WkbSymbol,
    /// `c_ijk + c_ikl` and `c_jkl + c_ijl`.
    pub additive: (Rational, Rational),
}

impl QuadrupleCheck {
    pub fn zeta_central(&self) -> bool {
        self.zeta_residual.is_zero()
    }

    pub fn zeta_is_one(&self) -> bool {
        self.zeta_central() && self.zeta.is_one()
    }

    pub fn zeta_star_unitary(&self) -> bool {
        self.zeta_central() && self.zeta.is_star_unitary()
    }

    pub fn additive_holds(&self) -> bool {
        self.additive.0 == self.additive.1
    }

    pub fn reports(&self) -> Vec<Report> {
        let idx = &self.indices;
        let zeta = format_scalar_series(&self.zeta);
        let mut out = vec![Report::pass_if(
            "zeta-central",
            idx,
            self.zeta_central(),
            if self.zeta_central() {
                zeta.clone()
            } else {
                format!("residual {}", self.zeta_residual)
            },
        )];
        if self.zeta_central() {
            out.push(Report::trivial_if("zeta-trivial", idx, self.zeta_is_one(), zeta.clone()));
            out.push(Report::pass_if(
                "zeta-star-unitary",
                idx,
                self.zeta_star_unitary(),
                zeta,
            ));
        }
        out.push(Report::pass_if(
            "additive-c",
            idx,
            self.additive_holds(),
            format!(
                "{} = {}",
                format_rational(&self.additive.0),
                format_rational(&self.additive.1)
            ),
        ));
        out
    }
}

/// `ζ = (Φ_ij(P_jkl) ⋆ P_ijl)^{-1} ⋆ (P_ijk ⋆ P_ikl)` and the additive
/// identity `c_ijk + c_ikl = c_jkl + c_ijl`.
pub fn verify_w_cocycle(cov: &CoveringSpec, quad: [usize; 4]) -> Result<QuadrupleCheck, DescentError> {
    let [i, j, k, l] = quad;
    let ijk = triple_defect(cov, i, j, k)?;
    let ikl = triple_defect(cov, i, k, l)?;
    let jkl = triple_defect(cov, j, k, l)?;
    let ijl = triple_defect(cov, i, j, l)?;
    let phi_ij = &cov.transition(i, j)?.record;
    let zeta = quadruple_defect(
        phi_ij,
        &ijk.representative()?,
        &ikl.representative()?,
        &jkl.representative()?,
        &ijl.representative()?,
    )?;
    let (zeta, zeta_residual) = zeta.central_part();
    Ok(QuadrupleCheck {
        indices: quad,
        zeta,
        zeta_residual,
        additive: (&ijk.c + &ikl.c, &jkl.c + &ijl.c),
    })
}

/// `(f_ij(a_jkl) ⋆ a_ijl)^{-1} ⋆ a_ijk ⋆ a_ikl`.
fn quadruple_defect(
    f_ij: &AutomorphismRecord,
    a_ijk: &WkbSymbol,
    a_ikl: &WkbSymbol,
    a_jkl: &WkbSymbol,
    a_ijl: &WkbSymbol,
) -> Result<WkbSymbol, DescentError> {
    let left = apply_automorphism(f_ij, a_jkl)?.star(a_ijl)?;
    let right = a_ijk.star(a_ikl)?;
    Ok(left.invert()?.star(&right)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringReport {
    pub triples: Vec<TripleDefect>,
    pub quadruples: Vec<QuadrupleCheck>,
}

impl CoveringReport {
    pub fn reports(&self) -> Vec<Report> {
        let mut out = Vec::new();
        for t in &self.triples {
            let idx = &t.indices;
            out.push(Report::trivial_if("triple-inner", idx, t.inner.is_one(), t.inner.to_string()));
            out.push(Report::pass_if(
                "triple-unitarizable",
                idx,
                t.unitary.is_some(),
                match &t.unitary {
                    Some(u) => u.to_string(),
                    None => "P*P^* is not central".to_string(),
                },
            ));
            out.push(Report::trivial_if("triple-c", idx, t.c.is_zero(), format_rational(&t.c)));
        }
        for q in &self.quadruples {
            out.extend(q.reports());
        }
        out
    }
}

/// All triple defects and quadruple checks in index order.
pub fn verify_covering(cov: &CoveringSpec) -> Result<CoveringReport, DescentError> {
    let triples = cov
        .triples()
        .into_iter()
        .map(|[i, j, k]| triple_defect(cov, i, j, k))
        .collect::<Result<Vec<_>, _>>()?;
    let quadruples = cov
        .quadruples()
        .into_iter()
        .map(|q| verify_w_cocycle(cov, q))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CoveringReport { triples, quadruples })
}

/// Abstract lien data on the indices `0..size`: isomorphisms `f_ij` for all
/// `i < j` and sections `a_ijk` for all `i < j < k`, meant to satisfy
/// `f_ij ∘ f_jk = Ad(a_ijk) ∘ f_ik`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LienData {
    pub dim: usize,
    pub size: usize,
    pub isos: BTreeMap<(usize, usize), AutomorphismRecord>,
    pub sections: BTreeMap<[usize; 3], WkbSymbol>,
}

impl LienData {
    pub fn iso(&self, i: usize, j: usize) -> Result<&AutomorphismRecord, DescentError> {
        self.isos
            .get(&(i, j))
            .ok_or(DescentError::MissingTransition { from: j, to: i })
    }

    pub fn section(&self, i: usize, j: usize, k: usize) -> Result<&WkbSymbol, DescentError> {
        self.sections
            .get(&[i, j, k])
            .ok_or_else(|| DescentError::MissingSection(vec![i, j, k]))
    }

    /// The lien of a covering: `f_ij = Φ_ij`, `a_ijk` the representative
    /// triple defects. Chart ids are replaced by their positions.
    pub fn from_covering(cov: &CoveringSpec) -> Result<Self, DescentError> {
        let pos = |id: usize| cov.charts.iter().position(|&c| c == id).unwrap();
        let mut isos = BTreeMap::new();
        for t in cov.transitions() {
            if pos(t.to) < pos(t.from) {
                isos.insert((pos(t.to), pos(t.from)), t.record.clone());
            }
        }
        let mut sections = BTreeMap::new();
        for [i, j, k] in cov.triples() {
            let t = triple_defect(cov, i, j, k)?;
            sections.insert([pos(i), pos(j), pos(k)], t.representative()?);
        }
        Ok(LienData {
            dim: cov.dim,
            size: cov.charts.len(),
            isos,
            sections,
        })
    }

    pub fn quadruples(&self) -> Vec<[usize; 4]> {
        let n = self.size;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        out.push([i, j, k, l]);
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuintupleCheck {
    pub indices: [usize; 5],
    /// `c_ijkm c_iklm` and `c_jklm c_ijlm c_ijkl`.
    pub lhs: WkbSymbol,
    pub rhs: WkbSymbol,
}

impl QuintupleCheck {
    pub fn holds(&self) -> bool {
        self.lhs.eq_within(&self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LienCocycle {
    /// The central scalar `c_ijkl` per quadruple.
    pub values: BTreeMap<[usize; 4], WkbSymbol>,
    pub quintuples: Vec<QuintupleCheck>,
}

impl LienCocycle {
    pub fn effective(&self) -> bool {
        self.values.values().all(|c| c.is_one())
    }

    pub fn reports(&self) -> Vec<Report> {
        let mut out = Vec::new();
        for (q, c) in &self.values {
            out.push(Report::trivial_if("lien-c", q, c.is_one(), format_scalar_series(c)));
        }
        for q in &self.quintuples {
            out.push(Report::pass_if(
                "three-cocycle",
                &q.indices,
                q.holds(),
                format!(
                    "{} = {}",
                    format_scalar_series(&q.lhs),
                    format_scalar_series(&q.rhs)
                ),
            ));
        }
        out
    }
}

/// `c_ijkl = (f_ij(a_jkl) a_ijl)^{-1} a_ijk a_ikl` on every quadruple and the
/// 3-cocycle identity on every quintuple.
pub fn compute_lien_3cocycle(data: &LienData) -> Result<LienCocycle, DescentError> {
    let mut values = BTreeMap::new();
    for q in data.quadruples() {
        let [i, j, k, l] = q;
        let raw = quadruple_defect(
            data.iso(i, j)?,
            data.section(i, j, k)?,
            data.section(i, k, l)?,
            data.section(j, k, l)?,
            data.section(i, j, l)?,
        )?;
        let (c, residual) = raw.central_part();
        if !residual.is_zero() {
            return Err(DescentError::NonCentral {
                indices: q.to_vec(),
                residual: residual.to_string(),
            });
        }
        values.insert(q, c);
    }
    let n = data.size;
    let mut quintuples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    for m in l + 1..n {
                        let c = |q: [usize; 4]| values[&q].clone();
                        let lhs = c([i, j, k, m]).star(&c([i, k, l, m]))?;
                        let rhs = c([j, k, l, m]).star(&c([i, j, l, m]))?.star(&c([i, j, k, l]))?;
                        quintuples.push(QuintupleCheck {
                            indices: [i, j, k, l, m],
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }
    }
    Ok(LienCocycle { values, quintuples })
}

/// A morphism of liens `(f, a) → (g, b)`: per-index algebra isomorphisms
/// `u_i` and sections `l_ij` with `g_ij ∘ u_j = Ad(l_ij) ∘ u_i ∘ f_ij`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LienIsoSpec {
    pub maps: Vec<AutomorphismRecord>,
    pub sections: BTreeMap<(usize, usize), WkbSymbol>,
}

impl LienIsoSpec {
    pub fn identity(dim: usize, size: usize, depth: u32) -> Self {
        let floor = -(depth as i64);
        let mut sections = BTreeMap::new();
        for i in 0..size {
            for j in i + 1..size {
                sections.insert((i, j), WkbSymbol::one(dim, floor));
            }
        }
        LienIsoSpec {
            maps: vec![AutomorphismRecord::identity(dim, depth); size],
            sections,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LienIsoCheck {
    /// Pairs `(i, j)` and the first generator where the intertwining fails.
    pub pair_failures: Vec<((usize, usize), Option<String>)>,
    pub d: BTreeMap<[usize; 3], WkbSymbol>,
}

impl LienIsoCheck {
    pub fn is_isomorphism(&self) -> bool {
        self.pair_failures.iter().all(|(_, f)| f.is_none())
    }

    pub fn effective(&self) -> bool {
        self.d.values().all(|d| d.is_one())
    }

    pub fn reports(&self) -> Vec<Report> {
        let mut out = Vec::new();
        for ((i, j), fail) in &self.pair_failures {
            out.push(Report::pass_if(
                "intertwining",
                &[*i, *j],
                fail.is_none(),
                fail.clone().unwrap_or_else(|| "g_ij u_j = Ad(l_ij) u_i f_ij".to_string()),
            ));
        }
        for (t, d) in &self.d {
            out.push(Report::trivial_if("lien-iso-d", t, d.is_one(), format_scalar_series(d)));
        }
        out
    }
}

fn ad(l: &WkbSymbol, p: &WkbSymbol) -> Result<WkbSymbol, DescentError> {
    Ok(l.star(p)?.star(&l.invert()?)?)
}

/// Checks the intertwining relation on generators for each pair and
/// computes `d_ijk = (g_ij(l_jk) l_ij u_i(a_ijk))^{-1} b_ijk l_ik`.
pub fn check_lien_isomorphism(
    a: &LienData,
    b: &LienData,
    iso: &LienIsoSpec,
) -> Result<LienIsoCheck, DescentError> {
    if a.dim != b.dim {
        return Err(DescentError::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    if a.size != b.size || iso.maps.len() != a.size {
        return Err(DescentError::DimensionMismatch {
            left: a.size,
            right: b.size.min(iso.maps.len()),
        });
    }
    let n = a.dim;
    let lsec = |i: usize, j: usize| {
        iso.sections
            .get(&(i, j))
            .ok_or_else(|| DescentError::MissingSection(vec![i, j]))
    };
    let mut pair_failures = Vec::new();
    for &(i, j) in a.isos.keys() {
        let f = a.iso(i, j)?;
        let g = b.iso(i, j)?;
        let l = lsec(i, j)?;
        let floor = f.images_floor();
        let mut failure = None;
        for slot in 0..2 * n {
            let v = crate::poly::Var::from_slot(slot, n);
            let gen = WkbSymbol::var(n, v, floor);
            let left = apply_automorphism(g, &apply_automorphism(&iso.maps[j], &gen)?)?;
            let inner = apply_automorphism(&iso.maps[i], &apply_automorphism(f, &gen)?)?;
            let right = ad(l, &inner)?;
            if !left.eq_within(&right) {
                failure = Some(format!("on {v}: {left} vs {right}"));
                break;
            }
        }
        pair_failures.push(((i, j), failure));
    }
    let mut d = BTreeMap::new();
    for &[i, j, k] in a.sections.keys() {
        let left = apply_automorphism(b.iso(i, j)?, lsec(j, k)?)?
            .star(lsec(i, j)?)?
            .star(&apply_automorphism(&iso.maps[i], a.section(i, j, k)?)?)?;
        let right = b.section(i, j, k)?.star(lsec(i, k)?)?;
        let raw = left.invert()?.star(&right)?;
        let (c, residual) = raw.central_part();
        if !residual.is_zero() {
            return Err(DescentError::NonCentral {
                indices: vec![i, j, k],
                residual: residual.to_string(),
            });
        }
        d.insert([i, j, k], c);
    }
    Ok(LienIsoCheck { pair_failures, d })
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        let verdict = match self.verdict {
            ReportVerdict::Pass => "pass",
            ReportVerdict::Fail => "FAIL",
            ReportVerdict::Nontrivial => "nontrivial",
        };
        write!(f, "{} ({}): {} [{}]", self.check, idx.join(","), verdict, self.witness)
    }
}
