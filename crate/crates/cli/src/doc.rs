//! JSON documents: symbols, map specs, records, coverings and lien data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use wkb_core::descent::{CoveringSpec, LienData, LienIsoSpec, Transition};
use wkb_core::poly::format_rational;
use wkb_core::quantize::{quantize_map, AutomorphismRecord, SymplecticMapSpec};
use wkb_core::{MultiPoly, Rational, WkbSymbol};

use crate::parse::{parse_poly, parse_rational, parse_symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{context}: {message}")]
pub struct DocError {
    pub context: String,
    pub message: String,
}

impl DocError {
    pub fn new(context: impl Into<String>, message: impl ToString) -> Self {
        DocError {
            context: context.into(),
            message: message.to_string(),
        }
    }
}

type Result<T> = std::result::Result<T, DocError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialDoc {
    pub c: String,
    pub x: Vec<u32>,
    pub u: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub tau: i64,
    pub monomials: Vec<MonomialDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolDoc {
    pub dim: usize,
    pub floor: i64,
    pub terms: Vec<TermDoc>,
}

impl SymbolDoc {
    pub fn from_symbol(s: &WkbSymbol) -> Self {
        let n = s.dim();
        let terms = s
            .terms()
            .rev()
            .map(|(j, p)| TermDoc {
                tau: j,
                monomials: p
                    .sorted_terms()
                    .into_iter()
                    .map(|(e, c)| MonomialDoc {
                        c: format_rational(c),
                        x: e[..n].to_vec(),
                        u: e[n..].to_vec(),
                    })
                    .collect(),
            })
            .collect();
        SymbolDoc {
            dim: n,
            floor: s.floor(),
            terms,
        }
    }

    pub fn to_symbol(&self) -> Result<WkbSymbol> {
        let ctx = "symbol document";
        let mut terms = Vec::new();
        for t in &self.terms {
            let items = t
                .monomials
                .iter()
                .map(|m| Ok((parse_rational(&m.c).map_err(|e| DocError::new(ctx, e))?, m.x.clone(), m.u.clone())))
                .collect::<Result<Vec<_>>>()?;
            let p = MultiPoly::from_terms(self.dim, items).map_err(|e| DocError::new(ctx, e))?;
            terms.push((t.tau, p));
        }
        WkbSymbol::from_terms(self.dim, self.floor, terms).map_err(|e| DocError::new(ctx, e))
    }
}

/// An operator given either as an expression or as a symbol document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorDoc {
    Expr(String),
    Symbol(SymbolDoc),
}

impl OperatorDoc {
    pub fn to_symbol(&self, dim: usize, depth: u32) -> Result<WkbSymbol> {
        match self {
            OperatorDoc::Expr(s) => parse_symbol(s, dim, depth).map_err(|e| DocError::new(format!("expression '{s}'"), e)),
            OperatorDoc::Symbol(d) => {
                let s = d.to_symbol()?;
                if s.dim() != dim {
                    return Err(DocError::new("symbol document", format!("dim {} but expected {dim}", s.dim())));
                }
                Ok(s)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForwardDoc {
    pub f: Vec<String>,
    pub g: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseDoc {
    pub x: Vec<String>,
    pub u: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpecDoc {
    pub dim: usize,
    pub forward: ForwardDoc,
    pub inverse: InverseDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<String>,
}

fn polys(ctx: &str, texts: &[String], dim: usize) -> Result<Vec<MultiPoly>> {
    texts
        .iter()
        .map(|t| parse_poly(t, dim).map_err(|e| DocError::new(format!("{ctx} '{t}'"), e)))
        .collect()
}

impl MapSpecDoc {
    pub fn from_spec(spec: &SymplecticMapSpec) -> Self {
        let n = spec.dim();
        let show = |ps: &[MultiPoly]| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>();
        let fw = show(spec.forward());
        let inv = show(spec.inverse_images());
        MapSpecDoc {
            dim: n,
            forward: ForwardDoc {
                f: fw[..n].to_vec(),
                g: fw[n..].to_vec(),
            },
            inverse: InverseDoc {
                x: inv[..n].to_vec(),
                u: inv[n..].to_vec(),
            },
            shift: Some(format_rational(spec.primitive_shift())),
        }
    }

    /// The spec as written; symplecticity is checked by the consumer.
    pub fn to_spec(&self) -> Result<SymplecticMapSpec> {
        let n = self.dim;
        let mut forward = polys("forward component", &self.forward.f, n)?;
        forward.extend(polys("forward component", &self.forward.g, n)?);
        let mut inverse = polys("inverse component", &self.inverse.x, n)?;
        inverse.extend(polys("inverse component", &self.inverse.u, n)?);
        let shift = match &self.shift {
            Some(s) => parse_rational(s).map_err(|e| DocError::new("shift", e))?,
            None => Rational::from_integer(0.into()),
        };
        SymplecticMapSpec::new(n, forward, inverse, shift).map_err(|e| DocError::new("map spec", e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordDoc {
    pub dim: usize,
    pub depth: u32,
    pub c: String,
    pub x_images: Vec<SymbolDoc>,
    pub u_images: Vec<SymbolDoc>,
    pub primitive: String,
    pub map: MapSpecDoc,
}

impl RecordDoc {
    pub fn from_record(r: &AutomorphismRecord) -> Self {
        RecordDoc {
            dim: r.dim,
            depth: r.depth,
            c: format_rational(&r.c),
            x_images: r.x_images.iter().map(SymbolDoc::from_symbol).collect(),
            u_images: r.u_images.iter().map(SymbolDoc::from_symbol).collect(),
            primitive: r.primitive.to_string(),
            map: MapSpecDoc::from_spec(&r.map),
        }
    }

    pub fn to_record(&self) -> Result<AutomorphismRecord> {
        let ctx = "record";
        let n = self.dim;
        let images = |docs: &[SymbolDoc]| -> Result<Vec<WkbSymbol>> {
            if docs.len() != n {
                return Err(DocError::new(ctx, format!("{} images but dim {n}", docs.len())));
            }
            docs.iter()
                .map(|d| {
                    let s = d.to_symbol()?;
                    if s.dim() != n {
                        return Err(DocError::new(ctx, format!("image of dim {} in a dim {n} record", s.dim())));
                    }
                    Ok(s)
                })
                .collect()
        };
        let map = self.map.to_spec()?;
        if map.dim() != n {
            return Err(DocError::new(ctx, "map dimension differs from record dimension"));
        }
        Ok(AutomorphismRecord {
            dim: n,
            c: parse_rational(&self.c).map_err(|e| DocError::new(ctx, e))?,
            x_images: images(&self.x_images)?,
            u_images: images(&self.u_images)?,
            primitive: parse_poly(&self.primitive, n).map_err(|e| DocError::new("record primitive", e))?,
            depth: self.depth,
            map,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: usize,
    pub to: usize,
    pub map: MapSpecDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<RecordDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primitive: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistDoc {
    pub indices: [usize; 3],
    /// A dimension-0 expression in `tau`.
    pub series: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringDoc {
    pub charts: Vec<usize>,
    pub depth: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub transitions: Vec<TransitionDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub twists: Vec<TwistDoc>,
}

/// Errors converting documents to domain data, split by whether the input
/// was malformed or the data failed a mathematical check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Input(#[from] DocError),
    #[error("{0}")]
    Verification(String),
}

impl CoveringDoc {
    pub fn to_covering(&self) -> std::result::Result<CoveringSpec, BuildError> {
        let dim = match (self.dim, self.transitions.first()) {
            (Some(d), _) => d,
            (None, Some(t)) => t.map.dim,
            (None, None) => return Err(DocError::new("covering", "no dim and no transitions").into()),
        };
        let mut transitions = Vec::new();
        for t in &self.transitions {
            let ctx = format!("transition {} -> {}", t.from, t.to);
            let mut map = t.map.to_spec()?;
            if let Some(s) = &t.shift {
                map = map.with_shift(parse_rational(s).map_err(|e| DocError::new(&ctx, e))?);
            }
            if let wkb_core::quantize::Verdict::Fail(msg) = map.check_symplectic() {
                return Err(DocError::new(ctx, format!("map is not symplectic: {msg}")).into());
            }
            let mut tr = match &t.record {
                None => Transition::from_map(t.from, t.to, map, self.depth)
                    .map_err(|e| DocError::new(&ctx, e))?,
                Some(r) => {
                    let record = r.to_record()?;
                    let primitive = map.compute_primitive().map_err(|e| DocError::new(&ctx, e))?;
                    Transition {
                        from: t.from,
                        to: t.to,
                        map,
                        record,
                        primitive,
                    }
                }
            };
            if let Some(p) = &t.primitive {
                tr.primitive = parse_poly(p, dim).map_err(|e| DocError::new(&ctx, e))?;
            }
            transitions.push(tr);
        }
        let mut cov = CoveringSpec::new(dim, self.depth, self.charts.clone(), transitions)
            .map_err(|e| BuildError::Verification(e.to_string()))?;
        for tw in &self.twists {
            let s = parse_symbol(&tw.series, 0, self.depth)
                .map_err(|e| DocError::new(format!("twist {:?}", tw.indices), e))?;
            cov = cov
                .with_twist(tw.indices, s)
                .map_err(|e| DocError::new("twist", e))?;
        }
        Ok(cov)
    }
}

/// An isomorphism given either by a point map (quantized on load) or a
/// precomputed record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsoDoc {
    pub from: usize,
    pub to: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpecDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<RecordDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionDoc {
    pub indices: Vec<usize>,
    pub value: OperatorDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LienDoc {
    pub dim: usize,
    pub depth: u32,
    pub size: usize,
    pub isos: Vec<IsoDoc>,
    pub sections: Vec<SectionDoc>,
}

fn record_from(map: &Option<MapSpecDoc>, record: &Option<RecordDoc>, depth: u32, ctx: &str) -> Result<AutomorphismRecord> {
    match (map, record) {
        (_, Some(r)) => r.to_record(),
        (Some(m), None) => {
            let spec = m.to_spec()?;
            quantize_map(&spec, depth).map_err(|e| DocError::new(ctx, e))
        }
        (None, None) => Err(DocError::new(ctx, "needs a map or a record")),
    }
}

impl LienDoc {
    pub fn to_lien(&self) -> Result<LienData> {
        let mut isos = BTreeMap::new();
        for iso in &self.isos {
            let ctx = format!("iso {} -> {}", iso.from, iso.to);
            if iso.to >= iso.from || iso.from >= self.size {
                return Err(DocError::new(ctx, "isos go from a higher index to a lower one within size"));
            }
            let r = record_from(&iso.map, &iso.record, self.depth, &ctx)?;
            if r.dim != self.dim {
                return Err(DocError::new(ctx, "dimension differs from the lien dimension"));
            }
            isos.insert((iso.to, iso.from), r);
        }
        let mut sections = BTreeMap::new();
        for s in &self.sections {
            let ctx = format!("section {:?}", s.indices);
            let idx: [usize; 3] = s
                .indices
                .clone()
                .try_into()
                .map_err(|_| DocError::new(&ctx, "needs three indices"))?;
            if !(idx[0] < idx[1] && idx[1] < idx[2] && idx[2] < self.size) {
                return Err(DocError::new(ctx, "indices must be increasing and within size"));
            }
            sections.insert(idx, s.value.to_symbol(self.dim, self.depth)?);
        }
        Ok(LienData {
            dim: self.dim,
            size: self.size,
            isos,
            sections,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartMapDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpecDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<RecordDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LienIsoDoc {
    /// One entry per index; omitted entries default to the identity.
    #[serde(default)]
    pub maps: Vec<ChartMapDoc>,
    /// Missing pairs default to `1`.
    #[serde(default)]
    pub sections: Vec<SectionDoc>,
}

impl LienIsoDoc {
    pub fn to_iso(&self, dim: usize, size: usize, depth: u32) -> Result<LienIsoSpec> {
        let mut iso = LienIsoSpec::identity(dim, size, depth);
        if self.maps.len() > size {
            return Err(DocError::new("lien iso", format!("{} maps for {size} indices", self.maps.len())));
        }
        for (i, m) in self.maps.iter().enumerate() {
            if m.map.is_some() || m.record.is_some() {
                iso.maps[i] = record_from(&m.map, &m.record, depth, &format!("map {i}"))?;
            }
        }
        for s in &self.sections {
            let ctx = format!("section {:?}", s.indices);
            let [i, j]: [usize; 2] = s
                .indices
                .clone()
                .try_into()
                .map_err(|_| DocError::new(&ctx, "needs two indices"))?;
            if !(i < j && j < size) {
                return Err(DocError::new(ctx, "indices must be increasing and within size"));
            }
            iso.sections.insert((i, j), s.value.to_symbol(dim, depth)?);
        }
        Ok(iso)
    }
}

pub fn from_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| DocError::new(what, e))
}
