//! Quantized symplectic transformations.
//!
//! A polynomial symplectic map `φ: (x,u) ↦ (f(x,u), g(x,u))` is quantized
//! into an [`AutomorphismRecord`]: symbols `X_i`, `U_i` in the source
//! variables with principal symbols `f_i`, `g_i` and the canonical
//! commutation relations `[X_i,X_j] = 0`, `[U_i,U_j] = 0`,
//! `[X_i,U_j] = −τ^{-1}δ_ij` exactly on the window. Applying the record to a
//! symbol over the target variables substitutes `X`, `U` in normal order.
//!
//! The translation `δ_c` acts trivially on symbols; its constant is carried
//! as an explicit rational on every record.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::forms::{poincare_primitive, two_form_primitive, TwoForm};
use crate::poly::{format_rational, MultiPoly, PolyError, Rational, Var};
use crate::symbol::{Order, SymbolError, WkbSymbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantizeError {
    #[error("map is not symplectic: {0}")]
    NotSymplectic(String),
    #[error("malformed map spec: {0}")]
    BadSpec(String),
    #[error("correction solver failed at order {order}: {}", defects.join("; "))]
    SolverFailure { order: i64, defects: Vec<String> },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("record is not above the identity: {0}")]
    NotAboveIdentity(String),
    #[error("not an inner automorphism within the window: inconsistent at order {order}")]
    NotInner { order: i64 },
    #[error("truncation window exhausted (floor {floor})")]
    DepthExhausted { floor: i64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// A polynomial symplectic map with its polynomial inverse.
///
/// `forward` holds `f_1..f_n, g_1..g_n` as functions of the source
/// coordinates; `inverse` holds the source coordinates `x_1..x_n, u_1..u_n`
/// as functions of the target coordinates. Target coordinates reuse the
/// variable names `x_i`, `u_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticMapSpec {
    dim: usize,
    forward: Vec<MultiPoly>,
    inverse: Vec<MultiPoly>,
    primitive_shift: Rational,
}

impl SymplecticMapSpec {
    pub fn new(
        dim: usize,
        forward: Vec<MultiPoly>,
        inverse: Vec<MultiPoly>,
        primitive_shift: Rational,
    ) -> Result<Self, QuantizeError> {
        for (name, comps) in [("forward", &forward), ("inverse", &inverse)] {
            if comps.len() != 2 * dim {
                return Err(QuantizeError::BadSpec(format!(
                    "{name} has {} components, expected {}",
                    comps.len(),
                    2 * dim
                )));
            }
            if let Some(p) = comps.iter().find(|p| p.dim() != dim) {
                return Err(QuantizeError::DimensionMismatch {
                    left: dim,
                    right: p.dim(),
                });
            }
        }
        Ok(SymplecticMapSpec {
            dim,
            forward,
            inverse,
            primitive_shift,
        })
    }

    pub fn identity(dim: usize) -> Self {
        let id = coordinates(dim);
        SymplecticMapSpec {
            dim,
            forward: id.clone(),
            inverse: id,
            primitive_shift: Rational::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn forward(&self) -> &[MultiPoly] {
        &self.forward
    }

    pub fn inverse_images(&self) -> &[MultiPoly] {
        &self.inverse
    }

    pub fn primitive_shift(&self) -> &Rational {
        &self.primitive_shift
    }

    pub fn with_shift(mut self, shift: Rational) -> Self {
        self.primitive_shift = shift;
        self
    }

    pub fn f(&self, i: usize) -> &MultiPoly {
        &self.forward[i]
    }

    pub fn g(&self, i: usize) -> &MultiPoly {
        &self.forward[self.dim + i]
    }

    pub fn is_identity(&self) -> bool {
        self.forward == coordinates(self.dim)
    }

    /// The inverse map. Its shift is the negated shift.
    pub fn inverse(&self) -> Self {
        SymplecticMapSpec {
            dim: self.dim,
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
            primitive_shift: -self.primitive_shift.clone(),
        }
    }

    /// The map `next ∘ self` (apply `self` first). Shifts add.
    pub fn then(&self, next: &SymplecticMapSpec) -> Result<Self, QuantizeError> {
        if self.dim != next.dim {
            return Err(QuantizeError::DimensionMismatch {
                left: self.dim,
                right: next.dim,
            });
        }
        let forward = next
            .forward
            .iter()
            .map(|p| p.pullback(&self.forward))
            .collect::<Result<Vec<_>, _>>()?;
        let inverse = self
            .inverse
            .iter()
            .map(|p| p.pullback(&next.inverse))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SymplecticMapSpec {
            dim: self.dim,
            forward,
            inverse,
            primitive_shift: &self.primitive_shift + &next.primitive_shift,
        })
    }

    /// Verifies the bracket relations and both inverse identities exactly,
    /// reporting the first failure.
    pub fn check_symplectic(&self) -> Verdict {
        let n = self.dim;
        let name = |slot: usize| {
            if slot < n {
                format!("f{}", slot + 1)
            } else {
                format!("g{}", slot - n + 1)
            }
        };
        for a in 0..2 * n {
            for b in a + 1..2 * n {
                let br = self.forward[a]
                    .poisson_bracket(&self.forward[b])
                    .expect("components share dimension");
                let expected = if a < n && b == a + n {
                    -Rational::one()
                } else {
                    Rational::zero()
                };
                if br.as_constant() != Some(expected.clone()) {
                    return Verdict::Fail(format!(
                        "{{{},{}}} = {} but expected {}",
                        name(a),
                        name(b),
                        br,
                        format_rational(&expected)
                    ));
                }
            }
        }
        let id = coordinates(n);
        for (label, outer, inner) in [
            ("forward after inverse", &self.forward, &self.inverse),
            ("inverse after forward", &self.inverse, &self.forward),
        ] {
            for (slot, p) in outer.iter().enumerate() {
                let composed = p.pullback(inner).expect("components share dimension");
                if composed != id[slot] {
                    return Verdict::Fail(format!(
                        "{label}: component {} is {} but expected {}",
                        slot + 1,
                        composed,
                        id[slot]
                    ));
                }
            }
        }
        Verdict::Pass
    }

    /// The primitive `a` with `u dx = v dy + da(y,v)`, expressed in target
    /// coordinates and shifted by the spec's additive constant.
    pub fn compute_primitive(&self) -> Result<MultiPoly, QuantizeError> {
        let n = self.dim;
        // ω = Σ u_i dx_i − Σ_j g_j df_j in source coordinates
        let mut omega = vec![MultiPoly::zero(n); 2 * n];
        for i in 0..n {
            omega[i] = MultiPoly::u(n, i);
        }
        for j in 0..n {
            let g = self.g(j);
            for (slot, comp) in omega.iter_mut().enumerate() {
                let df = self.f(j).d(Var::from_slot(slot, n));
                *comp = &*comp - &(g * &df);
            }
        }
        let h = poincare_primitive(&omega, n)?;
        let a = h.pullback(&self.inverse)?;
        Ok(&a + &MultiPoly::constant(n, self.primitive_shift.clone()))
    }
}

/// `x_1..x_n, u_1..u_n` as polynomials.
pub fn coordinates(dim: usize) -> Vec<MultiPoly> {
    (0..2 * dim)
        .map(|s| MultiPoly::var(dim, Var::from_slot(s, dim)))
        .collect()
}

/// An algebra automorphism given by generator images, together with its
/// underlying point map, translation constant and contact primitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismRecord {
    pub dim: usize,
    pub c: Rational,
    pub x_images: Vec<WkbSymbol>,
    pub u_images: Vec<WkbSymbol>,
    /// Primitive `a` in target-chart coordinates.
    pub primitive: MultiPoly,
    pub depth: u32,
    pub map: SymplecticMapSpec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerRecognition {
    /// Canonical representative: `σ_0 = 1` and zero constant term in every
    /// negative-order coefficient.
    pub inner: WkbSymbol,
    /// A star-unitary representative, when `P ⋆ P*` is central.
    pub unitary: Option<WkbSymbol>,
    pub central_ambiguity_note: String,
}

/// One commutation defect: label and the symbol that should vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defect {
    pub label: String,
    pub value: WkbSymbol,
}

impl AutomorphismRecord {
    pub fn identity(dim: usize, depth: u32) -> Self {
        let floor = -(depth as i64);
        AutomorphismRecord {
            dim,
            c: Rational::zero(),
            x_images: (0..dim).map(|i| WkbSymbol::x(dim, i, floor)).collect(),
            u_images: (0..dim).map(|i| WkbSymbol::u(dim, i, floor)).collect(),
            primitive: MultiPoly::zero(dim),
            depth,
            map: SymplecticMapSpec::identity(dim),
        }
    }

    pub fn images(&self) -> impl Iterator<Item = &WkbSymbol> {
        self.x_images.iter().chain(self.u_images.iter())
    }

    /// Highest floor among the generator images.
    pub fn images_floor(&self) -> i64 {
        self.images().map(|s| s.floor()).max().unwrap_or(-(self.depth as i64))
    }

    /// All `(2n choose 2) + n²` commutator defects, zero for a valid record.
    pub fn defects(&self) -> Result<Vec<Defect>, QuantizeError> {
        commutator_defects(&self.x_images, &self.u_images)
    }

    pub fn defects_vanish(&self) -> bool {
        self.defects()
            .map(|ds| ds.iter().all(|d| d.value.is_zero()))
            .unwrap_or(false)
    }

    /// True when the images agree with `other` on the common window.
    pub fn same_images(&self, other: &AutomorphismRecord) -> bool {
        self.dim == other.dim
            && self.images().zip(other.images()).all(|(a, b)| a.eq_within(b))
    }

    /// True when every image agrees with its coordinate on the window.
    pub fn is_identity_within(&self) -> bool {
        let id = AutomorphismRecord::identity(self.dim, self.depth);
        self.same_images(&id)
    }

    /// True when every image is self-adjoint, so the record commutes with the
    /// anti-involution.
    pub fn commutes_with_adjoint(&self) -> bool {
        self.images().all(|s| s.adjoint() == *s)
    }
}

fn commutator_defects(xs: &[WkbSymbol], us: &[WkbSymbol]) -> Result<Vec<Defect>, QuantizeError> {
    let n = xs.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(Defect {
                label: format!("[X{},X{}]", i + 1, j + 1),
                value: xs[i].commutator(&xs[j])?,
            });
            out.push(Defect {
                label: format!("[U{},U{}]", i + 1, j + 1),
                value: us[i].commutator(&us[j])?,
            });
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut d = xs[i].commutator(&us[j])?;
            if i == j {
                let floor = d.floor();
                d = d.try_add(&WkbSymbol::tau_power(xs[i].dim(), -1, floor))?;
            }
            out.push(Defect {
                label: format!("[X{},U{}] + tau^-1 delta", i + 1, j + 1),
                value: d,
            });
        }
    }
    Ok(out)
}

/// Quantizes a symplectic map to window depth `depth`.
///
/// The images are built through their Weyl symbols, which are kept even in
/// `τ`; this makes every image self-adjoint and the record commute with the
/// anti-involution. Commutator defects then only appear at odd orders. At
/// the first order `−(k+1)` with nonzero defects, their coefficients pushed
/// to target coordinates form a closed 2-form `Ω`; a primitive `θ` of `Ω`
/// gives the order-`τ^{-k}` corrections `ξ_i = θ_{v_i} ∘ φ`,
/// `η_i = −θ_{y_i} ∘ φ`.
pub fn quantize_map(spec: &SymplecticMapSpec, depth: u32) -> Result<AutomorphismRecord, QuantizeError> {
    if let Verdict::Fail(msg) = spec.check_symplectic() {
        return Err(QuantizeError::NotSymplectic(msg));
    }
    let n = spec.dim;
    let floor = -(depth as i64);
    let mut weyl_x: Vec<WkbSymbol> = (0..n)
        .map(|i| WkbSymbol::from_poly(spec.f(i).clone(), floor))
        .collect();
    let mut weyl_u: Vec<WkbSymbol> = (0..n)
        .map(|i| WkbSymbol::from_poly(spec.g(i).clone(), floor))
        .collect();
    let normal = |w: &[WkbSymbol]| w.iter().map(WkbSymbol::from_weyl).collect::<Vec<_>>();

    for k in 1..depth as i64 {
        let order = -(k + 1);
        let xs = normal(&weyl_x);
        let us = normal(&weyl_u);
        let defects = commutator_defects(&xs, &us)?;
        if let Some(d) = defects
            .iter()
            .find(|d| d.value.terms().any(|(j, _)| j > order))
        {
            return Err(QuantizeError::SolverFailure {
                order,
                defects: vec![format!("{} = {} above the working order", d.label, d.value)],
            });
        }
        if defects.iter().all(|d| d.value.coefficient(order).is_zero()) {
            continue;
        }
        if k % 2 == 1 {
            return Err(QuantizeError::SolverFailure {
                order,
                defects: describe(&defects),
            });
        }
        let omega = defect_two_form(spec, &defects, order)?;
        let theta = two_form_primitive(&omega, n).map_err(|_| QuantizeError::SolverFailure {
            order,
            defects: describe(&defects),
        })?;
        for i in 0..n {
            let xi = theta[n + i].pullback(&spec.forward)?;
            let eta = -&theta[i].pullback(&spec.forward)?;
            weyl_x[i] = weyl_x[i].try_add(&WkbSymbol::term(xi, -k, floor))?;
            weyl_u[i] = weyl_u[i].try_add(&WkbSymbol::term(eta, -k, floor))?;
        }
    }

    let record = AutomorphismRecord {
        dim: n,
        c: spec.primitive_shift.clone(),
        x_images: normal(&weyl_x),
        u_images: normal(&weyl_u),
        primitive: spec.compute_primitive()?,
        depth,
        map: spec.clone(),
    };
    let defects = record.defects()?;
    if defects.iter().any(|d| !d.value.is_zero()) {
        return Err(QuantizeError::SolverFailure {
            order: floor,
            defects: describe(&defects),
        });
    }
    Ok(record)
}

fn describe(defects: &[Defect]) -> Vec<String> {
    defects
        .iter()
        .filter(|d| !d.value.is_zero())
        .map(|d| format!("{} = {}", d.label, d.value))
        .collect()
}

/// Assembles the order-`order` defect coefficients, pushed to target
/// coordinates, into the 2-form whose primitive yields the corrections.
fn defect_two_form(
    spec: &SymplecticMapSpec,
    defects: &[Defect],
    order: i64,
) -> Result<TwoForm, QuantizeError> {
    let n = spec.dim;
    let mut omega = TwoForm::new();
    let mut put = |a: usize, b: usize, p: MultiPoly| {
        if !p.is_zero() {
            omega.insert((a, b), p);
        }
    };
    // same ordering as commutator_defects
    let mut it = defects.iter();
    for i in 0..n {
        for j in i + 1..n {
            let dxx = it.next().unwrap().value.coefficient(order).pullback(&spec.inverse)?;
            let duu = it.next().unwrap().value.coefficient(order).pullback(&spec.inverse)?;
            put(n + i, n + j, dxx);
            put(i, j, duu);
        }
    }
    for i in 0..n {
        for j in 0..n {
            let dxu = it.next().unwrap().value.coefficient(order).pullback(&spec.inverse)?;
            put(j, n + i, dxu);
        }
    }
    Ok(omega)
}

/// Normal-ordered substitution `Σ c X^β ⋆ U^γ τ^j` of the record's images
/// into a symbol over the target variables.
pub fn apply_automorphism(a: &AutomorphismRecord, p: &WkbSymbol) -> Result<WkbSymbol, QuantizeError> {
    if p.dim() != a.dim {
        return Err(QuantizeError::DimensionMismatch {
            left: a.dim,
            right: p.dim(),
        });
    }
    let n = a.dim;
    let base_floor = p.floor().max(a.images_floor());
    let images: Vec<&WkbSymbol> = a.images().collect();
    let mut powers: Vec<Vec<WkbSymbol>> = images
        .iter()
        .map(|s| vec![WkbSymbol::one(n, s.floor()), (*s).clone()])
        .collect();
    let mut out = WkbSymbol::zero(n, base_floor);
    for (j, coeff) in p.terms() {
        for (e, c) in coeff.terms() {
            let mut term = WkbSymbol::constant(n, c.clone(), base_floor);
            for (slot, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pw = &mut powers[slot];
                while pw.len() <= k as usize {
                    let next = pw[pw.len() - 1].star(&pw[1])?;
                    pw.push(next);
                }
                term = term.star(&pw[k as usize])?;
            }
            out = out.try_add(&term.shift_tau(j))?;
        }
    }
    Ok(out)
}

/// `A ∘ B`: apply `B`, then `A`. The point map is `φ_B ∘ φ_A`, translation
/// constants add, and the primitive is `a_B + a_A ∘ φ_B^{-1}`.
pub fn compose_automorphisms(
    a: &AutomorphismRecord,
    b: &AutomorphismRecord,
) -> Result<AutomorphismRecord, QuantizeError> {
    if a.dim != b.dim {
        return Err(QuantizeError::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let x_images = b
        .x_images
        .iter()
        .map(|s| apply_automorphism(a, s))
        .collect::<Result<Vec<_>, _>>()?;
    let u_images = b
        .u_images
        .iter()
        .map(|s| apply_automorphism(a, s))
        .collect::<Result<Vec<_>, _>>()?;
    let floor = x_images
        .iter()
        .chain(&u_images)
        .map(|s| s.floor())
        .max()
        .unwrap_or(0);
    if floor > 0 {
        return Err(QuantizeError::DepthExhausted { floor });
    }
    let map = a.map.then(&b.map)?.with_shift(&a.c + &b.c);
    let primitive = &b.primitive + &a.primitive.pullback(b.map.inverse_images())?;
    Ok(AutomorphismRecord {
        dim: a.dim,
        c: &a.c + &b.c,
        x_images,
        u_images,
        primitive,
        depth: a.depth.min(b.depth).min((-floor) as u32),
        map,
    })
}

/// The record `B` with `A ∘ B = id` on the window, solved order by order
/// starting from the inverse point map.
pub fn invert_automorphism(a: &AutomorphismRecord) -> Result<AutomorphismRecord, QuantizeError> {
    let n = a.dim;
    let floor = a.images_floor();
    let inv = a.map.inverse_images();
    let mut images = Vec::with_capacity(2 * n);
    for slot in 0..2 * n {
        let target = WkbSymbol::var(n, Var::from_slot(slot, n), floor);
        let mut y = WkbSymbol::from_poly(inv[slot].clone(), floor);
        for k in 1..=-floor {
            let r = apply_automorphism(a, &y)?.try_sub(&target)?;
            let rk = r.coefficient(-k);
            if r.terms().any(|(j, _)| j > -k) {
                return Err(QuantizeError::SolverFailure {
                    order: -k,
                    defects: vec![format!("inverse residual {r}")],
                });
            }
            if !rk.is_zero() {
                let zeta = -&rk.pullback(inv)?;
                y = y.try_add(&WkbSymbol::term(zeta, -k, floor))?;
            }
        }
        let check = apply_automorphism(a, &y)?;
        if !check.eq_within(&target) {
            return Err(QuantizeError::SolverFailure {
                order: floor,
                defects: vec![format!("inverse residual {}", check.try_sub(&target)?)],
            });
        }
        images.push(y);
    }
    let u_images = images.split_off(n);
    Ok(AutomorphismRecord {
        dim: n,
        c: -a.c.clone(),
        x_images: images,
        u_images,
        primitive: -&a.primitive.pullback(a.map.forward())?,
        depth: a.depth,
        map: a.map.inverse(),
    })
}

/// `δ_c ∘ Ad(P)` as a record above the identity:
/// `X_i = P ⋆ x_i ⋆ P^{-1}`, `U_i = P ⋆ u_i ⋆ P^{-1}`.
pub fn ad_automorphism(p: &WkbSymbol, c: Rational) -> Result<AutomorphismRecord, QuantizeError> {
    let n = p.dim();
    let floor = p.floor();
    let p_inv = p.invert()?;
    let conj = |g: WkbSymbol| -> Result<WkbSymbol, QuantizeError> { Ok(p.star(&g)?.star(&p_inv)?) };
    let x_images = (0..n)
        .map(|i| conj(WkbSymbol::x(n, i, floor)))
        .collect::<Result<Vec<_>, _>>()?;
    let u_images = (0..n)
        .map(|i| conj(WkbSymbol::u(n, i, floor)))
        .collect::<Result<Vec<_>, _>>()?;
    let top = x_images
        .iter()
        .chain(&u_images)
        .map(|s| s.floor())
        .max()
        .unwrap_or(floor);
    if top > 0 {
        return Err(QuantizeError::DepthExhausted { floor: top });
    }
    Ok(AutomorphismRecord {
        dim: n,
        c: c.clone(),
        x_images,
        u_images,
        primitive: MultiPoly::constant(n, c.clone()),
        depth: (-top) as u32,
        map: SymplecticMapSpec::identity(n).with_shift(c),
    })
}

const CENTRAL_NOTE: &str = "inner part is determined up to a central factor in k_*; \
the canonical representative has zero constant term in every negative-order coefficient";

/// Solves `P ⋆ x_i = X_i ⋆ P`, `P ⋆ u_i = U_i ⋆ P` order by order for
/// `P` with `σ_0(P) = 1`.
///
/// With `P = 1 + Σ_k τ^{-k} p_{-k}` the order-`−(k+1)` equations read
/// `∂_{u_i} p_{-k} = [(X_i − x_i) ⋆ P]_{−(k+1)}` and
/// `∂_{x_i} p_{-k} = −[(U_i − u_i) ⋆ P]_{−(k+1)}`, whose right-hand sides
/// only involve already-known coefficients. Each `p_{-k}` is the primitive
/// vanishing at the origin. Images reliable to floor `F` determine `P` to
/// floor `F + 1`.
pub fn recognize_inner(a: &AutomorphismRecord) -> Result<InnerRecognition, QuantizeError> {
    let n = a.dim;
    for (slot, img) in a.images().enumerate() {
        let v = Var::from_slot(slot, n);
        let info = img.order_and_principal();
        let principal_ok = match info.order {
            Order::Finite(0) => info.principal == MultiPoly::var(n, v),
            _ => false,
        };
        if !principal_ok {
            return Err(QuantizeError::NotAboveIdentity(format!(
                "image of {v} has principal part {} at order {}",
                info.principal, info.order
            )));
        }
    }
    let f = a.images_floor();
    let p_floor = f + 1;
    if p_floor > 0 {
        return Err(QuantizeError::DepthExhausted { floor: p_floor });
    }
    let deviations: Vec<WkbSymbol> = a
        .images()
        .enumerate()
        .map(|(slot, img)| img.try_sub(&WkbSymbol::var(n, Var::from_slot(slot, n), img.floor())))
        .collect::<Result<_, _>>()?;

    let mut p = WkbSymbol::one(n, p_floor);
    for k in 0..-p_floor + 1 {
        let order = -(k + 1);
        if order < f {
            break;
        }
        let mut omega = vec![MultiPoly::zero(n); 2 * n];
        for i in 0..n {
            let rx = deviations[i].star_coefficient(&p, order);
            let ru = deviations[n + i].star_coefficient(&p, order);
            omega[n + i] = rx;
            omega[i] = -&ru;
        }
        if k == 0 {
            if omega.iter().any(|c| !c.is_zero()) {
                return Err(QuantizeError::NotInner { order: 0 });
            }
            continue;
        }
        let pk = poincare_primitive(&omega, n).map_err(|_| QuantizeError::NotInner { order: -k })?;
        p = p.try_add(&WkbSymbol::term(pk, -k, p_floor))?;
    }

    // Ad(P) must reproduce the images on the window
    let ad = ad_automorphism(&p, Rational::zero())?;
    for (mine, given) in ad.images().zip(a.images()) {
        if !mine.eq_within(given) {
            return Err(QuantizeError::NotInner { order: p_floor });
        }
    }

    let w = p.star(&p.adjoint())?;
    let (central, residual) = w.central_part();
    let unitary = if residual.is_zero() {
        let zeta = central.invert()?.square_root(1)?;
        let zeta = zeta.embed_scalar(n).expect("scalar series");
        Some(p.star(&zeta)?)
    } else {
        None
    };
    Ok(InnerRecognition {
        inner: p,
        unitary,
        central_ambiguity_note: CENTRAL_NOTE.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn x() -> MultiPoly {
        MultiPoly::x(1, 0)
    }
    fn u() -> MultiPoly {
        MultiPoly::u(1, 0)
    }

    fn rotation() -> SymplecticMapSpec {
        SymplecticMapSpec::new(1, vec![u(), -&x()], vec![-&u(), x()], int(0)).unwrap()
    }

    fn shear() -> SymplecticMapSpec {
        let s = x().pow(2).scale(&int(3));
        SymplecticMapSpec::new(1, vec![x(), &u() + &s], vec![x(), &u() - &s], int(0)).unwrap()
    }

    #[test]
    fn symplectic_checks() {
        assert!(SymplecticMapSpec::identity(2).check_symplectic().is_pass());
        assert!(rotation().check_symplectic().is_pass());
        assert!(shear().check_symplectic().is_pass());
        let bad = SymplecticMapSpec::new(
            1,
            vec![x(), u().scale(&int(2))],
            vec![x(), u().scale(&rat(1, 2))],
            int(0),
        )
        .unwrap();
        match bad.check_symplectic() {
            Verdict::Fail(msg) => assert_eq!(msg, "{f1,g1} = -2 but expected -1"),
            Verdict::Pass => panic!("scaling is not symplectic"),
        }
        let wrong_inverse = SymplecticMapSpec::new(1, vec![u(), -&x()], vec![u(), -&x()], int(0)).unwrap();
        assert!(!wrong_inverse.check_symplectic().is_pass());
    }

    #[test]
    fn primitives() {
        assert!(SymplecticMapSpec::identity(1).compute_primitive().unwrap().is_zero());
        // h = x u in source coordinates, x = -v and u = y in the target
        assert_eq!(rotation().compute_primitive().unwrap(), -&(&x() * &u()));
        assert_eq!(shear().compute_primitive().unwrap(), -&x().pow(3));
        let shifted = shear().with_shift(rat(5, 2));
        assert_eq!(
            shifted.compute_primitive().unwrap(),
            &(-&x().pow(3)) + &MultiPoly::constant(1, rat(5, 2))
        );
    }

    #[test]
    fn exact_quantizations_need_no_corrections() {
        for spec in [SymplecticMapSpec::identity(1), rotation(), shear()] {
            let rec = quantize_map(&spec, 8).unwrap();
            for i in 0..1 {
                assert_eq!(rec.x_images[i], WkbSymbol::from_poly(spec.f(i).clone(), -8));
                assert_eq!(rec.u_images[i], WkbSymbol::from_poly(spec.g(i).clone(), -8));
            }
            assert!(rec.defects_vanish());
        }
    }

    /// `(x, u) ↦ (x + (u + x^3)^3, u + x^3)`, a composite of two cubic shears.
    fn double_shear() -> SymplecticMapSpec {
        let v = &u() + &x().pow(3);
        let f = &x() + &v.pow(3);
        let y = x();
        let w = &u() - &(&x() - &u().pow(3)).pow(3);
        let xinv = &y - &u().pow(3);
        SymplecticMapSpec::new(1, vec![f, v], vec![xinv, w], int(0)).unwrap()
    }

    #[test]
    fn nonlinear_map_gets_corrections() {
        let spec = double_shear();
        assert!(spec.check_symplectic().is_pass());
        let rec = quantize_map(&spec, 6).unwrap();
        assert!(rec.defects_vanish());
        assert!(rec.commutes_with_adjoint());
        assert_eq!(rec.x_images[0].coefficient(0), *spec.f(0));
        assert_eq!(rec.u_images[0].coefficient(0), *spec.g(0));
        let corrected = rec.images().any(|s| {
            s.to_weyl().terms().any(|(j, p)| j < 0 && !p.is_zero())
        });
        assert!(corrected);
        let inv = invert_automorphism(&rec).unwrap();
        assert!(compose_automorphisms(&rec, &inv).unwrap().is_identity_within());
        assert!(compose_automorphisms(&inv, &rec).unwrap().is_identity_within());
    }

    #[test]
    fn non_symplectic_is_rejected() {
        let bad = SymplecticMapSpec::new(1, vec![x(), u().scale(&int(2))], vec![x(), u().scale(&rat(1, 2))], int(0)).unwrap();
        assert!(matches!(quantize_map(&bad, 4), Err(QuantizeError::NotSymplectic(_))));
    }

    #[test]
    fn rotation_acts_by_normal_ordering() {
        let rec = quantize_map(&rotation(), 6).unwrap();
        let xu = WkbSymbol::from_poly(&x() * &u(), -6);
        let got = apply_automorphism(&rec, &xu).unwrap();
        assert_eq!(got.to_string(), "-x1*u1 - tau^-1");
        let tau = WkbSymbol::tau_power(1, 1, -6);
        assert_eq!(apply_automorphism(&rec, &tau).unwrap(), tau.truncate(-5));
    }

    #[test]
    fn four_quarter_turns() {
        let r = quantize_map(&rotation().with_shift(int(1)), 6).unwrap();
        let mut acc = AutomorphismRecord::identity(1, 6);
        for _ in 0..4 {
            acc = compose_automorphisms(&acc, &r).unwrap();
        }
        assert!(acc.is_identity_within());
        assert_eq!(acc.c, int(4));
        assert!(acc.map.is_identity());
        let inv = invert_automorphism(&r).unwrap();
        assert!(compose_automorphisms(&r, &inv).unwrap().is_identity_within());
        assert!(compose_automorphisms(&inv, &r).unwrap().is_identity_within());
        assert_eq!(inv.x_images[0].to_string(), "-u1");
    }

    #[test]
    fn ad_examples() {
        let id = ad_automorphism(&WkbSymbol::one(1, -6), int(0)).unwrap();
        assert!(id.is_identity_within());
        let tr = ad_automorphism(&WkbSymbol::one(1, -6), int(5)).unwrap();
        assert!(tr.is_identity_within());
        assert_eq!(tr.c, int(5));
        let p = WkbSymbol::from_terms(1, -6, [(0, MultiPoly::one(1)), (-1, x())]).unwrap();
        let rec = ad_automorphism(&p, int(0)).unwrap();
        assert_eq!(rec.x_images[0], WkbSymbol::x(1, 0, -6));
        // oracle: P ⋆ u ⋆ P^{-1} = u + [P,u] P^{-1} = u − τ^{-1}∂_x P ⋆ P^{-1}
        let pinv = p.invert().unwrap();
        let corr = WkbSymbol::tau_power(1, -2, -6).star(&pinv).unwrap();
        let want = WkbSymbol::u(1, 0, -6).try_sub(&corr).unwrap();
        assert_eq!(rec.u_images[0], want);
    }

    #[test]
    fn recognize_examples() {
        let r = recognize_inner(&AutomorphismRecord::identity(1, 6)).unwrap();
        assert!(r.inner.is_one());
        let p = WkbSymbol::from_terms(1, -6, [(0, MultiPoly::one(1)), (-1, x())]).unwrap();
        let rec = ad_automorphism(&p, int(0)).unwrap();
        let r = recognize_inner(&rec).unwrap();
        assert!(r.inner.eq_within(&p));
        assert_eq!(r.inner.floor(), -5);
        let mut tr = AutomorphismRecord::identity(1, 6);
        tr.c = int(7);
        assert!(recognize_inner(&tr).unwrap().inner.is_one());
    }

    #[test]
    fn recognize_rejects_outer_data() {
        let rec = quantize_map(&rotation(), 4).unwrap();
        assert!(matches!(recognize_inner(&rec), Err(QuantizeError::NotAboveIdentity(_))));
        // X = x + τ^{-1}: a Hamiltonian shift, not inner with σ_0(P) = 1
        let mut rec = AutomorphismRecord::identity(1, 4);
        rec.x_images[0] = rec.x_images[0].try_add(&WkbSymbol::tau_power(1, -1, -4)).unwrap();
        assert_eq!(recognize_inner(&rec), Err(QuantizeError::NotInner { order: 0 }));
    }
}
