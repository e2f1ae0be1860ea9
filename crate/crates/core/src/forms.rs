//! Polynomial differential forms on the affine chart and their Poincaré-lemma
//! primitives.
//!
//! A 1-form `Σ A_i dx_i + B_i du_i` is a slice of `2n` coefficients in slot
//! order (`A_1..A_n, B_1..B_n`). A 2-form is a map from slot pairs `(a, b)`,
//! `a < b`, to the coefficient of `dz_a ∧ dz_b`.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::poly::{MultiPoly, PolyError, Rational, Var};

pub type TwoForm = BTreeMap<(usize, usize), MultiPoly>;

fn check_len(omega: &[MultiPoly], dim: usize) -> Result<(), PolyError> {
    if omega.len() != 2 * dim {
        return Err(PolyError::ComponentCount {
            expected: 2 * dim,
            got: omega.len(),
        });
    }
    if let Some(bad) = omega.iter().find(|p| p.dim() != dim) {
        return Err(PolyError::DimensionMismatch {
            left: dim,
            right: bad.dim(),
        });
    }
    Ok(())
}

/// Exterior derivative of a 1-form.
pub fn exterior_derivative(omega: &[MultiPoly], dim: usize) -> Result<TwoForm, PolyError> {
    check_len(omega, dim)?;
    let mut out = TwoForm::new();
    for a in 0..2 * dim {
        for b in a + 1..2 * dim {
            let c = &omega[b].d(Var::from_slot(a, dim)) - &omega[a].d(Var::from_slot(b, dim));
            if !c.is_zero() {
                out.insert((a, b), c);
            }
        }
    }
    Ok(out)
}

/// First slot pair `(a, b)` where `∂_a ω_b ≠ ∂_b ω_a`, if any.
pub fn first_non_closed_pair(omega: &[MultiPoly], dim: usize) -> Result<Option<(Var, Var)>, PolyError> {
    let d = exterior_derivative(omega, dim)?;
    Ok(d.keys()
        .next()
        .map(|&(a, b)| (Var::from_slot(a, dim), Var::from_slot(b, dim))))
}

/// The primitive `h` of a closed 1-form with `h(0) = 0`:
/// `h(z) = ∫₀¹ ⟨ω(tz), z⟩ dt`, so a monomial of degree `d` in `ω_i`
/// contributes `z_i · m / (d + 1)`.
pub fn poincare_primitive(omega: &[MultiPoly], dim: usize) -> Result<MultiPoly, PolyError> {
    if let Some((first, second)) = first_non_closed_pair(omega, dim)? {
        return Err(PolyError::NotClosed { first, second });
    }
    let mut h = MultiPoly::zero(dim);
    for (slot, comp) in omega.iter().enumerate() {
        for (e, c) in comp.terms() {
            let deg: u32 = e.iter().sum();
            let mut ne = e.clone();
            ne[slot] += 1;
            h.add_term(ne, c / Rational::from_integer(BigInt::from(deg + 1)));
        }
    }
    Ok(h)
}

/// Checks `dΩ = 0` and returns the first failing slot triple otherwise.
pub fn first_non_closed_triple(omega: &TwoForm, dim: usize) -> Option<(usize, usize, usize)> {
    let get = |a: usize, b: usize| omega.get(&(a, b)).cloned().unwrap_or_else(|| MultiPoly::zero(dim));
    let n2 = 2 * dim;
    for a in 0..n2 {
        for b in a + 1..n2 {
            for c in b + 1..n2 {
                let s = &(&get(b, c).d(Var::from_slot(a, dim)) - &get(a, c).d(Var::from_slot(b, dim)))
                    + &get(a, b).d(Var::from_slot(c, dim));
                if !s.is_zero() {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// A 1-form `θ` with `dθ = Ω` for a closed polynomial 2-form, via the radial
/// homotopy `θ = Σ_{a<b} ∫₀¹ t Ω_ab(tz) (z_a dz_b − z_b dz_a) dt`.
pub fn two_form_primitive(omega: &TwoForm, dim: usize) -> Result<Vec<MultiPoly>, PolyError> {
    if let Some((a, b, _)) = first_non_closed_triple(omega, dim) {
        return Err(PolyError::NotClosed {
            first: Var::from_slot(a, dim),
            second: Var::from_slot(b, dim),
        });
    }
    let mut theta = vec![MultiPoly::zero(dim); 2 * dim];
    for (&(a, b), coeff) in omega {
        for (e, c) in coeff.terms() {
            let deg: u32 = e.iter().sum();
            let w = c / Rational::from_integer(BigInt::from(deg + 2));
            let mut ea = e.clone();
            ea[a] += 1;
            theta[b].add_term(ea, w.clone());
            let mut eb = e.clone();
            eb[b] += 1;
            theta[a].add_term(eb, -w);
        }
    }
    Ok(theta)
}
