//! Fixed inputs shared by the criterion benches.

use wkb_core::quantize::SymplecticMapSpec;
use wkb_core::{int, rat, MultiPoly, WkbSymbol};

/// A dense symbol with every monomial of degree at most `degree` at each
/// order from `0` down to `-terms + 1`.
pub fn dense_symbol(dim: usize, degree: u32, terms: i64, floor: i64) -> WkbSymbol {
    let mut out = Vec::new();
    for k in 0..terms {
        let mut p = MultiPoly::one(dim);
        let mut q = MultiPoly::one(dim);
        for s in 0..dim {
            q = &q + &(&MultiPoly::x(dim, s) + &MultiPoly::u(dim, s).scale(&rat(1, 2 + k)));
        }
        for _ in 0..degree {
            p = &p * &q;
        }
        out.push((-k, p));
    }
    WkbSymbol::from_terms(dim, floor, out).unwrap()
}

/// `1 + τ^{-1} P` for the dense `P` above, used for inversion and roots.
pub fn dense_unit(dim: usize, degree: u32, floor: i64) -> WkbSymbol {
    let one = WkbSymbol::one(dim, floor);
    let tail = dense_symbol(dim, degree, 2, floor).shift_tau(-1);
    one.try_add(&tail).unwrap()
}

/// `(x, u) ↦ (x, u + a x^k)` in one degree of freedom.
pub fn shear(a: i64, k: u32) -> SymplecticMapSpec {
    let x = MultiPoly::x(1, 0);
    let u = MultiPoly::u(1, 0);
    let s = x.pow(k).scale(&int(a));
    SymplecticMapSpec::new(1, vec![x.clone(), &u + &s], vec![x, &u - &s], int(0)).unwrap()
}

/// Quarter turn `(x, u) ↦ (u, -x)`.
pub fn rotation() -> SymplecticMapSpec {
    let x = MultiPoly::x(1, 0);
    let u = MultiPoly::u(1, 0);
    SymplecticMapSpec::new(1, vec![u.clone(), -&x], vec![-&u, x], int(0)).unwrap()
}
