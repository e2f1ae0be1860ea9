//! Exact multivariate polynomials in position variables `x_1..x_n` and
//! momentum variables `u_1..u_n` with rational coefficients.
//!
//! Monomials are keyed by a dense exponent vector of length `2n`: the first
//! `n` entries are the `x` exponents, the last `n` the `u` exponents. No zero
//! coefficient is ever stored.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar. Always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Builds `num/den` from machine integers. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("form is not closed: compatibility between d{first} and d{second} fails")]
    NotClosed { first: Var, second: Var },
}

/// A coordinate on the cotangent chart. Indices are zero-based; display is
/// one-based (`x1`, `u1`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X(usize),
    U(usize),
}

impl Var {
    /// Position of the variable in a dense exponent vector of dimension `dim`.
    pub fn slot(self, dim: usize) -> usize {
        match self {
            Var::X(i) => i,
            Var::U(i) => dim + i,
        }
    }

    pub fn from_slot(slot: usize, dim: usize) -> Var {
        if slot < dim {
            Var::X(slot)
        } else {
            Var::U(slot - dim)
        }
    }

    pub fn index(self) -> usize {
        match self {
            Var::X(i) | Var::U(i) => i,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{}", i + 1),
            Var::U(i) => write!(f, "u{}", i + 1),
        }
    }
}

pub type Exponents = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        MultiPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; 2 * dim], c);
        p
    }

    pub fn var(dim: usize, v: Var) -> Self {
        assert!(v.index() < dim, "variable {v} out of range for dim {dim}");
        let mut e = vec![0; 2 * dim];
        e[v.slot(dim)] = 1;
        Self::monomial(dim, e, Rational::one())
    }

    pub fn x(dim: usize, i: usize) -> Self {
        Self::var(dim, Var::X(i))
    }

    pub fn u(dim: usize, i: usize) -> Self {
        Self::var(dim, Var::U(i))
    }

    pub fn monomial(dim: usize, exps: Exponents, c: Rational) -> Self {
        assert_eq!(exps.len(), 2 * dim, "exponent vector length");
        let mut p = Self::zero(dim);
        p.add_term(exps, c);
        p
    }

    /// Builds a polynomial from `(coefficient, x-exponents, u-exponents)`
    /// triples, summing repeated monomials.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Rational, Vec<u32>, Vec<u32>)>,
    {
        let mut p = Self::zero(dim);
        for (c, xs, us) in terms {
            if xs.len() != dim {
                return Err(PolyError::ComponentCount {
                    expected: dim,
                    got: xs.len(),
                });
            }
            if us.len() != dim {
                return Err(PolyError::ComponentCount {
                    expected: dim,
                    got: us.len(),
                });
            }
            let mut e = xs;
            e.extend(us);
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// The coefficient of the constant monomial.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&vec![0; 2 * self.dim])
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Highest exponent of `v` appearing in any monomial.
    pub fn degree_in(&self, v: Var) -> u32 {
        let s = v.slot(self.dim);
        self.terms.keys().map(|e| e[s]).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, exps: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dim(&self, other: &MultiPoly) -> Result<(), PolyError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(PolyError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_dim(other)?;
        let mut out = MultiPoly::zero(self.dim);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Rational) -> MultiPoly {
        if s.is_zero() {
            return MultiPoly::zero(self.dim);
        }
        MultiPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c * s))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.dim);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Iterated partial derivative `∂_v^order`.
    pub fn partial_derivative(&self, v: Var, order: u32) -> Result<MultiPoly, PolyError> {
        if v.index() >= self.dim {
            return Err(PolyError::IndexOutOfRange {
                index: v.index() + 1,
                dim: self.dim,
            });
        }
        let s = v.slot(self.dim);
        let mut out = MultiPoly::zero(self.dim);
        for (e, c) in &self.terms {
            if e[s] < order {
                continue;
            }
            let mut factor = BigInt::one();
            for k in 0..order {
                factor *= BigInt::from(e[s] - k);
            }
            let mut ne = e.clone();
            ne[s] -= order;
            out.add_term(ne, c * Rational::from_integer(factor));
        }
        Ok(out)
    }

    /// First derivative; panics on an out-of-range variable.
    pub fn d(&self, v: Var) -> MultiPoly {
        self.partial_derivative(v, 1)
            .expect("variable index within dimension")
    }

    /// `{p,q} = Σ_i (∂_{u_i}p ∂_{x_i}q − ∂_{u_i}q ∂_{x_i}p)`.
    ///
    /// With this sign the leading term of the star commutator `[P,Q]` is
    /// `τ^{-1}{σ(P),σ(Q)}`, so `{x_i, u_j} = −δ_ij`.
    pub fn poisson_bracket(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_dim(other)?;
        let mut out = MultiPoly::zero(self.dim);
        for i in 0..self.dim {
            let a = &self.d(Var::U(i)) * &other.d(Var::X(i));
            let b = &other.d(Var::U(i)) * &self.d(Var::X(i));
            out = &(&out + &a) - &b;
        }
        Ok(out)
    }

    /// Substitutes `images[slot]` for each coordinate (`x_1..x_n, u_1..u_n`).
    /// The images may live in a different dimension; the result does too.
    pub fn pullback(&self, images: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
        if images.len() != 2 * self.dim {
            return Err(PolyError::ComponentCount {
                expected: 2 * self.dim,
                got: images.len(),
            });
        }
        let target_dim = images.first().map(|p| p.dim).unwrap_or(self.dim);
        if let Some(bad) = images.iter().find(|p| p.dim != target_dim) {
            return Err(PolyError::DimensionMismatch {
                left: target_dim,
                right: bad.dim,
            });
        }
        // powers of each image, grown on demand
        let mut powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|p| vec![MultiPoly::one(target_dim), p.clone()])
            .collect();
        let mut out = MultiPoly::zero(target_dim);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(target_dim, c.clone());
            for (slot, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pw = &mut powers[slot];
                while pw.len() <= k as usize {
                    let next = &pw[pw.len() - 1] * &pw[1];
                    pw.push(next);
                }
                term = &term * &pw[k as usize];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Exact gradient `(∂_{x_1}p, .., ∂_{x_n}p, ∂_{u_1}p, .., ∂_{u_n}p)`.
    pub fn gradient(&self) -> Vec<MultiPoly> {
        (0..2 * self.dim)
            .map(|s| self.d(Var::from_slot(s, self.dim)))
            .collect()
    }

    /// Monomials sorted in descending graded-lexicographic order.
    pub fn sorted_terms(&self) -> Vec<(&Exponents, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }

    /// Writes one monomial as `c*x1^a*u1^b`; returns false if nothing but the
    /// coefficient was written.
    pub(crate) fn write_monomial(
        f: &mut impl fmt::Write,
        dim: usize,
        exps: &[u32],
    ) -> Result<bool, fmt::Error> {
        let mut wrote = false;
        for (slot, &k) in exps.iter().enumerate() {
            if k == 0 {
                continue;
            }
            if wrote {
                f.write_char('*')?;
            }
            write!(f, "{}", Var::from_slot(slot, dim))?;
            if k > 1 {
                write!(f, "^{k}")?;
            }
            wrote = true;
        }
        Ok(wrote)
    }
}

/// `num/den` with `/1` suppressed.
pub fn format_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Writes a signed list of `(coefficient, body)` pairs as `a + b - c`.
/// `body` is `None` for a bare scalar.
pub(crate) fn write_signed_sum(
    f: &mut impl fmt::Write,
    items: &[(Rational, Option<String>)],
) -> fmt::Result {
    if items.is_empty() {
        return f.write_str("0");
    }
    for (k, (c, body)) in items.iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if neg {
                f.write_char('-')?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        match body {
            None => f.write_str(&format_rational(&abs))?,
            Some(b) if abs.is_one() => f.write_str(b)?,
            Some(b) => write!(f, "{}*{}", format_rational(&abs), b)?,
        }
    }
    Ok(())
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<(Rational, Option<String>)> = self
            .sorted_terms()
            .into_iter()
            .map(|(e, c)| {
                let mut s = String::new();
                let wrote = MultiPoly::write_monomial(&mut s, self.dim, e).unwrap();
                (c.clone(), wrote.then_some(s))
            })
            .collect();
        write_signed_sum(f, &items)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $call:ident) => {
        impl std::ops::$tr<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            /// Panics on a dimension mismatch; use the `try_` form to recover.
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                self.$call(rhs).expect("polynomial dimensions agree")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}
