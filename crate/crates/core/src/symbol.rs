//! Truncated total symbols `Σ_{j ≥ F} p_j(x,u) τ^j` and their star product.
//!
//! Every symbol carries a reliability floor `F`: coefficients at orders
//! `≥ F` are exact, everything below is unknown and never stored. Products
//! propagate the floor as `max(F_P + ord Q, F_Q + ord P)`, so every emitted
//! coefficient is exact.
//!
//! The product is the Leibniz formula without τ-derivatives,
//! `σ(P∘Q) = Σ_α τ^{-|α|}/α! ∂_u^α σ(P) ∂_x^α σ(Q)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{format_rational, write_signed_sum, Exponents, MultiPoly, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("principal symbol is not a nonzero constant: {principal}")]
    NotInvertible { principal: String },
    #[error("principal symbol must be a positive rational square at order 0, got order {order} and {principal}")]
    NotPositiveSquare { order: String, principal: String },
    #[error("truncation window is empty (floor {floor})")]
    EmptyWindow { floor: i64 },
    #[error("term {term} is not homogeneous of degree {degree} in (xi, tau)")]
    NotHomogeneous { term: usize, degree: i64 },
    #[error("exponent vector length {got} does not match dimension {dim}")]
    BadExponents { got: usize, dim: usize },
}

/// τ-order of a symbol; the zero symbol has order minus infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    MinusInfinity,
    Finite(i64),
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::MinusInfinity => f.write_str("-inf"),
            Order::Finite(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderInfo {
    pub order: Order,
    pub principal: MultiPoly,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WkbSymbol {
    dim: usize,
    floor: i64,
    terms: BTreeMap<i64, MultiPoly>,
}

/// A monomial `c · x^a ξ^b τ^t` of a polynomial homogeneous in `(ξ, τ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousTerm {
    pub coeff: Rational,
    pub x: Vec<u32>,
    pub xi: Vec<u32>,
    pub tau: u32,
}

type TermMap = BTreeMap<i64, MultiPoly>;

impl WkbSymbol {
    pub fn zero(dim: usize, floor: i64) -> Self {
        WkbSymbol {
            dim,
            floor,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize, floor: i64) -> Self {
        Self::constant(dim, Rational::one(), floor)
    }

    pub fn constant(dim: usize, c: Rational, floor: i64) -> Self {
        Self::term(MultiPoly::constant(dim, c), 0, floor)
    }

    /// `p · τ^order`, dropped if below the floor.
    pub fn term(p: MultiPoly, order: i64, floor: i64) -> Self {
        let dim = p.dim();
        let mut s = Self::zero(dim, floor);
        s.insert(order, p);
        s
    }

    pub fn from_poly(p: MultiPoly, floor: i64) -> Self {
        Self::term(p, 0, floor)
    }

    pub fn tau_power(dim: usize, j: i64, floor: i64) -> Self {
        Self::term(MultiPoly::one(dim), j, floor)
    }

    pub fn var(dim: usize, v: Var, floor: i64) -> Self {
        Self::from_poly(MultiPoly::var(dim, v), floor)
    }

    pub fn x(dim: usize, i: usize, floor: i64) -> Self {
        Self::var(dim, Var::X(i), floor)
    }

    pub fn u(dim: usize, i: usize, floor: i64) -> Self {
        Self::var(dim, Var::U(i), floor)
    }

    /// Builds a symbol from `(order, coefficient)` pairs, summing repeats and
    /// discarding anything below the floor.
    pub fn from_terms<I>(dim: usize, floor: i64, terms: I) -> Result<Self, SymbolError>
    where
        I: IntoIterator<Item = (i64, MultiPoly)>,
    {
        let mut s = Self::zero(dim, floor);
        for (j, p) in terms {
            if p.dim() != dim {
                return Err(SymbolError::DimensionMismatch {
                    left: dim,
                    right: p.dim(),
                });
            }
            s.insert(j, p);
        }
        Ok(s)
    }

    fn from_map(dim: usize, floor: i64, mut terms: TermMap) -> Self {
        terms.retain(|&j, p| j >= floor && !p.is_zero());
        WkbSymbol { dim, floor, terms }
    }

    fn insert(&mut self, order: i64, p: MultiPoly) {
        if order < self.floor || p.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry(order)
            .or_insert_with(|| MultiPoly::zero(self.dim));
        *slot = &*slot + &p;
        if slot.is_zero() {
            self.terms.remove(&order);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero coefficients in ascending τ-order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &MultiPoly)> {
        self.terms.iter().map(|(&j, p)| (j, p))
    }

    pub fn coefficient(&self, order: i64) -> MultiPoly {
        self.terms
            .get(&order)
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(self.dim))
    }

    pub fn order(&self) -> Order {
        match self.terms.keys().next_back() {
            Some(&m) => Order::Finite(m),
            None => Order::MinusInfinity,
        }
    }

    /// Highest order that may carry a nonzero (possibly unknown) coefficient.
    fn top(&self) -> i64 {
        match self.order() {
            Order::Finite(m) => m,
            Order::MinusInfinity => self.floor - 1,
        }
    }

    pub fn order_and_principal(&self) -> OrderInfo {
        match self.terms.iter().next_back() {
            Some((&m, p)) => OrderInfo {
                order: Order::Finite(m),
                principal: p.clone(),
            },
            None => OrderInfo {
                order: Order::MinusInfinity,
                principal: MultiPoly::zero(self.dim),
            },
        }
    }

    /// Raises the floor to `max(floor, new_floor)`, dropping terms below it.
    pub fn truncate(&self, new_floor: i64) -> Self {
        Self::from_map(self.dim, self.floor.max(new_floor), self.terms.clone())
    }

    /// Replaces the floor without checking reliability. Only for symbols whose
    /// finitely many terms are known to be exact.
    pub fn with_floor(&self, floor: i64) -> Self {
        Self::from_map(self.dim, floor, self.terms.clone())
    }

    fn check_dim(&self, other: &WkbSymbol) -> Result<(), SymbolError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(SymbolError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    pub fn try_add(&self, other: &WkbSymbol) -> Result<WkbSymbol, SymbolError> {
        self.check_dim(other)?;
        let mut out = self.truncate(other.floor);
        for (&j, p) in &other.terms {
            out.insert(j, p.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &WkbSymbol) -> Result<WkbSymbol, SymbolError> {
        self.try_add(&-other)
    }

    pub fn scale(&self, c: &Rational) -> WkbSymbol {
        Self::from_map(
            self.dim,
            self.floor,
            self.terms.iter().map(|(&j, p)| (j, p.scale(c))).collect(),
        )
    }

    /// Multiplication by `τ^k` (central, exact).
    pub fn shift_tau(&self, k: i64) -> WkbSymbol {
        WkbSymbol {
            dim: self.dim,
            floor: self.floor + k,
            terms: self.terms.iter().map(|(&j, p)| (j + k, p.clone())).collect(),
        }
    }

    /// `P(x, u, −τ)`.
    pub fn flip_tau(&self) -> WkbSymbol {
        let m1 = -Rational::one();
        WkbSymbol {
            dim: self.dim,
            floor: self.floor,
            terms: self
                .terms
                .iter()
                .map(|(&j, p)| (j, if j % 2 == 0 { p.clone() } else { p.scale(&m1) }))
                .collect(),
        }
    }

    /// The floor a product `self ⋆ other` is reliable to.
    pub fn product_floor(&self, other: &WkbSymbol) -> i64 {
        (self.floor + other.top()).max(other.floor + self.top())
    }

    pub fn star(&self, other: &WkbSymbol) -> Result<WkbSymbol, SymbolError> {
        self.check_dim(other)?;
        let floor = self.product_floor(other);
        let terms = star_terms(self.dim, &self.terms, &other.terms, floor, i64::MAX);
        Ok(Self::from_map(self.dim, floor, terms))
    }

    /// The single coefficient of `τ^order` in `self ⋆ other`, ignoring floors.
    /// Callers are responsible for the order being inside the window.
    pub fn star_coefficient(&self, other: &WkbSymbol, order: i64) -> MultiPoly {
        star_terms(self.dim, &self.terms, &other.terms, order, order)
            .remove(&order)
            .unwrap_or_else(|| MultiPoly::zero(self.dim))
    }

    pub fn commutator(&self, other: &WkbSymbol) -> Result<WkbSymbol, SymbolError> {
        self.star(other)?.try_sub(&other.star(self)?)
    }

    /// Star power; `pow(0)` is the unit at this symbol's floor.
    pub fn star_pow(&self, n: u32) -> WkbSymbol {
        let mut acc = WkbSymbol::one(self.dim, self.floor);
        for _ in 0..n {
            acc = acc.star(self).expect("same dimension");
        }
        acc
    }

    /// Two-sided inverse by order recursion. Requires a nonzero constant
    /// principal symbol; the result is reliable down to `F − 2m`.
    pub fn invert(&self) -> Result<WkbSymbol, SymbolError> {
        let info = self.order_and_principal();
        let (m, c) = match (info.order, info.principal.as_constant()) {
            (Order::Finite(m), Some(c)) if !c.is_zero() => (m, c),
            _ => {
                return Err(SymbolError::NotInvertible {
                    principal: info.principal.to_string(),
                })
            }
        };
        let floor = self.floor - 2 * m;
        let inv_c = Rational::one() / &c;
        let mut q = TermMap::new();
        q.insert(-m, MultiPoly::constant(self.dim, inv_c.clone()));
        // coefficient of τ^{-k} in P ⋆ Q only sees q at orders > -m-k, apart
        // from the c · q_{-m-k} term itself
        for k in 1..=(m - self.floor) {
            let s = star_terms(self.dim, &self.terms, &q, -k, -k);
            if let Some(sk) = s.get(&-k) {
                q.insert(-m - k, sk.scale(&-inv_c.clone()));
            }
        }
        Ok(Self::from_map(self.dim, floor, q))
    }

    /// The square root with principal symbol `sign · √σ_0(P)`. Requires
    /// order 0 and `σ_0` a positive rational square.
    pub fn square_root(&self, sign: i8) -> Result<WkbSymbol, SymbolError> {
        if self.floor > 0 {
            return Err(SymbolError::EmptyWindow { floor: self.floor });
        }
        let info = self.order_and_principal();
        let root = match (info.order, info.principal.as_constant()) {
            (Order::Finite(0), Some(c)) if c.is_positive() => rational_sqrt(&c),
            _ => None,
        };
        let Some(mut q0) = root else {
            return Err(SymbolError::NotPositiveSquare {
                order: info.order.to_string(),
                principal: info.principal.to_string(),
            });
        };
        if sign < 0 {
            q0 = -q0;
        }
        let half_inv = Rational::one() / (&q0 * Rational::from_integer(2.into()));
        let mut q = TermMap::new();
        q.insert(0, MultiPoly::constant(self.dim, q0));
        for k in 1..=-self.floor {
            let s = star_terms(self.dim, &q, &q, -k, -k);
            let rhs = &self.coefficient(-k) - &s.get(&-k).cloned().unwrap_or_else(|| MultiPoly::zero(self.dim));
            q.insert(-k, rhs.scale(&half_inv));
        }
        Ok(Self::from_map(self.dim, self.floor, q))
    }

    /// `exp(s τ^{-1} Δ)` with `Δ = Σ_i ∂_{u_i} ∂_{x_i}`, truncated at the floor.
    pub fn exp_laplacian(&self, s: &Rational) -> WkbSymbol {
        let n = self.dim;
        let mut out = TermMap::new();
        for (&j, p) in &self.terms {
            for (e, c) in p.terms() {
                let limits: Vec<u32> = (0..n).map(|i| e[i].min(e[n + i])).collect();
                let max_total = (j - self.floor).max(-1);
                if max_total < 0 {
                    continue;
                }
                for_each_multi_index(&limits, max_total as u32, &mut |alpha| {
                    let mut coef = c.clone();
                    let mut ne = e.clone();
                    let mut tot = 0u32;
                    for i in 0..n {
                        let a = alpha[i];
                        if a == 0 {
                            continue;
                        }
                        tot += a;
                        let f = falling(e[i], a) * falling(e[n + i], a);
                        coef *= Rational::new(f, factorial(a));
                        ne[i] -= a;
                        ne[n + i] -= a;
                    }
                    for _ in 0..tot {
                        coef *= s;
                    }
                    add_to(&mut out, n, j - tot as i64, ne, coef);
                });
            }
        }
        Self::from_map(n, self.floor, out)
    }

    /// The transpose anti-involution: fixes `x_i`, `u_i`, sends `τ ↦ −τ`.
    /// `σ(P*) = Σ_α τ^{-|α|}/α! ∂_u^α ∂_x^α [σ(P)(x,u,−τ)]`.
    pub fn adjoint(&self) -> WkbSymbol {
        self.flip_tau().exp_laplacian(&Rational::one())
    }

    /// Normal-ordered symbol of a Weyl-ordered one. `P` is self-adjoint
    /// exactly when its Weyl symbol is even in `τ`.
    pub fn from_weyl(weyl: &WkbSymbol) -> WkbSymbol {
        weyl.exp_laplacian(&Rational::new(1.into(), 2.into()))
    }

    pub fn to_weyl(&self) -> WkbSymbol {
        self.exp_laplacian(&Rational::new((-1).into(), 2.into()))
    }

    /// Exact equality on the common window `max(F_P, F_Q)`.
    pub fn eq_within(&self, other: &WkbSymbol) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let f = self.floor.max(other.floor);
        let a = self.terms.range(f..);
        let b = other.terms.range(f..);
        a.eq(b)
    }

    /// True when the symbol is exactly `1` on its window.
    pub fn is_one(&self) -> bool {
        self.floor <= 0
            && self.terms.len() == 1
            && self
                .terms
                .get(&0)
                .and_then(|p| p.as_constant())
                .is_some_and(|c| c.is_one())
    }

    /// Order 0, `σ_0 = 1`, and `P ⋆ P* = 1` on the product window.
    pub fn is_star_unitary(&self) -> bool {
        let info = self.order_and_principal();
        if info.order != Order::Finite(0) || info.principal.as_constant() != Some(Rational::one()) {
            return false;
        }
        self.star(&self.adjoint()).map(|p| p.is_one()).unwrap_or(false)
    }

    /// Splits off the constant term of every coefficient. The central part is
    /// returned as a dimension-0 symbol (an element of the scalar field).
    pub fn central_part(&self) -> (WkbSymbol, WkbSymbol) {
        let mut central = TermMap::new();
        let mut residual = TermMap::new();
        let zero_e = vec![0; 2 * self.dim];
        for (&j, p) in &self.terms {
            let c = p.constant_term();
            if !c.is_zero() {
                central.insert(j, MultiPoly::constant(0, c.clone()));
            }
            let mut r = p.clone();
            r.add_term(zero_e.clone(), -c);
            residual.insert(j, r);
        }
        (
            Self::from_map(0, self.floor, central),
            Self::from_map(self.dim, self.floor, residual),
        )
    }

    /// Embeds a central symbol (constant coefficients) into dimension `dim`.
    pub fn embed_scalar(&self, dim: usize) -> Option<WkbSymbol> {
        let mut terms = TermMap::new();
        for (&j, p) in &self.terms {
            terms.insert(j, MultiPoly::constant(dim, p.as_constant()?));
        }
        Some(Self::from_map(dim, self.floor, terms))
    }

    /// `p_j(x; ξτ^{-1}, 1) τ^j` for a polynomial homogeneous of degree `j` in
    /// `(ξ, τ)`.
    pub fn dehomogenize(
        dim: usize,
        terms: &[HomogeneousTerm],
        degree: i64,
        floor: i64,
    ) -> Result<WkbSymbol, SymbolError> {
        let mut p = MultiPoly::zero(dim);
        for (k, t) in terms.iter().enumerate() {
            if t.x.len() != dim || t.xi.len() != dim {
                return Err(SymbolError::BadExponents {
                    got: t.x.len().max(t.xi.len()),
                    dim,
                });
            }
            let d: u32 = t.xi.iter().sum::<u32>() + t.tau;
            if d as i64 != degree {
                return Err(SymbolError::NotHomogeneous { term: k, degree });
            }
            let mut e = t.x.clone();
            e.extend(&t.xi);
            p.add_term(e, t.coeff.clone());
        }
        Ok(Self::term(p, degree, floor))
    }
}

impl std::ops::Neg for &WkbSymbol {
    type Output = WkbSymbol;
    fn neg(self) -> WkbSymbol {
        self.scale(&-Rational::one())
    }
}

/// Calls `f` for every multi-index `α ≤ limits` (componentwise) with
/// `|α| ≤ max_total`.
fn for_each_multi_index(limits: &[u32], max_total: u32, f: &mut dyn FnMut(&[u32])) {
    fn rec(limits: &[u32], i: usize, left: u32, cur: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if i == limits.len() {
            f(cur);
            return;
        }
        for a in 0..=limits[i].min(left) {
            cur[i] = a;
            rec(limits, i + 1, left - a, cur, f);
        }
        cur[i] = 0;
    }
    let mut cur = vec![0; limits.len()];
    rec(limits, 0, max_total, &mut cur, f);
}

fn falling(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(n - i);
    }
    acc
}

fn factorial(k: u32) -> BigInt {
    falling(k, k)
}

fn add_to(out: &mut TermMap, dim: usize, order: i64, e: Exponents, c: Rational) {
    out.entry(order)
        .or_insert_with(|| MultiPoly::zero(dim))
        .add_term(e, c);
}

/// Leibniz product of two term maps, keeping only orders in `[lo, hi]`.
fn star_terms(dim: usize, p: &TermMap, q: &TermMap, lo: i64, hi: i64) -> TermMap {
    let n = dim;
    let mut out = TermMap::new();
    for (&j, pp) in p {
        for (&k, qq) in q {
            let base = j + k;
            if base < lo {
                continue;
            }
            let max_total = (base - lo) as u32;
            let min_total = if hi == i64::MAX { 0 } else { (base - hi).max(0) as u32 };
            if min_total > max_total {
                continue;
            }
            for (e1, c1) in pp.terms() {
                for (e2, c2) in qq.terms() {
                    // ∂_u^α hits the left factor, ∂_x^α the right one
                    let limits: Vec<u32> = (0..n).map(|i| e1[n + i].min(e2[i])).collect();
                    let c12 = c1 * c2;
                    for_each_multi_index(&limits, max_total, &mut |alpha| {
                        let tot: u32 = alpha.iter().sum();
                        if tot < min_total {
                            return;
                        }
                        let mut num = BigInt::one();
                        let mut den = BigInt::one();
                        let mut e: Exponents = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                        for i in 0..n {
                            let a = alpha[i];
                            if a == 0 {
                                continue;
                            }
                            num *= falling(e1[n + i], a) * falling(e2[i], a);
                            den *= factorial(a);
                            e[i] -= a;
                            e[n + i] -= a;
                        }
                        let coef = if tot == 0 {
                            c12.clone()
                        } else {
                            &c12 * Rational::new(num, den)
                        };
                        add_to(&mut out, n, base - tot as i64, e, coef);
                    });
                }
            }
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
/// All exponent vectors of `dim` variable pairs with total degree `≤ max_degree`.
fn monomials_up_to(dim: usize, max_degree: u32) -> Vec<Exponents> {
    let limits = vec![max_degree; 2 * dim];
    let mut out = Vec::new();
    for_each_multi_index(&limits, max_degree, &mut |e| out.push(e.to_vec()));
    out
}

/// A basis of the symbols with orders in `floor..=top` and coefficients of
/// degree `≤ max_degree` that commute with every `x_i` and `u_i`, found by
/// exact elimination on the commutator coefficients.
///
/// The commutators only constrain coefficients above the floor, so the basis
/// is returned on the window `floor + 1`.
pub fn commutant_basis(dim: usize, floor: i64, top: i64, max_degree: u32) -> Vec<WkbSymbol> {
    let monos = monomials_up_to(dim, max_degree);
    let mut unknowns = Vec::new();
    for j in floor..=top {
        for e in &monos {
            unknowns.push((j, e.clone()));
        }
    }
    let gens: Vec<WkbSymbol> = (0..2 * dim)
        .map(|s| WkbSymbol::var(dim, Var::from_slot(s, dim), floor))
        .collect();
    let columns: Vec<Vec<WkbSymbol>> = unknowns
        .iter()
        .map(|(j, e)| {
            let b = WkbSymbol::term(MultiPoly::monomial(dim, e.clone(), Rational::one()), *j, floor);
            gens.iter().map(|g| b.commutator(g).expect("same dimension")).collect()
        })
        .collect();
    let window = columns
        .iter()
        .flatten()
        .map(|c| c.floor())
        .max()
        .unwrap_or(floor);
    // one equation per (generator, order, monomial) seen in any column
    let mut keys = std::collections::BTreeSet::new();
    for col in &columns {
        for (g, c) in col.iter().enumerate() {
            for (j, p) in c.terms.range(window..) {
                for (e, _) in p.terms() {
                    keys.insert((g, *j, e.clone()));
                }
            }
        }
    }
    let rows: Vec<Vec<Rational>> = keys
        .iter()
        .map(|(g, j, e)| columns.iter().map(|col| col[*g].coefficient(*j).coefficient(e)).collect())
        .collect();
    let mut basis: Vec<WkbSymbol> = Vec::new();
    for v in crate::linalg::nullspace(&rows, unknowns.len()) {
        let mut terms = TermMap::new();
        for ((j, e), c) in unknowns.iter().zip(v) {
            if *j > window && !c.is_zero() {
                add_to(&mut terms, dim, *j, e.clone(), c);
            }
        }
        let s = WkbSymbol::from_map(dim, window + 1, terms);
        if !s.is_zero() {
            basis.push(s);
        }
    }
    basis
}

pub fn rational_sqrt(c: &Rational) -> Option<Rational> {
    if c.is_negative() {
        return None;
    }
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    (&n * &n == *c.numer() && &d * &d == *c.denom()).then(|| Rational::new(n, d))
}

impl fmt::Display for WkbSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<(Rational, Option<String>)> = Vec::new();
        for (&j, p) in self.terms.iter().rev() {
            for (e, c) in p.sorted_terms() {
                let mut body = String::new();
                let mono = MultiPoly::write_monomial(&mut body, self.dim, e)?;
                if j != 0 {
                    if mono {
                        body.push('*');
                    }
                    if j == 1 {
                        body.push_str("tau");
                    } else {
                        body.push_str(&format!("tau^{j}"));
                    }
                }
                let has_body = mono || j != 0;
                items.push((c.clone(), has_body.then_some(body)));
            }
        }
        write_signed_sum(f, &items)
    }
}

impl fmt::Display for OrderInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order {
            Order::MinusInfinity => f.write_str("order -inf"),
            Order::Finite(m) => write!(f, "order {m}, principal {}", self.principal),
        }
    }
}

/// Renders a dimension-0 symbol's coefficient list, used in reports.
pub fn format_scalar_series(s: &WkbSymbol) -> String {
    let parts: Vec<String> = s
        .terms()
        .rev()
        .map(|(j, p)| format!("{}:{}", j, format_rational(&p.constant_term())))
        .collect();
    parts.join(",")
}
