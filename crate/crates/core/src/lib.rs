//! Exact computer algebra for WKB operators.
//!
//! * [`poly`]: rational multivariate polynomials in `(x, u)`, Poisson bracket,
//!   pullbacks.
//! * [`forms`]: Poincaré-lemma primitives of closed polynomial forms.
//! * [`symbol`]: truncated total symbols, the star product, inverses, square
//!   roots and the transpose anti-involution.
//! * [`quantize`]: quantized symplectic transformations as generator-image
//!   records, and recognition of inner automorphisms.
//! * [`descent`]: Čech descent data: triple defects, cocycle checks, lien
//!   isomorphisms.

#![allow(clippy::needless_range_loop)]

pub mod descent;
pub mod forms;
pub mod linalg;
pub mod poly;
pub mod quantize;
pub mod symbol;

pub use poly::{int, rat, MultiPoly, PolyError, Rational, Var};
pub use symbol::{Order, OrderInfo, SymbolError, WkbSymbol};
