//! Exact finite-scale computations on subsets of bounded integer windows:
//! Minkowski sums, cube dilation/erosion, block transforms, density
//! functionals (prefix, Schnirelmann, sliding-window maximum), witness-set
//! tables, construction generators, combinatorial checkers, and a small
//! text language for describing sets.
//!
//! Everything operates on [`LatticeSet`], a dense bit vector over a
//! [`Window`] (an interval `[1,N]` or a centered box `[-N,N]^d`, `d <= 3`).
//! Sets are immutable values; every operation is a pure function. Density
//! kernels use exact rational arithmetic throughout; no floating point.

pub mod density;
pub mod error;
pub mod families;
pub mod lattice;
pub mod morph;
pub mod qfmt;
pub mod setlang;
pub mod verify;
pub mod window;

pub use error::{Error, Result};
pub use lattice::{BoolOp, LatticeSet};
pub use window::{Convention, Point, Window};

/// Numeric type for all density ratios: exact rationals over `i128`.
///
/// Windows hold at most 2^31 cells, so every count and every sample size
/// fits comfortably; cross-multiplied comparisons stay within `i128`.
pub type Q = num::rational::Ratio<i128>;

/// Shorthand for an exact ratio `n/d`.
pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}
