//! Bounded integer windows: the ambient boxes all sets live on.
//!
//! Two conventions cover every use in this crate:
//!
//! * `Classical1D`: the interval `[1, N]`, one-dimensional. The natural
//!   home for prefix counting, where ratios are taken against `n` itself.
//! * `Centered`: the box `[-N, N]^d` for `d <= 3`, symmetric around the
//!   origin. The natural home for translation-invariant window maxima.
//!
//! A window is a value type; two windows are interchangeable exactly when
//! they compare equal. Points are `[i64; 3]` with unused trailing axes
//! pinned to zero, so a 1-dimensional point is `[x, 0, 0]`. Linear indices
//! are row-major: axis 0 varies slowest, the last live axis fastest.
//!
//! Invariants enforced at construction:
//! * `1 <= dim <= 3`, and `Classical1D` forces `dim == 1`;
//! * `N >= 1`;
//! * total cell count fits in `2^31`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice point. Axes at positions `>= dim` are always zero.
pub type Point = [i64; 3];

/// Maximum number of cells a window may hold.
pub const MAX_CELLS: i64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    /// `[1, N]`, one axis.
    Classical1D,
    /// `[-N, N]^dim`.
    Centered,
}

impl Convention {
    pub fn token(self) -> &'static str {
        match self {
            Convention::Classical1D => "classical1d",
            Convention::Centered => "centered",
        }
    }

    pub fn from_token(tok: &str) -> Option<Self> {
        match tok {
            "classical1d" => Some(Convention::Classical1D),
            "centered" => Some(Convention::Centered),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    convention: Convention,
    dim: u8,
    n: i64,
}

impl Window {
    /// The interval `[1, n]`.
    pub fn classical(n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::BadWindow {
                reason: format!("classical bound must be >= 1, got {n}"),
            });
        }
        if n > MAX_CELLS {
            return Err(Error::BadWindow {
                reason: format!("classical bound {n} exceeds {MAX_CELLS} cells"),
            });
        }
        Ok(Window {
            convention: Convention::Classical1D,
            dim: 1,
            n,
        })
    }

    /// The box `[-n, n]^dim` for `dim` in `1..=3`.
    pub fn centered(n: i64, dim: u8) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::BadWindow {
                reason: format!("dimension must be 1, 2, or 3, got {dim}"),
            });
        }
        if n < 1 {
            return Err(Error::BadWindow {
                reason: format!("centered bound must be >= 1, got {n}"),
            });
        }
        let side = 2 * n + 1;
        let mut cells: i64 = 1;
        for _ in 0..dim {
            cells = match cells.checked_mul(side) {
                Some(c) if c <= MAX_CELLS => c,
                _ => {
                    return Err(Error::BadWindow {
                        reason: format!("box [-{n},{n}]^{dim} exceeds {MAX_CELLS} cells"),
                    })
                }
            };
        }
        Ok(Window {
            convention: Convention::Centered,
            dim,
            n,
        })
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    /// The defining bound: `N` of `[1, N]` or of `[-N, N]^d`.
    pub fn bound(&self) -> i64 {
        self.n
    }

    /// Inclusive coordinate range along one axis.
    pub fn axis_range(&self) -> (i64, i64) {
        match self.convention {
            Convention::Classical1D => (1, self.n),
            Convention::Centered => (-self.n, self.n),
        }
    }

    /// Cells along one axis.
    pub fn side(&self) -> i64 {
        let (lo, hi) = self.axis_range();
        hi - lo + 1
    }

    /// Total number of cells.
    pub fn cells(&self) -> usize {
        let mut c = 1usize;
        for _ in 0..self.dim {
            c *= self.side() as usize;
        }
        c
    }

    pub fn contains(&self, p: Point) -> bool {
        let (lo, hi) = self.axis_range();
        for (axis, &coord) in p.iter().enumerate() {
            if axis < self.dim as usize {
                if coord < lo || coord > hi {
                    return false;
                }
            } else if coord != 0 {
                return false;
            }
        }
        true
    }

    /// Row-major linear index of a contained point.
    pub fn index(&self, p: Point) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let (lo, _) = self.axis_range();
        let side = self.side() as usize;
        let mut idx = 0usize;
        for coord in p.iter().take(self.dim as usize) {
            idx = idx * side + (coord - lo) as usize;
        }
        Some(idx)
    }

    /// Inverse of [`Window::index`]. Panics if `idx >= self.cells()`.
    pub fn point(&self, idx: usize) -> Point {
        assert!(idx < self.cells(), "index {idx} out of window {self}");
        let (lo, _) = self.axis_range();
        let side = self.side() as usize;
        let mut p: Point = [0; 3];
        let mut rest = idx;
        for axis in (0..self.dim as usize).rev() {
            p[axis] = lo + (rest % side) as i64;
            rest /= side;
        }
        p
    }

    /// All points in row-major order.
    pub fn iter_points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.cells()).map(move |i| self.point(i))
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.convention {
            Convention::Classical1D => write!(f, "1d:{}", self.n),
            Convention::Centered => write!(f, "c{}:{}", self.n, self.dim),
        }
    }
}

impl FromStr for Window {
    type Err = Error;

    /// Parses `1d:N` (classical) or `cN:d` (centered), the same forms
    /// produced by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::BadWindow { reason };
        if let Some(rest) = s.strip_prefix("1d:") {
            let n: i64 = rest
                .parse()
                .map_err(|_| bad(format!("bad bound in window spec '{s}'")))?;
            return Window::classical(n);
        }
        if let Some(rest) = s.strip_prefix('c') {
            let (n_str, d_str) = rest
                .split_once(':')
                .ok_or_else(|| bad(format!("missing ':' in window spec '{s}'")))?;
            let n: i64 = n_str
                .parse()
                .map_err(|_| bad(format!("bad bound in window spec '{s}'")))?;
            let d: u8 = d_str
                .parse()
                .map_err(|_| bad(format!("bad dimension in window spec '{s}'")))?;
            return Window::centered(n, d);
        }
        Err(bad(format!(
            "window spec '{s}' must look like '1d:N' or 'cN:d'"
        )))
    }
}
