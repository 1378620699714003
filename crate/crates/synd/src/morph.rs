//! Minkowski-style operations on windowed sets: sumsets, cube dilation
//! and erosion, their one-sided block variants, and the n-block quotient
//! and fill transforms.
//!
//! Conventions that hold throughout:
//!
//! * Dilation clips at the window boundary: `A + K` means `(A + K) ∩ W`.
//! * Erosion is exact, never inflated by truncation: a point survives
//!   only when its whole structuring cube lies inside the window AND
//!   inside the set, so points within the structuring radius of the
//!   boundary are excluded by definition.
//! * Cube operations use the centered cube `[-r, r]^d` and are computed
//!   separably, one axis at a time, with a doubling scheme: building the
//!   union (or intersection) of `w+1` consecutive shifts costs O(log w)
//!   whole-set shift passes instead of O(w).
//! * Block operations use the one-sided block `[0, n-1]^d`; quotient and
//!   fill anchor blocks at `n·x + [0, n-1]^d` with `x` ranging over all
//!   integers, including negative anchors on centered windows.
//!
//! The doubling passes for a shift range `[lo, hi]` with `lo ≤ 0 ≤ hi`
//! split at zero and run each half monotonically in one direction. That
//! matters: composing opposite-direction translations would clip cells
//! at the boundary that re-enter, producing wrong answers near edges.

use crate::error::{Error, Result};
use crate::lattice::LatticeSet;
use crate::window::{Point, Window};

fn unit(axis: usize, j: i64) -> Point {
    let mut p = [0i64; 3];
    p[axis] = j;
    p
}

fn check_radius(window: &Window, r: i64) -> Result<()> {
    if r < 0 || r > window.bound() {
        Err(Error::RadiusTooLarge {
            radius: r,
            window: window.to_string(),
        })
    } else {
        Ok(())
    }
}

/// Union of translates `⋃_{j=0..=w} (S + j·e_axis)` via doubling.
fn or_run_up(s: &LatticeSet, axis: usize, w: i64) -> LatticeSet {
    let mut acc = s.clone();
    let mut have = 0i64;
    while have < w {
        let step = (have + 1).min(w - have);
        acc = acc
            .union(&acc.translate(unit(axis, step)))
            .expect("same window");
        have += step;
    }
    acc
}

/// Union of translates `⋃_{j=0..=w} (S - j·e_axis)` via doubling.
fn or_run_down(s: &LatticeSet, axis: usize, w: i64) -> LatticeSet {
    let mut acc = s.clone();
    let mut have = 0i64;
    while have < w {
        let step = (have + 1).min(w - have);
        acc = acc
            .union(&acc.translate(unit(axis, -step)))
            .expect("same window");
        have += step;
    }
    acc
}

/// Intersection `⋂_{j=0..=w} {z : z + j·e_axis ∈ S}` via doubling;
/// cells whose probe leaves the window are dropped (the translate
/// shifts in zeros), which is exactly the margin-exclusion rule.
fn and_run_up_probe(s: &LatticeSet, axis: usize, w: i64) -> LatticeSet {
    let mut acc = s.clone();
    let mut have = 0i64;
    while have < w {
        let step = (have + 1).min(w - have);
        acc = acc
            .intersect(&acc.translate(unit(axis, -step)))
            .expect("same window");
        have += step;
    }
    acc
}

/// Intersection `⋂_{j=0..=w} {z : z - j·e_axis ∈ S}` via doubling.
fn and_run_down_probe(s: &LatticeSet, axis: usize, w: i64) -> LatticeSet {
    let mut acc = s.clone();
    let mut have = 0i64;
    while have < w {
        let step = (have + 1).min(w - have);
        acc = acc
            .intersect(&acc.translate(unit(axis, step)))
            .expect("same window");
        have += step;
    }
    acc
}

/// `A + [-r, r]^d`, clipped to the window.
pub fn dilate_cube(a: &LatticeSet, r: i64) -> Result<LatticeSet> {
    check_radius(&a.window(), r)?;
    let mut out = a.clone();
    for axis in 0..a.window().dim() as usize {
        let up = or_run_up(&out, axis, r);
        let down = or_run_down(&out, axis, r);
        out = up.union(&down).expect("same window");
    }
    // Boundary loss during dilation is definitional, not data loss.
    Ok(out.with_clipped(a.clipped()))
}

/// `{z : z + [-k, k]^d ⊆ S}`; the k-margin of the window is excluded.
pub fn erode_cube(s: &LatticeSet, k: i64) -> Result<LatticeSet> {
    check_radius(&s.window(), k)?;
    let mut out = s.clone();
    for axis in 0..s.window().dim() as usize {
        let up = and_run_up_probe(&out, axis, k);
        let down = and_run_down_probe(&out, axis, k);
        out = up.intersect(&down).expect("same window");
    }
    Ok(out.with_clipped(s.clipped()))
}

/// `A + [0, n-1]^d` for `n ≥ 1`; `n = 0` sums with the empty block and
/// yields the empty set.
pub fn dilate_block(a: &LatticeSet, n: i64) -> Result<LatticeSet> {
    if n == 0 {
        return Ok(LatticeSet::empty(a.window()));
    }
    check_radius(&a.window(), n - 1)?;
    let mut out = a.clone();
    for axis in 0..a.window().dim() as usize {
        out = or_run_up(&out, axis, n - 1);
    }
    Ok(out.with_clipped(a.clipped()))
}

/// `{z : z + [0, n-1]^d ⊆ S}` for `n ≥ 1`; `n = 0` is the vacuous
/// condition and yields the full window.
pub fn erode_block(s: &LatticeSet, n: i64) -> Result<LatticeSet> {
    if n == 0 {
        return Ok(LatticeSet::full(s.window()));
    }
    check_radius(&s.window(), n - 1)?;
    let mut out = s.clone();
    for axis in 0..s.window().dim() as usize {
        out = and_run_up_probe(&out, axis, n - 1);
    }
    Ok(out.with_clipped(s.clipped()))
}

/// Cells at least `k` away from every window face: `erode(full, k)`.
pub fn interior_mask(window: Window, k: i64) -> Result<LatticeSet> {
    erode_cube(&LatticeSet::full(window), k)
}

/// `{a + b : a ∈ A, b ∈ B}`. With `expand` false the result is clipped
/// to the shared window (loss recorded in the clipped flag); with
/// `expand` true the result lives on the doubled window (`[1, 2N]` or
/// `[-2N, 2N]^d`), which holds every sum exactly.
pub fn sumset(a: &LatticeSet, b: &LatticeSet, expand: bool) -> Result<LatticeSet> {
    a.same_window(b)?;
    let window = a.window();
    let out_window = if expand {
        match window.convention() {
            crate::Convention::Classical1D => Window::classical(2 * window.bound())?,
            crate::Convention::Centered => Window::centered(2 * window.bound(), window.dim())?,
        }
    } else {
        window
    };
    // Shift the larger operand by each element of the smaller one.
    let (big, small) = if a.cardinality() >= b.cardinality() {
        (a, b)
    } else {
        (b, a)
    };
    let mut out = if window.dim() == 1 {
        sumset_1d(big, small, out_window)
    } else {
        sumset_nd(big, small, out_window)
    };
    if a.clipped() || b.clipped() {
        out = out.with_clipped(true);
    }
    Ok(out)
}

fn embed_1d(a: &LatticeSet, target: Window) -> Vec<u64> {
    // Same coordinates, new index base: offset by the difference of the
    // two windows' low edges. Pad to target length BEFORE shifting so no
    // bits fall off the end of the shorter source vector.
    let offset = (a.window().axis_range().0 - target.axis_range().0) as usize;
    let mut src = a.words().to_vec();
    src.resize(target.cells().div_ceil(64), 0);
    if offset == 0 {
        src
    } else {
        crate::lattice::shift_up(&src, offset)
    }
}

fn sumset_1d(big: &LatticeSet, small: &LatticeSet, out_window: Window) -> LatticeSet {
    let base = embed_1d(big, out_window);
    let cells = out_window.cells();
    let n_words = cells.div_ceil(64);
    let mut acc = vec![0u64; n_words];
    let mut clipped = false;
    let (big_min, big_max) = match (big.min_index(), big.max_index()) {
        (Some(lo), Some(hi)) => (lo as i64, hi as i64),
        _ => return LatticeSet::empty(out_window),
    };
    let in_offset = big.window().axis_range().0 - out_window.axis_range().0;
    for q in small.iter_points() {
        let v = q[0];
        // In index space of the output window a shift by value v moves
        // each embedded index by exactly v.
        let lo = big_min + in_offset + v;
        let hi = big_max + in_offset + v;
        if hi >= cells as i64 || lo < 0 {
            clipped = true;
        }
        if v >= 0 {
            let shifted = crate::lattice::shift_up(&base, v as usize);
            for (a, s) in acc.iter_mut().zip(&shifted) {
                *a |= s;
            }
        } else {
            let shifted = crate::lattice::shift_down(&base, (-v) as usize);
            for (a, s) in acc.iter_mut().zip(&shifted) {
                *a |= s;
            }
        }
    }
    LatticeSet::from_words(out_window, acc, clipped)
}

fn sumset_nd(big: &LatticeSet, small: &LatticeSet, out_window: Window) -> LatticeSet {
    let mut acc = LatticeSet::empty(out_window);
    let mut clipped = false;
    for q in small.iter_points() {
        for p in big.iter_points() {
            let sum = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
            match out_window.index(sum) {
                Some(idx) => acc.set_index(idx),
                None => clipped = true,
            }
        }
    }
    acc.with_clipped(clipped)
}

fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if a % b != 0 && (a < 0) != (b < 0) {
        q - 1
    } else {
        q
    }
}

/// The n-block quotient: `x ∈ A_[n]` iff the block `n·x + [0, n-1]^d`
/// meets `A`. Lives on the quotient window of bound `⌊N/n⌋` with the
/// same convention; members whose anchor falls outside that window are
/// dropped and recorded in the clipped flag.
pub fn block_quotient(a: &LatticeSet, n: i64) -> Result<LatticeSet> {
    if n < 1 {
        return Err(Error::ConfigInvalid {
            reason: format!("block size must be >= 1, got {n}"),
        });
    }
    if n == 1 {
        return Ok(a.clone());
    }
    let window = a.window();
    let qbound = window.bound() / n;
    if qbound < 1 {
        return Err(Error::RadiusTooLarge {
            radius: n,
            window: window.to_string(),
        });
    }
    let qwindow = match window.convention() {
        crate::Convention::Classical1D => Window::classical(qbound)?,
        crate::Convention::Centered => Window::centered(qbound, window.dim())?,
    };
    let mut out = LatticeSet::empty(qwindow);
    let mut dropped = false;
    for p in a.iter_points() {
        let anchor = [
            floor_div(p[0], n),
            if window.dim() > 1 { floor_div(p[1], n) } else { 0 },
            if window.dim() > 2 { floor_div(p[2], n) } else { 0 },
        ];
        match qwindow.index(anchor) {
            Some(idx) => out.set_index(idx),
            None => dropped = true,
        }
    }
    Ok(out.with_clipped(a.clipped() || dropped))
}

/// The n-block fill: the union of complete blocks `n·x + [0, n-1]^d`
/// over every block meeting `A`, clipped to `A`'s own window. Always
/// contains `A`, and is idempotent.
pub fn block_fill(a: &LatticeSet, n: i64) -> Result<LatticeSet> {
    if n < 1 {
        return Err(Error::ConfigInvalid {
            reason: format!("block size must be >= 1, got {n}"),
        });
    }
    if n == 1 {
        return Ok(a.clone());
    }
    let window = a.window();
    if window.dim() == 1 {
        let (lo, _) = window.axis_range();
        let cells = window.cells() as i64;
        let mut out = LatticeSet::empty(window);
        let mut idx = a.min_index();
        while let Some(i) = idx {
            let coord = lo + i as i64;
            let anchor = floor_div(coord, n) * n;
            let run_lo = (anchor - lo).max(0);
            let run_hi = (anchor + n - lo).min(cells);
            out.fill_index_range(run_lo as usize, run_hi as usize);
            // Jump to the first member past this block.
            idx = a.next_index_at_or_after(run_hi as usize);
        }
        return Ok(out.with_clipped(a.clipped()));
    }
    let mut anchors = std::collections::BTreeSet::new();
    for p in a.iter_points() {
        anchors.insert([
            floor_div(p[0], n),
            if window.dim() > 1 { floor_div(p[1], n) } else { 0 },
            if window.dim() > 2 { floor_div(p[2], n) } else { 0 },
        ]);
    }
    let mut out = LatticeSet::empty(window);
    for x in anchors {
        for_each_block_cell(window, x, n, |idx| out.set_index(idx));
    }
    Ok(out.with_clipped(a.clipped()))
}

fn for_each_block_cell<F: FnMut(usize)>(window: Window, anchor: Point, n: i64, mut f: F) {
    let dim = window.dim() as usize;
    let mut offs = [0i64; 3];
    loop {
        let p = [
            anchor[0] * n + offs[0],
            if dim > 1 { anchor[1] * n + offs[1] } else { 0 },
            if dim > 2 { anchor[2] * n + offs[2] } else { 0 },
        ];
        if let Some(idx) = window.index(p) {
            f(idx);
        }
        // Odometer over [0, n-1]^dim.
        let mut axis = dim;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            offs[axis] += 1;
            if offs[axis] < n {
                break;
            }
            offs[axis] = 0;
            if axis == 0 {
                return;
            }
        }
    }
}
