//! Dense bit-vector sets over a window.
//!
//! A [`LatticeSet`] owns one bit per window cell, packed into `u64` words
//! in row-major index order, plus a cached cardinality and a `clipped`
//! taint flag. The flag records that some construction step *wanted* to
//! place elements outside the window and silently dropped them; it is
//! propagated through set algebra so downstream consumers can tell an
//! exact finite set from a truncated view of an infinite one.
//!
//! Invariants:
//! * `words.len() == ceil(window.cells() / 64)`;
//! * bits at positions `>= window.cells()` in the last word are zero;
//! * `card` equals the popcount of `words`.
//!
//! Equality compares window and contents only, never the taint flag.
//!
//! The serialized form is a line-oriented run-length text:
//!
//! ```text
//! window <dim> <convention> <N>
//! run <start-index> <length>
//! ```
//!
//! with one `run` line per maximal run of set bits, ascending, indices
//! row-major, and convention tokens `classical1d` / `centered`. Emission
//! is canonical (single `\n` separators, trailing newline), so
//! parse-then-emit reproduces the input byte for byte.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::window::{Convention, Point, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    Union,
    Intersect,
    Difference,
}

#[derive(Debug, Clone)]
pub struct LatticeSet {
    window: Window,
    words: Vec<u64>,
    card: usize,
    clipped: bool,
}

impl PartialEq for LatticeSet {
    fn eq(&self, other: &Self) -> bool {
        self.window == other.window && self.words == other.words
    }
}

impl Eq for LatticeSet {}

fn words_for(cells: usize) -> usize {
    cells.div_ceil(64)
}

impl LatticeSet {
    pub fn empty(window: Window) -> Self {
        LatticeSet {
            window,
            words: vec![0; words_for(window.cells())],
            card: 0,
            clipped: false,
        }
    }

    pub fn full(window: Window) -> Self {
        let cells = window.cells();
        let mut words = vec![!0u64; words_for(cells)];
        mask_tail(&mut words, cells);
        LatticeSet {
            window,
            words,
            card: cells,
            clipped: false,
        }
    }

    /// Builds from points, rejecting any point outside the window.
    pub fn from_points<I>(window: Window, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = Point>,
    {
        let mut set = LatticeSet::empty(window);
        for p in points {
            let idx = window.index(p).ok_or(Error::OutOfWindow {
                point: p,
                window: window.to_string(),
            })?;
            set.set_index(idx);
        }
        Ok(set)
    }

    /// Builds from points, dropping any outside the window; if at least
    /// one was dropped the result carries the `clipped` flag.
    pub fn from_points_clipped<I>(window: Window, points: I) -> Self
    where
        I: IntoIterator<Item = Point>,
    {
        let mut set = LatticeSet::empty(window);
        let mut dropped = false;
        for p in points {
            match window.index(p) {
                Some(idx) => set.set_index(idx),
                None => dropped = true,
            }
        }
        set.clipped = dropped;
        set
    }

    /// Builds by evaluating a predicate on every window cell.
    pub fn from_predicate<F>(window: Window, mut pred: F) -> Self
    where
        F: FnMut(Point) -> bool,
    {
        let mut set = LatticeSet::empty(window);
        for idx in 0..window.cells() {
            if pred(window.point(idx)) {
                set.set_index(idx);
            }
        }
        set
    }

    /// Internal constructor from raw words; masks the tail, recounts.
    pub(crate) fn from_words(window: Window, mut words: Vec<u64>, clipped: bool) -> Self {
        debug_assert_eq!(words.len(), words_for(window.cells()));
        mask_tail(&mut words, window.cells());
        let card = words.iter().map(|w| w.count_ones() as usize).sum();
        LatticeSet {
            window,
            words,
            card,
            clipped,
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn cardinality(&self) -> usize {
        self.card
    }

    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    pub fn clipped(&self) -> bool {
        self.clipped
    }

    /// Marks the set as a truncated view. Constructions call this when
    /// they know in advance they describe an unbounded object.
    pub fn with_clipped(mut self, clipped: bool) -> Self {
        self.clipped = clipped;
        self
    }

    pub fn contains(&self, p: Point) -> bool {
        match self.window.index(p) {
            Some(idx) => self.get_index(idx),
            None => false,
        }
    }

    pub(crate) fn get_index(&self, idx: usize) -> bool {
        self.words[idx >> 6] >> (idx & 63) & 1 == 1
    }

    pub(crate) fn set_index(&mut self, idx: usize) {
        let w = &mut self.words[idx >> 6];
        let bit = 1u64 << (idx & 63);
        if *w & bit == 0 {
            *w |= bit;
            self.card += 1;
        }
    }

    pub fn insert(&mut self, p: Point) -> Result<()> {
        let idx = self.window.index(p).ok_or(Error::OutOfWindow {
            point: p,
            window: self.window.to_string(),
        })?;
        self.set_index(idx);
        Ok(())
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// Sets every bit in the half-open index range `[lo, hi)`.
    pub(crate) fn fill_index_range(&mut self, lo: usize, hi: usize) {
        debug_assert!(hi <= self.window.cells());
        if lo >= hi {
            return;
        }
        let (first, last) = (lo >> 6, (hi - 1) >> 6);
        let lo_mask = !0u64 << (lo & 63);
        let hi_mask = !0u64 >> (63 - ((hi - 1) & 63));
        if first == last {
            self.or_word(first, lo_mask & hi_mask);
        } else {
            self.or_word(first, lo_mask);
            for w in first + 1..last {
                self.or_word(w, !0);
            }
            self.or_word(last, hi_mask);
        }
    }

    fn or_word(&mut self, wi: usize, mask: u64) {
        let before = self.words[wi].count_ones();
        self.words[wi] |= mask;
        self.card += (self.words[wi].count_ones() - before) as usize;
    }

    /// Smallest set index, if any.
    pub(crate) fn min_index(&self) -> Option<usize> {
        self.words
            .iter()
            .position(|&w| w != 0)
            .map(|wi| wi * 64 + self.words[wi].trailing_zeros() as usize)
    }

    /// Largest set index, if any.
    pub(crate) fn max_index(&self) -> Option<usize> {
        self.words
            .iter()
            .rposition(|&w| w != 0)
            .map(|wi| wi * 64 + 63 - self.words[wi].leading_zeros() as usize)
    }

    /// Smallest set index `>= from`, if any.
    pub(crate) fn next_index_at_or_after(&self, from: usize) -> Option<usize> {
        if from >= self.window.cells() {
            return None;
        }
        let wi = from >> 6;
        let masked = self.words[wi] & (!0u64 << (from & 63));
        if masked != 0 {
            return Some(wi * 64 + masked.trailing_zeros() as usize);
        }
        self.words[wi + 1..]
            .iter()
            .position(|&w| w != 0)
            .map(|off| (wi + 1 + off) * 64 + self.words[wi + 1 + off].trailing_zeros() as usize)
    }

    pub(crate) fn same_window(&self, other: &LatticeSet) -> Result<()> {
        if self.window == other.window {
            Ok(())
        } else {
            Err(Error::mismatch(&self.window, &other.window))
        }
    }

    /// Pointwise boolean combination. Taint flags are OR-ed.
    pub fn op(&self, other: &LatticeSet, op: BoolOp) -> Result<LatticeSet> {
        self.same_window(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| match op {
                BoolOp::Union => a | b,
                BoolOp::Intersect => a & b,
                BoolOp::Difference => a & !b,
            })
            .collect();
        Ok(LatticeSet::from_words(
            self.window,
            words,
            self.clipped || other.clipped,
        ))
    }

    pub fn union(&self, other: &LatticeSet) -> Result<LatticeSet> {
        self.op(other, BoolOp::Union)
    }

    pub fn intersect(&self, other: &LatticeSet) -> Result<LatticeSet> {
        self.op(other, BoolOp::Intersect)
    }

    pub fn difference(&self, other: &LatticeSet) -> Result<LatticeSet> {
        self.op(other, BoolOp::Difference)
    }

    /// Complement within the window.
    pub fn complement(&self) -> LatticeSet {
        let words = self.words.iter().map(|&w| !w).collect();
        LatticeSet::from_words(self.window, words, self.clipped)
    }

    pub fn is_subset_of(&self, other: &LatticeSet) -> Result<bool> {
        self.same_window(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(&a, &b)| a & !b == 0))
    }

    /// Translates by `delta`; cells leaving the window are dropped and
    /// the drop is recorded in the result's `clipped` flag.
    pub fn translate(&self, delta: Point) -> LatticeSet {
        if delta == [0, 0, 0] {
            return self.clone();
        }
        let mut out = if self.window.dim() == 1 {
            self.translate_1d(delta[0])
        } else {
            let mut out = LatticeSet::empty(self.window);
            for p in self.iter_points() {
                let q = [p[0] + delta[0], p[1] + delta[1], p[2] + delta[2]];
                if let Some(idx) = self.window.index(q) {
                    out.set_index(idx);
                }
            }
            out
        };
        out.clipped = self.clipped || out.card < self.card;
        out
    }

    /// Whole-vector bit shift: a 1-dimensional translate in O(N/64).
    fn translate_1d(&self, delta: i64) -> LatticeSet {
        let cells = self.window.cells();
        let words = if delta > 0 {
            shift_up(&self.words, delta as usize)
        } else {
            shift_down(&self.words, (-delta) as usize)
        };
        let mut out = LatticeSet {
            window: self.window,
            words,
            card: 0,
            clipped: false,
        };
        mask_tail(&mut out.words, cells);
        out.card = out.words.iter().map(|w| w.count_ones() as usize).sum();
        out
    }

    /// Set members in ascending row-major index order.
    pub fn iter_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let tz = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }

    pub fn iter_points(&self) -> impl Iterator<Item = Point> + '_ {
        self.iter_indices().map(move |i| self.window.point(i))
    }

    /// Number of members with index `< limit`; `limit <= cells()`.
    pub fn count_below(&self, limit: usize) -> usize {
        debug_assert!(limit <= self.window.cells());
        let full_words = limit >> 6;
        let mut count: usize = self.words[..full_words]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum();
        let rem = limit & 63;
        if rem > 0 {
            count += (self.words[full_words] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        count
    }

    /// Canonical run-length serialization. See the module header.
    pub fn to_rle(&self) -> String {
        let mut out = String::new();
        let (conv, n) = (self.window.convention(), self.window.bound());
        writeln!(out, "window {} {} {}", self.window.dim(), conv.token(), n).unwrap();
        let mut run_start: Option<usize> = None;
        let mut prev = 0usize;
        for idx in self.iter_indices() {
            match run_start {
                Some(_) if idx == prev + 1 => {}
                Some(s) => {
                    writeln!(out, "run {} {}", s, prev - s + 1).unwrap();
                    run_start = Some(idx);
                }
                None => run_start = Some(idx),
            }
            prev = idx;
        }
        if let Some(s) = run_start {
            writeln!(out, "run {} {}", s, prev - s + 1).unwrap();
        }
        out
    }

    /// Parses the run-length text format.
    pub fn from_rle(text: &str) -> Result<LatticeSet> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::BadRle {
            line: 1,
            reason: "empty input".into(),
        })?;
        let window = parse_rle_header(header)?;
        let mut set = LatticeSet::empty(window);
        let mut prev_end: Option<usize> = None;
        for (i, line) in lines {
            let lineno = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_ascii_whitespace();
            if parts.next() != Some("run") {
                return Err(Error::BadRle {
                    line: lineno,
                    reason: format!("expected 'run', got '{line}'"),
                });
            }
            let bad = |reason: String| Error::BadRle {
                line: lineno,
                reason,
            };
            let start: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("missing or bad run start".into()))?;
            let len: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("missing or bad run length".into()))?;
            if parts.next().is_some() {
                return Err(bad("trailing tokens after run".into()));
            }
            if len == 0 {
                return Err(bad("run length must be positive".into()));
            }
            if start + len > window.cells() {
                return Err(bad(format!(
                    "run {start}+{len} exceeds window of {} cells",
                    window.cells()
                )));
            }
            if let Some(pe) = prev_end {
                // Maximal ascending runs: the next must start past a gap.
                if start <= pe + 1 {
                    return Err(bad(format!(
                        "run at {start} overlaps or touches previous run ending at {pe}"
                    )));
                }
            }
            for idx in start..start + len {
                set.set_index(idx);
            }
            prev_end = Some(start + len - 1);
        }
        Ok(set)
    }
}

fn parse_rle_header(header: &str) -> Result<Window> {
    let bad = |reason: String| Error::BadRle { line: 1, reason };
    let toks: Vec<&str> = header.split_ascii_whitespace().collect();
    if toks.len() != 4 || toks[0] != "window" {
        return Err(bad(format!(
            "header must be 'window <dim> <convention> <N>', got '{header}'"
        )));
    }
    let dim: u8 = toks[1]
        .parse()
        .map_err(|_| bad(format!("bad dimension '{}'", toks[1])))?;
    let conv = Convention::from_token(toks[2])
        .ok_or_else(|| bad(format!("unknown convention '{}'", toks[2])))?;
    let n: i64 = toks[3]
        .parse()
        .map_err(|_| bad(format!("bad bound '{}'", toks[3])))?;
    let window = match conv {
        Convention::Classical1D if dim == 1 => Window::classical(n),
        Convention::Classical1D => {
            return Err(bad(format!("classical1d requires dim 1, got {dim}")))
        }
        Convention::Centered => Window::centered(n, dim),
    };
    window.map_err(|e| bad(e.to_string()))
}

fn mask_tail(words: &mut [u64], cells: usize) {
    let rem = cells & 63;
    if rem == 0 {
        return; // the last word is fully used
    }
    if let Some(last) = words.last_mut() {
        *last &= (1u64 << rem) - 1;
    }
}

/// Shifts the packed bit string toward higher indices by `by` bits.
pub(crate) fn shift_up(words: &[u64], by: usize) -> Vec<u64> {
    let n = words.len();
    let (word_shift, bit_shift) = (by >> 6, by & 63);
    let mut out = vec![0u64; n];
    for i in (word_shift..n).rev() {
        let mut w = words[i - word_shift] << bit_shift;
        if bit_shift > 0 && i > word_shift {
            w |= words[i - word_shift - 1] >> (64 - bit_shift);
        }
        out[i] = w;
    }
    out
}

/// Shifts the packed bit string toward lower indices by `by` bits.
pub(crate) fn shift_down(words: &[u64], by: usize) -> Vec<u64> {
    let n = words.len();
    let (word_shift, bit_shift) = (by >> 6, by & 63);
    let mut out = vec![0u64; n];
    for i in 0..n.saturating_sub(word_shift) {
        let mut w = words[i + word_shift] >> bit_shift;
        if bit_shift > 0 && i + word_shift + 1 < n {
            w |= words[i + word_shift + 1] << (64 - bit_shift);
        }
        out[i] = w;
    }
    out
}
