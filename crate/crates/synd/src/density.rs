//! Density functionals at finite scale.
//!
//! Four quantities, one representation: the prefix profile samples the
//! ratio `|A ∩ window_n| / |window_n|` at geometrically spaced `n` up to
//! the window bound, where `window_n` is `[1, n]` or `[-n, n]^d` per the
//! window's convention. The liminf/limsup of an infinite set become the
//! min/max over the profile's tail (`n >= tail_fraction · N`, default
//! fraction 1/2). Schnirelmann density is the exact minimum over every
//! prefix; Banach density is a sliding-window maximum at caller-chosen
//! radii.
//!
//! On top of those sit the witness-density searches: a witness set for
//! `(m, k)` is `erode(dilate(S, m), k)`, the centers of k-cubes inside
//! the m-dilation of `S`; its tail estimates quantify "syndetic of
//! level alpha" claims, and the searches scan `m` for the smallest
//! value achieving a requested level.
//!
//! Every ratio is an exact rational (`Q`); there is no floating point
//! in any counting or comparison path. The only float use is picking
//! integer sample positions for the geometric grid, which affects where
//! we sample, never what we count.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::LatticeSet;
use crate::morph::{dilate_cube, erode_cube};
use crate::window::Convention;
use crate::{q, Q};

/// Default number of geometric sample positions in a profile.
pub const DEFAULT_SAMPLE_COUNT: usize = 64;

/// Default tail start as a fraction of the window bound.
pub fn default_tail_fraction() -> Q {
    q(1, 2)
}

#[derive(Debug, Clone, Serialize)]
pub struct Sample {
    pub n: i64,
    #[serde(with = "crate::qfmt")]
    pub ratio: Q,
}

/// Sampled prefix densities of one set, with enough context to take
/// tail estimates: the window bound, the convention the ratios were
/// computed under, and the tail fraction.
#[derive(Debug, Clone, Serialize)]
pub struct DensityProfile {
    pub window_bound: i64,
    pub convention: Convention,
    #[serde(with = "crate::qfmt")]
    pub tail_fraction: Q,
    pub samples: Vec<Sample>,
}

impl DensityProfile {
    /// (min, max) ratio over samples with `n >= tail_fraction · N`.
    /// If no sample reaches the tail (possible with caller-chosen
    /// positions), the last sample alone stands in.
    pub fn tail_estimates(&self) -> (Q, Q) {
        let threshold = self.tail_fraction * Q::from_integer(self.window_bound as i128);
        let tail: Vec<Q> = self
            .samples
            .iter()
            .filter(|s| Q::from_integer(s.n as i128) >= threshold)
            .map(|s| s.ratio)
            .collect();
        let pool: &[Q] = if tail.is_empty() {
            std::slice::from_ref(&self.samples.last().expect("non-empty profile").ratio)
        } else {
            &tail
        };
        let lo = pool.iter().copied().min().unwrap();
        let hi = pool.iter().copied().max().unwrap();
        (lo, hi)
    }

    /// CSV report: `n,ratio` rows, then tail-estimate footer rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,ratio\n");
        for s in &self.samples {
            out.push_str(&format!("{},{}\n", s.n, crate::qfmt::to_string(&s.ratio)));
        }
        let (lo, hi) = self.tail_estimates();
        out.push_str(&format!("tail_lower,{}\n", crate::qfmt::to_string(&lo)));
        out.push_str(&format!("tail_upper,{}\n", crate::qfmt::to_string(&hi)));
        out
    }
}

/// Geometrically spaced integer positions `~ N^(i/count)`, deduplicated,
/// ascending, always ending at `N` itself.
pub fn geometric_samples(n: i64, count: usize) -> Vec<i64> {
    debug_assert!(n >= 1 && count >= 1);
    let ln = (n as f64).ln();
    let mut out: Vec<i64> = (1..=count)
        .map(|i| (ln * i as f64 / count as f64).exp().round() as i64)
        .map(|x| x.clamp(1, n))
        .collect();
    out.push(n);
    out.sort_unstable();
    out.dedup();
    out
}

/// `|A ∩ window_n|`: members within the radius-`n` (or `[1, n]`)
/// sub-window.
pub fn count_box(a: &LatticeSet, n: i64) -> usize {
    let w = a.window();
    debug_assert!(n >= 1 && n <= w.bound());
    match (w.convention(), w.dim()) {
        (Convention::Classical1D, _) => a.count_below(n as usize),
        (Convention::Centered, 1) => {
            let nn = w.bound();
            a.count_below((nn + n + 1) as usize) - a.count_below((nn - n) as usize)
        }
        (Convention::Centered, _) => a
            .iter_points()
            .filter(|p| p.iter().all(|&c| c.abs() <= n))
            .count(),
    }
}

/// Cells of the radius-`n` sub-window.
pub fn box_cells(convention: Convention, dim: u8, n: i64) -> i128 {
    match convention {
        Convention::Classical1D => n as i128,
        Convention::Centered => {
            let side = (2 * n + 1) as i128;
            (0..dim).fold(1i128, |acc, _| acc * side)
        }
    }
}

/// Prefix-density profile at `sample_count` geometric positions.
pub fn prefix_profile(a: &LatticeSet, sample_count: usize) -> Result<DensityProfile> {
    if sample_count < 2 {
        return Err(Error::ConfigInvalid {
            reason: format!("sample count must be >= 2, got {sample_count}"),
        });
    }
    let ns = geometric_samples(a.window().bound(), sample_count);
    profile_at_positions(a, &ns)
}

/// Prefix-density profile at caller-chosen positions (strictly
/// ascending, within `[1, N]`).
pub fn prefix_profile_at(a: &LatticeSet, ns: &[i64]) -> Result<DensityProfile> {
    if ns.is_empty() {
        return Err(Error::ConfigInvalid {
            reason: "sample positions must be non-empty".into(),
        });
    }
    let n_max = a.window().bound();
    for pair in ns.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::ConfigInvalid {
                reason: format!("sample positions must be strictly ascending: {ns:?}"),
            });
        }
    }
    if ns[0] < 1 || *ns.last().unwrap() > n_max {
        return Err(Error::ConfigInvalid {
            reason: format!("sample positions must lie in [1, {n_max}]"),
        });
    }
    profile_at_positions(a, ns)
}

fn profile_at_positions(a: &LatticeSet, ns: &[i64]) -> Result<DensityProfile> {
    let w = a.window();
    let samples = if w.dim() == 1 {
        ns.iter()
            .map(|&n| Sample {
                n,
                ratio: Q::new(
                    count_box(a, n) as i128,
                    box_cells(w.convention(), w.dim(), n),
                ),
            })
            .collect()
    } else {
        // One pass: bucket members by Chebyshev norm, then prefix-sum.
        let mut norms: Vec<i64> = a
            .iter_points()
            .map(|p| p.iter().map(|c| c.abs()).max().unwrap())
            .collect();
        norms.sort_unstable();
        ns.iter()
            .map(|&n| {
                let count = norms.partition_point(|&v| v <= n);
                Sample {
                    n,
                    ratio: Q::new(count as i128, box_cells(w.convention(), w.dim(), n)),
                }
            })
            .collect()
    };
    Ok(DensityProfile {
        window_bound: w.bound(),
        convention: w.convention(),
        tail_fraction: default_tail_fraction(),
        samples,
    })
}

/// Exact Schnirelmann density: `min_{1<=n<=N} |A ∩ [1,n]| / n`.
pub fn schnirelmann(a: &LatticeSet) -> Result<Q> {
    let w = a.window();
    if w.convention() != Convention::Classical1D {
        return Err(Error::WrongConvention {
            required: "classical1d".into(),
            actual: w.to_string(),
        });
    }
    let mut count: i128 = 0;
    let mut best = q(1, 1);
    for n in 1..=w.cells() as i128 {
        if a.get_index(n as usize - 1) {
            count += 1;
        }
        if count == 0 {
            return Ok(q(0, 1));
        }
        // count/n < best ?
        if count * best.denom() < best.numer() * n {
            best = Q::new(count, n);
        }
    }
    Ok(best)
}

/// For each requested radius, the maximum density of `A` over every
/// fully in-window sliding cube of that radius. Memory: one integral
/// array the size of the window.
pub fn banach_profile(a: &LatticeSet, n_values: &[i64]) -> Result<Vec<(i64, Q)>> {
    let w = a.window();
    let side = w.side();
    for &n in n_values {
        // Radii past N/2 leave no room to slide; past (side-1)/2 the
        // cube does not even fit.
        if n < 1 || n > w.bound() / 2 || 2 * n + 1 > side {
            return Err(Error::RadiusTooLarge {
                radius: n,
                window: w.to_string(),
            });
        }
    }
    if w.dim() == 1 {
        let cells = w.cells();
        let mut prefix = vec![0u32; cells + 1];
        for i in 0..cells {
            prefix[i + 1] = prefix[i] + a.get_index(i) as u32;
        }
        return Ok(n_values
            .iter()
            .map(|&n| {
                let width = (2 * n + 1) as usize;
                let best = (0..=cells - width)
                    .map(|x| prefix[x + width] - prefix[x])
                    .max()
                    .unwrap_or(0);
                (n, Q::new(best as i128, width as i128))
            })
            .collect());
    }
    let table = IntegralImage::build(a);
    Ok(n_values
        .iter()
        .map(|&n| {
            let width = 2 * n + 1;
            let best = table.max_cube_count(width);
            (n, Q::new(best as i128, box_cells(Convention::Centered, w.dim(), n)))
        })
        .collect())
}

/// Summed-area table over the window grid, any dimension up to 3.
/// The window is treated as a dense `side^dim` grid in index space.
pub(crate) struct IntegralImage {
    side: usize,
    dim: usize,
    sums: Vec<u32>,
}

impl IntegralImage {
    pub(crate) fn build(a: &LatticeSet) -> Self {
        let w = a.window();
        let side = w.side() as usize;
        let dim = w.dim() as usize;
        let ext = side + 1;
        let total = ext.pow(dim as u32);
        let mut sums = vec![0u32; total];
        // sums[i0+1, i1+1, ...] = inclusive prefix sums of membership.
        match dim {
            2 => {
                for i0 in 0..side {
                    for i1 in 0..side {
                        let v = a.get_index(i0 * side + i1) as u32;
                        sums[(i0 + 1) * ext + (i1 + 1)] = v
                            + sums[i0 * ext + (i1 + 1)]
                            + sums[(i0 + 1) * ext + i1]
                            - sums[i0 * ext + i1];
                    }
                }
            }
            3 => {
                let e2 = ext * ext;
                for i0 in 0..side {
                    for i1 in 0..side {
                        for i2 in 0..side {
                            let v = a.get_index((i0 * side + i1) * side + i2) as u32;
                            let at = |a0: usize, a1: usize, a2: usize| {
                                sums[a0 * e2 + a1 * ext + a2]
                            };
                            sums[(i0 + 1) * e2 + (i1 + 1) * ext + (i2 + 1)] = v
                                .wrapping_add(at(i0, i1 + 1, i2 + 1))
                                .wrapping_add(at(i0 + 1, i1, i2 + 1))
                                .wrapping_add(at(i0 + 1, i1 + 1, i2))
                                .wrapping_sub(at(i0, i1, i2 + 1))
                                .wrapping_sub(at(i0, i1 + 1, i2))
                                .wrapping_sub(at(i0 + 1, i1, i2))
                                .wrapping_add(at(i0, i1, i2));
                        }
                    }
                }
            }
            _ => unreachable!("1D handled by the prefix path"),
        }
        IntegralImage { side, dim, sums }
    }

    /// Count inside the cube anchored at `lo` (index coordinates) with
    /// side `width`, which must fit in the grid.
    pub(crate) fn cube_count(&self, lo: &[usize], width: usize) -> u32 {
        match self.dim {
            2 => self.rect_count([lo[0], lo[1], 0], [lo[0] + width, lo[1] + width, 1]),
            3 => self.rect_count(
                [lo[0], lo[1], lo[2]],
                [lo[0] + width, lo[1] + width, lo[2] + width],
            ),
            _ => unreachable!(),
        }
    }

    /// Count inside the half-open index box `lo..hi` per axis (axes past
    /// `dim` are ignored).
    pub(crate) fn rect_count(&self, lo: [usize; 3], hi: [usize; 3]) -> u32 {
        let ext = self.side + 1;
        match self.dim {
            2 => {
                let (a0, a1) = (lo[0], lo[1]);
                let (b0, b1) = (hi[0], hi[1]);
                self.sums[b0 * ext + b1] + self.sums[a0 * ext + a1]
                    - self.sums[a0 * ext + b1]
                    - self.sums[b0 * ext + a1]
            }
            3 => {
                let e2 = ext * ext;
                let at = |a0: usize, a1: usize, a2: usize| self.sums[a0 * e2 + a1 * ext + a2];
                let (a0, a1, a2) = (lo[0], lo[1], lo[2]);
                let (b0, b1, b2) = (hi[0], hi[1], hi[2]);
                at(b0, b1, b2)
                    .wrapping_sub(at(a0, b1, b2))
                    .wrapping_sub(at(b0, a1, b2))
                    .wrapping_sub(at(b0, b1, a2))
                    .wrapping_add(at(a0, a1, b2))
                    .wrapping_add(at(a0, b1, a2))
                    .wrapping_add(at(b0, a1, a2))
                    .wrapping_sub(at(a0, a1, a2))
            }
            _ => unreachable!(),
        }
    }

    fn max_cube_count(&self, width: i64) -> u32 {
        let width = width as usize;
        let hi = self.side - width;
        let mut best = 0;
        match self.dim {
            2 => {
                for a0 in 0..=hi {
                    for a1 in 0..=hi {
                        best = best.max(self.cube_count(&[a0, a1], width));
                    }
                }
            }
            3 => {
                for a0 in 0..=hi {
                    for a1 in 0..=hi {
                        for a2 in 0..=hi {
                            best = best.max(self.cube_count(&[a0, a1, a2], width));
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        best
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessEntry {
    pub m: i64,
    pub k: i64,
    #[serde(with = "crate::qfmt")]
    pub lower: Q,
    #[serde(with = "crate::qfmt")]
    pub upper: Q,
    #[serde(with = "crate::qfmt")]
    pub strong: Q,
}

/// Per-(m, k) tail density estimates of the witness sets
/// `erode(dilate(S, m), k)`.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessTable {
    pub source: String,
    pub entries: Vec<WitnessEntry>,
}

impl WitnessTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,k,lower,upper,strong\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.m,
                e.k,
                crate::qfmt::to_string(&e.lower),
                crate::qfmt::to_string(&e.upper),
                crate::qfmt::to_string(&e.strong),
            ));
        }
        out
    }
}

/// Builds the full `(m, k)` witness-density table for `m <= m_max`,
/// `k <= k_max`. `strong_sequence` is the window-size sequence the
/// strong estimate maximizes over (restricted to the tail); empty means
/// "use the profile's own geometric samples", making strong equal the
/// plain upper estimate. Cells are computed in parallel and assembled
/// in (m, k) order.
pub fn witness_table(
    s: &LatticeSet,
    m_max: i64,
    k_max: i64,
    strong_sequence: &[i64],
    sample_count: usize,
    source: &str,
) -> Result<WitnessTable> {
    let n = s.window().bound();
    if m_max < 0 || k_max < 0 || m_max + k_max > n / 4 {
        return Err(Error::RadiusTooLarge {
            radius: m_max + k_max,
            window: s.window().to_string(),
        });
    }
    for &pos in strong_sequence {
        if pos < 1 || pos > n {
            return Err(Error::ConfigInvalid {
                reason: format!("strong-sequence position {pos} outside [1, {n}]"),
            });
        }
    }
    let pairs: Vec<(i64, i64)> = (0..=m_max)
        .flat_map(|m| (0..=k_max).map(move |k| (m, k)))
        .collect();
    let entries: Vec<WitnessEntry> = pairs
        .par_iter()
        .map(|&(m, k)| -> Result<WitnessEntry> {
            let witness = erode_cube(&dilate_cube(s, m)?, k)?;
            let profile = prefix_profile(&witness, sample_count)?;
            let (lower, upper) = profile.tail_estimates();
            let strong = if strong_sequence.is_empty() {
                upper
            } else {
                strong_estimate(&witness, strong_sequence, &profile)
            };
            Ok(WitnessEntry {
                m,
                k,
                lower,
                upper,
                strong,
            })
        })
        .collect::<Result<_>>()?;
    Ok(WitnessTable {
        source: source.to_string(),
        entries,
    })
}

fn strong_estimate(witness: &LatticeSet, sequence: &[i64], profile: &DensityProfile) -> Q {
    let w = witness.window();
    let threshold = profile.tail_fraction * Q::from_integer(profile.window_bound as i128);
    let mut best: Option<Q> = None;
    let mut last: Option<Q> = None;
    for &n in sequence {
        let ratio = Q::new(
            count_box(witness, n) as i128,
            box_cells(w.convention(), w.dim(), n),
        );
        last = Some(ratio);
        if Q::from_integer(n as i128) >= threshold {
            best = Some(best.map_or(ratio, |b: Q| b.max(ratio)));
        }
    }
    best.or(last).unwrap_or_else(|| q(0, 1))
}

/// Which tail estimate a search should look at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    Lower,
    Upper,
}

/// Smallest `m <= N/4` such that for every `k <= k_max` the chosen
/// witness estimate is `>= level - epsilon`; `None` when no `m` in
/// range works. Linear scan: the exact minimum, and `m` is small in
/// practice.
pub fn minimal_m_search(
    s: &LatticeSet,
    level: Q,
    epsilon: Q,
    k_max: i64,
    kind: EstimateKind,
) -> Result<Option<i64>> {
    if level <= q(0, 1) || level > q(1, 1) || epsilon < q(0, 1) {
        return Err(Error::ConfigInvalid {
            reason: format!(
                "level must be in (0,1] and epsilon >= 0; got {}, {}",
                crate::qfmt::to_string(&level),
                crate::qfmt::to_string(&epsilon)
            ),
        });
    }
    let cap = s.window().bound() / 4;
    if k_max < 0 || k_max > cap {
        return Err(Error::RadiusTooLarge {
            radius: k_max,
            window: s.window().to_string(),
        });
    }
    let need = level - epsilon;
    for m in 0..=cap {
        let dilated = dilate_cube(s, m)?;
        let mut all = true;
        for k in 0..=k_max {
            let witness = erode_cube(&dilated, k)?;
            let (lo, hi) = prefix_profile(&witness, DEFAULT_SAMPLE_COUNT)?.tail_estimates();
            let est = match kind {
                EstimateKind::Lower => lo,
                EstimateKind::Upper => hi,
            };
            if est < need {
                all = false;
                break;
            }
        }
        if all {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaturationMode {
    /// Smallest m with `schnirelmann(A ∪ [1, m]) >= upper_tail(A) - eps`.
    SchnirelmannUnion,
    /// Smallest m with the sliding-window max of `dilate(A, m)` at the
    /// largest tested radius exceeding `1 - eps`.
    BanachDilate,
}

/// Finite-scale saturation search. The banach mode tests one radius,
/// `max(1, N/8)` (shrunk if the window cannot fit it), the largest
/// scale at which a sliding window still has room to slide.
pub fn saturation_search(a: &LatticeSet, epsilon: Q, mode: SaturationMode) -> Result<i64> {
    if epsilon <= q(0, 1) || epsilon >= q(1, 1) {
        return Err(Error::ConfigInvalid {
            reason: format!(
                "epsilon must be in (0,1), got {}",
                crate::qfmt::to_string(&epsilon)
            ),
        });
    }
    let n = a.window().bound();
    let cap = n / 4;
    match mode {
        SaturationMode::SchnirelmannUnion => {
            let (_, upper) = prefix_profile(a, DEFAULT_SAMPLE_COUNT)?.tail_estimates();
            let target = upper - epsilon;
            for m in 0..=cap {
                let mut u = a.clone();
                u.fill_index_range(0, m as usize);
                if schnirelmann(&u)? >= target {
                    return Ok(m);
                }
            }
            Err(Error::NotFound {
                what: format!("no m <= {cap} saturates the Schnirelmann bound"),
            })
        }
        SaturationMode::BanachDilate => {
            if a.is_empty() {
                return Err(Error::ConfigInvalid {
                    reason: "banach mode requires a set with positive density".into(),
                });
            }
            let radius = (n / 8)
                .max(1)
                .min(n / 2)
                .min((a.window().side() - 1) / 2);
            if radius < 1 {
                return Err(Error::ConfigInvalid {
                    reason: "window too small for a sliding radius".into(),
                });
            }
            let target = q(1, 1) - epsilon;
            for m in 0..=cap {
                let d = dilate_cube(a, m)?;
                let ratio = banach_profile(&d, &[radius])?[0].1;
                if ratio > target {
                    return Ok(m);
                }
            }
            Err(Error::NotFound {
                what: format!("no m <= {cap} pushes the sliding-window max past 1 - epsilon"),
            })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AdaptiveGapResult {
    #[serde(with = "crate::qfmt")]
    pub estimate: Q,
    #[serde(with = "crate::qfmt")]
    pub level: Q,
    pub holds: bool,
}

/// Tail lower estimate of the density of
/// `{n : exists m < m_f with n + [-f(m), f(m)]^d ⊆ dilate(S, m)}`,
/// the union over `m` of the per-m witness sets, compared against a
/// target level.
pub fn adaptive_gap_check(
    s: &LatticeSet,
    f: &[i64],
    m_f: usize,
    level: Q,
) -> Result<AdaptiveGapResult> {
    if m_f < 1 || f.len() <= m_f {
        return Err(Error::ConfigInvalid {
            reason: format!("need f values for 0..={m_f}, got {} entries", f.len()),
        });
    }
    if f.windows(2).take(m_f).any(|p| p[0] > p[1]) || f[0] < 0 {
        return Err(Error::ConfigInvalid {
            reason: "f must be non-negative and non-decreasing".into(),
        });
    }
    let n = s.window().bound();
    if f[m_f] + m_f as i64 > n / 4 {
        return Err(Error::RadiusTooLarge {
            radius: f[m_f] + m_f as i64,
            window: s.window().to_string(),
        });
    }
    let mut union = LatticeSet::empty(s.window());
    for m in 0..m_f as i64 {
        let witness = erode_cube(&dilate_cube(s, m)?, f[m as usize])?;
        union = union.union(&witness)?;
    }
    let (estimate, _) = prefix_profile(&union, DEFAULT_SAMPLE_COUNT)?.tail_estimates();
    Ok(AdaptiveGapResult {
        estimate,
        level,
        holds: estimate >= level,
    })
}
