//! Executable checks: superadditivity of Schnirelmann density under
//! sumsets, the finite covering bound, greedy cube selection with a
//! multiplicity audit, and the two-scale density/syndeticity experiments.
//!
//! Every check in here is a theorem or an audited contract, not a
//! heuristic: `mann_check` must always hold (a false verdict is an
//! implementation bug, and the record carries the first violating
//! prefix); `covering_bound_check` must hold whenever its hypotheses
//! pass; `besicovitch_select` audits its own output and errors rather
//! than returning a selection that breaks the multiplicity contract.
//!
//! All verdict arithmetic is exact rational; randomized stress of these
//! checks lives in the test suites and the CLI, keeping this module
//! deterministic.

use std::cmp::Reverse;
use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::density::{schnirelmann, IntegralImage};
use crate::error::{Error, Result};
use crate::lattice::LatticeSet;
use crate::morph::{dilate_cube, erode_cube, sumset};
use crate::window::{Point, Window};
use crate::{q, Q};

/// Exact Schnirelmann densities around one sumset instance. `holds`
/// is the superadditivity verdict; when it is false (never, unless the
/// implementation is wrong) `first_violation` is the first prefix n
/// whose ratio drops below the bound.
#[derive(Debug, Clone, Serialize)]
pub struct MannRecord {
    #[serde(with = "crate::qfmt")]
    pub sigma_a: Q,
    #[serde(with = "crate::qfmt")]
    pub sigma_b: Q,
    #[serde(with = "crate::qfmt")]
    pub sigma_sum: Q,
    #[serde(with = "crate::qfmt")]
    pub bound: Q,
    pub holds: bool,
    pub first_violation: Option<i64>,
}

/// ((A ∪ {0}) + (B ∪ {0})) ∩ [1, N]: with 0 adjoined to both sides the
/// sumset restricted to the window is A ∪ B ∪ (A + B).
pub fn mann_sum_set(a: &LatticeSet, b: &LatticeSet) -> Result<LatticeSet> {
    let ab = sumset(a, b, false)?;
    a.union(b)?.union(&ab)
}

/// Schnirelmann density of the adjoined sumset.
pub fn mann_sigma_sum(a: &LatticeSet, b: &LatticeSet) -> Result<Q> {
    schnirelmann(&mann_sum_set(a, b)?)
}

/// Superadditivity check: sigma of the adjoined sumset must be at least
/// min{sigma(A) + sigma(B), 1}.
pub fn mann_check(a: &LatticeSet, b: &LatticeSet) -> Result<MannRecord> {
    let sigma_a = schnirelmann(a)?;
    let sigma_b = schnirelmann(b)?;
    let sum = mann_sum_set(a, b)?;
    let sigma_sum = schnirelmann(&sum)?;
    let bound = (sigma_a + sigma_b).min(q(1, 1));
    let holds = sigma_sum >= bound;
    let first_violation = if holds {
        None
    } else {
        let mut count: i128 = 0;
        let mut hit = None;
        for n in 1..=sum.window().cells() as i64 {
            if sum.contains([n, 0, 0]) {
                count += 1;
            }
            if Q::new(count, n as i128) < bound {
                hit = Some(n);
                break;
            }
        }
        hit
    };
    Ok(MannRecord {
        sigma_a,
        sigma_b,
        sigma_sum,
        bound,
        holds,
        first_violation,
    })
}

/// Minimum prefix ratio of a subset of [1, n] encoded as a bitmask
/// (bit v-1 = value v), as an unreduced (numerator, denominator) pair.
fn mask_sigma(mask: u32, n: u32) -> (i64, i64) {
    if mask & 1 == 0 {
        return (0, 1);
    }
    let mut count: i64 = 0;
    let (mut bn, mut bd) = (1i64, 1i64);
    for v in 1..=n as i64 {
        if mask >> (v - 1) & 1 == 1 {
            count += 1;
        }
        if count * bd < bn * v {
            bn = count;
            bd = v;
        }
    }
    (bn, bd)
}

/// Brute-force sweep of the superadditivity bound over every ordered
/// subset pair of [1, n]. Returns (violations, pairs); violations must
/// be 0.
pub fn mann_exhaustive(n: u32) -> Result<(u64, u64)> {
    if !(1..=14).contains(&n) {
        return Err(Error::ConfigInvalid {
            reason: format!("exhaustive sweep needs 1 <= n <= 14, got {n}"),
        });
    }
    let size = 1u32 << n;
    let full = size - 1;
    let sigma: Vec<(i64, i64)> = (0..size).map(|m| mask_sigma(m, n)).collect();
    let violations: u64 = (0..size)
        .into_par_iter()
        .map(|a| {
            let shifts: Vec<u32> = (0..n).filter(|i| a >> i & 1 == 1).map(|i| i + 1).collect();
            let (pa, qa) = sigma[a as usize];
            let mut bad = 0u64;
            for b in 0..size {
                let mut s = a | b;
                for &sh in &shifts {
                    s |= (b << sh) & full;
                }
                let (ps, qs) = sigma[s as usize];
                let (pb, qb) = sigma[b as usize];
                // bound = min{pa/qa + pb/qb, 1}
                let bn = pa * qb + pb * qa;
                let bd = qa * qb;
                let holds = if bn >= bd { ps == qs } else { ps * bd >= bn * qs };
                if !holds {
                    bad += 1;
                }
            }
            bad
        })
        .sum();
    Ok((violations, (size as u64) * (size as u64)))
}

/// One cell of a covering instance; length 1 to 3 in practice, compared
/// by exact coordinates.
pub type Cell = Vec<i64>;

/// A finite covering-bound instance: ground set X, covering subsets
/// T_i with pointwise multiplicity at most `mult_bound`, a per-subset
/// density threshold t, and the target E whose relative size the bound
/// limits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverInstance {
    pub ground: Vec<Cell>,
    pub subsets: Vec<Vec<Cell>>,
    pub mult_bound: i64,
    #[serde(with = "crate::qfmt")]
    pub threshold: Q,
    pub target: Vec<Cell>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverVerdict {
    #[serde(with = "crate::qfmt")]
    pub lhs: Q,
    #[serde(with = "crate::qfmt")]
    pub rhs: Q,
    pub holds: bool,
}

/// Checks |E|/|X| <= m·t / (1 + (m−1)·t) after verifying the
/// hypotheses: every ground cell covered by 1..=m subsets, and every
/// non-empty T_i with |T_i ∩ E| / |T_i| <= t. `holds` must always come
/// back true when the hypotheses pass.
pub fn covering_bound_check(inst: &CoverInstance) -> Result<CoverVerdict> {
    if inst.ground.is_empty() {
        return Err(Error::ConfigInvalid {
            reason: "ground set is empty".into(),
        });
    }
    if inst.mult_bound < 1 {
        return Err(Error::ConfigInvalid {
            reason: format!("multiplicity bound must be >= 1, got {}", inst.mult_bound),
        });
    }
    if inst.threshold <= q(0, 1) || inst.threshold >= q(1, 1) {
        return Err(Error::ConfigInvalid {
            reason: format!(
                "threshold must be in (0,1), got {}",
                crate::qfmt::to_string(&inst.threshold)
            ),
        });
    }
    let mut index: HashMap<&Cell, usize> = HashMap::new();
    for (i, cell) in inst.ground.iter().enumerate() {
        if index.insert(cell, i).is_some() {
            return Err(Error::ConfigInvalid {
                reason: format!("duplicate ground cell {cell:?}"),
            });
        }
    }
    let resolve = |cells: &[Cell], what: &str| -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(cells.len());
        let mut seen = HashSet::new();
        for c in cells {
            match index.get(c) {
                Some(&i) if seen.insert(i) => out.push(i),
                Some(_) => {
                    return Err(Error::ConfigInvalid {
                        reason: format!("duplicate cell {c:?} in {what}"),
                    })
                }
                None => {
                    return Err(Error::ConfigInvalid {
                        reason: format!("{what} cell {c:?} is not in the ground set"),
                    })
                }
            }
        }
        Ok(out)
    };
    let subsets: Vec<Vec<usize>> = inst
        .subsets
        .iter()
        .enumerate()
        .map(|(i, t)| resolve(t, &format!("subset {i}")))
        .collect::<Result<_>>()?;
    let target: Vec<usize> = resolve(&inst.target, "target")?;

    let mut coverage = vec![0i64; inst.ground.len()];
    for t in &subsets {
        for &i in t {
            coverage[i] += 1;
        }
    }
    for (i, &c) in coverage.iter().enumerate() {
        if c == 0 {
            return Err(Error::HypothesisFailed {
                reason: format!("uncovered cell {:?}", inst.ground[i]),
            });
        }
        if c > inst.mult_bound {
            return Err(Error::HypothesisFailed {
                reason: format!(
                    "multiplicity exceeded at cell {:?}: covered {c} times, bound {}",
                    inst.ground[i], inst.mult_bound
                ),
            });
        }
    }
    let in_target: HashSet<usize> = target.iter().copied().collect();
    for (i, t) in subsets.iter().enumerate() {
        if t.is_empty() {
            continue;
        }
        let hit = t.iter().filter(|&&c| in_target.contains(&c)).count();
        if Q::new(hit as i128, t.len() as i128) > inst.threshold {
            return Err(Error::HypothesisFailed {
                reason: format!(
                    "per-set ratio exceeded in subset {i}: {hit}/{} > {}",
                    t.len(),
                    crate::qfmt::to_string(&inst.threshold)
                ),
            });
        }
    }
    let lhs = Q::new(target.len() as i128, inst.ground.len() as i128);
    let m = Q::from_integer(inst.mult_bound as i128);
    let t = inst.threshold;
    let rhs = m * t / (Q::from_integer(1) + (m - Q::from_integer(1)) * t);
    Ok(CoverVerdict {
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

/// Exhaustive sweep of the covering bound over every instance with
/// |X| <= x_max (<= 6), at most three subsets, thresholds in
/// {1/4, 1/3, 1/2, 2/3}, every target E, and the multiplicity bound set
/// to the exact maximum coverage (the tightest valid instance; larger
/// bounds only loosen the inequality). Returns
/// (violations, hypothesis-passing instances checked).
pub fn covering_exhaustive(x_max: u32) -> Result<(u64, u64)> {
    if !(1..=6).contains(&x_max) {
        return Err(Error::ConfigInvalid {
            reason: format!("exhaustive sweep needs 1 <= x_max <= 6, got {x_max}"),
        });
    }
    let thresholds: [(i64, i64); 4] = [(1, 4), (1, 3), (1, 2), (2, 3)];
    let mut violations = 0u64;
    let mut checked = 0u64;
    for x in 1..=x_max {
        let size: u32 = 1 << x;
        let pop: Vec<i64> = (0..size).map(|m| m.count_ones() as i64).collect();
        // Families are multisets {t1 <= t2 <= t3} plus the shorter ones.
        let families: Vec<Vec<u32>> = {
            let mut f = Vec::new();
            for t1 in 0..size {
                f.push(vec![t1]);
                for t2 in t1..size {
                    f.push(vec![t1, t2]);
                    for t3 in t2..size {
                        f.push(vec![t1, t2, t3]);
                    }
                }
            }
            f
        };
        let (v, c) = families
            .par_iter()
            .map(|family| {
                let mut coverage = [0i64; 6];
                for cell in 0..x {
                    for t in family {
                        if t >> cell & 1 == 1 {
                            coverage[cell as usize] += 1;
                        }
                    }
                }
                let m = *coverage[..x as usize].iter().max().unwrap();
                if coverage[..x as usize].contains(&0) {
                    return (0u64, 0u64);
                }
                let mut bad = 0u64;
                let mut seen = 0u64;
                for &(pt, qt) in &thresholds {
                    'target: for e in 0..size {
                        for &t in family {
                            if t != 0 && pop[(t & e) as usize] * qt > pt * pop[t as usize] {
                                continue 'target;
                            }
                        }
                        seen += 1;
                        // |E|·(q + (m−1)p) <= m·p·|X|
                        if pop[e as usize] * (qt + (m - 1) * pt) > m * pt * x as i64 {
                            bad += 1;
                        }
                    }
                }
                (bad, seen)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        violations += v;
        checked += c;
    }
    Ok((violations, checked))
}

/// An axis-aligned lattice cube given by center and radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cube {
    pub center: Point,
    pub radius: i64,
}

/// Greedy cube selection with an audited multiplicity contract.
///
/// Cubes are swept largest radius first (ties: row-major center order,
/// then list position); a cube is taken when its center is not yet
/// covered. A completion pass then takes, for every still-uncovered
/// ground cell, the first cube in sweep order covering it — idle
/// whenever every ground cell is itself the center of some listed cube.
/// The output is audited: it must cover ground with pointwise
/// multiplicity between 1 and 4^dim.
pub fn besicovitch_select(cubes: &[Cube], ground: &LatticeSet) -> Result<Vec<usize>> {
    let w = ground.window();
    for c in cubes {
        if c.radius < 1 {
            return Err(Error::ConfigInvalid {
                reason: format!("cube radius must be >= 1, got {}", c.radius),
            });
        }
    }
    // Reject outright impossible instances before sweeping.
    let mut reachable = vec![false; w.cells()];
    for c in cubes {
        for_each_window_cell(&w, c, |idx| reachable[idx] = true);
    }
    for idx in ground.iter_indices() {
        if !reachable[idx] {
            return Err(Error::NotCoverable {
                point: w.point(idx),
            });
        }
    }

    let mut order: Vec<usize> = (0..cubes.len()).collect();
    order.sort_by_key(|&i| (Reverse(cubes[i].radius), cubes[i].center, i));

    let mut covered = vec![false; w.cells()];
    let mut selected: Vec<usize> = Vec::new();
    for &i in &order {
        let c = &cubes[i];
        let center_idx = match w.index(c.center) {
            Some(idx) => idx,
            None => continue, // center outside the window cannot be a ground cell
        };
        if covered[center_idx] {
            continue;
        }
        selected.push(i);
        for_each_window_cell(&w, c, |idx| covered[idx] = true);
    }
    for idx in ground.iter_indices() {
        if covered[idx] {
            continue;
        }
        let extra = order
            .iter()
            .copied()
            .find(|&i| cube_contains(&cubes[i], w.point(idx)))
            .expect("reachability was pre-checked");
        selected.push(extra);
        for_each_window_cell(&w, &cubes[extra], |j| covered[j] = true);
    }

    // Audit the contract on the actual output.
    let mut mult = vec![0i64; w.cells()];
    for &i in &selected {
        for_each_window_cell(&w, &cubes[i], |idx| mult[idx] += 1);
    }
    let cap = 4i64.pow(w.dim() as u32);
    for idx in ground.iter_indices() {
        if mult[idx] == 0 {
            return Err(Error::HypothesisFailed {
                reason: format!("selection left {:?} uncovered", w.point(idx)),
            });
        }
        if mult[idx] > cap {
            return Err(Error::HypothesisFailed {
                reason: format!(
                    "selection multiplicity {} at {:?} exceeds {cap}",
                    mult[idx],
                    w.point(idx)
                ),
            });
        }
    }
    selected.sort_unstable();
    selected.dedup();
    Ok(selected)
}

fn cube_contains(c: &Cube, p: Point) -> bool {
    (0..3).all(|ax| (p[ax] - c.center[ax]).abs() <= c.radius)
}

fn for_each_window_cell(w: &Window, c: &Cube, mut f: impl FnMut(usize)) {
    let (lo, hi) = w.axis_range();
    let dim = w.dim() as usize;
    let mut a = [0i64; 3];
    let mut b = [0i64; 3];
    for ax in 0..3 {
        if ax < dim {
            a[ax] = (c.center[ax] - c.radius).max(lo);
            b[ax] = (c.center[ax] + c.radius).min(hi);
            if a[ax] > b[ax] {
                return;
            }
        } else if c.center[ax].abs() > c.radius {
            return; // the cube misses the plane of the window
        }
    }
    let mut p = a;
    loop {
        f(w.index(p).expect("clipped to window"));
        let mut ax = dim;
        loop {
            if ax == 0 {
                return;
            }
            ax -= 1;
            if p[ax] < b[ax] {
                p[ax] += 1;
                p[ax + 1..dim].copy_from_slice(&a[ax + 1..dim]);
                break;
            }
        }
    }
}

/// Scales for the two-scale experiments: an outer window radius N, an
/// inner radius nu with smear << nu << N, and the density tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct TwoScaleConfig {
    pub outer_radius: i64,
    pub inner_radius: i64,
    pub smear: i64,
    #[serde(with = "crate::qfmt")]
    pub delta: Q,
}

impl TwoScaleConfig {
    pub fn validate(&self, w: &Window) -> Result<()> {
        if self.smear < 1 || self.smear >= self.inner_radius {
            return Err(Error::ConfigInvalid {
                reason: format!(
                    "need 1 <= smear < inner radius; got {} vs {}",
                    self.smear, self.inner_radius
                ),
            });
        }
        if 4 * self.inner_radius >= self.outer_radius {
            return Err(Error::ConfigInvalid {
                reason: format!(
                    "need inner radius < outer/4; got {} vs {}",
                    self.inner_radius, self.outer_radius
                ),
            });
        }
        if self.delta <= q(0, 1) || self.delta >= q(1, 2) {
            return Err(Error::ConfigInvalid {
                reason: format!(
                    "delta must be in (0, 1/2), got {}",
                    crate::qfmt::to_string(&self.delta)
                ),
            });
        }
        if w.bound() != self.outer_radius {
            return Err(Error::ConfigInvalid {
                reason: format!(
                    "outer radius {} does not match window {w}",
                    self.outer_radius
                ),
            });
        }
        Ok(())
    }

    /// Radii tested per cell: min(8·smear, nu) doubling up to nu, nu
    /// included.
    pub fn ladder(&self) -> Vec<i64> {
        let nu = self.inner_radius;
        let mut r = (8 * self.smear).min(nu);
        let mut out = vec![r];
        while r < nu {
            r = (2 * r).min(nu);
            out.push(r);
        }
        out
    }
}

/// Density-point fraction of the smeared set.
///
/// A cell x is a density point when for every ladder radius r the count
/// of `dilate(E, smear)` in the window-clipped box x + [-r, r]^dim is at
/// least (1 − delta)(2r+1)^dim — the denominator is always the full box
/// volume, so cells hugging the window edge fail on overhang alone.
/// Returns (density-point fraction, density of the smeared set), both
/// over the whole window.
pub fn two_scale_density_fraction(e: &LatticeSet, cfg: &TwoScaleConfig) -> Result<(Q, Q)> {
    let w = e.window();
    cfg.validate(&w)?;
    let smeared = dilate_cube(e, cfg.smear)?;
    let ladder = cfg.ladder();
    let cells = w.cells();
    let dim = w.dim() as usize;
    let (lo, _) = w.axis_range();
    let need = q(1, 1) - cfg.delta;
    let (np, nq) = (*need.numer(), *need.denom());

    let count_points = |count_box: &(dyn Fn(usize, i64) -> i64 + Sync)| -> usize {
        (0..cells)
            .into_par_iter()
            .filter(|&idx| {
                ladder.iter().all(|&r| {
                    let full = (0..dim as u32).fold(1i128, |acc, _| acc * (2 * r + 1) as i128);
                    let cnt = count_box(idx, r) as i128;
                    cnt * nq >= np * full
                })
            })
            .count()
    };

    let fraction_num = if dim == 1 {
        let mut prefix = vec![0u32; cells + 1];
        for i in 0..cells {
            prefix[i + 1] = prefix[i] + smeared.get_index(i) as u32;
        }
        let side = w.side();
        let counter = move |idx: usize, r: i64| -> i64 {
            let x = idx as i64;
            let a = (x - r).max(0) as usize;
            let b = (x + r).min(side - 1) as usize;
            (prefix[b + 1] - prefix[a]) as i64
        };
        count_points(&counter)
    } else {
        let table = IntegralImage::build(&smeared);
        let side = w.side();
        let counter = move |idx: usize, r: i64| -> i64 {
            let p = w.point(idx);
            let mut a = [0usize; 3];
            let mut b = [1usize; 3];
            for ax in 0..dim {
                let ia = (p[ax] - r - lo).max(0);
                let ib = (p[ax] + r - lo).min(side - 1);
                a[ax] = ia as usize;
                b[ax] = ib as usize + 1;
            }
            table.rect_count(a, b) as i64
        };
        count_points(&counter)
    };
    Ok((
        Q::new(fraction_num as i128, cells as i128),
        Q::new(smeared.cardinality() as i128, cells as i128),
    ))
}

/// For each m <= m_max, the fraction of window cells z whose inner-radius
/// cube sits inside `dilate(sumset(X, Y), m)`. Monotone non-decreasing
/// in m.
pub fn syndetic_point_fraction(
    x: &LatticeSet,
    y: &LatticeSet,
    cfg: &TwoScaleConfig,
    m_max: i64,
) -> Result<Vec<(i64, Q)>> {
    let w = x.window();
    cfg.validate(&w)?;
    if m_max < 0 {
        return Err(Error::ConfigInvalid {
            reason: format!("m_max must be >= 0, got {m_max}"),
        });
    }
    let s = sumset(x, y, false)?;
    let cells = w.cells() as i128;
    let mut out = Vec::with_capacity(m_max as usize + 1);
    for m in 0..=m_max {
        let witness = erode_cube(&dilate_cube(&s, m)?, cfg.inner_radius)?;
        out.push((m, Q::new(witness.cardinality() as i128, cells)));
    }
    Ok(out)
}

/// JSON verdict record shared by the check subcommands.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub check: String,
    pub inputs_digest: String,
    pub holds: bool,
    pub lhs: String,
    pub rhs: String,
    pub witness: serde_json::Value,
}

/// Hex SHA-256 over the concatenation of the given parts, each
/// length-prefixed so distinct splits cannot collide.
pub fn inputs_digest<S: AsRef<[u8]>>(parts: &[S]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        let b = p.as_ref();
        h.update((b.len() as u64).to_le_bytes());
        h.update(b);
    }
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for byte in out {
        s.push_str(&format!("{byte:02x}"));
    }
    s
}
