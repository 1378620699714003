//! Named generators for the example sets the test corpus revolves around.
//!
//! Five constructions, all deterministic and exactly truncated to the
//! target window:
//!
//! - `upper_pair`: A = ∪ [2^n, 2^n + 2^(n-1)] (density oscillating
//!   between 1/2 and 2/3) paired with B = ∪ [n!, n! + n] (sparse
//!   factorial intervals).
//! - `epsilon_set`: A = ∪_j ∪_{i<=j} (i·ℤ) ∩ [2^j − 2^(j−i), 2^j − 2^(j−i−1)],
//!   a layered union of progression segments whose gap-filling fraction
//!   at dilation m approaches 1 − 1/2^m.
//! - `optimal_C`: on each factorial block [i!, (i+1)!) the residues
//!   {0..s_i−1} mod 2s_i, where s_i walks the triangular sequence
//!   1,2,1,2,3,1,2,3,4,…; density 1/2 with unboundedly long gap patterns.
//! - `big_pair`: a two-part construction over a growth map g(n,p): A tiles
//!   each segment [g(n,p), g(n,p+1)] with an interval of fractional length
//!   r_p followed by a progression of difference base^p, closing each tier
//!   with evens; B translates the residue-sieve sets F_n = D ∩ [0, base^(2n)−1]
//!   to the tier anchors g(n,0), where D omits x with
//!   x mod base^(2p) ≥ base^(2p) − base^p for every p ≥ 1.
//! - `non_pws`: the complement of ∪_{j>=n0} ∪_{x≠0} (j!·x + [1, (j−1)!]),
//!   a positive-density set whose dilations never become thick.
//!
//! Factorial and exponential block families truncate at the last block
//! whose anchor fits the window; partial trailing blocks are generated,
//! so density estimates see the exact truncation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::LatticeSet;
use crate::window::{Convention, Window};
use crate::{q, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyName {
    UpperPair,
    EpsilonSet,
    OptimalC,
    BigPair,
    NonPws,
}

impl FamilyName {
    pub fn token(self) -> &'static str {
        match self {
            FamilyName::UpperPair => "upper_pair",
            FamilyName::EpsilonSet => "epsilon_set",
            FamilyName::OptimalC => "optimal_C",
            FamilyName::BigPair => "big_pair",
            FamilyName::NonPws => "non_pws",
        }
    }

    /// Whether the generator yields an (A, B) pair rather than one set.
    pub fn is_pair(self) -> bool {
        matches!(self, FamilyName::UpperPair | FamilyName::BigPair)
    }
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper_pair" => Ok(FamilyName::UpperPair),
            "epsilon_set" => Ok(FamilyName::EpsilonSet),
            "optimal_C" => Ok(FamilyName::OptimalC),
            "big_pair" => Ok(FamilyName::BigPair),
            "non_pws" => Ok(FamilyName::NonPws),
            _ => Err(Error::UnknownFamily { name: s.into() }),
        }
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A family name plus its integer parameters. Parameters not given fall
/// back to documented defaults; unknown names are rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub name: FamilyName,
    pub params: BTreeMap<String, i64>,
}

impl FamilySpec {
    pub fn new(name: FamilyName) -> Self {
        FamilySpec {
            name,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: i64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, Clone)]
pub enum FamilyOutput {
    Single(LatticeSet),
    Pair { a: LatticeSet, b: LatticeSet },
}

/// Parameter names each family accepts.
fn allowed_params(name: FamilyName) -> &'static [&'static str] {
    match name {
        FamilyName::UpperPair | FamilyName::EpsilonSet | FamilyName::OptimalC => &[],
        FamilyName::BigPair => &["base", "n_max", "start", "bump"],
        FamilyName::NonPws => &["n0"],
    }
}

/// Dispatches a spec to its generator. Defaults: `big_pair` uses
/// base 3, n_max 3, start exponent 4, final bump 3 (the desk-scale
/// configuration); `non_pws` uses n0 = 5.
pub fn generate(spec: &FamilySpec, window: Window) -> Result<FamilyOutput> {
    let allowed = allowed_params(spec.name);
    for key in spec.params.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::ConfigInvalid {
                reason: format!(
                    "family {} does not take parameter '{key}'",
                    spec.name.token()
                ),
            });
        }
    }
    let get = |key: &str, default: i64| *spec.params.get(key).unwrap_or(&default);
    match spec.name {
        FamilyName::UpperPair => {
            let (a, b) = gen_upper_pair(window)?;
            Ok(FamilyOutput::Pair { a, b })
        }
        FamilyName::EpsilonSet => Ok(FamilyOutput::Single(gen_epsilon_set(window)?)),
        FamilyName::OptimalC => Ok(FamilyOutput::Single(gen_optimal_c(window)?)),
        FamilyName::BigPair => {
            let base = get("base", 3);
            let n_max = get("n_max", 3);
            let start = get("start", 4);
            let bump = get("bump", 3);
            if !(1..=8).contains(&n_max) || !(1..=62).contains(&start) || !(1..=62).contains(&bump)
            {
                return Err(Error::ConfigInvalid {
                    reason: format!(
                        "big_pair needs 1 <= n_max <= 8 and exponents in [1,62]; \
                         got n_max={n_max}, start={start}, bump={bump}"
                    ),
                });
            }
            let growth = default_growth(base, n_max as u32, start as u32, bump as u32)?;
            let (a, b) = gen_big_pair(base, &growth, window)?;
            Ok(FamilyOutput::Pair { a, b })
        }
        FamilyName::NonPws => Ok(FamilyOutput::Single(gen_non_pws(get("n0", 5), window)?)),
    }
}

// Ceiling division for positive operands (the signed std method is
// still unstable).
fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(a >= 0 && b > 0);
    (a + b - 1) / b
}

fn require_classical(window: &Window) -> Result<()> {
    if window.convention() != Convention::Classical1D {
        return Err(Error::WrongConvention {
            required: "classical1d".into(),
            actual: window.to_string(),
        });
    }
    Ok(())
}

/// A = ∪_n [2^n, 2^n + 2^(n-1)], B = ∪_n [n!, n! + n], both clipped.
pub fn gen_upper_pair(window: Window) -> Result<(LatticeSet, LatticeSet)> {
    require_classical(&window)?;
    let n_cap = window.bound();
    let mut a = LatticeSet::empty(window);
    let mut lo: i64 = 2;
    while lo <= n_cap {
        let hi = (lo + lo / 2).min(n_cap);
        a.fill_index_range((lo - 1) as usize, hi as usize);
        lo *= 2;
    }
    let mut b = LatticeSet::empty(window);
    let mut fact: i64 = 1;
    for n in 1.. {
        fact *= n;
        if fact > n_cap {
            break;
        }
        let hi = (fact + n).min(n_cap);
        b.fill_index_range((fact - 1) as usize, hi as usize);
    }
    Ok((a, b))
}

/// Layered progression segments: for each j ≥ 1 and 1 ≤ i ≤ j, the
/// multiples of i in [2^j − 2^(j−i), 2^j − 2^(j−i−1)] (for i = j the
/// upper endpoint floors to 2^j − 1).
pub fn gen_epsilon_set(window: Window) -> Result<LatticeSet> {
    require_classical(&window)?;
    let n_cap = window.bound();
    let mut a = LatticeSet::empty(window);
    for j in 1..=62i64 {
        let pow_j = 1i64 << j;
        if pow_j / 2 > n_cap {
            break;
        }
        for i in 1..=j {
            let lo = pow_j - (1i64 << (j - i));
            if lo > n_cap {
                break;
            }
            let hi_raw = if i < j {
                pow_j - (1i64 << (j - i - 1))
            } else {
                pow_j - 1
            };
            let hi = hi_raw.min(n_cap);
            if i == 1 {
                a.fill_index_range((lo - 1) as usize, hi as usize);
            } else {
                let mut v = ceil_div(lo, i) * i;
                while v <= hi {
                    a.set_index((v - 1) as usize);
                    v += i;
                }
            }
        }
    }
    Ok(a)
}

/// The triangular sequence 1,2,1,2,3,1,2,3,4,… (indexed from 1): group
/// g has length g + 1 and values 1..=g+1.
pub fn s_value(i: i64) -> i64 {
    debug_assert!(i >= 1);
    let mut start = 1;
    let mut g = 1;
    loop {
        let len = g + 1;
        if i < start + len {
            return i - start + 1;
        }
        start += len;
        g += 1;
    }
}

/// On each factorial block [i!, (i+1)!) the residues {0..s_i−1} mod 2s_i.
pub fn gen_optimal_c(window: Window) -> Result<LatticeSet> {
    require_classical(&window)?;
    let n_cap = window.bound();
    const CAP: i64 = 39_916_800; // 11!
    if n_cap > CAP {
        return Err(Error::ConfigInvalid {
            reason: format!("window bound {n_cap} exceeds the 11! feasibility cap {CAP}"),
        });
    }
    let mut c = LatticeSet::empty(window);
    let mut fact: i64 = 1;
    for i in 1.. {
        fact *= i;
        if fact > n_cap {
            break;
        }
        let block_end = (fact * (i + 1) - 1).min(n_cap);
        let s = s_value(i);
        let period = 2 * s;
        // Runs of s members per period, clipped to the block.
        let mut anchor = (fact / period) * period;
        while anchor <= block_end {
            let lo = anchor.max(fact);
            let hi = (anchor + s - 1).min(block_end);
            if lo <= hi {
                c.fill_index_range((lo - 1) as usize, hi as usize);
            }
            anchor += period;
        }
    }
    Ok(c)
}

/// r_p = (base^p − 2) / (2(base^p − 1)) for p ≥ 1, with r_0 = 0: the
/// fractional interval length that balances against the 1/base^p
/// progression so each tier's density is exactly 1/2.
pub fn r_value(base: i64, p: u32) -> Q {
    debug_assert!(base >= 2 && p <= 40);
    if p == 0 {
        return q(0, 1);
    }
    let bp = (base as i128).pow(p);
    Q::new(bp - 2, 2 * (bp - 1))
}

/// Anchor values g(n, p) for 1 ≤ n ≤ n_max, 0 ≤ p ≤ n, strictly
/// increasing in lexicographic key order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthMap {
    values: BTreeMap<(u32, u32), i64>,
}

impl GrowthMap {
    pub fn new(values: BTreeMap<(u32, u32), i64>) -> Result<Self> {
        let n_max = match values.keys().map(|k| k.0).max() {
            Some(n) => n,
            None => {
                return Err(Error::ConfigInvalid {
                    reason: "growth map is empty".into(),
                })
            }
        };
        for n in 1..=n_max {
            for p in 0..=n {
                if !values.contains_key(&(n, p)) {
                    return Err(Error::ConfigInvalid {
                        reason: format!("growth map is missing level ({n},{p})"),
                    });
                }
            }
        }
        let expected: usize = (1..=n_max).map(|n| n as usize + 1).sum();
        if values.len() != expected {
            return Err(Error::ConfigInvalid {
                reason: "growth map has keys outside the triangular index range".into(),
            });
        }
        let mut prev: i64 = 0;
        for (&(n, p), &v) in &values {
            if v <= prev {
                return Err(Error::ConfigInvalid {
                    reason: format!(
                        "growth map is not strictly increasing at ({n},{p}): {v} after {prev}"
                    ),
                });
            }
            prev = v;
        }
        Ok(GrowthMap { values })
    }

    pub fn n_max(&self) -> u32 {
        self.values.keys().map(|k| k.0).max().unwrap()
    }

    pub fn get(&self, n: u32, p: u32) -> i64 {
        self.values[&(n, p)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32), &i64)> {
        self.values.iter()
    }
}

/// Growth map with exponents of `base` assigned consecutively from
/// `start` in key order, except the final step rises by `bump` instead
/// of 1 (a long last tier keeps the window's tail inside one segment).
pub fn default_growth(base: i64, n_max: u32, start: u32, bump: u32) -> Result<GrowthMap> {
    if base < 3 {
        return Err(Error::ConfigInvalid {
            reason: format!("base must be >= 3, got {base}"),
        });
    }
    let keys: Vec<(u32, u32)> = (1..=n_max).flat_map(|n| (0..=n).map(move |p| (n, p))).collect();
    let count = keys.len() as u32;
    let mut values = BTreeMap::new();
    for (idx, key) in keys.iter().enumerate() {
        let e = if idx as u32 == count - 1 {
            start + count - 2 + bump
        } else {
            start + idx as u32
        };
        let v = (base as i128).checked_pow(e).filter(|&v| v <= i64::MAX as i128);
        match v {
            Some(v) => {
                values.insert(*key, v as i64);
            }
            None => {
                return Err(Error::EvalOverflow {
                    value: format!("{base}^{e}"),
                    context: format!("growth value at level ({},{})", key.0, key.1),
                })
            }
        }
    }
    GrowthMap::new(values)
}

/// Builds the two-part construction over `growth`. A's tier for (n, p<n)
/// covers [g(n,p), g(n,p+1)]: an interval of length ⌊r_p·Δ⌋ then the
/// multiples of base^p up to the segment end; the closing tier (n, n)
/// holds the evens of [g(n,n), g(n+1,0)] (window end for the last n).
/// B = ∪_{n≥2} (g(n,0) + F_n).
pub fn gen_big_pair(base: i64, growth: &GrowthMap, window: Window) -> Result<(LatticeSet, LatticeSet)> {
    require_classical(&window)?;
    if base < 3 {
        return Err(Error::ConfigInvalid {
            reason: format!("base must be >= 3, got {base}"),
        });
    }
    let n_cap = window.bound();
    for (&(n, p), &v) in growth.iter() {
        if v > n_cap {
            return Err(Error::GrowthTooLarge {
                level: format!("({n},{p})"),
                value: v.to_string(),
                capacity: n_cap,
            });
        }
    }
    let n_max = growth.n_max();
    let mut a = LatticeSet::empty(window);
    let fill = |set: &mut LatticeSet, lo: i64, hi: i64| {
        let lo = lo.max(1);
        let hi = hi.min(n_cap);
        if lo <= hi {
            set.fill_index_range((lo - 1) as usize, hi as usize);
        }
    };
    for n in 1..=n_max {
        for p in 0..=n {
            let g_np = growth.get(n, p);
            let seg_end = if p < n {
                growth.get(n, p + 1)
            } else if n < n_max {
                growth.get(n + 1, 0)
            } else {
                n_cap
            };
            if p < n {
                let delta = seg_end - g_np;
                let head = (r_value(base, p) * Q::from_integer(delta as i128))
                    .floor()
                    .to_integer() as i64;
                fill(&mut a, g_np, g_np + head);
                let step = base.pow(p);
                let mut v = ceil_div(g_np + head, step) * step;
                while v <= seg_end.min(n_cap) {
                    a.set_index((v - 1) as usize);
                    v += step;
                }
            } else {
                let mut v = g_np + (g_np & 1);
                while v <= seg_end.min(n_cap) {
                    a.set_index((v - 1) as usize);
                    v += 2;
                }
            }
        }
    }
    let mut b = LatticeSet::empty(window);
    for n in 2..=n_max {
        let anchor = growth.get(n, 0);
        // F_n = D ∩ [0, base^(2n)−1]; only sieve levels p <= n can
        // strike below base^(2n).
        let f_hi_full = (base as i128).pow(2 * n).min(i64::MAX as i128) as i64 - 1;
        let f_hi = f_hi_full.min(n_cap - anchor);
        let moduli: Vec<(i64, i64)> = (1..=n)
            .map(|p| ((base as i128).pow(2 * p).min(i64::MAX as i128) as i64, base.pow(p)))
            .collect();
        for x in 0..=f_hi {
            let in_d = moduli.iter().all(|&(m, g)| x % m < m - g);
            if in_d {
                b.set_index((anchor + x - 1) as usize);
            }
        }
    }
    Ok((a, b))
}

/// Complement of ∪_{j≥n0} ∪_{x≠0} (j!·x + [1, (j−1)!]) on a
/// 1-dimensional window.
pub fn gen_non_pws(n0: i64, window: Window) -> Result<LatticeSet> {
    if window.dim() != 1 {
        return Err(Error::WrongConvention {
            required: "1-dimensional".into(),
            actual: window.to_string(),
        });
    }
    if n0 < 3 {
        return Err(Error::ConfigInvalid {
            reason: format!("n0 must be >= 3, got {n0}"),
        });
    }
    let (lo, hi) = window.axis_range();
    // (j!, (j−1)!) for every j >= n0 whose blocks can touch the window.
    // The positive side needs j! < hi (blocks start at j!·x + 1, x >= 1);
    // the negative side needs the x = -1 block [-j!+1, -j!+(j-1)!] to
    // reach lo, i.e. j! - (j-1)! <= -lo. Both conditions are monotone in
    // j, so the scan stops once neither holds.
    let mut blocks: Vec<(i64, i64)> = Vec::new();
    let mut fact: i128 = 1;
    for j in 1..=33i64 {
        let prev = fact;
        fact *= j as i128;
        let pos_touch = fact <= hi as i128;
        let neg_touch = lo < 0 && fact - prev <= -(lo as i128);
        if !pos_touch && !neg_touch {
            break;
        }
        if j >= n0 {
            blocks.push((fact as i64, prev as i64));
        }
    }
    let excluded = |n: i64| {
        blocks.iter().any(|&(jf, jm1f)| {
            let t = n.rem_euclid(jf);
            t >= 1 && t <= jm1f && (n < 0 || n >= jf)
        })
    };
    Ok(LatticeSet::from_predicate(window, |p| !excluded(p[0])))
}
