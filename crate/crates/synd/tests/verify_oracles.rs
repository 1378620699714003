//! Oracle tests for the theorem-checking layer. The randomized cases
//! lean on the fact that every checked inequality is a theorem: when
//! the hypotheses pass, `holds` must come back true, so any false
//! verdict is an implementation bug, not bad luck. Counting paths are
//! cross-checked against naive reimplementations.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synd::density::{banach_profile, schnirelmann};
use synd::families::gen_upper_pair;
use synd::morph::sumset;
use synd::verify::{
    besicovitch_select, covering_bound_check, covering_exhaustive, mann_check, mann_exhaustive,
    mann_sum_set, syndetic_point_fraction, two_scale_density_fraction, CoverInstance, Cube,
    TwoScaleConfig,
};
use synd::{q, Error, LatticeSet, Q, Window};

fn random_set(w: Window, seed: u64, density_pct: u32) -> LatticeSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<_> = w
        .iter_points()
        .filter(|_| rng.random_range(0..100) < density_pct)
        .collect();
    LatticeSet::from_points(w, points).unwrap()
}

#[test]
fn mann_holds_on_family_pair() {
    let w = Window::classical(1 << 12).unwrap();
    let (a, b) = gen_upper_pair(w).unwrap();
    let rec = mann_check(&a, &b).unwrap();
    assert!(rec.holds);
    assert_eq!(rec.first_violation, None);
    assert_eq!(rec.sigma_a, schnirelmann(&a).unwrap());
    assert_eq!(rec.sigma_b, schnirelmann(&b).unwrap());
    assert_eq!(rec.sigma_sum, schnirelmann(&mann_sum_set(&a, &b).unwrap()).unwrap());
    assert_eq!(rec.bound, (rec.sigma_a + rec.sigma_b).min(q(1, 1)));
}

#[test]
fn mann_never_violated_on_random_pairs() {
    let w = Window::classical(200).unwrap();
    for seed in 0..300 {
        let a = random_set(w, seed, 5 + (seed as u32 * 13) % 95);
        let b = random_set(w, 1000 + seed, 5 + (seed as u32 * 29) % 95);
        let rec = mann_check(&a, &b).unwrap();
        assert!(rec.holds, "seed {seed}: {rec:?}");
        assert_eq!(rec.first_violation, None, "seed {seed}");
        assert!(rec.sigma_sum >= rec.bound, "seed {seed}");
    }
}

#[test]
fn mann_mask_path_agrees_with_set_path() {
    // The exhaustive sweep runs on bit masks; spot-check that masks and
    // lattice sets tell the same story.
    assert_eq!(mann_exhaustive(6).unwrap(), (0, 4096));
    let w = Window::classical(10).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..60 {
        let ma: u32 = rng.random_range(0..1024);
        let mb: u32 = rng.random_range(0..1024);
        let a = LatticeSet::from_predicate(w, |p| ma >> (p[0] - 1) & 1 == 1);
        let b = LatticeSet::from_predicate(w, |p| mb >> (p[0] - 1) & 1 == 1);
        let rec = mann_check(&a, &b).unwrap();
        assert!(rec.holds, "masks {ma:#b}, {mb:#b}");
    }
}

/// Naive rerun of the exhaustive covering sweep at |X| <= 3 with set
/// operations and rational arithmetic instead of popcounts.
#[test]
fn covering_exhaustive_matches_naive_at_three() {
    let thresholds = [q(1, 4), q(1, 3), q(1, 2), q(2, 3)];
    let mut violations = 0u64;
    let mut checked = 0u64;
    for x in 1u32..=3 {
        let size = 1u32 << x;
        let members = |mask: u32| -> Vec<u32> { (0..x).filter(|&c| mask >> c & 1 == 1).collect() };
        let mut families: Vec<Vec<u32>> = Vec::new();
        for t1 in 0..size {
            families.push(vec![t1]);
            for t2 in t1..size {
                families.push(vec![t1, t2]);
                for t3 in t2..size {
                    families.push(vec![t1, t2, t3]);
                }
            }
        }
        for family in &families {
            let mut coverage = vec![0i64; x as usize];
            for &t in family {
                for c in members(t) {
                    coverage[c as usize] += 1;
                }
            }
            if coverage.contains(&0) {
                continue;
            }
            let m = *coverage.iter().max().unwrap();
            for &t in &thresholds {
                'target: for e in 0..size {
                    for &sub in family {
                        if sub == 0 {
                            continue;
                        }
                        let hit = members(sub & e).len();
                        if Q::new(hit as i128, members(sub).len() as i128) > t {
                            continue 'target;
                        }
                    }
                    checked += 1;
                    let lhs = Q::new(members(e).len() as i128, x as i128);
                    let m_q = Q::from_integer(m as i128);
                    let rhs = m_q * t / (q(1, 1) + (m_q - q(1, 1)) * t);
                    if lhs > rhs {
                        violations += 1;
                    }
                }
            }
        }
    }
    assert_eq!(covering_exhaustive(3).unwrap(), (violations, checked));
    assert_eq!(violations, 0);
}

#[test]
fn covering_random_instances_never_violate() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let thresholds = [q(1, 4), q(1, 3), q(1, 2), q(2, 3)];
    let mut ok_count = 0usize;
    for round in 0..200 {
        let g = rng.random_range(4..40usize);
        let ground: Vec<Vec<i64>> = (0..g as i64).map(|v| vec![v]).collect();
        let subsets: Vec<Vec<Vec<i64>>> = if round % 2 == 0 {
            // Partition into k chunks: coverage exactly 1 everywhere.
            let k = rng.random_range(1..=4usize);
            let mut parts = vec![Vec::new(); k];
            for cell in &ground {
                parts[rng.random_range(0..k)].push(cell.clone());
            }
            parts
        } else {
            // Independent random subsets; hypotheses may or may not hold.
            (0..rng.random_range(1..=5usize))
                .map(|_| {
                    ground
                        .iter()
                        .filter(|_| rng.random_range(0..2u32) == 0)
                        .cloned()
                        .collect()
                })
                .collect()
        };
        let mut coverage = vec![0i64; g];
        for t in &subsets {
            for cell in t {
                coverage[cell[0] as usize] += 1;
            }
        }
        let mult_bound = (*coverage.iter().max().unwrap()).max(1);
        let target: Vec<Vec<i64>> = ground
            .iter()
            .filter(|_| rng.random_range(0..100u32) < 15)
            .cloned()
            .collect();
        let inst = CoverInstance {
            ground,
            subsets,
            mult_bound,
            threshold: thresholds[rng.random_range(0..4usize)],
            target,
        };
        match covering_bound_check(&inst) {
            Ok(v) => {
                assert!(v.holds, "round {round}: {v:?}");
                // Independent recomputation of both sides.
                let lhs = Q::new(inst.target.len() as i128, inst.ground.len() as i128);
                assert_eq!(v.lhs, lhs);
                let m = Q::from_integer(inst.mult_bound as i128);
                let t = inst.threshold;
                assert_eq!(v.rhs, m * t / (q(1, 1) + (m - q(1, 1)) * t));
                ok_count += 1;
            }
            Err(Error::HypothesisFailed { reason }) => {
                // Must name a real failure: an uncovered cell or an
                // over-threshold subset (multiplicity cannot exceed the
                // exact maximum we passed).
                let uncovered = coverage.contains(&0);
                let ratio_exceeded = inst.subsets.iter().any(|t| {
                    !t.is_empty() && {
                        let hit = t.iter().filter(|c| inst.target.contains(c)).count();
                        Q::new(hit as i128, t.len() as i128) > inst.threshold
                    }
                });
                assert!(
                    (reason.contains("uncovered") && uncovered)
                        || (reason.contains("ratio") && ratio_exceeded),
                    "round {round}: {reason}"
                );
            }
            Err(e) => panic!("round {round}: unexpected error {e}"),
        }
    }
    assert!(ok_count >= 50, "only {ok_count} instances passed hypotheses");
}

#[test]
fn besicovitch_selection_audited_naively() {
    let windows = [
        Window::classical(60).unwrap(),
        Window::centered(16, 2).unwrap(),
        Window::centered(6, 3).unwrap(),
    ];
    for (wi, w) in windows.into_iter().enumerate() {
        for seed in 0..40u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed * 10 + wi as u64);
            let ground = random_set(w, 5000 + seed * 3 + wi as u64, 30);
            let mut cubes: Vec<Cube> = ground
                .iter_points()
                .map(|p| Cube {
                    center: p,
                    radius: rng.random_range(1..=3),
                })
                .collect();
            let (lo, hi) = w.axis_range();
            for _ in 0..15 {
                let mut center = [0i64; 3];
                for c in center.iter_mut().take(w.dim() as usize) {
                    *c = rng.random_range(lo..=hi);
                }
                cubes.push(Cube {
                    center,
                    radius: rng.random_range(1..=3),
                });
            }
            if ground.is_empty() {
                continue;
            }
            let selected = besicovitch_select(&cubes, &ground).unwrap();
            // Naive audit: direct Chebyshev containment per ground point.
            let cap = 4i64.pow(w.dim() as u32);
            for p in ground.iter_points() {
                let mult = selected
                    .iter()
                    .filter(|&&i| {
                        (0..w.dim() as usize)
                            .all(|ax| (p[ax] - cubes[i].center[ax]).abs() <= cubes[i].radius)
                    })
                    .count() as i64;
                assert!(
                    mult >= 1 && mult <= cap,
                    "window {w}, seed {seed}: multiplicity {mult} at {p:?}"
                );
            }
            // Output is a sorted dedup'd index list into the input.
            assert!(selected.windows(2).all(|s| s[0] < s[1]));
            assert!(selected.iter().all(|&i| i < cubes.len()));
        }
    }
}

#[test]
fn besicovitch_reports_first_unreachable_point() {
    let w = Window::classical(30).unwrap();
    let ground = LatticeSet::from_points(w, vec![[5, 0, 0], [17, 0, 0]]).unwrap();
    let cubes = [Cube {
        center: [5, 0, 0],
        radius: 2,
    }];
    match besicovitch_select(&cubes, &ground) {
        Err(Error::NotCoverable { point }) => assert_eq!(point, [17, 0, 0]),
        other => panic!("expected NotCoverable, got {other:?}"),
    }
}

/// Naive per-cell reimplementation of the density-point fraction.
fn naive_two_scale(e: &LatticeSet, cfg: &TwoScaleConfig) -> (Q, Q) {
    let w = e.window();
    let dim = w.dim() as usize;
    let (lo, hi) = w.axis_range();
    let smeared: Vec<[i64; 3]> = w
        .iter_points()
        .filter(|&p| {
            // Chebyshev distance to E at most smear.
            e.iter_points().any(|q| {
                (0..dim).all(|ax| (p[ax] - q[ax]).abs() <= cfg.smear)
            })
        })
        .collect();
    let member: std::collections::HashSet<[i64; 3]> = smeared.iter().copied().collect();
    let need = q(1, 1) - cfg.delta;
    let mut hits = 0i128;
    for p in w.iter_points() {
        let good = cfg.ladder().iter().all(|&r| {
            let mut count = 0i128;
            let mut full = 1i128;
            let mut boxes = vec![(0i64, 0i64); dim];
            for (ax, b) in boxes.iter_mut().enumerate() {
                *b = ((p[ax] - r).max(lo), (p[ax] + r).min(hi));
                full *= 2 * r as i128 + 1;
            }
            // Walk the clipped box.
            let mut cur: Vec<i64> = boxes.iter().map(|b| b.0).collect();
            'walk: loop {
                let mut q3 = [0i64; 3];
                q3[..dim].copy_from_slice(&cur);
                if member.contains(&q3) {
                    count += 1;
                }
                for ax in (0..dim).rev() {
                    if cur[ax] < boxes[ax].1 {
                        cur[ax] += 1;
                        for later in ax + 1..dim {
                            cur[later] = boxes[later].0;
                        }
                        continue 'walk;
                    }
                }
                break;
            }
            Q::new(count, 1) >= need * Q::new(full, 1)
        });
        if good {
            hits += 1;
        }
    }
    (
        Q::new(hits, w.cells() as i128),
        Q::new(member.len() as i128, w.cells() as i128),
    )
}

#[test]
fn two_scale_matches_naive_in_1d() {
    let w = Window::classical(120).unwrap();
    let cfg = TwoScaleConfig {
        outer_radius: 120,
        inner_radius: 10,
        smear: 1,
        delta: q(1, 4),
    };
    let evens = LatticeSet::from_predicate(w, |p| p[0] % 2 == 0);
    let full = LatticeSet::full(w);
    let mut cases = vec![evens, full];
    for seed in 0..5 {
        cases.push(random_set(w, 7000 + seed, 20 + (seed as u32) * 15));
    }
    for (i, e) in cases.iter().enumerate() {
        let got = two_scale_density_fraction(e, &cfg).unwrap();
        let expect = naive_two_scale(e, &cfg);
        assert_eq!(got, expect, "case {i}");
    }
}

#[test]
fn two_scale_matches_naive_in_2d() {
    let w = Window::centered(25, 2).unwrap();
    let cfg = TwoScaleConfig {
        outer_radius: 25,
        inner_radius: 5,
        smear: 1,
        delta: q(1, 4),
    };
    let quadrant = LatticeSet::from_predicate(w, |p| p[0] >= 0 && p[1] >= 0);
    let stripes = LatticeSet::from_predicate(w, |p| p[0].rem_euclid(2) == 0);
    let speckle = random_set(w, 8100, 35);
    for (i, e) in [quadrant, stripes, speckle].iter().enumerate() {
        let got = two_scale_density_fraction(e, &cfg).unwrap();
        let expect = naive_two_scale(e, &cfg);
        assert_eq!(got, expect, "case {i}");
    }
}

#[test]
fn syndetic_fraction_matches_naive() {
    let w = Window::classical(200).unwrap();
    let cfg = TwoScaleConfig {
        outer_radius: 200,
        inner_radius: 10,
        smear: 1,
        delta: q(1, 4),
    };
    for seed in 0..3 {
        let x = random_set(w, 9000 + seed, 40);
        let y = random_set(w, 9500 + seed, 40);
        let rows = syndetic_point_fraction(&x, &y, &cfg, 3).unwrap();

        // Naive: boolean vectors, direct double-loop sumset, direct
        // dilation/erosion by interval scans.
        let n = 200usize;
        let xv: Vec<bool> = (1..=n as i64).map(|v| x.contains([v, 0, 0])).collect();
        let yv: Vec<bool> = (1..=n as i64).map(|v| y.contains([v, 0, 0])).collect();
        let mut s = vec![false; n];
        for (i, &xi) in xv.iter().enumerate() {
            if !xi {
                continue;
            }
            for (j, &yj) in yv.iter().enumerate() {
                if yj {
                    let sum = (i + 1) + (j + 1);
                    if sum <= n {
                        s[sum - 1] = true;
                    }
                }
            }
        }
        for (m, got) in rows {
            let mu = m as usize;
            let dilated: Vec<bool> = (0..n)
                .map(|i| {
                    (i.saturating_sub(mu)..=(i + mu).min(n - 1)).any(|j| s[j])
                })
                .collect();
            let nu = cfg.inner_radius as usize;
            let count = (0..n)
                .filter(|&i| {
                    i >= nu && i + nu < n && (i - nu..=i + nu).all(|j| dilated[j])
                })
                .count();
            assert_eq!(got, Q::new(count as i128, n as i128), "seed {seed}, m {m}");
        }
    }
}

#[test]
fn punched_sets_obey_the_thickness_bound() {
    // A set whose k-erosion is empty cannot fill a sliding box: every
    // (2k+1)-run misses at least once, so the box density stays at most
    // 2k/(2k+1) plus a boundary term under (2k+1)/n.
    let w = Window::classical(600).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 1i64..=2 {
        let period = 2 * k + 1;
        for _ in 0..20 {
            let hole = rng.random_range(0..period);
            let keep_pct = rng.random_range(40..100u32);
            let keep: Vec<bool> = (0..600).map(|_| rng.random_range(0..100) < keep_pct).collect();
            let a = LatticeSet::from_predicate(w, |p| {
                p[0].rem_euclid(period) != hole && keep[(p[0] - 1) as usize]
            });
            assert!(synd::morph::erode_cube(&a, k).unwrap().is_empty());
            for n in [100 * k, 250] {
                let ratio = banach_profile(&a, &[n]).unwrap()[0].1;
                let bound = Q::new(2 * k as i128, period as i128)
                    + Q::new(period as i128, n as i128);
                assert!(ratio <= bound, "k {k}, n {n}: {ratio} > {bound}");
            }
        }
    }
}

#[test]
fn mann_sum_contains_both_operands_and_their_sums() {
    let w = Window::centered(40, 1).unwrap();
    let a = random_set(w, 12, 30);
    let b = random_set(w, 13, 30);
    let s = mann_sum_set(&a, &b).unwrap();
    for p in a.iter_points().chain(b.iter_points()) {
        assert!(s.contains(p));
    }
    let plain = sumset(&a, &b, false).unwrap();
    assert!(plain.is_subset_of(&s).unwrap());
}
