//! Property suite for the morphology operations: duality, opening and
//! closing bounds, block-transform idempotence, the quotient/fill
//! equivalence, and sumset algebra, over randomized windows in one to
//! three dimensions.

use proptest::prelude::*;
use synd::morph::{
    block_fill, block_quotient, dilate_block, dilate_cube, erode_block, erode_cube,
    interior_mask, sumset,
};
use synd::{LatticeSet, Window};

fn small_window() -> impl Strategy<Value = Window> {
    prop_oneof![
        (1i64..=48).prop_map(|n| Window::classical(n).unwrap()),
        (1i64..=10).prop_map(|n| Window::centered(n, 1).unwrap()),
        (1i64..=10).prop_map(|n| Window::centered(n, 2).unwrap()),
        (1i64..=4).prop_map(|n| Window::centered(n, 3).unwrap()),
    ]
}

fn bits_to_set(w: Window, bits: &[bool]) -> LatticeSet {
    LatticeSet::from_predicate(w, |p| bits[w.index(p).unwrap()])
}

fn windowed_set() -> impl Strategy<Value = LatticeSet> {
    small_window().prop_flat_map(|w| {
        proptest::collection::vec(any::<bool>(), w.cells())
            .prop_map(move |bits| bits_to_set(w, &bits))
    })
}

fn windowed_pair() -> impl Strategy<Value = (LatticeSet, LatticeSet)> {
    small_window().prop_flat_map(|w| {
        let cells = w.cells();
        (
            proptest::collection::vec(any::<bool>(), cells),
            proptest::collection::vec(any::<bool>(), cells),
        )
            .prop_map(move |(ba, bb)| (bits_to_set(w, &ba), bits_to_set(w, &bb)))
    })
}

proptest! {
    #[test]
    fn erode_is_complement_dilate_complement_on_interior(
        s in windowed_set(),
        k in 0i64..=3,
    ) {
        let eroded = erode_cube(&s, k);
        let dilated = dilate_cube(&s.complement(), k);
        prop_assert_eq!(eroded.is_ok(), dilated.is_ok());
        if let (Ok(eroded), Ok(dilated)) = (eroded, dilated) {
            let interior = interior_mask(s.window(), k).unwrap();
            let rhs = dilated.complement().intersect(&interior).unwrap();
            prop_assert_eq!(eroded, rhs);
        }
    }

    #[test]
    fn opening_shrinks_and_closing_grows(
        s in windowed_set(),
        k in 0i64..=3,
    ) {
        prop_assume!(erode_cube(&s, k).is_ok());
        let opening = dilate_cube(&erode_cube(&s, k).unwrap(), k).unwrap();
        prop_assert!(opening.is_subset_of(&s).unwrap());

        let closing = erode_cube(&dilate_cube(&s, k).unwrap(), k).unwrap();
        let interior = interior_mask(s.window(), k).unwrap();
        let inner = s.intersect(&interior).unwrap();
        prop_assert!(inner.is_subset_of(&closing).unwrap());
    }

    #[test]
    fn block_ops_one_sided_duality(
        s in windowed_set(),
        n in 0i64..=4,
    ) {
        // dilate_block uses [0, n-1]; its dual erosion is the same
        // block, so the pair must satisfy the same subset relations.
        let eroded = erode_block(&s, n);
        prop_assume!(eroded.is_ok());
        let opened = dilate_block(&eroded.unwrap(), n).unwrap();
        if n == 0 {
            // Empty structuring block: the sum over it is empty.
            prop_assert!(opened.is_empty());
        } else {
            prop_assert!(opened.is_subset_of(&s).unwrap());
        }
    }

    #[test]
    fn block_fill_contains_and_is_idempotent(
        s in windowed_set(),
        n in 1i64..=5,
    ) {
        let filled = block_fill(&s, n).unwrap();
        prop_assert!(s.is_subset_of(&filled).unwrap());
        let twice = block_fill(&filled, n).unwrap();
        prop_assert_eq!(&twice, &filled);
    }

    #[test]
    fn quotient_membership_matches_filled_blocks(
        s in windowed_set(),
        n in 1i64..=5,
    ) {
        let quotient = block_quotient(&s, n);
        prop_assume!(quotient.is_ok());
        let quotient = quotient.unwrap();
        let filled = block_fill(&s, n).unwrap();
        let w = s.window();
        for x in quotient.window().iter_points() {
            let dim = w.dim() as usize;
            // In-window cells of the block n·x + [0, n-1]^dim.
            let mut cells = Vec::new();
            let mut offsets = vec![0i64; dim];
            'outer: loop {
                let mut p = [0i64; 3];
                for ax in 0..dim {
                    p[ax] = n * x[ax] + offsets[ax];
                }
                if w.contains(p) {
                    cells.push(p);
                }
                for ax in (0..dim).rev() {
                    offsets[ax] += 1;
                    if offsets[ax] < n {
                        continue 'outer;
                    }
                    offsets[ax] = 0;
                    if ax == 0 {
                        break 'outer;
                    }
                }
            }
            let fully_filled = !cells.is_empty() && cells.iter().all(|&p| filled.contains(p));
            prop_assert_eq!(
                quotient.contains(x),
                fully_filled,
                "x = {:?}, n = {}, window = {}",
                x,
                n,
                w
            );
        }
    }

    #[test]
    fn sumset_is_commutative((a, b) in windowed_pair()) {
        let ab = sumset(&a, &b, false).unwrap();
        let ba = sumset(&b, &a, false).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn sumset_zero_is_identity(s in windowed_set()) {
        let w = s.window();
        prop_assume!(w.contains([0, 0, 0]));
        let zero = LatticeSet::from_points(w, vec![[0, 0, 0]]).unwrap();
        let sum = sumset(&s, &zero, false).unwrap();
        prop_assert_eq!(sum, s);
    }

    #[test]
    fn expanded_sumset_dominates_operands((a, b) in windowed_pair()) {
        let w = a.window();
        prop_assume!(w.contains([0, 0, 0]));
        let mut a0 = a.clone();
        a0.insert([0, 0, 0]).unwrap();
        let mut b0 = b.clone();
        b0.insert([0, 0, 0]).unwrap();
        let sum = sumset(&a0, &b0, true).unwrap();
        prop_assert!(!sum.clipped());
        prop_assert!(sum.cardinality() >= a0.cardinality().max(b0.cardinality()));
        // On the doubled window both operands embed as subsets.
        for p in a0.iter_points().chain(b0.iter_points()) {
            prop_assert!(sum.contains(p));
        }
    }

    #[test]
    fn dilate_zero_and_erode_zero_are_identity(s in windowed_set()) {
        prop_assert_eq!(dilate_cube(&s, 0).unwrap(), s.clone());
        prop_assert_eq!(erode_cube(&s, 0).unwrap(), s.clone());
        prop_assert_eq!(dilate_block(&s, 1).unwrap(), s.clone());
        prop_assert_eq!(erode_block(&s, 1).unwrap(), s.clone());
    }

    #[test]
    fn dilation_is_monotone_in_radius(s in windowed_set(), k in 0i64..=2) {
        prop_assume!(dilate_cube(&s, k + 1).is_ok());
        let smaller = dilate_cube(&s, k).unwrap();
        let larger = dilate_cube(&s, k + 1).unwrap();
        prop_assert!(smaller.is_subset_of(&larger).unwrap());
        let er_larger = erode_cube(&s, k + 1).unwrap();
        let er_smaller = erode_cube(&s, k).unwrap();
        prop_assert!(er_larger.is_subset_of(&er_smaller).unwrap());
    }
}

#[test]
fn sumset_enumeration_matches_naive() {
    // Deterministic cross-check of the shift-or path against direct
    // enumeration on a mixed batch of windows.
    let windows = [
        Window::classical(30).unwrap(),
        Window::centered(12, 1).unwrap(),
        Window::centered(5, 2).unwrap(),
        Window::centered(3, 3).unwrap(),
    ];
    for (i, w) in windows.into_iter().enumerate() {
        let a = LatticeSet::from_predicate(w, |p| {
            (p[0] * 3 + p[1] * 5 + p[2] * 7 + i as i64).rem_euclid(4) == 1
        });
        let b = LatticeSet::from_predicate(w, |p| {
            (p[0] * 2 + p[1] * 9 + p[2] + i as i64).rem_euclid(5) < 2
        });
        let got = sumset(&a, &b, false).unwrap();
        let mut naive = LatticeSet::empty(w);
        for pa in a.iter_points() {
            for pb in b.iter_points() {
                let s = [pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]];
                if w.contains(s) {
                    naive.insert(s).unwrap();
                }
            }
        }
        assert_eq!(got, naive, "window {w}");
    }
}
