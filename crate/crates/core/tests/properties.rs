use hitset_core::canonical::{canonical_partition, splitting_point, IntInterval};
use hitset_core::geom::{orient, Orientation};
use hitset_core::harness::{gen_instance, run_experiment, GenSpec, Instance, Kind, RunOptions, Selector, Style};
use hitset_core::lattice::{alg0_insert, BottomlessRect, HittingState, LatticeIndex, LatticePoint};
use hitset_core::oracle::{exact_opt, greedy, verify_hitting, Budget, IncidenceMatrix};
use hitset_core::{AffineFrame, Point};
use proptest::prelude::*;

fn exact_sign(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i32 {
    let d = (b.0 - a.0) as i128 * (c.1 - a.1) as i128 - (b.1 - a.1) as i128 * (c.0 - a.0) as i128;
    d.signum() as i32
}

proptest! {
    #[test]
    fn partition_tiles_the_interval(a in 0u64..5000, len in 1u64..5000) {
        let iv = IntInterval::new(a, a + len).unwrap();
        let parts = canonical_partition(iv);
        let mut at = a;
        for p in &parts {
            prop_assert_eq!(p.a(), at);
            prop_assert!(p.len().is_power_of_two() && p.a() % p.len() == 0);
            at = p.b();
        }
        prop_assert_eq!(at, a + len);
        prop_assert!(parts.len() as u32 <= 2 * (64 - len.leading_zeros()));
        if parts.len() > 1 {
            let s = splitting_point(iv).unwrap();
            prop_assert!(s > a && s < a + len);
            let coarse = 1u64 << s.trailing_zeros();
            prop_assert!((a..a + len).all(|x| x == s || x % coarse != 0 || x.trailing_zeros() < s.trailing_zeros()));
        }
    }

    #[test]
    fn orientation_is_exact_on_large_integers(
        a in (-(1i64 << 40)..(1i64 << 40), -(1i64 << 40)..(1i64 << 40)),
        b in (-(1i64 << 40)..(1i64 << 40), -(1i64 << 40)..(1i64 << 40)),
        t in -4i64..4, e in -1i64..=1,
    ) {
        // nearly collinear third point
        let c = (a.0 + t * (b.0 - a.0) + e, a.1 + t * (b.1 - a.1));
        let p = |q: (i64, i64)| Point::new(q.0 as f64, q.1 as f64);
        let got = orient(p(a), p(b), p(c));
        prop_assert_eq!(got.sign(), exact_sign(a, b, c));
        prop_assert_eq!(orient(p(b), p(a), p(c)).sign(), -got.sign());
        prop_assert_eq!(orient(p(b), p(c), p(a)), got);
    }

    #[test]
    fn affine_inverse_round_trips(
        m in prop::array::uniform4(-3.0f64..3.0), tx in -10.0f64..10.0, ty in -10.0f64..10.0,
        x in -50.0f64..50.0, y in -50.0f64..50.0,
    ) {
        let f = AffineFrame::new([[m[0], m[1]], [m[2], m[3]]], Point::new(tx, ty));
        prop_assume!(f.det().abs() > 0.1);
        let back = f.inverse().unwrap().apply(f.apply(Point::new(x, y)));
        prop_assert!(back.dist(Point::new(x, y)) < 1e-8);
    }

    #[test]
    fn lattice_hitter_stays_valid_and_adds_at_most_two(
        pts in prop::collection::btree_set((0u64..64, 0u64..64), 1..40),
        rects in prop::collection::vec((0u64..64, 1u64..64, 1u64..65), 1..60),
    ) {
        let pts: Vec<LatticePoint> = pts.into_iter().map(|(x, y)| LatticePoint::new(x, y)).collect();
        let index = LatticeIndex::new(pts.iter().copied(), 64).unwrap();
        let mut state = HittingState::new();
        let mut seen = Vec::new();
        for (a, w, c) in rects {
            let r = BottomlessRect::new(a, (a + w).min(64).max(a + 1), c).unwrap();
            let Some(obj) = index.rect_to_object(&r) else { continue };
            let added = alg0_insert(&index, &mut state, &obj).unwrap();
            prop_assert!(added.len() <= 2);
            seen.push(obj);
            for o in &seen {
                prop_assert!(state.hits_object(o));
            }
        }
    }

    #[test]
    fn exact_is_no_larger_than_greedy(
        n in 1usize..14,
        rows in prop::collection::vec(prop::collection::vec(0usize..14, 1..5), 1..16),
    ) {
        let rows: Vec<Vec<usize>> = rows.into_iter().map(|r| r.into_iter().map(|p| p % n).collect()).collect();
        let m = IncidenceMatrix::new(n, rows).unwrap();
        let g = greedy(&m);
        let e = exact_opt(&m, Budget::default()).unwrap();
        prop_assert!(verify_hitting(&g, &m).is_ok());
        prop_assert!(verify_hitting(&e, &m).is_ok());
        prop_assert!(e.len() <= g.len());
    }

    #[test]
    fn online_runs_hit_everything(seed in 0u64..1000, style in 0usize..3, kind in 0usize..3) {
        let (kind, cap, sel) = [
            (Kind::Bottomless, 32.0, Selector::Bottomless),
            (Kind::SeparatedDisks, 200.0, Selector::Separated),
            (Kind::Disks, 4.0, Selector::Disks),
        ][kind];
        let mut spec = GenSpec::new(kind, 15, 30, cap, seed);
        spec.style = [Style::Uniform, Style::Clustered, Style::AdversarialNested][style];
        let inst = gen_instance(&spec).unwrap();
        let rep = run_experiment(&inst, sel, RunOptions::default()).unwrap();
        prop_assert_eq!(rep.rows.iter().map(|r| r.points_added).sum::<usize>(), rep.hits.len());
        prop_assert!(rep.opt <= rep.hits.len());
        let back = Instance::from_json(&inst.to_json()).unwrap();
        prop_assert_eq!(back, inst);
    }
}

#[test]
fn collinear_points_are_collinear() {
    let a = Point::new(0.1, 0.1);
    let b = Point::new(0.3, 0.3);
    let c = Point::new(1e17, 1e17);
    assert_eq!(orient(a, b, c), Orientation::Collinear);
}
