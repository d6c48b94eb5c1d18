use proptest::prelude::*;
use staircase::circle_map::{orbit, Branch, BranchPolicy, MapParams};

fn circ(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn params() -> impl Strategy<Value = MapParams> {
    (0.05f64..0.95, 0.0f64..0.999).prop_map(|(a, b)| MapParams::new(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, rng_seed: proptest::test_runner::RngSeed::Fixed(7), ..ProptestConfig::default() })]

    #[test]
    fn branches_agree_off_the_discontinuity(p in params(), x in 0.0f64..=1.0) {
        let (lo, up) = (p.step_lower(x), p.step_upper(x));
        if p.at_discontinuity(x) {
            prop_assert_eq!((lo, up), (0.0, 1.0));
        } else {
            prop_assert_eq!(lo, up);
            prop_assert!((0.0..1.0).contains(&lo));
        }
    }

    #[test]
    fn lifts_are_increasing(p in params(), x in -3.0f64..3.0, d in 1e-9f64..2.0) {
        let y = x + d;
        prop_assert!(p.lift_lower(x) < p.lift_lower(y));
        prop_assert!(p.lift_upper(x) < p.lift_upper(y));
    }

    #[test]
    fn lifts_commute_with_integer_shifts(p in params(), x in -3.0f64..3.0) {
        prop_assert!((p.lift_lower(x + 1.0) - p.lift_lower(x) - 1.0).abs() < 1e-12);
        prop_assert!((p.lift_upper(x + 1.0) - p.lift_upper(x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lift_projects_to_the_map(p in params(), x in 0.0f64..1.0) {
        let o = orbit(&p, x, 50, BranchPolicy::AlwaysLower).unwrap();
        let mut lifted = x;
        for n in 1..=50 {
            lifted = p.lift_lower(lifted);
            prop_assert!(circ(lifted, o.points[n]) < 1e-9, "n = {}", n);
        }
    }

    #[test]
    fn symbols_reconstruct_the_orbit(p in params(), x in 0.0f64..=1.0, seed in 0u64..1000) {
        let o = orbit(&p, x, 200, BranchPolicy::SeededRandom(seed)).unwrap();
        let visits: Vec<usize> = o.choices_at_tau.iter().map(|c| c.0).collect();
        for i in 0..200 {
            let rebuilt = p.a * o.points[i] + p.b - o.symbols[i] as f64;
            let tol = if visits.contains(&i) { p.a * p.tau_eps } else { 4.0 * f64::EPSILON };
            prop_assert!((rebuilt - o.points[i + 1]).abs() <= tol);
            prop_assert!(o.symbols[i] == 0 || o.symbols[i] == 1 || (o.symbols[i] == -1 && p.b == 0.0));
        }
    }

    #[test]
    fn inverse_undoes_both_branches(p in params(), x in 0.0f64..=1.0) {
        prop_assume!(p.a + p.b > 1.0);
        for branch in [Branch::Lower, Branch::Upper] {
            let y = p.step(x, branch);
            let back = p.inverse(y).unwrap().expect("images have preimages");
            prop_assert!((back - x).abs() < 1e-11, "{:?}: {} -> {} -> {}", branch, x, y, back);
        }
    }

    #[test]
    fn reflection_conjugates_the_branches(p in params(), x in 0.0f64..=1.0) {
        let r = p.reflect();
        let lhs = 1.0 - p.step_upper(1.0 - x);
        prop_assert!(circ(lhs, r.step_lower(x)) < 1e-12);
        if p.a + p.b > 1.0 {
            prop_assert!((r.reflect().b - p.b).abs() < 1e-12);
        }
    }
}

#[test]
fn upper_orbit_of_one() {
    let p = MapParams::new(0.5, 2.0 / 3.0).unwrap();
    let o = orbit(&p, 1.0, 4, BranchPolicy::AlwaysLower).unwrap();
    let want = [1.0, 1.0 / 6.0, 0.75, 1.0 / 24.0, 11.0 / 16.0];
    for (x, w) in o.points.iter().zip(want) {
        assert!((x - w).abs() < 1e-15);
    }
}
