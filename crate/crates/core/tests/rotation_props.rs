use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use staircase::circle_map::{orbit, BranchPolicy, MapParams};
use staircase::fraction::{farey, Fraction};
use staircase::rotation::{
    b_lower, b_upper, periodic_orbit_for, phi_rho, plateau_sweep, psi, psi_right, rotation_number,
    rotation_number_orbit_estimate, symbol_frequency_check, RotationNumber, RotationOptions,
};

const TOL: f64 = 1e-13;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        rng_seed: RngSeed::Fixed(11),
        ..ProptestConfig::default()
    }
}

fn fractions(q_max: u64) -> impl Strategy<Value = Fraction> {
    let all = farey(q_max);
    (0..all.len()).prop_map(move |i| all[i])
}

/// `(1-a)² Σ_j a^j c_{j+1} + extra` summed in exact rationals, with a certified tail.
fn series_oracle(a_num: i64, a_den: i64, rho: Fraction, upper: bool) -> (f64, f64) {
    let a = BigRational::new(a_num.into(), a_den.into());
    let one = BigRational::one();
    let (p, q) = (rho.p as i64, rho.q as i64);
    let mut sum = BigRational::zero();
    let mut pow = one.clone();
    let terms = 600;
    for j in 0..terms {
        let n = (j + 1) * p;
        let c = if upper {
            n.div_euclid(q)
        } else {
            (n + q - 1).div_euclid(q)
        };
        sum += &pow * BigRational::from_integer(c.into());
        pow *= &a;
    }
    let w = &one - &a;
    let mut v = &w * &w * sum;
    if upper {
        v += &w;
    }
    let af = a_num as f64 / a_den as f64;
    // Remaining terms are at most a^m ((m + 2)(1 - a) + a).
    let tail = af.powi(terms as i32) * ((terms as f64 + 2.0) * (1.0 - af) + af);
    (v.to_f64().unwrap(), tail)
}

#[test]
fn series_match_exact_oracle() {
    for (n, d) in [(1, 2), (3, 4), (1, 3), (9, 10)] {
        for rho in farey(9) {
            let a = n as f64 / d as f64;
            let (lo, t1) = series_oracle(n, d, rho, false);
            let (hi, t2) = series_oracle(n, d, rho, true);
            let bl = b_lower(a, rho, TOL).unwrap();
            let bu = b_upper(a, rho, TOL).unwrap();
            assert!(
                (bl.mid() - lo).abs() <= 1e-12 + t1,
                "{a} {rho}: {bl:?} vs {lo}"
            );
            assert!(
                (bu.mid() - hi).abs() <= 1e-12 + t2,
                "{a} {rho}: {bu:?} vs {hi}"
            );
        }
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn psi_is_decreasing_in_rho(a in 0.1f64..0.9, b in 0.0f64..1.0, r1 in fractions(12), r2 in fractions(12)) {
        prop_assume!(r1.value() < r2.value());
        let p1 = psi(a, b, r1, TOL).unwrap();
        let p2 = psi(a, b, r2, TOL).unwrap();
        prop_assert!(p1.lo > p2.hi, "{:?} vs {:?}", p1, p2);
    }

    #[test]
    fn plateau_upper_end_is_right_limit_of_lower_end(a in 0.1f64..0.9, r in fractions(10)) {
        let right = b_lower(a, r.value() + 1e-7, TOL).unwrap();
        let up = b_upper(a, r, TOL).unwrap();
        prop_assert!((right.mid() - up.mid()).abs() < 1e-9);
    }

    #[test]
    fn certified_rho_respects_bounds_and_orbits(a in 0.1f64..0.9, b in 0.0f64..1.0) {
        let p = MapParams::new(a, b).unwrap();
        let rot = rotation_number(&p, RotationOptions::default()).unwrap();
        let iv = rot.interval();
        prop_assert!(iv.hi >= a + b - 1.0 - 1e-12 && iv.lo <= b + 1e-12);
        if let RotationNumber::Rational { ratio, .. } = rot {
            let est = rotation_number_orbit_estimate(&p, 10_000).unwrap();
            prop_assert!(est.lo <= ratio.value() && ratio.value() <= est.hi, "{} not in {:?}", ratio, est);
        }
    }

    #[test]
    fn rotation_number_is_monotone_in_b(a in 0.1f64..0.9, b1 in 0.0f64..1.0, b2 in 0.0f64..1.0) {
        let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        let r1 = rotation_number(&MapParams::new(a, lo).unwrap(), RotationOptions::default()).unwrap();
        let r2 = rotation_number(&MapParams::new(a, hi).unwrap(), RotationOptions::default()).unwrap();
        prop_assert!(r1.interval().lo <= r2.interval().hi + 1e-12);
    }

    #[test]
    fn periodic_orbit_extremes(a in 0.1f64..0.9, b in 0.0f64..1.0) {
        let p = MapParams::new(a, b).unwrap();
        let rot = rotation_number(&p, RotationOptions::default()).unwrap();
        prop_assume!(rot.is_certain());
        if let Some(info) = periodic_orbit_for(&p, &rot).unwrap() {
            let r = Fraction::new(info.p, info.q).unwrap();
            prop_assert_eq!(info.points.len() as u64, info.q);
            let lo = psi(a, b, r, TOL).unwrap().mid();
            let hi = 1.0 + psi_right(a, b, r, TOL).unwrap().mid();
            prop_assert!((info.points[0] - lo).abs() < 1e-9);
            prop_assert!((info.points[info.points.len() - 1] - hi).abs() < 1e-9);
            prop_assert!(info.return_error < 1e-9);
        }
    }

    #[test]
    fn conjugacy_to_the_rotation(a in 0.1f64..0.9, b in 0.0f64..1.0) {
        let p = MapParams::new(a, b).unwrap();
        let rot = rotation_number(&p, RotationOptions::default()).unwrap();
        let Some(r) = rot.as_rational() else { return Ok(()) };
        prop_assume!(rot.is_certain());
        let (s0, s1) = (psi(a, b, r, TOL).unwrap(), psi_right(a, b, r, TOL).unwrap());
        prop_assume!(s1.hi < 0.0 && s0.lo >= 0.0);
        for k in 0..37 {
            // Offset keeps x and x + ρ off the jump points k/q.
            let x = (k as f64 + 0.3125) / 37.0;
            let fx = phi_rho(a, b, r, x, TOL).unwrap().mid();
            let shifted = phi_rho(a, b, r, x + r.value(), TOL).unwrap().mid();
            let lhs = p.step_lower(fx.rem_euclid(1.0));
            let d = (lhs - shifted).rem_euclid(1.0);
            prop_assert!(d.min(1.0 - d) < 1e-9, "x = {}", x);
        }
    }

    #[test]
    fn symbol_counts_track_rho(a in 0.1f64..0.9, b in 0.0f64..1.0, x0 in 0.0f64..1.0) {
        let p = MapParams::new(a, b).unwrap();
        let rot = rotation_number(&p, RotationOptions::default()).unwrap();
        let o = orbit(&p, x0, 20_000, BranchPolicy::AlwaysLower).unwrap();
        let (_, dev) = symbol_frequency_check(&o, rot.midpoint()).unwrap();
        let slack = rot.interval().width() * 20_000.0;
        prop_assert!(dev <= 4.0 + slack, "deviation {}", dev);
    }
}

#[test]
fn plateau_sums_approach_one() {
    for (a, q) in [(0.5, 60), (0.7, 120)] {
        let s = plateau_sweep(a, q).unwrap();
        assert!(
            s.total_length >= 1.0 - s.tail_bound - 1e-12,
            "{a}: {} (tail {})",
            s.total_length,
            s.tail_bound
        );
        assert!(s.total_length <= 1.0 + 1e-12);
    }
}
