use num_rational::Ratio;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use staircase::circle_map::BranchPolicy;
use staircase::election::{run, Method, TieBreak};
use staircase::rotation::{RotationNumber, RotationOptions};
use staircase::two_party::{
    derive_map, predicted_pb, predicted_seats, region_pb, staircase, PbTarget, TwoPartyVotes,
};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(3),
        ..ProptestConfig::default()
    }
}

/// `(α, β, γ)` with `α > β > 0` and `γ > 0`.
fn interior() -> impl Strategy<Value = TwoPartyVotes> {
    (0.02f64..0.95, 0.02f64..0.95, 0.05f64..0.95).prop_filter_map(
        "need alpha > beta",
        |(x, y, g)| {
            let (hi, lo) = if x > y { (x, y) } else { (y, x) };
            let s = hi + lo + g;
            let v = TwoPartyVotes::from_ab(hi / s, lo / s).ok()?;
            (v.alpha > v.beta * 1.0001).then_some(v)
        },
    )
}

fn simulate_nb(v: &TwoPartyVotes, n: usize) -> (u64, bool) {
    let s = run(
        Method::PhragmenPower,
        &v.to_profile().unwrap(),
        n,
        TieBreak::LowestIndex,
    )
    .unwrap();
    (s.counts(n)[1], s.any_tie())
}

#[test]
fn map_parameters_match_exact_arithmetic() {
    for (an, bn) in [(4, 3), (6, 2), (11, 7), (9, 1), (13, 5), (7, 3)] {
        let (al, be) = (Ratio::new(an as i64, 20), Ratio::new(bn as i64, 20));
        let one = Ratio::from_integer(1);
        let d = (one - al) * (one - be);
        let a = al * be / d;
        let b_raw = (al - be) / be + al * (one - al - be) / d;
        assert_eq!(a + b_raw, al / (be * (one - be)) - one);
        let v = TwoPartyVotes::from_ab(an as f64 / 20.0, bn as f64 / 20.0).unwrap();
        let m = derive_map(&v).unwrap();
        assert!((m.a - a.to_f64().unwrap()).abs() < 1e-14);
        assert!((m.b_raw - b_raw.to_f64().unwrap()).abs() < 1e-13);
        assert_eq!(m.b0, b_raw.floor().to_integer());
        assert_eq!(m.ell, (al / be).floor().to_integer());
    }
}

#[test]
fn integer_ratio_profile_matches_long_simulation() {
    let v = TwoPartyVotes::new(0.6, 0.2, 0.2).unwrap();
    let n = 1_000_000;
    let (nb, _) = simulate_nb(&v, n);
    let p = predicted_pb(&v).unwrap();
    assert!((nb as f64 / n as f64 - p.pb.mid()).abs() < 1e-4);
    let s = predicted_seats(&v, 10_000, BranchPolicy::AlwaysLower).unwrap();
    let e = run(
        Method::PhragmenPower,
        &v.to_profile().unwrap(),
        10_000,
        TieBreak::LowestIndex,
    )
    .unwrap();
    assert_eq!(s.winners, e.winners);
}

#[test]
fn half_region_boundary_in_terms_of_ab_votes() {
    for k in 1..20 {
        let g = k as f64 / 20.0;
        let r = (1.0 + 8.0 * g).sqrt();
        let (lo, hi) = ((3.0 - r) / 4.0, (1.0 - 4.0 * g + r) / 4.0);
        for j in 1..200 {
            let al = j as f64 / 200.0 * (1.0 - g);
            let v = TwoPartyVotes::new(al, 1.0 - g - al, g).unwrap();
            let margin = (al - lo).abs().min((al - hi).abs());
            if margin > 1e-9 {
                assert_eq!(
                    region_pb(&v, PbTarget::Half),
                    lo <= al && al <= hi,
                    "gamma {g}, alpha {al}"
                );
            }
        }
    }
}

#[test]
fn rational_votes_give_certified_rational_rotation() {
    let mut checked = 0;
    for an in 1..20 {
        for bn in 1..an {
            if an + bn >= 20 {
                continue;
            }
            let v = TwoPartyVotes::from_ab(an as f64 / 20.0, bn as f64 / 20.0).unwrap();
            let p = predicted_pb(&v).unwrap();
            let rho = p.rho.unwrap();
            assert!(
                matches!(rho, RotationNumber::Rational { .. }),
                "{an}/20, {bn}/20: {rho:?}"
            );
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn staircase_structure() {
    let grid: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
    let rows = staircase(&grid, &grid, RotationOptions::default()).unwrap();
    let at = |a: f64, b: f64| rows.iter().find(|r| r.alpha == a && r.beta == b).unwrap();
    for r in &rows {
        let Some(p) = r.prediction else {
            assert_eq!((r.alpha, r.beta), (0.0, 0.0));
            continue;
        };
        if r.beta == 0.0 && r.alpha > 0.0 {
            assert_eq!(p.pb.mid(), 0.0);
        }
        let mirror = at(r.beta, r.alpha).prediction.unwrap();
        assert!((p.pb.mid() + mirror.pb.mid() - 1.0).abs() < 1e-12);
        let v = TwoPartyVotes::from_ab(r.alpha, r.beta).unwrap();
        if p.pb.is_exact() && r.alpha + r.beta > 0.0 {
            assert_eq!(
                region_pb(&v, PbTarget::Half),
                p.pb.mid() == 0.5,
                "{} {}",
                r.alpha,
                r.beta
            );
        }
    }
    // Along a slice of fixed beta, p_B = 1/2 holds on an interval of alpha.
    for b in &grid[1..10] {
        let halves: Vec<f64> = rows
            .iter()
            .filter(|r| r.beta == *b && r.prediction.is_some_and(|p| p.pb.mid() == 0.5))
            .map(|r| r.alpha)
            .collect();
        if let (Some(first), Some(last)) = (halves.first(), halves.last()) {
            let inside = rows
                .iter()
                .filter(|r| r.beta == *b && r.alpha >= *first && r.alpha <= *last)
                .count();
            assert_eq!(inside, halves.len());
        }
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn prediction_tracks_simulation(v in interior()) {
        let p = predicted_pb(&v).unwrap();
        let rho = p.rho.unwrap();
        prop_assume!(rho.is_certain());
        let n = 20_000;
        let (nb, tie) = simulate_nb(&v, n);
        prop_assume!(!tie);
        let err = (nb as f64 - p.pb.mid() * n as f64).abs() - 0.5 * p.pb.width() * n as f64;
        prop_assert!(err <= 50.0, "{:?}: n_B = {}, predicted {:?}", v, nb, p.pb);
    }

    #[test]
    fn predicted_seats_equal_the_engine(v in interior()) {
        let n = 5_000;
        let e = run(Method::PhragmenPower, &v.to_profile().unwrap(), n, TieBreak::LowestIndex).unwrap();
        prop_assume!(!e.any_tie());
        let s = predicted_seats(&v, n, BranchPolicy::AlwaysLower).unwrap();
        prop_assert_eq!(s.winners, e.winners);
    }

    #[test]
    fn swapping_parties_complements_the_share(v in interior()) {
        let (p, q) = (predicted_pb(&v).unwrap(), predicted_pb(&v.swapped()).unwrap());
        prop_assert!((p.pb.mid() + q.pb.mid() - 1.0).abs() < 1e-12);
        prop_assert!(q.swapped);
    }

    #[test]
    fn closed_form_regions_agree_with_the_limit(v in interior()) {
        let p = predicted_pb(&v).unwrap();
        prop_assume!(p.rho.unwrap().is_certain());
        if let Some(r) = p.pb_ratio {
            prop_assert_eq!(region_pb(&v, PbTarget::Half), (r.p, r.q) == (1, 2));
            prop_assert_eq!(region_pb(&v, PbTarget::Third), (r.p, r.q) == (1, 3));
        }
    }

    #[test]
    fn rational_limits_give_periodic_seats(v in interior()) {
        let p = predicted_pb(&v).unwrap();
        let Some(RotationNumber::Rational { ratio, boundary_uncertain: false, .. }) = p.rho else {
            return Ok(());
        };
        let b0 = p.b0.unwrap() as u64;
        let period = (ratio.q * (2 + b0) + ratio.p) as usize;
        let n = (10 * ratio.q * (b0 + 2)) as usize;
        let n = n.max(4 * period);
        let e = run(Method::PhragmenPower, &v.to_profile().unwrap(), n, TieBreak::LowestIndex).unwrap();
        prop_assume!(!e.any_tie());
        for i in n / 2..n - period {
            prop_assert_eq!(e.winners[i], e.winners[i + period], "seat {} of {}", i, n);
        }
    }
}
