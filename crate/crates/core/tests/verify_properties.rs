use proptest::prelude::*;
use srcnoise_core::gaussian::{condition_on_heterodyne, von_neumann_entropy};
use srcnoise_core::models::build_gamma_prime_fab;
use srcnoise_core::verify::{eb_pm_equivalence_check, gamma_b_af_of_w, lemma_suite, w_monotonicity_check, Status};
use srcnoise_core::{ChannelParams, ModePartition, SourceParams};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn eb_pm_equivalence_holds(v in 1.0..100.0f64, t_a in 0.5..1.5f64, frac in 0.0..1.0f64) {
        // chi_A >= 0 needs eps_A >= T_A - 1.
        let lo = (t_a - 1.0).max(0.0);
        let eps_a = lo + frac * (1.0 - lo);
        let src = SourceParams::from_excess_noise(v, t_a, eps_a).unwrap();
        let report = eb_pm_equivalence_check(&src).unwrap();
        prop_assert!(report.passed(), "{report}");
        prop_assert_eq!(report.count(Status::Pass), 3);
    }

    #[test]
    fn w_half_matches_neutral_party_heterodyne(t in 0.05..1.0f64, eps in 0.0..0.2f64, eps_a in 0.0..0.5f64) {
        let src = SourceParams::from_excess_noise(20.0, 0.9, eps_a).unwrap();
        let ch = ChannelParams::from_excess_noise(t, eps).unwrap();
        let fab = build_gamma_prime_fab(&src, &ch).unwrap();
        let ab = fab.reduced(&[1, 2]).unwrap();
        let direct = condition_on_heterodyne(&ab, &ModePartition::new(vec![1], vec![0]).unwrap()).unwrap();
        let via_w = gamma_b_af_of_w(&src, &ch, 0.5).unwrap();
        prop_assert!(direct.max_abs_diff(&via_w) <= 1e-10, "{direct} vs {via_w}");
    }

    #[test]
    fn w_entropy_minimised_at_half(t in 0.05..1.0f64, eps_a in 0.0..0.5f64) {
        let src = SourceParams::from_excess_noise(20.0, 0.9, eps_a).unwrap();
        let ch = ChannelParams::from_excess_noise(t, 0.04).unwrap();
        let report = w_monotonicity_check(&src, &ch, 99).unwrap();
        prop_assert!(report.passed(), "{report}");
        let at_half = von_neumann_entropy(&gamma_b_af_of_w(&src, &ch, 0.5).unwrap()).unwrap();
        for w in [0.2, 0.4, 0.6, 0.8] {
            prop_assert!(von_neumann_entropy(&gamma_b_af_of_w(&src, &ch, w).unwrap()).unwrap() >= at_half - 1e-10);
        }
    }
}

#[test]
fn lossless_point_rr_deviation() {
    let src = SourceParams::from_excess_noise(20.0, 0.9, 0.1).unwrap();
    let report = lemma_suite(&src, 0.0, &[1.0]).unwrap();
    assert!(report.passed(), "{report}");
    assert!(report.max_deviation("rr-holevo-equality").unwrap() <= 1e-8);
}

#[test]
fn lemma_grid_attenuation_and_feasible_amplification() {
    let grid: Vec<f64> = (1..=20).map(|k| k as f64 * 0.05).collect();
    for (t_a, eps_a) in [(0.9, 0.1), (0.5, 0.3), (1.1, 0.3), (1.3, 0.8)] {
        let src = SourceParams::from_excess_noise(20.0, t_a, eps_a).unwrap();
        let report = lemma_suite(&src, 0.04, &grid).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.count(Status::Skipped), 0, "T_A={t_a}");
        assert!(report.warnings.is_empty());
    }
}
