use proptest::prelude::*;
use srcnoise_core::keyrate::{holevo_bound, key_rate};
use srcnoise_core::{ChannelParams, ModelKind, Reconciliation, SourceParams};

const RECONS: [Reconciliation; 2] = [Reconciliation::Reverse, Reconciliation::Direct];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn holevo_nonnegative_and_nondecreasing_in_eps(t in 0.02..1.0f64, eps in 0.0..0.2f64, d in 1e-3..0.1f64) {
        let src = SourceParams::from_excess_noise(20.0, 0.9, 0.1).unwrap();
        let lo = ChannelParams::from_excess_noise(t, eps).unwrap();
        let hi = ChannelParams::from_excess_noise(t, eps + d).unwrap();
        for kind in ModelKind::ALL {
            for recon in RECONS {
                let a = holevo_bound(kind, recon, &src, &lo).unwrap();
                let b = holevo_bound(kind, recon, &src, &hi).unwrap();
                prop_assert!(a >= -1e-12);
                prop_assert!(b >= a - 1e-9, "{kind} {recon}: {a} -> {b}");
            }
        }
    }

    #[test]
    fn untrusted_never_beats_neutral_party(t in 0.02..1.0f64, eps_a in 0.0..0.5f64, t_a in 0.5..0.99f64) {
        let src = SourceParams::from_excess_noise(20.0, t_a, eps_a).unwrap();
        let ch = ChannelParams::from_excess_noise(t, 0.04).unwrap();
        for recon in RECONS {
            let np = key_rate(ModelKind::NeutralParty, recon, &src, &ch, 1.0).unwrap().key_rate;
            let un = key_rate(ModelKind::UntrustedSource, recon, &src, &ch, 1.0).unwrap().key_rate;
            prop_assert!(un <= np + 1e-9, "{recon}: un {un} np {np}");
        }
    }

    #[test]
    fn noiseless_source_models_agree(v in 1.5..50.0f64, t in 0.05..1.0f64, eps in 0.0..0.1f64) {
        let src = SourceParams::new(v, 1.0, 0.0).unwrap();
        let ch = ChannelParams::from_excess_noise(t, eps).unwrap();
        for recon in RECONS {
            let np = key_rate(ModelKind::NeutralParty, recon, &src, &ch, 1.0).unwrap().key_rate;
            let un = key_rate(ModelKind::UntrustedSource, recon, &src, &ch, 1.0).unwrap().key_rate;
            prop_assert!((np - un).abs() <= 1e-9);
        }
    }
}
