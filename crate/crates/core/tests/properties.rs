use proptest::prelude::*;

use hypermass::ads::AdsProfile;
use hypermass::corpus::smooth_profiles;
use hypermass::flat::HBall;
use hypermass::hyperbolic::{Dimension, ScaleKappa};
use hypermass::mass::{mass_boundary_limit, mass_level_set, mass_level_set_with, mass_scaling_check, pmt_check, MassTolerances};
use hypermass::profile::boundary_value;
use hypermass::registry::{build_profile, ProfileDocument};
use hypermass::stability::volume_function;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn ads_mass_is_reproduced(n in 3usize..7, m in 0.05f64..20.0) {
        let f = AdsProfile::shared(Dimension::new(n).unwrap(), m).unwrap();
        let got = mass_boundary_limit(f.as_ref(), ScaleKappa::ONE).unwrap().value;
        prop_assert!((got - m).abs() <= 1e-7 * m, "n={n} m={m} got {got}");
    }

    #[test]
    fn level_set_identity_at_any_regular_height(n in 3usize..6, m in 0.1f64..5.0, t in 0.05f64..0.95) {
        let f = AdsProfile::shared(Dimension::new(n).unwrap(), m).unwrap();
        let h = boundary_value(f.as_ref()) + t * (f.h_max() - boundary_value(f.as_ref()));
        let rep = mass_level_set(f.as_ref(), ScaleKappa::ONE, h).unwrap();
        prop_assert!(rep.identity_holds(), "residual {}", rep.residual_identity);
    }

    #[test]
    fn mass_scales_with_kappa(n in 3usize..6, m in 0.1f64..5.0, kappa in 0.2f64..5.0) {
        let f = AdsProfile::shared(Dimension::new(n).unwrap(), m).unwrap();
        let h0 = 0.5 * (boundary_value(f.as_ref()) + f.h_max());
        let rep = mass_scaling_check(&f, h0, ScaleKappa::new(kappa).unwrap()).unwrap();
        prop_assert!(rep.relative_error < 1e-6, "{rep:?}");
    }

    #[test]
    fn ads_mass_dominates_level_set_boundary_term(n in 3usize..6, m in 0.1f64..5.0, t in 0.05f64..0.95) {
        let f = AdsProfile::shared(Dimension::new(n).unwrap(), m).unwrap();
        let h = boundary_value(f.as_ref()) + t * (f.h_max() - boundary_value(f.as_ref()));
        let rep = pmt_check(f.as_ref(), ScaleKappa::ONE, h, 1e-8).unwrap();
        prop_assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn level_set_identity_on_seeded_profiles(seed in any::<u64>(), t in 0.1f64..0.9) {
        // supercritical decay rates give zero mass; the ladder needs more rungs to reach it
        let tol = MassTolerances { ladder_rungs: 10, ..MassTolerances::default() };
        for f in smooth_profiles(seed, 3) {
            let h = boundary_value(f.as_ref()) + t * (f.h_max() - boundary_value(f.as_ref()));
            let rep = mass_level_set_with(f.as_ref(), ScaleKappa::ONE, h, &tol).unwrap();
            prop_assert!(rep.identity_holds(), "{f:?}: residual {}", rep.residual_identity);
        }
    }

    #[test]
    fn volume_function_increases_with_height(m in 0.1f64..5.0, a in 0.05f64..0.9, gap in 0.01f64..0.09) {
        let f = AdsProfile::shared(Dimension::new(3).unwrap(), m).unwrap();
        let low = boundary_value(f.as_ref());
        let span = f.h_max() - low;
        let v1 = volume_function(f.as_ref(), ScaleKappa::ONE, low + a * span).unwrap();
        let v2 = volume_function(f.as_ref(), ScaleKappa::ONE, low + (a + gap) * span).unwrap();
        prop_assert!(v2 > v1, "{v1} !< {v2}");
    }

    #[test]
    fn profile_documents_round_trip(n in 3usize..8, m in 0.01f64..50.0, r in 0.0f64..10.0) {
        let doc = ProfileDocument::ads(n, m);
        let back = ProfileDocument::from_json(&doc.to_json()).unwrap();
        prop_assert_eq!(&back, &doc);
        let (f, g) = (build_profile(&doc).unwrap(), build_profile(&back).unwrap());
        let x = f.domain_start() + r;
        prop_assert_eq!(f.value(x), g.value(x));
    }

    #[test]
    fn hball_slice_radius_inverts_half_height(rho in 0.5f64..20.0, t in 0.0f64..0.999) {
        let ball = HBall::new(rho).unwrap();
        let s = t * ball.half_height(0.0).unwrap();
        let r = ball.slice_radius(s).unwrap();
        let back = ball.half_height(r).unwrap();
        prop_assert!((back - s).abs() <= 1e-9 * rho.max(1.0), "s={s} r={r} back={back}");
    }
}
