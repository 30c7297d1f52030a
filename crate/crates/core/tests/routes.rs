use araki_core::entropy::RouteOptions;
use araki_core::random::{random_entropy_instance, rng_for};
use araki_core::{full_report, kms_polarization, multi_excitation_entropy, FieldVector};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn routes_agree_on_random_instances(seed in any::<u64>(), index in 0u64..1000) {
        let inst = random_entropy_instance(&mut rng_for(seed, index), &[2, 4, 6], (0.1, 5.0));
        let r = full_report(&inst.space, &inst.generator, inst.beta, &inst.field, &RouteOptions::default()).unwrap();
        prop_assert!(r.passed(), "{r:?}");
        prop_assert!(r.araki_analytic >= -1e-12);
    }

    /// `F = B(f)` is self-adjoint unitary, so `F²` is the identity excitation.
    #[test]
    fn repeated_field_is_trivial(seed in any::<u64>()) {
        let inst = random_entropy_instance(&mut rng_for(seed, 0), &[4], (0.5, 2.0));
        let s = kms_polarization(&inst.space, &inst.generator, inst.beta).unwrap();
        let fields: Vec<FieldVector> = vec![inst.field.clone(), inst.field.clone()];
        let m = multi_excitation_entropy(&inst.space, &s, &inst.generator, inst.beta, &fields, &RouteOptions::default()).unwrap();
        prop_assert!(m.analytic.abs() < 1e-9, "{}", m.analytic);
    }
}
