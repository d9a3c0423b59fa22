use proptest::prelude::*;

use qrt_core::measures::ResourceContext;
use qrt_core::rates::RateConfig;
use qrt_core::synth::random_instance;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// On levels with at least one non-free state, free states cost nothing
    /// and distill nothing, and distillation never beats cost unless the
    /// state replicates catalytically.
    #[test]
    fn distillation_stays_below_cost(seed in any::<u64>()) {
        let q = random_instance(seed);
        let mut ctx = ResourceContext::new(&q, RateConfig::default()).unwrap();
        let levels: Vec<usize> = ctx.levels.keys().copied().collect();
        for level in levels {
            let data = &ctx.levels[&level];
            if data.free.len() == data.relation.len() {
                continue;
            }
            for r in data.relation.roster.clone() {
                let rd = ctx.distillable_resource(&r.state).unwrap();
                let rc = ctx.resource_cost(&r.state).unwrap();
                if ctx.is_free(&r.state).unwrap() {
                    prop_assert!(rd.units.is_zero() && rc.units.is_zero(), "{}: {rd} / {rc}", r.label);
                }
                let catalytic = ctx.engine.replication(&r.state).unwrap().catalytically_replicable();
                if !catalytic {
                    prop_assert!(rd.units <= rc.units, "{}: R_D = {rd}, R_C = {rc}", r.label);
                }
            }
        }
    }
}
