use proptest::prelude::*;

use qrt_core::model::State;
use qrt_core::preorder::preorder_matrix;
use qrt_core::rates::{ExtRational, RateConfig, RateEngine, Replication};
use qrt_core::synth::random_instance;

fn doubled(s: &State) -> State {
    let t = s.as_tuple().expect("discrete");
    State::Discrete([t, t].concat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn one_shot_conversions_bound_rates_below(seed in any::<u64>()) {
        let q = random_instance(seed);
        let engine = RateEngine::new(&q, RateConfig::default()).unwrap();
        let rel = preorder_matrix(&q, 1).unwrap();
        for i in 0..rel.len() {
            for j in 0..rel.len() {
                let r = engine.rate_value(&rel.roster[i].state, &rel.roster[j].state).unwrap();
                if rel.reaches[i][j] {
                    prop_assert!(r >= ExtRational::one(), "r({} → {}) = {r}", rel.roster[i].label, rel.roster[j].label);
                }
            }
        }
    }

    #[test]
    fn witnesses_replay(seed in any::<u64>()) {
        let q = random_instance(seed);
        let mut engine = RateEngine::new(&q, RateConfig::default()).unwrap();
        let roster = q.roster(1);
        for a in &roster {
            for b in &roster {
                let est = engine.estimate(&a.state, &b.state).unwrap();
                for w in &est.witnesses {
                    if !engine.can_replay(&w.plan) {
                        continue;
                    }
                    prop_assert!(engine.witness_replays(w, &a.state, &b.state).unwrap());
                }
            }
        }
    }

    #[test]
    fn rates_ignore_how_copies_are_grouped(seed in any::<u64>()) {
        let q = random_instance(seed);
        let engine = RateEngine::new(&q, RateConfig::default()).unwrap();
        let roster = q.roster(1);
        for a in &roster {
            for b in &roster {
                let single = engine.rate_value(&a.state, &b.state).unwrap();
                let double = engine.rate_value(&doubled(&a.state), &doubled(&b.state)).unwrap();
                prop_assert_eq!(single, double);
            }
        }
    }

    #[test]
    fn replication_is_unit_or_unbounded(seed in any::<u64>()) {
        let q = random_instance(seed);
        let mut engine = RateEngine::new(&q, RateConfig::default()).unwrap();
        for level in 1..=q.max_level {
            for s in q.roster(level) {
                let rep = engine.replication(&s.state).unwrap();
                let self_rate = engine.rate_value(&s.state, &s.state).unwrap();
                match rep.verdict {
                    Replication::Infinite => {
                        prop_assert!(self_rate.is_infinite());
                        let w = rep.witness.as_ref().unwrap();
                        prop_assert!(w.m > w.n);
                    }
                    Replication::Unit => prop_assert_eq!(self_rate, ExtRational::one()),
                    Replication::Unknown => prop_assert!(false, "discrete instances decide replication"),
                }
                if rep.is_free {
                    prop_assert_eq!(rep.verdict, Replication::Infinite);
                }
            }
        }
    }
}
