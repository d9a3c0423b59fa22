use proptest::prelude::*;

use qrt_core::model::{free_states, State};
use qrt_core::preorder::{equivalence_classes, maximal_set, minimal_set, preorder_matrix};
use qrt_core::synth::random_instance;

fn tuple(s: &State) -> Vec<u8> {
    s.as_tuple().expect("discrete").to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relation_is_a_preorder_with_replayable_witnesses(seed in any::<u64>()) {
        let q = random_instance(seed);
        for level in 1..=q.max_level {
            let rel = preorder_matrix(&q, level).unwrap();
            prop_assert!(rel.is_reflexive());
            prop_assert_eq!(rel.transitivity_violation(), None);
            prop_assert_eq!(rel.witness_failure(&q).unwrap(), None);
        }
    }

    #[test]
    fn every_state_reaches_every_free_state(seed in any::<u64>()) {
        let q = random_instance(seed);
        for level in 1..=q.max_level {
            let rel = preorder_matrix(&q, level).unwrap();
            let free = free_states(&q, level).unwrap();
            for f in &free.states {
                let j = rel.index_of(&f.label).unwrap();
                prop_assert!((0..rel.len()).all(|i| rel.reaches[i][j]), "{} is not below everything", f.label);
            }
            let minimal = minimal_set(&rel);
            if !free.is_empty() {
                prop_assert!(free.states.iter().all(|f| minimal.contains(&rel.index_of(&f.label).unwrap())));
            }
        }
    }

    #[test]
    fn products_of_free_states_are_free(seed in any::<u64>()) {
        let q = random_instance(seed);
        let singles = free_states(&q, 1).unwrap();
        let pairs = free_states(&q, 2).unwrap();
        for a in &singles.states {
            for b in &singles.states {
                let ab = State::Discrete([tuple(&a.state), tuple(&b.state)].concat());
                prop_assert!(pairs.contains(&ab), "{}{} missing", a.label, b.label);
            }
        }
    }

    #[test]
    fn conversions_combine_factorwise(seed in any::<u64>()) {
        let q = random_instance(seed);
        let one = preorder_matrix(&q, 1).unwrap();
        let two = preorder_matrix(&q, 2).unwrap();
        let n = one.len();
        for (a, b) in (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| one.reaches[a][b]) {
            for (c, d) in (0..n).flat_map(|c| (0..n).map(move |d| (c, d))).filter(|&(c, d)| one.reaches[c][d]) {
                let from = two.index_of(&format!("{}{}", one.roster[a].label, one.roster[c].label)).unwrap();
                let to = two.index_of(&format!("{}{}", one.roster[b].label, one.roster[d].label)).unwrap();
                prop_assert!(two.reaches[from][to]);
            }
        }
    }

    #[test]
    fn maximal_classes_are_nonempty_and_top(seed in any::<u64>()) {
        let q = random_instance(seed);
        for level in 1..=q.max_level {
            let rel = preorder_matrix(&q, level).unwrap();
            let quotient = equivalence_classes(&rel);
            let g = maximal_set(&rel);
            prop_assert!(!g.members.is_empty());
            prop_assert_eq!(quotient.classes.iter().map(Vec::len).sum::<usize>(), rel.len());
            for &m in &g.members {
                prop_assert!((0..rel.len()).all(|i| !rel.reaches[i][m] || rel.reaches[m][i]));
            }
        }
    }
}
