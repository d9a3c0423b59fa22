//! Random small discrete theories for property and acceptance tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::model::{all_tuples, load_instance_str, QrtInstance};

const SYMBOLS: [&str; 3] = ["0", "1", "2"];

/// Extra generators beyond identity and trace.
pub const MAX_EXTRA_GENERATORS: usize = 3;

fn label(t: &[u8]) -> String {
    t.iter().map(|&s| SYMBOLS[s as usize]).collect()
}

fn random_map<R: Rng>(rng: &mut R, base: usize, name: String) -> Value {
    let arity_in = rng.gen_range(1..=2);
    let arity_out = rng.gen_range(1..=2);
    let outputs = all_tuples(base, arity_out);
    let mut table = Map::new();
    for input in all_tuples(base, arity_in) {
        let out = outputs.choose(rng).expect("non-empty output space");
        table.insert(label(&input), json!(label(out)));
    }
    json!({ "name": name, "kind": "discrete", "payload": table })
}

/// A spec with an alphabet of 2 or 3 symbols, identity, trace and up to three
/// extra generators (appends and random total maps), up to level 2.
pub fn random_spec<R: Rng>(rng: &mut R) -> Value {
    let base = rng.gen_range(2..=3);
    let mut generators = vec![
        json!({ "name": "id", "kind": "builtin:identity" }),
        json!({ "name": "tr", "kind": "builtin:trace" }),
    ];
    for k in 0..rng.gen_range(0..=MAX_EXTRA_GENERATORS) {
        if rng.gen_bool(0.3) {
            let s = SYMBOLS[rng.gen_range(0..base)];
            generators.push(json!({ "name": format!("append{s}_{k}"), "kind": "builtin:append", "payload": s }));
        } else {
            generators.push(random_map(rng, base, format!("g{k}")));
        }
    }
    json!({
        "name": "synthetic",
        "flavor": "discrete",
        "alphabet": SYMBOLS[..base],
        "max_level": 2,
        "generators": generators,
    })
}

pub fn random_instance(seed: u64) -> QrtInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = random_spec(&mut rng);
    load_instance_str(&spec.to_string()).expect("generated specs are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_bounded() {
        for seed in 0..20 {
            let q = random_instance(seed);
            assert_eq!(q, random_instance(seed));
            assert!((2..=3).contains(&q.base_dim));
            assert!(q.generators.len() <= 2 + MAX_EXTRA_GENERATORS);
            assert!(q.identity_generator().is_some());
            assert_eq!(q.max_level, 2);
        }
    }
}
