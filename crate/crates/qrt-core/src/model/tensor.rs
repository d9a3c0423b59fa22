//! Reachability closed under tensor products of conversions.
//!
//! A width cap hides conversions that the closure axioms guarantee: if
//! x₁ → y₁ and x₂ → y₂ then x₁x₂ → y₁y₂, and a free state can be prepared
//! next to anything. Both become visible only when each factor is explored
//! on its own, so this search combines per-factor reaches with the plain
//! explorer until nothing new appears.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use super::space::DiscreteExplorer;
use super::{all_tuples, ModelError, Word};

/// Largest tuple space the closure is computed over; past it callers fall
/// back to the plain search.
pub const MAX_CLOSED_TUPLES: usize = 128;

/// Reached tuples with a witness word for each.
pub type ClosedReach = BTreeMap<Vec<u8>, Word>;

/// The tensor-closed reach of every tuple of at most `width` subsystems.
#[derive(Debug, Clone)]
pub struct TensorClosure {
    pub width: usize,
    reach: BTreeMap<Vec<u8>, ClosedReach>,
}

impl TensorClosure {
    /// None when the tuple space exceeds [`MAX_CLOSED_TUPLES`].
    pub fn compute(explorer: &mut DiscreteExplorer<'_>, width: usize) -> Result<Option<Self>, ModelError> {
        let base = explorer.instance().base_dim;
        let tuples: Vec<Vec<u8>> = (0..=width).flat_map(|k| all_tuples(base, k)).collect();
        if tuples.len() > MAX_CLOSED_TUPLES {
            return Ok(None);
        }
        let mut reach = BTreeMap::new();
        for t in &tuples {
            let r = explorer.reach(t, width, None)?;
            let mut m = ClosedReach::new();
            for u in r.tuples().filter(|u| u.len() <= width) {
                let w = r.word_to(&u).expect("reached tuple has a witness");
                m.insert(u, w);
            }
            reach.insert(t.clone(), m);
        }
        let mut closure = TensorClosure { width, reach };
        while closure.round(&tuples) {}
        Ok(Some(closure))
    }

    /// One pass of transitivity and factorwise products; true if anything grew.
    fn round(&mut self, tuples: &[Vec<u8>]) -> bool {
        let mut grew = false;
        for t in tuples {
            let mut found = Vec::new();
            let here = &self.reach[t];
            for (y, wy) in here.iter().filter(|(y, _)| *y != t) {
                for (z, wz) in &self.reach[y] {
                    if !here.contains_key(z) {
                        found.push((z.clone(), wy.then(wz)));
                    }
                }
            }
            // Convert the factors t[..i] and t[i..] independently. An empty
            // factor is the scalar system, so this also prepares free states
            // at every position.
            for i in 0..=t.len() {
                let (left, right) = (&self.reach[&t[..i]], &self.reach[&t[i..]]);
                for (a, wa) in left {
                    for (b, wb) in right.iter().filter(|(b, _)| a.len() + b.len() <= self.width) {
                        let ab = [a.as_slice(), b].concat();
                        if !here.contains_key(&ab) {
                            found.push((ab, wb.shifted(i).then(wa)));
                        }
                    }
                }
            }
            let here = self.reach.get_mut(t).expect("every tuple is seeded");
            for (z, w) in found {
                if let Entry::Vacant(e) = here.entry(z) {
                    e.insert(w);
                    grew = true;
                }
            }
        }
        grew
    }

    pub fn get(&self, source: &[u8]) -> Option<&ClosedReach> {
        self.reach.get(source)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{load_instance_str, State};

    fn instance() -> crate::model::QrtInstance {
        // Each symbol maps to a two-symbol tuple, so preparing 11 from the
        // scalar needs a third subsystem in the plain search.
        load_instance_str(
            r#"{"flavor": "discrete", "alphabet": ["0", "1", "2"], "max_level": 2,
                "generators": [
                    {"name": "id", "kind": "builtin:identity"},
                    {"name": "tr", "kind": "builtin:trace"},
                    {"name": "a0", "kind": "builtin:append", "payload": "0"},
                    {"name": "g", "kind": "discrete", "payload": {"0": "01", "1": "22", "2": "00"}},
                    {"name": "h", "kind": "discrete", "payload": {"00": "2", "01": "2", "02": "2", "10": "2",
                        "11": "2", "12": "2", "20": "2", "21": "2", "22": "2"}}
                ]}"#,
        )
        .unwrap()
    }

    #[test]
    fn products_of_free_states_are_free() {
        let q = instance();
        let mut x = DiscreteExplorer::new(&q, 2).unwrap();
        assert!(!x.reach(&[], 2, None).unwrap().contains(&[1, 1]));
        let c = TensorClosure::compute(&mut x, 2).unwrap().unwrap();
        let free = c.get(&[]).unwrap();
        assert!(free.contains_key(&vec![1, 1]));
        for (tuple, word) in free {
            let out = q.replay(word, &State::Discrete(Vec::new())).unwrap();
            assert_eq!(out, State::Discrete(tuple.clone()));
        }
    }

    #[test]
    fn witnesses_replay_from_every_source() {
        let q = instance();
        let mut x = DiscreteExplorer::new(&q, 2).unwrap();
        let c = TensorClosure::compute(&mut x, 2).unwrap().unwrap();
        for src in (0..=2).flat_map(|k| all_tuples(3, k)) {
            let plain = x.reach(&src, 2, None).unwrap();
            let closed = c.get(&src).unwrap();
            assert!(plain.tuples().all(|p| closed.contains_key(&p)));
            for (tuple, word) in closed {
                let out = q.replay(word, &State::Discrete(src.clone())).unwrap();
                assert_eq!(out, State::Discrete(tuple.clone()), "{src:?} via {}", q.format_word(word));
            }
        }
    }
}
