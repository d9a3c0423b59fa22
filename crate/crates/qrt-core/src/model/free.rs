use crate::linalg::DensityMatrix;

use super::{Explorer, ModelError, QrtInstance, RosterState, State, Word};

/// Roster states at one level that the free operations prepare from nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeStateSet {
    pub level: usize,
    pub states: Vec<RosterState>,
    /// Word preparing each member from the scalar system.
    pub witnesses: Vec<Word>,
}

impl FreeStateSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn contains(&self, state: &State) -> bool {
        self.states.iter().any(|r| r.state.approx_eq(state, super::TAU_CONV))
    }

    pub fn labels(&self) -> Vec<&str> {
        self.states.iter().map(|r| r.label.as_str()).collect()
    }
}

/// The scalar system: the empty tuple or the 1×1 density matrix.
pub fn scalar_state(q: &QrtInstance) -> State {
    if q.is_discrete() {
        State::Discrete(Vec::new())
    } else {
        State::Numeric(DensityMatrix::scalar())
    }
}

/// Free states at `level`: roster members reachable from the scalar system.
pub fn free_states(q: &QrtInstance, level: usize) -> Result<FreeStateSet, ModelError> {
    let mut explorer = Explorer::new(q)?;
    free_states_with(&mut explorer, q, level)
}

pub fn free_states_with(explorer: &mut Explorer<'_>, q: &QrtInstance, level: usize) -> Result<FreeStateSet, ModelError> {
    let reach = explorer.closed_reach(&scalar_state(q), q.one_shot_width(&[level]))?;
    let mut set = FreeStateSet {
        level,
        states: Vec::new(),
        witnesses: Vec::new(),
    };
    for r in q.roster(level) {
        if let Some(w) = reach.witness(&r.state) {
            set.states.push(r);
            set.witnesses.push(w);
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_instance_str;

    #[test]
    fn only_the_all_zero_tuple_is_free() {
        let q = load_instance_str(
            r#"{"flavor": "discrete", "alphabet": ["0", "1"], "max_level": 3,
                "generators": [
                    {"name": "id", "kind": "builtin:identity"},
                    {"name": "tr", "kind": "builtin:trace"},
                    {"name": "append0", "kind": "builtin:append", "payload": "0"},
                    {"name": "cnot", "kind": "discrete", "payload": {"00": "00", "01": "01", "10": "11", "11": "10"}}
                ]}"#,
        )
        .unwrap();
        for n in 1..=3 {
            let f = free_states(&q, n).unwrap();
            assert_eq!(f.labels(), vec!["0".repeat(n).as_str()]);
            assert_eq!(q.replay(&f.witnesses[0], &scalar_state(&q)).unwrap(), f.states[0].state);
        }
    }

    #[test]
    fn nothing_is_free_without_preparations() {
        let q = load_instance_str(
            r#"{"flavor": "discrete", "alphabet": ["0", "1"], "max_level": 2,
                "generators": [{"name": "id", "kind": "builtin:identity"}, {"name": "tr", "kind": "builtin:trace"}]}"#,
        )
        .unwrap();
        assert!(free_states(&q, 1).unwrap().is_empty());
    }
}
