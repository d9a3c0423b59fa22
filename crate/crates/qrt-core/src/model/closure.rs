use std::collections::{HashMap, VecDeque};

use crate::linalg::{partial_trace, DensityMatrix};

use super::explore::DEDUP_RADIUS;
use super::numeric::apply_step_numeric;
use super::space::steps_for_width;
use super::{apply_step_tuple, all_tuples, ModelError, QrtInstance, State, Step, Word, TAU_CONV};

/// Default number of operation pairs examined per axiom.
pub const DEFAULT_PAIR_BUDGET: usize = 50_000;

/// A generated operation: its witness word and its action on the probe states
/// of the input level.
#[derive(Debug, Clone, PartialEq)]
pub struct Operation {
    pub word: Word,
    pub images: Vec<State>,
}

/// The operations from `level_in` to `level_out` subsystems generated under
/// the closure policy, one per distinct action.
#[derive(Debug, Clone, PartialEq)]
pub struct OperationSet {
    pub level_in: usize,
    pub level_out: usize,
    pub ops: Vec<Operation>,
}

impl OperationSet {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Index of the operation acting as `images` on the probe states.
    pub fn find_action(&self, images: &[State]) -> Option<usize> {
        self.ops.iter().position(|op| same_action(&op.images, images))
    }
}

fn same_action(a: &[State], b: &[State]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y, TAU_CONV))
}

/// States an operation is identified by: every tuple for discrete instances,
/// the roster for numeric ones (the maximally mixed state when the roster is
/// empty).
pub fn probe_states(q: &QrtInstance, level: usize) -> Vec<State> {
    if q.is_discrete() {
        return all_tuples(q.base_dim, level).into_iter().map(State::Discrete).collect();
    }
    let roster: Vec<State> = q.roster(level).into_iter().map(|r| r.state).collect();
    if roster.is_empty() {
        vec![State::Numeric(DensityMatrix::maximally_mixed(vec![q.base_dim; level]))]
    } else {
        roster
    }
}

/// All operations out of `level_in`, grouped by output level, with every
/// intermediate system at most `width` subsystems.
pub(crate) fn closure_from(
    q: &QrtInstance,
    level_in: usize,
    width: usize,
) -> Result<Vec<OperationSet>, ModelError> {
    let width = width.max(level_in);
    let depth = q.depth_limit();
    let steps: Vec<Vec<Step>> = (0..=width).map(|w| steps_for_width(q, w, width)).collect();
    let probes = probe_states(q, level_in);

    let mut nodes: Vec<(Vec<State>, usize)> = vec![(probes.clone(), level_in)];
    let mut parent: Vec<Option<(usize, Step)>> = vec![None];
    let mut dist = vec![0usize];
    let mut discrete_index: HashMap<Vec<u8>, usize> = HashMap::new();
    if q.is_discrete() {
        discrete_index.insert(flatten(&probes, level_in), 0);
    }
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if depth.is_some_and(|lim| dist[i] >= lim) {
            continue;
        }
        let w = nodes[i].1;
        for step in &steps[w] {
            let images = nodes[i]
                .0
                .iter()
                .map(|s| match s {
                    State::Discrete(t) => Ok(State::Discrete(apply_step_tuple(q, step, t))),
                    State::Numeric(rho) => apply_step_numeric(q, step, rho).map(State::Numeric),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let out_w = q.step_output_width(step, w).expect("enumerated steps fit");
            let fresh = if q.is_discrete() {
                let key = flatten(&images, out_w);
                let fresh = !discrete_index.contains_key(&key);
                if fresh {
                    discrete_index.insert(key, nodes.len());
                }
                fresh
            } else {
                !nodes.iter().any(|(other, ow)| {
                    *ow == out_w
                        && other.iter().zip(&images).all(|(a, b)| match (a, b) {
                            (State::Numeric(x), State::Numeric(y)) => {
                                (x.matrix() - y.matrix()).frobenius_norm() <= DEDUP_RADIUS
                            }
                            _ => false,
                        })
                })
            };
            if !fresh {
                continue;
            }
            nodes.push((images, out_w));
            parent.push(Some((i, step.clone())));
            dist.push(dist[i] + 1);
            if nodes.len() > q.closure_cap {
                return Err(ModelError::ClosureCap { cap: q.closure_cap });
            }
            queue.push_back(nodes.len() - 1);
        }
    }

    let mut sets: Vec<OperationSet> = (0..=width)
        .map(|level_out| OperationSet {
            level_in,
            level_out,
            ops: Vec::new(),
        })
        .collect();
    for (i, (images, w)) in nodes.into_iter().enumerate() {
        let word = if i == 0 {
            q.identity_word(level_in)
        } else {
            let mut steps = Vec::new();
            let mut j = i;
            while let Some((p, s)) = &parent[j] {
                steps.push(s.clone());
                j = *p;
            }
            steps.reverse();
            Word(steps)
        };
        sets[w].ops.push(Operation { word, images });
    }
    Ok(sets)
}

/// Widest system `word` passes through when started on `start` subsystems.
fn peak_width(q: &QrtInstance, word: &Word, start: usize) -> Option<usize> {
    let mut w = start;
    let mut peak = w;
    for step in &word.0 {
        w = q.step_output_width(step, w)?;
        peak = peak.max(w);
    }
    Some(peak)
}

fn flatten(images: &[State], width: usize) -> Vec<u8> {
    let mut key = Vec::with_capacity(images.len() * width + 1);
    key.push(width as u8);
    for s in images {
        key.extend_from_slice(s.as_tuple().expect("discrete image"));
    }
    key
}

/// Operations from `level_in` to `level_out` subsystems. Discrete instances
/// use the full closure (or the declared depth); numeric ones enumerate words
/// up to the closure depth and merge words acting alike on the roster.
pub fn closure_of_generators(q: &QrtInstance, level_in: usize, level_out: usize) -> Result<OperationSet, ModelError> {
    let width = q.one_shot_width(&[level_in, level_out]);
    let mut sets = closure_from(q, level_in, width)?;
    Ok(sets.swap_remove(level_out))
}

/// Verdict on one axiom.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub axiom: u8,
    pub statement: &'static str,
    pub passed: bool,
    pub pairs_checked: usize,
    /// False when the pair budget or the closure depth cut the check short.
    pub exhaustive: bool,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub level_bound: usize,
    pub depth_bound: usize,
    /// Largest intermediate system the closures were built on.
    pub peak_width: usize,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: u8) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

/// Checks the four free-operation axioms on the operation sets between levels
/// `0..=level_bound`. Factors in the composition and tensor checks are the
/// operations whose witness has at most `depth_bound` steps; the composite
/// must appear in the closure itself.
pub fn validate_axioms(q: &QrtInstance, level_bound: usize, depth_bound: usize) -> Result<AxiomReport, ModelError> {
    validate_axioms_with_budget(q, level_bound, depth_bound, DEFAULT_PAIR_BUDGET)
}

pub fn validate_axioms_with_budget(
    q: &QrtInstance,
    level_bound: usize,
    depth_bound: usize,
    pair_budget: usize,
) -> Result<AxiomReport, ModelError> {
    let width = q.one_shot_width(&[level_bound]);
    let mut sets: Vec<Vec<OperationSet>> = Vec::with_capacity(level_bound + 1);
    for k in 0..=level_bound {
        sets.push(closure_from(q, k, width)?);
    }
    let factors = |k: usize, j: usize| -> Vec<&Operation> {
        sets[k][j].ops.iter().filter(|op| op.word.len() <= depth_bound).collect()
    };
    // A discrete depth limit is a policy and may genuinely break closure. A
    // numeric one only truncates the search, so longer composites are skipped.
    let too_long = |f: &Operation, g: &Operation| {
        !q.is_discrete() && q.depth_limit().is_some_and(|lim| f.word.len() + g.word.len() > lim)
    };

    // Composition: g ∘ f stays in the closure.
    let mut composition = AxiomCheck {
        axiom: 1,
        statement: "closed under composition",
        passed: true,
        pairs_checked: 0,
        exhaustive: true,
        counterexample: None,
    };
    'compose: for k in 0..=level_bound {
        for j in 0..=level_bound {
            for l in 0..=level_bound {
                for f in factors(k, j) {
                    for g in factors(j, l) {
                        if composition.pairs_checked >= pair_budget {
                            composition.exhaustive = false;
                            break 'compose;
                        }
                        if too_long(f, g) {
                            composition.exhaustive = false;
                            continue;
                        }
                        composition.pairs_checked += 1;
                        let images = f
                            .images
                            .iter()
                            .map(|s| q.replay(&g.word, s))
                            .collect::<Result<Vec<_>, _>>()?;
                        if sets[k][l].find_action(&images).is_none() {
                            composition.passed = false;
                            composition.counterexample = Some(format!(
                                "{} followed by {} ({k}→{j}→{l} subsystems) is not in the closure",
                                q.format_word(&f.word),
                                q.format_word(&g.word)
                            ));
                            break 'compose;
                        }
                    }
                }
            }
        }
    }

    // Tensoring: f ⊗ g stays in the closure.
    let mut tensor = AxiomCheck {
        axiom: 2,
        statement: "closed under tensor products",
        passed: true,
        pairs_checked: 0,
        exhaustive: true,
        counterexample: None,
    };
    'tensor: for k1 in 0..=level_bound {
        for k2 in 0..=level_bound - k1 {
            let probes = probe_states(q, k1 + k2);
            for j1 in 0..=level_bound {
                for j2 in 0..=level_bound.saturating_sub(j1) {
                    for f in factors(k1, j1) {
                        for g in factors(k2, j2) {
                            if tensor.pairs_checked >= pair_budget {
                                tensor.exhaustive = false;
                                break 'tensor;
                            }
                            if too_long(f, g) {
                                tensor.exhaustive = false;
                                continue;
                            }
                            tensor.pairs_checked += 1;
                            let word = g.word.shifted(k1).then(&f.word);
                            if peak_width(q, &word, k1 + k2).is_none_or(|p| p > width) {
                                // Wider than the closure's horizon, so it cannot appear there.
                                tensor.exhaustive = false;
                                continue;
                            }
                            let images = probes.iter().map(|s| q.replay(&word, s)).collect::<Result<Vec<_>, _>>()?;
                            if sets[k1 + k2][j1 + j2].find_action(&images).is_none() {
                                tensor.passed = false;
                                tensor.counterexample = Some(format!(
                                    "{} ⊗ {} ({k1}+{k2}→{j1}+{j2} subsystems) is not in the closure",
                                    q.format_word(&f.word),
                                    q.format_word(&g.word)
                                ));
                                break 'tensor;
                            }
                        }
                    }
                }
            }
        }
    }

    let identity = AxiomCheck {
        axiom: 3,
        statement: "doing nothing is free",
        passed: q.identity_generator().is_some(),
        pairs_checked: 0,
        exhaustive: true,
        counterexample: q.identity_generator().is_none().then(|| "no identity generator is declared".into()),
    };

    // Discarding: the trace and every partial trace are generated.
    let mut discard = AxiomCheck {
        axiom: 4,
        statement: "discarding subsystems is free",
        passed: true,
        pairs_checked: 0,
        exhaustive: true,
        counterexample: None,
    };
    'discard: for k in 1..=level_bound {
        if sets[k][0].is_empty() {
            discard.passed = false;
            discard.counterexample = Some(format!("no operation discards a {k}-subsystem system"));
            break;
        }
        if k < 2 {
            continue;
        }
        let probes = probe_states(q, k);
        for drop in 0..k {
            let images = probes
                .iter()
                .map(|s| discard_subsystem(s, drop))
                .collect::<Result<Vec<_>, _>>()?;
            if sets[k][k - 1].find_action(&images).is_none() {
                discard.passed = false;
                discard.counterexample = Some(format!("tracing out subsystem {drop} of {k} is not generated"));
                break 'discard;
            }
        }
    }

    Ok(AxiomReport {
        level_bound,
        depth_bound,
        peak_width: width,
        checks: vec![composition, tensor, identity, discard],
    })
}

fn discard_subsystem(s: &State, drop: usize) -> Result<State, ModelError> {
    Ok(match s {
        State::Discrete(t) => {
            let mut t = t.clone();
            t.remove(drop);
            State::Discrete(t)
        }
        State::Numeric(rho) => {
            let keep: Vec<usize> = (0..rho.num_subsystems()).filter(|&i| i != drop).collect();
            State::Numeric(partial_trace(rho, &keep)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_instance_str;

    fn example(extra: &str) -> QrtInstance {
        load_instance_str(&format!(
            r#"{{
                "flavor": "discrete", "alphabet": ["0", "1"], "max_level": 3{extra},
                "generators": [
                    {{"name": "id", "kind": "builtin:identity"}},
                    {{"name": "tr", "kind": "builtin:trace"}},
                    {{"name": "append0", "kind": "builtin:append", "payload": "0"}},
                    {{"name": "cnot", "kind": "discrete", "payload": {{"00": "00", "01": "01", "10": "11", "11": "10"}}}}
                ]
            }}"#
        ))
        .unwrap()
    }

    #[test]
    fn identity_only_closure_is_trivial() {
        let q = load_instance_str(
            r#"{"flavor": "discrete", "alphabet": ["0", "1"], "max_level": 2,
                "generators": [{"name": "id", "kind": "builtin:identity"}]}"#,
        )
        .unwrap();
        let set = closure_of_generators(&q, 1, 1).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(q.format_word(&set.ops[0].word), "id(0)");
        assert!(closure_of_generators(&q, 1, 2).unwrap().is_empty());
    }

    #[test]
    fn copying_one_bit_is_generated() {
        let q = example("");
        let set = closure_of_generators(&q, 1, 2).unwrap();
        let copy = [State::Discrete(vec![0, 0]), State::Discrete(vec![1, 1])];
        let i = set.find_action(&copy).expect("append then CNOT copies");
        let word = &set.ops[i].word;
        assert_eq!(q.format_word(word), "append0()@0 ; cnot(1,0)");
        assert_eq!(q.replay(word, &State::Discrete(vec![1])).unwrap(), State::Discrete(vec![1, 1]));
    }

    #[test]
    fn cap_is_a_hard_error() {
        let q = example(r#", "closure_cap": 10"#);
        assert_eq!(closure_of_generators(&q, 3, 3).unwrap_err(), ModelError::ClosureCap { cap: 10 });
    }

    #[test]
    fn depth_one_policy_breaks_composition() {
        let q = load_instance_str(
            r#"{"flavor": "discrete", "alphabet": ["0", "1", "2"], "max_level": 1, "closure_depth": 1,
                "generators": [
                    {"name": "id", "kind": "builtin:identity"},
                    {"name": "tr", "kind": "builtin:trace"},
                    {"name": "shift", "kind": "discrete", "payload": {"0": "1", "1": "2", "2": "0"}}
                ]}"#,
        )
        .unwrap();
        let report = validate_axioms(&q, 1, 1).unwrap();
        let c = report.check(1).unwrap();
        assert!(!c.passed);
        assert!(c.counterexample.as_deref().unwrap().contains("shift(0) followed by shift(0)"));
        assert!(report.check(3).unwrap().passed && report.check(4).unwrap().passed);
    }

    #[test]
    fn missing_trace_fails_discarding() {
        let q = load_instance_str(
            r#"{"flavor": "discrete", "alphabet": ["0", "1"], "max_level": 2,
                "generators": [{"name": "id", "kind": "builtin:identity"},
                               {"name": "append0", "kind": "builtin:append", "payload": "0"}]}"#,
        )
        .unwrap();
        let report = validate_axioms(&q, 2, 2).unwrap();
        assert!(!report.check(4).unwrap().passed);
        assert!(report.check(1).unwrap().passed);
    }
}
