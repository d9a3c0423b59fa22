use std::collections::VecDeque;

use crate::linalg::{trace_distance, DensityMatrix};

use super::numeric::apply_step_numeric;
use super::space::{steps_for_width, DiscreteExplorer, DiscreteReach};
use super::tensor::ClosedReach;
use super::{ModelError, QrtInstance, State, Step, Word, TAU_CONV};

/// Frobenius radius under which two explored numeric states are merged.
pub(crate) const DEDUP_RADIUS: f64 = 1e-10;

/// Reachability search over the generated operations from a fixed input.
pub enum Explorer<'a> {
    Discrete(DiscreteExplorer<'a>),
    Numeric(NumericExplorer<'a>),
}

impl<'a> Explorer<'a> {
    pub fn new(q: &'a QrtInstance) -> Result<Self, ModelError> {
        Ok(if q.is_discrete() {
            Explorer::Discrete(DiscreteExplorer::new(q, q.max_level)?)
        } else {
            Explorer::Numeric(NumericExplorer { q })
        })
    }

    /// States reachable from `from` by words of the closure policy whose
    /// intermediate systems have at most `width` subsystems.
    pub fn reach(&mut self, from: &State, width: usize) -> Result<Reach, ModelError> {
        match (self, from) {
            (Explorer::Discrete(x), State::Discrete(t)) => {
                let depth = x.instance().depth_limit();
                Ok(Reach::Discrete(x.reach(t, width, depth)?))
            }
            (Explorer::Numeric(x), State::Numeric(rho)) => Ok(Reach::Numeric(x.reach(rho, width)?)),
            _ => Err(ModelError::Schema("state flavor does not match the instance".into())),
        }
    }

    /// Like [`Explorer::reach`], but for discrete instances without a depth
    /// policy the result is also closed under factorwise conversion and
    /// free preparation, which a width cap alone would miss.
    pub fn closed_reach(&mut self, from: &State, width: usize) -> Result<Reach, ModelError> {
        if let (Explorer::Discrete(x), State::Discrete(t)) = (&mut *self, from) {
            if x.instance().depth_limit().is_none() && t.len() <= width {
                if let Some(c) = x.closure(width)? {
                    let r = c.get(t).expect("closure covers every tuple within the width");
                    return Ok(Reach::Closed(r.clone()));
                }
            }
        }
        self.reach(from, width)
    }
}

/// Outcome of [`Explorer::reach`].
pub enum Reach {
    Discrete(DiscreteReach),
    Closed(ClosedReach),
    Numeric(NumericReach),
}

impl Reach {
    /// A shortest word reaching `target` (exactly, or within τ_conv for
    /// numeric instances). The empty word means `target` is the source.
    pub fn witness(&self, target: &State) -> Option<Word> {
        match (self, target) {
            (Reach::Discrete(r), State::Discrete(t)) => r.word_to(t),
            (Reach::Closed(r), State::Discrete(t)) => r.get(t).cloned(),
            (Reach::Numeric(r), State::Numeric(rho)) => r.find(rho, TAU_CONV).map(|i| r.word_to(i)),
            _ => None,
        }
    }

    pub fn contains(&self, target: &State) -> bool {
        match (self, target) {
            (Reach::Discrete(r), State::Discrete(t)) => r.contains(t),
            (Reach::Closed(r), State::Discrete(t)) => r.contains_key(t),
            _ => self.witness(target).is_some(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Reach::Discrete(r) => r.len(),
            Reach::Closed(r) => r.len(),
            Reach::Numeric(r) => r.nodes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every reached state with its witness: discovery order for searches,
    /// tuple order for closed reaches.
    pub fn states(&self) -> Vec<(State, Word)> {
        match self {
            Reach::Discrete(r) => r
                .tuples()
                .map(|t| {
                    let w = r.word_to(&t).expect("reached tuple has a witness");
                    (State::Discrete(t), w)
                })
                .collect(),
            Reach::Closed(r) => r.iter().map(|(t, w)| (State::Discrete(t.clone()), w.clone())).collect(),
            Reach::Numeric(r) => (0..r.nodes.len())
                .map(|i| (State::Numeric(r.nodes[i].clone()), r.word_to(i)))
                .collect(),
        }
    }
}

pub struct NumericExplorer<'a> {
    q: &'a QrtInstance,
}

impl<'a> NumericExplorer<'a> {
    fn reach(&self, source: &DensityMatrix, width: usize) -> Result<NumericReach, ModelError> {
        let width = width.max(source.num_subsystems());
        let depth = self.q.depth_limit().unwrap_or(super::DEFAULT_NUMERIC_DEPTH);
        let steps: Vec<Vec<Step>> = (0..=width).map(|w| steps_for_width(self.q, w, width)).collect();
        let mut nodes = vec![source.clone()];
        let mut parent: Vec<Option<(usize, Step)>> = vec![None];
        let mut dist = vec![0usize];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            if dist[i] >= depth {
                continue;
            }
            let k = nodes[i].num_subsystems();
            for step in &steps[k] {
                let next = apply_step_numeric(self.q, step, &nodes[i])?;
                let seen = nodes.iter().any(|n| {
                    n.subsystem_dims() == next.subsystem_dims()
                        && (n.matrix() - next.matrix()).frobenius_norm() <= DEDUP_RADIUS
                });
                if seen {
                    continue;
                }
                nodes.push(next);
                parent.push(Some((i, step.clone())));
                dist.push(dist[i] + 1);
                if nodes.len() > self.q.closure_cap {
                    return Err(ModelError::ClosureCap { cap: self.q.closure_cap });
                }
                queue.push_back(nodes.len() - 1);
            }
        }
        Ok(NumericReach { nodes, parent })
    }
}

/// Explored numeric states with parent pointers.
pub struct NumericReach {
    nodes: Vec<DensityMatrix>,
    parent: Vec<Option<(usize, Step)>>,
}

impl NumericReach {
    fn find(&self, target: &DensityMatrix, tol: f64) -> Option<usize> {
        self.nodes.iter().position(|n| {
            n.subsystem_dims() == target.subsystem_dims()
                && (n.matrix() - target.matrix()).frobenius_norm() <= tol
                && trace_distance(n.matrix(), target.matrix()).map(|d| d <= tol).unwrap_or(false)
        })
    }

    fn word_to(&self, mut i: usize) -> Word {
        let mut steps = Vec::new();
        while let Some((p, s)) = &self.parent[i] {
            steps.push(s.clone());
            i = *p;
        }
        steps.reverse();
        Word(steps)
    }
}
