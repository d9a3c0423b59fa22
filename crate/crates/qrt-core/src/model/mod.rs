//! Declared resource theories: rosters of states per level, generators of the
//! free operations, and the exploration machinery that realizes the generated
//! operation sets.

mod closure;
mod explore;
mod free;
mod numeric;
mod space;
mod spec;
mod tensor;

use std::collections::BTreeMap;
use std::fmt;

use crate::channels::{ChannelError, DiscreteOperation, KrausChannel};
use crate::linalg::{trace_distance, DensityMatrix, LinalgError};

pub use closure::{
    closure_of_generators, probe_states, validate_axioms, validate_axioms_with_budget, AxiomCheck, AxiomReport, Operation,
    OperationSet, DEFAULT_PAIR_BUDGET,
};
pub use explore::{Explorer, Reach};
pub use free::{free_states, free_states_with, scalar_state, FreeStateSet};
pub use numeric::apply_step_numeric;
pub use spec::{load_instance, load_instance_str, serialize_instance, SpecDocument};
pub use space::{steps_for_width, DiscreteExplorer, DiscreteReach};
pub use tensor::{ClosedReach, TensorClosure, MAX_CLOSED_TUPLES};

/// Maximum trace-norm distance for two numeric states to count as equal.
pub const TAU_CONV: f64 = 1e-6;
/// Default closure cap.
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;
/// Word-length bound for numeric instances that do not declare one.
pub const DEFAULT_NUMERIC_DEPTH: usize = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid spec: {0}")]
    Schema(String),
    #[error("identity axiom violated: no identity generator is declared, but doing nothing must be free")]
    MissingIdentity,
    #[error("generator `{name}` is not trace preserving (deviation {deviation:e})")]
    NotCptp { name: String, deviation: f64 },
    #[error("discrete generator `{name}` is not total: no image for input `{missing}`")]
    NotTotal { name: String, missing: String },
    #[error("closure exceeded the cap of {cap} elements")]
    ClosureCap { cap: usize },
    #[error("state space of width {width} over {base} symbols is too large to index")]
    SpaceTooLarge { width: usize, base: usize },
    #[error("word step {step} does not fit a system of {width} subsystems")]
    BadStep { step: String, width: usize },
    #[error("witness plan runs {leaves} searched words, too many to expand")]
    WitnessTooLarge { leaves: usize },
    #[error("state `{0}` is not in the roster")]
    UnknownState(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Discrete,
    Numeric,
}

/// A state of the theory: a label tuple (one symbol per subsystem) or a
/// density matrix on `level` copies of the base system.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Discrete(Vec<u8>),
    Numeric(DensityMatrix),
}

impl State {
    /// Number of base subsystems.
    pub fn level(&self) -> usize {
        match self {
            State::Discrete(t) => t.len(),
            State::Numeric(rho) => rho.num_subsystems(),
        }
    }

    pub fn tensor(&self, other: &State) -> State {
        match (self, other) {
            (State::Discrete(a), State::Discrete(b)) => {
                let mut t = a.clone();
                t.extend_from_slice(b);
                State::Discrete(t)
            }
            (State::Numeric(a), State::Numeric(b)) => State::Numeric(a.tensor(b)),
            _ => panic!("tensor product of states from different flavors"),
        }
    }

    pub fn tensor_power(&self, n: usize) -> State {
        match self {
            State::Discrete(t) => State::Discrete(t.repeat(n)),
            State::Numeric(rho) => State::Numeric(rho.tensor_power(n)),
        }
    }

    /// Exact equality for tuples, trace distance within `tol` for matrices.
    pub fn approx_eq(&self, other: &State, tol: f64) -> bool {
        match (self, other) {
            (State::Discrete(a), State::Discrete(b)) => a == b,
            (State::Numeric(a), State::Numeric(b)) => {
                a.subsystem_dims() == b.subsystem_dims()
                    && (a.matrix() - b.matrix()).frobenius_norm() <= tol
                    && trace_distance(a.matrix(), b.matrix()).map(|d| d <= tol).unwrap_or(false)
            }
            _ => false,
        }
    }

    pub fn as_tuple(&self) -> Option<&[u8]> {
        match self {
            State::Discrete(t) => Some(t),
            State::Numeric(_) => None,
        }
    }

    pub fn as_density(&self) -> Option<&DensityMatrix> {
        match self {
            State::Numeric(rho) => Some(rho),
            State::Discrete(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RosterState {
    pub label: String,
    pub state: State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    Identity,
    Trace,
    PartialTrace,
    Append,
    Discrete,
    Kraus,
}

impl GeneratorKind {
    pub fn tag(self) -> &'static str {
        match self {
            GeneratorKind::Identity => "builtin:identity",
            GeneratorKind::Trace => "builtin:trace",
            GeneratorKind::PartialTrace => "builtin:partial_trace",
            GeneratorKind::Append => "builtin:append",
            GeneratorKind::Discrete => "discrete",
            GeneratorKind::Kraus => "kraus",
        }
    }
}

/// Which subsystems a generator may act on when lifted to a larger system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacementRule {
    /// Any ordered choice of distinct input subsystems; non-square outputs may
    /// be inserted at any position.
    All,
    /// Consecutive ascending inputs; outputs take the place of the inputs.
    Adjacent,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Discrete(DiscreteOperation),
    Kraus(KrausChannel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub name: String,
    pub kind: GeneratorKind,
    pub arity_in: usize,
    pub arity_out: usize,
    pub placement: PlacementRule,
    pub action: Action,
    /// The declared payload, kept for serialization.
    pub(crate) payload: Option<serde_json::Value>,
}

impl Generator {
    pub fn discrete(&self) -> Option<&DiscreteOperation> {
        match &self.action {
            Action::Discrete(op) => Some(op),
            Action::Kraus(_) => None,
        }
    }

    pub fn kraus(&self) -> Option<&KrausChannel> {
        match &self.action {
            Action::Kraus(ch) => Some(ch),
            Action::Discrete(_) => None,
        }
    }
}

/// One generator applied at one placement.
///
/// For square generators the outputs overwrite the input subsystems. Otherwise
/// the inputs are removed and the outputs are inserted as a block starting at
/// index `at` of the remaining subsystems.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub generator: usize,
    pub inputs: Vec<usize>,
    pub at: usize,
}

impl Step {
    pub fn shifted(&self, offset: usize) -> Step {
        Step {
            generator: self.generator,
            inputs: self.inputs.iter().map(|p| p + offset).collect(),
            at: self.at + offset,
        }
    }
}

/// A sequence of steps, applied left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Step>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn then(&self, other: &Word) -> Word {
        let mut steps = self.0.clone();
        steps.extend(other.0.iter().cloned());
        Word(steps)
    }

    pub fn shifted(&self, offset: usize) -> Word {
        Word(self.0.iter().map(|s| s.shifted(offset)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RMaxRule {
    Log2Dim,
    Constant(f64),
}

/// A measure declared in the spec file.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureDecl {
    CountOnes { name: String },
    Rer { name: String },
    Zero { name: String },
    TraceDistanceTo { name: String, level: usize, label: String },
    Table { name: String, entries: Vec<(usize, String, f64)> },
}

impl MeasureDecl {
    pub fn name(&self) -> &str {
        match self {
            MeasureDecl::CountOnes { name }
            | MeasureDecl::Rer { name }
            | MeasureDecl::Zero { name }
            | MeasureDecl::TraceDistanceTo { name, .. }
            | MeasureDecl::Table { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QrtInstance {
    pub name: String,
    pub flavor: Flavor,
    /// Single-character symbols; empty for numeric instances.
    pub alphabet: Vec<String>,
    /// Local dimension: alphabet size for discrete instances.
    pub base_dim: usize,
    pub generators: Vec<Generator>,
    /// Rosters declared in the spec. Discrete levels without a declaration
    /// default to every tuple.
    pub declared_rosters: BTreeMap<usize, Vec<RosterState>>,
    pub max_level: usize,
    pub closure_depth: Option<usize>,
    pub closure_cap: usize,
    pub r_max: RMaxRule,
    pub measures: Vec<MeasureDecl>,
}

impl QrtInstance {
    pub fn is_discrete(&self) -> bool {
        self.flavor == Flavor::Discrete
    }

    /// Roster at `level`. Level 0 is the scalar system.
    pub fn roster(&self, level: usize) -> Vec<RosterState> {
        if let Some(r) = self.declared_rosters.get(&level) {
            return r.clone();
        }
        match self.flavor {
            Flavor::Discrete => all_tuples(self.base_dim, level)
                .into_iter()
                .map(|t| RosterState {
                    label: self.format_tuple(&t),
                    state: State::Discrete(t),
                })
                .collect(),
            Flavor::Numeric if level == 0 => vec![RosterState {
                label: "1".into(),
                state: State::Numeric(DensityMatrix::scalar()),
            }],
            Flavor::Numeric => Vec::new(),
        }
    }

    /// Levels that carry a non-empty roster, up to `max_level`.
    pub fn roster_levels(&self) -> Vec<usize> {
        (1..=self.max_level).filter(|&l| !self.roster(l).is_empty()).collect()
    }

    /// Word-length bound of the closure policy; `None` means full closure.
    pub fn depth_limit(&self) -> Option<usize> {
        match self.flavor {
            Flavor::Discrete => self.closure_depth,
            Flavor::Numeric => Some(self.closure_depth.unwrap_or(DEFAULT_NUMERIC_DEPTH)),
        }
    }

    /// Width bound for one-shot conversions between states of the given levels.
    pub fn one_shot_width(&self, levels: &[usize]) -> usize {
        levels.iter().copied().chain([self.max_level]).max().unwrap_or(0)
    }

    pub fn identity_generator(&self) -> Option<usize> {
        self.generators.iter().position(|g| g.kind == GeneratorKind::Identity)
    }

    /// Witness of the trivial conversion on `level` subsystems: the identity
    /// on the first subsystem, or the empty word on the scalar system.
    pub fn identity_word(&self, level: usize) -> Word {
        match (level, self.identity_generator()) {
            (1.., Some(g)) => Word(vec![Step {
                generator: g,
                inputs: vec![0],
                at: 0,
            }]),
            _ => Word::default(),
        }
    }

    /// The state with `label` at `level`.
    pub fn state(&self, level: usize, label: &str) -> Result<State, ModelError> {
        if let Some(r) = self.roster(level).into_iter().find(|r| r.label == label) {
            return Ok(r.state);
        }
        match self.flavor {
            Flavor::Discrete => self
                .parse_tuple(label)
                .filter(|t| t.len() == level)
                .map(State::Discrete)
                .ok_or_else(|| ModelError::UnknownState(label.to_string())),
            Flavor::Numeric => Err(ModelError::UnknownState(label.to_string())),
        }
    }

    pub fn format_tuple(&self, t: &[u8]) -> String {
        t.iter().map(|&s| self.alphabet[s as usize].as_str()).collect()
    }

    pub fn parse_tuple(&self, label: &str) -> Option<Vec<u8>> {
        label
            .chars()
            .map(|c| {
                self.alphabet
                    .iter()
                    .position(|a| a.chars().eq(std::iter::once(c)))
                    .map(|p| p as u8)
            })
            .collect()
    }

    /// Human-readable label: roster label when the state is on the roster,
    /// the tuple itself for discrete states.
    pub fn describe(&self, state: &State) -> String {
        match state {
            State::Discrete(t) if t.is_empty() => "1".into(),
            State::Discrete(t) => self.format_tuple(t),
            State::Numeric(_) => self
                .roster(state.level())
                .into_iter()
                .find(|r| r.state.approx_eq(state, TAU_CONV))
                .map(|r| r.label)
                .unwrap_or_else(|| format!("<state on {} subsystems>", state.level())),
        }
    }

    pub fn format_step(&self, step: &Step) -> String {
        let g = &self.generators[step.generator];
        let inputs: Vec<String> = step.inputs.iter().map(|p| p.to_string()).collect();
        let mut s = format!("{}({})", g.name, inputs.join(","));
        if g.arity_in != g.arity_out && g.arity_out > 0 {
            s.push_str(&format!("@{}", step.at));
        }
        s
    }

    pub fn format_word(&self, word: &Word) -> String {
        if word.is_empty() {
            return "ε".into();
        }
        word.0.iter().map(|s| self.format_step(s)).collect::<Vec<_>>().join(" ; ")
    }

    /// Maximum resource R_max at `level`.
    pub fn r_max(&self, level: usize) -> f64 {
        match self.r_max {
            RMaxRule::Log2Dim => level as f64 * (self.base_dim as f64).log2(),
            RMaxRule::Constant(c) => c,
        }
    }

    /// Output width of `step` on a system of `width` subsystems, or `None`
    /// when it does not fit.
    pub fn step_output_width(&self, step: &Step, width: usize) -> Option<usize> {
        let g = self.generators.get(step.generator)?;
        if step.inputs.len() != g.arity_in || step.inputs.iter().any(|&p| p >= width) {
            return None;
        }
        let mut seen = step.inputs.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != step.inputs.len() {
            return None;
        }
        let rest = width - g.arity_in;
        if g.arity_in != g.arity_out && step.at > rest {
            return None;
        }
        Some(rest + g.arity_out)
    }

    pub fn apply_step(&self, step: &Step, state: &State) -> Result<State, ModelError> {
        if self.step_output_width(step, state.level()).is_none() {
            return Err(ModelError::BadStep {
                step: self.format_step(step),
                width: state.level(),
            });
        }
        match state {
            State::Discrete(t) => Ok(State::Discrete(apply_step_tuple(self, step, t))),
            State::Numeric(rho) => Ok(State::Numeric(apply_step_numeric(self, step, rho)?)),
        }
    }

    /// Applies `word` to `state`.
    pub fn replay(&self, word: &Word, state: &State) -> Result<State, ModelError> {
        let mut cur = state.clone();
        for step in &word.0 {
            cur = self.apply_step(step, &cur)?;
        }
        Ok(cur)
    }

    /// Applies `word` independently to each of `blocks` consecutive blocks of
    /// `block_width` subsystems.
    pub fn replay_parallel(
        &self,
        word: &Word,
        state: &State,
        block_width: usize,
        blocks: usize,
    ) -> Result<State, ModelError> {
        if state.level() != block_width * blocks {
            return Err(ModelError::BadStep {
                step: format!("parallel word on {blocks} blocks of {block_width}"),
                width: state.level(),
            });
        }
        if let State::Discrete(t) = state {
            let chunks: Vec<Vec<u8>> = if block_width == 0 {
                vec![Vec::new(); blocks]
            } else {
                t.chunks(block_width).map(<[u8]>::to_vec).collect()
            };
            let mut out = Vec::new();
            for chunk in chunks {
                if let State::Discrete(r) = self.replay(word, &State::Discrete(chunk))? {
                    out.extend(r);
                }
            }
            return Ok(State::Discrete(out));
        }
        if block_width == 0 {
            return Ok(self.replay(word, state)?.tensor_power(blocks));
        }
        // Right to left, so the blocks left of the current one keep their width.
        let mut cur = state.clone();
        for b in (0..blocks).rev() {
            cur = self.replay(&word.shifted(b * block_width), &cur)?;
        }
        Ok(cur)
    }
}

/// Every tuple of length `len` in lexicographic order.
pub fn all_tuples(base: usize, len: usize) -> Vec<Vec<u8>> {
    let count = base.pow(len as u32);
    (0..count)
        .map(|mut code| {
            let mut t = vec![0u8; len];
            for slot in t.iter_mut().rev() {
                *slot = (code % base) as u8;
                code /= base;
            }
            t
        })
        .collect()
}

pub(crate) fn apply_step_tuple(q: &QrtInstance, step: &Step, t: &[u8]) -> Vec<u8> {
    let g = &q.generators[step.generator];
    let op = g.discrete().expect("discrete instance has discrete generators");
    let inputs: Vec<u8> = step.inputs.iter().map(|&p| t[p]).collect();
    let out = op.apply(&inputs);
    if g.arity_in == g.arity_out {
        let mut r = t.to_vec();
        for (&p, &s) in step.inputs.iter().zip(out) {
            r[p] = s;
        }
        r
    } else {
        let mut rest: Vec<u8> = t
            .iter()
            .enumerate()
            .filter(|(i, _)| !step.inputs.contains(i))
            .map(|(_, &s)| s)
            .collect();
        let tail = rest.split_off(step.at);
        rest.extend_from_slice(out);
        rest.extend(tail);
        rest
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Discrete => "discrete",
            Flavor::Numeric => "numeric",
        })
    }
}
