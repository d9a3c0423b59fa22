//! Finite-horizon asymptotic conversion rates.
//!
//! Discrete states are reduced to primitive roots: ψ = ρ^k with ρ not a power
//! of a shorter tuple, so r(ρ^k → σ^p) = r(ρ → σ)·k/p. Direct witnesses
//! ρ^a → σ^b are found by exhaustive search for every a, b whose systems fit
//! the horizon width, and the rate graph on roots is closed under chaining in
//! max-times arithmetic. A cycle with product above 1 is an amplification, and
//! every rate routed through it is +∞.

mod ext;

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use ext::ExtRational;

use crate::model::{scalar_state, Explorer, ModelError, QrtInstance, State, Word};

pub const DEFAULT_N_MAX: usize = 3;
pub const DEFAULT_EPSILON: f64 = 1e-6;
/// Plans executing more searched words than this are not expanded into words.
pub const MAX_REPLAY_LEAVES: usize = 4096;
/// Largest Hilbert-space dimension a numeric witness is replayed on.
pub const MAX_NUMERIC_REPLAY_DIM: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateConfig {
    pub n_max: usize,
    /// Trace-norm tolerance for numeric witnesses.
    pub epsilon: f64,
}

impl Default for RateConfig {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_N_MAX,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

/// A conversion src^n → dst^m between rate-graph nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    /// One word, found by search. Discrete words are recomputed on demand.
    Direct {
        src: usize,
        n: usize,
        dst: usize,
        m: usize,
        word: Option<Word>,
    },
    /// The plan run independently on consecutive blocks.
    Parallel(Rc<Plan>, usize),
    /// The first plan, then the second on its output.
    Then(Rc<Plan>, Rc<Plan>),
}

impl Plan {
    pub fn src(&self) -> usize {
        match self {
            Plan::Direct { src, .. } => *src,
            Plan::Parallel(p, _) => p.src(),
            Plan::Then(a, _) => a.src(),
        }
    }

    pub fn dst(&self) -> usize {
        match self {
            Plan::Direct { dst, .. } => *dst,
            Plan::Parallel(p, _) => p.dst(),
            Plan::Then(_, b) => b.dst(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Plan::Direct { n, .. } => *n,
            Plan::Parallel(p, k) => p.n() * k,
            Plan::Then(a, _) => a.n(),
        }
    }

    pub fn m(&self) -> usize {
        match self {
            Plan::Direct { m, .. } => *m,
            Plan::Parallel(p, k) => p.m() * k,
            Plan::Then(_, b) => b.m(),
        }
    }

    pub fn ratio(&self) -> BigRational {
        big_ratio(self.m(), self.n())
    }

    /// Number of searched words the plan executes.
    pub fn leaves(&self) -> usize {
        match self {
            Plan::Direct { .. } => 1,
            Plan::Parallel(p, k) => p.leaves() * k,
            Plan::Then(a, b) => a.leaves() + b.leaves(),
        }
    }

    /// `self` on k blocks, or `None` when the copy counts overflow.
    pub fn parallel(plan: &Rc<Plan>, k: usize) -> Option<Rc<Plan>> {
        plan.n().checked_mul(k)?;
        plan.m().checked_mul(k)?;
        plan.leaves().checked_mul(k)?;
        Some(Rc::new(Plan::Parallel(Rc::clone(plan), k)))
    }

    /// src^(n·n') → dst'^(m·m'): `first` on n' blocks, then `next` on m blocks.
    pub fn chain(first: &Rc<Plan>, next: &Rc<Plan>) -> Option<Rc<Plan>> {
        debug_assert_eq!(first.dst(), next.src());
        let a = Plan::parallel(first, next.n())?;
        let b = Plan::parallel(next, first.m())?;
        a.leaves().checked_add(b.leaves())?;
        Some(Rc::new(Plan::Then(a, b)))
    }
}

fn big_ratio(m: usize, n: usize) -> BigRational {
    BigRational::new(BigInt::from(m), BigInt::from(n))
}

/// A witnessed conversion ψ^n → φ^m in terms of the queried states.
#[derive(Debug, Clone, PartialEq)]
pub struct RateWitness {
    pub n: usize,
    pub m: usize,
    pub plan: Rc<Plan>,
}

impl RateWitness {
    pub fn ratio(&self) -> BigRational {
        big_ratio(self.m, self.n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum UpperBound {
    /// No conversion within the horizon does better.
    AtHorizon(ExtRational),
    Unbounded,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    pub source: String,
    pub target: String,
    /// The certified estimate: the best chained witness, or +∞ when an
    /// amplification lies on a route.
    pub rate: ExtRational,
    /// Best ratio among the listed witnesses.
    pub witnessed: ExtRational,
    /// For each n ≤ n_max, the largest witnessed m; plus the chained witness
    /// when it beats them.
    pub witnesses: Vec<RateWitness>,
    pub upper: UpperBound,
    /// Node whose amplification makes the rate infinite.
    pub amplifier: Option<String>,
    pub n_max: usize,
    pub epsilon: f64,
}

impl RateEstimate {
    pub fn lower(&self) -> f64 {
        self.rate.to_f64()
    }

    /// Best witnessed rate when n copies yield ⌈rn⌉ copies.
    pub fn ceiling_lower(&self) -> ExtRational {
        self.best_under(ceil_mul)
    }

    /// Best witnessed rate when n copies yield ⌊rn⌋ copies.
    pub fn floor_lower(&self) -> ExtRational {
        self.best_under(|r, n| (r * BigInt::from(n)).floor().to_integer())
    }

    /// Largest candidate r = m'/n' from the witness pool for which some
    /// witness (n, m) delivers at least `copies(r, n)` targets.
    fn best_under(&self, copies: impl Fn(&BigRational, usize) -> BigInt) -> ExtRational {
        let mut best = BigRational::zero();
        for cand in self.witnesses.iter().map(RateWitness::ratio) {
            if cand > best && self.witnesses.iter().any(|w| copies(&cand, w.n) <= BigInt::from(w.m)) {
                best = cand;
            }
        }
        ExtRational::Finite(best)
    }
}

fn ceil_mul(r: &BigRational, n: usize) -> BigInt {
    (r * BigInt::from(n)).ceil().to_integer()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Replication {
    Unit,
    Infinite,
    Unknown,
}

impl std::fmt::Display for Replication {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Replication::Unit => "UNIT",
            Replication::Infinite => "INFINITE",
            Replication::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationVerdict {
    pub state: String,
    pub verdict: Replication,
    pub is_free: bool,
    /// ψ^n → ψ^m with m > n.
    pub witness: Option<RateWitness>,
    pub n_max: usize,
}

impl ReplicationVerdict {
    /// A non-free state that free operations replicate without bound.
    pub fn catalytically_replicable(&self) -> bool {
        self.verdict == Replication::Infinite && !self.is_free
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReciprocityReport {
    pub rate: ExtRational,
    /// Source copies needed per target copy, from the transposed witnesses.
    pub reciprocal: ExtRational,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub direct: ExtRational,
    pub product: ExtRational,
    pub holds: bool,
    /// The composed witness ρ^n → ω^m, when both legs have one.
    pub composed: Option<RateWitness>,
    pub composed_replays: Option<bool>,
}

/// A rate-graph node: a primitive root (discrete) or a roster state (numeric).
#[derive(Debug, Clone)]
pub struct RateNode {
    pub label: String,
    pub state: State,
    pub free: bool,
}

/// Rate search over every roster state of an instance.
pub struct RateEngine<'a> {
    q: &'a QrtInstance,
    config: RateConfig,
    width: usize,
    explorer: Explorer<'a>,
    nodes: Vec<RateNode>,
    root_index: HashMap<Vec<u8>, usize>,
    sources: Vec<(usize, usize)>,
    source_index: HashMap<(usize, usize), usize>,
    targets: Vec<(usize, usize)>,
    /// `table[s][t]`: sources[s] reaches targets[t].
    table: Vec<Vec<bool>>,
    numeric_words: HashMap<(usize, usize), Word>,
    /// Finite max-times closure before infinities are propagated.
    chained: Vec<Vec<Option<Rc<Plan>>>>,
    value: Vec<Vec<ExtRational>>,
    via: Vec<Vec<Option<usize>>>,
}

/// (root, k) with t = root^k and root primitive.
pub fn primitive_root(t: &[u8]) -> (Vec<u8>, usize) {
    let len = t.len();
    for p in 1..len {
        if len.is_multiple_of(p) && t.chunks(p).all(|c| c == &t[..p]) {
            return (t[..p].to_vec(), len / p);
        }
    }
    (t.to_vec(), 1)
}

impl<'a> RateEngine<'a> {
    pub fn new(q: &'a QrtInstance, config: RateConfig) -> Result<Self, ModelError> {
        let n_max = config.n_max.max(1);
        let config = RateConfig { n_max, ..config };
        let width = if q.is_discrete() { n_max * q.max_level } else { q.max_level };
        let mut nodes: Vec<RateNode> = Vec::new();
        let mut root_index = HashMap::new();
        for level in q.roster_levels() {
            for r in q.roster(level) {
                match &r.state {
                    State::Discrete(t) => {
                        let (root, _) = primitive_root(t);
                        if !root_index.contains_key(&root) {
                            root_index.insert(root.clone(), nodes.len());
                            nodes.push(RateNode {
                                label: q.format_tuple(&root),
                                state: State::Discrete(root),
                                free: false,
                            });
                        }
                    }
                    State::Numeric(_) => {
                        if !nodes.iter().any(|n| n.state.approx_eq(&r.state, config.epsilon)) {
                            nodes.push(RateNode {
                                label: r.label.clone(),
                                state: r.state.clone(),
                                free: false,
                            });
                        }
                    }
                }
            }
        }
        let mut sources = Vec::new();
        for (i, node) in nodes.iter().enumerate() {
            let lvl = node.state.level();
            for a in (1..).take_while(|a| a * lvl <= width) {
                sources.push((i, a));
            }
        }
        let targets = sources.clone();
        let source_index = sources.iter().enumerate().map(|(s, &k)| (k, s)).collect();
        let mut engine = Self {
            q,
            config,
            width,
            explorer: Explorer::new(q)?,
            nodes,
            root_index,
            sources,
            source_index,
            targets,
            table: Vec::new(),
            numeric_words: HashMap::new(),
            chained: Vec::new(),
            value: Vec::new(),
            via: Vec::new(),
        };
        engine.search()?;
        engine.close();
        Ok(engine)
    }

    pub fn instance(&self) -> &'a QrtInstance {
        self.q
    }

    pub fn config(&self) -> RateConfig {
        self.config
    }

    /// Widest intermediate system the search allows.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn nodes(&self) -> &[RateNode] {
        &self.nodes
    }

    fn power(&self, node: usize, a: usize) -> State {
        self.nodes[node].state.tensor_power(a)
    }

    fn search(&mut self) -> Result<(), ModelError> {
        let width = self.width;
        let source_states: Vec<State> = self.sources.iter().map(|&(i, a)| self.power(i, a)).collect();
        let target_states = source_states.clone();
        let scalar = scalar_state(self.q);
        let free_row: Vec<bool>;
        match &mut self.explorer {
            Explorer::Discrete(x) if self.q.depth_limit().is_none() => {
                let tuple = |s: &State| s.as_tuple().expect("discrete").to_vec();
                let mut srcs: Vec<Vec<u8>> = source_states.iter().map(tuple).collect();
                srcs.push(Vec::new());
                let tgts: Vec<Vec<u8>> = target_states.iter().map(tuple).collect();
                let mut table = x.reachability(&srcs, &tgts, width)?;
                free_row = table.pop().expect("scalar row");
                self.table = table;
            }
            explorer => {
                let mut table = Vec::with_capacity(source_states.len());
                for (si, s) in source_states.iter().enumerate() {
                    let reach = explorer.reach(s, width)?;
                    let mut row = Vec::with_capacity(target_states.len());
                    for (ti, t) in target_states.iter().enumerate() {
                        let w = reach.witness(t);
                        if let (Some(w), false) = (&w, self.q.is_discrete()) {
                            self.numeric_words.insert((si, ti), w.clone());
                        }
                        row.push(w.is_some());
                    }
                    table.push(row);
                }
                let reach = explorer.reach(&scalar, width)?;
                free_row = target_states.iter().map(|t| reach.contains(t)).collect();
                self.table = table;
            }
        }
        for (ti, &(node, b)) in self.targets.iter().enumerate() {
            if b == 1 && free_row[ti] {
                self.nodes[node].free = true;
            }
        }
        Ok(())
    }

    fn close(&mut self) {
        let k = self.nodes.len();
        let mut best: Vec<Vec<Option<Rc<Plan>>>> = vec![vec![None; k]; k];
        for (si, &(src, a)) in self.sources.iter().enumerate() {
            for (ti, &(dst, b)) in self.targets.iter().enumerate() {
                if !self.table[si][ti] {
                    continue;
                }
                let better = match &best[src][dst] {
                    None => true,
                    Some(p) => big_ratio(b, a) > p.ratio(),
                };
                if better {
                    best[src][dst] = Some(Rc::new(Plan::Direct {
                        src,
                        n: a,
                        dst,
                        m: b,
                        word: self.numeric_words.get(&(si, ti)).cloned(),
                    }));
                }
            }
        }
        for (i, row) in best.iter_mut().enumerate() {
            if row[i].is_none() {
                row[i] = Some(Rc::new(Plan::Direct {
                    src: i,
                    n: 1,
                    dst: i,
                    m: 1,
                    word: Some(self.q.identity_word(self.nodes[i].state.level())),
                }));
            }
        }
        // Max-times Floyd–Warshall; exact for pairs not routed through an amplifying cycle.
        // Routes through an amplifying node are +∞ anyway, so the relaxation
        // never uses an endpoint as its midpoint.
        for mid in 0..k {
            for i in (0..k).filter(|&i| i != mid) {
                let Some(a) = best[i][mid].clone() else { continue };
                for j in (0..k).filter(|&j| j != mid) {
                    let Some(b) = best[mid][j].clone() else { continue };
                    let through = a.ratio() * b.ratio();
                    if best[i][j].as_ref().is_none_or(|p| through > p.ratio()) {
                        if let Some(plan) = Plan::chain(&a, &b) {
                            best[i][j] = Some(plan);
                        }
                    }
                }
            }
        }
        let one = BigRational::one();
        let amplifying: Vec<bool> = (0..k)
            .map(|i| best[i][i].as_ref().is_some_and(|p| p.ratio() > one))
            .collect();
        let mut value = vec![vec![ExtRational::zero(); k]; k];
        let mut via = vec![vec![None; k]; k];
        for i in 0..k {
            for j in 0..k {
                if let Some(p) = &best[i][j] {
                    value[i][j] = ExtRational::Finite(p.ratio());
                }
                if let Some(amp) = (0..k).find(|&a| amplifying[a] && best[i][a].is_some() && best[a][j].is_some()) {
                    value[i][j] = ExtRational::Infinite;
                    via[i][j] = Some(amp);
                }
            }
        }
        for j in (0..k).filter(|&j| self.nodes[j].free) {
            for row in value.iter_mut() {
                row[j] = ExtRational::Infinite;
            }
        }
        for i in (0..k).filter(|&i| self.nodes[i].free) {
            for j in (0..k).filter(|&j| !self.nodes[j].free) {
                value[i][j] = ExtRational::zero();
            }
        }
        self.chained = best;
        self.value = value;
        self.via = via;
    }

    /// (node, k) with `state` = node^k.
    pub fn locate(&self, state: &State) -> Result<(usize, usize), ModelError> {
        match state {
            State::Discrete(t) => {
                let (root, k) = primitive_root(t);
                self.root_index
                    .get(&root)
                    .map(|&i| (i, k))
                    .ok_or_else(|| ModelError::UnknownState(self.q.describe(state)))
            }
            State::Numeric(_) => self
                .nodes
                .iter()
                .position(|n| n.state.approx_eq(state, self.config.epsilon))
                .map(|i| (i, 1))
                .ok_or_else(|| ModelError::UnknownState(self.q.describe(state))),
        }
    }

    pub fn is_free(&self, state: &State) -> Result<bool, ModelError> {
        Ok(self.nodes[self.locate(state)?.0].free)
    }

    /// The rate estimate without witnesses.
    pub fn rate_value(&self, from: &State, to: &State) -> Result<ExtRational, ModelError> {
        let (i, k) = self.locate(from)?;
        let (j, p) = self.locate(to)?;
        Ok(self.value[i][j].mul(&ExtRational::ratio(k as u64, p as u64)))
    }

    pub fn estimate(&self, from: &State, to: &State) -> Result<RateEstimate, ModelError> {
        let (i, k) = self.locate(from)?;
        let (j, p) = self.locate(to)?;
        let rate = self.value[i][j].mul(&ExtRational::ratio(k as u64, p as u64));
        let mut witnesses = Vec::new();
        for n in 1..=self.config.n_max {
            let Some(&si) = self.source_index.get(&(i, k * n)) else { break };
            let best_m = self
                .targets
                .iter()
                .enumerate()
                .filter(|&(ti, &(node, b))| node == j && b % p == 0 && self.table[si][ti])
                .map(|(ti, &(_, b))| (ti, b / p))
                .max_by_key(|&(_, m)| m);
            if let Some((ti, m)) = best_m {
                witnesses.push(RateWitness {
                    n,
                    m,
                    plan: Rc::new(Plan::Direct {
                        src: i,
                        n: k * n,
                        dst: j,
                        m: p * m,
                        word: self.numeric_words.get(&(si, ti)).cloned(),
                    }),
                });
            }
        }
        let direct_best = witnesses.iter().map(RateWitness::ratio).max();
        if let Some(plan) = &self.chained[i][j] {
            if direct_best.as_ref().is_none_or(|b| plan.ratio() * big_ratio(k, p) > *b) {
                if let Some(parallel) = Plan::parallel(plan, k * p) {
                    witnesses.push(RateWitness {
                        n: plan.n() * p,
                        m: plan.m() * k,
                        plan: parallel,
                    });
                }
            }
        }
        let witnessed = witnesses
            .iter()
            .map(RateWitness::ratio)
            .max()
            .map(ExtRational::Finite)
            .unwrap_or_else(ExtRational::zero);
        let upper = match (&rate, self.q.is_discrete()) {
            (ExtRational::Infinite, _) => UpperBound::Unbounded,
            (r, true) => UpperBound::AtHorizon(r.clone()),
            (_, false) => UpperBound::Unknown,
        };
        Ok(RateEstimate {
            source: self.q.describe(from),
            target: self.q.describe(to),
            rate,
            witnessed,
            witnesses,
            upper,
            amplifier: self.via[i][j].map(|a| self.nodes[a].label.clone()),
            n_max: self.config.n_max,
            epsilon: self.config.epsilon,
        })
    }

    /// The word realizing `plan` on src^n.
    pub fn plan_word(&mut self, plan: &Plan) -> Result<Word, ModelError> {
        if plan.leaves() > MAX_REPLAY_LEAVES {
            return Err(ModelError::WitnessTooLarge { leaves: plan.leaves() });
        }
        match plan {
            Plan::Direct { word: Some(w), .. } => Ok(w.clone()),
            Plan::Direct { src, n, dst, m, word: None } => {
                if src == dst && n == m {
                    return Ok(self.q.identity_word(n * self.nodes[*src].state.level()));
                }
                let from = self.power(*src, *n);
                let to = self.power(*dst, *m);
                let reach = self.explorer.reach(&from, self.width)?;
                reach.witness(&to).ok_or_else(|| {
                    ModelError::Schema(format!("lost witness {}^{n} -> {}^{m}", self.nodes[*src].label, self.nodes[*dst].label))
                })
            }
            Plan::Parallel(p, blocks) => {
                let w = self.plan_word(p)?;
                let block = p.n() * self.nodes[p.src()].state.level();
                let mut steps = Vec::new();
                for b in (0..*blocks).rev() {
                    steps.extend(w.shifted(b * block).0);
                }
                Ok(Word(steps))
            }
            Plan::Then(a, b) => Ok(self.plan_word(a)?.then(&self.plan_word(b)?)),
        }
    }

    /// Subsystems a replay of `plan` may occupy at once, bounded from above.
    pub fn peak_width(&self, plan: &Plan) -> usize {
        let lvl = |i: usize| self.nodes[i].state.level();
        match plan {
            Plan::Direct { src, n, dst, m, .. } => self.width.max(n * lvl(*src)).max(m * lvl(*dst)),
            Plan::Parallel(p, k) => self.peak_width(p).saturating_mul(*k),
            Plan::Then(a, b) => self.peak_width(a).max(self.peak_width(b)),
        }
    }

    /// Whether replaying `plan` stays within the expansion and dimension caps.
    pub fn can_replay(&self, plan: &Plan) -> bool {
        if plan.leaves() > MAX_REPLAY_LEAVES {
            return false;
        }
        self.q.is_discrete()
            || u32::try_from(self.peak_width(plan))
                .ok()
                .and_then(|w| self.q.base_dim.checked_pow(w))
                .is_some_and(|d| d <= MAX_NUMERIC_REPLAY_DIM)
    }

    /// Replays `plan` on src^n and compares with dst^m.
    pub fn plan_replays(&mut self, plan: &Plan) -> Result<bool, ModelError> {
        let word = self.plan_word(plan)?;
        let out = self.q.replay(&word, &self.power(plan.src(), plan.n()))?;
        let tol = self.config.epsilon * plan.leaves() as f64;
        Ok(out.approx_eq(&self.power(plan.dst(), plan.m()), tol))
    }

    /// Replays a witness between the queried states.
    pub fn witness_replays(&mut self, w: &RateWitness, from: &State, to: &State) -> Result<bool, ModelError> {
        let word = self.plan_word(&w.plan)?;
        let out = self.q.replay(&word, &from.tensor_power(w.n))?;
        let tol = self.config.epsilon * w.plan.leaves() as f64;
        Ok(out.approx_eq(&to.tensor_power(w.m), tol))
    }

    pub fn replication(&mut self, state: &State) -> Result<ReplicationVerdict, ModelError> {
        let (i, k) = self.locate(state)?;
        let is_free = self.nodes[i].free;
        let infinite = self.value[i][i].is_infinite();
        let verdict = if infinite {
            Replication::Infinite
        } else if self.q.is_discrete() && self.q.depth_limit().is_none() {
            Replication::Unit
        } else {
            Replication::Unknown
        };
        let witness = if infinite { self.amplification_witness(state, i, k)? } else { None };
        Ok(ReplicationVerdict {
            state: self.q.describe(state),
            verdict,
            is_free,
            witness,
            n_max: self.config.n_max,
        })
    }

    fn amplification_witness(&mut self, state: &State, i: usize, k: usize) -> Result<Option<RateWitness>, ModelError> {
        let est = self.estimate(state, state)?;
        if let Some(w) = est.witnesses.iter().filter(|w| w.m > w.n).min_by_key(|w| (w.plan.leaves(), w.n, std::cmp::Reverse(w.m))) {
            return Ok(Some(w.clone()));
        }
        if self.nodes[i].free {
            // Prepare one more copy from nothing, next to the original.
            let prep = self.explorer.reach(&scalar_state(self.q), self.width)?.witness(state);
            return Ok(prep.map(|w| RateWitness {
                n: 1,
                m: 2,
                plan: Rc::new(Plan::Direct {
                    src: i,
                    n: k,
                    dst: i,
                    m: 2 * k,
                    word: Some(w.shifted(state.level())),
                }),
            }));
        }
        let Some(amp) = self.via[i][i] else { return Ok(None) };
        let (Some(to), Some(pump), Some(back)) =
            (self.chained[i][amp].clone(), self.chained[amp][amp].clone(), self.chained[amp][i].clone())
        else {
            return Ok(None);
        };
        let one = BigRational::one();
        let mut cycle = Plan::chain(&to, &pump);
        while let Some(c) = cycle.clone() {
            match Plan::chain(&c, &back) {
                Some(plan) if plan.ratio() > one => {
                    return Ok(Plan::parallel(&plan, k).map(|parallel| RateWitness {
                        n: plan.n(),
                        m: plan.m(),
                        plan: parallel,
                    }));
                }
                Some(_) => cycle = Plan::chain(&c, &pump),
                None => break,
            }
        }
        Ok(None)
    }

    /// r′ from the transposed witness pool against 1/r.
    pub fn reciprocity(&self, from: &State, to: &State) -> Result<ReciprocityReport, ModelError> {
        let est = self.estimate(from, to)?;
        let transposed = est
            .witnesses
            .iter()
            .filter(|w| w.m > 0)
            .map(|w| big_ratio(w.n, w.m))
            .min()
            .map(ExtRational::Finite)
            .unwrap_or(ExtRational::Infinite);
        let reciprocal = if est.rate.is_infinite() { ExtRational::zero() } else { transposed };
        let consistent = reciprocal == est.rate.recip();
        Ok(ReciprocityReport {
            rate: est.rate,
            reciprocal,
            consistent,
        })
    }

    /// r(ρ→ω) ≥ r(ρ→σ)·r(σ→ω), with the composed witness replayed.
    pub fn chain_check(&mut self, rho: &State, sigma: &State, omega: &State) -> Result<ChainReport, ModelError> {
        let first = self.estimate(rho, sigma)?;
        let second = self.estimate(sigma, omega)?;
        let direct = self.rate_value(rho, omega)?;
        let product = first.rate.mul(&second.rate);
        let best = |e: &RateEstimate| e.witnesses.iter().max_by(|a, b| a.ratio().cmp(&b.ratio())).cloned();
        let (mut composed, mut composed_replays) = (None, None);
        if let (Some(a), Some(b)) = (best(&first), best(&second)) {
            // ρ^(n_a·n_b) → σ^(m_a·n_b) → ω^(m_a·m_b), at the level of the queried states.
            let (_, k_sigma) = self.locate(sigma)?;
            if let (Some(aligned_a), Some(aligned_b)) = (Plan::parallel(&a.plan, b.n), Plan::parallel(&b.plan, a.m)) {
                debug_assert_eq!(aligned_a.m(), aligned_b.n());
                debug_assert_eq!(aligned_a.m(), a.m * b.n * k_sigma);
                let w = RateWitness {
                    n: a.n * b.n,
                    m: a.m * b.m,
                    plan: Rc::new(Plan::Then(aligned_a, aligned_b)),
                };
                if self.can_replay(&w.plan) {
                    composed_replays = Some(self.witness_replays(&w, rho, omega)?);
                }
                composed = Some(w);
            }
        }
        let composed_ok = composed
            .as_ref()
            .is_none_or(|w| direct >= ExtRational::Finite(w.ratio()));
        Ok(ChainReport {
            holds: direct >= product && composed_ok && composed_replays != Some(false),
            direct,
            product,
            composed,
            composed_replays,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_instance_str;

    fn instance(extra_generator: &str) -> QrtInstance {
        load_instance_str(&format!(
            r#"{{"flavor": "discrete", "alphabet": ["0", "1"], "max_level": 2,
                "generators": [
                    {{"name": "id", "kind": "builtin:identity"}},
                    {{"name": "tr", "kind": "builtin:trace"}},
                    {{"name": "append0", "kind": "builtin:append", "payload": "0"}},
                    {extra_generator}
                ]}}"#
        ))
        .unwrap()
    }

    const CNOT: &str = r#"{"name": "cnot", "kind": "discrete", "payload": {"00": "00", "01": "01", "10": "11", "11": "10"}}"#;
    const SWAP: &str = r#"{"name": "swap", "kind": "discrete", "payload": {"00": "00", "01": "10", "10": "01", "11": "11"}}"#;

    fn t(bits: &[u8]) -> State {
        State::Discrete(bits.to_vec())
    }

    #[test]
    fn roots() {
        assert_eq!(primitive_root(&[1, 0, 1, 0]), (vec![1, 0], 2));
        assert_eq!(primitive_root(&[1, 1, 1]), (vec![1], 3));
        assert_eq!(primitive_root(&[1, 0, 0]), (vec![1, 0, 0], 1));
    }

    #[test]
    fn copying_makes_one_unbounded() {
        let q = instance(CNOT);
        let mut e = RateEngine::new(&q, RateConfig::default()).unwrap();
        let est = e.estimate(&t(&[1]), &t(&[1])).unwrap();
        assert!(est.rate.is_infinite());
        assert_eq!(est.upper, UpperBound::Unbounded);
        let pairs: Vec<(usize, usize)> = est.witnesses.iter().map(|w| (w.n, w.m)).collect();
        assert!(pairs.contains(&(1, 6)), "{pairs:?}");
        for w in &est.witnesses {
            assert!(e.witness_replays(w, &t(&[1]), &t(&[1])).unwrap());
        }
        let v = e.replication(&t(&[1])).unwrap();
        assert_eq!(v.verdict, Replication::Infinite);
        assert!(v.catalytically_replicable());
        let w = v.witness.unwrap();
        assert!(w.m > w.n && e.witness_replays(&w, &t(&[1]), &t(&[1])).unwrap());

        let zero = e.replication(&t(&[0])).unwrap();
        assert_eq!(zero.verdict, Replication::Infinite);
        assert!(zero.is_free && !zero.catalytically_replicable());
        assert_eq!(e.rate_value(&t(&[0]), &t(&[1])).unwrap(), ExtRational::zero());
    }

    #[test]
    fn swapping_conserves_ones() {
        let q = instance(SWAP);
        let mut e = RateEngine::new(&q, RateConfig::default()).unwrap();
        let one = t(&[1]);
        let est = e.estimate(&one, &one).unwrap();
        assert_eq!(est.rate, ExtRational::one());
        assert_eq!(est.upper, UpperBound::AtHorizon(ExtRational::one()));
        assert_eq!(e.replication(&one).unwrap().verdict, Replication::Unit);
        assert_eq!(e.rate_value(&t(&[0, 1]), &t(&[1, 1])).unwrap(), ExtRational::ratio(1, 2));
        assert_eq!(e.rate_value(&t(&[1, 1]), &t(&[0, 1])).unwrap(), ExtRational::ratio(2, 1));
        assert_eq!(e.rate_value(&t(&[1]), &t(&[0])).unwrap(), ExtRational::Infinite);

        let rec = e.reciprocity(&one, &one).unwrap();
        assert!(rec.consistent && rec.reciprocal == ExtRational::one());
        let chain = e.chain_check(&t(&[1, 1]), &one, &t(&[0, 1])).unwrap();
        assert!(chain.holds);
        assert_eq!(chain.composed_replays, Some(true));
        assert_eq!(est.ceiling_lower(), est.floor_lower());
    }
}
