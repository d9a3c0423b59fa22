//! Operational measures (distillable resource and resource cost), the
//! relative entropy of resource, and checkers for the structural properties a
//! resource measure may claim.

mod checks;
pub mod rer;
mod uniqueness;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::linalg::{trace_distance, DensityMatrix, LinalgError};
use crate::model::{
    free_states_with, scalar_state, Explorer, FreeStateSet, MeasureDecl, ModelError, QrtInstance, RMaxRule, Reach, State,
};
use crate::preorder::{equivalence_classes, maximal_set, preorder_matrix_with, MaximalSet, PreorderRelation, QuotientOrder};
use crate::rates::{ExtRational, RateConfig, RateEngine};

pub use checks::{
    asymptotic_continuity_proxy, check_additivity_family, check_consistency, check_monotonicity, check_normalization,
    lower_semicontinuity_proxy, Counterexample, MeasureVerdict, Verdict, ADDITIVITY_TOL, MONOTONICITY_SLACK,
};
pub use rer::{
    regularized_rer_estimate, relative_entropy_of_resource, tensor_hull, FreeSpec, RegularizedEstimate, RerSolution,
    SolverConfig, StepRule,
};
pub use uniqueness::{
    inconsistency_detector, uniqueness_report, CrossClassAmplification, DetectorReport, HypothesisSet, SandwichEntry,
    SandwichStatus, SetStatus, UniquenessReport, SANDWICH_TOL,
};

/// How R_max scales with the level.
pub type NormalizationRule = RMaxRule;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeasureError {
    #[error("the free set is empty, so the relative entropy of resource is undefined")]
    EmptyFreeSet,
    #[error("measure `{measure}` is not defined on {state}")]
    Undefined { measure: String, state: String },
    #[error("no roster at level {0}")]
    NoRoster(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Everything the measures need about one level.
#[derive(Debug, Clone)]
pub struct LevelData {
    pub relation: PreorderRelation,
    pub quotient: QuotientOrder,
    pub maximal: MaximalSet,
    pub free: FreeStateSet,
}

/// An R_D or R_C value as an exact multiple of the instance's R_max unit.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceValue {
    /// Value in units of `unit`; R_max at level L is L units under
    /// `LOG2_DIM` and one unit under a constant rule.
    pub units: ExtRational,
    pub unit: f64,
    /// Label of the maximal state attaining the minimum.
    pub argmin: Option<String>,
    /// True when the underlying rates are exact (discrete, full closure).
    pub exact: bool,
}

impl ResourceValue {
    pub fn value(&self) -> f64 {
        if self.unit == 0.0 {
            return 0.0;
        }
        self.units.to_f64() * self.unit
    }

    pub fn is_infinite(&self) -> bool {
        self.units.is_infinite() && self.unit > 0.0
    }
}

impl fmt::Display for ResourceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.value())
        }
    }
}

/// Rates, preorders and free sets of one instance, computed once.
pub struct ResourceContext<'a> {
    pub q: &'a QrtInstance,
    pub engine: RateEngine<'a>,
    pub levels: BTreeMap<usize, LevelData>,
    pub explorer: Explorer<'a>,
    scalar_reach: Reach,
}

impl<'a> ResourceContext<'a> {
    pub fn new(q: &'a QrtInstance, config: RateConfig) -> Result<Self, ModelError> {
        let engine = RateEngine::new(q, config)?;
        let mut explorer = Explorer::new(q)?;
        let mut levels = BTreeMap::new();
        for level in q.roster_levels() {
            let relation = preorder_matrix_with(&mut explorer, q, level)?;
            let quotient = equivalence_classes(&relation);
            let maximal = maximal_set(&relation);
            let free = free_states_with(&mut explorer, q, level)?;
            levels.insert(
                level,
                LevelData {
                    relation,
                    quotient,
                    maximal,
                    free,
                },
            );
        }
        let scalar_reach = explorer.closed_reach(&scalar_state(q), q.max_level)?;
        Ok(Self {
            q,
            engine,
            levels,
            explorer,
            scalar_reach,
        })
    }

    pub fn level(&self, level: usize) -> Result<&LevelData, MeasureError> {
        self.levels.get(&level).ok_or(MeasureError::NoRoster(level))
    }

    /// R_max at `level` in units: (multiplier, unit).
    pub fn r_max_units(&self, level: usize) -> (ExtRational, f64) {
        match self.q.r_max {
            RMaxRule::Log2Dim => (ExtRational::ratio(level as u64, 1), (self.q.base_dim as f64).log2()),
            RMaxRule::Constant(c) => (ExtRational::one(), c),
        }
    }

    pub fn exact(&self) -> bool {
        self.q.is_discrete() && self.q.depth_limit().is_none()
    }

    /// Whether the scalar system prepares `state`.
    pub fn is_free(&self, state: &State) -> Result<bool, MeasureError> {
        if state.level() <= self.q.max_level {
            return Ok(self.scalar_reach.contains(state));
        }
        match state {
            State::Discrete(t) => {
                let (root, _) = crate::rates::primitive_root(t);
                Ok(root.len() <= self.q.max_level && self.scalar_reach.contains(&State::Discrete(root)))
            }
            State::Numeric(_) => Ok(self.engine.is_free(state)?),
        }
    }

    /// R_D(ψ) = min over φ ∈ G of r(ψ→φ)·R_max.
    pub fn distillable_resource(&self, psi: &State) -> Result<ResourceValue, MeasureError> {
        let data = self.level(psi.level())?;
        self.distillable_over(psi, &data.maximal.members)
    }

    /// R_C(ψ) = min over φ ∈ G of R_max / r(φ→ψ).
    pub fn resource_cost(&self, psi: &State) -> Result<ResourceValue, MeasureError> {
        let data = self.level(psi.level())?;
        self.cost_over(psi, &data.maximal.members)
    }

    /// R_D with the infimum over the whole roster at ψ's level.
    pub fn distillable_over_roster(&self, psi: &State) -> Result<ResourceValue, MeasureError> {
        let n = self.level(psi.level())?.relation.len();
        self.distillable_over(psi, &(0..n).collect::<Vec<_>>())
    }

    pub fn cost_over_roster(&self, psi: &State) -> Result<ResourceValue, MeasureError> {
        let n = self.level(psi.level())?.relation.len();
        self.cost_over(psi, &(0..n).collect::<Vec<_>>())
    }

    fn distillable_over(&self, psi: &State, candidates: &[usize]) -> Result<ResourceValue, MeasureError> {
        self.minimize(psi.level(), candidates, |phi| self.engine.rate_value(psi, phi))
    }

    fn cost_over(&self, psi: &State, candidates: &[usize]) -> Result<ResourceValue, MeasureError> {
        self.minimize(psi.level(), candidates, |phi| Ok(self.engine.rate_value(phi, psi)?.recip()))
    }

    fn minimize(
        &self,
        level: usize,
        candidates: &[usize],
        factor: impl Fn(&State) -> Result<ExtRational, ModelError>,
    ) -> Result<ResourceValue, MeasureError> {
        let roster = &self.level(level)?.relation.roster;
        let (mult, unit) = self.r_max_units(level);
        let mut best: Option<(ExtRational, usize)> = None;
        for &c in candidates {
            let units = factor(&roster[c].state)?.mul(&mult);
            if best.as_ref().is_none_or(|(b, _)| units < *b) {
                best = Some((units, c));
            }
        }
        let (units, arg) = best.ok_or(MeasureError::NoRoster(level))?;
        Ok(ResourceValue {
            units,
            unit,
            argmin: Some(roster[arg].label.clone()),
            exact: self.exact(),
        })
    }

    /// Level-1 free states as density matrices, the extremes of the default
    /// free hull.
    pub fn free_extremes(&self) -> Result<Vec<DensityMatrix>, MeasureError> {
        let free = &self.level(1)?.free;
        Ok(free.states.iter().map(|r| as_density(self.q, &r.state)).collect())
    }
}

/// Declared measure properties; claims to be checked, never assumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureProperty {
    Monotone,
    WeaklyAdditive,
    StronglySuperadditive,
    ConventionallyNormalized,
    LowerSemicontinuous,
    AsymptoticallyContinuous,
    Consistent,
}

/// A pure state function, for measures not expressible as a built-in.
pub type StateFunction = Rc<dyn Fn(&QrtInstance, &State) -> f64>;

#[derive(Clone)]
pub enum MeasureKind {
    /// Number of `1` symbols in a tuple.
    CountOnes,
    /// Relative entropy of resource against the tensor hull of the level-1
    /// free states (discrete tuples embed as basis states).
    Rer(SolverConfig),
    Zero,
    /// ‖ψ − ref‖₁, and 2 between systems of different sizes.
    TraceDistanceTo(State),
    /// Values per (level, label); other states are outside its domain.
    Table(HashMap<(usize, String), f64>),
    Function(StateFunction),
}

impl fmt::Debug for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureKind::CountOnes => write!(f, "CountOnes"),
            MeasureKind::Rer(cfg) => write!(f, "Rer({cfg:?})"),
            MeasureKind::Zero => write!(f, "Zero"),
            MeasureKind::TraceDistanceTo(s) => write!(f, "TraceDistanceTo({s:?})"),
            MeasureKind::Table(t) => write!(f, "Table({} entries)", t.len()),
            MeasureKind::Function(_) => write!(f, "Function"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResourceMeasure {
    pub name: String,
    pub kind: MeasureKind,
    pub declared: Vec<MeasureProperty>,
}

impl ResourceMeasure {
    pub fn new(name: impl Into<String>, kind: MeasureKind) -> Self {
        Self {
            name: name.into(),
            kind,
            declared: Vec::new(),
        }
    }

    pub fn count_ones() -> Self {
        Self::new("count_ones", MeasureKind::CountOnes)
    }

    pub fn zero() -> Self {
        Self::new("zero", MeasureKind::Zero)
    }

    pub fn rer() -> Self {
        Self::new("rer", MeasureKind::Rer(SolverConfig::default()))
    }

    pub fn function(name: impl Into<String>, f: impl Fn(&QrtInstance, &State) -> f64 + 'static) -> Self {
        Self::new(name, MeasureKind::Function(Rc::new(f)))
    }

    pub fn from_decl(q: &QrtInstance, decl: &MeasureDecl) -> Result<Self, ModelError> {
        let name = decl.name().to_string();
        let kind = match decl {
            MeasureDecl::CountOnes { .. } => MeasureKind::CountOnes,
            MeasureDecl::Rer { .. } => MeasureKind::Rer(SolverConfig::default()),
            MeasureDecl::Zero { .. } => MeasureKind::Zero,
            MeasureDecl::TraceDistanceTo { level, label, .. } => MeasureKind::TraceDistanceTo(q.state(*level, label)?),
            MeasureDecl::Table { entries, .. } => MeasureKind::Table(
                entries
                    .iter()
                    .map(|(level, label, v)| ((*level, label.clone()), *v))
                    .collect(),
            ),
        };
        Ok(Self::new(name, kind))
    }

    /// R(state), or `None` outside the measure's domain.
    pub fn evaluate(&self, ctx: &ResourceContext<'_>, state: &State) -> Result<Option<f64>, MeasureError> {
        let q = ctx.q;
        Ok(Some(match &self.kind {
            MeasureKind::Zero => 0.0,
            MeasureKind::CountOnes => match state {
                State::Discrete(t) => {
                    let one = q.alphabet.iter().position(|s| s == "1");
                    t.iter().filter(|&&c| Some(c as usize) == one).count() as f64
                }
                State::Numeric(_) => return Ok(None),
            },
            MeasureKind::TraceDistanceTo(reference) => match (state, reference) {
                (State::Discrete(a), State::Discrete(b)) => {
                    if a == b {
                        0.0
                    } else {
                        2.0
                    }
                }
                (State::Numeric(a), State::Numeric(b)) if a.subsystem_dims() == b.subsystem_dims() => {
                    trace_distance(a.matrix(), b.matrix())?
                }
                _ => 2.0,
            },
            MeasureKind::Table(t) => match t.get(&(state.level(), q.describe(state))) {
                Some(v) => *v,
                None => return Ok(None),
            },
            MeasureKind::Function(f) => f(q, state),
            MeasureKind::Rer(cfg) => match state {
                State::Discrete(_) => {
                    if ctx.is_free(state)? {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                }
                State::Numeric(rho) => {
                    if state.level() == 0 {
                        0.0
                    } else {
                        let hull = tensor_hull(&ctx.free_extremes()?, state.level());
                        relative_entropy_of_resource(rho, &FreeSpec::ConvexHull(hull), cfg)?.value
                    }
                }
            },
        }))
    }

    /// R(state), treating states outside the domain as an error.
    pub fn value(&self, ctx: &ResourceContext<'_>, state: &State) -> Result<f64, MeasureError> {
        self.evaluate(ctx, state)?.ok_or_else(|| MeasureError::Undefined {
            measure: self.name.clone(),
            state: ctx.q.describe(state),
        })
    }
}

/// A state as a density matrix; tuples become computational-basis states.
pub fn as_density(q: &QrtInstance, state: &State) -> DensityMatrix {
    match state {
        State::Numeric(rho) => rho.clone(),
        State::Discrete(t) => {
            let d = q.base_dim;
            let k = t.iter().fold(0usize, |acc, &c| acc * d + c as usize);
            DensityMatrix::basis(&vec![d; t.len()], k)
        }
    }
}
