//! The sandwich R_D ≤ R ≤ R_C, the hypothesis sets that imply it, and the
//! detector for instances where no conventionally normalized, asymptotically
//! continuous, weakly additive measure can exist.

use crate::model::State;
use crate::rates::{ExtRational, RateWitness};

use super::checks::{
    asymptotic_continuity_proxy, check_additivity_family, check_normalization, lower_semicontinuity_proxy, MeasureVerdict,
    Verdict,
};
use super::{MeasureError, ResourceContext, ResourceMeasure, ResourceValue};

/// Tolerance of the sandwich check, dominated by the relative-entropy solver.
pub const SANDWICH_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SandwichStatus {
    Holds,
    Violated,
    /// A catalytically replicable state: R_D = ∞ and R_C = 0, so no finite
    /// measure fits between them. Reported, never counted as a failure.
    CatalyticException,
    OutsideDomain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichEntry {
    pub state: String,
    pub distillable: ResourceValue,
    pub cost: ResourceValue,
    pub value: Option<f64>,
    pub status: SandwichStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetStatus {
    Satisfied,
    Refuted,
    Undecided,
}

/// One sufficient set of hypotheses for the sandwich.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisSet {
    pub name: String,
    pub verdicts: Vec<MeasureVerdict>,
    pub status: SetStatus,
}

impl HypothesisSet {
    fn new(name: &str, verdicts: Vec<MeasureVerdict>) -> Self {
        let status = if verdicts.iter().any(|v| v.verdict.is_fail()) {
            SetStatus::Refuted
        } else if verdicts.iter().all(|v| v.verdict.is_pass()) {
            SetStatus::Satisfied
        } else {
            SetStatus::Undecided
        };
        Self {
            name: name.into(),
            verdicts,
            status,
        }
    }
}

/// A witnessed conversion with rate above 1 between two maximal classes.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossClassAmplification {
    pub level: usize,
    pub from: String,
    pub to: String,
    pub rate: ExtRational,
    pub witness: RateWitness,
    pub word: Option<String>,
    pub replayed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorReport {
    pub fires: bool,
    pub findings: Vec<CrossClassAmplification>,
    pub message: Option<String>,
}

pub const DETECTOR_MESSAGE: &str =
    "no resource measure satisfies conventional normalization, asymptotic continuity and weak additivity on this instance";

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub measure: String,
    pub sandwich: Vec<SandwichEntry>,
    /// No entry is `Violated`.
    pub sandwich_holds: bool,
    pub hypotheses: Vec<HypothesisSet>,
    pub detector: DetectorReport,
}

/// If two maximal states φ₁ ≁ φ₂ convert at a witnessed rate r > 1, any
/// normalized consistent measure would need R_max·r ≤ R_max.
pub fn inconsistency_detector(ctx: &mut ResourceContext<'_>) -> Result<DetectorReport, MeasureError> {
    let mut findings = Vec::new();
    let levels: Vec<usize> = ctx.levels.keys().copied().collect();
    for level in levels {
        let data = &ctx.levels[&level];
        let reps: Vec<State> = data
            .quotient
            .maximal_classes
            .iter()
            .map(|&c| data.relation.roster[data.quotient.classes[c][0]].state.clone())
            .collect();
        for a in &reps {
            for b in reps.iter().filter(|b| *b != a) {
                let est = ctx.engine.estimate(a, b)?;
                let Some(w) = est
                    .witnesses
                    .iter()
                    .filter(|w| w.m > w.n && ctx.engine.can_replay(&w.plan))
                    .min_by_key(|w| w.plan.leaves())
                    .cloned()
                else {
                    continue;
                };
                let replayed = ctx.engine.witness_replays(&w, a, b)?;
                let word = ctx.engine.plan_word(&w.plan).ok().map(|x| ctx.q.format_word(&x));
                findings.push(CrossClassAmplification {
                    level,
                    from: ctx.q.describe(a),
                    to: ctx.q.describe(b),
                    rate: est.rate,
                    witness: w,
                    word,
                    replayed,
                });
            }
        }
    }
    let fires = findings.iter().any(|f| f.replayed);
    Ok(DetectorReport {
        fires,
        findings,
        message: fires.then(|| DETECTOR_MESSAGE.to_string()),
    })
}

pub fn uniqueness_report(
    ctx: &mut ResourceContext<'_>,
    measure: &ResourceMeasure,
    states: &[State],
    n_max: usize,
) -> Result<UniquenessReport, MeasureError> {
    let mut sandwich = Vec::with_capacity(states.len());
    for s in states {
        let distillable = ctx.distillable_resource(s)?;
        let cost = ctx.resource_cost(s)?;
        let value = measure.evaluate(ctx, s)?;
        let (lo, hi) = (distillable.value(), cost.value());
        let catalytic = lo > hi + SANDWICH_TOL && ctx.engine.replication(s)?.catalytically_replicable();
        let status = match value {
            _ if catalytic => SandwichStatus::CatalyticException,
            None => SandwichStatus::OutsideDomain,
            Some(v) if (lo == v || v >= lo - SANDWICH_TOL) && (hi == v || v <= hi + SANDWICH_TOL) => SandwichStatus::Holds,
            Some(_) => SandwichStatus::Violated,
        };
        sandwich.push(SandwichEntry {
            state: ctx.q.describe(s),
            distillable,
            cost,
            value,
            status,
        });
    }
    let sandwich_holds = sandwich.iter().all(|e| e.status != SandwichStatus::Violated);

    let singles: Vec<State> = states.iter().filter(|s| s.level() == 1).cloned().collect();
    let pairs: Vec<(State, State)> = singles
        .iter()
        .flat_map(|a| singles.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    let family = check_additivity_family(ctx, measure, &pairs, n_max)?;
    let pick = |name: &str| family.iter().find(|v| v.property == name).cloned().expect("checked property");
    let normalization = check_normalization(ctx, measure)?;
    let hypotheses = vec![
        HypothesisSet::new(
            "conventional",
            vec![
                normalization.clone(),
                pick("weak additivity"),
                asymptotic_continuity_proxy(ctx, measure, n_max)?,
            ],
        ),
        HypothesisSet::new(
            "strong superadditivity",
            vec![normalization, pick("strong superadditivity"), lower_semicontinuity_proxy(ctx, measure)?],
        ),
    ];
    let detector = inconsistency_detector(ctx)?;
    Ok(UniquenessReport {
        measure: measure.name.clone(),
        sandwich,
        sandwich_holds,
        hypotheses,
        detector,
    })
}

impl UniquenessReport {
    pub fn refuted_sets(&self) -> impl Iterator<Item = &HypothesisSet> {
        self.hypotheses.iter().filter(|h| h.status == SetStatus::Refuted)
    }

    /// A sandwich verdict in the shared vocabulary.
    pub fn sandwich_verdict(&self) -> Verdict {
        if self.sandwich_holds {
            Verdict::Pass
        } else {
            let e = self.sandwich.iter().find(|e| e.status == SandwichStatus::Violated).expect("violated entry");
            Verdict::Fail(super::Counterexample {
                states: vec![e.state.clone()],
                word: None,
                word_text: None,
                values: vec![e.distillable.value(), e.value.unwrap_or(f64::NAN), e.cost.value()],
                detail: format!("R = {} outside [R_D, R_C] = [{}, {}]", e.value.unwrap_or(f64::NAN), e.distillable, e.cost),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::tests::{one_bit_catalyst, swap_only};
    use crate::model::load_instance_str;
    use crate::rates::RateConfig;

    #[test]
    fn swap_only_sandwich_is_tight() {
        let q = swap_only();
        let mut ctx = ResourceContext::new(&q, RateConfig::default()).unwrap();
        let one = q.state(1, "1").unwrap();
        let report = uniqueness_report(&mut ctx, &ResourceMeasure::count_ones(), &[one], 3).unwrap();
        let e = &report.sandwich[0];
        assert_eq!((e.distillable.value(), e.value, e.cost.value()), (1.0, Some(1.0), 1.0));
        assert_eq!(e.status, SandwichStatus::Holds);
        assert!(report.sandwich_holds);
        assert!(!report.detector.fires);
        assert_eq!(report.hypotheses[0].status, SetStatus::Undecided);
    }

    #[test]
    fn catalytic_states_are_exceptions() {
        let q = one_bit_catalyst();
        let mut ctx = ResourceContext::new(&q, RateConfig::default()).unwrap();
        let one = q.state(1, "1").unwrap();
        let report = uniqueness_report(&mut ctx, &ResourceMeasure::count_ones(), &[one], 2).unwrap();
        assert_eq!(report.sandwich[0].status, SandwichStatus::CatalyticException);
        assert!(report.sandwich_holds);
    }

    #[test]
    fn detector_fires_on_two_maximal_classes() {
        let mut payload = serde_json::Map::new();
        for x in ["0", "a", "b"] {
            for y in ["0", "a", "b"] {
                let out = if x == "a" && y == "a" { "bbb".to_string() } else { format!("{x}{y}0") };
                payload.insert(format!("{x}{y}"), out.into());
            }
        }
        let spec = serde_json::json!({
            "flavor": "discrete", "alphabet": ["0", "a", "b"], "max_level": 2,
            "generators": [
                {"name": "id", "kind": "builtin:identity"},
                {"name": "tr", "kind": "builtin:trace"},
                {"name": "append0", "kind": "builtin:append", "payload": "0"},
                {"name": "g", "kind": "discrete", "payload": payload}
            ]
        });
        let q = load_instance_str(&spec.to_string()).unwrap();
        let mut ctx = ResourceContext::new(&q, RateConfig::default()).unwrap();
        let labels: Vec<&str> = {
            let d = ctx.level(1).unwrap();
            d.maximal.members.iter().map(|&i| d.relation.roster[i].label.as_str()).collect()
        };
        assert_eq!(labels, ["a", "b"]);
        let report = inconsistency_detector(&mut ctx).unwrap();
        assert!(report.fires);
        let f = &report.findings[0];
        assert_eq!((f.from.as_str(), f.to.as_str()), ("a", "b"));
        assert_eq!(f.rate, ExtRational::ratio(3, 2));
        assert!(f.replayed);
        assert_eq!(report.message.as_deref(), Some(DETECTOR_MESSAGE));
    }
}
