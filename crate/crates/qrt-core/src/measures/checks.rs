//! Checkers for measure properties. Each returns a verdict whose failures carry
//! a replayable counterexample.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{partial_trace, trace_distance, ComplexMatrix, DensityMatrix};
use crate::model::{steps_for_width, ModelError, State, Step, Word, DEFAULT_NUMERIC_DEPTH};
use crate::rates::{RateWitness, Replication};

use super::{MeasureError, ResourceContext, ResourceMeasure};

/// Allowed increase of a measure along a free operation.
pub const MONOTONICITY_SLACK: f64 = 1e-7;
/// Tolerance for the additivity family, set by the solver residual.
pub const ADDITIVITY_TOL: f64 = 1e-6;
const CONSISTENCY_TOL: f64 = 1e-7;
const NORMALIZATION_TOL: f64 = 1e-6;
/// Largest Hilbert-space dimension the numeric checkers tensor up to.
const MAX_NUMERIC_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub states: Vec<String>,
    /// Free word taking the first state to the second, when there is one.
    pub word: Option<Word>,
    pub word_text: Option<String>,
    pub values: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Fail(Counterexample),
    Inconclusive(String),
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail(_) => "FAIL",
            Verdict::Inconclusive(_) => "INCONCLUSIVE",
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Fail(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureVerdict {
    pub property: String,
    pub verdict: Verdict,
    pub samples: usize,
    /// Scope of the check: exhaustive horizon or sample count.
    pub note: String,
}

impl MeasureVerdict {
    fn new(property: &str, verdict: Verdict, samples: usize, note: impl Into<String>) -> Self {
        Self {
            property: property.into(),
            verdict,
            samples,
            note: note.into(),
        }
    }
}

fn leq(a: f64, b: f64, tol: f64) -> bool {
    b == f64::INFINITY || a <= b + tol
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol
}

fn counterexample(ctx: &ResourceContext<'_>, states: &[&State], word: Option<Word>, values: Vec<f64>, detail: String) -> Counterexample {
    Counterexample {
        states: states.iter().map(|s| ctx.q.describe(s)).collect(),
        word_text: word.as_ref().map(|w| ctx.q.format_word(w)),
        word,
        values,
        detail,
    }
}

/// R(ψ) ≥ R(N(ψ)) − slack over free words N. Discrete instances are checked
/// exhaustively on every roster state up to `level_bound`; numeric ones on
/// `sample_count` seeded random words.
pub fn check_monotonicity(
    ctx: &mut ResourceContext<'_>,
    measure: &ResourceMeasure,
    level_bound: usize,
    sample_count: usize,
    seed: u64,
) -> Result<MeasureVerdict, MeasureError> {
    const PROPERTY: &str = "monotonicity";
    let q = ctx.q;
    let sources: Vec<State> = q
        .roster_levels()
        .into_iter()
        .filter(|&l| l <= level_bound)
        .flat_map(|l| q.roster(l).into_iter().map(|r| r.state))
        .collect();
    if q.is_discrete() {
        let mut samples = 0;
        for psi in &sources {
            let Some(before) = measure.evaluate(ctx, psi)? else { continue };
            let width = q.one_shot_width(&[psi.level()]);
            let reach = ctx.explorer.reach(psi, width)?;
            // Prefer same-level counterexamples, then short words.
            let mut worst: Option<((bool, usize), State, Word, f64)> = None;
            for (phi, word) in reach.states() {
                let Some(after) = measure.evaluate(ctx, &phi)? else { continue };
                samples += 1;
                if !leq(after, before, MONOTONICITY_SLACK) {
                    let key = (phi.level() != psi.level(), word.len());
                    if worst.as_ref().is_none_or(|(k, ..)| key < *k) {
                        worst = Some((key, phi, word, after));
                    }
                }
            }
            if let Some((_, phi, word, after)) = worst {
                let detail = format!("R rises from {before} to {after} along a free word");
                let cx = counterexample(ctx, &[psi, &phi], Some(word), vec![before, after], detail);
                return Ok(MeasureVerdict::new(PROPERTY, Verdict::Fail(cx), samples, "exhaustive"));
            }
        }
        let note = format!("exhaustive over the closure from every roster state up to level {level_bound}");
        return Ok(MeasureVerdict::new(PROPERTY, Verdict::Pass, samples, note));
    }
    if sources.is_empty() {
        return Ok(MeasureVerdict::new(PROPERTY, Verdict::Inconclusive("no roster states to sample".into()), 0, ""));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = q.depth_limit().unwrap_or(DEFAULT_NUMERIC_DEPTH).max(1);
    let mut step_cache: HashMap<(usize, usize), Vec<Step>> = HashMap::new();
    let mut samples = 0;
    for _ in 0..sample_count {
        let psi = &sources[rng.gen_range(0..sources.len())];
        let width = q.one_shot_width(&[psi.level()]);
        let len = rng.gen_range(1..=depth);
        let mut word = Vec::new();
        let mut cur = psi.clone();
        for _ in 0..len {
            let steps = step_cache
                .entry((cur.level(), width))
                .or_insert_with(|| steps_for_width(q, cur.level(), width));
            if steps.is_empty() {
                break;
            }
            let step = steps[rng.gen_range(0..steps.len())].clone();
            cur = q.apply_step(&step, &cur)?;
            word.push(step);
        }
        let (Some(before), Some(after)) = (measure.evaluate(ctx, psi)?, measure.evaluate(ctx, &cur)?) else {
            continue;
        };
        samples += 1;
        if !leq(after, before, MONOTONICITY_SLACK) {
            let detail = format!("R rises from {before} to {after} along a sampled free word");
            let cx = counterexample(ctx, &[psi, &cur], Some(Word(word)), vec![before, after], detail);
            return Ok(MeasureVerdict::new(PROPERTY, Verdict::Fail(cx), samples, format!("sampled, seed {seed}")));
        }
    }
    let note = format!("sample-limited: {samples} random words of length at most {depth}, seed {seed}");
    Ok(MeasureVerdict::new(PROPERTY, Verdict::Pass, samples, note))
}

/// R vanishes on free states and equals R_max on maximal ones.
pub fn check_normalization(ctx: &ResourceContext<'_>, measure: &ResourceMeasure) -> Result<MeasureVerdict, MeasureError> {
    const PROPERTY: &str = "conventional normalization";
    let mut samples = 0;
    for (&level, data) in &ctx.levels {
        for r in &data.free.states {
            let Some(v) = measure.evaluate(ctx, &r.state)? else { continue };
            samples += 1;
            if !close(v, 0.0, NORMALIZATION_TOL) {
                let cx = counterexample(ctx, &[&r.state], None, vec![v], format!("free state at level {level} has R = {v}"));
                return Ok(MeasureVerdict::new(PROPERTY, Verdict::Fail(cx), samples, ""));
            }
        }
        let r_max = ctx.q.r_max(level);
        for &m in &data.maximal.members {
            let s = &data.relation.roster[m].state;
            let Some(v) = measure.evaluate(ctx, s)? else { continue };
            samples += 1;
            if !close(v, r_max, NORMALIZATION_TOL) {
                let detail = format!("maximal state at level {level} has R = {v}, R_max = {r_max}");
                let cx = counterexample(ctx, &[s], None, vec![v, r_max], detail);
                return Ok(MeasureVerdict::new(PROPERTY, Verdict::Fail(cx), samples, ""));
            }
        }
    }
    Ok(MeasureVerdict::new(PROPERTY, Verdict::Pass, samples, "free and maximal roster states"))
}

fn fits(ctx: &ResourceContext<'_>, level: usize) -> bool {
    ctx.q.is_discrete() || ctx.q.base_dim.checked_pow(level as u32).is_some_and(|d| d <= MAX_NUMERIC_DIM)
}

/// The two sides of a cut after `k` subsystems.
fn split(state: &State, k: usize) -> Result<(State, State), MeasureError> {
    Ok(match state {
        State::Discrete(t) => (State::Discrete(t[..k].to_vec()), State::Discrete(t[k..].to_vec())),
        State::Numeric(rho) => {
            let n = rho.num_subsystems();
            let a: Vec<usize> = (0..k).collect();
            let b: Vec<usize> = (k..n).collect();
            (State::Numeric(partial_trace(rho, &a)?), State::Numeric(partial_trace(rho, &b)?))
        }
    })
}

/// Sub- and superadditivity on the given pairs, strong superadditivity on
/// their products and on the multi-partite roster, weak additivity up to
/// `n_max` copies, and the consequence that a weakly additive measure
/// vanishes on free states.
pub fn check_additivity_family(
    ctx: &ResourceContext<'_>,
    measure: &ResourceMeasure,
    pairs: &[(State, State)],
    n_max: usize,
) -> Result<Vec<MeasureVerdict>, MeasureError> {
    let mut sub = (Verdict::Pass, 0);
    let mut sup = (Verdict::Pass, 0);
    let mut products = Vec::new();
    for (a, b) in pairs {
        let ab = a.tensor(b);
        if !fits(ctx, ab.level()) {
            continue;
        }
        let (Some(ra), Some(rb), Some(rab)) = (measure.evaluate(ctx, a)?, measure.evaluate(ctx, b)?, measure.evaluate(ctx, &ab)?)
        else {
            continue;
        };
        sub.1 += 1;
        sup.1 += 1;
        if sub.0.is_pass() && !leq(rab, ra + rb, ADDITIVITY_TOL) {
            let detail = format!("R(ψ⊗φ) = {rab} exceeds R(ψ) + R(φ) = {}", ra + rb);
            sub.0 = Verdict::Fail(counterexample(ctx, &[a, b], None, vec![ra, rb, rab], detail));
        }
        if sup.0.is_pass() && !leq(ra + rb, rab, ADDITIVITY_TOL) {
            let detail = format!("R(ψ⊗φ) = {rab} falls below R(ψ) + R(φ) = {}", ra + rb);
            sup.0 = Verdict::Fail(counterexample(ctx, &[a, b], None, vec![ra, rb, rab], detail));
        }
        products.push(ab);
    }

    let mut strong = (Verdict::Pass, 0);
    let multipartite = ctx
        .levels
        .iter()
        .filter(|(&l, _)| l >= 2 && fits(ctx, l))
        .flat_map(|(_, d)| d.relation.roster.iter().map(|r| r.state.clone()));
    'strong: for omega in products.iter().cloned().chain(multipartite) {
        let Some(r) = measure.evaluate(ctx, &omega)? else { continue };
        for k in 1..omega.level() {
            let (a, b) = split(&omega, k)?;
            let (Some(ra), Some(rb)) = (measure.evaluate(ctx, &a)?, measure.evaluate(ctx, &b)?) else { continue };
            strong.1 += 1;
            if !leq(ra + rb, r, ADDITIVITY_TOL) {
                let detail = format!("R(ω) = {r} falls below R(ω_A) + R(ω_B) = {} at cut {k}", ra + rb);
                strong.0 = Verdict::Fail(counterexample(ctx, &[&omega, &a, &b], None, vec![r, ra, rb], detail));
                break 'strong;
            }
        }
    }

    let mut singles: Vec<State> = Vec::new();
    for s in pairs.iter().flat_map(|(a, b)| [a, b]) {
        if !singles.iter().any(|t| t.approx_eq(s, 1e-9)) {
            singles.push(s.clone());
        }
    }
    let mut weak = (Verdict::Pass, 0);
    'weak: for s in &singles {
        let Some(r) = measure.evaluate(ctx, s)? else { continue };
        for n in 2..=n_max {
            if !fits(ctx, n * s.level()) {
                break;
            }
            let Some(rn) = measure.evaluate(ctx, &s.tensor_power(n))? else { continue };
            weak.1 += 1;
            if !close(rn, n as f64 * r, ADDITIVITY_TOL * n as f64) {
                let detail = format!("R(ψ^⊗{n}) = {rn} but {n}·R(ψ) = {}", n as f64 * r);
                weak.0 = Verdict::Fail(counterexample(ctx, &[s], None, vec![r, rn], detail));
                break 'weak;
            }
        }
    }

    let mut zero = (Verdict::Pass, 0);
    for data in ctx.levels.values() {
        for f in &data.free.states {
            let Some(v) = measure.evaluate(ctx, &f.state)? else { continue };
            zero.1 += 1;
            if zero.0.is_pass() && !close(v, 0.0, ADDITIVITY_TOL) {
                zero.0 = if weak.0.is_pass() {
                    let detail = format!("weakly additive, yet R = {v} on a free state");
                    Verdict::Fail(counterexample(ctx, &[&f.state], None, vec![v], detail))
                } else {
                    Verdict::Inconclusive(format!("R = {v} on a free state, but the measure is not weakly additive"))
                };
            }
        }
    }

    let pair_note = format!("{} pairs", pairs.len());
    Ok(vec![
        MeasureVerdict::new("subadditivity", sub.0, sub.1, pair_note.clone()),
        MeasureVerdict::new("superadditivity", sup.0, sup.1, pair_note),
        MeasureVerdict::new("strong superadditivity", strong.0, strong.1, "every cut of products and roster states"),
        MeasureVerdict::new("weak additivity", weak.0, weak.1, format!("up to {n_max} copies")),
        MeasureVerdict::new("zero on free states", zero.0, zero.1, "free roster states"),
    ])
}

fn witness_word(ctx: &mut ResourceContext<'_>, w: &RateWitness) -> Result<Option<Word>, MeasureError> {
    match ctx.engine.plan_word(&w.plan) {
        Ok(word) => Ok(Some(word)),
        Err(ModelError::WitnessTooLarge { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// R(ψ)·m/n ≤ R(φ) for every witnessed conversion φ^n → ψ^m, replication
/// witnesses first; then weak additivity on resource states that are not
/// catalytically replicable.
pub fn check_consistency(
    ctx: &mut ResourceContext<'_>,
    measure: &ResourceMeasure,
    n_max: usize,
) -> Result<MeasureVerdict, MeasureError> {
    const PROPERTY: &str = "consistency";
    let q = ctx.q;
    let states: Vec<State> = q
        .roster_levels()
        .into_iter()
        .flat_map(|l| q.roster(l).into_iter().map(|r| r.state))
        .collect();
    let mut samples = 0;
    let mut catalytic = vec![false; states.len()];

    let fail = |ctx: &mut ResourceContext<'_>, from: &State, to: &State, w: &RateWitness, values: Vec<f64>, what: &str| {
        let word = witness_word(ctx, w)?;
        let detail = format!(
            "{what}: {} copies → {} copies forces ({}/{})·R(ψ) ≤ R(φ)",
            w.n, w.m, w.m, w.n
        );
        Ok::<_, MeasureError>(MeasureVerdict::new(
            PROPERTY,
            Verdict::Fail(counterexample(ctx, &[from, to], word, values, detail)),
            0,
            "",
        ))
    };

    for (i, s) in states.iter().enumerate() {
        let rep = ctx.engine.replication(s)?;
        catalytic[i] = rep.verdict == Replication::Infinite;
        let (Some(w), Some(r)) = (rep.witness.clone(), measure.evaluate(ctx, s)?) else { continue };
        samples += 1;
        let ratio = w.m as f64 / w.n as f64;
        if !leq(r * ratio, r, CONSISTENCY_TOL) {
            let mut v = fail(ctx, s, s, &w, vec![r, r], "replication witness")?;
            v.samples = samples;
            return Ok(v);
        }
    }

    for phi in &states {
        let Some(r_phi) = measure.evaluate(ctx, phi)? else { continue };
        for psi in &states {
            let Some(r_psi) = measure.evaluate(ctx, psi)? else { continue };
            let est = ctx.engine.estimate(phi, psi)?;
            for w in &est.witnesses {
                samples += 1;
                let ratio = w.m as f64 / w.n as f64;
                if r_psi > 0.0 && !leq(r_psi * ratio, r_phi, CONSISTENCY_TOL) {
                    let mut v = fail(ctx, phi, psi, w, vec![r_phi, r_psi], "conversion witness")?;
                    v.samples = samples;
                    return Ok(v);
                }
            }
        }
    }

    for (i, s) in states.iter().enumerate() {
        if catalytic[i] || ctx.is_free(s)? {
            continue;
        }
        let Some(r) = measure.evaluate(ctx, s)? else { continue };
        for n in 2..=n_max {
            if !fits(ctx, n * s.level()) {
                break;
            }
            let Some(rn) = measure.evaluate(ctx, &s.tensor_power(n))? else { continue };
            samples += 1;
            if !close(rn, n as f64 * r, CONSISTENCY_TOL * n as f64) {
                let detail = format!("consistent measures are weakly additive, but R(ψ^⊗{n}) = {rn} and {n}·R(ψ) = {}", n as f64 * r);
                let cx = counterexample(ctx, &[s], None, vec![r, rn], detail);
                return Ok(MeasureVerdict::new(PROPERTY, Verdict::Fail(cx), samples, ""));
            }
        }
    }
    let note = format!("every witnessed rate between roster states, n_max = {}", ctx.engine.config().n_max);
    Ok(MeasureVerdict::new(PROPERTY, Verdict::Pass, samples, note))
}

/// (1−ε)ρ + ε·I/d.
fn depolarize(rho: &DensityMatrix, eps: f64) -> DensityMatrix {
    let d = rho.dim();
    let m = &rho.matrix().scale_real(1.0 - eps) + &ComplexMatrix::identity(d).scale_real(eps / d as f64);
    DensityMatrix::new_unchecked(m, rho.subsystem_dims().to_vec())
}

const DISCRETE_LIMIT_NOTE: &str =
    "distinct tuples sit at trace distance 2, so convergent sequences are eventually constant and the limit is not probed";

/// Finite proxy for asymptotic continuity: per-copy gaps |R(ψ^⊗n) − R(ψ_n^⊗n)|/n
/// for depolarized ψ_n → ψ. Always INCONCLUSIVE; the note records the gaps.
pub fn asymptotic_continuity_proxy(
    ctx: &ResourceContext<'_>,
    measure: &ResourceMeasure,
    n_max: usize,
) -> Result<MeasureVerdict, MeasureError> {
    const PROPERTY: &str = "asymptotic continuity";
    if ctx.q.is_discrete() {
        return Ok(MeasureVerdict::new(PROPERTY, Verdict::Inconclusive(DISCRETE_LIMIT_NOTE.into()), 0, "finite proxy"));
    }
    let mut samples = 0;
    let mut worst = 0.0f64;
    for r in ctx.q.roster(1) {
        let State::Numeric(rho) = &r.state else { continue };
        for n in (1..=n_max).take_while(|&n| fits(ctx, n)) {
            let eps = 1.0 / ((n + 1) * (n + 1)) as f64;
            let a = State::Numeric(rho.tensor_power(n));
            let b = State::Numeric(depolarize(rho, eps).tensor_power(n));
            let (Some(ra), Some(rb)) = (measure.evaluate(ctx, &a)?, measure.evaluate(ctx, &b)?) else { continue };
            samples += 1;
            let gap = if ra == rb { 0.0 } else { (ra - rb).abs() / n as f64 };
            worst = worst.max(gap);
        }
    }
    let note = format!("largest per-copy gap {worst:.3e} up to n = {n_max}; a limit cannot be certified from finitely many terms");
    Ok(MeasureVerdict::new(PROPERTY, Verdict::Inconclusive(note), samples, "finite proxy"))
}

/// Finite proxy for lower semi-continuity along ψ_k = (1−2^−k)ψ + 2^−k·I/d.
/// Always INCONCLUSIVE; the note records the smallest tail margin.
pub fn lower_semicontinuity_proxy(ctx: &ResourceContext<'_>, measure: &ResourceMeasure) -> Result<MeasureVerdict, MeasureError> {
    const PROPERTY: &str = "lower semi-continuity";
    if ctx.q.is_discrete() {
        return Ok(MeasureVerdict::new(PROPERTY, Verdict::Inconclusive(DISCRETE_LIMIT_NOTE.into()), 0, "finite proxy"));
    }
    let mut samples = 0;
    let mut margin = f64::INFINITY;
    let mut distance = 0.0f64;
    for r in ctx.q.roster_levels().into_iter().filter(|&l| fits(ctx, l)).flat_map(|l| ctx.q.roster(l)) {
        let State::Numeric(rho) = &r.state else { continue };
        let Some(limit) = measure.evaluate(ctx, &r.state)? else { continue };
        for k in 4..=12 {
            let near = depolarize(rho, 0.5f64.powi(k));
            let Some(v) = measure.evaluate(ctx, &State::Numeric(near.clone()))? else { continue };
            samples += 1;
            margin = margin.min(v - limit);
            distance = distance.max(trace_distance(near.matrix(), rho.matrix())?);
        }
    }
    let note = format!(
        "smallest R(ψ_k) − R(ψ) = {margin:.3e} on sequences within trace distance {distance:.1e}; a liminf cannot be certified from finitely many terms"
    );
    Ok(MeasureVerdict::new(PROPERTY, Verdict::Inconclusive(note), samples, "finite proxy"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::tests::{one_bit_catalyst, swap_only};
    use crate::measures::MeasureKind;
    use crate::rates::RateConfig;

    #[test]
    fn constant_measure_is_monotone() {
        let q = one_bit_catalyst();
        let mut ctx = ResourceContext::new(&q, RateConfig::default()).unwrap();
        let v = check_monotonicity(&mut ctx, &ResourceMeasure::zero(), 3, 0, 1).unwrap();
        assert!(v.verdict.is_pass());
        assert!(v.samples > 0);
    }

    #[test]
    fn distance_to_one_is_not_monotone() {
        let q = one_bit_catalyst();
        let mut ctx = ResourceContext::new(&q, RateConfig::default()).unwrap();
        let one = State::Discrete(vec![1]);
        let m = ResourceMeasure::new("distance to 1", MeasureKind::TraceDistanceTo(one.clone()));
        let v = check_monotonicity(&mut ctx, &m, 1, 0, 1).unwrap();
        let cx = v.verdict.counterexample().expect("fails");
        assert_eq!(cx.states, ["1", "0"]);
        assert_eq!(cx.values, [0.0, 2.0]);
        let word = cx.word.as_ref().unwrap();
        assert_eq!(q.replay(word, &one).unwrap(), State::Discrete(vec![0]));
        let text = cx.word_text.as_deref().unwrap();
        assert!(text.contains("tr") && text.contains("append0"), "{text}");
    }

    #[test]
    fn count_ones_on_swap_only() {
        let q = swap_only();
        let mut ctx = ResourceContext::new(&q, RateConfig::default()).unwrap();
        let m = ResourceMeasure::count_ones();
        assert!(check_monotonicity(&mut ctx, &m, 2, 0, 1).unwrap().verdict.is_pass());
        assert!(check_consistency(&mut ctx, &m, 3).unwrap().verdict.is_pass());
        assert!(check_normalization(&ctx, &m).unwrap().verdict.is_pass());
        let zero = State::Discrete(vec![0]);
        let one = State::Discrete(vec![1]);
        let pairs = vec![(zero.clone(), one.clone()), (one.clone(), one.clone()), (zero.clone(), zero)];
        let family = check_additivity_family(&ctx, &m, &pairs, 3).unwrap();
        for v in &family {
            assert!(v.verdict.is_pass(), "{v:?}");
        }
    }

    #[test]
    fn count_ones_is_inconsistent_with_catalysis() {
        let q = one_bit_catalyst();
        let mut ctx = ResourceContext::new(&q, RateConfig::default()).unwrap();
        let v = check_consistency(&mut ctx, &ResourceMeasure::count_ones(), 3).unwrap();
        let cx = v.verdict.counterexample().expect("fails");
        assert!(cx.detail.starts_with("replication witness"), "{}", cx.detail);
        assert_eq!(cx.states, ["1", "1"]);
        assert!(cx.word.is_some(), "{cx:?}");
        assert!(check_consistency(&mut ctx, &ResourceMeasure::zero(), 3).unwrap().verdict.is_pass());
    }

    #[test]
    fn weak_additivity_forces_zero_on_free_states() {
        let q = swap_only();
        let ctx = ResourceContext::new(&q, RateConfig::default()).unwrap();
        // Half a unit per subsystem: weakly additive, yet 0.5 on the free |0⟩.
        let m = ResourceMeasure::function("half per site", |_, s| 0.5 * s.level() as f64);
        let zero = State::Discrete(vec![0]);
        let family = check_additivity_family(&ctx, &m, &[(zero.clone(), zero)], 3).unwrap();
        assert!(family[3].verdict.is_pass());
        assert_eq!(family[4].property, "zero on free states");
        assert!(family[4].verdict.is_fail());
    }

    #[test]
    fn superadditivity_failure_is_reported() {
        let q = swap_only();
        let ctx = ResourceContext::new(&q, RateConfig::default()).unwrap();
        let m = ResourceMeasure::function("sqrt ones", |_, s| {
            s.as_tuple().map(|t| (t.iter().filter(|&&c| c == 1).count() as f64).sqrt()).unwrap_or(0.0)
        });
        let one = State::Discrete(vec![1]);
        let family = check_additivity_family(&ctx, &m, &[(one.clone(), one)], 2).unwrap();
        assert!(family[0].verdict.is_pass());
        assert!(family[1].verdict.is_fail());
        assert!(family[2].verdict.is_fail());
        assert!(family[3].verdict.is_fail());
    }
}
