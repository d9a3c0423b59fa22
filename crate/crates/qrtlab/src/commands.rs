//! The four report sections.

use serde_json::{json, Value};

use qrt_core::measures::{
    check_additivity_family, check_consistency, check_monotonicity, MeasureError, MeasureVerdict, ResourceContext,
    ResourceMeasure,
};
use qrt_core::model::{validate_axioms, State};
use qrt_core::preorder::minimal_set;
use qrt_core::rates::{RateEstimate, RateWitness, UpperBound, MAX_REPLAY_LEAVES};

use crate::config::Command;
use crate::report::{ext, num, resource_value, theorem_json, verdict_json, verdict_line, Section};
use crate::theorems::{theorem_suite, MONOTONICITY_SAMPLES};

/// Level and depth bounds for the closure-axiom check.
const AXIOM_LEVEL_BOUND: usize = 2;
const AXIOM_DEPTH_BOUND: usize = 2;

fn labels(data: &qrt_core::preorder::PreorderRelation, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| data.roster[i].label.clone()).collect()
}

fn braces(v: &[String]) -> String {
    format!("{{{}}}", v.join(", "))
}

pub fn preorder(ctx: &mut ResourceContext<'_>) -> Result<Section, MeasureError> {
    let q = ctx.q;
    let axioms = validate_axioms(q, q.max_level.min(AXIOM_LEVEL_BOUND), AXIOM_DEPTH_BOUND)?;
    let mut lines = Vec::new();
    let mut failures = 0;
    let mut axiom_json = Vec::new();
    for c in &axioms.checks {
        let scope = if c.exhaustive { "exhaustive" } else { "partial" };
        let tag = if c.passed { "PASS" } else { "FAIL" };
        failures += usize::from(!c.passed);
        let mut line = format!("[{tag}] axiom {}: {} ({} pairs, {scope})", c.axiom, c.statement, c.pairs_checked);
        if let Some(cx) = &c.counterexample {
            line.push_str(&format!(" | counterexample {cx}"));
        }
        lines.push(line);
        axiom_json.push(json!({
            "axiom": c.axiom,
            "statement": c.statement,
            "verdict": tag,
            "pairs_checked": c.pairs_checked,
            "exhaustive": c.exhaustive,
            "counterexample": c.counterexample,
        }));
    }

    let mut levels = Vec::new();
    for (&level, data) in &ctx.levels {
        let rel = &data.relation;
        let all: Vec<String> = rel.labels().iter().map(|s| s.to_string()).collect();
        let classes: Vec<Vec<String>> = data.quotient.classes.iter().map(|c| labels(rel, c)).collect();
        let maximal = labels(rel, &data.maximal.members);
        let minimal = labels(rel, &minimal_set(rel));
        let free: Vec<String> = data.free.labels().iter().map(|s| s.to_string()).collect();
        let mut witnesses = Vec::new();
        lines.push(format!("level {level}: states {}", braces(&all)));
        for i in 0..rel.len() {
            for j in (0..rel.len()).filter(|&j| j != i && rel.reaches[i][j]) {
                let word = rel.witnesses[i][j].as_ref().map(|w| q.format_word(w));
                lines.push(format!(
                    "  {} ⪰ {} via {}",
                    all[i],
                    all[j],
                    word.as_deref().unwrap_or("(no word recorded)")
                ));
                witnesses.push(json!({ "from": all[i], "to": all[j], "word": word }));
            }
        }
        let class_text: Vec<String> = classes.iter().map(|c| braces(c)).collect();
        lines.push(format!("  classes {}", class_text.join(" ")));
        lines.push(format!("  G = {}, minimal = {}, F = {}", braces(&maximal), braces(&minimal), braces(&free)));
        levels.push(json!({
            "level": level,
            "states": all,
            "relation": rel.reaches,
            "witnesses": witnesses,
            "classes": classes,
            "maximal": maximal,
            "minimal": minimal,
            "free": free,
            "depth": rel.depth,
        }));
    }
    let json = json!({
        "axioms": {
            "level_bound": axioms.level_bound,
            "depth_bound": axioms.depth_bound,
            "peak_width": axioms.peak_width,
            "checks": axiom_json,
        },
        "levels": levels,
    });
    Ok(Section {
        command: Command::Preorder,
        json,
        lines,
        failures,
    })
}

/// The best witness, shortest plan first among equals.
fn best_witness(est: &RateEstimate) -> Option<&RateWitness> {
    let best = est.witnesses.iter().map(RateWitness::ratio).max()?;
    est.witnesses.iter().filter(|w| w.ratio() == best).min_by_key(|w| w.plan.leaves())
}

fn upper_text(u: &UpperBound) -> String {
    match u {
        UpperBound::AtHorizon(r) => r.to_string(),
        UpperBound::Unbounded => "unbounded".into(),
        UpperBound::Unknown => "unknown".into(),
    }
}

fn word_of(ctx: &mut ResourceContext<'_>, w: &RateWitness) -> Option<String> {
    if w.plan.leaves() > MAX_REPLAY_LEAVES {
        return None;
    }
    ctx.engine.plan_word(&w.plan).ok().map(|x| ctx.q.format_word(&x))
}

fn roster_states(ctx: &ResourceContext<'_>) -> Vec<(usize, String, State)> {
    ctx.levels
        .iter()
        .flat_map(|(&l, d)| d.relation.roster.iter().map(move |r| (l, r.label.clone(), r.state.clone())))
        .collect()
}

pub fn rates(ctx: &mut ResourceContext<'_>) -> Result<Section, MeasureError> {
    let mut lines = Vec::new();
    let mut pairs = Vec::new();
    let states = roster_states(ctx);
    for (la, a, sa) in &states {
        for (_, b, sb) in states.iter().filter(|(lb, _, _)| lb == la) {
            let est = ctx.engine.estimate(sa, sb)?;
            let witness = best_witness(&est).cloned();
            let word = match &witness {
                Some(w) => word_of(ctx, w),
                None => None,
            };
            let upper = upper_text(&est.upper);
            let mut line = format!("r({a} → {b}) = {} (witnessed {}, upper {upper})", est.rate, est.witnessed);
            if let Some(w) = &witness {
                line.push_str(&format!(", {} → {} copies", w.n, w.m));
            }
            lines.push(line);
            pairs.push(json!({
                "level": la,
                "from": a,
                "to": b,
                "rate": ext(&est.rate),
                "witnessed": ext(&est.witnessed),
                "upper": upper,
                "amplifier": est.amplifier,
                "witness": witness.map(|w| json!({ "n": w.n, "m": w.m, "word": word })),
            }));
        }
    }
    let mut replication = Vec::new();
    for (level, label, s) in &states {
        let rep = ctx.engine.replication(s)?;
        let witness = match &rep.witness {
            Some(w) => {
                let replayed = if ctx.engine.can_replay(&w.plan) {
                    Some(ctx.engine.witness_replays(w, s, s)?)
                } else {
                    None
                };
                Some(json!({ "n": w.n, "m": w.m, "word": word_of(ctx, w), "replayed": replayed }))
            }
            None => None,
        };
        let free = if rep.is_free { " (free)" } else { "" };
        lines.push(format!("{label} replication: {}{free}", rep.verdict));
        replication.push(json!({
            "level": level,
            "state": label,
            "verdict": rep.verdict.to_string(),
            "free": rep.is_free,
            "witness": witness,
        }));
    }
    let json = json!({
        "n_max": ctx.engine.config().n_max,
        "pairs": pairs,
        "replication": replication,
    });
    Ok(Section {
        command: Command::Rates,
        json,
        lines,
        failures: 0,
    })
}

fn measure_verdict_json(v: &MeasureVerdict) -> Value {
    let mut j = verdict_json(&v.verdict);
    let m = j.as_object_mut().expect("verdict object");
    m.insert("property".into(), json!(v.property));
    m.insert("samples".into(), json!(v.samples));
    m.insert("note".into(), json!(v.note));
    j
}

pub fn measures(
    ctx: &mut ResourceContext<'_>,
    declared: &[ResourceMeasure],
    n_max: usize,
    seed: u64,
) -> Result<Section, MeasureError> {
    let mut lines = Vec::new();
    let mut failures = 0;
    let states = roster_states(ctx);
    let mut values = Vec::new();
    for (level, label, s) in &states {
        let rd = ctx.distillable_resource(s)?;
        let rc = ctx.resource_cost(s)?;
        lines.push(format!("{label}: R_D = {rd}, R_C = {rc}"));
        values.push(json!({
            "level": level,
            "state": label,
            "R_D": resource_value(&rd),
            "R_C": resource_value(&rc),
        }));
    }
    let singles: Vec<State> = states.iter().filter(|(l, _, _)| *l == 1).map(|(_, _, s)| s.clone()).collect();
    let pairs: Vec<(State, State)> = singles
        .iter()
        .flat_map(|a| singles.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    let mut measures = Vec::new();
    for m in declared {
        let mut evaluated = Vec::new();
        for (_, label, s) in &states {
            let v = m.evaluate(ctx, s)?;
            let text = v.map(|x| x.to_string()).unwrap_or_else(|| "undefined".into());
            lines.push(format!("{}({label}) = {text}", m.name));
            evaluated.push(json!({ "state": label, "value": v.map(num) }));
        }
        let mut verdicts = vec![check_monotonicity(ctx, m, ctx.q.max_level, MONOTONICITY_SAMPLES, seed)?];
        verdicts.extend(check_additivity_family(ctx, m, &pairs, n_max)?);
        verdicts.push(check_consistency(ctx, m, n_max)?);
        for v in &verdicts {
            failures += usize::from(v.verdict.is_fail());
            lines.push(verdict_line(&format!("{}: {}", m.name, v.property), &v.verdict, &v.note));
        }
        measures.push(json!({
            "name": m.name,
            "values": evaluated,
            "checks": verdicts.iter().map(measure_verdict_json).collect::<Vec<_>>(),
        }));
    }
    let json = json!({ "values": values, "measures": measures });
    Ok(Section {
        command: Command::Measures,
        json,
        lines,
        failures,
    })
}

pub fn theorems(
    ctx: &mut ResourceContext<'_>,
    declared: &[ResourceMeasure],
    n_max: usize,
    seed: u64,
) -> Result<Section, MeasureError> {
    let checks = theorem_suite(ctx, declared, n_max, seed)?;
    let lines = checks.iter().map(|t| verdict_line(&t.name, &t.verdict, &t.detail)).collect();
    let failures = checks.iter().filter(|t| t.verdict.is_fail()).count();
    Ok(Section {
        command: Command::Theorems,
        json: Value::Array(checks.iter().map(theorem_json).collect()),
        lines,
        failures,
    })
}
