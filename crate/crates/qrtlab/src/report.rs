//! Report assembly: deterministic JSON plus a plain-text rendering.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use qrt_core::measures::{Counterexample, ResourceValue, Verdict};
use qrt_core::rates::ExtRational;

use crate::config::Command;
use crate::theorems::{TheoremCheck, WitnessRecord};

pub const SCHEMA: u64 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// JSON has no infinities, so non-finite numbers become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn ext(r: &ExtRational) -> Value {
    json!({ "exact": r.to_string(), "value": num(r.to_f64()) })
}

pub fn resource_value(v: &ResourceValue) -> Value {
    json!({
        "units": ext(&v.units),
        "unit": num(v.unit),
        "value": num(v.value()),
        "argmin": v.argmin,
        "exact": v.exact,
    })
}

pub fn counterexample_json(cx: &Counterexample) -> Value {
    json!({
        "states": cx.states,
        "word": cx.word_text,
        "values": cx.values.iter().copied().map(num).collect::<Vec<_>>(),
        "detail": cx.detail,
    })
}

pub fn verdict_json(v: &Verdict) -> Value {
    let mut m = Map::new();
    m.insert("verdict".into(), json!(v.tag()));
    match v {
        Verdict::Fail(cx) => {
            m.insert("counterexample".into(), counterexample_json(cx));
        }
        Verdict::Inconclusive(reason) => {
            m.insert("reason".into(), json!(reason));
        }
        Verdict::Pass => {}
    }
    Value::Object(m)
}

fn witness_json(w: &WitnessRecord) -> Value {
    json!({ "from": w.from, "to": w.to, "n": w.n, "m": w.m, "word": w.word, "replayed": w.replayed })
}

pub fn theorem_json(t: &TheoremCheck) -> Value {
    let mut v = verdict_json(&t.verdict);
    let m = v.as_object_mut().expect("verdict object");
    m.insert("name".into(), json!(t.name));
    m.insert("statement".into(), json!(t.statement));
    m.insert("detail".into(), json!(t.detail));
    m.insert("witnesses".into(), Value::Array(t.witnesses.iter().map(witness_json).collect()));
    v
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// One command's output: its JSON payload and its text lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub command: Command,
    pub json: Value,
    pub lines: Vec<String>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub instance: String,
    pub digest: String,
    pub seed: u64,
    pub n_max: usize,
    pub sections: Vec<Section>,
}

impl MeasureReport {
    pub fn failures(&self) -> usize {
        self.sections.iter().map(|s| s.failures).sum()
    }

    pub fn to_json(&self) -> Value {
        let mut results = Map::new();
        for s in &self.sections {
            results.insert(s.command.name().into(), s.json.clone());
        }
        json!({
            "schema": SCHEMA,
            "tool": "qrtlab",
            "version": VERSION,
            "instance": self.instance,
            "digest": self.digest,
            "seed": self.seed,
            "n_max": self.n_max,
            "commands": self.sections.iter().map(|s| s.command.name()).collect::<Vec<_>>(),
            "results": results,
            "failures": self.failures(),
        })
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "qrtlab {VERSION}: {} (sha256 {})", self.instance, self.digest);
        let _ = writeln!(out, "seed {}, n_max {}", self.seed, self.n_max);
        for s in &self.sections {
            let _ = writeln!(out, "\n== {} ==", s.command);
            for line in &s.lines {
                let _ = writeln!(out, "{line}");
            }
        }
        let _ = writeln!(out, "\n{} failures", self.failures());
        out
    }
}

/// "[PASS] name: detail", with the failure or the reason appended.
pub fn verdict_line(name: &str, v: &Verdict, detail: &str) -> String {
    let mut line = format!("[{}] {name}", v.tag());
    if !detail.is_empty() {
        let _ = write!(line, ": {detail}");
    }
    match v {
        Verdict::Fail(cx) => {
            let _ = write!(line, " | counterexample {}: {}", cx.states.join(", "), cx.detail);
            if let Some(w) = &cx.word_text {
                let _ = write!(line, " via {w}");
            }
        }
        Verdict::Inconclusive(r) => {
            let _ = write!(line, " | {r}");
        }
        Verdict::Pass => {}
    }
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_numbers() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(f64::NEG_INFINITY), json!("-inf"));
        assert_eq!(num(0.5), json!(0.5));
        assert_eq!(ext(&ExtRational::ratio(3, 2)), json!({"exact": "3/2", "value": 1.5}));
    }

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(digest(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn verdict_lines() {
        let v = Verdict::Inconclusive("sampled".into());
        assert_eq!(verdict_line("x", &v, "3 cases"), "[INCONCLUSIVE] x: 3 cases | sampled");
        assert_eq!(verdict_line("y", &Verdict::Pass, ""), "[PASS] y");
    }
}
