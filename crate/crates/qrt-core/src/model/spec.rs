use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channels::{DiscreteOperation, KrausChannel};
use crate::linalg::{Complex64, ComplexMatrix, DensityMatrix};

use super::{
    all_tuples, Action, Flavor, Generator, GeneratorKind, MeasureDecl, ModelError, PlacementRule, QrtInstance,
    RMaxRule, RosterState, State, DEFAULT_CLOSURE_CAP,
};

/// The JSON document a theory is declared in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub flavor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_dim: Option<usize>,
    /// Level (as a decimal string) to roster.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub states: BTreeMap<String, Vec<StateDoc>>,
    pub generators: Vec<GeneratorDoc>,
    pub max_level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure_depth: Option<usize>,
    #[serde(default = "default_cap")]
    pub closure_cap: usize,
    #[serde(default = "default_r_max")]
    pub r_max: RMaxDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub measures: Vec<MeasureDoc>,
}

fn default_cap() -> usize {
    DEFAULT_CLOSURE_CAP
}

fn default_r_max() -> RMaxDoc {
    RMaxDoc::Rule("log2_dim".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateDoc {
    Label(String),
    Matrix(MatrixStateDoc),
}

/// A numeric roster state: row-major [re, im] entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixStateDoc {
    pub label: String,
    pub matrix: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub name: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity_out: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RMaxDoc {
    Rule(String),
    Constant(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<StateRefDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<TableEntryDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRefDoc {
    pub level: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntryDoc {
    pub level: usize,
    pub state: String,
    pub value: f64,
}

fn schema(msg: impl Into<String>) -> ModelError {
    ModelError::Schema(msg.into())
}

/// Reads and validates a spec file.
pub fn load_instance(path: &Path) -> Result<QrtInstance, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|e| schema(format!("{}: {e}", path.display())))?;
    load_instance_str(&text)
}

pub fn load_instance_str(text: &str) -> Result<QrtInstance, ModelError> {
    let doc: SpecDocument = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    QrtInstance::from_document(&doc)
}

/// The document that [`load_instance`] maps back to `q`.
pub fn serialize_instance(q: &QrtInstance) -> SpecDocument {
    let states = q
        .declared_rosters
        .iter()
        .map(|(level, roster)| {
            let docs = roster
                .iter()
                .map(|r| match &r.state {
                    State::Discrete(_) => StateDoc::Label(r.label.clone()),
                    State::Numeric(rho) => StateDoc::Matrix(MatrixStateDoc {
                        label: r.label.clone(),
                        matrix: rho.matrix().data().iter().map(|z| [z.re, z.im]).collect(),
                    }),
                })
                .collect();
            (level.to_string(), docs)
        })
        .collect();
    let generators = q
        .generators
        .iter()
        .map(|g| GeneratorDoc {
            name: g.name.clone(),
            kind: g.kind.tag().into(),
            arity_in: matches!(g.kind, GeneratorKind::Discrete | GeneratorKind::Kraus).then_some(g.arity_in),
            arity_out: matches!(g.kind, GeneratorKind::Discrete | GeneratorKind::Kraus).then_some(g.arity_out),
            payload: g.payload.clone(),
            placement: (g.placement == PlacementRule::Adjacent).then(|| "adjacent".into()),
        })
        .collect();
    let measures = q
        .measures
        .iter()
        .map(|m| {
            let mut doc = MeasureDoc {
                name: m.name().into(),
                builtin: None,
                reference: None,
                table: None,
            };
            match m {
                MeasureDecl::CountOnes { .. } => doc.builtin = Some("count_ones".into()),
                MeasureDecl::Rer { .. } => doc.builtin = Some("rer".into()),
                MeasureDecl::Zero { .. } => doc.builtin = Some("zero".into()),
                MeasureDecl::TraceDistanceTo { level, label, .. } => {
                    doc.builtin = Some("trace_distance_to".into());
                    doc.reference = Some(StateRefDoc {
                        level: *level,
                        label: label.clone(),
                    });
                }
                MeasureDecl::Table { entries, .. } => {
                    doc.table = Some(
                        entries
                            .iter()
                            .map(|(level, state, value)| TableEntryDoc {
                                level: *level,
                                state: state.clone(),
                                value: *value,
                            })
                            .collect(),
                    );
                }
            }
            doc
        })
        .collect();
    SpecDocument {
        name: Some(q.name.clone()),
        flavor: q.flavor.to_string(),
        alphabet: q.is_discrete().then(|| q.alphabet.clone()),
        base_dim: (!q.is_discrete()).then_some(q.base_dim),
        states,
        generators,
        max_level: q.max_level,
        closure_depth: q.closure_depth,
        closure_cap: q.closure_cap,
        r_max: match q.r_max {
            RMaxRule::Log2Dim => RMaxDoc::Rule("log2_dim".into()),
            RMaxRule::Constant(c) => RMaxDoc::Constant(c),
        },
        measures,
    }
}

impl QrtInstance {
    pub fn from_document(doc: &SpecDocument) -> Result<Self, ModelError> {
        let flavor = match doc.flavor.as_str() {
            "discrete" => Flavor::Discrete,
            "numeric" => Flavor::Numeric,
            other => return Err(schema(format!("unknown flavor `{other}`"))),
        };
        if doc.max_level == 0 {
            return Err(schema("max_level must be at least 1"));
        }
        let (alphabet, base_dim) = match flavor {
            Flavor::Discrete => {
                if doc.base_dim.is_some() {
                    return Err(schema("discrete instances declare `alphabet`, not `base_dim`"));
                }
                let alphabet = doc.alphabet.clone().ok_or_else(|| schema("discrete instance without `alphabet`"))?;
                let distinct: BTreeSet<&String> = alphabet.iter().collect();
                if alphabet.is_empty()
                    || alphabet.len() > 64
                    || distinct.len() != alphabet.len()
                    || alphabet.iter().any(|a| a.chars().count() != 1)
                {
                    return Err(schema("alphabet must list 1 to 64 distinct single-character symbols"));
                }
                let n = alphabet.len();
                (alphabet, n)
            }
            Flavor::Numeric => {
                if doc.alphabet.is_some() {
                    return Err(schema("numeric instances declare `base_dim`, not `alphabet`"));
                }
                let d = doc.base_dim.ok_or_else(|| schema("numeric instance without `base_dim`"))?;
                if d < 2 {
                    return Err(schema("base_dim must be at least 2"));
                }
                (Vec::new(), d)
            }
        };
        let r_max = match &doc.r_max {
            RMaxDoc::Rule(r) if r == "log2_dim" => RMaxRule::Log2Dim,
            RMaxDoc::Rule(r) => return Err(schema(format!("unknown r_max rule `{r}`"))),
            RMaxDoc::Constant(c) if c.is_finite() && *c >= 0.0 => RMaxRule::Constant(*c),
            RMaxDoc::Constant(c) => return Err(schema(format!("r_max constant {c} must be finite and non-negative"))),
        };
        let mut q = QrtInstance {
            name: doc.name.clone().unwrap_or_else(|| "instance".into()),
            flavor,
            alphabet,
            base_dim,
            generators: Vec::new(),
            declared_rosters: BTreeMap::new(),
            max_level: doc.max_level,
            closure_depth: doc.closure_depth,
            closure_cap: doc.closure_cap,
            r_max,
            measures: Vec::new(),
        };
        if q.closure_cap == 0 {
            return Err(schema("closure_cap must be positive"));
        }
        for g in &doc.generators {
            let generator = parse_generator(&q, g)?;
            if q.generators.iter().any(|x| x.name == generator.name) {
                return Err(schema(format!("duplicate generator name `{}`", generator.name)));
            }
            q.generators.push(generator);
        }
        if q.identity_generator().is_none() {
            return Err(ModelError::MissingIdentity);
        }
        for (key, docs) in &doc.states {
            let level: usize = key.parse().map_err(|_| schema(format!("state level `{key}` is not a number")))?;
            let roster = parse_roster(&q, level, docs)?;
            q.declared_rosters.insert(level, roster);
        }
        if q.roster(1).is_empty() {
            return Err(schema("the level-1 roster is empty"));
        }
        for m in &doc.measures {
            let decl = parse_measure(&q, m)?;
            q.measures.push(decl);
        }
        Ok(q)
    }
}

fn parse_roster(q: &QrtInstance, level: usize, docs: &[StateDoc]) -> Result<Vec<RosterState>, ModelError> {
    let mut roster = Vec::with_capacity(docs.len());
    for doc in docs {
        let entry = match (q.flavor, doc) {
            (Flavor::Discrete, StateDoc::Label(label)) => {
                let t = q
                    .parse_tuple(label)
                    .filter(|t| t.len() == level)
                    .ok_or_else(|| schema(format!("`{label}` is not a level-{level} tuple over the alphabet")))?;
                RosterState {
                    label: label.clone(),
                    state: State::Discrete(t),
                }
            }
            (Flavor::Numeric, StateDoc::Matrix(m)) => {
                let dim = q.base_dim.pow(level as u32);
                let matrix = matrix_from_pairs(&m.matrix, dim, dim)?;
                let rho = DensityMatrix::new(matrix, vec![q.base_dim; level])
                    .map_err(|e| schema(format!("state `{}`: {e}", m.label)))?;
                RosterState {
                    label: m.label.clone(),
                    state: State::Numeric(rho),
                }
            }
            (Flavor::Discrete, StateDoc::Matrix(_)) => return Err(schema("discrete rosters list labels")),
            (Flavor::Numeric, StateDoc::Label(_)) => return Err(schema("numeric rosters list matrices")),
        };
        if roster.iter().any(|r: &RosterState| r.label == entry.label || r.state == entry.state) {
            return Err(schema(format!("duplicate roster entry `{}` at level {level}", entry.label)));
        }
        roster.push(entry);
    }
    Ok(roster)
}

fn matrix_from_pairs(pairs: &[[f64; 2]], rows: usize, cols: usize) -> Result<ComplexMatrix, ModelError> {
    ComplexMatrix::from_vec(rows, cols, pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
        .map_err(|e| schema(format!("matrix payload: {e}")))
}

fn matrix_from_value(v: &Value, rows: usize, cols: usize) -> Result<ComplexMatrix, ModelError> {
    let pairs: Vec<[f64; 2]> =
        serde_json::from_value(v.clone()).map_err(|e| schema(format!("expected [[re, im], ...]: {e}")))?;
    matrix_from_pairs(&pairs, rows, cols)
}

/// Exponent k with base^k = n.
fn log_exact(n: usize, base: usize) -> Option<usize> {
    let mut k = 0;
    let mut acc = 1usize;
    while acc < n {
        acc = acc.checked_mul(base)?;
        k += 1;
    }
    (acc == n).then_some(k)
}

fn parse_generator(q: &QrtInstance, g: &GeneratorDoc) -> Result<Generator, ModelError> {
    let placement = match g.placement.as_deref() {
        None | Some("all") => PlacementRule::All,
        Some("adjacent") => PlacementRule::Adjacent,
        Some(other) => return Err(schema(format!("generator `{}`: unknown placement `{other}`", g.name))),
    };
    let kind = match g.kind.as_str() {
        "builtin:identity" => GeneratorKind::Identity,
        "builtin:trace" => GeneratorKind::Trace,
        "builtin:partial_trace" => GeneratorKind::PartialTrace,
        "builtin:append" => GeneratorKind::Append,
        "discrete" => GeneratorKind::Discrete,
        "kraus" => GeneratorKind::Kraus,
        other => return Err(schema(format!("generator `{}`: unknown kind `{other}`", g.name))),
    };
    let builtin = matches!(
        kind,
        GeneratorKind::Identity | GeneratorKind::Trace | GeneratorKind::PartialTrace | GeneratorKind::Append
    );
    if builtin && (g.arity_in.is_some() || g.arity_out.is_some()) {
        return Err(schema(format!("generator `{}`: builtins have fixed arities", g.name)));
    }
    let needs_payload = matches!(kind, GeneratorKind::Append | GeneratorKind::Discrete | GeneratorKind::Kraus);
    if needs_payload != g.payload.is_some() {
        return Err(schema(format!(
            "generator `{}`: kind {} {} a payload",
            g.name,
            g.kind,
            if needs_payload { "requires" } else { "takes no" }
        )));
    }
    let (arity_in, arity_out, action) = match q.flavor {
        Flavor::Discrete => discrete_action(q, kind, g)?,
        Flavor::Numeric => numeric_action(q, kind, g)?,
    };
    Ok(Generator {
        name: g.name.clone(),
        kind,
        arity_in,
        arity_out,
        placement,
        action,
        payload: g.payload.clone(),
    })
}

fn discrete_action(
    q: &QrtInstance,
    kind: GeneratorKind,
    g: &GeneratorDoc,
) -> Result<(usize, usize, Action), ModelError> {
    let b = q.base_dim;
    let named = |mut op: DiscreteOperation| {
        op.name = g.name.clone();
        op
    };
    Ok(match kind {
        GeneratorKind::Identity => (1, 1, Action::Discrete(named(DiscreteOperation::identity(b)))),
        GeneratorKind::Trace | GeneratorKind::PartialTrace => (1, 0, Action::Discrete(named(DiscreteOperation::trace(b)))),
        GeneratorKind::Append => {
            let label = g
                .payload
                .as_ref()
                .and_then(Value::as_str)
                .ok_or_else(|| schema(format!("generator `{}`: append payload is a label", g.name)))?;
            let t = q
                .parse_tuple(label)
                .filter(|t| !t.is_empty())
                .ok_or_else(|| schema(format!("generator `{}`: `{label}` is not a tuple over the alphabet", g.name)))?;
            let k = t.len();
            let op = DiscreteOperation::from_fn(g.name.clone(), b, 0, k, move |_| t.clone());
            (0, k, Action::Discrete(op))
        }
        GeneratorKind::Discrete => {
            let map = g
                .payload
                .as_ref()
                .and_then(Value::as_object)
                .ok_or_else(|| schema(format!("generator `{}`: discrete payload maps input labels to outputs", g.name)))?;
            let mut parsed: BTreeMap<Vec<u8>, Vec<u8>> = BTreeMap::new();
            for (k, v) in map {
                let out = v
                    .as_str()
                    .and_then(|s| q.parse_tuple(s))
                    .ok_or_else(|| schema(format!("generator `{}`: bad output for `{k}`", g.name)))?;
                let input = q
                    .parse_tuple(k)
                    .ok_or_else(|| schema(format!("generator `{}`: bad input label `{k}`", g.name)))?;
                parsed.insert(input, out);
            }
            let arity_in = g
                .arity_in
                .or_else(|| parsed.keys().next().map(Vec::len))
                .ok_or_else(|| schema(format!("generator `{}`: empty table", g.name)))?;
            let arity_out = g
                .arity_out
                .or_else(|| parsed.values().next().map(Vec::len))
                .unwrap_or(0);
            if parsed.iter().any(|(i, o)| i.len() != arity_in || o.len() != arity_out) {
                return Err(schema(format!(
                    "generator `{}`: every entry must map {arity_in} symbols to {arity_out}",
                    g.name
                )));
            }
            let mut table = Vec::new();
            for input in all_tuples(b, arity_in) {
                match parsed.get(&input) {
                    Some(out) => table.push(out.clone()),
                    None => {
                        return Err(ModelError::NotTotal {
                            name: g.name.clone(),
                            missing: q.format_tuple(&input),
                        })
                    }
                }
            }
            let op = DiscreteOperation::from_table(g.name.clone(), b, arity_in, arity_out, table)
                .ok_or_else(|| schema(format!("generator `{}`: malformed table", g.name)))?;
            (arity_in, arity_out, Action::Discrete(op))
        }
        GeneratorKind::Kraus => return Err(schema(format!("generator `{}`: kraus generators need a numeric instance", g.name))),
    })
}

fn numeric_action(
    q: &QrtInstance,
    kind: GeneratorKind,
    g: &GeneratorDoc,
) -> Result<(usize, usize, Action), ModelError> {
    let d = q.base_dim;
    let labelled = |mut ch: KrausChannel| {
        ch.label = g.name.clone();
        ch
    };
    let (arity_in, arity_out, channel) = match kind {
        GeneratorKind::Identity => (1, 1, labelled(KrausChannel::identity(d))),
        GeneratorKind::Trace | GeneratorKind::PartialTrace => (1, 0, labelled(KrausChannel::trace(d))),
        GeneratorKind::Append => {
            let payload = g.payload.as_ref().expect("checked above");
            let entries = payload.as_array().map(Vec::len).unwrap_or(0);
            let dim = (entries as f64).sqrt().round() as usize;
            let k = log_exact(dim, d)
                .filter(|&k| k > 0 && dim * dim == entries)
                .ok_or_else(|| schema(format!("generator `{}`: append payload must be a state on whole subsystems", g.name)))?;
            let rho = DensityMatrix::new(matrix_from_value(payload, dim, dim)?, vec![d; k])
                .map_err(|e| schema(format!("generator `{}`: {e}", g.name)))?;
            (0, k, labelled(KrausChannel::append(&rho)?))
        }
        GeneratorKind::Kraus => {
            let a = g.arity_in.unwrap_or(1);
            let b = g.arity_out.unwrap_or(1);
            let (din, dout) = (d.pow(a as u32), d.pow(b as u32));
            let ops = g
                .payload
                .as_ref()
                .and_then(Value::as_array)
                .filter(|ops| !ops.is_empty())
                .ok_or_else(|| schema(format!("generator `{}`: kraus payload is a non-empty list of matrices", g.name)))?;
            let kraus = ops
                .iter()
                .map(|m| matrix_from_value(m, dout, din))
                .collect::<Result<Vec<_>, _>>()?;
            (a, b, KrausChannel::new(g.name.clone(), din, dout, kraus))
        }
        GeneratorKind::Discrete => {
            return Err(schema(format!("generator `{}`: discrete generators need a discrete instance", g.name)))
        }
    };
    let report = channel.validate_cptp()?;
    if !report.passes {
        return Err(ModelError::NotCptp {
            name: g.name.clone(),
            deviation: report.deviation,
        });
    }
    Ok((arity_in, arity_out, Action::Kraus(channel)))
}

fn parse_measure(q: &QrtInstance, m: &MeasureDoc) -> Result<MeasureDecl, ModelError> {
    let name = m.name.clone();
    match (m.builtin.as_deref(), &m.reference, &m.table) {
        (Some("count_ones"), None, None) => {
            if !q.is_discrete() || !q.alphabet.iter().any(|a| a == "1") {
                return Err(schema(format!("measure `{name}`: count_ones needs a discrete alphabet containing `1`")));
            }
            Ok(MeasureDecl::CountOnes { name })
        }
        (Some("rer"), None, None) => Ok(MeasureDecl::Rer { name }),
        (Some("zero"), None, None) => Ok(MeasureDecl::Zero { name }),
        (Some("trace_distance_to"), Some(r), None) => {
            q.state(r.level, &r.label)?;
            Ok(MeasureDecl::TraceDistanceTo {
                name,
                level: r.level,
                label: r.label.clone(),
            })
        }
        (None, None, Some(entries)) => {
            if !q.is_discrete() {
                return Err(schema(format!("measure `{name}`: tables are for discrete instances")));
            }
            let mut out = Vec::with_capacity(entries.len());
            for e in entries {
                q.state(e.level, &e.state)?;
                if !e.value.is_finite() {
                    return Err(schema(format!("measure `{name}`: non-finite table value")));
                }
                out.push((e.level, e.state.clone(), e.value));
            }
            Ok(MeasureDecl::Table { name, entries: out })
        }
        _ => Err(schema(format!(
            "measure `{name}`: give a builtin (count_ones, rer, zero, trace_distance_to with a reference) or a table"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "name": "toy",
        "flavor": "discrete",
        "alphabet": ["0", "1"],
        "generators": [
            {"name": "id", "kind": "builtin:identity"},
            {"name": "tr", "kind": "builtin:trace"},
            {"name": "append0", "kind": "builtin:append", "payload": "0"},
            {"name": "cnot", "kind": "discrete", "payload": {"00": "00", "01": "01", "10": "11", "11": "10"}}
        ],
        "max_level": 3
    }"#;

    #[test]
    fn loads_and_defaults_rosters() {
        let q = load_instance_str(EXAMPLE).unwrap();
        assert_eq!(q.base_dim, 2);
        assert_eq!(q.roster(2).len(), 4);
        assert_eq!(q.roster(0)[0].state, State::Discrete(Vec::new()));
        assert_eq!(q.closure_cap, DEFAULT_CLOSURE_CAP);
        assert_eq!(q.generators[3].arity_in, 2);
    }

    #[test]
    fn missing_identity_is_an_axiom_error() {
        let text = EXAMPLE.replace(r#"{"name": "id", "kind": "builtin:identity"},"#, "");
        assert_eq!(load_instance_str(&text).unwrap_err(), ModelError::MissingIdentity);
    }

    #[test]
    fn partial_table_is_rejected() {
        let text = EXAMPLE.replace(r#", "11": "10""#, "");
        assert!(matches!(load_instance_str(&text), Err(ModelError::NotTotal { missing, .. }) if missing == "11"));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = EXAMPLE.replace(r#""max_level": 3"#, r#""max_level": 3, "colour": "red""#);
        assert!(matches!(load_instance_str(&text), Err(ModelError::Schema(_))));
    }

    #[test]
    fn non_cptp_kraus_is_rejected() {
        let text = r#"{
            "flavor": "numeric", "base_dim": 2, "max_level": 1,
            "states": {"1": [{"label": "zero", "matrix": [[1,0],[0,0],[0,0],[0,0]]}]},
            "generators": [
                {"name": "id", "kind": "builtin:identity"},
                {"name": "double", "kind": "kraus", "payload": [
                    [[1,0],[0,0],[0,0],[1,0]],
                    [[0,0],[1,0],[1,0],[0,0]]
                ]}
            ]
        }"#;
        assert!(matches!(load_instance_str(text), Err(ModelError::NotCptp { deviation, .. }) if (deviation - 2.0).abs() < 1e-9));
    }

    #[test]
    fn serialization_round_trips() {
        let q = load_instance_str(EXAMPLE).unwrap();
        let text = serde_json::to_string(&serialize_instance(&q)).unwrap();
        assert_eq!(load_instance_str(&text).unwrap(), q);
    }
}
