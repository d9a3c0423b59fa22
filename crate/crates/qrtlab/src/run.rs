use qrt_core::measures::{MeasureError, ResourceContext, ResourceMeasure};
use qrt_core::model::{load_instance, serialize_instance, ModelError};
use qrt_core::rates::RateConfig;

use crate::commands;
use crate::config::{Command, ConfigError, OutputFormat, RunConfig};
use crate::report::{digest, MeasureReport};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// A finished run: what to print and how to exit.
#[derive(Debug)]
pub struct Outcome {
    pub report: Option<MeasureReport>,
    /// The rendered report, or the diagnostic on a configuration error.
    pub output: String,
    pub exit_code: i32,
}

pub fn run(config: &RunConfig) -> Result<MeasureReport, RunError> {
    config.validate()?;
    let mut q = load_instance(&config.spec_path)?;
    if let Some(depth) = config.closure_depth {
        q.closure_depth = Some(depth);
    }
    let canonical = serde_json::to_vec(&serialize_instance(&q)).expect("spec serializes");
    let declared = q
        .measures
        .iter()
        .map(|d| ResourceMeasure::from_decl(&q, d))
        .collect::<Result<Vec<_>, _>>()?;
    let rate_config = RateConfig {
        n_max: config.n_max,
        ..RateConfig::default()
    };
    let mut ctx = ResourceContext::new(&q, rate_config)?;
    let mut sections = Vec::with_capacity(config.commands.len());
    for &c in &config.commands {
        sections.push(match c {
            Command::Preorder => commands::preorder(&mut ctx)?,
            Command::Rates => commands::rates(&mut ctx)?,
            Command::Measures => commands::measures(&mut ctx, &declared, config.n_max, config.seed)?,
            Command::Theorems => commands::theorems(&mut ctx, &declared, config.n_max, config.seed)?,
        });
    }
    Ok(MeasureReport {
        instance: q.name.clone(),
        digest: digest(&canonical),
        seed: config.seed,
        n_max: config.n_max,
        sections,
    })
}

/// Runs, renders and writes the report. Exit codes: 0 when nothing fails,
/// 1 when a check fails, 2 on a configuration or spec error.
pub fn execute(config: &RunConfig) -> Outcome {
    let report = match run(config) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                report: None,
                output: format!("error: {e}\n"),
                exit_code: 2,
            }
        }
    };
    let output = match config.format {
        OutputFormat::Json => report.render_json(),
        OutputFormat::Text => report.render_text(),
    };
    if let Some(path) = &config.output_path {
        if let Err(source) = std::fs::write(path, &output) {
            let e = RunError::Io {
                path: path.display().to_string(),
                source,
            };
            return Outcome {
                report: Some(report),
                output: format!("error: {e}\n"),
                exit_code: 2,
            };
        }
    }
    let exit_code = if report.failures() > 0 { 1 } else { 0 };
    Outcome {
        report: Some(report),
        output,
        exit_code,
    }
}
