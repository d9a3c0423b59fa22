use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use qrt_core::rates::DEFAULT_N_MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Command {
    Preorder,
    Rates,
    Measures,
    Theorems,
}

impl Command {
    pub const ALL: [Command; 4] = [Command::Preorder, Command::Rates, Command::Measures, Command::Theorems];

    pub fn name(self) -> &'static str {
        match self {
            Command::Preorder => "preorder",
            Command::Rates => "rates",
            Command::Measures => "measures",
            Command::Theorems => "theorems",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| ConfigError::UnknownCommand(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            _ => Err(ConfigError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown command `{0}` (expected preorder, rates, measures or theorems)")]
    UnknownCommand(String),
    #[error("unknown output format `{0}` (expected json or text)")]
    UnknownFormat(String),
    #[error("no command given")]
    NoCommands,
    #[error("n_max must be at least 1")]
    ZeroHorizon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub spec_path: PathBuf,
    pub commands: Vec<Command>,
    pub n_max: usize,
    /// Overrides the word-length bound declared by the spec.
    pub closure_depth: Option<usize>,
    pub seed: u64,
    pub format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(spec_path: impl Into<PathBuf>, commands: Vec<Command>) -> Self {
        Self {
            spec_path: spec_path.into(),
            commands,
            n_max: DEFAULT_N_MAX,
            closure_depth: None,
            seed: 42,
            format: OutputFormat::Json,
            output_path: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.commands.is_empty() {
            return Err(ConfigError::NoCommands);
        }
        if self.n_max == 0 {
            return Err(ConfigError::ZeroHorizon);
        }
        Ok(())
    }
}

/// Parses a comma-separated command list, keeping order and dropping repeats.
pub fn parse_commands(list: &str) -> Result<Vec<Command>, ConfigError> {
    let mut out: Vec<Command> = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let c: Command = part.parse()?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    if out.is_empty() {
        return Err(ConfigError::NoCommands);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_lists() {
        assert_eq!(
            parse_commands("rates, preorder,rates").unwrap(),
            vec![Command::Rates, Command::Preorder]
        );
        assert_eq!(parse_commands(""), Err(ConfigError::NoCommands));
        assert!(matches!(parse_commands("rates,bogus"), Err(ConfigError::UnknownCommand(_))));
    }

    #[test]
    fn validation() {
        let mut c = RunConfig::new("x.json", vec![Command::Theorems]);
        assert!(c.validate().is_ok());
        c.n_max = 0;
        assert_eq!(c.validate(), Err(ConfigError::ZeroHorizon));
        assert_eq!("text".parse::<OutputFormat>(), Ok(OutputFormat::Text));
    }
}
