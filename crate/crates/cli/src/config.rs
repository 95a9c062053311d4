//! Run configuration: a flat `key = value` file merged with command-line flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::scenarios;
use crate::UsageError;

pub const DEFAULT_MOLECULES: u64 = 100;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    JsonLines,
}

impl FromStr for OutputFormat {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json-lines" => Ok(OutputFormat::JsonLines),
            other => Err(UsageError(format!("unknown format {other:?} (expected csv or json-lines)"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::JsonLines => "json-lines",
        })
    }
}

/// Partially specified settings from one source; `None` means "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub scenario: Option<String>,
    pub molecules: Option<u64>,
    pub epsilon: Option<f64>,
    pub rounds: Option<u64>,
    pub seed: Option<u64>,
    pub observable: Option<String>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
}

pub const CONFIG_KEYS: [&str; 8] = [
    "scenario",
    "molecules",
    "epsilon",
    "rounds",
    "seed",
    "observable",
    "format",
    "out",
];

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, UsageError> {
    value
        .parse()
        .map_err(|_| UsageError(format!("line {line}: invalid value {value:?} for {key}")))
}

impl Settings {
    /// Parses a config document: one `key = value` per line, `#` starts a
    /// comment, blank lines are skipped, each key appears at most once.
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut s = Settings::default();
        let mut seen = [false; CONFIG_KEYS.len()];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| UsageError(format!("line {line}: expected key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(UsageError(format!("line {line}: empty value for {key}")));
            }
            let slot = CONFIG_KEYS
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| UsageError(format!("line {line}: unknown key {key:?}")))?;
            if std::mem::replace(&mut seen[slot], true) {
                return Err(UsageError(format!("line {line}: duplicate key {key:?}")));
            }
            match key {
                "scenario" => s.scenario = Some(value.to_string()),
                "molecules" => s.molecules = Some(parse_value(line, key, value)?),
                "epsilon" => s.epsilon = Some(parse_value(line, key, value)?),
                "rounds" => s.rounds = Some(parse_value(line, key, value)?),
                "seed" => s.seed = Some(parse_value(line, key, value)?),
                "observable" => s.observable = Some(value.to_string()),
                "format" => s.format = Some(value.parse()?),
                "out" => s.out = Some(PathBuf::from(value)),
                _ => unreachable!("key list and match arms agree"),
            }
        }
        Ok(s)
    }

    /// Fields of `over` replace fields of `self` where given.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            scenario: over.scenario.or(self.scenario),
            molecules: over.molecules.or(self.molecules),
            epsilon: over.epsilon.or(self.epsilon),
            rounds: over.rounds.or(self.rounds),
            seed: over.seed.or(self.seed),
            observable: over.observable.or(self.observable),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
        }
    }
}

/// A validated run request.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub molecules: u64,
    pub epsilon: Option<f64>,
    /// `0` means exact values only.
    pub rounds: u64,
    pub seed: u64,
    pub observable: Option<String>,
    pub output_format: OutputFormat,
}

impl ScenarioConfig {
    pub fn new(scenario: &str, molecules: u64) -> Self {
        Self {
            scenario: scenario.to_string(),
            molecules,
            epsilon: None,
            rounds: 0,
            seed: DEFAULT_SEED,
            observable: None,
            output_format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        if scenarios::lookup(&self.scenario).is_none() {
            return Err(UsageError(format!("unknown scenario {:?}; run `esd list` for the registry", self.scenario)));
        }
        if self.molecules == 0 {
            return Err(UsageError("molecules must be at least 1".into()));
        }
        if let Some(eps) = self.epsilon {
            if !(0.0..=1.0).contains(&eps) {
                return Err(UsageError(format!("epsilon must lie in [0, 1], got {eps}")));
            }
        }
        if self.rounds == 1 {
            return Err(UsageError("rounds must be 0 (exact only) or at least 2".into()));
        }
        Ok(())
    }
}

impl TryFrom<Settings> for ScenarioConfig {
    type Error = UsageError;

    fn try_from(s: Settings) -> Result<Self, UsageError> {
        let scenario = s
            .scenario
            .ok_or_else(|| UsageError("no scenario given (use --scenario or a config file)".into()))?;
        let cfg = ScenarioConfig {
            scenario,
            molecules: s.molecules.unwrap_or(DEFAULT_MOLECULES),
            epsilon: s.epsilon,
            rounds: s.rounds.unwrap_or(0),
            seed: s.seed.unwrap_or(DEFAULT_SEED),
            observable: s.observable,
            output_format: s.format.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let text = "# run file\nscenario = despagnat\nmolecules=50 # trailing\n\nepsilon = 0.1\nrounds = 10\nseed = 7\nobservable = ZZ\nformat = json-lines\nout = r.jsonl\n";
        let s = Settings::parse(text).unwrap();
        assert_eq!(s.scenario.as_deref(), Some("despagnat"));
        assert_eq!(s.molecules, Some(50));
        assert_eq!(s.epsilon, Some(0.1));
        assert_eq!(s.rounds, Some(10));
        assert_eq!(s.seed, Some(7));
        assert_eq!(s.observable.as_deref(), Some("ZZ"));
        assert_eq!(s.format, Some(OutputFormat::JsonLines));
        assert_eq!(s.out, Some(PathBuf::from("r.jsonl")));
    }

    #[test]
    fn rejects_malformed_lines() {
        for bad in [
            "scenario",
            "scenario =",
            "color = red",
            "molecules = -1",
            "molecules = 1.5",
            "seed = x",
            "format = xml",
            "rounds = 1\nrounds = 2",
        ] {
            assert!(Settings::parse(bad).is_err(), "{bad:?}");
        }
        assert_eq!(Settings::parse("").unwrap(), Settings::default());
        assert_eq!(Settings::parse("# only\n   \n").unwrap(), Settings::default());
    }

    #[test]
    fn flags_override_file() {
        let file = Settings::parse("scenario = despagnat\nmolecules = 10\nseed = 3").unwrap();
        let flags = Settings {
            molecules: Some(20),
            ..Settings::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.molecules, Some(20));
        assert_eq!(merged.seed, Some(3));
        assert_eq!(merged.scenario.as_deref(), Some("despagnat"));
    }

    #[test]
    fn validation() {
        let base = |f: &dyn Fn(&mut Settings)| {
            let mut s = Settings {
                scenario: Some("despagnat".into()),
                ..Settings::default()
            };
            f(&mut s);
            ScenarioConfig::try_from(s)
        };
        let ok = base(&|_| {}).unwrap();
        assert_eq!(ok.molecules, DEFAULT_MOLECULES);
        assert_eq!(ok.rounds, 0);
        assert!(base(&|s| s.scenario = Some("foo".into())).is_err());
        assert!(base(&|s| s.scenario = None).is_err());
        assert!(base(&|s| s.molecules = Some(0)).is_err());
        assert!(base(&|s| s.epsilon = Some(1.5)).is_err());
        assert!(base(&|s| s.epsilon = Some(f64::NAN)).is_err());
        assert!(base(&|s| s.rounds = Some(1)).is_err());
        assert!(base(&|s| s.rounds = Some(2)).is_ok());
    }
}
