//! Experiment specification files.
//!
//! A spec is a flat list of `key = value` lines. `#` starts a comment, blank
//! lines are ignored, keys are case-insensitive and list values are
//! comma-separated:
//!
//! ```text
//! # Table 1 at desk scale
//! experiment   = outliers
//! models       = D1, D2, D3, D4, D5, D6
//! methods      = rpd:0.001, rpd:0.1, fd, mbd, id, sd
//! n            = 200
//! outliers     = 20
//! replications = 20
//! seed         = 2024
//! ```
//!
//! Values are resolved with precedence command line > file > built-in
//! default for the experiment kind. Recognized keys:
//!
//! | key | meaning |
//! |-----|---------|
//! | `experiment` | `outliers`, `classify`, `kwtest`, `location`, `converge` or `depth` |
//! | `models` | model ids (`D1`..`D6`, `C1`..`C3`, `T1`..`T4`, `L1`..`L6`) |
//! | `methods` | depths: `fd`, `mbd`, `id`, `sd`, `rpd:<u>` |
//! | `n`, `grid` | sample size and grid length `T` |
//! | `outliers` | number of outliers `m` (outlier models) |
//! | `epsilon` | contamination fractions (location) |
//! | `severity` | severities `c` (two-sample tests) |
//! | `replications` | Monte Carlo runs `R` (MC runs per batch for `converge`) |
//! | `seed` | master seed |
//! | `beta_directions`, `pool_directions`, `rejection_cap` | RPD budgets `L`, `M` and the per-direction draw cap |
//! | `classifiers` | `max` and/or `dd` |
//! | `n_test` | test curves per class |
//! | `kw_reference` | `first` (depth w.r.t. the first group) or `pooled` |
//! | `checkpoints`, `batches` | pool sizes `M` traced and sample batches (`converge`) |
//! | `input`, `output`, `threads` | dataset CSV, result path, worker threads |

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::datagen::{ModelFamily, ModelId, ModelParams};
use crate::depth::{DepthConfig, DepthMethod};
use crate::error::{FdError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Outliers,
    Classify,
    KwTest,
    Location,
    Converge,
    Depth,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Outliers,
        ExperimentKind::Classify,
        ExperimentKind::KwTest,
        ExperimentKind::Location,
        ExperimentKind::Converge,
        ExperimentKind::Depth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Outliers => "outliers",
            ExperimentKind::Classify => "classify",
            ExperimentKind::KwTest => "kwtest",
            ExperimentKind::Location => "location",
            ExperimentKind::Converge => "converge",
            ExperimentKind::Depth => "depth",
        }
    }

    fn family(self) -> Option<ModelFamily> {
        match self {
            ExperimentKind::Outliers => Some(ModelFamily::Outlier),
            ExperimentKind::Classify => Some(ModelFamily::Classification),
            ExperimentKind::KwTest => Some(ModelFamily::TwoSample),
            ExperimentKind::Location => Some(ModelFamily::Contamination),
            _ => None,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = FdError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| FdError::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    MaxDepth,
    LinearDd,
}

impl ClassifierKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::MaxDepth => "max",
            ClassifierKind::LinearDd => "dd",
        }
    }
}

impl FromStr for ClassifierKind {
    type Err = FdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "max" | "max-depth" => Ok(ClassifierKind::MaxDepth),
            "dd" | "linear-dd" => Ok(ClassifierKind::LinearDd),
            _ => Err(FdError::Config(format!("unknown classifier '{s}'"))),
        }
    }
}

/// Reference sample for the depth ranks of the two-sample test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KwReference {
    /// Depth of every curve with respect to the first group.
    FirstGroup,
    /// Depth of every curve with respect to both groups together.
    Pooled,
}

impl FromStr for KwReference {
    type Err = FdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "first" | "first-group" => Ok(KwReference::FirstGroup),
            "pooled" => Ok(KwReference::Pooled),
            _ => Err(FdError::Config(format!("unknown kw_reference '{s}' (expected first or pooled)"))),
        }
    }
}

impl fmt::Display for KwReference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KwReference::FirstGroup => "first",
            KwReference::Pooled => "pooled",
        })
    }
}

/// A fully resolved and validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: ExperimentKind,
    pub models: Vec<ModelId>,
    pub methods: Vec<DepthMethod>,
    pub n: usize,
    pub grid_len: usize,
    pub outliers: usize,
    pub epsilons: Vec<f64>,
    pub severities: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
    pub beta_directions: usize,
    pub pool_directions: usize,
    pub rejection_cap: usize,
    pub classifiers: Vec<ClassifierKind>,
    pub n_test: usize,
    pub kw_reference: KwReference,
    pub checkpoints: Vec<usize>,
    pub batches: usize,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// Worker threads; 0 lets the thread pool choose.
    pub threads: usize,
}

const KEYS: [&str; 21] = [
    "experiment",
    "models",
    "methods",
    "n",
    "grid",
    "outliers",
    "epsilon",
    "severity",
    "replications",
    "seed",
    "beta_directions",
    "pool_directions",
    "rejection_cap",
    "classifiers",
    "n_test",
    "kw_reference",
    "checkpoints",
    "batches",
    "input",
    "output",
    "threads",
];

/// Where a raw value came from, for error messages.
#[derive(Debug, Clone, PartialEq)]
enum Origin {
    File { line: usize, column: usize },
    CommandLine,
}

/// Raw `key = value` assignments before resolution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawSpec {
    values: BTreeMap<String, (String, Origin)>,
}

impl RawSpec {
    /// Parse the text of a spec file.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawSpec::default();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = line.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let Some(eq) = content.find('=') else {
                return Err(FdError::Parse {
                    line: line_no,
                    column: content.len() - content.trim_start().len() + 1,
                    message: "expected 'key = value'".into(),
                });
            };
            let key = content[..eq].trim().to_ascii_lowercase();
            let after = &content[eq + 1..];
            let value = after.trim().to_string();
            let value_column = eq + 2 + (after.len() - after.trim_start().len());
            let key_column = content.len() - content.trim_start().len() + 1;
            if !KEYS.contains(&key.as_str()) {
                return Err(FdError::Parse {
                    line: line_no,
                    column: key_column,
                    message: format!("unknown key '{key}'"),
                });
            }
            if raw.values.contains_key(&key) {
                return Err(FdError::Parse {
                    line: line_no,
                    column: key_column,
                    message: format!("duplicate key '{key}'"),
                });
            }
            raw.values.insert(key, (value, Origin::File { line: line_no, column: value_column }));
        }
        Ok(raw)
    }

    /// Apply a command line override; it replaces any value from the file.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let key = key.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(FdError::Config(format!("unknown key '{key}'")));
        }
        self.values.insert(key, (value.into().trim().to_string(), Origin::CommandLine));
        Ok(())
    }

    /// Apply `key=value` overrides.
    pub fn set_assignment(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| FdError::Config(format!("override '{assignment}' is not of the form key=value")))?;
        self.set(k, v)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    fn field<T>(&self, key: &str, default: T, parse: impl Fn(&str) -> Result<T>) -> Result<T> {
        match self.values.get(key) {
            None => Ok(default),
            Some((v, origin)) => parse(v).map_err(|e| {
                let message = match e {
                    FdError::Config(m) | FdError::Domain(m) => m,
                    other => other.to_string(),
                };
                match origin {
                    Origin::File { line, column } => {
                        FdError::Parse { line: *line, column: *column, message: format!("{key}: {message}") }
                    }
                    Origin::CommandLine => FdError::Config(format!("{key}: {message}")),
                }
            }),
        }
    }

    /// Resolve against the defaults for the experiment kind and validate.
    /// `kind` is the subcommand; a conflicting `experiment` key is an error.
    pub fn resolve(&self, kind: Option<ExperimentKind>) -> Result<ExperimentSpec> {
        let from_file: Option<ExperimentKind> = self.field("experiment", None, |v| v.parse().map(Some))?;
        let experiment = match (kind, from_file) {
            (Some(a), Some(b)) if a != b => {
                return Err(FdError::Config(format!("subcommand '{a}' does not match experiment = {b} in the spec")))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(FdError::Config("no experiment given".into())),
        };
        let d = ExperimentSpec::defaults(experiment);
        let spec = ExperimentSpec {
            experiment,
            models: self.field("models", d.models, |v| parse_list(v, str::parse))?,
            methods: self.field("methods", d.methods, |v| parse_list(v, str::parse))?,
            n: self.field("n", d.n, parse_usize)?,
            grid_len: self.field("grid", d.grid_len, parse_usize)?,
            outliers: self.field("outliers", d.outliers, parse_usize)?,
            epsilons: self.field("epsilon", d.epsilons, |v| parse_list(v, parse_f64))?,
            severities: self.field("severity", d.severities, |v| parse_list(v, parse_f64))?,
            replications: self.field("replications", d.replications, parse_usize)?,
            seed: self
                .field("seed", d.seed, |v| v.parse().map_err(|_| FdError::Config(format!("invalid seed '{v}'"))))?,
            beta_directions: self.field("beta_directions", d.beta_directions, parse_usize)?,
            pool_directions: self.field("pool_directions", d.pool_directions, parse_usize)?,
            rejection_cap: self.field("rejection_cap", d.rejection_cap, parse_usize)?,
            classifiers: self.field("classifiers", d.classifiers, |v| parse_list(v, str::parse))?,
            n_test: self.field("n_test", d.n_test, parse_usize)?,
            kw_reference: self.field("kw_reference", d.kw_reference, str::parse)?,
            checkpoints: self.field("checkpoints", d.checkpoints, |v| parse_list(v, parse_usize))?,
            batches: self.field("batches", d.batches, parse_usize)?,
            input: self.field("input", d.input, |v| Ok(Some(PathBuf::from(v))))?,
            output: self.field("output", d.output, |v| Ok(Some(PathBuf::from(v))))?,
            threads: self.field("threads", d.threads, parse_usize)?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_usize(v: &str) -> Result<usize> {
    let v = v.replace('_', "");
    v.parse().map_err(|_| FdError::Config(format!("expected a nonnegative integer, got '{v}'")))
}

fn parse_f64(v: &str) -> Result<f64> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(FdError::Config(format!("expected a finite number, got '{v}'"))),
    }
}

fn parse_list<T>(v: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<T> = v.split(',').map(|s| s.trim()).filter(|s| !s.is_empty()).map(parse).collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(FdError::Config("empty list".into()));
    }
    Ok(items)
}

impl ExperimentSpec {
    /// Desk-scale defaults for each experiment kind.
    pub fn defaults(experiment: ExperimentKind) -> ExperimentSpec {
        use ModelId::*;
        let rpd = |u| DepthMethod::Rpd { u };
        let all_methods =
            vec![rpd(0.001), rpd(0.1), DepthMethod::Fd, DepthMethod::Mbd, DepthMethod::Id, DepthMethod::Sd];
        let base = ExperimentSpec {
            experiment,
            models: Vec::new(),
            methods: all_methods.clone(),
            n: 100,
            grid_len: 101,
            outliers: 0,
            epsilons: vec![0.0],
            severities: vec![0.0],
            replications: 20,
            seed: 0,
            beta_directions: 1000,
            pool_directions: 10_000,
            rejection_cap: 1000,
            classifiers: vec![ClassifierKind::MaxDepth],
            n_test: 400,
            kw_reference: KwReference::FirstGroup,
            checkpoints: vec![100, 1000, 10_000, 100_000],
            batches: 20,
            input: None,
            output: None,
            threads: 0,
        };
        match experiment {
            ExperimentKind::Outliers => {
                ExperimentSpec { models: vec![D1, D2, D3, D4, D5, D6], n: 200, outliers: 20, ..base }
            }
            ExperimentKind::Classify => ExperimentSpec {
                models: vec![C1, C2, C3],
                n: 200,
                classifiers: vec![ClassifierKind::MaxDepth, ClassifierKind::LinearDd],
                ..base
            },
            ExperimentKind::KwTest => ExperimentSpec {
                models: vec![T1, T2, T3, T4],
                n: 50,
                severities: vec![0.0, 0.25, 0.5, 0.75, 1.0],
                replications: 500,
                ..base
            },
            ExperimentKind::Location => ExperimentSpec {
                models: vec![L1, L2, L3, L4, L5, L6],
                methods: vec![rpd(0.1), rpd(0.5), DepthMethod::Fd, DepthMethod::Mbd, DepthMethod::Id, DepthMethod::Sd],
                epsilons: vec![0.0, 0.025, 0.05, 0.075, 0.1],
                replications: 200,
                ..base
            },
            ExperimentKind::Converge => {
                ExperimentSpec { methods: vec![rpd(0.1)], n: 50, grid_len: 51, replications: 20, ..base }
            }
            ExperimentKind::Depth => ExperimentSpec { methods: vec![DepthMethod::Fd], replications: 1, ..base },
        }
    }

    /// Depth configuration shared by all RPD evaluations of the experiment;
    /// the per-evaluation seed and `u` are filled in by the runners.
    pub fn depth_config(&self) -> DepthConfig {
        DepthConfig {
            u: 0.1,
            beta_directions: self.beta_directions,
            pool_directions: self.pool_directions,
            seed: self.seed,
            rejection_cap: self.rejection_cap,
        }
    }

    /// Model parameters for one value of the swept parameter.
    pub fn model_params(&self, param: f64) -> ModelParams {
        ModelParams {
            n: self.n,
            grid_len: self.grid_len,
            outliers: self.outliers,
            epsilon: if self.experiment == ExperimentKind::Location { param } else { 0.0 },
            severity: if self.experiment == ExperimentKind::KwTest { param } else { 0.0 },
        }
    }

    /// Values of the swept parameter (`epsilon` or `severity`), or a single 0.
    pub fn sweep(&self) -> &[f64] {
        match self.experiment {
            ExperimentKind::Location => &self.epsilons,
            ExperimentKind::KwTest => &self.severities,
            _ => &[0.0],
        }
    }

    /// Reject any configuration that cannot run, before any random draw.
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(FdError::Config(m));
        if self.methods.is_empty() {
            return cfg("at least one depth method is required".into());
        }
        if self.replications == 0 {
            return cfg("replications must be at least 1".into());
        }
        let mut config = self.depth_config();
        for m in &self.methods {
            if let DepthMethod::Rpd { u } = m {
                config.u = *u;
                config.validate().map_err(|e| FdError::Config(e.to_string()))?;
            }
        }
        if let Some(family) = self.experiment.family() {
            if self.models.is_empty() {
                return cfg("at least one model is required".into());
            }
            for &model in &self.models {
                if model.family() != family {
                    return cfg(format!("model {model} cannot be used in the {} experiment", self.experiment));
                }
                for &p in self.sweep() {
                    self.model_params(p).validate(model)?;
                }
            }
        }
        let needs_pairs = self.methods.iter().any(|m| matches!(m, DepthMethod::Mbd | DepthMethod::Sd));
        match self.experiment {
            ExperimentKind::Outliers if self.outliers == 0 => return cfg("outliers must be at least 1".into()),
            ExperimentKind::Classify => {
                if self.n_test == 0 {
                    return cfg("n_test must be positive".into());
                }
                if self.n < 2 && needs_pairs {
                    return cfg("MBD and SD need at least 2 training curves per class".into());
                }
            }
            ExperimentKind::KwTest if self.kw_reference == KwReference::FirstGroup && self.n < 4 && needs_pairs => {
                return cfg("MBD and SD need at least 2 curves in the reference group".into())
            }
            ExperimentKind::Location if self.replications < 2 => {
                return cfg("location metrics need at least 2 replications".into())
            }
            ExperimentKind::Converge => {
                if self.checkpoints.is_empty()
                    || self.checkpoints.windows(2).any(|w| w[0] >= w[1])
                    || self.checkpoints[0] == 0
                {
                    return cfg("checkpoints must be positive and strictly increasing".into());
                }
                if self.batches == 0 {
                    return cfg("batches must be at least 1".into());
                }
                if self.methods.iter().any(|m| !m.is_random()) {
                    return cfg("the converge experiment traces RPD only".into());
                }
                if self.n < 2 || self.grid_len < 2 {
                    return cfg("converge needs n >= 2 and grid >= 2".into());
                }
            }
            ExperimentKind::Depth if self.input.is_none() => {
                return cfg("the depth experiment needs an input CSV".into())
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_lists_and_overrides() {
        let text = "# header\nexperiment = outliers\nmodels = d1, D5 # trailing\n\nmethods = rpd:0.001,fd\nn=40\noutliers = 4\nseed = 7\n";
        let mut raw = RawSpec::parse(text).unwrap();
        raw.set("seed", "9").unwrap();
        let spec = raw.resolve(Some(ExperimentKind::Outliers)).unwrap();
        assert_eq!(spec.models, vec![ModelId::D1, ModelId::D5]);
        assert_eq!(spec.methods, vec![DepthMethod::Rpd { u: 0.001 }, DepthMethod::Fd]);
        assert_eq!((spec.n, spec.outliers, spec.seed, spec.replications), (40, 4, 9, 20));
    }

    #[test]
    fn errors_carry_locations() {
        let err = RawSpec::parse("n = 3\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, FdError::Parse { line: 2, column: 1, .. }), "{err}");
        let err = RawSpec::parse("n = 3\nn = 4\n").unwrap_err();
        assert!(matches!(err, FdError::Parse { line: 2, .. }));
        let err = RawSpec::parse("  just text").unwrap_err();
        assert!(matches!(err, FdError::Parse { line: 1, column: 3, .. }));
        let raw = RawSpec::parse("experiment = outliers\nn = many\n").unwrap();
        assert!(matches!(raw.resolve(None).unwrap_err(), FdError::Parse { line: 2, column: 5, .. }));
    }

    #[test]
    fn validation_rejects_out_of_domain_specs() {
        let cases = [
            "experiment = outliers\nmodels = C1",
            "experiment = outliers\noutliers = 300",
            "experiment = kwtest\nseverity = 0, 1.5",
            "experiment = kwtest\nn = 51",
            "experiment = location\nepsilon = 0.6",
            "experiment = location\nreplications = 1",
            "experiment = converge\ncheckpoints = 100, 100",
            "experiment = converge\nmethods = fd",
            "experiment = depth",
            "experiment = outliers\nreplications = 0",
        ];
        for text in cases {
            let raw = RawSpec::parse(text).unwrap();
            let err = raw.resolve(None).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}: {err}");
        }
        let raw = RawSpec::parse("experiment = outliers").unwrap();
        assert!(raw.resolve(Some(ExperimentKind::Location)).is_err());
        assert!(RawSpec::parse("methods = rpd:1.0\nexperiment=outliers").unwrap().resolve(None).is_err());
    }

    #[test]
    fn defaults_are_valid() {
        for kind in ExperimentKind::ALL {
            if kind != ExperimentKind::Depth {
                ExperimentSpec::defaults(kind).validate().unwrap();
            }
        }
    }
}
