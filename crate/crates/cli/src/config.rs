//! Config files are TOML with flat top-level keys; see the README for the
//! grammar. Parsing collects every problem it can find before failing.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use randers_lie::{AlgebraVector, Geometry, GeometryError, LieAlgebra, Metric, Preset, PresetName, PresetParams};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{CliError, Issue};

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_HORIZON: f64 = 10.0;
pub const DEFAULT_STEPS: usize = 10_000;

const KNOWN_KEYS: &[&str] = &[
    "command",
    "preset",
    "alpha",
    "c1",
    "c2",
    "n",
    "u",
    "dim",
    "brackets",
    "lambda",
    "gram",
    "drift",
    "drift_scale",
    "seed",
    "samples",
    "flagpole",
    "edge",
    "v0",
    "t",
    "steps",
    "format",
    "out",
    "threads",
];

const PRESET_ONLY: &[&str] = &["alpha", "c1", "c2", "n", "u"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Check,
    Connection,
    Curvature,
    Sectional,
    Parallel,
    Milnor,
    Randers,
    Scan,
    Geodesic,
    Report,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Check,
        Command::Connection,
        Command::Curvature,
        Command::Sectional,
        Command::Parallel,
        Command::Milnor,
        Command::Randers,
        Command::Scan,
        Command::Geodesic,
        Command::Report,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Connection => "connection",
            Command::Curvature => "curvature",
            Command::Sectional => "sectional",
            Command::Parallel => "parallel",
            Command::Milnor => "milnor",
            Command::Randers => "randers",
            Command::Scan => "scan",
            Command::Geodesic => "geodesic",
            Command::Report => "report",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlgebraSource {
    Preset {
        name: PresetName,
        params: PresetParams,
    },
    /// 0-based `(i, j, [b_i, b_j])` triples.
    Brackets {
        dim: usize,
        brackets: Vec<(usize, usize, Vec<f64>)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricSource {
    /// `lambda^2` times the identity.
    Lambda(f64),
    Gram(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DriftSpec {
    Vector(Vec<f64>),
    /// `scale` times the `index`-th (1-based) parallel basis vector.
    Parallel {
        index: usize,
        scale: f64,
    },
    /// The preset's own drift family, selected by its `u` parameter.
    Preset,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub samples: usize,
    pub flagpole: Option<Vec<f64>>,
    pub edge: Option<Vec<f64>>,
    pub v0: Option<Vec<f64>>,
    pub t: f64,
    pub steps: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 0,
            samples: DEFAULT_SAMPLES,
            flagpole: None,
            edge: None,
            v0: None,
            t: DEFAULT_HORIZON,
            steps: DEFAULT_STEPS,
            format: Format::Text,
            out: None,
            threads: None,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub flagpole: Option<Vec<f64>>,
    pub edge: Option<Vec<f64>>,
    pub v0: Option<Vec<f64>>,
    pub t: Option<f64>,
    pub steps: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Engine objects built from the config during validation.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub algebra: LieAlgebra,
    pub metric: Metric,
    pub preset: Option<Preset>,
    pub drift: Option<AlgebraVector>,
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub command: Option<Command>,
    pub algebra: AlgebraSource,
    pub metric: Option<MetricSource>,
    pub drift: Option<DriftSpec>,
    pub options: RunOptions,
    pub resolved: Resolved,
}

impl AnalysisConfig {
    pub fn dim(&self) -> usize {
        self.resolved.algebra.dim()
    }

    /// Applies command-line overrides and re-checks the affected options.
    pub fn apply(&mut self, overrides: Overrides) -> Result<(), CliError> {
        let o = &mut self.options;
        if let Some(v) = overrides.seed {
            o.seed = v;
        }
        if let Some(v) = overrides.samples {
            o.samples = v;
        }
        if overrides.flagpole.is_some() {
            o.flagpole = overrides.flagpole;
        }
        if overrides.edge.is_some() {
            o.edge = overrides.edge;
        }
        if overrides.v0.is_some() {
            o.v0 = overrides.v0;
        }
        if let Some(v) = overrides.t {
            o.t = v;
        }
        if let Some(v) = overrides.steps {
            o.steps = v;
        }
        if let Some(v) = overrides.format {
            o.format = v;
        }
        if overrides.out.is_some() {
            o.out = overrides.out;
        }
        if overrides.threads.is_some() {
            o.threads = overrides.threads;
        }
        let issues = check_options(&self.options, self.resolved.algebra.dim(), |_| None);
        if issues.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(issues))
        }
    }
}

pub fn load_config(path: &Path) -> Result<AnalysisConfig, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<AnalysisConfig, CliError> {
    let table: Table = toml::from_str(text).map_err(|e| CliError::Parse(describe_toml_error(text, &e)))?;
    let mut r = Reader {
        text,
        table: &table,
        issues: Vec::new(),
    };

    for (key, value) in table.iter() {
        if value.is_table() {
            r.issue(
                key,
                format!("unexpected table `[{key}]`; all keys live at the top level"),
            );
        } else if !KNOWN_KEYS.contains(&key.as_str()) {
            r.issue(key, format!("unknown key `{key}`"));
        }
    }

    let command = r.string("command").and_then(|s| match s.parse::<Command>() {
        Ok(c) => Some(c),
        Err(msg) => {
            r.issue("command", msg);
            None
        }
    });

    let algebra = r.algebra_source();
    let metric = r.metric_source();
    let drift = r.drift_spec();
    let options = r.options();

    let resolved = match &algebra {
        Some(source) => r.resolve(source, metric.as_ref(), drift.as_ref()),
        None => None,
    };

    if let Some(resolved) = &resolved {
        let dim = resolved.algebra.dim();
        let issues = check_options(&options, dim, |key| key_line(text, key));
        r.issues.extend(issues);
    }

    match (algebra, resolved) {
        (Some(algebra), Some(resolved)) if r.issues.is_empty() => Ok(AnalysisConfig {
            command,
            algebra,
            metric,
            drift,
            options,
            resolved,
        }),
        _ => {
            let mut issues = r.issues;
            issues.sort_by_key(|i| i.line.unwrap_or(usize::MAX));
            Err(CliError::Validation(issues))
        }
    }
}

fn describe_toml_error(text: &str, e: &toml::de::Error) -> String {
    let message = e.message().trim();
    match e.span() {
        Some(span) => format!("line {}: {message}", line_of_offset(text, span.start)),
        None => message.to_string(),
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// 1-based line on which `key = ...` is written, if any.
fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|line| {
            let line = line.trim_start();
            let rest = line
                .strip_prefix(key)
                .or_else(|| line.strip_prefix(&format!("\"{key}\"")));
            rest.is_some_and(|rest| rest.trim_start().starts_with('=')) || line.trim_end() == format!("[{key}]")
        })
        .map(|i| i + 1)
}

fn check_options(options: &RunOptions, dim: usize, line: impl Fn(&str) -> Option<usize>) -> Vec<Issue> {
    let mut issues = Vec::new();
    let mut push = |key: &str, message: String| {
        issues.push(Issue {
            line: line(key),
            message,
        })
    };
    if options.samples == 0 {
        push("samples", "samples must be at least 1".into());
    }
    if options.steps == 0 {
        push("steps", "steps must be at least 1".into());
    }
    if !(options.t.is_finite() && options.t != 0.0) {
        push("t", format!("t must be finite and nonzero, got {}", options.t));
    }
    if options.threads == Some(0) {
        push("threads", "threads must be at least 1".into());
    }
    for (key, v) in [
        ("flagpole", &options.flagpole),
        ("edge", &options.edge),
        ("v0", &options.v0),
    ] {
        if let Some(v) = v {
            if v.len() != dim {
                push(
                    key,
                    format!("{key} has {} components, the algebra has dimension {dim}", v.len()),
                );
            } else if v.iter().all(|&c| c == 0.0) {
                push(key, format!("{key} must be nonzero"));
            }
        }
    }
    if options.flagpole.is_some() != options.edge.is_some() {
        push("flagpole", "flagpole and edge must be given together".into());
    }
    issues
}

struct Reader<'a> {
    text: &'a str,
    table: &'a Table,
    issues: Vec<Issue>,
}

impl Reader<'_> {
    fn issue(&mut self, key: &str, message: impl Into<String>) {
        self.issues.push(Issue {
            line: key_line(self.text, key),
            message: message.into(),
        });
    }

    fn has(&self, key: &str) -> bool {
        self.table.contains_key(key)
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.table.get(key)? {
            Value::String(s) => Some(s.clone()),
            other => {
                self.issue(key, format!("{key} must be a string, got {}", other.type_str()));
                None
            }
        }
    }

    fn float(&mut self, key: &str) -> Option<f64> {
        let value = self.table.get(key)?;
        match number(value) {
            Some(x) if x.is_finite() => Some(x),
            Some(x) => {
                self.issue(key, format!("{key} must be finite, got {x}"));
                None
            }
            None => {
                self.issue(key, format!("{key} must be a number, got {}", value.type_str()));
                None
            }
        }
    }

    fn unsigned(&mut self, key: &str) -> Option<u64> {
        match self.table.get(key)? {
            Value::Integer(i) if *i >= 0 => Some(*i as u64),
            other => {
                self.issue(key, format!("{key} must be a non-negative integer, got {other}"));
                None
            }
        }
    }

    fn vector(&mut self, key: &str) -> Option<Vec<f64>> {
        let value = self.table.get(key)?;
        match numbers(value) {
            Some(v) => Some(v),
            None => {
                self.issue(key, format!("{key} must be an array of finite numbers"));
                None
            }
        }
    }

    fn algebra_source(&mut self) -> Option<AlgebraSource> {
        match (self.has("preset"), self.has("brackets")) {
            (true, true) => {
                self.issue("brackets", "give exactly one of `preset` and `brackets`");
                None
            }
            (false, false) => {
                self.issues.push(Issue {
                    line: None,
                    message: "no algebra given: set `preset` or `brackets`".into(),
                });
                None
            }
            (true, false) => self.preset_source(),
            (false, true) => {
                for key in PRESET_ONLY {
                    if self.has(key) {
                        self.issue(key, format!("`{key}` is a preset parameter; it needs `preset`"));
                    }
                }
                self.bracket_source()
            }
        }
    }

    fn preset_source(&mut self) -> Option<AlgebraSource> {
        if self.has("dim") {
            self.issue(
                "dim",
                "`dim` belongs to `brackets`; presets use `n` for the abelian dimension",
            );
        }
        let name = self.string("preset");
        let mut params = PresetParams {
            alpha: self.float("alpha"),
            c1: self.float("c1"),
            c2: self.float("c2"),
            u: self.float("u"),
            ..PresetParams::default()
        };
        if let Some(n) = self.unsigned("n") {
            params.n = Some(n as usize);
        }
        let name = match name?.parse::<PresetName>() {
            Ok(name) => name,
            Err(e) => {
                let names: Vec<&str> = PresetName::ALL.iter().map(|p| p.as_str()).collect();
                self.issue("preset", format!("{e}; known presets: {}", names.join(", ")));
                return None;
            }
        };
        Some(AlgebraSource::Preset { name, params })
    }

    fn bracket_source(&mut self) -> Option<AlgebraSource> {
        let declared = self.unsigned("dim").map(|d| d as usize);
        let Some(Value::Array(entries)) = self.table.get("brackets") else {
            self.issue(
                "brackets",
                "brackets must be an array of [i, j, [coefficients]] entries",
            );
            return None;
        };
        let mut brackets = Vec::with_capacity(entries.len());
        let mut ok = true;
        for (pos, entry) in entries.iter().enumerate() {
            match bracket_entry(entry) {
                Some(b) => brackets.push(b),
                None => {
                    ok = false;
                    self.issue(
                        "brackets",
                        format!("bracket entry {} is not of the form [i, j, [c1, ..., cn]]", pos + 1),
                    );
                }
            }
        }
        if !ok {
            return None;
        }
        let dim = match declared.or_else(|| brackets.first().map(|b| b.2.len())) {
            Some(d) if d > 0 => d,
            _ => {
                self.issue(
                    "brackets",
                    "cannot infer the dimension: give `dim` or at least one bracket",
                );
                return None;
            }
        };
        let mut out = Vec::with_capacity(brackets.len());
        for (i, j, coeffs) in brackets {
            if coeffs.len() != dim {
                self.issue(
                    "brackets",
                    format!("[b{i}, b{j}] has {} coefficients, expected {dim}", coeffs.len()),
                );
                ok = false;
            } else if i == 0 || j == 0 || i > dim || j > dim {
                self.issue(
                    "brackets",
                    format!("basis index out of range 1..={dim} in [b{i}, b{j}]"),
                );
                ok = false;
            } else {
                out.push((i - 1, j - 1, coeffs));
            }
        }
        ok.then_some(AlgebraSource::Brackets { dim, brackets: out })
    }

    fn metric_source(&mut self) -> Option<MetricSource> {
        if self.has("lambda") && self.has("gram") {
            self.issue("gram", "give at most one of `lambda` and `gram`");
            return None;
        }
        if self.has("lambda") {
            let lambda = self.float("lambda")?;
            if lambda <= 0.0 {
                self.issue("lambda", format!("lambda must be positive, got {lambda}"));
                return None;
            }
            return Some(MetricSource::Lambda(lambda));
        }
        let value = self.table.get("gram")?;
        let rows = match value {
            Value::Array(rows) => rows.iter().map(numbers).collect::<Option<Vec<_>>>(),
            _ => None,
        };
        match rows {
            Some(rows) if !rows.is_empty() && rows.iter().all(|r| r.len() == rows.len()) => {
                Some(MetricSource::Gram(rows))
            }
            _ => {
                self.issue("gram", "gram must be a square array of arrays of finite numbers");
                None
            }
        }
    }

    fn drift_spec(&mut self) -> Option<DriftSpec> {
        let scale = self.float("drift_scale");
        let preset_u = self.has("u");
        let Some(value) = self.table.get("drift") else {
            if scale.is_some() {
                self.issue("drift_scale", "drift_scale needs `drift = \"parallel:k\"`");
            }
            return preset_u.then_some(DriftSpec::Preset);
        };
        if preset_u {
            self.issue(
                "drift",
                "give the drift either as `drift` or through the preset parameter `u`",
            );
            return None;
        }
        match value {
            Value::String(s) => {
                let index = s
                    .strip_prefix("parallel:")
                    .and_then(|k| k.trim().parse::<usize>().ok())
                    .filter(|&k| k >= 1);
                let Some(index) = index else {
                    self.issue(
                        "drift",
                        format!("drift selector must be \"parallel:k\" with k >= 1, got \"{s}\""),
                    );
                    return None;
                };
                let Some(scale) = scale else {
                    if !self.has("drift_scale") {
                        self.issue("drift", "drift = \"parallel:k\" needs a `drift_scale`");
                    }
                    return None;
                };
                Some(DriftSpec::Parallel { index, scale })
            }
            _ => {
                if scale.is_some() {
                    self.issue("drift_scale", "drift_scale only applies to `drift = \"parallel:k\"`");
                }
                self.vector("drift").map(DriftSpec::Vector)
            }
        }
    }

    fn options(&mut self) -> RunOptions {
        let mut o = RunOptions::default();
        if let Some(seed) = self.unsigned("seed") {
            o.seed = seed;
        }
        if let Some(samples) = self.unsigned("samples") {
            o.samples = samples as usize;
        }
        if let Some(steps) = self.unsigned("steps") {
            o.steps = steps as usize;
        }
        if let Some(threads) = self.unsigned("threads") {
            o.threads = Some(threads as usize);
        }
        if let Some(t) = self.float("t") {
            o.t = t;
        }
        o.flagpole = self.vector("flagpole");
        o.edge = self.vector("edge");
        o.v0 = self.vector("v0");
        if let Some(f) = self.string("format") {
            match f.as_str() {
                "text" => o.format = Format::Text,
                "json" => o.format = Format::Json,
                _ => self.issue("format", format!("format must be \"text\" or \"json\", got \"{f}\"")),
            }
        }
        o.out = self.string("out").map(PathBuf::from);
        o
    }

    fn engine_issue(&mut self, key: &str, e: GeometryError) {
        self.issue(key, e.to_string());
    }

    /// Builds the algebra, metric and drift, turning engine rejections into
    /// validation issues.
    fn resolve(
        &mut self,
        source: &AlgebraSource,
        metric: Option<&MetricSource>,
        drift: Option<&DriftSpec>,
    ) -> Option<Resolved> {
        let (algebra, preset) = match source {
            AlgebraSource::Preset { name, params } => {
                let mut params = *params;
                if let Some(MetricSource::Lambda(lambda)) = metric {
                    params.lambda = Some(*lambda);
                }
                match Preset::new(*name, &params) {
                    Ok(p) => (p.algebra.clone(), Some(p)),
                    Err(e) => {
                        self.engine_issue("preset", e);
                        return None;
                    }
                }
            }
            AlgebraSource::Brackets { dim, brackets } => {
                let algebra = match LieAlgebra::from_brackets(*dim, brackets) {
                    Ok(a) => a,
                    Err(e) => {
                        self.engine_issue("brackets", e);
                        return None;
                    }
                };
                let (residual, (i, j, k)) = algebra.jacobi_worst();
                let tolerance = algebra.jacobi_tolerance();
                if residual > tolerance {
                    self.issue(
                        "brackets",
                        format!(
                            "brackets violate the Jacobi identity: residual {residual:e} > {tolerance:e}, \
                             worst at basis triple (b{}, b{}, b{})",
                            i + 1,
                            j + 1,
                            k + 1
                        ),
                    );
                    return None;
                }
                (algebra, None)
            }
        };
        let dim = algebra.dim();

        let metric = match metric {
            Some(MetricSource::Gram(rows)) => {
                if rows.len() != dim {
                    self.issue(
                        "gram",
                        format!("gram is {0}x{0}, the algebra has dimension {dim}", rows.len()),
                    );
                    return None;
                }
                match Metric::new(DMatrix::from_fn(dim, dim, |i, j| rows[i][j])) {
                    Ok(m) => m,
                    Err(e) => {
                        self.engine_issue("gram", e);
                        return None;
                    }
                }
            }
            Some(MetricSource::Lambda(lambda)) if preset.is_none() => match Metric::scaled_identity(dim, *lambda) {
                Ok(m) => m,
                Err(e) => {
                    self.engine_issue("lambda", e);
                    return None;
                }
            },
            _ => match &preset {
                Some(p) => p.metric.clone(),
                None => Metric::identity(dim).ok()?,
            },
        };

        let drift = match drift {
            None => None,
            Some(DriftSpec::Preset) => preset.as_ref().and_then(|p| p.drift()),
            Some(DriftSpec::Vector(v)) => {
                if v.len() != dim {
                    self.issue(
                        "drift",
                        format!("drift has {} components, the algebra has dimension {dim}", v.len()),
                    );
                    return None;
                }
                Some(DVector::from_column_slice(v))
            }
            Some(DriftSpec::Parallel { index, scale }) => {
                let geometry = match Geometry::new(algebra.clone(), metric.clone()) {
                    Ok(g) => g,
                    Err(e) => {
                        self.engine_issue("drift", e);
                        return None;
                    }
                };
                let space = geometry.parallel_space();
                match space.basis.get(index - 1) {
                    Some(b) => Some(b * *scale),
                    None => {
                        self.issue(
                            "drift",
                            format!(
                                "drift = \"parallel:{index}\" is unavailable: the parallel space is {}-dimensional",
                                space.dimension()
                            ),
                        );
                        return None;
                    }
                }
            }
        };

        Some(Resolved {
            algebra,
            metric,
            preset,
            drift,
        })
    }
}

fn number(value: &Value) -> Option<f64> {
    match value {
        Value::Integer(i) => Some(*i as f64),
        Value::Float(x) => Some(*x),
        _ => None,
    }
}

fn numbers(value: &Value) -> Option<Vec<f64>> {
    value
        .as_array()?
        .iter()
        .map(|v| number(v).filter(|x| x.is_finite()))
        .collect()
}

fn bracket_entry(value: &Value) -> Option<(usize, usize, Vec<f64>)> {
    match value.as_array()?.as_slice() {
        [Value::Integer(i), Value::Integer(j), coeffs] if *i >= 0 && *j >= 0 => {
            Some((*i as usize, *j as usize, numbers(coeffs)?))
        }
        _ => None,
    }
}
