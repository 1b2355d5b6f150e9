//! Run configuration: flat `key = value` text merged with command-line
//! flags, validated into a typed [`RunConfig`] before anything runs.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::PathBuf;
use std::str::FromStr;

use latticeflow::validation::Suite;
use latticeflow::{parse_rational, BranchPolicy, MultiLayerParams, Rational, TiePolicy};
use thiserror::Error;

/// Every key accepted in a config file, in dump order.
pub const KEYS: [&str; 22] = [
    "command", "alpha", "gamma", "delta", "deltas", "epsilon", "ymax", "overlay", "dmax", "points", "l1",
    "l2", "horizon", "tie", "branch", "flow", "compare", "eps", "suite", "seed", "out", "format",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

fn field_err(field: &str, message: impl ToString) -> ConfigError {
    ConfigError::Field { field: field.to_string(), message: message.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Velocity,
    Pinning,
    Evolve,
    Validate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Velocity => "velocity",
            Command::Pinning => "pinning",
            Command::Evolve => "evolve",
            Command::Validate => "validate",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [Command::Velocity, Command::Pinning, Command::Evolve, Command::Validate]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command '{s}' (expected velocity, pinning, evolve or validate)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowKind {
    Discrete,
    Ode,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// A fully validated run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub alpha: Rational,
    pub gamma: Rational,
    pub deltas: Vec<Rational>,
    pub epsilon: Rational,
    pub ymax: Rational,
    pub overlay: bool,
    pub dmax: Rational,
    pub points: usize,
    pub l1: Rational,
    pub l2: Rational,
    pub horizon: Rational,
    pub tie: TiePolicy,
    pub branch: BranchPolicy,
    pub flow: FlowKind,
    pub compare: bool,
    pub eps: Vec<Rational>,
    /// `None` runs every suite.
    pub suite: Option<Suite>,
    pub seed: u64,
    pub out: PathBuf,
    pub formats: Vec<Format>,
}

impl RunConfig {
    pub fn law(&self) -> MultiLayerParams {
        MultiLayerParams::new(self.alpha, self.gamma, self.deltas.clone()).expect("validated")
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// Canonical `key = value` text; parsing it back gives the same run.
    pub fn dump(&self) -> String {
        let list = |v: &[Rational]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("command", self.command.name().into());
        put("alpha", self.alpha.to_string());
        put("gamma", self.gamma.to_string());
        put("deltas", list(&self.deltas));
        put("epsilon", self.epsilon.to_string());
        put("ymax", self.ymax.to_string());
        put("overlay", self.overlay.to_string());
        put("dmax", self.dmax.to_string());
        put("points", self.points.to_string());
        put("l1", self.l1.to_string());
        put("l2", self.l2.to_string());
        put("horizon", self.horizon.to_string());
        put(
            "tie",
            match self.tie {
                TiePolicy::SmallerStep => "smaller-step",
                TiePolicy::LargerStep => "larger-step",
            }
            .into(),
        );
        put(
            "branch",
            match self.branch {
                BranchPolicy::Lower => "lower",
                BranchPolicy::Upper => "upper",
            }
            .into(),
        );
        put(
            "flow",
            match self.flow {
                FlowKind::Discrete => "discrete",
                FlowKind::Ode => "ode",
                FlowKind::Both => "both",
            }
            .into(),
        );
        put("compare", self.compare.to_string());
        put("eps", list(&self.eps));
        put("suite", self.suite.map_or("all".to_string(), |s| s.name().to_string()));
        put("seed", self.seed.to_string());
        put("out", self.out.display().to_string());
        let formats: Vec<&str> = self
            .formats
            .iter()
            .map(|f| match f {
                Format::Csv => "csv",
                Format::Json => "json",
                Format::Svg => "svg",
            })
            .collect();
        put("format", formats.join(","));
        out
    }
}

/// Parse config-file text into raw key/value pairs. Unknown and repeated
/// keys are rejected by name.
pub fn parse_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { line: n + 1, message: format!("expected 'key = value', got '{line}'") });
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(field_err(k, "unknown key"));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(field_err(k, "key given more than once"));
        }
    }
    Ok(map)
}

fn rational(raw: &BTreeMap<String, String>, key: &str, default: &str) -> Result<Rational, ConfigError> {
    let text = raw.get(key).map(String::as_str).unwrap_or(default);
    parse_rational(text).map_err(|e| field_err(key, e))
}

fn positive(raw: &BTreeMap<String, String>, key: &str, default: &str) -> Result<Rational, ConfigError> {
    let r = rational(raw, key, default)?;
    if r <= Rational::from_integer(0) {
        return Err(field_err(key, "must be positive"));
    }
    Ok(r)
}

fn rational_list(raw: &BTreeMap<String, String>, key: &str, default: &str) -> Result<Vec<Rational>, ConfigError> {
    let text = raw.get(key).map(String::as_str).unwrap_or(default);
    let list = text
        .split(',')
        .map(|s| parse_rational(s).map_err(|e| field_err(key, e)))
        .collect::<Result<Vec<_>, _>>()?;
    if list.is_empty() {
        return Err(field_err(key, "empty list"));
    }
    Ok(list)
}

fn boolean(raw: &BTreeMap<String, String>, key: &str) -> Result<bool, ConfigError> {
    match raw.get(key).map(String::as_str) {
        None | Some("false") => Ok(false),
        Some("true") => Ok(true),
        Some(other) => Err(field_err(key, format!("expected true or false, got '{other}'"))),
    }
}

fn choice<T: Copy>(
    raw: &BTreeMap<String, String>,
    key: &str,
    default: T,
    options: &[(&str, T)],
) -> Result<T, ConfigError> {
    let Some(text) = raw.get(key) else { return Ok(default) };
    options.iter().find(|(name, _)| name == text).map(|(_, v)| *v).ok_or_else(|| {
        let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
        field_err(key, format!("'{text}' is not one of {}", names.join(", ")))
    })
}

/// Validate raw pairs into a run, filling defaults.
pub fn resolve(raw: &BTreeMap<String, String>) -> Result<RunConfig, ConfigError> {
    let command = raw
        .get("command")
        .ok_or_else(|| field_err("command", "missing (velocity, pinning, evolve or validate)"))?
        .parse::<Command>()
        .map_err(|e| field_err("command", e))?;
    let alpha = positive(raw, "alpha", "1")?;
    let gamma = positive(raw, "gamma", "1")?;
    let deltas = match (raw.contains_key("delta"), raw.contains_key("deltas")) {
        (true, true) => return Err(field_err("deltas", "give either delta or deltas, not both")),
        (true, false) => vec![rational(raw, "delta", "0")?],
        (false, true) => rational_list(raw, "deltas", "0")?,
        (false, false) => vec![Rational::from_integer(0)],
    };
    let field = if raw.contains_key("delta") { "delta" } else { "deltas" };
    if deltas.iter().any(|d| *d < Rational::from_integer(0)) {
        return Err(field_err(field, "contrast parameters must be nonnegative"));
    }
    MultiLayerParams::new(alpha, gamma, deltas.clone()).map_err(|e| field_err(field, e))?;

    let points = match raw.get("points") {
        None => 200,
        Some(t) => t.parse::<usize>().ok().filter(|n| *n >= 1).ok_or_else(|| field_err("points", "expected a positive integer"))?,
    };
    let seed = match raw.get("seed") {
        None => 0,
        Some(t) => t.parse::<u64>().map_err(|_| field_err("seed", "expected a nonnegative integer"))?,
    };
    let l1 = positive(raw, "l1", "1")?;
    let l2 = match raw.get("l2") {
        Some(_) => positive(raw, "l2", "1")?,
        None => l1,
    };
    let eps = rational_list(raw, "eps", "1/10,1/20,1/40,1/80")?;
    if eps.iter().any(|e| *e <= Rational::from_integer(0)) {
        return Err(field_err("eps", "every entry must be positive"));
    }
    let suite = match raw.get("suite").map(String::as_str) {
        None | Some("all") => None,
        Some(name) => Some(name.parse::<Suite>().map_err(|e| field_err("suite", e))?),
    };
    let mut formats = Vec::new();
    for f in raw.get("format").map(String::as_str).unwrap_or("csv,json,svg").split(',') {
        let f = match f.trim() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            "svg" => Format::Svg,
            other => return Err(field_err("format", format!("unknown format '{other}'"))),
        };
        if !formats.contains(&f) {
            formats.push(f);
        }
    }
    formats.sort();

    Ok(RunConfig {
        command,
        alpha,
        gamma,
        deltas,
        epsilon: positive(raw, "epsilon", "1/100")?,
        ymax: positive(raw, "ymax", "4")?,
        overlay: boolean(raw, "overlay")?,
        dmax: positive(raw, "dmax", "1")?,
        points,
        l1,
        l2,
        horizon: positive(raw, "horizon", "1")?,
        tie: choice(
            raw,
            "tie",
            TiePolicy::SmallerStep,
            &[("smaller-step", TiePolicy::SmallerStep), ("larger-step", TiePolicy::LargerStep)],
        )?,
        branch: choice(raw, "branch", BranchPolicy::Upper, &[("lower", BranchPolicy::Lower), ("upper", BranchPolicy::Upper)])?,
        flow: choice(
            raw,
            "flow",
            FlowKind::Both,
            &[("discrete", FlowKind::Discrete), ("ode", FlowKind::Ode), ("both", FlowKind::Both)],
        )?,
        compare: boolean(raw, "compare")?,
        eps,
        suite,
        seed,
        out: PathBuf::from(raw.get("out").map(String::as_str).unwrap_or(".")),
        formats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> Result<RunConfig, ConfigError> {
        resolve(&parse_text(text)?)
    }

    #[test]
    fn defaults_and_round_trip() {
        let c = run("command = evolve\ndelta = 0.25 # quarter\n").unwrap();
        assert_eq!(c.deltas, vec![Rational::new(1, 4)]);
        assert_eq!(c.l2, c.l1);
        assert_eq!(run(&c.dump()).unwrap(), c);
    }

    #[test]
    fn rejects_by_field() {
        let field = |t: &str| match run(t) {
            Err(ConfigError::Field { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(field("command = velocity\nwidth = 3\n"), "width");
        assert_eq!(field("command = velocity\nalpha = 1\nalpha = 2\n"), "alpha");
        assert_eq!(field("command = velocity\nalpha = 0\n"), "alpha");
        assert_eq!(field("command = velocity\ndelta = -1\n"), "delta");
        assert_eq!(field("command = fly\n"), "command");
        assert_eq!(field("command = evolve\ntie = random\n"), "tie");
        assert!(matches!(run("command velocity"), Err(ConfigError::Syntax { line: 1, .. })));
    }
}
