mod commands;
mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};
use latticeflow::validation::Fault;

use crate::commands::RunError;

/// Effective velocities, pinning thresholds and rectangle flows in a
/// periodic low-contrast lattice medium.
#[derive(Parser, Debug)]
#[command(name = "latticeflow", version)]
struct Cli {
    /// velocity | pinning | evolve | validate
    command: Option<String>,

    /// File of `key = value` lines; flags override it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Print the resolved configuration and exit.
    #[arg(long)]
    dump_config: bool,

    #[arg(long, hide = true)]
    inject_fault: Option<String>,

    #[command(flatten)]
    keys: Keys,
}

#[derive(Args, Debug)]
struct Keys {
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// Single contrast parameter.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Comma-separated contrast parameters, one per layer.
    #[arg(long)]
    deltas: Option<String>,
    /// Lattice spacing for the discrete flow.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    ymax: Option<String>,
    /// Add the homogeneous and high-contrast staircases.
    #[arg(long)]
    overlay: bool,
    #[arg(long)]
    dmax: Option<String>,
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    l1: Option<String>,
    #[arg(long)]
    l2: Option<String>,
    #[arg(long)]
    horizon: Option<String>,
    /// smaller-step | larger-step
    #[arg(long)]
    tie: Option<String>,
    /// lower | upper
    #[arg(long)]
    branch: Option<String>,
    /// discrete | ode | both
    #[arg(long)]
    flow: Option<String>,
    /// Also compare the two flows over `--eps`.
    #[arg(long)]
    compare: bool,
    #[arg(long)]
    eps: Option<String>,
    /// Suite name or `all`.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long)]
    format: Option<String>,
}

impl Keys {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let text = [
            ("alpha", &self.alpha),
            ("gamma", &self.gamma),
            ("delta", &self.delta),
            ("deltas", &self.deltas),
            ("epsilon", &self.epsilon),
            ("ymax", &self.ymax),
            ("dmax", &self.dmax),
            ("points", &self.points),
            ("l1", &self.l1),
            ("l2", &self.l2),
            ("horizon", &self.horizon),
            ("tie", &self.tie),
            ("branch", &self.branch),
            ("flow", &self.flow),
            ("eps", &self.eps),
            ("suite", &self.suite),
            ("seed", &self.seed),
            ("out", &self.out),
            ("format", &self.format),
        ];
        let mut out: Vec<(&'static str, String)> =
            text.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k, v))).collect();
        for (k, on) in [("overlay", self.overlay), ("compare", self.compare)] {
            if on {
                out.push((k, "true".into()));
            }
        }
        out
    }
}

fn raw_config(cli: &Cli) -> Result<BTreeMap<String, String>, RunError> {
    let mut raw = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|source| RunError::Io { path: path.display().to_string(), source })?;
            config::parse_text(&text)?
        }
        None => BTreeMap::new(),
    };
    if let Some(c) = &cli.command {
        raw.insert("command".into(), c.clone());
    }
    for (k, v) in cli.keys.pairs() {
        // a flag replaces the file's value; delta and deltas shadow each other
        match k {
            "delta" => raw.remove("deltas"),
            "deltas" => raw.remove("delta"),
            _ => None,
        };
        raw.insert(k.into(), v);
    }
    Ok(raw)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fault = match cli.inject_fault.as_deref() {
        None => None,
        Some("off-by-one") => Some(Fault::OffByOne),
        Some(other) => {
            eprintln!("error: unknown fault '{other}'");
            return ExitCode::from(2);
        }
    };
    let resolved = raw_config(&cli).and_then(|raw| config::resolve(&raw).map_err(RunError::from));
    let run_config = match resolved {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.dump_config {
        print!("{}", run_config.dump());
        return ExitCode::SUCCESS;
    }
    match commands::run(&run_config, fault) {
        Ok(outcome) => {
            for f in &outcome.files {
                eprintln!("wrote {f}");
            }
            if outcome.validation_failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(RunError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
