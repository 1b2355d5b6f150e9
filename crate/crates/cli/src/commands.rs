use std::fs;
use std::path::Path;

use latticeflow::rational::{big_to_f64, fraction_string, int, to_f64};
use latticeflow::svg;
use latticeflow::validation::{run_suite_with, Fault, Suite, SuiteReport};
use latticeflow::{
    compare_flows, evolve_discrete, evolve_ode, Extinction, OdeOptions, Rational, RectangleState, SideLawParams,
    VelocityLaw,
};
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, FlowKind, Format, RunConfig};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] latticeflow::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// What a finished command reports back to `main`.
pub struct Outcome {
    pub files: Vec<String>,
    pub validation_failed: bool,
}

struct Writer<'a> {
    config: &'a RunConfig,
    files: Vec<String>,
}

impl Writer<'_> {
    fn put(&mut self, format: Format, name: &str, contents: &str) -> Result<(), RunError> {
        if !self.config.wants(format) {
            return Ok(());
        }
        let dir: &Path = &self.config.out;
        let io = |source| RunError::Io { path: dir.display().to_string(), source };
        fs::create_dir_all(dir).map_err(io)?;
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|source| RunError::Io { path: path.display().to_string(), source })?;
        self.files.push(path.display().to_string());
        Ok(())
    }
}

pub fn run(config: &RunConfig, fault: Option<Fault>) -> Result<Outcome, RunError> {
    let mut w = Writer { config, files: Vec::new() };
    let mut validation_failed = false;
    match config.command {
        crate::config::Command::Velocity => velocity(config, &mut w)?,
        crate::config::Command::Pinning => pinning(config, &mut w)?,
        crate::config::Command::Evolve => evolve(config, &mut w)?,
        crate::config::Command::Validate => validation_failed = validate(config, fault, &mut w)?,
    }
    Ok(Outcome { files: w.files, validation_failed })
}

fn velocity(c: &RunConfig, w: &mut Writer) -> Result<(), RunError> {
    let law = c.law();
    let table = law.table(c.ymax)?;
    w.put(Format::Csv, "velocity.csv", &table.to_csv())?;
    w.put(Format::Json, "velocity.json", &table.to_json())?;
    let mut series = vec![("f", table.clone())];
    if c.overlay {
        let homogeneous = SideLawParams::new(c.alpha, c.gamma, int(0))?.velocity_table(c.ymax)?;
        let high = SideLawParams::new(c.alpha, c.gamma, int(1) / (int(2) * c.gamma))?.velocity_table(c.ymax)?;
        w.put(Format::Csv, "velocity_homogeneous.csv", &homogeneous.to_csv())?;
        w.put(Format::Json, "velocity_homogeneous.json", &homogeneous.to_json())?;
        w.put(Format::Csv, "velocity_high_contrast.csv", &high.to_csv())?;
        w.put(Format::Json, "velocity_high_contrast.json", &high.to_json())?;
        series.push(("homogeneous", homogeneous));
        series.push(("high contrast", high));
    }
    let refs: Vec<(&str, &latticeflow::VelocityTable)> = series.iter().map(|(n, t)| (*n, t)).collect();
    w.put(Format::Svg, "velocity.svg", &svg::staircase("effective velocity", &refs))
}

#[derive(Serialize)]
struct PinningRow {
    delta: String,
    threshold: String,
}

#[derive(Serialize)]
struct PinningDoc {
    alpha: String,
    gamma: String,
    /// `δ` at which the two branches of the threshold meet.
    kink: String,
    rows: Vec<PinningRow>,
}

fn pinning(c: &RunConfig, w: &mut Writer) -> Result<(), RunError> {
    let mut rows = Vec::new();
    let mut csv = String::from("delta,threshold,threshold_float\n");
    let mut curve = Vec::new();
    for j in 0..=c.points {
        let delta = c.dmax * int(j as i128) / int(c.points as i128);
        let l = SideLawParams::new(c.alpha, c.gamma, delta)?.pinning_threshold();
        csv.push_str(&format!("{},{},{}\n", fraction_string(&delta), fraction_string(&l), to_f64(&l)));
        curve.push((to_f64(&delta), to_f64(&l)));
        rows.push(PinningRow { delta: fraction_string(&delta), threshold: fraction_string(&l) });
    }
    let doc = PinningDoc {
        alpha: fraction_string(&c.alpha),
        gamma: fraction_string(&c.gamma),
        kink: fraction_string(&(int(1) / (int(2) * c.gamma))),
        rows,
    };
    w.put(Format::Csv, "pinning.csv", &csv)?;
    w.put(Format::Json, "pinning.json", &serde_json::to_string_pretty(&doc).expect("serializes"))?;
    w.put(Format::Svg, "pinning.svg", &svg::curves("pinning threshold", "delta", "L", &[("threshold", curve)]))
}

fn cells(length: Rational, eps: Rational, field: &str) -> Result<i64, RunError> {
    let n = length / eps;
    if !n.is_integer() {
        return Err(ConfigError::Field {
            field: field.into(),
            message: format!("{length} is not a multiple of epsilon = {eps}"),
        }
        .into());
    }
    Ok(n.to_integer() as i64)
}

fn evolve(c: &RunConfig, w: &mut Writer) -> Result<(), RunError> {
    let law = c.law();
    if matches!(c.flow, FlowKind::Discrete | FlowKind::Both) {
        let start = RectangleState::centered(cells(c.l1, c.epsilon, "l1")?, cells(c.l2, c.epsilon, "l2")?)?;
        let traj = evolve_discrete(start, &law, c.epsilon, c.horizon, c.tie)?;
        w.put(Format::Csv, "discrete.csv", &traj.to_csv())?;
        w.put(Format::Json, "discrete.json", &traj.to_json())?;
        let snapshots: Vec<(String, [f64; 4])> = (0..=4)
            .map(|q| {
                let t = c.horizon * Rational::new(q, 4);
                (format!("t = {}", to_f64(&t)), traj.state_at(t).bounds(c.epsilon).map(|v| to_f64(&v)))
            })
            .collect();
        w.put(Format::Svg, "evolve.svg", &svg::rectangles("discrete flat flow", &snapshots))?;
    }
    if matches!(c.flow, FlowKind::Ode | FlowKind::Both) {
        let traj = evolve_ode(c.l1, c.l2, &law, &OdeOptions::new(c.horizon, c.branch))?;
        w.put(Format::Csv, "ode.csv", &traj.to_csv())?;
        w.put(Format::Json, "ode.json", &traj.to_json())?;
        let samples = traj.samples();
        let l1: Vec<(f64, f64)> = samples.iter().map(|(t, a, _)| (big_to_f64(t), big_to_f64(a))).collect();
        let l2: Vec<(f64, f64)> = samples.iter().map(|(t, _, b)| (big_to_f64(t), big_to_f64(b))).collect();
        w.put(Format::Svg, "ode.svg", &svg::curves("limit ODE", "t", "L", &[("L1", l1), ("L2", l2)]))?;
    }
    if c.compare {
        let report = compare_flows(c.l1, c.l2, &law, &c.eps, c.horizon, c.tie, c.branch)?;
        w.put(Format::Csv, "convergence.csv", &report.to_csv())?;
        w.put(Format::Json, "convergence.json", &report.to_json())?;
        let d: Vec<(f64, f64)> =
            report.rows.iter().map(|r| (to_f64(&r.epsilon), big_to_f64(&r.distance))).collect();
        w.put(Format::Svg, "convergence.svg", &svg::curves("sup Hausdorff distance", "epsilon", "d", &[("d", d)]))?;
        if let Extinction::At { time, .. } = &report.ode_extinction {
            eprintln!("ode extinction at t = {}", big_to_f64(time));
        }
    }
    Ok(())
}

fn validate(c: &RunConfig, fault: Option<Fault>, w: &mut Writer) -> Result<bool, RunError> {
    let suites: Vec<Suite> = match c.suite {
        Some(s) => vec![s],
        None => Suite::ALL.to_vec(),
    };
    let mut reports: Vec<SuiteReport> = Vec::new();
    for s in suites {
        let r = run_suite_with(s, c.seed, fault)?;
        println!("{:<11} {} ({} cases, {} failures)", s.name(), if r.passed { "PASS" } else { "FAIL" }, r.cases, r.failures.len());
        for f in r.failures.iter().take(5) {
            println!("  {}: oracle {} vs closed form {}; witness {}", f.case, f.oracle, f.closed_form, f.witness.as_deref().unwrap_or(""));
        }
        reports.push(r);
    }
    w.put(Format::Json, "validation.json", &serde_json::to_string_pretty(&reports).expect("serializes"))?;
    Ok(reports.iter().any(|r| !r.passed))
}
