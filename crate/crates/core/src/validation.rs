//! Named oracle sweeps, as run by `latticeflow validate`.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{evolve_discrete, evolve_ode, BranchPolicy, Extinction, OdeOptions, RectangleState, TiePolicy};
use crate::lattice::CoefficientField;
use crate::multilayer::MultiLayerParams;
use crate::oracle::{
    brute_force_step, brute_force_velocity, exhaustive_minimizer_small, minimal_scan_bound,
    random_regular_points, seeded_rng, OracleReport, DEFAULT_MAX_ANNULUS_CELLS,
};
use crate::rational::{fraction_string, frac, int, Rational};
use crate::side_law::{high_contrast_velocity, homogeneous_velocity, SideLawParams, VelocityLaw};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Velocity,
    Degenerate,
    Parity,
    Multilayer,
    Pinning,
    Exhaustive,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Velocity,
        Suite::Degenerate,
        Suite::Parity,
        Suite::Multilayer,
        Suite::Pinning,
        Suite::Exhaustive,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Velocity => "velocity",
            Suite::Degenerate => "degenerate",
            Suite::Parity => "parity",
            Suite::Multilayer => "multilayer",
            Suite::Pinning => "pinning",
            Suite::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: usize,
    pub passed: bool,
    /// Every disagreement, each with its witness.
    pub failures: Vec<OracleReport>,
}

impl SuiteReport {
    fn collect(suite: Suite, seed: u64, reports: Vec<OracleReport>) -> Self {
        let failures: Vec<OracleReport> = reports.iter().filter(|r| !r.agrees).cloned().collect();
        SuiteReport { suite, seed, cases: reports.len(), passed: failures.is_empty(), failures }
    }
}

/// Deliberate corruption of the closed form, used to exercise the failure
/// path end to end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Report `f + 1` instead of `f` for the first velocity case.
    OffByOne,
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    run_suite_with(suite, seed, None)
}

pub fn run_suite_with(suite: Suite, seed: u64, fault: Option<Fault>) -> Result<SuiteReport> {
    let reports = match suite {
        Suite::Velocity => velocity_suite(seed, fault)?,
        Suite::Degenerate => degenerate_suite(seed)?,
        Suite::Parity => parity_suite()?,
        Suite::Multilayer => multilayer_suite(seed)?,
        Suite::Pinning => pinning_suite()?,
        Suite::Exhaustive => exhaustive_suite()?,
    };
    Ok(SuiteReport::collect(suite, seed, reports))
}

/// The `(α, γ, δγ)` grid shared by the velocity sweeps.
pub fn parameter_grid() -> Vec<SideLawParams> {
    let scales = [frac(1, 2), int(1), int(2)];
    let contrasts = [int(0), frac(1, 10), frac(1, 4), frac(49, 100), frac(1, 2), frac(3, 4), int(1)];
    let mut out = Vec::new();
    for alpha in scales {
        for gamma in scales {
            for c in contrasts {
                out.push(SideLawParams::new(alpha, gamma, c / gamma).expect("grid is valid"));
            }
        }
    }
    out
}

fn case(p: &SideLawParams, y: Rational) -> String {
    format!(
        "alpha={} gamma={} delta={} Y={}",
        fraction_string(&p.alpha()),
        fraction_string(&p.gamma()),
        fraction_string(&p.delta()),
        fraction_string(&y)
    )
}

fn velocity_suite(seed: u64, fault: Option<Fault>) -> Result<Vec<OracleReport>> {
    let mut rng = seeded_rng(seed);
    let mut out = Vec::new();
    for p in parameter_grid() {
        for y in random_regular_points(&p, 50, int(10), 1000, &mut rng) {
            let measured = brute_force_velocity(y, &p, 8)?;
            let mut closed = p.velocity_closed_form(y)?;
            if fault == Some(Fault::OffByOne) && out.is_empty() {
                closed += 1;
            }
            let orbit = p.effective_velocity(y)?;
            let name = case(&p, y);
            out.push(OracleReport::new(name.clone(), measured.velocity, int(closed as i128), || {
                format!("orbit prefix {:?}", measured.positions)
            }));
            out.push(OracleReport::new(format!("{name} (orbit)"), orbit, closed, || {
                format!("{:?}", p.orbit(y, 0, 8))
            }));
        }
    }
    Ok(out)
}

fn degenerate_suite(seed: u64) -> Result<Vec<OracleReport>> {
    let mut rng = seeded_rng(seed);
    let mut out = Vec::new();
    for p in parameter_grid() {
        let c = p.delta() * p.gamma();
        let reference: fn(Rational, Rational) -> u64 = if c.is_zero() {
            homogeneous_velocity
        } else if c >= frac(1, 2) {
            high_contrast_velocity
        } else {
            continue;
        };
        for y in random_regular_points(&p, 100, int(10), 1000, &mut rng) {
            out.push(OracleReport::new(
                case(&p, y),
                reference(p.alpha(), y),
                p.velocity_closed_form(y)?,
                || format!("minimizers {:?}", p.minimizers(y)),
            ));
        }
    }
    Ok(out)
}

/// The 1000 points `2αY = k/100`, `k = 1..=1000`, minus breakpoints. The
/// odd windows `(2j + 1 + C, 2j + 2 − C)` are centred on `2j + 3/2`, which
/// the grid always contains.
pub fn parity_grid(law: &impl VelocityLaw) -> Vec<Rational> {
    let two_alpha = int(2) * law.alpha();
    (1..=1000).map(|k| frac(k, 100) / two_alpha).filter(|y| !law.is_singular(*y)).collect()
}

fn parity_suite() -> Result<Vec<OracleReport>> {
    let mut out = Vec::new();
    for p in parameter_grid() {
        let c = p.delta() * p.gamma();
        let mut odd_seen = None;
        for y in parity_grid(&p) {
            let scan = brute_force_step(y, &p, minimal_scan_bound(&p, y))?;
            let n = scan.unique().ok_or(Error::NonUniqueMinimizer { y, lower: 0, upper: 0 })?;
            if n % 2 == 1 {
                odd_seen.get_or_insert(y);
                if c >= frac(1, 2) {
                    out.push(OracleReport::new(case(&p, y), "odd", "even", || {
                        format!("argmin {:?}", scan.minimizers)
                    }));
                }
            }
        }
        let expectation = if c >= frac(1, 2) { "no odd step" } else { "some odd step" };
        let found = if odd_seen.is_some() { "some odd step" } else { "no odd step" };
        out.push(OracleReport::new(case(&p, int(0)), found, expectation, || {
            format!("first odd step at {odd_seen:?}")
        }));
    }
    Ok(out)
}

/// The two-layer ladder `δ = (1/5, 2/5)`, `α = γ = 1`, as `(lo, hi, f)`.
pub fn two_layer_ladder() -> Vec<(Rational, Rational, u64)> {
    vec![
        (int(0), frac(3, 5), 0),
        (frac(3, 5), frac(9, 10), 1),
        (frac(9, 10), frac(17, 10), 2),
        (frac(17, 10), frac(9, 5), 3),
        (frac(9, 5), frac(13, 5), 4),
    ]
}

fn multilayer_suite(seed: u64) -> Result<Vec<OracleReport>> {
    let mut out = Vec::new();
    let two = MultiLayerParams::new(int(1), int(1), vec![frac(1, 5), frac(2, 5)])?;
    for (lo, hi, f) in two_layer_ladder() {
        for j in 1..10 {
            let y = lo + (hi - lo) * frac(j, 10);
            let measured = brute_force_velocity(y, &two, 16)?;
            out.push(OracleReport::new(format!("ladder Y={}", fraction_string(&y)), measured.velocity, int(f as i128), || {
                format!("orbit prefix {:?}", measured.positions)
            }));
            out.push(OracleReport::new(format!("ladder closed form Y={}", fraction_string(&y)), two.velocity_closed_form_k(y)?, f, || {
                format!("minimizers {:?}", two.minimizers(y))
            }));
        }
    }
    let mut rng = seeded_rng(seed);
    use rand::Rng;
    for k in [2usize, 3] {
        for _ in 0..10 {
            let deltas: Vec<Rational> = (0..k).map(|_| frac(rng.gen_range(0..=12), 10)).collect();
            let law = MultiLayerParams::new(int(1), int(1), deltas)?;
            for y in random_regular_points(&law, 30, int(6), 500, &mut rng) {
                let measured = brute_force_velocity(y, &law, 8 * k)?;
                let name = format!("K={k} deltas={:?} Y={}", law.deltas().iter().map(fraction_string).collect::<Vec<_>>(), fraction_string(&y));
                out.push(OracleReport::new(name.clone(), measured.velocity, int(law.velocity_closed_form_k(y)? as i128), || {
                    format!("orbit prefix {:?}", measured.positions)
                }));
                out.push(OracleReport::new(format!("{name} (cycle divides 2K)"), (2 * k) % measured.cycle_length, 0, || {
                    format!("cycle length {}", measured.cycle_length)
                }));
                out.push(OracleReport::new(format!("{name} (orbit)"), law.effective_velocity_k(y)?, law.velocity_closed_form_k(y)?, || {
                    format!("{:?}", law.orbit_k(y, 0, None))
                }));
            }
        }
    }
    Ok(out)
}

fn pinning_suite() -> Result<Vec<OracleReport>> {
    let mut out = Vec::new();
    for p in parameter_grid() {
        // the first breakpoint of the velocity is γ over the pinning length
        let first = p.next_breakpoint_above(Rational::zero());
        out.push(OracleReport::new(case(&p, first), p.gamma() / first, p.pinning_threshold(), || {
            format!("first breakpoint {first}")
        }));
        let below = first * frac(99, 100);
        let scan = brute_force_step(below, &p, minimal_scan_bound(&p, below))?;
        out.push(OracleReport::new(case(&p, below), format!("{:?}", scan.minimizers), "[0]", || {
            "motion below the pinning breakpoint".into()
        }));
    }
    let p = SideLawParams::new(int(1), int(1), frac(1, 4))?;
    let eps = frac(1, 100);
    let steps = int(10_000);
    for (l, pinned) in [(int(2), true), (int(1), false)] {
        let side = (l / eps).to_integer() as i64;
        let start = RectangleState::centered(side, side)?;
        let traj = evolve_discrete(start, &p, eps, steps * p.gamma() * eps, TiePolicy::SmallerStep)?;
        let discrete = if traj.extinction_step.is_some() {
            "extinct"
        } else if traj.states.iter().all(|s| *s == start) {
            "constant"
        } else {
            "moving"
        };
        let ode = evolve_ode(l, l, &p, &OdeOptions::new(int(10), BranchPolicy::Upper))?;
        let continuum = match ode.extinction {
            Extinction::Pinned => "constant",
            Extinction::At { .. } => "extinct",
            Extinction::BeyondHorizon => "moving",
        };
        let expected = if pinned { "constant" } else { "extinct" };
        let name = format!("square L={}", fraction_string(&l));
        out.push(OracleReport::new(format!("{name} discrete"), discrete, expected, || {
            format!("final state {:?}", traj.states.last())
        }));
        out.push(OracleReport::new(format!("{name} ode"), continuum, expected, || {
            format!("{:?}", ode.extinction)
        }));
    }
    Ok(out)
}

/// One exhaustive instance: a rectangle with α-type sides, the field and
/// `τ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveCase {
    pub previous: RectangleState,
    pub field: CoefficientField,
    pub tau: Rational,
}

impl ExhaustiveCase {
    /// `width × height` cells at the origin, `α = γ = 1`, the given `δγ`,
    /// and `ε` chosen so that the vertical sides see `γ/L = y_vertical`.
    pub fn new(width: i64, height: i64, contrast: Rational, y_vertical: Rational) -> Result<Self> {
        let eps = int(1) / (y_vertical * int(height as i128));
        Ok(ExhaustiveCase {
            previous: RectangleState::new(0, width, 0, height)?,
            field: CoefficientField::uniform(int(1), contrast, eps)?,
            tau: eps,
        })
    }
}

/// Instances for the two-dimensional check: for each contrast regime and
/// each target velocity `f ∈ {0, 1, 2}` of the vertical sides, the
/// admissible geometries (annulus within the cell budget, no collision) at
/// the centre of the target interval.
pub fn exhaustive_instances() -> Vec<ExhaustiveCase> {
    let mut out = Vec::new();
    for contrast in [frac(1, 10), frac(1, 4), frac(1, 2), int(1)] {
        let law = SideLawParams::new(int(1), int(1), contrast).expect("valid");
        let table = law.velocity_table(int(4)).expect("valid");
        for target in [0u64, 1, 2] {
            let Some((lo, hi, _)) = table.intervals().into_iter().find(|(_, _, f)| *f == target) else {
                continue;
            };
            let y = (lo + hi) / int(2);
            for width in (2..=12).step_by(2) {
                for height in (2..=width).step_by(2) {
                    let Ok(c) = ExhaustiveCase::new(width, height, contrast, y) else { continue };
                    if admissible(&c) {
                        out.push(c);
                    }
                }
            }
        }
    }
    out
}

fn admissible(c: &ExhaustiveCase) -> bool {
    let p = &c.previous;
    let eps = c.field.epsilon();
    let law = SideLawParams::new(c.field.alpha(), c.tau / eps, c.field.deltas()[0]).expect("valid");
    let yv = law.gamma() / (int(p.height() as i128) * eps);
    let yh = law.gamma() / (int(p.width() as i128) * eps);
    let (Ok(nv), Ok(nh)) = (law.optimal_step(yv), law.optimal_step(yh)) else {
        return false;
    };
    let alive = p.width() > 2 * nv as i64 && p.height() > 2 * nh as i64;
    let inner_w = (p.width() - 2 * (nv as i64 + 1)).max(0);
    let inner_h = (p.height() - 2 * (nh as i64 + 1)).max(0);
    let annulus = (p.width() * p.height() - inner_w * inner_h) as usize;
    alive && annulus <= DEFAULT_MAX_ANNULUS_CELLS
}

fn exhaustive_suite() -> Result<Vec<OracleReport>> {
    exhaustive_instances()
        .iter()
        .map(|c| {
            exhaustive_minimizer_small(&c.previous, &c.field, c.tau, DEFAULT_MAX_ANNULUS_CELLS)
                .map(|r| r.summary())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn ladder_fixture_matches_brute_force() {
        let two = MultiLayerParams::new(int(1), int(1), vec![frac(1, 5), frac(2, 5)]).unwrap();
        for (lo, hi, f) in two_layer_ladder() {
            let y = (lo + hi) / int(2);
            assert_eq!(brute_force_velocity(y, &two, 16).unwrap().velocity, int(f as i128));
        }
    }

    #[test]
    fn fault_is_reported_with_witness() {
        let r = run_suite_with(Suite::Velocity, 1, Some(Fault::OffByOne)).unwrap();
        assert!(!r.passed);
        // the closed form disagrees with both the measured and the orbit velocity
        assert_eq!(r.failures.len(), 2);
        assert!(r.failures[0].witness.is_some());
    }

    #[test]
    fn quick_suites_pass() {
        for s in [Suite::Degenerate, Suite::Parity, Suite::Pinning] {
            let r = run_suite(s, 3).unwrap();
            assert!(r.passed, "{s}: {:?}", r.failures.first());
        }
    }
}
