//! Time evolution of coordinate rectangles.
//!
//! [`evolve_discrete`] runs the minimizing-movement scheme with `τ = γε`,
//! moving every side by the one-dimensional optimal step of its own length.
//! [`evolve_ode`] integrates the homogenized system
//!
//! ```text
//! L₁' = −(2/γ) f(γ/L₂)
//! L₂' = −(2/γ) f(γ/L₁)
//! ```
//!
//! exactly: `f` is piecewise constant, so between two breakpoint crossings
//! both lengths are linear and the next crossing time is solved in closed
//! form.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::LatticeSet;
use crate::rational::{self, big, big_to_f64, fraction_string, frac, int, to_f64, BigRational, Rational};
use crate::side_law::VelocityLaw;

/// Rectangle of cells `left ≤ x < right`, `bottom ≤ y < top`, in lattice
/// units. A side at an odd coordinate crosses β bonds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RectangleState {
    pub left: i64,
    pub right: i64,
    pub bottom: i64,
    pub top: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

/// Choice at a singular `Y` of the discrete scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    SmallerStep,
    LargerStep,
}

/// Choice between `f⁻` and `f⁺` when `γ/L` sits on a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchPolicy {
    Lower,
    Upper,
}

impl RectangleState {
    pub fn new(left: i64, right: i64, bottom: i64, top: i64) -> Result<Self> {
        if left >= right || bottom >= top {
            return Err(Error::domain("rectangle must have positive width and height"));
        }
        Ok(RectangleState { left, right, bottom, top })
    }

    /// `width × height` cells with the lower-left corner at
    /// `(−⌊width/2⌋, −⌊height/2⌋)`.
    pub fn centered(width: i64, height: i64) -> Result<Self> {
        Self::new(-(width / 2), width - width / 2, -(height / 2), height - height / 2)
    }

    pub fn width(&self) -> i64 {
        self.right - self.left
    }

    pub fn height(&self) -> i64 {
        self.top - self.bottom
    }

    pub fn is_alive(&self) -> bool {
        self.width() > 0 && self.height() > 0
    }

    pub fn contains(&self, other: &RectangleState) -> bool {
        self.left <= other.left
            && other.right <= self.right
            && self.bottom <= other.bottom
            && other.top <= self.top
    }

    pub fn to_set(&self) -> LatticeSet {
        LatticeSet::rectangle(self.left, self.right, self.bottom, self.top)
    }

    /// Physical `[left, right, bottom, top]`.
    pub fn bounds(&self, epsilon: Rational) -> [Rational; 4] {
        [self.left, self.right, self.bottom, self.top].map(|c| int(c as i128) * epsilon)
    }

    /// Inward displacements `[left, right, bottom, top]` that lead to `next`.
    pub fn displacement_to(&self, next: &RectangleState) -> [i64; 4] {
        [
            next.left - self.left,
            self.right - next.right,
            next.bottom - self.bottom,
            self.top - next.top,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TieEvent {
    pub step: usize,
    pub side: Side,
    #[serde(with = "rational::serde_fraction")]
    pub y: Rational,
    pub lower: u64,
    pub upper: u64,
    pub chosen: u64,
}

/// Discrete flat flow `E(t) = E^{⌊t/τ⌋}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscreteTrajectory {
    #[serde(with = "rational::serde_fraction")]
    pub epsilon: Rational,
    #[serde(with = "rational::serde_fraction")]
    pub gamma: Rational,
    /// `states[k]` is the set after `k` steps.
    pub states: Vec<RectangleState>,
    pub extinction_step: Option<usize>,
    pub ties: Vec<TieEvent>,
}

impl DiscreteTrajectory {
    pub fn tau(&self) -> Rational {
        self.gamma * self.epsilon
    }

    pub fn time_of(&self, k: usize) -> Rational {
        int(k as i128) * self.tau()
    }

    /// State in force at time `t`; the last state persists past the end.
    pub fn state_at(&self, t: Rational) -> RectangleState {
        let k = rational::floor_i128(&(t / self.tau())).max(0) as usize;
        self.states[k.min(self.states.len() - 1)]
    }

    pub fn lengths(&self, k: usize) -> (Rational, Rational) {
        let s = self.states[k];
        (int(s.width() as i128) * self.epsilon, int(s.height() as i128) * self.epsilon)
    }

    pub fn extinction_time(&self) -> Option<Rational> {
        self.extinction_step.map(|k| self.time_of(k))
    }

    /// True when the final step moved nothing; the scheme is then stationary.
    pub fn is_stalled(&self) -> bool {
        match self.states.as_slice() {
            [.., a, b] => a == b,
            _ => false,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,L1,L2,left,right,bottom,top\n");
        for (k, s) in self.states.iter().enumerate() {
            let (l1, l2) = self.lengths(k);
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                to_f64(&self.time_of(k)),
                to_f64(&l1),
                to_f64(&l2),
                s.left,
                s.right,
                s.bottom,
                s.top
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trajectory serializes")
    }
}

fn choose(law: &impl VelocityLaw, y: Rational, policy: TiePolicy) -> (u64, Option<(u64, u64)>) {
    match law.optimal_step(y) {
        Ok(n) => (n, None),
        Err(Error::NonUniqueMinimizer { lower, upper, .. }) => {
            let n = match policy {
                TiePolicy::SmallerStep => lower,
                TiePolicy::LargerStep => upper,
            };
            (n, Some((lower, upper)))
        }
        Err(e) => panic!("optimal step at positive Y cannot fail: {e}"),
    }
}

/// Run the scheme until `horizon` or extinction. Each side moves by the
/// optimal step for `Y = γ/L` with `L` its own current length; corner cells
/// are not coupled between sides.
pub fn evolve_discrete(
    initial: RectangleState,
    law: &impl VelocityLaw,
    epsilon: Rational,
    horizon: Rational,
    tie_policy: TiePolicy,
) -> Result<DiscreteTrajectory> {
    if !initial.is_alive() {
        return Err(Error::domain("initial rectangle is degenerate"));
    }
    if epsilon <= Rational::zero() {
        return Err(Error::domain("epsilon must be positive"));
    }
    if horizon <= Rational::zero() {
        return Err(Error::domain("horizon must be positive"));
    }
    let gamma = law.gamma();
    let tau = gamma * epsilon;
    let steps = rational::floor_i128(&(horizon / tau)) as usize;
    let mut traj = DiscreteTrajectory {
        epsilon,
        gamma,
        states: vec![initial],
        extinction_step: None,
        ties: Vec::new(),
    };
    let mut state = initial;
    for k in 0..steps {
        let y_vertical = gamma / (int(state.height() as i128) * epsilon);
        let y_horizontal = gamma / (int(state.width() as i128) * epsilon);
        let mut moves = [0u64; 4];
        for (slot, side, y) in [
            (0, Side::Left, y_vertical),
            (1, Side::Right, y_vertical),
            (2, Side::Bottom, y_horizontal),
            (3, Side::Top, y_horizontal),
        ] {
            let (n, tie) = choose(law, y, tie_policy);
            if let Some((lower, upper)) = tie {
                traj.ties.push(TieEvent { step: k, side, y, lower, upper, chosen: n });
            }
            moves[slot] = n;
        }
        let (left, right, h_collide) = close_in(state.left, state.right, moves[0], moves[1]);
        let (bottom, top, v_collide) = close_in(state.bottom, state.top, moves[2], moves[3]);
        state = RectangleState { left, right, bottom, top };
        traj.states.push(state);
        if h_collide || v_collide {
            traj.extinction_step = Some(k + 1);
            break;
        }
    }
    Ok(traj)
}

/// Move two opposite sides inward, clamping at the collision point.
fn close_in(lo: i64, hi: i64, move_lo: u64, move_hi: u64) -> (i64, i64, bool) {
    let (a, b) = (lo + move_lo as i64, hi - move_hi as i64);
    if a < b {
        return (a, b, false);
    }
    let total = (move_lo + move_hi) as i128;
    let meet = lo as i128 + ((hi - lo) as i128 * move_lo as i128).div_euclid(total);
    (meet as i64, meet as i64, true)
}

/// One linear piece of the ODE solution. Times and lengths are unbounded
/// rationals: event times are sums of many breakpoint differences and their
/// denominators grow without bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OdeSegment {
    #[serde(with = "rational::serde_big")]
    pub t0: BigRational,
    #[serde(with = "rational::serde_big")]
    pub t1: BigRational,
    #[serde(with = "rational::serde_big")]
    pub l1: BigRational,
    #[serde(with = "rational::serde_big")]
    pub l2: BigRational,
    /// `dL₁/dt`, nonpositive.
    #[serde(with = "rational::serde_fraction")]
    pub slope1: Rational,
    #[serde(with = "rational::serde_fraction")]
    pub slope2: Rational,
    /// Velocities frozen below the resolution length and run to zero.
    pub extrapolated: bool,
}

impl OdeSegment {
    fn at(&self, t: &BigRational) -> (BigRational, BigRational) {
        let dt = t - &self.t0;
        let clamp = |v: BigRational| if v.is_negative() { BigRational::zero() } else { v };
        (
            clamp(&self.l1 + big(&self.slope1) * &dt),
            clamp(&self.l2 + big(&self.slope2) * &dt),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OdeEvent {
    #[serde(with = "rational::serde_big")]
    pub time: BigRational,
    /// Which length (1 or 2) sits on a breakpoint of `f`.
    pub length: u8,
    /// The breakpoint `γ/L`.
    #[serde(with = "rational::serde_fraction")]
    pub y: Rational,
    pub f_minus: u64,
    pub f_plus: u64,
    /// Velocity used on the following segment.
    pub chosen: u64,
    pub branch: BranchPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Extinction {
    /// Both velocities vanish: the rectangle never disappears.
    Pinned,
    /// Still shrinking at the horizon.
    BeyondHorizon,
    /// Extinct at `time`. When `extrapolated`, the last piece froze the
    /// velocities below the resolution length; the true time is at most this.
    At {
        #[serde(with = "rational::serde_big")]
        time: BigRational,
        extrapolated: bool,
    },
}

impl Extinction {
    pub fn time(&self) -> Option<&BigRational> {
        match self {
            Extinction::At { time, .. } => Some(time),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OdeTrajectory {
    #[serde(with = "rational::serde_fraction")]
    pub gamma: Rational,
    #[serde(with = "rational::serde_fraction")]
    pub horizon: Rational,
    pub segments: Vec<OdeSegment>,
    pub events: Vec<OdeEvent>,
    pub extinction: Extinction,
    #[serde(skip)]
    initial: (Rational, Rational),
}

impl OdeTrajectory {
    /// `(L₁(t), L₂(t))`; constant past the last segment.
    pub fn lengths_at(&self, t: &BigRational) -> (BigRational, BigRational) {
        match self.segments.iter().find(|s| *t <= s.t1) {
            Some(s) if *t < s.t0 => s.at(&s.t0),
            Some(s) => s.at(t),
            None => match self.segments.last() {
                Some(s) => s.at(&s.t1),
                None => (big(&self.initial.0), big(&self.initial.1)),
            },
        }
    }

    /// `(t, L₁, L₂)` at the start of every segment and at the end.
    pub fn samples(&self) -> Vec<(BigRational, BigRational, BigRational)> {
        let mut out: Vec<_> =
            self.segments.iter().map(|s| (s.t0.clone(), s.l1.clone(), s.l2.clone())).collect();
        match self.segments.last() {
            Some(s) => {
                let (l1, l2) = s.at(&s.t1);
                out.push((s.t1.clone(), l1, l2));
            }
            None => out.push((BigRational::zero(), big(&self.initial.0), big(&self.initial.1))),
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let ext = self.extinction.time().map(big_to_f64);
        let mut out = String::from(if ext.is_some() { "t,L1,L2,t_ext\n" } else { "t,L1,L2\n" });
        for (t, l1, l2) in self.samples() {
            out.push_str(&format!("{},{},{}", big_to_f64(&t), big_to_f64(&l1), big_to_f64(&l2)));
            if let Some(e) = ext {
                out.push_str(&format!(",{e}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trajectory serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OdeOptions {
    pub horizon: Rational,
    pub branch: BranchPolicy,
    /// Below this length the velocities are frozen and run to zero.
    /// Defaults to `max(min(L₁⁰, L₂⁰), αγ) / 256`, which caps the number of
    /// breakpoint crossings at about 512 per side.
    pub resolution: Option<Rational>,
    pub max_events: usize,
}

impl OdeOptions {
    pub fn new(horizon: Rational, branch: BranchPolicy) -> Self {
        OdeOptions { horizon, branch, resolution: None, max_events: 1_000_000 }
    }

    pub fn with_resolution(mut self, resolution: Rational) -> Self {
        self.resolution = Some(resolution);
        self
    }
}

enum Position {
    Regular(u64),
    Breakpoint(Rational),
}

/// Where an unbounded `y` sits relative to the breakpoints of `law`, and the
/// first breakpoint strictly above it.
fn locate(law: &impl VelocityLaw, y: &BigRational) -> (Position, Rational) {
    let approx = rational::from_f64(big_to_f64(y)).expect("finite positive Y");
    let reach = int(2) / law.alpha();
    let lo = rational::max(Rational::zero(), approx - reach);
    let near = law.breakpoints_between(lo, approx + reach);
    let idx = near
        .iter()
        .position(|b| big(b) >= *y)
        .expect("breakpoints are at most 1/alpha apart");
    let b = near[idx];
    if big(&b) == *y {
        let next = near.get(idx + 1).copied().unwrap_or_else(|| law.next_breakpoint_above(b));
        return (Position::Breakpoint(b), next);
    }
    let prev = law.previous_breakpoint_below(b).unwrap_or_else(Rational::zero);
    let f = law.velocity((prev + b) / int(2)).expect("midpoint is regular");
    (Position::Regular(f), b)
}

pub fn evolve_ode(
    l1: Rational,
    l2: Rational,
    law: &impl VelocityLaw,
    options: &OdeOptions,
) -> Result<OdeTrajectory> {
    if l1 <= Rational::zero() || l2 <= Rational::zero() {
        return Err(Error::domain("initial lengths must be positive"));
    }
    if options.horizon <= Rational::zero() {
        return Err(Error::domain("horizon must be positive"));
    }
    let gamma = law.gamma();
    let default = rational::max(rational::min(l1, l2), law.alpha() * gamma) / int(256);
    let resolution = big(&options.resolution.unwrap_or(default));
    let horizon = big(&options.horizon);
    let mut traj = OdeTrajectory {
        gamma,
        horizon: options.horizon,
        segments: Vec::new(),
        events: Vec::new(),
        extinction: Extinction::BeyondHorizon,
        initial: (l1, l2),
    };
    let (mut t, mut lengths) = (BigRational::zero(), [big(&l1), big(&l2)]);
    let rate_scale = int(2) / gamma;
    while t < horizon {
        if traj.events.len() > options.max_events {
            return Err(Error::domain("event budget exhausted before extinction or horizon"));
        }
        // f(γ/L₂) drives L₁ and vice versa
        let mut rates = [Rational::zero(); 2];
        let mut targets = [Rational::zero(); 2];
        for i in 0..2 {
            let (position, next) = locate(law, &(big(&gamma) / &lengths[i]));
            targets[i] = next;
            let f = match position {
                Position::Regular(f) => f,
                Position::Breakpoint(y) => {
                    let (f_minus, f_plus) = law.envelope(y);
                    // a positive choice leaves the breakpoint at once, into
                    // the interval where f = f⁺
                    let chosen = match options.branch {
                        BranchPolicy::Lower if f_minus == 0 => 0,
                        _ => f_plus,
                    };
                    traj.events.push(OdeEvent {
                        time: t.clone(),
                        length: i as u8 + 1,
                        y,
                        f_minus,
                        f_plus,
                        chosen,
                        branch: options.branch,
                    });
                    chosen
                }
            };
            rates[1 - i] = rate_scale * int(f as i128);
        }
        let segment = |t1: BigRational, lengths: &[BigRational; 2], extrapolated| OdeSegment {
            t0: t.clone(),
            t1,
            l1: lengths[0].clone(),
            l2: lengths[1].clone(),
            slope1: -rates[0],
            slope2: -rates[1],
            extrapolated,
        };
        if rates.iter().all(Rational::is_zero) {
            traj.segments.push(segment(horizon.clone(), &lengths, false));
            traj.extinction = Extinction::Pinned;
            break;
        }
        if lengths.iter().any(|l| *l <= resolution) {
            let t_ext = (0..2)
                .filter(|&i| !rates[i].is_zero())
                .map(|i| &t + &lengths[i] / big(&rates[i]))
                .min()
                .expect("some rate is positive");
            if t_ext <= horizon {
                traj.segments.push(segment(t_ext.clone(), &lengths, true));
                traj.extinction = Extinction::At { time: t_ext, extrapolated: true };
            } else {
                traj.segments.push(segment(horizon.clone(), &lengths, true));
            }
            break;
        }
        let mut dt = &horizon - &t;
        for i in 0..2 {
            if rates[i].is_zero() {
                continue;
            }
            let target = big(&(gamma / targets[i]));
            dt = dt.min((&lengths[i] - target) / big(&rates[i]));
        }
        let t1 = &t + &dt;
        traj.segments.push(segment(t1.clone(), &lengths, false));
        for i in 0..2 {
            lengths[i] -= big(&rates[i]) * &dt;
        }
        t = t1;
    }
    Ok(traj)
}

/// Extinction of an ODE trajectory: pinned, beyond the horizon, or a time.
pub fn extinction_time(trajectory: &OdeTrajectory) -> Extinction {
    trajectory.extinction.clone()
}

/// ℓ∞ Hausdorff distance between two closed coordinate boxes
/// `[left, right, bottom, top]`.
pub fn box_hausdorff(a: &[BigRational; 4], b: &[BigRational; 4]) -> BigRational {
    (0..4).map(|i| (&a[i] - &b[i]).abs()).max().expect("four coordinates")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    #[serde(with = "rational::serde_fraction")]
    pub epsilon: Rational,
    /// `sup_t d_H(E_ε(t), E(t))`.
    #[serde(with = "rational::serde_big")]
    pub distance: BigRational,
    #[serde(with = "rational::serde_fraction_opt")]
    pub discrete_extinction: Option<Rational>,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub ode_extinction: Extinction,
    /// `max d(ε)/ε` over the rows.
    pub fitted_constant: f64,
    /// Least-squares slope of `log d` against `log ε`; `None` when some
    /// distance vanishes or fewer than two rows exist.
    pub fitted_rate: Option<f64>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,distance,distance_over_epsilon,discrete_extinction\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fraction_string(&r.epsilon),
                big_to_f64(&r.distance),
                big_to_f64(&(&r.distance / big(&r.epsilon))),
                r.discrete_extinction.map(|t| to_f64(&t).to_string()).unwrap_or_default()
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Run both flows from the same centred physical rectangle and report the
/// sup-in-time ℓ∞ Hausdorff distance for every `ε`.
pub fn compare_flows(
    l1: Rational,
    l2: Rational,
    law: &(impl VelocityLaw + Sync),
    epsilons: &[Rational],
    horizon: Rational,
    tie_policy: TiePolicy,
    branch: BranchPolicy,
) -> Result<ConvergenceReport> {
    use rayon::prelude::*;

    if epsilons.is_empty() {
        return Err(Error::domain("no epsilon given"));
    }
    let finest = *epsilons.iter().min().expect("nonempty");
    let options = OdeOptions::new(horizon, branch).with_resolution(finest / int(8));
    let ode = evolve_ode(l1, l2, law, &options)?;
    let rows = epsilons
        .par_iter()
        .map(|&eps| compare_one(l1, l2, law, eps, horizon, tie_policy, &ode))
        .collect::<Result<Vec<_>>>()?;
    let fitted_constant = rows
        .iter()
        .map(|r| big_to_f64(&(&r.distance / big(&r.epsilon))))
        .fold(0.0, f64::max);
    let fitted_rate = if rows.len() >= 2 && rows.iter().all(|r| !r.distance.is_zero()) {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (to_f64(&r.epsilon).ln(), big_to_f64(&r.distance).ln()))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    } else {
        None
    };
    Ok(ConvergenceReport { rows, ode_extinction: ode.extinction, fitted_constant, fitted_rate })
}

fn compare_one(
    l1: Rational,
    l2: Rational,
    law: &impl VelocityLaw,
    eps: Rational,
    horizon: Rational,
    tie_policy: TiePolicy,
    ode: &OdeTrajectory,
) -> Result<ConvergenceRow> {
    let (w, h) = (l1 / eps, l2 / eps);
    if !w.is_integer() || !h.is_integer() {
        return Err(Error::domain(format!("lengths are not multiples of epsilon = {eps}")));
    }
    let initial = RectangleState::centered(w.to_integer() as i64, h.to_integer() as i64)?;
    let discrete = evolve_discrete(initial, law, eps, horizon, tie_policy)?;
    let [x0, x1, y0, y1] = initial.bounds(eps);
    let two = int(2);
    let (cx, cy) = (big(&((x0 + x1) / two)), big(&((y0 + y1) / two)));
    let half = big(&frac(1, 2));
    let ode_box = |t: &Rational| {
        let (a, b) = ode.lengths_at(&big(t));
        let (a, b) = (a * &half, b * &half);
        [&cx - &a, &cx + &a, &cy - &b, &cy + &b]
    };
    let tau = discrete.tau();
    let last = rational::ceil_i128(&(horizon / tau)).max(1) as usize;
    let mut sup = BigRational::zero();
    for k in 0..last {
        let here = discrete.states[k.min(discrete.states.len() - 1)].bounds(eps).map(|c| big(&c));
        let (t0, t1) = (int(k as i128) * tau, rational::min(int(k as i128 + 1) * tau, horizon));
        for t in [t0, t1] {
            sup = sup.max(box_hausdorff(&here, &ode_box(&t)));
        }
    }
    Ok(ConvergenceRow {
        epsilon: eps,
        distance: sup,
        discrete_extinction: discrete.extinction_time(),
        steps: discrete.states.len() - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::side_law::SideLawParams;

    fn quarter() -> SideLawParams {
        SideLawParams::new(int(1), int(1), frac(1, 4)).unwrap()
    }

    #[test]
    fn rectangle_basics() {
        let r = RectangleState::centered(5, 4).unwrap();
        assert_eq!((r.left, r.right, r.bottom, r.top), (-2, 3, -2, 2));
        assert!(RectangleState::new(0, 0, 0, 1).is_err());
        assert_eq!(r.to_set().len(), 20);
        assert!(r.contains(&RectangleState::new(-1, 2, -1, 1).unwrap()));
    }

    #[test]
    fn pinned_square_does_not_move() {
        let eps = frac(1, 100);
        let start = RectangleState::centered(300, 300).unwrap();
        let traj = evolve_discrete(start, &quarter(), eps, int(1), TiePolicy::SmallerStep).unwrap();
        assert_eq!(traj.states.len(), 101);
        assert!(traj.states.iter().all(|s| *s == start));
        assert!(traj.is_stalled());
        assert_eq!(traj.extinction_step, None);
    }

    #[test]
    fn small_square_vanishes() {
        let eps = frac(1, 100);
        let start = RectangleState::centered(100, 100).unwrap();
        let traj = evolve_discrete(start, &quarter(), eps, int(10), TiePolicy::SmallerStep).unwrap();
        assert!(traj.extinction_step.is_some());
        for w in traj.states.windows(2) {
            assert!(w[0].contains(&w[1]));
            assert_eq!(w[1].width(), w[1].height());
        }
    }

    #[test]
    fn single_step_in_f2_interval() {
        // ε = 1, γ = 1, L = 1 cell... use ε = 1/10, L = 1: Y = 1 → N = 2
        let eps = frac(1, 10);
        let start = RectangleState::centered(10, 10).unwrap();
        let traj = evolve_discrete(start, &quarter(), eps, eps, TiePolicy::SmallerStep).unwrap();
        assert_eq!(traj.states.len(), 2);
        assert_eq!(start.displacement_to(&traj.states[1]), [2, 2, 2, 2]);
        assert_eq!(traj.lengths(1).0, int(1) - int(4) * eps);
    }

    #[test]
    fn ties_are_recorded() {
        // γ/L = 5/8 with ε = 1/5: L = 8/5 = 8 cells
        let eps = frac(1, 5);
        let start = RectangleState::centered(8, 8).unwrap();
        for (policy, n) in [(TiePolicy::SmallerStep, 0), (TiePolicy::LargerStep, 1)] {
            let traj = evolve_discrete(start, &quarter(), eps, eps, policy).unwrap();
            assert_eq!(traj.ties.len(), 4);
            assert!(traj.ties.iter().all(|t| t.chosen == n && (t.lower, t.upper) == (0, 1)));
        }
    }

    #[test]
    fn collision_clamps() {
        assert_eq!(close_in(0, 3, 2, 2), (1, 1, true));
        assert_eq!(close_in(0, 10, 2, 2), (2, 8, false));
        assert_eq!(close_in(0, 4, 2, 2), (2, 2, true));
    }

    #[test]
    fn ode_pinned() {
        let traj = evolve_ode(int(2), int(3), &quarter(), &OdeOptions::new(int(5), BranchPolicy::Upper))
            .unwrap();
        assert_eq!(traj.extinction, Extinction::Pinned);
        assert_eq!(traj.lengths_at(&big(&int(4))), (big(&int(2)), big(&int(3))));
    }

    #[test]
    fn ode_high_contrast_first_event() {
        let high = SideLawParams::new(int(1), int(1), int(1)).unwrap();
        let traj = evolve_ode(int(1), int(1), &high, &OdeOptions::new(int(1), BranchPolicy::Upper))
            .unwrap();
        let first = &traj.segments[0];
        assert_eq!((first.slope1, first.slope2), (int(-4), int(-4)));
        assert_eq!(first.t1, big(&frac(3, 28)));
        assert_eq!(traj.lengths_at(&big(&frac(3, 28))), (big(&frac(4, 7)), big(&frac(4, 7))));
    }

    #[test]
    fn ode_constant_velocity_extinction() {
        // resolution above L0: the whole run uses the initial velocity
        let p = quarter();
        let opts = OdeOptions::new(int(10), BranchPolicy::Upper).with_resolution(int(2));
        let traj = evolve_ode(int(1), int(1), &p, &opts).unwrap();
        // f(1) = 2 and L' = -(2/γ)f, so t* = L0·γ/(2f) = 1/4
        assert_eq!(traj.extinction, Extinction::At { time: big(&frac(1, 4)), extrapolated: true });
    }

    #[test]
    fn ode_branch_policy_at_threshold() {
        // L = 8/5 puts γ/L on the pinning breakpoint 5/8
        let p = quarter();
        let lower = evolve_ode(frac(8, 5), frac(8, 5), &p, &OdeOptions::new(int(1), BranchPolicy::Lower))
            .unwrap();
        assert_eq!(lower.extinction, Extinction::Pinned);
        let upper = evolve_ode(frac(8, 5), frac(8, 5), &p, &OdeOptions::new(int(1), BranchPolicy::Upper))
            .unwrap();
        assert_ne!(upper.extinction, Extinction::Pinned);
        assert_eq!(upper.segments[0].slope1, int(-2));
        assert_eq!(upper.events[0].f_minus, 0);
        assert_eq!(upper.events[0].f_plus, 1);
    }

    #[test]
    fn ode_errors() {
        let opts = OdeOptions::new(int(1), BranchPolicy::Upper);
        assert!(evolve_ode(int(0), int(1), &quarter(), &opts).is_err());
        assert!(evolve_ode(int(1), int(-1), &quarter(), &opts).is_err());
    }

    #[test]
    fn hausdorff_of_boxes() {
        let a = [int(0), int(2), int(0), int(1)].map(|c| big(&c));
        let b = [frac(1, 2), int(2), int(0), frac(3, 4)].map(|c| big(&c));
        assert_eq!(box_hausdorff(&a, &b), big(&frac(1, 2)));
    }

    #[test]
    fn compare_pinned_is_exact() {
        let report = compare_flows(
            int(2),
            int(2),
            &quarter(),
            &[frac(1, 10), frac(1, 20)],
            int(1),
            TiePolicy::SmallerStep,
            BranchPolicy::Upper,
        )
        .unwrap();
        assert!(report.rows.iter().all(|r| r.distance <= big(&(int(2) * r.epsilon))));
        assert_eq!(report.ode_extinction, Extinction::Pinned);
    }
}
