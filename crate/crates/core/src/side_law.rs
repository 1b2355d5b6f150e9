//! One-dimensional law of motion of a single side, one contrast parameter.
//!
//! A side of physical length `L` sitting on α bonds, with time step
//! `τ = γε`, moves inward by the minimizer `N` of
//!
//! ```text
//! g(N) = −2αN + N(N+1)/(2Y)            N even
//! g(N) = −2αN + N(N+1)/(2Y) + δγ/Y     N odd
//! ```
//!
//! with `Y = γ/L`. Everything here is exact: `Y` is rational and every
//! breakpoint of the resulting velocity is rational.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, floor_i128, int, Rational};
use crate::table::VelocityTable;

/// Parameters of the single-layer side law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideLawParams {
    alpha: Rational,
    gamma: Rational,
    delta: Rational,
}

/// Eventually periodic orbit of a side position.
///
/// From `preperiod` on, `positions[k + period] = positions[k] + shift`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub positions: Vec<i64>,
    pub preperiod: usize,
    pub period: usize,
    pub shift: i64,
}

impl Orbit {
    /// `n` in `x_{k+M} = x_k + 2n`.
    pub fn half_shift(&self) -> i64 {
        self.shift / 2
    }

    /// Mean displacement per step over one period, `2n / M`.
    pub fn velocity(&self) -> Rational {
        Rational::new(self.shift as i128, self.period as i128)
    }
}

/// Shared surface of the single- and multi-layer laws.
pub trait VelocityLaw: Send + Sync {
    fn alpha(&self) -> Rational;
    fn gamma(&self) -> Rational;
    fn deltas(&self) -> Vec<Rational>;

    /// Unique minimizer of the one-step problem.
    fn optimal_step(&self, y: Rational) -> Result<u64>;

    /// Closed-form effective velocity.
    fn velocity(&self, y: Rational) -> Result<u64>;

    /// Breakpoints in `(lo, hi]`, sorted and deduplicated.
    fn breakpoints_between(&self, lo: Rational, hi: Rational) -> Vec<Rational>;

    fn pinning_threshold(&self) -> Rational;

    fn layers(&self) -> usize {
        self.deltas().len()
    }

    fn singular_set(&self, y_max: Rational) -> Vec<Rational> {
        self.breakpoints_between(Rational::zero(), y_max)
    }

    fn is_singular(&self, y: Rational) -> bool {
        self.breakpoints_between(y - int(1), y).last() == Some(&y)
    }

    /// Smallest breakpoint strictly above `y`. Consecutive breakpoints are at
    /// most `1/α` apart.
    fn next_breakpoint_above(&self, y: Rational) -> Rational {
        let reach = int(2) / self.alpha();
        self.breakpoints_between(y, y + reach)
            .into_iter()
            .next()
            .expect("breakpoints are at most 1/alpha apart")
    }

    /// Largest breakpoint strictly below `y`, if any.
    fn previous_breakpoint_below(&self, y: Rational) -> Option<Rational> {
        let reach = int(2) / self.alpha();
        let lo = rational::max(Rational::zero(), y - reach);
        self.breakpoints_between(lo, y).into_iter().filter(|b| *b < y).last()
    }

    /// One-sided limits `(f⁻, f⁺)` of the closed-form velocity.
    fn envelope(&self, y: Rational) -> (u64, u64) {
        if let Ok(f) = self.velocity(y) {
            return (f, f);
        }
        let below = self.previous_breakpoint_below(y).unwrap_or_else(Rational::zero);
        let above = self.next_breakpoint_above(y);
        let two = int(2);
        let left = self.velocity((below + y) / two).expect("midpoint is regular");
        let right = self.velocity((y + above) / two).expect("midpoint is regular");
        (left, right)
    }

    fn table(&self, y_max: Rational) -> Result<VelocityTable>
    where
        Self: Sized,
    {
        VelocityTable::build(self, y_max)
    }
}

/// `δ̃ = 1/(2γ)`: above it odd steps never win.
pub fn contrast_threshold(gamma: Rational) -> Result<Rational> {
    if gamma <= Rational::zero() {
        return Err(Error::domain("gamma must be positive"));
    }
    Ok(Rational::one() / (int(2) * gamma))
}

/// `f̃(Y) = ⌊2αY⌋`, the velocity of the homogeneous medium.
pub fn homogeneous_velocity(alpha: Rational, y: Rational) -> u64 {
    floor_i128(&(int(2) * alpha * y)).max(0) as u64
}

/// `f̄(Y) = 2⌊αY + 1/4⌋`, the velocity of the high-contrast medium.
pub fn high_contrast_velocity(alpha: Rational, y: Rational) -> u64 {
    (2 * floor_i128(&(alpha * y + Rational::new(1, 4)))).max(0) as u64
}

impl SideLawParams {
    pub fn new(alpha: Rational, gamma: Rational, delta: Rational) -> Result<Self> {
        if alpha <= Rational::zero() {
            return Err(Error::domain("alpha must be positive"));
        }
        if gamma <= Rational::zero() {
            return Err(Error::domain("gamma must be positive"));
        }
        if delta < Rational::zero() {
            return Err(Error::domain("delta must be nonnegative"));
        }
        Ok(SideLawParams { alpha, gamma, delta })
    }

    pub fn delta(&self) -> Rational {
        self.delta
    }

    /// `C = min{δγ, 1/2}`.
    pub fn contrast_level(&self) -> Rational {
        rational::min(self.delta * self.gamma, Rational::new(1, 2))
    }

    pub fn is_high_contrast(&self) -> bool {
        self.delta * self.gamma >= Rational::new(1, 2)
    }

    pub fn g_cost(&self, n: u64, y: Rational) -> Rational {
        let n_q = int(n as i128);
        let mut g = -int(2) * self.alpha * n_q + n_q * (n_q + int(1)) / (int(2) * y);
        if n % 2 == 1 {
            g += self.delta * self.gamma / y;
        }
        g
    }

    /// All minimizers of `g` near the vertex `2αY − 1/2` of the parabolas.
    pub fn minimizers(&self, y: Rational) -> Result<Vec<u64>> {
        if y <= Rational::zero() {
            return Err(Error::domain("Y must be positive"));
        }
        Ok(argmin_in_window(self.alpha, y, |n| self.g_cost(n, y)))
    }

    pub fn optimal_step(&self, y: Rational) -> Result<u64> {
        unique(y, self.minimizers(y)?)
    }

    /// `L̄_δ = max{2αγ/(δγ + 1), 4αγ/3}`.
    pub fn pinning_threshold(&self) -> Rational {
        let ag = self.alpha * self.gamma;
        rational::max(int(2) * ag / (self.delta * self.gamma + int(1)), int(4) * ag / int(3))
    }

    /// Iterate `x_{k+1} = x_k + N̄`, with the odd-step penalty applied at
    /// every step irrespective of the parity of `x_k`.
    pub fn orbit(&self, y: Rational, x0: i64, max_steps: usize) -> Result<Orbit> {
        if !(0..=1).contains(&x0) {
            return Err(Error::domain("x0 must be 0 or 1"));
        }
        let step = self.optimal_step(y)?;
        iterate_orbit(x0, 2, max_steps, |_| Ok(step))
    }

    /// `f_δ(Y) = 2n/M` read off the orbit from `x0 = 0`.
    pub fn effective_velocity(&self, y: Rational) -> Result<u64> {
        orbit_velocity(&self.orbit(y, 0, 8)?)
    }

    /// Piecewise closed form with `C = min{δγ, 1/2}`:
    /// `0` below `(1 + C)/2α`, `2k` on `((2k − C)/2α, (2k + 1 + C)/2α)` and
    /// `2k + 1` on `((2k + 1 + C)/2α, (2k + 2 − C)/2α)`.
    pub fn velocity_closed_form(&self, y: Rational) -> Result<u64> {
        if y <= Rational::zero() {
            return Err(Error::domain("Y must be positive"));
        }
        let c = self.contrast_level();
        let z = int(2) * self.alpha * y;
        let singular = || Error::domain(format!("Y = {y} lies on a breakpoint"));
        if z < int(1) + c {
            return Ok(0);
        }
        if z == int(1) + c {
            return Err(singular());
        }
        let k = floor_i128(&((z + c) / int(2)));
        let even_lo = int(2 * k) - c;
        let odd_lo = int(2 * k + 1) + c;
        if z == even_lo || z == odd_lo {
            return Err(singular());
        }
        Ok(if z < odd_lo { 2 * k as u64 } else { 2 * k as u64 + 1 })
    }

    pub fn velocity_envelope(&self, y: Rational) -> (u64, u64) {
        self.envelope(y)
    }

    pub fn velocity_table(&self, y_max: Rational) -> Result<VelocityTable> {
        VelocityTable::build(self, y_max)
    }

    /// Convert a float `Y` exactly, rejecting values within
    /// [`rational::FLOAT_SNAP_TOLERANCE`] of a breakpoint.
    pub fn snap_y(&self, y: f64) -> Result<Rational> {
        snap_to_regular(self, y)
    }
}

impl VelocityLaw for SideLawParams {
    fn alpha(&self) -> Rational {
        self.alpha
    }

    fn gamma(&self) -> Rational {
        self.gamma
    }

    fn deltas(&self) -> Vec<Rational> {
        vec![self.delta]
    }

    fn optimal_step(&self, y: Rational) -> Result<u64> {
        SideLawParams::optimal_step(self, y)
    }

    fn velocity(&self, y: Rational) -> Result<u64> {
        self.velocity_closed_form(y)
    }

    /// `(1/2α)[(2ℤ + 1 + C) ∪ (2ℤ − C)]`.
    fn breakpoints_between(&self, lo: Rational, hi: Rational) -> Vec<Rational> {
        let c = self.contrast_level();
        let two_alpha = int(2) * self.alpha;
        let k_lo = floor_i128(&(lo * two_alpha / int(2))) - 1;
        let k_hi = floor_i128(&(hi * two_alpha / int(2))) + 1;
        let mut out: Vec<Rational> = (k_lo.max(0)..=k_hi)
            .flat_map(|k| [(int(2 * k) - c) / two_alpha, (int(2 * k + 1) + c) / two_alpha])
            .filter(|b| *b > lo && *b <= hi && *b > Rational::zero())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn pinning_threshold(&self) -> Rational {
        SideLawParams::pinning_threshold(self)
    }
}

/// Scan `g` over `[max(0, ⌊2αY⌋ − 2), ⌈2αY⌉ + 2]` and return every minimizer.
/// Even steps sit on the unpenalized parabola with vertex `2αY − 1/2`, so
/// the global minimum always falls in this window.
pub(crate) fn argmin_in_window(
    alpha: Rational,
    y: Rational,
    cost: impl Fn(u64) -> Rational,
) -> Vec<u64> {
    let z = int(2) * alpha * y;
    let lo = (floor_i128(&z) - 2).max(0) as u64;
    let hi = (rational::ceil_i128(&z) + 2) as u64;
    let mut best: Option<Rational> = None;
    let mut arg = Vec::new();
    for n in lo..=hi {
        let g = cost(n);
        match best {
            Some(b) if g > b => {}
            Some(b) if g == b => arg.push(n),
            _ => {
                best = Some(g);
                arg = vec![n];
            }
        }
    }
    arg
}

pub(crate) fn unique(y: Rational, minimizers: Vec<u64>) -> Result<u64> {
    match minimizers.as_slice() {
        [n] => Ok(*n),
        [lower, .., upper] => {
            Err(Error::NonUniqueMinimizer { y, lower: *lower, upper: *upper })
        }
        [] => unreachable!("the scan window is never empty"),
    }
}

/// Cycle detection on the residue of the position modulo `period`.
pub(crate) fn iterate_orbit(
    x0: i64,
    modulus: i64,
    max_steps: usize,
    step: impl Fn(i64) -> Result<u64>,
) -> Result<Orbit> {
    if max_steps < 4 {
        return Err(Error::domain("max_steps must be at least 4"));
    }
    let mut positions = vec![x0];
    let mut seen: HashMap<i64, usize> = HashMap::new();
    for k in 0..=max_steps {
        let x = positions[k];
        let residue = x.rem_euclid(modulus);
        if let Some(&j) = seen.get(&residue) {
            return Ok(Orbit { preperiod: j, period: k - j, shift: x - positions[j], positions });
        }
        seen.insert(residue, k);
        if k < max_steps {
            positions.push(x + step(x)? as i64);
        }
    }
    Err(Error::PeriodNotFound { steps: max_steps })
}

pub(crate) fn orbit_velocity(orbit: &Orbit) -> Result<u64> {
    let v = orbit.velocity();
    if !v.is_integer() || v < Rational::zero() {
        return Err(Error::domain(format!("orbit velocity {v} is not a nonnegative integer")));
    }
    Ok(v.to_integer() as u64)
}

pub(crate) fn snap_to_regular(law: &impl VelocityLaw, y: f64) -> Result<Rational> {
    let q = rational::from_f64(y)?;
    if q <= Rational::zero() {
        return Err(Error::domain("Y must be positive"));
    }
    let tol = rational::from_f64(rational::FLOAT_SNAP_TOLERANCE)?;
    let near = law.breakpoints_between(q - tol - tol, q + tol);
    if near.iter().any(|b| rational::abs(*b - q) <= tol) {
        return Err(Error::domain(format!("Y = {y} is within tolerance of a breakpoint")));
    }
    Ok(q)
}
