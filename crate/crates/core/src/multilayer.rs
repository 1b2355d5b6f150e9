//! The side law for `K` contrast parameters `δ₁ … δ_K` in periodic layers.
//!
//! The odd step classes modulo `2K` carry the penalties: a step `N` with
//! `N ≡ 2r − 1 (mod 2K)` pays `δ_r γ / Y`, even steps pay nothing. The
//! velocity is a ladder whose rung `m` ends where `m + 1` starts beating `m`:
//!
//! ```text
//! m + 1 ≡ 2r − 1 :  b(m) = (m + 1 + C_r) / 2α
//! m     ≡ 2r − 1 :  b(m) = (m + 1 − C_r) / 2α
//! ```
//!
//! with `C_r = min{δ_r γ, 1/2}`. A layer at or above the contrast threshold
//! gives `C_r = 1/2` and its odd rung collapses to a single point.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{self, floor_i128, int, Rational};
use crate::side_law::{
    argmin_in_window, iterate_orbit, orbit_velocity, snap_to_regular, unique, Orbit,
    SideLawParams, VelocityLaw,
};
use crate::table::VelocityTable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiLayerParams {
    alpha: Rational,
    gamma: Rational,
    deltas: Vec<Rational>,
}

/// Position of the contrast parameters relative to `δ̃ = 1/(2γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Every `δ_r < δ̃`.
    AllBelow,
    /// Some but not all `δ_r ≥ δ̃`.
    Mixed,
    /// Every `δ_r ≥ δ̃`: the high-contrast law.
    AllAbove,
}

impl From<SideLawParams> for MultiLayerParams {
    fn from(p: SideLawParams) -> Self {
        MultiLayerParams { alpha: p.alpha(), gamma: p.gamma(), deltas: vec![p.delta()] }
    }
}

impl MultiLayerParams {
    pub fn new(alpha: Rational, gamma: Rational, deltas: Vec<Rational>) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::domain("at least one contrast parameter is required"));
        }
        for d in &deltas {
            SideLawParams::new(alpha, gamma, *d)?;
        }
        Ok(MultiLayerParams { alpha, gamma, deltas })
    }

    pub fn period(&self) -> u64 {
        2 * self.deltas.len() as u64
    }

    /// `C_r = min{δ_r γ, 1/2}` for each layer.
    pub fn contrast_levels(&self) -> Vec<Rational> {
        self.deltas
            .iter()
            .map(|d| rational::min(*d * self.gamma, Rational::new(1, 2)))
            .collect()
    }

    pub fn regime(&self) -> Regime {
        let threshold = Rational::new(1, 2);
        let above = self.deltas.iter().filter(|d| **d * self.gamma >= threshold).count();
        match above {
            0 => Regime::AllBelow,
            n if n == self.deltas.len() => Regime::AllAbove,
            _ => Regime::Mixed,
        }
    }

    /// Layer index `r` (1-based) penalizing a step of length `n`, if any.
    pub fn layer_of_step(&self, n: u64) -> Option<usize> {
        let residue = n % self.period();
        (residue % 2 == 1).then(|| (residue as usize + 1) / 2)
    }

    pub fn g_cost_k(&self, n: u64, y: Rational) -> Rational {
        let n_q = int(n as i128);
        let mut g = -int(2) * self.alpha * n_q + n_q * (n_q + int(1)) / (int(2) * y);
        if let Some(r) = self.layer_of_step(n) {
            g += self.deltas[r - 1] * self.gamma / y;
        }
        g
    }

    pub fn minimizers(&self, y: Rational) -> Result<Vec<u64>> {
        if y <= Rational::zero() {
            return Err(Error::domain("Y must be positive"));
        }
        Ok(argmin_in_window(self.alpha, y, |n| self.g_cost_k(n, y)))
    }

    pub fn optimal_step(&self, y: Rational) -> Result<u64> {
        unique(y, self.minimizers(y)?)
    }

    pub fn singular_set_k(&self, y_max: Rational) -> Vec<Rational> {
        self.breakpoints_between(Rational::zero(), y_max)
    }

    /// `max{2αγ/(δ_min γ + 1), 4αγ/3}`.
    pub fn pinning_threshold_k(&self) -> Rational {
        let ag = self.alpha * self.gamma;
        let d_min = *self.deltas.iter().min().expect("nonempty");
        rational::max(int(2) * ag / (d_min * self.gamma + int(1)), int(4) * ag / int(3))
    }

    /// Iterate the scheme from `x0 ∈ {0, …, 2K − 1}` until the residue
    /// modulo `2K` repeats; the step budget defaults to `4K + 4`.
    pub fn orbit_k(&self, y: Rational, x0: i64, max_steps: Option<usize>) -> Result<Orbit> {
        let period = self.period() as i64;
        if !(0..period).contains(&x0) {
            return Err(Error::domain(format!("x0 must lie in 0..{period}")));
        }
        let budget = max_steps.unwrap_or(4 * self.deltas.len() + 4);
        let step = self.optimal_step(y)?;
        iterate_orbit(x0, period, budget, |_| Ok(step))
    }

    pub fn effective_velocity_k(&self, y: Rational) -> Result<u64> {
        orbit_velocity(&self.orbit_k(y, 0, None)?)
    }

    /// Upper end of rung `m` of the ladder.
    fn rung_end(&self, m: u64) -> Rational {
        let levels = self.contrast_levels();
        let two_alpha = int(2) * self.alpha;
        match self.layer_of_step(m + 1) {
            Some(r) => (int(m as i128 + 1) + levels[r - 1]) / two_alpha,
            None => {
                let r = self.layer_of_step(m).expect("one of m, m + 1 is odd");
                (int(m as i128 + 1) - levels[r - 1]) / two_alpha
            }
        }
    }

    pub fn velocity_closed_form_k(&self, y: Rational) -> Result<u64> {
        if y <= Rational::zero() {
            return Err(Error::domain("Y must be positive"));
        }
        let z = floor_i128(&(int(2) * self.alpha * y));
        let first = (z - 2).max(0) as u64;
        let last = (z + 1).max(0) as u64;
        if (first..=last).any(|m| self.rung_end(m) == y) {
            return Err(Error::domain(format!("Y = {y} lies on a breakpoint")));
        }
        (first..=last)
            .find(|&m| {
                let lo = if m == 0 { Rational::zero() } else { self.rung_end(m - 1) };
                lo < y && y < self.rung_end(m)
            })
            .ok_or_else(|| Error::domain(format!("no rung contains Y = {y}")))
    }

    pub fn velocity_envelope_k(&self, y: Rational) -> (u64, u64) {
        self.envelope(y)
    }

    pub fn velocity_table_k(&self, y_max: Rational) -> Result<VelocityTable> {
        VelocityTable::build(self, y_max)
    }

    pub fn snap_y(&self, y: f64) -> Result<Rational> {
        snap_to_regular(self, y)
    }
}

impl VelocityLaw for MultiLayerParams {
    fn alpha(&self) -> Rational {
        self.alpha
    }

    fn gamma(&self) -> Rational {
        self.gamma
    }

    fn deltas(&self) -> Vec<Rational> {
        self.deltas.clone()
    }

    fn optimal_step(&self, y: Rational) -> Result<u64> {
        MultiLayerParams::optimal_step(self, y)
    }

    fn velocity(&self, y: Rational) -> Result<u64> {
        self.velocity_closed_form_k(y)
    }

    /// Union over the layers of `{(m + C_r)/2α, (m + 1 − C_r)/2α}` for the
    /// odd `m ≡ 2r − 1 (mod 2K)`.
    fn breakpoints_between(&self, lo: Rational, hi: Rational) -> Vec<Rational> {
        let two_alpha = int(2) * self.alpha;
        let levels = self.contrast_levels();
        let m_lo = (floor_i128(&(lo * two_alpha)) - 2).max(0) as u64;
        let m_hi = (floor_i128(&(hi * two_alpha)) + 2).max(0) as u64;
        let mut out: Vec<Rational> = (m_lo..=m_hi)
            .filter_map(|m| self.layer_of_step(m).map(|r| (m, levels[r - 1])))
            .flat_map(|(m, c)| {
                let m = int(m as i128);
                [(m + c) / two_alpha, (m + int(1) - c) / two_alpha]
            })
            .filter(|b| *b > lo && *b <= hi)
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn pinning_threshold(&self) -> Rational {
        self.pinning_threshold_k()
    }
}
