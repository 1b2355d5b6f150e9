use serde::{Deserialize, Serialize};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{self, fraction_string, Rational};
use crate::side_law::VelocityLaw;

/// Exact piecewise-constant velocity on `(0, y_max]`.
///
/// `values[i]` holds on the open interval ending at `breakpoints[i]`; the
/// last value covers `(breakpoints.last(), y_max]` unless `y_max` is itself
/// a breakpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VelocityTable {
    #[serde(rename = "K")]
    pub layers: usize,
    #[serde(with = "rational::serde_fraction")]
    pub alpha: Rational,
    #[serde(with = "rational::serde_fraction")]
    pub gamma: Rational,
    #[serde(with = "rational::serde_fraction_vec")]
    pub deltas: Vec<Rational>,
    #[serde(with = "rational::serde_fraction")]
    pub y_max: Rational,
    #[serde(with = "rational::serde_fraction_vec")]
    pub breakpoints: Vec<Rational>,
    pub values: Vec<u64>,
    /// `(f⁻, f⁺)` at each breakpoint.
    pub envelopes: Vec<(u64, u64)>,
}

#[derive(Serialize)]
struct IntervalRow {
    #[serde(rename = "Y_lo")]
    lo: String,
    #[serde(rename = "Y_hi")]
    hi: String,
    f: u64,
}

impl VelocityTable {
    pub fn build<L: VelocityLaw + ?Sized>(law: &L, y_max: Rational) -> Result<Self> {
        if y_max <= Rational::zero() {
            return Err(Error::domain("Y_max must be positive"));
        }
        let breakpoints = law.breakpoints_between(Rational::zero(), y_max);
        let mut edges = vec![Rational::zero()];
        edges.extend(breakpoints.iter().copied());
        if edges.last() != Some(&y_max) {
            edges.push(y_max);
        }
        let two = Rational::from_integer(2);
        let values = edges
            .windows(2)
            .map(|w| law.velocity((w[0] + w[1]) / two))
            .collect::<Result<Vec<_>>>()?;
        let envelopes = breakpoints.iter().map(|b| law.envelope(*b)).collect();
        Ok(VelocityTable {
            layers: law.layers(),
            alpha: law.alpha(),
            gamma: law.gamma(),
            deltas: law.deltas(),
            y_max,
            breakpoints,
            values,
            envelopes,
        })
    }

    /// `(Y_lo, Y_hi, f)` triples.
    pub fn intervals(&self) -> Vec<(Rational, Rational, u64)> {
        let mut edges = vec![Rational::zero()];
        edges.extend(self.breakpoints.iter().copied());
        if edges.last() != Some(&self.y_max) {
            edges.push(self.y_max);
        }
        edges.windows(2).zip(&self.values).map(|(w, f)| (w[0], w[1], *f)).collect()
    }

    /// Value at a regular point of the table.
    pub fn value_at(&self, y: Rational) -> Option<u64> {
        self.intervals().into_iter().find(|(lo, hi, _)| *lo < y && y < *hi).map(|(_, _, f)| f)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("Y_lo,Y_hi,f\n");
        for (lo, hi, f) in self.intervals() {
            out.push_str(&format!("{},{},{}\n", fraction_string(&lo), fraction_string(&hi), f));
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            #[serde(flatten)]
            table: &'a VelocityTable,
            intervals: Vec<IntervalRow>,
        }
        let intervals = self
            .intervals()
            .into_iter()
            .map(|(lo, hi, f)| IntervalRow { lo: fraction_string(&lo), hi: fraction_string(&hi), f })
            .collect();
        serde_json::to_string_pretty(&Doc { table: self, intervals }).expect("table serializes")
    }

    /// Structural checks: starts at 0, nondecreasing, jumps at every
    /// breakpoint, envelopes consistent with neighbouring values, and
    /// `|f − 2αY| ≤ 1 + max C_r` at every interval end.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.values.first() != Some(&0) {
            return Err("velocity does not start at 0".into());
        }
        if !self.breakpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err("breakpoints not strictly increasing".into());
        }
        for (i, w) in self.values.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(format!("no increase across breakpoint {}", self.breakpoints[i]));
            }
            if self.envelopes[i] != (w[0], w[1]) {
                return Err(format!("envelope mismatch at {}", self.breakpoints[i]));
            }
        }
        let c_max = self
            .deltas
            .iter()
            .map(|d| rational::min(*d * self.gamma, Rational::new(1, 2)))
            .max()
            .unwrap_or_else(Rational::zero);
        let bound = Rational::from_integer(1) + c_max;
        let two_alpha = Rational::from_integer(2) * self.alpha;
        for (lo, hi, f) in self.intervals() {
            let f = Rational::from_integer(f as i128);
            for y in [lo, hi] {
                if rational::abs(f - two_alpha * y) > bound {
                    return Err(format!("|f - 2αY| exceeds 1 + C near Y = {y}"));
                }
            }
        }
        Ok(())
    }
}
