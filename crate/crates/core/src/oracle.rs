//! Brute-force validators.
//!
//! Nothing here calls the closed forms it is meant to check: the step cost
//! is re-evaluated from its definition, velocities are measured on explicit
//! orbits, and the two-dimensional check enumerates every set between an
//! inner rectangle and the previous one.

use num_integer::Integer;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::RectangleState;
use crate::lattice::{perimeter_energy, CoefficientField, LatticeSet};
use crate::multilayer::MultiLayerParams;
use crate::rational::{self, ceil_i128, fraction_string, int, Rational};
use crate::side_law::VelocityLaw;

pub const DEFAULT_MAX_ANNULUS_CELLS: usize = 24;

/// Generic agreement record between an oracle and a closed form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub case: String,
    pub oracle: String,
    pub closed_form: String,
    pub agrees: bool,
    /// Present on every disagreement.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl OracleReport {
    pub fn new(
        case: impl Into<String>,
        oracle: impl ToString,
        closed_form: impl ToString,
        witness: impl FnOnce() -> String,
    ) -> Self {
        let (oracle, closed_form) = (oracle.to_string(), closed_form.to_string());
        let agrees = oracle == closed_form;
        OracleReport {
            case: case.into(),
            witness: (!agrees).then(witness),
            oracle,
            closed_form,
            agrees,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Result of scanning `g` over `0..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepScan {
    #[serde(with = "rational::serde_fraction")]
    pub y: Rational,
    pub n_max: u64,
    /// Every `N` attaining the minimum, ascending.
    pub minimizers: Vec<u64>,
    #[serde(with = "rational::serde_fraction")]
    pub minimum: Rational,
}

impl StepScan {
    pub fn unique(&self) -> Option<u64> {
        match self.minimizers.as_slice() {
            [n] => Some(*n),
            _ => None,
        }
    }
}

/// `⌈2αY⌉ + 2K + 2`: past this bound `g` is increasing.
pub fn minimal_scan_bound(law: &impl VelocityLaw, y: Rational) -> u64 {
    (ceil_i128(&(int(2) * law.alpha() * y)).max(0) as u64) + 2 * law.layers() as u64 + 2
}

fn step_cost(alpha: Rational, gamma: Rational, deltas: &[Rational], n: u64, y: Rational) -> Rational {
    let k = deltas.len() as u64;
    let nq = int(n as i128);
    let mut g = -(alpha + alpha) * nq + nq * (nq + int(1)) / (y + y);
    let residue = n % (2 * k);
    if residue % 2 == 1 {
        g += deltas[(residue as usize - 1) / 2] * gamma / y;
    }
    g
}

pub fn brute_force_step(y: Rational, law: &impl VelocityLaw, n_max: u64) -> Result<StepScan> {
    if y <= Rational::zero() {
        return Err(Error::domain("Y must be positive"));
    }
    let bound = minimal_scan_bound(law, y);
    if n_max < bound {
        return Err(Error::domain(format!("N_max = {n_max} is below the scan bound {bound}")));
    }
    let (alpha, gamma, deltas) = (law.alpha(), law.gamma(), law.deltas());
    let mut minimum = step_cost(alpha, gamma, &deltas, 0, y);
    let mut minimizers = vec![0];
    for n in 1..=n_max {
        let g = step_cost(alpha, gamma, &deltas, n, y);
        if g < minimum {
            minimum = g;
            minimizers.clear();
        }
        if g == minimum {
            minimizers.push(n);
        }
    }
    Ok(StepScan { y, n_max, minimizers, minimum })
}

/// Long-run displacement per step of an explicit orbit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VelocityMeasurement {
    #[serde(with = "rational::serde_fraction")]
    pub velocity: Rational,
    pub cycle_length: usize,
    pub positions: Vec<i64>,
}

/// Iterate the scheme from 0 for `steps ≥ 8K` steps, locate the first
/// repeated residue modulo `2K` and average the displacement over it.
pub fn brute_force_velocity(
    y: Rational,
    law: &impl VelocityLaw,
    steps: usize,
) -> Result<VelocityMeasurement> {
    let modulus = 2 * law.layers() as i64;
    if steps < 4 * modulus as usize {
        return Err(Error::domain(format!("at least {} steps are required", 4 * modulus)));
    }
    let scan = brute_force_step(y, law, minimal_scan_bound(law, y))?;
    let positions: Vec<i64> = (0..=steps)
        .scan(0i64, |x, k| {
            if k > 0 {
                // the step only depends on Y; a tie has no well-defined orbit
                *x += scan.unique()? as i64;
            }
            Some(*x)
        })
        .collect();
    if positions.len() <= steps {
        return Err(Error::NonUniqueMinimizer {
            y,
            lower: scan.minimizers[0],
            upper: *scan.minimizers.last().expect("nonempty"),
        });
    }
    for j in 1..positions.len() {
        let r = positions[j].rem_euclid(modulus);
        if let Some(i) = (0..j).find(|&i| positions[i].rem_euclid(modulus) == r) {
            let velocity = Rational::new((positions[j] - positions[i]) as i128, (j - i) as i128);
            return Ok(VelocityMeasurement { velocity, cycle_length: j - i, positions });
        }
    }
    Err(Error::PeriodNotFound { steps })
}

/// Uniform random rationals `p/q ∈ (0, y_max]` with `q ≤ max_den`, skipping
/// breakpoints of `law`.
pub fn random_regular_points(
    law: &impl VelocityLaw,
    count: usize,
    y_max: Rational,
    max_den: i128,
    rng: &mut impl Rng,
) -> Vec<Rational> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let q = rng.gen_range(1..=max_den);
        let top = rational::floor_i128(&(y_max * int(q)));
        if top < 1 {
            continue;
        }
        let y = Rational::new(rng.gen_range(1..=top), q);
        if !law.is_singular(y) {
            out.push(y);
        }
    }
    out
}

/// Outcome of the exhaustive two-dimensional check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExhaustiveReport {
    pub previous: RectangleState,
    #[serde(with = "rational::serde_fraction")]
    pub alpha: Rational,
    #[serde(with = "rational::serde_fraction_vec")]
    pub deltas: Vec<Rational>,
    #[serde(with = "rational::serde_fraction")]
    pub epsilon: Rational,
    #[serde(with = "rational::serde_fraction")]
    pub tau: Rational,
    /// `γ/L` seen by the vertical and the horizontal sides.
    #[serde(with = "rational::serde_fraction_vec")]
    pub y: Vec<Rational>,
    pub annulus_cells: usize,
    #[serde(with = "rational::serde_fraction")]
    pub energy: Rational,
    /// Number of candidates attaining the minimum.
    pub ties: u64,
    pub minimizer: Option<RectangleState>,
    /// Inward displacement `[left, right, bottom, top]` of the minimizer.
    pub displacement: Option<[i64; 4]>,
    pub predicted: [u64; 4],
    pub is_rectangle: bool,
    pub agrees: bool,
    /// Cells of the minimizer, kept on disagreement.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<LatticeSet>,
}

impl ExhaustiveReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary(&self) -> OracleReport {
        let p = self.previous;
        OracleReport {
            case: format!(
                "rectangle [{}, {}) x [{}, {}), Y = ({}, {})",
                p.left,
                p.right,
                p.bottom,
                p.top,
                fraction_string(&self.y[0]),
                fraction_string(&self.y[1])
            ),
            oracle: match self.displacement {
                Some(d) => format!("{d:?}"),
                None if self.is_rectangle => "empty".into(),
                None => "not a rectangle".into(),
            },
            closed_form: format!("{:?}", self.predicted),
            agrees: self.agrees,
            witness: self.witness.as_ref().map(|w| w.to_json()),
        }
    }
}

enum Neighbour {
    Annulus(usize),
    Fixed(bool),
}

/// Minimize the full ATW functional over every `F` with
/// `R_inner ⊆ F ⊆ previous`, where `R_inner` is `previous` shrunk by the
/// predicted displacement plus one cell on each side.
///
/// Every side of `previous` must be α-type (coordinate `≡ 0 mod 2K`
/// relative to the anchor), the situation in which each side's motion is the
/// one-dimensional step problem. The right and top sides meet the layers in
/// reverse order.
pub fn exhaustive_minimizer_small(
    previous: &RectangleState,
    field: &CoefficientField,
    tau: Rational,
    max_annulus_cells: usize,
) -> Result<ExhaustiveReport> {
    if tau <= Rational::zero() {
        return Err(Error::domain("tau must be positive"));
    }
    let period = field.period();
    let (ax, ay) = field.anchor();
    for (c, a) in [
        (previous.left, ax),
        (previous.right, ax),
        (previous.bottom, ay),
        (previous.top, ay),
    ] {
        if (c - a).rem_euclid(period) != 0 {
            return Err(Error::domain("every side of the previous rectangle must be alpha-type"));
        }
    }
    let eps = field.epsilon();
    let gamma = tau / eps;
    let forward = MultiLayerParams::new(field.alpha(), gamma, field.deltas().to_vec())?;
    let backward = MultiLayerParams::new(
        field.alpha(),
        gamma,
        field.deltas().iter().rev().copied().collect(),
    )?;
    let y_vertical = gamma / (int(previous.height() as i128) * eps);
    let y_horizontal = gamma / (int(previous.width() as i128) * eps);
    let predicted = [
        forward.optimal_step(y_vertical)?,
        backward.optimal_step(y_vertical)?,
        forward.optimal_step(y_horizontal)?,
        backward.optimal_step(y_horizontal)?,
    ];
    let shrink = predicted.map(|n| n as i64 + 1);
    let inner = (
        previous.left + shrink[0],
        previous.right - shrink[1],
        previous.bottom + shrink[2],
        previous.top - shrink[3],
    );
    let inner_set = if inner.0 < inner.1 && inner.2 < inner.3 {
        LatticeSet::rectangle(inner.0, inner.1, inner.2, inner.3)
    } else {
        LatticeSet::new()
    };
    let cells: Vec<(i64, i64)> =
        previous.to_set().iter().filter(|c| !inner_set.contains(c)).copied().collect();
    if cells.len() > max_annulus_cells {
        return Err(Error::AnnulusTooLarge { cells: cells.len(), max: max_annulus_cells });
    }
    let n = cells.len();

    // exact weights, then one common integer scale
    let prev_set = previous.to_set();
    let distances = crate::lattice::discrete_distance_field(
        &prev_set,
        &prev_set.bounding_window().expect("nonempty"),
        eps,
    )?;
    let eps3_over_tau = eps * eps / tau;
    let dissipation: Vec<Rational> = cells.iter().map(|c| distances[c] * eps3_over_tau).collect();
    let mut bonds: Vec<Vec<(Neighbour, Rational)>> = Vec::with_capacity(n);
    for &c in &cells {
        let mut list = Vec::with_capacity(4);
        for d in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let j = (c.0 + d.0, c.1 + d.1);
            let w = eps * field.bond_coefficient(c, j)?;
            let kind = match cells.iter().position(|x| *x == j) {
                Some(k) => Neighbour::Annulus(k),
                None => Neighbour::Fixed(inner_set.contains(&j)),
            };
            list.push((kind, w));
        }
        bonds.push(list);
    }
    let base = perimeter_energy(&inner_set, field) + dissipation.iter().copied().sum::<Rational>();
    let scale = dissipation
        .iter()
        .chain(bonds.iter().flatten().map(|(_, w)| w))
        .chain([&base])
        .fold(1i128, |acc, r| acc.lcm(r.denom()));
    let to_int = |r: &Rational| (*r * int(scale)).to_integer();
    let dissipation_i: Vec<i128> = dissipation.iter().map(to_int).collect();
    let bonds_i: Vec<Vec<(Option<usize>, bool, i128)>> = bonds
        .iter()
        .map(|list| {
            list.iter()
                .map(|(kind, w)| match kind {
                    Neighbour::Annulus(k) => (Some(*k), false, to_int(w)),
                    Neighbour::Fixed(inside) => (None, *inside, to_int(w)),
                })
                .collect()
        })
        .collect();
    let base_i = to_int(&base);

    // flipping cell k into F: each bond to a member disappears, each bond to
    // a non-member appears, and its dissipation is saved
    let delta_in = |k: usize, mask: u64| -> i128 {
        let mut d = -dissipation_i[k];
        for &(nb, fixed_inside, w) in &bonds_i[k] {
            let member = match nb {
                Some(j) => mask >> j & 1 == 1,
                None => fixed_inside,
            };
            d += if member { -w } else { w };
        }
        d
    };
    let prefix_bits = n.min(6);
    let low_bits = n - prefix_bits;
    let best = (0u64..1 << prefix_bits)
        .into_par_iter()
        .map(|prefix| {
            let mut mask = 0u64;
            let mut energy = base_i;
            for b in 0..prefix_bits {
                if prefix >> b & 1 == 1 {
                    let k = low_bits + b;
                    energy += delta_in(k, mask);
                    mask |= 1 << k;
                }
            }
            let (mut best_e, mut best_mask, mut ties) = (energy, mask, 1u64);
            for i in 1u64..1 << low_bits {
                let k = i.trailing_zeros() as usize;
                if mask >> k & 1 == 1 {
                    mask &= !(1 << k);
                    energy -= delta_in(k, mask);
                } else {
                    energy += delta_in(k, mask);
                    mask |= 1 << k;
                }
                if energy < best_e || (energy == best_e && mask < best_mask) {
                    if energy < best_e {
                        ties = 0;
                    }
                    best_e = energy;
                    best_mask = mask;
                }
                if energy == best_e {
                    ties += 1;
                }
            }
            (best_e, best_mask, ties)
        })
        .reduce(
            || (i128::MAX, u64::MAX, 0),
            |a, b| match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Greater => b,
                std::cmp::Ordering::Equal => (a.0, a.1.min(b.1), a.2 + b.2),
            },
        );
    let (best_e, best_mask, ties) = best;
    let mut minimizer = inner_set.clone();
    for (k, c) in cells.iter().enumerate() {
        if best_mask >> k & 1 == 1 {
            minimizer.insert(*c);
        }
    }
    let rectangle = minimizer.as_rectangle().map(|(l, r, b, t)| RectangleState {
        left: l,
        right: r,
        bottom: b,
        top: t,
    });
    let is_rectangle = rectangle.is_some() || minimizer.is_empty();
    let displacement = rectangle.map(|r| previous.displacement_to(&r));
    let collides = previous.width() <= (predicted[0] + predicted[1]) as i64
        || previous.height() <= (predicted[2] + predicted[3]) as i64;
    let agrees = match displacement {
        Some(d) => !collides && (0..4).all(|i| d[i] == predicted[i] as i64),
        None => minimizer.is_empty() && collides,
    };
    Ok(ExhaustiveReport {
        previous: *previous,
        alpha: field.alpha(),
        deltas: field.deltas().to_vec(),
        epsilon: eps,
        tau,
        y: vec![y_vertical, y_horizontal],
        annulus_cells: n,
        energy: Rational::new(best_e, scale),
        ties,
        minimizer: rectangle,
        displacement,
        predicted,
        is_rectangle,
        agrees,
        witness: (!agrees).then_some(minimizer),
    })
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use crate::side_law::SideLawParams;

    fn quarter() -> SideLawParams {
        SideLawParams::new(int(1), int(1), frac(1, 4)).unwrap()
    }

    #[test]
    fn scan_matches_small_cases() {
        let p = quarter();
        assert_eq!(brute_force_step(int(1), &p, 10).unwrap().minimizers, vec![2]);
        assert_eq!(brute_force_step(frac(5, 8), &p, 10).unwrap().minimizers, vec![0, 1]);
        assert_eq!(brute_force_step(frac(1, 2), &p, 10).unwrap().minimizers, vec![0]);
        assert!(brute_force_step(int(1), &p, 3).is_err());
        // merged breakpoint at δγ = 1/2: three tied minimizers
        let half = SideLawParams::new(int(1), int(1), frac(1, 2)).unwrap();
        assert_eq!(brute_force_step(frac(7, 4), &half, 10).unwrap().minimizers, vec![2, 3, 4]);
    }

    #[test]
    fn measured_velocity() {
        let m = brute_force_velocity(frac(7, 10), &quarter(), 8).unwrap();
        assert_eq!(m.velocity, int(1));
        assert_eq!(m.cycle_length, 2);
        assert!(brute_force_velocity(frac(5, 8), &quarter(), 8).is_err());
        assert!(brute_force_velocity(int(1), &quarter(), 3).is_err());
    }

    #[test]
    fn random_points_are_regular() {
        let mut rng = seeded_rng(7);
        let pts = random_regular_points(&quarter(), 200, int(10), 97, &mut rng);
        assert_eq!(pts.len(), 200);
        assert!(pts.iter().all(|y| *y > Rational::zero() && *y <= int(10) && !quarter().is_singular(*y)));
    }

    #[test]
    fn report_carries_witness_on_disagreement() {
        let ok = OracleReport::new("c", 1, 1, || "w".into());
        assert!(ok.agrees && ok.witness.is_none());
        let bad = OracleReport::new("c", 1, 2, || "w".into());
        assert!(!bad.agrees && bad.witness.as_deref() == Some("w"));
    }

    #[test]
    fn exhaustive_pinned_square() {
        // 4x4 square, ε = 1 puts Y = 1/4 deep in the f = 0 interval
        let field = CoefficientField::uniform(int(1), frac(1, 4), int(1)).unwrap();
        let prev = RectangleState::new(0, 4, 0, 4).unwrap();
        let r = exhaustive_minimizer_small(&prev, &field, int(1), 24).unwrap();
        assert_eq!(r.predicted, [0, 0, 0, 0]);
        assert_eq!(r.annulus_cells, 12);
        assert!(r.agrees, "{}", r.to_json());
        assert_eq!(r.minimizer, Some(prev));
        assert_eq!(r.ties, 1);
    }

    #[test]
    fn exhaustive_reports_corner_effect() {
        // Y = 1/2: the side law keeps the square, the full functional
        // prefers to shave one cell off every side
        let field = CoefficientField::uniform(int(1), frac(1, 4), frac(1, 2)).unwrap();
        let prev = RectangleState::new(0, 4, 0, 4).unwrap();
        let r = exhaustive_minimizer_small(&prev, &field, frac(1, 2), 24).unwrap();
        assert_eq!(r.predicted, [0, 0, 0, 0]);
        assert_eq!(r.displacement, Some([1, 1, 1, 1]));
        assert_eq!(r.energy, frac(15, 2));
        assert!(!r.agrees);
        assert_eq!(r.witness.as_ref().map(|w| w.len()), Some(4));
    }

    #[test]
    fn exhaustive_refuses_large_annulus() {
        let field = CoefficientField::uniform(int(1), frac(1, 4), frac(1, 20)).unwrap();
        let prev = RectangleState::new(0, 20, 0, 20).unwrap();
        let err = exhaustive_minimizer_small(&prev, &field, frac(1, 20), 24).unwrap_err();
        assert!(matches!(err, Error::AnnulusTooLarge { max: 24, .. }));
        let odd = RectangleState::new(1, 5, 0, 4).unwrap();
        assert!(exhaustive_minimizer_small(&odd, &field, frac(1, 20), 24).is_err());
    }
}
