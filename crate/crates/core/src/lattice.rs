//! Periodic low-contrast bond field, ferromagnetic perimeter, discrete ℓ∞
//! distance and the minimizing-movement functional on explicit lattice sets.
//!
//! Indices are integer pairs in lattice units; the physical point of index
//! `i` is `ε·i` and the region identified with a set is the union of the
//! closed `ε`-squares centred at its indices.
//!
//! # Bond pattern
//!
//! A nearest-neighbour bond is classified by the half-integer coordinate of
//! its midpoint. Writing that coordinate as `u + 1/2` (after subtracting the
//! anchor) the bond is a `β_r` bond, with coefficient `α + δ_r ε`, when
//! `u mod 2K = 2r − 2`, and an `α` bond otherwise. For `K = 1` this is the
//! rule "both midpoint coordinates lie in `[0, ε]` modulo `2ε`": the integer
//! midpoint coordinate always does, so only the crossing coordinate matters.
//! One period cell for `K = 1` (`=` and `‖` are β bonds, `-` and `|` α
//! bonds, `o` lattice sites):
//!
//! ```text
//!  y = 2   o=======o-------o
//!          |       |       |
//!  y = 1   o=======o-------o
//!          ‖       ‖       ‖
//!  y = 0   o=======o-------o
//!        x = 0   x = 1   x = 2
//! ```
//!
//! A vertical interface between columns `x − 1` and `x` therefore crosses
//! only β bonds when `x` is odd and only α bonds when `x` is even; for
//! general `K` it crosses `δ_r` bonds when `x ≡ 2r − 1 (mod 2K)`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, fraction_string, Rational};

pub type Index = (i64, i64);

const NEIGHBOURS: [Index; 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// The `2Kε`-periodic coefficient environment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientField {
    alpha: Rational,
    deltas: Vec<Rational>,
    epsilon: Rational,
    anchor: Index,
}

/// Type of a single bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BondClass {
    Alpha,
    /// Inclusion bond of layer `r` (1-based).
    Beta(usize),
}

impl CoefficientField {
    pub fn new(alpha: Rational, deltas: Vec<Rational>, epsilon: Rational) -> Result<Self> {
        if alpha <= Rational::zero() {
            return Err(Error::domain("alpha must be positive"));
        }
        if deltas.is_empty() {
            return Err(Error::domain("at least one contrast parameter is required"));
        }
        if deltas.iter().any(|d| *d < Rational::zero()) {
            return Err(Error::domain("contrast parameters must be nonnegative"));
        }
        if epsilon <= Rational::zero() {
            return Err(Error::domain("epsilon must be positive"));
        }
        Ok(CoefficientField { alpha, deltas, epsilon, anchor: (0, 0) })
    }

    /// Single contrast parameter field.
    pub fn uniform(alpha: Rational, delta: Rational, epsilon: Rational) -> Result<Self> {
        Self::new(alpha, vec![delta], epsilon)
    }

    /// Shift the phase of the periodic pattern.
    pub fn with_anchor(mut self, anchor: Index) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn alpha(&self) -> Rational {
        self.alpha
    }

    pub fn deltas(&self) -> &[Rational] {
        &self.deltas
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    pub fn anchor(&self) -> Index {
        self.anchor
    }

    pub fn layers(&self) -> usize {
        self.deltas.len()
    }

    /// Period of the pattern in lattice units, `2K`.
    pub fn period(&self) -> i64 {
        2 * self.deltas.len() as i64
    }

    pub fn bond_class(&self, i: Index, j: Index) -> Result<BondClass> {
        let (dx, dy) = (j.0 - i.0, j.1 - i.1);
        let u = match (dx.abs(), dy.abs()) {
            (1, 0) => i.0.min(j.0) - self.anchor.0,
            (0, 1) => i.1.min(j.1) - self.anchor.1,
            _ => {
                return Err(Error::domain(format!(
                    "{i:?} and {j:?} are not nearest neighbours"
                )))
            }
        };
        let residue = u.rem_euclid(self.period());
        Ok(if residue % 2 == 0 { BondClass::Beta(residue as usize / 2 + 1) } else { BondClass::Alpha })
    }

    /// `c(i, j)`: `α` or `α + δ_r ε`.
    pub fn bond_coefficient(&self, i: Index, j: Index) -> Result<Rational> {
        Ok(self.coefficient_of(self.bond_class(i, j)?))
    }

    pub fn coefficient_of(&self, class: BondClass) -> Rational {
        match class {
            BondClass::Alpha => self.alpha,
            BondClass::Beta(r) => self.alpha + self.deltas[r - 1] * self.epsilon,
        }
    }

    /// Flat `key = value` block; rationals as `p/q`.
    pub fn to_config_block(&self) -> String {
        let deltas: Vec<String> = self.deltas.iter().map(fraction_string).collect();
        format!(
            "alpha = {}\ndeltas = {}\nepsilon = {}\nanchor = {},{}\n",
            fraction_string(&self.alpha),
            deltas.join(","),
            fraction_string(&self.epsilon),
            self.anchor.0,
            self.anchor.1
        )
    }

    pub fn from_config_block(text: &str) -> Result<Self> {
        let mut alpha = None;
        let mut deltas = None;
        let mut epsilon = None;
        let mut anchor = (0, 0);
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
            let value = value.trim();
            match key.trim() {
                "alpha" => alpha = Some(rational::parse_rational(value)?),
                "delta" | "deltas" => {
                    deltas = Some(
                        value
                            .split(',')
                            .map(rational::parse_rational)
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                "epsilon" => epsilon = Some(rational::parse_rational(value)?),
                "anchor" => {
                    let (a, b) = value
                        .split_once(',')
                        .ok_or_else(|| Error::Parse("anchor must be 'i,j'".into()))?;
                    let parse = |s: &str| {
                        s.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad anchor '{s}'")))
                    };
                    anchor = (parse(a)?, parse(b)?);
                }
                other => return Err(Error::Parse(format!("unknown key '{other}'"))),
            }
        }
        let missing = |k: &str| Error::Parse(format!("missing key '{k}'"));
        Ok(Self::new(
            alpha.ok_or_else(|| missing("alpha"))?,
            deltas.ok_or_else(|| missing("deltas"))?,
            epsilon.ok_or_else(|| missing("epsilon"))?,
        )?
        .with_anchor(anchor))
    }
}

/// Inclusive index bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub min: Index,
    pub max: Index,
}

impl Window {
    pub fn new(min: Index, max: Index) -> Self {
        Window { min, max }
    }

    pub fn is_empty(&self) -> bool {
        self.min.0 > self.max.0 || self.min.1 > self.max.1
    }

    pub fn contains(&self, i: Index) -> bool {
        (self.min.0..=self.max.0).contains(&i.0) && (self.min.1..=self.max.1).contains(&i.1)
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        other.is_empty() || (self.contains(other.min) && self.contains(other.max))
    }

    pub fn expand(&self, by: i64) -> Window {
        Window::new((self.min.0 - by, self.min.1 - by), (self.max.0 + by, self.max.1 + by))
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            ((self.max.0 - self.min.0 + 1) * (self.max.1 - self.min.1 + 1)) as usize
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Index> + '_ {
        let (x0, x1, y0, y1) = (self.min.0, self.max.0, self.min.1, self.max.1);
        (y0..=y1).flat_map(move |y| (x0..=x1).map(move |x| (x, y)))
    }

    fn bounding<'a>(indices: impl IntoIterator<Item = &'a Index>) -> Option<Window> {
        let mut it = indices.into_iter();
        let first = *it.next()?;
        let mut w = Window::new(first, first);
        for &(x, y) in it {
            w.min = (w.min.0.min(x), w.min.1.min(y));
            w.max = (w.max.0.max(x), w.max.1.max(y));
        }
        Some(w)
    }
}

/// A finite set of lattice indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LatticeSet {
    indices: BTreeSet<Index>,
}

impl FromIterator<Index> for LatticeSet {
    fn from_iter<T: IntoIterator<Item = Index>>(iter: T) -> Self {
        LatticeSet { indices: iter.into_iter().collect() }
    }
}

impl LatticeSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Cells `left ≤ x < right`, `bottom ≤ y < top`.
    pub fn rectangle(left: i64, right: i64, bottom: i64, top: i64) -> Self {
        (bottom..top).flat_map(|y| (left..right).map(move |x| (x, y))).collect()
    }

    pub fn insert(&mut self, i: Index) -> bool {
        self.indices.insert(i)
    }

    pub fn remove(&mut self, i: &Index) -> bool {
        self.indices.remove(i)
    }

    pub fn contains(&self, i: &Index) -> bool {
        self.indices.contains(i)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Index> {
        self.indices.iter()
    }

    pub fn bounding_window(&self) -> Option<Window> {
        Window::bounding(&self.indices)
    }

    pub fn translate(&self, by: Index) -> Self {
        self.indices.iter().map(|&(x, y)| (x + by.0, y + by.1)).collect()
    }

    pub fn symmetric_difference(&self, other: &LatticeSet) -> LatticeSet {
        self.indices.symmetric_difference(&other.indices).copied().collect()
    }

    /// `Some((left, right, bottom, top))` when the set is a filled rectangle.
    pub fn as_rectangle(&self) -> Option<(i64, i64, i64, i64)> {
        let w = self.bounding_window()?;
        (w.len() == self.len()).then_some((w.min.0, w.max.0 + 1, w.min.1, w.max.1 + 1))
    }

    /// Ordered pairs `(inside, outside)` of nearest neighbours.
    pub fn boundary_bonds(&self) -> impl Iterator<Item = (Index, Index)> + '_ {
        self.indices.iter().flat_map(move |&(x, y)| {
            NEIGHBOURS
                .iter()
                .map(move |&(dx, dy)| ((x, y), (x + dx, y + dy)))
                .filter(|(_, j)| !self.indices.contains(j))
        })
    }

    pub fn to_json(&self) -> String {
        let pairs: Vec<[i64; 2]> = self.indices.iter().map(|&(x, y)| [x, y]).collect();
        serde_json::to_string(&pairs).expect("index pairs serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let pairs: Vec<[i64; 2]> =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(pairs.into_iter().map(|[x, y]| (x, y)).collect())
    }
}

impl Serialize for LatticeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[i64; 2]> = self.indices.iter().map(|&(x, y)| [x, y]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticeSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[i64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[x, y]| (x, y)).collect())
    }
}

/// `ε · Σ c(i, j)` over bonds with `i` inside and `j` outside.
pub fn perimeter_energy(set: &LatticeSet, field: &CoefficientField) -> Rational {
    let sum: Rational = set
        .boundary_bonds()
        .map(|(i, j)| field.bond_coefficient(i, j).expect("boundary bonds are nearest neighbours"))
        .sum();
    sum * field.epsilon()
}

/// `H¹(∂E)`: `ε` times the number of boundary bonds.
pub fn boundary_length(set: &LatticeSet, epsilon: Rational) -> Rational {
    Rational::from_integer(set.boundary_bonds().count() as i128) * epsilon
}

/// Discrete ℓ∞ distance to the boundary in lattice units, for every index of
/// `window`. Inside indices measure to the nearest outside index and vice
/// versa; the search runs over all of ℤ², not only the window.
pub fn discrete_distance_lattice(set: &LatticeSet, window: &Window) -> Result<BTreeMap<Index, u64>> {
    let bbox = set
        .bounding_window()
        .ok_or_else(|| Error::domain("distance to the boundary of an empty set"))?;
    if window.is_empty() {
        return Err(Error::domain("empty window"));
    }
    let reach = window.expand(1);
    let limit = (reach.max.0 - reach.min.0).max(reach.max.1 - reach.min.1) as u64
        + (bbox.max.0 - bbox.min.0).max(bbox.max.1 - bbox.min.1) as u64
        + 2;
    let mut out = BTreeMap::new();
    for i in window.iter() {
        let inside = set.contains(&i);
        let d = (1..=limit)
            .find(|&r| shell(i, r as i64).any(|j| set.contains(&j) != inside))
            .expect("a finite nonempty set has a boundary within the search radius");
        out.insert(i, d);
    }
    Ok(out)
}

fn shell(c: Index, r: i64) -> impl Iterator<Item = Index> {
    let top = (-r..=r).map(move |t| (c.0 + t, c.1 + r));
    let bottom = (-r..=r).map(move |t| (c.0 + t, c.1 - r));
    let left = (-r + 1..r).map(move |t| (c.0 - r, c.1 + t));
    let right = (-r + 1..r).map(move |t| (c.0 + r, c.1 + t));
    top.chain(bottom).chain(left).chain(right)
}

/// `d_∞^ε(i, ∂I)` as a physical length for every index of `window`.
pub fn discrete_distance_field(
    set: &LatticeSet,
    window: &Window,
    epsilon: Rational,
) -> Result<BTreeMap<Index, Rational>> {
    Ok(discrete_distance_lattice(set, window)?
        .into_iter()
        .map(|(i, d)| (i, Rational::from_integer(d as i128) * epsilon))
        .collect())
}

/// `P(candidate) + (1/τ) Σ_{i ∈ candidate △ previous} ε² d_∞^ε(i, ∂previous)`.
pub fn atw_functional(
    candidate: &LatticeSet,
    previous: &LatticeSet,
    tau: Rational,
    field: &CoefficientField,
) -> Result<Rational> {
    if tau <= Rational::zero() {
        return Err(Error::domain("tau must be positive"));
    }
    if previous.is_empty() {
        return Err(Error::domain("previous set is empty"));
    }
    let perimeter = perimeter_energy(candidate, field);
    let diff = candidate.symmetric_difference(previous);
    let Some(window) = diff.bounding_window() else {
        return Ok(perimeter);
    };
    let distances = discrete_distance_field(previous, &window, field.epsilon())?;
    let eps2 = field.epsilon() * field.epsilon();
    let bulk: Rational = diff.iter().map(|i| distances[i] * eps2).sum();
    Ok(perimeter + bulk / tau)
}

/// `2α(L₁ + L₂)`, the crystalline perimeter of a coordinate rectangle.
pub fn crystalline_perimeter(l1: Rational, l2: Rational, alpha: Rational) -> Result<Rational> {
    if l1 < Rational::zero() || l2 < Rational::zero() {
        return Err(Error::domain("side lengths must be nonnegative"));
    }
    Ok((alpha + alpha) * (l1 + l2))
}

pub(crate) fn half() -> Rational {
    Rational::new(1, 2)
}

/// Euclidean-free check of the distance relation: ℓ∞ distance from the
/// centre of `i` to the polygonal boundary of the region, in lattice units.
pub fn geometric_boundary_distance(set: &LatticeSet, i: Index) -> Option<Rational> {
    let p = (Rational::from_integer(i.0 as i128), Rational::from_integer(i.1 as i128));
    set.boundary_bonds()
        .map(|(a, b)| {
            // The unit edge separating cells a and b.
            let (ax, ay) = (Rational::from_integer(a.0 as i128), Rational::from_integer(a.1 as i128));
            let h = half();
            if a.1 == b.1 {
                let x = ax + if b.0 > a.0 { h } else { -h };
                let gap = interval_gap(p.1, ay - h, ay + h);
                rational::max(rational::abs(p.0 - x), gap)
            } else {
                let y = ay + if b.1 > a.1 { h } else { -h };
                let gap = interval_gap(p.0, ax - h, ax + h);
                rational::max(rational::abs(p.1 - y), gap)
            }
        })
        .min()
}

fn interval_gap(t: Rational, lo: Rational, hi: Rational) -> Rational {
    if t < lo {
        lo - t
    } else if t > hi {
        t - hi
    } else {
        Rational::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn field(alpha: Rational, delta: Rational, eps: Rational) -> CoefficientField {
        CoefficientField::uniform(alpha, delta, eps).unwrap()
    }

    #[test]
    fn bond_coefficients_single_layer() {
        let f = field(int(1), frac(1, 2), int(1));
        assert_eq!(f.bond_coefficient((0, 0), (1, 0)).unwrap(), frac(3, 2));
        assert_eq!(f.bond_coefficient((1, 0), (2, 0)).unwrap(), int(1));
        assert_eq!(f.bond_coefficient((1, 0), (0, 0)).unwrap(), frac(3, 2));
        assert!(f.bond_coefficient((0, 0), (1, 1)).is_err());
        assert!(f.bond_coefficient((0, 0), (2, 0)).is_err());
        assert!(f.bond_coefficient((0, 0), (0, 0)).is_err());
    }

    /// The K = 1 rule read off literally: both midpoint coordinates in
    /// `[0, ε]` modulo `2ε`.
    fn literal_single_layer_is_beta(i: Index, j: Index) -> bool {
        let in_cell = |twice_mid: i64| {
            let m = twice_mid.rem_euclid(4); // midpoint·2 modulo 2·2
            m <= 2
        };
        in_cell(i.0 + j.0) && in_cell(i.1 + j.1)
    }

    #[test]
    fn single_layer_rule_matches_literal_reading() {
        let f = field(int(1), int(1), int(1));
        for x in -5..5 {
            for y in -5..5 {
                for (dx, dy) in NEIGHBOURS {
                    let (i, j) = ((x, y), (x + dx, y + dy));
                    let beta = matches!(f.bond_class(i, j).unwrap(), BondClass::Beta(1));
                    assert_eq!(beta, literal_single_layer_is_beta(i, j), "{i:?} {j:?}");
                }
            }
        }
    }

    #[test]
    fn multilayer_classes_follow_residues() {
        let f = CoefficientField::new(int(1), vec![frac(1, 5), frac(2, 5)], int(1)).unwrap();
        assert_eq!(f.bond_class((0, 7), (1, 7)).unwrap(), BondClass::Beta(1));
        assert_eq!(f.bond_class((1, 7), (2, 7)).unwrap(), BondClass::Alpha);
        assert_eq!(f.bond_class((2, 7), (3, 7)).unwrap(), BondClass::Beta(2));
        assert_eq!(f.bond_class((3, 7), (4, 7)).unwrap(), BondClass::Alpha);
        assert_eq!(f.bond_class((4, 7), (5, 7)).unwrap(), BondClass::Beta(1));
        assert_eq!(f.bond_class((3, -2), (3, -1)).unwrap(), BondClass::Beta(2));
        assert_eq!(f.bond_coefficient((2, 0), (3, 0)).unwrap(), frac(7, 5));
    }

    #[test]
    fn anchor_shifts_pattern() {
        let f = field(int(1), int(1), int(1)).with_anchor((1, 0));
        assert_eq!(f.bond_class((1, 0), (2, 0)).unwrap(), BondClass::Beta(1));
        assert_eq!(f.bond_class((0, 0), (1, 0)).unwrap(), BondClass::Alpha);
    }

    #[test]
    fn singleton_energy() {
        let f = field(int(1), int(1), int(1));
        let s: LatticeSet = [(2, 2)].into_iter().collect();
        assert_eq!(perimeter_energy(&s, &f), int(6));
        assert_eq!(perimeter_energy(&LatticeSet::new(), &f), int(0));
        assert_eq!(boundary_length(&s, int(1)), int(4));
    }

    #[test]
    fn energy_scales_with_epsilon() {
        let f = field(int(1), int(2), frac(1, 10));
        let s: LatticeSet = [(0, 0)].into_iter().collect();
        // two bonds at α + δε = 6/5 and two at α, times ε
        assert_eq!(perimeter_energy(&s, &f), (frac(12, 5) + int(2)) * frac(1, 10));
    }

    #[test]
    fn alpha_rectangle_matches_crystalline_perimeter() {
        let eps = frac(1, 4);
        let f = field(int(3), int(5), eps);
        // even left/bottom, even right/top: every boundary bond is α
        let r = LatticeSet::rectangle(-4, 6, 2, 8);
        let (l1, l2) = (int(10) * eps, int(6) * eps);
        assert_eq!(perimeter_energy(&r, &f), crystalline_perimeter(l1, l2, int(3)).unwrap());
    }

    #[test]
    fn crystalline_perimeter_cases() {
        assert_eq!(crystalline_perimeter(int(1), int(1), int(1)).unwrap(), int(4));
        assert_eq!(crystalline_perimeter(int(0), int(3), int(2)).unwrap(), int(12));
        assert!(crystalline_perimeter(int(-1), int(1), int(1)).is_err());
    }

    #[test]
    fn distance_field_of_square() {
        let s = LatticeSet::rectangle(0, 3, 0, 3);
        let w = Window::new((-2, -2), (4, 4));
        let d = discrete_distance_lattice(&s, &w).unwrap();
        assert_eq!(d[&(1, 1)], 2);
        assert_eq!(d[&(0, 0)], 1);
        assert_eq!(d[&(-1, 1)], 1);
        assert_eq!(d[&(-2, -2)], 2);
        let phys = discrete_distance_field(&s, &w, frac(1, 3)).unwrap();
        assert_eq!(phys[&(1, 1)], frac(2, 3));
    }

    #[test]
    fn distance_relation_to_polygon() {
        let s: LatticeSet =
            [(0, 0), (1, 0), (2, 0), (1, 1), (1, 2), (4, 4), (3, 3)].into_iter().collect();
        let w = Window::new((-3, -3), (7, 7));
        let d = discrete_distance_lattice(&s, &w).unwrap();
        for (i, m) in d {
            let g = geometric_boundary_distance(&s, i).unwrap();
            assert_eq!(int(m as i128), g + half(), "{i:?}");
        }
    }

    #[test]
    fn distance_errors() {
        let w = Window::new((0, 0), (1, 1));
        assert!(discrete_distance_lattice(&LatticeSet::new(), &w).is_err());
        let s = LatticeSet::rectangle(0, 2, 0, 2);
        assert!(discrete_distance_lattice(&s, &Window::new((1, 1), (0, 0))).is_err());
        // window inside the set is fine: the boundary lies outside it
        assert_eq!(discrete_distance_lattice(&s, &w).unwrap()[&(0, 0)], 1);
    }

    #[test]
    fn atw_identity_and_row_removal() {
        let eps = frac(1, 2);
        let tau = frac(3, 4);
        let f = field(int(1), frac(1, 4), eps);
        let prev = LatticeSet::rectangle(0, 4, 0, 6);
        assert_eq!(atw_functional(&prev, &prev, tau, &f).unwrap(), perimeter_energy(&prev, &f));
        // drop the top row: 4 cells, each at distance ε
        let cand = LatticeSet::rectangle(0, 4, 0, 5);
        let expected = perimeter_energy(&cand, &f) + int(4) * eps * eps * eps / tau;
        assert_eq!(atw_functional(&cand, &prev, tau, &f).unwrap(), expected);
        assert!(atw_functional(&cand, &prev, int(0), &f).is_err());
        assert!(atw_functional(&cand, &LatticeSet::new(), tau, &f).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s: LatticeSet = [(0, 0), (-3, 2)].into_iter().collect();
        let text = s.to_json();
        assert_eq!(text, "[[-3,2],[0,0]]");
        assert_eq!(LatticeSet::from_json(&text).unwrap(), s);
        assert!(LatticeSet::from_json("[[1]]").is_err());
    }

    #[test]
    fn config_block_round_trip() {
        let f = CoefficientField::new(int(1), vec![frac(1, 5), frac(2, 5)], frac(1, 100))
            .unwrap()
            .with_anchor((1, -1));
        let text = f.to_config_block();
        assert_eq!(CoefficientField::from_config_block(&text).unwrap(), f);
        assert!(CoefficientField::from_config_block("alpha = 1\n").is_err());
        assert!(CoefficientField::from_config_block("alpha = 0\ndeltas=1\nepsilon=1").is_err());
    }

    #[test]
    fn rectangle_detection() {
        assert_eq!(LatticeSet::rectangle(1, 4, -2, 0).as_rectangle(), Some((1, 4, -2, 0)));
        let mut s = LatticeSet::rectangle(0, 3, 0, 3);
        s.remove(&(0, 0));
        assert_eq!(s.as_rectangle(), None);
    }
}
