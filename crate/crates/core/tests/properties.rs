use latticeflow::lattice::{boundary_length, discrete_distance_field, geometric_boundary_distance, perimeter_energy};
use latticeflow::oracle::{brute_force_step, minimal_scan_bound};
use latticeflow::rational::{big, big_to_f64, frac, from_f64, int, BigRational};
use latticeflow::{
    evolve_discrete, evolve_ode, BranchPolicy, CoefficientField, LatticeSet, MultiLayerParams, OdeOptions, Rational,
    RectangleState, SideLawParams, TiePolicy, VelocityLaw, Window,
};
use proptest::prelude::*;

fn rational(max_num: i128, max_den: i128) -> impl Strategy<Value = Rational> {
    (1..=max_num, 1..=max_den).prop_map(|(p, q)| frac(p, q))
}

fn contrast() -> impl Strategy<Value = Rational> {
    (0..=12i128).prop_map(|k| frac(k, 10))
}

fn side_law() -> impl Strategy<Value = SideLawParams> {
    (rational(4, 2), rational(4, 2), contrast()).prop_map(|(a, g, d)| SideLawParams::new(a, g, d).unwrap())
}

fn small_set() -> impl Strategy<Value = LatticeSet> {
    prop::collection::vec((-3i64..4, -3i64..4), 1..20).prop_map(|cells| {
        let mut s = LatticeSet::new();
        for c in cells {
            s.insert(c);
        }
        s
    })
}

fn field() -> impl Strategy<Value = CoefficientField> {
    (rational(3, 2), prop::collection::vec(contrast(), 1..=3), (1..=10i128))
        .prop_map(|(a, d, n)| CoefficientField::new(a, d, frac(1, n)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn perimeter_dominates_background_length(set in small_set(), f in field()) {
        prop_assert!(perimeter_energy(&set, &f) >= f.alpha() * boundary_length(&set, f.epsilon()));
    }

    #[test]
    fn perimeter_is_periodic(set in small_set(), f in field(), horizontal in any::<bool>()) {
        let p = f.period();
        let shifted = set.translate(if horizontal { (p, 0) } else { (0, p) });
        prop_assert_eq!(perimeter_energy(&set, &f), perimeter_energy(&shifted, &f));
    }

    #[test]
    fn discrete_distance_is_geometric_plus_half(set in small_set(), n in 1..=10i128) {
        let eps = frac(1, n);
        let window = Window::new((-4, -4), (4, 4));
        let field = discrete_distance_field(&set, &window, eps).unwrap();
        for (i, d) in field {
            let geometric = geometric_boundary_distance(&set, i).unwrap() * eps;
            prop_assert_eq!(d, geometric + eps / int(2));
        }
    }

    #[test]
    fn closed_form_matches_orbit(p in side_law(), y in rational(200, 37)) {
        prop_assume!(!p.is_singular(y));
        prop_assert_eq!(p.effective_velocity(y).unwrap(), p.velocity_closed_form(y).unwrap());
        let scan = brute_force_step(y, &p, minimal_scan_bound(&p, y)).unwrap();
        prop_assert_eq!(scan.unique(), Some(p.optimal_step(y).unwrap()));
    }

    #[test]
    fn velocity_is_asymptotically_linear(p in side_law(), y in rational(200, 37)) {
        prop_assume!(!p.is_singular(y));
        let f = int(p.velocity_closed_form(y).unwrap() as i128);
        let c = (p.delta() * p.gamma()).min(frac(1, 2));
        prop_assert!(latticeflow::rational::abs(f - int(2) * p.alpha() * y) <= int(1) + c);
    }

    #[test]
    fn velocity_is_monotone(p in side_law(), a in rational(200, 37), b in rational(200, 37)) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assume!(!p.is_singular(lo) && !p.is_singular(hi));
        prop_assert!(p.velocity_closed_form(lo).unwrap() <= p.velocity_closed_form(hi).unwrap());
    }

    #[test]
    fn zero_velocity_exactly_below_pinning(p in side_law(), y in rational(200, 37)) {
        prop_assume!(!p.is_singular(y));
        let pinned = y < p.gamma() / p.pinning_threshold();
        prop_assert_eq!(p.velocity_closed_form(y).unwrap() == 0, pinned);
    }

    #[test]
    fn velocity_depends_on_alpha_y_only(p in side_law(), y in rational(100, 37), s in rational(4, 3)) {
        prop_assume!(!p.is_singular(y));
        let scaled = SideLawParams::new(s * p.alpha(), p.gamma(), p.delta()).unwrap();
        prop_assert_eq!(p.velocity_closed_form(y).unwrap(), scaled.velocity_closed_form(y / s).unwrap());
    }

    #[test]
    fn one_layer_multilayer_is_the_side_law(p in side_law(), y in rational(200, 37)) {
        let m = MultiLayerParams::new(p.alpha(), p.gamma(), vec![p.delta()]).unwrap();
        prop_assert_eq!(m.singular_set(int(6)), p.singular_set(int(6)));
        prop_assume!(!p.is_singular(y));
        prop_assert_eq!(m.velocity_closed_form_k(y).unwrap(), p.velocity_closed_form(y).unwrap());
    }

    #[test]
    fn multilayer_closed_form_matches_orbit(
        deltas in prop::collection::vec(contrast(), 2..=3),
        y in rational(120, 29),
    ) {
        let m = MultiLayerParams::new(int(1), int(1), deltas).unwrap();
        prop_assume!(!m.is_singular(y));
        prop_assert_eq!(m.effective_velocity_k(y).unwrap(), m.velocity_closed_form_k(y).unwrap());
    }
}

/// `−(2/γ) f(γ/L)` on the upper branch. The value is read at the midpoint of
/// the plateau containing `γ/L` so that no large denominators reach the
/// closed form. A length sitting on a breakpoint (a pinned side) takes the
/// plateau above it.
fn rate(p: &SideLawParams, length: &BigRational) -> Rational {
    let y = big(&p.gamma()) / length;
    let approx = from_f64(big_to_f64(&y)).unwrap();
    let mut edges = vec![int(0)];
    edges.extend(p.breakpoints_between(int(0), approx + int(2) / p.alpha()));
    let hi = edges.iter().position(|b| big(b) > y).unwrap();
    let (lo, hi) = (edges[hi - 1], edges[hi]);
    -int(2) / p.gamma() * int(p.velocity((lo + hi) / int(2)).unwrap() as i128)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn discrete_flow_is_nested_and_bracketed(
        p in side_law(),
        w in 4i64..60,
        h in 4i64..60,
        n in 10i128..60,
    ) {
        let eps = frac(1, n);
        let start = RectangleState::centered(w, h).unwrap();
        let traj = evolve_discrete(start, &p, eps, int(1), TiePolicy::LargerStep).unwrap();
        for (k, pair) in traj.states.windows(2).enumerate() {
            let (prev, next) = (pair[0], pair[1]);
            prop_assert!(prev.contains(&next) || !next.is_alive());
            if !next.is_alive() {
                break;
            }
            // each side's step lies in the envelope at its own length
            let (l1, l2) = traj.lengths(k);
            let moves = prev.displacement_to(&next);
            for (side, length) in [(0, l2), (1, l2), (2, l1), (3, l1)] {
                let (lo, hi) = p.envelope(p.gamma() / length);
                let m = moves[side] as u64;
                prop_assert!(lo <= m && m <= hi, "side {} moved {} outside [{}, {}]", side, m, lo, hi);
            }
        }
        if traj.is_stalled() {
            let (l1, l2) = traj.lengths(traj.states.len() - 1);
            prop_assert_eq!(p.optimal_step(p.gamma() / l1).ok(), Some(0));
            prop_assert_eq!(p.optimal_step(p.gamma() / l2).ok(), Some(0));
        }
    }

    #[test]
    fn square_symmetry(p in side_law(), w in 4i64..80, n in 10i128..60) {
        let eps = frac(1, n);
        let traj = evolve_discrete(RectangleState::centered(w, w).unwrap(), &p, eps, int(1), TiePolicy::SmallerStep).unwrap();
        prop_assert!(traj.states.iter().all(|s| s.width() == s.height()));
        let l = int(w as i128) * eps;
        let ode = evolve_ode(l, l, &p, &OdeOptions::new(int(1), BranchPolicy::Upper)).unwrap();
        prop_assert!(ode.samples().iter().all(|(_, a, b)| a == b));
    }

    #[test]
    fn ode_slopes_follow_the_velocity(p in side_law(), l1 in rational(40, 20), l2 in rational(40, 20)) {
        let ode = evolve_ode(l1, l2, &p, &OdeOptions::new(int(1), BranchPolicy::Upper)).unwrap();
        for s in ode.segments.iter().filter(|s| !s.extrapolated && s.t1 > s.t0) {
            let mid = (&s.t0 + &s.t1) / big(&int(2));
            let (a, b) = ode.lengths_at(&mid);
            prop_assert!(a <= s.l1 && b <= s.l2);
            prop_assert_eq!(s.slope1, rate(&p, &b));
            prop_assert_eq!(s.slope2, rate(&p, &a));
        }
        let samples = ode.samples();
        prop_assert!(samples.windows(2).all(|w| w[1].1 <= w[0].1 && w[1].2 <= w[0].2));
        prop_assert!(samples.iter().all(|(t, _, _)| *t >= big(&int(0))));
    }
}
