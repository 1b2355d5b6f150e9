//! Motion of discrete interfaces in a two-dimensional low-contrast periodic
//! lattice medium.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: the periodic bond field, the ferromagnetic perimeter, the
//!   discrete ℓ∞ distance and the implicit (minimizing-movement) functional on
//!   explicit lattice sets;
//! * [`side_law`]: the one-dimensional law of a single side for one contrast
//!   parameter: step cost, optimal step, singular set, thresholds, orbits and
//!   the effective velocity in orbit and closed form;
//! * [`multilayer`]: the same law for `K` contrast parameters arranged in
//!   periodic layers;
//! * [`flow`]: discrete flat flow of coordinate rectangles and the
//!   homogenized ODE system, integrated event by event;
//! * [`oracle`]: brute-force validators used to certify the closed forms.
//!
//! All breakpoint arithmetic is exact ([`Rational`]); floats only appear at
//! export time.

pub mod error;
pub mod flow;
pub mod lattice;
pub mod multilayer;
pub mod oracle;
pub mod rational;
pub mod side_law;
pub mod svg;
pub mod table;
pub mod validation;

pub use error::{Error, Result};
pub use flow::{
    compare_flows, evolve_discrete, evolve_ode, extinction_time, BranchPolicy, DiscreteTrajectory,
    Extinction, OdeOptions, OdeTrajectory, RectangleState, TiePolicy,
};
pub use lattice::{CoefficientField, LatticeSet, Window};
pub use multilayer::MultiLayerParams;
pub use rational::{parse_rational, Rational};
pub use side_law::{Orbit, SideLawParams, VelocityLaw};
pub use table::VelocityTable;
