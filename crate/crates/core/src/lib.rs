//! Population-game model of innovation and imitation driven by product diversity.
//!
//! The crate is organised bottom-up:
//!
//! - [`diversity`]: attribute weights, the diversity of technology sets and
//!   pairwise dissimilarities.
//! - [`game`]: symmetric 2×2 population games, interior equilibria and the
//!   ESS classification.
//! - [`dynamics`]: revision protocols (PPI, Smith, BNN), the two-strategy mean
//!   dynamic, an RK4 integrator and an exact finite-population simulator.
//! - [`schumpeter`]: the innovate/refrain game built from market parameters,
//!   its closed-form polymorphic state and comparative statics.
//! - [`io`]: scenario files, CSV output and run records used by the CLI.

pub mod diversity;
pub mod dynamics;
pub mod error;
pub mod game;
pub mod io;
pub mod schumpeter;

pub use diversity::{Attribute, Consumer, ConsumerPanel, DiversityModel, Technology};
pub use dynamics::{
    advance, converged_state, integrate, mean_field_rhs, simulate_finite_population, switch_rate,
    AgentPopulation, Protocol, RunKind, Trajectory, TrajectoryMeta,
};
pub use error::{Error, Result};
pub use game::{Basin, EssCheck, EssClassification, GameKind, GameMatrix, PopulationState, Strategy};
pub use schumpeter::{
    gamma, gamma_gradient, in_domain, params_from_diversity, sweep, MarketValueMap,
    SchumpeterParams, SchumpeterianState, SweepResult, SweepRow,
};
