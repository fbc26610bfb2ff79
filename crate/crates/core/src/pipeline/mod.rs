//! End-to-end assembly: heat-propagate `u_w`, sample `w` and `f = u_w × w`,
//! solve the forced rotation system at every grid point for `u_p`, assemble
//! `u = u_p + u_w` and the pressure gradient.

mod config;
mod initial;
mod run;

pub use config::{GammaMode, PointSolver, ScenarioConfig, UpGenerator, UwGenerator};
pub use initial::{abc_field, generate_initial, random_bandlimited, taylor_green, InitialData};
pub use run::{
    run, run_with_initial, PointFailure, Snapshot, SolutionBundle, Timings, FAILURE_FRACTION_LIMIT,
};
