//! Particle dynamics on non-negative patterns: the discrete-time model with
//! geometric jumps, the continuous-time model with unit jumps, and the
//! generator of the latter's top row.

pub mod ctmc;
pub mod discrete;
pub mod generator;
pub mod noise;
pub mod step;

pub use ctmc::{apply_event, ctmc_final_states, ctmc_simulate, estimate_rate, CtmcEvent, CtmcPath, Direction, RateEstimate};
pub use discrete::{map_paths, path_rng, simulate_discrete, DiscreteModel, Trajectory, TrajectoryStore};
pub use generator::{generator_rate, generator_semigroup_law};
pub use noise::{GeometricSampler, NoiseDraw, SamplerMode};
pub use step::{discrete_step, discrete_step_traced, full_step_right, half_step_left, HalfStepState};
