//! Canned constructions: cyclic pursuit, periodic and quasi-periodic
//! motions, Vicsek flocking and the Hopfield analog on two points.

mod hopfield;
mod registry;
mod vicsek;

pub use hopfield::{hopfield_energy, hopfield_step, spin_to_angle, angle_to_spin, SpinState};
pub use registry::{make_scenario, Scenario, ScenarioKind, ScenarioParams, DEFAULT_CROSS_WEIGHT};
pub use vicsek::{
    default_ring_radius, feasible_ring_radius, run_divergence, vicsek_divergence_setup, vicsek_step, DivergenceOutcome,
    VicsekState,
};
