//! Synchronization on the circle `S^1`.

mod angle;
mod dynamics;
mod profile;
mod trajectory;

pub use angle::{arc_distance, max_arc_spread, order_parameter, wrap, wrap_raw, Angle, CircleSwarm};
pub use dynamics::{
    ct_rhs, ct_rhs_into, ct_rhs_projection_form, dt_step, dt_step_relative, integrate, potential_energy, v_circ,
    IntegrateSettings,
};
pub(crate) use dynamics::check_sizes;
pub use profile::{make_profile, CouplingProfile, ProfileKind};
pub use trajectory::{write_columns_csv, Trajectory, TrajectoryMeta};
