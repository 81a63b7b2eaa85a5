//! Synchronization and consensus algorithms on vector spaces and on the circle.
//!
//! The crate is organised by algorithm family:
//!
//! * [`graph`]: weighted digraphs, Laplacians, connectivity and time-varying
//!   graph schedules.
//! * [`vector_consensus`]: linear consensus on `R^n`.
//! * [`circle`]: angles, swarms on the circle, coupling profiles and the
//!   continuous/discrete synchronization laws.
//! * [`equilibria`]: critical points of the disagreement potential and
//!   their stability.
//! * [`gossip`]: randomized neighbor selection and its absorbing Markov chain.
//! * [`aux_consensus`]: synchronization through auxiliary planar variables.
//! * [`scenarios`]: canned constructions (cyclic pursuit, Vicsek flocking,
//!   Hopfield networks, ...).

pub mod aux_consensus;
pub mod circle;
pub mod equilibria;
mod error;
pub mod gossip;
pub mod graph;
pub mod ode;
pub mod scenarios;
pub mod stats;
pub mod vector_consensus;

pub use error::{Error, Result};

/// Formats a float with 17 significant digits, the precision used by every
/// CSV emitter in the crate.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}
