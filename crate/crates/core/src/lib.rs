//! Steiner tree approximation by a two-phase greedy: a loss-contracting
//! phase producing a base tree no full component can improve, followed by a
//! relative greedy driven by the load/Ψ criterion against twin trees.

pub mod bench;
pub mod bounds;
pub mod components;
pub mod error;
pub mod exact;
pub mod generate;
pub mod graph;
pub mod phase1;
pub mod phase2;
pub mod ratio;
pub mod solve;
pub mod stp;

pub use error::{Result, SteinerError};
