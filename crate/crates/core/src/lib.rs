//! Scheduling of quantum circuits onto a neutral-atom device with one
//! Rydberg channel and one Raman channel.

pub mod bench;
pub mod circuit;
pub mod cli;
pub mod device;
pub mod error;
pub mod gate_level;
pub mod pulse;
pub mod render;
pub mod sequence;
pub mod tick;
pub mod transpile;
pub mod verify;

pub use error::{Error, Result};
