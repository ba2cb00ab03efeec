//! Comparison methods.

pub mod dinkelbach;
pub mod divergence;
pub mod sart;

pub use dinkelbach::{dinkelbach_run, dinkelbach_subproblem, DinkelbachConfig};
pub use divergence::{divergence_harness, DivergenceRun};
pub use sart::{sart_run, SartRun};
