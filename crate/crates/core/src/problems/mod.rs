//! Instance constructors.

pub mod ct;
pub mod divergence;
pub mod sharp_ratio;
pub mod toy;

pub use ct::{discrete_gradient, make_ct_problem, parallel_beam_projector, shepp_logan, CtInstance};
pub use divergence::make_divergence_instance;
pub use sharp_ratio::{make_sharp_ratio, SharpRatioInstance};
pub use toy::make_toy_recovery;
