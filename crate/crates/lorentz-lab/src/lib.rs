//! Uniform sampling, exact volumes and limit-law experiments for
//! finite-dimensional Lorentz balls `ℬ_{q,1}^n`.
//!
//! The crate has four layers:
//!
//! * closed-form quantities: weight sums `κ_q`, Lorentz/`ℓ_r` norms, exact
//!   volumes, the limit law `ν_{q,1}`, centering and threshold constants
//!   ([`kappa`], [`norms`], [`volume`], [`limit_law`], [`constants`]);
//! * exact O(n)-per-row sampling of the uniform distribution on the ball,
//!   with a rejection oracle for small dimensions ([`sampler`], [`rng`]);
//! * statistical experiments verifying the limit theorems on sampled data
//!   ([`gof`], [`experiments`]);
//! * a shooting solver for the conjectured limit-density ODE at general
//!   `1 <= p <= q` ([`ode`]).
//!
//! See the `examples/` directory for one runnable example per capability and
//! the `lorentz-lab` binary for a subcommand front end.

pub mod acceptance;
pub mod constants;
pub mod error;
pub mod experiments;
pub mod gamma;
pub mod gof;
pub mod kappa;
pub mod limit_law;
pub mod norms;
pub mod ode;
pub mod plot;
pub mod quad;
pub mod qindex;
pub mod rng;
pub mod sampler;
pub mod volume;

pub use error::{Error, Result};
pub use qindex::{ExtReal, QIndex};
