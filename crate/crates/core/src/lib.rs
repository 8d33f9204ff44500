//! Analysis and simulation library for power-adaptive network coding (PANC)
//! over a two-source multiple-access relay channel.
//!
//! The library is organized bottom-up:
//!
//! - [`special`]: scalar Gaussian tail machinery (one- and two-argument Q
//!   functions, bivariate orthant probabilities, a planar Gaussian region
//!   integrator, and a symmetric 2x2 eigensolver).
//! - [`geometry`]: received constellations at relay and destination, the
//!   mislabeled points produced by relay detection errors, and the Voronoi
//!   cell structure of four-point constellations.
//! - [`wedge`]: closed-form probabilities that a correlated Gaussian sample
//!   lands in a wedge, band, or general Voronoi cell.
//! - [`sper`]: exact symbol-pair error rate assembled from relay level
//!   distributions and destination cell probabilities.
//! - [`transform`]: the linear coordinate transform that maps the relay
//!   parallelogram onto a rectangle, and the detector built on it.
//! - [`power`]: relay power scaling, closed-form forwarding-amplitude
//!   optimizers, and grid-search oracles for them.
//! - [`monte_carlo`]: deterministic, reproducible link-level simulation of
//!   PANC and the baseline schemes.
//! - [`asymptotic`]: high-SNR channel averages, pairwise error coefficients,
//!   and diversity-order estimation.
//! - [`experiment`]: presets, configuration, sweep orchestration, and CSV /
//!   gnuplot output.

pub mod asymptotic;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod monte_carlo;
pub mod power;
pub mod special;
pub mod sper;
pub mod transform;
pub mod wedge;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
