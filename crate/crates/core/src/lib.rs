//! Dependence of multivariate extremes.
//!
//! The toolkit works on the exponential-intensity scale: a point
//! `τ = (τ_1, …, τ_d)` with `τ_j = −log F(x_j)` stands for the marginal
//! levels `x_j`. A [`MevModel`] couples the stable tail dependence value
//! `γ(τ) = −log G(…)` of the attractor `G` with the multivariate extremal
//! index `θ(τ)`, so that the stationary maxima have limit `exp(−θ(τ)γ(τ))`.
//!
//! On top of that sit
//! - [`models`]: closed-form constructors for the max-autoregressive ±X
//!   sequence, the 3-dependent `(Z_n, Z_{n+2}, Z_{n+1})` sequence and an
//!   independent baseline;
//! - [`dependence`]: extremal and pair dependence coefficients, bounds for
//!   `θ` and for the limit df, and the independence / total dependence tests;
//! - [`simulate`] and [`estimate`]: seeded generators for the two
//!   constructions and Monte Carlo estimators (block log-ratio, runs, `γ̂`);
//! - [`verify`]: the reproduction suite behind `extremaldep verify`.

pub mod dependence;
pub mod error;
pub mod estimate;
pub mod margins;
pub mod mev;
pub mod models;
pub mod rng;
pub mod sample;
pub mod simulate;
pub mod verify;

pub use dependence::{CoefficientReport, TotalDependence, Verdict};
pub use error::{Error, Result};
pub use estimate::{EstimateResult, LevelSet};
pub use margins::{Margin, Marginal, MarginalCdf};
pub use mev::{MevModel, PartitionSpec, TauVector, ThetaRay};
pub use models::ModelSpec;
pub use sample::SampleMatrix;
pub use simulate::SeriesConfig;
