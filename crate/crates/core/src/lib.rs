//! Exponential-manifold geometry on finite sample spaces.
//!
//! Densities live on a finite set with a reference measure `μ`. The crate
//! provides Orlicz model spaces, the exponential charts `s_p`/`e_p` with the
//! cumulant functional `K_p`, the e-, m- and isometric transports, gradient
//! flows and KL calculus, and a Monte Carlo weak form of the Boltzmann
//! collision operator on ℝ³.
//!
//! The finite-space modules are generic over [`Scalar`] (`f32`, `f64`); the
//! aliases below fix the precision.

pub mod boltzmann;
pub mod calculus;
pub mod error;
pub mod manifold;
pub mod scalar;
pub mod space;
pub mod transport;
pub mod young;

pub use error::{GeometryError, Result};
pub use scalar::Scalar;
pub use space::{
    center, central_moments, covariance, expect, CenteredRandomVariable, Density, FiniteSampleSpace, RandomVariable,
    VectorJson,
};

pub type Space64 = FiniteSampleSpace<f64>;
pub type Density64 = Density<f64>;
pub type Variable64 = RandomVariable<f64>;
pub type Centered64 = CenteredRandomVariable<f64>;
pub type Space32 = FiniteSampleSpace<f32>;
pub type Density32 = Density<f32>;
pub type Variable32 = RandomVariable<f32>;
pub type Centered32 = CenteredRandomVariable<f32>;
