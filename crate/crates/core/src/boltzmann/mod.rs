//! Spatially homogeneous Boltzmann operator with Maxwell kernel, for densities
//! in the exponential family around the standard normal `f₀` on ℝ³.
//!
//! Everything here is `f64`: sampling and the Gaussian linear algebra are
//! double precision throughout. The collision map itself is generic.

pub mod collision;
pub mod gibbs;
pub mod montecarlo;
pub mod sphere;
pub mod weak;

pub use collision::{collide, collision_matrix, determinant, CollisionFrame, Vec3};
pub use gibbs::{gibbs_normalizer, sample_velocities, BoundedTerm, GibbsSampler, GibbsSpec, VelocitySample};
pub use montecarlo::{estimate, MCEstimate, McRun};
pub use sphere::{invariant_average, sphere_average, uniform_sphere_point, SphereQuadrature, SphereRule};
pub use weak::{
    conditioning_orthogonality_test, entropy_production, q_integral_zero_check, weak_boltzmann, Monomial,
    Observable,
};
