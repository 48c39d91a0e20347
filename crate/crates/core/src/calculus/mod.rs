//! Covariant calculus of scalar functionals on the exponential manifold:
//! gradients, divergences, gradient flows and second-order structure.
//!
//! On a finite sample space every smooth field is Fréchet differentiable, so
//! derivatives of gradients are always defined here. On general Orlicz spaces
//! that existence is an assumption.

mod covariant;
mod flow;

pub use covariant::covariant_derivative_product_rule_check;
pub use flow::{e_acceleration, fisher_information, gradient_flow, Trajectory, LOG_DENSITY_LIMIT};

use crate::error::Result;
use crate::manifold::{chart_inverse, cumulant, cumulant_derivatives};
use crate::scalar::Scalar;
use crate::space::{center, expect, CenteredRandomVariable, Density, RandomVariable};
use crate::transport::{duality, m_transport, PretangentVector, TangentVector};

/// Which bundle a vector field takes values in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bundle {
    Tangent,
    Pretangent,
}

/// Real function on densities together with its covariant gradient.
pub trait ScalarField<T: Scalar> {
    fn evaluate(&self, q: &Density<T>) -> Result<T>;

    /// `∇E(q)`, characterized by `D_G E(q) = E_q[∇E(q)·G(q)]`.
    fn gradient(&self, q: &Density<T>) -> Result<PretangentVector<T>>;

    /// Bundle the gradient field naturally lives in.
    fn gradient_bundle(&self) -> Bundle {
        Bundle::Pretangent
    }

    /// Gradient in the chart centered at `p`: `ᵐU_{e_p(u)}^p ∇E(e_p(u))`.
    fn chart_gradient(
        &self,
        p: &Density<T>,
        u: &CenteredRandomVariable<T>,
    ) -> Result<PretangentVector<T>> {
        let q = chart_inverse(p, u)?;
        let g = self.gradient(&q)?;
        m_transport(&q, p, &g)
    }

    /// Covariant derivative `D_G E(q) = ⟨∇E(q), G(q)⟩_q`.
    fn covariant_derivative(&self, q: &Density<T>, g: &TangentVector<T>) -> Result<T> {
        duality(q, &self.gradient(q)?, g)
    }
}

/// Field of tangent or pretangent vectors.
pub trait VectorField<T: Scalar> {
    fn bundle(&self) -> Bundle;

    /// Value at `q`, centered at `q`.
    fn at(&self, q: &Density<T>) -> Result<CenteredRandomVariable<T>>;
}

/// Relaxed expectation `q ↦ E_q[f]`.
#[derive(Debug, Clone)]
pub struct ExpectationFunctional<T> {
    f: RandomVariable<T>,
}

pub fn expectation_functional<T: Scalar>(f: RandomVariable<T>) -> ExpectationFunctional<T> {
    ExpectationFunctional { f }
}

impl<T: Scalar> ExpectationFunctional<T> {
    pub fn variable(&self) -> &RandomVariable<T> {
        &self.f
    }
}

impl<T: Scalar> ScalarField<T> for ExpectationFunctional<T> {
    fn evaluate(&self, q: &Density<T>) -> Result<T> {
        expect(q, &self.f)
    }

    fn gradient(&self, q: &Density<T>) -> Result<PretangentVector<T>> {
        center(q, &self.f).map(PretangentVector::new)
    }
}

/// Boltzmann entropy `q ↦ E_q[ln q]` (the sign convention makes it grow as
/// `q` concentrates).
#[derive(Debug, Clone, Copy, Default)]
pub struct EntropyFunctional;

pub fn entropy_functional() -> EntropyFunctional {
    EntropyFunctional
}

impl EntropyFunctional {
    /// Gradient `ln q − E(q)`, a tangent vector at `q`.
    pub fn tangent_gradient<T: Scalar>(&self, q: &Density<T>) -> Result<TangentVector<T>> {
        center(q, &q.ln()).map(TangentVector::new)
    }

    /// Tangent-bundle chart representation `ᵉU_q^p ∇E(q) = u + ln p − E(p)`;
    /// its differential in direction `v` is `v`.
    pub fn tangent_chart_representation<T: Scalar>(
        &self,
        p: &Density<T>,
        u: &CenteredRandomVariable<T>,
    ) -> Result<RandomVariable<T>> {
        let ln_p = center(p, &p.ln())?;
        u.variable().add(ln_p.variable())
    }
}

impl<T: Scalar> ScalarField<T> for EntropyFunctional {
    fn evaluate(&self, q: &Density<T>) -> Result<T> {
        expect(q, &q.ln())
    }

    fn gradient(&self, q: &Density<T>) -> Result<PretangentVector<T>> {
        center(q, &q.ln()).map(PretangentVector::new)
    }

    fn gradient_bundle(&self) -> Bundle {
        Bundle::Tangent
    }
}

/// Gradient vector field of a scalar functional.
#[derive(Debug, Clone)]
pub struct GradientField<S>(pub S);

impl<T: Scalar, S: ScalarField<T>> VectorField<T> for GradientField<S> {
    fn bundle(&self) -> Bundle {
        self.0.gradient_bundle()
    }

    fn at(&self, q: &Density<T>) -> Result<CenteredRandomVariable<T>> {
        self.0.gradient(q).map(PretangentVector::into_inner)
    }
}

/// Vector field given by a closure.
pub struct FnField<F> {
    bundle: Bundle,
    f: F,
}

impl<F> FnField<F> {
    pub fn new(bundle: Bundle, f: F) -> Self {
        Self { bundle, f }
    }
}

impl<T, F> VectorField<T> for FnField<F>
where
    T: Scalar,
    F: Fn(&Density<T>) -> Result<CenteredRandomVariable<T>>,
{
    fn bundle(&self) -> Bundle {
        self.bundle
    }

    fn at(&self, q: &Density<T>) -> Result<CenteredRandomVariable<T>> {
        (self.f)(q)
    }
}

/// Identically zero tangent field.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl<T: Scalar> VectorField<T> for ZeroField {
    fn bundle(&self) -> Bundle {
        Bundle::Tangent
    }

    fn at(&self, q: &Density<T>) -> Result<CenteredRandomVariable<T>> {
        Ok(CenteredRandomVariable::zero(q.clone()))
    }
}

/// `D(q1‖q2) = Σ q1 ln(q1/q2) μ` by direct summation.
pub fn kl_divergence<T: Scalar>(q1: &Density<T>, q2: &Density<T>) -> Result<T> {
    let log_ratio = q1.ratio(q2)?.map(|r| r.ln());
    expect(q1, &log_ratio)
}

/// Divergence of `e_p(u1)` from `e_p(u2)` in the chart centered at `p`:
/// `dK_p(u1)(u1 − u2) − (K_p(u1) − K_p(u2))`.
pub fn kl_in_chart<T: Scalar>(
    p: &Density<T>,
    u1: &CenteredRandomVariable<T>,
    u2: &CenteredRandomVariable<T>,
) -> Result<T> {
    let diff = u1.combine(T::one(), u2, -T::one())?;
    let slope = cumulant_derivatives(p, u1, &[&diff])?;
    Ok(slope - (cumulant(p, u1)? - cumulant(p, u2)?))
}

/// Gradient of `q ↦ D(q1‖q)`: `1 − q1/q`, based at `q`.
pub fn kl_partial_gradient<T: Scalar>(q1: &Density<T>, q: &Density<T>) -> Result<PretangentVector<T>> {
    let values = q1.ratio(q)?.map(|r| T::one() - r);
    Ok(PretangentVector::new(CenteredRandomVariable::from_parts_unchecked(
        q.clone(),
        values,
    )))
}

/// Mixed second covariant derivative of the divergence on the diagonal:
/// `D_{1,w1} D_{2,w2} D(q1‖q2)|_{q1=q2=q} = −E_q[w1·w2]`.
pub fn kl_mixed_second_derivative<T: Scalar>(
    q: &Density<T>,
    w1: &CenteredRandomVariable<T>,
    w2: &CenteredRandomVariable<T>,
) -> Result<T> {
    w1.base().check_base(q)?;
    w2.base().check_base(q)?;
    let prod = w1.variable().mul(w2.variable())?;
    Ok(-q.expect_values(prod.values()))
}
