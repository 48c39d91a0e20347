//! Weak form of the Boltzmann operator with the Maxwell kernel `|x'(v − w)|`:
//!
//! `⟨g, Q(f)/f⟩_f = E[½(g(V_X) + g(W_X) − g(V) − g(W))·|X'(V − W)|]`
//!
//! with `(V, W) ~ f ⊗ f` and `X` uniform on `S²`.

use serde::{Deserialize, Serialize};

use super::collision::{add, collide, dot, norm_sq, sub, Vec3};
use super::gibbs::{GibbsSampler, GibbsSpec};
use super::montecarlo::{estimate, MCEstimate, McRun};
use super::sphere::{sphere_average, uniform_sphere_point, SphereRule};
use crate::error::{GeometryError, Result};

/// One sample of the weak-form integrand for `(v, w, x)`.
#[inline]
fn collision_term(
    g: &impl Fn(&Vec3<f64>) -> f64,
    v: &Vec3<f64>,
    w: &Vec3<f64>,
    x: &super::collision::CollisionFrame<f64>,
) -> f64 {
    let (vx, wx) = collide(v, w, x);
    let change = (g(&vx) - g(v)) + (g(&wx) - g(w));
    0.5 * change * dot(&x.direction(), &sub(v, w)).abs()
}

/// `⟨g, Q(f)/f⟩_f` by Monte Carlo; importance weights `ω(V)ω(W)` enter
/// through a self-normalized mean.
pub fn weak_boltzmann<G>(spec: &GibbsSpec, g: G, run: &McRun) -> Result<MCEstimate>
where
    G: Fn(&Vec3<f64>) -> f64 + Sync,
{
    let sampler = GibbsSampler::new(spec)?;
    estimate(run, |rng| {
        let (v, wv) = sampler.draw(rng);
        let (w, ww) = sampler.draw(rng);
        let x = uniform_sphere_point(rng);
        (wv * ww, collision_term(&g, &v, &w, &x))
    })
}

/// `ln f` up to terms that are collision invariants: the isotropic part of
/// `B`, the linear term, the Gaussian factor and all constants drop out of
/// every summand, leaving `v'(B − tr(B)/3·I)v + Σ c_k tanh(d_k·v)`.
pub fn reduced_log_density(spec: &GibbsSpec) -> impl Fn(&Vec3<f64>) -> f64 + Sync + '_ {
    let b = spec.quadratic;
    let beta = (b[0][0] + b[1][1] + b[2][2]) / 3.0;
    let mut dev = b;
    for (i, row) in dev.iter_mut().enumerate() {
        row[i] -= beta;
    }
    move |v: &Vec3<f64>| {
        let mut q = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                if dev[i][j] != 0.0 {
                    q += v[i] * dev[i][j] * v[j];
                }
            }
        }
        q + spec
            .bounded
            .iter()
            .map(|t| t.c * dot(&t.d, v).tanh())
            .sum::<f64>()
    }
}

/// `D_{Q(f)/f} E(f) = ⟨Q(f)/f, ln f − E(f)⟩_f`, the weak form with `g = ln f`.
///
/// Non-positive for every `f`; zero exactly at Maxwellians `B = βI`.
pub fn entropy_production(spec: &GibbsSpec, run: &McRun) -> Result<MCEstimate> {
    spec.validate()?;
    weak_boltzmann(spec, reduced_log_density(spec), run)
}

/// The weak form for `g ≡ 1`; every summand is exactly zero.
pub fn q_integral_zero_check(spec: &GibbsSpec, run: &McRun) -> Result<MCEstimate> {
    weak_boltzmann(spec, |_| 1.0, run)
}

/// `E[(∫g∘A_x σ(dx) − g)(V, W)·h1(V + W)·h2(|V|² + |W|²)]` under `f₀ ⊗ f₀`.
///
/// The sphere average is the conditional expectation given the collision
/// invariants, so the estimate is consistent with zero.
pub fn conditioning_orthogonality_test<G, H1, H2>(
    g: G,
    h1: H1,
    h2: H2,
    rule: &SphereRule,
    run: &McRun,
) -> Result<MCEstimate>
where
    G: Fn(&Vec3<f64>, &Vec3<f64>) -> f64 + Sync,
    H1: Fn(&Vec3<f64>) -> f64 + Sync,
    H2: Fn(f64) -> f64 + Sync,
{
    let sampler = GibbsSampler::new(&GibbsSpec::maxwellian())?;
    estimate(run, |rng| {
        let (v, _) = sampler.draw(rng);
        let (w, _) = sampler.draw(rng);
        let residual = sphere_average(&g, &v, &w, rule) - g(&v, &w);
        let h = residual * h1(&add(&v, &w)) * h2(norm_sq(&v) + norm_sq(&w));
        (1.0, h)
    })
}

/// `coef · v₁^p₁ v₂^p₂ v₃^p₃`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: f64,
    pub pow: [u32; 3],
}

/// Test functions `g: ℝ³ → ℝ` selectable by name.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// `|v|²`, a collision invariant.
    Invariant,
    /// `v₁²`.
    V1Squared,
    /// `ln f` for the spec being estimated.
    LogDensity,
    Polynomial(Vec<Monomial>),
}

impl Observable {
    pub fn polynomial(terms: Vec<Monomial>) -> Result<Self> {
        if terms.is_empty() {
            return Err(GeometryError::InvalidArgument(
                "polynomial needs at least one monomial".into(),
            ));
        }
        if let Some(i) = terms
            .iter()
            .position(|m| !m.coef.is_finite() || m.pow.iter().any(|&p| p > 16))
        {
            return Err(GeometryError::InvalidArgument(format!(
                "monomial {i} has a non-finite coefficient or a power above 16"
            )));
        }
        Ok(Self::Polynomial(terms))
    }

    /// `⟨g, Q(f)/f⟩_f` for this observable.
    pub fn weak_boltzmann(&self, spec: &GibbsSpec, run: &McRun) -> Result<MCEstimate> {
        match self {
            Self::Invariant => weak_boltzmann(spec, norm_sq, run),
            Self::V1Squared => weak_boltzmann(spec, |v| v[0] * v[0], run),
            Self::LogDensity => entropy_production(spec, run),
            Self::Polynomial(terms) => weak_boltzmann(
                spec,
                |v| {
                    terms
                        .iter()
                        .map(|m| {
                            m.coef
                                * v[0].powi(m.pow[0] as i32)
                                * v[1].powi(m.pow[1] as i32)
                                * v[2].powi(m.pow[2] as i32)
                        })
                        .sum()
                },
                run,
            ),
        }
    }
}
