//! Perturbations `f = e^{u − K₀(u)}·f₀` of the standard normal density on ℝ³
//! with `u(v) = a·v + v'Bv + Σ c_k tanh(d_k·v)`.
//!
//! The quadratic part keeps `f` Gaussian, `N((I−2B)⁻¹a, (I−2B)⁻¹)`, which gives
//! an exact sampler and normalizer. The bounded tanh terms are handled by
//! self-normalized importance weights against that Gaussian.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::collision::{dot, norm_sq, Vec3};
use super::montecarlo::{block_rng, estimate, MCEstimate, McRun};
use crate::error::{GeometryError, Result};

/// Largest admissible eigenvalue of `B` is `1/2 − SPECTRAL_MARGIN`.
pub const SPECTRAL_MARGIN: f64 = 1e-6;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedTerm {
    pub c: f64,
    pub d: Vec3<f64>,
}

/// Parameters `(a, B, {(c_k, d_k)})` of the log-perturbation `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsSpec {
    #[serde(default)]
    pub linear: Vec3<f64>,
    #[serde(default)]
    pub quadratic: [[f64; 3]; 3],
    #[serde(default)]
    pub bounded: Vec<BoundedTerm>,
}

impl Default for GibbsSpec {
    fn default() -> Self {
        Self::maxwellian()
    }
}

impl GibbsSpec {
    /// `u = 0`: the standard Maxwellian `f₀`.
    pub fn maxwellian() -> Self {
        Self {
            linear: [0.0; 3],
            quadratic: [[0.0; 3]; 3],
            bounded: Vec::new(),
        }
    }

    pub fn gaussian(linear: Vec3<f64>, quadratic: [[f64; 3]; 3]) -> Self {
        Self {
            linear,
            quadratic,
            bounded: Vec::new(),
        }
    }

    pub fn diagonal(diag: Vec3<f64>) -> Self {
        let mut quadratic = [[0.0; 3]; 3];
        for i in 0..3 {
            quadratic[i][i] = diag[i];
        }
        Self::gaussian([0.0; 3], quadratic)
    }

    pub fn with_bounded(mut self, c: f64, d: Vec3<f64>) -> Self {
        self.bounded.push(BoundedTerm { c, d });
        self
    }

    /// Symmetric `B` with every eigenvalue below `1/2 − SPECTRAL_MARGIN`.
    pub fn validate(&self) -> Result<()> {
        let finite = self.linear.iter().all(|x| x.is_finite())
            && self.quadratic.iter().flatten().all(|x| x.is_finite())
            && self
                .bounded
                .iter()
                .all(|t| t.c.is_finite() && t.d.iter().all(|x| x.is_finite()));
        if !finite {
            return Err(GeometryError::InvalidArgument(
                "spec contains non-finite entries".into(),
            ));
        }
        let b = self.quadratic;
        for i in 0..3 {
            for j in 0..i {
                let scale = b[i][j].abs().max(b[j][i].abs()).max(1.0);
                if (b[i][j] - b[j][i]).abs() > 1e-12 * scale {
                    return Err(GeometryError::InvalidArgument(
                        "quadratic form must be symmetric".into(),
                    ));
                }
            }
        }
        let top = self
            .quadratic_matrix()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let bound = 0.5 - SPECTRAL_MARGIN;
        if top >= bound {
            return Err(GeometryError::SpectralBound {
                eigenvalue: top,
                bound,
            });
        }
        Ok(())
    }

    fn quadratic_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.quadratic[i][j])
    }

    /// `u(v)`.
    pub fn log_tilt(&self, v: &Vec3<f64>) -> f64 {
        self.quadratic_part(v) + self.bounded_part(v)
    }

    fn quadratic_part(&self, v: &Vec3<f64>) -> f64 {
        let b = &self.quadratic;
        let mut q = dot(&self.linear, v);
        for i in 0..3 {
            for j in 0..3 {
                q += v[i] * b[i][j] * v[j];
            }
        }
        q
    }

    fn bounded_part(&self, v: &Vec3<f64>) -> f64 {
        self.bounded.iter().map(|t| t.c * dot(&t.d, v).tanh()).sum()
    }

    /// `ln f(v) + K₀(u)`, i.e. the log-density without its normalizing constant.
    pub fn unnormalized_log_density(&self, v: &Vec3<f64>) -> f64 {
        self.log_tilt(v) - 0.5 * norm_sq(v) - 1.5 * LN_2PI
    }

    pub fn is_gaussian(&self) -> bool {
        self.bounded.iter().all(|t| t.c == 0.0)
    }

    /// Mean and covariance of the Gaussian part.
    pub fn gaussian_moments(&self) -> Result<(Vec3<f64>, [[f64; 3]; 3])> {
        let g = GaussianPart::new(self)?;
        let m = g.mean;
        Ok((
            [m[0], m[1], m[2]],
            [[g.cov[(0, 0)], g.cov[(0, 1)], g.cov[(0, 2)]],
             [g.cov[(1, 0)], g.cov[(1, 1)], g.cov[(1, 2)]],
             [g.cov[(2, 0)], g.cov[(2, 1)], g.cov[(2, 2)]]],
        ))
    }

    /// `½ a'(I−2B)⁻¹a − ½ log det(I−2B)`, the normalizer of the Gaussian part.
    pub fn gaussian_log_normalizer(&self) -> Result<f64> {
        let g = GaussianPart::new(self)?;
        let a = Vector3::from(self.linear);
        Ok(0.5 * a.dot(&g.mean) - 0.5 * g.precision_log_det)
    }
}

/// `N(m, Σ)` with `Σ = (I − 2B)⁻¹`, `m = Σa`, and a Cholesky factor of `Σ`.
#[derive(Debug, Clone)]
pub(crate) struct GaussianPart {
    mean: Vector3<f64>,
    cov: Matrix3<f64>,
    chol: Matrix3<f64>,
    precision_log_det: f64,
}

impl GaussianPart {
    pub(crate) fn new(spec: &GibbsSpec) -> Result<Self> {
        spec.validate()?;
        let precision = Matrix3::identity() - spec.quadratic_matrix() * 2.0;
        let precision_chol = precision
            .cholesky()
            .ok_or_else(|| GeometryError::InvalidArgument("I − 2B is not positive definite".into()))?;
        let precision_log_det = 2.0 * precision_chol.l().diagonal().map(f64::ln).sum();
        let cov = precision_chol.inverse();
        let chol = cov
            .cholesky()
            .ok_or_else(|| GeometryError::InvalidArgument("covariance is not positive definite".into()))?
            .l();
        let mean = cov * Vector3::from(spec.linear);
        Ok(Self {
            mean,
            cov,
            chol,
            precision_log_det,
        })
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec3<f64> {
        let z = Vector3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let v = self.mean + self.chol * z;
        [v[0], v[1], v[2]]
    }
}

/// Draws from `f` for one spec: Gaussian proposal plus unnormalized weight.
#[derive(Debug, Clone)]
pub struct GibbsSampler {
    spec: GibbsSpec,
    gaussian: GaussianPart,
}

impl GibbsSampler {
    pub fn new(spec: &GibbsSpec) -> Result<Self> {
        Ok(Self {
            gaussian: GaussianPart::new(spec)?,
            spec: spec.clone(),
        })
    }

    pub fn spec(&self) -> &GibbsSpec {
        &self.spec
    }

    /// `(v, ω(v))` with `ω = exp(Σ c_k tanh(d_k·v))`, identically 1 for Gaussian specs.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec3<f64>, f64) {
        let v = self.gaussian.draw(rng);
        let w = if self.spec.bounded.is_empty() {
            1.0
        } else {
            self.spec.bounded_part(&v).exp()
        };
        (v, w)
    }
}

/// Seeded draws from `f` with importance weights normalized to mean one.
#[derive(Debug, Clone)]
pub struct VelocitySample {
    pub points: Vec<(Vec3<f64>, f64)>,
    pub seed: u64,
    pub target: GibbsSpec,
}

impl VelocitySample {
    /// Weighted sample mean of `h`.
    pub fn mean_of(&self, h: impl Fn(&Vec3<f64>) -> f64) -> f64 {
        let n = self.points.len() as f64;
        self.points.iter().map(|(v, w)| w * h(v)).sum::<f64>() / n
    }
}

pub fn sample_velocities(spec: &GibbsSpec, n: usize, seed: u64) -> Result<VelocitySample> {
    if n == 0 {
        return Err(GeometryError::InvalidArgument(
            "sample count must be at least 1".into(),
        ));
    }
    let sampler = GibbsSampler::new(spec)?;
    let mut rng = block_rng(seed, 0);
    let mut points: Vec<(Vec3<f64>, f64)> = (0..n).map(|_| sampler.draw(&mut rng)).collect();
    let mean_weight = points.iter().map(|p| p.1).sum::<f64>() / n as f64;
    for p in &mut points {
        p.1 /= mean_weight;
    }
    Ok(VelocitySample {
        points,
        seed,
        target: spec.clone(),
    })
}

/// `K₀(u) = log ∫ e^{u} f₀`.
///
/// Exact (with `stderr = 0` and `n = 0`) when the spec has no bounded terms;
/// otherwise the Gaussian normalizer plus the log of an importance-sampling
/// estimate of `E[ω]`, with a delta-method standard error.
pub fn gibbs_normalizer(spec: &GibbsSpec, run: &McRun) -> Result<MCEstimate> {
    let gaussian = spec.gaussian_log_normalizer()?;
    if spec.is_gaussian() {
        return Ok(MCEstimate {
            mean: gaussian,
            stderr: 0.0,
            n: 0,
        });
    }
    let sampler = GibbsSampler::new(spec)?;
    let moment = estimate(run, |rng| (1.0, sampler.draw(rng).1))?;
    Ok(MCEstimate {
        mean: gaussian + moment.mean.ln(),
        stderr: moment.stderr / moment.mean,
        n: moment.n,
    })
}
