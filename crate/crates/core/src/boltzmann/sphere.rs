//! Uniform probability `σ` on `S²`: sampling, quadrature and the sphere
//! average of functions composed with the collision map.

use rand::Rng;
use rand_distr::StandardNormal;

use super::collision::{add, collide, norm_sq, scale, sub, CollisionFrame, Vec3};
use super::montecarlo::block_rng;
use crate::error::{GeometryError, Result};

/// Uniform point on the sphere from a normalized Gaussian triple.
pub fn uniform_sphere_point<R: Rng + ?Sized>(rng: &mut R) -> CollisionFrame<f64> {
    loop {
        let d: Vec3<f64> = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        if let Ok(frame) = CollisionFrame::from_direction(d) {
            return frame;
        }
    }
}

/// How `∫ · σ(dx)` is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereQuadrature {
    /// `n` seeded uniform draws with weight `1/n`.
    MonteCarlo { n: usize, seed: u64 },
    /// Gauss–Legendre in `cos θ` times the trapezoid rule in `φ`; exact for
    /// spherical polynomials of degree below `min(2·polar, azimuthal)`.
    Product { polar: usize, azimuthal: usize },
}

/// Nodes and weights (summing to one) on `S²`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    nodes: Vec<(CollisionFrame<f64>, f64)>,
}

impl SphereRule {
    pub fn new(quadrature: SphereQuadrature) -> Result<Self> {
        let nodes = match quadrature {
            SphereQuadrature::MonteCarlo { n, seed } => {
                if n == 0 {
                    return Err(GeometryError::InvalidArgument(
                        "sphere rule needs at least one node".into(),
                    ));
                }
                let mut rng = block_rng(seed, u64::MAX);
                let w = 1.0 / n as f64;
                (0..n).map(|_| (uniform_sphere_point(&mut rng), w)).collect()
            }
            SphereQuadrature::Product { polar, azimuthal } => {
                if polar == 0 || azimuthal == 0 {
                    return Err(GeometryError::InvalidArgument(
                        "product rule needs positive node counts".into(),
                    ));
                }
                let (zs, ws) = gauss_legendre(polar);
                let mut nodes = Vec::with_capacity(polar * azimuthal);
                for (z, wz) in zs.iter().zip(&ws) {
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    for k in 0..azimuthal {
                        let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / azimuthal as f64;
                        let frame = CollisionFrame::from_direction([r * phi.cos(), r * phi.sin(), *z])?;
                        nodes.push((frame, 0.5 * wz / azimuthal as f64));
                    }
                }
                nodes
            }
        };
        Ok(Self { nodes })
    }

    /// 8 × 16 product rule, exact through degree 15.
    pub fn standard() -> Self {
        Self::new(SphereQuadrature::Product {
            polar: 8,
            azimuthal: 16,
        })
        .expect("valid product rule")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[(CollisionFrame<f64>, f64)] {
        &self.nodes
    }

    /// `∫ h(x) σ(dx)` for a function of the direction.
    pub fn integrate(&self, h: impl Fn(&Vec3<f64>) -> f64) -> f64 {
        self.nodes
            .iter()
            .map(|(x, w)| w * h(&x.direction()))
            .sum()
    }
}

/// `∫ g(v_x, w_x) σ(dx)` over collision directions.
///
/// `v_x = m + R_x z` with `m = (v+w)/2`, `z = (v−w)/2` and the reflection
/// `R_x = I − 2xx'`. Since `R_x z` is not uniform on the sphere of radius
/// `|z|` when `x` is, the result depends on the direction of `v − w` and not
/// only on the collision invariants; see [`invariant_average`].
pub fn sphere_average<G>(g: G, v: &Vec3<f64>, w: &Vec3<f64>, rule: &SphereRule) -> f64
where
    G: Fn(&Vec3<f64>, &Vec3<f64>) -> f64,
{
    rule.nodes
        .iter()
        .map(|(x, weight)| {
            let (vx, wx) = collide(v, w, x);
            weight * g(&vx, &wx)
        })
        .sum()
}

/// `∫ g(m + |z|y, m − |z|y) σ(dy)`: the average over all pairs sharing the
/// collision invariants `v + w` and `|v|² + |w|²` of `(v, w)`, which is the
/// conditional expectation of `g(V, W)` given them under `f₀ ⊗ f₀`.
pub fn invariant_average<G>(g: G, v: &Vec3<f64>, w: &Vec3<f64>, rule: &SphereRule) -> f64
where
    G: Fn(&Vec3<f64>, &Vec3<f64>) -> f64,
{
    let m = scale(&add(v, w), 0.5);
    let z = scale(&sub(v, w), 0.5);
    let r = norm_sq(&z).sqrt();
    rule.nodes
        .iter()
        .map(|(y, weight)| {
            let offset = scale(&y.direction(), r);
            weight * g(&add(&m, &offset), &sub(&m, &offset))
        })
        .sum()
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            deriv = dp;
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        deriv = if dp != 0.0 { dp } else { deriv };
        let w = 2.0 / ((1.0 - z * z) * deriv * deriv);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boltzmann::collision::dot;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (z, w) = gauss_legendre(5);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let int_z8: f64 = z.iter().zip(&w).map(|(z, w)| w * z.powi(8)).sum();
        assert!((int_z8 - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn product_rule_moments() {
        let rule = SphereRule::standard();
        assert!((rule.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!((rule.integrate(|x| x[0] * x[0]) - 1.0 / 3.0).abs() < 1e-14);
        assert!((rule.integrate(|x| x[2].powi(4)) - 0.2).abs() < 1e-14);
        assert!(rule.integrate(|x| x[0] * x[1]).abs() < 1e-15);
        assert!((rule.integrate(|x| x[0].abs()) - 0.5).abs() < 1e-2);
    }

    #[test]
    fn monte_carlo_rule_is_seeded() {
        let q = SphereQuadrature::MonteCarlo { n: 64, seed: 11 };
        let a = SphereRule::new(q).unwrap();
        let b = SphereRule::new(q).unwrap();
        assert_eq!(a.nodes()[17].0, b.nodes()[17].0);
        assert!(SphereRule::new(SphereQuadrature::MonteCarlo { n: 0, seed: 0 }).is_err());
    }

    #[test]
    fn averages_of_invariants_are_exact() {
        let rule = SphereRule::standard();
        let v = [0.3, -1.1, 2.0];
        let w = [1.5, 0.2, -0.4];
        let momentum = sphere_average(|a, b| add(a, b)[1], &v, &w, &rule);
        assert!((momentum - (v[1] + w[1])).abs() < 1e-14);
        let inner = sphere_average(dot, &v, &w, &rule);
        assert!((inner - dot(&v, &w)).abs() < 1e-13);
    }

    #[test]
    fn collision_average_is_not_a_function_of_invariants() {
        // for g(v, w) = v the average is m + z/3
        let rule = SphereRule::standard();
        let v = [1.0, 0.0, 0.0];
        let w = [-1.0, 0.0, 0.0];
        let first = sphere_average(|a, _| a[0], &v, &w, &rule);
        assert!((first - 1.0 / 3.0).abs() < 1e-14);
        // same invariants, v − w rotated to e₂
        let turned = sphere_average(|a, _| a[0], &[0.0, 1.0, 0.0], &[0.0, -1.0, 0.0], &rule);
        assert!(turned.abs() < 1e-14);
        let a = invariant_average(|a, _| a[0], &v, &w, &rule);
        let b = invariant_average(|a, _| a[0], &[0.0, 1.0, 0.0], &[0.0, -1.0, 0.0], &rule);
        assert!(a.abs() < 1e-14 && b.abs() < 1e-14);
    }

    #[test]
    fn invariant_average_of_invariants() {
        let rule = SphereRule::standard();
        let v = [0.3, -1.1, 2.0];
        let w = [1.5, 0.2, -0.4];
        let inner = invariant_average(dot, &v, &w, &rule);
        assert!((inner - dot(&v, &w)).abs() < 1e-13);
        // E|V|² given the invariants is half the total energy
        let energy = invariant_average(|a, _| dot(a, a), &v, &w, &rule);
        assert!((energy - 0.5 * (dot(&v, &v) + dot(&w, &w))).abs() < 1e-13);
    }
}
