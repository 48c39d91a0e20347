//! Exponential charts `s_p`, `e_p`, the cumulant functional `K_p` and its
//! derivatives.
//!
//! On a finite sample space `E_p[e^u]` is a finite sum for every `u`, so the
//! domain of `K_p` is the whole centered space and every strictly positive
//! density lies in the maximal exponential model of every other one.
//! Derivatives are computed exactly as moments of the tilted density
//! `q = e_p(u)`; numerical differentiation only appears in tests.

use crate::error::{GeometryError, Result};
use crate::scalar::Scalar;
use crate::space::{
    log_sum_exp, CenteredRandomVariable, Density, RandomVariable,
};
use crate::transport::PretangentVector;

/// A point of the manifold in the chart centered at `base`.
#[derive(Debug, Clone)]
pub struct ChartPoint<T> {
    coordinate: CenteredRandomVariable<T>,
}

impl<T: Scalar> ChartPoint<T> {
    pub fn new(coordinate: CenteredRandomVariable<T>) -> Self {
        Self { coordinate }
    }

    /// Chart coordinate of `q` relative to `base`.
    pub fn of(base: &Density<T>, q: &Density<T>) -> Result<Self> {
        chart(base, q).map(Self::new)
    }

    pub fn base(&self) -> &Density<T> {
        self.coordinate.base()
    }

    pub fn coordinate(&self) -> &CenteredRandomVariable<T> {
        &self.coordinate
    }

    pub fn density(&self) -> Density<T> {
        tilt(self.coordinate.base(), self.coordinate.values())
    }

    pub fn cumulant(&self) -> T {
        log_mgf(self.coordinate.base(), self.coordinate.values())
    }
}

/// `log E_p[e^u]` for an arbitrary (not necessarily centered) vector.
pub(crate) fn log_mgf<T: Scalar>(p: &Density<T>, u: &[T]) -> T {
    let logs: Vec<T> = u
        .iter()
        .zip(p.values())
        .map(|(&x, &v)| x + v.ln())
        .collect();
    log_sum_exp(p.space().weights(), &logs)
}

/// `e^{u − log E_p e^u}·p`.
pub(crate) fn tilt<T: Scalar>(p: &Density<T>, u: &[T]) -> Density<T> {
    let k = log_mgf(p, u);
    let values = u
        .iter()
        .zip(p.values())
        .map(|(&x, &v)| (x - k).exp() * v)
        .collect();
    Density::from_parts_unchecked(p.space().clone(), values)
}

fn check_coordinate<T: Scalar>(p: &Density<T>, u: &CenteredRandomVariable<T>) -> Result<()> {
    u.base().check_base(p)
}

/// Cumulant generating functional `K_p(u) = log E_p[e^u]`.
pub fn cumulant<T: Scalar>(p: &Density<T>, u: &CenteredRandomVariable<T>) -> Result<T> {
    check_coordinate(p, u)?;
    Ok(log_mgf(p, u.values()))
}

/// Inverse chart `e_p(u) = e^{u − K_p(u)}·p`.
pub fn chart_inverse<T: Scalar>(p: &Density<T>, u: &CenteredRandomVariable<T>) -> Result<Density<T>> {
    check_coordinate(p, u)?;
    Ok(tilt(p, u.values()))
}

/// Chart `s_p(q) = ln(q/p) − E_p[ln(q/p)]`.
pub fn chart<T: Scalar>(p: &Density<T>, q: &Density<T>) -> Result<CenteredRandomVariable<T>> {
    p.space().check_same(q.space())?;
    let log_ratio: Vec<T> = q
        .values()
        .iter()
        .zip(p.values())
        .map(|(&a, &b)| a.ln() - b.ln())
        .collect();
    let e = p.expect_values(&log_ratio);
    Ok(CenteredRandomVariable::from_parts_unchecked(
        p.clone(),
        RandomVariable::from_parts_unchecked(
            p.space().clone(),
            log_ratio.into_iter().map(|x| x - e).collect(),
        ),
    ))
}

/// `d^k K_p(u)(v_1, …, v_k)` for `k = 1, 2, 3`: mean, covariance and third
/// joint central moment of the directions under `q = e_p(u)`.
pub fn cumulant_derivatives<T: Scalar>(
    p: &Density<T>,
    u: &CenteredRandomVariable<T>,
    dirs: &[&CenteredRandomVariable<T>],
) -> Result<T> {
    if !(1..=3).contains(&dirs.len()) {
        return Err(GeometryError::Arity {
            expected: "1 to 3",
            found: dirs.len(),
        });
    }
    check_coordinate(p, u)?;
    for d in dirs {
        check_coordinate(p, d)?;
    }
    let q = tilt(p, u.values());
    if let [v] = dirs {
        return Ok(q.expect_values(v.values()));
    }
    let centered: Vec<Vec<T>> = dirs
        .iter()
        .map(|d| {
            let m = q.expect_values(d.values());
            d.values().iter().map(|&x| x - m).collect()
        })
        .collect();
    let product: Vec<T> = (0..p.len())
        .map(|i| centered.iter().fold(T::one(), |acc, c| acc * c[i]))
        .collect();
    Ok(q.expect_values(&product))
}

/// Transition map `s_q ∘ e_p`: `u ↦ u − E_q[u] + ln(p/q) − E_q[ln(p/q)]`.
pub fn transition_map<T: Scalar>(
    p: &Density<T>,
    q: &Density<T>,
    u: &CenteredRandomVariable<T>,
) -> Result<CenteredRandomVariable<T>> {
    p.space().check_same(q.space())?;
    check_coordinate(p, u)?;
    let shifted: Vec<T> = u
        .values()
        .iter()
        .zip(p.values().iter().zip(q.values()))
        .map(|(&x, (&a, &b))| x + a.ln() - b.ln())
        .collect();
    let e = q.expect_values(&shifted);
    Ok(CenteredRandomVariable::from_parts_unchecked(
        q.clone(),
        RandomVariable::from_parts_unchecked(
            q.space().clone(),
            shifted.into_iter().map(|x| x - e).collect(),
        ),
    ))
}

/// Gradient `∇K_p(u) = q/p − 1` as a pretangent vector at `p`.
pub fn nabla_k<T: Scalar>(p: &Density<T>, u: &CenteredRandomVariable<T>) -> Result<PretangentVector<T>> {
    check_coordinate(p, u)?;
    let q = tilt(p, u.values());
    let values = q
        .values()
        .iter()
        .zip(p.values())
        .map(|(&a, &b)| a / b - T::one())
        .collect();
    Ok(PretangentVector::new(CenteredRandomVariable::from_parts_unchecked(
        p.clone(),
        RandomVariable::from_parts_unchecked(p.space().clone(), values),
    )))
}

/// `E_p[(q/p)^t] = exp(K_p(t·u) − t·K_p(u))` along the exponential arc through
/// `p` and `q`; finite for every real `t` on a finite space.
pub fn arc_moment<T: Scalar>(p: &Density<T>, q: &Density<T>, t: T) -> Result<T> {
    p.space().check_same(q.space())?;
    let powered: Vec<T> = q
        .values()
        .iter()
        .zip(p.values())
        .map(|(&a, &b)| (a / b).powf(t))
        .collect();
    Ok(p.expect_values(&powered))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{center, FiniteSampleSpace};
    use approx::assert_abs_diff_eq;

    fn p() -> Density<f64> {
        Density::uniform(FiniteSampleSpace::new(vec![0.5, 0.5]).unwrap())
    }

    fn coord(t: f64) -> CenteredRandomVariable<f64> {
        let p = p();
        center(&p, &RandomVariable::new(p.space().clone(), vec![t, -t]).unwrap()).unwrap()
    }

    #[test]
    fn cumulant_examples() {
        assert_eq!(cumulant(&p(), &coord(0.0)).unwrap(), 0.0);
        assert_abs_diff_eq!(cumulant(&p(), &coord(1.0)).unwrap(), 1f64.cosh().ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(cumulant(&p(), &coord(2.0)).unwrap(), 2f64.cosh().ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(cumulant(&p(), &coord(2.0)).unwrap(), 1.325003, epsilon = 1e-6);
    }

    #[test]
    fn cumulant_survives_large_coordinates() {
        let k = cumulant(&p(), &coord(800.0)).unwrap();
        assert_abs_diff_eq!(k, 800.0 - 2f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn chart_inverse_examples() {
        let q = chart_inverse(&p(), &coord(0.0)).unwrap();
        assert_abs_diff_eq!(q.values()[0], 1.0, epsilon = 1e-15);
        let q = chart_inverse(&p(), &coord(1.0)).unwrap();
        let e = 1f64.exp();
        assert_abs_diff_eq!(q.values()[0], 2.0 * e / (e + 1.0 / e), epsilon = 1e-15);
        assert_abs_diff_eq!(q.values()[1], 2.0 / e / (e + 1.0 / e), epsilon = 1e-15);
        let u = chart(&p(), &q).unwrap();
        assert_abs_diff_eq!(u.values()[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(u.values()[1], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn derivative_examples() {
        let v = coord(1.0);
        assert_abs_diff_eq!(cumulant_derivatives(&p(), &coord(0.0), &[&v]).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cumulant_derivatives(&p(), &v, &[&v]).unwrap(), 1f64.tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            cumulant_derivatives(&p(), &v, &[&v, &v]).unwrap(),
            1.0 - 1f64.tanh().powi(2),
            epsilon = 1e-15
        );
        assert!(matches!(
            cumulant_derivatives(&p(), &v, &[]),
            Err(GeometryError::Arity { found: 0, .. })
        ));
    }

    #[test]
    fn nabla_example() {
        let g = nabla_k(&p(), &coord(1.0)).unwrap();
        assert_abs_diff_eq!(g.values()[0], 1f64.tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(g.values()[1], -1f64.tanh(), epsilon = 1e-15);
        assert!(nabla_k(&p(), &coord(0.0)).unwrap().values().iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn transition_identity() {
        let u = coord(0.7);
        let same = transition_map(&p(), &p(), &u).unwrap();
        assert_abs_diff_eq!(same.values()[0], 0.7, epsilon = 1e-15);
    }

    #[test]
    fn arc_moment_matches_cumulants() {
        let q = chart_inverse(&p(), &coord(0.9)).unwrap();
        let u = coord(0.9);
        for t in [-1.5, 0.3, 2.5] {
            let k_t = cumulant(&p(), &u.scale(t)).unwrap();
            let k_1 = cumulant(&p(), &u).unwrap();
            assert_abs_diff_eq!(arc_moment(&p(), &q, t).unwrap(), (k_t - t * k_1).exp(), epsilon = 1e-13);
        }
    }

    #[test]
    fn coordinate_must_be_based_at_p() {
        let q = chart_inverse(&p(), &coord(1.0)).unwrap();
        let other = chart(&q, &p()).unwrap();
        assert_eq!(cumulant(&p(), &other).unwrap_err(), GeometryError::BaseMismatch);
    }
}
