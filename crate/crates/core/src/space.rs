//! Finite measure spaces, strictly positive densities and random variables.
//!
//! A [`Density`] stores values relative to the reference measure: `p_i` with
//! `Σ p_i μ_i = 1`. Expectations are always `E_p[f] = Σ f_i p_i μ_i`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::scalar::Scalar;

/// Atoms `0..n` with positive masses `μ_i`.
#[derive(Debug, Clone)]
pub struct FiniteSampleSpace<T> {
    weights: Arc<[T]>,
}

impl<T: Scalar> FiniteSampleSpace<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(GeometryError::EmptySpace);
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(GeometryError::NonFinite {
                    what: "weights",
                    index,
                });
            }
            if w <= T::zero() {
                return Err(GeometryError::NotPositive {
                    what: "weights",
                    index,
                });
            }
        }
        Ok(Self {
            weights: weights.into(),
        })
    }

    /// `n` atoms of mass `1/n` each.
    pub fn uniform(n: usize) -> Result<Self> {
        let w = T::one() / T::from_usize(n.max(1)).unwrap();
        Self::new(vec![w; n])
    }

    /// Counting measure on `n` atoms.
    pub fn counting(n: usize) -> Result<Self> {
        Self::new(vec![T::one(); n])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().copied().sum()
    }

    pub fn same_as(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.weights, &other.weights) || self.weights == other.weights
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        if !self.same_as(other) {
            return Err(GeometryError::SpaceMismatch);
        }
        Ok(())
    }

    fn check_len(&self, found: usize) -> Result<()> {
        if found != self.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.len(),
                found,
            });
        }
        Ok(())
    }
}

/// Strictly positive density with respect to the space's measure.
#[derive(Debug, Clone)]
pub struct Density<T> {
    space: FiniteSampleSpace<T>,
    values: Vec<T>,
}

impl<T: Scalar> Density<T> {
    /// Validates positivity and normalization at the default tolerance.
    pub fn new(space: FiniteSampleSpace<T>, values: Vec<T>) -> Result<Self> {
        Self::with_tolerance(space, values, T::identity_tol())
    }

    pub fn with_tolerance(space: FiniteSampleSpace<T>, values: Vec<T>, tol: T) -> Result<Self> {
        check_positive(&space, &values, "values")?;
        let mass = weighted_sum(space.weights(), &values);
        if (mass - T::one()).abs() > tol {
            return Err(GeometryError::NotNormalized {
                mass: mass.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { space, values })
    }

    /// Divides strictly positive values by their total mass.
    pub fn normalized(space: FiniteSampleSpace<T>, values: Vec<T>) -> Result<Self> {
        check_positive(&space, &values, "values")?;
        let mass = weighted_sum(space.weights(), &values);
        let values = values.into_iter().map(|v| v / mass).collect();
        Ok(Self { space, values })
    }

    /// Builds `exp(l_i) / Σ exp(l_j) μ_j` with a max shift.
    pub fn from_log_values(space: FiniteSampleSpace<T>, logs: &[T]) -> Result<Self> {
        space.check_len(logs.len())?;
        for (index, l) in logs.iter().enumerate() {
            if !l.is_finite() {
                return Err(GeometryError::NonFinite {
                    what: "log-values",
                    index,
                });
            }
        }
        let lse = log_sum_exp(space.weights(), logs);
        let values = logs.iter().map(|&l| (l - lse).exp()).collect();
        Ok(Self { space, values })
    }

    /// Constant density `1/μ(Ω)`.
    pub fn uniform(space: FiniteSampleSpace<T>) -> Self {
        let c = T::one() / space.total_mass();
        let values = vec![c; space.len()];
        Self { space, values }
    }

    /// Explicitly removes accumulated normalization drift.
    pub fn renormalize(&self) -> Self {
        let mass = weighted_sum(self.space.weights(), &self.values);
        Self {
            space: self.space.clone(),
            values: self.values.iter().map(|&v| v / mass).collect(),
        }
    }

    pub fn space(&self) -> &FiniteSampleSpace<T> {
        &self.space
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ln(&self) -> RandomVariable<T> {
        RandomVariable {
            space: self.space.clone(),
            values: self.values.iter().map(|v| v.ln()).collect(),
        }
    }

    /// Pointwise `self / other` as a random variable.
    pub fn ratio(&self, other: &Self) -> Result<RandomVariable<T>> {
        self.space.check_same(&other.space)?;
        Ok(RandomVariable {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a / b)
                .collect(),
        })
    }

    /// Probability mass of each atom, `p_i μ_i`.
    pub fn masses(&self) -> Vec<T> {
        self.values
            .iter()
            .zip(self.space.weights())
            .map(|(&p, &m)| p * m)
            .collect()
    }

    /// Sup-norm distance between density values.
    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        self.space.check_same(&other.space)?;
        Ok(sup_diff(&self.values, &other.values))
    }

    /// Same space and values equal within `tol` (relative to the larger value).
    pub fn same_point(&self, other: &Self, tol: T) -> bool {
        self.space.same_as(&other.space)
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(&a, &b)| (a - b).abs() <= tol * a.abs().max(b.abs()).max(T::one()))
    }

    pub(crate) fn check_base(&self, other: &Self) -> Result<()> {
        self.space.check_same(&other.space)?;
        if self.same_point(other, T::identity_tol()) {
            Ok(())
        } else {
            Err(GeometryError::BaseMismatch)
        }
    }

    /// `E_p[f]` on raw values; length must already be checked.
    pub(crate) fn expect_values(&self, f: &[T]) -> T {
        f.iter()
            .zip(&self.values)
            .zip(self.space.weights())
            .map(|((&f, &p), &m)| f * p * m)
            .sum()
    }

    pub(crate) fn from_parts_unchecked(space: FiniteSampleSpace<T>, values: Vec<T>) -> Self {
        Self { space, values }
    }
}

/// Real function on the atoms.
#[derive(Debug, Clone)]
pub struct RandomVariable<T> {
    space: FiniteSampleSpace<T>,
    values: Vec<T>,
}

impl<T: Scalar> RandomVariable<T> {
    pub fn new(space: FiniteSampleSpace<T>, values: Vec<T>) -> Result<Self> {
        space.check_len(values.len())?;
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(GeometryError::NonFinite {
                    what: "values",
                    index,
                });
            }
        }
        Ok(Self { space, values })
    }

    pub fn constant(space: FiniteSampleSpace<T>, c: T) -> Self {
        let values = vec![c; space.len()];
        Self { space, values }
    }

    pub fn zero(space: FiniteSampleSpace<T>) -> Self {
        Self::constant(space, T::zero())
    }

    pub fn space(&self) -> &FiniteSampleSpace<T> {
        &self.space
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            space: self.space.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.space.check_same(&other.space)?;
        Ok(Self {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub(crate) fn from_parts_unchecked(space: FiniteSampleSpace<T>, values: Vec<T>) -> Self {
        Self { space, values }
    }
}

impl<T> AsRef<RandomVariable<T>> for RandomVariable<T> {
    fn as_ref(&self) -> &RandomVariable<T> {
        self
    }
}

/// Random variable with zero expectation under its base density.
#[derive(Debug, Clone)]
pub struct CenteredRandomVariable<T> {
    base: Density<T>,
    variable: RandomVariable<T>,
}

impl<T: Scalar> CenteredRandomVariable<T> {
    /// Checks `E_base[variable] = 0` at the default tolerance.
    pub fn new(base: Density<T>, variable: RandomVariable<T>) -> Result<Self> {
        Self::with_tolerance(base, variable, T::identity_tol())
    }

    pub fn with_tolerance(base: Density<T>, variable: RandomVariable<T>, tol: T) -> Result<Self> {
        base.space.check_same(&variable.space)?;
        let e = base.expect_values(&variable.values);
        let scale = base
            .expect_values(&variable.values.iter().map(|v| v.abs()).collect::<Vec<_>>())
            .max(T::one());
        if e.abs() > tol * scale {
            return Err(GeometryError::NotCentered {
                expectation: e.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { base, variable })
    }

    pub fn zero(base: Density<T>) -> Self {
        let variable = RandomVariable::zero(base.space.clone());
        Self { base, variable }
    }

    pub fn base(&self) -> &Density<T> {
        &self.base
    }

    pub fn variable(&self) -> &RandomVariable<T> {
        &self.variable
    }

    pub fn values(&self) -> &[T] {
        &self.variable.values
    }

    pub fn into_variable(self) -> RandomVariable<T> {
        self.variable
    }

    /// Linear combination `a·self + b·other` of two vectors with the same base.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        self.base.check_base(&other.base)?;
        let variable = self.variable.zip_with(&other.variable, |x, y| a * x + b * y)?;
        Ok(Self {
            base: self.base.clone(),
            variable,
        })
    }

    pub fn scale(&self, c: T) -> Self {
        Self {
            base: self.base.clone(),
            variable: self.variable.scale(c),
        }
    }

    /// Caller guarantees the variable is centered at `base` up to rounding.
    pub(crate) fn from_parts_unchecked(base: Density<T>, variable: RandomVariable<T>) -> Self {
        Self { base, variable }
    }
}

impl<T> AsRef<RandomVariable<T>> for CenteredRandomVariable<T> {
    fn as_ref(&self) -> &RandomVariable<T> {
        &self.variable
    }
}

/// `E_p[f] = Σ f_i p_i μ_i`.
pub fn expect<T: Scalar, F: AsRef<RandomVariable<T>>>(p: &Density<T>, f: &F) -> Result<T> {
    let f = f.as_ref();
    p.space.check_same(&f.space)?;
    Ok(p.expect_values(&f.values))
}

/// `f − E_p[f]`, centered at `p`.
pub fn center<T: Scalar, F: AsRef<RandomVariable<T>>>(
    p: &Density<T>,
    f: &F,
) -> Result<CenteredRandomVariable<T>> {
    let f = f.as_ref();
    let e = expect(p, f)?;
    Ok(CenteredRandomVariable {
        base: p.clone(),
        variable: f.map(|v| v - e),
    })
}

/// Joint central moment `E_p[∏ (f_k − E_p f_k)]` of two or three variables.
pub fn central_moments<T: Scalar>(p: &Density<T>, fs: &[&RandomVariable<T>]) -> Result<T> {
    if !(2..=3).contains(&fs.len()) {
        return Err(GeometryError::Arity {
            expected: "2 or 3",
            found: fs.len(),
        });
    }
    let centered = fs
        .iter()
        .map(|f| center(p, *f))
        .collect::<Result<Vec<_>>>()?;
    let product: Vec<T> = (0..p.len())
        .map(|i| centered.iter().fold(T::one(), |acc, c| acc * c.values()[i]))
        .collect();
    Ok(p.expect_values(&product))
}

/// `Cov_p(f, g)`.
pub fn covariance<T: Scalar>(
    p: &Density<T>,
    f: &RandomVariable<T>,
    g: &RandomVariable<T>,
) -> Result<T> {
    central_moments(p, &[f, g])
}

fn check_positive<T: Scalar>(
    space: &FiniteSampleSpace<T>,
    values: &[T],
    what: &'static str,
) -> Result<()> {
    space.check_len(values.len())?;
    for (index, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(GeometryError::NonFinite { what, index });
        }
        if v <= T::zero() {
            return Err(GeometryError::NotPositive { what, index });
        }
    }
    Ok(())
}

pub(crate) fn weighted_sum<T: Scalar>(weights: &[T], values: &[T]) -> T {
    values.iter().zip(weights).map(|(&v, &w)| v * w).sum()
}

/// `log Σ exp(l_i) μ_i`.
pub(crate) fn log_sum_exp<T: Scalar>(weights: &[T], logs: &[T]) -> T {
    let m = logs
        .iter()
        .copied()
        .fold(T::neg_infinity(), |a, b| a.max(b));
    let s: T = logs
        .iter()
        .zip(weights)
        .map(|(&l, &w)| (l - m).exp() * w)
        .sum();
    m + s.ln()
}

pub(crate) fn sup_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc.max((x - y).abs()))
}

/// Wire form shared by spaces, densities and variables: `{"weights": [...], "values": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorJson<T> {
    pub weights: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Scalar> VectorJson<T> {
    pub fn space(&self) -> Result<FiniteSampleSpace<T>> {
        FiniteSampleSpace::new(self.weights.clone())
    }

    pub fn into_density(self) -> Result<Density<T>> {
        Density::new(self.space()?, self.values)
    }

    pub fn into_variable(self) -> Result<RandomVariable<T>> {
        RandomVariable::new(self.space()?, self.values)
    }

    /// Variable read against an existing space; weights must match it.
    pub fn into_variable_on(self, space: &FiniteSampleSpace<T>) -> Result<RandomVariable<T>> {
        let own = self.space()?;
        space.check_same(&own)?;
        RandomVariable::new(space.clone(), self.values)
    }
}

impl<T: Scalar> From<&Density<T>> for VectorJson<T> {
    fn from(p: &Density<T>) -> Self {
        Self {
            weights: p.space.weights().to_vec(),
            values: p.values.clone(),
        }
    }
}

impl<T: Scalar> From<&RandomVariable<T>> for VectorJson<T> {
    fn from(f: &RandomVariable<T>) -> Self {
        Self {
            weights: f.space.weights().to_vec(),
            values: f.values.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_point() -> FiniteSampleSpace<f64> {
        FiniteSampleSpace::new(vec![0.5, 0.5]).unwrap()
    }

    fn skewed() -> Density<f64> {
        Density::new(two_point(), vec![1.6, 0.4]).unwrap()
    }

    #[test]
    fn expectation_examples() {
        let s = two_point();
        let p = Density::new(s.clone(), vec![1.0, 1.0]).unwrap();
        let f = RandomVariable::new(s.clone(), vec![1.0, -1.0]).unwrap();
        assert_eq!(expect(&p, &f).unwrap(), 0.0);
        let c = RandomVariable::constant(s.clone(), 3.0);
        assert_abs_diff_eq!(expect(&p, &c).unwrap(), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(expect(&skewed(), &f).unwrap(), 0.6, epsilon = 1e-15);
    }

    #[test]
    fn center_examples() {
        let s = two_point();
        let p = Density::uniform(s.clone());
        let c = center(&p, &RandomVariable::constant(s.clone(), 7.0)).unwrap();
        assert!(c.values().iter().all(|v| v.abs() < 1e-15));
        let f = RandomVariable::new(s.clone(), vec![1.0, -1.0]).unwrap();
        assert_eq!(center(&p, &f).unwrap().values(), &[1.0, -1.0]);
        let g = RandomVariable::new(s, vec![2.0, 0.0]).unwrap();
        let gc = center(&skewed(), &g).unwrap();
        // E = ½·1.6·2 = 1.6
        assert_abs_diff_eq!(gc.values()[0], 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(gc.values()[1], -1.6, epsilon = 1e-15);
        let again = center(&skewed(), &gc).unwrap();
        assert_abs_diff_eq!(again.values()[1], -1.6, epsilon = 1e-15);
    }

    #[test]
    fn moment_examples() {
        let s = two_point();
        let p = Density::uniform(s.clone());
        let v = RandomVariable::new(s.clone(), vec![1.0, -1.0]).unwrap();
        let k = RandomVariable::constant(s, 2.0);
        assert_eq!(central_moments(&p, &[&v, &k]).unwrap(), 0.0);
        assert_abs_diff_eq!(central_moments(&p, &[&v, &v]).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(central_moments(&p, &[&v, &v, &v]).unwrap(), 0.0, epsilon = 1e-15);
        assert!(matches!(
            central_moments(&p, &[&v]),
            Err(GeometryError::Arity { found: 1, .. })
        ));
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            FiniteSampleSpace::<f64>::new(vec![]).unwrap_err(),
            GeometryError::EmptySpace
        );
        assert!(matches!(
            FiniteSampleSpace::new(vec![1.0, 0.0]),
            Err(GeometryError::NotPositive { index: 1, .. })
        ));
        assert!(matches!(
            Density::new(two_point(), vec![1.0, 0.0]),
            Err(GeometryError::NotPositive { .. })
        ));
        assert!(matches!(
            Density::new(two_point(), vec![1.0, 2.0]),
            Err(GeometryError::NotNormalized { .. })
        ));
        let other = FiniteSampleSpace::new(vec![0.25, 0.25, 0.5]).unwrap();
        let f = RandomVariable::zero(other);
        assert!(matches!(
            expect(&skewed(), &f),
            Err(GeometryError::DimensionMismatch { expected: 2, found: 3 })
        ));
        let f = RandomVariable::new(two_point(), vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            CenteredRandomVariable::new(skewed(), f),
            Err(GeometryError::NotCentered { .. })
        ));
    }

    #[test]
    fn renormalize_is_explicit() {
        let s = two_point();
        let drifted = Density::with_tolerance(s, vec![1.6, 0.4000001], 1e-6).unwrap();
        let fixed = drifted.renormalize();
        assert_abs_diff_eq!(weighted_sum(fixed.space().weights(), fixed.values()), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn json_shape() {
        let j: VectorJson<f64> = VectorJson::from(&skewed());
        let back = j.clone().into_density().unwrap();
        assert_eq!(back.values(), skewed().values());
        assert_eq!(j.weights, vec![0.5, 0.5]);
    }

    #[test]
    fn works_in_single_precision() {
        let s = FiniteSampleSpace::<f32>::uniform(4).unwrap();
        let p = Density::normalized(s.clone(), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let f = RandomVariable::new(s, vec![1.0, 0.0, -1.0, 2.0]).unwrap();
        let c = center(&p, &f).unwrap();
        assert!(expect(&p, &c).unwrap().abs() < 1e-6);
    }
}
