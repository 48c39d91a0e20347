//! Gradient-flow integration and the velocity/acceleration of stored curves.

use crate::error::{GeometryError, Result};
use crate::scalar::Scalar;
use crate::space::{log_sum_exp, CenteredRandomVariable, Density, RandomVariable};
use crate::transport::TangentVector;

use super::VectorField;

/// Flows abort once any log-density exceeds this magnitude.
pub const LOG_DENSITY_LIMIT: f64 = 700.0;

/// Time-indexed path of densities.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    times: Vec<T>,
    densities: Vec<Density<T>>,
    step: T,
}

impl<T: Scalar> Trajectory<T> {
    pub fn new(times: Vec<T>, densities: Vec<Density<T>>, step: T) -> Result<Self> {
        if times.len() != densities.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: times.len(),
                found: densities.len(),
            });
        }
        if times.is_empty() {
            return Err(GeometryError::InvalidArgument("empty trajectory".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GeometryError::InvalidArgument(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        for d in &densities[1..] {
            densities[0].space().check_same(d.space())?;
        }
        Ok(Self {
            times,
            densities,
            step,
        })
    }

    /// Samples `curve` on the grid `t0, t0 + step, …` up to `t1`.
    pub fn from_curve<C>(curve: C, t0: T, t1: T, step: T) -> Result<Self>
    where
        C: Fn(T) -> Result<Density<T>>,
    {
        let times = grid(t0, t1, step)?;
        let densities = times.iter().map(|&t| curve(t)).collect::<Result<Vec<_>>>()?;
        Self::new(times, densities, step)
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn densities(&self) -> &[Density<T>] {
        &self.densities
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &Density<T> {
        self.densities.last().expect("trajectory is never empty")
    }

    /// Index of the grid node at `t`.
    pub fn index_of(&self, t: T) -> Result<usize> {
        let (first, last) = (self.times[0], *self.times.last().unwrap());
        let slack = self.step.abs() * T::lit(1e-9);
        if t < first - slack || t > last + slack {
            return Err(GeometryError::OutOfRange {
                what: "t",
                value: t.to_f64().unwrap_or(f64::NAN),
                lo: first.to_f64().unwrap_or(f64::NAN),
                hi: last.to_f64().unwrap_or(f64::NAN),
            });
        }
        let i = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (*a.1 - t)
                    .abs()
                    .partial_cmp(&(*b.1 - t).abs())
                    .expect("finite times")
            })
            .map(|(i, _)| i)
            .unwrap();
        if (self.times[i] - t).abs() > slack.max(T::epsilon() * t.abs()) {
            return Err(GeometryError::OffGrid {
                t: t.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(i)
    }

    /// Three consecutive nodes around `i` (shifted inward at the ends).
    fn stencil(&self, i: usize) -> Result<[usize; 3]> {
        let n = self.len();
        if n < 3 {
            return Err(GeometryError::InvalidArgument(
                "finite differences need at least three nodes".into(),
            ));
        }
        let centre = i.clamp(1, n - 2);
        Ok([centre - 1, centre, centre + 1])
    }

    /// Score `δp = d/dt ln p(t)` at node `i` by three-point differences.
    fn score_at(&self, i: usize) -> Result<Vec<T>> {
        let nodes = self.stencil(i)?;
        let ts = nodes.map(|k| self.times[k]);
        let w = first_derivative_weights(ts, self.times[i]);
        Ok(self.combine_logs(nodes, w))
    }

    fn combine_logs(&self, nodes: [usize; 3], w: [T; 3]) -> Vec<T> {
        let dim = self.densities[0].len();
        (0..dim)
            .map(|a| {
                nodes
                    .iter()
                    .zip(w)
                    .map(|(&k, wk)| wk * self.densities[k].values()[a].ln())
                    .fold(T::zero(), |acc, x| acc + x)
            })
            .collect()
    }
}

fn grid<T: Scalar>(t0: T, t1: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(GeometryError::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    if !(t1 >= t0) {
        return Err(GeometryError::InvalidArgument(format!(
            "end time {t1} precedes start {t0}"
        )));
    }
    let span = (t1 - t0) / step;
    let full = (span - T::lit(1e-9)).ceil().max(T::zero()).to_usize().unwrap_or(0);
    let mut times: Vec<T> = (0..=full)
        .map(|k| t0 + T::from_usize(k).unwrap() * step)
        .collect();
    if let Some(last) = times.last_mut() {
        *last = last.min(t1);
    }
    if times.len() > 1 && times[times.len() - 1] <= times[times.len() - 2] {
        times.pop();
    }
    Ok(times)
}

/// Weights of the derivative at `x` of the quadratic through three nodes.
fn first_derivative_weights<T: Scalar>(ts: [T; 3], x: T) -> [T; 3] {
    let [a, b, c] = ts;
    [
        (x - b + x - c) / ((a - b) * (a - c)),
        (x - a + x - c) / ((b - a) * (b - c)),
        (x - a + x - b) / ((c - a) * (c - b)),
    ]
}

fn second_derivative_weights<T: Scalar>(ts: [T; 3]) -> [T; 3] {
    let [a, b, c] = ts;
    let two = T::lit(2.0);
    [
        two / ((a - b) * (a - c)),
        two / ((b - a) * (b - c)),
        two / ((c - a) * (c - b)),
    ]
}

/// Integrates `d/dt ln p(t) = field(p(t))` with classical RK4 in log-density
/// space, renormalizing after every step.
pub fn gradient_flow<T, F>(field: &F, p0: &Density<T>, t_end: T, step: T) -> Result<Trajectory<T>>
where
    T: Scalar,
    F: VectorField<T> + ?Sized,
{
    if !(t_end > T::zero()) || !t_end.is_finite() {
        return Err(GeometryError::InvalidArgument(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    let times = grid(T::zero(), t_end, step)?;
    let space = p0.space().clone();
    let weights = space.weights();
    let limit = T::lit(LOG_DENSITY_LIMIT);

    let rate = |y: &[T]| -> Result<Vec<T>> {
        let q = Density::from_log_values(space.clone(), y)?;
        Ok(field.at(&q)?.values().to_vec())
    };
    let axpy = |y: &[T], k: &[T], h: T| -> Vec<T> {
        y.iter().zip(k).map(|(&a, &b)| a + h * b).collect()
    };

    let mut y: Vec<T> = p0.values().iter().map(|v| v.ln()).collect();
    let mut densities = vec![p0.clone()];
    let half = T::lit(0.5);
    let sixth = T::lit(1.0 / 6.0);
    let two = T::lit(2.0);
    for w in times.windows(2) {
        let h = w[1] - w[0];
        let k1 = rate(&y)?;
        let k2 = rate(&axpy(&y, &k1, h * half))?;
        let k3 = rate(&axpy(&y, &k2, h * half))?;
        let k4 = rate(&axpy(&y, &k3, h))?;
        for i in 0..y.len() {
            y[i] = y[i] + h * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        let lse = log_sum_exp(weights, &y);
        let mut magnitude = T::zero();
        for v in y.iter_mut() {
            *v = *v - lse;
            magnitude = magnitude.max(v.abs());
        }
        if !(magnitude <= limit) {
            return Err(GeometryError::FlowOverflow {
                t: w[1].to_f64().unwrap_or(f64::NAN),
                magnitude: magnitude.to_f64().unwrap_or(f64::NAN),
                limit: LOG_DENSITY_LIMIT,
            });
        }
        let values = y.iter().map(|v| v.exp()).collect();
        densities.push(Density::from_parts_unchecked(space.clone(), values));
    }
    Trajectory::new(times, densities, step)
}

/// Fisher information `E_{p(t)}[(d/dt ln p(t))²]` at a grid node.
pub fn fisher_information<T: Scalar>(traj: &Trajectory<T>, t: T) -> Result<T> {
    let i = traj.index_of(t)?;
    let score = traj.score_at(i)?;
    let sq: Vec<T> = score.iter().map(|&s| s * s).collect();
    Ok(traj.densities[i].expect_values(&sq))
}

/// Second component of the velocity of `t ↦ (p(t), δp(t))`:
/// `(δp)˙(t) + I(p(t))`, projected onto the fiber at `p(t)`.
///
/// Identically zero along one-parameter exponential families.
pub fn e_acceleration<T: Scalar>(traj: &Trajectory<T>, t: T) -> Result<TangentVector<T>> {
    let i = traj.index_of(t)?;
    if i == 0 || i + 1 == traj.len() {
        return Err(GeometryError::OutOfRange {
            what: "t (interior node required)",
            value: t.to_f64().unwrap_or(f64::NAN),
            lo: traj.times[1].to_f64().unwrap_or(f64::NAN),
            hi: traj.times[traj.len() - 2].to_f64().unwrap_or(f64::NAN),
        });
    }
    let nodes = [i - 1, i, i + 1];
    let second = traj.combine_logs(nodes, second_derivative_weights(nodes.map(|k| traj.times[k])));
    let info = fisher_information(traj, t)?;
    let p = &traj.densities[i];
    let raw: Vec<T> = second.iter().map(|&a| a + info).collect();
    let shift = p.expect_values(&raw);
    let values = raw.into_iter().map(|a| a - shift).collect();
    Ok(TangentVector::new(CenteredRandomVariable::from_parts_unchecked(
        p.clone(),
        RandomVariable::from_parts_unchecked(p.space().clone(), values),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{expectation_functional, GradientField, ZeroField};
    use crate::space::FiniteSampleSpace;
    use approx::assert_abs_diff_eq;

    fn p0() -> Density<f64> {
        Density::new(FiniteSampleSpace::new(vec![0.5, 0.5]).unwrap(), vec![1.6, 0.4]).unwrap()
    }

    #[test]
    fn grid_handles_partial_last_step() {
        let g = grid(0.0, 1.0, 0.3).unwrap();
        assert_eq!(g.len(), 5);
        assert_abs_diff_eq!(*g.last().unwrap(), 1.0, epsilon = 0.0);
        let g = grid(0.0, 1.0, 0.25).unwrap();
        assert_eq!(g.len(), 5);
    }

    #[test]
    fn zero_field_is_stationary() {
        let traj = gradient_flow(&ZeroField, &p0(), 1.0, 0.1).unwrap();
        for d in traj.densities() {
            assert!(d.sup_distance(&p0()).unwrap() < 1e-15);
        }
        assert_abs_diff_eq!(fisher_information(&traj, 0.5).unwrap(), 0.0, epsilon = 1e-20);
        let acc = e_acceleration(&traj, 0.5).unwrap();
        assert!(acc.values().iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn flow_rejects_bad_arguments() {
        assert!(gradient_flow(&ZeroField, &p0(), 0.0, 0.1).is_err());
        assert!(gradient_flow(&ZeroField, &p0(), 1.0, -0.1).is_err());
    }

    #[test]
    fn flow_guard_trips_on_runaway_density() {
        let space = FiniteSampleSpace::new(vec![0.5, 0.5]).unwrap();
        let f = RandomVariable::new(space, vec![500.0, -500.0]).unwrap();
        let field = GradientField(expectation_functional(f));
        let err = gradient_flow(&field, &p0(), 5.0, 0.01).unwrap_err();
        assert!(matches!(err, GeometryError::FlowOverflow { .. }));
    }

    #[test]
    fn node_lookup() {
        let traj = gradient_flow(&ZeroField, &p0(), 1.0, 0.25).unwrap();
        assert_eq!(traj.index_of(0.5).unwrap(), 2);
        assert!(matches!(traj.index_of(0.6), Err(GeometryError::OffGrid { .. })));
        assert!(matches!(traj.index_of(1.5), Err(GeometryError::OutOfRange { .. })));
        assert!(matches!(e_acceleration(&traj, 0.0), Err(GeometryError::OutOfRange { .. })));
    }
}
