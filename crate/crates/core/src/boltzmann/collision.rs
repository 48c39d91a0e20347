//! Elastic collision map `A_x` on pairs of velocities in ℝ³.

use crate::error::{GeometryError, Result};
use crate::scalar::Scalar;

pub type Vec3<T> = [T; 3];

#[inline]
pub fn dot<T: Scalar>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn add<T: Scalar>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub<T: Scalar>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale<T: Scalar>(a: &Vec3<T>, c: T) -> Vec3<T> {
    [a[0] * c, a[1] * c, a[2] * c]
}

#[inline]
pub fn norm_sq<T: Scalar>(a: &Vec3<T>) -> T {
    dot(a, a)
}

/// Unit vector `x ∈ S²` selecting the exchanged velocity component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionFrame<T> {
    x: Vec3<T>,
}

impl<T: Scalar> CollisionFrame<T> {
    pub fn new(x: Vec3<T>) -> Result<Self> {
        let norm = norm_sq(&x).sqrt();
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(16.0));
        if !((norm - T::one()).abs() <= tol) {
            return Err(GeometryError::NonUnitDirection {
                norm: norm.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { x })
    }

    /// Normalizes a nonzero direction.
    pub fn from_direction(d: Vec3<T>) -> Result<Self> {
        let norm = norm_sq(&d).sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(GeometryError::NonUnitDirection {
                norm: norm.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            x: scale(&d, T::one() / norm),
        })
    }

    pub fn direction(&self) -> Vec3<T> {
        self.x
    }

    pub fn negated(&self) -> Self {
        Self {
            x: scale(&self.x, -T::one()),
        }
    }
}

/// `v_x = v − x x'(v − w)`, `w_x = w + x x'(v − w)`.
#[inline]
pub fn collide<T: Scalar>(v: &Vec3<T>, w: &Vec3<T>, frame: &CollisionFrame<T>) -> (Vec3<T>, Vec3<T>) {
    let x = &frame.x;
    let shift = scale(x, dot(x, &sub(v, w)));
    (sub(v, &shift), add(w, &shift))
}

/// The 6×6 matrix `[[I − xx', xx'], [xx', I − xx']]` acting on `(v, w)`.
pub fn collision_matrix<T: Scalar>(frame: &CollisionFrame<T>) -> [[T; 6]; 6] {
    let x = frame.x;
    let mut m = [[T::zero(); 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            let proj = x[i] * x[j];
            let id = if i == j { T::one() } else { T::zero() };
            m[i][j] = id - proj;
            m[i + 3][j + 3] = id - proj;
            m[i][j + 3] = proj;
            m[i + 3][j] = proj;
        }
    }
    m
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<T: Scalar, const N: usize>(mut m: [[T; N]; N]) -> T {
    let mut det = T::one();
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&a, &b| {
                m[a][col]
                    .abs()
                    .partial_cmp(&m[b][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if m[pivot][col].is_zero() {
            return T::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det = det * m[col][col];
        for row in col + 1..N {
            let factor = m[row][col] / m[col][col];
            for k in col..N {
                m[row][k] = m[row][k] - factor * m[col][k];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_frame_leaves_pair_unchanged() {
        let v = [1.0, 2.0, 0.0];
        let w = [1.0, -1.0, 0.0];
        let frame = CollisionFrame::new([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(collide(&v, &w, &frame), (v, w));
    }

    #[test]
    fn head_on_exchange() {
        let frame = CollisionFrame::new([1.0, 0.0, 0.0]).unwrap();
        let (vx, wx) = collide(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &frame);
        assert_eq!(vx, [0.0, 0.0, 0.0]);
        assert_eq!(wx, [1.0, 1.0, 0.0]);
        assert_eq!(add(&vx, &wx), [1.0, 1.0, 0.0]);
        assert_eq!(norm_sq(&vx) + norm_sq(&wx), 2.0);
    }

    #[test]
    fn frame_validation() {
        assert!(matches!(
            CollisionFrame::new([1.0, 1.0, 0.0]),
            Err(GeometryError::NonUnitDirection { .. })
        ));
        assert!(CollisionFrame::<f64>::from_direction([0.0, 0.0, 0.0]).is_err());
        let f = CollisionFrame::from_direction([3.0, 0.0, 4.0]).unwrap();
        assert!((norm_sq(&f.direction()) - 1.0f64).abs() < 1e-15);
    }

    #[test]
    fn matrix_is_an_involution() {
        let frame = CollisionFrame::from_direction([0.3, -1.2, 0.4]).unwrap();
        let m = collision_matrix(&frame);
        for i in 0..6 {
            for j in 0..6 {
                let sq: f64 = (0..6).map(|k| m[i][k] * m[k][j]).sum();
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((sq - id).abs() < 1e-14);
                assert_eq!(m[i][j], m[j][i]);
            }
        }
        assert!((determinant(m).abs() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn determinant_of_known_matrix() {
        assert_eq!(determinant([[2.0, 1.0], [1.0, 3.0]]), 5.0);
        assert_eq!(determinant([[0.0, 1.0], [1.0, 0.0]]), -1.0);
        assert_eq!(determinant([[1.0, 2.0], [2.0, 4.0]]), 0.0);
    }

    #[test]
    fn single_precision_collision() {
        let frame = CollisionFrame::<f32>::from_direction([1.0, 1.0, 0.0]).unwrap();
        let (vx, wx) = collide(&[1.0, 0.0, 0.5], &[0.0, 1.0, -0.5], &frame);
        let before = 1.0 + 0.25 + 1.0 + 0.25;
        assert!((norm_sq(&vx) + norm_sq(&wx) - before).abs() < 1e-5);
    }
}
