//! Young pairs, Luxemburg norms and the Orlicz duality pairing.
//!
//! Two pairs are provided:
//!
//! | kind | Φ(y)               | Φ*(x)                              |
//! |------|--------------------|------------------------------------|
//! | A    | e^\|y\| − 1 − \|y\| | (1+\|x\|) ln(1+\|x\|) − \|x\|         |
//! | B    | cosh y − 1         | \|x\| asinh\|x\| − √(1+x²) + 1       |
//!
//! The closed forms of kind A lose relative accuracy near zero, so below
//! `|x| < 0.1` they are summed as power series. Kind B is evaluated through
//! rearrangements that never subtract nearly equal terms.

use crate::error::{GeometryError, Result};
use crate::scalar::Scalar;
use crate::space::{Density, RandomVariable};

const SERIES_CUTOFF: f64 = 0.1;
const SERIES_TERMS: usize = 24;
const ASYMPTOTIC_CUTOFF: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum YoungPairKind {
    A,
    B,
}

/// Which member of a Young pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    /// Φ, the exponentially growing member.
    Phi,
    /// Φ*, the conjugate.
    PhiStar,
}

/// One Young function, identified by pair and member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct YoungFunction {
    pub kind: YoungPairKind,
    pub which: Which,
}

impl YoungFunction {
    pub fn phi(kind: YoungPairKind) -> Self {
        Self {
            kind,
            which: Which::Phi,
        }
    }

    pub fn phi_star(kind: YoungPairKind) -> Self {
        Self {
            kind,
            which: Which::PhiStar,
        }
    }

    pub fn eval<T: Scalar>(self, x: T) -> T {
        eval_young(self.kind, self.which, x)
    }
}

impl From<YoungPairKind> for YoungFunction {
    fn from(kind: YoungPairKind) -> Self {
        Self::phi(kind)
    }
}

/// Closed-form Φ or Φ*; even in `x`.
pub fn eval_young<T: Scalar>(kind: YoungPairKind, which: Which, x: T) -> T {
    let a = x.abs();
    let small = a < T::lit(SERIES_CUTOFF);
    match (kind, which) {
        (YoungPairKind::A, Which::Phi) => {
            if small {
                // Σ_{k≥2} a^k / k!
                series(a, |k| T::one() / factorial::<T>(k))
            } else {
                a.exp_m1() - a
            }
        }
        (YoungPairKind::B, Which::Phi) => {
            // cosh y − 1 = 2 sinh²(y/2)
            let s = (a * T::lit(0.5)).sinh();
            T::lit(2.0) * s * s
        }
        (YoungPairKind::A, Which::PhiStar) => {
            if small {
                // Σ_{k≥2} (−1)^k a^k / (k(k−1))
                series(a, |k| {
                    let c = T::one() / T::lit((k * (k - 1)) as f64);
                    if k % 2 == 0 {
                        c
                    } else {
                        -c
                    }
                })
            } else {
                (T::one() + a) * a.ln_1p() - a
            }
        }
        (YoungPairKind::B, Which::PhiStar) => {
            // √(1+a²) − 1 = a² / (1 + √(1+a²))
            let root = (T::one() + a * a).sqrt();
            a * a.asinh() - a * a / (T::one() + root)
        }
    }
}

/// `Σ_{k=2}^{K} c_k a^k` by Horner's rule.
fn series<T: Scalar>(a: T, coef: impl Fn(usize) -> T) -> T {
    let mut acc = T::zero();
    for k in (2..=SERIES_TERMS).rev() {
        acc = acc * a + coef(k);
    }
    acc * a * a
}

fn factorial<T: Scalar>(k: usize) -> T {
    (2..=k).fold(T::one(), |f, j| f * T::lit(j as f64))
}

/// `ln Φ(x)` without overflow for large `|x|`; `-inf` at zero.
pub fn ln_eval_young<T: Scalar>(kind: YoungPairKind, which: Which, x: T) -> T {
    let a = x.abs();
    if which == Which::Phi && a > T::lit(ASYMPTOTIC_CUTOFF) {
        let e = (-a).exp();
        return match kind {
            YoungPairKind::A => a + (-(T::one() + a) * e).ln_1p(),
            YoungPairKind::B => a - T::lit(std::f64::consts::LN_2) + T::lit(2.0) * (-e).ln_1p(),
        };
    }
    eval_young(kind, which, x).ln()
}

/// Derivative φ of Φ on `x ≥ 0`, extended oddly; `φ_A(x) = e^x − 1`, `φ_B(x) = sinh x`.
pub fn young_derivative<T: Scalar>(kind: YoungPairKind, x: T) -> T {
    let y = match kind {
        YoungPairKind::A => x.abs().exp_m1(),
        YoungPairKind::B => x.abs().sinh(),
    };
    y.copysign(x)
}

/// `Φ(x) + Φ*(y) − |xy|`, nonnegative by the Young inequality.
pub fn young_inequality_gap<T: Scalar>(kind: YoungPairKind, x: T, y: T) -> T {
    eval_young(kind, Which::Phi, x) + eval_young(kind, Which::PhiStar, y) - (x * y).abs()
}

/// `E_p[Φ(v/λ)]`.
pub fn modular<T: Scalar>(p: &Density<T>, v: &[T], func: YoungFunction, lambda: T) -> T {
    let phi: Vec<T> = v.iter().map(|&x| func.eval(x / lambda)).collect();
    p.expect_values(&phi)
}

const MAX_BRACKET_STEPS: usize = 4096;
const MAX_BISECTIONS: usize = 1024;

/// Luxemburg norm: the `λ ≥ 0` with `E_p[Φ(v/λ)] = 1`, to relative tolerance `tol`.
///
/// The bracket starts at `‖v‖_∞` and is widened by doubling and halving;
/// bisection then shrinks it until `hi − lo ≤ tol·hi`.
pub fn luxemburg_norm<T, F>(
    p: &Density<T>,
    v: &F,
    func: impl Into<YoungFunction>,
    tol: T,
) -> Result<T>
where
    T: Scalar,
    F: AsRef<RandomVariable<T>>,
{
    let v = v.as_ref();
    p.space().check_same(v.space())?;
    if !(tol > T::zero()) || !tol.is_finite() {
        return Err(GeometryError::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let func = func.into();
    let vals = v.values();
    if let Some(index) = vals.iter().position(|x| !x.is_finite()) {
        return Err(GeometryError::NonFinite {
            what: "variable",
            index,
        });
    }
    let top = v.sup_norm();
    if top.is_zero() {
        return Ok(T::zero());
    }
    let excess = |lambda: T| modular(p, vals, func, lambda) - T::one();

    let two = T::lit(2.0);
    let mut hi = top;
    let mut steps = 0;
    while excess(hi) > T::zero() {
        hi = hi * two;
        steps += 1;
        if steps > MAX_BRACKET_STEPS || !hi.is_finite() {
            return Err(GeometryError::RootFinding("upper bracket not found".into()));
        }
    }
    let mut lo = top;
    steps = 0;
    while excess(lo) < T::zero() {
        lo = lo / two;
        steps += 1;
        if steps > MAX_BRACKET_STEPS || lo.is_zero() {
            return Err(GeometryError::RootFinding("lower bracket not found".into()));
        }
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol * hi {
            return Ok((lo + hi) / two);
        }
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            // bracket exhausted at machine resolution
            return Ok(mid);
        }
        if excess(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(GeometryError::RootFinding(format!(
        "bisection did not reach relative tolerance {tol}"
    )))
}

/// Duality pairing `E_p[uv]` with the Orlicz bound `2‖u‖_{Φ*,p}‖v‖_{Φ,p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pairing<T> {
    pub value: T,
    pub bound: T,
}

impl<T: Scalar> Pairing<T> {
    pub fn holds(&self) -> bool {
        self.value.abs() <= self.bound * (T::one() + T::identity_tol())
    }
}

pub fn orlicz_pairing<T, U, V>(
    p: &Density<T>,
    u: &U,
    v: &V,
    kind: YoungPairKind,
    tol: T,
) -> Result<Pairing<T>>
where
    T: Scalar,
    U: AsRef<RandomVariable<T>>,
    V: AsRef<RandomVariable<T>>,
{
    let (u, v) = (u.as_ref(), v.as_ref());
    p.space().check_same(u.space())?;
    let uv = u.mul(v)?;
    let value = p.expect_values(uv.values());
    let nu = luxemburg_norm(p, u, YoungFunction::phi_star(kind), tol)?;
    let nv = luxemburg_norm(p, v, YoungFunction::phi(kind), tol)?;
    Ok(Pairing {
        value,
        bound: T::lit(2.0) * nu * nv,
    })
}
