//! Fibers of the tangent, pretangent and Hilbert bundles and the three
//! parallel transports between them.
//!
//! On a finite sample space every fiber is the space of variables centered at
//! the base density; the bundles differ by norm and by the transport that
//! moves vectors between fibers:
//!
//! * exponential: `u ↦ u − E_q[u]`
//! * mixture: `v ↦ (p/q)·v`
//! * isometric: `v ↦ √(p/q)·v − (1 + E_q√(p/q))⁻¹ (1 + √(p/q)) E_q[√(p/q)·v]`

use crate::error::{GeometryError, Result};
use crate::scalar::Scalar;
use crate::space::{center, CenteredRandomVariable, Density, RandomVariable};

macro_rules! fiber_vector {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone)]
        pub struct $name<T>(CenteredRandomVariable<T>);

        impl<T: Scalar> $name<T> {
            pub fn new(value: CenteredRandomVariable<T>) -> Self {
                Self(value)
            }

            /// Centers `f` at `base` and wraps it.
            pub fn centered(base: &Density<T>, f: &RandomVariable<T>) -> Result<Self> {
                center(base, f).map(Self)
            }

            pub fn zero(base: Density<T>) -> Self {
                Self(CenteredRandomVariable::zero(base))
            }

            pub fn base(&self) -> &Density<T> {
                self.0.base()
            }

            pub fn value(&self) -> &CenteredRandomVariable<T> {
                &self.0
            }

            pub fn values(&self) -> &[T] {
                self.0.values()
            }

            pub fn into_inner(self) -> CenteredRandomVariable<T> {
                self.0
            }
        }

        impl<T> AsRef<RandomVariable<T>> for $name<T> {
            fn as_ref(&self) -> &RandomVariable<T> {
                self.0.as_ref()
            }
        }

        impl<T: Scalar> From<CenteredRandomVariable<T>> for $name<T> {
            fn from(value: CenteredRandomVariable<T>) -> Self {
                Self(value)
            }
        }
    };
}

fiber_vector!(
    /// Element `(p, u)` of the tangent bundle, `u ∈ B_p`.
    TangentVector
);
fiber_vector!(
    /// Element `(p, v)` of the pretangent bundle, `v ∈ *B_p`.
    PretangentVector
);
fiber_vector!(
    /// Element of the Hilbert bundle; same representation, `L²(p)` norm.
    HilbertVector
);

fn rebased<T: Scalar>(q: &Density<T>, values: Vec<T>) -> CenteredRandomVariable<T> {
    CenteredRandomVariable::from_parts_unchecked(
        q.clone(),
        RandomVariable::from_parts_unchecked(q.space().clone(), values),
    )
}

/// Exponential transport `ᵉU_p^q u = u − E_q[u]`.
pub fn e_transport<T: Scalar>(
    p: &Density<T>,
    q: &Density<T>,
    u: &TangentVector<T>,
) -> Result<TangentVector<T>> {
    p.space().check_same(q.space())?;
    u.base().check_base(p)?;
    let e = q.expect_values(u.values());
    Ok(TangentVector(rebased(
        q,
        u.values().iter().map(|&x| x - e).collect(),
    )))
}

/// Mixture transport `ᵐU_p^q v = (p/q)·v`.
pub fn m_transport<T: Scalar>(
    p: &Density<T>,
    q: &Density<T>,
    v: &PretangentVector<T>,
) -> Result<PretangentVector<T>> {
    p.space().check_same(q.space())?;
    v.base().check_base(p)?;
    let values = v
        .values()
        .iter()
        .zip(p.values().iter().zip(q.values()))
        .map(|(&x, (&a, &b))| a / b * x)
        .collect();
    Ok(PretangentVector(rebased(q, values)))
}

/// Duality coupling `⟨v, w⟩_r = E_r[v·w]` between fibers over the same base.
pub fn duality<T: Scalar>(
    base: &Density<T>,
    v: &PretangentVector<T>,
    w: &TangentVector<T>,
) -> Result<T> {
    v.base().check_base(base)?;
    w.base().check_base(base)?;
    let prod: Vec<T> = v
        .values()
        .iter()
        .zip(w.values())
        .map(|(&a, &b)| a * b)
        .collect();
    Ok(base.expect_values(&prod))
}

/// Isometric transport of `H_p` onto `H_q`.
pub fn isometric_transport<T: Scalar>(
    p: &Density<T>,
    q: &Density<T>,
    v: &HilbertVector<T>,
) -> Result<HilbertVector<T>> {
    p.space().check_same(q.space())?;
    v.base().check_base(p)?;
    let root: Vec<T> = p
        .values()
        .iter()
        .zip(q.values())
        .map(|(&a, &b)| (a / b).sqrt())
        .collect();
    let mean_root = q.expect_values(&root);
    let weighted: Vec<T> = root.iter().zip(v.values()).map(|(&r, &x)| r * x).collect();
    let coupling = q.expect_values(&weighted) / (T::one() + mean_root);
    let values = root
        .iter()
        .zip(&weighted)
        .map(|(&r, &rv)| rv - (T::one() + r) * coupling)
        .collect();
    Ok(HilbertVector(rebased(q, values)))
}

/// `‖v‖_{L¹(p)}` at the vector's base.
pub fn l1_norm<T: Scalar>(v: &CenteredRandomVariable<T>) -> T {
    let abs: Vec<T> = v.values().iter().map(|x| x.abs()).collect();
    v.base().expect_values(&abs)
}

/// `‖v‖_{L²(p)}` at the vector's base.
pub fn l2_norm<T: Scalar>(v: &CenteredRandomVariable<T>) -> T {
    let sq: Vec<T> = v.values().iter().map(|&x| x * x).collect();
    v.base().expect_values(&sq).sqrt()
}

/// `⟨u, w⟩_{L²(p)}` for vectors over the same base.
pub fn l2_inner<T: Scalar>(u: &CenteredRandomVariable<T>, w: &CenteredRandomVariable<T>) -> Result<T> {
    u.base().check_base(w.base())?;
    let prod: Vec<T> = u.values().iter().zip(w.values()).map(|(&a, &b)| a * b).collect();
    Ok(u.base().expect_values(&prod))
}

/// Residual of the derivative identity for `t ↦ ᵀU_{p(t)}^{p} F(p(t))`.
///
/// With `p = p(t)`, `G(s) = F(p(s))` and `δp = d/ds ln p(s)`, the derivative
/// at `s = t` must equal `Ġ + ½δp·G − E_p[Ġ + ½δp·G]`. Every derivative is a
/// central difference of width `h`, so the residual (sup norm) is `O(h²)`.
pub fn hilbert_transport_derivative_check<T, C, F>(curve: C, field: F, t: T, h: T) -> Result<T>
where
    T: Scalar,
    C: Fn(T) -> Result<Density<T>>,
    F: Fn(&Density<T>) -> Result<HilbertVector<T>>,
{
    if !(h > T::zero()) {
        return Err(GeometryError::InvalidArgument(format!(
            "step must be positive, got {h}"
        )));
    }
    let p = curve(t)?;
    let fwd = curve(t + h)?;
    let bwd = curve(t - h)?;
    let g0 = field(&p)?;
    let g_fwd = field(&fwd)?;
    let g_bwd = field(&bwd)?;
    let moved_fwd = isometric_transport(&fwd, &p, &g_fwd)?;
    let moved_bwd = isometric_transport(&bwd, &p, &g_bwd)?;

    let two_h = h + h;
    let half = T::lit(0.5);
    let n = p.len();
    let mut expected = Vec::with_capacity(n);
    let mut observed = Vec::with_capacity(n);
    for i in 0..n {
        let g_dot = (g_fwd.values()[i] - g_bwd.values()[i]) / two_h;
        let score = (fwd.values()[i].ln() - bwd.values()[i].ln()) / two_h;
        expected.push(g_dot + half * score * g0.values()[i]);
        observed.push((moved_fwd.values()[i] - moved_bwd.values()[i]) / two_h);
    }
    let shift = p.expect_values(&expected);
    let mut residual = T::zero();
    for (i, (e, o)) in expected.iter().zip(&observed).enumerate() {
        let d = (*o - (*e - shift)).abs();
        if !d.is_finite() {
            return Err(GeometryError::NonFinite {
                what: "transport derivative",
                index: i,
            });
        }
        residual = residual.max(d);
    }
    Ok(residual)
}
