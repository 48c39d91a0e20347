use crate::error::{GeometryError, Result};
use crate::manifold::chart_inverse;
use crate::scalar::Scalar;
use crate::space::Density;
use crate::transport::{duality, e_transport, m_transport, PretangentVector, TangentVector};

/// Residual `|D_H⟨F,G⟩ − ⟨D_H F, G⟩ − ⟨F, D_H G⟩|` at `q`.
///
/// Covariant derivatives are central differences of width `step` along the
/// exponential curve `s ↦ e_q(s·H(q))`, with `F` pulled back by the mixture
/// transport and `G` by the exponential transport. The residual is `O(step²)`.
pub fn covariant_derivative_product_rule_check<T, F, G, H>(
    f: F,
    g: G,
    h: H,
    q: &Density<T>,
    step: T,
) -> Result<T>
where
    T: Scalar,
    F: Fn(&Density<T>) -> Result<PretangentVector<T>>,
    G: Fn(&Density<T>) -> Result<TangentVector<T>>,
    H: Fn(&Density<T>) -> Result<TangentVector<T>>,
{
    if !(step > T::zero()) {
        return Err(GeometryError::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    let dir = h(q)?;
    let along = |s: T| chart_inverse(q, &dir.value().scale(s));
    let fwd = along(step)?;
    let bwd = along(-step)?;

    let f_fwd = f(&fwd)?;
    let f_bwd = f(&bwd)?;
    let g_fwd = g(&fwd)?;
    let g_bwd = g(&bwd)?;

    let coupling_fwd = duality(&fwd, &f_fwd, &g_fwd)?;
    let coupling_bwd = duality(&bwd, &f_bwd, &g_bwd)?;
    let two_step = step + step;
    let lhs = (coupling_fwd - coupling_bwd) / two_step;

    let fm_fwd = m_transport(&fwd, q, &f_fwd)?;
    let fm_bwd = m_transport(&bwd, q, &f_bwd)?;
    let ge_fwd = e_transport(&fwd, q, &g_fwd)?;
    let ge_bwd = e_transport(&bwd, q, &g_bwd)?;
    let f0 = f(q)?;
    let g0 = g(q)?;

    let mut rhs_terms = Vec::with_capacity(q.len());
    for i in 0..q.len() {
        let df = (fm_fwd.values()[i] - fm_bwd.values()[i]) / two_step;
        let dg = (ge_fwd.values()[i] - ge_bwd.values()[i]) / two_step;
        rhs_terms.push(df * g0.values()[i] + f0.values()[i] * dg);
    }
    let rhs = q.expect_values(&rhs_terms);
    let residual = (lhs - rhs).abs();
    if !residual.is_finite() {
        return Err(GeometryError::NonFinite {
            what: "product rule residual",
            index: 0,
        });
    }
    Ok(residual)
}
