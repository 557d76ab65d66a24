//! Numerical decision of the explosiveness integral
//! `int_{1/eps}^inf F_X^(-1)(e^(-C u)) / u du < inf`.

use super::excess::{ExcessWeightLaw, TailControl};
use crate::error::{Error, Result};
use crate::numerics::integrate;
use crate::Real;

/// Relative tolerance of the finite-range quadrature.
pub const QUADRATURE_RTOL: f64 = 1e-6;
/// Factor by which a family's comparison density may be off on the sampled
/// window before the verdict is downgraded to inconclusive.
pub const TAIL_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Verdict {
    Explosive,
    Conservative,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplosivenessVerdict<T> {
    pub verdict: Verdict,
    /// Quadrature of the integral over `[1/eps, tail_cut]`.
    pub integral: T,
    pub tail_cut: T,
    /// Bound on the truncated tail plus the quadrature error; infinite when
    /// the tail is certified divergent or unknown.
    pub error_bound: T,
}

/// Decides whether `law` satisfies the explosiveness integral criterion.
pub fn explosiveness_check<T: Real>(
    law: &ExcessWeightLaw<T>,
    c: T,
    eps: T,
    tail_cut: T,
) -> Result<ExplosivenessVerdict<T>> {
    if !(c > T::zero()) || !(eps > T::zero()) {
        return Err(Error::param("C and eps must be positive"));
    }
    let start = eps.recip();
    if !(tail_cut > start) {
        return Err(Error::param(format!("tail cut {tail_cut} must exceed 1/eps = {start}")));
    }
    // u = e^s turns du/u into ds
    let integrand = |s: T| {
        let u = s.exp();
        let x = law.inverse_cdf_at_exp(c * u);
        if x.is_finite() {
            x
        } else {
            T::max_value().sqrt()
        }
    };
    let q = integrate(
        integrand,
        start.ln(),
        tail_cut.ln(),
        T::lit(QUADRATURE_RTOL),
        T::lit(1e-300),
    );
    if !q.value.is_finite() {
        return Err(Error::NoInverse(law.name().to_string()));
    }

    let control = law.tail_control(c, tail_cut);
    let consistent = comparison_holds(law, c, start, tail_cut, control);
    let (verdict, error_bound) = match (control, consistent) {
        (TailControl::Bounded(b), true) => (Verdict::Explosive, b + q.error),
        (TailControl::Divergent, true) => (Verdict::Conservative, T::infinity()),
        _ => (Verdict::Inconclusive, T::infinity()),
    };
    Ok(ExplosivenessVerdict {
        verdict,
        integral: q.value,
        tail_cut,
        error_bound,
    })
}

/// Samples the integrand against the family's comparison density on the
/// upper half (in log scale) of the computed window.
fn comparison_holds<T: Real>(law: &ExcessWeightLaw<T>, c: T, start: T, cut: T, control: TailControl<T>) -> bool {
    let margin = T::lit(TAIL_MARGIN);
    let (ls, lc) = (start.ln(), cut.ln());
    (0..=32).all(|i| {
        let f = T::lit(0.5) + T::lit(0.5) * T::from_count(i) / T::lit(32.0);
        let u = (ls + (lc - ls) * f).exp();
        let value = law.inverse_cdf_at_exp(c * u) / u;
        match (control, law.comparison_density(c, u)) {
            (TailControl::Bounded(_), Some(m)) => value <= m * margin,
            (TailControl::Divergent, Some(m)) => value * margin >= m,
            _ => false,
        }
    })
}
