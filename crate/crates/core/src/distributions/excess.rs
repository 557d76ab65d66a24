//! Excess-weight laws `X >= 0` with `inf supp X = 0`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Real;

/// Law of the excess edge weight `X` (the edge weight is `a + X`).
///
/// `DoubleExponential` is the normalized law `F(x) = exp(1 - e^(1/x))`,
/// whose inverse at `e^(-C u)` is `1 / ln(1 + C u)`. `Table` is a
/// piecewise-linear CDF through `(xs[i], cdf[i])` starting at `(0, 0)`.
/// `Zero` is the point mass at zero, used for degenerate test weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ExcessWeightLaw<T: Real> {
    Uniform01,
    Exponential { rate: T },
    PowerNearZero { beta: T },
    DoubleExponential,
    Table { xs: Vec<T>, cdf: Vec<T> },
    Zero,
}

/// How the tail `int_T^inf F^(-1)(e^(-C u)) / u du` of the explosiveness
/// integral is controlled for a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailControl<T> {
    /// Closed-form upper bound on the tail integral.
    Bounded(T),
    /// A minorant of the integrand whose integral diverges.
    Divergent,
    /// The family supplies no comparison function at this cut.
    Unknown,
}

impl<T: Real> ExcessWeightLaw<T> {
    pub fn exponential(rate: T) -> Result<Self> {
        Self::Exponential { rate }.validated()
    }

    pub fn power_near_zero(beta: T) -> Result<Self> {
        Self::PowerNearZero { beta }.validated()
    }

    pub fn table(xs: Vec<T>, cdf: Vec<T>) -> Result<Self> {
        Self::Table { xs, cdf }.validated()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Uniform01 => "uniform01",
            Self::Exponential { .. } => "exponential",
            Self::PowerNearZero { .. } => "power-near-zero",
            Self::DoubleExponential => "double-exponential",
            Self::Table { .. } => "table",
            Self::Zero => "zero",
        }
    }

    pub fn validated(self) -> Result<Self> {
        match &self {
            Self::Exponential { rate } if !(*rate > T::zero()) => {
                Err(Error::param(format!("exponential rate {rate} must be positive")))
            }
            Self::PowerNearZero { beta } if !(*beta > T::zero()) => {
                Err(Error::param(format!("power exponent {beta} must be positive")))
            }
            Self::Table { xs, cdf } => {
                if xs.len() < 2 || xs.len() != cdf.len() {
                    return Err(Error::param("weight table needs at least two matching points"));
                }
                if xs[0] != T::zero() || cdf[0] != T::zero() {
                    return Err(Error::param("weight table must start at (0, 0)"));
                }
                if xs.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::param("weight table abscissae must increase"));
                }
                if cdf.windows(2).any(|w| !(w[0] <= w[1])) {
                    return Err(Error::param("weight table CDF must be nondecreasing"));
                }
                if !(cdf[1] > T::zero()) {
                    return Err(Error::param("weight table must put mass near zero"));
                }
                if cdf[cdf.len() - 1] != T::one() {
                    return Err(Error::param("weight table CDF must end at 1"));
                }
                Ok(self)
            }
            _ => Ok(self),
        }
    }

    pub fn cdf(&self, x: T) -> T {
        let zero = T::zero();
        let one = T::one();
        if x < zero {
            return zero;
        }
        match self {
            Self::Uniform01 => x.min(one),
            Self::Exponential { rate } => -(-*rate * x).exp_m1(),
            Self::PowerNearZero { beta } => x.min(one).powf(*beta),
            Self::DoubleExponential => {
                if x == zero {
                    zero
                } else {
                    (one - x.recip().exp()).exp()
                }
            }
            Self::Table { xs, cdf } => {
                let last = xs.len() - 1;
                if x >= xs[last] {
                    return one;
                }
                let i = xs.partition_point(|v| *v <= x) - 1;
                let f = (x - xs[i]) / (xs[i + 1] - xs[i]);
                cdf[i] + (cdf[i + 1] - cdf[i]) * f
            }
            Self::Zero => one,
        }
    }

    /// Closed-form inverse of the CDF, accurate to a few ulps.
    fn raw_inverse(&self, y: T) -> T {
        let one = T::one();
        match self {
            Self::Uniform01 => y,
            Self::Exponential { rate } => -(-y).ln_1p() / *rate,
            Self::PowerNearZero { beta } => y.powf(beta.recip()),
            Self::DoubleExponential => {
                if y >= one {
                    T::infinity()
                } else {
                    (one - y.ln()).ln().recip()
                }
            }
            Self::Table { xs, cdf } => {
                let i = cdf.partition_point(|c| *c < y);
                if i == 0 {
                    return T::zero();
                }
                let (c0, c1) = (cdf[i - 1], cdf[i]);
                let f = (y - c0) / (c1 - c0);
                xs[i - 1] + (xs[i] - xs[i - 1]) * f
            }
            Self::Zero => T::zero(),
        }
    }

    /// Generalized inverse `inf { t : F(t) >= y }` for `y` in `[0, 1]`.
    ///
    /// The closed form is refined by bisection to the smallest floating-point
    /// `t` with `cdf(t) >= y`, so `cdf(inverse_cdf(y)) >= y` and
    /// `inverse_cdf(cdf(x)) <= x` hold exactly for the computed CDF.
    pub fn inverse_cdf(&self, y: T) -> T {
        let zero = T::zero();
        if y <= zero {
            return zero;
        }
        let mut t = self.raw_inverse(y.min(T::one()));
        if !t.is_finite() {
            return t;
        }
        t = t.max(zero);
        // bracket the answer as (lo, hi] with cdf(lo) < y <= cdf(hi), then bisect
        let tiny = T::min_positive_value();
        let (mut lo, mut hi);
        if self.cdf(t) < y {
            lo = t;
            let mut delta = (t * T::epsilon()).max(tiny);
            loop {
                hi = lo + delta;
                if !hi.is_finite() || self.cdf(hi) >= y {
                    break;
                }
                lo = hi;
                delta = delta + delta;
            }
            if !hi.is_finite() {
                return hi;
            }
        } else {
            hi = t;
            let mut delta = (t * T::epsilon()).max(tiny);
            loop {
                if hi <= zero {
                    return zero;
                }
                lo = (hi - delta).max(zero);
                if self.cdf(lo) < y {
                    break;
                }
                hi = lo;
                delta = delta + delta;
            }
        }
        loop {
            let mid = lo + (hi - lo) * T::lit(0.5);
            if mid <= lo || mid >= hi {
                return hi;
            }
            if self.cdf(mid) >= y {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// `F^(-1)(e^(-v))`, evaluated without underflow where the family allows.
    pub fn inverse_cdf_at_exp(&self, v: T) -> T {
        match self {
            Self::DoubleExponential if v > T::zero() => v.ln_1p().recip(),
            _ => self.inverse_cdf((-v).exp()),
        }
    }

    /// Draw by inversion; uses the closed form directly.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match self {
            Self::Zero => T::zero(),
            _ => {
                // (0, 1]
                let u: f64 = 1.0 - rng.random::<f64>();
                let y = T::lit(u);
                let x = self.raw_inverse(y);
                if x.is_finite() {
                    x
                } else {
                    T::max_value()
                }
            }
        }
    }

    pub fn mean(&self) -> Option<T> {
        match self {
            Self::Uniform01 => Some(T::lit(0.5)),
            Self::Exponential { rate } => Some(rate.recip()),
            Self::PowerNearZero { beta } => Some(*beta / (*beta + T::one())),
            Self::DoubleExponential => None,
            Self::Table { xs, cdf } => Some(
                xs.windows(2)
                    .zip(cdf.windows(2))
                    .map(|(x, c)| (c[1] - c[0]) * (x[0] + x[1]) * T::lit(0.5))
                    .sum(),
            ),
            Self::Zero => Some(T::zero()),
        }
    }

    /// Tail control of `int_cut^inf F^(-1)(e^(-C u)) / u du`.
    pub fn tail_control(&self, c: T, cut: T) -> TailControl<T> {
        let one = T::one();
        let ct = c * cut;
        match self {
            Self::Zero => TailControl::Bounded(T::zero()),
            // int_T^inf e^(-Cu)/u du <= e^(-CT)/(CT)
            Self::Uniform01 => TailControl::Bounded((-ct).exp() / ct),
            // -ln(1-y) <= y/(1-y) <= y/(1-e^(-CT)) for y <= e^(-CT)
            Self::Exponential { rate } => TailControl::Bounded((-ct).exp() / (ct * -(-ct).exp_m1() * *rate)),
            // y^(1/beta) = e^(-Cu/beta)
            Self::PowerNearZero { beta } => TailControl::Bounded(*beta * (-ct / *beta).exp() / ct),
            Self::Table { xs, cdf } => {
                // linear first segment: F^(-1)(y) = y x1 / F1 for y <= F1
                if (-ct).exp() <= cdf[1] {
                    TailControl::Bounded(xs[1] / cdf[1] * (-ct).exp() / ct)
                } else {
                    TailControl::Unknown
                }
            }
            // 1/ln(1 + Cu) >= 1/ln(2 C u) for C u >= 1, whose integral is ln ln(2 C u)
            Self::DoubleExponential => {
                if ct >= one {
                    TailControl::Divergent
                } else {
                    TailControl::Unknown
                }
            }
        }
    }

    /// Comparison density used by [`TailControl`] at `u`: a majorant of the
    /// integrand for bounded tails, a minorant for divergent ones.
    pub fn comparison_density(&self, c: T, u: T) -> Option<T> {
        let cu = c * u;
        match self {
            Self::Zero => Some(T::zero()),
            Self::Uniform01 => Some((-cu).exp() / u),
            Self::Exponential { rate } => Some((-cu).exp() / (-(-cu).exp_m1() * *rate) / u),
            Self::PowerNearZero { beta } => Some((-cu / *beta).exp() / u),
            Self::Table { xs, cdf } => Some(xs[1] / cdf[1] * (-cu).exp() / u),
            Self::DoubleExponential => Some(((T::lit(2.0) * cu).ln() * u).recip()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, stream_rng};

    fn canonical() -> Vec<ExcessWeightLaw<f64>> {
        vec![
            ExcessWeightLaw::Uniform01,
            ExcessWeightLaw::exponential(1.0).unwrap(),
            ExcessWeightLaw::exponential(3.5).unwrap(),
            ExcessWeightLaw::power_near_zero(0.25).unwrap(),
            ExcessWeightLaw::DoubleExponential,
            ExcessWeightLaw::table(vec![0.0, 0.5, 2.0], vec![0.0, 0.2, 1.0]).unwrap(),
        ]
    }

    #[test]
    fn infimum_of_support_is_zero() {
        for law in canonical() {
            assert_eq!(law.cdf(0.0), 0.0, "{}", law.name());
            assert!(law.cdf(1e-3) > 0.0 || law.name() == "double-exponential");
            assert_eq!(law.inverse_cdf(0.0), 0.0);
        }
        // positive everywhere above zero, though it underflows below about 0.1
        assert!(ExcessWeightLaw::<f64>::DoubleExponential.cdf(0.5) > 0.0);
    }

    #[test]
    fn double_exponential_inverse_closed_form() {
        let law = ExcessWeightLaw::<f64>::DoubleExponential;
        for &(c, u) in &[(1.0f64, 3.0f64), (2.0, 50.0), (0.5, 1e3)] {
            let x = law.inverse_cdf((-c * u).exp());
            let expected = 1.0 / (1.0 + c * u).ln();
            assert!(((x - expected) / expected).abs() < 1e-12);
        }
        assert!(law.inverse_cdf(1.0).is_infinite());
    }

    #[test]
    fn generalized_inverse_contract_on_grid() {
        for law in canonical() {
            for i in 1..1000 {
                let y = i as f64 / 1000.0;
                let x = law.inverse_cdf(y);
                assert!(law.cdf(x) >= y, "{} y={y}", law.name());
            }
            for i in 0..1000 {
                let x = i as f64 * 0.005;
                assert!(law.inverse_cdf(law.cdf(x)) <= x, "{} x={x}", law.name());
            }
        }
    }

    #[test]
    fn rejects_invalid_families() {
        assert!(ExcessWeightLaw::<f64>::exponential(0.0).is_err());
        assert!(ExcessWeightLaw::<f64>::power_near_zero(-1.0).is_err());
        assert!(ExcessWeightLaw::<f64>::table(vec![0.1, 1.0], vec![0.0, 1.0]).is_err());
        assert!(ExcessWeightLaw::<f64>::table(vec![0.0, 1.0, 2.0], vec![0.0, 0.0, 1.0]).is_err());
        assert!(ExcessWeightLaw::<f64>::table(vec![0.0, 1.0], vec![0.0, 0.9]).is_err());
    }

    #[test]
    fn uniform_law_of_large_numbers() {
        let law = ExcessWeightLaw::<f64>::Uniform01;
        let mut rng = stream_rng(3, stream::WEIGHTS);
        let n = 100_000;
        let mean = (0..n).map(|_| law.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01);
    }

    #[test]
    fn samples_follow_the_cdf() {
        let mut rng = stream_rng(11, stream::WEIGHTS);
        for law in canonical() {
            let n = 20_000;
            let mut xs: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            // Kolmogorov distance against the CDF; 1.63/sqrt(n) is the 1% level
            let d = xs
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let f = law.cdf(x);
                    (f - i as f64 / n as f64)
                        .abs()
                        .max((f - (i + 1) as f64 / n as f64).abs())
                })
                .fold(0.0, f64::max);
            assert!(d < 1.63 / (n as f64).sqrt(), "{} D={d}", law.name());
        }
    }

    #[test]
    fn f32_inverse_contract() {
        let law = ExcessWeightLaw::<f32>::exponential(2.0).unwrap();
        for i in 1..200 {
            let y = i as f32 / 200.0;
            assert!(law.cdf(law.inverse_cdf(y)) >= y);
        }
    }
}
