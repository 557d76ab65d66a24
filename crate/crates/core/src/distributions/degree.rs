//! Integer degree laws with power-law tails.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hurwitz_zeta, integrate};
use crate::rng::{stream, stream_rng};
use crate::Real;

fn default_min_degree() -> u64 {
    2
}

fn default_band_gamma<T: Real>() -> T {
    T::lit(0.5)
}

fn default_band_c<T: Real>() -> T {
    T::one()
}

/// Degree distribution `D`.
///
/// The two power families are integerized continuous laws:
/// `D = max(min_degree, ceil(V))` where `V >= 1` has survival function
///
/// * pure-power: `P(V > x) = x^-(tau - 1)`
/// * corrected-power: `P(V > x) = exp(-(tau - 1) ln x - (c / 2) (ln x)^gamma)`
///
/// `gamma` and `c` describe the slowly-varying band
/// `x^(-tau + 1 - c (ln x)^(gamma - 1)) <= 1 - F(x) <= x^(-tau + 1 + c (ln x)^(gamma - 1))`
/// that both families are checked against. The table family is an explicit
/// pmf and is only used for small hand-checkable cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum DegreeLaw<T: Real> {
    PurePower {
        tau: T,
        #[serde(default = "default_band_gamma")]
        gamma: T,
        #[serde(default = "default_band_c")]
        c: T,
        #[serde(default = "default_min_degree")]
        min_degree: u64,
    },
    CorrectedPower {
        tau: T,
        gamma: T,
        c: T,
        #[serde(default = "default_min_degree")]
        min_degree: u64,
    },
    Table {
        degrees: Vec<u64>,
        probs: Vec<T>,
    },
}

/// Outcome of [`DegreeLaw::band_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct BandReport<T> {
    pub checked: usize,
    /// First `x` at which the survival function left the band.
    pub first_violation: Option<T>,
}

impl<T: Real> DegreeLaw<T> {
    pub fn pure_power(tau: T) -> Result<Self> {
        Self::PurePower {
            tau,
            gamma: T::lit(0.5),
            c: T::one(),
            min_degree: 2,
        }
        .validated()
    }

    pub fn corrected_power(tau: T, gamma: T, c: T) -> Result<Self> {
        Self::CorrectedPower {
            tau,
            gamma,
            c,
            min_degree: 2,
        }
        .validated()
    }

    pub fn table(degrees: Vec<u64>, probs: Vec<T>) -> Result<Self> {
        Self::Table { degrees, probs }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match &self {
            Self::PurePower {
                tau,
                gamma,
                c,
                min_degree,
            }
            | Self::CorrectedPower {
                tau,
                gamma,
                c,
                min_degree,
            } => {
                let two = T::lit(2.0);
                if !(*tau > two && *tau < T::lit(3.0)) {
                    return Err(Error::param(format!("tau = {tau} not in (2, 3)")));
                }
                if !(*gamma > T::zero() && *gamma < T::one()) {
                    return Err(Error::param(format!("gamma = {gamma} not in (0, 1)")));
                }
                if !(*c > T::zero()) {
                    return Err(Error::param(format!("C = {c} must be positive")));
                }
                if *min_degree < 2 {
                    return Err(Error::param(format!("minimum degree {min_degree} below 2")));
                }
            }
            Self::Table { degrees, probs } => {
                if degrees.is_empty() || degrees.len() != probs.len() {
                    return Err(Error::param("degree table needs matching nonempty columns"));
                }
                if degrees.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::param("degree table must be strictly increasing"));
                }
                if degrees[0] < 1 {
                    return Err(Error::param("degree table entries must be at least 1"));
                }
                if probs.iter().any(|p| !(*p >= T::zero())) {
                    return Err(Error::param("degree table probabilities must be nonnegative"));
                }
                let total: T = probs.iter().copied().sum();
                if (total - T::one()).abs() > T::lit(1e-9).max(T::epsilon() * T::lit(16.0)) {
                    return Err(Error::param(format!("degree table sums to {total}")));
                }
            }
        }
        Ok(self)
    }

    pub fn tau(&self) -> Option<T> {
        match self {
            Self::PurePower { tau, .. } | Self::CorrectedPower { tau, .. } => Some(*tau),
            Self::Table { .. } => None,
        }
    }

    pub fn min_degree(&self) -> u64 {
        match self {
            Self::PurePower { min_degree, .. } | Self::CorrectedPower { min_degree, .. } => *min_degree,
            Self::Table { degrees, .. } => degrees[0],
        }
    }

    /// Survival function of the continuous variable `V` at `x >= 1`.
    fn continuous_survival(&self, x: T) -> T {
        match self {
            Self::PurePower { tau, .. } => x.powf(T::one() - *tau),
            Self::CorrectedPower { tau, gamma, c, .. } => {
                let l = x.ln().max(T::zero());
                (-(*tau - T::one()) * l - *c * T::lit(0.5) * l.powf(*gamma)).exp()
            }
            Self::Table { .. } => unreachable!("table law has no continuous part"),
        }
    }

    /// Inverse of [`Self::continuous_survival`]: the `x` with `P(V > x) = q`.
    fn continuous_quantile(&self, q: T) -> T {
        let e = -q.ln();
        match self {
            Self::PurePower { tau, .. } => (e / (*tau - T::one())).exp(),
            Self::CorrectedPower { tau, gamma, c, .. } => {
                // solve s L + (c/2) L^gamma = e on [0, e / s]
                let s = *tau - T::one();
                let half_c = *c * T::lit(0.5);
                let (mut lo, mut hi) = (T::zero(), e / s);
                for _ in 0..200 {
                    let mid = (lo + hi) * T::lit(0.5);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if s * mid + half_c * mid.powf(*gamma) < e {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi.exp()
            }
            Self::Table { .. } => unreachable!("table law has no continuous part"),
        }
    }

    /// `P(D > k)`.
    pub fn survival(&self, k: u64) -> T {
        match self {
            Self::Table { degrees, probs } => degrees
                .iter()
                .zip(probs)
                .filter(|(d, _)| **d > k)
                .map(|(_, p)| *p)
                .sum(),
            _ => {
                if k < self.min_degree() {
                    T::one()
                } else {
                    self.continuous_survival(T::from_u64(k).expect("degree representable"))
                }
            }
        }
    }

    /// `1 - P(D > x)` for real `x`.
    pub fn cdf(&self, x: T) -> T {
        if x < T::zero() {
            return T::zero();
        }
        let k = x.floor().to_u64().unwrap_or(u64::MAX);
        T::one() - self.survival(k)
    }

    pub fn pmf(&self, k: u64) -> T {
        match self {
            Self::Table { degrees, probs } => degrees.iter().position(|d| *d == k).map_or(T::zero(), |i| probs[i]),
            _ => {
                let m = self.min_degree();
                if k < m {
                    T::zero()
                } else if k == m {
                    T::one() - self.survival(m)
                } else {
                    self.survival(k - 1) - self.survival(k)
                }
            }
        }
    }

    /// `sum_{k >= from} P(D > k)`.
    pub fn survival_sum(&self, from: u64) -> T {
        match self {
            Self::Table { degrees, probs } => degrees
                .iter()
                .zip(probs)
                .filter(|(d, _)| **d > from)
                .map(|(d, p)| T::from_u64(*d - from).expect("representable") * *p)
                .sum(),
            Self::PurePower { tau, min_degree, .. } => {
                let m = *min_degree;
                let head = T::from_u64(m.saturating_sub(from)).expect("representable");
                let start = from.max(m);
                head + hurwitz_zeta(*tau - T::one(), T::from_u64(start).expect("representable"))
            }
            Self::CorrectedPower {
                tau,
                gamma,
                c,
                min_degree,
            } => {
                let m = *min_degree;
                let head = T::from_u64(m.saturating_sub(from)).expect("representable");
                let start = from.max(m);
                // direct sum, then Euler–Maclaurin with the first derivative term
                let switch = start.max(1000);
                let mut sum = head;
                for k in start..switch {
                    sum = sum + self.survival(k);
                }
                let s = *tau - T::one();
                let big_m = T::from_u64(switch).expect("representable");
                let f_m = self.continuous_survival(big_m);
                let l_m = big_m.ln();
                let deriv = -f_m * (s + *c * T::lit(0.5) * *gamma * l_m.powf(*gamma - T::one())) / big_m;
                // int_M^inf S(x) dx with x = M e^t
                let t_max = T::lit(60.0) / (s - T::one()).max(T::lit(1e-3));
                let tail = integrate(
                    |t: T| {
                        let x = big_m * t.exp();
                        self.continuous_survival(x) * x
                    },
                    T::zero(),
                    t_max,
                    T::lit(1e-12),
                    T::zero(),
                );
                sum + tail.value + f_m * T::lit(0.5) - deriv / T::lit(12.0)
            }
        }
    }

    /// `E[D]`.
    pub fn mean(&self) -> T {
        self.survival_sum(0)
    }

    /// One degree by inversion of a uniform `u` in `[0, 1)`.
    pub fn quantile(&self, u: T) -> u64 {
        match self {
            Self::Table { degrees, probs } => {
                let mut acc = T::zero();
                for (d, p) in degrees.iter().zip(probs) {
                    acc = acc + *p;
                    if u < acc {
                        return *d;
                    }
                }
                *degrees.last().expect("nonempty")
            }
            _ => {
                let q = T::one() - u;
                if q <= T::zero() {
                    return u64::MAX / 4;
                }
                let v = self.continuous_quantile(q).ceil();
                let k = v.to_u64().unwrap_or(u64::MAX / 4).min(u64::MAX / 4);
                k.max(self.min_degree())
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        self.quantile(T::lit(u))
    }

    /// Checks `P(D > x)` against the `(gamma, c)` band on a log grid of
    /// `points` values in `[lo, hi]`, plus the points just below each
    /// integer in range (where the step function is highest).
    pub fn band_check(&self, lo: T, hi: T, points: usize) -> BandReport<T> {
        let (gamma, c) = match self {
            Self::PurePower { gamma, c, .. } | Self::CorrectedPower { gamma, c, .. } => (*gamma, *c),
            Self::Table { .. } => {
                return BandReport {
                    checked: 0,
                    first_violation: None,
                }
            }
        };
        let s = self.tau().expect("power family") - T::one();
        let mut xs = Vec::with_capacity(points * 2);
        let (llo, lhi) = (lo.ln(), hi.ln());
        for i in 0..points {
            let f = T::from_count(i) / T::from_count(points.max(2) - 1);
            let x = (llo + (lhi - llo) * f).exp();
            xs.push(x);
            let below = x.floor() + T::one() - T::lit(1e-9);
            if below <= hi {
                xs.push(below);
            }
        }
        xs.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        for (i, &x) in xs.iter().enumerate() {
            if x <= T::one() {
                continue;
            }
            let slack = c * x.ln().powf(gamma - T::one());
            let surv = T::one() - self.cdf(x);
            let lower = x.powf(-s - slack);
            let upper = x.powf(-s + slack);
            if surv < lower || surv > upper {
                return BandReport {
                    checked: i,
                    first_violation: Some(x),
                };
            }
        }
        BandReport {
            checked: xs.len(),
            first_violation: None,
        }
    }
}

/// `n` i.i.d. degrees drawn from the degree stream of `seed`.
pub fn sample_degrees<T: Real>(law: &DegreeLaw<T>, n: usize, seed: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::param("need at least one degree"));
    }
    let mut rng = stream_rng(seed, stream::DEGREES);
    Ok((0..n).map(|_| law.sample(&mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_cdf_hand_value() {
        let law = DegreeLaw::<f64>::pure_power(2.5).unwrap();
        // ceil(0.01^(-1/1.5)) = ceil(21.544) = 22
        assert_eq!(law.quantile(0.99), 22);
        assert_eq!(law.quantile(0.0), 2);
        assert_eq!(law.quantile(1e-12), 2);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DegreeLaw::<f64>::pure_power(2.0).is_err());
        assert!(DegreeLaw::<f64>::pure_power(3.0).is_err());
        assert!(DegreeLaw::<f64>::corrected_power(2.5, 1.0, 1.0).is_err());
        assert!(DegreeLaw::<f64>::corrected_power(2.5, 0.5, 0.0).is_err());
        assert!(DegreeLaw::<f64>::table(vec![2, 3], vec![0.5, 0.6]).is_err());
        let bad_min = DegreeLaw::<f64>::PurePower {
            tau: 2.5,
            gamma: 0.5,
            c: 1.0,
            min_degree: 1,
        };
        assert!(bad_min.validated().is_err());
    }

    #[test]
    fn cdf_at_one_is_zero() {
        for law in [
            DegreeLaw::<f64>::pure_power(2.3).unwrap(),
            DegreeLaw::<f64>::corrected_power(2.7, 0.4, 2.0).unwrap(),
        ] {
            assert_eq!(law.cdf(1.0), 0.0);
            assert_eq!(law.pmf(1), 0.0);
        }
    }

    #[test]
    fn pure_power_mean_closed_form() {
        // E[D] = 2 + zeta(1.5, 2) = 1 + zeta(1.5)
        let law = DegreeLaw::<f64>::pure_power(2.5).unwrap();
        assert!((law.mean() - (1.0 + 2.612_375_348_685_488)).abs() < 1e-12);
    }

    #[test]
    fn corrected_power_survival_sum_matches_direct_sum() {
        let law = DegreeLaw::<f64>::corrected_power(2.2, 0.5, 1.0).unwrap();
        // large exponent so a direct sum converges quickly enough to compare
        let law_fast = DegreeLaw::<f64>::corrected_power(2.9, 0.5, 1.0).unwrap();
        let direct: f64 = (5..2_000_000u64).map(|k| law_fast.survival(k)).sum();
        let tail_estimate = law_fast.survival(2_000_000) * 2.0e6 / 0.9;
        assert!((law_fast.survival_sum(5) - direct - tail_estimate).abs() < 1e-6);
        assert!(law.mean().is_finite() && law.mean() > 2.0);
    }

    #[test]
    fn pmf_sums_to_one() {
        let law = DegreeLaw::<f64>::pure_power(2.5).unwrap();
        let head: f64 = (0..100_000u64).map(|k| law.pmf(k)).sum();
        assert!((head + law.survival(99_999) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_families_stay_in_band() {
        for law in [
            DegreeLaw::<f64>::pure_power(2.5).unwrap(),
            DegreeLaw::<f64>::corrected_power(2.5, 0.5, 1.0).unwrap(),
        ] {
            let report = law.band_check(2.0, 1.0e6, 400);
            assert_eq!(report.first_violation, None, "{law:?}");
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let law = DegreeLaw::<f64>::pure_power(2.5).unwrap();
        let a = sample_degrees(&law, 1000, 9).unwrap();
        assert_eq!(a, sample_degrees(&law, 1000, 9).unwrap());
        assert_ne!(a, sample_degrees(&law, 1000, 10).unwrap());
        assert!(a.iter().all(|&d| d >= 2));
        assert!(sample_degrees(&law, 0, 1).is_err());
    }

    #[test]
    fn f32_sampler_agrees_with_f64() {
        let l32 = DegreeLaw::<f32>::pure_power(2.5).unwrap();
        let l64 = DegreeLaw::<f64>::pure_power(2.5).unwrap();
        for u in [0.1, 0.5, 0.9, 0.99] {
            assert_eq!(l32.quantile(u as f32), l64.quantile(u));
        }
    }

    #[test]
    fn law_round_trips_through_toml() {
        let law = DegreeLaw::<f64>::corrected_power(2.5, 0.5, 1.5).unwrap();
        let text = toml::to_string(&law).unwrap();
        assert!(text.contains("family = \"corrected-power\""));
        let back: DegreeLaw<f64> = toml::from_str(&text).unwrap();
        assert_eq!(back, law);
        let short: DegreeLaw<f64> = toml::from_str("family = \"pure-power\"\ntau = 2.5\n").unwrap();
        assert_eq!(short, DegreeLaw::pure_power(2.5).unwrap());
    }
}
