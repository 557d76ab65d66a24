use rand::Rng;

use super::DegreeLaw;
use crate::error::{Error, Result};
use crate::Real;

/// Law of `B`, the size-biased degree minus one:
/// `P(B = k) = (k + 1) P(D = k + 1) / E[D]`.
///
/// Mass points up to the table length are stored explicitly; everything
/// beyond is kept as a single tail mass that is sampled by inverting the
/// exact tail function of the source law.
#[derive(Debug, Clone)]
pub struct SizeBiasedLaw<T: Real> {
    source: Option<DegreeLaw<T>>,
    mean_degree: T,
    pmf: Vec<T>,
    cdf: Vec<T>,
    tail_mass: T,
}

impl<T: Real> SizeBiasedLaw<T> {
    /// Offspring law given directly by a finite pmf over `0..pmf.len()`.
    pub fn from_pmf(pmf: Vec<T>) -> Result<Self> {
        if pmf.is_empty() || pmf.iter().any(|p| !(*p >= T::zero())) {
            return Err(Error::param("offspring pmf must be nonempty and nonnegative"));
        }
        let total: T = pmf.iter().copied().sum();
        if (total - T::one()).abs() > T::lit(1e-9) {
            return Err(Error::param(format!("offspring pmf sums to {total}")));
        }
        let cdf = cumulative(&pmf);
        Ok(Self {
            source: None,
            mean_degree: T::nan(),
            pmf,
            cdf,
            tail_mass: T::zero(),
        })
    }

    /// `P(B >= k)`.
    pub fn tail(&self, k: u64) -> T {
        if let Some(law) = &self.source {
            return size_biased_tail(law, self.mean_degree, k);
        }
        let k = k as usize;
        if k >= self.pmf.len() {
            T::zero()
        } else if k == 0 {
            T::one()
        } else {
            T::one() - self.cdf[k - 1]
        }
    }

    /// `P(B = k)`, including points beyond the table.
    pub fn pmf(&self, k: u64) -> T {
        match self.pmf.get(k as usize) {
            Some(p) => *p,
            None => self.tail(k) - self.tail(k + 1),
        }
    }

    /// Explicit mass points `P(B = 0..table_len)`.
    pub fn table(&self) -> &[T] {
        &self.pmf
    }

    /// Mass of `{B >= table_len}`.
    pub fn tail_mass(&self) -> T {
        self.tail_mass
    }

    /// Total mass of table plus tail.
    pub fn total_mass(&self) -> T {
        self.pmf.iter().copied().sum::<T>() + self.tail_mass
    }

    pub fn quantile(&self, u: T) -> u64 {
        let table_mass = *self.cdf.last().expect("nonempty table");
        if u < table_mass || self.source.is_none() {
            let i = self.cdf.partition_point(|c| *c <= u);
            return i.min(self.pmf.len() - 1) as u64;
        }
        // smallest k beyond the table with P(B >= k + 1) <= 1 - u
        let law = self.source.as_ref().expect("checked above");
        let target = T::one() - u;
        // P(B <= len - 1) = table mass <= u, so len - 1 is below the answer
        let mut lo = self.pmf.len() as u64 - 1;
        let mut hi = lo + 1;
        while size_biased_tail(law, self.mean_degree, hi + 1) > target {
            if hi >= (1u64 << 62) {
                return hi;
            }
            lo = hi;
            hi = hi.saturating_mul(2);
        }
        // invariant: tail(lo + 1) > target >= tail(hi + 1), answer in (lo, hi]
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if size_biased_tail(law, self.mean_degree, mid + 1) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        self.quantile(T::lit(u))
    }

    pub fn is_degenerate_at(&self, k: u64) -> bool {
        self.pmf(k) == T::one()
    }
}

fn cumulative<T: Real>(pmf: &[T]) -> Vec<T> {
    let mut acc = T::zero();
    pmf.iter()
        .map(|p| {
            acc = acc + *p;
            acc
        })
        .collect()
}

/// `P(B >= k) = [(k + 1) P(D > k) + sum_{i > k} P(D > i)] / E[D]`.
fn size_biased_tail<T: Real>(law: &DegreeLaw<T>, mean: T, k: u64) -> T {
    if k == 0 {
        return T::one();
    }
    let k1 = T::from_u64(k + 1).expect("representable");
    ((k1 * law.survival(k) + law.survival_sum(k + 1)) / mean).min(T::one())
}

/// Size-biased offspring law of `law`, tabulated on `0..=truncation` with
/// the remaining mass collapsed into an exact tail.
pub fn size_biased<T: Real>(law: &DegreeLaw<T>, truncation: u64) -> Result<SizeBiasedLaw<T>> {
    if let Some(tau) = law.tau() {
        if tau <= T::lit(2.0) {
            return Err(Error::param("size-biasing needs a finite-mean degree law (tau > 2)"));
        }
    }
    let mean = law.mean();
    if !mean.is_finite() || mean <= T::zero() {
        return Err(Error::param(format!(
            "degree law mean {mean} is not finite and positive"
        )));
    }
    let len = truncation as usize + 1;
    let mut pmf = Vec::with_capacity(len);
    for k in 0..len as u64 {
        pmf.push(T::from_u64(k + 1).expect("representable") * law.pmf(k + 1) / mean);
    }
    let tail_mass = size_biased_tail(law, mean, truncation + 1);
    let cdf = cumulative(&pmf);
    let table_only = matches!(law, DegreeLaw::Table { .. });
    Ok(SizeBiasedLaw {
        source: if table_only { None } else { Some(law.clone()) },
        mean_degree: mean,
        pmf,
        cdf,
        tail_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_degree_gives_constant_offspring() {
        let d3 = DegreeLaw::<f64>::table(vec![3], vec![1.0]).unwrap();
        let b = size_biased(&d3, 10).unwrap();
        assert!(b.is_degenerate_at(2));
        assert_eq!(b.quantile(0.0), 2);
        assert_eq!(b.quantile(0.999), 2);
    }

    #[test]
    fn two_point_degree_law() {
        // E[D] = 2.5, P(B=1) = 2*0.5/2.5, P(B=2) = 3*0.5/2.5
        let d = DegreeLaw::<f64>::table(vec![2, 3], vec![0.5, 0.5]).unwrap();
        let b = size_biased(&d, 10).unwrap();
        assert!((b.pmf(1) - 0.4).abs() < 1e-15);
        assert!((b.pmf(2) - 0.6).abs() < 1e-15);
        assert_eq!(b.pmf(0), 0.0);
    }

    #[test]
    fn pure_power_mass_is_one() {
        let law = DegreeLaw::<f64>::pure_power(2.5).unwrap();
        for trunc in [10, 1000, 100_000] {
            let b = size_biased(&law, trunc).unwrap();
            assert!((b.total_mass() - 1.0).abs() < 1e-9, "trunc {trunc}: {}", b.total_mass());
        }
    }

    #[test]
    fn tail_is_consistent_with_table() {
        let law = DegreeLaw::<f64>::pure_power(2.5).unwrap();
        let b = size_biased(&law, 1000).unwrap();
        let head: f64 = (0..500).map(|k| b.pmf(k)).sum();
        assert!((1.0 - head - b.tail(500)).abs() < 1e-12);
    }

    #[test]
    fn tail_sampling_inverts_the_tail() {
        let law = DegreeLaw::<f64>::pure_power(2.5).unwrap();
        let b = size_biased(&law, 100).unwrap();
        for &u in &[0.99, 0.999, 0.999_999, 0.999_999_999] {
            let k = b.quantile(u);
            assert!(k > 100);
            // P(B <= k) >= u and P(B <= k - 1) < u
            assert!(1.0 - b.tail(k + 1) >= u - 1e-15);
            assert!(1.0 - b.tail(k) < u + 1e-15);
        }
    }

    #[test]
    fn explicit_pmf_sampling() {
        let b = SizeBiasedLaw::<f64>::from_pmf(vec![1.0]).unwrap();
        assert_eq!(b.quantile(0.7), 0);
        let b = SizeBiasedLaw::<f64>::from_pmf(vec![0.25, 0.0, 0.75]).unwrap();
        assert_eq!(b.quantile(0.1), 0);
        assert_eq!(b.quantile(0.25), 2);
        assert!(SizeBiasedLaw::<f64>::from_pmf(vec![0.5]).is_err());
    }
}
