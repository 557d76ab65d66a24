use crate::Real;

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    /// Sum of the local Gauss/Kronrod discrepancies.
    pub error: T,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let c = (a + b) * half;
    let h = (b - a) * half;
    let fc = f(c);
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = h * T::lit(XGK[j]);
        let s = f(c - dx) + f(c + dx);
        k = k + s * T::lit(WGK[j]);
        if j % 2 == 1 {
            g = g + s * T::lit(WG[j / 2]);
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive 7/15-point Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Bisects the interval with the worst local error until the summed error
/// is below `max(abs_tol, rel_tol * |value|)` or `max_intervals` is reached.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, rel_tol: T, abs_tol: T) -> Quadrature<T> {
    const MAX_INTERVALS: usize = 4000;
    let (v0, e0) = kronrod(&f, a, b);
    let mut parts = vec![(a, b, v0, e0)];
    let mut evaluations = 15;
    loop {
        let value: T = parts.iter().map(|p| p.2).sum();
        let error: T = parts.iter().map(|p| p.3).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) || parts.len() >= MAX_INTERVALS {
            return Quadrature {
                value,
                error,
                evaluations,
            };
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(std::cmp::Ordering::Equal))
            .expect("nonempty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = (lo + hi) * T::lit(0.5);
        let (vl, el) = kronrod(&f, lo, mid);
        let (vr, er) = kronrod(&f, mid, hi);
        evaluations += 30;
        parts.push((lo, mid, vl, el));
        parts.push((mid, hi, vr, er));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_exponential() {
        let q = integrate(|x: f64| x * x, 0.0, 3.0, 1e-12, 0.0);
        assert!((q.value - 9.0).abs() < 1e-12);
        let q = integrate(|x: f64| (-x).exp(), 0.0, 50.0, 1e-10, 0.0);
        assert!((q.value - (1.0 - (-50.0f64).exp())).abs() < 1e-9);
    }

    #[test]
    fn works_in_f32() {
        let q = integrate(|x: f32| x.sin(), 0.0, std::f32::consts::PI, 1e-5, 0.0);
        assert!((q.value - 2.0).abs() < 1e-4);
    }

    #[test]
    fn log_singularity() {
        // int_0^1 -ln x dx = 1
        let q = integrate(|x: f64| -(x.max(1e-300)).ln(), 0.0, 1.0, 1e-8, 0.0);
        assert!((q.value - 1.0).abs() < 1e-6);
    }
}
