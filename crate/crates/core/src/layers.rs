//! Nested degree layers `y_0 < y_1 < ...`, the greedy max-degree walk
//! through them, and the excess-weight budget `sum xi_{y_i}`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::distributions::DegreeLaw;
use crate::error::{Error, Result};
use crate::fpp::{WeightAssignment, WeightMode};
use crate::graph::HalfEdgeGraph;
use crate::percolation::{PercolatedGraph, PercolationPolicy};
use crate::Real;

/// Upper limit on the number of layers; the recursion grows doubly
/// exponentially, so this is never reached for admissible parameters.
const MAX_LAYERS: usize = 4096;
/// Relative slack for comparing logarithms of thresholds.
const LOG_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LayerSchedule<T> {
    k: u64,
    tau: T,
    gamma: T,
    b: T,
    n: u64,
    alpha: T,
    thresholds: Vec<T>,
    logs: Vec<T>,
    b_n: usize,
}

/// `ln ln n / |ln(tau - 2)|`, the bound on the layer count.
pub fn layer_count_bound<T: Real>(n: u64, tau: T) -> T {
    let n = T::from_u64(n).expect("representable");
    n.ln().ln() / (tau - T::lit(2.0)).ln().abs()
}

/// `|ln alpha| / |ln(tau - 2)|`, the retention exponent paired with a core
/// exponent `alpha` in `(tau - 2, 1)`.
pub fn gamma_p_for_alpha<T: Real>(alpha: T, tau: T) -> T {
    alpha.ln().abs() / (tau - T::lit(2.0)).ln().abs()
}

fn exponent_at<T: Real>(tau: T, gamma: T, b: T, y: T) -> T {
    tau - T::lit(2.0) + b * y.ln().powf(gamma - T::one())
}

/// Smallest integer `k >= 3` with `tau - 2 + B (ln k)^(gamma - 1) < 1`.
fn minimal_k<T: Real>(tau: T, gamma: T, b: T) -> u64 {
    let ok = |k: u64| exponent_at(tau, gamma, b, T::from_u64(k).expect("representable")) < T::one();
    // (ln k)^(gamma - 1) < (3 - tau) / B  <=>  ln k > ((3 - tau) / B)^(1 / (gamma - 1))
    let ln_k = ((T::lit(3.0) - tau) / b).powf((gamma - T::one()).recip());
    let guess = ln_k.exp().to_f64().unwrap_or(f64::INFINITY);
    if !(guess < 1.8e19) {
        return u64::MAX;
    }
    let mut k = (guess.floor() as u64).max(3);
    while k > 3 && ok(k - 1) {
        k -= 1;
    }
    while !ok(k) && k < u64::MAX {
        k += 1;
    }
    k
}

/// Builds `y_0 = k`, `y_{i+1} = y_i^(1 / (tau - 2 + B (ln y_i)^(gamma - 1)))`
/// until `y_i >= n^alpha`, and checks the sandwich and refined bounds.
pub fn make_schedule<T: Real>(k: u64, tau: T, gamma: T, b: T, n: u64, alpha: T) -> Result<LayerSchedule<T>> {
    let (one, two) = (T::one(), T::lit(2.0));
    if k < 3 {
        return Err(Error::param(format!("k = {k} must be at least 3")));
    }
    if !(tau > two && tau < T::lit(3.0)) {
        return Err(Error::param(format!("tau = {tau} outside (2, 3)")));
    }
    if !(gamma > T::zero() && gamma < one) {
        return Err(Error::param(format!("gamma = {gamma} outside (0, 1)")));
    }
    if !(b > T::zero()) || !b.is_finite() {
        return Err(Error::param(format!("B = {b} must be positive")));
    }
    if !(alpha > T::lit(0.5)) {
        return Err(Error::param(format!("alpha = {alpha} must exceed 1/2")));
    }
    if n < 3 {
        return Err(Error::param(format!("n = {n} too small")));
    }
    let y0 = T::from_u64(k).expect("representable");
    let e0 = exponent_at(tau, gamma, b, y0);
    if !(e0 < one) {
        return Err(Error::NonMonotoneSchedule {
            k: k as f64,
            exponent: e0.as_f64(),
            min_k: minimal_k(tau, gamma, b),
        });
    }
    // work with ln y to stay finite
    let target = alpha * T::from_u64(n).expect("representable").ln();
    let mut logs = vec![y0.ln()];
    while *logs.last().expect("nonempty") < target {
        if logs.len() > MAX_LAYERS {
            return Err(Error::GuardExceeded {
                what: "layer count",
                value: logs.len(),
                limit: MAX_LAYERS,
            });
        }
        let ly = *logs.last().expect("nonempty");
        let e = tau - two + b * ly.powf(gamma - one);
        logs.push(ly / e);
    }
    let b_n = logs.len() - 1;
    let schedule = LayerSchedule {
        k,
        tau,
        gamma,
        b,
        n,
        alpha,
        thresholds: std::iter::once(y0).chain(logs[1..].iter().map(|l| l.exp())).collect(),
        logs,
        b_n,
    };
    schedule.check_bounds()?;
    Ok(schedule)
}

impl<T: Real> LayerSchedule<T> {
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// `y_0, ..., y_{b_n}`.
    pub fn thresholds(&self) -> &[T] {
        &self.thresholds
    }

    /// `ln y_0, ..., ln y_{b_n}`, finite even where `y_i` overflows.
    pub fn log_thresholds(&self) -> &[T] {
        &self.logs
    }

    /// Index of the first threshold at or above `n^alpha`.
    pub fn b_n(&self) -> usize {
        self.b_n
    }

    /// `n^alpha`, the degree of the core.
    pub fn core_degree(&self) -> T {
        T::from_u64(self.n).expect("representable").powf(self.alpha)
    }

    /// `delta_0 = B (ln k)^(gamma - 1)`.
    pub fn delta(&self) -> T {
        self.b
            * T::from_u64(self.k)
                .expect("representable")
                .ln()
                .powf(self.gamma - T::one())
    }

    /// `ln` of the sandwich `k^((1/(tau-2+delta_0))^i) <= y_i <= k^((1/(tau-2))^i)`.
    pub fn log_sandwich(&self) -> Vec<(T, T)> {
        let ln_k = T::from_u64(self.k).expect("representable").ln();
        let base = self.tau - T::lit(2.0);
        (0..self.thresholds.len())
            .map(|i| {
                let i = i as i32;
                (
                    ln_k * (base + self.delta()).recip().powi(i),
                    ln_k * base.recip().powi(i),
                )
            })
            .collect()
    }

    /// `M_k = 1 / prod_{j >= 0} (1 + (tau - 2 + delta_0)^(j (1 - gamma)) delta_0 / (tau - 2))`.
    pub fn m_k(&self) -> T {
        let base = self.tau - T::lit(2.0);
        let delta = self.delta();
        let ratio = (base + delta).powf(T::one() - self.gamma);
        let mut term = delta / base;
        let mut log_product = T::zero();
        for _ in 0..100_000 {
            let step = term.ln_1p();
            log_product = log_product + step;
            if step < T::lit(1e-12) {
                break;
            }
            term = term * ratio;
        }
        (-log_product).exp()
    }

    /// `(y_0^(1 - delta))^((tau - 2)^(-i))` with `1 - delta = M_k`.
    pub fn refined_lower_bound(&self) -> Vec<T> {
        let ln_k = T::from_u64(self.k).expect("representable").ln();
        let base = self.tau - T::lit(2.0);
        let m = self.m_k();
        (0..self.thresholds.len())
            .map(|i| (m * ln_k * base.recip().powi(i as i32)).exp())
            .collect()
    }

    fn check_bounds(&self) -> Result<()> {
        let tol = T::lit(LOG_RTOL);
        let ln_k = T::from_u64(self.k).expect("representable").ln();
        let base = self.tau - T::lit(2.0);
        let m = self.m_k();
        for (i, (&ly, (lo, hi))) in self.logs.iter().zip(self.log_sandwich()).enumerate() {
            let refined = m * ln_k * base.recip().powi(i as i32);
            if i > 0 && !(ly >= lo * (T::one() - tol) && ly <= hi * (T::one() + tol)) {
                return Err(Error::Invariant(format!("y_{i} = e^{ly} outside [e^{lo}, e^{hi}]")));
            }
            if i > 0 && !(ly > self.logs[i - 1]) {
                return Err(Error::Invariant(format!("y_{i} does not increase")));
            }
            if !(ly >= refined * (T::one() - tol)) {
                return Err(Error::Invariant(format!(
                    "y_{i} = e^{ly} below refined bound e^{refined}"
                )));
            }
        }
        Ok(())
    }

    /// Largest layer `j` with `degree >= y_j`, or `None` below `y_0`.
    pub fn layer_of(&self, degree: usize) -> Option<usize> {
        let d = T::from_count(degree);
        let j = self.thresholds.partition_point(|y| *y <= d);
        j.checked_sub(1)
    }
}

/// `exp(-g_i)` for `g_i = y_{i+1} y_i [1 - F(y_{i+1})] / (n beta)`, with `F`
/// the model degree law and `beta = L_n / n`.
pub fn attachment_failure_bound<T: Real>(schedule: &LayerSchedule<T>, law: &DegreeLaw<T>, beta: T) -> Result<Vec<T>> {
    if !(beta > T::zero()) {
        return Err(Error::param(format!("beta = {beta} must be positive")));
    }
    let n = T::from_u64(schedule.n).expect("representable");
    Ok(schedule
        .thresholds
        .windows(2)
        .map(|w| {
            let g = w[1] * w[0] * (T::one() - law.cdf(w[1])) / (n * beta);
            (-g).exp()
        })
        .collect())
}

/// The terms `xi_{y_i}` and their sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcessBudget<T> {
    pub terms: Vec<T>,
    pub total: T,
}

impl<T: Real> ExcessBudget<T> {
    /// Share of the last term in the total.
    pub fn last_share(&self) -> T {
        match self.terms.last() {
            Some(t) if self.total > T::zero() => *t / self.total,
            _ => T::zero(),
        }
    }
}

/// `sum_{i=0}^{b_n} xi_{y_i}`, with `p` evaluated at the real thresholds.
pub fn excess_budget<T: Real>(schedule: &LayerSchedule<T>, policy: &PercolationPolicy<T>) -> Result<ExcessBudget<T>> {
    let law = policy.threshold_law().ok_or(Error::MissingThresholds)?;
    let terms: Vec<T> = schedule
        .thresholds
        .iter()
        .map(|&y| law.inverse_cdf(policy.p_at(y)))
        .collect();
    let total = terms.iter().copied().sum();
    Ok(ExcessBudget { terms, total })
}

/// Text table `i y_i xi_{y_i} exp(-g_i)`; missing columns print `-`.
pub fn dump_schedule<T: Real>(
    schedule: &LayerSchedule<T>,
    policy: Option<&PercolationPolicy<T>>,
    failure: Option<&[T]>,
) -> String {
    let mut out = String::from("i y_i xi_{y_i} exp(-g_i)\n");
    for (i, y) in schedule.thresholds.iter().enumerate() {
        let xi = policy
            .and_then(|p| p.threshold_law().map(|law| law.inverse_cdf(p.p_at(*y))))
            .map_or("-".to_string(), |x| format!("{:.6e}", x.as_f64()));
        let g = failure
            .and_then(|f| f.get(i))
            .map_or("-".to_string(), |x| format!("{:.6e}", x.as_f64()));
        let _ = writeln!(out, "{i} {:.6e} {xi} {g}", y.as_f64());
    }
    out
}

/// A graph the greedy walk can traverse: degrees and usable half-edges.
pub trait Traversable {
    fn base(&self) -> &HalfEdgeGraph;
    fn walk_degree(&self, v: usize) -> usize;
    fn usable(&self, s: usize) -> bool;
}

impl Traversable for HalfEdgeGraph {
    fn base(&self) -> &HalfEdgeGraph {
        self
    }

    fn walk_degree(&self, v: usize) -> usize {
        self.degree(v)
    }

    fn usable(&self, _s: usize) -> bool {
        true
    }
}

impl Traversable for PercolatedGraph {
    fn base(&self) -> &HalfEdgeGraph {
        PercolatedGraph::base(self)
    }

    fn walk_degree(&self, v: usize) -> usize {
        self.d_rr()[v]
    }

    fn usable(&self, s: usize) -> bool {
        self.is_kept(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PathStatus {
    ReachedCore,
    Stuck,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerPath<T> {
    pub vertices: Vec<usize>,
    /// Walk degree of each vertex on the path.
    pub degrees: Vec<usize>,
    /// Layer index of each vertex on the path.
    pub layers: Vec<usize>,
    /// Excess weights `(w1, w2)` of the outgoing and incoming half-edge of
    /// each step; per-edge weights report `(X_e, 0)`.
    pub excess: Vec<(T, T)>,
    pub status: PathStatus,
}

impl<T: Real> LayerPath<T> {
    pub fn steps(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Sum of all excess weights picked up along the path.
    pub fn total_excess(&self) -> T {
        self.excess.iter().map(|&(a, b)| a + b).sum()
    }

    /// Total edge weight with constant part `a` per edge.
    pub fn total_weight(&self, a: T) -> T {
        self.total_excess() + a * T::from_count(self.steps())
    }
}

/// Greedy walk from `start`: step to the neighbour of largest degree (ties
/// by least edge weight, then lowest vertex id) as long as it climbs at
/// least one layer (or reaches the core); stop on reaching degree `n^alpha`
/// or when stuck.
pub fn greedy_layer_path<T: Real, G: Traversable + ?Sized>(
    g: &G,
    start: usize,
    schedule: &LayerSchedule<T>,
    weights: Option<&WeightAssignment<T>>,
) -> Result<LayerPath<T>> {
    let base = g.base();
    if start >= base.vertex_count() {
        return Err(Error::VertexOutOfRange(start));
    }
    let d0 = g.walk_degree(start);
    let Some(layer0) = schedule.layer_of(d0) else {
        return Err(Error::StartBelowThreshold {
            vertex: start,
            degree: d0,
            threshold: schedule.thresholds[0].as_f64(),
        });
    };
    let core = schedule.core_degree();
    let mut path = LayerPath {
        vertices: vec![start],
        degrees: vec![d0],
        layers: vec![layer0],
        excess: Vec::new(),
        status: PathStatus::Stuck,
    };
    let mut x = start;
    loop {
        if T::from_count(g.walk_degree(x)) >= core {
            path.status = PathStatus::ReachedCore;
            return Ok(path);
        }
        let layer = *path.layers.last().expect("nonempty");
        let Some(&next) = schedule.thresholds.get(layer + 1) else {
            return Ok(path);
        };
        let need = next.min(core);
        // best candidate: (degree, weight, vertex, half-edge)
        let mut best: Option<(usize, T, usize, usize)> = None;
        for s in base.half_edges_of(x) {
            if !g.usable(s) {
                continue;
            }
            let y = base.owner(base.partner(s));
            if y == x {
                continue;
            }
            let dy = g.walk_degree(y);
            let wt = weights.map_or(T::zero(), |w| w.edge_weight(base, s));
            let better = match best {
                None => true,
                Some((bd, bw, bv, _)) => dy > bd || (dy == bd && (wt < bw || (wt == bw && y < bv))),
            };
            if better {
                best = Some((dy, wt, y, s));
            }
        }
        let Some((dy, _, y, s)) = best else {
            return Ok(path);
        };
        if T::from_count(dy) < need {
            return Ok(path);
        }
        let step_excess = match weights {
            None => (T::zero(), T::zero()),
            Some(w) => match w.mode() {
                WeightMode::PerHalfEdge => (w.excess()[s], w.excess()[base.partner(s)]),
                WeightMode::PerEdge => (w.edge_excess(base, s), T::zero()),
            },
        };
        path.vertices.push(y);
        path.degrees.push(dy);
        path.layers.push(schedule.layer_of(dy).expect("above y_0"));
        path.excess.push(step_excess);
        x = y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::ExcessWeightLaw;
    use crate::percolation::policy_from_excess_law;

    #[test]
    fn vanishing_b_is_the_closed_form() {
        let s = make_schedule::<f64>(4, 2.5, 0.5, 1e-9, u64::MAX, 0.99).unwrap();
        for (y, expected) in s.thresholds().iter().zip([4.0, 16.0, 256.0, 65536.0]) {
            assert!((y / expected - 1.0).abs() < 1e-6, "{y} vs {expected}");
        }
        let m = s.m_k();
        assert!((1.0 - m).abs() < 1e-6);
    }

    #[test]
    fn reference_schedule_first_step() {
        let s = make_schedule(16, 2.5, 0.5, 0.1, 1_000_000, 0.6).unwrap();
        let y1 = 16f64.powf(1.0 / (0.5 + 0.1 / 16f64.ln().sqrt()));
        assert!((s.thresholds()[1] / y1 - 1.0).abs() < 1e-12);
        let delta = 0.1 / 16f64.ln().sqrt();
        assert!(y1 >= 16f64.powf(1.0 / (0.5 + delta)) && y1 <= 256.0);
        for (y, lb) in s.thresholds().iter().zip(s.refined_lower_bound()) {
            assert!(*y >= lb * (1.0 - 1e-9));
        }
    }

    #[test]
    fn layer_count_bound_example() {
        let s = make_schedule::<f64>(256, 2.5, 0.5, 1e-9, 1_000_000, 0.6).unwrap();
        let bound: f64 = layer_count_bound(1_000_000, 2.5);
        assert!((bound - 3.788).abs() < 1e-3);
        assert!(s.b_n() as f64 <= bound);
    }

    #[test]
    fn non_monotone_schedule_names_minimal_k() {
        let err = make_schedule(4, 2.5, 0.5, 1.0, 1000, 0.6).unwrap_err();
        let Error::NonMonotoneSchedule { min_k, .. } = err else {
            panic!("wrong error {err}");
        };
        // 0.5 + (ln k)^(-1/2) < 1  <=>  ln k > 4
        assert_eq!(min_k, 55);
        assert!(make_schedule(55, 2.5, 0.5, 1.0, 1000, 0.6).is_ok());
        assert!(make_schedule(54, 2.5, 0.5, 1.0, 1000, 0.6).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_schedule(2, 2.5, 0.5, 0.1, 1000, 0.6).is_err());
        assert!(make_schedule(16, 3.5, 0.5, 0.1, 1000, 0.6).is_err());
        assert!(make_schedule(16, 2.5, 1.5, 0.1, 1000, 0.6).is_err());
        assert!(make_schedule(16, 2.5, 0.5, 0.1, 1000, 0.4).is_err());
    }

    #[test]
    fn attachment_bound_tends_to_one_for_large_n() {
        let law = DegreeLaw::<f64>::pure_power(2.5).unwrap();
        let s = make_schedule(16, 2.5, 0.5, 0.1, 1_000_000, 0.6).unwrap();
        let f = attachment_failure_bound(&s, &law, 3.0).unwrap();
        let (y0, y1) = (s.thresholds()[0], s.thresholds()[1]);
        let g0 = y1 * y0 * law.survival(y1.floor() as u64) / (1e6 * 3.0);
        assert!((f[0] - (-g0).exp()).abs() < 1e-15);
        let big = make_schedule(16, 2.5, 0.5, 0.1, u64::MAX / 2, 0.51).unwrap();
        let fb = attachment_failure_bound(&big, &law, 3.0).unwrap();
        assert!(fb[0] > f[0] && fb[0] > 1.0 - 1e-10);
    }

    #[test]
    fn budget_of_zero_thresholds() {
        let s = make_schedule(16, 2.5, 0.5, 0.1, 1_000_000, 0.6).unwrap();
        let pol = policy_from_excess_law(&ExcessWeightLaw::<f64>::Zero, 1.0, 0.5).unwrap();
        assert_eq!(excess_budget(&s, &pol).unwrap().total, 0.0);
        let bare = PercolationPolicy::<f64>::log_power(1.0, 0.5).unwrap();
        assert!(excess_budget(&s, &bare).is_err());
    }

    #[test]
    fn dump_has_one_row_per_layer() {
        let s = make_schedule(16, 2.5, 0.5, 0.1, 1_000_000, 0.6).unwrap();
        let pol = policy_from_excess_law(&ExcessWeightLaw::<f64>::Uniform01, 1.0, 0.5).unwrap();
        let text = dump_schedule(&s, Some(&pol), None);
        assert_eq!(text.lines().count(), s.thresholds().len() + 1);
        assert!(text.starts_with("i y_i xi_{y_i} exp(-g_i)\n0 1.600000e1 "));
    }

    fn star(leaves: usize) -> HalfEdgeGraph {
        // hub 0 with `leaves` leaves of degree 3 that each carry a loop
        let mut degrees = vec![leaves];
        degrees.extend(std::iter::repeat_n(3, leaves));
        let mut pairs = Vec::new();
        for i in 0..leaves {
            let leaf = leaves + 3 * i;
            pairs.push((i, leaf));
            pairs.push((leaf + 1, leaf + 2));
        }
        HalfEdgeGraph::from_pairing(&degrees, &pairs).unwrap()
    }

    #[test]
    fn star_leaf_reaches_hub() {
        let g = star(40);
        let s = make_schedule(3, 2.5, 0.5, 0.01, 1000, 0.52).unwrap();
        let p = greedy_layer_path::<f64, _>(&g, 1, &s, None).unwrap();
        assert_eq!(p.vertices, vec![1, 0]);
        assert_eq!(p.status, PathStatus::ReachedCore);
    }

    #[test]
    fn tie_goes_to_lighter_edge() {
        // vertex 0 (degree 4, one loop) joined to 1 and 2, both of degree 6
        let degrees = [4, 6, 6];
        let pairs = [(0, 4), (1, 10), (2, 3), (5, 6), (7, 8), (9, 15), (11, 12), (13, 14)];
        let g = HalfEdgeGraph::from_pairing(&degrees, &pairs).unwrap();
        // edges by lower half-edge: (0,4) to vertex 1 and (1,10) to vertex 2 come first
        let mut excess = vec![0.0; 8];
        excess[0] = 0.7;
        excess[1] = 0.2;
        let w = WeightAssignment::<f64>::from_excess(&g, WeightMode::PerEdge, 1.0, excess).unwrap();
        let s = make_schedule(3, 2.5, 0.5, 0.01, 30, 0.52).unwrap();
        let p = greedy_layer_path(&g, 0, &s, Some(&w)).unwrap();
        assert_eq!(p.vertices, vec![0, 2]);
        assert_eq!(p.excess, vec![(0.2, 0.0)]);
        assert_eq!(p.status, PathStatus::ReachedCore);
        assert!((p.total_weight(1.0) - 1.2).abs() < 1e-15);
        // without weights the lower id wins
        assert_eq!(
            greedy_layer_path::<f64, _>(&g, 0, &s, None).unwrap().vertices,
            vec![0, 1]
        );
    }

    #[test]
    fn start_checks_and_stuck_walks() {
        let g = star(4);
        let s = make_schedule(3, 2.5, 0.5, 0.01, 1_000_000, 0.6).unwrap();
        // hub of degree 4 is below y_1, so a leaf cannot climb
        let p = greedy_layer_path::<f64, _>(&g, 1, &s, None).unwrap();
        assert_eq!((p.vertices.clone(), p.status), (vec![1], PathStatus::Stuck));
        let s = make_schedule(5, 2.5, 0.5, 0.01, 1_000_000, 0.6).unwrap();
        assert!(matches!(
            greedy_layer_path::<f64, _>(&g, 1, &s, None),
            Err(Error::StartBelowThreshold {
                vertex: 1,
                degree: 3,
                ..
            })
        ));
        assert!(greedy_layer_path::<f64, _>(&g, 99, &s, None).is_err());
    }
}
