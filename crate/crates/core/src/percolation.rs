//! Degree-dependent percolation of half-edges and of edges.
//!
//! Half-edge percolation flags every half-edge of a degree-`d` vertex as
//! regular with probability `p(d)`, pairs all half-edges uniformly, and keeps
//! the pairs whose two half-edges are regular. Edge percolation pairs first
//! and keeps each edge `{u, v}` with probability `p(d_u) p(d_v)`. Discarded
//! half-edges stand in for the artificial degree-one vertices; they are never
//! materialized.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::ops::{Add, Div, Mul, Sub};

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::ExcessWeightLaw;
use crate::error::{Error, Result};
use crate::fpp::{WeightAssignment, WeightMode};
use crate::graph::{bfs_distance, enumerate_perfect_matchings, fix_parity, HalfEdgeGraph, Matching};
use crate::rng::{stream, stream_rng};
use crate::Real;

/// Scalars in which the exact laws are computed: `f64` or a rational type.
pub trait Field:
    Clone + PartialOrd + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
}

impl<F> Field for F where
    F: Clone + PartialOrd + Zero + One + Add<Output = F> + Sub<Output = F> + Mul<Output = F> + Div<Output = F>
{
}

fn count<F: Field>(k: usize) -> F {
    (0..k).fold(F::zero(), |acc, _| acc + F::one())
}

/// Retention function `d -> p(d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Retention<T: Real> {
    Constant {
        p: T,
    },
    /// `p(d) = min(1, exp(-cp (ln d)^gamma_p))`.
    LogPower {
        cp: T,
        gamma_p: T,
    },
}

/// Parameters `(b, c, gamma)` of the lower bound `p(d) >= b exp(-c (ln d)^gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundFamily<T> {
    pub b: T,
    pub c: T,
    pub gamma: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PercolationPolicy<T: Real> {
    retention: Retention<T>,
    bound: Option<BoundFamily<T>>,
    /// Weight law behind the threshold view `p(d) = F_X(xi_d)`.
    thresholds: Option<ExcessWeightLaw<T>>,
}

impl<T: Real> PercolationPolicy<T> {
    /// The same retention probability for every degree.
    pub fn constant(p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::param(format!("retention probability {p} outside [0, 1]")));
        }
        Ok(Self {
            retention: Retention::Constant { p },
            bound: None,
            thresholds: None,
        })
    }

    /// `p(d) = exp(-cp (ln d)^gamma_p)`, clamped to at most one.
    pub fn log_power(cp: T, gamma_p: T) -> Result<Self> {
        if !(cp > T::zero()) || !cp.is_finite() {
            return Err(Error::param(format!("Cp = {cp} must be positive")));
        }
        if !(gamma_p > T::zero() && gamma_p < T::one()) {
            return Err(Error::param(format!("gamma_p = {gamma_p} must lie in (0, 1)")));
        }
        Ok(Self {
            retention: Retention::LogPower { cp, gamma_p },
            bound: Some(BoundFamily {
                b: T::one(),
                c: cp,
                gamma: gamma_p,
            }),
            thresholds: None,
        })
    }

    pub fn from_retention(retention: Retention<T>) -> Result<Self> {
        match retention {
            Retention::Constant { p } => Self::constant(p),
            Retention::LogPower { cp, gamma_p } => Self::log_power(cp, gamma_p),
        }
    }

    pub fn retention(&self) -> &Retention<T> {
        &self.retention
    }

    pub fn bound(&self) -> Option<BoundFamily<T>> {
        self.bound
    }

    pub fn threshold_law(&self) -> Option<&ExcessWeightLaw<T>> {
        self.thresholds.as_ref()
    }

    pub fn with_thresholds(mut self, law: ExcessWeightLaw<T>) -> Self {
        self.thresholds = Some(law);
        self
    }

    /// `p(d)`; degrees below two keep everything.
    pub fn p(&self, d: usize) -> T {
        self.p_at(T::from_count(d))
    }

    /// `p` at a real degree, as used on the layer thresholds.
    pub fn p_at(&self, x: T) -> T {
        match &self.retention {
            Retention::Constant { p } => *p,
            Retention::LogPower { cp, gamma_p } => {
                if x < T::lit(2.0) {
                    return T::one();
                }
                (-*cp * x.ln().powf(*gamma_p)).exp().min(T::one())
            }
        }
    }

    /// `xi_d = F_X^(-1)(p(d))`, when the policy carries a weight law.
    pub fn xi(&self, d: usize) -> Option<T> {
        self.thresholds.as_ref().map(|law| law.inverse_cdf(self.p(d)))
    }

    /// First degree in `degrees` where `p` increases, if any.
    pub fn monotonicity_violation(&self, degrees: impl IntoIterator<Item = usize>) -> Option<usize> {
        let mut prev: Option<T> = None;
        for d in degrees {
            let p = self.p(d);
            if prev.is_some_and(|q| p > q) {
                return Some(d);
            }
            prev = Some(p);
        }
        None
    }

    /// First degree `d >= 2` in `degrees` with `p(d) < b exp(-c (ln d)^gamma)`.
    /// The log-power family meets its own bound with equality.
    pub fn bound_violation(&self, degrees: impl IntoIterator<Item = usize>) -> Option<usize> {
        let bf = self.bound?;
        degrees.into_iter().filter(|&d| d >= 2).find(|&d| {
            let ln = T::from_count(d).ln();
            let lower = bf.b * (-bf.c * ln.powf(bf.gamma)).exp();
            self.p(d) < lower * (T::one() - T::epsilon() * T::lit(8.0))
        })
    }

    /// Largest `|p(d) - F_X(xi_d)|` over `degrees`.
    pub fn threshold_error(&self, degrees: impl IntoIterator<Item = usize>) -> Result<T> {
        let law = self.thresholds.as_ref().ok_or(Error::MissingThresholds)?;
        Ok(degrees
            .into_iter()
            .map(|d| (self.p(d) - law.cdf(self.xi(d).expect("law present"))).abs())
            .fold(T::zero(), T::max))
    }

    fn memo(&self, degrees: &[usize]) -> HashMap<usize, T> {
        let mut out = HashMap::new();
        for &d in degrees {
            out.entry(d).or_insert_with(|| self.p(d));
        }
        out
    }
}

/// Log-power retention with thresholds `xi_d = F_X^(-1)(p(d))` for `law`.
pub fn policy_from_excess_law<T: Real>(law: &ExcessWeightLaw<T>, cp: T, gamma_p: T) -> Result<PercolationPolicy<T>> {
    Ok(PercolationPolicy::log_power(cp, gamma_p)?.with_thresholds(law.clone()))
}

/// A configuration model together with the percolation outcome.
#[derive(Debug, Clone)]
pub struct PercolatedGraph {
    base: HalfEdgeGraph,
    /// Regular flag per half-edge; `None` for edge percolation.
    regular: Option<Vec<bool>>,
    kept: Vec<bool>,
    d_r: Vec<usize>,
    d_rr: Vec<usize>,
}

impl PercolatedGraph {
    fn from_regular(base: HalfEdgeGraph, regular: Vec<bool>) -> Self {
        let kept: Vec<bool> = (0..base.half_edge_count())
            .map(|s| regular[s] && regular[base.partner(s)])
            .collect();
        let n = base.vertex_count();
        let mut d_r = vec![0; n];
        let mut d_rr = vec![0; n];
        for s in 0..base.half_edge_count() {
            let v = base.owner(s);
            d_r[v] += regular[s] as usize;
            d_rr[v] += kept[s] as usize;
        }
        Self {
            base,
            regular: Some(regular),
            kept,
            d_r,
            d_rr,
        }
    }

    fn from_kept(base: HalfEdgeGraph, kept: Vec<bool>) -> Self {
        let mut d_rr = vec![0; base.vertex_count()];
        for s in 0..base.half_edge_count() {
            d_rr[base.owner(s)] += kept[s] as usize;
        }
        Self {
            base,
            regular: None,
            kept,
            d_r: d_rr.clone(),
            d_rr,
        }
    }

    pub fn base(&self) -> &HalfEdgeGraph {
        &self.base
    }

    /// Regular flag of half-edge `s`; edge percolation has no flags.
    pub fn is_regular(&self, s: usize) -> Option<bool> {
        self.regular.as_ref().map(|r| r[s])
    }

    /// Whether the edge containing half-edge `s` survives.
    pub fn is_kept(&self, s: usize) -> bool {
        self.kept[s]
    }

    /// Regular half-edges per vertex. Under edge percolation this equals
    /// [`Self::d_rr`].
    pub fn d_r(&self) -> &[usize] {
        &self.d_r
    }

    pub fn d_rr(&self) -> &[usize] {
        &self.d_rr
    }

    /// Surviving edges as half-edge pairs `(s, t)` with `s < t`.
    pub fn kept_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.base.edges().filter(|&(s, _)| self.kept[s])
    }

    pub fn kept_edge_count(&self) -> usize {
        self.kept_edges().count()
    }

    /// The surviving half-edge pairs in canonical order.
    pub fn induced_matching(&self) -> Matching {
        Matching(self.kept_edges().collect()).canonical()
    }

    /// Surviving edges as vertex pairs `(u, v)` with `u <= v`, sorted.
    pub fn induced_vertex_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .kept_edges()
            .map(|(s, t)| {
                let (u, v) = (self.base.owner(s), self.base.owner(t));
                (u.min(v), u.max(v))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Graph distance in the induced regular-to-regular multigraph.
    pub fn graph_distance(&self, u: usize, v: usize) -> Result<Option<usize>> {
        let n = self.base.vertex_count();
        for x in [u, v] {
            if x >= n {
                return Err(Error::VertexOutOfRange(x));
            }
        }
        Ok(bfs_distance(n, u, v, |x| {
            self.base
                .half_edges_of(x)
                .filter(|&s| self.kept[s])
                .map(|s| self.base.owner(self.base.partner(s)))
        }))
    }

    /// Checks `d_rr <= d_r <= d`, evenness and the edge count.
    pub fn check_invariants(&self) -> Result<()> {
        for v in 0..self.base.vertex_count() {
            if !(self.d_rr[v] <= self.d_r[v] && self.d_r[v] <= self.base.degree(v)) {
                return Err(Error::Invariant(format!(
                    "vertex {v}: d_rr {} d_r {} d {}",
                    self.d_rr[v],
                    self.d_r[v],
                    self.base.degree(v)
                )));
            }
        }
        let total: usize = self.d_rr.iter().sum();
        if !total.is_multiple_of(2) || total / 2 != self.kept_edge_count() {
            return Err(Error::Invariant(format!(
                "sum of d_rr is {total}, {} kept edges",
                self.kept_edge_count()
            )));
        }
        Ok(())
    }
}

/// Half-edge percolation: flags from the percolation stream of `seed`, the
/// pairing from its pairing stream (so `p = 1` reproduces
/// `HalfEdgeGraph::build(degrees, seed)` exactly).
pub fn half_edge_percolate<T: Real>(
    degrees: &[usize],
    policy: &PercolationPolicy<T>,
    seed: u64,
) -> Result<PercolatedGraph> {
    let base = HalfEdgeGraph::build(degrees, seed)?;
    let mut rng = stream_rng(seed, stream::PERCOLATION);
    Ok(flag_half_edges(base, policy, &mut rng))
}

/// Flags the half-edges of an already paired graph. The flags are
/// independent of the pairing, so this has the same law as flagging first.
pub fn flag_half_edges<T: Real, R: Rng + ?Sized>(
    base: HalfEdgeGraph,
    policy: &PercolationPolicy<T>,
    rng: &mut R,
) -> PercolatedGraph {
    let memo = policy.memo(base.degrees());
    let mut regular = vec![false; base.half_edge_count()];
    for v in 0..base.vertex_count() {
        let p = memo[&base.degree(v)].as_f64();
        for s in base.half_edges_of(v) {
            regular[s] = rng.random::<f64>() < p;
        }
    }
    PercolatedGraph::from_regular(base, regular)
}

/// Edge percolation: edge `{u, v}` survives with probability `p(d_u) p(d_v)`.
pub fn edge_percolate<T: Real>(g: &HalfEdgeGraph, policy: &PercolationPolicy<T>, seed: u64) -> PercolatedGraph {
    let mut rng = stream_rng(seed, stream::EDGE_KEEP);
    edge_percolate_with(g, policy, &mut rng)
}

pub fn edge_percolate_with<T: Real, R: Rng + ?Sized>(
    g: &HalfEdgeGraph,
    policy: &PercolationPolicy<T>,
    rng: &mut R,
) -> PercolatedGraph {
    let memo = policy.memo(g.degrees());
    let mut kept = vec![false; g.half_edge_count()];
    for (s, t) in g.edges() {
        let p = memo[&g.degree(g.owner(s))].as_f64() * memo[&g.degree(g.owner(t))].as_f64();
        let keep = rng.random::<f64>() < p;
        kept[s] = keep;
        kept[t] = keep;
    }
    PercolatedGraph::from_kept(g.clone(), kept)
}

/// Thinning view: half-edge `s` is regular iff `X_s <= xi_{d(v(s))}`.
pub fn thinning_view_percolate<T: Real>(
    g: &HalfEdgeGraph,
    w: &WeightAssignment<T>,
    policy: &PercolationPolicy<T>,
) -> Result<PercolatedGraph> {
    if w.mode() != WeightMode::PerHalfEdge {
        return Err(Error::WrongWeightMode);
    }
    if policy.thresholds.is_none() {
        return Err(Error::MissingThresholds);
    }
    let mut xi = HashMap::new();
    let mut regular = vec![false; g.half_edge_count()];
    for v in 0..g.vertex_count() {
        let d = g.degree(v);
        let threshold = *xi.entry(d).or_insert_with(|| policy.xi(d).expect("checked"));
        for s in g.half_edges_of(v) {
            regular[s] = w.excess()[s] <= threshold;
        }
    }
    Ok(PercolatedGraph::from_regular(g.clone(), regular))
}

fn half_edge_degrees(degrees: &[usize]) -> Vec<usize> {
    degrees.iter().flat_map(|&d| std::iter::repeat_n(d, d)).collect()
}

/// `prod p(s_i) * prod_{i=1..k} 1 / (L - 2i + 1)` for a matching of `k`
/// pairs: the chance that the sequential pairing forms exactly these pairs
/// first and that all `2k` half-edges are regular.
pub fn matching_probability_with<F: Field>(m: &Matching, degrees: &[usize], p: impl Fn(usize) -> F) -> Result<F> {
    let degrees = fix_parity(degrees);
    let owner_degree = half_edge_degrees(&degrees);
    let total = owner_degree.len();
    let mut seen = vec![false; total];
    let mut prob = F::one();
    for s in m.half_edges() {
        if s >= total {
            return Err(Error::param(format!("half-edge {s} out of range")));
        }
        if seen[s] {
            return Err(Error::OverlappingMatching(s));
        }
        seen[s] = true;
        prob = prob * p(owner_degree[s]);
    }
    for i in 1..=m.len() {
        prob = prob / count::<F>(total + 1 - 2 * i);
    }
    Ok(prob)
}

pub fn matching_probability<T: Real>(m: &Matching, degrees: &[usize], policy: &PercolationPolicy<T>) -> Result<T> {
    matching_probability_with(m, degrees, |d| policy.p(d))
}

/// Law of the surviving half-edge pairs under half-edge percolation,
/// by enumerating every flag pattern and every perfect matching.
pub fn exact_half_edge_law<F: Field>(degrees: &[usize], p: impl Fn(usize) -> F) -> Result<BTreeMap<Matching, F>> {
    let degrees = fix_parity(degrees);
    let owner_degree = half_edge_degrees(&degrees);
    let total = owner_degree.len();
    let matchings = enumerate_perfect_matchings(total)?;
    let per_matching = F::one() / count::<F>(matchings.len());
    let mut law = BTreeMap::new();
    for flags in 0u32..(1u32 << total) {
        let regular = |s: usize| flags >> s & 1 == 1;
        let mut weight = per_matching.clone();
        for (s, &d) in owner_degree.iter().enumerate() {
            let ps = p(d);
            weight = weight * if regular(s) { ps } else { F::one() - ps };
        }
        if weight == F::zero() {
            continue;
        }
        for m in &matchings {
            let kept = Matching(m.0.iter().copied().filter(|&(a, b)| regular(a) && regular(b)).collect());
            accumulate(&mut law, kept.canonical(), weight.clone());
        }
    }
    Ok(law)
}

/// Law of the surviving half-edge pairs under edge percolation.
pub fn exact_edge_law<F: Field>(degrees: &[usize], p: impl Fn(usize) -> F) -> Result<BTreeMap<Matching, F>> {
    let degrees = fix_parity(degrees);
    let owner_degree = half_edge_degrees(&degrees);
    let matchings = enumerate_perfect_matchings(owner_degree.len())?;
    let per_matching = F::one() / count::<F>(matchings.len());
    let mut law = BTreeMap::new();
    for m in &matchings {
        let keep: Vec<F> =
            m.0.iter()
                .map(|&(a, b)| p(owner_degree[a]) * p(owner_degree[b]))
                .collect();
        for subset in 0u32..(1u32 << m.len()) {
            let mut weight = per_matching.clone();
            let mut kept = Vec::new();
            for (i, pair) in m.0.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    weight = weight * keep[i].clone();
                    kept.push(*pair);
                } else {
                    weight = weight * (F::one() - keep[i].clone());
                }
            }
            if weight != F::zero() {
                accumulate(&mut law, Matching(kept).canonical(), weight);
            }
        }
    }
    Ok(law)
}

fn accumulate<F: Field>(law: &mut BTreeMap<Matching, F>, key: Matching, weight: F) {
    let slot = law.entry(key).or_insert_with(F::zero);
    *slot = slot.clone() + weight;
}

/// Total variation distance `1/2 sum |a - b|` between two finite laws.
pub fn total_variation<F: Field>(a: &BTreeMap<Matching, F>, b: &BTreeMap<Matching, F>) -> F {
    let mut sum = F::zero();
    for key in a.keys().chain(b.keys().filter(|k| !a.contains_key(*k))) {
        let x = a.get(key).cloned().unwrap_or_else(F::zero);
        let y = b.get(key).cloned().unwrap_or_else(F::zero);
        sum = sum + if x > y { x - y } else { y - x };
    }
    sum / (F::one() + F::one())
}

/// Outcome of [`empirical_tail_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct TailCheckReport<T> {
    pub passed: bool,
    pub x0: u64,
    pub alpha: T,
    pub c_const: T,
    /// Largest abscissa checked, `floor(n^alpha)`.
    pub x_max: u64,
    /// `(x, empirical tail, required bound)` for every failing `x`.
    pub violations: Vec<(u64, T, T)>,
}

impl<T: Real> TailCheckReport<T> {
    pub fn first_violation(&self) -> Option<u64> {
        self.violations.first().map(|v| v.0)
    }

    /// One line per failing `x`, then the summary line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (x, emp, bound) in &self.violations {
            let _ = writeln!(out, "x={x} tail={:e} bound={:e}", emp.as_f64(), bound.as_f64());
        }
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let _ = write!(out, "{verdict} x0={} alpha={} c={}", self.x0, self.alpha, self.c_const);
        out
    }
}

/// Checks `1 - F_n(x) >= c_const x^(-(tau - 1) + C (ln x)^(gamma - 1))` for
/// every integer `x` in `[x0, n^alpha]`, where `F_n` is the empirical CDF of
/// `dseq`.
pub fn empirical_tail_check<T: Real>(
    dseq: &[usize],
    tau: T,
    gamma: T,
    c_big: T,
    c_const: T,
    x0: u64,
    alpha: T,
) -> Result<TailCheckReport<T>> {
    if dseq.is_empty() {
        return Err(Error::EmptyInput);
    }
    let one = T::one();
    let half = T::lit(0.5);
    if !(alpha > half && alpha < one / (tau - one)) {
        return Err(Error::param(format!("alpha = {alpha} must lie in (1/2, 1/(tau - 1))")));
    }
    let mut sorted = dseq.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let x_max = T::from_count(n).powf(alpha).floor().to_u64().unwrap_or(0);
    let mut violations = Vec::new();
    for x in x0.max(1)..=x_max {
        let above = n - sorted.partition_point(|&d| d as u64 <= x);
        let tail = T::from_count(above) / T::from_count(n);
        let lx = T::from_u64(x).expect("representable").ln();
        let exponent = -(tau - one) + if x > 1 { c_big * lx.powf(gamma - one) } else { T::zero() };
        let bound = c_const * (lx * exponent).exp();
        if tail < bound {
            violations.push((x, tail, bound));
        }
    }
    Ok(TailCheckReport {
        passed: violations.is_empty(),
        x0,
        alpha,
        c_const,
        x_max,
        violations,
    })
}

/// `2 exp(-mu / 8)`: bound on `P(R not in [mu/2, 2 mu])` for a binomial `R`
/// with mean `mu`.
pub fn binomial_concentration_bound(mu: f64) -> f64 {
    2.0 * (-mu / 8.0).exp()
}

pub fn outside_concentration_window(r: u64, mu: f64) -> bool {
    let r = r as f64;
    r < mu / 2.0 || r > 2.0 * mu
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exact;
    use num_bigint::BigInt;

    fn ratio(a: i64, b: i64) -> Exact {
        Exact::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn full_retention_reproduces_plain_build() {
        let degrees = [3, 2, 4, 1, 2];
        let policy = PercolationPolicy::<f64>::constant(1.0).unwrap();
        let pg = half_edge_percolate(&degrees, &policy, 17).unwrap();
        assert_eq!(pg.base(), &HalfEdgeGraph::build(&degrees, 17).unwrap());
        assert_eq!(pg.d_rr(), pg.base().degrees());
        pg.check_invariants().unwrap();
    }

    #[test]
    fn zero_retention_deletes_everything() {
        let policy = PercolationPolicy::<f64>::constant(0.0).unwrap();
        let pg = half_edge_percolate(&[3, 3, 2, 2], &policy, 1).unwrap();
        assert!(pg.d_rr().iter().all(|&d| d == 0));
        assert_eq!(pg.kept_edge_count(), 0);
        let g = HalfEdgeGraph::build(&[3, 3, 2, 2], 1).unwrap();
        assert_eq!(edge_percolate(&g, &policy, 1).kept_edge_count(), 0);
        let all = PercolationPolicy::<f64>::constant(1.0).unwrap();
        assert_eq!(edge_percolate(&g, &all, 1).kept_edge_count(), g.edge_count());
    }

    #[test]
    fn matching_probability_small_cases() {
        let one = PercolationPolicy::<f64>::constant(1.0).unwrap();
        let half = PercolationPolicy::<f64>::constant(0.5).unwrap();
        let m = Matching(vec![(0, 1)]);
        assert_eq!(matching_probability(&m, &[1, 1], &one).unwrap(), 1.0);
        assert!((matching_probability(&m, &[2, 2], &one).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((matching_probability(&m, &[2, 2], &half).unwrap() - 0.25 / 3.0).abs() < 1e-15);
        assert!(matches!(
            matching_probability(&Matching(vec![(0, 1), (1, 2)]), &[2, 2], &one),
            Err(Error::OverlappingMatching(1))
        ));
    }

    #[test]
    fn matching_probability_agrees_with_enumeration() {
        // fraction of perfect matchings containing m, exactly
        let degrees = [3, 2, 2, 1];
        for m in [
            Matching(vec![(0, 4)]),
            Matching(vec![(0, 4), (1, 7)]),
            Matching(vec![(0, 4), (1, 7), (2, 3)]),
        ] {
            let all = enumerate_perfect_matchings(8).unwrap();
            let hits = all
                .iter()
                .filter(|full| m.canonical().0.iter().all(|p| full.0.contains(p)))
                .count();
            let expected = ratio(hits as i64, all.len() as i64);
            let got = matching_probability_with(&m, &degrees, |_| Exact::one()).unwrap();
            assert_eq!(got, expected, "matching {m:?}");
        }
    }

    #[test]
    fn full_matchings_recover_flag_marginals() {
        let degrees = [2, 3, 1];
        let p = |d: usize| ratio(1, d as i64 + 1);
        let total: Exact = enumerate_perfect_matchings(6)
            .unwrap()
            .iter()
            .map(|m| matching_probability_with(m, &degrees, p).unwrap())
            .fold(Exact::zero(), |a, b| a + b);
        let marginal = ratio(1, 3) * ratio(1, 3) * ratio(1, 4) * ratio(1, 4) * ratio(1, 4) * ratio(1, 2);
        assert_eq!(total, marginal);
    }

    #[test]
    fn exact_laws_coincide_on_triangle_degrees() {
        let p = |_: usize| ratio(1, 2);
        let a = exact_half_edge_law(&[2, 2, 2], p).unwrap();
        let b = exact_edge_law(&[2, 2, 2], p).unwrap();
        assert_eq!(total_variation(&a, &b), Exact::zero());
        let mass = a.values().fold(Exact::zero(), |x, y| x + y.clone());
        assert_eq!(mass, Exact::one());
        // empty outcome: every pair of the matching dropped, (3/4)^3
        assert_eq!(a[&Matching(vec![])], ratio(27, 64));
    }

    #[test]
    fn exact_laws_in_floating_point() {
        let a = exact_half_edge_law(&[3, 1, 2, 2], |d| 1.0 / d as f64).unwrap();
        let b = exact_edge_law(&[3, 1, 2, 2], |d| 1.0 / d as f64).unwrap();
        assert!(total_variation(&a, &b) < 1e-12);
        let c = exact_edge_law(&[3, 1, 2, 2], |_| 0.5).unwrap();
        assert!(total_variation(&a, &c) > 0.01);
    }

    #[test]
    fn log_power_policy_values() {
        let pol = policy_from_excess_law(&ExcessWeightLaw::<f64>::Uniform01, 1.0, 0.5).unwrap();
        // ln d = 4: p = exp(-2); e^4 is not an integer, evaluate at the formula directly
        let d = 55; // ln 55 = 4.007
        let expected = (-(55f64.ln().sqrt())).exp();
        assert!((pol.p(d) - expected).abs() < 1e-15);
        assert!((pol.xi(d).unwrap() - expected).abs() < 1e-15);
        assert_eq!(pol.p(1), 1.0);
        assert!(pol.monotonicity_violation(2..5000).is_none());
        assert!(pol.bound_violation(2..5000).is_none());
        assert!(pol.threshold_error(2..5000).unwrap() <= 1e-12);
        assert!(PercolationPolicy::<f64>::log_power(1.0, 1.0).is_err());
        assert!(PercolationPolicy::<f64>::log_power(0.0, 0.5).is_err());
        assert!(PercolationPolicy::<f64>::constant(1.5).is_err());
    }

    #[test]
    fn thinning_view_extremes() {
        let g = HalfEdgeGraph::build(&[3, 2, 2, 3], 9).unwrap();
        let pol = policy_from_excess_law(&ExcessWeightLaw::<f64>::Uniform01, 1.0, 0.5).unwrap();
        let zero = WeightAssignment::from_excess(&g, WeightMode::PerHalfEdge, 1.0, vec![0.0; 10]).unwrap();
        let pg = thinning_view_percolate(&g, &zero, &pol).unwrap();
        assert_eq!(pg.d_rr(), g.degrees());
        let big = WeightAssignment::from_excess(&g, WeightMode::PerHalfEdge, 1.0, vec![0.99; 10]).unwrap();
        assert_eq!(thinning_view_percolate(&g, &big, &pol).unwrap().kept_edge_count(), 0);
        let bare = PercolationPolicy::<f64>::log_power(1.0, 0.5).unwrap();
        assert!(matches!(
            thinning_view_percolate(&g, &zero, &bare),
            Err(Error::MissingThresholds)
        ));
        let edge = WeightAssignment::from_excess(&g, WeightMode::PerEdge, 1.0, vec![0.0; 5]).unwrap();
        assert!(matches!(
            thinning_view_percolate(&g, &edge, &pol),
            Err(Error::WrongWeightMode)
        ));
    }

    #[test]
    fn tail_check_report() {
        let r = empirical_tail_check(&[2; 100], 2.5, 0.5, 0.0, 0.1, 3, 0.6).unwrap();
        assert!(!r.passed);
        assert_eq!(r.first_violation(), Some(3));
        assert!(r.render().ends_with("FAIL x0=3 alpha=0.6 c=0.1"));
        assert!(empirical_tail_check(&[2; 100], 2.5, 0.5, 0.0, 0.1, 3, 0.7).is_err());
        assert!(empirical_tail_check::<f64>(&[], 2.5, 0.5, 0.0, 0.1, 3, 0.6).is_err());
    }

    #[test]
    fn concentration_window() {
        assert!(outside_concentration_window(10, 50.0));
        assert!(!outside_concentration_window(50, 50.0));
        assert!(outside_concentration_window(101, 50.0));
        assert!((binomial_concentration_bound(8.0) - 2.0 * (-1f64).exp()).abs() < 1e-15);
    }
}
