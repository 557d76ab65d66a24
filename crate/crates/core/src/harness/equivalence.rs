//! Exhaustive checks on small degree sequences: the two percolation
//! definitions agree in law, and the sequential-pairing formula for the
//! probability of a partial matching is exact.

use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::Result;
use crate::graph::{enumerate_matchings, Matching};
use crate::percolation::{exact_edge_law, exact_half_edge_law, matching_probability_with, total_variation};
use crate::Exact;

/// Nonincreasing degree sequences with positive entries and even total at
/// most `max_total`. The laws compared here are invariant under relabelling
/// vertices, so one representative per multiset suffices.
pub fn degree_sequences(max_total: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: usize, cap: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let total: usize = acc.iter().sum();
        if total > 0 && total.is_multiple_of(2) {
            out.push(acc.clone());
        }
        for d in (1..=cap.min(remaining)).rev() {
            acc.push(d);
            rec(remaining - d, d, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(max_total, max_total, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| (a.iter().sum::<usize>(), a).cmp(&(b.iter().sum::<usize>(), b)));
    out
}

/// Rational `num / den` as an exact probability.
pub fn exact_ratio(num: i64, den: i64) -> Exact {
    Exact::new(num.into(), den.into())
}

fn exact_decimal(p: f64) -> Exact {
    // retention probabilities are short decimals; recover them exactly
    let scaled = (p * 1e6).round() as i64;
    exact_ratio(scaled, 1_000_000)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceCase {
    pub degrees: Vec<usize>,
    pub p: f64,
    /// Outcomes with positive probability under either definition.
    pub outcomes: usize,
    pub tv_f64: f64,
    /// Exact rational distance rendered as `f64` (zero means exact equality).
    pub tv_exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub max_total: usize,
    pub cases: Vec<EquivalenceCase>,
    pub max_tv_f64: f64,
    pub max_tv_exact: f64,
}

impl EquivalenceReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_tv_f64 <= tol && self.max_tv_exact <= tol
    }
}

/// Total variation between the half-edge and edge percolation laws of the
/// induced pair set, for every sequence of [`degree_sequences`] and every
/// constant retention probability, in `f64` and in exact rationals.
pub fn percolation_equivalence(max_total: usize, probs: &[f64]) -> Result<EquivalenceReport> {
    let mut cases = Vec::new();
    for degrees in degree_sequences(max_total) {
        for &p in probs {
            let a = exact_half_edge_law(&degrees, |_| p)?;
            let b = exact_edge_law(&degrees, |_| p)?;
            let q = exact_decimal(p);
            let ea = exact_half_edge_law(&degrees, |_| q.clone())?;
            let eb = exact_edge_law(&degrees, |_| q.clone())?;
            let outcomes = ea.len().max(eb.len());
            cases.push(EquivalenceCase {
                degrees: degrees.clone(),
                p,
                outcomes,
                tv_f64: total_variation(&a, &b),
                tv_exact: total_variation(&ea, &eb).to_f64().unwrap_or(f64::INFINITY),
            });
        }
    }
    let max_tv_f64 = cases.iter().map(|c| c.tv_f64).fold(0.0, f64::max);
    let max_tv_exact = cases.iter().map(|c| c.tv_exact).fold(0.0, f64::max);
    Ok(EquivalenceReport {
        max_total,
        cases,
        max_tv_f64,
        max_tv_exact,
    })
}

/// All sets of pairwise disjoint half-edge pairs on `total` half-edges,
/// the empty set included.
pub fn partial_matchings(total: usize) -> Vec<Matching> {
    fn rec(next: usize, total: usize, used: &mut Vec<bool>, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Matching>) {
        let Some(a) = (next..total).find(|&s| !used[s]) else {
            out.push(Matching(acc.clone()));
            return;
        };
        // `a` stays unmatched
        used[a] = true;
        rec(a + 1, total, used, acc, out);
        for b in a + 1..total {
            if !used[b] {
                used[b] = true;
                acc.push((a, b));
                rec(a + 1, total, used, acc, out);
                acc.pop();
                used[b] = false;
            }
        }
        used[a] = false;
    }
    let mut out = Vec::new();
    rec(0, total, &mut vec![false; total], &mut Vec::new(), &mut out);
    out
}

/// Comparison of the pairing formula against counting perfect matchings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchingLawReport {
    pub sequences: usize,
    pub matchings: usize,
    /// Largest relative error of the `f64` formula against the exact count.
    pub max_rel_error: f64,
    /// Matchings where the exact-arithmetic formula differs from the count.
    pub exact_mismatches: usize,
    /// Matchings where the denominator `L - 2i - 1` disagrees with the count.
    pub printed_mismatches: usize,
    /// Matchings where `L - 2i - 1` vanishes or goes negative.
    pub printed_undefined: usize,
}

impl MatchingLawReport {
    pub fn passes(&self, rel_tol: f64) -> bool {
        self.exact_mismatches == 0 && self.max_rel_error <= rel_tol
    }
}

fn containment_fraction(m: &Matching, perfect: &[Matching]) -> Exact {
    let pairs = m.canonical().0;
    let hits = perfect
        .iter()
        .filter(|full| pairs.iter().all(|p| full.0.contains(p)))
        .count();
    exact_ratio(hits as i64, perfect.len() as i64)
}

/// Checks `prod p(s) prod 1/(L - 2i + 1)` against `P(m in pairing) prod p(s)`
/// computed by enumeration, with `p(d) = 1/(d + 1)`, on every partial
/// matching of every sequence of [`degree_sequences`].
pub fn matching_law_check(max_total: usize) -> Result<MatchingLawReport> {
    let p_exact = |d: usize| exact_ratio(1, d as i64 + 1);
    let p_f64 = |d: usize| 1.0 / (d as f64 + 1.0);
    let mut report = MatchingLawReport {
        sequences: 0,
        matchings: 0,
        max_rel_error: 0.0,
        exact_mismatches: 0,
        printed_mismatches: 0,
        printed_undefined: 0,
    };
    for degrees in degree_sequences(max_total) {
        report.sequences += 1;
        let owner: Vec<usize> = degrees.iter().flat_map(|&d| std::iter::repeat_n(d, d)).collect();
        let total = owner.len();
        let perfect = enumerate_matchings(&degrees)?;
        for m in partial_matchings(total) {
            report.matchings += 1;
            let flags = m.half_edges().fold(Exact::one(), |acc, s| acc * p_exact(owner[s]));
            let truth = containment_fraction(&m, &perfect) * flags.clone();
            let exact = matching_probability_with(&m, &degrees, p_exact)?;
            if exact != truth {
                report.exact_mismatches += 1;
            }
            let approx = matching_probability_with(&m, &degrees, p_f64)?;
            let t = truth.to_f64().unwrap_or(f64::NAN);
            let rel = if t == 0.0 {
                approx.abs()
            } else {
                ((approx - t) / t).abs()
            };
            report.max_rel_error = report.max_rel_error.max(rel);
            let mut printed = Some(flags);
            for i in 1..=m.len() {
                let den = total as i64 - 2 * i as i64 - 1;
                printed = match printed {
                    Some(v) if den > 0 => Some(v / exact_ratio(den, 1)),
                    _ => None,
                };
            }
            match printed {
                None => report.printed_undefined += 1,
                Some(v) if v != truth => report.printed_mismatches += 1,
                Some(_) => {}
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequences_up_to_four() {
        assert_eq!(
            degree_sequences(4),
            vec![
                vec![1, 1],
                vec![2],
                vec![1, 1, 1, 1],
                vec![2, 1, 1],
                vec![2, 2],
                vec![3, 1],
                vec![4]
            ]
        );
        assert!(degree_sequences(8).iter().all(|d| d.iter().sum::<usize>() <= 8));
    }

    #[test]
    fn partial_matching_counts() {
        // telephone numbers
        let counts: Vec<usize> = (0..=6).map(|t| partial_matchings(t).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 10, 26, 76]);
    }

    #[test]
    fn small_equivalence_and_matching_law() {
        let eq = percolation_equivalence(4, &[0.3, 1.0]).unwrap();
        assert_eq!(eq.cases.len(), 14);
        assert!(eq.passes(1e-12));
        assert_eq!(eq.max_tv_exact, 0.0);
        let ml = matching_law_check(4).unwrap();
        assert!(ml.passes(1e-12));
        assert!(ml.printed_mismatches + ml.printed_undefined > 0);
    }
}
