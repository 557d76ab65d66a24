mod common;

use std::collections::BTreeMap;

use fppcm::fpp::assign_weights;
use fppcm::percolation::{
    edge_percolate, exact_edge_law, exact_half_edge_law, half_edge_percolate, matching_probability_with,
    policy_from_excess_law, thinning_view_percolate,
};
use fppcm::{Exact, ExcessWeightLaw, HalfEdgeGraph, Matching, PercolationPolicy, WeightMode};
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

fn chi_square(observed: &[f64], expected: &[f64]) -> f64 {
    observed.iter().zip(expected).map(|(o, e)| (o - e) * (o - e) / e).sum()
}

fn critical(dof: usize) -> f64 {
    ChiSquared::new(dof as f64).unwrap().inverse_cdf(0.999)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn degree_counts_are_nested(degrees in prop::collection::vec(1usize..=12, 2..40), seed in any::<u64>(), cp in 0.2f64..2.0, gp in 0.1f64..0.9) {
        let policy = PercolationPolicy::log_power(cp, gp).unwrap();
        let pg = half_edge_percolate(&degrees, &policy, seed).unwrap();
        pg.check_invariants().unwrap();
        for v in 0..pg.base().vertex_count() {
            prop_assert!(pg.d_rr()[v] <= pg.d_r()[v]);
            prop_assert!(pg.d_r()[v] <= pg.base().degree(v));
        }
        let g = HalfEdgeGraph::build(&degrees, seed).unwrap();
        let ep = edge_percolate(&g, &policy, seed);
        ep.check_invariants().unwrap();
        prop_assert_eq!(ep.d_r(), ep.d_rr());
    }

    #[test]
    fn kept_pairs_are_edges_of_the_base(degrees in prop::collection::vec(1usize..=6, 2..20), seed in any::<u64>(), p in 0.0f64..=1.0) {
        let policy = PercolationPolicy::constant(p).unwrap();
        let pg = half_edge_percolate(&degrees, &policy, seed).unwrap();
        for (s, t) in pg.kept_edges() {
            prop_assert_eq!(pg.base().partner(s), t);
            prop_assert!(pg.is_kept(s) && pg.is_kept(t));
        }
    }

    #[test]
    fn pairing_formula_matches_double_factorial(degrees in prop::collection::vec(1usize..=3, 1..5), picks in prop::collection::vec(any::<u8>(), 0..4)) {
        let total: usize = degrees.iter().sum();
        prop_assume!(total.is_multiple_of(2));
        // a random partial matching from a shuffled list of half-edges
        let mut free: Vec<usize> = (0..total).collect();
        let mut pairs = Vec::new();
        for p in picks {
            if free.len() < 2 {
                break;
            }
            let a = free.remove(p as usize % free.len());
            let b = free.remove((p as usize / 3) % free.len());
            pairs.push((a.min(b), a.max(b)));
        }
        let m = Matching(pairs);
        let got = matching_probability_with(&m, &degrees, |_| Exact::one()).unwrap();
        let want = Exact::new(common::completions(&m, total).into(), common::perfect_matching_count(total).into());
        prop_assert_eq!(got, want);
    }
}

#[test]
fn regular_counts_are_binomial() {
    // d^r of a degree-d vertex is Bin(d, p(d)); 10^5 vertices of degree 4
    let policy = PercolationPolicy::log_power(1.0, 0.5).unwrap();
    let d = 4;
    let degrees = vec![d; 100_000];
    let pg = half_edge_percolate(&degrees, &policy, 2024).unwrap();
    let mut observed = vec![0.0; d + 1];
    for &r in pg.d_r() {
        observed[r] += 1.0;
    }
    let bin = Binomial::new(policy.p(d), d as u64).unwrap();
    let expected: Vec<f64> = (0..=d).map(|k| bin.pmf(k as u64) * degrees.len() as f64).collect();
    let stat = chi_square(&observed, &expected);
    assert!(stat < critical(d), "chi-square {stat}");
}

fn empirical_law(samples: impl Iterator<Item = Matching>) -> (BTreeMap<Matching, f64>, usize) {
    let mut counts = BTreeMap::new();
    let mut n = 0;
    for m in samples {
        *counts.entry(m).or_insert(0.0) += 1.0;
        n += 1;
    }
    (counts, n)
}

fn assert_fits(counts: &BTreeMap<Matching, f64>, n: usize, law: &BTreeMap<Matching, Exact>) {
    let mut observed = Vec::new();
    let mut expected = Vec::new();
    for (m, p) in law {
        let e = p.to_f64().unwrap() * n as f64;
        observed.push(counts.get(m).copied().unwrap_or(0.0));
        expected.push(e);
    }
    assert!(
        counts.keys().all(|m| law.contains_key(m)),
        "outcome outside the support"
    );
    let stat = chi_square(&observed, &expected);
    assert!(
        stat < critical(law.len() - 1),
        "chi-square {stat} on {} cells",
        law.len()
    );
}

#[test]
fn simulated_percolations_follow_the_exact_law() {
    let degrees = [2, 2, 1, 1];
    let half = Exact::new(1.into(), 2.into());
    let policy = PercolationPolicy::constant(0.5).unwrap();
    let law = exact_half_edge_law(&degrees, |_| half.clone()).unwrap();
    assert_eq!(law.values().fold(Exact::zero(), |a, b| a + b), Exact::one());
    let reps = 20_000u64;
    let (c1, n1) =
        empirical_law((0..reps).map(|s| half_edge_percolate(&degrees, &policy, s).unwrap().induced_matching()));
    assert_fits(&c1, n1, &law);
    let edge_law = exact_edge_law(&degrees, |_| half.clone()).unwrap();
    let (c2, n2) = empirical_law((0..reps).map(|s| {
        let g = HalfEdgeGraph::build(&degrees, s).unwrap();
        edge_percolate(&g, &policy, s).induced_matching()
    }));
    assert_fits(&c2, n2, &edge_law);
}

#[test]
fn thinning_view_keeps_half_edges_at_rate_p() {
    let policy = policy_from_excess_law(&ExcessWeightLaw::Uniform01, 1.0, 0.5).unwrap();
    let degrees = vec![3; 60_000];
    let g = HalfEdgeGraph::build(&degrees, 5).unwrap();
    let w = assign_weights(&g, &ExcessWeightLaw::Uniform01, WeightMode::PerHalfEdge, 5);
    let pg = thinning_view_percolate(&g, &w, &policy).unwrap();
    let regular: usize = pg.d_r().iter().sum();
    let total = g.half_edge_count() as f64;
    let p = policy.p(3);
    let z = (regular as f64 - total * p) / (total * p * (1.0 - p)).sqrt();
    assert!(z.abs() < 4.0, "z = {z}");
    let per_edge = assign_weights(&g, &ExcessWeightLaw::Uniform01, WeightMode::PerEdge, 5);
    assert!(thinning_view_percolate(&g, &per_edge, &policy).is_err());
}

#[test]
fn exact_laws_agree_on_every_small_multiset() {
    for degrees in common::multisets(6) {
        let p = |d: usize| Exact::new(1.into(), (d as i64 + 1).into());
        let a = exact_half_edge_law(&degrees, p).unwrap();
        let b = exact_edge_law(&degrees, p).unwrap();
        assert_eq!(a, b, "degrees {degrees:?}");
    }
}
