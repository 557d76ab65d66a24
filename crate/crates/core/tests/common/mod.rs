//! Oracles shared by the integration tests, written independently of the
//! library's own search and enumeration code.

#![allow(dead_code)]

use fppcm::{HalfEdgeGraph, Matching, WeightAssignment};

/// Best simple path by `(weight, hops, vertex sequence)`, found by trying
/// every simple path and the cheapest of any parallel edges.
pub fn simple_path_oracle(
    g: &HalfEdgeGraph,
    w: &WeightAssignment<f64>,
    u: usize,
    v: usize,
) -> Option<(f64, usize, Vec<usize>)> {
    let n = g.vertex_count();
    let mut cheapest = vec![vec![f64::INFINITY; n]; n];
    for s in 0..g.half_edge_count() {
        let (a, b) = (g.owner(s), g.owner(g.partner(s)));
        cheapest[a][b] = cheapest[a][b].min(w.edge_weight(g, s));
    }
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    let mut path = vec![u];
    let mut on_path = vec![false; n];
    on_path[u] = true;
    extend(&cheapest, v, 0.0, &mut path, &mut on_path, &mut best);
    best
}

fn extend(
    cheapest: &[Vec<f64>],
    target: usize,
    weight: f64,
    path: &mut Vec<usize>,
    on_path: &mut Vec<bool>,
    best: &mut Option<(f64, usize, Vec<usize>)>,
) {
    let here = *path.last().unwrap();
    if here == target {
        let cand = (weight, path.len() - 1, path.clone());
        let better = match best {
            None => true,
            Some(b) => (cand.0, cand.1) < (b.0, b.1) || (cand.0 == b.0 && cand.1 == b.1 && cand.2 < b.2),
        };
        if better {
            *best = Some(cand);
        }
        return;
    }
    for next in 0..cheapest.len() {
        let c = cheapest[here][next];
        if c.is_finite() && !on_path[next] {
            on_path[next] = true;
            path.push(next);
            extend(cheapest, target, weight + c, path, on_path, best);
            path.pop();
            on_path[next] = false;
        }
    }
}

/// Number of perfect matchings of `0..total` containing every pair of `m`:
/// the free half-edges can be paired in `(free - 1)!!` ways.
pub fn completions(m: &Matching, total: usize) -> u64 {
    let free = total - 2 * m.0.len();
    (1..free as u64).step_by(2).product::<u64>().max(1)
}

pub fn perfect_matching_count(total: usize) -> u64 {
    (1..total as u64).step_by(2).product::<u64>().max(1)
}

/// Nonincreasing positive sequences with even total in `2..=max_total`.
pub fn multisets(max_total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![(Vec::<usize>::new(), max_total)];
    while let Some((seq, left)) = stack.pop() {
        let sum: usize = seq.iter().sum();
        if sum > 0 && sum.is_multiple_of(2) {
            out.push(seq.clone());
        }
        let cap = seq.last().copied().unwrap_or(max_total).min(left);
        for d in 1..=cap {
            let mut next = seq.clone();
            next.push(d);
            stack.push((next, left - d));
        }
    }
    out.sort();
    out
}

/// Sorted copy, for order-statistic oracles.
pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}
