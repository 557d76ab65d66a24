//! Edge weights `a + X` and the first-passage percolation engine.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::ExcessWeightLaw;
use crate::error::{Error, Result};
use crate::graph::HalfEdgeGraph;
use crate::rng::{stream, stream_rng};
use crate::Real;

/// Largest vertex count accepted by [`brute_force_distance`].
pub const BRUTE_FORCE_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// One excess draw per edge: weight `a + X_e`.
    #[serde(alias = "edge")]
    PerEdge,
    /// One excess draw per half-edge: weight `a + X_s1 + X_s2`.
    #[serde(alias = "halfedge")]
    PerHalfEdge,
}

impl std::str::FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge" | "per-edge" => Ok(Self::PerEdge),
            "halfedge" | "half-edge" | "per-half-edge" => Ok(Self::PerHalfEdge),
            other => Err(Error::Config(format!("unknown weight mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightAssignment<T> {
    mode: WeightMode,
    constant: T,
    excess: Vec<T>,
    /// Edge number of each half-edge (per-edge mode only).
    edge_of: Vec<u32>,
}

impl<T: Real> WeightAssignment<T> {
    /// Wraps explicit excess weights; `excess` is indexed by edge (in
    /// [`HalfEdgeGraph::edges`] order) or by half-edge depending on `mode`.
    pub fn from_excess(g: &HalfEdgeGraph, mode: WeightMode, constant: T, excess: Vec<T>) -> Result<Self> {
        if !(constant > T::zero()) {
            return Err(Error::param("constant weight part must be positive"));
        }
        let expected = match mode {
            WeightMode::PerEdge => g.edge_count(),
            WeightMode::PerHalfEdge => g.half_edge_count(),
        };
        if excess.len() != expected {
            return Err(Error::param(format!(
                "expected {expected} excess weights, got {}",
                excess.len()
            )));
        }
        if excess.iter().any(|x| !(*x >= T::zero())) {
            return Err(Error::param("excess weights must be nonnegative"));
        }
        let edge_of = match mode {
            WeightMode::PerEdge => g.edge_index(),
            WeightMode::PerHalfEdge => Vec::new(),
        };
        Ok(Self {
            mode,
            constant,
            excess,
            edge_of,
        })
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn constant(&self) -> T {
        self.constant
    }

    pub fn excess(&self) -> &[T] {
        &self.excess
    }

    /// Excess weight carried by half-edge `s` (per-half-edge mode).
    pub fn half_edge_excess(&self, s: usize) -> Option<T> {
        match self.mode {
            WeightMode::PerHalfEdge => Some(self.excess[s]),
            WeightMode::PerEdge => None,
        }
    }

    /// Weight of the edge containing half-edge `s`.
    #[inline]
    pub fn edge_weight(&self, g: &HalfEdgeGraph, s: usize) -> T {
        match self.mode {
            WeightMode::PerEdge => self.constant + self.excess[self.edge_of[s] as usize],
            WeightMode::PerHalfEdge => self.constant + self.excess[s] + self.excess[g.partner(s)],
        }
    }

    /// Excess part of the edge containing half-edge `s`.
    #[inline]
    pub fn edge_excess(&self, g: &HalfEdgeGraph, s: usize) -> T {
        match self.mode {
            WeightMode::PerEdge => self.excess[self.edge_of[s] as usize],
            WeightMode::PerHalfEdge => self.excess[s] + self.excess[g.partner(s)],
        }
    }

    /// Per-edge weights coupled to these per-half-edge draws through
    /// `X_e := X_s` for the lower half-edge `s` of each edge.
    pub fn coupled_per_edge(&self, g: &HalfEdgeGraph) -> Result<Self> {
        if self.mode != WeightMode::PerHalfEdge {
            return Err(Error::WrongWeightMode);
        }
        let excess = g.edges().map(|(s, _)| self.excess[s]).collect();
        Self::from_excess(g, WeightMode::PerEdge, self.constant, excess)
    }

    /// Copy with the excess weight of the edge containing `s` replaced.
    pub fn with_edge_excess(&self, g: &HalfEdgeGraph, s: usize, value: T) -> Self {
        let mut out = self.clone();
        match self.mode {
            WeightMode::PerEdge => out.excess[self.edge_of[s] as usize] = value,
            WeightMode::PerHalfEdge => {
                out.excess[s] = value;
                out.excess[g.partner(s)] = T::zero();
            }
        }
        out
    }
}

/// i.i.d. excess weights with constant part 1, from the weight stream of `seed`.
pub fn assign_weights<T: Real>(
    g: &HalfEdgeGraph,
    law: &ExcessWeightLaw<T>,
    mode: WeightMode,
    seed: u64,
) -> WeightAssignment<T> {
    let mut rng = stream_rng(seed, stream::WEIGHTS);
    assign_weights_with(g, law, mode, T::one(), &mut rng).expect("constant 1 is valid")
}

pub fn assign_weights_with<T: Real, R: Rng + ?Sized>(
    g: &HalfEdgeGraph,
    law: &ExcessWeightLaw<T>,
    mode: WeightMode,
    constant: T,
    rng: &mut R,
) -> Result<WeightAssignment<T>> {
    let count = match mode {
        WeightMode::PerEdge => g.edge_count(),
        WeightMode::PerHalfEdge => g.half_edge_count(),
    };
    let excess = (0..count).map(|_| law.sample(rng)).collect();
    WeightAssignment::from_excess(g, mode, constant, excess)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult<T> {
    pub weight: T,
    pub hopcount: usize,
    pub path: Vec<usize>,
}

impl<T: Real> PathResult<T> {
    /// Ordering used to pick among minimal paths: weight, hopcount, then
    /// the vertex sequence.
    pub fn tie_order(&self, other: &Self) -> Ordering {
        self.weight
            .partial_cmp(&other.weight)
            .unwrap_or(Ordering::Equal)
            .then(self.hopcount.cmp(&other.hopcount))
            .then_with(|| self.path.cmp(&other.path))
    }
}

struct Entry<T> {
    weight: T,
    hops: u32,
    vertex: u32,
}

impl<T: Real> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Real> Eq for Entry<T> {}

impl<T: Real> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Entry<T> {
    // reversed for a min-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .partial_cmp(&self.weight)
            .unwrap_or(Ordering::Equal)
            .then(other.hops.cmp(&self.hops))
            .then(other.vertex.cmp(&self.vertex))
    }
}

fn trace(pred: &[u32], source: usize, mut x: usize) -> Vec<usize> {
    let mut path = vec![x];
    while x != source {
        x = pred[x] as usize;
        path.push(x);
    }
    path.reverse();
    path
}

/// Smallest-weight path from `u` to `v`, or `None` when they are not
/// connected. Among paths of equal weight the one with fewer edges wins,
/// then the lexicographically smaller vertex sequence.
pub fn weight_distance<T: Real>(
    g: &HalfEdgeGraph,
    w: &WeightAssignment<T>,
    u: usize,
    v: usize,
) -> Result<Option<PathResult<T>>> {
    let n = g.vertex_count();
    if u >= n {
        return Err(Error::VertexOutOfRange(u));
    }
    if v >= n {
        return Err(Error::VertexOutOfRange(v));
    }
    if u == v {
        return Ok(Some(PathResult {
            weight: T::zero(),
            hopcount: 0,
            path: vec![u],
        }));
    }
    let mut dist = vec![T::infinity(); n];
    let mut hops = vec![u32::MAX; n];
    let mut pred = vec![u32::MAX; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[u] = T::zero();
    hops[u] = 0;
    pred[u] = u as u32;
    heap.push(Entry {
        weight: T::zero(),
        hops: 0,
        vertex: u as u32,
    });
    while let Some(Entry {
        weight,
        hops: h,
        vertex,
    }) = heap.pop()
    {
        let x = vertex as usize;
        if settled[x] || weight != dist[x] || h != hops[x] {
            continue;
        }
        settled[x] = true;
        if x == v {
            return Ok(Some(PathResult {
                weight,
                hopcount: h as usize,
                path: trace(&pred, u, v),
            }));
        }
        for s in g.half_edges_of(x) {
            let y = g.owner(g.partner(s));
            if y == x || settled[y] {
                continue;
            }
            let cand = weight + w.edge_weight(g, s);
            let ch = h + 1;
            let order = cand
                .partial_cmp(&dist[y])
                .unwrap_or(Ordering::Greater)
                .then(ch.cmp(&hops[y]));
            match order {
                Ordering::Less => {
                    dist[y] = cand;
                    hops[y] = ch;
                    pred[y] = x as u32;
                    heap.push(Entry {
                        weight: cand,
                        hops: ch,
                        vertex: y as u32,
                    });
                }
                Ordering::Equal
                    if pred[y] as usize != x
                    // both predecessors are settled and at equal hop depth
                    && trace(&pred, u, x) < trace(&pred, u, pred[y] as usize) =>
                {
                    pred[y] = x as u32;
                }
                _ => {}
            }
        }
    }
    Ok(None)
}

/// Exhaustive search over all simple paths; the test oracle for
/// [`weight_distance`] with the same tie-breaking rule.
pub fn brute_force_distance<T: Real>(
    g: &HalfEdgeGraph,
    w: &WeightAssignment<T>,
    u: usize,
    v: usize,
) -> Result<Option<PathResult<T>>> {
    let n = g.vertex_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::GuardExceeded {
            what: "vertex count",
            value: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if u >= n {
        return Err(Error::VertexOutOfRange(u));
    }
    if v >= n {
        return Err(Error::VertexOutOfRange(v));
    }
    // cheapest parallel edge between each ordered pair
    let mut cheapest = vec![vec![None::<T>; n]; n];
    for (x, row) in cheapest.iter_mut().enumerate() {
        for s in g.half_edges_of(x) {
            let y = g.owner(g.partner(s));
            if y == x {
                continue;
            }
            let wt = w.edge_weight(g, s);
            let slot = &mut row[y];
            if slot.is_none_or(|c| wt < c) {
                *slot = Some(wt);
            }
        }
    }
    struct Search<'a, T> {
        cheapest: &'a [Vec<Option<T>>],
        target: usize,
        best: Option<PathResult<T>>,
        on_path: Vec<bool>,
        path: Vec<usize>,
    }
    impl<T: Real> Search<'_, T> {
        fn go(&mut self, x: usize, acc: T) {
            if x == self.target {
                let cand = PathResult {
                    weight: acc,
                    hopcount: self.path.len() - 1,
                    path: self.path.clone(),
                };
                if self.best.as_ref().is_none_or(|b| cand.tie_order(b) == Ordering::Less) {
                    self.best = Some(cand);
                }
                return;
            }
            for y in 0..self.cheapest.len() {
                if let Some(wt) = self.cheapest[x][y] {
                    if !self.on_path[y] {
                        self.on_path[y] = true;
                        self.path.push(y);
                        self.go(y, acc + wt);
                        self.path.pop();
                        self.on_path[y] = false;
                    }
                }
            }
        }
    }
    let mut search = Search {
        cheapest: &cheapest,
        target: v,
        best: None,
        on_path: vec![false; n],
        path: vec![u],
    };
    search.on_path[u] = true;
    search.go(u, T::zero());
    Ok(search.best)
}
