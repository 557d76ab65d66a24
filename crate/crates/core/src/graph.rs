//! Configuration-model multigraphs built by pairing half-edges.
//!
//! Half-edges of vertex `i` occupy the contiguous block
//! `offsets[i]..offsets[i + 1]`; `pair[s]` is the half-edge that `s` is
//! matched to. Vertices and half-edges are 0-based internally; text exports
//! are 1-based.

use std::collections::VecDeque;
use std::io::Write;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stream, stream_rng};

/// Largest total degree accepted by [`enumerate_matchings`].
pub const ENUMERATION_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfEdgeGraph {
    degrees: Vec<usize>,
    offsets: Vec<usize>,
    owner: Vec<u32>,
    pair: Vec<u32>,
}

/// Ordered list of half-edge pairs with pairwise distinct entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching(pub Vec<(usize, usize)>);

impl Matching {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pairs with each pair sorted and the list sorted: the unordered view.
    pub fn canonical(&self) -> Matching {
        let mut v: Vec<(usize, usize)> = self.0.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        v.sort_unstable();
        Matching(v)
    }

    pub fn half_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().flat_map(|&(a, b)| [a, b])
    }
}

/// Applies the odd-sum rule: when the total degree is odd the last vertex
/// receives one extra half-edge.
pub fn fix_parity(degrees: &[usize]) -> Vec<usize> {
    let mut d = degrees.to_vec();
    if d.iter().sum::<usize>() % 2 == 1 {
        if let Some(last) = d.last_mut() {
            *last += 1;
        }
    }
    d
}

fn layout(degrees: &[usize]) -> (Vec<usize>, Vec<u32>) {
    let mut offsets = Vec::with_capacity(degrees.len() + 1);
    let mut acc = 0usize;
    offsets.push(0);
    for &d in degrees {
        acc += d;
        offsets.push(acc);
    }
    let mut owner = Vec::with_capacity(acc);
    for (v, &d) in degrees.iter().enumerate() {
        owner.extend(std::iter::repeat_n(v as u32, d));
    }
    (offsets, owner)
}

/// Uniform perfect matching of `0..total` by sequential pairing: the
/// lowest unmatched half-edge is paired with a uniformly chosen other
/// unmatched half-edge.
pub(crate) fn sequential_pairing<R: Rng + ?Sized>(total: usize, rng: &mut R) -> Vec<u32> {
    debug_assert!(total.is_multiple_of(2));
    // pool[..live] holds the unmatched half-edges, slot[s] is s's position
    let mut pool: Vec<u32> = (0..total as u32).collect();
    let mut slot: Vec<u32> = (0..total as u32).collect();
    let mut pair = vec![u32::MAX; total];
    let mut live = total;
    let remove = |pool: &mut Vec<u32>, slot: &mut Vec<u32>, live: &mut usize, s: u32| {
        let at = slot[s as usize] as usize;
        let last = pool[*live - 1];
        pool[at] = last;
        slot[last as usize] = at as u32;
        *live -= 1;
    };
    for s in 0..total as u32 {
        if pair[s as usize] != u32::MAX {
            continue;
        }
        remove(&mut pool, &mut slot, &mut live, s);
        let t = pool[rng.random_range(0..live)];
        remove(&mut pool, &mut slot, &mut live, t);
        pair[s as usize] = t;
        pair[t as usize] = s;
    }
    pair
}

impl HalfEdgeGraph {
    /// Configuration model on `degrees` (after the odd-sum fix) with the
    /// pairing drawn from the pairing stream of `seed`.
    pub fn build(degrees: &[usize], seed: u64) -> Result<Self> {
        let mut rng = stream_rng(seed, stream::PAIRING);
        Self::build_with(degrees, &mut rng)
    }

    pub fn build_with<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::EmptyDegrees);
        }
        if let Some(i) = degrees.iter().position(|&d| d == 0) {
            return Err(Error::param(format!("vertex {i} has degree 0")));
        }
        let degrees = fix_parity(degrees);
        let (offsets, owner) = layout(&degrees);
        let total = *offsets.last().expect("nonempty");
        if total > u32::MAX as usize {
            return Err(Error::param("total degree exceeds the u32 half-edge index space"));
        }
        let pair = sequential_pairing(total, rng);
        Ok(Self {
            degrees,
            offsets,
            owner,
            pair,
        })
    }

    /// Graph with a prescribed pairing; `pairing` lists each edge once.
    pub fn from_pairing(degrees: &[usize], pairing: &[(usize, usize)]) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::EmptyDegrees);
        }
        let degrees = fix_parity(degrees);
        let (offsets, owner) = layout(&degrees);
        let total = *offsets.last().expect("nonempty");
        let mut pair = vec![u32::MAX; total];
        for &(a, b) in pairing {
            if a >= total || b >= total || a == b {
                return Err(Error::param(format!("bad pair ({a}, {b})")));
            }
            if pair[a] != u32::MAX {
                return Err(Error::OverlappingMatching(a));
            }
            if pair[b] != u32::MAX {
                return Err(Error::OverlappingMatching(b));
            }
            pair[a] = b as u32;
            pair[b] = a as u32;
        }
        if let Some(s) = pair.iter().position(|&p| p == u32::MAX) {
            return Err(Error::param(format!("half-edge {s} left unpaired")));
        }
        Ok(Self {
            degrees,
            offsets,
            owner,
            pair,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn half_edge_count(&self) -> usize {
        self.pair.len()
    }

    pub fn edge_count(&self) -> usize {
        self.pair.len() / 2
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    #[inline]
    pub fn half_edges_of(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    #[inline]
    pub fn owner(&self, s: usize) -> usize {
        self.owner[s] as usize
    }

    #[inline]
    pub fn partner(&self, s: usize) -> usize {
        self.pair[s] as usize
    }

    /// `(half-edge, neighbour)` pairs of `v`; a loop shows up twice.
    #[inline]
    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.half_edges_of(v)
            .map(move |s| (s, self.owner[self.pair[s] as usize] as usize))
    }

    /// Edges as `(lower half-edge, upper half-edge)`, ordered by the lower one.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pair
            .iter()
            .enumerate()
            .filter(|(s, &t)| *s < t as usize)
            .map(|(s, &t)| (s, t as usize))
    }

    /// Index of the edge containing each half-edge, numbering edges in the
    /// order of [`Self::edges`].
    pub fn edge_index(&self) -> Vec<u32> {
        let mut idx = vec![0u32; self.pair.len()];
        let mut next = 0u32;
        for s in 0..self.pair.len() {
            let t = self.pair[s] as usize;
            if s < t {
                idx[s] = next;
                idx[t] = next;
                next += 1;
            }
        }
        idx
    }

    pub fn matching(&self) -> Matching {
        Matching(self.edges().collect())
    }

    /// Number of edges between `u` and `v` (loops counted once).
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        let n = self.neighbours(u).filter(|&(_, w)| w == v).count();
        if u == v {
            n / 2
        } else {
            n
        }
    }

    /// Writes the edge list as `u v` lines, 1-based, loops once.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (s, t) in self.edges() {
            writeln!(out, "{} {}", self.owner(s) + 1, self.owner(t) + 1)?;
        }
        Ok(())
    }

    pub fn write_degrees<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for d in &self.degrees {
            writeln!(out, "{d}")?;
        }
        Ok(())
    }

    /// Hop distance by breadth-first search; `None` when unreachable.
    pub fn graph_distance(&self, u: usize, v: usize) -> Result<Option<usize>> {
        let n = self.vertex_count();
        if u >= n {
            return Err(Error::VertexOutOfRange(u));
        }
        if v >= n {
            return Err(Error::VertexOutOfRange(v));
        }
        Ok(bfs_distance(n, u, v, |x| self.neighbours(x).map(|(_, w)| w)))
    }
}

/// Breadth-first hop count from `u` to `v` over an adjacency closure.
pub(crate) fn bfs_distance<F, I>(n: usize, u: usize, v: usize, adjacent: F) -> Option<usize>
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    if u == v {
        return Some(0);
    }
    let mut dist = vec![u32::MAX; n];
    dist[u] = 0;
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        let next = dist[x] + 1;
        for w in adjacent(x) {
            if dist[w] == u32::MAX {
                if w == v {
                    return Some(next as usize);
                }
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Every perfect matching of the half-edges of `degrees` (after the
/// odd-sum fix), each exactly once, as canonical pair lists.
pub fn enumerate_matchings(degrees: &[usize]) -> Result<Vec<Matching>> {
    let degrees = fix_parity(degrees);
    let total: usize = degrees.iter().sum();
    enumerate_perfect_matchings(total)
}

pub(crate) fn enumerate_perfect_matchings(total: usize) -> Result<Vec<Matching>> {
    if total > ENUMERATION_LIMIT {
        return Err(Error::GuardExceeded {
            what: "total degree",
            value: total,
            limit: ENUMERATION_LIMIT,
        });
    }
    fn rec(free: &mut Vec<usize>, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Matching>) {
        if free.is_empty() {
            out.push(Matching(acc.clone()));
            return;
        }
        let first = free.remove(0);
        for i in 0..free.len() {
            let partner = free.remove(i);
            acc.push((first, partner));
            rec(free, acc, out);
            acc.pop();
            free.insert(i, partner);
        }
        free.insert(0, first);
    }
    let mut out = Vec::new();
    if total % 2 == 1 {
        return Ok(out);
    }
    rec(&mut (0..total).collect(), &mut Vec::new(), &mut out);
    Ok(out)
}
