//! Exact maximum independent sets by branch and bound over `u64` bitsets.
//!
//! Vertices are relabelled by degree (descending, ties by label) so that bit
//! `k` is the `k`-th vertex in that order. The bound is a greedy clique cover
//! of the remaining candidates: an independent set meets each clique at most
//! once. The search is sequential, which makes the witness a deterministic
//! function of the graph.

use serde::Serialize;

use super::graph::Graph;
use crate::error::{Error, Result};

/// Largest graph accepted by the exact solver.
pub const MIS_CAP: usize = 40;
/// Largest graph accepted by the exhaustive reference search.
pub const EXHAUSTIVE_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependentSet {
    pub size: usize,
    /// Vertices in ascending order.
    pub witness: Vec<usize>,
}

struct Search {
    /// Open neighbourhoods in relabelled bit positions.
    adj: Vec<u64>,
    best: u64,
    best_size: u32,
}

impl Search {
    fn clique_cover(&self, mut cand: u64) -> u32 {
        let mut cliques = 0;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            let mut clique_cand = cand & self.adj[v];
            cand &= !(1 << v);
            while clique_cand != 0 {
                let w = clique_cand.trailing_zeros() as usize;
                cand &= !(1 << w);
                clique_cand &= self.adj[w];
            }
            cliques += 1;
        }
        cliques
    }

    fn expand(&mut self, current: u64, cand: u64) {
        let size = current.count_ones();
        if cand == 0 {
            if size > self.best_size {
                self.best = current;
                self.best_size = size;
            }
            return;
        }
        if size + cand.count_ones() <= self.best_size
            || size + self.clique_cover(cand) <= self.best_size
        {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        let bit = 1u64 << v;
        self.expand(current | bit, cand & !bit & !self.adj[v]);
        self.expand(current, cand & !bit);
    }
}

/// `α(G)` with one maximum independent set.
pub fn independence_number(g: &Graph) -> Result<IndependentSet> {
    let n = g.n();
    if n > MIS_CAP {
        return Err(Error::SizeCap(format!(
            "exact independence number limited to {MIS_CAP} vertices, got {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let adj = order
        .iter()
        .map(|&u| {
            order
                .iter()
                .enumerate()
                .filter(|&(_, &w)| g.adjacent(u, w))
                .fold(0u64, |acc, (k, _)| acc | 1 << k)
        })
        .collect();
    let mut search = Search {
        adj,
        best: 0,
        best_size: 0,
    };
    search.expand(0, (1u64 << n) - 1);

    let mut witness: Vec<usize> = (0..n)
        .filter(|&k| search.best >> k & 1 == 1)
        .map(|k| order[k])
        .collect();
    witness.sort_unstable();
    Ok(IndependentSet {
        size: witness.len(),
        witness,
    })
}

/// Reference answer by enumerating every vertex subset.
pub fn independence_number_exhaustive(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > EXHAUSTIVE_CAP {
        return Err(Error::SizeCap(format!(
            "exhaustive search limited to {EXHAUSTIVE_CAP} vertices, got {n}"
        )));
    }
    let adj: Vec<u32> = (0..n)
        .map(|u| (0..n).filter(|&w| g.adjacent(u, w)).fold(0, |acc, w| acc | 1 << w))
        .collect();
    let best = (0u32..1 << n)
        .filter(|&s| (0..n).all(|v| s >> v & 1 == 0 || s & adj[v] == 0))
        .map(u32::count_ones)
        .max()
        .unwrap_or(0);
    Ok(best as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmath::random::stream_rng;

    /// Independent subset-enumeration oracle for the tests.
    fn brute_force(g: &Graph) -> usize {
        let n = g.n();
        (0u64..1 << n)
            .filter(|s| {
                let set: Vec<usize> = (0..n).filter(|v| s >> v & 1 == 1).collect();
                g.is_independent(&set)
            })
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn known_values() {
        for n in 1..=6 {
            assert_eq!(independence_number(&Graph::complete(n).unwrap()).unwrap().size, 1);
        }
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(brute_force(&c5), 2);
        assert_eq!(independence_number(&c5).unwrap().size, 2);
        let p = Graph::petersen();
        assert_eq!(brute_force(&p), 4);
        let is = independence_number(&p).unwrap();
        assert_eq!(is.size, 4);
        assert!(p.is_independent(&is.witness));
        assert_eq!(independence_number(&Graph::empty(4).unwrap()).unwrap().size, 4);
    }

    #[test]
    fn agrees_with_enumeration() {
        let mut rng = stream_rng(3, 0);
        for k in 0..60 {
            let n = 1 + k % 14;
            let g = Graph::random(&mut rng, n, 0.1 + 0.8 * (k % 5) as f64 / 4.0).unwrap();
            let is = independence_number(&g).unwrap();
            assert!(g.is_independent(&is.witness));
            assert_eq!(is.size, brute_force(&g));
            assert_eq!(is.size, independence_number_exhaustive(&g).unwrap());
        }
    }

    #[test]
    fn forty_vertices_and_cap() {
        let mut rng = stream_rng(4, 0);
        let g = Graph::random(&mut rng, 40, 0.3).unwrap();
        let is = independence_number(&g).unwrap();
        assert!(g.is_independent(&is.witness));
        assert_eq!(independence_number(&g).unwrap(), is);
        let big = Graph::empty(41).unwrap();
        assert!(matches!(independence_number(&big), Err(Error::SizeCap(_))));
    }
}
