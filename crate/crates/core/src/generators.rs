//! Deterministic graph families used by tests, the CLI and the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::graph::Graph;

pub fn complete(n: usize) -> Graph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_edges(n, edges).expect("complete graph")
}

/// `K_{a,b}` with sides `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let edges = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)));
    Graph::from_edges(a + b, edges).expect("complete bipartite graph")
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(invalid(format!("cycle needs at least 3 vertices, got {n}")));
    }
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path graph")
}

/// `K_{1,leaves}` with centre 0.
pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("star graph")
}

/// Complete binary tree of the given depth in heap order (root 0).
pub fn binary_tree(depth: u32) -> Graph {
    let n = (1usize << (depth + 1)) - 1;
    Graph::from_edges(n, (1..n).map(|i| ((i - 1) / 2, i))).expect("binary tree")
}

pub fn hypercube(dim: u32) -> Graph {
    let n = 1usize << dim;
    let edges = (0..n).flat_map(|u| (0..dim).map(move |b| (u, u ^ (1 << b))).filter(|&(u, v)| u < v));
    Graph::from_edges(n, edges).expect("hypercube")
}

/// Vertex-disjoint union, ids of later graphs shifted past earlier ones.
pub fn disjoint_union(parts: &[Graph]) -> Graph {
    let mut offset = 0;
    let mut edges = Vec::new();
    for g in parts {
        edges.extend(g.edges().map(|(u, v)| (u + offset, v + offset)));
        offset += g.vertex_count();
    }
    Graph::from_edges(offset, edges).expect("disjoint union")
}

/// `copies` disjoint copies of `K_{d,d}`.
pub fn kdd(d: usize, copies: usize) -> Graph {
    disjoint_union(&vec![complete_bipartite(d, d); copies])
}

/// Erdős–Rényi `G(n, p)`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_probability(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Random bipartite graph with sides `0..n1` and `n1..n1+n2`.
pub fn bipartite_gnp(n1: usize, n2: usize, p: f64, seed: u64) -> Result<Graph> {
    check_probability(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n1 {
        for v in n1..n1 + n2 {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n1 + n2, edges)
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(format!("probability {p} outside [0, 1]")))
    }
}

pub fn is_prime(q: usize) -> bool {
    q >= 2 && (2..).take_while(|i| i * i <= q).all(|i| !q.is_multiple_of(i))
}

/// Point-line incidence graph of the projective plane over `F_q`, `q` prime.
///
/// Points are `0..N` and lines `N..2N` with `N = q^2 + q + 1`; the graph is
/// `(q+1)`-regular, bipartite and has girth 6.
pub fn incidence_plane(q: usize) -> Result<Graph> {
    if !is_prime(q) {
        return Err(invalid(format!("incidence plane needs a prime order, got {q}")));
    }
    let mut pts = Vec::new();
    for a in 0..q {
        for b in 0..q {
            pts.push([1, a, b]);
        }
    }
    for b in 0..q {
        pts.push([0, 1, b]);
    }
    pts.push([0, 0, 1]);
    let n = pts.len();
    let mut edges = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        for (j, l) in pts.iter().enumerate() {
            if (p[0] * l[0] + p[1] * l[1] + p[2] * l[2]) % q == 0 {
                edges.push((i, n + j));
            }
        }
    }
    Graph::from_edges(2 * n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        let g = kdd(4, 2);
        assert_eq!((g.vertex_count(), g.edge_count()), (16, 32));
        let h = incidence_plane(2).unwrap();
        assert_eq!((h.vertex_count(), h.edge_count()), (14, 21));
        assert!(h.vertices().all(|v| h.degree(v) == 3));
        let c = cycle(9).unwrap();
        assert_eq!((c.vertex_count(), c.edge_count()), (9, 9));
        assert_eq!(hypercube(4).edge_count(), 32);
        assert!(incidence_plane(4).is_err());
        assert!(gnp(5, 1.5, 0).is_err());
    }

    #[test]
    fn incidence_planes_are_regular_bipartite() {
        for q in [3, 5, 7] {
            let g = incidence_plane(q).unwrap();
            assert_eq!(g.vertex_count(), 2 * (q * q + q + 1));
            assert!(g.vertices().all(|v| g.degree(v) == q + 1));
            assert!(g.is_bipartite());
        }
    }

    #[test]
    fn gnp_is_seeded() {
        assert_eq!(gnp(30, 0.3, 5).unwrap(), gnp(30, 0.3, 5).unwrap());
        assert_ne!(gnp(30, 0.3, 5).unwrap(), gnp(30, 0.3, 6).unwrap());
    }
}
