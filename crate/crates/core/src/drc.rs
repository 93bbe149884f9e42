//! Dependent random choice, dense two-edge subdivisions and degree bounds.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{verify_subdivision, SubdivisionCertificate};
use crate::error::{invalid, Error, Result};
use crate::graph::{delete, max_bipartite_matching, Graph, VertexSet};

pub const DEFAULT_MAX_RETRIES: usize = 64;
/// Search nodes allowed to the branch-set backtracking in [`dense_tk2`].
pub const DEFAULT_EMBED_BUDGET: u64 = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrcParams {
    /// Number of samples drawn from `V2`.
    pub t: u32,
    /// Subset size.
    pub r: usize,
    /// Common-neighbour demand.
    pub c: usize,
    /// Target size.
    pub a: usize,
}

impl DrcParams {
    pub fn new(t: u32, r: usize, c: usize, a: usize) -> Result<Self> {
        let p = DrcParams { t, r, c, a };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if self.t == 0 || self.r == 0 || self.c == 0 || self.a == 0 {
            return Err(invalid("t, r, c and a must be positive"));
        }
        if self.r > self.a {
            return Err(invalid(format!("r = {} exceeds a = {}", self.r, self.a)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DrcError {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("no valid set after {retries} retries")]
    RetriesExhausted { retries: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("no TK_{k} with two-edge paths found ({reason})")]
    NoEmbedding { k: usize, reason: String },
}

fn binomial(n: usize, r: usize) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    (0..r).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Exact test of `alpha^t n1 - C(n1, r) (c / n2)^t >= a`.
pub fn drc_feasible(n1: usize, n2: usize, alpha: Rational64, p: &DrcParams) -> Result<bool> {
    p.check()?;
    if alpha < Rational64::zero() || alpha > Rational64::one() {
        return Err(invalid(format!("alpha = {alpha} outside [0, 1]")));
    }
    if n2 == 0 {
        return Err(invalid("V2 must be nonempty"));
    }
    let big = |x: i64| BigInt::from(x);
    let alpha = BigRational::new(big(*alpha.numer()), big(*alpha.denom()));
    let first = num_traits::pow(alpha, p.t as usize) * BigRational::from_integer(BigInt::from(n1));
    let ratio = BigRational::new(BigInt::from(p.c), BigInt::from(n2));
    let second = BigRational::from_integer(binomial(n1, p.r)) * num_traits::pow(ratio, p.t as usize);
    Ok(first - second >= BigRational::from_integer(BigInt::from(p.a)))
}

fn common_neighbors(g: &Graph, set: &[usize], within: &[bool]) -> usize {
    let Some((&first, rest)) = set.split_first() else {
        return within.iter().filter(|&&b| b).count();
    };
    g.neighbors(first).iter().filter(|&&w| within[w] && rest.iter().all(|&u| g.has_edge(u, w))).count()
}

fn all_subsets_rich(g: &Graph, a0: &[usize], r: usize, c: usize, in_v2: &[bool]) -> bool {
    a0.iter().copied().combinations(r).all(|s| common_neighbors(g, &s, in_v2) >= c)
}

/// Finds `A0 ⊆ V1` with `|A0| >= a` such that every `r`-subset of `A0` has at
/// least `c` common neighbours in `V2`. Every returned set is checked
/// exhaustively.
pub fn drc_select(
    g: &Graph,
    v1: &VertexSet,
    v2: &VertexSet,
    p: &DrcParams,
    seed: u64,
    max_retries: usize,
) -> std::result::Result<VertexSet, DrcError> {
    p.check()?;
    g.check_set(v1)?;
    g.check_set(v2)?;
    if !v1.is_disjoint(v2) {
        return Err(invalid("V1 and V2 overlap").into());
    }
    let in_v1 = g.mask(v1);
    let in_v2 = g.mask(v2);
    if g.edges().any(|(x, y)| !(in_v1[x] && in_v2[y] || in_v1[y] && in_v2[x])) {
        return Err(invalid("graph is not bipartite over the given partition").into());
    }
    let (n1, n2) = (v1.len(), v2.len());
    if n1 == 0 || n2 == 0 {
        return Err(invalid("both sides must be nonempty").into());
    }
    let alpha = Rational64::new(g.edge_count() as i64, (n1 * n2) as i64);
    if !drc_feasible(n1, n2, alpha, p)? {
        return Err(invalid(format!("parameters infeasible at edge density {alpha}")).into());
    }
    let side2 = v2.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_retries {
        let sample: Vec<usize> = (0..p.t).map(|_| side2[rng.gen_range(0..side2.len())]).collect();
        let mut a: Vec<usize> = v1.iter().filter(|&x| sample.iter().all(|&y| g.has_edge(x, y))).collect();
        let mut removed = vec![false; g.vertex_count()];
        for s in a.iter().copied().combinations(p.r) {
            if s.iter().any(|&x| removed[x]) {
                continue;
            }
            if common_neighbors(g, &s, &in_v2) < p.c {
                removed[s[0]] = true;
            }
        }
        a.retain(|&x| !removed[x]);
        if a.len() >= p.a && all_subsets_rich(g, &a, p.r, p.c, &in_v2) {
            return Ok(a.into_iter().collect());
        }
    }
    Err(DrcError::RetriesExhausted { retries: max_retries })
}

/// A `TK_k` whose paths all have two edges: `k` branch vertices and a
/// distinct middle vertex for each pair.
pub fn dense_tk2(g: &Graph, k: usize, seed: u64) -> std::result::Result<SubdivisionCertificate, EmbedError> {
    dense_tk2_with(g, k, seed, DEFAULT_EMBED_BUDGET)
}

pub fn dense_tk2_with(g: &Graph, k: usize, seed: u64, budget: u64) -> std::result::Result<SubdivisionCertificate, EmbedError> {
    if k < 2 {
        return Err(invalid("k must be at least 2").into());
    }
    let pairs = k * (k - 1) / 2;
    let fail = |reason: &str| EmbedError::NoEmbedding { k, reason: reason.to_string() };
    if g.vertex_count() < k + pairs {
        return Err(fail("too few vertices"));
    }
    // Bipartite hosts: precondition the branch side by dependent random choice.
    if let Some(colour) = g.two_coloring() {
        for side in [0u8, 1] {
            let v1: VertexSet = g.vertices().filter(|&v| colour[v] == side).collect();
            let v2: VertexSet = g.vertices().filter(|&v| colour[v] != side).collect();
            if v1.len() < k || v2.len() < pairs {
                continue;
            }
            for t in 1..=4 {
                let Ok(p) = DrcParams::new(t, 2, pairs, k) else { continue };
                if let Ok(a0) = drc_select(g, &v1, &v2, &p, seed, DEFAULT_MAX_RETRIES) {
                    let branch: Vec<usize> = a0.iter().take(k).collect();
                    if let Some(cert) = assign_middles(g, &branch) {
                        return Ok(cert);
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = g.vertices().filter(|&v| g.degree(v) >= k - 1).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut nodes = 0u64;
    let mut branch = Vec::with_capacity(k);
    match search(g, &order, 0, k, &mut branch, &mut nodes, budget) {
        Some(cert) => Ok(cert),
        None if nodes >= budget => Err(fail("search budget exhausted")),
        None => Err(fail("no branch set admits distinct middles")),
    }
}

fn search(
    g: &Graph,
    order: &[usize],
    from: usize,
    k: usize,
    branch: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
) -> Option<SubdivisionCertificate> {
    if branch.len() == k {
        return assign_middles(g, branch);
    }
    for i in from..order.len() {
        if order.len() - i < k - branch.len() {
            break;
        }
        *nodes += 1;
        if *nodes >= budget {
            return None;
        }
        let v = order[i];
        let ok = branch.iter().all(|&u| {
            g.neighbors(u).iter().any(|&w| w != v && !branch.contains(&w) && g.has_edge(v, w))
        });
        if !ok {
            continue;
        }
        branch.push(v);
        if let Some(c) = search(g, order, i + 1, k, branch, nodes, budget) {
            return Some(c);
        }
        branch.pop();
    }
    None
}

/// Matches every branch pair to a distinct common neighbour outside the branch set.
fn assign_middles(g: &Graph, branch: &[usize]) -> Option<SubdivisionCertificate> {
    let pairs: Vec<(usize, usize)> = branch.iter().copied().tuple_combinations().collect();
    let adj: Vec<Vec<usize>> = pairs
        .iter()
        .map(|&(u, v)| g.neighbors(u).iter().copied().filter(|&w| !branch.contains(&w) && g.has_edge(v, w)).collect())
        .collect();
    let partner = max_bipartite_matching(&adj, g.vertex_count());
    let paths = pairs
        .iter()
        .zip(&partner)
        .map(|(&(u, v), m)| m.map(|w| vec![u, w, v]))
        .collect::<Option<Vec<_>>>()?;
    let cert = SubdivisionCertificate::new(2, branch.to_vec(), paths);
    assert!(verify_subdivision(g, &cert).passed, "matched middles must certify");
    Some(cert)
}

fn generalized_binomial(x: f64, s: u32) -> f64 {
    if x < (s - 1) as f64 {
        return 0.0;
    }
    (0..s).fold(1.0, |acc, i| acc * (x - i as f64) / (i + 1) as f64)
}

/// Largest average degree `d` on the `A` side of a `K_{s,t}`-free bipartite
/// graph allowed by `|A| C(d, s) <= t C(|B|, s)`, capped at `|B|`.
pub fn kst_degree_bound(n_a: usize, n_b: usize, s: u32, t: u32) -> Result<f64> {
    if s == 0 || t == 0 {
        return Err(invalid("s and t must be positive"));
    }
    if n_a == 0 {
        return Err(invalid("A must be nonempty"));
    }
    let cap = n_b as f64;
    if s == 1 {
        return Ok((t as f64 * n_b as f64 / n_a as f64).min(cap));
    }
    let rhs = t as f64 * generalized_binomial(n_b as f64, s);
    let holds = |x: f64| n_a as f64 * generalized_binomial(x, s) <= rhs;
    if holds(cap) {
        return Ok(cap);
    }
    let (mut lo, mut hi) = ((s - 1) as f64, cap);
    while hi - lo > 1e-10 {
        let mid = (lo + hi) / 2.0;
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RobustVerdict {
    DegreeOk { degree: Rational64 },
    FoundTk2(SubdivisionCertificate),
    /// Neither conclusion was reached; carries the residual degree and the embedding failure.
    Failure { degree: Rational64, reason: String },
}

/// Either `d(G - W) >= d/2`, or a two-edge `TK_kappa` found in the graph of
/// edges between `V(G) - W` and `W`.
pub fn robust_degree_or_tk2(g: &Graph, w: &VertexSet, d: Rational64, kappa: usize, seed: u64) -> Result<RobustVerdict> {
    g.check_set(w)?;
    let rest = delete(g, w)?;
    let degree = rest.graph.average_degree();
    if degree >= d / 2 {
        return Ok(RobustVerdict::DegreeOk { degree });
    }
    let in_w = g.mask(w);
    let crossing = Graph::from_edges(g.vertex_count(), g.edges().filter(|&(x, y)| in_w[x] != in_w[y]))?;
    Ok(match dense_tk2(&crossing, kappa, seed) {
        Ok(cert) => {
            debug_assert!(verify_subdivision(g, &cert).passed);
            RobustVerdict::FoundTk2(cert)
        }
        Err(e) => RobustVerdict::Failure { degree, reason: e.to_string() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn feasibility_examples() {
        let p = DrcParams::new(3, 2, 5, 3).unwrap();
        assert!(drc_feasible(60, 60, Rational64::new(1, 2), &p).unwrap());
        assert!(!drc_feasible(60, 60, Rational64::zero(), &p).unwrap());
        let p = DrcParams::new(20, 2, 1, 5).unwrap();
        assert!(drc_feasible(10, 50, Rational64::one(), &p).unwrap());
        assert!(DrcParams::new(1, 4, 1, 3).is_err());
        assert!(drc_feasible(10, 10, Rational64::new(3, 2), &p).is_err());
    }

    #[test]
    fn selection_examples() {
        let g = generators::complete_bipartite(6, 10);
        let v1: VertexSet = (0..6).collect();
        let v2: VertexSet = (6..16).collect();
        let p = DrcParams::new(4, 2, 2, 4).unwrap();
        assert_eq!(drc_select(&g, &v1, &v2, &p, 0, 8).unwrap(), v1);

        let empty = Graph::empty(16);
        let p = DrcParams::new(1, 1, 1, 1).unwrap();
        assert!(matches!(drc_select(&empty, &v1, &v2, &p, 0, 8), Err(DrcError::Invalid(_))));
    }

    #[test]
    fn selection_on_random_bipartite_graphs() {
        let p = DrcParams::new(3, 2, 5, 3).unwrap();
        let v1: VertexSet = (0..60).collect();
        let v2: VertexSet = (60..120).collect();
        let ok = (0..100)
            .filter(|&seed| {
                let g = generators::bipartite_gnp(60, 60, 0.5, seed).unwrap();
                match drc_select(&g, &v1, &v2, &p, seed, 20) {
                    Ok(a0) => {
                        assert!(a0.len() >= 3 && all_subsets_rich(&g, &a0.to_vec(), 2, 5, &g.mask(&v2)));
                        true
                    }
                    Err(_) => false,
                }
            })
            .count();
        assert!(ok >= 95, "{ok} of 100 seeds succeeded");
    }

    #[test]
    fn dense_embedding_examples() {
        let k10 = generators::complete(10);
        let c = dense_tk2(&k10, 4, 0).unwrap();
        assert_eq!(c.vertices().len(), 10);
        assert!(verify_subdivision(&k10, &c).passed);

        let k44 = generators::complete_bipartite(4, 4);
        let c = dense_tk2(&k44, 3, 0).unwrap();
        assert_eq!(c.branch.len(), 3);
        assert!(verify_subdivision(&k44, &c).passed);
        let side = |v: usize| v < 4;
        assert!(c.branch.iter().all(|&b| side(b) == side(c.branch[0])));

        let tree = generators::binary_tree(4);
        assert!(matches!(dense_tk2(&tree, 3, 0), Err(EmbedError::NoEmbedding { .. })));
        assert!(dense_tk2(&k10, 1, 0).is_err());
    }

    #[test]
    fn kst_examples() {
        assert!((kst_degree_bound(7, 7, 2, 2).unwrap() - 4.0).abs() < 1e-9);
        assert!((kst_degree_bound(7, 7, 1, 2).unwrap() - 2.0).abs() < 1e-12);
        assert!((kst_degree_bound(10, 4, 1, 2).unwrap() - 0.8).abs() < 1e-12);
        let fano = generators::incidence_plane(2).unwrap();
        let observed = 2.0 * fano.edge_count() as f64 / 14.0;
        assert_eq!(observed, 3.0);
        assert!(observed <= kst_degree_bound(7, 7, 2, 2).unwrap());
    }

    #[test]
    fn robust_examples() {
        let k20 = generators::complete(20);
        let w: VertexSet = (3..8).collect();
        let v = robust_degree_or_tk2(&k20, &w, Rational64::from_integer(20), 3, 0).unwrap();
        assert_eq!(v, RobustVerdict::DegreeOk { degree: Rational64::from_integer(14) });
        let v = robust_degree_or_tk2(&k20, &VertexSet::new(), Rational64::from_integer(19), 3, 0).unwrap();
        assert!(matches!(v, RobustVerdict::DegreeOk { .. }));

        let k = generators::complete_bipartite(10, 10);
        let w: VertexSet = (10..20).collect();
        match robust_degree_or_tk2(&k, &w, Rational64::from_integer(10), 3, 0).unwrap() {
            RobustVerdict::FoundTk2(c) => assert!(verify_subdivision(&k, &c).passed),
            other => panic!("unexpected {other:?}"),
        }
    }
}
