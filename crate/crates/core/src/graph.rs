//! Immutable simple undirected graphs and the elementary degree operations
//! (induced subgraphs, vertex deletion, k-cores, bipartite halves) that every
//! construction in the crate is built from.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// An undirected simple graph on vertices `0..n` with sorted adjacency lists.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.vertex_count())
            .field("m", &self.edge_count)
            .finish()
    }
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], edge_count: 0 }
    }

    /// Builds a graph from an edge list. Self-loops, parallel edges and
    /// out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::InvalidVertex { vertex: x, order: n });
                }
            }
            if u == v {
                return Err(invalid(format!("self-loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
            edge_count += 1;
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid(format!("parallel edge at vertex {v}")));
            }
        }
        Ok(Graph { adj, edge_count })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.adj.len()
    }

    /// Edges as `(u, v)` pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::InvalidVertex { vertex: v, order: self.vertex_count() })
        }
    }

    pub fn check_set(&self, set: &VertexSet) -> Result<()> {
        match set.last() {
            Some(v) => self.check_vertex(v),
            None => Ok(()),
        }
    }

    /// Membership mask for `set`, sized to this graph.
    pub fn mask(&self, set: &VertexSet) -> Vec<bool> {
        let mut mask = vec![false; self.vertex_count()];
        for v in set.iter() {
            if v < mask.len() {
                mask[v] = true;
            }
        }
        mask
    }

    /// Exact average degree `2|E|/n` as a rational.
    pub fn average_degree(&self) -> Rational64 {
        if self.is_empty() {
            return Rational64::from_integer(0);
        }
        Rational64::new(2 * self.edge_count as i64, self.vertex_count() as i64)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Proper 2-colouring if the graph is bipartite. Each component is
    /// coloured by BFS layer parity from its smallest vertex.
    pub fn two_coloring(&self) -> Option<Vec<u8>> {
        let n = self.vertex_count();
        let mut color = vec![u8::MAX; n];
        let mut queue = VecDeque::new();
        for root in 0..n {
            if color[root] != u8::MAX {
                continue;
            }
            color[root] = 0;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if color[w] == u8::MAX {
                        color[w] = color[u] ^ 1;
                        queue.push_back(w);
                    } else if color[w] == color[u] {
                        return None;
                    }
                }
            }
        }
        Some(color)
    }

    pub fn is_bipartite(&self) -> bool {
        self.two_coloring().is_some()
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut comp = vec![root];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// A set of vertex ids, iterated in increasing order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(BTreeSet<usize>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn insert(&mut self, v: usize) -> bool {
        self.0.insert(v)
    }

    pub fn remove(&mut self, v: usize) -> bool {
        self.0.remove(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.union(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn extend<I: IntoIterator<Item = usize>>(&mut self, iter: I) {
        self.0.extend(iter)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.iter().copied().collect()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[usize; N]> for VertexSet {
    fn from(arr: [usize; N]) -> Self {
        arr.into_iter().collect()
    }
}

impl From<Vec<usize>> for VertexSet {
    fn from(v: Vec<usize>) -> Self {
        v.into_iter().collect()
    }
}

impl From<&[usize]> for VertexSet {
    fn from(v: &[usize]) -> Self {
        v.iter().copied().collect()
    }
}

/// Exact degree statistics of a non-empty graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeStats {
    pub average_degree: Rational64,
    pub min_degree: usize,
    pub max_degree: usize,
}

pub fn degree_stats(g: &Graph) -> Result<DegreeStats> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(DegreeStats {
        average_degree: g.average_degree(),
        min_degree: g.min_degree(),
        max_degree: g.max_degree(),
    })
}

/// `N(W)`: every vertex adjacent to `W` that is not itself in `W`.
pub fn external_neighborhood(g: &Graph, w: &VertexSet) -> Result<VertexSet> {
    g.check_set(w)?;
    Ok(external_neighborhood_unchecked(g, w))
}

pub(crate) fn external_neighborhood_unchecked(g: &Graph, w: &VertexSet) -> VertexSet {
    w.iter()
        .flat_map(|v| g.neighbors(v).iter().copied())
        .filter(|&x| !w.contains(x))
        .collect()
}

/// A subgraph together with the parent id of each of its vertices.
///
/// Local vertex `i` corresponds to `parent[i]` in the graph it was cut from;
/// `parent` is strictly increasing, so relative id order is preserved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: Graph,
    pub parent: Vec<usize>,
}

impl Subgraph {
    /// Wraps a graph as a subgraph of itself.
    pub fn identity(g: &Graph) -> Self {
        Subgraph { graph: g.clone(), parent: g.vertices().collect() }
    }

    pub fn lift(&self, v: usize) -> usize {
        self.parent[v]
    }

    pub fn lift_set(&self, set: &VertexSet) -> VertexSet {
        set.iter().map(|v| self.parent[v]).collect()
    }

    pub fn lift_path(&self, path: &[usize]) -> Vec<usize> {
        path.iter().map(|&v| self.parent[v]).collect()
    }

    /// Local id of a parent vertex, if it survived.
    pub fn local(&self, parent_vertex: usize) -> Option<usize> {
        self.parent.binary_search(&parent_vertex).ok()
    }

    /// Composes with a further subgraph taken inside `self.graph`.
    pub fn compose(&self, inner: Subgraph) -> Subgraph {
        let parent = inner.parent.iter().map(|&v| self.parent[v]).collect();
        Subgraph { graph: inner.graph, parent }
    }

    pub fn parent_set(&self) -> VertexSet {
        self.parent.iter().copied().collect()
    }
}

fn induced_by_mask(g: &Graph, keep: &[bool]) -> Subgraph {
    let mut local = vec![usize::MAX; g.vertex_count()];
    let mut parent = Vec::new();
    for v in g.vertices() {
        if keep[v] {
            local[v] = parent.len();
            parent.push(v);
        }
    }
    let mut adj = vec![Vec::new(); parent.len()];
    let mut edge_count = 0;
    for (i, &v) in parent.iter().enumerate() {
        for &w in g.neighbors(v) {
            if keep[w] {
                adj[i].push(local[w]);
                if w > v {
                    edge_count += 1;
                }
            }
        }
    }
    Subgraph { graph: Graph { adj, edge_count }, parent }
}

/// `G[S]`, with the id remapping table.
pub fn induced(g: &Graph, s: &VertexSet) -> Result<Subgraph> {
    g.check_set(s)?;
    Ok(induced_by_mask(g, &g.mask(s)))
}

/// `G - W = G[V(G) \ W]`.
pub fn delete(g: &Graph, w: &VertexSet) -> Result<Subgraph> {
    g.check_set(w)?;
    let keep: Vec<bool> = g.mask(w).into_iter().map(|x| !x).collect();
    Ok(induced_by_mask(g, &keep))
}

/// The `t`-core: the unique maximal induced subgraph with minimum degree at
/// least `t`, found by repeatedly deleting vertices of degree below `t`.
pub fn min_degree_peel(g: &Graph, t: usize) -> Subgraph {
    let keep = core_mask(g, t, None);
    induced_by_mask(g, &keep)
}

/// Membership mask of the `t`-core of `G - blocked`.
pub(crate) fn core_mask(g: &Graph, t: usize, blocked: Option<&[bool]>) -> Vec<bool> {
    let n = g.vertex_count();
    let mut alive: Vec<bool> = match blocked {
        Some(b) => b.iter().map(|&x| !x).collect(),
        None => vec![true; n],
    };
    let mut deg: Vec<usize> = (0..n)
        .map(|v| if alive[v] { g.neighbors(v).iter().filter(|&&w| alive[w]).count() } else { 0 })
        .collect();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| alive[v] && deg[v] < t).collect();
    for &v in &queue {
        alive[v] = false;
    }
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if alive[w] {
                deg[w] -= 1;
                if deg[w] < t {
                    alive[w] = false;
                    queue.push_back(w);
                }
            }
        }
    }
    alive
}

/// Core number of every vertex of `G - blocked` (0 for blocked vertices).
pub(crate) fn core_numbers(g: &Graph, blocked: &[bool]) -> Vec<usize> {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n)
        .map(|v| if blocked[v] { 0 } else { g.neighbors(v).iter().filter(|&&w| !blocked[w]).count() })
        .collect();
    let mut core = vec![0; n];
    let mut removed = blocked.to_vec();
    let mut current = 0;
    // simple O(n^2) bucket-free peeling; hosts here are small
    for _ in 0..n {
        let next = (0..n).filter(|&v| !removed[v]).min_by_key(|&v| (deg[v], v));
        let Some(v) = next else { break };
        current = current.max(deg[v]);
        core[v] = current;
        removed[v] = true;
        for &w in g.neighbors(v) {
            if !removed[w] {
                deg[w] -= 1;
            }
        }
    }
    core
}

/// A bipartition of the vertex set and the subgraph of crossing edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteHalf {
    pub left: VertexSet,
    pub right: VertexSet,
    pub graph: Graph,
}

/// Local-search max-cut: keeps every edge crossing a bipartition whose cut
/// is locally maximal, so the result has at least half of the edges.
///
/// Two seeds are tried (vertex-id parity and BFS-layer parity) and the
/// larger cut is kept; on bipartite inputs the BFS seed is already optimal.
pub fn bipartite_half(g: &Graph) -> Result<BipartiteHalf> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let parity: Vec<bool> = g.vertices().map(|v| v % 2 == 1).collect();
    let layered: Vec<bool> = bfs_layer_parity(g);
    let a = local_max_cut(g, parity);
    let b = local_max_cut(g, layered);
    let side = if cut_size(g, &b) > cut_size(g, &a) { b } else { a };
    let edges = g.edges().filter(|&(u, v)| side[u] != side[v]);
    let graph = Graph::from_edges(g.vertex_count(), edges).expect("subgraph of a simple graph");
    let left = g.vertices().filter(|&v| !side[v]).collect();
    let right = g.vertices().filter(|&v| side[v]).collect();
    Ok(BipartiteHalf { left, right, graph })
}

fn bfs_layer_parity(g: &Graph) -> Vec<bool> {
    let n = g.vertex_count();
    let mut side = vec![false; n];
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    side[w] = !side[u];
                    queue.push_back(w);
                }
            }
        }
    }
    side
}

fn local_max_cut(g: &Graph, mut side: Vec<bool>) -> Vec<bool> {
    loop {
        let mut changed = false;
        for v in g.vertices() {
            let same = g.neighbors(v).iter().filter(|&&w| side[w] == side[v]).count();
            if 2 * same > g.degree(v) {
                side[v] = !side[v];
                changed = true;
            }
        }
        if !changed {
            return side;
        }
    }
}

fn cut_size(g: &Graph, side: &[bool]) -> usize {
    g.edges().filter(|&(u, v)| side[u] != side[v]).count()
}

/// Shortest-path distances from `sources`, never entering `blocked` vertices.
pub(crate) fn bfs_distances(g: &Graph, sources: &[usize], blocked: &[bool]) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.vertex_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if !blocked[s] && dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &w in g.neighbors(u) {
            if !blocked[w] && dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Edge count of `G[S]` by brute force over pairs; used as an oracle.
#[doc(hidden)]
pub fn edges_within_brute(g: &Graph, s: &VertexSet) -> usize {
    let v = s.to_vec();
    let mut count = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if g.has_edge(v[i], v[j]) {
                count += 1;
            }
        }
    }
    count
}

/// Kuhn's augmenting-path matching. `adj[i]` lists the right vertices left
/// vertex `i` may take; returns the partner of each left vertex.
pub(crate) fn max_bipartite_matching(adj: &[Vec<usize>], right_count: usize) -> Vec<Option<usize>> {
    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &r in &adj[i] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if owner[r].is_none_or(|j| augment(j, adj, seen, owner)) {
                owner[r] = Some(i);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right_count];
    for i in 0..adj.len() {
        let mut seen = vec![false; right_count];
        augment(i, adj, &mut seen, &mut owner);
    }
    let mut partner = vec![None; adj.len()];
    for (r, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            partner[*i] = Some(r);
        }
    }
    partner
}
