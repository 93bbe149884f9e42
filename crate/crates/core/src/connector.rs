//! Short paths between vertex sets that avoid a forbidden set.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::expander::ExpansionProfile;
use crate::graph::{Graph, VertexSet};

/// A simple path given by its vertex sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathWitness {
    pub vertices: Vec<usize>,
}

impl PathWitness {
    pub fn new(vertices: Vec<usize>) -> Self {
        PathWitness { vertices }
    }

    /// Number of edges.
    pub fn length(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    pub fn interior(&self) -> &[usize] {
        let n = self.vertices.len();
        if n <= 2 {
            &[]
        } else {
            &self.vertices[1..n - 1]
        }
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices.iter().copied().collect()
    }

    /// Non-empty, consecutive vertices adjacent, no repeats.
    pub fn is_valid_in(&self, g: &Graph) -> bool {
        !self.vertices.is_empty()
            && self.vertices.iter().all(|&v| g.contains(v))
            && self.vertices.windows(2).all(|w| g.has_edge(w[0], w[1]))
            && self.vertex_set().len() == self.vertices.len()
    }

    pub fn reversed(&self) -> PathWitness {
        PathWitness { vertices: self.vertices.iter().rev().copied().collect() }
    }
}

/// `ceil((2/epsilon1) ln^3(15n/k))`, never below 1.
pub fn diameter_bound(p: &ExpansionProfile, n: usize) -> u64 {
    let l = (15.0 * n as f64 / p.k).ln();
    let raw = (2.0 / p.epsilon1 * l * l * l).ceil();
    if raw.is_finite() && raw >= 1.0 {
        raw as u64
    } else {
        1
    }
}

/// `floor(x eps(x) / 4)`: how many vertices may be deleted without hurting
/// the diameter guarantee for sets of size `x`.
pub fn robust_budget(x: usize, p: &ExpansionProfile) -> u64 {
    (x as f64 * p.eps(x as f64) / 4.0).floor() as u64
}

/// Shortest `A`-`B` path in `G - avoid` of length at most `cap`.
///
/// BFS runs layer by layer with each layer scanned in increasing id order,
/// so every vertex's parent is the smallest-id vertex of the previous layer
/// and the endpoint is the smallest-id vertex of `B` at minimum distance.
pub fn short_connect(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    avoid: &VertexSet,
    cap: usize,
) -> Result<Option<PathWitness>> {
    for s in [a, b, avoid] {
        g.check_set(s)?;
    }
    if !a.is_disjoint(avoid) || !b.is_disjoint(avoid) {
        return Err(invalid("endpoint sets must avoid the forbidden set"));
    }
    if !a.is_disjoint(b) {
        return Err(invalid("endpoint sets must be disjoint"));
    }
    let blocked = g.mask(avoid);
    let target = g.mask(b);
    Ok(bfs_path(g, &a.to_vec(), &target, &blocked, cap).map(PathWitness::new))
}

/// Layered BFS from `sources` to the first `target` vertex, never entering
/// `blocked` and never expanding through targets. Sources that are blocked
/// are ignored; a source that is itself a target yields a one-vertex path.
pub(crate) fn bfs_path(
    g: &Graph,
    sources: &[usize],
    target: &[bool],
    blocked: &[bool],
    cap: usize,
) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut layer: Vec<usize> = sources.iter().copied().filter(|&s| !blocked[s]).collect();
    layer.sort_unstable();
    layer.dedup();
    for &s in &layer {
        seen[s] = true;
    }
    if let Some(&s) = layer.iter().find(|&&s| target[s]) {
        return Some(vec![s]);
    }
    let mut depth = 0;
    while !layer.is_empty() && depth < cap {
        depth += 1;
        let mut next = Vec::new();
        for &u in &layer {
            for &w in g.neighbors(u) {
                if !seen[w] && !blocked[w] {
                    seen[w] = true;
                    parent[w] = u;
                    next.push(w);
                }
            }
        }
        next.sort_unstable();
        if let Some(&t) = next.iter().find(|&&w| target[w]) {
            let mut path = vec![t];
            let mut cur = t;
            while parent[cur] != usize::MAX {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        next.retain(|&w| !target[w]);
        layer = next;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn diameter_examples() {
        let p = ExpansionProfile::new(2.0, 3.0).unwrap();
        assert_eq!(diameter_bound(&p, 3), 20);
        let p = ExpansionProfile::new(1e12, 3.0).unwrap();
        assert_eq!(diameter_bound(&p, 30), 1);
        let p = ExpansionProfile::new(1.0, 4.0).unwrap();
        // 2 ln^3 225 = 317.75..
        assert_eq!(diameter_bound(&p, 60), 318);
    }

    #[test]
    fn budget_examples() {
        let p = ExpansionProfile::new(1.0, 15.0).unwrap();
        assert_eq!(robust_budget(2, &p), 0);
        assert_eq!(robust_budget(15, &p), 0);
        assert_eq!(robust_budget(1_000_000, &p), 1309);
    }

    #[test]
    fn connect_examples() {
        let p5 = generators::path(5);
        let r = short_connect(&p5, &VertexSet::from([0]), &VertexSet::from([4]), &VertexSet::from([2]), 10).unwrap();
        assert_eq!(r, None);

        let k5 = generators::complete(5);
        let r = short_connect(&k5, &VertexSet::from([0]), &VertexSet::from([4]), &VertexSet::from([1, 2, 3]), 1)
            .unwrap()
            .unwrap();
        assert_eq!(r.vertices, vec![0, 4]);

        assert!(short_connect(&k5, &VertexSet::from([0]), &VertexSet::from([4]), &VertexSet::from([0]), 1).is_err());
        let r = short_connect(&p5, &VertexSet::from([0]), &VertexSet::from([4]), &VertexSet::new(), 3).unwrap();
        assert_eq!(r, None);
    }

    #[test]
    fn smallest_id_tie_break() {
        let c6 = generators::cycle(6).unwrap();
        let r = short_connect(&c6, &VertexSet::from([0]), &VertexSet::from([3]), &VertexSet::new(), 9)
            .unwrap()
            .unwrap();
        assert_eq!(r.vertices, vec![0, 1, 2, 3]);
    }
}
