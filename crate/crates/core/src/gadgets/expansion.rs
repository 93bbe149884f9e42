use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::certify::ValidationReport;
use crate::error::{invalid, Result};
use crate::graph::{Graph, VertexSet};

/// A `(D, m)`-expansion: `D` vertices all within distance `m` of the anchor
/// inside the subgraph they induce.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expansion {
    pub anchor: usize,
    pub vertices: VertexSet,
    pub radius: usize,
}

impl Expansion {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    /// Distances from the anchor inside `G[vertices]`, in BFS order with
    /// each layer sorted by id.
    pub(crate) fn bfs_order(&self, g: &Graph) -> Vec<(usize, usize)> {
        let mut order = vec![(self.anchor, 0)];
        if !self.vertices.contains(self.anchor) {
            return Vec::new();
        }
        let mut seen = VertexSet::from([self.anchor]);
        let mut layer = vec![self.anchor];
        let mut depth = 0;
        while !layer.is_empty() {
            depth += 1;
            let mut next: Vec<usize> = Vec::new();
            for &u in &layer {
                for &w in g.neighbors(u) {
                    if self.vertices.contains(w) && seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            next.sort_unstable();
            order.extend(next.iter().map(|&w| (w, depth)));
            layer = next;
        }
        order
    }

    /// Shortest path from the anchor to `target` inside `G[vertices]`.
    pub(crate) fn path_from_anchor(&self, g: &Graph, target: usize) -> Option<Vec<usize>> {
        let mut parent = std::collections::BTreeMap::new();
        let mut queue = VecDeque::from([self.anchor]);
        parent.insert(self.anchor, usize::MAX);
        while let Some(u) = queue.pop_front() {
            if u == target {
                let mut path = vec![u];
                let mut cur = u;
                while parent[&cur] != usize::MAX {
                    cur = parent[&cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &w in g.neighbors(u) {
                if self.vertices.contains(w) && !parent.contains_key(&w) {
                    parent.insert(w, u);
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

pub fn validate_expansion(g: &Graph, f: &Expansion) -> ValidationReport {
    let mut r = ValidationReport::new();
    let in_range = f.vertices.iter().all(|v| g.contains(v));
    r.check("vertices-in-range", (!in_range).then(|| "expansion mentions a vertex outside the graph".into()));
    if !in_range {
        return r;
    }
    r.check(
        "anchor-member",
        (!f.vertices.contains(f.anchor)).then(|| format!("anchor {} is not in the expansion", f.anchor)),
    );
    let order = f.bfs_order(g);
    let far = if order.len() < f.vertices.len() {
        Some("some member is unreachable from the anchor".to_string())
    } else {
        order.iter().find(|(_, d)| *d > f.radius).map(|(v, d)| format!("{v} is at distance {d} > {}", f.radius))
    };
    r.check("within-radius", far);
    r
}

/// Truncates the BFS tree from the anchor (layers in id order) to its first
/// `d_target` vertices. The radius is kept, so it never increases.
pub fn trim_expansion(g: &Graph, f: &Expansion, d_target: usize) -> Result<Expansion> {
    if d_target == 0 || d_target > f.size() {
        return Err(invalid(format!("target size {d_target} outside 1..={}", f.size())));
    }
    let vertices = f.bfs_order(g).into_iter().take(d_target).map(|(v, _)| v).collect();
    Ok(Expansion { anchor: f.anchor, vertices, radius: f.radius })
}

/// BFS ball of `size` vertices around `anchor` in `G - blocked`, within
/// distance `radius`; `None` if the ball is too small.
pub fn grow_expansion(g: &Graph, anchor: usize, size: usize, radius: usize, blocked: &VertexSet) -> Option<Expansion> {
    let full = Expansion { anchor, vertices: g.vertices().filter(|&v| !blocked.contains(v)).collect(), radius };
    if blocked.contains(anchor) || size == 0 {
        return None;
    }
    let ball: Vec<usize> = full.bfs_order(g).into_iter().take_while(|&(_, d)| d <= radius).map(|(v, _)| v).collect();
    (ball.len() >= size).then(|| Expansion { anchor, vertices: ball.into_iter().take(size).collect(), radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn trim_examples() {
        let star = generators::star(9);
        let f = Expansion { anchor: 0, vertices: star.vertices().collect(), radius: 1 };
        assert!(validate_expansion(&star, &f).passed);
        assert_eq!(trim_expansion(&star, &f, 10).unwrap(), f);
        assert_eq!(trim_expansion(&star, &f, 1).unwrap().vertices, VertexSet::from([0]));
        let t = trim_expansion(&star, &f, 5).unwrap();
        assert_eq!(t.vertices, VertexSet::from([0, 1, 2, 3, 4]));
        assert_eq!(t.radius, 1);
        assert!(trim_expansion(&star, &f, 0).is_err());
        assert!(trim_expansion(&star, &f, 11).is_err());
    }

    #[test]
    fn validator() {
        let p = generators::path(5);
        let f = Expansion { anchor: 0, vertices: VertexSet::from([0, 1, 2]), radius: 1 };
        assert!(validate_expansion(&p, &f).failed("within-radius"));
        let f = Expansion { anchor: 0, vertices: VertexSet::from([0, 2]), radius: 4 };
        assert!(validate_expansion(&p, &f).failed("within-radius"));
        let f = Expansion { anchor: 4, vertices: VertexSet::from([0, 1]), radius: 4 };
        assert!(validate_expansion(&p, &f).failed("anchor-member"));
    }

    #[test]
    fn grow() {
        let p = generators::path(7);
        let f = grow_expansion(&p, 3, 3, 1, &VertexSet::new()).unwrap();
        assert_eq!(f.vertices, VertexSet::from([2, 3, 4]));
        assert!(grow_expansion(&p, 3, 4, 1, &VertexSet::new()).is_none());
        assert!(grow_expansion(&p, 3, 3, 2, &VertexSet::from([2])).is_some());
    }
}
