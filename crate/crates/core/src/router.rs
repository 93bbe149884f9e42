//! Windowed- and exact-length routing.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connector::{bfs_path, PathWitness};
use crate::error::{invalid, Error, Result};
use crate::gadgets::{build_unit, Expansion, UnitParams};
use crate::graph::{bfs_distances, Graph, VertexSet};

pub const DEFAULT_EXACT_CAP: usize = 26;

/// Inclusive range `[lo, hi]` of admissible path lengths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthWindow {
    pub lo: usize,
    pub hi: usize,
}

impl LengthWindow {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Err(invalid(format!("empty window [{lo}, {hi}]")));
        }
        Ok(LengthWindow { lo, hi })
    }

    pub fn contains(&self, len: usize) -> bool {
        (self.lo..=self.hi).contains(&len)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RouteFailure {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("routing stalled at length {}: {reason}", .longest.length())]
    Stalled { reason: String, longest: PathWitness },
}

/// A routed path and how it was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Routed {
    pub path: PathWitness,
    /// Number of unit-based extension steps taken.
    pub unit_steps: usize,
    /// Number of single-vertex padding steps (the non-unit fallback).
    pub padding_steps: usize,
}

/// Extends a path from `v` until its length plus the distance to `U` reaches
/// the window, then closes it with a shortest route into `U`.
///
/// Each round first tries a unit-based step: a fresh unit beyond the
/// current end, reached through the current expansion, whose core becomes
/// the new end. The step is kept only if it cannot overshoot `hi`.
/// Otherwise the path is padded by one vertex, choosing the neighbour
/// farthest from `U` among those that keep the window reachable.
pub fn connect_with_length(
    g: &Graph,
    v: usize,
    f: &Expansion,
    u: &VertexSet,
    avoid: &VertexSet,
    window: LengthWindow,
    unit_params: Option<UnitParams>,
) -> std::result::Result<Routed, RouteFailure> {
    g.check_vertex(v)?;
    for s in [u, avoid, &f.vertices] {
        g.check_set(s)?;
    }
    if f.anchor != v || !f.vertices.contains(v) {
        return Err(invalid("expansion must be anchored at the start vertex").into());
    }
    if !u.is_disjoint(&f.vertices) || !u.is_disjoint(avoid) || !avoid.is_disjoint(&f.vertices) || u.contains(v) {
        return Err(invalid("target set, expansion and avoid set must be disjoint").into());
    }
    let n = g.vertex_count();
    let in_u = g.mask(u);
    let mut blocked = g.mask(avoid);
    let mut path = vec![v];
    let mut expansion = f.clone();
    let mut unit_steps = 0;
    let mut padding_steps = 0;
    let sources = u.to_vec();
    loop {
        let end = *path.last().unwrap();
        let len = path.len() - 1;
        // distances to U in G - avoid - (P - end)
        let dist = bfs_distances(g, &sources, &blocked);
        let Some(d_end) = dist[end] else {
            return Err(stalled("target set unreachable", &path));
        };
        if len + d_end >= window.lo {
            if len + d_end > window.hi {
                return Err(stalled("shortest completion overshoots the window", &path));
            }
            let tail = bfs_path(g, &[end], &in_u, &blocked, d_end).expect("distance is realised");
            path.extend(tail.into_iter().skip(1));
            let out = PathWitness::new(path);
            debug_assert!(out.is_valid_in(g) && window.contains(out.length()));
            return Ok(Routed { path: out, unit_steps, padding_steps });
        }
        let before = len;
        let mut stepped = false;
        if let Some(p) = unit_params {
            if let Some((ext, next_f)) = unit_step(g, &path, &expansion, &blocked, &in_u, p) {
                let new_len = len + ext.len();
                let new_end = *ext.last().unwrap();
                let mut trial = blocked.clone();
                trial[end] = true;
                for &x in &ext[..ext.len() - 1] {
                    trial[x] = true;
                }
                let reach = bfs_distances(g, &sources, &trial)[new_end];
                if reach.is_some_and(|d| new_len + d <= window.hi) {
                    blocked = trial;
                    path.extend(ext);
                    expansion = next_f;
                    unit_steps += 1;
                    stepped = true;
                }
            }
        }
        if !stepped {
            let next = g
                .neighbors(end)
                .iter()
                .copied()
                .filter(|&w| !blocked[w] && !in_u[w] && !path.contains(&w))
                .filter_map(|w| {
                    let mut trial = blocked.clone();
                    trial[end] = true;
                    let d = bfs_distances(g, &sources, &trial)[w]?;
                    (len + 1 + d <= window.hi).then_some((d, w))
                })
                .max_by_key(|&(d, w)| (d, std::cmp::Reverse(w)));
            let Some((_, w)) = next else {
                return Err(stalled("no extension keeps the window reachable", &path));
            };
            blocked[end] = true;
            path.push(w);
            expansion = Expansion { anchor: w, vertices: VertexSet::from([w]), radius: 0 };
            padding_steps += 1;
        }
        assert!(path.len() - 1 > before, "routing loop made no progress");
        debug_assert!(n >= path.len());
    }
}

fn stalled(reason: &str, path: &[usize]) -> RouteFailure {
    RouteFailure::Stalled { reason: reason.to_string(), longest: PathWitness::new(path.to_vec()) }
}

/// One unit-based extension: builds a unit away from the path, connects the
/// current expansion to it and walks inside the unit to its core. Returns
/// the added vertices (excluding the current end) and the new expansion.
fn unit_step(
    g: &Graph,
    path: &[usize],
    f: &Expansion,
    blocked: &[bool],
    in_u: &[bool],
    p: UnitParams,
) -> Option<(Vec<usize>, Expansion)> {
    let end = *path.last().unwrap();
    let mut avoid: VertexSet = (0..g.vertex_count()).filter(|&x| blocked[x] || in_u[x]).collect();
    avoid.extend(path.iter().copied());
    avoid.extend(f.vertices.iter());
    let unit = build_unit(g, &avoid, p).ok()?;
    let unit_vertices = unit.vertices();
    let mut bridge_block: Vec<bool> = (0..g.vertex_count()).map(|x| blocked[x] || in_u[x]).collect();
    for &x in path {
        bridge_block[x] = x != end;
    }
    let target = g.mask(&unit_vertices);
    let sources: Vec<usize> = f.vertices.iter().filter(|&x| !bridge_block[x]).collect();
    let bridge = bfs_path(g, &sources, &target, &bridge_block, usize::MAX)?;
    let head = f.path_from_anchor(g, bridge[0])?;
    let entry = *bridge.last().unwrap();
    let inside = Expansion { anchor: unit.core, vertices: unit_vertices.clone(), radius: usize::MAX };
    let walk = inside.path_from_anchor(g, entry)?;
    let mut ext: Vec<usize> = head.into_iter().skip(1).collect();
    ext.extend(bridge.iter().skip(1));
    ext.extend(walk.iter().rev().skip(1));
    let seen: VertexSet = ext.iter().copied().collect();
    if seen.len() != ext.len() || ext.contains(&end) || ext.is_empty() {
        return None;
    }
    let rest: VertexSet = unit_vertices.difference(&seen).union(&VertexSet::from([unit.core]));
    let next = Expansion { anchor: unit.core, vertices: rest, radius: 3 * p.h3 };
    let next = Expansion {
        vertices: next.bfs_order(g).into_iter().map(|(x, _)| x).collect(),
        ..next
    };
    Some((ext, next))
}

/// Two disjoint paths, one starting in `U1` and one in `U2`, ending at the
/// anchors of `F3` and `F4` (in either pairing), with total length in the
/// window. The first is a shortest connection from `U1 ∪ U2` into the
/// expansions; the second is routed with the residual window.
pub fn connect_pair_with_length(
    g: &Graph,
    u1: &VertexSet,
    u2: &VertexSet,
    f3: &Expansion,
    f4: &Expansion,
    avoid: &VertexSet,
    window: LengthWindow,
) -> std::result::Result<(PathWitness, PathWitness), RouteFailure> {
    for s in [u1, u2, &f3.vertices, &f4.vertices, avoid] {
        g.check_set(s)?;
    }
    let sets = [u1, u2, &f3.vertices, &f4.vertices, avoid];
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if !sets[i].is_disjoint(sets[j]) {
                return Err(invalid("endpoint sets, expansions and avoid set must be pairwise disjoint").into());
            }
        }
    }
    let blocked = g.mask(avoid);
    let starts: Vec<usize> = u1.union(u2).to_vec();
    let target = g.mask(&f3.vertices.union(&f4.vertices));
    let Some(bridge) = bfs_path(g, &starts, &target, &blocked, usize::MAX) else {
        return Err(stalled("endpoint sets cannot reach the expansions", &[]));
    };
    let from_first = u1.contains(bridge[0]);
    let hit = *bridge.last().unwrap();
    let (near, far) = if f3.vertices.contains(hit) { (f3, f4) } else { (f4, f3) };
    let mut first = bridge.clone();
    let inner = near.path_from_anchor(g, hit).expect("expansion is connected");
    first.extend(inner.iter().rev().skip(1));
    let first = PathWitness::new(first);
    let l1 = first.length();
    if l1 > window.hi {
        return Err(stalled("first connection already exceeds the window", &first.vertices));
    }
    let (own, other) = if from_first { (u1, u2) } else { (u2, u1) };
    let mut avoid2 = avoid.union(&first.vertex_set()).union(&near.vertices).union(own);
    avoid2 = avoid2.difference(&far.vertices);
    let residual = LengthWindow { lo: window.lo.saturating_sub(l1).max(1), hi: window.hi - l1 };
    if residual.lo > residual.hi {
        return Err(stalled("no residual window left", &first.vertices));
    }
    let second = connect_with_length(g, far.anchor, far, other, &avoid2, residual, None)?;
    let second = second.path.reversed();
    Ok(if from_first { (first, second) } else { (second, first) })
}

/// Simple `v1`-`v2` path of exactly `target` edges inside `G[A ∪ {v1, v2}]`,
/// by DFS with a memo of failed `(vertex, remaining, visited)` states.
pub fn realize_exact_length(g: &Graph, a: &VertexSet, v1: usize, v2: usize, target: usize) -> Result<Option<PathWitness>> {
    realize_exact_length_with(g, a, v1, v2, target, DEFAULT_EXACT_CAP)
}

pub fn realize_exact_length_with(
    g: &Graph,
    a: &VertexSet,
    v1: usize,
    v2: usize,
    target: usize,
    cap: usize,
) -> Result<Option<PathWitness>> {
    g.check_vertex(v1)?;
    g.check_vertex(v2)?;
    g.check_set(a)?;
    if a.contains(v1) || a.contains(v2) {
        return Err(invalid("path endpoints must lie outside the center"));
    }
    let mut verts = a.to_vec();
    verts.push(v1);
    verts.push(v2);
    verts.sort_unstable();
    verts.dedup();
    let size = verts.len();
    if size > cap.min(63) {
        return Err(Error::TooLarge { size, cap: cap.min(63) });
    }
    if v1 == v2 || target == 0 || target > size - 1 {
        return Ok(None);
    }
    let index: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = verts
        .iter()
        .map(|&v| g.neighbors(v).iter().filter_map(|w| index.get(w).copied()).collect())
        .collect();
    let (s, t) = (index[&v1], index[&v2]);
    // lower bounds: distance to t inside the whole local graph
    let local = Graph::from_edges(size, adj.iter().enumerate().flat_map(|(i, l)| l.iter().filter(move |&&j| j > i).map(move |&j| (i, j))))
        .expect("induced graph");
    let to_t = bfs_distances(&local, &[t], &vec![false; size]);

    struct Dfs<'a> {
        adj: &'a [Vec<usize>],
        t: usize,
        to_t: &'a [Option<usize>],
        failed: HashSet<(usize, usize, u64)>,
    }
    impl Dfs<'_> {
        fn go(&mut self, u: usize, remaining: usize, visited: u64, path: &mut Vec<usize>) -> bool {
            if remaining == 0 {
                return u == self.t;
            }
            if u == self.t || self.to_t[u].is_none_or(|d| d > remaining) {
                return false;
            }
            let left = self.adj.len() - visited.count_ones() as usize;
            if remaining > left {
                return false;
            }
            if self.failed.contains(&(u, remaining, visited)) {
                return false;
            }
            for &w in &self.adj[u] {
                if visited >> w & 1 == 1 || (w == self.t && remaining != 1) {
                    continue;
                }
                path.push(w);
                if self.go(w, remaining - 1, visited | 1 << w, path) {
                    return true;
                }
                path.pop();
            }
            self.failed.insert((u, remaining, visited));
            false
        }
    }
    let mut dfs = Dfs { adj: &adj, t, to_t: &to_t, failed: HashSet::new() };
    let mut path = vec![s];
    if dfs.go(s, target, 1 << s, &mut path) {
        Ok(Some(PathWitness::new(path.into_iter().map(|i| verts[i]).collect())))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn point(v: usize) -> Expansion {
        Expansion { anchor: v, vertices: VertexSet::from([v]), radius: 0 }
    }

    #[test]
    fn windowed_examples() {
        let k20 = generators::complete(20);
        let w = LengthWindow::new(5, 9).unwrap();
        let r = connect_with_length(&k20, 0, &point(0), &VertexSet::from([19]), &VertexSet::new(), w, None).unwrap();
        assert!(w.contains(r.path.length()) && r.path.is_valid_in(&k20));
        assert_eq!(r.path.end(), 19);

        let r = connect_with_length(&k20, 0, &point(0), &VertexSet::from([19]), &VertexSet::new(), LengthWindow::new(1, 1).unwrap(), None)
            .unwrap();
        assert_eq!(r.path.vertices, vec![0, 19]);

        let p6 = generators::path(6);
        let r = connect_with_length(&p6, 0, &point(0), &VertexSet::from([5]), &VertexSet::new(), LengthWindow::new(7, 9).unwrap(), None);
        assert!(matches!(r, Err(RouteFailure::Stalled { .. })));
        assert!(LengthWindow::new(3, 2).is_err());
    }

    #[test]
    fn unit_steps_are_used_when_they_fit() {
        let g = generators::complete_bipartite(40, 40);
        let p = UnitParams { h0: 1, h1: 1, h2: 1, h3: 2 };
        let w = LengthWindow::new(12, 30).unwrap();
        let r = connect_with_length(&g, 0, &point(0), &VertexSet::from([79]), &VertexSet::new(), w, Some(p)).unwrap();
        assert!(w.contains(r.path.length()) && r.path.is_valid_in(&g));
        assert!(r.unit_steps > 0);
    }

    #[test]
    fn pair_examples() {
        let k30 = generators::complete(30);
        let set = |b: usize| (b..b + 5).collect::<VertexSet>();
        let f = |b: usize| Expansion { anchor: b, vertices: set(b), radius: 1 };
        let w = LengthWindow::new(6, 12).unwrap();
        let (p, q) = connect_pair_with_length(&k30, &set(0), &set(5), &f(10), &f(15), &VertexSet::new(), w).unwrap();
        assert!(p.vertex_set().is_disjoint(&q.vertex_set()));
        assert!(w.contains(p.length() + q.length()));
        assert!(set(0).contains(p.start()) && set(5).contains(q.start()));

        let g = Graph::from_edges(6, [(0, 2), (1, 3)]).unwrap();
        let (p, q) = connect_pair_with_length(
            &g,
            &VertexSet::from([0]),
            &VertexSet::from([1]),
            &point(2),
            &point(3),
            &VertexSet::new(),
            LengthWindow::new(2, 2).unwrap(),
        )
        .unwrap();
        assert_eq!((p.vertices.clone(), q.vertices.clone()), (vec![0, 2], vec![1, 3]));

        let apart = generators::disjoint_union(&[generators::complete(3), generators::complete(10)]);
        let r = connect_pair_with_length(
            &apart,
            &VertexSet::from([0]),
            &VertexSet::from([3]),
            &point(4),
            &point(5),
            &VertexSet::new(),
            LengthWindow::new(2, 6).unwrap(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn exact_examples() {
        let c6 = generators::cycle(6).unwrap();
        let center = VertexSet::from([1, 3, 4, 5]);
        let p = realize_exact_length(&c6, &center, 0, 2, 4).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 5, 4, 3, 2]);
        assert!(realize_exact_length(&c6, &center, 0, 2, 3).unwrap().is_none());
        let k4 = generators::complete(4);
        let p = realize_exact_length(&k4, &VertexSet::new(), 0, 1, 1).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 1]);
        assert!(realize_exact_length(&c6, &VertexSet::from([0]), 0, 2, 2).is_err());
        let big = generators::complete(40);
        let a: VertexSet = (2..40).collect();
        assert!(matches!(realize_exact_length(&big, &a, 0, 1, 3), Err(Error::TooLarge { .. })));
    }
}
