#![allow(dead_code)]

use std::collections::VecDeque;

use balsub::Graph;
use proptest::prelude::*;

/// Random simple graph on `1..=max_n` vertices, each pair present independently.
pub fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            Graph::from_edges(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
        })
    })
}

/// Plain BFS distances in `G` with `blocked` vertices removed.
pub fn distances(g: &Graph, sources: &[usize], blocked: &[bool]) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.vertex_count()];
    let mut q = VecDeque::new();
    for &s in sources {
        if !blocked[s] && dist[s].is_none() {
            dist[s] = Some(0);
            q.push_back(s);
        }
    }
    while let Some(v) = q.pop_front() {
        for &w in g.neighbors(v) {
            if !blocked[w] && dist[w].is_none() {
                dist[w] = Some(dist[v].unwrap() + 1);
                q.push_back(w);
            }
        }
    }
    dist
}

/// Length of a shortest cycle, by BFS from every vertex.
pub fn girth(g: &Graph) -> Option<usize> {
    let n = g.vertex_count();
    let mut best: Option<usize> = None;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    q.push_back(w);
                } else if parent[v] != w {
                    let c = dist[v] + dist[w] + 1;
                    best = Some(best.map_or(c, |b| b.min(c)));
                }
            }
        }
    }
    best
}

/// Every simple `a`-`b` path length with interior inside `allowed`.
pub fn all_path_lengths(g: &Graph, allowed: &[bool], a: usize, b: usize) -> Vec<usize> {
    fn go(g: &Graph, allowed: &[bool], v: usize, b: usize, seen: &mut Vec<bool>, len: usize, out: &mut Vec<usize>) {
        for &w in g.neighbors(v) {
            if w == b {
                out.push(len + 1);
            } else if allowed[w] && !seen[w] {
                seen[w] = true;
                go(g, allowed, w, b, seen, len + 1, out);
                seen[w] = false;
            }
        }
    }
    let mut seen = vec![false; g.vertex_count()];
    seen[a] = true;
    let mut out = Vec::new();
    go(g, allowed, a, b, &mut seen, 0, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}
