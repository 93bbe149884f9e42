use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::expansion::{validate_expansion, Expansion};
use super::{BuildFailure, BuildResult};
use crate::certify::ValidationReport;
use crate::connector::{bfs_path, PathWitness};
use crate::error::{invalid, Error, Result};
use crate::graph::{self, bipartite_half, Graph, VertexSet};

pub const DEFAULT_MENU_CAP: usize = 24;

/// Two anchored expansions and a center supporting core-to-core paths of
/// every length `base_length + 2i`, `0 <= i <= steps`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjuster {
    pub core1: usize,
    pub core2: usize,
    pub end1: Expansion,
    pub end2: Expansion,
    pub center: VertexSet,
    pub base_length: usize,
    pub steps: usize,
    /// One `core1`-`core2` path of length `base_length + 2i` per `i`.
    pub witnesses: Vec<PathWitness>,
}

impl Adjuster {
    pub fn vertices(&self) -> VertexSet {
        self.center.union(&self.end1.vertices).union(&self.end2.vertices)
    }

    pub fn radius(&self) -> usize {
        self.end1.radius
    }

    /// Witness path of length `base_length + 2i`.
    pub fn path_with_steps(&self, i: usize) -> Option<&PathWitness> {
        self.witnesses.get(i)
    }

    /// Path between the cores of length exactly `len`, if on the menu of
    /// stored witnesses.
    pub fn path_of_length(&self, len: usize) -> Option<&PathWitness> {
        self.witnesses.iter().find(|w| w.length() == len)
    }

    pub fn max_length(&self) -> usize {
        self.base_length + 2 * self.steps
    }
}

pub fn adjuster_length_menu(g: &Graph, a: &Adjuster) -> Result<BTreeSet<usize>> {
    adjuster_length_menu_with(g, a, DEFAULT_MENU_CAP)
}

/// All `core1`-`core2` path lengths in `G[A ∪ {core1, core2}]`, by
/// exhaustive DFS over simple paths.
pub fn adjuster_length_menu_with(g: &Graph, a: &Adjuster, cap: usize) -> Result<BTreeSet<usize>> {
    if a.center.len() > cap {
        return Err(Error::TooLarge { size: a.center.len(), cap });
    }
    for v in [a.core1, a.core2] {
        g.check_vertex(v)?;
    }
    g.check_set(&a.center)?;
    let mut allowed = g.mask(&a.center);
    allowed[a.core2] = true;
    let mut menu = BTreeSet::new();
    if a.core1 == a.core2 {
        return Ok(menu);
    }
    let mut visited = vec![false; g.vertex_count()];
    visited[a.core1] = true;
    fn dfs(g: &Graph, u: usize, t: usize, len: usize, allowed: &[bool], visited: &mut [bool], menu: &mut BTreeSet<usize>) {
        for &w in g.neighbors(u) {
            if w == t {
                menu.insert(len + 1);
            } else if allowed[w] && !visited[w] {
                visited[w] = true;
                dfs(g, w, t, len + 1, allowed, visited, menu);
                visited[w] = false;
            }
        }
    }
    dfs(g, a.core1, a.core2, 0, &allowed, &mut visited, &mut menu);
    Ok(menu)
}

pub fn validate_adjuster(g: &Graph, a: &Adjuster) -> ValidationReport {
    let mut r = ValidationReport::new();
    let in_range = g.contains(a.core1)
        && g.contains(a.core2)
        && a.vertices().iter().all(|v| g.contains(v))
        && a.witnesses.iter().flat_map(|w| w.vertices.iter()).all(|&v| g.contains(v));
    r.check("vertices-in-range", (!in_range).then(|| "adjuster mentions a vertex outside the graph".into()));
    if !in_range {
        return r;
    }
    r.check("cores-distinct", (a.core1 == a.core2).then(|| "the two cores coincide".into()));

    let f1 = &a.end1.vertices;
    let f2 = &a.end2.vertices;
    let a1 = [(&a.center, f1, "A/F1"), (&a.center, f2, "A/F2"), (f1, f2, "F1/F2")]
        .into_iter()
        .find(|(x, y, _)| !x.is_disjoint(y))
        .map(|(x, y, name)| format!("{name} share {}", x.intersection(y).first().unwrap()));
    r.check("A1", a1);

    let mut a2 = None;
    for (core, end, name) in [(a.core1, &a.end1, "F1"), (a.core2, &a.end2, "F2")] {
        if end.anchor != core {
            a2.get_or_insert(format!("{name} is anchored at {} not {core}", end.anchor));
        }
        let er = validate_expansion(g, end);
        let detail = er.failures().next().map(|c| format!("{name}: {}", c.detail.clone().unwrap_or_default()));
        if let Some(d) = detail {
            a2.get_or_insert(d);
        }
    }
    if a.end1.size() != a.end2.size() || a.end1.radius != a.end2.radius {
        a2.get_or_insert("ends differ in size or radius".into());
    }
    r.check("A2", a2);

    let limit = 10 * a.radius() * a.steps;
    r.check(
        "A3",
        (a.center.len() > limit).then(|| format!("|A| = {} > 10mk = {limit}", a.center.len())),
    );

    let needed: Vec<usize> = (0..=a.steps).map(|i| a.base_length + 2 * i).collect();
    let mut allowed = a.center.clone();
    allowed.insert(a.core1);
    allowed.insert(a.core2);
    let witness_ok = |i: usize, len: usize| {
        a.witnesses.get(i).is_some_and(|w| {
            w.length() == len
                && w.is_valid_in(g)
                && w.vertices.first() == Some(&a.core1)
                && w.vertices.last() == Some(&a.core2)
                && w.vertices.iter().all(|&v| allowed.contains(v))
        })
    };
    let a4 = if needed.iter().enumerate().all(|(i, &len)| witness_ok(i, len)) {
        None
    } else {
        match adjuster_length_menu(g, a) {
            Ok(menu) => needed.iter().find(|l| !menu.contains(l)).map(|l| format!("no core path of length {l}")),
            Err(e) => Some(format!("witnesses invalid and exhaustive check unavailable: {e}")),
        }
    };
    r.check("A4", a4);

    let inside = a.vertices();
    for (core, end, name) in [(a.core1, &a.end1, "F1"), (a.core2, &a.end2, "F2")] {
        let most = end
            .vertices
            .iter()
            .filter(|&x| x != core)
            .map(|x| g.neighbors(x).iter().filter(|&&w| inside.contains(w) && !end.vertices.contains(w)).count())
            .max()
            .unwrap_or(0);
        r.note(&format!("{name}-outside-neighbours"), format!("max neighbours of an end vertex elsewhere in the adjuster: {most}"));
    }
    r
}

/// Shortest cycle of `h` (as a vertex list in cycle order) found from each
/// root whose BFS closes a cycle of the minimum length.
fn shortest_cycles(h: &Graph) -> Vec<Vec<usize>> {
    let n = h.vertex_count();
    let mut best = usize::MAX;
    let mut found = Vec::new();
    for root in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        let mut closed = None;
        'bfs: while let Some(u) = queue.pop_front() {
            if 2 * dist[u] + 1 > best {
                break;
            }
            for &w in h.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if w != parent[u] && dist[w] >= dist[u] {
                    closed = Some((u, w));
                    break 'bfs;
                }
            }
        }
        let Some((u, w)) = closed else { continue };
        let len = dist[u] + dist[w] + 1;
        let trace = |mut x: usize| {
            let mut p = vec![x];
            while parent[x] != usize::MAX {
                x = parent[x];
                p.push(x);
            }
            p
        };
        let pu = trace(u);
        let pw = trace(w);
        // both branches must meet only at the root
        let su: BTreeSet<usize> = pu.iter().copied().collect();
        if pw.iter().filter(|x| su.contains(x)).count() != 1 {
            continue;
        }
        let mut cycle: Vec<usize> = pu.into_iter().rev().collect();
        cycle.extend(&pw[..pw.len() - 1]);
        debug_assert_eq!(cycle.len(), len);
        if len < best {
            best = len;
            found.clear();
        }
        if len == best {
            found.push(cycle);
        }
    }
    found
}

/// Grows disjoint BFS balls of `d` vertices around `v1` and `v2`, one
/// vertex at a time in alternation, within distance `radius`.
fn grow_two_ends(g: &Graph, v1: usize, v2: usize, d: usize, radius: usize, blocked: &[bool]) -> Option<(VertexSet, VertexSet)> {
    let n = g.vertex_count();
    let mut claimed = vec![false; n];
    claimed[v1] = true;
    claimed[v2] = true;
    let mut ends = [VertexSet::from([v1]), VertexSet::from([v2])];
    let mut queues = [std::collections::VecDeque::new(), std::collections::VecDeque::new()];
    for (i, &v) in [v1, v2].iter().enumerate() {
        let mut nb: Vec<usize> = g.neighbors(v).to_vec();
        nb.sort_unstable();
        if radius >= 1 {
            queues[i].extend(nb.into_iter().map(|w| (w, 1usize)));
        }
    }
    loop {
        let mut progressed = false;
        for i in 0..2 {
            if ends[i].len() >= d {
                continue;
            }
            while let Some((v, depth)) = queues[i].pop_front() {
                if claimed[v] || blocked[v] {
                    continue;
                }
                claimed[v] = true;
                ends[i].insert(v);
                if depth < radius {
                    queues[i].extend(g.neighbors(v).iter().map(|&w| (w, depth + 1)));
                }
                progressed = true;
                break;
            }
        }
        if ends.iter().all(|e| e.len() >= d) {
            let [a, b] = ends;
            return Some((a, b));
        }
        if !progressed {
            return None;
        }
    }
}

/// A `(D, m, 1)`-adjuster around a shortest even cycle of `G - avoid`
/// (taken in a bipartite half when `G - avoid` is not bipartite).
pub fn build_simple_adjuster(g: &Graph, avoid: &VertexSet, d: usize, m: usize, c4_mode: bool) -> BuildResult<Adjuster> {
    g.check_set(avoid)?;
    if d == 0 {
        return Err(invalid("expansion size must be at least 1").into());
    }
    let sub = graph::delete(g, avoid)?;
    let host = if sub.graph.is_empty() || sub.graph.is_bipartite() {
        sub.graph.clone()
    } else {
        bipartite_half(&sub.graph)?.graph
    };
    let cycles = shortest_cycles(&host);
    if cycles.is_empty() {
        return Err(BuildFailure::Acyclic);
    }
    let radius = if c4_mode { m.min(2) } else { m };
    let mut blocked = g.mask(avoid);
    let mut last = BuildFailure::ExpansionCollision;
    for local in cycles {
        let cycle = sub.lift_path(&local);
        let len = cycle.len();
        let r = len / 2;
        let v1 = cycle[0];
        let v2 = cycle[r - 1];
        let center: VertexSet = cycle.iter().copied().filter(|&x| x != v1 && x != v2).collect();
        if center.len() > 10 * m {
            last = BuildFailure::CenterTooLarge { size: center.len(), limit: 10 * m };
            continue;
        }
        for x in center.iter() {
            blocked[x] = true;
        }
        let grown = grow_two_ends(g, v1, v2, d, radius, &blocked);
        for x in center.iter() {
            blocked[x] = avoid.contains(x);
        }
        let Some((f1, f2)) = grown else { continue };
        let short = PathWitness::new(cycle[..r].to_vec());
        let mut long: Vec<usize> = cycle[r - 1..].to_vec();
        long.push(v1);
        long.reverse();
        let adj = Adjuster {
            core1: v1,
            core2: v2,
            end1: Expansion { anchor: v1, vertices: f1, radius: m },
            end2: Expansion { anchor: v2, vertices: f2, radius: m },
            center,
            base_length: r - 1,
            steps: 1,
            witnesses: vec![short, PathWitness::new(long)],
        };
        let report = validate_adjuster(g, &adj);
        assert!(report.passed, "simple adjuster fails validation: {:?}", report.failures().collect::<Vec<_>>());
        return Ok(adj);
    }
    Err(last)
}

fn oriented(w: &PathWitness, from: usize) -> Vec<usize> {
    if w.start() == from {
        w.vertices.clone()
    } else {
        w.reversed().vertices
    }
}

/// Joins an end of `a1` to an end of `a2` by a shortest path avoiding both
/// centers, both remaining ends and `avoid`, and routes it to the two cores
/// inside those ends. The unused cores become the new cores.
pub fn link_adjusters(g: &Graph, a1: &Adjuster, a2: &Adjuster, avoid: &VertexSet) -> BuildResult<Adjuster> {
    g.check_set(avoid)?;
    if a1.steps == 0 || a2.steps == 0 {
        return Err(invalid("linked adjusters need at least one step each").into());
    }
    if a1.end1.size() != a2.end1.size() || a1.radius() != a2.radius() {
        return Err(invalid("linked adjusters need ends of equal size and radius").into());
    }
    let (v1, v2) = (a1.vertices(), a2.vertices());
    if !v1.is_disjoint(&v2) || !v1.is_disjoint(avoid) || !v2.is_disjoint(avoid) {
        return Err(invalid("adjusters must be disjoint from each other and from the avoid set").into());
    }
    fn side(a: &Adjuster, second: bool) -> (usize, &Expansion, usize, &Expansion) {
        if second {
            (a.core2, &a.end2, a.core1, &a.end1)
        } else {
            (a.core1, &a.end1, a.core2, &a.end2)
        }
    }
    for (x, y) in [(true, false), (true, true), (false, false), (false, true)] {
        let (_, ex, ox, fx) = side(a1, x);
        let (cy, ey, oy, fy) = side(a2, y);
        let mut blocked = g.mask(avoid);
        for s in [&a1.center, &a2.center, &fx.vertices, &fy.vertices] {
            for v in s.iter() {
                blocked[v] = true;
            }
        }
        let target = g.mask(&ey.vertices);
        let Some(bridge) = bfs_path(g, &ex.vertices.to_vec(), &target, &blocked, usize::MAX) else { continue };
        let s = bridge[0];
        let t = *bridge.last().unwrap();
        let head = ex.path_from_anchor(g, s).expect("expansion is connected");
        let tail = ey.path_from_anchor(g, t).expect("expansion is connected");
        let mut q = head;
        q.extend(bridge.iter().skip(1));
        q.extend(tail.iter().rev().skip(1));
        let q_set: VertexSet = q.iter().copied().collect();
        let center = a1.center.union(&a2.center).union(&q_set);
        let steps = a1.steps + a2.steps;
        let limit = 10 * a1.radius() * steps;
        if center.len() > limit {
            return Err(BuildFailure::CenterTooLarge { size: center.len(), limit });
        }
        let witnesses = (0..=steps)
            .map(|i| {
                let i1 = i.min(a1.steps);
                let mut p = oriented(&a1.witnesses[i1], ox);
                p.extend(q.iter().skip(1));
                p.extend(oriented(&a2.witnesses[i - i1], cy).into_iter().skip(1));
                PathWitness::new(p)
            })
            .collect();
        let adj = Adjuster {
            core1: ox,
            core2: oy,
            end1: fx.clone(),
            end2: fy.clone(),
            center,
            base_length: a1.base_length + a2.base_length + (q.len() - 1),
            steps,
            witnesses,
        };
        let report = validate_adjuster(g, &adj);
        assert!(report.passed, "linked adjuster fails validation: {:?}", report.failures().collect::<Vec<_>>());
        return Ok(adj);
    }
    Err(BuildFailure::Disconnected)
}
