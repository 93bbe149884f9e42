use serde::{Deserialize, Serialize};

use super::hub::{find_hub, validate_hub, Hub};
use super::{BuildFailure, BuildResult};
use crate::certify::ValidationReport;
use crate::connector::{bfs_path, PathWitness};
use crate::error::invalid;
use crate::graph::{Graph, VertexSet};

/// Shape `(h0, h1, h2, h3)`: `h0` hubs of shape `(h1, h2)` on spokes of
/// length at most `h3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitParams {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub h3: usize,
}

/// Core vertex, its hubs, and one spoke from the core to each hub center.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unit {
    pub core: usize,
    pub params: UnitParams,
    pub hubs: Vec<Hub>,
    pub spokes: Vec<PathWitness>,
}

impl Unit {
    pub fn vertices(&self) -> VertexSet {
        let mut all = VertexSet::from([self.core]);
        for h in &self.hubs {
            all = all.union(&h.vertices());
        }
        for s in &self.spokes {
            all.extend(s.vertices.iter().copied());
        }
        all
    }

    /// Union of the hubs' second layers.
    pub fn exterior(&self) -> VertexSet {
        self.hubs.iter().fold(VertexSet::new(), |acc, h| acc.union(&h.exterior()))
    }

    pub fn interior(&self) -> VertexSet {
        self.vertices().difference(&self.exterior())
    }

    /// Every spoke vertex, endpoints included.
    pub fn spoke_vertices(&self) -> VertexSet {
        self.spokes.iter().flat_map(|s| s.vertices.iter().copied()).collect()
    }
}

/// Search knobs for [`build_unit_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitOptions {
    /// Candidate hubs are built `slack` times larger and carved down.
    pub slack: usize,
    /// Use `(2 h0, 2 h2)`-hub centers as cores instead of bare vertices.
    pub core_hubs: bool,
    /// Stop placing candidate hubs after this many.
    pub max_hubs: usize,
}

impl UnitOptions {
    pub fn desk(p: &UnitParams) -> Self {
        UnitOptions { slack: 1, core_hubs: false, max_hubs: 3 * p.h0 }
    }

    pub fn paper(p: &UnitParams) -> Self {
        UnitOptions { slack: 2, core_hubs: true, max_hubs: 3 * p.h0 }
    }
}

pub fn build_unit(g: &Graph, avoid: &VertexSet, p: UnitParams) -> BuildResult<Unit> {
    build_unit_with(g, avoid, p, UnitOptions::desk(&p))
}

/// Places disjoint candidate hubs, then grows internally disjoint spokes of
/// length at most `h3` from a core to hub centers until one core reaches
/// `h0` hubs. Spoke interiors avoid every hub and every other core, which is
/// stricter than allowing two vertices per endpoint ball, so the carved
/// `(h1, h2)` sub-hubs are automatically clear of the spokes.
pub fn build_unit_with(g: &Graph, avoid: &VertexSet, p: UnitParams, opts: UnitOptions) -> BuildResult<Unit> {
    g.check_set(avoid)?;
    if p.h0 == 0 || p.h1 == 0 || p.h2 == 0 || p.h3 == 0 || opts.slack == 0 {
        return Err(invalid("unit parameters must be at least 1").into());
    }
    let mut blocked = g.mask(avoid);
    // u-hubs first (enough for one unit), then the core hubs, then spare u-hubs
    let mut pool: Vec<Hub> = Vec::new();
    let mut core_pool: Vec<Hub> = Vec::new();
    let u_limit = opts.max_hubs.max(p.h0);
    let core_limit = if opts.core_hubs { (opts.max_hubs / p.h0).max(1) } else { 0 };
    place_hubs(g, &mut blocked, &mut pool, p.h0, opts.slack * p.h1, opts.slack * p.h2);
    if pool.len() < p.h0 {
        return Err(BuildFailure::HubPoolExhausted { found: pool.len(), needed: p.h0 });
    }
    place_hubs(g, &mut blocked, &mut core_pool, core_limit, 2 * p.h0, 2 * p.h2);
    if opts.core_hubs && core_pool.is_empty() {
        return Err(BuildFailure::HubPoolExhausted { found: 0, needed: 1 });
    }
    place_hubs(g, &mut blocked, &mut pool, u_limit, opts.slack * p.h1, opts.slack * p.h2);

    // every hub vertex stays blocked; centers are re-opened as targets
    let cores: Vec<usize> = if opts.core_hubs {
        core_pool.iter().map(|h| h.center).collect()
    } else {
        let mut c: Vec<usize> = g.vertices().filter(|&v| !blocked[v]).collect();
        c.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
        c
    };
    let mut best: Vec<PathWitness> = Vec::new();
    for &w in &cores {
        let mut used = blocked.clone();
        for &other in &cores {
            used[other] = other != w;
        }
        if let Some(h) = core_pool.iter().find(|h| h.center == w) {
            // a spoke may leave through one first-layer vertex of its own core hub
            for &z in &h.first_layer {
                used[z] = false;
            }
        }
        let mut spokes: Vec<(usize, PathWitness)> = Vec::new();
        let mut target = vec![false; g.vertex_count()];
        for h in &pool {
            target[h.center] = true;
            used[h.center] = false;
        }
        while spokes.len() < p.h0 {
            let Some(path) = bfs_path(g, &[w], &target, &used, p.h3) else { break };
            let end = *path.last().unwrap();
            target[end] = false;
            used[end] = true;
            for &x in &path[1..path.len() - 1] {
                used[x] = true;
            }
            let idx = pool.iter().position(|h| h.center == end).unwrap();
            spokes.push((idx, PathWitness::new(path)));
        }
        if spokes.len() == p.h0 {
            let (hubs, spokes): (Vec<Hub>, Vec<PathWitness>) =
                spokes.into_iter().map(|(i, s)| (pool[i].shrink(p.h1, p.h2), s)).unzip();
            let unit = Unit { core: w, params: p, hubs, spokes };
            let report = validate_unit(g, &unit);
            assert!(report.passed, "built unit fails validation: {:?}", report.failures().collect::<Vec<_>>());
            return Ok(unit);
        }
        if spokes.len() > best.len() {
            best = spokes.into_iter().map(|(_, s)| s).collect();
        }
    }
    Err(BuildFailure::ConnectionStalled { needed: p.h0, best })
}

fn place_hubs(g: &Graph, blocked: &mut [bool], pool: &mut Vec<Hub>, limit: usize, h1: usize, h2: usize) {
    while pool.len() < limit {
        match find_hub(g, blocked, h1, h2, false) {
            Ok(h) => {
                mark(blocked, &h.vertices());
                pool.push(h);
            }
            Err(_) => break,
        }
    }
}

fn mark(mask: &mut [bool], set: &VertexSet) {
    for v in set.iter() {
        mask[v] = true;
    }
}

pub fn validate_unit(g: &Graph, unit: &Unit) -> ValidationReport {
    let mut r = ValidationReport::new();
    let p = unit.params;
    r.check(
        "hub-count",
        (unit.hubs.len() != p.h0 || unit.spokes.len() != p.h0)
            .then(|| format!("{} hubs and {} spokes, expected {}", unit.hubs.len(), unit.spokes.len(), p.h0)),
    );
    let mut hub_err = None;
    for (i, h) in unit.hubs.iter().enumerate() {
        let hr = validate_hub(g, h);
        if !hr.passed {
            hub_err.get_or_insert(format!("hub {i}: {:?}", hr.failures().next().map(|c| &c.id)));
        }
    }
    r.check("hubs-valid", hub_err);
    r.check(
        "hub-sizes",
        unit.hubs
            .iter()
            .position(|h| h.h1() != p.h1 || h.second_layers.values().any(|l| l.len() != p.h2))
            .map(|i| format!("hub {i} is not a ({}, {})-hub", p.h1, p.h2)),
    );
    let total: usize = unit.hubs.iter().map(|h| h.vertices().len()).sum();
    let union = unit.hubs.iter().fold(VertexSet::new(), |acc, h| acc.union(&h.vertices()));
    r.check("hubs-disjoint", (union.len() != total).then(|| "two hubs share a vertex".into()));
    r.check(
        "core-outside-hubs",
        union.contains(unit.core).then(|| format!("core {} lies in a hub", unit.core)),
    );
    r.check(
        "spokes-valid",
        unit.spokes.iter().position(|s| !s.is_valid_in(g)).map(|i| format!("spoke {i} is not a simple path")),
    );
    r.check(
        "spoke-endpoints",
        unit.spokes
            .iter()
            .zip(&unit.hubs)
            .position(|(s, h)| s.vertices.first() != Some(&unit.core) || s.vertices.last() != Some(&h.center))
            .map(|i| format!("spoke {i} does not join the core to hub {i}")),
    );
    r.check(
        "spoke-length",
        unit.spokes
            .iter()
            .position(|s| s.length() > p.h3)
            .map(|i| format!("spoke {i} has length {} > {}", unit.spokes[i].length(), p.h3)),
    );
    let mut seen = VertexSet::new();
    let mut clash = None;
    let mut into_hub = None;
    for (i, s) in unit.spokes.iter().enumerate() {
        for &x in s.vertices.iter().skip(1) {
            if !seen.insert(x) {
                clash.get_or_insert(format!("spokes share vertex {x}"));
            }
        }
        for &x in s.interior() {
            if union.contains(x) {
                into_hub.get_or_insert(format!("spoke {i} passes through hub vertex {x}"));
            }
        }
    }
    r.check("spokes-disjoint", clash);
    r.check("spokes-avoid-hubs", into_hub);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn dense_bipartite_unit() {
        let g = generators::complete_bipartite(30, 30);
        let p = UnitParams { h0: 3, h1: 2, h2: 2, h3: 4 };
        let unit = build_unit(&g, &VertexSet::new(), p).unwrap();
        assert!(validate_unit(&g, &unit).passed);
        assert_eq!(unit.exterior().len(), 3 * 2 * 2);
        let big = generators::complete_bipartite(60, 60);
        let paper = build_unit_with(&big, &VertexSet::new(), p, UnitOptions::paper(&p)).unwrap();
        assert!(validate_unit(&big, &paper).passed);
    }

    #[test]
    fn path_gives_single_hub_star() {
        let g = generators::path(4);
        let p = UnitParams { h0: 1, h1: 1, h2: 1, h3: 1 };
        let unit = build_unit(&g, &VertexSet::new(), p).unwrap();
        assert_eq!(unit.spokes[0].length(), 1);
        assert_eq!(unit.vertices().len(), 4);
        assert!(validate_unit(&g, &unit).passed);
    }

    #[test]
    fn sparse_trees_fail() {
        let p = UnitParams { h0: 2, h1: 2, h2: 2, h3: 4 };
        for g in [generators::path(12), generators::star(12)] {
            assert!(matches!(build_unit(&g, &VertexSet::new(), p), Err(BuildFailure::HubPoolExhausted { .. })));
        }
    }

    #[test]
    fn trees_can_carry_units() {
        use std::collections::BTreeMap;
        let g = generators::path(7);
        let hub = |u: usize, z: usize, y: usize| Hub { center: u, first_layer: vec![z], second_layers: BTreeMap::from([(z, vec![y])]) };
        let unit = Unit {
            core: 3,
            params: UnitParams { h0: 2, h1: 1, h2: 1, h3: 1 },
            hubs: vec![hub(2, 1, 0), hub(4, 5, 6)],
            spokes: vec![PathWitness::new(vec![3, 2]), PathWitness::new(vec![3, 4])],
        };
        assert!(validate_unit(&g, &unit).passed);
    }

    #[test]
    fn long_spoke_is_rejected() {
        let g = generators::complete_bipartite(30, 30);
        let p = UnitParams { h0: 3, h1: 2, h2: 2, h3: 4 };
        let mut unit = build_unit(&g, &VertexSet::new(), p).unwrap();
        unit.params.h3 = unit.spokes.iter().map(PathWitness::length).max().unwrap() - 1;
        assert!(validate_unit(&g, &unit).failed("spoke-length"));
    }
}
