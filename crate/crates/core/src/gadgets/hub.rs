use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{BuildFailure, BuildResult};
use crate::certify::ValidationReport;
use crate::graph::{core_mask, core_numbers, max_bipartite_matching, Graph, VertexSet};

/// Center `u`, first layer `S1(u)` and a second layer `S1(z)` for each `z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hub {
    pub center: usize,
    pub first_layer: Vec<usize>,
    pub second_layers: BTreeMap<usize, Vec<usize>>,
}

impl Hub {
    /// `B1(u) = {u} ∪ S1(u)`.
    pub fn ball(&self) -> VertexSet {
        std::iter::once(self.center).chain(self.first_layer.iter().copied()).collect()
    }

    /// `S2(u)`: the union of the second layers.
    pub fn exterior(&self) -> VertexSet {
        self.second_layers.values().flatten().copied().collect()
    }

    pub fn vertices(&self) -> VertexSet {
        self.ball().union(&self.exterior())
    }

    pub fn h1(&self) -> usize {
        self.first_layer.len()
    }

    /// Common second-layer size, if the layers are uniform.
    pub fn h2(&self) -> Option<usize> {
        let mut sizes = self.second_layers.values().map(Vec::len);
        let first = sizes.next()?;
        sizes.all(|s| s == first).then_some(first)
    }

    /// Keeps the first `h1` first-layer vertices and the first `h2` vertices
    /// of each of their second layers.
    pub(crate) fn shrink(&self, h1: usize, h2: usize) -> Hub {
        let first_layer: Vec<usize> = self.first_layer.iter().take(h1).copied().collect();
        let second_layers = first_layer
            .iter()
            .map(|z| (*z, self.second_layers[z].iter().take(h2).copied().collect()))
            .collect();
        Hub { center: self.center, first_layer, second_layers }
    }
}

pub fn validate_hub(g: &Graph, hub: &Hub) -> ValidationReport {
    let mut r = ValidationReport::new();
    let in_range = hub.vertices().iter().all(|v| g.contains(v)) && g.contains(hub.center);
    r.check("vertices-in-range", (!in_range).then(|| "hub mentions a vertex outside the graph".into()));
    if !in_range {
        return r;
    }
    let u = hub.center;
    let distinct = hub.ball().len() == hub.first_layer.len() + 1;
    r.check("S1-distinct", (!distinct).then(|| "first layer repeats a vertex or contains the center".into()));
    r.check(
        "S1-adjacent",
        hub.first_layer.iter().find(|&&z| !g.has_edge(u, z)).map(|z| format!("{z} is not a neighbour of {u}")),
    );
    let keyed = hub.second_layers.keys().copied().collect::<VertexSet>()
        == hub.first_layer.iter().copied().collect::<VertexSet>();
    r.check("layers-keyed", (!keyed).then(|| "second layers are not indexed by the first layer".into()));
    let mut bad = None;
    for (&z, layer) in &hub.second_layers {
        if let Some(&y) = layer.iter().find(|&&y| y == u || !g.has_edge(z, y)) {
            bad.get_or_insert(format!("{y} is not in N({z}) \\ {{{u}}}"));
        }
    }
    r.check("S2-adjacent", bad);
    let total: usize = hub.second_layers.values().map(Vec::len).sum();
    r.check(
        "layers-disjoint",
        (hub.exterior().len() != total).then(|| "two second layers share a vertex".into()),
    );
    r.check(
        "layers-avoid-B1",
        hub.exterior().intersection(&hub.ball()).first().map(|v| format!("second layer meets B1 at {v}")),
    );
    r.check(
        "layer-sizes-uniform",
        (hub.h2().is_none() && !hub.second_layers.is_empty()).then(|| "second layers differ in size".into()),
    );
    r
}

/// Greedy hub search inside `t`-cores of `G - avoid`, trying each center at
/// its own core level first (largest feasible `t`) and then in all of
/// `G - avoid`. Centers are tried by core level, then degree, then id.
pub fn build_hub(g: &Graph, avoid: &VertexSet, h1: usize, h2: usize, c4_mode: bool) -> BuildResult<Hub> {
    g.check_set(avoid)?;
    if h1 == 0 || h2 == 0 {
        return Err(crate::error::invalid("hub sizes must be at least 1").into());
    }
    let blocked = g.mask(avoid);
    find_hub(g, &blocked, h1, h2, c4_mode)
}

pub(crate) fn find_hub(g: &Graph, blocked: &[bool], h1: usize, h2: usize, c4_mode: bool) -> BuildResult<Hub> {
    let core = core_numbers(g, blocked);
    let mut centers: Vec<usize> = g.vertices().filter(|&v| !blocked[v] && core[v] >= 1).collect();
    centers.sort_by_key(|&v| (std::cmp::Reverse(core[v]), std::cmp::Reverse(g.degree(v)), v));
    let open: Vec<bool> = blocked.iter().map(|&b| !b).collect();
    let mut masks: HashMap<usize, Vec<bool>> = HashMap::new();
    let mut saw_collision = false;
    for &u in &centers {
        let allowed = masks.entry(core[u]).or_insert_with(|| core_mask(g, core[u], Some(blocked)));
        for allowed in [&*allowed, &open] {
            match hub_at(g, u, allowed, h1, h2, c4_mode) {
                Ok(Some(hub)) => {
                    debug_assert!(validate_hub(g, &hub).passed);
                    return Ok(hub);
                }
                Ok(None) => {}
                Err(()) => saw_collision = true,
            }
        }
    }
    Err(if saw_collision { BuildFailure::NotC4Free } else { BuildFailure::InsufficientDegree })
}

/// Hub centered at `u` using only `allowed` vertices. `Err` flags a second
/// layer collision in C4-free mode.
fn hub_at(g: &Graph, u: usize, allowed: &[bool], h1: usize, h2: usize, c4_mode: bool) -> Result<Option<Hub>, ()> {
    let deg_in = |v: usize| g.neighbors(v).iter().filter(|&&w| allowed[w]).count();
    if !allowed[u] || deg_in(u) < h1 {
        return Ok(None);
    }
    let mut cands: Vec<usize> =
        g.neighbors(u).iter().copied().filter(|&z| allowed[z] && deg_in(z) > h2).collect();
    if cands.len() < h1 {
        return Ok(None);
    }
    cands.sort_by_key(|&z| (std::cmp::Reverse(deg_in(z)), z));
    if c4_mode {
        let first: Vec<usize> = cands[..h1].to_vec();
        let ball: VertexSet = std::iter::once(u).chain(first.iter().copied()).collect();
        let mut used = VertexSet::new();
        let mut layers = BTreeMap::new();
        for &z in &first {
            let layer: Vec<usize> =
                g.neighbors(z).iter().copied().filter(|&y| allowed[y] && !ball.contains(y)).take(h2).collect();
            if layer.len() < h2 {
                return Ok(None);
            }
            if layer.iter().any(|&y| !used.insert(y)) {
                return Err(());
            }
            layers.insert(z, layer);
        }
        return Ok(Some(Hub { center: u, first_layer: first, second_layers: layers }));
    }
    let mut chosen: Vec<usize> = Vec::new();
    let mut layers = BTreeMap::new();
    for &z in &cands {
        if chosen.len() == h1 {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(z);
        if let Some(l) = assign_layers(g, u, &trial, allowed, h2) {
            chosen = trial;
            layers = l;
        }
    }
    if chosen.len() < h1 {
        return Ok(None);
    }
    Ok(Some(Hub { center: u, first_layer: chosen, second_layers: layers }))
}

/// Disjoint second layers of size `h2` for every `z` in `first`, by
/// matching `h2` slots per `z` into the admissible neighbours.
fn assign_layers(
    g: &Graph,
    u: usize,
    first: &[usize],
    allowed: &[bool],
    h2: usize,
) -> Option<BTreeMap<usize, Vec<usize>>> {
    let ball: VertexSet = std::iter::once(u).chain(first.iter().copied()).collect();
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut right = Vec::new();
    let mut slots = Vec::new();
    for &z in first {
        let opts: Vec<usize> = g
            .neighbors(z)
            .iter()
            .copied()
            .filter(|&y| allowed[y] && !ball.contains(y))
            .map(|y| {
                *index.entry(y).or_insert_with(|| {
                    right.push(y);
                    right.len() - 1
                })
            })
            .collect();
        if opts.len() < h2 {
            return None;
        }
        for _ in 0..h2 {
            slots.push(opts.clone());
        }
    }
    let partner = max_bipartite_matching(&slots, right.len());
    let mut layers = BTreeMap::new();
    for (i, &z) in first.iter().enumerate() {
        let mut layer = Vec::with_capacity(h2);
        for p in &partner[i * h2..(i + 1) * h2] {
            layer.push(right[(*p)?]);
        }
        layer.sort_unstable();
        layers.insert(z, layer);
    }
    Some(layers)
}
