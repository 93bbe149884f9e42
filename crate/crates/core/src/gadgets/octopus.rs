use serde::{Deserialize, Serialize};

use super::adjuster::{validate_adjuster, Adjuster};
use super::{BuildFailure, BuildResult};
use crate::certify::ValidationReport;
use crate::connector::{bfs_path, PathWitness};
use crate::error::invalid;
use crate::graph::{Graph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndSide {
    First,
    Second,
}

/// A core adjuster whose end `R` reaches further adjusters (the arms) by
/// short paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Octopus {
    pub core: Adjuster,
    pub attached_end: EndSide,
    pub arms: Vec<Adjuster>,
    pub arm_paths: Vec<PathWitness>,
    pub max_path_length: usize,
}

impl Octopus {
    /// Vertex set of the attached end `R`.
    pub fn attached(&self) -> &VertexSet {
        match self.attached_end {
            EndSide::First => &self.core.end1.vertices,
            EndSide::Second => &self.core.end2.vertices,
        }
    }

    fn detached(&self) -> &VertexSet {
        match self.attached_end {
            EndSide::First => &self.core.end2.vertices,
            EndSide::Second => &self.core.end1.vertices,
        }
    }
}

fn ends(a: &Adjuster) -> VertexSet {
    a.end1.vertices.union(&a.end2.vertices)
}

/// Arm indices each path reaches, in path order.
fn reached_arms(o: &Octopus, path: &PathWitness) -> Vec<usize> {
    o.arms
        .iter()
        .enumerate()
        .filter(|(_, a)| path.vertices.iter().any(|&v| ends(a).contains(v)))
        .map(|(i, _)| i)
        .collect()
}

pub fn validate_octopus(g: &Graph, o: &Octopus) -> ValidationReport {
    let mut r = ValidationReport::new();
    r.merge("core.", validate_adjuster(g, &o.core));
    for (i, a) in o.arms.iter().enumerate() {
        r.merge(&format!("arm{i}."), validate_adjuster(g, a));
    }
    let mut seen = o.core.vertices();
    let mut overlap = None;
    for (i, a) in o.arms.iter().enumerate() {
        let v = a.vertices();
        if !v.is_disjoint(&seen) {
            overlap.get_or_insert(format!("arm {i} overlaps the core or an earlier arm"));
        }
        seen = seen.union(&v);
    }
    r.check("arms-disjoint", overlap);
    r.check(
        "paths-valid",
        o.arm_paths.iter().position(|p| !p.is_valid_in(g)).map(|i| format!("path {i} is not a simple path")),
    );
    r.check(
        "path-length",
        o.arm_paths
            .iter()
            .position(|p| p.length() > o.max_path_length)
            .map(|i| format!("path {i} longer than {}", o.max_path_length)),
    );
    r.check(
        "paths-start-in-R",
        o.arm_paths
            .iter()
            .position(|p| p.vertices.first().is_none_or(|&v| !o.attached().contains(v)))
            .map(|i| format!("path {i} does not start in the attached end")),
    );
    let centers = o.arms.iter().fold(o.core.center.clone(), |acc, a| acc.union(&a.center));
    r.check(
        "paths-avoid-centers",
        o.arm_paths
            .iter()
            .position(|p| p.vertices.iter().any(|&v| centers.contains(v) || o.detached().contains(v)))
            .map(|i| format!("path {i} meets a center or the other core end")),
    );
    let mut used = VertexSet::new();
    let mut shared = None;
    for p in &o.arm_paths {
        for &v in p.vertices.iter().skip(1) {
            if !used.insert(v) {
                shared.get_or_insert(format!("vertex {v} lies on two paths"));
            }
        }
    }
    r.check("paths-disjoint", shared);
    let reached: VertexSet = o.arm_paths.iter().flat_map(|p| reached_arms(o, p)).collect();
    r.check(
        "arms-reached",
        (0..o.arms.len()).find(|i| !reached.contains(*i)).map(|i| format!("arm {i} is not reached by any path")),
    );
    r.check(
        "family-size",
        (o.arm_paths.len() > o.arms.len()).then(|| "more paths than arms".into()),
    );
    r
}

/// Uses `pool[0]` as the core and attaches `r3` further pool adjusters by
/// paths of length at most `r4` from one of its ends. Each path stops at the
/// first end it meets, so every path adds exactly one arm and the family is
/// minimal. Both ends of the core are tried; the second wins ties.
pub fn build_octopus(g: &Graph, pool: &[Adjuster], avoid: &VertexSet, r3: usize, r4: usize) -> BuildResult<Octopus> {
    g.check_set(avoid)?;
    if pool.is_empty() || r3 > pool.len() - 1 {
        return Err(invalid(format!("need r3 <= |pool| - 1, got r3 = {r3} with {} adjusters", pool.len())).into());
    }
    let mut all = VertexSet::new();
    for a in pool {
        let v = a.vertices();
        if !v.is_disjoint(&all) || !v.is_disjoint(avoid) {
            return Err(invalid("pool adjusters must be pairwise disjoint and avoid the avoid set").into());
        }
        all = all.union(&v);
    }
    let mut best: Option<Octopus> = None;
    for side in [EndSide::Second, EndSide::First] {
        let o = attach(g, pool, avoid, side, r3, r4);
        if o.arms.len() == r3 {
            let report = validate_octopus(g, &o);
            assert!(report.passed, "octopus fails validation: {:?}", report.failures().collect::<Vec<_>>());
            return Ok(o);
        }
        if best.as_ref().is_none_or(|b| o.arms.len() > b.arms.len()) {
            best = Some(o);
        }
    }
    Err(BuildFailure::ArmsStalled { needed: r3, partial: Box::new(best.unwrap()) })
}

fn attach(g: &Graph, pool: &[Adjuster], avoid: &VertexSet, side: EndSide, r3: usize, r4: usize) -> Octopus {
    let mut o = Octopus { core: pool[0].clone(), attached_end: side, arms: Vec::new(), arm_paths: Vec::new(), max_path_length: r4 };
    let mut blocked = g.mask(avoid);
    for a in pool {
        for v in a.center.iter() {
            blocked[v] = true;
        }
    }
    for v in o.detached().iter() {
        blocked[v] = true;
    }
    let sources = o.attached().to_vec();
    let mut open: Vec<usize> = (1..pool.len()).collect();
    while o.arms.len() < r3 {
        let mut target = vec![false; g.vertex_count()];
        for &i in &open {
            for v in ends(&pool[i]).iter() {
                target[v] = true;
            }
        }
        let Some(path) = bfs_path(g, &sources, &target, &blocked, r4) else { break };
        let end = *path.last().unwrap();
        let pos = open.iter().position(|&i| ends(&pool[i]).contains(end)).unwrap();
        let idx = open.remove(pos);
        for &v in &path[1..] {
            blocked[v] = true;
        }
        for v in ends(&pool[idx]).iter() {
            blocked[v] = true;
        }
        o.arms.push(pool[idx].clone());
        o.arm_paths.push(PathWitness::new(path));
    }
    o
}
