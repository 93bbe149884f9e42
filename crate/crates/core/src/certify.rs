//! Subdivision certificates, their independent verification, and an
//! exhaustive search oracle for small hosts.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;

/// One subdivided edge: the path joining branch vertices `u < v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPath {
    pub u: usize,
    pub v: usize,
    pub vertices: Vec<usize>,
}

/// A claimed `TK_k^(ell)`: `k` branch vertices and one path of length `ell`
/// per pair of them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionCertificate {
    pub ell: usize,
    pub branch: Vec<usize>,
    pub paths: Vec<PairPath>,
}

impl SubdivisionCertificate {
    /// Builds the normal form: branch sorted, every path oriented from the
    /// smaller endpoint, paths sorted by endpoint pair.
    pub fn new(ell: usize, mut branch: Vec<usize>, paths: Vec<Vec<usize>>) -> Self {
        branch.sort_unstable();
        let mut paths: Vec<PairPath> = paths
            .into_iter()
            .map(|mut p| {
                if p.first() > p.last() {
                    p.reverse();
                }
                PairPath { u: p.first().copied().unwrap_or(0), v: p.last().copied().unwrap_or(0), vertices: p }
            })
            .collect();
        paths.sort_by_key(|p| (p.u, p.v));
        SubdivisionCertificate { ell, branch, paths }
    }

    pub fn k(&self) -> usize {
        self.branch.len()
    }

    /// Re-derives the normal form from the path vertex lists.
    pub fn canonical(&self) -> Self {
        SubdivisionCertificate::new(self.ell, self.branch.clone(), self.paths.iter().map(|p| p.vertices.clone()).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Every vertex mentioned by the certificate.
    pub fn vertices(&self) -> BTreeSet<usize> {
        self.branch.iter().chain(self.paths.iter().flat_map(|p| p.vertices.iter())).copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseResult {
    pub id: String,
    pub passed: bool,
    pub detail: Option<String>,
}

/// Clause-by-clause outcome of a structural check.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub clauses: Vec<ClauseResult>,
}

impl ValidationReport {
    pub fn new() -> Self {
        ValidationReport { passed: true, clauses: Vec::new() }
    }

    pub fn check(&mut self, id: &str, failure: Option<String>) {
        self.passed &= failure.is_none();
        self.clauses.push(ClauseResult { id: id.to_string(), passed: failure.is_none(), detail: failure });
    }

    /// Records an informational clause that does not affect `passed`.
    pub fn note(&mut self, id: &str, detail: String) {
        self.clauses.push(ClauseResult { id: id.to_string(), passed: true, detail: Some(detail) });
    }

    pub fn clause(&self, id: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.id == id)
    }

    pub fn failed(&self, id: &str) -> bool {
        self.clause(id).is_some_and(|c| !c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClauseResult> {
        self.clauses.iter().filter(|c| !c.passed)
    }

    pub fn merge(&mut self, prefix: &str, other: ValidationReport) {
        self.passed &= other.passed;
        for c in other.clauses {
            self.clauses.push(ClauseResult { id: format!("{prefix}{}", c.id), ..c });
        }
    }
}

fn first_failure<I: IntoIterator<Item = String>>(it: I) -> Option<String> {
    it.into_iter().next()
}

pub fn verify_subdivision(g: &Graph, cert: &SubdivisionCertificate) -> ValidationReport {
    let mut r = ValidationReport::new();
    let n = g.vertex_count();
    r.check("ell-positive", (cert.ell == 0).then(|| "ell must be at least 1".to_string()));

    let branch: BTreeSet<usize> = cert.branch.iter().copied().collect();
    r.check(
        "branch-distinct",
        (branch.len() != cert.branch.len()).then(|| "branch vertices repeat".to_string()),
    );
    r.check(
        "branch-in-range",
        first_failure(cert.branch.iter().filter(|&&v| v >= n).map(|v| format!("branch vertex {v} not in graph"))),
    );

    let wanted: BTreeSet<(usize, usize)> = branch.iter().copied().tuple_combinations().collect();
    let mut seen = BTreeSet::new();
    let mut pair_err = None;
    for p in &cert.paths {
        let key = (p.u.min(p.v), p.u.max(p.v));
        if !wanted.contains(&key) {
            pair_err.get_or_insert(format!("path for ({}, {}) is not a branch pair", p.u, p.v));
        } else if !seen.insert(key) {
            pair_err.get_or_insert(format!("pair ({}, {}) has more than one path", key.0, key.1));
        }
    }
    if let Some(&(u, v)) = wanted.difference(&seen).next() {
        pair_err.get_or_insert(format!("pair ({u}, {v}) has no path"));
    }
    r.check("pairs-complete", pair_err);

    r.check(
        "endpoints",
        first_failure(cert.paths.iter().filter_map(|p| {
            let ends = (p.vertices.first().copied(), p.vertices.last().copied());
            let ok = ends == (Some(p.u), Some(p.v)) || ends == (Some(p.v), Some(p.u));
            (!ok).then(|| format!("path for ({}, {}) has endpoints {:?}", p.u, p.v, ends))
        })),
    );
    r.check(
        "uniform-length",
        first_failure(cert.paths.iter().filter_map(|p| {
            let len = p.vertices.len().saturating_sub(1);
            (len != cert.ell).then(|| format!("path for ({}, {}) has length {len}, expected {}", p.u, p.v, cert.ell))
        })),
    );
    r.check(
        "edges",
        first_failure(cert.paths.iter().flat_map(|p| {
            p.vertices
                .windows(2)
                .filter(|w| !(w[0] < n && g.has_edge(w[0], w[1])))
                .map(|w| format!("{} {} is not an edge", w[0], w[1]))
                .collect::<Vec<_>>()
        })),
    );
    r.check(
        "simple-paths",
        first_failure(cert.paths.iter().filter_map(|p| {
            let distinct: BTreeSet<_> = p.vertices.iter().collect();
            (distinct.len() != p.vertices.len()).then(|| format!("path for ({}, {}) repeats a vertex", p.u, p.v))
        })),
    );

    let interiors = cert.paths.iter().flat_map(|p| {
        let len = p.vertices.len();
        p.vertices.iter().take(len.saturating_sub(1)).skip(1).map(move |&x| (x, p))
    });
    let mut used = BTreeSet::new();
    let mut avoid_err = None;
    let mut disjoint_err = None;
    for (x, p) in interiors {
        if branch.contains(&x) {
            avoid_err.get_or_insert(format!("interior vertex {x} of ({}, {}) is a branch vertex", p.u, p.v));
        }
        if !used.insert(x) {
            disjoint_err.get_or_insert(format!("interior vertex {x} is shared by two paths"));
        }
    }
    r.check("internal-avoid-branch", avoid_err);
    r.check("internal-disjoint", disjoint_err);
    r
}

/// Three-valued answer of the exhaustive oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Found(SubdivisionCertificate),
    NotFound,
    BudgetExhausted,
}

struct Search<'a> {
    g: &'a Graph,
    ell: usize,
    used: Vec<bool>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.nodes <= self.budget
    }

    /// Routes `pairs[i..]`; `Err(())` when the budget runs out.
    fn route(&mut self, pairs: &[(usize, usize)], i: usize, out: &mut Vec<Vec<usize>>) -> Result<bool, ()> {
        if i == pairs.len() {
            return Ok(true);
        }
        let (a, b) = pairs[i];
        let mut path = vec![a];
        self.extend(pairs, i, b, &mut path, out)
    }

    fn extend(
        &mut self,
        pairs: &[(usize, usize)],
        i: usize,
        b: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<bool, ()> {
        if !self.tick() {
            return Err(());
        }
        let cur = *path.last().unwrap();
        let remaining = self.ell + 1 - path.len();
        if remaining == 1 {
            if !self.g.has_edge(cur, b) {
                return Ok(false);
            }
            path.push(b);
            out.push(path.clone());
            path.pop();
            if self.route(pairs, i + 1, out)? {
                return Ok(true);
            }
            out.pop();
            return Ok(false);
        }
        for &w in self.g.neighbors(cur) {
            if self.used[w] {
                continue;
            }
            self.used[w] = true;
            path.push(w);
            let found = self.extend(pairs, i, b, path, out);
            path.pop();
            self.used[w] = false;
            if found? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Exhaustive search for a `TK_k^(ell)`. `NotFound` is a proof of absence;
/// `BudgetExhausted` means the node budget ran out first.
pub fn brute_force_subdivision(g: &Graph, k: usize, ell: usize, budget: u64) -> OracleOutcome {
    if k < 2 || ell < 1 {
        return OracleOutcome::NotFound;
    }
    let n = g.vertex_count();
    let pairs_needed = k * (k - 1) / 2;
    if k + pairs_needed * (ell - 1) > n {
        return OracleOutcome::NotFound;
    }
    let candidates: Vec<usize> = g.vertices().filter(|&v| g.degree(v) + 1 >= k).collect();
    let mut search = Search { g, ell, used: vec![false; n], nodes: 0, budget };
    for branch in candidates.into_iter().combinations(k) {
        if !search.tick() {
            return OracleOutcome::BudgetExhausted;
        }
        for &b in &branch {
            search.used[b] = true;
        }
        let pairs: Vec<(usize, usize)> = branch.iter().copied().tuple_combinations().collect();
        let mut out = Vec::new();
        let found = search.route(&pairs, 0, &mut out);
        for &b in &branch {
            search.used[b] = false;
        }
        match found {
            Err(()) => return OracleOutcome::BudgetExhausted,
            Ok(true) => return OracleOutcome::Found(SubdivisionCertificate::new(ell, branch, out)),
            Ok(false) => {}
        }
    }
    OracleOutcome::NotFound
}

/// Largest `k` for which the host has a `TK_k^(ell)`, with a flag telling
/// whether every search involved ran to completion.
pub fn max_k_at_length(g: &Graph, ell: usize, budget: u64) -> (Option<(usize, SubdivisionCertificate)>, bool) {
    let n = g.vertex_count();
    let mut complete = true;
    let top = (g.max_degree() + 1).min(n);
    for k in (2..=top).rev() {
        match brute_force_subdivision(g, k, ell, budget) {
            OracleOutcome::Found(c) => return (Some((k, c)), complete),
            OracleOutcome::NotFound => {}
            OracleOutcome::BudgetExhausted => complete = false,
        }
    }
    (None, complete)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestClique {
    pub k: usize,
    pub ell: usize,
    pub certificate: SubdivisionCertificate,
    /// False when some larger `k` could not be ruled out within budget.
    pub complete: bool,
}

/// Maximises `k` over all lengths, preferring the shortest `ell` for it.
pub fn best_balanced_clique(g: &Graph, budget: u64) -> Option<BestClique> {
    let n = g.vertex_count();
    let mut complete = true;
    let top = (g.max_degree() + 1).min(n);
    for k in (2..=top).rev() {
        let pairs = k * (k - 1) / 2;
        let max_ell = 1 + (n - k) / pairs;
        for ell in 1..=max_ell {
            match brute_force_subdivision(g, k, ell, budget) {
                OracleOutcome::Found(certificate) => return Some(BestClique { k, ell, certificate, complete }),
                OracleOutcome::NotFound => {}
                OracleOutcome::BudgetExhausted => complete = false,
            }
        }
    }
    None
}
