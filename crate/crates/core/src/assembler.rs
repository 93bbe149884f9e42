//! The end-to-end pipeline: units, core-to-core connections of one common
//! length, and the dense and sparse fallbacks around it.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{best_balanced_clique, brute_force_subdivision, verify_subdivision, OracleOutcome, SubdivisionCertificate};
use crate::connector::PathWitness;
use crate::drc::{dense_tk2, kst_degree_bound};
use crate::error::{invalid, Result};
use crate::expander::{extract_bipartite_expander, kst_free_profile_transform, ExpansionProfile, ExtractOptions};
use crate::gadgets::{adjuster_length_menu, build_simple_adjuster, build_unit, validate_adjuster, validate_hub, Unit, UnitParams};
use crate::graph::{bfs_distances, Graph, Subgraph, VertexSet};
use crate::router::{connect_pair_with_length, realize_exact_length_with, LengthWindow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Paper,
    Desk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaRule {
    /// `kappa = sqrt(d)`.
    SqrtD,
    /// `kappa = d`, for C4-free hosts.
    LinearD,
}

impl KappaRule {
    pub fn kappa(&self, d: f64) -> f64 {
        match self {
            KappaRule::SqrtD => d.sqrt(),
            KappaRule::LinearD => d,
        }
    }
}

/// Explicit constants for desk-scale runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeskOverrides {
    pub m: usize,
    /// Size `D` of each adjuster end.
    pub adjuster_size: usize,
    /// Common path length; chosen by a probe when absent.
    pub ell: Option<usize>,
    /// Clique order to aim for; tried downwards from `floor(kappa) + 1` when absent.
    pub k_target: Option<usize>,
    pub hub_h1: usize,
    pub hub_h2: usize,
    pub spoke_len: usize,
    /// Largest vertex set handed to the exact-length search.
    pub exact_cap: usize,
    pub oracle_budget: u64,
}

impl Default for DeskOverrides {
    fn default() -> Self {
        DeskOverrides {
            m: 2,
            adjuster_size: 2,
            ell: None,
            k_target: None,
            hub_h1: 1,
            hub_h2: 1,
            spoke_len: 3,
            exact_cap: 16,
            oracle_budget: 2_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub kappa_rule: KappaRule,
    pub epsilon1: f64,
    pub epsilon2: f64,
    /// Dense branch when `d >= ln(n)^log_power`.
    pub log_power: f64,
    /// Dense fallback when `n < small_n_factor * kappa^2`.
    pub small_n_factor: f64,
    pub overrides: Option<DeskOverrides>,
    pub seed: u64,
    pub exhaustive_cap: usize,
    pub sample_trials: usize,
}

impl RunConfig {
    pub fn desk() -> Self {
        RunConfig {
            mode: Mode::Desk,
            kappa_rule: KappaRule::SqrtD,
            epsilon1: 0.1,
            epsilon2: 1e-6,
            log_power: 1.0,
            small_n_factor: 1e4,
            overrides: Some(DeskOverrides::default()),
            seed: 0,
            exhaustive_cap: 16,
            sample_trials: 100,
        }
    }

    pub fn paper() -> Self {
        RunConfig { mode: Mode::Paper, overrides: None, ..RunConfig::desk() }
    }
}

/// Resolved constants of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub mode: Mode,
    pub kappa: f64,
    pub m: u64,
    /// Adjuster end size `D`.
    pub big_d: f64,
    pub ell: Option<u64>,
    /// A unit is bad once more than this many interior vertices are used.
    pub bad_threshold: u64,
    pub c_prime: Rational64,
    /// The clique-size constant, kept symbolic.
    pub c: String,
}

/// Paper mode: `m` is the smallest even integer above `80 ln^4(n / kappa^2)`,
/// `D = kappa^2 m^4 / 10^7` and `ell = m^3`. Desk mode echoes the overrides.
pub fn derive_config(n: usize, d: Rational64, cfg: &RunConfig) -> Result<Constants> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if d <= Rational64::zero() {
        return Err(invalid("d must be positive"));
    }
    let kappa = cfg.kappa_rule.kappa(d.to_f64().unwrap());
    let c = "min{1/16, sqrt(2)*c1/4, c2/8}".to_string();
    let c_prime = Rational64::new(1, 200);
    let threshold = |m: u64| (kappa * (m as f64).powi(3)).floor() as u64;
    match cfg.mode {
        Mode::Paper => {
            let x = 80.0 * (n as f64 / (kappa * kappa)).ln().powi(4);
            let m = 2 * ((x / 2.0).floor() as u64 + 1);
            let big_d = kappa * kappa * (m as f64).powi(4) / 1e7;
            Ok(Constants { mode: Mode::Paper, kappa, m, big_d, ell: m.checked_pow(3), bad_threshold: threshold(m), c_prime, c })
        }
        Mode::Desk => {
            let o = cfg.overrides.ok_or_else(|| invalid("desk mode needs explicit overrides"))?;
            let m = o.m as u64;
            Ok(Constants {
                mode: Mode::Desk,
                kappa,
                m,
                big_d: o.adjuster_size as f64,
                ell: o.ell.map(|l| l as u64),
                bad_threshold: threshold(m),
                c_prime,
                c,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Two routed legs into an adjuster, closed inside its center.
    Adjuster,
    /// Exact-length search over a bounded ball around the endpoints.
    ExactFallback,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "kebab-case")]
pub enum TraceEntry {
    Config { constants: Constants },
    C4Check { c4_free: bool },
    Transform { ok: bool, k: f64, detail: String },
    Expander { order: usize, edges: usize, average_degree: Rational64, certified: bool },
    KstBound { side_order: usize, other_order: usize, observed: f64, bound: f64 },
    Branch { average_degree: f64, log_threshold: f64, dense: bool, small_n: bool },
    Attempt { k: usize },
    UnitBuilt { index: usize, core: usize, hub_centers: Vec<usize>, interior: usize },
    HubChecked { unit: usize, center: usize, valid: bool },
    UnitsStopped { reason: String },
    SideSelected { side: u8, kept: usize, dropped: usize },
    Length { ell: usize, source: String },
    AdjusterBuilt { core1: usize, core2: usize, base_length: usize, steps: usize, center: usize, valid: bool, menu: Vec<usize>, parity_consistent: bool },
    AdjusterFailed { reason: String },
    Connection { units: (usize, usize), length: usize, route: Route },
    ConnectionFailed { units: (usize, usize), reason: String },
    UnitSkipped { unit: usize },
    Classified { good: Vec<usize>, bad: Vec<usize>, threshold: u64 },
    Certificate { k: usize, ell: usize, verified: bool },
    Oracle { complete: bool },
    Failure { reason: String },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub entries: Vec<TraceEntry>,
}

impl PipelineTrace {
    pub fn push(&mut self, e: TraceEntry) {
        self.entries.push(e);
    }

    pub fn adjusters_built(&self) -> impl Iterator<Item = &TraceEntry> {
        self.entries.iter().filter(|e| matches!(e, TraceEntry::AdjusterBuilt { .. }))
    }

    pub fn hubs_validated(&self) -> usize {
        self.entries.iter().filter(|e| matches!(e, TraceEntry::HubChecked { valid: true, .. })).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum FailureReason {
    #[error("no unit could be built")]
    NoUnits,
    #[error("infeasible at this scale: {0}")]
    Infeasible(String),
    #[error("stalled: {0}")]
    Stalled(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("{reason}")]
pub struct PipelineFailure {
    pub reason: FailureReason,
    pub trace: PipelineTrace,
    /// Largest verified subdivision seen before giving up, if any.
    pub partial: Option<SubdivisionCertificate>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assembled {
    pub certificate: SubdivisionCertificate,
    pub trace: PipelineTrace,
}

/// Splits unit indices by `|Int(unit) ∩ usage| > threshold`.
pub fn classify_units(units: &[Unit], usage: &VertexSet, threshold: usize) -> (Vec<usize>, Vec<usize>) {
    (0..units.len()).partition(|&i| units[i].interior().intersection(usage).len() <= threshold)
}

/// Builds units, connects their cores pairwise by paths of one common
/// length and returns the clique subdivision on the good units' cores.
pub fn find_balanced_subdivision(g: &Graph, cfg: &RunConfig) -> std::result::Result<Assembled, PipelineFailure> {
    let mut trace = PipelineTrace::default();
    let fail = |reason: FailureReason, mut trace: PipelineTrace, partial| {
        trace.push(TraceEntry::Failure { reason: reason.to_string() });
        PipelineFailure { reason, trace, partial }
    };
    if g.edge_count() == 0 {
        return Err(fail(FailureReason::NoUnits, trace, None));
    }
    let consts = match derive_config(g.vertex_count(), g.average_degree(), cfg) {
        Ok(c) => c,
        Err(e) => return Err(fail(FailureReason::Invalid(e.to_string()), trace, None)),
    };
    trace.push(TraceEntry::Config { constants: consts.clone() });
    let c4 = cfg.kappa_rule == KappaRule::LinearD;
    let (shape, ks): (Shape, Vec<usize>) = match cfg.mode {
        Mode::Paper => {
            let ell = consts.ell.unwrap_or(u64::MAX);
            if ell >= g.vertex_count() as u64 {
                let why = format!("ell = m^3 = {ell} does not fit in {} vertices", g.vertex_count());
                return Err(fail(FailureReason::Infeasible(why), trace, None));
            }
            let m = consts.m as usize;
            let k = ((consts.c_prime.to_f64().unwrap() * consts.kappa / 4.0).floor() as usize).max(2);
            let shape = Shape { h1: m, h2: m, h3: 21 * m, ell: Some(ell as usize), adjuster_size: consts.big_d.ceil() as usize, m, exact_cap: 16 };
            (shape, vec![k])
        }
        Mode::Desk => {
            let o = cfg.overrides.expect("checked by derive_config");
            let shape = Shape {
                h1: o.hub_h1,
                h2: o.hub_h2,
                h3: o.spoke_len,
                ell: o.ell,
                adjuster_size: o.adjuster_size,
                m: o.m,
                exact_cap: o.exact_cap,
            };
            let ks = match o.k_target {
                Some(k) => vec![k],
                None => (2..=consts.kappa.floor() as usize + 1).rev().collect(),
            };
            (shape, ks)
        }
    };
    let mut best: Option<SubdivisionCertificate> = None;
    let mut last = FailureReason::NoUnits;
    for k in ks {
        if k < 2 {
            return Err(fail(FailureReason::Invalid(format!("k = {k} is below 2")), trace, best));
        }
        trace.push(TraceEntry::Attempt { k });
        match attempt(g, k, &shape, c4, consts.bad_threshold, &mut trace) {
            Ok(cert) => {
                let full = cert.k() >= k;
                if best.as_ref().is_none_or(|b| b.k() < cert.k()) {
                    best = Some(cert);
                }
                if full {
                    break;
                }
            }
            Err(r) => last = r,
        }
    }
    match best {
        Some(certificate) => Ok(Assembled { certificate, trace }),
        None => Err(fail(last, trace, None)),
    }
}

struct Shape {
    h1: usize,
    h2: usize,
    h3: usize,
    ell: Option<usize>,
    adjuster_size: usize,
    m: usize,
    exact_cap: usize,
}

fn attempt(
    g: &Graph,
    k: usize,
    shape: &Shape,
    c4: bool,
    threshold: u64,
    trace: &mut PipelineTrace,
) -> std::result::Result<SubdivisionCertificate, FailureReason> {
    let params = UnitParams { h0: k - 1, h1: shape.h1, h2: shape.h2, h3: shape.h3 };
    let colour = g.two_coloring();
    let max_units = if colour.is_some() { 2 * k - 1 } else { k };

    // (1) units with disjoint interiors
    let mut units: Vec<Unit> = Vec::new();
    let mut interiors = VertexSet::new();
    while units.len() < max_units {
        match build_unit(g, &interiors, params) {
            Ok(u) => {
                let inner = u.interior();
                assert!(inner.is_disjoint(&interiors), "unit interiors overlap");
                interiors = interiors.union(&inner);
                let index = units.len();
                for h in &u.hubs {
                    trace.push(TraceEntry::HubChecked { unit: index, center: h.center, valid: validate_hub(g, h).passed });
                }
                trace.push(TraceEntry::UnitBuilt {
                    index,
                    core: u.core,
                    hub_centers: u.hubs.iter().map(|h| h.center).collect(),
                    interior: inner.len(),
                });
                units.push(u);
                if let Some(c) = &colour {
                    let on = |s: u8| units.iter().filter(|u| c[u.core] == s).count();
                    if on(0) >= k || on(1) >= k {
                        break;
                    }
                }
            }
            Err(e) => {
                trace.push(TraceEntry::UnitsStopped { reason: e.to_string() });
                break;
            }
        }
    }
    if units.is_empty() {
        return Err(FailureReason::NoUnits);
    }

    // (2) cores on one side of the bipartition
    if let Some(c) = &colour {
        let ones = units.iter().filter(|u| c[u.core] == 1).count();
        let side = if ones > units.len() - ones || (2 * ones == units.len() && c[units[0].core] == 1) { 1 } else { 0 };
        let before = units.len();
        units.retain(|u| c[u.core] == side);
        trace.push(TraceEntry::SideSelected { side, kept: units.len(), dropped: before - units.len() });
    }
    if units.len() < 2 {
        return Err(FailureReason::Stalled(format!("only {} unit(s) on one side", units.len())));
    }
    let mut reserved = vec![false; g.vertex_count()];
    for u in &units {
        for v in u.spoke_vertices().iter() {
            reserved[v] = true;
        }
        reserved[u.core] = true;
    }

    // common length
    let ell = match shape.ell {
        Some(l) => {
            trace.push(TraceEntry::Length { ell: l, source: "fixed".into() });
            l
        }
        None => {
            let Some(probe) = probe_length(g, &units, &reserved) else {
                return Err(FailureReason::Stalled("no two cores are connected".into()));
            };
            let l = probe + probe % 2;
            trace.push(TraceEntry::Length { ell: l, source: "probe".into() });
            l
        }
    };

    let avoid_set: VertexSet = (0..g.vertex_count()).filter(|&v| reserved[v]).collect();
    match build_simple_adjuster(g, &avoid_set, shape.adjuster_size, shape.m, c4) {
        Ok(a) => trace.push(adjuster_entry(g, &a)),
        Err(e) => trace.push(TraceEntry::AdjusterFailed { reason: e.to_string() }),
    }

    // (3), (4) connections in lexicographic unit order
    let mut used = reserved.clone();
    let mut next_hub = vec![0usize; units.len()];
    let mut accepted: Vec<usize> = Vec::new();
    let mut paths: BTreeMap<(usize, usize), PathWitness> = BTreeMap::new();
    let mut usage = VertexSet::new();
    for j in 0..units.len() {
        if accepted.len() == k {
            break;
        }
        let mut trial = used.clone();
        let mut fresh: Vec<((usize, usize), PathWitness, Route)> = Vec::new();
        let mut hub_j = 0;
        let mut ok = true;
        for &i in &accepted {
            let (hi, hj) = (next_hub[i], hub_j);
            if hi >= units[i].spokes.len() || hj >= units[j].spokes.len() {
                trace.push(TraceEntry::ConnectionFailed { units: (i, j), reason: "out of spokes".into() });
                ok = false;
                break;
            }
            let si = &units[i].spokes[hi];
            let sj = &units[j].spokes[hj];
            let (a, b) = (si.end(), sj.end());
            let Some(len) = ell.checked_sub(si.length() + sj.length()).filter(|&l| l >= 1) else {
                trace.push(TraceEntry::ConnectionFailed { units: (i, j), reason: "spokes exceed ell".into() });
                ok = false;
                break;
            };
            let mut blocked = trial.clone();
            blocked[a] = false;
            blocked[b] = false;
            match route_middle(g, a, b, len, &blocked, shape, c4, trace) {
                Some((mid, route)) => {
                    if let Some(c) = &colour {
                        assert_eq!(len % 2 == 0, c[a] == c[b], "length parity disagrees with the bipartition");
                    }
                    let mut full = si.vertices.clone();
                    full.extend(&mid[1..]);
                    full.extend(sj.vertices.iter().rev().skip(1));
                    assert_eq!(full.len() - 1, ell);
                    for &x in &mid[1..mid.len() - 1] {
                        assert!(!trial[x], "connection reuses vertex {x}");
                        trial[x] = true;
                    }
                    fresh.push(((i, j), PathWitness::new(full), route));
                    next_hub[i] += 1;
                    hub_j += 1;
                }
                None => {
                    trace.push(TraceEntry::ConnectionFailed { units: (i, j), reason: format!("no path of length {len}") });
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            used = trial;
            next_hub[j] = hub_j;
            for (key, p, route) in fresh {
                trace.push(TraceEntry::Connection { units: key, length: p.length(), route });
                usage.extend(p.vertices[1..p.vertices.len() - 1].iter().copied().filter(|&x| !reserved[x]));
                assert!(paths.insert(key, p).is_none(), "two connections for one unit pair");
            }
            accepted.push(j);
            assert_internally_disjoint(&paths, &units);
        } else {
            for ((i, _), _, _) in &fresh {
                next_hub[*i] -= 1;
            }
            trace.push(TraceEntry::UnitSkipped { unit: j });
        }
    }

    // (5) good units and the certificate
    let chosen: Vec<Unit> = accepted.iter().map(|&i| units[i].clone()).collect();
    let (good, bad) = classify_units(&chosen, &usage, threshold as usize);
    let good: Vec<usize> = good.into_iter().map(|i| accepted[i]).collect();
    let bad: Vec<usize> = bad.into_iter().map(|i| accepted[i]).collect();
    trace.push(TraceEntry::Classified { good: good.clone(), bad, threshold });
    if good.len() < 2 {
        return Err(FailureReason::Stalled(format!("{} good unit(s) connected", good.len())));
    }
    let branch: Vec<usize> = good.iter().map(|&i| units[i].core).collect();
    let chosen_paths = paths
        .iter()
        .filter(|((i, j), _)| good.contains(i) && good.contains(j))
        .map(|(_, p)| p.vertices.clone())
        .collect();
    let cert = SubdivisionCertificate::new(ell, branch, chosen_paths);
    let verified = verify_subdivision(g, &cert).passed;
    trace.push(TraceEntry::Certificate { k: cert.k(), ell, verified });
    if !verified {
        return Err(FailureReason::Stalled("assembled certificate failed verification".into()));
    }
    Ok(cert)
}

fn adjuster_entry(g: &Graph, a: &crate::gadgets::Adjuster) -> TraceEntry {
    let menu: Vec<usize> = adjuster_length_menu(g, a).map(|m| m.into_iter().collect()).unwrap_or_default();
    let parity_consistent = menu.iter().all(|l| l % 2 == a.base_length % 2) || !g.is_bipartite();
    TraceEntry::AdjusterBuilt {
        core1: a.core1,
        core2: a.core2,
        base_length: a.base_length,
        steps: a.steps,
        center: a.center.len(),
        valid: validate_adjuster(g, a).passed,
        menu,
        parity_consistent,
    }
}

/// Longest over unit pairs of the shortest core-to-core route through the
/// first spokes.
fn probe_length(g: &Graph, units: &[Unit], reserved: &[bool]) -> Option<usize> {
    let mut longest = None;
    for (i, ui) in units.iter().enumerate() {
        let a = ui.spokes[0].end();
        let mut blocked = reserved.to_vec();
        blocked[a] = false;
        for uj in &units[i + 1..] {
            let b = uj.spokes[0].end();
            blocked[b] = false;
            if let Some(d) = bfs_distances(g, &[a], &blocked)[b] {
                let total = d + ui.spokes[0].length() + uj.spokes[0].length();
                longest = Some(longest.map_or(total, |l: usize| l.max(total)));
            }
            blocked[b] = true;
        }
    }
    longest
}

/// An `a`-`b` path of exactly `len` edges avoiding `blocked`: first through a
/// fresh adjuster, then by exact search over a bounded ball.
#[allow(clippy::too_many_arguments)]
fn route_middle(
    g: &Graph,
    a: usize,
    b: usize,
    len: usize,
    blocked: &[bool],
    shape: &Shape,
    c4: bool,
    trace: &mut PipelineTrace,
) -> Option<(Vec<usize>, Route)> {
    let n = g.vertex_count();
    if len >= 4 {
        let mut avoid: VertexSet = (0..n).filter(|&v| blocked[v]).collect();
        avoid.insert(a);
        avoid.insert(b);
        match build_simple_adjuster(g, &avoid, shape.adjuster_size, shape.m, c4) {
            Ok(adj) => {
                trace.push(adjuster_entry(g, &adj));
                if let Some(p) = through_adjuster(g, a, b, len, blocked, &adj, shape.exact_cap) {
                    return Some((p, Route::Adjuster));
                }
            }
            Err(e) => trace.push(TraceEntry::AdjusterFailed { reason: e.to_string() }),
        }
    }
    // bounded ball, nearest first
    let da = bfs_distances(g, &[a], blocked);
    let db = bfs_distances(g, &[b], blocked);
    let mut ball: Vec<(usize, usize)> = (0..n)
        .filter(|&v| v != a && v != b && !blocked[v])
        .filter_map(|v| match (da[v], db[v]) {
            (None, None) => None,
            (x, y) => Some((x.unwrap_or(usize::MAX).min(y.unwrap_or(usize::MAX)), v)),
        })
        .collect();
    ball.sort_unstable();
    let center: VertexSet = ball.into_iter().take(shape.exact_cap.saturating_sub(2)).map(|(_, v)| v).collect();
    realize_exact_length_with(g, &center, a, b, len, shape.exact_cap)
        .ok()
        .flatten()
        .map(|p| (p.vertices, Route::ExactFallback))
}

fn through_adjuster(
    g: &Graph,
    a: usize,
    b: usize,
    len: usize,
    blocked: &[bool],
    adj: &crate::gadgets::Adjuster,
    cap: usize,
) -> Option<Vec<usize>> {
    let hi = len.checked_sub(adj.base_length)?;
    let lo = len.saturating_sub(adj.max_length()).max(2);
    let window = LengthWindow::new(lo, hi).ok()?;
    let mut avoid: VertexSet = (0..g.vertex_count()).filter(|&v| blocked[v]).collect();
    avoid = avoid.union(&adj.center);
    let (p, q) = connect_pair_with_length(
        g,
        &VertexSet::from([a]),
        &VertexSet::from([b]),
        &adj.end1,
        &adj.end2,
        &avoid,
        window,
    )
    .ok()?;
    let rest = len.checked_sub(p.length() + q.length())?;
    let (x, y) = (p.end(), q.end());
    let inner = match adj.path_of_length(rest) {
        Some(w) if w.start() == x => w.vertices.clone(),
        Some(w) => w.reversed().vertices,
        None if adj.center.len() + 2 <= cap => realize_exact_length_with(g, &adj.center, x, y, rest, cap).ok()??.vertices,
        None => return None,
    };
    let mut full = p.vertices.clone();
    full.extend(&inner[1..]);
    full.extend(q.vertices.iter().rev().skip(1));
    let distinct: VertexSet = full.iter().copied().collect();
    (distinct.len() == full.len() && full.len() == len + 1).then_some(full)
}

fn assert_internally_disjoint(paths: &BTreeMap<(usize, usize), PathWitness>, units: &[Unit]) {
    let mut seen = VertexSet::new();
    let cores: VertexSet = units.iter().map(|u| u.core).collect();
    for p in paths.values() {
        for x in p.interior() {
            assert!(!cores.contains(*x), "path passes through core {x}");
            assert!(seen.insert(*x), "vertex {x} is interior to two paths");
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Outcome {
    Subdivision { certificate: SubdivisionCertificate },
    DenseFallback { certificate: SubdivisionCertificate },
    SparseRegime { certificate: Option<SubdivisionCertificate> },
    Failure { reason: String },
}

impl Outcome {
    pub fn certificate(&self) -> Option<&SubdivisionCertificate> {
        match self {
            Outcome::Subdivision { certificate } | Outcome::DenseFallback { certificate } => Some(certificate),
            Outcome::SparseRegime { certificate } => certificate.as_ref(),
            Outcome::Failure { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopLevel {
    pub outcome: Outcome,
    pub trace: PipelineTrace,
}

fn is_c4_free(g: &Graph) -> bool {
    let n = g.vertex_count();
    let mut mark = vec![usize::MAX; n];
    for u in 0..n {
        for &w in g.neighbors(u) {
            for &x in g.neighbors(w) {
                if x == u {
                    continue;
                }
                if mark[x] == u {
                    return false;
                }
                mark[x] = u;
            }
        }
    }
    true
}

fn lift(sub: &Subgraph, cert: &SubdivisionCertificate) -> SubdivisionCertificate {
    SubdivisionCertificate::new(
        cert.ell,
        cert.branch.iter().map(|&b| sub.lift(b)).collect(),
        cert.paths.iter().map(|p| sub.lift_path(&p.vertices)).collect(),
    )
}

/// Bipartite expander extraction, then the dense/sparse split.
pub fn top_level(g: &Graph, cfg: &RunConfig) -> Result<TopLevel> {
    let mut trace = PipelineTrace::default();
    let done = |outcome: Outcome, mut trace: PipelineTrace| {
        if let Outcome::Failure { reason } = &outcome {
            trace.push(TraceEntry::Failure { reason: reason.clone() });
        }
        Ok(TopLevel { outcome, trace })
    };
    if g.edge_count() == 0 {
        return done(Outcome::Failure { reason: "graph has no edges".into() }, trace);
    }
    if cfg.mode == Mode::Desk && cfg.overrides.is_none() {
        return Err(invalid("desk mode needs explicit overrides"));
    }
    let d = g.average_degree();
    let df = d.to_f64().unwrap();
    let c4 = cfg.kappa_rule == KappaRule::LinearD;
    let k0 = match cfg.kappa_rule {
        KappaRule::SqrtD => cfg.epsilon2 * df,
        KappaRule::LinearD => cfg.epsilon2 * df * df,
    };
    let mut profile = ExpansionProfile::new(cfg.epsilon1, k0)?;
    if c4 {
        trace.push(TraceEntry::C4Check { c4_free: is_c4_free(g) });
        match kst_free_profile_transform(&profile, d, 2, 2) {
            Ok(p) => {
                trace.push(TraceEntry::Transform { ok: true, k: p.k, detail: format!("k {} -> {}", profile.k, p.k) });
                profile = p;
            }
            Err(e) => trace.push(TraceEntry::Transform { ok: false, k: profile.k, detail: e.to_string() }),
        }
    }
    let opts = ExtractOptions { exhaustive_cap: cfg.exhaustive_cap, trials: cfg.sample_trials, seed: cfg.seed };
    let bx = extract_bipartite_expander(g, d / 8, &profile, opts)?;
    let h = &bx.sub.graph;
    trace.push(TraceEntry::Expander {
        order: h.vertex_count(),
        edges: h.edge_count(),
        average_degree: h.average_degree(),
        certified: bx.verdict.witness.is_none(),
    });
    if h.edge_count() == 0 {
        return done(Outcome::Failure { reason: "expander is edgeless".into() }, trace);
    }
    if c4 && is_c4_free(h) {
        for (a, b) in [(&bx.left, &bx.right), (&bx.right, &bx.left)] {
            if a.is_empty() {
                continue;
            }
            let observed = h.edge_count() as f64 / a.len() as f64;
            let bound = kst_degree_bound(a.len(), b.len(), 2, 2)?;
            assert!(observed <= bound + 1e-9, "C4-free host beats the KST bound");
            trace.push(TraceEntry::KstBound { side_order: a.len(), other_order: b.len(), observed, bound });
        }
    }
    let n = h.vertex_count();
    let d1 = h.average_degree().to_f64().unwrap();
    let kappa = cfg.kappa_rule.kappa(d1);
    let log_threshold = (n as f64).ln().powf(cfg.log_power);
    let dense = d1 >= log_threshold;
    let small_n = (n as f64) < cfg.small_n_factor * kappa * kappa;
    trace.push(TraceEntry::Branch { average_degree: d1, log_threshold, dense, small_n });
    let budget = cfg.overrides.map_or(DeskOverrides::default().oracle_budget, |o| o.oracle_budget);
    let k_target = cfg.overrides.and_then(|o| o.k_target);

    if !dense {
        let mut certificate = None;
        if g.vertex_count() <= 12 {
            match (k_target, cfg.overrides.and_then(|o| o.ell)) {
                (Some(k), Some(ell)) => match brute_force_subdivision(g, k, ell, budget) {
                    OracleOutcome::Found(c) => certificate = Some(c),
                    other => trace.push(TraceEntry::Oracle { complete: !matches!(other, OracleOutcome::BudgetExhausted) }),
                },
                _ => {
                    if let Some(best) = best_balanced_clique(g, budget) {
                        trace.push(TraceEntry::Oracle { complete: best.complete });
                        certificate = Some(best.certificate);
                    }
                }
            }
        }
        if let Some(c) = &certificate {
            let verified = verify_subdivision(g, c).passed;
            assert!(verified, "oracle certificate fails verification");
            trace.push(TraceEntry::Certificate { k: c.k(), ell: c.ell, verified });
        }
        return done(Outcome::SparseRegime { certificate }, trace);
    }

    if small_n && !c4 {
        let k_max = (2..=n).take_while(|&k| k + k * (k - 1) / 2 <= n).last().unwrap_or(2);
        let ks: Vec<usize> = match k_target {
            Some(k) => vec![k],
            None => (2..=k_max).rev().collect(),
        };
        for k in ks {
            if let Ok(local) = dense_tk2(h, k, cfg.seed) {
                let certificate = lift(&bx.sub, &local);
                let verified = verify_subdivision(g, &certificate).passed;
                assert!(verified, "dense certificate fails verification");
                trace.push(TraceEntry::Certificate { k: certificate.k(), ell: 2, verified });
                return done(Outcome::DenseFallback { certificate }, trace);
            }
        }
        return done(Outcome::Failure { reason: "no two-edge subdivision found".into() }, trace);
    }

    match find_balanced_subdivision(h, cfg) {
        Ok(found) => {
            trace.entries.extend(found.trace.entries);
            let certificate = lift(&bx.sub, &found.certificate);
            let verified = verify_subdivision(g, &certificate).passed;
            assert!(verified, "lifted certificate fails verification");
            done(Outcome::Subdivision { certificate }, trace)
        }
        Err(f) => {
            let reason = f.reason.to_string();
            trace.entries.extend(f.trace.entries);
            done(Outcome::Failure { reason }, trace)
        }
    }
}
