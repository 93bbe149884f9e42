//! Sublinear expansion: the expansion function, expander verification and
//! extraction of a dense expander subgraph.

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{self, bipartite_half, external_neighborhood_unchecked, Graph, Subgraph, VertexSet};

pub const DEFAULT_EXHAUSTIVE_CAP: usize = 22;

/// The pair `(epsilon1, k)` fixing the expansion function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionProfile {
    pub epsilon1: f64,
    pub k: f64,
}

impl ExpansionProfile {
    pub fn new(epsilon1: f64, k: f64) -> Result<Self> {
        if !(epsilon1 > 0.0 && epsilon1.is_finite()) || !(k > 0.0 && k.is_finite()) {
            return Err(invalid(format!("profile needs epsilon1 > 0 and k > 0, got ({epsilon1}, {k})")));
        }
        Ok(ExpansionProfile { epsilon1, k })
    }

    /// `eps(x)` without the argument check; `x <= 0` maps to 0.
    pub fn eps(&self, x: f64) -> f64 {
        if x <= 0.0 || x < self.k / 5.0 {
            return 0.0;
        }
        let l = (15.0 * x / self.k).ln();
        self.epsilon1 / (l * l)
    }

    /// Smallest and largest constrained set sizes for a graph of order `n`.
    pub fn size_range(&self, n: usize) -> (usize, usize) {
        let lo = ((self.k / 2.0).ceil() as usize).max(1);
        (lo, n / 2)
    }

    fn violates(&self, size: usize, boundary: usize) -> bool {
        (boundary as f64) < self.eps(size as f64) * size as f64
    }
}

/// `0` below `k/5`, otherwise `epsilon1 / ln^2(15x/k)`.
pub fn epsilon_of(x: f64, p: &ExpansionProfile) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(invalid(format!("expansion function needs x > 0, got {x}")));
    }
    Ok(p.eps(x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictStatus {
    Certified,
    Refuted,
    SampledOk,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpanderVerdict {
    pub status: VerdictStatus,
    pub witness: Option<VertexSet>,
    pub sets_checked: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive { cap: usize },
    Sampled { trials: usize, seed: u64 },
}

impl VerifyMode {
    pub fn exhaustive() -> Self {
        VerifyMode::Exhaustive { cap: DEFAULT_EXHAUSTIVE_CAP }
    }
}

pub fn verify_expander(g: &Graph, p: &ExpansionProfile, mode: VerifyMode) -> Result<ExpanderVerdict> {
    match mode {
        VerifyMode::Exhaustive { cap } => {
            let cap = cap.min(63);
            if g.vertex_count() > cap {
                return Err(Error::TooLarge { size: g.vertex_count(), cap });
            }
            Ok(verify_exhaustive(g, p))
        }
        VerifyMode::Sampled { trials, seed } => Ok(verify_sampled(g, p, trials, seed)),
    }
}

fn verify_exhaustive(g: &Graph, p: &ExpansionProfile) -> ExpanderVerdict {
    let n = g.vertex_count();
    let nb: Vec<u64> = g.vertices().map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w)).collect();
    let (lo, hi) = p.size_range(n);
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut checked = 0u64;
    for size in lo..=hi {
        // Gosper's hack: all `size`-subsets in increasing mask order
        let mut x: u64 = (1u64 << size) - 1;
        while x & !full == 0 {
            checked += 1;
            let mut reach = 0u64;
            let mut rest = x;
            while rest != 0 {
                reach |= nb[rest.trailing_zeros() as usize];
                rest &= rest - 1;
            }
            let boundary = (reach & !x).count_ones() as usize;
            if p.violates(size, boundary) {
                let witness = (0..n).filter(|&v| x >> v & 1 == 1).collect();
                return ExpanderVerdict { status: VerdictStatus::Refuted, witness: Some(witness), sets_checked: checked };
            }
            let c = x & x.wrapping_neg();
            let r = x + c;
            if r == 0 {
                break;
            }
            x = (((r ^ x) >> 2) / c) | r;
        }
    }
    ExpanderVerdict { status: VerdictStatus::Certified, witness: None, sets_checked: checked }
}

/// Incrementally grown vertex set tracking `|N(X)|`.
struct Grower<'a> {
    g: &'a Graph,
    in_x: Vec<bool>,
    hits: Vec<u32>,
    members: Vec<usize>,
    boundary: usize,
}

impl<'a> Grower<'a> {
    fn new(g: &'a Graph) -> Self {
        let n = g.vertex_count();
        Grower { g, in_x: vec![false; n], hits: vec![0; n], members: Vec::new(), boundary: 0 }
    }

    fn add(&mut self, v: usize) {
        if self.hits[v] > 0 {
            self.boundary -= 1;
        }
        self.in_x[v] = true;
        self.members.push(v);
        for &w in self.g.neighbors(v) {
            self.hits[w] += 1;
            if self.hits[w] == 1 && !self.in_x[w] {
                self.boundary += 1;
            }
        }
    }

    fn witness(&self) -> VertexSet {
        self.members.iter().copied().collect()
    }
}

fn verify_sampled(g: &Graph, p: &ExpansionProfile, trials: usize, seed: u64) -> ExpanderVerdict {
    let n = g.vertex_count();
    let (lo, hi) = p.size_range(n);
    let mut checked = 0u64;
    if lo > hi {
        return ExpanderVerdict { status: VerdictStatus::SampledOk, witness: None, sets_checked: 0 };
    }
    let refuted = |w: VertexSet, checked| ExpanderVerdict {
        status: VerdictStatus::Refuted,
        witness: Some(w),
        sets_checked: checked,
    };

    for comp in g.components() {
        if (lo..=hi).contains(&comp.len()) {
            checked += 1;
            let x: VertexSet = comp.into_iter().collect();
            if p.violates(x.len(), external_neighborhood_unchecked(g, &x).len()) {
                return refuted(x, checked);
            }
        }
    }

    let mut by_degree: Vec<usize> = g.vertices().collect();
    by_degree.sort_by_key(|&v| (g.degree(v), v));
    let mut grow = Grower::new(g);
    for &v in by_degree.iter().take(hi) {
        grow.add(v);
        let size = grow.members.len();
        if size >= lo {
            checked += 1;
            if p.violates(size, grow.boundary) {
                return refuted(grow.witness(), checked);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let root = rng.gen_range(0..n);
        let mut grow = Grower::new(g);
        let mut frontier = vec![root];
        let mut queued = vec![false; n];
        queued[root] = true;
        while grow.members.len() < hi {
            let v = if frontier.is_empty() {
                // jump to a fresh vertex so disconnected sets are sampled too
                match (0..n).filter(|&v| !queued[v]).collect::<Vec<_>>().choose(&mut rng) {
                    Some(&v) => {
                        queued[v] = true;
                        v
                    }
                    None => break,
                }
            } else {
                let i = rng.gen_range(0..frontier.len());
                frontier.swap_remove(i)
            };
            grow.add(v);
            for &w in g.neighbors(v) {
                if !queued[w] {
                    queued[w] = true;
                    frontier.push(w);
                }
            }
            let size = grow.members.len();
            if size >= lo {
                checked += 1;
                if p.violates(size, grow.boundary) {
                    return refuted(grow.witness(), checked);
                }
            }
        }
    }
    ExpanderVerdict { status: VerdictStatus::SampledOk, witness: None, sets_checked: checked }
}

/// Verification depth used by extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtractOptions {
    pub exhaustive_cap: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP, trials: 100, seed: 0 }
    }
}

impl ExtractOptions {
    fn mode_for(&self, n: usize) -> VerifyMode {
        if n <= self.exhaustive_cap.min(63) {
            VerifyMode::Exhaustive { cap: self.exhaustive_cap }
        } else {
            VerifyMode::Sampled { trials: self.trials, seed: self.seed }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    /// `H` with ids lifted to the input graph.
    pub sub: Subgraph,
    pub verdict: ExpanderVerdict,
}

pub fn extract_expander(g: &Graph, p: &ExpansionProfile) -> Result<Extraction> {
    extract_expander_with(g, p, ExtractOptions::default())
}

/// Peels low-degree vertices (each removal strictly raises the average
/// degree) and, on a refuting set `X`, recurses into `H[X ∪ N(X)]` or `H - X`
/// whenever that keeps the average degree at least `d(G)/2`.
pub fn extract_expander_with(g: &Graph, p: &ExpansionProfile, opts: ExtractOptions) -> Result<Extraction> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let floor = g.average_degree() / 2;
    let mut h = peel_below_half(&Subgraph::identity(g));
    loop {
        let verdict = verify_expander(&h.graph, p, opts.mode_for(h.graph.vertex_count()))?;
        let Some(x) = verdict.witness.clone() else {
            return Ok(finish(g, h, verdict, floor));
        };
        let closed = x.union(&external_neighborhood_unchecked(&h.graph, &x));
        let order = h.graph.vertex_count();
        let candidates = [graph::induced(&h.graph, &closed)?, graph::delete(&h.graph, &x)?];
        let next = candidates
            .into_iter()
            .filter(|c| c.graph.vertex_count() < order && !c.graph.is_empty())
            .map(|c| peel_below_half(&c))
            .filter(|c| !c.graph.is_empty() && c.graph.average_degree() >= floor)
            .max_by(|a, b| {
                a.graph
                    .average_degree()
                    .cmp(&b.graph.average_degree())
                    .then(b.graph.vertex_count().cmp(&a.graph.vertex_count()))
            });
        match next {
            Some(c) => h = h.compose(c),
            None => return Ok(finish(g, h, verdict, floor)),
        }
    }
}

fn finish(g: &Graph, h: Subgraph, verdict: ExpanderVerdict, floor: Rational64) -> Extraction {
    let d = h.graph.average_degree();
    assert!(d >= floor, "extraction lost too much density");
    assert!(Rational64::from_integer(h.graph.min_degree() as i64) * 2 >= d || h.graph.edge_count() == 0);
    let witness = verdict.witness.as_ref().map(|w| h.lift_set(w));
    let verdict = ExpanderVerdict { witness, ..verdict };
    debug_assert!(h.parent.iter().all(|&v| v < g.vertex_count()));
    Extraction { sub: h, verdict }
}

/// Removes vertices of degree below `d(H)/2` one at a time (lowest degree,
/// then lowest id) until none remain.
fn peel_below_half(h: &Subgraph) -> Subgraph {
    let g = &h.graph;
    let n = g.vertex_count();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
    let mut edges = g.edge_count();
    let mut order = n;
    while let Some(v) = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (deg[v], v)) {
        // deg < d/2 = edges / order
        if deg[v] * order >= edges {
            break;
        }
        alive[v] = false;
        order -= 1;
        edges -= deg[v];
        for &w in g.neighbors(v) {
            if alive[w] {
                deg[w] -= 1;
            }
        }
    }
    let keep: VertexSet = (0..n).filter(|&v| alive[v]).collect();
    h.compose(graph::induced(g, &keep).expect("ids in range"))
}

/// A bipartite expander with its bipartition in local ids of `sub.graph`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteExpander {
    pub sub: Subgraph,
    pub left: VertexSet,
    pub right: VertexSet,
    pub verdict: ExpanderVerdict,
}

/// Bipartite half, then expander extraction, then the `ceil(d)`-core.
/// Requires `d(G) >= 8d`.
pub fn extract_bipartite_expander(
    g: &Graph,
    d: Rational64,
    p: &ExpansionProfile,
    opts: ExtractOptions,
) -> Result<BipartiteExpander> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let dg = g.average_degree();
    if dg < d * 8 {
        return Err(Error::DensityTooLow { actual: dg.to_string(), required: (d * 8).to_string() });
    }
    let half = bipartite_half(g)?;
    let ext = extract_expander_with(&half.graph, p, opts)?;
    let t = d.ceil().to_integer().max(0) as usize;
    let core = graph::min_degree_peel(&ext.sub.graph, t);
    let sub = ext.sub.compose(core);
    let left = (0..sub.graph.vertex_count()).filter(|&v| half.left.contains(sub.parent[v])).collect();
    let right = (0..sub.graph.vertex_count()).filter(|&v| half.right.contains(sub.parent[v])).collect();
    assert!(Rational64::from_integer(sub.graph.min_degree() as i64) >= d || sub.graph.is_empty());
    Ok(BipartiteExpander { sub, left, right, verdict: ext.verdict })
}

/// For `K_{s,t}`-free hosts: a profile with `k = eps2 * d^{s/(s-1)}` is
/// re-expressed with `k' = eps2 * d`.
pub fn kst_free_profile_transform(p: &ExpansionProfile, d: Rational64, s: u32, t: u32) -> Result<ExpansionProfile> {
    if !(t >= s && s >= 2) {
        return Err(invalid(format!("need t >= s >= 2, got s = {s}, t = {t}")));
    }
    if d <= Rational64::zero() {
        return Err(invalid("d must be positive"));
    }
    let d = d.to_f64().unwrap();
    let eps2 = p.k / d.powf(s as f64 / (s as f64 - 1.0));
    if !(eps2 > 0.0 && eps2 < 1.0 / (1e5 * t as f64)) {
        return Err(invalid(format!("implied eps2 = {eps2} outside (0, 1/(10^5 t))")));
    }
    ExpansionProfile::new(p.epsilon1, eps2 * d)
}
