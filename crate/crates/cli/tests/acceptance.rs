//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use balsub::assembler::{derive_config, find_balanced_subdivision, top_level, KappaRule, RunConfig, TraceEntry};
use balsub::certify::{best_balanced_clique, max_k_at_length, verify_subdivision};
use balsub::connector::{diameter_bound, robust_budget};
use balsub::drc::{dense_tk2, drc_feasible, drc_select, kst_degree_bound, DrcParams};
use balsub::expander::{epsilon_of, extract_expander, verify_expander, ExpansionProfile, VerdictStatus, VerifyMode};
use balsub::gadgets::{
    build_hub, build_octopus, build_simple_adjuster, build_unit, grow_expansion, link_adjusters, validate_adjuster,
    validate_expansion, validate_hub, validate_octopus, validate_unit, UnitParams,
};
use balsub::graph::external_neighborhood;
use balsub::{generators, io, Graph, SubdivisionCertificate, VertexSet};
use itertools::Itertools;
use num_rational::Rational64;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

struct Scratch(PathBuf);

impl Scratch {
    fn new() -> Self {
        let dir = std::env::temp_dir().join(format!("balsub-acceptance-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.join(name);
        fs::write(&p, text).unwrap();
        p
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn balsub(args: &[&str], stdin: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_balsub"));
    cmd.args(args);
    cmd.stdin(match stdin {
        Some(p) => Stdio::from(fs::File::open(p).unwrap()),
        None => Stdio::null(),
    });
    cmd.output().expect("binary runs")
}

fn text(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ac1(s: &Scratch) -> Check {
    let mut slowest = Duration::ZERO;
    let mut ks = Vec::new();
    for (d, need) in [(4usize, 3usize), (9, 4), (16, 6)] {
        let g = s.write(&format!("kdd{d}.txt"), &text(&balsub(&["gen", "kdd", "--d", &d.to_string(), "--copies", "2"], None)));
        let mut least = usize::MAX;
        for seed in 0..10 {
            let t = Instant::now();
            let out = balsub(&["find", "--mode", "desk", "--seed", &seed.to_string()], Some(&g));
            let took = t.elapsed();
            slowest = slowest.max(took);
            ensure(out.status.success(), || format!("d={d} seed={seed}: exit {:?}", out.status.code()))?;
            ensure(took < Duration::from_secs(30), || format!("d={d} seed={seed}: {took:?}"))?;
            let cert = SubdivisionCertificate::from_json(&text(&out)).map_err(|e| format!("d={d}: {e}"))?;
            let path = s.write("cert.json", &text(&out));
            let v = balsub(&["verify", g.to_str().unwrap(), path.to_str().unwrap()], None);
            ensure(v.status.success(), || format!("d={d} seed={seed}: verify rejected the certificate"))?;
            ensure(cert.k() >= need, || format!("d={d} seed={seed}: k={} < {need}", cert.k()))?;
            least = least.min(cert.k());
        }
        if d == 4 {
            let best = best_balanced_clique(&generators::complete_bipartite(4, 4), 5_000_000).ok_or("oracle found nothing")?;
            ensure(best.complete && best.k == least, || format!("K4,4 oracle k={} vs pipeline k={least}", best.k))?;
        }
        ks.push(least);
    }
    Ok(format!("min k over seeds {ks:?}, slowest run {:.2}s", slowest.as_secs_f64()))
}

fn ac2() -> Check {
    let t = Instant::now();
    for (n, want) in [(10usize, 4usize), (15, 5), (21, 6)] {
        let g = generators::complete(n);
        let c = dense_tk2(&g, want, 0).map_err(|e| format!("K{n} k={want}: {e}"))?;
        ensure(c.ell == 2 && c.k() == want, || format!("K{n}: got k={} ell={}", c.k(), c.ell))?;
        ensure(verify_subdivision(&g, &c).passed, || format!("K{n}: certificate rejected"))?;
        ensure(dense_tk2(&g, want + 1, 0).is_err(), || format!("K{n}: k={} should not fit", want + 1))?;
    }
    let (best, complete) = max_k_at_length(&generators::complete(10), 2, 50_000_000);
    let best = best.map_or(0, |(k, _)| k);
    ensure(complete && best == 4, || format!("K10 oracle at length 2 gives {best} (complete={complete})"))?;
    let took = t.elapsed();
    ensure(took < Duration::from_secs(5), || format!("took {took:?}"))?;
    Ok(format!("k = 4, 5, 6 on K10, K15, K21; oracle agrees on K10; {:.2}s", took.as_secs_f64()))
}

fn ac3() -> Check {
    let desk = RunConfig::desk();
    let mut produced = 0;
    let mut violations = Vec::new();
    for seed in 0..200u64 {
        let n = 3 + (seed % 6) as usize;
        let p = 0.3 + 0.1 * (seed % 7) as f64;
        let g = generators::gnp(n, p, seed).unwrap();
        let mut certs = Vec::new();
        for k in 2..=4 {
            certs.extend(dense_tk2(&g, k, seed).ok());
        }
        certs.extend(find_balanced_subdivision(&g, &desk).ok().map(|a| a.certificate));
        certs.extend(top_level(&g, &desk).unwrap().outcome.certificate().cloned());
        for c in certs {
            produced += 1;
            if !verify_subdivision(&g, &c).passed {
                violations.push(format!("seed {seed}: certificate rejected"));
            }
            let (best, _) = max_k_at_length(&g, c.ell, 10_000_000);
            let best = best.map_or(0, |(k, _)| k);
            if c.k() > best {
                violations.push(format!("seed {seed}: k={} above oracle {best} at ell={}", c.k(), c.ell));
            }
        }
    }
    ensure(violations.is_empty(), || violations.join("; "))?;
    Ok(format!("{produced} certificates over 200 graphs, zero violations"))
}

fn brute_refutes(g: &Graph, p: &ExpansionProfile) -> bool {
    let n = g.vertex_count();
    let (lo, hi) = p.size_range(n);
    (1u32..1 << n).any(|mask| {
        let size = mask.count_ones() as usize;
        if size < lo || size > hi {
            return false;
        }
        let boundary = (0..n)
            .filter(|&w| mask >> w & 1 == 0 && g.neighbors(w).iter().any(|&u| mask >> u & 1 == 1))
            .count();
        (boundary as f64) < p.eps(size as f64) * size as f64
    })
}

fn ac4() -> Check {
    let mut corpus = Vec::new();
    for i in 0..70u64 {
        corpus.push(generators::gnp(10 + (i as usize % 40), 0.05 + 0.01 * (i % 20) as f64, i).unwrap());
    }
    for d in 2..10 {
        corpus.push(generators::kdd(d, 2));
        corpus.push(generators::complete(d + 3));
    }
    for q in [2, 3, 5] {
        corpus.push(generators::incidence_plane(q).unwrap());
    }
    for dim in 2..7 {
        corpus.push(generators::hypercube(dim));
    }
    for n in 5..13 {
        corpus.push(generators::cycle(n).unwrap());
    }
    corpus.push(generators::disjoint_union(&[generators::complete(6), generators::cycle(9).unwrap()]));
    corpus.truncate(100);
    let profiles = [(0.5, 2.0), (1.0, 4.0), (2.0, 1.0)];
    for (i, g) in corpus.iter().enumerate() {
        if g.edge_count() == 0 {
            continue;
        }
        let (e, k) = profiles[i % 3];
        let h = extract_expander(g, &ExpansionProfile::new(e, k).unwrap()).map_err(|e| e.to_string())?.sub.graph;
        ensure(h.average_degree() * 2 >= g.average_degree(), || format!("graph {i}: d(H) < d(G)/2"))?;
        ensure(Rational64::from_integer(2 * h.min_degree() as i64) >= h.average_degree(), || {
            format!("graph {i}: min degree below d(H)/2")
        })?;
    }
    let mut refuted = 0;
    for seed in 0..200u64 {
        let n = 1 + (seed % 10) as usize;
        let g = generators::gnp(n, 0.2 + 0.05 * (seed % 12) as f64, 1000 + seed).unwrap();
        let p = ExpansionProfile::new(0.2 + 0.3 * (seed % 5) as f64, 1.0 + (seed % 4) as f64).unwrap();
        let v = verify_expander(&g, &p, VerifyMode::exhaustive()).map_err(|e| e.to_string())?;
        let brute = brute_refutes(&g, &p);
        ensure((v.status == VerdictStatus::Refuted) == brute, || format!("seed {seed}: verdict {:?}, brute {brute}", v.status))?;
        if let Some(w) = &v.witness {
            let b = external_neighborhood(&g, w).unwrap().len();
            ensure((b as f64) < p.eps(w.len() as f64) * w.len() as f64, || format!("seed {seed}: witness does not violate"))?;
            refuted += 1;
        }
    }
    Ok(format!("degree guarantees on {} graphs; exhaustive verdicts match brute force on 200 ({refuted} refuted)", corpus.len()))
}

fn ac5() -> Check {
    let p = DrcParams::new(3, 2, 5, 3).unwrap();
    let v1: VertexSet = (0..60).collect();
    let v2: VertexSet = (60..120).collect();
    let mut ok = 0;
    for seed in 0..100u64 {
        let g = generators::bipartite_gnp(60, 60, 0.5, seed).unwrap();
        let Ok(a0) = drc_select(&g, &v1, &v2, &p, seed, 20) else { continue };
        ensure(a0.len() >= p.a && a0.is_subset(&v1), || format!("seed {seed}: |A0| = {}", a0.len()))?;
        for s in a0.iter().combinations(p.r) {
            let common = v2.iter().filter(|&w| s.iter().all(|&u| g.has_edge(u, w))).count();
            ensure(common >= p.c, || format!("seed {seed}: {s:?} has {common} common neighbours"))?;
        }
        ok += 1;
    }
    ensure(ok >= 95, || format!("only {ok}/100 succeeded"))?;
    let half = Rational64::new(1, 2);
    let at6 = drc_feasible(60, 60, half, &DrcParams::new(3, 2, 5, 6).unwrap()).map_err(|e| e.to_string())?;
    let at7 = drc_feasible(60, 60, half, &DrcParams::new(3, 2, 5, 7).unwrap()).map_err(|e| e.to_string())?;
    ensure(at6 && !at7, || format!("feasibility boundary a=6:{at6} a=7:{at7}"))?;
    Ok(format!("{ok}/100 within 20 retries, all valid; exact boundary at a=6"))
}

fn ac6() -> Check {
    let cfg = RunConfig { kappa_rule: KappaRule::LinearD, ..RunConfig::desk() };
    let t = Instant::now();
    let mut notes = Vec::new();
    for q in [3, 5, 7] {
        let g = generators::incidence_plane(q).unwrap();
        let run = top_level(&g, &cfg).map_err(|e| e.to_string())?;
        let entries = &run.trace.entries;
        ensure(entries.iter().any(|e| matches!(e, TraceEntry::Transform { ok: true, .. })), || format!("q={q}: no transform"))?;
        ensure(run.trace.hubs_validated() >= 1, || format!("q={q}: no validated hub"))?;
        let good = run.trace.adjusters_built().any(|e| {
            matches!(e, TraceEntry::AdjusterBuilt { center: 4, valid: true, parity_consistent: true, .. })
        });
        ensure(good, || format!("q={q}: no valid girth-6 adjuster"))?;
        let mut seen = 0;
        for e in entries {
            if let TraceEntry::KstBound { observed, bound, .. } = e {
                ensure(observed <= bound, || format!("q={q}: observed {observed} > bound {bound}"))?;
                seen += 1;
            }
        }
        let side = g.vertex_count() / 2;
        let own = g.edge_count() as f64 / side as f64;
        ensure(own <= kst_degree_bound(side, side, 2, 2).unwrap(), || format!("q={q}: host exceeds the bound"))?;
        ensure(seen > 0, || format!("q={q}: bound never checked"))?;
        notes.push(format!("q={q}:{}", run.trace.hubs_validated()));
    }
    let took = t.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("validated hubs {}; {:.2}s", notes.join(" "), took.as_secs_f64()))
}

fn ac7() -> Check {
    let mut hosts = vec![
        generators::complete(12),
        generators::complete(20),
        generators::hypercube(5),
        generators::kdd(6, 2),
        generators::incidence_plane(3).unwrap(),
        generators::incidence_plane(5).unwrap(),
        generators::cycle(8).unwrap(),
    ];
    for s in 0..5 {
        hosts.push(generators::gnp(40, 0.25, s).unwrap());
    }
    let mut calls = 0;
    let mut built = 0;
    let mut mutants = 0;
    let mut problems = Vec::new();
    let mut judge = |what: String, valid: bool, mutations: Vec<(&str, bool)>| {
        if !valid {
            problems.push(format!("{what}: build rejected by its validator"));
        }
        for (name, passed) in mutations {
            if passed {
                problems.push(format!("{what}: mutation '{name}' passed"));
            }
        }
    };
    'outer: for round in 0.. {
        for (i, g) in hosts.iter().enumerate() {
            if calls >= 500 {
                break 'outer;
            }
            let n = g.vertex_count();
            let avoid: VertexSet = (0..n).filter(|v| (v + round) % 7 == 0 && round > 0).collect();
            let c4 = round % 2 == 1;
            let (h1, h2) = (1 + round % 3, 1 + round % 2);

            calls += 1;
            if let Ok(hub) = build_hub(g, &avoid, h1, h2, c4) {
                built += 1;
                let mut dup = hub.clone();
                dup.first_layer.push(hub.first_layer[0]);
                let mut own = hub.clone();
                own.second_layers.values_mut().next().unwrap().push(hub.center);
                let mut far = hub.clone();
                far.center = hub.first_layer[0];
                mutants += 3;
                judge(
                    format!("hub host {i} round {round}"),
                    validate_hub(g, &hub).passed,
                    vec![
                        ("repeated first layer", validate_hub(g, &dup).passed),
                        ("center in second layer", validate_hub(g, &own).passed),
                        ("center moved", validate_hub(g, &far).passed),
                    ],
                );
            }

            calls += 1;
            let p = UnitParams { h0: 1 + round % 3, h1: 1, h2: 1, h3: 2 + round % 3 };
            if let Ok(unit) = build_unit(g, &avoid, p) {
                built += 1;
                let mut short = unit.clone();
                short.hubs.pop();
                short.spokes.pop();
                let mut flipped = unit.clone();
                flipped.spokes[0] = flipped.spokes[0].reversed();
                let mut inside = unit.clone();
                inside.core = unit.hubs[0].center;
                mutants += 3;
                judge(
                    format!("unit host {i} round {round}"),
                    validate_unit(g, &unit).passed,
                    vec![
                        ("missing hub", validate_unit(g, &short).passed),
                        ("reversed spoke", validate_unit(g, &flipped).passed),
                        ("core inside a hub", validate_unit(g, &inside).passed),
                    ],
                );
            }

            calls += 1;
            let first = build_simple_adjuster(g, &avoid, 1 + round % 3, 2, c4);
            if let Ok(a) = &first {
                built += 1;
                let mut longer = a.clone();
                longer.steps += 1;
                let mut same = a.clone();
                same.core2 = a.core1;
                let mut overlap = a.clone();
                overlap.center.insert(a.core1);
                mutants += 3;
                judge(
                    format!("adjuster host {i} round {round}"),
                    validate_adjuster(g, a).passed,
                    vec![
                        ("extra step", validate_adjuster(g, &longer).passed),
                        ("equal cores", validate_adjuster(g, &same).passed),
                        ("center meets end", validate_adjuster(g, &overlap).passed),
                    ],
                );
            }

            calls += 1;
            if let Some(f) = grow_expansion(g, round % n, 1 + round % 5, 1 + round % 3, &avoid) {
                built += 1;
                let mut stray = f.clone();
                stray.anchor = (0..n).find(|&v| !f.vertices.contains(v)).unwrap_or(n);
                let mut tight = f.clone();
                tight.radius = 0;
                let mut mutations = vec![("anchor outside", validate_expansion(g, &stray).passed)];
                if f.vertices.len() > 1 {
                    mutations.push(("radius zero", validate_expansion(g, &tight).passed));
                }
                mutants += mutations.len();
                judge(format!("expansion host {i} round {round}"), validate_expansion(g, &f).passed, mutations);
            }

            if let Ok(a) = first {
                let used = avoid.union(&a.vertices());
                calls += 1;
                if let Ok(b) = build_simple_adjuster(g, &used, 1, 2, c4) {
                    calls += 1;
                    if let Ok(l) = link_adjusters(g, &a, &b, &avoid) {
                        built += 1;
                        let mut wrong = l.clone();
                        wrong.end2 = l.end1.clone();
                        mutants += 1;
                        judge(
                            format!("linked host {i} round {round}"),
                            validate_adjuster(g, &l).passed,
                            vec![("ends coincide", validate_adjuster(g, &wrong).passed)],
                        );
                    }
                    calls += 1;
                    if let Ok(o) = build_octopus(g, &[a.clone(), b.clone()], &avoid, 1, 4) {
                        built += 1;
                        let mut bare = o.clone();
                        bare.arm_paths.pop();
                        let mut cramped = o.clone();
                        cramped.max_path_length = 0;
                        mutants += 2;
                        judge(
                            format!("octopus host {i} round {round}"),
                            validate_octopus(g, &o).passed,
                            vec![
                                ("arm path removed", validate_octopus(g, &bare).passed),
                                ("length cap zero", validate_octopus(g, &cramped).passed),
                            ],
                        );
                    }
                }
            }
        }
    }
    ensure(problems.is_empty(), || problems.iter().take(5).join("; "))?;
    ensure(built > 0 && mutants > 0, || "nothing was built".into())?;
    Ok(format!("{calls} invocations, {built} builds validated, {mutants} violations all detected"))
}

fn close(got: f64, want: f64, what: &str) -> Result<(), String> {
    ensure((got - want).abs() <= 1e-9, || format!("{what}: {got} vs {want}"))
}

fn ac8() -> Check {
    let prof = |e: f64, k: f64| ExpansionProfile::new(e, k).unwrap();
    close(epsilon_of(1.0, &prof(0.5, 10.0)).unwrap(), 0.0, "eps below k/5")?;
    let ln15 = 15f64.ln();
    close(epsilon_of(15.0, &prof(1.0, 15.0)).unwrap(), 1.0 / (ln15 * ln15), "eps(15)")?;
    close(epsilon_of(15.0, &prof(1.0, 15.0)).unwrap(), 0.136_359_869_886_665_26, "eps(15) literal")?;
    let ln3 = 3f64.ln();
    close(epsilon_of(1.0, &prof(1.0, 5.0)).unwrap(), 1.0 / (ln3 * ln3), "eps at k/5")?;
    close(epsilon_of(1.0, &prof(1.0, 5.0)).unwrap(), 0.828_535_449_690_223, "eps at k/5 literal")?;

    let want = (ln15.powi(3)).ceil() as u64;
    ensure(diameter_bound(&prof(2.0, 3.0), 3) == want, || "diameter at n=k".into())?;
    ensure(diameter_bound(&prof(1e12, 3.0), 30) == 1, || "diameter clamp".into())?;
    let want = (2.0 * 225f64.ln().powi(3)).ceil() as u64;
    let got = diameter_bound(&prof(1.0, 4.0), 60);
    ensure(got == want && want == 318, || format!("diameter at n=15k: {got} vs {want}"))?;

    let p = prof(1.0, 15.0);
    ensure(robust_budget(2, &p) == 0 && robust_budget(15, &p) == 0, || "budget small".into())?;
    let x = 1_000_000f64;
    let want = (x / (15.0 * x / 15.0).ln().powi(2) / 4.0).floor() as u64;
    ensure(robust_budget(1_000_000, &p) == want, || format!("budget at 1e6: {} vs {want}", robust_budget(1_000_000, &p)))?;

    let paper = RunConfig::paper();
    let kappa = 1e5f64;
    let n = (std::f64::consts::E * kappa * kappa).round() as usize;
    let c = derive_config(n, Rational64::from_integer(10_000_000_000), &paper).map_err(|e| e.to_string())?;
    ensure(c.m == 82, || format!("m = {}", c.m))?;
    close(c.kappa, kappa, "sqrt kappa")?;
    close(derive_config(1000, Rational64::from_integer(100), &paper).unwrap().kappa, 10.0, "kappa d=100")?;
    let lin = RunConfig { kappa_rule: KappaRule::LinearD, ..paper };
    close(derive_config(1000, Rational64::from_integer(7), &lin).unwrap().kappa, 7.0, "linear kappa")?;
    Ok("epsilon, diameter, budget and config values within 1e-9; m = 82".into())
}

fn ac9(s: &Scratch) -> Check {
    let kdd4 = s.write("d-kdd4.txt", &io::write_edge_list(&generators::kdd(4, 2)));
    let kdd9 = s.write("d-kdd9.txt", &io::write_edge_list(&generators::kdd(9, 2)));
    let c9 = s.write("d-c9.txt", &io::write_edge_list(&generators::cycle(9).unwrap()));
    let c6 = s.write("d-c6.txt", &io::write_edge_list(&generators::cycle(6).unwrap()));
    let plane = s.write("d-plane.txt", &io::write_edge_list(&generators::incidence_plane(3).unwrap()));
    let twice = generators::disjoint_union(&[generators::complete(4), generators::complete(4)]);
    let twice = s.write("d-twice.txt", &io::write_edge_list(&twice));
    let noisy = s.write("d-gnp.txt", &io::write_edge_list(&generators::gnp(40, 0.2, 3).unwrap()));
    let bip = s.write("d-bip.txt", &io::write_edge_list(&generators::bipartite_gnp(60, 60, 0.5, 1).unwrap()));
    let empty = s.write("d-empty.txt", "");
    let c9cert = s.write("d-c9.json", &text(&balsub(&["find", "--k-target", "3", "--override-ell", "3", "--input", c9.to_str().unwrap()], None)));
    let p = |x: &PathBuf| x.to_str().unwrap().to_string();
    let runs: Vec<(Vec<String>, Option<&PathBuf>)> = vec![
        (vec!["gen", "kdd", "--d", "4", "--copies", "2"].into_iter().map(String::from).collect(), None),
        (vec!["gen", "gnp", "--n", "30", "--p", "0.2", "--seed", "5"].into_iter().map(String::from).collect(), None),
        (vec!["gen", "incidence-plane", "--q", "3"].into_iter().map(String::from).collect(), None),
        (vec!["find".into(), "--mode".into(), "desk".into(), "--seed".into(), "7".into()], Some(&kdd4)),
        (vec!["find".into(), "--mode".into(), "desk".into(), "--seed".into(), "7".into()], Some(&kdd9)),
        (vec!["find".into(), "--k-target".into(), "3".into(), "--override-ell".into(), "3".into(), "--input".into(), p(&c9)], None),
        (vec!["find".into(), "--kappa".into(), "linear".into(), "--seed".into(), "1".into(), "--input".into(), p(&plane)], None),
        (vec!["find".into(), "--input".into(), p(&empty)], None),
        (vec!["verify".into(), p(&c9), p(&c9cert)], None),
        (vec!["expander".into(), "--mode".into(), "exhaustive".into(), "--epsilon1".into(), "1".into(), "--k".into(), "2".into(), "--input".into(), p(&twice)], None),
        (vec!["expander".into(), "--mode".into(), "sampled".into(), "--seed".into(), "3".into(), "--epsilon1".into(), "0.5".into(), "--k".into(), "4".into(), "--input".into(), p(&noisy)], None),
        (vec!["gadget".into(), "build".into(), "adjuster".into(), "--input".into(), p(&c6)], None),
        (vec!["gadget".into(), "build".into(), "hub".into(), "--h1".into(), "2".into(), "--h2".into(), "1".into(), "--input".into(), p(&noisy)], None),
        (
            ["drc", "--t", "3", "--r", "2", "--c", "5", "--a", "3", "--seed", "1", "--split", "60", "--input"]
                .into_iter()
                .map(String::from)
                .chain([p(&bip)])
                .collect(),
            None,
        ),
    ];
    for (args, stdin) in &runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let outs: Vec<Output> = (0..3).map(|_| balsub(&args, stdin.map(|x| x.as_path()))).collect();
        let same = outs
            .windows(2)
            .all(|w| w[0].stdout == w[1].stdout && w[0].stderr == w[1].stderr && w[0].status.code() == w[1].status.code());
        ensure(same, || format!("`{}` differs between runs", args.join(" ")))?;
        ensure(outs[0].status.code() != Some(2), || format!("`{}` was a usage error", args.join(" ")))?;
    }
    Ok(format!("{} commands byte-identical over 3 runs", runs.len()))
}

fn main() {
    let scratch = Scratch::new();
    let checks: Vec<Criterion> = vec![
        ("AC-1", Box::new(|| ac1(&scratch))),
        ("AC-2", Box::new(ac2)),
        ("AC-3", Box::new(ac3)),
        ("AC-4", Box::new(ac4)),
        ("AC-5", Box::new(ac5)),
        ("AC-6", Box::new(ac6)),
        ("AC-7", Box::new(ac7)),
        ("AC-8", Box::new(ac8)),
        ("AC-9", Box::new(|| ac9(&scratch))),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("{name} PASS: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{name} FAIL: {detail}");
            }
        }
    }
    drop(scratch);
    if failed > 0 {
        std::process::exit(1);
    }
}
