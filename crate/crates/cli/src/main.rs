mod json;

use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use balsub::assembler::{top_level, DeskOverrides, KappaRule, Outcome, RunConfig};
use balsub::certify::verify_subdivision;
use balsub::drc::{drc_select, DrcParams};
use balsub::expander::{verify_expander, ExpansionProfile, VerifyMode};
use balsub::gadgets::{
    adjuster_length_menu, build_hub, build_simple_adjuster, build_unit, validate_adjuster, validate_expansion, validate_hub,
    validate_octopus, validate_unit, Adjuster, Expansion, Hub, Octopus, Unit, UnitParams,
};
use balsub::io::{parse_edge_list, write_edge_list};
use balsub::{generators, Graph, SubdivisionCertificate, ValidationReport, VertexSet};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "balsub", version, about = "Balanced clique subdivisions: generate, search, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a generated graph as a canonical edge list.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Search for a balanced clique subdivision.
    Find(FindArgs),
    /// Check a certificate against a graph.
    Verify { graph: PathBuf, certificate: PathBuf },
    /// Check the expansion property.
    Expander(ExpanderArgs),
    /// Build or check a gadget.
    Gadget {
        #[command(subcommand)]
        action: GadgetAction,
    },
    /// Dependent random choice on a bipartite host.
    Drc(DrcArgs),
}

#[derive(Subcommand)]
enum Family {
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        seed: u64,
    },
    BipartiteGnp {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        seed: u64,
    },
    Kdd {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        copies: usize,
    },
    Hypercube {
        #[arg(long)]
        dim: u32,
    },
    Cycle {
        #[arg(long)]
        n: usize,
    },
    IncidencePlane {
        #[arg(long)]
        q: usize,
    },
    Complete {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Desk,
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum KappaArg {
    Sqrt,
    Linear,
}

#[derive(Args)]
struct FindArgs {
    /// Edge list; standard input when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "desk")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    epsilon1: Option<f64>,
    #[arg(long)]
    epsilon2: Option<f64>,
    #[arg(long, value_enum, default_value = "sqrt")]
    kappa: KappaArg,
    #[arg(long)]
    override_m: Option<usize>,
    #[arg(long)]
    override_ell: Option<usize>,
    #[arg(long = "override-D")]
    override_d: Option<usize>,
    #[arg(long)]
    k_target: Option<usize>,
    #[arg(long)]
    exhaustive_cap: Option<usize>,
    /// Also write the pipeline trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyArg {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
struct ExpanderArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    epsilon1: f64,
    #[arg(long)]
    k: f64,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: VerifyArg,
    #[arg(long, default_value_t = 22)]
    exhaustive_cap: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Kind {
    Hub,
    Unit,
    Adjuster,
    Expansion,
    Octopus,
}

#[derive(Subcommand)]
enum GadgetAction {
    Build(BuildArgs),
    Check {
        #[arg(value_enum)]
        kind: Kind,
        graph: PathBuf,
        gadget: PathBuf,
    },
}

#[derive(Args)]
struct BuildArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    h0: usize,
    #[arg(long, default_value_t = 1)]
    h1: usize,
    #[arg(long, default_value_t = 1)]
    h2: usize,
    #[arg(long, default_value_t = 1)]
    h3: usize,
    #[arg(long = "D", default_value_t = 1)]
    big_d: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long)]
    c4: bool,
}

#[derive(Args)]
struct DrcArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    t: u32,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    c: usize,
    #[arg(long)]
    a: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    retries: usize,
    /// `V1 = 0..split`; the two-colouring decides the sides when absent.
    #[arg(long)]
    split: Option<usize>,
}

/// A problem with the invocation or its inputs (exit 2).
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

type Run = Result<ExitCode, Usage>;

fn read_text(path: &Option<PathBuf>) -> Result<String, Usage> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Usage(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn read_graph(path: &Option<PathBuf>) -> Result<Graph, Usage> {
    Ok(parse_edge_list(&read_text(path)?)?)
}

fn exit_for(passed: bool) -> ExitCode {
    ExitCode::from(if passed { 0 } else { 1 })
}

fn report_failures(r: &ValidationReport) {
    for c in r.failures() {
        eprintln!("{}: {}", c.id, c.detail.as_deref().unwrap_or("failed"));
    }
}

fn cmd_gen(family: Family) -> Run {
    let g = match family {
        Family::Gnp { n, p, seed } => generators::gnp(n, p, seed)?,
        Family::BipartiteGnp { n1, n2, p, seed } => generators::bipartite_gnp(n1, n2, p, seed)?,
        Family::Kdd { d, copies } => generators::kdd(d, copies),
        Family::Hypercube { dim } => generators::hypercube(dim),
        Family::Cycle { n } => generators::cycle(n)?,
        Family::IncidencePlane { q } => generators::incidence_plane(q)?,
        Family::Complete { n } => generators::complete(n),
    };
    print!("{}", write_edge_list(&g));
    Ok(ExitCode::SUCCESS)
}

fn run_config(a: &FindArgs) -> Result<RunConfig, Usage> {
    let mut cfg = match a.mode {
        ModeArg::Desk => RunConfig::desk(),
        ModeArg::Paper => {
            if a.override_m.is_some() || a.override_ell.is_some() || a.override_d.is_some() || a.k_target.is_some() {
                return Err(Usage("overrides only apply in desk mode".into()));
            }
            RunConfig::paper()
        }
    };
    cfg.seed = a.seed;
    cfg.kappa_rule = match a.kappa {
        KappaArg::Sqrt => KappaRule::SqrtD,
        KappaArg::Linear => KappaRule::LinearD,
    };
    if let Some(e) = a.epsilon1 {
        cfg.epsilon1 = e;
    }
    if let Some(e) = a.epsilon2 {
        cfg.epsilon2 = e;
    }
    if let Some(c) = a.exhaustive_cap {
        cfg.exhaustive_cap = c;
    }
    if let Some(o) = cfg.overrides.as_mut() {
        let d = DeskOverrides::default();
        o.m = a.override_m.unwrap_or(d.m);
        o.ell = a.override_ell;
        o.adjuster_size = a.override_d.unwrap_or(d.adjuster_size);
        o.k_target = a.k_target;
    }
    Ok(cfg)
}

fn cmd_find(a: FindArgs) -> Run {
    let g = read_graph(&a.input)?;
    let cfg = run_config(&a)?;
    let result = top_level(&g, &cfg)?;
    if let Some(path) = &a.trace {
        fs::write(path, json::render(&result.trace) + "\n")?;
    }
    match result.outcome.certificate() {
        Some(cert) => {
            assert!(verify_subdivision(&g, cert).passed, "emitted certificate must verify");
            println!("{}", cert.to_json());
            Ok(ExitCode::SUCCESS)
        }
        None => {
            let reason = match &result.outcome {
                Outcome::Failure { reason } => reason.clone(),
                _ => "sparse regime: no dense-case construction applies".to_string(),
            };
            let out = json!({ "outcome": result.outcome, "reason": reason, "trace": result.trace });
            println!("{}", json::render(&out));
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_verify(graph: PathBuf, certificate: PathBuf) -> Run {
    let g = read_graph(&Some(graph))?;
    let cert = SubdivisionCertificate::from_json(&read_text(&Some(certificate))?)?;
    let report = verify_subdivision(&g, &cert);
    report_failures(&report);
    Ok(exit_for(report.passed))
}

fn cmd_expander(a: ExpanderArgs) -> Run {
    let g = read_graph(&a.input)?;
    let p = ExpansionProfile::new(a.epsilon1, a.k)?;
    let (mode, mode_name) = match a.mode {
        VerifyArg::Exhaustive => (VerifyMode::Exhaustive { cap: a.exhaustive_cap }, "exhaustive"),
        VerifyArg::Sampled => {
            let seed = a.seed.ok_or_else(|| Usage("sampled mode needs --seed".into()))?;
            (VerifyMode::Sampled { trials: a.trials, seed }, "sampled")
        }
    };
    let v = verify_expander(&g, &p, mode)?;
    let flags = json!({
        "epsilon1": a.epsilon1, "k": a.k, "mode": mode_name,
        "exhaustive_cap": a.exhaustive_cap, "trials": a.trials, "seed": a.seed,
    });
    println!("{}", json::render(&json!({ "flags": flags, "verdict": v })));
    Ok(ExitCode::SUCCESS)
}

fn cmd_gadget_build(a: BuildArgs) -> Run {
    let g = read_graph(&a.input)?;
    let none = VertexSet::new();
    let flags = json!({
        "h0": a.h0, "h1": a.h1, "h2": a.h2, "h3": a.h3, "D": a.big_d, "m": a.m, "c4": a.c4,
    });
    let built = match a.kind {
        Kind::Hub => build_hub(&g, &none, a.h1, a.h2, a.c4).map(|h| json!({ "kind": "hub", "gadget": h })),
        Kind::Unit => {
            let p = UnitParams { h0: a.h0, h1: a.h1, h2: a.h2, h3: a.h3 };
            build_unit(&g, &none, p).map(|u| json!({ "kind": "unit", "gadget": u }))
        }
        Kind::Adjuster => build_simple_adjuster(&g, &none, a.big_d, a.m, a.c4).map(|adj| {
            let menu = adjuster_length_menu(&g, &adj).map(|m| m.into_iter().collect::<Vec<_>>()).ok();
            json!({ "kind": "adjuster", "gadget": adj, "menu": menu })
        }),
        Kind::Expansion | Kind::Octopus => return Err(Usage("only hub, unit and adjuster can be built from a graph".into())),
    };
    match built {
        Ok(mut v) => {
            v["flags"] = flags;
            println!("{}", json::render(&v));
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            println!("{}", json::render(&json!({ "flags": flags, "failure": e.to_string() })));
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_gadget_check(kind: Kind, graph: PathBuf, gadget: PathBuf) -> Run {
    let g = read_graph(&Some(graph))?;
    let doc: serde_json::Value = serde_json::from_str(&read_text(&Some(gadget))?)?;
    let body = doc.get("gadget").cloned().unwrap_or(doc);
    let report = match kind {
        Kind::Hub => validate_hub(&g, &serde_json::from_value::<Hub>(body)?),
        Kind::Unit => validate_unit(&g, &serde_json::from_value::<Unit>(body)?),
        Kind::Adjuster => validate_adjuster(&g, &serde_json::from_value::<Adjuster>(body)?),
        Kind::Expansion => validate_expansion(&g, &serde_json::from_value::<Expansion>(body)?),
        Kind::Octopus => validate_octopus(&g, &serde_json::from_value::<Octopus>(body)?),
    };
    report_failures(&report);
    println!("{}", json::render(&report));
    Ok(exit_for(report.passed))
}

fn cmd_drc(a: DrcArgs) -> Run {
    let g = read_graph(&a.input)?;
    let (v1, v2): (VertexSet, VertexSet) = match a.split {
        Some(s) => (g.vertices().filter(|&v| v < s).collect(), g.vertices().filter(|&v| v >= s).collect()),
        None => {
            let colour = g.two_coloring().ok_or_else(|| Usage("host is not bipartite".into()))?;
            (g.vertices().filter(|&v| colour[v] == 0).collect(), g.vertices().filter(|&v| colour[v] == 1).collect())
        }
    };
    let p = DrcParams::new(a.t, a.r, a.c, a.a)?;
    let flags = json!({ "t": a.t, "r": a.r, "c": a.c, "a": a.a, "seed": a.seed, "retries": a.retries, "split": a.split });
    match drc_select(&g, &v1, &v2, &p, a.seed, a.retries) {
        Ok(a0) => {
            println!("{}", json::render(&json!({ "flags": flags, "a0": a0 })));
            Ok(ExitCode::SUCCESS)
        }
        Err(balsub::drc::DrcError::Invalid(e)) => Err(Usage(e.to_string())),
        Err(e) => {
            println!("{}", json::render(&json!({ "flags": flags, "failure": e.to_string() })));
            Ok(ExitCode::from(1))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.command {
        Command::Gen { family } => cmd_gen(family),
        Command::Find(a) => cmd_find(a),
        Command::Verify { graph, certificate } => cmd_verify(graph, certificate),
        Command::Expander(a) => cmd_expander(a),
        Command::Gadget { action: GadgetAction::Build(a) } => cmd_gadget_build(a),
        Command::Gadget { action: GadgetAction::Check { kind, graph, gadget } } => cmd_gadget_check(kind, graph, gadget),
        Command::Drc(a) => cmd_drc(a),
    };
    match run {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {}", msg.lines().next().unwrap_or("invalid input"));
            ExitCode::from(2)
        }
    }
}
