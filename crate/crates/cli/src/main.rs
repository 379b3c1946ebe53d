use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use barfill_core::family::{asymp_probe, FamilyKind, GroupFamily, Recipe};
use barfill_core::group::{abelianization, derived_subgroup, generators};
use barfill_core::homology::torus_check;
use barfill_core::isoperimetry::{
    check_phi, check_psi, check_psi_recipe, distance_with, isop, FillerSolver, IsopOptions,
};
use barfill_core::linalg::boundary_matrix;
use barfill_core::registry::Registry;
use barfill_core::{selftest, Chain, ChainJson, Error, FiniteGroup, GroupSpec, Modulus};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod config;

use config::{Format, RunConfig, CONFIG_ENV};

const EXIT_FAILED: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_REFUSED: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_MALFORMED: u8 = 65;

#[derive(Parser)]
#[command(name = "barfill", version, about = "Bar-complex homology, filler norms and isoperimetry for finite groups")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Common {
    /// key = value file; defaults to $BARFILL_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    order_cap: Option<u64>,
    #[arg(long, global = true)]
    tuple_cap: Option<u64>,
    #[arg(long, global = true)]
    census_cap: Option<u64>,
    /// Search node budget.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[arg(long, global = true)]
    weight_ceiling: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
struct Target {
    #[arg(long)]
    group: String,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    l: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Summary of a group.
    Group {
        #[arg(long)]
        group: String,
        /// List every element.
        #[arg(long)]
        elements: bool,
    },
    /// Dimension and minimal representatives of H_n(G; Z/l).
    Homology {
        #[command(flatten)]
        target: Target,
        /// Write d_n and d_{n+1} in Matrix Market format to <PREFIX>.d<k>.mtx.
        #[arg(long, value_name = "PREFIX")]
        dump_matrix: Option<PathBuf>,
    },
    /// Filler norm of a boundary, or filler distance of two cycles.
    Fillnorm {
        /// Chain JSON file, `-` for standard input.
        #[arg(long, conflicts_with = "recipe")]
        chain: Option<PathBuf>,
        /// Chain in the recipe language, evaluated over --group.
        #[arg(long)]
        recipe: Option<String>,
        #[arg(long, requires = "recipe")]
        group: Option<String>,
        #[arg(long, default_value_t = 2)]
        l: u32,
        /// Second cycle (file or recipe text, matching the first); reports the distance.
        #[arg(long)]
        other: Option<String>,
    },
    /// isop(K): the largest filler norm over boundaries of size K.
    Isop {
        #[command(flatten)]
        target: Target,
        #[arg(long = "K")]
        k: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// The sentence Phi_{K,K1,K2}.
    Phi {
        #[command(flatten)]
        target: Target,
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "K1")]
        k1: usize,
        #[arg(long = "K2")]
        k2: usize,
    },
    /// The sentence Psi_K; K1 and H default to the isop recipe and dim H_n.
    Psi {
        #[command(flatten)]
        target: Target,
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "K1", requires = "h")]
        k1: Option<usize>,
        #[arg(long = "H", requires = "k1")]
        h: Option<usize>,
    },
    /// Diagonal torus inclusion: index criterion against the induced map.
    TorusCheck {
        #[command(flatten)]
        target: Target,
    },
    /// Filler growth of a recipe boundary across a matrix family.
    Family {
        /// gl:<n>, sl:<n> or torus:<r>.
        #[arg(long)]
        kind: String,
        /// Inclusive range of field sizes, LO..HI.
        #[arg(long, default_value = "2..16")]
        q_range: String,
        /// Keep only q = 1 mod this value.
        #[arg(long)]
        mod_filter: Option<u32>,
        #[arg(long, default_value_t = 2)]
        l: u32,
        #[arg(long)]
        recipe: String,
    },
    /// Run the invariant suites.
    Selftest {
        /// Suite to run; repeat for several. Defaults to all.
        #[arg(long)]
        suite: Vec<String>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Malformed(_) => EXIT_MALFORMED,
        Error::CapExceeded { .. } | Error::BudgetExhausted { .. } => EXIT_REFUSED,
        Error::Internal(_) => EXIT_FAILED,
        _ => EXIT_PRECONDITION,
    }
}

fn load_config(common: &Common) -> barfill_core::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let path = common
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    if let Some(p) = path {
        cfg.apply_file(&p)?;
    }
    let l = &mut cfg.limits;
    if let Some(v) = common.order_cap {
        l.order_cap = v;
    }
    if let Some(v) = common.tuple_cap {
        l.tuple_cap = v;
    }
    if let Some(v) = common.census_cap {
        l.census_cap = v;
    }
    if let Some(v) = common.budget {
        l.node_budget = v;
    }
    if let Some(v) = common.weight_ceiling {
        l.weight_ceiling = v;
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = common.threads {
        cfg.threads = Some(v);
    }
    if let Some(f) = common.format {
        cfg.format = match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn json(v: &impl serde::Serialize) -> Self {
        let mut text = serde_json::to_string_pretty(v).expect("reports serialize");
        text.push('\n');
        Output { text, code: 0 }
    }
}

fn modulus(l: u32) -> barfill_core::Result<Modulus> {
    Modulus::new(l)
}

fn parse_spec(s: &str) -> barfill_core::Result<GroupSpec> {
    s.parse()
}

fn read_chain_json(source: &str) -> barfill_core::Result<ChainJson> {
    let text = if source == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Error::Precondition(format!("reading stdin: {e}")))?
    } else {
        std::fs::read_to_string(source).map_err(|e| Error::Precondition(format!("cannot read {source}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("chain JSON in {source}: {e}")))
}

fn chain_from_file(reg: &Registry, source: &str) -> barfill_core::Result<Chain> {
    let json = read_chain_json(source)?;
    let group = reg.group_str(&json.group)?;
    Chain::from_json(&json, group)
}

fn group_summary(g: &Arc<FiniteGroup>, elements: bool) -> Value {
    let (ab, _) = abelianization(g);
    let gens: Vec<String> = generators(g).into_iter().map(|x| g.label(x)).collect();
    let mut v = json!({
        "group": g.name(),
        "order": g.order(),
        "abelian": g.is_abelian(),
        "generators": gens,
        "derived_order": derived_subgroup(g).len(),
        "abelianization_order": ab.order(),
    });
    if elements {
        let list: Vec<Value> = g
            .elements()
            .map(|x| json!({ "index": x, "label": g.label(x), "order": g.element_order(x) }))
            .collect();
        v["elements"] = Value::Array(list);
    }
    v
}

fn dump_matrices(g: &FiniteGroup, n: usize, l: Modulus, prefix: &Path, cfg: &RunConfig) -> barfill_core::Result<()> {
    for k in [n, n + 1] {
        if k == 0 {
            continue;
        }
        let m = boundary_matrix(g, k, l, cfg.limits.matrix_caps())?;
        let path = PathBuf::from(format!("{}.d{k}.mtx", prefix.display()));
        let file = std::fs::File::create(&path)
            .map_err(|e| Error::Precondition(format!("cannot create {}: {e}", path.display())))?;
        m.write_matrix_market(std::io::BufWriter::new(file))
            .map_err(|e| Error::Precondition(format!("writing {}: {e}", path.display())))?;
    }
    Ok(())
}

fn parse_q_range(s: &str) -> barfill_core::Result<(u32, u32)> {
    let bad = || Error::Malformed(format!("q range `{s}` is not LO..HI"));
    let (lo, hi) = s.split_once("..").or_else(|| s.split_once('-')).ok_or_else(bad)?;
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn run(command: Command, cfg: &RunConfig) -> barfill_core::Result<Output> {
    let reg = Registry::new(cfg.limits);
    let limits = &cfg.limits;
    match command {
        Command::Group { group, elements } => {
            let g = reg.group(&parse_spec(&group)?)?;
            Ok(Output::json(&group_summary(&g, elements)))
        }
        Command::Homology { target, dump_matrix } => {
            let spec = parse_spec(&target.group)?;
            let l = modulus(target.l)?;
            let h = reg.homology(&spec, target.n, l)?;
            if let Some(prefix) = dump_matrix {
                dump_matrices(h.group(), target.n, l, &prefix, cfg)?;
            }
            Ok(Output::json(&h.to_json()))
        }
        Command::Fillnorm { chain, recipe, group, l, other } => {
            let (b, from_recipe) = match (chain, recipe) {
                (Some(path), None) => (chain_from_file(&reg, &path.to_string_lossy())?, None),
                (None, Some(text)) => {
                    let group = group.ok_or_else(|| Error::Precondition("--recipe needs --group".into()))?;
                    let g = reg.group_str(&group)?;
                    let r: Recipe = text.parse()?;
                    (r.evaluate(&g, modulus(l)?)?, Some(g))
                }
                _ => return Err(Error::Precondition("give exactly one of --chain or --recipe".into())),
            };
            let solver = reg.filler_solver(&parse_spec(b.group().name())?, b.degree(), b.modulus())?;
            match other {
                None => Ok(Output::json(&solver.norm(&b)?.to_json())),
                Some(o) => {
                    let z2 = match from_recipe {
                        Some(g) => o.parse::<Recipe>()?.evaluate(&g, b.modulus())?,
                        None => chain_from_file(&reg, &o)?,
                    };
                    let r = distance_with(&solver, &b, &z2)?;
                    Ok(Output::json(&json!({
                        "z1": b.to_json(),
                        "z2": z2.to_json(),
                        "distance": r.filler_size,
                        "exact": r.exact,
                        "witness": r.witness.to_json(),
                        "nodes_explored": r.nodes_explored,
                    })))
                }
            }
        }
        Command::Isop { target, k, mode, samples, checkpoint } => {
            let solver = reg.filler_solver(&parse_spec(&target.group)?, target.n, modulus(target.l)?)?;
            let checkpoint = checkpoint.or_else(|| cfg.checkpoint.clone());
            let opts = IsopOptions {
                sampled: (mode == Mode::Sampled).then_some((samples, cfg.seed)),
                checkpoint: checkpoint.as_deref(),
            };
            let r = isop(&solver, k, limits, &opts)?;
            Ok(Output::json(&json!({
                "group": solver.space().group().name(),
                "n": target.n,
                "l": target.l,
                "result": r,
                "node_budget": limits.node_budget,
                "weight_ceiling": limits.weight_ceiling,
            })))
        }
        Command::Phi { target, k, k1, k2 } => {
            let solver = reg.filler_solver(&parse_spec(&target.group)?, target.n, modulus(target.l)?)?;
            let r = check_phi(&solver, k, k1, k2, limits)?;
            Ok(Output::json(&json!({
                "group": solver.space().group().name(),
                "n": target.n,
                "l": target.l,
                "result": r,
            })))
        }
        Command::Psi { target, k, k1, h } => {
            let spec = parse_spec(&target.group)?;
            let l = modulus(target.l)?;
            let v = match (k1, h) {
                (Some(k1), Some(hb)) => {
                    let hom = reg.homology(&spec, target.n, l)?;
                    let solver = FillerSolver::new(hom.boundaries().clone(), limits)?;
                    json!({ "result": check_psi(&solver, &hom, k, k1, hb, limits)? })
                }
                _ => {
                    let g = reg.group(&spec)?;
                    let (profile, r) = check_psi_recipe(&g, target.n, l, k, limits)?;
                    json!({ "profile": profile, "result": r })
                }
            };
            let mut v = v;
            v["group"] = json!(target.group);
            v["n"] = json!(target.n);
            v["l"] = json!(target.l);
            Ok(Output::json(&v))
        }
        Command::TorusCheck { target } => {
            let g = reg.group(&parse_spec(&target.group)?)?;
            Ok(Output::json(&torus_check(&g, target.n, modulus(target.l)?, limits)?))
        }
        Command::Family { kind, q_range, mod_filter, l, recipe } => {
            let kind: FamilyKind = kind.parse()?;
            let (lo, hi) = parse_q_range(&q_range)?;
            let family = GroupFamily::prime_powers(kind, lo, hi, mod_filter, limits)?;
            let probe = asymp_probe(&family, &recipe, modulus(l)?, limits)?;
            Ok(match cfg.format {
                Format::Csv => Output {
                    text: probe.to_csv(),
                    code: 0,
                },
                Format::Json => Output::json(&probe),
            })
        }
        Command::Selftest { suite } => {
            let names: Vec<String> = if suite.is_empty() {
                selftest::SUITES.iter().map(|s| s.to_string()).collect()
            } else {
                suite
            };
            let reports = names
                .iter()
                .map(|s| selftest::run_suite(s, cfg.seed, limits))
                .collect::<barfill_core::Result<Vec<_>>>()?;
            let passed = reports.iter().all(|r| r.passed);
            let mut out = Output::json(&json!({ "passed": passed, "suites": reports }));
            if !passed {
                out.code = EXIT_FAILED;
            }
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_PRECONDITION,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match load_config(&cli.common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("barfill: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("barfill: cannot size the worker pool: {e}");
            return ExitCode::from(EXIT_FAILED);
        }
    }
    match run(cli.command, &cfg) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(EXIT_FAILED);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("barfill: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
