//! `svsparse` command-line front end.
//!
//! Graphs are read and written in the edge-list text format of
//! [`svsparse::io`]. Reports are single JSON lines. Usage errors exit with
//! status 2, algorithmic failures with status 1.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use svsparse::dense::{self, DEFAULT_UC_GRID};
use svsparse::powers;
use svsparse::solver::{self, SquareMode};
use svsparse::sparsify::{self, SparsifyParams};
use svsparse::{gen, walks, Dyadic, EulerianView, Seed, WeightedDigraph};

#[derive(Parser, Debug)]
#[command(name = "svsparse", version, about = "SV sparsification of Eulerian digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct SparsifyOpts {
    /// Sparsity constant `c`.
    #[arg(long, default_value_t = 16.0)]
    c: f64,
    /// Expander-partition conductance target.
    #[arg(long, default_value_t = 0.05)]
    phi: f64,
    /// Skip dense verification of sparsification rounds.
    #[arg(long)]
    no_verify: bool,
    /// Dense-oracle vertex cap (default: SVSPARSE_ORACLE_CAP or 512).
    #[arg(long)]
    oracle_cap: Option<usize>,
}

impl SparsifyOpts {
    fn params(&self) -> SparsifyParams {
        SparsifyParams {
            c: self.c,
            phi: self.phi,
            verify: !self.no_verify,
            oracle_cap: self.oracle_cap.unwrap_or_else(svsparse::oracle_cap),
            ..SparsifyParams::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a test graph.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(long, default_value_t = 0, global = true)]
        seed: u64,
        #[arg(long, short, global = true)]
        out: Option<PathBuf>,
    },
    /// SV-sparsify an Eulerian digraph.
    Sparsify {
        /// Input graph (`-` for stdin).
        #[arg(long, short, default_value = "-")]
        input: String,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        opts: SparsifyOpts,
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Report destination (default: stderr).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Sparsify the `ell`-th power of an Eulerian digraph.
    Power {
        #[arg(long, short, default_value = "-")]
        input: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        ell: u64,
        /// Singular-value gap parameter; measured when omitted.
        #[arg(long)]
        tau: Option<f64>,
        /// Lazify with this dyadic laziness first (e.g. `1/4`).
        #[arg(long)]
        lazy: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        opts: SparsifyOpts,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Estimate `ell`-step cuts of a strongly connected digraph.
    Cut {
        #[arg(long, short, default_value = "-")]
        input: String,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        eps: f64,
        /// Lower bound on the stationary probabilities (default: computed minimum).
        #[arg(long)]
        s_lower: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// One query per line: `S ; T` with whitespace- or comma-separated vertices.
        #[arg(long)]
        queries: PathBuf,
        #[command(flatten)]
        opts: SparsifyOpts,
    },
    /// Squaring-recursion preconditioner on a normal Eulerian digraph.
    Solve {
        #[arg(long, short, default_value = "-")]
        input: String,
        #[arg(long)]
        k: usize,
        /// Per-step epsilon target for `sparse` mode.
        #[arg(long, default_value_t = 0.02)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Measure the approximation epsilon of `b` by `a`.
    Verify {
        #[arg(long, value_enum)]
        notion: VerifyNotion,
        /// Approximating graph.
        #[arg(long)]
        a: PathBuf,
        /// Reference graph (Eulerian for `standard` and `uc`).
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_UC_GRID)]
        grid: usize,
    },
    /// Stationary distribution of the random walk.
    Stationary {
        #[arg(long, short, default_value = "-")]
        input: String,
    },
}

#[derive(Subcommand, Debug)]
enum GenKind {
    Cycle { n: usize },
    LazyCycle { n: usize, delta: String },
    CompleteLoops { n: usize },
    RegularRandom { n: usize, d: usize },
    EulerianRandom { n: usize, k: usize },
    StronglyConnected { n: usize, extra: usize, max_w: u128 },
    Expander { d: usize, c: usize },
    Circulant { n: usize, offsets: Vec<usize> },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Exact,
    Drsq,
    Sparse,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VerifyNotion {
    Standard,
    Uc,
    Sv,
}

type CliResult<T> = std::result::Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn read_input(input: &str) -> CliResult<WeightedDigraph> {
    let text = if input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(err)?;
        s
    } else {
        fs::read_to_string(input).map_err(|e| format!("{input}: {e}"))?
    };
    svsparse::parse_graph(&text).map_err(err)
}

fn read_path(p: &PathBuf) -> CliResult<WeightedDigraph> {
    read_input(&p.to_string_lossy())
}

fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).map_err(err),
    }
}

fn emit_report(dest: Option<&PathBuf>, v: &Value) -> CliResult<()> {
    let line = format!("{v}\n");
    match dest {
        Some(p) => fs::write(p, line).map_err(|e| format!("{}: {e}", p.display())),
        None => io::stderr().write_all(line.as_bytes()).map_err(err),
    }
}

fn generate(kind: &GenKind, seed: Seed) -> CliResult<WeightedDigraph> {
    let g = match kind {
        GenKind::Cycle { n } => gen::cycle(*n),
        GenKind::LazyCycle { n, delta } => Dyadic::parse_decimal(delta).and_then(|d| gen::lazy_cycle(*n, d)),
        GenKind::CompleteLoops { n } => gen::complete_loops(*n),
        GenKind::RegularRandom { n, d } => gen::regular_random(*n, *d, seed),
        GenKind::EulerianRandom { n, k } => gen::eulerian_random(*n, *k, seed),
        GenKind::StronglyConnected { n, extra, max_w } => gen::strongly_connected_random(*n, *extra, *max_w, seed),
        GenKind::Expander { d, c } => gen::expander(*d, *c, seed),
        GenKind::Circulant { n, offsets } => gen::circulant(*n, offsets),
    };
    g.map_err(err)
}

fn parse_set(s: &str) -> CliResult<Vec<usize>> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|e| format!("bad vertex `{t}`: {e}")))
        .collect()
}

fn parse_queries(text: &str) -> CliResult<Vec<(Vec<usize>, Vec<usize>)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            let (s, t) = l.split_once(';').ok_or_else(|| format!("query line {}: expected `S ; T`", i + 1))?;
            Ok((parse_set(s)?, parse_set(t)?))
        })
        .collect()
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen { kind, seed, out } => {
            let g = generate(&kind, Seed(seed))?;
            emit(out.as_ref(), &svsparse::write_graph(&g))
        }
        Command::Sparsify { input, eps, seed, opts, out, report } => {
            let g = read_input(&input)?;
            EulerianView::try_new(g.clone()).map_err(err)?;
            let params = opts.params();
            let (h, rep) = sparsify::sv_sparsify_digraph(eps, &g, &params, Seed(seed)).map_err(err)?;
            let measured = if g.n() <= params.oracle_cap {
                Some(dense::measure_sv_eps_graphs(&h, &g).map_err(err)?.epsilon)
            } else {
                None
            };
            emit(out.as_ref(), &svsparse::write_graph(&h))?;
            emit_report(report.as_ref(), &json!({ "command": "sparsify", "eps": eps, "seed": seed, "report": rep, "measured_eps": measured }))
        }
        Command::Power { input, eps, ell, tau, lazy, seed, opts, out, report } => {
            let mut g = EulerianView::try_new(read_input(&input)?).map_err(err)?;
            if let Some(l) = lazy {
                let gamma = Dyadic::parse_decimal(&l).map_err(err)?;
                g = EulerianView::try_new(walks::lazify_graph(&g, gamma).map_err(err)?).map_err(err)?;
            }
            let tau = match tau {
                Some(t) => t,
                None => {
                    let s = dense::second_normalized_singular(&g).map_err(err)?;
                    if s >= 1.0 - 1e-12 {
                        return Err(format!("second singular value {s} leaves no gap; pass --lazy"));
                    }
                    1.0 / (1.0 - s)
                }
            };
            let params = opts.params();
            let outcome = powers::sparsify_power(eps, &g, ell, tau, &params, Seed(seed)).map_err(err)?;
            let h = outcome.view.graph();
            emit(out.as_ref(), &svsparse::write_graph(h))?;
            emit_report(
                report.as_ref(),
                &json!({
                    "command": "power",
                    "seed": seed,
                    "tau": tau,
                    "plan": outcome.plan,
                    "sigma_input": outcome.sigma_input,
                    "stages": outcome.stages,
                    "edges_in": g.graph().m(),
                    "edges_out": h.m(),
                }),
            )
        }
        Command::Cut { input, ell, eps, s_lower, seed, queries, opts } => {
            let g = read_input(&input)?;
            let qtext = fs::read_to_string(&queries).map_err(|e| format!("{}: {e}", queries.display()))?;
            let qs = parse_queries(&qtext)?;
            let params = opts.params();
            let s_lower = match s_lower {
                Some(s) => s,
                None => walks::stationary(&g).map_err(err)?.pi_min,
            };
            let est = walks::estimate_cut(eps, ell, &g, s_lower, &params, Seed(seed)).map_err(err)?;
            let reference = if g.n() <= params.oracle_cap { Some(walks::power_mass(&g, ell).map_err(err)?) } else { None };
            let mut rows = String::new();
            for (s, t) in &qs {
                let q = est.query(s, t).map_err(err)?;
                let (ref_value, bound) = match &reference {
                    Some(m) => {
                        let r = walks::cut_query(m, s, t).map_err(err)?;
                        (Some(r.value), 2.0 * eps * (r.min_s() * r.min_t()).sqrt())
                    }
                    None => (None, 2.0 * eps * (q.min_s() * q.min_t()).sqrt()),
                };
                let row = json!({ "S": q.s, "T": q.t, "value": q.value, "reference": ref_value, "bound": bound });
                rows.push_str(&format!("{row}\n"));
            }
            emit(None, &rows)
        }
        Command::Solve { input, k, eps, mode, seed: _ } => {
            let g = EulerianView::try_new(read_input(&input)?).map_err(err)?;
            let mode = match mode {
                Mode::Exact => SquareMode::Exact,
                Mode::Drsq => SquareMode::Drsq,
                Mode::Sparse => SquareMode::Grid { target: eps },
            };
            let r = solver::solve_report(&g, k, &mode).map_err(err)?;
            emit(None, &format!("{}\n", json!(r)))
        }
        Command::Verify { notion, a, b, grid } => {
            let ga = read_path(&a)?;
            let gb = read_path(&b)?;
            if ga.n() != gb.n() {
                return Err(format!("graphs have {} and {} vertices", ga.n(), gb.n()));
            }
            let r = match notion {
                VerifyNotion::Sv => dense::measure_sv_eps_graphs(&ga, &gb),
                VerifyNotion::Standard | VerifyNotion::Uc => {
                    let view = EulerianView::try_new(gb.clone()).map_err(err)?;
                    let d = dense::diag(&view.degrees_f64());
                    let (at, ab) = (ga.to_dense(), gb.to_dense());
                    match notion {
                        VerifyNotion::Standard => dense::measure_std_eps(&at, &ab, &d),
                        _ => dense::measure_uc_eps(&at, &ab, &d, grid),
                    }
                }
            }
            .map_err(err)?;
            emit(None, &format!("{}\n", json!({ "notion": r.notion, "epsilon": r.epsilon, "kernel_ok": r.kernel_ok })))
        }
        Command::Stationary { input } => {
            let g = read_input(&input)?;
            let info = walks::stationary(&g).map_err(err)?;
            emit(None, &format!("{}\n", json!(info)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
