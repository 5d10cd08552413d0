//! `cpop`: build, solve and export sparse complex moment relaxations.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cpop_core::acopf::{load_ac_table, relax_and_solve};
use cpop_core::random::random_cpop;
use cpop_core::relax::Sidecar;
use cpop_core::solver::{export_sdpa, ExportMeta};
use cpop_core::{
    assemble, complex_to_real, solve, AcopfOptions, AcopfOrder, Cpop, Error, Extension,
    NetworkCase, RelaxOptions, Rounds, Settings, SolveReport, Sparsity, SparsityReport, Statistics,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_SOLVER: u8 = 3;

/// Upper bound on rounds for `--k auto`.
const AUTO_ROUNDS: usize = 50;

#[derive(Parser, Debug)]
#[command(
    name = "cpop",
    version,
    about = "Sparse complex moment-HSOS relaxations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Assemble and solve a relaxation of a CPOP file.
    Solve {
        #[command(flatten)]
        relax: RelaxArgs,
        #[arg(long)]
        tol: Option<f64>,
        /// Also write the real model in SDPA sparse format.
        #[arg(long)]
        export: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Write the real model in SDPA sparse format plus a JSON sidecar.
    Export {
        #[command(flatten)]
        relax: RelaxArgs,
        #[arg(long)]
        export: PathBuf,
    },
    /// Generate a multi-ball random CPOP.
    Random {
        /// Number of blocks `l`; the instance has `5(l + 1)` variables.
        #[arg(long, short)]
        l: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Relax and solve an AC-OPF case in Matpower format.
    Acopf {
        #[arg(long)]
        case: PathBuf,
        /// `shor`, `1.5`, or an integer relaxation order.
        #[arg(long, default_value = "shor")]
        order: String,
        /// Sparse order for an integer `--order`.
        #[arg(long)]
        k: Option<usize>,
        /// `case,ac_objective` table of local optima.
        #[arg(long)]
        ac_table: Option<PathBuf>,
        /// Term sparsity chordal extension.
        #[arg(long, default_value = "max")]
        ext: Extension,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print cliques, block sizes and mb without solving.
    Stats {
        #[command(flatten)]
        relax: RelaxArgs,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RelaxArgs {
    #[arg(long)]
    input: PathBuf,
    /// Relaxation order, or `min` for the minimum-initial relaxation.
    #[arg(long)]
    order: Option<Order>,
    /// Sparse order, or `auto` to iterate until the graphs stabilize.
    #[arg(long)]
    k: Option<K>,
    #[arg(long, default_value = "dense")]
    sparsity: Sparsity,
    /// Term sparsity chordal extension.
    #[arg(long, default_value = "max")]
    ext: Extension,
    /// Correlative sparsity chordal extension.
    #[arg(long, default_value = "md")]
    cs_ext: Extension,
}

#[derive(Clone, Copy, Debug)]
enum Order {
    Fixed(u32),
    Min,
}

impl FromStr for Order {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min" => Ok(Order::Min),
            _ => s
                .parse()
                .map(Order::Fixed)
                .map_err(|_| format!("order must be an integer or 'min', got '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum K {
    Fixed(usize),
    Auto,
}

impl FromStr for K {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(K::Auto),
            _ => match s.parse() {
                Ok(0) | Err(_) => Err(format!("k must be a positive integer or 'auto', got '{s}'")),
                Ok(k) => Ok(K::Fixed(k)),
            },
        }
    }
}

/// Why a run failed, mapped to the exit code.
enum Failure {
    Usage(String),
    Data(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Solver(_) => EXIT_SOLVER,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Data(m) => write!(f, "data error: {m}"),
            Failure::Solver(m) => write!(f, "solver failure: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidOptions(_) | Error::OrderTooLow { .. } => Failure::Usage(e.to_string()),
            Error::Solver(_) => Failure::Solver(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl RelaxArgs {
    fn options(&self) -> Result<RelaxOptions, Failure> {
        let mut sparsity = self.sparsity;
        let order = match self.order {
            Some(Order::Min) => {
                if !matches!(sparsity, Sparsity::Dense | Sparsity::MinInitial) {
                    return Err(Failure::Usage(format!(
                        "--order min conflicts with --sparsity {sparsity}"
                    )));
                }
                sparsity = Sparsity::MinInitial;
                None
            }
            Some(Order::Fixed(d)) => Some(d),
            None => None,
        };
        if self.k.is_some() && !sparsity.uses_terms() {
            return Err(Failure::Usage(format!(
                "--k needs term sparsity, not --sparsity {sparsity}"
            )));
        }
        let rounds = match self.k {
            Some(K::Auto) => Rounds::UntilStable { max: AUTO_ROUNDS },
            Some(K::Fixed(k)) => Rounds::Fixed(k),
            None => Rounds::Fixed(1),
        };
        Ok(RelaxOptions {
            sparsity,
            order,
            rounds,
            ts_extension: self.ext,
            cs_extension: self.cs_ext,
        })
    }

    fn load(&self) -> Result<Cpop, Failure> {
        Cpop::load(&self.input).map_err(|e| Failure::Data(format!("{}: {e}", self.input.display())))
    }
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    input: String,
    options: &'a RelaxOptions,
    statistics: Statistics,
    mb: usize,
    opt: f64,
    time: f64,
    solver: &'a SolveReport,
}

#[derive(Serialize)]
struct SidecarFile<'a> {
    meta: &'a ExportMeta,
    sidecar: &'a Sidecar,
}

fn write_json<T: Serialize>(path: &Path, value: &T, pretty: bool) -> Result<(), Failure> {
    let text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .map_err(|e| Failure::Data(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

/// The sidecar sits next to the model: `model.dat-s` gets `model.dat-s.json`.
fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn export(sdp: &cpop_core::ComplexSdp, path: &Path) -> Result<(), Failure> {
    let (real, sidecar) = complex_to_real(sdp);
    let meta =
        export_sdpa(&real, path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    write_json(
        &sidecar_path(path),
        &SidecarFile {
            meta: &meta,
            sidecar: &sidecar,
        },
        false,
    )
}

fn settings(tol: Option<f64>) -> Result<Settings, Failure> {
    tuned(Settings::default(), tol)
}

fn tuned(base: Settings, tol: Option<f64>) -> Result<Settings, Failure> {
    match tol {
        Some(t) if !(t > 0.0 && t < 1.0) => {
            Err(Failure::Usage(format!("--tol must lie in (0, 1), got {t}")))
        }
        Some(t) => Ok(base.tol(t)),
        None => Ok(base),
    }
}

fn check_status(report: &SolveReport) -> Result<(), Failure> {
    if report.status.is_success() {
        Ok(())
    } else {
        Err(Failure::Solver(format!(
            "{} after {} iterations (primal {:.6e}, dual {:.6e})",
            report.status, report.iterations, report.primal_objective, report.dual_objective
        )))
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve {
            relax,
            tol,
            export: export_path,
            json,
        } => {
            let opts = relax.options()?;
            let settings = settings(tol)?;
            let cpop = relax.load()?;
            let start = Instant::now();
            let relaxation = assemble(&cpop, &opts)?;
            if let Some(path) = &export_path {
                export(&relaxation.sdp, path)?;
            }
            let (real, _) = complex_to_real(&relaxation.sdp);
            let report = solve(&real, &settings)?;
            let time = start.elapsed().as_secs_f64();
            let stats = relaxation.statistics();
            println!(
                "mb={} opt={:.8e} time={:.3}s status={}",
                stats.mb,
                report.objective(),
                time,
                report.status
            );
            if let Some(path) = &json {
                write_json(
                    path,
                    &SolveOutput {
                        input: relax.input.display().to_string(),
                        options: &opts,
                        mb: stats.mb,
                        statistics: stats.clone(),
                        opt: report.objective(),
                        time,
                        solver: &report,
                    },
                    true,
                )?;
            }
            check_status(&report)
        }
        Command::Export {
            relax,
            export: path,
        } => {
            let opts = relax.options()?;
            let cpop = relax.load()?;
            let relaxation = assemble(&cpop, &opts)?;
            export(&relaxation.sdp, &path)?;
            let stats = relaxation.statistics();
            println!(
                "mb={} blocks={} variables={} wrote {}",
                stats.mb,
                stats.blocks,
                stats.variables,
                path.display()
            );
            Ok(())
        }
        Command::Random { l, seed, output } => {
            if l == 0 {
                return Err(Failure::Usage("--l must be at least 1".into()));
            }
            let cpop = random_cpop(l, seed);
            cpop.save(&output)
                .map_err(|e| Failure::Data(format!("{}: {e}", output.display())))?;
            println!(
                "n={} l={l} seed={seed} wrote {}",
                cpop.nvars(),
                output.display()
            );
            Ok(())
        }
        Command::Acopf {
            case,
            order,
            k,
            ac_table,
            ext,
            tol,
            json,
        } => {
            let order = match (order.parse::<u32>(), k) {
                (Ok(d), k) => AcopfOrder::Sparse {
                    d,
                    k: k.unwrap_or(1),
                },
                (Err(_), None) => order.parse::<AcopfOrder>().map_err(Failure::Usage)?,
                (Err(_), Some(_)) => {
                    return Err(Failure::Usage("--k needs an integer --order".into()));
                }
            };
            let opts = AcopfOptions {
                ts_extension: ext,
                settings: tuned(AcopfOptions::default().settings, tol)?,
                ..Default::default()
            };
            let network = NetworkCase::load(&case)
                .map_err(|e| Failure::Data(format!("{}: {e}", case.display())))?;
            let ac = match &ac_table {
                Some(path) => {
                    let table = load_ac_table(path)
                        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
                    let value = table.get(&network.name).copied().ok_or_else(|| {
                        Failure::Data(format!(
                            "{}: no entry for case '{}'",
                            path.display(),
                            network.name
                        ))
                    })?;
                    Some(value)
                }
                None => None,
            };
            let mut report = relax_and_solve(&network, order, &opts)?;
            if let Some(ac) = ac {
                report = report.with_ac(ac)?;
            }
            let mut line = format!(
                "case={} order={} mb={} opt={:.4e} time={:.2}s",
                report.case, report.order, report.mb, report.opt, report.time
            );
            if let Some(gap) = report.gap {
                line += &format!(" gap={gap:.2}%");
            }
            println!("{line} status={}", report.status);
            if let Some(path) = &json {
                write_json(path, &report, true)?;
            }
            if report.status.is_success() {
                Ok(())
            } else {
                Err(Failure::Solver(format!("{}", report.status)))
            }
        }
        Command::Stats { relax, json } => {
            let opts = relax.options()?;
            let cpop = relax.load()?;
            let relaxation = assemble(&cpop, &opts)?;
            let report = SparsityReport::new(
                &relaxation.pattern,
                &relaxation.orders,
                relaxation.terms.as_ref(),
            );
            let stats = relaxation.statistics();
            for (i, c) in report.cliques.iter().enumerate() {
                println!("clique {}: vars {:?} order {}", i + 1, c, report.orders[i]);
            }
            for o in &report.owners {
                println!(
                    "owner clique {} constraint {}: blocks {:?}",
                    o.clique, o.constraint, o.blocks
                );
            }
            println!(
                "mb={} blocks={} variables={} inequalities={} equalities={}",
                stats.mb, stats.blocks, stats.variables, stats.inequalities, stats.equalities
            );
            if let Some(path) = &json {
                write_json(path, &report, true)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("cpop: {f}");
            ExitCode::from(f.code())
        }
    }
}
