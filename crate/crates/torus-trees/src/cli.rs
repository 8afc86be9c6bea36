//! The `torus-trees` command line.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use torus_trees_core::laplacian::crsf_polynomial;
use torus_trees_core::mahler::{gap_polynomial, gap_report, grid_bound_report_with, regular_lower_bound_check};
use torus_trees_core::periodic_graph::{doubled_grid1, grid_graph, grid_without_axis, subdivided_grid1, two_step_cycle};
use torus_trees_core::quotient::{log_eigenvalue_product, spanning_tree_count, tau_deletion_contraction};
use torus_trees_core::spectral::DEFAULT_ZERO_TOL;
use torus_trees_core::sublattice::DEFAULT_MAX_INDEX;
use torus_trees_core::{build_quotient, delta_is_zero, laplacian_matrix, PeriodicGraph, Sublattice};

use crate::error::{AppError, Result};
use crate::graph_file::{format_graph, read_graph};
use crate::lattice_spec::{diag_lattice, parse_lattice};
use crate::parallel::{self, MahlerParams, Method};
use crate::table::{float, log_value, Table};

const FILE_GRAMMAR: &str = "\
GRAPH FILES
  A graph file is TOML with keys d (rank), n (vertex orbits) and edges:
      d = 2
      n = 1
      edges = [[1, 1, [1, 0]], [1, 1, [0, 1]]]
  Each edge [i, j, [s_1, ..., s_d]] joins v(i, 0) to v(j, s); orbits are
  numbered from 1. Repeated edges are parallel edge orbits. Limits: d <= 8,
  n <= 64.

LATTICES
  --lattice \"a,b;c,d\" gives the rows of a basis matrix; its columns generate
  the sublattice. --diag N is diag(N, ..., N).";

#[derive(Debug, Parser)]
#[command(name = "torus-trees", version, about = "Spanning trees of torus quotients of periodic graphs", after_long_help = FILE_GRAMMAR)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Report logarithms in bits instead of nats.
    #[arg(long, global = true)]
    pub bits: bool,
    /// Largest accepted lattice index.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_INDEX)]
    pub max_index: u64,
    /// Largest accepted quadrature grid size per axis.
    #[arg(long, global = true, default_value_t = 1 << 16)]
    pub max_grid: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct LatticeArgs {
    /// Basis rows, e.g. "2,1;0,3".
    #[arg(long, conflicts_with = "diag", allow_hyphen_values = true)]
    pub lattice: Option<String>,
    /// diag(N, ..., N).
    #[arg(long)]
    pub diag: Option<i64>,
}

impl LatticeArgs {
    fn resolve(&self, d: usize) -> Result<Sublattice> {
        match (&self.lattice, self.diag) {
            (Some(spec), _) => parse_lattice(spec, d),
            (None, Some(n)) => diag_lattice(d, n),
            (None, None) => Err(AppError::Lattice("give --lattice or --diag".into())),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MahlerArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Midpoint grid size per axis.
    #[arg(long, default_value_t = 512)]
    pub grid: u64,
    /// Monte-Carlo sample count.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Jensen,
    Grid,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    /// Deletion-contraction (small graphs only).
    Dc,
    /// Product of nonzero Laplacian eigenvalues.
    Eigen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Grid,
    DoubledGrid1,
    GridNoAxis,
    TwoOrbit,
    Gap,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Laplacian polynomial.
    Delta {
        graph: PathBuf,
        /// Also expand over cycle-rooted spanning forests and compare.
        #[arg(long)]
        crsf: bool,
    },
    /// Count spanning trees of the quotient by a sublattice.
    Count {
        graph: PathBuf,
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, value_enum)]
        oracle: Option<Oracle>,
    },
    /// Compare the exact count with the roots-of-unity product formula.
    VerifyProduct {
        graph: PathBuf,
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Threshold for |Δ(c)| = 0, relative to the sum of |coefficients| of Δ.
        #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
        zero_tol: f64,
    },
    /// Estimate the Mahler measure of the Laplacian polynomial.
    Mahler {
        graph: PathBuf,
        #[command(flatten)]
        params: MahlerArgs,
    },
    /// Growth rate of tree counts over diag(N, ..., N) against m(Δ).
    Converge {
        graph: PathBuf,
        #[arg(long, default_value_t = 4)]
        from: i64,
        #[arg(long, default_value_t = 32)]
        to: i64,
        #[arg(long, default_value_t = 4)]
        step: i64,
        #[command(flatten)]
        params: MahlerArgs,
    },
    /// m(Δ) of the grid graphs against ln 2d.
    GridTable {
        #[arg(long, default_value_t = 3)]
        d_max: usize,
        #[arg(long, default_value_t = 256)]
        grid: u64,
    },
    /// m(4 - x - 1/x - x^s - x^-s) for s = 2..s_max.
    GapTable {
        #[arg(long, default_value_t = 10)]
        s_max: i64,
    },
    /// Tree growth on a quotient of the grid graph against ln 2d.
    RegularBound {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        lattice: LatticeArgs,
    },
    /// Write a graph file for one of the built-in families.
    Generate {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Axis removed by grid-no-axis (1-based).
        #[arg(long, default_value_t = 2)]
        axis: usize,
        #[arg(long, default_value_t = 1)]
        r: i64,
        #[arg(long, default_value_t = 2)]
        s: i64,
    },
}

impl MahlerArgs {
    fn params(&self, max_grid: u64) -> Result<MahlerParams> {
        if self.grid == 0 || self.grid > max_grid {
            return Err(AppError::Invalid(format!("--grid must be in 1..={max_grid}")));
        }
        if self.samples == 0 {
            return Err(AppError::Invalid("--samples must be positive".into()));
        }
        let method = match self.method {
            MethodArg::Auto => Method::Auto,
            MethodArg::Jensen => Method::Jensen,
            MethodArg::Grid => Method::Grid,
            MethodArg::MonteCarlo => Method::MonteCarlo,
        };
        Ok(MahlerParams { method, grid: self.grid, samples: self.samples, seed: self.seed })
    }
}

/// Parses `args` and runs the command, writing results to `out` and timing
/// notes to `err`. Returns the process exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match run(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    if cli.max_index == 0 || cli.max_grid == 0 {
        return Err(AppError::Invalid("guards must be positive".into()));
    }
    let pool = parallel::thread_pool(cli.threads)?;
    let start = Instant::now();
    let output = pool.install(|| dispatch(cli))?;
    out.write_all(output.as_bytes())?;
    if matches!(cli.command, Command::Count { .. }) {
        writeln!(err, "elapsed: {:.3} s", start.elapsed().as_secs_f64())?;
    }
    Ok(())
}

fn emit(cli: &Cli, t: &Table) -> Result<String> {
    match cli.format {
        Format::Csv => t.to_csv(),
        Format::Text => Ok(t.to_text()),
    }
}

fn dispatch(cli: &Cli) -> Result<String> {
    let bits = cli.bits;
    match &cli.command {
        Command::Delta { graph, crsf } => {
            let g = read_graph(graph)?;
            let lap = laplacian_matrix(&g);
            let check = delta_is_zero(&g);
            let witness = check
                .witness
                .as_ref()
                .map(|w| w.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" "))
                .unwrap_or_default();
            let crsf_match = if *crsf {
                let c = crsf_polynomial(&g)?;
                Some(if lap.delta.is_zero() { c.is_zero() } else { c.unit_equivalent(&lap.delta) })
            } else {
                None
            };
            if cli.format == Format::Text {
                let mut s = format!("{}\n", lap.delta);
                if check.zero {
                    s += &format!("closed component: orbits {witness}\n");
                }
                if let Some(m) = crsf_match {
                    s += &format!("crsf expansion agrees: {m}\n");
                }
                return Ok(s);
            }
            let mut t = Table::new(&["delta", "zero", "closed_orbits", "crsf_agrees"]);
            t.push(vec![
                lap.delta.to_string(),
                check.zero.to_string(),
                witness,
                crsf_match.map(|m| m.to_string()).unwrap_or_default(),
            ]);
            t.to_csv()
        }
        Command::Count { graph, lattice, oracle } => {
            let g = read_graph(graph)?;
            let l = lattice.resolve(g.rank())?;
            let q = build_quotient(&g, &l, cli.max_index)?;
            let report = spanning_tree_count(&q);
            let oracle_value = match oracle {
                None => None,
                Some(Oracle::Dc) => Some(tau_deletion_contraction(&q)?.to_string()),
                Some(Oracle::Eigen) => Some(log_value(log_eigenvalue_product(&q), bits)),
            };
            if cli.format == Format::Text {
                let mut s = format!("T = {}\n", report.total);
                s += &format!("index = {}\n", l.index());
                s += &format!("components = {}\n", report.component_sizes.len());
                s += &format!("n_lambda = {}\n", report.n_lambda);
                s += &format!("log T = {}\n", log_value(report.log_total(), bits));
                match (oracle, &oracle_value) {
                    (Some(Oracle::Dc), Some(v)) => s += &format!("deletion-contraction T = {v}\n"),
                    (Some(Oracle::Eigen), Some(v)) => s += &format!("eigenvalue log T = {v}\n"),
                    _ => {}
                }
                return Ok(s);
            }
            let mut t = Table::new(&["index", "components", "t", "log_t", "oracle"]);
            t.push(vec![
                l.index().to_string(),
                report.component_sizes.len().to_string(),
                report.total.to_string(),
                log_value(report.log_total(), bits),
                oracle_value.unwrap_or_default(),
            ]);
            t.to_csv()
        }
        Command::VerifyProduct { graph, lattice, zero_tol } => {
            let g = read_graph(graph)?;
            let l = lattice.resolve(g.rank())?;
            let c = parallel::product_check(&g, &l, *zero_tol, cli.max_index)?;
            let mut t = Table::new(&["index", "points", "skipped", "log_exact", "log_product", "log_product_nonzero_only", "diff"]);
            t.push(vec![
                l.index().to_string(),
                c.formula.points.to_string(),
                c.formula.skipped.to_string(),
                log_value(c.log_exact, bits),
                log_value(c.formula.log_value, bits),
                log_value(c.formula.log_value_nonzero_only, bits),
                log_value(c.diff(), bits),
            ]);
            emit(cli, &t)
        }
        Command::Mahler { graph, params } => {
            let g = read_graph(graph)?;
            let delta = laplacian_matrix(&g).delta;
            if delta.is_zero() {
                return Err(torus_trees_core::Error::DeltaZero.into());
            }
            let e = parallel::mahler(&delta, &params.params(cli.max_grid)?)?;
            let mut t = Table::new(&["method", "value", "error_bound", "samples", "dropped"]);
            t.push(vec![
                e.method.to_string(),
                log_value(e.value, bits),
                log_value(e.error_bound, bits),
                e.samples.to_string(),
                e.dropped.to_string(),
            ]);
            emit(cli, &t)
        }
        Command::Converge { graph, from, to, step, params } => {
            let g = read_graph(graph)?;
            if *from < 1 || to < from || *step < 1 {
                return Err(AppError::Invalid("need 1 <= --from <= --to and --step >= 1".into()));
            }
            let delta = laplacian_matrix(&g).delta;
            if delta.is_zero() {
                return Err(torus_trees_core::Error::DeltaZero.into());
            }
            let est = parallel::mahler(&delta, &params.params(cli.max_grid)?)?;
            let ns: Vec<i64> = (*from..=*to).step_by(*step as usize).collect();
            let lattices = ns.iter().map(|&n| diag_lattice(g.rank(), n)).collect::<Result<Vec<_>>>()?;
            let rows = parallel::growth_rows(&g, &lattices, est.value, cli.max_index)?;
            let mut t = Table::new(&["n", "min_length", "index", "log_t", "rate", "mahler", "discrepancy"]);
            for (n, r) in ns.iter().zip(rows) {
                t.push(vec![
                    n.to_string(),
                    r.min_length.map(float).unwrap_or_default(),
                    r.index.to_string(),
                    log_value(r.log_t, bits),
                    log_value(r.rate, bits),
                    log_value(est.value, bits),
                    log_value(r.discrepancy, bits),
                ]);
            }
            emit(cli, &t)
        }
        Command::GridTable { d_max, grid } => {
            if *d_max == 0 || *d_max > 4 {
                return Err(AppError::Invalid("--d-max must be in 1..=4".into()));
            }
            if *grid == 0 || *grid > cli.max_grid {
                return Err(AppError::Invalid(format!("--grid must be in 1..={}", cli.max_grid)));
            }
            let rows = grid_bound_report_with(*d_max, *grid, &parallel::run_blocks)?;
            let mut t = Table::new(&["d", "method", "grid", "mahler", "error_bound", "log_2d", "deficit", "nondecreasing"]);
            for r in rows {
                t.push(vec![
                    r.d.to_string(),
                    r.estimate.method.to_string(),
                    r.estimate.samples.to_string(),
                    log_value(r.estimate.value, bits),
                    log_value(r.estimate.error_bound, bits),
                    log_value(r.log_2d, bits),
                    log_value(r.deficit, bits),
                    r.nondecreasing.to_string(),
                ]);
            }
            emit(cli, &t)
        }
        Command::GapTable { s_max } => {
            if *s_max < 2 {
                return Err(AppError::Invalid("--s-max must be at least 2".into()));
            }
            let mut t = Table::new(&["s", "mahler", "error_bound", "at_least_log2"]);
            for r in gap_report(*s_max)? {
                t.push(vec![
                    r.s.to_string(),
                    log_value(r.estimate.value, bits),
                    log_value(r.estimate.error_bound, bits),
                    r.holds.to_string(),
                ]);
            }
            emit(cli, &t)
        }
        Command::RegularBound { d, lattice } => {
            if *d == 0 || *d > 4 {
                return Err(AppError::Invalid("--d must be in 1..=4".into()));
            }
            let l = lattice.resolve(*d)?;
            let r = regular_lower_bound_check(*d, &l)?;
            let mut t = Table::new(&["d", "index", "log_tau", "rate", "log_2d", "deficit"]);
            t.push(vec![
                r.d.to_string(),
                r.index.to_string(),
                log_value(r.log_tau, bits),
                log_value(r.rate, bits),
                log_value(r.log_2d, bits),
                log_value(r.deficit, bits),
            ]);
            emit(cli, &t)
        }
        Command::Generate { family, d, axis, r, s } => {
            let g: PeriodicGraph = match family {
                Family::Grid => grid_graph(*d)?,
                Family::DoubledGrid1 => doubled_grid1(),
                Family::GridNoAxis => {
                    if *axis == 0 || axis > d {
                        return Err(AppError::Invalid(format!("--axis must be in 1..={d}")));
                    }
                    grid_without_axis(*d, axis - 1)?
                }
                Family::TwoOrbit => subdivided_grid1(),
                Family::Gap => {
                    if *r == 0 || *s == 0 {
                        return Err(AppError::Invalid("--r and --s must be nonzero".into()));
                    }
                    let g = two_step_cycle(*r, *s);
                    debug_assert_eq!(laplacian_matrix(&g).delta, gap_polynomial(*r, *s));
                    g
                }
            };
            if g.rank() > crate::graph_file::MAX_RANK {
                return Err(AppError::Invalid(format!("--d must be at most {}", crate::graph_file::MAX_RANK)));
            }
            Ok(format_graph(&g))
        }
    }
}
