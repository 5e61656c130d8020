//! Command-line front end for the well solver: `solve` prints the bound
//! states of a well description file, `sweep` tabulates levels against one
//! swept parameter as CSV, and `validate` runs the built-in invariant
//! checks.
//!
//! Exit codes: 0 on success, 1 when validation checks fail, 2 on
//! configuration errors (unreadable or invalid input files, bad flag
//! combinations), 3 when the root finder fails to converge.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use qwell::checks::run_checks;
use qwell::exec;
use qwell::oracle::{finite_difference_levels, GridConfig};
use qwell::potential::{from_dimensionless, Element, Wall, WellSpec};
use qwell::spectrum::{find_bound_states, SolverConfig};
use qwell::Error;

#[derive(Parser)]
#[command(name = "qwell", about = "Bound states of 1D quantum wells", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a well description file and print its bound-state energies.
    Solve(SolveArgs),
    /// Sweep one parameter and write the level table as CSV.
    Sweep(SweepArgs),
    /// Run the built-in invariant checks and print a pass/fail table.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Well description file (JSON).
    well: PathBuf,
    /// Cross-check the levels against the finite-difference oracle.
    #[arg(long)]
    validate: bool,
    /// Upper edge of the energy window (required for hard-wall wells).
    #[arg(long)]
    emax: Option<f64>,
    /// Scan grid points across the energy window.
    #[arg(long)]
    grid: Option<usize>,
    /// Energy tolerance of the root finder.
    #[arg(long)]
    tol_e: Option<f64>,
    /// Largest residual accepted at a root.
    #[arg(long)]
    tol_res: Option<f64>,
    /// Relative inset of the window edges.
    #[arg(long)]
    emin_offset: Option<f64>,
    /// Bisection evaluation cap per bracket.
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep description file (JSON).
    sweep: PathBuf,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Run only checks whose name contains this substring.
    #[arg(long)]
    filter: Option<String>,
    /// Residual tolerance applied by the reduction check.
    #[arg(long, default_value_t = 1e-8)]
    tol_res: f64,
}

/// One swept-parameter run. The `mode` field selects which fixed
/// parameters apply; unknown fields are rejected.
#[derive(Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
enum SweepSpec {
    /// Square barrier of swept height `u` in a finite well.
    BarrierHeight {
        x: f64,
        #[serde(default)]
        y: f64,
        v: f64,
        param: SweepRange,
        n_levels: usize,
    },
    /// Square barrier of fixed height at swept position `y`.
    BarrierPosition {
        x: f64,
        v: f64,
        u: f64,
        param: SweepRange,
        n_levels: usize,
    },
    /// Hard-wall well split into N+1 sub-wells by N barriers of swept
    /// height.
    PeriodicHeight {
        #[serde(rename = "N")]
        n: usize,
        #[serde(default = "default_subwell_width")]
        w: f64,
        #[serde(default = "default_barrier_width")]
        l: f64,
        emax: Option<f64>,
        param: SweepRange,
        n_levels: usize,
    },
}

fn default_subwell_width() -> f64 {
    1.0
}

fn default_barrier_width() -> f64 {
    0.25
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepRange {
    from: f64,
    to: f64,
    steps: usize,
}

impl SweepRange {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail the guard
    fn values(&self) -> Result<Vec<f64>, Failure> {
        if !(self.from < self.to) || self.steps < 2 {
            return Err(Failure {
                code: 2,
                message: format!(
                    "sweep range needs from < to and steps >= 2, got {} .. {} in {} steps",
                    self.from, self.to, self.steps
                ),
            });
        }
        let span = self.to - self.from;
        Ok((0..self.steps)
            .map(|i| self.from + span * i as f64 / (self.steps - 1) as f64)
            .collect())
    }
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Convergence(..) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure { code: 2, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Failure {
        Failure { code: 2, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Validate(args) => cmd_validate(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn solver_config(args: &SolveArgs) -> SolverConfig {
    let mut cfg = SolverConfig::default();
    if args.emax.is_some() {
        cfg.e_max = args.emax;
    }
    if let Some(n) = args.grid {
        cfg.grid_points = n;
    }
    if let Some(t) = args.tol_e {
        cfg.tol_e = t;
    }
    if let Some(t) = args.tol_res {
        cfg.tol_res = t;
    }
    if let Some(o) = args.emin_offset {
        cfg.edge_offset = o;
    }
    if let Some(m) = args.max_iter {
        cfg.max_iter = m;
    }
    cfg
}

fn cmd_solve(args: &SolveArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.well)?;
    let spec: WellSpec = serde_json::from_str(&text)?;
    let result = find_bound_states(&spec, &solver_config(args))?;
    for e in &result.energies {
        println!("{e:.12}");
    }
    if args.validate {
        let grid = GridConfig {
            n_levels: result.energies.len().max(1) + 2,
            ..GridConfig::default()
        };
        let oracle = finite_difference_levels(&spec, &grid)?;
        // Attractive content (delta spikes, dips) can bind states below
        // the well bottom; those sit outside the solver's energy window
        // and must not be paired against its levels.
        let below = oracle.iter().filter(|&&e| e <= 0.0).count();
        if below > 0 {
            println!("# note: oracle finds {below} state(s) below the well bottom, outside the solver window");
        }
        let oracle: Vec<f64> = oracle
            .into_iter()
            .filter(|&e| e > 0.0)
            .take(result.energies.len())
            .collect();
        if oracle.len() < result.energies.len() {
            println!(
                "# warning: oracle found {} comparable levels, solver found {}",
                oracle.len(),
                result.energies.len()
            );
        }
        for (fd, e) in oracle.iter().zip(&result.energies) {
            println!("# oracle {fd:.12}  deviation {:.2e}", (fd - e).abs());
        }
    }
    Ok(())
}

/// `v` with 12 significant digits in plain decimal notation.
fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let exp_form = format!("{v:.11e}");
    let (mantissa, exp) = exp_form.split_once('e').expect("float exp format");
    let exp: i32 = exp.parse().expect("float exponent");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let mut out = String::with_capacity(20);
    if mantissa.starts_with('-') {
        out.push('-');
    }
    let point = exp + 1; // how many digits sit left of the decimal point
    if point <= 0 {
        out.push_str("0.");
        out.push_str(&"0".repeat(-point as usize));
        out.push_str(&digits);
    } else if point as usize >= digits.len() {
        out.push_str(&digits);
        out.push_str(&"0".repeat(point as usize - digits.len()));
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    out
}

/// One sweep row: a level entry is `None` when that level is not in the
/// well at this parameter value.
type SweepRow = Vec<Option<f64>>;

fn step_levels(spec: &WellSpec, cfg: &SolverConfig, n_levels: usize) -> Result<SweepRow, Error> {
    let energies = find_bound_states(spec, cfg)?.energies;
    Ok((0..n_levels).map(|i| energies.get(i).copied()).collect())
}

fn run_sweep(spec: &SweepSpec) -> Result<(Vec<f64>, Vec<SweepRow>), Failure> {
    let (range, n_levels) = match spec {
        SweepSpec::BarrierHeight { param, n_levels, .. }
        | SweepSpec::BarrierPosition { param, n_levels, .. }
        | SweepSpec::PeriodicHeight { param, n_levels, .. } => (param, *n_levels),
    };
    if n_levels == 0 {
        return Err(Failure { code: 2, message: "n_levels must be at least 1".into() });
    }
    let values = range.values()?;

    let rows: Vec<Result<SweepRow, Error>> = match *spec {
        SweepSpec::BarrierHeight { x, y, v, .. } => exec::map_grid(&values, |&u| {
            let well = from_dimensionless(x, y, u, v)?;
            step_levels(&well, &SolverConfig::default(), n_levels)
        }),
        SweepSpec::BarrierPosition { x, v, u, .. } => exec::map_grid(&values, |&y| {
            let well = from_dimensionless(x, y, u, v)?;
            step_levels(&well, &SolverConfig::default(), n_levels)
        }),
        SweepSpec::PeriodicHeight { n, w, l, emax, .. } => {
            if n < 1 {
                return Err(Failure { code: 2, message: "N must be at least 1".into() });
            }
            if !(w > 0.0 && l > 0.0) {
                return Err(Failure {
                    code: 2,
                    message: format!("sub-well and barrier widths must be positive, got w = {w}, l = {l}"),
                });
            }
            // Default window: enough full bands (N+1 levels each) to hold
            // n_levels, with the edge parked in the band gap above them.
            let bands = n_levels.div_ceil(n + 1);
            let e_max = emax.unwrap_or_else(|| {
                ((bands as f64 + 0.45) * std::f64::consts::PI / w).powi(2)
            });
            let d = (n as f64 + 1.0) * w + n as f64 * l;
            let cfg = SolverConfig { e_max: Some(e_max), ..SolverConfig::default() };
            exec::map_grid(&values, |&u| {
                let elements = (0..n)
                    .map(|j| Element::Rect { a: w + j as f64 * (w + l), w: l, u })
                    .collect();
                let well = WellSpec::new(Wall::Infinite, Wall::Infinite, d, elements);
                step_levels(&well, &cfg, n_levels)
            })
        }
    };

    let mut table = Vec::with_capacity(rows.len());
    for row in rows {
        table.push(row?);
    }
    Ok((values, table))
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.sweep)?;
    let spec: SweepSpec = serde_json::from_str(&text)?;
    let (values, table) = run_sweep(&spec)?;

    let n_levels = table.first().map_or(0, Vec::len);
    let mut csv = String::from("param");
    for i in 1..=n_levels {
        write!(csv, ",E{i}").expect("string write");
    }
    csv.push('\n');
    for (value, row) in values.iter().zip(&table) {
        csv.push_str(&format_sig(*value));
        for level in row {
            csv.push(',');
            match level {
                Some(e) => csv.push_str(&format_sig(*e)),
                None => csv.push_str("escaped"),
            }
        }
        csv.push('\n');
    }

    match &args.out {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), Failure> {
    let reports = run_checks(args.filter.as_deref(), args.tol_res);
    if reports.is_empty() {
        return Err(Failure {
            code: 2,
            message: format!("no check matches filter {:?}", args.filter.as_deref().unwrap_or("")),
        });
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    for r in &reports {
        println!(
            "{:<10} {}  {}",
            r.name,
            if r.passed { "pass" } else { "FAIL" },
            r.detail
        );
    }
    if failed > 0 {
        return Err(Failure {
            code: 1,
            message: format!("{failed} of {} checks failed", reports.len()),
        });
    }
    Ok(())
}
