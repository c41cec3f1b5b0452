//! Command-line front end.
//!
//! Every command writes either CSV (header row, LF endings) or one JSON
//! object with `config`, `result` and `residuals` keys, to `--out` or to
//! standard output. The exit status is nonzero when a residual check fails.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{self, GridOptions};
use crate::gramian::{self, LatticeParams};
use crate::windows::{self, EBSplineWindow, TPFiniteWindow, Window};
use crate::zak::{self, ZakEvaluator};

/// Environment variable capping the number of worker threads (0 = automatic).
pub const THREADS_ENV: &str = "GABOR_EB_THREADS";

pub const CM_TOL: f64 = 1e-10;
pub const ZAK_IDENTITY_TOL: f64 = 1e-10;
pub const ZERO_TOL: f64 = 1e-10;
pub const FACTOR_TOL: f64 = 1e-8;
pub const DUAL_TOL: f64 = 1e-9;

type CliResult<T> = std::result::Result<T, Box<dyn std::error::Error>>;

#[derive(Parser, Debug)]
#[command(
    name = "gabor-eb",
    version,
    about = "Exponential B-spline and totally positive Gabor windows"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample an EB-spline.
    Spline(SplineArgs),
    /// Zak transform evaluation, zero location and identity checks.
    Zak {
        #[command(subcommand)]
        action: ZakCommand,
    },
    /// Dual windows from blocks of the pre-Gramian.
    Dual(DualArgs),
    /// Frame bounds.
    Bounds {
        #[command(subcommand)]
        action: BoundsCommand,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Eb,
    Tp,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WindowArgs {
    /// Window family; inferred from --rates / --poles when omitted.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// EB-spline rates, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub rates: Option<Vec<f64>>,
    /// Pole rates of a totally positive window, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub poles: Option<Vec<f64>>,
    /// Shorthand for the symmetric pair (lambda, -lambda).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Normalization of a totally positive window.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LatticeArgs {
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, conflicts_with = "beta_frac")]
    pub beta: Option<f64>,
    /// Rational beta, e.g. 31/61.
    #[arg(long)]
    pub beta_frac: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct SplineArgs {
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub rates: Vec<f64>,
    /// Number of samples of [0, m], endpoints included.
    #[arg(long, default_value_t = 401)]
    pub samples: usize,
    /// Compare against the Christensen–Massopust closed form.
    #[arg(long)]
    pub check_cm: bool,
}

#[derive(Subcommand, Debug)]
pub enum ZakCommand {
    /// |Z|, Re Z and Im Z on an n x n grid of the fundamental cell.
    Eval {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// The zero on the line w = 1/(2 alpha).
    Zero {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = zak::DEFAULT_SCAN_GRID)]
        grid: usize,
    },
    /// Periodicity, quasi-periodicity, dilation and Fourier-side identities.
    Verify {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Residual of the reduction of a totally positive window to an EB-spline.
    FactorCheck {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 32)]
        grid: usize,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct DualArgs {
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub rates: Vec<f64>,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long, default_value_t = gramian::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Columns added around the square block; 0 uses the square block.
    #[arg(long, default_value_t = 0)]
    pub extra_cols: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaFamily {
    /// Symmetric order-2 EB-spline, alpha = 1.
    Eb2,
    /// Two-sided exponential.
    Tp2,
    /// Symmetric order-2 EB-spline with beta <= 1/2.
    Case1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimalMethod {
    Rational,
    Highredundancy,
    Zak,
}

#[derive(Subcommand, Debug)]
pub enum BoundsCommand {
    /// Closed-form lower bounds.
    Formula {
        #[arg(long, value_enum)]
        family: FormulaFamily,
        #[arg(long)]
        lambda: f64,
        #[command(flatten)]
        lattice: LatticeArgs,
    },
    /// Grid-optimal bounds.
    Optimal {
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, value_enum, default_value_t = OptimalMethod::Rational)]
        method: OptimalMethod,
        #[arg(long, default_value_t = bounds::DEFAULT_INITIAL_GRID)]
        grid: usize,
        #[arg(long, default_value_t = bounds::DEFAULT_MAX_GRID)]
        max_grid: usize,
    },
    /// Sweep beta = k/61, k = 31..60, for the spline and the two-sided exponential.
    Figure3 {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = bounds::DEFAULT_INITIAL_GRID)]
        grid: usize,
        #[arg(long, default_value_t = bounds::DEFAULT_MAX_GRID)]
        max_grid: usize,
    },
}

/// What a command produced.
struct Output {
    config: Value,
    result: Value,
    residuals: Value,
    csv: String,
    failures: Vec<String>,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("gabor-eb: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("gabor-eb: {e}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("{THREADS_ENV}={v:?} is not a non-negative integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

/// Runs a parsed command; `Ok(false)` when a residual check failed.
pub fn run(cli: &Cli) -> CliResult<bool> {
    let out = match &cli.command {
        Command::Spline(a) => cmd_spline(a)?,
        Command::Zak { action } => cmd_zak(action)?,
        Command::Dual(a) => cmd_dual(a)?,
        Command::Bounds { action } => cmd_bounds(action)?,
    };
    let text = match cli.format {
        Format::Csv => out.csv,
        Format::Json => {
            let mut config = out.config;
            config["format"] = json!(cli.format);
            let doc = json!({
                "config": config,
                "result": out.result,
                "residuals": out.residuals,
            });
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s
        }
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            r => r?,
        },
    }
    for f in &out.failures {
        eprintln!("gabor-eb: residual check failed: {f}");
    }
    Ok(out.failures.is_empty())
}

fn parse_fraction(s: &str) -> CliResult<(u64, u64)> {
    let (a, b) = s
        .split_once('/')
        .ok_or_else(|| format!("--beta-frac {s:?} must look like k/n"))?;
    let k: u64 = a
        .trim()
        .parse()
        .map_err(|_| format!("bad numerator in {s:?}"))?;
    let n: u64 = b
        .trim()
        .parse()
        .map_err(|_| format!("bad denominator in {s:?}"))?;
    if k == 0 || n == 0 {
        return Err(format!("--beta-frac {s:?} must be positive").into());
    }
    Ok((k, n))
}

fn resolve_lattice(a: &LatticeArgs) -> CliResult<LatticeParams> {
    match (&a.beta, &a.beta_frac) {
        (_, Some(frac)) => {
            let (k, n) = parse_fraction(frac)?;
            let beta = k as f64 / n as f64;
            let alpha_int = a.alpha.round();
            if (a.alpha - alpha_int).abs() == 0.0 && alpha_int >= 1.0 {
                let num = alpha_int as u64 * k;
                let g = gramian::gcd(num, n);
                Ok(LatticeParams::with_rational_form(
                    a.alpha,
                    beta,
                    num / g,
                    n / g,
                )?)
            } else {
                Ok(LatticeParams::new(a.alpha, beta)?)
            }
        }
        (Some(b), None) => Ok(LatticeParams::new(a.alpha, *b)?),
        (None, None) => Err("one of --beta or --beta-frac is required".into()),
    }
}

enum BuiltWindow {
    Eb(EBSplineWindow),
    Tp(TPFiniteWindow),
}

impl BuiltWindow {
    fn as_window(&self) -> Window {
        match self {
            Self::Eb(w) => Window::from(w.clone()),
            Self::Tp(w) => Window::from(w.clone()),
        }
    }
}

fn resolve_window(a: &WindowArgs) -> CliResult<BuiltWindow> {
    let family = match (a.family, &a.rates, &a.poles) {
        (Some(f), _, _) => f,
        (None, Some(_), None) => Family::Eb,
        (None, None, Some(_)) => Family::Tp,
        (None, None, None) if a.lambda.is_some() => Family::Eb,
        (None, Some(_), Some(_)) => return Err("give either --rates or --poles, not both".into()),
        (None, None, None) => {
            return Err("a window is required: --rates, --poles or --lambda".into())
        }
    };
    let rates = match (family, &a.rates, &a.poles, a.lambda) {
        (Family::Eb, Some(r), _, _) | (Family::Tp, _, Some(r), _) => r.clone(),
        (_, _, _, Some(l)) => vec![l, -l],
        _ => return Err(format!("no rates given for the {family:?} family").into()),
    };
    Ok(match family {
        Family::Eb => BuiltWindow::Eb(windows::build_eb_spline(&rates)?),
        Family::Tp => BuiltWindow::Tp(windows::build_tp_window(&rates, a.c)?),
    })
}

fn csv_line(out: &mut String, fields: &[String]) {
    let _ = writeln!(out, "{}", fields.join(","));
}

/// Shortest decimal that parses back to the same `f64`.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn cmd_spline(a: &SplineArgs) -> CliResult<Output> {
    let w = windows::build_eb_spline(&a.rates)?;
    if a.samples < 2 {
        return Err("--samples must be at least 2".into());
    }
    let m = w.order as f64;
    let xs: Vec<f64> = (0..a.samples)
        .map(|i| m * i as f64 / (a.samples - 1) as f64)
        .collect();
    let values: Vec<f64> = xs.iter().map(|&x| w.evaluate(x)).collect();
    let mut residuals = json!({});
    let mut failures = Vec::new();
    if a.check_cm {
        let mut dev = 0.0f64;
        for (&x, &v) in xs.iter().zip(&values) {
            dev = dev.max((windows::christensen_massopust(&w.rates, x)? - v).abs());
        }
        residuals["christensen_massopust_max_deviation"] = json!(dev);
        if !(dev <= CM_TOL) {
            failures.push(format!(
                "Christensen–Massopust deviation {dev:e} > {CM_TOL:e}"
            ));
        }
    }
    let mut csv = String::from("x,value\n");
    for (&x, &v) in xs.iter().zip(&values) {
        csv_line(&mut csv, &[num(x), num(v)]);
    }
    Ok(Output {
        config: json!({ "command": "spline", "rates": a.rates, "samples": a.samples, "check_cm": a.check_cm }),
        result: json!({
            "rates": w.rates,
            "order": w.order,
            "piecewise": w.shape,
            "samples": xs.iter().zip(&values).map(|(x, v)| [*x, *v]).collect::<Vec<_>>(),
        }),
        residuals,
        csv,
        failures,
    })
}

fn cmd_zak(action: &ZakCommand) -> CliResult<Output> {
    match action {
        ZakCommand::Eval {
            window,
            alpha,
            grid,
        } => {
            let built = resolve_window(window)?;
            let e = ZakEvaluator::new(built.as_window(), *alpha)?;
            let mut csv = String::from("x,omega,abs,re,im\n");
            let mut rows = Vec::new();
            for i in 0..*grid {
                let x = alpha * i as f64 / *grid as f64;
                for j in 0..*grid {
                    let omega = j as f64 / (alpha * *grid as f64);
                    let z = e.zak(x, omega);
                    csv_line(
                        &mut csv,
                        &[num(x), num(omega), num(z.norm()), num(z.re), num(z.im)],
                    );
                    rows.push([x, omega, z.norm(), z.re, z.im]);
                }
            }
            Ok(Output {
                config: json!({ "command": "zak eval", "window": window, "alpha": alpha, "grid": grid }),
                result: json!({ "columns": ["x", "omega", "abs", "re", "im"], "rows": rows }),
                residuals: json!({ "tail_bound": e.tail_bound() }),
                csv,
                failures: Vec::new(),
            })
        }
        ZakCommand::Zero {
            window,
            alpha,
            grid,
        } => {
            let built = resolve_window(window)?;
            let report = match &built {
                BuiltWindow::Eb(w) => {
                    let e = ZakEvaluator::new(w.clone(), *alpha)?;
                    zak::locate_zero_on_half_line(&e, *grid)?
                }
                BuiltWindow::Tp(w) => zak::locate_zero_tp(w, *alpha, *grid)?,
            };
            let mut failures = Vec::new();
            if !(report.residual <= ZERO_TOL) {
                failures.push(format!(
                    "|Z| at the zero is {:e} > {ZERO_TOL:e}",
                    report.residual
                ));
            }
            let mut csv = String::from(
                "alpha,x_zero,omega_zero,residual,min_modulus_off_zero,max_modulus,grid\n",
            );
            csv_line(
                &mut csv,
                &[
                    num(report.alpha),
                    num(report.x_zero),
                    num(report.omega_zero),
                    num(report.residual),
                    num(report.min_modulus_off_zero),
                    num(report.max_modulus),
                    report.grid_resolution.to_string(),
                ],
            );
            Ok(Output {
                config: json!({ "command": "zak zero", "window": window, "alpha": alpha, "grid": grid }),
                residuals: json!({ "zero_modulus": report.residual }),
                result: serde_json::to_value(&report)?,
                csv,
                failures,
            })
        }
        ZakCommand::Verify {
            window,
            alpha,
            samples,
        } => {
            let built = resolve_window(window)?;
            let e = ZakEvaluator::new(built.as_window(), *alpha)?;
            let r = zak::verify_zak_identities(&e, *samples)?;
            let mut failures = Vec::new();
            if !(r.max_residual <= ZAK_IDENTITY_TOL) {
                failures.push(format!(
                    "identity residual {:e} > {ZAK_IDENTITY_TOL:e}",
                    r.max_residual
                ));
            }
            let mut csv = String::from("identity,residual\n");
            csv_line(&mut csv, &["periodicity".into(), num(r.periodicity)]);
            csv_line(
                &mut csv,
                &["quasi_periodicity".into(), num(r.quasi_periodicity)],
            );
            csv_line(&mut csv, &["scaling".into(), num(r.scaling)]);
            if let Some(f) = r.fourier {
                csv_line(&mut csv, &["fourier".into(), num(f)]);
            }
            Ok(Output {
                config: json!({ "command": "zak verify", "window": window, "alpha": alpha, "samples": samples }),
                residuals: json!({ "max_residual": r.max_residual }),
                result: serde_json::to_value(&r)?,
                csv,
                failures,
            })
        }
        ZakCommand::FactorCheck {
            window,
            alpha,
            grid,
        } => {
            let BuiltWindow::Tp(tp) = resolve_window(&WindowArgs {
                family: Some(window.family.unwrap_or(Family::Tp)),
                ..window.clone()
            })?
            else {
                return Err("factor-check needs a totally positive window (--poles)".into());
            };
            let res = zak::factorization_residual(&tp, *alpha, *grid)?;
            let mut failures = Vec::new();
            if !(res <= FACTOR_TOL) {
                failures.push(format!("factorization residual {res:e} > {FACTOR_TOL:e}"));
            }
            let csv = format!(
                "alpha,grid,max_residual\n{},{},{}\n",
                num(*alpha),
                grid,
                num(res)
            );
            Ok(Output {
                config: json!({ "command": "zak factor-check", "window": window, "alpha": alpha, "grid": grid }),
                result: json!({
                    "pole_rates": tp.pole_rates,
                    "spline_rates": zak::associated_spline_rates(&tp, *alpha),
                }),
                residuals: json!({ "max_residual": res }),
                csv,
                failures,
            })
        }
    }
}

fn cmd_dual(a: &DualArgs) -> CliResult<Output> {
    let w = windows::build_eb_spline(&a.rates)?;
    let lat = resolve_lattice(&a.lattice)?;
    let d = gramian::dual_window(&w, &lat, a.grid_points, a.extra_cols)?;
    let samples = d.samples();
    let mut csv = String::from("x,gamma,boundary\n");
    for s in &samples {
        csv_line(
            &mut csv,
            &[num(s.x), num(s.value), (s.boundary as u8).to_string()],
        );
    }
    let mut failures = Vec::new();
    if !(d.max_residual <= DUAL_TOL) {
        failures.push(format!(
            "duality residual {:e} > {DUAL_TOL:e}",
            d.max_residual
        ));
    }
    Ok(Output {
        config: json!({
            "command": "dual",
            "rates": a.rates,
            "lattice": lat,
            "grid_points": a.grid_points,
            "extra_cols": a.extra_cols,
        }),
        result: json!({
            "case": d.case,
            "interval": d.interval,
            "wiener_norm_estimate": d.wiener_norm_estimate,
            "samples": samples,
        }),
        residuals: json!({ "max_duality_residual": d.max_residual }),
        csv,
        failures,
    })
}

fn cmd_bounds(action: &BoundsCommand) -> CliResult<Output> {
    match action {
        BoundsCommand::Formula {
            family,
            lambda,
            lattice,
        } => {
            let lat = resolve_lattice(lattice)?;
            let report = match family {
                FormulaFamily::Eb2 => bounds::closed_form_eb2_report(*lambda, &lat)?,
                FormulaFamily::Case1 => {
                    let mut r = bounds::closed_form_eb2_report(*lambda, &lat)?;
                    r.lower = bounds::lower_bound_case1(*lambda, lat.beta)?;
                    r.method = bounds::BoundMethod::ClosedFormCase1;
                    r
                }
                FormulaFamily::Tp2 => bounds::closed_form_tp2_report(*lambda, &lat)?,
            };
            let csv = format!(
                "family,lambda,alpha,beta,lower\n{},{},{},{},{}\n",
                serde_json::to_value(family)?.as_str().unwrap_or_default(),
                num(*lambda),
                num(lat.alpha),
                num(lat.beta),
                num(report.lower)
            );
            Ok(Output {
                config: json!({ "command": "bounds formula", "family": family, "lambda": lambda, "lattice": lat }),
                result: serde_json::to_value(&report)?,
                residuals: json!({}),
                csv,
                failures: Vec::new(),
            })
        }
        BoundsCommand::Optimal {
            window,
            lattice,
            method,
            grid,
            max_grid,
        } => {
            let lat = resolve_lattice(lattice)?;
            let built = resolve_window(window)?;
            let opts = GridOptions {
                initial: *grid,
                max: (*max_grid).max(*grid),
                ..GridOptions::default()
            };
            let report = match (&built, method) {
                (BuiltWindow::Tp(tp), OptimalMethod::Rational) => {
                    bounds::transferred_optimal_tp(tp, &lat, &opts)?
                }
                (_, OptimalMethod::Rational) => {
                    bounds::optimal_bound_rational_with(&built.as_window(), &lat, &opts)?
                }
                (_, OptimalMethod::Highredundancy) => {
                    bounds::optimal_bound_highredundancy(&built.as_window(), &lat)?
                }
                (_, OptimalMethod::Zak) => {
                    let n = (1.0 / lat.beta).round();
                    if lat.alpha != 1.0 || (n * lat.beta - 1.0).abs() > 1e-12 {
                        return Err("the Zak method needs alpha = 1 and beta = 1/N".into());
                    }
                    bounds::optimal_bound_zak_subsampled_with(
                        &built.as_window(),
                        n as usize,
                        &opts,
                    )?
                }
            };
            let mut csv = String::from("method,alpha,beta,lower,upper,n_x,n_omega,max_residual\n");
            csv_line(
                &mut csv,
                &[
                    serde_json::to_value(report.method)?
                        .as_str()
                        .unwrap_or_default()
                        .to_string(),
                    num(report.lattice.alpha),
                    num(report.lattice.beta),
                    num(report.lower),
                    report.upper.map(num).unwrap_or_default(),
                    report.grid.0.to_string(),
                    report.grid.1.to_string(),
                    num(report.max_residual),
                ],
            );
            Ok(Output {
                config: json!({
                    "command": "bounds optimal",
                    "window": window,
                    "lattice": lat,
                    "method": method,
                    "grid": opts,
                }),
                residuals: json!({ "grid_refinement_delta": report.max_residual }),
                result: serde_json::to_value(&report)?,
                csv,
                failures: Vec::new(),
            })
        }
        BoundsCommand::Figure3 {
            lambda,
            grid,
            max_grid,
        } => {
            let opts = GridOptions {
                initial: *grid,
                max: (*max_grid).max(*grid),
                ..GridOptions::default()
            };
            let rows = bounds::figure3_sweep(*lambda, 61, 31..=60, &opts)?;
            let mut csv = String::from("panel,k,beta,A_formula,A_opt,B_opt\n");
            let mut failures = Vec::new();
            for (panel, pick) in [("eb", 0usize), ("tp", 1)] {
                for r in &rows {
                    let (f, lo, up) = if pick == 0 {
                        (r.eb_formula, r.eb_optimal_lower, r.eb_optimal_upper)
                    } else {
                        (r.tp_formula, r.tp_optimal_lower, r.tp_optimal_upper)
                    };
                    if !(f <= lo && lo <= up) {
                        failures.push(format!(
                            "{panel} k = {}: formula {f:e}, optimal [{lo:e}, {up:e}]",
                            r.k
                        ));
                    }
                    csv_line(
                        &mut csv,
                        &[
                            panel.into(),
                            r.k.to_string(),
                            num(r.beta),
                            num(f),
                            num(lo),
                            num(up),
                        ],
                    );
                }
            }
            let worst = rows.iter().map(|r| r.max_residual).fold(0.0, f64::max);
            Ok(Output {
                config: json!({ "command": "bounds figure3", "lambda": lambda, "alpha": 1.0, "beta_den": 61, "k": [31, 60], "grid": opts }),
                result: serde_json::to_value(&rows)?,
                residuals: json!({ "grid_refinement_delta": worst, "ordering_violations": failures.len() }),
                csv,
                failures,
            })
        }
    }
}
