//! `lagbs` — command-line front end for the Laguerre-series put pricer.
//!
//! Subcommands: `price`, `coeffs`, `figures`, `validate`, `fd-solve`.
//! Model parameters come from flags, falling back to an optional config file
//! (`key = value` lines, see `--config`), falling back to the reference
//! parameter set σ = 0.25, r = 0.03, K = 3, T = 5. Every run echoes the fully
//! resolved configuration to stderr so outputs are reproducible artifacts.

mod svg;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lagbs::coefficients::build_spectral;
use lagbs::figures::{build_figures, to_csv, FigureGrid};
use lagbs::oracle_fd::{solve_fd, BoundaryChoice};
use lagbs::pricing::{bs_put, payoff_put, price_spectral};
use lagbs::validate;
use lagbs::{EvalPoint, ModelParams, ModelVariant};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "lagbs",
    version,
    about = "European put pricing under square-root and three-halves local volatility"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GlobalArgs {
    /// Config file of `key = value` lines; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Volatility σ.
    #[arg(long, global = true)]
    sigma: Option<f64>,
    /// Risk-free rate r.
    #[arg(long, global = true)]
    rate: Option<f64>,
    /// Strike K.
    #[arg(long, global = true)]
    strike: Option<f64>,
    /// Maturity T in years.
    #[arg(long, global = true)]
    maturity: Option<f64>,
    /// Seed for the randomized validation draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override applied to every validation check.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Price the put at one (t, s) point for each requested variant.
    Price {
        /// Comma-separated variants: standard, sub, supra.
        #[arg(long)]
        variant: Option<String>,
        /// Series truncation order for spectral variants.
        #[arg(long)]
        order: Option<usize>,
        /// Valuation time t (0 = today, T = maturity).
        #[arg(long)]
        t: Option<f64>,
        /// Spot price s.
        #[arg(long)]
        s: Option<f64>,
    },
    /// Dump the series coefficients of one spectral variant as CSV.
    Coeffs {
        /// Variant: sub or supra.
        #[arg(long)]
        variant: Option<String>,
        /// Series truncation order.
        #[arg(long)]
        order: Option<usize>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the four standard figure datasets (CSV, optionally SVG).
    Figures {
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format: csv (canonical) or svg (adds plots next to the CSVs).
        #[arg(long)]
        format: Option<String>,
        /// Spot range as LO:HI.
        #[arg(long, value_name = "LO:HI")]
        s_range: Option<String>,
        /// Number of spot samples.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run the validation suite; nonzero exit if any check fails.
    Validate,
    /// Solve the PDE on a grid with the finite-difference scheme, as CSV.
    FdSolve {
        /// Variant: standard, sub, or supra.
        #[arg(long)]
        variant: Option<String>,
        /// Spot range as 0:S_MAX (the grid must start at 0).
        #[arg(long, value_name = "LO:HI")]
        s_range: Option<String>,
        /// Grid size used for both the spot and the time direction.
        #[arg(long)]
        samples: Option<usize>,
        /// When given, boundary rows are copied from a spectral solution of
        /// this order instead of the discounted-strike/zero defaults.
        #[arg(long)]
        order: Option<usize>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Values read from the optional config file; identical key set to the flags.
#[derive(Default, Clone)]
struct FileConfig {
    sigma: Option<f64>,
    rate: Option<f64>,
    strike: Option<f64>,
    maturity: Option<f64>,
    variant: Option<String>,
    order: Option<usize>,
    t: Option<f64>,
    s: Option<f64>,
    s_range: Option<String>,
    samples: Option<usize>,
    out: Option<PathBuf>,
    format: Option<String>,
    tol: Option<f64>,
    seed: Option<u64>,
}

fn parse_file_config(path: &Path) -> Result<FileConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut cfg = FileConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!(
                "{}:{}: expected `key = value`, got `{raw}`",
                path.display(),
                idx + 1
            );
        };
        let (key, value) = (key.trim(), value.trim());
        macro_rules! parse_into {
            ($field:ident, $ty:ty) => {
                cfg.$field = Some(value.parse::<$ty>().map_err(|e| {
                    anyhow!(
                        "{}:{}: invalid value `{value}` for `{key}`: {e}",
                        path.display(),
                        idx + 1
                    )
                })?)
            };
        }
        match key {
            "sigma" => parse_into!(sigma, f64),
            "rate" => parse_into!(rate, f64),
            "strike" => parse_into!(strike, f64),
            "maturity" => parse_into!(maturity, f64),
            "variant" => cfg.variant = Some(value.to_string()),
            "order" => parse_into!(order, usize),
            "t" => parse_into!(t, f64),
            "s" => parse_into!(s, f64),
            "s_range" => cfg.s_range = Some(value.to_string()),
            "samples" => parse_into!(samples, usize),
            "out" => cfg.out = Some(PathBuf::from(value)),
            "format" => cfg.format = Some(value.to_string()),
            "tol" => parse_into!(tol, f64),
            "seed" => parse_into!(seed, u64),
            other => bail!("{}:{}: unknown key `{other}`", path.display(), idx + 1),
        }
    }
    Ok(cfg)
}

fn parse_s_range(text: &str) -> Result<(f64, f64)> {
    let Some((lo, hi)) = text.split_once(':') else {
        bail!("expected LO:HI, got `{text}`");
    };
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|e| anyhow!("invalid range start `{lo}`: {e}"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|e| anyhow!("invalid range end `{hi}`: {e}"))?;
    Ok((lo, hi))
}

fn parse_variants(text: &str) -> Result<Vec<ModelVariant>> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| ModelVariant::from_str(p).map_err(|e| anyhow!("{e}")))
        .collect()
}

/// Everything resolved: flag beats config file beats reference default.
struct Resolved {
    params: ModelParams,
    cfg: FileConfig,
    global: GlobalArgs,
}

impl Resolved {
    fn new(global: &GlobalArgs) -> Result<Self> {
        let cfg = match &global.config {
            Some(path) => parse_file_config(path)?,
            None => FileConfig::default(),
        };
        let base = ModelParams::default();
        let params = ModelParams::new(
            global.sigma.or(cfg.sigma).unwrap_or(base.sigma),
            global.rate.or(cfg.rate).unwrap_or(base.rate),
            global.strike.or(cfg.strike).unwrap_or(base.strike),
            global.maturity.or(cfg.maturity).unwrap_or(base.maturity),
        )?;
        Ok(Self {
            params,
            cfg,
            global: global.clone(),
        })
    }

    fn seed(&self) -> u64 {
        self.global
            .seed
            .or(self.cfg.seed)
            .unwrap_or(validate::DEFAULT_SEED)
    }

    fn tol(&self) -> Option<f64> {
        self.global.tol.or(self.cfg.tol)
    }

    /// Echo the materialized configuration to stderr (lines of `key = value`).
    fn echo(&self, command: &str, extras: &[(&str, String)]) {
        eprintln!("command = {command}");
        eprintln!("sigma = {}", self.params.sigma);
        eprintln!("rate = {}", self.params.rate);
        eprintln!("strike = {}", self.params.strike);
        eprintln!("maturity = {}", self.params.maturity);
        for (key, value) in extras {
            eprintln!("{key} = {value}");
        }
    }
}

/// Standard-model reference value extended to the closed form's boundary
/// cases: the payoff at maturity and the discounted strike at s = 0.
fn standard_reference(t: f64, s: f64, params: &ModelParams) -> Result<f64> {
    if t == params.maturity {
        Ok(payoff_put(s, params.strike))
    } else if s == 0.0 {
        Ok(params.strike * (-params.rate * (params.maturity - t)).exp())
    } else {
        Ok(bs_put(EvalPoint { t, s }, params)?)
    }
}

fn cmd_price(resolved: &Resolved, variant: Option<String>, order: Option<usize>, t: Option<f64>, s: Option<f64>) -> Result<ExitCode> {
    let variant_text = variant
        .or_else(|| resolved.cfg.variant.clone())
        .unwrap_or_else(|| "sub,supra".to_string());
    let variants = parse_variants(&variant_text)?;
    if variants.is_empty() {
        bail!("no variant requested");
    }
    let order = order.or(resolved.cfg.order).unwrap_or(20);
    let t = t.or(resolved.cfg.t).unwrap_or(0.0);
    let s = s
        .or(resolved.cfg.s)
        .ok_or_else(|| anyhow!("price needs a spot: pass --s or set `s` in the config file"))?;
    resolved.echo(
        "price",
        &[
            ("variant", variant_text.clone()),
            ("order", order.to_string()),
            ("t", t.to_string()),
            ("s", s.to_string()),
        ],
    );

    for variant in &variants {
        let value = match variant {
            ModelVariant::Standard => standard_reference(t, s, &resolved.params)?,
            spectral => {
                let solution = build_spectral(*spectral, &resolved.params, order)?;
                price_spectral(&solution, EvalPoint { t, s })?.value
            }
        };
        println!("{variant} {value}");
    }
    if !variants.contains(&ModelVariant::Standard) {
        println!(
            "standard {}",
            standard_reference(t, s, &resolved.params)?
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_coeffs(resolved: &Resolved, variant: Option<String>, order: Option<usize>, out: Option<PathBuf>) -> Result<ExitCode> {
    let variant_text = variant
        .or_else(|| resolved.cfg.variant.clone())
        .ok_or_else(|| anyhow!("coeffs needs --variant sub or --variant supra"))?;
    let variant = ModelVariant::from_str(variant_text.trim()).map_err(|e| anyhow!("{e}"))?;
    let order = order.or(resolved.cfg.order).unwrap_or(20);
    let out = out.or_else(|| resolved.cfg.out.clone());
    resolved.echo(
        "coeffs",
        &[
            ("variant", variant.to_string()),
            ("order", order.to_string()),
            (
                "out",
                out.as_ref()
                    .map_or_else(|| "-".to_string(), |p| p.display().to_string()),
            ),
        ],
    );

    let solution = build_spectral(variant, &resolved.params, order)?;
    let mut csv = String::from("index,value\n");
    for (index, value) in solution.coeffs().iter().enumerate() {
        let _ = writeln!(csv, "{index},{value}");
    }
    match out {
        Some(path) => fs::write(&path, csv)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_figures(resolved: &Resolved, out: Option<PathBuf>, format: Option<String>, s_range: Option<String>, samples: Option<usize>) -> Result<ExitCode> {
    let out = out
        .or_else(|| resolved.cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("figures"));
    let format = format
        .or_else(|| resolved.cfg.format.clone())
        .unwrap_or_else(|| "csv".to_string());
    if format != "csv" && format != "svg" {
        bail!("unknown format `{format}` (expected csv or svg)");
    }
    let default_grid = FigureGrid::default();
    let (s_lo, s_hi) = match s_range.or_else(|| resolved.cfg.s_range.clone()) {
        Some(text) => parse_s_range(&text)?,
        None => (default_grid.s_lo, default_grid.s_hi),
    };
    let samples = samples
        .or(resolved.cfg.samples)
        .unwrap_or(default_grid.samples);
    let grid = FigureGrid { s_lo, s_hi, samples };
    resolved.echo(
        "figures",
        &[
            ("out", out.display().to_string()),
            ("format", format.clone()),
            ("s_range", format!("{s_lo}:{s_hi}")),
            ("samples", samples.to_string()),
        ],
    );

    let figures = build_figures(&resolved.params, &grid)?;
    fs::create_dir_all(&out)
        .with_context(|| format!("cannot create output directory {}", out.display()))?;
    for figure in &figures {
        let csv_path = out.join(format!("{}.csv", figure.name));
        fs::write(&csv_path, to_csv(figure))
            .with_context(|| format!("cannot write {}", csv_path.display()))?;
        println!("{}", csv_path.display());
        if format == "svg" {
            let svg_path = out.join(format!("{}.svg", figure.name));
            fs::write(&svg_path, svg::render(figure))
                .with_context(|| format!("cannot write {}", svg_path.display()))?;
            println!("{}", svg_path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(resolved: &Resolved) -> Result<ExitCode> {
    let seed = resolved.seed();
    let tol = resolved.tol();
    resolved.echo(
        "validate",
        &[
            ("seed", seed.to_string()),
            (
                "tol",
                tol.map_or_else(|| "per-check defaults".to_string(), |t| t.to_string()),
            ),
        ],
    );

    let outcomes = validate::run_all(seed, tol)?;
    let mut failures = 0usize;
    for outcome in &outcomes {
        println!("{outcome}");
        if !outcome.passed {
            failures += 1;
        }
    }
    println!(
        "{} checks, {} passed, {failures} failed",
        outcomes.len(),
        outcomes.len() - failures
    );
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_fd_solve(resolved: &Resolved, variant: Option<String>, s_range: Option<String>, samples: Option<usize>, order: Option<usize>, out: Option<PathBuf>) -> Result<ExitCode> {
    let variant_text = variant
        .or_else(|| resolved.cfg.variant.clone())
        .ok_or_else(|| anyhow!("fd-solve needs --variant standard, sub, or supra"))?;
    let variant = ModelVariant::from_str(variant_text.trim()).map_err(|e| anyhow!("{e}"))?;
    // The cubic supra diffusion blows up with distance, so its default domain
    // stays moderate; the other two variants get the wide domain the
    // closed-form comparisons use.
    let default_s_max = match variant {
        ModelVariant::Supra => 4.0 * resolved.params.strike,
        _ => 12.0 * resolved.params.strike,
    };
    let (s_lo, s_max) = match s_range.or_else(|| resolved.cfg.s_range.clone()) {
        Some(text) => parse_s_range(&text)?,
        None => (0.0, default_s_max),
    };
    if s_lo != 0.0 {
        bail!("the FD grid starts at s = 0; pass --s-range 0:S_MAX");
    }
    let n = samples.or(resolved.cfg.samples).unwrap_or(200);
    let order = order.or(resolved.cfg.order);
    let out = out.or_else(|| resolved.cfg.out.clone());
    resolved.echo(
        "fd-solve",
        &[
            ("variant", variant.to_string()),
            ("s_range", format!("0:{s_max}")),
            ("samples", n.to_string()),
            (
                "order",
                order.map_or_else(|| "-".to_string(), |o| o.to_string()),
            ),
            (
                "out",
                out.as_ref()
                    .map_or_else(|| "-".to_string(), |p| p.display().to_string()),
            ),
        ],
    );

    let spectral = match order {
        Some(order) => Some(build_spectral(variant, &resolved.params, order)?),
        None => None,
    };
    let bc = match &spectral {
        Some(solution) => BoundaryChoice::SpectralMatched(solution),
        None => BoundaryChoice::DiscountedStrike,
    };
    let grid = solve_fd(variant, &resolved.params, s_max, n, n, bc)?;

    let mut csv = String::from("t,s,value\n");
    for (k, &t) in grid.t_nodes.iter().enumerate() {
        for (i, &s) in grid.s_nodes.iter().enumerate() {
            let _ = writeln!(csv, "{t},{s},{}", grid.values[k][i]);
        }
    }
    match out {
        Some(path) => fs::write(&path, csv)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    let resolved = Resolved::new(&cli.global)?;
    match cli.command {
        Command::Price { variant, order, t, s } => cmd_price(&resolved, variant, order, t, s),
        Command::Coeffs { variant, order, out } => cmd_coeffs(&resolved, variant, order, out),
        Command::Figures { out, format, s_range, samples } => {
            cmd_figures(&resolved, out, format, s_range, samples)
        }
        Command::Validate => cmd_validate(&resolved),
        Command::FdSolve { variant, s_range, samples, order, out } => {
            cmd_fd_solve(&resolved, variant, s_range, samples, order, out)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}
