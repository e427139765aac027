use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use whlab::coeffs::{b_coeff, b_d_coeff, comparison_limit, v1, v1_ray_counting, BOptions, Restriction};
use whlab::entropy::{entanglement_entropy, entropy_density, local_entropy};
use whlab::lab::{
    compare_to_theory, fit_log_slope, read_csv, run_sweep, theory_slope, Config, Predictor, Quantity, Regime, Response,
};
use whlab::symbols::{verify_condition_at, Dispersion, SampleSpec};
use whlab::whop::{trace_d, GridMethod, GridSpec};
use whlab::{Error, Result};

/// Truncated Wiener-Hopf operators: traces, asymptotic coefficients and
/// entropy scaling experiments.
#[derive(Parser)]
#[command(name = "whlab", version)]
struct Cli {
    /// TOML file with [regions], [symbols], [functions] and [plans.*].
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV and JSON artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[arg(long, global = true)]
    override_memory_guard: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Boundary coefficients.
    #[command(subcommand)]
    Coeff(CoeffCmd),
    /// A single regularized trace tr D_α(a, Λ; f).
    Trace {
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        region: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        f: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    #[command(subcommand)]
    Entropy(EntropyCmd),
    /// Run a plan from the config file and write its CSV.
    Sweep {
        #[arg(long)]
        plan: String,
    },
    /// Log-slope fit of a sweep CSV.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, value_enum)]
        predictor: PredictorArg,
        #[arg(long, value_enum, default_value = "remainder")]
        response: ResponseArg,
        /// Spatial dimension of the sweep.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Theory slope; otherwise computed from --f, --lambda and --omega.
        #[arg(long)]
        theory: Option<f64>,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        omega: Option<String>,
        /// Double the theory slope (entanglement sweeps).
        #[arg(long)]
        entanglement: bool,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
    },
    /// Check the smoothness bounds of a symbol near its boundary.
    VerifySymbol {
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
    },
}

#[derive(Subcommand)]
enum CoeffCmd {
    /// 𝔙₁ with b ≡ 1 by boundary quadrature.
    V1 {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        omega: String,
        #[arg(long, default_value_t = 128)]
        nodes: usize,
    },
    /// 𝔙₁ by random ray counting.
    V1Mc {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        omega: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// 𝓑(a; f) of a one-dimensional symbol.
    B {
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        f: String,
        #[command(flatten)]
        b: BArgs,
    },
    /// 𝓑_d(a; ∂Λ, f).
    Bd {
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
        #[command(flatten)]
        b: BArgs,
    },
    /// 𝓑_d(a_T)/log(1/T) against U(f)·𝔙₁ along a temperature schedule.
    CompareLimit {
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        f: String,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025,0.0125")]
        temps: Vec<f64>,
        #[command(flatten)]
        b: BArgs,
    },
}

#[derive(Subcommand)]
enum EntropyCmd {
    Density {
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long = "T")]
        temperature: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    Local {
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long = "T")]
        temperature: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long)]
        region: String,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    Ee {
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long = "T")]
        temperature: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long)]
        region: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 4.0)]
        kappa: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Args)]
struct GridArgs {
    /// Total node count (1D).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    points_per_unit: Option<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    #[arg(long)]
    no_two_grid: bool,
    #[arg(long, default_value_t = 20_000)]
    max_rows: usize,
}

#[derive(Args)]
struct BArgs {
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 10)]
    levels: usize,
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Grid,
    Sectors,
}

#[derive(Clone, Copy, ValueEnum)]
enum PredictorArg {
    LogAlpha,
    LogInvT,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResponseArg {
    Trace,
    Remainder,
}

impl BArgs {
    fn opts(&self) -> BOptions {
        BOptions { theta: self.theta, levels: self.levels, rel_tol: self.rel_tol }
    }
}

impl GridArgs {
    fn spec(&self, override_guard: bool) -> GridSpec {
        GridSpec {
            points_per_unit: self.points_per_unit,
            total: self.n,
            method: match self.method {
                MethodArg::Auto => GridMethod::Auto,
                MethodArg::Grid => GridMethod::Grid,
                MethodArg::Sectors => GridMethod::Sectors,
            },
            two_grid: !self.no_two_grid,
            max_rows: self.max_rows,
            override_memory_guard: override_guard,
            ..GridSpec::default()
        }
    }
}

struct Ctx {
    config: Config,
    out: Option<PathBuf>,
}

impl Ctx {
    fn emit<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
        let _ = writeln!(std::io::stdout(), "{text}");
        if let Some(dir) = &self.out {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{name}.json")), text + "\n")?;
        }
        Ok(())
    }
}

fn coeff(ctx: &Ctx, cmd: CoeffCmd, seed: u64) -> Result<()> {
    let c = &ctx.config;
    match cmd {
        CoeffCmd::V1 { lambda, omega, nodes } => {
            ctx.emit("v1", &v1(|_, _| 1.0, &c.region(&lambda)?, &c.region(&omega)?, nodes)?)
        }
        CoeffCmd::V1Mc { lambda, omega, samples } => {
            ctx.emit("v1-mc", &v1_ray_counting(&c.region(&lambda)?, &c.region(&omega)?, samples, seed)?)
        }
        CoeffCmd::B { symbol, f, b } => {
            let r = Restriction::of_symbol(&c.symbol(&symbol)?)?;
            ctx.emit("b", &b_coeff(&r, &c.function(&f)?, &b.opts())?)
        }
        CoeffCmd::Bd { symbol, lambda, f, nodes, b } => {
            let q = c.region(&lambda)?.boundary_quadrature(nodes)?;
            ctx.emit("bd", &b_d_coeff(&c.symbol(&symbol)?, &q, &c.function(&f)?, &b.opts())?)
        }
        CoeffCmd::CompareLimit { symbol, lambda, f, temps, b } => {
            let fam = c.family(&symbol)?;
            let omega = fam.omega()?;
            let rep = comparison_limit(|t| fam.at(t), &c.function(&f)?, &c.region(&lambda)?, &omega, &temps, &b.opts())?;
            ctx.emit("compare-limit", &rep)
        }
    }
}

fn entropy(ctx: &Ctx, cmd: EntropyCmd, guard: bool) -> Result<()> {
    let c = &ctx.config;
    match cmd {
        EntropyCmd::Density { gamma, temperature, mu, dim } => {
            let s = entropy_density(gamma, temperature, mu, &Dispersion::quadratic(dim, mu)?)?;
            ctx.emit("entropy-density", &serde_json::json!({ "gamma": gamma, "T": temperature, "mu": mu, "dim": dim, "value": s }))
        }
        EntropyCmd::Local { gamma, temperature, mu, region, alpha, grid } => {
            let r = local_entropy(gamma, temperature, mu, &c.region(&region)?, alpha, &grid.spec(guard))?;
            ctx.emit("entropy-local", &r)
        }
        EntropyCmd::Ee { gamma, temperature, mu, region, alpha, kappa, grid } => {
            let r = entanglement_entropy(gamma, temperature, mu, &c.region(&region)?, alpha, kappa, &grid.spec(guard))?;
            ctx.emit("entropy-ee", &r)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let ctx = Ctx { config, out: cli.out.clone() };
    let guard = cli.override_memory_guard;
    match cli.cmd {
        Cmd::Coeff(c) => coeff(&ctx, c, cli.seed),
        Cmd::Entropy(e) => entropy(&ctx, e, guard),
        Cmd::Trace { symbol, region, alpha, f, grid } => {
            let c = &ctx.config;
            let r = trace_d(&c.symbol(&symbol)?, &c.region(&region)?, alpha, &c.function(&f)?, &grid.spec(guard))?;
            ctx.emit("trace", &r)
        }
        Cmd::Sweep { plan: name } => {
            let mut plan = ctx.config.plan(&name)?;
            plan.grid.override_memory_guard = guard;
            let path = match (&plan.output, &ctx.out) {
                (Some(p), _) => p.clone(),
                (None, Some(dir)) => dir.join(format!("{name}.csv")),
                (None, None) => PathBuf::from(format!("{name}.csv")),
            };
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            let recs = run_sweep(&plan, cli.threads, Some(BufWriter::new(File::create(&path)?)))?;
            let failed = recs.iter().filter(|r| r.error.is_some()).count();
            let summary = serde_json::json!({
                "plan": name,
                "regime": plan.regime,
                "csv": path,
                "points": recs.len(),
                "failed": failed,
            });
            println!("{}", serde_json::to_string_pretty(&summary).map_err(|e| Error::Config(e.to_string()))?);
            Ok(())
        }
        Cmd::Fit { csv, predictor, response, dim, theory, f, lambda, omega, entanglement, tol } => {
            let predictor = match predictor {
                PredictorArg::LogAlpha => Predictor::LogAlpha,
                PredictorArg::LogInvT => Predictor::LogInvT,
            };
            let response = match response {
                ResponseArg::Trace => Response::Trace,
                ResponseArg::Remainder => Response::Remainder,
            };
            let regime = match predictor {
                Predictor::LogAlpha => Regime::SubCritical,
                Predictor::LogInvT => Regime::SuperCritical,
            };
            let theory = match (theory, f, lambda, omega) {
                (Some(t), ..) => Some(t),
                (None, Some(f), Some(l), Some(o)) => {
                    let c = &ctx.config;
                    let q = if entanglement { Quantity::Entanglement } else { Quantity::Trace };
                    Some(theory_slope(&c.function(&f)?, &c.region(&l)?, &c.region(&o)?, q)?)
                }
                _ => None,
            };
            let recs = read_csv(&csv, regime, dim)?;
            let fit = fit_log_slope(&recs, predictor, response, theory)?;
            let report = theory.map(|t| compare_to_theory(fit.slope, t, tol)).transpose()?;
            if let Some(r) = &report {
                eprintln!("{}", r.summary);
            }
            ctx.emit("fit", &serde_json::json!({ "fit": fit, "comparison": report }))
        }
        Cmd::VerifySymbol { symbol, beta } => {
            let r = verify_condition_at(&ctx.config.symbol(&symbol)?, &SampleSpec::default_layers(), beta)?;
            ctx.emit("verify-symbol", &r)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
