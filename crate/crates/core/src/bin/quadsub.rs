use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use quadsub::bounds::bound_curve;
use quadsub::bpsolver::SolverConfig;
use quadsub::harness::{
    self, parse_grid, parse_strategies, write_bound_csv, write_quad_csv, Experiment,
    ExperimentConfig,
};
use quadsub::orthopoly::{MarginalDistribution, PolynomialFamily};
use quadsub::quadrature::gauss_rule;
use quadsub::{Error, Result};

/// Sparse polynomial chaos recovery from subsampled Gauss quadrature grids.
#[derive(Parser)]
#[command(name = "quadsub", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Success rate against sparsity at fixed M.
    RecoveryRate(RunArgs),
    /// Mean coefficient error against M.
    ErrorVsM(RunArgs),
    /// Second moment of the random decay ODE against M.
    Ode(RunArgs),
    /// Table of L(n) for n = 1..n-max.
    Bound {
        #[arg(long, default_value = "legendre")]
        family: String,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gauss rule nodes and weights.
    Quad {
        #[arg(long, default_value = "legendre")]
        family: String,
        #[arg(long, short)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// legendre, chebyshev, jacobi:g,d, hermite or laguerre
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    /// Total degree of the index set.
    #[arg(long)]
    degree: Option<usize>,
    /// Gauss points per dimension (default degree + 1).
    #[arg(long)]
    grid: Option<usize>,
    /// Comma list of gauss, random, pre-chebyshev, chebyshev, uniform, or all.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long, conflicts_with = "m_grid")]
    m: Option<usize>,
    /// a:b:step or a comma list.
    #[arg(long)]
    m_grid: Option<String>,
    #[arg(long)]
    s_grid: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// monomial1010, rosenbrock, gaussbump, explinear, ode or sparse
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Absolute and relative solver tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Success threshold on the max-norm coefficient error.
    #[arg(long)]
    threshold: Option<f64>,
    /// Writes the design system of the first trial as CSV.
    #[arg(long)]
    dump_design: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self, experiment: Experiment) -> Result<(ExperimentConfig, Option<PathBuf>)> {
        let mut cfg = ExperimentConfig::defaults(experiment);
        if let Some(t) = &self.target {
            cfg.target = t.parse()?;
        }
        if let Some(f) = &self.family {
            cfg.distribution = f.parse()?;
        } else if experiment == Experiment::ErrorVsM && cfg.target.name() != "sparse" {
            cfg.distribution = default_family(cfg.target.name());
        }
        let solver = SolverConfig {
            abs_tol: self.tol.unwrap_or(cfg.solver.abs_tol),
            rel_tol: self.tol.unwrap_or(cfg.solver.rel_tol),
            max_iter: self.max_iter.unwrap_or(cfg.solver.max_iter),
            ..cfg.solver
        };
        let cfg = ExperimentConfig {
            d: self.d.unwrap_or(cfg.d),
            degree: self.degree.unwrap_or(cfg.degree),
            grid: self.grid.or(cfg.grid),
            strategies: match &self.strategy {
                Some(s) => parse_strategies(s)?,
                None => cfg.strategies.clone(),
            },
            m_values: match (self.m, &self.m_grid) {
                (Some(m), _) => vec![m],
                (None, Some(g)) => parse_grid(g)?,
                (None, None) => cfg.m_values.clone(),
            },
            s_values: match &self.s_grid {
                Some(g) => parse_grid(g)?,
                None => cfg.s_values.clone(),
            },
            trials: self.trials.unwrap_or(cfg.trials),
            seed: self.seed.unwrap_or(cfg.seed),
            threshold: self.threshold.unwrap_or(cfg.threshold),
            dump_design: self.dump_design,
            solver,
            ..cfg
        };
        cfg.validate()?;
        Ok((cfg, self.out))
    }
}

/// The family each analytic target was designed for.
fn default_family(target: &str) -> MarginalDistribution {
    match target {
        "gaussbump" | "explinear" | "ode" => MarginalDistribution::Gaussian,
        _ => MarginalDistribution::uniform(),
    }
}

fn output(path: Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn execute(cli: Cli) -> Result<()> {
    let (experiment, args) = match cli.command {
        Command::RecoveryRate(a) => (Experiment::RecoveryRate, a),
        Command::ErrorVsM(a) => (Experiment::ErrorVsM, a),
        Command::Ode(a) => (Experiment::OdeStudy, a),
        Command::Bound { family, n_max, out } => {
            let dist: MarginalDistribution = family.parse()?;
            let reports = bound_curve(dist, n_max)?;
            let meta = vec![format!("experiment=bound family={dist} n_max={n_max}")];
            return write_bound_csv(output(out)?, &meta, &reports);
        }
        Command::Quad { family, n, out } => {
            let dist: MarginalDistribution = family.parse()?;
            if n == 0 {
                return Err(Error::Usage("quadrature rules need n >= 1".into()));
            }
            let rule = gauss_rule(&PolynomialFamily::build(dist, n)?, n)?;
            let meta = vec![format!("experiment=quad family={dist} n={n}")];
            return write_quad_csv(output(out)?, &meta, &rule);
        }
    };
    let (cfg, out) = args.into_config(experiment)?;
    log::info!("{}", cfg.echo());
    let result = harness::run(&cfg)?;
    result.write_csv(output(out)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("quadsub: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
