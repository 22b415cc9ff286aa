use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::bpsolver::{SolverConfig, SUCCESS_THRESHOLD};
use crate::error::{usage, Result};
use crate::models::TargetName;
use crate::orthopoly::MarginalDistribution;
use crate::sampling::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    RecoveryRate,
    ErrorVsM,
    BoundTable,
    OdeStudy,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::RecoveryRate => "recovery-rate",
            Experiment::ErrorVsM => "error-vs-m",
            Experiment::BoundTable => "bound",
            Experiment::OdeStudy => "ode",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Experiment::RecoveryRate,
            Experiment::ErrorVsM,
            Experiment::BoundTable,
            Experiment::OdeStudy,
        ]
        .into_iter()
        .find(|e| e.name() == s)
        .ok_or_else(|| usage(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub distribution: MarginalDistribution,
    pub d: usize,
    /// Total degree of the index set.
    pub degree: usize,
    /// Gauss points per dimension; `None` means `degree + 1`.
    pub grid: Option<usize>,
    pub strategies: Vec<Strategy>,
    pub m_values: Vec<usize>,
    /// Sparsity levels; only used by sparse targets.
    pub s_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub target: TargetName,
    pub solver: SolverConfig,
    pub threshold: f64,
    pub dump_design: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Desk-scale defaults for each experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            distribution: MarginalDistribution::uniform(),
            d: 2,
            degree: 20,
            grid: None,
            strategies: vec![Strategy::GaussSubsample],
            m_values: vec![85],
            s_values: vec![1, 2, 3, 4, 5, 10, 20, 40],
            trials: 100,
            seed: 0,
            target: TargetName::Sparse,
            solver: SolverConfig::default(),
            threshold: SUCCESS_THRESHOLD,
            dump_design: None,
        };
        match experiment {
            Experiment::RecoveryRate | Experiment::BoundTable => base,
            Experiment::ErrorVsM => Self {
                m_values: (20..=120).step_by(20).collect(),
                s_values: vec![5],
                ..base
            },
            Experiment::OdeStudy => Self {
                distribution: MarginalDistribution::Gaussian,
                d: 1,
                degree: 29,
                m_values: (5..=30).step_by(5).collect(),
                s_values: Vec::new(),
                target: TargetName::Ode,
                ..base
            },
        }
    }

    pub fn grid_size(&self) -> usize {
        self.grid.unwrap_or(self.degree + 1)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        self.distribution.validate()?;
        if self.trials == 0 {
            return Err(usage("trials must be >= 1"));
        }
        if self.d == 0 {
            return Err(usage("d must be >= 1"));
        }
        if self.strategies.is_empty() {
            return Err(usage("at least one strategy is required"));
        }
        if self.m_values.is_empty() || self.m_values.contains(&0) {
            return Err(usage("sample counts must be >= 1"));
        }
        if self.target == TargetName::Sparse
            && (self.s_values.is_empty() || self.s_values.contains(&0))
        {
            return Err(usage("sparse targets need sparsity levels >= 1"));
        }
        if self.grid_size() < self.degree + 1 {
            return Err(usage(format!(
                "grid size {} cannot resolve total degree {}",
                self.grid_size(),
                self.degree
            )));
        }
        if !(self.threshold > 0.0) {
            return Err(usage("success threshold must be positive"));
        }
        if self.experiment == Experiment::OdeStudy
            && (self.d != 1
                || self.distribution != MarginalDistribution::Gaussian
                || self.target != TargetName::Ode)
        {
            return Err(usage(
                "the ODE study is one-dimensional with a Hermite basis",
            ));
        }
        Ok(())
    }

    /// One-line echo of the configuration for CSV metadata.
    pub fn echo(&self) -> String {
        let join = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let strategies: Vec<&str> = self.strategies.iter().map(|s| s.name()).collect();
        format!(
            "experiment={} family={} d={} degree={} grid={} strategies={} m={} s={} trials={} seed={} target={} threshold={:e}",
            self.experiment,
            self.distribution,
            self.d,
            self.degree,
            self.grid_size(),
            strategies.join(","),
            join(&self.m_values),
            join(&self.s_values),
            self.trials,
            self.seed,
            self.target,
            self.threshold,
        )
    }
}

/// Parses `a:b:step` (inclusive), `a:b`, a comma list, or a single value.
pub fn parse_grid(text: &str) -> Result<Vec<usize>> {
    let bad = || {
        usage(format!(
            "cannot parse grid '{text}' (expected a:b:step or a,b,c)"
        ))
    };
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let (a, b, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, s] => (num(a)?, num(b)?, num(s)?),
            _ => return Err(bad()),
        };
        if step == 0 || a > b {
            return Err(bad());
        }
        return Ok((a..=b).step_by(step).collect());
    }
    text.split(',').map(num).collect()
}

pub fn parse_strategies(text: &str) -> Result<Vec<Strategy>> {
    if text.trim() == "all" {
        return Ok(Strategy::ALL.to_vec());
    }
    text.split(',').map(|s| s.trim().parse()).collect()
}
