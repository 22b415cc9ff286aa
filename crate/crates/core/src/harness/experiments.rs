use rayon::prelude::*;

use super::config::{Experiment, ExperimentConfig};
use super::output::{Aggregate, ExperimentOutput, Row, TrialRecord};
use crate::bpsolver::{basis_pursuit, l2_error, max_abs_error, recovery_success};
use crate::design::{assemble, MemoizedTarget};
use crate::error::{usage, Error, Result};
use crate::indexset::{total_degree, MultiIndexSet};
use crate::models::{make_sparse_target, ode_qoi, ode_qoi_exact, TargetFunction, TargetName};
use crate::orthopoly::PolynomialFamily;
use crate::quadrature::{tensor_rule, TensorRule};
use crate::sampling::{derive_seed, draw_samples, Strategy};

const SAMPLE_STREAM: u64 = 1;
const TARGET_STREAM: u64 = 2;

/// Everything shared by the trials of one experiment.
struct Setup {
    families: Vec<PolynomialFamily>,
    set: MultiIndexSet,
    rule: TensorRule,
    /// Fixed target and its reference coefficients; `None` for sparse targets.
    fixed: Option<(TargetFunction, Vec<f64>)>,
}

impl Setup {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let n = cfg.grid_size();
        let families = vec![PolynomialFamily::build(cfg.distribution, n)?; cfg.d];
        let set = total_degree(cfg.d, cfg.degree)?;
        let rule = tensor_rule(&families, &vec![n; cfg.d])?;
        let fixed = match cfg.target {
            TargetName::Sparse => None,
            name => {
                let target = TargetFunction::analytic(name)?;
                let reference = target.reference_coefficients(&families, &set)?;
                Some((target, reference))
            }
        };
        Ok(Self {
            families,
            set,
            rule,
            fixed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Combo {
    strategy: Strategy,
    m: usize,
    s: Option<usize>,
}

fn combos(cfg: &ExperimentConfig) -> Vec<Combo> {
    let s_list: Vec<Option<usize>> = if cfg.target == TargetName::Sparse {
        cfg.s_values.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let mut out = Vec::new();
    for &s in &s_list {
        for &m in &cfg.m_values {
            for &strategy in &cfg.strategies {
                out.push(Combo { strategy, m, s });
            }
        }
    }
    out
}

fn run_trial(
    cfg: &ExperimentConfig,
    setup: &Setup,
    combo: Combo,
    trial: usize,
    dump: bool,
) -> Result<TrialRecord> {
    let key = [
        trial as u64,
        combo.strategy.tag(),
        combo.m as u64,
        combo.s.unwrap_or(0) as u64,
    ];
    let sample_seed = derive_seed(cfg.seed, &[&[SAMPLE_STREAM][..], &key].concat());
    let drawn;
    let (target, reference) = match (&setup.fixed, combo.s) {
        (Some((t, c)), _) => (t, c.as_slice()),
        (None, Some(s)) => {
            // Shared by every strategy and M within a trial, so they are compared on the same target.
            let target_seed = derive_seed(cfg.seed, &[TARGET_STREAM, trial as u64, s as u64]);
            drawn = make_sparse_target(&setup.set, &setup.families, s, target_seed)?;
            let TargetFunction::SparseSynthetic { coefficients, .. } = &drawn else {
                unreachable!("make_sparse_target returns a sparse target")
            };
            (&drawn, coefficients.as_slice())
        }
        (None, None) => return Err(usage("sparse targets need a sparsity level")),
    };

    let samples = draw_samples(
        combo.strategy,
        &setup.families,
        &setup.rule,
        combo.m,
        sample_seed,
    )?;
    let f = |x: &[f64]| target.evaluate(x);
    let memo = MemoizedTarget::new(&f);
    let system = assemble(samples, &setup.families, &setup.set, &|x| memo.eval(x))?;
    if dump {
        if let Some(path) = &cfg.dump_design {
            system.write_csv(path)?;
        }
    }
    let result = basis_pursuit(&system, &cfg.solver)?;
    let c = &result.coefficients;
    let (qoi, qoi_err) = match target {
        TargetFunction::OdeSecondMoment { beta, t } => {
            let q = ode_qoi(c);
            (Some(q), Some((q - ode_qoi_exact(*beta, *t)).abs()))
        }
        _ => (None, None),
    };
    Ok(TrialRecord {
        trial,
        strategy: combo.strategy,
        m: combo.m,
        s: combo.s,
        err_inf: max_abs_error(c, reference),
        err_l2: l2_error(c, reference),
        success: recovery_success(c, reference, cfg.threshold),
        iterations: result.iterations,
        converged: result.converged,
        seed: sample_seed,
        qoi,
        qoi_err,
    })
}

/// Runs every (s, M, strategy) combination for `cfg.trials` trials. Trials run
/// in parallel; rows come back in combination and trial order.
fn run_all(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    cfg.validate()?;
    let setup = Setup::new(cfg)?;
    let combos = combos(cfg);
    let jobs: Vec<(usize, usize)> = (0..combos.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let results: Vec<Result<TrialRecord>> = jobs
        .par_iter()
        .map(|&(c, t)| run_trial(cfg, &setup, combos[c], t, c == 0 && t == 0))
        .collect();

    let mut rows = Vec::new();
    for (combo, chunk) in combos.iter().zip(results.chunks(cfg.trials)) {
        let mut records = Vec::with_capacity(chunk.len());
        let mut failure = None;
        for r in chunk {
            match r {
                Ok(rec) => records.push(rec.clone()),
                Err(Error::Numerical(msg)) => return Err(Error::Numerical(msg.clone())),
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
        if let Some(message) = failure {
            log::warn!(
                "{} M={} s={:?}: {message}",
                combo.strategy,
                combo.m,
                combo.s
            );
            rows.push(Row::Error {
                strategy: combo.strategy,
                m: combo.m,
                s: combo.s,
                message,
            });
            continue;
        }
        let aggregate = Aggregate::from_trials(&records).expect("trials >= 1");
        rows.extend(records.into_iter().map(Row::Trial));
        rows.push(Row::Aggregate(aggregate));
    }
    Ok(rows)
}

fn metadata(cfg: &ExperimentConfig) -> Vec<String> {
    let s = &cfg.solver;
    vec![
        cfg.echo(),
        format!(
            "solver=admm abs_tol={:e} rel_tol={:e} max_iter={} penalty={:e}",
            s.abs_tol, s.rel_tol, s.max_iter, s.penalty
        ),
    ]
}

/// Records a soft check in the metadata and logs a warning when it fails.
fn soft_check(meta: &mut Vec<String>, label: String, ok: bool) {
    if !ok {
        log::warn!("soft check failed: {label}");
    }
    meta.push(format!(
        "soft-check {label} status={}",
        if ok { "ok" } else { "WARN" }
    ));
}

/// Success rates as a function of sparsity at fixed `M`.
pub fn run_recovery_rate(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    if cfg.experiment != Experiment::RecoveryRate || cfg.target != TargetName::Sparse {
        return Err(usage("recovery-rate runs sparse targets only"));
    }
    let rows = run_all(cfg)?;
    Ok(ExperimentOutput {
        metadata: metadata(cfg),
        rows,
    })
}

/// Mean coefficient errors as a function of `M`.
pub fn run_error_vs_m(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    if cfg.experiment != Experiment::ErrorVsM {
        return Err(usage("configuration is not an error-vs-m experiment"));
    }
    let rows = run_all(cfg)?;
    let mut out = ExperimentOutput {
        metadata: metadata(cfg),
        rows,
    };
    // Gauss subsampling is expected to beat unweighted uniform sampling.
    if cfg.strategies.contains(&Strategy::GaussSubsample)
        && cfg.strategies.contains(&Strategy::UniformUnweighted)
    {
        let mut checks = Vec::new();
        for a in out
            .aggregates()
            .filter(|a| a.strategy == Strategy::GaussSubsample)
        {
            if let Some(u) = out.aggregate(Strategy::UniformUnweighted, a.m, a.s) {
                checks.push((
                    format!(
                        "gauss<=uniform m={} s={}",
                        a.m,
                        a.s.map(|s| s.to_string()).unwrap_or_default()
                    ),
                    a.mean_err_inf <= u.mean_err_inf,
                ));
            }
        }
        for (label, ok) in checks {
            soft_check(&mut out.metadata, label, ok);
        }
    }
    Ok(out)
}

/// Quantity of interest of the random decay ODE as a function of `M`.
pub fn run_ode_study(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    if cfg.experiment != Experiment::OdeStudy {
        return Err(usage("configuration is not an ODE study"));
    }
    let rows = run_all(cfg)?;
    let mut out = ExperimentOutput {
        metadata: metadata(cfg),
        rows,
    };
    let mut checks = Vec::new();
    for &strategy in &cfg.strategies {
        let err = |m| {
            out.aggregate(strategy, m, None)
                .and_then(|a| a.mean_qoi_err)
        };
        if let (Some(e5), Some(e25)) = (err(5), err(25)) {
            checks.push((
                format!("qoi_err(25)<=qoi_err(5) strategy={strategy}"),
                e25 <= e5,
            ));
        }
    }
    for (label, ok) in checks {
        soft_check(&mut out.metadata, label, ok);
    }
    Ok(out)
}

/// Dispatches on `cfg.experiment`.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.experiment {
        Experiment::RecoveryRate => run_recovery_rate(cfg),
        Experiment::ErrorVsM => run_error_vs_m(cfg),
        Experiment::OdeStudy => run_ode_study(cfg),
        Experiment::BoundTable => Err(usage("bound tables are produced by the bound subcommand")),
    }
}
