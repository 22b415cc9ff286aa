//! Second moment of u(1, x) for du/dt = -beta x u with x standard normal.

use quadsub::harness::{run, Experiment, ExperimentConfig};
use quadsub::models::{ode_qoi_exact, ODE_BETA, ODE_TIME};
use quadsub::sampling::Strategy;

fn main() -> quadsub::Result<()> {
    let cfg = ExperimentConfig {
        strategies: vec![Strategy::GaussSubsample, Strategy::RandomOrthogonality],
        m_values: vec![10, 20, 30],
        trials: 20,
        ..ExperimentConfig::defaults(Experiment::OdeStudy)
    };
    println!("exact E[u^2] = {:.6}", ode_qoi_exact(ODE_BETA, ODE_TIME));
    for a in run(&cfg)?.aggregates() {
        println!(
            "{:>8} M={:>2}  mean Q {:.6}  mean |Q - exact| {:.2e}",
            a.strategy.name(),
            a.m,
            a.mean_qoi.unwrap_or(f64::NAN),
            a.mean_qoi_err.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
