//! Error against M for a Gaussian bump under Hermite chaos, comparing Gauss
//! subsampling with iid Gaussian draws.

use quadsub::harness::{run, Experiment, ExperimentConfig};
use quadsub::models::TargetName;
use quadsub::orthopoly::MarginalDistribution;
use quadsub::sampling::Strategy;

fn main() -> quadsub::Result<()> {
    let cfg = ExperimentConfig {
        distribution: MarginalDistribution::Gaussian,
        d: 2,
        degree: 8,
        target: TargetName::GaussBump,
        strategies: vec![Strategy::GaussSubsample, Strategy::RandomOrthogonality],
        m_values: vec![15, 25, 35, 45],
        trials: 10,
        ..ExperimentConfig::defaults(Experiment::ErrorVsM)
    };
    let out = run(&cfg)?;
    println!("{:>8} {:>4} {:>12}", "strategy", "M", "mean l2 err");
    for a in out.aggregates() {
        println!(
            "{:>8} {:>4} {:>12.3e}",
            a.strategy.name(),
            a.m,
            a.mean_err_l2
        );
    }
    Ok(())
}
