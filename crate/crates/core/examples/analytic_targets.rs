//! Reference coefficients of the analytic test functions and how well a
//! subsampled design reproduces them.

use quadsub::bpsolver::{basis_pursuit, l2_error, SolverConfig};
use quadsub::design::assemble;
use quadsub::indexset::total_degree;
use quadsub::models::{TargetFunction, TargetName};
use quadsub::orthopoly::{MarginalDistribution, PolynomialFamily};
use quadsub::quadrature::tensor_rule;
use quadsub::sampling::subsample_gauss;

fn main() -> quadsub::Result<()> {
    let cases = [
        (TargetName::Rosenbrock, MarginalDistribution::uniform(), 4),
        (TargetName::GaussBump, MarginalDistribution::Gaussian, 8),
        (TargetName::ExpLinear, MarginalDistribution::Gaussian, 8),
    ];
    for (name, dist, degree) in cases {
        let target = TargetFunction::analytic(name)?;
        let fam = PolynomialFamily::build(dist, degree + 1)?;
        let families = vec![fam.clone(), fam];
        let set = total_degree(2, degree)?;
        let reference = target.reference_coefficients(&families, &set)?;
        let rule = tensor_rule(&families, &[degree + 1, degree + 1])?;
        let big = reference.iter().filter(|c| c.abs() > 1e-8).count();
        print!("{name:>10}: N={} nonzero={big}  l2 error by M:", set.len());
        for m in [set.len() / 3, 2 * set.len() / 3, set.len()] {
            let system = assemble(subsample_gauss(&rule, m, 3)?, &families, &set, &|x| {
                target.evaluate(x)
            })?;
            let got = basis_pursuit(&system, &SolverConfig::default())?;
            print!("  {m}: {:.2e}", l2_error(&got.coefficients, &reference));
        }
        println!();
    }
    Ok(())
}
