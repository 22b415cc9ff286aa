//! Recovers a sparse Legendre expansion from 85 of 441 Gauss points.

use quadsub::bpsolver::{basis_pursuit, max_abs_error, SolverConfig};
use quadsub::design::assemble;
use quadsub::indexset::total_degree;
use quadsub::models::{make_sparse_target, TargetFunction};
use quadsub::orthopoly::{MarginalDistribution, PolynomialFamily};
use quadsub::quadrature::tensor_rule;
use quadsub::sampling::subsample_gauss;

fn main() -> quadsub::Result<()> {
    let fam = PolynomialFamily::build(MarginalDistribution::uniform(), 21)?;
    let families = vec![fam.clone(), fam];
    let set = total_degree(2, 20)?;
    let rule = tensor_rule(&families, &[21, 21])?;

    for s in [2, 5, 10, 20] {
        let target = make_sparse_target(&set, &families, s, 7)?;
        let TargetFunction::SparseSynthetic { coefficients, .. } = &target else {
            unreachable!()
        };
        let samples = subsample_gauss(&rule, 85, 11)?;
        let system = assemble(samples, &families, &set, &|x| target.evaluate(x))?;
        let result = basis_pursuit(&system, &SolverConfig::default())?;
        println!(
            "s={s:>2}  max error {:.2e}  iterations {}",
            max_abs_error(&result.coefficients, coefficients),
            result.iterations
        );
    }
    Ok(())
}
