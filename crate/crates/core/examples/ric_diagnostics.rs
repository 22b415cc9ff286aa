//! Brute-force restricted isometry constants of small subsampled designs.

use quadsub::bounds::ric_bruteforce;
use quadsub::design::assemble;
use quadsub::indexset::anisotropic_tensor;
use quadsub::orthopoly::{MarginalDistribution, PolynomialFamily};
use quadsub::quadrature::tensor_rule;
use quadsub::sampling::subsample_gauss;

fn main() -> quadsub::Result<()> {
    let n = 14;
    let fam = PolynomialFamily::build(MarginalDistribution::uniform(), n)?;
    let families = std::slice::from_ref(&fam);
    let rule = tensor_rule(families, &[n])?;
    let set = anisotropic_tensor(&[n - 1])?;
    println!("{:>3} {:>8} {:>8}", "M", "delta_2", "delta_4");
    for m in (6..=n).step_by(2) {
        let system = assemble(subsample_gauss(&rule, m, 5)?, families, &set, &|_| 0.0)?;
        let a = system.normalized_matrix().expect("Gauss subsample");
        println!(
            "{m:>3} {:>8.4} {:>8.4}",
            ric_bruteforce(&a, 2)?,
            ric_bruteforce(&a, 4)?
        );
    }
    Ok(())
}
