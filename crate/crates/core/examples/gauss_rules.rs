//! Gauss rules for each supported family and a check of their exactness.

use quadsub::orthopoly::{MarginalDistribution, PolynomialFamily};
use quadsub::quadrature::gauss_rule;

fn main() -> quadsub::Result<()> {
    let families = [
        MarginalDistribution::uniform(),
        MarginalDistribution::chebyshev(),
        MarginalDistribution::beta(1.0, 1.0)?,
        MarginalDistribution::Gaussian,
        MarginalDistribution::Exponential,
    ];
    let n = 5;
    for dist in families {
        let fam = PolynomialFamily::build(dist, 2 * n)?;
        let rule = gauss_rule(&fam, n)?;
        // phi_{2n-1} integrates to zero against the constant
        let moment = rule.integrate(|x| fam.evaluate(2 * n - 1, x).unwrap());
        println!("{dist}");
        for (x, w) in rule.nodes().iter().zip(rule.weights()) {
            println!("  {x:>12.8}  {w:.8}");
        }
        println!("  integral of phi_{} = {moment:.2e}", 2 * n - 1);
    }
    Ok(())
}
