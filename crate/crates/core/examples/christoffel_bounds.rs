//! Uniform bounds L(n) on Christoffel-weighted polynomials, and the
//! sample count they imply.

use quadsub::bounds::{
    bound_curve, fit_localization_constant, product_bound, ratio_band, sample_count,
};
use quadsub::orthopoly::MarginalDistribution;

fn main() -> quadsub::Result<()> {
    for dist in [
        MarginalDistribution::uniform(),
        MarginalDistribution::Gaussian,
        MarginalDistribution::Exponential,
    ] {
        let curve = bound_curve(dist, 60)?;
        print!("{dist:>12}:");
        for r in curve.iter().filter(|r| r.n % 10 == 0) {
            print!(" L({})={:.3}", r.n, r.value);
        }
        println!();
        if !dist.support().0.is_finite() || !dist.support().1.is_finite() {
            println!(
                "{:>12}  L(n)/n^(2/3) band {:.3}",
                "",
                ratio_band(&curve[9..], 2.0 / 3.0)
            );
            println!(
                "{:>12}  localization constant {:.3}",
                "",
                fit_localization_constant(dist, &[10, 20, 40])?
            );
        }
    }

    // Two Legendre dimensions with 21 points each, 10-sparse in 231 coefficients.
    let leg = bound_curve(MarginalDistribution::uniform(), 21)?;
    let l = product_bound(&[leg[20], leg[20]]);
    let criterion = sample_count(l, 10.0, 231.0, 1.0)?;
    println!(
        "product bound {l:.3}, M >= {:.1} samples up to the constant",
        criterion.m_required
    );
    Ok(())
}
