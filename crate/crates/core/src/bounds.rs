//! Sup-norm bounds of Christoffel-weighted polynomials on Gauss grids,
//! Mhaskar–Rakhmanov–Saff numbers, sample-count estimates and brute-force
//! restricted isometry constants.

use libm::tgamma;
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{domain, usage, Result};
use crate::orthopoly::{MarginalDistribution, PolynomialFamily};
use crate::quadrature::gauss_rule;

/// `L(n) = max_{k < n, j} psi_{k,n}(z_j)^2` over the `n` Gauss nodes `z_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub distribution: MarginalDistribution,
    pub n: usize,
    pub value: f64,
    /// Degree attaining the maximum.
    pub arg_k: usize,
    /// Zero-based position of the attaining node in ascending order.
    pub arg_j: usize,
}

pub fn univariate_bound(family: &PolynomialFamily, n: usize) -> Result<BoundReport> {
    let rule = gauss_rule(family, n)?;
    let mut best = BoundReport {
        distribution: family.distribution(),
        n,
        value: f64::NEG_INFINITY,
        arg_k: 0,
        arg_j: 0,
    };
    for (j, &z) in rule.nodes().iter().enumerate() {
        for (k, psi) in family.weighted_values(n, z)?.into_iter().enumerate() {
            if psi * psi > best.value {
                best.value = psi * psi;
                best.arg_k = k;
                best.arg_j = j;
            }
        }
    }
    Ok(best)
}

/// Reports for `n = 1..=n_max`, computed in parallel.
pub fn bound_curve(distribution: MarginalDistribution, n_max: usize) -> Result<Vec<BoundReport>> {
    if n_max == 0 {
        return Err(usage("bound curves need n_max >= 1"));
    }
    let family = PolynomialFamily::build(distribution, n_max)?;
    (1..=n_max)
        .into_par_iter()
        .map(|n| univariate_bound(&family, n))
        .collect()
}

/// `L(n) = prod_i L_i(n_i)`.
pub fn product_bound(reports: &[BoundReport]) -> f64 {
    reports.iter().map(|r| r.value).product()
}

/// `max / min` of `L(n) / n^exponent` over the reports.
pub fn ratio_band(reports: &[BoundReport], exponent: f64) -> f64 {
    let ratios = reports
        .iter()
        .map(|r| r.value / (r.n as f64).powf(exponent));
    let (lo, hi) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    hi / lo
}

/// Exponential weights `exp(-|x|^alpha)` on the line or the half line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MrsWeight {
    TwoSided { alpha: f64 },
    OneSided { alpha: f64 },
}

pub fn mrs_number(weight: MrsWeight, n: usize) -> Result<f64> {
    let (alpha, ratio) = match weight {
        MrsWeight::TwoSided { alpha } => (alpha, tgamma(alpha / 2.0) / tgamma(alpha / 2.0 + 0.5)),
        MrsWeight::OneSided { alpha } => (alpha, tgamma(alpha) / tgamma(alpha + 0.5)),
    };
    if !(alpha > 0.0) || n == 0 {
        return Err(domain(format!(
            "MRS numbers need alpha > 0 and n >= 1, got {alpha}, {n}"
        )));
    }
    Ok((n as f64 * std::f64::consts::PI.sqrt() * ratio).powf(1.0 / alpha))
}

/// Interval containing the `n` Gauss nodes, `a_n (1 + c n^{-2/3})` scaled to
/// the variable of each family.
///
/// The two-sided number refers to the density `exp(-x^2)`, so the standard
/// normal variable carries an extra `sqrt(2)`. The one-sided number refers to
/// the weight `exp(-x)` itself rather than its square root, which places the
/// Laguerre zeros in `[0, 2 a_n]`.
pub fn localization_interval(
    distribution: MarginalDistribution,
    n: usize,
    c: f64,
) -> Result<(f64, f64)> {
    let grow = 1.0 + c * (n as f64).powf(-2.0 / 3.0);
    Ok(match distribution {
        MarginalDistribution::Beta { .. } => (-1.0, 1.0),
        MarginalDistribution::Gaussian => {
            let a = std::f64::consts::SQRT_2
                * mrs_number(MrsWeight::TwoSided { alpha: 2.0 }, n)?
                * grow;
            (-a, a)
        }
        MarginalDistribution::Exponential => (
            0.0,
            2.0 * mrs_number(MrsWeight::OneSided { alpha: 1.0 }, n)? * grow,
        ),
    })
}

/// Smallest `c` such that every `n`-point rule in `ns` lies inside
/// [`localization_interval`]. Bounded families return 0.
pub fn fit_localization_constant(distribution: MarginalDistribution, ns: &[usize]) -> Result<f64> {
    if matches!(distribution, MarginalDistribution::Beta { .. }) {
        return Ok(0.0);
    }
    let n_max = ns.iter().copied().max().unwrap_or(1);
    let family = PolynomialFamily::build(distribution, n_max)?;
    let mut c = f64::NEG_INFINITY;
    for &n in ns {
        let rule = gauss_rule(&family, n)?;
        let (_, hi) = localization_interval(distribution, n, 0.0)?;
        let extreme = rule.nodes().iter().fold(0.0f64, |m, z| m.max(z.abs()));
        c = c.max((extreme / hi - 1.0) * (n as f64).powf(2.0 / 3.0));
    }
    Ok(c)
}

/// `M >= L C_1 s log^3(s) log(N)`, reported rather than enforced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleCountCriterion {
    pub l_product: f64,
    pub s: f64,
    pub n: f64,
    pub c1: f64,
    pub m_required: f64,
}

pub fn sample_count(l_product: f64, s: f64, n: f64, c1: f64) -> Result<SampleCountCriterion> {
    if s < 2.0 || n < 2.0 {
        return Err(usage(format!(
            "sample counts need s >= 2 and N >= 2, got s = {s}, N = {n}"
        )));
    }
    let m_required = l_product * c1 * s * s.ln().powi(3) * n.ln();
    Ok(SampleCountCriterion {
        l_product,
        s,
        n,
        c1,
        m_required,
    })
}

const RIC_MAX_COLUMNS: usize = 16;
const RIC_MAX_SPARSITY: usize = 4;

/// `delta_s`: the largest deviation from 1 of the eigenvalues of `A_S^T A_S`
/// over all supports `|S| <= s`.
pub fn ric_bruteforce(matrix: &DMatrix<f64>, s: usize) -> Result<f64> {
    let n = matrix.ncols();
    if n > RIC_MAX_COLUMNS || s > RIC_MAX_SPARSITY || s == 0 || s > n {
        return Err(usage(format!(
            "brute-force RIC needs 1 <= s <= min(N, {RIC_MAX_SPARSITY}) and N <= {RIC_MAX_COLUMNS}, got s = {s}, N = {n}"
        )));
    }
    let gram = matrix.transpose() * matrix;
    let mut delta = 0.0f64;
    let mut support = Vec::with_capacity(s);
    for size in 1..=s {
        visit_supports(n, size, 0, &mut support, &mut |cols| {
            let block = DMatrix::from_fn(cols.len(), cols.len(), |a, b| gram[(cols[a], cols[b])]);
            for ev in SymmetricEigen::new(block).eigenvalues.iter() {
                delta = delta.max((ev - 1.0).abs());
            }
        });
    }
    Ok(delta)
}

fn visit_supports(
    n: usize,
    size: usize,
    start: usize,
    current: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    if current.len() == size {
        f(current);
        return;
    }
    for j in start..n {
        current.push(j);
        visit_supports(n, size, j + 1, current, f);
        current.pop();
    }
}
