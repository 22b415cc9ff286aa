//! Gauss quadrature rules built from recurrence coefficients.
//!
//! Nodes are eigenvalues of the symmetric tridiagonal Jacobi matrix and the
//! weights are the squared first components of its unit eigenvectors
//! (Golub–Welsch). Tensor-product rules are indexed lazily, so grids far
//! larger than memory can still be sampled.

use crate::error::{usage, Error, Result};
use crate::orthopoly::{MarginalDistribution, PolynomialFamily};

/// Sweep limit per eigenvalue in [`tridiag_eigen`].
pub const MAX_SWEEPS: usize = 30;

/// Univariate `n`-point Gauss rule for a probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    distribution: MarginalDistribution,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in ascending order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Distribution of the generating family.
    pub fn distribution(&self) -> MarginalDistribution {
        self.distribution
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// `n`-point Gauss rule of `family`, `1 <= n <= family.max_degree() + 1`.
pub fn gauss_rule(family: &PolynomialFamily, n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(usage("a Gauss rule needs at least one node"));
    }
    if n > family.max_degree() + 1 {
        return Err(usage(format!(
            "{n}-point rule needs recurrence coefficients up to degree {}, family has {}",
            n - 1,
            family.max_degree()
        )));
    }
    let diag = &family.recurrence_a()[..n];
    let offdiag: Vec<f64> = family.recurrence_b()[1..n]
        .iter()
        .map(|b| b.sqrt())
        .collect();
    let (nodes, first) = tridiag_eigen(diag, &offdiag)?;
    let weights = first.iter().map(|v| v * v).collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        distribution: family.distribution(),
    })
}

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal, together with the first component of each unit
/// eigenvector, normalized to be non-negative.
///
/// Implicit-shift QL with Wilkinson shifts; only the first row of the
/// eigenvector matrix is accumulated.
pub fn tridiag_eigen(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if offdiag.len() + 1 != n {
        return Err(usage(format!(
            "tridiagonal matrix of order {n} needs {} off-diagonal entries, got {}",
            n - 1,
            offdiag.len()
        )));
    }
    let mut d = diag.to_vec();
    // e[i] couples rows i and i + 1; e[n - 1] is scratch
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if sweeps == MAX_SWEEPS {
                return Err(Error::Numerical(format!(
                    "tridiagonal QL did not converge for eigenvalue {l} after {MAX_SWEEPS} sweeps"
                )));
            }
            sweeps += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| d[i]).collect();
    let first = order.iter().map(|&i| z[i].abs()).collect();
    Ok((values, first))
}

/// Tensor product of univariate Gauss rules. The grid is never materialized.
///
/// Grid multi-indices are zero based: `k[i]` ranges over `0..sizes[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorRule {
    rules: Vec<QuadratureRule>,
    sizes: Vec<usize>,
}

impl TensorRule {
    pub fn dim(&self) -> usize {
        self.rules.len()
    }

    pub fn rules(&self) -> &[QuadratureRule] {
        &self.rules
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of grid points, `None` on `u128` overflow.
    pub fn cardinality(&self) -> Option<u128> {
        self.sizes
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(n as u128))
    }

    pub fn point(&self, k: &[usize]) -> Vec<f64> {
        assert_eq!(k.len(), self.dim(), "grid index has wrong dimension");
        k.iter()
            .zip(&self.rules)
            .map(|(&ki, rule)| rule.nodes[ki])
            .collect()
    }

    /// Product weight `prod_i w^i_{k_i}`.
    pub fn weight(&self, k: &[usize]) -> f64 {
        assert_eq!(k.len(), self.dim(), "grid index has wrong dimension");
        k.iter()
            .zip(&self.rules)
            .map(|(&ki, rule)| rule.weights[ki])
            .product()
    }

    /// Mixed-radix decoding of a linear grid index (last coordinate fastest).
    pub fn unrank(&self, mut linear: u128) -> Vec<usize> {
        let mut k = vec![0; self.dim()];
        for (slot, &n) in k.iter_mut().zip(&self.sizes).rev() {
            *slot = (linear % n as u128) as usize;
            linear /= n as u128;
        }
        k
    }

    /// Iterates over every grid multi-index; only sensible for small grids.
    pub fn indices(&self) -> GridIter<'_> {
        GridIter {
            sizes: &self.sizes,
            next: Some(vec![0; self.sizes.len()]),
        }
    }
}

pub struct GridIter<'a> {
    sizes: &'a [usize],
    next: Option<Vec<usize>>,
}

impl Iterator for GridIter<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut following = current.clone();
        let mut dim = following.len();
        loop {
            if dim == 0 {
                break;
            }
            dim -= 1;
            following[dim] += 1;
            if following[dim] < self.sizes[dim] {
                self.next = Some(following);
                break;
            }
            following[dim] = 0;
        }
        Some(current)
    }
}

/// Tensor rule with `sizes[i]` nodes in dimension `i`.
pub fn tensor_rule(families: &[PolynomialFamily], sizes: &[usize]) -> Result<TensorRule> {
    if families.len() != sizes.len() {
        return Err(usage(format!(
            "{} families given for a {}-dimensional rule",
            families.len(),
            sizes.len()
        )));
    }
    if families.is_empty() {
        return Err(usage("tensor rule needs at least one dimension"));
    }
    let rules = families
        .iter()
        .zip(sizes)
        .map(|(family, &n)| gauss_rule(family, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(TensorRule {
        rules,
        sizes: sizes.to_vec(),
    })
}
