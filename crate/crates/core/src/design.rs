//! Weighted design systems `D c = sqrt(W) f`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{usage, Result};
use crate::indexset::MultiIndexSet;
use crate::orthopoly::PolynomialFamily;
use crate::quadrature::TensorRule;
use crate::sampling::SampleSet;

/// `D = sqrt(W) Psi` together with `rhs = sqrt(W) f` and its provenance.
#[derive(Debug, Clone)]
pub struct DesignSystem {
    matrix: DMatrix<f64>,
    rhs: DVector<f64>,
    samples: SampleSet,
    index_set: MultiIndexSet,
}

impl DesignSystem {
    /// The `M x N` weighted matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    pub fn samples(&self) -> &SampleSet {
        &self.samples
    }

    pub fn index_set(&self) -> &MultiIndexSet {
        &self.index_set
    }

    /// For Gauss subsamples, `sqrt(prod n_i / M) D`: rows hold products of
    /// Christoffel-weighted polynomials divided by `sqrt(M)`, the normalization
    /// under which the expected Gram matrix is the identity.
    pub fn normalized_matrix(&self) -> Option<DMatrix<f64>> {
        let grid = self.samples.grid.as_ref()?;
        let card: f64 = grid.sizes.iter().map(|&n| n as f64).product();
        let m = self.matrix.nrows() as f64;
        Some(&self.matrix * (card / m).sqrt())
    }

    /// Writes `D` and the right-hand side as CSV (`d0..d{N-1},rhs`).
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = (0..self.matrix.ncols()).map(|j| format!("d{j}")).collect();
        header.push("rhs".into());
        writer.write_record(&header)?;
        for m in 0..self.matrix.nrows() {
            let mut row: Vec<String> = self
                .matrix
                .row(m)
                .iter()
                .map(|v| format!("{v:.16e}"))
                .collect();
            row.push(format!("{:.16e}", self.rhs[m]));
            writer.write_record(&row)?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn check_families(families: &[PolynomialFamily], set: &MultiIndexSet) -> Result<Vec<usize>> {
    if families.len() != set.dim() {
        return Err(usage(format!(
            "{} families for a {}-dimensional index set",
            families.len(),
            set.dim()
        )));
    }
    let degrees = set.max_degrees();
    for (i, (family, &deg)) in families.iter().zip(&degrees).enumerate() {
        if deg > family.max_degree() {
            return Err(usage(format!(
                "dimension {i}: index set needs degree {deg}, family supports {}",
                family.max_degree()
            )));
        }
    }
    Ok(degrees)
}

/// Evaluates the multivariate basis at one point, reusing per-dimension buffers.
struct BasisEvaluator<'a> {
    families: &'a [PolynomialFamily],
    set: &'a MultiIndexSet,
    univariate: Vec<Vec<f64>>,
}

impl<'a> BasisEvaluator<'a> {
    fn new(families: &'a [PolynomialFamily], set: &'a MultiIndexSet) -> Result<Self> {
        let degrees = check_families(families, set)?;
        let univariate = degrees.iter().map(|&d| vec![0.0; d + 1]).collect();
        Ok(Self {
            families,
            set,
            univariate,
        })
    }

    fn fill(&mut self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.families.len() {
            return Err(usage(format!(
                "point has dimension {}, basis has {}",
                x.len(),
                self.families.len()
            )));
        }
        for ((family, buf), &xi) in self.families.iter().zip(&mut self.univariate).zip(x) {
            family.fill_values(xi, buf)?;
        }
        for (slot, k) in out.iter_mut().zip(self.set.indices()) {
            *slot = k
                .iter()
                .zip(&self.univariate)
                .map(|(&ki, vals)| vals[ki])
                .product();
        }
        Ok(())
    }
}

/// `phi_k(x)` for every `k` in `set`, in enumeration order.
pub fn evaluate_basis(
    families: &[PolynomialFamily],
    set: &MultiIndexSet,
    x: &[f64],
) -> Result<Vec<f64>> {
    let mut eval = BasisEvaluator::new(families, set)?;
    let mut out = vec![0.0; set.len()];
    eval.fill(x, &mut out)?;
    Ok(out)
}

/// Expansion `sum_j c_j phi_{k(j)}(x)`.
pub fn evaluate_expansion(
    families: &[PolynomialFamily],
    set: &MultiIndexSet,
    coefficients: &[f64],
    x: &[f64],
) -> Result<f64> {
    if coefficients.len() != set.len() {
        return Err(usage(format!(
            "{} coefficients for an index set of size {}",
            coefficients.len(),
            set.len()
        )));
    }
    let basis = evaluate_basis(families, set, x)?;
    Ok(basis.iter().zip(coefficients).map(|(b, c)| b * c).sum())
}

/// Assembles `D` row by row: `D[m][j] = sqrt(w_m) phi_{k(j)}(x_m)` and
/// `rhs[m] = sqrt(w_m) f(x_m)`.
pub fn assemble(
    samples: SampleSet,
    families: &[PolynomialFamily],
    set: &MultiIndexSet,
    f: &dyn Fn(&[f64]) -> f64,
) -> Result<DesignSystem> {
    if let Some(grid) = &samples.grid {
        let envelope = set.envelope();
        for (i, (&need, &have)) in envelope.iter().zip(&grid.sizes).enumerate() {
            if need > have {
                return Err(usage(format!(
                    "dimension {i}: index set envelope {need} exceeds Gauss grid size {have}"
                )));
            }
        }
    }
    let mut eval = BasisEvaluator::new(families, set)?;
    let (m, n) = (samples.len(), set.len());
    let mut entries = vec![0.0; m * n];
    let mut rhs = DVector::zeros(m);
    for (row, (x, w)) in samples.points.iter().zip(&samples.weights).enumerate() {
        let out = &mut entries[row * n..(row + 1) * n];
        eval.fill(x, out)?;
        let sw = w.sqrt();
        out.iter_mut().for_each(|v| *v *= sw);
        rhs[row] = sw * f(x);
    }
    Ok(DesignSystem {
        matrix: DMatrix::from_row_slice(m, n, &entries),
        rhs,
        samples,
        index_set: set.clone(),
    })
}

/// Discrete projection `c_j = sum_k w_k phi_{k(j)}(z_k) f(z_k)` over the
/// full tensor grid of `rule`.
pub fn project_full_grid(
    families: &[PolynomialFamily],
    rule: &TensorRule,
    set: &MultiIndexSet,
    f: &dyn Fn(&[f64]) -> f64,
) -> Result<Vec<f64>> {
    let envelope = set.envelope();
    if rule.dim() != set.dim() {
        return Err(usage(format!(
            "{}-dimensional rule for a {}-dimensional index set",
            rule.dim(),
            set.dim()
        )));
    }
    for (i, (&need, &have)) in envelope.iter().zip(rule.sizes()).enumerate() {
        if need > have {
            return Err(usage(format!(
                "dimension {i}: index set envelope {need} exceeds rule size {have}"
            )));
        }
    }
    let mut eval = BasisEvaluator::new(families, set)?;
    let mut basis = vec![0.0; set.len()];
    let mut coefficients = vec![0.0; set.len()];
    for k in rule.indices() {
        let z = rule.point(&k);
        let scale = rule.weight(&k) * f(&z);
        eval.fill(&z, &mut basis)?;
        for (c, b) in coefficients.iter_mut().zip(&basis) {
            *c += scale * b;
        }
    }
    Ok(coefficients)
}

/// Memoizes a target function by the exact bit pattern of its argument.
pub struct MemoizedTarget<'a> {
    f: &'a dyn Fn(&[f64]) -> f64,
    cache: RefCell<HashMap<Vec<u64>, f64>>,
}

impl<'a> MemoizedTarget<'a> {
    pub fn new(f: &'a dyn Fn(&[f64]) -> f64) -> Self {
        Self {
            f,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let key: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
        if let Some(v) = self.cache.borrow().get(&key) {
            return *v;
        }
        let v = (self.f)(x);
        self.cache.borrow_mut().insert(key, v);
        v
    }

    pub fn cached_points(&self) -> usize {
        self.cache.borrow().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indexset::{anisotropic_tensor, total_degree, MultiIndexSet};
    use crate::orthopoly::MarginalDistribution;
    use crate::quadrature::tensor_rule;
    use crate::sampling::{sample_iid, subsample_gauss, IidMarginal};
    use approx::assert_abs_diff_eq;
    use std::cell::Cell;

    fn uniform(degree: usize) -> PolynomialFamily {
        PolynomialFamily::build(MarginalDistribution::uniform(), degree).unwrap()
    }

    fn gram_deviation(d: &DMatrix<f64>) -> f64 {
        let gram = d.transpose() * d;
        let n = gram.nrows();
        (gram - DMatrix::<f64>::identity(n, n)).amax()
    }

    #[test]
    fn constant_basis_gives_sqrt_weights() {
        let set = MultiIndexSet::from_indices(2, vec![vec![0, 0]]).unwrap();
        let fam = vec![uniform(3), uniform(3)];
        let rule = tensor_rule(&fam, &[3, 3]).unwrap();
        let samples = subsample_gauss(&rule, 4, 1).unwrap();
        let weights = samples.weights.clone();
        let sys = assemble(samples, &fam, &set, &|_| 1.0).unwrap();
        for (m, w) in weights.iter().enumerate() {
            assert_abs_diff_eq!(sys.matrix()[(m, 0)], w.sqrt(), epsilon = 1e-15);
            assert_abs_diff_eq!(sys.rhs()[m], w.sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn univariate_full_grid_is_orthogonal() {
        let fam = vec![uniform(2)];
        let set = total_degree(1, 1).unwrap();
        let rule = tensor_rule(&fam, &[2]).unwrap();
        let samples = subsample_gauss(&rule, 2, 0).unwrap();
        let sys = assemble(samples, &fam, &set, &|x| x[0]).unwrap();
        assert_eq!(sys.matrix().shape(), (2, 2));
        assert!(gram_deviation(sys.matrix()) < 1e-12);
    }

    #[test]
    fn two_dimensional_full_grid_is_orthogonal() {
        let fam = vec![uniform(2), uniform(2)];
        let set = anisotropic_tensor(&[1, 1]).unwrap();
        let rule = tensor_rule(&fam, &[2, 2]).unwrap();
        let samples = subsample_gauss(&rule, 4, 9).unwrap();
        let sys = assemble(samples, &fam, &set, &|_| 0.0).unwrap();
        assert_eq!(sys.matrix().shape(), (4, 4));
        assert!(gram_deviation(sys.matrix()) < 1e-12);
        assert!(gram_deviation(&sys.matrix().transpose()) < 1e-12);
    }

    #[test]
    fn envelope_violation_names_dimension() {
        let fam = vec![uniform(5), uniform(5)];
        let set = anisotropic_tensor(&[1, 3]).unwrap();
        let rule = tensor_rule(&fam, &[2, 3]).unwrap();
        let samples = subsample_gauss(&rule, 3, 0).unwrap();
        let err = assemble(samples, &fam, &set, &|_| 0.0).unwrap_err();
        assert!(err.to_string().contains("dimension 1"), "{err}");
    }

    #[test]
    fn family_degree_violation() {
        let fam = vec![uniform(2)];
        let set = total_degree(1, 3).unwrap();
        let samples = sample_iid(&[IidMarginal::Uniform], 3, 0).unwrap();
        assert!(assemble(samples, &fam, &set, &|_| 0.0).is_err());
    }

    #[test]
    fn projection_of_basis_function_is_unit_vector() {
        let fam = vec![
            uniform(6),
            PolynomialFamily::build(MarginalDistribution::Gaussian, 6).unwrap(),
        ];
        let set = total_degree(2, 3).unwrap();
        let rule = tensor_rule(&fam, &[4, 4]).unwrap();
        for j in [0, 4, 9] {
            let k = set.indices()[j].clone();
            let f0 = fam[0].clone();
            let f1 = fam[1].clone();
            let target = move |x: &[f64]| {
                f0.evaluate(k[0], x[0]).unwrap() * f1.evaluate(k[1], x[1]).unwrap()
            };
            let c = project_full_grid(&fam, &rule, &set, &target).unwrap();
            for (i, ci) in c.iter().enumerate() {
                assert_abs_diff_eq!(*ci, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-10);
            }
        }
        let c = project_full_grid(&fam, &rule, &set, &|_| 1.0).unwrap();
        assert_abs_diff_eq!(c[0], 1.0, epsilon = 1e-12);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn normalized_rows_are_weighted_polynomial_products() {
        let fam = vec![uniform(4), uniform(4)];
        let set = total_degree(2, 3).unwrap();
        let rule = tensor_rule(&fam, &[4, 4]).unwrap();
        let samples = subsample_gauss(&rule, 16, 3).unwrap();
        let grid = samples.grid.clone().unwrap();
        let sys = assemble(samples, &fam, &set, &|_| 0.0).unwrap();
        // sqrt(M) times the normalized matrix is sqrt(prod n) D
        let scaled = sys.normalized_matrix().unwrap() * 16f64.sqrt();
        for (m, k) in grid.indices.iter().enumerate() {
            let z = rule.point(k);
            for (j, idx) in set.indices().iter().enumerate() {
                let psi = fam[0].weighted_poly(idx[0], 4, z[0]).unwrap()
                    * fam[1].weighted_poly(idx[1], 4, z[1]).unwrap();
                assert_abs_diff_eq!(scaled[(m, j)], psi, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn memoized_target_evaluates_once_per_point() {
        let calls = Cell::new(0);
        let f = |x: &[f64]| {
            calls.set(calls.get() + 1);
            x[0] * 2.0
        };
        let memo = MemoizedTarget::new(&f);
        assert_eq!(memo.eval(&[1.5]), 3.0);
        assert_eq!(memo.eval(&[1.5]), 3.0);
        assert_eq!(memo.eval(&[2.0]), 4.0);
        assert_eq!(calls.get(), 2);
        assert_eq!(memo.cached_points(), 2);
    }

    #[test]
    fn dump_writes_header_and_rows() {
        let fam = vec![uniform(2)];
        let set = total_degree(1, 1).unwrap();
        let rule = tensor_rule(&fam, &[2]).unwrap();
        let sys = assemble(subsample_gauss(&rule, 2, 0).unwrap(), &fam, &set, &|x| x[0]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        sys.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "d0,d1,rhs");
        assert_eq!(lines.len(), 3);
    }
}
