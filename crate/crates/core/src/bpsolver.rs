//! Equality-constrained basis pursuit: `min ||c||_1` subject to `D c = b`.
//!
//! The default solver is ADMM on the splitting `x = z` with `x` confined to the
//! affine set `{c : D c = b}` and `z` carrying the ℓ1 term:
//!
//! ```text
//! x <- P(z - u)            (projection, cached Cholesky of D D^T)
//! z <- soft(x + u, 1/rho)
//! u <- u + x - z
//! ```
//!
//! Rows of `D` are equilibrated before factorization; row scaling does not
//! change the feasible set.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::design::DesignSystem;
use crate::error::{usage, Error, Result};

const GRAM_SHIFT: f64 = 1e-12;
const PENALTY_MIN: f64 = 1e-4;
const PENALTY_MAX: f64 = 1e4;
/// Residual ratio that triggers a penalty update.
const BALANCE_RATIO: f64 = 10.0;
/// Iterations between penalty updates; updating every step makes rho thrash.
const ADAPT_INTERVAL: usize = 10;
/// rho is frozen after this many iterations so the fixed-penalty convergence
/// guarantee applies; some degenerate systems otherwise cycle forever.
const ADAPT_HORIZON: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Initial ADMM penalty; adapted during the iteration.
    pub penalty: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            max_iter: 20_000,
            penalty: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.abs_tol, self.rel_tol, self.penalty]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite());
        if !positive || self.max_iter == 0 {
            return Err(usage(format!(
                "solver tolerances, penalty and max_iter must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    /// The sparse iterate `z`; entries below the threshold are exactly zero.
    pub coefficients: Vec<f64>,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// `||D c - b||_2` of the returned coefficients.
    pub feasibility: f64,
    pub converged: bool,
}

/// Anything that can solve `min ||c||_1 s.t. D c = b`.
pub trait SparseSolver {
    fn solve(&self, matrix: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<RecoveryResult>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AdmmBasisPursuit {
    pub config: SolverConfig,
}

impl AdmmBasisPursuit {
    pub fn new(config: SolverConfig) -> Self {
        Self { config }
    }
}

/// Basis pursuit on an assembled design system.
pub fn basis_pursuit(system: &DesignSystem, config: &SolverConfig) -> Result<RecoveryResult> {
    AdmmBasisPursuit::new(*config).solve(system.matrix(), system.rhs())
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Projection onto `{c : A c = b}` for row-equilibrated `A`.
struct AffineProjector {
    a: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    /// Minimum-norm feasible point.
    offset: DVector<f64>,
    scratch: DVector<f64>,
}

impl AffineProjector {
    fn new(matrix: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<Self> {
        let mut rows = Vec::new();
        let mut scaled_rhs = Vec::new();
        for (m, row) in matrix.row_iter().enumerate() {
            let norm = row.norm();
            if norm == 0.0 {
                if rhs[m] != 0.0 {
                    return Err(Error::Numerical(format!(
                        "row {m} of the design matrix is zero but its right-hand side is {}",
                        rhs[m]
                    )));
                }
                continue;
            }
            rows.push(row / norm);
            scaled_rhs.push(rhs[m] / norm);
        }
        let n = matrix.ncols();
        let a = if rows.is_empty() {
            DMatrix::zeros(0, n)
        } else {
            DMatrix::from_rows(&rows)
        };
        let b = DVector::from_vec(scaled_rhs);
        let mut gram = &a * a.transpose();
        for i in 0..gram.nrows() {
            gram[(i, i)] += GRAM_SHIFT;
        }
        let chol = Cholesky::new(gram).ok_or_else(|| {
            Error::Numerical("Cholesky factorization of D D^T failed".to_string())
        })?;
        let offset = a.transpose() * chol.solve(&b);
        let scratch = DVector::zeros(a.nrows());
        Ok(Self {
            a,
            chol,
            offset,
            scratch,
        })
    }

    /// `out = v - A^T (A A^T)^{-1} A v + offset`
    fn project(&mut self, v: &DVector<f64>, out: &mut DVector<f64>) {
        out.copy_from(v);
        if self.a.nrows() == 0 {
            return;
        }
        self.scratch.gemv(1.0, &self.a, v, 0.0);
        self.chol.solve_mut(&mut self.scratch);
        out.gemv_tr(-1.0, &self.a, &self.scratch, 1.0);
        *out += &self.offset;
    }
}

impl SparseSolver for AdmmBasisPursuit {
    fn solve(&self, matrix: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<RecoveryResult> {
        let cfg = &self.config;
        cfg.validate()?;
        if matrix.nrows() != rhs.len() {
            return Err(usage(format!(
                "design matrix has {} rows but right-hand side has {} entries",
                matrix.nrows(),
                rhs.len()
            )));
        }
        let n = matrix.ncols();
        if matrix.nrows() > n {
            return Err(usage(format!(
                "basis pursuit needs M <= N, got M = {} and N = {n}",
                matrix.nrows()
            )));
        }
        let mut projector = AffineProjector::new(matrix, rhs)?;

        let root_n = (n as f64).sqrt();
        let feas_tol = cfg.abs_tol * (1.0 + rhs.norm());
        let mut rho = cfg.penalty;
        let mut x = DVector::zeros(n);
        let mut z = DVector::<f64>::zeros(n);
        let mut z_old = DVector::zeros(n);
        let mut u = DVector::<f64>::zeros(n);
        let mut v = DVector::zeros(n);
        let mut residual = DVector::zeros(matrix.nrows());

        let mut primal = f64::INFINITY;
        let mut dual = f64::INFINITY;
        let mut feasibility = f64::INFINITY;
        let mut iterations = 0;
        let mut converged = false;

        while iterations < cfg.max_iter {
            iterations += 1;
            v.copy_from(&z);
            v -= &u;
            projector.project(&v, &mut x);

            z_old.copy_from(&z);
            let threshold = 1.0 / rho;
            for i in 0..n {
                z[i] = soft_threshold(x[i] + u[i], threshold);
            }
            u += &x;
            u -= &z;

            primal = x.metric_distance(&z);
            dual = rho * z.metric_distance(&z_old);
            let eps_primal = root_n * cfg.abs_tol + cfg.rel_tol * x.norm().max(z.norm());
            let eps_dual = root_n * cfg.abs_tol + cfg.rel_tol * rho * u.norm();

            if primal <= eps_primal && dual <= eps_dual {
                residual.copy_from(rhs);
                residual.gemv(1.0, matrix, &z, -1.0);
                feasibility = residual.norm();
                if feasibility <= feas_tol {
                    converged = true;
                    break;
                }
            }

            if iterations % ADAPT_INTERVAL != 0 || iterations > ADAPT_HORIZON {
                continue;
            }
            if primal > BALANCE_RATIO * dual {
                let next = (2.0 * rho).min(PENALTY_MAX);
                u *= rho / next;
                rho = next;
            } else if dual > BALANCE_RATIO * primal {
                let next = (0.5 * rho).max(PENALTY_MIN);
                u *= rho / next;
                rho = next;
            }
        }

        if !converged {
            residual.copy_from(rhs);
            residual.gemv(1.0, matrix, &z, -1.0);
            feasibility = residual.norm();
        }
        Ok(RecoveryResult {
            coefficients: z.iter().copied().collect(),
            iterations,
            primal_residual: primal,
            dual_residual: dual,
            feasibility,
            converged,
        })
    }
}

/// Which ℓp norm a best s-term error is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpNorm {
    L1,
    L2,
}

/// `sigma_{s,p}(c)`: the ℓp norm of `c` after zeroing its `s` largest
/// magnitudes (ties go to the lower index).
pub fn best_s_term_error(c: &[f64], s: usize, p: LpNorm) -> f64 {
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&a, &b| c[b].abs().total_cmp(&c[a].abs()).then(a.cmp(&b)));
    let tail = order.iter().skip(s).map(|&i| c[i].abs());
    match p {
        LpNorm::L1 => tail.sum(),
        LpNorm::L2 => tail.map(|v| v * v).sum::<f64>().sqrt(),
    }
}

pub fn max_abs_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "coefficient vectors differ in length");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn l2_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "coefficient vectors differ in length");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Default success threshold on the max-norm coefficient error.
pub const SUCCESS_THRESHOLD: f64 = 1e-3;

/// `||c_sharp - c_ref||_inf <= threshold`.
pub fn recovery_success(c_sharp: &[f64], c_ref: &[f64], threshold: f64) -> bool {
    max_abs_error(c_sharp, c_ref) <= threshold
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indexset::{anisotropic_tensor, total_degree};
    use crate::orthopoly::{MarginalDistribution, PolynomialFamily};
    use crate::quadrature::tensor_rule;
    use crate::sampling::subsample_gauss;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> RecoveryResult {
        AdmmBasisPursuit::default().solve(a, b).unwrap()
    }

    fn gauss_design(n: usize, degree: usize, m: usize, seed: u64) -> DMatrix<f64> {
        let fam = vec![PolynomialFamily::build(MarginalDistribution::uniform(), n).unwrap()];
        let set = total_degree(1, degree).unwrap();
        let rule = tensor_rule(&fam, &[n]).unwrap();
        let samples = subsample_gauss(&rule, m, seed).unwrap();
        crate::design::assemble(samples, &fam, &set, &|_| 0.0)
            .unwrap()
            .matrix()
            .clone()
    }

    /// Minimum ℓ1 norm over all supports of size <= 2 with a consistent solution.
    fn min_l1_small_supports(a: &DMatrix<f64>, b: &DVector<f64>) -> f64 {
        let n = a.ncols();
        let mut best = f64::INFINITY;
        let mut consider = |cols: &[usize]| {
            let sub = a.select_columns(cols);
            let svd = sub.clone().svd(true, true);
            if let Ok(x) = svd.solve(b, 1e-12) {
                if (&sub * &x - b).norm() < 1e-9 {
                    best = best.min(x.iter().map(|v| v.abs()).sum());
                }
            }
        };
        for i in 0..n {
            consider(&[i]);
            for j in i + 1..n {
                consider(&[i, j]);
            }
        }
        best
    }

    #[test]
    fn square_orthogonal_system_recovers_any_vector() {
        let fam = vec![PolynomialFamily::build(MarginalDistribution::uniform(), 3).unwrap(); 2];
        let set = anisotropic_tensor(&[2, 2]).unwrap();
        let rule = tensor_rule(&fam, &[3, 3]).unwrap();
        let samples = subsample_gauss(&rule, 9, 4).unwrap();
        let sys = crate::design::assemble(samples, &fam, &set, &|_| 0.0).unwrap();
        let truth = DVector::from_fn(9, |i, _| (i as f64 * 0.7).sin() * 2.0);
        let b = sys.matrix() * &truth;
        let res = solve(sys.matrix(), &b);
        assert!(res.converged);
        for (c, t) in res.coefficients.iter().zip(truth.iter()) {
            assert_abs_diff_eq!(*c, *t, epsilon = 1e-6);
        }
    }

    #[test]
    fn one_sparse_underdetermined_recovery() {
        let a = gauss_design(10, 5, 4, 17);
        assert_eq!(a.shape(), (4, 6));
        let mut truth = DVector::zeros(6);
        truth[2] = 1.0;
        let b = &a * &truth;
        let oracle = min_l1_small_supports(&a, &b);
        assert_abs_diff_eq!(oracle, 1.0, epsilon = 1e-9);
        let res = solve(&a, &b);
        assert!(res.converged);
        for (c, t) in res.coefficients.iter().zip(truth.iter()) {
            assert_abs_diff_eq!(*c, *t, epsilon = 1e-4);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = gauss_design(8, 6, 4, 1);
        let res = solve(&a, &DVector::zeros(4));
        assert!(res.converged);
        assert!(res.coefficients.iter().all(|c| *c == 0.0));
    }

    #[test]
    fn inconsistent_zero_row_is_numerical_error() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let b = DVector::from_vec(vec![1.0, 1.0]);
        assert!(matches!(
            AdmmBasisPursuit::default().solve(&a, &b),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn invalid_config_is_usage_error() {
        let cfg = SolverConfig {
            abs_tol: 0.0,
            ..SolverConfig::default()
        };
        let a = DMatrix::identity(2, 2);
        let b = DVector::zeros(2);
        assert!(matches!(
            AdmmBasisPursuit::new(cfg).solve(&a, &b),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn max_iter_reports_non_convergence() {
        let a = gauss_design(16, 15, 8, 2);
        let b = DVector::from_fn(8, |i, _| 1.0 + i as f64);
        let cfg = SolverConfig {
            max_iter: 3,
            ..SolverConfig::default()
        };
        let res = AdmmBasisPursuit::new(cfg).solve(&a, &b).unwrap();
        assert!(!res.converged);
        assert_eq!(res.iterations, 3);
    }

    #[test]
    fn best_s_term_examples() {
        let c = [3.0, -1.0, 2.0];
        assert_eq!(best_s_term_error(&c, 3, LpNorm::L1), 0.0);
        assert_eq!(best_s_term_error(&c, 1, LpNorm::L1), 3.0);
        assert_eq!(best_s_term_error(&c, 2, LpNorm::L2), 1.0);
        assert_eq!(best_s_term_error(&[1.0, -1.0], 1, LpNorm::L1), 1.0);
    }

    #[test]
    fn success_boundary() {
        let a = [1.0, 2.0, 3.0];
        assert!(recovery_success(&a, &a, 1e-3));
        assert!(!recovery_success(&[1.0, 2.002, 3.0], &a, 1e-3));
        assert!(recovery_success(&[0.0], &[1e-3], 1e-3));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn feasible_and_scale_equivariant(seed in 0u64..1000, t in 0.1f64..10.0) {
            let a = gauss_design(12, 9, 6, seed);
            let mut truth = DVector::zeros(10);
            truth[(seed % 10) as usize] = 1.5;
            truth[((seed / 10) % 10) as usize] -= 0.5;
            let b = &a * &truth;
            let base = solve(&a, &b);
            prop_assert!(base.converged);
            prop_assert!(base.feasibility <= 1e-6 * (1.0 + b.norm()));
            let scaled = solve(&a, &(&b * t));
            prop_assert!(scaled.converged);
            for (s, c) in scaled.coefficients.iter().zip(&base.coefficients) {
                prop_assert!((s - t * c).abs() <= 1e-5 * (1.0 + t));
            }
        }
    }
}
