//! Target functions: synthetic sparse expansions, analytic test functions and
//! the random decay ODE `du/dt = -beta X u`, `u(0) = 1`.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand_distr::{Distribution, StandardNormal};

use crate::design::{evaluate_expansion, project_full_grid};
use crate::error::{usage, Result};
use crate::indexset::MultiIndexSet;
use crate::orthopoly::PolynomialFamily;
use crate::quadrature::{gauss_rule, tensor_rule};
use crate::sampling::rng_from_seed;

/// Decay rate of the ODE study.
pub const ODE_BETA: f64 = -0.65;
/// Evaluation time of the ODE study.
pub const ODE_TIME: f64 = 1.0;
/// Step of the fixed-step integrator.
pub const ODE_STEP: f64 = 1e-3;

/// Extra Gauss points used when projecting non-polynomial targets.
const PROJECTION_OVERSAMPLING: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetName {
    Sparse,
    Monomial1010,
    Rosenbrock,
    GaussBump,
    ExpLinear,
    Ode,
}

impl TargetName {
    pub const ALL: [TargetName; 6] = [
        TargetName::Sparse,
        TargetName::Monomial1010,
        TargetName::Rosenbrock,
        TargetName::GaussBump,
        TargetName::ExpLinear,
        TargetName::Ode,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TargetName::Sparse => "sparse",
            TargetName::Monomial1010 => "monomial1010",
            TargetName::Rosenbrock => "rosenbrock",
            TargetName::GaussBump => "gaussbump",
            TargetName::ExpLinear => "explinear",
            TargetName::Ode => "ode",
        }
    }
}

impl fmt::Display for TargetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TargetName {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        TargetName::ALL
            .into_iter()
            .find(|t| t.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| {
                let known: Vec<&str> = TargetName::ALL.iter().map(|t| t.name()).collect();
                usage(format!(
                    "unknown target '{s}' (expected one of {})",
                    known.join("|")
                ))
            })
    }
}

#[derive(Debug, Clone)]
pub enum TargetFunction {
    /// `sum_j c_j phi_{k(j)}(x)` with exactly `s` nonzero `c_j`.
    SparseSynthetic {
        coefficients: Vec<f64>,
        set: MultiIndexSet,
        families: Vec<PolynomialFamily>,
    },
    /// `prod_i x_i^10`
    Monomial1010,
    /// `sum_{i < d} (1 - x_i)^2 + 100 (x_{i+1} - x_i^2)^2`
    Rosenbrock10,
    /// `2^(-0.2 |x|^2)`
    GaussBump,
    /// `exp(-0.6 sum_i x_i)`
    ExpLinear,
    /// `u(t, x) = exp(-beta x t)` computed by numerical integration.
    OdeSecondMoment { beta: f64, t: f64 },
}

impl TargetFunction {
    /// The analytic target for `name`; sparse targets need [`make_sparse_target`].
    pub fn analytic(name: TargetName) -> Result<Self> {
        Ok(match name {
            TargetName::Sparse => {
                return Err(usage("sparse targets are drawn per trial, not looked up"));
            }
            TargetName::Monomial1010 => TargetFunction::Monomial1010,
            TargetName::Rosenbrock => TargetFunction::Rosenbrock10,
            TargetName::GaussBump => TargetFunction::GaussBump,
            TargetName::ExpLinear => TargetFunction::ExpLinear,
            TargetName::Ode => TargetFunction::OdeSecondMoment {
                beta: ODE_BETA,
                t: ODE_TIME,
            },
        })
    }

    pub fn name(&self) -> TargetName {
        match self {
            TargetFunction::SparseSynthetic { .. } => TargetName::Sparse,
            TargetFunction::Monomial1010 => TargetName::Monomial1010,
            TargetFunction::Rosenbrock10 => TargetName::Rosenbrock,
            TargetFunction::GaussBump => TargetName::GaussBump,
            TargetFunction::ExpLinear => TargetName::ExpLinear,
            TargetFunction::OdeSecondMoment { .. } => TargetName::Ode,
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            TargetFunction::SparseSynthetic {
                coefficients,
                set,
                families,
            } => evaluate_expansion(families, set, coefficients, x)
                .expect("sparse target validated at construction"),
            TargetFunction::Rosenbrock10 => x.windows(2).map(|w| rosenbrock_term(w[0], w[1])).sum(),
            TargetFunction::OdeSecondMoment { beta, t } => {
                x.iter().map(|&xi| ode_solution(*beta, *t, xi)).product()
            }
            _ => {
                let g = self.separable_factor().expect("separable target");
                x.iter().map(|&xi| g(xi)).product()
            }
        }
    }

    /// Univariate factor `g` of a product target `f(x) = prod_i g(x_i)`, in
    /// closed form.
    fn separable_factor(&self) -> Option<Box<dyn Fn(f64) -> f64>> {
        match *self {
            TargetFunction::Monomial1010 => Some(Box::new(|x: f64| x.powi(10))),
            TargetFunction::GaussBump => Some(Box::new(|x: f64| 2f64.powf(-0.2 * x * x))),
            TargetFunction::ExpLinear => Some(Box::new(|x: f64| (-0.6 * x).exp())),
            TargetFunction::OdeSecondMoment { beta, t } => {
                Some(Box::new(move |x: f64| (-beta * x * t).exp()))
            }
            _ => None,
        }
    }

    /// Reference coefficients `c_hat` of the target on `set`.
    ///
    /// Product targets are projected one dimension at a time; the Rosenbrock
    /// function is projected term by term on exact two-dimensional rules.
    pub fn reference_coefficients(
        &self,
        families: &[PolynomialFamily],
        set: &MultiIndexSet,
    ) -> Result<Vec<f64>> {
        if families.len() != set.dim() {
            return Err(usage(format!(
                "{} families for a {}-dimensional index set",
                families.len(),
                set.dim()
            )));
        }
        match self {
            TargetFunction::SparseSynthetic {
                coefficients,
                set: own,
                ..
            } => {
                if own != set {
                    return Err(usage("sparse target was drawn on a different index set"));
                }
                Ok(coefficients.clone())
            }
            TargetFunction::Rosenbrock10 => rosenbrock_coefficients(families, set),
            _ => {
                let g = self.separable_factor().expect("separable target");
                let envelope = set.envelope();
                let tables = families
                    .iter()
                    .zip(&envelope)
                    .map(|(family, &count)| univariate_projection(family, count, &*g))
                    .collect::<Result<Vec<_>>>()?;
                Ok(set
                    .indices()
                    .iter()
                    .map(|k| k.iter().zip(&tables).map(|(&ki, t)| t[ki]).product())
                    .collect())
            }
        }
    }
}

/// `E[g(X) phi_k(X)]` for `k < count`, on a rule well beyond the degree.
fn univariate_projection(
    family: &PolynomialFamily,
    count: usize,
    g: &dyn Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    let points = count + PROJECTION_OVERSAMPLING;
    let wide = PolynomialFamily::build(family.distribution(), points)?;
    let rule = gauss_rule(&wide, points)?;
    let mut out = vec![0.0; count];
    let mut vals = vec![0.0; count];
    for (&z, &w) in rule.nodes().iter().zip(rule.weights()) {
        wide.fill_values(z, &mut vals)?;
        let gz = w * g(z);
        for (o, v) in out.iter_mut().zip(&vals) {
            *o += gz * v;
        }
    }
    Ok(out)
}

fn rosenbrock_term(a: f64, b: f64) -> f64 {
    (1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a)
}

fn rosenbrock_coefficients(families: &[PolynomialFamily], set: &MultiIndexSet) -> Result<Vec<f64>> {
    let d = set.dim();
    let mut coefficients = vec![0.0; set.len()];
    if d < 2 {
        return Ok(coefficients);
    }
    let envelope = set.envelope();
    for i in 0..d - 1 {
        // Only indices supported on {i, i+1} see this term.
        let members: Vec<usize> = (0..set.len())
            .filter(|&j| {
                set.indices()[j]
                    .iter()
                    .enumerate()
                    .all(|(dim, &k)| k == 0 || dim == i || dim == i + 1)
            })
            .collect();
        if members.is_empty() {
            continue;
        }
        let pair_set = MultiIndexSet::from_indices(
            2,
            members
                .iter()
                .map(|&j| vec![set.indices()[j][i], set.indices()[j][i + 1]])
                .collect(),
        )?;
        // Degree 4 in each variable plus the basis degree stays exact.
        let sizes = [envelope[i] + 3, envelope[i + 1] + 3];
        let pair_families = vec![
            PolynomialFamily::build(families[i].distribution(), sizes[0])?,
            PolynomialFamily::build(families[i + 1].distribution(), sizes[1])?,
        ];
        let rule = tensor_rule(&pair_families, &sizes)?;
        let local = project_full_grid(&pair_families, &rule, &pair_set, &|z| {
            rosenbrock_term(z[0], z[1])
        })?;
        for &j in &members {
            let k = &set.indices()[j];
            let pos = pair_set
                .index_of(&[k[i], k[i + 1]])
                .expect("member of pair set");
            coefficients[j] += local[pos];
        }
    }
    Ok(coefficients)
}

/// Draws an `s`-sparse target on `set`: support uniform without replacement,
/// values iid standard normal.
pub fn make_sparse_target(
    set: &MultiIndexSet,
    families: &[PolynomialFamily],
    s: usize,
    seed: u64,
) -> Result<TargetFunction> {
    let n = set.len();
    if s == 0 || s > n {
        return Err(usage(format!(
            "sparsity must satisfy 1 <= s <= N = {n}, got {s}"
        )));
    }
    // Validates dimensions and degrees once.
    evaluate_expansion(families, set, &vec![0.0; n], &vec![0.0; set.dim()])?;
    let mut rng = rng_from_seed(seed);
    let mut coefficients = vec![0.0; n];
    let mut support = sample(&mut rng, n, s).into_vec();
    support.sort_unstable();
    for j in support {
        let mut v: f64 = StandardNormal.sample(&mut rng);
        // A zero draw would break the exact sparsity count.
        while v == 0.0 {
            v = StandardNormal.sample(&mut rng);
        }
        coefficients[j] = v;
    }
    Ok(TargetFunction::SparseSynthetic {
        coefficients,
        set: set.clone(),
        families: families.to_vec(),
    })
}

/// `u(t, x)` for `du/dt = -beta x u`, `u(0) = 1`, by classical RK4 with step
/// [`ODE_STEP`] (the last step is shortened to land on `t`).
pub fn ode_solution(beta: f64, t: f64, x: f64) -> f64 {
    let k = beta * x;
    let rhs = |u: f64| -k * u;
    let steps = (t.abs() / ODE_STEP).ceil() as usize;
    if steps == 0 {
        return 1.0;
    }
    let h = t / steps as f64;
    let mut u = 1.0;
    for _ in 0..steps {
        let k1 = rhs(u);
        let k2 = rhs(u + 0.5 * h * k1);
        let k3 = rhs(u + 0.5 * h * k2);
        let k4 = rhs(u + h * k3);
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    u
}

/// Second moment `E[u^2] = sum_j c_j^2` of an orthonormal expansion.
pub fn ode_qoi(coefficients: &[f64]) -> f64 {
    coefficients.iter().map(|c| c * c).sum()
}

/// Exact second moment `exp(2 beta^2 t^2)` of `exp(-beta t X)`, `X ~ N(0,1)`.
pub fn ode_qoi_exact(beta: f64, t: f64) -> f64 {
    (2.0 * beta * beta * t * t).exp()
}

/// Hermite coefficient `E[exp(aX) phi_j(X)] = exp(a^2/2) a^j / sqrt(j!)`.
pub fn hermite_exp_coefficient(a: f64, j: usize) -> f64 {
    if a == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    let log_mag = 0.5 * a * a + j as f64 * a.abs().ln() - 0.5 * libm::lgamma(j as f64 + 1.0);
    let sign = if a < 0.0 && j % 2 == 1 { -1.0 } else { 1.0 };
    sign * log_mag.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indexset::total_degree;
    use crate::orthopoly::MarginalDistribution;
    use approx::assert_abs_diff_eq;

    fn families(dist: MarginalDistribution, d: usize, degree: usize) -> Vec<PolynomialFamily> {
        vec![PolynomialFamily::build(dist, degree).unwrap(); d]
    }

    #[test]
    fn constant_sparse_target() {
        let set = total_degree(1, 0).unwrap();
        let fam = families(MarginalDistribution::uniform(), 1, 3);
        let t = make_sparse_target(&set, &fam, 1, 3).unwrap();
        let v0 = t.evaluate(&[-0.7]);
        assert_abs_diff_eq!(t.evaluate(&[0.4]), v0, epsilon = 1e-15);
    }

    #[test]
    fn sparse_target_has_exact_support() {
        let set = total_degree(10, 3).unwrap();
        let fam = families(MarginalDistribution::uniform(), 10, 3);
        let t = make_sparse_target(&set, &fam, 5, 11).unwrap();
        let c = t.reference_coefficients(&fam, &set).unwrap();
        assert_eq!(c.len(), 286);
        assert_eq!(c.iter().filter(|v| **v != 0.0).count(), 5);
        let again = make_sparse_target(&set, &fam, 5, 11).unwrap();
        assert_eq!(again.reference_coefficients(&fam, &set).unwrap(), c);
    }

    #[test]
    fn sparse_target_projects_back() {
        let set = total_degree(2, 4).unwrap();
        let fam = families(MarginalDistribution::Gaussian, 2, 6);
        let t = make_sparse_target(&set, &fam, 3, 5).unwrap();
        let rule = tensor_rule(&fam, &[6, 6]).unwrap();
        let proj = project_full_grid(&fam, &rule, &set, &|x| t.evaluate(x)).unwrap();
        let c = t.reference_coefficients(&fam, &set).unwrap();
        for (p, e) in proj.iter().zip(&c) {
            assert_abs_diff_eq!(p, e, epsilon = 1e-9);
        }
    }

    #[test]
    fn sparsity_bounds() {
        let set = total_degree(2, 1).unwrap();
        let fam = families(MarginalDistribution::uniform(), 2, 1);
        assert!(make_sparse_target(&set, &fam, 4, 0).is_err());
        assert!(make_sparse_target(&set, &fam, 0, 0).is_err());
    }

    #[test]
    fn ode_examples() {
        assert_eq!(ode_solution(-0.65, 0.0, 3.0), 1.0);
        assert_abs_diff_eq!(
            ode_solution(-0.65, 1.0, 1.0),
            0.65f64.exp(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(ode_solution(-0.65, 1.0, 0.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ode_matches_analytic() {
        for &(beta, t, x) in &[
            (-0.65f64, 1.0f64, 5.0f64),
            (2.0, 2.0, 5.0),
            (-1.0, 4.0, -5.0),
            (0.3, 1.0, -20.0),
        ] {
            let exact = (-beta * x * t).exp();
            let got = ode_solution(beta, t, x);
            assert!(
                (got - exact).abs() <= 1e-8 * exact.max(1.0),
                "{beta} {t} {x}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn qoi_examples() {
        assert_eq!(ode_qoi(&[1.0, 0.0, 0.0]), 1.0);
        let c: Vec<f64> = (0..40).map(|j| hermite_exp_coefficient(0.65, j)).collect();
        assert_abs_diff_eq!(ode_qoi(&c), 0.845f64.exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(ode_qoi_exact(-0.65, 1.0), 2.327_9, epsilon = 1e-4);
        let mut partial = 0.0;
        for j in 0..10 {
            let next = ode_qoi(&c[..=j]);
            assert!(next >= partial);
            partial = next;
        }
    }

    #[test]
    fn hermite_exp_closed_form_matches_projection() {
        let fam = families(MarginalDistribution::Gaussian, 1, 40);
        let rule = tensor_rule(&fam, &[40]).unwrap();
        let set = total_degree(1, 15).unwrap();
        let proj = project_full_grid(&fam, &rule, &set, &|x| (0.65 * x[0]).exp()).unwrap();
        for (j, p) in proj.iter().enumerate() {
            assert_abs_diff_eq!(*p, hermite_exp_coefficient(0.65, j), epsilon = 1e-8);
        }
        assert_abs_diff_eq!(
            hermite_exp_coefficient(-0.6, 3),
            -(0.18f64.exp()) * 0.216 / 6f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn ode_reference_uses_closed_form_factor() {
        let fam = families(MarginalDistribution::Gaussian, 1, 29);
        let set = total_degree(1, 29).unwrap();
        let target = TargetFunction::analytic(TargetName::Ode).unwrap();
        let c = target.reference_coefficients(&fam, &set).unwrap();
        for (j, cj) in c.iter().enumerate() {
            assert_abs_diff_eq!(*cj, hermite_exp_coefficient(0.65, j), epsilon = 1e-12);
        }
    }

    fn residual_on_rule(
        target: &TargetFunction,
        fam: &[PolynomialFamily],
        set: &MultiIndexSet,
        sizes: &[usize],
    ) -> f64 {
        let c = target.reference_coefficients(fam, set).unwrap();
        let rule = tensor_rule(fam, sizes).unwrap();
        rule.indices()
            .map(|k| {
                let z = rule.point(&k);
                (evaluate_expansion(fam, set, &c, &z).unwrap() - target.evaluate(&z)).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn monomial_is_exact_in_total_degree_twenty() {
        let fam = families(MarginalDistribution::uniform(), 2, 21);
        let set = total_degree(2, 20).unwrap();
        let r = residual_on_rule(&TargetFunction::Monomial1010, &fam, &set, &[21, 21]);
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn rosenbrock_is_exact_in_total_degree_four() {
        let fam = families(MarginalDistribution::uniform(), 10, 4);
        let set = total_degree(10, 4).unwrap();
        let target = TargetFunction::Rosenbrock10;
        let c = target.reference_coefficients(&fam, &set).unwrap();
        let mut rng = rng_from_seed(9);
        for _ in 0..50 {
            let x: Vec<f64> = (0..10)
                .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
                .collect();
            let r = (evaluate_expansion(&fam, &set, &c, &x).unwrap() - target.evaluate(&x)).abs();
            assert!(r < 1e-8, "{r}");
        }
    }

    #[test]
    fn rosenbrock_mean_is_constant_coefficient() {
        // E(1-x)^2 = 4/3 and E(y - x^2)^2 = 1/3 + 1/5 under the uniform law
        let fam = families(MarginalDistribution::uniform(), 3, 2);
        let set = total_degree(3, 2).unwrap();
        let c = TargetFunction::Rosenbrock10
            .reference_coefficients(&fam, &set)
            .unwrap();
        let per_term = 4.0 / 3.0 + 100.0 * (1.0 / 3.0 + 1.0 / 5.0);
        assert_abs_diff_eq!(c[0], 2.0 * per_term, epsilon = 1e-10);
    }

    #[test]
    fn target_names_round_trip() {
        for t in TargetName::ALL {
            assert_eq!(t.name().parse::<TargetName>().unwrap(), t);
        }
        assert!("pde".parse::<TargetName>().is_err());
        assert!(TargetFunction::analytic(TargetName::Sparse).is_err());
    }
}
