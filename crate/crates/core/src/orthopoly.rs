//! Univariate orthonormal polynomial families.
//!
//! Every family is orthonormal with respect to a *probability* density, so
//! `phi_0 == 1` and the three-term recurrence
//!
//! ```text
//! sqrt(b_{k+1}) phi_{k+1}(x) = (x - a_k) phi_k(x) - sqrt(b_k) phi_{k-1}(x)
//! ```
//!
//! holds with `b_0 = 1` (the total mass). The same coefficients feed the
//! Jacobi matrix used by [`crate::quadrature::gauss_rule`].

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, usage, Error, Result};

/// Marginal probability law of one input coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarginalDistribution {
    /// Density proportional to `(1 + x)^gamma (1 - x)^delta` on `[-1, 1]`,
    /// i.e. a `Beta(gamma + 1, delta + 1)` variable mapped affinely onto
    /// `[-1, 1]`. Orthonormal polynomials are Jacobi with `alpha = delta`,
    /// `beta = gamma`.
    Beta { gamma: f64, delta: f64 },
    /// Standard normal on the real line (probabilists' Hermite).
    Gaussian,
    /// Rate-one exponential on `[0, inf)` (Laguerre).
    Exponential,
}

impl MarginalDistribution {
    pub fn uniform() -> Self {
        MarginalDistribution::Beta {
            gamma: 0.0,
            delta: 0.0,
        }
    }

    /// Arcsine law on `[-1, 1]`.
    pub fn chebyshev() -> Self {
        MarginalDistribution::Beta {
            gamma: -0.5,
            delta: -0.5,
        }
    }

    pub fn beta(gamma: f64, delta: f64) -> Result<Self> {
        let dist = MarginalDistribution::Beta { gamma, delta };
        dist.validate()?;
        Ok(dist)
    }

    pub fn validate(&self) -> Result<()> {
        if let MarginalDistribution::Beta { gamma, delta } = *self {
            if !(gamma >= -0.5) {
                return Err(domain(format!(
                    "Beta shape parameter gamma = {gamma} violates gamma >= -1/2"
                )));
            }
            if !(delta >= -0.5) {
                return Err(domain(format!(
                    "Beta shape parameter delta = {delta} violates delta >= -1/2"
                )));
            }
        }
        Ok(())
    }

    /// Closed support interval (possibly infinite).
    pub fn support(&self) -> (f64, f64) {
        match self {
            MarginalDistribution::Beta { .. } => (-1.0, 1.0),
            MarginalDistribution::Gaussian => (f64::NEG_INFINITY, f64::INFINITY),
            MarginalDistribution::Exponential => (0.0, f64::INFINITY),
        }
    }

    /// Probability density, normalized to unit mass.
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            MarginalDistribution::Beta { gamma, delta } => {
                if !(-1.0..=1.0).contains(&x) {
                    return 0.0;
                }
                let log_norm = (gamma + delta + 1.0) * std::f64::consts::LN_2
                    + libm::lgamma(gamma + 1.0)
                    + libm::lgamma(delta + 1.0)
                    - libm::lgamma(gamma + delta + 2.0);
                (1.0 + x).powf(gamma) * (1.0 - x).powf(delta) * (-log_norm).exp()
            }
            MarginalDistribution::Gaussian => {
                (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
            }
            MarginalDistribution::Exponential => {
                if x < 0.0 {
                    0.0
                } else {
                    (-x).exp()
                }
            }
        }
    }

    /// True when the density is even about zero.
    pub fn is_symmetric(&self) -> bool {
        match *self {
            MarginalDistribution::Beta { gamma, delta } => gamma == delta,
            MarginalDistribution::Gaussian => true,
            MarginalDistribution::Exponential => false,
        }
    }
}

impl fmt::Display for MarginalDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MarginalDistribution::Beta { gamma, delta } if gamma == 0.0 && delta == 0.0 => {
                write!(f, "legendre")
            }
            MarginalDistribution::Beta { gamma, delta } if gamma == -0.5 && delta == -0.5 => {
                write!(f, "chebyshev")
            }
            MarginalDistribution::Beta { gamma, delta } => write!(f, "jacobi:{gamma},{delta}"),
            MarginalDistribution::Gaussian => write!(f, "hermite"),
            MarginalDistribution::Exponential => write!(f, "laguerre"),
        }
    }
}

impl FromStr for MarginalDistribution {
    type Err = Error;

    /// Accepts `legendre`/`uniform`, `chebyshev`, `hermite`/`gaussian`,
    /// `laguerre`/`exponential` and `jacobi:GAMMA,DELTA`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "legendre" | "uniform" => Ok(Self::uniform()),
            "chebyshev" => Ok(Self::chebyshev()),
            "hermite" | "gaussian" | "normal" => Ok(Self::Gaussian),
            "laguerre" | "exponential" => Ok(Self::Exponential),
            other => {
                let params = other
                    .strip_prefix("jacobi:")
                    .ok_or_else(|| usage(format!("unknown family '{s}'")))?;
                let mut parts = params.split(',').map(|p| p.trim().parse::<f64>());
                match (parts.next(), parts.next(), parts.next()) {
                    (Some(Ok(gamma)), Some(Ok(delta)), None) => Self::beta(gamma, delta),
                    _ => Err(usage(format!("expected jacobi:GAMMA,DELTA, got '{s}'"))),
                }
            }
        }
    }
}

/// Recurrence coefficients of an orthonormal family up to `max_degree`.
///
/// Stores `a_0..=a_D` and `b_0..=b_D`, which is exactly what is needed to
/// evaluate `phi_0..=phi_D` and to build Gauss rules with up to `D + 1` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialFamily {
    distribution: MarginalDistribution,
    recurrence_a: Vec<f64>,
    recurrence_b: Vec<f64>,
    sqrt_b: Vec<f64>,
    max_degree: usize,
}

/// Above this magnitude the fused recurrence rescales its state.
const RESCALE_THRESHOLD: f64 = 1e150;

impl PolynomialFamily {
    pub fn build(distribution: MarginalDistribution, max_degree: usize) -> Result<Self> {
        distribution.validate()?;
        let len = max_degree + 1;
        let (recurrence_a, recurrence_b): (Vec<f64>, Vec<f64>) = match distribution {
            MarginalDistribution::Beta { gamma, delta } => (0..len)
                .map(|k| jacobi_coefficients(delta, gamma, k))
                .unzip(),
            MarginalDistribution::Gaussian => (0..len)
                .map(|k| (0.0, if k == 0 { 1.0 } else { k as f64 }))
                .unzip(),
            MarginalDistribution::Exponential => (0..len)
                .map(|k| {
                    let kf = k as f64;
                    (2.0 * kf + 1.0, if k == 0 { 1.0 } else { kf * kf })
                })
                .unzip(),
        };
        if let Some(k) = recurrence_b.iter().position(|b| !(*b > 0.0)) {
            return Err(Error::Numerical(format!(
                "non-positive recurrence coefficient b_{k} = {} for {distribution}",
                recurrence_b[k]
            )));
        }
        // Laguerre keeps the classical sign (-1)^k on the leading coefficient.
        let sign = if distribution == MarginalDistribution::Exponential {
            -1.0
        } else {
            1.0
        };
        let sqrt_b = recurrence_b
            .iter()
            .enumerate()
            .map(|(k, b)| if k == 0 { 1.0 } else { sign * b.sqrt() })
            .collect();
        Ok(Self {
            distribution,
            recurrence_a,
            recurrence_b,
            sqrt_b,
            max_degree,
        })
    }

    pub fn distribution(&self) -> MarginalDistribution {
        self.distribution
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Diagonal coefficients `a_0..=a_D`.
    pub fn recurrence_a(&self) -> &[f64] {
        &self.recurrence_a
    }

    /// Squared off-diagonal coefficients `b_0..=b_D`, `b_0 = 1`.
    pub fn recurrence_b(&self) -> &[f64] {
        &self.recurrence_b
    }

    /// `phi_k(x)` by forward recurrence.
    pub fn evaluate(&self, k: usize, x: f64) -> Result<f64> {
        self.check_degree(k)?;
        let mut prev = 0.0;
        let mut cur = 1.0;
        for j in 0..k {
            let next =
                ((x - self.recurrence_a[j]) * cur - self.sqrt_b[j] * prev) / self.sqrt_b[j + 1];
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// Writes `phi_0(x), .., phi_{out.len()-1}(x)` into `out`.
    pub fn fill_values(&self, x: f64, out: &mut [f64]) -> Result<()> {
        if out.is_empty() {
            return Ok(());
        }
        self.check_degree(out.len() - 1)?;
        out[0] = 1.0;
        if out.len() > 1 {
            out[1] = (x - self.recurrence_a[0]) / self.sqrt_b[1];
        }
        for j in 1..out.len().saturating_sub(1) {
            out[j + 1] = ((x - self.recurrence_a[j]) * out[j] - self.sqrt_b[j] * out[j - 1])
                / self.sqrt_b[j + 1];
        }
        Ok(())
    }

    /// `phi_0(x), .., phi_{count-1}(x)`.
    pub fn values(&self, x: f64, count: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; count];
        self.fill_values(x, &mut out)?;
        Ok(out)
    }

    /// Christoffel function `lambda_n(x) = 1 / sum_{k<n} phi_k(x)^2`.
    pub fn christoffel(&self, n: usize, x: f64) -> Result<f64> {
        if n == 0 {
            return Err(usage("christoffel function needs n >= 1"));
        }
        let (mantissas, exponents) = self.scaled_values(n, x)?;
        let top = *exponents.iter().max().expect("n >= 1");
        let sum = scaled_sum_of_squares(&mantissas, &exponents, top);
        // sum * 2^(2 top) is the true sum of squares
        Ok(libm::ldexp(1.0 / sum, -2 * top))
    }

    /// Christoffel-weighted polynomial `psi_{k,n}(x) = sqrt(n lambda_n(x)) phi_k(x)`, `k < n`.
    pub fn weighted_poly(&self, k: usize, n: usize, x: f64) -> Result<f64> {
        if k >= n {
            return Err(usage(format!(
                "weighted polynomial psi_{{k,n}} needs k < n (k = {k}, n = {n})"
            )));
        }
        Ok(self.weighted_values(n, x)?[k])
    }

    /// All of `psi_{0,n}(x), .., psi_{n-1,n}(x)` from one fused pass.
    ///
    /// The recurrence runs on rescaled values so that `psi` stays accurate
    /// where `phi_k` alone would overflow.
    pub fn weighted_values(&self, n: usize, x: f64) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(usage("weighted polynomials need n >= 1"));
        }
        let (mantissas, exponents) = self.scaled_values(n, x)?;
        let top = *exponents.iter().max().expect("n >= 1");
        let norm = scaled_sum_of_squares(&mantissas, &exponents, top).sqrt();
        let root_n = (n as f64).sqrt();
        Ok(mantissas
            .iter()
            .zip(&exponents)
            .map(|(m, e)| root_n * libm::ldexp(*m, e - top) / norm)
            .collect())
    }

    /// Values `phi_k(x) = m_k * 2^{e_k}` for `k < n` with bounded mantissas.
    fn scaled_values(&self, n: usize, x: f64) -> Result<(Vec<f64>, Vec<i32>)> {
        self.check_degree(n - 1)?;
        let mut mantissas = Vec::with_capacity(n);
        let mut exponents = Vec::with_capacity(n);
        let mut prev = 0.0;
        let mut cur = 1.0;
        let mut exp = 0i32;
        mantissas.push(cur);
        exponents.push(exp);
        for j in 0..n - 1 {
            let next =
                ((x - self.recurrence_a[j]) * cur - self.sqrt_b[j] * prev) / self.sqrt_b[j + 1];
            prev = cur;
            cur = next;
            if cur.abs() > RESCALE_THRESHOLD {
                let (_, shift) = libm::frexp(cur);
                cur = libm::ldexp(cur, -shift);
                prev = libm::ldexp(prev, -shift);
                exp += shift;
            }
            mantissas.push(cur);
            exponents.push(exp);
        }
        Ok((mantissas, exponents))
    }

    fn check_degree(&self, k: usize) -> Result<()> {
        if k > self.max_degree {
            Err(usage(format!(
                "degree {k} exceeds max_degree {} of the {} family",
                self.max_degree, self.distribution
            )))
        } else {
            Ok(())
        }
    }
}

fn scaled_sum_of_squares(mantissas: &[f64], exponents: &[i32], top: i32) -> f64 {
    mantissas
        .iter()
        .zip(exponents)
        .map(|(m, e)| {
            let v = libm::ldexp(*m, e - top);
            v * v
        })
        .sum()
}

/// `(a_k, b_k)` of the orthonormal Jacobi family for weight
/// `(1 - x)^alpha (1 + x)^beta`, normalized to a probability measure.
fn jacobi_coefficients(alpha: f64, beta: f64, k: usize) -> (f64, f64) {
    let ab = alpha + beta;
    if k == 0 {
        return ((beta - alpha) / (ab + 2.0), 1.0);
    }
    let kf = k as f64;
    let s = 2.0 * kf + ab;
    let a = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    let b = if k == 1 {
        // the general formula is 0/0 at alpha + beta = -1
        4.0 * (1.0 + alpha) * (1.0 + beta) / ((ab + 2.0).powi(2) * (ab + 3.0))
    } else {
        4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
    };
    (a, b)
}
