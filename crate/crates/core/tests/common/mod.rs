//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Raw moments `E[X^k]`, `k < count`, of the densities with rational moments.
pub enum MomentFamily {
    /// Uniform on [-1, 1].
    Legendre,
    /// Arcsine law on [-1, 1].
    Chebyshev,
    /// Density proportional to `1 - x^2`.
    JacobiOneOne,
    /// Standard normal.
    Hermite,
    /// Unit exponential.
    Laguerre,
}

pub fn moments(family: &MomentFamily, count: usize) -> Vec<BigRational> {
    (0..count)
        .map(|k| {
            let k = k as i64;
            match family {
                _ if k % 2 == 1 && !matches!(family, MomentFamily::Laguerre) => BigRational::zero(),
                MomentFamily::Legendre => rat(1, k + 1),
                MomentFamily::Chebyshev => {
                    // C(k, k/2) / 2^k
                    let mut v = BigRational::one();
                    for i in 0..k / 2 {
                        v *= rat(k - i, i + 1);
                    }
                    v / BigRational::from_integer(BigInt::from(2).pow(k as u32))
                }
                MomentFamily::JacobiOneOne => rat(3, (k + 1) * (k + 3)),
                MomentFamily::Hermite => {
                    let mut v = BigRational::one();
                    let mut j = k - 1;
                    while j > 0 {
                        v *= rat(j, 1);
                        j -= 2;
                    }
                    v
                }
                MomentFamily::Laguerre => {
                    (1..=k).fold(BigRational::one(), |acc, j| acc * rat(j, 1))
                }
            }
        })
        .collect()
}

/// Polynomial as coefficients in the monomial basis.
pub type Poly = Vec<BigRational>;

fn inner(p: &Poly, q: &Poly, mu: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, a) in p.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in q.iter().enumerate() {
            acc += a * b * &mu[i + j];
        }
    }
    acc
}

fn times_x(p: &Poly) -> Poly {
    let mut out = vec![BigRational::zero()];
    out.extend(p.iter().cloned());
    out
}

fn axpy(p: &mut Poly, a: &BigRational, q: &Poly) {
    if p.len() < q.len() {
        p.resize(q.len(), BigRational::zero());
    }
    for (pi, qi) in p.iter_mut().zip(q) {
        *pi += a * qi;
    }
}

/// Monic orthogonal polynomials `p_0..=p_n` by exact Gram–Schmidt, with
/// `a_k = <x p_k, p_k> / <p_k, p_k>` and `b_k = <p_k, p_k> / <p_{k-1}, p_{k-1}>`.
pub struct ExactFamily {
    pub monic: Vec<Poly>,
    pub norms: Vec<BigRational>,
    pub a: Vec<BigRational>,
    pub b: Vec<BigRational>,
}

pub fn exact_family(family: &MomentFamily, n: usize) -> ExactFamily {
    let mu = moments(family, 2 * n + 3);
    let mut monic: Vec<Poly> = vec![vec![BigRational::one()]];
    let mut norms = vec![inner(&monic[0], &monic[0], &mu)];
    let mut a = Vec::new();
    let mut b = vec![BigRational::one()];
    for k in 0..n {
        let xp = times_x(&monic[k]);
        let ak = inner(&xp, &monic[k], &mu) / &norms[k];
        let mut next = xp;
        axpy(&mut next, &-ak.clone(), &monic[k]);
        if k > 0 {
            let bk = &norms[k] / &norms[k - 1];
            axpy(&mut next, &-bk, &monic[k - 1]);
        }
        a.push(ak);
        norms.push(inner(&next, &next, &mu));
        b.push(&norms[k + 1] / &norms[k]);
        monic.push(next);
    }
    ExactFamily { monic, norms, a, b }
}

impl ExactFamily {
    /// Orthonormal `phi_k(x)` evaluated in f64 from the exact monic polynomial.
    pub fn orthonormal(&self, k: usize, x: f64) -> f64 {
        let p: f64 = self.monic[k]
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap());
        p / self.norms[k].to_f64().unwrap().sqrt()
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

/// Minimum `||c||_1` subject to `A c = b` by vertex enumeration: the optimum
/// of the equivalent LP is attained on a support of `M` linearly independent
/// columns. Returns `None` when no such support is consistent.
pub fn min_l1_vertex(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<(f64, DVector<f64>)> {
    let (m, n) = a.shape();
    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut cols: Vec<usize> = (0..m).collect();
    loop {
        let lu = a.select_columns(&cols).lu();
        if lu.determinant().abs() > 1e-12 {
            if let Some(x) = lu.solve(b) {
                let norm: f64 = x.iter().map(|v| v.abs()).sum();
                if best.as_ref().is_none_or(|(bn, _)| norm < *bn) {
                    let mut full = DVector::zeros(n);
                    for (i, &c) in cols.iter().enumerate() {
                        full[c] = x[i];
                    }
                    best = Some((norm, full));
                }
            }
        }
        // next m-subset in lexicographic order
        let mut i = m;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if cols[i] < n - m + i {
                cols[i] += 1;
                for j in i + 1..m {
                    cols[j] = cols[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Restricted isometry constant from cyclic Jacobi rotations on every
/// `s`-column Gram block. Blocks of size exactly `s` suffice by interlacing.
pub fn ric_jacobi(a: &DMatrix<f64>, s: usize) -> f64 {
    let n = a.ncols();
    let gram = a.transpose() * a;
    let mut worst = 0.0f64;
    let mut cols: Vec<usize> = (0..s).collect();
    loop {
        let mut g = DMatrix::from_fn(s, s, |i, j| gram[(cols[i], cols[j])]);
        for _ in 0..100 {
            let mut off = 0.0;
            for p in 0..s {
                for q in p + 1..s {
                    off += g[(p, q)] * g[(p, q)];
                    if g[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (g[(q, q)] - g[(p, p)]) / (2.0 * g[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let sn = t * c;
                    let mut rot = DMatrix::<f64>::identity(s, s);
                    rot[(p, p)] = c;
                    rot[(q, q)] = c;
                    rot[(p, q)] = sn;
                    rot[(q, p)] = -sn;
                    g = rot.transpose() * g * rot;
                }
            }
            if off < 1e-30 {
                break;
            }
        }
        for i in 0..s {
            worst = worst.max((g[(i, i)] - 1.0).abs());
        }
        let mut i = s;
        loop {
            if i == 0 {
                return worst;
            }
            i -= 1;
            if cols[i] < n - s + i {
                cols[i] += 1;
                for j in i + 1..s {
                    cols[j] = cols[j - 1] + 1;
                }
                break;
            }
        }
    }
}
