mod common;

use common::{exact_family, to_f64, MomentFamily};
use quadsub::orthopoly::{MarginalDistribution, PolynomialFamily};

const MAX_K: usize = 10;

fn cases() -> Vec<(MomentFamily, MarginalDistribution)> {
    vec![
        (MomentFamily::Legendre, MarginalDistribution::uniform()),
        (MomentFamily::Chebyshev, MarginalDistribution::chebyshev()),
        (
            MomentFamily::JacobiOneOne,
            MarginalDistribution::beta(1.0, 1.0).unwrap(),
        ),
        (MomentFamily::Hermite, MarginalDistribution::Gaussian),
        (MomentFamily::Laguerre, MarginalDistribution::Exponential),
    ]
}

fn close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs().max(1.0)
}

#[test]
fn recurrence_matches_exact_gram_schmidt() {
    for (moments, dist) in cases() {
        let exact = exact_family(&moments, MAX_K);
        let fam = PolynomialFamily::build(dist, MAX_K).unwrap();
        for k in 0..MAX_K {
            assert!(
                close(fam.recurrence_a()[k], to_f64(&exact.a[k]), 1e-12),
                "{dist} a_{k}: {} vs {}",
                fam.recurrence_a()[k],
                to_f64(&exact.a[k])
            );
            assert!(
                close(fam.recurrence_b()[k], to_f64(&exact.b[k]), 1e-12),
                "{dist} b_{k}: {} vs {}",
                fam.recurrence_b()[k],
                to_f64(&exact.b[k])
            );
        }
    }
}

#[test]
fn values_match_exact_polynomials_up_to_sign() {
    // Laguerre uses the classical sign (-1)^k; the others have positive
    // leading coefficients.
    for (moments, dist) in cases() {
        let exact = exact_family(&moments, MAX_K);
        let fam = PolynomialFamily::build(dist, MAX_K).unwrap();
        let laguerre = dist == MarginalDistribution::Exponential;
        let points: &[f64] = if laguerre {
            &[0.0, 0.3, 1.7, 4.0, 9.5]
        } else {
            &[-0.9, -0.25, 0.0, 0.6, 1.0]
        };
        for &x in points {
            let vals = fam.values(x, MAX_K + 1).unwrap();
            for (k, v) in vals.iter().enumerate() {
                let sign = if laguerre && k % 2 == 1 { -1.0 } else { 1.0 };
                let want = sign * exact.orthonormal(k, x);
                assert!(
                    close(*v, want, 1e-10),
                    "{dist} phi_{k}({x}) = {v}, exact {want}"
                );
            }
        }
    }
}

#[test]
fn chebyshev_matches_cosines() {
    let fam = PolynomialFamily::build(MarginalDistribution::chebyshev(), 12).unwrap();
    for &theta in &[0.1f64, 0.7, 1.3, 2.9] {
        let vals = fam.values(theta.cos(), 13).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14);
        for (k, v) in vals.iter().enumerate().skip(1) {
            let want = 2f64.sqrt() * (k as f64 * theta).cos();
            assert!((v - want).abs() < 1e-12, "k={k}");
        }
    }
}
