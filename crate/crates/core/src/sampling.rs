//! Collocation point sets for the compared sampling strategies.
//!
//! All randomness comes from [`rng_from_seed`] (ChaCha8, a counter-based
//! stream cipher generator); distinct trials and strategies get independent
//! streams through [`derive_seed`].

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use crate::error::{domain, usage, Error, Result};
use crate::orthopoly::{MarginalDistribution, PolynomialFamily};
use crate::quadrature::TensorRule;

/// Grids up to this size are subsampled by a partial shuffle of linear
/// indices; larger grids by rejection of duplicate multi-indices.
pub const MATERIALIZE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Uniform subsample without replacement of a tensor Gauss grid, with the
    /// product quadrature weights.
    GaussSubsample,
    /// iid from the orthogonality measure, unweighted.
    RandomOrthogonality,
    /// iid from the Chebyshev (arcsine) measure with Chebyshev preconditioning weights.
    PreChebyshev,
    /// iid Chebyshev, unweighted.
    ChebyshevUnweighted,
    /// iid uniform on `[-1, 1]^d`, unweighted.
    UniformUnweighted,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::GaussSubsample,
        Strategy::RandomOrthogonality,
        Strategy::PreChebyshev,
        Strategy::ChebyshevUnweighted,
        Strategy::UniformUnweighted,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::GaussSubsample => "gauss",
            Strategy::RandomOrthogonality => "random",
            Strategy::PreChebyshev => "pre-chebyshev",
            Strategy::ChebyshevUnweighted => "chebyshev",
            Strategy::UniformUnweighted => "uniform",
        }
    }

    /// Stable numeric tag used for seed derivation.
    pub fn tag(&self) -> u64 {
        match self {
            Strategy::GaussSubsample => 1,
            Strategy::RandomOrthogonality => 2,
            Strategy::PreChebyshev => 3,
            Strategy::ChebyshevUnweighted => 4,
            Strategy::UniformUnweighted => 5,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s.trim())
            .ok_or_else(|| {
                usage(format!(
                    "unknown strategy '{s}' (expected gauss, random, pre-chebyshev, chebyshev or uniform)"
                ))
            })
    }
}

/// Grid provenance of a Gauss subsample.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample {
    pub sizes: Vec<usize>,
    /// Zero-based grid multi-index of each point.
    pub indices: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Vec<Vec<f64>>,
    /// Positive preconditioning weights, identically one when unweighted.
    pub weights: Vec<f64>,
    pub strategy: Strategy,
    pub seed: u64,
    pub grid: Option<GridSample>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed `seed ^ hash(parts)`; distinct `parts` give unrelated streams.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let hash = parts
        .iter()
        .fold(0x6A09_E667_F3BC_C908u64, |h, &p| mix64(h ^ mix64(p)));
    seed ^ hash
}

/// `m` distinct points drawn uniformly without replacement from the grid of
/// `rule`, weighted by their product quadrature weights.
pub fn subsample_gauss(rule: &TensorRule, m: usize, seed: u64) -> Result<SampleSet> {
    let card = rule.cardinality();
    if card.is_none_or(|c| m as u128 > c) {
        return Err(usage(format!(
            "cannot draw {m} distinct points from a Gauss grid of size {}",
            card.map_or_else(|| "overflow".to_string(), |c| c.to_string())
        )));
    }
    let card = card.expect("checked above");
    let mut rng = rng_from_seed(seed);
    let indices: Vec<Vec<usize>> = if card <= MATERIALIZE_LIMIT {
        rand::seq::index::sample(&mut rng, card as usize, m)
            .into_iter()
            .map(|linear| rule.unrank(linear as u128))
            .collect()
    } else {
        let mut seen = HashSet::with_capacity(m);
        let mut out = Vec::with_capacity(m);
        while out.len() < m {
            let k: Vec<usize> = rule
                .sizes()
                .iter()
                .map(|&n| rng.random_range(0..n))
                .collect();
            if seen.insert(k.clone()) {
                out.push(k);
            }
        }
        out
    };
    let points = indices.iter().map(|k| rule.point(k)).collect();
    let weights = indices.iter().map(|k| rule.weight(k)).collect();
    Ok(SampleSet {
        points,
        weights,
        strategy: Strategy::GaussSubsample,
        seed,
        grid: Some(GridSample {
            sizes: rule.sizes().to_vec(),
            indices,
        }),
    })
}

/// Marginals that [`sample_iid`] can draw from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IidMarginal {
    /// Uniform on `[-1, 1]`.
    Uniform,
    /// Arcsine law on `[-1, 1]`, drawn as `cos(pi U)`.
    Chebyshev,
    Normal,
    /// `Beta(gamma + 1, delta + 1)` mapped onto `[-1, 1]`.
    Beta {
        gamma: f64,
        delta: f64,
    },
}

impl IidMarginal {
    /// The orthogonality measure of a polynomial family.
    pub fn from_distribution(dist: MarginalDistribution) -> Result<Self> {
        match dist {
            MarginalDistribution::Beta { gamma, delta } if gamma == 0.0 && delta == 0.0 => {
                Ok(IidMarginal::Uniform)
            }
            MarginalDistribution::Beta { gamma, delta } if gamma == -0.5 && delta == -0.5 => {
                Ok(IidMarginal::Chebyshev)
            }
            MarginalDistribution::Beta { gamma, delta } => Ok(IidMarginal::Beta { gamma, delta }),
            MarginalDistribution::Gaussian => Ok(IidMarginal::Normal),
            MarginalDistribution::Exponential => Err(usage(
                "iid sampling supports uniform, Chebyshev, normal and Beta marginals only",
            )),
        }
    }
}

enum Sampler {
    Uniform,
    Chebyshev,
    Normal,
    Beta(Beta<f64>),
}

impl Sampler {
    fn new(marginal: IidMarginal) -> Result<Self> {
        Ok(match marginal {
            IidMarginal::Uniform => Sampler::Uniform,
            IidMarginal::Chebyshev => Sampler::Chebyshev,
            IidMarginal::Normal => Sampler::Normal,
            IidMarginal::Beta { gamma, delta } => {
                MarginalDistribution::beta(gamma, delta)?;
                let beta = Beta::new(gamma + 1.0, delta + 1.0)
                    .map_err(|e| domain(format!("Beta({}, {}): {e}", gamma + 1.0, delta + 1.0)))?;
                Sampler::Beta(beta)
            }
        })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Uniform => rng.random_range(-1.0..1.0),
            Sampler::Chebyshev => (PI * rng.random::<f64>()).cos(),
            Sampler::Normal => StandardNormal.sample(rng),
            Sampler::Beta(beta) => 2.0 * beta.sample(rng) - 1.0,
        }
    }
}

/// `m` iid points with independent coordinates, unit weights.
pub fn sample_iid(marginals: &[IidMarginal], m: usize, seed: u64) -> Result<SampleSet> {
    if marginals.is_empty() {
        return Err(usage("iid sampling needs at least one dimension"));
    }
    let samplers = marginals
        .iter()
        .map(|m| Sampler::new(*m))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = rng_from_seed(seed);
    let points = (0..m)
        .map(|_| samplers.iter().map(|s| s.draw(&mut rng)).collect())
        .collect();
    Ok(SampleSet {
        points,
        weights: vec![1.0; m],
        strategy: Strategy::RandomOrthogonality,
        seed,
        grid: None,
    })
}

/// Chebyshev preconditioning weights `(2/pi)^d prod_i sqrt(1 - x_i^2)`.
pub fn chebyshev_weights(points: &[Vec<f64>]) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|x| {
            let mut w = 1.0;
            for &xi in x {
                if !(xi.abs() < 1.0) {
                    return Err(domain(format!(
                        "Chebyshev weight needs |x_i| < 1, got {xi}"
                    )));
                }
                w *= 2.0 / PI * (1.0 - xi * xi).sqrt();
            }
            Ok(w)
        })
        .collect()
}

/// Draws `m` points for `strategy`. `rule` supplies the Gauss grid for
/// [`Strategy::GaussSubsample`] and is ignored otherwise.
pub fn draw_samples(
    strategy: Strategy,
    families: &[PolynomialFamily],
    rule: &TensorRule,
    m: usize,
    seed: u64,
) -> Result<SampleSet> {
    let d = families.len();
    let mut set = match strategy {
        Strategy::GaussSubsample => return subsample_gauss(rule, m, seed),
        Strategy::RandomOrthogonality => {
            let marginals = families
                .iter()
                .map(|f| IidMarginal::from_distribution(f.distribution()))
                .collect::<Result<Vec<_>>>()?;
            sample_iid(&marginals, m, seed)?
        }
        Strategy::PreChebyshev => {
            let mut set = sample_iid(&vec![IidMarginal::Chebyshev; d], m, seed)?;
            set.weights = chebyshev_weights(&set.points)?;
            set
        }
        Strategy::ChebyshevUnweighted => sample_iid(&vec![IidMarginal::Chebyshev; d], m, seed)?,
        Strategy::UniformUnweighted => sample_iid(&vec![IidMarginal::Uniform; d], m, seed)?,
    };
    set.strategy = strategy;
    Ok(set)
}
