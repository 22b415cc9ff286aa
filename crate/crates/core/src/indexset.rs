//! Multi-index sets with a fixed graded-lexicographic enumeration.
//!
//! Indices are ordered by total degree first; within one degree, larger
//! leading components come first, so `total_degree(2, 2)` enumerates
//! `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2)`.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{usage, Error, Result};

pub type MultiIndex = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexSetKind {
    /// `sum_i k_i <= n`
    TotalDegree(usize),
    /// `max_i k_i <= n`
    Tensor(usize),
    /// `k_i <= n_i` for every `i`
    AnisotropicTensor(MultiIndex),
    /// Arbitrary downward- or non-downward-closed set.
    Custom,
}

#[derive(Debug, Clone)]
pub struct MultiIndexSet {
    dim: usize,
    kind: IndexSetKind,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
}

impl PartialEq for MultiIndexSet {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.kind == other.kind && self.indices == other.indices
    }
}

/// Largest set we are willing to enumerate.
const MAX_SET_SIZE: u128 = 1 << 32;

fn graded_lex(a: &[usize], b: &[usize]) -> Ordering {
    let da: usize = a.iter().sum();
    let db: usize = b.iter().sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

/// `C(d + n, n)` with overflow detection.
fn binomial_checked(d: usize, n: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 1..=n as u128 {
        acc = acc.checked_mul(d as u128 + i)? / i;
    }
    Some(acc)
}

impl MultiIndexSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &IndexSetKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn get(&self, j: usize) -> Option<&MultiIndex> {
        self.indices.get(j)
    }

    /// Position of `k` in the enumeration.
    pub fn index_of(&self, k: &[usize]) -> Option<usize> {
        self.lookup.get(k).copied()
    }

    pub fn contains(&self, k: &[usize]) -> bool {
        self.lookup.contains_key(k)
    }

    /// Componentwise `1 + max_k k_i`: the smallest Gauss grid sizes whose
    /// tensor space contains the set.
    pub fn envelope(&self) -> MultiIndex {
        let mut env = vec![1; self.dim];
        for k in &self.indices {
            for (e, &ki) in env.iter_mut().zip(k) {
                *e = (*e).max(ki + 1);
            }
        }
        env
    }

    /// Highest degree in each dimension, `envelope() - 1`.
    pub fn max_degrees(&self) -> MultiIndex {
        self.envelope().into_iter().map(|e| e - 1).collect()
    }

    /// A set from explicit indices, re-sorted into graded-lexicographic order.
    pub fn from_indices(dim: usize, mut indices: Vec<MultiIndex>) -> Result<Self> {
        if dim == 0 {
            return Err(usage("multi-index sets need d >= 1"));
        }
        if let Some(bad) = indices.iter().find(|k| k.len() != dim) {
            return Err(usage(format!(
                "multi-index {bad:?} does not have dimension {dim}"
            )));
        }
        indices.sort_by(|a, b| graded_lex(a, b));
        indices.dedup();
        Ok(Self::assemble(dim, IndexSetKind::Custom, indices))
    }

    fn assemble(dim: usize, kind: IndexSetKind, indices: Vec<MultiIndex>) -> Self {
        let lookup = indices
            .iter()
            .enumerate()
            .map(|(j, k)| (k.clone(), j))
            .collect();
        Self {
            dim,
            kind,
            indices,
            lookup,
        }
    }
}

/// All `k` with `|k|_1 <= n`; size `C(d + n, n)`.
pub fn total_degree(d: usize, n: usize) -> Result<MultiIndexSet> {
    if d == 0 {
        return Err(usage("multi-index sets need d >= 1"));
    }
    let size = binomial_checked(d, n)
        .filter(|s| *s <= MAX_SET_SIZE)
        .ok_or_else(|| {
            Error::Capacity(format!(
                "total-degree set with d = {d}, n = {n} is too large"
            ))
        })?;
    let mut indices = Vec::with_capacity(size as usize);
    let mut prefix = Vec::with_capacity(d);
    for degree in 0..=n {
        push_exact_degree(d, degree, &mut prefix, &mut indices);
    }
    Ok(MultiIndexSet::assemble(
        d,
        IndexSetKind::TotalDegree(n),
        indices,
    ))
}

fn push_exact_degree(
    remaining_dims: usize,
    degree: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<MultiIndex>,
) {
    if remaining_dims == 1 {
        let mut k = prefix.clone();
        k.push(degree);
        out.push(k);
        return;
    }
    for first in (0..=degree).rev() {
        prefix.push(first);
        push_exact_degree(remaining_dims - 1, degree - first, prefix, out);
        prefix.pop();
    }
}

/// All `k` with `max_i k_i <= n`; size `(n + 1)^d`.
pub fn tensor(d: usize, n: usize) -> Result<MultiIndexSet> {
    if d == 0 {
        return Err(usage("multi-index sets need d >= 1"));
    }
    let mut set = anisotropic_tensor(&vec![n; d])?;
    set.kind = IndexSetKind::Tensor(n);
    Ok(set)
}

/// All `k` with `k_i <= n_i`.
pub fn anisotropic_tensor(n: &[usize]) -> Result<MultiIndexSet> {
    let d = n.len();
    if d == 0 {
        return Err(usage("multi-index sets need d >= 1"));
    }
    let size = n
        .iter()
        .try_fold(1u128, |acc, &ni| acc.checked_mul(ni as u128 + 1))
        .filter(|s| *s <= MAX_SET_SIZE)
        .ok_or_else(|| Error::Capacity(format!("tensor set with bounds {n:?} is too large")))?;
    let mut indices = Vec::with_capacity(size as usize);
    let mut k = vec![0usize; d];
    loop {
        indices.push(k.clone());
        let mut dim = d;
        loop {
            if dim == 0 {
                indices.sort_by(|a, b| graded_lex(a, b));
                return Ok(MultiIndexSet::assemble(
                    d,
                    IndexSetKind::AnisotropicTensor(n.to_vec()),
                    indices,
                ));
            }
            dim -= 1;
            if k[dim] < n[dim] {
                k[dim] += 1;
                break;
            }
            k[dim] = 0;
        }
    }
}
