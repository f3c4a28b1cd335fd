//! Finite-alphabet probability machinery.
//!
//! Everything is stored as natural-log probabilities. Zero mass is `-inf`,
//! and reductions go through [`logsumexp`] so that dataset-level products of
//! `n` probabilities never underflow.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default cap on the number of enumerated outcomes.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// Normalization tolerance for stored distributions.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// `log(sum(exp(x)))`, returning `-inf` for an empty or all `-inf` input.
pub fn logsumexp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + values.iter().map(|&v| (v - max).exp()).sum::<f64>().ln()
}

/// Streaming log-sum-exp with a running maximum.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    scaled_sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled_sum: 0.0,
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, value: f64) {
        if value == f64::NEG_INFINITY {
            return;
        }
        if value > self.max {
            self.scaled_sum = self.scaled_sum * (self.max - value).exp() + 1.0;
            self.max = value;
        } else {
            self.scaled_sum += (value - self.max).exp();
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled_sum.ln()
        }
    }
}

impl FromIterator<f64> for LogSumExp {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = LogSumExp::new();
        for v in iter {
            acc.push(v);
        }
        acc
    }
}

/// A probability vector over `{0, .., support_size - 1}` held in log domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    log_probs: Vec<f64>,
}

impl Distribution {
    /// Normalizes nonnegative finite weights. Zero weights become `-inf`.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySupport);
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFiniteWeight { index });
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight { index, value: w });
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::AllZeroWeights);
        }
        let log_total = total.ln();
        let log_probs = weights
            .iter()
            .map(|&w| {
                if w == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    w.ln() - log_total
                }
            })
            .collect();
        Ok(Self { log_probs })
    }

    /// Normalizes unnormalized log-weights (entries may be `-inf`).
    pub fn from_log_weights(log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.is_empty() {
            return Err(Error::EmptySupport);
        }
        for (index, &lw) in log_weights.iter().enumerate() {
            if lw.is_nan() || lw == f64::INFINITY {
                return Err(Error::NonFiniteWeight { index });
            }
        }
        let total = logsumexp(&log_weights);
        if total == f64::NEG_INFINITY {
            return Err(Error::AllZeroWeights);
        }
        let log_probs = log_weights.into_iter().map(|lw| lw - total).collect();
        Ok(Self { log_probs })
    }

    pub fn uniform(support_size: usize) -> Result<Self> {
        if support_size == 0 {
            return Err(Error::EmptySupport);
        }
        let lp = -(support_size as f64).ln();
        Ok(Self {
            log_probs: vec![lp; support_size],
        })
    }

    pub fn point_mass(support_size: usize, index: usize) -> Result<Self> {
        if index >= support_size {
            return Err(Error::EmptySupport);
        }
        let mut log_probs = vec![f64::NEG_INFINITY; support_size];
        log_probs[index] = 0.0;
        Ok(Self { log_probs })
    }

    pub fn len(&self) -> usize {
        self.log_probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_probs.is_empty()
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn log_prob(&self, i: usize) -> f64 {
        self.log_probs[i]
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.log_probs[i].exp()
    }

    pub fn probs(&self) -> Vec<f64> {
        self.log_probs.iter().map(|lp| lp.exp()).collect()
    }

    /// Index of the largest entry, lowest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &lp) in self.log_probs.iter().enumerate() {
            if lp > self.log_probs[best] {
                best = i;
            }
        }
        best
    }

    /// Inverse-CDF draw from a uniform variate in `[0, 1)`.
    pub fn sample_with(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &lp) in self.log_probs.iter().enumerate() {
            if lp == f64::NEG_INFINITY {
                continue;
            }
            last_positive = i;
            acc += lp.exp();
            if u < acc {
                return i;
            }
        }
        last_positive
    }
}

/// Joint law `p(x, y)` on a finite `X x Y`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    x_size: usize,
    y_size: usize,
    flat: Distribution,
}

impl JointDistribution {
    /// Row-major nonnegative weights, normalized here.
    pub fn from_weights(x_size: usize, y_size: usize, weights: &[f64]) -> Result<Self> {
        if x_size == 0 || y_size == 0 {
            return Err(Error::EmptySupport);
        }
        if weights.len() != x_size * y_size {
            return Err(Error::DimensionMismatch {
                expected: (x_size, y_size),
                found: (weights.len(), 1),
            });
        }
        Ok(Self {
            x_size,
            y_size,
            flat: Distribution::from_weights(weights)?,
        })
    }

    pub fn from_log_weights(x_size: usize, y_size: usize, log_weights: Vec<f64>) -> Result<Self> {
        if x_size == 0 || y_size == 0 {
            return Err(Error::EmptySupport);
        }
        if log_weights.len() != x_size * y_size {
            return Err(Error::DimensionMismatch {
                expected: (x_size, y_size),
                found: (log_weights.len(), 1),
            });
        }
        Ok(Self {
            x_size,
            y_size,
            flat: Distribution::from_log_weights(log_weights)?,
        })
    }

    /// Builds `p(x) p(y|x)` from a marginal and per-x conditionals.
    pub fn from_marginal_and_conditionals(px: &Distribution, rows: &[Distribution]) -> Result<Self> {
        if rows.len() != px.len() || rows.is_empty() {
            return Err(Error::SupportMismatch {
                left: px.len(),
                right: rows.len(),
            });
        }
        let y_size = rows[0].len();
        let mut lw = Vec::with_capacity(px.len() * y_size);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != y_size {
                return Err(Error::SupportMismatch {
                    left: y_size,
                    right: row.len(),
                });
            }
            lw.extend(row.log_probs().iter().map(|&l| px.log_prob(x) + l));
        }
        Self::from_log_weights(px.len(), y_size, lw)
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.x_size, self.y_size)
    }

    pub fn log_prob(&self, x: usize, y: usize) -> f64 {
        self.flat.log_prob(x * self.y_size + y)
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.log_prob(x, y).exp()
    }

    /// Row-major log-probabilities.
    pub fn log_probs(&self) -> &[f64] {
        self.flat.log_probs()
    }

    /// The joint as a single distribution over pair codes `x * |Y| + y`.
    pub fn flatten(&self) -> &Distribution {
        &self.flat
    }

    pub fn marginal_x(&self) -> Distribution {
        let lw = (0..self.x_size)
            .map(|x| logsumexp(&self.log_probs()[x * self.y_size..(x + 1) * self.y_size]))
            .collect();
        Distribution::from_log_weights(lw).expect("joint has positive mass")
    }

    pub fn marginal_y(&self) -> Distribution {
        let lw = (0..self.y_size)
            .map(|y| {
                (0..self.x_size)
                    .map(|x| self.log_prob(x, y))
                    .collect::<LogSumExp>()
                    .value()
            })
            .collect();
        Distribution::from_log_weights(lw).expect("joint has positive mass")
    }

    /// `p(y|x)`. Rows with `p(x) = 0` are undefined and returned uniform.
    pub fn conditional_y_given_x(&self, x: usize) -> Distribution {
        let row = self.log_probs()[x * self.y_size..(x + 1) * self.y_size].to_vec();
        Distribution::from_log_weights(row).unwrap_or_else(|_| Distribution::uniform(self.y_size).expect("y_size >= 1"))
    }

    /// The joint of `(y, x)`.
    pub fn transpose(&self) -> JointDistribution {
        let mut lw = Vec::with_capacity(self.x_size * self.y_size);
        for y in 0..self.y_size {
            for x in 0..self.x_size {
                lw.push(self.log_prob(x, y));
            }
        }
        JointDistribution {
            x_size: self.y_size,
            y_size: self.x_size,
            flat: Distribution { log_probs: lw },
        }
    }
}

/// A data law together with the training-set size.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub joint: JointDistribution,
    pub n: usize,
}

impl World {
    pub fn new(joint: JointDistribution, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(Self { joint, n })
    }

    pub fn dataset_space(&self, cap: u64) -> Result<DatasetSpace> {
        DatasetSpace::new(&self.joint, self.n, cap)
    }

    pub fn sample_dataset(&self, seed: u64) -> Dataset {
        sample_dataset(&self.joint, self.n, seed)
    }
}

/// An ordered training set of `(x, y)` index pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dataset {
    pairs: Vec<(usize, usize)>,
}

impl Dataset {
    pub fn new(pairs: Vec<(usize, usize)>, x_size: usize, y_size: usize) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(&(x, y)) = pairs.iter().find(|&&(x, y)| x >= x_size || y >= y_size) {
            return Err(Error::IndexOutOfRange { x, y, x_size, y_size });
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    /// `log p(S) = sum log p(x_i, y_i)`.
    pub fn log_prob(&self, joint: &JointDistribution) -> f64 {
        self.pairs.iter().map(|&(x, y)| joint.log_prob(x, y)).sum()
    }
}

/// Every dataset of size `n` over a joint's support, in lexicographic order
/// of `(x, y)` pairs with the first pair most significant.
#[derive(Debug, Clone)]
pub struct DatasetSpace {
    x_size: usize,
    y_size: usize,
    n: usize,
    pair_log_probs: Vec<f64>,
    len: usize,
}

impl DatasetSpace {
    pub fn new(joint: &JointDistribution, n: usize, cap: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let pair_count = (joint.x_size() * joint.y_size()) as u128;
        let size = checked_size(pair_count, n);
        match size {
            Some(size) if size <= cap as u128 => Ok(Self {
                x_size: joint.x_size(),
                y_size: joint.y_size(),
                n,
                pair_log_probs: joint.log_probs().to_vec(),
                len: size as usize,
            }),
            _ => Err(Error::EnumerationCapExceeded {
                size: size.unwrap_or(u128::MAX),
                cap,
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.x_size, self.y_size)
    }

    pub fn pair_count(&self) -> usize {
        self.pair_log_probs.len()
    }

    /// Writes the pair codes (`x * |Y| + y`) of dataset `index` into `codes`.
    pub fn decode_into(&self, index: usize, codes: &mut [usize]) {
        let k = self.pair_count();
        let mut rest = index;
        for slot in codes.iter_mut().rev() {
            *slot = rest % k;
            rest /= k;
        }
    }

    pub fn dataset(&self, index: usize) -> Dataset {
        let mut codes = vec![0; self.n];
        self.decode_into(index, &mut codes);
        Dataset {
            pairs: codes.iter().map(|&c| (c / self.y_size, c % self.y_size)).collect(),
        }
    }

    pub fn index_of(&self, dataset: &Dataset) -> Result<usize> {
        if dataset.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: (self.n, 0),
                found: (dataset.n(), 0),
            });
        }
        let k = self.pair_count();
        let mut index = 0usize;
        for &(x, y) in dataset.pairs() {
            if x >= self.x_size || y >= self.y_size {
                return Err(Error::IndexOutOfRange {
                    x,
                    y,
                    x_size: self.x_size,
                    y_size: self.y_size,
                });
            }
            index = index * k + x * self.y_size + y;
        }
        Ok(index)
    }

    pub fn log_prob(&self, index: usize) -> f64 {
        let mut codes = vec![0; self.n];
        self.decode_into(index, &mut codes);
        codes.iter().map(|&c| self.pair_log_probs[c]).sum()
    }

    pub fn pair_log_probs(&self) -> &[f64] {
        &self.pair_log_probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (Dataset, f64)> + '_ {
        (0..self.len).map(move |i| (self.dataset(i), self.log_prob(i)))
    }
}

fn checked_size(base: u128, exp: usize) -> Option<u128> {
    let exp = u32::try_from(exp).ok()?;
    base.checked_pow(exp)
}

/// Streams every dataset with its log-probability, lexicographically.
pub fn enumerate_datasets(
    joint: &JointDistribution,
    n: usize,
    cap: u64,
) -> Result<impl Iterator<Item = (Dataset, f64)>> {
    let space = DatasetSpace::new(joint, n, cap)?;
    Ok((0..space.len()).map(move |i| (space.dataset(i), space.log_prob(i))))
}

/// `n` i.i.d. pairs from the joint; deterministic in `seed`.
pub fn sample_dataset(joint: &JointDistribution, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_dataset_with(joint, n, &mut rng)
}

pub fn sample_dataset_with<R: Rng + ?Sized>(joint: &JointDistribution, n: usize, rng: &mut R) -> Dataset {
    let weights = joint.flatten().probs();
    let index = WeightedIndex::new(&weights).expect("joint has positive mass");
    let y_size = joint.y_size();
    let pairs = (0..n)
        .map(|_| {
            let c = index.sample(rng);
            (c / y_size, c % y_size)
        })
        .collect();
    Dataset { pairs }
}
