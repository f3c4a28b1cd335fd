//! Stochastic learners `p(h|S)` over a finite hypothesis set and the exact
//! joint analysis over every `(S, h)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp1};
use rayon::prelude::*;

use crate::classifier::{tilde_ce, tilted_distribution, SoftClassifier};
use crate::error::{Error, Result};
use crate::prob::{Dataset, DatasetSpace, Distribution, LogSumExp, World};

/// Nonempty ordered list of classifiers sharing one alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisSet {
    hypotheses: Vec<SoftClassifier>,
}

impl HypothesisSet {
    pub fn new(hypotheses: Vec<SoftClassifier>) -> Result<Self> {
        let first = hypotheses.first().ok_or(Error::EmptyHypothesisSet)?;
        if let Some(h) = hypotheses.iter().find(|h| h.dims() != first.dims()) {
            return Err(Error::DimensionMismatch {
                expected: first.dims(),
                found: h.dims(),
            });
        }
        Ok(Self { hypotheses })
    }

    /// `count` classifiers with rows drawn uniformly from the simplex.
    pub fn random(count: usize, x_size: usize, y_size: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hypotheses = (0..count)
            .map(|_| {
                let w: Vec<f64> = (0..x_size * y_size).map(|_| Exp1.sample(&mut rng)).collect();
                SoftClassifier::from_rows(x_size, y_size, &w)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(hypotheses)
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn get(&self, h: usize) -> &SoftClassifier {
        &self.hypotheses[h]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SoftClassifier> {
        self.hypotheses.iter()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.hypotheses[0].dims()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearnerKind {
    /// `p(h|S) ∝ prior(h) exp(-gamma n CE_S(h))`
    GibbsErm { gamma: f64 },
    /// Point mass on the lowest-index minimizer of `CE_S`.
    DeterministicErm,
    /// `p(h|S) = prior(h)`
    DataIndependent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Learner {
    kind: LearnerKind,
    prior: Distribution,
    hypotheses: HypothesisSet,
}

impl Learner {
    /// A `None` prior means uniform over the hypothesis set.
    pub fn new(kind: LearnerKind, hypotheses: HypothesisSet, prior: Option<Distribution>) -> Result<Self> {
        if let LearnerKind::GibbsErm { gamma } = kind {
            if !(gamma >= 0.0) || !gamma.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "gamma",
                    value: gamma,
                    reason: "must be finite and nonnegative",
                });
            }
        }
        let prior = match prior {
            Some(p) if p.len() != hypotheses.len() => {
                return Err(Error::SupportMismatch {
                    left: p.len(),
                    right: hypotheses.len(),
                })
            }
            Some(p) => p,
            None => Distribution::uniform(hypotheses.len())?,
        };
        Ok(Self {
            kind,
            prior,
            hypotheses,
        })
    }

    pub fn gibbs(hypotheses: HypothesisSet, gamma: f64) -> Result<Self> {
        Self::new(LearnerKind::GibbsErm { gamma }, hypotheses, None)
    }

    pub fn deterministic_erm(hypotheses: HypothesisSet) -> Result<Self> {
        Self::new(LearnerKind::DeterministicErm, hypotheses, None)
    }

    pub fn data_independent(hypotheses: HypothesisSet) -> Result<Self> {
        Self::new(LearnerKind::DataIndependent, hypotheses, None)
    }

    pub fn kind(&self) -> LearnerKind {
        self.kind
    }

    pub fn prior(&self) -> &Distribution {
        &self.prior
    }

    pub fn hypotheses(&self) -> &HypothesisSet {
        &self.hypotheses
    }

    pub fn with_kind(&self, kind: LearnerKind) -> Result<Self> {
        Self::new(kind, self.hypotheses.clone(), Some(self.prior.clone()))
    }

    pub fn posterior(&self, s: &Dataset) -> Result<Distribution> {
        let ce = self
            .hypotheses
            .iter()
            .map(|h| crate::classifier::empirical_ce(s, h))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.posterior_from_ce(s.n(), &ce))
    }

    /// Posterior given the empirical cross-entropy of every hypothesis.
    pub fn posterior_from_ce(&self, n: usize, ce: &[f64]) -> Distribution {
        match self.kind {
            LearnerKind::GibbsErm { gamma } if gamma > 0.0 => {
                let scale = gamma * n as f64;
                let lw = self
                    .prior
                    .log_probs()
                    .iter()
                    .zip(ce)
                    .map(|(lp, c)| lp - scale * c)
                    .collect();
                Distribution::from_log_weights(lw).expect("prior has positive mass")
            }
            LearnerKind::GibbsErm { .. } | LearnerKind::DataIndependent => self.prior.clone(),
            LearnerKind::DeterministicErm => {
                let mut best = 0;
                for (h, &c) in ce.iter().enumerate() {
                    if c < ce[best] {
                        best = h;
                    }
                }
                Distribution::point_mass(ce.len(), best).expect("nonempty")
            }
        }
    }
}

/// Exact tables over `DatasetSpace × H`, all probabilities in log domain.
///
/// Tables indexed by `(s, h)` are row-major: `s * |H| + h`.
#[derive(Debug, Clone)]
pub struct LearnerAnalysis {
    world: World,
    learner: Learner,
    space: DatasetSpace,
    h_count: usize,
    log_p_s: Vec<f64>,
    ce_s: Vec<f64>,
    log_post: Vec<f64>,
    log_q: Vec<f64>,
    tilde_ce: Vec<f64>,
    log_prior: Vec<f64>,
    induced_prior: Distribution,
    mi: f64,
    expected_gap: f64,
    cs: Vec<f64>,
    log_bc: Vec<f64>,
    /// `(log p(S) p(h|S), gap)` for every positive-mass pair.
    support: Vec<(f64, f64)>,
}

struct Row {
    ce: Vec<f64>,
    log_post: Vec<f64>,
    log_q: Vec<f64>,
}

/// Enumerates every dataset and hypothesis. Fails when `|S|·|H|` exceeds `cap`.
pub fn analyze(world: &World, learner: &Learner, cap: u64) -> Result<LearnerAnalysis> {
    let hyps = learner.hypotheses();
    let joint = &world.joint;
    if hyps.dims() != joint.dims() {
        return Err(Error::DimensionMismatch {
            expected: joint.dims(),
            found: hyps.dims(),
        });
    }
    let space = world.dataset_space(cap)?;
    let h_count = hyps.len();
    let cells = space.len() as u128 * h_count as u128;
    if cells > cap as u128 {
        return Err(Error::EnumerationCapExceeded { size: cells, cap });
    }
    let n = world.n;
    let tilde: Vec<f64> = hyps.iter().map(|h| tilde_ce(joint, h)).collect::<Result<_>>()?;
    let log_q_pair: Vec<Vec<f64>> = hyps
        .iter()
        .map(|h| tilted_distribution(joint, h).map(|q| q.log_probs().to_vec()))
        .collect::<Result<_>>()?;

    let rows: Vec<Row> = (0..space.len())
        .into_par_iter()
        .map_init(
            || vec![0usize; n],
            |codes, s| {
                space.decode_into(s, codes);
                let ce: Vec<f64> = hyps
                    .iter()
                    .map(|h| {
                        let lh = h.log_probs();
                        -codes.iter().map(|&c| lh[c]).sum::<f64>() / n as f64
                    })
                    .collect();
                let log_q = log_q_pair
                    .iter()
                    .map(|lq| codes.iter().map(|&c| lq[c]).sum::<f64>())
                    .collect();
                let log_post = learner.posterior_from_ce(n, &ce).log_probs().to_vec();
                Row { ce, log_post, log_q }
            },
        )
        .collect();

    let log_p_s: Vec<f64> = (0..space.len()).map(|s| space.log_prob(s)).collect();
    let mut ce_s = Vec::with_capacity(rows.len() * h_count);
    let mut log_post = Vec::with_capacity(rows.len() * h_count);
    let mut log_q = Vec::with_capacity(rows.len() * h_count);
    for row in rows {
        ce_s.extend(row.ce);
        log_post.extend(row.log_post);
        log_q.extend(row.log_q);
    }

    let mut prior_acc = vec![LogSumExp::new(); h_count];
    for (s, &lps) in log_p_s.iter().enumerate() {
        for (h, acc) in prior_acc.iter_mut().enumerate() {
            acc.push(lps + log_post[s * h_count + h]);
        }
    }
    let log_prior: Vec<f64> = prior_acc.iter().map(LogSumExp::value).collect();
    let induced_prior = Distribution::from_log_weights(log_prior.clone())?;

    let mut mi = 0.0;
    let mut expected_gap = 0.0;
    let mut support = Vec::new();
    let mut cs = Vec::with_capacity(log_p_s.len());
    for (s, &lps) in log_p_s.iter().enumerate() {
        let mut chi = LogSumExp::new();
        for h in 0..h_count {
            let lpost = log_post[s * h_count + h];
            if lpost == f64::NEG_INFINITY {
                continue;
            }
            chi.push(2.0 * lpost - log_prior[h]);
            let lw = lps + lpost;
            if lw == f64::NEG_INFINITY {
                continue;
            }
            let w = lw.exp();
            let gap = tilde[h] - ce_s[s * h_count + h];
            mi += w * (lpost - log_prior[h]);
            expected_gap += w * gap;
            support.push((lw, gap));
        }
        cs.push((chi.value().exp() - 1.0).max(0.0));
    }

    // Bhattacharyya coefficient sum_S sqrt(q(S|h) p(S|h)) per hypothesis.
    let log_bc = (0..h_count)
        .map(|h| {
            if log_prior[h] == f64::NEG_INFINITY {
                return f64::NAN;
            }
            let acc: LogSumExp = (0..log_p_s.len())
                .map(|s| {
                    let lp = log_p_s[s] + log_post[s * h_count + h] - log_prior[h];
                    0.5 * (log_q[s * h_count + h] + lp)
                })
                .collect();
            acc.value().min(0.0)
        })
        .collect();

    Ok(LearnerAnalysis {
        world: world.clone(),
        learner: learner.clone(),
        space,
        h_count,
        log_p_s,
        ce_s,
        log_post,
        log_q,
        tilde_ce: tilde,
        log_prior,
        induced_prior,
        mi: mi.max(0.0),
        expected_gap,
        cs,
        log_bc,
        support,
    })
}

impl LearnerAnalysis {
    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn learner(&self) -> &Learner {
        &self.learner
    }

    pub fn space(&self) -> &DatasetSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.world.n
    }

    pub fn dataset_count(&self) -> usize {
        self.log_p_s.len()
    }

    pub fn hypothesis_count(&self) -> usize {
        self.h_count
    }

    fn idx(&self, s: usize, h: usize) -> usize {
        s * self.h_count + h
    }

    pub fn log_p_s(&self, s: usize) -> f64 {
        self.log_p_s[s]
    }

    pub fn log_posterior(&self, s: usize, h: usize) -> f64 {
        self.log_post[self.idx(s, h)]
    }

    /// `log p(S) + log p(h|S)`.
    pub fn log_joint(&self, s: usize, h: usize) -> f64 {
        self.log_p_s[s] + self.log_post[self.idx(s, h)]
    }

    pub fn posterior(&self, s: usize) -> Distribution {
        let row = &self.log_post[s * self.h_count..(s + 1) * self.h_count];
        Distribution::from_log_weights(row.to_vec()).expect("posterior rows are distributions")
    }

    /// Induced prior `p(h) = sum_S p(S) p(h|S)`.
    pub fn induced_prior(&self) -> &Distribution {
        &self.induced_prior
    }

    pub fn log_prior(&self, h: usize) -> f64 {
        self.log_prior[h]
    }

    pub fn ce_s(&self, s: usize, h: usize) -> f64 {
        self.ce_s[self.idx(s, h)]
    }

    pub fn tilde_ce(&self, h: usize) -> f64 {
        self.tilde_ce[h]
    }

    pub fn gap(&self, s: usize, h: usize) -> f64 {
        self.tilde_ce[h] - self.ce_s(s, h)
    }

    /// `log q(S|h)` from the product of tilted pair probabilities.
    pub fn log_q(&self, s: usize, h: usize) -> f64 {
        self.log_q[self.idx(s, h)]
    }

    /// `(1/n) log(q(S|h)/p(S))`; for null datasets the per-pair ratio is used.
    pub fn log_ratio(&self, s: usize, h: usize) -> f64 {
        if self.log_p_s[s] == f64::NEG_INFINITY {
            return self.gap(s, h);
        }
        (self.log_q(s, h) - self.log_p_s[s]) / self.n() as f64
    }

    /// `log p(S|h)` by Bayes' rule; NaN when `p(h) = 0`.
    pub fn log_p_s_given_h(&self, s: usize, h: usize) -> f64 {
        if self.log_prior[h] == f64::NEG_INFINITY {
            return f64::NAN;
        }
        self.log_joint(s, h) - self.log_prior[h]
    }

    /// `p(S|h)` as a distribution over datasets, `None` when `p(h) = 0`.
    pub fn p_s_given_h(&self, h: usize) -> Option<Distribution> {
        if self.log_prior[h] == f64::NEG_INFINITY {
            return None;
        }
        let lw = (0..self.dataset_count()).map(|s| self.log_joint(s, h)).collect();
        Some(Distribution::from_log_weights(lw).expect("positive column mass"))
    }

    /// The tilted dataset law `q(S|h)`.
    pub fn q_s_given_h(&self, h: usize) -> Distribution {
        let lw = (0..self.dataset_count()).map(|s| self.log_q(s, h)).collect();
        Distribution::from_log_weights(lw).expect("tilted law is a distribution")
    }

    pub fn p_s(&self) -> Distribution {
        Distribution::from_log_weights(self.log_p_s.clone()).expect("dataset law")
    }

    pub fn is_null_hypothesis(&self, h: usize) -> bool {
        self.log_prior[h] == f64::NEG_INFINITY
    }

    /// `I(S;h)` in nats.
    pub fn mutual_information(&self) -> f64 {
        self.mi
    }

    /// `E_{S,h}[gap]`.
    pub fn expected_gap(&self) -> f64 {
        self.expected_gap
    }

    /// `CS(S) = chi^2(p(h|S) || p(h))`.
    pub fn cs(&self, s: usize) -> f64 {
        self.cs[s]
    }

    pub fn cs_values(&self) -> &[f64] {
        &self.cs
    }

    /// `H(h) = Hel^2(q(S|h), p(S|h))`; NaN for null hypotheses.
    pub fn hellinger(&self, h: usize) -> f64 {
        2.0 * (1.0 - self.log_bc[h].exp())
    }

    /// `log(1 - H(h)/2)`, kept separately to avoid cancellation.
    pub fn log_one_minus_half_hellinger(&self, h: usize) -> f64 {
        self.log_bc[h]
    }

    /// `log C_n(t)` where `C_n(t) = E[(q(S|h)/p(S))^(t/n)] = E[exp(t gap)]`.
    pub fn log_mgf(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveT(t));
        }
        let value = self
            .support
            .iter()
            .map(|&(lw, gap)| lw + t * gap)
            .collect::<LogSumExp>()
            .value();
        if value == f64::INFINITY {
            return Err(Error::InfiniteMgf);
        }
        Ok(value)
    }

    pub fn mgf_cn(&self, t: f64) -> Result<f64> {
        self.log_mgf(t).map(f64::exp)
    }

    /// `(log p(S) p(h|S), gap)` over the positive-mass support.
    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    /// `log q~(S,h) = log q(S|h) + log p(h|S) - log C_n(n)`, row-major.
    pub fn tilde_q_joint(&self) -> Result<Vec<f64>> {
        let log_c = self.log_mgf(self.n() as f64)?;
        Ok(self
            .log_q
            .iter()
            .zip(&self.log_post)
            .map(|(lq, lp)| lq + lp - log_c)
            .collect())
    }

    /// Sibson's I_alpha of the channel `S -> h` with input law `p(S)`.
    pub fn sibson_mi(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
            return Err(Error::InvalidAlpha(alpha));
        }
        let outer: LogSumExp = (0..self.h_count)
            .map(|h| {
                let inner: LogSumExp = (0..self.dataset_count())
                    .map(|s| self.log_p_s[s] + alpha * self.log_posterior(s, h))
                    .collect();
                inner.value() / alpha
            })
            .collect();
        Ok((alpha / (alpha - 1.0) * outer.value()).max(0.0))
    }
}
