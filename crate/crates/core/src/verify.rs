//! Falsification experiments: exact violation probabilities by enumeration,
//! seeded Monte Carlo, the likelihood-ratio test and the individual steps
//! of the union-bound argument.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::bounds::PacBound;
use crate::error::{Error, Result};
use crate::info::{kl_divergence, renyi_divergence};
use crate::learner::{Learner, LearnerAnalysis};
use crate::prob::{sample_dataset_with, Dataset, Distribution, LogSumExp, World};

/// Exact statistics of a bound over the positive-mass `(S, h)` support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViolationStats {
    /// `P(gap > eps)`.
    pub probability: f64,
    /// `min (eps - gap)`.
    pub worst_margin: f64,
    /// Mass-weighted mean of `eps`.
    pub eps_mean: f64,
    pub eps_max: f64,
}

#[derive(Clone, Copy)]
struct Partial {
    violation: LogSumExp,
    worst: f64,
    mean: f64,
    mass: f64,
    max: f64,
}

/// `sum_{S,h} p(S) p(h|S) 1{gap(S,h) > eps(S,h)}` by enumeration.
pub fn exact_violation(a: &LearnerAnalysis, bound: &dyn PacBound) -> ViolationStats {
    exact_violation_with(a, |s, h| bound.epsilon(s, h))
}

pub fn exact_violation_with<F>(a: &LearnerAnalysis, epsilon: F) -> ViolationStats
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let rows: Vec<Partial> = (0..a.dataset_count())
        .into_par_iter()
        .map(|s| {
            let mut p = Partial {
                violation: LogSumExp::new(),
                worst: f64::INFINITY,
                mean: 0.0,
                mass: 0.0,
                max: f64::NEG_INFINITY,
            };
            for h in 0..a.hypothesis_count() {
                let lw = a.log_joint(s, h);
                if lw == f64::NEG_INFINITY {
                    continue;
                }
                let eps = epsilon(s, h);
                let gap = a.gap(s, h);
                if gap > eps {
                    p.violation.push(lw);
                }
                p.worst = p.worst.min(eps - gap);
                p.mean += lw.exp() * eps;
                p.mass += lw.exp();
                p.max = p.max.max(eps);
            }
            p
        })
        .collect();
    let mut violation = LogSumExp::new();
    let mut stats = ViolationStats {
        probability: 0.0,
        worst_margin: f64::INFINITY,
        eps_mean: 0.0,
        eps_max: f64::NEG_INFINITY,
    };
    let mut mass = 0.0;
    for p in rows {
        violation.push(p.violation.value());
        stats.worst_margin = stats.worst_margin.min(p.worst);
        stats.eps_mean += p.mean;
        mass += p.mass;
        stats.eps_max = stats.eps_max.max(p.max);
    }
    // Renormalizing and capping keeps rounding from pushing a constant
    // bound's mean past its max.
    stats.eps_mean = (stats.eps_mean / mass).min(stats.eps_max);
    stats.probability = violation.value().exp().min(1.0);
    stats
}

/// Monte Carlo violation count with a Clopper-Pearson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McReport {
    pub trials: u64,
    pub violations: u64,
    pub seed: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub const MC_CONFIDENCE: f64 = 0.99;

/// Two-sided exact binomial interval at `level`.
pub fn clopper_pearson(k: u64, n: u64, level: f64) -> (f64, f64) {
    let tail = (1.0 - level) / 2.0;
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 {
        0.0
    } else {
        Beta::new(kf, nf - kf + 1.0).expect("valid shape").inverse_cdf(tail)
    };
    let hi = if k == n {
        1.0
    } else {
        Beta::new(kf + 1.0, nf - kf)
            .expect("valid shape")
            .inverse_cdf(1.0 - tail)
    };
    (lo, hi)
}

/// Draws `trials` independent `(S, h)` pairs and counts `gap > eps`.
///
/// Trial `i` uses `ChaCha8Rng::seed_from_u64(seed)` on stream `i`, so the
/// result does not depend on thread scheduling. The gap is computed from
/// the classifiers directly, not from any enumeration table.
pub fn mc_violation_with<F>(world: &World, learner: &Learner, trials: u64, seed: u64, epsilon: F) -> Result<McReport>
where
    F: Fn(&Dataset, usize) -> f64 + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let hyps = learner.hypotheses();
    let tilde: Vec<f64> = hyps
        .iter()
        .map(|h| crate::classifier::tilde_ce(&world.joint, h))
        .collect::<Result<_>>()?;
    let violations: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let s = sample_dataset_with(&world.joint, world.n, &mut rng);
            let ce: Vec<f64> = hyps
                .iter()
                .map(|h| crate::classifier::empirical_ce(&s, h).expect("sampled pairs are in range"))
                .collect();
            let h = learner.posterior_from_ce(world.n, &ce).sample_with(rng.random());
            let gap = tilde[h] - ce[h];
            u64::from(gap > epsilon(&s, h))
        })
        .sum();
    let (ci_low, ci_high) = clopper_pearson(violations, trials, MC_CONFIDENCE);
    Ok(McReport {
        trials,
        violations,
        seed,
        rate: violations as f64 / trials as f64,
        ci_low,
        ci_high,
    })
}

/// Monte Carlo counterpart of [`exact_violation`], looking each sampled
/// dataset up in the analysis to evaluate the bound.
pub fn mc_violation(a: &LearnerAnalysis, bound: &dyn PacBound, trials: u64, seed: u64) -> Result<McReport> {
    let space = a.space();
    mc_violation_with(a.world(), a.learner(), trials, seed, |s, h| {
        let index = space.index_of(s).expect("sampled dataset is in the space");
        bound.epsilon(index, h)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub bound: String,
    pub delta: f64,
    pub certified: bool,
    pub exact: Option<ViolationStats>,
    pub mc: Option<McReport>,
    /// From the exact probability when available, else from the MC upper limit.
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(bound: &str, delta: f64, certified: bool, exact: Option<ViolationStats>, mc: Option<McReport>) -> Self {
        let pass = match (&exact, &mc) {
            (Some(e), _) => e.probability <= delta,
            (None, Some(m)) => m.ci_high <= delta,
            (None, None) => false,
        };
        Self {
            bound: bound.to_string(),
            delta,
            certified,
            exact,
            mc,
            pass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpTest {
    pub log_cn: f64,
    /// Reject when `gap - log C_n(n) / n` exceeds this.
    pub threshold: f64,
    /// `P(reject)` under `p(S) p(h|S)`.
    pub type_one: f64,
    /// `P(reject)` under the tilted joint `q~(S, h)`.
    pub power: f64,
}

/// Likelihood-ratio test of `p(S) p(h|S)` against `q~(S, h)` at `t = n`.
pub fn np_test(a: &LearnerAnalysis, delta: f64) -> Result<NpTest> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            reason: "must lie in (0, 1]",
        });
    }
    let n = a.n() as f64;
    let log_cn = a.log_mgf(n)?;
    let threshold = -delta.ln() / n;
    let tilde_q = a.tilde_q_joint()?;
    let h_count = a.hypothesis_count();
    let mut alpha = LogSumExp::new();
    let mut power = LogSumExp::new();
    for s in 0..a.dataset_count() {
        for h in 0..h_count {
            if a.gap(s, h) - log_cn / n > threshold {
                alpha.push(a.log_joint(s, h));
                power.push(tilde_q[s * h_count + h]);
            }
        }
    }
    Ok(NpTest {
        log_cn,
        threshold,
        type_one: alpha.value().exp(),
        power: power.value().exp().min(1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Check {
    /// `P_p(E)`
    pub lhs: f64,
    /// `(KL(p||q) + 1) / (-log P_q(E))`
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `P_p(E) <= (KL(p||q) + 1) / (-log P_q(E))`.
pub fn lemma2_check(p: &Distribution, q: &Distribution, event: &[bool]) -> Result<Lemma2Check> {
    if p.len() != q.len() || event.len() != p.len() {
        return Err(Error::SupportMismatch {
            left: p.len(),
            right: if q.len() != p.len() { q.len() } else { event.len() },
        });
    }
    let mass = |d: &Distribution| -> f64 {
        let acc: LogSumExp = event
            .iter()
            .enumerate()
            .filter(|(_, &e)| e)
            .map(|(i, _)| d.log_prob(i))
            .collect();
        acc.value()
    };
    let log_q_e = mass(q);
    if log_q_e == f64::NEG_INFINITY {
        return Err(Error::NullEvent);
    }
    let lhs = mass(p).exp().min(1.0);
    let kl = kl_divergence(p, q)?;
    let denom = -log_q_e;
    let rhs = if denom <= 0.0 {
        f64::INFINITY
    } else {
        (kl + 1.0) / denom
    };
    Ok(Lemma2Check {
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

/// Tail probabilities of the two terms of the gap decomposition against
/// their separate Chernoff thresholds, each at level `delta / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainCheck {
    /// `P((1/n) log(q(S|h)/p(S|h)) > eps_1(h))`
    pub tilted_tail: f64,
    /// `P((1/n) log(p(h|S)/p(h)) > eps_2(S))`
    pub posterior_tail: f64,
    /// `P(gap > eps_1 + eps_2)`
    pub joint_tail: f64,
    pub level: f64,
}

impl ChainCheck {
    pub fn holds(&self) -> bool {
        self.tilted_tail <= self.level && self.posterior_tail <= self.level && self.joint_tail <= 2.0 * self.level
    }
}

#[allow(clippy::needless_range_loop)]
pub fn chernoff_chain(a: &LearnerAnalysis, alpha: f64, beta: f64, delta: f64) -> Result<ChainCheck> {
    let n = a.n() as f64;
    let log2d = (2.0 / delta).ln();
    let eps1: Vec<f64> = (0..a.hypothesis_count())
        .map(|h| match a.p_s_given_h(h) {
            Some(p) => {
                renyi_divergence(&a.q_s_given_h(h), &p, alpha).map(|d| (log2d + (alpha - 1.0) * d) / (alpha * n))
            }
            None => Ok(f64::NAN),
        })
        .collect::<Result<_>>()?;
    let prior = a.induced_prior();
    let eps2: Vec<f64> = (0..a.dataset_count())
        .map(|s| {
            renyi_divergence(&a.posterior(s), prior, beta).map(|d| (log2d + (beta - 1.0) * d) / ((beta - 1.0) * n))
        })
        .collect::<Result<_>>()?;
    let mut t1 = LogSumExp::new();
    let mut t2 = LogSumExp::new();
    let mut t12 = LogSumExp::new();
    for s in 0..a.dataset_count() {
        for h in 0..a.hypothesis_count() {
            let lw = a.log_joint(s, h);
            if lw == f64::NEG_INFINITY {
                continue;
            }
            let x1 = (a.log_q(s, h) - a.log_p_s_given_h(s, h)) / n;
            let x2 = (a.log_posterior(s, h) - a.log_prior(h)) / n;
            if x1 > eps1[h] {
                t1.push(lw);
            }
            if x2 > eps2[s] {
                t2.push(lw);
            }
            if a.gap(s, h) > eps1[h] + eps2[s] {
                t12.push(lw);
            }
        }
    }
    Ok(ChainCheck {
        tilted_tail: t1.value().exp(),
        posterior_tail: t2.value().exp(),
        joint_tail: t12.value().exp(),
        level: delta / 2.0,
    })
}

/// For each hypothesis, `P_{S ~ p(S)}(gap > eps)` next to `exp(-n eps)`.
pub fn fixed_hypothesis_tail(a: &LearnerAnalysis, epsilon: f64) -> Vec<(f64, f64)> {
    let n = a.n() as f64;
    (0..a.hypothesis_count())
        .map(|h| {
            let acc: LogSumExp = (0..a.dataset_count())
                .filter(|&s| a.gap(s, h) > epsilon)
                .map(|s| a.log_p_s(s))
                .collect();
            (acc.value().exp(), (-n * epsilon).exp())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clopper_pearson_reference() {
        // Known values: k=0 upper limit is 1 - (tail)^(1/n).
        let (lo, hi) = clopper_pearson(0, 100, 0.99);
        assert_eq!(lo, 0.0);
        assert!((hi - (1.0 - 0.005f64.powf(0.01))).abs() < 1e-9);
        let (lo, hi) = clopper_pearson(100, 100, 0.99);
        assert!((lo - 0.005f64.powf(0.01)).abs() < 1e-9);
        assert_eq!(hi, 1.0);
        let (lo, hi) = clopper_pearson(50, 100, 0.99);
        assert!(lo < 0.5 && hi > 0.5);
        assert!(((0.5 - lo) - (hi - 0.5)).abs() < 1e-9);
    }

    #[test]
    fn lemma2_basic_cases() {
        let p = Distribution::from_weights(&[1.0, 1.0, 1.0]).unwrap();
        let e = [true, false, false];
        let r = lemma2_check(&p, &p, &e).unwrap();
        assert!((r.lhs - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.rhs - 1.0 / 3f64.ln()).abs() < 1e-15);
        assert!(r.holds);

        let q = Distribution::from_weights(&[0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(lemma2_check(&p, &q, &e), Err(Error::NullEvent)));
        let all = [true, true, true];
        let r = lemma2_check(&p, &p, &all).unwrap();
        assert_eq!(r.rhs, f64::INFINITY);
        assert!(r.holds);
    }

    #[test]
    fn lemma2_at_inverse_e() {
        let e1 = (-1.0f64).exp();
        let p = Distribution::from_weights(&[e1, 1.0 - e1]).unwrap();
        let r = lemma2_check(&p, &p, &[true, false]).unwrap();
        assert!((r.lhs - e1).abs() < 1e-15);
        assert!((r.rhs - 1.0).abs() < 1e-12);
    }
}
