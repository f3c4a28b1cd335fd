//! Information measures on finite alphabets.
//!
//! All functions return extended reals: `+inf` is a legitimate value whenever
//! absolute continuity fails, and downstream bounds consume it as such.
//! Conventions: `0 log 0 = 0`, `0 log(0/0) = 0`, `p > 0` over `q = 0` is `+inf`.

use crate::error::{Error, Result};
use crate::prob::{Distribution, JointDistribution, LogSumExp};

/// A conditional law `p(y|x)`: one distribution over `Y` per input.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    rows: Vec<Distribution>,
}

impl Channel {
    pub fn new(rows: Vec<Distribution>) -> Result<Self> {
        let y_size = rows.first().ok_or(Error::EmptySupport)?.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != y_size) {
            return Err(Error::SupportMismatch {
                left: y_size,
                right: bad.len(),
            });
        }
        Ok(Self { rows })
    }

    /// Splits a joint into `p(x)` and `p(y|x)`.
    pub fn from_joint(joint: &JointDistribution) -> (Distribution, Channel) {
        let px = joint.marginal_x();
        let rows = (0..joint.x_size()).map(|x| joint.conditional_y_given_x(x)).collect();
        (px, Channel { rows })
    }

    pub fn x_size(&self) -> usize {
        self.rows.len()
    }

    pub fn y_size(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, x: usize) -> &Distribution {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[Distribution] {
        &self.rows
    }
}

fn check_support(p: &Distribution, q: &Distribution) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::SupportMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(())
}

/// `KL(p||q) = E_p[log p/q]`.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_support(p, q)?;
    let mut total = 0.0;
    for (&lp, &lq) in p.log_probs().iter().zip(q.log_probs()) {
        if lp == f64::NEG_INFINITY {
            continue;
        }
        if lq == f64::NEG_INFINITY {
            return Ok(f64::INFINITY);
        }
        total += lp.exp() * (lp - lq);
    }
    Ok(total.max(0.0))
}

/// `log E_q[(p/q)^alpha] = log sum p^alpha q^(1-alpha)`, the Renyi moment.
pub fn log_renyi_moment(p: &Distribution, q: &Distribution, alpha: f64) -> Result<f64> {
    check_support(p, q)?;
    if !(alpha > 0.0) {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    let mut acc = LogSumExp::new();
    for (&lp, &lq) in p.log_probs().iter().zip(q.log_probs()) {
        if lp == f64::NEG_INFINITY {
            continue;
        }
        if lq == f64::NEG_INFINITY {
            if alpha > 1.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        acc.push(alpha * lp + (1.0 - alpha) * lq);
    }
    Ok(acc.value())
}

/// Renyi divergence of order `alpha`; `alpha = 1` dispatches to KL.
pub fn renyi_divergence(p: &Distribution, q: &Distribution, alpha: f64) -> Result<f64> {
    check_support(p, q)?;
    if !(alpha > 0.0) {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    if alpha == 1.0 {
        return kl_divergence(p, q);
    }
    let moment = log_renyi_moment(p, q, alpha)?;
    let d = if moment == f64::NEG_INFINITY {
        // alpha < 1 with disjoint supports.
        f64::INFINITY
    } else {
        moment / (alpha - 1.0)
    };
    Ok(d.max(0.0))
}

/// `chi^2(p||q) = sum p^2/q - 1`.
pub fn chi_square(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_support(p, q)?;
    let mut acc = LogSumExp::new();
    for (&lp, &lq) in p.log_probs().iter().zip(q.log_probs()) {
        if lp == f64::NEG_INFINITY {
            continue;
        }
        if lq == f64::NEG_INFINITY {
            return Ok(f64::INFINITY);
        }
        acc.push(2.0 * lp - lq);
    }
    Ok(acc.value().exp_m1().max(0.0))
}

/// Bhattacharyya coefficient `sum sqrt(p q)`.
pub fn bhattacharyya(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_support(p, q)?;
    let acc: LogSumExp = p
        .log_probs()
        .iter()
        .zip(q.log_probs())
        .map(|(&lp, &lq)| 0.5 * (lp + lq))
        .collect();
    Ok(acc.value().exp().min(1.0))
}

/// Squared Hellinger distance `2 (1 - sum sqrt(p q))`, in `[0, 2]`.
pub fn hellinger_sq(p: &Distribution, q: &Distribution) -> Result<f64> {
    Ok(2.0 * (1.0 - bhattacharyya(p, q)?))
}

/// `sum |p - q|`: the L1 distance, twice the usual total variation.
pub fn total_variation(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_support(p, q)?;
    Ok(p.log_probs()
        .iter()
        .zip(q.log_probs())
        .map(|(lp, lq)| (lp.exp() - lq.exp()).abs())
        .sum())
}

/// Standard total variation `sup_A |P(A) - Q(A)| = sum |p - q| / 2`.
pub fn total_variation_standard(p: &Distribution, q: &Distribution) -> Result<f64> {
    Ok(0.5 * total_variation(p, q)?)
}

/// Shannon entropy in nats.
pub fn entropy(p: &Distribution) -> f64 {
    -p.log_probs()
        .iter()
        .filter(|lp| lp.is_finite())
        .map(|&lp| lp.exp() * lp)
        .sum::<f64>()
}

/// `I(x;y) = E_x[KL(p(y|x) || p(y))]`.
pub fn mutual_information(joint: &JointDistribution) -> f64 {
    let px = joint.marginal_x();
    let py = joint.marginal_y();
    let mut total = 0.0;
    for x in 0..joint.x_size() {
        for y in 0..joint.y_size() {
            let lxy = joint.log_prob(x, y);
            if lxy == f64::NEG_INFINITY {
                continue;
            }
            total += lxy.exp() * (lxy - px.log_prob(x) - py.log_prob(y));
        }
    }
    total.max(0.0)
}

/// `H(y|x) = E[-log p(y|x)]`.
pub fn conditional_entropy(joint: &JointDistribution) -> f64 {
    let px = joint.marginal_x();
    let mut total = 0.0;
    for x in 0..joint.x_size() {
        for y in 0..joint.y_size() {
            let lxy = joint.log_prob(x, y);
            if lxy == f64::NEG_INFINITY {
                continue;
            }
            total -= lxy.exp() * (lxy - px.log_prob(x));
        }
    }
    total.max(0.0)
}

fn check_sibson(px: &Distribution, channel: &Channel, alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::InvalidAlpha(alpha));
    }
    if px.len() != channel.x_size() {
        return Err(Error::SupportMismatch {
            left: px.len(),
            right: channel.x_size(),
        });
    }
    Ok(())
}

/// Sibson's alpha-mutual information via its closed-form minimizer:
/// `alpha/(alpha-1) log sum_y (sum_x p(x) p(y|x)^alpha)^(1/alpha)`.
pub fn sibson_mi(px: &Distribution, channel: &Channel, alpha: f64) -> Result<f64> {
    check_sibson(px, channel, alpha)?;
    let outer: LogSumExp = (0..channel.y_size())
        .map(|y| {
            let inner: LogSumExp = (0..channel.x_size())
                .map(|x| px.log_prob(x) + alpha * channel.row(x).log_prob(y))
                .collect();
            inner.value() / alpha
        })
        .collect();
    Ok((alpha / (alpha - 1.0) * outer.value()).max(0.0))
}

/// `D_alpha(P_X P_{Y|X} || P_X q)`, the objective whose minimum over `q`
/// is Sibson's alpha-mutual information.
pub fn sibson_objective(px: &Distribution, channel: &Channel, q: &Distribution, alpha: f64) -> Result<f64> {
    check_sibson(px, channel, alpha)?;
    if q.len() != channel.y_size() {
        return Err(Error::SupportMismatch {
            left: q.len(),
            right: channel.y_size(),
        });
    }
    let terms: LogSumExp = (0..channel.x_size())
        .filter(|&x| px.prob(x) > 0.0)
        .flat_map(|x| {
            let row = channel.row(x);
            (0..q.len()).filter_map(move |y| {
                let lp = row.log_prob(y);
                let lq = q.log_prob(y);
                if lp == f64::NEG_INFINITY {
                    return None;
                }
                if lq == f64::NEG_INFINITY {
                    // Contributes +inf for alpha > 1 and nothing for alpha < 1.
                    return (alpha > 1.0).then_some(f64::INFINITY);
                }
                Some(px.log_prob(x) + alpha * lp + (1.0 - alpha) * lq)
            })
        })
        .collect();
    let moment = terms.value();
    if moment == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if moment == f64::NEG_INFINITY {
        return Ok(f64::INFINITY);
    }
    Ok((moment / (alpha - 1.0)).max(0.0))
}

/// Sibson's alpha-mutual information by direct minimization of
/// [`sibson_objective`] over the simplex. Independent of the closed form in
/// [`sibson_mi`]; used to cross-check it.
pub fn sibson_mi_numeric(px: &Distribution, channel: &Channel, alpha: f64) -> Result<f64> {
    check_sibson(px, channel, alpha)?;
    let k = channel.y_size();
    let objective = |q: &[f64]| -> f64 {
        let dist = Distribution::from_weights(q).expect("simplex point");
        sibson_objective(px, channel, &dist, alpha).unwrap_or(f64::INFINITY)
    };
    let gradient = |q: &[f64]| -> Vec<f64> {
        // d/dq_y = -sum_x p(x) p(y|x)^alpha q_y^(-alpha) / Z
        let mut grad = vec![0.0; k];
        let mut z = 0.0;
        for x in 0..channel.x_size() {
            let w = px.prob(x);
            if w == 0.0 {
                continue;
            }
            let row = channel.row(x);
            for (y, g) in grad.iter_mut().enumerate() {
                let p = row.prob(y);
                if p > 0.0 {
                    let a = w * p.powf(alpha);
                    z += a * q[y].powf(1.0 - alpha);
                    *g -= a * q[y].powf(-alpha);
                }
            }
        }
        grad.iter_mut().for_each(|g| *g /= z);
        grad
    };
    Ok(minimize_on_simplex(k, objective, gradient))
}

/// `E_x[D_alpha(p(y|x) || q)]` for a candidate output law `q`.
pub fn expected_renyi(px: &Distribution, channel: &Channel, q: &Distribution, alpha: f64) -> Result<f64> {
    let mut total = 0.0;
    for x in 0..channel.x_size() {
        let w = px.prob(x);
        if w == 0.0 {
            continue;
        }
        total += w * renyi_divergence(channel.row(x), q, alpha)?;
    }
    Ok(total)
}

/// `min_q E_x[D_alpha(p(y|x) || q)]`, the alpha-information defined through
/// an expected divergence. Differs from Sibson's quantity for alpha != 1.
pub fn expected_renyi_information(px: &Distribution, channel: &Channel, alpha: f64) -> Result<f64> {
    check_sibson(px, channel, alpha)?;
    let k = channel.y_size();
    let objective = |q: &[f64]| -> f64 {
        let dist = Distribution::from_weights(q).expect("simplex point");
        expected_renyi(px, channel, &dist, alpha).unwrap_or(f64::INFINITY)
    };
    let gradient = |q: &[f64]| -> Vec<f64> {
        let mut grad = vec![0.0; k];
        for x in 0..channel.x_size() {
            let w = px.prob(x);
            if w == 0.0 {
                continue;
            }
            let row = channel.row(x);
            let z: f64 = (0..k)
                .filter(|&y| row.prob(y) > 0.0)
                .map(|y| row.prob(y).powf(alpha) * q[y].powf(1.0 - alpha))
                .sum();
            for (y, g) in grad.iter_mut().enumerate() {
                if row.prob(y) > 0.0 {
                    *g -= w * row.prob(y).powf(alpha) * q[y].powf(-alpha) / z;
                }
            }
        }
        grad
    };
    Ok(minimize_on_simplex(k, objective, gradient))
}

/// Exponentiated-gradient descent from the uniform point with Armijo
/// backtracking.
fn minimize_on_simplex<F, G>(k: usize, objective: F, gradient: G) -> f64
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let mut q = vec![1.0 / k as f64; k];
    let mut value = objective(&q);
    let mut step = 1.0;
    for _ in 0..20_000 {
        let grad = gradient(&q);
        let mean: f64 = q.iter().zip(&grad).map(|(qi, gi)| qi * gi).sum();
        let directional: f64 = q.iter().zip(&grad).map(|(qi, gi)| qi * (gi - mean).powi(2)).sum();
        if directional < 1e-30 {
            break;
        }
        let mut accepted = false;
        step *= 2.0;
        while step > 1e-20 {
            let mut cand: Vec<f64> = q.iter().zip(&grad).map(|(qi, gi)| qi * (-step * gi).exp()).collect();
            let total: f64 = cand.iter().sum();
            cand.iter_mut().for_each(|c| *c /= total);
            let cand_value = objective(&cand);
            if cand_value <= value - 1e-4 * step * directional {
                q = cand;
                let improvement = value - cand_value;
                value = cand_value;
                accepted = true;
                if improvement < 1e-16 {
                    return value.max(0.0);
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    value.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn d(w: &[f64]) -> Distribution {
        Distribution::from_weights(w).unwrap()
    }

    fn random_dist(rng: &mut ChaCha8Rng, k: usize, sparse: bool) -> Distribution {
        let w: Vec<f64> = (0..k)
            .map(|_| {
                if sparse && rng.random::<f64>() < 0.2 {
                    0.0
                } else {
                    rng.random::<f64>().powi(2) + 1e-3
                }
            })
            .collect();
        Distribution::from_weights(&w).unwrap_or_else(|_| Distribution::uniform(k).unwrap())
    }

    #[test]
    fn reference_values() {
        let p = d(&[0.5, 0.5]);
        let q = d(&[0.25, 0.75]);
        let kl = 0.5 * (0.5f64 / 0.25).ln() + 0.5 * (0.5f64 / 0.75).ln();
        assert!((renyi_divergence(&p, &q, 1.0).unwrap() - kl).abs() < 1e-15);
        assert!((kl - 0.143_841_036_225_890_3).abs() < 1e-12);
        // sum p^2/q = 1 + 1/3 = 4/3
        assert!((renyi_divergence(&p, &q, 2.0).unwrap() - (4.0f64 / 3.0).ln()).abs() < 1e-14);
        assert!((chi_square(&p, &q).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        let hel = 2.0 * (1.0 - (0.125f64.sqrt() + 0.375f64.sqrt()));
        assert!((hellinger_sq(&p, &q).unwrap() - hel).abs() < 1e-14);
        assert!((hel - 0.068_148_347_421_115_6).abs() < 1e-12);
        assert!((total_variation(&p, &q).unwrap() - 0.5).abs() < 1e-15);
        assert!((total_variation_standard(&p, &q).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn extreme_supports() {
        let p = d(&[1.0, 0.0]);
        let q = d(&[0.0, 1.0]);
        assert_eq!(total_variation(&p, &q).unwrap(), 2.0);
        assert_eq!(hellinger_sq(&p, &q).unwrap(), 2.0);
        assert_eq!(kl_divergence(&p, &q).unwrap(), f64::INFINITY);
        assert_eq!(chi_square(&p, &q).unwrap(), f64::INFINITY);
        assert_eq!(renyi_divergence(&p, &q, 2.0).unwrap(), f64::INFINITY);
        assert_eq!(renyi_divergence(&p, &q, 0.5).unwrap(), f64::INFINITY);
        // Absolute continuity holds in one direction only.
        let r = d(&[0.5, 0.5]);
        assert!(kl_divergence(&p, &r).unwrap().is_finite());
        assert_eq!(kl_divergence(&r, &p).unwrap(), f64::INFINITY);
        assert!(renyi_divergence(&r, &p, 0.5).unwrap().is_finite());
    }

    #[test]
    fn argument_errors() {
        let p = d(&[0.5, 0.5]);
        let q = d(&[0.2, 0.3, 0.5]);
        assert!(matches!(kl_divergence(&p, &q), Err(Error::SupportMismatch { .. })));
        assert!(matches!(hellinger_sq(&p, &q), Err(Error::SupportMismatch { .. })));
        assert_eq!(renyi_divergence(&p, &p, 0.0), Err(Error::NonPositiveAlpha(0.0)));
        assert_eq!(renyi_divergence(&p, &p, -1.0), Err(Error::NonPositiveAlpha(-1.0)));
        let (px, ch) = Channel::from_joint(&JointDistribution::from_weights(2, 2, &[1.0; 4]).unwrap());
        assert_eq!(sibson_mi(&px, &ch, 1.0), Err(Error::InvalidAlpha(1.0)));
    }

    #[test]
    fn mutual_information_reference() {
        let product = JointDistribution::from_weights(2, 3, &[0.06, 0.12, 0.12, 0.14, 0.28, 0.28]).unwrap();
        assert!(mutual_information(&product).abs() < 1e-15);
        let correlated = JointDistribution::from_weights(2, 2, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((mutual_information(&correlated) - 2f64.ln()).abs() < 1e-15);
        assert!(conditional_entropy(&correlated).abs() < 1e-15);
        let independent = JointDistribution::from_weights(2, 2, &[1.0; 4]).unwrap();
        assert!((conditional_entropy(&independent) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn sibson_reference_values() {
        let independent = JointDistribution::from_weights(3, 2, &[0.1, 0.3, 0.05, 0.15, 0.1, 0.3]).unwrap();
        let (px, ch) = Channel::from_joint(&independent);
        for alpha in [0.5, 2.0, 4.0] {
            assert!(sibson_mi(&px, &ch, alpha).unwrap().abs() < 1e-14);
        }
        let correlated = JointDistribution::from_weights(2, 2, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        let (px, ch) = Channel::from_joint(&correlated);
        assert!((sibson_mi(&px, &ch, 2.0).unwrap() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn expected_divergence_information_grid_oracle() {
        let noisy = JointDistribution::from_weights(2, 2, &[0.3, 0.1, 0.15, 0.45]).unwrap();
        let (px, ch) = Channel::from_joint(&noisy);
        for alpha in [0.5, 2.0, 4.0] {
            let mut best = f64::INFINITY;
            for i in 1..10_000 {
                let t = i as f64 / 10_000.0;
                best = best.min(expected_renyi(&px, &ch, &d(&[t, 1.0 - t]), alpha).unwrap());
            }
            let numeric = expected_renyi_information(&px, &ch, alpha).unwrap();
            assert!(numeric <= best + 1e-12);
            assert!(best - numeric < 1e-7, "alpha {alpha}: grid {best} numeric {numeric}");
            // Not the same functional as Sibson's.
            assert!((numeric - sibson_mi(&px, &ch, alpha).unwrap()).abs() > 1e-6);
        }
    }

    #[test]
    fn sibson_binary_grid_oracle() {
        // Grid search over the binary simplex at resolution 1e-3.
        let correlated = JointDistribution::from_weights(2, 2, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        let (px, ch) = Channel::from_joint(&correlated);
        let mut best = f64::INFINITY;
        for i in 1..1000 {
            let t = i as f64 / 1000.0;
            let q = d(&[t, 1.0 - t]);
            best = best.min(sibson_objective(&px, &ch, &q, 2.0).unwrap());
        }
        assert!((best - 2f64.ln()).abs() < 1e-9);
        let noisy = JointDistribution::from_weights(2, 2, &[0.3, 0.1, 0.15, 0.45]).unwrap();
        let (px, ch) = Channel::from_joint(&noisy);
        for alpha in [0.5, 2.0, 4.0] {
            let mut best = f64::INFINITY;
            for i in 1..1000 {
                let t = i as f64 / 1000.0;
                best = best.min(sibson_objective(&px, &ch, &d(&[t, 1.0 - t]), alpha).unwrap());
            }
            let closed = sibson_mi(&px, &ch, alpha).unwrap();
            assert!(closed <= best + 1e-12);
            assert!(best - closed < 1e-5, "alpha {alpha}: grid {best} closed {closed}");
        }
    }

    #[test]
    fn identities_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let k = rng.random_range(2..8);
            let p = random_dist(&mut rng, k, false);
            let q = random_dist(&mut rng, k, false);
            let chi = chi_square(&p, &q).unwrap();
            let d2 = renyi_divergence(&p, &q, 2.0).unwrap();
            assert!((d2.exp_m1() - chi).abs() < 1e-10);
            let hel = hellinger_sq(&p, &q).unwrap();
            let dh = renyi_divergence(&p, &q, 0.5).unwrap();
            assert!((2.0 * (1.0 - (-0.5 * dh).exp()) - hel).abs() < 1e-10);
        }
    }

    #[test]
    fn monotone_in_order_and_continuous_at_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let orders = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
        for _ in 0..200 {
            let k = rng.random_range(2..7);
            let p = random_dist(&mut rng, k, true);
            let q = random_dist(&mut rng, k, false);
            let values: Vec<f64> = orders.iter().map(|&a| renyi_divergence(&p, &q, a).unwrap()).collect();
            for w in values.windows(2) {
                assert!(w[0] <= w[1] + 1e-12, "{values:?}");
            }
            let kl = kl_divergence(&p, &q).unwrap();
            for a in [1.0 - 1e-4, 1.0 + 1e-4] {
                assert!((renyi_divergence(&p, &q, a).unwrap() - kl).abs() <= 1e-3);
            }
        }
    }

    #[test]
    fn pinsker_type_inequality() {
        // Holds with standard TV and also with the L1 distance.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let k = rng.random_range(2..7);
            let p = random_dist(&mut rng, k, true);
            let q = random_dist(&mut rng, k, true);
            let tv = total_variation_standard(&p, &q).unwrap();
            let l1 = total_variation(&p, &q).unwrap();
            for alpha in [0.25, 0.5, 1.0] {
                let da = renyi_divergence(&p, &q, alpha).unwrap();
                assert!(alpha / 2.0 * tv * tv <= da + 1e-12);
                assert!(alpha / 2.0 * l1 * l1 <= da + 1e-12);
            }
        }
    }

    #[test]
    fn chain_rule_symmetry_and_data_processing() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let xs = rng.random_range(1..5);
            let ys = rng.random_range(2..5);
            let w: Vec<f64> = (0..xs * ys).map(|_| rng.random::<f64>()).collect();
            let joint = JointDistribution::from_weights(xs, ys, &w).unwrap();
            let hxy = entropy(joint.flatten());
            let hx = entropy(&joint.marginal_x());
            assert!((conditional_entropy(&joint) - (hxy - hx)).abs() < 1e-10);
            assert!((mutual_information(&joint) - mutual_information(&joint.transpose())).abs() < 1e-10);

            // I(x;y) >= I(x; f(y)) for a random deterministic f.
            let zs = rng.random_range(1..=ys);
            let f: Vec<usize> = (0..ys).map(|_| rng.random_range(0..zs)).collect();
            let mut wz = vec![0.0; xs * zs];
            for x in 0..xs {
                for y in 0..ys {
                    wz[x * zs + f[y]] += joint.prob(x, y);
                }
            }
            let processed = JointDistribution::from_weights(xs, zs, &wz).unwrap();
            assert!(mutual_information(&processed) <= mutual_information(&joint) + 1e-12);
        }
    }

    #[test]
    fn sibson_closed_form_matches_numeric_infimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for trial in 0..50 {
            let xs = rng.random_range(1..5);
            let ys = rng.random_range(2..5);
            let w: Vec<f64> = (0..xs * ys).map(|_| rng.random::<f64>().powi(3)).collect();
            let joint = JointDistribution::from_weights(xs, ys, &w).unwrap();
            let (px, ch) = Channel::from_joint(&joint);
            let alpha = [0.5, 2.0, 4.0][trial % 3];
            let closed = sibson_mi(&px, &ch, alpha).unwrap();
            let numeric = sibson_mi_numeric(&px, &ch, alpha).unwrap();
            assert!((closed - numeric).abs() < 1e-6, "{closed} vs {numeric}");
        }
    }

    proptest! {
        #[test]
        fn divergences_vanish_on_identical_inputs(
            w in prop::collection::vec(0.0f64..10.0, 1..8),
            alpha in 0.05f64..10.0,
        ) {
            prop_assume!(w.iter().any(|&x| x > 0.0));
            let p = d(&w);
            prop_assert!(renyi_divergence(&p, &p, alpha).unwrap().abs() < 1e-12);
            prop_assert!(kl_divergence(&p, &p).unwrap().abs() < 1e-12);
            prop_assert!(chi_square(&p, &p).unwrap().abs() < 1e-12);
            prop_assert!(hellinger_sq(&p, &p).unwrap().abs() < 1e-12);
            prop_assert!(total_variation(&p, &p).unwrap().abs() < 1e-15);
        }

        #[test]
        fn divergences_are_nonnegative(
            pw in prop::collection::vec(0.0f64..10.0, 4),
            qw in prop::collection::vec(0.0f64..10.0, 4),
            alpha in 0.05f64..10.0,
        ) {
            prop_assume!(pw.iter().any(|&x| x > 0.0) && qw.iter().any(|&x| x > 0.0));
            let (p, q) = (d(&pw), d(&qw));
            prop_assert!(renyi_divergence(&p, &q, alpha).unwrap() >= 0.0);
            prop_assert!(chi_square(&p, &q).unwrap() >= 0.0);
            let h = hellinger_sq(&p, &q).unwrap();
            prop_assert!((0.0..=2.0).contains(&h));
        }
    }
}
