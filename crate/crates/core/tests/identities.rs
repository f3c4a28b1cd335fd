#![allow(clippy::needless_range_loop)]

mod common;

use common::{instances, rng, CAP};
use pacman_core::classifier::SoftClassifier;
use pacman_core::classifier::{pacman_gap, tilted_distribution};
use pacman_core::info::{
    chi_square, expected_renyi_information, hellinger_sq, kl_divergence, mutual_information, renyi_divergence,
    sibson_mi, Channel,
};
use pacman_core::learner::{analyze, HypothesisSet, Learner};
use pacman_core::prob::{Distribution, JointDistribution, World};

#[test]
fn gap_equals_log_likelihood_ratio() {
    for inst in instances(101, 6) {
        let a = &inst.analysis;
        let joint = &inst.world.joint;
        let n = a.n() as f64;
        for s in 0..a.dataset_count() {
            let ds = a.space().dataset(s);
            let lps = ds.log_prob(joint);
            for h in 0..a.hypothesis_count() {
                let hyp = inst.learner.hypotheses().get(h);
                let rec = pacman_gap(joint, &ds, hyp, h).unwrap();
                assert!((rec.gap - a.gap(s, h)).abs() < 1e-12, "{}", inst.label);
                if lps == f64::NEG_INFINITY {
                    continue;
                }
                // Product of tilted pair probabilities, built from scratch.
                let q = tilted_distribution(joint, hyp).unwrap();
                let lq: f64 = ds.pairs().iter().map(|&(x, y)| q.log_prob(x, y)).sum();
                assert!((rec.gap - (lq - lps) / n).abs() < 1e-10, "{}", inst.label);
                assert!((a.log_ratio(s, h) - rec.gap).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn ratio_splits_into_tilted_and_posterior_terms() {
    for inst in instances(102, 6) {
        let a = &inst.analysis;
        let n = a.n() as f64;
        for h in 0..a.hypothesis_count() {
            // p(S|h) by normalizing the column p(S) p(h|S) directly.
            let col: Vec<f64> = (0..a.dataset_count())
                .map(|s| a.log_p_s(s) + a.log_posterior(s, h))
                .collect();
            let Ok(p_s_h) = Distribution::from_log_weights(col) else {
                continue;
            };
            for s in 0..a.dataset_count() {
                if a.log_joint(s, h) == f64::NEG_INFINITY {
                    continue;
                }
                let lhs = (a.log_q(s, h) - a.log_p_s(s)) / n;
                let x1 = (a.log_q(s, h) - p_s_h.log_prob(s)) / n;
                let x2 = (a.log_posterior(s, h) - a.log_prior(h)) / n;
                assert!((lhs - (x1 + x2)).abs() < 1e-9, "{}", inst.label);
            }
        }
    }
}

#[test]
fn analysis_invariants() {
    for inst in instances(103, 6) {
        let a = &inst.analysis;
        let joint = &inst.world.joint;
        let hc = a.hypothesis_count();
        let mut prior = vec![0.0; hc];
        for s in 0..a.dataset_count() {
            let ds = a.space().dataset(s);
            let ps = ds.log_prob(joint).exp();
            assert!((a.log_p_s(s).exp() - ps).abs() < 1e-14);
            let post = inst.learner.posterior(&ds).unwrap();
            for h in 0..hc {
                assert!((a.log_posterior(s, h).exp() - post.prob(h)).abs() < 1e-12);
                prior[h] += ps * post.prob(h);
            }
        }
        for h in 0..hc {
            assert!((a.induced_prior().prob(h) - prior[h]).abs() < 1e-10, "{}", inst.label);
            if prior[h] == 0.0 {
                continue;
            }
            // Bayes consistency and E_{S~p(S)}[q(S|h)/p(S)] = 1.
            let mut ratio_mean = 0.0;
            for s in 0..a.dataset_count() {
                let ps = a.log_p_s(s).exp();
                let lhs = a.log_p_s_given_h(s, h).exp() * prior[h];
                assert!((lhs - a.log_posterior(s, h).exp() * ps).abs() < 1e-10);
                if ps > 0.0 {
                    ratio_mean += a.log_q(s, h).exp();
                }
            }
            assert!((ratio_mean - 1.0).abs() < 1e-9, "{}", inst.label);
        }
    }
}

#[test]
fn mutual_information_matches_explicit_joint() {
    for inst in instances(104, 5) {
        let a = &inst.analysis;
        let hc = a.hypothesis_count();
        let w: Vec<f64> = (0..a.dataset_count())
            .flat_map(|s| (0..hc).map(move |h| (s, h)))
            .map(|(s, h)| a.log_joint(s, h).exp())
            .collect();
        let joint = JointDistribution::from_weights(a.dataset_count(), hc, &w).unwrap();
        assert!(
            (mutual_information(&joint) - a.mutual_information()).abs() < 1e-10,
            "{}",
            inst.label
        );
    }
}

#[test]
fn data_independent_and_singleton_learners() {
    let mut r = rng(105);
    let joint = common::random_joint(&mut r, 2, 3, false);
    let world = World::new(joint, 3).unwrap();
    let hyps = common::random_hypotheses(&mut r, 4, 2, 3, false);
    let a = analyze(&world, &Learner::data_independent(hyps.clone()).unwrap(), CAP).unwrap();
    assert!(a.mutual_information().abs() < 1e-12);
    assert!(a.cs_values().iter().all(|c| c.abs() < 1e-12));
    assert!(a.log_mgf(3.0).unwrap().abs() < 1e-12);

    let single = HypothesisSet::new(vec![hyps.get(2).clone()]).unwrap();
    let a = analyze(&world, &Learner::gibbs(single, 3.0).unwrap(), CAP).unwrap();
    assert!(a.mutual_information().abs() < 1e-12);
    assert!(a.posterior(5).prob(0) == 1.0);
    let expected = hellinger_sq(&a.q_s_given_h(0), &a.p_s()).unwrap();
    assert!((a.hellinger(0) - expected).abs() < 1e-12);
}

#[test]
fn expected_gap_below_information_rate() {
    for inst in instances(106, 8) {
        let a = &inst.analysis;
        let n = a.n() as f64;
        assert!(
            a.mutual_information() / n - a.expected_gap() >= -1e-10,
            "{}",
            inst.label
        );
        let p_s = a.p_s();
        for h in 0..a.hypothesis_count() {
            let Some(p_s_h) = a.p_s_given_h(h) else { continue };
            let q = a.q_s_given_h(h);
            let mean_gap: f64 = (0..a.dataset_count()).map(|s| p_s_h.prob(s) * a.gap(s, h)).sum();
            let rhs = (kl_divergence(&p_s_h, &p_s).unwrap() - kl_divergence(&p_s_h, &q).unwrap()) / n;
            assert!((mean_gap - rhs).abs() < 1e-9, "{}: {mean_gap} vs {rhs}", inst.label);
        }
    }
}

#[test]
fn divergence_identities_on_analysis_objects() {
    for inst in instances(107, 6) {
        let a = &inst.analysis;
        let prior = a.induced_prior();
        for s in 0..a.dataset_count() {
            let post = a.posterior(s);
            let chi = chi_square(&post, prior).unwrap();
            if chi.is_finite() {
                assert!((a.cs(s) - chi).abs() < 1e-10 * (1.0 + chi));
                let d2 = renyi_divergence(&post, prior, 2.0).unwrap();
                assert!((a.cs(s) - (d2.exp() - 1.0)).abs() < 1e-10 * (1.0 + chi));
            }
        }
        for h in 0..a.hypothesis_count() {
            let Some(p) = a.p_s_given_h(h) else {
                assert!(a.hellinger(h).is_nan());
                continue;
            };
            let q = a.q_s_given_h(h);
            let hel = hellinger_sq(&q, &p).unwrap();
            assert!((a.hellinger(h) - hel).abs() < 1e-10);
            let d_half = renyi_divergence(&q, &p, 0.5).unwrap();
            assert!((a.hellinger(h) - 2.0 * (1.0 - (-0.5 * d_half).exp())).abs() < 1e-10);
        }
    }
}

#[test]
fn order_two_information_is_relaxed_by_cs() {
    for inst in instances(108, 6) {
        let a = &inst.analysis;
        let rows: Vec<Distribution> = (0..a.dataset_count()).map(|s| a.posterior(s)).collect();
        let channel = Channel::new(rows).unwrap();
        let p_s = a.p_s();
        let expected_log: f64 = (0..a.dataset_count())
            .filter(|&s| p_s.prob(s) > 0.0)
            .map(|s| p_s.prob(s) * a.cs(s).ln_1p())
            .sum();
        let log_expected = (0..a.dataset_count())
            .filter(|&s| p_s.prob(s) > 0.0)
            .map(|s| p_s.prob(s) * (1.0 + a.cs(s)))
            .sum::<f64>()
            .ln();
        // min over p~ of E_S[D_2(p(h|S) || p~)] is at most its value at p(h).
        let i2 = expected_renyi_information(&p_s, &channel, 2.0).unwrap();
        assert!(i2 <= expected_log + 1e-9, "{}: {i2} > {expected_log}", inst.label);
        // Sibson's closed form relaxes to log E_S[1 + CS(S)] instead.
        let sibson = sibson_mi(&p_s, &channel, 2.0).unwrap();
        assert!((sibson - a.sibson_mi(2.0).unwrap()).abs() < 1e-10);
        assert!(
            sibson <= log_expected + 1e-9,
            "{}: {sibson} > {log_expected}",
            inst.label
        );
    }
}

#[test]
fn mgf_properties() {
    for inst in instances(109, 6) {
        let a = &inst.analysis;
        let n = a.n() as f64;
        // C_n(n) = E[q(S|h)/p(S)] by brute force over the support.
        let mut brute = 0.0;
        for s in 0..a.dataset_count() {
            for h in 0..a.hypothesis_count() {
                if a.log_joint(s, h) > f64::NEG_INFINITY {
                    brute += a.log_posterior(s, h).exp() * a.log_q(s, h).exp();
                }
            }
        }
        let cn = a.mgf_cn(n).unwrap();
        assert!((cn - brute).abs() < 1e-10 * brute.max(1.0), "{}", inst.label);
        assert!(cn <= a.hypothesis_count() as f64 * (1.0 + 1e-12));
        let ts = [n / 4.0, n / 2.0, n, 2.0 * n];
        let l: Vec<f64> = ts.iter().map(|&t| a.log_mgf(t).unwrap()).collect();
        // Convexity on the grid, written for unequal spacing.
        for i in 1..3 {
            let (t0, t1, t2) = (ts[i - 1], ts[i], ts[i + 1]);
            let interp = l[i - 1] + (l[i + 1] - l[i - 1]) * (t1 - t0) / (t2 - t0);
            assert!(l[i] <= interp + 1e-10, "{}", inst.label);
        }
        if matches!(inst.learner.kind(), pacman_core::learner::LearnerKind::GibbsErm { gamma } if gamma == 0.0) {
            assert!((cn - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn tilted_joint_normalizes_and_matches_brute_force() {
    for inst in instances(110, 5) {
        let a = &inst.analysis;
        let tq = a.tilde_q_joint().unwrap();
        let total: f64 = tq.iter().map(|l| l.exp()).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let cn = a.mgf_cn(a.n() as f64).unwrap();
        let hc = a.hypothesis_count();
        for s in 0..a.dataset_count() {
            let ds = a.space().dataset(s);
            let post = inst.learner.posterior(&ds).unwrap();
            for h in 0..hc {
                let q = tilted_distribution(&inst.world.joint, inst.learner.hypotheses().get(h)).unwrap();
                let qs: f64 = ds.pairs().iter().map(|&(x, y)| q.prob(x, y)).product();
                let expected = qs * post.prob(h) / cn;
                assert!((tq[s * hc + h].exp() - expected).abs() < 1e-12);
            }
        }
    }
    // Uniform classifier: q~ coincides with p(S) p(h|S).
    let mut r = rng(111);
    let world = World::new(common::random_joint(&mut r, 2, 2, false), 3).unwrap();
    let hyps = HypothesisSet::new(vec![SoftClassifier::uniform(2, 2).unwrap()]).unwrap();
    let a = analyze(&world, &Learner::gibbs(hyps, 1.0).unwrap(), CAP).unwrap();
    let tq = a.tilde_q_joint().unwrap();
    for s in 0..a.dataset_count() {
        assert!((tq[s].exp() - a.log_joint(s, 0).exp()).abs() < 1e-14);
    }
}

#[test]
fn parallel_analysis_is_deterministic() {
    let inst = &instances(112, 1)[1];
    let again = analyze(&inst.world, &inst.learner, CAP).unwrap();
    let a = &inst.analysis;
    for s in 0..a.dataset_count() {
        for h in 0..a.hypothesis_count() {
            assert_eq!(a.gap(s, h).to_bits(), again.gap(s, h).to_bits());
            assert_eq!(a.log_posterior(s, h).to_bits(), again.log_posterior(s, h).to_bits());
        }
    }
    assert_eq!(a.mutual_information().to_bits(), again.mutual_information().to_bits());
}
