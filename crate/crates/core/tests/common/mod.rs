#![allow(dead_code)]

use pacman_core::classifier::SoftClassifier;
use pacman_core::learner::{analyze, HypothesisSet, Learner, LearnerAnalysis, LearnerKind};
use pacman_core::prob::{JointDistribution, World};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CAP: u64 = 10_000_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Joint law with an occasional zero cell.
pub fn random_joint(rng: &mut ChaCha8Rng, xs: usize, ys: usize, allow_zero: bool) -> JointDistribution {
    loop {
        let w: Vec<f64> = (0..xs * ys)
            .map(|_| {
                if allow_zero && rng.random::<f64>() < 0.15 {
                    0.0
                } else {
                    rng.random::<f64>() + 0.05
                }
            })
            .collect();
        if w.iter().any(|&v| v > 0.0) {
            return JointDistribution::from_weights(xs, ys, &w).unwrap();
        }
    }
}

pub fn random_hypotheses(
    rng: &mut ChaCha8Rng,
    count: usize,
    xs: usize,
    ys: usize,
    with_uniform: bool,
) -> HypothesisSet {
    let mut hs: Vec<SoftClassifier> = (0..count)
        .map(|_| {
            let w: Vec<f64> = (0..xs * ys).map(|_| rng.random::<f64>().powi(2) + 0.01).collect();
            SoftClassifier::from_rows(xs, ys, &w).unwrap()
        })
        .collect();
    if with_uniform {
        hs[0] = SoftClassifier::uniform(xs, ys).unwrap();
    }
    HypothesisSet::new(hs).unwrap()
}

pub struct Instance {
    pub label: String,
    pub world: World,
    pub learner: Learner,
    pub analysis: LearnerAnalysis,
}

/// Small random instances: `|X|, |Y| <= 3`, `n <= 4`, `|H| <= 6`, one of
/// each learner kind per world.
pub fn instances(seed: u64, worlds: usize) -> Vec<Instance> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for w in 0..worlds {
        let xs = r.random_range(1..=3);
        let ys = r.random_range(2..=3);
        let n = r.random_range(1..=if xs * ys > 6 { 3 } else { 4 });
        let joint = random_joint(&mut r, xs, ys, w % 3 == 2);
        let world = World::new(joint, n).unwrap();
        let hc = r.random_range(1..=6);
        let hyps = random_hypotheses(&mut r, hc, xs, ys, w % 2 == 0);
        let prior_w: Vec<f64> = (0..hc).map(|_| r.random::<f64>() + 0.1).collect();
        let prior = pacman_core::prob::Distribution::from_weights(&prior_w).unwrap();
        let kinds = [
            LearnerKind::GibbsErm { gamma: 0.0 },
            LearnerKind::GibbsErm { gamma: 1.0 },
            LearnerKind::GibbsErm { gamma: 8.0 },
            LearnerKind::DeterministicErm,
        ];
        for kind in kinds {
            let learner = Learner::new(kind, hyps.clone(), Some(prior.clone())).unwrap();
            let analysis = analyze(&world, &learner, CAP).unwrap();
            out.push(Instance {
                label: format!("world {w} ({xs}x{ys}, n={n}, |H|={hc}) {kind:?}"),
                world: world.clone(),
                learner,
                analysis,
            });
        }
    }
    out
}
