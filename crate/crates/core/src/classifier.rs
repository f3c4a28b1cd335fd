//! Soft classifiers and the per-hypothesis quantities built on them: soft and
//! hard risks, cross-entropies, the tilted data law, the gap identity,
//! confidence, calibration error and the hard/soft sandwich.

use crate::error::{Error, Result};
use crate::prob::{Dataset, Distribution, JointDistribution};

/// Entries of a soft classifier are clamped to `[CLAMP_EPS, 1 - CLAMP_EPS]`.
pub const CLAMP_EPS: f64 = 1e-12;

/// `tilde_ce` refuses to evaluate when `1 - R_p` falls below this.
pub const DEGENERATE_ACCURACY: f64 = 1e-300;

/// A map `x -> (0,1)^|Y|` with rows summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftClassifier {
    x_size: usize,
    y_size: usize,
    probs: Vec<f64>,
    log_probs: Vec<f64>,
}

impl SoftClassifier {
    /// Row-major nonnegative weights; each row is normalized, clamped into
    /// the open simplex and renormalized.
    pub fn from_rows(x_size: usize, y_size: usize, rows: &[f64]) -> Result<Self> {
        if x_size == 0 || y_size == 0 {
            return Err(Error::EmptySupport);
        }
        if rows.len() != x_size * y_size {
            return Err(Error::DimensionMismatch {
                expected: (x_size, y_size),
                found: (rows.len(), 1),
            });
        }
        let mut probs = Vec::with_capacity(rows.len());
        for row in rows.chunks(y_size) {
            let normalized = Distribution::from_weights(row)?.probs();
            let clamped: Vec<f64> = normalized.iter().map(|p| p.clamp(CLAMP_EPS, 1.0 - CLAMP_EPS)).collect();
            let total: f64 = clamped.iter().sum();
            probs.extend(clamped.iter().map(|p| p / total));
        }
        let log_probs = probs.iter().map(|p| p.ln()).collect();
        Ok(Self {
            x_size,
            y_size,
            probs,
            log_probs,
        })
    }

    pub fn uniform(x_size: usize, y_size: usize) -> Result<Self> {
        Self::from_rows(x_size, y_size, &vec![1.0; x_size * y_size])
    }

    /// The classifier whose rows are the data conditionals `p(y|x)`.
    pub fn from_conditionals(joint: &JointDistribution) -> Self {
        let (xs, ys) = joint.dims();
        let rows: Vec<f64> = (0..xs).flat_map(|x| joint.conditional_y_given_x(x).probs()).collect();
        Self::from_rows(xs, ys, &rows).expect("conditionals are valid rows")
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

    pub fn row(&self, x: usize) -> &[f64] {
        &self.probs[x * self.y_size..(x + 1) * self.y_size]
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.y_size + y]
    }

    pub fn log_prob(&self, x: usize, y: usize) -> f64 {
        self.log_probs[x * self.y_size + y]
    }

    /// Row-major `(h(x))_y`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    fn check(&self, joint: &JointDistribution) -> Result<()> {
        if joint.dims() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: joint.dims(),
                found: self.dims(),
            });
        }
        Ok(())
    }
}

/// The argmax decision rule of a soft classifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardClassifier {
    decisions: Vec<usize>,
    y_size: usize,
}

impl HardClassifier {
    pub fn new(decisions: Vec<usize>, y_size: usize) -> Result<Self> {
        if let Some((x, &y)) = decisions.iter().enumerate().find(|(_, &y)| y >= y_size) {
            return Err(Error::IndexOutOfRange {
                x,
                y,
                x_size: decisions.len(),
                y_size,
            });
        }
        Ok(Self { decisions, y_size })
    }

    pub fn decision(&self, x: usize) -> usize {
        self.decisions[x]
    }

    pub fn decisions(&self) -> &[usize] {
        &self.decisions
    }

    fn dims(&self) -> (usize, usize) {
        (self.decisions.len(), self.y_size)
    }
}

/// Argmax per row, lowest label index on ties.
pub fn hard_decision(h: &SoftClassifier) -> HardClassifier {
    let decisions = (0..h.x_size)
        .map(|x| {
            let row = h.row(x);
            let mut best = 0;
            for (y, &p) in row.iter().enumerate() {
                if p > row[best] {
                    best = y;
                }
            }
            best
        })
        .collect();
    HardClassifier {
        decisions,
        y_size: h.y_size,
    }
}

/// `R_p(h) = 1 - E[(h(x))_y]`.
pub fn soft_risk(joint: &JointDistribution, h: &SoftClassifier) -> Result<f64> {
    h.check(joint)?;
    Ok(1.0 - accuracy(joint, h))
}

fn accuracy(joint: &JointDistribution, h: &SoftClassifier) -> f64 {
    joint
        .log_probs()
        .iter()
        .zip(h.probs())
        .map(|(lp, hp)| lp.exp() * hp)
        .sum()
}

/// `R*_p(h) = P(h(x) != y)`.
pub fn hard_risk(joint: &JointDistribution, hc: &HardClassifier) -> Result<f64> {
    if joint.dims() != hc.dims() {
        return Err(Error::DimensionMismatch {
            expected: joint.dims(),
            found: hc.dims(),
        });
    }
    let correct: f64 = (0..joint.x_size()).map(|x| joint.prob(x, hc.decision(x))).sum();
    Ok((1.0 - correct).max(0.0))
}

/// Fraction of misclassified pairs in `S`.
pub fn empirical_hard_risk(s: &Dataset, hc: &HardClassifier) -> Result<f64> {
    check_dataset(s, hc.dims())?;
    let wrong = s.pairs().iter().filter(|&&(x, y)| hc.decision(x) != y).count();
    Ok(wrong as f64 / s.n() as f64)
}

fn check_dataset(s: &Dataset, (x_size, y_size): (usize, usize)) -> Result<()> {
    match s.pairs().iter().find(|&&(x, y)| x >= x_size || y >= y_size) {
        Some(&(x, y)) => Err(Error::IndexOutOfRange { x, y, x_size, y_size }),
        None => Ok(()),
    }
}

/// `CE_S(h) = (1/n) sum -log (h(x))_y`.
pub fn empirical_ce(s: &Dataset, h: &SoftClassifier) -> Result<f64> {
    check_dataset(s, h.dims())?;
    let total: f64 = s.pairs().iter().map(|&(x, y)| -h.log_prob(x, y)).sum();
    Ok(total / s.n() as f64)
}

/// `CE_p(h) = E[-log (h(x))_y]`.
pub fn true_ce(joint: &JointDistribution, h: &SoftClassifier) -> Result<f64> {
    h.check(joint)?;
    Ok(joint
        .log_probs()
        .iter()
        .zip(h.log_probs())
        .filter(|(lp, _)| lp.is_finite())
        .map(|(lp, lh)| -lp.exp() * lh)
        .sum())
}

/// Cross-entropy of the expected risk, `-log(1 - R_p(h))`.
pub fn tilde_ce(joint: &JointDistribution, h: &SoftClassifier) -> Result<f64> {
    h.check(joint)?;
    let acc = accuracy(joint, h);
    if acc < DEGENERATE_ACCURACY {
        return Err(Error::DegenerateRisk { accuracy: acc });
    }
    Ok(-acc.ln())
}

/// `q(x,y|h) = (h(x))_y p(x,y) / (1 - R_p(h))`: the data law conditioned on
/// the soft classifier's sampled label being correct.
pub fn tilted_distribution(joint: &JointDistribution, h: &SoftClassifier) -> Result<JointDistribution> {
    let log_acc = -tilde_ce(joint, h)?;
    let lw = joint
        .log_probs()
        .iter()
        .zip(h.log_probs())
        .map(|(lp, lh)| lp + lh - log_acc)
        .collect();
    JointDistribution::from_log_weights(joint.x_size(), joint.y_size(), lw)
}

/// The generalization gap of one hypothesis on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRecord {
    pub dataset: Dataset,
    pub hypothesis: usize,
    /// Empirical cross-entropy, nats.
    pub ce_s: f64,
    pub tilde_ce: f64,
    /// `tilde_ce - ce_s`.
    pub gap: f64,
    /// `(1/n) sum log((h(x))_y / (1 - R_p))`.
    pub log_ratio: f64,
}

/// Computes the gap both as a cross-entropy difference and as a
/// per-sample likelihood ratio.
pub fn pacman_gap(joint: &JointDistribution, s: &Dataset, h: &SoftClassifier, hypothesis: usize) -> Result<GapRecord> {
    let ce_s = empirical_ce(s, h)?;
    let tce = tilde_ce(joint, h)?;
    let log_ratio = s.pairs().iter().map(|&(x, y)| h.log_prob(x, y) + tce).sum::<f64>() / s.n() as f64;
    Ok(GapRecord {
        dataset: s.clone(),
        hypothesis,
        ce_s,
        tilde_ce: tce,
        gap: tce - ce_s,
        log_ratio,
    })
}

/// `c_h = E_x[(h(x))_{h(x)}]`.
pub fn confidence(joint: &JointDistribution, h: &SoftClassifier) -> Result<f64> {
    h.check(joint)?;
    let hc = hard_decision(h);
    let px = joint.marginal_x();
    Ok((0..h.x_size).map(|x| px.prob(x) * h.prob(x, hc.decision(x))).sum())
}

/// Expected calibration error, exact over the distinct confidence values.
pub fn ece(joint: &JointDistribution, h: &SoftClassifier) -> Result<f64> {
    h.check(joint)?;
    let hc = hard_decision(h);
    let px = joint.marginal_x();
    // (confidence, mass, correct mass)
    let mut groups: Vec<(f64, f64, f64)> = Vec::new();
    for x in 0..h.x_size {
        let conf = h.prob(x, hc.decision(x));
        let mass = px.prob(x);
        let correct = joint.prob(x, hc.decision(x));
        match groups.iter_mut().find(|g| g.0 == conf) {
            Some(g) => {
                g.1 += mass;
                g.2 += correct;
            }
            None => groups.push((conf, mass, correct)),
        }
    }
    Ok(groups
        .iter()
        .filter(|g| g.1 > 0.0)
        .map(|&(conf, mass, correct)| mass * (correct / mass - conf).abs())
        .sum())
}

/// Soft risk sandwiched between functions of the hard risk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardSoftBounds {
    /// `R*_p / 2`
    pub lower: f64,
    /// `1 - c_h + R*_p`
    pub upper: f64,
    pub soft_risk: f64,
    pub hard_risk: f64,
    pub confidence: f64,
}

pub fn hard_soft_bounds(joint: &JointDistribution, h: &SoftClassifier) -> Result<HardSoftBounds> {
    let soft = soft_risk(joint, h)?;
    let hard = hard_risk(joint, &hard_decision(h))?;
    let conf = confidence(joint, h)?;
    Ok(HardSoftBounds {
        lower: 0.5 * hard,
        upper: 1.0 - conf + hard,
        soft_risk: soft,
        hard_risk: hard,
        confidence: conf,
    })
}
