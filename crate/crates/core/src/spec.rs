//! JSON specifications for worlds, classifiers and learners.

use serde::{Deserialize, Serialize};

use crate::classifier::SoftClassifier;
use crate::error::{Error, Result};
use crate::learner::{HypothesisSet, Learner, LearnerKind};
use crate::prob::{Distribution, JointDistribution, World};

/// A joint law given by row-major weights; `n` is optional here because a
/// scenario may set it separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSpec {
    pub x_size: usize,
    pub y_size: usize,
    pub probs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl WorldSpec {
    pub fn joint(&self) -> Result<JointDistribution> {
        JointDistribution::from_weights(self.x_size, self.y_size, &self.probs)
            .map_err(|e| Error::Spec(format!("world.probs: {e}")))
    }

    pub fn build(&self, n: Option<usize>) -> Result<World> {
        let n = n
            .or(self.n)
            .ok_or_else(|| Error::Spec("n: missing (set it in the world or the scenario)".into()))?;
        World::new(self.joint()?, n).map_err(|e| Error::Spec(format!("n: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierSpec {
    pub x_size: usize,
    pub y_size: usize,
    pub rows: Vec<f64>,
}

impl ClassifierSpec {
    pub fn build(&self) -> Result<SoftClassifier> {
        SoftClassifier::from_rows(self.x_size, self.y_size, &self.rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKindSpec {
    GibbsErm,
    DeterministicErm,
    DataIndependent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomHypotheses {
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerSpec {
    pub kind: LearnerKindSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Weights over the hypotheses; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypotheses: Option<Vec<ClassifierSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_hypotheses: Option<RandomHypotheses>,
}

impl LearnerSpec {
    pub fn hypothesis_set(&self, x_size: usize, y_size: usize) -> Result<HypothesisSet> {
        let set = match (&self.hypotheses, &self.random_hypotheses) {
            (Some(list), None) => {
                let hs = list
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        c.build()
                            .map_err(|e| Error::Spec(format!("learner.hypotheses[{i}]: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                HypothesisSet::new(hs).map_err(|e| Error::Spec(format!("learner.hypotheses: {e}")))?
            }
            (None, Some(r)) => HypothesisSet::random(r.count, x_size, y_size, r.seed)
                .map_err(|e| Error::Spec(format!("learner.random_hypotheses: {e}")))?,
            _ => {
                return Err(Error::Spec(
                    "learner: exactly one of `hypotheses` or `random_hypotheses` is required".into(),
                ))
            }
        };
        if set.dims() != (x_size, y_size) {
            return Err(Error::Spec(format!(
                "learner.hypotheses: classifiers are {:?} but the world is {:?}",
                set.dims(),
                (x_size, y_size)
            )));
        }
        Ok(set)
    }

    pub fn kind(&self) -> Result<LearnerKind> {
        Ok(match self.kind {
            LearnerKindSpec::GibbsErm => LearnerKind::GibbsErm {
                gamma: self
                    .gamma
                    .ok_or_else(|| Error::Spec("learner.gamma: required for gibbs_erm".into()))?,
            },
            LearnerKindSpec::DeterministicErm => LearnerKind::DeterministicErm,
            LearnerKindSpec::DataIndependent => LearnerKind::DataIndependent,
        })
    }

    pub fn build(&self, x_size: usize, y_size: usize) -> Result<Learner> {
        let set = self.hypothesis_set(x_size, y_size)?;
        let prior = self
            .prior
            .as_ref()
            .map(|w| Distribution::from_weights(w).map_err(|e| Error::Spec(format!("learner.prior: {e}"))))
            .transpose()?;
        Learner::new(self.kind()?, set, prior).map_err(|e| Error::Spec(format!("learner: {e}")))
    }
}
