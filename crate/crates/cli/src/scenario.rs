//! Scenario files: one world, one learner, a list of bounds and how to
//! verify them.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pacman_core::bounds::{BoundName, BoundParams, Sigma};
use pacman_core::learner::Learner;
use pacman_core::prob::World;
use pacman_core::spec::{LearnerKindSpec, LearnerSpec, WorldSpec};
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Either an inline world or a path to a world JSON file, resolved
/// relative to the scenario file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum WorldRef {
    Path(PathBuf),
    Inline(serde_json::Value),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SigmaSpec {
    Value(f64),
    Text(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub sigma: Option<SigmaSpec>,
    pub nu: Option<f64>,
    pub t_max: Option<f64>,
    pub expected_cs: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Mc,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verification {
    pub mode: Mode,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_trials() -> u64 {
    10_000
}

impl Default for Verification {
    fn default() -> Self {
        Self {
            mode: Mode::Exact,
            trials: default_trials(),
            seed: 0,
        }
    }
}

impl Verification {
    pub fn exact(&self) -> bool {
        matches!(self.mode, Mode::Exact | Mode::Both)
    }

    pub fn mc(&self) -> bool {
        matches!(self.mode, Mode::Mc | Mode::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Gamma,
    N,
    Delta,
    Alpha,
    Beta,
    HCount,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Gamma => "gamma",
            SweepParam::N => "n",
            SweepParam::Delta => "delta",
            SweepParam::Alpha => "alpha",
            SweepParam::Beta => "beta",
            SweepParam::HCount => "h_count",
        }
    }
}

impl std::str::FromStr for SweepParam {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gamma" => SweepParam::Gamma,
            "n" => SweepParam::N,
            "delta" => SweepParam::Delta,
            "alpha" => SweepParam::Alpha,
            "beta" => SweepParam::Beta,
            "h_count" => SweepParam::HCount,
            other => bail!("unknown sweep parameter `{other}` (expected gamma, n, delta, alpha, beta or h_count)"),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// The scenario file as written on disk.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub world: WorldRef,
    #[serde(default)]
    pub n: Option<usize>,
    pub learner: LearnerSpec,
    #[serde(default)]
    pub bounds: Option<Vec<String>>,
    #[serde(default)]
    pub params: ParamsSpec,
    #[serde(default)]
    pub verification: Verification,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub world: WorldSpec,
    pub n: usize,
    pub learner: LearnerSpec,
    pub bounds: Vec<BoundName>,
    pub params: BoundParams,
    pub verification: Verification,
    pub sweep: Option<SweepSpec>,
}

/// Drops repeated names, keeping first occurrences in order.
pub fn dedup_bounds(bounds: Vec<BoundName>) -> Vec<BoundName> {
    let mut out: Vec<BoundName> = Vec::with_capacity(bounds.len());
    for b in bounds {
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." || path.is_empty() {
            anyhow::anyhow!("{what}: {inner}")
        } else {
            anyhow::anyhow!("{what}: field `{path}`: {inner}")
        }
    })
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let file: ScenarioFile = parse_json(text, "scenario")?;
        if file.schema_version != SCHEMA_VERSION {
            bail!(
                "scenario: field `schema_version`: unsupported version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            );
        }
        let world: WorldSpec = match &file.world {
            WorldRef::Path(p) => {
                let full = base.join(p);
                let text = std::fs::read_to_string(&full)
                    .with_context(|| format!("scenario: field `world`: reading {}", full.display()))?;
                parse_json(&text, &format!("world file {}", full.display()))?
            }
            WorldRef::Inline(v) => parse_json(&v.to_string(), "scenario: field `world`")?,
        };
        let n = file
            .n
            .or(world.n)
            .context("scenario: field `n`: missing (set it at top level or inside `world`)")?;
        if n == 0 {
            bail!("scenario: field `n`: must be at least 1");
        }
        world
            .joint()
            .map_err(|e| anyhow::anyhow!("scenario: field `world`: {e}"))?;
        let bounds = match &file.bounds {
            None => BoundName::ALL.to_vec(),
            Some(list) => list
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    if b == "all" {
                        return Ok(BoundName::ALL.to_vec());
                    }
                    b.parse::<BoundName>()
                        .map(|x| vec![x])
                        .map_err(|e| anyhow::anyhow!("scenario: field `bounds[{i}]`: {e}"))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect(),
        };
        let bounds = dedup_bounds(bounds);
        let mut params = BoundParams::default();
        let p = &file.params;
        if let Some(v) = p.delta {
            params.delta = v;
        }
        if let Some(v) = p.alpha {
            params.alpha = v;
        }
        if let Some(v) = p.beta {
            params.beta = v;
        }
        if let Some(v) = p.nu {
            params.nu = v;
        }
        if let Some(v) = p.t_max {
            params.t_max = Some(v);
        }
        if let Some(v) = p.expected_cs {
            params.expected_cs = v;
        }
        match &p.sigma {
            None => {}
            Some(SigmaSpec::Value(v)) => params.sigma = Sigma::Value(*v),
            Some(SigmaSpec::Text(t)) => {
                params.sigma = t
                    .parse()
                    .map_err(|e| anyhow::anyhow!("scenario: field `params.sigma`: {e}"))?
            }
        }
        params
            .validate()
            .map_err(|e| anyhow::anyhow!("scenario: field `params`: {e}"))?;
        if file.verification.mc() && file.verification.trials == 0 {
            bail!("scenario: field `verification.trials`: must be at least 1");
        }
        let scenario = Scenario {
            world,
            n,
            learner: file.learner,
            bounds,
            params,
            verification: file.verification,
            sweep: file.sweep,
        };
        scenario.build_learner()?;
        Ok(scenario)
    }

    pub fn build_world(&self) -> Result<World> {
        self.world
            .build(Some(self.n))
            .map_err(|e| anyhow::anyhow!("scenario: field `world`: {e}"))
    }

    pub fn build_learner(&self) -> Result<Learner> {
        self.learner
            .build(self.world.x_size, self.world.y_size)
            .map_err(|e| anyhow::anyhow!("scenario: {e}"))
    }

    /// A copy with one parameter replaced.
    pub fn with_param(&self, param: SweepParam, value: f64) -> Result<Scenario> {
        let mut s = self.clone();
        match param {
            SweepParam::Gamma => {
                if s.learner.kind != LearnerKindSpec::GibbsErm {
                    bail!("sweep gamma: the learner must be gibbs_erm");
                }
                s.learner.gamma = Some(value);
            }
            SweepParam::N => {
                if value < 1.0 || value.fract() != 0.0 {
                    bail!("sweep n: values must be positive integers, got {value}");
                }
                s.n = value as usize;
            }
            SweepParam::Delta => s.params.delta = value,
            SweepParam::Alpha => s.params.alpha = value,
            SweepParam::Beta => s.params.beta = value,
            SweepParam::HCount => {
                if value < 1.0 || value.fract() != 0.0 {
                    bail!("sweep h_count: values must be positive integers, got {value}");
                }
                let k = value as usize;
                match (&mut s.learner.random_hypotheses, &mut s.learner.hypotheses) {
                    (Some(r), _) => r.count = k,
                    (None, Some(list)) => {
                        if k > list.len() {
                            bail!("sweep h_count: {k} exceeds the {} listed hypotheses", list.len());
                        }
                        list.truncate(k);
                    }
                    (None, None) => bail!("sweep h_count: learner has no hypotheses"),
                }
                if let Some(prior) = &mut s.learner.prior {
                    if k > prior.len() {
                        bail!("sweep h_count: {k} exceeds the {} prior weights", prior.len());
                    }
                    prior.truncate(k);
                }
            }
        }
        s.params
            .validate()
            .map_err(|e| anyhow::anyhow!("sweep {}={value}: {e}", param.as_str()))?;
        s.build_learner()?;
        Ok(s)
    }
}
