//! Evaluation of one scenario and the artifacts it produces.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use pacman_core::bounds::{
    bound_chernoff, build_bound, build_global_bound, fit_sigma, subgaussian_certificate, BoundName, PacBound, Scope,
    Sigma,
};
use pacman_core::classifier::{ece, hard_soft_bounds};
use pacman_core::learner::{analyze, Learner, LearnerAnalysis, LearnerKind};
use pacman_core::prob::{World, DEFAULT_ENUM_CAP};
use pacman_core::verify::{exact_violation, mc_violation, mc_violation_with, np_test, McReport, VerificationReport};
use pacman_core::Error;
use serde_json::{json, Map, Value};

use crate::output::{fmt_f64, fmt_opt, num, opt_num};
use crate::scenario::{Scenario, SweepParam};

/// Reads `PACMAN_ENUM_CAP`, falling back to the default cap.
pub fn enum_cap() -> Result<u64> {
    match std::env::var("PACMAN_ENUM_CAP") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&c| c > 0)
            .with_context(|| format!("PACMAN_ENUM_CAP must be a positive integer, got `{v}`")),
        Err(_) => Ok(DEFAULT_ENUM_CAP),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: BoundName,
    pub scope: Scope,
    pub certified: bool,
    pub delta: f64,
    pub eps_mean: f64,
    pub eps_max: f64,
    pub worst_margin: Option<f64>,
    pub exact_violation: Option<f64>,
    pub mc: Option<McReport>,
    /// `None` for comparison bounds, which are not statements about this gap.
    pub pass: Option<bool>,
}

impl BoundReport {
    fn to_json(&self) -> Value {
        json!({
            "name": self.name.as_str(),
            "scope": self.scope.as_str(),
            "certified": self.certified,
            "comparison": self.name.is_comparison(),
            "delta": num(self.delta),
            "eps_mean": num(self.eps_mean),
            "eps_max": num(self.eps_max),
            "worst_margin": opt_num(self.worst_margin),
            "exact_violation": opt_num(self.exact_violation),
            "mc": self.mc.map(|m| json!({
                "trials": m.trials,
                "violations": m.violations,
                "seed": m.seed,
                "rate": num(m.rate),
                "ci_low": num(m.ci_low),
                "ci_high": num(m.ci_high),
            })).unwrap_or(Value::Null),
            "pass": self.pass,
        })
    }
}

pub struct Evaluation {
    pub scenario: Scenario,
    pub world: World,
    pub learner: Learner,
    /// `None` when the dataset space exceeded the enumeration cap.
    pub analysis: Option<LearnerAnalysis>,
    pub evaluators: Vec<Box<dyn PacBound>>,
    pub reports: Vec<BoundReport>,
}

impl Evaluation {
    /// All certified bounds on the gap held at their level.
    pub fn pass(&self) -> bool {
        self.reports
            .iter()
            .filter(|r| r.certified)
            .all(|r| r.pass != Some(false))
    }
}

pub fn evaluate(scenario: &Scenario, cap: u64) -> Result<Evaluation> {
    let world = scenario.build_world()?;
    let learner = scenario.build_learner()?;
    let v = scenario.verification;
    let analysis = match analyze(&world, &learner, cap) {
        Ok(a) => Some(a),
        Err(Error::EnumerationCapExceeded { size, cap }) => {
            if !v.mc() {
                bail!(
                    "the (S, h) space has {size} cells, above the enumeration cap {cap}; \
                     raise PACMAN_ENUM_CAP or use verification mode `both` or `mc`"
                );
            }
            None
        }
        Err(e) => return Err(e.into()),
    };
    let mut evaluators = Vec::new();
    let mut reports = Vec::new();
    for &name in &scenario.bounds {
        let bound = match &analysis {
            Some(a) => build_bound(name, a, &scenario.params),
            None if !name.needs_analysis() => {
                build_global_bound(name, learner.hypotheses().len(), world.n, &scenario.params)
            }
            None => continue,
        }
        .with_context(|| format!("evaluating bound `{name}`"))?;
        let delta = bound.delta();
        let comparison = name.is_comparison();
        let report = match &analysis {
            Some(a) => {
                let stats = exact_violation(a, bound.as_ref());
                let (exact, mc) = if comparison {
                    (None, None)
                } else {
                    let mc = if v.mc() {
                        Some(mc_violation(a, bound.as_ref(), v.trials, v.seed)?)
                    } else {
                        None
                    };
                    (v.exact().then_some(stats), mc)
                };
                let pass = VerificationReport::new(name.as_str(), delta, bound.certified(), exact, mc).pass;
                BoundReport {
                    name,
                    scope: bound.scope(),
                    certified: bound.certified(),
                    delta,
                    eps_mean: stats.eps_mean,
                    eps_max: stats.eps_max,
                    worst_margin: exact.map(|e| e.worst_margin),
                    exact_violation: exact.map(|e| e.probability),
                    mc,
                    pass: (!comparison).then_some(pass),
                }
            }
            None => {
                let eps = bound.epsilon(0, 0);
                let mc = mc_violation_with(&world, &learner, v.trials, v.seed, |_, _| eps)?;
                let pass = VerificationReport::new(name.as_str(), delta, bound.certified(), None, Some(mc)).pass;
                BoundReport {
                    name,
                    scope: bound.scope(),
                    certified: bound.certified(),
                    delta,
                    eps_mean: eps,
                    eps_max: eps,
                    worst_margin: None,
                    exact_violation: None,
                    mc: Some(mc),
                    pass: Some(pass),
                }
            }
        };
        evaluators.push(bound);
        reports.push(report);
    }
    Ok(Evaluation {
        scenario: scenario.clone(),
        world,
        learner,
        analysis,
        evaluators,
        reports,
    })
}

/// Header and one row per `(S, h)` in lexicographic dataset order.
pub fn write_analysis_csv<W: Write>(ev: &Evaluation, out: &mut W) -> Result<()> {
    let a = ev.analysis.as_ref().context("no enumeration available")?;
    write!(out, "s_index,h_index,p_s,p_h_given_s,ce_s,tilde_ce,gap,log_ratio")?;
    for r in &ev.reports {
        write!(out, ",eps_{}", r.name)?;
    }
    writeln!(out)?;
    let mut line = String::new();
    for s in 0..a.dataset_count() {
        let p_s = a.log_p_s(s).exp();
        for h in 0..a.hypothesis_count() {
            line.clear();
            line.push_str(&format!(
                "{s},{h},{},{},{},{},{},{}",
                fmt_f64(p_s),
                fmt_f64(a.log_posterior(s, h).exp()),
                fmt_f64(a.ce_s(s, h)),
                fmt_f64(a.tilde_ce(h)),
                fmt_f64(a.gap(s, h)),
                fmt_f64(a.log_ratio(s, h)),
            ));
            for b in &ev.evaluators {
                line.push(',');
                line.push_str(&fmt_f64(b.epsilon(s, h)));
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
    }
    Ok(())
}

fn learner_json(learner: &Learner) -> Value {
    let (kind, gamma) = match learner.kind() {
        LearnerKind::GibbsErm { gamma } => ("gibbs_erm", Some(gamma)),
        LearnerKind::DeterministicErm => ("deterministic_erm", None),
        LearnerKind::DataIndependent => ("data_independent", None),
    };
    json!({
        "kind": kind,
        "gamma": opt_num(gamma),
        "h_count": learner.hypotheses().len(),
    })
}

fn analysis_json(ev: &Evaluation, a: &LearnerAnalysis) -> Result<Value> {
    let p = &ev.scenario.params;
    let n = a.n() as f64;
    let mi = a.mutual_information();
    let mut mgf = Vec::new();
    for (label, t) in [("n/4", n / 4.0), ("n/2", n / 2.0), ("n", n), ("2n", 2.0 * n)] {
        let log_cn = match a.log_mgf(t) {
            Ok(v) => v,
            Err(Error::InfiniteMgf) => f64::INFINITY,
            Err(e) => return Err(e.into()),
        };
        mgf.push(json!({"label": label, "t": num(t), "log_cn": num(log_cn), "cn": num(log_cn.exp())}));
    }
    let chernoff = match bound_chernoff(a, p.delta, p.t_max_for(a.n())) {
        Ok((_, r)) => json!({"t": num(r.t), "epsilon": num(r.epsilon), "attained": r.attained}),
        Err(Error::InfiniteMgfEverywhere) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let sigma = match p.sigma {
        Sigma::Auto => fit_sigma(a)?,
        Sigma::Value(v) => v,
    };
    let cert = subgaussian_certificate(a, sigma)?;
    let certified = ev
        .reports
        .iter()
        .find(|r| r.name == BoundName::Subgaussian)
        .map(|r| r.certified);
    let np = np_test(a, p.delta)?;

    let joint = &ev.world.joint;
    let mut per_h = Vec::new();
    let mut lower_margin = f64::INFINITY;
    let mut upper_margin = f64::INFINITY;
    let mut ece_margin = f64::INFINITY;
    for (i, h) in ev.learner.hypotheses().iter().enumerate() {
        let b = hard_soft_bounds(joint, h)?;
        let e = ece(joint, h)?;
        let gap = (1.0 - b.hard_risk - b.confidence).abs();
        lower_margin = lower_margin.min(b.soft_risk - b.lower);
        upper_margin = upper_margin.min(b.upper - b.soft_risk);
        ece_margin = ece_margin.min(e - gap);
        per_h.push(json!({
            "h_index": i,
            "soft_risk": num(b.soft_risk),
            "hard_risk": num(b.hard_risk),
            "confidence": num(b.confidence),
            "lower": num(b.lower),
            "upper": num(b.upper),
            "ece": num(e),
            "calibration_gap": num(gap),
        }));
    }
    Ok(json!({
        "dataset_count": a.dataset_count(),
        "mutual_information": num(mi),
        "mi_over_n": num(mi / n),
        "expected_gap": num(a.expected_gap()),
        "mgf": mgf,
        "chernoff": chernoff,
        "subgaussian": {
            "sigma": num(sigma),
            "fitted": matches!(p.sigma, Sigma::Auto),
            "mgf_condition_holds": cert.holds,
            "certified": certified,
        },
        "np_test": {
            "delta": num(p.delta),
            "log_cn": num(np.log_cn),
            "threshold": num(np.threshold),
            "type_one": num(np.type_one),
            "power": num(np.power),
        },
        "hard_soft": {
            "hypotheses": per_h,
            "min_lower_margin": num(lower_margin),
            "min_upper_margin": num(upper_margin),
            "min_ece_margin": num(ece_margin),
        },
    }))
}

pub fn summary_json(ev: &Evaluation) -> Result<Value> {
    let s = &ev.scenario;
    let p = &s.params;
    let v = s.verification;
    let mut root = Map::new();
    root.insert("n".into(), json!(ev.world.n));
    root.insert("learner".into(), learner_json(&ev.learner));
    root.insert("enumerated".into(), json!(ev.analysis.is_some()));
    root.insert(
        "params".into(),
        json!({
            "delta": num(p.delta),
            "alpha": num(p.alpha),
            "beta": num(p.beta),
            "nu": num(p.nu),
            "sigma": match p.sigma { Sigma::Auto => json!("auto"), Sigma::Value(x) => num(x) },
            "t_max": num(p.t_max_for(ev.world.n)),
            "expected_cs": p.expected_cs,
        }),
    );
    root.insert(
        "verification".into(),
        json!({
            "exact": ev.analysis.is_some() && v.exact(),
            "mc": v.mc(),
            "trials": v.trials,
            "seed": v.seed,
        }),
    );
    root.insert(
        "analysis".into(),
        match &ev.analysis {
            Some(a) => analysis_json(ev, a)?,
            None => Value::Null,
        },
    );
    root.insert(
        "bounds".into(),
        Value::Array(ev.reports.iter().map(BoundReport::to_json).collect()),
    );
    root.insert("pass".into(), json!(ev.pass()));
    Ok(Value::Object(root))
}

fn create_out_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes `analysis.csv` (when enumerated) and `summary.json` into `out`.
pub fn run(scenario: &Scenario, out: &Path, cap: u64) -> Result<Evaluation> {
    let ev = evaluate(scenario, cap)?;
    create_out_dir(out)?;
    let csv_path = out.join("analysis.csv");
    if ev.analysis.is_some() {
        let file = fs::File::create(&csv_path).with_context(|| format!("writing {}", csv_path.display()))?;
        let mut w = BufWriter::new(file);
        write_analysis_csv(&ev, &mut w)?;
        w.flush()?;
    } else if csv_path.exists() {
        // A stale table from an earlier run would contradict the summary.
        fs::remove_file(&csv_path)?;
    }
    write_json(&out.join("summary.json"), &summary_json(&ev)?)?;
    Ok(ev)
}

pub const SWEEP_HEADER: &str =
    "param,value,bound,delta,eps_mean,eps_max,exact_violation,expected_gap,mi_over_n,certified,pass";

/// Long-format table, one row per value and bound.
pub fn sweep(scenario: &Scenario, param: SweepParam, values: &[f64], out: &Path, cap: u64) -> Result<()> {
    if values.is_empty() {
        bail!("sweep: no values given");
    }
    let mut text = String::from(SWEEP_HEADER);
    text.push('\n');
    for &value in values {
        let s = scenario.with_param(param, value)?;
        let ev = evaluate(&s, cap).with_context(|| format!("sweep {}={value}", param.as_str()))?;
        let (expected_gap, mi_over_n) = match &ev.analysis {
            Some(a) => (Some(a.expected_gap()), Some(a.mutual_information() / a.n() as f64)),
            None => (None, None),
        };
        for r in &ev.reports {
            text.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                param.as_str(),
                fmt_f64(value),
                r.name,
                fmt_f64(r.delta),
                fmt_f64(r.eps_mean),
                fmt_f64(r.eps_max),
                fmt_opt(r.exact_violation),
                fmt_opt(expected_gap),
                fmt_opt(mi_over_n),
                r.certified,
                r.pass.map(|p| p.to_string()).unwrap_or_default(),
            ));
        }
    }
    create_out_dir(out)?;
    let path = out.join("sweep.csv");
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

/// Human-readable verification table.
pub fn verification_table(ev: &Evaluation) -> String {
    let mut t = format!(
        "{:<12} {:<14} {:>9} {:>7} {:>14} {:>14} {:>12}  {}\n",
        "bound", "scope", "certified", "delta", "exact", "mc_rate", "mc_ci_high", "result"
    );
    for r in &ev.reports {
        let result = match (r.pass, r.certified) {
            (None, _) => "comparison",
            (Some(true), _) => "PASS",
            (Some(false), true) => "FAIL",
            (Some(false), false) => "FAIL (uncertified)",
        };
        let show = |x: Option<f64>| x.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
        t.push_str(&format!(
            "{:<12} {:<14} {:>9} {:>7} {:>14} {:>14} {:>12}  {}\n",
            r.name.as_str(),
            r.scope.as_str(),
            r.certified,
            r.delta,
            show(r.exact_violation),
            show(r.mc.map(|m| m.rate)),
            show(r.mc.map(|m| m.ci_high)),
            result
        ));
    }
    t
}
