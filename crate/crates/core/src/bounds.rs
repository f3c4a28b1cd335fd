//! Bound evaluators for the gap `tilde_CE - CE_S`, plus the comparison
//! bounds for the 0-1 gap and helpers for turning a bound into a risk bound.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::info::renyi_divergence;
use crate::learner::LearnerAnalysis;
use crate::prob::{Distribution, LogSumExp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    /// Depends on both the dataset and the hypothesis.
    PerSH,
    /// Depends on the dataset only.
    PerS,
    /// One value for the whole learner.
    Global,
    /// Bounds `E[gap]`, not a tail.
    InExpectation,
}

impl Scope {
    pub fn as_str(self) -> &'static str {
        match self {
            Scope::PerSH => "per_S_h",
            Scope::PerS => "per_S",
            Scope::Global => "global",
            Scope::InExpectation => "in_expectation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundValue {
    /// Nats. May be negative or infinite.
    pub epsilon: f64,
    pub scope: Scope,
    /// Additive terms summing to `epsilon`.
    pub components: Vec<(&'static str, f64)>,
}

impl BoundValue {
    fn new(scope: Scope, components: Vec<(&'static str, f64)>) -> Self {
        let epsilon = components.iter().map(|c| c.1).sum();
        Self {
            epsilon,
            scope,
            components,
        }
    }
}

/// A high-probability statement `P(gap > eps(S, h)) <= delta`.
pub trait PacBound: Send + Sync {
    fn name(&self) -> &'static str;
    fn scope(&self) -> Scope;
    fn delta(&self) -> f64;
    fn value(&self, s: usize, h: usize) -> BoundValue;
    fn epsilon(&self, s: usize, h: usize) -> f64 {
        self.value(s, h).epsilon
    }
    /// Whether the statement is proved at finite `n`.
    fn certified(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma {
    /// Fit the smallest proxy satisfying the MGF inequality on the lambda grid.
    Auto,
    Value(f64),
}

impl FromStr for Sigma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Sigma::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v >= 0.0 && v.is_finite() => Ok(Sigma::Value(v)),
            _ => Err(Error::Spec(format!(
                "sigma must be `auto` or a nonnegative number, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: Sigma,
    pub nu: f64,
    /// Chernoff search ceiling; `None` means `64 n`.
    pub t_max: Option<f64>,
    /// Replace `log(1 + CS(S))` by its expectation over `S` in the
    /// Hellinger/chi-square bound.
    pub expected_cs: bool,
}

impl Default for BoundParams {
    fn default() -> Self {
        Self {
            delta: 0.1,
            alpha: 2.0,
            beta: 2.0,
            sigma: Sigma::Auto,
            nu: 1.0,
            t_max: None,
            expected_cs: false,
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            reason: "must lie in (0, 1]",
        });
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::InvalidOrder(format!(
            "alpha = {alpha} must be positive, finite and != 1"
        )));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::InvalidOrder(format!("beta = {beta} must be finite and > 1")));
    }
    Ok(())
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        check_delta(self.delta)?;
        check_alpha(self.alpha)?;
        check_beta(self.beta)?;
        if let Sigma::Value(s) = self.sigma {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "sigma",
                    value: s,
                    reason: "must be finite and nonnegative",
                });
            }
        }
        if !(self.nu >= 1.0) || !self.nu.is_finite() {
            return Err(Error::InvalidParameter {
                name: "nu",
                value: self.nu,
                reason: "must be finite and at least 1",
            });
        }
        if let Some(t) = self.t_max {
            if !(t > CHERNOFF_T_LO) || !t.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "t_max",
                    value: t,
                    reason: "must be finite and above 1e-6",
                });
            }
        }
        Ok(())
    }

    pub fn t_max_for(&self, n: usize) -> f64 {
        self.t_max.unwrap_or(64.0 * n as f64)
    }
}

fn log_two_over(delta: f64) -> f64 {
    (2.0 / delta).ln()
}

/// `D_alpha(q(S|h) || p(S|h))`; NaN when `p(h) = 0`.
fn tilted_renyi(a: &LearnerAnalysis, h: usize, alpha: f64) -> Result<f64> {
    match a.p_s_given_h(h) {
        Some(p) => renyi_divergence(&a.q_s_given_h(h), &p, alpha),
        None => Ok(f64::NAN),
    }
}

fn posterior_renyi(a: &LearnerAnalysis, s: usize, reference: &Distribution, beta: f64) -> Result<f64> {
    renyi_divergence(&a.posterior(s), reference, beta)
}

/// Separated Renyi bound: a tilted-law term of order `alpha` and a
/// posterior-to-prior term of order `beta`.
#[derive(Debug, Clone)]
pub struct BayesBound {
    n: f64,
    alpha: f64,
    delta: f64,
    tilted: Vec<f64>,
    posterior: Vec<f64>,
    constant: f64,
}

impl BayesBound {
    pub fn new(a: &LearnerAnalysis, alpha: f64, beta: f64, delta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_beta(beta)?;
        check_delta(delta)?;
        let n = a.n() as f64;
        let tilted = (0..a.hypothesis_count())
            .map(|h| tilted_renyi(a, h, alpha))
            .collect::<Result<_>>()?;
        let prior = a.induced_prior();
        let posterior = (0..a.dataset_count())
            .map(|s| posterior_renyi(a, s, prior, beta))
            .collect::<Result<_>>()?;
        Ok(Self {
            n,
            alpha,
            delta,
            tilted,
            posterior,
            constant: (1.0 / (alpha * n) + 1.0 / ((beta - 1.0) * n)) * log_two_over(delta),
        })
    }
}

fn bayes_components(n: f64, alpha: f64, d_alpha: f64, d_beta: f64, constant: f64) -> Vec<(&'static str, f64)> {
    vec![
        ("tilted", (alpha - 1.0) / (alpha * n) * d_alpha),
        ("posterior", d_beta / n),
        ("confidence", constant),
    ]
}

impl PacBound for BayesBound {
    fn name(&self) -> &'static str {
        "bayes"
    }
    fn scope(&self) -> Scope {
        Scope::PerSH
    }
    fn delta(&self) -> f64 {
        self.delta
    }
    fn value(&self, s: usize, h: usize) -> BoundValue {
        BoundValue::new(
            Scope::PerSH,
            bayes_components(self.n, self.alpha, self.tilted[h], self.posterior[s], self.constant),
        )
    }
}

/// Single-pair evaluation of [`BayesBound`].
pub fn bound_bayes(a: &LearnerAnalysis, s: usize, h: usize, alpha: f64, beta: f64, delta: f64) -> Result<BoundValue> {
    check_alpha(alpha)?;
    check_beta(beta)?;
    check_delta(delta)?;
    let n = a.n() as f64;
    let d_alpha = tilted_renyi(a, h, alpha)?;
    let d_beta = posterior_renyi(a, s, a.induced_prior(), beta)?;
    let constant = (1.0 / (alpha * n) + 1.0 / ((beta - 1.0) * n)) * log_two_over(delta);
    Ok(BoundValue::new(
        Scope::PerSH,
        bayes_components(n, alpha, d_alpha, d_beta, constant),
    ))
}

/// The `alpha = 1/2`, `beta = 2` case written with the squared Hellinger
/// distance and the posterior chi-square.
#[derive(Debug, Clone)]
pub struct HellChiBound {
    n: f64,
    delta: f64,
    log_bc: Vec<f64>,
    cs_term: Vec<f64>,
    expected_cs: Option<f64>,
}

impl HellChiBound {
    pub fn new(a: &LearnerAnalysis, delta: f64, expected_cs: bool) -> Result<Self> {
        check_delta(delta)?;
        let log_bc: Vec<f64> = (0..a.hypothesis_count())
            .map(|h| a.log_one_minus_half_hellinger(h))
            .collect();
        if log_bc.contains(&f64::NEG_INFINITY) {
            return Err(Error::DegenerateHellinger);
        }
        let cs_term: Vec<f64> = a.cs_values().iter().map(|c| c.ln_1p()).collect();
        let expected = expected_cs.then(|| {
            (0..a.dataset_count())
                .filter(|&s| a.log_p_s(s) > f64::NEG_INFINITY)
                .map(|s| a.log_p_s(s).exp() * cs_term[s])
                .sum()
        });
        Ok(Self {
            n: a.n() as f64,
            delta,
            log_bc,
            cs_term,
            expected_cs: expected,
        })
    }
}

impl PacBound for HellChiBound {
    fn name(&self) -> &'static str {
        "hellchi"
    }
    fn scope(&self) -> Scope {
        Scope::PerSH
    }
    fn delta(&self) -> f64 {
        self.delta
    }
    fn value(&self, s: usize, h: usize) -> BoundValue {
        let cs = self.expected_cs.unwrap_or(self.cs_term[s]);
        BoundValue::new(
            Scope::PerSH,
            vec![
                ("hellinger", 2.0 / self.n * self.log_bc[h]),
                ("chi_square", cs / self.n),
                ("confidence", 3.0 / self.n * log_two_over(self.delta)),
            ],
        )
    }
    fn certified(&self) -> bool {
        // The expectation variant has no finite-n proof.
        self.expected_cs.is_none()
    }
}

/// Single-pair evaluation of [`HellChiBound`] from `H(h)` and `CS(S)`.
pub fn bound_hellchi(a: &LearnerAnalysis, s: usize, h: usize, delta: f64) -> Result<BoundValue> {
    check_delta(delta)?;
    let hel = a.hellinger(h);
    if hel.is_nan() {
        return Ok(BoundValue::new(Scope::PerSH, vec![("hellinger", f64::NAN)]));
    }
    let one_minus = 1.0 - hel / 2.0;
    if one_minus <= 0.0 {
        return Err(Error::DegenerateHellinger);
    }
    let n = a.n() as f64;
    Ok(BoundValue::new(
        Scope::PerSH,
        vec![
            ("hellinger", 2.0 / n * one_minus.ln()),
            ("chi_square", a.cs(s).ln_1p() / n),
            ("confidence", 3.0 / n * log_two_over(delta)),
        ],
    ))
}

/// Posterior-to-reference Renyi bound of order `beta`.
#[derive(Debug, Clone)]
pub struct ViallardBound {
    n: f64,
    delta: f64,
    divergence: Vec<f64>,
    constant: f64,
}

impl ViallardBound {
    /// Reference measure is the induced prior.
    pub fn new(a: &LearnerAnalysis, beta: f64, delta: f64) -> Result<Self> {
        Self::with_reference(a, beta, delta, a.induced_prior())
    }

    pub fn with_reference(a: &LearnerAnalysis, beta: f64, delta: f64, reference: &Distribution) -> Result<Self> {
        check_beta(beta)?;
        check_delta(delta)?;
        if reference.len() != a.hypothesis_count() {
            return Err(Error::SupportMismatch {
                left: reference.len(),
                right: a.hypothesis_count(),
            });
        }
        let divergence = (0..a.dataset_count())
            .map(|s| posterior_renyi(a, s, reference, beta))
            .collect::<Result<_>>()?;
        Ok(Self {
            n: a.n() as f64,
            delta,
            divergence,
            constant: (1.0 + beta / (beta - 1.0)) * log_two_over(delta),
        })
    }
}

impl PacBound for ViallardBound {
    fn name(&self) -> &'static str {
        "viallard"
    }
    fn scope(&self) -> Scope {
        Scope::PerS
    }
    fn delta(&self) -> f64 {
        self.delta
    }
    fn value(&self, s: usize, _h: usize) -> BoundValue {
        BoundValue::new(
            Scope::PerS,
            vec![
                ("posterior", self.divergence[s] / self.n),
                ("confidence", self.constant / self.n),
            ],
        )
    }
}

pub fn bound_viallard(a: &LearnerAnalysis, s: usize, beta: f64, delta: f64) -> Result<BoundValue> {
    check_beta(beta)?;
    check_delta(delta)?;
    let n = a.n() as f64;
    let d = posterior_renyi(a, s, a.induced_prior(), beta)?;
    Ok(BoundValue::new(
        Scope::PerS,
        vec![
            ("posterior", d / n),
            ("confidence", (1.0 + beta / (beta - 1.0)) * log_two_over(delta) / n),
        ],
    ))
}

/// A bound whose value does not depend on `(S, h)`.
#[derive(Debug, Clone)]
pub struct ConstantBound {
    name: &'static str,
    delta: f64,
    value: BoundValue,
    certified: bool,
}

impl ConstantBound {
    pub fn new(name: &'static str, delta: f64, value: BoundValue, certified: bool) -> Self {
        Self {
            name,
            delta,
            value,
            certified,
        }
    }

    pub fn value(&self) -> &BoundValue {
        &self.value
    }
}

impl PacBound for ConstantBound {
    fn name(&self) -> &'static str {
        self.name
    }
    fn scope(&self) -> Scope {
        self.value.scope
    }
    fn delta(&self) -> f64 {
        self.delta
    }
    fn value(&self, _s: usize, _h: usize) -> BoundValue {
        self.value.clone()
    }
    fn certified(&self) -> bool {
        self.certified
    }
}

/// `(I(S;h) + 1) / (n delta)`.
pub fn bound_little(a: &LearnerAnalysis, delta: f64) -> Result<BoundValue> {
    little_from(a.mutual_information(), a.n(), delta)
}

pub fn little_from(mi: f64, n: usize, delta: f64) -> Result<BoundValue> {
    check_delta(delta)?;
    let n = n as f64;
    Ok(BoundValue::new(
        Scope::Global,
        vec![("information", mi / (n * delta)), ("confidence", 1.0 / (n * delta))],
    ))
}

/// `I(S;h) / n`, a bound on the expected gap.
pub fn expected_gap_bound(a: &LearnerAnalysis) -> BoundValue {
    BoundValue::new(
        Scope::InExpectation,
        vec![("information", a.mutual_information() / a.n() as f64)],
    )
}

pub const CHERNOFF_T_LO: f64 = 1e-6;
pub const CHERNOFF_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffResult {
    pub epsilon: f64,
    pub t: f64,
    /// False when the minimum sits on the `t_max` boundary.
    pub attained: bool,
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..300 {
        if hi - lo <= 1e-13 * hi.abs().max(1e-300) {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimizes `(log C(t) - log delta) / t` over `[1e-6, t_max]`: a 64-point
/// log grid picks a bracket that golden-section search then refines.
pub fn minimize_chernoff<F: Fn(f64) -> Result<f64>>(log_mgf: F, delta: f64, t_max: f64) -> Result<ChernoffResult> {
    check_delta(delta)?;
    if !(t_max > CHERNOFF_T_LO) || !t_max.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_max",
            value: t_max,
            reason: "must be finite and above 1e-6",
        });
    }
    let log_delta = delta.ln();
    let f = |t: f64| match log_mgf(t) {
        Ok(v) => (v - log_delta) / t,
        Err(_) => f64::INFINITY,
    };
    let ratio = (t_max / CHERNOFF_T_LO).ln() / (CHERNOFF_GRID - 1) as f64;
    let grid: Vec<f64> = (0..CHERNOFF_GRID)
        .map(|i| {
            if i == CHERNOFF_GRID - 1 {
                t_max
            } else {
                CHERNOFF_T_LO * (ratio * i as f64).exp()
            }
        })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    if values[best] == f64::INFINITY {
        return Err(Error::InfiniteMgfEverywhere);
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(CHERNOFF_GRID - 1)];
    let (t_gs, v_gs) = golden_section(f, lo, hi);
    let (t, epsilon) = if v_gs < values[best] {
        (t_gs, v_gs)
    } else {
        (grid[best], values[best])
    };
    let attained = !(best == CHERNOFF_GRID - 1 || t >= t_max * (1.0 - 1e-9));
    Ok(ChernoffResult { epsilon, t, attained })
}

/// `inf_t (1/t) log(C_n(t) / delta)` for `t` in `(0, t_max]`.
pub fn bound_chernoff(a: &LearnerAnalysis, delta: f64, t_max: f64) -> Result<(BoundValue, ChernoffResult)> {
    let r = minimize_chernoff(|t| a.log_mgf(t), delta, t_max)?;
    let log_c = a.log_mgf(r.t)?;
    Ok((
        BoundValue::new(
            Scope::Global,
            vec![("mgf", log_c / r.t), ("confidence", -delta.ln() / r.t)],
        ),
        r,
    ))
}

/// `(1/n) log(|H| / delta)`.
pub fn bound_finite_h(h_count: usize, n: usize, delta: f64) -> Result<BoundValue> {
    check_delta(delta)?;
    if h_count == 0 {
        return Err(Error::EmptyHypothesisSet);
    }
    let n = n as f64;
    Ok(BoundValue::new(
        Scope::Global,
        vec![
            ("hypotheses", (h_count as f64).ln() / n),
            ("confidence", -delta.ln() / n),
        ],
    ))
}

/// Lambda grid `{0.1, 0.2, ..., 4.0}` used to fit and certify the
/// subgaussian proxy.
pub fn subgaussian_lambdas() -> Vec<f64> {
    (1..=40).map(|i| i as f64 / 10.0).collect()
}

/// Smallest `sigma` with `log C_n(lambda n) <= lambda n E[gap] + lambda^2 sigma^2 / 2`
/// on the lambda grid.
pub fn fit_sigma(a: &LearnerAnalysis) -> Result<f64> {
    let n = a.n() as f64;
    let mean = a.expected_gap();
    let mut s2: f64 = 0.0;
    for lambda in subgaussian_lambdas() {
        let excess = a.log_mgf(lambda * n)? - lambda * n * mean;
        s2 = s2.max(2.0 * excess / (lambda * lambda));
    }
    Ok(s2.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgaussianCertificate {
    pub sigma: f64,
    pub holds: bool,
    /// Lambdas where the inequality fails, with the excess.
    pub violations: Vec<(f64, f64)>,
}

pub fn subgaussian_certificate(a: &LearnerAnalysis, sigma: f64) -> Result<SubgaussianCertificate> {
    let n = a.n() as f64;
    let mean = a.expected_gap();
    let mut violations = Vec::new();
    for lambda in subgaussian_lambdas() {
        let lhs = a.log_mgf(lambda * n)?;
        let rhs = lambda * n * mean + lambda * lambda * sigma * sigma / 2.0;
        // Relative slack absorbs rounding when sigma was fitted at this lambda.
        if lhs > rhs + 1e-12 * (1.0 + rhs.abs()) {
            violations.push((lambda, lhs - rhs));
        }
    }
    Ok(SubgaussianCertificate {
        sigma,
        holds: violations.is_empty(),
        violations,
    })
}

/// The certificate covers the tail at level `delta` only when the
/// optimal Chernoff parameter `sqrt(2 log(1/delta)) / sigma` lies on the
/// certified lambda range.
pub fn subgaussian_is_certified(a: &LearnerAnalysis, sigma: f64, delta: f64) -> Result<bool> {
    if !subgaussian_certificate(a, sigma)?.holds {
        return Ok(false);
    }
    let lambdas = subgaussian_lambdas();
    let optimal = (2.0 * (1.0 / delta).ln()).sqrt() / sigma;
    Ok(optimal >= lambdas[0] && optimal <= lambdas[lambdas.len() - 1])
}

/// `I(S;h)/n + sqrt(2 sigma^2 log(1/delta)) / n`.
pub fn bound_subgaussian(a: &LearnerAnalysis, sigma: f64, delta: f64) -> Result<BoundValue> {
    subgaussian_from(a.mutual_information(), a.n(), sigma, delta)
}

pub fn subgaussian_from(mi: f64, n: usize, sigma: f64, delta: f64) -> Result<BoundValue> {
    check_delta(delta)?;
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma",
            value: sigma,
            reason: "must be nonnegative",
        });
    }
    let n = n as f64;
    Ok(BoundValue::new(
        Scope::Global,
        vec![
            ("information", mi / n),
            ("deviation", (2.0 * sigma * sigma * (1.0 / delta).ln()).sqrt() / n),
        ],
    ))
}

/// `g(delta, nu) = inf_{0<lambda<1} (1/lambda) (-(nu/2) log(1 - lambda) + log(1/delta))`.
pub fn regular_g(delta: f64, nu: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(nu >= 1.0) || !nu.is_finite() {
        return Err(Error::InvalidParameter {
            name: "nu",
            value: nu,
            reason: "must be finite and at least 1",
        });
    }
    if delta == 1.0 {
        // The objective increases from its lambda -> 0 limit.
        return Ok(nu / 2.0);
    }
    let c = -delta.ln();
    let f = |l: f64| (-(nu / 2.0) * (-l).ln_1p() + c) / l;
    Ok(golden_section(f, 1e-6, 1.0 - 1e-6).1)
}

/// `g(delta, nu) / n` for a likelihood ratio that is asymptotically chi-square.
pub fn bound_regular(nu: f64, delta: f64, n: usize) -> Result<BoundValue> {
    let g = regular_g(delta, nu)?;
    Ok(BoundValue::new(Scope::Global, vec![("regular", g / n as f64)]))
}

/// Risk bound implied by a gap bound: `(1 - e^{-CE_S}) + e^{-CE_S} eps`.
pub fn risk_bound_convert(ce_s: f64, epsilon: f64) -> f64 {
    let w = (-ce_s).exp();
    if w == 0.0 {
        return 1.0;
    }
    (1.0 - w) + w * epsilon
}

/// `delta + P(CE_S(h) > eps)`, an upper bound on `P(|gap| > eps)` given a
/// one-sided bound at level `delta`.
pub fn abs_gap_bound(a: &LearnerAnalysis, epsilon: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let mut acc = LogSumExp::new();
    for s in 0..a.dataset_count() {
        for h in 0..a.hypothesis_count() {
            if a.ce_s(s, h) > epsilon {
                acc.push(a.log_joint(s, h));
            }
        }
    }
    Ok(delta + acc.value().exp())
}

/// Mutual-information bound on the 0-1 gap, for comparison only.
pub fn literature_bassily(a: &LearnerAnalysis, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let n = a.n() as f64;
    Ok(((a.mutual_information() + 1.0 + delta) / (2.0 * n * delta)).sqrt())
}

/// Sibson alpha-information bound on the 0-1 gap, for comparison only.
pub fn literature_esposito(a: &LearnerAnalysis, alpha: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    check_alpha(alpha)?;
    esposito_from(a.sibson_mi(alpha)?, a.n(), alpha, delta)
}

pub fn esposito_from(sibson: f64, n: usize, alpha: f64, delta: f64) -> Result<f64> {
    let inner = sibson + 2f64.ln() - alpha / (alpha - 1.0) * delta.ln();
    Ok((inner.max(0.0) / (2.0 * n as f64)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundName {
    Bayes,
    HellChi,
    Viallard,
    Little,
    Chernoff,
    FiniteH,
    Subgaussian,
    Regular,
    Bassily,
    Esposito,
}

impl BoundName {
    pub const ALL: [BoundName; 10] = [
        BoundName::Bayes,
        BoundName::HellChi,
        BoundName::Viallard,
        BoundName::Little,
        BoundName::Chernoff,
        BoundName::FiniteH,
        BoundName::Subgaussian,
        BoundName::Regular,
        BoundName::Bassily,
        BoundName::Esposito,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundName::Bayes => "bayes",
            BoundName::HellChi => "hellchi",
            BoundName::Viallard => "viallard",
            BoundName::Little => "little",
            BoundName::Chernoff => "chernoff",
            BoundName::FiniteH => "finite_h",
            BoundName::Subgaussian => "subgaussian",
            BoundName::Regular => "regular",
            BoundName::Bassily => "bassily",
            BoundName::Esposito => "esposito",
        }
    }

    /// Bounds on the 0-1 gap, not the cross-entropy gap.
    pub fn is_comparison(self) -> bool {
        matches!(self, BoundName::Bassily | BoundName::Esposito)
    }

    /// Evaluable without enumerating the dataset space.
    pub fn needs_analysis(self) -> bool {
        !matches!(self, BoundName::FiniteH | BoundName::Regular)
    }

    /// Parses a comma-separated list; `all` expands to every bound.
    pub fn parse_list(s: &str) -> Result<Vec<BoundName>> {
        if s.trim() == "all" {
            return Ok(Self::ALL.to_vec());
        }
        s.split(',').map(|p| p.trim().parse()).collect()
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::Spec(format!("unknown bound `{s}`")))
    }
}

/// Builds an evaluator over a finished analysis.
pub fn build_bound(name: BoundName, a: &LearnerAnalysis, p: &BoundParams) -> Result<Box<dyn PacBound>> {
    p.validate()?;
    let delta = p.delta;
    let n = a.n();
    Ok(match name {
        BoundName::Bayes => Box::new(BayesBound::new(a, p.alpha, p.beta, delta)?),
        BoundName::HellChi => Box::new(HellChiBound::new(a, delta, p.expected_cs)?),
        BoundName::Viallard => Box::new(ViallardBound::new(a, p.beta, delta)?),
        BoundName::Little => Box::new(ConstantBound::new("little", delta, bound_little(a, delta)?, true)),
        BoundName::Chernoff => {
            let (v, _) = bound_chernoff(a, delta, p.t_max_for(n))?;
            Box::new(ConstantBound::new("chernoff", delta, v, true))
        }
        BoundName::FiniteH => Box::new(ConstantBound::new(
            "finite_h",
            delta,
            bound_finite_h(a.hypothesis_count(), n, delta)?,
            true,
        )),
        BoundName::Subgaussian => {
            let sigma = match p.sigma {
                Sigma::Auto => fit_sigma(a)?,
                Sigma::Value(v) => v,
            };
            Box::new(ConstantBound::new(
                "subgaussian",
                delta,
                bound_subgaussian(a, sigma, delta)?,
                subgaussian_is_certified(a, sigma, delta)?,
            ))
        }
        BoundName::Regular => Box::new(ConstantBound::new(
            "regular",
            delta,
            bound_regular(p.nu, delta, n)?,
            false,
        )),
        BoundName::Bassily => Box::new(ConstantBound::new(
            "bassily",
            delta,
            BoundValue::new(Scope::Global, vec![("bassily", literature_bassily(a, delta)?)]),
            false,
        )),
        BoundName::Esposito => Box::new(ConstantBound::new(
            "esposito",
            delta,
            BoundValue::new(
                Scope::Global,
                vec![("esposito", literature_esposito(a, p.alpha, delta)?)],
            ),
            false,
        )),
    })
}

/// Evaluators for bounds that need no enumeration.
pub fn build_global_bound(name: BoundName, h_count: usize, n: usize, p: &BoundParams) -> Result<Box<dyn PacBound>> {
    p.validate()?;
    match name {
        BoundName::FiniteH => Ok(Box::new(ConstantBound::new(
            "finite_h",
            p.delta,
            bound_finite_h(h_count, n, p.delta)?,
            true,
        ))),
        BoundName::Regular => Ok(Box::new(ConstantBound::new(
            "regular",
            p.delta,
            bound_regular(p.nu, p.delta, n)?,
            false,
        ))),
        other => Err(Error::Spec(format!("bound `{other}` needs an exact analysis"))),
    }
}
