//! Single-study evidence: p → t inversion, the JZS Bayes factor (computed
//! both as an integral over the mixing variance g and as a marginal
//! likelihood over the effect size δ), posterior probability and Jeffreys
//! label.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    cauchy_pdf, cauchy_pdf_unchecked, integrate_with, student_t_upper_quantile, Interval, NoncentralT,
    QuadratureOptions,
};

pub const DEFAULT_CAUCHY_SCALE: f64 = FRAC_1_SQRT_2;
pub const DEFAULT_REL_TOL: f64 = 1e-8;
/// Smallest p-value accepted by [`t_from_p`].
pub const MIN_P_VALUE: f64 = 1e-300;
/// Relative disagreement between the two Bayes factor routes that
/// [`analyze_study`] tolerates.
pub const CROSS_CHECK_TOL: f64 = 1e-4;

/// Offsets, in units of the likelihood width 1/√N0, at which the effect-size
/// integral is pre-split.
const PEAK_OFFSETS: [f64; 9] = [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0];
/// Integrand terms more than this many log units below the peak are dropped.
const LOG_UNDERFLOW: f64 = 745.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    #[default]
    TwoSided,
    OneSided,
}

impl fmt::Display for Sidedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sidedness::TwoSided => "two-sided",
            Sidedness::OneSided => "one-sided",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Design {
    /// Two groups of `n` subjects each.
    TwoSampleEqualArms,
    /// Two groups of `n` and `n2` subjects.
    TwoSampleUnequal { n2: u32 },
    OneSample,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Statistic {
    PValue(f64),
    TValue(f64),
}

impl Statistic {
    pub fn p_value(&self) -> Option<f64> {
        match *self {
            Statistic::PValue(p) => Some(p),
            Statistic::TValue(_) => None,
        }
    }

    pub fn t_value(&self) -> Option<f64> {
        match *self {
            Statistic::TValue(t) => Some(t),
            Statistic::PValue(_) => None,
        }
    }
}

/// One trial arm's published summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRecord {
    pub trial: String,
    pub arm: String,
    pub n: u32,
    pub stat: Statistic,
    pub design: Design,
}

impl StudyRecord {
    pub fn new(
        trial: impl Into<String>,
        arm: impl Into<String>,
        n: u32,
        stat: Statistic,
        design: Design,
    ) -> Result<Self> {
        let record = StudyRecord {
            trial: trial.into(),
            arm: arm.into(),
            n,
            stat,
            design,
        };
        record.validate()?;
        Ok(record)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Validation(format!(
                "{}.{}: n must be at least 2, got {}",
                self.trial, self.arm, self.n
            )));
        }
        if let Design::TwoSampleUnequal { n2 } = self.design {
            if n2 < 1 {
                return Err(Error::Validation(format!(
                    "{}.{}: second arm must be non-empty",
                    self.trial, self.arm
                )));
            }
        }
        match self.stat {
            Statistic::PValue(p) if !(p > 0.0 && p < 1.0) => Err(Error::Validation(format!(
                "{}.{}: p out of range (0, 1): {p}",
                self.trial, self.arm
            ))),
            Statistic::TValue(t) if !t.is_finite() => Err(Error::Validation(format!(
                "{}.{}: t must be finite, got {t}",
                self.trial, self.arm
            ))),
            _ => Ok(()),
        }
    }
}

/// Inferential quantities derived from a [`StudyRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestSummary {
    pub t: f64,
    /// Degrees of freedom used when inverting a p-value.
    pub nu_inversion: f64,
    /// Degrees of freedom of the t likelihood inside the Bayes factor.
    pub nu_bf: f64,
    /// Effective sample size N0; the noncentrality is δ√N0.
    pub n_eff: f64,
}

impl TTestSummary {
    pub fn new(t: f64, nu_inversion: f64, nu_bf: f64, n_eff: f64) -> Result<Self> {
        let s = TTestSummary {
            t,
            nu_inversion,
            nu_bf,
            n_eff,
        };
        s.validate()?;
        Ok(s)
    }

    /// Two-sample summary for arms of size n1 and n2.
    pub fn two_sample(t: f64, n1: u32, n2: u32) -> Result<Self> {
        let (n1, n2) = (n1 as f64, n2 as f64);
        let nu = n1 + n2 - 2.0;
        Self::new(t, nu, nu, n1 * n2 / (n1 + n2))
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !self.t.is_finite() {
            return Err(Error::domain(format!("t must be finite, got {}", self.t)));
        }
        if !(ok(self.nu_inversion) && ok(self.nu_bf) && ok(self.n_eff)) {
            return Err(Error::domain(format!(
                "degrees of freedom and effective sample size must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub cauchy_scale: f64,
    pub prior_h1: f64,
    pub sidedness: Sidedness,
    pub rel_tol: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            cauchy_scale: DEFAULT_CAUCHY_SCALE,
            prior_h1: 0.5,
            sidedness: Sidedness::TwoSided,
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cauchy_scale > 0.0 && self.cauchy_scale.is_finite()) {
            return Err(Error::domain(format!(
                "Cauchy scale must be positive, got {}",
                self.cauchy_scale
            )));
        }
        if !(0.0..=1.0).contains(&self.prior_h1) {
            return Err(Error::domain(format!(
                "prior probability of H1 must lie in [0, 1], got {}",
                self.prior_h1
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::domain(format!(
                "relative tolerance must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strength {
    Anecdotal,
    Moderate,
    Strong,
    VeryStrong,
    Extreme,
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strength::Anecdotal => "anecdotal",
            Strength::Moderate => "moderate",
            Strength::Strong => "strong",
            Strength::VeryStrong => "very strong",
            Strength::Extreme => "extreme",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    FavorsH1,
    FavorsH0,
    ExactlyEven,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceLabel {
    pub strength: Strength,
    pub direction: Direction,
}

impl fmt::Display for EvidenceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.direction {
            Direction::FavorsH1 => write!(f, "{} evidence for H1", self.strength),
            Direction::FavorsH0 => write!(f, "{} evidence for H0", self.strength),
            Direction::ExactlyEven => write!(f, "{} evidence, even odds", self.strength),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesFactorResult {
    pub bf10: f64,
    pub bf01: f64,
    pub ln_bf10: f64,
    /// Absolute error estimate on `bf10` from the quadrature.
    pub quadrature_error: f64,
    pub posterior_h1: f64,
    pub label: EvidenceLabel,
}

impl BayesFactorResult {
    pub(crate) fn from_ln_bf10(ln_bf10: f64, rel_error: f64, prior_h1: f64) -> Result<Self> {
        let bf10 = ln_bf10.exp();
        let bf01 = (-ln_bf10).exp();
        if !(bf10 > 0.0 && bf10.is_finite() && bf01 > 0.0 && bf01.is_finite()) {
            return Err(Error::Overflow(format!(
                "Bayes factor exp({ln_bf10}) is not representable"
            )));
        }
        Ok(BayesFactorResult {
            bf10,
            bf01,
            ln_bf10,
            quadrature_error: rel_error * bf10,
            posterior_h1: posterior_prob(bf10, prior_h1)?,
            label: classify_evidence(bf10)?,
        })
    }
}

/// A Bayes factor on the log scale with the quadrature's relative error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBayesFactor {
    pub ln_bf10: f64,
    pub rel_error: f64,
}

/// Recovers |t| from a p-value by inverting the Student-t distribution.
pub fn t_from_p(p: f64, nu: f64, sidedness: Sidedness) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p out of range (0, 1): {p}")));
    }
    if p <= MIN_P_VALUE {
        return Err(Error::Overflow(format!(
            "p = {p:e} is below {MIN_P_VALUE:e}; t would not be representable"
        )));
    }
    let tail = match sidedness {
        Sidedness::TwoSided => 0.5 * p,
        Sidedness::OneSided => p,
    };
    if tail >= 0.5 {
        // one-sided p ≥ ½ carries no evidence of a positive effect
        return Ok(0.0);
    }
    student_t_upper_quantile(tail, nu)
}

pub fn summarize(record: &StudyRecord, config: &AnalysisConfig) -> Result<TTestSummary> {
    record.validate()?;
    let n = record.n as f64;
    let (nu_inversion, nu_bf, n_eff) = match record.design {
        Design::TwoSampleEqualArms => (n - 1.0, 2.0 * n - 2.0, n / 2.0),
        Design::TwoSampleUnequal { n2 } => {
            let n2 = n2 as f64;
            let nu = n + n2 - 2.0;
            (nu, nu, n * n2 / (n + n2))
        }
        Design::OneSample => (n - 1.0, n - 1.0, n),
    };
    let t = match record.stat {
        Statistic::TValue(t) => t,
        Statistic::PValue(p) => t_from_p(p, nu_inversion, config.sidedness)?,
    };
    TTestSummary::new(t, nu_inversion, nu_bf, n_eff)
}

fn check_scale(r: f64) -> Result<()> {
    cauchy_pdf(0.0, r).map(|_| ())
}

/// BF01 from the integral over the prior variance g (inverse-gamma(½, r²/2)
/// mixing of a normal prior on δ).
pub fn jzs_bf_g_form(t: f64, summary: &TTestSummary, r: f64) -> Result<f64> {
    let lb = jzs_ln_bf10_g(t, summary, r, DEFAULT_REL_TOL)?;
    Ok((-lb.ln_bf10).exp())
}

/// BF10 as the Cauchy-weighted noncentral-t marginal likelihood over the
/// central-t likelihood.
pub fn jzs_bf_delta_form(t: f64, summary: &TTestSummary, r: f64) -> Result<f64> {
    let lb = jzs_ln_bf10_delta(t, summary, r, DEFAULT_REL_TOL)?;
    Ok(lb.ln_bf10.exp())
}

pub fn jzs_ln_bf10_g(
    t: f64,
    summary: &TTestSummary,
    r: f64,
    rel_tol: f64,
) -> Result<LogBayesFactor> {
    summary.validate()?;
    check_scale(r)?;
    if !t.is_finite() {
        return Err(Error::domain(format!("t must be finite, got {t}")));
    }
    let nu = summary.nu_bf;
    let n0 = summary.n_eff;
    let t2 = t * t;
    let ln_null = (t2 / nu).ln_1p();
    // log of the g-likelihood relative to the null likelihood
    let ln_lik = |g: f64| {
        let spread = n0 * g;
        -0.5 * spread.ln_1p() - 0.5 * (nu + 1.0) * ((t2 / ((1.0 + spread) * nu)).ln_1p() - ln_null)
    };
    let ln_norm = r.ln() - 0.5 * (2.0 * PI).ln();
    let ln_prior = |g: f64| ln_norm - 1.5 * g.ln() - r * r / (2.0 * g);

    // The likelihood peaks near 1 + N0·g = t², the prior at g = r²/3.
    let g_peak = ((t2 - 1.0) / n0).max(0.0);
    let ln_ref = if g_peak > 0.0 { ln_lik(g_peak) } else { 0.0 };
    let mut cuts = vec![r * r / 3.0];
    if g_peak > 0.0 {
        cuts.extend([0.25, 0.5, 1.0, 2.0, 4.0].iter().map(|k| k * g_peak));
    }
    let integrand = |g: f64| {
        if g <= 0.0 {
            return 0.0;
        }
        let v = ln_lik(g) + ln_prior(g) - ln_ref;
        if v < -LOG_UNDERFLOW {
            0.0
        } else {
            v.exp()
        }
    };
    let q = integrate_with(
        integrand,
        Interval::HalfLinePositive,
        &cuts,
        QuadratureOptions::with_rel_tol(rel_tol),
    )?;
    finish(q.value, q.abs_error_estimate, ln_ref)
}

pub fn jzs_ln_bf10_delta(
    t: f64,
    summary: &TTestSummary,
    r: f64,
    rel_tol: f64,
) -> Result<LogBayesFactor> {
    summary.validate()?;
    check_scale(r)?;
    if !t.is_finite() {
        return Err(Error::domain(format!("t must be finite, got {t}")));
    }
    let study = Likelihood::new(t.abs(), summary.nu_bf, summary.n_eff)?;
    marginal_over_cauchy(
        std::slice::from_ref(&study),
        r,
        EffectSupport::RealLine,
        rel_tol,
    )
}

/// Support of the Cauchy prior on δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EffectSupport {
    #[default]
    RealLine,
    /// Cauchy truncated to δ > 0 (and renormalised).
    PositiveHalfLine,
}

/// One study's noncentral-t likelihood in δ, relative to δ = 0.
pub(crate) struct Likelihood {
    t: f64,
    sqrt_n0: f64,
    kernel: NoncentralT,
}

impl Likelihood {
    pub(crate) fn new(t: f64, nu: f64, n0: f64) -> Result<Self> {
        Ok(Likelihood {
            t,
            sqrt_n0: n0.sqrt(),
            kernel: NoncentralT::new(nu)?,
        })
    }

    fn ln_ratio_bound(&self, delta: f64) -> f64 {
        self.kernel.ln_ratio_bound(self.t, delta * self.sqrt_n0)
    }

    fn ln_ratio(&self, delta: f64) -> Result<f64> {
        self.kernel.ln_ratio(self.t, delta * self.sqrt_n0)
    }
}

/// ln of ∫ ∏ᵢ [fᵢ(tᵢ | δ) / fᵢ(tᵢ | 0)] · Cauchy(δ; r) dδ.
pub(crate) fn marginal_over_cauchy(
    studies: &[Likelihood],
    r: f64,
    support: EffectSupport,
    rel_tol: f64,
) -> Result<LogBayesFactor> {
    // Normal approximation of the pooled likelihood in δ.
    let precision: f64 = studies.iter().map(|s| s.sqrt_n0 * s.sqrt_n0).sum();
    let centre = studies.iter().map(|s| s.t * s.sqrt_n0).sum::<f64>() / precision;
    let width = 1.0 / precision.sqrt();

    let ln_lik = |delta: f64, floor: f64| -> Result<Option<f64>> {
        let bound: f64 = studies.iter().map(|s| s.ln_ratio_bound(delta)).sum();
        if bound < floor {
            return Ok(None);
        }
        let mut acc = 0.0;
        for s in studies {
            acc += s.ln_ratio(delta)?;
        }
        Ok(Some(acc))
    };
    let ref_point = match support {
        EffectSupport::RealLine => centre,
        EffectSupport::PositiveHalfLine => centre.max(0.0),
    };
    let ln_ref = ln_lik(ref_point, f64::NEG_INFINITY)?.unwrap_or(0.0);
    let floor = ln_ref - LOG_UNDERFLOW;

    let (domain, prior_mass) = match support {
        EffectSupport::RealLine => (Interval::RealLine, 1.0),
        EffectSupport::PositiveHalfLine => (Interval::HalfLinePositive, 0.5),
    };
    let cuts: Vec<f64> = PEAK_OFFSETS
        .iter()
        .map(|k| centre + k * width)
        .chain(std::iter::once(r))
        .collect();

    let mut failure: Option<Error> = None;
    let integrand = |delta: f64| match ln_lik(delta, floor) {
        Ok(Some(v)) => (v - ln_ref).exp() * cauchy_pdf_unchecked(delta, r) / prior_mass,
        Ok(None) => 0.0,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let q = integrate_with(
        integrand,
        domain,
        &cuts,
        QuadratureOptions::with_rel_tol(rel_tol),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let q = q?;
    finish(q.value, q.abs_error_estimate, ln_ref)
}

fn finish(value: f64, abs_error: f64, ln_ref: f64) -> Result<LogBayesFactor> {
    if !(value > 0.0) {
        return Err(Error::Overflow(
            "marginal likelihood underflowed to zero".to_string(),
        ));
    }
    Ok(LogBayesFactor {
        ln_bf10: ln_ref + value.ln(),
        rel_error: abs_error / value,
    })
}

/// P(H1 | data) from BF10 and the prior probability of H1.
pub fn posterior_prob(bf10: f64, prior_h1: f64) -> Result<f64> {
    if !(bf10 > 0.0) || bf10.is_nan() {
        return Err(Error::domain(format!("BF10 must be positive, got {bf10}")));
    }
    if !(0.0..=1.0).contains(&prior_h1) {
        return Err(Error::domain(format!(
            "prior probability of H1 must lie in [0, 1], got {prior_h1}"
        )));
    }
    if bf10.is_infinite() {
        return Ok(if prior_h1 > 0.0 { 1.0 } else { 0.0 });
    }
    let weighted = bf10 * prior_h1;
    Ok(weighted / (weighted + (1.0 - prior_h1)))
}

/// Jeffreys label: bins [1,3), [3,10), [10,30), [30,100), [100,∞) on
/// max(BF10, 1/BF10).
pub fn classify_evidence(bf10: f64) -> Result<EvidenceLabel> {
    if !(bf10 > 0.0) || !bf10.is_finite() {
        return Err(Error::domain(format!(
            "BF10 must be positive and finite, got {bf10}"
        )));
    }
    let magnitude = bf10.max(1.0 / bf10);
    let strength = if magnitude < 3.0 {
        Strength::Anecdotal
    } else if magnitude < 10.0 {
        Strength::Moderate
    } else if magnitude < 30.0 {
        Strength::Strong
    } else if magnitude < 100.0 {
        Strength::VeryStrong
    } else {
        Strength::Extreme
    };
    let ln = bf10.ln();
    let direction = if ln > 0.0 {
        Direction::FavorsH1
    } else if ln < 0.0 {
        Direction::FavorsH0
    } else {
        Direction::ExactlyEven
    };
    Ok(EvidenceLabel {
        strength,
        direction,
    })
}

pub fn analyze_summary(summary: &TTestSummary, config: &AnalysisConfig) -> Result<BayesFactorResult> {
    config.validate()?;
    let delta = jzs_ln_bf10_delta(summary.t, summary, config.cauchy_scale, config.rel_tol)?;
    let g = jzs_ln_bf10_g(summary.t, summary, config.cauchy_scale, config.rel_tol)?;
    let disagreement = (delta.ln_bf10 - g.ln_bf10).exp_m1().abs();
    if disagreement > CROSS_CHECK_TOL {
        return Err(Error::InternalConsistency(format!(
            "effect-size and g-prior routes disagree: ln BF10 {} vs {} (relative {disagreement:e})",
            delta.ln_bf10, g.ln_bf10
        )));
    }
    BayesFactorResult::from_ln_bf10(delta.ln_bf10, delta.rel_error, config.prior_h1)
}

/// Full single-study pipeline.
pub fn analyze_study(record: &StudyRecord, config: &AnalysisConfig) -> Result<BayesFactorResult> {
    config.validate()?;
    let summary = summarize(record, config)?;
    analyze_summary(&summary, config)
}
