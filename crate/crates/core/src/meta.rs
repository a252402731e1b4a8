//! Common-effect meta-analytic Bayes factor across independent studies.

use serde::{Deserialize, Serialize};

use crate::engine::{
    marginal_over_cauchy, posterior_prob, EffectSupport, Likelihood, TTestSummary,
    DEFAULT_CAUCHY_SCALE, DEFAULT_REL_TOL,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MetaInput {
    pub studies: Vec<TTestSummary>,
    pub cauchy_scale: f64,
    pub support: EffectSupport,
    pub prior_h1: f64,
    pub rel_tol: f64,
}

impl MetaInput {
    pub fn new(studies: Vec<TTestSummary>, cauchy_scale: f64) -> Self {
        MetaInput {
            studies,
            cauchy_scale,
            support: EffectSupport::RealLine,
            prior_h1: 0.5,
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

impl Default for MetaInput {
    fn default() -> Self {
        MetaInput::new(Vec::new(), DEFAULT_CAUCHY_SCALE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetaResult {
    pub bf10: f64,
    pub bf01: f64,
    pub ln_bf10: f64,
    pub posterior_h1: f64,
    /// Absolute error estimate on `bf10`.
    pub quadrature_error: f64,
}

/// Bayes factor for a single δ shared by every study against δ = 0:
///
/// ```text
/// BF10 = ∫ ∏ⱼ f(tⱼ; νⱼ, δ√N0ⱼ) · Cauchy(δ; r) dδ / ∏ⱼ f(tⱼ; νⱼ, 0)
/// ```
///
/// The product is accumulated as a sum of log likelihood ratios.
pub fn meta_bf(input: &MetaInput) -> Result<MetaResult> {
    if input.studies.is_empty() {
        return Err(Error::domain("meta-analysis needs at least one study"));
    }
    for s in &input.studies {
        s.validate()?;
    }

    // Canonical order makes the result independent of input order.
    let mut studies: Vec<(f64, f64, f64)> = input
        .studies
        .iter()
        .map(|s| (s.t, s.nu_bf, s.n_eff))
        .collect();
    if input.support == EffectSupport::RealLine {
        // A symmetric prior makes the sign of the pooled effect irrelevant.
        let pooled: f64 = studies.iter().map(|&(t, _, n0)| t * n0.sqrt()).sum();
        if pooled < 0.0 {
            for s in &mut studies {
                s.0 = -s.0;
            }
        }
    }
    studies.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
    });

    let likelihoods = studies
        .iter()
        .map(|&(t, nu, n0)| Likelihood::new(t, nu, n0))
        .collect::<Result<Vec<_>>>()?;
    let lb = marginal_over_cauchy(&likelihoods, input.cauchy_scale, input.support, input.rel_tol)?;

    let bf10 = lb.ln_bf10.exp();
    let bf01 = (-lb.ln_bf10).exp();
    if !(bf10 > 0.0 && bf10.is_finite() && bf01 > 0.0 && bf01.is_finite()) {
        return Err(Error::Overflow(format!(
            "meta-analytic Bayes factor exp({}) is not representable",
            lb.ln_bf10
        )));
    }
    Ok(MetaResult {
        bf10,
        bf01,
        ln_bf10: lb.ln_bf10,
        posterior_h1: posterior_prob(bf10, input.prior_h1)?,
        quadrature_error: lb.rel_error * bf10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::jzs_bf_delta_form;

    fn pair_high() -> Vec<TTestSummary> {
        vec![
            TTestSummary::new(2.52, 546.0, 1092.0, 273.5).unwrap(),
            TTestSummary::new(0.23, 554.0, 1108.0, 277.5).unwrap(),
        ]
    }

    #[test]
    fn high_dose_pair() {
        let r = meta_bf(&MetaInput::new(pair_high(), DEFAULT_CAUCHY_SCALE)).unwrap();
        assert!((r.bf10 - 0.29).abs() < 0.02, "{}", r.bf10);
        // reference value from scipy.stats.nct + scipy.integrate.quad
        assert!(((r.bf10 - 0.307_753_541_878_235_34) / r.bf10).abs() < 1e-7, "{}", r.bf10);
        assert!((r.bf10 * r.bf01 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn low_dose_pair() {
        let studies = vec![
            TTestSummary::new(1.69, 542.0, 1084.0, 271.5).unwrap(),
            TTestSummary::new(1.17, 546.0, 1092.0, 273.5).unwrap(),
        ];
        let r = meta_bf(&MetaInput::new(studies, DEFAULT_CAUCHY_SCALE)).unwrap();
        assert!((r.bf10 - 0.38).abs() < 0.02, "{}", r.bf10);
        assert!(((r.bf10 - 0.365_982_959_182_417_86) / r.bf10).abs() < 1e-7, "{}", r.bf10);
        assert!((r.posterior_h1 - 0.27).abs() < 0.01);
    }

    #[test]
    fn singleton_matches_single_study() {
        let s = pair_high()[0];
        let r = meta_bf(&MetaInput::new(vec![s], DEFAULT_CAUCHY_SCALE)).unwrap();
        let single = jzs_bf_delta_form(s.t, &s, DEFAULT_CAUCHY_SCALE).unwrap();
        assert!(((r.bf10 - single) / single).abs() < 1e-6);
    }

    #[test]
    fn half_line_prior_roughly_doubles_high_dose() {
        let mut input = MetaInput::new(pair_high(), DEFAULT_CAUCHY_SCALE);
        let full = meta_bf(&input).unwrap().bf10;
        input.support = EffectSupport::PositiveHalfLine;
        let half = meta_bf(&input).unwrap().bf10;
        assert!(half > 1.8 * full && half < 2.0 * full, "{half} vs {full}");
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(meta_bf(&MetaInput::default()).is_err());
    }
}
