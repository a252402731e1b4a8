//! Python bindings for the `jzs_core` Bayes factor engine.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use jzs_core::engine::{
    self, AnalysisConfig, Design, EffectSupport, Sidedness, Statistic, StudyRecord,
    DEFAULT_CAUCHY_SCALE,
};
use jzs_core::io::{self, DataFormat, MetaGroup, ReportFormat};
use jzs_core::meta::{self, MetaInput};
use jzs_core::Error;

fn to_py(e: Error) -> PyErr {
    match e.exit_code() {
        3 => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn sidedness(two_sided: bool) -> Sidedness {
    if two_sided {
        Sidedness::TwoSided
    } else {
        Sidedness::OneSided
    }
}

/// Summary statistics of one t-test as used by the Bayes factor.
#[pyclass(frozen, get_all, from_py_object, module = "jzs_bayes")]
#[derive(Clone, Copy)]
struct TTestSummary {
    t: f64,
    nu_inversion: f64,
    nu_bf: f64,
    n_eff: f64,
}

#[pymethods]
impl TTestSummary {
    #[new]
    fn new(t: f64, nu_inversion: f64, nu_bf: f64, n_eff: f64) -> PyResult<Self> {
        engine::TTestSummary::new(t, nu_inversion, nu_bf, n_eff)
            .map(Self::from)
            .map_err(to_py)
    }

    /// Two independent groups of sizes `n1` and `n2`.
    #[staticmethod]
    fn two_sample(t: f64, n1: u32, n2: u32) -> PyResult<Self> {
        engine::TTestSummary::two_sample(t, n1, n2)
            .map(Self::from)
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "TTestSummary(t={}, nu_inversion={}, nu_bf={}, n_eff={})",
            self.t, self.nu_inversion, self.nu_bf, self.n_eff
        )
    }
}

impl From<engine::TTestSummary> for TTestSummary {
    fn from(s: engine::TTestSummary) -> Self {
        TTestSummary {
            t: s.t,
            nu_inversion: s.nu_inversion,
            nu_bf: s.nu_bf,
            n_eff: s.n_eff,
        }
    }
}

impl From<TTestSummary> for engine::TTestSummary {
    fn from(s: TTestSummary) -> Self {
        engine::TTestSummary {
            t: s.t,
            nu_inversion: s.nu_inversion,
            nu_bf: s.nu_bf,
            n_eff: s.n_eff,
        }
    }
}

#[pyclass(frozen, get_all, module = "jzs_bayes")]
struct BayesFactorResult {
    bf10: f64,
    bf01: f64,
    ln_bf10: f64,
    quadrature_error: f64,
    posterior_h1: f64,
    /// Evidence label such as "anecdotal evidence for H1".
    label: String,
}

#[pymethods]
impl BayesFactorResult {
    fn __repr__(&self) -> String {
        format!(
            "BayesFactorResult(bf10={}, posterior_h1={}, label={:?})",
            self.bf10, self.posterior_h1, self.label
        )
    }
}

#[pyclass(frozen, get_all, module = "jzs_bayes")]
struct MetaResult {
    bf10: f64,
    bf01: f64,
    ln_bf10: f64,
    posterior_h1: f64,
    quadrature_error: f64,
}

#[pymethods]
impl MetaResult {
    fn __repr__(&self) -> String {
        format!(
            "MetaResult(bf10={}, posterior_h1={})",
            self.bf10, self.posterior_h1
        )
    }
}

/// |t| reproducing the p-value with `nu` degrees of freedom.
#[pyfunction]
#[pyo3(signature = (p, nu, two_sided = true))]
fn t_from_p(p: f64, nu: f64, two_sided: bool) -> PyResult<f64> {
    engine::t_from_p(p, nu, sidedness(two_sided)).map_err(to_py)
}

/// BF10 by integrating over the effect size δ.
#[pyfunction]
#[pyo3(signature = (summary, r = DEFAULT_CAUCHY_SCALE))]
fn bf10(summary: TTestSummary, r: f64) -> PyResult<f64> {
    engine::jzs_bf_delta_form(summary.t, &summary.into(), r).map_err(to_py)
}

/// BF01 by integrating over the prior variance g.
#[pyfunction]
#[pyo3(signature = (summary, r = DEFAULT_CAUCHY_SCALE))]
fn bf01_g_form(summary: TTestSummary, r: f64) -> PyResult<f64> {
    engine::jzs_bf_g_form(summary.t, &summary.into(), r).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (bf10, prior_h1 = 0.5))]
fn posterior_prob(bf10: f64, prior_h1: f64) -> PyResult<f64> {
    engine::posterior_prob(bf10, prior_h1).map_err(to_py)
}

#[pyfunction]
fn classify_evidence(bf10: f64) -> PyResult<String> {
    engine::classify_evidence(bf10)
        .map(|l| l.to_string())
        .map_err(to_py)
}

/// Full pipeline for one study given either `p` or `t`.
#[pyfunction]
#[pyo3(signature = (n, p = None, t = None, n2 = None, one_sample = false, r = DEFAULT_CAUCHY_SCALE, prior_h1 = 0.5, two_sided = true))]
#[allow(clippy::too_many_arguments)]
fn analyze_study(
    n: u32,
    p: Option<f64>,
    t: Option<f64>,
    n2: Option<u32>,
    one_sample: bool,
    r: f64,
    prior_h1: f64,
    two_sided: bool,
) -> PyResult<BayesFactorResult> {
    let stat = match (p, t) {
        (Some(p), None) => Statistic::PValue(p),
        (None, Some(t)) => Statistic::TValue(t),
        _ => return Err(PyValueError::new_err("give exactly one of p and t")),
    };
    let design = match (one_sample, n2) {
        (true, None) => Design::OneSample,
        (true, Some(_)) => return Err(PyValueError::new_err("n2 requires a two-sample design")),
        (false, Some(n2)) if n2 != n => Design::TwoSampleUnequal { n2 },
        (false, _) => Design::TwoSampleEqualArms,
    };
    let config = AnalysisConfig {
        cauchy_scale: r,
        prior_h1,
        sidedness: sidedness(two_sided),
        ..AnalysisConfig::default()
    };
    let record = StudyRecord::new("study", "-", n, stat, design).map_err(to_py)?;
    let res = engine::analyze_study(&record, &config).map_err(to_py)?;
    Ok(BayesFactorResult {
        bf10: res.bf10,
        bf01: res.bf01,
        ln_bf10: res.ln_bf10,
        quadrature_error: res.quadrature_error,
        posterior_h1: res.posterior_h1,
        label: res.label.to_string(),
    })
}

/// Pooled BF10 for studies sharing one effect size.
#[pyfunction(name = "meta_bf")]
#[pyo3(signature = (studies, r = DEFAULT_CAUCHY_SCALE, prior_h1 = 0.5, positive_only = false))]
fn meta_bf_py(
    studies: Vec<TTestSummary>,
    r: f64,
    prior_h1: f64,
    positive_only: bool,
) -> PyResult<MetaResult> {
    let mut input = MetaInput::new(studies.into_iter().map(Into::into).collect(), r);
    input.prior_h1 = prior_h1;
    if positive_only {
        input.support = EffectSupport::PositiveHalfLine;
    }
    let m = meta::meta_bf(&input).map_err(to_py)?;
    Ok(MetaResult {
        bf10: m.bf10,
        bf01: m.bf01,
        ln_bf10: m.ln_bf10,
        posterior_h1: m.posterior_h1,
        quadrature_error: m.quadrature_error,
    })
}

fn load_report(
    path: Option<PathBuf>,
    groups: Option<Vec<String>>,
    r: f64,
    prior_h1: f64,
) -> PyResult<io::Report> {
    let ds = match path {
        Some(path) => {
            let bytes = std::fs::read(&path)
                .map_err(|source| to_py(Error::Io { path: path.clone(), source }))?;
            io::parse_dataset(&bytes, DataFormat::from_path(&path)).map_err(to_py)?
        }
        None => io::bundled_aducanumab(),
    };
    let groups = match groups {
        Some(specs) => specs
            .iter()
            .map(|s| s.parse::<MetaGroup>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(to_py)?,
        None => io::default_groups(&ds),
    };
    let config = AnalysisConfig {
        cauchy_scale: r,
        prior_h1,
        ..AnalysisConfig::default()
    };
    io::run_reanalysis(&ds, &config, &groups).map_err(to_py)
}

/// Reanalysis report as JSON (or text); the bundled aducanumab data when `path` is None.
#[pyfunction]
#[pyo3(signature = (path = None, groups = None, r = DEFAULT_CAUCHY_SCALE, prior_h1 = 0.5, text = false))]
fn run_report(
    path: Option<PathBuf>,
    groups: Option<Vec<String>>,
    r: f64,
    prior_h1: f64,
    text: bool,
) -> PyResult<String> {
    let report = load_report(path, groups, r, prior_h1)?;
    let format = if text { ReportFormat::Text } else { ReportFormat::Json };
    Ok(String::from_utf8(io::render_report(&report, format)).expect("report is UTF-8"))
}

/// The two SVG figures for a reanalysis.
#[pyfunction]
#[pyo3(signature = (path = None, groups = None, r = DEFAULT_CAUCHY_SCALE, prior_h1 = 0.5))]
fn emit_charts(
    path: Option<PathBuf>,
    groups: Option<Vec<String>>,
    r: f64,
    prior_h1: f64,
) -> PyResult<(String, String)> {
    let report = load_report(path, groups, r, prior_h1)?;
    Ok(io::emit_charts(&report))
}

#[pymodule]
fn jzs_bayes(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("DEFAULT_CAUCHY_SCALE", DEFAULT_CAUCHY_SCALE)?;
    m.add_class::<TTestSummary>()?;
    m.add_class::<BayesFactorResult>()?;
    m.add_class::<MetaResult>()?;
    m.add_function(wrap_pyfunction!(t_from_p, m)?)?;
    m.add_function(wrap_pyfunction!(bf10, m)?)?;
    m.add_function(wrap_pyfunction!(bf01_g_form, m)?)?;
    m.add_function(wrap_pyfunction!(posterior_prob, m)?)?;
    m.add_function(wrap_pyfunction!(classify_evidence, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_study, m)?)?;
    m.add_function(wrap_pyfunction!(meta_bf_py, m)?)?;
    m.add_function(wrap_pyfunction!(run_report, m)?)?;
    m.add_function(wrap_pyfunction!(emit_charts, m)?)?;
    Ok(())
}
