use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::engine::{
    analyze_summary, classify_evidence, summarize, AnalysisConfig, EvidenceLabel, Sidedness,
    StudyRecord, TTestSummary,
};
use crate::error::{Error, Result};
use crate::io::dataset::Dataset;
use crate::meta::{meta_bf, MetaInput};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

/// A named set of `(trial, arm)` pairs pooled into one meta-analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetaGroup {
    pub name: String,
    pub members: Vec<(String, String)>,
}

impl MetaGroup {
    pub fn member_labels(&self) -> Vec<String> {
        self.members.iter().map(|(t, a)| format!("{t}.{a}")).collect()
    }
}

impl FromStr for MetaGroup {
    type Err = Error;

    /// Parses `name=TRIAL.arm,TRIAL.arm`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Validation(format!("meta group `{s}`: {msg}"));
        let (name, rest) = s
            .split_once('=')
            .ok_or_else(|| bad("expected name=TRIAL.arm,TRIAL.arm"))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(bad("empty group name"));
        }
        let members = rest
            .split(',')
            .map(|m| {
                let (t, a) = m
                    .trim()
                    .split_once('.')
                    .ok_or_else(|| bad("members are written TRIAL.arm"))?;
                if t.is_empty() || a.is_empty() {
                    return Err(bad("members are written TRIAL.arm"));
                }
                Ok((t.to_string(), a.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MetaGroup {
            name: name.to_string(),
            members,
        })
    }
}

/// Groups used for the bundled aducanumab data: each dose pooled across trials.
pub fn default_groups(dataset: &Dataset) -> Vec<MetaGroup> {
    let mut arms: Vec<&str> = Vec::new();
    for r in &dataset.records {
        if !arms.contains(&r.arm.as_str()) {
            arms.push(&r.arm);
        }
    }
    arms.into_iter()
        .filter_map(|arm| {
            let members: Vec<(String, String)> = dataset
                .records
                .iter()
                .filter(|r| r.arm == arm)
                .map(|r| (r.trial.clone(), r.arm.clone()))
                .collect();
            (members.len() > 1).then(|| MetaGroup {
                name: arm.to_string(),
                members,
            })
        })
        .collect()
}

/// Rounded strings as they appear in the text report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Display {
    pub bf10: String,
    pub bf01: String,
    pub posterior_h1: String,
    pub label: String,
}

impl Display {
    fn new(bf10: f64, bf01: f64, posterior_h1: f64, label: EvidenceLabel) -> Self {
        Display {
            bf10: format_bf(bf10),
            bf01: format_bf(bf01),
            posterior_h1: format_percent(posterior_h1),
            label: label.to_string(),
        }
    }
}

/// Two decimals for ordinary values, scientific notation outside [0.01, 1e6).
pub fn format_bf(x: f64) -> String {
    if (0.01..1e6).contains(&x) {
        format!("{x:.2}")
    } else {
        format!("{x:.2e}")
    }
}

/// Whole percent, truncated toward zero.
pub fn format_percent(p: f64) -> String {
    format!("{}%", (p * 100.0 + 1e-9).floor() as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub trial: String,
    pub arm: String,
    pub n: u32,
    pub p: Option<f64>,
    pub t: f64,
    pub nu_inversion: f64,
    pub nu_bf: f64,
    pub n_eff: f64,
    pub bf10: f64,
    pub bf01: f64,
    pub ln_bf10: f64,
    pub posterior_h1: f64,
    pub posterior_h0: f64,
    pub label: EvidenceLabel,
    pub quadrature_error: f64,
    pub display: Display,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaReport {
    pub name: String,
    pub members: Vec<String>,
    pub bf10: f64,
    pub bf01: f64,
    pub ln_bf10: f64,
    pub posterior_h1: f64,
    pub posterior_h0: f64,
    pub label: EvidenceLabel,
    pub quadrature_error: f64,
    pub display: Display,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub dataset: String,
    pub config: AnalysisConfig,
    pub studies: Vec<StudyReport>,
    pub meta: Vec<MetaReport>,
    pub version: String,
}

fn in_study<T>(record: &StudyRecord, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Study {
        trial: record.trial.clone(),
        arm: record.arm.clone(),
        source: Box::new(e),
    })
}

fn study_from_summary(
    record: &StudyRecord,
    summary: &TTestSummary,
    config: &AnalysisConfig,
) -> Result<StudyReport> {
    let bf = in_study(record, analyze_summary(summary, config))?;
    Ok(StudyReport {
        trial: record.trial.clone(),
        arm: record.arm.clone(),
        n: record.n,
        p: record.stat.p_value(),
        t: summary.t,
        nu_inversion: summary.nu_inversion,
        nu_bf: summary.nu_bf,
        n_eff: summary.n_eff,
        bf10: bf.bf10,
        bf01: bf.bf01,
        ln_bf10: bf.ln_bf10,
        posterior_h1: bf.posterior_h1,
        posterior_h0: 1.0 - bf.posterior_h1,
        label: bf.label,
        quadrature_error: bf.quadrature_error,
        display: Display::new(bf.bf10, bf.bf01, bf.posterior_h1, bf.label),
    })
}

/// Analysis of one record, with errors tagged by its trial and arm.
pub fn study_report(record: &StudyRecord, config: &AnalysisConfig) -> Result<StudyReport> {
    config.validate()?;
    let summary = in_study(record, summarize(record, config))?;
    study_from_summary(record, &summary, config)
}

pub fn run_meta(
    dataset: &Dataset,
    config: &AnalysisConfig,
    groups: &[MetaGroup],
) -> Result<Vec<MetaReport>> {
    config.validate()?;
    groups
        .iter()
        .map(|g| {
            if g.members.is_empty() {
                return Err(Error::Validation(format!("meta group `{}` is empty", g.name)));
            }
            let studies = g
                .members
                .iter()
                .map(|(trial, arm)| {
                    let record = dataset.find(trial, arm).ok_or_else(|| {
                        Error::Validation(format!(
                            "meta group `{}` refers to unknown study {trial}.{arm}",
                            g.name
                        ))
                    })?;
                    in_study(record, summarize(record, config))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut input = MetaInput::new(studies, config.cauchy_scale);
            input.prior_h1 = config.prior_h1;
            input.rel_tol = config.rel_tol;
            let m = meta_bf(&input)?;
            let label = classify_evidence(m.bf10)?;
            Ok(MetaReport {
                name: g.name.clone(),
                members: g.member_labels(),
                bf10: m.bf10,
                bf01: m.bf01,
                ln_bf10: m.ln_bf10,
                posterior_h1: m.posterior_h1,
                posterior_h0: 1.0 - m.posterior_h1,
                label,
                quadrature_error: m.quadrature_error,
                display: Display::new(m.bf10, m.bf01, m.posterior_h1, label),
            })
        })
        .collect()
}

pub fn run_reanalysis(
    dataset: &Dataset,
    config: &AnalysisConfig,
    groups: &[MetaGroup],
) -> Result<Report> {
    config.validate()?;
    dataset.validate()?;
    let studies = dataset
        .records
        .iter()
        .map(|r| study_report(r, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        dataset: dataset.name.clone(),
        config: *config,
        studies,
        meta: run_meta(dataset, config, groups)?,
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

/// Left-aligned columns separated by two spaces, trailing blanks trimmed.
fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            let pad = widths[c] - cell.chars().count();
            line.extend(std::iter::repeat_n(' ', pad));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn config_line(config: &AnalysisConfig) -> String {
    format!(
        "Cauchy scale r = {:.4}, prior P(H1) = {}, {}",
        config.cauchy_scale,
        config.prior_h1,
        match config.sidedness {
            Sidedness::TwoSided => "two-sided p-values",
            Sidedness::OneSided => "one-sided p-values",
        }
    )
}

fn study_row(s: &StudyReport) -> Vec<String> {
    vec![
        s.trial.clone(),
        s.arm.clone(),
        format!("n = {}", s.n),
        match s.p {
            Some(p) => format!("p = {p}"),
            None => "p = -".to_string(),
        },
        format!("t = {:.2}", s.t),
        format!("BF10 = {}", s.display.bf10),
        format!("BF01 = {}", s.display.bf01),
        format!("P(H1|D) = {}", s.display.posterior_h1),
        s.display.label.clone(),
    ]
}

fn meta_row(m: &MetaReport) -> Vec<String> {
    vec![
        "META".to_string(),
        m.name.clone(),
        m.members.join(" + "),
        format!("BF10 = {}", m.display.bf10),
        format!("BF01 = {}", m.display.bf01),
        format!("P(H1|D) = {}", m.display.posterior_h1),
        m.display.label.clone(),
    ]
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report serializes");
    out.push(b'\n');
    out
}

pub fn render_report(report: &Report, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => to_json(report),
        ReportFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "Bayesian reanalysis: {}", report.dataset);
            let _ = writeln!(out, "{}", config_line(&report.config));
            out.push('\n');
            let rows: Vec<Vec<String>> = report.studies.iter().map(study_row).collect();
            out.push_str(&table(&rows));
            if !report.meta.is_empty() {
                out.push('\n');
                out.push_str(&render_meta_text(&report.meta));
            }
            out.into_bytes()
        }
    }
}

fn render_meta_text(meta: &[MetaReport]) -> String {
    let rows: Vec<Vec<String>> = meta.iter().map(meta_row).collect();
    table(&rows)
}

#[derive(Serialize)]
struct MetaDocument<'a> {
    config: &'a AnalysisConfig,
    meta: &'a [MetaReport],
    version: &'a str,
}

pub fn render_meta(meta: &[MetaReport], config: &AnalysisConfig, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => to_json(&MetaDocument {
            config,
            meta,
            version: env!("CARGO_PKG_VERSION"),
        }),
        ReportFormat::Text => render_meta_text(meta).into_bytes(),
    }
}

pub fn render_study(study: &StudyReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => to_json(study),
        ReportFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "t = {:.2}  (df = {}, effective n = {})",
                study.t, study.nu_bf, study.n_eff
            );
            let _ = writeln!(out, "BF10 = {}", study.display.bf10);
            let _ = writeln!(out, "BF01 = {}", study.display.bf01);
            let _ = writeln!(out, "P(H1|D) = {}", study.display.posterior_h1);
            let _ = writeln!(out, "{}", study.display.label);
            out.into_bytes()
        }
    }
}

#[derive(Serialize)]
struct LabelDocument<'a> {
    bf10: f64,
    strength: crate::engine::Strength,
    direction: crate::engine::Direction,
    text: &'a str,
}

pub fn render_label(bf10: f64, label: EvidenceLabel, format: ReportFormat) -> Vec<u8> {
    let text = label.to_string();
    match format {
        ReportFormat::Json => to_json(&LabelDocument {
            bf10,
            strength: label.strength,
            direction: label.direction,
            text: &text,
        }),
        ReportFormat::Text => format!("{text}\n").into_bytes(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::dataset::bundled_aducanumab;

    #[test]
    fn group_parsing() {
        let g: MetaGroup = "high=EMERGE.high, ENGAGE.high".parse().unwrap();
        assert_eq!(g.name, "high");
        assert_eq!(g.member_labels(), ["EMERGE.high", "ENGAGE.high"]);
        assert!("high".parse::<MetaGroup>().is_err());
        assert!("=A.b".parse::<MetaGroup>().is_err());
        assert!("x=A".parse::<MetaGroup>().is_err());
    }

    #[test]
    fn default_groups_pool_each_dose() {
        let groups = default_groups(&bundled_aducanumab());
        let names: Vec<_> = groups.iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, ["low", "high"]);
        assert_eq!(groups[0].member_labels(), ["EMERGE.low", "ENGAGE.low"]);
    }

    #[test]
    fn formatting_rules() {
        assert_eq!(format_bf(1.543_959), "1.54");
        assert_eq!(format_bf(0.069), "0.07");
        assert_eq!(format_bf(0.001_234), "1.23e-3");
        assert_eq!(format_percent(0.606_9), "60%");
        assert_eq!(format_percent(0.5), "50%");
        assert_eq!(format_percent(0.064_5), "6%");
        assert_eq!(format_percent(1.0), "100%");
    }

    #[test]
    fn text_report_contains_headline_values() {
        let ds = bundled_aducanumab();
        let report =
            run_reanalysis(&ds, &AnalysisConfig::default(), &default_groups(&ds)).unwrap();
        let text = String::from_utf8(render_report(&report, ReportFormat::Text)).unwrap();
        assert!(text.contains("BF10 = 1.54"), "{text}");
        assert!(text.contains("60%"), "{text}");
        assert!(text.contains("META"));
    }

    #[test]
    fn unknown_group_member_is_rejected() {
        let ds = bundled_aducanumab();
        let g: MetaGroup = "x=EMERGE.mid".parse().unwrap();
        let err = run_reanalysis(&ds, &AnalysisConfig::default(), &[g]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn json_keys_are_stable() {
        let ds = bundled_aducanumab();
        let report = run_reanalysis(&ds, &AnalysisConfig::default(), &[]).unwrap();
        let v: serde_json::Value =
            serde_json::from_slice(&render_report(&report, ReportFormat::Json)).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["config", "dataset", "meta", "studies", "version"]);
    }
}
