//! Acceptance criteria for the aducanumab reanalysis. Prints one PASS/FAIL
//! line per criterion and exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::{Command, ExitCode};

use jzs_core::engine::{
    analyze_study, classify_evidence, jzs_bf_delta_form, jzs_bf_g_form, summarize,
    AnalysisConfig, Direction, Strength, TTestSummary,
};
use jzs_core::io::{bundled_aducanumab, default_groups, run_reanalysis};
use jzs_core::meta::{meta_bf, MetaInput};
use jzs_core::numerics::{
    cauchy_pdf, central_t_pdf, integrate, noncentral_t_pdf, student_t_cdf, student_t_quantile,
    Interval,
};

const CONDITIONS: [&str; 4] = ["EMERGE low", "EMERGE high", "ENGAGE low", "ENGAGE high"];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn summaries() -> Vec<TTestSummary> {
    let cfg = AnalysisConfig::default();
    bundled_aducanumab()
        .records
        .iter()
        .map(|r| summarize(r, &cfg).unwrap())
        .collect()
}

/// Large-ν approximation: t_j ~ N(δ√N0_j, 1), so the pooled likelihood is a
/// Gaussian in δ and the Cauchy prior is read off at its mean.
fn laplace_bf(studies: &[TTestSummary], r: f64) -> f64 {
    let precision: f64 = studies.iter().map(|s| s.n_eff).sum();
    let score: f64 = studies.iter().map(|s| s.t * s.n_eff.sqrt()).sum();
    let mean = score / precision;
    cauchy_pdf(mean, r).unwrap() * (2.0 * PI / precision).sqrt() * (0.5 * score * score / precision).exp()
}

fn criterion_1() -> Outcome {
    let want = ["1.69", "2.52", "1.17", "0.23"];
    let got: Vec<String> = summaries().iter().map(|s| format!("{:.2}", s.t)).collect();
    let pass = got.iter().zip(want).all(|(g, w)| g == w);
    check(pass, format!("t = {got:?}, expected {want:?}"))
}

fn criterion_2() -> Outcome {
    let want = [0.27, 1.54, 0.13, 0.07];
    let mut pass = true;
    let mut parts = Vec::new();
    for ((s, w), name) in summaries().iter().zip(want).zip(CONDITIONS) {
        let delta = jzs_bf_delta_form(s.t, s, FRAC_1_SQRT_2).unwrap();
        let g = 1.0 / jzs_bf_g_form(s.t, s, FRAC_1_SQRT_2).unwrap();
        let ok = (delta - w).abs() <= 0.01 && (g - w).abs() <= 0.01;
        pass &= ok;
        parts.push(format!("{name}: delta {delta:.4} g {g:.4} (target {w})"));
    }
    check(pass, parts.join("; "))
}

fn criterion_3() -> Outcome {
    let cfg = AnalysisConfig::default();
    let want = [(0.21, 0.01), (0.60, 0.01), (0.11, 0.01), (0.065, 0.005)];
    let mut pass = true;
    let mut parts = Vec::new();
    for ((r, (w, tol)), name) in bundled_aducanumab().records.iter().zip(want).zip(CONDITIONS) {
        let post = analyze_study(r, &cfg).unwrap().posterior_h1;
        pass &= (post - w).abs() <= tol;
        parts.push(format!("{name}: {:.2}%", post * 100.0));
    }
    check(pass, parts.join("; "))
}

fn criterion_4() -> Outcome {
    let s = summaries();
    let groups = [("low", [0, 2], 0.38, 0.27), ("high", [1, 3], 0.29, 0.22)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, idx, bf_want, post_want) in groups {
        let m = meta_bf(&MetaInput::new(vec![s[idx[0]], s[idx[1]]], FRAC_1_SQRT_2)).unwrap();
        pass &= (m.bf10 - bf_want).abs() <= 0.02 && (m.posterior_h1 - post_want).abs() <= 0.01;
        parts.push(format!(
            "{name}: BF10 {:.4} (target {bf_want}), posterior {:.2}% (target {:.0}%)",
            m.bf10,
            m.posterior_h1 * 100.0,
            post_want * 100.0
        ));
    }
    check(pass, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let ns = [10u32, 100, 547];
    let rs = [0.5, FRAC_1_SQRT_2, 1.0];
    let mut worst = 0.0f64;
    for i in 0..100 {
        let t = 5.0 * i as f64 / 99.0;
        let n = ns[i % 3];
        let r = rs[(i / 3) % 3];
        let s = TTestSummary::two_sample(t, n, n).unwrap();
        let delta = jzs_bf_delta_form(t, &s, r).unwrap();
        let g = 1.0 / jzs_bf_g_form(t, &s, r).unwrap();
        worst = worst.max(((delta - g) / delta).abs());
    }
    check(worst <= 1e-6, format!("worst relative disagreement {worst:.2e} over 100 points"))
}

fn criterion_6() -> Outcome {
    let s = summaries();
    let mut pass = true;
    let mut parts = Vec::new();
    for (si, name) in s.iter().zip(CONDITIONS) {
        let engine = jzs_bf_delta_form(si.t, si, FRAC_1_SQRT_2).unwrap();
        let e = ((laplace_bf(std::slice::from_ref(si), FRAC_1_SQRT_2) - engine) / engine).abs();
        pass &= e <= 0.05;
        parts.push(format!("{name} {:.1}%", e * 100.0));
    }
    for (name, idx) in [("pooled low", [0, 2]), ("pooled high", [1, 3])] {
        let pair = vec![s[idx[0]], s[idx[1]]];
        let engine = meta_bf(&MetaInput::new(pair.clone(), FRAC_1_SQRT_2)).unwrap().bf10;
        let e = ((laplace_bf(&pair, FRAC_1_SQRT_2) - engine) / engine).abs();
        pass &= e <= 0.10;
        parts.push(format!("{name} {:.1}%", e * 100.0));
    }
    check(pass, format!("relative gap to Laplace approximation: {}", parts.join(", ")))
}

fn criterion_7() -> Outcome {
    let mut round_trip = 0.0f64;
    for &nu in &[1.0, 2.0, 10.0, 546.0, 1092.0] {
        for i in 1..=99 {
            let q = i as f64 / 100.0;
            let t = student_t_quantile(q, nu).unwrap();
            round_trip = round_trip.max((student_t_cdf(t, nu).unwrap() - q).abs());
        }
    }
    let mut reduction = 0.0f64;
    for &nu in &[0.5, 1.0, 2.0, 9.5, 273.5, 1092.0] {
        for i in -20..=20 {
            let t = i as f64 * 0.45;
            let c = central_t_pdf(t, nu).unwrap();
            reduction = reduction.max(((noncentral_t_pdf(t, nu, 0.0).unwrap() - c) / c).abs());
        }
    }
    let integrals = [
        integrate(|g| (-g).exp(), Interval::HalfLinePositive, 1e-8).unwrap().value,
        integrate(|x| cauchy_pdf(x, 1.0).unwrap(), Interval::RealLine, 1e-8)
            .unwrap()
            .value,
        integrate(
            |g| g.powf(-1.5) * (-0.5 / g).exp(),
            Interval::HalfLinePositive,
            1e-8,
        )
        .unwrap()
        .value
            / (2.0 * PI).sqrt(),
    ];
    let quad = integrals.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    check(
        round_trip <= 1e-9 && reduction <= 1e-12 && quad <= 1e-6,
        format!("round trip {round_trip:.1e}, central reduction {reduction:.1e}, integrals {quad:.1e}"),
    )
}

fn criterion_8() -> Outcome {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("report.json");
        let plots = dir.path().join("plots");
        let status = Command::new(env!("CARGO_BIN_EXE_jzs"))
            .args(["report", "--format", "json", "--out"])
            .arg(&out)
            .arg("--plots")
            .arg(&plots)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        let read = |p: std::path::PathBuf| std::fs::read(p).unwrap();
        (
            read(out),
            read(plots.join("bayes_factors.svg")),
            read(plots.join("posteriors.svg")),
        )
    };
    let a = run();
    let b = run();
    let lib = run_reanalysis(
        &bundled_aducanumab(),
        &AnalysisConfig::default(),
        &default_groups(&bundled_aducanumab()),
    )
    .unwrap();
    let same_as_lib = a.0 == jzs_core::io::render_report(&lib, jzs_core::io::ReportFormat::Json);
    check(
        a == b && same_as_lib,
        format!(
            "JSON {} bytes, SVGs {} + {} bytes; identical across runs: {}",
            a.0.len(),
            a.1.len(),
            a.2.len(),
            a == b
        ),
    )
}

fn criterion_9() -> Outcome {
    use Direction::*;
    use Strength::*;
    let want = [
        (Anecdotal, FavorsH0),
        (Anecdotal, FavorsH1),
        (Moderate, FavorsH0),
        (Strong, FavorsH0),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for ((s, (strength, direction)), name) in summaries().iter().zip(want).zip(CONDITIONS) {
        let bf = jzs_bf_delta_form(s.t, s, FRAC_1_SQRT_2).unwrap();
        let label = classify_evidence(bf).unwrap();
        pass &= label.strength == strength && label.direction == direction;
        parts.push(format!("{name}: {label} (1/BF {:.2})", 1.0 / bf));
    }
    check(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("t-values from p-values", criterion_1),
        ("single-study Bayes factors, both forms", criterion_2),
        ("single-study posteriors", criterion_3),
        ("pooled Bayes factors and posteriors", criterion_4),
        ("g-form and delta-form agree", criterion_5),
        ("Laplace oracle agreement", criterion_6),
        ("numerical kernel", criterion_7),
        ("end-to-end determinism", criterion_8),
        ("evidence categories", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {} ({name}): {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
