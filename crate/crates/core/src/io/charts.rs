use std::fmt::Write as _;

use crate::io::report::Report;

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 400.0;

const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const PALETTE: [&str; 6] = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"];
const META_COLOR: &str = "#333333";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String) {
    let _ = writeln!(
        out,
        r##"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.1}" stroke="#000000"/>"##,
        HEIGHT - BOTTOM
    );
    let _ = writeln!(
        out,
        r##"<line x1="{LEFT}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#000000"/>"##,
        HEIGHT - BOTTOM,
        WIDTH - RIGHT,
        HEIGHT - BOTTOM
    );
}

struct Bar {
    label: String,
    value: f64,
    text: String,
    color: &'static str,
    class: &'static str,
}

/// Draws bars rising from the bottom of the plot; `y_of` maps a value to a pixel row.
fn bars(out: &mut String, bars: &[Bar], y_of: impl Fn(f64) -> f64) {
    let plot_w = WIDTH - LEFT - RIGHT;
    let slot = plot_w / bars.len().max(1) as f64;
    let bar_w = slot * 0.6;
    let base = HEIGHT - BOTTOM;
    for (i, b) in bars.iter().enumerate() {
        let x = LEFT + slot * i as f64 + (slot - bar_w) / 2.0;
        let y = y_of(b.value).clamp(TOP, base);
        let _ = writeln!(
            out,
            r#"<rect class="{}" x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{}" data-label="{}" data-value="{}"/>"#,
            b.class,
            x,
            y,
            bar_w,
            base - y,
            b.color,
            escape(&b.label),
            escape(&b.text)
        );
        let cx = x + bar_w / 2.0;
        let _ = writeln!(
            out,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            y - 5.0,
            escape(&b.text)
        );
        let _ = writeln!(
            out,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            base + 18.0,
            escape(&b.label)
        );
    }
}

fn arm_color(arms: &mut Vec<String>, arm: &str) -> &'static str {
    let k = match arms.iter().position(|a| a == arm) {
        Some(k) => k,
        None => {
            arms.push(arm.to_string());
            arms.len() - 1
        }
    };
    PALETTE[k % PALETTE.len()]
}

/// BF10 per study on a log axis with a reference line at BF10 = 1.
pub fn bayes_factor_chart(report: &Report) -> String {
    let mut out = String::new();
    header(&mut out, "Bayes factor BF10 by trial and arm");

    let lo = report
        .studies
        .iter()
        .map(|s| s.bf10)
        .fold(1.0f64, f64::min)
        .log10()
        .floor()
        .min(-1.0);
    let hi = report
        .studies
        .iter()
        .map(|s| s.bf10)
        .fold(1.0f64, f64::max)
        .log10()
        .ceil()
        .max(1.0);
    let plot_h = HEIGHT - TOP - BOTTOM;
    let y_of = |v: f64| TOP + (hi - v.log10()) / (hi - lo) * plot_h;

    for k in (lo as i32)..=(hi as i32) {
        let y = y_of(10f64.powi(k));
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{LEFT}" y2="{y:.1}" stroke="#000000"/>"##,
            LEFT - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            10f64.powi(k)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">BF10 (log scale)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    axes(&mut out);

    let mut arms = Vec::new();
    let data: Vec<Bar> = report
        .studies
        .iter()
        .map(|s| Bar {
            label: format!("{} {}", s.trial, s.arm),
            value: s.bf10,
            text: s.display.bf10.clone(),
            color: arm_color(&mut arms, &s.arm),
            class: "bar",
        })
        .collect();
    bars(&mut out, &data, y_of);

    let y1 = y_of(1.0);
    let _ = writeln!(
        out,
        r##"<line class="reference" x1="{LEFT}" y1="{y1:.1}" x2="{:.1}" y2="{y1:.1}" stroke="#000000" stroke-dasharray="6,4"/>"##,
        WIDTH - RIGHT
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="end">BF10 = 1</text>"#,
        WIDTH - RIGHT - 4.0,
        y1 - 4.0
    );
    out.push_str("</svg>\n");
    out
}

/// Posterior P(H1|D) per study, followed by the pooled estimates.
pub fn posterior_chart(report: &Report) -> String {
    let mut out = String::new();
    header(&mut out, "Posterior probability of an effect, P(H1|D)");
    let plot_h = HEIGHT - TOP - BOTTOM;
    let y_of = |v: f64| TOP + (1.0 - v) * plot_h;

    for k in 0..=4 {
        let v = k as f64 * 0.25;
        let y = y_of(v);
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{LEFT}" y2="{y:.1}" stroke="#000000"/>"##,
            LEFT - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}%</text>"#,
            LEFT - 8.0,
            y + 4.0,
            k * 25
        );
    }
    axes(&mut out);

    let mut arms = Vec::new();
    let mut data: Vec<Bar> = report
        .studies
        .iter()
        .map(|s| Bar {
            label: format!("{} {}", s.trial, s.arm),
            value: s.posterior_h1,
            text: s.display.posterior_h1.clone(),
            color: arm_color(&mut arms, &s.arm),
            class: "bar",
        })
        .collect();
    data.extend(report.meta.iter().map(|m| Bar {
        label: format!("pooled {}", m.name),
        value: m.posterior_h1,
        text: m.display.posterior_h1.clone(),
        color: META_COLOR,
        class: "bar meta",
    }));
    bars(&mut out, &data, y_of);

    let y = y_of(report.config.prior_h1);
    let _ = writeln!(
        out,
        r##"<line class="reference" x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#888888" stroke-dasharray="2,3"/>"##,
        WIDTH - RIGHT
    );
    out.push_str("</svg>\n");
    out
}

/// Both figures as SVG documents: Bayes factors first, posteriors second.
pub fn emit_charts(report: &Report) -> (String, String) {
    (bayes_factor_chart(report), posterior_chart(report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::AnalysisConfig;
    use crate::io::dataset::bundled_aducanumab;
    use crate::io::report::{default_groups, run_reanalysis};

    fn attr(tag: &str, name: &str) -> String {
        let key = format!(" {name}=\"");
        let start = tag.find(&key).unwrap() + key.len();
        tag[start..].split('"').next().unwrap().to_string()
    }

    #[test]
    fn one_bar_clears_the_reference_line() {
        let ds = bundled_aducanumab();
        let report = run_reanalysis(&ds, &AnalysisConfig::default(), &default_groups(&ds)).unwrap();
        let (svg, _) = emit_charts(&report);
        let line = svg.lines().find(|l| l.contains(r#"class="reference""#)).unwrap();
        let ref_y: f64 = attr(line, "y1").parse().unwrap();
        let tops: Vec<f64> = svg
            .lines()
            .filter(|l| l.contains(r#"class="bar""#))
            .map(|l| attr(l, "y").parse().unwrap())
            .collect();
        assert_eq!(tops.len(), 4);
        assert_eq!(tops.iter().filter(|&&y| y < ref_y).count(), 1);
    }

    #[test]
    fn meta_bars_follow_groups() {
        let ds = bundled_aducanumab();
        let cfg = AnalysisConfig::default();
        let with = run_reanalysis(&ds, &cfg, &default_groups(&ds)).unwrap();
        let (_, svg) = emit_charts(&with);
        let meta: Vec<String> = svg
            .lines()
            .filter(|l| l.contains(r#"class="bar meta""#))
            .map(|l| attr(l, "data-value"))
            .collect();
        assert_eq!(meta, [with.meta[0].display.posterior_h1.clone(), with.meta[1].display.posterior_h1.clone()]);
        assert_eq!(meta[0], "27%");

        let without = run_reanalysis(&ds, &cfg, &[]).unwrap();
        assert!(!emit_charts(&without).1.contains("bar meta"));
    }

    #[test]
    fn charts_are_deterministic() {
        let ds = bundled_aducanumab();
        let cfg = AnalysisConfig::default();
        let a = emit_charts(&run_reanalysis(&ds, &cfg, &default_groups(&ds)).unwrap());
        let b = emit_charts(&run_reanalysis(&ds, &cfg, &default_groups(&ds)).unwrap());
        assert_eq!(a, b);
        assert!(a.0.contains(r#"width="640" height="400""#));
    }
}
