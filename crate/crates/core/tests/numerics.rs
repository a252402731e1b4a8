//! Oracle checks for the numerical kernel.

use std::f64::consts::PI;

use jzs_core::numerics::{
    central_t_pdf, integrate, noncentral_t_pdf, student_t_cdf, student_t_quantile, Interval,
};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Central t density for integer ν from exact gamma products at half-integers.
fn central_t_pdf_oracle(t: f64, nu: u32) -> f64 {
    // Γ(k/2) for integer k ≥ 1
    fn gamma_half(k: u32) -> f64 {
        if k.is_multiple_of(2) {
            (1..k / 2).map(|i| i as f64).product()
        } else {
            let mut g = PI.sqrt();
            let mut x = 0.5;
            while x < k as f64 / 2.0 - 0.25 {
                g *= x;
                x += 1.0;
            }
            g
        }
    }
    let nu_f = nu as f64;
    gamma_half(nu + 1) / ((nu_f * PI).sqrt() * gamma_half(nu))
        * (1.0 + t * t / nu_f).powf(-(nu_f + 1.0) / 2.0)
}

/// ∫₀^∞ y^k exp(−y²/2 + ay) dy by the integration-by-parts recursion
/// I_{k+1} = k I_{k−1} + a I_k, seeded with I_0 = e^{a²/2}√(2π)Φ(a).
fn chi_moment_integral(k: u32, a: f64) -> f64 {
    let phi = 0.5 * libm::erfc(-a / 2f64.sqrt());
    let i0 = (0.5 * a * a).exp() * (2.0 * PI).sqrt() * phi;
    if k == 0 {
        return i0;
    }
    let mut prev = i0;
    let mut cur = 1.0 + a * i0;
    for j in 1..k {
        let next = j as f64 * prev + a * cur;
        prev = cur;
        cur = next;
    }
    cur
}

fn noncentral_t_pdf_oracle(t: f64, nu: u32, mu: f64) -> f64 {
    let a = mu * t / (nu as f64 + t * t).sqrt();
    let mgf = chi_moment_integral(nu, a) / chi_moment_integral(nu, 0.0);
    central_t_pdf_oracle(t, nu) * (-0.5 * mu * mu).exp() * mgf
}

#[test]
fn noncentral_pdf_matches_closed_form_recursion() {
    let mut worst = 0.0f64;
    for nu in [1u32, 2, 3, 5, 8, 13, 20] {
        for &mu in &[-2.0, -0.5, 0.3, 1.0, 2.5, 4.0] {
            for &t in &[-1.5, -0.2, 0.7, 1.9, 3.3, 6.0] {
                let a = mu * t;
                if a < -1.0 {
                    // forward recursion loses accuracy for negative a
                    continue;
                }
                let got = noncentral_t_pdf(t, nu as f64, mu).unwrap();
                let want = noncentral_t_pdf_oracle(t, nu, mu);
                let e = rel(got, want);
                worst = worst.max(e);
                assert!(e < 1e-10, "nu={nu} mu={mu} t={t}: {got} vs {want}");
            }
        }
    }
    eprintln!("worst relative error vs recursion oracle: {worst:e}");
}

#[test]
fn noncentral_pdf_central_reduction_on_grid() {
    for &nu in &[0.5, 1.0, 2.0, 9.5, 273.5, 1092.0, 5000.0] {
        for i in -20..=20 {
            let t = i as f64 * 0.45;
            let a = noncentral_t_pdf(t, nu, 0.0).unwrap();
            let b = central_t_pdf(t, nu).unwrap();
            assert!((a - b).abs() <= 1e-12 * b, "t={t} nu={nu}");
        }
    }
}

#[test]
fn noncentral_pdf_integrates_to_one() {
    for &(nu, mu) in &[(1.0, 0.5), (4.0, -2.0), (30.0, 3.0), (1092.0, 4.17), (200.0, 15.0)] {
        let r = integrate(
            |t| noncentral_t_pdf(t, nu, mu).unwrap(),
            Interval::RealLine,
            1e-10,
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "nu={nu} mu={mu}: {}", r.value);
    }
}

#[test]
fn noncentral_pdf_large_noncentrality_stays_accurate() {
    // ν large: density approaches φ(t − μ) on the scale of the t spread.
    let nu = 5000.0;
    for &mu in &[-80.0, -20.0, 10.0, 80.0] {
        let t = mu * 1.001;
        let got = noncentral_t_pdf(t, nu, mu).unwrap();
        assert!(got > 0.0 && got.is_finite());
        // mean/variance of the noncentral t at large ν
        let sd = (1.0 + mu * mu / (2.0 * nu)).sqrt();
        let normal = (-0.5 * ((t - mu) / sd).powi(2)).exp() / (sd * (2.0 * PI).sqrt());
        assert!(rel(got, normal) < 0.05, "mu={mu}: {got} vs {normal}");
    }
}

#[test]
fn quantile_cdf_round_trip() {
    for &nu in &[1.0, 2.0, 10.0, 546.0, 1092.0] {
        for i in 1..=99 {
            let q = i as f64 / 100.0;
            let t = student_t_quantile(q, nu).unwrap();
            let back = student_t_cdf(t, nu).unwrap();
            assert!((back - q).abs() <= 1e-9, "q={q} nu={nu}: {back}");
        }
    }
}

// Fixed-step midpoint sums; the log grid x = e^s handles the heavy tails.
fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, steps: usize) -> f64 {
    let h = (b - a) / steps as f64;
    (0..steps).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

type Case = (Box<dyn Fn(f64) -> f64>, Interval, f64, f64);

#[test]
fn integrate_matches_riemann_oracle() {
    let cases: Vec<Case> = vec![
        (
            Box::new(|g: f64| (-g).exp()),
            Interval::HalfLinePositive,
            midpoint(|g: f64| (-g).exp(), 0.0, 50.0, 1_000_000),
            1.0,
        ),
        (
            Box::new(|x: f64| 1.0 / (PI * (1.0 + x * x))),
            Interval::RealLine,
            2.0 * midpoint(
                |s: f64| {
                    let x = s.exp();
                    x / (PI * (1.0 + x * x))
                },
                -40.0,
                40.0,
                1_000_000,
            ),
            1.0,
        ),
        (
            Box::new(|g: f64| g.powf(-1.5) * (-0.5 / g).exp()),
            Interval::HalfLinePositive,
            midpoint(
                |s: f64| {
                    let g = s.exp();
                    g.powf(-0.5) * (-0.5 / g).exp()
                },
                -10.0,
                60.0,
                1_000_000,
            ),
            (2.0 * PI).sqrt(),
        ),
    ];
    for (f, domain, riemann, exact) in cases {
        let r = integrate(f, domain, 1e-8).unwrap();
        assert!(rel(r.value, riemann) < 1e-4, "{} vs riemann {}", r.value, riemann);
        assert!(rel(r.value, exact) < 1e-6, "{} vs {}", r.value, exact);
        assert!(r.abs_error_estimate >= 0.0 && r.evaluations >= 1);
    }
}

#[test]
fn kernels_are_bit_deterministic() {
    let a = noncentral_t_pdf(2.52, 1092.0, 2.9).unwrap();
    let b = noncentral_t_pdf(2.52, 1092.0, 2.9).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
    let q1 = student_t_quantile(0.994, 546.0).unwrap();
    let q2 = student_t_quantile(0.994, 546.0).unwrap();
    assert_eq!(q1.to_bits(), q2.to_bits());
}
