//! Student-t (central and noncentral) and Cauchy densities, the Student-t
//! distribution function and its inverse.

use std::f64::consts::PI;

use super::quadrature::{integrate_with, Interval, QuadratureOptions};
use super::special::{ln_beta, ln_gamma_unchecked, reg_inc_beta_pair};
use crate::error::{Error, Result};

fn check_nu(nu: f64) -> Result<()> {
    if nu > 0.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "degrees of freedom must be positive and finite, got {nu}"
        )))
    }
}

/// Returns (x, 1 − x) for x = ν / (ν + t²) without overflowing for large |t|.
fn beta_arguments(t: f64, nu: f64) -> (f64, f64) {
    let s = t.abs() / nu.sqrt();
    if s <= 1.0 {
        let s2 = s * s;
        (1.0 / (1.0 + s2), s2 / (1.0 + s2))
    } else {
        let w = 1.0 / s;
        let w2 = w * w;
        (w2 / (1.0 + w2), 1.0 / (1.0 + w2))
    }
}

/// Upper tail P(T > t) for t ≥ 0.
fn upper_tail(t: f64, nu: f64) -> f64 {
    let s = t.abs() / nu.sqrt();
    if s > 1e100 {
        // x = ν/(ν+t²) underflows; the continued fraction is 1 + O(x) here.
        let a = 0.5 * nu;
        return 0.5 * (-2.0 * a * s.ln() - a.ln() - ln_beta(a, 0.5)).exp();
    }
    let (x, y) = beta_arguments(t, nu);
    0.5 * reg_inc_beta_pair(0.5 * nu, 0.5, x, y).0
}

/// Central Student-t distribution function.
pub fn student_t_cdf(t: f64, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    if t.is_nan() {
        return Err(Error::domain("student_t_cdf of NaN"));
    }
    let tail = upper_tail(t, nu);
    Ok(if t >= 0.0 { 1.0 - tail } else { tail })
}

/// Log of the central Student-t density.
pub fn ln_central_t_pdf(t: f64, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok(ln_central_t_pdf_unchecked(t, nu))
}

fn ln_central_t_pdf_unchecked(t: f64, nu: f64) -> f64 {
    let s = t / nu.sqrt();
    let ln_kernel = if s.abs() < 1e150 {
        -(nu + 1.0) / 2.0 * (s * s).ln_1p()
    } else {
        -(nu + 1.0) * s.abs().ln()
    };
    ln_gamma_unchecked((nu + 1.0) / 2.0) - ln_gamma_unchecked(nu / 2.0) - 0.5 * (nu * PI).ln()
        + ln_kernel
}

/// Central Student-t density.
pub fn central_t_pdf(t: f64, nu: f64) -> Result<f64> {
    Ok(ln_central_t_pdf(t, nu)?.exp())
}

/// Upper-tail quantile: the t ≥ 0 with P(T > t) = `tail`, for 0 < tail ≤ ½.
pub fn student_t_upper_quantile(tail: f64, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    if !(tail > 0.0 && tail <= 0.5) {
        return Err(Error::domain(format!(
            "upper-tail probability must lie in (0, 0.5], got {tail}"
        )));
    }
    if tail == 0.5 {
        return Ok(0.0);
    }

    // Bracket, then bisect down to a 1e-3 relative bracket.
    let mut lo = 0.0;
    let mut hi = 1.0;
    while upper_tail(hi, nu) > tail {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Overflow(format!(
                "t quantile for tail {tail} with nu = {nu} is not representable"
            )));
        }
    }
    while hi - lo > 1e-3 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if upper_tail(mid, nu) > tail {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Newton polishing on ln P(T > t), safeguarded by the bracket.
    let ln_target = tail.ln();
    let mut t = 0.5 * (lo + hi);
    for _ in 0..100 {
        let sf = upper_tail(t, nu);
        if sf > tail {
            lo = lo.max(t);
        } else {
            hi = hi.min(t);
        }
        let pdf = ln_central_t_pdf_unchecked(t, nu).exp();
        let mut next = if sf > 0.0 && pdf > 0.0 {
            t + (sf.ln() - ln_target) * sf / pdf
        } else {
            f64::NAN
        };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - t).abs();
        t = next;
        if step <= 4.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(t)
}

/// Inverse of [`student_t_cdf`].
pub fn student_t_quantile(q: f64, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!(
            "quantile probability must lie in (0, 1), got {q}"
        )));
    }
    if q > 0.5 {
        student_t_upper_quantile(1.0 - q, nu)
    } else {
        Ok(-student_t_upper_quantile(q, nu)?)
    }
}

/// Cauchy density with location 0.
pub fn cauchy_pdf(x: f64, scale: f64) -> Result<f64> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::domain(format!(
            "Cauchy scale must be positive, got {scale}"
        )));
    }
    Ok(cauchy_pdf_unchecked(x, scale))
}

pub(crate) fn cauchy_pdf_unchecked(x: f64, scale: f64) -> f64 {
    let z = x / scale;
    1.0 / (PI * scale * (1.0 + z * z))
}

/// Noncentral Student-t density.
pub fn noncentral_t_pdf(t: f64, nu: f64, mu: f64) -> Result<f64> {
    let kernel = NoncentralT::new(nu)?;
    if !mu.is_finite() || !t.is_finite() {
        return Err(Error::domain(format!(
            "noncentral_t_pdf needs finite t and mu, got t = {t}, mu = {mu}"
        )));
    }
    Ok((ln_central_t_pdf_unchecked(t, nu) + kernel.ln_ratio(t, mu)?).exp())
}

/// Noncentral-t density expressed relative to the central density with the
/// same degrees of freedom.
///
/// With a = μt/√(ν+t²) the density factorises as
///
/// ```text
/// f(t; ν, μ) = f(t; ν, 0) · exp(−μ²/2) · E[exp(aY)],   Y ~ χ_{ν+1}
/// ```
///
/// and the chi moment generating function is evaluated by quadrature of the
/// log-concave integrand y^ν exp(−y²/2 + ay), normalised by the same quadrature
/// at a = 0. The ratio stays finite where both densities underflow.
#[derive(Debug, Clone)]
pub struct NoncentralT {
    nu: f64,
    mode0: f64,
    ln_norm0: f64,
}

const INNER_REL_TOL: f64 = 1e-13;
/// Drop, in log units, at which the chi integrand is truncated.
const LOG_CUTOFF: f64 = 60.0;

impl NoncentralT {
    pub fn new(nu: f64) -> Result<Self> {
        check_nu(nu)?;
        let mode0 = nu.sqrt();
        let mut kernel = NoncentralT {
            nu,
            mode0,
            ln_norm0: 0.0,
        };
        kernel.ln_norm0 = kernel.ln_chi_integral(0.0)?;
        Ok(kernel)
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// ln f(t; ν, μ) − ln f(t; ν, 0).
    pub fn ln_ratio(&self, t: f64, mu: f64) -> Result<f64> {
        Ok(self.ln_ratio_above(t, mu, f64::NEG_INFINITY)?.unwrap_or(f64::NEG_INFINITY))
    }

    /// Upper bound on [`NoncentralT::ln_ratio`] that needs no quadrature.
    ///
    /// χ is 1-Lipschitz in a standard normal vector, so
    /// ln E[exp(aY)] ≤ a·E[Y] + a²/2 with E[Y] ≤ √(ν+1).
    pub fn ln_ratio_bound(&self, t: f64, mu: f64) -> f64 {
        let a = self.chi_argument(t, mu);
        -0.5 * mu * mu + a.max(0.0) * (self.nu + 1.0).sqrt() + 0.5 * a * a
    }

    /// As [`NoncentralT::ln_ratio`], but returns `None` without integrating when
    /// [`NoncentralT::ln_ratio_bound`] already places the ratio below `floor`.
    pub fn ln_ratio_above(&self, t: f64, mu: f64, floor: f64) -> Result<Option<f64>> {
        if mu == 0.0 {
            return Ok(Some(0.0));
        }
        if self.ln_ratio_bound(t, mu) < floor {
            return Ok(None);
        }
        let a = self.chi_argument(t, mu);
        let ln_mgf = if a == 0.0 {
            0.0
        } else {
            self.ln_chi_integral(a)? - self.ln_norm0
        };
        Ok(Some(-0.5 * mu * mu + ln_mgf))
    }

    /// a = μt/√(ν+t²)
    fn chi_argument(&self, t: f64, mu: f64) -> f64 {
        let s = t / self.nu.sqrt();
        mu * s / s.hypot(1.0)
    }

    /// Log of ∫₀^∞ y^ν exp(−y²/2 + ay) dy, less the constant ν ln √ν − ν/2.
    ///
    /// The integrand is evaluated around its mode m in the offset z = y − m,
    /// where its log is ν(ln(1 + z/m) − z/m) − z²/2 exactly.
    fn ln_chi_integral(&self, a: f64) -> Result<f64> {
        let nu = self.nu;
        let y0 = self.mode0;
        let disc = (a * a + 4.0 * nu).sqrt();
        let mode = if a >= 0.0 {
            0.5 * (a + disc)
        } else {
            2.0 * nu / (disc - a)
        };
        let ln_peak = nu * (mode / y0).ln() - 0.5 * (mode - y0) * (mode + y0) + a * mode;
        let psi = |z: f64| {
            let w = z / mode;
            nu * (w.ln_1p() - w) - 0.5 * z * z
        };
        let sigma = 1.0 / (1.0 + nu / (mode * mode)).sqrt();

        let mut step = sigma;
        while -psi(step) < LOG_CUTOFF {
            step *= 2.0;
        }
        let hi = step;
        let mut step = sigma;
        let lo = loop {
            if step >= mode {
                break -mode;
            }
            if -psi(-step) >= LOG_CUTOFF {
                break -step;
            }
            step *= 2.0;
        };

        let integrand = |z: f64| {
            if z <= -mode {
                0.0
            } else {
                psi(z).exp()
            }
        };
        let r = integrate_with(
            integrand,
            Interval::finite(lo, hi)?,
            &[0.0],
            QuadratureOptions::with_rel_tol(INNER_REL_TOL),
        )?;
        Ok(ln_peak + r.value.ln())
    }
}
