//! Log-gamma and the regularized incomplete beta function.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Number of Taylor terms used by the expansion of ln Γ(1 + z) for |z| ≤ 1/2.
const ZETA_TERMS: usize = 40;

/// ζ(k) − 1 for k = 2..ZETA_TERMS+1, computed once by direct summation plus an
/// Euler–Maclaurin tail.
fn zeta_minus_one() -> &'static [f64; ZETA_TERMS] {
    static TABLE: OnceLock<[f64; ZETA_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        const CUT: f64 = 50.0;
        let mut out = [0.0; ZETA_TERMS];
        for (i, slot) in out.iter_mut().enumerate() {
            let k = (i + 2) as f64;
            // tail: sum_{n >= CUT} n^-k
            let nk = CUT.powf(-k);
            let mut tail = CUT * nk / (k - 1.0) + 0.5 * nk;
            tail += k * nk / CUT / 12.0;
            tail -= k * (k + 1.0) * (k + 2.0) * nk / CUT.powi(3) / 720.0;
            tail += k * (k + 1.0) * (k + 2.0) * (k + 3.0) * (k + 4.0) * nk / CUT.powi(5) / 30240.0;
            let mut head = 0.0;
            for n in (2..50).rev() {
                head += (n as f64).powf(-k);
            }
            *slot = head + tail;
        }
        out
    })
}

/// ln Γ(1 + z) for |z| ≤ 1/2, accurate in the relative sense near z = 0.
fn ln_gamma_1p(z: f64) -> f64 {
    let table = zeta_minus_one();
    let mut sum = 0.0;
    for (i, c) in table.iter().enumerate().rev() {
        let k = (i + 2) as f64;
        let sign = if (i + 2) % 2 == 0 { 1.0 } else { -1.0 };
        sum = sum * z + sign * c / k;
    }
    // sum currently holds sum_k (-1)^k (ζ(k)-1) z^{k-2} / k
    -z.ln_1p() + z * (1.0 - EULER_GAMMA) + sum * z * z
}

fn ln_gamma_stirling(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    let series = r
        * (1.0 / 12.0
            + r2 * (-1.0 / 360.0
                + r2 * (1.0 / 1260.0
                    + r2 * (-1.0 / 1680.0
                        + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360360.0 + r2 / 156.0))))));
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series
}

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return ln_gamma_unchecked(x + 1.0) - x.ln();
    }
    if x <= 1.5 {
        return ln_gamma_1p(x - 1.0);
    }
    if x <= 2.5 {
        let z = x - 2.0;
        return z.ln_1p() + ln_gamma_1p(z);
    }
    if x >= 8.0 {
        return ln_gamma_stirling(x);
    }
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < 8.0 {
        prod *= shifted;
        shifted += 1.0;
    }
    ln_gamma_stirling(shifted) - prod.ln()
}

pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma_unchecked(a) + ln_gamma_unchecked(b) - ln_gamma_unchecked(a + b)
}

/// Regularized incomplete beta I_x(a, b).
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!(
            "reg_inc_beta requires a, b > 0, got a = {a}, b = {b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!(
            "reg_inc_beta requires 0 <= x <= 1, got {x}"
        )));
    }
    Ok(reg_inc_beta_pair(a, b, x, 1.0 - x).0)
}

/// Returns (I_x(a,b), 1 − I_x(a,b)) where `y = 1 − x` is supplied by the
/// caller so that it can carry more precision than `1.0 - x`.
pub(crate) fn reg_inc_beta_pair(a: f64, b: f64, x: f64, y: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if y <= 0.0 {
        return (1.0, 0.0);
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        let v = (ln_front.exp() * beta_cf(a, b, x, y) / a).clamp(0.0, 1.0);
        (v, 1.0 - v)
    } else {
        let v = (ln_front.exp() * beta_cf(b, a, y, x) / b).clamp(0.0, 1.0);
        (1.0 - v, v)
    }
}

/// Continued fraction for I_x(a,b), evaluated with the modified Lentz method.
fn beta_cf(a: f64, b: f64, x: f64, _y: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}
