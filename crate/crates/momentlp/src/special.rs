//! Special functions needed for exponential-tail jump moments and Gaussian
//! integrals: the regularized incomplete gamma functions, the exponential
//! integral E1, and the normal CDF derived from them.
//!
//! All routines target a relative accuracy of about 1e-12 on the argument
//! ranges used by the pricing code and are validated against quadrature and
//! closed forms in the test suite.

use crate::error::{Error, Result};

const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;
const MAX_ITER: usize = 500;
const EPS: f64 = 1e-16;
/// Floor used inside Lentz's continued-fraction algorithm.
const TINY: f64 = 1e-300;

/// Natural log of the gamma function for `z > 0` (Lanczos, g = 7).
pub fn ln_gamma(z: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    debug_assert!(z > 0.0);
    if z < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate range.
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * z).sin().ln()
            - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut sum = 0.999_999_999_999_809_9;
    for (i, c) in COEFFS.iter().enumerate() {
        sum += c / (z + (i + 1) as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + sum.ln()
}

/// Regularized lower incomplete gamma function P(a, x) for `a > 0`, `x >= 0`.
///
/// Series expansion for `x < a + 1`, Lentz continued fraction for the
/// complement otherwise.
pub fn reg_lower_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !(x >= 0.0) || !a.is_finite() || !x.is_finite() {
        return Err(Error::domain(format!(
            "reg_lower_gamma requires a > 0 and x >= 0, got a={a}, x={x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        Ok(1.0 - gamma_cf(a, x)?)
    }
}

/// Regularized upper incomplete gamma function Q(a, x) = 1 - P(a, x).
pub fn reg_upper_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !(x >= 0.0) || !a.is_finite() || !x.is_finite() {
        return Err(Error::domain(format!(
            "reg_upper_gamma requires a > 0 and x >= 0, got a={a}, x={x}"
        )));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < a + 1.0 {
        Ok(1.0 - gamma_series(a, x)?)
    } else {
        gamma_cf(a, x)
    }
}

fn gamma_prefactor(a: f64, x: f64) -> f64 {
    (a * x.ln() - x - ln_gamma(a)).exp()
}

fn gamma_series(a: f64, x: f64) -> Result<f64> {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut denom = a;
    for _ in 0..MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            return Ok(sum * gamma_prefactor(a, x));
        }
    }
    Err(Error::numerical(format!(
        "incomplete gamma series failed to converge for a={a}, x={x}"
    )))
}

fn gamma_cf(a: f64, x: f64) -> Result<f64> {
    // Q(a, x) = prefactor * 1 / (x + 1 - a - 1*(1-a)/(x + 3 - a - ...)).
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b.max(TINY);
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            return Ok(h * gamma_prefactor(a, x));
        }
    }
    Err(Error::numerical(format!(
        "incomplete gamma continued fraction failed to converge for a={a}, x={x}"
    )))
}

/// Lower incomplete gamma with integer shape, unregularized:
/// `int_0^x s^(k-1) e^(-s) ds = (k-1)! P(k, x)`.
pub fn lower_gamma_int(k: u32, x: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain(
            "lower_gamma_int requires shape k >= 1".to_string(),
        ));
    }
    Ok(factorial(k - 1) * reg_lower_gamma(k as f64, x)?)
}

/// k! as a float; exact for small k, relative error a few ulps beyond.
pub fn factorial(k: u32) -> f64 {
    (1..=k as u64).fold(1.0, |acc, i| acc * i as f64)
}

/// Exponential integral E1(x) = int_x^inf e^(-s)/s ds for `x > 0`.
///
/// Power series with the Euler-Mascheroni constant for `x <= 1`, Lentz
/// continued fraction for `x > 1`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "exp_integral_e1 requires x > 0, got {x}"
        )));
    }
    if x <= 1.0 {
        // E1(x) = -gamma - ln x + sum_{n>=1} (-1)^(n+1) x^n / (n n!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for n in 1..=MAX_ITER {
            term *= -x / n as f64;
            let contrib = -term / n as f64;
            sum += contrib;
            if contrib.abs() < (sum.abs() + 1.0) * EPS {
                return Ok(-EULER_MASCHERONI - x.ln() + sum);
            }
        }
        Err(Error::numerical(format!(
            "E1 series failed to converge for x={x}"
        )))
    } else {
        // E1(x) = e^(-x) / (x + 1 - 1^2/(x + 3 - 2^2/(x + 5 - ...)))
        let mut b = x + 1.0;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=MAX_ITER {
            let an = -((i * i) as f64);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                return Ok(h * (-x).exp());
            }
        }
        Err(Error::numerical(format!(
            "E1 continued fraction failed to converge for x={x}"
        )))
    }
}

/// Complementary error function via the incomplete gamma identity
/// `erfc(y) = Q(1/2, y^2)` for `y >= 0`.
pub fn erfc(y: f64) -> f64 {
    if y < 0.0 {
        return 2.0 - erfc(-y);
    }
    if y == 0.0 {
        return 1.0;
    }
    // y^2 overflows the CF only far beyond where erfc underflows to 0.
    if y > 27.0 {
        return 0.0;
    }
    reg_upper_gamma(0.5, y * y).expect("erfc: incomplete gamma on valid domain")
}

/// Standard normal cumulative distribution function.
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
