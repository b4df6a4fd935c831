//! Adaptive quadrature for integrals against exponential-tail jump densities.
//!
//! These routines are deliberately independent of the closed forms in
//! [`crate::levy`]: they integrate the density directly and serve as the
//! reference the closed forms are validated against.

use crate::error::{Error, Result};

/// Absolute-plus-relative tolerance for the Lévy integrals.
pub const QUAD_TOL: f64 = 1e-10;

const MAX_DEPTH: u32 = 60;

/// Adaptive Simpson integration of `f` over `[a, b]` to a combined
/// absolute/relative tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::config(format!(
            "adaptive_simpson requires finite limits, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    // Coarse pre-pass fixes the scale for the relative part of the tolerance
    // and seeds the recursion with panels small enough to see narrow features.
    let panels = 64;
    let h = (b - a) / panels as f64;
    let mut coarse = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        coarse += simpson(f, lo, lo + h).0;
    }
    let eps = tol * (1.0 + coarse.abs());

    let mut total = 0.0;
    let mut ok = true;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        let hi = lo + h;
        let (whole, fm) = simpson(f, lo, hi);
        let (v, converged) = adapt(f, lo, hi, eps / panels as f64, whole, f(lo), f(hi), fm, 0);
        total += v;
        ok &= converged;
    }
    if ok {
        Ok(total)
    } else {
        Err(Error::numerical(format!(
            "adaptive quadrature did not reach tolerance {tol:.1e}; achieved estimate {total:.12e}"
        )))
    }
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    ((b - a) / 6.0 * (f(a) + 4.0 * fm + f(b)), fm)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    eps: f64,
    whole: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    depth: u32,
) -> (f64, bool) {
    let m = 0.5 * (a + b);
    let (left, flm) = simpson(f, a, m);
    let (right, frm) = simpson(f, m, b);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps {
        return (left + right + delta / 15.0, true);
    }
    if depth >= MAX_DEPTH {
        return (left + right, false);
    }
    let (lv, lok) = adapt(f, a, m, eps / 2.0, left, fa, fm, flm, depth + 1);
    let (rv, rok) = adapt(f, m, b, eps / 2.0, right, fm, fb, frm, depth + 1);
    (lv + rv, lok && rok)
}

/// Which integral against the two-sided exponential-tail jump density
/// `k(y) = (C/y) e^{-M y} 1_{y>0} + (C/|y|) e^{-G |y|} 1_{y<0}` to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevyIntegrand {
    /// `c(k) = ∫ y^k k(y) dy` over the truncation box (or the whole line).
    Moment { k: u32 },
    /// `λ* = ∫_{outside the box} k(y) dy`.
    TailMass,
    /// `c = ∫ (e^y - 1) k(y) dy` over the whole line (needs `M > 1`).
    ExponentialC,
}

/// Adaptive quadrature of a jump-density integral.
///
/// `bounds = Some((l_minus, l_plus))` restricts moments to the box and is
/// required for the tail mass; `None` integrates moments over the whole line.
/// The integrable `1/|y|` endpoint at the origin is removed by substituting
/// `y = ±e^{-u}` on `(0, 1]`, which also makes the integrand smooth there.
pub fn levy_quadrature(
    kind: LevyIntegrand,
    c: f64,
    g: f64,
    m: f64,
    bounds: Option<(f64, f64)>,
) -> Result<f64> {
    if !(c > 0.0 && g > 0.0 && m > 0.0) {
        return Err(Error::domain(format!(
            "jump density parameters must be positive, got C={c}, G={g}, M={m}"
        )));
    }
    if let Some((lo, hi)) = bounds {
        if !(lo < 0.0 && hi > 0.0) {
            return Err(Error::domain(format!(
                "truncation box must straddle the origin, got [{lo}, {hi}]"
            )));
        }
    }
    match kind {
        LevyIntegrand::Moment { k } => {
            if k == 0 {
                return Err(Error::domain(
                    "moment k = 0 diverges: infinite activity at origin".to_string(),
                ));
            }
            let (neg_cap, pos_cap) = match bounds {
                Some((lo, hi)) => (-lo, hi),
                // Effective support cap: e^{-rate*y} is below any meaningful
                // level once rate*y > 80.
                None => (1.0 + 80.0 / g, 1.0 + 80.0 / m),
            };
            let pos = one_sided_origin_integral(&|y: f64| y.powi(k as i32), k, m, pos_cap)?;
            let neg = one_sided_origin_integral(&|y: f64| y.powi(k as i32), k, g, neg_cap)?;
            Ok(c * (pos + if k % 2 == 0 { neg } else { -neg }))
        }
        LevyIntegrand::TailMass => {
            let (lo, hi) =
                bounds.ok_or_else(|| Error::config("tail mass requires a truncation box"))?;
            let pos = exponential_tail_integral(m, hi)?;
            let neg = exponential_tail_integral(g, -lo)?;
            Ok(c * (pos + neg))
        }
        LevyIntegrand::ExponentialC => {
            if m <= 1.0 {
                return Err(Error::domain(format!(
                    "exponential moment requires M > 1, got M={m}"
                )));
            }
            // Positive side: phi(y) = e^y - 1 ~ y near 0, effective decay
            // e^{-(M-1)y} at infinity.
            let pos_cap = 1.0 + 80.0 / (m - 1.0);
            let pos = one_sided_origin_integral(&|y: f64| y.exp_m1(), 1, m, pos_cap)?;
            // Negative side after y -> -y: phi(y) = e^{-y} - 1 ~ -y, decay G.
            let neg_cap = 1.0 + 80.0 / g;
            let neg = one_sided_origin_integral(&|y: f64| (-y).exp_m1(), 1, g, neg_cap)?;
            Ok(c * (pos + neg))
        }
    }
}

/// `∫_0^cap phi(y) e^{-rate*y} / y dy` where `phi(y) = O(y^decay)` at the
/// origin with `decay >= 1`.  The piece on `(0, min(1, cap)]` uses the
/// substitution `y = e^{-u}`, turning it into a smooth integral of
/// `phi(e^{-u}) e^{-rate e^{-u}}` whose tail decays like `e^{-decay*u}`.
fn one_sided_origin_integral(
    phi: &dyn Fn(f64) -> f64,
    decay: u32,
    rate: f64,
    cap: f64,
) -> Result<f64> {
    debug_assert!(decay >= 1);
    let split = cap.min(1.0);
    let u_hi = 75.0 / decay as f64;
    let u_lo = -split.ln();
    // After the substitution the Jacobian e^{-u} cancels the 1/y factor.
    let inner = adaptive_simpson(
        &|u: f64| {
            let y = (-u).exp();
            phi(y) * (-rate * y).exp()
        },
        u_lo,
        u_hi,
        QUAD_TOL,
    )?;
    let outer = if cap > 1.0 {
        adaptive_simpson(&|y: f64| phi(y) * (-rate * y).exp() / y, 1.0, cap, QUAD_TOL)?
    } else {
        0.0
    };
    Ok(inner + outer)
}

/// `∫_edge^inf e^{-rate*y} / y dy`, computed as
/// `e^{-rate*edge} ∫_0^inf e^{-s} / (rate*edge + s) ds` so the quadrature
/// sees an O(1) integrand even when the tail mass itself is far below the
/// tolerance scale.
fn exponential_tail_integral(rate: f64, edge: f64) -> Result<f64> {
    debug_assert!(edge > 0.0);
    let re = rate * edge;
    let inner = adaptive_simpson(&|s: f64| (-s).exp() / (re + s), 0.0, 75.0, QUAD_TOL)?;
    Ok((-re).exp() * inner)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_simpson_handles_smooth_and_peaked_integrands() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-10);

        // Narrow Gaussian: integral over [-1, 1] of N(0, 1e-4) density ~ 1.
        let s = 0.01;
        let v = adaptive_simpson(
            &|x: f64| (-0.5 * (x / s).powi(2)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt()),
            -1.0,
            1.0,
            1e-12,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-9, "got {v}");

        let v = adaptive_simpson(&|x: f64| x.powi(7) - 3.0 * x, -2.0, 2.0, 1e-12).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn moment_quadrature_matches_hand_integrals() {
        // For k=1, one positive side: int_0^L e^{-My} dy = (1 - e^{-ML})/M.
        let c = 1.0;
        let (g, m) = (5.0, 3.0);
        let l = 1.5;
        let v = levy_quadrature(LevyIntegrand::Moment { k: 1 }, c, g, m, Some((-l, l))).unwrap();
        let pos = (1.0 - (-m * l).exp()) / m;
        let neg = (1.0 - (-g * l).exp()) / g;
        assert!((v - (pos - neg)).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn tail_mass_requires_bounds_and_moment_zero_is_rejected() {
        assert!(levy_quadrature(LevyIntegrand::TailMass, 0.5, 8.0, 12.0, None).is_err());
        assert!(
            levy_quadrature(LevyIntegrand::Moment { k: 0 }, 0.5, 8.0, 12.0, Some((-2.0, 2.0)))
                .is_err()
        );
        assert!(levy_quadrature(LevyIntegrand::ExponentialC, 0.5, 8.0, 0.9, None).is_err());
    }

    #[test]
    fn exponential_c_with_symmetric_rates_matches_log_expression() {
        // With G = M: c = C [log(M/(M-1)) + log(M/(M+1))].
        let (c, m) = (0.7, 5.0);
        let v = levy_quadrature(LevyIntegrand::ExponentialC, c, m, m, None).unwrap();
        let expected = c * ((m / (m - 1.0)).ln() + (m / (m + 1.0)).ln());
        assert!(
            (v - expected).abs() <= 1e-8 * expected.abs().max(1e-3),
            "got {v}, expected {expected}"
        );
    }
}
