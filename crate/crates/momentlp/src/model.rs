//! Polynomial jump-diffusion models and their extended generator.
//!
//! A model is `dX = b(t,X) dt + σ(t,X) dW + λ(t,X) dJ` with polynomial
//! coefficients, a polynomial discount rate `r(t,x)`, and a jump measure from
//! [`crate::levy`].  The generator acts on monomials `f = t^i x^j`; jumps are
//! handled by the uncompensated convention, i.e. the drift is understood as
//! already adjusted and `Bf(x) = ∫ [f(x + λy) - f(x)] Λ(dy)`.

use crate::error::{Error, Result};
use crate::levy::{vg_tail_mass, vg_truncated_moment, LevyMeasureSpec};
use crate::poly::{binomial, BiPoly, Var};

/// Default number of truncation moments kept per side of the degree budget:
/// truncation precomputes `c(1)..c(2 * DEFAULT_TRUNCATION_MOMENTS)`.
pub const DEFAULT_TRUNCATION_MOMENTS: u32 = 16;

/// Grid resolution per axis used for sign checks of polynomial coefficients
/// over a box (coefficients in the examples are low-degree, so a moderate
/// grid is exhaustive in practice).
const SIGN_CHECK_GRID: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialModel {
    /// Drift `b(t, x)`.
    pub drift: BiPoly,
    /// Squared diffusion coefficient `σ²(t, x)` (the variance, not `σ`).
    pub sigma2: BiPoly,
    /// Jump scale `λ(t, x)` multiplying raw jump sizes.
    pub jump_scale: BiPoly,
    /// Discount rate `r(t, x)`.
    pub discount: BiPoly,
    pub levy: LevyMeasureSpec,
    /// Initial state.
    pub x0: f64,
    /// Initial time (0 in all bundled examples).
    pub t0: f64,
}

/// The polynomial `(A - r) f_{ij}` produced by applying the generator to the
/// monomial `f_{ij} = t^i x^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorResult {
    pub poly: BiPoly,
}

impl PolynomialModel {
    pub fn new(
        drift: BiPoly,
        sigma2: BiPoly,
        jump_scale: BiPoly,
        discount: BiPoly,
        levy: LevyMeasureSpec,
        x0: f64,
        t0: f64,
    ) -> Result<Self> {
        if !x0.is_finite() || !t0.is_finite() {
            return Err(Error::config(format!(
                "initial point must be finite, got (t0, x0) = ({t0}, {x0})"
            )));
        }
        levy.validate()?;
        Ok(PolynomialModel {
            drift,
            sigma2,
            jump_scale,
            discount,
            levy,
            x0,
            t0,
        })
    }

    /// A pure diffusion (no jumps) with `λ ≡ 0`.
    pub fn diffusion(drift: BiPoly, sigma2: BiPoly, discount: BiPoly, x0: f64) -> Result<Self> {
        PolynomialModel::new(
            drift,
            sigma2,
            BiPoly::zero(),
            discount,
            LevyMeasureSpec::None,
            x0,
            0.0,
        )
    }

    /// Apply the discounted generator to the monomial `t^i x^j`:
    /// `∂f/∂t + b ∂f/∂x + (σ²/2) ∂²f/∂x² + Bf - r f`.
    ///
    /// For monomials the jump part expands to
    /// `B f_{ij} = t^i Σ_{k=1}^{j} C(j,k) x^{j-k} λ(t,x)^k c(k)`.
    pub fn apply_generator(&self, i: u32, j: u32) -> Result<GeneratorResult> {
        let f = BiPoly::monomial(i, j, 1.0);
        let fx = f.diff(Var::X);
        let mut out = f.diff(Var::T);
        out = out.add(&self.drift.mul(&fx));
        out = out.add(&self.sigma2.scale(0.5).mul(&fx.diff(Var::X)));
        if !self.levy.is_none() && !self.jump_scale.is_zero() {
            let mut lam_pow = BiPoly::constant(1.0);
            for k in 1..=j {
                lam_pow = lam_pow.mul(&self.jump_scale);
                if lam_pow.is_zero() {
                    break;
                }
                let ck = self.levy.jump_moment(k)?;
                if ck != 0.0 {
                    let term = lam_pow
                        .mul(&BiPoly::monomial(i, j - k, 1.0))
                        .scale(binomial(j, k) * ck);
                    out = out.add(&term);
                }
            }
        }
        out = out.sub(&self.discount.mul(&f));
        Ok(GeneratorResult { poly: out })
    }

    /// Check that `σ² >= 0` on the box, and that the jump scale is positive
    /// there whenever a non-constant `λ` multiplies an active jump measure.
    pub fn validate_on_box(&self, t: (f64, f64), x: (f64, f64)) -> Result<()> {
        let sig_min = grid_min(&self.sigma2, t, x);
        let sig_scale = 1.0 + grid_max_abs(&self.sigma2, t, x);
        if sig_min < -1e-9 * sig_scale {
            return Err(Error::config(format!(
                "sigma2 must be nonnegative on the domain; minimum found {sig_min:.6e}"
            )));
        }
        let lam_is_const = self.jump_scale.total_degree().unwrap_or(0) == 0;
        if !self.levy.is_none() && !lam_is_const {
            let lam_min = grid_min(&self.jump_scale, t, x);
            if lam_min <= 0.0 {
                return Err(Error::config(format!(
                    "jump scale must be positive on the domain; minimum found {lam_min:.6e}"
                )));
            }
        }
        Ok(())
    }

    /// Smallest value of the jump scale over `[t0, t0 + horizon] × [lo, hi]`.
    pub fn min_jump_scale(&self, barriers: (f64, f64), horizon: f64) -> f64 {
        grid_min(&self.jump_scale, (self.t0, self.t0 + horizon), barriers)
    }

    /// Restrict the jump measure to the sizes that cannot clear the barrier
    /// interval in one jump, and add the removed mass to the discount rate as
    /// a killing rate.
    ///
    /// The truncation box is `±(b_plus - b_minus) / λ̲` with `λ̲` the minimum
    /// jump scale over `[t0, t0 + horizon] × B`; the resulting measure is
    /// frozen into a `MomentTable` with `c(1)..c(2 n_max)`.  Models without a
    /// jump density (no jumps, or an already frozen table) pass through
    /// unchanged.
    pub fn truncate_for_barriers(
        &self,
        barriers: (f64, f64),
        horizon: f64,
        n_max: u32,
    ) -> Result<PolynomialModel> {
        let (b_lo, b_hi) = barriers;
        if !b_lo.is_finite() || !b_hi.is_finite() {
            return Err(Error::config(
                "barrier truncation requires a bounded barrier interval".to_string(),
            ));
        }
        if !(b_lo < b_hi) {
            return Err(Error::config(format!(
                "barriers must satisfy b_minus < b_plus, got [{b_lo}, {b_hi}]"
            )));
        }
        if !(horizon > 0.0) || n_max == 0 {
            return Err(Error::config(format!(
                "truncation requires horizon > 0 and n_max >= 1, got horizon={horizon}, n_max={n_max}"
            )));
        }
        let (c, g, m, base_lo, base_hi, base_tail) = match self.levy {
            LevyMeasureSpec::None | LevyMeasureSpec::MomentTable { .. } => {
                return Ok(self.clone());
            }
            LevyMeasureSpec::Vg { c, g, m } => (c, g, m, f64::NEG_INFINITY, f64::INFINITY, 0.0),
            LevyMeasureSpec::TruncatedVg {
                c,
                g,
                m,
                l_minus,
                l_plus,
            } => (c, g, m, l_minus, l_plus, vg_tail_mass(c, g, m, l_minus, l_plus)?),
        };
        let lam_min = self.min_jump_scale(barriers, horizon);
        if lam_min <= 0.0 {
            return Err(Error::config(format!(
                "jump-size truncation needs a positive jump scale on the domain; minimum found {lam_min:.6e}"
            )));
        }
        let span = (b_hi - b_lo) / lam_min;
        let l_plus = span.min(base_hi);
        let l_minus = (-span).max(base_lo);

        let mut moments = Vec::with_capacity(2 * n_max as usize);
        for k in 1..=2 * n_max {
            moments.push(vg_truncated_moment(c, g, m, l_minus, l_plus, k)?);
        }
        let lambda_star = (vg_tail_mass(c, g, m, l_minus, l_plus)? - base_tail).max(0.0);

        Ok(PolynomialModel {
            drift: self.drift.clone(),
            sigma2: self.sigma2.clone(),
            jump_scale: self.jump_scale.clone(),
            discount: self.discount.add(&BiPoly::constant(lambda_star)),
            levy: LevyMeasureSpec::MomentTable {
                moments,
                lambda_star,
            },
            x0: self.x0,
            t0: self.t0,
        })
    }
}

fn grid_eval<F: FnMut(f64)>(poly: &BiPoly, t: (f64, f64), x: (f64, f64), mut visit: F) {
    let n = SIGN_CHECK_GRID;
    for a in 0..=n {
        let tv = t.0 + (t.1 - t.0) * a as f64 / n as f64;
        for b in 0..=n {
            let xv = x.0 + (x.1 - x.0) * b as f64 / n as f64;
            visit(poly.eval(tv, xv));
        }
    }
}

fn grid_min(poly: &BiPoly, t: (f64, f64), x: (f64, f64)) -> f64 {
    let mut min = f64::INFINITY;
    grid_eval(poly, t, x, |v| min = min.min(v));
    min
}

fn grid_max_abs(poly: &BiPoly, t: (f64, f64), x: (f64, f64)) -> f64 {
    let mut max = 0.0f64;
    grid_eval(poly, t, x, |v| max = max.max(v.abs()));
    max
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_rel(actual: f64, expected: f64, tol: f64) {
        let scale = expected.abs().max(1.0);
        assert!(
            (actual - expected).abs() <= tol * scale,
            "expected {expected}, got {actual}"
        );
    }

    fn gbm(b: f64, sigma2: f64) -> PolynomialModel {
        PolynomialModel::diffusion(
            BiPoly::monomial(0, 1, b),
            BiPoly::monomial(0, 2, sigma2),
            BiPoly::zero(),
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn generator_on_gbm_square_monomial() {
        // b = 0.1 x, sigma2 = 0.01 x^2, f = x^2:
        // b f' + sigma2/2 f'' = (2*0.1 + 0.01) x^2 = 0.21 x^2.
        let g = gbm(0.1, 0.01).apply_generator(0, 2).unwrap();
        assert_eq!(g.poly.terms().count(), 1);
        assert_rel(g.poly.coeff(0, 2), 0.21, 1e-14);
    }

    #[test]
    fn generator_on_mean_reverting_linear_monomial() {
        // dX = (ab - aX) dt + sqrt(sigma2 X) dW with constant discount r:
        // (A - r) x = ab - a x - r x.
        let (a, b, r) = (0.5, 1.0, 0.03);
        let model = PolynomialModel::diffusion(
            BiPoly::from_terms(&[(0, 0, a * b), (0, 1, -a)]),
            BiPoly::monomial(0, 1, 0.04),
            BiPoly::constant(r),
            1.0,
        )
        .unwrap();
        let gres = model.apply_generator(0, 1).unwrap();
        assert_rel(gres.poly.coeff(0, 0), a * b, 1e-14);
        assert_rel(gres.poly.coeff(0, 1), -(a + r), 1e-14);
    }

    #[test]
    fn generator_kills_constants_only_through_discounting() {
        let model = PolynomialModel::diffusion(
            BiPoly::monomial(0, 1, 0.1),
            BiPoly::monomial(0, 2, 0.01),
            BiPoly::from_terms(&[(0, 0, 0.02), (1, 0, 0.01)]),
            1.0,
        )
        .unwrap();
        let gres = model.apply_generator(0, 0).unwrap();
        assert_eq!(gres.poly, model.discount.scale(-1.0));
    }

    #[test]
    fn generator_expands_jump_binomially_for_drift_only_model() {
        // Constant drift b, lambda = 1, explicit moment table:
        // (A)x^m = b m x^{m-1} + sum_k C(m,k) c(k) x^{m-k}.
        let b = 0.2;
        let moments = vec![0.3, -0.1, 0.05, 0.02];
        let model = PolynomialModel::new(
            BiPoly::constant(b),
            BiPoly::zero(),
            BiPoly::constant(1.0),
            BiPoly::zero(),
            LevyMeasureSpec::MomentTable {
                moments: moments.clone(),
                lambda_star: 0.0,
            },
            0.0,
            0.0,
        )
        .unwrap();
        let m = 4u32;
        let gres = model.apply_generator(0, m).unwrap();
        for k in 1..=m {
            let expected = binomial(m, k) * moments[(k - 1) as usize]
                + if k == 1 { b * m as f64 } else { 0.0 };
            assert_rel(gres.poly.coeff(0, m - k), expected, 1e-14);
        }
    }

    #[test]
    fn generator_reports_the_missing_moment_index() {
        let model = PolynomialModel::new(
            BiPoly::zero(),
            BiPoly::zero(),
            BiPoly::constant(1.0),
            BiPoly::zero(),
            LevyMeasureSpec::MomentTable {
                moments: vec![0.1, 0.2],
                lambda_star: 0.0,
            },
            0.0,
            0.0,
        )
        .unwrap();
        match model.apply_generator(0, 3) {
            Err(Error::MissingMoment { k: 3, .. }) => {}
            other => panic!("expected MissingMoment {{ k: 3 }}, got {other:?}"),
        }
    }

    #[test]
    fn generator_is_linear_in_the_monomial_exponents() {
        let model = PolynomialModel::new(
            BiPoly::from_terms(&[(0, 0, 0.1), (0, 1, -0.2)]),
            BiPoly::monomial(0, 1, 0.09),
            BiPoly::constant(1.0),
            BiPoly::constant(0.02),
            LevyMeasureSpec::TruncatedVg {
                c: 0.5,
                g: 8.0,
                m: 12.0,
                l_minus: -2.0,
                l_plus: 2.0,
            },
            1.0,
            0.0,
        )
        .unwrap();
        // (A - r)(2 f_{1,2} - 3 f_{0,3}) vs the combination of the parts,
        // evaluated at scattered points.
        let g12 = model.apply_generator(1, 2).unwrap().poly;
        let g03 = model.apply_generator(0, 3).unwrap().poly;
        let combo = g12.scale(2.0).sub(&g03.scale(3.0));
        for &(t, x) in &[(0.0, 1.0), (0.5, 0.8), (1.0, 1.3), (0.25, 0.55)] {
            let direct = 2.0 * g12.eval(t, x) - 3.0 * g03.eval(t, x);
            assert_rel(combo.eval(t, x), direct, 1e-12);
        }
    }

    #[test]
    fn generator_degree_growth_is_bounded() {
        let model = PolynomialModel::new(
            BiPoly::from_terms(&[(1, 1, 0.3)]),
            BiPoly::monomial(0, 2, 0.04),
            BiPoly::from_terms(&[(0, 0, 1.0), (0, 1, 0.1)]),
            BiPoly::constant(0.01),
            LevyMeasureSpec::MomentTable {
                moments: vec![0.1; 8],
                lambda_star: 0.0,
            },
            1.0,
            0.0,
        )
        .unwrap();
        let (i, j) = (2u32, 4u32);
        let gres = model.apply_generator(i, j).unwrap();
        let max_dt = 1; // max t-degree among model polynomials
        let max_dx = 2; // max x-degree among model polynomials
        let lam_dx = 1;
        assert!(gres.poly.degree_t().unwrap() <= i + max_dt);
        assert!(gres.poly.degree_x().unwrap() <= j + max_dx + lam_dx * j);
    }

    #[test]
    fn truncation_freezes_moments_and_adds_killing_rate() {
        let (c, g, m) = (0.5, 8.0, 12.0);
        let base = PolynomialModel::new(
            BiPoly::constant(0.2),
            BiPoly::zero(),
            BiPoly::constant(1.0),
            BiPoly::zero(),
            LevyMeasureSpec::Vg { c, g, m },
            0.0,
            0.0,
        )
        .unwrap();
        let trunc = base.truncate_for_barriers((-1.0, 1.0), 1.0, 8).unwrap();
        match &trunc.levy {
            LevyMeasureSpec::MomentTable { moments, lambda_star } => {
                assert_eq!(moments.len(), 16);
                let expected = vg_tail_mass(c, g, m, -2.0, 2.0).unwrap();
                assert_rel(*lambda_star, expected, 1e-14);
                for k in 1..=16u32 {
                    let direct = vg_truncated_moment(c, g, m, -2.0, 2.0, k).unwrap();
                    assert_rel(moments[(k - 1) as usize], direct, 1e-14);
                }
                assert_rel(trunc.discount.coeff(0, 0), expected, 1e-14);
            }
            other => panic!("expected MomentTable, got {other:?}"),
        }
    }

    #[test]
    fn truncation_in_log_space_gives_symmetric_log_width() {
        let base = PolynomialModel::new(
            BiPoly::constant(0.05),
            BiPoly::zero(),
            BiPoly::constant(1.0),
            BiPoly::zero(),
            LevyMeasureSpec::Vg {
                c: 0.5,
                g: 8.0,
                m: 12.0,
            },
            0.0,
            0.0,
        )
        .unwrap();
        let barriers = (0.5f64.ln(), 2.0f64.ln());
        let trunc = base.truncate_for_barriers(barriers, 1.0, 4).unwrap();
        // Width log 2 - log 0.5 = 2 log 2 ~ 1.386.
        let width = 2.0 * 2.0f64.ln();
        match &trunc.levy {
            LevyMeasureSpec::MomentTable { moments, .. } => {
                let direct =
                    vg_truncated_moment(0.5, 8.0, 12.0, -width, width, 1).unwrap();
                assert_rel(moments[0], direct, 1e-14);
            }
            other => panic!("expected MomentTable, got {other:?}"),
        }
    }

    #[test]
    fn truncation_passes_through_jump_free_models() {
        let model = gbm(0.1, 0.01);
        let trunc = model.truncate_for_barriers((1.0, 5.0), 1.0, 8).unwrap();
        assert_eq!(model, trunc);
        assert_eq!(trunc.levy.lambda_star().unwrap(), 0.0);
    }

    #[test]
    fn truncation_rejects_vanishing_jump_scale_and_bad_barriers() {
        let base = PolynomialModel::new(
            BiPoly::constant(0.2),
            BiPoly::zero(),
            BiPoly::zero(),
            BiPoly::zero(),
            LevyMeasureSpec::Vg {
                c: 0.5,
                g: 8.0,
                m: 12.0,
            },
            0.0,
            0.0,
        )
        .unwrap();
        assert!(base.truncate_for_barriers((-1.0, 1.0), 1.0, 8).is_err());
        let ok = PolynomialModel { jump_scale: BiPoly::constant(1.0), ..base };
        assert!(ok.truncate_for_barriers((1.0, f64::INFINITY), 1.0, 8).is_err());
        assert!(ok.truncate_for_barriers((1.0, 1.0), 1.0, 8).is_err());
    }

    #[test]
    fn box_validation_accepts_cir_and_rejects_negative_variance() {
        let cir = PolynomialModel::diffusion(
            BiPoly::from_terms(&[(0, 0, 0.5), (0, 1, -0.5)]),
            BiPoly::monomial(0, 1, 0.04),
            BiPoly::zero(),
            1.0,
        )
        .unwrap();
        assert!(cir.validate_on_box((0.0, 1.0), (0.5, 1.5)).is_ok());
        assert!(cir.validate_on_box((0.0, 1.0), (-1.0, 1.5)).is_err());
    }
}
