//! Sparse bivariate polynomials in the variables `(t, x)`.
//!
//! Key operations: ring arithmetic, partial derivatives, evaluation, and
//! substitution of one-dimensional affine maps `u -> offset + scale * u`
//! into either variable.  The latter is what moves a polynomial between the
//! actual coordinates of a problem and unit-box coordinates.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest row of Pascal's triangle kept in the shared table.  Expansions of
/// affine substitutions and moment conditions stay well below this for any
/// practical truncation degree.
pub const MAX_BINOMIAL_N: u32 = 80;

/// Coefficients whose magnitude falls below this fraction of the largest
/// coefficient are dropped after every arithmetic operation.
const COEFF_DROP_REL: f64 = 1e-14;

fn pascal_table() -> &'static Vec<Vec<u128>> {
    static TABLE: OnceLock<Vec<Vec<u128>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = MAX_BINOMIAL_N as usize;
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(n + 1);
        rows.push(vec![1]);
        for i in 1..=n {
            let prev = &rows[i - 1];
            let mut row = vec![1u128; i + 1];
            for k in 1..i {
                row[k] = prev[k - 1] + prev[k];
            }
            rows.push(row);
        }
        rows
    })
}

/// Binomial coefficient C(n, k) as a float, computed from an exact integer
/// Pascal table (n <= `MAX_BINOMIAL_N`).
///
/// # Panics
/// Panics if `n` exceeds `MAX_BINOMIAL_N`; callers validate degrees first.
pub fn binomial(n: u32, k: u32) -> f64 {
    assert!(
        n <= MAX_BINOMIAL_N,
        "binomial({n}, {k}) exceeds the precomputed table"
    );
    if k > n {
        return 0.0;
    }
    pascal_table()[n as usize][k as usize] as f64
}

/// Which variable of a bivariate polynomial an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    X,
}

/// One-dimensional affine change of variable `u -> offset + scale * u`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AffineMap1D {
    offset: f64,
    scale: f64,
}

impl AffineMap1D {
    pub fn new(offset: f64, scale: f64) -> Result<Self> {
        if !offset.is_finite() || !scale.is_finite() {
            return Err(Error::config(format!(
                "affine map coefficients must be finite, got offset={offset}, scale={scale}"
            )));
        }
        if scale == 0.0 {
            return Err(Error::config("affine map scale must be nonzero"));
        }
        Ok(AffineMap1D { offset, scale })
    }

    pub fn identity() -> Self {
        AffineMap1D {
            offset: 0.0,
            scale: 1.0,
        }
    }

    /// Map sending the unit interval [0, 1] onto [lo, hi].
    pub fn unit_to(lo: f64, hi: f64) -> Result<Self> {
        AffineMap1D::new(lo, hi - lo)
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn apply(&self, u: f64) -> f64 {
        self.offset + self.scale * u
    }

    /// The inverse map; always exists because `scale != 0`.
    pub fn inverse(&self) -> Self {
        AffineMap1D {
            offset: -self.offset / self.scale,
            scale: 1.0 / self.scale,
        }
    }
}

/// Sparse polynomial in `(t, x)` with `f64` coefficients, keyed by exponent
/// pairs `(i, j)` meaning `t^i x^j`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), f64>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn constant(c: f64) -> Self {
        BiPoly::from_terms(&[(0, 0, c)])
    }

    /// The monomial `c * t^i x^j`.
    pub fn monomial(i: u32, j: u32, c: f64) -> Self {
        BiPoly::from_terms(&[(i, j, c)])
    }

    /// The coordinate polynomial `t`.
    pub fn t() -> Self {
        BiPoly::monomial(1, 0, 1.0)
    }

    /// The coordinate polynomial `x`.
    pub fn x() -> Self {
        BiPoly::monomial(0, 1, 1.0)
    }

    /// Build from `(t-degree, x-degree, coefficient)` triples; repeated
    /// exponent pairs accumulate.
    pub fn from_terms(terms: &[(u32, u32, f64)]) -> Self {
        let mut p = BiPoly::default();
        for &(i, j, c) in terms {
            *p.terms.entry((i, j)).or_insert(0.0) += c;
        }
        p.normalize();
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate terms as `((i, j), coefficient)` in graded BTreeMap order.
    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn coeff(&self, i: u32, j: u32) -> f64 {
        self.terms.get(&(i, j)).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Maximum total degree `i + j`, or `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    /// Maximum degree in `t` alone, or `None` for the zero polynomial.
    pub fn degree_t(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).max()
    }

    /// Maximum degree in `x` alone, or `None` for the zero polynomial.
    pub fn degree_x(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    /// True if the polynomial does not involve `x` (constant in `x`).
    pub fn depends_only_on_t(&self) -> bool {
        self.terms.keys().all(|&(_, j)| j == 0)
    }

    fn normalize(&mut self) {
        let max = self.max_abs_coeff();
        if max == 0.0 {
            self.terms.clear();
            return;
        }
        let cutoff = COEFF_DROP_REL * max;
        self.terms.retain(|_, c| c.abs() > cutoff);
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&k, &v) in &other.terms {
            *out.terms.entry(k).or_insert(0.0) += v;
        }
        out.normalize();
        out
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> BiPoly {
        if factor == 0.0 {
            return BiPoly::zero();
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.normalize();
        out
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut out = BiPoly::default();
        for (&(i1, j1), &c1) in &self.terms {
            for (&(i2, j2), &c2) in &other.terms {
                *out.terms.entry((i1 + i2, j1 + j2)).or_insert(0.0) += c1 * c2;
            }
        }
        out.normalize();
        out
    }

    /// Integer power by repeated multiplication; `p^0 = 1`.
    pub fn pow(&self, n: u32) -> BiPoly {
        let mut out = BiPoly::constant(1.0);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to `var`.
    pub fn diff(&self, var: Var) -> BiPoly {
        let mut out = BiPoly::default();
        for (&(i, j), &c) in &self.terms {
            match var {
                Var::T if i > 0 => {
                    *out.terms.entry((i - 1, j)).or_insert(0.0) += c * i as f64;
                }
                Var::X if j > 0 => {
                    *out.terms.entry((i, j - 1)).or_insert(0.0) += c * j as f64;
                }
                _ => {}
            }
        }
        out.normalize();
        out
    }

    /// Substitute `t -> t_map(t)` and `x -> x_map(x)`, i.e. reinterpret the
    /// polynomial in new coordinates related to the old ones by affine maps.
    pub fn substitute_affine(&self, t_map: &AffineMap1D, x_map: &AffineMap1D) -> BiPoly {
        let mut out = BiPoly::default();
        for (&(i, j), &c) in &self.terms {
            // (o_t + s_t t)^i (o_x + s_x x)^j expanded via binomials.
            for a in 0..=i {
                let ct = binomial(i, a)
                    * t_map.scale.powi(a as i32)
                    * t_map.offset.powi((i - a) as i32);
                if ct == 0.0 {
                    continue;
                }
                for b in 0..=j {
                    let cx = binomial(j, b)
                        * x_map.scale.powi(b as i32)
                        * x_map.offset.powi((j - b) as i32);
                    if cx == 0.0 {
                        continue;
                    }
                    *out.terms.entry((a, b)).or_insert(0.0) += c * ct * cx;
                }
            }
        }
        out.normalize();
        out
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), &c)| c * t.powi(i as i32) * x.powi(j as i32))
            .sum()
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), &c) in &self.terms {
            if first {
                write!(f, "{c:+.6e}")?;
                first = false;
            } else {
                write!(f, " {}{:.6e}", if c < 0.0 { "- " } else { "+ " }, c.abs())?;
            }
            if i > 0 {
                write!(f, " t^{i}")?;
            }
            if j > 0 {
                write!(f, " x^{j}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        let scale = 1.0_f64.max(a.abs()).max(b.abs());
        assert!(
            (a - b).abs() <= tol * scale,
            "expected {a} ~ {b} (tol {tol})"
        );
    }

    #[test]
    fn binomial_matches_known_values() {
        assert_eq!(binomial(0, 0), 1.0);
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(10, 5), 252.0);
        assert_eq!(binomial(44, 22), 2_104_098_963_720.0);
        assert_eq!(binomial(6, 9), 0.0);
    }

    #[test]
    fn pascal_row_sums_are_powers_of_two() {
        for n in 0..=MAX_BINOMIAL_N {
            let sum: f64 = (0..=n).map(|k| binomial(n, k)).sum();
            assert_close(sum, 2f64.powi(n as i32), 1e-12);
        }
    }

    #[test]
    fn arithmetic_basics() {
        let p = BiPoly::from_terms(&[(0, 0, 1.0), (1, 0, 2.0), (0, 2, -3.0)]);
        let q = BiPoly::from_terms(&[(1, 0, -2.0), (1, 1, 4.0)]);
        let s = p.add(&q);
        assert_eq!(s.coeff(1, 0), 0.0);
        assert_eq!(s.coeff(1, 1), 4.0);
        assert_eq!(s.coeff(0, 2), -3.0);
        assert_eq!(s.total_degree(), Some(2));

        let prod = BiPoly::t().mul(&BiPoly::x());
        assert_eq!(prod.coeff(1, 1), 1.0);
        assert_eq!(prod.total_degree(), Some(2));
    }

    #[test]
    fn zero_polynomial_has_no_terms_after_cancellation() {
        let p = BiPoly::from_terms(&[(2, 3, 5.0)]);
        let z = p.sub(&p);
        assert!(z.is_zero());
        assert_eq!(z.total_degree(), None);
        assert_eq!(z.eval(1.7, -2.2), 0.0);
    }

    #[test]
    fn tiny_relative_coefficients_are_dropped() {
        let p = BiPoly::from_terms(&[(0, 0, 1.0), (3, 3, 1e-16)]);
        assert_eq!(p.terms().count(), 1);
        assert_eq!(p.coeff(3, 3), 0.0);
    }

    #[test]
    fn differentiation_matches_calculus() {
        // d/dx (t^2 x^3 + 4x) = 3 t^2 x^2 + 4
        let p = BiPoly::from_terms(&[(2, 3, 1.0), (0, 1, 4.0)]);
        let dx = p.diff(Var::X);
        assert_eq!(dx.coeff(2, 2), 3.0);
        assert_eq!(dx.coeff(0, 0), 4.0);
        let dt = p.diff(Var::T);
        assert_eq!(dt.coeff(1, 3), 2.0);
        assert!(BiPoly::constant(7.0).diff(Var::T).is_zero());
    }

    #[test]
    fn affine_map_inverse_round_trips() {
        let m = AffineMap1D::new(1.5, -0.25).unwrap();
        let inv = m.inverse();
        for u in [-3.0, 0.0, 0.7, 42.0] {
            assert_close(inv.apply(m.apply(u)), u, 1e-14);
        }
    }

    #[test]
    fn affine_map_rejects_degenerate_scale() {
        assert!(AffineMap1D::new(0.0, 0.0).is_err());
        assert!(AffineMap1D::new(f64::NAN, 1.0).is_err());
        assert!(AffineMap1D::unit_to(2.0, 2.0).is_err());
    }

    #[test]
    fn substitution_matches_pointwise_evaluation() {
        let p = BiPoly::from_terms(&[(2, 1, 1.0), (0, 3, -2.0), (1, 0, 0.5)]);
        let tm = AffineMap1D::new(0.3, 2.0).unwrap();
        let xm = AffineMap1D::new(-1.0, 0.5).unwrap();
        let q = p.substitute_affine(&tm, &xm);
        for (u, v) in [(0.0, 0.0), (1.0, 1.0), (0.25, -0.75), (2.0, 3.0)] {
            assert_close(q.eval(u, v), p.eval(tm.apply(u), xm.apply(v)), 1e-12);
        }
    }

    fn arb_poly() -> impl Strategy<Value = BiPoly> {
        proptest::collection::vec(((0u32..5, 0u32..5), -10.0f64..10.0), 0..8).prop_map(|terms| {
            BiPoly::from_terms(
                &terms
                    .into_iter()
                    .map(|((i, j), c)| (i, j, c))
                    .collect::<Vec<_>>(),
            )
        })
    }

    fn arb_map() -> impl Strategy<Value = AffineMap1D> {
        (-3.0f64..3.0, 0.1f64..4.0, proptest::bool::ANY)
            .prop_map(|(o, s, neg)| AffineMap1D::new(o, if neg { -s } else { s }).unwrap())
    }

    proptest! {
        #[test]
        fn product_evaluates_to_product_of_evaluations(
            p in arb_poly(), q in arb_poly(),
            t in -2.0f64..2.0, x in -2.0f64..2.0,
        ) {
            let lhs = p.mul(&q).eval(t, x);
            let rhs = p.eval(t, x) * q.eval(t, x);
            let scale = 1.0_f64.max(lhs.abs()).max(rhs.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-9 * scale);
        }

        #[test]
        fn substitution_round_trip_recovers_polynomial(
            p in arb_poly(), tm in arb_map(), xm in arb_map(),
            t in -1.0f64..1.0, x in -1.0f64..1.0,
        ) {
            let back = p
                .substitute_affine(&tm, &xm)
                .substitute_affine(&tm.inverse(), &xm.inverse());
            let scale = 1.0_f64.max(p.max_abs_coeff());
            prop_assert!((back.eval(t, x) - p.eval(t, x)).abs() <= 1e-8 * scale);
        }

        #[test]
        fn derivative_commutes_with_affine_substitution(
            p in arb_poly(), xm in arb_map(),
            t in -1.0f64..1.0, x in -1.0f64..1.0,
        ) {
            // Chain rule: d/dx [p(t, xm(x))] = scale * p_x(t, xm(x)).
            let tm = AffineMap1D::identity();
            let lhs = p.substitute_affine(&tm, &xm).diff(Var::X);
            let rhs = p.diff(Var::X).substitute_affine(&tm, &xm).scale(xm.scale());
            let scale = 1.0_f64.max(lhs.max_abs_coeff()).max(rhs.max_abs_coeff());
            prop_assert!((lhs.eval(t, x) - rhs.eval(t, x)).abs() <= 1e-9 * scale);
        }
    }
}
