//! Payoff decompositions and ready-made model+contract bundles.
//!
//! A [`ContractSpec`] splits the terminal payoff `h` and running payoff `g`
//! into polynomial pieces over a partition of the barrier box; lowering the
//! pieces onto measure moments yields the LP objective.  The bundled
//! constructors assemble the four worked examples — a GBM double knockout
//! call, a VG double knockout call, a CIR American corridor, and a double
//! no-touch under an exponential VG model with time-dependent rates —
//! complete with exit pieces, occupation box, and simulation models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{vg_martingale_drift, vg_tail_mass, vg_truncated_moment, LevyMeasureSpec};
use crate::lp::solver::LpSolver;
use crate::lp::vars::VarRegistry;
use crate::lp::{build_lp_pair, solve_bounds, BoundsResult, LinExpr};
use crate::model::PolynomialModel;
use crate::poly::BiPoly;
use crate::support::{Interval, MeasurePiece, PieceRef, SupportSet};

/// Absolute tolerance scale for matching piece supports.
const SUPPORT_TOL: f64 = 1e-9;

/// How big-jump truncation enters the price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscountMode {
    /// The removed jump mass `λ*` joins the discount rate inside the LP.
    /// Correct for payoffs on any piece; the library default.
    Killed,
    /// The LP keeps the original rate and the optimum is multiplied by
    /// `p* = e^{-λ*T}` afterwards.  Valid only when every nonzero payoff
    /// lives on `{t = T}`, where the killing factor is the constant `p*`.
    PStarFactor,
}

impl Default for DiscountMode {
    fn default() -> Self {
        DiscountMode::Killed
    }
}

/// One raw-moment coefficient of the price functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveTerm {
    pub piece: PieceRef,
    pub t_deg: u32,
    pub x_deg: u32,
    pub coeff: f64,
}

/// The price as a linear functional of raw piece moments,
/// `v = Σ d_{i,j} ν⁽ᵐ⁾_{i,j} + Σ b_{i,j} μ_{i,j}`.
#[derive(Debug, Clone, Default)]
pub struct MomentObjective {
    terms: Vec<ObjectiveTerm>,
}

impl MomentObjective {
    pub fn new(terms: Vec<ObjectiveTerm>) -> Self {
        MomentObjective {
            terms: terms.into_iter().filter(|t| t.coeff != 0.0).collect(),
        }
    }

    pub fn terms(&self) -> &[ObjectiveTerm] {
        &self.terms
    }

    /// Largest total degree referenced, or 0 when empty.
    pub fn max_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.t_deg + t.x_deg)
            .max()
            .unwrap_or(0)
    }

    /// Lower the raw-moment coefficients onto the scaled LP variables.
    pub fn to_expr(&self, registry: &VarRegistry) -> Result<LinExpr> {
        let mut expr = LinExpr::new();
        for term in &self.terms {
            let raw = registry.raw_moment(term.piece, term.t_deg, term.x_deg)?;
            expr.add_expr(&raw, term.coeff);
        }
        expr.compact();
        Ok(expr)
    }

    /// Evaluate against externally supplied raw moments (e.g. Monte Carlo
    /// estimates).
    pub fn eval(&self, moment: &mut dyn FnMut(PieceRef, u32, u32) -> Option<f64>) -> Result<f64> {
        let mut total = 0.0;
        for term in &self.terms {
            let m = moment(term.piece, term.t_deg, term.x_deg).ok_or(Error::MissingMoment {
                k: term.t_deg + term.x_deg,
                detail: format!(
                    "raw moment ({}, {}) of {} not supplied",
                    term.t_deg, term.x_deg, term.piece
                ),
            })?;
            total += term.coeff * m;
        }
        Ok(total)
    }
}

/// Payoff decomposition of a double-barrier contract.
#[derive(Debug, Clone)]
pub struct ContractSpec {
    /// Barrier interval `[B_d, B_u]` in the model's state coordinate.
    pub barriers: Interval,
    pub maturity: f64,
    /// Terminal payoff pieces `(support at t = T, h_i)` partitioning
    /// `{T} x [B_d, B_u]`.
    pub terminal: Vec<(SupportSet, BiPoly)>,
    /// Running payoff pieces `(support, g_i)` partitioning
    /// `[0, T] x [B_d, B_u]`.
    pub running: Vec<(SupportSet, BiPoly)>,
    /// Factor applied outside the LP (`p*` or an external discount); 1 when
    /// everything is inside.
    pub external_discount: f64,
}

impl ContractSpec {
    pub fn new(
        barriers: Interval,
        maturity: f64,
        terminal: Vec<(SupportSet, BiPoly)>,
        running: Vec<(SupportSet, BiPoly)>,
        external_discount: f64,
    ) -> Result<Self> {
        let spec = ContractSpec {
            barriers,
            maturity,
            terminal,
            running,
            external_discount,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(self.maturity > 0.0 && self.maturity.is_finite()) {
            return Err(Error::config(format!(
                "maturity must be positive, got {}",
                self.maturity
            )));
        }
        if !(self.external_discount > 0.0 && self.external_discount.is_finite()) {
            return Err(Error::config(format!(
                "external discount factor must be positive, got {}",
                self.external_discount
            )));
        }
        let tol = self.tol();

        // Terminal pieces: vertical segments at t = T tiling the barriers.
        let mut spans = Vec::new();
        for (support, _) in &self.terminal {
            match support {
                SupportSet::VSegment { t, x } if (*t - self.maturity).abs() <= tol => {
                    spans.push((x.lo(), x.hi()));
                }
                other => {
                    return Err(Error::config(format!(
                        "terminal piece must be a segment at t = {}, got {other:?}",
                        self.maturity
                    )))
                }
            }
        }
        check_tiling(&mut spans, self.barriers.lo(), self.barriers.hi(), tol, "terminal")?;

        // Running pieces: rectangles over [0, T] tiling the barriers in x.
        let mut spans = Vec::new();
        for (support, _) in &self.running {
            match support {
                SupportSet::Rectangle { t, x }
                    if t.lo().abs() <= tol && (t.hi() - self.maturity).abs() <= tol =>
                {
                    spans.push((x.lo(), x.hi()));
                }
                other => {
                    return Err(Error::config(format!(
                        "running piece must be a rectangle over [0, {}], got {other:?}",
                        self.maturity
                    )))
                }
            }
        }
        check_tiling(&mut spans, self.barriers.lo(), self.barriers.hi(), tol, "running")?;
        Ok(())
    }

    fn tol(&self) -> f64 {
        SUPPORT_TOL
            * (1.0 + self.maturity.abs() + self.barriers.lo().abs() + self.barriers.hi().abs())
    }

    /// Terminal payoff `h(T, x)`, zero outside every piece.
    pub fn terminal_payoff(&self, x: f64) -> f64 {
        let tol = self.tol();
        for (support, poly) in &self.terminal {
            if support.contains(self.maturity, x, tol) {
                return poly.eval(self.maturity, x);
            }
        }
        0.0
    }

    /// Running payoff `g(t, x)`, zero outside every piece.
    pub fn running_payoff(&self, t: f64, x: f64) -> f64 {
        let tol = self.tol();
        for (support, poly) in &self.running {
            if support.contains(t, x, tol) {
                return poly.eval(t, x);
            }
        }
        0.0
    }

    /// True when some running piece carries a nonzero payoff.
    pub fn has_running_payoff(&self) -> bool {
        self.running.iter().any(|(_, g)| !g.is_zero())
    }
}

/// Check that x-spans sorted by lower end tile `[lo, hi]` without gaps or
/// overlaps.
fn check_tiling(
    spans: &mut Vec<(f64, f64)>,
    lo: f64,
    hi: f64,
    tol: f64,
    what: &str,
) -> Result<()> {
    if spans.is_empty() {
        return Err(Error::config(format!("no {what} pieces supplied")));
    }
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cursor = lo;
    for &(a, b) in spans.iter() {
        if (a - cursor).abs() > tol {
            return Err(Error::config(format!(
                "{what} pieces do not tile [{lo}, {hi}]: expected a piece starting at {cursor}, found {a}"
            )));
        }
        if b < a - tol {
            return Err(Error::config(format!(
                "{what} piece [{a}, {b}] is inverted"
            )));
        }
        cursor = b;
    }
    if (cursor - hi).abs() > tol {
        return Err(Error::config(format!(
            "{what} pieces stop at {cursor} instead of {hi}"
        )));
    }
    Ok(())
}

/// Lower the payoff decomposition onto moments of the named pieces.
///
/// Pieces with identically zero payoff contribute nothing; a *nonzero*
/// payoff piece whose support matches no measure piece is a configuration
/// error.
pub fn payoff_to_objective(
    contract: &ContractSpec,
    exit_pieces: &[MeasurePiece],
    occupation: &MeasurePiece,
) -> Result<MomentObjective> {
    let tol = contract.tol();
    let mut terms = Vec::new();

    for (support, h) in &contract.terminal {
        if h.is_zero() {
            continue;
        }
        let idx = exit_pieces
            .iter()
            .position(|piece| piece.support.approx_eq(support, tol))
            .ok_or_else(|| {
                Error::config(format!(
                    "terminal payoff support {support:?} matches no exit piece"
                ))
            })?;
        for ((i, j), c) in h.terms() {
            terms.push(ObjectiveTerm {
                piece: PieceRef::Exit(idx),
                t_deg: i,
                x_deg: j,
                coeff: c,
            });
        }
    }

    for (support, g) in &contract.running {
        if g.is_zero() {
            continue;
        }
        if !occupation.support.approx_eq(support, tol) {
            return Err(Error::config(format!(
                "running payoff support {support:?} does not match the occupation piece"
            )));
        }
        for ((i, j), c) in g.terms() {
            terms.push(ObjectiveTerm {
                piece: PieceRef::Occupation,
                t_deg: i,
                x_deg: j,
                coeff: c,
            });
        }
    }

    Ok(MomentObjective::new(terms))
}

/// A fully assembled pricing problem: LP-side model, simulation-side model,
/// payoff decomposition, and the measure pieces.
#[derive(Debug, Clone)]
pub struct ProblemSetup {
    pub name: String,
    /// Model the LP rows are built from (truncated and killed when the jump
    /// measure required it).
    pub model: PolynomialModel,
    /// Original dynamics for the simulation oracle.
    pub mc_model: PolynomialModel,
    pub contract: ContractSpec,
    pub exit_pieces: Vec<MeasurePiece>,
    pub occupation: MeasurePiece,
    pub objective: MomentObjective,
}

impl ProblemSetup {
    /// Build and solve the bound pair at truncation level `n`, with the
    /// contract's external discount folded in.
    pub fn bounds_at(&self, n: u32, solver: &dyn LpSolver) -> Result<BoundsResult> {
        let (min, max) = build_lp_pair(
            &self.model,
            &self.exit_pieces,
            &self.occupation,
            &self.objective,
            n,
        )?;
        Ok(solve_bounds(&min, &max, solver)?.scaled(self.contract.external_discount))
    }
}

/// Parameters of the GBM double knockout call.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GbmDkoParams {
    pub b: f64,
    pub sigma: f64,
    pub b_d: f64,
    pub b_u: f64,
    pub strike: f64,
    pub x0: f64,
    pub maturity: f64,
}

impl Default for GbmDkoParams {
    fn default() -> Self {
        GbmDkoParams {
            b: 0.1,
            sigma: 0.1,
            b_d: 1.0,
            b_u: 5.0,
            strike: 1.3,
            x0: 2.0,
            maturity: 1.0,
        }
    }
}

/// European double knockout call on a geometric Brownian motion, priced
/// without discounting.  Exit pieces: the two barrier segments and the
/// terminal segment split at the strike.
pub fn gbm_double_knockout(p: &GbmDkoParams) -> Result<ProblemSetup> {
    require_ordering(p.b_d, p.strike, p.b_u, p.x0)?;
    if p.b_d <= 0.0 {
        return Err(Error::config("GBM barriers must be positive"));
    }
    if !(p.sigma > 0.0) {
        return Err(Error::config("sigma must be positive"));
    }
    let drift = BiPoly::monomial(0, 1, p.b);
    let sigma2 = BiPoly::monomial(0, 2, p.sigma * p.sigma);
    let model = PolynomialModel::diffusion(drift, sigma2, BiPoly::zero(), p.x0)?;
    model.validate_on_box((0.0, p.maturity), (p.b_d, p.b_u))?;

    let t_span = (0.0, p.maturity);
    let exit_pieces = vec![
        MeasurePiece::new("nu1", SupportSet::h_segment(t_span, p.b_u)?),
        MeasurePiece::new("nu2", SupportSet::h_segment(t_span, p.b_d)?),
        MeasurePiece::new("nu3", SupportSet::v_segment(p.maturity, (p.b_d, p.strike))?),
        MeasurePiece::new("nu4", SupportSet::v_segment(p.maturity, (p.strike, p.b_u))?),
    ];
    let occupation = MeasurePiece::new("mu", SupportSet::rectangle(t_span, (p.b_d, p.b_u))?);

    let call = BiPoly::x().sub(&BiPoly::constant(p.strike));
    let contract = ContractSpec::new(
        Interval::new(p.b_d, p.b_u)?,
        p.maturity,
        vec![
            (exit_pieces[2].support.clone(), BiPoly::zero()),
            (exit_pieces[3].support.clone(), call),
        ],
        vec![(occupation.support.clone(), BiPoly::zero())],
        1.0,
    )?;
    let objective = payoff_to_objective(&contract, &exit_pieces, &occupation)?;

    Ok(ProblemSetup {
        name: "gbm-dko".to_string(),
        mc_model: model.clone(),
        model,
        contract,
        exit_pieces,
        occupation,
        objective,
    })
}

/// Parameters of the VG double knockout call.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VgDkoParams {
    pub c: f64,
    pub g: f64,
    pub m: f64,
    pub b: f64,
    pub b_d: f64,
    pub b_u: f64,
    pub strike: f64,
    pub x0: f64,
    pub maturity: f64,
}

impl Default for VgDkoParams {
    fn default() -> Self {
        VgDkoParams {
            c: 0.5,
            g: 8.0,
            m: 12.0,
            b: 0.2,
            b_d: -1.0,
            b_u: 1.0,
            strike: -0.3,
            x0: 0.0,
            maturity: 1.0,
        }
    }
}

/// Double knockout call on a Variance Gamma process with drift.
///
/// `b` is the drift rate of `dX = b dt + dZ` with `Z` in the standard
/// decomposition (small jumps compensated).  The generator and the path
/// sampler both work with raw, uncompensated jumps, so the compensator
/// `∫_{-1}^{1} y η(dy)` moves into the model drift here.
///
/// The jump measure is truncated at `L = B_u - B_d` (a retained jump cannot
/// overshoot farther than `L`), so exits land in bounded rectangles; the
/// removed mass `λ*` enters per the chosen [`DiscountMode`].
pub fn vg_double_knockout(p: &VgDkoParams, mode: DiscountMode) -> Result<ProblemSetup> {
    require_ordering(p.b_d, p.strike, p.b_u, p.x0)?;
    let l = p.b_u - p.b_d;
    let levy_full = LevyMeasureSpec::Vg {
        c: p.c,
        g: p.g,
        m: p.m,
    };
    levy_full.validate()?;
    let lambda_star = vg_tail_mass(p.c, p.g, p.m, -l, l)?;
    let levy_trunc = LevyMeasureSpec::TruncatedVg {
        c: p.c,
        g: p.g,
        m: p.m,
        l_minus: -l,
        l_plus: l,
    };
    let (lp_discount, external) = match mode {
        DiscountMode::Killed => (BiPoly::constant(lambda_star), 1.0),
        DiscountMode::PStarFactor => (BiPoly::zero(), (-lambda_star * p.maturity).exp()),
    };

    let compensator = vg_truncated_moment(p.c, p.g, p.m, -1.0, 1.0, 1)?;
    let drift = BiPoly::constant(p.b - compensator);
    let model = PolynomialModel::new(
        drift.clone(),
        BiPoly::zero(),
        BiPoly::constant(1.0),
        lp_discount,
        levy_trunc,
        p.x0,
        0.0,
    )?;
    let mc_model = PolynomialModel::new(
        drift,
        BiPoly::zero(),
        BiPoly::constant(1.0),
        BiPoly::zero(),
        levy_full,
        p.x0,
        0.0,
    )?;

    let t_span = (0.0, p.maturity);
    let exit_pieces = vec![
        MeasurePiece::new("nu1", SupportSet::rectangle(t_span, (p.b_u, p.b_u + l))?),
        MeasurePiece::new("nu2", SupportSet::rectangle(t_span, (p.b_d - l, p.b_d))?),
        MeasurePiece::new("nu3", SupportSet::v_segment(p.maturity, (p.b_d, p.strike))?),
        MeasurePiece::new("nu4", SupportSet::v_segment(p.maturity, (p.strike, p.b_u))?),
    ];
    let occupation = MeasurePiece::new("mu", SupportSet::rectangle(t_span, (p.b_d, p.b_u))?);

    let call = BiPoly::x().sub(&BiPoly::constant(p.strike));
    let contract = ContractSpec::new(
        Interval::new(p.b_d, p.b_u)?,
        p.maturity,
        vec![
            (exit_pieces[2].support.clone(), BiPoly::zero()),
            (exit_pieces[3].support.clone(), call),
        ],
        vec![(occupation.support.clone(), BiPoly::zero())],
        external,
    )?;
    let objective = payoff_to_objective(&contract, &exit_pieces, &occupation)?;

    Ok(ProblemSetup {
        name: "vg-dko".to_string(),
        model,
        mc_model,
        contract,
        exit_pieces,
        occupation,
        objective,
    })
}

/// Parameters of the CIR American corridor.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CirCorridorParams {
    pub a: f64,
    pub b: f64,
    pub sigma: f64,
    pub r: f64,
    pub b_d: f64,
    pub b_u: f64,
    pub x0: f64,
    pub maturity: f64,
}

impl Default for CirCorridorParams {
    fn default() -> Self {
        CirCorridorParams {
            a: 0.5,
            b: 1.0,
            sigma: 0.2,
            r: 0.1,
            b_d: 0.5,
            b_u: 1.5,
            x0: 1.0,
            maturity: 1.0,
        }
    }
}

/// American corridor on a CIR process: pays at unit rate while the process
/// stays inside the barriers, so the price is the occupation mass `μ₀₀`.
pub fn cir_american_corridor(p: &CirCorridorParams) -> Result<ProblemSetup> {
    if !(p.a > 0.0 && p.b > 0.0) {
        return Err(Error::config("CIR parameters a and b must be positive"));
    }
    if !(p.sigma > 0.0) {
        return Err(Error::config("sigma must be positive"));
    }
    if !(p.r >= 0.0 && p.r.is_finite()) {
        return Err(Error::config(format!("rate must be nonnegative, got {}", p.r)));
    }
    if !(0.0 <= p.b_d && p.b_d < p.x0 && p.x0 < p.b_u) {
        return Err(Error::config(format!(
            "need 0 <= B_d < x0 < B_u, got B_d = {}, x0 = {}, B_u = {}",
            p.b_d, p.x0, p.b_u
        )));
    }
    // Drift a(b - x); squared diffusion sigma^2 x.
    let mut drift = BiPoly::constant(p.a * p.b);
    drift = drift.add(&BiPoly::monomial(0, 1, -p.a));
    let sigma2 = BiPoly::monomial(0, 1, p.sigma * p.sigma);
    let model = PolynomialModel::diffusion(drift, sigma2, BiPoly::constant(p.r), p.x0)?;
    model.validate_on_box((0.0, p.maturity), (p.b_d, p.b_u))?;

    let t_span = (0.0, p.maturity);
    let exit_pieces = vec![
        MeasurePiece::new("nu1", SupportSet::h_segment(t_span, p.b_u)?),
        MeasurePiece::new("nu2", SupportSet::h_segment(t_span, p.b_d)?),
        MeasurePiece::new("nu3", SupportSet::v_segment(p.maturity, (p.b_d, p.b_u))?),
    ];
    let occupation = MeasurePiece::new("mu", SupportSet::rectangle(t_span, (p.b_d, p.b_u))?);

    let contract = ContractSpec::new(
        Interval::new(p.b_d, p.b_u)?,
        p.maturity,
        vec![(exit_pieces[2].support.clone(), BiPoly::zero())],
        vec![(occupation.support.clone(), BiPoly::constant(1.0))],
        1.0,
    )?;
    let objective = payoff_to_objective(&contract, &exit_pieces, &occupation)?;

    Ok(ProblemSetup {
        name: "cir-corridor".to_string(),
        mc_model: model.clone(),
        model,
        contract,
        exit_pieces,
        occupation,
        objective,
    })
}

/// Parameters of the exponential-VG double no-touch.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExpVgDntParams {
    pub c: f64,
    pub g: f64,
    pub m: f64,
    pub r_b: f64,
    pub r_s: f64,
    pub b_d: f64,
    pub b_u: f64,
    pub s0: f64,
    pub maturity: f64,
}

impl Default for ExpVgDntParams {
    fn default() -> Self {
        ExpVgDntParams {
            c: 0.5,
            g: 8.0,
            m: 12.0,
            r_b: 0.05,
            r_s: 0.05,
            b_d: 0.5,
            b_u: 2.0,
            s0: 1.0,
            maturity: 1.0,
        }
    }
}

/// Double no-touch paying one unit at maturity if `S` never leaves
/// `[B_d, B_u]`, with `S = e^X` an exponential VG martingale under the rate
/// `r(t) = r_b + r_s t²`.  Everything is set up in log space.
pub fn expvg_double_no_touch(p: &ExpVgDntParams, mode: DiscountMode) -> Result<ProblemSetup> {
    if !(p.b_d > 0.0 && p.b_d < p.s0 && p.s0 < p.b_u) {
        return Err(Error::config(format!(
            "need 0 < B_d < S0 < B_u, got B_d = {}, S0 = {}, B_u = {}",
            p.b_d, p.s0, p.b_u
        )));
    }
    if !(p.r_b >= 0.0 && p.r_s >= 0.0) {
        return Err(Error::config("rate coefficients must be nonnegative"));
    }
    let (x_d, x_u, x0) = (p.b_d.ln(), p.b_u.ln(), p.s0.ln());

    let mut rate = BiPoly::constant(p.r_b);
    rate = rate.add(&BiPoly::monomial(2, 0, p.r_s));
    // Martingale drift b(t) = r(t) - c, with c the exponential moment of the
    // full jump measure.
    let drift = vg_martingale_drift(&rate, p.c, p.g, p.m)?;

    let l = x_u - x_d;
    let lambda_star = vg_tail_mass(p.c, p.g, p.m, -l, l)?;
    let levy_trunc = LevyMeasureSpec::TruncatedVg {
        c: p.c,
        g: p.g,
        m: p.m,
        l_minus: -l,
        l_plus: l,
    };
    let (lp_discount, external) = match mode {
        DiscountMode::Killed => (
            rate.add(&BiPoly::constant(lambda_star)),
            1.0,
        ),
        DiscountMode::PStarFactor => (rate.clone(), (-lambda_star * p.maturity).exp()),
    };

    let model = PolynomialModel::new(
        drift.clone(),
        BiPoly::zero(),
        BiPoly::constant(1.0),
        lp_discount,
        levy_trunc,
        x0,
        0.0,
    )?;
    let mc_model = PolynomialModel::new(
        drift,
        BiPoly::zero(),
        BiPoly::constant(1.0),
        rate,
        LevyMeasureSpec::Vg {
            c: p.c,
            g: p.g,
            m: p.m,
        },
        x0,
        0.0,
    )?;

    let t_span = (0.0, p.maturity);
    let exit_pieces = vec![
        MeasurePiece::new("nu1", SupportSet::rectangle(t_span, (x_d - l, x_d))?),
        MeasurePiece::new("nu2", SupportSet::rectangle(t_span, (x_u, x_u + l))?),
        MeasurePiece::new("nu3", SupportSet::v_segment(p.maturity, (x_d, x_u))?),
    ];
    let occupation = MeasurePiece::new("mu", SupportSet::rectangle(t_span, (x_d, x_u))?);

    let contract = ContractSpec::new(
        Interval::new(x_d, x_u)?,
        p.maturity,
        vec![(exit_pieces[2].support.clone(), BiPoly::constant(1.0))],
        vec![(occupation.support.clone(), BiPoly::zero())],
        external,
    )?;
    let objective = payoff_to_objective(&contract, &exit_pieces, &occupation)?;

    Ok(ProblemSetup {
        name: "expvg-dnt".to_string(),
        model,
        mc_model,
        contract,
        exit_pieces,
        occupation,
        objective,
    })
}

fn require_ordering(b_d: f64, strike: f64, b_u: f64, x0: f64) -> Result<()> {
    if !(b_d < strike && strike < b_u) {
        return Err(Error::config(format!(
            "need B_d < K < B_u, got B_d = {b_d}, K = {strike}, B_u = {b_u}"
        )));
    }
    if !(b_d < x0 && x0 < b_u) {
        return Err(Error::config(format!(
            "need B_d < x0 < B_u, got B_d = {b_d}, x0 = {x0}, B_u = {b_u}"
        )));
    }
    Ok(())
}
