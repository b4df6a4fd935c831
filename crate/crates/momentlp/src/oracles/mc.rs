//! Monte Carlo pricing and measure-moment estimation.
//!
//! Paths walk a fixed time grid with counter-based seeding: path `i` always
//! consumes stream `i` of a ChaCha generator keyed by the run seed and draws
//! in a fixed order per step, so results are bit-identical across runs and
//! thread counts.  Chunk partial sums are combined by pairwise summation in
//! index order for the same reason.
//!
//! The grid induces a discrete exit measure (discounted mass at the first
//! grid point outside the barriers, or at maturity) and a discrete occupation
//! measure (trapezoid weights along the surviving part of the path, with the
//! exit endpoint clamped into the box).  Prices and moment estimates both
//! integrate against these measures, so lowering a payoff onto moments and
//! evaluating it on the estimates reproduces the direct price estimate
//! exactly, path by path.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contracts::ContractSpec;
use crate::error::{Error, Result};
use crate::levy::LevyMeasureSpec;
use crate::lp::{LinExpr, VarRegistry};
use crate::model::PolynomialModel;
use crate::support::{EffectiveShape, Interval, PieceRef, SupportSet};

/// Paths per work unit; partials are reduced in chunk order.
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub paths: u64,
    /// Grid resolution; the step count is `ceil(steps_per_year * horizon)`.
    pub steps_per_year: u32,
    pub seed: u64,
    /// Pair each path with a sign-flipped copy of its Gaussian increments and
    /// average the pair.  Requires a diffusion component and an even path
    /// count.
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            paths: 200_000,
            steps_per_year: 250,
            seed: 42,
            antithetic: false,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::config("need at least one path"));
        }
        if self.steps_per_year == 0 {
            return Err(Error::config("need at least one step per year"));
        }
        if self.antithetic && self.paths % 2 != 0 {
            return Err(Error::config(format!(
                "antithetic sampling needs an even path count, got {}",
                self.paths
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub estimate: f64,
    pub std_error: f64,
    pub paths_used: u64,
}

/// One completed grid step of a live path.
struct Step {
    t_from: f64,
    x_from: f64,
    alpha_from: f64,
    t_to: f64,
    x_to: f64,
    alpha_to: f64,
}

/// Where a path ended: the first grid point outside the barriers, or the
/// final grid point if it survived.
struct PathEnd {
    t: f64,
    x: f64,
    /// Accumulated discount exponent `∫ r ds` up to the end point.
    alpha: f64,
    alive: bool,
}

struct JumpSampler {
    up: Gamma<f64>,
    down: Gamma<f64>,
    /// `(max_up, max_down)`: a leg increment beyond its bound is dropped,
    /// matching the truncated jump measure up to an `O(dt²)` censoring error.
    censor: Option<(f64, f64)>,
}

struct PathParams<'a> {
    model: &'a PolynomialModel,
    barriers: (f64, f64),
    steps: usize,
    dt: f64,
    sqrt_dt: f64,
    diffusive: bool,
    jump: Option<JumpSampler>,
}

impl<'a> PathParams<'a> {
    fn new(
        model: &'a PolynomialModel,
        contract: &ContractSpec,
        config: &McConfig,
    ) -> Result<Self> {
        config.validate()?;
        let duration = contract.maturity - model.t0;
        if !(duration > 0.0) {
            return Err(Error::config(format!(
                "maturity {} must exceed the model start time {}",
                contract.maturity, model.t0
            )));
        }
        let barriers = (contract.barriers.lo(), contract.barriers.hi());
        if !(barriers.0 < model.x0 && model.x0 < barriers.1) {
            return Err(Error::config(format!(
                "x0 = {} must start strictly inside the barriers [{}, {}]",
                model.x0, barriers.0, barriers.1
            )));
        }
        let steps = (duration * config.steps_per_year as f64).ceil().max(1.0) as usize;
        let dt = duration / steps as f64;
        let diffusive = !model.sigma2.is_zero();
        if config.antithetic && !diffusive {
            return Err(Error::config(
                "antithetic sampling flips Gaussian increments and needs a diffusion component",
            ));
        }
        let gamma = |shape: f64, scale: f64| {
            Gamma::new(shape, scale)
                .map_err(|e| Error::numerical(format!("gamma sampler setup failed: {e}")))
        };
        let jump = match model.levy {
            LevyMeasureSpec::None => None,
            LevyMeasureSpec::Vg { c, g, m } => Some(JumpSampler {
                up: gamma(c * dt, 1.0 / m)?,
                down: gamma(c * dt, 1.0 / g)?,
                censor: None,
            }),
            LevyMeasureSpec::TruncatedVg {
                c,
                g,
                m,
                l_minus,
                l_plus,
            } => Some(JumpSampler {
                up: gamma(c * dt, 1.0 / m)?,
                down: gamma(c * dt, 1.0 / g)?,
                censor: Some((l_plus, -l_minus)),
            }),
            LevyMeasureSpec::MomentTable { .. } => {
                return Err(Error::config(
                    "a frozen moment table cannot be simulated; keep the analytic jump \
                     specification for Monte Carlo",
                ))
            }
        };
        Ok(PathParams {
            model,
            barriers,
            steps,
            dt,
            sqrt_dt: dt.sqrt(),
            diffusive,
            jump,
        })
    }

    /// Walk one path.  `on_step` sees every completed step, including the one
    /// that leaves the barriers.  The scheme is Euler with exact gamma jump
    /// increments; when the squared diffusion turns negative at the raw state
    /// (possible for square-root coefficients) drift and variance are
    /// re-evaluated at the state floored at zero (full truncation).
    fn run(&self, rng: &mut ChaCha8Rng, negate: bool, mut on_step: impl FnMut(&Step)) -> PathEnd {
        let mut t = self.model.t0;
        let mut x = self.model.x0;
        let mut alpha = 0.0;
        let mut r_prev = self.model.discount.eval(t, x);
        for step in 0..self.steps {
            let sig2_raw = self.model.sigma2.eval(t, x);
            let x_eval = if sig2_raw < 0.0 { x.max(0.0) } else { x };
            let sig2 = if sig2_raw < 0.0 {
                self.model.sigma2.eval(t, x_eval).max(0.0)
            } else {
                sig2_raw
            };
            let mut dx = self.model.drift.eval(t, x_eval) * self.dt;
            if self.diffusive {
                let z: f64 = StandardNormal.sample(rng);
                let z = if negate { -z } else { z };
                dx += sig2.sqrt() * self.sqrt_dt * z;
            }
            if let Some(jump) = &self.jump {
                let mut up = jump.up.sample(rng);
                let mut down = jump.down.sample(rng);
                if let Some((max_up, max_down)) = jump.censor {
                    if up > max_up {
                        up = 0.0;
                    }
                    if down > max_down {
                        down = 0.0;
                    }
                }
                dx += self.model.jump_scale.eval(t, x_eval) * (up - down);
            }
            let t_next = self.model.t0 + (step + 1) as f64 * self.dt;
            let x_next = x + dx;
            let r_next = self.model.discount.eval(t_next, x_next);
            let alpha_next = alpha + 0.5 * (r_prev + r_next) * self.dt;
            on_step(&Step {
                t_from: t,
                x_from: x,
                alpha_from: alpha,
                t_to: t_next,
                x_to: x_next,
                alpha_to: alpha_next,
            });
            t = t_next;
            x = x_next;
            alpha = alpha_next;
            r_prev = r_next;
            if x <= self.barriers.0 || x >= self.barriers.1 {
                return PathEnd {
                    t,
                    x,
                    alpha,
                    alive: false,
                };
            }
        }
        PathEnd {
            t,
            x,
            alpha,
            alive: true,
        }
    }
}

/// Price `contract` under `model` by simulation.
///
/// The model is priced as given — in particular the contract's
/// `external_discount` is an LP-side bookkeeping factor and is *not* applied
/// here; pass the model whose paths carry the full dynamics.
pub fn mc_price(
    model: &PolynomialModel,
    contract: &ContractSpec,
    config: &McConfig,
) -> Result<McResult> {
    let params = PathParams::new(model, contract, config)?;
    let has_running = contract.has_running_payoff();
    let (b_lo, b_hi) = params.barriers;
    let sample = |stream: u64, negate: bool| -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(stream);
        let mut running = 0.0;
        let end = params.run(&mut rng, negate, |s| {
            if has_running {
                // The exit endpoint is clamped into the box, matching the
                // discrete occupation measure used for moment estimates.
                let g0 = contract.running_payoff(s.t_from, s.x_from.clamp(b_lo, b_hi));
                let g1 = contract.running_payoff(
                    s.t_to.min(contract.maturity),
                    s.x_to.clamp(b_lo, b_hi),
                );
                running += 0.5
                    * ((-s.alpha_from).exp() * g0 + (-s.alpha_to).exp() * g1)
                    * params.dt;
            }
        });
        let mut value = running;
        if end.alive {
            value += (-end.alpha).exp() * contract.terminal_payoff(end.x);
        }
        value
    };

    let samples = if config.antithetic {
        config.paths / 2
    } else {
        config.paths
    };
    let (sum, sum_sq) = accumulate(samples, |i| {
        if config.antithetic {
            0.5 * (sample(i, false) + sample(i, true))
        } else {
            sample(i, false)
        }
    });
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 {
        ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(McResult {
        estimate: mean,
        std_error: (var / n).sqrt(),
        paths_used: config.paths,
    })
}

/// Chunked parallel accumulation of `Σ f(i)` and `Σ f(i)²` with a
/// thread-count-independent summation order.
fn accumulate<F: Fn(u64) -> f64 + Sync>(n: u64, f: F) -> (f64, f64) {
    let n_chunks = n.div_ceil(CHUNK);
    let partials: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * CHUNK;
            let hi = ((ci + 1) * CHUNK).min(n);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for i in lo..hi {
                let v = f(i);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let sums: Vec<f64> = partials.iter().map(|p| p.0).collect();
    let sqs: Vec<f64> = partials.iter().map(|p| p.1).collect();
    (pairwise_sum(&sums), pairwise_sum(&sqs))
}

fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Sample mean and covariance of the scaled moment variables of one LP
/// variable layout, estimated from simulated paths.
#[derive(Debug, Clone)]
pub struct McMomentStats {
    mean: Vec<f64>,
    /// Covariance of the *mean* vector (sample covariance divided by the
    /// sample count).
    cov_mean: DMatrix<f64>,
    samples: u64,
}

impl McMomentStats {
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    /// A linear functional of the scaled variables evaluated at the mean.
    pub fn eval(&self, expr: &LinExpr) -> f64 {
        expr.eval(&self.mean)
    }

    /// Standard error of that functional, from the mean covariance.
    pub fn std_error(&self, expr: &LinExpr) -> f64 {
        let mut q = 0.0;
        for &(i, ci) in expr.terms() {
            for &(j, cj) in expr.terms() {
                q += ci * cj * self.cov_mean[(i, j)];
            }
        }
        q.max(0.0).sqrt()
    }

    /// Estimate and standard error of a raw piece moment `∫ t^i x^j`.
    pub fn raw_moment(
        &self,
        registry: &VarRegistry,
        piece: PieceRef,
        i: u32,
        j: u32,
    ) -> Result<(f64, f64)> {
        let expr = registry.raw_moment(piece, i, j)?;
        Ok((self.eval(&expr), self.std_error(&expr)))
    }
}

/// Estimate all scaled moment variables of `registry` under `model`.
///
/// Exits are assigned to the nearest exit piece (ties to the first declared)
/// and their coordinates clamped into its support; occupation moments use
/// trapezoid weights along the surviving part of each path.  Plain sampling
/// only — pair averaging would distort the per-path covariance.
pub fn mc_measure_moments(
    model: &PolynomialModel,
    contract: &ContractSpec,
    registry: &VarRegistry,
    config: &McConfig,
) -> Result<McMomentStats> {
    if config.antithetic {
        return Err(Error::config(
            "moment estimation uses plain sampling; disable antithetic pairing",
        ));
    }
    if config.paths < 2 {
        return Err(Error::config(
            "moment estimation needs at least two paths for a covariance",
        ));
    }
    let params = PathParams::new(model, contract, config)?;
    let n_deg = registry.n();
    let d = registry.var_count();

    let occ_off = registry.mass_var(PieceRef::Occupation)?;
    let (occ_t, occ_x) = match registry.shape(PieceRef::Occupation)? {
        EffectiveShape::Box { t, x } => (t, x),
        other => {
            return Err(Error::config(format!(
                "the occupation piece must be two-dimensional, got {other:?}"
            )))
        }
    };
    let occ_count = ((n_deg + 1) * (n_deg + 2) / 2) as usize;

    struct ExitPiece {
        support: SupportSet,
        shape: EffectiveShape,
        offset: usize,
    }
    let exits: Vec<ExitPiece> = (0..registry.exit_count())
        .map(|i| -> Result<ExitPiece> {
            let r = PieceRef::Exit(i);
            Ok(ExitPiece {
                support: registry.piece(r)?.support,
                shape: registry.shape(r)?,
                offset: registry.mass_var(r)?,
            })
        })
        .collect::<Result<_>>()?;

    let n_chunks = config.paths.div_ceil(CHUNK);
    let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * CHUNK;
            let hi = ((ci + 1) * CHUNK).min(config.paths);
            let mut sum = vec![0.0; d];
            let mut outer = vec![0.0; d * d];
            let mut contrib = vec![0.0; d];
            let mut occ_prev = vec![0.0; occ_count];
            let mut occ_next = vec![0.0; occ_count];
            let mut pow_t = Vec::with_capacity(n_deg as usize + 1);
            let mut pow_x = Vec::with_capacity(n_deg as usize + 1);
            for path in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(path);
                contrib.fill(0.0);
                fill_box_monomials(
                    &mut occ_prev,
                    occ_t,
                    occ_x,
                    n_deg,
                    params.model.t0,
                    params.model.x0,
                    0.0,
                    &mut pow_t,
                    &mut pow_x,
                );
                let end = params.run(&mut rng, false, |s| {
                    fill_box_monomials(
                        &mut occ_next,
                        occ_t,
                        occ_x,
                        n_deg,
                        s.t_to,
                        s.x_to,
                        s.alpha_to,
                        &mut pow_t,
                        &mut pow_x,
                    );
                    for q in 0..occ_count {
                        contrib[occ_off + q] += 0.5 * (occ_prev[q] + occ_next[q]) * params.dt;
                    }
                    std::mem::swap(&mut occ_prev, &mut occ_next);
                });

                // Assign the end point to the nearest exit piece.
                let chosen = exits
                    .iter()
                    .min_by(|a, b| {
                        support_distance(&a.support, end.t, end.x)
                            .total_cmp(&support_distance(&b.support, end.t, end.x))
                    })
                    .expect("registry guarantees at least one exit piece");
                let w = (-end.alpha).exp();
                match chosen.shape {
                    EffectiveShape::Point { .. } => contrib[chosen.offset] += w,
                    EffectiveShape::TimeLine { interval, .. } => {
                        powers(unit_coord(interval, end.t), n_deg, &mut pow_t);
                        for (k, p) in pow_t.iter().enumerate() {
                            contrib[chosen.offset + k] += w * p;
                        }
                    }
                    EffectiveShape::StateLine { interval, .. } => {
                        powers(unit_coord(interval, end.x), n_deg, &mut pow_x);
                        for (k, p) in pow_x.iter().enumerate() {
                            contrib[chosen.offset + k] += w * p;
                        }
                    }
                    EffectiveShape::Box { t, x } => {
                        fill_box_monomials(
                            &mut occ_next,
                            t,
                            x,
                            n_deg,
                            end.t,
                            end.x,
                            end.alpha,
                            &mut pow_t,
                            &mut pow_x,
                        );
                        for (k, v) in occ_next.iter().enumerate() {
                            contrib[chosen.offset + k] += v;
                        }
                    }
                }

                // Nonzero blocks: the occupation block and the chosen exit.
                let exit_count = match chosen.shape {
                    EffectiveShape::Point { .. } => 1,
                    EffectiveShape::TimeLine { .. } | EffectiveShape::StateLine { .. } => {
                        n_deg as usize + 1
                    }
                    EffectiveShape::Box { .. } => occ_count,
                };
                let mut idxs: Vec<usize> = (occ_off..occ_off + occ_count)
                    .chain(chosen.offset..chosen.offset + exit_count)
                    .collect();
                idxs.sort_unstable();
                for (pos, &a) in idxs.iter().enumerate() {
                    sum[a] += contrib[a];
                    for &b in &idxs[pos..] {
                        outer[a * d + b] += contrib[a] * contrib[b];
                    }
                }
            }
            (sum, outer)
        })
        .collect();

    let mut s1 = vec![0.0; d];
    let mut s2 = vec![0.0; d * d];
    for (sum, outer) in &partials {
        for (acc, v) in s1.iter_mut().zip(sum) {
            *acc += v;
        }
        for (acc, v) in s2.iter_mut().zip(outer) {
            *acc += v;
        }
    }
    let n = config.paths as f64;
    let mean: Vec<f64> = s1.iter().map(|s| s / n).collect();
    let mut cov_mean = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let c = (s2[i * d + j] - s1[i] * s1[j] / n) / ((n - 1.0) * n);
            cov_mean[(i, j)] = c;
            cov_mean[(j, i)] = c;
        }
    }
    Ok(McMomentStats {
        mean,
        cov_mean,
        samples: config.paths,
    })
}

/// `L∞` distance from `(t, x)` to a support set.
fn support_distance(s: &SupportSet, t: f64, x: f64) -> f64 {
    fn axis(i: Interval, v: f64) -> f64 {
        (i.lo() - v).max(v - i.hi()).max(0.0)
    }
    match *s {
        SupportSet::Rectangle { t: ti, x: xi } => axis(ti, t).max(axis(xi, x)),
        SupportSet::HSegment { t: ti, x: level } => axis(ti, t).max((x - level).abs()),
        SupportSet::VSegment { t: time, x: xi } => (t - time).abs().max(axis(xi, x)),
    }
}

/// Position of `v` in `interval` mapped onto `[0, 1]` and clamped.
fn unit_coord(interval: Interval, v: f64) -> f64 {
    if interval.len() > 0.0 {
        ((v - interval.lo()) / interval.len()).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

fn powers(s: f64, n: u32, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    for _ in 1..=n {
        let last = *out.last().expect("just pushed");
        out.push(last * s);
    }
}

/// Fill `out` with `e^{-α} s_t^i s_x^j` over the graded monomial order of a
/// box piece.
#[allow(clippy::too_many_arguments)]
fn fill_box_monomials(
    out: &mut [f64],
    t_int: Interval,
    x_int: Interval,
    n: u32,
    t: f64,
    x: f64,
    alpha: f64,
    pow_t: &mut Vec<f64>,
    pow_x: &mut Vec<f64>,
) {
    powers(unit_coord(t_int, t), n, pow_t);
    powers(unit_coord(x_int, x), n, pow_x);
    let w = (-alpha).exp();
    let mut idx = 0;
    for deg in 0..=n as usize {
        for i in 0..=deg {
            out[idx] = w * pow_t[i] * pow_x[deg - i];
            idx += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contracts::{
        cir_american_corridor, gbm_double_knockout, vg_double_knockout, CirCorridorParams,
        DiscountMode, GbmDkoParams, VgDkoParams,
    };
    use crate::oracles::closed_form::gbm_double_barrier_exact;

    fn quick(paths: u64, steps: u32, seed: u64) -> McConfig {
        McConfig {
            paths,
            steps_per_year: steps,
            seed,
            antithetic: false,
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let setup = gbm_double_knockout(&GbmDkoParams::default()).unwrap();
        let cfg = quick(4_000, 50, 9001);
        let a = mc_price(&setup.mc_model, &setup.contract, &cfg).unwrap();
        let b = mc_price(&setup.mc_model, &setup.contract, &cfg).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        assert_eq!(a.paths_used, 4_000);
    }

    #[test]
    fn gbm_price_matches_closed_form() {
        let setup = gbm_double_knockout(&GbmDkoParams::default()).unwrap();
        let cfg = quick(60_000, 800, 2024);
        let mc = mc_price(&setup.mc_model, &setup.contract, &cfg).unwrap();
        let exact = gbm_double_barrier_exact(0.1, 0.1, 1.0, 5.0, 1.3, 2.0, 1.0).unwrap();
        let slack = 3.0 * mc.std_error + 1e-3;
        assert!(
            (mc.estimate - exact).abs() <= slack,
            "mc {} vs exact {} (slack {slack})",
            mc.estimate,
            exact
        );
    }

    #[test]
    fn antithetic_reduces_standard_error_here() {
        let setup = gbm_double_knockout(&GbmDkoParams::default()).unwrap();
        let plain = mc_price(&setup.mc_model, &setup.contract, &quick(20_000, 50, 7)).unwrap();
        let mut cfg = quick(20_000, 50, 7);
        cfg.antithetic = true;
        let anti = mc_price(&setup.mc_model, &setup.contract, &cfg).unwrap();
        assert!(
            anti.std_error <= plain.std_error,
            "antithetic SE {} vs plain SE {}",
            anti.std_error,
            plain.std_error
        );
        assert_eq!(anti.paths_used, plain.paths_used);
    }

    #[test]
    fn config_violations_are_rejected() {
        let setup = gbm_double_knockout(&GbmDkoParams::default()).unwrap();
        let bad = McConfig {
            paths: 0,
            ..McConfig::default()
        };
        assert!(mc_price(&setup.mc_model, &setup.contract, &bad).is_err());
        let bad = McConfig {
            steps_per_year: 0,
            ..McConfig::default()
        };
        assert!(mc_price(&setup.mc_model, &setup.contract, &bad).is_err());
        let bad = McConfig {
            paths: 101,
            antithetic: true,
            ..McConfig::default()
        };
        assert!(mc_price(&setup.mc_model, &setup.contract, &bad).is_err());
    }

    #[test]
    fn pure_jump_models_reject_antithetic() {
        let setup = vg_double_knockout(&VgDkoParams::default(), DiscountMode::Killed).unwrap();
        let cfg = McConfig {
            paths: 100,
            antithetic: true,
            ..McConfig::default()
        };
        assert!(mc_price(&setup.model, &setup.contract, &cfg).is_err());
    }

    #[test]
    fn frozen_moment_tables_are_not_simulable() {
        let setup = vg_double_knockout(&VgDkoParams::default(), DiscountMode::Killed).unwrap();
        let frozen = setup
            .model
            .truncate_for_barriers((-1.0, 1.0), 1.0, 4)
            .unwrap();
        let err = mc_price(&frozen, &setup.contract, &quick(100, 50, 1)).unwrap_err();
        assert!(err.to_string().contains("moment table"));
    }

    #[test]
    fn vg_truncated_price_is_deterministic_and_finite() {
        let setup = vg_double_knockout(&VgDkoParams::default(), DiscountMode::Killed).unwrap();
        let cfg = quick(2_000, 100, 77);
        let a = mc_price(&setup.model, &setup.contract, &cfg).unwrap();
        let b = mc_price(&setup.model, &setup.contract, &cfg).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert!(a.estimate.is_finite() && a.estimate > 0.0);
    }

    #[test]
    fn corridor_moment_objective_reproduces_price_exactly() {
        let setup = cir_american_corridor(&CirCorridorParams::default()).unwrap();
        let cfg = quick(3_000, 100, 5150);
        let registry = VarRegistry::new(&setup.exit_pieces, &setup.occupation, 3).unwrap();
        let stats = mc_measure_moments(&setup.model, &setup.contract, &registry, &cfg).unwrap();
        let price = mc_price(&setup.model, &setup.contract, &cfg).unwrap();
        let expr = setup.objective.to_expr(&registry).unwrap();
        let via_moments = stats.eval(&expr);
        assert!(
            (via_moments - price.estimate).abs() <= 1e-10,
            "moments {} vs direct {}",
            via_moments,
            price.estimate
        );
        assert!(stats.std_error(&expr) > 0.0);
    }

    #[test]
    fn gbm_moment_objective_reproduces_price_exactly() {
        let setup = gbm_double_knockout(&GbmDkoParams::default()).unwrap();
        let cfg = quick(2_000, 60, 31337);
        let registry = VarRegistry::new(&setup.exit_pieces, &setup.occupation, 4).unwrap();
        let stats = mc_measure_moments(&setup.model, &setup.contract, &registry, &cfg).unwrap();
        let price = mc_price(&setup.model, &setup.contract, &cfg).unwrap();
        let expr = setup.objective.to_expr(&registry).unwrap();
        assert!((stats.eval(&expr) - price.estimate).abs() <= 1e-10);
    }

    #[test]
    fn undiscounted_exit_masses_sum_to_one() {
        let params = CirCorridorParams {
            r: 0.0,
            ..CirCorridorParams::default()
        };
        let setup = cir_american_corridor(&params).unwrap();
        let cfg = quick(2_000, 100, 99);
        let registry = VarRegistry::new(&setup.exit_pieces, &setup.occupation, 2).unwrap();
        let stats = mc_measure_moments(&setup.model, &setup.contract, &registry, &cfg).unwrap();
        let total: f64 = (0..registry.exit_count())
            .map(|i| {
                stats
                    .raw_moment(&registry, PieceRef::Exit(i), 0, 0)
                    .unwrap()
                    .0
            })
            .sum();
        assert!((total - 1.0).abs() <= 1e-12, "exit masses sum to {total}");
    }

    #[test]
    fn moment_estimation_rejects_antithetic() {
        let setup = gbm_double_knockout(&GbmDkoParams::default()).unwrap();
        let registry = VarRegistry::new(&setup.exit_pieces, &setup.occupation, 2).unwrap();
        let cfg = McConfig {
            paths: 100,
            antithetic: true,
            ..McConfig::default()
        };
        assert!(mc_measure_moments(&setup.model, &setup.contract, &registry, &cfg).is_err());
    }
}
