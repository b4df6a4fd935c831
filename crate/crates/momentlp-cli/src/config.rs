//! Run configuration: the on-disk text format, per-example defaults, and
//! assembly of the pricing problem a configuration describes.
//!
//! A configuration is a TOML document with three sections:
//!
//! ```toml
//! [run]
//! example = "gbm-dko"     # gbm-dko | vg-dko | cir-corridor | expvg-dnt | custom
//! n_min = 4               # truncation-degree ladder, inclusive
//! n_max = 12
//! oracle = "exact"        # none | mc | exact
//! output = "text"         # text | csv
//! p_star_shortcut = false # jump knockouts: constant e^{-lambda* T} factor
//!                         # instead of killed discounting inside the LP
//!
//! [params]                # example-specific values; omitted keys keep the
//! b = 0.1                 # built-in defaults of the chosen example
//!
//! [mc]                    # Monte Carlo oracle settings
//! paths = 200000
//! steps_per_year = 250
//! seed = 42
//! antithetic = false
//! ```
//!
//! Serializing a parsed configuration and re-parsing it reproduces the same
//! run; reports are deterministic given the seed.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use momentlp::contracts::{
    cir_american_corridor, expvg_double_no_touch, gbm_double_knockout, payoff_to_objective,
    vg_double_knockout, CirCorridorParams, ContractSpec, DiscountMode, ExpVgDntParams,
    GbmDkoParams, ProblemSetup, VgDkoParams,
};
use momentlp::levy::{vg_tail_mass, LevyMeasureSpec};
use momentlp::model::PolynomialModel;
use momentlp::oracles::{gbm_double_barrier_exact, McConfig};
use momentlp::poly::BiPoly;
use momentlp::support::{Interval, MeasurePiece, SupportSet};
use momentlp::{Error, Result};

/// Hard limits on the truncation-degree ladder.
pub const N_FLOOR: u32 = 2;
pub const N_CEILING: u32 = 20;

/// One full run description; see the module docs for the file layout.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    /// Example-specific parameter map; keys not listed fall back to the
    /// example's built-in defaults (the `custom` example has none and must
    /// be fully specified).
    #[serde(default)]
    pub params: toml::Table,
    #[serde(default)]
    pub mc: McConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub example: ExampleKind,
    #[serde(default = "default_n_min")]
    pub n_min: u32,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    #[serde(default)]
    pub oracle: OracleKind,
    #[serde(default)]
    pub output: OutputFormat,
    /// Jump knockouts only: discount the LP optima by the constant factor
    /// `p* = e^{-lambda* T}` instead of adding the removed jump mass
    /// `lambda*` to the discount rate inside the LP.  Valid because these
    /// payoffs live at `t = T`, where the killing discount is constant.
    #[serde(default)]
    pub p_star_shortcut: bool,
}

fn default_n_min() -> u32 {
    4
}

fn default_n_max() -> u32 {
    12
}

/// `Display` through the serde kebab-case name, so report headers, flag
/// values, and config files all show the same spelling.
macro_rules! fmt_via_serde {
    () => {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let v = toml::Value::try_from(self).map_err(|_| fmt::Error)?;
            match v {
                toml::Value::String(s) => f.write_str(&s),
                _ => Err(fmt::Error),
            }
        }
    };
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleKind {
    /// Double knockout call on a geometric Brownian motion.
    GbmDko,
    /// Double knockout call on a Variance Gamma process with drift.
    VgDko,
    /// American corridor on a CIR square-root process.
    CirCorridor,
    /// Double no-touch on an exponential VG martingale.
    ExpvgDnt,
    /// User-assembled polynomial model and barrier contract.
    Custom,
}

impl fmt::Display for ExampleKind {
    fmt_via_serde!();
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    #[default]
    None,
    Mc,
    Exact,
}

impl fmt::Display for OracleKind {
    fmt_via_serde!();
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
}

impl fmt::Display for OutputFormat {
    fmt_via_serde!();
}

impl RunConfig {
    /// Defaults for a named example: full built-in parameter table, ladder
    /// `4..12`, no oracle, text output.
    pub fn example_default(example: ExampleKind) -> Result<Self> {
        let config = RunConfig {
            run: RunSection {
                example,
                n_min: default_n_min(),
                n_max: default_n_max(),
                oracle: OracleKind::None,
                output: OutputFormat::Text,
                p_star_shortcut: false,
            },
            params: default_params_table(example)?,
            mc: McConfig::default(),
        };
        Ok(config)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text)
            .map_err(|e| Error::config(format!("configuration parse error: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| Error::config(format!("configuration serialization error: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        let run = &self.run;
        if run.n_min < N_FLOOR || run.n_max > N_CEILING || run.n_min > run.n_max {
            return Err(Error::config(format!(
                "need {N_FLOOR} <= n_min <= n_max <= {N_CEILING}, got n_min = {}, n_max = {}",
                run.n_min, run.n_max
            )));
        }
        self.mc.validate()?;
        if run.p_star_shortcut && !example_has_jumps(run.example, &self.params) {
            return Err(Error::config(
                "p_star_shortcut applies only to examples with a jump part",
            ));
        }
        Ok(())
    }

    /// Truncation degrees of the ladder, ascending.
    pub fn n_values(&self) -> Vec<u32> {
        (self.run.n_min..=self.run.n_max).collect()
    }

    /// Built-in defaults overlaid with this configuration's `[params]`
    /// entries.  Unknown keys survive the merge and are rejected by the
    /// typed decode in [`RunConfig::build_problem`].
    pub fn effective_params(&self) -> Result<toml::Table> {
        let mut table = default_params_table(self.run.example)?;
        for (key, value) in &self.params {
            table.insert(key.clone(), value.clone());
        }
        Ok(table)
    }

    /// Set one `[params]` entry from a `key=value` flag; the value is parsed
    /// as a TOML value, falling back to a bare string.
    pub fn set_param(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment.split_once('=').ok_or_else(|| {
            Error::config(format!("--set expects key=value, got '{assignment}'"))
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::config(format!("empty key in '--set {assignment}'")));
        }
        self.params.insert(key.to_string(), parse_toml_value(raw.trim()));
        Ok(())
    }

    fn discount_mode(&self) -> DiscountMode {
        if self.run.p_star_shortcut {
            DiscountMode::PStarFactor
        } else {
            DiscountMode::Killed
        }
    }

    /// Assemble the pricing problem this configuration describes.
    pub fn build_problem(&self) -> Result<ProblemSetup> {
        self.validate()?;
        let params = toml::Value::Table(self.effective_params()?);
        let mode = self.discount_mode();
        match self.run.example {
            ExampleKind::GbmDko => gbm_double_knockout(&decode(params)?),
            ExampleKind::VgDko => vg_double_knockout(&decode(params)?, mode),
            ExampleKind::CirCorridor => cir_american_corridor(&decode(params)?),
            ExampleKind::ExpvgDnt => expvg_double_no_touch(&decode(params)?, mode),
            ExampleKind::Custom => build_custom(&decode(params)?, mode),
        }
    }

    /// Big-jump survival factor `p* = e^{-lambda* T}` for examples with a
    /// truncated jump part, `None` for pure diffusions.
    pub fn p_star(&self) -> Result<Option<f64>> {
        let params = toml::Value::Table(self.effective_params()?);
        let survival = |c: f64, g: f64, m: f64, width: f64, maturity: f64| -> Result<f64> {
            let lambda_star = vg_tail_mass(c, g, m, -width, width)?;
            Ok((-lambda_star * maturity).exp())
        };
        match self.run.example {
            ExampleKind::GbmDko | ExampleKind::CirCorridor => Ok(None),
            ExampleKind::VgDko => {
                let p: VgDkoParams = decode(params)?;
                survival(p.c, p.g, p.m, p.b_u - p.b_d, p.maturity).map(Some)
            }
            ExampleKind::ExpvgDnt => {
                let p: ExpVgDntParams = decode(params)?;
                let width = p.b_u.ln() - p.b_d.ln();
                survival(p.c, p.g, p.m, width, p.maturity).map(Some)
            }
            ExampleKind::Custom => {
                let p: CustomParams = decode(params)?;
                match p.jumps {
                    Some(j) => survival(j.c, j.g, j.m, p.b_u - p.b_d, p.maturity).map(Some),
                    None => Ok(None),
                }
            }
        }
    }

    /// Closed-form reference price, where one exists for the example.
    pub fn exact_reference(&self) -> Result<f64> {
        match self.run.example {
            ExampleKind::GbmDko => {
                let p: GbmDkoParams = decode(toml::Value::Table(self.effective_params()?))?;
                gbm_double_barrier_exact(
                    p.b, p.sigma, p.b_d, p.b_u, p.strike, p.x0, p.maturity,
                )
            }
            other => Err(Error::config(format!(
                "no closed-form reference for example '{other}'; use oracle = \"mc\""
            ))),
        }
    }
}

fn decode<T: serde::de::DeserializeOwned>(params: toml::Value) -> Result<T> {
    params
        .try_into()
        .map_err(|e| Error::config(format!("[params] decode error: {e}")))
}

fn default_params_table(example: ExampleKind) -> Result<toml::Table> {
    let value = match example {
        ExampleKind::GbmDko => toml::Value::try_from(GbmDkoParams::default()),
        ExampleKind::VgDko => toml::Value::try_from(VgDkoParams::default()),
        ExampleKind::CirCorridor => toml::Value::try_from(CirCorridorParams::default()),
        ExampleKind::ExpvgDnt => toml::Value::try_from(ExpVgDntParams::default()),
        // No sensible default dynamics exist; the user supplies everything.
        ExampleKind::Custom => return Ok(toml::Table::new()),
    };
    match value {
        Ok(toml::Value::Table(table)) => Ok(table),
        Ok(other) => Err(Error::config(format!(
            "default parameters serialized to a non-table value: {other:?}"
        ))),
        Err(e) => Err(Error::config(format!("default parameter encoding: {e}"))),
    }
}

fn example_has_jumps(example: ExampleKind, params: &toml::Table) -> bool {
    match example {
        ExampleKind::VgDko | ExampleKind::ExpvgDnt => true,
        ExampleKind::GbmDko | ExampleKind::CirCorridor => false,
        ExampleKind::Custom => params.contains_key("jumps"),
    }
}

fn parse_toml_value(raw: &str) -> toml::Value {
    // Reuse the document parser on a one-entry table so numbers, booleans,
    // arrays, and quoted strings all round-trip; bare words become strings.
    let wrapped = format!("v = {raw}");
    match wrapped.parse::<toml::Table>() {
        Ok(mut table) => table.remove("v").unwrap_or_else(|| raw.into()),
        Err(_) => raw.into(),
    }
}

/// One monomial `c * t^t_deg * x^x_deg` of a model polynomial.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    #[serde(default)]
    pub t: u32,
    #[serde(default)]
    pub x: u32,
    pub c: f64,
}

fn poly_from_terms(terms: &[PolyTerm]) -> BiPoly {
    let triples: Vec<(u32, u32, f64)> = terms.iter().map(|p| (p.t, p.x, p.c)).collect();
    BiPoly::from_terms(&triples)
}

/// Two-sided exponential-type jump density parameters `(C, G, M)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VgJumps {
    pub c: f64,
    pub g: f64,
    pub m: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum PayoffKind {
    /// `(x - strike)^+` at maturity if neither barrier was hit.
    KnockoutCall,
    /// One unit at maturity if neither barrier was hit.
    NoTouch,
    /// One unit per year until a barrier is hit or maturity.
    Corridor,
}

/// A user-assembled problem: polynomial dynamics plus one of the stock
/// payoff shapes on a barrier interval.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CustomParams {
    /// Drift coefficients, e.g. `[{ x = 1, c = 0.1 }]` for `0.1 x`.
    pub drift: Vec<PolyTerm>,
    #[serde(default)]
    pub sigma2: Vec<PolyTerm>,
    #[serde(default)]
    pub discount: Vec<PolyTerm>,
    /// Optional pure-jump part; jump sizes are truncated at the barrier
    /// width and the removed mass handled per the run's discount mode.
    #[serde(default)]
    pub jumps: Option<VgJumps>,
    pub b_d: f64,
    pub b_u: f64,
    pub x0: f64,
    pub maturity: f64,
    pub payoff: PayoffKind,
    /// Required for `payoff = "knockout-call"`, ignored otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strike: Option<f64>,
}

/// Assemble a [`ProblemSetup`] from user-specified dynamics and payoff.
pub fn build_custom(p: &CustomParams, mode: DiscountMode) -> Result<ProblemSetup> {
    let barriers = Interval::new(p.b_d, p.b_u)?;
    if !(p.b_d < p.x0 && p.x0 < p.b_u) {
        return Err(Error::config(format!(
            "x0 must lie strictly between the barriers, got x0 = {} in [{}, {}]",
            p.x0, p.b_d, p.b_u
        )));
    }
    let drift = poly_from_terms(&p.drift);
    let sigma2 = poly_from_terms(&p.sigma2);
    let discount = poly_from_terms(&p.discount);
    let t_span = (0.0, p.maturity);

    // Jump part: truncate at the barrier width so retained jumps cannot
    // overshoot past the adjacent rectangle, and route the removed mass
    // through the chosen discount mode.
    let width = p.b_u - p.b_d;
    let (model, mc_model, external, barrier_pieces) = match p.jumps {
        Some(VgJumps { c, g, m }) => {
            let lambda_star = vg_tail_mass(c, g, m, -width, width)?;
            let levy_trunc = LevyMeasureSpec::TruncatedVg {
                c,
                g,
                m,
                l_minus: -width,
                l_plus: width,
            };
            let (lp_discount, external) = match mode {
                DiscountMode::Killed => (discount.add(&BiPoly::constant(lambda_star)), 1.0),
                DiscountMode::PStarFactor => {
                    (discount.clone(), (-lambda_star * p.maturity).exp())
                }
            };
            let model = PolynomialModel::new(
                drift.clone(),
                sigma2.clone(),
                BiPoly::constant(1.0),
                lp_discount,
                levy_trunc,
                p.x0,
                0.0,
            )?;
            let mc_model = PolynomialModel::new(
                drift,
                sigma2,
                BiPoly::constant(1.0),
                discount,
                LevyMeasureSpec::Vg { c, g, m },
                p.x0,
                0.0,
            )?;
            let pieces = vec![
                MeasurePiece::new(
                    "nu1",
                    SupportSet::rectangle(t_span, (p.b_u, p.b_u + width))?,
                ),
                MeasurePiece::new(
                    "nu2",
                    SupportSet::rectangle(t_span, (p.b_d - width, p.b_d))?,
                ),
            ];
            (model, mc_model, external, pieces)
        }
        None => {
            if mode == DiscountMode::PStarFactor {
                return Err(Error::config(
                    "p_star_shortcut applies only to examples with a jump part",
                ));
            }
            let model = PolynomialModel::diffusion(drift, sigma2, discount, p.x0)?;
            let pieces = vec![
                MeasurePiece::new("nu1", SupportSet::h_segment(t_span, p.b_u)?),
                MeasurePiece::new("nu2", SupportSet::h_segment(t_span, p.b_d)?),
            ];
            (model.clone(), model, 1.0, pieces)
        }
    };
    model.validate_on_box(t_span, (p.b_d, p.b_u))?;

    let occupation = MeasurePiece::new("mu", SupportSet::rectangle(t_span, (p.b_d, p.b_u))?);
    let mut exit_pieces = barrier_pieces;
    let mut terminal = Vec::new();
    let mut running = vec![(occupation.support.clone(), BiPoly::zero())];
    match p.payoff {
        PayoffKind::KnockoutCall => {
            let strike = p.strike.ok_or_else(|| {
                Error::config("payoff = \"knockout-call\" needs a strike")
            })?;
            if !(p.b_d < strike && strike < p.b_u) {
                return Err(Error::config(format!(
                    "strike must lie strictly between the barriers, got {strike} in [{}, {}]",
                    p.b_d, p.b_u
                )));
            }
            let below = SupportSet::v_segment(p.maturity, (p.b_d, strike))?;
            let above = SupportSet::v_segment(p.maturity, (strike, p.b_u))?;
            exit_pieces.push(MeasurePiece::new("nu3", below.clone()));
            exit_pieces.push(MeasurePiece::new("nu4", above.clone()));
            terminal.push((below, BiPoly::zero()));
            terminal.push((above, BiPoly::x().sub(&BiPoly::constant(strike))));
        }
        PayoffKind::NoTouch => {
            let segment = SupportSet::v_segment(p.maturity, (p.b_d, p.b_u))?;
            exit_pieces.push(MeasurePiece::new("nu3", segment.clone()));
            terminal.push((segment, BiPoly::constant(1.0)));
        }
        PayoffKind::Corridor => {
            let segment = SupportSet::v_segment(p.maturity, (p.b_d, p.b_u))?;
            exit_pieces.push(MeasurePiece::new("nu3", segment.clone()));
            terminal.push((segment, BiPoly::zero()));
            running[0].1 = BiPoly::constant(1.0);
        }
    }

    let contract = ContractSpec::new(barriers, p.maturity, terminal, running, external)?;
    let objective = payoff_to_objective(&contract, &exit_pieces, &occupation)?;
    Ok(ProblemSetup {
        name: "custom".to_string(),
        model,
        mc_model,
        contract,
        exit_pieces,
        occupation,
        objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gbm_config_text() -> &'static str {
        r#"
            [run]
            example = "gbm-dko"
            n_min = 4
            n_max = 8
            oracle = "exact"

            [params]
            b = 0.2
            sigma = 0.2

            [mc]
            paths = 1000
            seed = 7
        "#
    }

    #[test]
    fn parse_merge_and_round_trip() {
        let config = RunConfig::from_toml_str(gbm_config_text()).unwrap();
        assert_eq!(config.run.example, ExampleKind::GbmDko);
        assert_eq!(config.run.output, OutputFormat::Text);
        let params = config.effective_params().unwrap();
        // Overridden keys take the file's values, the rest keep defaults.
        assert_eq!(params["b"].as_float(), Some(0.2));
        assert_eq!(params["strike"].as_float(), Some(1.3));
        assert_eq!(config.mc.paths, 1000);
        assert_eq!(config.mc.steps_per_year, 250);

        let round_tripped = RunConfig::from_toml_str(&config.to_toml_string().unwrap()).unwrap();
        assert_eq!(round_tripped, config);
    }

    #[test]
    fn ladder_limits_are_enforced() {
        let mut config = RunConfig::example_default(ExampleKind::GbmDko).unwrap();
        config.run.n_min = 1;
        assert!(config.validate().is_err());
        config.run.n_min = 10;
        config.run.n_max = 9;
        assert!(config.validate().is_err());
        config.run.n_max = 21;
        config.run.n_min = 4;
        assert!(config.validate().is_err());
    }

    #[test]
    fn unknown_parameter_keys_are_rejected() {
        let mut config = RunConfig::example_default(ExampleKind::GbmDko).unwrap();
        config.set_param("volatility=0.3").unwrap();
        let err = config.build_problem().unwrap_err().to_string();
        assert!(err.contains("volatility"), "unhelpful error: {err}");
    }

    #[test]
    fn set_param_parses_toml_scalars() {
        let mut config = RunConfig::example_default(ExampleKind::GbmDko).unwrap();
        config.set_param("sigma=0.25").unwrap();
        config.set_param("strike = 1.5").unwrap();
        assert_eq!(config.params["sigma"].as_float(), Some(0.25));
        assert_eq!(config.params["strike"].as_float(), Some(1.5));
        assert!(config.set_param("no_equals_sign").is_err());
        let problem = config.build_problem().unwrap();
        assert_eq!(problem.name, "gbm-dko");
    }

    #[test]
    fn p_star_shortcut_needs_jumps() {
        let mut config = RunConfig::example_default(ExampleKind::GbmDko).unwrap();
        config.run.p_star_shortcut = true;
        assert!(config.validate().is_err());

        let mut config = RunConfig::example_default(ExampleKind::VgDko).unwrap();
        config.run.p_star_shortcut = true;
        config.validate().unwrap();
        let problem = config.build_problem().unwrap();
        let p_star = config.p_star().unwrap().unwrap();
        assert!((problem.contract.external_discount - p_star).abs() < 1e-15);
    }

    #[test]
    fn exact_reference_exists_only_for_gbm() {
        let config = RunConfig::example_default(ExampleKind::GbmDko).unwrap();
        let exact = config.exact_reference().unwrap();
        assert!((exact - 0.9103).abs() < 1e-4);
        let config = RunConfig::example_default(ExampleKind::CirCorridor).unwrap();
        assert!(config.exact_reference().is_err());
    }

    #[test]
    fn custom_matches_the_builtin_gbm_bundle() {
        let text = r#"
            [run]
            example = "custom"
            n_min = 4
            n_max = 6

            [params]
            drift = [{ x = 1, c = 0.1 }]
            sigma2 = [{ x = 2, c = 0.01 }]
            b_d = 1.0
            b_u = 5.0
            x0 = 2.0
            maturity = 1.0
            payoff = "knockout-call"
            strike = 1.3
        "#;
        let config = RunConfig::from_toml_str(text).unwrap();
        let custom = config.build_problem().unwrap();
        let builtin = gbm_double_knockout(&GbmDkoParams::default()).unwrap();
        assert_eq!(custom.exit_pieces.len(), builtin.exit_pieces.len());
        for (a, b) in custom.exit_pieces.iter().zip(&builtin.exit_pieces) {
            assert!(a.support.approx_eq(&b.support, 1e-12));
        }
        assert_eq!(custom.objective.terms().len(), builtin.objective.terms().len());
    }

    #[test]
    fn custom_payoff_validation() {
        let mut config = RunConfig::example_default(ExampleKind::Custom).unwrap();
        for entry in [
            "drift=[{ x = 1, c = 0.1 }]",
            "b_d=1.0",
            "b_u=5.0",
            "x0=2.0",
            "maturity=1.0",
            "payoff=\"knockout-call\"",
        ] {
            config.set_param(entry).unwrap();
        }
        // Missing strike.
        assert!(config.build_problem().is_err());
        config.set_param("strike=7.0").unwrap();
        // Strike outside the barriers.
        assert!(config.build_problem().is_err());
        config.set_param("strike=1.3").unwrap();
        config.build_problem().unwrap();
    }

    #[test]
    fn custom_corridor_has_running_payoff() {
        let text = r#"
            [run]
            example = "custom"

            [params]
            drift = [{ c = 0.5 }, { x = 1, c = -0.5 }]
            sigma2 = [{ x = 1, c = 0.04 }]
            discount = [{ c = 0.1 }]
            b_d = 0.5
            b_u = 1.5
            x0 = 1.0
            maturity = 1.0
            payoff = "corridor"
        "#;
        let custom = RunConfig::from_toml_str(text).unwrap().build_problem().unwrap();
        let builtin = cir_american_corridor(&CirCorridorParams::default()).unwrap();
        assert!(custom.contract.has_running_payoff());
        assert_eq!(custom.objective.terms().len(), builtin.objective.terms().len());
    }
}
