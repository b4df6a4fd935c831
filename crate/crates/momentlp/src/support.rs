//! Supports of the unknown measures and the labeled pieces they split into.
//!
//! The exit-location measure of a barrier problem concentrates on barrier
//! segments, overshoot rectangles, and the terminal segment; the occupation
//! measure lives on the time-state box.  Each piece carries one block of
//! moment variables in the LP.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed bounded interval; degenerate (`lo == hi`) is allowed and treated as
/// a point by the moment machinery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::config(format!(
                "interval bounds must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo > hi {
            return Err(Error::config(format!(
                "interval bounds must satisfy lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(v: f64) -> Result<Self> {
        Interval::new(v, v)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lo - tol && v <= self.hi + tol
    }
}

/// Geometric support of one measure piece in the `(t, x)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupportSet {
    /// `[t_lo, t_hi] × [x_lo, x_hi]`.
    Rectangle { t: Interval, x: Interval },
    /// Horizontal segment `[t_lo, t_hi] × {x}` (e.g. a barrier level).
    HSegment { t: Interval, x: f64 },
    /// Vertical segment `{t} × [x_lo, x_hi]` (e.g. the maturity slice).
    VSegment { t: f64, x: Interval },
}

/// How a support behaves for moment purposes once degenerate intervals are
/// collapsed: a full 2D box, a 1D segment along one axis, or a single point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EffectiveShape {
    /// Mass at `(t, x)`; moments are pure evaluations times the mass.
    Point { t: f64, x: f64 },
    /// Time varies over `interval`, state fixed at `x`.
    TimeLine { interval: Interval, x: f64 },
    /// State varies over `interval`, time fixed at `t`.
    StateLine { t: f64, interval: Interval },
    /// Both coordinates vary.
    Box { t: Interval, x: Interval },
}

impl SupportSet {
    pub fn rectangle(t: (f64, f64), x: (f64, f64)) -> Result<Self> {
        Ok(SupportSet::Rectangle {
            t: Interval::new(t.0, t.1)?,
            x: Interval::new(x.0, x.1)?,
        })
    }

    pub fn h_segment(t: (f64, f64), x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::config(format!("segment level must be finite, got {x}")));
        }
        Ok(SupportSet::HSegment {
            t: Interval::new(t.0, t.1)?,
            x,
        })
    }

    pub fn v_segment(t: f64, x: (f64, f64)) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::config(format!("segment time must be finite, got {t}")));
        }
        Ok(SupportSet::VSegment {
            t,
            x: Interval::new(x.0, x.1)?,
        })
    }

    /// Collapse degenerate intervals so the moment machinery sees the true
    /// dimensionality.
    pub fn effective_shape(&self) -> EffectiveShape {
        match *self {
            SupportSet::Rectangle { t, x } => match (t.is_degenerate(), x.is_degenerate()) {
                (true, true) => EffectiveShape::Point { t: t.lo(), x: x.lo() },
                (false, true) => EffectiveShape::TimeLine { interval: t, x: x.lo() },
                (true, false) => EffectiveShape::StateLine { t: t.lo(), interval: x },
                (false, false) => EffectiveShape::Box { t, x },
            },
            SupportSet::HSegment { t, x } => {
                if t.is_degenerate() {
                    EffectiveShape::Point { t: t.lo(), x }
                } else {
                    EffectiveShape::TimeLine { interval: t, x }
                }
            }
            SupportSet::VSegment { t, x } => {
                if x.is_degenerate() {
                    EffectiveShape::Point { t, x: x.lo() }
                } else {
                    EffectiveShape::StateLine { t, interval: x }
                }
            }
        }
    }

    /// Moment dimensionality after collapsing degeneracies (0, 1 or 2).
    pub fn dim(&self) -> usize {
        match self.effective_shape() {
            EffectiveShape::Point { .. } => 0,
            EffectiveShape::TimeLine { .. } | EffectiveShape::StateLine { .. } => 1,
            EffectiveShape::Box { .. } => 2,
        }
    }

    pub fn contains(&self, t: f64, x: f64, tol: f64) -> bool {
        match *self {
            SupportSet::Rectangle { t: ti, x: xi } => ti.contains(t, tol) && xi.contains(x, tol),
            SupportSet::HSegment { t: ti, x: level } => {
                ti.contains(t, tol) && (x - level).abs() <= tol
            }
            SupportSet::VSegment { t: time, x: xi } => {
                (t - time).abs() <= tol && xi.contains(x, tol)
            }
        }
    }

    /// Structural equality up to floating-point tolerance, used to align
    /// contract payoff pieces with measure pieces.
    pub fn approx_eq(&self, other: &SupportSet, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= tol;
        match (*self, *other) {
            (SupportSet::Rectangle { t: t1, x: x1 }, SupportSet::Rectangle { t: t2, x: x2 }) => {
                close(t1.lo(), t2.lo())
                    && close(t1.hi(), t2.hi())
                    && close(x1.lo(), x2.lo())
                    && close(x1.hi(), x2.hi())
            }
            (SupportSet::HSegment { t: t1, x: x1 }, SupportSet::HSegment { t: t2, x: x2 }) => {
                close(t1.lo(), t2.lo()) && close(t1.hi(), t2.hi()) && close(x1, x2)
            }
            (SupportSet::VSegment { t: t1, x: x1 }, SupportSet::VSegment { t: t2, x: x2 }) => {
                close(t1, t2) && close(x1.lo(), x2.lo()) && close(x1.hi(), x2.hi())
            }
            _ => false,
        }
    }
}

/// Reference to one measure piece of a problem: an exit piece by position,
/// or the occupation piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PieceRef {
    Exit(usize),
    Occupation,
}

impl std::fmt::Display for PieceRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PieceRef::Exit(i) => write!(f, "exit[{i}]"),
            PieceRef::Occupation => write!(f, "occupation"),
        }
    }
}

/// One labeled piece of an unknown measure (e.g. `nu1` on the upper barrier,
/// or `mu` on the occupation box).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurePiece {
    pub label: String,
    pub support: SupportSet,
}

impl MeasurePiece {
    pub fn new(label: impl Into<String>, support: SupportSet) -> Self {
        MeasurePiece {
            label: label.into(),
            support,
        }
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    /// Number of LP variables this piece contributes at truncation degree `n`:
    /// 1 for a point, `n + 1` for a segment, `(n+1)(n+2)/2` for a box.
    pub fn var_count(&self, n: u32) -> usize {
        let n = n as usize;
        match self.dim() {
            0 => 1,
            1 => n + 1,
            _ => (n + 1) * (n + 2) / 2,
        }
    }
}
