//! Variable layout of the moment LP and the affine rescale maps.
//!
//! Each measure piece owns a block of variables: the *scaled* moments of the
//! piece pushed onto the unit interval/box.  Raw moments over the actual
//! support (what the adjoint identity and the payoff objective talk about)
//! are triangular linear combinations of the scaled ones, and vice versa;
//! both directions live here so that LP rows, objectives, and Monte Carlo
//! moment estimates can be moved between coordinate systems.

use crate::error::{Error, Result};
use crate::poly::binomial;
use crate::support::{EffectiveShape, Interval, MeasurePiece, PieceRef};

use super::LinExpr;

/// Meaning of one scaled LP variable inside its piece's block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKey {
    /// Total (discounted) mass of a point piece.
    Mass,
    /// Scaled moment `m̃_k` of a 1D piece.
    OneD(u32),
    /// Scaled moment `m̃_{i,j}` of a 2D piece (`i` on `t`, `j` on `x`).
    TwoD(u32, u32),
}

#[derive(Debug, Clone)]
struct PieceEntry {
    piece: MeasurePiece,
    shape: EffectiveShape,
    offset: usize,
    count: usize,
}

/// Global variable table for one moment LP at truncation degree `n`.
#[derive(Debug, Clone)]
pub struct VarRegistry {
    n: u32,
    entries: Vec<PieceEntry>,
    n_exit: usize,
    total: usize,
}

impl VarRegistry {
    /// Lay out variables for the exit pieces (in order) followed by the
    /// occupation piece.
    pub fn new(exit_pieces: &[MeasurePiece], occupation: &MeasurePiece, n: u32) -> Result<Self> {
        if exit_pieces.is_empty() {
            return Err(Error::config("at least one exit piece is required"));
        }
        let mut labels: Vec<&str> = exit_pieces
            .iter()
            .chain(std::iter::once(occupation))
            .map(|p| p.label.as_str())
            .collect();
        labels.sort_unstable();
        if labels.iter().any(|l| l.is_empty()) || labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config(
                "piece labels must be nonempty and unique".to_string(),
            ));
        }
        let mut entries = Vec::with_capacity(exit_pieces.len() + 1);
        let mut offset = 0;
        for piece in exit_pieces.iter().chain(std::iter::once(occupation)) {
            let count = piece.var_count(n);
            entries.push(PieceEntry {
                piece: piece.clone(),
                shape: piece.support.effective_shape(),
                offset,
                count,
            });
            offset += count;
        }
        Ok(VarRegistry {
            n,
            n_exit: exit_pieces.len(),
            total: offset,
            entries,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn var_count(&self) -> usize {
        self.total
    }

    pub fn exit_count(&self) -> usize {
        self.n_exit
    }

    /// All piece references, exit pieces first, occupation last.
    pub fn refs(&self) -> Vec<PieceRef> {
        (0..self.n_exit)
            .map(PieceRef::Exit)
            .chain(std::iter::once(PieceRef::Occupation))
            .collect()
    }

    fn entry(&self, r: PieceRef) -> Result<&PieceEntry> {
        let idx = match r {
            PieceRef::Exit(i) => {
                if i >= self.n_exit {
                    return Err(Error::config(format!(
                        "piece {r} is not declared (have {} exit pieces)",
                        self.n_exit
                    )));
                }
                i
            }
            PieceRef::Occupation => self.n_exit,
        };
        Ok(&self.entries[idx])
    }

    pub fn piece(&self, r: PieceRef) -> Result<&MeasurePiece> {
        Ok(&self.entry(r)?.piece)
    }

    pub fn shape(&self, r: PieceRef) -> Result<EffectiveShape> {
        Ok(self.entry(r)?.shape)
    }

    /// Global index of the piece's scaled mass (`m̃_0` / `m̃_{0,0}`).
    pub fn mass_var(&self, r: PieceRef) -> Result<usize> {
        Ok(self.entry(r)?.offset)
    }

    /// Global indices and keys of all variables belonging to a piece.
    pub fn vars_of(&self, r: PieceRef) -> Result<Vec<(usize, VarKey)>> {
        let e = self.entry(r)?;
        let mut out = Vec::with_capacity(e.count);
        match e.shape {
            EffectiveShape::Point { .. } => out.push((e.offset, VarKey::Mass)),
            EffectiveShape::TimeLine { .. } | EffectiveShape::StateLine { .. } => {
                for k in 0..=self.n {
                    out.push((e.offset + k as usize, VarKey::OneD(k)));
                }
            }
            EffectiveShape::Box { .. } => {
                for d in 0..=self.n {
                    for i in 0..=d {
                        out.push((e.offset + idx_2d(i, d - i), VarKey::TwoD(i, d - i)));
                    }
                }
            }
        }
        debug_assert_eq!(out.len(), e.count);
        Ok(out)
    }

    /// Resolve a global variable index back to its piece and key.
    pub fn var_key(&self, var: usize) -> Result<(PieceRef, VarKey)> {
        let (pos, e) = self
            .entries
            .iter()
            .enumerate()
            .find(|(_, e)| var >= e.offset && var < e.offset + e.count)
            .ok_or_else(|| Error::config(format!("variable index {var} out of range")))?;
        let r = if pos == self.n_exit {
            PieceRef::Occupation
        } else {
            PieceRef::Exit(pos)
        };
        let local = var - e.offset;
        let key = match e.shape {
            EffectiveShape::Point { .. } => VarKey::Mass,
            EffectiveShape::TimeLine { .. } | EffectiveShape::StateLine { .. } => {
                VarKey::OneD(local as u32)
            }
            EffectiveShape::Box { .. } => {
                let mut d = 0u32;
                while ((d + 1) * (d + 2) / 2) as usize <= local {
                    d += 1;
                }
                let i = local - (d * (d + 1) / 2) as usize;
                VarKey::TwoD(i as u32, d - i as u32)
            }
        };
        Ok((r, key))
    }

    /// Human-readable variable name, e.g. `nu1[3]` or `mu[2,1]`.
    pub fn var_label(&self, var: usize) -> String {
        match self.var_key(var) {
            Ok((r, key)) => {
                let label = &self.entry(r).unwrap().piece.label;
                match key {
                    VarKey::Mass => format!("{label}[mass]"),
                    VarKey::OneD(k) => format!("{label}[{k}]"),
                    VarKey::TwoD(i, j) => format!("{label}[{i},{j}]"),
                }
            }
            Err(_) => format!("x{var}"),
        }
    }

    fn var_1d(&self, e: &PieceEntry, k: u32) -> usize {
        e.offset + k as usize
    }

    fn var_2d(&self, e: &PieceEntry, i: u32, j: u32) -> usize {
        e.offset + idx_2d(i, j)
    }

    /// Whether the raw full-plane moment `∫ t^i x^j` of the piece is a linear
    /// combination of variables present at this truncation degree.
    pub fn raw_moment_available(&self, r: PieceRef, i: u32, j: u32) -> bool {
        match self.entry(r).map(|e| e.shape) {
            Ok(EffectiveShape::Point { .. }) => true,
            Ok(EffectiveShape::TimeLine { .. }) => i <= self.n,
            Ok(EffectiveShape::StateLine { .. }) => j <= self.n,
            Ok(EffectiveShape::Box { .. }) => i + j <= self.n,
            Err(_) => false,
        }
    }

    /// The raw moment `∫ t^i x^j dρ` of a piece as a linear expression over
    /// the scaled LP variables, using `t = a + (b-a) s` per axis and the
    /// binomial expansion; fixed coordinates of segments and points enter as
    /// powers.
    pub fn raw_moment(&self, r: PieceRef, i: u32, j: u32) -> Result<LinExpr> {
        let e = self.entry(r)?;
        if !self.raw_moment_available(r, i, j) {
            return Err(Error::config(format!(
                "raw moment ({i},{j}) of piece '{}' exceeds truncation degree {}",
                e.piece.label, self.n
            )));
        }
        let mut expr = LinExpr::new();
        match e.shape {
            EffectiveShape::Point { t, x } => {
                expr.add_term(e.offset, t.powi(i as i32) * x.powi(j as i32));
            }
            EffectiveShape::TimeLine { interval, x } => {
                let fixed = x.powi(j as i32);
                for (q, c) in raw_in_scaled_1d(interval, i) {
                    expr.add_term(self.var_1d(e, q), fixed * c);
                }
            }
            EffectiveShape::StateLine { t, interval } => {
                let fixed = t.powi(i as i32);
                for (q, c) in raw_in_scaled_1d(interval, j) {
                    expr.add_term(self.var_1d(e, q), fixed * c);
                }
            }
            EffectiveShape::Box { t, x } => {
                for (q, ct) in raw_in_scaled_1d(t, i) {
                    for (w, cx) in raw_in_scaled_1d(x, j) {
                        expr.add_term(self.var_2d(e, q, w), ct * cx);
                    }
                }
            }
        }
        expr.compact();
        Ok(expr)
    }

    /// The scaled variable as a linear combination of *raw* full-plane
    /// moments `∫ t^i x^j dρ` of its piece — the inverse of [`raw_moment`],
    /// used to evaluate LP rows on externally estimated raw moments.
    ///
    /// [`raw_moment`]: VarRegistry::raw_moment
    pub fn scaled_var_in_raw(&self, var: usize) -> Result<(PieceRef, Vec<((u32, u32), f64)>)> {
        let (r, key) = self.var_key(var)?;
        let e = self.entry(r)?;
        let combo = match (e.shape, key) {
            (EffectiveShape::Point { .. }, VarKey::Mass) => vec![((0, 0), 1.0)],
            (EffectiveShape::TimeLine { interval, .. }, VarKey::OneD(k)) => {
                scaled_in_raw_1d(interval, k)
                    .into_iter()
                    .map(|(q, c)| ((q, 0), c))
                    .collect()
            }
            (EffectiveShape::StateLine { interval, .. }, VarKey::OneD(k)) => {
                scaled_in_raw_1d(interval, k)
                    .into_iter()
                    .map(|(q, c)| ((0, q), c))
                    .collect()
            }
            (EffectiveShape::Box { t, x }, VarKey::TwoD(i, j)) => {
                let mut out = Vec::new();
                for (q, ct) in scaled_in_raw_1d(t, i) {
                    for (w, cx) in scaled_in_raw_1d(x, j) {
                        out.push(((q, w), ct * cx));
                    }
                }
                out
            }
            (shape, key) => {
                return Err(Error::config(format!(
                    "inconsistent variable key {key:?} for shape {shape:?}"
                )))
            }
        };
        Ok((r, combo))
    }
}

fn idx_2d(i: u32, j: u32) -> usize {
    let d = i + j;
    (d * (d + 1) / 2 + i) as usize
}

/// Coefficients of `m_k = Σ_q C(k,q) a^{k-q} (b-a)^q m̃_q` (raw in scaled).
fn raw_in_scaled_1d(interval: Interval, k: u32) -> Vec<(u32, f64)> {
    let (a, len) = (interval.lo(), interval.len());
    (0..=k)
        .map(|q| {
            (
                q,
                binomial(k, q) * a.powi((k - q) as i32) * len.powi(q as i32),
            )
        })
        .collect()
}

/// Coefficients of `m̃_k = (b-a)^{-k} Σ_q C(k,q) (-a)^{k-q} m_q` (scaled in raw).
fn scaled_in_raw_1d(interval: Interval, k: u32) -> Vec<(u32, f64)> {
    let (a, len) = (interval.lo(), interval.len());
    let inv = len.powi(-(k as i32));
    (0..=k)
        .map(|q| (q, inv * binomial(k, q) * (-a).powi((k - q) as i32)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::SupportSet;

    fn registry(n: u32) -> VarRegistry {
        let exits = vec![
            MeasurePiece::new("nu1", SupportSet::h_segment((0.0, 1.0), 5.0).unwrap()),
            MeasurePiece::new("nu3", SupportSet::v_segment(1.0, (1.0, 1.3)).unwrap()),
            MeasurePiece::new("pt", SupportSet::v_segment(1.0, (2.0, 2.0)).unwrap()),
        ];
        let occ = MeasurePiece::new("mu", SupportSet::rectangle((0.0, 1.0), (1.0, 5.0)).unwrap());
        VarRegistry::new(&exits, &occ, n).unwrap()
    }

    #[test]
    fn layout_counts_and_round_trip_keys() {
        let reg = registry(4);
        // 5 + 5 + 1 + 15
        assert_eq!(reg.var_count(), 26);
        for var in 0..reg.var_count() {
            let (r, key) = reg.var_key(var).unwrap();
            let listed = reg.vars_of(r).unwrap();
            assert!(listed.contains(&(var, key)), "var {var} missing from {r}");
        }
        let labels: std::collections::BTreeSet<String> =
            (0..reg.var_count()).map(|v| reg.var_label(v)).collect();
        assert_eq!(labels.len(), reg.var_count());
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let exits = vec![
            MeasurePiece::new("a", SupportSet::h_segment((0.0, 1.0), 5.0).unwrap()),
            MeasurePiece::new("a", SupportSet::h_segment((0.0, 1.0), 1.0).unwrap()),
        ];
        let occ = MeasurePiece::new("mu", SupportSet::rectangle((0.0, 1.0), (1.0, 5.0)).unwrap());
        assert!(VarRegistry::new(&exits, &occ, 3).is_err());
    }

    #[test]
    fn unit_interval_scaled_moments_are_raw_moments() {
        let exits = vec![MeasurePiece::new(
            "nu",
            SupportSet::v_segment(1.0, (0.0, 1.0)).unwrap(),
        )];
        let occ = MeasurePiece::new("mu", SupportSet::rectangle((0.0, 1.0), (0.0, 1.0)).unwrap());
        let reg = VarRegistry::new(&exits, &occ, 3).unwrap();
        let expr = reg.raw_moment(PieceRef::Exit(0), 0, 2).unwrap();
        assert_eq!(expr.terms(), &[(2, 1.0)]);
        // Fixed time enters as a power: t = 1 here, so still a single term.
        let expr = reg.raw_moment(PieceRef::Exit(0), 3, 1).unwrap();
        assert_eq!(expr.terms(), &[(1, 1.0)]);
    }

    #[test]
    fn segment_reconstruction_uses_fixed_coordinate_powers() {
        let reg = registry(4);
        // nu1 lives at x = 5: raw (i, j) = 5^j * (t-moment i expansion).
        let e0 = reg.raw_moment(PieceRef::Exit(0), 0, 3).unwrap();
        let mass = reg.mass_var(PieceRef::Exit(0)).unwrap();
        assert_eq!(e0.terms(), &[(mass, 125.0)]);
        // Interval [0,1] on t means the t-expansion is the identity.
        let e1 = reg.raw_moment(PieceRef::Exit(0), 2, 1).unwrap();
        assert_eq!(e1.terms(), &[(mass + 2, 5.0)]);
    }

    #[test]
    fn point_pieces_reduce_to_evaluations() {
        let reg = registry(4);
        let e = reg.raw_moment(PieceRef::Exit(2), 3, 2).unwrap();
        let mass = reg.mass_var(PieceRef::Exit(2)).unwrap();
        assert_eq!(e.terms(), &[(mass, 4.0)]);
    }

    #[test]
    fn spec_interval_example_scaled_from_raw() {
        // On [1,5], raw (m0, m1) = (1, 2) has scaled m̃1 = (m1 - 1*m0)/4 = 0.25.
        // The occupation box carries x in [1,5]; its (0,1) variable is the
        // x-scaled first moment.
        let reg = registry(4);
        let var = reg.mass_var(PieceRef::Occupation).unwrap() + 1;
        let (r, combo) = reg.scaled_var_in_raw(var).unwrap();
        assert_eq!(r, PieceRef::Occupation);
        let raw = |i: u32, j: u32| match (i, j) {
            (0, 0) => 1.0,
            (0, 1) => 2.0,
            _ => panic!("unexpected raw index ({i},{j})"),
        };
        let val: f64 = combo.iter().map(|&((i, j), c)| c * raw(i, j)).sum();
        assert!((val - 0.25).abs() < 1e-14);
    }

    #[test]
    fn raw_and_scaled_maps_invert_each_other() {
        let reg = registry(5);
        // Random-ish scaled assignment; verify m̃ = scaled_in_raw(raw(m̃)).
        let vals: Vec<f64> = (0..reg.var_count())
            .map(|v| 0.3 + 0.711 * ((v * 2654435761) % 97) as f64 / 97.0)
            .collect();
        for r in reg.refs() {
            for (var, _key) in reg.vars_of(r).unwrap() {
                let (_, combo) = reg.scaled_var_in_raw(var).unwrap();
                let mut back = 0.0;
                for ((i, j), c) in combo {
                    let raw = reg.raw_moment(r, i, j).unwrap().eval(&vals);
                    back += c * raw;
                }
                assert!(
                    (back - vals[var]).abs() <= 1e-10 * (1.0 + vals[var].abs()),
                    "round trip failed for {} ({back} vs {})",
                    reg.var_label(var),
                    vals[var]
                );
            }
        }
    }

    #[test]
    fn availability_respects_truncation_degree() {
        let reg = registry(4);
        assert!(reg.raw_moment_available(PieceRef::Exit(0), 4, 9));
        assert!(!reg.raw_moment_available(PieceRef::Exit(0), 5, 0));
        assert!(reg.raw_moment_available(PieceRef::Occupation, 2, 2));
        assert!(!reg.raw_moment_available(PieceRef::Occupation, 3, 2));
        assert!(reg.raw_moment(PieceRef::Occupation, 3, 2).is_err());
    }
}
