//! M-PAM and M-QAM constellations on a regular grid.
//!
//! Every constellation lives on the grid `{2k - (L - 1) : k = 0..L}` per axis
//! (odd integers for even `L`, even integers for odd `L`), multiplied by a
//! single scale factor chosen so that the mean symbol energy equals the
//! requested value. The scale is therefore also the half-distance `d` between
//! neighbouring points.
//!
//! Symbol indices of PAM and square QAM follow the grid: PAM index `k` is the
//! `k`-th point from the left, square QAM index `k * L + k'` is the point with
//! in-phase grid index `k` and quadrature grid index `k'`. Cross constellations
//! enumerate the retained grid positions in the same (row-major) order.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const SUPPORTED: &str = "pam2 (bpsk), pam4, pam8, pam16, qam4 (qpsk), qam16, qam64, qam256, qam8, qam32, qam128";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModKind {
    Pam,
    SquareQam,
    CrossQam,
}

/// A supported (kind, order) combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModulationId {
    kind: ModKind,
    order: usize,
}

impl ModulationId {
    pub const BPSK: Self = Self { kind: ModKind::Pam, order: 2 };
    pub const QPSK: Self = Self { kind: ModKind::SquareQam, order: 4 };

    pub fn new(kind: ModKind, order: usize) -> Result<Self> {
        let ok = match kind {
            ModKind::Pam => matches!(order, 2 | 4 | 8 | 16),
            ModKind::SquareQam => matches!(order, 4 | 16 | 64 | 256),
            ModKind::CrossQam => matches!(order, 8 | 32 | 128),
        };
        if ok {
            Ok(Self { kind, order })
        } else {
            Err(Error::UnsupportedModulation {
                name: format!("{kind:?}-{order}"),
                supported: SUPPORTED,
            })
        }
    }

    pub fn pam(order: usize) -> Result<Self> {
        Self::new(ModKind::Pam, order)
    }

    /// QAM of the given order; square or cross is implied by the order.
    pub fn qam(order: usize) -> Result<Self> {
        match order {
            8 | 32 | 128 => Self::new(ModKind::CrossQam, order),
            _ => Self::new(ModKind::SquareQam, order),
        }
    }

    pub fn kind(&self) -> ModKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.order.trailing_zeros()
    }

    /// Points per axis of the (bounding) grid: `M` for PAM, `sqrt(M)` for
    /// square QAM and `L'` for cross QAM.
    pub fn side(&self) -> usize {
        match self.kind {
            ModKind::Pam => self.order,
            ModKind::SquareQam => 1 << (self.bits_per_symbol() / 2),
            ModKind::CrossQam => match self.order {
                8 => 3,
                32 => 6,
                _ => 12,
            },
        }
    }

    pub fn is_qam(&self) -> bool {
        self.kind != ModKind::Pam
    }

    /// Every supported modulation, PAM first, then square, then cross QAM.
    pub fn all() -> Vec<Self> {
        let mut out = Vec::new();
        for m in [2, 4, 8, 16] {
            out.push(Self { kind: ModKind::Pam, order: m });
        }
        for m in [4, 16, 64, 256] {
            out.push(Self { kind: ModKind::SquareQam, order: m });
        }
        for m in [8, 32, 128] {
            out.push(Self { kind: ModKind::CrossQam, order: m });
        }
        out
    }

    /// Whether grid position `(k, k2)` of the bounding grid carries a point.
    fn retains(&self, k: usize, k2: usize) -> bool {
        match (self.kind, self.order) {
            (ModKind::CrossQam, 8) => !(k == 1 && k2 == 1),
            (ModKind::CrossQam, 32) => !((k == 0 || k == 5) && (k2 == 0 || k2 == 5)),
            (ModKind::CrossQam, 128) => {
                let edge = |x: usize| !(2..10).contains(&x);
                !(edge(k) && edge(k2))
            }
            _ => true,
        }
    }
}

impl fmt::Display for ModulationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ModKind::Pam => write!(f, "pam{}", self.order),
            _ => write!(f, "qam{}", self.order),
        }
    }
}

impl FromStr for ModulationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let unsupported = || Error::UnsupportedModulation {
            name: s.to_string(),
            supported: SUPPORTED,
        };
        match lower.as_str() {
            "bpsk" => return Ok(Self::BPSK),
            "qpsk" => return Ok(Self::QPSK),
            _ => {}
        }
        let (prefix, digits) = lower.split_at(lower.find(|c: char| c.is_ascii_digit()).ok_or_else(unsupported)?);
        let order: usize = digits.parse().map_err(|_| unsupported())?;
        match prefix.trim_end_matches('-') {
            "pam" => Self::pam(order),
            "qam" => Self::qam(order),
            _ => Err(unsupported()),
        }
        .map_err(|_| unsupported())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Labeling {
    #[default]
    Binary,
    Gray,
}

impl FromStr for Labeling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "binary" => Ok(Labeling::Binary),
            "gray" => Ok(Labeling::Gray),
            other => Err(Error::invalid(format!("unknown labeling {other:?} (binary|gray)"))),
        }
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Labeling::Binary => "binary",
            Labeling::Gray => "gray",
        })
    }
}

/// Fixed-width bit label, most significant bit first when displayed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitLabel {
    pub value: u32,
    pub width: u32,
}

impl fmt::Display for BitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in (0..self.width).rev() {
            f.write_str(if (self.value >> b) & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn gray(k: usize) -> usize {
    k ^ (k >> 1)
}

/// Integer grid coordinate of position `k` on an axis with `side` points.
#[inline]
pub fn axis_coord(k: usize, side: usize) -> i64 {
    2 * k as i64 - (side as i64 - 1)
}

/// Nearest grid position on an axis with `side` points for an unscaled
/// coordinate `v`; exact midpoints resolve to the lower position.
#[inline]
pub(crate) fn nearest_on_axis<T: Scalar>(v: T, side: usize) -> usize {
    let t = (v + T::count(side - 1)) / T::lit(2.0);
    let k = (t - T::lit(0.5)).ceil();
    if k <= T::zero() {
        0
    } else {
        k.to_usize().unwrap_or(usize::MAX).min(side - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation<T> {
    id: ModulationId,
    labeling: Labeling,
    avg_energy: T,
    scale: T,
    points: Vec<Complex<T>>,
    grid: Vec<(usize, usize)>,
    labels: Vec<u32>,
    /// Symbol index per bounding-grid position (`k * side + k2`).
    lookup: Vec<Option<usize>>,
}

impl<T: Scalar> Constellation<T> {
    pub fn build(id: ModulationId, labeling: Labeling, avg_energy: T) -> Result<Self> {
        if !(avg_energy > T::zero()) || !avg_energy.is_finite() {
            return Err(Error::invalid(format!("average energy must be positive, got {avg_energy}")));
        }
        let side = id.side();
        let half_bits = id.bits_per_symbol() / 2;

        let mut grid = Vec::with_capacity(id.order);
        match id.kind {
            ModKind::Pam => grid.extend((0..side).map(|k| (k, 0))),
            _ => {
                for k in 0..side {
                    for k2 in 0..side {
                        if id.retains(k, k2) {
                            grid.push((k, k2));
                        }
                    }
                }
            }
        }
        debug_assert_eq!(grid.len(), id.order);

        let labels: Vec<u32> = grid
            .iter()
            .enumerate()
            .map(|(i, &(k, k2))| {
                let v = match (id.kind, labeling) {
                    (ModKind::Pam, Labeling::Gray) => gray(k),
                    (ModKind::SquareQam, Labeling::Gray) => (gray(k) << half_bits) | gray(k2),
                    _ => i,
                };
                v as u32
            })
            .collect();

        let grid_energy = Self::grid_energy_of(id, &grid);
        let scale = (avg_energy / T::lit(grid_energy)).sqrt();
        let points = grid
            .iter()
            .map(|&(k, k2)| {
                let re = T::lit(axis_coord(k, side) as f64) * scale;
                let im = match id.kind {
                    ModKind::Pam => T::zero(),
                    _ => T::lit(axis_coord(k2, side) as f64) * scale,
                };
                Complex::new(re, im)
            })
            .collect();

        let mut lookup = vec![None; if id.is_qam() { side * side } else { side }];
        for (i, &(k, k2)) in grid.iter().enumerate() {
            lookup[k * if id.is_qam() { side } else { 1 } + k2] = Some(i);
        }

        Ok(Self {
            id,
            labeling,
            avg_energy,
            scale,
            points,
            grid,
            labels,
            lookup,
        })
    }

    fn grid_energy_of(id: ModulationId, grid: &[(usize, usize)]) -> f64 {
        let side = id.side();
        let total: i64 = grid
            .iter()
            .map(|&(k, k2)| {
                let a = axis_coord(k, side);
                let b = if id.is_qam() { axis_coord(k2, side) } else { 0 };
                a * a + b * b
            })
            .sum();
        total as f64 / grid.len() as f64
    }

    pub fn id(&self) -> ModulationId {
        self.id
    }

    pub fn kind(&self) -> ModKind {
        self.id.kind
    }

    pub fn order(&self) -> usize {
        self.id.order
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labeling(&self) -> Labeling {
        self.labeling
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.id.bits_per_symbol()
    }

    /// Points per axis of the bounding grid (`L`, or `L'` for cross shapes).
    pub fn side(&self) -> usize {
        self.id.side()
    }

    /// Half the distance between neighbouring points.
    pub fn half_spacing(&self) -> T {
        self.scale
    }

    pub fn avg_energy(&self) -> T {
        self.avg_energy
    }

    /// Mean symbol energy in units of the squared half-spacing, `E_s / d^2`.
    /// `2 (M - 1) / 3` for square QAM, `(M^2 - 1) / 3` for PAM.
    pub fn energy_per_half_spacing_sq(&self) -> f64 {
        Self::grid_energy_of(self.id, &self.grid)
    }

    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    pub fn modulate(&self, index: usize) -> Result<Complex<T>> {
        self.points
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange { index, len: self.len() })
    }

    pub fn bits_of(&self, index: usize) -> Result<BitLabel> {
        self.label(index).map(|value| BitLabel {
            value,
            width: self.bits_per_symbol(),
        })
    }

    pub fn label(&self, index: usize) -> Result<u32> {
        self.labels
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange { index, len: self.len() })
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Grid position `(k, k2)` of a symbol; `k2` is always 0 for PAM.
    pub fn grid_of(&self, index: usize) -> Result<(usize, usize)> {
        self.grid
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange { index, len: self.len() })
    }

    pub fn grid(&self) -> &[(usize, usize)] {
        &self.grid
    }

    /// Symbol index at bounding-grid position `(k, k2)`, `None` for positions
    /// outside the grid or removed by a cross shape.
    pub fn index_at(&self, k: usize, k2: usize) -> Option<usize> {
        let side = self.side();
        if k >= side {
            return None;
        }
        if self.id.is_qam() {
            if k2 >= side {
                return None;
            }
            self.lookup[k * side + k2]
        } else if k2 == 0 {
            self.lookup[k]
        } else {
            None
        }
    }

    /// Minimum-distance decision; ties go to the lowest index.
    pub fn demodulate(&self, y: Complex<T>) -> Result<usize> {
        if !(y.re.is_finite() && y.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(self.demodulate_unchecked(y))
    }

    /// Same as [`demodulate`](Self::demodulate) without the finiteness check.
    pub(crate) fn demodulate_unchecked(&self, y: Complex<T>) -> usize {
        let side = self.side();
        match self.id.kind {
            ModKind::Pam => nearest_on_axis(y.re / self.scale, side),
            ModKind::SquareQam => {
                let k = nearest_on_axis(y.re / self.scale, side);
                let k2 = nearest_on_axis(y.im / self.scale, side);
                k * side + k2
            }
            ModKind::CrossQam => {
                let mut best = 0;
                let mut best_d = T::infinity();
                for (i, p) in self.points.iter().enumerate() {
                    let d = (y - p).norm_sqr();
                    if d < best_d {
                        best_d = d;
                        best = i;
                    }
                }
                best
            }
        }
    }
}
