//! Superposed constellations and the modular coded-symbol mapping used by the
//! relay.
//!
//! Two equal-power, phase-synchronous grid constellations add up to another
//! grid with `2L - 1` points per axis. The relay maps superposed grid cell
//! `j` (PAM) or `(l, l')` (QAM) to the coded symbol `j mod M` or
//! `(l mod L, l' mod L)`, and a destination knowing one of the two source
//! symbols recovers the other by modular subtraction. Cross constellations are
//! handled on their bounding `L' x L'` grid, which enlarges the coded alphabet
//! to `L'^2` symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::constellation::{axis_coord, nearest_on_axis, Constellation, ModKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eq. `s_c = s_{j mod M}` for a PAM superposed grid index.
pub fn coded_symbol_pam(j: usize, m: usize) -> Result<usize> {
    if m == 0 || j > 2 * (m - 1) {
        return Err(Error::invalid(format!("superposed index {j} outside [0, {}]", 2 * m.saturating_sub(1))));
    }
    Ok(j % m)
}

/// Per-axis modular rule for a QAM superposed grid cell `(l, l2)`.
pub fn coded_symbol_qam(l: usize, l2: usize, side: usize) -> Result<(usize, usize)> {
    if side == 0 || l > 2 * (side - 1) || l2 > 2 * (side - 1) {
        return Err(Error::invalid(format!(
            "superposed cell ({l}, {l2}) outside [0, {}]^2",
            2 * side.saturating_sub(1)
        )));
    }
    Ok((l % side, l2 % side))
}

/// Point set `{x1 + x2}` of two identical constellations.
#[derive(Debug, Clone)]
pub struct SuperposedConstellation<T> {
    base: Constellation<T>,
    points: Vec<Complex<T>>,
    grid: Vec<(usize, usize)>,
    origin_pairs: Vec<Vec<(usize, usize)>>,
    /// Point index per superposed grid cell, `None` if unreachable.
    cell_point: Vec<Option<usize>>,
    /// Point index per ordered pair `s1 * M + s2`.
    pair_point: Vec<usize>,
}

impl<T: Scalar> SuperposedConstellation<T> {
    pub fn new(base: &Constellation<T>) -> Self {
        let m = base.len();
        let side = 2 * base.side() - 1;
        let qam = base.kind() != ModKind::Pam;
        let cells = if qam { side * side } else { side };

        let mut by_cell: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for s1 in 0..m {
            for s2 in 0..m {
                let (a, a2) = base.grid()[s1];
                let (b, b2) = base.grid()[s2];
                let cell = if qam { (a + b) * side + (a2 + b2) } else { a + b };
                by_cell.entry(cell).or_default().push((s1, s2));
            }
        }

        let mut cell_point = vec![None; cells];
        let mut pair_point = vec![0; m * m];
        let mut points = Vec::with_capacity(by_cell.len());
        let mut grid = Vec::with_capacity(by_cell.len());
        let mut origin_pairs = Vec::with_capacity(by_cell.len());
        let d = base.half_spacing();
        for (idx, (cell, pairs)) in by_cell.into_iter().enumerate() {
            let (l, l2) = if qam { (cell / side, cell % side) } else { (cell, 0) };
            let re = T::lit(axis_coord(l, side) as f64) * d;
            let im = if qam { T::lit(axis_coord(l2, side) as f64) * d } else { T::zero() };
            points.push(Complex::new(re, im));
            grid.push((l, l2));
            for &(s1, s2) in &pairs {
                pair_point[s1 * m + s2] = idx;
            }
            origin_pairs.push(pairs);
            cell_point[cell] = Some(idx);
        }

        Self {
            base: base.clone(),
            points,
            grid,
            origin_pairs,
            cell_point,
            pair_point,
        }
    }

    pub fn base(&self) -> &Constellation<T> {
        &self.base
    }

    /// Cells per axis of the superposed grid, `2L - 1` (`2L' - 1` for cross).
    pub fn side(&self) -> usize {
        2 * self.base.side() - 1
    }

    /// Number of cells in the full superposed grid, reachable or not.
    pub fn cell_count(&self) -> usize {
        if self.is_qam() {
            self.side() * self.side()
        } else {
            self.side()
        }
    }

    fn is_qam(&self) -> bool {
        self.base.kind() != ModKind::Pam
    }

    /// Number of distinct reachable superposed points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    /// Superposed grid index `j` (as `(j, 0)`) or `(l, l')` of each point.
    pub fn grid(&self) -> &[(usize, usize)] {
        &self.grid
    }

    pub fn origin_pairs(&self, point: usize) -> &[(usize, usize)] {
        &self.origin_pairs[point]
    }

    pub fn point_of_pair(&self, s1: usize, s2: usize) -> usize {
        self.pair_point[s1 * self.base.len() + s2]
    }

    pub fn cell_of_pair(&self, s1: usize, s2: usize) -> usize {
        let (l, l2) = self.grid[self.point_of_pair(s1, s2)];
        self.cell_index(l, l2)
    }

    pub fn cell_index(&self, l: usize, l2: usize) -> usize {
        if self.is_qam() {
            l * self.side() + l2
        } else {
            l
        }
    }

    pub fn cell_coords(&self, cell: usize) -> (usize, usize) {
        if self.is_qam() {
            (cell / self.side(), cell % self.side())
        } else {
            (cell, 0)
        }
    }

    pub fn is_reachable(&self, cell: usize) -> bool {
        self.cell_point.get(cell).is_some_and(Option::is_some)
    }

    /// Coordinates of an arbitrary cell of the full superposed grid.
    pub fn cell_point(&self, cell: usize) -> Complex<T> {
        let (l, l2) = self.cell_coords(cell);
        let d = self.base.half_spacing();
        let re = T::lit(axis_coord(l, self.side()) as f64) * d;
        let im = if self.is_qam() { T::lit(axis_coord(l2, self.side()) as f64) * d } else { T::zero() };
        Complex::new(re, im)
    }

    /// Minimum-distance decision over the full superposed grid (including
    /// cells only reachable through the extension of a cross shape).
    pub fn decide_cell(&self, y: Complex<T>) -> usize {
        let d = self.base.half_spacing();
        let side = self.side();
        let l = nearest_on_axis(y.re / d, side);
        if self.is_qam() {
            l * side + nearest_on_axis(y.im / d, side)
        } else {
            l
        }
    }
}

/// The full `L' x L'` grid around a QAM constellation.
#[derive(Debug, Clone)]
pub struct ExtendedConstellation<T> {
    pub side: usize,
    pub points: Vec<Complex<T>>,
    /// Original symbol index per extended position; `None` marks positions
    /// that exist only for calculation and are never transmitted.
    pub original_index: Vec<Option<usize>>,
}

impl<T> ExtendedConstellation<T> {
    pub fn is_transmittable(&self, position: usize) -> bool {
        self.original_index[position].is_some()
    }
}

/// Extend a QAM constellation to its bounding square grid; returns `L'` and
/// the extended point set.
pub fn extend_to_square<T: Scalar>(c: &Constellation<T>) -> Result<(usize, ExtendedConstellation<T>)> {
    if c.kind() == ModKind::Pam {
        return Err(Error::invalid("extension to a square grid needs a QAM constellation"));
    }
    let side = c.side();
    let d = c.half_spacing();
    let mut points = Vec::with_capacity(side * side);
    let mut original_index = Vec::with_capacity(side * side);
    for k in 0..side {
        for k2 in 0..side {
            points.push(Complex::new(
                T::lit(axis_coord(k, side) as f64) * d,
                T::lit(axis_coord(k2, side) as f64) * d,
            ));
            original_index.push(c.index_at(k, k2));
        }
    }
    Ok((side, ExtendedConstellation { side, points, original_index }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MappingRule {
    /// Per-axis `mod L` mapping of the superposed grid.
    #[default]
    Modular,
    /// Bitwise XOR of the two source labels (ambiguous beyond QPSK).
    Xor,
    /// Arbitrary caller-supplied table.
    Custom,
}

impl FromStr for MappingRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "modular" | "mod" => Ok(MappingRule::Modular),
            "xor" => Ok(MappingRule::Xor),
            other => Err(Error::invalid(format!("unknown mapping {other:?} (modular|xor)"))),
        }
    }
}

impl fmt::Display for MappingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MappingRule::Modular => "modular",
            MappingRule::Xor => "xor",
            MappingRule::Custom => "custom",
        })
    }
}

/// Superposed cell -> coded symbol table.
#[derive(Debug, Clone)]
pub struct MappingTable<T> {
    superposed: SuperposedConstellation<T>,
    rule: MappingRule,
    coded: Vec<usize>,
    alphabet: usize,
    lprime: usize,
    cells_touched: usize,
}

impl<T: Scalar> MappingTable<T> {
    pub fn build(c: &Constellation<T>) -> Self {
        Self::build_with_rule(c, MappingRule::Modular).expect("modular rule supports every constellation")
    }

    pub fn build_with_rule(c: &Constellation<T>, rule: MappingRule) -> Result<Self> {
        let superposed = SuperposedConstellation::new(c);
        let side = c.side();
        let qam = c.kind() != ModKind::Pam;
        let m = c.len();
        let mut coded = Vec::with_capacity(superposed.cell_count());
        let mut cells_touched = 0;

        let alphabet = match rule {
            MappingRule::Modular => {
                for cell in 0..superposed.cell_count() {
                    let (l, l2) = superposed.cell_coords(cell);
                    let value = if qam {
                        let (a, b) = coded_symbol_qam(l, l2, side)?;
                        a * side + b
                    } else {
                        coded_symbol_pam(l, m)?
                    };
                    coded.push(value);
                    cells_touched += 1;
                }
                if c.kind() == ModKind::CrossQam {
                    side * side
                } else {
                    m
                }
            }
            MappingRule::Xor => {
                for cell in 0..superposed.cell_count() {
                    let value = superposed.cell_point.get(cell).copied().flatten().map_or(0, |p| {
                        let (s1, s2) = superposed.origin_pairs(p)[0];
                        (c.labels()[s1] ^ c.labels()[s2]) as usize
                    });
                    coded.push(value);
                    cells_touched += 1;
                }
                1 << c.bits_per_symbol()
            }
            MappingRule::Custom => return Err(Error::invalid("custom tables are built with MappingTable::from_coded")),
        };

        Ok(Self {
            superposed,
            rule,
            coded,
            alphabet,
            lprime: side,
            cells_touched,
        })
    }

    /// Table with arbitrary coded values, one per superposed grid cell.
    pub fn from_coded(c: &Constellation<T>, coded: Vec<usize>, alphabet: usize) -> Result<Self> {
        let superposed = SuperposedConstellation::new(c);
        if coded.len() != superposed.cell_count() {
            return Err(Error::invalid(format!(
                "expected {} coded values, got {}",
                superposed.cell_count(),
                coded.len()
            )));
        }
        if let Some(&bad) = coded.iter().find(|&&v| v >= alphabet) {
            return Err(Error::IndexOutOfRange { index: bad, len: alphabet });
        }
        let cells_touched = coded.len();
        Ok(Self {
            superposed,
            rule: MappingRule::Custom,
            coded,
            alphabet,
            lprime: c.side(),
            cells_touched,
        })
    }

    pub fn superposed(&self) -> &SuperposedConstellation<T> {
        &self.superposed
    }

    pub fn base(&self) -> &Constellation<T> {
        self.superposed.base()
    }

    pub fn rule(&self) -> MappingRule {
        self.rule
    }

    pub fn coded_alphabet_size(&self) -> usize {
        self.alphabet
    }

    /// Bounding axis count `L'` (`L` for square QAM, `M` for PAM).
    pub fn lprime(&self) -> usize {
        self.lprime
    }

    /// Superposed cells visited while building the table.
    pub fn cells_touched(&self) -> usize {
        self.cells_touched
    }

    /// Coded value per superposed grid cell.
    pub fn coded_cells(&self) -> &[usize] {
        &self.coded
    }

    pub fn coded_at_cell(&self, cell: usize) -> usize {
        self.coded[cell]
    }

    /// `C(s1, s2)`.
    pub fn coded_of_pair(&self, s1: usize, s2: usize) -> usize {
        self.coded[self.superposed.cell_of_pair(s1, s2)]
    }

    /// Bits needed per coded symbol.
    pub fn coded_word_bits(&self) -> u32 {
        usize::BITS - (self.alphabet - 1).leading_zeros()
    }

    /// Bit label of a coded symbol. For PAM and square QAM under the modular
    /// rule a coded symbol is an original symbol and carries its label.
    pub fn coded_bits(&self, coded: usize) -> crate::constellation::BitLabel {
        let value = match (self.rule, self.base().kind()) {
            (MappingRule::Modular, ModKind::Pam | ModKind::SquareQam) => self.base().labels()[coded],
            _ => coded as u32,
        };
        crate::constellation::BitLabel {
            value,
            width: self.coded_word_bits(),
        }
    }

    /// Phase-2 stream expansion: coded bits per original bit.
    pub fn overhead(&self) -> f64 {
        self.coded_word_bits() as f64 / self.base().bits_per_symbol() as f64
    }

    /// Recover the unknown source symbol from a coded symbol and the symbol
    /// the destination already knows.
    pub fn decode_expected(&self, coded: usize, known: usize) -> Result<usize> {
        let base = self.base();
        if coded >= self.alphabet {
            return Err(Error::IndexOutOfRange {
                index: coded,
                len: self.alphabet,
            });
        }
        if known >= base.len() {
            return Err(Error::IndexOutOfRange {
                index: known,
                len: base.len(),
            });
        }
        match self.rule {
            MappingRule::Modular => {
                let side = self.lprime;
                if base.kind() == ModKind::Pam {
                    Ok((coded + side - known) % side)
                } else {
                    let (k, k2) = base.grid()[known];
                    let a = (coded / side + side - k) % side;
                    let b = (coded % side + side - k2) % side;
                    base.index_at(a, b).ok_or(Error::DecodeFailure { coded, known })
                }
            }
            MappingRule::Xor | MappingRule::Custom => (0..base.len())
                .find(|&s| self.coded_of_pair(known, s) == coded)
                .ok_or(Error::DecodeFailure { coded, known }),
        }
    }
}

/// Which source symbol was held fixed in an Exclusive-Law counterexample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedSide {
    First,
    Second,
}

/// Two different values of one source that collide on the same coded symbol
/// while the other source is held at `fixed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counterexample {
    pub side: FixedSide,
    pub fixed: usize,
    pub a: usize,
    pub b: usize,
    pub coded: usize,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            FixedSide::Second => write!(
                f,
                "C({}, {}) = C({}, {}) = {}",
                self.a, self.fixed, self.b, self.fixed, self.coded
            ),
            FixedSide::First => write!(
                f,
                "C({}, {}) = C({}, {}) = {}",
                self.fixed, self.a, self.fixed, self.b, self.coded
            ),
        }
    }
}

/// A window of the superposed grid carrying a repeated coded symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowViolation {
    /// Lower corner `(l, l')` of the offending window (`l'` = 0 for PAM).
    pub corner: (usize, usize),
    pub width: usize,
    pub coded: usize,
}

impl fmt::Display for WindowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "window of width {} at {:?} repeats coded symbol {}",
            self.width, self.corner, self.coded
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusiveLawReport {
    pub exclusive_law: Option<Counterexample>,
    pub window: Option<WindowViolation>,
}

impl ExclusiveLawReport {
    pub fn passed(&self) -> bool {
        self.exclusive_law.is_none() && self.window.is_none()
    }
}

/// Brute-force Exclusive-Law check over all ordered pairs plus the
/// geometric window condition on the superposed grid.
pub fn verify_exclusive_law<T: Scalar>(table: &MappingTable<T>) -> ExclusiveLawReport {
    ExclusiveLawReport {
        exclusive_law: exclusive_law_counterexample(table),
        window: window_violation(table),
    }
}

fn exclusive_law_counterexample<T: Scalar>(table: &MappingTable<T>) -> Option<Counterexample> {
    let m = table.base().len();
    let mut seen = vec![usize::MAX; table.coded_alphabet_size()];
    for fixed in 0..m {
        seen.fill(usize::MAX);
        for s1 in 0..m {
            let c = table.coded_of_pair(s1, fixed);
            if seen[c] != usize::MAX {
                return Some(Counterexample {
                    side: FixedSide::Second,
                    fixed,
                    a: seen[c],
                    b: s1,
                    coded: c,
                });
            }
            seen[c] = s1;
        }
        seen.fill(usize::MAX);
        for s2 in 0..m {
            let c = table.coded_of_pair(fixed, s2);
            if seen[c] != usize::MAX {
                return Some(Counterexample {
                    side: FixedSide::First,
                    fixed,
                    a: seen[c],
                    b: s2,
                    coded: c,
                });
            }
            seen[c] = s2;
        }
    }
    None
}

fn window_violation<T: Scalar>(table: &MappingTable<T>) -> Option<WindowViolation> {
    let sup = table.superposed();
    let width = table.lprime();
    let side = sup.side();
    let qam = table.base().kind() != ModKind::Pam;
    let mut seen = vec![false; table.coded_alphabet_size()];
    let starts2 = if qam { side - width + 1 } else { 1 };
    let width2 = if qam { width } else { 1 };
    for a in 0..=side - width {
        for b in 0..starts2 {
            seen.fill(false);
            for l in a..a + width {
                for l2 in b..b + width2 {
                    let c = table.coded_at_cell(sup.cell_index(l, l2));
                    if seen[c] {
                        return Some(WindowViolation {
                            corner: (a, b),
                            width,
                            coded: c,
                        });
                    }
                    seen[c] = true;
                }
            }
        }
    }
    None
}

/// Serialize `words` of `word_bits` bits (MSB first) and re-chunk into
/// symbols of `chunk_bits` bits, zero-padding the tail.
pub fn repack(words: &[usize], word_bits: u32, chunk_bits: u32) -> Vec<usize> {
    let mut out = Vec::with_capacity((words.len() * word_bits as usize).div_ceil(chunk_bits as usize));
    let mut acc = 0usize;
    let mut filled = 0u32;
    for &w in words {
        for b in (0..word_bits).rev() {
            acc = (acc << 1) | ((w >> b) & 1);
            filled += 1;
            if filled == chunk_bits {
                out.push(acc);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push(acc << (chunk_bits - filled));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{Labeling, ModulationId};

    fn build(name: &str, labeling: Labeling) -> Constellation<f64> {
        Constellation::build(name.parse::<ModulationId>().unwrap(), labeling, 1.0).unwrap()
    }

    #[test]
    fn modular_rules() {
        assert_eq!(coded_symbol_pam(5, 4).unwrap(), 1);
        assert_eq!(coded_symbol_pam(0, 4).unwrap(), 0);
        assert_eq!(coded_symbol_pam(6, 4).unwrap(), 2);
        assert!(coded_symbol_pam(7, 4).is_err());
        assert_eq!(coded_symbol_qam(4, 3, 4).unwrap(), (0, 3));
        assert_eq!(coded_symbol_qam(0, 0, 8).unwrap(), (0, 0));
        assert_eq!(coded_symbol_qam(6, 6, 4).unwrap(), (2, 2));
        assert!(coded_symbol_qam(7, 0, 4).is_err());
    }

    #[test]
    fn superposed_pam4() {
        let c = build("pam4", Labeling::Binary);
        let s = c.half_spacing();
        let sup = SuperposedConstellation::new(&c);
        assert_eq!(sup.len(), 7);
        for (p, want) in sup.points().iter().zip([-6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0]) {
            assert!((p.re - want * s).abs() < 1e-12);
        }
        assert_eq!(sup.origin_pairs(3).len(), 4);
        let b = SuperposedConstellation::new(&build("bpsk", Labeling::Binary));
        assert_eq!(b.len(), 3);
        assert_eq!(SuperposedConstellation::new(&build("qam16", Labeling::Gray)).len(), 49);
    }

    #[test]
    fn pam4_table_and_decode() {
        let table = MappingTable::build(&build("pam4", Labeling::Gray));
        assert_eq!(table.coded_cells(), &[0, 1, 2, 3, 0, 1, 2]);
        assert_eq!(table.decode_expected(1, 2).unwrap(), 3);
        assert!(verify_exclusive_law(&table).passed());
    }

    #[test]
    fn xor_mapping_is_ambiguous_for_pam4() {
        let c = build("pam4", Labeling::Binary);
        let table = MappingTable::build_with_rule(&c, MappingRule::Xor).unwrap();
        let report = verify_exclusive_law(&table);
        let ce = report.exclusive_law.expect("xor must violate the exclusive law");
        let (fixed, a, b) = (ce.fixed, ce.a, ce.b);
        match ce.side {
            FixedSide::Second => assert_eq!(table.coded_of_pair(a, fixed), table.coded_of_pair(b, fixed)),
            FixedSide::First => assert_eq!(table.coded_of_pair(fixed, a), table.coded_of_pair(fixed, b)),
        }
        assert!(report.window.is_some());
        // QPSK is the case where XOR does work.
        let q = MappingTable::build_with_rule(&build("qpsk", Labeling::Gray), MappingRule::Xor).unwrap();
        assert!(verify_exclusive_law(&q).exclusive_law.is_none());
    }

    #[test]
    fn extension() {
        let (lp, ext) = extend_to_square(&build("qam8", Labeling::Binary)).unwrap();
        assert_eq!((lp, ext.points.len()), (3, 9));
        assert_eq!(ext.original_index.iter().filter(|o| o.is_none()).count(), 1);
        let (lp, ext) = extend_to_square(&build("qam32", Labeling::Binary)).unwrap();
        assert_eq!((lp, ext.points.len()), (6, 36));
        let sq = build("qam16", Labeling::Gray);
        let (lp, ext) = extend_to_square(&sq).unwrap();
        assert_eq!(lp, 4);
        for (i, p) in ext.points.iter().enumerate() {
            let orig = ext.original_index[i].unwrap();
            assert_eq!(*p, sq.points()[orig]);
        }
        assert!(extend_to_square(&build("pam4", Labeling::Binary)).is_err());
    }

    #[test]
    fn cross8_alphabet_and_failure() {
        let c = build("qam8", Labeling::Binary);
        let table = MappingTable::build(&c);
        assert_eq!(table.coded_alphabet_size(), 9);
        assert_eq!(table.coded_word_bits(), 4);
        assert_eq!(table.cells_touched(), 25);
        // Known symbol at grid (0,0); coded (1,1) decodes to the removed centre.
        let known = c.index_at(0, 0).unwrap();
        assert!(matches!(
            table.decode_expected(4, known),
            Err(Error::DecodeFailure { coded: 4, .. })
        ));
        assert!(table.decode_expected(9, known).is_err());
    }

    #[test]
    fn repack_bits() {
        // 4-bit words into 3-bit chunks: 1001 0110 -> 100 101 100(pad)
        assert_eq!(repack(&[0b1001, 0b0110], 4, 3), vec![0b100, 0b101, 0b100]);
        let words = vec![5usize, 8, 0, 3, 7];
        let packed = repack(&words, 4, 3);
        let back = repack(&packed, 3, 4);
        assert_eq!(&back[..words.len()], &words[..]);
    }

    #[test]
    fn from_coded_validates() {
        let c = build("pam4", Labeling::Binary);
        assert!(MappingTable::from_coded(&c, vec![0; 6], 4).is_err());
        assert!(MappingTable::from_coded(&c, vec![4; 7], 4).is_err());
        let t = MappingTable::from_coded(&c, vec![0, 1, 2, 3, 0, 1, 2], 4).unwrap();
        assert!(verify_exclusive_law(&t).passed());
    }
}
