//! Monte Carlo symbol-level simulation of the point-to-point, relay and
//! opportunistic-listener receptions and of the full two-phase exchange.
//!
//! All constellations are normalised to unit average energy, so an average
//! SNR `gamma` means a per-dimension noise variance of `1 / (2 gamma)`.
//! Work is split into fixed-size chunks, each driven by its own generator
//! stream derived from the seed; results do not depend on the thread count.

use std::fmt;
use std::io::Write;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;

use crate::analysis;
use crate::channel::{awgn_sample, noise_variance_for_snr, substream};
use crate::constellation::{Constellation, Labeling, ModKind, ModulationId};
use crate::error::{Error, Result};
use crate::mapping::{repack, MappingTable};
use crate::scalar::{from_db, Scalar};

const CHUNK: u64 = 1 << 14;

/// How the intended-signal SNR is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrSpec {
    /// Average SNR in dB; `+inf` means noiseless.
    Db(f64),
    /// SNR at which the interference-free BER lower bound of a square QAM
    /// equals the given value.
    LowerBoundBer(f64),
}

impl SnrSpec {
    pub fn resolve_linear(&self, id: ModulationId) -> Result<f64> {
        match *self {
            SnrSpec::Db(db) => {
                if db.is_nan() || db == f64::NEG_INFINITY {
                    Err(Error::invalid(format!("SNR must be finite or +inf dB, got {db}")))
                } else {
                    Ok(from_db(db))
                }
            }
            SnrSpec::LowerBoundBer(target) => {
                if id.kind() != ModKind::SquareQam {
                    return Err(Error::invalid(format!(
                        "solving the SNR from a BER target needs square QAM, got {id}"
                    )));
                }
                analysis::solve_snr_for_ber_lower_bound(id.order(), target)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub modulation: ModulationId,
    pub labeling: Labeling,
    pub n_symbols: u64,
    pub snr: SnrSpec,
    /// Intended-to-interference power ratio in dB; `+inf` disables the
    /// interferer. Only used by [`run_opportunistic`].
    pub power_ratio_db: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(modulation: ModulationId, snr: SnrSpec) -> Self {
        Self {
            modulation,
            labeling: Labeling::Gray,
            n_symbols: 10_000,
            snr,
            power_ratio_db: f64::INFINITY,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_symbols == 0 {
            return Err(Error::invalid("number of symbols must be at least 1"));
        }
        if self.power_ratio_db.is_nan() || self.power_ratio_db == f64::NEG_INFINITY {
            return Err(Error::invalid("power ratio must be finite or +inf"));
        }
        Ok(())
    }
}

/// Symbol and bit error counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ErrorStats {
    pub n_symbols: u64,
    pub n_symbol_errors: u64,
    pub n_bits: u64,
    pub n_bit_errors: u64,
}

impl ErrorStats {
    pub fn ser(&self) -> f64 {
        ratio(self.n_symbol_errors, self.n_symbols)
    }

    pub fn ber(&self) -> f64 {
        ratio(self.n_bit_errors, self.n_bits)
    }

    /// Binomial standard deviation of the SER estimate around `p`.
    pub fn ser_sigma(&self, p: f64) -> f64 {
        binomial_sigma(p, self.n_symbols)
    }

    pub fn ber_sigma(&self, p: f64) -> f64 {
        binomial_sigma(p, self.n_bits)
    }

    /// Normal-approximation 95% interval of the SER.
    pub fn ser_ci95(&self) -> (f64, f64) {
        ci95(self.ser(), self.n_symbols)
    }

    pub fn ber_ci95(&self) -> (f64, f64) {
        ci95(self.ber(), self.n_bits)
    }

    fn record(&mut self, symbol_error: bool, bit_errors: u32, bits: u32) {
        self.n_symbols += 1;
        self.n_symbol_errors += symbol_error as u64;
        self.n_bits += bits as u64;
        self.n_bit_errors += bit_errors as u64;
    }
}

impl Add for ErrorStats {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            n_symbols: self.n_symbols + o.n_symbols,
            n_symbol_errors: self.n_symbol_errors + o.n_symbol_errors,
            n_bits: self.n_bits + o.n_bits,
            n_bit_errors: self.n_bit_errors + o.n_bit_errors,
        }
    }
}

impl AddAssign for ErrorStats {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

fn ci95(p: f64, n: u64) -> (f64, f64) {
    let h = 1.96 * binomial_sigma(p, n);
    ((p - h).max(0.0), (p + h).min(1.0))
}

/// Runs `per_chunk` over all chunks in parallel and sums the counts.
fn run_chunks<S, F>(n: u64, seed: u64, per_chunk: F) -> S
where
    S: Add<Output = S> + Default + Send,
    F: Fn(&mut rand_chacha::ChaCha8Rng, u64) -> S + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n - c * CHUNK);
            let mut rng = substream(seed, c);
            per_chunk(&mut rng, len)
        })
        .reduce(S::default, |a, b| a + b)
}

fn unit_constellation<T: Scalar>(cfg: &SimConfig) -> Result<Constellation<T>> {
    Constellation::build(cfg.modulation, cfg.labeling, T::one())
}

fn sigma_for<T: Scalar>(gamma: f64) -> T {
    if gamma == f64::INFINITY {
        T::zero()
    } else {
        T::lit(noise_variance_for_snr(1.0, gamma).sqrt())
    }
}

#[inline]
fn bit_errors(a: u32, b: u32) -> u32 {
    (a ^ b).count_ones()
}

/// Point-to-point link: uniform symbols through AWGN, minimum-distance
/// decisions, symbol and bit errors counted against the labels.
pub fn run_point_to_point<T: Scalar>(cfg: &SimConfig) -> Result<ErrorStats> {
    cfg.validate()?;
    let c = unit_constellation::<T>(cfg)?;
    let sigma = sigma_for::<T>(cfg.snr.resolve_linear(cfg.modulation)?);
    let m = c.len();
    let bits = c.bits_per_symbol();
    Ok(run_chunks(cfg.n_symbols, cfg.seed, |rng, len| {
        let mut st = ErrorStats::default();
        for _ in 0..len {
            let s = rng.random_range(0..m);
            let y = c.points()[s] + awgn_sample(sigma, rng);
            let d = c.demodulate_unchecked(y);
            st.record(d != s, bit_errors(c.labels()[s], c.labels()[d]), bits);
        }
        st
    }))
}

/// Relay in the first phase: both sources transmit simultaneously with
/// equal power, the relay decides on the superposed grid and maps to a coded
/// symbol. A symbol error is a coded symbol different from `C(s1, s2)`.
pub fn run_relay_phase1<T: Scalar>(cfg: &SimConfig) -> Result<ErrorStats> {
    cfg.validate()?;
    let c = unit_constellation::<T>(cfg)?;
    let table = MappingTable::build(&c);
    let sigma = sigma_for::<T>(cfg.snr.resolve_linear(cfg.modulation)?);
    let m = c.len();
    let bits = table.coded_word_bits();
    Ok(run_chunks(cfg.n_symbols, cfg.seed, |rng, len| {
        let mut st = ErrorStats::default();
        let sup = table.superposed();
        for _ in 0..len {
            let s1 = rng.random_range(0..m);
            let s2 = rng.random_range(0..m);
            let y = c.points()[s1] + c.points()[s2] + awgn_sample(sigma, rng);
            let got = table.coded_at_cell(sup.decide_cell(y));
            let want = table.coded_of_pair(s1, s2);
            st.record(
                got != want,
                bit_errors(table.coded_bits(got).value, table.coded_bits(want).value),
                bits,
            );
        }
        st
    }))
}

/// Received sample at an opportunistic listener: intended symbol plus an
/// interferer of relative amplitude `amp` rotated by a fresh uniform phase.
#[inline]
fn listener_sample<T: Scalar, R: Rng + ?Sized>(
    c: &Constellation<T>,
    intended: usize,
    interferer: usize,
    amp: T,
    sigma: T,
    rng: &mut R,
) -> Complex<T> {
    let theta = T::TAU() * T::unit_uniform(rng);
    let interference = if amp == T::zero() {
        Complex::new(T::zero(), T::zero())
    } else {
        c.points()[interferer] * Complex::from_polar(amp, theta)
    };
    c.points()[intended] + interference + awgn_sample(sigma, rng)
}

fn interference_amplitude<T: Scalar>(ratio_db: f64) -> T {
    if ratio_db == f64::INFINITY {
        T::zero()
    } else {
        T::lit(from_db(-ratio_db).sqrt())
    }
}

/// Opportunistic listener: intended symbol under a same-modulation
/// interferer with random symbol and uniformly random phase.
pub fn run_opportunistic<T: Scalar>(cfg: &SimConfig) -> Result<ErrorStats> {
    cfg.validate()?;
    let c = unit_constellation::<T>(cfg)?;
    let sigma = sigma_for::<T>(cfg.snr.resolve_linear(cfg.modulation)?);
    let amp = interference_amplitude::<T>(cfg.power_ratio_db);
    let m = c.len();
    let bits = c.bits_per_symbol();
    Ok(run_chunks(cfg.n_symbols, cfg.seed, |rng, len| {
        let mut st = ErrorStats::default();
        for _ in 0..len {
            let s = rng.random_range(0..m);
            let si = rng.random_range(0..m);
            let y = listener_sample(&c, s, si, amp, sigma, rng);
            let d = c.demodulate_unchecked(y);
            st.record(d != s, bit_errors(c.labels()[s], c.labels()[d]), bits);
        }
        st
    }))
}

/// Per-link SNRs of a two-phase exchange. Index 0 is destination D1 (wants
/// S1's symbols, overhears S2), index 1 is D2 (wants S2's, overhears S1).
#[derive(Debug, Clone)]
pub struct EndToEndConfig {
    pub modulation: ModulationId,
    pub labeling: Labeling,
    pub n_symbols: u64,
    pub seed: u64,
    /// Per-source SNR at the relay in phase 1 (equal power), dB.
    pub relay_snr_db: f64,
    /// Intended-signal SNR at each listener in phase 1, dB.
    pub listener_snr_db: [f64; 2],
    /// Intended-to-interference power ratio at each listener, dB.
    pub listener_ratio_db: [f64; 2],
    /// Relay-to-destination SNR in phase 2, dB.
    pub phase2_snr_db: [f64; 2],
}

impl EndToEndConfig {
    /// Every link noiseless and interference-free.
    pub fn noiseless(modulation: ModulationId, n_symbols: u64, seed: u64) -> Self {
        Self {
            modulation,
            labeling: Labeling::Gray,
            n_symbols,
            seed,
            relay_snr_db: f64::INFINITY,
            listener_snr_db: [f64::INFINITY; 2],
            listener_ratio_db: [f64::INFINITY; 2],
            phase2_snr_db: [f64::INFINITY; 2],
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EndToEndStats {
    /// Coded-symbol errors at the relay.
    pub relay: ErrorStats,
    /// Errors on the overheard symbol at each listener.
    pub overheard: [ErrorStats; 2],
    /// Errors on the decoded expected symbol at each destination.
    pub destination: [ErrorStats; 2],
}

impl Add for EndToEndStats {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            relay: self.relay + o.relay,
            overheard: [self.overheard[0] + o.overheard[0], self.overheard[1] + o.overheard[1]],
            destination: [
                self.destination[0] + o.destination[0],
                self.destination[1] + o.destination[1],
            ],
        }
    }
}

/// Full exchange: relay decision, phase-2 broadcast of the coded stream
/// (bit-repacked onto the original constellation for cross QAM), the
/// overheard symbol at each listener and modular decoding at the
/// destinations. Each chunk is one packet.
pub fn run_end_to_end<T: Scalar>(cfg: &EndToEndConfig) -> Result<EndToEndStats> {
    if cfg.n_symbols == 0 {
        return Err(Error::invalid("number of symbols must be at least 1"));
    }
    let c = Constellation::<T>::build(cfg.modulation, cfg.labeling, T::one())?;
    let table = MappingTable::build(&c);
    let resolve = |db: f64| SnrSpec::Db(db).resolve_linear(cfg.modulation).map(sigma_for::<T>);
    let relay_sigma = resolve(cfg.relay_snr_db)?;
    let listener_sigma = [resolve(cfg.listener_snr_db[0])?, resolve(cfg.listener_snr_db[1])?];
    let phase2_sigma = [resolve(cfg.phase2_snr_db[0])?, resolve(cfg.phase2_snr_db[1])?];
    let amp = [
        interference_amplitude::<T>(cfg.listener_ratio_db[0]),
        interference_amplitude::<T>(cfg.listener_ratio_db[1]),
    ];
    let m = c.len();
    let bps = c.bits_per_symbol();
    let word_bits = table.coded_word_bits();
    let cross = c.kind() == ModKind::CrossQam;

    Ok(run_chunks(cfg.n_symbols, cfg.seed, |rng, len| {
        let len = len as usize;
        let mut st = EndToEndStats::default();
        let sup = table.superposed();
        let s1: Vec<usize> = (0..len).map(|_| rng.random_range(0..m)).collect();
        let s2: Vec<usize> = (0..len).map(|_| rng.random_range(0..m)).collect();

        let mut coded = Vec::with_capacity(len);
        for i in 0..len {
            let y = c.points()[s1[i]] + c.points()[s2[i]] + awgn_sample(relay_sigma, rng);
            let got = table.coded_at_cell(sup.decide_cell(y));
            let want = table.coded_of_pair(s1[i], s2[i]);
            st.relay.record(
                got != want,
                bit_errors(table.coded_bits(got).value, table.coded_bits(want).value),
                word_bits,
            );
            coded.push(got);
        }

        let tx: Vec<usize> = if cross { repack(&coded, word_bits, bps) } else { coded };

        for dest in 0..2 {
            let rx: Vec<usize> = tx
                .iter()
                .map(|&s| c.demodulate_unchecked(c.points()[s] + awgn_sample(phase2_sigma[dest], rng)))
                .collect();
            let rx_coded = if cross { repack(&rx, bps, word_bits) } else { rx };

            // D1 overhears S2 under interference from S1, D2 the reverse.
            let (wanted, heard) = if dest == 0 { (&s1, &s2) } else { (&s2, &s1) };
            for i in 0..len {
                let y = listener_sample(&c, heard[i], wanted[i], amp[dest], listener_sigma[dest], rng);
                let overheard = c.demodulate_unchecked(y);
                st.overheard[dest].record(
                    overheard != heard[i],
                    bit_errors(c.labels()[heard[i]], c.labels()[overheard]),
                    bps,
                );
                match table.decode_expected(rx_coded[i], overheard) {
                    Ok(decoded) => st.destination[dest].record(
                        decoded != wanted[i],
                        bit_errors(c.labels()[wanted[i]], c.labels()[decoded]),
                        bps,
                    ),
                    Err(_) => st.destination[dest].record(true, bps, bps),
                }
            }
        }
        st
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    PointToPoint,
    Relay,
    Opportunistic,
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p2p" | "point-to-point" => Ok(Scenario::PointToPoint),
            "relay" => Ok(Scenario::Relay),
            "opp" | "opportunistic" => Ok(Scenario::Opportunistic),
            other => Err(Error::invalid(format!("unknown scenario {other:?} (p2p|relay|opp)"))),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::PointToPoint => "p2p",
            Scenario::Relay => "relay",
            Scenario::Opportunistic => "opp",
        })
    }
}

/// Closed-form reference values reported next to a measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticRef {
    pub ser: f64,
    pub ber_low: f64,
    pub ber_high: f64,
    pub ber_approx: f64,
}

/// Closed forms matching a scenario. Point-to-point and relay use the exact
/// square/PAM expressions and the union bound for cross QAM; the listener
/// uses `g(1/2)` with the `[g(0)/log2 M, g(1)]` bounds.
pub fn analytic_reference(scenario: Scenario, id: ModulationId, gamma: f64, ratio_db: f64) -> Result<AnalyticRef> {
    let m = id.order();
    let bits = id.bits_per_symbol() as f64;
    let cross_d2 = || {
        let c = Constellation::<f64>::build(id, Labeling::Binary, 1.0)?;
        Ok::<f64, Error>(gamma / c.energy_per_half_spacing_sq())
    };
    let from_ser = |ser: f64| AnalyticRef {
        ser,
        ber_low: ser / bits,
        ber_high: ser,
        ber_approx: ser / bits,
    };
    match (scenario, id.kind()) {
        (Scenario::PointToPoint, ModKind::SquareQam) => Ok(from_ser(analysis::ser_square_exact(m, gamma)?)),
        (Scenario::PointToPoint, ModKind::Pam) => Ok(from_ser(analysis::ser_pam_exact(m, gamma)?)),
        (Scenario::PointToPoint | Scenario::Relay, ModKind::CrossQam) => Ok(from_ser(analysis::ser_upper(cross_d2()?)?)),
        (Scenario::Relay, ModKind::SquareQam) => Ok(from_ser(analysis::ser_superposed(m, gamma)?)),
        (Scenario::Relay, ModKind::Pam) => Ok(from_ser(analysis::ser_pam_superposed(m, gamma)?)),
        (Scenario::Opportunistic, ModKind::SquareQam) => {
            let gamma_i = if ratio_db == f64::INFINITY { 0.0 } else { gamma * from_db(-ratio_db) };
            let pair = analysis::SnrPair::new(m, gamma, gamma_i)?;
            let g0 = analysis::g_alpha(&pair, 0.0)?;
            let g_half = analysis::g_alpha(&pair, 0.5)?;
            let g1 = analysis::g_alpha(&pair, 1.0)?;
            Ok(AnalyticRef {
                ser: g_half,
                ber_low: g0 / bits,
                ber_high: g1,
                ber_approx: g_half / bits,
            })
        }
        (Scenario::Opportunistic, _) => Err(Error::invalid(format!(
            "listener bounds are defined for square QAM only, got {id}"
        ))),
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub scenario: Scenario,
    pub config: SimConfig,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub gamma_db: f64,
    pub stats: ErrorStats,
    pub analytic: AnalyticRef,
}

pub const SWEEP_HEADER: &str = "scenario,modulation,labeling,snr_db,power_ratio_db,n_symbols,seed,\
symbol_errors,bit_errors,ser,ber,ser_ci_low,ser_ci_high,ber_ci_low,ber_ci_high,\
analytic_ser,analytic_ber_low,analytic_ber_high,analytic_ber_approx";

pub fn run_point<T: Scalar>(point: &SweepPoint) -> Result<SweepRow> {
    let cfg = &point.config;
    let gamma = cfg.snr.resolve_linear(cfg.modulation)?;
    let stats = match point.scenario {
        Scenario::PointToPoint => run_point_to_point::<T>(cfg)?,
        Scenario::Relay => run_relay_phase1::<T>(cfg)?,
        Scenario::Opportunistic => run_opportunistic::<T>(cfg)?,
    };
    let analytic = analytic_reference(point.scenario, cfg.modulation, gamma, cfg.power_ratio_db)?;
    Ok(SweepRow {
        point: point.clone(),
        gamma_db: 10.0 * gamma.log10(),
        stats,
        analytic,
    })
}

/// Runs every grid point in order.
pub fn sweep(points: &[SweepPoint]) -> Result<Vec<SweepRow>> {
    points.iter().map(run_point::<f64>).collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in rows {
        let c = &r.point.config;
        let (sl, sh) = r.stats.ser_ci95();
        let (bl, bh) = r.stats.ber_ci95();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.point.scenario,
            c.modulation,
            c.labeling,
            r.gamma_db,
            c.power_ratio_db,
            c.n_symbols,
            c.seed,
            r.stats.n_symbol_errors,
            r.stats.n_bit_errors,
            r.stats.ser(),
            r.stats.ber(),
            sl,
            sh,
            bl,
            bh,
            r.analytic.ser,
            r.analytic.ber_low,
            r.analytic.ber_high,
            r.analytic.ber_approx
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(name: &str, snr_db: f64, n: u64) -> SimConfig {
        SimConfig {
            n_symbols: n,
            seed: 11,
            ..SimConfig::new(name.parse().unwrap(), SnrSpec::Db(snr_db))
        }
    }

    #[test]
    fn noiseless_runs_are_error_free() {
        for id in ModulationId::all() {
            let c = SimConfig {
                modulation: id,
                ..cfg("qam16", f64::INFINITY, 5000)
            };
            assert_eq!(run_point_to_point::<f64>(&c).unwrap().n_symbol_errors, 0, "{id}");
            assert_eq!(run_relay_phase1::<f64>(&c).unwrap().n_symbol_errors, 0, "{id}");
        }
    }

    #[test]
    fn ber_within_ser_sandwich() {
        let st = run_point_to_point::<f64>(&cfg("qam64", 14.0, 200_000)).unwrap();
        assert!(st.n_bit_errors >= st.n_symbol_errors);
        assert!(st.n_bit_errors <= st.n_symbol_errors * 6);
    }

    #[test]
    fn deterministic() {
        let c = SimConfig {
            power_ratio_db: 10.0,
            ..cfg("qam16", 15.0, 70_000)
        };
        assert_eq!(run_opportunistic::<f64>(&c).unwrap(), run_opportunistic::<f64>(&c).unwrap());
    }

    #[test]
    fn rejects_empty_runs() {
        assert!(run_point_to_point::<f64>(&cfg("qam16", 10.0, 0)).is_err());
        let c = SimConfig {
            snr: SnrSpec::LowerBoundBer(1e-3),
            ..cfg("qam32", 0.0, 10)
        };
        assert!(run_opportunistic::<f64>(&c).is_err());
    }

    #[test]
    fn f32_simulation_runs() {
        let st = run_point_to_point::<f32>(&cfg("qam16", 12.0, 50_000)).unwrap();
        let want = analysis::ser_square_exact(16, from_db(12.0_f64)).unwrap();
        assert!((st.ser() - want).abs() < 5.0 * binomial_sigma(want, st.n_symbols));
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let mut buf = Vec::new();
        write_sweep_csv(&sweep(&[]).unwrap(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{SWEEP_HEADER}\n"));
    }
}
