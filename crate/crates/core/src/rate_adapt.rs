//! Rate adaptation and the throughput comparison of PNC, CNC, four-phase
//! relaying and direct transmission over random relay topologies.
//!
//! Each phase picks the highest modulation whose BER upper bound meets the
//! ceiling on every link that has to decode in that phase, using realized
//! (faded) SNRs. BER is bounded above by SER.
//!
//! | scheme     | phases                                                      |
//! |------------|-------------------------------------------------------------|
//! | PNC        | S1+S2 -> R (+ both listeners), R -> D1/D2                   |
//! | CNC        | S1 -> R (+ D2), S2 -> R (+ D1), R -> D1/D2                   |
//! | four-phase | S1 -> R, R -> D1, S2 -> R, R -> D2                          |
//! | direct     | S1 -> D1, S2 -> D2                                          |

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::analysis;
use crate::channel::{noise_power_dbm, rician_sample, substream};
use crate::constellation::{ModKind, ModulationId};
use crate::error::{Error, Result};
use crate::scalar::{from_db, to_db};

/// Mean energy of a cross constellation in units of its squared
/// half-spacing.
fn cross_energy(order: usize) -> f64 {
    match order {
        8 => 6.0,
        32 => 20.0,
        128 => 82.0,
        _ => unreachable!("not a cross order: {order}"),
    }
}

/// Broadcast-phase duration factor when the sources use `id`: the coded
/// alphabet holds `L'^2` symbols against `M` source symbols, so the factor is
/// `2 log2 L' / log2 M` (one for PAM and square QAM).
pub fn broadcast_overhead(id: ModulationId) -> f64 {
    match id.kind() {
        ModKind::CrossQam => 2.0 * (id.side() as f64).log2() / id.bits_per_symbol() as f64,
        _ => 1.0,
    }
}

/// A link that must decode in a given phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkConstraint {
    /// Single interference-free transmission at linear SNR `snr`.
    PointToPoint { snr: f64 },
    /// Relay deciding the superposed signal; `snr` is the per-source SNR.
    Relay { snr: f64 },
    /// Opportunistic listener: intended SNR and interference SNR.
    Listener { snr: f64, interference: f64 },
}

impl LinkConstraint {
    /// BER upper bound of this link with modulation `id`.
    pub fn ber_upper(&self, id: ModulationId) -> f64 {
        let m = id.order();
        let r = match (*self, id.kind()) {
            (LinkConstraint::PointToPoint { snr }, ModKind::Pam) => analysis::ser_pam_exact(m, snr),
            (LinkConstraint::PointToPoint { snr }, ModKind::SquareQam) => analysis::ser_square_exact(m, snr),
            (LinkConstraint::PointToPoint { snr } | LinkConstraint::Relay { snr }, ModKind::CrossQam) => {
                analysis::ser_upper(snr / cross_energy(m))
            }
            (LinkConstraint::Relay { snr }, ModKind::Pam) => analysis::ser_pam_superposed(m, snr),
            (LinkConstraint::Relay { snr }, ModKind::SquareQam) => analysis::ser_superposed(m, snr),
            (LinkConstraint::Listener { snr, interference }, ModKind::Pam) => {
                analysis::ser_pam_listener_upper(m, snr, interference)
            }
            (LinkConstraint::Listener { snr, interference }, ModKind::SquareQam) => {
                analysis::SnrPair::new(m, snr, interference).and_then(|p| analysis::g_alpha(&p, 1.0))
            }
            (LinkConstraint::Listener { snr, interference }, ModKind::CrossQam) => {
                let e = cross_energy(m);
                analysis::ser_opp_upper_distance((2.0 * snr / e).sqrt(), (2.0 * interference / e).sqrt(), id.side())
            }
        };
        // Invalid (negative/NaN) SNRs never satisfy a constraint.
        r.unwrap_or(1.0)
    }
}

/// Anything that yields a BER upper bound per modulation.
pub trait BerBound {
    fn ber_upper(&self, id: ModulationId) -> f64;
}

impl BerBound for LinkConstraint {
    fn ber_upper(&self, id: ModulationId) -> f64 {
        LinkConstraint::ber_upper(self, id)
    }
}

impl<F: Fn(ModulationId) -> f64> BerBound for F {
    fn ber_upper(&self, id: ModulationId) -> f64 {
        self(id)
    }
}

/// Ordered modulation ladder, strictly increasing in bits per symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModScheme {
    levels: Vec<ModulationId>,
}

impl ModScheme {
    pub fn new(levels: Vec<ModulationId>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::invalid("modulation ladder is empty"));
        }
        if levels.windows(2).any(|w| w[0].bits_per_symbol() >= w[1].bits_per_symbol()) {
            return Err(Error::invalid("modulation ladder must strictly increase in bits per symbol"));
        }
        Ok(Self { levels })
    }

    /// BPSK, QPSK, 16-, 32-, 64-, 128- and 256-QAM.
    pub fn standard() -> Self {
        let levels = [2usize, 4, 16, 32, 64, 128, 256]
            .iter()
            .map(|&m| if m == 2 { ModulationId::BPSK } else { ModulationId::qam(m).expect("supported") })
            .collect();
        Self { levels }
    }

    pub fn levels(&self) -> &[ModulationId] {
        &self.levels
    }
}

impl Default for ModScheme {
    fn default() -> Self {
        Self::standard()
    }
}

/// Highest level on the ladder meeting `ber_max` on every constraint, or
/// `None` if even the lowest level fails.
pub fn select_modulation<B: BerBound>(ladder: &ModScheme, constraints: &[B], ber_max: f64) -> Result<Option<ModulationId>> {
    if constraints.is_empty() {
        return Err(Error::invalid("at least one link constraint is required"));
    }
    Ok(ladder
        .levels()
        .iter()
        .rev()
        .find(|&&id| constraints.iter().all(|c| c.ber_upper(id) <= ber_max))
        .copied())
}

/// Lower the transmit power of whichever source arrives stronger at the relay
/// so that both received powers match; neither power exceeds `p_max`.
pub fn equalize_power(p1_dbm: f64, g1: f64, p2_dbm: f64, g2: f64, p_max_dbm: f64) -> Result<(f64, f64)> {
    if !(g1 > 0.0 && g2 > 0.0) {
        return Err(Error::invalid(format!("link gains must be positive, got {g1} and {g2}")));
    }
    let p1 = p1_dbm.min(p_max_dbm);
    let p2 = p2_dbm.min(p_max_dbm);
    let (g1_db, g2_db) = (to_db(g1), to_db(g2));
    let (r1, r2) = (p1 + g1_db, p2 + g2_db);
    Ok(if r1 > r2 {
        (r2 - g1_db, p2)
    } else if r2 > r1 {
        (p1, r1 - g2_db)
    } else {
        (p1, p2)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    S1,
    S2,
    R,
    D1,
    D2,
}

/// Where each destination sits relative to its opportunistic source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Placement {
    /// On the source line, beyond the source (away from the relay).
    Beyond,
    /// On the source line, from the source towards the relay.
    Inward,
    /// At independent uniformly random bearings around each source.
    RandomBearing,
    /// At one uniformly random bearing shared by both destinations, so that
    /// `D2 - S1 = -(D1 - S2)` and the layout is point-symmetric about the
    /// relay when the source distances are equal.
    #[default]
    Symmetric,
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "beyond" => Ok(Placement::Beyond),
            "inward" => Ok(Placement::Inward),
            "random" | "random-bearing" => Ok(Placement::RandomBearing),
            "symmetric" => Ok(Placement::Symmetric),
            other => Err(Error::invalid(format!(
                "unknown placement {other:?} (beyond|inward|random|symmetric)"
            ))),
        }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Placement::Beyond => "beyond",
            Placement::Inward => "inward",
            Placement::RandomBearing => "random",
            Placement::Symmetric => "symmetric",
        })
    }
}

/// Node positions in metres; the relay sits at the origin, S1 on the
/// negative and S2 on the positive x axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Topology {
    pub d_s1_r: f64,
    pub d_s2_r: f64,
    pub d_listener: f64,
    pub s1: [f64; 2],
    pub s2: [f64; 2],
    pub r: [f64; 2],
    /// Near S2 (D1 wants S1's packet and overhears S2).
    pub d1: [f64; 2],
    /// Near S1.
    pub d2: [f64; 2],
}

impl Topology {
    /// `bearings` are the angles (radians, measured from the +x axis) of D1
    /// around S2 and of D2 around S1.
    pub fn with_bearings(d_s1_r: f64, d_s2_r: f64, d_listener: f64, bearings: [f64; 2]) -> Result<Self> {
        if !(d_s1_r > 0.0 && d_s2_r > 0.0 && d_listener >= 0.0) {
            return Err(Error::invalid("source-relay distances must be positive and the listener distance non-negative"));
        }
        let s1 = [-d_s1_r, 0.0];
        let s2 = [d_s2_r, 0.0];
        let d1 = [s2[0] + d_listener * bearings[0].cos(), d_listener * bearings[0].sin()];
        let d2 = [s1[0] + d_listener * bearings[1].cos(), d_listener * bearings[1].sin()];
        Ok(Self {
            d_s1_r,
            d_s2_r,
            d_listener,
            s1,
            s2,
            r: [0.0, 0.0],
            d1,
            d2,
        })
    }

    pub fn collinear(d_s1_r: f64, d_s2_r: f64, d_listener: f64, placement: Placement) -> Result<Self> {
        let bearings = match placement {
            Placement::Beyond => [0.0, std::f64::consts::PI],
            Placement::Inward => [std::f64::consts::PI, 0.0],
            Placement::RandomBearing | Placement::Symmetric => {
                return Err(Error::invalid("random placement needs explicit bearings"));
            }
        };
        Self::with_bearings(d_s1_r, d_s2_r, d_listener, bearings)
    }

    /// Source-relay distances uniform on `[r_min, r_max]`, destinations per
    /// `placement`.
    pub fn draw<R: Rng + ?Sized>(params: &RateParams, d_listener: f64, rng: &mut R) -> Result<Self> {
        let a = params.r_min + (params.r_max - params.r_min) * rng.random::<f64>();
        let b = params.r_min + (params.r_max - params.r_min) * rng.random::<f64>();
        let bearings = [
            std::f64::consts::TAU * rng.random::<f64>(),
            std::f64::consts::TAU * rng.random::<f64>(),
        ];
        match params.placement {
            Placement::RandomBearing => Self::with_bearings(a, b, d_listener, bearings),
            Placement::Symmetric => {
                Self::with_bearings(a, b, d_listener, [bearings[0], bearings[0] + std::f64::consts::PI])
            }
            p => Self::collinear(a, b, d_listener, p),
        }
    }

    pub fn position(&self, n: Node) -> [f64; 2] {
        match n {
            Node::S1 => self.s1,
            Node::S2 => self.s2,
            Node::R => self.r,
            Node::D1 => self.d1,
            Node::D2 => self.d2,
        }
    }

    pub fn distance(&self, a: Node, b: Node) -> f64 {
        let (p, q) = (self.position(a), self.position(b));
        (p[0] - q[0]).hypot(p[1] - q[1])
    }
}

/// Simulation parameters of the throughput comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct RateParams {
    pub p_max_dbm: f64,
    pub noise_density_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub bandwidth_hz: f64,
    pub k_db: f64,
    pub ber_max: f64,
    pub packet_bits: f64,
    pub symbol_rate: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// Distances below this are evaluated at this distance (co-located
    /// nodes still see a finite path gain).
    pub ref_distance: f64,
    pub placement: Placement,
    pub ladder: ModScheme,
}

impl Default for RateParams {
    fn default() -> Self {
        Self {
            p_max_dbm: 10.0,
            noise_density_dbm_hz: -174.0,
            noise_figure_db: 6.0,
            bandwidth_hz: 1e6,
            k_db: 5.0,
            ber_max: 1e-3,
            packet_bits: 1000.0,
            symbol_rate: 0.5e6,
            r_min: 125.0,
            r_max: 250.0,
            ref_distance: 1.0,
            placement: Placement::default(),
            ladder: ModScheme::standard(),
        }
    }
}

impl RateParams {
    pub fn noise_dbm(&self) -> Result<f64> {
        noise_power_dbm(self.noise_density_dbm_hz, self.noise_figure_db, self.bandwidth_hz)
    }

    pub fn validate(&self) -> Result<()> {
        self.noise_dbm()?;
        let positive = [
            ("packet bits", self.packet_bits),
            ("symbol rate", self.symbol_rate),
            ("minimum source-relay distance", self.r_min),
            ("reference distance", self.ref_distance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.r_max >= self.r_min) {
            return Err(Error::invalid("maximum source-relay distance below minimum"));
        }
        if !(self.ber_max > 0.0 && self.ber_max < 1.0) {
            return Err(Error::invalid(format!("BER ceiling must be in (0, 1), got {}", self.ber_max)));
        }
        if !self.k_db.is_finite() || !self.p_max_dbm.is_finite() {
            return Err(Error::invalid("Rician factor and transmit power must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Pnc,
    Cnc,
    FourPhase,
    Direct,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Pnc, Scheme::Cnc, Scheme::FourPhase, Scheme::Direct];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Pnc => "pnc",
            Scheme::Cnc => "cnc",
            Scheme::FourPhase => "four-phase",
            Scheme::Direct => "direct",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseOutcome {
    pub modulation: Option<ModulationId>,
    /// Seconds; infinite when no modulation meets the ceiling.
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutcome {
    pub scheme: Scheme,
    pub phases: Vec<PhaseOutcome>,
    /// bit/s; zero when a phase is infeasible.
    pub throughput: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub topology: Topology,
    pub trial: u64,
    pub outcomes: Vec<SchemeOutcome>,
}

impl TrialResult {
    pub fn throughput(&self, scheme: Scheme) -> f64 {
        self.outcomes
            .iter()
            .find(|o| o.scheme == scheme)
            .map_or(0.0, |o| o.throughput)
    }
}

/// Draws realized link SNRs for one scheme evaluation.
struct Links<'a, R: ?Sized> {
    topo: &'a Topology,
    params: &'a RateParams,
    noise_dbm: f64,
    rng: &'a mut R,
}

impl<R: Rng + ?Sized> Links<'_, R> {
    /// Linear power gain with a fresh fading draw.
    fn gain(&mut self, tx: Node, rx: Node) -> f64 {
        let r = self.topo.distance(tx, rx).max(self.params.ref_distance);
        let h = rician_sample(self.params.k_db, self.rng);
        h.norm_sqr() / r.powi(4)
    }

    fn snr(&self, p_tx_dbm: f64, gain: f64) -> f64 {
        from_db(p_tx_dbm + to_db(gain) - self.noise_dbm)
    }

    fn p2p(&mut self, tx: Node, rx: Node) -> LinkConstraint {
        let g = self.gain(tx, rx);
        LinkConstraint::PointToPoint {
            snr: self.snr(self.params.p_max_dbm, g),
        }
    }
}

fn phase(params: &RateParams, constraints: &[LinkConstraint], bits_to_send: f64) -> Result<PhaseOutcome> {
    let modulation = select_modulation(&params.ladder, constraints, params.ber_max)?;
    let duration = modulation.map_or(f64::INFINITY, |m| {
        bits_to_send / (params.symbol_rate * m.bits_per_symbol() as f64)
    });
    Ok(PhaseOutcome { modulation, duration })
}

/// Evaluate one scheme on one topology, drawing one fading coefficient per
/// link per phase from `rng`.
pub fn scheme_throughput<R: Rng + ?Sized>(
    scheme: Scheme,
    topo: &Topology,
    params: &RateParams,
    rng: &mut R,
) -> Result<SchemeOutcome> {
    let noise_dbm = params.noise_dbm()?;
    let b = params.packet_bits;
    let mut links = Links {
        topo,
        params,
        noise_dbm,
        rng,
    };
    use Node::*;
    let phases = match scheme {
        Scheme::Pnc => {
            let g1r = links.gain(S1, R);
            let g2r = links.gain(S2, R);
            let (p1, p2) = equalize_power(params.p_max_dbm, g1r, params.p_max_dbm, g2r, params.p_max_dbm)?;
            let relay = LinkConstraint::Relay {
                snr: links.snr(p1, g1r).min(links.snr(p2, g2r)),
            };
            let (g2d1, g1d1) = (links.gain(S2, D1), links.gain(S1, D1));
            let (g1d2, g2d2) = (links.gain(S1, D2), links.gain(S2, D2));
            let listener1 = LinkConstraint::Listener {
                snr: links.snr(p2, g2d1),
                interference: links.snr(p1, g1d1),
            };
            let listener2 = LinkConstraint::Listener {
                snr: links.snr(p1, g1d2),
                interference: links.snr(p2, g2d2),
            };
            let first = phase(params, &[relay, listener1, listener2], b)?;
            let overhead = first.modulation.map_or(1.0, broadcast_overhead);
            let bc = [links.p2p(R, D1), links.p2p(R, D2)];
            let second = phase(params, &bc, b * overhead)?;
            vec![first, second]
        }
        Scheme::Cnc => {
            let a = [links.p2p(S1, R), links.p2p(S1, D2)];
            let bb = [links.p2p(S2, R), links.p2p(S2, D1)];
            let c = [links.p2p(R, D1), links.p2p(R, D2)];
            vec![phase(params, &a, b)?, phase(params, &bb, b)?, phase(params, &c, b)?]
        }
        Scheme::FourPhase => {
            let hops = [(S1, R), (R, D1), (S2, R), (R, D2)];
            hops.iter()
                .map(|&(tx, rx)| {
                    let c = links.p2p(tx, rx);
                    phase(params, &[c], b)
                })
                .collect::<Result<Vec<_>>>()?
        }
        Scheme::Direct => {
            let hops = [(S1, D1), (S2, D2)];
            hops.iter()
                .map(|&(tx, rx)| {
                    let c = links.p2p(tx, rx);
                    phase(params, &[c], b)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let total: f64 = phases.iter().map(|p| p.duration).sum();
    let throughput = if total.is_finite() { 2.0 * b / total } else { 0.0 };
    Ok(SchemeOutcome {
        scheme,
        phases,
        throughput,
    })
}

fn stream_id(trial: u64, purpose: u64) -> u64 {
    trial * 8 + purpose
}

/// One random draw: topology from the trial's own stream, then each scheme
/// with an independent fading stream. The same `(seed, trial)` yields the
/// same source distances and bearings for every listener distance.
pub fn run_trial(params: &RateParams, d_listener: f64, seed: u64, trial: u64) -> Result<TrialResult> {
    let mut topo_rng = substream(seed, stream_id(trial, 0));
    let topology = Topology::draw(params, d_listener, &mut topo_rng)?;
    let outcomes = Scheme::ALL
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut rng = substream(seed, stream_id(trial, 1 + i as u64));
            scheme_throughput(s, &topology, params, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialResult {
        topology,
        trial,
        outcomes,
    })
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub params: RateParams,
    pub distances: Vec<f64>,
    pub n_seeds: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRow {
    pub distance: f64,
    pub scheme: Scheme,
    pub mean: f64,
    pub std_dev: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub infeasible_fraction: f64,
    pub n_seeds: u64,
}

pub const EXPERIMENT_HEADER: &str =
    "distance_m,scheme,mean_throughput_bps,ci_low_bps,ci_high_bps,std_dev_bps,infeasible_fraction,n_seeds";

/// Mean throughput per scheme and listener distance over `n_seeds` draws.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    cfg.params.validate()?;
    if cfg.n_seeds == 0 {
        return Err(Error::invalid("at least one seed is required"));
    }
    let mut rows = Vec::with_capacity(cfg.distances.len() * Scheme::ALL.len());
    for &distance in &cfg.distances {
        if !(distance >= 0.0 && distance.is_finite()) {
            return Err(Error::invalid(format!("listener distance must be non-negative, got {distance}")));
        }
        let per_trial: Vec<[f64; 4]> = (0..cfg.n_seeds)
            .into_par_iter()
            .map(|t| {
                let r = run_trial(&cfg.params, distance, cfg.seed, t)?;
                Ok(Scheme::ALL.map(|s| r.throughput(s)))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = cfg.n_seeds as f64;
        for (i, &scheme) in Scheme::ALL.iter().enumerate() {
            let mean = per_trial.iter().map(|t| t[i]).sum::<f64>() / n;
            let var = if cfg.n_seeds > 1 {
                per_trial.iter().map(|t| (t[i] - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            let std_dev = var.sqrt();
            let half = 1.96 * std_dev / n.sqrt();
            let infeasible = per_trial.iter().filter(|t| t[i] == 0.0).count() as f64 / n;
            rows.push(ExperimentRow {
                distance,
                scheme,
                mean,
                std_dev,
                ci_low: mean - half,
                ci_high: mean + half,
                infeasible_fraction: infeasible,
                n_seeds: cfg.n_seeds,
            });
        }
    }
    Ok(rows)
}

pub fn write_experiment_csv<W: Write>(rows: &[ExperimentRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{EXPERIMENT_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.distance, r.scheme, r.mean, r.ci_low, r.ci_high, r.std_dev, r.infeasible_fraction, r.n_seeds
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{Constellation, Labeling};

    #[test]
    fn cross_energy_matches_constellations() {
        for m in [8, 32, 128] {
            let c = Constellation::<f64>::build(ModulationId::qam(m).unwrap(), Labeling::Binary, 1.0).unwrap();
            assert_eq!(cross_energy(m), c.energy_per_half_spacing_sq());
        }
    }

    #[test]
    fn broadcast_overheads() {
        assert!((broadcast_overhead(ModulationId::qam(32).unwrap()) - 2.0 * 6f64.log2() / 5.0).abs() < 1e-15);
        assert!((broadcast_overhead(ModulationId::qam(128).unwrap()) - 2.0 * 12f64.log2() / 7.0).abs() < 1e-15);
        assert_eq!(broadcast_overhead(ModulationId::qam(64).unwrap()), 1.0);
        assert_eq!(broadcast_overhead(ModulationId::BPSK), 1.0);
    }

    #[test]
    fn ladder_validation() {
        assert!(ModScheme::new(vec![]).is_err());
        assert!(ModScheme::new(vec![ModulationId::QPSK, ModulationId::BPSK]).is_err());
        assert!(ModScheme::new(vec![ModulationId::QPSK, ModulationId::pam(4).unwrap()]).is_err());
        let std = ModScheme::standard();
        let bits: Vec<u32> = std.levels().iter().map(|m| m.bits_per_symbol()).collect();
        assert_eq!(bits, [1, 2, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn selection_extremes() {
        let ladder = ModScheme::standard();
        let great = [LinkConstraint::PointToPoint { snr: 1e9 }];
        assert_eq!(select_modulation(&ladder, &great, 1e-3).unwrap(), ModulationId::qam(256).ok());
        let awful = [LinkConstraint::PointToPoint { snr: 0.1 }];
        assert_eq!(select_modulation(&ladder, &awful, 1e-3).unwrap(), None);
        let none: [LinkConstraint; 0] = [];
        assert!(select_modulation(&ladder, &none, 1e-3).is_err());
        let closure = |id: ModulationId| if id.bits_per_symbol() <= 4 { 0.0 } else { 1.0 };
        assert_eq!(select_modulation(&ladder, &[closure], 1e-3).unwrap(), ModulationId::qam(16).ok());
    }

    #[test]
    fn single_link_selects_sixteen_qam() {
        // SNR where the exact 16-QAM SER is 5e-4 (mpmath root); there the
        // 32-QAM union bound is 2.24e-2 and 64-QAM 0.135
        let snr = 64.364_488_609_587_855;
        let c = [LinkConstraint::PointToPoint { snr }];
        assert!((c[0].ber_upper(ModulationId::qam(16).unwrap()) - 5e-4).abs() < 1e-12);
        assert!((c[0].ber_upper(ModulationId::qam(32).unwrap()) - 2.236_038_550_891_98e-2).abs() < 1e-12);
        let ladder = ModScheme::standard();
        assert_eq!(select_modulation(&ladder, &c, 1e-3).unwrap(), ModulationId::qam(16).ok());
    }

    #[test]
    fn equalize() {
        assert_eq!(equalize_power(10.0, 1e-9, 10.0, 1e-9, 10.0).unwrap(), (10.0, 10.0));
        let (p1, p2) = equalize_power(10.0, 16e-9, 10.0, 1e-9, 10.0).unwrap();
        assert!((p1 - (10.0 - 12.041199826559248)).abs() < 1e-9);
        assert_eq!(p2, 10.0);
        let (g1, g2) = (3.7e-10, 8.1e-11);
        let (p1, p2) = equalize_power(10.0, g1, 10.0, g2, 10.0).unwrap();
        assert!(((p1 + to_db(g1)) - (p2 + to_db(g2))).abs() < 1e-9);
        assert!(equalize_power(10.0, 0.0, 10.0, 1.0, 10.0).is_err());
    }

    #[test]
    fn short_links_pnc_reaches_eight_bits_per_symbol() {
        // Listeners sit on their intended source, the interferer 6 m away
        // (31 dB weaker), so every phase-1 bound allows 256-QAM.
        let params = RateParams {
            k_db: f64::INFINITY,
            ..RateParams::default()
        };
        let topo = Topology::collinear(3.0, 3.0, 0.0, Placement::Beyond).unwrap();
        let mut rng = substream(1, 0);
        let out = scheme_throughput(Scheme::Pnc, &topo, &params, &mut rng).unwrap();
        assert!(out.phases.iter().all(|p| p.modulation == ModulationId::qam(256).ok()));
        assert!((out.throughput - 8.0 * params.symbol_rate).abs() < 1e-6);
    }

    #[test]
    fn equal_rate_accounting_identity() {
        // every link picks 256-QAM: PNC, CNC and four-phase use 2, 3 and 4
        // equal phases
        let params = RateParams {
            k_db: f64::INFINITY,
            ..RateParams::default()
        };
        let topo = Topology::collinear(3.0, 3.0, 0.0, Placement::Beyond).unwrap();
        let tp = |s| {
            let out = scheme_throughput(s, &topo, &params, &mut substream(2, 0)).unwrap();
            assert!(out.phases.iter().all(|p| p.modulation == ModulationId::qam(256).ok()));
            out.throughput
        };
        let rs8 = 8.0 * params.symbol_rate;
        assert!((tp(Scheme::Pnc) - rs8).abs() < 1e-6);
        assert!((tp(Scheme::Cnc) - rs8 * 2.0 / 3.0).abs() < 1e-6);
        assert!((tp(Scheme::FourPhase) - rs8 / 2.0).abs() < 1e-6);
        assert!((tp(Scheme::Direct) - rs8).abs() < 1e-6);
    }

    #[test]
    fn throughput_zero_iff_a_phase_is_infeasible() {
        let params = RateParams::default();
        for t in 0..200 {
            let r = run_trial(&params, 150.0, 11, t).unwrap();
            for o in &r.outcomes {
                assert!(o.throughput >= 0.0);
                assert_eq!(o.throughput == 0.0, o.phases.iter().any(|p| p.modulation.is_none()));
            }
        }
    }

    #[test]
    fn experiment_is_deterministic() {
        let cfg = ExperimentConfig {
            params: RateParams::default(),
            distances: vec![0.0, 80.0],
            n_seeds: 50,
            seed: 4,
        };
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        let zero = ExperimentConfig { n_seeds: 0, ..cfg };
        assert!(run_experiment(&zero).is_err());
    }

    #[test]
    fn topology_geometry() {
        let t = Topology::collinear(150.0, 200.0, 30.0, Placement::Beyond).unwrap();
        assert_eq!(t.distance(Node::S2, Node::D1), 30.0);
        assert_eq!(t.distance(Node::R, Node::D1), 230.0);
        assert_eq!(t.distance(Node::S1, Node::D1), 380.0);
        let t = Topology::collinear(150.0, 200.0, 30.0, Placement::Inward).unwrap();
        assert_eq!(t.distance(Node::R, Node::D2), 120.0);
        assert!(Topology::collinear(0.0, 200.0, 30.0, Placement::Inward).is_err());
    }
}
