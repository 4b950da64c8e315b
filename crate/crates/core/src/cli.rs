//! The `pnc` command line.
//!
//! Every subcommand writes a CSV (stdout, or `--out FILE`) and a run
//! manifest of `key=value` lines (`FILE.manifest`, or `#`-prefixed lines on
//! stderr). A manifest can be passed back through `--config` to rerun the
//! same job. Exit codes: 0 success, 1 invalid input, 2 verification failure.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis;
use crate::constellation::{Constellation, Labeling, ModKind, ModulationId};
use crate::error::{Error, Result};
use crate::mapping::{verify_exclusive_law, MappingRule, MappingTable};
use crate::rate_adapt::{self, ExperimentConfig, Placement, RateParams};
use crate::scalar::from_db;
use crate::sim::{self, Scenario, SimConfig, SnrSpec, SweepPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pnc", version, about = "PNC constellation mapping, error rates and throughput")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Base random seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output CSV path; the manifest goes next to it with a `.manifest` suffix.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of `key=value` lines read as `--key value` flags; explicit flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List constellation points and bit labels.
    Table(TableArgs),
    /// Dump the relay's coded-symbol table for every source pair.
    Map(MapArgs),
    /// Check the Exclusive Law and destination decoding for a mapping.
    Verify(MapArgs),
    /// Evaluate the closed-form SER/BER expressions over an SNR grid.
    Analytic(AnalyticArgs),
    /// Monte Carlo SER/BER for point-to-point or relay reception.
    Ber(BerArgs),
    /// Monte Carlo BER of an interfered listener against the power ratio.
    OppBer(OppBerArgs),
    /// Throughput of PNC, CNC, four-phase and direct transmission.
    Throughput(ThroughputArgs),
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long = "mod", default_value = "qam16")]
    pub modulation: String,
    #[arg(long, default_value = "gray")]
    pub labeling: String,
    /// Average symbol energy.
    #[arg(long, default_value_t = 1.0)]
    pub energy: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(long = "mod", default_value = "qam16")]
    pub modulation: String,
    #[arg(long, default_value = "gray")]
    pub labeling: String,
    /// modular or xor.
    #[arg(long, default_value = "modular")]
    pub mapping: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[arg(long = "mod", default_value = "qam16")]
    pub modulation: String,
    /// Intended SNR grid in dB (`start:stop:step`, `a,b,c` or a single value).
    #[arg(long = "snr-db", default_value = "0:30:1")]
    pub snr_db: String,
    /// Intended-to-interference power ratio in dB for the listener bounds.
    #[arg(long = "ratio-db", default_value = "20")]
    pub ratio_db: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct BerArgs {
    /// p2p or relay.
    #[arg(long, default_value = "p2p")]
    pub scenario: String,
    #[arg(long = "mod", default_value = "qam16")]
    pub modulation: String,
    #[arg(long, default_value = "gray")]
    pub labeling: String,
    #[arg(long = "snr-db", default_value = "0:20:2")]
    pub snr_db: String,
    #[arg(long, default_value_t = 100_000)]
    pub symbols: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct OppBerArgs {
    /// Comma-separated square QAM list.
    #[arg(long = "mod", default_value = "qpsk,qam16,qam64,qam256")]
    pub modulation: String,
    #[arg(long = "ratio-db", default_value = "0:40:5")]
    pub ratio_db: String,
    /// Interference-free BER lower bound the intended SNR is solved for.
    #[arg(long = "target-ber", default_value_t = 1e-3)]
    pub target_ber: f64,
    #[arg(long, default_value = "gray")]
    pub labeling: String,
    #[arg(long, default_value_t = 100_000)]
    pub symbols: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ThroughputArgs {
    /// Listener distance grid in metres.
    #[arg(long, default_value = "0:200:10")]
    pub distance: String,
    #[arg(long, default_value_t = 1000)]
    pub seeds: u64,
    #[arg(long = "power-dbm", default_value_t = 10.0)]
    pub power_dbm: f64,
    #[arg(long = "noise-density-dbm-hz", default_value_t = -174.0)]
    pub noise_density: f64,
    #[arg(long = "noise-figure-db", default_value_t = 6.0)]
    pub noise_figure: f64,
    #[arg(long = "bandwidth-hz", default_value_t = 1e6)]
    pub bandwidth: f64,
    #[arg(long = "k-db", default_value_t = 5.0)]
    pub k_db: f64,
    #[arg(long = "ber-max", default_value_t = 1e-3)]
    pub ber_max: f64,
    #[arg(long = "packet-bits", default_value_t = 1000.0)]
    pub packet_bits: f64,
    #[arg(long = "symbol-rate", default_value_t = 0.5e6)]
    pub symbol_rate: f64,
    #[arg(long = "r-min", default_value_t = 125.0)]
    pub r_min: f64,
    #[arg(long = "r-max", default_value_t = 250.0)]
    pub r_max: f64,
    /// beyond, inward, random or symmetric.
    #[arg(long, default_value = "symmetric")]
    pub placement: String,
    #[command(flatten)]
    pub common: Common,
}

/// Parse a grid: `start:stop:step` (inclusive), a comma list, or one value.
/// `inf` is accepted as a value.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        let t = t.trim();
        t.parse::<f64>()
            .map_err(|_| Error::invalid(format!("not a number: {t:?}")))
            .and_then(|v| {
                if v.is_nan() {
                    Err(Error::invalid("NaN is not a valid grid value"))
                } else {
                    Ok(v)
                }
            })
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(num).collect(),
        3 => {
            let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(a.is_finite() && b.is_finite() && step.is_finite()) {
                return Err(Error::invalid(format!("range bounds must be finite: {s:?}")));
            }
            if !(step > 0.0) || b < a {
                return Err(Error::invalid(format!("range needs step > 0 and stop >= start: {s:?}")));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize + 1;
            if n > 1_000_000 {
                return Err(Error::invalid(format!("range {s:?} has too many points")));
            }
            Ok((0..n).map(|i| a + i as f64 * step).collect())
        }
        _ => Err(Error::invalid(format!("grid must be start:stop:step or a comma list, got {s:?}"))),
    }
}

/// Read a `key=value` file into `--key value` arguments. Blank lines, `#`
/// comments and the manifest-only keys `subcommand` and `version` are
/// skipped.
pub fn config_args(path: &Path) -> Result<Vec<OsString>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        // `# key=value` (a manifest captured from stderr) is honoured; any
        // other `#` line is a comment.
        let (line, commented) = match line.strip_prefix('#') {
            Some(rest) => (rest.trim(), true),
            None => (line, false),
        };
        if line.is_empty() || (commented && !line.contains('=')) {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::invalid(format!("{}:{}: expected key=value, got {line:?}", path.display(), n + 1))
        })?;
        let k = k.trim();
        if matches!(k, "subcommand" | "version" | "config" | "out") {
            continue;
        }
        out.push(OsString::from(format!("--{k}")));
        out.push(OsString::from(v.trim()));
    }
    Ok(out)
}

/// Splice config-file arguments in right after the subcommand so that flags
/// given explicitly on the command line override them.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let injected = config_args(&path)?;
    let mut out = args;
    // argv[0] is the program, argv[1] the subcommand.
    let at = out.len().min(2);
    out.splice(at..at, injected);
    Ok(out)
}

type Manifest = Vec<(&'static str, String)>;

fn labeling(s: &str) -> Result<Labeling> {
    s.parse()
}

fn modulation(s: &str) -> Result<ModulationId> {
    s.parse()
}

fn emit(common: &Common, subcommand: &str, mut params: Manifest, csv: &[u8]) -> Result<()> {
    params.insert(0, ("subcommand", subcommand.to_string()));
    params.insert(1, ("version", env!("CARGO_PKG_VERSION").to_string()));
    params.push(("seed", common.seed.to_string()));
    let manifest: String = params.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
    let io_err = |p: &Path| {
        let path = p.to_path_buf();
        move |source| Error::Io { path, source }
    };
    match &common.out {
        Some(path) => {
            fs::write(path, csv).map_err(io_err(path))?;
            let mut mpath = path.clone().into_os_string();
            mpath.push(".manifest");
            let mpath = PathBuf::from(mpath);
            fs::write(&mpath, manifest).map_err(io_err(&mpath))?;
        }
        None => {
            io::stdout().write_all(csv).map_err(io_err(Path::new("<stdout>")))?;
            let commented: String = manifest.lines().map(|l| format!("# {l}\n")).collect();
            io::stderr().write_all(commented.as_bytes()).map_err(io_err(Path::new("<stderr>")))?;
        }
    }
    Ok(())
}

fn csv_err(e: io::Error) -> Error {
    Error::Io {
        path: "<csv buffer>".into(),
        source: e,
    }
}

fn run_table(a: &TableArgs) -> Result<()> {
    let id = modulation(&a.modulation)?;
    let lab = labeling(&a.labeling)?;
    let c = Constellation::<f64>::build(id, lab, a.energy)?;
    let mut csv = Vec::new();
    writeln!(csv, "index,label,bits,in_phase,quadrature,grid_i,grid_q").map_err(csv_err)?;
    for (i, p) in c.points().iter().enumerate() {
        let (k, k2) = c.grid_of(i)?;
        writeln!(csv, "{i},{},{},{},{},{k},{k2}", c.label(i)?, c.bits_of(i)?, p.re, p.im).map_err(csv_err)?;
    }
    let params = vec![
        ("mod", id.to_string()),
        ("labeling", lab.to_string()),
        ("energy", a.energy.to_string()),
    ];
    emit(&a.common, "table", params, &csv)
}

fn build_table(a: &MapArgs) -> Result<(MappingTable<f64>, Manifest)> {
    let id = modulation(&a.modulation)?;
    let lab = labeling(&a.labeling)?;
    let rule: MappingRule = a.mapping.parse()?;
    let c = Constellation::<f64>::build(id, lab, 1.0)?;
    let table = MappingTable::build_with_rule(&c, rule)?;
    let params = vec![
        ("mod", id.to_string()),
        ("labeling", lab.to_string()),
        ("mapping", rule.to_string()),
    ];
    Ok((table, params))
}

fn run_map(a: &MapArgs) -> Result<()> {
    let (t, params) = build_table(a)?;
    let sup = t.superposed();
    let m = t.base().len();
    let mut csv = Vec::new();
    writeln!(csv, "s1,s2,superposed_in_phase,superposed_quadrature,cell,coded,coded_bits").map_err(csv_err)?;
    for s1 in 0..m {
        for s2 in 0..m {
            let p = sup.points()[sup.point_of_pair(s1, s2)];
            let coded = t.coded_of_pair(s1, s2);
            writeln!(
                csv,
                "{s1},{s2},{},{},{},{coded},{}",
                p.re,
                p.im,
                sup.cell_of_pair(s1, s2),
                t.coded_bits(coded)
            )
            .map_err(csv_err)?;
        }
    }
    emit(&a.common, "map", params, &csv)
}

/// Returns whether the mapping passed.
fn run_verify(a: &MapArgs) -> Result<bool> {
    let (t, params) = build_table(a)?;
    let report = verify_exclusive_law(&t);
    let m = t.base().len();
    let mut decode_failure = None;
    'outer: for s1 in 0..m {
        for s2 in 0..m {
            let c = t.coded_of_pair(s1, s2);
            let ok = t.decode_expected(c, s1).ok() == Some(s2) && t.decode_expected(c, s2).ok() == Some(s1);
            if !ok {
                decode_failure = Some((s1, s2, c));
                break 'outer;
            }
        }
    }
    let passed = report.passed() && decode_failure.is_none();
    let mut csv = Vec::new();
    writeln!(
        csv,
        "modulation,mapping,pairs,cells_touched,coded_alphabet,exclusive_law,window_check,decode_round_trip"
    )
    .map_err(csv_err)?;
    writeln!(
        csv,
        "{},{},{},{},{},{},{},{}",
        t.base().id(),
        t.rule(),
        m * m,
        t.cells_touched(),
        t.coded_alphabet_size(),
        if report.exclusive_law.is_none() { "pass" } else { "fail" },
        if report.window.is_none() { "pass" } else { "fail" },
        if decode_failure.is_none() { "pass" } else { "fail" },
    )
    .map_err(csv_err)?;
    emit(&a.common, "verify", params, &csv)?;
    if let Some(ce) = &report.exclusive_law {
        eprintln!("counterexample: {ce}");
    }
    if let Some(w) = &report.window {
        eprintln!("window violation: {w}");
    }
    if let Some((s1, s2, c)) = decode_failure {
        eprintln!("decode failure: pair ({s1}, {s2}) -> coded {c}");
    }
    Ok(passed)
}

/// Empty CSV field where an expression is undefined for the modulation.
fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn run_analytic(a: &AnalyticArgs) -> Result<()> {
    let id = modulation(&a.modulation)?;
    let snrs = parse_grid(&a.snr_db)?;
    let ratios = parse_grid(&a.ratio_db)?;
    let m = id.order();
    let bits = id.bits_per_symbol() as f64;
    let mut csv = Vec::new();
    writeln!(
        csv,
        "modulation,snr_db,ratio_db,ser_point_to_point,ser_relay,ser_listener_low,ser_listener_approx,ser_listener_high,ber_listener_low,ber_listener_approx"
    )
    .map_err(csv_err)?;
    for &snr_db in &snrs {
        let gamma = from_db(snr_db);
        let p2p = sim::analytic_reference(Scenario::PointToPoint, id, gamma, f64::INFINITY).ok().map(|r| r.ser);
        let relay = sim::analytic_reference(Scenario::Relay, id, gamma, f64::INFINITY).ok().map(|r| r.ser);
        for &ratio_db in &ratios {
            let gamma_i = gamma * from_db(-ratio_db);
            let pair = match id.kind() {
                ModKind::SquareQam => analysis::SnrPair::new(m, gamma, gamma_i).ok(),
                _ => None,
            };
            let g = |alpha: f64| pair.as_ref().and_then(|p| analysis::g_alpha(p, alpha).ok());
            writeln!(
                csv,
                "{id},{snr_db},{ratio_db},{},{},{},{},{},{},{}",
                opt(p2p),
                opt(relay),
                opt(g(0.0)),
                opt(g(0.5)),
                opt(g(1.0)),
                opt(g(0.0).map(|v| v / bits)),
                opt(g(0.5).map(|v| v / bits)),
            )
            .map_err(csv_err)?;
        }
    }
    let params = vec![
        ("mod", id.to_string()),
        ("snr-db", a.snr_db.clone()),
        ("ratio-db", a.ratio_db.clone()),
    ];
    emit(&a.common, "analytic", params, &csv)
}

fn run_ber(a: &BerArgs) -> Result<()> {
    let scenario: Scenario = a.scenario.parse()?;
    if scenario == Scenario::Opportunistic {
        return Err(Error::invalid("use the opp-ber subcommand for interfered listeners"));
    }
    let id = modulation(&a.modulation)?;
    let lab = labeling(&a.labeling)?;
    let points: Vec<SweepPoint> = parse_grid(&a.snr_db)?
        .into_iter()
        .map(|db| {
            let mut config = SimConfig::new(id, SnrSpec::Db(db));
            config.labeling = lab;
            config.n_symbols = a.symbols;
            config.seed = a.common.seed;
            SweepPoint { scenario, config }
        })
        .collect();
    let rows = sim::sweep(&points)?;
    let mut csv = Vec::new();
    sim::write_sweep_csv(&rows, &mut csv).map_err(csv_err)?;
    let params = vec![
        ("scenario", scenario.to_string()),
        ("mod", id.to_string()),
        ("labeling", lab.to_string()),
        ("snr-db", a.snr_db.clone()),
        ("symbols", a.symbols.to_string()),
    ];
    emit(&a.common, "ber", params, &csv)
}

fn run_opp_ber(a: &OppBerArgs) -> Result<()> {
    let ids = a.modulation.split(',').map(modulation).collect::<Result<Vec<_>>>()?;
    let lab = labeling(&a.labeling)?;
    let ratios = parse_grid(&a.ratio_db)?;
    let mut points = Vec::new();
    for &id in &ids {
        for &r in &ratios {
            let mut config = SimConfig::new(id, SnrSpec::LowerBoundBer(a.target_ber));
            config.labeling = lab;
            config.n_symbols = a.symbols;
            config.power_ratio_db = r;
            config.seed = a.common.seed;
            points.push(SweepPoint {
                scenario: Scenario::Opportunistic,
                config,
            });
        }
    }
    let rows = sim::sweep(&points)?;
    let mut csv = Vec::new();
    sim::write_sweep_csv(&rows, &mut csv).map_err(csv_err)?;
    let params = vec![
        ("mod", ids.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")),
        ("labeling", lab.to_string()),
        ("ratio-db", a.ratio_db.clone()),
        ("target-ber", a.target_ber.to_string()),
        ("symbols", a.symbols.to_string()),
    ];
    emit(&a.common, "opp-ber", params, &csv)
}

fn run_throughput(a: &ThroughputArgs) -> Result<()> {
    let placement: Placement = a.placement.parse()?;
    let params = RateParams {
        p_max_dbm: a.power_dbm,
        noise_density_dbm_hz: a.noise_density,
        noise_figure_db: a.noise_figure,
        bandwidth_hz: a.bandwidth,
        k_db: a.k_db,
        ber_max: a.ber_max,
        packet_bits: a.packet_bits,
        symbol_rate: a.symbol_rate,
        r_min: a.r_min,
        r_max: a.r_max,
        placement,
        ..RateParams::default()
    };
    let cfg = ExperimentConfig {
        params,
        distances: parse_grid(&a.distance)?,
        n_seeds: a.seeds,
        seed: a.common.seed,
    };
    let rows = rate_adapt::run_experiment(&cfg)?;
    let mut csv = Vec::new();
    rate_adapt::write_experiment_csv(&rows, &mut csv).map_err(csv_err)?;
    let manifest = vec![
        ("distance", a.distance.clone()),
        ("seeds", a.seeds.to_string()),
        ("power-dbm", a.power_dbm.to_string()),
        ("noise-density-dbm-hz", a.noise_density.to_string()),
        ("noise-figure-db", a.noise_figure.to_string()),
        ("bandwidth-hz", a.bandwidth.to_string()),
        ("k-db", a.k_db.to_string()),
        ("ber-max", a.ber_max.to_string()),
        ("packet-bits", a.packet_bits.to_string()),
        ("symbol-rate", a.symbol_rate.to_string()),
        ("r-min", a.r_min.to_string()),
        ("r-max", a.r_max.to_string()),
        ("placement", placement.to_string()),
    ];
    emit(&a.common, "throughput", manifest, &csv)
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Table(a) => run_table(a).map(|_| true),
        Command::Map(a) => run_map(a).map(|_| true),
        Command::Verify(a) => run_verify(a),
        Command::Analytic(a) => run_analytic(a).map(|_| true),
        Command::Ber(a) => run_ber(a).map(|_| true),
        Command::OppBer(a) => run_opp_ber(a).map(|_| true),
        Command::Throughput(a) => run_throughput(a).map(|_| true),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:40:5").unwrap().len(), 9);
        assert_eq!(parse_grid("0:1:0.1").unwrap().len(), 11);
        assert_eq!(parse_grid("3").unwrap(), [3.0]);
        assert_eq!(parse_grid("1,2.5,inf").unwrap(), [1.0, 2.5, f64::INFINITY]);
        assert!(parse_grid("0:10:0").is_err());
        assert!(parse_grid("10:0:1").is_err());
        assert!(parse_grid("a").is_err());
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("nan").is_err());
    }

    #[test]
    fn config_splices_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.conf");
        fs::write(&p, "# comment\nsubcommand=verify\nmod = pam4\n\nmapping=xor\n").unwrap();
        let args: Vec<OsString> = ["pnc", "verify", "--config", p.to_str().unwrap(), "--mapping", "modular"]
            .iter()
            .map(OsString::from)
            .collect();
        let out = expand_config(args).unwrap();
        let s: Vec<String> = out.iter().map(|a| a.to_string_lossy().into_owned()).collect();
        assert_eq!(&s[..6], ["pnc", "verify", "--mod", "pam4", "--mapping", "xor"]);
        let cli = Cli::try_parse_from(out).unwrap();
        match cli.command {
            Command::Verify(a) => {
                assert_eq!(a.modulation, "pam4");
                assert_eq!(a.mapping, "modular");
            }
            _ => panic!("wrong subcommand"),
        }
    }

    #[test]
    fn bad_config_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.conf");
        fs::write(&p, "novalue\n").unwrap();
        assert!(config_args(&p).is_err());
        assert!(config_args(&dir.path().join("missing")).is_err());
    }
}
