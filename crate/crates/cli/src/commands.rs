//! Command implementations. Each returns its full output as text; the caller
//! decides where it goes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hmqct_core::adversary::{bkp_error_mc, bkp_exact_error, eps_bkp, MAX_EXACT_N};
use hmqct_core::bounds::{pguess_bound_optimistic, pguess_bound_theorem4};
use hmqct_core::channel::{p_abort, qber, ChannelParams};
use hmqct_core::codec;
use hmqct_core::keyrate::{default_m_max, generate_curve, guessing_bound, hmqct_rate, optimize_m, BoundKind, CurveConfig};
use hmqct_core::protocol::{run_session, InputSampling, SessionConfig, SessionReport};
use hmqct_core::Beta;

use crate::app::{
    AdversaryArgs, AnalyticArgs, BoundsArgs, Cli, CodecCommand, Command, CurveArgs, ModelArgs, SimulateArgs,
    DEFAULT_SEED,
};
use crate::config::{Config, Sampling};
use crate::error::{CliError, Result};
use crate::format::g12;
use crate::grid::{parse_count, parse_int_grid, parse_real_grid};

pub const CURVE_HEADER: &str = "L_km,rate_lower,rate_optimistic,rate_bb84,skc,m_opt,qber,p_abort";
pub const ADVERSARY_HEADER: &str = "d,eps_analytic,eps_mc,eps_exact";
pub const BOUNDS_HEADER: &str = "kind,n,m,q,p,p_guess,h_min";

const DEFAULT_DISTANCE_KM: f64 = 10.0;
const DEFAULT_ROUNDS: u64 = 100_000;
const DEFAULT_TRIALS: u64 = 100_000;

/// Where a command's text goes.
pub struct Output {
    pub text: String,
    /// `None` means stdout.
    pub path: Option<PathBuf>,
    /// Extra files written alongside.
    pub extra: Vec<(PathBuf, String)>,
}

impl Output {
    fn stdout(text: String) -> Self {
        Self { text, path: None, extra: Vec::new() }
    }

    /// Writes every file; returns the text destined for stdout, if any.
    pub fn commit(self) -> Result<Option<String>> {
        for (path, body) in &self.extra {
            write_file(path, body)?;
        }
        match self.path {
            Some(path) => {
                write_file(&path, &self.text)?;
                Ok(None)
            }
            None => Ok(Some(self.text)),
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| CliError::io(path, e))
}

/// Resolves flags, environment and config file, then runs the command.
pub fn run(cli: Cli) -> Result<Output> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    match cli.command {
        Command::Curve(a) => cmd_curve(&a, &config),
        Command::Simulate(a) => cmd_simulate(&a, &config, seed),
        Command::Analytic(a) => cmd_analytic(&a, &config),
        Command::Adversary(a) => cmd_adversary(&a, &config, seed),
        Command::Codec(c) => cmd_codec(&c).map(Output::stdout),
        Command::Bounds(a) => cmd_bounds(&a, &config),
    }
}

struct Model {
    n: usize,
    beta: Beta,
    delta: f64,
    p_dark: f64,
    eta_det: f64,
}

impl Model {
    fn resolve(a: &ModelArgs, c: &Config) -> Result<Self> {
        Ok(Self {
            n: to_usize(a.n.or(c.n).unwrap_or(1024))?,
            beta: a.beta.or(c.beta).unwrap_or(Beta::QUARTER),
            delta: a.delta.or(c.delta).unwrap_or(1e-4),
            p_dark: a.p_dark.or(c.p_dark).unwrap_or(1e-8),
            eta_det: a.eta_det.or(c.eta_det).unwrap_or(0.65),
        })
    }

    fn channel(&self, distance_km: f64, copies: u32) -> Result<ChannelParams> {
        let p = ChannelParams {
            distance_km,
            eta_det: self.eta_det,
            p_dark: self.p_dark,
            n: self.n,
            beta: self.beta,
            copies,
            delta: self.delta,
        };
        p.validate()?;
        Ok(p)
    }
}

fn to_usize(v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| CliError::usage(format!("{v} is too large")))
}

fn to_u32(v: u64) -> Result<u32> {
    u32::try_from(v).map_err(|_| CliError::usage(format!("{v} is too large")))
}

fn single<T: Copy>(values: Vec<T>, what: &str) -> Result<T> {
    match values.as_slice() {
        [v] => Ok(*v),
        _ => Err(CliError::usage(format!("{what} takes a single value here"))),
    }
}

fn distance(flag: &Option<String>, c: &Config) -> Result<f64> {
    match flag {
        Some(s) => single(parse_real_grid(s)?, "--L"),
        None => c.l.clone().map_or(Ok(DEFAULT_DISTANCE_KM), |g| single(g, "L")),
    }
}

/// Copy count from flag or config, or the rate-optimal one.
fn copies(flag: &Option<String>, c: &Config, model: &Model, distance_km: f64, bound: BoundKind) -> Result<u32> {
    let given = match flag {
        Some(s) => Some(single(parse_int_grid(s)?, "--m")?),
        None => c.m.clone().map(|g| single(g, "m")).transpose()?,
    };
    match given {
        Some(0) => Err(CliError::usage("m must be at least 1")),
        Some(m) => to_u32(m),
        None => {
            let params = model.channel(distance_km, 1)?;
            Ok(optimize_m(&params, bound, default_m_max(model.n))?.0)
        }
    }
}

pub fn cmd_curve(a: &CurveArgs, c: &Config) -> Result<Output> {
    let model = Model::resolve(&a.model, c)?;
    let distances = match &a.l {
        Some(s) => parse_real_grid(s)?,
        None => c.l.clone().unwrap_or_else(|| (0..=300).map(f64::from).collect()),
    };
    let m_max = a.m_max.or(c.m_max).map(to_u32).transpose()?;
    if m_max == Some(0) {
        return Err(CliError::usage("m-max must be at least 1"));
    }
    let cfg = CurveConfig {
        distances,
        m_max,
        n: model.n,
        beta: model.beta,
        delta: model.delta,
        eta_det: model.eta_det,
        p_dark: model.p_dark,
        ..CurveConfig::reference(model.n)
    };
    let points = generate_curve(&cfg)?;
    let mut out = String::new();
    writeln!(out, "{CURVE_HEADER}").unwrap();
    for p in points {
        let row = [
            g12(p.distance_km),
            g12(p.rate_lower),
            g12(p.rate_optimistic),
            g12(p.rate_bb84),
            g12(p.skc),
            p.m_opt.to_string(),
            g12(p.qber),
            g12(p.p_abort),
        ];
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    Ok(Output { text: out, path: a.output.clone().or_else(|| c.output.clone()), extra: Vec::new() })
}

pub fn cmd_simulate(a: &SimulateArgs, c: &Config, seed: u64) -> Result<Output> {
    let model = Model::resolve(&a.model, c)?;
    let rounds = a.rounds.or(c.rounds).unwrap_or(DEFAULT_ROUNDS);
    if rounds == 0 {
        return Err(CliError::usage("--rounds must be at least 1"));
    }
    let pe_fraction = a.pe_fraction.or(c.pe_fraction).unwrap_or(0.1);
    if !(pe_fraction > 0.0 && pe_fraction < 1.0) {
        return Err(CliError::usage(format!("--pe-fraction {pe_fraction} outside (0, 1)")));
    }
    let bound = a.bound.or(c.bound).unwrap_or(BoundKind::Optimistic);
    let distance_km = distance(&a.l, c)?;
    let m = copies(&a.m, c, &model, distance_km, bound)?;
    let sampling = match a.sampling.or(c.sampling).unwrap_or(Sampling::Full) {
        Sampling::Full => InputSampling::Full,
        Sampling::AnswerOnly => InputSampling::AnswerOnly,
    };
    let config = SessionConfig {
        pe_fraction,
        bound,
        key_bits: a.key_bits.or(c.key_bits).unwrap_or(hmqct_core::protocol::DEFAULT_KEY_BITS),
        sampling,
        ..SessionConfig::new(model.channel(distance_km, m)?, rounds, seed)
    };
    let report = run_session(&config)?;

    let mut text = String::new();
    let mut line = |k: &str, v: String| writeln!(text, "{k} = {v}").unwrap();
    line("n", model.n.to_string());
    line("beta", model.beta.to_string());
    line("delta", g12(model.delta));
    line("p_dark", g12(model.p_dark));
    line("eta_det", g12(model.eta_det));
    line("distance_km", g12(distance_km));
    line("m", m.to_string());
    line("seed", seed.to_string());
    line("bound", bound.name().to_string());
    line("pe_fraction", g12(pe_fraction));
    text.push_str(&summary_lines(&report));

    let mut extra = Vec::new();
    if let Some(path) = a.rounds_csv.clone().or_else(|| c.rounds_csv.clone()) {
        let mut csv = Vec::new();
        report.write_rounds_csv(&mut csv).map_err(|e| CliError::io(&path, e))?;
        extra.push((path, String::from_utf8(csv).expect("ascii csv")));
    }
    Ok(Output { text, path: a.output.clone().or_else(|| c.output.clone()), extra })
}

fn summary_lines(r: &SessionReport) -> String {
    let mut s = String::new();
    let mut line = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
    line("rounds", r.rounds.to_string());
    line("conclusive", r.conclusive_count.to_string());
    line("revealed", r.revealed_count.to_string());
    line("revealed_errors", r.revealed_errors.to_string());
    line("sifted_errors", r.sifted_errors.to_string());
    line("observed_qber", g12(r.observed_qber));
    line("h_min", g12(r.h_min));
    line("key_bits", g12(r.estimated_rate_bits));
    line("key_rate_per_round", g12(r.rate_per_round()));
    line("consumed_key_bits", r.consumed_key_bits.to_string());
    line("no_estimate", r.no_estimate.to_string());
    line("digest", r.digest.clone());
    s
}

pub fn cmd_analytic(a: &AnalyticArgs, c: &Config) -> Result<Output> {
    let model = Model::resolve(&a.model, c)?;
    let bound = a.bound.or(c.bound).unwrap_or(BoundKind::Optimistic);
    let distance_km = distance(&a.l, c)?;
    let m = copies(&a.m, c, &model, distance_km, bound)?;
    let params = model.channel(distance_km, m)?;
    let g = guessing_bound(bound, model.n, m, model.beta, model.delta)?;
    let mut text = String::new();
    let mut line = |k: &str, v: String| writeln!(text, "{k} = {v}").unwrap();
    line("distance_km", g12(distance_km));
    line("m", m.to_string());
    line("bound", bound.name().to_string());
    line("transmittance", g12(params.transmittance()));
    line("detection_probability", g12(params.detection_probability()));
    line("p_abort", g12(p_abort(&params)?));
    line("qber", g12(qber(&params)?));
    line("p_guess", g12(g.p_guess));
    line("h_min", g12(g.h_min));
    line("rate", g12(hmqct_rate(&params, bound)?));
    Ok(Output::stdout(text))
}

pub fn cmd_adversary(a: &AdversaryArgs, c: &Config, seed: u64) -> Result<Output> {
    let n = to_usize(a.n.or(c.n).unwrap_or(4))?;
    let beta = a.beta.or(c.beta).unwrap_or(Beta::QUARTER);
    let budgets = match &a.d {
        Some(s) => parse_int_grid(s)?,
        None => c.d.clone().unwrap_or_else(|| (0..=n as u64).collect()),
    };
    let trials = a.trials.or(c.trials).unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    beta.edges_for(n)?;
    if let Some(&d) = budgets.iter().find(|&&d| d > n as u64) {
        return Err(CliError::Domain(format!("budget d = {d} exceeds n = {n}")));
    }
    let mut out = String::new();
    writeln!(out, "{ADVERSARY_HEADER}").unwrap();
    for d in budgets {
        let d = d as usize;
        let analytic = eps_bkp(n, beta, d)?;
        let (errors, trials) = bkp_error_mc(n, beta, d, trials, seed)?;
        let exact = if n <= MAX_EXACT_N { g12(bkp_exact_error(n, beta, d)?) } else { String::new() };
        writeln!(out, "{d},{},{},{exact}", g12(analytic), g12(errors as f64 / trials as f64)).unwrap();
    }
    Ok(Output::stdout(out))
}

pub fn cmd_codec(cmd: &CodecCommand) -> Result<String> {
    match cmd {
        CodecCommand::Encode { values } => {
            let mut w = codec::BitWriter::new();
            for v in values {
                let z = parse_count(v)?;
                if z == 0 {
                    return Err(CliError::usage("only positive integers can be encoded"));
                }
                codec::encode_into(&mut w, z)?;
            }
            Ok(format!("{}\n{}\n", codec::bit_string(w.as_bits()), hex::encode(w.to_bytes())))
        }
        CodecCommand::Decode { input, hex: is_hex } => {
            let bits = if *is_hex {
                let bytes = hex::decode(input.trim()).map_err(|e| CliError::usage(format!("bad hex: {e}")))?;
                codec::bytes_to_bits(&bytes)
            } else {
                codec::parse_bit_string(input)?
            };
            let values = codec::decode_stream(&bits)?;
            if values.is_empty() {
                return Err(CliError::usage("input holds no encoded integer"));
            }
            Ok(values.iter().map(|v| format!("{v}\n")).collect())
        }
    }
}

pub fn cmd_bounds(a: &BoundsArgs, c: &Config) -> Result<Output> {
    let n = to_usize(a.n.or(c.n).unwrap_or(4))?;
    let beta = a.beta.or(c.beta).unwrap_or(Beta::QUARTER);
    let delta = a.delta.or(c.delta).unwrap_or(0.0);
    let ms = match &a.m {
        Some(s) => parse_int_grid(s)?,
        None => c.m.clone().unwrap_or_else(|| vec![1]),
    };
    if ms.contains(&0) {
        return Err(CliError::usage("m must be at least 1"));
    }
    let mut out = String::new();
    writeln!(out, "{BOUNDS_HEADER}").unwrap();
    for m in ms {
        let m = to_u32(m)?;
        let t4 = pguess_bound_theorem4(n, m, beta, delta)?;
        let cardan = t4.cardan.expect("finite-n bound carries its cubic");
        writeln!(out, "theorem4,{n},{m},{},{},{},{}", g12(cardan.q), g12(cardan.p), g12(t4.p_guess), g12(t4.h_min)).unwrap();
        let opt = pguess_bound_optimistic(n, m, beta, delta)?;
        writeln!(out, "optimistic,{n},{m},,,{},{}", g12(opt.p_guess), g12(opt.h_min)).unwrap();
    }
    Ok(Output::stdout(out))
}
