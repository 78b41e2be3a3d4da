//! `cvqkd`: key rates, noise thresholds, covariance-symmetry checks and
//! heterodyne simulation from the command line. All output is CSV on stdout.
//!
//! Exit codes: 0 success, 1 a check failed, 2 invalid input.

mod num;

use std::f64::consts::TAU;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cvqkd::symmetry::{check_block_structure, check_phase_invariance, check_primitive_commutation, mistag, multicopy_suite, SymmetryReport};
use cvqkd::{
    build_floodlight, noise_threshold, optimize_rate, sample_outcomes, run_test, Bounds, ChannelParams,
    FloodlightParams, OneWayNormalization, OptimizerConfig, Optimum, Protocol, RunRecord, TestRegion, TwoWayParams,
};

use num::g12;

#[derive(Parser)]
#[command(name = "cvqkd", version, about = "Continuous-variable QKD key rates over thermal-loss channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimized key rate at one channel point.
    Rate(RateArgs),
    /// Optimized key rate over a range of transmittances.
    Sweep(SweepArgs),
    /// Largest excess noise with a positive optimized rate.
    Threshold(ThresholdArgs),
    /// Sample heterodyne outcomes and run the covariance acceptance test.
    Simulate(SimulateArgs),
    /// Check the U(n) covariance of a protocol state.
    SymmetryCheck(SymmetryArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    TwoWay,
    OneWay,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormArg {
    TwoWayReduction,
    PerUse,
}

impl From<NormArg> for OneWayNormalization {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::TwoWayReduction => OneWayNormalization::TwoWayReduction,
            NormArg::PerUse => OneWayNormalization::PerChannelUse,
        }
    }
}

#[derive(Args, Clone)]
struct OptimizerArgs {
    /// Reconciliation efficiency.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Fix Alice's modulation variance instead of optimizing it.
    #[arg(long)]
    va: Option<f64>,
    /// Fix Bob's modulation variance instead of optimizing it.
    #[arg(long)]
    vb: Option<f64>,
    /// Fix Bob's beamsplitter transmittance.
    #[arg(long = "T", id = "T")]
    t: Option<f64>,
    /// Fix Alice's amplifier gain.
    #[arg(long)]
    g: Option<f64>,
    #[arg(long, value_enum, default_value_t = NormArg::TwoWayReduction)]
    one_way_norm: NormArg,
    /// Optimizer seed.
    #[arg(long, default_value_t = OptimizerConfig::default().seed)]
    seed: u64,
    /// Maximum number of rate evaluations per optimization.
    #[arg(long, default_value_t = OptimizerConfig::default().budget)]
    budget: usize,
    /// Upper limit of the modulation variances.
    #[arg(long, default_value_t = 100.0)]
    v_max: f64,
    /// Upper limit of the amplifier gain.
    #[arg(long, default_value_t = 20.0)]
    g_max: f64,
}

impl OptimizerArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            budget: self.budget,
            seed: self.seed,
            ..OptimizerConfig::default()
        }
    }

    fn one_way(&self) -> Protocol {
        Protocol::OneWay(self.one_way_norm.into())
    }

    fn protocol(&self, p: ProtocolArg) -> Protocol {
        match p {
            ProtocolArg::TwoWay => Protocol::TwoWay,
            ProtocolArg::OneWay => self.one_way(),
        }
    }

    /// Bounds for `protocol`; fixing a two-way-only parameter of the
    /// one-way protocol is an error rather than a silent no-op.
    fn bounds(&self, protocol: Protocol) -> Result<Bounds, Failure> {
        if matches!(protocol, Protocol::OneWay(_)) && (self.va.is_some() || self.t.is_some() || self.g.is_some()) {
            return Err(Failure::Usage("--va, --T and --g apply to the two-way protocol only".into()));
        }
        let mut b = Bounds::with_limits(self.v_max, self.g_max);
        if let Some(v) = self.va {
            b = b.fix_va(v);
        }
        if let Some(v) = self.vb {
            b = b.fix_vb(v);
        }
        if let Some(t) = self.t {
            b = b.fix_t(t);
        }
        if let Some(g) = self.g {
            b = b.fix_g(g);
        }
        b.validate()?;
        Ok(b)
    }
}

#[derive(Args)]
struct RateArgs {
    #[arg(long, value_enum, default_value_t = ProtocolArg::TwoWay)]
    protocol: ProtocolArg,
    /// Channel transmittance, used in both directions.
    #[arg(long)]
    tau: f64,
    /// Channel excess noise, used in both directions.
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
    #[command(flatten)]
    opt: OptimizerArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = ProtocolArg::TwoWay)]
    protocol: ProtocolArg,
    /// Transmittance grid `start:stop:step`, both ends inclusive.
    #[arg(long)]
    tau_range: String,
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
    /// Report the two-way and one-way rates side by side.
    #[arg(long)]
    compare: bool,
    #[command(flatten)]
    opt: OptimizerArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ThresholdProtocol {
    Both,
    TwoWay,
    OneWay,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long, value_enum, default_value_t = ThresholdProtocol::Both)]
    protocol: ThresholdProtocol,
    #[arg(long)]
    tau_range: String,
    /// Absolute tolerance on the noise threshold.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[command(flatten)]
    opt: OptimizerArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = ProtocolArg::TwoWay)]
    protocol: ProtocolArg,
    #[arg(long)]
    tau: f64,
    /// Excess noise the test region is built for.
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
    /// Excess noise the outcomes are actually drawn with; defaults to `--xi`.
    #[arg(long)]
    true_xi: Option<f64>,
    #[arg(long, default_value_t = 5.0)]
    va: f64,
    #[arg(long, default_value_t = 5.0)]
    vb: f64,
    #[arg(long = "T", id = "T", default_value_t = 0.5)]
    t: f64,
    #[arg(long, default_value_t = 1.2)]
    g: f64,
    #[arg(long, value_enum, default_value_t = NormArg::TwoWayReduction)]
    one_way_norm: NormArg,
    #[arg(long, default_value_t = 100_000)]
    rounds: usize,
    /// Seed of the first run; run `k` uses `seed + k`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    runs: u64,
    /// Frobenius radius of the test region; calibrated to the round count
    /// when omitted.
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SymmetryProtocol {
    TwoWay,
    Floodlight,
}

#[derive(Args)]
struct SymmetryArgs {
    #[arg(long, value_enum, default_value_t = SymmetryProtocol::TwoWay)]
    protocol: SymmetryProtocol,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=3))]
    copies: u32,
    /// Random group elements per check.
    #[arg(long, default_value_t = 16)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.8)]
    tau: f64,
    #[arg(long, default_value_t = 0.05)]
    xi: f64,
    /// Flip the tag of this mode before checking; the checks must then fail.
    #[arg(long, hide = true)]
    inject_mistag: Option<usize>,
}

enum Failure {
    /// Invalid input; exit code 2.
    Usage(String),
    /// A check ran and did not pass; exit code 1.
    Check,
}

impl From<cvqkd::Error> for Failure {
    fn from(e: cvqkd::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rate(a) => rate(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Threshold(a) => threshold(&a),
        Command::Simulate(a) => simulate(&a),
        Command::SymmetryCheck(a) => symmetry_check(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

const RATE_HEADER: &str = "tau,xi,beta,K,I,chi,va,vb,T,g";

fn rate_row(tau: f64, xi: f64, beta: f64, o: &Optimum) -> String {
    let p = &o.params;
    let r = &o.report;
    [tau, xi, beta, r.key_rate, r.mutual_info, r.holevo, p.va, p.vb, p.t, p.g]
        .map(g12)
        .join(",")
}

fn optimum(protocol: Protocol, tau: f64, xi: f64, opt: &OptimizerArgs) -> Result<Optimum, Failure> {
    let bounds = opt.bounds(protocol)?;
    let ch = ChannelParams::new(tau, xi)?;
    let o = optimize_rate(protocol, ch, ch, opt.beta, &bounds, &opt.config())?;
    if o.budget_exhausted {
        eprintln!("warning: evaluation budget exhausted at tau={}", g12(tau));
    }
    Ok(o)
}

fn rate(a: &RateArgs) -> Result<(), Failure> {
    let o = optimum(a.opt.protocol(a.protocol), a.tau, a.xi, &a.opt)?;
    println!("{RATE_HEADER}");
    println!("{}", rate_row(a.tau, a.xi, a.opt.beta, &o));
    Ok(())
}

fn sweep(a: &SweepArgs) -> Result<(), Failure> {
    let taus = parse_range(&a.tau_range)?;
    if a.compare {
        println!("tau,xi,beta,K_two_way,K_one_way");
        for tau in taus {
            let two = optimum(Protocol::TwoWay, tau, a.xi, &a.opt)?;
            let one = optimum(a.opt.one_way(), tau, a.xi, &one_way_only(&a.opt))?;
            println!(
                "{}",
                [tau, a.xi, a.opt.beta, two.report.key_rate, one.report.key_rate].map(g12).join(",")
            );
        }
    } else {
        println!("{RATE_HEADER}");
        for tau in taus {
            let o = optimum(a.opt.protocol(a.protocol), tau, a.xi, &a.opt)?;
            println!("{}", rate_row(tau, a.xi, a.opt.beta, &o));
        }
    }
    Ok(())
}

/// Drops the two-way-only fixings so a comparison run can reuse them.
fn one_way_only(opt: &OptimizerArgs) -> OptimizerArgs {
    OptimizerArgs {
        va: None,
        t: None,
        g: None,
        ..opt.clone()
    }
}

fn threshold(a: &ThresholdArgs) -> Result<(), Failure> {
    let taus = parse_range(&a.tau_range)?;
    let config = a.opt.config();
    let run = |protocol: Protocol, opt: &OptimizerArgs, tau: f64| -> Result<String, Failure> {
        let th = noise_threshold(protocol, tau, opt.beta, &opt.bounds(protocol)?, &config, a.tol)?;
        Ok(g12(th.xi_max))
    };
    println!("tau,xi_max_two_way,xi_max_one_way");
    for tau in taus {
        let two = match a.protocol {
            ThresholdProtocol::OneWay => String::new(),
            _ => run(Protocol::TwoWay, &a.opt, tau)?,
        };
        let one = match a.protocol {
            ThresholdProtocol::TwoWay => String::new(),
            ThresholdProtocol::OneWay => run(a.opt.one_way(), &a.opt, tau)?,
            ThresholdProtocol::Both => run(a.opt.one_way(), &one_way_only(&a.opt), tau)?,
        };
        println!("{},{two},{one}", g12(tau));
    }
    Ok(())
}

fn simulate(a: &SimulateArgs) -> Result<(), Failure> {
    if a.runs == 0 {
        return Err(Failure::Usage("--runs must be at least 1".into()));
    }
    let params = TwoWayParams::new(a.va, a.vb, a.t, a.g)?;
    let protocol = match a.protocol {
        ProtocolArg::TwoWay => Protocol::TwoWay,
        ProtocolArg::OneWay => Protocol::OneWay(a.one_way_norm.into()),
    };
    let state_at = |xi: f64| -> Result<_, Failure> {
        let ch = ChannelParams::new(a.tau, xi)?;
        Ok(protocol.build(&params, ch, ch)?)
    };
    let assumed = state_at(a.xi)?;
    let actual = state_at(a.true_xi.unwrap_or(a.xi))?;
    let reference = assumed.gamma().outcome_covariance();
    let region = match a.radius {
        Some(r) => TestRegion::new(reference, r)?,
        None => TestRegion::calibrated(reference, a.rounds)?,
    };

    println!("{}", RunRecord::CSV_HEADER);
    let mut all_passed = true;
    for k in 0..a.runs {
        let seed = a.seed.wrapping_add(k);
        let samples = sample_outcomes(actual.gamma(), a.rounds, seed)?;
        let rec = run_test(&samples, &region, seed)?;
        all_passed &= rec.test_passed;
        println!("{}", rec.csv_row());
    }
    if all_passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn symmetry_check(a: &SymmetryArgs) -> Result<(), Failure> {
    let ch = ChannelParams::new(a.tau, a.xi)?;
    let state = match a.protocol {
        SymmetryProtocol::TwoWay => {
            let p = TwoWayParams::new(6.0, 4.0, 0.4, 1.7)?;
            cvqkd::build_two_way(&p, ch, ch)?
        }
        SymmetryProtocol::Floodlight => build_floodlight(&FloodlightParams::default(), ch, ch)?,
    };
    let mut gamma = state.gamma().clone();
    if let Some(mode) = a.inject_mistag {
        gamma = mistag(&gamma, mode)?;
    }
    let copies = a.copies as usize;
    let n_theta = a.samples.max(1);
    let thetas: Vec<f64> = (0..n_theta).map(|k| TAU * (k as f64 + 0.5) / n_theta as f64).collect();
    let comm = check_primitive_commutation(copies, a.samples, a.seed)?;

    // The wrong-pairing control passes when its commutator does not vanish.
    let rows: Vec<(SymmetryReport, bool)> = vec![
        keep(check_phase_invariance(&gamma, &thetas)?),
        keep(multicopy_suite(&gamma, copies, a.samples, a.seed)?),
        keep(check_block_structure(&gamma)),
        keep(comm.squeezer),
        keep(comm.beamsplitter),
        (comm.wrong_pairing.clone(), !comm.wrong_pairing.passed),
    ];

    println!("check,copies,samples,seed,max_deviation,tolerance,pass");
    for (r, pass) in &rows {
        println!(
            "{},{},{},{},{},{},{}",
            r.check,
            copies,
            r.samples,
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            g12(r.max_deviation),
            g12(r.tolerance),
            pass
        );
    }
    if rows.iter().all(|(_, pass)| *pass) {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn keep(r: SymmetryReport) -> (SymmetryReport, bool) {
    let pass = r.passed;
    (r, pass)
}

/// Parses `start:stop:step` into an inclusive grid. A step larger than the
/// span gives the single point `start`.
fn parse_range(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Usage(format!("invalid range `{s}`; expected start:stop:step"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0) {
        return Err(bad());
    }
    if start > stop {
        return Err(Failure::Usage(format!("empty range `{s}`")));
    }
    // Slack so that e.g. 0.1:0.3:0.1 includes 0.3.
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}
