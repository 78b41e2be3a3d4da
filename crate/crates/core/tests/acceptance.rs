//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs without the libtest harness.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{closed_form_two_way, one_way_rate_oracle, su_mm_fock};
use cvqkd::simulator::{empirical_mutual_information, standard_errors};
use cvqkd::symmetry::{
    check_phase_invariance, check_primitive_commutation, mistag, multicopy_suite,
};
use cvqkd::{
    build_floodlight, build_one_way, build_two_way, empirical_covariance, g_entropy, key_rate, mutual_information,
    noise_threshold, optimize_rate, quadrature_indices, sample_outcomes, su_mm_coherent_state, Bounds,
    ChannelParams, CovarianceMatrix, FloodlightParams, LambdaMatrix, ModeTag, OneWayNormalization,
    OptimizerConfig, Protocol, TwoWayParams,
};
use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
/// Name, check, and runtime budget.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ch(tau: f64, xi: f64) -> ChannelParams {
    ChannelParams::new(tau, xi).expect("valid channel")
}

fn one_way() -> Protocol {
    Protocol::OneWay(OneWayNormalization::default())
}

fn optimized(protocol: Protocol, tau: f64, xi: f64, beta: f64) -> Result<f64, String> {
    let c = ch(tau, xi);
    optimize_rate(protocol, c, c, beta, &Bounds::default(), &OptimizerConfig::default())
        .map(|o| o.report.key_rate)
        .map_err(|e| e.to_string())
}

fn closed_form_equality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (va, vb, t, g) = (
            1.0 + 49.0 * rng.random::<f64>(),
            1.0 + 49.0 * rng.random::<f64>(),
            rng.random::<f64>(),
            1.0 + 9.0 * rng.random::<f64>(),
        );
        let (tau, xi) = (rng.random::<f64>(), 0.5 * rng.random::<f64>());
        let s = build_two_way(&TwoWayParams::new(va, vb, t, g).unwrap(), ch(tau, xi), ch(tau, xi))
            .map_err(|e| e.to_string())?;
        worst = worst.max((s.gamma().matrix() - closed_form_two_way(va, vb, t, g, tau, xi)).amax());
    }
    ensure(worst < 1e-10, format!("max entry difference {worst:e}"))?;
    Ok(format!("max entry difference {worst:.1e} over 100 draws"))
}

fn purity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut chi_worst: f64 = 0.0;
    for (va, vb, t, g) in [(3.0, 3.0, 0.5, 1.2), (40.0, 2.0, 0.9, 5.0), (1.5, 80.0, 0.1, 1.0)] {
        let s = build_two_way(&TwoWayParams::new(va, vb, t, g).unwrap(), ch(1.0, 0.0), ch(1.0, 0.0)).unwrap();
        let nu = s.gamma().symplectic_eigenvalues().map_err(|e| e.to_string())?;
        ensure(nu.len() == 4, "expected 4 eigenvalues")?;
        worst = nu.iter().fold(worst, |w, x| w.max((x - 1.0).abs()));
        chi_worst = chi_worst.max(key_rate(&s, 1.0).unwrap().holevo.abs());
    }
    let fl = build_floodlight(&FloodlightParams::default(), ch(1.0, 0.0), ch(1.0, 0.0)).unwrap();
    let nu = fl.gamma().symplectic_eigenvalues().map_err(|e| e.to_string())?;
    ensure(nu.len() == 6, "expected 6 eigenvalues")?;
    worst = nu.iter().fold(worst, |w, x| w.max((x - 1.0).abs()));
    ensure(worst < 1e-8, format!("|ν − 1| = {worst:e}"))?;
    ensure(chi_worst < 1e-8, format!("χ = {chi_worst:e}"))?;
    Ok(format!("max |ν − 1| {worst:.1e}, max χ {chi_worst:.1e}"))
}

fn one_way_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for tau in [0.2, 0.5, 0.8, 0.95, 1.0] {
        for (xi, vb) in [(0.0, 3.0), (0.05, 10.0), (0.1, 1.5), (0.2, 50.0)] {
            let norm = OneWayNormalization::default();
            let r = key_rate(&build_one_way(vb, ch(tau, xi), norm).unwrap(), 0.95).map_err(|e| e.to_string())?;
            let o = one_way_rate_oracle(vb, tau, xi, 0.95, norm.factor());
            worst = worst.max((r.raw_rate - o.raw_rate).abs());
            points += 1;
        }
    }
    ensure(worst < 1e-8, format!("rate difference {worst:e}"))?;
    Ok(format!("max rate difference {worst:.1e} bits over {points} points"))
}

fn fig4_ordering() -> Outcome {
    let mut detail = Vec::new();
    for tau in [0.95, 0.97, 0.99] {
        let two = optimized(Protocol::TwoWay, tau, 0.0, 1.0)?;
        let one = optimized(one_way(), tau, 0.0, 1.0)?;
        ensure(two >= one, format!("τ={tau}: two-way {two} < one-way {one}"))?;
        if tau == 0.99 {
            ensure(two > one, format!("τ=0.99: no strict advantage ({two} vs {one})"))?;
        }
        detail.push(format!("τ={tau}: {two:.4}>{one:.4}"));
    }
    Ok(detail.join(", "))
}

fn fig5_ordering() -> Outcome {
    let mut detail = Vec::new();
    for tau in [0.3, 0.5, 0.7, 0.9] {
        let two = optimized(Protocol::TwoWay, tau, 0.1, 0.95)?;
        let one = optimized(one_way(), tau, 0.1, 0.95)?;
        ensure(two > one, format!("τ={tau}: two-way {two} <= one-way {one}"))?;
        detail.push(format!("τ={tau}: {two:.4}>{one:.4}"));
    }
    Ok(detail.join(", "))
}

fn fig6_ordering() -> Outcome {
    let mut detail = Vec::new();
    let cfg = OptimizerConfig::default();
    for tau in [0.3, 0.5, 0.7] {
        let two = noise_threshold(Protocol::TwoWay, tau, 1.0, &Bounds::default(), &cfg, 1e-3).map_err(|e| e.to_string())?;
        let one = noise_threshold(one_way(), tau, 1.0, &Bounds::default(), &cfg, 1e-3).map_err(|e| e.to_string())?;
        ensure(
            two.xi_max > one.xi_max,
            format!("τ={tau}: two-way ξ_max {} <= one-way {}", two.xi_max, one.xi_max),
        )?;
        detail.push(format!("τ={tau}: {:.3}>{:.3}", two.xi_max, one.xi_max));
    }
    Ok(detail.join(", "))
}

fn symmetry_suite() -> Outcome {
    let c = ch(0.75, 0.06);
    let states: Vec<CovarianceMatrix> = vec![
        build_two_way(&TwoWayParams::new(9.0, 5.0, 0.4, 1.9).unwrap(), c, c).unwrap().gamma().clone(),
        build_floodlight(&FloodlightParams::default(), c, c).unwrap().gamma().clone(),
    ];
    let thetas: Vec<f64> = (0..16).map(|k| -3.0 + 0.4 * k as f64).collect();
    let (mut phase, mut multi): (f64, f64) = (0.0, 0.0);
    for g in &states {
        let r = check_phase_invariance(g, &thetas).map_err(|e| e.to_string())?;
        ensure(r.max_deviation < 1e-10, format!("phase deviation {:e}", r.max_deviation))?;
        phase = phase.max(r.max_deviation);
        for n in [2, 3] {
            let r = multicopy_suite(g, n, 8, 40 + n as u64).map_err(|e| e.to_string())?;
            ensure(r.max_deviation < 1e-9, format!("n={n} multicopy deviation {:e}", r.max_deviation))?;
            multi = multi.max(r.max_deviation);
        }
        for mode in 0..g.num_modes() {
            let bad = mistag(g, mode).map_err(|e| e.to_string())?;
            ensure(!check_phase_invariance(&bad, &thetas).unwrap().passed, format!("mistag of mode {mode} undetected (phase)"))?;
            ensure(!multicopy_suite(&bad, 2, 8, 3).unwrap().passed, format!("mistag of mode {mode} undetected (multicopy)"))?;
        }
    }
    let mut comm: f64 = 0.0;
    for n in [2, 3] {
        let r = check_primitive_commutation(n, 8, 7).map_err(|e| e.to_string())?;
        ensure(r.squeezer.max_deviation < 1e-10 && r.beamsplitter.max_deviation < 1e-10, format!("{r:?}"))?;
        ensure(!r.wrong_pairing.passed, "wrong pairing commuted")?;
        comm = comm.max(r.squeezer.max_deviation).max(r.beamsplitter.max_deviation);
    }
    Ok(format!("phase {phase:.1e}, multicopy {multi:.1e}, commutators {comm:.1e}, controls fail"))
}

fn monte_carlo() -> Outcome {
    let n = 100_000;
    let c = ch(0.8, 0.05);
    let two_way = build_two_way(&TwoWayParams::new(4.0, 3.0, 0.5, 1.3).unwrap(), c, c).unwrap();
    let states = [
        ("vacuum", CovarianceMatrix::vacuum(1)),
        ("tmss", CovarianceMatrix::tmss(3.0, (ModeTag::U, ModeTag::Ubar)).unwrap()),
        ("two-way", two_way.gamma().clone()),
    ];
    let mut worst_z: f64 = 0.0;
    for (name, g) in &states {
        let reference = g.outcome_covariance();
        let se = standard_errors(&reference, n);
        let emp = empirical_covariance(&sample_outcomes(g, n, 2024).map_err(|e| e.to_string())?).unwrap();
        for i in 0..reference.nrows() {
            for j in 0..reference.ncols() {
                let z = (emp[(i, j)] - reference[(i, j)]).abs() / se[(i, j)];
                ensure(z <= 5.0, format!("{name}: entry ({i},{j}) off by {z:.2} standard errors"))?;
                worst_z = worst_z.max(z);
            }
        }
    }
    let analytic = mutual_information(&two_way).unwrap();
    let samples = sample_outcomes(two_way.gamma(), 1_000_000, 99).unwrap();
    let emp = empirical_mutual_information(&samples, &quadrature_indices(&[1]), &quadrature_indices(&[2, 3]))
        .map_err(|e| e.to_string())?;
    let rel = (emp / analytic - 1.0).abs();
    ensure(rel < 0.01, format!("mutual information off by {:.2}%", 100.0 * rel))?;
    Ok(format!("max {worst_z:.2} s.e., I rel. error {:.3}%", 100.0 * rel))
}

fn su_mm_states() -> Outcome {
    let lam = DMatrix::from_element(1, 1, Complex::new(0.5, 0.0));
    let (fock, psi) = su_mm_fock(&lam, 40);
    let g = su_mm_coherent_state(&LambdaMatrix::new(lam).unwrap(), &[ModeTag::U], &[ModeTag::Ubar])
        .map_err(|e| e.to_string())?;
    let fock_diff = (g.matrix() - fock.covariance(&psi)).amax();
    ensure(fock_diff < 1e-6, format!("Fock difference {fock_diff:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let raw = DMatrix::from_fn(2, 2, |_, _| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let scale = 0.9 * rng.random::<f64>() / raw.singular_values().max();
        let lam = LambdaMatrix::new(raw * Complex::new(scale, 0.0)).unwrap();
        let g = su_mm_coherent_state(&lam, &[ModeTag::U; 2], &[ModeTag::Ubar; 2]).map_err(|e| e.to_string())?;
        worst = g.symplectic_eigenvalues().unwrap().iter().fold(worst, |w, x| w.max((x - 1.0).abs()));
    }
    ensure(worst < 1e-8, format!("m=2 purity |ν − 1| = {worst:e}"))?;
    Ok(format!("Fock difference {fock_diff:.1e}, m=2 max |ν − 1| {worst:.1e}"))
}

fn scalar_checks() -> Outcome {
    ensure(g_entropy(1.0).unwrap() == 0.0, "g(1) != 0")?;
    ensure(g_entropy(3.0).unwrap() == 2.0, "g(3) != 2")?;
    let mut last = g_entropy(1.0).unwrap();
    for k in 1..100 {
        let x = 1.0 + 49.0 * k as f64 / 99.0;
        let v = g_entropy(x).unwrap();
        ensure(v > last, format!("g not increasing at {x}"))?;
        last = v;
    }
    Ok("g(1)=0, g(3)=2, monotone on 100 points".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed-form equality", closed_form_equality, Some(Duration::from_secs(1))),
        ("purity", purity, Some(Duration::from_secs(1))),
        ("one-way oracle", one_way_oracle, Some(Duration::from_secs(1))),
        ("ultralow-loss ordering", fig4_ordering, Some(Duration::from_secs(60))),
        ("noisy-channel ordering", fig5_ordering, Some(Duration::from_secs(120))),
        ("noise-tolerance ordering", fig6_ordering, Some(Duration::from_secs(300))),
        ("symmetry suite", symmetry_suite, Some(Duration::from_secs(10))),
        ("monte-carlo consistency", monte_carlo, Some(Duration::from_secs(30))),
        ("SU(m,m) states", su_mm_states, Some(Duration::from_secs(5))),
        ("scalar checks", scalar_checks, None),
    ];
    let mut failures = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = budget.is_some_and(|b| elapsed > b);
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over runtime budget {:?}", budget.unwrap())),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("{status} [{:>2}] {name}: {detail} ({:.2}s)", k + 1, elapsed.as_secs_f64());
    }
    if failures == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
