//! Acceptance gate: one test per numbered criterion, each printing a
//! single pass/fail line (visible with `--nocapture`; a failing criterion
//! also fails the test). Criterion 9 is expected-fragile and reports a
//! warning instead of failing the build.

use cubiclab::harness::{run, Experiment, ExperimentConfig};
use cubiclab::numkernel::PrecisionContext;
use cubiclab::orthopoly::{moments, recurrence_table, ModelPoint};
use cubiclab::painleve1::{
    asymptotic_coefficients, auto_seed, detect_pole, integrate, max_ode_residual,
    Painleve1Solution,
};
use cubiclab::partition::{log_partition, selberg_gue};
use rug::Float;

fn out_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("cubiclab-acceptance").join(tag);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

/// Runs a harness experiment and turns its assertion list into one
/// criterion verdict.
fn run_criterion(criterion: usize, label: &str, cfg: &ExperimentConfig) {
    let report = run(cfg).unwrap_or_else(|e| panic!("criterion {criterion} ({label}): {e}"));
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    println!("criterion {criterion} ({label}): {verdict}");
    if !report.passed() {
        for a in report.assertions.iter().filter(|a| !a.pass) {
            println!("  failed: {} = {} (bound {})", a.name, a.value, a.bound);
        }
        panic!("criterion {criterion} ({label}) failed");
    }
}

#[test]
fn criterion_1_gaussian_oracle() {
    let mut cfg = ExperimentConfig::defaults(Experiment::GaussianOracle);
    cfg.out_dir = out_dir("criterion-1");
    run_criterion(1, "gaussian oracle", &cfg);
}

#[test]
fn criterion_2_string_equation_exactness() {
    let mut cfg = ExperimentConfig::defaults(Experiment::StringResiduals);
    cfg.out_dir = out_dir("criterion-2");
    run_criterion(2, "string-equation exactness", &cfg);
}

#[test]
fn criterion_3_selberg_consistency() {
    let c = PrecisionContext::new(50);
    let mut worst = Float::new(c.prec());
    for n in 1..=10u32 {
        let mp = ModelPoint::new(
            c.czero(),
            n,
            (n as usize).max(1),
            c.c64(0.5, 0.0),
            &c,
        )
        .unwrap();
        let m = moments(&mp).unwrap();
        let table = recurrence_table(&m, &mp).unwrap();
        let log_z = log_partition(&table, n).unwrap();
        let diff = (log_z.re.clone() - selberg_gue(n, &c))
            .abs()
            .max(&log_z.im.clone().abs());
        worst = worst.max(&diff);
    }
    let pass = worst < 1e-20;
    println!(
        "criterion 3 (Selberg consistency): {} (max deviation {:e})",
        if pass { "PASS" } else { "FAIL" },
        worst.to_f64()
    );
    assert!(pass);
}

#[test]
fn criterion_4_toda_identity() {
    let mut cfg = ExperimentConfig::defaults(Experiment::Toda);
    cfg.out_dir = out_dir("criterion-4");
    run_criterion(4, "Toda identity", &cfg);
}

#[test]
fn criterion_5_regular_free_energy() {
    let mut cfg = ExperimentConfig::defaults(Experiment::RegularFreeEnergy);
    cfg.out_dir = out_dir("criterion-5");
    run_criterion(5, "regular free energy", &cfg);
}

#[test]
fn criterion_6_painleve_solver() {
    let c = PrecisionContext::new(80);
    let prec = c.prec();
    // (a) ODE residual below 10^-10 on [-30, first pole) and beyond.
    let seed = auto_seed(&c.f(-30), &c).unwrap();
    let sol = integrate(&seed.state, &c.f(3), &c.f(1e-10f64), &c).unwrap();
    assert!(!sol.poles.is_empty(), "expected the first pole before lambda = 3");
    let residual = max_ode_residual(&sol, &c);
    let res_ok = residual < 1e-10;
    // (b) a1, a2 closed forms.
    let coeffs = asymptotic_coefficients(2, &c);
    let a1_err = Float::with_val(
        prec,
        &coeffs[1] + &(c.f(1) / Float::with_val(prec, c.f(6).sqrt() * 8u32)),
    )
    .abs();
    let a2_err = Float::with_val(prec, &coeffs[2] + &(c.f(49) / c.f(768))).abs();
    let coeff_ok = a1_err < c.eps_guarded() && a2_err < c.eps_guarded();
    // (c) synthetic pole round trip: exact free Laurent model with
    // lambda_j = 3, C = 0, sampled on a geometric ladder toward the pole.
    let pole = c.f(3);
    let c2 = Float::with_val(prec, -pole.clone() / 10u32);
    let c3 = -c.f(1) / 6u32;
    let c6 = pole.clone().square() / 300u32;
    let c7 = pole.clone() / 150u32;
    let mut synth = Painleve1Solution {
        grid: vec![],
        y: vec![],
        yprime: vec![],
        hamiltonian: vec![],
        big_y: vec![],
        big_y_prime: vec![],
        poles: vec![],
        ode_tol: c.f(1e-12f64),
    };
    let mut delta = c.f(-0.09f64);
    while delta < -1e-3 {
        // y = Δ^-2 + c₂Δ² + c₃Δ³ + c₆Δ⁶ + c₇Δ⁷ and its derivative.
        let d2 = delta.clone().square();
        let d3 = Float::with_val(prec, &d2 * &delta);
        let d5 = Float::with_val(prec, &d2 * &d3);
        let d6 = d3.clone().square();
        let d7 = Float::with_val(prec, &d6 * &delta);
        let mut y = d2.clone().recip();
        y += Float::with_val(prec, &c2 * &d2);
        y += Float::with_val(prec, &c3 * &d3);
        y += Float::with_val(prec, &c6 * &d6);
        y += Float::with_val(prec, &c7 * &d7);
        let mut yp = -d3.clone().recip() * 2u32;
        yp += Float::with_val(prec, &c2 * &delta) * 2u32;
        yp += Float::with_val(prec, &c3 * &d2) * 3u32;
        yp += Float::with_val(prec, &c6 * &d5) * 6u32;
        yp += Float::with_val(prec, &c7 * &d6) * 7u32;
        synth.grid.push(Float::with_val(prec, &pole + &delta));
        synth.y.push(y);
        synth.yprime.push(yp);
        synth.hamiltonian.push(c.f(0));
        synth.big_y.push(-delta.clone().abs().ln());
        synth.big_y_prime.push(-delta.clone().recip());
        delta *= c.f(0.93f64);
    }
    let cont = detect_pole(&synth, 1, &c.f(1e-2f64), &c).unwrap();
    let loc_err = (cont.record.location.clone() - &pole).abs();
    let pole_ok = loc_err < 1e-8;
    let pass = res_ok && coeff_ok && pole_ok;
    println!(
        "criterion 6 (Painlevé I solver): {} (residual {:e}, a-coefficient errors {:e}/{:e}, pole error {:e})",
        if pass { "PASS" } else { "FAIL" },
        residual.to_f64(),
        a1_err.to_f64(),
        a2_err.to_f64(),
        loc_err.to_f64()
    );
    assert!(pass);
}

#[test]
fn criterion_7_critical_convergence() {
    let mut cfg = ExperimentConfig::defaults(Experiment::CriticalConvergence);
    cfg.out_dir = out_dir("criterion-7");
    run_criterion(7, "critical convergence", &cfg);
}

#[test]
fn criterion_8_double_scaling_sweep() {
    let mut cfg = ExperimentConfig::defaults(Experiment::DoubleScalingSweep);
    cfg.out_dir = out_dir("criterion-8");
    run_criterion(8, "double-scaling sweep", &cfg);
}

#[test]
fn criterion_9_zeros_versus_poles() {
    // Expected fragile: failures downgrade to a warning, with diagnostics
    // archived in the output directory.
    let mut cfg = ExperimentConfig::defaults(Experiment::Zeros);
    cfg.out_dir = out_dir("criterion-9");
    match run(&cfg) {
        Ok(report) => {
            let fragile_ok =
                report.passed() && report.warnings.iter().all(|w| w.pass);
            if fragile_ok {
                println!("criterion 9 (zeros vs poles): PASS");
            } else {
                println!(
                    "criterion 9 (zeros vs poles): WARN (diagnostics in {})",
                    cfg.out_dir.display()
                );
                for w in report.warnings.iter().chain(report.assertions.iter()) {
                    if !w.pass {
                        println!("  warning: {} = {} ({})", w.name, w.value, w.bound);
                    }
                }
            }
        }
        Err(e) => {
            println!("criterion 9 (zeros vs poles): WARN (run failed: {e})");
        }
    }
}
