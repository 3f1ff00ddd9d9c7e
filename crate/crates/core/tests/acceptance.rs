//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p levycov --test acceptance`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use levycov::adapt::{oracle_start_empirical, oracle_start_interval};
use levycov::cf_kernel::ecf;
use levycov::estimator::{minimax_rate, monotone_envelope, optimal_u};
use levycov::harness::{
    reference_model, run_figure_experiment, run_oracle_start_experiment, run_property_suite, stats, ExperimentSpec,
    Mode, BOUND_CHECK, DECOMPOSITION_CHECK, ENVELOPE_MONOTONE_CHECK, ENVELOPE_OPTIMUM_CHECK, TRUNCATION_CHECK,
};
use levycov::levy_sim::{sample_stable, simulate_increments, stream_rng};
use levycov::{
    lepskii_stop_rule, lepskii_stop_rule_rates, BalancingConfig, BoundParams, CovEstimate, DiagonalFrequency,
    FrequencyGrid, IncrementSample, LevyModel, SimulationConfig,
};

const C12: f64 = 1.0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn reference_grid() -> FrequencyGrid {
    FrequencyGrid::log_spaced(0.1, 50.0, 500).unwrap()
}

fn spec(model: LevyModel, n: usize, compare_n: usize, seeds: std::ops::Range<u64>, mode: Mode) -> ExperimentSpec {
    let selector = BalancingConfig {
        bounds: BoundParams {
            m: model.class_bound(),
            ..BoundParams::default()
        },
        ..BalancingConfig::default()
    };
    ExperimentSpec::new(model, n, compare_n, reference_grid(), seeds.collect(), mode, selector).unwrap()
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let s = spec(reference_model(0.2, 0.1).unwrap(), 1000, 1000, 0..20, Mode::Figure);
    let rec = run_figure_experiment(&s).unwrap();
    let curve = rec.median_curve(1000, 5.0, 30.0);
    let lo = curve.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let hi = curve.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let secs = t0.elapsed().as_secs_f64();
    let passed = !curve.is_empty() && lo >= 0.65 && hi <= 1.35 && secs < 30.0;
    outcome(
        passed,
        format!(
            "median curve over {} grid points in U in [5, 30] spans [{lo:.3}, {hi:.3}], band [0.65, 1.35], {secs:.1} s",
            curve.len()
        ),
    )
}

fn criterion_2() -> Outcome {
    let s = spec(reference_model(0.2, 0.1).unwrap(), 1000, 4000, 0..20, Mode::OracleStart);
    let rec = run_oracle_start_experiment(&s).unwrap();
    let m1 = rec.summary(1000, C12).median_u_start;
    let m4 = rec.summary(4000, C12).median_u_start;
    let ratio = m4 / m1;
    let scaling = (1.6..=2.4).contains(&ratio);

    let gaussian = LevyModel::gaussian([[2.0, 1.0], [1.0, 1.0]]).unwrap();
    let grid = reference_grid();
    let (lo, hi) = oracle_start_interval(&gaussian, 1000, &grid).unwrap();
    let step = grid.local_step(lo, hi);
    let starts: Vec<f64> = (0..20)
        .map(|seed| {
            let sample = simulate_increments(&gaussian, &SimulationConfig::new(1000, seed).unwrap()).unwrap();
            oracle_start_empirical(&sample, &grid, 0.5).unwrap().u_start
        })
        .collect();
    let med = stats::median(&starts);
    let inside = med >= lo - step && med <= hi + step;
    let per_seed = starts.iter().filter(|&&u| u >= lo - step && u <= hi + step).count();
    outcome(
        scaling && inside,
        format!(
            "median start {m1:.2} (n=1000) -> {m4:.2} (n=4000), ratio {ratio:.3} in [1.6, 2.4]: {scaling}; \
             jump-free median start {med:.3} vs bracket [{lo:.3}, {hi:.3}] +/- {step:.3}: {inside} \
             ({per_seed}/20 seeds inside individually)"
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut hits = 0;
    let mut total = 0;
    for (r1, r2) in [(0.2, 0.1), (0.5, 1.5)] {
        let s = spec(reference_model(r1, r2).unwrap(), 1000, 1000, 0..20, Mode::PropertySuite);
        let check = run_property_suite(&s)
            .unwrap()
            .check(DECOMPOSITION_CHECK)
            .unwrap()
            .clone();
        hits += check.hits;
        total += check.total;
    }
    outcome(
        hits == total && total > 0,
        format!("|C_hat - C12| <= |H| + |D| on {hits}/{total} (seed, U) pairs over two jump configurations"),
    )
}

fn criterion_4() -> Outcome {
    let s = spec(
        reference_model(0.2, 0.1).unwrap(),
        1000,
        1000,
        0..200,
        Mode::PropertySuite,
    );
    let report = run_property_suite(&s).unwrap();
    let trunc = report.check(TRUNCATION_CHECK).unwrap();
    let bound = report.check(BOUND_CHECK).unwrap();
    outcome(
        trunc.total > 0 && trunc.frequency() >= 0.95 && bound.frequency() >= 0.95,
        format!(
            "truncated inverse within half of 1/|phi|: {:.4} ({}/{}); s_n/2 <= s~_n <= 3 s_n: {:.4} ({}/{}); floor 0.95",
            trunc.frequency(),
            trunc.hits,
            trunc.total,
            bound.frequency(),
            bound.hits,
            bound.total
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for _ in 0..100 {
        let n = rng.random_range(1..=16);
        let rows: Vec<[f64; 2]> = (0..n)
            .map(|_| [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)])
            .collect();
        let sample = IncrementSample::new(rows.clone()).unwrap();
        for _ in 0..10 {
            let u = rng.random_range(0.0..20.0);
            let freq = if rng.random::<bool>() {
                DiagonalFrequency::diag(u)
            } else {
                DiagonalFrequency::anti(u)
            };
            let sign = if freq == DiagonalFrequency::diag(u) { 1.0 } else { -1.0 };
            let (mut re, mut im) = (0.0, 0.0);
            for x in &rows {
                let angle = u * x[0] + sign * u * x[1];
                re += angle.cos();
                im += angle.sin();
            }
            let got = ecf(&sample, &freq).value;
            let err = (got.re - re / n as f64).abs().max((got.im - im / n as f64).abs());
            worst = worst.max(err);
            checked += 1;
        }
    }
    outcome(
        worst <= 1e-12,
        format!("{checked} evaluations, max abs deviation from direct sum {worst:.2e} (tolerance 1e-12)"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = stream_rng(6, 0);
    let (sigma, dt) = (0.7, 0.25);
    let draws: Vec<f64> = (0..100_000).map(|_| sample_stable(2.0, sigma, dt, &mut rng)).collect();
    let m = stats::mean(&draws);
    let var = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
    let target_var = 2.0 * sigma * sigma * dt;
    let var_ok = (var / target_var - 1.0).abs() <= 0.05;

    let (sigma1, dt1) = (1.3, 0.5);
    let draws: Vec<f64> = (0..200_000)
        .map(|_| sample_stable(1.0, sigma1, dt1, &mut rng))
        .collect();
    let (q1, q3) = (stats::quantile(&draws, 0.25), stats::quantile(&draws, 0.75));
    let target_q = sigma1 * dt1;
    let quart_ok = (q1 / -target_q - 1.0).abs() <= 0.03 && (q3 / target_q - 1.0).abs() <= 0.03;

    let mut slopes = Vec::new();
    for alpha in [0.5, 1.5] {
        let mut abs: Vec<f64> = (0..1_000_000)
            .map(|_| sample_stable(alpha, 1.0, 1.0, &mut rng).abs())
            .collect();
        abs.sort_by(f64::total_cmp);
        let ts: Vec<f64> = (0..=10).map(|i| 10f64.powf(1.0 + i as f64 / 10.0)).collect();
        let pts: Vec<(f64, f64)> = ts
            .iter()
            .map(|&t| {
                let above = abs.len() - abs.partition_point(|&x| x <= t);
                (t.ln(), (above as f64 / abs.len() as f64).ln())
            })
            .collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        slopes.push((alpha, sxy / sxx));
    }
    let tail_ok = slopes.iter().all(|(a, s)| (s + a).abs() <= 0.3);
    outcome(
        var_ok && quart_ok && tail_ok,
        format!(
            "alpha=2 variance ratio {:.4}; alpha=1 quartiles {q1:.4}, {q3:.4} vs +/-{target_q:.4}; \
             tail slopes {}",
            var / target_var,
            slopes
                .iter()
                .map(|(a, s)| format!("alpha={a}: {s:.3}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn synthetic(values: &[f64]) -> Vec<CovEstimate> {
    values
        .iter()
        .enumerate()
        .map(|(i, &value)| CovEstimate {
            u: (i + 1) as f64,
            value,
            phi_diag_mod: 0.5,
            phi_anti_mod: 0.5,
            degenerate: false,
        })
        .collect()
}

/// Estimates, bounds, constant, expected index, expected comparison count.
type TraceCase = (Vec<f64>, Vec<f64>, f64, usize, usize);

fn criterion_7() -> Outcome {
    let alg1: Vec<TraceCase> = vec![
        (vec![1.0; 5], vec![1.0; 5], 1.0, 4, 10),
        (vec![0.0, 0.0, 10.0, 0.0], vec![1.0; 4], 1.0, 1, 2),
        (vec![0.0, 5.0, 0.0], vec![1.0, 1.0, 1.0], 1.0, 0, 1),
        (vec![0.0, 0.5, 1.5, 2.6], vec![1.0, 1.0, 2.0, 2.0], 1.0, 2, 4),
        (vec![0.0, 0.5, 1.5, 2.6], vec![1.0, 1.0, 2.0, 2.0], 1.5, 3, 6),
        (vec![3.0, 2.0, 1.0, 0.0, -1.0], vec![0.5, 1.0, 1.0, 1.5, 2.0], 1.0, 1, 2),
    ];
    // (estimates, rates, A, expected index, expected comparisons)
    let alg2: Vec<TraceCase> = vec![
        (vec![2.0; 4], vec![1.0; 4], 1.0, 0, 3),
        (vec![5.0, 1.0, 1.0, 1.0], vec![1.0; 4], 1.0, 1, 3),
        (vec![0.0, 3.0, 6.0, 9.0], vec![1.0; 4], 1.0, 3, 3),
        (vec![0.0, 1.0, 2.0, 3.0], vec![0.5, 0.5, 1.0, 1.0], 1.0, 1, 5),
        (vec![0.0, 1.0, 2.0, 3.0], vec![0.5, 0.5, 1.0, 1.0], 0.5, 2, 4),
        (vec![1.0, 1.1, 1.2, 4.0, 1.3], vec![0.1, 0.2, 0.3, 0.4, 2.0], 1.0, 3, 7),
    ];
    let mut failures = Vec::new();
    for (i, (est, bounds, c, want, count)) in alg1.iter().enumerate() {
        let r = lepskii_stop_rule(&synthetic(est), bounds, *c).unwrap();
        if r.index != *want || r.trace.len() != *count {
            failures.push(format!("alg1 #{i}: got ({}, {})", r.index, r.trace.len()));
        }
    }
    for (i, (est, rates, a, want, count)) in alg2.iter().enumerate() {
        let r = lepskii_stop_rule_rates(&synthetic(est), rates, *a).unwrap();
        if r.index != *want || r.trace.len() != *count {
            failures.push(format!("alg2 #{i}: got ({}, {})", r.index, r.trace.len()));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} first-rule and {} second-rule families; mismatches: {}",
            alg1.len(),
            alg2.len(),
            if failures.is_empty() {
                "none".to_string()
            } else {
                failures.join("; ")
            }
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut env_ok = true;
    for _ in 0..1000 {
        let len = rng.random_range(1..60);
        let curve: Vec<f64> = (0..len).map(|_| rng.random_range(-10.0..10.0)).collect();
        let env = monotone_envelope(&curve, 0);
        let nondecreasing = env.windows(2).all(|w| w[1] >= w[0]);
        let idempotent = monotone_envelope(&env, 0) == env;
        let dominates = env.iter().zip(&curve).all(|(e, c)| e >= c);
        env_ok &= nondecreasing && idempotent && dominates;
    }

    let s = spec(
        reference_model(0.5, 1.5).unwrap(),
        1000,
        1000,
        0..1,
        Mode::PropertySuite,
    );
    let report = run_property_suite(&s).unwrap();
    let at_un = report.check(ENVELOPE_OPTIMUM_CHECK).unwrap().passed()
        && report.check(ENVELOPE_MONOTONE_CHECK).unwrap().passed();

    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(2..1_000_000usize);
        let r: f64 = rng.random_range(0.0..2.0);
        let m: f64 = rng.random_range(0.1..10.0);
        let nf = n as f64;
        let (rate, u) = if r <= 1.0 {
            ((-0.5 * nf.ln()).exp(), (0.5 * nf.ln()).exp())
        } else {
            let log_nlogn = nf.ln() + nf.ln().ln();
            (
                ((r - 2.0) / 2.0 * log_nlogn).exp(),
                (0.5 * (log_nlogn + (r - 1.0).ln() - m.ln())).exp(),
            )
        };
        worst = worst
            .max((minimax_rate(n, r) / rate - 1.0).abs())
            .max((optimal_u(n, r, m) / u - 1.0).abs());
    }
    let rates_ok = worst <= 1e-12;
    outcome(
        env_ok && at_un && rates_ok,
        format!(
            "1000 random envelopes monotone and idempotent: {env_ok}; s*(U_n) = s(U_n) at r=1.5, n=1000: {at_un}; \
             rate and U_n max relative deviation {worst:.2e}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let t0 = Instant::now();
    let s = spec(reference_model(0.5, 1.5).unwrap(), 1000, 5000, 0..20, Mode::OracleStart);
    let rec = run_oracle_start_experiment(&s).unwrap();
    let small = rec.summary(1000, C12);
    let large = rec.summary(5000, C12);
    let secs = t0.elapsed().as_secs_f64();
    let centered = (small.median_estimate - C12).abs() <= 0.35 && (large.median_estimate - C12).abs() <= 0.35;
    let tighter = large.mad_estimate < small.mad_estimate;
    let bound = small.bound_frequency >= 0.9 && large.bound_frequency >= 0.9;
    outcome(
        centered && tighter && bound && secs < 120.0,
        format!(
            "median estimate {:.3} (n=1000), {:.3} (n=5000); MAD {:.4} -> {:.4}; \
             5 s~_n(U_bal) bound frequency {:.2}, {:.2}; {secs:.1} s",
            small.median_estimate,
            large.median_estimate,
            small.mad_estimate,
            large.mad_estimate,
            small.bound_frequency,
            large.bound_frequency
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("consistency band", criterion_1),
        ("oracle-start scaling", criterion_2),
        ("error decomposition", criterion_3),
        ("truncation interchange", criterion_4),
        ("ECF direct-sum oracle", criterion_5),
        ("stable sampler", criterion_6),
        ("Lepskii traces", criterion_7),
        ("envelope and rates", criterion_8),
        ("adaptive end-to-end", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!(
            "[{}] {} {}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            name,
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
