//! The release acceptance suite. Each criterion prints one PASS/FAIL line;
//! the process fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::{Complex, SymmetricEigen};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sogt::dynamics::{ctmc_final_states, estimate_rate, generator_rate, generator_semigroup_law};
use sogt::gt::{dominant_rows, row_is_signed, row_len};
use sogt::harness::{
    experiment_large_q, experiment_markov_marginal, experiment_small_q, tv_distance, ExperimentConfig, ExperimentKind,
};
use sogt::kernels::{
    check_desintegration, check_intertwining, gamma, nu_pmf, nu_tail_bound, p_d_closed, p_d_series, pieri_decompose,
    weights_in_box,
};
use sogt::scalar::format_rational;
use sogt::spectra::{m_d, p_d_density, sample_increment, top_spectrum, AntisymmetricMatrix};
use sogt::{count_patterns, weyl_dimension, JumpParam, Row, Scalar, SparseLaw};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn qs(list: &[(i64, i64)]) -> Vec<JumpParam<BigRational>> {
    list.iter().map(|&(n, d)| JumpParam::exact(n, d).unwrap()).collect()
}

/// Rows of length `⌈k/2⌉` with `|entries| ≤ max`, signed last entry for
/// odd `k`.
fn top_rows(k: usize, max: i64) -> Vec<Row> {
    let mut out = Vec::new();
    for row in dominant_rows(row_len(k), max) {
        if row_is_signed(k) && row.last() > 0 {
            out.push(row.flip_last());
        }
        out.push(row);
    }
    out
}

fn dimension_oracle() -> Outcome {
    let mut cases = 0;
    // weyl_dimension starts at SO(3)
    for k in 2..=6 {
        for lambda in top_rows(k, 4) {
            let count = count_patterns(k, &lambda).map_err(|e| e.to_string())?;
            let weyl = weyl_dimension(k + 1, &lambda).map_err(|e| e.to_string())?;
            ensure(count == weyl, || format!("k={k} λ={lambda}: {count} patterns, dimension {weyl}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} top rows, 2 ≤ k ≤ 6, entries ≤ 4"))
}

fn jump_law_mass() -> Outcome {
    let threshold = BigRational::new(1.into(), 1_000_000_000_000i64.into());
    let mut worst = BigRational::zero();
    for d in 3..=5 {
        for q in qs(&[(1, 3), (1, 2), (2, 3)]) {
            // smallest M whose certified tail is below 10^-12
            let mut big_m = 0;
            while nu_tail_bound(&q, d, big_m) >= threshold {
                big_m += 1;
            }
            let mass = (0..=big_m).fold(BigRational::zero(), |acc, m| acc + nu_pmf(&q, d, m).unwrap());
            let deficit = BigRational::one() - mass;
            let bound = nu_tail_bound(&q, d, big_m);
            ensure(deficit >= BigRational::zero() && deficit <= bound, || {
                format!("d={d} q={}: deficit {} outside [0, {}]", format_rational(q.q()), deficit.to_f64(), bound.to_f64())
            })?;
            if deficit > worst {
                worst = deficit;
            }
        }
    }
    Ok(format!("exact deficit ≤ certified tail < 1e-12 (largest {:.2e})", worst.to_f64()))
}

fn pieri_consistency() -> Outcome {
    let mut cases = 0;
    for d in 3..=5 {
        for lambda in weights_in_box(d, 3) {
            for m in 0..=6 {
                let decomposition = pieri_decompose(d, &lambda, m).map_err(|e| e.to_string())?;
                let lhs = decomposition.iter().fold(BigUint::zero(), |acc, (beta, mult)| {
                    acc + BigUint::from(*mult) * weyl_dimension(d, beta).unwrap()
                });
                let rhs = weyl_dimension(d, &lambda).unwrap() * weyl_dimension(d, &gamma(d, m)).unwrap();
                ensure(lhs == rhs, || format!("d={d} λ={lambda} m={m}: {lhs} != {rhs}"))?;
                cases += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let params = qs(&[(1, 3), (1, 2), (2, 3)]);
    for _ in 0..50 {
        let d = rng.random_range(3..=5);
        let q = &params[rng.random_range(0..3)];
        let ws = weights_in_box(d, 3);
        let lambda = &ws[rng.random_range(0..ws.len())];
        let beta = &ws[rng.random_range(0..ws.len())];
        let m_max = rng.random_range(0..12);
        let closed: BigRational = p_d_closed(q, d, lambda, beta).unwrap();
        let (series, tail): (BigRational, BigRational) = p_d_series(q, d, lambda, beta, m_max).unwrap();
        let gap = closed.clone() - series;
        ensure(gap >= BigRational::zero() && gap <= tail, || {
            format!("d={d} λ={lambda} β={beta} M={m_max}: closed form and series differ by {}", gap.to_f64())
        })?;
    }
    Ok(format!("{cases} tensor products exact; closed form within series tail on 50 instances"))
}

fn desintegration() -> Outcome {
    let mut total = 0;
    for q in qs(&[(1, 3), (1, 2), (2, 3)]) {
        let rep = check_desintegration(&q, 6).map_err(|e| e.to_string())?;
        ensure(rep.passed(), || format!("q={}: {} violations, first {:?}", rep.q, rep.violations.len(), rep.violations.first()))?;
        total += rep.checked.iter().sum::<usize>();
    }
    Ok(format!("{total} tuples exact, entries ≤ 6"))
}

fn intertwining() -> Outcome {
    let mut cases = 0;
    for q in qs(&[(1, 3), (1, 2)]) {
        for (k, bound) in [(2, 4), (3, 4), (4, 3)] {
            let rep = check_intertwining(&q, k, bound).map_err(|e| e.to_string())?;
            ensure(rep.passed(), || format!("k={k} q={}: max discrepancy {}", rep.q, rep.max_discrepancy))?;
            cases += rep.cases;
        }
    }
    Ok(format!("max discrepancy 0/1 over {cases} entries"))
}

fn markov_marginal() -> Outcome {
    let mut parts = Vec::new();
    for (k, n, threshold) in [(1, 1, 0.01), (2, 2, 0.02), (3, 1, 0.02)] {
        let mut cfg = ExperimentConfig::new(ExperimentKind::MarkovMarginal);
        cfg.k = k;
        cfg.horizon = n;
        cfg.q = "1/2".into();
        cfg.n_paths = 100_000;
        cfg.seed = 7;
        cfg.thresholds.tv = Some(threshold);
        let out = experiment_markov_marginal(&cfg).map_err(|e| e.to_string())?;
        let row = &out.reports[0];
        ensure(row.pass, || row.to_string())?;
        parts.push(format!("({k},{n}) {:.4} [pair {:.4}]", row.value, out.reports[1].value));
    }
    Ok(format!("TV {}", parts.join(", ")))
}

fn continuous_time() -> Outcome {
    let ys = ctmc_final_states(2, 1.0, 100_000, 11).map_err(|e| e.to_string())?;
    let empirical = SparseLaw::empirical(ys.iter().map(|p| p.top().clone()));
    let exact = generator_semigroup_law(2, 1.0, 30, 1e-9).map_err(|e| e.to_string())?;
    let tv = tv_distance(&empirical, &exact);
    ensure(tv.value < 0.02, || format!("TV(Y^2(1), semigroup) = {:.4}", tv.value))?;
    let wall = generator_rate(1, &Row::from([0]), &Row::from([1])).unwrap().to_f64();
    let est = estimate_rate(1, &Row::from([0]), &Row::from([1]), 20.0, 5_000, 12).map_err(|e| e.to_string())?;
    let rel = (est.rate / wall - 1.0).abs();
    ensure(rel < 0.05, || format!("wall rate {:.4} vs {wall}", est.rate))?;
    Ok(format!("TV {:.4}; wall rate {:.4} vs {wall} ({} jumps)", tv.value, est.rate, est.transitions))
}

fn small_q() -> Outcome {
    let mut parts = Vec::new();
    for k in [1, 2] {
        let mut cfg = ExperimentConfig::new(ExperimentKind::SmallQ);
        cfg.k = k;
        cfg.scale = 200;
        cfg.t_max = 1.0;
        cfg.n_paths = 10_000;
        cfg.seed = 7;
        cfg.radius = 20;
        cfg.trend = Some([50, 400]);
        cfg.thresholds.tv = Some(0.06);
        cfg.thresholds.semigroup_tv = Some(0.06);
        let out = experiment_small_q(&cfg).map_err(|e| e.to_string())?;
        for r in &out.reports {
            ensure(r.pass, || format!("k={k}: {r}"))?;
        }
        parts.push(format!(
            "k={k} TV {:.4}, trend {:.4} -> {:.4}",
            out.reports[0].value, out.reports[2].threshold, out.reports[2].value
        ));
    }
    Ok(parts.join("; "))
}

fn large_q() -> Outcome {
    let mut parts = Vec::new();
    for k in [2, 3] {
        let mut cfg = ExperimentConfig::new(ExperimentKind::LargeQ);
        cfg.k = k;
        cfg.scale = 100;
        cfg.horizon = 2;
        cfg.n_paths = 10_000;
        cfg.seed = 7;
        cfg.trend = Some([25, 200]);
        cfg.thresholds.ks = Some(0.05);
        cfg.thresholds.joint_ks = Some(0.05);
        let out = experiment_large_q(&cfg).map_err(|e| e.to_string())?;
        for r in &out.reports {
            ensure(r.pass, || format!("k={k}: {r}"))?;
        }
        let ks: Vec<String> = out.reports.iter().map(|r| format!("{:.4}", r.value)).collect();
        parts.push(format!("k={k} KS [{}]", ks.join(", ")));
    }
    Ok(parts.join("; "))
}

/// Monte Carlo estimate of `m_d` that checks interlacing directly.
fn m_d_monte_carlo(d: usize, x: &[f64], y: &[f64], samples: usize, rng: &mut impl Rng) -> f64 {
    let r = d / 2;
    let n = if d % 2 == 1 { r } else { r - 1 };
    let top = x[0].min(y[0]);
    let below = |z: &[f64], w: &[f64]| {
        z.iter().enumerate().all(|(i, &zi)| zi <= w[i] && zi >= w.get(i + 1).copied().unwrap_or(0.0))
    };
    let mut acc = 0.0;
    let mut z = vec![0.0; n];
    for _ in 0..samples {
        for v in z.iter_mut() {
            *v = rng.random::<f64>() * top;
        }
        if below(&z, x) && below(&z, y) {
            acc += (-(0..n).map(|i| x[i] + y[i] - 2.0 * z[i]).sum::<f64>()).exp();
        }
    }
    let mut est = acc / samples as f64 * top.powi(n as i32);
    if d % 2 == 0 {
        est *= (-(x[r - 1] - y[r - 1]).abs()).exp() + (-(x[r - 1] + y[r - 1])).exp();
    }
    est
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn spectra_internals() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_mc: f64 = 0.0;
    let mut checked = 0;
    while checked < 9 {
        let d = 3 + checked % 3;
        let mut x: Vec<f64> = (0..d / 2).map(|_| rng.random::<f64>() * 3.0).collect();
        x.sort_by(|a, b| b.total_cmp(a));
        let mut y: Vec<f64> = x.iter().map(|v| (v + 0.5 * (rng.random::<f64>() - 0.5)).abs()).collect();
        y.sort_by(|a, b| b.total_cmp(a));
        let exact = m_d(d, &x, &y).unwrap();
        if exact < 1e-3 {
            continue;
        }
        let rel = (m_d_monte_carlo(d, &x, &y, 1_000_000, &mut rng) / exact - 1.0).abs();
        ensure(rel < 1e-2, || format!("m_{d}({x:?}, {y:?}): relative error {rel:.4}"))?;
        worst_mc = worst_mc.max(rel);
        checked += 1;
    }
    let p3 = |y: f64| p_d_density(3, &[1.0], &[y]).unwrap();
    let mass = simpson(p3, 0.0, 1.0, 200) + simpson(p3, 1.0, 60.0, 6000);
    ensure((mass - 1.0).abs() < 1e-3, || format!("∫p_3((1), y) dy = {mass}"))?;
    let mut worst_eig: f64 = 0.0;
    for t in 0..100 {
        let d = 2 + t % 7;
        let mut a = AntisymmetricMatrix::zeros(d);
        for _ in 0..1 + t % 4 {
            a.add_assign(&sample_increment(d, &mut rng));
        }
        let herm = a.to_dense().map(|v| Complex::new(0.0, v));
        let mut ev: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        ev.sort_by(|p, q| q.total_cmp(p));
        for (i, l) in top_spectrum(&a).unwrap().iter().enumerate() {
            worst_eig = worst_eig.max((l - ev[i]).abs());
        }
    }
    ensure(worst_eig < 1e-10, || format!("eigenvalue mismatch {worst_eig:e}"))?;
    Ok(format!(
        "m_d Monte Carlo rel. error ≤ {worst_mc:.4}; ∫p_3 = {mass:.8}; eigensolver diff {worst_eig:.1e}"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 dimension oracle", dimension_oracle),
        ("2 jump law mass", jump_law_mass),
        ("3 tensor product consistency", pieri_consistency),
        ("4 one-particle identities", desintegration),
        ("5 intertwining", intertwining),
        ("6 top-row Markov marginal", markov_marginal),
        ("7 continuous-time generator", continuous_time),
        ("8 small-q limit", small_q),
        ("9 large-q limit", large_q),
        ("10 spectra internals", spectra_internals),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
