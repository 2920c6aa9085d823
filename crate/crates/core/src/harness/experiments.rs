//! Simulation against exact laws, and the exhaustive identity checks, as
//! configurable experiments.

use num_rational::BigRational;
use serde::Serialize;

use crate::dynamics::{ctmc_final_states, generator_semigroup_law, map_paths, DiscreteModel};
use crate::error::Result;
use crate::gt::{Pattern, Row};
use crate::harness::config::{ExperimentConfig, ExperimentKind};
use crate::harness::report::{ComparisonReport, ExperimentOutcome, Histogram, Statistic};
use crate::harness::stats::{ks_joint, ks_threshold, ks_two_sample, tv_distance, tv_noise_threshold};
use crate::kernels::{check_desintegration, check_intertwining, n_step_law, n_step_pair_law, WPlusPair};
use crate::law::SparseLaw;
use crate::scalar::{parse_rational, ratio, JumpParam, QValue, Scalar};
use crate::spectra::simulate_eigen_chain;

/// Runs the configured experiment and, when `output` is set, writes its
/// files there.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let outcome = match cfg.experiment {
        ExperimentKind::MarkovMarginal => experiment_markov_marginal(cfg)?,
        ExperimentKind::Intertwine => experiment_intertwine(cfg)?,
        ExperimentKind::Desintegration => experiment_desintegration(cfg)?,
        ExperimentKind::SmallQ => experiment_small_q(cfg)?,
        ExperimentKind::LargeQ => experiment_large_q(cfg)?,
        ExperimentKind::KernelDump => experiment_kernel_dump(cfg)?,
    };
    if let Some(dir) = &cfg.output {
        outcome.write_to(dir)?;
    }
    Ok(outcome)
}

/// Seed of an auxiliary simulation, decorrelated from the main one.
fn sub_seed(seed: u64, tag: u64) -> u64 {
    seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn label<K: Serialize>(state: &K) -> String {
    serde_json::to_string(state).unwrap_or_default()
}

fn histogram<K: Ord + Clone + Serialize>(name: &str, laws: &[(&str, &SparseLaw<K, f64>)]) -> Histogram {
    let mut states: Vec<&K> = laws.iter().flat_map(|(_, l)| l.iter().map(|(k, _)| k)).collect();
    states.sort();
    states.dedup();
    Histogram {
        name: name.into(),
        columns: laws.iter().map(|(c, _)| c.to_string()).collect(),
        rows: states
            .into_iter()
            .map(|s| (label(s), laws.iter().map(|(_, l)| l.get(s)).collect()))
            .collect(),
    }
}

fn tv_report<K: Ord + Clone>(
    name: &str,
    empirical: &SparseLaw<K, f64>,
    reference: &SparseLaw<K, f64>,
    threshold: Option<f64>,
    samples: &[usize],
) -> ComparisonReport {
    let tv = tv_distance(empirical, reference);
    let n = samples.iter().copied().min().unwrap_or(1);
    let threshold = threshold.unwrap_or_else(|| tv_noise_threshold(empirical.len().max(reference.len()), n));
    ComparisonReport::new(name, Statistic::Tv, tv.value, threshold)
        .with_bias(tv.bias)
        .with_samples(samples)
}

/// The top row at time `n` and, for the pair law, row `k` at time
/// `n - 1/2` without its wall entry.
fn simulate_pairs(cfg: &ExperimentConfig, q: &QValue) -> Result<Vec<WPlusPair>> {
    let (k, n) = (cfg.k, cfg.horizon);
    let model = DiscreteModel::new(q, k, cfg.sampler)?;
    Ok(map_paths(cfg.n_paths, cfg.seed, |rng| {
        let mut pair = WPlusPair::new(Row::default(), Row::default());
        model.run(rng, n, |t, x| {
            if t == 2 * n - 1 {
                pair.z = Row(x.top()[..k / 2].to_vec());
            } else if t == 2 * n {
                pair.y = x.top().clone();
            }
        });
        pair
    }))
}

/// Empirical law of `X^k(n)` against the `n`-step law of `R_k`, and of the
/// pair `(Z^k(n), Y^k(n))` against `n - 1` steps of `R_k` followed by one of
/// `S_k`.
pub fn experiment_markov_marginal(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let q = cfg.q_value()?;
    let jp = JumpParam::new(q.as_f64())?;
    let samples = simulate_pairs(cfg, &q)?;
    let exact = n_step_law::<f64>(&jp, cfg.k, cfg.horizon, cfg.radius, 1.0)?;
    let exact_pair = n_step_pair_law::<f64>(&jp, cfg.k, cfg.horizon, cfg.radius, 1.0)?;
    let rows = SparseLaw::empirical(samples.iter().map(|p| p.y.clone()));
    let pairs = SparseLaw::empirical(samples.iter().cloned());
    let n = [cfg.n_paths];
    let mut out = ExperimentOutcome::new(cfg);
    out.reports.push(
        tv_report(&format!("X^{}({}) vs R_{}^{}", cfg.k, cfg.horizon, cfg.k, cfg.horizon), &rows, &exact, cfg.thresholds.tv, &n)
            .with_deficits(&[*exact.tail_deficit()], cfg.tolerance),
    );
    out.reports.push(
        tv_report(&format!("(Z,Y)^{}({}) vs pair law", cfg.k, cfg.horizon), &pairs, &exact_pair, cfg.thresholds.pair_tv, &n)
            .with_deficits(&[*exact_pair.tail_deficit()], cfg.tolerance),
    );
    out.histograms.push(histogram("top_row", &[("empirical", &rows), ("exact", &exact)]));
    Ok(out)
}

struct SmallQRun {
    discrete: SparseLaw<Pattern, f64>,
    continuous: SparseLaw<Pattern, f64>,
    semigroup: SparseLaw<Row, f64>,
}

fn small_q_run(cfg: &ExperimentConfig, big_n: u64) -> Result<SmallQRun> {
    let steps = (big_n as f64 * cfg.t_max).floor() as usize;
    let q = QValue::Exact(ratio(1, big_n as i64));
    let model = DiscreteModel::new(&q, cfg.k, cfg.sampler)?;
    let xs = map_paths(cfg.n_paths, cfg.seed, |rng| model.sample_at(rng, steps));
    let ys = ctmc_final_states(cfg.k, cfg.t_max, cfg.n_paths, sub_seed(cfg.seed, 1))?;
    Ok(SmallQRun {
        discrete: SparseLaw::empirical(xs),
        continuous: SparseLaw::empirical(ys),
        semigroup: generator_semigroup_law(cfg.k, cfg.t_max, cfg.radius, 1.0)?,
    })
}

fn top_rows(law: &SparseLaw<Pattern, f64>) -> SparseLaw<Row, f64> {
    law.map_states(|p| p.top().clone())
}

/// Exact TV between the `[N t]`-step law of `R_k` with `q = 1/N` and the
/// generator semigroup at `t`.
fn small_q_exact_tv(cfg: &ExperimentConfig, big_n: u64, semigroup: &SparseLaw<Row, f64>) -> Result<(f64, f64)> {
    let steps = (big_n as f64 * cfg.t_max).floor() as usize;
    let jp = JumpParam::new(1.0 / big_n as f64)?;
    let law = n_step_law::<f64>(&jp, cfg.k, steps, cfg.radius, 1.0)?;
    let tv = tv_distance(&law, semigroup);
    Ok((tv.value, law.tail_deficit().max(*semigroup.tail_deficit())))
}

/// `q = 1/N`: the pattern after `[N t]` discrete steps against the
/// continuous-time pattern at `t`, and the discrete top row against the
/// generator semigroup; optionally the convergence trend between two `N`.
pub fn experiment_small_q(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let n = [cfg.n_paths, cfg.n_paths];
    let run = small_q_run(cfg, cfg.scale)?;
    let mut out = ExperimentOutcome::new(cfg);
    let tag = format!("N={} t={}", cfg.scale, cfg.t_max);
    out.reports.push(tv_report(&format!("X([Nt]) vs Y(t), {tag}"), &run.discrete, &run.continuous, cfg.thresholds.tv, &n));
    let top = top_rows(&run.discrete);
    out.reports.push(
        tv_report(&format!("X^{}([Nt]) vs semigroup, {tag}", cfg.k), &top, &run.semigroup, cfg.thresholds.semigroup_tv, &n[..1])
            .with_deficits(&[*run.semigroup.tail_deficit()], cfg.tolerance),
    );
    out.histograms.push(histogram(
        "top_row",
        &[("discrete", &top), ("continuous", &top_rows(&run.continuous)), ("semigroup", &run.semigroup)],
    ));
    if let Some([lo, hi]) = cfg.trend {
        let tv_at = |big_n: u64| -> Result<f64> {
            let r = small_q_run(cfg, big_n)?;
            Ok(tv_distance(&r.discrete, &r.continuous).value)
        };
        let (a, b) = (tv_at(lo)?, tv_at(hi)?);
        out.reports.push(
            ComparisonReport::new(format!("trend: TV at N={hi} (value) vs N={lo} (threshold)"), Statistic::Tv, b, a)
                .with_samples(&n),
        );
        if cfg.k <= 2 {
            let (a, da) = small_q_exact_tv(cfg, lo, &run.semigroup)?;
            let (b, db) = small_q_exact_tv(cfg, hi, &run.semigroup)?;
            out.notes.push(format!("exact TV to the semigroup: N={lo}: {a:.6}, N={hi}: {b:.6}"));
            out.reports.push(
                ComparisonReport::new(format!("trend (exact laws): N={hi} vs N={lo}"), Statistic::Tv, b, a)
                    .with_deficits(&[da, db], cfg.tolerance),
            );
        }
    }
    Ok(out)
}

struct LargeQRun {
    scaled: Vec<Vec<f64>>,
    spectra: Vec<Vec<f64>>,
}

fn large_q_run(cfg: &ExperimentConfig, big_n: u64) -> Result<LargeQRun> {
    let n = cfg.horizon;
    let q = QValue::Exact(ratio(big_n as i64 - 1, big_n as i64));
    let model = DiscreteModel::new(&q, cfg.k, cfg.sampler)?;
    let scaled = map_paths(cfg.n_paths, cfg.seed, |rng| {
        let top = model.sample_at(rng, n).top().clone();
        top.iter().map(|&v| v as f64 / big_n as f64).collect()
    });
    let spectra = simulate_eigen_chain(cfg.k + 1, n, cfg.n_paths, sub_seed(cfg.seed, 2))?
        .into_iter()
        .map(|mut p| p.swap_remove(n - 1))
        .collect();
    Ok(LargeQRun { scaled, spectra })
}

fn coordinate(sample: &[Vec<f64>], i: usize) -> Vec<f64> {
    sample.iter().map(|p| p[i]).collect()
}

fn max_coordinate_ks(run: &LargeQRun) -> Result<f64> {
    let r = run.spectra[0].len();
    (0..r).try_fold(0.0f64, |acc, i| Ok(acc.max(ks_two_sample(&coordinate(&run.scaled, i), &coordinate(&run.spectra, i))?)))
}

const JOINT_POINTS: usize = 4000;

/// `q = 1 - 1/N`: `X^k(n)/N` against the top eigenvalues of the matrix
/// chain of size `k + 1` after `n` steps.
pub fn experiment_large_q(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let run = large_q_run(cfg, cfg.scale)?;
    let r = run.spectra[0].len();
    let n = [cfg.n_paths, cfg.n_paths];
    let default = ks_threshold(cfg.n_paths, cfg.n_paths, cfg.scale, 1.0);
    let mut out = ExperimentOutcome::new(cfg);
    for i in 0..r {
        let ks = ks_two_sample(&coordinate(&run.scaled, i), &coordinate(&run.spectra, i))?;
        out.reports.push(
            ComparisonReport::new(
                format!("X^{}({})/N vs Λ({}) coordinate {}, N={}", cfg.k, cfg.horizon, cfg.horizon, i + 1, cfg.scale),
                Statistic::Ks,
                ks,
                cfg.thresholds.ks.unwrap_or(default),
            )
            .with_samples(&n),
        );
    }
    if r > 1 {
        let ks = ks_joint(&run.scaled, &run.spectra, JOINT_POINTS)?;
        out.reports.push(
            ComparisonReport::new(format!("joint X^{}/N vs Λ, N={}", cfg.k, cfg.scale), Statistic::Ks, ks, cfg.thresholds.joint_ks.unwrap_or(default))
                .with_samples(&n),
        );
    }
    out.histograms.push(binned("first_coordinate", &coordinate(&run.scaled, 0), &coordinate(&run.spectra, 0), 0.25));
    if let Some([lo, hi]) = cfg.trend {
        let a = max_coordinate_ks(&large_q_run(cfg, lo)?)?;
        let b = max_coordinate_ks(&large_q_run(cfg, hi)?)?;
        out.reports.push(
            ComparisonReport::new(format!("trend: KS at N={hi} (value) vs N={lo} (threshold)"), Statistic::Ks, b, a).with_samples(&n),
        );
    }
    Ok(out)
}

fn binned(name: &str, a: &[f64], b: &[f64], width: f64) -> Histogram {
    let top = a.iter().chain(b).cloned().fold(0.0, f64::max);
    let bins = (top / width).floor() as usize + 1;
    let count = |s: &[f64]| {
        let mut c = vec![0.0; bins];
        for v in s {
            c[((v / width).floor() as usize).min(bins - 1)] += 1.0 / s.len() as f64;
        }
        c
    };
    let (ca, cb) = (count(a), count(b));
    Histogram {
        name: name.into(),
        columns: vec!["lattice".into(), "matrix".into()],
        rows: (0..bins)
            .map(|i| (format!("{:.3}", i as f64 * width), vec![ca[i], cb[i]]))
            .collect(),
    }
}

fn exact_q(cfg: &ExperimentConfig) -> Result<JumpParam<BigRational>> {
    JumpParam::new(cfg.q_value()?.to_exact()?)
}

pub fn experiment_intertwine(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let rep = check_intertwining(&exact_q(cfg)?, cfg.k, cfg.bound)?;
    let value = parse_rational(&rep.max_discrepancy)?.to_f64();
    let mut out = ExperimentOutcome::new(cfg);
    out.notes.push(format!("max discrepancy {} over {} cases", rep.max_discrepancy, rep.cases));
    out.reports.push(
        ComparisonReport::new(format!("L_{k}Q_{k} - S_{k}L_{k}, bound {}", cfg.bound, k = cfg.k), Statistic::MaxAbs, value, 0.0)
            .with_samples(&[rep.cases]),
    );
    out.documents.push(("intertwining".into(), serde_json::to_value(&rep)?));
    Ok(out)
}

pub fn experiment_desintegration(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let rep = check_desintegration(&exact_q(cfg)?, cfg.bound)?;
    let mut worst = 0.0f64;
    for v in &rep.violations {
        let d = parse_rational(&v.lhs)? - parse_rational(&v.rhs)?;
        worst = worst.max(Scalar::abs(&d).to_f64());
    }
    let mut out = ExperimentOutcome::new(cfg);
    out.notes.push(format!("tuples checked per identity {:?}, violations {}", rep.checked, rep.violations.len()));
    out.reports.push(
        ComparisonReport::new(format!("one-particle identities, bound {}", cfg.bound), Statistic::MaxAbs, worst, 0.0)
            .with_samples(&rep.checked),
    );
    out.documents.push(("desintegration".into(), serde_json::to_value(&rep)?));
    Ok(out)
}

/// The `horizon`-step law of the top row as JSON, exact when `q` is given
/// as a fraction.
pub fn experiment_kernel_dump(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let q = cfg.q_value()?;
    let (doc, deficit) = if q.is_exact() {
        let law = n_step_law(&exact_q(cfg)?, cfg.k, cfg.horizon, cfg.radius, 1.0)?;
        (law.to_json(), law.tail_deficit().to_f64())
    } else {
        let law = n_step_law(&JumpParam::new(q.as_f64())?, cfg.k, cfg.horizon, cfg.radius, 1.0)?;
        (law.to_json(), *law.tail_deficit())
    };
    let mut out = ExperimentOutcome::new(cfg);
    out.reports.push(
        ComparisonReport::new(format!("truncated mass of R_{}^{}", cfg.k, cfg.horizon), Statistic::MaxAbs, deficit, cfg.tolerance)
            .with_deficits(&[deficit], cfg.tolerance),
    );
    out.documents.push(("kernel".into(), doc));
    Ok(out)
}
