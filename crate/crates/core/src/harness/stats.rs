//! Distances between laws and between samples.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{contract, Result};
use crate::law::SparseLaw;
use crate::scalar::Scalar;

/// Total variation distance over the union of the stored supports, with
/// the truncated mass of both laws reported separately: the true distance
/// lies in `[value - bias, value + bias]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TvDistance<S> {
    pub value: S,
    pub bias: S,
}

pub fn tv_distance<K: Ord + Clone, S: Scalar>(a: &SparseLaw<K, S>, b: &SparseLaw<K, S>) -> TvDistance<S> {
    let mut sum = S::zero();
    let mut ia = a.iter().peekable();
    let mut ib = b.iter().peekable();
    loop {
        let diff = match (ia.peek(), ib.peek()) {
            (None, None) => break,
            (Some((_, p)), None) => {
                let p = (*p).clone();
                ia.next();
                p
            }
            (None, Some((_, p))) => {
                let p = (*p).clone();
                ib.next();
                p
            }
            (Some((ka, pa)), Some((kb, pb))) => match ka.cmp(kb) {
                Ordering::Less => {
                    let p = (*pa).clone();
                    ia.next();
                    p
                }
                Ordering::Greater => {
                    let p = (*pb).clone();
                    ib.next();
                    p
                }
                Ordering::Equal => {
                    let d = ((*pa).clone() - (*pb).clone()).abs();
                    ia.next();
                    ib.next();
                    d
                }
            },
        };
        sum = sum + diff;
    }
    let half = S::one() / S::from_int(2);
    TvDistance {
        value: half.clone() * sum,
        bias: half * (a.tail_deficit().clone() + b.tail_deficit().clone()),
    }
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(contract("KS distance of an empty sample"));
    }
    if xs.iter().any(|x| x.is_nan()) {
        return Err(crate::Error::Numeric("NaN in sample".into()));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `sup_t |F_xs(t) - F_ys(t)|` for the two empirical distribution functions.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let a = sorted(xs)?;
    let b = sorted(ys)?;
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut worst: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        worst = worst.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(worst)
}

/// Distance between the empirical distribution functions of two samples
/// in `ℝ^r`, `F(t) = #{x : x ≤ t coordinatewise}/n`, evaluated at (at most
/// `max_points` evenly spaced) points of the pooled sample.
pub fn ks_joint(xs: &[Vec<f64>], ys: &[Vec<f64>], max_points: usize) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(contract("KS distance of an empty sample"));
    }
    let r = xs[0].len();
    if xs.iter().chain(ys).any(|p| p.len() != r) {
        return Err(contract("samples of different dimensions"));
    }
    let pooled: Vec<&Vec<f64>> = xs.iter().chain(ys).collect();
    let stride = pooled.len().div_ceil(max_points.max(1));
    let below = |sample: &[Vec<f64>], t: &[f64]| {
        sample.iter().filter(|p| p.iter().zip(t).all(|(a, b)| a <= b)).count() as f64 / sample.len() as f64
    };
    use rayon::prelude::*;
    let worst = pooled
        .par_iter()
        .step_by(stride)
        .map(|t| (below(xs, t) - below(ys, t)).abs())
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

/// Default TV threshold: three times `√(support/n)/2`, the typical TV
/// between a law on `support` points and its empirical law from `n` draws.
pub fn tv_noise_threshold(support: usize, n: usize) -> f64 {
    1.5 * (support as f64 / n.max(1) as f64).sqrt()
}

/// Asymptotic two-sample KS critical value at level `alpha`.
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}

/// Default KS threshold for comparing a lattice model at scale `big_n` with
/// its continuum limit: the 0.001 critical value plus `density_scale/N`.
pub fn ks_threshold(n: usize, m: usize, big_n: u64, density_scale: f64) -> f64 {
    ks_critical(n, m, 0.001) + density_scale / big_n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn law(pairs: &[(i64, f64)]) -> SparseLaw<i64, f64> {
        let mut l = SparseLaw::new();
        for &(k, p) in pairs {
            l.add(k, p);
        }
        l
    }

    #[test]
    fn tv_examples() {
        let a = law(&[(0, 0.3), (1, 0.7)]);
        assert_eq!(tv_distance(&a, &a).value, 0.0);
        assert_eq!(tv_distance(&law(&[(0, 1.0)]), &law(&[(1, 1.0)])).value, 1.0);
        let half = tv_distance(&SparseLaw::dirac(0i64), &law(&[(0, 0.5), (1, 0.5)]));
        assert_eq!(half.value, 0.5);
        let mut t = SparseLaw::<i64, BigRational>::dirac(0);
        t.add_deficit(ratio(1, 10));
        let d = tv_distance(&t, &SparseLaw::dirac(0));
        assert_eq!(d.bias, ratio(1, 20));
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_two_sample(&[1.0, 2.0, 2.0], &[2.0, 1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ks_two_sample(&[0.0], &[1.0]).unwrap(), 1.0);
        assert_eq!(ks_two_sample(&[0.0, 1.0], &[0.0, 2.0]).unwrap(), 0.5);
        assert!(ks_two_sample(&[], &[1.0]).is_err());
        assert!(ks_joint(&[], &[vec![1.0]], 10).is_err());
        let j = ks_joint(&[vec![0.0, 0.0]], &[vec![1.0, 1.0]], 10).unwrap();
        assert_eq!(j, 1.0);
    }

    #[test]
    fn critical_value() {
        // c(0.05) ≈ 1.358
        assert!((ks_critical(100, 100, 0.05) - 1.3581 * 0.02f64.sqrt()).abs() < 1e-3);
    }

    fn brute_ks(xs: &[f64], ys: &[f64]) -> f64 {
        let cdf = |s: &[f64], t: f64| s.iter().filter(|v| **v <= t).count() as f64 / s.len() as f64;
        xs.iter()
            .chain(ys)
            .map(|&t| (cdf(xs, t) - cdf(ys, t)).abs())
            .fold(0.0, f64::max)
    }

    proptest! {
        #[test]
        fn ks_matches_brute_force(
            xs in prop::collection::vec(-5i32..5, 1..30),
            ys in prop::collection::vec(-5i32..5, 1..30),
        ) {
            let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
            let ys: Vec<f64> = ys.into_iter().map(f64::from).collect();
            let fast = ks_two_sample(&xs, &ys).unwrap();
            prop_assert!((fast - brute_ks(&xs, &ys)).abs() < 1e-12);
            let a: Vec<Vec<f64>> = xs.iter().map(|x| vec![*x]).collect();
            let b: Vec<Vec<f64>> = ys.iter().map(|y| vec![*y]).collect();
            prop_assert!((ks_joint(&a, &b, usize::MAX).unwrap() - fast).abs() < 1e-12);
        }

        #[test]
        fn tv_matches_brute_force(
            a in prop::collection::btree_map(0i64..8, 1i64..20, 1..6),
            b in prop::collection::btree_map(0i64..8, 1i64..20, 1..6),
        ) {
            let norm = |m: &std::collections::BTreeMap<i64, i64>| {
                let total: i64 = m.values().sum();
                let mut l = SparseLaw::<i64, BigRational>::new();
                for (k, v) in m {
                    l.add(*k, ratio(*v, total));
                }
                l
            };
            let (la, lb) = (norm(&a), norm(&b));
            let keys: BTreeSet<i64> = a.keys().chain(b.keys()).copied().collect();
            let brute = keys.iter().fold(BigRational::from_int(0), |acc, k| {
                acc + Scalar::abs(&(la.get(k) - lb.get(k)))
            }) / BigRational::from_int(2);
            prop_assert_eq!(tv_distance(&la, &lb).value, brute);
        }
    }
}
