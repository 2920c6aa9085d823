//! Truncated multi-step laws of the top row started from the zero pattern.

use std::collections::HashMap;

use crate::error::{contract, Error, Result};
use crate::gt::{dominant_rows, enumerate_lower_rows, Row};
use crate::kernels::pair::{s_k_unchecked, WPlusPair};
use crate::kernels::pd::r_k_unchecked;
use crate::law::SparseLaw;
use crate::scalar::{JumpParam, Scalar};

fn check_args(k: usize, n: usize, radius: i64) -> Result<()> {
    if k == 0 || n == 0 {
        return Err(contract("k and n must be positive"));
    }
    if radius < 0 {
        return Err(contract("radius must be non-negative"));
    }
    Ok(())
}

fn finish<K: Ord + Clone, S: Scalar>(mut law: SparseLaw<K, S>, radius: i64, tolerance: f64) -> Result<SparseLaw<K, S>> {
    let lost = S::one() - law.mass();
    let lost = if lost < S::zero() { S::zero() } else { lost };
    let deficit = lost.to_f64();
    if deficit > tolerance {
        return Err(Error::RadiusTooSmall { radius, deficit, tolerance });
    }
    law.add_deficit(lost);
    Ok(law)
}

fn iterate<S: Scalar>(q: &JumpParam<S>, k: usize, steps: usize, states: &[Row]) -> SparseLaw<Row, S> {
    let mut law: SparseLaw<Row, S> = SparseLaw::dirac(Row::zeros(k.div_ceil(2)));
    // kernel rows are computed once per source state and reused across steps
    let mut rows: HashMap<Row, Vec<(usize, S)>> = HashMap::new();
    for _ in 0..steps {
        let mut acc = vec![S::zero(); states.len()];
        for (x, px) in law.iter() {
            let row = rows.entry(x.clone()).or_insert_with(|| {
                states
                    .iter()
                    .enumerate()
                    .map(|(j, y)| (j, r_k_unchecked(q, k, x, y)))
                    .filter(|(_, p)| !p.is_zero())
                    .collect()
            });
            for (j, p) in row.iter() {
                acc[*j] = acc[*j].clone() + px.clone() * p.clone();
            }
        }
        let mut next = SparseLaw::new();
        for (y, p) in states.iter().zip(acc) {
            next.add(y.clone(), p);
        }
        law = next;
    }
    law
}

/// Law of `X^k(n)` started from 0, restricted to rows with entries at most
/// `radius`. The lost mass is stored as the tail deficit; if it exceeds
/// `tolerance` a [`Error::RadiusTooSmall`] is returned instead.
pub fn n_step_law<S: Scalar>(
    q: &JumpParam<S>,
    k: usize,
    n: usize,
    radius: i64,
    tolerance: f64,
) -> Result<SparseLaw<Row, S>> {
    check_args(k, n, radius)?;
    let states = dominant_rows(k.div_ceil(2), radius);
    finish(iterate(q, k, n, &states), radius, tolerance)
}

/// Law of `(Z^k(n), Y^k(n))` started from 0: `n - 1` steps of `R_k`
/// followed by one step of `S_k`.
pub fn n_step_pair_law<S: Scalar>(
    q: &JumpParam<S>,
    k: usize,
    n: usize,
    radius: i64,
    tolerance: f64,
) -> Result<SparseLaw<WPlusPair, S>> {
    check_args(k, n, radius)?;
    let states = dominant_rows(k.div_ceil(2), radius);
    let before = iterate(q, k, n - 1, &states);
    let mut law = SparseLaw::new();
    for y2 in &states {
        for z2 in enumerate_lower_rows(y2, k / 2, false)? {
            let p = before
                .iter()
                .fold(S::zero(), |acc, (y, py)| acc + py.clone() * s_k_unchecked(q, k, y, &z2, y2));
            law.add(WPlusPair::new(z2, y2.clone()), p);
        }
    }
    finish(law, radius, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::elementary::r_pmf;
    use crate::kernels::pd::p_d_closed;
    use num_rational::BigRational;
    use num_traits::One;

    #[test]
    fn one_step_k1_is_r() {
        let q = JumpParam::exact(1, 2).unwrap();
        let law = n_step_law(&q, 1, 1, 40, 1e-10).unwrap();
        for y in 0..=40 {
            assert_eq!(law.get(&Row::from([y])), r_pmf(&q, 0, y));
        }
        assert!((law.mass() + law.tail_deficit().clone()).is_one());
    }

    #[test]
    fn one_step_k2_deficit() {
        let q = JumpParam::exact(1, 2).unwrap();
        let law = n_step_law(&q, 2, 1, 60, 1e-10).unwrap();
        assert_eq!(law.get(&Row::from([3])), p_d_closed(&q, 3, &Row::from([0]), &Row::from([3])).unwrap());
        assert!(law.tail_deficit().to_f64() < 1e-10);
    }

    #[test]
    fn radius_too_small_is_reported() {
        let q = JumpParam::exact(1, 2).unwrap();
        match n_step_law(&q, 2, 2, 3, 1e-6) {
            Err(Error::RadiusTooSmall { radius: 3, deficit, .. }) => assert!(deficit > 1e-6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pair_marginal_matches_row_law() {
        let q = JumpParam::new(0.5).unwrap();
        for k in [2usize, 3] {
            let pairs = n_step_pair_law(&q, k, 2, 20, 1e-3).unwrap();
            let rows = n_step_law(&q, k, 2, 20, 1e-3).unwrap();
            let marginal = pairs.map_states(|p| p.y.clone());
            for (y, p) in rows.iter() {
                assert!((marginal.get(y) - p).abs() < 1e-12, "k={k} y={y}");
            }
        }
    }

    #[test]
    fn exact_two_step_mass() {
        let q = JumpParam::exact(1, 2).unwrap();
        let law: SparseLaw<Row, BigRational> = n_step_law(&q, 2, 2, 30, 1e-4).unwrap();
        assert!((law.mass() + law.tail_deficit().clone()).is_one());
    }
}
