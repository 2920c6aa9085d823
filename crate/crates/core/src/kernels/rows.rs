//! Whole rows of the kernels, truncated to a box, with the missing mass
//! kept as the deficit.

use crate::error::{contract, Result};
use crate::gt::{check_weight, dominant_rows, enumerate_lower_rows, Row};
use crate::kernels::pair::{l_k_pmf, q_k_pmf, s_k_pmf, TripleState, WPlusPair};
use crate::kernels::pd::{p_d_unchecked, r_k_pmf};
use crate::law::SparseLaw;
use crate::scalar::{JumpParam, Scalar};

fn close<K: Ord + Clone, S: Scalar>(mut law: SparseLaw<K, S>) -> SparseLaw<K, S> {
    let deficit = S::one() - law.mass();
    law.add_deficit(deficit);
    law
}

/// Elements of `W_d` with first entry at most `radius`.
pub fn weights_in_box(d: usize, radius: i64) -> Vec<Row> {
    let r = d / 2;
    let mut out = Vec::new();
    for row in dominant_rows(r, radius) {
        if d % 2 == 0 && row.last() > 0 {
            out.push(row.flip_last());
        }
        out.push(row);
    }
    out.sort();
    out
}

/// `P_d(λ, ·)` on `β_1 ≤ radius`.
pub fn p_d_row<S: Scalar>(q: &JumpParam<S>, d: usize, lambda: &Row, radius: i64) -> Result<SparseLaw<Row, S>> {
    check_weight(d, lambda)?;
    let mut law = SparseLaw::new();
    for beta in weights_in_box(d, radius) {
        law.add(beta.clone(), p_d_unchecked(q, d, lambda, &beta));
    }
    Ok(close(law))
}

/// `R_k(x, ·)` on rows with entries at most `radius`.
pub fn r_k_row<S: Scalar>(q: &JumpParam<S>, k: usize, x: &Row, radius: i64) -> Result<SparseLaw<Row, S>> {
    if k == 0 {
        return Err(contract("k must be positive"));
    }
    let mut law = SparseLaw::new();
    for y in dominant_rows(k.div_ceil(2), radius) {
        let p = r_k_pmf(q, k, x, &y)?;
        law.add(y, p);
    }
    Ok(close(law))
}

fn pairs_in_box(k: usize, radius: i64) -> Result<Vec<WPlusPair>> {
    let mut out = Vec::new();
    for y in dominant_rows(k.div_ceil(2), radius) {
        for z in enumerate_lower_rows(&y, k / 2, false)? {
            out.push(WPlusPair::new(z, y.clone()));
        }
    }
    Ok(out)
}

/// `S_k((z, y), ·)` on pairs with entries at most `radius`.
pub fn s_k_row<S: Scalar>(q: &JumpParam<S>, k: usize, from: &WPlusPair, radius: i64) -> Result<SparseLaw<WPlusPair, S>> {
    let mut law = SparseLaw::new();
    for to in pairs_in_box(k, radius)? {
        let p = s_k_pmf(q, k, from, &to)?;
        law.add(to, p);
    }
    Ok(close(law))
}

/// `L_k((z, y), ·)`, which has finite support.
pub fn l_k_row<S: Scalar>(k: usize, from: &WPlusPair) -> Result<SparseLaw<TripleState, S>> {
    if k < 2 {
        return Err(contract(format!("L_k needs k ≥ 2, got {k}")));
    }
    let mut law = SparseLaw::new();
    for x in enumerate_lower_rows(&from.y, k / 2, false)? {
        let t = TripleState::new(x, from.z.clone(), from.y.clone());
        let p = l_k_pmf(k, from, &t)?;
        law.add(t, p);
    }
    Ok(close(law))
}

/// `Q_k((x, z, y), ·)` on triples with entries at most `radius`.
pub fn q_k_row<S: Scalar>(q: &JumpParam<S>, k: usize, from: &TripleState, radius: i64) -> Result<SparseLaw<TripleState, S>> {
    if k < 2 {
        return Err(contract(format!("Q_k needs k ≥ 2, got {k}")));
    }
    let mut law = SparseLaw::new();
    for pair in pairs_in_box(k, radius)? {
        for x in enumerate_lower_rows(&pair.y, k / 2, false)? {
            let to = TripleState::new(x, pair.z.clone(), pair.y.clone());
            let p = q_k_pmf(q, k, from, &to)?;
            law.add(to, p);
        }
    }
    Ok(close(law))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::tails::{negbin_tail_bound, r_k_row_tail_bound};
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    #[test]
    fn weights_box() {
        assert_eq!(weights_in_box(4, 1).len(), 4);
        assert_eq!(weights_in_box(5, 1).len(), 3);
    }

    #[test]
    fn rows_are_probability_laws() {
        let q = JumpParam::exact(1, 3).unwrap();
        let row: SparseLaw<Row, BigRational> = p_d_row(&q, 4, &Row::from([1, -1]), 12).unwrap();
        assert!((row.mass() + row.tail_deficit().clone()).is_one());
        assert!(row.tail_deficit() > &BigRational::from_int(0));
        let rk: SparseLaw<Row, BigRational> = r_k_row(&q, 3, &Row::from([2, 1]), 14).unwrap();
        assert!(rk.tail_deficit().clone() <= r_k_row_tail_bound(&q, 3, &[2, 1], 14));
        let l: SparseLaw<TripleState, BigRational> = l_k_row(3, &WPlusPair::new(Row::from([1]), Row::from([2, 1]))).unwrap();
        assert!(l.tail_deficit().is_zero());
        let s: SparseLaw<WPlusPair, f64> = s_k_row(&q.to_f64(), 2, &WPlusPair::new(Row::from([1]), Row::from([2])), 25).unwrap();
        assert!(*s.tail_deficit() < 1e-6);
        let from = TripleState::new(Row::from([1]), Row::from([1]), Row::from([2]));
        let qk: SparseLaw<TripleState, f64> = q_k_row(&q.to_f64(), 2, &from, 14).unwrap();
        assert!(*qk.tail_deficit() >= -1e-12);
        assert!(*qk.tail_deficit() <= negbin_tail_bound(&q.to_f64(), 3, 14 - 2) + 1e-12);
    }
}
