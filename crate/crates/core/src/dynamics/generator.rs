//! The jump rates of the top row of the continuous-time model and its
//! transition law, computed by uniformization on a truncated state space.

use std::collections::HashMap;

use num_rational::BigRational;

use crate::error::{contract, Error, Result};
use crate::gt::{dim, dominant_rows, row_len, Row};
use crate::law::SparseLaw;
use crate::scalar::Scalar;

fn check_top_row(k: usize, row: &Row) -> Result<()> {
    if k == 0 || row.len() != row_len(k) {
        return Err(contract(format!("{row} is not a row {k}")));
    }
    Ok(())
}

/// `A_k(λ, β)` for `β = λ ± e_i`: `s_k(β)/s_k(λ)` when `β` is a non-negative
/// weakly decreasing row, doubled when `k` is odd and the last entry goes
/// from 0 to 1; zero when `β` leaves the state space.
pub fn generator_rate(k: usize, lambda: &Row, beta: &Row) -> Result<BigRational> {
    check_top_row(k, lambda)?;
    check_top_row(k, beta)?;
    if !lambda.is_dominant() {
        return Err(contract(format!("{lambda} is not a non-negative decreasing row")));
    }
    let diff: Vec<i64> = beta.iter().zip(lambda.iter()).map(|(b, l)| b - l).collect();
    let nonzero: Vec<&i64> = diff.iter().filter(|d| **d != 0).collect();
    if nonzero.len() != 1 || nonzero[0].abs() != 1 {
        return Err(contract(format!("{beta} is not a unit step from {lambda}")));
    }
    if !beta.is_dominant() {
        return Ok(BigRational::from_int(0));
    }
    Ok(rate_unchecked(k, lambda, beta))
}

fn rate_unchecked(k: usize, lambda: &[i64], beta: &[i64]) -> BigRational {
    let r = row_len(k);
    let base = BigRational::from_count(&dim(k, beta)) / BigRational::from_count(&dim(k, lambda));
    if k % 2 == 1 && lambda[r - 1] == 0 && beta[r - 1] == 1 {
        BigRational::from_int(2) * base
    } else {
        base
    }
}

fn neighbours(lambda: &[i64]) -> impl Iterator<Item = Row> + '_ {
    (0..lambda.len()).flat_map(move |i| {
        [1i64, -1].into_iter().map(move |s| {
            let mut b = lambda.to_vec();
            b[i] += s;
            Row(b)
        })
    })
}

/// Law of `Y^k(t)` from 0 under `A_k`, restricted to rows with entries at
/// most `radius`. Mass that leaves the box is counted in the deficit; an
/// error is returned when the deficit exceeds `tolerance`.
pub fn generator_semigroup_law(k: usize, t: f64, radius: i64, tolerance: f64) -> Result<SparseLaw<Row, f64>> {
    if k == 0 || !(t >= 0.0) || radius < 0 {
        return Err(contract("need k ≥ 1, t ≥ 0 and radius ≥ 0"));
    }
    let states = dominant_rows(row_len(k), radius);
    let index: HashMap<Row, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    // off-diagonal rates inside the box plus the total exit rate of each state
    let mut edges: Vec<Vec<(usize, f64)>> = Vec::with_capacity(states.len());
    let mut exit = Vec::with_capacity(states.len());
    for s in &states {
        let mut out = Vec::new();
        let mut total = 0.0;
        for b in neighbours(s) {
            if !b.is_dominant() {
                continue;
            }
            let rate = rate_unchecked(k, s, &b).to_f64();
            total += rate;
            if let Some(&j) = index.get(&b) {
                out.push((j, rate));
            }
        }
        edges.push(out);
        exit.push(total);
    }
    let big = exit.iter().cloned().fold(0.0, f64::max).max(1e-12);
    let mut v = vec![0.0; states.len()];
    v[index[&Row::zeros(row_len(k))]] = 1.0;
    let mut acc = vec![0.0; states.len()];
    let lt = big * t;
    let mut weight = (-lt).exp();
    let mut cumulative = 0.0;
    let mut n = 0u64;
    loop {
        for (a, x) in acc.iter_mut().zip(&v) {
            *a += weight * x;
        }
        cumulative += weight;
        if 1.0 - cumulative < 1e-15 || (n as f64 > lt && weight < 1e-300) {
            break;
        }
        let mut next = vec![0.0; states.len()];
        for (i, x) in v.iter().enumerate() {
            if *x == 0.0 {
                continue;
            }
            next[i] += x * (1.0 - exit[i] / big);
            for &(j, rate) in &edges[i] {
                next[j] += x * rate / big;
            }
        }
        v = next;
        n += 1;
        weight *= lt / n as f64;
    }
    let mut law = SparseLaw::new();
    for (s, p) in states.into_iter().zip(acc) {
        law.add(s, p);
    }
    let deficit = (1.0 - law.mass()).max(0.0);
    if deficit > tolerance {
        return Err(Error::RadiusTooSmall { radius, deficit, tolerance });
    }
    law.add_deficit(deficit);
    Ok(law)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn rate_examples() {
        assert_eq!(generator_rate(1, &Row::from([0]), &Row::from([1])).unwrap(), ratio(2, 1));
        assert_eq!(generator_rate(1, &Row::from([3]), &Row::from([2])).unwrap(), ratio(1, 1));
        assert_eq!(generator_rate(2, &Row::from([1]), &Row::from([2])).unwrap(), ratio(5, 3));
        assert_eq!(generator_rate(3, &Row::from([1, 0]), &Row::from([1, 1])).unwrap(), ratio(3, 2));
        assert_eq!(generator_rate(2, &Row::from([0]), &Row::from([-1])).unwrap(), ratio(0, 1));
        assert!(generator_rate(2, &Row::from([0]), &Row::from([2])).is_err());
    }

    /// `Y^1` is a walk reflected at 0: compare with a dense matrix
    /// exponential computed by scaling and squaring.
    #[test]
    fn k1_semigroup_matches_dense_exponential() {
        let law = generator_semigroup_law(1, 1.0, 30, 1e-10).unwrap();
        let n = 31;
        let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let up = if i == 0 { 2.0 } else { 1.0 };
            if i + 1 < n {
                a[(i, i + 1)] = up;
            }
            if i > 0 {
                a[(i, i - 1)] = 1.0;
            }
            a[(i, i)] = -(up + if i > 0 { 1.0 } else { 0.0 });
        }
        let mut e = &a / 1024.0;
        let mut term = nalgebra::DMatrix::<f64>::identity(n, n);
        let mut sum = term.clone();
        for j in 1..20 {
            term = &term * &e / j as f64;
            sum += &term;
        }
        e = sum;
        for _ in 0..10 {
            e = &e * &e;
        }
        for y in 0..10 {
            assert!((law.get(&Row::from([y])) - e[(0, y as usize)]).abs() < 1e-9, "y={y}");
        }
    }

    #[test]
    fn k2_law_is_nearly_complete() {
        let law = generator_semigroup_law(2, 1.0, 20, 1e-8).unwrap();
        assert!((law.mass() + law.tail_deficit() - 1.0).abs() < 1e-12);
    }
}
