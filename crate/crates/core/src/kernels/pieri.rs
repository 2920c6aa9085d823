//! The Pieri-type decomposition of `V_λ ⊗ V_{γ_m}` for `SO(d)`, the kernels
//! `μ_m` it induces, and the jump-size law `ν`.

use std::collections::BTreeMap;

use crate::error::{contract, Result};
use crate::gt::{check_weight, dim, for_each_in_box, Row};
use crate::scalar::{JumpParam, Scalar};

/// `γ_m = (m, 0, …, 0) ∈ W_d`.
pub fn gamma(d: usize, m: i64) -> Row {
    Row::gamma(d / 2, m)
}

/// `ν(m) = (1-q)^{d-1} q^m s_{d-1}(γ_m) / (1+q)`.
pub fn nu_pmf<S: Scalar>(q: &JumpParam<S>, d: usize, m: i64) -> Result<S> {
    if d < 3 {
        return Err(contract(format!("ν is defined for d ≥ 3, got {d}")));
    }
    if m < 0 {
        return Ok(S::zero());
    }
    let s = S::from_count(&dim(d - 1, &gamma(d, m)));
    Ok(q.one_minus_q().powi(d as i64 - 1) * q.pow(m) * s / q.one_plus_q().clone())
}

/// Multiplicities `M_{λ,γ_m}(β)` of `V_λ ⊗ V_{γ_m} = ⊕ M(β) V_β`.
///
/// Odd `d = 2r+1`: count `(c, s) ∈ ℕ^r × {0,1}` with `c ≼ λ`, `c ≼ β`,
/// `Σ(λ_i - c_i + β_i - c_i) + s = m`, and `s = 0` whenever `c_r = 0`.
/// Even `d = 2r`: count `c ∈ ℕ^{r-1}` with `c ≼ |λ|`, `c ≼ |β|` and
/// `Σ_{i<r}(λ_i - c_i + β_i - c_i) + |λ_r - β_r| = m`.
pub fn pieri_decompose(d: usize, lambda: &Row, m: i64) -> Result<BTreeMap<Row, u64>> {
    check_weight(d, lambda)?;
    let mut out: BTreeMap<Row, u64> = BTreeMap::new();
    if m < 0 {
        return Ok(out);
    }
    let r = d / 2;
    if d % 2 == 1 {
        // c_i ∈ [λ_{i+1}, λ_i]
        let c_ranges: Vec<(i64, i64)> = (0..r).map(|i| (lambda.get(i + 1).copied().unwrap_or(0), lambda[i])).collect();
        for_each_in_box(&c_ranges, |c| {
            let base: i64 = lambda.iter().zip(c).map(|(l, c)| l - c).sum();
            let wall_open = c[r - 1] > 0;
            for s in 0..=i64::from(wall_open) {
                let rem = m - s - base;
                if rem < 0 {
                    continue;
                }
                // β_i ∈ [c_i, c_{i-1}] for i ≥ 2, β_1 absorbs the remainder
                let tail_ranges: Vec<(i64, i64)> = (1..r).map(|i| (c[i], c[i - 1])).collect();
                for_each_in_box(&tail_ranges, |tail| {
                    let used: i64 = tail.iter().zip(&c[1..]).map(|(b, c)| b - c).sum();
                    if used > rem {
                        return;
                    }
                    let mut beta = Vec::with_capacity(r);
                    beta.push(c[0] + rem - used);
                    beta.extend_from_slice(tail);
                    *out.entry(Row(beta)).or_default() += 1;
                });
            }
        });
    } else {
        let abs = lambda.abs();
        // c_i ∈ [|λ|_{i+1}, λ_i], i < r
        let c_ranges: Vec<(i64, i64)> = (0..r - 1).map(|i| (abs[i + 1], abs[i])).collect();
        for_each_in_box(&c_ranges, |c| {
            let base: i64 = (0..r - 1).map(|i| lambda[i] - c[i]).sum();
            let rem = m - base;
            if rem < 0 {
                return;
            }
            // β_i ∈ [c_i, c_{i-1}] for 2 ≤ i ≤ r-1, |β_r| ≤ c_{r-1}, β_1 absorbs the rest
            let mut ranges: Vec<(i64, i64)> = (1..r - 1).map(|i| (c[i], c[i - 1])).collect();
            ranges.push((-c[r - 2], c[r - 2]));
            for_each_in_box(&ranges, |tail| {
                let beta_r = *tail.last().unwrap();
                let used: i64 = tail[..r - 2].iter().zip(&c[1..]).map(|(b, c)| b - c).sum::<i64>()
                    + (lambda[r - 1] - beta_r).abs();
                if used > rem {
                    return;
                }
                let mut beta = Vec::with_capacity(r);
                beta.push(c[0] + rem - used);
                beta.extend_from_slice(tail);
                *out.entry(Row(beta)).or_default() += 1;
            });
        });
    }
    Ok(out)
}

/// `μ_m(λ, β) = s_{d-1}(β) M_{λ,γ_m}(β) / (s_{d-1}(λ) s_{d-1}(γ_m))`.
pub fn mu_pmf<S: Scalar>(d: usize, lambda: &Row, m: i64, beta: &Row) -> Result<S> {
    check_weight(d, beta)?;
    let mult = pieri_decompose(d, lambda, m)?.get(beta).copied().unwrap_or(0);
    if mult == 0 {
        return Ok(S::zero());
    }
    Ok(mu_from_multiplicity(d, lambda, m, beta, mult))
}

pub(crate) fn mu_from_multiplicity<S: Scalar>(d: usize, lambda: &Row, m: i64, beta: &Row, mult: u64) -> S {
    let num = S::from_count(&dim(d - 1, beta)) * S::from_int(mult as i64);
    let den = S::from_count(&dim(d - 1, lambda)) * S::from_count(&dim(d - 1, &gamma(d, m)));
    num / den
}

/// Largest `m` for which `μ_m(λ, β)` can be non-zero: every admissible `m`
/// satisfies `m ≤ Σλ_i + Σβ_i + 1`.
pub(crate) fn max_contributing_m(lambda: &Row, beta: &Row) -> i64 {
    lambda.iter().map(|x| x.abs()).sum::<i64>() + beta.iter().map(|x| x.abs()).sum::<i64>() + 1
}
