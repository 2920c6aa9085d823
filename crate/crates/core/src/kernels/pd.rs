//! The kernels `P_d` on `W_d` and the top-row kernels `R_k`.

use crate::error::{contract, Result};
use crate::gt::{check_weight, dim, Row};
use crate::kernels::elementary::r_pmf;
use crate::kernels::pieri::{max_contributing_m, mu_from_multiplicity, nu_pmf, pieri_decompose};
use crate::kernels::tails::nu_tail_bound;
use crate::scalar::{JumpParam, Scalar};

/// `Σ_{c=lo}^{hi} q^{e0 - 2c}`, optionally giving the `c = 0` term weight
/// `1/(1+q)`.
fn coordinate_sum<S: Scalar>(q: &JumpParam<S>, e0: i64, lo: i64, hi: i64, wall: bool) -> S {
    let mut acc = S::zero();
    for c in lo..=hi {
        let t = q.pow(e0 - 2 * c);
        if wall && c == 0 {
            acc = acc + t / q.one_plus_q().clone();
        } else {
            acc = acc + t;
        }
    }
    acc
}

/// `P_d(λ, β)` in closed form, as a sum over `c` interlacing below both
/// weights.
///
/// The interlacing constraints on `c` are one interval per coordinate, so
/// the sum is evaluated as a product of one-dimensional sums.
pub fn p_d_closed<S: Scalar>(q: &JumpParam<S>, d: usize, lambda: &Row, beta: &Row) -> Result<S> {
    check_weight(d, lambda)?;
    check_weight(d, beta)?;
    Ok(p_d_unchecked(q, d, lambda, beta))
}

pub(crate) fn p_d_unchecked<S: Scalar>(q: &JumpParam<S>, d: usize, lambda: &[i64], beta: &[i64]) -> S {
    let r = d / 2;
    let ratio = S::from_count(&dim(d - 1, beta)) / S::from_count(&dim(d - 1, lambda));
    if d % 2 == 1 {
        let mut prod = q.one_minus_q().powi(d as i64 - 1) * ratio;
        for i in 0..r {
            let lo = lambda.get(i + 1).copied().unwrap_or(0).max(beta.get(i + 1).copied().unwrap_or(0));
            let hi = lambda[i].min(beta[i]);
            if lo > hi {
                return S::zero();
            }
            prod = prod * coordinate_sum(q, lambda[i] + beta[i], lo, hi, i == r - 1);
        }
        prod
    } else {
        let mut prod = q.one_minus_q().powi(d as i64 - 1) / q.one_plus_q().clone()
            * ratio
            * q.pow((lambda[r - 1] - beta[r - 1]).abs());
        for i in 0..r - 1 {
            let lo = lambda[i + 1].abs().max(beta[i + 1].abs());
            let hi = lambda[i].min(beta[i]);
            if lo > hi {
                return S::zero();
            }
            prod = prod * coordinate_sum(q, lambda[i] + beta[i], lo, hi, false);
        }
        prod
    }
}

/// `Σ_{m ≤ m_max} μ_m(λ, β) ν(m)` together with an upper bound on the
/// neglected terms.
///
/// Since `μ_m ≤ 1` and `μ_m(λ, β) = 0` once `m` exceeds
/// `Σλ + Σβ + 1`, the tail is at most `Σ ν(m)` over the remaining
/// contributing `m` (zero when `m_max` already covers them).
pub fn p_d_series<S: Scalar>(q: &JumpParam<S>, d: usize, lambda: &Row, beta: &Row, m_max: i64) -> Result<(S, S)> {
    check_weight(d, lambda)?;
    check_weight(d, beta)?;
    if m_max < 0 {
        return Err(contract("m_max must be non-negative"));
    }
    let m_hi = max_contributing_m(lambda, beta);
    let mut sum = S::zero();
    for m in 0..=m_max.min(m_hi) {
        let mult = pieri_decompose(d, lambda, m)?.get(beta).copied().unwrap_or(0);
        if mult > 0 {
            sum = sum + mu_from_multiplicity::<S>(d, lambda, m, beta, mult) * nu_pmf(q, d, m)?;
        }
    }
    let mut tail = S::zero();
    for m in m_max + 1..=m_hi {
        tail = tail + nu_pmf(q, d, m)?;
    }
    Ok((sum, tail))
}

/// Certified bound on `Σ_{β_1 > radius} P_d(λ, β)`: reaching such `β` needs
/// `m > radius - λ_1`.
pub fn p_d_tail_bound<S: Scalar>(q: &JumpParam<S>, d: usize, lambda: &Row, radius: i64) -> S {
    nu_tail_bound(q, d, radius - lambda.first())
}

/// Transition kernel `R_k` of the top row `X^k` observed at integer times,
/// on non-negative rows of length `⌈k/2⌉`.
///
/// `R_1 = R`; `R_k = P_{k+1}` for even `k`; for odd `k ≥ 3`,
/// `R_k(x, y) = P_{k+1}(x, y) + P_{k+1}(x, ỹ)` when `y` has a non-zero last
/// entry, `ỹ` being `y` with that entry negated.
pub fn r_k_pmf<S: Scalar>(q: &JumpParam<S>, k: usize, x: &Row, y: &Row) -> Result<S> {
    if k == 0 {
        return Err(contract("k must be positive"));
    }
    let len = k.div_ceil(2);
    for row in [x, y] {
        if row.len() != len || !row.is_dominant() {
            return Err(contract(format!("{row} is not a non-negative row {k}")));
        }
    }
    Ok(r_k_unchecked(q, k, x, y))
}

pub(crate) fn r_k_unchecked<S: Scalar>(q: &JumpParam<S>, k: usize, x: &[i64], y: &[i64]) -> S {
    if k == 1 {
        return r_pmf(q, x[0], y[0]);
    }
    let d = k + 1;
    let direct = p_d_unchecked(q, d, x, y);
    if k % 2 == 1 && y.last().is_some_and(|&v| v != 0) {
        let mut flipped = y.to_vec();
        *flipped.last_mut().unwrap() *= -1;
        direct + p_d_unchecked(q, d, x, &flipped)
    } else {
        direct
    }
}
