//! Rigorous upper bounds on neglected tail mass.
//!
//! All truncated kernels are dominated coordinatewise by sums of geometric
//! variables, so every bound here reduces to a negative binomial tail.

use num_bigint::BigUint;
use num_integer::binomial;

use crate::scalar::{JumpParam, Scalar};

fn binom<S: Scalar>(n: u64, k: u64) -> S {
    S::from_count(&binomial(BigUint::from(n), BigUint::from(k)))
}

/// Upper bound on `P(ξ_1 + … + ξ_n > t)` for i.i.d. geometric `ξ_i`.
///
/// Terms `C(m+n-1, n-1)(1-q)^n q^m` are summed explicitly while their ratio
/// `q(m+n)/(m+1)` exceeds `(1+q)/2`; it decreases to `q`, so the rest is
/// bounded by a geometric series with the current ratio.
pub fn negbin_tail_bound<S: Scalar>(q: &JumpParam<S>, n: usize, t: i64) -> S {
    if n == 0 {
        return S::zero();
    }
    if t < 0 {
        return S::one();
    }
    let n = n as u64;
    let lead = q.one_minus_q().powi(n as i64);
    let term = |m: u64| -> S { binom::<S>(m + n - 1, n - 1) * lead.clone() * q.pow(m as i64) };
    let ratio = |m: u64| -> S { q.q().clone() * S::from_int((m + n) as i64) / S::from_int((m + 1) as i64) };
    let cut = (S::one() + q.q().clone()) / S::from_int(2);
    let mut m = (t + 1) as u64;
    let mut acc = S::zero();
    while ratio(m) > cut {
        acc = acc + term(m);
        m += 1;
        if acc >= S::one() {
            return S::one();
        }
    }
    let rho = ratio(m);
    let bound = acc + term(m) / (S::one() - rho);
    if bound > S::one() {
        S::one()
    } else {
        bound
    }
}

/// Upper bound on `Σ_{m > big_m} ν(m)` for the jump-size law of `SO(d)`.
///
/// `s_{d-1}(γ_m) ≤ 2·C(m+d-2, d-2)`, so `ν(m)` is at most `2/(1+q)` times a
/// negative binomial pmf with `d-1` trials.
pub fn nu_tail_bound<S: Scalar>(q: &JumpParam<S>, d: usize, big_m: i64) -> S {
    let b = S::from_int(2) / q.one_plus_q().clone() * negbin_tail_bound(q, d - 1, big_m);
    if b > S::one() {
        S::one()
    } else {
        b
    }
}

/// Certified bound on the mass that `R_k(x, ·)` (equivalently `P_{k+1}`)
/// puts on rows whose first entry exceeds `radius`.
pub fn r_k_row_tail_bound<S: Scalar>(q: &JumpParam<S>, k: usize, x: &[i64], radius: i64) -> S {
    let head = x.first().copied().unwrap_or(0);
    if k == 1 {
        // |x + ξ - ξ'| > radius forces ξ > radius - x
        negbin_tail_bound(q, 1, radius - head)
    } else {
        nu_tail_bound(q, k + 1, radius - head)
    }
}
