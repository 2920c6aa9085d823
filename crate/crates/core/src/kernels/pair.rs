//! Kernels on pair and triple states used by the intertwining argument.
//!
//! For a depth-`k` pattern process, `Z^k(n)` is row `k` at time `n - 1/2`
//! without its wall entry and `Y^k(n)` is row `k` at time `n`.
//! `S_k` moves `(Z^k, Y^k)`; `Q_k` moves `(Y^{k-1}, Z^k, Y^k)`; `L_k` picks
//! row `k-1` uniformly among the patterns compatible with `Y^k`.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::gt::{dim, interlaces_unchecked, Row};
use crate::kernels::elementary::{blocked_left_pmf, r_pmf, reflected_right_pmf, right_pmf};
use crate::scalar::{JumpParam, Scalar};

/// An element `(z, y)` of `W⁺_{k,k+1}`: `z` has `⌊k/2⌋` entries, `y` has
/// `⌈k/2⌉`, both non-negative, `z ≼ y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WPlusPair {
    pub z: Row,
    pub y: Row,
}

impl WPlusPair {
    pub fn new(z: Row, y: Row) -> Self {
        WPlusPair { z, y }
    }

    pub fn is_valid(&self, k: usize) -> bool {
        self.z.len() == k / 2
            && self.y.len() == k.div_ceil(2)
            && self.z.is_dominant()
            && self.y.is_dominant()
            && interlaces_unchecked(&self.z, &self.y)
    }
}

/// A state `(x, z, y)` of the joint chain: `x` is row `k-1`, `(z, y)` a
/// pair of `W⁺_{k,k+1}`, and `x ≼ y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TripleState {
    pub x: Row,
    pub z: Row,
    pub y: Row,
}

impl TripleState {
    pub fn new(x: Row, z: Row, y: Row) -> Self {
        TripleState { x, z, y }
    }

    pub fn pair(&self) -> WPlusPair {
        WPlusPair::new(self.z.clone(), self.y.clone())
    }

    pub fn is_valid(&self, k: usize) -> bool {
        self.x.len() == k / 2 && self.x.is_dominant() && interlaces_unchecked(&self.x, &self.y) && self.pair().is_valid(k)
    }
}

fn check_pair(k: usize, p: &WPlusPair) -> Result<()> {
    if k == 0 {
        return Err(contract("k must be positive"));
    }
    if p.z.len() != k / 2 || p.y.len() != k.div_ceil(2) || !p.z.is_dominant() || !p.y.is_dominant() {
        return Err(contract(format!("({}, {}) is not a pair of W⁺_{{{k},{}}}", p.z, p.y, k + 1)));
    }
    Ok(())
}

fn check_triple(k: usize, s: &TripleState) -> Result<()> {
    if k < 2 {
        return Err(contract(format!("triple states need k ≥ 2, got {k}")));
    }
    check_pair(k, &s.pair())?;
    if s.x.len() != k / 2 || !s.x.is_dominant() {
        return Err(contract(format!("{} is not a non-negative row {}", s.x, k - 1)));
    }
    Ok(())
}

/// `S_k((z, y), (z', y'))`; depends on the source only through `y`.
///
/// Even `k = 2r`:
/// `(1-q)^k s_k(y')/s_k(y) q^{Σ_{i≤r}(y_i + y'_i - 2z'_i)} w(z'_r) 1{z' ≼ y, y'}`
/// with `w(0) = 1/(1+q)` and `w = 1` otherwise.
/// Odd `k = 2r-1`:
/// `(1-q)^{k-1} s_k(y')/s_k(y) R(y_r, y'_r) q^{Σ_{i<r}(y_i + y'_i - 2z'_i)} 1{z' ≼ y, y'}`.
pub fn s_k_pmf<S: Scalar>(q: &JumpParam<S>, k: usize, from: &WPlusPair, to: &WPlusPair) -> Result<S> {
    check_pair(k, from)?;
    check_pair(k, to)?;
    Ok(s_k_unchecked(q, k, &from.y, &to.z, &to.y))
}

pub(crate) fn s_k_unchecked<S: Scalar>(q: &JumpParam<S>, k: usize, y: &[i64], z2: &[i64], y2: &[i64]) -> S {
    if !interlaces_unchecked(z2, y) || !interlaces_unchecked(z2, y2) {
        return S::zero();
    }
    let ratio = S::from_count(&dim(k, y2)) / S::from_count(&dim(k, y));
    let exponent: i64 = z2.iter().enumerate().map(|(i, z)| y[i] + y2[i] - 2 * z).sum();
    if k % 2 == 0 {
        let wall = if z2[k / 2 - 1] > 0 {
            S::one()
        } else {
            S::one() / q.one_plus_q().clone()
        };
        q.one_minus_q().powi(k as i64) * ratio * q.pow(exponent) * wall
    } else {
        let r = k.div_ceil(2);
        q.one_minus_q().powi(k as i64 - 1) * ratio * r_pmf(q, y[r - 1], y2[r - 1]) * q.pow(exponent)
    }
}

/// `L_k((z, y), (x, z', y'))`: zero unless `(z', y') = (z, y)` and `x ≼ y`;
/// otherwise `s_{k-1}(x)/s_k(y)`, doubled for even `k` when the wall entry
/// `x_{k/2}` is positive (it stands for both signs).
pub fn l_k_pmf<S: Scalar>(k: usize, state: &WPlusPair, target: &TripleState) -> Result<S> {
    check_pair(k, state)?;
    check_triple(k, target)?;
    if target.z != state.z || target.y != state.y || !interlaces_unchecked(&target.x, &target.y) {
        return Ok(S::zero());
    }
    Ok(l_k_weight(k, &target.x, &state.y))
}

pub(crate) fn l_k_weight<S: Scalar>(k: usize, x: &[i64], y: &[i64]) -> S {
    let base = S::from_count(&dim(k - 1, x)) / S::from_count(&dim(k, y));
    if k % 2 == 0 && x[k / 2 - 1] > 0 {
        S::from_int(2) * base
    } else {
        base
    }
}

/// One step of `(Y^{k-1}, Z^k, Y^k)`.
///
/// Sums over the half-step position `v` of row `k-1` (without its wall
/// entry), `v_i ∈ [y'_{i+1}, x_i ∧ z'_i]`, of
/// `S_{k-1}(u, (v, x))` times the left moves `P^{u_i←}(y_i ∧ v_{i-1}, z'_i)`
/// and right moves `P^{→v_{i-1}}(z'_i ∨ x_i, y'_i)` of row `k`, with
/// `v_0 = +∞`. For odd `k` the wall entry of row `k` instead moves by
/// `R^{→v_{r-1}}(y_r ∧ v_{r-1}, y'_r)`.
pub fn q_k_pmf<S: Scalar>(q: &JumpParam<S>, k: usize, from: &TripleState, to: &TripleState) -> Result<S> {
    check_triple(k, from)?;
    check_triple(k, to)?;
    Ok(q_k_unchecked(q, k, &from.x, &from.y, to))
}

pub(crate) fn q_k_unchecked<S: Scalar>(q: &JumpParam<S>, k: usize, u: &[i64], y: &[i64], to: &TripleState) -> S {
    let (x, z2, y2) = (&to.x[..], &to.z[..], &to.y[..]);
    let odd = k % 2 == 1;
    let r = k.div_ceil(2);
    // number of non-wall particles of row k
    let free = if odd { r - 1 } else { r };
    let ranges: Vec<(i64, i64)> = (0..r - 1).map(|i| (y2[i + 1], x[i].min(z2[i]))).collect();
    let mut total = S::zero();
    crate::gt::for_each_in_box(&ranges, |v| {
        let bound = |i: usize| -> Option<i64> { if i == 0 { None } else { Some(v[i - 1]) } };
        let mut term = s_k_unchecked(q, k - 1, u, v, x);
        if term.is_zero() {
            return;
        }
        for i in 0..free {
            let pushed = bound(i).map_or(y[i], |b| y[i].min(b));
            term = term * blocked_left_pmf(q, u[i], pushed, z2[i]);
            term = term * right_pmf(q, bound(i), z2[i].max(x[i]), y2[i]);
        }
        if odd {
            let b = v[r - 2];
            term = term * reflected_right_pmf(q, b, y[r - 1].min(b), y2[r - 1]);
        }
        total = total.clone() + term;
    });
    total
}
