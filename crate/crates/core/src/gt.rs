//! Gelfand-Tsetlin patterns for the orthogonal group.
//!
//! A pattern of depth `k` has rows `x^1, …, x^k`, row `i` having `⌈i/2⌉`
//! entries. Odd rows carry a signed last entry; consecutive absolute-value
//! rows interlace. `s_k(λ)` counts patterns with top row `λ` and equals the
//! dimension of the `SO(k+1)` irreducible representation of highest weight
//! `λ`; [`weyl_dimension`] is an independent route to the same number.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;
use std::sync::{LazyLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

/// Number of entries of row `i` of a pattern, `⌈i/2⌉`.
pub fn row_len(i: usize) -> usize {
    i.div_ceil(2)
}

/// Whether row `i` has a signed last entry.
pub fn row_is_signed(i: usize) -> bool {
    i % 2 == 1
}

/// A row of integers: pattern rows, highest weights, kernel states.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Row(pub Vec<i64>);

impl Row {
    pub fn new(entries: Vec<i64>) -> Self {
        Row(entries)
    }

    pub fn zeros(len: usize) -> Self {
        Row(vec![0; len])
    }

    /// `(m, 0, …, 0)` of the given length.
    pub fn gamma(len: usize, m: i64) -> Self {
        let mut v = vec![0; len];
        if let Some(first) = v.first_mut() {
            *first = m;
        }
        Row(v)
    }

    pub fn abs(&self) -> Row {
        Row(self.0.iter().map(|x| x.abs()).collect())
    }

    pub fn is_weakly_decreasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    /// Non-negative and weakly decreasing.
    pub fn is_dominant(&self) -> bool {
        self.is_nonnegative() && self.is_weakly_decreasing()
    }

    /// Entries before the last are non-negative and weakly decreasing and the
    /// last entry satisfies `|last| ≤ previous`.
    pub fn is_signed_dominant(&self) -> bool {
        self.abs().is_weakly_decreasing() && self.0[..self.len().saturating_sub(1)].iter().all(|&x| x >= 0)
    }

    /// The row with its last entry negated.
    pub fn flip_last(&self) -> Row {
        let mut v = self.0.clone();
        if let Some(last) = v.last_mut() {
            *last = -*last;
        }
        Row(v)
    }

    pub fn first(&self) -> i64 {
        self.0.first().copied().unwrap_or(0)
    }

    pub fn last(&self) -> i64 {
        self.0.last().copied().unwrap_or(0)
    }
}

impl Deref for Row {
    type Target = [i64];

    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for Row {
    fn from(v: Vec<i64>) -> Self {
        Row(v)
    }
}

impl<const N: usize> From<[i64; N]> for Row {
    fn from(v: [i64; N]) -> Self {
        Row(v.to_vec())
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for Row {
    type Err = Error;

    /// Comma-separated integers, optionally wrapped in parentheses. The empty
    /// string is the empty row.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if s.is_empty() {
            return Ok(Row(Vec::new()));
        }
        s.split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()
            .map(Row)
    }
}

/// `lower ≼ upper`: `x_n ≤ y_n ≤ x_{n-1} ≤ … ≤ x_1 ≤ y_1`, plus
/// `y_{n+1} ≤ x_n` when `upper` is one entry longer.
///
/// Both rows must be weakly decreasing and `len(upper) - len(lower) ∈ {0, 1}`.
pub fn interlaces(lower: &[i64], upper: &[i64]) -> Result<bool> {
    if upper.len() != lower.len() && upper.len() != lower.len() + 1 {
        return Err(contract(format!(
            "cannot interlace rows of lengths {} and {}",
            lower.len(),
            upper.len()
        )));
    }
    if !lower.windows(2).all(|w| w[0] >= w[1]) || !upper.windows(2).all(|w| w[0] >= w[1]) {
        return Err(contract("interlacing is defined for weakly decreasing rows"));
    }
    Ok(interlaces_unchecked(lower, upper))
}

/// [`interlaces`] without the precondition checks; rows of incompatible
/// length simply do not interlace.
pub(crate) fn interlaces_unchecked(lower: &[i64], upper: &[i64]) -> bool {
    if upper.len() != lower.len() && upper.len() != lower.len() + 1 {
        return false;
    }
    lower.iter().enumerate().all(|(i, &x)| {
        let below = upper.get(i + 1).is_none_or(|&y| y <= x);
        below && x <= upper[i]
    })
}

/// A Gelfand-Tsetlin pattern, row 1 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pattern {
    rows: Vec<Row>,
}

impl Pattern {
    /// Builds a pattern without validation; see [`pattern_is_valid`].
    pub fn from_rows(rows: Vec<Row>) -> Self {
        Pattern { rows }
    }

    pub fn zeros(k: usize) -> Self {
        Pattern {
            rows: (1..=k).map(|i| Row::zeros(row_len(i))).collect(),
        }
    }

    /// Depth `k`.
    pub fn depth(&self) -> usize {
        self.rows.len()
    }

    /// Row `i`, 1-based.
    pub fn row(&self, i: usize) -> &Row {
        &self.rows[i - 1]
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Particle `(i, j)`, both 1-based.
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i - 1].0[j - 1]
    }

    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        self.rows[i - 1].0[j - 1] = value;
    }

    pub fn top(&self) -> &Row {
        self.rows.last().expect("pattern has at least one row")
    }

    pub fn is_valid(&self) -> bool {
        pattern_is_valid(self)
    }

    pub fn into_rows(self) -> Vec<Row> {
        self.rows
    }
}

/// Row shapes match `⌈i/2⌉`, even rows are non-negative, odd rows have a
/// non-negative prefix, and consecutive absolute-value rows interlace.
pub fn pattern_is_valid(p: &Pattern) -> bool {
    if p.rows.is_empty() {
        return false;
    }
    for (idx, row) in p.rows.iter().enumerate() {
        let i = idx + 1;
        if row.len() != row_len(i) {
            return false;
        }
        let prefix_ok = if row_is_signed(i) {
            row[..row.len() - 1].iter().all(|&x| x >= 0)
        } else {
            row.is_nonnegative()
        };
        if !prefix_ok || !row.abs().is_weakly_decreasing() {
            return false;
        }
    }
    p.rows
        .windows(2)
        .all(|w| interlaces_unchecked(&w[0].abs(), &w[1].abs()))
}

/// Calls `f` on every point of the box `Π [lo_i, hi_i]` in lexicographic
/// order. An empty box (some `lo > hi`) yields nothing; zero dimensions yield
/// the single empty point.
pub(crate) fn for_each_in_box(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    if ranges.iter().any(|&(lo, hi)| lo > hi) {
        return;
    }
    let mut point: Vec<i64> = ranges.iter().map(|&(lo, _)| lo).collect();
    loop {
        f(&point);
        let mut i = ranges.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if point[i] < ranges[i].1 {
                point[i] += 1;
                for (p, r) in point[i + 1..].iter_mut().zip(&ranges[i + 1..]) {
                    *p = r.0;
                }
                break;
            }
        }
    }
}

/// Coordinate ranges of the non-negative rows of length `lower_len` that
/// interlace below `upper` (absolute values).
pub(crate) fn lower_ranges(upper: &[i64], lower_len: usize) -> Vec<(i64, i64)> {
    (0..lower_len)
        .map(|i| {
            let lo = upper.get(i + 1).map_or(0, |y| y.abs());
            (lo, upper[i].abs())
        })
        .collect()
}

/// All rows `x` of length `lower_len` with `|x| ≼ |upper|`, in lexicographic
/// order. With `signed_last`, a row whose last entry `m` is positive appears
/// as both `+m` and `-m`.
pub fn enumerate_lower_rows(upper: &Row, lower_len: usize, signed_last: bool) -> Result<Vec<Row>> {
    if lower_len > upper.len() || lower_len + 1 < upper.len() {
        return Err(contract(format!(
            "row of length {lower_len} cannot interlace below a row of length {}",
            upper.len()
        )));
    }
    if !upper.abs().is_weakly_decreasing() {
        return Err(contract(format!("{upper} is not weakly decreasing")));
    }
    let mut out = Vec::new();
    for_each_in_box(&lower_ranges(upper, lower_len), |x| {
        out.push(Row(x.to_vec()));
        if signed_last && x.last().is_some_and(|&m| m > 0) {
            let mut neg = x.to_vec();
            *neg.last_mut().unwrap() *= -1;
            out.push(Row(neg));
        }
    });
    out.sort();
    Ok(out)
}

/// Non-negative weakly decreasing rows of length `len` with entries `≤ max`,
/// in lexicographic order.
pub fn dominant_rows(len: usize, max: i64) -> Vec<Row> {
    fn rec(len: usize, cap: i64, prefix: &mut Vec<i64>, out: &mut Vec<Row>) {
        if prefix.len() == len {
            out.push(Row(prefix.clone()));
            return;
        }
        for v in 0..=cap {
            prefix.push(v);
            rec(len, v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if max >= 0 {
        rec(len, max, &mut Vec::with_capacity(len), &mut out);
    }
    out.sort();
    out
}

/// Checks that `λ` has the shape of row `k`.
pub fn check_row_shape(k: usize, lambda: &Row) -> Result<()> {
    if k == 0 {
        return Err(contract("pattern depth must be positive"));
    }
    if lambda.len() != row_len(k) {
        return Err(contract(format!(
            "row {k} has {} entries, got {lambda}",
            row_len(k)
        )));
    }
    let ok = if row_is_signed(k) {
        lambda.is_signed_dominant()
    } else {
        lambda.is_dominant()
    };
    if !ok {
        return Err(contract(format!("{lambda} is not a valid row {k}")));
    }
    Ok(())
}

type MemoKey = (usize, Vec<i64>);

static COUNT_MEMO: LazyLock<RwLock<HashMap<MemoKey, BigUint>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// `s_k(λ)`, the number of patterns of depth `k` with top row `λ`.
pub fn count_patterns(k: usize, lambda: &Row) -> Result<BigUint> {
    check_row_shape(k, lambda)?;
    Ok(dim(k, lambda))
}

/// `s_k(λ)` without shape checks. Only `|λ|` matters.
pub(crate) fn dim(k: usize, lambda: &[i64]) -> BigUint {
    if k <= 1 {
        return BigUint::one();
    }
    let key: Vec<i64> = lambda.iter().map(|x| x.abs()).collect();
    if let Some(v) = COUNT_MEMO.read().unwrap().get(&(k, key.clone())) {
        return v.clone();
    }
    let lower_signed = row_is_signed(k - 1);
    let mut total = BigUint::zero();
    for_each_in_box(&lower_ranges(&key, row_len(k - 1)), |mu| {
        let c = dim(k - 1, mu);
        if lower_signed && mu.last().is_some_and(|&m| m > 0) {
            total += &c * 2u32;
        } else {
            total += c;
        }
    });
    COUNT_MEMO.write().unwrap().insert((k, key), total.clone());
    total
}

/// All patterns of depth `k` with top row `λ`, by back-tracking the counting
/// recursion. Patterns come out sorted.
pub fn enumerate_patterns(k: usize, lambda: &Row) -> Result<Vec<Pattern>> {
    check_row_shape(k, lambda)?;
    fn rec(i: usize, rows: &mut Vec<Row>, out: &mut Vec<Pattern>) {
        if i == 0 {
            let mut r = rows.clone();
            r.reverse();
            out.push(Pattern { rows: r });
            return;
        }
        let upper = rows.last().unwrap().clone();
        for row in enumerate_lower_rows(&upper, row_len(i), row_is_signed(i)).unwrap() {
            rows.push(row);
            rec(i - 1, rows, out);
            rows.pop();
        }
    }
    let mut out = Vec::new();
    let mut rows = vec![lambda.clone()];
    rec(k - 1, &mut rows, &mut out);
    out.sort();
    Ok(out)
}

/// Checks `λ ∈ W_d`: length `⌊d/2⌋`; non-negative and weakly decreasing for
/// odd `d`; for even `d` the last entry may be negative with
/// `|λ_r| ≤ λ_{r-1}`.
pub fn check_weight(d: usize, lambda: &Row) -> Result<()> {
    if d < 3 {
        return Err(contract(format!("SO(d) weights need d ≥ 3, got d = {d}")));
    }
    if lambda.len() != d / 2 {
        return Err(contract(format!("weights of SO({d}) have {} entries, got {lambda}", d / 2)));
    }
    let ok = if d % 2 == 1 {
        lambda.is_dominant()
    } else {
        lambda.is_signed_dominant()
    };
    if !ok {
        return Err(contract(format!("{lambda} is not a dominant weight of SO({d})")));
    }
    Ok(())
}

/// Weyl's dimension formula for `SO(d)` evaluated exactly.
///
/// Uses `ℓ = λ + ρ` with `ρ_i = r - i + 1/2` (odd `d`) or `r - i` (even
/// `d`); coordinates are doubled in the odd case to stay integral. An empty
/// product is 1.
pub fn weyl_dimension(d: usize, lambda: &Row) -> Result<BigUint> {
    check_weight(d, lambda)?;
    let r = d / 2;
    let odd = d % 2 == 1;
    let (l, rho): (Vec<BigInt>, Vec<BigInt>) = (0..r)
        .map(|i| {
            let rho = if odd { 2 * (r - i) as i64 - 1 } else { (r - i - 1) as i64 };
            let l = if odd { 2 * lambda[i] + rho } else { lambda[i] + rho };
            (BigInt::from(l), BigInt::from(rho))
        })
        .unzip();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..r {
        for j in i + 1..r {
            num *= &l[i] * &l[i] - &l[j] * &l[j];
            den *= &rho[i] * &rho[i] - &rho[j] * &rho[j];
        }
        if odd {
            num *= &l[i];
            den *= &rho[i];
        }
    }
    let (q, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero());
    q.to_biguint()
        .ok_or_else(|| Error::Numeric(format!("negative dimension for {lambda}")))
}
