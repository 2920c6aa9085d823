//! Exhaustive exact checks of the kernel identities behind the top-row marginal.

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{contract, Result};
use crate::gt::{dominant_rows, enumerate_lower_rows, Row};
use crate::kernels::elementary::{blocked_left_pmf, blocked_right_pmf, r_pmf, reflected_right_pmf};
use crate::kernels::pair::{l_k_weight, q_k_unchecked, s_k_unchecked, TripleState};
use crate::scalar::{format_rational, JumpParam, Scalar};

/// A tuple at which the two sides of an identity differ.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub identity: u8,
    pub args: Vec<i64>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DesintegrationReport {
    pub q: String,
    pub bound: i64,
    /// Number of tuples checked for identities 1 to 4.
    pub checked: [usize; 4],
    pub violations: Vec<Violation>,
}

impl DesintegrationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn weight(x: i64) -> BigRational {
    BigRational::from_int(if x > 0 { 2 } else { 1 })
}

/// Checks the four summation identities satisfied by the one-particle laws,
/// over every admissible tuple with entries in `0..=bound`:
///
/// 1. `0 < z ≤ y`: `Σ_{u=0}^{z} w(u) R(u,x) P^{u←}(y,z) = (1-q) w(x) q^{x∨z + y - 2z}`
///    with `w(0) = 1`, `w(u) = 2` for `u > 0`;
/// 2. `a ≤ y ≤ x`: `Σ_{u=a}^{y} q^u P^{u←}(x,y) = q^{x-y+a}`;
/// 3. `x ≤ y ≤ a`: `Σ_{v=y}^{a} q^{-v} P^{→v}(x,y) = q^{y-x-a}`;
/// 4. `1 ≤ y' ≤ a`: `Σ_{v=y'}^{a} q^{v∨y - 2v} R^{→v}(y∧v, y') = q^{-a} R(y,y')/(1-q)`.
pub fn check_desintegration(q: &JumpParam<BigRational>, bound: i64) -> Result<DesintegrationReport> {
    if bound < 2 {
        return Err(contract(format!("bound must be at least 2, got {bound}")));
    }
    let mut checked = [0usize; 4];
    let mut violations = Vec::new();
    let mut record = |id: u8, args: Vec<i64>, lhs: BigRational, rhs: BigRational| {
        checked[id as usize - 1] += 1;
        if lhs != rhs {
            violations.push(Violation {
                identity: id,
                args,
                lhs: format_rational(&lhs),
                rhs: format_rational(&rhs),
            });
        }
    };
    let one_minus = q.one_minus_q().clone();
    for x in 0..=bound {
        for y in 1..=bound {
            for z in 1..=y {
                let lhs = (0..=z).fold(BigRational::zero(), |acc, u| {
                    acc + weight(u) * r_pmf(q, u, x) * blocked_left_pmf(q, u, y, z)
                });
                let rhs = one_minus.clone() * weight(x) * q.pow(x.max(z) + y - 2 * z);
                record(1, vec![x, y, z], lhs, rhs);
            }
        }
    }
    for x in 0..=bound {
        for y in 0..=x {
            for a in 0..=y {
                let lhs = (a..=y).fold(BigRational::zero(), |acc, u| acc + q.pow(u) * blocked_left_pmf(q, u, x, y));
                record(2, vec![x, y, a], lhs, q.pow(x - y + a));
            }
        }
    }
    for a in 0..=bound {
        for y in 0..=a {
            for x in 0..=y {
                let lhs =
                    (y..=a).fold(BigRational::zero(), |acc, v| acc + q.pow(-v) * blocked_right_pmf(q, v, x, y));
                record(3, vec![x, y, a], lhs, q.pow(y - x - a));
            }
        }
    }
    for y in 0..=bound {
        for a in 1..=bound {
            for y2 in 1..=a {
                let lhs = (y2..=a).fold(BigRational::zero(), |acc, v| {
                    acc + q.pow(v.max(y) - 2 * v) * reflected_right_pmf(q, v, y.min(v), y2)
                });
                let rhs = q.pow(-a) * r_pmf(q, y, y2) / one_minus.clone();
                record(4, vec![y, y2, a], lhs, rhs);
            }
        }
    }
    Ok(DesintegrationReport {
        q: format_rational(q.q()),
        bound,
        checked,
        violations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntertwiningReport {
    pub k: usize,
    pub q: String,
    pub bound: i64,
    /// Number of `((z, y), (x, z', y'))` pairs compared.
    pub cases: usize,
    pub max_discrepancy: String,
    /// A case attaining the maximum, when it is non-zero.
    pub worst: Option<(Row, Row, TripleState)>,
}

impl IntertwiningReport {
    pub fn passed(&self) -> bool {
        self.worst.is_none()
    }
}

/// Non-negative rows `x` of length `len` with `x ≼ y`.
fn lower(y: &Row, len: usize) -> Vec<Row> {
    enumerate_lower_rows(y, len, false).expect("dominant rows always enumerate")
}

/// Compares `L_k Q_k` and `S_k L_k` entrywise on every `(z, y)` and target
/// `(x, z', y')` with all coordinates at most `bound`.
pub fn check_intertwining(q: &JumpParam<BigRational>, k: usize, bound: i64) -> Result<IntertwiningReport> {
    if !(2..=5).contains(&k) {
        return Err(contract(format!("intertwining is checked for k in 2..=5, got {k}")));
    }
    if bound < 1 {
        return Err(contract("bound must be positive"));
    }
    let (zl, yl, xl) = (k / 2, k.div_ceil(2), k / 2);
    let mut targets = Vec::new();
    for y2 in dominant_rows(yl, bound) {
        for z2 in lower(&y2, zl) {
            for x in lower(&y2, xl) {
                targets.push(TripleState::new(x, z2.clone(), y2.clone()));
            }
        }
    }
    let sources: Vec<(Row, Row)> = dominant_rows(yl, bound)
        .into_iter()
        .flat_map(|y| lower(&y, zl).into_iter().map(move |z| (z, y.clone())))
        .collect();

    let per_source: Vec<(usize, BigRational, Option<(Row, Row, TripleState)>)> = sources
        .par_iter()
        .map(|(z, y)| {
            let us: Vec<(Row, BigRational)> = lower(y, xl)
                .into_iter()
                .map(|u| {
                    let w = l_k_weight::<BigRational>(k, &u, y);
                    (u, w)
                })
                .collect();
            let mut worst = BigRational::zero();
            let mut arg = None;
            for t in &targets {
                let left = us.iter().fold(BigRational::zero(), |acc, (u, w)| {
                    acc + w.clone() * q_k_unchecked(q, k, u, y, t)
                });
                let right = s_k_unchecked(q, k, y, &t.z, &t.y) * l_k_weight::<BigRational>(k, &t.x, &t.y);
                let diff = Scalar::abs(&(left - right));
                if diff > worst {
                    worst = diff;
                    arg = Some((z.clone(), y.clone(), t.clone()));
                }
            }
            (targets.len(), worst, arg)
        })
        .collect();

    let mut cases = 0;
    let mut max = BigRational::zero();
    let mut worst = None;
    for (n, d, a) in per_source {
        cases += n;
        if d > max {
            max = d;
            worst = a;
        }
    }
    Ok(IntertwiningReport {
        k,
        q: format_rational(q.q()),
        bound,
        cases,
        max_discrepancy: format_rational(&max),
        worst,
    })
}
