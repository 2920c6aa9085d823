//! One-particle jump laws.
//!
//! All evaluators return 0 outside their support, so products of them can be
//! summed over loose index ranges.

use crate::scalar::{JumpParam, Scalar};

/// `P(ξ = x) = q^x (1-q)`.
pub fn geometric_pmf<S: Scalar>(q: &JumpParam<S>, x: i64) -> S {
    if x < 0 {
        return S::zero();
    }
    q.pow(x) * q.one_minus_q().clone()
}

/// The wall kernel `R(x, ·)`, law of `|x + ξ - ξ'|`.
pub fn r_pmf<S: Scalar>(q: &JumpParam<S>, x: i64, y: i64) -> S {
    if x < 0 || y < 0 {
        return S::zero();
    }
    let c = q.one_minus_q().clone() / q.one_plus_q().clone();
    if y >= 1 {
        c * (q.pow((x - y).abs()) + q.pow(x + y))
    } else {
        c * q.pow(x)
    }
}

/// Law of `max(a, x - ξ)`: a left jump blocked at `a`.
pub fn blocked_left_pmf<S: Scalar>(q: &JumpParam<S>, a: i64, x: i64, y: i64) -> S {
    if !(a <= y && y <= x) {
        return S::zero();
    }
    if y > a {
        q.one_minus_q().clone() * q.pow(x - y)
    } else {
        q.pow(x - a)
    }
}

/// Law of `min(b, x + ξ)`: a right jump blocked at `b`.
pub fn blocked_right_pmf<S: Scalar>(q: &JumpParam<S>, b: i64, x: i64, y: i64) -> S {
    if !(x <= y && y <= b) {
        return S::zero();
    }
    if y < b {
        q.one_minus_q().clone() * q.pow(y - x)
    } else {
        q.pow(b - x)
    }
}

/// Law of `min(b, |x + ξ - ξ'|)`: the wall move capped at `b`.
pub fn reflected_right_pmf<S: Scalar>(q: &JumpParam<S>, b: i64, x: i64, y: i64) -> S {
    if x < 0 || x > b || y < 0 || y > b {
        return S::zero();
    }
    if y < b {
        return r_pmf(q, x, y);
    }
    if y == 0 {
        return S::one();
    }
    q.pow(b) * (q.pow(-x) + q.pow(x)) / q.one_plus_q().clone()
}

/// `P(x, y) = (1-q) q^{y-x}` for `y ≥ x`: an unblocked right jump.
pub fn free_shift_pmf<S: Scalar>(q: &JumpParam<S>, x: i64, y: i64) -> S {
    if y < x {
        return S::zero();
    }
    q.one_minus_q().clone() * q.pow(y - x)
}

/// Right jump from `x` to `y`, blocked at `bound` when there is one.
pub(crate) fn right_pmf<S: Scalar>(q: &JumpParam<S>, bound: Option<i64>, x: i64, y: i64) -> S {
    match bound {
        Some(b) => blocked_right_pmf(q, b, x, y),
        None => free_shift_pmf(q, x, y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    fn half() -> JumpParam<BigRational> {
        JumpParam::exact(1, 2).unwrap()
    }

    #[test]
    fn geometric_values_and_partial_sum() {
        let q = half();
        assert_eq!(geometric_pmf(&q, 0), ratio(1, 2));
        assert_eq!(geometric_pmf(&q, 3), ratio(1, 16));
        let s = (0..=60).fold(BigRational::zero(), |a, x| a + geometric_pmf(&q, x));
        assert_eq!(s, BigRational::one() - q.pow(61));
    }

    #[test]
    fn r_values() {
        let q = half();
        assert_eq!(r_pmf(&q, 0, 0), ratio(1, 3));
        assert_eq!(r_pmf(&q, 0, 2), ratio(1, 6));
    }

    /// Brute-force convolution of `|x + ξ - ξ'|` truncated at `n` per variable.
    #[test]
    fn r_matches_convolution() {
        let q = JumpParam::new(0.5_f64).unwrap();
        for x in 0..=5 {
            let mut law = vec![0.0; 200];
            for a in 0..90 {
                for b in 0..90 {
                    let y = (x + a - b as i64).unsigned_abs() as usize;
                    law[y] += geometric_pmf(&q, a) * geometric_pmf(&q, b);
                }
            }
            for (y, p) in law.iter().enumerate().take(40) {
                assert!((p - r_pmf(&q, x, y as i64)).abs() < 1e-12, "x={x} y={y}");
            }
        }
        let qe = half();
        for x in 0..=5 {
            // Σ_y R(x,y) = 1 exactly: the tail Σ_{y>x} is a geometric series
            let head = (0..=x).fold(BigRational::zero(), |a, y| a + r_pmf(&qe, x, y));
            let c = qe.one_minus_q().clone() / qe.one_plus_q().clone();
            let tail = c * (BigRational::one() + qe.pow(2 * x)) * qe.q().clone() / qe.one_minus_q().clone();
            assert_eq!(head + tail, BigRational::one(), "x={x}");
        }
    }

    #[test]
    fn blocked_values_and_mass() {
        let q = half();
        assert_eq!(blocked_left_pmf(&q, 0, 3, 0), ratio(1, 8));
        assert_eq!(blocked_left_pmf(&q, 1, 3, 2), ratio(1, 4));
        assert_eq!(blocked_right_pmf(&q, 4, 1, 4), ratio(1, 8));
        assert_eq!(blocked_right_pmf(&q, 4, 1, 2), ratio(1, 4));
        for x in 0..=8 {
            for a in 0..=x {
                let s = (a..=x).fold(BigRational::zero(), |acc, y| acc + blocked_left_pmf(&q, a, x, y));
                assert!(s.is_one());
            }
            for b in x..=8 {
                let s = (x..=b).fold(BigRational::zero(), |acc, y| acc + blocked_right_pmf(&q, b, x, y));
                assert!(s.is_one());
            }
        }
    }

    #[test]
    fn reflected_values_and_mass() {
        let q = half();
        assert_eq!(reflected_right_pmf(&q, 0, 0, 0), ratio(1, 1));
        assert_eq!(reflected_right_pmf(&q, 3, 1, 3), ratio(5, 24));
        for b in 0..=6 {
            for x in 0..=b {
                let s = (0..=b).fold(BigRational::zero(), |acc, y| acc + reflected_right_pmf(&q, b, x, y));
                assert!(s.is_one(), "b={b} x={x}");
            }
        }
    }

    #[test]
    fn free_shift_values() {
        let q = half();
        assert_eq!(free_shift_pmf(&q, 0, 0), ratio(1, 2));
        assert_eq!(free_shift_pmf(&q, 2, 5), ratio(1, 16));
        assert!(free_shift_pmf(&q, 2, 1).is_zero());
        let s = (2..=62).fold(BigRational::zero(), |a, y| a + free_shift_pmf(&q, 2, y));
        assert_eq!(s, BigRational::one() - q.pow(61));
    }
}
