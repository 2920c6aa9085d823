//! Deterministic half-step updates of the discrete-time pattern dynamics.
//!
//! Row `l` is updated from rows `l-1` and `l` only, in increasing `l`.
//! Particles `(2l-1, l)` are the wall particles.

use serde::{Deserialize, Serialize};

use crate::dynamics::noise::NoiseDraw;
use crate::gt::{row_len, Pattern, Row};

/// One full step together with its intermediate states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfStepState {
    pub at_integer: Pattern,
    pub at_half: Option<Pattern>,
    /// Pushed positions `X̃` before the left jumps, indexed `[i-1][j-1]`.
    pub intermediate: Option<Vec<Vec<i64>>>,
}

fn check_shapes(x: &Pattern, noise: &NoiseDraw) {
    assert_eq!(x.depth(), noise.depth(), "pattern depth and noise depth differ");
}

fn left_rows(x: &[Row], noise: &NoiseDraw, mut pushed: Option<&mut Vec<Vec<i64>>>) -> Vec<Row> {
    let k = x.len();
    let mut out: Vec<Row> = Vec::with_capacity(k);
    if k == 0 {
        return out;
    }
    out.push(x[0].clone());
    if let Some(p) = pushed.as_deref_mut() {
        p.clear();
        p.push(x[0].to_vec());
    }
    for l in 2..=k {
        let cur = &x[l - 1];
        let below_now = &x[l - 2];
        let below_half = &out[l - 2];
        let free = l / 2;
        let mut tilde = Vec::with_capacity(row_len(l));
        let mut row = Vec::with_capacity(row_len(l));
        for i in 0..row_len(l) {
            let t = if i == 0 { cur[0] } else { cur[i].min(below_half[i - 1]) };
            tilde.push(t);
            row.push(if i < free { below_now[i].max(t - noise.half[l - 1][i]) } else { t });
        }
        if let Some(p) = pushed.as_deref_mut() {
            p.push(tilde);
        }
        out.push(Row(row));
    }
    out
}

fn right_rows(h: &[Row], noise: &NoiseDraw) -> Vec<Row> {
    let k = h.len();
    let mut out: Vec<Row> = Vec::with_capacity(k);
    if k == 0 {
        return out;
    }
    out.push(Row(vec![(h[0][0] + noise.full[0][0] - noise.half[0][0]).abs()]));
    for l in 2..=k {
        let cur = &h[l - 1];
        let below_half = &h[l - 2];
        let below_next = &out[l - 2];
        let free = l / 2;
        let mut row = Vec::with_capacity(row_len(l));
        for i in 0..row_len(l) {
            let v = if i < free {
                let t = below_next[i].max(cur[i]);
                let moved = t + noise.full[l - 1][i];
                if i == 0 { moved } else { moved.min(below_half[i - 1]) }
            } else {
                (cur[i] + noise.full[l - 1][i] - noise.half[l - 1][i]).abs().min(below_half[i - 1])
            };
            row.push(v);
        }
        out.push(Row(row));
    }
    out
}

/// Left jumps at time `n + 1/2`: every non-wall particle jumps left by
/// `ξ(n + 1/2)`, blocked by the row below at time `n` and pushing the row
/// above down along diagonals. Wall particles move only when pushed.
pub fn half_step_left(x: &Pattern, noise: &NoiseDraw) -> Pattern {
    check_shapes(x, noise);
    Pattern::from_rows(left_rows(x.rows(), noise, None))
}

/// Right jumps at time `n + 1`: every non-wall particle is pushed by the
/// row below at time `n + 1`, then jumps right by `ξ(n + 1)` blocked by the
/// row below at time `n + 1/2`. Wall particles move to
/// `|x + ξ(n+1) - ξ(n+1/2)|`, capped by the same blocker.
pub fn full_step_right(x_half: &Pattern, noise: &NoiseDraw) -> Pattern {
    check_shapes(x_half, noise);
    Pattern::from_rows(right_rows(x_half.rows(), noise))
}

/// `(X(n + 1/2), X(n + 1))` from `X(n)`.
pub fn discrete_step(x: &Pattern, noise: &NoiseDraw) -> (Pattern, Pattern) {
    let half = half_step_left(x, noise);
    let next = full_step_right(&half, noise);
    (half, next)
}

/// [`discrete_step`] that also returns the pushed intermediate positions.
pub fn discrete_step_traced(x: &Pattern, noise: &NoiseDraw) -> (HalfStepState, Pattern) {
    check_shapes(x, noise);
    let mut pushed = Vec::new();
    let half = Pattern::from_rows(left_rows(x.rows(), noise, Some(&mut pushed)));
    let next = full_step_right(&half, noise);
    let state = HalfStepState {
        at_integer: x.clone(),
        at_half: Some(half),
        intermediate: Some(pushed),
    };
    (state, next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(rows: &[&[i64]]) -> Pattern {
        Pattern::from_rows(rows.iter().map(|r| Row(r.to_vec())).collect())
    }

    #[test]
    fn zero_pattern_is_fixed_by_left_step() {
        let mut n = NoiseDraw::zeros(4);
        for v in n.half.iter_mut().flatten() {
            *v = 7;
        }
        assert_eq!(half_step_left(&Pattern::zeros(4), &n), Pattern::zeros(4));
        assert_eq!(full_step_right(&Pattern::zeros(4), &NoiseDraw::zeros(4)), Pattern::zeros(4));
    }

    #[test]
    fn left_step_blocked_by_row_below() {
        let mut n = NoiseDraw::zeros(2);
        n.half[1][0] = 5;
        let h = half_step_left(&pat(&[&[1], &[3]]), &n);
        assert_eq!(h, pat(&[&[1], &[1]]));
    }

    #[test]
    fn left_step_pushes_wall_particle() {
        let mut n = NoiseDraw::zeros(3);
        n.half[1][0] = 2;
        let (state, _) = discrete_step_traced(&pat(&[&[0], &[2], &[2, 1]]), &n);
        assert_eq!(state.at_half.as_ref().unwrap().get(2, 1), 0);
        assert_eq!(state.intermediate.as_ref().unwrap()[2][1], 0);
        assert_eq!(state.at_half.unwrap().get(3, 2), 0);
    }

    #[test]
    fn first_row_reflects() {
        let mut n = NoiseDraw::zeros(1);
        n.half[0][0] = 5;
        assert_eq!(full_step_right(&pat(&[&[2]]), &n), pat(&[&[3]]));
    }

    #[test]
    fn right_step_pushes() {
        let mut n = NoiseDraw::zeros(2);
        n.full[0][0] = 3;
        n.full[1][0] = 2;
        assert_eq!(full_step_right(&pat(&[&[1], &[1]]), &n), pat(&[&[4], &[6]]));
    }

    #[test]
    fn identity_noise_keeps_pattern() {
        let x = pat(&[&[1], &[2], &[3, 1], &[3, 2]]);
        assert!(x.is_valid());
        let (h, next) = discrete_step(&x, &NoiseDraw::zeros(4));
        assert_eq!(h, x);
        assert_eq!(next, x);
    }
}
