//! The continuous-time model: unit jumps after exponential waiting times.
//!
//! Every particle carries two rate-1 clocks, one per direction. Since the
//! clocks are memoryless this is simulated as a single clock of rate
//! `2·#particles` whose rings are assigned uniformly to a (particle,
//! direction) pair.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::dynamics::discrete::map_paths;
use crate::error::{contract, Result};
use crate::gt::{row_len, Pattern, Row};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
}

/// A clock ring: particle `(i, j)` (1-based) attempts a jump.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CtmcEvent {
    pub time: f64,
    pub particle: (usize, usize),
    pub direction: Direction,
}

fn is_wall(i: usize, j: usize) -> bool {
    i % 2 == 1 && j == i.div_ceil(2)
}

/// Right attempt of `(i, j)`. Blocked when `i, j ≥ 2` and the particle sits
/// at its upper-left neighbour `(i-1, j-1)`; otherwise the particle and the
/// particles below it in column `j` at the same position all move by one.
pub fn apply_right(y: &mut Pattern, i: usize, j: usize) -> bool {
    let v = y.get(i, j);
    if i >= 2 && j >= 2 && v == y.get(i - 1, j - 1) {
        return false;
    }
    let mut m = i;
    while m <= y.depth() && y.get(m, j) == v {
        y.set(m, j, v + 1);
        m += 1;
    }
    true
}

/// Left attempt of `(i, j)`. A wall particle at 0 is reflected and acts as
/// a right attempt; elsewhere a wall particle steps left freely. Other
/// particles are blocked by `(i-1, j)` when level with it and otherwise
/// push the particles below them on the diagonal `(i+l, j+l)` at the same
/// position.
pub fn apply_left(y: &mut Pattern, i: usize, j: usize) -> bool {
    let v = y.get(i, j);
    if is_wall(i, j) {
        if v == 0 {
            return apply_right(y, i, j);
        }
        y.set(i, j, v - 1);
        return true;
    }
    if v == y.get(i - 1, j) {
        return false;
    }
    let (mut a, mut b) = (i, j);
    while a <= y.depth() && b <= row_len(a) && y.get(a, b) == v {
        y.set(a, b, v - 1);
        a += 1;
        b += 1;
    }
    true
}

pub fn apply_event(y: &mut Pattern, particle: (usize, usize), direction: Direction) -> bool {
    match direction {
        Direction::Left => apply_left(y, particle.0, particle.1),
        Direction::Right => apply_right(y, particle.0, particle.1),
    }
}

fn particles(k: usize) -> Vec<(usize, usize)> {
    (1..=k).flat_map(|i| (1..=row_len(i)).map(move |j| (i, j))).collect()
}

/// One path on `[0, t_max]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CtmcPath {
    /// Clock rings that changed the state.
    pub events: Vec<CtmcEvent>,
    pub final_state: Pattern,
}

impl CtmcPath {
    /// Replays the events up to time `t`.
    pub fn state_at(&self, k: usize, t: f64) -> Pattern {
        let mut y = Pattern::zeros(k);
        for e in self.events.iter().take_while(|e| e.time <= t) {
            apply_event(&mut y, e.particle, e.direction);
        }
        y
    }
}

/// Runs the dynamics from the zero pattern, reporting every effective
/// event through `on_event(time, state_before, state_after)`.
pub fn ctmc_run<R: Rng + ?Sized>(
    k: usize,
    t_max: f64,
    rng: &mut R,
    mut on_event: impl FnMut(f64, &Pattern, &Pattern, (usize, usize), Direction),
) -> Pattern {
    let ps = particles(k);
    let clock = Exp::new(2.0 * ps.len() as f64).expect("positive rate");
    let mut y = Pattern::zeros(k);
    let mut t = 0.0;
    loop {
        t += clock.sample(rng);
        if t > t_max {
            return y;
        }
        let c = rng.random_range(0..2 * ps.len());
        let p = ps[c / 2];
        let dir = if c % 2 == 0 { Direction::Left } else { Direction::Right };
        let before = y.clone();
        if apply_event(&mut y, p, dir) {
            on_event(t, &before, &y, p, dir);
        }
    }
}

pub fn ctmc_simulate(k: usize, t_max: f64, n_paths: usize, seed: u64) -> Result<Vec<CtmcPath>> {
    if k == 0 || !(t_max > 0.0) || n_paths == 0 {
        return Err(contract("ctmc needs k ≥ 1, t_max > 0 and at least one path"));
    }
    Ok(map_paths(n_paths, seed, |rng| {
        let mut events = Vec::new();
        let final_state = ctmc_run(k, t_max, rng, |time, _, _, particle, direction| {
            events.push(CtmcEvent { time, particle, direction })
        });
        CtmcPath { events, final_state }
    }))
}

/// Final patterns only, without storing events.
pub fn ctmc_final_states(k: usize, t_max: f64, n_paths: usize, seed: u64) -> Result<Vec<Pattern>> {
    if k == 0 || !(t_max > 0.0) || n_paths == 0 {
        return Err(contract("ctmc needs k ≥ 1, t_max > 0 and at least one path"));
    }
    Ok(map_paths(n_paths, seed, |rng| ctmc_run(k, t_max, rng, |_, _, _, _, _| {})))
}

/// Empirical jump rate of row `k` from `from` to `to`: number of such
/// transitions divided by the total time spent in `from`.
#[derive(Clone, Debug, Serialize)]
pub struct RateEstimate {
    pub transitions: u64,
    pub holding_time: f64,
    pub rate: f64,
}

pub fn estimate_rate(k: usize, from: &Row, to: &Row, t_max: f64, n_paths: usize, seed: u64) -> Result<RateEstimate> {
    if from.len() != row_len(k) || to.len() != row_len(k) {
        return Err(contract(format!("rows must have length {}", row_len(k))));
    }
    let parts = map_paths(n_paths, seed, |rng| {
        let mut hits = 0u64;
        let mut held = 0.0;
        let mut entered = 0.0;
        let end = ctmc_run(k, t_max, rng, |t, before, after, _, _| {
            if before.top() == after.top() {
                return;
            }
            if before.top() == from {
                held += t - entered;
                if after.top() == to {
                    hits += 1;
                }
            }
            entered = t;
        });
        if end.top() == from {
            held += t_max - entered;
        }
        (hits, held)
    });
    let (transitions, holding_time) = parts.iter().fold((0, 0.0), |(a, b), (h, t)| (a + h, b + t));
    Ok(RateEstimate {
        transitions,
        holding_time,
        rate: transitions as f64 / holding_time.max(f64::MIN_POSITIVE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(rows: &[&[i64]]) -> Pattern {
        Pattern::from_rows(rows.iter().map(|r| Row(r.to_vec())).collect())
    }

    #[test]
    fn reflected_wall_pushes_column() {
        let mut y = Pattern::zeros(3);
        assert!(apply_left(&mut y, 1, 1));
        assert_eq!(y, pat(&[&[1], &[1], &[1, 0]]));
    }

    #[test]
    fn blocked_moves() {
        let mut y = pat(&[&[1], &[1], &[1, 1]]);
        assert!(!apply_right(&mut y, 3, 2));
        assert!(!apply_left(&mut y, 2, 1));
        assert!(apply_left(&mut y, 3, 2));
        assert_eq!(y, pat(&[&[1], &[1], &[1, 0]]));
    }

    #[test]
    fn left_push_along_diagonal() {
        let mut y = pat(&[&[0], &[2], &[2, 2], &[3, 2]]);
        assert!(y.is_valid());
        assert!(apply_left(&mut y, 2, 1));
        assert_eq!(y, pat(&[&[0], &[1], &[2, 1], &[3, 2]]));
    }

    #[test]
    fn events_preserve_validity() {
        use crate::dynamics::path_rng;
        let mut rng = path_rng(3, 0);
        for k in 1..=5 {
            let mut y = Pattern::zeros(k);
            let ps = particles(k);
            for _ in 0..20_000 {
                let p = ps[rng.random_range(0..ps.len())];
                let d = if rng.random::<bool>() { Direction::Left } else { Direction::Right };
                apply_event(&mut y, p, d);
                assert!(y.is_valid() && y.rows().iter().all(|r| r.is_nonnegative()), "{y:?}");
            }
        }
    }

    #[test]
    fn replay_matches_final_state() {
        let paths = ctmc_simulate(3, 2.0, 5, 4).unwrap();
        for p in &paths {
            assert_eq!(p.state_at(3, 2.0), p.final_state);
            assert!(p.events.windows(2).all(|w| w[0].time < w[1].time));
        }
    }

    #[test]
    fn wall_rate_is_two() {
        let est = estimate_rate(1, &Row::from([0]), &Row::from([1]), 20.0, 2000, 8).unwrap();
        assert!((est.rate - 2.0).abs() < 0.1, "{est:?}");
    }
}
