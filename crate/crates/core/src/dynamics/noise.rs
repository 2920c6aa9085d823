//! Geometric noise for the discrete-time dynamics.

use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::gt::row_len;
use crate::scalar::QValue;

/// How geometric variables are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerMode {
    /// `⌊ln U / ln q⌋` with `U` uniform on `(0, 1]`.
    #[default]
    InverseCdf,
    /// Counts successes of a Bernoulli(`q`) trial before the first failure.
    /// With a rational `q = n/d` each trial is an exact integer comparison.
    Counted,
}

/// Sampler for `P(ξ = x) = q^x (1-q)`.
#[derive(Clone, Debug)]
pub struct GeometricSampler {
    q: f64,
    ln_q: f64,
    ratio: Option<(u64, u64)>,
    mode: SamplerMode,
}

impl GeometricSampler {
    pub fn new(q: &QValue, mode: SamplerMode) -> Result<Self> {
        let qf = q.as_f64();
        if !(qf > 0.0 && qf < 1.0) {
            return Err(contract(format!("q must lie in (0, 1), got {q}")));
        }
        let ratio = match q {
            QValue::Exact(r) => match (r.numer().to_u64(), r.denom().to_u64()) {
                (Some(n), Some(d)) => Some((n, d)),
                _ => return Err(contract(format!("q = {q} has components beyond u64"))),
            },
            QValue::Float(_) => None,
        };
        Ok(GeometricSampler {
            q: qf,
            ln_q: qf.ln(),
            ratio,
            mode,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn mode(&self) -> SamplerMode {
        self.mode
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        match self.mode {
            SamplerMode::InverseCdf => {
                let u = 1.0 - rng.random::<f64>();
                (u.ln() / self.ln_q).floor() as i64
            }
            SamplerMode::Counted => {
                let mut n = 0;
                match self.ratio {
                    Some((num, den)) => {
                        while rng.random_range(0..den) < num {
                            n += 1;
                        }
                    }
                    None => {
                        while rng.random::<f64>() < self.q {
                            n += 1;
                        }
                    }
                }
                n
            }
        }
    }
}

/// The variables `ξ^i_j(n + 1/2)` and `ξ^i_j(n + 1)` used by one step, indexed
/// `[i-1][j-1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseDraw {
    pub half: Vec<Vec<i64>>,
    pub full: Vec<Vec<i64>>,
}

impl NoiseDraw {
    pub fn zeros(k: usize) -> Self {
        let rows: Vec<Vec<i64>> = (1..=k).map(|i| vec![0; row_len(i)]).collect();
        NoiseDraw {
            half: rows.clone(),
            full: rows,
        }
    }

    pub fn depth(&self) -> usize {
        self.half.len()
    }

    /// Redraws every variable: all half-step values in lexicographic order,
    /// then all integer-step values.
    pub fn fill<R: Rng + ?Sized>(&mut self, sampler: &GeometricSampler, rng: &mut R) {
        for v in self.half.iter_mut().chain(self.full.iter_mut()).flatten() {
            *v = sampler.sample(rng);
        }
    }

    pub fn sample<R: Rng + ?Sized>(k: usize, sampler: &GeometricSampler, rng: &mut R) -> Self {
        let mut n = NoiseDraw::zeros(k);
        n.fill(sampler, rng);
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::path_rng;

    fn mean_and_p0(s: &GeometricSampler, n: usize) -> (f64, f64) {
        let mut rng = path_rng(11, 0);
        let xs: Vec<i64> = (0..n).map(|_| s.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<i64>() as f64 / n as f64;
        let p0 = xs.iter().filter(|&&x| x == 0).count() as f64 / n as f64;
        (mean, p0)
    }

    #[test]
    fn both_modes_have_geometric_law() {
        let q: QValue = "1/3".parse().unwrap();
        for mode in [SamplerMode::InverseCdf, SamplerMode::Counted] {
            let s = GeometricSampler::new(&q, mode).unwrap();
            let (mean, p0) = mean_and_p0(&s, 200_000);
            assert!((mean - 0.5).abs() < 0.01, "{mode:?} mean {mean}");
            assert!((p0 - 2.0 / 3.0).abs() < 0.005, "{mode:?} p0 {p0}");
        }
        let s = GeometricSampler::new(&QValue::Float(0.9), SamplerMode::Counted).unwrap();
        let (mean, _) = mean_and_p0(&s, 100_000);
        assert!((mean - 9.0).abs() < 0.15);
    }

    #[test]
    fn rejects_bad_q() {
        assert!(GeometricSampler::new(&QValue::Float(1.0), SamplerMode::InverseCdf).is_err());
        assert!(GeometricSampler::new(&QValue::Float(0.0), SamplerMode::InverseCdf).is_err());
    }

    #[test]
    fn noise_shape() {
        let n = NoiseDraw::zeros(5);
        let lens: Vec<usize> = n.half.iter().map(Vec::len).collect();
        assert_eq!(lens, vec![1, 1, 2, 2, 3]);
    }
}
