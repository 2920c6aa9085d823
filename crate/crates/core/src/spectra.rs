//! The antisymmetric Gaussian matrix chain, its top eigenvalues and their
//! transition density.

use std::io::Write;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dynamics::map_paths;
use crate::error::{contract, Error, Result};

/// A real `d×d` matrix `A` with `A + Aᵀ = 0`, stored by its strict upper
/// triangle in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntisymmetricMatrix {
    d: usize,
    upper: Vec<f64>,
}

impl AntisymmetricMatrix {
    pub fn zeros(d: usize) -> Self {
        AntisymmetricMatrix {
            d,
            upper: vec![0.0; d * d.saturating_sub(1) / 2],
        }
    }

    /// `v wᵀ - w vᵀ`.
    pub fn wedge(v: &[f64], w: &[f64]) -> Result<Self> {
        if v.len() != w.len() {
            return Err(contract("wedge of vectors of different lengths"));
        }
        let d = v.len();
        let mut a = AntisymmetricMatrix::zeros(d);
        for i in 0..d {
            for j in i + 1..d {
                let s = a.slot(i, j);
                a.upper[s] = v[i] * w[j] - w[i] * v[j];
            }
        }
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        // offset of row i in the strict upper triangle
        i * (2 * self.d - i - 1) / 2 + (j - i - 1)
    }

    /// Entry `(i, j)`, 0-based.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.upper[self.slot(i, j)],
            std::cmp::Ordering::Greater => -self.upper[self.slot(j, i)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    pub fn add_assign(&mut self, other: &AntisymmetricMatrix) {
        assert_eq!(self.d, other.d);
        for (a, b) in self.upper.iter_mut().zip(&other.upper) {
            *a += b;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.d, self.d, |i, j| self.get(i, j))
    }

    /// `‖A‖_F²`.
    pub fn frobenius_sq(&self) -> f64 {
        2.0 * self.upper.iter().map(|x| x * x).sum::<f64>()
    }
}

/// `A = v wᵀ - w vᵀ` for independent standard Gaussian `v, w ∈ ℝ^d`; the
/// Hermitian increment of the chain is `iA`.
pub fn sample_increment<R: Rng + ?Sized>(d: usize, rng: &mut R) -> AntisymmetricMatrix {
    let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let w: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    AntisymmetricMatrix::wedge(&v, &w).expect("equal lengths")
}

/// The `⌊d/2⌋` largest eigenvalues of `iA`, decreasing.
///
/// They are the singular values of `A`, which come in equal pairs; one
/// representative of each pair is kept.
pub fn top_spectrum(a: &AntisymmetricMatrix) -> Result<Vec<f64>> {
    if a.upper.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    let r = a.d / 2;
    if r == 0 {
        return Ok(Vec::new());
    }
    let mut sv: Vec<f64> = a.to_dense().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok((0..r).map(|i| sv[2 * i]).collect())
}

/// `Λ(1), …, Λ(n_steps)` for `n_paths` independent chains, indexed
/// `[path][n-1][i]`.
pub fn simulate_eigen_chain(d: usize, n_steps: usize, n_paths: usize, seed: u64) -> Result<Vec<Vec<Vec<f64>>>> {
    if d < 2 || n_steps == 0 {
        return Err(contract("need d ≥ 2 and at least one step"));
    }
    let paths = map_paths(n_paths, seed, |rng| {
        let mut m = AntisymmetricMatrix::zeros(d);
        let mut out = Vec::with_capacity(n_steps);
        for _ in 0..n_steps {
            m.add_assign(&sample_increment(d, rng));
            out.push(top_spectrum(&m));
        }
        out.into_iter().collect::<Result<Vec<_>>>()
    });
    paths.into_iter().collect()
}

/// One CSV line per `(path, n)`: `path,n,lambda_1,…,lambda_r`.
pub fn write_spectrum_csv<W: Write>(samples: &[Vec<Vec<f64>>], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let r = samples.first().and_then(|p| p.first()).map_or(0, Vec::len);
    let mut header = vec!["path".to_string(), "n".to_string()];
    header.extend((1..=r).map(|i| format!("lambda_{i}")));
    out.write_record(&header)?;
    for (p, path) in samples.iter().enumerate() {
        for (n, lam) in path.iter().enumerate() {
            let mut rec = vec![p.to_string(), (n + 1).to_string()];
            rec.extend(lam.iter().map(|x| x.to_string()));
            out.write_record(&rec)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn check_point(d: usize, x: &[f64]) -> Result<()> {
    if d < 2 {
        return Err(contract(format!("d must be at least 2, got {d}")));
    }
    if x.len() != d / 2 {
        return Err(contract(format!("expected {} coordinates, got {}", d / 2, x.len())));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite coordinate".into()));
    }
    if x.windows(2).any(|w| w[0] < w[1]) || x.last().is_some_and(|&v| v < 0.0) {
        return Err(contract(format!("{x:?} is not decreasing and non-negative")));
    }
    Ok(())
}

/// Degree of the homogeneous polynomial `h_d`.
pub fn h_degree(d: usize) -> i32 {
    let r = (d / 2) as i32;
    r * (r - 1) + if d % 2 == 1 { r } else { 0 }
}

/// `h_d(λ) = V(λ)/c` with
/// `V = Π_{i<j}(λ_i - λ_j)(λ_i + λ_j) Π_i λ_i^ε` and
/// `c = Π_{i<j}(j - i)(d - i - j) Π_i (r + 1/2 - i)^ε`, `ε = 1` for odd `d`.
pub fn h_d(d: usize, lambda: &[f64]) -> Result<f64> {
    check_point(d, lambda)?;
    let r = d / 2;
    let odd = d % 2 == 1;
    let mut v = 1.0;
    let mut c = 1.0;
    for i in 1..=r {
        for j in i + 1..=r {
            v *= (lambda[i - 1] - lambda[j - 1]) * (lambda[i - 1] + lambda[j - 1]);
            c *= ((j - i) * (d - i - j)) as f64;
        }
        if odd {
            v *= lambda[i - 1];
            c *= r as f64 + 0.5 - i as f64;
        }
    }
    Ok(v / c)
}

/// `(e^{2U} - e^{2L})/2 · e^{-(x+y)}`, the integral of `e^{-(x+y-2z)}` over
/// `z ∈ [L, U]`, written to avoid overflow.
fn interval_factor(x: f64, y: f64, lo: f64, hi: f64) -> f64 {
    if hi < lo {
        return 0.0;
    }
    let e = 2.0 * hi - x - y;
    0.5 * (e.exp() - (2.0 * lo - x - y).exp())
}

/// `m_d(x, y)`, the integral over `z` interlacing below `x` and `y` of
/// `e^{-Σ(x_i + y_i - 2z_i)}`, times `e^{-|x_r - y_r|} + e^{-(x_r + y_r)}`
/// for even `d`.
///
/// The constraint is one interval per coordinate,
/// `z_i ∈ [max(x_{i+1}, y_{i+1}), min(x_i, y_i)]`, so the integral is a
/// product of one-dimensional ones.
pub fn m_d(d: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    check_point(d, x)?;
    check_point(d, y)?;
    let r = d / 2;
    let n = if d % 2 == 1 { r } else { r - 1 };
    let mut prod = 1.0;
    for i in 0..n {
        let lo = x.get(i + 1).copied().unwrap_or(0.0).max(y.get(i + 1).copied().unwrap_or(0.0));
        let hi = x[i].min(y[i]);
        prod *= interval_factor(x[i], y[i], lo, hi);
    }
    if d % 2 == 0 {
        prod *= (-(x[r - 1] - y[r - 1]).abs()).exp() + (-(x[r - 1] + y[r - 1])).exp();
    }
    Ok(prod)
}

/// Transition density of `Λ`: `h_d(y)/h_d(x) · m_d(x, y)`, halved for even
/// `d` so that it integrates to one over the closed chamber.
pub fn p_d_density(d: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    let hx = h_d(d, x)?;
    if hx <= 0.0 {
        return Err(Error::Domain(format!("{x:?} lies on the boundary of the chamber")));
    }
    let scale = if d % 2 == 0 { 0.5 } else { 1.0 };
    Ok(scale * h_d(d, y)? / hx * m_d(d, x, y)?)
}
