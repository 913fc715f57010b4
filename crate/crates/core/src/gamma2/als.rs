//! Heuristic search for a λ-factorization of an arbitrary boolean matrix.
//!
//! Alternates between the columns of `V` and the rows of `U`. Each half-step
//! solves, per vector, the least-squares problem for the fixed other factor
//! restricted to the norm ball (radius `lambda` for columns of `V`, 1 for rows
//! of `U`): the minimum-norm unconstrained solution when it fits, otherwise the
//! regularised solution on the sphere. The objective never increases.
//!
//! The first restart starts from the balanced spectral factorization; the
//! others from seeded Gaussian rows. Restarts are merged by smallest final
//! error, earlier restarts winning ties.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::{verify, Factorization, DEFAULT_TOL};
use crate::matrix::BooleanMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct AlsOptions {
    pub lambda: f64,
    pub seed: u64,
    pub iters: usize,
    pub restarts: usize,
    pub tol: f64,
}

impl Default for AlsOptions {
    fn default() -> Self {
        Self { lambda: 1.0, seed: 0, iters: 2000, restarts: 8, tol: DEFAULT_TOL }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlsRun {
    pub seed: u64,
    /// Largest entrywise reproduction error at exit.
    pub error: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlsReport {
    pub options: AlsOptions,
    pub ambient_dim: usize,
    pub runs: Vec<AlsRun>,
    /// Index into `runs` of the run with the smallest error (first on ties).
    pub best: Option<usize>,
    #[serde(skip)]
    pub factorization: Option<Factorization>,
}

/// Single-call form: default restart count and tolerance.
pub fn als_factorize(a: &BooleanMatrix, lambda_target: f64, seed: u64, iters: usize) -> Option<Factorization> {
    let opts = AlsOptions { lambda: lambda_target, seed, iters, ..AlsOptions::default() };
    als_search(a, &opts).ok().and_then(|r| r.factorization)
}

pub fn als_search(a: &BooleanMatrix, opts: &AlsOptions) -> Result<AlsReport> {
    if !(opts.lambda >= 1.0 && opts.lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("ALS target lambda must be >= 1, got {}", opts.lambda)));
    }
    let (m, n) = a.shape();
    let t = (m + n).min(m * n);
    let target = DMatrix::from_fn(m, n, |i, j| f64::from(u8::from(a.get(i, j))));
    let mut runs: Vec<AlsRun> = Vec::with_capacity(opts.restarts);
    let mut winner: Option<(usize, Factorization)> = None;
    for r in 0..opts.restarts {
        let seed = opts.seed.wrapping_add(r as u64);
        // restart 0 starts from the spectral factorization, the rest from seeded noise
        let (u, v, run) = single_run(&target, t, opts, r, seed);
        if run.error <= opts.tol {
            let f = Factorization::new(u, v, opts.lambda, opts.tol)?;
            if verify(a, &f).is_empty() && winner.as_ref().is_none_or(|(w, _)| runs[*w].error > run.error) {
                winner = Some((runs.len(), f));
            }
        }
        runs.push(run);
    }
    let best = (0..runs.len()).min_by(|&x, &y| runs[x].error.total_cmp(&runs[y].error));
    Ok(AlsReport { options: opts.clone(), ambient_dim: t, runs, best, factorization: winner.map(|(_, f)| f) })
}

fn max_error(u: &DMatrix<f64>, v: &DMatrix<f64>, target: &DMatrix<f64>) -> f64 {
    (u * v - target).amax()
}

/// `U = W Sigma^{1/2}` from the thin SVD `A = W Sigma Z^T`, padded with
/// zero columns to width `t` and clipped to the unit ball.
fn spectral_start(target: &DMatrix<f64>, t: usize) -> DMatrix<f64> {
    let (m, n) = target.shape();
    let mut u = DMatrix::zeros(m, t);
    if m == 0 || n == 0 {
        return u;
    }
    let svd = target.clone().svd(true, false);
    let w = svd.u.expect("requested");
    for (k, s) in svd.singular_values.iter().enumerate().take(t) {
        u.set_column(k, &(w.column(k) * s.sqrt()));
    }
    for mut row in u.row_iter_mut() {
        let norm = row.norm();
        if norm > 1.0 {
            row /= norm;
        }
    }
    u
}

fn random_start(m: usize, t: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = DMatrix::from_fn(m, t, |_, _| StandardNormal.sample(&mut rng));
    for mut row in u.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    u
}

fn single_run(
    target: &DMatrix<f64>,
    t: usize,
    opts: &AlsOptions,
    restart: usize,
    seed: u64,
) -> (DMatrix<f64>, DMatrix<f64>, AlsRun) {
    let (m, n) = target.shape();
    let mut u = if restart == 0 { spectral_start(target, t) } else { random_start(m, t, seed) };
    let mut v = DMatrix::zeros(t, n);
    let mut error = f64::INFINITY;
    let mut iterations = 0;
    if m == 0 || n == 0 {
        return (u, v, AlsRun { seed, error: 0.0, iterations });
    }
    while iterations < opts.iters {
        iterations += 1;
        // columns of V: min ||U v - a_j|| with ||v|| <= lambda
        v = ball_least_squares(&u, target, opts.lambda);
        // rows of U: min ||V^T u - a_i^T|| with ||u|| <= 1
        u = ball_least_squares(&v.transpose(), &target.transpose(), 1.0).transpose();
        error = max_error(&u, &v, target);
        if error <= opts.tol * 0.5 {
            break;
        }
    }
    (u, v, AlsRun { seed, error, iterations })
}

/// Solves `min ||X c - b_j||` subject to `||c|| <= radius` for every column
/// `b_j` of `rhs`, returning the solutions as columns.
fn ball_least_squares(x: &DMatrix<f64>, rhs: &DMatrix<f64>, radius: f64) -> DMatrix<f64> {
    let gram = x.transpose() * x;
    let eig = SymmetricEigen::new(gram);
    let q = &eig.eigenvectors;
    let evals = &eig.eigenvalues;
    let cutoff = evals.amax() * 1e-12;
    let projected = q.transpose() * (x.transpose() * rhs);
    let mut out = DMatrix::zeros(x.ncols(), rhs.ncols());
    for j in 0..rhs.ncols() {
        let b = projected.column(j).into_owned();
        let c = trust_region(evals.as_slice(), &b, radius, cutoff);
        out.set_column(j, &(q * c));
    }
    out
}

/// In eigen-coordinates: `c_k = b_k / (d_k + mu)` with the smallest `mu >= 0`
/// giving `||c|| <= radius`.
fn trust_region(d: &[f64], b: &DVector<f64>, radius: f64, cutoff: f64) -> DVector<f64> {
    let coords = |mu: f64| -> DVector<f64> {
        DVector::from_iterator(
            d.len(),
            d.iter().zip(b.iter()).map(|(&dk, &bk)| {
                let den = dk + mu;
                if mu == 0.0 && dk <= cutoff {
                    0.0
                } else {
                    bk / den
                }
            }),
        )
    };
    let c0 = coords(0.0);
    if c0.norm() <= radius {
        return c0;
    }
    // ||c(mu)|| <= ||b|| / mu, so the root lies below ||b|| / radius.
    let (mut lo, mut hi) = (0.0f64, b.norm() / radius);
    let mut mu = 0.0;
    for _ in 0..100 {
        let c = coords(mu);
        let norm = c.norm();
        if (norm - radius).abs() <= 1e-15 * radius {
            break;
        }
        if norm > radius {
            lo = mu;
        } else {
            hi = mu;
        }
        // Newton on 1/||c|| - 1/radius
        let deriv: f64 = d
            .iter()
            .zip(b.iter())
            .map(|(&dk, &bk)| {
                let den = dk + mu;
                if den <= 0.0 {
                    0.0
                } else {
                    bk * bk / (den * den * den)
                }
            })
            .sum::<f64>()
            / norm.powi(3);
        let step = (1.0 / norm - 1.0 / radius) / deriv;
        let next = mu - step;
        mu = if deriv > 0.0 && next > lo && next < hi && next.is_finite() { next } else { 0.5 * (lo + hi) };
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let mut c = coords(mu.max(f64::MIN_POSITIVE));
    let norm = c.norm();
    if norm > radius {
        c *= radius / norm;
    }
    c
}
