//! Matrices with exactly known γ₂ norm.
//!
//! For `f : Z_2^k -> {0, 1}` the translation matrix `A(x, y) = f(x + y)` has
//! γ₂ norm equal to the Fourier algebra norm `sum_a |f^(a)|`, and the
//! characters give an explicit optimal factorization. The cyclic indicator
//! of `{0, .., n-1}` in `Z_2n` gives the half-graph lower bound.

mod als;

pub use als::{als_factorize, als_search, AlsOptions, AlsReport, AlsRun};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::factor::{Factorization, DEFAULT_TOL};
use crate::matrix::BooleanMatrix;

#[inline]
fn parity(x: usize) -> bool {
    x.count_ones() & 1 == 1
}

/// `(-1)^{a . x}` on `Z_2^k`.
#[inline]
pub fn character(a: usize, x: usize) -> f64 {
    if parity(a & x) {
        -1.0
    } else {
        1.0
    }
}

/// Unnormalised in-place Walsh–Hadamard transform; `data.len()` must be a
/// power of two.
pub fn fwht(data: &mut [f64]) {
    let n = data.len();
    assert!(n.is_power_of_two() || n == 0, "length {n} is not a power of two");
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for x in block..block + h {
                let (a, b) = (data[x], data[x + h]);
                data[x] = a + b;
                data[x + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// A boolean function on `Z_2^k` with its Walsh coefficients
/// `f^(a) = 2^-k sum_x f(x) (-1)^{a . x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupFunction {
    k: usize,
    values: Vec<bool>,
    coeffs: Vec<f64>,
}

impl GroupFunction {
    pub fn new(k: usize, values: Vec<bool>) -> Result<Self> {
        if k >= usize::BITS as usize - 1 || values.len() != 1 << k {
            return Err(Error::InvalidParameter(format!(
                "a function on Z_2^{k} needs 2^{k} values, got {}",
                values.len()
            )));
        }
        let mut coeffs: Vec<f64> = values.iter().map(|&b| f64::from(u8::from(b))).collect();
        fwht(&mut coeffs);
        let scale = 1.0 / (1usize << k) as f64;
        coeffs.iter_mut().for_each(|c| *c *= scale);
        Ok(Self { k, values, coeffs })
    }

    pub fn from_fn(k: usize, f: impl Fn(usize) -> bool) -> Self {
        Self::new(k, (0..1usize << k).map(f).collect()).expect("sizes agree")
    }

    /// Indicator of the coset `shift + span(basis)`.
    pub fn coset(k: usize, basis: &[usize], shift: usize) -> Self {
        let mut members = vec![false; 1 << k];
        for mask in 0..1usize << basis.len() {
            let x = basis
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .fold(shift, |acc, (_, &g)| acc ^ g);
            members[x & ((1 << k) - 1)] = true;
        }
        Self::new(k, members).expect("sizes agree")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        !self.values.iter().any(|&b| b)
    }

    /// `f(x) = sum_a f^(a) (-1)^{a . x}` from the coefficients.
    pub fn inverse(&self) -> Vec<f64> {
        let mut v = self.coeffs.clone();
        fwht(&mut v);
        v
    }

    pub fn algebra_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

/// `||f||_A = sum_a |f^(a)|` via the fast transform.
pub fn walsh_algebra_norm(f: &GroupFunction) -> f64 {
    f.algebra_norm()
}

/// The translation matrix `A(x, y) = f(x + y)` with its character
/// factorization, `lambda = ||f||_A`.
///
/// Row `x` of `U` has coordinates `sqrt(|f^(a)| / lambda) (-1)^{a . x}`; column
/// `y` of `V` has `sign(f^(a)) sqrt(lambda |f^(a)|) (-1)^{a . y}`, with
/// `sign(0) = +1`. Rows have unit norm and columns norm `lambda`.
pub fn group_lift(f: &GroupFunction) -> Result<(BooleanMatrix, Factorization)> {
    if f.is_zero() {
        return Err(Error::InvalidParameter("group lift of the zero function".into()));
    }
    let size = f.size();
    let lambda = f.algebra_norm();
    let a = BooleanMatrix::from_fn(size, size, |x, y| f.values[x ^ y]);
    let row_scale: Vec<f64> = f.coeffs.iter().map(|c| (c.abs() / lambda).sqrt()).collect();
    let col_scale: Vec<f64> =
        f.coeffs.iter().map(|&c| if c < 0.0 { -1.0 } else { 1.0 } * (lambda * c.abs()).sqrt()).collect();
    let u = DMatrix::from_fn(size, size, |x, a| row_scale[a] * character(a, x));
    let v = DMatrix::from_fn(size, size, |a, y| col_scale[a] * character(a, y));
    Ok((a, Factorization::new(u, v, lambda, DEFAULT_TOL)?))
}

/// `e(x) = exp(2 pi i x)`.
fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

/// Fourier coefficients of the indicator of `S = {0, .., n-1}` in `Z_2n`,
/// `1_S^(a) = (1/2n) sum_{x in S} e(-ax/2n)`, by direct summation.
#[derive(Clone, Debug)]
pub struct CyclicIndicator {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl CyclicIndicator {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("half-graph size must be at least 1".into()));
        }
        let period = 2 * n;
        let twiddle: Vec<Complex64> = (0..period).map(|j| e(-(j as f64) / period as f64)).collect();
        let scale = 1.0 / period as f64;
        let coeffs = (0..period)
            .map(|a| {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut idx = 0;
                for _ in 0..n {
                    acc += twiddle[idx];
                    idx += a;
                    if idx >= period {
                        idx -= period;
                    }
                }
                acc * scale
            })
            .collect();
        Ok(Self { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// The geometric-series closed form: `1/2` at `a = 0`, zero at other even
    /// `a`, and `(1/n) / (1 - e(-a/2n))` at odd `a`.
    pub fn closed_form(n: usize, a: usize) -> Complex64 {
        if a == 0 {
            Complex64::new(0.5, 0.0)
        } else if a.is_multiple_of(2) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0 / n as f64, 0.0) / (Complex64::new(1.0, 0.0) - e(-(a as f64) / (2 * n) as f64))
        }
    }

    pub fn algebra_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

/// γ₂ of the wrap-around matrix `H(x, y) = 1_S(x - y)` on `Z_2n`, i.e.
/// `sum_a |1_S^(a)|`. Since `γ₂(H) <= γ₂(G_n) + 1`, the half-graph `G_n`
/// has γ₂ at least this value minus one.
pub fn halfgraph_lower_bound(n: usize) -> Result<f64> {
    Ok(CyclicIndicator::new(n)?.algebra_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::is_blocky;
    use crate::factor::verify;

    /// O(4^k) transform straight from the definition.
    fn naive_coeffs(f: &GroupFunction) -> Vec<f64> {
        let n = f.size();
        (0..n)
            .map(|a| {
                (0..n).filter(|&x| f.values()[x]).map(|x| character(a, x)).sum::<f64>() / n as f64
            })
            .collect()
    }

    #[test]
    fn fast_transform_matches_naive_for_small_k() {
        for k in 0..=4usize {
            let size = 1usize << k;
            let max = if size <= 8 { 1u64 << size } else { 300 };
            for code in 0..max {
                let code = if size <= 8 { code } else { code.wrapping_mul(0x9E37_79B9_7F4A_7C15) };
                let f = GroupFunction::from_fn(k, |x| code >> (x % 64) & 1 == 1);
                assert_eq!(f.coeffs(), naive_coeffs(&f).as_slice(), "k={k} code={code}");
            }
        }
    }

    #[test]
    fn inverse_reproduces_values() {
        let f = GroupFunction::from_fn(5, |x| (x * 7 + 3) % 5 < 2);
        for (x, v) in f.inverse().into_iter().enumerate() {
            assert!((v - f64::from(u8::from(f.values()[x]))).abs() <= 1e-12);
        }
    }

    #[test]
    fn point_mass_and_cosets_have_norm_one() {
        for k in 1..5 {
            assert!((walsh_algebra_norm(&GroupFunction::from_fn(k, |x| x == 0)) - 1.0).abs() < 1e-12);
        }
        let coset = GroupFunction::coset(4, &[0b0011, 0b0100], 0b1000);
        assert_eq!(coset.values().iter().filter(|&&b| b).count(), 4);
        assert!((walsh_algebra_norm(&coset) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_point_function_against_naive() {
        // 1_{ {0, e_1} } on Z_2^3, e_1 = first coordinate = bit 2.
        let f = GroupFunction::from_fn(3, |x| x == 0 || x == 0b100);
        let naive: f64 = naive_coeffs(&f).iter().map(|c| c.abs()).sum();
        assert!((walsh_algebra_norm(&f) - naive).abs() < 1e-15);
        assert!((naive - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lift_of_point_mass_is_identity() {
        let (a, f) = group_lift(&GroupFunction::from_fn(2, |x| x == 0)).unwrap();
        assert_eq!(a, BooleanMatrix::identity(4));
        assert!((f.lambda() - 1.0).abs() < 1e-12);
        assert!(verify(&a, &f).is_empty());
    }

    #[test]
    fn lift_of_constant_is_all_ones() {
        let (a, f) = group_lift(&GroupFunction::from_fn(3, |_| true)).unwrap();
        assert_eq!(a, BooleanMatrix::ones(8, 8));
        assert!((f.lambda() - 1.0).abs() < 1e-12);
        assert!(is_blocky(&a).is_some());
    }

    #[test]
    fn lift_rejects_zero_function() {
        assert!(group_lift(&GroupFunction::from_fn(2, |_| false)).is_err());
    }

    #[test]
    fn lift_norms() {
        let f = GroupFunction::from_fn(3, |x| matches!(x, 1 | 2 | 4 | 7 | 6));
        let (a, fac) = group_lift(&f).unwrap();
        assert!(verify(&a, &fac).is_empty());
        for i in 0..8 {
            assert!((fac.row_norm_sq(i) - 1.0).abs() < 1e-12);
            assert!((fac.col_norm(i) - fac.lambda()).abs() < 1e-12);
        }
    }

    #[test]
    fn halfgraph_small_values() {
        assert!((halfgraph_lower_bound(1).unwrap() - 1.0).abs() < 1e-12);
        let two = 0.5 + 2f64.sqrt() / 2.0;
        assert!((halfgraph_lower_bound(2).unwrap() - two).abs() < 1e-9);
        assert!(halfgraph_lower_bound(0).is_err());
    }

    #[test]
    fn cyclic_coefficients_match_closed_form() {
        for n in [1, 2, 3, 5, 8, 13, 64] {
            let c = CyclicIndicator::new(n).unwrap();
            for (a, z) in c.coeffs().iter().enumerate() {
                assert!((z - CyclicIndicator::closed_form(n, a)).norm() < 1e-9, "n={n} a={a}");
            }
        }
    }
}
