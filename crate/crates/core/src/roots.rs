//! Real polynomial roots via companion-matrix eigenvalues.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots with `|im| < REAL_TOL (1 + |re|)` count as real. Rounding splits a
/// double root into a complex pair of relative width about `√ε ≈ 1.5e-8`.
pub const REAL_TOL: f64 = 1e-6;

/// Evaluates `c[0] xⁿ + c[1] xⁿ⁻¹ + … + c[n]` (Horner).
pub fn horner<T>(coeffs: &[f64], x: T) -> T
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::Add<f64, Output = T> + From<f64>,
{
    coeffs.iter().skip(1).fold(T::from(coeffs[0]), |acc, &c| acc * x + c)
}

fn horner_with_derivative(coeffs: &[f64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(coeffs[0], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in &coeffs[1..] {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// All complex roots of a polynomial given highest degree first.
///
/// The monic polynomial is rescaled by `s = max |c_k|^{1/k}` so the
/// companion matrix is well balanced, and each eigenvalue gets a few Newton
/// steps on the original polynomial.
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let lead = *coeffs
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty polynomial".into()))?;
    if lead == 0.0 || coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "polynomial needs a finite nonzero leading coefficient: {coeffs:?}"
        )));
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let s = (1..=n)
        .map(|k| monic[k].abs().powf(1.0 / k as f64))
        .fold(0.0f64, f64::max);
    let s = if s > 0.0 { s } else { 1.0 };

    let mut comp = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        comp[(0, k - 1)] = -monic[k] / s.powi(k as i32);
    }
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    let scaled: Vec<Complex64> = match Schur::try_new(comp, f64::EPSILON, 10_000) {
        Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
        // The unshifted QR iteration can cycle on symmetric spectra.
        None => aberth(&monic, s),
    };
    Ok(scaled.into_iter().map(|z| polish(&monic, z * s)).collect())
}

/// Aberth–Ehrlich iteration on the rescaled monic polynomial; roots are
/// returned in the rescaled variable.
fn aberth(monic: &[f64], s: f64) -> Vec<Complex64> {
    let n = monic.len() - 1;
    let c: Vec<f64> = monic.iter().enumerate().map(|(k, v)| v / s.powi(k as i32)).collect();
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, 0.4 + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner_with_derivative(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * repulsion);
            z[i] -= w;
            moved = moved.max(w.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn polish(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    let mut best = horner_with_derivative(coeffs, z).0.norm();
    for _ in 0..8 {
        let (p, dp) = horner_with_derivative(coeffs, z);
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        let r = horner_with_derivative(coeffs, next).0.norm();
        if !(r < best) {
            break;
        }
        best = r;
        z = next;
    }
    z
}

pub fn is_real(z: Complex64) -> bool {
    z.im.abs() < REAL_TOL * (1.0 + z.re.abs())
}

/// Smallest real root, or [`Error::NoRealRoot`] carrying every root.
pub fn smallest_real_root(coeffs: &[f64]) -> Result<f64> {
    let roots = poly_roots(coeffs)?;
    roots
        .iter()
        .filter(|z| is_real(**z))
        .map(|z| z.re)
        .min_by(f64::total_cmp)
        .ok_or(Error::NoRealRoot { roots })
}

/// `|p(x)|` relative to `Σ |c_k x^k|`; immune to the size of the coefficients.
pub fn scaled_residual(coeffs: &[f64], x: f64) -> f64 {
    let p = horner(coeffs, x).abs();
    let abs: Vec<f64> = coeffs.iter().map(|c| c.abs()).collect();
    let scale = horner(&abs, x.abs());
    if scale == 0.0 {
        p
    } else {
        p / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_with_known_roots() {
        // (x + 3) x (x - 2)
        let r = smallest_real_root(&[1.0, 1.0, -6.0, 0.0]).unwrap();
        assert!((r + 3.0).abs() < 1e-14);
        let r = smallest_real_root(&[1.0, 0.0, -6.0, 0.0]).unwrap();
        assert!((r + 6f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn quartic_without_real_roots() {
        match smallest_real_root(&[1.0, 0.0, 2.0, 0.0, 1.5]) {
            Err(Error::NoRealRoot { roots }) => assert_eq!(roots.len(), 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn badly_scaled_coefficients() {
        // (x - 1e6)(x + 2e6)(x - 3)
        let c = [1.0, 1e6 - 3.0, -2e12 - 3e6, 6e12];
        let r = smallest_real_root(&c).unwrap();
        assert!((r + 2e6).abs() / 2e6 < 1e-13);
        assert!(scaled_residual(&c, r) < 1e-14);
    }

    #[test]
    fn split_double_root_counts_as_real() {
        // (x - 1e7)² (x - 3e7)² perturbed in the last bits
        let (p, q) = (1e7f64, 3e7f64);
        let c = [1.0, -2.0 * (p + q), p * p + q * q + 4.0 * p * q, -2.0 * p * q * (p + q), p * p * q * q * (1.0 + 1e-15)];
        let r = smallest_real_root(&c).unwrap();
        assert!((r - p).abs() / p < 1e-6, "{r}");
    }

    #[test]
    fn degenerate_inputs() {
        assert!(poly_roots(&[0.0, 1.0]).is_err());
        assert!(poly_roots(&[1.0, f64::NAN]).is_err());
        assert!(poly_roots(&[2.0]).unwrap().is_empty());
    }
}
