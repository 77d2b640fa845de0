//! Three-qutrit coefficient tensors and local (SLOCC) transformations.
//!
//! A state `|ψ⟩ = Σ Γ_ijk |ijk⟩` is stored as the 27 complex coefficients
//! `Γ_ijk` in row-major `(i, j, k)` order. Indices are 0-based in code; in
//! text and file formats the qutrit labels run over `{1, 2, 3}`.
//!
//! Spin-1 block states are mapped onto qutrit labels with the fixed
//! identification `|+⟩ ↦ 3`, `|0⟩ ↦ 2`, `|−⟩ ↦ 1`, see [`qutrit_index`].

use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of stored coefficients.
pub const LEN: usize = 27;

pub type CMatrix3 = Matrix3<Complex64>;

/// 0-based qutrit index of the spin projection `m ∈ {−1, 0, +1}`.
///
/// `m = +1` is qutrit 3, `m = 0` is qutrit 2 and `m = −1` is qutrit 1.
pub fn qutrit_index(m: i8) -> usize {
    assert!((-1..=1).contains(&m), "spin-1 projection out of range: {m}");
    (m + 1) as usize
}

#[inline]
pub(crate) fn flat(i: usize, j: usize, k: usize) -> usize {
    9 * i + 3 * j + k
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor333 {
    gamma: [Complex64; LEN],
}

impl Default for Tensor333 {
    fn default() -> Self {
        Self::zeros()
    }
}

impl Tensor333 {
    pub fn zeros() -> Self {
        Self {
            gamma: [Complex64::new(0.0, 0.0); LEN],
        }
    }

    /// Builds a tensor from 27 coefficients in row-major `(i, j, k)` order.
    pub fn from_coefficients(coeffs: &[Complex64]) -> Result<Self> {
        if coeffs.len() != LEN {
            return Err(Error::WrongLength(coeffs.len()));
        }
        let mut gamma = [Complex64::new(0.0, 0.0); LEN];
        for (index, (dst, c)) in gamma.iter_mut().zip(coeffs).enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFinite { index });
            }
            *dst = *c;
        }
        Ok(Self { gamma })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_coefficients(&c)
    }

    /// Superposition of spin-1 product kets `|m1 m2 m3⟩` with real amplitudes.
    pub fn from_kets(kets: &[([i8; 3], f64)]) -> Self {
        let mut t = Self::zeros();
        for &([m1, m2, m3], amp) in kets {
            let idx = flat(qutrit_index(m1), qutrit_index(m2), qutrit_index(m3));
            t.gamma[idx] += Complex64::new(amp, 0.0);
        }
        t
    }

    /// Product state `Γ_ijk = u_i v_j w_k`.
    pub fn product(u: &[Complex64; 3], v: &[Complex64; 3], w: &[Complex64; 3]) -> Self {
        let mut t = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    t.gamma[flat(i, j, k)] = u[i] * v[j] * w[k];
                }
            }
        }
        t
    }

    /// Nurmiev's three-parameter normal form
    /// `a1 Σ x_i y_i z_i + a2 (x1y2z3 + x2y3z1 + x3y1z2) + a3 (x1y3z2 + x2y1z3 + x3y2z1)`.
    pub fn nurmiev(a1: f64, a2: f64, a3: f64) -> Self {
        let mut t = Self::zeros();
        for i in 0..3 {
            t.gamma[flat(i, i, i)] = Complex64::new(a1, 0.0);
            t.gamma[flat(i, (i + 1) % 3, (i + 2) % 3)] = Complex64::new(a2, 0.0);
            t.gamma[flat(i, (i + 2) % 3, (i + 1) % 3)] = Complex64::new(a3, 0.0);
        }
        t
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.gamma[flat(i, j, k)]
    }

    /// Coefficients in row-major `(i, j, k)` order.
    pub fn coefficients(&self) -> &[Complex64; LEN] {
        &self.gamma
    }

    pub fn norm_sqr(&self) -> f64 {
        self.gamma.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = *self;
        out.gamma.iter_mut().for_each(|g| *g *= c);
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.gamma
            .iter()
            .zip(&other.gamma)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: TensorJson = serde_json::from_str(s)?;
        doc.to_tensor()
    }

    pub fn to_json(&self) -> TensorJson {
        TensorJson {
            re: self.gamma.iter().map(|c| c.re).collect(),
            im: Some(self.gamma.iter().map(|c| c.im).collect()),
        }
    }
}

/// `tensor_from_coefficients`: alias kept for callers that prefer a free function.
pub fn tensor_from_coefficients(coeffs: &[Complex64]) -> Result<Tensor333> {
    Tensor333::from_coefficients(coeffs)
}

/// On-disk tensor format: `{"re": [27 numbers], "im": [27 numbers]}`, row-major
/// over `(i, j, k)`. `im` may be omitted, in which case it is all zeros.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorJson {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

impl TensorJson {
    pub fn to_tensor(&self) -> Result<Tensor333> {
        if self.re.len() != LEN {
            return Err(Error::WrongLength(self.re.len()));
        }
        let zeros = vec![0.0; LEN];
        let im = self.im.as_ref().unwrap_or(&zeros);
        if im.len() != LEN {
            return Err(Error::WrongLength(im.len()));
        }
        let c: Vec<Complex64> = self
            .re
            .iter()
            .zip(im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        Tensor333::from_coefficients(&c)
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// `N₀ = (2 + 4a² + b²)^(−1/2)`.
pub fn psi0_normalization(a: f64, b: f64) -> f64 {
    (2.0 + 4.0 * a * a + b * b).sqrt().recip()
}

/// `N₁ = (2 + 2c² + d² + e²)^(−1/2)`.
pub fn psi1_normalization(c: f64, d: f64, e: f64) -> f64 {
    (2.0 + 2.0 * c * c + d * d + e * e).sqrt().recip()
}

/// The `S^z = 0` block state
/// `N₀[|+0−⟩ + |−0+⟩ + a(|+−0⟩ + |−+0⟩ + |0+−⟩ + |0−+⟩) + b|000⟩]`.
pub fn assemble_psi0(a: f64, b: f64) -> Result<Tensor333> {
    check_finite(&[a, b])?;
    let n0 = psi0_normalization(a, b);
    Ok(Tensor333::from_kets(&[
        ([1, 0, -1], n0),
        ([-1, 0, 1], n0),
        ([1, -1, 0], n0 * a),
        ([-1, 1, 0], n0 * a),
        ([0, 1, -1], n0 * a),
        ([0, -1, 1], n0 * a),
        ([0, 0, 0], n0 * b),
    ]))
}

fn psi_pm(sign: i8, c: f64, d: f64, e: f64) -> Result<Tensor333> {
    check_finite(&[c, d, e])?;
    let n1 = psi1_normalization(c, d, e);
    let (p, m) = (sign, -sign);
    Ok(Tensor333::from_kets(&[
        ([p, p, m], n1),
        ([m, p, p], n1),
        ([p, 0, 0], n1 * c),
        ([0, 0, p], n1 * c),
        ([p, m, p], n1 * d),
        ([0, p, 0], n1 * e),
    ]))
}

/// The `S^z = +1` block state
/// `N₁[|++−⟩ + |−++⟩ + c(|+00⟩ + |00+⟩) + d|+−+⟩ + e|0+0⟩]`.
pub fn assemble_psi_plus(c: f64, d: f64, e: f64) -> Result<Tensor333> {
    psi_pm(1, c, d, e)
}

/// Spin-flipped partner of [`assemble_psi_plus`].
pub fn assemble_psi_minus(c: f64, d: f64, e: f64) -> Result<Tensor333> {
    psi_pm(-1, c, d, e)
}

/// `L1 ⊗ L2 ⊗ L3` acting on the three legs of a tensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalOp {
    legs: [CMatrix3; 3],
    special: bool,
}

/// Below this |det| a leg is treated as singular.
pub const SINGULAR_DET: f64 = 1e-12;
/// Allowed |det − 1| for an SL-flagged operator.
pub const SL_DET_TOL: f64 = 1e-10;

impl LocalOp {
    pub fn new(l1: CMatrix3, l2: CMatrix3, l3: CMatrix3) -> Result<Self> {
        let legs = [l1, l2, l3];
        for (leg, m) in legs.iter().enumerate() {
            let det = m.determinant().norm();
            if !(det > SINGULAR_DET) {
                return Err(Error::SingularMatrix { leg, det });
            }
        }
        Ok(Self {
            legs,
            special: false,
        })
    }

    /// Like [`LocalOp::new`] but additionally requires `det(L_i) = 1`.
    pub fn special(l1: CMatrix3, l2: CMatrix3, l3: CMatrix3) -> Result<Self> {
        let mut op = Self::new(l1, l2, l3)?;
        for (leg, m) in op.legs.iter().enumerate() {
            let det = m.determinant();
            if (det - Complex64::new(1.0, 0.0)).norm() >= SL_DET_TOL {
                return Err(Error::NotSpecialLinear { leg, det });
            }
        }
        op.special = true;
        Ok(op)
    }

    pub fn identity() -> Self {
        Self {
            legs: [CMatrix3::identity(); 3],
            special: true,
        }
    }

    /// Deterministic random SL(3,C)³ operator.
    pub fn random_special(seed: u64) -> Self {
        let s = seed.wrapping_mul(3);
        Self::special(random_sl3(s), random_sl3(s + 1), random_sl3(s + 2))
            .expect("random_sl3 produces unit determinant")
    }

    pub fn legs(&self) -> &[CMatrix3; 3] {
        &self.legs
    }

    pub fn is_special(&self) -> bool {
        self.special
    }

    /// `λ = det(L1) det(L2) det(L3)`.
    pub fn determinant(&self) -> Complex64 {
        self.legs.iter().map(|m| m.determinant()).product()
    }

    /// Operator equivalent to applying `self` first and then `after`.
    pub fn then(&self, after: &LocalOp) -> LocalOp {
        LocalOp {
            legs: [
                after.legs[0] * self.legs[0],
                after.legs[1] * self.legs[1],
                after.legs[2] * self.legs[2],
            ],
            special: self.special && after.special,
        }
    }
}

/// `Γ'_ijk = Σ_pqr (L1)_ip (L2)_jq (L3)_kr Γ_pqr`.
pub fn apply_local(t: &Tensor333, op: &LocalOp) -> Tensor333 {
    let zero = Complex64::new(0.0, 0.0);
    let [l1, l2, l3] = &op.legs;
    // one leg at a time: 3 · 81 multiply-adds instead of 27²
    let mut a = [zero; LEN];
    for i in 0..3 {
        for q in 0..3 {
            for r in 0..3 {
                a[flat(i, q, r)] = (0..3).map(|p| l1[(i, p)] * t.get(p, q, r)).sum();
            }
        }
    }
    let mut b = [zero; LEN];
    for i in 0..3 {
        for j in 0..3 {
            for r in 0..3 {
                b[flat(i, j, r)] = (0..3).map(|q| l2[(j, q)] * a[flat(i, q, r)]).sum();
            }
        }
    }
    let mut out = [zero; LEN];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[flat(i, j, k)] = (0..3).map(|r| l3[(k, r)] * b[flat(i, j, r)]).sum();
            }
        }
    }
    Tensor333 { gamma: out }
}

/// Random 3×3 complex matrix with `det = 1`, deterministic in `seed`.
///
/// Entries are drawn uniformly from the unit square of the complex plane and
/// the matrix is rescaled by the principal branch of `det^(−1/3)`.
pub fn random_sl3(seed: u64) -> CMatrix3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m = CMatrix3::from_fn(|_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let det = m.determinant();
        if det.norm() < 1e-6 {
            continue;
        }
        let scale = (det.ln() * (-1.0 / 3.0)).exp();
        return m * scale;
    }
}

/// Random unit-norm tensor with complex entries, deterministic in `seed`.
pub fn random_tensor(seed: u64) -> Tensor333 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gamma = [Complex64::new(0.0, 0.0); LEN];
    for g in gamma.iter_mut() {
        *g = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let t = Tensor333 { gamma };
    t.scaled(Complex64::new(1.0 / t.norm(), 0.0))
}

/// Random product tensor `u ⊗ v ⊗ w`, deterministic in `seed`.
pub fn random_product_tensor(seed: u64) -> Tensor333 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vec3 = || {
        [0; 3].map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    };
    let (u, v, w) = (vec3(), vec3(), vec3());
    Tensor333::product(&u, &v, &w)
}
