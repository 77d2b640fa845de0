//! Fundamental SL(3,C)^3 invariants of a 3x3x3 tensor and the hyperdeterminant.
//!
//! Every invariant is an Ω-process trace over three copies of the
//! trilinear form `f`; see [`crate::poly`] for the machinery. Normalizations
//! and signs are pinned by Nurmiev's normal form, see [`closed_form`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{
    factorized_omega_trace, naive_omega_trace, omega_trace_product, trilinear_form, Group,
    SparsePoly,
};
use crate::tensor::Tensor333;

const I6_NORM: f64 = 1152.0;
const I9_NORM: f64 = 576.0;
const I12_NORM: f64 = 124416.0;

const I6_SPEC: &[(Group, u32)] = &[(Group::X, 2), (Group::Y, 2), (Group::Z, 2)];
const I12_SPEC: &[(Group, u32)] = &[(Group::X, 4), (Group::Y, 1), (Group::Z, 1)];
const I9_SPEC: &[(Group, u32)] = &[
    (Group::X, 1),
    (Group::Y, 1),
    (Group::Z, 1),
    (Group::Xi, 1),
    (Group::Eta, 1),
    (Group::Zeta, 1),
];

/// Which evaluator drives the scalar Ω traces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Evaluator {
    #[default]
    Factorized,
    /// Expands the full product first. Only practical for I6 and small inputs.
    Naive,
}

fn per_copy(p: &SparsePoly) -> [SparsePoly; 3] {
    [p.clone(), p.relabel_copy(1, 2), p.relabel_copy(1, 3)]
}

fn scalar_trace(factors: &[SparsePoly], spec: &[(Group, u32)], ev: Evaluator) -> Result<Complex64> {
    match ev {
        Evaluator::Factorized => factorized_omega_trace(factors, spec),
        Evaluator::Naive => {
            let p = naive_omega_trace(factors, spec);
            if p.is_zero() {
                return Ok(Complex64::new(0.0, 0.0));
            }
            p.constant_value().ok_or_else(|| {
                Error::InvalidArgument("Ω trace did not reduce to a scalar".into())
            })
        }
    }
}

pub fn i6_with(t: &Tensor333, ev: Evaluator) -> Result<Complex64> {
    let f = trilinear_form(t, 1);
    let factors = per_copy(&(&f * &f));
    Ok(scalar_trace(&factors, I6_SPEC, ev)? / I6_NORM)
}

/// `I6 = tr Ω_x² Ω_y² Ω_z² f⁽¹⁾² f⁽²⁾² f⁽³⁾² / 1152`.
pub fn invariant_i6(t: &Tensor333) -> Complex64 {
    i6_with(t, Evaluator::Factorized).expect("I6 spec is degree-matched")
}

/// `B_α = tr Ω_y Ω_z f⁽¹⁾ f⁽²⁾ f⁽³⁾`, a cubic in `x` (copy 1).
pub fn b_alpha(t: &Tensor333) -> SparsePoly {
    let f = trilinear_form(t, 1);
    omega_trace_product(&per_copy(&f), &[(Group::Y, 1), (Group::Z, 1)])
        .expect("factors are copy-local")
}

pub fn i12_with(t: &Tensor333, ev: Evaluator) -> Result<Complex64> {
    let f = trilinear_form(t, 1);
    let bf = &b_alpha(t) * &f;
    Ok(scalar_trace(&per_copy(&bf), I12_SPEC, ev)? / I12_NORM)
}

/// `I12 = tr Ω_x⁴ Ω_y Ω_z ∏ B_α⁽ⁱ⁾ f⁽ⁱ⁾ / 124416` (Briand's convention).
pub fn invariant_i12(t: &Tensor333) -> Complex64 {
    i12_with(t, Evaluator::Factorized).expect("I12 spec is degree-matched")
}

/// `Q_α = tr Ω_y Ω_z f⁽¹⁾ f⁽²⁾ (y⁽³⁾·η⁽³⁾)(z⁽³⁾·ζ⁽³⁾)`: quadratic in `x`,
/// linear in `η` and `ζ`.
pub fn q_alpha(t: &Tensor333) -> SparsePoly {
    let f = trilinear_form(t, 1);
    let p = &SparsePoly::dot(Group::Y, 3, Group::Eta, 3) * &SparsePoly::dot(Group::Z, 3, Group::Zeta, 3);
    omega_trace_product(&[f.clone(), f.relabel_copy(1, 2), p], &[(Group::Y, 1), (Group::Z, 1)])
        .expect("factors are copy-local")
}

/// `Q_β = tr Ω_x Ω_z f⁽¹⁾ f⁽²⁾ (x⁽³⁾·ξ⁽³⁾)(z⁽³⁾·ζ⁽³⁾)`: quadratic in `y`,
/// linear in `ξ` and `ζ`.
pub fn q_beta(t: &Tensor333) -> SparsePoly {
    let f = trilinear_form(t, 1);
    let p = &SparsePoly::dot(Group::X, 3, Group::Xi, 3) * &SparsePoly::dot(Group::Z, 3, Group::Zeta, 3);
    omega_trace_product(&[f.clone(), f.relabel_copy(1, 2), p], &[(Group::X, 1), (Group::Z, 1)])
        .expect("factors are copy-local")
}

/// `E_α = tr Ω_x Q_α⁽¹⁾ f⁽²⁾ (x⁽³⁾·ξ⁽³⁾)`, degree one in each of the six groups.
pub fn e_alpha(t: &Tensor333) -> SparsePoly {
    let f = trilinear_form(t, 2);
    let p = SparsePoly::dot(Group::X, 3, Group::Xi, 3);
    omega_trace_product(&[q_alpha(t), f, p], &[(Group::X, 1)]).expect("factors are copy-local")
}

/// `E_β = tr Ω_y Q_β⁽¹⁾ f⁽²⁾ (y⁽³⁾·η⁽³⁾)`.
pub fn e_beta(t: &Tensor333) -> SparsePoly {
    let f = trilinear_form(t, 2);
    let p = SparsePoly::dot(Group::Y, 3, Group::Eta, 3);
    omega_trace_product(&[q_beta(t), f, p], &[(Group::Y, 1)]).expect("factors are copy-local")
}

/// `E_α` with `(x, y, z) → (y, z, x)` and `(ξ, η, ζ) → (η, ζ, ξ)`.
pub fn cyclic_shift(p: &SparsePoly) -> SparsePoly {
    use Group::*;
    p.rename_groups(&[Y, Z, X, Eta, Zeta, Xi])
}

pub fn i9_with(t: &Tensor333, ev: Evaluator) -> Result<Complex64> {
    let ea = e_alpha(t);
    let eb = e_beta(t);
    let factors = [ea, eb.relabel_copy(1, 2), eb.relabel_copy(1, 3)];
    Ok(scalar_trace(&factors, I9_SPEC, ev)? / I9_NORM)
}

/// `I9 = tr Ω_x Ω_y Ω_z Ω_ξ Ω_η Ω_ζ E_α⁽¹⁾ E_β⁽²⁾ E_β⁽³⁾ / 576`.
pub fn invariant_i9(t: &Tensor333) -> Complex64 {
    i9_with(t, Evaluator::Factorized).expect("I9 spec is degree-matched")
}

/// Bremner's `J12 = −(I12 + I6²) / 24`.
pub fn j12_from(i12: Complex64, i6: Complex64) -> Complex64 {
    -(i12 + i6 * i6) / 24.0
}

/// Neumaier-compensated sum of real numbers.
fn neumaier(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn hyperdet_terms(i6: Complex64, i9: Complex64, j12: Complex64) -> [Complex64; 5] {
    let i9sq = i9 * i9;
    [
        i6 * i6 * i6 * i9sq,
        -(i6 * i6 * j12 * j12),
        36.0 * i6 * i9sq * j12,
        108.0 * i9sq * i9sq,
        -32.0 * j12 * j12 * j12,
    ]
}

/// `Δ₃₃₃ = I6³I9² − I6²J12² + 36 I6 I9² J12 + 108 I9⁴ − 32 J12³`.
pub fn hyperdet_from(i6: Complex64, i9: Complex64, j12: Complex64) -> Complex64 {
    let terms = hyperdet_terms(i6, i9, j12);
    Complex64::new(
        neumaier(terms.iter().map(|z| z.re)),
        neumaier(terms.iter().map(|z| z.im)),
    )
}

/// `Σ |term|` of [`hyperdet_from`]; the magnitude its rounding error scales with.
pub fn hyperdet_term_scale(i6: Complex64, i9: Complex64, j12: Complex64) -> f64 {
    hyperdet_terms(i6, i9, j12).iter().map(|z| z.norm()).sum()
}

pub fn hyperdet_333(inv: &InvariantSet) -> Complex64 {
    hyperdet_from(inv.i6, inv.i9, inv.j12)
}

/// Relative size below which a cancelling combination is indistinguishable
/// from the rounding error of its terms.
pub const CANCEL_TOL: f64 = 1e-10;

/// Invariants of the unit-normalized tensor plus the norm it was divided by.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantSet {
    pub i6: Complex64,
    pub i9: Complex64,
    pub i12: Complex64,
    pub j12: Complex64,
    pub delta333: Complex64,
    pub scale: f64,
}

impl InvariantSet {
    /// Values of the tensor before normalization, by homogeneity.
    pub fn raw(&self) -> InvariantSet {
        let s = self.scale;
        InvariantSet {
            i6: self.i6 * s.powi(6),
            i9: self.i9 * s.powi(9),
            i12: self.i12 * s.powi(12),
            j12: self.j12 * s.powi(12),
            delta333: self.delta333 * s.powi(36),
            scale: 1.0,
        }
    }

    /// Replaces numerically vanishing components by exact zeros. A degree-k
    /// invariant vanishes when `|I|^(6/k) < floor`, so every component is
    /// judged on the scale of I6. J12 and Δ₃₃₃ also vanish when they are
    /// below `CANCEL_TOL` times the terms that cancel to produce them; Δ₃₃₃
    /// is reassembled from the cleaned I6, I9, J12 so their noise drops out.
    pub fn floored(&self, floor: f64) -> InvariantSet {
        let zero = Complex64::new(0.0, 0.0);
        let cut = |z: Complex64, degree: f64, cancelled: f64| {
            let n = z.norm();
            if n.powf(6.0 / degree) < floor || n <= CANCEL_TOL * cancelled {
                zero
            } else {
                z
            }
        };
        let i6 = cut(self.i6, 6.0, 0.0);
        let i9 = cut(self.i9, 9.0, 0.0);
        let i12 = cut(self.i12, 12.0, 0.0);
        let j12 = cut(self.j12, 12.0, (self.i12.norm() + self.i6.norm_sqr()) / 24.0);
        let delta333 = cut(hyperdet_from(i6, i9, j12), 36.0, hyperdet_term_scale(i6, i9, j12));
        InvariantSet { i6, i9, i12, j12, delta333, scale: self.scale }
    }

    /// Genuine tripartite entanglement: Δ₃₃₃ survives [`InvariantSet::floored`].
    pub fn is_genuine(&self, floor: f64) -> bool {
        self.floored(floor).delta333.norm() > 0.0
    }
}

/// All invariants of `t / ‖t‖`.
pub fn invariants_full(t: &Tensor333) -> Result<InvariantSet> {
    let scale = t.norm();
    if scale == 0.0 {
        return Err(Error::ZeroTensor);
    }
    let u = t.scaled(Complex64::new(1.0 / scale, 0.0));
    let i6 = invariant_i6(&u);
    let i9 = invariant_i9(&u);
    let i12 = invariant_i12(&u);
    let j12 = j12_from(i12, i6);
    Ok(InvariantSet {
        i6,
        i9,
        i12,
        j12,
        delta333: hyperdet_from(i6, i9, j12),
        scale,
    })
}

/// Only I6 of `t / ‖t‖`; the scan and flow use nothing else.
pub fn normalized_i6(t: &Tensor333) -> Result<Complex64> {
    let scale = t.norm();
    if scale == 0.0 {
        return Err(Error::ZeroTensor);
    }
    Ok(invariant_i6(&t.scaled(Complex64::new(1.0 / scale, 0.0))))
}

/// Coefficients `Γ_ijk`, `i, j, k ∈ {0, 1}` of a three-qubit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor222(pub [[[Complex64; 2]; 2]; 2]);

impl Tensor222 {
    pub fn from_real(c: [f64; 8]) -> Self {
        let mut g = [[[Complex64::new(0.0, 0.0); 2]; 2]; 2];
        for (n, v) in c.iter().enumerate() {
            g[n >> 2][(n >> 1) & 1][n & 1] = Complex64::new(*v, 0.0);
        }
        Tensor222(g)
    }
}

/// Cayley's 2x2x2 hyperdeterminant. The three-tangle is `4 |Det|`.
pub fn hyperdet_222(t: &Tensor222) -> Complex64 {
    let g = |i: usize, j: usize, k: usize| t.0[i][j][k];
    let (a000, a001, a010, a011) = (g(0, 0, 0), g(0, 0, 1), g(0, 1, 0), g(0, 1, 1));
    let (a100, a101, a110, a111) = (g(1, 0, 0), g(1, 0, 1), g(1, 1, 0), g(1, 1, 1));
    let sq = |z: Complex64| z * z;
    sq(a000 * a111) + sq(a001 * a110) + sq(a010 * a101) + sq(a100 * a011)
        - 2.0
            * (a000 * a001 * a110 * a111
                + a000 * a010 * a101 * a111
                + a000 * a100 * a011 * a111
                + a001 * a010 * a101 * a110
                + a001 * a100 * a011 * a110
                + a010 * a100 * a011 * a101)
        + 4.0 * (a000 * a011 * a101 * a110 + a001 * a010 * a100 * a111)
}

pub fn three_tangle(t: &Tensor222) -> f64 {
    4.0 * hyperdet_222(t).norm()
}

/// Closed forms used as oracles.
pub mod closed_form {
    use num_complex::Complex64;

    use crate::poly::{Group, Monomial, SparsePoly, VarId};
    use crate::tensor::psi0_normalization;

    pub fn nurmiev_i6(a1: f64, a2: f64, a3: f64) -> f64 {
        let (c1, c2, c3) = (a1.powi(3), a2.powi(3), a3.powi(3));
        c1 * c1 + c2 * c2 + c3 * c3 - 10.0 * (c1 * c2 + c1 * c3 + c2 * c3)
    }

    pub fn nurmiev_i9(a1: f64, a2: f64, a3: f64) -> f64 {
        let (c1, c2, c3) = (a1.powi(3), a2.powi(3), a3.powi(3));
        -(c1 - c2) * (c1 - c3) * (c2 - c3)
    }

    pub fn nurmiev_i12(a1: f64, a2: f64, a3: f64) -> f64 {
        let mu = a1.powi(3) + a2.powi(3) + a3.powi(3);
        let nu = a1 * a2 * a3;
        -mu * (mu.powi(3) + (6.0 * nu).powi(3))
    }

    /// Bremner's J12 for the normal form.
    pub fn nurmiev_j12(a1: f64, a2: f64, a3: f64) -> f64 {
        let (c1, c2, c3) = (a1.powi(3), a2.powi(3), a3.powi(3));
        c1 * c2 * c2 * c2 + c1 * c1 * c1 * c2 + c1 * c3 * c3 * c3 + c1 * c1 * c1 * c3
            + c2 * c3 * c3 * c3
            + c2 * c2 * c2 * c3
            + 2.0 * c1 * c2 * c3 * (c1 + c2 + c3)
            - 4.0 * (c1 * c1 * c2 * c2 + c1 * c1 * c3 * c3 + c2 * c2 * c3 * c3)
    }

    /// `6(μ x₁x₂x₃ − ν(x₁³ + x₂³ + x₃³))`.
    pub fn nurmiev_b_alpha(a1: f64, a2: f64, a3: f64) -> SparsePoly {
        let mu = a1.powi(3) + a2.powi(3) + a3.powi(3);
        let nu = a1 * a2 * a3;
        let x = |i| SparsePoly::var(VarId::new(Group::X, 1, i));
        let c = |v: f64| Complex64::new(v, 0.0);
        let xyz = &(&x(1) * &x(2)) * &x(3);
        let cubes = &(&x(1).pow(3) + &x(2).pow(3)) + &x(3).pow(3);
        &xyz.scale(c(6.0 * mu)) - &cubes.scale(c(6.0 * nu))
    }

    /// `6N₀³a²(2x₁x₂x₃ − b x₂³)`.
    pub fn psi0_b_alpha(a: f64, b: f64) -> SparsePoly {
        let n0 = psi0_normalization(a, b);
        let x = |i| Monomial::var(VarId::new(Group::X, 1, i));
        let pre = 6.0 * n0.powi(3) * a * a;
        let xyz = SparsePoly::from_terms([(x(1), Complex64::new(1.0, 0.0))]);
        let xyz = &(&xyz * &SparsePoly::from_terms([(x(2), Complex64::new(1.0, 0.0))]))
            * &SparsePoly::from_terms([(x(3), Complex64::new(1.0, 0.0))]);
        let x2c = SparsePoly::var(VarId::new(Group::X, 1, 2)).pow(3);
        &xyz.scale(Complex64::new(2.0 * pre, 0.0)) - &x2c.scale(Complex64::new(pre * b, 0.0))
    }

    /// `I6 = −8 N₀⁶ a⁴` for the unit-norm ψ₀.
    pub fn psi0_i6(a: f64, b: f64) -> f64 {
        -8.0 * psi0_normalization(a, b).powi(6) * a.powi(4)
    }

    /// `Δ₃₃₃ = I6⁶ / 1728` whenever `I9 = I12 = 0`.
    pub fn psi0_delta333(a: f64, b: f64) -> f64 {
        psi0_i6(a, b).powi(6) / 1728.0
    }
}
