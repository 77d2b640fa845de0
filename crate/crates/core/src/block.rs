//! Three-site spin-1 block: root conditions, eigenstate coefficients,
//! renormalization factors, and an exact-diagonalization cross-check.
//!
//! The Hamiltonian basis orders each site as `m = +1, 0, −1`, so basis index
//! `s = 1 − m`. Tensor indices use `m + 1`, hence the flips in
//! [`block_vector`].

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};

use crate::eigh::dense_eigh;
use crate::error::{Error, Result};
use crate::roots::{scaled_residual, smallest_real_root};
use crate::tensor::{assemble_psi0, assemble_psi_minus, assemble_psi_plus, Tensor333};

/// Denominators below this are treated as the edge of the validity region.
pub const SINGULAR_TOL: f64 = 1e-9;

/// Chain parameters `(J, Δ, D)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub j: f64,
    pub delta: f64,
    pub d: f64,
}

impl Couplings {
    pub fn new(j: f64, delta: f64, d: f64) -> Result<Self> {
        if !(j.is_finite() && delta.is_finite() && d.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "couplings must be finite: J={j}, delta={delta}, D={d}"
            )));
        }
        if j <= 0.0 {
            return Err(Error::InvalidArgument(format!("J must be positive, got {j}")));
        }
        Ok(Couplings { j, delta, d })
    }
}

/// `ε³ + (Δ−4D)ε² + (4D²−2DΔ−6)ε + 8D`, highest degree first.
pub fn eps0_coefficients(delta: f64, d: f64) -> [f64; 4] {
    [1.0, delta - 4.0 * d, 4.0 * d * d - 2.0 * d * delta - 6.0, 8.0 * d]
}

/// The quartic whose smallest root is `ε₁`, highest degree first.
pub fn eps1_coefficients(delta: f64, d: f64) -> [f64; 5] {
    let d2 = d * d;
    [
        1.0,
        2.0 * delta - 8.0 * d,
        22.0 * d2 - 10.0 * d * delta - 5.0,
        -24.0 * d2 * d + 14.0 * d2 * delta + 24.0 * d - 6.0 * delta,
        9.0 * d2 * d2 - 6.0 * delta * d2 * d - 27.0 * d2 + 14.0 * d * delta,
    ]
}

pub fn eps0_smallest_root(delta: f64, d: f64) -> Result<f64> {
    smallest_real_root(&eps0_coefficients(delta, d))
}

pub fn eps1_smallest_root(delta: f64, d: f64) -> Result<f64> {
    smallest_real_root(&eps1_coefficients(delta, d))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSolution {
    pub eps0: f64,
    pub eps1: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d_coef: f64,
    pub e: f64,
    pub n0: f64,
    pub n1: f64,
    pub x_ren: f64,
    pub z_ren: f64,
}

impl BlockSolution {
    pub fn psi0(&self) -> Tensor333 {
        assemble_psi0(self.a, self.b).expect("normalization is positive")
    }

    pub fn psi_plus(&self) -> Tensor333 {
        assemble_psi_plus(self.c, self.d_coef, self.e).expect("normalization is positive")
    }

    pub fn psi_minus(&self) -> Tensor333 {
        assemble_psi_minus(self.c, self.d_coef, self.e).expect("normalization is positive")
    }

    /// `|I6(ψ₀)| = 8 N₀⁶ a⁴`.
    pub fn abs_i6(&self) -> f64 {
        8.0 * self.n0.powi(6) * self.a.powi(4)
    }

    /// Scaled residuals of the cubic and quartic at the stored roots.
    pub fn residuals(&self, delta: f64, d: f64) -> (f64, f64) {
        (
            scaled_residual(&eps0_coefficients(delta, d), self.eps0),
            scaled_residual(&eps1_coefficients(delta, d), self.eps1),
        )
    }
}

fn guard(name: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() || value.abs() < SINGULAR_TOL {
        return Err(Error::SingularBlock { denominator: name, value });
    }
    Ok(value)
}

/// Solves the block at `(Δ, D)`.
pub fn block_solution(delta: f64, d: f64) -> Result<BlockSolution> {
    let eps0 = guard("eps0", eps0_smallest_root(delta, d)?)?;
    let eps1 = eps1_smallest_root(delta, d)?;
    let den_d = guard("eps1+2delta-3d", eps1 + 2.0 * delta - 3.0 * d)?;
    let den_e = guard("eps1-d", eps1 - d)?;

    let a = eps0 / 2.0 - d;
    let b = 2.0 * (1.0 - 2.0 * d / eps0);
    let c = eps1 - 3.0 * d;
    let d_coef = 2.0 * c / den_d;
    let e = 2.0 * c / den_e;
    let n0 = (2.0 + 4.0 * a * a + b * b).powf(-0.5);
    let n1 = (2.0 + 2.0 * c * c + d_coef * d_coef + e * e).powf(-0.5);
    let x_ren = n0 * n1 * (a + c + b * c + a * d_coef + a * e);
    let z_ren = n1 * n1 * (c * c + d_coef * d_coef);
    let sol = BlockSolution { eps0, eps1, a, b, c, d_coef, e, n0, n1, x_ren, z_ren };
    for (name, v) in [("a", a), ("b", b), ("c", c), ("n0", n0), ("n1", n1), ("x_ren", x_ren), ("z_ren", z_ren)] {
        if !v.is_finite() {
            return Err(Error::SingularBlock { denominator: name, value: v });
        }
    }
    Ok(sol)
}

fn spin_matrices() -> (Matrix3<f64>, Matrix3<f64>, Matrix3<f64>) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let sx = Matrix3::new(0.0, r, 0.0, r, 0.0, r, 0.0, r, 0.0);
    // S_y = -i A, so S_y ⊗ S_y = -A ⊗ A stays real.
    let a = Matrix3::new(0.0, r, 0.0, -r, 0.0, r, 0.0, -r, 0.0);
    let sz = Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0);
    (sx, a, sz)
}

fn kron3(a: &Matrix3<f64>, b: &Matrix3<f64>, c: &Matrix3<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(27, 27, |r, s| {
        a[(r / 9, s / 9)] * b[(r / 3 % 3, s / 3 % 3)] * c[(r % 3, s % 3)]
    })
}

/// Operator `op` acting on `site` (0, 1 or 2) of the block.
pub fn site_operator(op: &Matrix3<f64>, site: usize) -> DMatrix<f64> {
    let id = Matrix3::identity();
    match site {
        0 => kron3(op, &id, &id),
        1 => kron3(&id, op, &id),
        2 => kron3(&id, &id, op),
        _ => panic!("site {site} out of range"),
    }
}

/// `h_B = J [Σ_{i=1,2} (SˣSˣ + SʸSʸ + Δ SᶻSᶻ) + D Σ (Sᶻ)²]` as a 27×27 matrix.
pub fn build_block_hamiltonian(c: &Couplings) -> DMatrix<f64> {
    let (sx, a, sz) = spin_matrices();
    let id = Matrix3::identity();
    let sz2 = sz * sz;
    let bond = |x: &Matrix3<f64>, y: &Matrix3<f64>| kron3(x, y, &id) + kron3(&id, x, y);
    let h = bond(&sx, &sx) - bond(&a, &a) + bond(&sz, &sz) * c.delta
        + (kron3(&sz2, &id, &id) + kron3(&id, &sz2, &id) + kron3(&id, &id, &sz2)) * c.d;
    h * c.j
}

/// Total `Sᶻ` of each basis state.
pub fn total_sz(index: usize) -> i32 {
    [index / 9, index / 3 % 3, index % 3]
        .iter()
        .map(|&s| 1 - s as i32)
        .sum()
}

/// Tensor coefficients laid out in the Hamiltonian basis.
pub fn block_vector(t: &Tensor333) -> DVector<f64> {
    DVector::from_fn(27, |r, _| t.get(2 - r / 9, 2 - r / 3 % 3, 2 - r % 3).re)
}

/// Lowest eigenpair of `h` restricted to total `Sᶻ = sz`; the vector is
/// embedded back into the 27-dimensional space.
pub fn lowest_in_sector(h: &DMatrix<f64>, sz: i32) -> Result<(f64, DVector<f64>)> {
    let idx: Vec<usize> = (0..27).filter(|&r| total_sz(r) == sz).collect();
    if idx.is_empty() {
        return Err(Error::InvalidArgument(format!("no states with total Sz = {sz}")));
    }
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| h[(idx[i], idx[j])]);
    let (w, v) = dense_eigh(&sub)?;
    let mut full = DVector::zeros(27);
    for (k, &r) in idx.iter().enumerate() {
        full[r] = v[(k, 0)];
    }
    Ok((w[0], full))
}

/// `T = |ψ₊⟩⟨+1| + |ψ₀⟩⟨0| + |ψ₋⟩⟨−1|` as a 27×3 matrix.
pub fn embedding_operator(sol: &BlockSolution) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(27, 3);
    t.set_column(0, &block_vector(&sol.psi_plus()));
    t.set_column(1, &block_vector(&sol.psi0()));
    t.set_column(2, &block_vector(&sol.psi_minus()));
    t
}

/// Largest deviation of `Tᵀ S_j T` from the renormalized single-spin forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorReport {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl OperatorReport {
    pub fn max(&self) -> f64 {
        self.x.max(self.y).max(self.z)
    }
}

/// Checks `Tᵀ Sᵅ_j T = X_ren Sᵅ` (α = x, y) and `Z_ren Sᶻ` on the edge sites.
pub fn verify_renormalized_operators(sol: &BlockSolution) -> OperatorReport {
    let (sx, a, sz) = spin_matrices();
    let t = embedding_operator(sol);
    let dev = |op: &Matrix3<f64>, factor: f64| {
        [0, 2]
            .iter()
            .map(|&site| {
                let proj = t.transpose() * site_operator(op, site) * &t;
                let target = DMatrix::from_fn(3, 3, |i, j| factor * op[(i, j)]);
                (proj - target).amax()
            })
            .fold(0.0, f64::max)
    };
    OperatorReport {
        x: dev(&sx, sol.x_ren),
        y: dev(&a, sol.x_ren),
        z: dev(&sz, sol.z_ren),
    }
}

/// Exact-diagonalization comparison for one `(Δ, D)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdReport {
    /// `|E₀(ED) − J ε₀|`, lowest `Sᶻ = 0` level.
    pub eps0: f64,
    /// `max |E(ED, Sᶻ = ±1) − J ε₁|`.
    pub eps1: f64,
    /// Componentwise distance of the ED ground vector from ψ₀ after sign alignment.
    pub psi0: f64,
    /// `max |TᵀT − I|`.
    pub isometry: f64,
    /// `max |h T − T diag(E₁, E₀, E₁)|`.
    pub eigen_equation: f64,
    pub operators: OperatorReport,
}

impl EdReport {
    pub fn max(&self) -> f64 {
        [self.eps0, self.eps1, self.psi0, self.isometry, self.eigen_equation, self.operators.max()]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn ed_check(c: &Couplings, sol: &BlockSolution) -> Result<EdReport> {
    let h = build_block_hamiltonian(c);
    let (e0, v0) = lowest_in_sector(&h, 0)?;
    let (ep, _) = lowest_in_sector(&h, 1)?;
    let (em, _) = lowest_in_sector(&h, -1)?;
    let psi0 = block_vector(&sol.psi0());
    let sign = if v0.dot(&psi0) < 0.0 { -1.0 } else { 1.0 };
    let t = embedding_operator(sol);
    let energies = DMatrix::from_diagonal(&DVector::from_vec(vec![
        c.j * sol.eps1,
        c.j * sol.eps0,
        c.j * sol.eps1,
    ]));
    Ok(EdReport {
        eps0: (e0 - c.j * sol.eps0).abs(),
        eps1: (ep - c.j * sol.eps1).abs().max((em - c.j * sol.eps1).abs()),
        psi0: (v0 * sign - psi0).amax(),
        isometry: (t.transpose() * &t - DMatrix::identity(3, 3)).amax(),
        eigen_equation: (&h * &t - &t * energies).amax(),
        operators: verify_renormalized_operators(sol),
    })
}
