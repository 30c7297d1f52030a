//! Type-I Tomita-Takesaki theory for vector states on `H₁ ⊗ H₂`.
//!
//! A vector `ψ ∈ Cⁿ ⊗ Cⁿ` is stored with index `i·n + j` for `|i⟩ ⊗ |j'⟩`,
//! i.e. as the row-major flattening of its coefficient matrix `C`. The
//! Schmidt decomposition `ψ = Σ_k c_k |a_k⟩ ⊗ |b_k⟩` uses real, descending
//! coefficients; coefficient phases are absorbed into the second basis.

use crate::error::{Error, Result};
use crate::hilbert::DEFAULT_TOL;
use crate::linalg::{hermitian_residual, kron, CMatrix, CVector, HermitianEigen, C64, ONE};

#[derive(Debug, Clone)]
pub struct BipartiteVector {
    n: usize,
    psi: CVector,
    coefficients: Vec<f64>,
    first_basis: CMatrix,
    second_basis: CMatrix,
    tol: f64,
}

/// Side length `n` of a vector of length `n²`.
fn square_side(len: usize) -> Result<usize> {
    let n = (len as f64).sqrt().round() as usize;
    if n * n != len || n == 0 {
        return Err(Error::InvalidParameter(format!("length {len} is not a perfect square")));
    }
    Ok(n)
}

pub fn coefficient_matrix(psi: &CVector) -> Result<CMatrix> {
    let n = square_side(psi.len())?;
    Ok(CMatrix::from_fn(n, n, |i, j| psi[i * n + j]))
}

pub fn schmidt(psi: &CVector) -> Result<BipartiteVector> {
    schmidt_with_tolerance(psi, DEFAULT_TOL)
}

pub fn schmidt_with_tolerance(psi: &CVector, tol: f64) -> Result<BipartiteVector> {
    let c = coefficient_matrix(psi)?;
    let n = c.nrows();
    if psi.norm() <= tol {
        return Err(Error::ZeroVector);
    }
    let svd = c.clone().svd(true, true);
    let u = svd.u.expect("requested u");
    let v_t = svd.v_t.expect("requested v_t");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let coefficients = order.iter().map(|&k| svd.singular_values[k]).collect();
    // C = U Σ V*, so ψ = Σ_k σ_k u_k ⊗ conj(v_k) with v_k the rows of V* conjugated.
    let first_basis = CMatrix::from_fn(n, n, |i, k| u[(i, order[k])]);
    let second_basis = CMatrix::from_fn(n, n, |j, k| v_t[(order[k], j)]);
    Ok(BipartiteVector { n, psi: psi.clone(), coefficients, first_basis, second_basis, tol })
}

impl BipartiteVector {
    pub fn side(&self) -> usize {
        self.n
    }

    pub fn vector(&self) -> &CVector {
        &self.psi
    }

    /// Schmidt coefficients, descending.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn first_basis(&self) -> &CMatrix {
        &self.first_basis
    }

    pub fn second_basis(&self) -> &CMatrix {
        &self.second_basis
    }

    pub fn is_cyclic_separating(&self) -> bool {
        self.coefficients.iter().all(|&c| c > self.tol)
    }

    fn require_separating(&self) -> Result<()> {
        if !self.is_cyclic_separating() {
            return Err(Error::NotSeparating(self.coefficients.last().copied().unwrap_or(0.0)));
        }
        Ok(())
    }

    /// `|a_i⟩ ⊗ |b_j⟩`
    pub fn product_basis_vector(&self, i: usize, j: usize) -> CVector {
        let a = self.first_basis.column(i).into_owned();
        let b = self.second_basis.column(j).into_owned();
        a.kronecker(&b)
    }

    /// `ρ₁ = Tr₂ |ψ⟩⟨ψ| = C C*`.
    pub fn reduced_first(&self) -> CMatrix {
        let c = coefficient_matrix(&self.psi).expect("validated at construction");
        &c * c.adjoint()
    }

    /// `ρ₂ = Tr₁ |ψ⟩⟨ψ| = Cᵀ conj(C)`.
    pub fn reduced_second(&self) -> CMatrix {
        let c = coefficient_matrix(&self.psi).expect("validated at construction");
        c.transpose() * c.conjugate()
    }

    /// `Σ_k f(c_k) |a_k⟩⟨a_k|`
    fn first_spectral(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        spectral(&self.first_basis, &self.coefficients, f)
    }

    fn second_spectral(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        spectral(&self.second_basis, &self.coefficients, f)
    }
}

fn spectral(basis: &CMatrix, coeffs: &[f64], f: impl Fn(f64) -> f64) -> CMatrix {
    let n = basis.nrows();
    let mut scaled = basis.clone();
    for (k, &ck) in coeffs.iter().enumerate() {
        let w = C64::from(f(ck));
        for i in 0..n {
            scaled[(i, k)] *= w;
        }
    }
    scaled * basis.adjoint()
}

/// Antiunitary operator `v ↦ M·conj(v)`.
#[derive(Debug, Clone)]
pub struct AntiUnitary {
    matrix: CMatrix,
}

impl AntiUnitary {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v.conjugate()
    }

    /// `J ∘ J` as a linear map.
    pub fn square(&self) -> CMatrix {
        &self.matrix * self.matrix.conjugate()
    }

    /// `J A J` as a linear map.
    pub fn conjugate(&self, a: &CMatrix) -> CMatrix {
        &self.matrix * a.conjugate() * self.matrix.conjugate()
    }
}

#[derive(Debug, Clone)]
pub struct ModularPair {
    /// `Δ_Ψ = ρ₁ ⊗ ρ₂^{-1}`
    pub delta: CMatrix,
    /// `J_Ψ |a_i ⊗ b_j⟩ = |a_j ⊗ b_i⟩`, antilinear.
    pub conjugation: AntiUnitary,
}

/// Modular operator and modular conjugation of a cyclic and separating vector.
pub fn modular_operator_bipartite(psi: &BipartiteVector) -> Result<ModularPair> {
    psi.require_separating()?;
    let rho1 = psi.first_spectral(|c| c * c);
    let rho2_inv = psi.second_spectral(|c| 1.0 / (c * c));
    let delta = kron(&rho1, &rho2_inv);

    let n = psi.n;
    let w = kron(&psi.first_basis, &psi.second_basis);
    let swap = CMatrix::from_fn(n * n, n * n, |r, col| {
        let (i, j) = (col / n, col % n);
        if r == j * n + i {
            ONE
        } else {
            C64::from(0.0)
        }
    });
    let matrix = &w * swap * w.transpose();
    Ok(ModularPair { delta, conjugation: AntiUnitary { matrix } })
}

/// `Δ_{Φ|Ψ} = σ₁ ⊗ ρ₂^{-1}` with `σ₁` the first marginal of `φ`.
pub fn relative_modular_bipartite(phi: &CVector, psi: &BipartiteVector) -> Result<CMatrix> {
    psi.require_separating()?;
    if phi.len() != psi.psi.len() {
        return Err(Error::DimensionMismatch { expected: psi.psi.len(), got: phi.len() });
    }
    if phi.norm() <= psi.tol {
        return Err(Error::ZeroVector);
    }
    let cphi = coefficient_matrix(phi)?;
    let sigma1 = &cphi * cphi.adjoint();
    let rho2_inv = psi.second_spectral(|c| 1.0 / (c * c));
    Ok(kron(&sigma1, &rho2_inv))
}

/// Validated density matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(rho: CMatrix, tol: f64) -> Result<Self> {
        let h = hermitian_residual(&rho);
        if h > tol {
            return Err(Error::InvalidDensity(format!("not hermitian (residual {h:.3e})")));
        }
        let tr = rho.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let min = HermitianEigen::new(&rho).min();
        if min < -tol {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self((&rho + rho.adjoint()).scale(0.5)))
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ,ψ⟩`
    pub fn pure(psi: &CVector) -> Result<Self> {
        let n2 = psi.norm_squared();
        if n2 == 0.0 {
            return Err(Error::ZeroVector);
        }
        Self::new(psi * psi.adjoint() / C64::from(n2), DEFAULT_TOL)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// Eigenvalues at or below this are treated as exact zeros when taking
/// logarithms: the numerical rank threshold of the decomposition.
fn numerical_zero(eig: &HermitianEigen) -> f64 {
    f64::EPSILON * eig.dim().max(1) as f64 * eig.max().abs().max(1.0) * 4.0
}

/// `Tr ρ (ln ρ - ln σ)`, restricted to the support of `ρ`; `+∞` when `ρ`
/// carries weight above `weight_tol` on the kernel of `σ`.
pub fn vn_relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    vn_relative_entropy_with_tolerance(rho, sigma, DEFAULT_TOL)
}

pub fn vn_relative_entropy_with_tolerance(rho: &DensityMatrix, sigma: &DensityMatrix, weight_tol: f64) -> f64 {
    assert_eq!(rho.dim(), sigma.dim(), "density matrices of different dimension");
    let er = HermitianEigen::new(rho.matrix());
    let es = HermitianEigen::new(sigma.matrix());
    let zr = numerical_zero(&er);
    let zs = numerical_zero(&es);

    let mut entropy_term = 0.0;
    for &p in &er.values {
        if p > zr {
            entropy_term += p * p.ln();
        }
    }
    let mut cross = 0.0;
    for (l, &q) in es.values.iter().enumerate() {
        let w = es.vector(l);
        let weight = w.dotc(&(rho.matrix() * &w)).re;
        if q <= zs {
            if weight > weight_tol {
                return f64::INFINITY;
            }
            continue;
        }
        cross += weight * q.ln();
    }
    entropy_term - cross
}

/// Araki relative entropy `-⟨Ψ, ln Δ_{Φ|Ψ} Ψ⟩` of normalized vector states,
/// evaluated from the spectral decompositions of `σ₁` and `ρ₂`.
pub fn araki_entropy_bipartite(phi: &CVector, psi: &BipartiteVector) -> Result<f64> {
    psi.require_separating()?;
    if phi.len() != psi.psi.len() {
        return Err(Error::DimensionMismatch { expected: psi.psi.len(), got: phi.len() });
    }
    let pn = phi.norm();
    if pn <= psi.tol {
        return Err(Error::ZeroVector);
    }
    let cphi = coefficient_matrix(&(phi / C64::from(pn)))?;
    let sigma1 = HermitianEigen::new(&(&cphi * cphi.adjoint()));
    let zs = numerical_zero(&sigma1);
    let norm_sq: f64 = psi.coefficients.iter().map(|c| c * c).sum();
    let psi_unit = &psi.psi / C64::from(norm_sq.sqrt());

    // ln Δ_{Φ|Ψ} is diagonal in (σ₁ eigenbasis) ⊗ (Schmidt basis b_k),
    // with eigenvalue ln s_a - 2 ln c_k.
    let n = psi.n;
    let mut total = 0.0;
    for a in 0..n {
        let sa = sigma1.vector(a);
        for k in 0..n {
            let b = psi.second_basis.column(k).into_owned();
            let v = sa.kronecker(&b);
            let weight = v.dotc(&psi_unit).norm_sqr();
            let s = sigma1.values[a];
            if s <= zs {
                if weight > psi.tol {
                    return Ok(f64::INFINITY);
                }
                continue;
            }
            let ck2 = psi.coefficients[k] * psi.coefficients[k] / norm_sq;
            total += weight * (s.ln() - ck2.ln());
        }
    }
    Ok(-total)
}
