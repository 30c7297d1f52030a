//! One-particle Hilbert spaces carrying an antiunitary involution.
//!
//! The involution is stored as a unitary matrix `K` and acts as
//! `Γv = K·conj(v)`. Dynamics are generated by a hermitian `h`; when `h`
//! anticommutes with `Γ` the flow `exp(-ith)` commutes with `Γ`.

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_residual, identity_residual, inner, unitary_flow, CMatrix, CVector, HermitianEigen,
    C64, I,
};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct OneParticleSpace {
    dim: usize,
    involution: CMatrix,
    tol: f64,
}

impl OneParticleSpace {
    pub fn new(involution: CMatrix) -> Result<Self> {
        Self::with_tolerance(involution, DEFAULT_TOL)
    }

    pub fn with_tolerance(involution: CMatrix, tol: f64) -> Result<Self> {
        let d = involution.nrows();
        if d == 0 || !d.is_multiple_of(2) {
            return Err(Error::OddDimension(d));
        }
        if involution.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: involution.ncols() });
        }
        let unitary = identity_residual(&(&involution * involution.adjoint()));
        if unitary > tol {
            return Err(Error::NotUnitary(unitary));
        }
        let square = identity_residual(&(&involution * involution.conjugate()));
        if square > tol {
            return Err(Error::InvolutionSquareFails(square));
        }
        Ok(Self { dim: d, involution, tol })
    }

    /// Plain complex conjugation on `C^d`.
    pub fn conjugation(d: usize) -> Result<Self> {
        Self::new(CMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn involution(&self) -> &CMatrix {
        &self.involution
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn check_len(&self, v: &CVector) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok(())
    }

    pub fn gamma(&self, v: &CVector) -> Result<CVector> {
        self.check_len(v)?;
        Ok(&self.involution * v.conjugate())
    }

    /// `Γ A Γ` as a linear map: `K conj(A) K*`.
    pub fn gamma_conjugate(&self, a: &CMatrix) -> CMatrix {
        &self.involution * a.conjugate() * self.involution.adjoint()
    }

    pub fn inner(&self, f: &CVector, g: &CVector) -> Result<C64> {
        self.check_len(f)?;
        self.check_len(g)?;
        Ok(inner(f, g))
    }

    pub fn gamma_residual(&self, v: &CVector) -> Result<f64> {
        Ok((self.gamma(v)? - v).norm())
    }

    /// Γ-invariant vector with `(f,f) = 2` built from an arbitrary seed:
    /// `(1+Γ)h`, or `i(1-Γ)h` when the first candidate vanishes.
    pub fn make_gamma_invariant(&self, seed: &CVector) -> Result<FieldVector> {
        let gamma_seed = self.gamma(seed)?;
        let mut candidate = seed + &gamma_seed;
        if candidate.norm() <= self.tol {
            candidate = (seed - &gamma_seed) * I;
        }
        let norm = candidate.norm();
        if norm <= self.tol {
            return Err(Error::DegenerateSeed);
        }
        candidate *= C64::from(std::f64::consts::SQRT_2 / norm);
        FieldVector::new(self, candidate)
    }

    /// Orthonormal basis of Γ-fixed vectors. Candidates `(1+Γ)e_k` and
    /// `i(1-Γ)e_k` are orthogonalized in index order; residuals below
    /// tolerance are skipped.
    pub fn gamma_invariant_basis(&self) -> Vec<CVector> {
        let d = self.dim;
        let mut basis: Vec<CVector> = Vec::with_capacity(d);
        for k in 0..d {
            if basis.len() == d {
                break;
            }
            let e = CVector::from_fn(d, |i, _| if i == k { C64::from(1.0) } else { C64::from(0.0) });
            let ge = &self.involution * e.conjugate();
            for cand in [&e + &ge, (&e - &ge) * I] {
                let mut r = cand;
                // Two passes keep the basis orthonormal to rounding.
                for _ in 0..2 {
                    for b in &basis {
                        // Real by Γ-invariance; dropping the imaginary part keeps Γr = r.
                        let coef = inner(b, &r).re;
                        r -= b * C64::from(coef);
                    }
                }
                let n = r.norm();
                if n > self.tol && basis.len() < d {
                    basis.push(r / C64::from(n));
                }
            }
        }
        basis
    }

    pub fn evolve(&self, gen: &DynamicsGenerator, t: f64, v: &CVector) -> Result<CVector> {
        self.check_len(v)?;
        gen.check_dim(self.dim)?;
        Ok(gen.evolution(t) * v)
    }
}

/// Hermitian one-particle Hamiltonian, validated at construction.
#[derive(Debug, Clone)]
pub struct DynamicsGenerator {
    h: CMatrix,
    eigen: HermitianEigen,
    gamma_odd: bool,
}

impl DynamicsGenerator {
    pub fn new(h: CMatrix, tol: f64) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::DimensionMismatch { expected: h.nrows(), got: h.ncols() });
        }
        let r = hermitian_residual(&h);
        if r > tol {
            return Err(Error::NotHermitian(r));
        }
        let h = (&h + h.adjoint()).scale(0.5);
        let eigen = HermitianEigen::new(&h);
        Ok(Self { h, eigen, gamma_odd: false })
    }

    /// Generator required to satisfy `ΓhΓ = -h` on `space`.
    pub fn gamma_odd(space: &OneParticleSpace, h: CMatrix) -> Result<Self> {
        if h.nrows() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: h.nrows() });
        }
        let mut gen = Self::new(h, space.tol())?;
        let r = (space.gamma_conjugate(&gen.h) + &gen.h).norm();
        if r > space.tol() {
            return Err(Error::NotGammaOdd(r));
        }
        gen.gamma_odd = true;
        Ok(gen)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn is_gamma_odd(&self) -> bool {
        self.gamma_odd
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: self.dim() });
        }
        Ok(())
    }

    /// `exp(-i t h)`.
    pub fn evolution(&self, t: f64) -> CMatrix {
        unitary_flow(&self.eigen, t)
    }

    /// Smallest eigenvalue magnitude.
    pub fn gap(&self) -> f64 {
        self.eigen.values.iter().fold(f64::INFINITY, |m, e| m.min(e.abs()))
    }
}

/// One-particle test vector with its Γ-invariance certificate.
#[derive(Debug, Clone)]
pub struct FieldVector {
    v: CVector,
    gamma_invariant: bool,
    norm_sq: f64,
}

impl FieldVector {
    pub fn new(space: &OneParticleSpace, v: CVector) -> Result<Self> {
        let gamma_invariant = space.gamma_residual(&v)? <= space.tol();
        let norm_sq = v.norm_squared();
        Ok(Self { v, gamma_invariant, norm_sq })
    }

    /// Field whose image `B(f)` is a self-adjoint unitary: `Γf = f`, `(f,f) = 2`.
    pub fn unitary_excitation(space: &OneParticleSpace, v: CVector) -> Result<Self> {
        let f = Self::new(space, v)?;
        f.require_unitary(space)?;
        Ok(f)
    }

    pub fn require_unitary(&self, space: &OneParticleSpace) -> Result<()> {
        space.check_len(&self.v)?;
        if !self.gamma_invariant {
            return Err(Error::NotGammaInvariant(space.gamma_residual(&self.v)?));
        }
        if (self.norm_sq - 2.0).abs() > space.tol() {
            return Err(Error::WrongNormalization(self.norm_sq));
        }
        Ok(())
    }

    pub fn vector(&self) -> &CVector {
        &self.v
    }

    pub fn into_vector(self) -> CVector {
        self.v
    }

    pub fn is_gamma_invariant(&self) -> bool {
        self.gamma_invariant
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }
}
