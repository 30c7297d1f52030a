//! Quasifree states on a self-dual CAR algebra.
//!
//! A quasifree state is fixed by its basis polarization `S`, a hermitian
//! operator with `0 ≤ S ≤ 1` and `S + ΓSΓ = 1`. The two-point function is
//! `ω(B*(f)B(g)) = (f, Sg)`; higher correlators are signed sums over pair
//! partitions of the kernel `ω(B(f)B(g)) = (Γf, Sg)`.

use std::fmt;
use std::ops::Deref;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{DynamicsGenerator, OneParticleSpace};
use crate::linalg::{
    hermitian_residual, identity_residual, inner, CMatrix, CVector, HermitianEigen, C64, I, ZERO,
};

/// Spectrum threshold separating faithful polarizations from projections.
pub const TOL_FAITHFUL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PolarizationDefect {
    NotHermitian,
    SpectrumOutOfRange,
    NotComplementary,
    DimensionMismatch,
}

/// Residuals of every polarization invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarizationReport {
    pub hermiticity: f64,
    pub spectrum_min: f64,
    pub spectrum_max: f64,
    /// `‖S + ΓSΓ - 1‖_F`
    pub complement: f64,
    /// `‖S² - S‖_F`, informational unless a projection is required.
    pub idempotence: f64,
    pub faithful: bool,
    pub defects: Vec<PolarizationDefect>,
}

impl PolarizationReport {
    pub fn passed(&self) -> bool {
        self.defects.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        let spread = (-self.spectrum_min).max(self.spectrum_max - 1.0).max(0.0);
        self.hermiticity.max(self.complement).max(spread)
    }
}

impl fmt::Display for PolarizationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} (hermiticity {:.3e}, spectrum [{:.3e}, {:.3e}], complement {:.3e})",
            self.defects, self.hermiticity, self.spectrum_min, self.spectrum_max, self.complement
        )
    }
}

pub fn validate_polarization(space: &OneParticleSpace, s: &CMatrix) -> PolarizationReport {
    let tol = space.tol();
    let d = space.dim();
    if s.nrows() != d || s.ncols() != d {
        return PolarizationReport {
            hermiticity: f64::INFINITY,
            spectrum_min: f64::NAN,
            spectrum_max: f64::NAN,
            complement: f64::INFINITY,
            idempotence: f64::INFINITY,
            faithful: false,
            defects: vec![PolarizationDefect::DimensionMismatch],
        };
    }
    let hermiticity = hermitian_residual(s);
    let eig = HermitianEigen::new(s);
    let complement = identity_residual(&(s + space.gamma_conjugate(s)));
    let idempotence = (s * s - s).norm();
    let mut defects = Vec::new();
    if hermiticity > tol {
        defects.push(PolarizationDefect::NotHermitian);
    }
    if eig.min() < -tol || eig.max() > 1.0 + tol {
        defects.push(PolarizationDefect::SpectrumOutOfRange);
    }
    if complement > tol {
        defects.push(PolarizationDefect::NotComplementary);
    }
    PolarizationReport {
        hermiticity,
        spectrum_min: eig.min(),
        spectrum_max: eig.max(),
        complement,
        idempotence,
        faithful: eig.min() >= TOL_FAITHFUL && eig.max() <= 1.0 - TOL_FAITHFUL,
        defects,
    }
}

/// Two-point kernel of a quasifree state.
#[derive(Debug, Clone)]
pub struct BasisPolarization {
    s: CMatrix,
    space: OneParticleSpace,
    faithful: bool,
}

impl BasisPolarization {
    pub fn new(space: &OneParticleSpace, s: CMatrix) -> Result<Self> {
        let report = validate_polarization(space, &s);
        if !report.passed() {
            return Err(Error::InvalidPolarization(Box::new(report)));
        }
        let s = (&s + s.adjoint()).scale(0.5);
        Ok(Self { s, space: space.clone(), faithful: report.faithful })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.s
    }

    pub fn space(&self) -> &OneParticleSpace {
        &self.space
    }

    pub fn is_faithful(&self) -> bool {
        self.faithful
    }

    pub fn report(&self) -> PolarizationReport {
        validate_polarization(&self.space, &self.s)
    }

    /// `‖[h, S]‖_F`
    pub fn flow_residual(&self, gen: &DynamicsGenerator) -> f64 {
        (gen.matrix() * &self.s - &self.s * gen.matrix()).norm()
    }
}

/// Idempotent basis polarization; its quasifree state is a pure Fock state.
#[derive(Debug, Clone)]
pub struct BasisProjection(BasisPolarization);

impl BasisProjection {
    pub fn new(space: &OneParticleSpace, p: CMatrix) -> Result<Self> {
        let pol = BasisPolarization::new(space, p)?;
        let r = (pol.matrix() * pol.matrix() - pol.matrix()).norm();
        if r > space.tol() {
            return Err(Error::NotProjection(r));
        }
        Ok(Self(pol))
    }

    pub fn polarization(&self) -> &BasisPolarization {
        &self.0
    }

    pub fn idempotence_residual(&self) -> f64 {
        (self.0.matrix() * self.0.matrix() - self.0.matrix()).norm()
    }

    pub fn rank(&self) -> f64 {
        self.0.matrix().trace().re
    }
}

impl Deref for BasisProjection {
    type Target = BasisPolarization;
    fn deref(&self) -> &BasisPolarization {
        &self.0
    }
}

fn require_gamma_odd(space: &OneParticleSpace, gen: &DynamicsGenerator) -> Result<()> {
    if gen.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: gen.dim() });
    }
    if !gen.is_gamma_odd() {
        let r = (space.gamma_conjugate(gen.matrix()) + gen.matrix()).norm();
        if r > space.tol() {
            return Err(Error::NotGammaOdd(r));
        }
    }
    Ok(())
}

/// Numerically stable `1 / (1 + e^{-x})`.
pub fn fermi_weight(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Polarization of the KMS state at inverse temperature `beta`:
/// `S = (1 + e^{-βh})^{-1}`.
pub fn kms_polarization(
    space: &OneParticleSpace,
    gen: &DynamicsGenerator,
    beta: f64,
) -> Result<BasisPolarization> {
    if !(beta > 0.0) {
        return Err(Error::BetaNonPositive(beta));
    }
    require_gamma_odd(space, gen)?;
    let s = gen.eigen().map(|e| fermi_weight(beta * e));
    BasisPolarization::new(space, s)
}

/// Spectral projection of `h` onto its positive part; the ground state.
pub fn ground_projection(space: &OneParticleSpace, gen: &DynamicsGenerator) -> Result<BasisProjection> {
    require_gamma_odd(space, gen)?;
    if let Some(&e) = gen.eigen().values.iter().find(|e| e.abs() <= space.tol()) {
        return Err(Error::ZeroMode(e));
    }
    let p = gen.eigen().map(|e| if e > 0.0 { 1.0 } else { 0.0 });
    BasisProjection::new(space, p)
}

/// Projection onto `span{(f_{2n} + i f_{2n-1})/√2}` for the Γ-invariant
/// basis `f_1, …, f_d` of [`OneParticleSpace::gamma_invariant_basis`].
pub fn basis_projection_from_pairing(space: &OneParticleSpace) -> BasisProjection {
    let basis = space.gamma_invariant_basis();
    let d = space.dim();
    let mut p = CMatrix::zeros(d, d);
    for pair in basis.chunks_exact(2) {
        let v = (&pair[1] + &pair[0] * I) * C64::from(std::f64::consts::FRAC_1_SQRT_2);
        p += &v * v.adjoint();
    }
    BasisProjection::new(space, p).expect("paired Γ-invariant basis yields a basis projection")
}

/// Basis projection on `H ⊕ H` (involution `Γ ⊕ -Γ`) whose restriction to
/// the first summand reproduces `S`.
pub fn doubling(s: &BasisPolarization) -> Result<(OneParticleSpace, BasisProjection)> {
    let space = s.space();
    let d = space.dim();
    let k = space.involution();
    let mut kk = CMatrix::zeros(2 * d, 2 * d);
    kk.view_mut((0, 0), (d, d)).copy_from(k);
    kk.view_mut((d, d), (d, d)).copy_from(&(-k));
    let doubled = OneParticleSpace::with_tolerance(kk, space.tol())?;

    let eig = HermitianEigen::new(s.matrix());
    let off = eig.map(|x| {
        let x = x.clamp(0.0, 1.0);
        (x * (1.0 - x)).sqrt()
    });
    let complement = CMatrix::identity(d, d) - s.matrix();
    let mut p = CMatrix::zeros(2 * d, 2 * d);
    p.view_mut((0, 0), (d, d)).copy_from(s.matrix());
    p.view_mut((0, d), (d, d)).copy_from(&off);
    p.view_mut((d, 0), (d, d)).copy_from(&off);
    p.view_mut((d, d), (d, d)).copy_from(&complement);
    let proj = BasisProjection::new(&doubled, p)?;
    Ok((doubled, proj))
}

/// `ω(B*(f) B(g)) = (f, S g)`.
pub fn two_point(s: &BasisPolarization, f: &CVector, g: &CVector) -> Result<C64> {
    s.space().check_len(f)?;
    s.space().check_len(g)?;
    Ok(inner(f, &(s.matrix() * g)))
}

/// `ω(B(f) B(g)) = (Γf, S g)`.
pub fn pair_kernel(s: &BasisPolarization, f: &CVector, g: &CVector) -> Result<C64> {
    let gf = s.space().gamma(f)?;
    two_point(s, &gf, g)
}

/// `ω(B(f_1) ⋯ B(f_n))` for the quasifree state with polarization `S`.
pub fn n_point(s: &BasisPolarization, fields: &[CVector]) -> Result<C64> {
    let n = fields.len();
    if n % 2 == 1 {
        for f in fields {
            s.space().check_len(f)?;
        }
        return Ok(ZERO);
    }
    let kernel = kernel_matrix(s, fields)?;
    Ok(pairing_sum(n, |i, j| kernel[(i, j)]))
}

/// Matrix of pair kernels `(Γf_i, S f_j)`.
pub fn kernel_matrix(s: &BasisPolarization, fields: &[CVector]) -> Result<CMatrix> {
    let n = fields.len();
    let mut sg = Vec::with_capacity(n);
    let mut gf = Vec::with_capacity(n);
    for f in fields {
        gf.push(s.space().gamma(f)?);
        sg.push(s.matrix() * f);
    }
    Ok(CMatrix::from_fn(n, n, |i, j| if i < j { inner(&gf[i], &sg[j]) } else { ZERO }))
}

/// Signed sum over ordered pair partitions of `0..n`:
/// `Σ_π (-1)^{|π|} Π k(π_{2m-1}, π_{2m})` with `π_{2m-1} < π_{2m}`.
pub fn pairing_sum(n: usize, kernel: impl Fn(usize, usize) -> C64) -> C64 {
    pairing_sum_with_derivative(n, |i, j| (kernel(i, j), ZERO)).0
}

/// Pairing sum together with its derivative along a parameter, given the
/// kernel values and their derivatives. The derivative follows the product
/// rule term by term.
pub fn pairing_sum_with_derivative(
    n: usize,
    kernel: impl Fn(usize, usize) -> (C64, C64),
) -> (C64, C64) {
    if n % 2 == 1 {
        return (ZERO, ZERO);
    }
    let table: Vec<Vec<(C64, C64)>> =
        (0..n).map(|i| (0..n).map(|j| if i < j { kernel(i, j) } else { (ZERO, ZERO) }).collect()).collect();
    let remaining: Vec<usize> = (0..n).collect();
    pair_recursive(&remaining, &table)
}

fn pair_recursive(remaining: &[usize], table: &[Vec<(C64, C64)>]) -> (C64, C64) {
    if remaining.is_empty() {
        return (C64::from(1.0), ZERO);
    }
    let first = remaining[0];
    let mut value = ZERO;
    let mut deriv = ZERO;
    let mut rest = Vec::with_capacity(remaining.len() - 2);
    for k in 1..remaining.len() {
        let partner = remaining[k];
        // Moving the partner next to `first` crosses k-1 fields.
        let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
        rest.clear();
        rest.extend(remaining[1..].iter().copied().filter(|&x| x != partner));
        let (kv, kd) = table[first][partner];
        let (rv, rd) = pair_recursive(&rest, table);
        value += kv * rv * sign;
        deriv += (kd * rv + kv * rd) * sign;
    }
    (value, deriv)
}

/// Number of ordered pair partitions, `(n-1)!!`.
pub fn pairing_count(n: usize) -> u64 {
    if n % 2 == 1 {
        return 0;
    }
    (1..n as u64).step_by(2).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, from_rows, real_diag};
    use crate::random::{random_gamma_odd_hamiltonian, random_space, random_vector, rng_for};
    use proptest::prelude::*;

    fn diag_space_and_gen(eps: &[f64]) -> (OneParticleSpace, DynamicsGenerator) {
        // Γ = conjugation composed with the swap inside each (Ψ⁺, Ψ⁻) pair, sign -1.
        let d = 2 * eps.len();
        let mut k = CMatrix::zeros(d, d);
        let mut h = vec![0.0; d];
        for (n, &e) in eps.iter().enumerate() {
            k[(2 * n, 2 * n + 1)] = c(-1.0, 0.0);
            k[(2 * n + 1, 2 * n)] = c(-1.0, 0.0);
            h[2 * n] = e;
            h[2 * n + 1] = -e;
        }
        let space = OneParticleSpace::new(k).unwrap();
        let gen = DynamicsGenerator::gamma_odd(&space, real_diag(&h)).unwrap();
        (space, gen)
    }

    #[test]
    fn kms_examples() {
        let (space, gen) = diag_space_and_gen(&[1.0]);
        let s = kms_polarization(&space, &gen, 3f64.ln()).unwrap();
        assert!((s.matrix() - real_diag(&[0.75, 0.25])).norm() < 1e-15);
        assert!(s.is_faithful());
        assert!(s.flow_residual(&gen) < 1e-14);

        let zero = DynamicsGenerator::gamma_odd(&space, CMatrix::zeros(2, 2)).unwrap();
        let s = kms_polarization(&space, &zero, 2.5).unwrap();
        assert!((s.matrix() - real_diag(&[0.5, 0.5])).norm() < 1e-15);

        let (space, gen) = diag_space_and_gen(&[0.8]);
        let s = kms_polarization(&space, &gen, 1.7).unwrap();
        assert!(s.report().complement < 1e-14);
        assert!(matches!(kms_polarization(&space, &gen, 0.0), Err(Error::BetaNonPositive(_))));
    }

    #[test]
    fn kms_detailed_balance() {
        let mut rng = rng_for(11, 0);
        for _ in 0..5 {
            let space = random_space(&mut rng, 6);
            let gen = random_gamma_odd_hamiltonian(&mut rng, &space, 0.05);
            let beta = 1.3;
            let s = kms_polarization(&space, &gen, beta).unwrap();
            let eig = gen.eigen();
            for k in 0..space.dim() {
                let eps = eig.values[k];
                if eps <= 0.0 {
                    continue;
                }
                let psi = eig.vector(k);
                let gpsi = space.gamma(&psi).unwrap();
                let lhs = two_point(&s, &psi, &psi).unwrap();
                let rhs = two_point(&s, &gpsi, &gpsi).unwrap() * (beta * eps).exp();
                assert!((lhs - rhs).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn ground_projection_examples() {
        let space = OneParticleSpace::new(from_rows(&[
            &[(0., 0.), (-1., 0.)],
            &[(-1., 0.), (0., 0.)],
        ]))
        .unwrap();
        let gen = DynamicsGenerator::gamma_odd(&space, real_diag(&[2.0, -2.0])).unwrap();
        let p = ground_projection(&space, &gen).unwrap();
        assert!((p.matrix() - real_diag(&[1.0, 0.0])).norm() < 1e-15);

        let (space, _) = diag_space_and_gen(&[1.0, 3.0]);
        // Reorder to diag(1, 3, -1, -3) by permuting the basis.
        let perm = [0usize, 2, 1, 3];
        let k = CMatrix::from_fn(4, 4, |i, j| space.involution()[(perm[i], perm[j])]);
        let space = OneParticleSpace::new(k).unwrap();
        let gen = DynamicsGenerator::gamma_odd(&space, real_diag(&[1.0, 3.0, -1.0, -3.0])).unwrap();
        let p = ground_projection(&space, &gen).unwrap();
        assert!((p.matrix() - real_diag(&[1.0, 1.0, 0.0, 0.0])).norm() < 1e-15);

        let (space, gen) = diag_space_and_gen(&[1e-12]);
        assert!(matches!(ground_projection(&space, &gen), Err(Error::ZeroMode(_))));
    }

    #[test]
    fn ground_state_inequality() {
        let mut rng = rng_for(12, 0);
        for _ in 0..10 {
            let space = random_space(&mut rng, 8);
            let gen = random_gamma_odd_hamiltonian(&mut rng, &space, 0.01);
            let p = ground_projection(&space, &gen).unwrap();
            let g = random_vector(&mut rng, 8);
            let val = inner(&g, &(p.matrix() * gen.matrix() * &g));
            assert!(val.re >= -1e-12);
            assert!(val.im.abs() < 1e-12);
        }
    }

    #[test]
    fn pairing_projection_examples() {
        let space = OneParticleSpace::conjugation(2).unwrap();
        let p = basis_projection_from_pairing(&space);
        let expect = from_rows(&[&[(0.5, 0.), (0., 0.5)], &[(0., -0.5), (0.5, 0.)]]);
        assert!((p.matrix() - expect).norm() < 1e-15);

        let mut rng = rng_for(13, 0);
        for half in 1..6 {
            let space = random_space(&mut rng, 2 * half);
            let p = basis_projection_from_pairing(&space);
            assert!((p.rank() - half as f64).abs() < 1e-10);
            assert!(identity_residual(&(p.matrix() + space.gamma_conjugate(p.matrix()))) < 1e-10);
            assert!(p.idempotence_residual() < 1e-10);
        }
    }

    #[test]
    fn doubling_examples() {
        let space = OneParticleSpace::conjugation(4).unwrap();
        let half = BasisPolarization::new(&space, CMatrix::identity(4, 4).scale(0.5)).unwrap();
        let (doubled, ps) = doubling(&half).unwrap();
        assert_eq!(doubled.dim(), 8);
        let i4 = CMatrix::identity(4, 4).scale(0.5);
        let mut expect = CMatrix::zeros(8, 8);
        for (r, cidx) in [(0, 0), (0, 4), (4, 0), (4, 4)] {
            expect.view_mut((r, cidx), (4, 4)).copy_from(&i4);
        }
        assert!((ps.matrix() - expect).norm() < 1e-15);

        let p = basis_projection_from_pairing(&space);
        let (_, ps) = doubling(p.polarization()).unwrap();
        let mut expect = CMatrix::zeros(8, 8);
        expect.view_mut((0, 0), (4, 4)).copy_from(p.matrix());
        expect.view_mut((4, 4), (4, 4)).copy_from(&(CMatrix::identity(4, 4) - p.matrix()));
        assert!((ps.matrix() - expect).norm() < 1e-7);
    }

    #[test]
    fn doubling_random_kms() {
        let mut rng = rng_for(14, 0);
        for _ in 0..10 {
            let space = random_space(&mut rng, 6);
            let gen = random_gamma_odd_hamiltonian(&mut rng, &space, 0.0);
            let s = kms_polarization(&space, &gen, 0.9).unwrap();
            let (doubled, ps) = doubling(&s).unwrap();
            assert!(ps.idempotence_residual() < 1e-9);
            assert!(hermitian_residual(ps.matrix()) < 1e-9);
            assert!(identity_residual(&(ps.matrix() + doubled.gamma_conjugate(ps.matrix()))) < 1e-9);
            // Restriction to H ⊕ 0 reproduces S.
            let f = random_vector(&mut rng, 6);
            let g = random_vector(&mut rng, 6);
            let pad = |v: &CVector| CVector::from_fn(12, |i, _| if i < 6 { v[i] } else { ZERO });
            let lhs = two_point(ps.polarization(), &pad(&f), &pad(&g)).unwrap();
            assert!((lhs - two_point(&s, &f, &g).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn two_point_examples() {
        let space = OneParticleSpace::conjugation(2).unwrap();
        let s = BasisPolarization::new(&space, CMatrix::identity(2, 2).scale(0.5)).unwrap();
        let f = space.make_gamma_invariant(&CVector::from_vec(vec![c(0.3, 1.0), c(-0.2, 0.4)])).unwrap();
        assert!((two_point(&s, f.vector(), f.vector()).unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        let p = basis_projection_from_pairing(&space);
        let kernel_vec = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        assert!((p.matrix() * &kernel_vec).norm() < 1e-15);
        assert!(two_point(p.polarization(), &kernel_vec, &kernel_vec).unwrap().norm() < 1e-15);
    }

    #[test]
    fn validate_examples() {
        let space = OneParticleSpace::conjugation(2).unwrap();
        let r = validate_polarization(&space, &CMatrix::identity(2, 2).scale(0.5));
        assert!(r.passed() && r.faithful);
        assert_eq!(r.hermiticity, 0.0);
        assert_eq!(r.complement, 0.0);

        let r = validate_polarization(&space, &real_diag(&[2.0, -1.0]));
        assert!(r.defects.contains(&PolarizationDefect::SpectrumOutOfRange));

        let p = basis_projection_from_pairing(&space);
        let r = validate_polarization(&space, p.matrix());
        assert!(r.passed() && !r.faithful);
        assert!(r.idempotence < 1e-15);
    }

    #[test]
    fn n_point_low_orders() {
        let mut rng = rng_for(15, 0);
        let space = random_space(&mut rng, 6);
        let gen = random_gamma_odd_hamiltonian(&mut rng, &space, 0.0);
        let s = kms_polarization(&space, &gen, 1.1).unwrap();
        let fs: Vec<CVector> = (0..4).map(|_| random_vector(&mut rng, 6)).collect();
        assert_eq!(n_point(&s, &fs[..1]).unwrap(), ZERO);
        assert_eq!(n_point(&s, &fs[..3]).unwrap(), ZERO);
        let w = |i: usize, j: usize| pair_kernel(&s, &fs[i], &fs[j]).unwrap();
        let expect = w(0, 1) * w(2, 3) - w(0, 2) * w(1, 3) + w(0, 3) * w(1, 2);
        assert!((n_point(&s, &fs).unwrap() - expect).norm() < 1e-14);
        let f = space.make_gamma_invariant(&fs[0]).unwrap();
        let two = n_point(&s, &[f.vector().clone(), f.vector().clone()]).unwrap();
        assert!((two - two_point(&s, f.vector(), f.vector()).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn pairing_counts() {
        for (n, cnt) in [(2, 1), (4, 3), (6, 15), (8, 105)] {
            assert_eq!(pairing_count(n), cnt);
            let terms = pairing_sum(n, |_, _| c(1.0, 0.0));
            // All-ones kernel: Pfaffian of the all-ones antisymmetric matrix is 1.
            assert!((terms - c(1.0, 0.0)).norm() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn pairing_derivative_matches_difference() {
        let mut rng = rng_for(16, 0);
        let base = crate::random::random_matrix(&mut rng, 6);
        let slope = crate::random::random_matrix(&mut rng, 6);
        let at = |t: f64| pairing_sum(6, |i, j| base[(i, j)] + slope[(i, j)] * t);
        let (_, d) = pairing_sum_with_derivative(6, |i, j| (base[(i, j)], slope[(i, j)]));
        let h = 1e-5;
        let fd = (at(h) - at(-h)) / C64::from(2.0 * h);
        assert!((d - fd).norm() < 1e-7);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn two_point_sesquilinear_and_car(seed in 0u64..10_000, half in 1usize..6) {
            let mut rng = rng_for(seed, 2);
            let d = 2 * half;
            let space = random_space(&mut rng, d);
            let gen = random_gamma_odd_hamiltonian(&mut rng, &space, 0.0);
            let s = kms_polarization(&space, &gen, 0.7).unwrap();
            let f = random_vector(&mut rng, d);
            let g = random_vector(&mut rng, d);
            let h = random_vector(&mut rng, d);
            let a = crate::random::gaussian(&mut rng);
            let lin = two_point(&s, &f, &(&g * a + &h)).unwrap();
            prop_assert!((lin - (two_point(&s, &f, &g).unwrap() * a + two_point(&s, &f, &h).unwrap())).norm() < 1e-12);
            let anti = two_point(&s, &(&f * a), &g).unwrap();
            prop_assert!((anti - two_point(&s, &f, &g).unwrap() * a.conj()).norm() < 1e-12);

            let gg = space.gamma(&g).unwrap();
            let gf = space.gamma(&f).unwrap();
            let car = two_point(&s, &f, &g).unwrap() + two_point(&s, &gg, &gf).unwrap();
            prop_assert!((car - inner(&f, &g)).norm() < 1e-10);
        }
    }
}
