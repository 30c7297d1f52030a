//! Antisymmetric Fock space over the range of a basis projection.
//!
//! States are indexed by occupation bitstrings: mode `j` is bit `j` and the
//! vacuum is index 0. Creation operators carry the Jordan-Wigner sign
//! `(-1)^{#occupied modes below j}`.
//!
//! The self-dual field is represented as `π(B(f)) = a*(Pf) + a(PΓf)` with
//! `a*` linear and `a` antilinear in its argument, so `f ↦ π(B(f))` is
//! ℂ-linear, `π(B(Γf)) = π(B(f))*`, and `⟨Ω, π(B*(f))π(B(g))Ω⟩ = (f, Pg)`.

use crate::error::{Error, Result};
use crate::hilbert::{DynamicsGenerator, OneParticleSpace};
use crate::linalg::{inner, CMatrix, CVector, HermitianEigen, C64, ONE};
use crate::quasifree::BasisProjection;

pub const DEFAULT_MAX_MODES: usize = 14;

/// Dense operator on a Fock space.
pub type FockOperator = CMatrix;

#[derive(Debug, Clone)]
pub struct FockSpace {
    modes: usize,
    /// Orthonormal basis of `range(P)` as columns.
    mode_basis: CMatrix,
    mode_energies: Option<Vec<f64>>,
    projection: CMatrix,
    space: OneParticleSpace,
}

/// Jordan-Wigner sign for acting on mode `j` of bitstring `b`.
#[inline]
fn jw_sign(b: usize, j: usize) -> f64 {
    if (b & ((1usize << j) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn phase_normalize(v: &mut CVector, tol: f64) {
    if let Some(lead) = v.iter().copied().find(|z| z.norm() > tol) {
        let phase = lead / lead.norm();
        *v /= phase;
    }
}

impl FockSpace {
    /// Fock space with the default mode cap. When `gen` is supplied, the
    /// mode basis diagonalizes `h` on `range(P)`, sorted by ascending energy.
    pub fn build(
        space: &OneParticleSpace,
        p: &BasisProjection,
        gen: Option<&DynamicsGenerator>,
    ) -> Result<Self> {
        Self::build_with_cap(space, p, gen, DEFAULT_MAX_MODES)
    }

    pub fn build_with_cap(
        space: &OneParticleSpace,
        p: &BasisProjection,
        gen: Option<&DynamicsGenerator>,
        cap: usize,
    ) -> Result<Self> {
        let d = space.dim();
        if p.matrix().nrows() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.matrix().nrows() });
        }
        let rank = p.rank();
        if (rank - (d / 2) as f64).abs() > space.tol() {
            return Err(Error::RankMismatch { rank, dim: d });
        }
        let m = d / 2;
        if m > cap {
            return Err(Error::TooManyModes { modes: m, cap });
        }
        let eig = HermitianEigen::new(p.matrix());
        // Ascending order puts the eigenvalue-one block last.
        let mut basis = eig.vectors.columns(d - m, m).into_owned();
        let mut energies = None;
        if let Some(gen) = gen {
            if gen.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: gen.dim() });
            }
            let leak = (CMatrix::identity(d, d) - p.matrix()) * gen.matrix() * &basis;
            let r = leak.norm();
            if r > space.tol() * gen.matrix().norm().max(1.0) {
                return Err(Error::NotInvariant(r));
            }
            let restricted = basis.adjoint() * gen.matrix() * &basis;
            let reig = HermitianEigen::new(&restricted);
            basis = &basis * &reig.vectors;
            energies = Some(reig.values.clone());
        }
        for j in 0..m {
            let mut col = basis.column(j).into_owned();
            phase_normalize(&mut col, space.tol());
            basis.set_column(j, &col);
        }
        Ok(Self {
            modes: m,
            mode_basis: basis,
            mode_energies: energies,
            projection: p.matrix().clone(),
            space: space.clone(),
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        1usize << self.modes
    }

    pub fn mode_basis(&self) -> &CMatrix {
        &self.mode_basis
    }

    pub fn mode_vector(&self, j: usize) -> CVector {
        self.mode_basis.column(j).into_owned()
    }

    pub fn mode_energies(&self) -> Option<&[f64]> {
        self.mode_energies.as_deref()
    }

    pub fn projection(&self) -> &CMatrix {
        &self.projection
    }

    /// `(orthonormality, range)` residuals of the mode basis.
    pub fn basis_residuals(&self) -> (f64, f64) {
        let d = self.space.dim();
        let gram = self.mode_basis.adjoint() * &self.mode_basis;
        let ortho = (gram - CMatrix::identity(self.modes, self.modes)).norm();
        let range = ((CMatrix::identity(d, d) - &self.projection) * &self.mode_basis).norm();
        (ortho, range)
    }

    pub fn vacuum(&self) -> CVector {
        let mut v = CVector::zeros(self.dim());
        v[0] = ONE;
        v
    }

    fn check_mode(&self, j: usize) -> Result<()> {
        if j >= self.modes {
            return Err(Error::ModeOutOfRange { index: j, modes: self.modes });
        }
        Ok(())
    }

    pub fn creation(&self, j: usize) -> Result<FockOperator> {
        self.check_mode(j)?;
        let n = self.dim();
        let mut a = CMatrix::zeros(n, n);
        for b in 0..n {
            if b & (1 << j) == 0 {
                a[(b | (1 << j), b)] = C64::from(jw_sign(b, j));
            }
        }
        Ok(a)
    }

    pub fn annihilation(&self, j: usize) -> Result<FockOperator> {
        Ok(self.creation(j)?.adjoint())
    }

    /// `π(B(f)) = Σ_j ⟨e_j, Pf⟩ a*_j + Σ_j conj⟨e_j, PΓf⟩ a_j`.
    pub fn represent_field(&self, f: &CVector) -> Result<FockOperator> {
        let pf = &self.projection * f;
        let pgf = &self.projection * self.space.gamma(f)?;
        let up: Vec<C64> = (0..self.modes).map(|j| inner(&self.mode_vector(j), &pf)).collect();
        let down: Vec<C64> = (0..self.modes).map(|j| inner(&self.mode_vector(j), &pgf).conj()).collect();
        let n = self.dim();
        let mut op = CMatrix::zeros(n, n);
        for b in 0..n {
            for j in 0..self.modes {
                let sign = jw_sign(b, j);
                if b & (1 << j) == 0 {
                    op[(b | (1 << j), b)] += up[j] * sign;
                } else {
                    op[(b & !(1 << j), b)] += down[j] * sign;
                }
            }
        }
        Ok(op)
    }

    /// `H = Σ_{jk} ⟨e_j, h e_k⟩ a*_j a_k`.
    pub fn second_quantize(&self, gen: &DynamicsGenerator) -> Result<FockOperator> {
        let d = self.space.dim();
        if gen.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: gen.dim() });
        }
        let leak = ((CMatrix::identity(d, d) - &self.projection) * gen.matrix() * &self.mode_basis).norm();
        if leak > self.space.tol() * gen.matrix().norm().max(1.0) {
            return Err(Error::NotInvariant(leak));
        }
        let hm = self.mode_basis.adjoint() * gen.matrix() * &self.mode_basis;
        let n = self.dim();
        let mut op = CMatrix::zeros(n, n);
        for b in 0..n {
            for k in 0..self.modes {
                if b & (1 << k) == 0 {
                    continue;
                }
                let s1 = jw_sign(b, k);
                let mid = b & !(1 << k);
                for j in 0..self.modes {
                    if mid & (1 << j) != 0 {
                        continue;
                    }
                    let s2 = jw_sign(mid, j);
                    let target = mid | (1 << j);
                    op[(target, b)] += hm[(j, k)] * (s1 * s2);
                }
            }
        }
        Ok(op)
    }

    /// `⟨Ω, A_1 ⋯ A_n Ω⟩`.
    pub fn vacuum_expectation(&self, ops: &[FockOperator]) -> C64 {
        let mut v = self.vacuum();
        for op in ops.iter().rev() {
            v = op * v;
        }
        v[0]
    }
}

/// `e^{-βH} / Tr e^{-βH}` computed in the eigenbasis of `H`.
pub fn gibbs_density(h: &FockOperator, beta: f64) -> Result<FockOperator> {
    if !(beta > 0.0) {
        return Err(Error::BetaNonPositive(beta));
    }
    let eig = HermitianEigen::checked(h, 1e-9 * h.norm().max(1.0))?;
    let e0 = eig.min();
    let z: f64 = eig.values.iter().map(|e| (-beta * (e - e0)).exp()).sum();
    Ok(eig.map(|e| (-beta * (e - e0)).exp() / z))
}

/// `ln(e^{-βH} / Tr e^{-βH})` from the spectrum of `H`, accurate even where
/// the Gibbs weights underflow.
pub fn log_gibbs_density(h: &FockOperator, beta: f64) -> Result<FockOperator> {
    if !(beta > 0.0) {
        return Err(Error::BetaNonPositive(beta));
    }
    let eig = HermitianEigen::checked(h, 1e-9 * h.norm().max(1.0))?;
    let e0 = eig.min();
    let ln_z = eig.values.iter().map(|e| (-beta * (e - e0)).exp()).sum::<f64>().ln();
    Ok(eig.map(|e| -beta * (e - e0) - ln_z))
}

/// `Tr(ρ A)`.
pub fn thermal_expectation(rho: &FockOperator, a: &FockOperator) -> C64 {
    (rho * a).trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{anticommutator, c, from_rows, hermitian_residual, identity_residual, real_diag};
    use crate::quasifree::{
        basis_projection_from_pairing, ground_projection, kms_polarization, n_point, two_point,
        BasisPolarization,
    };
    use crate::random::{random_gamma_odd_hamiltonian, random_space, random_vector, rng_for};

    fn pair_space(eps: &[f64]) -> (OneParticleSpace, DynamicsGenerator) {
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
    fn build_examples() {
        let space = OneParticleSpace::conjugation(2).unwrap();
        let p = basis_projection_from_pairing(&space);
        let fock = FockSpace::build(&space, &p, None).unwrap();
        assert_eq!((fock.modes(), fock.dim()), (1, 2));

        let space = OneParticleSpace::conjugation(4).unwrap();
        let p = basis_projection_from_pairing(&space);
        let fock = FockSpace::build(&space, &p, None).unwrap();
        assert_eq!(fock.dim(), 4);
        let (o, r) = fock.basis_residuals();
        assert!(o < 1e-12 && r < 1e-12);
    }

    #[test]
    fn build_rejects_wrong_rank_and_cap() {
        let space = OneParticleSpace::conjugation(2).unwrap();
        let p = basis_projection_from_pairing(&space);
        assert!(matches!(
            FockSpace::build_with_cap(&space, &p, None, 0),
            Err(Error::TooManyModes { modes: 1, cap: 0 })
        ));
    }

    #[test]
    fn single_mode_creation() {
        let space = OneParticleSpace::conjugation(2).unwrap();
        let fock = FockSpace::build(&space, &basis_projection_from_pairing(&space), None).unwrap();
        let expect = from_rows(&[&[(0., 0.), (0., 0.)], &[(1., 0.), (0., 0.)]]);
        assert_eq!(fock.creation(0).unwrap(), expect);
        assert!(matches!(fock.creation(1), Err(Error::ModeOutOfRange { index: 1, modes: 1 })));
    }

    #[test]
    fn car_relations_exact() {
        let space = OneParticleSpace::conjugation(6).unwrap();
        let fock = FockSpace::build(&space, &basis_projection_from_pairing(&space), None).unwrap();
        let n = fock.dim();
        for j in 0..3 {
            let aj = fock.annihilation(j).unwrap();
            assert_eq!((&aj * fock.vacuum()).norm(), 0.0);
            for k in 0..3 {
                let ak = fock.annihilation(k).unwrap();
                let akd = fock.creation(k).unwrap();
                let expect = if j == k { CMatrix::identity(n, n) } else { CMatrix::zeros(n, n) };
                assert_eq!(anticommutator(&aj, &akd), expect);
                assert_eq!(anticommutator(&aj, &ak), CMatrix::zeros(n, n));
            }
        }
    }

    #[test]
    fn represent_field_examples() {
        let space = OneParticleSpace::conjugation(2).unwrap();
        let p = crate::quasifree::BasisProjection::new(
            &space,
            from_rows(&[&[(0.5, 0.), (0., -0.5)], &[(0., 0.5), (0.5, 0.)]]),
        )
        .unwrap();
        let fock = FockSpace::build(&space, &p, None).unwrap();
        let f = CVector::from_vec(vec![c(2f64.sqrt(), 0.), c(0., 0.)]);
        let field = fock.represent_field(&f).unwrap();
        assert!(identity_residual(&(&field * &field)) < 1e-14);

        // Pf = PΓf = e_1 gives a + a*.
        let (space, gen) = pair_space(&[1.0]);
        let p = ground_projection(&space, &gen).unwrap();
        let fock = FockSpace::build(&space, &p, Some(&gen)).unwrap();
        let f = CVector::from_vec(vec![c(1., 0.), c(-1., 0.)]);
        let field = fock.represent_field(&f).unwrap();
        let sx = from_rows(&[&[(0., 0.), (1., 0.)], &[(1., 0.), (0., 0.)]]);
        assert!((field - sx).norm() < 1e-15);
    }

    #[test]
    fn field_representation_is_linear_star_and_car() {
        let mut rng = rng_for(21, 0);
        for _ in 0..5 {
            let space = random_space(&mut rng, 6);
            let gen = random_gamma_odd_hamiltonian(&mut rng, &space, 0.01);
            let p = ground_projection(&space, &gen).unwrap();
            let fock = FockSpace::build(&space, &p, Some(&gen)).unwrap();
            let f = random_vector(&mut rng, 6);
            let g = random_vector(&mut rng, 6);
            let a = crate::random::gaussian(&mut rng);
            let lhs = fock.represent_field(&(&f * a + &g)).unwrap();
            let rhs = fock.represent_field(&f).unwrap() * a + fock.represent_field(&g).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);

            let gf = space.gamma(&f).unwrap();
            let star = fock.represent_field(&gf).unwrap() - fock.represent_field(&f).unwrap().adjoint();
            assert!(star.norm() < 1e-12);

            let anti = anticommutator(&fock.represent_field(&gf).unwrap(), &fock.represent_field(&g).unwrap());
            let expect = CMatrix::identity(fock.dim(), fock.dim()) * inner(&f, &g);
            assert!((anti - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn second_quantize_examples() {
        let (space, gen) = pair_space(&[0.7]);
        let p = ground_projection(&space, &gen).unwrap();
        let fock = FockSpace::build(&space, &p, Some(&gen)).unwrap();
        let h = fock.second_quantize(&gen).unwrap();
        assert!((h - real_diag(&[0.0, 0.7])).norm() < 1e-14);

        let (space, gen) = pair_space(&[0.4, 1.5]);
        let p = ground_projection(&space, &gen).unwrap();
        let fock = FockSpace::build(&space, &p, Some(&gen)).unwrap();
        let h = fock.second_quantize(&gen).unwrap();
        let mut levels = HermitianEigen::new(&h).values;
        levels.sort_by(f64::total_cmp);
        for (x, y) in levels.iter().zip([0.0, 0.4, 1.5, 1.9]) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn second_quantized_ground_state() {
        let mut rng = rng_for(22, 0);
        let space = random_space(&mut rng, 8);
        let gen = random_gamma_odd_hamiltonian(&mut rng, &space, 0.01);
        let p = ground_projection(&space, &gen).unwrap();
        let fock = FockSpace::build(&space, &p, Some(&gen)).unwrap();
        let h = fock.second_quantize(&gen).unwrap();
        assert!(hermitian_residual(&h) < 1e-12);
        assert!((&h * fock.vacuum()).norm() < 1e-12);
        assert!(HermitianEigen::new(&h).min() > -1e-12);
        let energies = fock.mode_energies().unwrap();
        assert!(energies.windows(2).all(|w| w[0] <= w[1]));
        assert!(energies.iter().all(|&e| e > 0.0));
    }

    #[test]
    fn second_quantize_rejects_non_invariant_range() {
        let space = OneParticleSpace::conjugation(4).unwrap();
        let p = basis_projection_from_pairing(&space);
        let fock = FockSpace::build(&space, &p, None).unwrap();
        let mut odd = CMatrix::zeros(4, 4);
        odd[(0, 2)] = c(0., 1.);
        odd[(2, 0)] = c(0., -1.);
        let gen = DynamicsGenerator::gamma_odd(&space, odd).unwrap();
        // h maps (1, -i, 0, 0) to -i e_3, which leaves range(P).
        assert!(matches!(fock.second_quantize(&gen), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn gibbs_examples() {
        let eps = 0.9;
        let beta = 1.4;
        let h = real_diag(&[0.0, eps]);
        let rho = gibbs_density(&h, beta).unwrap();
        let z = 1.0 + (-beta * eps).exp();
        assert!((rho - real_diag(&[1.0 / z, (-beta * eps).exp() / z])).norm() < 1e-15);

        let h = real_diag(&[0.0, 0.3, 1.1, 1.4]);
        let rho = gibbs_density(&h, 1e-6).unwrap();
        assert!((rho - CMatrix::identity(4, 4).scale(0.25)).norm() < 1e-5);
        assert!((gibbs_density(&h, 3.0).unwrap().trace() - ONE).norm() < 1e-15);
        assert!(matches!(gibbs_density(&h, -1.0), Err(Error::BetaNonPositive(_))));
    }

    #[test]
    fn gibbs_commutes_with_hamiltonian() {
        let mut rng = rng_for(23, 0);
        let space = random_space(&mut rng, 6);
        let gen = random_gamma_odd_hamiltonian(&mut rng, &space, 0.01);
        let p = ground_projection(&space, &gen).unwrap();
        let fock = FockSpace::build(&space, &p, Some(&gen)).unwrap();
        let h = fock.second_quantize(&gen).unwrap();
        let rho = gibbs_density(&h, 2.0).unwrap();
        assert!((&rho * &h - &h * &rho).norm() < 1e-12);
        assert!(HermitianEigen::new(&rho).min() > 0.0);
    }

    #[test]
    fn vacuum_matches_quasifree_n_point() {
        let mut rng = rng_for(24, 0);
        for k in 1..=3 {
            let space = random_space(&mut rng, 6);
            let gen = random_gamma_odd_hamiltonian(&mut rng, &space, 0.01);
            let p = ground_projection(&space, &gen).unwrap();
            let fock = FockSpace::build(&space, &p, Some(&gen)).unwrap();
            let fields: Vec<CVector> = (0..2 * k).map(|_| random_vector(&mut rng, 6)).collect();
            let ops: Vec<_> = fields.iter().map(|f| fock.represent_field(f).unwrap()).collect();
            let brute = fock.vacuum_expectation(&ops);
            let wick = n_point(p.polarization(), &fields).unwrap();
            assert!((brute - wick).norm() < 1e-10, "k={k}: {brute} vs {wick}");
        }
    }

    #[test]
    fn thermal_two_point_is_kms_polarization() {
        let mut rng = rng_for(25, 0);
        let space = random_space(&mut rng, 8);
        let gen = random_gamma_odd_hamiltonian(&mut rng, &space, 0.01);
        let beta = 0.8;
        let p = ground_projection(&space, &gen).unwrap();
        let fock = FockSpace::build(&space, &p, Some(&gen)).unwrap();
        let rho = gibbs_density(&fock.second_quantize(&gen).unwrap(), beta).unwrap();
        let s: BasisPolarization = kms_polarization(&space, &gen, beta).unwrap();
        for _ in 0..5 {
            let f = random_vector(&mut rng, 8);
            let g = random_vector(&mut rng, 8);
            let bf_star = fock.represent_field(&f).unwrap().adjoint();
            let bg = fock.represent_field(&g).unwrap();
            let lhs = thermal_expectation(&rho, &(bf_star * bg));
            assert!((lhs - two_point(&s, &f, &g).unwrap()).norm() < 1e-9);
        }
    }
}
