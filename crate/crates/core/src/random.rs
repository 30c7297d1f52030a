//! Seeded generators for random problem instances.
//!
//! Every instance is drawn from a ChaCha8 stream selected by
//! `(seed, index)`, so sweeps are reproducible independent of evaluation
//! order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hilbert::{DynamicsGenerator, FieldVector, OneParticleSpace};
use crate::linalg::{c, CMatrix, CVector, C64};

pub type InstanceRng = ChaCha8Rng;

pub fn rng_for(seed: u64, index: u64) -> InstanceRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| gaussian(rng))
}

pub fn random_matrix(rng: &mut impl Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

/// Haar-distributed unitary via QR with the phase of `R`'s diagonal removed.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    let qr = random_matrix(rng, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `K = U Uᵀ` is unitary with `K conj(K) = 1`, the general form of a
/// finite-dimensional antiunitary involution.
pub fn random_involution(rng: &mut impl Rng, d: usize) -> CMatrix {
    let u = random_unitary(rng, d);
    &u * u.transpose()
}

pub fn random_space(rng: &mut impl Rng, d: usize) -> OneParticleSpace {
    OneParticleSpace::new(random_involution(rng, d)).expect("U Uᵀ is a valid involution")
}

/// Gaussian hermitian matrix projected onto `ΓhΓ = -h`, scaled so the
/// spectrum is O(1). Draws are repeated until every eigenvalue magnitude
/// exceeds `min_gap`.
pub fn random_gamma_odd_hamiltonian(
    rng: &mut impl Rng,
    space: &OneParticleSpace,
    min_gap: f64,
) -> DynamicsGenerator {
    let d = space.dim();
    loop {
        let a = random_matrix(rng, d);
        let herm = (&a + a.adjoint()).scale(0.5);
        let odd = (&herm - space.gamma_conjugate(&herm)).scale(0.5 / (d as f64).sqrt());
        let gen = DynamicsGenerator::gamma_odd(space, odd).expect("projected generator is valid");
        if gen.gap() > min_gap.max(space.tol()) {
            return gen;
        }
    }
}

pub fn random_field(rng: &mut impl Rng, space: &OneParticleSpace) -> FieldVector {
    loop {
        let seed = random_vector(rng, space.dim());
        if let Ok(f) = space.make_gamma_invariant(&seed) {
            return f;
        }
    }
}

/// Random instance for the excitation-entropy routes.
#[derive(Debug, Clone)]
pub struct EntropyInstance {
    pub space: OneParticleSpace,
    pub generator: DynamicsGenerator,
    pub beta: f64,
    pub field: FieldVector,
}

/// Gap used when sampling sweep generators. Keeps the ground projection
/// well conditioned.
pub const SWEEP_MIN_GAP: f64 = 1e-3;

pub fn random_entropy_instance(
    rng: &mut impl Rng,
    dims: &[usize],
    beta_range: (f64, f64),
) -> EntropyInstance {
    let d = dims[rng.random_range(0..dims.len())];
    let beta = if beta_range.1 > beta_range.0 {
        rng.random_range(beta_range.0..beta_range.1)
    } else {
        beta_range.0
    };
    let space = random_space(rng, d);
    let generator = random_gamma_odd_hamiltonian(rng, &space, SWEEP_MIN_GAP);
    let field = random_field(rng, &space);
    EntropyInstance { space, generator, beta, field }
}
