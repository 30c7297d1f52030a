//! Seeded fixtures shared by the benchmarks.

use araki_core::random::{gaussian, random_entropy_instance, random_vector, rng_for, EntropyInstance};
use araki_core::{BipartiteVector, CVector, MajoranaConfig};

/// Random entropy problem of one-particle dimension `d`.
pub fn instance(d: usize, seed: u64) -> EntropyInstance {
    random_entropy_instance(&mut rng_for(seed, d as u64), &[d], (0.5, 2.0))
}

/// Majorana problem with Gaussian coefficients on modes `1..=modes`.
pub fn majorana(modes: u32, seed: u64) -> MajoranaConfig {
    let mut rng = rng_for(seed, 0);
    let coeffs = (1..=modes).map(|n| (n, [gaussian(&mut rng), gaussian(&mut rng)])).collect();
    MajoranaConfig { a: 2.0, m: 1.0, beta: 1.0, n_max: 32, coeffs }
}

/// Reference and comparison vectors for the bipartite routes, side length `n`.
pub fn bipartite(n: usize, seed: u64) -> (BipartiteVector, CVector) {
    let mut rng = rng_for(seed, n as u64);
    let psi = araki_core::schmidt(&random_vector(&mut rng, n * n)).expect("generic vectors are cyclic");
    (psi, random_vector(&mut rng, n * n))
}
