//! Seeded invariant suites, summarized as check counts and worst residuals.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::entropy::{full_report, RouteOptions};
use crate::error::{Error, Result};
use crate::fock::{gibbs_density, thermal_expectation, FockSpace};
use crate::hilbert::OneParticleSpace;
use crate::linalg::{anticommutator, identity_residual, CMatrix, CVector, C64};
use crate::majorana::{
    closed_form_entropy, mode_functions_orthonormal, truncated_matrix_entropy, MajoranaConfig, DEFAULT_PANELS,
};
use crate::modular::{
    araki_entropy_bipartite, coefficient_matrix, modular_operator_bipartite, schmidt, vn_relative_entropy,
    DensityMatrix,
};
use crate::quasifree::{
    basis_projection_from_pairing, doubling, ground_projection, kms_polarization, n_point, pair_kernel,
    validate_polarization, BasisPolarization,
};
use crate::random::{
    gaussian, random_entropy_instance, random_gamma_odd_hamiltonian, random_space, random_vector,
    rng_for,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Structural,
    Quasifree,
    Modular,
    Entropy,
    Majorana,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Structural, Suite::Quasifree, Suite::Modular, Suite::Entropy, Suite::Majorana];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Structural => "structural",
            Suite::Quasifree => "quasifree",
            Suite::Modular => "modular",
            Suite::Entropy => "entropy",
            Suite::Majorana => "majorana",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub checks: usize,
    pub failures: usize,
    /// Largest residual divided by its tolerance; `≤ 1` means every check passed.
    pub worst_ratio: f64,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tally {
    summary: SuiteSummary,
}

impl Tally {
    fn new(suite: Suite) -> Self {
        Self { summary: SuiteSummary { suite: suite.name().into(), checks: 0, failures: 0, worst_ratio: 0.0 } }
    }

    fn record(&mut self, residual: f64, tol: f64) {
        self.summary.checks += 1;
        let ratio = if residual.is_nan() { f64::INFINITY } else { residual / tol };
        if !(ratio <= 1.0) {
            self.summary.failures += 1;
        }
        self.summary.worst_ratio = self.summary.worst_ratio.max(ratio);
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<SuiteSummary>> {
    match suite {
        Suite::All => Suite::EACH.iter().map(|&s| run_single(s, seed)).collect(),
        s => Ok(vec![run_single(s, seed)?]),
    }
}

fn run_single(suite: Suite, seed: u64) -> Result<SuiteSummary> {
    let mut t = Tally::new(suite);
    match suite {
        Suite::Structural => structural(&mut t, seed)?,
        Suite::Quasifree => quasifree(&mut t, seed)?,
        Suite::Modular => modular(&mut t, seed)?,
        Suite::Entropy => entropy(&mut t, seed)?,
        Suite::Majorana => majorana(&mut t, seed)?,
        Suite::All => unreachable!("expanded by run_suite"),
    }
    Ok(t.summary)
}

/// CAR relations of the mode operators and of the field map, for 1 to 6 modes.
fn structural(t: &mut Tally, seed: u64) -> Result<()> {
    for m in 1..=6usize {
        let mut rng = rng_for(seed, m as u64);
        let space = random_space(&mut rng, 2 * m);
        t.record(identity_residual(&(space.involution() * space.involution().conjugate())), 1e-12);
        let p = basis_projection_from_pairing(&space);
        let fock = FockSpace::build(&space, &p, None)?;
        let n = fock.dim();
        let id = CMatrix::identity(n, n);
        let zero = CMatrix::zeros(n, n);
        for i in 0..m {
            let ai = fock.annihilation(i)?;
            for j in 0..m {
                let aj = fock.annihilation(j)?;
                let expect = if i == j { &id } else { &zero };
                t.record((anticommutator(&ai, &aj.adjoint()) - expect).norm(), 1e-12);
                t.record(anticommutator(&ai, &aj).norm(), 1e-12);
            }
        }
        let f = random_vector(&mut rng, 2 * m);
        let g = random_vector(&mut rng, 2 * m);
        let bf = fock.represent_field(&f)?;
        let bg = fock.represent_field(&g)?;
        let expect = &id * space.inner(&f, &g)?;
        t.record((anticommutator(&bf.adjoint(), &bg) - expect).norm(), 1e-12 * (1.0 + f.norm() * g.norm()));
        t.record((fock.represent_field(&space.gamma(&f)?)? - bf.adjoint()).norm(), 1e-12 * (1.0 + f.norm()));
    }
    Ok(())
}

fn polarization_residuals(t: &mut Tally, space: &OneParticleSpace, s: &CMatrix) {
    let report = validate_polarization(space, s);
    t.record(report.complement, 1e-9);
    t.record(report.hermiticity, 1e-9);
    t.record((-report.spectrum_min).max(report.spectrum_max - 1.0).max(0.0), 1e-9);
}

/// Polarization axioms, doubling, and quasifree n-point functions against
/// brute-force Fock expectations.
fn quasifree(t: &mut Tally, seed: u64) -> Result<()> {
    for d in [2usize, 4, 6, 8] {
        let mut rng = rng_for(seed, 100 + d as u64);
        let space = random_space(&mut rng, d);
        let gen = random_gamma_odd_hamiltonian(&mut rng, &space, 1e-3);
        let beta = 0.5 + d as f64 / 4.0;
        let kms = kms_polarization(&space, &gen, beta)?;
        let ground = ground_projection(&space, &gen)?;
        let pairing = basis_projection_from_pairing(&space);
        for s in [kms.matrix(), ground.matrix(), pairing.matrix()] {
            polarization_residuals(t, &space, s);
        }
        for proj in [&ground, &pairing] {
            t.record(proj.idempotence_residual(), 1e-9);
        }
        let (_, doubled) = doubling(&kms)?;
        t.record(doubled.idempotence_residual(), 1e-9);

        let fock = FockSpace::build(&space, &ground, Some(&gen))?;
        let vacuum_state: &BasisPolarization = &ground;
        for n in [2usize, 4, 6] {
            let fields: Vec<CVector> = (0..n).map(|_| random_vector(&mut rng, d)).collect();
            let ops = fields.iter().map(|f| fock.represent_field(f)).collect::<Result<Vec<_>>>()?;
            let brute = fock.vacuum_expectation(&ops);
            let wick = n_point(vacuum_state, &fields)?;
            t.record((brute - wick).norm(), 1e-9);
        }
        let rho = gibbs_density(&fock.second_quantize(&gen)?, beta)?;
        let f = random_vector(&mut rng, d);
        let g = random_vector(&mut rng, d);
        let brute = thermal_expectation(&rho, &(fock.represent_field(&f)? * fock.represent_field(&g)?));
        t.record((brute - pair_kernel(&kms, &f, &g)?).norm(), 1e-9);
    }
    Ok(())
}

/// Tomita relations and the bipartite Araki/von Neumann identity.
fn modular(t: &mut Tally, seed: u64) -> Result<()> {
    for n in 2..=5usize {
        let mut rng = rng_for(seed, 200 + n as u64);
        let psi = random_vector(&mut rng, n * n);
        let s = schmidt(&psi)?;
        let m = modular_operator_bipartite(&s)?;
        t.record(identity_residual(&m.conjugation.square()), 1e-10);
        let inv = m.delta.clone().try_inverse().ok_or(Error::NotSeparating(0.0))?;
        t.record((m.conjugation.conjugate(&m.delta) - &inv).norm() / inv.norm(), 1e-10);

        let phi = random_vector(&mut rng, n * n);
        let araki = araki_entropy_bipartite(&phi, &s)?;
        let marginal = |v: &CVector| -> Result<DensityMatrix> {
            let c = coefficient_matrix(v)?;
            DensityMatrix::new(&c * c.adjoint() / C64::from(v.norm_squared()), 1e-9)
        };
        let vn = vn_relative_entropy(&marginal(&psi)?, &marginal(&phi)?);
        t.record((araki - vn).abs(), 1e-10 * (1.0 + vn.abs()));
        t.record((-vn).max(0.0), 1e-12);
    }
    Ok(())
}

/// Route agreement and positivity on random instances.
fn entropy(t: &mut Tally, seed: u64) -> Result<()> {
    let opts = RouteOptions::default();
    for i in 0..20 {
        let inst = random_entropy_instance(&mut rng_for(seed, 300 + i), &[2, 4, 6, 8], (0.1, 5.0));
        let r = full_report(&inst.space, &inst.generator, inst.beta, &inst.field, &opts)?;
        t.record(r.max_pairwise_discrepancy, opts.tol_accept * (1.0 + r.araki_analytic.abs()));
        t.record((-r.araki_analytic).max(0.0), 1e-12);
    }
    Ok(())
}

/// Mode orthonormality and closed form against the matrix route.
fn majorana(t: &mut Tally, seed: u64) -> Result<()> {
    let mut rng = rng_for(seed, 400);
    let coeffs = (1..=6u32).map(|n| (n, [gaussian(&mut rng), gaussian(&mut rng)])).collect();
    let config = MajoranaConfig { a: std::f64::consts::PI, m: 1.0, beta: 1.0, n_max: 16, coeffs };
    let ortho = mode_functions_orthonormal(&config, DEFAULT_PANELS)?;
    t.record(ortho.max_residual(), 1e-8);
    let closed = closed_form_entropy(&config)?;
    let matrix = truncated_matrix_entropy(&config, &RouteOptions::default())?;
    t.record((closed.total - matrix.total).abs(), 1e-8 * (1.0 + closed.total));
    t.record(matrix.report.max_pairwise_discrepancy, 1e-8 * (1.0 + matrix.report.araki_analytic.abs()));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        let summaries = run_suite(Suite::All, 42).unwrap();
        assert_eq!(summaries.len(), 5);
        for s in &summaries {
            assert!(s.checks > 0);
            assert!(s.passed(), "{s:?}");
        }
    }

    #[test]
    fn suite_names_parse() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
