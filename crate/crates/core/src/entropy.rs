//! Relative entropy of unitary fermionic excitations of a KMS state.
//!
//! Every route shares one clock: the modular flow of the KMS state at
//! inverse temperature `β` acts on one-particle vectors as `f ↦ e^{-iβth} f`.
//!
//! * Araki: `S(ω_F‖ω) = i d/dt|₀ (f, S f_t) = β (f, S h f)`, evaluated
//!   analytically and by Richardson-extrapolated central differences.
//! * von Neumann: `Tr ρ (ln ρ - ln FρF)` and `β Tr ρ F [H, F]` on the Fock
//!   space of the ground projection of `h`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{gibbs_density, log_gibbs_density, FockOperator, FockSpace};
use crate::hilbert::{DynamicsGenerator, FieldVector, OneParticleSpace};
use crate::linalg::{commutator, inner, CMatrix, CVector, C64, I};
use crate::modular::{vn_relative_entropy, DensityMatrix};
use crate::quasifree::{ground_projection, kms_polarization, pairing_sum, pairing_sum_with_derivative, BasisPolarization};
use crate::random::random_field;
use crate::serde_ext::extended_f64;

pub const DEFAULT_FD_STEP: f64 = 1e-4;
pub const DEFAULT_TOL_ACCEPT: f64 = 1e-8;
/// Largest imaginary part, relative to `1 + |re|`, tolerated on a value
/// that is real in exact arithmetic.
pub const IMAG_TOL: f64 = 1e-9;
/// Excitation count above which the `(2N-1)!!` pairing sum is refused.
pub const MAX_EXCITATIONS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteOptions {
    /// Base step of the central difference, in units of flow time.
    pub fd_step: f64,
    /// Acceptance tolerance for pairwise route discrepancies.
    pub tol_accept: f64,
}

impl Default for RouteOptions {
    fn default() -> Self {
        Self { fd_step: DEFAULT_FD_STEP, tol_accept: DEFAULT_TOL_ACCEPT }
    }
}

fn real_part(z: C64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL * (1.0 + z.re.abs()) {
        return Err(Error::ComplexResidue(z.im));
    }
    Ok(z.re)
}

/// Central difference at `step`, `step/2` and `step/4`, two Richardson levels.
pub fn richardson_derivative(g: impl Fn(f64) -> C64, step: f64) -> C64 {
    let central = |h: f64| (g(h) - g(-h)) / (2.0 * h);
    let d1 = central(step);
    let d2 = central(step / 2.0);
    let d4 = central(step / 4.0);
    let r1 = (d2 * 4.0 - d1) / 3.0;
    let r2 = (d4 * 4.0 - d2) / 3.0;
    (r2 * 16.0 - r1) / 15.0
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::BetaNonPositive(beta));
    }
    Ok(())
}

fn check_setting(space: &OneParticleSpace, s: &BasisPolarization, gen: &DynamicsGenerator, beta: f64) -> Result<()> {
    check_beta(beta)?;
    let d = space.dim();
    for got in [s.space().dim(), gen.dim()] {
        if got != d {
            return Err(Error::DimensionMismatch { expected: d, got });
        }
    }
    let r = s.flow_residual(gen);
    if r > space.tol() * (1.0 + gen.matrix().norm()) {
        return Err(Error::FlowIncompatible(r));
    }
    Ok(())
}

/// Analytic and finite-difference values of the Araki formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArakiValues {
    pub analytic: f64,
    pub finite_difference: f64,
}

/// `β (f, S h f)` and the numerical derivative of `t ↦ i (f, S e^{-iβth} f)`.
pub fn araki_unitary_excitation(
    space: &OneParticleSpace,
    s: &BasisPolarization,
    gen: &DynamicsGenerator,
    beta: f64,
    f: &FieldVector,
    opts: &RouteOptions,
) -> Result<ArakiValues> {
    f.require_unitary(space)?;
    check_setting(space, s, gen, beta)?;
    let (analytic, finite_difference) = flow_derivative(s, gen, beta, f.vector(), opts.fd_step)?;
    Ok(ArakiValues { analytic, finite_difference })
}

fn flow_derivative(
    s: &BasisPolarization,
    gen: &DynamicsGenerator,
    beta: f64,
    f: &CVector,
    step: f64,
) -> Result<(f64, f64)> {
    let sf = s.matrix() * f;
    let analytic = real_part(inner(&sf, &(gen.matrix() * f)) * beta)?;
    // (f, S e^{-iβth} f) = Σ_k conj((V*Sf)_k) e^{-iβtλ_k} (V*f)_k
    let eig = gen.eigen();
    let left = eig.vectors.adjoint() * &sf;
    let right = eig.vectors.adjoint() * f;
    let g = |t: f64| {
        let mut acc = C64::from(0.0);
        for (k, &e) in eig.values.iter().enumerate() {
            acc += left[k].conj() * C64::from_polar(1.0, -beta * t * e) * right[k];
        }
        acc * I
    };
    let fd = real_part(richardson_derivative(g, step))?;
    Ok((analytic, fd))
}

/// Thermal data on the Fock space of the ground projection of `h`.
pub struct ThermalFock {
    pub fock: FockSpace,
    pub hamiltonian: FockOperator,
    pub rho: FockOperator,
    pub beta: f64,
}

impl ThermalFock {
    pub fn new(space: &OneParticleSpace, gen: &DynamicsGenerator, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let p = ground_projection(space, gen)?;
        let fock = FockSpace::build(space, &p, Some(gen))?;
        let hamiltonian = fock.second_quantize(gen)?;
        let rho = gibbs_density(&hamiltonian, beta)?;
        Ok(Self { fock, hamiltonian, rho, beta })
    }

    /// `S(ρ ‖ U ρ U*) = Tr ρ (ln ρ - ln σ)` for a unitary `U`.
    ///
    /// `σ` is the Gibbs state of `U H U*`; each logarithm is taken from the
    /// spectrum of its own Hamiltonian, since eigenvalues of `σ` itself are
    /// lost to roundoff once the Gibbs weights span more than ~1e-16.
    pub fn excited_entropy(&self, u: &FockOperator) -> Result<f64> {
        let excited = u * &self.hamiltonian * u.adjoint();
        let excited = (&excited + excited.adjoint()).scale(0.5);
        let ln_rho = log_gibbs_density(&self.hamiltonian, self.beta)?;
        let ln_sigma = log_gibbs_density(&excited, self.beta)?;
        real_part((&self.rho * (ln_rho - ln_sigma)).trace())
    }

    /// `S(ρ ‖ U ρ U*)` from the density matrices alone.
    pub fn excited_entropy_dense(&self, u: &FockOperator) -> Result<f64> {
        let rho = DensityMatrix::new(self.rho.clone(), 1e-9)?;
        let sigma = DensityMatrix::new(u * &self.rho * u.adjoint(), 1e-9)?;
        Ok(vn_relative_entropy(&rho, &sigma))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VnValues {
    #[serde(with = "extended_f64")]
    pub direct: f64,
    pub commutator: f64,
}

/// `Tr ρ (ln ρ - ln FρF)` and `β Tr ρ F [H, F]` with `F = π(B(f))`.
pub fn vn_route(space: &OneParticleSpace, gen: &DynamicsGenerator, beta: f64, f: &FieldVector) -> Result<VnValues> {
    f.require_unitary(space)?;
    let thermal = ThermalFock::new(space, gen, beta)?;
    let field = thermal.fock.represent_field(f.vector())?;
    let direct = thermal.excited_entropy(&field)?;
    let c = (&thermal.rho * &field * commutator(&thermal.hamiltonian, &field)).trace() * beta;
    Ok(VnValues { direct, commutator: real_part(c)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// All four routes for one excitation, with the acceptance verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub araki_analytic: f64,
    pub araki_fd: f64,
    #[serde(with = "extended_f64")]
    pub vn_direct: f64,
    pub vn_commutator: f64,
    #[serde(with = "extended_f64")]
    pub max_pairwise_discrepancy: f64,
    pub tol_accept: f64,
    pub verdict: Verdict,
}

impl EntropyReport {
    pub fn from_values(araki: ArakiValues, vn: VnValues, tol_accept: f64) -> Self {
        let values = [araki.analytic, araki.finite_difference, vn.direct, vn.commutator];
        let mut max = 0.0f64;
        for (i, a) in values.iter().enumerate() {
            for b in &values[i + 1..] {
                let d = (a - b).abs();
                max = if d.is_nan() { f64::INFINITY } else { max.max(d) };
            }
        }
        let verdict = if max <= tol_accept * (1.0 + araki.analytic.abs()) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            araki_analytic: araki.analytic,
            araki_fd: araki.finite_difference,
            vn_direct: vn.direct,
            vn_commutator: vn.commutator,
            max_pairwise_discrepancy: max,
            tol_accept,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn values(&self) -> [f64; 4] {
        [self.araki_analytic, self.araki_fd, self.vn_direct, self.vn_commutator]
    }
}

/// Araki routes against the KMS polarization of `(h, β)` plus both vN routes.
pub fn full_report(
    space: &OneParticleSpace,
    gen: &DynamicsGenerator,
    beta: f64,
    f: &FieldVector,
    opts: &RouteOptions,
) -> Result<EntropyReport> {
    let s = kms_polarization(space, gen, beta)?;
    let araki = araki_unitary_excitation(space, &s, gen, beta, f, opts)?;
    let vn = vn_route(space, gen, beta, f)?;
    Ok(EntropyReport::from_values(araki, vn, opts.tol_accept))
}

/// Some pair of excitations violates `(f_i, S f_j) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonOrthogonalWarning {
    pub max_overlap: f64,
    pub pair: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiExcitation {
    pub analytic: f64,
    pub finite_difference: f64,
    /// Single-excitation values `β (f_i, S h f_i)`.
    pub singles: Vec<f64>,
    pub warning: Option<NonOrthogonalWarning>,
}

impl MultiExcitation {
    pub fn singles_sum(&self) -> f64 {
        self.singles.iter().sum()
    }
}

/// Entropy of `F = B(f_N) ⋯ B(f_1)`: the flow derivative of the `2N`-point
/// function `ω(B(f_1) ⋯ B(f_N) B(f_N,t) ⋯ B(f_1,t))`.
pub fn multi_excitation_entropy(
    space: &OneParticleSpace,
    s: &BasisPolarization,
    gen: &DynamicsGenerator,
    beta: f64,
    fields: &[FieldVector],
    opts: &RouteOptions,
) -> Result<MultiExcitation> {
    let n = fields.len();
    if n == 0 || n > MAX_EXCITATIONS {
        return Err(Error::InvalidParameter(format!(
            "excitation count {n} outside 1..={MAX_EXCITATIONS}"
        )));
    }
    for f in fields {
        f.require_unitary(space)?;
    }
    check_setting(space, s, gen, beta)?;

    let mut singles = Vec::with_capacity(n);
    for f in fields {
        singles.push(flow_derivative(s, gen, beta, f.vector(), opts.fd_step)?.0);
    }

    let mut warning: Option<NonOrthogonalWarning> = None;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let o = inner(fields[i].vector(), &(s.matrix() * fields[j].vector())).norm();
            if o > space.tol() && warning.is_none_or(|w| o > w.max_overlap) {
                warning = Some(NonOrthogonalWarning { max_overlap: o, pair: (i, j) });
            }
        }
    }

    let xs: Vec<&CVector> = fields.iter().map(|f| f.vector()).chain(fields.iter().rev().map(|f| f.vector())).collect();
    let gx: Vec<CVector> = xs.iter().map(|x| space.gamma(x)).collect::<Result<_>>()?;
    let sx: Vec<CVector> = xs.iter().map(|x| s.matrix() * *x).collect();
    let shx: Vec<CVector> = xs.iter().map(|x| s.matrix() * (gen.matrix() * *x)).collect();
    let primed = |k: usize| k >= n;

    let (_, deriv) = pairing_sum_with_derivative(2 * n, |i, j| {
        let value = inner(&gx[i], &sx[j]);
        let d = if !primed(i) && primed(j) {
            -I * beta * inner(&gx[i], &shx[j])
        } else {
            C64::from(0.0)
        };
        (value, d)
    });
    let analytic = real_part(I * deriv)?;

    let g = |t: f64| {
        let u = gen.evolution(beta * t);
        let moved: Vec<CVector> = xs.iter().enumerate().map(|(k, x)| if primed(k) { &u * *x } else { (*x).clone() }).collect();
        let gm: Vec<CVector> = moved.iter().map(|x| space.gamma(x).expect("length checked")).collect();
        let sm: Vec<CVector> = moved.iter().map(|x| s.matrix() * x).collect();
        I * pairing_sum(2 * n, |i, j| inner(&gm[i], &sm[j]))
    };
    let finite_difference = real_part(richardson_derivative(g, opts.fd_step))?;

    Ok(MultiExcitation { analytic, finite_difference, singles, warning })
}

/// Completes `first` to `count` unitary fields that are pairwise
/// S-orthogonal, `(f_i, S f_j) = 0` for `i ≠ j`.
///
/// For Γ-invariant `g`, `(f, S g) = 0` is equivalent to `g` being orthogonal
/// in the real inner product `Re(·,·)` to both `f` and `i(2S - 1)f / 2`.
pub fn s_orthogonal_fields(
    rng: &mut impl Rng,
    space: &OneParticleSpace,
    s: &BasisPolarization,
    first: &FieldVector,
    count: usize,
) -> Result<Vec<FieldVector>> {
    first.require_unitary(space)?;
    if count == 0 || 2 * (count - 1) >= space.dim() {
        return Err(Error::InvalidParameter(format!(
            "cannot fit {count} S-orthogonal fields in dimension {}",
            space.dim()
        )));
    }
    let d = space.dim();
    let two_s_minus_one = s.matrix() * C64::from(2.0) - CMatrix::identity(d, d);
    let mut constraints: Vec<CVector> = Vec::new();
    let add_constraints = |g: &CVector, constraints: &mut Vec<CVector>| {
        let w = &two_s_minus_one * g * (I * 0.5);
        for v in [g.clone(), w] {
            if let Some(u) = real_orthonormalize(&v, constraints) {
                constraints.push(u);
            }
        }
    };
    add_constraints(first.vector(), &mut constraints);
    let mut out = vec![first.clone()];
    while out.len() < count {
        let seed = random_field(rng, space).into_vector();
        let Some(u) = real_orthonormalize(&seed, &constraints) else { continue };
        let g = FieldVector::unitary_excitation(space, u * C64::from(std::f64::consts::SQRT_2))?;
        add_constraints(g.vector(), &mut constraints);
        out.push(g);
    }
    Ok(out)
}

/// Two-pass Gram-Schmidt in `Re(·,·)`; `None` when nothing is left.
fn real_orthonormalize(v: &CVector, basis: &[CVector]) -> Option<CVector> {
    let scale = v.norm();
    let mut u = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, &u).re;
            u -= b * C64::from(c);
        }
    }
    let n = u.norm();
    if n <= 1e-8 * scale.max(1e-300) {
        return None;
    }
    Some(u / C64::from(n))
}

fn kms_consistent(space: &OneParticleSpace, s: &BasisPolarization, gen: &DynamicsGenerator, beta: f64) -> bool {
    match kms_polarization(space, gen, beta) {
        Ok(k) => (k.matrix() - s.matrix()).norm() <= space.tol(),
        Err(_) => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialExcitation {
    /// `sin²(1) · β (f, S h f)`
    pub value: f64,
    pub base: f64,
    /// `S(ρ ‖ UρU*)` with `U = cos(1) + i sin(1) F`; present when `S` is the
    /// KMS polarization of `(h, β)` and `h` has no zero mode.
    pub vn_direct: Option<f64>,
}

impl ExponentialExcitation {
    pub fn ratio(&self) -> f64 {
        self.value / self.base
    }
}

/// Entropy of the unitary `e^{iB(f)} = cos(1) + i sin(1) B(f)`.
pub fn exponential_excitation_entropy(
    space: &OneParticleSpace,
    s: &BasisPolarization,
    gen: &DynamicsGenerator,
    beta: f64,
    f: &FieldVector,
    opts: &RouteOptions,
) -> Result<ExponentialExcitation> {
    let base = araki_unitary_excitation(space, s, gen, beta, f, opts)?.analytic;
    let value = 1f64.sin().powi(2) * base;
    let vn_direct = cross_check(space, s, gen, beta, |thermal| {
        let field = thermal.fock.represent_field(f.vector())?;
        let n = thermal.fock.dim();
        let u = CMatrix::identity(n, n) * C64::from(1f64.cos()) + field * (I * 1f64.sin());
        thermal.excited_entropy(&u)
    })?;
    Ok(ExponentialExcitation { value, base, vn_direct })
}

fn cross_check(
    space: &OneParticleSpace,
    s: &BasisPolarization,
    gen: &DynamicsGenerator,
    beta: f64,
    run: impl FnOnce(&ThermalFock) -> Result<f64>,
) -> Result<Option<f64>> {
    if !kms_consistent(space, s, gen, beta) {
        return Ok(None);
    }
    match ThermalFock::new(space, gen, beta) {
        Ok(thermal) => run(&thermal).map(Some),
        Err(Error::ZeroMode(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardSubspaceExcitation {
    /// `2 · β (f, S h f)` for the `(f,f) = 1` vector.
    pub value: f64,
    /// `β (f, S h f)` for the same vector.
    pub same_f_derivative: f64,
    /// `S(ρ ‖ F̃ρF̃*)` with `F̃ = (1+i) π(B(f))`, reported without assertion.
    pub vn_direct: Option<f64>,
}

impl StandardSubspaceExcitation {
    pub fn factor(&self) -> f64 {
        self.value / self.same_f_derivative
    }
}

/// Entropy of the excitation `B(g)`, `g = f + if = (1+i) f`, with `Γf = f`
/// and `(f,f) = 1`.
pub fn standard_subspace_excitation_entropy(
    space: &OneParticleSpace,
    s: &BasisPolarization,
    gen: &DynamicsGenerator,
    beta: f64,
    f: &FieldVector,
    opts: &RouteOptions,
) -> Result<StandardSubspaceExcitation> {
    space.check_len(f.vector())?;
    if !f.is_gamma_invariant() {
        return Err(Error::NotGammaInvariant(space.gamma_residual(f.vector())?));
    }
    if (f.norm_sq() - 1.0).abs() > space.tol() {
        return Err(Error::WrongNormalization(f.norm_sq()));
    }
    check_setting(space, s, gen, beta)?;
    let same_f_derivative = flow_derivative(s, gen, beta, f.vector(), opts.fd_step)?.0;
    let vn_direct = cross_check(space, s, gen, beta, |thermal| {
        let field = thermal.fock.represent_field(f.vector())?;
        thermal.excited_entropy(&(field * C64::new(1.0, 1.0)))
    })?;
    Ok(StandardSubspaceExcitation { value: 2.0 * same_f_derivative, same_f_derivative, vn_direct })
}
