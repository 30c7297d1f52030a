//! Majorana field on `[0, a]` with vanishing boundary conditions.
//!
//! Mode `n` has momentum `p = πn/a` and one-particle Hamiltonian
//! `h₂(p) = [[p, im], [-im, -p]]` with eigenvalues `±ε`, `ε = √(p² + m²)`.
//! The excitation `f = Σ_n α_n Ψ_n⁺ - conj(α_n) Ψ_n⁻`, `α_n = a_n⁺ - conj(a_n⁻)`,
//! has entropy `β Σ_n ε_n |α_n|² tanh(βε_n/2)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{full_report, EntropyReport, RouteOptions};
use crate::error::{Error, Result};
use crate::hilbert::{DynamicsGenerator, FieldVector, OneParticleSpace, DEFAULT_TOL};
use crate::linalg::{c, CMatrix, CVector, C64};

pub const DEFAULT_N_MAX: u32 = 32;
pub const DEFAULT_PANELS: usize = 512;
/// Fock-space cap for the matrix route: `2^12` basis states.
pub const MAX_MATRIX_MODES: usize = 12;

fn default_n_max() -> u32 {
    DEFAULT_N_MAX
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajoranaConfig {
    pub a: f64,
    pub m: f64,
    pub beta: f64,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    /// `n ↦ (a_n⁺, a_n⁻)`
    #[serde(default)]
    pub coeffs: BTreeMap<u32, [C64; 2]>,
}

impl MajoranaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.m > DEFAULT_TOL) {
            return Err(Error::MasslessDegenerate(self.m));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidParameter(format!("interval length {} must be positive", self.a)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::BetaNonPositive(self.beta));
        }
        if self.n_max == 0 {
            return Err(Error::BadMode("n_max must be at least 1".into()));
        }
        if let Some(&n) = self.coeffs.keys().find(|&&n| n == 0 || n > self.n_max) {
            return Err(Error::BadMode(format!("coefficient index {n} outside 1..={}", self.n_max)));
        }
        Ok(())
    }

    /// `α_n = a_n⁺ - conj(a_n⁻)`
    pub fn alpha(&self, n: u32) -> C64 {
        self.coeffs.get(&n).map_or(C64::from(0.0), |[plus, minus]| plus - minus.conj())
    }

    pub fn scaled(&self, lambda: C64) -> Self {
        let mut out = self.clone();
        for pair in out.coeffs.values_mut() {
            pair[0] *= lambda;
            pair[1] *= lambda;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeData {
    pub n: u32,
    pub p: f64,
    /// `ε_n⁺`
    pub energy: f64,
    pub v_plus: [C64; 2],
    pub v_minus: [C64; 2],
}

/// `v = (-im, p - e) / √(2(e² - pe))`, with `p - e = -m²/(p + e)` when
/// `p` and `e` share a sign to avoid cancellation.
fn spinor(p: f64, m: f64, e: f64) -> [C64; 2] {
    let d = if p * e > 0.0 { -m * m / (p + e) } else { p - e };
    let norm = (-2.0 * e * d).sqrt();
    [c(0.0, -m / norm), c(d / norm, 0.0)]
}

pub fn dirac_hamiltonian(p: f64, m: f64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(p, 0.0), c(0.0, m), c(0.0, -m), c(-p, 0.0)])
}

pub fn mode_data(n: u32, a: f64, m: f64) -> Result<ModeData> {
    if n == 0 {
        return Err(Error::BadMode("mode index must be at least 1".into()));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::BadMode(format!("interval length {a} must be positive")));
    }
    if !(m > DEFAULT_TOL) {
        return Err(Error::MasslessDegenerate(m));
    }
    let p = PI * n as f64 / a;
    let energy = p.hypot(m);
    Ok(ModeData { n, p, energy, v_plus: spinor(p, m, energy), v_minus: spinor(p, m, -energy) })
}

/// `P = v⁺ v⁺*`, the positive spectral projection of `h₂(p)`.
pub fn projection_matrix(p: f64, m: f64) -> Result<CMatrix> {
    if !(m > DEFAULT_TOL) {
        return Err(Error::MasslessDegenerate(m));
    }
    let e = p.hypot(m);
    let v = CVector::from_row_slice(&spinor(p, m, e));
    Ok(&v * v.adjoint())
}

/// Composite Simpson rule on `[lo, hi]` with an even number of panels.
pub fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let panels = panels.max(2) + panels % 2;
    let h = (hi - lo) / panels as f64;
    let mut sum = f(lo) + f(hi);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(lo + k as f64 * h);
    }
    sum * h / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalityReport {
    /// `max |∫ Ψ_n^{s†} Ψ_n^s - 1|`
    pub diagonal: f64,
    /// `max |∫ Ψ_n^{s†} Ψ_{n'}^{s'}|` over `n ≠ n'`
    pub cross_mode: f64,
    /// `max |∫ Ψ_n^{+†} Ψ_n^-|`
    pub cross_spinor: f64,
}

impl OrthonormalityReport {
    pub fn max_residual(&self) -> f64 {
        self.diagonal.max(self.cross_mode).max(self.cross_spinor)
    }
}

/// Quadrature check of `∫₀ᵃ Ψ_n^{s†} Ψ_{n'}^{s'} dx = δ_{nn'} δ_{ss'}` for all
/// `n, n' ≤ n_max`, with `Ψ_n^s(x) = √(2/a) v^s sin(πnx/a)`.
pub fn mode_functions_orthonormal(config: &MajoranaConfig, panels: usize) -> Result<OrthonormalityReport> {
    config.validate()?;
    let a = config.a;
    let modes: Vec<ModeData> = (1..=config.n_max).map(|n| mode_data(n, a, config.m)).collect::<Result<_>>()?;
    let rows: Vec<OrthonormalityReport> = modes
        .par_iter()
        .map(|mi| {
            let mut r = OrthonormalityReport { diagonal: 0.0, cross_mode: 0.0, cross_spinor: 0.0 };
            for mj in &modes {
                let profile = simpson(
                    |x| (2.0 / a) * (PI * mi.n as f64 * x / a).sin() * (PI * mj.n as f64 * x / a).sin(),
                    0.0,
                    a,
                    panels,
                );
                for (si, vi) in [mi.v_plus, mi.v_minus].iter().enumerate() {
                    for (sj, vj) in [mj.v_plus, mj.v_minus].iter().enumerate() {
                        let spin = vi[0].conj() * vj[0] + vi[1].conj() * vj[1];
                        let value = (spin * profile).norm();
                        if mi.n != mj.n {
                            r.cross_mode = r.cross_mode.max(value);
                        } else if si == sj {
                            r.diagonal = r.diagonal.max((spin * profile - 1.0).norm());
                        } else {
                            r.cross_spinor = r.cross_spinor.max(value);
                        }
                    }
                }
            }
            r
        })
        .collect();
    Ok(rows.into_iter().fold(OrthonormalityReport { diagonal: 0.0, cross_mode: 0.0, cross_spinor: 0.0 }, |acc, r| {
        OrthonormalityReport {
            diagonal: acc.diagonal.max(r.diagonal),
            cross_mode: acc.cross_mode.max(r.cross_mode),
            cross_spinor: acc.cross_spinor.max(r.cross_spinor),
        }
    }))
}

/// Per-mode contribution to the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeTerm {
    pub n: u32,
    pub p: f64,
    pub energy: f64,
    /// `Ẽ_n = ε_n |α_n|²`
    pub e_tilde: f64,
    /// `β Ẽ_n tanh(βε_n/2)`
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub total: f64,
    pub modes: Vec<ModeTerm>,
}

pub fn mode_term(config: &MajoranaConfig, n: u32) -> Result<ModeTerm> {
    let md = mode_data(n, config.a, config.m)?;
    let e_tilde = md.energy * config.alpha(n).norm_sqr();
    let term = config.beta * e_tilde * (config.beta * md.energy / 2.0).tanh();
    Ok(ModeTerm { n, p: md.p, energy: md.energy, e_tilde, term })
}

/// `β Σ_{n ≤ n_max} ε_n |α_n|² tanh(βε_n/2)` over modes with coefficients.
pub fn closed_form_entropy(config: &MajoranaConfig) -> Result<ClosedForm> {
    config.validate()?;
    let modes: Vec<ModeTerm> = config.coeffs.keys().map(|&n| mode_term(config, n)).collect::<Result<_>>()?;
    let total = modes.iter().map(|t| t.term).sum();
    Ok(ClosedForm { total, modes })
}

/// Upper bound `β Σ_{n > cutoff} ε_n |α_n|²` on the terms dropped by
/// truncating the sum at `cutoff`.
pub fn tail_bound(config: &MajoranaConfig, cutoff: u32) -> Result<f64> {
    config.validate()?;
    let mut bound = 0.0;
    for &n in config.coeffs.keys().filter(|&&n| n > cutoff) {
        let md = mode_data(n, config.a, config.m)?;
        bound += config.beta * md.energy * config.alpha(n).norm_sqr();
    }
    Ok(bound)
}

/// One-particle data of the active modes: block `n` spans `(Ψ_n⁺, Ψ_n⁻)`
/// with `h = diag(ε, -ε)` and `ΓΨ⁺ = -Ψ⁻`.
#[derive(Debug, Clone)]
pub struct TruncatedModel {
    pub space: OneParticleSpace,
    pub generator: DynamicsGenerator,
    /// Unnormalized `f` in the mode basis.
    pub f: CVector,
    pub modes: Vec<u32>,
}

pub fn truncated_model(config: &MajoranaConfig) -> Result<TruncatedModel> {
    config.validate()?;
    let modes: Vec<u32> = config.coeffs.keys().copied().collect();
    if modes.len() > MAX_MATRIX_MODES {
        return Err(Error::TooManyModes { modes: modes.len(), cap: MAX_MATRIX_MODES });
    }
    if modes.is_empty() {
        return Err(Error::ZeroVector);
    }
    let d = 2 * modes.len();
    let mut k = CMatrix::zeros(d, d);
    let mut h = CMatrix::zeros(d, d);
    let mut f = CVector::zeros(d);
    for (b, &n) in modes.iter().enumerate() {
        let e = mode_data(n, config.a, config.m)?.energy;
        let (i, j) = (2 * b, 2 * b + 1);
        k[(i, j)] = c(-1.0, 0.0);
        k[(j, i)] = c(-1.0, 0.0);
        h[(i, i)] = c(e, 0.0);
        h[(j, j)] = c(-e, 0.0);
        let alpha = config.alpha(n);
        f[i] = alpha;
        f[j] = -alpha.conj();
    }
    let space = OneParticleSpace::new(k)?;
    let generator = DynamicsGenerator::gamma_odd(&space, h)?;
    Ok(TruncatedModel { space, generator, f, modes })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRoute {
    /// Routes for the unitary excitation `f·√(2/(f,f))`.
    pub report: EntropyReport,
    /// `(f,f)` of the unnormalized mode expansion.
    pub norm_sq: f64,
    /// `report.araki_analytic · (f,f)/2`, comparable with the closed form.
    pub total: f64,
}

pub fn truncated_matrix_entropy(config: &MajoranaConfig, opts: &RouteOptions) -> Result<MatrixRoute> {
    let model = truncated_model(config)?;
    let norm_sq = model.f.norm_squared();
    if norm_sq <= DEFAULT_TOL {
        return Err(Error::ZeroVector);
    }
    let unit = FieldVector::unitary_excitation(&model.space, &model.f * C64::from((2.0 / norm_sq).sqrt()))?;
    let report = full_report(&model.space, &model.generator, config.beta, &unit, opts)?;
    let total = report.araki_analytic * norm_sq / 2.0;
    Ok(MatrixRoute { report, norm_sq, total })
}
