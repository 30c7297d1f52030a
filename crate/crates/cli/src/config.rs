//! JSON problem configurations.

use std::path::Path;

use araki_core::{CMatrix, CVector, DynamicsGenerator, FieldVector, OneParticleSpace, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// `{ "dim", "K", "h", "beta", "f" | "fields" }`; complex entries are `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyConfig {
    pub dim: usize,
    #[serde(rename = "K")]
    pub k: Vec<Vec<C64>>,
    pub h: Vec<Vec<C64>>,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<Vec<C64>>>,
}

pub struct EntropyProblem {
    pub space: OneParticleSpace,
    pub generator: DynamicsGenerator,
    pub beta: f64,
    pub fields: Vec<FieldVector>,
}

fn matrix(name: &str, rows: &[Vec<C64>], dim: usize) -> Result<CMatrix, CliError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::Input(format!("{name} must be a {dim}×{dim} matrix")));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

fn vector(name: &str, v: &[C64], dim: usize) -> Result<CVector, CliError> {
    if v.len() != dim {
        return Err(CliError::Input(format!("{name} must have {dim} entries, got {}", v.len())));
    }
    Ok(CVector::from_column_slice(v))
}

impl EntropyConfig {
    pub fn problem(&self) -> Result<EntropyProblem, CliError> {
        let space = OneParticleSpace::new(matrix("K", &self.k, self.dim)?)?;
        let generator = DynamicsGenerator::gamma_odd(&space, matrix("h", &self.h, self.dim)?)?;
        let raw: Vec<&Vec<C64>> = match (&self.f, &self.fields) {
            (Some(f), None) => vec![f],
            (None, Some(fs)) if !fs.is_empty() => fs.iter().collect(),
            (Some(_), Some(_)) => return Err(CliError::Input("give either \"f\" or \"fields\", not both".into())),
            _ => return Err(CliError::Input("missing field vector \"f\"".into())),
        };
        let fields = raw
            .into_iter()
            .map(|v| FieldVector::new(&space, vector("f", v, self.dim)?).map_err(CliError::from))
            .collect::<Result<_, _>>()?;
        Ok(EntropyProblem { space, generator, beta: self.beta, fields })
    }
}

/// `{ "psi", "phi" }`, both of length `n²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteConfig {
    pub psi: Vec<C64>,
    pub phi: Vec<C64>,
}

/// `n:re,re` or `n:re,im,re,im` for `(a_n⁺, a_n⁻)`.
pub fn parse_coeff(s: &str) -> Result<(u32, [C64; 2]), String> {
    let (n, rest) = s.split_once(':').ok_or_else(|| format!("expected n:values, got {s:?}"))?;
    let n: u32 = n.trim().parse().map_err(|e| format!("mode index {n:?}: {e}"))?;
    let values: Vec<f64> = rest
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("coefficient {x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match values.as_slice() {
        [p, m] => Ok((n, [C64::new(*p, 0.0), C64::new(*m, 0.0)])),
        [pr, pi, mr, mi] => Ok((n, [C64::new(*pr, *pi), C64::new(*mr, *mi)])),
        _ => Err(format!("expected 2 or 4 numbers after {n}:, got {}", values.len())),
    }
}
