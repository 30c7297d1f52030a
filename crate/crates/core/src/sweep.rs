//! Seeded random-instance sweeps over all four entropy routes.
//!
//! Instance `i` draws from stream `i` of the seed, so rows do not depend on
//! thread count or scheduling; results are collected in index order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{full_report, RouteOptions, Verdict};
use crate::error::{Error, Result};
use crate::random::{random_entropy_instance, rng_for};
use crate::serde_ext::extended_f64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub instances: usize,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub beta_min: f64,
    pub beta_max: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { instances: 200, seed: 0, dims: vec![2, 4, 6, 8, 10, 12], beta_min: 0.1, beta_max: 5.0 }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::InvalidParameter("no dimensions to sample".into()));
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d == 0 || d % 2 == 1 || d > 28) {
            return Err(Error::OddDimension(d));
        }
        if !(self.beta_min > 0.0 && self.beta_max >= self.beta_min && self.beta_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "β range [{}, {}] must be positive and ordered",
                self.beta_min, self.beta_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub dim: usize,
    pub beta: f64,
    pub araki_analytic: f64,
    pub araki_fd: f64,
    #[serde(with = "extended_f64")]
    pub vn_direct: f64,
    pub vn_commutator: f64,
    #[serde(with = "extended_f64")]
    pub max_pairwise_discrepancy: f64,
    pub verdict: Verdict,
}

pub fn sweep_instance(config: &SweepConfig, index: usize, opts: &RouteOptions) -> Result<SweepRow> {
    let mut rng = rng_for(config.seed, index as u64);
    let inst = random_entropy_instance(&mut rng, &config.dims, (config.beta_min, config.beta_max));
    let r = full_report(&inst.space, &inst.generator, inst.beta, &inst.field, opts)?;
    Ok(SweepRow {
        index,
        dim: inst.space.dim(),
        beta: inst.beta,
        araki_analytic: r.araki_analytic,
        araki_fd: r.araki_fd,
        vn_direct: r.vn_direct,
        vn_commutator: r.vn_commutator,
        max_pairwise_discrepancy: r.max_pairwise_discrepancy,
        verdict: r.verdict,
    })
}

/// Runs every instance on the current rayon pool.
pub fn run_sweep(config: &SweepConfig, opts: &RouteOptions) -> Result<Vec<SweepRow>> {
    config.validate()?;
    (0..config.instances).into_par_iter().map(|i| sweep_instance(config, i, opts)).collect()
}
