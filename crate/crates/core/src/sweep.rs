//! Deficit-versus-distance tables along `u_ε = base + ε·perturbation`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{catalog_get, CatalogParams};
use crate::deficits::additive_from;
use crate::domain::OrthantSpec;
use crate::error::{Error, Result};
use crate::projection::{dist_to_affine_family, dist_to_e, dist_to_e_norm_constrained};
use crate::quadrature::QuadConfig;
use crate::report::{fmt17, to_json_17};
use crate::stability::stability_report;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub nk: String,
    pub base: String,
    pub perturbation: String,
    pub params: CatalogParams,
    pub eps_min: f64,
    pub eps_max: f64,
    pub count: usize,
    pub quad: QuadConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            nk: "2,1".into(),
            base: "extremal".into(),
            perturbation: "sharp_example".into(),
            params: CatalogParams::default(),
            eps_min: 0.0,
            eps_max: 1.0,
            count: 11,
            quad: QuadConfig::default(),
        }
    }
}

impl SweepConfig {
    /// The ε grid, evenly spaced and including both ends.
    pub fn epsilons(&self) -> Result<Vec<f64>> {
        if self.count == 0 || !self.eps_min.is_finite() || !self.eps_max.is_finite() || self.eps_min > self.eps_max {
            return Err(Error::Parameter(format!(
                "bad range: min {} max {} count {}",
                self.eps_min, self.eps_max, self.count
            )));
        }
        if self.count == 1 {
            return Ok(vec![self.eps_min]);
        }
        let h = (self.eps_max - self.eps_min) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.eps_min + h * i as f64).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub values: BTreeMap<String, f64>,
    /// Names of the stability checks that fail at this ε.
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Header `epsilon,<sorted keys>`, rows in increasing ε.
    pub fn to_csv(&self) -> String {
        let keys: BTreeSet<&String> = self.rows.iter().flat_map(|r| r.values.keys()).collect();
        let mut out = String::from("epsilon");
        for k in &keys {
            out.push(',');
            out.push_str(k);
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&fmt17(r.epsilon));
            for k in &keys {
                out.push(',');
                out.push_str(&r.values.get(*k).map(|v| fmt17(*v)).unwrap_or_default());
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        to_json_17(self)
    }

    pub fn violation_count(&self) -> usize {
        self.rows.iter().map(|r| r.violations.len()).sum()
    }

    /// Smallest value of `margin/<check>` over all rows.
    pub fn min_margin(&self, check: &str) -> Option<f64> {
        let key = format!("margin/{check}");
        self.rows.iter().filter_map(|r| r.values.get(&key).copied()).min_by(f64::total_cmp)
    }
}

/// Evaluates deficits, distances and every stability margin at each ε.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.quad.validate()?;
    let spec: OrthantSpec = cfg.nk.parse()?;
    let base = catalog_get(&cfg.base, spec, &cfg.params)?;
    let pert = catalog_get(&cfg.perturbation, spec, &cfg.params)?;
    let eps = cfg.epsilons()?;
    let rows: Result<Vec<SweepRow>> = eps
        .par_iter()
        .map(|&e| {
            let f = base.add_scaled(e, &pert)?.with_label(format!("{}+{e}*{}", cfg.base, cfg.perturbation));
            let r = stability_report(&f, &cfg.quad)?;
            let mut values = BTreeMap::new();
            values.insert("rho1".to_string(), r.rho1);
            values.insert("additive(1)".to_string(), additive_from(&r.core, 1.0)?);
            values.insert("dist_e".to_string(), dist_to_e(&f, &cfg.quad)?.dist_sq);
            values.insert("dist_affine".to_string(), dist_to_affine_family(&f, &cfg.quad)?.dist_sq);
            values.insert("dist_constrained".to_string(), dist_to_e_norm_constrained(&f, &cfg.quad)?.dist_sq);
            values.insert("scale".to_string(), r.core.scale());
            for c in &r.checks {
                values.insert(format!("margin/{}", c.name), c.margin);
            }
            let violations = r.checks.iter().filter(|c| !c.holds).map(|c| c.name.clone()).collect();
            Ok(SweepRow { epsilon: e, values, violations })
        })
        .collect();
    Ok(SweepTable { config: cfg.clone(), rows: rows? })
}
