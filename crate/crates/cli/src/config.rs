// Copyright 2026 The unscathed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Run configuration: a JSON document whose fields the command line can
//! override.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use unscathed::regions::{CoefficientMode, QuadrantSignature};
use unscathed::report::TableFormat;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Monte Carlo samples (per region for integration).
    pub samples: Option<u64>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    /// Absolute tolerance per region signature, e.g. {"I,IV": 1e-11}.
    pub tolerances: BTreeMap<String, f64>,
    pub max_evaluations: Option<u64>,
    pub threads: Option<usize>,
    pub output: PathBuf,
    pub format: TableFormat,
    pub coefficient_mode: CoefficientMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            samples: None,
            abs_tol: None,
            rel_tol: None,
            tolerances: BTreeMap::new(),
            max_evaluations: None,
            threads: None,
            output: PathBuf::from("results.jsonl"),
            format: TableFormat::default(),
            coefficient_mode: CoefficientMode::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == Some(0) {
            bail!("sample count must be at least 1");
        }
        if self.threads == Some(0) {
            bail!("thread count must be at least 1");
        }
        for (name, tol) in
            self.abs_tol.iter().map(|t| ("abs-tol", t)).chain(self.tolerances.values().map(|t| ("tolerance", t)))
        {
            if !(*tol > 0.0) {
                bail!("{name} must be positive, got {tol}");
            }
        }
        if let Some(r) = self.rel_tol {
            if !(r >= 0.0) {
                bail!("rel-tol must be non-negative, got {r}");
            }
        }
        for key in self.tolerances.keys() {
            key.parse::<QuadrantSignature>().map_err(|e| anyhow::anyhow!("tolerance key {key}: {e}"))?;
        }
        Ok(())
    }

    /// Absolute and relative tolerance for a region of n points.
    pub fn tolerance_for(&self, sig: &QuadrantSignature) -> (f64, f64) {
        let key = sig.to_string();
        let (abs, rel) = match sig.len() {
            2 => (1e-12, 0.0),
            3 => (1e-10, 0.0),
            4 => (1e-9, 0.0),
            _ => (1e-12, 5e-3),
        };
        let abs = self.tolerances.get(&key).copied().or(self.abs_tol).unwrap_or(abs);
        (abs, self.rel_tol.unwrap_or(rel))
    }
}
