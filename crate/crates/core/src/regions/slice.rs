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

//! Coordinate slices of a box cut by a hyperplane x_1 + ... + x_n = c.
//!
//! Given a feasible prefix y = x_{<k}, the k-th coordinate of the slice
//! ranges over [max{ℓ_k(y), a_k}, min{u_k(y), b_k}] where
//! ℓ_k(y) = c − Σ_{i<k} y_i − Σ_{i>k} b_i and
//! u_k(y) = c − Σ_{i<k} y_i − Σ_{i>k} a_i.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack allowed before an empty slice is reported as infeasible.
pub const INFEASIBLE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SliceError {
    #[error("box bounds have lengths {a} and {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("coordinate index {k} outside 1..={n}")]
    BadIndex { k: usize, n: usize },
    #[error("prefix has {got} entries, expected {expected}")]
    BadPrefix { expected: usize, got: usize },
    #[error("a_{k} > b_{k}")]
    InvertedBox { k: usize },
    #[error("prefix admits no completion: slice [{lo}, {hi}] is empty")]
    Infeasible { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSliceInterval {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
    /// 1-based coordinate index.
    pub k: usize,
    /// Fixed prefix y_1..y_{k−1}.
    pub y: Vec<f64>,
}

impl BoxSliceInterval {
    fn validate(&self) -> Result<(), SliceError> {
        let n = self.a.len();
        if self.b.len() != n {
            return Err(SliceError::LengthMismatch { a: n, b: self.b.len() });
        }
        if self.k == 0 || self.k > n {
            return Err(SliceError::BadIndex { k: self.k, n });
        }
        if self.y.len() != self.k - 1 {
            return Err(SliceError::BadPrefix { expected: self.k - 1, got: self.y.len() });
        }
        if let Some(i) = (0..n).find(|&i| self.a[i] > self.b[i]) {
            return Err(SliceError::InvertedBox { k: i + 1 });
        }
        Ok(())
    }

    fn after(&self) -> std::ops::Range<usize> {
        self.k..self.a.len()
    }

    pub fn ell(&self) -> f64 {
        self.c - self.y.iter().sum::<f64>() - self.after().map(|i| self.b[i]).sum::<f64>()
    }

    pub fn upsilon(&self) -> f64 {
        self.c - self.y.iter().sum::<f64>() - self.after().map(|i| self.a[i]).sum::<f64>()
    }

    /// The k-th coordinate range of the slice.
    pub fn slice_interval(&self) -> Result<(f64, f64), SliceError> {
        self.validate()?;
        let k = self.k - 1;
        let lo = self.ell().max(self.a[k]);
        let hi = self.upsilon().min(self.b[k]);
        if lo > hi + INFEASIBLE_TOL {
            return Err(SliceError::Infeasible { lo, hi });
        }
        Ok((lo, hi.max(lo)))
    }

    /// Checks the four prefix-independent simplifications of the endpoints,
    /// reporting the first rule whose hypothesis holds but conclusion fails.
    pub fn check_endpoint_rules(&self) -> Result<(), String> {
        let (lo, hi) = self.slice_interval().map_err(|e| e.to_string())?;
        let k = self.k - 1;
        let n = self.a.len();
        let sum_b_before: f64 = (0..k).map(|i| self.b[i]).sum();
        let sum_a_before: f64 = (0..k).map(|i| self.a[i]).sum();
        let sum_b_after: f64 = (k + 1..n).map(|i| self.b[i]).sum();
        let sum_a_after: f64 = (k + 1..n).map(|i| self.a[i]).sum();
        let eps = 1e-12;
        let near = |x: f64, y: f64| (x - y).abs() <= eps * (1.0 + x.abs().max(y.abs()));
        if self.a[k] <= self.c - sum_b_before - sum_b_after && !near(lo, self.ell()) {
            return Err(format!("rule 1: lo = {lo}, ell = {}", self.ell()));
        }
        if self.a[k] >= self.c - sum_a_before - sum_b_after && !near(lo, self.a[k]) {
            return Err(format!("rule 2: lo = {lo}, a_k = {}", self.a[k]));
        }
        if self.b[k] >= self.c - sum_a_before - sum_a_after && !near(hi, self.upsilon()) {
            return Err(format!("rule 3: hi = {hi}, u = {}", self.upsilon()));
        }
        if self.b[k] <= self.c - sum_b_before - sum_a_after && !near(hi, self.b[k]) {
            return Err(format!("rule 4: hi = {hi}, b_k = {}", self.b[k]));
        }
        Ok(())
    }
}
