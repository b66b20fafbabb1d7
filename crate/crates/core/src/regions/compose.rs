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

//! Assembling c_n and P from per-region integrals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{region_catalog, QuadrantSignature, RegionError};

/// How the two pentagon regions are weighted in c_5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientMode {
    /// Every region weighted by its catalog multiplicity:
    /// c_5 = ∫(I,I,I,I,I) + 5∫(I,I,I,I,II).
    #[default]
    AsPrinted,
    /// The pentagon weights exchanged: c_5 = 5∫(I,I,I,I,I) + ∫(I,I,I,I,II).
    /// This is the reading under which the tabulated n = 5 values reproduce
    /// the tabulated c_5 when taken with their printed labels.
    SwappedPentagon,
}

/// The weighted regions summing to c_n, for n ∈ 2..=5.
pub fn composition(n: usize, mode: CoefficientMode) -> Vec<(QuadrantSignature, f64)> {
    let mut out: Vec<(QuadrantSignature, f64)> = region_catalog()
        .iter()
        .filter(|r| r.n() == n)
        .map(|r| (r.signature.clone(), r.multiplicity as f64))
        .collect();
    if n == 5 && mode == CoefficientMode::SwappedPentagon {
        let a = out[0].1;
        out[0].1 = out[1].1;
        out[1].1 = a;
    }
    out
}

/// c_2, c_3, c_4, c_5 from a value for each of the twelve regions.
pub fn compose_cn(
    values: &BTreeMap<QuadrantSignature, f64>,
    mode: CoefficientMode,
) -> Result<[f64; 4], RegionError> {
    let mut c = [0.0; 4];
    for (slot, n) in c.iter_mut().zip(2..=5) {
        for (sig, w) in composition(n, mode) {
            let v = values.get(&sig).ok_or_else(|| RegionError::MissingValue(sig.clone()))?;
            *slot += w * v;
        }
    }
    Ok(c)
}

/// P = c_2 − c_3 + c_4 − c_5.
pub fn compose_p(c: &[f64; 4]) -> f64 {
    c[0] - c[1] + c[2] - c[3]
}

/// The older I(·) label for a region. Regions that only appear inside a
/// composite label get that label with a qualifier.
pub fn tao_wu_alias(signature: &QuadrantSignature) -> &'static str {
    match signature.to_string().as_str() {
        "I,IV" => "I(1,0)",
        "II,III" => "I(0,0)/2",
        "II,II,II" => "I(0,0,0)",
        "I,II,II" => "part of I(1,0,0)",
        "I,II,III" => "part of I(1,0,0) (weight 2)",
        "I,I,III" => "I(1,1,0)",
        "I,II,II,II" => "I(1,0,0,0)",
        "I,I,II,II" => "I(1,1,0,0)",
        "I,II,I,II" => "I(1,0,1,0)",
        "I,I,I,II" => "I(1,1,1,0)",
        "I,I,I,I,II" => "I(1,1,1,1,0)",
        "I,I,I,I,I" => "I(1,1,1,1,1)",
        _ => "",
    }
}

/// Composite labels as weighted sums of regions.
pub fn composite_aliases() -> Vec<(&'static str, Vec<(QuadrantSignature, f64)>)> {
    let s = |x: &str| x.parse::<QuadrantSignature>().expect("static signature");
    vec![
        ("I(0,0)", vec![(s("II,III"), 2.0)]),
        ("I(1,0,0)", vec![(s("I,II,II"), 1.0), (s("I,II,III"), 2.0)]),
    ]
}
