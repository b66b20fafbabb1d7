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

//! Splitting regions into pieces with finite bounds, each mapped from the
//! unit cube.
//!
//! A ratio range (c, 1/c) is split at t = 1 and the upper half rewritten
//! with u = 1/t ∈ (c, 1); (0, ∞) becomes t ∈ (0, 1) plus u ∈ (0, 1). One
//! region additionally has its θ range split so that every piece has a
//! single expression for each bound. Dependent bounds are handled by
//! rescaling each variable to [0, 1] given the earlier ones, so the Jacobian
//! of the unit-cube map is the product of the interval lengths.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::expr::CompiledBounds;
use super::{BoundExpr, Bounds, EvalCtx, QuadrantSignature, RatioRange, RegionSpec};
use crate::geometry::{pair_terms_sc, w_from_terms, PairTerms, WVariant};

/// Ratios beyond this (or products below its reciprocal) contribute nothing
/// representable and are treated as zero.
const RATIO_CUTOFF: f64 = 1e60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioMap {
    /// The integration variable is t itself.
    Direct,
    /// The integration variable is u = 1/t.
    Reciprocal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubRegion {
    pub signature: QuadrantSignature,
    pub label: String,
    pub theta_bounds: Vec<Bounds>,
    /// Bounds on the integration variable for each ratio (t or u).
    pub ratio_bounds: Vec<Bounds>,
    pub ratio_maps: Vec<RatioMap>,
    pub weight_exponents: Vec<i32>,
    pub w_variant: WVariant,
    pub prefactor: f64,
    #[serde(skip)]
    compiled_thetas: Vec<CompiledBounds>,
    #[serde(skip)]
    compiled_ratios: Vec<CompiledBounds>,
}

/// Gaps, cosines and ratios of one mapped point, including the derived
/// last entries.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MappedPoint {
    pub n: usize,
    pub thetas: [f64; 5],
    pub cosines: [f64; 5],
    pub sines: [f64; 5],
    pub ts: [f64; 5],
}

impl MappedPoint {
    pub fn free_thetas(&self) -> &[f64] {
        &self.thetas[..self.n - 1]
    }

    pub fn free_ts(&self) -> &[f64] {
        &self.ts[..self.n - 1]
    }
}

impl SubRegion {
    pub fn new(
        spec: &RegionSpec,
        label: String,
        theta_bounds: Vec<Bounds>,
        ratio_bounds: Vec<Bounds>,
        ratio_maps: Vec<RatioMap>,
    ) -> Self {
        SubRegion {
            signature: spec.signature.clone(),
            label,
            compiled_thetas: theta_bounds.iter().map(Bounds::compile).collect(),
            compiled_ratios: ratio_bounds.iter().map(Bounds::compile).collect(),
            theta_bounds,
            ratio_bounds,
            ratio_maps,
            weight_exponents: spec.weight_exponents.clone(),
            w_variant: spec.w_variant,
            prefactor: spec.prefactor,
        }
    }

    /// Replaces the θ bounds, keeping the compiled copies in step.
    pub fn with_theta_bounds(mut self, theta_bounds: Vec<Bounds>) -> Self {
        self.compiled_thetas = theta_bounds.iter().map(Bounds::compile).collect();
        self.theta_bounds = theta_bounds;
        self
    }

    pub fn n(&self) -> usize {
        self.theta_bounds.len() + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.theta_bounds.len()
    }

    /// Maps `u ∈ [0, 1]^dim` into the piece, returning the Jacobian of the
    /// map (zero when some interval is empty or a ratio leaves the
    /// representable range).
    pub fn map_unit(&self, u: &[f64], p: &mut MappedPoint) -> f64 {
        let m = self.theta_bounds.len();
        let n = m + 1;
        debug_assert_eq!(u.len(), 2 * m);
        p.n = n;
        let mut jac = 1.0;
        let mut sum = 0.0;
        for k in 0..m {
            let ctx = EvalCtx { thetas: &p.thetas[..k], cosines: &[], ratios: &[] };
            let (lo, hi) = self.compiled_thetas[k].eval(&ctx);
            let len = hi - lo;
            if !(len > 0.0) {
                return 0.0;
            }
            p.thetas[k] = lo + u[k] * len;
            sum += p.thetas[k];
            jac *= len;
        }
        p.thetas[m] = TAU - sum;
        for k in 0..n {
            let (s, c) = p.thetas[k].sin_cos();
            p.sines[k] = s;
            p.cosines[k] = 2.0 * c;
        }
        let mut prod = 1.0;
        for k in 0..m {
            let ctx = EvalCtx { thetas: &p.thetas[..n], cosines: &p.cosines[..n], ratios: &p.ts[..k] };
            let (lo, hi) = self.compiled_ratios[k].eval(&ctx);
            let len = hi - lo;
            if !(len > 0.0) {
                return 0.0;
            }
            let v = lo + u[m + k] * len;
            let t = match self.ratio_maps[k] {
                RatioMap::Direct => {
                    jac *= len;
                    v
                }
                RatioMap::Reciprocal => {
                    if !(v > 0.0) {
                        return 0.0;
                    }
                    jac *= len / (v * v);
                    1.0 / v
                }
            };
            if !(t > 0.0 && t < RATIO_CUTOFF) {
                return 0.0;
            }
            p.ts[k] = t;
            prod *= t;
        }
        if !(prod > 1.0 / RATIO_CUTOFF && prod < RATIO_CUTOFF) {
            return 0.0;
        }
        p.ts[m] = 1.0 / prod;
        jac
    }

    /// The reduced integrand at a mapped point (without the map Jacobian).
    pub fn integrand_at(&self, p: &MappedPoint) -> f64 {
        let n = p.n;
        debug_assert!(
            (0..n).all(|i| {
                let c = 0.5 * p.cosines[i];
                p.ts[i] * c < 1.0 && p.ts[i] > c
            }),
            "{p:?}"
        );
        let mut terms = [PairTerms { alpha: 0.0, beta: 0.0, cs_alpha: 0.0, cs_beta: 0.0 }; 5];
        for i in 0..n {
            terms[i] = pair_terms_sc(p.sines[i], 0.5 * p.cosines[i], p.ts[i]);
        }
        let w = w_from_terms(self.w_variant, &terms[..n], &p.ts[..n]);
        let mut weight = 1.0;
        for (t, &e) in p.ts[..n - 1].iter().zip(&self.weight_exponents) {
            weight *= t.powi(e);
        }
        let v = self.prefactor * weight * w.powi(-(n as i32));
        if v.is_finite() {
            v
        } else {
            0.0
        }
    }

    /// Integrand times Jacobian at a point of the unit cube.
    pub fn eval_unit(&self, u: &[f64]) -> f64 {
        let mut p = MappedPoint::default();
        let jac = self.map_unit(u, &mut p);
        if jac == 0.0 {
            return 0.0;
        }
        jac * self.integrand_at(&p)
    }
}

fn theta_variants(spec: &RegionSpec) -> Vec<(Vec<Bounds>, &'static str)> {
    use BoundExpr as E;
    if spec.signature.to_string() == "I,II,I,II" {
        let first = spec.theta_bounds[0].clone();
        vec![
            (
                vec![
                    first.clone(),
                    Bounds::new(E::pi(1, 2), E::pi_minus_thetas(1, 1, &[1])),
                    Bounds::new(E::pi(1, 3), E::pi(1, 2)),
                ],
                "θ2<π−θ1",
            ),
            (
                vec![
                    first,
                    Bounds::new(E::pi_minus_thetas(1, 1, &[1]), E::pi_minus_thetas(7, 6, &[1])),
                    Bounds::new(E::pi(1, 3), E::pi_minus_thetas(3, 2, &[1, 2])),
                ],
                "θ2>π−θ1",
            ),
        ]
    } else {
        vec![(spec.theta_bounds.clone(), "")]
    }
}

fn ratio_variants(range: &RatioRange) -> Vec<(Bounds, RatioMap, &'static str)> {
    use BoundExpr as E;
    match range {
        RatioRange::Cosine { index } => vec![
            (Bounds::new(E::cos2(*index), E::One), RatioMap::Direct, "t<1"),
            (Bounds::new(E::cos2(*index), E::One), RatioMap::Reciprocal, "t>1"),
        ],
        RatioRange::Unbounded => vec![
            (Bounds::new(E::Zero, E::One), RatioMap::Direct, "t<1"),
            (Bounds::new(E::Zero, E::One), RatioMap::Reciprocal, "t>1"),
        ],
        RatioRange::Coupled { bounds } => vec![(bounds.clone(), RatioMap::Direct, "")],
    }
}

/// All pieces of a region. Their integrals sum to the region's integral.
pub fn decompose_region(spec: &RegionSpec) -> Vec<SubRegion> {
    let mut out = Vec::new();
    for (thetas, tlabel) in theta_variants(spec) {
        let mut combos: Vec<(Vec<Bounds>, Vec<RatioMap>, Vec<String>)> =
            vec![(Vec::new(), Vec::new(), Vec::new())];
        for (k, range) in spec.t_ranges.iter().enumerate() {
            let mut next = Vec::new();
            for (bs, ms, ls) in &combos {
                for (b, m, l) in ratio_variants(range) {
                    let mut bs = bs.clone();
                    let mut ms = ms.clone();
                    let mut ls = ls.clone();
                    bs.push(b);
                    ms.push(m);
                    if !l.is_empty() {
                        ls.push(l.replace('t', &format!("t{}", k + 1)));
                    }
                    next.push((bs, ms, ls));
                }
            }
            combos = next;
        }
        for (ratio_bounds, ratio_maps, mut labels) in combos {
            if !tlabel.is_empty() {
                labels.insert(0, tlabel.to_string());
            }
            out.push(SubRegion::new(
                spec,
                labels.join(" "),
                thetas.clone(),
                ratio_bounds,
                ratio_maps,
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::{find_region, reduced_integrand, region_catalog};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn piece_counts() {
        let count = |s: &str| decompose_region(find_region(&s.parse().unwrap()).unwrap()).len();
        assert_eq!(count("I,IV"), 2);
        assert_eq!(count("II,II,II"), 4);
        assert_eq!(count("I,II,I,II"), 16);
        assert_eq!(count("I,I,I,I,II"), 16);
        assert_eq!(count("I,I,I,I,I"), 1);
    }

    #[test]
    fn mapped_points_lie_in_region_and_match_integrand() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for spec in region_catalog() {
            for piece in decompose_region(spec) {
                for _ in 0..200 {
                    let u: Vec<f64> = (0..piece.dim()).map(|_| rng.random::<f64>()).collect();
                    let mut p = MappedPoint::default();
                    let jac = piece.map_unit(&u, &mut p);
                    if jac == 0.0 {
                        continue;
                    }
                    let x = crate::parametrization::ParamVector::new(
                        0.0,
                        p.free_thetas().to_vec(),
                        1.0,
                        p.free_ts().to_vec(),
                    );
                    assert!(spec.within_bounds(&x), "{} {} {:?}", spec.signature, piece.label, x);
                    let direct = reduced_integrand(spec, p.free_thetas(), p.free_ts()).unwrap();
                    let via = piece.integrand_at(&p);
                    assert!((direct - via).abs() <= 1e-12 * direct.abs());
                }
            }
        }
    }

    #[test]
    fn reciprocal_map_jacobian() {
        let spec = find_region(&"II,III".parse().unwrap()).unwrap();
        let pieces = decompose_region(spec);
        let upper = pieces.iter().find(|p| p.ratio_maps[0] == RatioMap::Reciprocal).unwrap();
        let mut p = MappedPoint::default();
        let jac = upper.map_unit(&[0.5, 0.25], &mut p);
        assert!((p.ts[0] - 4.0).abs() < 1e-15);
        assert!((jac - std::f64::consts::FRAC_PI_2 * 16.0).abs() < 1e-12);
    }
}
