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

//! The twelve quadrant-signature integration regions.
//!
//! Each region fixes the quadrant of every gap θ_1..θ_n; the catalog holds
//! one representative per dihedral class together with the size of that
//! class (its multiplicity in c_n). After θ and r are integrated out in
//! closed form, a region contributes
//!
//! ```text
//! (1/n)·(n−1)!·π · ∫ dθ ∫ dt  ∏ t_i^{2(n−i)−1} · W_n^{−n}
//! ```

mod compose;
mod decompose;
pub mod expr;
pub mod slice;

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use compose::{
    composite_aliases, compose_cn, compose_p, composition, tao_wu_alias, CoefficientMode,
};
pub use decompose::{decompose_region, MappedPoint, RatioMap, SubRegion};
pub use expr::{BoundExpr, Bounds, EvalCtx};
pub use slice::{BoxSliceInterval, SliceError};

use crate::geometry::{w_closed_form, GeometryError, WVariant};
use crate::parametrization::ParamVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("unknown quadrant signature {0:?}")]
    UnknownSignature(String),
    #[error("missing value for region {0}")]
    MissingValue(QuadrantSignature),
    #[error("point is outside the bounds of region {0}")]
    OutOfBounds(QuadrantSignature),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    I,
    II,
    III,
    IV,
}

impl Quadrant {
    /// Quadrant of an angle in (0, 2π); boundaries go to the later quadrant.
    pub fn of(theta: f64) -> Quadrant {
        if theta < FRAC_PI_2 {
            Quadrant::I
        } else if theta < PI {
            Quadrant::II
        } else if theta < 1.5 * PI {
            Quadrant::III
        } else {
            Quadrant::IV
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Quadrant::I => "I",
            Quadrant::II => "II",
            Quadrant::III => "III",
            Quadrant::IV => "IV",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct QuadrantSignature(pub Vec<Quadrant>);

impl QuadrantSignature {
    pub fn of_gaps(full_thetas: &[f64]) -> Self {
        QuadrantSignature(full_thetas.iter().map(|&t| Quadrant::of(t)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All signatures reachable by cyclic relabeling and reflection.
    pub fn dihedral_orbit(&self) -> BTreeSet<QuadrantSignature> {
        let n = self.0.len();
        let mut rev = self.0.clone();
        rev.reverse();
        let mut out = BTreeSet::new();
        for base in [&self.0, &rev] {
            for s in 0..n {
                out.insert(QuadrantSignature((0..n).map(|i| base[(s + i) % n]).collect()));
            }
        }
        out
    }
}

impl fmt::Display for QuadrantSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(|q| q.as_str()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for QuadrantSignature {
    type Err = RegionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let quads = trimmed
            .split(',')
            .map(|p| match p.trim() {
                "I" => Ok(Quadrant::I),
                "II" => Ok(Quadrant::II),
                "III" => Ok(Quadrant::III),
                "IV" => Ok(Quadrant::IV),
                _ => Err(RegionError::UnknownSignature(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if quads.len() < 2 {
            return Err(RegionError::UnknownSignature(s.to_string()));
        }
        Ok(QuadrantSignature(quads))
    }
}

impl From<QuadrantSignature> for String {
    fn from(s: QuadrantSignature) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for QuadrantSignature {
    type Error = RegionError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// The range of one magnitude ratio t_i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RatioRange {
    /// (c_i, 1/c_i)
    Cosine { index: usize },
    /// (0, ∞)
    Unbounded,
    /// Bounds depending on other gaps and earlier ratios.
    Coupled { bounds: Bounds },
}

impl RatioRange {
    pub fn bounds(&self) -> Bounds {
        match self {
            RatioRange::Cosine { index } => {
                Bounds::new(BoundExpr::cos2(*index), BoundExpr::recip(BoundExpr::cos2(*index)))
            }
            RatioRange::Unbounded => Bounds::new(BoundExpr::Zero, BoundExpr::Infinity),
            RatioRange::Coupled { bounds } => bounds.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub signature: QuadrantSignature,
    pub multiplicity: u32,
    /// Bounds on θ_1..θ_{n−1}.
    pub theta_bounds: Vec<Bounds>,
    /// Ranges of t_1..t_{n−1}.
    pub t_ranges: Vec<RatioRange>,
    /// Power of t_i in the integrand, 2(n−i)−1.
    pub weight_exponents: Vec<i32>,
    pub w_variant: WVariant,
    /// (1/n)·(n−1)!·π
    pub prefactor: f64,
}

impl RegionSpec {
    pub fn n(&self) -> usize {
        self.signature.len()
    }

    pub fn dim(&self) -> usize {
        2 * (self.n() - 1)
    }

    pub fn alias(&self) -> &'static str {
        tao_wu_alias(&self.signature)
    }

    pub fn t_bounds(&self) -> Vec<Bounds> {
        self.t_ranges.iter().map(|r| r.bounds()).collect()
    }

    /// Whether the gaps and ratios of `x` lie strictly inside this region's
    /// bounds. Only the bounds are consulted, never the signature.
    pub fn within_bounds(&self, x: &ParamVector) -> bool {
        let n = self.n();
        if x.n() != n {
            return false;
        }
        let thetas = x.full_thetas();
        let cosines: Vec<f64> = thetas.iter().map(|t| 2.0 * t.cos()).collect();
        for (k, b) in self.theta_bounds.iter().enumerate() {
            let ctx = EvalCtx { thetas: &thetas[..k], cosines: &cosines[..k], ratios: &[] };
            let (lo, hi) = b.eval(&ctx);
            if !(thetas[k] > lo && thetas[k] < hi) {
                return false;
            }
        }
        for (k, r) in self.t_ranges.iter().enumerate() {
            let ctx = EvalCtx { thetas: &thetas, cosines: &cosines, ratios: &x.ts[..k] };
            let (lo, hi) = r.bounds().eval(&ctx);
            if !(x.ts[k] > lo && x.ts[k] < hi) {
                return false;
            }
        }
        true
    }

    /// Draws a point sequentially inside the bounds: each variable uniform on
    /// its interval given the earlier ones (ratios on (0, ∞) via t = tan(πv/2)).
    /// Returns the point and every interval length met along the way.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> (ParamVector, Vec<f64>) {
        let n = self.n();
        let m = n - 1;
        let mut lengths = Vec::with_capacity(2 * m);
        let mut thetas = Vec::with_capacity(n);
        for b in &self.theta_bounds {
            let k = thetas.len();
            let cos: Vec<f64> = thetas.iter().map(|t: &f64| 2.0 * t.cos()).collect();
            let ctx = EvalCtx { thetas: &thetas, cosines: &cos[..k], ratios: &[] };
            let (lo, hi) = b.eval(&ctx);
            lengths.push(hi - lo);
            thetas.push(lo + rng.random::<f64>() * (hi - lo));
        }
        let mut full = thetas.clone();
        full.push(TAU - thetas.iter().sum::<f64>());
        let cosines: Vec<f64> = full.iter().map(|t| 2.0 * t.cos()).collect();
        let mut ts: Vec<f64> = Vec::with_capacity(m);
        for r in &self.t_ranges {
            let ctx = EvalCtx { thetas: &full, cosines: &cosines, ratios: &ts };
            let (lo, hi) = r.bounds().eval(&ctx);
            lengths.push(hi - lo);
            let v: f64 = rng.random();
            let t = if hi.is_infinite() {
                lo + (0.5 * PI * v).tan()
            } else {
                lo + v * (hi - lo)
            };
            ts.push(t);
        }
        let theta = rng.random::<f64>() * TAU;
        let r = 0.5 + 1.5 * rng.random::<f64>();
        (ParamVector::new(theta, thetas, r, ts), lengths)
    }
}

fn finite_range(index: usize) -> RatioRange {
    RatioRange::Cosine { index }
}

/// Ratio bounds for the all-acute pentagon, obtained by slicing the box
/// log t_i ∈ [log c_i, −log c_i] (i = 1..n) along Σ log t_i = 0.
///
/// ℓ_k exponentiates to ∏_{i>k} c_i / ∏_{i<k} t_i and u_k to
/// 1 / (∏_{i<k} t_i ∏_{i>k} c_i).
pub fn log_slice_ratio_bounds(k: usize, n: usize) -> Bounds {
    let mut low_factors: Vec<BoundExpr> = (k + 1..=n).map(BoundExpr::cos2).collect();
    low_factors.extend((1..k).map(|j| BoundExpr::recip(BoundExpr::ratio(j))));
    let mut high_factors: Vec<BoundExpr> = (1..k).map(BoundExpr::ratio).collect();
    high_factors.extend((k + 1..=n).map(BoundExpr::cos2));
    Bounds::new(
        BoundExpr::max(vec![BoundExpr::cos2(k), BoundExpr::product(low_factors)]),
        BoundExpr::min(vec![
            BoundExpr::recip(BoundExpr::cos2(k)),
            BoundExpr::recip(BoundExpr::product(high_factors)),
        ]),
    )
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn spec(
    sig: &str,
    multiplicity: u32,
    theta_bounds: Vec<Bounds>,
    t_ranges: Vec<RatioRange>,
    w_variant: WVariant,
) -> RegionSpec {
    let signature: QuadrantSignature = sig.parse().expect("catalog signature");
    let n = signature.len();
    assert_eq!(theta_bounds.len(), n - 1);
    assert_eq!(t_ranges.len(), n - 1);
    RegionSpec {
        signature,
        multiplicity,
        theta_bounds,
        t_ranges,
        weight_exponents: (1..n).map(|i| (2 * (n - i) - 1) as i32).collect(),
        w_variant,
        prefactor: factorial(n - 1) * PI / n as f64,
    }
}

fn build_catalog() -> Vec<RegionSpec> {
    use BoundExpr as E;
    let b = Bounds::new;
    let quad_i = || b(E::pi(1, 3), E::pi(1, 2));
    let quad_ii = || b(E::pi(1, 2), E::pi(1, 1));
    let unbounded = || RatioRange::Unbounded;
    vec![
        spec("I,IV", 2, vec![quad_i()], vec![finite_range(1)], WVariant::Pair),
        spec("II,III", 2, vec![quad_ii()], vec![unbounded()], WVariant::Pair),
        spec(
            "I,I,III",
            3,
            vec![quad_i(), quad_i()],
            vec![finite_range(1), finite_range(2)],
            WVariant::TripleReflex,
        ),
        spec(
            "I,II,II",
            3,
            vec![quad_i(), b(E::pi_minus_thetas(1, 1, &[1]), E::pi(1, 1))],
            vec![finite_range(1), unbounded()],
            WVariant::TripleInterior,
        ),
        spec(
            "I,II,III",
            6,
            vec![quad_i(), b(E::pi(1, 2), E::pi_minus_thetas(1, 1, &[1]))],
            vec![finite_range(1), unbounded()],
            WVariant::TripleReflex,
        ),
        spec(
            "II,II,II",
            1,
            vec![quad_ii(), b(E::pi(1, 2), E::pi_minus_thetas(3, 2, &[1]))],
            vec![unbounded(), unbounded()],
            WVariant::TripleInterior,
        ),
        spec(
            "I,I,I,II",
            4,
            vec![quad_i(), quad_i(), quad_i()],
            vec![finite_range(1), finite_range(2), finite_range(3)],
            WVariant::Interior,
        ),
        spec(
            "I,I,II,II",
            4,
            vec![quad_i(), quad_i(), b(E::pi(1, 2), E::pi_minus_thetas(3, 2, &[1, 2]))],
            vec![finite_range(1), finite_range(2), unbounded()],
            WVariant::Interior,
        ),
        spec(
            "I,II,I,II",
            2,
            vec![
                quad_i(),
                b(E::pi(1, 2), E::pi_minus_thetas(7, 6, &[1])),
                b(E::pi(1, 3), E::min(vec![E::pi(1, 2), E::pi_minus_thetas(3, 2, &[1, 2])])),
            ],
            vec![finite_range(1), unbounded(), finite_range(3)],
            WVariant::Interior,
        ),
        spec(
            "I,II,II,II",
            4,
            vec![
                quad_i(),
                b(E::pi(1, 2), E::pi_minus_thetas(1, 1, &[1])),
                b(E::pi(1, 2), E::pi_minus_thetas(3, 2, &[1, 2])),
            ],
            vec![finite_range(1), unbounded(), unbounded()],
            WVariant::Interior,
        ),
        spec(
            "I,I,I,I,I",
            1,
            vec![
                quad_i(),
                quad_i(),
                b(E::pi(1, 3), E::min(vec![E::pi(1, 2), E::pi_minus_thetas(4, 3, &[1, 2])])),
                b(
                    E::max(vec![E::pi(1, 3), E::pi_minus_thetas(3, 2, &[1, 2, 3])]),
                    E::min(vec![E::pi(1, 2), E::pi_minus_thetas(5, 3, &[1, 2, 3])]),
                ),
            ],
            (1..=4).map(|k| RatioRange::Coupled { bounds: log_slice_ratio_bounds(k, 5) }).collect(),
            WVariant::Interior,
        ),
        spec(
            "I,I,I,I,II",
            5,
            vec![
                quad_i(),
                b(E::pi(1, 3), E::pi_minus_thetas(5, 6, &[1])),
                b(E::pi(1, 3), E::pi_minus_thetas(7, 6, &[1, 2])),
                b(E::pi(1, 3), E::pi_minus_thetas(3, 2, &[1, 2, 3])),
            ],
            (1..=4).map(finite_range).collect(),
            WVariant::Interior,
        ),
    ]
}

/// The twelve regions, in the order they appear in c_2..c_5.
pub fn region_catalog() -> &'static [RegionSpec] {
    static CATALOG: OnceLock<Vec<RegionSpec>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

pub fn find_region(signature: &QuadrantSignature) -> Option<&'static RegionSpec> {
    region_catalog().iter().find(|r| &r.signature == signature)
}

/// The region whose dihedral class contains `signature`.
pub fn catalog_class_of(signature: &QuadrantSignature) -> Option<&'static RegionSpec> {
    region_catalog()
        .iter()
        .find(|r| r.signature.len() == signature.len() && r.signature.dihedral_orbit().contains(signature))
}

/// (n−1)!·π·W^{−n}: the θ and r integrals done in closed form.
pub fn radial_reduce(n: usize, w: f64) -> f64 {
    factorial(n.saturating_sub(1)) * PI * w.powi(-(n as i32))
}

/// The integrand left after integrating out θ and r, at free gaps `thetas`
/// and ratios `ts`.
pub fn reduced_integrand(spec: &RegionSpec, thetas: &[f64], ts: &[f64]) -> Result<f64, RegionError> {
    let n = spec.n();
    if thetas.len() != n - 1 || ts.len() != n - 1 {
        return Err(GeometryError::ParameterCount { expected: n - 1, got: thetas.len().min(ts.len()) }
            .into());
    }
    for &t in ts {
        if !(t > 0.0 && t.is_finite()) {
            return Err(GeometryError::NonPositiveRatio(t).into());
        }
    }
    let (full_th, full_t) = crate::geometry::complete_parameters(thetas, ts);
    for &th in &full_th {
        if !(th > 0.0 && th < TAU) {
            return Err(GeometryError::AngleOutOfRange(th).into());
        }
    }
    let w = w_closed_form(spec.w_variant, &full_th, &full_t);
    if !(w > 0.0 && w.is_finite()) {
        return Err(GeometryError::UnsupportedAngles(full_th).into());
    }
    let weight: f64 = ts.iter().zip(&spec.weight_exponents).map(|(t, &e)| t.powi(e)).product();
    Ok(spec.prefactor * weight * w.powi(-(n as i32)))
}

/// Outcome of sampling a region's bounds for collapsed intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    pub signature: QuadrantSignature,
    pub samples: usize,
    pub min_theta_length: f64,
    pub min_ratio_length: f64,
    /// Points at which some downstream interval had nonpositive length.
    pub witnesses: Vec<ParamVector>,
}

impl NondegeneracyReport {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }
}

pub fn assert_nondegenerate<R: Rng + ?Sized>(
    spec: &RegionSpec,
    samples: usize,
    rng: &mut R,
) -> NondegeneracyReport {
    let m = spec.n() - 1;
    let mut min_theta = f64::INFINITY;
    let mut min_ratio = f64::INFINITY;
    let mut witnesses = Vec::new();
    for _ in 0..samples {
        let (x, lengths) = spec.sample_point(rng);
        let (th, tr) = lengths.split_at(m);
        min_theta = th.iter().copied().fold(min_theta, f64::min);
        min_ratio = tr.iter().copied().fold(min_ratio, f64::min);
        if lengths.iter().any(|&l| !(l > 0.0)) && witnesses.len() < 16 {
            witnesses.push(x);
        }
    }
    NondegeneracyReport {
        signature: spec.signature.clone(),
        samples,
        min_theta_length: min_theta,
        min_ratio_length: min_ratio,
        witnesses,
    }
}

/// Audit view of a region: bounds as expression trees plus their rendering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDocument {
    pub signature: QuadrantSignature,
    pub alias: String,
    pub multiplicity: u32,
    pub prefactor: f64,
    pub theta_bounds: Vec<Bounds>,
    pub t_bounds: Vec<Bounds>,
    pub rendered: Vec<String>,
    pub weight_exponents: Vec<i32>,
    pub w_variant: WVariant,
}

impl From<&RegionSpec> for RegionDocument {
    fn from(s: &RegionSpec) -> Self {
        let t_bounds = s.t_bounds();
        let mut rendered = Vec::new();
        for (k, b) in s.theta_bounds.iter().enumerate() {
            rendered.push(format!("θ{} ∈ {}", k + 1, b));
        }
        for (k, b) in t_bounds.iter().enumerate() {
            rendered.push(format!("t{} ∈ {} weight t{}^{}", k + 1, b, k + 1, s.weight_exponents[k]));
        }
        RegionDocument {
            signature: s.signature.clone(),
            alias: s.alias().to_string(),
            multiplicity: s.multiplicity,
            prefactor: s.prefactor,
            theta_bounds: s.theta_bounds.clone(),
            t_bounds,
            rendered,
            weight_exponents: s.weight_exponents.clone(),
            w_variant: s.w_variant,
        }
    }
}

pub fn catalog_document() -> Vec<RegionDocument> {
    region_catalog().iter().map(RegionDocument::from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sig(s: &str) -> QuadrantSignature {
        s.parse().unwrap()
    }

    #[test]
    fn catalog_has_twelve_regions_with_printed_multiplicities() {
        let cat = region_catalog();
        assert_eq!(cat.len(), 12);
        let mults: Vec<u32> = cat.iter().map(|r| r.multiplicity).collect();
        assert_eq!(mults, vec![2, 2, 3, 3, 6, 1, 4, 4, 2, 4, 1, 5]);
    }

    #[test]
    fn multiplicity_is_dihedral_orbit_size() {
        for r in region_catalog() {
            assert_eq!(r.signature.dihedral_orbit().len() as u32, r.multiplicity, "{}", r.signature);
        }
    }

    #[test]
    fn i_iv_spec() {
        let r = find_region(&sig("I,IV")).unwrap();
        assert_eq!(r.theta_bounds[0].to_string(), "(π/3, π/2)");
        assert_eq!(r.t_bounds()[0].to_string(), "(c1, 1/c1)");
        assert_eq!(r.weight_exponents, vec![1]);
        assert!((r.prefactor - PI / 2.0).abs() < 1e-15);
        assert_eq!(r.multiplicity, 2);
    }

    #[test]
    fn ii_ii_ii_spec() {
        let r = find_region(&sig("II,II,II")).unwrap();
        assert_eq!(r.theta_bounds[0].to_string(), "(π/2, π)");
        assert_eq!(r.theta_bounds[1].to_string(), "(π/2, 3π/2 − θ1)");
        assert_eq!(r.t_bounds()[0].to_string(), "(0, ∞)");
        assert_eq!(r.t_bounds()[1].to_string(), "(0, ∞)");
        assert_eq!(r.weight_exponents, vec![3, 1]);
        assert_eq!(r.multiplicity, 1);
    }

    #[test]
    fn i_i_i_i_ii_spec() {
        let r = find_region(&sig("I,I,I,I,II")).unwrap();
        assert_eq!(r.theta_bounds[3].upper.to_string(), "3π/2 − θ1 − θ2 − θ3");
        for (k, b) in r.t_bounds().iter().enumerate() {
            assert_eq!(b.to_string(), format!("(c{0}, 1/c{0})", k + 1));
        }
        assert_eq!(r.multiplicity, 5);
        assert_eq!(r.weight_exponents, vec![7, 5, 3, 1]);
    }

    #[test]
    fn pentagon_ratio_bounds_render_as_coupled_max_min() {
        let r = find_region(&sig("I,I,I,I,I")).unwrap();
        let tb = r.t_bounds();
        assert_eq!(tb[0].to_string(), "(max{c1, c2c3c4c5}, min{1/c1, 1/(c2c3c4c5)})");
        assert_eq!(tb[1].to_string(), "(max{c2, c3c4c5/t1}, min{1/c2, 1/(t1c3c4c5)})");
        assert_eq!(tb[3].to_string(), "(max{c4, c5/(t1t2t3)}, min{1/c4, 1/(t1t2t3c5)})");
        assert_eq!(
            r.theta_bounds[3].to_string(),
            "(max{π/3, 3π/2 − θ1 − θ2 − θ3}, min{π/2, 5π/3 − θ1 − θ2 − θ3})"
        );
    }

    #[test]
    fn pentagon_ratio_bounds_equal_log_slices() {
        let r = find_region(&sig("I,I,I,I,I")).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let (x, _) = r.sample_point(&mut rng);
            let full = x.full_thetas();
            let cos: Vec<f64> = full.iter().map(|t| 2.0 * t.cos()).collect();
            let a: Vec<f64> = cos.iter().map(|c| c.ln()).collect();
            let b: Vec<f64> = a.iter().map(|v| -v).collect();
            for k in 1..=4 {
                let y: Vec<f64> = x.ts[..k - 1].iter().map(|t| t.ln()).collect();
                let s = BoxSliceInterval { a: a.clone(), b: b.clone(), c: 0.0, k, y };
                let (lo, hi) = s.slice_interval().unwrap();
                let ctx = EvalCtx { thetas: &full, cosines: &cos, ratios: &x.ts[..k - 1] };
                let (elo, ehi) = r.t_bounds()[k - 1].eval(&ctx);
                assert!((lo.exp() - elo).abs() <= 1e-12 * elo.abs().max(1.0));
                assert!((hi.exp() - ehi).abs() <= 1e-12 * ehi.abs().max(1.0));
            }
        }
    }

    #[test]
    fn signature_parsing_and_display() {
        let s = sig("(I, II ,III)");
        assert_eq!(s.to_string(), "I,II,III");
        assert!("I,V".parse::<QuadrantSignature>().is_err());
        assert!("I".parse::<QuadrantSignature>().is_err());
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "\"I,II,III\"");
    }

    #[test]
    fn radial_reduce_examples() {
        assert!((radial_reduce(1, PI) - 1.0).abs() < 1e-15);
        assert!((radial_reduce(2, PI) - 1.0 / PI).abs() < 1e-15);
        assert!((radial_reduce(3, 1.0) - TAU).abs() < 1e-15);
    }

    #[test]
    fn reduced_integrand_examples() {
        let r = find_region(&sig("II,III")).unwrap();
        let v = reduced_integrand(r, &[PI], &[1.0]).unwrap();
        assert!((v - 1.0 / (8.0 * PI)).abs() < 1e-15);

        let r = find_region(&sig("I,IV")).unwrap();
        let v = reduced_integrand(r, &[1.5], &[1.0]).unwrap();
        let w = crate::geometry::union_area_w(2, &[1.5], &[1.0]).unwrap();
        assert!((v - 0.5 * PI * w.powi(-2)).abs() < 1e-15);
        assert!(reduced_integrand(r, &[1.5], &[-1.0]).is_err());
    }

    #[test]
    fn reduced_integrand_positive_inside_every_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for r in region_catalog() {
            for _ in 0..200 {
                let (x, _) = r.sample_point(&mut rng);
                let v = reduced_integrand(r, &x.thetas, &x.ts).unwrap();
                assert!(v > 0.0 && v.is_finite(), "{} at {:?}", r.signature, x);
            }
        }
    }

    #[test]
    fn samples_lie_within_bounds_and_match_signature() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for r in region_catalog() {
            for _ in 0..500 {
                let (x, _) = r.sample_point(&mut rng);
                assert!(r.within_bounds(&x), "{}", r.signature);
                assert_eq!(QuadrantSignature::of_gaps(&x.full_thetas()), r.signature);
            }
        }
    }

    #[test]
    fn nondegeneracy_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = find_region(&sig("I,IV")).unwrap();
        let rep = assert_nondegenerate(r, 1000, &mut rng);
        assert!(rep.passed());
        assert!((rep.min_theta_length - PI / 6.0).abs() < 1e-15);
        let r = find_region(&sig("II,II,II")).unwrap();
        let rep = assert_nondegenerate(r, 1000, &mut rng);
        assert!(rep.passed() && rep.min_theta_length > 0.0);
    }

    #[test]
    fn class_lookup_covers_rotations_and_reflections() {
        let s = sig("III,I,II");
        assert_eq!(catalog_class_of(&s).unwrap().signature, sig("I,II,III"));
        let s = sig("II,I,I,I,I");
        assert_eq!(catalog_class_of(&s).unwrap().signature, sig("I,I,I,I,II"));
        assert!(catalog_class_of(&sig("III,III")).is_none());
    }

    #[test]
    fn document_serializes() {
        let doc = catalog_document();
        let s = serde_json::to_string_pretty(&doc).unwrap();
        let back: Vec<RegionDocument> = serde_json::from_str(&s).unwrap();
        assert_eq!(doc, back);
        assert!(s.contains("\"I,I,I,I,I\""));
    }
}
