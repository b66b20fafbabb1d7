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

//! Planar points, sniping predicates and areas of unions of disks.
//!
//! Two independent routes to the area of a union of shooting disks live
//! here: the closed forms [`union_area_w`] (valid inside the integration
//! regions, first point normalized to unit magnitude) and the general
//! arc-boundary oracle [`union_area_oracle`].

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sum::CompensatedSum;

/// Absolute tolerance used for circle intersection topology.
pub const TOPOLOGY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("angle {0} outside (0, 2π)")]
    AngleOutOfRange(f64),
    #[error("ratio t = {0} must be positive and finite")]
    NonPositiveRatio(f64),
    #[error("unsupported number of disks n = {0}")]
    UnsupportedCount(usize),
    #[error("expected {expected} angle/ratio parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error("unsupported angle pattern {0:?} for the closed-form union area")]
    UnsupportedAngles(Vec<f64>),
    #[error("disk radius {0} must be positive and finite")]
    BadRadius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const ORIGIN: PlanarPoint = PlanarPoint { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(magnitude: f64, argument: f64) -> Self {
        let (s, c) = argument.sin_cos();
        Self::new(magnitude * c, magnitude * s)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist_sq(self, other: PlanarPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Argument in `[0, 2π)`.
    pub fn argument(self) -> f64 {
        let a = self.y.atan2(self.x);
        let a = if a < 0.0 { a + TAU } else { a };
        if a >= TAU {
            0.0
        } else {
            a
        }
    }

    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn scaled(self, k: f64) -> Self {
        Self::new(k * self.x, k * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// An ordered tuple of snipers near the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub points: Vec<PlanarPoint>,
}

impl Configuration {
    pub fn new(points: Vec<PlanarPoint>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Cyclic relabeling starting at `start`.
    pub fn rotation(&self, start: usize) -> Configuration {
        let n = self.points.len();
        Configuration::new((0..n).map(|i| self.points[(start + i) % n]).collect())
    }

    /// Reflection across the x-axis, relabeled so the result is again
    /// counterclockwise when the input was.
    pub fn mirrored(&self) -> Configuration {
        let mut pts: Vec<PlanarPoint> =
            self.points.iter().map(|p| PlanarPoint::new(p.x, -p.y)).collect();
        pts.reverse();
        Configuration::new(pts)
    }

    /// Sorts the points by argument, giving the counterclockwise labeling
    /// that starts at the smallest argument.
    pub fn counterclockwise(points: &[PlanarPoint]) -> Configuration {
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.argument().total_cmp(&b.argument()));
        Configuration::new(pts)
    }

    pub fn disks(&self) -> Vec<Disk> {
        self.points.iter().map(|&p| Disk::shooting(p)).collect()
    }
}

/// A closed disk. Shooting disks have `radius == |center|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: PlanarPoint,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: PlanarPoint, radius: f64) -> Self {
        Self { center, radius }
    }

    /// The disk centered at `p` passing through the origin.
    pub fn shooting(p: PlanarPoint) -> Self {
        Self { center: p, radius: p.norm() }
    }
}

/// Triangle angles of the pair (r_i, r_{i+1}) with |r_i| = 1, |r_{i+1}| = t
/// and angle θ between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleDecomposition {
    pub theta_prime: f64,
    /// Angle at the unit-magnitude vertex.
    pub alpha: f64,
    /// Angle at the vertex of magnitude `t`.
    pub beta: f64,
}

/// Angles plus the `cos·sin` products that enter the area formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PairTerms {
    pub alpha: f64,
    pub beta: f64,
    pub cs_alpha: f64,
    pub cs_beta: f64,
}

/// The triangle with sides 1 and `t` enclosing `theta`.
///
/// The angles equal `arcsin(t sin θ' / chord)` and `arcsin(sin θ' / chord)`.
/// They are evaluated with `atan2` and folded into `[0, π/2]`, which is the
/// same function without the loss of precision arcsin suffers near 1.
#[inline]
pub(crate) fn pair_terms(theta: f64, t: f64) -> PairTerms {
    let (s, c) = theta.sin_cos();
    pair_terms_sc(s, c, t)
}

/// `pair_terms` from sin θ and cos θ.
#[inline]
pub(crate) fn pair_terms_sc(sin: f64, cos: f64, t: f64) -> PairTerms {
    let s = sin.abs();
    let c = cos;
    let chord_sq = 1.0 + t * t - 2.0 * t * c;
    // alpha: opposite side t·sinθ', adjacent 1 − t·cosθ'
    let ya = t * s;
    let xa = 1.0 - t * c;
    // beta: opposite side sinθ', adjacent t − cosθ'
    let yb = s;
    let xb = t - c;
    let fold = |a: f64| if a > FRAC_PI_2 { PI - a } else { a };
    PairTerms {
        alpha: fold(ya.atan2(xa)),
        beta: fold(yb.atan2(xb)),
        cs_alpha: ya * xa.abs() / chord_sq,
        cs_beta: yb * xb.abs() / chord_sq,
    }
}

/// Whether the arcsin formulas return the true (acute) triangle angles:
/// `t·cos θ' < 1` and `t > cos θ'`.
#[inline]
pub fn branch_valid(theta: f64, t: f64) -> bool {
    let c = theta.cos();
    t * c < 1.0 && t > c
}

pub fn chord_params(theta: f64, t: f64) -> Result<AngleDecomposition, GeometryError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(GeometryError::NonPositiveRatio(t));
    }
    if !(theta > 0.0 && theta < TAU) {
        return Err(GeometryError::AngleOutOfRange(theta));
    }
    let p = pair_terms(theta, t);
    Ok(AngleDecomposition {
        theta_prime: theta.min(TAU - theta),
        alpha: p.alpha,
        beta: p.beta,
    })
}

/// Which closed form for the normalized union area applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WVariant {
    /// Two disks; reflex angles handled through θ'.
    Pair,
    /// Three disks, every gap below π.
    TripleInterior,
    /// Three disks, θ_1, θ_2 < π < θ_3.
    TripleReflex,
    /// n ∈ {4, 5} disks, every gap below π.
    Interior,
}

impl WVariant {
    /// The closed form that applies to a full list of gaps θ_1..θ_n.
    pub fn select(full_thetas: &[f64]) -> Result<WVariant, GeometryError> {
        let n = full_thetas.len();
        let interior = full_thetas.iter().all(|&th| th > 0.0 && th <= PI);
        match n {
            2 => Ok(WVariant::Pair),
            3 if interior => Ok(WVariant::TripleInterior),
            3 if full_thetas[0] > 0.0
                && full_thetas[0] < PI
                && full_thetas[1] > 0.0
                && full_thetas[1] < PI
                && full_thetas[2] > PI
                && full_thetas[2] < TAU =>
            {
                Ok(WVariant::TripleReflex)
            }
            4 | 5 if interior => Ok(WVariant::Interior),
            3..=5 => Err(GeometryError::UnsupportedAngles(full_thetas.to_vec())),
            _ => Err(GeometryError::UnsupportedCount(n)),
        }
    }
}

/// Closed-form union area from the complete gap and ratio lists
/// (θ_1..θ_n, t_1..t_n, including the derived last entries).
#[inline]
pub(crate) fn w_closed_form(variant: WVariant, thetas: &[f64], ts: &[f64]) -> f64 {
    let n = thetas.len();
    debug_assert_eq!(n, ts.len());
    let mut terms = [PairTerms { alpha: 0.0, beta: 0.0, cs_alpha: 0.0, cs_beta: 0.0 }; 5];
    for i in 0..n {
        terms[i] = pair_terms(thetas[i], ts[i]);
    }
    w_from_terms(variant, &terms[..n], ts)
}

/// The closed forms in terms of the per-gap triangle quantities.
#[inline]
pub(crate) fn w_from_terms(variant: WVariant, terms: &[PairTerms], ts: &[f64]) -> f64 {
    let n = terms.len();
    match variant {
        WVariant::Pair => {
            let p = &terms[0];
            let t2 = ts[0] * ts[0];
            (PI - p.alpha) + (PI - p.beta) * t2 + p.cs_alpha + t2 * p.cs_beta
        }
        WVariant::TripleReflex => {
            let (p1, p2) = (&terms[0], &terms[1]);
            let s1 = ts[0] * ts[0];
            let s2 = s1 * ts[1] * ts[1];
            (PI - p1.alpha)
                + (PI - p2.alpha - p1.beta) * s1
                + (PI - p2.beta) * s2
                + p1.cs_alpha
                + s1 * p1.cs_beta
                + s1 * p2.cs_alpha
                + s2 * p2.cs_beta
        }
        WVariant::TripleInterior | WVariant::Interior => {
            let mut total = 0.0;
            let mut scale = 1.0;
            for i in 0..n {
                let prev = &terms[(i + n - 1) % n];
                let cur = &terms[i];
                total += (PI - cur.alpha - prev.beta + cur.cs_alpha + prev.cs_beta) * scale;
                scale *= ts[i] * ts[i];
            }
            total
        }
    }
}

/// Appends the derived gap θ_n = 2π − Σθ_i and ratio t_n = 1/∏t_i.
pub fn complete_parameters(thetas: &[f64], ts: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut th = thetas.to_vec();
    th.push(TAU - thetas.iter().sum::<f64>());
    let mut tt = ts.to_vec();
    tt.push(1.0 / ts.iter().product::<f64>());
    (th, tt)
}

/// Area of the union of the n shooting disks when |r_1| = 1, in closed form.
///
/// `thetas` and `ts` hold the n − 1 free gaps and ratios.
pub fn union_area_w(n: usize, thetas: &[f64], ts: &[f64]) -> Result<f64, GeometryError> {
    if !(2..=5).contains(&n) {
        return Err(GeometryError::UnsupportedCount(n));
    }
    if thetas.len() != n - 1 || ts.len() != n - 1 {
        return Err(GeometryError::ParameterCount {
            expected: n - 1,
            got: thetas.len().min(ts.len()),
        });
    }
    for &t in ts {
        if !(t > 0.0 && t.is_finite()) {
            return Err(GeometryError::NonPositiveRatio(t));
        }
    }
    let (full_th, full_t) = complete_parameters(thetas, ts);
    for &th in &full_th {
        if !(th > 0.0 && th < TAU) {
            return Err(GeometryError::AngleOutOfRange(th));
        }
    }
    let variant = WVariant::select(&full_th)?;
    Ok(w_closed_form(variant, &full_th, &full_t))
}

/// Exact area of a union of disks by walking the boundary arcs.
///
/// Every circle is cut at its intersections with the others; a sub-arc is on
/// the union boundary when its midpoint lies outside every other disk. The
/// area then follows from Green's theorem over those arcs.
pub fn union_area_oracle(disks: &[Disk]) -> Result<f64, GeometryError> {
    for d in disks {
        if !(d.radius > 0.0 && d.radius.is_finite()) || !d.center.is_finite() {
            return Err(GeometryError::BadRadius(d.radius));
        }
    }
    // Deduplicate coincident circles.
    let mut unique: Vec<Disk> = Vec::with_capacity(disks.len());
    for d in disks {
        let dup = unique.iter().any(|u| {
            u.center.dist_sq(d.center).sqrt() <= TOPOLOGY_TOL
                && (u.radius - d.radius).abs() <= TOPOLOGY_TOL
        });
        if !dup {
            unique.push(*d);
        }
    }
    // Drop disks contained in another one.
    let kept: Vec<Disk> = unique
        .iter()
        .enumerate()
        .filter(|&(i, d)| {
            !unique.iter().enumerate().any(|(j, e)| {
                j != i && d.center.dist_sq(e.center).sqrt() + d.radius <= e.radius + TOPOLOGY_TOL
            })
        })
        .map(|(_, d)| *d)
        .collect();

    let mut area = CompensatedSum::new();
    let mut cuts: Vec<f64> = Vec::new();
    for (i, d) in kept.iter().enumerate() {
        cuts.clear();
        for (j, e) in kept.iter().enumerate() {
            if i == j {
                continue;
            }
            let dx = e.center.x - d.center.x;
            let dy = e.center.y - d.center.y;
            let dist = dx.hypot(dy);
            if dist >= d.radius + e.radius + TOPOLOGY_TOL
                || dist <= (d.radius - e.radius).abs() - TOPOLOGY_TOL
            {
                continue;
            }
            let base = dy.atan2(dx);
            let along = (d.radius * d.radius - e.radius * e.radius + dist * dist) / (2.0 * dist);
            let ratio = (along / d.radius).clamp(-1.0, 1.0);
            let half = ratio.acos();
            if half * d.radius <= TOPOLOGY_TOL {
                cuts.push(base.rem_euclid(TAU));
            } else {
                cuts.push((base - half).rem_euclid(TAU));
                cuts.push((base + half).rem_euclid(TAU));
            }
        }
        if cuts.is_empty() {
            area.add(PI * d.radius * d.radius);
            continue;
        }
        cuts.sort_by(f64::total_cmp);
        let m = cuts.len();
        for k in 0..m {
            let a = cuts[k];
            let b = if k + 1 < m { cuts[k + 1] } else { cuts[0] + TAU };
            if b - a <= 0.0 {
                continue;
            }
            let mid = 0.5 * (a + b);
            let p = PlanarPoint::new(d.center.x + d.radius * mid.cos(), d.center.y + d.radius * mid.sin());
            let covered = kept.iter().enumerate().any(|(j, e)| {
                j != i && p.dist_sq(e.center) < e.radius * e.radius
            });
            if covered {
                continue;
            }
            area.add(arc_green_term(d, a, b));
        }
    }
    Ok(area.value())
}

/// ½∮(x dy − y dx) along the counterclockwise arc from angle `a` to `b`.
fn arc_green_term(d: &Disk, a: f64, b: f64) -> f64 {
    let r = d.radius;
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    0.5 * (r * r * (b - a) + d.center.x * r * (sb - sa) - d.center.y * r * (cb - ca))
}

/// Every pair is farther apart than either point is from the origin.
pub fn closer_to_origin_than_each_other(config: &Configuration) -> bool {
    first_failing_pair(config).is_none()
}

/// Slack, relative to |p||q|, under which a pair counts as tied.
pub const TIE_REL_TOL: f64 = 1e-12;

/// |p − q|² − max(|p|², |q|²) written without cancellation: with |p| ≤ |q|
/// it equals |p|² − 2 p·q.
fn pair_margin(p: PlanarPoint, q: PlanarPoint) -> (f64, f64) {
    let (small, large) = if p.norm_sq() <= q.norm_sq() { (p, q) } else { (q, p) };
    let dot = small.x * large.x + small.y * large.y;
    (small.norm_sq() - 2.0 * dot, 2.0 * small.norm() * large.norm())
}

/// The first pair (i, j), i < j, violating the pairwise sniping condition.
/// Ties, including those blurred by rounding, count as violations.
pub fn first_failing_pair(config: &Configuration) -> Option<(usize, usize)> {
    let pts = &config.points;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (margin, scale) = pair_margin(pts[i], pts[j]);
            if !(margin > scale * TIE_REL_TOL) {
                return Some((i, j));
            }
        }
    }
    None
}

/// `p`'s nearest neighbor among `others` and the origin is strictly the origin.
pub fn shoots_origin(p: PlanarPoint, others: &[PlanarPoint]) -> bool {
    let r2 = p.norm_sq();
    others.iter().all(|&q| p.dist_sq(q) > r2)
}
