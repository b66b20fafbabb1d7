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

//! Polar change of variables for counterclockwise sniper tuples.
//!
//! A tuple (r_1, ..., r_n) is described by the argument θ and magnitude r of
//! r_1 together with the consecutive angle gaps θ_i and magnitude ratios t_i.
//! The last gap and ratio are derived: θ_n = 2π − Σθ_i and t_n = 1/∏t_i.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Configuration, PlanarPoint};

/// Points within this distance of a constraint boundary count as outside
/// the (open) region.
pub const BOUNDARY_TOL: f64 = 1e-12;

const FIVE_PI_3: f64 = 5.0 * FRAC_PI_3;
const THREE_PI_2: f64 = 3.0 * FRAC_PI_2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("configuration is empty")]
    Empty,
    #[error("point {0} is at the origin")]
    ZeroPoint(usize),
    #[error("points {0} and {1} share an argument")]
    SharedArgument(usize, usize),
    #[error("points are not in counterclockwise order within one turn")]
    NotCounterclockwise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    /// Argument of r_1.
    pub theta: f64,
    /// Gaps θ_1..θ_{n−1}.
    pub thetas: Vec<f64>,
    /// Magnitude of r_1.
    pub r: f64,
    /// Ratios t_1..t_{n−1}.
    pub ts: Vec<f64>,
}

impl ParamVector {
    pub fn new(theta: f64, thetas: Vec<f64>, r: f64, ts: Vec<f64>) -> Self {
        assert_eq!(thetas.len(), ts.len(), "gap and ratio counts differ");
        Self { theta, thetas, r, ts }
    }

    pub fn n(&self) -> usize {
        self.thetas.len() + 1
    }

    pub fn theta_n(&self) -> f64 {
        TAU - self.thetas.iter().sum::<f64>()
    }

    pub fn t_n(&self) -> f64 {
        1.0 / self.ts.iter().product::<f64>()
    }

    /// θ_1..θ_n including the derived gap.
    pub fn full_thetas(&self) -> Vec<f64> {
        let mut v = self.thetas.clone();
        v.push(self.theta_n());
        v
    }

    /// t_1..t_n including the derived ratio.
    pub fn full_ts(&self) -> Vec<f64> {
        let mut v = self.ts.clone();
        v.push(self.t_n());
        v
    }

    /// The tuple whose i-th point has argument θ + Σ_{k<i} θ_k and
    /// magnitude r·∏_{k<i} t_k. Defined for any input, in X or not.
    pub fn forward_map(&self) -> Configuration {
        let mut points = Vec::with_capacity(self.n());
        let mut arg = self.theta;
        let mut mag = self.r;
        points.push(PlanarPoint::from_polar(mag, arg));
        for (th, t) in self.thetas.iter().zip(&self.ts) {
            arg += th;
            mag *= t;
            points.push(PlanarPoint::from_polar(mag, arg));
        }
        Configuration::new(points)
    }

    /// Flattened (θ, θ_1.., r, t_1..) coordinates.
    pub fn to_coordinates(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.n());
        v.push(self.theta);
        v.extend_from_slice(&self.thetas);
        v.push(self.r);
        v.extend_from_slice(&self.ts);
        v
    }

    pub fn from_coordinates(coords: &[f64]) -> Self {
        assert!(coords.len() >= 2 && coords.len() % 2 == 0);
        let n = coords.len() / 2;
        Self {
            theta: coords[0],
            thetas: coords[1..n].to_vec(),
            r: coords[n],
            ts: coords[n + 1..].to_vec(),
        }
    }

    /// Absolute Jacobian determinant of the forward map:
    /// r^{2n−1} ∏ t_i^{2(n−i)−1}.
    pub fn jacobian_abs_det(&self) -> f64 {
        let n = self.n() as i32;
        let mut det = self.r.powi(2 * n - 1);
        for (i, t) in self.ts.iter().enumerate() {
            det *= t.powi(2 * (n - 1 - i as i32) - 1);
        }
        det.abs()
    }

    /// Membership in the open parameter region X.
    pub fn in_region_x(&self) -> bool {
        if !(self.theta >= 0.0 && self.theta < TAU) {
            return false;
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return false;
        }
        let ths = self.full_thetas();
        let ts = self.full_ts();
        ths.iter().zip(&ts).all(|(&th, &t)| gap_admissible(th, t))
    }
}

/// The per-gap constraints of X for one (θ_i, t_i) pair.
pub fn gap_admissible(theta: f64, t: f64) -> bool {
    if !(theta > FRAC_PI_3 + BOUNDARY_TOL && theta < FIVE_PI_3 - BOUNDARY_TOL) {
        return false;
    }
    if !(t > 0.0 && t.is_finite()) {
        return false;
    }
    let acute = theta < FRAC_PI_2 || theta > THREE_PI_2;
    if acute {
        let c = 2.0 * theta.cos();
        // s_i = min{t, 1/t} must exceed 2cos θ_i
        let s = t.min(1.0 / t);
        if !(s > c + BOUNDARY_TOL) {
            return false;
        }
    }
    true
}

/// Recovers (θ, θ_i, r, t_i) from a counterclockwise tuple of nonzero points.
pub fn inverse_map(config: &Configuration) -> Result<ParamVector, ParamError> {
    let pts = &config.points;
    if pts.is_empty() {
        return Err(ParamError::Empty);
    }
    for (i, p) in pts.iter().enumerate() {
        if p.norm_sq() == 0.0 {
            return Err(ParamError::ZeroPoint(i));
        }
    }
    let theta = pts[0].argument();
    let r = pts[0].norm();
    let mut thetas = Vec::with_capacity(pts.len() - 1);
    let mut ts = Vec::with_capacity(pts.len() - 1);
    for i in 0..pts.len() - 1 {
        let a = pts[i];
        let b = pts[i + 1];
        // signed angle from a to b, reduced into [0, 2π)
        let cross = a.x * b.y - a.y * b.x;
        let dot = a.x * b.x + a.y * b.y;
        let mut gap = cross.atan2(dot);
        if gap < 0.0 {
            gap += TAU;
        }
        if gap >= TAU {
            gap = 0.0;
        }
        if gap == 0.0 {
            return Err(ParamError::SharedArgument(i, i + 1));
        }
        thetas.push(gap);
        ts.push(b.norm() / a.norm());
    }
    if thetas.iter().sum::<f64>() >= TAU {
        return Err(ParamError::NotCounterclockwise);
    }
    Ok(ParamVector { theta, thetas, r, ts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pt_close(a: PlanarPoint, b: PlanarPoint) -> bool {
        (a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12
    }

    #[test]
    fn forward_map_examples() {
        let c = ParamVector::new(0.0, vec![FRAC_PI_2], 1.0, vec![2.0]).forward_map();
        assert!(pt_close(c.points[0], PlanarPoint::new(1.0, 0.0)));
        assert!(pt_close(c.points[1], PlanarPoint::new(0.0, 2.0)));
        let c = ParamVector::new(PI, vec![FRAC_PI_2], 1.0, vec![2.0]).forward_map();
        assert!(pt_close(c.points[0], PlanarPoint::new(-1.0, 0.0)));
        assert!(pt_close(c.points[1], PlanarPoint::new(0.0, -2.0)));
    }

    #[test]
    fn inverse_map_examples() {
        let p = inverse_map(&Configuration::new(vec![
            PlanarPoint::new(1.0, 0.0),
            PlanarPoint::new(0.0, 2.0),
        ]))
        .unwrap();
        assert_eq!(p.theta, 0.0);
        assert!((p.thetas[0] - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(p.r, 1.0);
        assert!((p.ts[0] - 2.0).abs() < 1e-15);

        let single = inverse_map(&Configuration::new(vec![PlanarPoint::new(0.0, 3.0)])).unwrap();
        assert!((single.theta - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(single.r, 3.0);
        assert!(single.thetas.is_empty());
    }

    #[test]
    fn inverse_map_errors() {
        let same = Configuration::new(vec![PlanarPoint::new(1.0, 1.0), PlanarPoint::new(2.0, 2.0)]);
        assert!(matches!(inverse_map(&same), Err(ParamError::SharedArgument(0, 1))));
        let zero = Configuration::new(vec![PlanarPoint::new(1.0, 0.0), PlanarPoint::ORIGIN]);
        assert!(matches!(inverse_map(&zero), Err(ParamError::ZeroPoint(1))));
        // three points going around twice
        let twice = Configuration::new(vec![
            PlanarPoint::from_polar(1.0, 0.0),
            PlanarPoint::from_polar(1.0, 4.0),
            PlanarPoint::from_polar(1.0, 2.0),
        ]);
        assert!(matches!(inverse_map(&twice), Err(ParamError::NotCounterclockwise)));
    }

    #[test]
    fn jacobian_examples() {
        assert_eq!(ParamVector::new(0.0, vec![1.0], 2.0, vec![3.0]).jacobian_abs_det(), 24.0);
        assert_eq!(ParamVector::new(0.0, vec![1.0; 4], 1.0, vec![1.0; 4]).jacobian_abs_det(), 1.0);
        assert_eq!(ParamVector::new(0.0, vec![1.0, 1.0], 1.0, vec![2.0, 3.0]).jacobian_abs_det(), 24.0);
    }

    #[test]
    fn region_x_examples() {
        assert!(ParamVector::new(0.0, vec![FRAC_PI_2], 1.0, vec![7.0]).in_region_x());
        assert!(!ParamVector::new(0.0, vec![5.0 * PI / 12.0], 1.0, vec![5.0]).in_region_x());
        let fig_left = ParamVector::new(0.0, vec![TAU / 5.0; 4], 1.0, vec![1.5; 4]);
        assert!(!fig_left.in_region_x());
        assert!((fig_left.t_n() - (2.0f64 / 3.0).powi(4)).abs() < 1e-15);
    }

    #[test]
    fn boundary_points_are_outside() {
        // θ_1 = π/3 exactly
        assert!(!ParamVector::new(0.0, vec![FRAC_PI_3], 1.0, vec![1.0]).in_region_x());
        // t exactly at 2cos θ
        let th = 1.2;
        let c = 2.0 * f64::cos(th);
        assert!(!ParamVector::new(0.0, vec![th], 1.0, vec![c]).in_region_x());
        assert!(!ParamVector::new(0.0, vec![1.0], 0.0, vec![1.0]).in_region_x());
    }
}
