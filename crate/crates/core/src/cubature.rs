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

//! Adaptive cubature on unit boxes.
//!
//! For d ≥ 2 each box is integrated with the degree-7 Genz–Malik rule and
//! its embedded degree-5 companion; for d = 1 with the 15-point Kronrod rule
//! and its embedded 7-point Gauss rule. The box with the largest error
//! estimate is bisected until the summed error estimate meets the
//! tolerance. Several integrands (pieces) can share one global work list,
//! so the effort goes wherever the total error is largest.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regions::{decompose_region, RegionSpec};
use crate::sum::CompensatedSum;

pub const MAX_DIM: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CubatureError {
    #[error("integrand returned {value} at {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },
    #[error("dimension {0} outside 1..={MAX_DIM}")]
    Dimension(usize),
    #[error("invalid settings: {0}")]
    Settings(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitStrategy {
    WidestDimension,
    #[default]
    LargestErrorDimension,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubatureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evaluations: u64,
    pub split_strategy: SplitStrategy,
}

impl CubatureSettings {
    /// `abs_tol` with no relative tolerance and the default budget for `dim`.
    pub fn new(abs_tol: f64, dim: usize) -> Self {
        CubatureSettings {
            abs_tol,
            rel_tol: 0.0,
            max_evaluations: default_budget(dim),
            split_strategy: SplitStrategy::default(),
        }
    }

    fn validate(&self) -> Result<(), CubatureError> {
        if !(self.abs_tol > 0.0) {
            return Err(CubatureError::Settings(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(CubatureError::Settings(format!("rel_tol must be nonnegative, got {}", self.rel_tol)));
        }
        if self.max_evaluations == 0 {
            return Err(CubatureError::Settings("max_evaluations must be positive".into()));
        }
        Ok(())
    }
}

pub fn default_budget(dim: usize) -> u64 {
    match dim {
        0..=2 => 10_000_000,
        3..=4 => 100_000_000,
        _ => 1_000_000_000,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub evaluations: u64,
    pub subregions: u64,
    /// False when the evaluation budget ran out first.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseEstimate {
    pub total: IntegralEstimate,
    /// Value and error estimate per piece, from the same final box set.
    pub pieces: Vec<(f64, f64)>,
}

const GK_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const G_WEIGHTS: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Weights of the two rules on a box of unit volume.
#[derive(Debug, Clone, Copy)]
struct GenzMalik {
    d: usize,
    l2: f64,
    l3: f64,
    l4: f64,
    l5: f64,
    w7: [f64; 5],
    w5: [f64; 4],
}

impl GenzMalik {
    fn new(d: usize) -> Self {
        let df = d as f64;
        GenzMalik {
            d,
            l2: (9.0f64 / 70.0).sqrt(),
            l3: (9.0f64 / 10.0).sqrt(),
            l4: (9.0f64 / 10.0).sqrt(),
            l5: (9.0f64 / 19.0).sqrt(),
            w7: [
                (12824.0 - 9120.0 * df + 400.0 * df * df) / 19683.0,
                980.0 / 6561.0,
                (1820.0 - 400.0 * df) / 19683.0,
                200.0 / 19683.0,
                6859.0 / 19683.0 / 2f64.powi(d as i32),
            ],
            w5: [
                (729.0 - 950.0 * df + 50.0 * df * df) / 729.0,
                245.0 / 486.0,
                (265.0 - 100.0 * df) / 1458.0,
                25.0 / 729.0,
            ],
        }
    }

    fn points(&self) -> u64 {
        let d = self.d as u64;
        1 + 4 * d + 2 * d * (d - 1) + (1u64 << d)
    }
}

#[derive(Debug, Clone)]
struct Cell {
    piece: usize,
    center: Vec<f64>,
    half: Vec<f64>,
    value: f64,
    error: f64,
    split_dim: usize,
    /// Creation order; breaks ties between equal errors.
    seq: u64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Evaluated {
    value: f64,
    error: f64,
    split_dim: usize,
}

fn checked<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Result<f64, CubatureError> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CubatureError::NonFinite { point: x.to_vec(), value: v })
    }
}

fn widest(half: &[f64]) -> usize {
    let mut best = 0;
    for (i, h) in half.iter().enumerate() {
        if *h > half[best] {
            best = i;
        }
    }
    best
}

fn gauss_kronrod<F: Fn(&[f64]) -> f64>(
    f: &F,
    center: f64,
    half: f64,
) -> Result<Evaluated, CubatureError> {
    let fc = checked(f, &[center])?;
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = G_WEIGHTS[3] * fc;
    for j in 0..7 {
        let dx = half * GK_NODES[j];
        let pair = checked(f, &[center - dx])? + checked(f, &[center + dx])?;
        kronrod += GK_WEIGHTS[j] * pair;
        if j % 2 == 1 {
            gauss += G_WEIGHTS[j / 2] * pair;
        }
    }
    // Node weights are for [−1, 1]; the cell has length 2·half.
    Ok(Evaluated { value: kronrod * half, error: ((kronrod - gauss) * half).abs(), split_dim: 0 })
}

fn genz_malik<F: Fn(&[f64]) -> f64>(
    rule: &GenzMalik,
    f: &F,
    center: &[f64],
    half: &[f64],
    strategy: SplitStrategy,
) -> Result<Evaluated, CubatureError> {
    let d = rule.d;
    let vol: f64 = half.iter().map(|h| 2.0 * h).product();
    let mut x = center.to_vec();
    let f0 = checked(f, &x)?;
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    let mut diffs = [0.0f64; MAX_DIM];
    for i in 0..d {
        x[i] = center[i] - rule.l2 * half[i];
        let a = checked(f, &x)?;
        x[i] = center[i] + rule.l2 * half[i];
        let b = checked(f, &x)?;
        x[i] = center[i] - rule.l3 * half[i];
        let c = checked(f, &x)?;
        x[i] = center[i] + rule.l3 * half[i];
        let e = checked(f, &x)?;
        x[i] = center[i];
        s2 += a + b;
        s3 += c + e;
        diffs[i] = ((a + b - 2.0 * f0) - (c + e - 2.0 * f0) / 7.0).abs();
    }
    let mut s4 = 0.0;
    for i in 0..d {
        for j in i + 1..d {
            for (si, sj) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
                x[i] = center[i] + si * rule.l4 * half[i];
                x[j] = center[j] + sj * rule.l4 * half[j];
                s4 += checked(f, &x)?;
            }
            x[j] = center[j];
        }
        x[i] = center[i];
    }
    let mut s5 = 0.0;
    for mask in 0..(1u32 << d) {
        for i in 0..d {
            let sign = if mask & (1 << i) != 0 { 1.0 } else { -1.0 };
            x[i] = center[i] + sign * rule.l5 * half[i];
        }
        s5 += checked(f, &x)?;
    }
    let w = &rule.w7;
    let i7 = vol * (w[0] * f0 + w[1] * s2 + w[2] * s3 + w[3] * s4 + w[4] * s5);
    let v = &rule.w5;
    let i5 = vol * (v[0] * f0 + v[1] * s2 + v[2] * s3 + v[3] * s4);
    let split_dim = match strategy {
        SplitStrategy::WidestDimension => widest(half),
        SplitStrategy::LargestErrorDimension => {
            let mut best = 0;
            for i in 1..d {
                // Prefer the wider side when the differences tie (e.g. zero).
                if diffs[i] > diffs[best] || (diffs[i] == diffs[best] && half[i] > half[best]) {
                    best = i;
                }
            }
            best
        }
    };
    Ok(Evaluated { value: i7, error: (i7 - i5).abs(), split_dim })
}

struct Engine<'a, F> {
    f: &'a F,
    d: usize,
    gm: GenzMalik,
    strategy: SplitStrategy,
}

impl<'a, F: Fn(usize, &[f64]) -> f64 + Sync> Engine<'a, F> {
    fn points(&self) -> u64 {
        if self.d == 1 {
            15
        } else {
            self.gm.points()
        }
    }

    fn evaluate(&self, piece: usize, center: &[f64], half: &[f64]) -> Result<Evaluated, CubatureError> {
        let g = |x: &[f64]| (self.f)(piece, x);
        if self.d == 1 {
            gauss_kronrod(&g, center[0], half[0])
        } else {
            genz_malik(&self.gm, &g, center, half, self.strategy)
        }
    }
}

/// Integrates `pieces` functions over [0, 1]^d with one shared work list.
/// `f(k, x)` evaluates piece `k` at `x`.
pub fn integrate_pieces<F>(
    f: &F,
    pieces: usize,
    d: usize,
    settings: &CubatureSettings,
) -> Result<PiecewiseEstimate, CubatureError>
where
    F: Fn(usize, &[f64]) -> f64 + Sync,
{
    if d == 0 || d > MAX_DIM {
        return Err(CubatureError::Dimension(d));
    }
    settings.validate()?;
    let engine = Engine { f, d, gm: GenzMalik::new(d.max(2)), strategy: settings.split_strategy };
    let per_cell = engine.points();
    let mut seq = 0u64;
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0u64;
    let mut value = CompensatedSum::new();
    let mut error = CompensatedSum::new();

    let initial: Vec<Result<Cell, CubatureError>> = (0..pieces)
        .into_par_iter()
        .map(|k| {
            let center = vec![0.5; d];
            let half = vec![0.5; d];
            let e = engine.evaluate(k, &center, &half)?;
            Ok(Cell { piece: k, center, half, value: e.value, error: e.error, split_dim: e.split_dim, seq: k as u64 })
        })
        .collect();
    for c in initial {
        let c = c?;
        value.add(c.value);
        error.add(c.error);
        evaluations += per_cell;
        heap.push(c);
    }
    seq += pieces as u64;

    let target = |v: f64| settings.abs_tol.max(settings.rel_tol * v.abs());
    let mut converged = error.value() <= target(value.value());
    while !converged {
        if evaluations >= settings.max_evaluations {
            break;
        }
        let room = (settings.max_evaluations - evaluations) / (2 * per_cell);
        let batch = (heap.len() / 16).clamp(1, 128).min(room.max(1) as usize);
        let mut parents = Vec::with_capacity(batch);
        for _ in 0..batch {
            match heap.pop() {
                Some(c) => parents.push(c),
                None => break,
            }
        }
        let mut halves = Vec::with_capacity(2 * parents.len());
        for p in &parents {
            let k = p.split_dim;
            let mut half = p.half.clone();
            half[k] *= 0.5;
            for s in [-1.0, 1.0] {
                let mut center = p.center.clone();
                center[k] += s * half[k];
                halves.push((p.piece, center, half.clone(), seq));
                seq += 1;
            }
        }
        let children: Vec<Result<Cell, CubatureError>> = halves
            .into_par_iter()
            .map(|(piece, center, half, s)| {
                let e = engine.evaluate(piece, &center, &half)?;
                Ok(Cell { piece, center, half, value: e.value, error: e.error, split_dim: e.split_dim, seq: s })
            })
            .collect();
        for p in &parents {
            value.add(-p.value);
            error.add(-p.error);
        }
        for c in children {
            let c = c?;
            value.add(c.value);
            error.add(c.error);
            evaluations += per_cell;
            heap.push(c);
        }
        converged = error.value() <= target(value.value());
    }

    // Final totals from scratch, in a fixed order, to shed the drift of the
    // running sums.
    let mut cells = heap.into_vec();
    cells.sort_by_key(|c| c.seq);
    let mut per_piece = vec![(CompensatedSum::new(), CompensatedSum::new()); pieces];
    let mut total_v = CompensatedSum::new();
    let mut total_e = CompensatedSum::new();
    for c in &cells {
        per_piece[c.piece].0.add(c.value);
        per_piece[c.piece].1.add(c.error);
        total_v.add(c.value);
        total_e.add(c.error);
    }
    let value = total_v.value();
    let error_bound = total_e.value();
    Ok(PiecewiseEstimate {
        total: IntegralEstimate {
            value,
            error_bound,
            evaluations,
            subregions: cells.len() as u64,
            converged: error_bound <= target(value),
        },
        pieces: per_piece.into_iter().map(|(v, e)| (v.value(), e.value())).collect(),
    })
}

/// Integrates `f` over [0, 1]^d.
pub fn integrate_unit_box<F>(f: F, d: usize, settings: &CubatureSettings) -> Result<IntegralEstimate, CubatureError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    integrate_pieces(&|_, x: &[f64]| f(x), 1, d, settings).map(|p| p.total)
}

/// Integrates a catalog region by summing its decomposed pieces.
pub fn integrate_region(spec: &RegionSpec, settings: &CubatureSettings) -> Result<PiecewiseEstimate, CubatureError> {
    let pieces = decompose_region(spec);
    let f = |k: usize, u: &[f64]| pieces[k].eval_unit(u);
    integrate_pieces(&f, pieces.len(), spec.dim(), settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(tol: f64) -> CubatureSettings {
        CubatureSettings { abs_tol: tol, rel_tol: 0.0, max_evaluations: 5_000_000, split_strategy: SplitStrategy::default() }
    }

    #[test]
    fn constant_in_three_dimensions() {
        let e = integrate_unit_box(|_| 1.0, 3, &settings(1e-12)).unwrap();
        assert!((e.value - 1.0).abs() <= 1e-15);
        assert!(e.error_bound <= 1e-15);
        assert!(e.converged && e.evaluations >= 1);
    }

    #[test]
    fn bubble_product() {
        let f = |x: &[f64]| x.iter().map(|v| 4.0 * v * (1.0 - v)).product::<f64>();
        let e = integrate_unit_box(f, 2, &settings(1e-12)).unwrap();
        assert!((e.value - 4.0 / 9.0).abs() < 1e-13);
    }

    /// ∫ x^k over [0, 1] is 1/(k+1).
    fn monomial_exact(d: usize, exps: &[u32]) -> f64 {
        exps.iter().take(d).map(|&k| 1.0 / (k as f64 + 1.0)).product()
    }

    #[test]
    fn genz_malik_is_exact_to_degree_seven() {
        for d in 2..=5 {
            let rule = GenzMalik::new(d);
            // Every exponent vector of total degree ≤ 7 touching the first three axes.
            for a in 0..=7u32 {
                for b in 0..=(7 - a) {
                    for c in 0..=(7 - a - b) {
                        let mut exps = vec![0u32; d];
                        exps[0] = a;
                        exps[1] = b;
                        if d > 2 {
                            exps[2] = c;
                        } else if c > 0 {
                            continue;
                        }
                        let f = |x: &[f64]| x.iter().zip(&exps).map(|(v, &k)| v.powi(k as i32)).product::<f64>();
                        let r = genz_malik(&rule, &f, &vec![0.5; d], &vec![0.5; d], SplitStrategy::default()).unwrap();
                        let exact = monomial_exact(d, &exps);
                        assert!((r.value - exact).abs() <= 1e-14, "d={d} {exps:?}: {} vs {exact}", r.value);
                        if a + b + c <= 5 {
                            let i5 = r.value - r.error;
                            let i5b = r.value + r.error;
                            assert!((i5 - exact).abs() <= 1e-14 || (i5b - exact).abs() <= 1e-14);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn kronrod_is_exact_to_degree_twenty_one() {
        for k in 0..=21 {
            let f = |x: &[f64]| x[0].powi(k);
            let r = gauss_kronrod(&f, 0.5, 0.5).unwrap();
            assert!((r.value - 1.0 / (k as f64 + 1.0)).abs() <= 1e-14, "k={k}");
        }
    }

    #[test]
    fn one_dimensional_adaptive() {
        let e = integrate_unit_box(|x| x[0].sqrt(), 1, &settings(1e-12)).unwrap();
        assert!((e.value - 2.0 / 3.0).abs() < 1e-12);
        assert!(e.converged);
    }

    #[test]
    fn exponential_four_dimensions() {
        let f = |x: &[f64]| (x[0] + 2.0 * x[1] - x[2] + 0.5 * x[3]).exp();
        let exact = (1f64.exp() - 1.0)
            * ((2f64).exp() - 1.0) / 2.0
            * (1.0 - (-1f64).exp())
            * ((0.5f64).exp() - 1.0) / 0.5;
        let e = integrate_unit_box(f, 4, &settings(1e-10)).unwrap();
        assert!((e.value - exact).abs() <= e.error_bound.max(1e-12) * 3.0);
        assert!((e.value - exact).abs() < 1e-9);
    }

    #[test]
    fn pieces_share_a_budget_and_report_separately() {
        let f = |k: usize, x: &[f64]| if k == 0 { 1.0 } else { (10.0 * x[0]).sin() * x[1] };
        let p = integrate_pieces(&f, 2, 2, &settings(1e-10)).unwrap();
        let exact1 = (1.0 - 10f64.cos()) / 10.0 * 0.5;
        assert!((p.pieces[0].0 - 1.0).abs() < 1e-14);
        assert!((p.pieces[1].0 - exact1).abs() < 1e-9);
        assert!((p.total.value - 1.0 - exact1).abs() < 1e-9);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let s = CubatureSettings { max_evaluations: 200, ..settings(1e-15) };
        let e = integrate_unit_box(|x| (x[0] * x[1]).sqrt(), 2, &s).unwrap();
        assert!(!e.converged);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            integrate_unit_box(|_| f64::NAN, 2, &settings(1e-6)),
            Err(CubatureError::NonFinite { .. })
        ));
        assert!(matches!(integrate_unit_box(|_| 1.0, 9, &settings(1e-6)), Err(CubatureError::Dimension(9))));
        assert!(matches!(integrate_unit_box(|_| 1.0, 2, &settings(0.0)), Err(CubatureError::Settings(_))));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let f = |x: &[f64]| 1.0 / (0.01 + (x[0] - 0.3).powi(2) + (x[1] - 0.6).powi(2));
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| integrate_unit_box(f, 2, &settings(1e-9)).unwrap())
        };
        let a = run(1);
        let b = run(3);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error_bound.to_bits(), b.error_bound.to_bits());
    }
}
