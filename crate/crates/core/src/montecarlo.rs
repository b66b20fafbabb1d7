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

//! Simulation of the Poisson model and Monte Carlo integration.
//!
//! Points of the unit-rate process are generated in order of increasing
//! distance from the origin: the area πR² swept between consecutive points
//! is Exp(1). A sample stops once no future point can change which points
//! shoot the origin.
//!
//! Every sample (and every integration chunk) draws from its own ChaCha
//! stream keyed by the master seed and its index, and all accumulation is
//! done in integers or in a fixed order, so results do not depend on the
//! number of threads.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Configuration, PlanarPoint};
use crate::parametrization::inverse_map;
use crate::regions::{decompose_region, region_catalog, RegionSpec, SubRegion};
use crate::sum::CompensatedSum;

/// Points drawn in one sample before giving up.
pub const SAFETY_CAP: usize = 10_000;

/// Samples per parallel work item.
pub const CHUNK: u64 = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("sample {sample} drew {points} points without certifying its shooters")]
    SafetyCap { sample: u64, points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeededStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeededStream { master_seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Seeds many streams from one master seed without re-running the seed
/// expansion for each.
#[derive(Debug, Clone)]
struct StreamFactory(ChaCha8Rng);

impl StreamFactory {
    fn new(master_seed: u64) -> Self {
        StreamFactory(ChaCha8Rng::seed_from_u64(master_seed))
    }

    fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.0.clone();
        rng.set_stream(index);
        rng.set_word_pos(0);
        rng
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PoissonStepper {
    squared_radius: f64,
    emitted: Vec<PlanarPoint>,
}

impl PoissonStepper {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn squared_radius(&self) -> f64 {
        self.squared_radius
    }

    pub fn emitted(&self) -> &[PlanarPoint] {
        &self.emitted
    }

    pub fn next_point<R: Rng + ?Sized>(&mut self, rng: &mut R) -> PlanarPoint {
        let u: f64 = rng.random();
        self.squared_radius += -(1.0 - u).ln() / PI;
        let angle = TAU * rng.random::<f64>();
        let p = PlanarPoint::from_polar(self.squared_radius.sqrt(), angle);
        self.emitted.push(p);
        p
    }
}

pub fn next_point<R: Rng + ?Sized>(stepper: &mut PoissonStepper, rng: &mut R) -> PlanarPoint {
    stepper.next_point(rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffReason {
    ResolvedAll,
    EarlyShotKnown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub shooters: u8,
    pub points_used: u32,
    pub cutoff_reason: CutoffReason,
}

/// Incremental state of one sample.
#[derive(Debug, Clone, Default)]
pub struct ShooterSim {
    stepper: PoissonStepper,
    /// Points not yet known to have a nearer neighbour than the origin.
    viable: Vec<usize>,
    /// Sorted arguments of all points.
    angles: Vec<f64>,
}

impl ShooterSim {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn points(&self) -> &[PlanarPoint] {
        self.stepper.emitted()
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let q = self.stepper.next_point(rng);
        let pts = self.stepper.emitted();
        let qi = pts.len() - 1;
        let q2 = q.norm_sq();
        let q_viable = pts[..qi].iter().all(|&p| q.dist_sq(p) > q2);
        self.viable.retain(|&i| q.dist_sq(pts[i]) > pts[i].norm_sq());
        if q_viable {
            self.viable.push(qi);
        }
        let a = q.argument();
        let at = self.angles.partition_point(|&x| x < a);
        self.angles.insert(at, a);
    }

    fn max_viable_sq(&self) -> f64 {
        let pts = self.stepper.emitted();
        self.viable.iter().map(|&i| pts[i].norm_sq()).fold(0.0, f64::max)
    }

    /// Whether some future point could land within 60° of an empty arc:
    /// false once every angular gap is below 2π/3.
    fn open_gap(&self) -> bool {
        let a = &self.angles;
        if a.len() < 3 {
            return true;
        }
        let limit = TAU / 3.0;
        if a[0] + TAU - a[a.len() - 1] >= limit {
            return true;
        }
        a.windows(2).any(|w| w[1] - w[0] >= limit)
    }

    /// No future point can shoot the origin or enter a viable point's disk.
    pub fn certified(&self) -> bool {
        self.stepper.squared_radius() >= 4.0 * self.max_viable_sq() && !self.open_gap()
    }

    /// Some viable point's shooting disk is closed to all future points.
    pub fn shot_known(&self) -> bool {
        let r2 = self.stepper.squared_radius();
        let pts = self.stepper.emitted();
        self.viable.iter().any(|&i| r2 >= 4.0 * pts[i].norm_sq())
    }

    pub fn shooters(&self) -> Vec<PlanarPoint> {
        let pts = self.stepper.emitted();
        self.viable.iter().map(|&i| pts[i]).collect()
    }
}

fn run_sample<R: Rng + ?Sized>(
    rng: &mut R,
    early: bool,
    sample: u64,
) -> Result<(SimOutcome, ShooterSim), SimError> {
    let mut sim = ShooterSim::new();
    loop {
        sim.step(rng);
        let used = sim.points().len();
        if early && sim.shot_known() {
            let out = SimOutcome {
                shooters: sim.viable.len() as u8,
                points_used: used as u32,
                cutoff_reason: CutoffReason::EarlyShotKnown,
            };
            return Ok((out, sim));
        }
        if sim.certified() {
            let out = SimOutcome {
                shooters: sim.viable.len() as u8,
                points_used: used as u32,
                cutoff_reason: CutoffReason::ResolvedAll,
            };
            return Ok((out, sim));
        }
        if used >= SAFETY_CAP {
            return Err(SimError::SafetyCap { sample, points: used });
        }
    }
}

/// Resolves the exact number of points that shoot the origin.
pub fn simulate_shooters<R: Rng + ?Sized>(rng: &mut R) -> Result<SimOutcome, SimError> {
    run_sample(rng, false, 0).map(|(o, _)| o)
}

/// The points that shoot the origin in one sample.
pub fn simulate_shooter_points<R: Rng + ?Sized>(rng: &mut R) -> Result<Vec<PlanarPoint>, SimError> {
    run_sample(rng, false, 0).map(|(_, s)| s.shooters())
}

/// Stops as soon as the origin is known to be shot. `shooters` is then a
/// lower bound on the true count.
pub fn simulate_until_shot<R: Rng + ?Sized>(rng: &mut R) -> Result<SimOutcome, SimError> {
    run_sample(rng, true, 0).map(|(o, _)| o)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// One standard error.
    pub stderr: f64,
    pub samples: u64,
}

impl McEstimate {
    /// From Σx and Σx² over `n` samples, with the n − 1 variance.
    pub fn from_moments(sum: f64, sum_sq: f64, n: u64) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 { ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0) } else { 0.0 };
        McEstimate { mean, stderr: (var / nf).sqrt(), samples: n }
    }

    /// Proportion of `hits` among `n` trials.
    pub fn from_counts(hits: u64, n: u64) -> Self {
        Self::from_moments(hits as f64, hits as f64, n)
    }

    /// |mean − target| in units of stderr (infinite when stderr is 0 and
    /// the values differ).
    pub fn sigmas_from(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

/// Σ w_i·X_i for independent normal X_i.
pub fn combine_independent(estimates: &[(McEstimate, f64)]) -> McEstimate {
    assert!(!estimates.is_empty(), "nothing to combine");
    let mean = estimates.iter().map(|(e, w)| w * e.mean).collect::<CompensatedSum>().value();
    let var = estimates.iter().map(|(e, w)| (w * e.stderr).powi(2)).collect::<CompensatedSum>().value();
    McEstimate { mean, stderr: var.sqrt(), samples: estimates.iter().map(|(e, _)| e.samples).sum() }
}

fn binomial(k: u64, n: u64) -> u64 {
    if n > k {
        return 0;
    }
    (0..n).fold(1, |acc, i| acc * (k - i) / (i + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub seed: u64,
    pub samples: u64,
    /// Samples with exactly k shooters, k = 0..=5.
    pub histogram: [u64; 6],
    pub points_used: u64,
    pub mean_shooters: McEstimate,
    /// c_2..c_5.
    pub c: [McEstimate; 4],
    pub p: McEstimate,
}

impl SimulationSummary {
    pub fn from_histogram(seed: u64, histogram: [u64; 6], points_used: u64) -> Self {
        let samples: u64 = histogram.iter().sum();
        let moment = |n: u64| {
            let (mut s, mut s2) = (0.0, 0.0);
            for (k, &h) in histogram.iter().enumerate() {
                let v = binomial(k as u64, n) as f64;
                s += h as f64 * v;
                s2 += h as f64 * v * v;
            }
            McEstimate::from_moments(s, s2, samples)
        };
        SimulationSummary {
            seed,
            samples,
            histogram,
            points_used,
            mean_shooters: moment(1),
            c: [moment(2), moment(3), moment(4), moment(5)],
            p: McEstimate::from_counts(histogram[0], samples),
        }
    }
}

fn chunks(samples: u64) -> Vec<(u64, u64)> {
    (0..samples.div_ceil(CHUNK)).map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(samples))).collect()
}

/// Shooter counts from `samples` fully resolved samples.
pub fn shooter_histogram(samples: u64, seed: u64) -> Result<([u64; 6], u64), SimError> {
    let factory = StreamFactory::new(seed);
    let parts: Vec<Result<([u64; 6], u64), SimError>> = chunks(samples)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut h = [0u64; 6];
            let mut used = 0u64;
            for i in lo..hi {
                let mut rng = factory.stream(i);
                let (out, _) = run_sample(&mut rng, false, i)?;
                assert!(out.shooters <= 5, "sample {i} has {} shooters", out.shooters);
                h[out.shooters as usize] += 1;
                used += out.points_used as u64;
            }
            Ok((h, used))
        })
        .collect();
    let mut total = [0u64; 6];
    let mut used = 0;
    for p in parts {
        let (h, u) = p?;
        for k in 0..6 {
            total[k] += h[k];
        }
        used += u;
    }
    Ok((total, used))
}

/// c_2..c_5 (and P, and the mean shooter count) by simulation.
pub fn estimate_cn_sim(samples: u64, seed: u64) -> Result<SimulationSummary, SimError> {
    let (h, used) = shooter_histogram(samples, seed)?;
    Ok(SimulationSummary::from_histogram(seed, h, used))
}

/// P by simulation with early cutoff.
pub fn estimate_p_sim(samples: u64, seed: u64) -> Result<McEstimate, SimError> {
    let factory = StreamFactory::new(seed);
    let parts: Vec<Result<u64, SimError>> = chunks(samples)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut unscathed = 0u64;
            for i in lo..hi {
                let mut rng = factory.stream(i);
                let (out, _) = run_sample(&mut rng, true, i)?;
                if out.shooters == 0 {
                    unscathed += 1;
                }
            }
            Ok(unscathed)
        })
        .collect();
    let mut hits = 0;
    for p in parts {
        hits += p?;
    }
    Ok(McEstimate::from_counts(hits, samples))
}

/// Per-region tallies of counterclockwise-labeled shooter subsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSimSummary {
    pub seed: u64,
    pub samples: u64,
    /// Σ over samples of the number of labeled tuples inside each catalog
    /// region's bounds, in catalog order.
    pub tuple_sums: Vec<u64>,
    pub tuple_sq_sums: Vec<u64>,
    /// Labeled tuples inside the bounds of two or more regions.
    pub overlapping: u64,
    /// ∫ estimate per region, in catalog order.
    pub estimates: Vec<McEstimate>,
}

/// Indices of the catalog regions whose bounds contain the labeled tuple.
pub fn matching_regions(points: &[PlanarPoint]) -> Vec<usize> {
    let config = Configuration::new(points.to_vec());
    let Ok(x) = inverse_map(&config) else {
        return Vec::new();
    };
    region_catalog()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.n() == points.len() && r.within_bounds(&x))
        .map(|(i, _)| i)
        .collect()
}

/// Counterclockwise rotations of every subset of size ≥ 2 of `shooters`.
fn labeled_subsets(shooters: &[PlanarPoint]) -> Vec<Vec<PlanarPoint>> {
    let mut sorted = shooters.to_vec();
    sorted.sort_by(|a, b| a.argument().total_cmp(&b.argument()));
    let k = sorted.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << k) {
        if mask.count_ones() < 2 {
            continue;
        }
        let subset: Vec<PlanarPoint> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| sorted[i]).collect();
        let c = Configuration::new(subset);
        for s in 0..c.len() {
            out.push(c.rotation(s).points);
        }
    }
    out
}

/// ∫ over each region estimated as (1/n)·E[number of labeled shooter tuples
/// inside the region's bounds].
pub fn estimate_regions_sim(samples: u64, seed: u64) -> Result<RegionSimSummary, SimError> {
    let m = region_catalog().len();
    let factory = StreamFactory::new(seed);
    type Part = (Vec<u64>, Vec<u64>, u64);
    let parts: Vec<Result<Part, SimError>> = chunks(samples)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut s = vec![0u64; m];
            let mut s2 = vec![0u64; m];
            let mut overlapping = 0u64;
            let mut count = vec![0u64; m];
            for i in lo..hi {
                let mut rng = factory.stream(i);
                let (_, sim) = run_sample(&mut rng, false, i)?;
                let shooters = sim.shooters();
                if shooters.len() < 2 {
                    continue;
                }
                count.iter_mut().for_each(|c| *c = 0);
                for tuple in labeled_subsets(&shooters) {
                    let hits = matching_regions(&tuple);
                    if hits.len() > 1 {
                        overlapping += 1;
                    }
                    for h in hits {
                        count[h] += 1;
                    }
                }
                for r in 0..m {
                    s[r] += count[r];
                    s2[r] += count[r] * count[r];
                }
            }
            Ok((s, s2, overlapping))
        })
        .collect();
    let mut tuple_sums = vec![0u64; m];
    let mut tuple_sq_sums = vec![0u64; m];
    let mut overlapping = 0;
    for p in parts {
        let (s, s2, o) = p?;
        for r in 0..m {
            tuple_sums[r] += s[r];
            tuple_sq_sums[r] += s2[r];
        }
        overlapping += o;
    }
    let estimates = region_catalog()
        .iter()
        .enumerate()
        .map(|(r, spec)| {
            let e = McEstimate::from_moments(tuple_sums[r] as f64, tuple_sq_sums[r] as f64, samples);
            let n = spec.n() as f64;
            McEstimate { mean: e.mean / n, stderr: e.stderr / n, samples }
        })
        .collect();
    Ok(RegionSimSummary { seed, samples, tuple_sums, tuple_sq_sums, overlapping, estimates })
}

/// Plain Monte Carlo over the pieces, `samples` split evenly among them.
/// The piece estimates are combined as independent normals.
pub fn mc_integrate_pieces(pieces: &[SubRegion], samples: u64, seed: u64) -> McEstimate {
    assert!(!pieces.is_empty(), "no pieces");
    let factory = StreamFactory::new(seed);
    let k = pieces.len() as u64;
    let mut items = Vec::new();
    for (p, _) in pieces.iter().enumerate() {
        let share = samples / k + u64::from((p as u64) < samples % k);
        for (c, (lo, hi)) in chunks(share).into_iter().enumerate() {
            items.push((p, ((p as u64) << 32) | c as u64, hi - lo));
        }
    }
    let parts: Vec<(usize, CompensatedSum, CompensatedSum)> = items
        .into_par_iter()
        .map(|(p, stream, count)| {
            let piece = &pieces[p];
            let mut rng = factory.stream(stream);
            let mut u = vec![0.0; piece.dim()];
            let mut s = CompensatedSum::new();
            let mut s2 = CompensatedSum::new();
            for _ in 0..count {
                u.iter_mut().for_each(|x| *x = rng.random::<f64>());
                let v = piece.eval_unit(&u);
                s.add(v);
                s2.add(v * v);
            }
            (p, s, s2)
        })
        .collect();
    let mut sums = vec![(CompensatedSum::new(), CompensatedSum::new()); pieces.len()];
    for (p, s, s2) in parts {
        sums[p].0.merge(&s);
        sums[p].1.merge(&s2);
    }
    let per_piece: Vec<(McEstimate, f64)> = sums
        .iter()
        .enumerate()
        .map(|(p, (s, s2))| {
            let share = samples / k + u64::from((p as u64) < samples % k);
            (McEstimate::from_moments(s.value(), s2.value(), share.max(1)), 1.0)
        })
        .collect();
    combine_independent(&per_piece)
}

pub fn mc_integrate_region(spec: &RegionSpec, samples: u64, seed: u64) -> McEstimate {
    mc_integrate_pieces(&decompose_region(spec), samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shoots_origin;
    use crate::regions::{BoundExpr, Bounds, RatioMap};

    #[test]
    fn radii_are_sorted_and_streams_reproducible() {
        let s = SeededStream::new(42, 7);
        let mut a = PoissonStepper::new();
        let mut b = PoissonStepper::new();
        let (mut ra, mut rb) = (s.rng(), s.rng());
        for _ in 0..1000 {
            let p = next_point(&mut a, &mut ra);
            let q = next_point(&mut b, &mut rb);
            assert_eq!(p, q);
        }
        assert!(a.emitted().windows(2).all(|w| w[0].norm() <= w[1].norm()));
        let mut c = PoissonStepper::new();
        let mut rc = SeededStream::new(42, 8).rng();
        assert_ne!(next_point(&mut c, &mut rc), a.emitted()[0]);
    }

    #[test]
    fn factory_streams_match_seeded_streams() {
        let f = StreamFactory::new(9);
        let mut x = f.stream(3);
        let mut y = SeededStream::new(9, 3).rng();
        for _ in 0..50 {
            assert_eq!(x.random::<u64>(), y.random::<u64>());
        }
    }

    #[test]
    fn count_within_radius_is_poisson() {
        // Mean number of points within R = 2 is 4π.
        let f = StreamFactory::new(1);
        let runs = 100_000u64;
        let (mut s, mut s2) = (0.0, 0.0);
        for i in 0..runs {
            let mut rng = f.stream(i);
            let mut st = PoissonStepper::new();
            let mut k = 0.0;
            while next_point(&mut st, &mut rng).norm_sq() <= 4.0 {
                k += 1.0;
            }
            s += k;
            s2 += k * k;
        }
        let e = McEstimate::from_moments(s, s2, runs);
        assert!(e.sigmas_from(4.0 * PI) < 3.0, "{e:?}");
    }

    #[test]
    fn certificate_is_sound() {
        let f = StreamFactory::new(5);
        for i in 0..20_000 {
            let mut rng = f.stream(i);
            let (_, mut sim) = run_sample(&mut rng, false, i).unwrap();
            let mut before = sim.shooters();
            for _ in 0..100 {
                sim.stepper.next_point(&mut rng);
            }
            let pts = sim.points().to_vec();
            let mut brute: Vec<PlanarPoint> = pts
                .iter()
                .enumerate()
                .filter(|(j, &p)| {
                    let others: Vec<PlanarPoint> =
                        pts.iter().enumerate().filter(|(k, _)| k != j).map(|(_, &q)| q).collect();
                    shoots_origin(p, &others)
                })
                .map(|(_, &p)| p)
                .collect();
            let key = |p: &PlanarPoint| (p.x.to_bits(), p.y.to_bits());
            before.sort_by_key(key);
            brute.sort_by_key(key);
            assert_eq!(before, brute, "sample {i}");
        }
    }

    #[test]
    fn early_cutoff_agrees_on_zero_shooters() {
        let f = StreamFactory::new(11);
        for i in 0..20_000 {
            let full = run_sample(&mut f.stream(i), false, i).unwrap().0;
            let early = run_sample(&mut f.stream(i), true, i).unwrap().0;
            assert_eq!(full.shooters == 0, early.shooters == 0);
            assert!(early.points_used <= full.points_used);
            if early.cutoff_reason == CutoffReason::EarlyShotKnown {
                assert!(early.shooters >= 1);
            }
        }
    }

    #[test]
    fn histogram_statistics() {
        let mut h = [0u64; 6];
        h[0] = 10;
        let s = SimulationSummary::from_histogram(0, h, 0);
        assert!(s.c.iter().all(|c| c.mean == 0.0));
        assert_eq!(s.p.mean, 1.0);

        let s = SimulationSummary::from_histogram(0, [2, 0, 1, 0, 0, 1], 0);
        assert!((s.mean_shooters.mean - 7.0 / 4.0).abs() < 1e-15);
        assert!((s.c[0].mean - 11.0 / 4.0).abs() < 1e-15);
        assert!((s.c[3].mean - 0.25).abs() < 1e-15);
    }

    #[test]
    fn simulation_is_thread_count_independent() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_cn_sim(40_000, 3).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn combine_examples() {
        let e = McEstimate { mean: 2.0, stderr: 0.5, samples: 10 };
        assert_eq!(combine_independent(&[(e, 1.0)]), e);
        let d = combine_independent(&[(e, 1.0), (e, -1.0)]);
        assert_eq!(d.mean, 0.0);
        assert!((d.stderr - 0.5 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(5, 5), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(4, 0), 1);
    }

    #[test]
    fn degenerate_piece_integrates_to_zero() {
        let spec = &region_catalog()[0];
        let piece = decompose_region(spec)
            .remove(0)
            .with_theta_bounds(vec![Bounds::new(BoundExpr::pi(1, 3), BoundExpr::pi(1, 3))]);
        let e = mc_integrate_pieces(&[piece.clone()], 10_000, 1);
        assert_eq!(e.mean, 0.0);
        assert_eq!(e.stderr, 0.0);
        assert_eq!(piece.ratio_maps[0], RatioMap::Direct);
    }

    #[test]
    fn mc_integration_of_pair_region() {
        let spec = &region_catalog()[0];
        let e = mc_integrate_region(spec, 400_000, 17);
        assert!(e.sigmas_from(0.0288814929604) < 4.0, "{e:?}");
        assert!(e.stderr < 1e-4);
    }
}
