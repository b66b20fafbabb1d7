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

use std::collections::BTreeSet;
use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unscathed::geometry::Configuration;
use unscathed::montecarlo::{mc_integrate_region, simulate_shooter_points, McEstimate, SeededStream};
use unscathed::regions::{
    catalog_class_of, compose_cn, compose_p, reduced_integrand, region_catalog, BoxSliceInterval, CoefficientMode,
    QuadrantSignature, RatioRange, RegionSpec,
};
use unscathed::verify::reference;

/// Plain Monte Carlo over the undecomposed bounds, sampling each variable
/// uniformly on its nested interval (unbounded ratios through a tangent map).
fn naive_region_mc(spec: &RegionSpec, samples: u64, seed: u64) -> McEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    let m = spec.n() - 1;
    for _ in 0..samples {
        let (x, lengths) = spec.sample_point(&mut rng);
        let mut weight: f64 = lengths[..m].iter().product();
        for (k, range) in spec.t_ranges.iter().enumerate() {
            // Unbounded ratios run over (0, ∞) with t = tan(πv/2).
            if matches!(range, RatioRange::Unbounded) {
                let u = x.ts[k];
                weight *= 0.5 * PI * (1.0 + u * u);
            } else {
                weight *= lengths[m + k];
            }
        }
        let v = weight * reduced_integrand(spec, &x.thetas, &x.ts).unwrap();
        s += v;
        s2 += v * v;
    }
    McEstimate::from_moments(s, s2, samples)
}

#[test]
fn decomposition_preserves_integrals() {
    for (idx, spec) in region_catalog().iter().enumerate() {
        let naive = naive_region_mc(spec, 200_000, idx as u64);
        let split = mc_integrate_region(spec, 200_000, 100 + idx as u64);
        let z = (naive.mean - split.mean).abs() / naive.stderr.hypot(split.stderr);
        assert!(z <= 3.0, "{}: {naive:?} vs {split:?} ({z:.2}σ)", spec.signature);
    }
}

#[test]
fn simulated_signatures_stay_in_catalog() {
    let mut seen = BTreeSet::new();
    for i in 0..200_000u64 {
        let mut rng = SeededStream::new(12, i).rng();
        let shooters = simulate_shooter_points(&mut rng).unwrap();
        let k = shooters.len();
        for mask in 1u32..(1 << k) {
            if mask.count_ones() < 2 {
                continue;
            }
            let subset: Vec<_> = (0..k).filter(|j| mask & (1 << j) != 0).map(|j| shooters[j]).collect();
            let cfg = Configuration::counterclockwise(&subset);
            let x = unscathed::parametrization::inverse_map(&cfg).unwrap();
            let sig = QuadrantSignature::of_gaps(&x.full_thetas());
            let class = catalog_class_of(&sig);
            assert!(class.is_some(), "signature {sig} outside the catalog");
            seen.insert(class.unwrap().signature.to_string());
        }
    }
    assert!(seen.len() >= 8, "{seen:?}");
}

#[test]
fn published_region_values_compose_to_published_coefficients() {
    let values = reference::integration_region_values();
    let c = compose_cn(&values, CoefficientMode::SwappedPentagon).unwrap();
    let expected = [0.3165850647281332, 0.03305636476066, 0.0006570669572, 2.03800850e-7];
    for (a, b) in c.iter().zip(expected) {
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }
    let p = compose_p(&reference::INTEGRATION_CN.map(|(v, _)| v));
    assert!((p - 0.2841855631275).abs() <= 1e-12, "{p}");
    let printed = compose_cn(&values, CoefficientMode::AsPrinted).unwrap();
    assert!((printed[3] - (2.66817e-9 + 5.0 * 1.9046e-7)).abs() <= 1e-20);
}

fn slice_strategy() -> impl Strategy<Value = BoxSliceInterval> {
    (2usize..=5).prop_flat_map(|n| {
        (
            prop::collection::vec((-2.0f64..2.0, 0.0f64..3.0), n),
            0.0f64..=1.0,
            1usize..=n,
            prop::collection::vec(0.0f64..=1.0, n),
        )
            .prop_map(move |(ab, frac, k, pick)| {
                let a: Vec<f64> = ab.iter().map(|p| p.0).collect();
                let b: Vec<f64> = ab.iter().map(|p| p.0 + p.1).collect();
                let c = a.iter().sum::<f64>() + frac * ab.iter().map(|p| p.1).sum::<f64>();
                let mut y = Vec::new();
                for j in 1..k {
                    let s = BoxSliceInterval { a: a.clone(), b: b.clone(), c, k: j, y: y.clone() };
                    let (lo, hi) = s.slice_interval().unwrap();
                    y.push(lo + pick[j - 1] * (hi - lo));
                }
                BoxSliceInterval { a, b, c, k, y }
            })
    })
}

proptest! {
    #[test]
    fn slice_inside_box_and_endpoint_rules_hold(s in slice_strategy()) {
        let (lo, hi) = s.slice_interval().unwrap();
        let k = s.k - 1;
        let slack = 1e-12 * (1.0 + s.a[k].abs().max(s.b[k].abs()));
        prop_assert!(lo >= s.a[k] - slack && hi <= s.b[k] + slack && lo <= hi + slack);
        prop_assert!(s.check_endpoint_rules().is_ok());
    }
}
