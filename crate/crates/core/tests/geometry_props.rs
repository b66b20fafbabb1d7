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

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unscathed::geometry::{
    branch_valid, closer_to_origin_than_each_other, complete_parameters, union_area_oracle, union_area_w,
    Configuration, PlanarPoint,
};
use unscathed::regions::region_catalog;

fn region_point(region: usize, seed: u64) -> unscathed::parametrization::ParamVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    region_catalog()[region].sample_point(&mut rng).0
}

proptest! {
    #[test]
    fn union_between_largest_disk_and_disk_sum(region in 0usize..12, seed in any::<u64>()) {
        let x = region_point(region, seed);
        let w = union_area_w(x.n(), &x.thetas, &x.ts).unwrap();
        let (_, ts) = complete_parameters(&x.thetas, &x.ts);
        let mut sq = 1.0;
        let mut areas = vec![PI];
        for t in &ts[..ts.len() - 1] {
            sq *= t * t;
            areas.push(PI * sq);
        }
        let largest = areas.iter().cloned().fold(0.0, f64::max);
        let sum: f64 = areas.iter().sum();
        prop_assert!(w >= largest * (1.0 - 1e-12), "{w} < {largest}");
        prop_assert!(w <= sum * (1.0 + 1e-12), "{w} > {sum}");
    }

    #[test]
    fn oracle_area_scales_with_r_squared(region in 0usize..12, seed in any::<u64>()) {
        let x = region_point(region, seed);
        let w = union_area_w(x.n(), &x.thetas, &x.ts).unwrap();
        let area = union_area_oracle(&x.forward_map().disks()).unwrap();
        let expected = x.r * x.r * w;
        prop_assert!((area - expected).abs() <= 1e-9 * expected.max(1.0), "{area} vs {expected}");
    }

    #[test]
    fn arcsin_branches_valid_inside_regions(region in 0usize..12, seed in any::<u64>()) {
        let x = region_point(region, seed);
        let (th, ts) = complete_parameters(&x.thetas, &x.ts);
        for (t_angle, t) in th.iter().zip(&ts) {
            prop_assert!(branch_valid(*t_angle, *t), "θ = {t_angle}, t = {t}");
        }
    }

    #[test]
    fn predicate_invariant_under_rotation_and_scaling(
        pts in prop::collection::vec((0.1f64..5.0, 0.0f64..TAU), 2..6),
        angle in 0.0f64..TAU,
        scale in 0.01f64..100.0,
    ) {
        let cfg = Configuration::new(pts.iter().map(|&(m, a)| PlanarPoint::from_polar(m, a)).collect());
        let moved = Configuration::new(cfg.points.iter().map(|p| p.rotated(angle).scaled(scale)).collect());
        // Exact ties are measure zero; skip configurations within rounding of one.
        let margin = cfg.points.iter().enumerate().flat_map(|(i, p)| {
            cfg.points[i + 1..].iter().map(move |q| {
                let d = p.dist_sq(*q);
                let m = p.norm_sq().max(q.norm_sq());
                (d - m).abs() / m
            })
        }).fold(f64::INFINITY, f64::min);
        prop_assume!(margin > 1e-9);
        prop_assert_eq!(closer_to_origin_than_each_other(&cfg), closer_to_origin_than_each_other(&moved));
    }
}
