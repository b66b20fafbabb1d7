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

use unscathed::cubature::{integrate_region, CubatureSettings};
use unscathed::montecarlo::{estimate_cn_sim, estimate_regions_sim, mc_integrate_region};
use unscathed::regions::region_catalog;

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn simulation_reproducible_across_thread_counts() {
    let a = with_threads(1, || estimate_cn_sim(100_000, 5).unwrap());
    let b = with_threads(3, || estimate_cn_sim(100_000, 5).unwrap());
    assert_eq!(a, b);
    assert!(a.histogram.iter().sum::<u64>() == 100_000);
    let z = (a.mean_shooters.mean - 1.0).abs() / a.mean_shooters.stderr;
    assert!(z <= 4.0, "{:?}", a.mean_shooters);
}

#[test]
fn region_tally_has_no_overlaps() {
    let s = estimate_regions_sim(100_000, 6).unwrap();
    assert_eq!(s.overlapping, 0);
    let again = with_threads(2, || estimate_regions_sim(100_000, 6).unwrap());
    assert_eq!(s.tuple_sums, again.tuple_sums);
}

#[test]
fn mc_integration_agrees_with_cubature() {
    for (idx, spec) in region_catalog().iter().enumerate().filter(|(_, s)| s.n() <= 4) {
        let mc = mc_integrate_region(spec, 400_000, 70 + idx as u64);
        let cub = integrate_region(spec, &CubatureSettings::new(1e-8, spec.dim())).unwrap().total;
        let d = (mc.mean - cub.value).abs();
        assert!(d <= 3.0 * (mc.stderr + cub.error_bound), "{}: {mc:?} vs {cub:?}", spec.signature);
    }
}

#[test]
fn mc_integration_reproducible_across_thread_counts() {
    let spec = &region_catalog()[8];
    let a = with_threads(1, || mc_integrate_region(spec, 200_000, 1));
    let b = with_threads(4, || mc_integrate_region(spec, 200_000, 1));
    assert_eq!(a, b);
}
