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

use proptest::prelude::*;
use unscathed::report::{format_uncertainty, parse_records, Method, RecordMetadata, ResultRecord, UncertaintyKind};
use unscathed::verify;

fn method() -> impl Strategy<Value = Method> {
    prop::sample::select(Method::ALL.to_vec())
}

proptest! {
    #[test]
    fn records_round_trip(
        q in "[A-Za-z0-9,]{1,12}",
        m in method(),
        v in -1e3f64..1e3,
        u in 0.0f64..1.0,
        sigma in any::<bool>(),
        seed in prop::option::of(any::<u64>()),
        evals in prop::option::of(any::<u64>()),
        wall in prop::option::of(0.0f64..1e4),
    ) {
        let kind = if sigma { UncertaintyKind::OneSigma } else { UncertaintyKind::ErrorBound };
        let meta = RecordMetadata { seed, evaluations: evals, converged: None, wall_time_s: wall };
        let r = ResultRecord::new(q, m, v, u, kind, meta).unwrap();
        let back = parse_records(&r.to_json_line()).unwrap();
        prop_assert_eq!(back, vec![r]);
    }

    #[test]
    fn formatted_value_is_within_the_rounding_unit(v in 1e-6f64..10.0, u in 1e-12f64..1e-2) {
        let s = format_uncertainty(v, u);
        let open = s.find('(').unwrap();
        let digits = &s[open + 1..s.len() - 1];
        prop_assert!(!digits.is_empty() && digits.len() <= 2);
        prop_assert!(digits.chars().all(|c| c.is_ascii_digit()));
        let shown: f64 = s[..open].parse().unwrap();
        let decimals = s[..open].split('.').nth(1).map_or(0, str::len) as i32;
        let unit = 10f64.powi(-decimals);
        prop_assert!((shown - v).abs() <= 0.5 * unit * (1.0 + 1e-9));
        let unc = digits.parse::<f64>().unwrap() * unit;
        prop_assert!((unc - u).abs() <= 0.1 * u.max(unc) + 0.5 * unit, "{} for {}", s, u);
    }
}

#[test]
fn verification_reports_are_deterministic_and_carry_witnesses() {
    assert_eq!(verify::verify_w_oracle(30, 8), verify::verify_w_oracle(30, 8));
    assert_eq!(verify::verify_slice_rules(500, 8), verify::verify_slice_rules(500, 8));
    let bad = verify::verify_w_oracle_with(&verify::reflex_swapped_w, 30, 8);
    assert!(!bad.passed && bad.failures > 0 && !bad.witnesses.is_empty());
    let json = serde_json::to_string(&bad).unwrap();
    assert!(json.contains("\"passed\":false"));
}
