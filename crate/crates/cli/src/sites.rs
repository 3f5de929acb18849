// Copyright 2026 The continuum-alloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Synthetic site lists shaped like the Melbourne edge-server data: dense
//! discs around each deployment area, a share of names without a
//! recognisable provider, and mixed-case provider names.

use continuum_alloc_core::rng::{keyed_rng, tag};
use continuum_alloc_core::suite::SuiteSpec;
use continuum_alloc_core::topogen::RawSite;
use continuum_alloc_core::GeoPoint;
use rand::Rng;

/// Metres per degree of latitude on the model sphere.
const M_PER_DEG: f64 = 6_371_000.0 * std::f64::consts::PI / 180.0;

const NAMES: [(&str, f64); 6] = [
    ("Telstra", 0.24),
    ("OPTUS", 0.20),
    ("vodafone", 0.18),
    ("Macquarie", 0.05),
    ("TELECOM", 0.05),
    ("", 0.28),
];

fn site_name(u: f64, i: u64) -> String {
    let mut acc = 0.0;
    for (prefix, p) in NAMES {
        acc += p;
        if u < acc {
            return if prefix.is_empty() {
                format!("site-{i:06}")
            } else {
                format!("{prefix}-{i:06}")
            };
        }
    }
    format!("site-{i:06}")
}

/// Sites uniformly spread over a disc around `center`.
pub fn disc_sites(
    center: &GeoPoint,
    radius_m: f64,
    count: usize,
    seed: u64,
    first_index: u64,
) -> Vec<RawSite> {
    (0..count as u64)
        .map(|j| {
            let i = first_index + j;
            let mut rng = keyed_rng(seed, i, tag::SITES);
            let r = radius_m * rng.random::<f64>().sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            let dlat = r * theta.sin() / M_PER_DEG;
            let dlon = r * theta.cos() / (M_PER_DEG * center.lat.to_radians().cos());
            let elev = center.elev_m + 20.0 * (rng.random::<f64>() - 0.5);
            let round = |v: f64, d: i32| (v * 10f64.powi(d)).round() / 10f64.powi(d);
            RawSite {
                name: site_name(rng.random(), i),
                location: GeoPoint::new(
                    round(center.lat + dlat, 6),
                    round(center.lon + dlon, 6),
                    round(elev, 1),
                ),
            }
        })
        .collect()
}

/// For every area and scale, enough sites inside that scale's radius that
/// about `density` times the scale's largest node bound survive provider
/// inference.
pub fn suite_sites(spec: &SuiteSpec, density: f64, seed: u64) -> Vec<RawSite> {
    let named: f64 = NAMES
        .iter()
        .filter(|(n, _)| !n.is_empty())
        .map(|(_, p)| p)
        .sum();
    let mut out = Vec::new();
    for app in &spec.apps {
        let Some(area) = spec.areas.get(app) else {
            continue;
        };
        for scale in &spec.scales {
            let (Some(radius), Some(range)) =
                (area.radius_m.get(scale), spec.node_ranges.get(scale))
            else {
                continue;
            };
            let want = range.1.max(spec.fixed_nodes_for_demand_sweep as u64) as f64;
            let count = (density * want / named).ceil() as usize;
            let batch = disc_sites(&area.center, *radius, count, seed, out.len() as u64);
            out.extend(batch);
        }
    }
    out
}
