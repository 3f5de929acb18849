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

//! Site enrichment and spatial topology sampling.
//!
//! Defaults in [`EnrichmentConfig::default`] are artifact defaults chosen to
//! be plausible for edge, fog and cloud hardware; they are not measured
//! values.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{
    BusinessRule, ContextDescriptor, Dimension, GeoPoint, Node, NodeType, OperationalMode,
    ResourceVector, Tier, Topology,
};
use crate::fixed::Fixed;
use crate::geo;
use crate::rng::{keyed_rng, tag};

/// Provider names in match-priority order.
pub const CANONICAL_PROVIDERS: [&str; 5] = ["OPTUS", "TELSTRA", "VODAFONE", "MACQUARIE", "TELECOM"];

/// Key in a tier's price table used when a provider has no entry.
pub const ANY_PROVIDER: &str = "*";

pub const DEFAULT_MODE: &str = "default";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawSite {
    pub name: String,
    pub location: GeoPoint,
}

/// First canonical provider whose name occurs in `name`, ignoring case.
pub fn infer_provider(name: &str) -> Option<&'static str> {
    let upper = name.to_ascii_uppercase();
    CANONICAL_PROVIDERS.into_iter().find(|p| upper.contains(p))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityRange {
    pub min: ResourceVector,
    pub max: ResourceVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnrichmentConfig {
    #[serde(default = "default_currency")]
    pub currency: String,
    pub seed: u64,
    pub tier_probabilities: BTreeMap<Tier, f64>,
    pub capacity_ranges: BTreeMap<Tier, CapacityRange>,
    /// tier -> provider (or `*`) -> unit prices
    pub unit_prices: BTreeMap<Tier, BTreeMap<String, ResourceVector>>,
    pub node_type_probabilities: BTreeMap<Tier, BTreeMap<NodeType, f64>>,
}

fn default_currency() -> String {
    "AUD".into()
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid enrichment config: {0}")]
pub struct ConfigError(pub String);

fn check_distribution<K: core::fmt::Debug>(
    what: &str,
    dist: &BTreeMap<K, f64>,
) -> Result<(), ConfigError> {
    if dist.values().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(ConfigError(format!(
            "{what}: probabilities must be finite and non-negative"
        )));
    }
    let total: f64 = dist.values().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(ConfigError(format!(
            "{what}: probabilities sum to {total}, expected 1"
        )));
    }
    Ok(())
}

fn vector(values: [f64; 5]) -> ResourceVector {
    ResourceVector::from_f64(values)
}

impl Default for EnrichmentConfig {
    fn default() -> Self {
        let tiers = [
            (
                Tier::Edge,
                0.60,
                [2.0, 32.0, 2.0, 0.0, 0.0],
                [16.0, 256.0, 8.0, 2.0, 1.0],
                [4.0, 0.10, 12.0, 180.0, 220.0],
                &[
                    (NodeType::Camera, 0.20),
                    (NodeType::Sensor, 0.20),
                    (NodeType::Computer, 0.35),
                    (NodeType::NetworkNode, 0.25),
                ][..],
            ),
            (
                Tier::Fog,
                0.28,
                [16.0, 256.0, 8.0, 0.0, 0.0],
                [64.0, 2048.0, 32.0, 4.0, 2.0],
                [3.0, 0.06, 9.0, 150.0, 190.0],
                &[
                    (NodeType::Computer, 0.35),
                    (NodeType::NetworkNode, 0.40),
                    (NodeType::DataCenter, 0.25),
                ][..],
            ),
            (
                Tier::Cloud,
                0.12,
                [64.0, 2048.0, 32.0, 2.0, 0.0],
                [512.0, 16384.0, 128.0, 16.0, 8.0],
                [2.0, 0.03, 6.0, 120.0, 160.0],
                &[(NodeType::DataCenter, 1.0)][..],
            ),
        ];
        let provider_factor = [
            ("OPTUS", 1.0),
            ("TELSTRA", 1.08),
            ("VODAFONE", 0.95),
            ("MACQUARIE", 1.12),
            ("TELECOM", 0.9),
        ];
        let mut cfg = EnrichmentConfig {
            currency: default_currency(),
            seed: 0,
            tier_probabilities: BTreeMap::new(),
            capacity_ranges: BTreeMap::new(),
            unit_prices: BTreeMap::new(),
            node_type_probabilities: BTreeMap::new(),
        };
        for (tier, p, lo, hi, prices, types) in tiers {
            cfg.tier_probabilities.insert(tier, p);
            cfg.capacity_ranges.insert(
                tier,
                CapacityRange {
                    min: vector(lo),
                    max: vector(hi),
                },
            );
            let mut table = BTreeMap::new();
            table.insert(ANY_PROVIDER.to_string(), vector(prices));
            for (name, factor) in provider_factor {
                table.insert(name.to_string(), vector(prices.map(|v| v * factor)));
            }
            cfg.unit_prices.insert(tier, table);
            cfg.node_type_probabilities
                .insert(tier, types.iter().copied().collect());
        }
        cfg
    }
}

impl EnrichmentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        check_distribution("tier_probabilities", &self.tier_probabilities)?;
        for (tier, p) in &self.tier_probabilities {
            if *p == 0.0 {
                continue;
            }
            let range = self
                .capacity_ranges
                .get(tier)
                .ok_or_else(|| ConfigError(format!("capacity_ranges: missing tier {tier:?}")))?;
            if !range.min.is_non_negative() {
                return Err(ConfigError(format!(
                    "capacity_ranges.{tier:?}: negative minimum"
                )));
            }
            for d in Dimension::ALL {
                if range.min[d] > range.max[d] {
                    return Err(ConfigError(format!(
                        "capacity_ranges.{tier:?}.{d}: min exceeds max"
                    )));
                }
            }
            let prices = self
                .unit_prices
                .get(tier)
                .ok_or_else(|| ConfigError(format!("unit_prices: missing tier {tier:?}")))?;
            if prices.values().any(|v| !v.is_non_negative()) {
                return Err(ConfigError(format!("unit_prices.{tier:?}: negative price")));
            }
            let types = self.node_type_probabilities.get(tier).ok_or_else(|| {
                ConfigError(format!("node_type_probabilities: missing tier {tier:?}"))
            })?;
            check_distribution("node_type_probabilities", types)?;
        }
        Ok(())
    }

    fn prices_for(&self, tier: Tier, provider: &str) -> Option<&ResourceVector> {
        let table = self.unit_prices.get(&tier)?;
        table.get(provider).or_else(|| table.get(ANY_PROVIDER))
    }
}

/// Pick a key by inverse CDF over `dist` in key order.
fn draw<K: Copy>(dist: &BTreeMap<K, f64>, u: f64) -> Option<K> {
    let mut acc = 0.0;
    let mut last = None;
    for (k, p) in dist {
        if *p <= 0.0 {
            continue;
        }
        acc += p;
        last = Some(*k);
        if u < acc {
            return last;
        }
    }
    last
}

/// Turn provider-bearing sites into nodes with one `default` mode.
/// Draws for site `i` depend only on `(cfg.seed, i)`.
pub fn enrich(sites: &[RawSite], cfg: &EnrichmentConfig) -> Result<Vec<Node>, ConfigError> {
    cfg.validate()?;
    let mut nodes = Vec::new();
    for (i, site) in sites.iter().enumerate() {
        let Some(provider) = infer_provider(&site.name) else {
            continue;
        };
        let idx = i as u64;
        let tier = draw(
            &cfg.tier_probabilities,
            keyed_rng(cfg.seed, idx, tag::TIER).random(),
        )
        .ok_or_else(|| ConfigError("tier_probabilities: empty".into()))?;
        let node_type = draw(
            &cfg.node_type_probabilities[&tier],
            keyed_rng(cfg.seed, idx, tag::NODE_TYPE).random(),
        )
        .ok_or_else(|| ConfigError("node_type_probabilities: empty".into()))?;
        let range = &cfg.capacity_ranges[&tier];
        let mut rng = keyed_rng(cfg.seed, idx, tag::CAPACITY);
        let mut capacity = ResourceVector::ZERO;
        for d in Dimension::ALL {
            let (lo, hi) = (range.min[d], range.max[d]);
            let u: f64 = rng.random();
            // two decimals, clamped so rounding never leaves the range
            let v = libm::round((lo.to_f64() + u * (hi.to_f64() - lo.to_f64())) * 100.0) / 100.0;
            capacity[d] = Fixed::from_f64(v).unwrap_or(hi).max(lo).min(hi);
        }
        let unit_prices = *cfg
            .prices_for(tier, provider)
            .ok_or_else(|| ConfigError(format!("unit_prices: no entry for {tier:?}/{provider}")))?;
        nodes.push(Node {
            id: format!("n{i:06}"),
            node_type,
            tier,
            context: ContextDescriptor {
                location: site.location,
                provider: provider.into(),
                base_price: Fixed::ZERO,
            },
            modes: alloc::vec![OperationalMode {
                id: DEFAULT_MODE.into(),
                capacity,
                unit_prices,
                base_price: None
            }],
        });
    }
    Ok(nodes)
}

/// Nodes within `radius_m` (ECEF) of `center`, optionally capped at
/// `max_nodes` by a seeded uniform subset. Input order is preserved.
pub fn sample_topology(
    nodes: &[Node],
    center: &GeoPoint,
    radius_m: f64,
    max_nodes: Option<usize>,
    rules: &[BusinessRule],
    seed: u64,
    currency: &str,
) -> Topology {
    let inside: Vec<&Node> = nodes
        .iter()
        .filter(|n| geo::ecef_distance_m(&n.context.location, center).value() <= radius_m)
        .collect();
    let chosen: Vec<Node> = match max_nodes {
        Some(k) if inside.len() > k => {
            let mut rng = keyed_rng(seed, 0, tag::SAMPLE);
            let mut picked = index::sample(&mut rng, inside.len(), k).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| inside[i].clone()).collect()
        }
        _ => inside.into_iter().cloned().collect(),
    };
    Topology {
        currency: currency.into(),
        nodes: chosen,
        rules: rules.to_vec(),
    }
}
