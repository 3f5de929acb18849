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

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::expr::PriceExpression;
use crate::canonical;
use crate::domain::{Dimension, GeoPoint, NodeType, ResourceVector};
use crate::fixed::{Budget, Money};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocState {
    Symbolic,
    Instantiated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum UsageLimitName {
    #[serde(rename = "ram_gb")]
    RamGb,
    #[serde(rename = "storage_gb")]
    StorageGb,
    #[serde(rename = "cpu_units")]
    CpuUnits,
    #[serde(rename = "gpu_units")]
    GpuUnits,
    #[serde(rename = "tpu_units")]
    TpuUnits,
    #[serde(rename = "distance_m")]
    DistanceM,
}

impl UsageLimitName {
    pub fn resource(d: Dimension) -> Self {
        match d {
            Dimension::Ram => UsageLimitName::RamGb,
            Dimension::Storage => UsageLimitName::StorageGb,
            Dimension::Cpu => UsageLimitName::CpuUnits,
            Dimension::Gpu => UsageLimitName::GpuUnits,
            Dimension::Tpu => UsageLimitName::TpuUnits,
        }
    }

    pub fn dimension(self) -> Option<Dimension> {
        Dimension::ALL
            .into_iter()
            .find(|d| UsageLimitName::resource(*d) == self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Extensions of all selected add-ons add up.
    Summed,
    /// Checked on each selected add-on on its own.
    PerAddon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UsageLimit {
    pub name: UsageLimitName,
    pub aggregation: Aggregation,
    /// Required minimum for resource limits once instantiated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<crate::fixed::Fixed>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AddOnPrice {
    Symbolic(PriceExpression),
    Resolved(Money),
}

impl AddOnPrice {
    pub fn resolved(&self) -> Option<Money> {
        match self {
            AddOnPrice::Resolved(m) => Some(*m),
            AddOnPrice::Symbolic(_) => None,
        }
    }
}

/// One selectable operational mode of one node, id `node_id#mode_id`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AddOn {
    pub id: String,
    pub feature: NodeType,
    pub provider: String,
    pub location: GeoPoint,
    pub extensions: ResourceVector,
    #[serde(default)]
    pub distance_m: f64,
    pub price: AddOnPrice,
    #[serde(default)]
    pub base_price: Money,
    #[serde(default)]
    pub excludes: BTreeSet<String>,
}

impl AddOn {
    pub fn node_id(&self) -> &str {
        self.id.split_once('#').map(|(n, _)| n).unwrap_or(&self.id)
    }
}

/// Constraints restricting valid subscriptions of a document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Filter {
    pub min_usage: ResourceVector,
    pub max_price: Budget,
    pub max_cardinality: u32,
    pub max_distance_m: f64,
    pub allowed_features: BTreeSet<NodeType>,
    pub allowed_providers: BTreeSet<String>,
}

impl Filter {
    /// A filter with the given minimum usage and no other restriction.
    pub fn unconstrained(min_usage: ResourceVector, doc: &PricingDocument) -> Self {
        Filter {
            min_usage,
            max_price: Budget::Unbounded,
            max_cardinality: u32::MAX,
            max_distance_m: f64::MAX,
            allowed_features: NodeType::ALL.into_iter().collect(),
            allowed_providers: doc.addons.iter().map(|a| a.provider.clone()).collect(),
        }
    }
}

/// Schema violation located by a JSON-pointer-style path.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl SchemaError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PricingDocument {
    #[serde(rename = "spec")]
    pub schema_version: u32,
    pub currency: String,
    pub state: DocState,
    pub features: BTreeSet<NodeType>,
    pub usage_limits: Vec<UsageLimit>,
    pub addons: Vec<AddOn>,
}

impl PricingDocument {
    /// An empty symbolic document with the standard usage limits.
    pub fn empty(currency: impl Into<String>) -> Self {
        let mut usage_limits: Vec<UsageLimit> = Dimension::ALL
            .into_iter()
            .map(|d| UsageLimit {
                name: UsageLimitName::resource(d),
                aggregation: Aggregation::Summed,
                value: None,
            })
            .collect();
        usage_limits.push(UsageLimit {
            name: UsageLimitName::DistanceM,
            aggregation: Aggregation::PerAddon,
            value: None,
        });
        PricingDocument {
            schema_version: SCHEMA_VERSION,
            currency: currency.into(),
            state: DocState::Symbolic,
            features: BTreeSet::new(),
            usage_limits,
            addons: Vec::new(),
        }
    }

    pub fn addon(&self, id: &str) -> Option<&AddOn> {
        self.addons.iter().find(|a| a.id == id)
    }

    /// Make exclusions symmetric, make sibling modes of a node exclude each
    /// other and drop self-exclusions.
    pub fn normalize(&mut self) {
        let mut by_node: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for a in &self.addons {
            by_node
                .entry(a.node_id().to_string())
                .or_default()
                .push(a.id.clone());
        }
        let mut edges: Vec<(String, String)> = Vec::new();
        for a in &self.addons {
            for b in &a.excludes {
                edges.push((b.clone(), a.id.clone()));
            }
            for sib in &by_node[a.node_id()] {
                edges.push((a.id.clone(), sib.clone()));
            }
        }
        let index: BTreeMap<String, usize> = self
            .addons
            .iter()
            .enumerate()
            .map(|(i, a)| (a.id.clone(), i))
            .collect();
        for (from, to) in edges {
            if from == to {
                continue;
            }
            if let Some(&i) = index.get(&from) {
                self.addons[i].excludes.insert(to);
            }
        }
        for a in &mut self.addons {
            let id = a.id.clone();
            a.excludes.remove(&id);
        }
    }

    pub fn resource_limit(&self, d: Dimension) -> Option<crate::fixed::Fixed> {
        self.usage_limits
            .iter()
            .find(|u| u.name == UsageLimitName::resource(d))
            .and_then(|u| u.value)
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SchemaError::at(
                "/spec",
                format!("unsupported version {}", self.schema_version),
            ));
        }
        if self.currency.is_empty() {
            return Err(SchemaError::at("/currency", "empty currency"));
        }

        let mut seen = BTreeSet::new();
        for (i, u) in self.usage_limits.iter().enumerate() {
            let path = format!("/usage_limits/{i}");
            if !seen.insert(u.name) {
                return Err(SchemaError::at(path, "duplicate usage limit"));
            }
            let expected = match u.name {
                UsageLimitName::DistanceM => Aggregation::PerAddon,
                _ => Aggregation::Summed,
            };
            if u.aggregation != expected {
                return Err(SchemaError::at(
                    format!("{path}/aggregation"),
                    "wrong aggregation",
                ));
            }
            match (self.state, u.name.dimension(), u.value) {
                (DocState::Instantiated, Some(_), None) => {
                    return Err(SchemaError::at(
                        format!("{path}/value"),
                        "missing demand value",
                    ))
                }
                (_, _, Some(v)) if v.is_negative() => {
                    return Err(SchemaError::at(format!("{path}/value"), "negative value"))
                }
                _ => {}
            }
        }
        if seen.len() != 6 {
            return Err(SchemaError::at(
                "/usage_limits",
                "expected the five resource limits and distance_m",
            ));
        }

        let ids: BTreeSet<&str> = self.addons.iter().map(|a| a.id.as_str()).collect();
        if ids.len() != self.addons.len() {
            let mut dup = BTreeSet::new();
            for (i, a) in self.addons.iter().enumerate() {
                if !dup.insert(a.id.as_str()) {
                    return Err(SchemaError::at(
                        format!("/addons/{i}/id"),
                        "duplicate add-on id",
                    ));
                }
            }
        }
        for (i, a) in self.addons.iter().enumerate() {
            let path = format!("/addons/{i}");
            match a.id.split_once('#') {
                Some((n, m)) if !n.is_empty() && !m.is_empty() && !m.contains('#') => {}
                _ => {
                    return Err(SchemaError::at(
                        format!("{path}/id"),
                        "expected node_id#mode_id",
                    ))
                }
            }
            if !self.features.contains(&a.feature) {
                return Err(SchemaError::at(
                    format!("{path}/feature"),
                    "feature not declared",
                ));
            }
            if a.provider.is_empty() {
                return Err(SchemaError::at(
                    format!("{path}/provider"),
                    "empty provider",
                ));
            }
            if !(a.distance_m >= 0.0) {
                return Err(SchemaError::at(
                    format!("{path}/distance_m"),
                    "must be >= 0",
                ));
            }
            if a.base_price.is_negative() {
                return Err(SchemaError::at(
                    format!("{path}/base_price"),
                    "must be >= 0",
                ));
            }
            for (d, v) in a.extensions.iter() {
                let p = format!("{path}/extensions/{}", d.field_name());
                if v.is_negative() {
                    return Err(SchemaError::at(p, "must be >= 0"));
                }
                if self.state == DocState::Instantiated {
                    if let Some(limit) = self.resource_limit(d) {
                        if v > limit {
                            return Err(SchemaError::at(
                                p,
                                format!("extension {v} exceeds demand {limit}"),
                            ));
                        }
                    }
                }
            }
            match (&a.price, self.state) {
                (AddOnPrice::Symbolic(_), DocState::Symbolic) => {}
                (AddOnPrice::Resolved(m), DocState::Instantiated) if !m.is_negative() => {}
                (AddOnPrice::Resolved(_), DocState::Instantiated) => {
                    return Err(SchemaError::at(format!("{path}/price"), "negative price"))
                }
                _ => {
                    return Err(SchemaError::at(
                        format!("{path}/price"),
                        "price kind does not match document state",
                    ))
                }
            }
            for x in &a.excludes {
                if !ids.contains(x.as_str()) {
                    return Err(SchemaError::at(
                        format!("{path}/excludes"),
                        format!("unknown add-on {x:?}"),
                    ));
                }
                let back = self.addon(x).is_some_and(|o| o.excludes.contains(&a.id));
                if !back {
                    return Err(SchemaError::at(
                        format!("{path}/excludes"),
                        format!("{x:?} is not symmetric"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Canonical JSON: sorted keys, four-decimal amounts, canonical expressions.
    pub fn to_canonical_json(&self) -> String {
        canonical::to_pretty_string(self)
    }

    /// Parse, normalise and validate a JSON document.
    pub fn from_json(text: &str) -> Result<Self, SchemaError> {
        let mut doc: PricingDocument =
            serde_json::from_str(text).map_err(|e| SchemaError::at("", e.to_string()))?;
        doc.normalize();
        doc.validate()?;
        Ok(doc)
    }
}

/// Serialize to canonical JSON and parse back.
pub fn roundtrip_document(doc: &PricingDocument) -> Result<PricingDocument, SchemaError> {
    doc.validate()?;
    PricingDocument::from_json(&doc.to_canonical_json())
}
