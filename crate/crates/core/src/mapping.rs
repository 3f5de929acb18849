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

//! Projection of a topology into the pricing domain, its specialisation to
//! a demand and request, and the reverse mapping of selected add-ons.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::canonical;
use crate::domain::{
    Configuration, Demand, DomainError, Node, OperationalMode, Request, ResourceVector, RuleKind,
    Topology,
};
use crate::fixed::Money;
use crate::geo;
use crate::pricing::{
    AddOn, AddOnPrice, DocState, ExprError, Filter, PriceExpression, PricingDocument, SchemaError,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MappingError {
    #[error("pricing document is already instantiated")]
    AlreadyInstantiated,
    #[error("add-on {id}: {source}")]
    Price { id: String, source: ExprError },
    #[error("malformed add-on id {0:?}, expected node_id#mode_id")]
    MalformedId(String),
    #[error("add-on {0:?} does not exist in the topology")]
    UnknownAddOn(String),
    #[error("node {0:?} selected with more than one mode")]
    DuplicateNode(String),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

/// Hex SHA-256 digests of the canonical inputs an instance was built from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub topology: String,
    pub demand: String,
    pub request: String,
}

/// An instantiated pricing document together with its filter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub pricing: PricingDocument,
    pub filter: Filter,
    pub provenance: Provenance,
}

impl ProblemInstance {
    pub fn validate(&self) -> Result<(), SchemaError> {
        self.pricing.validate()?;
        if self.pricing.state != DocState::Instantiated {
            return Err(SchemaError {
                path: "/pricing/state".into(),
                message: "instance pricing must be instantiated".into(),
            });
        }
        if !self.filter.min_usage.is_non_negative() {
            return Err(SchemaError {
                path: "/filter/min_usage".into(),
                message: "must be >= 0".into(),
            });
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, SchemaError> {
        let mut inst: ProblemInstance = serde_json::from_str(text).map_err(|e| SchemaError {
            path: String::new(),
            message: alloc::string::ToString::to_string(&e),
        })?;
        inst.pricing.normalize();
        inst.validate()?;
        Ok(inst)
    }
}

pub fn addon_id(node_id: &str, mode_id: &str) -> String {
    format!("{node_id}#{mode_id}")
}

pub fn split_addon_id(id: &str) -> Option<(&str, &str)> {
    match id.split_once('#') {
        Some((n, m)) if !n.is_empty() && !m.is_empty() && !m.contains('#') => Some((n, m)),
        _ => None,
    }
}

/// Monthly price of running `mode` of `node` against `demand`: the mode's
/// unit-cost expression evaluated on its demand-capped capacity, plus the
/// constant base term.
pub fn mode_price(
    node: &Node,
    mode: &OperationalMode,
    demand: &ResourceVector,
) -> Result<Money, ExprError> {
    let capped = mode.capacity.min(demand);
    let variable = PriceExpression::linear(&mode.unit_prices).eval(&capped.bindings())?;
    Ok(variable + node.effective_base_price(mode))
}

/// Project a topology into a symbolic pricing document: one add-on per
/// (node, mode), provider and node exclusions expanded to add-on pairs.
pub fn map_topology(t: &Topology) -> PricingDocument {
    let mut doc = PricingDocument::empty(t.currency.clone());
    for node in &t.nodes {
        doc.features.insert(node.node_type);
        for mode in &node.modes {
            doc.addons.push(AddOn {
                id: addon_id(&node.id, &mode.id),
                feature: node.node_type,
                provider: node.context.provider.clone(),
                location: node.context.location,
                extensions: mode.capacity,
                distance_m: 0.0,
                price: AddOnPrice::Symbolic(PriceExpression::linear(&mode.unit_prices)),
                base_price: node.effective_base_price(mode),
                excludes: BTreeSet::new(),
            });
        }
    }

    let mut by_provider: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    let mut by_node: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, a) in doc.addons.iter().enumerate() {
        by_provider.entry(a.provider.as_str()).or_default().push(i);
        by_node.entry(a.node_id()).or_default().push(i);
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for rule in &t.rules {
        let groups = match rule.kind {
            RuleKind::ProviderExclusion => &by_provider,
            RuleKind::NodeExclusion => &by_node,
        };
        let (Some(xs), Some(ys)) = (groups.get(rule.a.as_str()), groups.get(rule.b.as_str()))
        else {
            continue;
        };
        for &x in xs {
            for &y in ys {
                pairs.push((x, y));
            }
        }
    }
    for (x, y) in pairs {
        let (ix, iy) = (doc.addons[x].id.clone(), doc.addons[y].id.clone());
        doc.addons[x].excludes.insert(iy);
        doc.addons[y].excludes.insert(ix);
    }
    doc.normalize();
    doc
}

/// Specialise a symbolic document to a demand and request: cap extensions
/// at the demand, compute zone distances, resolve prices and derive the
/// filter.
pub fn encode(
    pricing: &PricingDocument,
    demand: &Demand,
    request: &Request,
) -> Result<ProblemInstance, MappingError> {
    if pricing.state != DocState::Symbolic {
        return Err(MappingError::AlreadyInstantiated);
    }
    let provenance = Provenance {
        topology: canonical::digest(pricing),
        demand: canonical::digest(demand),
        request: canonical::digest(request),
    };
    let mut doc = pricing.clone();
    for limit in &mut doc.usage_limits {
        if let Some(d) = limit.name.dimension() {
            limit.value = Some(demand.vector[d]);
        }
    }
    for addon in &mut doc.addons {
        addon.distance_m = geo::zone_max_distance_m(&addon.location, &demand.zone).value();
        addon.extensions = addon.extensions.min(&demand.vector);
        let AddOnPrice::Symbolic(expr) = &addon.price else {
            return Err(MappingError::AlreadyInstantiated);
        };
        let variable =
            expr.eval(&addon.extensions.bindings())
                .map_err(|source| MappingError::Price {
                    id: addon.id.clone(),
                    source,
                })?;
        addon.price = AddOnPrice::Resolved(variable + addon.base_price);
    }
    doc.state = DocState::Instantiated;
    doc.validate()?;
    let filter = Filter {
        min_usage: demand.vector,
        max_price: request.max_price,
        max_cardinality: request.max_nodes,
        max_distance_m: request.max_distance_m,
        allowed_features: request.allowed_node_types.clone(),
        allowed_providers: request.allowed_providers.clone(),
    };
    Ok(ProblemInstance {
        pricing: doc,
        filter,
        provenance,
    })
}

/// Map selected add-on ids back to (node, mode) pairs of `t`.
pub fn back_project<'a, I>(selection: I, t: &Topology) -> Result<Configuration, MappingError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut config = Configuration::new();
    for id in selection {
        let (node_id, mode_id) =
            split_addon_id(id).ok_or_else(|| MappingError::MalformedId(id.into()))?;
        let exists = t.node(node_id).and_then(|n| n.mode(mode_id)).is_some();
        if !exists {
            return Err(MappingError::UnknownAddOn(id.into()));
        }
        config.insert(node_id, mode_id).map_err(|e| match e {
            DomainError::DuplicateNode(n) => MappingError::DuplicateNode(n),
            _ => MappingError::UnknownAddOn(id.into()),
        })?;
    }
    Ok(config)
}

/// Add-on ids of a configuration (inverse of [`back_project`]).
pub fn forward_ids(config: &Configuration) -> Vec<String> {
    config.iter().map(|(n, m)| addon_id(n, m)).collect()
}
