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

//! Infrastructure-side model: offer (nodes and business rules), demand,
//! request and configurations, plus an independent constraint checker.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::fixed::{Budget, Fixed, Money};
use crate::geo;
use crate::mapping;

/// The five resource dimensions, in their fixed order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Ram,
    Storage,
    Cpu,
    Gpu,
    Tpu,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::Ram,
        Dimension::Storage,
        Dimension::Cpu,
        Dimension::Gpu,
        Dimension::Tpu,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Field name used in capacity vectors and usage limits.
    pub fn field_name(self) -> &'static str {
        match self {
            Dimension::Ram => "ram_gb",
            Dimension::Storage => "storage_gb",
            Dimension::Cpu => "cpu_units",
            Dimension::Gpu => "gpu_units",
            Dimension::Tpu => "tpu_units",
        }
    }

    /// Variable name in price expressions, e.g. `requested_ram`.
    pub fn variable_name(self) -> &'static str {
        match self {
            Dimension::Ram => "requested_ram",
            Dimension::Storage => "requested_storage",
            Dimension::Cpu => "requested_cpu",
            Dimension::Gpu => "requested_gpu",
            Dimension::Tpu => "requested_tpu",
        }
    }

    pub fn from_variable_name(name: &str) -> Option<Dimension> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.variable_name() == name)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.field_name())
    }
}

/// Quantities along (ram, storage, cpu, gpu, tpu).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "ResourceFields", into = "ResourceFields")]
pub struct ResourceVector([Fixed; 5]);

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResourceFields {
    ram_gb: Fixed,
    storage_gb: Fixed,
    cpu_units: Fixed,
    gpu_units: Fixed,
    tpu_units: Fixed,
}

impl From<ResourceFields> for ResourceVector {
    fn from(f: ResourceFields) -> Self {
        ResourceVector([
            f.ram_gb,
            f.storage_gb,
            f.cpu_units,
            f.gpu_units,
            f.tpu_units,
        ])
    }
}

impl From<ResourceVector> for ResourceFields {
    fn from(v: ResourceVector) -> Self {
        let [ram_gb, storage_gb, cpu_units, gpu_units, tpu_units] = v.0;
        ResourceFields {
            ram_gb,
            storage_gb,
            cpu_units,
            gpu_units,
            tpu_units,
        }
    }
}

impl ResourceVector {
    pub const ZERO: ResourceVector = ResourceVector([Fixed::ZERO; 5]);

    pub const fn new(values: [Fixed; 5]) -> Self {
        ResourceVector(values)
    }

    /// Convenience constructor from whole/decimal `f64` values.
    pub fn from_f64(values: [f64; 5]) -> Self {
        ResourceVector(values.map(|v| Fixed::from_f64(v).unwrap_or(Fixed::ZERO)))
    }

    pub fn values(&self) -> &[Fixed; 5] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (Dimension, Fixed)> + '_ {
        Dimension::ALL
            .into_iter()
            .map(move |d| (d, self.0[d.index()]))
    }

    pub fn is_non_negative(&self) -> bool {
        self.0.iter().all(|v| !v.is_negative())
    }

    /// Component-wise minimum.
    pub fn min(&self, other: &ResourceVector) -> ResourceVector {
        let mut out = *self;
        for i in 0..5 {
            out.0[i] = out.0[i].min(other.0[i]);
        }
        out
    }

    pub fn add(&self, other: &ResourceVector) -> ResourceVector {
        let mut out = *self;
        for i in 0..5 {
            out.0[i] += other.0[i];
        }
        out
    }

    pub fn bindings(&self) -> BTreeMap<Dimension, Fixed> {
        self.iter().collect()
    }
}

impl Index<Dimension> for ResourceVector {
    type Output = Fixed;
    fn index(&self, d: Dimension) -> &Fixed {
        &self.0[d.index()]
    }
}

impl IndexMut<Dimension> for ResourceVector {
    fn index_mut(&mut self, d: Dimension) -> &mut Fixed {
        &mut self.0[d.index()]
    }
}

impl fmt::Debug for ResourceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// True iff `a_i >= b_i` in every dimension.
pub fn dominates(a: &ResourceVector, b: &ResourceVector) -> bool {
    a.0.iter().zip(b.0.iter()).all(|(x, y)| x >= y)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
    #[serde(default)]
    pub elev_m: f64,
}

impl GeoPoint {
    pub const fn new(lat: f64, lon: f64, elev_m: f64) -> Self {
        GeoPoint { lat, lon, elev_m }
    }

    pub fn is_valid(&self) -> bool {
        (-90.0..=90.0).contains(&self.lat)
            && self.lon > -180.0
            && self.lon <= 180.0
            && self.elev_m.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NodeType {
    Camera,
    Sensor,
    NetworkNode,
    DataCenter,
    Computer,
}

impl NodeType {
    pub const ALL: [NodeType; 5] = [
        NodeType::Camera,
        NodeType::Sensor,
        NodeType::NetworkNode,
        NodeType::DataCenter,
        NodeType::Computer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeType::Camera => "CAMERA",
            NodeType::Sensor => "SENSOR",
            NodeType::NetworkNode => "NETWORK_NODE",
            NodeType::DataCenter => "DATA_CENTER",
            NodeType::Computer => "COMPUTER",
        }
    }
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Edge,
    Fog,
    Cloud,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Edge, Tier::Fog, Tier::Cloud];
}

/// Location, provider and constant rental term of a node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContextDescriptor {
    pub location: GeoPoint,
    pub provider: String,
    #[serde(default)]
    pub base_price: Money,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperationalMode {
    pub id: String,
    pub capacity: ResourceVector,
    pub unit_prices: ResourceVector,
    /// Overrides the node's context base price when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_price: Option<Money>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    #[serde(rename = "type")]
    pub node_type: NodeType,
    pub tier: Tier,
    #[serde(flatten)]
    pub context: ContextDescriptor,
    pub modes: Vec<OperationalMode>,
}

impl Node {
    pub fn mode(&self, mode_id: &str) -> Option<&OperationalMode> {
        self.modes.iter().find(|m| m.id == mode_id)
    }

    pub fn provider(&self) -> &str {
        &self.context.provider
    }

    /// Constant monthly term of `mode`: its own base price, else the node's.
    pub fn effective_base_price(&self, mode: &OperationalMode) -> Money {
        mode.base_price.unwrap_or(self.context.base_price)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    ProviderExclusion,
    NodeExclusion,
}

/// A symmetric mutual exclusion between two providers or two nodes.
#[derive(Clone, Debug, Eq, Serialize, Deserialize)]
pub struct BusinessRule {
    pub kind: RuleKind,
    pub a: String,
    pub b: String,
}

impl BusinessRule {
    pub fn provider_exclusion(a: impl Into<String>, b: impl Into<String>) -> Self {
        BusinessRule {
            kind: RuleKind::ProviderExclusion,
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn node_exclusion(a: impl Into<String>, b: impl Into<String>) -> Self {
        BusinessRule {
            kind: RuleKind::NodeExclusion,
            a: a.into(),
            b: b.into(),
        }
    }

    /// True when the unordered pair `{x, y}` is the rule's pair.
    pub fn links(&self, x: &str, y: &str) -> bool {
        (self.a == x && self.b == y) || (self.a == y && self.b == x)
    }
}

impl PartialEq for BusinessRule {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.links(&other.a, &other.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("node {node:?} has no mode {mode:?}")]
    UnknownMode { node: String, mode: String },
    #[error("node {0:?} selected more than once")]
    DuplicateNode(String),
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("invalid zone: {0}")]
    InvalidZone(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("price evaluation failed: {0}")]
    Price(String),
}

/// The offer: candidate nodes and the business rules over them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub currency: String,
    pub nodes: Vec<Node>,
    #[serde(default)]
    pub rules: Vec<BusinessRule>,
}

impl Topology {
    pub fn new(currency: impl Into<String>) -> Self {
        Topology {
            currency: currency.into(),
            nodes: Vec::new(),
            rules: Vec::new(),
        }
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn providers(&self) -> BTreeSet<String> {
        self.nodes
            .iter()
            .map(|n| n.context.provider.clone())
            .collect()
    }

    /// Check structural invariants. Returns warnings for rules that are
    /// inert (a provider exclusion naming a provider no node uses).
    pub fn validate(&self) -> Result<Vec<String>, DomainError> {
        let bad = |m: String| Err(DomainError::InvalidTopology(m));
        let mut ids = BTreeSet::new();
        for node in &self.nodes {
            if node.id.is_empty() || node.id.contains('#') {
                return bad(alloc::format!(
                    "node id {:?} is empty or contains '#'",
                    node.id
                ));
            }
            if !ids.insert(node.id.as_str()) {
                return bad(alloc::format!("duplicate node id {:?}", node.id));
            }
            if node.context.provider.is_empty() {
                return bad(alloc::format!("node {:?} has an empty provider", node.id));
            }
            if !node.context.location.is_valid() {
                return bad(alloc::format!("node {:?} has an invalid location", node.id));
            }
            if node.context.base_price.is_negative() {
                return bad(alloc::format!(
                    "node {:?} has a negative base price",
                    node.id
                ));
            }
            if node.modes.is_empty() {
                return bad(alloc::format!("node {:?} has no modes", node.id));
            }
            let mut modes = BTreeSet::new();
            for mode in &node.modes {
                if mode.id.is_empty() || mode.id.contains('#') {
                    return bad(alloc::format!(
                        "node {:?}: bad mode id {:?}",
                        node.id,
                        mode.id
                    ));
                }
                if !modes.insert(mode.id.as_str()) {
                    return bad(alloc::format!(
                        "node {:?}: duplicate mode {:?}",
                        node.id,
                        mode.id
                    ));
                }
                if !mode.capacity.is_non_negative()
                    || !mode.unit_prices.is_non_negative()
                    || mode.base_price.is_some_and(|p| p.is_negative())
                {
                    return bad(alloc::format!(
                        "node {:?} mode {:?} has negative values",
                        node.id,
                        mode.id
                    ));
                }
            }
        }
        let providers = self.providers();
        let mut warnings = Vec::new();
        for rule in &self.rules {
            if rule.a == rule.b {
                return bad(alloc::format!("rule excludes {:?} from itself", rule.a));
            }
            match rule.kind {
                RuleKind::ProviderExclusion => {
                    for p in [&rule.a, &rule.b] {
                        if !providers.contains(p) {
                            warnings.push(alloc::format!(
                                "provider exclusion ({}, {}) is inert: no node uses provider {}",
                                rule.a,
                                rule.b,
                                p
                            ));
                        }
                    }
                }
                RuleKind::NodeExclusion => {
                    for n in [&rule.a, &rule.b] {
                        if !ids.contains(n.as_str()) {
                            return bad(alloc::format!("node exclusion names unknown node {n:?}"));
                        }
                    }
                }
            }
        }
        Ok(warnings)
    }
}

/// Geographic polygon of interest (lat/lon; elevation ignored).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub vertices: Vec<GeoPoint>,
}

impl Zone {
    pub fn new(vertices: Vec<GeoPoint>) -> Result<Self, DomainError> {
        let zone = Zone { vertices };
        zone.validate()?;
        Ok(zone)
    }

    /// Axis-aligned square of half-side `half_side_m` centred on `center`.
    pub fn square_around(center: &GeoPoint, half_side_m: f64) -> Self {
        let dlat = (half_side_m / geo::EARTH_RADIUS_M).to_degrees();
        let dlon = dlat / libm::cos(center.lat.to_radians()).max(1e-9);
        let p = |a: f64, b: f64| GeoPoint::new(center.lat + a * dlat, center.lon + b * dlon, 0.0);
        Zone {
            vertices: alloc::vec![p(-1.0, -1.0), p(-1.0, 1.0), p(1.0, 1.0), p(1.0, -1.0)],
        }
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return Err(DomainError::InvalidZone("fewer than 3 vertices".into()));
        }
        if v.iter().any(|p| !p.is_valid()) {
            return Err(DomainError::InvalidZone("vertex out of range".into()));
        }
        let seg = |i: usize| {
            let a = &v[i];
            let b = &v[(i + 1) % n];
            ((a.lon, a.lat), (b.lon, b.lat))
        };
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let (a1, a2) = seg(i);
                let (b1, b2) = seg(j);
                if geo::segments_intersect(a1, a2, b1, b2) {
                    return Err(DomainError::InvalidZone(alloc::format!(
                        "edges {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Aggregate resource requirement of the users in a zone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Demand {
    pub vector: ResourceVector,
    pub zone: Zone,
    pub user_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Demand {
    pub fn new(vector: ResourceVector, zone: Zone, user_count: u64) -> Self {
        Demand {
            vector,
            zone,
            user_count,
            profile_id: None,
            seed: None,
        }
    }
}

/// Selection constraints orthogonal to offer and demand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub max_nodes: u32,
    pub max_distance_m: f64,
    #[serde(default)]
    pub max_price: Budget,
    pub allowed_providers: BTreeSet<String>,
    pub allowed_node_types: BTreeSet<NodeType>,
}

impl Request {
    /// A request that admits every node of `topology`.
    pub fn permissive(topology: &Topology) -> Self {
        Request {
            max_nodes: u32::MAX,
            max_distance_m: f64::MAX,
            max_price: Budget::Unbounded,
            allowed_providers: topology.providers(),
            allowed_node_types: NodeType::ALL.into_iter().collect(),
        }
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        if self.max_nodes == 0 {
            return Err(DomainError::InvalidRequest(
                "max_nodes must be positive".into(),
            ));
        }
        if !(self.max_distance_m >= 0.0) {
            return Err(DomainError::InvalidRequest(
                "max_distance_m must be >= 0".into(),
            ));
        }
        if self.max_price.limit().is_some_and(|m| m.is_negative()) {
            return Err(DomainError::InvalidRequest("max_price must be >= 0".into()));
        }
        if self.allowed_providers.is_empty() || self.allowed_node_types.is_empty() {
            return Err(DomainError::InvalidRequest(
                "allow-lists must be non-empty".into(),
            ));
        }
        Ok(())
    }
}

/// A deployment: at most one mode per selected node.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    selections: BTreeMap<String, String>,
}

impl Configuration {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn try_from_pairs<I, A, B>(pairs: I) -> Result<Self, DomainError>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut c = Configuration::new();
        for (n, m) in pairs {
            c.insert(n, m)?;
        }
        Ok(c)
    }

    pub fn insert(
        &mut self,
        node_id: impl Into<String>,
        mode_id: impl Into<String>,
    ) -> Result<(), DomainError> {
        let node_id = node_id.into();
        if self.selections.contains_key(&node_id) {
            return Err(DomainError::DuplicateNode(node_id));
        }
        self.selections.insert(node_id, mode_id.into());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.selections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selections.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.selections
            .iter()
            .map(|(n, m)| (n.as_str(), m.as_str()))
    }

    fn resolve<'t>(
        &self,
        topology: &'t Topology,
    ) -> Result<Vec<(&'t Node, &'t OperationalMode)>, DomainError> {
        self.iter()
            .map(|(n, m)| {
                let node = topology
                    .node(n)
                    .ok_or_else(|| DomainError::UnknownNode(n.into()))?;
                let mode = node.mode(m).ok_or_else(|| DomainError::UnknownMode {
                    node: n.into(),
                    mode: m.into(),
                })?;
                Ok((node, mode))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DemandShortfall {
        dimension: Dimension,
        amount: Fixed,
    },
    Cardinality {
        selected: u64,
        max: u32,
    },
    Budget {
        total: Money,
        max: Money,
    },
    Provider {
        node_id: String,
        provider: String,
    },
    Distance {
        node_id: String,
        distance_m: f64,
        max_m: f64,
    },
    NodeType {
        node_id: String,
        node_type: NodeType,
    },
    Exclusion {
        a: String,
        b: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport {
            feasible: violations.is_empty(),
            violations,
        }
    }
}

/// Sum over the configuration of each mode's capacity, capped per dimension
/// at the demand.
pub fn aggregate_capacity(
    config: &Configuration,
    topology: &Topology,
    demand: &Demand,
) -> Result<ResourceVector, DomainError> {
    Ok(config
        .resolve(topology)?
        .iter()
        .fold(ResourceVector::ZERO, |acc, (_, mode)| {
            acc.add(&mode.capacity.min(&demand.vector))
        }))
}

/// Check a configuration against demand coverage, the request and the
/// topology's business rules. Every violation is reported.
pub fn validate(
    config: &Configuration,
    topology: &Topology,
    demand: &Demand,
    request: &Request,
) -> Result<ValidationReport, DomainError> {
    let selected = config.resolve(topology)?;
    let mut violations = Vec::new();

    let covered = aggregate_capacity(config, topology, demand)?;
    for d in Dimension::ALL {
        if covered[d] < demand.vector[d] {
            violations.push(Violation::DemandShortfall {
                dimension: d,
                amount: demand.vector[d] - covered[d],
            });
        }
    }

    if selected.len() as u64 > request.max_nodes as u64 {
        violations.push(Violation::Cardinality {
            selected: selected.len() as u64,
            max: request.max_nodes,
        });
    }

    let mut total = Fixed::ZERO;
    for (node, mode) in &selected {
        total += mapping::mode_price(node, mode, &demand.vector)
            .map_err(|e| DomainError::Price(e.to_string()))?;
    }
    if let Budget::Limit(max) = request.max_price {
        if total > max {
            violations.push(Violation::Budget { total, max });
        }
    }

    for (node, _) in &selected {
        if !request.allowed_providers.contains(node.provider()) {
            violations.push(Violation::Provider {
                node_id: node.id.clone(),
                provider: node.provider().into(),
            });
        }
        if !request.allowed_node_types.contains(&node.node_type) {
            violations.push(Violation::NodeType {
                node_id: node.id.clone(),
                node_type: node.node_type,
            });
        }
        let dist = geo::zone_max_distance_m(&node.context.location, &demand.zone).value();
        if dist > request.max_distance_m {
            violations.push(Violation::Distance {
                node_id: node.id.clone(),
                distance_m: dist,
                max_m: request.max_distance_m,
            });
        }
    }

    for rule in &topology.rules {
        let hit = match rule.kind {
            RuleKind::ProviderExclusion => {
                selected.iter().any(|(n, _)| n.provider() == rule.a)
                    && selected.iter().any(|(n, _)| n.provider() == rule.b)
            }
            RuleKind::NodeExclusion => {
                selected.iter().any(|(n, _)| n.id == rule.a)
                    && selected.iter().any(|(n, _)| n.id == rule.b)
            }
        };
        if hit {
            violations.push(Violation::Exclusion {
                a: rule.a.clone(),
                b: rule.b.clone(),
            });
        }
    }

    Ok(ValidationReport::from_violations(violations))
}
