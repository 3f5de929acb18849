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

//! Benchmark design: suite specification, scenario expansion, per-instance
//! preparation and runtime aggregation. Timing itself lives with the std
//! runner.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::demandgen::{generate_demand, AppProfile, ProfileError};
use crate::domain::{BusinessRule, Demand, GeoPoint, Node, NodeType, Request, Topology, Zone};
use crate::fixed::{Budget, Money};
use crate::geo;
use crate::mapping::{encode, map_topology, MappingError, ProblemInstance};
use crate::rng::{derive_seed, tag};
use crate::solver::SolveStatus;
use crate::stats::{median_ci, StatsError};
use crate::topogen::sample_topology;

pub const LEVELS: u8 = 4;
pub const CI_LEVEL: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Scale {
    S,
    M,
    L,
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::S => "S",
            Scale::M => "M",
            Scale::L => "L",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    Demand,
    Nodes,
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sweep::Demand => "demand",
            Sweep::Nodes => "nodes",
        })
    }
}

/// Inclusive integer range, written `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange(pub u64, pub u64);

impl IntRange {
    /// Four uniformly spaced values from min to max, rounded half-up.
    pub fn levels(self) -> [u64; LEVELS as usize] {
        let (lo, hi) = (self.0, self.1);
        let span = hi - lo;
        let steps = (LEVELS - 1) as u64;
        // round((steps*lo + k*span) / steps) with halves rounded up
        core::array::from_fn(|k| (2 * (steps * lo + k as u64 * span) + steps) / (2 * steps))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserRange {
    pub app: String,
    pub scale: Scale,
    pub min: u64,
    pub max: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestTemplate {
    pub app: String,
    pub scale: Scale,
    pub max_distance_m: f64,
    pub max_nodes: u32,
    pub allowed_node_types: BTreeSet<NodeType>,
    #[serde(default)]
    pub max_price: Budget,
}

/// Where an app is deployed: sampling centre, sampling radius per scale and
/// the zone of interest for distance constraints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeploymentArea {
    pub center: GeoPoint,
    pub radius_m: BTreeMap<Scale, f64>,
    pub zone: Zone,
}

fn default_fixed_nodes() -> u32 {
    20
}

fn default_fixed_users() -> u64 {
    100
}

fn default_currency() -> String {
    "AUD".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    pub apps: Vec<String>,
    pub scales: Vec<Scale>,
    pub user_ranges: Vec<UserRange>,
    pub node_ranges: BTreeMap<Scale, IntRange>,
    pub request_table: Vec<RequestTemplate>,
    pub areas: BTreeMap<String, DeploymentArea>,
    pub providers: BTreeSet<String>,
    #[serde(default)]
    pub rules: Vec<BusinessRule>,
    /// Overrides for the built-in profiles, keyed by app.
    #[serde(default)]
    pub profiles: BTreeMap<String, AppProfile>,
    #[serde(default = "default_fixed_nodes")]
    pub fixed_nodes_for_demand_sweep: u32,
    #[serde(default = "default_fixed_users")]
    pub fixed_users_for_node_sweep: u64,
    pub instances_per_type: u32,
    pub master_seed: u64,
    #[serde(default = "default_currency")]
    pub currency: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SuiteError {
    #[error("invalid suite: {0}")]
    Invalid(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

impl SuiteSpec {
    pub fn user_range(&self, app: &str, scale: Scale) -> Option<IntRange> {
        self.user_ranges
            .iter()
            .find(|r| r.app == app && r.scale == scale)
            .map(|r| IntRange(r.min, r.max))
    }

    pub fn request_template(&self, app: &str, scale: Scale) -> Option<&RequestTemplate> {
        self.request_table
            .iter()
            .find(|r| r.app == app && r.scale == scale)
    }

    pub fn profile(&self, app: &str) -> Option<AppProfile> {
        self.profiles
            .get(app)
            .cloned()
            .or_else(|| AppProfile::builtin(app))
    }

    pub fn validate(&self) -> Result<(), SuiteError> {
        let bad = |m: String| Err(SuiteError::Invalid(m));
        if self.instances_per_type == 0 {
            return bad("instances_per_type must be at least 1".into());
        }
        if self.fixed_nodes_for_demand_sweep == 0 {
            return bad("fixed_nodes_for_demand_sweep must be at least 1".into());
        }
        for r in &self.user_ranges {
            if r.min > r.max {
                return bad(format!("user range {}/{}: min exceeds max", r.app, r.scale));
            }
        }
        for (s, r) in &self.node_ranges {
            if r.0 > r.1 || r.0 == 0 {
                return bad(format!("node range {s}: need 1 <= min <= max"));
            }
        }
        for app in &self.apps {
            self.profile(app)
                .ok_or_else(|| SuiteError::Invalid(format!("no profile for app {app}")))?
                .validate()?;
            let area = self
                .areas
                .get(app)
                .ok_or_else(|| SuiteError::Invalid(format!("no area for app {app}")))?;
            area.zone
                .validate()
                .map_err(|e| SuiteError::Invalid(format!("area {app}: {e}")))?;
            for &scale in &self.scales {
                if self.user_range(app, scale).is_none() {
                    return bad(format!("no user range for {app}/{scale}"));
                }
                if !self.node_ranges.contains_key(&scale) {
                    return bad(format!("no node range for scale {scale}"));
                }
                let Some(t) = self.request_template(app, scale) else {
                    return bad(format!("no request for {app}/{scale}"));
                };
                if t.max_nodes == 0 || !(t.max_distance_m >= 0.0) {
                    return bad(format!(
                        "request {app}/{scale}: need max_nodes >= 1 and max_distance_m >= 0"
                    ));
                }
                match area.radius_m.get(&scale) {
                    Some(r) if *r >= 0.0 => {}
                    _ => return bad(format!("area {app}: no radius for scale {scale}")),
                }
            }
        }
        Ok(())
    }

    /// Total instances the suite asks for.
    pub fn instance_count(&self) -> u64 {
        self.apps.len() as u64
            * self.scales.len() as u64
            * 2
            * LEVELS as u64
            * self.instances_per_type as u64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioType {
    pub index: usize,
    pub app: String,
    pub scale: Scale,
    pub sweep: Sweep,
    pub level: u8,
    pub users: u64,
    /// cap on candidate nodes in the sampled topology
    pub max_nodes: u32,
    pub request: Request,
}

/// Per (app, scale): four demand-sweep types then four node-sweep types.
pub fn expand_suite(spec: &SuiteSpec) -> Result<Vec<ScenarioType>, SuiteError> {
    spec.validate()?;
    let mut out = Vec::new();
    for app in &spec.apps {
        for &scale in &spec.scales {
            let t = spec.request_template(app, scale).expect("validated");
            let request = Request {
                max_nodes: t.max_nodes,
                max_distance_m: t.max_distance_m,
                max_price: t.max_price,
                allowed_providers: spec.providers.clone(),
                allowed_node_types: t.allowed_node_types.clone(),
            };
            let users = spec.user_range(app, scale).expect("validated").levels();
            let nodes = spec.node_ranges[&scale].levels();
            for (sweep, values) in [(Sweep::Demand, users), (Sweep::Nodes, nodes)] {
                for (i, v) in values.into_iter().enumerate() {
                    let (users, max_nodes) = match sweep {
                        Sweep::Demand => (v, spec.fixed_nodes_for_demand_sweep),
                        Sweep::Nodes => (spec.fixed_users_for_node_sweep, v as u32),
                    };
                    out.push(ScenarioType {
                        index: out.len(),
                        app: app.clone(),
                        scale,
                        sweep,
                        level: i as u8 + 1,
                        users,
                        max_nodes,
                        request: request.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Seed for instance `k` of scenario type `type_index`.
pub fn instance_seed(master_seed: u64, type_index: usize, k: u32) -> u64 {
    derive_seed(&[master_seed, type_index as u64, k as u64, tag::INSTANCE])
}

/// Number of dataset nodes inside the sampling sphere of a scenario.
pub fn candidates_in_area(spec: &SuiteSpec, scenario: &ScenarioType, dataset: &[Node]) -> usize {
    let area = &spec.areas[&scenario.app];
    let r = area.radius_m[&scenario.scale];
    dataset
        .iter()
        .filter(|n| geo::ecef_distance_m(&n.context.location, &area.center).value() <= r)
        .count()
}

/// Whether the dataset can supply the scenario's candidate-node cap.
pub fn dataset_supports(spec: &SuiteSpec, scenario: &ScenarioType, dataset: &[Node]) -> bool {
    candidates_in_area(spec, scenario, dataset) >= scenario.max_nodes as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreparedInstance {
    pub seed: u64,
    pub topology: Topology,
    pub demand: Demand,
    pub instance: ProblemInstance,
}

/// Sample, generate, map and encode instance `k` of a scenario.
pub fn prepare_instance(
    spec: &SuiteSpec,
    scenario: &ScenarioType,
    dataset: &[Node],
    k: u32,
) -> Result<PreparedInstance, SuiteError> {
    let seed = instance_seed(spec.master_seed, scenario.index, k);
    let area = spec
        .areas
        .get(&scenario.app)
        .ok_or_else(|| SuiteError::Invalid(format!("no area for {}", scenario.app)))?;
    let radius = *area
        .radius_m
        .get(&scenario.scale)
        .ok_or_else(|| SuiteError::Invalid(format!("no radius for {}", scenario.scale)))?;
    let topology = sample_topology(
        dataset,
        &area.center,
        radius,
        Some(scenario.max_nodes as usize),
        &spec.rules,
        derive_seed(&[seed, tag::TOPOLOGY]),
        &spec.currency,
    );
    let profile = spec
        .profile(&scenario.app)
        .ok_or_else(|| SuiteError::Invalid(format!("no profile for {}", scenario.app)))?;
    let demand = generate_demand(
        scenario.users,
        &profile,
        area.zone.clone(),
        derive_seed(&[seed, tag::DEMAND]),
    )?;
    let instance = encode(&map_topology(&topology), &demand, &scenario.request)?;
    Ok(PreparedInstance {
        seed,
        topology,
        demand,
        instance,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub scenario: ScenarioType,
    pub samples: Vec<f64>,
    pub median_s: f64,
    pub ci_low_s: f64,
    pub ci_high_s: f64,
    pub n_optimal: u32,
    pub n_infeasible: u32,
    /// set when the dataset could not supply the scenario
    #[serde(default)]
    pub skipped: bool,
}

impl BenchResult {
    pub fn from_samples(
        scenario: ScenarioType,
        samples: Vec<f64>,
        statuses: &[SolveStatus],
    ) -> Result<Self, SuiteError> {
        let ci = median_ci(&samples, CI_LEVEL)?;
        let count = |s: SolveStatus| statuses.iter().filter(|x| **x == s).count() as u32;
        Ok(BenchResult {
            scenario,
            median_s: ci.median,
            ci_low_s: ci.low,
            ci_high_s: ci.high,
            samples,
            n_optimal: count(SolveStatus::Optimal),
            n_infeasible: count(SolveStatus::Infeasible),
            skipped: false,
        })
    }

    pub fn skipped(scenario: ScenarioType) -> Self {
        BenchResult {
            scenario,
            samples: Vec::new(),
            median_s: 0.0,
            ci_low_s: 0.0,
            ci_high_s: 0.0,
            n_optimal: 0,
            n_infeasible: 0,
            skipped: true,
        }
    }
}

/// Outcome of one solved instance; everything except the time is
/// reproducible from the master seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub type_index: usize,
    pub k: u32,
    pub seed: u64,
    pub candidates: usize,
    pub status: SolveStatus,
    pub total_cost: Money,
    pub selection: Vec<String>,
    pub solve_time_s: f64,
}

struct AppDefaults {
    id: &'static str,
    center: GeoPoint,
    zone_half_side_m: f64,
    radius_m: [f64; 3],
    users: [(u64, u64); 3],
    distance_m: [f64; 3],
    types: &'static [NodeType],
}

/// The four-app, three-scale design. Centres and radii are artifact choices.
pub fn default_suite() -> SuiteSpec {
    use NodeType::*;
    let apps = [
        AppDefaults {
            id: "cctv",
            // Royal Melbourne Hospital
            center: GeoPoint::new(-37.7993, 144.9560, 30.0),
            zone_half_side_m: 200.0,
            radius_m: [1_500.0, 2_500.0, 4_000.0],
            users: [(20, 80), (100, 400), (500, 2000)],
            distance_m: [500_000.0, 800_000.0, 1_000_000.0],
            types: &[Camera, NetworkNode, DataCenter],
        },
        AppDefaults {
            id: "vr",
            // Melbourne city centre
            center: GeoPoint::new(-37.8136, 144.9631, 20.0),
            zone_half_side_m: 500.0,
            radius_m: [3_000.0, 6_500.0, 14_000.0],
            users: [(25, 100), (200, 800), (1500, 8000)],
            distance_m: [3_750.0, 7_500.0, 15_000.0],
            types: &[Camera, Sensor, NetworkNode, DataCenter],
        },
        AppDefaults {
            id: "robot",
            // Port of Melbourne
            center: GeoPoint::new(-37.8200, 144.9120, 5.0),
            zone_half_side_m: 100.0,
            radius_m: [350.0, 850.0, 1_350.0],
            users: [(15, 60), (75, 300), (250, 1000)],
            distance_m: [500.0, 1_000.0, 1_500.0],
            types: &[Sensor, Computer, NetworkNode],
        },
        AppDefaults {
            id: "lidar",
            // Sunbury
            center: GeoPoint::new(-37.5780, 144.7260, 200.0),
            zone_half_side_m: 1_000.0,
            radius_m: [1_000.0, 3_500.0, 8_500.0],
            users: [(50, 200), (500, 2000), (2500, 5000)],
            distance_m: [2_500.0, 5_000.0, 10_000.0],
            types: &[Sensor, NetworkNode, DataCenter],
        },
    ];
    let scales = [Scale::S, Scale::M, Scale::L];
    let max_nodes = [3, 6, 10];
    let mut spec = SuiteSpec {
        apps: apps.iter().map(|a| a.id.to_string()).collect(),
        scales: scales.to_vec(),
        user_ranges: Vec::new(),
        node_ranges: [
            (Scale::S, IntRange(5, 30)),
            (Scale::M, IntRange(50, 200)),
            (Scale::L, IntRange(300, 500)),
        ]
        .into_iter()
        .collect(),
        request_table: Vec::new(),
        areas: BTreeMap::new(),
        providers: ["TELSTRA", "OPTUS", "VODAFONE"]
            .iter()
            .map(|p| p.to_string())
            .collect(),
        rules: alloc::vec![BusinessRule::provider_exclusion("TELSTRA", "OPTUS")],
        profiles: BTreeMap::new(),
        fixed_nodes_for_demand_sweep: default_fixed_nodes(),
        fixed_users_for_node_sweep: default_fixed_users(),
        instances_per_type: 100,
        master_seed: 20_260_101,
        currency: default_currency(),
    };
    for a in &apps {
        let mut zone = Zone::square_around(&a.center, a.zone_half_side_m);
        for v in &mut zone.vertices {
            v.elev_m = a.center.elev_m;
        }
        spec.areas.insert(
            a.id.into(),
            DeploymentArea {
                center: a.center,
                radius_m: scales.into_iter().zip(a.radius_m).collect(),
                zone,
            },
        );
        for (i, &scale) in scales.iter().enumerate() {
            spec.user_ranges.push(UserRange {
                app: a.id.into(),
                scale,
                min: a.users[i].0,
                max: a.users[i].1,
            });
            spec.request_table.push(RequestTemplate {
                app: a.id.into(),
                scale,
                max_distance_m: a.distance_m[i],
                max_nodes: max_nodes[i],
                allowed_node_types: a.types.iter().copied().collect(),
                max_price: Budget::Unbounded,
            });
        }
    }
    // VR at scale S allows four nodes.
    if let Some(t) = spec
        .request_table
        .iter_mut()
        .find(|t| t.app == "vr" && t.scale == Scale::S)
    {
        t.max_nodes = 4;
    }
    spec
}
