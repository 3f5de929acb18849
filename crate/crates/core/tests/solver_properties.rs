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

use continuum_alloc_core::domain::{self, ContextDescriptor, OperationalMode};
use continuum_alloc_core::mapping::{back_project, encode, map_topology};
use continuum_alloc_core::solver::{brute_force, solve};
use continuum_alloc_core::{
    Budget, BusinessRule, Demand, Fixed, GeoPoint, Node, NodeType, ProblemInstance, Request,
    ResourceVector, SolveStatus, Tier, Topology, Zone,
};
use proptest::prelude::*;

const PROVIDERS: [&str; 3] = ["P0", "P1", "P2"];

#[derive(Clone, Debug)]
struct Case {
    topology: Topology,
    demand: Demand,
    request: Request,
}

fn centi(v: u32) -> Fixed {
    Fixed::from_raw(v as i64 * 100)
}

fn vector(v: [u32; 3]) -> ResourceVector {
    ResourceVector::new([
        centi(v[0]),
        centi(v[1]),
        centi(v[2]),
        Fixed::ZERO,
        Fixed::ZERO,
    ])
}

fn mode_strategy() -> impl Strategy<Value = (ResourceVector, ResourceVector)> {
    (
        prop::array::uniform3(0u32..2000),
        prop::array::uniform3(0u32..500),
    )
        .prop_map(|(cap, price)| (vector(cap), vector(price)))
}

fn node_strategy() -> impl Strategy<Value = (usize, f64, u32, Vec<(ResourceVector, ResourceVector)>)>
{
    (
        0usize..3,
        0.0f64..0.05,
        0u32..300,
        prop::collection::vec(mode_strategy(), 1..=2),
    )
}

fn case_strategy() -> impl Strategy<Value = Case> {
    (
        prop::collection::vec(node_strategy(), 1..=6),
        prop::array::uniform3(0u32..4000),
        1u32..=5,
        prop::option::of(0u32..10_000),
        prop::option::of(1000.0f64..6000.0),
        prop::collection::btree_set(0usize..3, 1..=3),
        any::<bool>(),
        prop::collection::vec((0usize..6, 0usize..6), 0..3),
    )
        .prop_map(
            |(nodes, demand, k, budget, dist, providers, prov_rule, node_rules)| {
                let centre = GeoPoint::new(-37.8, 144.96, 0.0);
                let mut t = Topology::new("AUD");
                for (i, (p, dlat, base, modes)) in nodes.iter().enumerate() {
                    t.nodes.push(Node {
                        id: format!("n{i}"),
                        node_type: NodeType::DataCenter,
                        tier: Tier::Fog,
                        context: ContextDescriptor {
                            location: GeoPoint::new(centre.lat + dlat, centre.lon, 0.0),
                            provider: PROVIDERS[*p].into(),
                            base_price: centi(*base),
                        },
                        modes: modes
                            .iter()
                            .enumerate()
                            .map(|(m, (cap, price))| OperationalMode {
                                id: format!("m{m}"),
                                capacity: *cap,
                                unit_prices: *price,
                                base_price: None,
                            })
                            .collect(),
                    });
                }
                if prov_rule {
                    t.rules.push(BusinessRule::provider_exclusion("P0", "P1"));
                }
                for (a, b) in node_rules {
                    if a != b && a < nodes.len() && b < nodes.len() {
                        t.rules.push(BusinessRule::node_exclusion(
                            format!("n{a}"),
                            format!("n{b}"),
                        ));
                    }
                }
                let mut request = Request::permissive(&t);
                request.max_nodes = k;
                request.max_price = budget.map_or(Budget::Unbounded, |b| Budget::Limit(centi(b)));
                request.max_distance_m = dist.unwrap_or(f64::MAX);
                request.allowed_providers = providers
                    .iter()
                    .map(|p| PROVIDERS[*p].to_string())
                    .collect();
                let demand = Demand::new(vector(demand), Zone::square_around(&centre, 300.0), 10);
                Case {
                    topology: t,
                    demand,
                    request,
                }
            },
        )
}

fn instance(c: &Case) -> ProblemInstance {
    encode(&map_topology(&c.topology), &c.demand, &c.request).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn branch_and_bound_matches_exhaustive_search(c in case_strategy()) {
        let inst = instance(&c);
        let fast = solve(&inst).unwrap();
        let slow = brute_force(&inst).unwrap();
        prop_assert_eq!(fast.status, slow.status);
        prop_assert_eq!(fast.total_cost, slow.total_cost);
    }

    #[test]
    fn optimal_selections_pass_independent_validation(c in case_strategy()) {
        let inst = instance(&c);
        let s = solve(&inst).unwrap();
        if s.status == SolveStatus::Optimal {
            let config = back_project(s.selection.iter().map(String::as_str), &c.topology).unwrap();
            let report = domain::validate(&config, &c.topology, &c.demand, &c.request).unwrap();
            prop_assert!(report.feasible, "{:?}", report.violations);
            prop_assert_eq!(domain::aggregate_capacity(&config, &c.topology, &c.demand).unwrap(), s.covered);
        } else {
            prop_assert!(s.selection.is_empty());
        }
    }

    #[test]
    fn solving_is_deterministic(c in case_strategy()) {
        let inst = instance(&c);
        prop_assert_eq!(solve(&inst).unwrap(), solve(&inst).unwrap());
    }

    #[test]
    fn relaxing_constraints_never_raises_cost(c in case_strategy()) {
        let tight = solve(&instance(&c)).unwrap();
        let mut relaxed = c.clone();
        relaxed.request.max_nodes += 2;
        relaxed.request.max_price = Budget::Unbounded;
        relaxed.topology.rules.clear();
        let loose = solve(&instance(&relaxed)).unwrap();
        if tight.status == SolveStatus::Optimal {
            prop_assert_eq!(loose.status, SolveStatus::Optimal);
            prop_assert!(loose.total_cost <= tight.total_cost);
        }
    }
}
