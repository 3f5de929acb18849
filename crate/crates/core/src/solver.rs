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

//! Exact cost minimisation over an instantiated pricing configuration space.
//!
//! [`solve`] is a depth-first branch and bound over the prefiltered add-ons;
//! [`brute_force`] enumerates every subset and serves as its oracle on small
//! instances. Neither measures time: `solve_time_s` is left at zero for the
//! caller to fill in.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::domain::{Dimension, ResourceVector};
use crate::fixed::{Fixed, Money};
use crate::mapping::ProblemInstance;
use crate::pricing::{AddOnPrice, DocState};

/// Largest instance [`brute_force`] accepts.
pub const BRUTE_FORCE_MAX_ADDONS: usize = 22;

const DIMS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AllocationSolution {
    pub status: SolveStatus,
    /// Sorted add-on ids; empty when infeasible.
    pub selection: Vec<String>,
    pub total_cost: Money,
    /// Sum of the selected add-ons' (demand-capped) extensions.
    pub covered: ResourceVector,
    pub solve_time_s: f64,
    pub nodes_explored: u64,
}

impl AllocationSolution {
    fn infeasible(nodes_explored: u64) -> Self {
        AllocationSolution {
            status: SolveStatus::Infeasible,
            selection: Vec::new(),
            total_cost: Fixed::ZERO,
            covered: ResourceVector::ZERO,
            solve_time_s: 0.0,
            nodes_explored,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("instance is not instantiated: {0}")]
    NotInstantiated(String),
    #[error("instance has {size} add-ons; exhaustive search is limited to {max}")]
    TooLarge { size: usize, max: usize },
}

fn require_instantiated(inst: &ProblemInstance) -> Result<(), SolverError> {
    if inst.pricing.state != DocState::Instantiated {
        return Err(SolverError::NotInstantiated(
            "pricing state is symbolic".into(),
        ));
    }
    if let Some(a) = inst
        .pricing
        .addons
        .iter()
        .find(|a| a.price.resolved().is_none())
    {
        return Err(SolverError::NotInstantiated(alloc::format!(
            "add-on {} has no resolved price",
            a.id
        )));
    }
    Ok(())
}

/// Drop add-ons that no feasible selection can contain: disallowed provider
/// or feature, distance above the bound, or a price above the whole budget.
/// Exclusions pointing at dropped add-ons are removed too.
pub fn prefilter(inst: &ProblemInstance) -> ProblemInstance {
    let f = &inst.filter;
    let mut out = inst.clone();
    out.pricing.addons.retain(|a| {
        f.allowed_providers.contains(&a.provider)
            && f.allowed_features.contains(&a.feature)
            && a.distance_m <= f.max_distance_m
            && a.price.resolved().is_none_or(|p| f.max_price.allows(p))
    });
    let kept: alloc::collections::BTreeSet<String> =
        out.pricing.addons.iter().map(|a| a.id.clone()).collect();
    for a in &mut out.pricing.addons {
        a.excludes.retain(|x| kept.contains(x));
    }
    out
}

struct Item {
    id: String,
    node: usize,
    price: i64,
    ext: [i64; DIMS],
    excludes: Vec<usize>,
}

struct Search<'a> {
    items: &'a [Item],
    budget: Option<i64>,
    // suffix tables indexed by position (len = n + 1)
    max_ext: Vec<[i64; DIMS]>,
    min_ratio: Vec<[f64; DIMS]>,
    min_price: Vec<i64>,
    blocked: Vec<u32>,
    node_used: Vec<bool>,
    chosen: Vec<usize>,
    best: Option<(i64, Vec<usize>)>,
    explored: u64,
}

impl Search<'_> {
    /// Admissible lower bound on the extra cost needed from position `j`,
    /// or `None` if the residual cannot be covered within `slots` add-ons.
    fn lower_bound(&self, j: usize, residual: &[i64; DIMS], slots: u64) -> Option<i64> {
        let mut needed: i64 = 0;
        let mut ratio_bound: i64 = 0;
        for i in 0..DIMS {
            if residual[i] <= 0 {
                continue;
            }
            let cap = self.max_ext[j][i];
            if cap <= 0 {
                return None;
            }
            needed = needed.max((residual[i] + cap - 1) / cap);
            let lb = residual[i] as f64 * self.min_ratio[j][i] * (1.0 - 1e-9);
            ratio_bound = ratio_bound.max((libm::floor(lb) as i64 - 1).max(0));
        }
        if needed as u64 > slots {
            return None;
        }
        Some((needed.saturating_mul(self.min_price[j])).max(ratio_bound))
    }

    fn dfs(&mut self, j: usize, cost: i64, residual: [i64; DIMS], slots: u64) {
        self.explored += 1;
        if residual.iter().all(|r| *r <= 0) {
            if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                self.best = Some((cost, self.chosen.clone()));
            }
            return;
        }
        if j == self.items.len() {
            return;
        }
        let Some(lb) = self.lower_bound(j, &residual, slots) else {
            return;
        };
        let bound = cost.saturating_add(lb);
        if let Some((best, _)) = &self.best {
            if bound >= *best {
                return;
            }
        }
        if self.budget.is_some_and(|b| bound > b) {
            return;
        }

        let item = &self.items[j];
        let useful = (0..DIMS).any(|i| residual[i] > 0 && item.ext[i] > 0);
        let affordable = self.budget.is_none_or(|b| cost + item.price <= b);
        if useful && affordable && slots > 0 && self.blocked[j] == 0 && !self.node_used[item.node] {
            let mut next = residual;
            for i in 0..DIMS {
                next[i] -= item.ext[i];
            }
            for &x in &item.excludes {
                self.blocked[x] += 1;
            }
            self.node_used[item.node] = true;
            self.chosen.push(j);
            self.dfs(j + 1, cost + item.price, next, slots - 1);
            self.chosen.pop();
            self.node_used[item.node] = false;
            for &x in &self.items[j].excludes {
                self.blocked[x] -= 1;
            }
        }
        self.dfs(j + 1, cost, residual, slots);
    }
}

/// Minimum-cost selection satisfying coverage, cardinality, budget,
/// exclusions and one-mode-per-node, or `Infeasible` if none exists.
pub fn solve(inst: &ProblemInstance) -> Result<AllocationSolution, SolverError> {
    require_instantiated(inst)?;
    let inst = prefilter(inst);
    let filter = &inst.filter;
    let demand = filter.min_usage.values().map(|v| v.raw().max(0));
    let demand_positive = demand.map(|d| d > 0);

    let mut node_index: BTreeMap<&str, usize> = BTreeMap::new();
    let mut items: Vec<Item> = Vec::new();
    let mut keys: Vec<f64> = Vec::new();
    for a in &inst.pricing.addons {
        let ext: [i64; DIMS] =
            core::array::from_fn(|i| a.extensions.values()[i].raw().clamp(0, demand[i]));
        let efficiency: f64 = (0..DIMS)
            .filter(|&i| demand_positive[i])
            .map(|i| ext[i] as f64 / demand[i] as f64)
            .sum();
        if efficiency <= 0.0 {
            // contributes nothing the demand asks for
            continue;
        }
        let next = node_index.len();
        let node = *node_index.entry(a.node_id()).or_insert(next);
        let price = match a.price {
            AddOnPrice::Resolved(m) => m.raw(),
            AddOnPrice::Symbolic(_) => unreachable!("checked by require_instantiated"),
        };
        keys.push(price as f64 / efficiency);
        items.push(Item {
            id: a.id.clone(),
            node,
            price,
            ext,
            excludes: Vec::new(),
        });
    }

    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&x, &y| {
        keys[x]
            .total_cmp(&keys[y])
            .then_with(|| items[x].id.cmp(&items[y].id))
    });
    let mut sorted: Vec<Item> = Vec::with_capacity(items.len());
    let mut taken: Vec<Option<Item>> = items.into_iter().map(Some).collect();
    for &orig in &order {
        sorted.push(taken[orig].take().expect("each index once"));
    }
    let pos_by_id: BTreeMap<&str, usize> = sorted
        .iter()
        .enumerate()
        .map(|(p, it)| (it.id.as_str(), p))
        .collect();
    let mut excl_lists: Vec<Vec<usize>> = vec![Vec::new(); sorted.len()];
    for a in &inst.pricing.addons {
        let Some(&p) = pos_by_id.get(a.id.as_str()) else {
            continue;
        };
        excl_lists[p] = a
            .excludes
            .iter()
            .filter_map(|x| pos_by_id.get(x.as_str()).copied())
            .collect();
    }
    for (it, ex) in sorted.iter_mut().zip(excl_lists) {
        it.excludes = ex;
    }

    // Certified infeasibility: even every candidate together falls short.
    let mut total = [0i64; DIMS];
    for it in &sorted {
        for i in 0..DIMS {
            total[i] += it.ext[i];
        }
    }
    if (0..DIMS).any(|i| total[i] < demand[i]) {
        return Ok(AllocationSolution::infeasible(0));
    }

    let n = sorted.len();
    let mut max_ext = vec![[0i64; DIMS]; n + 1];
    let mut min_ratio = vec![[f64::INFINITY; DIMS]; n + 1];
    let mut min_price = vec![i64::MAX; n + 1];
    for j in (0..n).rev() {
        let it = &sorted[j];
        max_ext[j] = max_ext[j + 1];
        min_ratio[j] = min_ratio[j + 1];
        min_price[j] = min_price[j + 1].min(it.price);
        for i in 0..DIMS {
            max_ext[j][i] = max_ext[j][i].max(it.ext[i]);
            if it.ext[i] > 0 {
                min_ratio[j][i] = min_ratio[j][i].min(it.price as f64 / it.ext[i] as f64);
            }
        }
    }

    let slots = (filter.max_cardinality as u64).min(node_index.len() as u64);
    let mut search = Search {
        items: &sorted,
        budget: filter.max_price.limit().map(|m| m.raw()),
        max_ext,
        min_ratio,
        min_price,
        blocked: vec![0; n],
        node_used: vec![false; node_index.len()],
        chosen: Vec::new(),
        best: None,
        explored: 0,
    };
    search.dfs(0, 0, demand, slots);

    let explored = search.explored;
    let Some((cost, chosen)) = search.best else {
        return Ok(AllocationSolution::infeasible(explored));
    };
    let mut covered = ResourceVector::ZERO;
    let mut selection: Vec<String> = Vec::with_capacity(chosen.len());
    for &p in &chosen {
        let it = &sorted[p];
        for d in Dimension::ALL {
            covered[d] += Fixed::from_raw(it.ext[d.index()]);
        }
        selection.push(it.id.clone());
    }
    selection.sort();
    Ok(AllocationSolution {
        status: SolveStatus::Optimal,
        selection,
        total_cost: Fixed::from_raw(cost),
        covered,
        solve_time_s: 0.0,
        nodes_explored: explored,
    })
}

/// Exhaustive search over every subset of add-ons. Ties on cost go to the
/// lexicographically smallest sorted id list.
pub fn brute_force(inst: &ProblemInstance) -> Result<AllocationSolution, SolverError> {
    require_instantiated(inst)?;
    let addons = &inst.pricing.addons;
    let n = addons.len();
    if n > BRUTE_FORCE_MAX_ADDONS {
        return Err(SolverError::TooLarge {
            size: n,
            max: BRUTE_FORCE_MAX_ADDONS,
        });
    }
    let f = &inst.filter;

    let mut admissible: u32 = 0;
    let mut node_of: Vec<usize> = Vec::with_capacity(n);
    let mut nodes: Vec<&str> = Vec::new();
    let mut excl: Vec<u32> = vec![0; n];
    for (i, a) in addons.iter().enumerate() {
        if f.allowed_providers.contains(&a.provider)
            && f.allowed_features.contains(&a.feature)
            && a.distance_m <= f.max_distance_m
        {
            admissible |= 1 << i;
        }
        let node = match nodes.iter().position(|x| *x == a.node_id()) {
            Some(p) => p,
            None => {
                nodes.push(a.node_id());
                nodes.len() - 1
            }
        };
        node_of.push(node);
        for (k, b) in addons.iter().enumerate() {
            if a.excludes.contains(&b.id) || b.excludes.contains(&a.id) {
                excl[i] |= 1 << k;
            }
        }
    }

    let mut best: Option<(i64, Vec<&str>, u32)> = None;
    let mut explored: u64 = 0;
    for mask in 0u32..(1u32 << n) {
        explored += 1;
        if mask & !admissible != 0 {
            continue;
        }
        let mut node_mask: u32 = 0;
        let mut ok = true;
        let mut cost: i64 = 0;
        let mut sum = [0i128; DIMS];
        for i in 0..n {
            if mask & (1 << i) == 0 {
                continue;
            }
            if mask & excl[i] != 0 || node_mask & (1 << node_of[i]) != 0 {
                ok = false;
                break;
            }
            node_mask |= 1 << node_of[i];
            cost += addons[i].price.resolved().map(|m| m.raw()).unwrap_or(0);
            for (d, v) in addons[i].extensions.iter() {
                sum[d.index()] += v.raw() as i128;
            }
        }
        if !ok || node_mask.count_ones() as u64 > f.max_cardinality as u64 {
            continue;
        }
        if f.max_price.limit().is_some_and(|b| cost > b.raw()) {
            continue;
        }
        if Dimension::ALL
            .iter()
            .any(|d| sum[d.index()] < f.min_usage[*d].raw() as i128)
        {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bc, bids, _)) => match cost.cmp(bc) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => {
                    let mut ids: Vec<&str> = (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| addons[i].id.as_str())
                        .collect();
                    ids.sort();
                    ids < *bids
                }
            },
        };
        if better {
            let mut ids: Vec<&str> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| addons[i].id.as_str())
                .collect();
            ids.sort();
            best = Some((cost, ids, mask));
        }
    }

    let Some((cost, ids, mask)) = best else {
        return Ok(AllocationSolution::infeasible(explored));
    };
    let mut covered = ResourceVector::ZERO;
    for i in 0..n {
        if mask & (1 << i) != 0 {
            covered = covered.add(&addons[i].extensions.min(&f.min_usage));
        }
    }
    Ok(AllocationSolution {
        status: SolveStatus::Optimal,
        selection: ids.into_iter().map(String::from).collect(),
        total_cost: Fixed::from_raw(cost),
        covered,
        solve_time_s: 0.0,
        nodes_explored: explored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::*;
    use crate::fixed::{Budget, Fixed};
    use crate::mapping::{encode, map_topology};
    use alloc::vec;

    fn fx(s: &str) -> Fixed {
        s.parse().unwrap()
    }

    fn rv(ram: i64, sto: i64, cpu: i64) -> ResourceVector {
        ResourceVector::new([
            Fixed::from_int(ram),
            Fixed::from_int(sto),
            Fixed::from_int(cpu),
            Fixed::ZERO,
            Fixed::ZERO,
        ])
    }

    fn node(
        id: &str,
        provider: &str,
        cap: ResourceVector,
        prices: ResourceVector,
        loc: GeoPoint,
    ) -> Node {
        Node {
            id: id.into(),
            node_type: NodeType::DataCenter,
            tier: Tier::Cloud,
            context: ContextDescriptor {
                location: loc,
                provider: provider.into(),
                base_price: Fixed::ZERO,
            },
            modes: vec![OperationalMode {
                id: "default".into(),
                capacity: cap,
                unit_prices: prices,
                base_price: None,
            }],
        }
    }

    fn here() -> GeoPoint {
        GeoPoint::new(-37.8, 144.96, 0.0)
    }

    fn zone() -> Zone {
        Zone::square_around(&here(), 500.0)
    }

    fn six_node_topology() -> Topology {
        let mut t = Topology::new("AUD");
        let specs = [
            ("a", "P1", rv(8, 100, 4), rv(2, 0, 3)),
            ("b", "P1", rv(16, 50, 2), rv(1, 0, 5)),
            ("c", "P2", rv(4, 400, 8), rv(3, 0, 1)),
            ("d", "P2", rv(32, 10, 1), rv(1, 1, 9)),
            ("e", "P3", rv(6, 200, 6), rv(2, 0, 2)),
            ("f", "P3", rv(12, 120, 3), rv(2, 0, 2)),
        ];
        for (id, p, cap, price) in specs {
            t.nodes.push(node(id, p, cap, price, here()));
        }
        t.rules.push(BusinessRule::provider_exclusion("P1", "P3"));
        t.rules.push(BusinessRule::node_exclusion("c", "d"));
        t
    }

    fn instance(t: &Topology, demand: ResourceVector, req: &Request) -> ProblemInstance {
        encode(&map_topology(t), &Demand::new(demand, zone(), 10), req).unwrap()
    }

    #[test]
    fn zero_demand_selects_nothing() {
        let t = six_node_topology();
        let s = solve(&instance(
            &t,
            ResourceVector::ZERO,
            &Request::permissive(&t),
        ))
        .unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!(s.selection.is_empty());
        assert_eq!(s.total_cost, Fixed::ZERO);
    }

    #[test]
    fn zero_budget_with_positive_demand_is_infeasible() {
        let t = six_node_topology();
        let mut req = Request::permissive(&t);
        req.max_price = Budget::Limit(Fixed::ZERO);
        let s = solve(&instance(&t, rv(1, 1, 1), &req)).unwrap();
        assert_eq!(s.status, SolveStatus::Infeasible);
        assert!(s.selection.is_empty());
    }

    #[test]
    fn matches_exhaustive_search() {
        let t = six_node_topology();
        for (demand, k) in [
            (rv(20, 300, 10), 6),
            (rv(40, 500, 12), 3),
            (rv(10, 10, 2), 1),
            (rv(60, 900, 30), 6),
        ] {
            let mut req = Request::permissive(&t);
            req.max_nodes = k;
            let inst = instance(&t, demand, &req);
            let fast = solve(&inst).unwrap();
            let slow = brute_force(&inst).unwrap();
            assert_eq!(fast.status, slow.status, "{demand:?} k={k}");
            assert_eq!(fast.total_cost, slow.total_cost, "{demand:?} k={k}");
        }
    }

    #[test]
    fn selection_respects_exclusions() {
        let t = six_node_topology();
        let inst = instance(&t, rv(20, 300, 10), &Request::permissive(&t));
        let s = solve(&inst).unwrap();
        assert!(s.is_optimal());
        assert!(s.selection.len() >= 2);
        for x in &s.selection {
            let a = inst.pricing.addon(x).unwrap();
            assert!(s.selection.iter().all(|y| !a.excludes.contains(y)));
        }
    }

    #[test]
    fn prefilter_drops_distant_and_expensive_addons() {
        let mut t = Topology::new("AUD");
        t.nodes
            .push(node("near", "P", rv(64, 0, 0), rv(1, 0, 0), here()));
        // roughly 5 km north
        t.nodes.push(node(
            "far",
            "P",
            rv(64, 0, 0),
            rv(1, 0, 0),
            GeoPoint::new(-37.755, 144.96, 0.0),
        ));
        t.nodes
            .push(node("dear", "P", rv(64, 0, 0), rv(3, 0, 0), here()));
        let mut req = Request::permissive(&t);
        req.max_distance_m = 3750.0;
        req.max_price = Budget::Limit(fx("24"));
        let inst = instance(&t, rv(10, 0, 0), &req);
        let far = inst.pricing.addon("far#default").unwrap();
        assert!(far.distance_m > 3750.0);
        let filtered = prefilter(&inst);
        let kept: Vec<&str> = filtered
            .pricing
            .addons
            .iter()
            .map(|a| a.id.as_str())
            .collect();
        assert_eq!(kept, vec!["near#default"]);

        let open = instance(&t, rv(10, 0, 0), &Request::permissive(&t));
        assert_eq!(prefilter(&open), open);
    }

    #[test]
    fn symbolic_instances_are_rejected() {
        let t = six_node_topology();
        let mut inst = instance(&t, rv(1, 1, 1), &Request::permissive(&t));
        inst.pricing.state = DocState::Symbolic;
        assert!(matches!(solve(&inst), Err(SolverError::NotInstantiated(_))));
    }
}
