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

//! Core model and solver for pricing-driven resource allocation over the
//! edge/fog/cloud continuum.
//!
//! An infrastructure [`Topology`](domain::Topology) is projected into a
//! [`PricingDocument`](pricing::PricingDocument) where every operational mode
//! of every node becomes an add-on with a symbolic price expression. The
//! document is then specialised against a [`Demand`](domain::Demand) and a
//! [`Request`](domain::Request) into a [`ProblemInstance`](mapping::ProblemInstance),
//! which the branch-and-bound [`solver`] minimises exactly.
//!
//! The crate is `no_std` and only needs `alloc`. File IO, CSV ingestion,
//! timing and the command line live in the `continuum-alloc` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod canonical;
pub mod demandgen;
pub mod domain;
pub mod fixed;
pub mod geo;
pub mod mapping;
pub mod pricing;
pub mod rng;
pub mod solver;
pub mod stats;
pub mod suite;
pub mod topogen;

pub use domain::{
    BusinessRule, Configuration, Demand, Dimension, GeoPoint, Node, NodeType, Request,
    ResourceVector, Tier, Topology, ValidationReport, Violation, Zone,
};
pub use fixed::{Budget, Fixed, Money};
pub use mapping::ProblemInstance;
pub use pricing::{PriceExpression, PricingDocument};
pub use solver::{AllocationSolution, SolveStatus};
