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

//! Pricing-domain model: add-ons, usage limits, filters and the symbolic
//! price-expression language.

mod document;
mod expr;

pub use document::{
    roundtrip_document, AddOn, AddOnPrice, Aggregation, DocState, Filter, PricingDocument,
    SchemaError, UsageLimit, UsageLimitName, SCHEMA_VERSION,
};
pub use expr::{Expr, ExprError, Literal, PriceExpression};
