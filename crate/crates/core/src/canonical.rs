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

//! Canonical serialization and content digests.
//!
//! Canonical JSON has lexicographically sorted object keys; amounts are
//! already rendered with four decimals by [`Fixed`](crate::fixed::Fixed).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};

fn to_value<T: Serialize + ?Sized>(value: &T) -> serde_json::Value {
    // Value maps are BTreeMaps, so re-serializing the value sorts keys.
    serde_json::to_value(value).expect("model types always serialize")
}

/// Compact canonical JSON bytes.
pub fn to_bytes<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    serde_json::to_vec(&to_value(value)).expect("values always serialize")
}

/// Indented canonical JSON with a trailing newline.
pub fn to_pretty_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(&to_value(value)).expect("values always serialize");
    s.push('\n');
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// SHA-256 of the compact canonical JSON of `value`.
pub fn digest<T: Serialize + ?Sized>(value: &T) -> String {
    sha256_hex(&to_bytes(value))
}
