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

//! JSON/YAML file IO chosen by extension. Output is canonical: sorted keys,
//! two-space indentation, trailing newline.

use std::fs;
use std::path::Path;

use continuum_alloc_core::canonical;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Yaml,
}

impl Format {
    /// `.yaml`/`.yml` select YAML; everything else is JSON.
    pub fn from_path(path: &Path) -> Format {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("yaml" | "yml") => Format::Yaml,
            _ => Format::Json,
        }
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::input(path, e))
}

/// Parse a file into a JSON value regardless of its on-disk format.
pub fn read_value(path: &Path) -> Result<serde_json::Value> {
    let text = read_text(path)?;
    match Format::from_path(path) {
        Format::Json => serde_json::from_str(&text).map_err(|e| Error::input(path, e)),
        Format::Yaml => serde_yaml::from_str(&text).map_err(|e| Error::input(path, e)),
    }
}

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let value = read_value(path)?;
    serde_json::from_value(value).map_err(|e| Error::input(path, e))
}

/// Read a file and hand its JSON text to a validating constructor.
pub fn read_with<T, E: std::fmt::Display>(
    path: &Path,
    parse: impl FnOnce(&str) -> std::result::Result<T, E>,
) -> Result<T> {
    let text = match Format::from_path(path) {
        Format::Json => read_text(path)?,
        Format::Yaml => read_value(path)?.to_string(),
    };
    parse(&text).map_err(|e| Error::input(path, e))
}

pub fn to_string<T: Serialize>(value: &T, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(canonical::to_pretty_string(value)),
        Format::Yaml => {
            let v = serde_json::to_value(value).map_err(|e| Error::Internal(e.to_string()))?;
            serde_yaml::to_string(&v).map_err(|e| Error::Internal(e.to_string()))
        }
    }
}

pub fn write<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = to_string(value, Format::from_path(path))?;
    write_text(path, &text)
}

/// Write through a sibling temporary file so readers never see a partial file.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::output(path, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, text).map_err(|e| Error::output(path, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::output(path, e))
}
