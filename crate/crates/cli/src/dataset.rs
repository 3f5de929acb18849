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

//! Site CSV ingestion (`name,latitude,longitude,elevation`) and loading of
//! node datasets for topology sampling and benchmarks.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use continuum_alloc_core::topogen::{enrich, EnrichmentConfig, RawSite};
use continuum_alloc_core::{GeoPoint, Node, Topology};

use crate::error::{Error, Result};
use crate::formats;

pub const COLUMNS: [&str; 4] = ["name", "latitude", "longitude", "elevation"];

/// A skipped CSV row. `line` is 1-based and counts the header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowWarning {
    pub line: u64,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub sites: Vec<RawSite>,
    pub warnings: Vec<RowWarning>,
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::input(path, e))?;
    read_dataset(file).map_err(|e| match e {
        Error::Input(m) => Error::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Extra columns are ignored; the four named columns may appear in any order.
pub fn read_dataset<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Input(format!("unreadable header: {e}")))?
        .clone();
    let mut index = [0usize; 4];
    for (slot, name) in index.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| {
                Error::Input(format!(
                    "missing column {name:?}; expected header {}",
                    COLUMNS.join(",")
                ))
            })?;
    }
    let mut out = Dataset::default();
    for (i, record) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                out.warnings.push(RowWarning {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        match parse_row(&record, &index) {
            Ok(site) => out.sites.push(site),
            Err(message) => out.warnings.push(RowWarning { line, message }),
        }
    }
    Ok(out)
}

fn parse_row(
    record: &csv::StringRecord,
    index: &[usize; 4],
) -> std::result::Result<RawSite, String> {
    let field = |k: usize| {
        record
            .get(index[k])
            .ok_or_else(|| format!("missing {}", COLUMNS[k]))
    };
    let number = |k: usize| -> std::result::Result<f64, String> {
        let s = field(k)?;
        s.parse::<f64>()
            .map_err(|_| format!("{} is not a number: {s:?}", COLUMNS[k]))
    };
    let name = field(0)?.to_string();
    let elevation = match field(3)? {
        "" => 0.0,
        _ => number(3)?,
    };
    let location = GeoPoint::new(number(1)?, number(2)?, elevation);
    if !location.is_valid() {
        return Err(format!(
            "coordinates out of range: latitude {}, longitude {}, elevation {}",
            location.lat, location.lon, location.elev_m
        ));
    }
    Ok(RawSite { name, location })
}

pub fn write_sites<W: Write>(writer: W, sites: &[RawSite]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let fail = |e: csv::Error| Error::Internal(e.to_string());
    w.write_record(COLUMNS).map_err(fail)?;
    for s in sites {
        w.write_record([
            s.name.clone(),
            s.location.lat.to_string(),
            s.location.lon.to_string(),
            s.location.elev_m.to_string(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::Internal(e.to_string()))
}

/// Nodes from a site CSV (enriched with `config`), a JSON/YAML node list,
/// or a topology file.
pub fn load_nodes(path: &Path, config: &EnrichmentConfig) -> Result<Vec<Node>> {
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let data = load_dataset(path)?;
        for w in &data.warnings {
            log::warn!("{}:{}: skipped row: {}", path.display(), w.line, w.message);
        }
        return enrich(&data.sites, config).map_err(|e| Error::Input(e.to_string()));
    }
    let value = formats::read_value(path)?;
    if value.is_array() {
        serde_json::from_value(value).map_err(|e| Error::input(path, e))
    } else {
        let t: Topology = serde_json::from_value(value).map_err(|e| Error::input(path, e))?;
        Ok(t.nodes)
    }
}
