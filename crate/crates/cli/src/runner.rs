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

//! Benchmark execution. Instances are prepared and solved one at a time;
//! only the solve call is timed.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use continuum_alloc_core::solver::{self, AllocationSolution};
use continuum_alloc_core::suite::{
    candidates_in_area, dataset_supports, expand_suite, prepare_instance, BenchResult,
    InstanceRecord, ScenarioType, SuiteSpec,
};
use continuum_alloc_core::{Node, ProblemInstance};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats;

/// Solve and record the wall-clock time of the solve call.
pub fn timed_solve(inst: &ProblemInstance) -> Result<AllocationSolution> {
    let start = Instant::now();
    let mut s = solver::solve(inst).map_err(|e| Error::Input(e.to_string()))?;
    s.solve_time_s = start.elapsed().as_secs_f64();
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Progress {
    pub done: u64,
    pub total: u64,
    pub scenario: usize,
}

#[derive(Default)]
pub struct RunOptions<'a> {
    /// Completed instances are read from and appended to this file.
    pub manifest: Option<PathBuf>,
    pub on_progress: Option<&'a mut dyn FnMut(&Progress)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Manifest {
    master_seed: u64,
    completed: Vec<InstanceRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteRun {
    pub results: Vec<BenchResult>,
    pub records: Vec<InstanceRecord>,
}

pub fn run_suite(spec: &SuiteSpec, dataset: &[Node], opts: RunOptions<'_>) -> Result<SuiteRun> {
    let scenarios = expand_suite(spec).map_err(|e| Error::Input(e.to_string()))?;
    run_scenarios(spec, &scenarios, dataset, opts)
}

fn load_manifest(path: &Path, master_seed: u64) -> Result<BTreeMap<(usize, u32), InstanceRecord>> {
    if !path.exists() {
        return Ok(BTreeMap::new());
    }
    let m: Manifest = formats::read(path)?;
    if m.master_seed != master_seed {
        return Err(Error::Input(format!(
            "{}: manifest was written for master_seed {}, suite uses {master_seed}",
            path.display(),
            m.master_seed
        )));
    }
    Ok(m.completed
        .into_iter()
        .map(|r| ((r.type_index, r.k), r))
        .collect())
}

fn save_manifest(
    path: &Path,
    master_seed: u64,
    done: &BTreeMap<(usize, u32), InstanceRecord>,
) -> Result<()> {
    let m = Manifest {
        master_seed,
        completed: done.values().cloned().collect(),
    };
    let text = serde_json::to_string(&m).map_err(|e| Error::Internal(e.to_string()))?;
    formats::write_text(path, &(text + "\n"))
}

/// Run the given scenario types. A scenario whose area holds fewer dataset
/// nodes than its candidate cap is reported as skipped.
pub fn run_scenarios(
    spec: &SuiteSpec,
    scenarios: &[ScenarioType],
    dataset: &[Node],
    mut opts: RunOptions<'_>,
) -> Result<SuiteRun> {
    if dataset.is_empty() {
        return Err(Error::Input("dataset contains no nodes".into()));
    }
    let mut done = match &opts.manifest {
        Some(p) => load_manifest(p, spec.master_seed)?,
        None => BTreeMap::new(),
    };
    let per_type = spec.instances_per_type;
    let total = scenarios.len() as u64 * per_type as u64;
    let mut progress = Progress {
        done: 0,
        total,
        scenario: 0,
    };
    let mut results = Vec::with_capacity(scenarios.len());
    let mut records = Vec::new();

    for scenario in scenarios {
        progress.scenario = scenario.index;
        if !dataset_supports(spec, scenario, dataset) {
            log::warn!(
                "skipping scenario {} ({} {} {} level {}): {} nodes in area, cap {}",
                scenario.index,
                scenario.app,
                scenario.scale,
                scenario.sweep,
                scenario.level,
                candidates_in_area(spec, scenario, dataset),
                scenario.max_nodes
            );
            results.push(BenchResult::skipped(scenario.clone()));
            progress.done += per_type as u64;
            if let Some(cb) = opts.on_progress.as_mut() {
                cb(&progress);
            }
            continue;
        }
        let mut times = Vec::with_capacity(per_type as usize);
        let mut statuses = Vec::with_capacity(per_type as usize);
        let mut fresh = false;
        for k in 0..per_type {
            let record = match done.get(&(scenario.index, k)) {
                Some(r) => r.clone(),
                None => {
                    let prepared = prepare_instance(spec, scenario, dataset, k)
                        .map_err(|e| Error::Input(e.to_string()))?;
                    let s = timed_solve(&prepared.instance)?;
                    let r = InstanceRecord {
                        type_index: scenario.index,
                        k,
                        seed: prepared.seed,
                        candidates: prepared.topology.nodes.len(),
                        status: s.status,
                        total_cost: s.total_cost,
                        selection: s.selection,
                        solve_time_s: s.solve_time_s,
                    };
                    done.insert((scenario.index, k), r.clone());
                    fresh = true;
                    r
                }
            };
            times.push(record.solve_time_s);
            statuses.push(record.status);
            records.push(record);
            progress.done += 1;
            if let Some(cb) = opts.on_progress.as_mut() {
                cb(&progress);
            }
        }
        if fresh {
            if let Some(p) = &opts.manifest {
                save_manifest(p, spec.master_seed, &done)?;
            }
        }
        let result = BenchResult::from_samples(scenario.clone(), times, &statuses)
            .map_err(|e| Error::Internal(e.to_string()))?;
        log::info!(
            "scenario {} {} {} {} L{}: median {:.6}s, {} optimal, {} infeasible",
            scenario.index,
            scenario.app,
            scenario.scale,
            scenario.sweep,
            scenario.level,
            result.median_s,
            result.n_optimal,
            result.n_infeasible
        );
        results.push(result);
    }
    results.sort_by_key(|r| r.scenario.index);
    Ok(SuiteRun { results, records })
}

pub const RESULT_COLUMNS: [&str; 12] = [
    "app",
    "scale",
    "sweep",
    "level",
    "users",
    "max_nodes",
    "n_samples",
    "median_s",
    "ci_low_s",
    "ci_high_s",
    "n_optimal",
    "n_infeasible",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResultFormat {
    Csv,
    Json,
}

pub fn emit_results<W: Write>(
    results: &[BenchResult],
    format: ResultFormat,
    writer: W,
) -> Result<()> {
    let mut sorted: Vec<&BenchResult> = results.iter().collect();
    sorted.sort_by_key(|r| r.scenario.index);
    match format {
        ResultFormat::Json => {
            let owned: Vec<BenchResult> = sorted.into_iter().cloned().collect();
            let mut w = writer;
            w.write_all(continuum_alloc_core::canonical::to_pretty_string(&owned).as_bytes())
                .map_err(|e| Error::Internal(e.to_string()))
        }
        ResultFormat::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            let fail = |e: csv::Error| Error::Internal(e.to_string());
            w.write_record(RESULT_COLUMNS).map_err(fail)?;
            for r in sorted {
                let s = &r.scenario;
                w.write_record([
                    s.app.clone(),
                    s.scale.to_string(),
                    s.sweep.to_string(),
                    s.level.to_string(),
                    s.users.to_string(),
                    s.max_nodes.to_string(),
                    r.samples.len().to_string(),
                    r.median_s.to_string(),
                    r.ci_low_s.to_string(),
                    r.ci_high_s.to_string(),
                    r.n_optimal.to_string(),
                    r.n_infeasible.to_string(),
                ])
                .map_err(fail)?;
            }
            w.flush().map_err(|e| Error::Internal(e.to_string()))
        }
    }
}

pub const INSTANCE_COLUMNS: [&str; 8] = [
    "type_index",
    "k",
    "seed",
    "candidates",
    "status",
    "total_cost",
    "selected",
    "solve_time_s",
];

pub fn emit_instances<W: Write>(records: &[InstanceRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let fail = |e: csv::Error| Error::Internal(e.to_string());
    w.write_record(INSTANCE_COLUMNS).map_err(fail)?;
    for r in records {
        let status = serde_json::to_value(r.status).map_err(|e| Error::Internal(e.to_string()))?;
        w.write_record([
            r.type_index.to_string(),
            r.k.to_string(),
            r.seed.to_string(),
            r.candidates.to_string(),
            status.as_str().unwrap_or_default().to_string(),
            r.total_cost.to_string(),
            r.selection.join(" "),
            r.solve_time_s.to_string(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::Internal(e.to_string()))
}

/// Write `results.csv`, `results.json` and `instances.csv` into `dir`.
pub fn write_outputs(dir: &Path, run: &SuiteRun) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::output(dir, e))?;
    let mut csv_buf = Vec::new();
    emit_results(&run.results, ResultFormat::Csv, &mut csv_buf)?;
    let mut json_buf = Vec::new();
    emit_results(&run.results, ResultFormat::Json, &mut json_buf)?;
    let mut inst_buf = Vec::new();
    emit_instances(&run.records, &mut inst_buf)?;
    for (name, buf) in [
        ("results.csv", csv_buf),
        ("results.json", json_buf),
        ("instances.csv", inst_buf),
    ] {
        let text = String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))?;
        formats::write_text(&dir.join(name), &text)?;
    }
    Ok(())
}
