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

//! Subcommand surface. Every error reaches standard error as one line
//! starting with `error:`; the exit status follows [`ExitCode`].

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use continuum_alloc_core::demandgen::{generate_demand, AppProfile};
use continuum_alloc_core::domain::{self, BusinessRule};
use continuum_alloc_core::mapping::{back_project, encode, map_topology};
use continuum_alloc_core::pricing::PricingDocument;
use continuum_alloc_core::solver::{self, AllocationSolution};
use continuum_alloc_core::suite::{default_suite, SuiteSpec};
use continuum_alloc_core::topogen::{sample_topology, EnrichmentConfig};
use continuum_alloc_core::{
    Demand, GeoPoint, ProblemInstance, Request, SolveStatus, Topology, Zone,
};

use crate::dataset::{load_nodes, write_sites};
use crate::error::{Error, ExitCode, Result};
use crate::formats;
use crate::runner::{run_suite, timed_solve, write_outputs, RunOptions};
use crate::sites::{disc_sites, suite_sites};

pub const LOG_ENV: &str = "CONTINUUM_ALLOC_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "continuum-alloc",
    version,
    about = "Cost-optimal node selection across edge, fog and cloud"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enrich a site dataset and sample a topology around a centre.
    GenTopology {
        /// Site CSV, node list or topology file.
        #[arg(long)]
        dataset: PathBuf,
        /// Enrichment config (JSON/YAML); built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// LAT,LON[,ELEV]
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
        center: GeoPoint,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        max_nodes: Option<usize>,
        /// List of business rules (JSON/YAML).
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate a demand vector for a user population in a zone.
    GenDemand {
        /// Profile file or built-in id (cctv, vr, robot, lidar).
        #[arg(long)]
        profile: String,
        #[arg(long)]
        users: u64,
        #[arg(long)]
        zone: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Map a topology to a symbolic pricing document.
    Map {
        #[arg(long)]
        topology: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Instantiate a pricing document for a demand and request.
    Encode {
        #[arg(long)]
        pricing: PathBuf,
        #[arg(long)]
        demand: PathBuf,
        #[arg(long)]
        request: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve an instance exactly. Exit status 2 when infeasible.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Map, encode and solve in one step.
    Allocate {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        demand: PathBuf,
        #[arg(long)]
        request: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve by exhaustive enumeration (small instances only).
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run a benchmark suite and write results.csv, results.json and instances.csv.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Override instances_per_type from the suite file.
        #[arg(long)]
        instances: Option<u32>,
        /// Continue from out/manifest.json instead of starting over.
        #[arg(long)]
        resume: bool,
    },
    /// Check a solution against topology, demand and request. Exit status 2 on violations.
    Validate {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        demand: PathBuf,
        #[arg(long)]
        request: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// Report file; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a synthetic site CSV around a suite's deployment areas.
    GenSites {
        /// Suite spec; the built-in suite when omitted.
        #[arg(long)]
        suite: Option<PathBuf>,
        /// Sites per scale relative to the largest node bound.
        #[arg(long, default_value_t = 1.25)]
        density: f64,
        /// Fixed total spread evenly over the areas instead of `--density`.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a built-in default (enrichment config, suite or profile).
    Defaults {
        #[arg(long, value_enum)]
        kind: DefaultKind,
        /// Profile id for `--kind profile`.
        #[arg(long)]
        id: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DefaultKind {
    Enrichment,
    Suite,
    Profile,
}

fn parse_point(s: &str) -> std::result::Result<GeoPoint, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {p:?}"))
        })
        .collect::<std::result::Result<_, _>>()?;
    let p = match parts[..] {
        [lat, lon] => GeoPoint::new(lat, lon, 0.0),
        [lat, lon, elev] => GeoPoint::new(lat, lon, elev),
        _ => return Err("expected LAT,LON or LAT,LON,ELEV".into()),
    };
    if !p.is_valid() {
        return Err("coordinates out of range".into());
    }
    Ok(p)
}

fn init_logging() {
    let filter = std::env::var(LOG_ENV).unwrap_or_else(|_| "warn".into());
    let _ = env_logger::Builder::new()
        .parse_filters(&filter)
        .target(env_logger::Target::Stderr)
        .format_timestamp(None)
        .try_init();
}

/// Parse `argv` (program name first), run the command and report errors.
pub fn run_command<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::Success
                }
                _ => {
                    // clap renders its own "error:" prefix and usage text
                    let _ = e.print();
                    ExitCode::Usage
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            e.exit_code()
        }
    }
}

fn read_topology(path: &Path) -> Result<Topology> {
    let t: Topology = formats::read(path)?;
    for w in t.validate().map_err(|e| Error::input(path, e))? {
        log::warn!("{}: {w}", path.display());
    }
    Ok(t)
}

fn read_demand(path: &Path) -> Result<Demand> {
    let d: Demand = formats::read(path)?;
    d.zone.validate().map_err(|e| Error::input(path, e))?;
    if !d.vector.is_non_negative() {
        return Err(Error::input(path, "demand components must be non-negative"));
    }
    Ok(d)
}

fn read_request(path: &Path) -> Result<Request> {
    let r: Request = formats::read(path)?;
    r.validate().map_err(|e| Error::input(path, e))?;
    Ok(r)
}

fn read_instance(path: &Path) -> Result<ProblemInstance> {
    formats::read_with(path, ProblemInstance::from_json)
}

fn status_code(s: &AllocationSolution) -> ExitCode {
    match s.status {
        SolveStatus::Optimal => ExitCode::Success,
        SolveStatus::Infeasible => ExitCode::Infeasible,
    }
}

fn resolve_profile(spec: &str) -> Result<AppProfile> {
    let path = Path::new(spec);
    let profile = if path.exists() {
        formats::read::<AppProfile>(path)?
    } else {
        AppProfile::builtin(spec).ok_or_else(|| {
            Error::Input(format!(
                "profile {spec:?} is neither a file nor a built-in id ({})",
                AppProfile::BUILTIN_IDS.join(", ")
            ))
        })?
    };
    profile
        .validate()
        .map_err(|e| Error::Input(e.to_string()))?;
    Ok(profile)
}

fn read_config(path: Option<&Path>) -> Result<EnrichmentConfig> {
    let cfg = match path {
        Some(p) => formats::read(p)?,
        None => EnrichmentConfig::default(),
    };
    cfg.validate().map_err(|e| Error::Input(e.to_string()))?;
    Ok(cfg)
}

fn execute(command: Command) -> Result<ExitCode> {
    match command {
        Command::GenTopology {
            dataset,
            config,
            center,
            radius,
            max_nodes,
            rules,
            seed,
            output,
        } => {
            if !(radius >= 0.0) {
                return Err(Error::Usage("--radius must be >= 0".into()));
            }
            let cfg = read_config(config.as_deref())?;
            let nodes = load_nodes(&dataset, &cfg)?;
            let rules: Vec<BusinessRule> = match rules {
                Some(p) => formats::read(&p)?,
                None => Vec::new(),
            };
            let t = sample_topology(
                &nodes,
                &center,
                radius,
                max_nodes,
                &rules,
                seed,
                &cfg.currency,
            );
            log::info!("sampled {} of {} nodes", t.nodes.len(), nodes.len());
            formats::write(&output, &t)?;
        }
        Command::GenDemand {
            profile,
            users,
            zone,
            seed,
            output,
        } => {
            let profile = resolve_profile(&profile)?;
            let zone: Zone = formats::read(&zone)?;
            let zone = Zone::new(zone.vertices).map_err(|e| Error::Input(e.to_string()))?;
            let d = generate_demand(users, &profile, zone, seed)
                .map_err(|e| Error::Input(e.to_string()))?;
            formats::write(&output, &d)?;
        }
        Command::Map { topology, output } => {
            let t = read_topology(&topology)?;
            formats::write(&output, &map_topology(&t))?;
        }
        Command::Encode {
            pricing,
            demand,
            request,
            output,
        } => {
            let doc = formats::read_with(&pricing, PricingDocument::from_json)?;
            let inst = encode(&doc, &read_demand(&demand)?, &read_request(&request)?)
                .map_err(|e| Error::input(&pricing, e))?;
            formats::write(&output, &inst)?;
        }
        Command::Solve { instance, output } => {
            let s = timed_solve(&read_instance(&instance)?)?;
            formats::write(&output, &s)?;
            return Ok(status_code(&s));
        }
        Command::Allocate {
            topology,
            demand,
            request,
            output,
        } => {
            let t = read_topology(&topology)?;
            let inst = encode(
                &map_topology(&t),
                &read_demand(&demand)?,
                &read_request(&request)?,
            )
            .map_err(|e| Error::input(&topology, e))?;
            let s = timed_solve(&inst)?;
            formats::write(&output, &s)?;
            return Ok(status_code(&s));
        }
        Command::Oracle { instance, output } => {
            let inst = read_instance(&instance)?;
            let start = std::time::Instant::now();
            let mut s = solver::brute_force(&inst).map_err(|e| Error::input(&instance, e))?;
            s.solve_time_s = start.elapsed().as_secs_f64();
            formats::write(&output, &s)?;
            return Ok(status_code(&s));
        }
        Command::Bench {
            suite,
            dataset,
            config,
            out,
            instances,
            resume,
        } => {
            let mut spec: SuiteSpec = formats::read(&suite)?;
            if let Some(n) = instances {
                spec.instances_per_type = n;
            }
            let cfg = read_config(config.as_deref())?;
            let nodes = load_nodes(&dataset, &cfg)?;
            let manifest = out.join("manifest.json");
            if !resume && manifest.exists() {
                std::fs::remove_file(&manifest).map_err(|e| Error::output(&manifest, e))?;
            }
            let mut report = |p: &crate::runner::Progress| {
                if p.done == p.total || p.done.is_multiple_of(100) {
                    log::info!("{}/{} instances", p.done, p.total);
                }
            };
            let run = run_suite(
                &spec,
                &nodes,
                RunOptions {
                    manifest: Some(manifest),
                    on_progress: Some(&mut report),
                },
            )?;
            write_outputs(&out, &run)?;
            let skipped = run.results.iter().filter(|r| r.skipped).count();
            if skipped > 0 {
                log::warn!("{skipped} scenario types skipped: dataset too small");
            }
        }
        Command::Validate {
            topology,
            demand,
            request,
            solution,
            output,
        } => {
            let t = read_topology(&topology)?;
            let d = read_demand(&demand)?;
            let r = read_request(&request)?;
            let value = formats::read_value(&solution)?;
            let selection: Vec<String> = value
                .get("selection")
                .cloned()
                .map(serde_json::from_value)
                .transpose()
                .map_err(|e| Error::input(&solution, e))?
                .ok_or_else(|| Error::input(&solution, "missing \"selection\""))?;
            let config = back_project(selection.iter().map(String::as_str), &t)
                .map_err(|e| Error::input(&solution, e))?;
            let report =
                domain::validate(&config, &t, &d, &r).map_err(|e| Error::input(&solution, e))?;
            match output {
                Some(p) => formats::write(&p, &report)?,
                None => print!("{}", formats::to_string(&report, formats::Format::Json)?),
            }
            return Ok(if report.feasible {
                ExitCode::Success
            } else {
                ExitCode::Infeasible
            });
        }
        Command::GenSites {
            suite,
            density,
            count,
            seed,
            output,
        } => {
            let spec = match suite {
                Some(p) => formats::read(&p)?,
                None => default_suite(),
            };
            let sites = match count {
                Some(n) => {
                    let areas: Vec<_> =
                        spec.apps.iter().filter_map(|a| spec.areas.get(a)).collect();
                    if areas.is_empty() {
                        return Err(Error::Input("suite has no deployment areas".into()));
                    }
                    let mut out = Vec::with_capacity(n);
                    for (i, area) in areas.iter().enumerate() {
                        let share = n / areas.len() + usize::from(i < n % areas.len());
                        let radius = area.radius_m.values().copied().fold(0.0, f64::max);
                        out.extend(disc_sites(
                            &area.center,
                            radius,
                            share,
                            seed,
                            out.len() as u64,
                        ));
                    }
                    out
                }
                None => suite_sites(&spec, density, seed),
            };
            let mut buf = Vec::new();
            write_sites(&mut buf, &sites)?;
            formats::write_text(
                &output,
                &String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))?,
            )?;
        }
        Command::Defaults { kind, id, output } => match kind {
            DefaultKind::Enrichment => formats::write(&output, &EnrichmentConfig::default())?,
            DefaultKind::Suite => formats::write(&output, &default_suite())?,
            DefaultKind::Profile => {
                let id = id.ok_or_else(|| Error::Usage("--kind profile needs --id".into()))?;
                let p = AppProfile::builtin(&id)
                    .ok_or_else(|| Error::Usage(format!("unknown profile {id:?}")))?;
                formats::write(&output, &p)?;
            }
        },
    }
    Ok(ExitCode::Success)
}
