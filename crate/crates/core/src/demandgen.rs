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

//! Synthetic demand from a user count and an application profile.
//!
//! Active users are Binomial(N, p_s). Per-user request rates are normal,
//! truncated at zero. Every component is rounded up to three decimals so the
//! generated vector never understates the formula.

use alloc::format;
use alloc::string::String;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Demand, Dimension, ResourceVector, Zone};
use crate::fixed::Fixed;
use crate::rng::{derive_seed, keyed_rng, tag};
use crate::stats::{binomial_ln_pmf, normal_cdf, normal_quantile};

/// Above this many trials the binomial draw uses the normal approximation.
pub const EXACT_BINOMIAL_MAX: u64 = 100_000;

/// Decimals kept by [`compute_demand_vector`] (rounded up).
pub const DEMAND_DECIMALS: u32 = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppProfile {
    pub profile_id: String,
    /// concurrency level in [0, 1]
    pub p_s: f64,
    /// safety factor, at least 1
    pub alpha_s: f64,
    /// mean per-user request rate (req/s)
    pub rate_mean: f64,
    pub rate_cv: f64,
    pub ram_base_gb: f64,
    pub ram_session_gb: f64,
    /// shared RAM term coefficient (GB per sqrt user)
    pub beta_s: f64,
    pub sto_base_gb: f64,
    pub sto_session_gb: f64,
    pub t_cpu_s: f64,
    pub t_gpu_s: f64,
    pub t_tpu_s: f64,
    pub u_cpu: f64,
    pub u_gpu: f64,
    pub u_tpu: f64,
    pub phi_gpu: f64,
    pub phi_tpu: f64,
    /// log volume per request (GB)
    pub log_gb_per_request: f64,
    /// log retention window (s)
    pub log_retention_s: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid profile {profile}: {message}")]
pub struct ProfileError {
    pub profile: String,
    pub message: String,
}

impl AppProfile {
    pub fn validate(&self) -> Result<(), ProfileError> {
        let fail = |m: &str| {
            Err(ProfileError {
                profile: self.profile_id.clone(),
                message: m.into(),
            })
        };
        let all = [
            self.p_s,
            self.alpha_s,
            self.rate_mean,
            self.rate_cv,
            self.ram_base_gb,
            self.ram_session_gb,
            self.beta_s,
            self.sto_base_gb,
            self.sto_session_gb,
            self.t_cpu_s,
            self.t_gpu_s,
            self.t_tpu_s,
            self.u_cpu,
            self.u_gpu,
            self.u_tpu,
            self.phi_gpu,
            self.phi_tpu,
            self.log_gb_per_request,
            self.log_retention_s,
        ];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return fail("parameters must be finite and non-negative");
        }
        if self.p_s > 1.0 {
            return fail("p_s must lie in [0, 1]");
        }
        if self.alpha_s < 1.0 {
            return fail("alpha_s must be at least 1");
        }
        for u in [self.u_cpu, self.u_gpu, self.u_tpu] {
            if !(u > 0.0 && u < 1.0) {
                return fail("utilisation targets must lie in (0, 1)");
            }
        }
        if self.phi_gpu > 1.0 || self.phi_tpu > 1.0 || self.phi_gpu + self.phi_tpu > 1.0 + 1e-12 {
            return fail("phi_gpu + phi_tpu must not exceed 1");
        }
        Ok(())
    }

    /// Built-in profile by id: `cctv`, `vr`, `robot` or `lidar`. Values are
    /// artifact defaults.
    #[rustfmt::skip]
    pub fn builtin(id: &str) -> Option<AppProfile> {
        let p = |id: &str, v: [f64; 19]| AppProfile {
            profile_id: id.into(),
            p_s: v[0],
            alpha_s: v[1],
            rate_mean: v[2],
            rate_cv: v[3],
            ram_base_gb: v[4],
            ram_session_gb: v[5],
            beta_s: v[6],
            sto_base_gb: v[7],
            sto_session_gb: v[8],
            t_cpu_s: v[9],
            t_gpu_s: v[10],
            t_tpu_s: v[11],
            u_cpu: v[12],
            u_gpu: v[13],
            u_tpu: v[14],
            phi_gpu: v[15],
            phi_tpu: v[16],
            log_gb_per_request: v[17],
            log_retention_s: v[18],
        };
        //                  p_s   alpha rate  cv    ramb  rams  beta  stob   stos  tcpu   tgpu   ttpu   ucpu ugpu utpu phig phit  log     ret
        match id {
            "cctv" => Some(p(id, [0.95, 1.2, 1.0, 0.15, 4.0, 0.03, 0.5, 100.0, 1.0, 0.010, 0.010, 0.0, 0.75, 0.75, 0.75, 0.5, 0.0, 2e-6, 604_800.0])),
            "vr" => Some(p(id, [0.5, 1.3, 0.5, 0.3, 8.0, 0.05, 1.0, 20.0, 0.1, 0.010, 0.008, 0.0, 0.7, 0.7, 0.7, 0.6, 0.0, 1e-6, 86_400.0])),
            "robot" => Some(p(id, [0.9, 1.25, 5.0, 0.2, 2.0, 0.02, 0.3, 10.0, 0.05, 0.002, 0.004, 0.003, 0.7, 0.7, 0.7, 0.1, 0.05, 1e-7, 86_400.0])),
            "lidar" => Some(p(id, [0.7, 1.2, 0.2, 0.25, 4.0, 0.01, 0.5, 200.0, 0.5, 0.020, 0.050, 0.050, 0.8, 0.8, 0.8, 0.2, 0.1, 1e-3, 3_600.0])),
            _ => None,
        }
    }

    pub const BUILTIN_IDS: [&'static str; 4] = ["cctv", "vr", "robot", "lidar"];
}

/// One Binomial(n, p) draw by inverting the CDF at a single seeded uniform.
pub fn sample_active_users(n: u64, p: f64, rng_seed: u64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    let u: f64 = keyed_rng(rng_seed, 0, tag::ACTIVE_USERS).random();
    let mean = n as f64 * p;
    let sd = libm::sqrt(mean * (1.0 - p));
    if n > EXACT_BINOMIAL_MAX {
        let z = normal_quantile(u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON));
        return libm::round(mean + sd * z).clamp(0.0, n as f64) as u64;
    }
    // Mass below `start` is far under f64 resolution.
    let start = libm::floor(mean - 40.0 * sd - 10.0).max(0.0) as u64;
    let ratio = p / (1.0 - p);
    let mut pmf = libm::exp(binomial_ln_pmf(start, n, p));
    let mut cdf = pmf;
    let mut k = start;
    while cdf <= u && k < n {
        pmf *= (n - k) as f64 / (k + 1) as f64 * ratio;
        k += 1;
        cdf += pmf;
    }
    k
}

/// Draw one per-user rate from N(mean, sd^2) truncated to [0, inf).
fn truncated_normal(mean: f64, sd: f64, u: f64) -> f64 {
    if sd <= 0.0 {
        return mean.max(0.0);
    }
    let lo = normal_cdf(-mean / sd);
    let q = (lo + u * (1.0 - lo)).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
    (mean + sd * normal_quantile(q)).max(0.0)
}

/// `alpha_s * sum(r_i)` over `n_active` users; user `i` draws from its own
/// stream.
pub fn aggregate_rate(n_active: u64, profile: &AppProfile, rng_seed: u64) -> f64 {
    if profile.rate_cv == 0.0 {
        return profile.alpha_s * n_active as f64 * profile.rate_mean;
    }
    let sd = profile.rate_cv * profile.rate_mean;
    let total: f64 = (0..n_active)
        .map(|i| {
            truncated_normal(
                profile.rate_mean,
                sd,
                keyed_rng(rng_seed, i, tag::USER_RATE).random(),
            )
        })
        .sum();
    profile.alpha_s * total
}

pub fn ram_demand(n_active: u64, profile: &AppProfile) -> f64 {
    let n = n_active as f64;
    profile.alpha_s
        * (profile.ram_base_gb + profile.beta_s * libm::sqrt(n) + profile.ram_session_gb * n)
}

pub fn storage_demand(lambda: f64, n_active: u64, profile: &AppProfile) -> f64 {
    let n = n_active as f64;
    profile.alpha_s
        * (profile.sto_base_gb
            + profile.sto_session_gb * n
            + lambda * profile.log_gb_per_request * profile.log_retention_s)
}

/// All five demand components, each rounded up to three decimals.
pub fn compute_demand_vector(lambda: f64, n_active: u64, profile: &AppProfile) -> ResourceVector {
    let raw = [
        ram_demand(n_active, profile),
        storage_demand(lambda, n_active, profile),
        lambda * profile.t_cpu_s / profile.u_cpu,
        profile.phi_gpu * lambda * profile.t_gpu_s / profile.u_gpu,
        profile.phi_tpu * lambda * profile.t_tpu_s / profile.u_tpu,
    ];
    let mut v = ResourceVector::ZERO;
    for d in Dimension::ALL {
        v[d] = Fixed::ceil_f64(raw[d.index()].max(0.0), DEMAND_DECIMALS)
            .unwrap_or(Fixed::from_raw(i64::MAX));
    }
    v
}

/// Active users, then aggregate rate, then the demand vector.
pub fn generate_demand(
    users: u64,
    profile: &AppProfile,
    zone: Zone,
    seed: u64,
) -> Result<Demand, ProfileError> {
    profile.validate()?;
    let n_active = sample_active_users(users, profile.p_s, derive_seed(&[seed, tag::ACTIVE_USERS]));
    let lambda = aggregate_rate(n_active, profile, derive_seed(&[seed, tag::USER_RATE]));
    if !lambda.is_finite() {
        return Err(ProfileError {
            profile: profile.profile_id.clone(),
            message: format!("rate overflow: {lambda}"),
        });
    }
    Ok(Demand {
        vector: compute_demand_vector(lambda, n_active, profile),
        zone,
        user_count: users,
        profile_id: Some(profile.profile_id.clone()),
        seed: Some(seed),
    })
}
