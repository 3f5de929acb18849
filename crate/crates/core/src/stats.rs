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

//! Distribution helpers and order-statistic confidence intervals.

use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("no samples")]
    Empty,
    #[error("confidence level must lie in (0, 1)")]
    BadLevel,
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Standard normal quantile (Acklam's rational approximation refined by
/// one Halley step). `p` must lie in (0, 1).
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let p_low = 0.024_25;
    let x = if p < p_low {
        let q = libm::sqrt(-2.0 * libm::log(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = libm::sqrt(-2.0 * libm::log(1.0 - p));
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let e = normal_cdf(x) - p;
    let u = e * libm::sqrt(2.0 * core::f64::consts::PI) * libm::exp(x * x / 2.0);
    x - u / (1.0 + x * u / 2.0)
}

fn ln_choose(n: u64, k: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

/// ln P[X = k] for X ~ Binomial(n, p), 0 < p < 1.
pub fn binomial_ln_pmf(k: u64, n: u64, p: f64) -> f64 {
    ln_choose(n, k) + k as f64 * libm::log(p) + (n - k) as f64 * libm::log1p(-p)
}

/// P[X <= k] for X ~ Binomial(n, p).
pub fn binomial_cdf(k: i64, n: u64, p: f64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let k = k as u64;
    if k >= n || p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    let total: f64 = (0..=k).map(|i| libm::exp(binomial_ln_pmf(i, n, p))).sum();
    total.min(1.0)
}

/// Median (mean of the two middle values for even counts) of sorted data.
fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// 1-based order-statistic ranks `(l, u)` bracketing the median at the
/// given confidence level: `l` is the largest rank with
/// `BinomCDF(l-1; n, 1/2) <= alpha/2`, `u` the smallest with
/// `BinomCDF(u-1; n, 1/2) >= 1 - alpha/2`.
pub fn median_ci_ranks(n: usize, level: f64) -> (usize, usize) {
    let half_alpha = (1.0 - level) / 2.0;
    let mut l = 1;
    for r in 1..=n {
        if binomial_cdf(r as i64 - 1, n as u64, 0.5) <= half_alpha {
            l = r;
        } else {
            break;
        }
    }
    let mut u = n;
    for r in 1..=n {
        if binomial_cdf(r as i64 - 1, n as u64, 0.5) >= 1.0 - half_alpha {
            u = r;
            break;
        }
    }
    (l, u)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MedianCi {
    pub median: f64,
    pub low: f64,
    pub high: f64,
}

/// Sample median with a distribution-free confidence interval. Fewer than
/// six samples give `[min, max]`.
pub fn median_ci(samples: &[f64], level: f64) -> Result<MedianCi, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::Empty);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::BadLevel);
    }
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = median_sorted(&sorted);
    let (low, high) = if n < 6 {
        (sorted[0], sorted[n - 1])
    } else {
        let (l, u) = median_ci_ranks(n, level);
        (sorted[l - 1], sorted[u - 1])
    };
    Ok(MedianCi {
        median,
        low: low.min(median),
        high: high.max(median),
    })
}
