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

//! Distance primitives on a spherical Earth (R = 6,371,000 m).
//!
//! Zone distances work in the lat/lon plane and ignore elevation; the ECEF
//! distance used for topology sampling includes it.

use crate::domain::{GeoPoint, Zone};

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A non-negative distance in meters.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct DistanceMeters(f64);

impl DistanceMeters {
    pub const ZERO: DistanceMeters = DistanceMeters(0.0);

    pub fn new(value: f64) -> Option<Self> {
        (value >= 0.0).then_some(DistanceMeters(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Great-circle distance; elevation is ignored.
pub fn haversine_m(a: &GeoPoint, b: &GeoPoint) -> DistanceMeters {
    let phi1 = a.lat.to_radians();
    let phi2 = b.lat.to_radians();
    let dphi = phi2 - phi1;
    let dlambda = (b.lon - a.lon).to_radians();
    let s1 = libm::sin(dphi / 2.0);
    let s2 = libm::sin(dlambda / 2.0);
    let h = s1 * s1 + libm::cos(phi1) * libm::cos(phi2) * s2 * s2;
    let c = 2.0 * libm::asin(libm::sqrt(h.clamp(0.0, 1.0)));
    DistanceMeters(EARTH_RADIUS_M * c)
}

fn ecef(p: &GeoPoint) -> [f64; 3] {
    let r = EARTH_RADIUS_M + p.elev_m;
    let lat = p.lat.to_radians();
    let lon = p.lon.to_radians();
    [
        r * libm::cos(lat) * libm::cos(lon),
        r * libm::cos(lat) * libm::sin(lon),
        r * libm::sin(lat),
    ]
}

/// Straight-line distance between the earth-centred positions of two points.
pub fn ecef_distance_m(a: &GeoPoint, b: &GeoPoint) -> DistanceMeters {
    let pa = ecef(a);
    let pb = ecef(b);
    let d: f64 = pa
        .iter()
        .zip(pb.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    DistanceMeters(libm::sqrt(d))
}

fn on_segment(px: f64, py: f64, ax: f64, ay: f64, bx: f64, by: f64) -> bool {
    let cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
    let len = libm::hypot(bx - ax, by - ay).max(1e-12);
    if cross.abs() / len > 1e-10 {
        return false;
    }
    let eps = 1e-12;
    px >= ax.min(bx) - eps
        && px <= ax.max(bx) + eps
        && py >= ay.min(by) - eps
        && py <= ay.max(by) + eps
}

/// Ray casting in the (lon, lat) plane. Points on an edge or vertex are inside.
pub fn point_in_polygon(p: &GeoPoint, zone: &Zone) -> bool {
    let v = &zone.vertices;
    let n = v.len();
    if n == 0 {
        return false;
    }
    let (px, py) = (p.lon, p.lat);
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = (v[i].lon, v[i].lat);
        let (xj, yj) = (v[j].lon, v[j].lat);
        if on_segment(px, py, xj, yj, xi, yi) {
            return true;
        }
        if (yi > py) != (yj > py) {
            let x_cross = xi + (py - yi) * (xj - xi) / (yj - yi);
            if px < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Largest distance from `p` to any point of the zone, or zero when `p`
/// lies in the closed zone. The farthest point of a polygon is one of its
/// vertices, so only vertices are examined.
pub fn zone_max_distance_m(p: &GeoPoint, zone: &Zone) -> DistanceMeters {
    if point_in_polygon(p, zone) {
        return DistanceMeters::ZERO;
    }
    zone.vertices
        .iter()
        .map(|v| haversine_m(p, v))
        .fold(
            DistanceMeters::ZERO,
            |acc, d| if d.0 > acc.0 { d } else { acc },
        )
}

/// True when segment p1-p2 and segment p3-p4 share a point.
pub(crate) fn segments_intersect(
    p1: (f64, f64),
    p2: (f64, f64),
    p3: (f64, f64),
    p4: (f64, f64),
) -> bool {
    fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
        (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
    }
    fn within(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> bool {
        c.0 >= a.0.min(b.0) && c.0 <= a.0.max(b.0) && c.1 >= a.1.min(b.1) && c.1 <= a.1.max(b.1)
    }
    let d1 = orient(p3, p4, p1);
    let d2 = orient(p3, p4, p2);
    let d3 = orient(p1, p2, p3);
    let d4 = orient(p1, p2, p4);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && within(p3, p4, p1))
        || (d2 == 0.0 && within(p3, p4, p2))
        || (d3 == 0.0 && within(p1, p2, p3))
        || (d4 == 0.0 && within(p1, p2, p4))
}
