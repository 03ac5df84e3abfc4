//! Seeded synthetic instances.
//!
//! Locations are scattered uniformly in a latitude/longitude box with the
//! depot at index 0. Travel times come from straight-line distance scaled by
//! `speed`, each direction inflated by its own factor in `[1.0, 1.2]`. Any
//! township whose round trip plus one examination would not fit in a day is
//! pulled closer, so every generated instance is feasible.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{default_names, derive_monthly_demand, Instance, Minutes, Params};
use crate::rng::stream;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    /// Number of townships.
    pub n: usize,
    /// Inclusive range of yearly untested births per township.
    pub births_range: (u64, u64),
    /// Minutes of driving per coordinate unit.
    pub speed: f64,
    pub bbox: BoundingBox,
    pub seed: u64,
    pub params: Params,
}

impl Default for GenSpec {
    /// A county-sized region: 93 townships, no drive much over three hours,
    /// around 500 monthly examinations.
    fn default() -> Self {
        Self {
            n: 93,
            births_range: (0, 17),
            speed: 80.0,
            bbox: BoundingBox {
                lat_min: 46.85,
                lat_max: 47.65,
                lon_min: 26.55,
                lon_max: 28.15,
            },
            seed: 0,
            params: Params::default(),
        }
    }
}

impl GenSpec {
    pub fn check(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidParams("need at least one township".into()));
        }
        if self.births_range.0 > self.births_range.1 {
            return Err(Error::InvalidParams("births range is empty".into()));
        }
        if !(self.speed >= 0.0 && self.speed.is_finite()) {
            return Err(Error::InvalidParams("speed must be non-negative".into()));
        }
        let b = &self.bbox;
        if !(b.lat_min <= b.lat_max && b.lon_min <= b.lon_max) {
            return Err(Error::InvalidParams("bounding box is inverted".into()));
        }
        self.params.check()
    }
}

/// Symmetric straight-line travel times, before rounding and inflation.
pub fn base_matrix(points: &[(f64, f64)], speed: f64) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|a| {
            points
                .iter()
                .map(|b| speed * (a.0 - b.0).hypot(a.1 - b.1))
                .collect()
        })
        .collect()
}

fn sample_in(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    if lo < hi {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

pub fn generate_instance(spec: &GenSpec) -> Result<Instance> {
    spec.check()?;
    let mut rng = stream(spec.seed, &[]);
    let size = spec.n + 1;
    let b = &spec.bbox;
    let round6 = |x: f64| (x * 1e6).round() / 1e6;
    let points: Vec<(f64, f64)> = (0..size)
        .map(|_| {
            (
                round6(sample_in(&mut rng, b.lat_min, b.lat_max)),
                round6(sample_in(&mut rng, b.lon_min, b.lon_max)),
            )
        })
        .collect();

    let base = base_matrix(&points, spec.speed);
    let mut dist: Vec<Vec<Minutes>> = base
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &d)| {
                    let factor: f64 = rng.random_range(1.0..=1.2);
                    if i == j {
                        0
                    } else {
                        (d.round() * factor).round() as Minutes
                    }
                })
                .collect()
        })
        .collect();

    let p = spec.params;
    let cap = (p.max_day - p.exam_duration) / 2;
    for i in 1..size {
        if dist[0][i] + dist[i][0] + p.exam_duration > p.max_day {
            dist[0][i] = dist[0][i].min(cap);
            dist[i][0] = dist[i][0].min(cap);
        }
    }

    let (lo, hi) = spec.births_range;
    let demand = std::iter::once(0)
        .chain((1..size).map(|_| {
            let births = rng.random_range(lo..=hi);
            u32::try_from(derive_monthly_demand(births)).unwrap_or(u32::MAX)
        }))
        .collect();

    Instance::new(default_names(size), dist, demand, Some(points), p)
}
