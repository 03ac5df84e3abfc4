//! Domain types and the arithmetic every solver shares.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Driving or working time in whole minutes.
pub type Minutes = u64;

/// Global working-time parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Length of one examination.
    pub exam_duration: Minutes,
    /// Working time available to one van in one day.
    pub max_day: Minutes,
    /// Working days in a month.
    pub working_days: u32,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            exam_duration: 30,
            max_day: 600,
            working_days: 21,
        }
    }
}

impl Params {
    pub fn check(&self) -> Result<()> {
        if self.exam_duration < 1 {
            return Err(Error::InvalidParams("exam_duration must be at least 1".into()));
        }
        if self.max_day < self.exam_duration {
            return Err(Error::InvalidParams(format!(
                "max_day ({}) must be at least exam_duration ({})",
                self.max_day, self.exam_duration
            )));
        }
        if self.working_days < 1 {
            return Err(Error::InvalidParams("working_days must be at least 1".into()));
        }
        Ok(())
    }
}

/// A problem instance. Location 0 is the depot; townships are `1..=n()`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    names: Vec<String>,
    size: usize,
    dist: Vec<Minutes>,
    demand: Vec<u32>,
    coords: Option<Vec<(f64, f64)>>,
    params: Params,
}

impl Instance {
    /// Builds an instance, checking every structural invariant.
    ///
    /// `dist` is a directed travel-time matrix over the depot and all
    /// townships; `coords` are `(latitude, longitude)` pairs.
    pub fn new(
        names: Vec<String>,
        dist: Vec<Vec<Minutes>>,
        demand: Vec<u32>,
        coords: Option<Vec<(f64, f64)>>,
        params: Params,
    ) -> Result<Self> {
        params.check()?;
        let size = dist.len();
        if size < 2 {
            return Err(Error::InvalidInstance(
                "need the depot and at least one township".into(),
            ));
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidInstance(format!(
                    "distance row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            if row[i] != 0 {
                return Err(Error::InvalidInstance(format!(
                    "distance from {i} to itself is {}, expected 0",
                    row[i]
                )));
            }
        }
        if names.len() != size {
            return Err(Error::InvalidInstance(format!(
                "{} names for {size} locations",
                names.len()
            )));
        }
        if demand.len() != size {
            return Err(Error::InvalidInstance(format!(
                "{} demands for {size} locations",
                demand.len()
            )));
        }
        if demand[0] != 0 {
            return Err(Error::InvalidInstance("the depot cannot have demand".into()));
        }
        if let Some(c) = &coords {
            if c.len() != size {
                return Err(Error::InvalidInstance(format!(
                    "{} coordinates for {size} locations",
                    c.len()
                )));
            }
        }
        Ok(Self {
            names,
            size,
            dist: dist.into_iter().flatten().collect(),
            demand,
            coords,
            params,
        })
    }

    /// Instance with default parameters and placeholder names.
    pub fn from_matrix(dist: Vec<Vec<Minutes>>, demand: Vec<u32>) -> Result<Self> {
        let names = default_names(dist.len());
        Self::new(names, dist, demand, None, Params::default())
    }

    pub fn with_params(mut self, params: Params) -> Result<Self> {
        params.check()?;
        self.params = params;
        Ok(self)
    }

    /// Number of townships, excluding the depot.
    pub fn n(&self) -> usize {
        self.size - 1
    }

    #[inline]
    pub fn dist(&self, from: usize, to: usize) -> Minutes {
        self.dist[from * self.size + to]
    }

    pub fn dist_rows(&self) -> Vec<Vec<Minutes>> {
        self.dist.chunks(self.size).map(<[_]>::to_vec).collect()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn demand(&self) -> &[u32] {
        &self.demand
    }

    pub fn total_demand(&self) -> u64 {
        self.demand.iter().map(|&d| u64::from(d)).sum()
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Townships with positive demand, ascending.
    pub fn served(&self) -> Vec<usize> {
        (1..self.size).filter(|&i| self.demand[i] > 0).collect()
    }

    pub fn is_township(&self, i: usize) -> bool {
        (1..self.size).contains(&i)
    }

    /// Travel time of the closed route depot, `stops...`, depot. Indices are
    /// not checked.
    pub(crate) fn route_travel(&self, stops: &[usize]) -> Minutes {
        let Some((&first, &last)) = stops.first().zip(stops.last()) else {
            return 0;
        };
        let inner: Minutes = stops.windows(2).map(|w| self.dist(w[0], w[1])).sum();
        self.dist(0, first) + inner + self.dist(last, 0)
    }
}

pub(crate) fn default_names(size: usize) -> Vec<String> {
    std::iter::once("Depot".to_string())
        .chain((1..size).map(|i| format!("Township {i}")))
        .collect()
}

/// An ordered depot-to-depot route. The depot is implicit at both ends.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BasicTour {
    stops: Vec<usize>,
}

impl BasicTour {
    /// A pool tour: non-empty, no depot, pairwise distinct stops.
    pub fn new(stops: Vec<usize>) -> Result<Self> {
        let tour = Self::route(stops)?;
        let mut seen = HashSet::with_capacity(tour.stops.len());
        if let Some(dup) = tour.stops.iter().find(|s| !seen.insert(**s)) {
            return Err(Error::InvalidInstance(format!(
                "township {dup} appears twice in a basic tour"
            )));
        }
        Ok(tour)
    }

    /// A route that may pass through the same township more than once, as
    /// decoded from a permutation of examinations.
    pub fn route(stops: Vec<usize>) -> Result<Self> {
        if stops.is_empty() {
            return Err(Error::InvalidInstance("a tour needs at least one stop".into()));
        }
        if stops.contains(&0) {
            return Err(Error::InvalidInstance("the depot cannot be a tour stop".into()));
        }
        Ok(Self { stops })
    }

    pub fn stops(&self) -> &[usize] {
        &self.stops
    }

    pub fn len(&self) -> usize {
        self.stops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stops.is_empty()
    }

    /// Whether the route leaves room for one examination at every stop.
    pub fn fits_day(&self, instance: &Instance) -> bool {
        let p = instance.params();
        instance.route_travel(&self.stops) + p.exam_duration * self.stops.len() as Minutes
            <= p.max_day
    }
}

/// Canonical pool order: shorter tours first, then lexicographic by stops.
impl Ord for BasicTour {
    fn cmp(&self, other: &Self) -> Ordering {
        self.stops
            .len()
            .cmp(&other.stops.len())
            .then_with(|| self.stops.cmp(&other.stops))
    }
}

impl PartialOrd for BasicTour {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One working day of one van: a route and the examinations at each stop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedTour {
    #[serde(rename = "stops")]
    pub tour: BasicTour,
    pub exams: Vec<u32>,
}

impl PlannedTour {
    pub fn new(tour: BasicTour, exams: Vec<u32>) -> Result<Self> {
        if exams.len() != tour.len() {
            return Err(Error::InvalidInstance(format!(
                "{} examination counts for {} stops",
                exams.len(),
                tour.len()
            )));
        }
        Ok(Self { tour, exams })
    }

    pub fn stops(&self) -> &[usize] {
        self.tour.stops()
    }

    pub fn total_exams(&self) -> u64 {
        self.exams.iter().map(|&e| u64::from(e)).sum()
    }
}

/// The month's tours plus their day and van assignment.
///
/// `day_of[k]` and `van_of[k]` are 1-based and belong to `tours[k]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub tours: Vec<PlannedTour>,
    pub day_of: Vec<u32>,
    pub van_of: Vec<u32>,
}

impl Schedule {
    /// Wraps tours in emission order with the balanced day assignment.
    pub fn from_tours(tours: Vec<PlannedTour>, params: &Params) -> Self {
        let (day_of, van_of) = assign_days(tours.len(), params);
        Self {
            tours,
            day_of,
            van_of,
        }
    }

    pub fn len(&self) -> usize {
        self.tours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tours.is_empty()
    }

    pub fn vans(&self) -> u32 {
        self.van_of.iter().copied().max().unwrap_or(0)
    }

    pub fn total_travel(&self, instance: &Instance) -> Result<Minutes> {
        self.tours
            .iter()
            .map(|t| travel_time(&t.tour, instance))
            .sum()
    }

    pub fn total_duration(&self, instance: &Instance) -> Result<Minutes> {
        self.tours.iter().map(|t| duration(t, instance)).sum()
    }
}

/// Monthly examinations implied by a yearly count of births lacking timely
/// prenatal care: seven examinations each, spread over twelve months,
/// rounded up.
pub fn derive_monthly_demand(yearly_untested_births: u64) -> u64 {
    (yearly_untested_births * 7).div_ceil(12)
}

pub fn vans_required(num_tours: usize, params: &Params) -> usize {
    num_tours.div_ceil(params.working_days as usize)
}

fn check_stops(stops: &[usize], instance: &Instance) -> Result<()> {
    if stops.is_empty() {
        return Err(Error::InvalidInstance("tour has no stops".into()));
    }
    match stops.iter().find(|&&s| !instance.is_township(s)) {
        Some(bad) => Err(Error::InvalidInstance(format!(
            "stop {bad} is not a township index in 1..={}",
            instance.n()
        ))),
        None => Ok(()),
    }
}

pub fn travel_time(tour: &BasicTour, instance: &Instance) -> Result<Minutes> {
    check_stops(tour.stops(), instance)?;
    Ok(instance.route_travel(tour.stops()))
}

/// Travel time plus examination time of a planned tour.
pub fn duration(pt: &PlannedTour, instance: &Instance) -> Result<Minutes> {
    if pt.exams.len() != pt.tour.len() {
        return Err(Error::InvalidInstance(format!(
            "{} examination counts for {} stops",
            pt.exams.len(),
            pt.tour.len()
        )));
    }
    Ok(travel_time(&pt.tour, instance)? + instance.params().exam_duration * pt.total_exams())
}

/// Round-robin assignment of tours to days in emission order. Tour `k` runs
/// on day `k % working_days + 1` with van `k / working_days + 1`.
pub fn assign_days(num_tours: usize, params: &Params) -> (Vec<u32>, Vec<u32>) {
    let days = params.working_days as usize;
    (0..num_tours)
        .map(|k| ((k % days) as u32 + 1, (k / days) as u32 + 1))
        .unzip()
}
