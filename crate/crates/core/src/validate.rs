//! Schedule validity and the ranking between valid schedules.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{vans_required, Instance, Minutes, Schedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationKind {
    /// A township receives a different number of examinations than required.
    CoverageMismatch,
    /// A tour does not fit in one working day.
    DurationExceeded,
    /// A stop is not a township index, or a tour is malformed.
    BadIndex,
    /// The day/van assignment is inconsistent.
    DayClash,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
    pub tour_index: Option<usize>,
}

impl Violation {
    fn new(kind: ViolationKind, tour_index: Option<usize>, detail: String) -> Self {
        Self {
            kind,
            detail,
            tour_index,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tour_index {
            Some(t) => write!(f, "{:?} (tour {}): {}", self.kind, t + 1, self.detail),
            None => write!(f, "{:?}: {}", self.kind, self.detail),
        }
    }
}

/// Lists every way `s` fails to be a valid monthly schedule for `instance`.
/// An empty list means the schedule is valid.
pub fn validate_schedule(s: &Schedule, instance: &Instance) -> Vec<Violation> {
    use ViolationKind::*;

    let params = instance.params();
    let mut out = Vec::new();
    let mut served = vec![0u64; instance.n() + 1];

    for (k, pt) in s.tours.iter().enumerate() {
        let stops = pt.stops();
        let mut well_formed = true;
        if stops.is_empty() {
            out.push(Violation::new(BadIndex, Some(k), "tour has no stops".into()));
            well_formed = false;
        }
        if pt.exams.len() != stops.len() {
            out.push(Violation::new(
                BadIndex,
                Some(k),
                format!("{} examination counts for {} stops", pt.exams.len(), stops.len()),
            ));
            well_formed = false;
        }
        for &stop in stops {
            if !instance.is_township(stop) {
                out.push(Violation::new(
                    BadIndex,
                    Some(k),
                    format!("stop {stop} is not a township index in 1..={}", instance.n()),
                ));
                well_formed = false;
            }
        }
        if !well_formed {
            continue;
        }
        for (&stop, &e) in stops.iter().zip(&pt.exams) {
            served[stop] += u64::from(e);
        }
        let total =
            instance.route_travel(stops) + params.exam_duration * pt.total_exams();
        if total > params.max_day {
            out.push(Violation::new(
                DurationExceeded,
                Some(k),
                format!("duration {total} exceeds {} minutes", params.max_day),
            ));
        }
    }

    for (t, (&got, &want)) in served.iter().zip(instance.demand()).enumerate().skip(1) {
        if got != u64::from(want) {
            out.push(Violation::new(
                CoverageMismatch,
                None,
                format!(
                    "township {t} ({}) receives {got} examinations, requires {want}",
                    instance.name(t)
                ),
            ));
        }
    }

    let m = s.tours.len();
    if s.day_of.len() != m || s.van_of.len() != m {
        out.push(Violation::new(
            DayClash,
            None,
            format!(
                "{} tours but {} day and {} van assignments",
                m,
                s.day_of.len(),
                s.van_of.len()
            ),
        ));
        return out;
    }
    let vans = vans_required(m, params);
    let mut used = HashSet::with_capacity(m);
    for (k, (&day, &van)) in s.day_of.iter().zip(&s.van_of).enumerate() {
        if !(1..=params.working_days).contains(&day) {
            out.push(Violation::new(
                DayClash,
                Some(k),
                format!("day {day} outside 1..={}", params.working_days),
            ));
        }
        if van < 1 || van as usize > vans {
            out.push(Violation::new(
                DayClash,
                Some(k),
                format!("van {van} outside 1..={vans}"),
            ));
        }
        if !used.insert((day, van)) {
            out.push(Violation::new(
                DayClash,
                Some(k),
                format!("van {van} already has a tour on day {day}"),
            ));
        }
    }
    out
}

/// Ranking key of a valid schedule: tour count, then total duration.
pub fn schedule_key(s: &Schedule, instance: &Instance) -> Result<(usize, Minutes)> {
    Ok((s.len(), s.total_duration(instance)?))
}

/// Ranking key using travel time only. Examination time is identical across
/// valid schedules of one instance, so this orders them exactly like
/// [`schedule_key`].
pub fn schedule_travel_key(s: &Schedule, instance: &Instance) -> Result<(usize, Minutes)> {
    Ok((s.len(), s.total_travel(instance)?))
}

/// Orders two valid schedules: fewer tours first, then less total duration.
/// `Ordering::Less` means `a` is better.
pub fn compare_schedules(a: &Schedule, b: &Schedule, instance: &Instance) -> Result<Ordering> {
    for (label, s) in [("first", a), ("second", b)] {
        let violations = validate_schedule(s, instance);
        if let Some(v) = violations.first() {
            return Err(Error::ContractViolation(format!(
                "{label} schedule is invalid ({} violations, e.g. {v})",
                violations.len()
            )));
        }
    }
    Ok(schedule_key(a, instance)?.cmp(&schedule_key(b, instance)?))
}
