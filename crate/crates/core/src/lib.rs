//! Routing and monthly scheduling of mobile examination vans.
//!
//! Every van leaves the depot (location 0) in the morning, performs a number
//! of fixed-length examinations in the townships it visits and returns the
//! same day within a working-time budget. Given the monthly examination
//! demand of every township, the solvers in this crate build a set of daily
//! tours covering the demand exactly, minimizing first the number of tours
//! (hence the number of vans) and then the total working time.
//!
//! Two solvers are provided:
//!
//! - [`heuristic`]: a pool of short tours is harvested from repeated
//!   simulated-annealing runs ([`tourpool`]), then plannings are assembled by
//!   weighted-random tour choice and the best one is kept.
//! - [`genetic`]: a mu+lambda evolutionary search over permutations of
//!   individual examinations, decoded by a greedy split into tours.
//!
//! [`validate`] is the referee for both; [`io`] handles files, synthetic
//! instances and exports.

pub mod error;
pub mod genetic;
pub mod heuristic;
pub mod io;
pub mod model;
pub mod rng;
pub mod tourpool;
pub mod validate;

pub use error::{Error, Result};
pub use model::{
    assign_days, derive_monthly_demand, duration, travel_time, vans_required, BasicTour, Instance,
    Minutes, Params, PlannedTour, Schedule,
};
pub use validate::{compare_schedules, validate_schedule, Violation, ViolationKind};
