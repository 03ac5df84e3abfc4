//! Pool of short candidate tours harvested from simulated-annealing runs on
//! a multiple-salesmen relaxation of the problem.
//!
//! Each run partitions the served townships into depot-anchored tours that
//! each leave room for one examination per stop, minimizing total travel.
//! The pool is the deduplicated union of the tours of every run plus one
//! single-stop tour per township, so a planning can always make progress.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BasicTour, Instance, Minutes};
use crate::rng::{derive_seed, stream, SolverRng};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SAParams {
    /// Independent annealing runs feeding the pool.
    pub runs: usize,
    /// Starting temperature, relative to the mean matrix entry. Zero turns
    /// the search into strict hill climbing.
    pub initial_temperature: f64,
    /// Geometric cooling applied after every iteration.
    pub cooling_factor: f64,
    pub iterations_per_run: usize,
    pub seed: u64,
}

impl Default for SAParams {
    fn default() -> Self {
        Self {
            runs: 8,
            initial_temperature: 1.0,
            cooling_factor: 0.995,
            iterations_per_run: 200_000,
            seed: 0,
        }
    }
}

impl SAParams {
    pub fn check(&self) -> Result<()> {
        if self.runs < 1 || self.iterations_per_run < 1 {
            return Err(Error::InvalidParams(
                "annealing runs and iterations must be at least 1".into(),
            ));
        }
        if !(self.initial_temperature >= 0.0 && self.initial_temperature.is_finite()) {
            return Err(Error::InvalidParams(
                "initial temperature must be a finite non-negative number".into(),
            ));
        }
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return Err(Error::InvalidParams("cooling factor must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// A partition of the served townships into feasible tours.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MtspSolution {
    pub tours: Vec<BasicTour>,
}

impl MtspSolution {
    pub fn total_travel(&self, instance: &Instance) -> Minutes {
        self.tours
            .iter()
            .map(|t| instance.route_travel(t.stops()))
            .sum()
    }
}

const P_RELOCATE: f64 = 0.4;
const P_SWAP: f64 = 0.3;
const P_FRESH_TOUR: f64 = 0.05;

/// Townships with demand whose single-stop tour cannot host one examination.
fn unservable(instance: &Instance) -> Vec<usize> {
    let p = instance.params();
    instance
        .served()
        .into_iter()
        .filter(|&i| instance.dist(0, i) + instance.dist(i, 0) + p.exam_duration > p.max_day)
        .collect()
}

struct Annealer<'a> {
    instance: &'a Instance,
    tours: Vec<Vec<usize>>,
    costs: Vec<Minutes>,
    infeasible: usize,
    total: Minutes,
    penalty: Minutes,
}

impl<'a> Annealer<'a> {
    fn new(instance: &'a Instance, tours: Vec<Vec<usize>>) -> Self {
        let mut a = Self {
            instance,
            tours: Vec::new(),
            costs: Vec::new(),
            infeasible: 0,
            total: 0,
            penalty: 10 * instance.params().max_day,
        };
        for t in tours {
            let c = a.cost(&t);
            a.infeasible += usize::from(c.1);
            a.total += c.0;
            a.tours.push(t);
            a.costs.push(c.0);
        }
        a
    }

    /// Search cost of one tour and whether it is over budget.
    fn cost(&self, stops: &[usize]) -> (Minutes, bool) {
        if stops.is_empty() {
            return (0, false);
        }
        let p = self.instance.params();
        let travel = self.instance.route_travel(stops);
        let over = travel + p.exam_duration * stops.len() as Minutes > p.max_day;
        (travel + if over { self.penalty } else { 0 }, over)
    }

    fn is_over(&self, k: usize) -> bool {
        self.cost(&self.tours[k]).1
    }

    /// Proposes a neighbor as replacement contents for up to two tours
    /// (`None` index means a fresh tour).
    fn propose(&self, rng: &mut SolverRng) -> Option<Vec<(Option<usize>, Vec<usize>)>> {
        let n_tours = self.tours.len();
        let r: f64 = rng.random();
        if r < P_RELOCATE {
            let a = rng.random_range(0..n_tours);
            let mut from = self.tours[a].clone();
            let city = from.remove(rng.random_range(0..from.len()));
            let fresh = n_tours == 1 || rng.random::<f64>() < P_FRESH_TOUR;
            if fresh {
                if from.is_empty() {
                    return None;
                }
                return Some(vec![(Some(a), from), (None, vec![city])]);
            }
            let mut b = rng.random_range(0..n_tours - 1);
            if b >= a {
                b += 1;
            }
            let mut to = self.tours[b].clone();
            to.insert(rng.random_range(0..=to.len()), city);
            Some(vec![(Some(a), from), (Some(b), to)])
        } else if r < P_RELOCATE + P_SWAP && n_tours > 1 {
            let a = rng.random_range(0..n_tours);
            let mut b = rng.random_range(0..n_tours - 1);
            if b >= a {
                b += 1;
            }
            let mut ta = self.tours[a].clone();
            let mut tb = self.tours[b].clone();
            let i = rng.random_range(0..ta.len());
            let j = rng.random_range(0..tb.len());
            std::mem::swap(&mut ta[i], &mut tb[j]);
            Some(vec![(Some(a), ta), (Some(b), tb)])
        } else {
            let a = rng.random_range(0..n_tours);
            let len = self.tours[a].len();
            if len < 2 {
                return None;
            }
            let i = rng.random_range(0..len - 1);
            let j = rng.random_range(i + 1..len);
            let mut t = self.tours[a].clone();
            t[i..=j].reverse();
            Some(vec![(Some(a), t)])
        }
    }

    fn delta(&self, change: &[(Option<usize>, Vec<usize>)]) -> (i128, isize) {
        let mut d = 0i128;
        let mut over = 0isize;
        for (k, stops) in change {
            let (c, o) = self.cost(stops);
            d += i128::from(c);
            over += isize::from(o);
            if let Some(k) = k {
                d -= i128::from(self.costs[*k]);
                over -= isize::from(self.is_over(*k));
            }
        }
        (d, over)
    }

    fn apply(&mut self, change: Vec<(Option<usize>, Vec<usize>)>, delta: i128, over: isize) {
        for (k, stops) in change {
            let c = self.cost(&stops).0;
            match k {
                Some(k) => {
                    self.tours[k] = stops;
                    self.costs[k] = c;
                }
                None => {
                    self.tours.push(stops);
                    self.costs.push(c);
                }
            }
        }
        let mut k = 0;
        while k < self.tours.len() {
            if self.tours[k].is_empty() {
                self.tours.swap_remove(k);
                self.costs.swap_remove(k);
            } else {
                k += 1;
            }
        }
        self.total = (i128::from(self.total) + delta) as Minutes;
        self.infeasible = (self.infeasible as isize + over) as usize;
    }
}

/// Random permutation of the served townships, greedily cut into tours that
/// each leave room for one examination per stop.
fn initial_tours(instance: &Instance, rng: &mut SolverRng) -> Vec<Vec<usize>> {
    let mut order = instance.served();
    order.shuffle(rng);
    let p = instance.params();
    let mut tours = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for city in order {
        current.push(city);
        let fits = instance.route_travel(&current) + p.exam_duration * current.len() as Minutes
            <= p.max_day;
        if !fits && current.len() > 1 {
            current.pop();
            tours.push(std::mem::replace(&mut current, vec![city]));
        }
    }
    if !current.is_empty() {
        tours.push(current);
    }
    tours
}

fn mean_entry(instance: &Instance) -> f64 {
    let size = instance.n() + 1;
    let sum: f64 = (0..size)
        .flat_map(|i| (0..size).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| instance.dist(i, j) as f64)
        .sum();
    let mean = sum / (size * (size - 1)) as f64;
    if mean > 0.0 {
        mean
    } else {
        1.0
    }
}

/// Runs one annealing search. `on_accept` sees the search cost after every
/// accepted move.
fn anneal(
    instance: &Instance,
    sa: &SAParams,
    run_seed: u64,
    on_accept: &mut dyn FnMut(Minutes),
) -> Result<MtspSolution> {
    sa.check()?;
    let bad = unservable(instance);
    if !bad.is_empty() {
        return Err(Error::InfeasibleInstance(bad));
    }
    let mut rng = stream(run_seed, &[]);
    let start = initial_tours(instance, &mut rng);
    if start.is_empty() {
        return Ok(MtspSolution { tours: Vec::new() });
    }
    let mut state = Annealer::new(instance, start);
    let scale = mean_entry(instance);
    let mut temperature = sa.initial_temperature;
    let mut best = (state.total, state.tours.clone());

    for _ in 0..sa.iterations_per_run {
        if let Some(change) = state.propose(&mut rng) {
            let (delta, over) = state.delta(&change);
            let accept = delta <= 0
                || (temperature > 0.0
                    && rng.random::<f64>() < (-(delta as f64) / (temperature * scale)).exp());
            if accept {
                state.apply(change, delta, over);
                on_accept(state.total);
                if state.infeasible == 0 && state.total < best.0 {
                    best = (state.total, state.tours.clone());
                }
            }
        }
        temperature *= sa.cooling_factor;
    }

    let tours = best
        .1
        .into_iter()
        .map(BasicTour::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(MtspSolution { tours })
}

/// Partitions the served townships into feasible depot-anchored tours of
/// small total travel time.
pub fn sa_solve_mtsp(instance: &Instance, sa: &SAParams, run_seed: u64) -> Result<MtspSolution> {
    anneal(instance, sa, run_seed, &mut |_| {})
}

/// Deduplicated tours of `sa.runs` independent annealing runs plus every
/// single-stop tour, in canonical order (length, then stops).
pub fn build_pool(instance: &Instance, sa: &SAParams) -> Result<Vec<BasicTour>> {
    sa.check()?;
    let bad = unservable(instance);
    if !bad.is_empty() {
        return Err(Error::InfeasibleInstance(bad));
    }
    let solutions = (0..sa.runs as u64)
        .into_par_iter()
        .map(|run| sa_solve_mtsp(instance, sa, derive_seed(sa.seed, &[run])))
        .collect::<Result<Vec<_>>>()?;
    Ok(merge_pool(instance, solutions))
}

fn merge_pool(instance: &Instance, solutions: Vec<MtspSolution>) -> Vec<BasicTour> {
    let mut pool: BTreeSet<BasicTour> = solutions.into_iter().flat_map(|s| s.tours).collect();
    for city in instance.served() {
        pool.insert(BasicTour::new(vec![city]).expect("single township is a valid tour"));
    }
    pool.into_iter().collect()
}
