//! Pool-based planning: repeatedly pick a productive tour from the pool by
//! score-weighted sampling, fill it with as many examinations as the day
//! allows, and subtract them from the remaining demand until none is left.
//! Plannings are restarted within a time budget and the best one is kept.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BasicTour, Instance, Minutes, PlannedTour, Schedule};
use crate::rng::stream;
use crate::tourpool::{build_pool, SAParams};
use crate::validate::schedule_key;

/// Order in which the stops of a tour are filled with examinations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    FurthestFirst,
    ClosestFirst,
    /// Largest remaining demand first, ties broken furthest first.
    MostRelevantFirst,
    Random,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreMode {
    /// Examinations per travel minute.
    #[default]
    Ratio,
    /// Examinations times `difference_factor`, minus travel minutes.
    Difference,
}

/// Weights of the schedule score. Lower scores are better.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub tours: f64,
    pub distance: f64,
    pub distinct: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Self {
            tours: 1e6,
            distance: 1.0,
            distinct: 100.0,
        }
    }
}

/// How long [`run_heuristic`] keeps restarting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Budget {
    /// Wall-clock limit. At least one planning is always completed.
    Time(Duration),
    /// A fixed number of restarts; fully reproducible.
    Restarts(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeuristicParams {
    pub strategy: Strategy,
    pub score_mode: ScoreMode,
    pub difference_factor: f64,
    /// Fraction of the best-scoring tours eligible at each choice.
    pub keep_percent: f64,
    /// Smallest worthwhile visit; a stop that cannot receive
    /// `min(min_exams_per_stop, remaining)` examinations gets none.
    pub min_exams_per_stop: u32,
    pub weights: Weights,
    pub seed: u64,
    pub budget: Budget,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        Self {
            strategy: Strategy::FurthestFirst,
            score_mode: ScoreMode::Ratio,
            difference_factor: 60.0,
            keep_percent: 0.20,
            min_exams_per_stop: 2,
            weights: Weights::default(),
            seed: 0,
            budget: Budget::Time(Duration::from_secs(20)),
        }
    }
}

impl HeuristicParams {
    pub fn check(&self) -> Result<()> {
        if !(self.keep_percent > 0.0 && self.keep_percent <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "keep_percent {} outside (0, 1]",
                self.keep_percent
            )));
        }
        if !(self.difference_factor > 0.0 && self.difference_factor.is_finite()) {
            return Err(Error::InvalidParams("difference_factor must be positive".into()));
        }
        let w = self.weights;
        if [w.tours, w.distance, w.distinct]
            .iter()
            .any(|x| !(x.is_finite() && *x >= 0.0))
        {
            return Err(Error::InvalidParams("score weights must be non-negative".into()));
        }
        Ok(())
    }

    /// The tour weight must outweigh the largest possible travel and
    /// distinct-tour terms of any planning, which has at most one tour per
    /// examination.
    fn check_dominance(&self, instance: &Instance) -> Result<()> {
        let max_tours = instance.total_demand() as f64;
        let w = self.weights;
        let bound = (w.distance * instance.params().max_day as f64 + w.distinct) * max_tours;
        if max_tours > 0.0 && w.tours <= bound {
            return Err(Error::InvalidParams(format!(
                "tour weight {} does not dominate the other score terms (needs > {bound})",
                w.tours
            )));
        }
        Ok(())
    }
}

/// Checks that every township with demand can be served by a dedicated
/// single-stop tour with one examination.
pub fn check_feasibility(instance: &Instance) -> Result<()> {
    let p = instance.params();
    let bad: Vec<usize> = instance
        .served()
        .into_iter()
        .filter(|&i| instance.dist(0, i) + instance.dist(i, 0) + p.exam_duration > p.max_day)
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::InfeasibleInstance(bad))
    }
}

fn stop_order<R: Rng + ?Sized>(
    tour: &BasicTour,
    remaining: &[u32],
    instance: &Instance,
    strategy: Strategy,
    rng: &mut R,
) -> Vec<usize> {
    let stops = tour.stops();
    let mut order: Vec<usize> = (0..stops.len()).collect();
    let from_depot = |k: usize| instance.dist(0, stops[k]);
    match strategy {
        Strategy::FurthestFirst => order.sort_by_key(|&k| std::cmp::Reverse(from_depot(k))),
        Strategy::ClosestFirst => order.sort_by_key(|&k| from_depot(k)),
        Strategy::MostRelevantFirst => order.sort_by_key(|&k| {
            std::cmp::Reverse((remaining[stops[k]], from_depot(k)))
        }),
        Strategy::Random => order.shuffle(rng),
    }
    order
}

/// Examinations to perform at each stop of `tour` given the remaining
/// demand. Stops are taken in strategy order and each is filled as far as
/// the day allows before moving on. `rng` is only used by
/// [`Strategy::Random`].
pub fn compute_examinations<R: Rng + ?Sized>(
    tour: &BasicTour,
    remaining: &[u32],
    instance: &Instance,
    hp: &HeuristicParams,
    rng: &mut R,
) -> Vec<u32> {
    let p = instance.params();
    let stops = tour.stops();
    let mut exams = vec![0u32; stops.len()];
    let travel = instance.route_travel(stops);
    let mut slots = p.max_day.saturating_sub(travel) / p.exam_duration;
    for k in stop_order(tour, remaining, instance, hp.strategy, rng) {
        if slots == 0 {
            break;
        }
        let want = remaining[stops[k]];
        if want == 0 {
            continue;
        }
        let can = Minutes::from(want).min(slots);
        if can < Minutes::from(hp.min_exams_per_stop.min(want)) {
            continue;
        }
        exams[k] = can as u32;
        slots -= can;
    }
    exams
}

fn score_of(total_exams: u64, travel: Minutes, hp: &HeuristicParams) -> f64 {
    if total_exams == 0 {
        return 0.0;
    }
    match hp.score_mode {
        ScoreMode::Ratio => total_exams as f64 / travel.max(1) as f64,
        ScoreMode::Difference => {
            (hp.difference_factor * total_exams as f64 - travel as f64).max(0.0)
        }
    }
}

/// Desirability of following `tour` next; zero for a tour that cannot
/// perform any remaining examination.
pub fn tour_score<R: Rng + ?Sized>(
    tour: &BasicTour,
    remaining: &[u32],
    instance: &Instance,
    hp: &HeuristicParams,
    rng: &mut R,
) -> f64 {
    let exams = compute_examinations(tour, remaining, instance, hp, rng);
    let e = exams.iter().map(|&x| u64::from(x)).sum();
    score_of(e, instance.route_travel(tour.stops()), hp)
}

struct Candidate {
    index: usize,
    exams: Vec<u32>,
    score: f64,
}

fn eligible<R: Rng + ?Sized>(
    pool: &[BasicTour],
    remaining: &[u32],
    instance: &Instance,
    hp: &HeuristicParams,
    rng: &mut R,
) -> Vec<Candidate> {
    let mut scored: Vec<Candidate> = pool
        .iter()
        .enumerate()
        .map(|(index, tour)| {
            let exams = compute_examinations(tour, remaining, instance, hp, rng);
            let e = exams.iter().map(|&x| u64::from(x)).sum();
            let score = score_of(e, instance.route_travel(tour.stops()), hp);
            Candidate {
                index,
                exams,
                score,
            }
        })
        .collect();
    scored.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
    let keep = ((hp.keep_percent * pool.len() as f64).ceil() as usize).max(1);
    scored.truncate(keep);
    scored.retain(|c| c.score > 0.0);
    scored
}

fn choose_candidate<R: Rng + ?Sized>(
    pool: &[BasicTour],
    remaining: &[u32],
    instance: &Instance,
    hp: &HeuristicParams,
    rng: &mut R,
) -> Result<Candidate> {
    let mut top = eligible(pool, remaining, instance, hp, rng);
    if top.is_empty() {
        return Err(Error::NoProductiveTour);
    }
    let pick = WeightedIndex::new(top.iter().map(|c| c.score))
        .map_err(|e| Error::ContractViolation(format!("tour scores: {e}")))?
        .sample(rng);
    Ok(top.swap_remove(pick))
}

/// Samples a tour among the top `keep_percent` of the pool by score, with
/// probability proportional to score.
pub fn choose_tour<'p, R: Rng + ?Sized>(
    pool: &'p [BasicTour],
    remaining: &[u32],
    instance: &Instance,
    hp: &HeuristicParams,
    rng: &mut R,
) -> Result<&'p BasicTour> {
    let c = choose_candidate(pool, remaining, instance, hp, rng)?;
    Ok(&pool[c.index])
}

/// Builds one complete planning from the pool.
pub fn generate_planning<R: Rng + ?Sized>(
    pool: &[BasicTour],
    instance: &Instance,
    hp: &HeuristicParams,
    rng: &mut R,
) -> Result<Schedule> {
    let mut remaining = instance.demand().to_vec();
    let mut left = instance.total_demand();
    let mut tours = Vec::new();
    while left > 0 {
        let c = choose_candidate(pool, &remaining, instance, hp, rng)?;
        let tour = &pool[c.index];
        for (&stop, &e) in tour.stops().iter().zip(&c.exams) {
            remaining[stop] -= e;
            left -= u64::from(e);
        }
        tours.push(PlannedTour {
            tour: tour.clone(),
            exams: c.exams,
        });
    }
    Ok(Schedule::from_tours(tours, instance.params()))
}

/// Weighted sum of tour count, total travel and number of distinct routes.
pub fn schedule_score(s: &Schedule, instance: &Instance, hp: &HeuristicParams) -> f64 {
    let travel: Minutes = s
        .tours
        .iter()
        .map(|t| instance.route_travel(t.stops()))
        .sum();
    let distinct: HashSet<&[usize]> = s.tours.iter().map(|t| t.stops()).collect();
    let w = hp.weights;
    w.tours * s.len() as f64 + w.distance * travel as f64 + w.distinct * distinct.len() as f64
}

/// Outcome of a restart run.
#[derive(Clone, Debug)]
pub struct HeuristicRun {
    pub best: Schedule,
    pub best_score: f64,
    /// Score of every planning generated, by restart index.
    pub scores: Vec<f64>,
    pub pool_size: usize,
}

struct Attempt {
    restart: usize,
    schedule: Schedule,
    score: f64,
    key: (usize, Minutes),
}

fn better(a: &Attempt, b: &Attempt) -> bool {
    a.score
        .total_cmp(&b.score)
        .then(a.key.cmp(&b.key))
        .then(a.restart.cmp(&b.restart))
        == Ordering::Less
}

/// Builds the pool once, then restarts planning generation until the budget
/// runs out and returns the best planning found.
pub fn run_heuristic(instance: &Instance, hp: &HeuristicParams, sa: &SAParams) -> Result<Schedule> {
    run_heuristic_detailed(instance, hp, sa).map(|r| r.best)
}

pub fn run_heuristic_detailed(
    instance: &Instance,
    hp: &HeuristicParams,
    sa: &SAParams,
) -> Result<HeuristicRun> {
    hp.check()?;
    check_feasibility(instance)?;
    hp.check_dominance(instance)?;
    let pool = build_pool(instance, sa)?;

    let attempt = |restart: usize| -> Result<Attempt> {
        let mut rng = stream(hp.seed, &[restart as u64]);
        let schedule = generate_planning(&pool, instance, hp, &mut rng)?;
        let score = schedule_score(&schedule, instance, hp);
        let key = schedule_key(&schedule, instance)?;
        Ok(Attempt {
            restart,
            schedule,
            score,
            key,
        })
    };

    let mut scores = Vec::new();
    let mut best: Option<Attempt> = None;
    let mut absorb = |batch: Vec<Attempt>, scores: &mut Vec<f64>| {
        for a in batch {
            scores.push(a.score);
            if best.as_ref().is_none_or(|b| better(&a, b)) {
                best = Some(a);
            }
        }
    };

    match hp.budget {
        Budget::Restarts(n) => {
            let batch = (0..n.max(1))
                .into_par_iter()
                .map(attempt)
                .collect::<Result<Vec<_>>>()?;
            absorb(batch, &mut scores);
        }
        Budget::Time(limit) => {
            let started = Instant::now();
            let width = rayon::current_num_threads().max(1);
            let mut next = 0;
            loop {
                let batch = (next..next + width)
                    .into_par_iter()
                    .map(attempt)
                    .collect::<Result<Vec<_>>>()?;
                next += width;
                absorb(batch, &mut scores);
                if started.elapsed() >= limit {
                    break;
                }
            }
        }
    }

    let best = best.expect("at least one planning is generated");
    Ok(HeuristicRun {
        best: best.schedule,
        best_score: best.score,
        scores,
        pool_size: pool.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{duration, Params};
    use crate::rng::SolverRng;
    use crate::validate::validate_schedule;
    use rand::SeedableRng;

    fn rng() -> SolverRng {
        SolverRng::seed_from_u64(1)
    }

    /// 0->A = 100, A->B = 50, B->0 = 40; A is township 1, B is township 2.
    fn two_stop() -> (Instance, BasicTour) {
        let inst = Instance::from_matrix(
            vec![vec![0, 100, 40], vec![60, 0, 50], vec![40, 50, 0]],
            vec![0, 5, 20],
        )
        .unwrap();
        (inst, BasicTour::new(vec![1, 2]).unwrap())
    }

    fn single(demand: u32, one_way: u64) -> Instance {
        Instance::from_matrix(vec![vec![0, one_way], vec![one_way, 0]], vec![0, demand]).unwrap()
    }

    fn quick_sa() -> SAParams {
        SAParams {
            runs: 2,
            iterations_per_run: 5_000,
            ..SAParams::default()
        }
    }

    #[test]
    fn feasibility_boundary() {
        let at = Instance::from_matrix(vec![vec![0, 300], vec![270, 0]], vec![0, 1]).unwrap();
        assert!(check_feasibility(&at).is_ok());
        let over = Instance::from_matrix(vec![vec![0, 301], vec![270, 0]], vec![0, 1]).unwrap();
        match check_feasibility(&over) {
            Err(Error::InfeasibleInstance(v)) => assert_eq!(v, vec![1]),
            other => panic!("{other:?}"),
        }
        let idle = Instance::from_matrix(vec![vec![0, 900], vec![900, 0]], vec![0, 0]).unwrap();
        assert!(check_feasibility(&idle).is_ok());
    }

    #[test]
    fn furthest_first_fill() {
        let (inst, tour) = two_stop();
        let hp = HeuristicParams::default();
        let exams = compute_examinations(&tour, &[0, 5, 20], &inst, &hp, &mut rng());
        assert_eq!(exams, vec![5, 8]);
        let pt = PlannedTour::new(tour, exams).unwrap();
        assert_eq!(duration(&pt, &inst).unwrap(), 580);
    }

    #[test]
    fn closest_first_fill() {
        let (inst, tour) = two_stop();
        let hp = HeuristicParams {
            strategy: Strategy::ClosestFirst,
            ..HeuristicParams::default()
        };
        let exams = compute_examinations(&tour, &[0, 5, 20], &inst, &hp, &mut rng());
        assert_eq!(exams, vec![0, 13]);
    }

    #[test]
    fn most_relevant_first_fill() {
        let (inst, tour) = two_stop();
        let hp = HeuristicParams {
            strategy: Strategy::MostRelevantFirst,
            ..HeuristicParams::default()
        };
        let exams = compute_examinations(&tour, &[0, 3, 12], &inst, &hp, &mut rng());
        assert_eq!(exams, vec![0, 12]);
    }

    #[test]
    fn nothing_remaining() {
        let (inst, tour) = two_stop();
        let hp = HeuristicParams::default();
        assert_eq!(compute_examinations(&tour, &[0, 0, 0], &inst, &hp, &mut rng()), vec![0, 0]);
        assert_eq!(tour_score(&tour, &[0, 0, 0], &inst, &hp, &mut rng()), 0.0);
    }

    #[test]
    fn single_exam_limit() {
        let (inst, tour) = two_stop();
        let hp = HeuristicParams::default();
        // One remaining examination is still scheduled.
        assert_eq!(compute_examinations(&tour, &[0, 1, 20], &inst, &hp, &mut rng()), vec![1, 12]);
        // Only one slot left for B after A takes 12: B gets nothing.
        assert_eq!(compute_examinations(&tour, &[0, 12, 20], &inst, &hp, &mut rng()), vec![12, 0]);
        let lenient = HeuristicParams {
            min_exams_per_stop: 1,
            ..HeuristicParams::default()
        };
        assert_eq!(
            compute_examinations(&tour, &[0, 12, 20], &inst, &lenient, &mut rng()),
            vec![12, 1]
        );
    }

    #[test]
    fn scores() {
        let (inst, tour) = two_stop();
        let hp = HeuristicParams::default();
        let ratio = tour_score(&tour, &[0, 5, 20], &inst, &hp, &mut rng());
        assert!((ratio - 13.0 / 190.0).abs() < 1e-12);
        assert!((ratio - 0.06842).abs() < 1e-5);
        let diff = HeuristicParams {
            score_mode: ScoreMode::Difference,
            ..HeuristicParams::default()
        };
        assert_eq!(tour_score(&tour, &[0, 5, 20], &inst, &diff, &mut rng()), 590.0);
        assert_eq!(tour_score(&tour, &[0, 0, 0], &inst, &diff, &mut rng()), 0.0);
    }

    #[test]
    fn lone_productive_tour_is_always_chosen() {
        let inst = single(3, 60);
        let pool = vec![BasicTour::new(vec![1]).unwrap()];
        let hp = HeuristicParams::default();
        let mut r = rng();
        for _ in 0..100 {
            assert_eq!(choose_tour(&pool, &[0, 3], &inst, &hp, &mut r).unwrap(), &pool[0]);
        }
        assert!(matches!(
            choose_tour(&pool, &[0, 0], &inst, &hp, &mut r),
            Err(Error::NoProductiveTour)
        ));
    }

    /// Four single-stop tours whose ratio scores are strictly decreasing.
    fn four_tours() -> (Instance, Vec<BasicTour>) {
        let d = [0, 30, 40, 50, 60];
        let dist = (0..5)
            .map(|i| (0..5).map(|j| if i == j { 0 } else { d[i].max(d[j]) }).collect())
            .collect();
        let inst = Instance::from_matrix(dist, vec![0, 2, 2, 2, 2]).unwrap();
        let pool = (1..=4).map(|i| BasicTour::new(vec![i]).unwrap()).collect();
        (inst, pool)
    }

    #[test]
    fn truncation_keeps_only_the_top() {
        let (inst, pool) = four_tours();
        let hp = HeuristicParams {
            keep_percent: 0.5,
            ..HeuristicParams::default()
        };
        let mut r = rng();
        let mut seen = HashSet::new();
        for _ in 0..2_000 {
            seen.insert(choose_tour(&pool, &[0, 2, 2, 2, 2], &inst, &hp, &mut r).unwrap().clone());
        }
        let expected: HashSet<BasicTour> = pool[..2].iter().cloned().collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn one_tour_suffices() {
        let inst = single(2, 60);
        let pool = build_pool(&inst, &quick_sa()).unwrap();
        let s = generate_planning(&pool, &inst, &HeuristicParams::default(), &mut rng()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.tours[0].exams, vec![2]);
    }

    #[test]
    fn capacity_sixteen_per_tour() {
        let inst = single(20, 60);
        let capacity = (600 - 120) / 30;
        assert_eq!(capacity, 16);
        let pool = build_pool(&inst, &quick_sa()).unwrap();
        let s = generate_planning(&pool, &inst, &HeuristicParams::default(), &mut rng()).unwrap();
        assert_eq!(s.len(), 20usize.div_ceil(capacity));
        assert_eq!(s.tours[0].exams, vec![16]);
        assert_eq!(s.tours[1].exams, vec![4]);
        assert!(validate_schedule(&s, &inst).is_empty());
    }

    #[test]
    fn schedule_scores() {
        let inst = Instance::from_matrix(
            vec![vec![0, 50, 100], vec![50, 0, 100], vec![100, 100, 0]],
            vec![0, 2, 2],
        )
        .unwrap();
        let hp = HeuristicParams::default();
        let t1 = PlannedTour::new(BasicTour::new(vec![1]).unwrap(), vec![2]).unwrap();
        let t2 = PlannedTour::new(BasicTour::new(vec![2]).unwrap(), vec![2]).unwrap();
        let p = Params::default();
        let s = Schedule::from_tours(vec![t1.clone(), t2], &p);
        assert_eq!(schedule_score(&s, &inst, &hp), 2_000_500.0);
        let inst = Instance::from_matrix(vec![vec![0, 75], vec![75, 0]], vec![0, 2]).unwrap();
        let half = PlannedTour::new(BasicTour::new(vec![1]).unwrap(), vec![1]).unwrap();
        let s = Schedule::from_tours(vec![half.clone(), half], &p);
        assert_eq!(schedule_score(&s, &inst, &hp), 2_000_400.0);
        assert_eq!(schedule_score(&Schedule::default(), &inst, &hp), 0.0);
    }

    #[test]
    fn tiny_budget_still_plans() {
        let inst = single(5, 100);
        let hp = HeuristicParams {
            budget: Budget::Time(Duration::ZERO),
            ..HeuristicParams::default()
        };
        let run = run_heuristic_detailed(&inst, &hp, &quick_sa()).unwrap();
        assert!(!run.scores.is_empty());
        assert!(validate_schedule(&run.best, &inst).is_empty());
    }

    #[test]
    fn weak_tour_weight_is_rejected() {
        let inst = single(5, 100);
        let hp = HeuristicParams {
            weights: Weights {
                tours: 10.0,
                ..Weights::default()
            },
            ..HeuristicParams::default()
        };
        assert!(matches!(
            run_heuristic(&inst, &hp, &quick_sa()),
            Err(Error::InvalidParams(_))
        ));
    }
}
