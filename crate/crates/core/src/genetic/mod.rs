//! Evolutionary search over orderings of individual examinations.
//!
//! Each township's monthly demand is expanded into that many examination
//! ids. A chromosome is a permutation of all ids; [`greedy_split`] decodes
//! it into tours. The search is a mu+lambda scheme with tournament parent
//! selection, three crossovers (OX, PMX, UPMX) and three mutations (swap,
//! segment reversal, segment shuffle).

pub mod operators;
mod split;

use std::time::{Duration, Instant};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristic::check_feasibility;
use crate::model::{Instance, Minutes, Schedule};
use crate::rng::stream;

pub use operators::{
    is_permutation, ordered_crossover, pmx_crossover, reverse_segment, shuffle_segment,
    swap_positions, upmx_crossover,
};
pub use split::greedy_split;

/// Maps examination ids to townships. Township `i` owns `demand[i]`
/// consecutive ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExamIndex {
    exam_to_township: Vec<usize>,
}

impl ExamIndex {
    pub fn len(&self) -> usize {
        self.exam_to_township.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exam_to_township.is_empty()
    }

    pub fn township(&self, exam: usize) -> usize {
        self.exam_to_township[exam]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.exam_to_township
    }
}

pub fn build_exam_index(instance: &Instance) -> ExamIndex {
    let exam_to_township = instance
        .demand()
        .iter()
        .enumerate()
        .flat_map(|(t, &d)| std::iter::repeat_n(t, d as usize))
        .collect();
    ExamIndex { exam_to_township }
}

/// A permutation of examination ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chromosome {
    perm: Vec<usize>,
}

impl Chromosome {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        if !is_permutation(&perm) {
            return Err(Error::ContractViolation(
                "chromosome must hold every examination id exactly once".into(),
            ));
        }
        Ok(Self { perm })
    }

    pub fn identity(len: usize) -> Self {
        Self {
            perm: (0..len).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut c = Self::identity(len);
        c.perm.shuffle(rng);
        c
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MutationKind {
    Swap,
    ReverseSegment,
    ShuffleSegment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossoverKind {
    Ordered,
    PartiallyMatched,
    UniformPartiallyMatched,
}

impl MutationKind {
    pub const ALL: [Self; 3] = [Self::Swap, Self::ReverseSegment, Self::ShuffleSegment];
}

impl CrossoverKind {
    pub const ALL: [Self; 3] = [
        Self::Ordered,
        Self::PartiallyMatched,
        Self::UniformPartiallyMatched,
    ];
}

/// When [`run_ga`] stops.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GaBudget {
    Time(Duration),
    /// Fixed generation count; fully reproducible.
    Generations(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GAParams {
    /// Population size.
    pub mu: usize,
    /// Offspring per generation.
    pub lambda: usize,
    pub cx_prob: f64,
    pub mut_prob: f64,
    /// Probabilities of [`MutationKind::ALL`], in order.
    pub mutation_weights: [f64; 3],
    /// Probabilities of [`CrossoverKind::ALL`], in order.
    pub crossover_weights: [f64; 3],
    /// Per-position selection probability of UPMX.
    pub upmx_prob: f64,
    pub tournament_size: usize,
    /// Cost of one tour in the fitness; `None` picks a value large enough
    /// that fewer tours always wins.
    pub tour_factor: Option<f64>,
    pub seed: u64,
    pub budget: GaBudget,
}

impl Default for GAParams {
    fn default() -> Self {
        Self {
            mu: 150,
            lambda: 300,
            cx_prob: 0.6,
            mut_prob: 0.2,
            mutation_weights: [1.0 / 3.0; 3],
            crossover_weights: [1.0 / 3.0; 3],
            upmx_prob: 1.0 / 3.0,
            tournament_size: 3,
            tour_factor: None,
            seed: 0,
            budget: GaBudget::Time(Duration::from_secs(60)),
        }
    }
}

impl GAParams {
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.into()));
        if self.mu < 1 || self.lambda < 1 || self.tournament_size < 1 {
            return bad("mu, lambda and tournament size must be at least 1");
        }
        for p in [self.cx_prob, self.mut_prob, self.upmx_prob] {
            if !(0.0..=1.0).contains(&p) {
                return bad("probabilities must lie in [0, 1]");
            }
        }
        for w in [&self.mutation_weights, &self.crossover_weights] {
            if w.iter().any(|x| x.is_nan() || *x < 0.0) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return bad("operator weights must be non-negative and sum to 1");
            }
        }
        if let Some(f) = self.tour_factor {
            if !(f > 0.0 && f.is_finite()) {
                return bad("tour factor must be positive");
            }
        }
        Ok(())
    }

    /// The configured tour factor, or one more than the largest total
    /// travel any split can reach.
    pub fn tour_factor_for(&self, instance: &Instance, idx: &ExamIndex) -> f64 {
        self.tour_factor
            .unwrap_or((instance.params().max_day * idx.len() as Minutes + 1) as f64)
    }
}

/// Applies one mutation drawn from `ga.mutation_weights`.
pub fn mutate<R: Rng + ?Sized>(c: &Chromosome, ga: &GAParams, rng: &mut R) -> Chromosome {
    let kind = MutationKind::ALL[pick(&ga.mutation_weights, rng)];
    mutate_with(c, kind, rng)
}

pub fn mutate_with<R: Rng + ?Sized>(c: &Chromosome, kind: MutationKind, rng: &mut R) -> Chromosome {
    let mut perm = c.perm.clone();
    if perm.len() >= 2 {
        let (i, j) = operators::random_pair(perm.len(), rng);
        match kind {
            MutationKind::Swap => swap_positions(&mut perm, i, j),
            MutationKind::ReverseSegment => reverse_segment(&mut perm, i, j),
            MutationKind::ShuffleSegment => shuffle_segment(&mut perm, i, j, rng),
        }
    }
    Chromosome { perm }
}

/// Applies one crossover drawn from `ga.crossover_weights`.
pub fn crossover<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    ga: &GAParams,
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    let kind = CrossoverKind::ALL[pick(&ga.crossover_weights, rng)];
    crossover_with(a, b, kind, ga.upmx_prob, rng)
}

pub fn crossover_with<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    kind: CrossoverKind,
    upmx_prob: f64,
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    assert_eq!(a.len(), b.len(), "parents must have equal length");
    let n = a.len();
    if n < 2 {
        return (a.clone(), b.clone());
    }
    let (x, y) = match kind {
        CrossoverKind::Ordered => {
            let (lo, hi) = operators::random_pair(n, rng);
            ordered_crossover(&a.perm, &b.perm, lo, hi)
        }
        CrossoverKind::PartiallyMatched => {
            let (lo, hi) = operators::random_pair(n + 1, rng);
            pmx_crossover(&a.perm, &b.perm, lo, hi)
        }
        CrossoverKind::UniformPartiallyMatched => upmx_crossover(&a.perm, &b.perm, upmx_prob, rng),
    };
    (Chromosome { perm: x }, Chromosome { perm: y })
}

fn pick<R: Rng + ?Sized>(weights: &[f64; 3], rng: &mut R) -> usize {
    WeightedIndex::new(weights)
        .expect("operator weights are validated")
        .sample(rng)
}

/// Tour factor times the number of tours, plus total travel. Lower is
/// better.
pub fn fitness(c: &Chromosome, idx: &ExamIndex, instance: &Instance, ga: &GAParams) -> Result<f64> {
    let tours = greedy_split(c, idx, instance)?;
    let travel: Minutes = tours.iter().map(|t| instance.route_travel(t.stops())).sum();
    Ok(ga.tour_factor_for(instance, idx) * tours.len() as f64 + travel as f64)
}

/// Outcome of an evolutionary run.
#[derive(Clone, Debug)]
pub struct GaRun {
    pub best: Schedule,
    pub best_fitness: f64,
    /// Best fitness in the population, initial population first.
    pub history: Vec<f64>,
    pub generations: usize,
}

struct Individual {
    chromosome: Chromosome,
    fitness: f64,
}

fn tournament<'p, R: Rng + ?Sized>(
    population: &'p [Individual],
    size: usize,
    rng: &mut R,
) -> &'p Chromosome {
    let best = (0..size)
        .map(|_| rng.random_range(0..population.len()))
        .min_by(|&a, &b| population[a].fitness.total_cmp(&population[b].fitness).then(a.cmp(&b)))
        .expect("tournament size is at least 1");
    &population[best].chromosome
}

pub fn run_ga(instance: &Instance, ga: &GAParams) -> Result<Schedule> {
    run_ga_detailed(instance, ga).map(|r| r.best)
}

pub fn run_ga_detailed(instance: &Instance, ga: &GAParams) -> Result<GaRun> {
    ga.check()?;
    check_feasibility(instance)?;
    let idx = build_exam_index(instance);
    let started = Instant::now();
    let evaluate = |chromosome: Chromosome| -> Result<Individual> {
        let fitness = fitness(&chromosome, &idx, instance, ga)?;
        Ok(Individual {
            chromosome,
            fitness,
        })
    };

    let mut population = (0..ga.mu as u64)
        .into_par_iter()
        .map(|i| evaluate(Chromosome::random(idx.len(), &mut stream(ga.seed, &[0, i]))))
        .collect::<Result<Vec<_>>>()?;
    population.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
    let mut history = vec![population[0].fitness];

    let mut generation = 0usize;
    loop {
        let done = match ga.budget {
            GaBudget::Generations(g) => generation >= g,
            GaBudget::Time(limit) => started.elapsed() >= limit,
        };
        if done {
            break;
        }
        generation += 1;
        let parents = &population;
        let offspring = (0..ga.lambda as u64)
            .into_par_iter()
            .map(|o| {
                let mut rng = stream(ga.seed, &[generation as u64, o]);
                let mut child = if rng.random::<f64>() < ga.cx_prob {
                    let a = tournament(parents, ga.tournament_size, &mut rng);
                    let b = tournament(parents, ga.tournament_size, &mut rng);
                    crossover(a, b, ga, &mut rng).0
                } else {
                    tournament(parents, ga.tournament_size, &mut rng).clone()
                };
                if rng.random::<f64>() < ga.mut_prob {
                    child = mutate(&child, ga, &mut rng);
                }
                evaluate(child)
            })
            .collect::<Result<Vec<_>>>()?;
        population.extend(offspring);
        population.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
        population.truncate(ga.mu);
        history.push(population[0].fitness);
    }

    let best = &population[0];
    let tours = greedy_split(&best.chromosome, &idx, instance)?;
    Ok(GaRun {
        best: Schedule::from_tours(tours, instance.params()),
        best_fitness: best.fitness,
        history,
        generations: generation,
    })
}
