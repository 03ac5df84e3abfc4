use proptest::prelude::*;
use vanplan::genetic::{run_ga, GAParams, GaBudget};
use vanplan::heuristic::{run_heuristic, Budget, HeuristicParams, Strategy as Order};
use vanplan::io::{export_geojson, generate_instance, GenSpec, Routes};
use vanplan::tourpool::{build_pool, SAParams};
use vanplan::{validate_schedule, Instance, Minutes, Params, Schedule, ViolationKind};

fn small_instance(dist: Vec<Vec<Minutes>>, demand: Vec<u32>) -> Instance {
    Instance::from_matrix(dist, demand).unwrap()
}

/// Random directed matrix closed under shortest paths, every round trip
/// short enough to carry at least one examination.
fn instance_strategy() -> impl Strategy<Value = Instance> {
    (1usize..8).prop_flat_map(|n| {
        let size = n + 1;
        (
            prop::collection::vec(prop::collection::vec(5u64..250, size), size),
            prop::collection::vec(0u32..12, n),
        )
            .prop_map(move |(mut dist, demand)| {
                for (i, row) in dist.iter_mut().enumerate() {
                    row[i] = 0;
                }
                for k in 0..size {
                    for i in 0..size {
                        for j in 0..size {
                            dist[i][j] = dist[i][j].min(dist[i][k] + dist[k][j]);
                        }
                    }
                }
                let demand = std::iter::once(0).chain(demand).collect();
                small_instance(dist, demand)
            })
    })
}

fn quick_heuristic(seed: u64, strategy: Order) -> (HeuristicParams, SAParams) {
    (
        HeuristicParams {
            strategy,
            seed,
            budget: Budget::Restarts(3),
            ..HeuristicParams::default()
        },
        SAParams {
            runs: 2,
            iterations_per_run: 3000,
            seed,
            ..SAParams::default()
        },
    )
}

fn quick_ga(seed: u64) -> GAParams {
    GAParams {
        mu: 12,
        lambda: 24,
        seed,
        budget: GaBudget::Generations(8),
        ..GAParams::default()
    }
}

/// No tour carries more examinations than the cheapest round trip leaves
/// room for.
fn tour_lower_bound(instance: &Instance) -> usize {
    let p = instance.params();
    let served = instance.served();
    if served.is_empty() {
        return 0;
    }
    let cheapest = served
        .iter()
        .map(|&u| instance.dist(0, u) + instance.dist(u, 0))
        .min()
        .unwrap();
    let per_tour = (p.max_day - cheapest) / p.exam_duration;
    instance.total_demand().div_ceil(per_tour) as usize
}

fn assert_sound(s: &Schedule, instance: &Instance) {
    let v = validate_schedule(s, instance);
    assert!(v.is_empty(), "{v:?}");
    assert!(s.len() >= tour_lower_bound(instance));
    let exams: u64 = s.tours.iter().map(|t| t.total_exams()).sum();
    assert_eq!(exams, instance.total_demand());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn both_solvers_produce_valid_schedules(instance in instance_strategy(), seed in 0u64..1000) {
        for strategy in [Order::FurthestFirst, Order::ClosestFirst, Order::MostRelevantFirst, Order::Random] {
            let (hp, sa) = quick_heuristic(seed, strategy);
            assert_sound(&run_heuristic(&instance, &hp, &sa).unwrap(), &instance);
        }
        assert_sound(&run_ga(&instance, &quick_ga(seed)).unwrap(), &instance);
    }

    #[test]
    fn every_pool_tour_fits_and_covers(instance in instance_strategy(), seed in 0u64..1000) {
        let (_, sa) = quick_heuristic(seed, Order::FurthestFirst);
        let pool = build_pool(&instance, &sa).unwrap();
        prop_assert!(pool.iter().all(|t| t.fits_day(&instance)));
        for u in instance.served() {
            prop_assert!(pool.iter().any(|t| t.stops() == [u]));
        }
    }
}

#[test]
fn tampering_is_caught() {
    let instance = small_instance(
        vec![vec![0, 40, 60], vec![40, 0, 30], vec![60, 30, 0]],
        vec![0, 9, 14],
    );
    let good = run_ga(&instance, &quick_ga(1)).unwrap();
    assert!(validate_schedule(&good, &instance).is_empty());

    let mut s = good.clone();
    s.tours[0].exams[0] += 1;
    let kinds: Vec<_> = validate_schedule(&s, &instance).into_iter().map(|v| v.kind).collect();
    assert!(kinds.contains(&ViolationKind::CoverageMismatch));

    let mut s = good.clone();
    s.tours[0].exams[0] += 20;
    let kinds: Vec<_> = validate_schedule(&s, &instance).into_iter().map(|v| v.kind).collect();
    assert!(kinds.contains(&ViolationKind::DurationExceeded));

    let mut s = good.clone();
    s.day_of[0] = 22;
    assert!(!validate_schedule(&s, &instance).is_empty());

    if s.len() > 1 {
        let mut s = good.clone();
        s.day_of[1] = s.day_of[0];
        s.van_of[1] = s.van_of[0];
        let kinds: Vec<_> = validate_schedule(&s, &instance).into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::DayClash));
    }
}

#[test]
fn shorter_days_still_solve() {
    let base = generate_instance(&GenSpec {
        n: 15,
        seed: 4,
        ..GenSpec::default()
    })
    .unwrap();
    let short = base
        .clone()
        .with_params(Params {
            max_day: 480,
            ..Params::default()
        })
        .unwrap();
    let (hp, sa) = quick_heuristic(2, Order::FurthestFirst);
    let long_s = run_heuristic(&base, &hp, &sa).unwrap();
    let short_s = run_heuristic(&short, &hp, &sa).unwrap();
    assert_sound(&long_s, &base);
    assert_sound(&short_s, &short);
    assert!(tour_lower_bound(&short) >= tour_lower_bound(&base));
}

#[test]
fn pool_geojson_parses() {
    let instance = generate_instance(&GenSpec {
        n: 12,
        seed: 8,
        ..GenSpec::default()
    })
    .unwrap();
    let (_, sa) = quick_heuristic(0, Order::FurthestFirst);
    let pool = build_pool(&instance, &sa).unwrap();
    let v = export_geojson(Routes::Pool(&pool), &instance).unwrap();
    let parsed: geojson::GeoJson = v.to_string().parse().unwrap();
    let geojson::GeoJson::FeatureCollection(fc) = parsed else {
        panic!("not a feature collection");
    };
    let lines = fc
        .features
        .iter()
        .filter(|f| matches!(f.geometry.as_ref().map(|g| &g.value), Some(geojson::Value::LineString(_))))
        .count();
    assert_eq!(lines, pool.len());
    assert_eq!(fc.features.len() - lines, instance.n() + 1);
}
