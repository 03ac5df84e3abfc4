//! GeoJSON (RFC 7946) view of tours: one `LineString` per distinct route,
//! depot to depot, and one `Point` per location.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{BasicTour, Instance, Schedule};

/// What to draw.
#[derive(Clone, Copy, Debug)]
pub enum Routes<'a> {
    /// Distinct routes of a schedule, with examinations summed over every
    /// day the route is driven.
    Schedule(&'a Schedule),
    /// A tour pool, one feature per tour.
    Pool(&'a [BasicTour]),
}

pub(crate) struct DistinctRoute<'a> {
    pub stops: &'a [usize],
    pub exams: Vec<u64>,
    pub schedule_tours: Vec<usize>,
}

/// Distinct stop sequences in order of first appearance.
pub(crate) fn distinct_routes(s: &Schedule) -> Vec<DistinctRoute<'_>> {
    let mut out: Vec<DistinctRoute<'_>> = Vec::new();
    for (k, pt) in s.tours.iter().enumerate() {
        let slot = match out.iter().position(|r| r.stops == pt.stops()) {
            Some(i) => i,
            None => {
                out.push(DistinctRoute {
                    stops: pt.stops(),
                    exams: vec![0; pt.stops().len()],
                    schedule_tours: Vec::new(),
                });
                out.len() - 1
            }
        };
        let route = &mut out[slot];
        for (acc, &e) in route.exams.iter_mut().zip(&pt.exams) {
            *acc += u64::from(e);
        }
        route.schedule_tours.push(k + 1);
    }
    out
}

fn position(coords: &[(f64, f64)], i: usize) -> Value {
    let (lat, lon) = coords[i];
    json!([lon, lat])
}

fn line(instance: &Instance, coords: &[(f64, f64)], stops: &[usize], mut props: Value) -> Value {
    let path: Vec<Value> = std::iter::once(0)
        .chain(stops.iter().copied())
        .chain(std::iter::once(0))
        .map(|i| position(coords, i))
        .collect();
    props["drive_minutes"] = json!(instance.route_travel(stops));
    props["stops"] = json!(stops.iter().map(|&s| instance.name(s)).collect::<Vec<_>>());
    json!({
        "type": "Feature",
        "geometry": {"type": "LineString", "coordinates": path},
        "properties": props,
    })
}

pub fn export_geojson(routes: Routes<'_>, instance: &Instance) -> Result<Value> {
    let coords = instance.coords().ok_or(Error::MissingCoordinates)?;
    for stop in match routes {
        Routes::Schedule(s) => s.tours.iter().flat_map(|t| t.stops()).collect::<Vec<_>>(),
        Routes::Pool(p) => p.iter().flat_map(|t| t.stops()).collect(),
    } {
        if !instance.is_township(*stop) {
            return Err(Error::InvalidInstance(format!("stop {stop} is not a township")));
        }
    }

    let mut features: Vec<Value> = match routes {
        Routes::Schedule(s) => distinct_routes(s)
            .into_iter()
            .enumerate()
            .map(|(k, r)| {
                let props = json!({
                    "tour_id": k + 1,
                    "exams_by_stop": r.exams,
                    "schedule_tours": r.schedule_tours,
                });
                line(instance, coords, r.stops, props)
            })
            .collect(),
        Routes::Pool(pool) => pool
            .iter()
            .enumerate()
            .map(|(k, t)| line(instance, coords, t.stops(), json!({"tour_id": k + 1})))
            .collect(),
    };
    features.extend((0..=instance.n()).map(|i| {
        json!({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": position(coords, i)},
            "properties": {
                "index": i,
                "name": instance.name(i),
                "demand": instance.demand()[i],
                "kind": if i == 0 { "depot" } else { "township" },
            },
        })
    }));
    Ok(json!({"type": "FeatureCollection", "features": features}))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Params, PlannedTour};

    fn inst() -> Instance {
        Instance::new(
            vec!["C".into(), "A".into()],
            vec![vec![0, 60], vec![60, 0]],
            vec![0, 2],
            Some(vec![(47.1, 27.6), (47.3, 27.9)]),
            Params::default(),
        )
        .unwrap()
    }

    fn one_tour() -> Schedule {
        Schedule::from_tours(
            vec![PlannedTour::new(BasicTour::new(vec![1]).unwrap(), vec![2]).unwrap()],
            &Params::default(),
        )
    }

    #[test]
    fn needs_coordinates() {
        let bare = Instance::from_matrix(vec![vec![0, 60], vec![60, 0]], vec![0, 2]).unwrap();
        assert!(matches!(
            export_geojson(Routes::Schedule(&one_tour()), &bare),
            Err(Error::MissingCoordinates)
        ));
    }

    #[test]
    fn single_tour_structure() {
        let v = export_geojson(Routes::Schedule(&one_tour()), &inst()).unwrap();
        let f = v["features"].as_array().unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f[0]["geometry"]["type"], "LineString");
        assert_eq!(
            f[0]["geometry"]["coordinates"],
            json!([[27.6, 47.1], [27.9, 47.3], [27.6, 47.1]])
        );
        assert_eq!(f[0]["properties"]["drive_minutes"], 120);
        assert_eq!(f[0]["properties"]["exams_by_stop"], json!([2]));
        assert_eq!(f[1]["geometry"]["type"], "Point");
        assert_eq!(f[2]["properties"]["demand"], 2);
    }

    #[test]
    fn repeated_routes_are_merged() {
        let pt = PlannedTour::new(BasicTour::new(vec![1]).unwrap(), vec![1]).unwrap();
        let s = Schedule::from_tours(vec![pt.clone(), pt], &Params::default());
        let v = export_geojson(Routes::Schedule(&s), &inst()).unwrap();
        let f = v["features"].as_array().unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f[0]["properties"]["exams_by_stop"], json!([2]));
        assert_eq!(f[0]["properties"]["schedule_tours"], json!([1, 2]));
    }

    #[test]
    fn pool_export() {
        let pool = vec![BasicTour::new(vec![1]).unwrap()];
        let v = export_geojson(Routes::Pool(&pool), &inst()).unwrap();
        assert_eq!(v["features"].as_array().unwrap().len(), 3);
        assert_eq!(v["features"][0]["properties"]["tour_id"], 1);
    }
}
