//! Travel-time matrices from an HTTP table service.
//!
//! The endpoint is queried OSRM-style: `GET {endpoint}/{lon},{lat};...`
//! answering `{"durations": [[seconds, ...], ...]}`. Durations are rounded
//! up to whole minutes and the diagonal is forced to zero.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::instance_file::InstanceFile;
use crate::error::{Error, Result};
use crate::model::{Minutes, Params};

#[derive(Deserialize)]
struct TableResponse {
    durations: Vec<Vec<Option<f64>>>,
}

/// Locations to query, plus everything an instance file needs besides the
/// matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordsFile {
    pub names: Vec<String>,
    /// `[latitude, longitude]` per location, depot first.
    pub coords: Vec<[f64; 2]>,
    #[serde(default)]
    pub demand: Option<Vec<u32>>,
    #[serde(default)]
    pub yearly_untested_births: Option<Vec<u64>>,
    #[serde(default)]
    pub params: Option<Params>,
}

impl CoordsFile {
    pub fn into_instance_file(self, dist_minutes: Vec<Vec<Minutes>>) -> InstanceFile {
        InstanceFile {
            names: self.names,
            demand: self.demand,
            yearly_untested_births: self.yearly_untested_births,
            dist_minutes,
            coords: Some(self.coords),
            params: self.params,
        }
    }
}

/// Converts a table-service response body into a minute matrix for
/// `expected` locations.
pub fn durations_to_minutes(body: &str, expected: usize) -> Result<Vec<Vec<Minutes>>> {
    let table: TableResponse =
        serde_json::from_str(body).map_err(|e| Error::MalformedResponse(e.to_string()))?;
    if table.durations.len() != expected {
        return Err(Error::MalformedResponse(format!(
            "{} rows for {expected} locations",
            table.durations.len()
        )));
    }
    table
        .durations
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != expected {
                return Err(Error::MalformedResponse(format!(
                    "row {i} has {} entries for {expected} locations",
                    row.len()
                )));
            }
            row.into_iter()
                .enumerate()
                .map(|(j, secs)| match secs {
                    _ if i == j => Ok(0),
                    Some(s) if s >= 0.0 && s.is_finite() => Ok((s / 60.0).ceil() as Minutes),
                    Some(s) => Err(Error::MalformedResponse(format!(
                        "duration {s} from {i} to {j}"
                    ))),
                    None => Err(Error::MalformedResponse(format!("no route from {i} to {j}"))),
                })
                .collect()
        })
        .collect()
}

/// Queries `endpoint` for the travel times between `coords`
/// (`(latitude, longitude)` pairs).
pub fn fetch_distance_matrix(endpoint: &str, coords: &[(f64, f64)]) -> Result<Vec<Vec<Minutes>>> {
    if coords.is_empty() {
        return Err(Error::InvalidParams("no coordinates to query".into()));
    }
    let places: Vec<String> = coords
        .iter()
        .map(|(lat, lon)| format!("{lon},{lat}"))
        .collect();
    let url = format!(
        "{}/{}?annotations=duration",
        endpoint.trim_end_matches('/'),
        places.join(";")
    );
    let config = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(60)))
        .build();
    let agent = ureq::Agent::new_with_config(config);
    let body = agent
        .get(&url)
        .call()
        .map_err(|e| Error::Network(e.to_string()))?
        .body_mut()
        .read_to_string()
        .map_err(|e| Error::Network(e.to_string()))?;
    durations_to_minutes(&body, coords.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{Read, Write};
    use std::net::TcpListener;

    /// Serves one canned HTTP response and returns the base URL.
    fn serve_once(body: &'static str) -> (String, std::thread::JoinHandle<String>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/table/v1/driving", listener.local_addr().unwrap());
        let handle = std::thread::spawn(move || {
            let (mut conn, _) = listener.accept().unwrap();
            let mut buf = [0u8; 4096];
            let n = conn.read(&mut buf).unwrap();
            let request = String::from_utf8_lossy(&buf[..n]).to_string();
            write!(
                conn,
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                body.len(),
                body
            )
            .unwrap();
            request
        });
        (url, handle)
    }

    #[test]
    fn seconds_round_up_to_minutes() {
        let (url, server) = serve_once(r#"{"code":"Ok","durations":[[0,120],[90,0]]}"#);
        let m = fetch_distance_matrix(&url, &[(47.16, 27.58), (47.2, 27.3)]).unwrap();
        assert_eq!(m, vec![vec![0, 2], vec![2, 0]]);
        let request = server.join().unwrap();
        assert!(request.starts_with("GET /table/v1/driving/27.58,47.16;27.3,47.2?annotations=duration"));
    }

    #[test]
    fn wrong_dimensions() {
        let (url, server) = serve_once(r#"{"durations":[[0,120]]}"#);
        assert!(matches!(
            fetch_distance_matrix(&url, &[(0.0, 0.0), (1.0, 1.0)]),
            Err(Error::MalformedResponse(_))
        ));
        server.join().unwrap();
    }

    #[test]
    fn unreachable_endpoint() {
        let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let url = format!("http://127.0.0.1:{port}/table");
        assert!(matches!(
            fetch_distance_matrix(&url, &[(0.0, 0.0)]),
            Err(Error::Network(_))
        ));
    }

    #[test]
    fn body_checks() {
        assert_eq!(
            durations_to_minutes(r#"{"durations":[[5,61],[60.0,0]]}"#, 2).unwrap(),
            vec![vec![0, 2], vec![1, 0]]
        );
        assert!(durations_to_minutes(r#"{"durations":[[0,null],[1,0]]}"#, 2).is_err());
        assert!(durations_to_minutes(r#"{"durations":[[0,-4],[1,0]]}"#, 2).is_err());
        assert!(durations_to_minutes("not json", 2).is_err());
        assert!(durations_to_minutes(r#"{"durations":[[0],[1,0]]}"#, 2).is_err());
    }
}
