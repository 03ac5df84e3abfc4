use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{parse_error, read_file, write_file};
use crate::error::{Error, Result};
use crate::model::{derive_monthly_demand, Instance, Minutes, Params};

/// On-disk JSON form of an [`Instance`].
///
/// Exactly one of `demand` and `yearly_untested_births` must be present;
/// monthly demand is derived from the latter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub names: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yearly_untested_births: Option<Vec<u64>>,
    pub dist_minutes: Vec<Vec<Minutes>>,
    /// `[latitude, longitude]` per location.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Params>,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        Self {
            names: instance.names().to_vec(),
            demand: Some(instance.demand().to_vec()),
            yearly_untested_births: None,
            dist_minutes: instance.dist_rows(),
            coords: instance
                .coords()
                .map(|c| c.iter().map(|&(lat, lon)| [lat, lon]).collect()),
            params: Some(*instance.params()),
        }
    }

    pub fn into_instance(self) -> Result<Instance> {
        let size = self.dist_minutes.len();
        if let Some((i, row)) = self
            .dist_minutes
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != size)
        {
            return Err(Error::Schema(format!(
                "dist_minutes must be square: row {i} has {} entries, expected {size}",
                row.len()
            )));
        }
        let demand = match (self.demand, self.yearly_untested_births) {
            (Some(d), None) => d,
            (None, Some(births)) => births
                .into_iter()
                .map(|b| {
                    u32::try_from(derive_monthly_demand(b))
                        .map_err(|_| Error::Schema(format!("{b} yearly births is out of range")))
                })
                .collect::<Result<_>>()?,
            (Some(_), Some(_)) => {
                return Err(Error::Schema(
                    "give either demand or yearly_untested_births, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Schema(
                    "one of demand or yearly_untested_births is required".into(),
                ))
            }
        };
        let coords = self
            .coords
            .map(|c| c.into_iter().map(|[lat, lon]| (lat, lon)).collect());
        Instance::new(
            self.names,
            self.dist_minutes,
            demand,
            coords,
            self.params.unwrap_or_default(),
        )
        .map_err(|e| match e {
            Error::InvalidInstance(m) | Error::InvalidParams(m) => Error::Schema(m),
            other => other,
        })
    }
}

/// Parses instance JSON; `path` only labels error messages.
pub fn parse_instance(text: &str, path: &Path) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| parse_error(path, e))?;
    file.into_instance()
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    parse_instance(&read_file(path)?, path)
}

pub fn instance_to_json(instance: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceFile::from_instance(instance))
        .expect("instance serializes");
    s.push('\n');
    s
}

pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &instance_to_json(instance))
}

/// Reads a JSON object overriding some or all of the default [`Params`].
pub fn load_params(path: impl AsRef<Path>) -> Result<Params> {
    let path = path.as_ref();
    let params: Params =
        serde_json::from_str(&read_file(path)?).map_err(|e| parse_error(path, e))?;
    params.check().map_err(|e| Error::Schema(e.to_string()))?;
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Instance> {
        parse_instance(text, Path::new("test.json"))
    }

    #[test]
    fn minimal_file() {
        let inst = parse(r#"{"names":["C","A"],"demand":[0,2],"dist_minutes":[[0,60],[60,0]]}"#)
            .unwrap();
        assert_eq!(inst.n(), 1);
        assert_eq!(inst.params(), &Params::default());
    }

    #[test]
    fn non_square_matrix() {
        let err = parse(r#"{"names":["C","A"],"demand":[0,2],"dist_minutes":[[0,60],[60]]}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Schema(m) if m.contains("square")));
    }

    #[test]
    fn births_become_demand() {
        let inst = parse(
            r#"{"names":["C","A"],"yearly_untested_births":[0,12],"dist_minutes":[[0,60],[60,0]]}"#,
        )
        .unwrap();
        assert_eq!(inst.demand(), &[0, 7]);
    }

    #[test]
    fn schema_violations() {
        let both = r#"{"names":["C","A"],"demand":[0,1],"yearly_untested_births":[0,12],"dist_minutes":[[0,60],[60,0]]}"#;
        assert!(matches!(parse(both), Err(Error::Schema(_))));
        let neither = r#"{"names":["C","A"],"dist_minutes":[[0,60],[60,0]]}"#;
        assert!(matches!(parse(neither), Err(Error::Schema(_))));
        let diag = r#"{"names":["C","A"],"demand":[0,1],"dist_minutes":[[0,60],[60,5]]}"#;
        assert!(matches!(parse(diag), Err(Error::Schema(_))));
        let depot = r#"{"names":["C","A"],"demand":[3,1],"dist_minutes":[[0,60],[60,0]]}"#;
        assert!(matches!(parse(depot), Err(Error::Schema(_))));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse("{\n  \"names\": [\"C\",\n").unwrap_err();
        match err {
            Error::Parse { line, path, .. } => {
                assert_eq!(line, 3);
                assert_eq!(path, Path::new("test.json"));
            }
            other => panic!("{other:?}"),
        }
        let negative = r#"{"names":["C","A"],"demand":[0,1],"dist_minutes":[[0,-1],[60,0]]}"#;
        assert!(matches!(parse(negative), Err(Error::Parse { .. })));
    }
}
