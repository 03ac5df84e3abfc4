use std::path::Path;

use super::{parse_error, read_file, write_file};
use crate::error::Result;
use crate::model::Schedule;

/// Pretty JSON with a trailing newline; identical bytes for equal schedules.
pub fn schedule_to_json(s: &Schedule) -> String {
    let mut out = serde_json::to_string_pretty(s).expect("schedule serializes");
    out.push('\n');
    out
}

pub fn parse_schedule(text: &str, path: &Path) -> Result<Schedule> {
    serde_json::from_str(text).map_err(|e| parse_error(path, e))
}

pub fn load_schedule(path: impl AsRef<Path>) -> Result<Schedule> {
    let path = path.as_ref();
    parse_schedule(&read_file(path)?, path)
}

pub fn save_schedule(s: &Schedule, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &schedule_to_json(s))
}
