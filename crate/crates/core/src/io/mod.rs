//! Files, synthetic instances, reports and exports.

mod fetch;
mod generate;
mod geojson;
mod html;
mod instance_file;
mod schedule_file;
mod text;

pub use fetch::{durations_to_minutes, fetch_distance_matrix, CoordsFile};
pub use generate::{base_matrix, generate_instance, BoundingBox, GenSpec};
pub use geojson::{export_geojson, Routes};
pub use html::export_html;
pub use instance_file::{
    instance_to_json, load_instance, load_params, parse_instance, save_instance, InstanceFile,
};
pub use schedule_file::{load_schedule, parse_schedule, save_schedule, schedule_to_json};
pub use text::write_schedule_text;

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn parse_error(path: &Path, e: serde_json::Error) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}
