//! Values read from `--config`. Every field mirrors a command-line flag.

use std::path::Path;

use serde::Deserialize;

use lossy_mz::report::Format;
use lossy_mz::Strategy;

use crate::Failure;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub etas: Option<Vec<f64>>,
    pub n_values: Option<Vec<usize>>,
    pub strategies: Option<Vec<Strategy>>,
    pub format: Option<Format>,
    pub output_path: Option<String>,
    pub detected_counts_axis: Option<bool>,
    pub integer_photons: Option<bool>,
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub eta: Option<f64>,
    pub n: Option<usize>,
    pub input_photons: Option<f64>,
    pub repetitions: Option<usize>,
    pub visibility: Option<f64>,
    pub samples: Option<usize>,
    pub squeezing_db: Option<f64>,
    pub angle: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))
    }
}
