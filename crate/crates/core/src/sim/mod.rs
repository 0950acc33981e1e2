//! Synthetic surveys from Biot-Savart evaluation of wire models.

mod biot_savart;
pub mod fixtures;
mod grid;
mod vec3;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub use biot_savart::{
    model_field, segment_field, WireModel, WireSegmentPath, MU0, MU0_OVER_4PI, SINGULARITY_GUARD,
};
pub use grid::{GridSpec, BOTTOM_PROBE_Z, CHASSIS_DEPTH, TOP_PROBE_Z};
pub use vec3::Vec3;

use crate::error::{Error, Result};
use crate::field::{Condition, PowerSource, Reading, SurveyDataset, SurveyRecord};

/// Conductors of one synthetic laptop plus the metadata carried into survey records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaptopModel {
    pub screen_size_in: f64,
    pub wires: WireModel,
}

/// Evaluates every laptop at every grid position and returns one cell's dataset.
///
/// With `noise_sd > 0`, independent zero-mean Gaussian noise (µT) is added to each field
/// component. Records are ordered by laptop id then point, and the noise stream depends only
/// on `seed` and the cell, so output is reproducible.
pub fn synthesize_survey(
    models: &BTreeMap<String, LaptopModel>,
    grid: &GridSpec,
    power_source: PowerSource,
    noise_sd: f64,
    seed: u64,
) -> Result<SurveyDataset> {
    if !(noise_sd.is_finite() && noise_sd >= 0.0) {
        return Err(Error::InvalidInput(format!("noise_sd must be >= 0, got {noise_sd}")));
    }
    let condition = Condition::new(grid.side(), power_source);
    let cell = Condition::ALL.iter().position(|c| *c == condition).unwrap_or(0) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(cell);
    let noise = Normal::new(0.0, noise_sd).map_err(|e| Error::InvalidInput(e.to_string()))?;

    let mut records = Vec::with_capacity(models.len() * grid.positions().len());
    for (laptop_id, laptop) in models {
        for (&point, &pos) in grid.positions() {
            let mut sample = model_field(&laptop.wires, pos)?;
            if noise_sd > 0.0 {
                sample.bx += noise.sample(&mut rng);
                sample.by += noise.sample(&mut rng);
                sample.bz += noise.sample(&mut rng);
            }
            records.push(SurveyRecord {
                laptop_id: laptop_id.clone(),
                screen_size_in: laptop.screen_size_in,
                power_source,
                point,
                reading: Reading::Components(sample),
            });
        }
    }
    Ok(SurveyDataset::with_records(condition, records))
}
