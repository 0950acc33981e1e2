use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Vec3;
use crate::error::{Error, Result};
use crate::field::{MeasurementPoint, Side, POINTS_PER_SIDE};

/// Default chassis frame, meters: x across the keyboard (left to right), y from the front
/// edge toward the hinge, z up. The base spans z ∈ [0, 0.02].
pub const CHASSIS_DEPTH: f64 = 0.02;

/// Height of the top-body probe plane.
pub const TOP_PROBE_Z: f64 = 0.024;

/// Height of the bottom-body probe plane (below the base).
pub const BOTTOM_PROBE_Z: f64 = -0.004;

const GRID_X: [f64; 3] = [0.05, 0.15, 0.25];
const GRID_Y: [f64; 3] = [0.175, 0.105, 0.035];

/// Probe coordinates for the nine points of one side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    side: Side,
    positions: BTreeMap<MeasurementPoint, Vec3>,
}

impl GridSpec {
    pub fn new(side: Side, positions: BTreeMap<MeasurementPoint, Vec3>) -> Result<Self> {
        if positions.len() != POINTS_PER_SIDE as usize {
            return Err(Error::InvalidInput(format!(
                "{} grid needs {POINTS_PER_SIDE} positions, got {}",
                side.short_name(),
                positions.len()
            )));
        }
        if let Some(p) = positions.keys().find(|p| p.side() != side) {
            return Err(Error::InvalidInput(format!(
                "point {p} does not belong to the {} grid",
                side.short_name()
            )));
        }
        if let Some((p, _)) = positions.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coordinate for {p}")));
        }
        Ok(Self { side, positions })
    }

    /// Row-major 3×3 layout, point 1 at the rear-left corner, point 9 at the front-right.
    pub fn default_for(side: Side) -> Self {
        let z = match side {
            Side::TopBody => TOP_PROBE_Z,
            Side::BottomBody => BOTTOM_PROBE_Z,
        };
        let positions = side
            .points()
            .map(|p| {
                let i = (p.index() - 1) as usize;
                (p, Vec3::new(GRID_X[i % 3], GRID_Y[i / 3], z))
            })
            .collect();
        Self { side, positions }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn positions(&self) -> &BTreeMap<MeasurementPoint, Vec3> {
        &self.positions
    }

    pub fn position(&self, point: MeasurementPoint) -> Option<Vec3> {
        self.positions.get(&point).copied()
    }
}
