//! Thirteen synthetic laptops for end-to-end tests and demos.
//!
//! Each laptop has one small square loop just inside the chassis under every probe point,
//! eighteen in total. Loop currents are calibrated so that the RMS field at each probe hits a
//! target drawn from five well-separated bands per experiment cell. The strongest bands sit
//! under tbmp1/2/4/5 and bbmp1/4/7/8; tbmp3/6/9 and bbmp3/6/9 get the weakest. The
//! geometry is a test construction, not a model of real laptop hardware.

use std::collections::BTreeMap;

use super::{model_field, GridSpec, LaptopModel, Vec3, WireModel, WireSegmentPath};
use crate::field::{rms, Condition, MeasurementPoint, PowerSource, Side};

pub const FIXTURE_LAPTOP_COUNT: usize = 13;

const SCREEN_SIZES: [f64; 5] = [17.0, 15.6, 14.0, 13.3, 11.6];

/// Side length of each calibration loop, m.
pub const LOOP_SIDE: f64 = 0.005;
pub const TOP_LOOP_Z: f64 = 0.016;
pub const BOTTOM_LOOP_Z: f64 = 0.004;

const CALIBRATION_TOLERANCE: f64 = 1e-12;
const CALIBRATION_MAX_ITERATIONS: usize = 1000;

/// Target field bands of one cell, strongest first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandProfile {
    /// Band centres, µT.
    pub centers: [f64; 5],
    /// Half-width of each band, µT.
    pub half_widths: [f64; 5],
    /// Band index for points 1..=9 before per-laptop demotion.
    pub base: [usize; 9],
}

impl BandProfile {
    /// Closed interval `[lo, hi]` covered by band `b`.
    pub fn range(&self, band: usize) -> (f64, f64) {
        (
            self.centers[band] - self.half_widths[band],
            self.centers[band] + self.half_widths[band],
        )
    }
}

const TOP_BASE: [usize; 9] = [0, 1, 3, 1, 0, 3, 2, 2, 4];
const BOTTOM_BASE: [usize; 9] = [0, 2, 3, 0, 2, 3, 1, 1, 4];

pub fn band_profile(condition: Condition) -> BandProfile {
    match (condition.side, condition.power_source) {
        (Side::TopBody, PowerSource::Ac) => BandProfile {
            centers: [2.0, 0.95, 0.45, 0.175, 0.04],
            half_widths: [0.05, 0.04, 0.03, 0.015, 0.01],
            base: TOP_BASE,
        },
        (Side::TopBody, PowerSource::Battery) => BandProfile {
            centers: [0.8, 0.45, 0.2, 0.09, 0.03],
            half_widths: [0.04, 0.03, 0.02, 0.01, 0.005],
            base: TOP_BASE,
        },
        (Side::BottomBody, PowerSource::Ac) => BandProfile {
            centers: [3.4, 1.6, 0.65, 0.36, 0.08],
            half_widths: [0.08, 0.06, 0.04, 0.02, 0.01],
            base: BOTTOM_BASE,
        },
        (Side::BottomBody, PowerSource::Battery) => BandProfile {
            centers: [2.8, 1.5, 0.75, 0.42, 0.12],
            half_widths: [0.08, 0.06, 0.04, 0.02, 0.01],
            base: BOTTOM_BASE,
        },
    }
}

/// Points where the fixture concentrates its strongest loops.
pub fn hot_points(side: Side) -> [MeasurementPoint; 4] {
    let idx = match side {
        Side::TopBody => [1, 2, 4, 5],
        Side::BottomBody => [1, 4, 7, 8],
    };
    idx.map(|i| MeasurementPoint::new(side, i).expect("static index"))
}

pub fn fixture_laptop_id(laptop: usize) -> String {
    format!("L{:02}", laptop + 1)
}

/// Band of `point` on 0-based `laptop`; some laptops are demoted one band at some points.
pub fn fixture_band(laptop: usize, point: MeasurementPoint, power_source: PowerSource) -> usize {
    let profile = band_profile(Condition::new(point.side(), power_source));
    let p = point.index() as usize;
    let demote = usize::from((laptop + p).is_multiple_of(5));
    (profile.base[p - 1] + demote).min(4)
}

/// Target RMS value for `point` on 0-based `laptop`, µT.
pub fn fixture_target(laptop: usize, point: MeasurementPoint, power_source: PowerSource) -> f64 {
    let profile = band_profile(Condition::new(point.side(), power_source));
    let band = fixture_band(laptop, point, power_source);
    let p = point.index() as usize;
    let offset = ((laptop * 7 + p * 3) % 5) as f64 / 2.0 - 1.0;
    profile.centers[band] + profile.half_widths[band] * offset
}

/// Horizontal square loop centred at `center`, counter-clockwise seen from +z.
pub fn square_loop(center: Vec3, side: f64, current: f64) -> WireSegmentPath {
    let h = side / 2.0;
    let corners = [(-h, -h), (h, -h), (h, h), (-h, h), (-h, -h)];
    WireSegmentPath::new(
        corners
            .iter()
            .map(|&(dx, dy)| center + Vec3::new(dx, dy, 0.0))
            .collect(),
        current,
    )
    .expect("square loop vertices are distinct")
}

struct Probe {
    position: Vec3,
    loop_center: Vec3,
    target: f64,
}

/// Solves for loop currents that reproduce every probe target.
///
/// The field is linear in the currents, so unit-current responses are computed once and the
/// currents are rescaled multiplicatively until each probe matches its target. Each probe is
/// dominated by its own loop, which makes the iteration contract quickly.
fn calibrate(probes: &[Probe]) -> WireModel {
    let unit: Vec<WireSegmentPath> = probes
        .iter()
        .map(|p| square_loop(p.loop_center, LOOP_SIDE, 1.0))
        .collect();
    let response: Vec<Vec<Vec3>> = probes
        .iter()
        .map(|p| {
            unit.iter()
                .map(|w| {
                    let s = model_field(&WireModel::new(vec![w.clone()]), p.position)
                        .expect("probes clear of loops");
                    Vec3::new(s.bx, s.by, s.bz)
                })
                .collect()
        })
        .collect();

    let mut currents: Vec<f64> = probes
        .iter()
        .enumerate()
        .map(|(i, p)| p.target / response[i][i].norm())
        .collect();
    for _ in 0..CALIBRATION_MAX_ITERATIONS {
        let mut worst: f64 = 0.0;
        let fields: Vec<f64> = response
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&currents)
                    .fold(Vec3::ZERO, |acc, (g, &c)| acc + *g * c)
                    .norm()
            })
            .collect();
        for (i, p) in probes.iter().enumerate() {
            worst = worst.max((fields[i] / p.target - 1.0).abs());
            currents[i] *= p.target / fields[i];
        }
        if worst < CALIBRATION_TOLERANCE {
            break;
        }
    }
    WireModel::new(
        unit.iter()
            .zip(&currents)
            .map(|(w, &c)| w.with_current(c))
            .collect(),
    )
}

/// Wire model of 0-based `laptop` under `power_source`.
pub fn fixture_model(laptop: usize, power_source: PowerSource) -> WireModel {
    let mut probes = Vec::with_capacity(18);
    for side in Side::ALL {
        let grid = GridSpec::default_for(side);
        let loop_z = match side {
            Side::TopBody => TOP_LOOP_Z,
            Side::BottomBody => BOTTOM_LOOP_Z,
        };
        for (&point, &position) in grid.positions() {
            probes.push(Probe {
                position,
                loop_center: Vec3::new(position.x, position.y, loop_z),
                target: fixture_target(laptop, point, power_source),
            });
        }
    }
    calibrate(&probes)
}

/// All thirteen fixture laptops under one power source, keyed by id.
pub fn fixture_laptops(power_source: PowerSource) -> BTreeMap<String, LaptopModel> {
    (0..FIXTURE_LAPTOP_COUNT)
        .map(|l| {
            (
                fixture_laptop_id(l),
                LaptopModel {
                    screen_size_in: SCREEN_SIZES[l % SCREEN_SIZES.len()],
                    wires: fixture_model(l, power_source),
                },
            )
        })
        .collect()
}

/// RMS the fixture actually produces at `point`, µT.
pub fn fixture_rms(model: &WireModel, point: MeasurementPoint) -> f64 {
    let grid = GridSpec::default_for(point.side());
    let pos = grid.position(point).expect("default grid covers all points");
    rms(&model_field(model, pos).expect("probes clear of loops")).expect("finite field")
}
