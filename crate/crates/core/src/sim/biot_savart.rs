//! Magnetostatic field of polyline current paths.
//!
//! Each straight segment is evaluated with the closed-form finite-segment solution of the
//! Biot-Savart integral, so there is no quadrature error. Fields of all segments are
//! superposed.

use serde::{Deserialize, Serialize};

use super::Vec3;
use crate::error::{Error, Result};
use crate::field::FieldSample;

/// Vacuum permeability, T·m/A.
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;

/// µ0 / 4π, T·m/A.
pub const MU0_OVER_4PI: f64 = 1.0e-7;

/// Evaluation points closer than this to a conductor are rejected, m.
pub const SINGULARITY_GUARD: f64 = 1.0e-6;

const TESLA_TO_MICROTESLA: f64 = 1.0e6;

/// Ordered vertices of a filament carrying `current` (A) from the first vertex toward the last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireSegmentPath {
    vertices: Vec<Vec3>,
    current: f64,
}

impl WireSegmentPath {
    pub fn new(vertices: Vec<Vec3>, current: f64) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a wire path needs at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        if !current.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite current {current}")));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite vertex {i}")));
        }
        if let Some(i) = vertices.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!(
                "vertices {i} and {} coincide",
                i + 1
            )));
        }
        Ok(Self { vertices, current })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn current(&self) -> f64 {
        self.current
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vec3, Vec3)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn with_current(&self, current: f64) -> Self {
        Self {
            vertices: self.vertices.clone(),
            current,
        }
    }

    /// Same geometry traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self {
            vertices,
            current: self.current,
        }
    }
}

/// A set of current paths in vacuum.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WireModel {
    pub paths: Vec<WireSegmentPath>,
}

impl WireModel {
    pub fn new(paths: Vec<WireSegmentPath>) -> Self {
        Self { paths }
    }

    pub fn mu0(&self) -> f64 {
        MU0
    }

    /// Copy with every path current multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            paths: self
                .paths
                .iter()
                .map(|p| p.with_current(c * p.current))
                .collect(),
        }
    }
}

/// Field in tesla at `eval` due to a straight segment from `a` to `b` carrying `current`.
///
/// Uses `B = µ0 I / 4π · (r1 × r2)(|r1| + |r2|) / (|r1||r2| (|r1||r2| + r1·r2))` with
/// `r1 = eval − a`, `r2 = eval − b`.
pub fn segment_field(a: Vec3, b: Vec3, current: f64, eval: Vec3) -> Result<Vec3> {
    if a == b {
        return Err(Error::InvalidInput("degenerate segment: endpoints coincide".into()));
    }
    let distance = eval.distance_to_segment(a, b);
    if distance < SINGULARITY_GUARD {
        return Err(Error::Singularity {
            location: None,
            distance,
            guard: SINGULARITY_GUARD,
        });
    }
    Ok(segment_field_unchecked(a, b, current, eval))
}

fn segment_field_unchecked(a: Vec3, b: Vec3, current: f64, eval: Vec3) -> Vec3 {
    let r1 = eval - a;
    let r2 = eval - b;
    let n1 = r1.norm();
    let n2 = r2.norm();
    let n12 = n1 * n2;
    let denom = n12 * (n12 + r1.dot(r2));
    // eval on the segment's line but outside it: r1 ∥ r2, the field vanishes
    if denom == 0.0 {
        return Vec3::ZERO;
    }
    r1.cross(r2) * (MU0_OVER_4PI * current * (n1 + n2) / denom)
}

/// Superposed field of every segment of `model` at `eval`, in µT.
pub fn model_field(model: &WireModel, eval: Vec3) -> Result<FieldSample> {
    // per-path partial sums keep superposition over paths bitwise exact
    let mut total = Vec3::ZERO;
    for (pi, path) in model.paths.iter().enumerate() {
        let mut path_field = Vec3::ZERO;
        for (si, (a, b)) in path.segments().enumerate() {
            let distance = eval.distance_to_segment(a, b);
            if distance < SINGULARITY_GUARD {
                return Err(Error::Singularity {
                    location: Some((pi, si)),
                    distance,
                    guard: SINGULARITY_GUARD,
                });
            }
            path_field += segment_field_unchecked(a, b, path.current, eval);
        }
        total += path_field * TESLA_TO_MICROTESLA;
    }
    Ok(FieldSample::new(total.x, total.y, total.z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rms;

    fn square_loop(side: f64, current: f64) -> WireSegmentPath {
        let h = side / 2.0;
        WireSegmentPath::new(
            vec![
                Vec3::new(-h, -h, 0.0),
                Vec3::new(h, -h, 0.0),
                Vec3::new(h, h, 0.0),
                Vec3::new(-h, h, 0.0),
                Vec3::new(-h, -h, 0.0),
            ],
            current,
        )
        .unwrap()
    }

    #[test]
    fn zero_current_gives_zero_field() {
        let b = segment_field(Vec3::new(0.0, 0.0, -1.0), Vec3::new(0.0, 0.0, 1.0), 0.0, Vec3::new(0.1, 0.2, 0.3)).unwrap();
        assert_eq!(b, Vec3::ZERO);
    }

    #[test]
    fn long_segment_matches_infinite_wire() {
        let b = segment_field(Vec3::new(0.0, 0.0, -100.0), Vec3::new(0.0, 0.0, 100.0), 1.0, Vec3::new(0.01, 0.0, 0.0)).unwrap();
        let expected = MU0 / (2.0 * std::f64::consts::PI * 0.01);
        assert!((b.norm() - expected).abs() / expected < 1e-3);
        // right-hand rule: +z current, point on +x, field along +y
        assert!(b.y > 0.0 && b.x == 0.0 && b.z == 0.0);
    }

    #[test]
    fn reversal_negates_exactly() {
        let (a, b) = (Vec3::new(0.1, -0.2, 0.05), Vec3::new(-0.3, 0.4, 0.2));
        let p = Vec3::new(0.02, 0.03, -0.04);
        let fwd = segment_field(a, b, 1.7, p).unwrap();
        assert_eq!(segment_field(b, a, 1.7, p).unwrap(), -fwd);
        assert_eq!(segment_field(a, b, -1.7, p).unwrap(), -fwd);
    }

    #[test]
    fn singularity_is_detected() {
        let a = Vec3::new(0.0, 0.0, 0.0);
        let b = Vec3::new(1.0, 0.0, 0.0);
        assert!(matches!(
            segment_field(a, b, 1.0, Vec3::new(0.5, 1e-7, 0.0)),
            Err(Error::Singularity { .. })
        ));
        // on the line beyond the endpoint is fine and has zero field
        assert_eq!(segment_field(a, b, 1.0, Vec3::new(2.0, 0.0, 0.0)).unwrap(), Vec3::ZERO);
    }

    #[test]
    fn model_singularity_names_path_and_segment() {
        let model = WireModel::new(vec![square_loop(0.1, 1.0)]);
        let err = model_field(&model, Vec3::new(0.05, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Singularity { location: Some((0, 1)), .. }), "{err}");
    }

    #[test]
    fn empty_model_and_superposition() {
        let p = Vec3::new(0.01, 0.02, 0.03);
        assert_eq!(model_field(&WireModel::default(), p).unwrap(), FieldSample::default());

        let one = WireModel::new(vec![square_loop(0.1, 1.0)]);
        let two = WireModel::new(vec![square_loop(0.1, 1.0), square_loop(0.1, 1.0)]);
        let f1 = model_field(&one, p).unwrap();
        let f2 = model_field(&two, p).unwrap();
        assert_eq!(f2, f1.scaled(2.0));
    }

    #[test]
    fn square_loop_center() {
        let l = 0.1;
        let model = WireModel::new(vec![square_loop(l, 1.0)]);
        let b = rms(&model_field(&model, Vec3::ZERO).unwrap()).unwrap() * 1e-6;
        let expected = 2.0 * 2f64.sqrt() * MU0 / (std::f64::consts::PI * l);
        assert!((b - expected).abs() / expected < 1e-3);
        assert!((expected - 1.13e-5).abs() < 0.01e-5);
    }

    #[test]
    fn path_validation() {
        assert!(WireSegmentPath::new(vec![Vec3::ZERO], 1.0).is_err());
        assert!(WireSegmentPath::new(vec![Vec3::ZERO, Vec3::ZERO], 1.0).is_err());
        assert!(WireSegmentPath::new(vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0)], f64::NAN).is_err());
    }
}
