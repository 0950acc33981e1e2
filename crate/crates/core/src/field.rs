//! Survey domain types and the scalar field computations built on them.
//!
//! All magnetic-induction values are microtesla. A [`SurveyRecord`] holds either the
//! three signed axis components reported by a tri-axial probe or an RMS value that was
//! already combined upstream, never both.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of grid points on each side of the chassis.
pub const POINTS_PER_SIDE: u8 = 9;

/// Laptop count of the reference experiment; fewer is accepted with a warning.
pub const REFERENCE_LAPTOP_COUNT: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    TopBody,
    BottomBody,
}

impl Side {
    pub const ALL: [Side; 2] = [Side::TopBody, Side::BottomBody];

    pub fn prefix(self) -> &'static str {
        match self {
            Side::TopBody => "tbmp",
            Side::BottomBody => "bbmp",
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Side::TopBody => "top",
            Side::BottomBody => "bottom",
        }
    }

    /// All nine grid points of this side, in index order.
    pub fn points(self) -> impl Iterator<Item = MeasurementPoint> {
        (1..=POINTS_PER_SIDE).map(move |index| MeasurementPoint { side: self, index })
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "top" | "topbody" | "top_body" => Ok(Side::TopBody),
            "bottom" | "bottombody" | "bottom_body" => Ok(Side::BottomBody),
            other => Err(Error::InvalidInput(format!("unknown side {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PowerSource {
    #[serde(rename = "AC")]
    Ac,
    #[serde(rename = "Battery")]
    Battery,
}

impl PowerSource {
    pub const ALL: [PowerSource; 2] = [PowerSource::Ac, PowerSource::Battery];

    pub fn as_str(self) -> &'static str {
        match self {
            PowerSource::Ac => "AC",
            PowerSource::Battery => "Battery",
        }
    }
}

impl fmt::Display for PowerSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PowerSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ac" => Ok(PowerSource::Ac),
            "battery" | "bat" => Ok(PowerSource::Battery),
            other => Err(Error::InvalidInput(format!("unknown power source {other:?}"))),
        }
    }
}

/// A labelled grid point such as `tbmp4` or `bbmp9`.
///
/// The side is carried by the label prefix, so a point can never disagree with itself;
/// disagreement with a dataset's side is what [`validate_dataset`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MeasurementPoint {
    side: Side,
    index: u8,
}

impl MeasurementPoint {
    pub fn new(side: Side, index: u8) -> Result<Self> {
        if !(1..=POINTS_PER_SIDE).contains(&index) {
            return Err(Error::InvalidInput(format!(
                "point index {index} outside 1..={POINTS_PER_SIDE}"
            )));
        }
        Ok(Self { side, index })
    }

    pub fn side(self) -> Side {
        self.side
    }

    /// 1-based index within the side.
    pub fn index(self) -> u8 {
        self.index
    }
}

impl fmt::Display for MeasurementPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.side.prefix(), self.index)
    }
}

impl FromStr for MeasurementPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        let (side, rest) = if let Some(rest) = lower.strip_prefix("tbmp") {
            (Side::TopBody, rest)
        } else if let Some(rest) = lower.strip_prefix("bbmp") {
            (Side::BottomBody, rest)
        } else {
            return Err(Error::InvalidInput(format!("unknown point id {s:?}")));
        };
        let index: u8 = rest
            .parse()
            .map_err(|_| Error::InvalidInput(format!("unknown point id {s:?}")))?;
        MeasurementPoint::new(side, index)
    }
}

impl Serialize for MeasurementPoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MeasurementPoint {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Tri-axial magnetic induction at one point, µT. Components are signed projections.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldSample {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl FieldSample {
    pub fn new(bx: f64, by: f64, bz: f64) -> Self {
        Self { bx, by, bz }
    }

    pub fn is_finite(&self) -> bool {
        self.bx.is_finite() && self.by.is_finite() && self.bz.is_finite()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(c * self.bx, c * self.by, c * self.bz)
    }
}

/// RMS magnetic induction `sqrt(bx² + by² + bz²)` of a tri-axial sample.
pub fn rms(sample: &FieldSample) -> Result<f64> {
    if !sample.is_finite() {
        return Err(Error::InvalidInput(format!(
            "non-finite field component in ({}, {}, {})",
            sample.bx, sample.by, sample.bz
        )));
    }
    // hypot avoids overflow for large components and keeps (3, 4, 0) exact
    Ok(sample.bx.hypot(sample.by).hypot(sample.bz))
}

/// What the instrument (or a published table) provided for one record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading {
    Components(FieldSample),
    Rms(f64),
}

impl Reading {
    pub fn value(&self) -> Result<f64> {
        match self {
            Reading::Components(sample) => rms(sample),
            Reading::Rms(v) if v.is_finite() && *v >= 0.0 => Ok(*v),
            Reading::Rms(v) => Err(Error::InvalidInput(format!("stored rms {v} is not a finite non-negative value"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub laptop_id: String,
    pub screen_size_in: f64,
    pub power_source: PowerSource,
    pub point: MeasurementPoint,
    pub reading: Reading,
}

/// One experiment cell: a side of the chassis under one power source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Condition {
    pub side: Side,
    pub power_source: PowerSource,
}

impl Condition {
    /// The four cells in report order.
    pub const ALL: [Condition; 4] = [
        Condition { side: Side::TopBody, power_source: PowerSource::Ac },
        Condition { side: Side::TopBody, power_source: PowerSource::Battery },
        Condition { side: Side::BottomBody, power_source: PowerSource::Ac },
        Condition { side: Side::BottomBody, power_source: PowerSource::Battery },
    ];

    pub fn new(side: Side, power_source: PowerSource) -> Self {
        Self { side, power_source }
    }

    /// Short slug used for file names, e.g. `top_ac`.
    pub fn slug(&self) -> String {
        format!(
            "{}_{}",
            self.side.short_name(),
            self.power_source.as_str().to_ascii_lowercase()
        )
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.side.short_name(), self.power_source)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyDataset {
    pub condition: Condition,
    pub records: Vec<SurveyRecord>,
}

impl SurveyDataset {
    pub fn new(condition: Condition) -> Self {
        Self {
            condition,
            records: Vec::new(),
        }
    }

    pub fn with_records(condition: Condition, records: Vec<SurveyRecord>) -> Self {
        Self { condition, records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Distinct laptop ids in ascending order.
    pub fn laptop_ids(&self) -> Vec<&str> {
        let ids: BTreeSet<&str> = self.records.iter().map(|r| r.laptop_id.as_str()).collect();
        ids.into_iter().collect()
    }
}

/// One scalar feature per record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub laptop_id: String,
    pub point: MeasurementPoint,
    pub value: f64,
}

/// One RMS value per record, ordered by laptop id then point index.
///
/// The sort is stable, so duplicate `(laptop, point)` pairs keep their input order.
pub fn feature_vector(dataset: &SurveyDataset) -> Result<Vec<Feature>> {
    let mut features = dataset
        .records
        .iter()
        .map(|r| {
            let value = r.reading.value().map_err(|e| match e {
                Error::InvalidInput(msg) => {
                    Error::InvalidInput(format!("{} {}: {msg}", r.laptop_id, r.point))
                }
                other => other,
            })?;
            Ok(Feature {
                laptop_id: r.laptop_id.clone(),
                point: r.point,
                value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    features.sort_by(|a, b| {
        a.laptop_id
            .cmp(&b.laptop_id)
            .then(a.point.index().cmp(&b.point.index()))
            .then(a.point.side().cmp(&b.point.side()))
    });
    Ok(features)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    SideMismatch {
        laptop_id: String,
        point: MeasurementPoint,
        expected: Side,
    },
    PowerMismatch {
        laptop_id: String,
        point: MeasurementPoint,
        found: PowerSource,
    },
    Duplicate {
        laptop_id: String,
        point: MeasurementPoint,
    },
    NegativeRms {
        laptop_id: String,
        point: MeasurementPoint,
        value: f64,
    },
    NonFinite {
        laptop_id: String,
        point: MeasurementPoint,
        field: String,
    },
    InvalidScreenSize {
        laptop_id: String,
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    MissingPoints {
        laptop_id: String,
        missing: Vec<MeasurementPoint>,
    },
    FewerLaptops {
        found: usize,
        reference: usize,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    /// True iff no invariant is violated. Warnings do not count.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every invariant violation of `dataset`. Partial coverage produces warnings only.
pub fn validate_dataset(dataset: &SurveyDataset) -> ValidationReport {
    let mut report = ValidationReport::default();
    let cond = dataset.condition;
    let mut seen: BTreeSet<(&str, MeasurementPoint)> = BTreeSet::new();
    let mut bad_screen: BTreeSet<&str> = BTreeSet::new();
    let mut coverage: BTreeMap<&str, BTreeSet<MeasurementPoint>> = BTreeMap::new();

    for r in &dataset.records {
        let laptop = r.laptop_id.as_str();
        coverage.entry(laptop).or_default().insert(r.point);

        if r.point.side() != cond.side {
            report.violations.push(Violation::SideMismatch {
                laptop_id: r.laptop_id.clone(),
                point: r.point,
                expected: cond.side,
            });
        }
        if r.power_source != cond.power_source {
            report.violations.push(Violation::PowerMismatch {
                laptop_id: r.laptop_id.clone(),
                point: r.point,
                found: r.power_source,
            });
        }
        if !seen.insert((laptop, r.point)) {
            report.violations.push(Violation::Duplicate {
                laptop_id: r.laptop_id.clone(),
                point: r.point,
            });
        }
        if !(r.screen_size_in.is_finite() && r.screen_size_in > 0.0) && bad_screen.insert(laptop) {
            report.violations.push(Violation::InvalidScreenSize {
                laptop_id: r.laptop_id.clone(),
                value: r.screen_size_in,
            });
        }
        match r.reading {
            Reading::Rms(v) if !v.is_finite() => report.violations.push(Violation::NonFinite {
                laptop_id: r.laptop_id.clone(),
                point: r.point,
                field: "b_rms".into(),
            }),
            Reading::Rms(v) if v < 0.0 => report.violations.push(Violation::NegativeRms {
                laptop_id: r.laptop_id.clone(),
                point: r.point,
                value: v,
            }),
            Reading::Rms(_) => {}
            Reading::Components(s) => {
                for (name, v) in [("bx", s.bx), ("by", s.by), ("bz", s.bz)] {
                    if !v.is_finite() {
                        report.violations.push(Violation::NonFinite {
                            laptop_id: r.laptop_id.clone(),
                            point: r.point,
                            field: name.into(),
                        });
                    }
                }
            }
        }
    }

    for (laptop, present) in &coverage {
        let missing: Vec<_> = cond.side.points().filter(|p| !present.contains(p)).collect();
        if !missing.is_empty() {
            report.warnings.push(Warning::MissingPoints {
                laptop_id: laptop.to_string(),
                missing,
            });
        }
    }
    if !coverage.is_empty() && coverage.len() < REFERENCE_LAPTOP_COUNT {
        report.warnings.push(Warning::FewerLaptops {
            found: coverage.len(),
            reference: REFERENCE_LAPTOP_COUNT,
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(laptop: &str, point: &str, reading: Reading) -> SurveyRecord {
        SurveyRecord {
            laptop_id: laptop.into(),
            screen_size_in: 15.6,
            power_source: PowerSource::Ac,
            point: point.parse().unwrap(),
            reading,
        }
    }

    fn full_top_ac() -> SurveyDataset {
        let cond = Condition::new(Side::TopBody, PowerSource::Ac);
        let mut ds = SurveyDataset::new(cond);
        for l in 1..=13 {
            for p in Side::TopBody.points() {
                ds.records.push(record(
                    &format!("L{l:02}"),
                    &p.to_string(),
                    Reading::Rms(0.01 * l as f64 + p.index() as f64),
                ));
            }
        }
        ds
    }

    #[test]
    fn rms_examples() {
        assert_eq!(rms(&FieldSample::new(3.0, 4.0, 0.0)).unwrap(), 5.0);
        assert_eq!(rms(&FieldSample::new(0.0, 0.0, 0.0)).unwrap(), 0.0);
        let v = rms(&FieldSample::new(1.0, 1.0, 1.0)).unwrap();
        assert!((v - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rms_rejects_non_finite() {
        assert!(matches!(
            rms(&FieldSample::new(f64::NAN, 0.0, 0.0)),
            Err(Error::InvalidInput(_))
        ));
        assert!(rms(&FieldSample::new(0.0, f64::INFINITY, 0.0)).is_err());
    }

    #[test]
    fn point_parsing() {
        let p: MeasurementPoint = "tbmp7".parse().unwrap();
        assert_eq!(p.side(), Side::TopBody);
        assert_eq!(p.index(), 7);
        assert_eq!("BBMP2".parse::<MeasurementPoint>().unwrap().to_string(), "bbmp2");
        assert!("tbmp0".parse::<MeasurementPoint>().is_err());
        assert!("tbmp10".parse::<MeasurementPoint>().is_err());
        assert!("xbmp1".parse::<MeasurementPoint>().is_err());
    }

    #[test]
    fn feature_vector_full_dataset_has_117_values() {
        let ds = full_top_ac();
        assert_eq!(feature_vector(&ds).unwrap().len(), 117);
        assert!(validate_dataset(&ds).violations.is_empty());
        assert!(validate_dataset(&ds).warnings.is_empty());
    }

    #[test]
    fn feature_vector_empty_and_component_records() {
        let cond = Condition::new(Side::TopBody, PowerSource::Ac);
        assert!(feature_vector(&SurveyDataset::new(cond)).unwrap().is_empty());

        let ds = SurveyDataset::with_records(
            cond,
            vec![record("a", "tbmp1", Reading::Components(FieldSample::new(0.3, 0.0, 0.4)))],
        );
        let f = feature_vector(&ds).unwrap();
        assert!((f[0].value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn feature_vector_orders_by_laptop_then_point() {
        let cond = Condition::new(Side::TopBody, PowerSource::Ac);
        let ds = SurveyDataset::with_records(
            cond,
            vec![
                record("b", "tbmp2", Reading::Rms(1.0)),
                record("a", "tbmp9", Reading::Rms(2.0)),
                record("b", "tbmp1", Reading::Rms(3.0)),
                record("a", "tbmp3", Reading::Rms(4.0)),
            ],
        );
        let order: Vec<_> = feature_vector(&ds)
            .unwrap()
            .into_iter()
            .map(|f| format!("{}:{}", f.laptop_id, f.point))
            .collect();
        assert_eq!(order, ["a:tbmp3", "a:tbmp9", "b:tbmp1", "b:tbmp2"]);
    }

    #[test]
    fn feature_vector_rejects_negative_stored_rms() {
        let cond = Condition::new(Side::TopBody, PowerSource::Ac);
        let ds = SurveyDataset::with_records(cond, vec![record("a", "tbmp1", Reading::Rms(-0.1))]);
        assert!(feature_vector(&ds).is_err());
    }

    #[test]
    fn duplicate_is_one_violation() {
        let mut ds = full_top_ac();
        ds.records.push(record("L03", "tbmp5", Reading::Rms(0.2)));
        let report = validate_dataset(&ds);
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(&report.violations[0], Violation::Duplicate { laptop_id, point }
            if laptop_id == "L03" && point.to_string() == "tbmp5"));
    }

    #[test]
    fn side_mismatch_is_one_violation() {
        let cond = Condition::new(Side::BottomBody, PowerSource::Ac);
        let mut ds = SurveyDataset::new(cond);
        for l in 1..=13 {
            for p in Side::BottomBody.points() {
                ds.records.push(record(&format!("L{l:02}"), &p.to_string(), Reading::Rms(0.1)));
            }
        }
        ds.records.push(record("L99", "tbmp1", Reading::Rms(0.1)));
        let report = validate_dataset(&ds);
        assert_eq!(
            report
                .violations
                .iter()
                .filter(|v| matches!(v, Violation::SideMismatch { .. }))
                .count(),
            1
        );
        assert_eq!(report.violations.len(), 1);
    }

    #[test]
    fn partial_dataset_warns_but_is_valid() {
        let cond = Condition::new(Side::TopBody, PowerSource::Ac);
        let ds = SurveyDataset::with_records(
            cond,
            vec![
                record("a", "tbmp1", Reading::Rms(0.1)),
                record("a", "tbmp2", Reading::Rms(0.2)),
            ],
        );
        let report = validate_dataset(&ds);
        assert!(report.is_valid());
        assert_eq!(report.warnings.len(), 2);
    }

    #[test]
    fn bad_values_are_reported() {
        let cond = Condition::new(Side::TopBody, PowerSource::Ac);
        let mut bad_screen = record("c", "tbmp3", Reading::Rms(0.1));
        bad_screen.screen_size_in = 0.0;
        let ds = SurveyDataset::with_records(
            cond,
            vec![
                record("a", "tbmp1", Reading::Rms(-1.0)),
                record("b", "tbmp2", Reading::Components(FieldSample::new(f64::NAN, 0.0, f64::INFINITY))),
                bad_screen,
            ],
        );
        let report = validate_dataset(&ds);
        assert_eq!(report.violations.len(), 4);
    }
}
