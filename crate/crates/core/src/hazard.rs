//! Safety limits, hazard labels for clusters, and per-zone danger summaries.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{feature_vector, MeasurementPoint, SurveyDataset};
use crate::kmedians::ClusteringResult;

/// Default fixed limit for safe use of computer equipment, µT.
pub const DEFAULT_FIXED_LIMIT_UT: f64 = 0.3;

/// TCO2 band (2 kHz to 400 kHz) magnetic limit, µT.
pub const TCO2_LIMIT_UT: f64 = 0.025;

/// Unit in which the ICNIRP `5/f` and `25/f` reference levels are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcnirpUnit {
    #[default]
    Millitesla,
    Microtesla,
}

impl IcnirpUnit {
    fn to_microtesla(self) -> f64 {
        match self {
            IcnirpUnit::Millitesla => 1.0e3,
            IcnirpUnit::Microtesla => 1.0,
        }
    }
}

impl FromStr for IcnirpUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mT" | "mt" | "millitesla" => Ok(IcnirpUnit::Millitesla),
            "uT" | "ut" | "µT" | "microtesla" => Ok(IcnirpUnit::Microtesla),
            other => Err(Error::InvalidStandard(format!("unknown ICNIRP unit {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SafetyStandard {
    FixedLimit { limit_ut: f64 },
    /// General public, `5/f`.
    IcnirpPublic { frequency_hz: f64, unit: IcnirpUnit },
    /// Occupational, `25/f`.
    IcnirpOccupational { frequency_hz: f64, unit: IcnirpUnit },
    Tco2,
}

impl Default for SafetyStandard {
    fn default() -> Self {
        SafetyStandard::FixedLimit {
            limit_ut: DEFAULT_FIXED_LIMIT_UT,
        }
    }
}

impl SafetyStandard {
    /// Parses the CLI selector: `fixed:<µT>`, `icnirp-public`, `icnirp-occupational` or `tco2`.
    pub fn parse(selector: &str, frequency_hz: f64, unit: IcnirpUnit) -> Result<Self> {
        let s = selector.trim().to_ascii_lowercase();
        let standard = if let Some(v) = s.strip_prefix("fixed:") {
            let limit_ut = v
                .parse()
                .map_err(|_| Error::InvalidStandard(format!("bad fixed limit {v:?}")))?;
            SafetyStandard::FixedLimit { limit_ut }
        } else {
            match s.as_str() {
                "fixed" => SafetyStandard::default(),
                "icnirp-public" => SafetyStandard::IcnirpPublic { frequency_hz, unit },
                "icnirp-occupational" => SafetyStandard::IcnirpOccupational { frequency_hz, unit },
                "tco2" => SafetyStandard::Tco2,
                _ => return Err(Error::InvalidStandard(format!("unknown standard {selector:?}"))),
            }
        };
        standard.limit_ut()?;
        Ok(standard)
    }

    /// The limit in µT.
    pub fn limit_ut(&self) -> Result<f64> {
        limit_for(self)
    }
}

fn check_frequency(f: f64) -> Result<()> {
    if f.is_finite() && f > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidStandard(format!("frequency must be > 0 Hz, got {f}")))
    }
}

/// Limit of `standard` in µT.
pub fn limit_for(standard: &SafetyStandard) -> Result<f64> {
    match *standard {
        SafetyStandard::FixedLimit { limit_ut } => {
            if limit_ut.is_finite() && limit_ut > 0.0 {
                Ok(limit_ut)
            } else {
                Err(Error::InvalidStandard(format!("fixed limit must be > 0, got {limit_ut}")))
            }
        }
        SafetyStandard::IcnirpPublic { frequency_hz, unit } => {
            check_frequency(frequency_hz)?;
            Ok(5.0 / frequency_hz * unit.to_microtesla())
        }
        SafetyStandard::IcnirpOccupational { frequency_hz, unit } => {
            check_frequency(frequency_hz)?;
            Ok(25.0 / frequency_hz * unit.to_microtesla())
        }
        SafetyStandard::Tco2 => Ok(TCO2_LIMIT_UT),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    Dangerous,
    NonDangerous,
}

/// Dangerous iff `value` is strictly above `limit`.
pub fn classify_point(value: f64, limit: f64) -> PointClass {
    if value > limit {
        PointClass::Dangerous
    } else {
        PointClass::NonDangerous
    }
}

/// Severity name of a cluster, most severe first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HazardName {
    High,
    LowHigh,
    Middle,
    Safe,
    VerySafe,
    /// 1-based rank when `k != 5`.
    Rank(usize),
}

impl HazardName {
    /// Name for severity position `rank` (0 = most severe) among `k` clusters.
    pub fn for_rank(rank: usize, k: usize) -> Self {
        const FIVE: [HazardName; 5] = [
            HazardName::High,
            HazardName::LowHigh,
            HazardName::Middle,
            HazardName::Safe,
            HazardName::VerySafe,
        ];
        if k == FIVE.len() {
            FIVE[rank]
        } else {
            HazardName::Rank(rank + 1)
        }
    }
}

impl fmt::Display for HazardName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HazardName::High => f.write_str("High"),
            HazardName::LowHigh => f.write_str("LowHigh"),
            HazardName::Middle => f.write_str("Middle"),
            HazardName::Safe => f.write_str("Safe"),
            HazardName::VerySafe => f.write_str("VerySafe"),
            HazardName::Rank(r) => write!(f, "Rank{r}"),
        }
    }
}

impl Serialize for HazardName {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HazardName {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(match s.as_str() {
            "High" => HazardName::High,
            "LowHigh" => HazardName::LowHigh,
            "Middle" => HazardName::Middle,
            "Safe" => HazardName::Safe,
            "VerySafe" => HazardName::VerySafe,
            other => HazardName::Rank(
                other
                    .strip_prefix("Rank")
                    .and_then(|r| r.parse().ok())
                    .ok_or_else(|| serde::de::Error::custom(format!("unknown hazard name {other:?}")))?,
            ),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardLabel {
    pub cluster: usize,
    pub name: HazardName,
    pub dangerous: bool,
    /// The cluster straddles the limit (`min <= limit < max`); it is then marked dangerous.
    pub mixed_hazard: bool,
    pub centroid: f64,
    pub min: f64,
    pub max: f64,
    pub size: usize,
}

/// One label per cluster of `result`, in cluster (descending centroid) order.
pub fn label_clusters(result: &ClusteringResult, data: &[f64], limit: f64) -> Result<Vec<HazardLabel>> {
    if data.len() != result.assignments.len() {
        return Err(Error::InvalidInput(format!(
            "{} data values for {} assignments",
            data.len(),
            result.assignments.len()
        )));
    }
    if result.centroids.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput("centroids are not sorted descending".into()));
    }
    let k = result.k();
    result
        .clusters(data)
        .into_iter()
        .enumerate()
        .map(|(j, members)| {
            if members.is_empty() {
                return Err(Error::InvalidInput(format!("cluster {j} is empty")));
            }
            let min = members.iter().copied().fold(f64::INFINITY, f64::min);
            let max = members.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mixed_hazard = min <= limit && limit < max;
            Ok(HazardLabel {
                cluster: j,
                name: HazardName::for_rank(j, k),
                dangerous: min > limit || mixed_hazard,
                mixed_hazard,
                centroid: result.centroids[j],
                min,
                max,
                size: members.len(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneStats {
    pub point: MeasurementPoint,
    pub laptops: usize,
    pub dangerous: usize,
    pub non_dangerous: usize,
    pub peak: f64,
    pub median: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ZoneReport {
    /// Per point, in point order.
    pub points: Vec<ZoneStats>,
    /// Points by dangerous count, then peak (both descending), then point order.
    pub ranking: Vec<MeasurementPoint>,
}

impl ZoneReport {
    pub fn get(&self, point: MeasurementPoint) -> Option<&ZoneStats> {
        self.points.iter().find(|z| z.point == point)
    }
}

/// Aggregates every grid point across laptops and ranks the dangerous zones.
pub fn zone_summary(dataset: &SurveyDataset, limit: f64) -> Result<ZoneReport> {
    let mut by_point: BTreeMap<MeasurementPoint, Vec<f64>> = BTreeMap::new();
    for f in feature_vector(dataset)? {
        by_point.entry(f.point).or_default().push(f.value);
    }
    let points: Vec<ZoneStats> = by_point
        .into_iter()
        .map(|(point, mut values)| {
            values.sort_by(f64::total_cmp);
            let n = values.len();
            let dangerous = values
                .iter()
                .filter(|&&v| classify_point(v, limit) == PointClass::Dangerous)
                .count();
            let median = if n % 2 == 1 {
                values[n / 2]
            } else {
                (values[n / 2 - 1] + values[n / 2]) / 2.0
            };
            ZoneStats {
                point,
                laptops: n,
                dangerous,
                non_dangerous: n - dangerous,
                peak: values[n - 1],
                median,
            }
        })
        .collect();
    let mut ranked: Vec<&ZoneStats> = points.iter().collect();
    ranked.sort_by(|a, b| {
        b.dangerous
            .cmp(&a.dangerous)
            .then(b.peak.total_cmp(&a.peak))
            .then(a.point.cmp(&b.point))
    });
    let ranking = ranked.iter().map(|z| z.point).collect();
    Ok(ZoneReport { points, ranking })
}
