//! End-to-end analysis: survey cells in, versioned JSON report out.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{feature_vector, validate_dataset, Condition, MeasurementPoint, SurveyDataset, ValidationReport};
use crate::hazard::{label_clusters, limit_for, zone_summary, HazardLabel, SafetyStandard, ZoneReport};
use crate::io::{ingest_csv, IngestedCell};
use crate::kmedians::{run_kmedians, ClusteringParams, ClusteringResult, InitStrategy};

/// Bumped whenever the report layout changes incompatibly.
pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_K: usize = 5;
pub const DEFAULT_RESTARTS: usize = 5;
pub const DEFAULT_FREQUENCY_HZ: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub k: usize,
    pub standard: SafetyStandard,
    pub init: InitStrategy,
    pub restarts: usize,
    pub max_iterations: usize,
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
    #[serde(skip)]
    pub plots: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let params = ClusteringParams::default();
        Self {
            inputs: Vec::new(),
            k: DEFAULT_K,
            standard: SafetyStandard::default(),
            init: InitStrategy::QuantileSeed,
            restarts: DEFAULT_RESTARTS,
            max_iterations: params.max_iterations,
            out_dir: None,
            plots: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<f64> {
        if self.k == 0 {
            return Err(Error::InvalidInput("k must be >= 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidInput("restarts must be >= 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be >= 1".into()));
        }
        limit_for(&self.standard)
    }

    pub fn clustering_params(&self) -> ClusteringParams {
        ClusteringParams {
            k: self.k,
            max_iterations: self.max_iterations,
            init: self.init,
            restarts: self.restarts,
            ..ClusteringParams::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Failed,
}

/// One feature with the cluster it landed in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteredFeature {
    pub laptop_id: String,
    pub point: MeasurementPoint,
    pub value: f64,
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub condition: Condition,
    pub status: CellStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub validation: ValidationReport,
    pub features: Vec<ClusteredFeature>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub clustering: Option<ClusteringResult>,
    pub labels: Vec<HazardLabel>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub zones: Option<ZoneReport>,
}

impl CellReport {
    pub fn is_ok(&self) -> bool {
        self.status == CellStatus::Ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub config: RunConfig,
    pub limit_ut: f64,
    /// Cells present in the input, in `Condition::ALL` order.
    pub cells: Vec<CellReport>,
}

impl AnalysisReport {
    pub fn cell(&self, condition: Condition) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.condition == condition)
    }

    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| !c.is_ok()).count()
    }

    /// Pretty JSON with a trailing newline; identical reports give identical bytes.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

fn failed(condition: Condition, validation: ValidationReport, error: String) -> CellReport {
    CellReport {
        condition,
        status: CellStatus::Failed,
        error: Some(error),
        validation,
        features: Vec::new(),
        clustering: None,
        labels: Vec::new(),
        zones: None,
    }
}

/// Clusters and labels one cell. Errors become a failed cell, never a failed run.
pub fn analyze_cell(dataset: &SurveyDataset, validation: ValidationReport, params: &ClusteringParams, limit: f64) -> CellReport {
    let condition = dataset.condition;
    if !validation.is_valid() {
        let msg = format!("{} validation violation(s), first: {:?}", validation.violations.len(), validation.violations[0]);
        return failed(condition, validation, msg);
    }
    let run = || -> Result<CellReport> {
        let features = feature_vector(dataset)?;
        let values: Vec<f64> = features.iter().map(|f| f.value).collect();
        let clustering = run_kmedians(&values, params)?;
        let labels = label_clusters(&clustering, &values, limit)?;
        let zones = zone_summary(dataset, limit)?;
        let features = features
            .into_iter()
            .zip(&clustering.assignments)
            .map(|(f, &cluster)| ClusteredFeature {
                laptop_id: f.laptop_id,
                point: f.point,
                value: f.value,
                cluster,
            })
            .collect();
        Ok(CellReport {
            condition,
            status: CellStatus::Ok,
            error: None,
            validation: validation.clone(),
            features,
            clustering: Some(clustering),
            labels,
            zones: Some(zones),
        })
    };
    run().unwrap_or_else(|e| failed(condition, validation.clone(), e.to_string()))
}

/// Analyses already-ingested cells. Cells are processed concurrently and assembled in
/// report order.
pub fn analyze_cells(cells: Vec<IngestedCell>, config: &RunConfig) -> Result<AnalysisReport> {
    let limit = config.validate()?;
    let params = config.clustering_params();

    let mut merged: BTreeMap<Condition, SurveyDataset> = BTreeMap::new();
    for cell in cells {
        merged
            .entry(cell.dataset.condition)
            .or_insert_with(|| SurveyDataset::new(cell.dataset.condition))
            .records
            .extend(cell.dataset.records);
    }

    let reports: Vec<CellReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = merged
            .values()
            .map(|ds| {
                let params = &params;
                scope.spawn(move || analyze_cell(ds, validate_dataset(ds), params, limit))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("cell analysis panicked"))
            .collect()
    });

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME").to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        limit_ut: limit,
        cells: reports,
    })
}

/// Ingests every input file and analyses the resulting cells.
pub fn analyze(config: &RunConfig) -> Result<AnalysisReport> {
    config.validate()?;
    if config.inputs.is_empty() {
        return Err(Error::InvalidInput("no input files".into()));
    }
    let mut cells = Vec::new();
    for path in &config.inputs {
        cells.extend(ingest_csv(path)?);
    }
    analyze_cells(cells, config)
}

/// Writes `report.json` into `dir`, creating it if needed.
pub fn write_report(report: &AnalysisReport, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("report.json");
    std::fs::write(&path, report.to_json()?).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
