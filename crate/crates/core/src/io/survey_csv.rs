//! Survey CSV reading and writing.
//!
//! Canonical header:
//!
//! ```text
//! laptop_id,screen_size_in,power_source,side,point_id,bx_uT,by_uT,bz_uT,b_rms_uT
//! ```
//!
//! Each row fills either the three component columns or `b_rms_*`, never both. Field
//! columns may carry `_uT`, `_µT`, `_nT` or `_mT` suffixes; alternatively bare `bx`, `by`,
//! `bz`, `b_rms` columns are read in the unit named by a per-row `unit` column. All values
//! are converted to µT on ingest.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{
    validate_dataset, Condition, FieldSample, MeasurementPoint, PowerSource, Reading, Side,
    SurveyDataset, SurveyRecord, ValidationReport,
};

pub const CANONICAL_HEADER: [&str; 9] = [
    "laptop_id",
    "screen_size_in",
    "power_source",
    "side",
    "point_id",
    "bx_uT",
    "by_uT",
    "bz_uT",
    "b_rms_uT",
];

/// One experiment cell read from a file, with its validation findings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestedCell {
    pub dataset: SurveyDataset,
    pub validation: ValidationReport,
}

fn unit_factor(unit: &str) -> Option<f64> {
    match unit {
        "uT" | "µT" | "ut" | "microtesla" => Some(1.0),
        "nT" | "nt" | "nanotesla" => Some(1.0e-3),
        "mT" | "mt" | "millitesla" => Some(1.0e3),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Scale {
    Fixed(f64),
    /// Read from the row's `unit` column.
    PerRow,
}

#[derive(Debug, Clone, Copy)]
struct FieldColumn {
    index: usize,
    scale: Scale,
}

struct Layout {
    laptop_id: usize,
    screen_size: usize,
    power_source: usize,
    side: usize,
    point_id: usize,
    unit: Option<usize>,
    bx: Option<FieldColumn>,
    by: Option<FieldColumn>,
    bz: Option<FieldColumn>,
    rms: Option<FieldColumn>,
}

impl Layout {
    fn from_header(header: &csv::StringRecord) -> Result<Self> {
        let find = |name: &str| header.iter().position(|h| h.trim() == name);
        let require = |name: &str| find(name).ok_or_else(|| Error::parse(1, format!("missing column {name:?}")));
        let unit = find("unit");

        let mut fields: BTreeMap<&str, FieldColumn> = BTreeMap::new();
        for (index, raw) in header.iter().enumerate() {
            let h = raw.trim();
            for base in ["b_rms", "bx", "by", "bz"] {
                let scale = if h == base {
                    if unit.is_none() {
                        return Err(Error::parse(1, format!("column {h:?} has no unit suffix and there is no unit column")));
                    }
                    Scale::PerRow
                } else if let Some(suffix) = h.strip_prefix(base).and_then(|s| s.strip_prefix('_')) {
                    match unit_factor(suffix) {
                        Some(f) => Scale::Fixed(f),
                        None => {
                            return Err(Error::Unit {
                                line: 1,
                                unit: suffix.to_string(),
                            })
                        }
                    }
                } else {
                    continue;
                };
                if fields.insert(base, FieldColumn { index, scale }).is_some() {
                    return Err(Error::parse(1, format!("more than one {base} column")));
                }
                break;
            }
        }
        let layout = Layout {
            laptop_id: require("laptop_id")?,
            screen_size: require("screen_size_in")?,
            power_source: require("power_source")?,
            side: require("side")?,
            point_id: require("point_id")?,
            unit,
            bx: fields.get("bx").copied(),
            by: fields.get("by").copied(),
            bz: fields.get("bz").copied(),
            rms: fields.get("b_rms").copied(),
        };
        let trio = [layout.bx, layout.by, layout.bz].iter().filter(|c| c.is_some()).count();
        if trio != 0 && trio != 3 {
            return Err(Error::parse(1, "component columns bx, by, bz must appear together"));
        }
        if trio == 0 && layout.rms.is_none() {
            return Err(Error::parse(1, "no field columns (bx/by/bz or b_rms)"));
        }
        Ok(layout)
    }
}

fn cell(row: &csv::StringRecord, index: usize) -> &str {
    row.get(index).map(str::trim).unwrap_or("")
}

fn parse_number(s: &str, name: &str, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::parse(line, format!("{name}: cannot parse {s:?} as a number")))
}

fn read_field(row: &csv::StringRecord, col: Option<FieldColumn>, row_scale: Option<f64>, name: &str, line: usize) -> Result<Option<f64>> {
    let Some(col) = col else { return Ok(None) };
    let raw = cell(row, col.index);
    if raw.is_empty() {
        return Ok(None);
    }
    let v = parse_number(raw, name, line)?;
    let scale = match col.scale {
        Scale::Fixed(f) => f,
        Scale::PerRow => row_scale.ok_or_else(|| Error::parse(line, "empty unit"))?,
    };
    Ok(Some(v * scale))
}

fn parse_row(row: &csv::StringRecord, layout: &Layout, line: usize) -> Result<(Side, SurveyRecord)> {
    let laptop_id = cell(row, layout.laptop_id);
    if laptop_id.is_empty() {
        return Err(Error::parse(line, "empty laptop_id"));
    }
    let screen_size_in = parse_number(cell(row, layout.screen_size), "screen_size_in", line)?;
    let power_source: PowerSource = cell(row, layout.power_source)
        .parse()
        .map_err(|e: Error| Error::parse(line, e.to_string()))?;
    let side: Side = cell(row, layout.side)
        .parse()
        .map_err(|e: Error| Error::parse(line, e.to_string()))?;
    let point: MeasurementPoint = cell(row, layout.point_id)
        .parse()
        .map_err(|e: Error| Error::parse(line, e.to_string()))?;

    let row_scale = match layout.unit {
        Some(i) if !cell(row, i).is_empty() => {
            let u = cell(row, i);
            Some(unit_factor(u).ok_or_else(|| Error::Unit {
                line,
                unit: u.to_string(),
            })?)
        }
        _ => None,
    };

    let bx = read_field(row, layout.bx, row_scale, "bx", line)?;
    let by = read_field(row, layout.by, row_scale, "by", line)?;
    let bz = read_field(row, layout.bz, row_scale, "bz", line)?;
    let rms = read_field(row, layout.rms, row_scale, "b_rms", line)?;
    let reading = match (bx, by, bz, rms) {
        (Some(bx), Some(by), Some(bz), None) => Reading::Components(FieldSample::new(bx, by, bz)),
        (None, None, None, Some(v)) => Reading::Rms(v),
        (None, None, None, None) => return Err(Error::parse(line, "row has neither components nor b_rms")),
        (_, _, _, Some(_)) if bx.is_some() || by.is_some() || bz.is_some() => {
            return Err(Error::parse(line, "row has both components and b_rms"))
        }
        _ => return Err(Error::parse(line, "incomplete component trio")),
    };

    Ok((
        side,
        SurveyRecord {
            laptop_id: laptop_id.to_string(),
            screen_size_in,
            power_source,
            point,
            reading,
        },
    ))
}

/// Reads survey rows and groups them into experiment cells, in report order.
pub fn read_survey<R: Read>(reader: R) -> Result<Vec<IngestedCell>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if header.iter().all(|h| h.trim().is_empty()) {
        return Ok(Vec::new());
    }
    let layout = Layout::from_header(&header)?;

    let mut cells: BTreeMap<Condition, Vec<SurveyRecord>> = BTreeMap::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let (side, record) = parse_row(&row, &layout, line)?;
        cells
            .entry(Condition::new(side, record.power_source))
            .or_default()
            .push(record);
    }
    Ok(cells
        .into_iter()
        .map(|(condition, records)| {
            let dataset = SurveyDataset::with_records(condition, records);
            let validation = validate_dataset(&dataset);
            IngestedCell { dataset, validation }
        })
        .collect())
}

/// Reads a survey file. A file without data rows is an error.
pub fn ingest_csv(path: &Path) -> Result<Vec<IngestedCell>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let cells = read_survey(file).map_err(|e| e.with_file(path))?;
    if cells.is_empty() {
        return Err(Error::EmptyInput(path.to_path_buf()));
    }
    Ok(cells)
}

/// Writes datasets in the canonical column layout, µT, shortest round-trip decimals.
pub fn write_survey<W: Write>(writer: W, datasets: &[SurveyDataset]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let csv_err = |e: csv::Error| Error::InvalidInput(format!("csv write: {e}"));
    w.write_record(CANONICAL_HEADER).map_err(csv_err)?;
    for ds in datasets {
        for r in &ds.records {
            let (bx, by, bz, rms) = match r.reading {
                Reading::Components(s) => (s.bx.to_string(), s.by.to_string(), s.bz.to_string(), String::new()),
                Reading::Rms(v) => (String::new(), String::new(), String::new(), v.to_string()),
            };
            w.write_record([
                r.laptop_id.as_str(),
                &r.screen_size_in.to_string(),
                r.power_source.as_str(),
                ds.condition.side.short_name(),
                &r.point.to_string(),
                &bx,
                &by,
                &bz,
                &rms,
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("csv write: {e}")))?;
    Ok(())
}
