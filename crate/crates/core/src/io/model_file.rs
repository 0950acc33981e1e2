//! Plain-text wire-model and grid-geometry files.
//!
//! Wire models:
//!
//! ```text
//! # comment
//! laptop L01 screen=15.6 power=ac
//! path 0.25            # current, A
//! 0.0475 0.1725 0.016  # vertex, m
//! 0.0525 0.1725 0.016
//! ...
//! ```
//!
//! A `laptop` line opens a laptop block, each `path` line opens a path inside it, and every
//! following three-number line is a vertex of that path. A `(laptop, power)` pair may appear
//! once.
//!
//! Grid files list one `point_id x y z` line per point, meters.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{MeasurementPoint, PowerSource, Side};
use crate::sim::{GridSpec, LaptopModel, Vec3, WireModel, WireSegmentPath};

/// Laptop models grouped by power source, then laptop id.
pub type ModelSet = BTreeMap<PowerSource, BTreeMap<String, LaptopModel>>;

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn number(tok: &str, what: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(line, format!("{what}: {tok:?} is not a finite number")))
}

struct OpenPath {
    line: usize,
    current: f64,
    vertices: Vec<Vec3>,
}

struct OpenLaptop {
    id: String,
    power: PowerSource,
    screen: f64,
    paths: Vec<WireSegmentPath>,
}

fn close_path(laptop: &mut Option<OpenLaptop>, path: &mut Option<OpenPath>) -> Result<()> {
    if let Some(p) = path.take() {
        let l = laptop.as_mut().expect("paths only open inside laptops");
        let wire = WireSegmentPath::new(p.vertices, p.current).map_err(|e| match e {
            Error::InvalidInput(msg) => Error::parse(p.line, msg),
            other => other,
        })?;
        l.paths.push(wire);
    }
    Ok(())
}

fn close_laptop(models: &mut ModelSet, laptop: &mut Option<OpenLaptop>, line: usize) -> Result<()> {
    if let Some(l) = laptop.take() {
        let slot = models.entry(l.power).or_default();
        if slot.contains_key(&l.id) {
            return Err(Error::parse(
                line,
                format!("laptop {} with power {} defined twice", l.id, l.power),
            ));
        }
        slot.insert(
            l.id,
            LaptopModel {
                screen_size_in: l.screen,
                wires: WireModel::new(l.paths),
            },
        );
    }
    Ok(())
}

pub fn parse_models(text: &str) -> Result<ModelSet> {
    let mut models = ModelSet::new();
    let mut laptop: Option<OpenLaptop> = None;
    let mut laptop_line = 0;
    let mut path: Option<OpenPath> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = strip_comment(raw);
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "laptop" => {
                close_path(&mut laptop, &mut path)?;
                close_laptop(&mut models, &mut laptop, laptop_line)?;
                let id = toks
                    .get(1)
                    .ok_or_else(|| Error::parse(line, "laptop needs an id"))?
                    .to_string();
                let mut screen = None;
                let mut power = None;
                for kv in &toks[2..] {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| Error::parse(line, format!("expected key=value, got {kv:?}")))?;
                    match k {
                        "screen" => screen = Some(number(v, "screen", line)?),
                        "power" => {
                            power = Some(v.parse().map_err(|e: Error| Error::parse(line, e.to_string()))?)
                        }
                        other => return Err(Error::parse(line, format!("unknown laptop attribute {other:?}"))),
                    }
                }
                laptop = Some(OpenLaptop {
                    id,
                    power: power.ok_or_else(|| Error::parse(line, "laptop needs power=ac|battery"))?,
                    screen: screen.ok_or_else(|| Error::parse(line, "laptop needs screen=<inches>"))?,
                    paths: Vec::new(),
                });
                laptop_line = line;
            }
            "path" => {
                if laptop.is_none() {
                    return Err(Error::parse(line, "path outside a laptop block"));
                }
                close_path(&mut laptop, &mut path)?;
                if toks.len() != 2 {
                    return Err(Error::parse(line, "path takes exactly one value: current in A"));
                }
                path = Some(OpenPath {
                    line,
                    current: number(toks[1], "current", line)?,
                    vertices: Vec::new(),
                });
            }
            _ => {
                let p = path
                    .as_mut()
                    .ok_or_else(|| Error::parse(line, format!("unexpected {:?} outside a path", toks[0])))?;
                if toks.len() != 3 {
                    return Err(Error::parse(line, format!("vertex needs 3 coordinates, got {}", toks.len())));
                }
                p.vertices.push(Vec3::new(
                    number(toks[0], "x", line)?,
                    number(toks[1], "y", line)?,
                    number(toks[2], "z", line)?,
                ));
            }
        }
    }
    close_path(&mut laptop, &mut path)?;
    close_laptop(&mut models, &mut laptop, laptop_line)?;
    Ok(models)
}

pub fn read_models(path: &Path) -> Result<ModelSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_models(&text).map_err(|e| e.with_file(path))
}

/// Serialises models with shortest round-trip decimals, so parsing the output reproduces
/// them exactly.
pub fn format_models(models: &ModelSet) -> String {
    let mut out = String::from("# elfscan wire models: currents in A, vertices in m\n");
    for (power, laptops) in models {
        for (id, m) in laptops {
            let _ = writeln!(
                out,
                "laptop {id} screen={} power={}",
                m.screen_size_in,
                power.as_str().to_ascii_lowercase()
            );
            for p in &m.wires.paths {
                let _ = writeln!(out, "path {}", p.current());
                for v in p.vertices() {
                    let _ = writeln!(out, "{} {} {}", v.x, v.y, v.z);
                }
            }
        }
    }
    out
}

/// Parses grid coordinates. Returns one spec per side present, each with all nine points.
pub fn parse_grid(text: &str) -> Result<Vec<GridSpec>> {
    let mut sides: BTreeMap<Side, BTreeMap<MeasurementPoint, Vec3>> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = strip_comment(raw);
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(Error::parse(line, "expected: point_id x y z"));
        }
        let point: MeasurementPoint = toks[0]
            .parse()
            .map_err(|e: Error| Error::parse(line, e.to_string()))?;
        let pos = Vec3::new(
            number(toks[1], "x", line)?,
            number(toks[2], "y", line)?,
            number(toks[3], "z", line)?,
        );
        if sides.entry(point.side()).or_default().insert(point, pos).is_some() {
            return Err(Error::parse(line, format!("{point} listed twice")));
        }
    }
    sides
        .into_iter()
        .map(|(side, positions)| GridSpec::new(side, positions))
        .collect()
}

pub fn read_grid(path: &Path) -> Result<Vec<GridSpec>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_grid(&text).map_err(|e| e.with_file(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::fixtures;

    const SMALL: &str = "\
# two laptops
laptop A screen=14 power=ac
path 1.5
0 0 0
0.1 0 0
0.1 0.1 0   # corner
path -0.5
0 0 0.01
0 0.1 0.01

laptop A screen=14 power=battery
path 0.2
0 0 0
1 0 0
";

    #[test]
    fn parses_blocks() {
        let m = parse_models(SMALL).unwrap();
        let ac = &m[&PowerSource::Ac]["A"];
        assert_eq!(ac.wires.paths.len(), 2);
        assert_eq!(ac.wires.paths[0].vertices().len(), 3);
        assert_eq!(ac.wires.paths[1].current(), -0.5);
        assert_eq!(m[&PowerSource::Battery]["A"].wires.paths.len(), 1);
    }

    #[test]
    fn fixture_round_trips_exactly() {
        let mut set = ModelSet::new();
        set.insert(PowerSource::Ac, fixtures::fixture_laptops(PowerSource::Ac));
        let text = format_models(&set);
        assert_eq!(parse_models(&text).unwrap(), set);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("path 1\n0 0 0\n", 1),
            ("laptop A screen=14 power=ac\n0 0 0\n", 2),
            ("laptop A screen=14 power=ac\npath 1\n0 0\n", 3),
            ("laptop A screen=14 power=ac\npath 1\n0 0 0\n", 2),
            ("laptop A screen=14 power=ac\npath x\n", 2),
            ("laptop A screen=14\n", 1),
            ("laptop A screen=14 power=dc\n", 1),
            ("laptop A screen=14 power=ac\npath 1\n0 0 0\n0 0 0\n", 2),
            ("laptop A screen=14 power=ac\nlaptop A screen=14 power=ac\n", 2),
        ];
        for (text, line) in cases {
            let err = parse_models(text).unwrap_err();
            assert!(matches!(err, Error::Parse { line: l, .. } if l == line), "{text:?}: {err}");
        }
    }

    #[test]
    fn grid_file() {
        let mut text = String::new();
        for p in Side::TopBody.points() {
            text.push_str(&format!("{p} 0.{} 0.1 0.03\n", p.index()));
        }
        let grids = parse_grid(&text).unwrap();
        assert_eq!(grids.len(), 1);
        assert_eq!(grids[0].side(), Side::TopBody);
        assert!(parse_grid("tbmp1 0 0 0\n").is_err());
        assert!(matches!(parse_grid("tbmp1 0 0\n"), Err(Error::Parse { line: 1, .. })));
    }
}
