//! File formats: packings as CSV with a JSON sidecar, count series and ratio
//! series as CSV, fits and comparisons as JSON, measure grids as a CSV matrix
//! with a JSON header.
//!
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back reproduces every number bit for bit.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::counting::{CountMode, CountSeries, RatioSeries};
use crate::measures::{GridSpec, MeasureGrid};
use crate::moebius::{CircleGeometry, GeneralizedCircle};
use crate::packing::{EnumerationStats, PackedCircle, Packing, PackingSpec};
use crate::{Error, Result};

pub const PACKING_HEADER: [&str; 9] = ["kind", "curvature", "cx", "cy", "nx", "ny", "offset", "word_len", "parent"];

/// Metadata written next to a packing CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackingMeta {
    pub t_bound: f64,
    pub circles: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<PackingSpec>,
    #[serde(default)]
    pub stats: EnumerationStats,
}

/// `packing.csv` → `packing.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_packing_csv<W: Write>(packing: &Packing, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PACKING_HEADER)?;
    for entry in packing.iter() {
        let word_len = entry.word_len.to_string();
        let parent = entry.parent.map(|p| p.to_string()).unwrap_or_default();
        match entry.shape {
            CircleGeometry::Circle {
                center,
                signed_curvature,
                ..
            } => w.write_record([
                "circle",
                &signed_curvature.to_string(),
                &center.re.to_string(),
                &center.im.to_string(),
                "",
                "",
                "",
                &word_len,
                &parent,
            ])?,
            CircleGeometry::Line { normal, offset } => w.write_record([
                "line",
                "0",
                "",
                "",
                &normal.re.to_string(),
                &normal.im.to_string(),
                &offset.to_string(),
                &word_len,
                &parent,
            ])?,
        }
    }
    w.flush()?;
    Ok(())
}

fn field(record: &csv::StringRecord, i: usize, line: usize) -> Result<&str> {
    record.get(i).ok_or_else(|| Error::Parse {
        line,
        message: format!("missing column {}", PACKING_HEADER[i]),
    })
}

fn number(record: &csv::StringRecord, i: usize, line: usize) -> Result<f64> {
    let text = field(record, i, line)?;
    text.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("column {}: {text:?} is not a number", PACKING_HEADER[i]),
    })
}

fn parse_row(record: &csv::StringRecord, line: usize) -> Result<PackedCircle> {
    let word_len = field(record, 7, line)?.trim().parse::<u32>().map_err(|_| Error::Parse {
        line,
        message: "word_len must be a nonnegative integer".into(),
    })?;
    let parent_text = field(record, 8, line)?.trim();
    let parent = if parent_text.is_empty() {
        None
    } else {
        Some(parent_text.parse::<u32>().map_err(|_| Error::Parse {
            line,
            message: format!("parent {parent_text:?} is not an index"),
        })?)
    };
    let bad = |e: Error| Error::Parse {
        line,
        message: e.to_string(),
    };
    let (circle, shape) = match field(record, 0, line)?.trim() {
        "circle" => {
            let k = number(record, 1, line)?;
            let center = Complex64::new(number(record, 2, line)?, number(record, 3, line)?);
            let circle = GeneralizedCircle::from_curvature_center(k, center).map_err(bad)?;
            let shape = CircleGeometry::Circle {
                center,
                radius: 1.0 / k.abs(),
                signed_curvature: k,
            };
            (circle, shape)
        }
        "line" => {
            let normal = Complex64::new(number(record, 4, line)?, number(record, 5, line)?);
            let offset = number(record, 6, line)?;
            let circle = GeneralizedCircle::line(normal, offset).map_err(bad)?;
            (circle, CircleGeometry::Line { normal, offset })
        }
        other => {
            return Err(Error::Parse {
                line,
                message: format!("unknown kind {other:?}"),
            })
        }
    };
    Ok(PackedCircle {
        circle,
        shape,
        word_len,
        parent,
    })
}

/// Reads packing rows; `t_bound` is recorded as the enumeration bound.
pub fn read_packing_csv<R: Read>(input: R, t_bound: f64) -> Result<Packing> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().map(str::trim).ne(PACKING_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {}", PACKING_HEADER.join(",")),
        });
    }
    let mut entries = Vec::new();
    for (i, record) in r.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        entries.push(parse_row(&record, line)?);
    }
    Packing::from_entries(entries, t_bound)
}

/// Writes `path` and its JSON sidecar.
pub fn save_packing(packing: &Packing, path: &Path) -> Result<()> {
    write_packing_csv(packing, BufWriter::new(File::create(path)?))?;
    let meta = PackingMeta {
        t_bound: packing.t_bound(),
        circles: packing.len(),
        source: packing.source().cloned(),
        stats: packing.stats.clone(),
    };
    write_json(&meta, &sidecar_path(path))
}

/// Reads a packing CSV together with its sidecar.
pub fn load_packing(path: &Path) -> Result<Packing> {
    let meta_path = sidecar_path(path);
    let meta: PackingMeta = serde_json::from_reader(BufReader::new(File::open(&meta_path).map_err(|e| {
        Error::invalid(format!("cannot open sidecar {}: {e}", meta_path.display()))
    })?))?;
    let mut packing = read_packing_csv(BufReader::new(File::open(path)?), meta.t_bound)?;
    if packing.len() != meta.circles {
        return Err(Error::invalid(format!(
            "{} lists {} circles but the CSV has {}",
            meta_path.display(),
            meta.circles,
            packing.len()
        )));
    }
    packing.stats = meta.stats;
    if let Some(spec) = meta.source {
        packing.set_source(spec);
    }
    Ok(packing)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

pub fn write_series_csv<W: Write>(series: &CountSeries, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["T", "N"])?;
    for (t, n) in series.t.iter().zip(&series.n) {
        w.write_record([t.to_string(), n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a `T,N` series; the mode is not stored in the file.
pub fn read_series_csv<R: Read>(input: R, mode: CountMode) -> Result<CountSeries> {
    let mut r = csv::Reader::from_reader(input);
    let (mut t, mut n) = (Vec::new(), Vec::new());
    for (i, record) in r.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let parse_err = |what: &str| Error::Parse {
            line,
            message: format!("bad {what}"),
        };
        t.push(record.get(0).and_then(|s| s.trim().parse::<f64>().ok()).ok_or_else(|| parse_err("T"))?);
        let count = record.get(1).map(str::trim).ok_or_else(|| parse_err("N"))?;
        // accept integral floats such as `1200.0` from other tools
        let value = count
            .parse::<u64>()
            .ok()
            .or_else(|| count.parse::<f64>().ok().filter(|x| *x >= 0.0 && x.fract() == 0.0).map(|x| x as u64))
            .ok_or_else(|| parse_err("N"))?;
        n.push(value);
    }
    CountSeries::new(t, n, mode, None)
}

/// `T,ratio`; undefined ratios are written as `NaN`.
pub fn write_ratio_csv<W: Write>(series: &RatioSeries, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["T", "ratio"])?;
    for p in &series.points {
        w.write_record([p.t.to_string(), p.ratio.unwrap_or(f64::NAN).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Header written next to a measure grid matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridHeader {
    pub window: GridSpec,
    pub normalized: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_mass: Option<f64>,
    /// Always `"bottom_to_top"`: the first CSV row is the lowest row of cells.
    pub row_order: String,
}

/// One CSV row per grid row (lowest `y` first), `nx` values per row.
pub fn write_grid_csv<W: Write>(grid: &MeasureGrid, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for row in grid.weights.chunks(grid.spec.nx) {
        w.write_record(row.iter().map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid_csv<R: Read>(input: R, header: &GridHeader) -> Result<MeasureGrid> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
    let mut weights = Vec::with_capacity(header.window.cells());
    for (i, record) in r.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.len() != header.window.nx {
            return Err(Error::GridMismatch(format!(
                "row {line} has {} cells, expected {}",
                record.len(),
                header.window.nx
            )));
        }
        for value in record.iter() {
            weights.push(value.trim().parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("{value:?} is not a number"),
            })?);
        }
    }
    let mut grid = MeasureGrid::new(header.window, weights)?;
    grid.normalized = header.normalized;
    grid.raw_mass = header.raw_mass;
    Ok(grid)
}

/// Writes `path` (CSV matrix) and `path` with a `.json` extension (header).
pub fn save_grid(grid: &MeasureGrid, path: &Path) -> Result<()> {
    write_grid_csv(grid, BufWriter::new(File::create(path)?))?;
    let header = GridHeader {
        window: grid.spec,
        normalized: grid.normalized,
        raw_mass: grid.raw_mass,
        row_order: "bottom_to_top".into(),
    };
    write_json(&header, &path.with_extension("json"))
}

pub fn load_grid(path: &Path) -> Result<MeasureGrid> {
    let header: GridHeader = read_json(&path.with_extension("json"))?;
    read_grid_csv(BufReader::new(File::open(path)?), &header)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::{apollonian_enumerate, DescartesQuadruple};

    #[test]
    fn packing_csv_round_trip_is_exact() {
        let mut p = apollonian_enumerate(&DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0]).unwrap(), 200.0).unwrap();
        p.insert(GeneralizedCircle::line(Complex64::new(0.3, -0.7), 12.5).unwrap(), 1, None);
        let mut buf = Vec::new();
        write_packing_csv(&p, &mut buf).unwrap();
        let q = read_packing_csv(buf.as_slice(), p.t_bound()).unwrap();
        assert_eq!(q.len(), p.len());
        for (a, b) in p.iter().zip(q.iter()) {
            assert_eq!(a.shape, b.shape);
            assert_eq!((a.word_len, a.parent), (b.word_len, b.parent));
        }
        let mut again = Vec::new();
        write_packing_csv(&q, &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "kind,curvature,cx,cy,nx,ny,offset,word_len,parent\ncircle,2,0.5,0,,,,0,\ncircle,x,0,0,,,,1,\n";
        match read_packing_csv(text.as_bytes(), 10.0) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let dup = "kind,curvature,cx,cy,nx,ny,offset,word_len,parent\ncircle,2,0.5,0,,,,0,\ncircle,2,0.5,0,,,,0,\n";
        assert!(matches!(read_packing_csv(dup.as_bytes(), 10.0), Err(Error::Parse { line: 3, .. })));
        assert!(read_packing_csv("a,b\n".as_bytes(), 10.0).is_err());
    }

    #[test]
    fn series_round_trip() {
        let s = CountSeries::new(vec![1.5, 3.0, 6.0], vec![0, 4, 9], CountMode::Meets, None).unwrap();
        let mut buf = Vec::new();
        write_series_csv(&s, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "T,N\n1.5,0\n3,4\n6,9\n");
        assert_eq!(read_series_csv(buf.as_slice(), CountMode::Meets).unwrap(), s);
    }

    #[test]
    fn grid_round_trip() {
        let spec = GridSpec::new(Complex64::new(0.0, 0.0), Complex64::new(3.0, 2.0), 3, 2).unwrap();
        let g = MeasureGrid::new(spec, vec![0.1, 0.2, 0.3, 0.15, 0.05, 0.2]).unwrap();
        let dir = std::env::temp_dir().join(format!("circles-grid-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("g.csv");
        save_grid(&g, &path).unwrap();
        assert_eq!(load_grid(&path).unwrap(), g);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
