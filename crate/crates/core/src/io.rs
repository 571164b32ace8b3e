//! Text formats: spectrum CSV, point/labeled-data CSV and dictionary snapshots.
//!
//! Spectrum CSV holds one eigenvalue per row in descending order, optionally
//! preceded by a `# tail=<value>` line.
//!
//! Dictionary snapshots are a member CSV (`x1,…,xd` header) plus a JSON
//! sidecar with the kernel, `alpha` and `log_det`. Loading replays the
//! members through [`Dictionary::offer`], which rebuilds the factor exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, Point};
use crate::logvalue::LogValue;
use crate::sparsifier::Dictionary;
use crate::symfun::Spectrum;

pub fn parse_spectrum_csv(text: &str) -> Result<Spectrum> {
    let mut tail = 0.0;
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("tail=") {
                tail = v.trim().parse().map_err(|_| Error::parse(lineno, format!("bad tail value '{v}'")))?;
            }
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::parse(lineno, format!("expected a number, got '{line}'")))?;
        if let Some(prev) = values.last() {
            if v > *prev {
                return Err(Error::parse(lineno, "eigenvalues must be descending"));
            }
        }
        values.push(v);
    }
    Spectrum::new(values, tail)
}

pub fn spectrum_to_csv(spec: &Spectrum) -> String {
    let mut out = format!("# tail={}\n", spec.declared_tail());
    for v in spec.values() {
        out.push_str(&format!("{v}\n"));
    }
    out
}

pub fn read_spectrum(path: &Path) -> Result<Spectrum> {
    parse_spectrum_csv(&std::fs::read_to_string(path)?)
}

/// Where a spectrum comes from on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSource {
    Geometric(f64),
    Polynomial(f64),
    Explicit(Vec<f64>),
    File(std::path::PathBuf),
}

impl SpectrumSource {
    /// `geometric:<σ>`, `polynomial:<p>`, `explicit:<v1>,<v2>,…`, or a CSV path.
    pub fn parse(text: &str) -> Result<Self> {
        let num = |v: &str| {
            v.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad number '{v}' in spectrum '{text}'")))
        };
        Ok(match text.split_once(':') {
            Some(("geometric", v)) => SpectrumSource::Geometric(num(v)?),
            Some(("polynomial", v)) => SpectrumSource::Polynomial(num(v)?),
            Some(("explicit", v)) => SpectrumSource::Explicit(v.split(',').map(num).collect::<Result<_>>()?),
            _ => SpectrumSource::File(text.into()),
        })
    }

    /// Materializes the spectrum; decay laws are truncated at `size` terms.
    pub fn load(&self, size: usize) -> Result<Spectrum> {
        use crate::spectrum::{synthetic_spectrum, SyntheticKind};
        match self {
            SpectrumSource::Geometric(sigma) => synthetic_spectrum(&SyntheticKind::Geometric { sigma: *sigma }, size),
            SpectrumSource::Polynomial(p) => synthetic_spectrum(&SyntheticKind::Polynomial { p: *p }, size),
            SpectrumSource::Explicit(v) => Spectrum::finite(v.clone()),
            SpectrumSource::File(path) => read_spectrum(path),
        }
    }
}

/// Feature rows and optional `y` column from a CSV with a header row. If
/// the last header is `y` it is split off as the target.
#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<String>,
    pub points: Vec<Point>,
    pub targets: Option<Vec<f64>>,
}

pub fn parse_table(text: &str) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let labeled = headers.last().map(|h| h == "y").unwrap_or(false);
    let n_features = headers.len() - usize::from(labeled);
    if n_features == 0 {
        return Err(Error::parse(1, "no feature columns"));
    }
    let mut points = Vec::new();
    let mut targets = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let lineno = i + 2;
        if rec.len() != headers.len() {
            return Err(Error::parse(lineno, format!("expected {} fields, got {}", headers.len(), rec.len())));
        }
        let nums: Vec<f64> = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::parse(lineno, format!("bad number '{f}'"))))
            .collect::<Result<_>>()?;
        let point = Point::new(nums[..n_features].to_vec()).map_err(|e| Error::parse(lineno, e.to_string()))?;
        points.push(point);
        if labeled {
            targets.push(nums[n_features]);
        }
    }
    Ok(Table { headers, points, targets: labeled.then_some(targets) })
}

pub fn read_table(path: &Path) -> Result<Table> {
    parse_table(&std::fs::read_to_string(path)?)
}

/// Points as CSV with an `x1,…,xd` header.
pub fn points_to_csv(points: &[Point]) -> String {
    let dim = points.first().map(Point::dim).unwrap_or(0);
    let header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    let mut out = header.join(",");
    out.push('\n');
    for p in points {
        let row: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DictionarySidecar {
    pub kernel: String,
    pub alpha: f64,
    pub size: usize,
    /// `null` never occurs for a valid dictionary; kept nullable for the zero state.
    pub log_det: Option<f64>,
}

/// Writes `<stem>.csv` and `<stem>.json`.
pub fn save_dictionary(dict: &Dictionary, csv_path: &Path, json_path: &Path) -> Result<()> {
    std::fs::write(csv_path, points_to_csv(dict.members()))?;
    let log_det = match dict.log_det() {
        LogValue::Zero => None,
        LogValue::Finite(l) => Some(l),
    };
    let side = DictionarySidecar { kernel: dict.kernel().to_string(), alpha: dict.alpha(), size: dict.len(), log_det };
    std::fs::write(json_path, serde_json::to_string_pretty(&side)? + "\n")?;
    Ok(())
}

pub fn load_dictionary(csv_path: &Path, json_path: &Path) -> Result<Dictionary> {
    let side: DictionarySidecar = serde_json::from_str(&std::fs::read_to_string(json_path)?)?;
    let kernel: KernelSpec = side.kernel.parse()?;
    let table = read_table(csv_path)?;
    let mut dict = Dictionary::new(kernel, side.alpha)?;
    for (i, p) in table.points.iter().enumerate() {
        if !dict.offer(p)?.admitted {
            return Err(Error::parse(i + 2, "snapshot member is not admissible in replay"));
        }
    }
    if dict.len() != side.size {
        return Err(Error::invalid(format!("snapshot declares {} members, found {}", side.size, dict.len())));
    }
    Ok(dict)
}
