//! Descriptor files, the persistent Bessel-zero cache, and JSON/CSV output.

use crate::geometry::{EdgeDescriptor, GeometryError, LinkSpectrum, OperatorDescriptor};
use crate::heat::TraceSample;
use crate::index::{fmt_rational, Rational};
use crate::special::{bessel_j_zero, SpecialError};
use crate::spectra::{
    circle_dirac_spectrum, cone_eigenvalues, link_modes, rational_to_f64, sphere_dirac_spectrum,
    spin_cone_nu_exact, unit_disk_spectrum, LatticeForm, SpecEntry, SpectraError, Spectrum,
    SpinSign, TailModel, ZeroSource,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::RwLock;
use thiserror::Error;

pub const DESCRIPTOR_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "EDGE_ETA_CACHE";
const CACHE_FILE: &str = "bessel_zeros.tsv";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("descriptor version {0} is not supported (expected {DESCRIPTOR_VERSION})")]
    UnsupportedVersion(u32),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

impl IoError {
    /// Whether the failure lies in the user's input rather than the
    /// environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, IoError::Read { .. } | IoError::Write { .. })
    }
}

/// Where a spectrum comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumSource {
    /// `−i d/dθ + a` on the unit circle.
    Circle { a: f64 },
    /// The Dirac operator of the round sphere `S^f`.
    Sphere { f: u32 },
    /// The Dirichlet Laplacian of the flat unit disk.
    UnitDisk,
    /// Exact spin cone over a link, with the Bessel orders `ν±(μ)`.
    SpinCone {
        link: LinkSpectrum,
        sign: SpinSign,
        #[serde(default)]
        k_max: Option<u64>,
    },
    /// A finite spectrum given in full.
    Finite {
        entries: Vec<(f64, u64)>,
        #[serde(default)]
        kernel_dim: u64,
    },
    /// CSV file of `lambda,multiplicity` with a JSON sidecar
    /// `<path>.json`; relative paths resolve against the descriptor.
    Csv { path: PathBuf },
}

/// Flat twists `e^{2πiα}`, `e^{2πiβ}` for the circle rho invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Twists {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default = "unit_ranks")]
    pub ranks: (u32, u32),
}

fn unit_ranks() -> (u32, u32) {
    (1, 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Descriptor {
    pub version: u32,
    pub manifold: EdgeDescriptor,
    pub operator: OperatorDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twists: Option<Twists>,
}

impl Descriptor {
    pub fn validate(&self) -> Result<(), IoError> {
        if self.version != DESCRIPTOR_VERSION {
            return Err(IoError::UnsupportedVersion(self.version));
        }
        self.manifold.validate()?;
        self.operator.validate(self.manifold.m)?;
        match &self.spectrum {
            Some(SpectrumSource::Circle { a }) if !(0.0..1.0).contains(a) => {
                return Err(IoError::Parse(format!(
                    "spectrum.circle.a must lie in [0, 1), got {a}"
                )))
            }
            Some(SpectrumSource::Sphere { f: 0 }) => {
                return Err(IoError::Parse("spectrum.sphere.f must be positive".into()))
            }
            Some(SpectrumSource::SpinCone { link, .. }) => link.validate()?,
            _ => {}
        }
        if let Some(t) = self.twists {
            for (name, v) in [("alpha", t.alpha), ("beta", t.beta)] {
                if !(v > 0.0 && v < 1.0) {
                    return Err(IoError::Parse(format!(
                        "twists.{name} must lie in (0, 1), got {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Parses and validates a descriptor; unknown fields are rejected.
pub fn parse_descriptor(text: &str) -> Result<Descriptor, IoError> {
    let d: Descriptor = serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    d.validate()?;
    Ok(d)
}

pub fn read_descriptor(path: &Path) -> Result<Descriptor, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_descriptor(&text)
}

/// Materializes the spectrum named by `source` up to `cutoff`.
pub fn build_spectrum(
    source: &SpectrumSource,
    cutoff: f64,
    zeros: &dyn ZeroSource,
    base_dir: &Path,
) -> Result<Spectrum, IoError> {
    Ok(match source {
        SpectrumSource::Circle { a } => circle_dirac_spectrum(*a, cutoff)?,
        SpectrumSource::Sphere { f } => sphere_dirac_spectrum(*f, cutoff)?,
        SpectrumSource::UnitDisk => unit_disk_spectrum(cutoff, zeros)?,
        SpectrumSource::SpinCone { link, sign, k_max } => {
            let modes = link_modes(link, |mu| {
                let (p, m) = spin_cone_nu_exact(mu);
                match sign {
                    SpinSign::Plus => p,
                    SpinSign::Minus => m,
                }
            })?;
            cone_eigenvalues(&modes, *k_max, cutoff, zeros)?
        }
        SpectrumSource::Finite {
            entries,
            kernel_dim,
        } => Spectrum::finite(entries, *kernel_dim),
        SpectrumSource::Csv { path } => {
            let p = if path.is_absolute() {
                path.clone()
            } else {
                base_dir.join(path)
            };
            read_spectrum_csv(&p)?
        }
    })
}

/// Bessel zeros keyed by `(ν as an exact rational string, k)`, stored as
/// the hexadecimal bit pattern of the `f64` so reloads are exact.
///
/// Lookups take a read lock; misses compute the zero and insert under a
/// write lock. [`ZeroCache::persist`] merges with the file on disk and
/// replaces it by an atomic rename, so readers never see a partial table.
#[derive(Debug, Default)]
pub struct ZeroCache {
    dir: Option<PathBuf>,
    table: RwLock<BTreeMap<(String, u64), u64>>,
    misses: RwLock<u64>,
}

impl ZeroCache {
    /// A cache that never touches the disk.
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads `dir/bessel_zeros.tsv` if present.
    pub fn open(dir: &Path) -> Result<Self, IoError> {
        let cache = Self {
            dir: Some(dir.to_path_buf()),
            ..Self::default()
        };
        let file = dir.join(CACHE_FILE);
        if file.exists() {
            let loaded = read_table(&file)?;
            *cache.table.write().expect("fresh lock") = loaded;
        }
        Ok(cache)
    }

    /// Directory from `--cache-dir`, else `EDGE_ETA_CACHE`.
    pub fn resolve_dir(flag: Option<&Path>) -> Option<PathBuf> {
        flag.map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
    }

    pub fn len(&self) -> usize {
        self.table.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of zeros computed rather than found.
    pub fn misses(&self) -> u64 {
        *self.misses.read().expect("cache lock")
    }

    pub fn persist(&self) -> Result<(), IoError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        if self.misses() == 0 {
            return Ok(());
        }
        fs::create_dir_all(dir).map_err(|e| IoError::Write {
            path: dir.clone(),
            message: e.to_string(),
        })?;
        let file = dir.join(CACHE_FILE);
        let mut merged = if file.exists() {
            read_table(&file)?
        } else {
            BTreeMap::new()
        };
        merged.extend(
            self.table
                .read()
                .expect("cache lock")
                .iter()
                .map(|(k, v)| (k.clone(), *v)),
        );
        let mut text = String::from("# nu\tk\tf64 bits\n");
        for ((nu, k), bits) in &merged {
            let _ = writeln!(text, "{nu}\t{k}\t{bits:016x}");
        }
        let tmp = dir.join(format!("{CACHE_FILE}.{}.tmp", std::process::id()));
        let write_err = |e: std::io::Error| IoError::Write {
            path: tmp.clone(),
            message: e.to_string(),
        };
        let mut f = fs::File::create(&tmp).map_err(write_err)?;
        f.write_all(text.as_bytes()).map_err(write_err)?;
        f.sync_all().map_err(write_err)?;
        fs::rename(&tmp, &file).map_err(|e| IoError::Write {
            path: file.clone(),
            message: e.to_string(),
        })
    }
}

fn read_table(file: &Path) -> Result<BTreeMap<(String, u64), u64>, IoError> {
    let text = fs::read_to_string(file).map_err(|e| IoError::Read {
        path: file.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let bad = || {
            IoError::Parse(format!(
                "{}:{}: bad cache line {line:?}",
                file.display(),
                i + 1
            ))
        };
        let mut parts = line.split('\t');
        let (Some(nu), Some(k), Some(bits), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let k: u64 = k.parse().map_err(|_| bad())?;
        let bits = u64::from_str_radix(bits, 16).map_err(|_| bad())?;
        out.insert((nu.to_string(), k), bits);
    }
    Ok(out)
}

impl ZeroSource for ZeroCache {
    fn zero(&self, nu: Rational, k: u64) -> Result<f64, SpecialError> {
        let key = (fmt_rational(&nu), k);
        if let Some(bits) = self.table.read().expect("cache lock").get(&key) {
            return Ok(f64::from_bits(*bits));
        }
        let j = bessel_j_zero(rational_to_f64(nu), k)?.value;
        self.table
            .write()
            .expect("cache lock")
            .insert(key, j.to_bits());
        *self.misses.write().expect("cache lock") += 1;
        Ok(j)
    }
}

/// Output formats accepted by the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

/// Pretty JSON with every float written to 17 significant digits.
pub fn to_json_string(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

pub fn format_f64_17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0.0".into()
        } else {
            "0.0".into()
        };
    }
    format!("{x:.16e}")
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_f64_17(n.as_f64().expect("f64 number")));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("keys serialize"));
                out.push_str(": ");
                write_value(out, item, indent + 1);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Sidecar metadata stored next to a spectrum CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSidecar {
    pub kernel_dim: u64,
    /// `null` for a spectrum given in full.
    pub cutoff: Option<f64>,
    #[serde(default)]
    pub tail: Option<TailModel>,
    #[serde(default)]
    pub lattice: Option<LatticeForm>,
}

fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn spectrum_csv(spec: &Spectrum) -> String {
    let rows: Vec<Vec<String>> = spec
        .entries
        .iter()
        .map(|e| vec![format_f64_17(e.lambda), e.multiplicity.to_string()])
        .collect();
    csv_string(&["lambda", "multiplicity"], &rows)
}

/// CSV text from pre-formatted cells.
pub fn csv_string(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

pub fn spectrum_sidecar(spec: &Spectrum) -> SpectrumSidecar {
    SpectrumSidecar {
        kernel_dim: spec.kernel_dim,
        cutoff: spec.cutoff.is_finite().then_some(spec.cutoff),
        tail: spec.tail,
        lattice: spec.lattice,
    }
}

/// Writes `path` (CSV) and `path.json` (sidecar).
pub fn write_spectrum_csv(spec: &Spectrum, path: &Path) -> Result<(), IoError> {
    let werr = |p: &Path, e: std::io::Error| IoError::Write {
        path: p.to_path_buf(),
        message: e.to_string(),
    };
    fs::write(path, spectrum_csv(spec)).map_err(|e| werr(path, e))?;
    let side = sidecar_path(path);
    let value = serde_json::to_value(spectrum_sidecar(spec)).expect("sidecar serializes");
    fs::write(&side, to_json_string(&value)).map_err(|e| werr(&side, e))
}

pub fn read_spectrum_csv(path: &Path) -> Result<Spectrum, IoError> {
    let rerr = |p: &Path, e: String| IoError::Read {
        path: p.to_path_buf(),
        message: e,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| rerr(path, e.to_string()))?;
    let mut entries = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| IoError::Parse(format!("{}: {e}", path.display())))?;
        let field = |j: usize| row.get(j).map(str::trim).unwrap_or("");
        let lambda: f64 = field(0)
            .parse()
            .map_err(|_| IoError::Parse(format!("{} row {}: bad lambda", path.display(), i + 1)))?;
        let multiplicity: u64 = field(1).parse().map_err(|_| {
            IoError::Parse(format!(
                "{} row {}: bad multiplicity",
                path.display(),
                i + 1
            ))
        })?;
        entries.push(SpecEntry {
            lambda,
            multiplicity,
        });
    }
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side).map_err(|e| rerr(&side, e.to_string()))?;
    let meta: SpectrumSidecar = serde_json::from_str(&text)
        .map_err(|e| IoError::Parse(format!("{}: {e}", side.display())))?;
    let mut spec = Spectrum::new(
        entries,
        meta.kernel_dim,
        meta.cutoff.unwrap_or(f64::INFINITY),
        meta.tail,
    );
    spec.lattice = meta.lattice;
    spec.validate()?;
    Ok(spec)
}

/// Plot-ready CSV with columns `t,value,bound`.
pub fn samples_csv(samples: &[TraceSample]) -> String {
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| {
            vec![
                format_f64_17(s.t),
                format_f64_17(s.value),
                format_f64_17(s.truncation_bound),
            ]
        })
        .collect();
    csv_string(&["t", "value", "bound"], &rows)
}

/// Fixed-width table with numbers rounded to 6 significant digits.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(headers.to_vec(), &mut out);
    for r in rows {
        line(r.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

pub fn format_f64_6(x: f64) -> String {
    if x == 0.0 || (1e-4..1e6).contains(&x.abs()) {
        let digits = if x == 0.0 {
            5
        } else {
            (5 - x.abs().log10().floor() as i32).max(0) as usize
        };
        format!("{x:.digits$}")
    } else {
        format!("{x:.5e}")
    }
}
