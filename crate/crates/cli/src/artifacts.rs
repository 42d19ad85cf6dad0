//! On-disk layout of a run directory: CSV tables plus `metadata.json`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cavity_spectra::experiment::{ComparisonOutcome, EnergySnapshot, ExcitationTrace};
use cavity_spectra::spectra::{Provenance, Spectrum};
use serde::{Deserialize, Serialize};

pub const METADATA_FILE: &str = "metadata.json";
pub const CONFIG_FILE: &str = "config.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotFile {
    pub output: String,
    pub time: f64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub output: String,
    pub atoms: Vec<usize>,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub name: String,
    pub provenance: String,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub name: String,
    pub a: String,
    pub b: String,
    pub tolerance: f64,
    pub l1: f64,
    pub linf: f64,
    pub peak_shift: f64,
    pub passed: bool,
}

impl From<&ComparisonOutcome> for ComparisonRecord {
    fn from(c: &ComparisonOutcome) -> Self {
        ComparisonRecord {
            name: c.name.clone(),
            a: c.a.clone(),
            b: c.b.clone(),
            tolerance: c.tolerance,
            l1: c.metrics.l1,
            linf: c.metrics.linf,
            peak_shift: c.metrics.peak_shift,
            passed: c.passed,
        }
    }
}

/// Every artifact a run wrote, relative to the run directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub energy_density: Vec<SnapshotFile>,
    pub traces: Vec<TraceFile>,
    pub spectra: Vec<SpectrumFile>,
    pub comparisons: Vec<ComparisonRecord>,
}

impl Manifest {
    pub fn spectrum(&self, name: &str) -> Option<&SpectrumFile> {
        self.spectra.iter().find(|s| s.name == name)
    }

    pub fn files(&self) -> impl Iterator<Item = &str> {
        self.energy_density
            .iter()
            .map(|f| f.file.as_str())
            .chain(self.traces.iter().map(|f| f.file.as_str()))
            .chain(self.spectra.iter().map(|f| f.file.as_str()))
    }
}

/// Reads the manifest of a run directory, checking that every listed file
/// exists.
pub fn load_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(METADATA_FILE);
    if !path.is_file() {
        bail!("no run artifacts in {} ({METADATA_FILE} missing)", dir.display());
    }
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let manifest: Manifest = serde_json::from_value(value.get("manifest").cloned().unwrap_or_default())
        .with_context(|| format!("{} has no valid `manifest`", path.display()))?;
    for file in manifest.files() {
        if !dir.join(file).is_file() {
            bail!("artifact {file} listed in {} is missing", path.display());
        }
    }
    Ok(manifest)
}

/// File-name-safe version of an output name.
pub fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn csv_writer(file: fs::File) -> csv::Writer<fs::File> {
    csv::WriterBuilder::new().from_writer(file)
}

pub fn write_snapshot(dir: &Path, snap: &EnergySnapshot) -> Result<SnapshotFile> {
    let file = format!("{}_t{}.csv", file_stem(&snap.output), snap.time);
    let mut f = create(&dir.join(&file))?;
    writeln!(f, "# energy density |T(r)|^2 at t={}", snap.time)?;
    writeln!(f, "# units: r in cavity length units, u per unit length (natural units)")?;
    let mut w = csv_writer(f);
    w.write_record(["r", "u"])?;
    for (r, u) in snap.r.iter().zip(&snap.u) {
        w.write_record([r.to_string(), format!("{u:e}")])?;
    }
    w.flush()?;
    Ok(SnapshotFile { output: snap.output.clone(), time: snap.time, file })
}

pub fn write_trace(dir: &Path, trace: &ExcitationTrace) -> Result<TraceFile> {
    let file = format!("{}.csv", file_stem(&trace.output));
    let mut f = create(&dir.join(&file))?;
    writeln!(f, "# atom excitation probabilities |c_j(t)|^2; columns p_j by atom index")?;
    let mut w = csv_writer(f);
    let mut header = vec!["t".to_string()];
    header.extend(trace.atoms.iter().map(|j| format!("p_{j}")));
    w.write_record(&header)?;
    for (t, row) in trace.times.iter().zip(&trace.values) {
        let mut rec = vec![t.to_string()];
        rec.extend(row.iter().map(|p| format!("{p:e}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(TraceFile { output: trace.output.clone(), atoms: trace.atoms.clone(), file })
}

/// Writes `omega, S, S_raw` where `S` is the unit-area version of `raw`.
pub fn write_spectrum(dir: &Path, name: &str, raw: &Spectrum, normalized: &Spectrum) -> Result<SpectrumFile> {
    let file = format!("spectrum_{}.csv", file_stem(name));
    let provenance = raw.provenance.describe();
    let mut f = create(&dir.join(&file))?;
    writeln!(f, "# spectrum: {name}")?;
    writeln!(f, "# provenance: {provenance}")?;
    writeln!(f, "# units: omega in natural units (omega = k); S has unit area over omega; S_raw unnormalized")?;
    let mut w = csv_writer(f);
    w.write_record(["omega", "S", "S_raw"])?;
    for ((o, s), r) in raw.omega.iter().zip(&normalized.values).zip(&raw.values) {
        w.write_record([o.to_string(), format!("{s:e}"), format!("{r:e}")])?;
    }
    w.flush()?;
    Ok(SpectrumFile { name: name.to_string(), provenance, file })
}

/// Reads the `omega` and `S` columns of a spectrum CSV (`#` lines skipped).
pub fn read_spectrum(path: &Path) -> Result<Spectrum> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = r.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (Some(io), Some(is)) = (col("omega"), col("S")) else {
        bail!("{}: expected columns `omega` and `S`", path.display());
    };
    let (mut omega, mut values) = (Vec::new(), Vec::new());
    for (line, rec) in r.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: record {}", path.display(), line + 1))?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .unwrap_or("")
                .trim()
                .parse()
                .with_context(|| format!("{}: record {} is not numeric", path.display(), line + 1))
        };
        omega.push(num(io)?);
        values.push(num(is)?);
    }
    let note = PathBuf::from(path).display().to_string();
    Spectrum::new(omega, values, Provenance::Derived { note }).with_context(|| format!("invalid spectrum in {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Spectrum {
        let omega: Vec<f64> = (0..50).map(|i| 90.0 + 0.4 * i as f64).collect();
        let values = omega.iter().map(|w| (-(w - 100.0) * (w - 100.0) / 8.0).exp()).collect();
        Spectrum::new(omega, values, Provenance::InitialState).unwrap()
    }

    #[test]
    fn spectrum_round_trips_through_csv() {
        let dir = tempfile::tempdir().unwrap();
        let raw = sample();
        let norm = cavity_spectra::spectra::normalize_spectrum(&raw).unwrap();
        let rec = write_spectrum(dir.path(), "a b/c", &raw, &norm).unwrap();
        assert_eq!(rec.file, "spectrum_a_b_c.csv");
        let back = read_spectrum(&dir.path().join(&rec.file)).unwrap();
        assert_eq!(back.omega, raw.omega);
        assert_eq!(back.values, norm.values);
    }

    #[test]
    fn missing_columns_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        fs::write(&p, "w,v\n1,2\n").unwrap();
        let err = read_spectrum(&p).unwrap_err().to_string();
        assert!(err.contains("omega"), "{err}");
    }

    #[test]
    fn empty_directory_has_no_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_manifest(dir.path()).unwrap_err().to_string();
        assert!(err.contains(METADATA_FILE), "{err}");
    }
}
