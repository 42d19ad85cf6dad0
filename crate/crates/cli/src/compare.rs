use std::path::Path;

use anyhow::{bail, Context, Result};
use cavity_spectra::spectra::{compare_spectra, normalize_spectrum, SpectrumComparison};

use crate::artifacts::{load_manifest, read_spectrum};
use crate::CompareArgs;

pub const DEFAULT_TOLERANCE: f64 = 0.05;

/// Metrics between two spectrum files, both renormalized to unit area.
pub fn compare_files(a: &Path, b: &Path) -> Result<SpectrumComparison> {
    let sa = normalize_spectrum(&read_spectrum(a)?)?;
    let sb = normalize_spectrum(&read_spectrum(b)?)?;
    compare_spectra(&sa, &sb).with_context(|| format!("comparing {} with {}", a.display(), b.display()))
}

fn report(label: &str, m: &SpectrumComparison, tol: f64) -> bool {
    let pass = m.l1 <= tol;
    println!(
        "{label}: L1={:.6} Linf={:.6} peak_shift={:+.4} overlap=[{}, {}] tol={tol} {}",
        m.l1,
        m.linf,
        m.peak_shift,
        m.overlap.0,
        m.overlap.1,
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

/// Returns whether every comparison is within tolerance.
pub fn execute(args: &CompareArgs) -> Result<bool> {
    if let Some(dir) = &args.run {
        return compare_run(dir, &args.name, args.tol);
    }
    let [a, b] = args.files.as_slice() else {
        bail!("give two spectrum CSV files or --run <dir>");
    };
    let m = compare_files(a, b)?;
    Ok(report(&format!("{} vs {}", a.display(), b.display()), &m, args.tol.unwrap_or(DEFAULT_TOLERANCE)))
}

fn compare_run(dir: &Path, names: &[String], tol: Option<f64>) -> Result<bool> {
    let manifest = load_manifest(dir)?;
    for n in names {
        if !manifest.comparisons.iter().any(|c| &c.name == n) {
            bail!("run {} has no comparison `{n}`", dir.display());
        }
    }
    let selected: Vec<_> =
        manifest.comparisons.iter().filter(|c| names.is_empty() || names.contains(&c.name)).collect();
    if selected.is_empty() {
        bail!("run {} records no comparison pairs", dir.display());
    }
    let mut all = true;
    for c in selected {
        let file = |name: &str| {
            manifest
                .spectrum(name)
                .map(|s| dir.join(&s.file))
                .with_context(|| format!("comparison `{}` references unknown spectrum `{name}`", c.name))
        };
        let m = compare_files(&file(&c.a)?, &file(&c.b)?)?;
        all &= report(&format!("{} ({} vs {})", c.name, c.a, c.b), &m, tol.unwrap_or(c.tolerance));
    }
    Ok(all)
}
