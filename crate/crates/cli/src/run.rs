use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use cavity_spectra::experiment::ExperimentResult;
use cavity_spectra::scenarios::InitialStateSpec;
use cavity_spectra::spectra::normalize_spectrum;
use cavity_spectra::{parse_experiment, render_experiment, run_experiment, scenario_by_name, ExperimentSpec};
use serde_json::json;

use crate::artifacts::{self, ComparisonRecord, Manifest, CONFIG_FILE, METADATA_FILE};
use crate::RunArgs;

/// Resolves the experiment from the arguments, applying command-line overrides.
pub fn resolve(args: &RunArgs) -> Result<ExperimentSpec> {
    let mut spec = match (&args.scenario, &args.config) {
        (Some(name), _) => scenario_by_name(name, args.seed)?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_experiment(&text).with_context(|| format!("invalid experiment {}", path.display()))?
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    if let Some(s) = args.seed {
        match &mut spec.initial_state {
            InitialStateSpec::RandomMultiGaussian { seed, .. } => *seed = s,
            _ => log::warn!("--seed ignored: `{}` has a deterministic initial state", spec.name),
        }
    }
    if let Some(tol) = args.tol {
        spec.integrator.tol = tol;
    }
    if let Some(dt) = args.dt_max {
        spec.integrator.dt_max = dt;
    }
    spec.validate()?;
    Ok(spec)
}

pub fn execute(args: &RunArgs) -> Result<()> {
    let spec = resolve(args)?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("runs").join(artifacts::file_stem(&spec.name)));
    let started = std::time::Instant::now();
    let result = run_experiment(&spec)?;
    let manifest = write_run(&out, &result)?;
    let d = &result.diagnostics;
    println!(
        "{}: {:.1} s, norm drift {:.2e}/time, energy drift {:.2e}; artifacts in {}",
        spec.name,
        started.elapsed().as_secs_f64(),
        d.norm_drift_per_time,
        d.max_energy_drift,
        out.display()
    );
    for c in &manifest.comparisons {
        println!(
            "  {:<12} L1={:.4} Linf={:.4} shift={:+.3}  {}",
            c.name,
            c.l1,
            c.linf,
            c.peak_shift,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    for b in &result.banks {
        println!("  bank {:<10} absorbed {:.3}% of field energy", b.bank, 100.0 * b.fraction());
    }
    Ok(())
}

/// Writes all artifacts of `result` into `dir`. Contents depend only on the
/// result, so identical runs give identical files.
pub fn write_run(dir: &Path, result: &ExperimentResult) -> Result<Manifest> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut manifest = Manifest::default();
    for snap in &result.snapshots {
        manifest.energy_density.push(artifacts::write_snapshot(dir, snap)?);
    }
    for trace in &result.traces {
        manifest.traces.push(artifacts::write_trace(dir, trace)?);
    }
    for s in &result.spectra {
        let normalized = normalize_spectrum(&s.spectrum).with_context(|| format!("spectrum `{}`", s.name))?;
        manifest.spectra.push(artifacts::write_spectrum(dir, &s.name, &s.spectrum, &normalized)?);
    }
    manifest.comparisons = result.comparisons.iter().map(ComparisonRecord::from).collect();

    let spec = &result.spec;
    fs::write(dir.join(CONFIG_FILE), render_experiment(spec)?)?;
    let scatterers: Vec<_> = result
        .scatterers
        .iter()
        .map(|a| {
            json!({
                "position": a.position,
                "omega0": a.omega0,
                "gamma": a.gamma,
                "dipole": a.dipole,
                "band_shift": a.band_shift,
                "bare_frequency": a.bare_frequency(),
            })
        })
        .collect();
    let banks: Vec<_> = result
        .banks
        .iter()
        .map(|b| {
            let bank = spec.bank(&b.bank).expect("bank exists");
            json!({
                "name": b.bank,
                "comb_spacing": bank.spacing(),
                "gamma": bank.gamma,
                "read_time": b.read_time,
                "absorbed_energy": b.absorbed_energy,
                "field_energy": b.field_energy,
                "absorbed_fraction": b.fraction(),
            })
        })
        .collect();
    let metadata = json!({
        "name": spec.name,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "seed": spec.initial_state.seed(),
        "config_file": CONFIG_FILE,
        "experiment": spec,
        "integrator": spec.integrator,
        "diagnostics": result.diagnostics,
        "scatterers": scatterers,
        "banks": banks,
        "manifest": manifest,
    });
    fs::write(dir.join(METADATA_FILE), serde_json::to_string_pretty(&metadata)? + "\n")?;
    Ok(manifest)
}
