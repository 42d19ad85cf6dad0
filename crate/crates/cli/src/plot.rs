//! gnuplot scripts over the CSVs of a run directory. Scripts use paths
//! relative to the directory, so run them from inside it
//! (`cd <dir> && gnuplot plot_*.gp`); each writes an SVG of the same stem.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Result;

use crate::artifacts::{file_stem, load_manifest, Manifest};
use crate::PlotArgs;

fn preamble(stem: &str, title: &str, xlabel: &str, ylabel: &str) -> String {
    format!(
        "set terminal svg size 900,600\nset output '{stem}.svg'\nset datafile separator ','\n\
         set title \"{title}\"\nset xlabel \"{xlabel}\"\nset ylabel \"{ylabel}\"\nset key top right\n"
    )
}

/// `(file stem, script)` pairs for every figure the manifest supports.
pub fn scripts(manifest: &Manifest) -> Vec<(String, String)> {
    let mut out = Vec::new();

    let mut outputs: Vec<&str> = manifest.energy_density.iter().map(|s| s.output.as_str()).collect();
    outputs.dedup();
    for output in outputs {
        let stem = format!("plot_{}", file_stem(output));
        let mut s = preamble(&stem, "energy density", "r", "u(r)");
        let lines: Vec<String> = manifest
            .energy_density
            .iter()
            .filter(|f| f.output == output)
            .map(|f| format!("'{}' using 1:2 with lines title 't = {}'", f.file, f.time))
            .collect();
        let _ = writeln!(s, "plot {}", lines.join(", \\\n     "));
        out.push((stem, s));
    }

    for trace in &manifest.traces {
        let stem = format!("plot_{}", file_stem(&trace.output));
        let mut s = preamble(&stem, "atom excitation", "t", "excitation probability");
        let lines: Vec<String> = trace
            .atoms
            .iter()
            .enumerate()
            .map(|(k, j)| format!("'{}' using 1:{} with lines title 'atom {j}'", trace.file, k + 2))
            .collect();
        let _ = writeln!(s, "plot {}", lines.join(", \\\n     "));
        out.push((stem, s));
    }

    for c in &manifest.comparisons {
        let (Some(a), Some(b)) = (manifest.spectrum(&c.a), manifest.spectrum(&c.b)) else { continue };
        let stem = format!("plot_overlay_{}", file_stem(&c.name));
        let mut s = preamble(&stem, &format!("{} (L1 = {:.4})", c.name, c.l1), "omega", "normalized S");
        let _ = writeln!(
            s,
            "plot '{}' using 1:2 with lines title '{}', \\\n     '{}' using 1:2 with points pt 7 ps 0.4 title '{}'",
            b.file, b.name, a.file, a.name
        );
        out.push((stem, s));
    }

    let compared = |name: &str| manifest.comparisons.iter().any(|c| c.a == name || c.b == name);
    for spec in manifest.spectra.iter().filter(|s| !compared(&s.name)) {
        let stem = format!("plot_spectrum_{}", file_stem(&spec.name));
        let mut s = preamble(&stem, &spec.name, "omega", "normalized S");
        let _ = writeln!(s, "plot '{}' using 1:2 with lines title '{}'", spec.file, spec.name);
        out.push((stem, s));
    }
    out
}

pub fn execute(args: &PlotArgs) -> Result<()> {
    let manifest = load_manifest(&args.dir)?;
    let scripts = scripts(&manifest);
    for (stem, text) in &scripts {
        let path = args.dir.join(format!("{stem}.gp"));
        fs::write(&path, text)?;
        println!("{}", path.display());
    }
    if scripts.is_empty() {
        anyhow::bail!("run {} has no plottable artifacts", Path::new(&args.dir).display());
    }
    Ok(())
}
