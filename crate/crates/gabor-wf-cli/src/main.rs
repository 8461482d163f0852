use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use gabor_wf::detector::DirectionScan;
use gabor_wf::linalg::Subspace;
use gabor_wf::propagator::SampledDistribution;
use gabor_wf::scenario::{self, InitialDatum, RunArtifacts, RunReport, ScenarioConfig};
use gabor_wf::Complex64;
use serde::Deserialize;

/// Largest spectrogram plot grid written per axis.
const PLOT_MAX: usize = 512;

#[derive(Parser)]
#[command(name = "gabor-wf", version, about = "Singular spaces and Gabor wave front sets of quadratic semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON config or by catalog name.
    Run {
        config: String,
        /// Output directory (default: $GABORWF_OUT or ./out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for random test vectors.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads for the parallel sections.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        verbose: bool,
    },
    /// List the built-in scenarios.
    Catalog {
        /// Write each scenario as <dir>/<name>.json.
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Io(anyhow::Error),
    Invalid(anyhow::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            Failure::Io(e.into())
        } else {
            Failure::Invalid(e.into())
        }
    }
}

impl From<gabor_wf::Error> for Failure {
    fn from(e: gabor_wf::Error) -> Self {
        Failure::Invalid(e.into())
    }
}

fn io<T>(r: std::io::Result<T>, what: impl FnOnce() -> String) -> Result<T, Failure> {
    r.with_context(what).map_err(Failure::Io)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            threads,
            verbose,
        } => run(&config, out, seed, threads, verbose),
        Command::Catalog { write } => catalog(write),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn catalog(write: Option<PathBuf>) -> Result<(), Failure> {
    let cat = scenario::catalog();
    for c in &cat {
        println!("{:<26} d={}  {}", c.name, c.d, c.description);
    }
    if let Some(dir) = write {
        io(fs::create_dir_all(&dir), || format!("creating {}", dir.display()))?;
        for c in &cat {
            let path = dir.join(format!("{}.json", c.name));
            let text = serde_json::to_string_pretty(c).expect("config serializes") + "\n";
            io(fs::write(&path, text), || format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

fn load_config(arg: &str) -> Result<(ScenarioConfig, Option<PathBuf>), Failure> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(c) = scenario::catalog_entry(arg) {
            return Ok((c, None));
        }
    }
    let text = io(fs::read_to_string(path), || format!("reading config {arg}"))?;
    let cfg: ScenarioConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {arg}"))
        .map_err(Failure::Invalid)?;
    Ok((cfg, path.parent().map(Path::to_path_buf)))
}

#[derive(Deserialize)]
struct SampleRow {
    re: f64,
    im: f64,
}

/// Samples from a CSV with columns `re,im` on the configured grid.
fn load_datum(cfg: &ScenarioConfig, base: Option<&Path>) -> Result<Option<SampledDistribution>, Failure> {
    let Some(InitialDatum::File(p)) = &cfg.initial_datum else {
        return Ok(None);
    };
    let path = match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p.clone(),
    };
    let file = io(fs::File::open(&path), || format!("opening datum {}", path.display()))?;
    let mut rdr = csv::Reader::from_reader(file);
    let mut vals = vec![];
    for row in rdr.deserialize::<SampleRow>() {
        let r = row?;
        vals.push(Complex64::new(r.re, r.im));
    }
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(Some(SampledDistribution::new(cfg.grid.half_width, vals, label)?))
}

fn set_threads(threads: Option<usize>) -> Result<(), Failure> {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure::Invalid(e.into()))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn run(arg: &str, out: Option<PathBuf>, seed: u64, threads: Option<usize>, verbose: bool) -> Result<(), Failure> {
    set_threads(threads)?;
    let (cfg, base) = load_config(arg)?;
    let datum = load_datum(&cfg, base.as_deref())?;
    let (report, artifacts) = scenario::run(&cfg, seed, datum)?;
    let root = out
        .or_else(|| std::env::var_os("GABORWF_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let dir = root.join(&cfg.name);
    io(fs::create_dir_all(&dir), || format!("creating {}", dir.display()))?;
    write_outputs(&dir, &report, &artifacts)?;
    if verbose {
        summarize(&report);
    }
    println!("{}", dir.join("report.json").display());
    let failed: Vec<&str> = report.failed_checks().map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invalid(anyhow::anyhow!(
            "scenario {} failed checks: {}",
            report.scenario,
            failed.join(", ")
        )))
    }
}

fn summarize(r: &RunReport) {
    eprintln!(
        "{}: dim S = {}, normality defect {:.3e}",
        r.scenario, r.hamilton.singular_space.dim, r.hamilton.normality_defect
    );
    for t in &r.times {
        let mut line = format!("  t = {}: symplectic residual {:.2e}", t.t, t.symplectic_residual);
        if let Some(p) = &t.propagation {
            line += &format!(", bound {} patch(es)", p.bound_singular.len());
        }
        if let Some(d) = &t.detector {
            let caps: Vec<String> = d
                .caps
                .iter()
                .map(|c| format!("{:.1}±{:.1}°", c.center_deg, c.half_width_deg))
                .collect();
            line += &format!(", {} flags [{}] via {}", d.flagged.len(), caps.join(" "), d.route);
        }
        eprintln!("{line}");
    }
    for c in &r.checks {
        if !c.passed {
            eprintln!("  FAILED {} {}", c.name, c.detail);
        }
    }
}

fn write_outputs(dir: &Path, report: &RunReport, art: &RunArtifacts) -> Result<(), Failure> {
    let path = dir.join("report.json");
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    io(fs::write(&path, text), || format!("writing {}", path.display()))?;

    if let Some(s) = &art.singular_space {
        write_basis(&dir.join("singular_space.csv"), &[(None, s)])?;
    }
    let kb: Vec<(Option<f64>, &Subspace)> = art.kernel_bounds.iter().map(|(t, s)| (Some(*t), s)).collect();
    write_basis(&dir.join("kernel_bounds.csv"), &kb)?;

    if art.scans.is_empty() {
        return Ok(());
    }
    let mut w = csv::Writer::from_path(dir.join("flagged.csv"))?;
    w.write_record(["t", "theta_deg", "dir_x", "dir_xi", "exponent", "confidence"])?;
    for t in &report.times {
        for f in t.detector.iter().flat_map(|d| &d.flagged) {
            w.write_record(&[
                t.t.to_string(),
                f.theta_deg.to_string(),
                f.direction[0].to_string(),
                f.direction[1].to_string(),
                f.exponent.to_string(),
                f.confidence.to_string(),
            ])?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("shells.csv"))?;
    w.write_record(["t", "window", "theta_deg", "shell", "radius", "max", "exponent", "confidence", "flagged"])?;
    for (t, scans) in &art.scans {
        for s in scans {
            write_scan(&mut w, *t, s)?;
        }
    }
    w.flush()?;

    for (k, (t, sp)) in art.spectrograms.iter().enumerate() {
        let (xis, xs, grid) = sp.downsampled(PLOT_MAX, PLOT_MAX);
        let mut w = csv::Writer::from_path(dir.join(format!("spectrogram_{k}.csv")))?;
        let mut head = vec![format!("xi\\x@t={t}")];
        head.extend(xs.iter().map(|x| x.to_string()));
        w.write_record(&head)?;
        for (xi, row) in xis.iter().zip(&grid) {
            let mut rec = vec![xi.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn write_scan(w: &mut csv::Writer<fs::File>, t: f64, s: &DirectionScan) -> Result<(), Failure> {
    for (k, th) in s.thetas.iter().enumerate() {
        let d = &s.decays[k];
        for (j, (r, m)) in s.radii[k].iter().zip(&d.maxima).enumerate() {
            w.write_record(&[
                t.to_string(),
                s.window.to_string(),
                th.to_degrees().to_string(),
                j.to_string(),
                r.to_string(),
                m.to_string(),
                d.exponent.to_string(),
                d.confidence.to_string(),
                s.flagged[k].to_string(),
            ])?;
        }
    }
    Ok(())
}

fn write_basis(path: &Path, spaces: &[(Option<f64>, &Subspace)]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path)?;
    let n = spaces.first().map(|(_, s)| s.ambient_dim()).unwrap_or(0);
    let mut head = vec!["t".to_string(), "vector".to_string()];
    head.extend((0..n).map(|i| format!("c{i}")));
    w.write_record(&head)?;
    for (t, s) in spaces {
        for (k, col) in s.basis().column_iter().enumerate() {
            let mut rec = vec![t.map(|t| t.to_string()).unwrap_or_default(), k.to_string()];
            rec.extend(col.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}
