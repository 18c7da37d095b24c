//! `cuspgeom`: command-line front end for the verification suites, tables and figures.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use cuspgeom::cusplie::{group_exp, lattice_from_json, normalize_lattice, LieAlgElem};
use cuspgeom::cuspvol::{
    cusp_volume_table, displacement_csv, displacement_profile, displacement_svg, volume_csv, volume_svg, CuspFundamentalDomain,
};
use cuspgeom::domains::{boundary_obj, horosphere_obj, polyline_svg, ConvexDomain, DomainDescriptor, Horosphere};
use cuspgeom::fig8::{sweep, verify_report};
use cuspgeom::hilbert::QuadratureSpec;
use cuspgeom::projlin::{parse_rational, Rational};
use cuspgeom::selftest::run_selftest;

/// Environment variable holding the default output directory.
const OUT_ENV: &str = "CUSPGEOM_OUT";
const DEFAULT_SEED: u64 = 0x5eed_2024;
/// Horosphere spread above which a displacement profile counts as a failed check.
const SPREAD_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Verification(_) | CliError::Io { .. } => 1,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "cuspgeom", version, about = "Cusp geometry of convex projective figure-eight structures")]
struct Cli {
    /// Output directory for artifacts and the run manifest.
    #[arg(long, global = true, env = OUT_ENV, default_value = "cuspgeom-out")]
    out: PathBuf,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Figure-eight holonomy family.
    #[command(subcommand)]
    Fig8(Fig8Command),
    /// Cusp volume and displacement computations.
    #[command(subcommand)]
    Cusp(CuspCommand),
    /// Lattice normalization.
    #[command(subcommand)]
    Lattice(LatticeCommand),
    /// Domain meshes and slices.
    #[command(subcommand)]
    Domain(DomainCommand),
    /// Runs the invariant suite; nonzero exit on any failure.
    Selftest,
}

#[derive(Debug, Subcommand)]
enum Fig8Command {
    /// Relation, spectra and obstruction report for one rational t.
    Verify {
        /// Rational literal such as 1/4.
        #[arg(long, value_parser = parse_t)]
        t: Rational,
    },
    /// CSV of spectra and cusp-shape convergence over a range of t.
    Sweep {
        #[arg(long, value_parser = parse_t)]
        t_min: Rational,
        #[arg(long, value_parser = parse_t)]
        t_max: Rational,
        #[arg(long, default_value_t = 11)]
        steps: usize,
    },
}

#[derive(Debug, Subcommand)]
enum CuspCommand {
    /// Truncated cusp volume table (CSV and SVG).
    Volume {
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        /// Horoball floor of the fundamental domain.
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [10.0, 20.0, 40.0, 80.0])]
        cutoffs: Vec<f64>,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Displacement of the meridian across horospheres (CSV and SVG).
    Displacement {
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0, 8.0, 16.0])]
        levels: Vec<f64>,
    },
}

#[derive(Debug, Args)]
struct QuadArgs {
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Gauss-Legendre nodes in cos(theta) of the sphere rule.
    #[arg(long)]
    sphere_theta: Option<usize>,
    /// Uniform nodes in phi of the sphere rule (even).
    #[arg(long)]
    sphere_phi: Option<usize>,
}

impl QuadArgs {
    fn spec(&self, seed: u64) -> QuadratureSpec {
        let d = QuadratureSpec::default();
        QuadratureSpec {
            mc_samples: self.samples.unwrap_or(d.mc_samples),
            sphere_theta: self.sphere_theta.unwrap_or(d.sphere_theta),
            sphere_phi: self.sphere_phi.unwrap_or(d.sphere_phi),
            seed,
            ..d
        }
    }
}

#[derive(Debug, Subcommand)]
enum LatticeCommand {
    /// Normalizes a generator pair given as JSON.
    Normalize {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    D0,
    Dprime,
    Dt,
    Unitball,
}

impl Family {
    fn descriptor(self, t: Option<f64>) -> DomainDescriptor {
        let family = match self {
            Family::D0 => "D0",
            Family::Dprime => "DPrime",
            Family::Dt => "Dt",
            Family::Unitball => "UnitBall",
        };
        DomainDescriptor { family: family.into(), t, level: None }
    }

    fn default_ranges(self) -> ((f64, f64), (f64, f64)) {
        match self {
            Family::Unitball => ((-0.9, 0.9), (-0.9, 0.9)),
            Family::D0 => ((-2.0, 2.0), (-2.0, 2.0)),
            Family::Dprime | Family::Dt => ((0.1, 3.0), (-2.0, 2.0)),
        }
    }
}

#[derive(Debug, Subcommand)]
enum DomainCommand {
    /// Boundary and horosphere meshes (OBJ) and an x3-slice (SVG).
    Export {
        #[arg(long, value_enum)]
        family: Family,
        /// Parameter of the Dt family.
        #[arg(long)]
        t: Option<f64>,
        /// Horosphere level.
        #[arg(long, default_value_t = 1.0)]
        level: f64,
        #[arg(long)]
        obj: bool,
        #[arg(long)]
        svg: bool,
        /// Vertices per axis of the OBJ meshes.
        #[arg(long, default_value_t = 41)]
        resolution: usize,
        /// x2 range as "min,max"; defaults depend on the family.
        #[arg(long, value_delimiter = ',', num_args = 2, allow_negative_numbers = true)]
        x2_range: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', num_args = 2, allow_negative_numbers = true)]
        x3_range: Option<Vec<f64>>,
        /// x3 value of the SVG slice.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        slice_x3: f64,
    },
}

fn parse_t(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Collects the files of one run and writes them with a manifest.
struct Run<'a> {
    out: &'a Path,
    outputs: Vec<String>,
}

impl<'a> Run<'a> {
    fn new(out: &'a Path) -> Result<Self, CliError> {
        fs::create_dir_all(out).map_err(|source| CliError::Io { path: out.to_path_buf(), source })?;
        Ok(Run { out, outputs: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io { path, source })?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn write_json(&mut self, name: &str, v: &Value) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(v).map_err(usage)?;
        self.write(name, &(text + "\n"))
    }

    fn finish(mut self, command: &str, inputs: Value, seed: u64, status: &str) -> Result<(), CliError> {
        let manifest = json!({
            "command": command,
            "inputs": inputs,
            "seed": seed,
            "status": status,
            "versions": {
                "cuspgeom": cuspgeom::VERSION,
                "cuspgeom-cli": env!("CARGO_PKG_VERSION"),
            },
            "outputs": self.outputs.clone(),
        });
        self.write_json("manifest.json", &manifest)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cuspgeom: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Writes the manifest and converts a failed check into [`CliError::Verification`].
fn conclude(run: Run, command: &str, inputs: Value, seed: u64, failure: Option<String>) -> Result<(), CliError> {
    let status = if failure.is_some() { "failed" } else { "ok" };
    run.finish(command, inputs, seed, status)?;
    failure.map_or(Ok(()), |f| Err(CliError::Verification(f)))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut run = Run::new(&cli.out)?;
    let seed = cli.seed;
    match &cli.command {
        Command::Fig8(Fig8Command::Verify { t }) => {
            let report = verify_report(t).map_err(usage)?;
            println!("{}", serde_json::to_string_pretty(&report).map_err(usage)?);
            run.write_json("fig8_verify.json", &report)?;
            let failure = (report["relation_exact"] != json!(true)).then(|| format!("relation not exact at t = {t}"));
            conclude(run, "fig8 verify", json!({"t": t.to_string()}), seed, failure)
        }
        Command::Fig8(Fig8Command::Sweep { t_min, t_max, steps }) => {
            if *steps == 0 || t_min > t_max {
                return Err(CliError::Usage(format!("need steps >= 1 and t-min <= t-max (got {steps}, {t_min}, {t_max})")));
            }
            let rows = sweep(t_min, t_max, *steps).map_err(usage)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).map_err(usage)?;
            }
            let text = String::from_utf8(w.into_inner().map_err(usage)?).map_err(usage)?;
            run.write("fig8_sweep.csv", &text)?;
            let inputs = json!({"t_min": t_min.to_string(), "t_max": t_max.to_string(), "steps": steps});
            conclude(run, "fig8 sweep", inputs, seed, None)
        }
        Command::Cusp(CuspCommand::Volume { s, k, cutoffs, quad }) => {
            let fd = CuspFundamentalDomain::fig8(*s, *k, None).map_err(usage)?;
            let q = quad.spec(seed);
            let table = cusp_volume_table(&fd, cutoffs, &q).map_err(usage)?;
            run.write("cusp_volume.csv", &volume_csv(&table))?;
            run.write("cusp_volume.svg", &volume_svg(&table))?;
            run.write_json("cusp_volume.json", &serde_json::to_value(&table).map_err(usage)?)?;
            print!("{}", volume_csv(&table));
            let failure = if !table.is_monotone() {
                Some("truncated volumes are not increasing".to_string())
            } else if let Some(c) = table.tail_checks.iter().find(|c| !c.holds) {
                Some(format!("tail bound fails at cutoff {}", c.cutoff))
            } else {
                None
            };
            let inputs = json!({"s": s, "k": k, "cutoffs": cutoffs, "quadrature": {
                "mc_samples": q.mc_samples, "sphere_theta": q.sphere_theta, "sphere_phi": q.sphere_phi}});
            conclude(run, "cusp volume", inputs, seed, failure)
        }
        Command::Cusp(CuspCommand::Displacement { s, levels }) => {
            let fd = CuspFundamentalDomain::fig8(*s, 1.0, None).map_err(usage)?;
            let meridian = group_exp(&LieAlgElem::lprime(0.0, fd.b_t)).map_err(usage)?;
            let p = displacement_profile(*s, meridian.matrix(), levels).map_err(usage)?;
            run.write("displacement.csv", &displacement_csv(&p))?;
            run.write("displacement.svg", &displacement_svg(&p))?;
            print!("{}", displacement_csv(&p));
            let spread = p.spread.iter().cloned().fold(0.0, f64::max);
            let failure = if !p.is_strictly_decreasing() {
                Some("displacement is not strictly decreasing".to_string())
            } else if spread > SPREAD_TOL {
                Some(format!("displacement varies by {spread:e} along a horosphere"))
            } else {
                None
            };
            conclude(run, "cusp displacement", json!({"s": s, "levels": levels}), seed, failure)
        }
        Command::Lattice(LatticeCommand::Normalize { input }) => {
            let text = fs::read_to_string(input).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed JSON: {e}")))?;
            let report = normalize_lattice(&lattice_from_json(&v).map_err(usage)?).map_err(usage)?.to_json();
            println!("{}", serde_json::to_string_pretty(&report).map_err(usage)?);
            run.write_json("normalization.json", &report)?;
            conclude(run, "lattice normalize", json!({"in": input.display().to_string(), "lattice": v}), seed, None)
        }
        Command::Domain(DomainCommand::Export { family, t, level, obj, svg, resolution, x2_range, x3_range, slice_x3 }) => {
            if !obj && !svg {
                return Err(CliError::Usage("choose at least one of --obj and --svg".into()));
            }
            let dom = family.descriptor(*t).build().map_err(usage)?;
            let (d2, d3) = family.default_ranges();
            let r2 = x2_range.as_ref().map_or(d2, |r| (r[0], r[1]));
            let r3 = x3_range.as_ref().map_or(d3, |r| (r[0], r[1]));
            let hs = Horosphere::new(dom.clone(), *level).map_err(usage)?;
            if *obj {
                let n = (*resolution, *resolution);
                run.write("boundary.obj", &boundary_obj(&dom, r2, r3, n).map_err(usage)?)?;
                run.write("horosphere.obj", &horosphere_obj(&hs, r2, r3, n).map_err(usage)?)?;
            }
            if *svg {
                run.write("slice.svg", &slice_svg(&dom, &hs, *slice_x3, r2, *resolution)?)?;
            }
            let inputs = json!({"family": dom.name(), "t": t, "level": level, "obj": obj, "svg": svg,
                "resolution": resolution, "x2_range": [r2.0, r2.1], "x3_range": [r3.0, r3.1], "slice_x3": slice_x3});
            conclude(run, "domain export", inputs, seed, None)
        }
        Command::Selftest => {
            let outcomes = run_selftest(seed);
            for o in &outcomes {
                println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
            }
            run.write_json("selftest.json", &serde_json::to_value(&outcomes).map_err(usage)?)?;
            let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
            let failure = (!failed.is_empty()).then(|| failed.join(", "));
            conclude(run, "selftest", json!({}), seed, failure)
        }
    }
}

/// Boundary and horosphere over the `x₂` range at fixed `x₃`, as one SVG plot.
fn slice_svg(dom: &ConvexDomain, hs: &Horosphere, x3: f64, r2: (f64, f64), n: usize) -> Result<String, CliError> {
    if n < 2 {
        return Err(CliError::Usage("resolution must be at least 2".into()));
    }
    let xs: Vec<f64> = (0..n).map(|i| r2.0 + (r2.1 - r2.0) * i as f64 / (n - 1) as f64).collect();
    let boundary: Vec<(f64, f64)> =
        xs.iter().map(|&x2| dom.boundary_value(x2, x3).map(|y| (x2, y))).collect::<Result<_, _>>().map_err(usage)?;
    let horo: Vec<(f64, f64)> =
        xs.iter().map(|&x2| hs.height(x2, x3).map(|y| (x2, y))).collect::<Result<_, _>>().map_err(usage)?;
    let title = format!("{} at x3 = {x3}, horosphere level {}", dom.name(), hs.level);
    Ok(polyline_svg(&title, "x2", "x1", &[(boundary, "#1f4e9c"), (horo, "#c0392b")]))
}
