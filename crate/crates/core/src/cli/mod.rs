//! Batch front end for the `aah` binary.

pub mod config;
pub mod output;
pub mod selftest;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::dual::{centered_label, kappa_map, onsite_fourier_spectrum, support_summary};
use crate::error::Error;
use crate::floquet::build_effective_hamiltonian;
use crate::model::{DriveSpec, LatticeSpec};
use crate::oracle::{compare_to_effective, monodromy};
use crate::scan::{mean_gradient, mobility_edge_trace, phase_diagram, transition_curve, ModelTag, StateSelector};
use crate::spectra::{d2_fit, D2Fit};

use config::{Execution, Resolved, RunConfig};
use output::{num, Csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "aah", version, about = "Localization in the driven Aubry-André-Harper chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; every field is optional.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Also render the phase diagram as SVG.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Reserved. Nothing here uses random numbers, so this is rejected.
    #[arg(long, global = true)]
    pub seedless: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// IPR versus V0 for the static chain.
    AahCurve,
    /// IPR versus V0 for the effective driven chain.
    EffCurve,
    /// IPR over the (E, V0) plane, with mobility-edge traces.
    PhaseDiagram,
    /// Finite-size scaling exponent of the ground-state IPR.
    D2,
    /// Fourier components of the effective on-site profile.
    DualSpectrum,
    /// Monodromy eigenphases against the effective Hamiltonian.
    Oracle,
    /// Structural invariant checks.
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::AahCurve => "aah-curve",
            Command::EffCurve => "eff-curve",
            Command::PhaseDiagram => "phase-diagram",
            Command::D2 => "d2",
            Command::DualSpectrum => "dual-spectrum",
            Command::Oracle => "oracle",
            Command::Selftest => "selftest",
        }
    }

    fn forced_model(self) -> Option<ModelTag> {
        match self {
            Command::AahCurve => Some(ModelTag::StaticAah),
            Command::EffCurve => Some(ModelTag::Effective),
            _ => None,
        }
    }
}

enum Failure {
    Config(String),
    Numerical(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec(_) | Error::InvalidDrive(_) | Error::Config(_) | Error::NotUnitary { .. } => {
                Failure::Config(e.to_string())
            }
            e => Failure::Numerical(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numerical(Error::Io(e))
    }
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    match try_run(&cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(msg)) => {
            eprintln!("aah: config error: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("aah: {e}");
            EXIT_NUMERICAL
        }
    }
}

fn try_run(cli: &Cli) -> Result<(), Failure> {
    if cli.seedless {
        return Err(Failure::Config(
            "--seedless is reserved: every computation is already deterministic and uses no random numbers".into(),
        ));
    }
    let cfg = match &cli.config {
        Some(path) => RunConfig::from_path(path).map_err(Failure::Config)?,
        None => RunConfig::default(),
    };
    if let (Some(forced), Some(given)) = (cli.command.forced_model(), cfg.model) {
        if forced != given {
            return Err(Failure::Config(format!(
                "{} always uses model {forced:?}; config asks for {given:?}",
                cli.command.name()
            )));
        }
    }
    let mut resolved = Resolved::new(cli.command, &cfg).map_err(Failure::Config)?;
    if let Some(m) = cli.command.forced_model() {
        resolved.model = m;
    }
    let exec = Execution::new(&cfg, cli.out.clone(), cli.workers, cli.svg);
    std::fs::create_dir_all(&exec.out_dir)
        .map_err(|e| Failure::Config(format!("cannot create {}: {e}", exec.out_dir.display())))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(exec.workers)
        .build()
        .map_err(|e| Failure::Config(format!("cannot start {} workers: {e}", exec.workers)))?;
    let files = pool.install(|| execute(cli.command, &resolved, &exec))?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn execute(cmd: Command, cfg: &Resolved, exec: &Execution) -> Result<Vec<PathBuf>, Failure> {
    let dir = &exec.out_dir;
    let spec = cfg.lattice_spec()?;
    let drive = if cfg.model == ModelTag::Effective || cmd == Command::Oracle {
        Some(cfg.drive_spec()?)
    } else {
        None
    };
    match cmd {
        Command::AahCurve | Command::EffCurve => {
            let curve = transition_curve(&spec, cfg.model, drive.as_ref(), &cfg.v0_grid, cfg.selector())?;
            let mut csv = Csv::new(cfg, &[], "v0,ipr_real,ipr_dual");
            for i in 0..curve.v0_grid.len() {
                csv.row(&[num(curve.v0_grid[i]), num(curve.ipr_real[i]), num(curve.ipr_dual[i])]);
            }
            let name = format!("{}.csv", cmd.name().replace('-', "_"));
            Ok(vec![output::write(dir, &name, &csv.into_string())?])
        }
        Command::PhaseDiagram => {
            let notes = vec![format!(
                "energy window {:?} and edge threshold {} are configurable defaults",
                cfg.window, cfg.edge_threshold
            )];
            let pd = phase_diagram(&spec, cfg.model, drive.as_ref(), spec.theta, &cfg.v0_grid, cfg.window)?;
            let mut csv = Csv::new(cfg, &notes, "v0,energy,ipr");
            for r in &pd.records {
                csv.row(&[num(pd.v0_grid[r.v0_index]), num(r.energy), num(r.ipr)]);
            }
            let trace = mobility_edge_trace(&pd, cfg.edge_threshold);
            let mut files = vec![
                output::write(dir, "phase_diagram.csv", &csv.into_string())?,
                output::write(dir, "mobility_edges.json", &output::json(cfg, &notes, &trace))?,
            ];
            if exec.svg {
                let stamp = std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                let svg = svg::render(&pd, &format!("unix-time {stamp}"));
                files.push(output::write(dir, "phase_diagram.svg", &svg)?);
            }
            Ok(files)
        }
        Command::D2 => {
            let fits = d2_scan(cfg, &spec, drive.as_ref())?;
            let mut csv = Csv::new(cfg, &[], "v0,d2,r2,n_sizes");
            for (v0, fit) in cfg.v0_grid.iter().zip(&fits) {
                csv.row(&[num(*v0), num(fit.d2), num(fit.r2), fit.sizes.len().to_string()]);
            }
            #[derive(Serialize)]
            struct Entry<'a> {
                v0: f64,
                fit: &'a D2Fit,
            }
            let entries: Vec<Entry> = cfg.v0_grid.iter().zip(&fits).map(|(&v0, fit)| Entry { v0, fit }).collect();
            Ok(vec![
                output::write(dir, "d2.csv", &csv.into_string())?,
                output::write(dir, "d2.json", &output::json(cfg, &[], &entries))?,
            ])
        }
        Command::DualSpectrum => {
            let spectrum = onsite_fourier_spectrum(&spec)?;
            let mut csv = Csv::new(cfg, &[], "m,m_centered,kappa,re,im,abs");
            for (m, z) in spectrum.iter().enumerate() {
                csv.row(&[
                    m.to_string(),
                    centered_label(m, spec.size).to_string(),
                    kappa_map(m as u64, &spec)?.to_string(),
                    num(z.re),
                    num(z.im),
                    num(z.norm()),
                ]);
            }
            let support = support_summary(&spectrum, &spec, cfg.support_threshold)?;
            Ok(vec![
                output::write(dir, "dual_spectrum.csv", &csv.into_string())?,
                output::write(dir, "dual_spectrum.json", &output::json(cfg, &[], &support))?,
            ])
        }
        Command::Oracle => {
            let report = oracle_report(cfg, &spec, &drive.expect("oracle resolves a drive"))?;
            let mut csv = Csv::new(cfg, &[], "omega,mismatch,unitarity_defect,j_used");
            for p in &report.points {
                csv.row(&[num(p.omega), num(p.mismatch), num(p.unitarity_defect), p.j_used.to_string()]);
            }
            Ok(vec![
                output::write(dir, "oracle.csv", &csv.into_string())?,
                output::write(dir, "oracle.json", &output::json(cfg, &[], &report))?,
            ])
        }
        Command::Selftest => {
            let report = selftest::run_all();
            let text = report.render();
            print!("{text}");
            let path = output::write(dir, "selftest.txt", &text)?;
            if report.all_passed() {
                Ok(vec![path])
            } else {
                Err(Failure::Numerical(Error::Domain("selftest reported failures".into())))
            }
        }
    }
}

/// Ground-state IPR across the size ladder for every `V0`, then one fit per `V0`.
fn d2_scan(cfg: &Resolved, spec: &LatticeSpec, drive: Option<&DriveSpec>) -> crate::Result<Vec<D2Fit>> {
    let mut per_size = Vec::with_capacity(cfg.ladder.len());
    for &size in &cfg.ladder {
        let s = LatticeSpec::new(size, spec.flux, spec.theta, spec.v0)?.with_origin(spec.index_origin);
        let curve = transition_curve(&s, cfg.model, drive, &cfg.v0_grid, StateSelector::Ground)?;
        per_size.push((size, curve.ipr_real));
    }
    (0..cfg.v0_grid.len())
        .map(|i| {
            let pairs: Vec<(usize, f64)> = per_size.iter().map(|(l, iprs)| (*l, iprs[i])).collect();
            d2_fit(&pairs)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct OraclePoint {
    pub omega: f64,
    pub mismatch: f64,
    pub unitarity_defect: f64,
    pub j_used: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub steps: usize,
    pub points: Vec<OraclePoint>,
    /// Least-squares slope of `ln mismatch` against `ln omega`.
    pub loglog_slope: Option<f64>,
}

pub fn oracle_report(cfg: &Resolved, spec: &LatticeSpec, drive: &DriveSpec) -> crate::Result<OracleReport> {
    let mut points = Vec::new();
    for &omega in &cfg.oracle_omegas {
        let d = DriveSpec { omega, ..*drive };
        let m = monodromy(spec, omega, cfg.oracle_steps)?;
        let heff = build_effective_hamiltonian(spec, &d)?;
        points.push(OraclePoint {
            omega,
            mismatch: compare_to_effective(&m, &heff)?,
            unitarity_defect: m.unitarity_defect,
            j_used: heff.j_used,
        });
    }
    let positive = points.iter().all(|p| p.mismatch > 0.0);
    let loglog_slope = if positive {
        let x: Vec<f64> = points.iter().map(|p| p.omega.ln()).collect();
        let y: Vec<f64> = points.iter().map(|p| p.mismatch.ln()).collect();
        mean_gradient(&x, &y)
    } else {
        None
    };
    Ok(OracleReport { steps: cfg.oracle_steps, points, loglog_slope })
}
