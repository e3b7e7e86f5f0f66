//! Run configuration: a TOML file whose fields are all optional, resolved
//! against per-subcommand defaults into the values actually used.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::model::{DriveSpec, Flux, LatticeSpec, DEFAULT_INDEX_ORIGIN};
use crate::scan::{linear_grid, EnergyWindow, ModelTag, StateSelector, DEFAULT_EDGE_THRESHOLD, DEFAULT_WINDOW_FRACTION};
use crate::spectra::DEFAULT_LADDER;

use super::Command;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<ModelTag>,
    #[serde(default)]
    pub lattice: LatticeSection,
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub size: Option<usize>,
    pub p: Option<u64>,
    pub q: Option<u64>,
    pub theta: Option<f64>,
    pub v0: Option<f64>,
    pub index_origin: Option<i64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub omega: Option<f64>,
    pub j_max: Option<usize>,
    pub tail_tol: Option<f64>,
    /// Drive frequencies for the `oracle` subcommand.
    pub omegas: Option<Vec<f64>>,
    /// Integrator steps per period for the `oracle` subcommand.
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub v0_values: Option<Vec<f64>>,
    pub v0_start: Option<f64>,
    pub v0_stop: Option<f64>,
    pub v0_step: Option<f64>,
    pub state_index: Option<usize>,
    pub window_fraction: Option<f64>,
    pub window_lo: Option<f64>,
    pub window_hi: Option<f64>,
    pub edge_threshold: Option<f64>,
    pub ladder: Option<Vec<usize>>,
    pub support_threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub svg: Option<bool>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

/// Everything a run depends on, after defaults. This is what gets embedded
/// in output files. Worker count and output directory are left out: they do
/// not change results, and files must be identical across worker counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub command: String,
    pub model: ModelTag,
    pub lattice: ResolvedLattice,
    pub drive: ResolvedDrive,
    pub v0_grid: Vec<f64>,
    pub state_index: usize,
    pub window: EnergyWindow,
    pub edge_threshold: f64,
    pub ladder: Vec<usize>,
    pub oracle_omegas: Vec<f64>,
    pub oracle_steps: usize,
    pub support_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedLattice {
    pub size: usize,
    pub p: u64,
    pub q: u64,
    pub theta: f64,
    pub v0: f64,
    pub index_origin: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedDrive {
    pub omega: f64,
    pub j_max: usize,
    pub tail_tol: f64,
}

pub struct Execution {
    pub out_dir: PathBuf,
    pub workers: usize,
    pub svg: bool,
}

struct Defaults {
    model: ModelTag,
    size: usize,
    v0: (f64, f64, f64),
}

fn defaults(cmd: Command) -> Defaults {
    let (model, size, v0) = match cmd {
        Command::AahCurve => (ModelTag::StaticAah, 987, (0.0, 4.0, 0.05)),
        Command::EffCurve => (ModelTag::Effective, 1597, (0.0, 6.0, 0.05)),
        Command::PhaseDiagram => (ModelTag::Effective, 987, (0.0, 10.0, 0.5)),
        Command::D2 => (ModelTag::StaticAah, 4181, (1.5, 2.5, 1.0)),
        Command::DualSpectrum => (ModelTag::Effective, 4181, (1.0, 1.0, 1.0)),
        Command::Oracle => (ModelTag::Effective, 13, (2.0, 2.0, 1.0)),
        Command::Selftest => (ModelTag::Effective, 89, (1.0, 1.0, 1.0)),
    };
    Defaults { model, size, v0 }
}

impl Resolved {
    pub fn new(cmd: Command, cfg: &RunConfig) -> Result<Self, String> {
        let d = defaults(cmd);
        let l = &cfg.lattice;
        let size = l.size.unwrap_or(d.size);
        let (p, q) = match (l.p, l.q) {
            (Some(p), Some(q)) => (p, q),
            (None, None) => {
                let f = Flux::with_denominator(size as u64).ok_or_else(|| {
                    format!("lattice.size = {size} is not a Fibonacci number; set lattice.p and lattice.q")
                })?;
                (f.p, f.q)
            }
            _ => return Err("lattice.p and lattice.q must be given together".into()),
        };
        let lattice = ResolvedLattice {
            size,
            p,
            q,
            theta: l.theta.unwrap_or(0.0),
            v0: l.v0.unwrap_or(d.v0.0),
            index_origin: l.index_origin.unwrap_or(DEFAULT_INDEX_ORIGIN),
        };
        let drive = ResolvedDrive {
            omega: cfg.drive.omega.unwrap_or(20.0),
            j_max: cfg.drive.j_max.unwrap_or(DriveSpec::DEFAULT_J_MAX),
            tail_tol: cfg.drive.tail_tol.unwrap_or(DriveSpec::DEFAULT_TAIL_TOL),
        };

        let s = &cfg.sweep;
        let v0_grid = match (&s.v0_values, s.v0_start, s.v0_stop, s.v0_step) {
            (Some(v), None, None, None) => v.clone(),
            (None, start, stop, step) => linear_grid(
                start.unwrap_or(d.v0.0),
                stop.unwrap_or(d.v0.1),
                step.unwrap_or(d.v0.2),
            )
            .map_err(|e| format!("sweep grid: {e}"))?,
            _ => return Err("give either sweep.v0_values or sweep.v0_start/v0_stop/v0_step".into()),
        };
        if v0_grid.is_empty() {
            return Err("sweep.v0_values is empty".into());
        }
        let window = match (s.window_fraction, s.window_lo, s.window_hi) {
            (f, None, None) => EnergyWindow::LowestFraction(f.unwrap_or(DEFAULT_WINDOW_FRACTION)),
            (None, Some(lo), Some(hi)) => EnergyWindow::Absolute { lo, hi },
            _ => return Err("give either sweep.window_fraction or both sweep.window_lo and sweep.window_hi".into()),
        };
        let resolved = Resolved {
            command: cmd.name().to_string(),
            model: cfg.model.unwrap_or(d.model),
            lattice,
            drive,
            v0_grid,
            state_index: s.state_index.unwrap_or(0),
            window,
            edge_threshold: s.edge_threshold.unwrap_or(DEFAULT_EDGE_THRESHOLD),
            ladder: s.ladder.clone().unwrap_or_else(|| DEFAULT_LADDER.to_vec()),
            oracle_omegas: cfg.drive.omegas.clone().unwrap_or_else(|| vec![20.0, 40.0, 80.0]),
            oracle_steps: cfg.drive.steps.unwrap_or(crate::oracle::DEFAULT_STEPS),
            support_threshold: s.support_threshold.unwrap_or(0.05),
        };
        resolved.validate()?;
        Ok(resolved)
    }

    fn validate(&self) -> Result<(), String> {
        self.lattice_spec().map_err(|e| e.to_string())?;
        if self.model == ModelTag::Effective {
            self.drive_spec().map_err(|e| e.to_string())?;
        }
        if self.v0_grid.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err("sweep V0 values must be finite and >= 0".into());
        }
        if self.state_index >= self.lattice.size {
            return Err(format!("sweep.state_index = {} outside 0..{}", self.state_index, self.lattice.size));
        }
        match self.window {
            EnergyWindow::LowestFraction(f) if !(f > 0.0 && f <= 1.0) => {
                return Err(format!("sweep.window_fraction = {f} must lie in (0, 1]"))
            }
            EnergyWindow::Absolute { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
                return Err(format!("energy window [{lo}, {hi}) is invalid"))
            }
            _ => {}
        }
        if !(self.edge_threshold > 0.0 && self.edge_threshold < 1.0) {
            return Err(format!("sweep.edge_threshold = {} must lie in (0, 1)", self.edge_threshold));
        }
        if self.ladder.len() < 3 || self.ladder.iter().any(|&l| l < 2) {
            return Err("sweep.ladder needs at least three sizes >= 2".into());
        }
        if self.oracle_omegas.is_empty() || self.oracle_omegas.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err("drive.omegas must be nonempty, finite and > 0".into());
        }
        if !(self.support_threshold > 0.0 && self.support_threshold < 1.0) {
            return Err("sweep.support_threshold must lie in (0, 1)".into());
        }
        Ok(())
    }

    pub fn flux(&self) -> Flux {
        Flux { p: self.lattice.p, q: self.lattice.q }
    }

    pub fn lattice_spec(&self) -> crate::Result<LatticeSpec> {
        let l = &self.lattice;
        Ok(LatticeSpec::new(l.size, Flux::new(l.p, l.q)?, l.theta, l.v0)?.with_origin(l.index_origin))
    }

    pub fn drive_spec(&self) -> crate::Result<DriveSpec> {
        let d = DriveSpec {
            omega: self.drive.omega,
            j_max: self.drive.j_max,
            tail_tol: self.drive.tail_tol,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn selector(&self) -> StateSelector {
        if self.state_index == 0 {
            StateSelector::Ground
        } else {
            StateSelector::Index(self.state_index)
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("resolved config serializes")
    }
}

impl Execution {
    pub fn new(cfg: &RunConfig, out: Option<PathBuf>, workers: Option<usize>, svg: bool) -> Self {
        Execution {
            out_dir: out
                .or_else(|| cfg.output.dir.clone())
                .unwrap_or_else(|| PathBuf::from("out")),
            workers: workers.or(cfg.output.workers).unwrap_or(0),
            svg: svg || cfg.output.svg.unwrap_or(false),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let r = Resolved::new(Command::PhaseDiagram, &RunConfig::default()).unwrap();
        assert_eq!((r.lattice.p, r.lattice.q, r.lattice.size), (610, 987, 987));
        assert_eq!(r.v0_grid.len(), 21);
        assert_eq!(r.window, EnergyWindow::LowestFraction(0.15));
        assert!(r.to_toml().contains("command = \"phase-diagram\""));
    }

    #[test]
    fn rejects_unknown_and_inconsistent_fields() {
        assert!(RunConfig::from_toml("[lattice]\nsizee = 3\n").is_err());
        let c = RunConfig::from_toml("[lattice]\nsize = 100\n").unwrap();
        assert!(Resolved::new(Command::AahCurve, &c).is_err());
        let c = RunConfig::from_toml("[lattice]\nsize = 100\np = 3\nq = 7\n").unwrap();
        assert!(Resolved::new(Command::AahCurve, &c).is_ok());
        let c = RunConfig::from_toml("[sweep]\nv0_values = [1.0]\nv0_step = 0.1\n").unwrap();
        assert!(Resolved::new(Command::AahCurve, &c).is_err());
        let c = RunConfig::from_toml("[drive]\nomega = -1.0\n").unwrap();
        assert!(Resolved::new(Command::EffCurve, &c).is_err());
    }

    #[test]
    fn parse_error_mentions_location() {
        let e = RunConfig::from_toml("[lattice]\nsize = \"x\"\n").unwrap_err();
        assert!(e.contains("line 2") || e.contains("2:"), "{e}");
    }
}
