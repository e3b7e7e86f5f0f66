//! Parameter sweeps: IPR-versus-`V0` transition curves, `(E, V0)` phase
//! diagrams and mobility-edge traces.
//!
//! Every sweep evaluates its `V0` columns independently and merges them in
//! grid order, so results do not depend on the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dual::dual_ipr_real;
use crate::error::{Error, Result};
use crate::floquet::{EffectiveFamily, DEFAULT_J_CAP};
use crate::model::{build_static_aah, DriveSpec, LatticeSpec, TridiagonalHamiltonian};
use crate::spectra::{eig_tridiagonal, ipr, Which};

pub const DEFAULT_WINDOW_FRACTION: f64 = 0.15;
pub const DEFAULT_EDGE_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelTag {
    StaticAah,
    Effective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateSelector {
    Ground,
    Index(usize),
}

impl StateSelector {
    fn index(self) -> usize {
        match self {
            StateSelector::Ground => 0,
            StateSelector::Index(k) => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyWindow {
    /// The lowest `ceil(fraction * L)` states of each column.
    LowestFraction(f64),
    /// States with `lo <= E < hi`.
    Absolute { lo: f64, hi: f64 },
}

impl Default for EnergyWindow {
    fn default() -> Self {
        EnergyWindow::LowestFraction(DEFAULT_WINDOW_FRACTION)
    }
}

impl EnergyWindow {
    fn validate(&self) -> Result<()> {
        match *self {
            EnergyWindow::LowestFraction(f) if f > 0.0 && f <= 1.0 => Ok(()),
            EnergyWindow::Absolute { lo, hi } if lo.is_finite() && hi.is_finite() && lo < hi => Ok(()),
            w => Err(Error::Domain(format!("invalid energy window {w:?}"))),
        }
    }

    fn which(&self, size: usize) -> Which {
        match *self {
            EnergyWindow::LowestFraction(f) => Which::IndexRange {
                lo: 0,
                hi: ((f * size as f64).ceil() as usize).clamp(1, size),
            },
            EnergyWindow::Absolute { lo, hi } => Which::ValueWindow { lo, hi },
        }
    }
}

/// Builds the chain Hamiltonian for each `V0` of a sweep.
enum Builder {
    Static(LatticeSpec),
    Effective(Box<EffectiveFamily>),
}

impl Builder {
    fn new(template: &LatticeSpec, model: ModelTag, drive: Option<&DriveSpec>, v0_grid: &[f64]) -> Result<Self> {
        if v0_grid.is_empty() {
            return Err(Error::Domain("V0 grid is empty".into()));
        }
        if v0_grid.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidSpec("V0 values must be finite and >= 0".into()));
        }
        match model {
            ModelTag::StaticAah => Ok(Builder::Static(*template)),
            ModelTag::Effective => {
                let drive = drive.ok_or_else(|| {
                    Error::InvalidDrive("the effective model needs drive parameters".into())
                })?;
                let v0_max = v0_grid.iter().copied().fold(0.0, f64::max);
                Ok(Builder::Effective(Box::new(EffectiveFamily::new(
                    template,
                    drive,
                    v0_max,
                    DEFAULT_J_CAP,
                )?)))
            }
        }
    }

    fn build(&self, v0: f64) -> Result<TridiagonalHamiltonian> {
        match self {
            Builder::Static(t) => {
                let s = t.with_v0(v0);
                s.validate()?;
                Ok(build_static_aah(&s))
            }
            Builder::Effective(f) => Ok(f.hamiltonian(v0)?.base),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionCurve {
    pub model_tag: ModelTag,
    pub state_selector: StateSelector,
    pub v0_grid: Vec<f64>,
    pub ipr_real: Vec<f64>,
    /// NaN where the chain length differs from the flux denominator and the
    /// dual transform is undefined.
    pub ipr_dual: Vec<f64>,
}

pub fn transition_curve(
    template: &LatticeSpec,
    model: ModelTag,
    drive: Option<&DriveSpec>,
    v0_grid: &[f64],
    selector: StateSelector,
) -> Result<TransitionCurve> {
    template.validate()?;
    let builder = Builder::new(template, model, drive, v0_grid)?;
    let k = selector.index();
    if k >= template.size {
        return Err(Error::Domain(format!("state index {k} outside 0..{}", template.size)));
    }
    let points: Vec<(f64, f64)> = v0_grid
        .par_iter()
        .map(|&v0| {
            let h = builder.build(v0)?;
            let sol = eig_tridiagonal(&h, Which::IndexRange { lo: k, hi: k + 1 })?;
            let v = &sol.vectors[0];
            let dual = if template.is_commensurate() {
                dual_ipr_real(v, template)?
            } else {
                f64::NAN
            };
            Ok((ipr(v)?, dual))
        })
        .collect::<Result<_>>()?;
    Ok(TransitionCurve {
        model_tag: model,
        state_selector: selector,
        v0_grid: v0_grid.to_vec(),
        ipr_real: points.iter().map(|p| p.0).collect(),
        ipr_dual: points.iter().map(|p| p.1).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub v0_index: usize,
    pub energy: f64,
    pub ipr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub model_tag: ModelTag,
    pub theta: f64,
    pub size: usize,
    pub window: EnergyWindow,
    pub v0_grid: Vec<f64>,
    /// Ordered by `v0_index`, then energy.
    pub records: Vec<PhaseRecord>,
}

impl PhaseDiagram {
    pub fn column(&self, v0_index: usize) -> impl Iterator<Item = &PhaseRecord> {
        self.records.iter().filter(move |r| r.v0_index == v0_index)
    }
}

pub fn phase_diagram(
    template: &LatticeSpec,
    model: ModelTag,
    drive: Option<&DriveSpec>,
    theta: f64,
    v0_grid: &[f64],
    window: EnergyWindow,
) -> Result<PhaseDiagram> {
    window.validate()?;
    let template = template.with_theta(theta);
    template.validate()?;
    let builder = Builder::new(&template, model, drive, v0_grid)?;
    let which = window.which(template.size);
    let columns: Vec<Vec<PhaseRecord>> = v0_grid
        .par_iter()
        .enumerate()
        .map(|(v0_index, &v0)| {
            let h = builder.build(v0)?;
            let sol = eig_tridiagonal(&h, which)?;
            sol.values
                .iter()
                .zip(&sol.vectors)
                .map(|(&energy, v)| Ok(PhaseRecord { v0_index, energy, ipr: ipr(v)? }))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(PhaseDiagram {
        model_tag: model,
        theta,
        size: template.size,
        window,
        v0_grid: v0_grid.to_vec(),
        records: columns.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeColumn {
    pub v0: f64,
    /// Energies where the IPR crosses the threshold between neighbouring
    /// states, interpolated linearly in IPR.
    pub energies: Vec<f64>,
}

/// One entry per `V0` column; columns without crossings have no energies.
pub fn mobility_edge_trace(pd: &PhaseDiagram, ipr_threshold: f64) -> Vec<EdgeColumn> {
    let mut out: Vec<EdgeColumn> = pd
        .v0_grid
        .iter()
        .map(|&v0| EdgeColumn { v0, energies: Vec::new() })
        .collect();
    for pair in pd.records.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.v0_index != b.v0_index {
            continue;
        }
        if (a.ipr >= ipr_threshold) != (b.ipr >= ipr_threshold) {
            let t = (ipr_threshold - a.ipr) / (b.ipr - a.ipr);
            out[a.v0_index].energies.push(a.energy + t * (b.energy - a.energy));
        }
    }
    out
}

/// Largest forward-difference slope of `y` over the grid, reported at the
/// midpoint of the winning interval.
pub fn steepest_rise(grid: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    grid.windows(2)
        .zip(y.windows(2))
        .map(|(g, v)| (0.5 * (g[0] + g[1]), (v[1] - v[0]) / (g[1] - g[0])))
        .filter(|(_, s)| s.is_finite())
        .fold(None, |best: Option<(f64, f64)>, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        })
}

/// Least-squares slope of `y` against `grid`.
pub fn mean_gradient(grid: &[f64], y: &[f64]) -> Option<f64> {
    let n = grid.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = grid[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let sxx: f64 = grid[..n].iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = grid[..n].iter().zip(&y[..n]).map(|(x, v)| (x - mx) * (v - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `start, start + step, ...` up to and including `stop` (within rounding).
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step > 0.0 && stop >= start) {
        return Err(Error::Domain(format!("invalid grid {start}..={stop} step {step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    // Snap to 1e-12 so that e.g. 0.05 * 3 prints as 0.15.
    Ok((0..=n)
        .map(|k| ((start + step * k as f64) * 1e12).round() / 1e12)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Flux;

    fn template(size: usize) -> LatticeSpec {
        LatticeSpec::commensurate(Flux::with_denominator(size as u64).unwrap(), 0.0, 1.0).unwrap()
    }

    #[test]
    fn free_chain_ground_state_ipr() {
        let t = template(233);
        let c = transition_curve(&t, ModelTag::StaticAah, None, &[0.0], StateSelector::Ground).unwrap();
        let want = 3.0 / (2.0 * 234.0);
        assert!((c.ipr_real[0] - want).abs() < 1e-12, "{} vs {want}", c.ipr_real[0]);
        assert!(c.ipr_dual[0] > 0.0 && c.ipr_dual[0] <= 1.0);
    }

    #[test]
    fn synthetic_edges() {
        let iprs = [0.01, 0.02, 0.7, 0.8, 0.01];
        let pd = PhaseDiagram {
            model_tag: ModelTag::Effective,
            theta: 0.0,
            size: 5,
            window: EnergyWindow::default(),
            v0_grid: vec![1.0, 2.0],
            records: iprs
                .iter()
                .enumerate()
                .map(|(k, &ipr)| PhaseRecord { v0_index: 1, energy: k as f64, ipr })
                .collect(),
        };
        let trace = mobility_edge_trace(&pd, 0.5);
        assert!(trace[0].energies.is_empty());
        assert_eq!(trace[1].energies.len(), 2);
        assert!(trace[1].energies[0] > 1.0 && trace[1].energies[0] < 2.0);
        assert!(trace[1].energies[1] > 3.0 && trace[1].energies[1] < 4.0);
        assert!(mobility_edge_trace(&pd, 0.9).iter().all(|c| c.energies.is_empty()));
    }

    #[test]
    fn effective_needs_drive_and_grid() {
        let t = template(89);
        assert!(transition_curve(&t, ModelTag::Effective, None, &[1.0], StateSelector::Ground).is_err());
        assert!(transition_curve(&t, ModelTag::StaticAah, None, &[], StateSelector::Ground).is_err());
        assert!(transition_curve(&t, ModelTag::StaticAah, None, &[1.0], StateSelector::Index(89)).is_err());
        let w = EnergyWindow::Absolute { lo: 1.0, hi: 0.0 };
        assert!(phase_diagram(&t, ModelTag::StaticAah, None, 0.0, &[1.0], w).is_err());
    }

    #[test]
    fn free_column_is_extended() {
        let t = template(377);
        let pd = phase_diagram(&t, ModelTag::StaticAah, None, 0.0, &[0.0, 3.0], EnergyWindow::default()).unwrap();
        let col: Vec<_> = pd.column(0).collect();
        assert_eq!(col.len(), 57);
        assert!(col.iter().all(|r| r.ipr <= 5.0 / 377.0));
        assert!(col.windows(2).all(|w| w[0].energy <= w[1].energy));
        assert!(pd.column(1).all(|r| r.ipr > 0.1));
    }

    #[test]
    fn rise_and_gradient_helpers() {
        let g = [0.0, 1.0, 2.0, 3.0];
        let y = [0.0, 0.1, 0.9, 1.0];
        assert_eq!(steepest_rise(&g, &y), Some((1.5, 0.8)));
        assert!((mean_gradient(&g, &[1.0, 3.0, 5.0, 7.0]).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(linear_grid(0.0, 1.0, 0.25).unwrap().len(), 5);
        assert_eq!(linear_grid(3.0, 6.0, 0.02).unwrap().len(), 151);
    }
}
