//! Brute-force check of the effective Hamiltonian: integrate the driven
//! Schrödinger equation over one period and compare the eigenphases of the
//! one-period propagator with `exp(-i H_eff T)`.
//!
//! The kick operators relate the stroboscopic propagator to `exp(-i H_eff T)`
//! by a similarity transform, so only the phases are compared.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::EffectiveHamiltonian;
use crate::model::{instantaneous_potential, LatticeSpec};
use crate::spectra::eigenvalues;

pub const MAX_SIZE: usize = 64;
pub const MIN_STEPS: usize = 1024;
pub const DEFAULT_STEPS: usize = 8192;
pub const UNITARITY_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyResult {
    /// Ascending, in `(-pi, pi]`.
    pub eigenphases: Vec<f64>,
    /// `max |U^dagger U - I|`.
    pub unitarity_defect: f64,
    pub steps: usize,
    pub period: f64,
}

/// One-period propagator of `H0 + V(t)` by classical RK4, column by column.
pub fn propagator(spec: &LatticeSpec, omega: f64, steps: usize) -> Result<DMatrix<Complex64>> {
    spec.validate()?;
    let l = spec.size;
    if l > MAX_SIZE {
        return Err(Error::Domain(format!("monodromy needs L <= {MAX_SIZE}, got {l}")));
    }
    if steps < MIN_STEPS {
        return Err(Error::Domain(format!("monodromy needs steps >= {MIN_STEPS}, got {steps}")));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidDrive(format!("omega must be finite and > 0, got {omega}")));
    }
    let period = TAU / omega;
    let h = period / steps as f64;
    // Potential at every half step, shared by all columns.
    let potentials: Vec<Vec<f64>> = (0..=2 * steps)
        .map(|k| instantaneous_potential(spec, 0.5 * h * k as f64, omega))
        .collect();

    let columns: Vec<Vec<Complex64>> = (0..l)
        .into_par_iter()
        .map(|c| {
            let mut psi = vec![Complex64::new(0.0, 0.0); l];
            psi[c] = Complex64::new(1.0, 0.0);
            let mut k1 = vec![Complex64::new(0.0, 0.0); l];
            let mut k2 = k1.clone();
            let mut k3 = k1.clone();
            let mut k4 = k1.clone();
            let mut tmp = k1.clone();
            for s in 0..steps {
                let (v0, vh, v1) = (&potentials[2 * s], &potentials[2 * s + 1], &potentials[2 * s + 2]);
                rhs(&psi, v0, &mut k1);
                axpy_into(&psi, 0.5 * h, &k1, &mut tmp);
                rhs(&tmp, vh, &mut k2);
                axpy_into(&psi, 0.5 * h, &k2, &mut tmp);
                rhs(&tmp, vh, &mut k3);
                axpy_into(&psi, h, &k3, &mut tmp);
                rhs(&tmp, v1, &mut k4);
                for i in 0..l {
                    psi[i] += (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) * (h / 6.0);
                }
            }
            psi
        })
        .collect();
    Ok(DMatrix::from_fn(l, l, |i, j| columns[j][i]))
}

/// `-i (H0 + V) psi` for the open chain with unit hopping.
fn rhs(psi: &[Complex64], v: &[f64], out: &mut [Complex64]) {
    let l = psi.len();
    for i in 0..l {
        let mut hpsi = psi[i] * v[i];
        if i > 0 {
            hpsi += psi[i - 1];
        }
        if i + 1 < l {
            hpsi += psi[i + 1];
        }
        out[i] = Complex64::new(hpsi.im, -hpsi.re);
    }
}

fn axpy_into(x: &[Complex64], a: f64, y: &[Complex64], out: &mut [Complex64]) {
    for i in 0..x.len() {
        out[i] = x[i] + y[i] * a;
    }
}

pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let g = u.adjoint() * u;
    let n = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - want).norm());
        }
    }
    worst
}

pub fn monodromy(spec: &LatticeSpec, omega: f64, steps: usize) -> Result<MonodromyResult> {
    let u = propagator(spec, omega, steps)?;
    let defect = unitarity_defect(&u);
    if defect.is_nan() || defect > UNITARITY_THRESHOLD {
        return Err(Error::NonUnitary { defect, threshold: UNITARITY_THRESHOLD });
    }
    let schur = nalgebra::linalg::Schur::new(u);
    let mut eigenphases: Vec<f64> = schur
        .eigenvalues()
        .ok_or_else(|| Error::Domain("Schur decomposition failed".into()))?
        .iter()
        .map(|z| z.arg())
        .collect();
    eigenphases.sort_by(f64::total_cmp);
    Ok(MonodromyResult {
        eigenphases,
        unitarity_defect: defect,
        steps,
        period: TAU / omega,
    })
}

/// `x` wrapped into `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

/// Sorted `-E_k T` wrapped into `(-pi, pi]`.
pub fn effective_phases(heff: &EffectiveHamiltonian) -> Result<Vec<f64>> {
    let period = heff.drive.period();
    let mut phases: Vec<f64> = eigenvalues(&heff.base)?
        .into_iter()
        .map(|e| wrap_phase(-e * period))
        .collect();
    phases.sort_by(f64::total_cmp);
    Ok(phases)
}

/// Largest circular distance between matched phases. Both lists are sorted
/// on the circle, so the matching is the best cyclic shift.
pub fn phase_mismatch(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let n = a.len();
    let mut best = f64::INFINITY;
    for shift in 0..n.max(1) {
        let worst = (0..n)
            .map(|k| circular_distance(a[k], b[(k + shift) % n]))
            .fold(0.0f64, f64::max);
        best = best.min(worst);
    }
    Ok(if n == 0 { 0.0 } else { best })
}

pub fn compare_to_effective(m: &MonodromyResult, heff: &EffectiveHamiltonian) -> Result<f64> {
    if (heff.drive.period() - m.period).abs() > 1e-12 * m.period {
        return Err(Error::Domain("monodromy and effective Hamiltonian use different drive periods".into()));
    }
    phase_mismatch(&m.eigenphases, &effective_phases(heff)?)
}
