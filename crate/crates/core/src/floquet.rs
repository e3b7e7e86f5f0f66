//! High-frequency effective Hamiltonian of the driven chain.
//!
//! The on-site potential `V0 cos(2 pi alpha0 n cos(omega t) + theta)` has
//! diagonal Fourier modes `V_j` whose site profiles are Bessel functions
//! `J_|j|(2 pi alpha0 n)`. Because every `V_j` is diagonal and `V_-j = V_j`,
//! the first-order term `[V_j, V_-j]` vanishes and the second-order double
//! commutator only renormalizes the hopping:
//!
//! ```text
//! diag(n)      = V0 cos(theta) J_0(x_n)
//! hop(n, n+1)  = 1 - (V0/omega)^2 sum_j (c_j / j)^2 (J_j(x_{n+1}) - J_j(x_n))^2
//! ```
//!
//! with `x_n = 2 pi alpha0 n` and `c_j = cos(theta)` (even `j`) or
//! `sin(theta)` (odd `j`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DriveSpec, LatticeSpec, TridiagonalHamiltonian};
use crate::specfun::bessel_all_orders;

/// Hard cap on the truncation order chosen to meet `tail_tol`.
pub const DEFAULT_J_CAP: usize = 1_000_000;

/// Diagonal Fourier mode `V_j` of the driven potential.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierMode {
    pub j: i64,
    pub diagonal: Vec<f64>,
}

/// Prefactor of `V0 J_|j|` in `V_j`: `cos(theta)` for `j = 0`,
/// `(-1)^{|j|/2} cos(theta)` for even `j`, `(-1)^{(|j|+1)/2} sin(theta)` for odd `j`.
pub fn mode_prefactor(theta: f64, j: i64) -> f64 {
    let order = j.unsigned_abs();
    if order.is_multiple_of(2) {
        let sign = if (order / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * theta.cos()
    } else {
        let sign = if order.div_ceil(2).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * theta.sin()
    }
}

/// Squared prefactor entering the hopping correction of order `j >= 1`.
fn parity_weight(theta: f64, order: usize) -> f64 {
    if order.is_multiple_of(2) {
        theta.cos().powi(2)
    } else {
        theta.sin().powi(2)
    }
}

/// `J_order(x)` for signed `x`, from a column computed at `|x|`.
fn signed_bessel(values: &[f64], order: usize, negative: bool) -> f64 {
    let v = values[order];
    if negative && order % 2 == 1 {
        -v
    } else {
        v
    }
}

fn bessel_columns_for(spec: &LatticeSpec, j_max: usize) -> Result<Vec<Vec<f64>>> {
    spec.labels()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| {
            let x = spec.flux.bessel_argument(n);
            let col = bessel_all_orders(x.abs(), j_max)?;
            Ok((0..=j_max)
                .map(|j| signed_bessel(&col.values, j, x < 0.0))
                .collect())
        })
        .collect()
}

pub fn fourier_mode(spec: &LatticeSpec, j: i64) -> Result<FourierMode> {
    let order = j.unsigned_abs() as usize;
    let pref = spec.v0 * mode_prefactor(spec.theta, j);
    let diagonal = spec
        .labels()
        .map(|n| {
            let x = spec.flux.bessel_argument(n);
            let col = bessel_all_orders(x.abs(), order)?;
            Ok(pref * signed_bessel(&col.values, order, x < 0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FourierMode { j, diagonal })
}

/// The double commutator `[[V_j, H0], V_-j]` for the open chain. It has no
/// diagonal; the `n, n+1` hopping is `-(d_{n+1} - d_n)^2` with `d` the
/// diagonal of `V_j`.
pub fn commutator_correction(spec: &LatticeSpec, j: usize) -> Result<TridiagonalHamiltonian> {
    if j == 0 {
        return Err(Error::Domain("commutator correction needs j >= 1".into()));
    }
    let mode = fourier_mode(spec, j as i64)?;
    let offdiag = mode
        .diagonal
        .windows(2)
        .map(|w| -(w[1] - w[0]).powi(2))
        .collect();
    Ok(TridiagonalHamiltonian {
        diag: vec![0.0; spec.size],
        offdiag,
    })
}

/// Largest entry of `[V_j, V_-j]` over `1 <= j <= j_max`. The modes are
/// diagonal, so off-diagonal entries vanish structurally and the diagonal is
/// `d_n d_n - d_n d_n`.
#[allow(clippy::eq_op)]
pub fn first_order_term_norm(spec: &LatticeSpec, j_max: usize) -> Result<f64> {
    let columns = bessel_columns_for(spec, j_max.max(1))?;
    let mut worst = 0.0f64;
    for j in 1..=j_max as i64 {
        let plus = spec.v0 * mode_prefactor(spec.theta, j);
        let minus = spec.v0 * mode_prefactor(spec.theta, -j);
        for col in &columns {
            let a = plus * col[j as usize];
            let b = minus * col[j as usize];
            worst = worst.max((a * b - b * a).abs());
        }
    }
    Ok(worst)
}

/// Largest Bessel argument `|2 pi alpha0 n|` on the chain.
pub fn max_argument(spec: &LatticeSpec) -> f64 {
    let first = spec.flux.bessel_argument(spec.label(0)).abs();
    let last = spec.flux.bessel_argument(spec.label(spec.size - 1)).abs();
    first.max(last)
}

/// Certified bound on the neglected part of the hopping sum,
/// as a function of the truncation order.
///
/// Each neglected term is at most `(V0/omega)^2 (c_j/j)^2 * 4 m_j^2` where
/// `m_j = min(1, (x_max/2)^j / j!)` bounds `|J_j(x)|` on the chain.
#[derive(Debug, Clone)]
pub struct TailProfile {
    /// `suffix[j]` = bound on the sum over orders `> j`, excluding the
    /// `(V0/omega)^2` factor.
    suffix: Vec<f64>,
}

impl TailProfile {
    pub fn new(x_max: f64, theta: f64, floor: f64) -> Self {
        let mut terms = vec![0.0];
        let mut ln_b = 0.0f64;
        let ln_half_x = if x_max > 0.0 { (0.5 * x_max).ln() } else { f64::NEG_INFINITY };
        let mut j = 1usize;
        loop {
            ln_b += ln_half_x - (j as f64).ln();
            let m = if ln_b >= 0.0 { 1.0 } else { ln_b.exp() };
            let t = 4.0 * parity_weight(theta, j) * m * m / (j * j) as f64;
            terms.push(t);
            let ratio = 0.5 * x_max / (j + 1) as f64;
            let envelope = 4.0 * m * m / (j * j) as f64;
            if ratio < 0.5 && ln_b < 0.0 && envelope < floor {
                break;
            }
            j += 1;
        }
        let k = terms.len() - 1;
        // Remainder past k: ratio of consecutive envelopes is < 1/4.
        let envelope_k = 4.0 * (if ln_b >= 0.0 { 1.0 } else { ln_b.exp() }).powi(2) / (k * k) as f64;
        let mut suffix = vec![0.0; k + 1];
        suffix[k] = envelope_k / 3.0;
        for i in (0..k).rev() {
            suffix[i] = suffix[i + 1] + terms[i + 1];
        }
        TailProfile { suffix }
    }

    pub fn bound(&self, j_max: usize) -> f64 {
        self.suffix.get(j_max).copied().unwrap_or_else(|| *self.suffix.last().unwrap())
    }

    /// Smallest order `>= floor` whose scaled tail is `<= tol`.
    pub fn order_for(&self, scale: f64, tol: f64, floor: usize) -> Option<usize> {
        if scale == 0.0 {
            return Some(floor);
        }
        if floor >= self.suffix.len() {
            return (scale * self.bound(floor) <= tol).then_some(floor);
        }
        (floor..self.suffix.len()).find(|&j| scale * self.suffix[j] <= tol)
    }
}

/// Per-bond sums `sum_j (J_j(x_{n+1}) - J_j(x_n))^2 / j^2`, split by parity
/// of `j`. Independent of `V0`, `theta` and `omega`, so one table serves a
/// whole sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoppingSums {
    pub j_max: usize,
    pub even: Vec<f64>,
    pub odd: Vec<f64>,
    pub onsite_j0: Vec<f64>,
}

impl HoppingSums {
    pub fn compute(spec: &LatticeSpec, j_max: usize) -> Result<Self> {
        let labels: Vec<i64> = spec.labels().collect();
        let args: Vec<f64> = labels.iter().map(|&n| spec.flux.bessel_argument(n)).collect();
        let bonds = spec.size - 1;
        let chunk = 64usize;

        let column = |x: f64| -> Result<Vec<f64>> {
            let col = bessel_all_orders(x.abs(), j_max)?;
            Ok((0..=j_max).map(|j| signed_bessel(&col.values, j, x < 0.0)).collect())
        };

        let chunks: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..bonds.div_ceil(chunk))
            .into_par_iter()
            .map(|c| {
                let start = c * chunk;
                let end = ((c + 1) * chunk).min(bonds);
                let mut even = Vec::with_capacity(end - start);
                let mut odd = Vec::with_capacity(end - start);
                let mut j0 = Vec::with_capacity(end - start + 1);
                let mut left = column(args[start])?;
                j0.push(left[0]);
                for k in start..end {
                    let right = column(args[k + 1])?;
                    let (mut se, mut so) = (0.0, 0.0);
                    for j in 1..=j_max {
                        let d = right[j] - left[j];
                        let t = d * d / (j * j) as f64;
                        if j % 2 == 0 {
                            se += t;
                        } else {
                            so += t;
                        }
                    }
                    even.push(se);
                    odd.push(so);
                    j0.push(right[0]);
                    left = right;
                }
                Ok((even, odd, j0))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut sums = HoppingSums {
            j_max,
            even: Vec::with_capacity(bonds),
            odd: Vec::with_capacity(bonds),
            onsite_j0: Vec::with_capacity(spec.size),
        };
        for (i, (e, o, j0)) in chunks.into_iter().enumerate() {
            sums.even.extend(e);
            sums.odd.extend(o);
            // Neighbouring chunks share their boundary site.
            let skip = usize::from(i > 0);
            sums.onsite_j0.extend(j0.into_iter().skip(skip));
        }
        Ok(sums)
    }

    pub fn assemble(&self, v0: f64, theta: f64, omega: f64) -> TridiagonalHamiltonian {
        let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
        let g = (v0 / omega).powi(2);
        let diag = self.onsite_j0.iter().map(|&j0| v0 * theta.cos() * j0).collect();
        let offdiag = self
            .even
            .iter()
            .zip(&self.odd)
            .map(|(&e, &o)| 1.0 - g * (c2 * e + s2 * o))
            .collect();
        TridiagonalHamiltonian { diag, offdiag }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveHamiltonian {
    pub base: TridiagonalHamiltonian,
    pub lattice: LatticeSpec,
    pub drive: DriveSpec,
    /// Truncation order actually used for the hopping sums.
    pub j_used: usize,
    pub achieved_tail_bound: f64,
}

pub fn build_effective_hamiltonian(
    spec: &LatticeSpec,
    drive: &DriveSpec,
) -> Result<EffectiveHamiltonian> {
    build_effective_hamiltonian_capped(spec, drive, DEFAULT_J_CAP)
}

pub fn build_effective_hamiltonian_capped(
    spec: &LatticeSpec,
    drive: &DriveSpec,
    j_cap: usize,
) -> Result<EffectiveHamiltonian> {
    EffectiveFamily::new(spec, drive, spec.v0, j_cap)?.hamiltonian(spec.v0)
}

/// Effective Hamiltonians for one lattice and drive across a range of `V0`
/// values, sharing the Bessel work.
#[derive(Debug, Clone)]
pub struct EffectiveFamily {
    template: LatticeSpec,
    drive: DriveSpec,
    tail: TailProfile,
    sums: HoppingSums,
    v0_max: f64,
}

impl EffectiveFamily {
    /// Chooses the truncation order so that the tail bound at `v0_max`
    /// meets `drive.tail_tol`; any `V0 <= v0_max` then meets it too.
    pub fn new(template: &LatticeSpec, drive: &DriveSpec, v0_max: f64, j_cap: usize) -> Result<Self> {
        template.validate()?;
        drive.validate()?;
        let x_max = max_argument(template);
        let scale = (v0_max / drive.omega).powi(2);
        let floor = drive.tail_tol / scale.max(f64::MIN_POSITIVE) * 1e-3;
        let tail = TailProfile::new(x_max, template.theta, floor.min(1e-30));
        let j_used = tail
            .order_for(scale, drive.tail_tol, drive.j_max)
            .filter(|&j| j <= j_cap)
            .ok_or(Error::TailUnreachable {
                tail_tol: drive.tail_tol,
                cap: j_cap,
            })?;
        let sums = HoppingSums::compute(template, j_used)?;
        Ok(EffectiveFamily {
            template: *template,
            drive: *drive,
            tail,
            sums,
            v0_max,
        })
    }

    pub fn j_used(&self) -> usize {
        self.sums.j_max
    }

    pub fn sums(&self) -> &HoppingSums {
        &self.sums
    }

    pub fn hamiltonian(&self, v0: f64) -> Result<EffectiveHamiltonian> {
        if v0 > self.v0_max * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "V0 = {v0} exceeds the family maximum {}",
                self.v0_max
            )));
        }
        let lattice = self.template.with_v0(v0);
        lattice.validate()?;
        let base = self.sums.assemble(v0, lattice.theta, self.drive.omega);
        let achieved_tail_bound = (v0 / self.drive.omega).powi(2) * self.tail.bound(self.sums.j_max);
        Ok(EffectiveHamiltonian {
            base,
            lattice,
            drive: self.drive,
            j_used: self.sums.j_max,
            achieved_tail_bound,
        })
    }
}
