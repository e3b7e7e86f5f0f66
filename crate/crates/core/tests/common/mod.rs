//! Independent dense oracles shared by the integration tests.
#![allow(dead_code)]

use aah_floquet::model::{LatticeSpec, TridiagonalHamiltonian};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

pub fn dense(h: &TridiagonalHamiltonian) -> DMatrix<f64> {
    let n = h.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            h.diag[i]
        } else if i + 1 == j {
            h.offdiag[i]
        } else if j + 1 == i {
            h.offdiag[j]
        } else {
            0.0
        }
    })
}

/// Fourier coefficients `V_j` (`j = 0..=j_max`) of the driven on-site
/// potential, site by site, from `m` equispaced samples over one period.
/// The potential is even in time, so the coefficients are real.
pub fn sampled_modes(spec: &LatticeSpec, j_max: usize, m: usize) -> Vec<Vec<f64>> {
    assert!(m > 2 * j_max + 64);
    let fft = FftPlanner::new().plan_fft_forward(m);
    let mut modes = vec![vec![0.0; spec.size]; j_max + 1];
    for k in 0..spec.size {
        let n = (k as i64 + spec.index_origin) as f64;
        let x = TAU * spec.flux.p as f64 / spec.flux.q as f64 * n;
        let mut buf: Vec<Complex64> = (0..m)
            .map(|s| {
                let phase = TAU * s as f64 / m as f64;
                Complex64::new(spec.v0 * (x * phase.cos() + spec.theta).cos(), 0.0)
            })
            .collect();
        fft.process(&mut buf);
        for (j, mode) in modes.iter_mut().enumerate() {
            mode[k] = buf[j].re / m as f64;
        }
    }
    modes
}

/// `H0 + V_0 + sum_{j=1}^{j_max} ([[V_j, H0], V_-j] + h.c.) / (2 omega^2 j^2)`
/// with dense matrix products, returned as partial sums at each requested
/// truncation order (ascending).
pub fn dense_effective(
    spec: &LatticeSpec,
    omega: f64,
    orders: &[usize],
) -> Vec<DMatrix<f64>> {
    let j_max = *orders.iter().max().unwrap();
    let m = (4 * j_max + 8 * spec.size + 256).next_power_of_two();
    let modes = sampled_modes(spec, j_max, m);
    let n = spec.size;
    let h0 = DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 });
    let mut acc = &h0 + DMatrix::from_diagonal(&nalgebra::DVector::from_vec(modes[0].clone()));
    let mut out = Vec::new();
    for j in 1..=j_max {
        let vj = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(modes[j].clone()));
        // V_-j = V_j for this even-in-time potential.
        let inner = &vj * &h0 - &h0 * &vj;
        let outer = &inner * &vj - &vj * &inner;
        let term = &outer + outer.transpose();
        acc += term / (2.0 * omega * omega * (j * j) as f64);
        if orders.contains(&j) {
            out.push(acc.clone());
        }
    }
    out
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}
