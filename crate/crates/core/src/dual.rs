//! Dual (momentum) space: the transform `a_n -> a~_m`, the `kappa` relabeling
//! and diagnostics of the on-site profile's Fourier content.
//!
//! With `alpha0 = p/q` and `L = q` the kernel `exp(i 2 pi m p n / q)` is a
//! discrete Fourier transform evaluated at `kappa = m p mod q`, so the
//! transform is an FFT followed by a permutation.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LatticeSpec;
use crate::specfun::bessel_all_orders;
use crate::spectra::ipr_complex;

#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    /// `a~_m` for `m = 0..L`.
    pub amplitudes: Vec<Complex64>,
    /// `kappa(m)` for each `m`.
    pub wavevector_labels: Vec<u64>,
}

fn require_unitary(spec: &LatticeSpec) -> Result<()> {
    spec.flux.validate()?;
    if spec.size as u64 != spec.flux.q {
        return Err(Error::NotUnitary {
            size: spec.size,
            p: spec.flux.p,
            q: spec.flux.q,
        });
    }
    Ok(())
}

/// `(m p) mod q`.
pub fn kappa_map(m: u64, spec: &LatticeSpec) -> Result<u64> {
    let q = spec.flux.q;
    if m >= q {
        return Err(Error::Domain(format!("dual index {m} outside 0..{q}")));
    }
    Ok(((m as u128 * spec.flux.p as u128) % q as u128) as u64)
}

/// Inverse of `kappa_map`: the `m` with `m p = kappa (mod q)`.
pub fn kappa_inverse(kappa: u64, spec: &LatticeSpec) -> Result<u64> {
    let q = spec.flux.q;
    if kappa >= q {
        return Err(Error::Domain(format!("wavevector {kappa} outside 0..{q}")));
    }
    let p_inv = mod_inverse(spec.flux.p % q, q)
        .ok_or_else(|| Error::Domain(format!("p = {} not invertible mod {q}", spec.flux.p)))?;
    Ok(((kappa as u128 * p_inv as u128) % q as u128) as u64)
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

/// Phase `exp(sign i 2 pi kappa o / q)` from the site-label origin `o`.
fn origin_phase(kappa: u64, spec: &LatticeSpec, sign: f64) -> Complex64 {
    let q = spec.flux.q as i128;
    let r = (kappa as i128 * spec.index_origin as i128).rem_euclid(q);
    Complex64::from_polar(1.0, sign * TAU * r as f64 / q as f64)
}

/// `a~_m = L^{-1/2} sum_n exp(+i 2 pi m alpha0 n) a_n`, `m = 0..L`.
pub fn to_dual(state: &[Complex64], spec: &LatticeSpec) -> Result<DualState> {
    require_unitary(spec)?;
    let l = spec.size;
    if state.len() != l {
        return Err(Error::DimensionMismatch { expected: l, found: state.len() });
    }
    let mut buf = state.to_vec();
    FftPlanner::new().plan_fft_inverse(l).process(&mut buf);
    let scale = 1.0 / (l as f64).sqrt();
    let mut amplitudes = Vec::with_capacity(l);
    let mut wavevector_labels = Vec::with_capacity(l);
    for m in 0..l as u64 {
        let kappa = kappa_map(m, spec)?;
        amplitudes.push(buf[kappa as usize] * origin_phase(kappa, spec, 1.0) * scale);
        wavevector_labels.push(kappa);
    }
    Ok(DualState { amplitudes, wavevector_labels })
}

pub fn to_dual_real(state: &[f64], spec: &LatticeSpec) -> Result<DualState> {
    let c: Vec<Complex64> = state.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    to_dual(&c, spec)
}

/// Inverse of `to_dual`.
pub fn from_dual(dual: &[Complex64], spec: &LatticeSpec) -> Result<Vec<Complex64>> {
    require_unitary(spec)?;
    let l = spec.size;
    if dual.len() != l {
        return Err(Error::DimensionMismatch { expected: l, found: dual.len() });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    for (m, amp) in dual.iter().enumerate() {
        let kappa = kappa_map(m as u64, spec)?;
        buf[kappa as usize] = amp * origin_phase(kappa, spec, -1.0);
    }
    FftPlanner::new().plan_fft_forward(l).process(&mut buf);
    let scale = 1.0 / (l as f64).sqrt();
    buf.iter_mut().for_each(|z| *z *= scale);
    Ok(buf)
}

pub fn dual_ipr(state: &[Complex64], spec: &LatticeSpec) -> Result<f64> {
    ipr_complex(&to_dual(state, spec)?.amplitudes)
}

pub fn dual_ipr_real(state: &[f64], spec: &LatticeSpec) -> Result<f64> {
    ipr_complex(&to_dual_real(state, spec)?.amplitudes)
}

/// Fourier components `T_m = L^{-1/2} sum_n exp(-i 2 pi m alpha0 n) T(n)` of an
/// on-site profile given site by site.
pub fn profile_spectrum(profile: &[f64], spec: &LatticeSpec) -> Result<Vec<Complex64>> {
    // For real T this is the conjugate of the state transform.
    Ok(to_dual_real(profile, spec)?
        .amplitudes
        .into_iter()
        .map(|z| z.conj())
        .collect())
}

/// Spectrum of the effective on-site profile `T(n) = J_0(2 pi alpha0 n)`.
pub fn onsite_fourier_spectrum(spec: &LatticeSpec) -> Result<Vec<Complex64>> {
    require_unitary(spec)?;
    let profile = spec
        .labels()
        .map(|n| Ok(bessel_all_orders(spec.flux.bessel_argument(n).abs(), 1)?.get(0)))
        .collect::<Result<Vec<f64>>>()?;
    profile_spectrum(&profile, spec)
}

/// Dual index `m` mapped to the symmetric range `(-L/2, L/2]`.
pub fn centered_label(m: usize, size: usize) -> i64 {
    let m = m as i64;
    let l = size as i64;
    if m > l / 2 {
        m - l
    } else {
        m
    }
}

/// Where a spectrum's weight sits, by dual index `m` and by wavevector
/// `kappa(m)`, both centered on zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSupport {
    /// Components with `|T_m| >= rel_threshold * max |T_m|` count as support.
    pub rel_threshold: f64,
    pub count: usize,
    pub max_abs_index: i64,
    pub max_abs_kappa: i64,
    /// Fraction of `sum |T_m|^2` with `|kappa| <= max_abs_kappa`.
    pub weight_within_kappa: f64,
}

pub fn support_summary(spectrum: &[Complex64], spec: &LatticeSpec, rel_threshold: f64) -> Result<SpectrumSupport> {
    require_unitary(spec)?;
    let l = spec.size;
    if spectrum.len() != l {
        return Err(Error::DimensionMismatch { expected: l, found: spectrum.len() });
    }
    let kappas = (0..l as u64)
        .map(|m| Ok(centered_label(kappa_map(m, spec)? as usize, l)))
        .collect::<Result<Vec<i64>>>()?;
    let peak = spectrum.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let total: f64 = spectrum.iter().map(|z| z.norm_sqr()).sum();
    let mut count = 0;
    let (mut max_abs_index, mut max_abs_kappa) = (0, 0);
    for (m, z) in spectrum.iter().enumerate() {
        if peak > 0.0 && z.norm() >= rel_threshold * peak {
            count += 1;
            max_abs_index = max_abs_index.max(centered_label(m, l).abs());
            max_abs_kappa = max_abs_kappa.max(kappas[m].abs());
        }
    }
    let inside: f64 = spectrum
        .iter()
        .zip(&kappas)
        .filter(|(_, k)| k.abs() <= max_abs_kappa)
        .map(|(z, _)| z.norm_sqr())
        .sum();
    Ok(SpectrumSupport {
        rel_threshold,
        count,
        max_abs_index,
        max_abs_kappa,
        weight_within_kappa: if total > 0.0 { inside / total } else { 0.0 },
    })
}
