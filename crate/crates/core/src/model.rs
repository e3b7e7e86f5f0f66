//! Lattice and drive parameters, the static Aubry-André-Harper chain and the
//! instantaneous on-site potential of the driven chain.
//!
//! The chain is open: site `k` (0-based storage index) carries the label
//! `n = k + index_origin`, and hopping couples `k` and `k + 1` only.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rational flux `alpha0 = p / q`, kept exact so that `L = q` chains admit a
/// unitary dual transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flux {
    pub p: u64,
    pub q: u64,
}

impl Flux {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        let flux = Flux { p, q };
        flux.validate()?;
        Ok(flux)
    }

    /// `F_{i-1} / F_i` with `F_1 = F_2 = 1`, so `fibonacci(3) = 1/2`,
    /// `fibonacci(12) = 89/144`.
    pub fn fibonacci(index: usize) -> Result<Self> {
        if index < 3 {
            return Err(Error::InvalidSpec(format!(
                "Fibonacci index {index} gives no ratio with q > p >= 1"
            )));
        }
        let (mut prev, mut cur) = (1u64, 1u64);
        for _ in 2..index {
            let next = prev
                .checked_add(cur)
                .ok_or_else(|| Error::InvalidSpec(format!("Fibonacci index {index} overflows")))?;
            prev = cur;
            cur = next;
        }
        Flux::new(prev, cur)
    }

    /// Largest Fibonacci ratio whose denominator equals `q`, if `q` is a
    /// Fibonacci number (>= 2).
    pub fn with_denominator(q: u64) -> Option<Self> {
        let (mut prev, mut cur) = (1u64, 2u64);
        while cur < q {
            let next = prev + cur;
            prev = cur;
            cur = next;
        }
        (cur == q).then_some(Flux { p: prev, q })
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1 || self.q <= self.p {
            return Err(Error::InvalidSpec(format!(
                "alpha0 = {}/{} must satisfy q > p >= 1",
                self.p, self.q
            )));
        }
        if gcd(self.p, self.q) != 1 {
            return Err(Error::InvalidSpec(format!(
                "alpha0 = {}/{} is not in lowest terms",
                self.p, self.q
            )));
        }
        Ok(())
    }

    pub fn is_fibonacci_pair(&self) -> bool {
        let (mut prev, mut cur) = (1u64, 1u64);
        while cur < self.q {
            let next = prev + cur;
            prev = cur;
            cur = next;
        }
        cur == self.q && prev == self.p
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `2 pi alpha0 n` reduced modulo `2 pi` with exact integer arithmetic.
    pub fn reduced_phase(&self, n: i64) -> f64 {
        let q = self.q as i128;
        let r = ((self.p as i128 * n as i128) % q + q) % q;
        TAU * r as f64 / self.q as f64
    }

    /// Unreduced `2 pi alpha0 n`, the Bessel argument of the driven model.
    pub fn bessel_argument(&self, n: i64) -> f64 {
        TAU * self.p as f64 * n as f64 / self.q as f64
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

pub const DEFAULT_INDEX_ORIGIN: i64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub size: usize,
    pub flux: Flux,
    pub theta: f64,
    pub v0: f64,
    pub index_origin: i64,
}

impl LatticeSpec {
    pub fn new(size: usize, flux: Flux, theta: f64, v0: f64) -> Result<Self> {
        let spec = LatticeSpec {
            size,
            flux,
            theta,
            v0,
            index_origin: DEFAULT_INDEX_ORIGIN,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Chain of `L = q` sites at flux `p/q`, the configuration on which the
    /// dual transform is unitary.
    pub fn commensurate(flux: Flux, theta: f64, v0: f64) -> Result<Self> {
        LatticeSpec::new(flux.q as usize, flux, theta, v0)
    }

    pub fn with_origin(mut self, index_origin: i64) -> Self {
        self.index_origin = index_origin;
        self
    }

    pub fn with_v0(mut self, v0: f64) -> Self {
        self.v0 = v0;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.size < 2 {
            return Err(Error::InvalidSpec(format!(
                "L = {} but at least 2 sites are required",
                self.size
            )));
        }
        self.flux.validate()?;
        if !self.theta.is_finite() {
            return Err(Error::InvalidSpec("theta must be finite".into()));
        }
        if !(self.v0.is_finite() && self.v0 >= 0.0) {
            return Err(Error::InvalidSpec(format!("V0 = {} must be finite and >= 0", self.v0)));
        }
        Ok(())
    }

    pub fn label(&self, k: usize) -> i64 {
        k as i64 + self.index_origin
    }

    pub fn labels(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.size).map(move |k| self.label(k))
    }

    /// True when `L = q`, i.e. the dual transform is a permuted DFT.
    pub fn is_commensurate(&self) -> bool {
        self.size as u64 == self.flux.q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub omega: f64,
    pub j_max: usize,
    pub tail_tol: f64,
}

impl DriveSpec {
    pub const DEFAULT_J_MAX: usize = 32;
    pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

    pub fn new(omega: f64) -> Result<Self> {
        let drive = DriveSpec {
            omega,
            j_max: Self::DEFAULT_J_MAX,
            tail_tol: Self::DEFAULT_TAIL_TOL,
        };
        drive.validate()?;
        Ok(drive)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::InvalidDrive(format!("omega = {} must be > 0", self.omega)));
        }
        if self.j_max < 1 {
            return Err(Error::InvalidDrive("j_max must be >= 1".into()));
        }
        if !(self.tail_tol.is_finite() && self.tail_tol > 0.0) {
            return Err(Error::InvalidDrive(format!(
                "tail_tol = {} must be > 0",
                self.tail_tol
            )));
        }
        Ok(())
    }

    pub fn period(&self) -> f64 {
        TAU / self.omega
    }
}

/// Real symmetric tridiagonal matrix; the `k, k+1` hopping is stored once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalHamiltonian {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch {
                expected: diag.len().saturating_sub(1),
                found: offdiag.len(),
            });
        }
        if diag.iter().chain(offdiag.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("Hamiltonian entries must be finite".into()));
        }
        Ok(TridiagonalHamiltonian { diag, offdiag })
    }

    /// Open chain with unit hopping and no on-site term.
    pub fn free_chain(size: usize) -> Self {
        TridiagonalHamiltonian {
            diag: vec![0.0; size],
            offdiag: vec![1.0; size.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Infinity norm (max absolute row sum); bounds the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|k| {
                let left = if k > 0 { self.offdiag[k - 1].abs() } else { 0.0 };
                let right = if k + 1 < n { self.offdiag[k].abs() } else { 0.0 };
                self.diag[k].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        for k in 0..n {
            let mut acc = self.diag[k] * x[k];
            if k > 0 {
                acc += self.offdiag[k - 1] * x[k - 1];
            }
            if k + 1 < n {
                acc += self.offdiag[k] * x[k + 1];
            }
            out[k] = acc;
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.len();
        let mut m = vec![0.0; n * n];
        for k in 0..n {
            m[k * n + k] = self.diag[k];
            if k + 1 < n {
                m[k * n + k + 1] = self.offdiag[k];
                m[(k + 1) * n + k] = self.offdiag[k];
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }
}

/// Static AAH chain: `V0 cos(2 pi alpha0 n + theta)` on site `n`, unit hopping.
pub fn build_static_aah(spec: &LatticeSpec) -> TridiagonalHamiltonian {
    let diag = spec
        .labels()
        .map(|n| spec.v0 * (spec.flux.reduced_phase(n) + spec.theta).cos())
        .collect();
    TridiagonalHamiltonian {
        diag,
        offdiag: vec![1.0; spec.size - 1],
    }
}

/// On-site potential of the driven chain at time `t`:
/// `V0 cos(2 pi alpha0 n cos(omega t) + theta)`.
pub fn instantaneous_potential(spec: &LatticeSpec, t: f64, omega: f64) -> Vec<f64> {
    let drive = (omega * t).cos();
    spec.labels()
        .map(|n| spec.v0 * (spec.flux.bessel_argument(n) * drive + spec.theta).cos())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn spec(size: usize, p: u64, q: u64, theta: f64, v0: f64) -> LatticeSpec {
        LatticeSpec::new(size, Flux::new(p, q).unwrap(), theta, v0).unwrap()
    }

    #[test]
    fn zero_potential_two_sites() {
        let h = build_static_aah(&spec(2, 1, 2, 0.7, 0.0));
        assert_eq!(h.diag, vec![0.0, 0.0]);
        assert_eq!(h.offdiag, vec![1.0]);
    }

    #[test]
    fn half_flux_alternates() {
        let s = spec(3, 1, 2, 0.0, 2.0).with_origin(0);
        let h = build_static_aah(&s);
        let expected = [2.0, -2.0, 2.0];
        for (a, b) in h.diag.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn theta_shift_by_two_pi_is_invariant() {
        let a = build_static_aah(&spec(55, 21, 34, 0.3, 1.7));
        let b = build_static_aah(&spec(55, 21, 34, 0.3 + 2.0 * PI, 1.7));
        for (x, y) in a.diag.iter().zip(&b.diag) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn potential_at_t_zero_is_static_diagonal() {
        let s = spec(34, 21, 34, 0.4, 2.2);
        let static_diag = build_static_aah(&s).diag;
        let v = instantaneous_potential(&s, 0.0, 3.0);
        for (a, b) in v.iter().zip(&static_diag) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn potential_quarter_period_is_flat() {
        let s = spec(21, 13, 21, 0.9, 1.5);
        let omega = 4.0;
        let v = instantaneous_potential(&s, FRAC_PI_2 / omega, omega);
        for x in v {
            assert!((x - 1.5 * 0.9f64.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn potential_zero_strength() {
        let s = spec(8, 5, 8, 0.2, 0.0);
        assert!(instantaneous_potential(&s, 0.37, 2.0).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn potential_is_periodic() {
        let s = spec(89, 55, 89, 0.1, 3.0);
        let omega = 7.0;
        let t = 0.123;
        let a = instantaneous_potential(&s, t, omega);
        let b = instantaneous_potential(&s, t + 2.0 * PI / omega, omega);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn flux_validation() {
        assert!(Flux::new(2, 4).is_err());
        assert!(Flux::new(3, 3).is_err());
        assert!(Flux::new(0, 3).is_err());
        assert!(LatticeSpec::new(1, Flux::new(1, 2).unwrap(), 0.0, 1.0).is_err());
        assert!(LatticeSpec::new(4, Flux::new(1, 2).unwrap(), 0.0, -1.0).is_err());
    }

    #[test]
    fn fibonacci_ratios() {
        assert_eq!(Flux::fibonacci(3).unwrap(), Flux { p: 1, q: 2 });
        assert_eq!(Flux::fibonacci(12).unwrap(), Flux { p: 89, q: 144 });
        assert_eq!(Flux::with_denominator(4181), Some(Flux { p: 2584, q: 4181 }));
        assert_eq!(Flux::with_denominator(100), None);
        assert!(Flux::new(610, 987).unwrap().is_fibonacci_pair());
        assert!(!Flux::new(3, 7).unwrap().is_fibonacci_pair());
    }

    #[test]
    fn norm_and_dense() {
        let h = TridiagonalHamiltonian::new(vec![1.0, -3.0, 0.5], vec![2.0, -1.0]).unwrap();
        assert_eq!(h.norm_inf(), 6.0);
        let d = h.to_dense();
        assert_eq!(d, vec![1.0, 2.0, 0.0, 2.0, -3.0, -1.0, 0.0, -1.0, 0.5]);
        assert!(TridiagonalHamiltonian::new(vec![1.0], vec![1.0]).is_err());
        assert!(TridiagonalHamiltonian::new(vec![f64::NAN, 0.0], vec![1.0]).is_err());
    }
}
