//! Fast structural checks run by `aah selftest`.
//!
//! Test vectors come from Weyl sequences, not a random number generator,
//! so the report is the same on every run.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::dual::{from_dual, kappa_inverse, kappa_map, to_dual};
use crate::floquet::{build_effective_hamiltonian, first_order_term_norm};
use crate::model::{build_static_aah, DriveSpec, Flux, LatticeSpec, TridiagonalHamiltonian};
use crate::scan::{phase_diagram, EnergyWindow, ModelTag};
use crate::specfun::{bessel_all_orders, jacobi_anger_check};
use crate::spectra::{eig_tridiagonal, ipr, Which};

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{tag} {}: {}", c.name, c.detail);
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(s, "{passed}/{} checks passed", self.checks.len());
        s
    }
}

fn weyl(i: usize, k: usize) -> f64 {
    let a = 0.618_033_988_749_894_9 * (i + 1) as f64 + std::f64::consts::SQRT_2 * (k + 1) as f64;
    2.0 * a.fract() - 1.0
}

fn check(name: &'static str, f: impl FnOnce() -> crate::Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

pub fn run_all() -> Report {
    let checks = vec![
        check("ipr-bounds", ipr_bounds),
        check("dual-unitarity", dual_unitarity),
        check("kappa-bijection", kappa_bijection),
        check("eigen-residuals", eigen_residuals),
        check("first-order-term", first_order),
        check("jacobi-anger", jacobi_anger),
        check("bessel-normalization", bessel_normalization),
        check("worker-independence", worker_independence),
    ];
    Report { checks }
}

fn ipr_bounds() -> crate::Result<(bool, String)> {
    let mut ok = true;
    for i in 0..10_000 {
        let l = 1 + i % 97;
        let v: Vec<f64> = (0..l).map(|k| weyl(i, k)).collect();
        let p = ipr(&v)?;
        ok &= p >= 1.0 / l as f64 * (1.0 - 1e-12) && p <= 1.0 + 1e-12;
    }
    Ok((ok, "10000 vectors, IPR within [1/L, 1]".into()))
}

fn dual_unitarity() -> crate::Result<(bool, String)> {
    let mut worst = 0.0f64;
    for index in 5..=17 {
        let flux = Flux::fibonacci(index)?;
        let spec = LatticeSpec::commensurate(flux, 0.0, 1.0)?;
        let v: Vec<Complex64> = (0..spec.size)
            .map(|k| Complex64::new(weyl(index, k), weyl(index + 7, k)))
            .collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let d = to_dual(&v, &spec)?;
        let dn: f64 = d.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max((dn - norm).abs() / norm);
        let back = from_dual(&d.amplitudes, &spec)?;
        let err = back.iter().zip(&v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        worst = worst.max(err / norm);
    }
    Ok((worst <= 1e-12, format!("q = 13..4181, worst relative defect {worst:.2e}")))
}

fn kappa_bijection() -> crate::Result<(bool, String)> {
    let spec = LatticeSpec::commensurate(Flux::fibonacci(14)?, 0.0, 1.0)?;
    let mut seen = vec![false; spec.size];
    let mut ok = true;
    for m in 0..spec.size as u64 {
        let k = kappa_map(m, &spec)?;
        ok &= !seen[k as usize] && kappa_inverse(k, &spec)? == m;
        seen[k as usize] = true;
    }
    Ok((ok, format!("q = {}", spec.size)))
}

fn residual_ratio(h: &TridiagonalHamiltonian, which: Which) -> crate::Result<f64> {
    let sol = eig_tridiagonal(h, which)?;
    let norm = h.norm_inf();
    let mut hv = vec![0.0; h.len()];
    let mut worst = 0.0f64;
    for (e, v) in sol.values.iter().zip(&sol.vectors) {
        h.matvec(v, &mut hv);
        let r: f64 = hv.iter().zip(v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(r / norm);
    }
    Ok(worst)
}

fn eigen_residuals() -> crate::Result<(bool, String)> {
    let flux = Flux::fibonacci(13)?;
    let mut worst = 0.0f64;
    for v0 in [1.0, 2.0, 3.0] {
        let spec = LatticeSpec::commensurate(flux, 0.0, v0)?;
        worst = worst.max(residual_ratio(&build_static_aah(&spec), Which::All)?);
    }
    let spec = LatticeSpec::commensurate(flux, 0.0, 5.0)?;
    let heff = build_effective_hamiltonian(&spec, &DriveSpec::new(20.0)?)?;
    worst = worst.max(residual_ratio(&heff.base, Which::IndexRange { lo: 0, hi: 60 })?);
    Ok((worst <= 1e-10, format!("worst residual / norm {worst:.2e}")))
}

fn first_order() -> crate::Result<(bool, String)> {
    let mut worst = 0.0f64;
    for size in [13, 34, 89] {
        for theta in [0.0, 0.3, FRAC_PI_4, FRAC_PI_2] {
            for v0 in [0.5, 2.0, 5.0] {
                let spec = LatticeSpec::new(size, Flux::new(21, 34)?, theta, v0)?;
                worst = worst.max(first_order_term_norm(&spec, 40)?);
            }
        }
    }
    Ok((worst == 0.0, format!("max entry {worst:e}")))
}

fn jacobi_anger() -> crate::Result<(bool, String)> {
    let mut worst = 0.0f64;
    for r in [0.5, 3.0, 10.0, 100.0] {
        worst = worst.max(jacobi_anger_check(r, 40, 512)?);
    }
    Ok((worst <= 1e-9, format!("worst coefficient error {worst:.2e}")))
}

fn bessel_normalization() -> crate::Result<(bool, String)> {
    let mut worst = 0.0f64;
    for x in [0.5, 7.0, 60.0, 900.0, 12_000.0] {
        let col = bessel_all_orders(x, (x as usize) + 200)?;
        worst = worst.max((col.normalization_sum() - 1.0).abs());
    }
    Ok((worst <= 1e-10, format!("worst |J0 + 2 sum J2k - 1| {worst:.2e}")))
}

fn worker_independence() -> crate::Result<(bool, String)> {
    let spec = LatticeSpec::commensurate(Flux::fibonacci(11)?, 0.0, 1.0)?;
    let drive = DriveSpec::new(20.0)?;
    let grid: Vec<f64> = (0..8).map(|k| k as f64).collect();
    let run = |threads: usize| -> crate::Result<Vec<u64>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| crate::Error::Domain(e.to_string()))?;
        pool.install(|| {
            let pd = phase_diagram(&spec, ModelTag::Effective, Some(&drive), 0.0, &grid, EnergyWindow::default())?;
            Ok(pd.records.iter().flat_map(|r| [r.energy.to_bits(), r.ipr.to_bits()]).collect())
        })
    };
    let same = run(1)? == run(4)?;
    Ok((same, "phase diagram bits with 1 and 4 workers".into()))
}
