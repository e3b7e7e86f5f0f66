mod common;

use aah_floquet::floquet::{build_effective_hamiltonian, fourier_mode};
use aah_floquet::model::{DriveSpec, Flux, LatticeSpec};
use common::{dense, dense_effective, max_abs_diff, sampled_modes};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

fn spec(size: usize, theta: f64, v0: f64) -> LatticeSpec {
    LatticeSpec::new(size, Flux::new(21, 34).unwrap(), theta, v0).unwrap()
}

#[test]
fn bessel_modes_match_sampled_fourier_coefficients() {
    for &theta in &[0.0, 0.3, FRAC_PI_4, FRAC_PI_2] {
        let s = spec(34, theta, 1.7);
        let sampled = sampled_modes(&s, 40, 1024);
        for j in 0..=40 {
            let mode = fourier_mode(&s, j as i64).unwrap();
            for (a, b) in mode.diagonal.iter().zip(&sampled[j]) {
                assert!((a - b).abs() < 1e-13, "theta {theta} j {j}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn closed_form_matches_dense_double_commutators() {
    let mut worst = 0.0f64;
    for size in 2..=34 {
        for &theta in &[0.0, FRAC_PI_4, FRAC_PI_2] {
            for &v0 in &[0.5, 2.0, 5.0] {
                let s = spec(size, theta, v0);
                for &w in &[10.0, 40.0] {
                    let eff = build_effective_hamiltonian(&s, &DriveSpec::new(w).unwrap()).unwrap();
                    let want = dense_effective(&s, w, &[eff.j_used]).pop().unwrap();
                    let diff = max_abs_diff(&dense(&eff.base), &want);
                    worst = worst.max(diff);
                    assert!(diff <= 1e-12, "L {size} theta {theta} v0 {v0} omega {w}: {diff:e}");
                }
            }
        }
    }
    eprintln!("worst entrywise difference {worst:e}");
}

#[test]
fn truncation_error_decreases_monotonically() {
    let s = spec(34, 0.4, 3.0);
    let orders: Vec<usize> = (1..=60).collect();
    let partials = dense_effective(&s, 15.0, &orders);
    let reference = partials.last().unwrap();
    let errs: Vec<f64> = partials[..40].iter().map(|p| max_abs_diff(p, reference)).collect();
    for w in errs.windows(2) {
        assert!(w[1] <= w[0] + 1e-15, "{:e} then {:e}", w[0], w[1]);
    }
}
