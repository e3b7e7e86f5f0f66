mod common;

use aah_floquet::model::{build_static_aah, Flux, LatticeSpec, TridiagonalHamiltonian};
use aah_floquet::spectra::{eig_tridiagonal, EigenSolution, TridiagonalEigensolver, Which};
use common::dense;
use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check_contract(h: &TridiagonalHamiltonian, sol: &EigenSolution) {
    let norm = h.norm_inf();
    let mut hv = vec![0.0; h.len()];
    for (value, v) in sol.values.iter().zip(&sol.vectors) {
        h.matvec(v, &mut hv);
        let res: f64 = hv.iter().zip(v).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt();
        assert!(res <= 1e-10 * norm, "residual {res:e}");
    }
    for i in 0..sol.len() {
        for j in i..sol.len() {
            let d: f64 = sol.vectors[i].iter().zip(&sol.vectors[j]).map(|(a, b)| a * b).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((d - want).abs() <= 1e-10, "<{i}|{j}> = {d:e}");
        }
    }
}

fn oracle_values(h: &TridiagonalHamiltonian) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(dense(h)).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn random_tridiagonals_against_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..40 {
        let n: usize = rng.gen_range(1..=120);
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let off: Vec<f64> = (0..n.saturating_sub(1))
            .map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(-2.0..2.0) })
            .collect();
        let h = TridiagonalHamiltonian::new(diag, off).unwrap();
        let want = oracle_values(&h);
        let norm = h.norm_inf();
        let all = eig_tridiagonal(&h, Which::All).unwrap();
        let lo = n / 3;
        let hi = (2 * n / 3).max(lo);
        let part = eig_tridiagonal(&h, Which::IndexRange { lo, hi }).unwrap();
        for (k, w) in want.iter().enumerate() {
            assert!((all.values[k] - w).abs() <= 1e-12 * norm.max(1.0), "trial {trial}");
        }
        for (k, v) in part.values.iter().enumerate() {
            assert!((v - want[lo + k]).abs() <= 1e-12 * norm.max(1.0), "trial {trial}");
        }
        check_contract(&h, &all);
        check_contract(&h, &part);
    }
}

#[test]
fn aah_chains_all_paths_agree() {
    for &(size, v0) in &[(89usize, 1.0), (144, 2.0), (233, 3.0), (377, 6.0)] {
        let spec = LatticeSpec::new(size, Flux::fibonacci(12).unwrap(), 0.0, v0).unwrap();
        let h = build_static_aah(&spec);
        let want = oracle_values(&h);
        let all = eig_tridiagonal(&h, Which::All).unwrap();
        let sub = eig_tridiagonal(&h, Which::IndexRange { lo: 0, hi: size }).unwrap();
        for k in 0..size {
            assert!((all.values[k] - want[k]).abs() < 1e-11);
            assert!((sub.values[k] - want[k]).abs() < 1e-11);
        }
        check_contract(&h, &all);
        check_contract(&h, &sub);
        // Localized states are nearly degenerate across the chain; the
        // two paths must still give the same subspace state by state
        // wherever the level is isolated.
        for k in 0..size {
            let gap_left = if k > 0 { want[k] - want[k - 1] } else { f64::INFINITY };
            let gap_right = if k + 1 < size { want[k + 1] - want[k] } else { f64::INFINITY };
            if gap_left.min(gap_right) > 1e-6 {
                let d: f64 = all.vectors[k].iter().zip(&sub.vectors[k]).map(|(a, b)| a * b).sum();
                assert!((d - 1.0).abs() < 1e-8, "L {size} state {k}: overlap {d}");
            }
        }
    }
}

#[test]
fn energy_window_matches_index_range() {
    let spec = LatticeSpec::new(987, Flux::fibonacci(15).unwrap(), 0.0, 2.5).unwrap();
    let h = build_static_aah(&spec);
    let values = TridiagonalEigensolver::default()
        .solve(&h, Which::IndexRange { lo: 0, hi: 987 })
        .unwrap()
        .values;
    // Cut the window in well-separated gaps so the count is unambiguous.
    let cut = |from: usize| (from..986).find(|&k| values[k + 1] - values[k] > 1e-6).unwrap();
    let (a, b) = (cut(100), cut(250));
    let mid = |k: usize| 0.5 * (values[k] + values[k + 1]);
    let win = eig_tridiagonal(&h, Which::ValueWindow { lo: mid(a), hi: mid(b) }).unwrap();
    assert_eq!(win.len(), b - a);
    for (k, v) in win.values.iter().enumerate() {
        assert!((v - values[a + 1 + k]).abs() < 1e-12);
    }
    check_contract(&h, &win);
}

#[test]
fn full_vectors_gate_can_be_lifted() {
    let h = TridiagonalHamiltonian::free_chain(300);
    let gated = TridiagonalEigensolver { full_vector_limit: 200, ..Default::default() };
    assert!(gated.solve(&h, Which::All).is_err());
    let open = TridiagonalEigensolver { allow_full_vectors: true, ..gated };
    let sol = open.solve(&h, Which::All).unwrap();
    assert_eq!(sol.len(), 300);
    check_contract(&h, &sol);
}
