//! Symmetric tridiagonal eigensolver and localization measures.
//!
//! Full spectra use implicit-shift QL. Subsets (an index range or an energy
//! window) use Sturm-sequence bisection for the eigenvalues and inverse
//! iteration for the vectors, with modified Gram-Schmidt inside clusters of
//! close eigenvalues.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TridiagonalHamiltonian;

/// Fibonacci sizes used for finite-size scaling by default.
pub const DEFAULT_LADDER: [usize; 8] = [144, 233, 377, 610, 987, 1597, 2584, 4181];
/// Larger sizes, opt-in.
pub const EXTENDED_LADDER: [usize; 2] = [6765, 10946];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Which {
    All,
    /// Eigenpairs `lo..hi` in ascending order (half-open).
    IndexRange { lo: usize, hi: usize },
    /// Eigenpairs with `lo <= E < hi`.
    ValueWindow { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    /// Ascending.
    pub values: Vec<f64>,
    /// One unit vector per value, sign fixed as described at `fix_sign`.
    pub vectors: Vec<Vec<f64>>,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TridiagonalEigensolver {
    /// QL sweeps per eigenvalue, and inverse-iteration steps per vector.
    pub max_sweeps: usize,
    /// Chains longer than this need `allow_full_vectors` for `Which::All`.
    pub full_vector_limit: usize,
    pub allow_full_vectors: bool,
    /// Eigenvalues closer than this (relative to the matrix norm) are
    /// reorthogonalized against each other.
    pub cluster_gap: f64,
    /// Eigenvalues closer than this (relative to the matrix norm) span a
    /// subspace the solver cannot resolve; see `localize_degenerate`.
    pub degenerate_gap: f64,
}

impl Default for TridiagonalEigensolver {
    fn default() -> Self {
        TridiagonalEigensolver {
            max_sweeps: 50,
            full_vector_limit: 4181,
            allow_full_vectors: false,
            cluster_gap: 1e-3,
            degenerate_gap: 1e-12,
        }
    }
}

pub fn eig_tridiagonal(h: &TridiagonalHamiltonian, which: Which) -> Result<EigenSolution> {
    TridiagonalEigensolver::default().solve(h, which)
}

/// Lowest eigenpair.
pub fn ground_state(h: &TridiagonalHamiltonian) -> Result<(f64, Vec<f64>)> {
    let mut sol = eig_tridiagonal(h, Which::IndexRange { lo: 0, hi: 1 })?;
    Ok((sol.values[0], sol.vectors.swap_remove(0)))
}

/// All eigenvalues, ascending, without vectors.
pub fn eigenvalues(h: &TridiagonalHamiltonian) -> Result<Vec<f64>> {
    let (mut values, _) = ql_implicit(h, false, TridiagonalEigensolver::default().max_sweeps)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

impl TridiagonalEigensolver {
    pub fn solve(&self, h: &TridiagonalHamiltonian, which: Which) -> Result<EigenSolution> {
        let n = h.len();
        match which {
            Which::All => {
                if n > self.full_vector_limit && !self.allow_full_vectors {
                    return Err(Error::FullVectorsGated(n));
                }
                let (values, vectors) = ql_implicit(h, true, self.max_sweeps)?;
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
                let mut vectors = vectors.unwrap();
                let mut sol = EigenSolution {
                    values: order.iter().map(|&i| values[i]).collect(),
                    vectors: order
                        .iter()
                        .map(|&i| std::mem::take(&mut vectors[i]))
                        .collect(),
                };
                self.localize_degenerate(h, &sol.values, &mut sol.vectors);
                sol.vectors.iter_mut().for_each(|v| fix_sign(v));
                Ok(sol)
            }
            Which::IndexRange { lo, hi } => {
                if lo > hi || hi > n {
                    return Err(Error::Domain(format!(
                        "index range {lo}..{hi} outside 0..{n}"
                    )));
                }
                self.subset(h, lo, hi)
            }
            Which::ValueWindow { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(Error::Domain(format!("invalid energy window [{lo}, {hi})")));
                }
                let pivmin = pivot_floor(h);
                let first = sturm_count(h, lo, pivmin);
                let last = sturm_count(h, hi, pivmin);
                self.subset(h, first, last)
            }
        }
    }

    fn subset(&self, h: &TridiagonalHamiltonian, lo: usize, hi: usize) -> Result<EigenSolution> {
        if lo == hi {
            return Ok(EigenSolution { values: Vec::new(), vectors: Vec::new() });
        }
        let mut values: Vec<f64> = (lo..hi)
            .into_par_iter()
            .map(|k| bisect_eigenvalue(h, k))
            .collect();
        // Widen the range over degenerate partners so a requested vector is
        // never an arbitrary mix with one that was cut off.
        let tol = self.degenerate_gap * h.norm_inf();
        let (mut first, mut last) = (lo, hi);
        while first > 0 {
            let e = bisect_eigenvalue(h, first - 1);
            if values[0] - e > tol {
                break;
            }
            values.insert(0, e);
            first -= 1;
        }
        while last < h.len() {
            let e = bisect_eigenvalue(h, last);
            if e - values[values.len() - 1] > tol {
                break;
            }
            values.push(e);
            last += 1;
        }
        let mut vectors = self.inverse_iteration(h, &values, first)?;
        self.localize_degenerate(h, &values, &mut vectors);
        vectors.iter_mut().for_each(|v| fix_sign(v));
        let keep = (lo - first)..(hi - first);
        Ok(EigenSolution {
            values: values[keep.clone()].to_vec(),
            vectors: vectors.drain(keep).collect(),
        })
    }

    /// Within each run of eigenvalues closer than `degenerate_gap`, the
    /// computed vectors are an accident of the start vectors. Rotate them to
    /// maximize the summed fourth powers (Pipek-Mezey localization) and order
    /// them by peak site, so the basis is reproducible and, for separated
    /// mirror-image states, each vector sits on one side.
    fn localize_degenerate(&self, h: &TridiagonalHamiltonian, values: &[f64], vectors: &mut [Vec<f64>]) {
        const MAX_GROUP: usize = 64;
        let tol = self.degenerate_gap * h.norm_inf();
        let mut start = 0;
        for i in 1..=values.len() {
            if i < values.len() && values[i] - values[i - 1] <= tol {
                continue;
            }
            let group = &mut vectors[start..i];
            if group.len() > 1 && group.len() <= MAX_GROUP {
                pipek_mezey(group);
                group.sort_by_key(|v| peak_site(v));
            }
            start = i;
        }
    }

    fn inverse_iteration(
        &self,
        h: &TridiagonalHamiltonian,
        values: &[f64],
        first_index: usize,
    ) -> Result<Vec<Vec<f64>>> {
        let norm = h.norm_inf().max(f64::MIN_POSITIVE);
        let gap = self.cluster_gap * norm;
        let mut clusters: Vec<std::ops::Range<usize>> = Vec::new();
        let mut start = 0;
        for i in 1..=values.len() {
            if i == values.len() || values[i] - values[i - 1] > gap {
                if i > start {
                    clusters.push(start..i);
                }
                start = i;
            }
        }
        let solved: Vec<Vec<Vec<f64>>> = clusters
            .par_iter()
            .map(|range| {
                let mut done: Vec<Vec<f64>> = Vec::with_capacity(range.len());
                let mut prev_shift = f64::NEG_INFINITY;
                for i in range.clone() {
                    let mut shift = values[i];
                    let sep = 10.0 * f64::EPSILON * norm;
                    if shift - prev_shift < sep {
                        shift = prev_shift + sep;
                    }
                    prev_shift = shift;
                    let v = self.one_vector(h, values[i], shift, &done, norm, first_index + i)?;
                    done.push(v);
                }
                Ok(done)
            })
            .collect::<Result<_>>()?;
        let mut out: Vec<Vec<f64>> = solved.into_iter().flatten().collect();
        out.iter_mut().for_each(|v| fix_sign(v));
        Ok(out)
    }

    fn one_vector(
        &self,
        h: &TridiagonalHamiltonian,
        value: f64,
        shift: f64,
        against: &[Vec<f64>],
        norm: f64,
        index: usize,
    ) -> Result<Vec<f64>> {
        let n = h.len();
        let lu = ShiftedLu::factor(h, shift, norm);
        // Deterministic, non-degenerate start vector.
        let mut x: Vec<f64> = (0..n)
            .map(|k| 1.0 + 0.5 * ((k as f64 + 1.0) * 0.618_033_988_749_894_9).fract())
            .collect();
        // Inside tight clusters the earlier vectors are only accurate to
        // residual / gap, which caps what the projected iterate can reach;
        // a stalled iterate is accepted once it meets the residual contract.
        let target = 1e-12 * norm.max(1.0);
        let mut best = Vec::new();
        let accept = 1e-10 * norm.max(1.0);
        let mut hx = vec![0.0; n];
        let mut prev = f64::INFINITY;
        let mut converged = false;
        for _ in 0..self.max_sweeps {
            lu.solve_in_place(&mut x);
            // Two Gram-Schmidt passes: one loses orthogonality in tight clusters.
            for _ in 0..2 {
                for u in against {
                    let d = dot(u, &x);
                    x.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
                }
            }
            let nrm = dot(&x, &x).sqrt();
            if !(nrm.is_finite() && nrm > 0.0) {
                break;
            }
            x.iter_mut().for_each(|a| *a /= nrm);
            h.matvec(&x, &mut hx);
            let res = hx
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - value * b).powi(2))
                .sum::<f64>()
                .sqrt();
            if converged {
                // One extra step past the residual test sharpens the
                // direction against well-separated neighbours.
                if res <= accept {
                    return Ok(x);
                }
                return Ok(best);
            }
            if res <= target || (res <= accept && res > 0.5 * prev) {
                converged = true;
                best.clone_from(&x);
            }
            prev = res;
        }
        Err(Error::NoConvergence {
            index,
            iterations: self.max_sweeps,
        })
    }
}

/// Jacobi sweeps of pairwise rotations, each one the closed-form maximizer
/// of the summed fourth powers of the pair.
fn pipek_mezey(vs: &mut [Vec<f64>]) {
    for _ in 0..100 {
        let mut largest = 0.0f64;
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                let (mut a, mut b) = (0.0, 0.0);
                for (x, y) in vs[i].iter().zip(&vs[j]) {
                    let d = x * x - y * y;
                    a += (x * y).powi(2) - 0.25 * d * d;
                    b += x * y * d;
                }
                let r = a.hypot(b);
                if r == 0.0 {
                    continue;
                }
                let gamma = 0.25 * b.atan2(-a);
                largest = largest.max(gamma.abs());
                let (s, c) = gamma.sin_cos();
                let (left, right) = vs.split_at_mut(j);
                for (x, y) in left[i].iter_mut().zip(right[0].iter_mut()) {
                    let (u, w) = (*x, *y);
                    *x = c * u + s * w;
                    *y = -s * u + c * w;
                }
            }
        }
        if largest < 1e-12 {
            break;
        }
    }
}

fn peak_site(v: &[f64]) -> usize {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    v.iter().position(|x| x.abs() >= 0.5 * peak).unwrap_or(0)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sign convention: the first entry holding at least half the peak magnitude
/// is positive. Using a fraction of the peak keeps the choice stable when
/// two peaks tie.
fn fix_sign(v: &mut [f64]) {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(x) = v.iter().find(|x| x.abs() >= 0.5 * peak) {
        if *x < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn pivot_floor(h: &TridiagonalHamiltonian) -> f64 {
    let emax = h.offdiag.iter().fold(1.0f64, |m, e| m.max(e * e));
    f64::MIN_POSITIVE * emax
}

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(h: &TridiagonalHamiltonian, x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = h.diag[0] - x;
    if q.abs() <= pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..h.len() {
        let e = h.offdiag[i - 1];
        q = h.diag[i] - x - e * e / q;
        if q.abs() <= pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(h: &TridiagonalHamiltonian) -> (f64, f64) {
    let n = h.len();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..n {
        let left = if k > 0 { h.offdiag[k - 1].abs() } else { 0.0 };
        let right = if k + 1 < n { h.offdiag[k].abs() } else { 0.0 };
        lo = lo.min(h.diag[k] - left - right);
        hi = hi.max(h.diag[k] + left + right);
    }
    let pad = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + f64::MIN_POSITIVE;
    (lo - pad, hi + pad)
}

/// `k`-th smallest eigenvalue by bisection on the Sturm count.
fn bisect_eigenvalue(h: &TridiagonalHamiltonian, k: usize) -> f64 {
    let pivmin = pivot_floor(h);
    let (mut lo, mut hi) = gershgorin(h);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + pivmin {
            break;
        }
        if sturm_count(h, mid, pivmin) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// LU factors of `T - shift I` with partial pivoting; `U` has two
/// superdiagonals.
struct ShiftedLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(h: &TridiagonalHamiltonian, shift: f64, norm: f64) -> Self {
        let n = h.len();
        let floor = f64::EPSILON * norm;
        let mut lu = ShiftedLu {
            u0: vec![0.0; n],
            u1: vec![0.0; n],
            u2: vec![0.0; n],
            mult: vec![0.0; n],
            swapped: vec![false; n],
        };
        let mut diag = h.diag[0] - shift;
        let mut sup = if n > 1 { h.offdiag[0] } else { 0.0 };
        for i in 0..n.saturating_sub(1) {
            let sub = h.offdiag[i];
            let next_diag = h.diag[i + 1] - shift;
            let next_sup = if i + 2 < n { h.offdiag[i + 1] } else { 0.0 };
            if diag.abs() >= sub.abs() {
                if diag.abs() < floor {
                    diag = floor.copysign(if diag == 0.0 { 1.0 } else { diag });
                }
                let m = sub / diag;
                lu.u0[i] = diag;
                lu.u1[i] = sup;
                lu.mult[i] = m;
                diag = next_diag - m * sup;
                sup = next_sup;
            } else {
                let m = diag / sub;
                lu.u0[i] = sub;
                lu.u1[i] = next_diag;
                lu.u2[i] = next_sup;
                lu.mult[i] = m;
                lu.swapped[i] = true;
                diag = sup - m * next_diag;
                sup = -m * next_sup;
            }
        }
        if diag.abs() < floor {
            diag = floor.copysign(if diag == 0.0 { 1.0 } else { diag });
        }
        lu.u0[n - 1] = diag;
        lu
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.mult[i] * b[i];
        }
        b[n - 1] /= self.u0[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.u1[n - 2] * b[n - 1]) / self.u0[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.u1[i] * b[i + 1] - self.u2[i] * b[i + 2]) / self.u0[i];
        }
    }
}

/// Implicit-shift QL on the tridiagonal form. Returns unsorted eigenvalues
/// and, optionally, eigenvectors as columns.
#[allow(clippy::type_complexity)]
fn ql_implicit(
    h: &TridiagonalHamiltonian,
    want_vectors: bool,
    max_sweeps: usize,
) -> Result<(Vec<f64>, Option<Vec<Vec<f64>>>)> {
    let n = h.len();
    let mut d = h.diag.clone();
    let mut e: Vec<f64> = h.offdiag.iter().copied().chain(std::iter::once(0.0)).collect();
    let mut z: Option<Vec<Vec<f64>>> = want_vectors.then(|| {
        (0..n)
            .map(|i| {
                let mut c = vec![0.0; n];
                c[i] = 1.0;
                c
            })
            .collect()
    });

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_sweeps {
                return Err(Error::NoConvergence { index: l, iterations: max_sweeps });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_mut() {
                    let (left, right) = z.split_at_mut(i + 1);
                    let zi = &mut left[i];
                    let zi1 = &mut right[0];
                    for k in 0..n {
                        let f = zi1[k];
                        zi1[k] = s * zi[k] + c * f;
                        zi[k] = c * zi[k] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

/// Inverse participation ratio `sum |a|^4 / (sum |a|^2)^2`.
pub fn ipr(state: &[f64]) -> Result<f64> {
    ipr_from_weights(state.iter().map(|a| a * a))
}

pub fn ipr_complex(state: &[Complex64]) -> Result<f64> {
    ipr_from_weights(state.iter().map(|a| a.norm_sqr()))
}

fn ipr_from_weights(weights: impl Iterator<Item = f64>) -> Result<f64> {
    let (mut s2, mut s4) = (0.0, 0.0);
    for w in weights {
        s2 += w;
        s4 += w * w;
    }
    if !(s2.is_finite() && s2 > 0.0) {
        return Err(Error::Domain("IPR of a zero or non-finite vector".into()));
    }
    Ok(s4 / (s2 * s2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D2Fit {
    pub sizes: Vec<usize>,
    pub iprs: Vec<f64>,
    /// Minus the slope of `ln IPR` against `ln L`.
    pub d2: f64,
    pub r2: f64,
}

pub fn d2_fit(pairs: &[(usize, f64)]) -> Result<D2Fit> {
    if pairs.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, found: pairs.len() });
    }
    let mut pairs = pairs.to_vec();
    pairs.sort_by_key(|p| p.0);
    if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Domain("sizes must be distinct".into()));
    }
    if pairs.iter().any(|&(l, v)| l == 0 || !(v > 0.0 && v.is_finite())) {
        return Err(Error::Domain("sizes and IPRs must be positive".into()));
    }
    let xs: Vec<f64> = pairs.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let r2 = if syy > 1e-300 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(D2Fit {
        sizes: pairs.iter().map(|p| p.0).collect(),
        iprs: pairs.iter().map(|p| p.1).collect(),
        d2: -slope,
        r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn chain(diag: Vec<f64>) -> TridiagonalHamiltonian {
        let n = diag.len();
        TridiagonalHamiltonian::new(diag, vec![1.0; n - 1]).unwrap()
    }

    #[test]
    fn two_site_analytic() {
        let h = chain(vec![0.0, 0.0]);
        let sol = eig_tridiagonal(&h, Which::All).unwrap();
        assert!((sol.values[0] + 1.0).abs() < 1e-15);
        assert!((sol.values[1] - 1.0).abs() < 1e-15);
        let r = 0.5f64.sqrt();
        assert!((sol.vectors[0][0].abs() - r).abs() < 1e-15);
        assert!((sol.vectors[0][0] + sol.vectors[0][1]).abs() < 1e-15);
        assert!((sol.vectors[1][0] - sol.vectors[1][1]).abs() < 1e-15);
    }

    #[test]
    fn open_chain_spectrum_all_paths() {
        let n = 40;
        let a = 0.3;
        let h = chain(vec![a; n]);
        let exact: Vec<f64> = {
            let mut v: Vec<f64> = (1..=n)
                .map(|k| a + 2.0 * (k as f64 * PI / (n + 1) as f64).cos())
                .collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let ql = eig_tridiagonal(&h, Which::All).unwrap();
        let sub = eig_tridiagonal(&h, Which::IndexRange { lo: 0, hi: n }).unwrap();
        let vals = eigenvalues(&h).unwrap();
        for k in 0..n {
            assert!((ql.values[k] - exact[k]).abs() < 1e-13);
            assert!((sub.values[k] - exact[k]).abs() < 1e-13);
            assert!((vals[k] - exact[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn window_selects_values() {
        let h = chain(vec![0.0; 30]);
        let sol = eig_tridiagonal(&h, Which::ValueWindow { lo: -0.5, hi: 0.5 }).unwrap();
        let all = eigenvalues(&h).unwrap();
        let want: Vec<f64> = all.into_iter().filter(|&e| (-0.5..0.5).contains(&e)).collect();
        assert_eq!(sol.len(), want.len());
        for (a, b) in sol.values.iter().zip(&want) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn bad_requests() {
        let h = chain(vec![0.0; 5]);
        assert!(eig_tridiagonal(&h, Which::IndexRange { lo: 3, hi: 9 }).is_err());
        assert!(eig_tridiagonal(&h, Which::ValueWindow { lo: 1.0, hi: f64::NAN }).is_err());
        let big = chain(vec![0.0; 5000]);
        assert!(matches!(
            eig_tridiagonal(&big, Which::All),
            Err(Error::FullVectorsGated(5000))
        ));
    }

    #[test]
    fn degenerate_diagonal_blocks() {
        // Zero hopping in the middle splits the chain into two identical
        // blocks: every eigenvalue is doubly degenerate.
        let h = TridiagonalHamiltonian::new(vec![0.0; 6], vec![1.0, 1.0, 0.0, 1.0, 1.0]).unwrap();
        let sol = eig_tridiagonal(&h, Which::IndexRange { lo: 0, hi: 6 }).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let d = dot(&sol.vectors[i], &sol.vectors[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-12, "<{i}|{j}> = {d}");
            }
        }
    }

    #[test]
    fn degenerate_pairs_are_localized() {
        // Two decoupled mirror-image blocks: each returned vector should live
        // on one block, ordered by site.
        let h = TridiagonalHamiltonian::new(
            vec![-3.0, 0.0, 0.0, 0.0, 0.0, -3.0],
            vec![1.0, 1.0, 0.0, 1.0, 1.0],
        )
        .unwrap();
        let sol = eig_tridiagonal(&h, Which::IndexRange { lo: 1, hi: 2 }).unwrap();
        let v = &sol.vectors[0];
        assert!(v[..3].iter().all(|x| x.abs() < 1e-12), "{v:?}");
        let sol = eig_tridiagonal(&h, Which::IndexRange { lo: 0, hi: 2 }).unwrap();
        assert!(sol.vectors[0][3..].iter().all(|x| x.abs() < 1e-12));
        assert!(sol.vectors[1][..3].iter().all(|x| x.abs() < 1e-12));
        let all = eig_tridiagonal(&h, Which::All).unwrap();
        for (a, b) in all.vectors[..2].iter().zip(&sol.vectors) {
            assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-10));
        }
    }

    #[test]
    fn pair_rotation_is_the_maximizer() {
        let a: Vec<f64> = (0..9).map(|k| ((k as f64) * 0.7).sin()).collect();
        let b: Vec<f64> = (0..9).map(|k| ((k as f64) * 1.3 + 0.2).cos()).collect();
        let f = |g: f64| -> f64 {
            let (s, c) = g.sin_cos();
            a.iter()
                .zip(&b)
                .map(|(x, y)| (c * x + s * y).powi(4) + (c * y - s * x).powi(4))
                .sum()
        };
        let best = (0..20_000).map(|k| f(k as f64 * 1e-4 * std::f64::consts::PI)).fold(f64::MIN, f64::max);
        let mut pair = vec![a.clone(), b.clone()];
        pipek_mezey(&mut pair);
        let got: f64 = pair.iter().flatten().map(|x| x.powi(4)).sum();
        assert!(got >= best - 1e-9, "{got} < {best}");
    }

    #[test]
    fn ipr_examples() {
        assert_eq!(ipr(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 1.0);
        let l = 16;
        let u = vec![1.0 / (l as f64).sqrt(); l];
        assert!((ipr(&u).unwrap() - 1.0 / l as f64).abs() < 1e-15);
        let r = 0.5f64.sqrt();
        assert!((ipr(&[r, r, 0.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(ipr(&[0.0, 0.0]).is_err());
        assert!(ipr_complex(&[Complex64::new(0.0, 0.0)]).is_err());
        // Unnormalized input is fine.
        assert!((ipr(&[3.0, 3.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn d2_examples() {
        let pairs: Vec<(usize, f64)> = DEFAULT_LADDER.iter().map(|&l| (l, 1.0 / l as f64)).collect();
        let fit = d2_fit(&pairs).unwrap();
        assert!((fit.d2 - 1.0).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        let flat: Vec<(usize, f64)> = DEFAULT_LADDER.iter().map(|&l| (l, 0.4)).collect();
        assert!(d2_fit(&flat).unwrap().d2.abs() < 1e-15);
        assert!(matches!(
            d2_fit(&pairs[..2]),
            Err(Error::TooFewPoints { needed: 3, found: 2 })
        ));
        assert!(d2_fit(&[(10, 0.1), (10, 0.1), (20, 0.1)]).is_err());
        assert!(d2_fit(&[(10, 0.1), (20, 0.0), (30, 0.1)]).is_err());
    }
}
