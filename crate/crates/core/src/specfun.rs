//! Bessel functions of the first kind, all integer orders at once.
//!
//! Small arguments use the power series directly. Otherwise the orders are
//! generated by Miller's downward recurrence from a start order well past the
//! turning point `j ~ x`, then normalized either by the sum rule
//! `J_0 + 2 sum J_{2k} = 1` or, for large `x`, by matching the Hankel
//! asymptotic forms of `J_0` and `J_1`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 1.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;
const RESCALE_AT: f64 = 1e250;

#[derive(Debug, Clone, PartialEq)]
pub struct BesselColumn {
    pub x: f64,
    /// `J_0(x) ..= J_{j_max}(x)`.
    pub values: Vec<f64>,
}

impl BesselColumn {
    pub fn j_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, order: usize) -> f64 {
        self.values[order]
    }

    /// `J_0 + 2 sum_{k>=1} J_{2k}` over the stored orders.
    pub fn normalization_sum(&self) -> f64 {
        let even: f64 = self.values.iter().step_by(2).skip(1).sum();
        self.values[0] + 2.0 * even
    }
}

pub fn bessel_all_orders(x: f64, j_max: usize) -> Result<BesselColumn> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("Bessel argument must be finite and >= 0, got {x}")));
    }
    let j_max = j_max.max(1);
    let values = if x == 0.0 {
        let mut v = vec![0.0; j_max + 1];
        v[0] = 1.0;
        v
    } else if x <= SERIES_LIMIT {
        series_column(x, j_max)
    } else {
        miller_column(x, j_max)
    };
    Ok(BesselColumn { x, values })
}

/// Start order for the downward recurrence: past the Airy transition region
/// around `j = x`, plus a guard band that grows like `sqrt(j)`.
pub fn miller_start_order(x: f64, j_max: usize) -> usize {
    let turning = (x + 12.0 * x.cbrt() + 1.0).ceil() as usize;
    let base = j_max.max(turning);
    base + (10.0 + 2.0 * (base as f64).sqrt()).ceil() as usize
}

fn series_column(x: f64, j_max: usize) -> Vec<f64> {
    let half = 0.5 * x;
    let q = half * half;
    let mut values = Vec::with_capacity(j_max + 1);
    let mut lead = 1.0;
    for j in 0..=j_max {
        if j > 0 {
            lead *= half / j as f64;
        }
        if lead == 0.0 {
            values.push(0.0);
            continue;
        }
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= -q / (k * (j as f64 + k));
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            k += 1.0;
        }
        values.push(lead * sum);
    }
    values
}

fn miller_column(x: f64, j_max: usize) -> Vec<f64> {
    let start = miller_start_order(x, j_max);
    let mut values = vec![0.0; j_max + 1];
    let mut above = 0.0; // f_{j+1}
    let mut current = 1e-30; // f_j, j = start
    let mut norm = 0.0;

    let mut j = start;
    loop {
        if j <= j_max {
            values[j] = current;
        }
        if j.is_multiple_of(2) {
            norm += if j == 0 { current } else { 2.0 * current };
        }
        if j == 0 {
            break;
        }
        let below = (2 * j) as f64 / x * current - above;
        above = current;
        current = below;
        j -= 1;
        if current.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            current *= s;
            above *= s;
            norm *= s;
            for v in values.iter_mut().skip(j + 1) {
                *v *= s;
            }
        }
    }

    let scale = if x >= ASYMPTOTIC_LIMIT {
        let (j0, j1) = hankel_j0_j1(x);
        let (f0, f1) = (values[0], values[1]);
        (j0 * f0 + j1 * f1) / (f0 * f0 + f1 * f1)
    } else {
        1.0 / norm
    };
    for v in &mut values {
        *v *= scale;
    }
    values
}

/// Hankel asymptotic expansions of `J_0(x)` and `J_1(x)`, accurate to a few
/// ulps for `x >= 25`.
fn hankel_j0_j1(x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    let amp = (2.0 / (PI * x)).sqrt();

    let pq = |nu: f64| {
        let mu = 4.0 * nu * nu;
        let mut p = 1.0;
        let mut q = 0.0;
        let mut term = 1.0f64;
        let mut k = 1usize;
        loop {
            let odd = (2 * k - 1) as f64;
            let next = term * (mu - odd * odd) / (k as f64 * 8.0 * x);
            if next.abs() >= term.abs() && k > 2 {
                break;
            }
            term = next;
            // term_k enters P for even k and Q for odd k, with alternating signs.
            match k % 4 {
                1 => q += term,
                2 => p -= term,
                3 => q -= term,
                _ => p += term,
            }
            if term.abs() < 1e-18 {
                break;
            }
            k += 1;
        }
        (p, q)
    };

    let (p0, q0) = pq(0.0);
    let (p1, q1) = pq(1.0);
    // chi_0 = x - pi/4, chi_1 = x - 3 pi/4
    let (cos0, sin0) = ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2);
    let (cos1, sin1) = ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2);
    (
        amp * (p0 * cos0 - q0 * sin0),
        amp * (p1 * cos1 - q1 * sin1),
    )
}

/// Checks the Jacobi-Anger expansions of `cos(r cos x)` and `sin(r cos x)`:
/// the cosine-series coefficients are extracted with the trapezoidal rule on
/// `quad_points` nodes and compared with
/// `cos: J_0, 2(-1)^p J_{2p}` and `sin: 2(-1)^{p-1} J_{2p-1}`.
/// Returns the largest absolute discrepancy over orders `0..=j_max`.
pub fn jacobi_anger_check(r: f64, j_max: usize, quad_points: usize) -> Result<f64> {
    if quad_points < 4 * j_max.max(1) {
        return Err(Error::Domain(format!(
            "quad_points = {quad_points} must be >= 4 * j_max = {}",
            4 * j_max
        )));
    }
    let column = bessel_all_orders(r.abs(), j_max)?;
    let bessel = |j: usize| {
        let v = column.values[j];
        if r < 0.0 && j % 2 == 1 {
            -v
        } else {
            v
        }
    };

    let nodes: Vec<f64> = (0..quad_points)
        .map(|k| TAU * k as f64 / quad_points as f64)
        .collect();
    let cos_samples: Vec<f64> = nodes.iter().map(|&t| (r * t.cos()).cos()).collect();
    let sin_samples: Vec<f64> = nodes.iter().map(|&t| (r * t.cos()).sin()).collect();

    let mut worst = 0.0f64;
    for j in 0..=j_max {
        let weight = if j == 0 { 1.0 } else { 2.0 } / quad_points as f64;
        let (mut a_cos, mut a_sin) = (0.0, 0.0);
        for (k, &t) in nodes.iter().enumerate() {
            let basis = (j as f64 * t).cos();
            a_cos += cos_samples[k] * basis;
            a_sin += sin_samples[k] * basis;
        }
        a_cos *= weight;
        a_sin *= weight;

        let (want_cos, want_sin) = if j == 0 {
            (bessel(0), 0.0)
        } else if j.is_multiple_of(2) {
            let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
            (2.0 * sign * bessel(j), 0.0)
        } else {
            let p = j.div_ceil(2);
            let sign = if (p - 1) % 2 == 0 { 1.0 } else { -1.0 };
            (0.0, 2.0 * sign * bessel(j))
        };
        worst = worst.max((a_cos - want_cos).abs()).max((a_sin - want_sin).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_argument() {
        let c = bessel_all_orders(0.0, 5).unwrap();
        assert_eq!(c.values, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bessel_all_orders(-1.0, 3).is_err());
        assert!(bessel_all_orders(f64::NAN, 3).is_err());
        assert!(bessel_all_orders(f64::INFINITY, 3).is_err());
    }

    #[test]
    fn bounded_by_one() {
        for &x in &[0.3, 1.0, 7.5, 42.0, 300.0, 12345.6] {
            let c = bessel_all_orders(x, 60).unwrap();
            assert!(c.values.iter().all(|v| v.abs() <= 1.0), "x = {x}");
        }
    }

    #[test]
    fn series_and_recurrence_agree_at_the_switch() {
        let x = SERIES_LIMIT;
        let a = series_column(x, 30);
        let b = miller_column(x, 30);
        for (j, (u, v)) in a.iter().zip(&b).enumerate() {
            assert!((u - v).abs() <= 1e-15 + 1e-13 * u.abs(), "order {j}: {u} vs {v}");
        }
    }

    #[test]
    fn asymptotic_and_sum_normalization_agree() {
        let x = 40.0;
        let (j0, j1) = hankel_j0_j1(x);
        let col = miller_column(x, 80);
        // Sum rule applied directly to the normalized column.
        assert!((col.iter().step_by(2).skip(1).sum::<f64>() * 2.0 + col[0] - 1.0).abs() < 1e-13);
        assert!((col[0] - j0).abs() < 1e-15);
        assert!((col[1] - j1).abs() < 1e-15);
    }

    #[test]
    fn jacobi_anger_zero_radius() {
        let err = jacobi_anger_check(0.0, 10, 64).unwrap();
        assert!(err < 1e-15, "{err}");
    }

    #[test]
    fn jacobi_anger_needs_enough_nodes() {
        assert!(jacobi_anger_check(3.0, 20, 40).is_err());
    }

    #[test]
    fn jacobi_anger_negative_radius() {
        let err = jacobi_anger_check(-3.0, 20, 256).unwrap();
        assert!(err < 1e-12, "{err}");
    }
}
