//! Least-squares polynomial fitting and real root extraction for the low
//! degree polynomials that show up in the sphericity condition.

use nalgebra::{DMatrix, DVector};

/// Coefficients `c[0] + c[1] x + ... + c[d] x^d` fitted to samples.
pub fn fit(xs: &[f64], ys: &[f64], degree: usize) -> Vec<f64> {
    let rows = xs.len();
    let v = DMatrix::from_fn(rows, degree + 1, |i, j| xs[i].powi(j as i32));
    let y = DVector::from_column_slice(ys);
    let svd = v.svd(true, true);
    let c = svd
        .solve(&y, 1e-14)
        .expect("SVD computed with both U and V^T");
    c.iter().copied().collect()
}

pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Drops leading coefficients that are negligible next to the largest one.
pub fn trim(coeffs: &[f64], rel: f64) -> Vec<f64> {
    let max = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let mut out = coeffs.to_vec();
    while out.len() > 1 && out.last().is_some_and(|c| c.abs() <= rel * max) {
        out.pop();
    }
    out
}

/// Real roots via the companion matrix, ascending. Roots whose imaginary
/// part is below `imag_tol * (1 + |re|)` count as real.
pub fn real_roots(coeffs: &[f64], imag_tol: f64) -> Vec<f64> {
    let c = trim(coeffs, 1e-12);
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    if deg == 1 {
        return vec![-c[0] / lead];
    }
    let mut m = DMatrix::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -c[i] / lead;
    }
    let mut roots: Vec<f64> = m
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= imag_tol * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}
