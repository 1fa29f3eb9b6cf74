//! Thin wrappers over nalgebra's complex dense routines.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Singular values in descending order. Empty for empty matrices.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn sigma_max(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// `min ‖M f‖` over unit `f`; zero when `M` has more columns than rows.
pub fn sigma_min(m: &CMatrix) -> f64 {
    if m.ncols() == 0 {
        return f64::INFINITY;
    }
    if m.nrows() < m.ncols() {
        return 0.0;
    }
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Number of columns minus the numerical rank at threshold `tol`.
pub fn nullity(m: &CMatrix, tol: f64) -> usize {
    let rank = singular_values(m).iter().filter(|&&s| s > tol).count();
    m.ncols() - rank
}

pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 200 * n.max(1))
        .ok_or_else(|| Error::Numeric("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

pub fn inverse(m: &CMatrix) -> Option<CMatrix> {
    m.clone().lu().try_inverse()
}

/// Roots of `c[0] + c[1] z + … + c[d] z^d` (trailing zero coefficients trimmed).
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Numeric(
            "zero polynomial has no finite root set".into(),
        ));
    }
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() <= 1e-14 * scale) {
        c.pop();
    }
    let zeros = c.iter().take_while(|x| x.norm() <= 1e-14 * scale).count();
    let c = &c[zeros..];
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let d = c.len() - 1;
    if d == 0 {
        return Ok(roots);
    }
    // a polynomial in z^g: solve for w = z^g and take g-th roots
    let g = (1..=d)
        .filter(|&i| c[i].norm() > 1e-14 * scale)
        .fold(0, gcd);
    if g > 1 {
        let reduced: Vec<Complex64> = c.iter().step_by(g).copied().collect();
        for w in poly_roots(&reduced)? {
            let (r, theta) = w.to_polar();
            let r = r.powf(1.0 / g as f64);
            roots.extend((0..g).map(|j| {
                Complex64::from_polar(
                    r,
                    (theta + 2.0 * std::f64::consts::PI * j as f64) / g as f64,
                )
            }));
        }
        return Ok(roots);
    }
    // exactly symmetric companions can stall the QR sweep; rotating z breaks the symmetry
    let mut last = None;
    for k in 0..4 {
        let w = Complex64::from_polar(1.0, 0.37 * k as f64);
        let rot: Vec<Complex64> = c
            .iter()
            .enumerate()
            .map(|(i, x)| x * w.powi(i as i32))
            .collect();
        match companion_roots(&rot) {
            Ok(r) => {
                roots.extend(r.into_iter().map(|z| z * w));
                return Ok(roots);
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn companion_roots(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = c.len() - 1;
    let lead = c[d];
    let mut comp = CMatrix::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..d {
        comp[(i, d - 1)] = -c[i] / lead;
    }
    eigenvalues(&comp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_of_quadratic() {
        // (z - 2)(z + i) = z² + (i - 2) z - 2i
        let mut r = poly_roots(&[c(0.0, -2.0), c(-2.0, 1.0), c(1.0, 0.0)]).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - c(2.0, 0.0)).norm() < 1e-12);
        assert!(poly_roots(&[c(3.0, 0.0)]).unwrap().is_empty());
        // z⁴ − 16 = 0
        let r = poly_roots(&[
            c(-16.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(r.len(), 4);
        for z in r {
            assert!((z.norm() - 2.0).abs() < 1e-12 && (z.powi(4) - c(16.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn wide_matrix_has_zero_sigma_min() {
        let m = CMatrix::from_element(2, 3, c(1.0, 0.0));
        assert_eq!(sigma_min(&m), 0.0);
        assert_eq!(nullity(&m, 1e-12), 2);
    }
}
