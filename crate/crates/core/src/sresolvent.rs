//! Left S-resolvent, Cauchy kernel series, and a numerical slice-regularity check.
//!
//! For `q` off the S-spectrum, `S_L⁻¹(q, A) = −R_q(A)⁻¹(A − q̄I)`. When `‖A‖ < |q|`
//! this is the sum of the left Cauchy kernel series `Σ Aⁿ q^{−1−n}`, and
//! `R_q(A)⁻¹ = Σ Aⁿ aₙ` with `aₙ = |q|^{−2n−2} Σ_{h≤n} q^h q̄^{n−h}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::{ImaginaryUnit, Quaternion};

/// Longest series the module will sum.
pub const MAX_SERIES_TERMS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct ResolventSample {
    pub q: Quaternion,
    pub value: QMatrix,
}

pub fn s_resolvent_left(a: &QMatrix, q: Quaternion) -> Result<QMatrix> {
    let r = a.char_elem(q);
    let check = r.is_invertible(r.default_tol().max(a.default_tol()));
    if !check.invertible {
        return Err(Error::SpectralPoint {
            q,
            sigma_min: check.sigma_min,
        });
    }
    let shifted = a - &QMatrix::scalar(a.n(), q.conj());
    Ok(-&(&r.inverse()? * &shifted))
}

pub fn sample(a: &QMatrix, q: Quaternion) -> Result<ResolventSample> {
    Ok(ResolventSample {
        q,
        value: s_resolvent_left(a, q)?,
    })
}

fn check_series_domain(a: &QMatrix, q: Quaternion, terms: usize) -> Result<()> {
    let norm = a.op_norm();
    if norm >= q.norm() {
        return Err(Error::Divergence {
            norm,
            modulus: q.norm(),
        });
    }
    if terms > MAX_SERIES_TERMS {
        return Err(Error::Domain(format!(
            "series length {terms} exceeds the cap of {MAX_SERIES_TERMS}"
        )));
    }
    Ok(())
}

/// Partial sums `S_N = Σ_{n≤N} Aⁿ q^{−1−n}` for every `N ≤ max_n`.
pub fn cauchy_partial_sums(a: &QMatrix, q: Quaternion, max_n: usize) -> Result<Vec<QMatrix>> {
    check_series_domain(a, q, max_n)?;
    let qinv = q.inverse()?;
    let mut power = QMatrix::identity(a.n());
    let mut qpow = qinv;
    let mut sum = QMatrix::zeros(a.n());
    let mut out = Vec::with_capacity(max_n + 1);
    for _ in 0..=max_n {
        sum = &sum + &power.scale_right(qpow);
        out.push(sum.clone());
        power = &power * a;
        qpow = qpow * qinv;
    }
    Ok(out)
}

pub fn cauchy_partial_sum(a: &QMatrix, q: Quaternion, n: usize) -> Result<QMatrix> {
    Ok(cauchy_partial_sums(a, q, n)?
        .pop()
        .expect("at least one term"))
}

/// `‖S_N · [−(A − q̄I)⁻¹ R_q(A)] − I‖`.
pub fn series_inverse_identity(a: &QMatrix, q: Quaternion, n: usize) -> Result<f64> {
    Ok(series_inverse_residuals(a, q, n)?
        .pop()
        .expect("at least one term"))
}

/// [`series_inverse_identity`] for every partial sum up to `max_n`.
pub fn series_inverse_residuals(a: &QMatrix, q: Quaternion, max_n: usize) -> Result<Vec<f64>> {
    let sums = cauchy_partial_sums(a, q, max_n)?;
    let shifted = a - &QMatrix::scalar(a.n(), q.conj());
    let shifted_inv = shifted
        .inverse()
        .map_err(|_| Error::Precondition("A − q̄I is not invertible".into()))?;
    let candidate = -&(&shifted_inv * &a.char_elem(q));
    let id = QMatrix::identity(a.n());
    Ok(sums
        .iter()
        .map(|s| (&(s * &candidate) - &id).op_norm())
        .collect())
}

/// The coefficients `a_0..a_N` of the series expansion of `R_q(A)⁻¹`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesCoefficients {
    pub q: Quaternion,
    pub coeffs: Vec<Quaternion>,
}

impl SeriesCoefficients {
    pub fn new(q: Quaternion, max_n: usize) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::Domain("coefficients need q ≠ 0".into()));
        }
        let m2 = q.norm_sqr();
        let qbar = q.conj();
        let coeffs = (0..=max_n)
            .map(|n| {
                let s = (0..=n).fold(Quaternion::ZERO, |acc, h| {
                    acc + q.powi(h as u32) * qbar.powi((n - h) as u32)
                });
                s / m2.powi(n as i32 + 1)
            })
            .collect();
        Ok(Self { q, coeffs })
    }

    /// Largest violation of `a₀ = |q|⁻²`, `−2Re(q)a₀ + |q|²a₁ = 0` and
    /// `a_{n−2} − 2Re(q)a_{n−1} + |q|²a_n = 0`.
    pub fn recurrence_defect(&self) -> f64 {
        let m2 = self.q.norm_sqr();
        let t = 2.0 * self.q.re();
        let c = &self.coeffs;
        let mut worst = (c[0] - Quaternion::real(1.0 / m2)).norm();
        if c.len() > 1 {
            worst = worst.max((c[0] * -t + c[1] * m2).norm());
        }
        for n in 2..c.len() {
            worst = worst.max((c[n - 2] - c[n - 1] * t + c[n] * m2).norm());
        }
        worst
    }
}

/// `‖R_q(A)·(Σ_{n≤N} Aⁿ aₙ) − I‖`.
pub fn coefficient_inverse(a: &QMatrix, q: Quaternion, n: usize) -> Result<f64> {
    Ok(coefficient_inverse_residuals(a, q, n)?
        .pop()
        .expect("at least one term"))
}

pub fn coefficient_inverse_residuals(a: &QMatrix, q: Quaternion, max_n: usize) -> Result<Vec<f64>> {
    check_series_domain(a, q, max_n)?;
    let coeffs = SeriesCoefficients::new(q, max_n)?;
    let r = a.char_elem(q);
    let id = QMatrix::identity(a.n());
    let mut power = QMatrix::identity(a.n());
    let mut sum = QMatrix::zeros(a.n());
    let mut out = Vec::with_capacity(max_n + 1);
    for c in &coeffs.coeffs {
        sum = &sum + &power.scale_right(*c);
        out.push((&(&r * &sum) - &id).op_norm());
        power = &power * a;
    }
    Ok(out)
}

/// Central-difference estimate of `‖∂̄_I f(q₀ + I q₁)‖` with
/// `∂̄_I f = ½(∂f/∂q₀ + (∂f/∂q₁)·I)`, `I` acting on the right.
pub fn wirtinger_residual<F>(f: F, q0: f64, q1: f64, axis: ImaginaryUnit, h: f64) -> Result<f64>
where
    F: Fn(Quaternion) -> Result<QMatrix>,
{
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Domain(format!("step h = {h} must be positive")));
    }
    let at = |a: f64, b: f64| f(Quaternion::from_slice(a, b, axis));
    // centre of the 5-point stencil: must itself be off the spectrum
    at(q0, q1)?;
    let d0 = (&at(q0 + h, q1)? - &at(q0 - h, q1)?).scale(0.5 / h);
    let d1 = (&at(q0, q1 + h)? - &at(q0, q1 - h)?).scale(0.5 / h);
    let dbar = (&d0 + &d1.scale_right(axis.get())).scale(0.5);
    Ok(dbar.op_norm())
}

/// Wirtinger residual of `q ↦ S_L⁻¹(q, A)` on the slice `C_I`.
pub fn slice_regularity_residual(
    a: &QMatrix,
    q0: f64,
    q1: f64,
    axis: ImaginaryUnit,
    h: f64,
) -> Result<f64> {
    wirtinger_residual(|q| s_resolvent_left(a, q), q0, q1, axis, h)
}

/// Residual traces reported by the `resolvent` command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolventReport {
    pub q: Quaternion,
    pub residual_series: Vec<f64>,
    pub residual_coeff: Vec<f64>,
}

pub fn resolvent_report(a: &QMatrix, q: Quaternion, max_n: usize) -> Result<ResolventReport> {
    Ok(ResolventReport {
        q,
        residual_series: series_inverse_residuals(a, q, max_n)?,
        residual_coeff: coefficient_inverse_residuals(a, q, max_n)?,
    })
}
