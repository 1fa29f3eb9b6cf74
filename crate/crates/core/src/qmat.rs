//! Quaternionic `n×n` matrices and their complex adjoint.
//!
//! The complex adjoint `χ(A)` writes `A = A₁ + A₂·j` with `A₁, A₂` over `C_i` and
//! embeds it as the `2n×2n` block matrix `[[A₁, A₂], [−Ā₂, Ā₁]]`. `χ` is a unital
//! `*`-homomorphism, so invertibility, norms and singular values of `A` are read
//! off `χ(A)`. The S-spectrum of `A` is the set of `q` for which the spherical
//! characteristic element `R_q(A) = A² − 2Re(q)A + |q|²I` is singular.

use std::ops::{Add, Mul, Neg, Sub};

#[cfg(test)]
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::linalg::{self, CMatrix};
use crate::quat::{Quaternion, Sphere};
use crate::spheres;

#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    n: usize,
    data: Vec<Quaternion>,
}

/// Result of an invertibility test: the decision and the smallest singular value behind it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Invertibility {
    pub invertible: bool,
    pub sigma_min: f64,
}

impl QMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Quaternion::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Quaternion::ONE)
    }

    /// `q·I`.
    pub fn scalar(n: usize, q: Quaternion) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = q;
        }
        m
    }

    pub fn diag(entries: &[Quaternion]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &q) in entries.iter().enumerate() {
            m[(i, i)] = q;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<Quaternion>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Input("matrix must have n >= 1".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Input(format!(
                "row {bad} has {} entries, expected {n}",
                rows[bad].len()
            )));
        }
        if rows
            .iter()
            .flatten()
            .any(|q| !q.to_array().iter().all(|v| v.is_finite()))
        {
            return Err(Error::Input("matrix entries must be finite".into()));
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<Quaternion>> {
        self.data
            .chunks(self.n.max(1))
            .map(<[Quaternion]>::to_vec)
            .collect()
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&q| f(q)).collect(),
        }
    }

    /// `qA = (q·a_ij)`.
    pub fn scale_left(&self, q: Quaternion) -> Self {
        self.map(|a| q * a)
    }

    /// `Aq = (a_ij·q)`.
    pub fn scale_right(&self, q: Quaternion) -> Self {
        self.map(|a| a * q)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|a| a * s)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn powi(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.n), |acc, _| &acc * self)
    }

    /// Entrywise max-norm of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|q| q.is_zero())
    }

    /// Complex adjoint `[[A₁, A₂], [−Ā₂, Ā₁]]`.
    pub fn chi(&self) -> CMatrix {
        let n = self.n;
        let mut c = CMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let (a1, a2) = self[(i, j)].to_complex_pair();
                c[(i, j)] = a1;
                c[(i, n + j)] = a2;
                c[(n + i, j)] = -a2.conj();
                c[(n + i, n + j)] = a1.conj();
            }
        }
        c
    }

    /// Inverse of [`QMatrix::chi`] for matrices of complex-adjoint shape.
    pub fn from_chi(c: &CMatrix) -> Result<Self> {
        if c.nrows() != c.ncols() || !c.nrows().is_multiple_of(2) {
            return Err(Error::Input(
                "complex adjoint must be square of even size".into(),
            ));
        }
        let n = c.nrows() / 2;
        Ok(Self::from_fn(n, |i, j| {
            Quaternion::from_complex_pair(c[(i, j)], c[(i, n + j)])
        }))
    }

    /// Singular values of the quaternionic matrix (each appears twice in `χ`; returned once).
    pub fn singular_values(&self) -> Vec<f64> {
        linalg::singular_values(&self.chi())
            .into_iter()
            .step_by(2)
            .collect()
    }

    /// Operator norm: largest singular value of `χ(A)`.
    pub fn op_norm(&self) -> f64 {
        linalg::sigma_max(&self.chi())
    }

    pub fn sigma_min(&self) -> f64 {
        linalg::sigma_min(&self.chi())
    }

    /// Scale-relative threshold `1e-9 · max(1, ‖A‖)`.
    pub fn default_tol(&self) -> f64 {
        1e-9 * self.op_norm().max(1.0)
    }

    pub fn is_invertible(&self, tol: f64) -> Invertibility {
        let sigma_min = self.sigma_min();
        Invertibility {
            invertible: sigma_min > tol,
            sigma_min,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let check = self.is_invertible(self.default_tol());
        if !check.invertible {
            return Err(Error::Domain(format!(
                "matrix is singular (sigma_min = {:e})",
                check.sigma_min
            )));
        }
        let inv = linalg::inverse(&self.chi())
            .ok_or_else(|| Error::Numeric("LU inversion failed".into()))?;
        Self::from_chi(&inv)
    }

    /// `R_q(A) = A² − 2Re(q)A + |q|²I`.
    pub fn char_elem(&self, q: Quaternion) -> Self {
        let a2 = self * self;
        let mut out = &a2 - &self.scale(2.0 * q.re());
        let m2 = q.norm_sqr();
        for i in 0..self.n {
            out[(i, i)] += Quaternion::real(m2);
        }
        out
    }

    /// Eigen-spheres of `χ(A)`, verified against singularity of `R_q(A)`.
    pub fn s_spectrum_exact(&self) -> Result<Vec<Sphere>> {
        self.s_spectrum_with(&SpectrumOptions::for_matrix(self))
    }

    pub fn s_spectrum_with(&self, opts: &SpectrumOptions) -> Result<Vec<Sphere>> {
        if self.n == 0 {
            return Err(Error::Input("empty matrix".into()));
        }
        let eig = linalg::eigenvalues(&self.chi())?;
        if eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numeric("non-finite eigenvalue".into()));
        }
        let raw: Vec<Sphere> = eig.iter().map(|z| Sphere::new(z.re, z.im.abs())).collect();
        let found = spheres::cluster(&raw, opts.dedup_tol);
        for s in &found {
            for p in s.sample(opts.verify_samples) {
                let sm = self.char_elem(p).sigma_min();
                if sm > opts.verify_tol {
                    return Err(Error::Numeric(format!(
                        "eigen-sphere {s} failed singularity check at {p}: sigma_min = {sm:e}"
                    )));
                }
            }
        }
        Ok(found)
    }

    /// `σ_min(χ(R_{u+ir}(A)))` over the grid, row-major (`u` outer, `r` inner).
    pub fn s_spectrum_scan(&self, grid: &GridSpec) -> Result<ScanGrid> {
        grid.validate()?;
        let points: Vec<ScanPoint> = grid
            .spheres()
            .par_iter()
            .map(|s| ScanPoint {
                u: s.re,
                r: s.rad,
                sigma_min: self.char_elem(s.representative()).sigma_min(),
            })
            .collect();
        Ok(ScanGrid {
            grid: *grid,
            points,
        })
    }
}

impl QMatrix {
    /// Scan-only spectrum locator: finds local minima of the scan over `grid`, then zooms
    /// into each with shrinking 5×5 stencils until `σ_min < thresh` or the step underflows.
    /// Uses no eigen-decomposition, so it serves as an independent check of
    /// [`QMatrix::s_spectrum_exact`].
    pub fn locate_spectrum_by_scan(&self, grid: &GridSpec, thresh: f64) -> Result<Vec<ScanPoint>> {
        let scan = self.s_spectrum_scan(grid)?;
        let sigma = |u: f64, r: f64| {
            self.char_elem(Quaternion::new(u, r.abs(), 0.0, 0.0))
                .sigma_min()
        };
        let seeds = scan.local_minima_below(f64::INFINITY);
        let refined: Vec<ScanPoint> = seeds
            .par_iter()
            .map(|seed| {
                let mut best = *seed;
                let mut step = grid.step;
                while best.sigma_min >= thresh && step > 1e-13 {
                    let mut moved = false;
                    let centre = best;
                    for a in -2i32..=2 {
                        for b in -2i32..=2 {
                            let u = centre.u + a as f64 * step / 2.0;
                            let r = (centre.r + b as f64 * step / 2.0).max(0.0);
                            let v = sigma(u, r);
                            if v < best.sigma_min {
                                best = ScanPoint { u, r, sigma_min: v };
                                moved = true;
                            }
                        }
                    }
                    if !moved {
                        step /= 2.0;
                    }
                }
                best
            })
            .collect();
        Ok(refined)
    }
}

/// Tolerances for [`QMatrix::s_spectrum_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumOptions {
    /// Eigen-spheres closer than this are merged.
    pub dedup_tol: f64,
    /// A returned sphere must make `R_q(A)` have `σ_min` at most this.
    pub verify_tol: f64,
    pub verify_samples: usize,
}

impl SpectrumOptions {
    /// Defaults scaled to `‖A‖`: merging at `1e-7·s`, certification at `1e-6·s²`, `s = max(1, ‖A‖)`.
    pub fn for_matrix(a: &QMatrix) -> Self {
        let s = a.op_norm().max(1.0);
        Self {
            dedup_tol: 1e-7 * s,
            verify_tol: 1e-6 * s * s,
            verify_samples: 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    pub u: f64,
    pub r: f64,
    pub sigma_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanGrid {
    pub grid: GridSpec,
    pub points: Vec<ScanPoint>,
}

impl ScanGrid {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("u,r,sigma_min\n");
        for p in &self.points {
            s.push_str(&format!("{},{},{:e}\n", p.u, p.r, p.sigma_min));
        }
        s
    }

    /// Grid points that are local minima (over the 8-neighbourhood) with value below `thresh`.
    pub fn local_minima_below(&self, thresh: f64) -> Vec<ScanPoint> {
        let nu = self.grid.u_values().len();
        let nr = self.grid.r_values().len();
        let at = |a: usize, b: usize| self.points[a * nr + b].sigma_min;
        let mut out = Vec::new();
        for a in 0..nu {
            for b in 0..nr {
                let v = at(a, b);
                if v >= thresh {
                    continue;
                }
                let mut is_min = true;
                for da in -1i64..=1 {
                    for db in -1i64..=1 {
                        let (x, y) = (a as i64 + da, b as i64 + db);
                        if (da, db) == (0, 0) || x < 0 || y < 0 || x >= nu as i64 || y >= nr as i64
                        {
                            continue;
                        }
                        if at(x as usize, y as usize) < v {
                            is_min = false;
                        }
                    }
                }
                if is_min {
                    out.push(self.points[a * nr + b]);
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.n, o.n, "dimension mismatch");
        let n = self.n;
        let mut out = QMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * o[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.n, o.n, "dimension mismatch");
        QMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.n, o.n, "dimension mismatch");
        QMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        self.map(|q| -q)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    entries: Vec<Vec<Quaternion>>,
}

impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            n: self.n,
            entries: self.rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        if raw.entries.len() != raw.n {
            return Err(serde::de::Error::custom(format!(
                "n = {} but {} rows given",
                raw.n,
                raw.entries.len()
            )));
        }
        QMatrix::from_rows(raw.entries).map_err(serde::de::Error::custom)
    }
}

/// Complex unit `i` as a `C_i` element, for tests of χ against scalar actions.
#[cfg(test)]
pub(crate) fn complex_of(q: Quaternion) -> Option<Complex64> {
    (q.y == 0.0 && q.z == 0.0).then(|| Complex64::new(q.w, q.x))
}
