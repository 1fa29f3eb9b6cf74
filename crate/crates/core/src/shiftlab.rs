//! Shift-plus-finite-rank operators on `ℓ²_ℍ(ℤ)` and `ℓ²_ℍ(ℕ)`.
//!
//! An operator is `L + F` with `L = Σ c_m V^m` a Laurent polynomial in the shift
//! `(V^m x)_i = x_{i+m}` (coefficients act by left multiplication) and `F` a finite
//! matrix on the canonical basis. On `ℓ²_ℍ(ℕ)` the operator is `P L P + F` with `P`
//! the restriction to indices `i ≥ 0`. The class is closed under sums, products and
//! adjoints, so `R_q(T)` stays inside it.
//!
//! The image in the Calkin algebra is the symbol `s(z) = Σ χ(c_m) z^{−m}`, a 2×2
//! matrix function on the unit circle. `T` is Fredholm iff `det s` has no zeros on
//! `|z| = 1`; bilateral operators then have index 0, unilateral ones
//! `−wind(det s)/2`. Kernel dimensions are computed independently from window
//! compressions, or exactly for single-term bilateral operators.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fredholm::{AlgebraElement, Homomorphism};
use crate::grid::GridSpec;
use crate::linalg::{self, CMatrix};
use crate::qmat::{Invertibility, QMatrix};
use crate::quat::{Quaternion, Sphere};
use crate::random;

/// Finitely supported sequence `i ↦ x_i`.
pub type Seq = BTreeMap<i64, Quaternion>;

/// Largest window half-width used by the adaptive routines.
pub const MAX_WINDOW: usize = 400;

/// Points sampled on the unit circle for symbol norms.
const CIRCLE_SAMPLES: usize = 1024;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// `ℓ²_ℍ(ℤ)`.
    #[default]
    Bilateral,
    /// `ℓ²_ℍ(ℕ)`.
    Unilateral,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftOp {
    domain: Domain,
    terms: BTreeMap<i64, Quaternion>,
    fin: BTreeMap<(i64, i64), Quaternion>,
}

impl ShiftOp {
    pub fn zero(domain: Domain) -> Self {
        Self {
            domain,
            terms: BTreeMap::new(),
            fin: BTreeMap::new(),
        }
    }

    pub fn identity(domain: Domain) -> Self {
        Self::shift(domain, Quaternion::ONE, 0)
    }

    /// `c·V^m`.
    pub fn shift(domain: Domain, c: Quaternion, m: i64) -> Self {
        let mut op = Self::zero(domain);
        if !c.is_zero() {
            op.terms.insert(m, c);
        }
        op
    }

    /// The rank-one term `x ↦ e_i·q·x_j`.
    pub fn rank_one(domain: Domain, i: i64, j: i64, q: Quaternion) -> Result<Self> {
        Self::from_parts(domain, BTreeMap::new(), [((i, j), q)].into_iter().collect())
    }

    pub fn from_parts(
        domain: Domain,
        terms: BTreeMap<i64, Quaternion>,
        fin: BTreeMap<(i64, i64), Quaternion>,
    ) -> Result<Self> {
        let finite = |q: &Quaternion| q.to_array().iter().all(|v| v.is_finite());
        if !terms.values().all(finite) || !fin.values().all(finite) {
            return Err(Error::Input("operator entries must be finite".into()));
        }
        if domain == Domain::Unilateral && fin.keys().any(|&(i, j)| i < 0 || j < 0) {
            return Err(Error::Input(
                "unilateral finite-rank entries need i, j >= 0".into(),
            ));
        }
        Ok(Self { domain, terms, fin }.cleaned())
    }

    /// `R`, `T`, `RT` (= R+T), `V`, `Su` (unilateral forward shift) or `I`.
    pub fn named(name: &str) -> Result<Self> {
        let b = Domain::Bilateral;
        let t = || Self::rank_one(b, -1, 0, Quaternion::ONE);
        Ok(match name {
            "R" => &Self::shift(b, Quaternion::ONE, 1) - &t()?,
            "T" => t()?,
            "RT" => Self::shift(b, Quaternion::ONE, 1),
            "V" => Self::shift(b, Quaternion::ONE, 1),
            "Su" => Self::shift(Domain::Unilateral, Quaternion::ONE, -1),
            "I" => Self::identity(b),
            _ => return Err(Error::Input(format!("unknown operator `{name}`"))),
        })
    }

    /// The rank-one operator `T_q x = e_{−1}·q·x₀`.
    pub fn t_q(q: Quaternion) -> Self {
        Self::rank_one(Domain::Bilateral, -1, 0, q).expect("bilateral rank-one")
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn terms(&self) -> &BTreeMap<i64, Quaternion> {
        &self.terms
    }

    pub fn fin(&self) -> &BTreeMap<(i64, i64), Quaternion> {
        &self.fin
    }

    pub fn coeff(&self, m: i64) -> Quaternion {
        self.terms.get(&m).copied().unwrap_or(Quaternion::ZERO)
    }

    /// `max |m|` over the Laurent terms.
    pub fn bandwidth(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// `max(|i|, |j|)` over the finite-rank entries.
    pub fn fin_extent(&self) -> usize {
        self.fin
            .keys()
            .map(|&(i, j)| i.unsigned_abs().max(j.unsigned_abs()) as usize)
            .max()
            .unwrap_or(0)
    }

    fn cleaned(mut self) -> Self {
        self.terms.retain(|_, q| !q.is_zero());
        self.fin.retain(|_, q| !q.is_zero());
        self
    }

    fn in_domain(&self, i: i64) -> bool {
        self.domain == Domain::Bilateral || i >= 0
    }

    /// Matrix entry `⟨e_i, T e_j⟩`.
    pub fn entry(&self, i: i64, j: i64) -> Quaternion {
        if !self.in_domain(i) || !self.in_domain(j) {
            return Quaternion::ZERO;
        }
        self.coeff(j - i) + self.fin.get(&(i, j)).copied().unwrap_or(Quaternion::ZERO)
    }

    pub fn apply(&self, x: &Seq) -> Result<Seq> {
        if x.keys().any(|&j| !self.in_domain(j)) {
            return Err(Error::Domain("vector is supported outside ℓ²_ℍ(ℕ)".into()));
        }
        let mut y = Seq::new();
        for (&j, &xj) in x {
            for (&m, &c) in &self.terms {
                if self.in_domain(j - m) {
                    *y.entry(j - m).or_insert(Quaternion::ZERO) += c * xj;
                }
            }
        }
        for (&(i, j), &f) in &self.fin {
            if let Some(&xj) = x.get(&j) {
                *y.entry(i).or_insert(Quaternion::ZERO) += f * xj;
            }
        }
        y.retain(|_, q| !q.is_zero());
        Ok(y)
    }

    fn same_domain(&self, other: &Self) {
        assert_eq!(
            self.domain, other.domain,
            "operators act on different spaces"
        );
    }

    /// `T ∘ S`.
    pub fn compose(&self, other: &Self) -> Self {
        self.same_domain(other);
        let mut terms: BTreeMap<i64, Quaternion> = BTreeMap::new();
        for (&m, &a) in &self.terms {
            for (&k, &b) in &other.terms {
                *terms.entry(m + k).or_insert(Quaternion::ZERO) += a * b;
            }
        }
        let mut fin: BTreeMap<(i64, i64), Quaternion> = BTreeMap::new();
        let mut put = |i: i64, j: i64, q: Quaternion| {
            *fin.entry((i, j)).or_insert(Quaternion::ZERO) += q;
        };
        // L·F
        for (&m, &a) in &self.terms {
            for (&(r, j), &f) in &other.fin {
                put(r - m, j, a * f);
            }
        }
        // F·L
        for (&(i, l), &f) in &self.fin {
            for (&k, &b) in &other.terms {
                put(i, l + k, f * b);
            }
        }
        // F·F
        for (&(i, l), &f) in &self.fin {
            for (&(l2, j), &g) in &other.fin {
                if l == l2 {
                    put(i, j, f * g);
                }
            }
        }
        if self.domain == Domain::Unilateral {
            // P L₁ P L₂ P = P L₁ L₂ P − P L₁ (I−P) L₂ P
            for (&m, &a) in self.terms.range(..0) {
                for (&k, &b) in &other.terms {
                    for i in 0..-m {
                        let j = i + m + k;
                        if j >= 0 {
                            put(i, j, -(a * b));
                        }
                    }
                }
            }
            fin.retain(|&(i, j), _| i >= 0 && j >= 0);
        }
        let out = Self {
            domain: self.domain,
            terms,
            fin,
        }
        .cleaned();
        let reach = self.fin_extent() + other.fin_extent() + self.bandwidth() + other.bandwidth();
        assert!(
            out.fin_extent() <= reach,
            "finite-rank part escaped its window"
        );
        out
    }

    pub fn adjoint(&self) -> Self {
        Self {
            domain: self.domain,
            terms: self.terms.iter().map(|(&m, &c)| (-m, c.conj())).collect(),
            fin: self
                .fin
                .iter()
                .map(|(&(i, j), &f)| ((j, i), f.conj()))
                .collect(),
        }
    }

    pub fn scale_left(&self, q: Quaternion) -> Self {
        Self {
            domain: self.domain,
            terms: self.terms.iter().map(|(&m, &c)| (m, q * c)).collect(),
            fin: self.fin.iter().map(|(&k, &f)| (k, q * f)).collect(),
        }
        .cleaned()
    }

    pub fn scale_right(&self, q: Quaternion) -> Self {
        Self {
            domain: self.domain,
            terms: self.terms.iter().map(|(&m, &c)| (m, c * q)).collect(),
            fin: self.fin.iter().map(|(&k, &f)| (k, f * q)).collect(),
        }
        .cleaned()
    }

    pub fn powi(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.domain), |acc, _| acc.compose(self))
    }

    /// `R_q(T) = T² − 2Re(q)T + |q|²I`.
    pub fn char_elem(&self, q: Quaternion) -> Self {
        let t2 = self.compose(self);
        &(&t2 - &self.scale_right(Quaternion::real(2.0 * q.re())))
            + &Self::identity(self.domain).scale_right(Quaternion::real(q.norm_sqr()))
    }

    /// Image in the Calkin algebra, represented by the bilateral Laurent part.
    pub fn calkin_image(&self) -> Self {
        Self {
            domain: Domain::Bilateral,
            terms: self.terms.clone(),
            fin: BTreeMap::new(),
        }
    }

    pub fn symbol(&self) -> Symbol {
        Symbol {
            terms: self.terms.iter().map(|(&m, &c)| (m, chi2(c))).collect(),
        }
    }

    /// Window indices `[−N, N]` intersected with the domain.
    pub fn window(&self, n: usize) -> Vec<i64> {
        let n = n as i64;
        let lo = if self.domain == Domain::Bilateral {
            -n
        } else {
            0
        };
        (lo..=n).collect()
    }

    /// Rows reachable from the window: widened by the bandwidth and the finite-rank extent.
    fn window_rows(&self, n: usize) -> Vec<i64> {
        self.window(n + self.bandwidth() + self.fin_extent())
    }

    /// Complex adjoint of the block `⟨e_i, T e_j⟩` for `i ∈ rows`, `j ∈ cols`.
    fn rect_chi(&self, rows: &[i64], cols: &[i64]) -> CMatrix {
        let (r, c) = (rows.len(), cols.len());
        let mut m = CMatrix::zeros(2 * r, 2 * c);
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                let q = self.entry(i, j);
                if q.is_zero() {
                    continue;
                }
                let (z1, z2) = q.to_complex_pair();
                m[(a, b)] = z1;
                m[(a, c + b)] = z2;
                m[(r + a, b)] = -z2.conj();
                m[(r + a, c + b)] = z1.conj();
            }
        }
        m
    }

    /// Action on vectors supported in the window, as a tall complex matrix.
    fn window_block(&self, n: usize) -> CMatrix {
        self.rect_chi(&self.window_rows(n), &self.window(n))
    }

    /// A unit `u` with `u·c·ū ∈ ℂ_i` for every coefficient, if all of them share a slice.
    fn common_slice_rotation(&self) -> Option<Quaternion> {
        let mut axis: Option<Quaternion> = None;
        for c in self.terms.values().chain(self.fin.values()) {
            let im = c.im();
            let r = im.norm();
            if r <= 1e-15 * c.norm() {
                continue;
            }
            let dir = im / r;
            match axis {
                None => axis = Some(if dir.x < 0.0 { -dir } else { dir }),
                Some(a) => {
                    let cross = (a * dir).im().norm();
                    if cross > 1e-14 {
                        return None;
                    }
                }
            }
        }
        let Some(a) = axis else {
            return Some(Quaternion::ONE);
        };
        // (1 − i·a)/|1 − i·a| rotates a onto i; a·i ≥ 0 keeps it away from the antipode
        let u = Quaternion::ONE - Quaternion::I * a;
        Some(u / u.norm())
    }

    /// Singular values of the window block in descending order, each listed twice as in
    /// the complex adjoint. Operators living in one slice reduce to a half-size block.
    fn window_singular_values(&self, n: usize) -> Vec<f64> {
        let Some(u) = self.common_slice_rotation() else {
            return linalg::singular_values(&self.window_block(n));
        };
        let (rows, cols) = (self.window_rows(n), self.window(n));
        let entry = |a: usize, b: usize| {
            let q = u * self.entry(rows[a], cols[b]) * u.conj();
            Complex64::new(q.re(), q.x)
        };
        let mut sv: Vec<f64> = if u == Quaternion::ONE && self.all_real() {
            DMatrix::from_fn(rows.len(), cols.len(), |a, b| entry(a, b).re)
                .svd(false, false)
                .singular_values
                .iter()
                .copied()
                .collect()
        } else {
            linalg::singular_values(&CMatrix::from_fn(rows.len(), cols.len(), entry))
        };
        sv.sort_by(|a, b| b.total_cmp(a));
        sv.iter().flat_map(|&s| [s, s]).collect()
    }

    fn all_real(&self) -> bool {
        self.terms
            .values()
            .chain(self.fin.values())
            .all(|c| c.im().is_zero())
    }

    /// Square compression onto `span{e_i : i ∈ window(N)}`.
    pub fn compress(&self, n: usize) -> WindowMatrix {
        let idx = self.window(n);
        let matrix = QMatrix::from_fn(idx.len(), |a, b| self.entry(idx[a], idx[b]));
        WindowMatrix {
            half_width: n,
            first: idx[0],
            matrix,
        }
    }

    fn scale_hint(&self) -> f64 {
        let laurent: f64 = self.terms.values().map(|c| c.norm()).sum();
        let fin: f64 = self.fin.values().map(|f| f.norm_sqr()).sum::<f64>().sqrt();
        (laurent + fin).max(1.0)
    }

    /// Sets the coefficient of `V^m` (used by the JSON reader).
    fn with_term(mut self, m: i64, c: Quaternion) -> Self {
        self.terms.insert(m, c);
        self.cleaned()
    }
}

impl Add for &ShiftOp {
    type Output = ShiftOp;
    fn add(self, o: &ShiftOp) -> ShiftOp {
        self.same_domain(o);
        let mut out = self.clone();
        for (&m, &c) in &o.terms {
            *out.terms.entry(m).or_insert(Quaternion::ZERO) += c;
        }
        for (&k, &f) in &o.fin {
            *out.fin.entry(k).or_insert(Quaternion::ZERO) += f;
        }
        out.cleaned()
    }
}

impl Neg for &ShiftOp {
    type Output = ShiftOp;
    fn neg(self) -> ShiftOp {
        self.scale_right(Quaternion::real(-1.0))
    }
}

impl Sub for &ShiftOp {
    type Output = ShiftOp;
    fn sub(self, o: &ShiftOp) -> ShiftOp {
        self + &(-o)
    }
}

impl Mul for &ShiftOp {
    type Output = ShiftOp;
    fn mul(self, o: &ShiftOp) -> ShiftOp {
        self.compose(o)
    }
}

/// Compression of a [`ShiftOp`] to `span{e_first, …}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowMatrix {
    pub half_width: usize,
    pub first: i64,
    pub matrix: QMatrix,
}

type C2 = [[Complex64; 2]; 2];

fn chi2(q: Quaternion) -> C2 {
    let (z1, z2) = q.to_complex_pair();
    [[z1, z2], [-z2.conj(), z1.conj()]]
}

fn sigma2(m: &C2) -> (f64, f64) {
    let fro: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    let disc = (fro * fro - 4.0 * det * det).max(0.0).sqrt();
    let smax = ((fro + disc) / 2.0).sqrt();
    let smin = if smax > 0.0 { det / smax } else { 0.0 };
    (smax, smin)
}

/// `s(z) = Σ χ(c_m) z^{−m}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    terms: Vec<(i64, C2)>,
}

/// Zeros of `det s` relative to the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymbolInfo {
    pub fredholm: bool,
    /// Winding number of `det s` around the circle; meaningful when `fredholm`.
    pub winding: i64,
    /// Smallest `||z| − 1|` over the zeros of `det s`.
    pub gap: f64,
    /// Largest `min(|z|, 1/|z|)` over the zeros: per-step decay of kernel vectors.
    pub decay: f64,
}

impl Symbol {
    pub fn eval(&self, z: Complex64) -> C2 {
        let mut s = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (m, c) in &self.terms {
            let w = z.powi(-(*m as i32));
            for a in 0..2 {
                for b in 0..2 {
                    s[a][b] += c[a][b] * w;
                }
            }
        }
        s
    }

    fn circle(k: usize) -> Complex64 {
        Complex64::from_polar(
            1.0,
            std::f64::consts::TAU * k as f64 / CIRCLE_SAMPLES as f64,
        )
    }

    /// `sup_{|z|=1} σ_max(s(z))`, the essential norm.
    pub fn sup_norm(&self) -> f64 {
        (0..CIRCLE_SAMPLES)
            .map(|k| sigma2(&self.eval(Self::circle(k))).0)
            .fold(0.0, f64::max)
    }

    /// `inf_{|z|=1} σ_min(s(z))`: perturbations of smaller essential norm keep
    /// Fredholmness and the index.
    pub fn inf_sigma_min(&self) -> f64 {
        (0..CIRCLE_SAMPLES)
            .map(|k| sigma2(&self.eval(Self::circle(k))).1)
            .fold(f64::INFINITY, f64::min)
    }

    /// `P(z) = z^{2K} det s(z)`, lowest degree first, with `K = max |m|`.
    fn det_poly(&self) -> (Vec<Complex64>, usize) {
        let k = self
            .terms
            .iter()
            .map(|(m, _)| m.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let zero = Complex64::new(0.0, 0.0);
        let mut e = [
            [vec![zero; 2 * k + 1], vec![zero; 2 * k + 1]],
            [vec![zero; 2 * k + 1], vec![zero; 2 * k + 1]],
        ];
        for (m, c) in &self.terms {
            let d = (k as i64 - m) as usize;
            for a in 0..2 {
                for b in 0..2 {
                    e[a][b][d] += c[a][b];
                }
            }
        }
        let mul = |p: &[Complex64], q: &[Complex64]| {
            let mut r = vec![zero; p.len() + q.len() - 1];
            for (i, x) in p.iter().enumerate() {
                for (j, y) in q.iter().enumerate() {
                    r[i + j] += x * y;
                }
            }
            r
        };
        let d1 = mul(&e[0][0], &e[1][1]);
        let d2 = mul(&e[0][1], &e[1][0]);
        (d1.iter().zip(&d2).map(|(a, b)| a - b).collect(), k)
    }

    pub fn analysis(&self) -> Result<SymbolInfo> {
        let (p, k) = self.det_poly();
        let scale: f64 = p.iter().map(|c| c.norm()).sum();
        if scale <= 1e-14 {
            return Ok(SymbolInfo {
                fredholm: false,
                winding: 0,
                gap: 0.0,
                decay: 1.0,
            });
        }
        let roots = linalg::poly_roots(&p)?;
        let eval = |z: Complex64| {
            p.iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
        };
        let mut gap = f64::INFINITY;
        let mut on_circle = false;
        for z in &roots {
            let d = (z.norm() - 1.0).abs();
            gap = gap.min(d);
            // clustered zeros spread like eps^(1/k); confirm them on the circle itself
            if d < 1e-6 || (d < 1e-2 && eval(z / z.norm()).norm() <= 1e-12 * scale) {
                on_circle = true;
            }
        }
        let inside = roots.iter().filter(|z| z.norm() < 1.0).count() as i64;
        let decay = roots
            .iter()
            .map(|z| z.norm().min(1.0 / z.norm()))
            .fold(0.0, f64::max);
        Ok(SymbolInfo {
            fredholm: !on_circle,
            winding: inside - 2 * k as i64,
            gap,
            decay,
        })
    }
}

/// Index from the symbol alone: 0 on `ℓ²_ℍ(ℤ)`, `−wind(det s)/2` on `ℓ²_ℍ(ℕ)`.
pub fn symbol_index(op: &ShiftOp) -> Result<i64> {
    let info = op.symbol().analysis()?;
    if !info.fredholm {
        return Err(Error::NotFredholm(format!(
            "symbol determinant vanishes on the unit circle (gap {:e})",
            info.gap
        )));
    }
    match op.domain {
        Domain::Bilateral => Ok(0),
        Domain::Unilateral if info.winding % 2 == 0 => Ok(-info.winding / 2),
        Domain::Unilateral => Err(Error::Numeric(format!(
            "odd winding number {}",
            info.winding
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub window: usize,
    pub stable: bool,
}

fn window_sigma_max(op: &ShiftOp, n: usize) -> f64 {
    op.window_singular_values(n).first().copied().unwrap_or(0.0)
}

/// Norm of `T` restricted to vectors supported in the window. Nondecreasing in `N`;
/// `stable` when windows `N` and `N+5` agree to `1e-9`.
pub fn op_norm_estimate(op: &ShiftOp, n: usize) -> Result<NormEstimate> {
    let need = op.fin_extent() + op.bandwidth() + 2;
    if n <= need {
        return Err(Error::Domain(format!(
            "window {n} too small: need more than {need}"
        )));
    }
    let value = window_sigma_max(op, n);
    let next = window_sigma_max(op, n + 5);
    Ok(NormEstimate {
        value,
        window: n,
        stable: (next - value).abs() <= 1e-9,
    })
}

/// [`op_norm_estimate`] with the window doubled until stable (or [`MAX_WINDOW`]).
pub fn op_norm(op: &ShiftOp) -> NormEstimate {
    let mut n = (op.fin_extent() + op.bandwidth() + 3).max(8);
    loop {
        let est = op_norm_estimate(op, n).expect("window chosen large enough");
        if est.stable || 2 * n > MAX_WINDOW {
            return est;
        }
        n *= 2;
    }
}

/// Smallest singular value of `R_q(T)` on vectors supported in the window.
pub fn approx_s_spectrum_residual(op: &ShiftOp, q: Quaternion, n: usize) -> f64 {
    op.char_elem(q)
        .window_singular_values(n)
        .last()
        .copied()
        .unwrap_or(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IndexResult {
    pub dim_ker: usize,
    pub dim_coker: usize,
    pub index: i64,
    pub stable: bool,
}

impl IndexResult {
    fn new(dim_ker: usize, dim_coker: usize) -> Self {
        Self {
            dim_ker,
            dim_coker,
            index: dim_ker as i64 - dim_coker as i64,
            stable: true,
        }
    }
}

fn quaternionic_dim(complex_dim: usize) -> Result<usize> {
    if !complex_dim.is_multiple_of(2) {
        return Err(Error::Numeric(format!("odd complex nullity {complex_dim}")));
    }
    Ok(complex_dim / 2)
}

/// Exact kernel dimension of `c V^m + F` (bilateral, `c ≠ 0`) from
/// `c V^m + F = c V^m (I + G)`, `G = V^{−m} c⁻¹ F`.
fn single_term_kernel(op: &ShiftOp) -> Result<usize> {
    let (&m, &c) = op.terms.iter().next().expect("single term");
    let cinv = c.inverse()?;
    let g: BTreeMap<(i64, i64), Quaternion> = op
        .fin
        .iter()
        .map(|(&(r, j), &f)| ((r + m, j), cinv * f))
        .collect();
    // kernel vectors satisfy x = −Gx, so they live on rows(G) ∪ cols(G)
    let w: Vec<i64> = g
        .keys()
        .flat_map(|&(i, j)| [i, j])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if w.is_empty() {
        return Ok(0);
    }
    let block = QMatrix::from_fn(w.len(), |a, b| {
        let id = if a == b {
            Quaternion::ONE
        } else {
            Quaternion::ZERO
        };
        id + g.get(&(w[a], w[b])).copied().unwrap_or(Quaternion::ZERO)
    });
    let chi = block.chi();
    quaternionic_dim(linalg::nullity(
        &chi,
        1e-9 * linalg::sigma_max(&chi).max(1.0),
    ))
}

/// Approximate kernel dimension on the window: singular values below `tol`.
fn window_kernel(op: &ShiftOp, n: usize, tol: f64) -> Option<usize> {
    let small = op
        .window_singular_values(n)
        .iter()
        .filter(|&&s| s < tol)
        .count();
    quaternionic_dim(small).ok()
}

/// Kernel and cokernel dimensions of a Fredholm operator.
///
/// Single-term bilateral operators are reduced to a finite matrix. Otherwise the
/// approximate nullities of window compressions (and of the adjoint's) are grown
/// until they agree at `N` and `N+5` and reproduce the symbol index.
pub fn index(op: &ShiftOp) -> Result<IndexResult> {
    if op.terms.is_empty() {
        return Err(Error::NotFredholm(
            "finite-rank operator on an infinite-dimensional space".into(),
        ));
    }
    let expected = symbol_index(op)?;
    if op.domain == Domain::Bilateral && op.terms.len() == 1 {
        return Ok(IndexResult::new(
            single_term_kernel(op)?,
            single_term_kernel(&op.adjoint())?,
        ));
    }
    let adj = op.adjoint();
    let tol = 1e-6 * op.scale_hint();
    let reach = op.fin_extent() + op.bandwidth();
    // kernel vectors decay like decay^i; start where they are below 1e-9, with room for multiplicity
    let decay = op.symbol().analysis()?.decay;
    let settle = if decay > 0.0 {
        (1.25 * 1e-9f64.ln() / decay.ln()).ceil() as usize
    } else {
        0
    };
    let mut n = (2 * reach + 4).max(12).max(settle + reach);
    if n > MAX_WINDOW {
        return Err(Error::Unstable(format!(
            "kernel vectors decay like {decay:.6}^i; a window of {n} exceeds {MAX_WINDOW}"
        )));
    }
    let mut last = None;
    while n <= MAX_WINDOW {
        let counts = |n| Some((window_kernel(op, n, tol)?, window_kernel(&adj, n, tol)?));
        let (a, b) = (counts(n), counts(n + 5));
        if let (Some(a), Some(b)) = (a, b) {
            if a == b && a.0 as i64 - a.1 as i64 == expected {
                return Ok(IndexResult::new(a.0, a.1));
            }
        }
        last = Some((n, a, b));
        n *= 2;
    }
    Err(Error::Unstable(format!(
        "window dimensions did not settle (last window, counts at N and N+5: {last:?}); symbol index {expected}"
    )))
}

/// Whether `R_q(T)` is invertible modulo compacts.
pub fn calkin_fredholm_at(op: &ShiftOp, q: Quaternion) -> Result<bool> {
    Ok(op.char_elem(q).symbol().analysis()?.fredholm)
}

/// Classification of one grid sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShiftPoint {
    pub u: f64,
    pub r: f64,
    /// In the Fredholm (Calkin) S-spectrum.
    pub in_fredholm: bool,
    /// In the Weyl S-spectrum: not Fredholm, or index ≠ 0.
    pub in_weyl: bool,
    pub index: Option<i64>,
    /// [`approx_s_spectrum_residual`] at the report's window.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftSpectrum {
    pub grid: GridSpec,
    pub window: usize,
    pub points: Vec<ShiftPoint>,
}

impl ShiftSpectrum {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("u,r,in_fredholm,in_weyl,index,residual\n");
        for p in &self.points {
            let idx = p.index.map(|i| i.to_string()).unwrap_or_default();
            s.push_str(&format!(
                "{},{},{},{},{},{:e}\n",
                p.u, p.r, p.in_fredholm as u8, p.in_weyl as u8, idx, p.residual
            ));
        }
        s
    }

    pub fn fredholm_spheres(&self) -> Vec<Sphere> {
        self.points
            .iter()
            .filter(|p| p.in_fredholm)
            .map(|p| Sphere::new(p.u, p.r))
            .collect()
    }

    pub fn weyl_spheres(&self) -> Vec<Sphere> {
        self.points
            .iter()
            .filter(|p| p.in_weyl)
            .map(|p| Sphere::new(p.u, p.r))
            .collect()
    }

    pub fn at(&self, s: Sphere, tol: f64) -> Option<&ShiftPoint> {
        self.points
            .iter()
            .find(|p| Sphere::new(p.u, p.r).distance(s) <= tol)
    }
}

/// Fredholm and Weyl S-spectra of `T` over a grid of spheres.
pub fn shift_spectrum(op: &ShiftOp, grid: &GridSpec, window: usize) -> Result<ShiftSpectrum> {
    grid.validate()?;
    let points = grid
        .spheres()
        .par_iter()
        .map(|s| {
            let rq = op.char_elem(s.representative());
            let info = rq.symbol().analysis()?;
            let index = if info.fredholm {
                Some(symbol_index(&rq)?)
            } else {
                None
            };
            Ok(ShiftPoint {
                u: s.re,
                r: s.rad,
                in_fredholm: !info.fredholm,
                in_weyl: index != Some(0),
                index,
                residual: rq
                    .window_singular_values(window)
                    .last()
                    .copied()
                    .unwrap_or(0.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShiftSpectrum {
        grid: *grid,
        window,
        points,
    })
}

/// [`shift_spectrum`] read as the Weyl S-spectrum.
pub fn weyl_s_spectrum_shift(op: &ShiftOp, grid: &GridSpec) -> Result<ShiftSpectrum> {
    shift_spectrum(op, grid, 20)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryWitness {
    pub q: Quaternion,
    pub n: u32,
    /// `‖R_n − R²‖` with `R_n = (R + T_{qⁿ})²`.
    pub distance: f64,
    /// `2|q|ⁿ + |q|^{2n}`.
    pub bound: f64,
    /// Worst relative residual of the explicit inverse of `R_n`, both orders.
    pub inverse_residual: f64,
    pub pass: bool,
}

/// `x = (R + T_p)^{−2} y`: `x_i = p⁻¹ y_{i−2}` for `i ∈ {0, 1}`, `x_i = y_{i−2}` otherwise.
pub fn inverse_r_tp_squared(p: Quaternion, y: &Seq) -> Result<Seq> {
    let pinv = p.inverse()?;
    Ok(y.iter()
        .map(|(&i, &v)| {
            let k = i + 2;
            (k, if k == 0 || k == 1 { pinv * v } else { v })
        })
        .collect())
}

fn seq_norm(x: &Seq) -> f64 {
    x.values().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
}

fn seq_diff(a: &Seq, b: &Seq) -> f64 {
    let keys: BTreeSet<i64> = a.keys().chain(b.keys()).copied().collect();
    keys.iter()
        .map(|k| {
            let x = a.get(k).copied().unwrap_or(Quaternion::ZERO);
            let y = b.get(k).copied().unwrap_or(Quaternion::ZERO);
            (x - y).norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

pub fn random_seq(rng: &mut impl Rng, half_width: i64) -> Seq {
    (-half_width..=half_width)
        .map(|i| (i, random::quaternion(rng)))
        .collect()
}

/// `R_n = (R + T_{qⁿ})²` and its distance to `R²`, with the explicit inverse of
/// `R_n` checked on 100 random vectors supported in `[−10, 10]`.
pub fn boundary_witness_r(q: Quaternion, n: u32) -> Result<BoundaryWitness> {
    boundary_witness_r_seeded(q, n, 0)
}

pub fn boundary_witness_r_seeded(q: Quaternion, n: u32, seed: u64) -> Result<BoundaryWitness> {
    let m = q.norm();
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::Domain(format!("need 0 < |q| < 1, got |q| = {m}")));
    }
    let r = ShiftOp::named("R")?;
    let p = q.powi(n);
    let rt = &r + &ShiftOp::t_q(p);
    let rn = rt.compose(&rt);
    let diff = &rn - &r.compose(&r);
    let distance = op_norm_estimate(&diff, diff.fin_extent() + diff.bandwidth() + 3)?.value;
    let bound = 2.0 * m.powi(n as i32) + m.powi(2 * n as i32);

    let mut rng = random::seeded(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let y = random_seq(&mut rng, 10);
        let x = inverse_r_tp_squared(p, &y)?;
        let back = rn.apply(&x)?;
        let there = inverse_r_tp_squared(p, &rn.apply(&y)?)?;
        worst = worst.max(seq_diff(&back, &y) / seq_norm(&y));
        worst = worst.max(seq_diff(&there, &y) / seq_norm(&y));
    }
    let pass = distance <= bound * (1.0 + 1e-12) && worst <= 1e-12;
    Ok(BoundaryWitness {
        q,
        n,
        distance,
        bound,
        inverse_residual: worst,
        pass,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbePoint {
    pub q: Quaternion,
    pub index: i64,
    /// `inf σ_min` of the symbol of `R_q(T)`: essential perturbation radius at `q`.
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstancyReport {
    pub points: Vec<ProbePoint>,
    pub constant: bool,
    /// Every step of the path moves `R_q(T)` by less than the radius at its start.
    pub covered: bool,
}

/// Index of `R_q(T)` along a path inside the Fredholm region.
pub fn index_constancy_probe(op: &ShiftOp, path: &[Quaternion]) -> Result<ConstancyReport> {
    let ess = op.symbol().sup_norm();
    let mut points = Vec::with_capacity(path.len());
    for &q in path {
        let rq = op.char_elem(q);
        let index = symbol_index(&rq).map_err(|e| match e {
            Error::NotFredholm(_) => {
                Error::NotFredholm(format!("path leaves the Fredholm region at q = {q}"))
            }
            other => other,
        })?;
        points.push(ProbePoint {
            q,
            index,
            radius: rq.symbol().inf_sigma_min(),
        });
    }
    let constant = points.windows(2).all(|w| w[0].index == w[1].index);
    let covered = points.windows(2).all(|w| {
        let step = 2.0 * (w[0].q.re() - w[1].q.re()).abs() * ess
            + (w[0].q.norm_sqr() - w[1].q.norm_sqr()).abs();
        step < w[0].radius
    });
    Ok(ConstancyReport {
        points,
        constant,
        covered,
    })
}

/// `𝒜 = π`: the quotient by compact operators, realised as the symbol.
#[derive(Clone, Copy, Debug, Default)]
pub struct CalkinHom;

impl Homomorphism for CalkinHom {
    type Source = ShiftOp;
    type Target = ShiftOp;

    fn name(&self) -> &'static str {
        "calkin"
    }
    fn apply(&self, v: &ShiftOp) -> ShiftOp {
        v.calkin_image()
    }
    fn in_kernel(&self, v: &ShiftOp, _tol: f64) -> bool {
        v.terms.is_empty()
    }
    /// Fredholm of index 0.
    fn is_weyl(&self, v: &ShiftOp, _tol: f64) -> Result<bool> {
        match symbol_index(v) {
            Ok(i) => Ok(i == 0),
            Err(Error::NotFredholm(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

impl AlgebraElement for ShiftOp {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self.compose(other)
    }
    fn lscale(&self, q: Quaternion) -> Self {
        self.scale_left(q)
    }
    fn rscale(&self, q: Quaternion) -> Self {
        self.scale_right(q)
    }
    fn unit(&self) -> Self {
        Self::identity(self.domain)
    }
    fn zero(&self) -> Self {
        Self::zero(self.domain)
    }
    fn norm(&self) -> f64 {
        if self.fin.is_empty() {
            self.symbol().sup_norm()
        } else {
            op_norm(self).value
        }
    }
    /// Invertible iff Fredholm with trivial kernel and cokernel; the witness is the
    /// windowed smallest singular value.
    fn invertibility(&self, tol: f64) -> Invertibility {
        let sigma_min = self
            .window_singular_values(40)
            .last()
            .copied()
            .unwrap_or(0.0);
        let invertible = matches!(index(self), Ok(r) if r.dim_ker == 0 && r.dim_coker == 0);
        Invertibility {
            invertible: invertible && sigma_min > tol,
            sigma_min,
        }
    }
    fn try_inverse(&self) -> Result<Self> {
        match (self.domain, self.terms.len(), self.fin.is_empty()) {
            (Domain::Bilateral, 1, true) => {
                let (&m, &c) = self.terms.iter().next().expect("one term");
                Ok(Self::shift(Domain::Bilateral, c.inverse()?, -m))
            }
            (Domain::Unilateral, 1, true) if self.terms.contains_key(&0) => {
                Ok(Self::shift(Domain::Unilateral, self.coeff(0).inverse()?, 0))
            }
            _ => Err(Error::Unsupported(
                "inverse of a general shift operator".into(),
            )),
        }
    }
    fn char_element(&self, q: Quaternion) -> Self {
        self.char_elem(q)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub coeff: Quaternion,
    pub power: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinEntry {
    pub i: i64,
    pub j: i64,
    pub q: Quaternion,
}

/// JSON form `{"coeff": [w,x,y,z], "power": m, "fin": [{"i", "j", "q"}]}`, optionally
/// with extra `"terms"` and a `"domain"` of `"bilateral"` or `"unilateral"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<Quaternion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermSpec>,
    #[serde(default)]
    pub fin: Vec<FinEntry>,
    #[serde(default)]
    pub domain: Domain,
}

impl TryFrom<OpSpec> for ShiftOp {
    type Error = Error;

    fn try_from(spec: OpSpec) -> Result<Self> {
        let mut terms: BTreeMap<i64, Quaternion> = BTreeMap::new();
        match (spec.coeff, spec.power) {
            (Some(c), Some(m)) => {
                terms.insert(m, c);
            }
            (None, None) => {}
            _ => return Err(Error::Input("`coeff` and `power` go together".into())),
        }
        for t in spec.terms {
            *terms.entry(t.power).or_insert(Quaternion::ZERO) += t.coeff;
        }
        let mut fin: BTreeMap<(i64, i64), Quaternion> = BTreeMap::new();
        for e in spec.fin {
            *fin.entry((e.i, e.j)).or_insert(Quaternion::ZERO) += e.q;
        }
        ShiftOp::from_parts(spec.domain, terms, fin)
    }
}

impl From<&ShiftOp> for OpSpec {
    fn from(op: &ShiftOp) -> Self {
        let fin = op
            .fin
            .iter()
            .map(|(&(i, j), &q)| FinEntry { i, j, q })
            .collect();
        let mut spec = OpSpec {
            coeff: None,
            power: None,
            terms: Vec::new(),
            fin,
            domain: op.domain,
        };
        if op.terms.len() == 1 {
            let (&m, &c) = op.terms.iter().next().expect("one term");
            spec.coeff = Some(c);
            spec.power = Some(m);
        } else {
            spec.terms = op
                .terms
                .iter()
                .map(|(&power, &coeff)| TermSpec { coeff, power })
                .collect();
        }
        spec
    }
}

impl ShiftOp {
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: OpSpec = serde_json::from_str(s)?;
        spec.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&OpSpec::from(self)).expect("plain data serializes")
    }

    /// Adds `c·V^m` to the operator.
    pub fn plus_term(self, m: i64, c: Quaternion) -> Self {
        let c = self.coeff(m) + c;
        self.with_term(m, c)
    }
}
