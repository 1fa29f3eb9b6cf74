//! Two-sided quaternionic Banach algebras, homomorphisms, and the Fredholm, Weyl and
//! boundary S-spectra they induce.
//!
//! `v` is Fredholm relative to `𝒜: V → W` when `𝒜(v)` is invertible, and Weyl when
//! `v ∈ V⁻¹ + ker 𝒜`. The Fredholm S-spectrum is `σ_S(𝒜(v))`; the Weyl S-spectrum
//! collects the spheres where `R_q(v)` fails to be Weyl.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{Invertibility, QMatrix};
use crate::quat::{Quaternion, Sphere};
use crate::random;
use crate::spheres;

/// Sphere sets are compared at this tolerance in `(re, rad)` coordinates.
pub const SET_TOL: f64 = 1e-7;

/// Members sampled on each candidate sphere when deciding Weyl membership.
const WEYL_SAMPLES: usize = 4;

/// Singularity threshold for `R_q(v)` scaled to `v`: `1e-6·max(1, ‖v‖)²`.
pub fn spectral_tol(norm: f64) -> f64 {
    let s = norm.max(1.0);
    1e-6 * s * s
}

/// A quaternionic two-sided Banach algebra with unit.
pub trait AlgebraElement: Clone {
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    /// `q·v`.
    fn lscale(&self, q: Quaternion) -> Self;
    /// `v·q`.
    fn rscale(&self, q: Quaternion) -> Self;
    /// Unit of the algebra `self` lives in.
    fn unit(&self) -> Self;
    fn zero(&self) -> Self;
    fn norm(&self) -> f64;
    fn invertibility(&self, tol: f64) -> Invertibility;
    fn try_inverse(&self) -> Result<Self>;

    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.rscale(Quaternion::real(-1.0)))
    }

    /// `R_q(v) = v² − 2Re(q)v + |q|²·1`.
    fn char_element(&self, q: Quaternion) -> Self {
        self.times(self)
            .minus(&self.rscale(Quaternion::real(2.0 * q.re())))
            .plus(&self.unit().rscale(Quaternion::real(q.norm_sqr())))
    }
}

/// Elements whose S-spectrum is a computable finite union of spheres.
pub trait ExactSpectrum {
    fn s_spectrum(&self) -> Result<Vec<Sphere>>;
}

/// A unital algebra homomorphism `𝒜: V → W`.
pub trait Homomorphism {
    type Source: AlgebraElement;
    type Target: AlgebraElement;

    fn name(&self) -> &'static str;
    fn apply(&self, v: &Self::Source) -> Self::Target;

    fn in_kernel(&self, v: &Self::Source, tol: f64) -> bool {
        self.apply(v).norm() <= tol
    }

    /// Decides `v ∈ V⁻¹ + ker 𝒜`.
    fn is_weyl(&self, _v: &Self::Source, _tol: f64) -> Result<bool> {
        Err(Error::Unsupported(format!(
            "{} has no Weyl decision procedure",
            self.name()
        )))
    }
}

impl AlgebraElement for QMatrix {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn lscale(&self, q: Quaternion) -> Self {
        self.scale_left(q)
    }
    fn rscale(&self, q: Quaternion) -> Self {
        self.scale_right(q)
    }
    fn unit(&self) -> Self {
        QMatrix::identity(self.n())
    }
    fn zero(&self) -> Self {
        QMatrix::zeros(self.n())
    }
    fn norm(&self) -> f64 {
        self.op_norm()
    }
    fn invertibility(&self, tol: f64) -> Invertibility {
        self.is_invertible(tol)
    }
    fn try_inverse(&self) -> Result<Self> {
        self.inverse()
    }
    fn char_element(&self, q: Quaternion) -> Self {
        self.char_elem(q)
    }
}

impl ExactSpectrum for QMatrix {
    fn s_spectrum(&self) -> Result<Vec<Sphere>> {
        self.s_spectrum_exact()
    }
}

/// `𝒜 = id` on `n×n` matrices. Its kernel is `{0}`, so Weyl means invertible.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityHom;

impl Homomorphism for IdentityHom {
    type Source = QMatrix;
    type Target = QMatrix;

    fn name(&self) -> &'static str {
        "identity"
    }
    fn apply(&self, v: &QMatrix) -> QMatrix {
        v.clone()
    }
    fn is_weyl(&self, v: &QMatrix, tol: f64) -> Result<bool> {
        Ok(v.is_invertible(tol).invertible)
    }
}

/// Upper block-triangular matrices `[[D₁, U], [0, D₂]]` with `k×k` blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockTriangular {
    pub d1: QMatrix,
    pub u: QMatrix,
    pub d2: QMatrix,
}

impl BlockTriangular {
    pub fn new(d1: QMatrix, u: QMatrix, d2: QMatrix) -> Result<Self> {
        if d1.n() != u.n() || u.n() != d2.n() {
            return Err(Error::Input(format!(
                "block sizes differ: {}, {}, {}",
                d1.n(),
                u.n(),
                d2.n()
            )));
        }
        Ok(Self { d1, u, d2 })
    }

    pub fn diagonal(d1: QMatrix, d2: QMatrix) -> Result<Self> {
        let k = d1.n();
        Self::new(d1, QMatrix::zeros(k), d2)
    }

    pub fn block_size(&self) -> usize {
        self.d1.n()
    }

    /// Splits a `2k×2k` matrix; the lower-left block must vanish.
    pub fn from_matrix(m: &QMatrix) -> Result<Self> {
        if !m.n().is_multiple_of(2) {
            return Err(Error::Input(format!(
                "block algebra needs even size, got {}",
                m.n()
            )));
        }
        let k = m.n() / 2;
        for i in 0..k {
            for j in 0..k {
                if !m[(k + i, j)].is_zero() {
                    return Err(Error::Input(format!(
                        "entry ({}, {}) below the diagonal blocks is nonzero",
                        k + i,
                        j
                    )));
                }
            }
        }
        Ok(Self {
            d1: QMatrix::from_fn(k, |i, j| m[(i, j)]),
            u: QMatrix::from_fn(k, |i, j| m[(i, k + j)]),
            d2: QMatrix::from_fn(k, |i, j| m[(k + i, k + j)]),
        })
    }

    pub fn to_matrix(&self) -> QMatrix {
        let k = self.block_size();
        QMatrix::from_fn(2 * k, |i, j| match (i < k, j < k) {
            (true, true) => self.d1[(i, j)],
            (true, false) => self.u[(i, j - k)],
            (false, false) => self.d2[(i - k, j - k)],
            (false, true) => Quaternion::ZERO,
        })
    }

    fn map(&self, f: impl Fn(&QMatrix) -> QMatrix) -> Self {
        Self {
            d1: f(&self.d1),
            u: f(&self.u),
            d2: f(&self.d2),
        }
    }

    pub fn random(rng: &mut impl Rng, k: usize) -> Self {
        Self {
            d1: random::matrix(rng, k, 1.0),
            u: random::matrix(rng, k, 1.0),
            d2: random::matrix(rng, k, 1.0),
        }
    }
}

impl AlgebraElement for BlockTriangular {
    fn plus(&self, o: &Self) -> Self {
        Self {
            d1: &self.d1 + &o.d1,
            u: &self.u + &o.u,
            d2: &self.d2 + &o.d2,
        }
    }
    fn times(&self, o: &Self) -> Self {
        Self {
            d1: &self.d1 * &o.d1,
            u: &(&self.d1 * &o.u) + &(&self.u * &o.d2),
            d2: &self.d2 * &o.d2,
        }
    }
    fn lscale(&self, q: Quaternion) -> Self {
        self.map(|m| m.scale_left(q))
    }
    fn rscale(&self, q: Quaternion) -> Self {
        self.map(|m| m.scale_right(q))
    }
    fn unit(&self) -> Self {
        let k = self.block_size();
        Self {
            d1: QMatrix::identity(k),
            u: QMatrix::zeros(k),
            d2: QMatrix::identity(k),
        }
    }
    fn zero(&self) -> Self {
        self.map(|m| QMatrix::zeros(m.n()))
    }
    fn norm(&self) -> f64 {
        self.to_matrix().op_norm()
    }
    fn invertibility(&self, tol: f64) -> Invertibility {
        self.to_matrix().is_invertible(tol)
    }
    fn try_inverse(&self) -> Result<Self> {
        let i1 = self.d1.inverse()?;
        let i2 = self.d2.inverse()?;
        let u = -&(&(&i1 * &self.u) * &i2);
        Ok(Self { d1: i1, u, d2: i2 })
    }
}

impl ExactSpectrum for BlockTriangular {
    fn s_spectrum(&self) -> Result<Vec<Sphere>> {
        let s = self.norm().max(1.0);
        let a = self.d1.s_spectrum_exact()?;
        let b = self.d2.s_spectrum_exact()?;
        Ok(spheres::union(&a, &b, 1e-7 * s))
    }
}

/// Projection of [`BlockTriangular`] onto its block diagonal; the kernel is the
/// strictly upper part.
#[derive(Clone, Copy, Debug, Default)]
pub struct BlockDiagonalHom;

impl Homomorphism for BlockDiagonalHom {
    type Source = BlockTriangular;
    type Target = BlockTriangular;

    fn name(&self) -> &'static str {
        "block"
    }
    fn apply(&self, v: &BlockTriangular) -> BlockTriangular {
        BlockTriangular {
            d1: v.d1.clone(),
            u: QMatrix::zeros(v.block_size()),
            d2: v.d2.clone(),
        }
    }
    fn in_kernel(&self, v: &BlockTriangular, tol: f64) -> bool {
        v.d1.op_norm() <= tol && v.d2.op_norm() <= tol
    }
    fn is_weyl(&self, v: &BlockTriangular, tol: f64) -> Result<bool> {
        Ok(v.d1.is_invertible(tol).invertible && v.d2.is_invertible(tol).invertible)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumKind {
    S,
    FredholmS,
    WeylS,
    BoundaryS,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Excluded {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "zero")]
    Zero,
    #[serde(rename = "Hp0")]
    Hp0,
}

impl Excluded {
    pub fn apply(self, s: &[Sphere], tol: f64) -> Vec<Sphere> {
        match self {
            Excluded::None => s.to_vec(),
            Excluded::Zero => spheres::without_origin(s, tol),
            Excluded::Hp0 => spheres::without_purely_imaginary(s, tol),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub kind: SpectrumKind,
    pub spheres: Vec<Sphere>,
    pub excluded: Excluded,
}

impl SpectrumReport {
    pub fn new(kind: SpectrumKind, spheres: Vec<Sphere>) -> Self {
        Self {
            kind,
            spheres,
            excluded: Excluded::None,
        }
    }

    pub fn excluding(mut self, ex: Excluded) -> Self {
        self.spheres = ex.apply(&self.spheres, SET_TOL);
        self.excluded = ex;
        self
    }
}

pub fn is_fredholm_element<H: Homomorphism>(h: &H, v: &H::Source) -> bool {
    let image = h.apply(v);
    image.invertibility(1e-9 * image.norm().max(1.0)).invertible
}

pub fn is_weyl_element<H: Homomorphism>(h: &H, v: &H::Source) -> Result<bool> {
    h.is_weyl(v, 1e-9 * v.norm().max(1.0))
}

/// `σ_S(𝒜(v))`.
pub fn fredholm_s_spectrum<H>(h: &H, v: &H::Source) -> Result<SpectrumReport>
where
    H: Homomorphism,
    H::Target: ExactSpectrum,
{
    Ok(SpectrumReport::new(
        SpectrumKind::FredholmS,
        h.apply(v).s_spectrum()?,
    ))
}

/// Spheres of `σ_S(v)` on which `R_q(v)` is not a Weyl element.
pub fn weyl_s_spectrum<H>(h: &H, v: &H::Source) -> Result<SpectrumReport>
where
    H: Homomorphism,
    H::Source: ExactSpectrum,
{
    let tol = spectral_tol(v.norm());
    let mut out = Vec::new();
    for s in v.s_spectrum()? {
        for p in s.sample(WEYL_SAMPLES) {
            if !h.is_weyl(&v.char_element(p), tol)? {
                out.push(s);
                break;
            }
        }
    }
    Ok(SpectrumReport::new(SpectrumKind::WeylS, out))
}

/// Residual of the algebraic identity
/// `R_q(b)R_q(a)/|q|² = R_q(a+b) − ab − ba + (b²a² − 2Re(q)(b²a + ba² − 2Re(q)ba))/|q|²`.
pub fn verify_sum_identity<E: AlgebraElement>(q: Quaternion, a: &E, b: &E) -> Result<f64> {
    if q.is_zero() {
        return Err(Error::Domain("sum identity needs q ≠ 0".into()));
    }
    let m2 = q.norm_sqr();
    let t = q.re();
    let r = |x: f64| Quaternion::real(x);
    let lhs = b
        .char_element(q)
        .times(&a.char_element(q))
        .rscale(r(1.0 / m2));
    let (ab, ba) = (a.times(b), b.times(a));
    let (a2, b2) = (a.times(a), b.times(b));
    let inner = b2
        .times(a)
        .plus(&b.times(&a2))
        .minus(&ba.rscale(r(2.0 * t)));
    let tail = b2
        .times(&a2)
        .minus(&inner.rscale(r(2.0 * t)))
        .rscale(r(1.0 / m2));
    let rhs = a.plus(b).char_element(q).minus(&ab).minus(&ba).plus(&tail);
    Ok(lhs.minus(&rhs).norm())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetComparison {
    pub lhs: Vec<Sphere>,
    pub rhs: Vec<Sphere>,
    pub distance: f64,
    pub tol: f64,
    pub pass: bool,
}

impl SetComparison {
    pub fn new(lhs: Vec<Sphere>, rhs: Vec<Sphere>, tol: f64) -> Self {
        let distance = spheres::hausdorff(&lhs, &rhs);
        Self {
            lhs,
            rhs,
            distance,
            tol,
            pass: distance <= tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumReport {
    pub fredholm: SetComparison,
    /// Present when the homomorphism decides Weyl membership.
    pub weyl: Option<SetComparison>,
}

impl SumReport {
    pub fn pass(&self) -> bool {
        self.fredholm.pass && self.weyl.as_ref().is_none_or(|w| w.pass)
    }
}

/// Union law `σ(a+b)∖{0} = [σ(a) ∪ σ(b)]∖{0}` for the Fredholm and Weyl S-spectra,
/// under `ab, ba ∈ ker 𝒜`.
pub fn theorem_sum_spectra<H>(h: &H, a: &H::Source, b: &H::Source) -> Result<SumReport>
where
    H: Homomorphism,
    H::Source: ExactSpectrum,
    H::Target: ExactSpectrum,
{
    let tol = 1e-9 * (1.0 + a.norm() + b.norm()).powi(2);
    if !h.in_kernel(&a.times(b), tol) || !h.in_kernel(&b.times(a), tol) {
        return Err(Error::Precondition("ab and ba must lie in ker 𝒜".into()));
    }
    sum_law(h, a, b)
}

fn sum_law<H>(h: &H, a: &H::Source, b: &H::Source) -> Result<SumReport>
where
    H: Homomorphism,
    H::Source: ExactSpectrum,
    H::Target: ExactSpectrum,
{
    let sum = a.plus(b);
    let drop0 = |s: Vec<Sphere>| spheres::without_origin(&s, SET_TOL);
    let lhs = drop0(fredholm_s_spectrum(h, &sum)?.spheres);
    let rhs = drop0(spheres::union(
        &fredholm_s_spectrum(h, a)?.spheres,
        &fredholm_s_spectrum(h, b)?.spheres,
        SET_TOL,
    ));
    let fredholm = SetComparison::new(lhs, rhs, SET_TOL);
    let weyl = match weyl_s_spectrum(h, &sum) {
        Err(Error::Unsupported(_)) => None,
        res => {
            let lhs = drop0(res?.spheres);
            let rhs = drop0(spheres::union(
                &weyl_s_spectrum(h, a)?.spheres,
                &weyl_s_spectrum(h, b)?.spheres,
                SET_TOL,
            ));
            Some(SetComparison::new(lhs, rhs, SET_TOL))
        }
    };
    Ok(SumReport { fredholm, weyl })
}

/// `σ^Φ(a⁻¹)` against the image of `σ^Φ(a)` under `q ↦ q̄/|q|²`.
pub fn inverse_spectral_map<H>(h: &H, a: &H::Source) -> Result<SetComparison>
where
    H: Homomorphism,
    H::Target: ExactSpectrum,
{
    let inv = a.try_inverse()?;
    let lhs = fredholm_s_spectrum(h, &inv)?.spheres;
    let rhs = invert_all(&fredholm_s_spectrum(h, a)?.spheres)?;
    Ok(SetComparison::new(lhs, rhs, SET_TOL))
}

fn invert_all(s: &[Sphere]) -> Result<Vec<Sphere>> {
    let mut out = s.iter().map(|s| s.inverted()).collect::<Result<Vec<_>>>()?;
    spheres::sort(&mut out);
    Ok(out)
}

/// `σ^Φ(v₁v₂)` and `σ^Φ(v₂v₁)` compared after removing `ℍ_{p,0}`.
pub fn product_spectra_off_imaginaries<H>(
    h: &H,
    v1: &H::Source,
    v2: &H::Source,
) -> Result<SetComparison>
where
    H: Homomorphism,
    H::Target: ExactSpectrum,
{
    let ex = Excluded::Hp0;
    let lhs = fredholm_s_spectrum(h, &v1.times(v2))?.excluding(ex).spheres;
    let rhs = fredholm_s_spectrum(h, &v2.times(v1))?.excluding(ex).spheres;
    Ok(SetComparison::new(lhs, rhs, SET_TOL))
}

/// An invertible element `x + ε·1` with `ε ≤ 1e-6`, if one is found.
pub fn density_witness<E: AlgebraElement>(x: &E) -> Option<f64> {
    let unit = x.unit();
    [1e-6, 7e-7, 5e-7, 3e-7, 2e-7, 1e-7]
        .into_iter()
        .find(|&eps| {
            let y = x.plus(&unit.rscale(Quaternion::real(eps)));
            // well clear of the rounding floor
            y.invertibility(1e-13 * y.norm().max(1.0)).invertible
        })
}

/// Boundary S-spectrum of an element of a finite-dimensional algebra. Invertibles are
/// dense there, so it equals `σ_S(v)`; each sphere is certified by a nearby invertible.
pub fn boundary_s_spectrum<E: AlgebraElement + ExactSpectrum>(v: &E) -> Result<SpectrumReport> {
    let found = v.s_spectrum()?;
    for s in &found {
        let q = s.representative();
        if density_witness(&v.char_element(q)).is_none() {
            return Err(Error::Numeric(format!(
                "no invertible element within 1e-6 of R_q(v) at q = {q}"
            )));
        }
    }
    Ok(SpectrumReport::new(SpectrumKind::BoundaryS, found))
}

/// `B(v⁻¹)` against the image of `B(v)` under `q ↦ q̄/|q|²`.
pub fn inversion_of_boundary<E: AlgebraElement + ExactSpectrum>(v: &E) -> Result<SetComparison> {
    let inv = v.try_inverse()?;
    let lhs = boundary_s_spectrum(&inv)?.spheres;
    let rhs = invert_all(&boundary_s_spectrum(v)?.spheres)?;
    Ok(SetComparison::new(lhs, rhs, SET_TOL))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NullStep {
    pub q: Quaternion,
    /// `‖R_q(a) b_n‖`.
    pub left: f64,
    /// `‖b_n R_q(a)‖`.
    pub right: f64,
    /// `‖R_{q_n}(a) b_n‖ = 1/‖R_{q_n}(a)⁻¹‖`.
    pub shifted: f64,
    /// `‖R_{q_n}(a)⁻¹‖`.
    pub resolvent_norm: f64,
    pub bound: f64,
}

/// Approximate null sequence `b_n = R_{q_n}(a)⁻¹/‖R_{q_n}(a)⁻¹‖` for a boundary point `q`.
pub fn approx_null_sequence<E: AlgebraElement>(
    a: &E,
    q: Quaternion,
    qs: &[Quaternion],
) -> Result<Vec<NullStep>> {
    let tol = spectral_tol(a.norm());
    let rq = a.char_element(q);
    if rq.invertibility(tol).invertible {
        return Err(Error::Precondition(format!("{q} is not in the S-spectrum")));
    }
    qs.iter()
        .map(|&qn| {
            let rn = a.char_element(qn);
            let check = rn.invertibility(tol);
            if !check.invertible {
                return Err(Error::SpectralPoint {
                    q: qn,
                    sigma_min: check.sigma_min,
                });
            }
            let inv = rn.try_inverse()?;
            let resolvent_norm = inv.norm();
            let b = inv.rscale(Quaternion::real(1.0 / resolvent_norm));
            let bound = 1.0 / resolvent_norm
                + a.norm() * 2.0 * (qn - q).re().abs()
                + (q.norm_sqr() - qn.norm_sqr()).abs();
            Ok(NullStep {
                q: qn,
                left: rq.times(&b).norm(),
                right: b.times(&rq).norm(),
                shifted: rn.times(&b).norm(),
                resolvent_norm,
                bound,
            })
        })
        .collect()
}

/// `P A Pᵀ` for the permutation `perm`: entry `(i, j)` is `a[(perm[i], perm[j])]`.
pub fn permute(a: &QMatrix, perm: &[usize]) -> QMatrix {
    QMatrix::from_fn(a.n(), |i, j| a[(perm[i], perm[j])])
}

/// Random `a, b` with `ab = ba = 0`: both are conjugates, by one fixed pair `(X, Y)`,
/// of block-triangular elements living on complementary coordinate blocks.
pub fn annihilating_pair(rng: &mut impl Rng, k: usize) -> (BlockTriangular, BlockTriangular) {
    assert!(k >= 2, "need at least two coordinates to split");
    let split = rng.gen_range(1..k);
    let x = random::invertible_matrix(rng, k, 0.2);
    let y = random::invertible_matrix(rng, k, 0.2);
    let (xi, yi) = (
        x.inverse().expect("well conditioned"),
        y.inverse().expect("well conditioned"),
    );
    let mut part = |first: bool| {
        let keep = |i: usize| (i < split) == first;
        let mask = |m: QMatrix| {
            QMatrix::from_fn(k, |i, j| {
                if keep(i) && keep(j) {
                    m[(i, j)]
                } else {
                    Quaternion::ZERO
                }
            })
        };
        let d1 = mask(random::matrix(rng, k, 1.0));
        let u = mask(random::matrix(rng, k, 1.0));
        let d2 = mask(random::matrix(rng, k, 1.0));
        BlockTriangular {
            d1: &(&x * &d1) * &xi,
            u: &(&x * &u) * &yi,
            d2: &(&y * &d2) * &yi,
        }
    };
    let a = part(true);
    (a, part(false))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchReport {
    pub trials: usize,
    pub law_held: usize,
    pub law_failed: usize,
    pub errors: usize,
}

/// Probes the union law with only `ab ∈ ker 𝒜` (the product `ba` is left free).
/// Reports what it finds and asserts nothing.
pub fn sum_hypothesis_search(seed: u64, trials: usize, k: usize) -> SearchReport {
    let mut rng = random::seeded(seed);
    let h = BlockDiagonalHom;
    let mut report = SearchReport {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let x = random::invertible_matrix(&mut rng, k, 0.05);
        let y = random::invertible_matrix(&mut rng, k, 0.05);
        let z = random::matrix(&mut rng, k, 1.0);
        let mut left = vec![Quaternion::ZERO; k];
        let mut right = vec![Quaternion::ZERO; k];
        for i in 0..k {
            if i < k / 2 {
                left[i] = random::quaternion(&mut rng);
            } else {
                right[i] = random::quaternion(&mut rng);
            }
        }
        let Ok(y_inv) = y.inverse() else {
            report.errors += 1;
            continue;
        };
        // D₁E₁ = X·diag(left)·diag(right)·Z = 0 while E₁D₁ is generically nonzero
        let d1 = &(&x * &QMatrix::diag(&left)) * &y;
        let e1 = &(&y_inv * &QMatrix::diag(&right)) * &z;
        let a = BlockTriangular {
            d1,
            u: random::matrix(&mut rng, k, 1.0),
            d2: QMatrix::zeros(k),
        };
        let b = BlockTriangular {
            d1: e1,
            u: random::matrix(&mut rng, k, 1.0),
            d2: random::matrix(&mut rng, k, 1.0),
        };
        match sum_law(&h, &a, &b) {
            Ok(r) if r.pass() => report.law_held += 1,
            Ok(_) => report.law_failed += 1,
            Err(_) => report.errors += 1,
        }
    }
    report
}
