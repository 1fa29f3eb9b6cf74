//! Real quaternions, imaginary units, and the 2-spheres `[q]` that S-spectra are built from.
//!
//! Every quaternion `q` with non-zero imaginary part lies in exactly one slice
//! `C_I = R + R·I`, with `I = Im(q)/|Im(q)|`. Points sharing the pair
//! `(Re q, |Im q|)` form a sphere; all spectral sets in this crate are unions of
//! such spheres, so [`Sphere`] is the unit of reporting.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Absolute tolerance used when comparing spheres produced by eigen-solvers.
pub const SPHERE_TOL: f64 = 1e-9;

/// `q = w + x·i + y·j + z·k`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    /// `re + I·im` for an imaginary unit `I`.
    pub fn from_slice(re: f64, im: f64, axis: ImaginaryUnit) -> Self {
        Self::real(re) + axis.0 * im
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn re(self) -> f64 {
        self.w
    }

    pub fn im(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn im_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_zero(self) -> bool {
        self.norm_sqr() == 0.0
    }

    /// `q⁻¹ = q̄/|q|²`.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::Domain("inverse of the zero quaternion".into()));
        }
        Ok(self.conj() / n2)
    }

    /// `q^n` by repeated multiplication.
    pub fn powi(self, n: u32) -> Self {
        (0..n).fold(Self::ONE, |acc, _| acc * self)
    }

    /// Splits `q = re + axis·im_norm` with `im_norm ≥ 0`.
    ///
    /// Real quaternions get the axis `i`.
    pub fn slice_decompose(self) -> (f64, f64, ImaginaryUnit) {
        let r = self.im_norm();
        let axis = if r == 0.0 {
            ImaginaryUnit::I
        } else {
            ImaginaryUnit(self.im() / r)
        };
        (self.w, r, axis)
    }

    pub fn sphere(self) -> Sphere {
        Sphere::new(self.w, self.im_norm())
    }

    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        (self - other).norm() <= tol
    }

    /// Complex-pair form `q = z1 + z2·j` with `z1, z2 ∈ C_i`.
    pub fn to_complex_pair(self) -> (num_complex::Complex64, num_complex::Complex64) {
        (
            num_complex::Complex64::new(self.w, self.x),
            num_complex::Complex64::new(self.y, self.z),
        )
    }

    pub fn from_complex_pair(z1: num_complex::Complex64, z2: num_complex::Complex64) -> Self {
        Self::new(z1.re, z1.im, z2.re, z2.im)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Self::real(w)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.w, self.x, self.y, self.z)
    }
}

impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        <[f64; 4]>::deserialize(d).map(Self::from_array)
    }
}

/// A purely imaginary unit quaternion; squares to −1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImaginaryUnit(Quaternion);

impl ImaginaryUnit {
    pub const I: Self = Self(Quaternion::I);
    pub const J: Self = Self(Quaternion::J);
    pub const K: Self = Self(Quaternion::K);

    /// Normalises the imaginary part of `q`.
    pub fn new(q: Quaternion) -> Result<Self> {
        let r = q.im_norm();
        if r == 0.0 || !r.is_finite() {
            return Err(Error::Domain(format!("{q} has no imaginary direction")));
        }
        Ok(Self(q.im() / r))
    }

    pub fn get(self) -> Quaternion {
        self.0
    }
}

/// The sphere `[q] = { re + I·rad : I ∈ 𝕊 }`; `rad = 0` is a single real point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub re: f64,
    pub rad: f64,
}

impl Sphere {
    pub fn new(re: f64, rad: f64) -> Self {
        debug_assert!(rad >= 0.0, "sphere radius must be non-negative");
        Self { re, rad: rad.abs() }
    }

    pub const ORIGIN: Self = Self { re: 0.0, rad: 0.0 };

    /// The canonical member `re + i·rad`.
    pub fn representative(self) -> Quaternion {
        Quaternion::new(self.re, self.rad, 0.0, 0.0)
    }

    pub fn contains(self, q: Quaternion, tol: f64) -> bool {
        (q.re() - self.re).abs() <= tol && (q.im_norm() - self.rad).abs() <= tol
    }

    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        (self.re - other.re).abs() <= tol && (self.rad - other.rad).abs() <= tol
    }

    /// Max-coordinate distance in the `(re, rad)` half-plane.
    pub fn distance(self, other: Self) -> f64 {
        (self.re - other.re).abs().max((self.rad - other.rad).abs())
    }

    /// `|q|` for every member.
    pub fn modulus(self) -> f64 {
        self.re.hypot(self.rad)
    }

    pub fn is_origin(self, tol: f64) -> bool {
        self.modulus() <= tol
    }

    /// Membership in `ℍ_{p,0} = { q ≠ 0 : Re q = 0 }`.
    pub fn is_purely_imaginary(self, tol: f64) -> bool {
        self.re.abs() <= tol && self.rad > tol
    }

    /// Image of the sphere under `q ↦ q̄/|q|²`.
    pub fn inverted(self) -> Result<Self> {
        let m2 = self.re * self.re + self.rad * self.rad;
        if m2 == 0.0 {
            return Err(Error::Domain("the origin has no inverse sphere".into()));
        }
        Ok(Self::new(self.re / m2, self.rad / m2))
    }

    /// `count` members of the sphere; the first two are `re + i·rad` and `re − i·rad`,
    /// the rest are spread over 𝕊 on a Fibonacci lattice.
    pub fn sample(self, count: usize) -> Vec<Quaternion> {
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return out;
        }
        out.push(Quaternion::new(self.re, self.rad, 0.0, 0.0));
        if count > 1 {
            out.push(Quaternion::new(self.re, -self.rad, 0.0, 0.0));
        }
        let rest = count.saturating_sub(2);
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        for k in 0..rest {
            let t = (k as f64 + 0.5) / rest as f64;
            let cz = 1.0 - 2.0 * t;
            let s = (1.0 - cz * cz).max(0.0).sqrt();
            let phi = golden * k as f64;
            out.push(Quaternion::new(
                self.re,
                self.rad * s * phi.cos(),
                self.rad * s * phi.sin(),
                self.rad * cz,
            ));
        }
        out
    }
}

impl fmt::Display for Sphere {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} + 𝕊·{}]", self.re, self.rad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn unit_products() {
        use Quaternion as Q;
        assert_eq!(Q::I * Q::J, Q::K);
        assert_eq!(Q::J * Q::I, -Q::K);
        assert_eq!(Q::J * Q::K, Q::I);
        assert_eq!(Q::K * Q::I, Q::J);
        for u in [Q::I, Q::J, Q::K] {
            assert_eq!(u * u, -Q::ONE);
        }
        let p = q(0.5, -2.0, 3.0, 0.25);
        assert_eq!(Q::ONE * p, p);
        assert_eq!(q(1.0, 1.0, 0.0, 0.0) * q(1.0, -1.0, 0.0, 0.0), Q::real(2.0));
    }

    #[test]
    fn inverses() {
        assert_eq!(Quaternion::I.inverse().unwrap(), -Quaternion::I);
        assert_eq!(
            q(1.0, 1.0, 0.0, 0.0).inverse().unwrap(),
            q(0.5, -0.5, 0.0, 0.0)
        );
        assert_eq!(
            Quaternion::real(2.0).inverse().unwrap(),
            Quaternion::real(0.5)
        );
        assert!(matches!(Quaternion::ZERO.inverse(), Err(Error::Domain(_))));
    }

    #[test]
    fn slice_decomposition() {
        let (re, r, axis) = q(1.0, 2.0, 0.0, 0.0).slice_decompose();
        assert_eq!((re, r), (1.0, 2.0));
        assert_eq!(axis, ImaginaryUnit::I);

        let (re, r, axis) = Quaternion::real(3.0).slice_decompose();
        assert_eq!((re, r), (3.0, 0.0));
        assert_eq!(axis, ImaginaryUnit::I);

        let (re, r, axis) = q(0.0, 1.0, 1.0, 0.0).slice_decompose();
        assert_eq!(re, 0.0);
        assert_abs_diff_eq!(r, 2f64.sqrt(), epsilon = 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(axis.get().approx_eq(q(0.0, h, h, 0.0), 1e-15));
    }

    #[test]
    fn spheres_of_points() {
        assert_eq!(Quaternion::I.sphere(), Sphere::new(0.0, 1.0));
        assert_eq!(Quaternion::real(3.0).sphere(), Sphere::new(3.0, 0.0));
        assert_eq!(q(1.0, 0.0, 1.0, 0.0).sphere(), Sphere::new(1.0, 1.0));
    }

    #[test]
    fn sphere_samples() {
        assert_eq!(Sphere::new(0.0, 1.0).sample(1), vec![Quaternion::I]);
        assert!(Sphere::new(2.0, 0.0)
            .sample(5)
            .iter()
            .all(|&p| p == Quaternion::real(2.0)));
        let s = Sphere::new(0.0, 1.0);
        let pts = s.sample(3);
        assert_eq!(pts.len(), 3);
        for p in pts {
            assert!(s.contains(p, 1e-14));
            assert_abs_diff_eq!(p.re(), 0.0);
            assert_abs_diff_eq!(p.norm(), 1.0, epsilon = 1e-14);
        }
        let s = Sphere::new(-0.3, 2.5);
        assert!(s.sample(40).iter().all(|&p| s.contains(p, 1e-12)));
    }

    #[test]
    fn sphere_inversion() {
        assert_eq!(
            Sphere::new(2.0, 0.0).inverted().unwrap(),
            Sphere::new(0.5, 0.0)
        );
        assert_eq!(
            Sphere::new(0.0, 1.0).inverted().unwrap(),
            Sphere::new(0.0, 1.0)
        );
        assert!(Sphere::ORIGIN.inverted().is_err());
    }

    #[test]
    fn serde_shapes() {
        let s = serde_json::to_string(&q(1.0, 2.0, 3.0, 4.0)).unwrap();
        assert_eq!(s, "[1.0,2.0,3.0,4.0]");
        let s = serde_json::to_string(&Sphere::new(0.5, 1.0)).unwrap();
        assert_eq!(s, r#"{"re":0.5,"rad":1.0}"#);
        let back: Quaternion = serde_json::from_str("[0,1,0,0]").unwrap();
        assert_eq!(back, Quaternion::I);
    }

    fn arb_q() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-2.0f64..2.0).prop_map(Quaternion::from_array)
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_q(), b in arb_q(), c in arb_q()) {
            prop_assert!(((a * b) * c).approx_eq(a * (b * c), 1e-12));
            prop_assert!((a * (b + c)).approx_eq(a * b + a * c, 1e-12));
            prop_assert!(((a + b) * c).approx_eq(a * c + b * c, 1e-12));
        }

        #[test]
        fn conjugation_and_norm(a in arb_q(), b in arb_q()) {
            prop_assert!((a * b).conj().approx_eq(b.conj() * a.conj(), 1e-12));
            prop_assert!(((a * b).norm() - a.norm() * b.norm()).abs() <= 1e-12);
            let n = a.conj() * a;
            prop_assert!(n.approx_eq(Quaternion::real(a.norm_sqr()), 1e-12));
            if a.norm() > 1e-3 {
                let inv = a.inverse().unwrap();
                prop_assert!((a * inv).approx_eq(Quaternion::ONE, 1e-12));
                prop_assert!((inv * a).approx_eq(Quaternion::ONE, 1e-12));
            }
        }

        #[test]
        fn sphere_determines_char_data(a in arb_q(), k in 0usize..16) {
            // Every member of [a] has the same (2 Re, |·|²).
            let p = a.sphere().sample(16)[k];
            prop_assert!((2.0 * p.re() - 2.0 * a.re()).abs() <= 1e-12);
            prop_assert!((p.norm_sqr() - a.norm_sqr()).abs() <= 1e-12);
            // and every q satisfies q² − 2Re(q)q + |q|² = 0.
            let z = a * a - a * (2.0 * a.re()) + Quaternion::real(a.norm_sqr());
            prop_assert!(z.approx_eq(Quaternion::ZERO, 1e-12));
        }
    }
}
