//! Rectangular grids over the `(Re q, |Im q|)` half-plane.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{Quaternion, Sphere};

/// Covers `[u0, u1] × [0, r1]` with spacing `step` in both directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub u0: f64,
    pub u1: f64,
    pub r1: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(u0: f64, u1: f64, r1: f64, step: f64) -> Result<Self> {
        let g = Self { u0, u1, r1, step };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.u0, self.u1, self.r1, self.step]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.step <= 0.0 || self.u1 < self.u0 || self.r1 < 0.0 {
            return Err(Error::Input(format!(
                "grid needs u0 <= u1, r1 >= 0, step > 0; got {self:?}"
            )));
        }
        Ok(())
    }

    fn count(lo: f64, hi: f64, step: f64) -> usize {
        ((hi - lo) / step + 1e-9).floor() as usize + 1
    }

    pub fn u_values(&self) -> Vec<f64> {
        (0..Self::count(self.u0, self.u1, self.step))
            .map(|k| self.u0 + k as f64 * self.step)
            .collect()
    }

    pub fn r_values(&self) -> Vec<f64> {
        (0..Self::count(0.0, self.r1, self.step))
            .map(|k| k as f64 * self.step)
            .collect()
    }

    /// Grid spheres in row-major order: `u` outer, `r` inner.
    pub fn spheres(&self) -> Vec<Sphere> {
        let rs = self.r_values();
        self.u_values()
            .into_iter()
            .flat_map(|u| rs.iter().map(move |&r| Sphere::new(u, r)))
            .collect()
    }

    /// `u + i·r` for every grid sphere.
    pub fn points(&self) -> Vec<Quaternion> {
        self.spheres()
            .into_iter()
            .map(Sphere::representative)
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// Parses `u0,u1,r1,step`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Input(format!("grid `{s}`: {e}")))?;
        match parts.as_slice() {
            &[u0, u1, r1, step] => Self::new(u0, u1, r1, step),
            _ => Err(Error::Input(format!("grid `{s}` must be u0,u1,r1,step"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_enumerate() {
        let g: GridSpec = "-1,1,1,0.5".parse().unwrap();
        assert_eq!(g.u_values(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(g.r_values(), vec![0.0, 0.5, 1.0]);
        assert_eq!(g.spheres().len(), 15);
        assert_eq!(g.spheres()[1], Sphere::new(-1.0, 0.5));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!("0,1,1,0".parse::<GridSpec>().is_err());
        assert!("1,0,1,0.1".parse::<GridSpec>().is_err());
        assert!("0,1,1".parse::<GridSpec>().is_err());
        assert!("a,1,1,1".parse::<GridSpec>().is_err());
    }
}
