use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Label, ProjectiveBasis, PureState, ALGEBRAIC_TOL};
use crate::error::{Error, Result};

/// A Bloch direction `n`, standing for the single-qubit observable `n·σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Direction(Vector3<f64>);

impl Direction {
    /// Normalizes `v`; rejects zero and non-finite vectors.
    pub fn new(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::InvalidParameter(format!(
                "direction {v:?} cannot be normalized"
            )));
        }
        Ok(Self(v / norm))
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vector3::new(x, y, z))
    }

    /// Polar angle `theta` from +z, azimuth `phi` from +x, both in radians.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        Self(Vector3::new(
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ))
    }

    pub fn x() -> Self {
        Self(Vector3::x())
    }

    pub fn y() -> Self {
        Self(Vector3::y())
    }

    pub fn z() -> Self {
        Self(Vector3::z())
    }

    pub fn vector(&self) -> Vector3<f64> {
        self.0
    }

    /// `(theta, phi)` in radians.
    pub fn spherical(&self) -> (f64, f64) {
        let v = self.0;
        (v.z.clamp(-1.0, 1.0).acos(), v.y.atan2(v.x))
    }

    /// The 2×2 matrix `n·σ`.
    pub fn sigma(&self) -> Matrix2<Complex64> {
        let [x, y, z] = [self.0.x, self.0.y, self.0.z];
        Matrix2::new(
            Complex64::new(z, 0.0),
            Complex64::new(x, -y),
            Complex64::new(x, y),
            Complex64::new(-z, 0.0),
        )
    }

    /// Eigenbasis of `n·σ` on `label`; outcome 0 is the +1 eigenvalue, outcome 1 is −1.
    pub fn eigenbasis(&self, label: Label) -> ProjectiveBasis {
        let (theta, phi) = self.spherical();
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let phase = Complex64::from_polar(1.0, phi);
        let plus = vec![Complex64::new(c, 0.0), phase * s];
        let minus = vec![Complex64::new(s, 0.0), -phase * c];
        ProjectiveBasis::new(
            vec![label],
            vec![
                PureState::new(vec![label], plus).expect("unit eigenvector"),
                PureState::new(vec![label], minus).expect("unit eigenvector"),
            ],
        )
        .expect("eigenvectors of a Hermitian 2x2 matrix are orthonormal")
    }

    /// Short tag used in event logs: axis name when axis-aligned, else `theta:phi` in degrees.
    pub fn tag(&self) -> String {
        for (name, axis) in [
            ("x", Vector3::x()),
            ("y", Vector3::y()),
            ("z", Vector3::z()),
        ] {
            if (self.0 - axis).norm() < ALGEBRAIC_TOL {
                return name.to_string();
            }
            if (self.0 + axis).norm() < ALGEBRAIC_TOL {
                return format!("-{name}");
            }
        }
        let (theta, phi) = self.spherical();
        format!("{:.6}:{:.6}", theta.to_degrees(), phi.to_degrees())
    }
}

impl std::ops::Neg for Direction {
    type Output = Direction;

    fn neg(self) -> Direction {
        Direction(-self.0)
    }
}

impl TryFrom<[f64; 3]> for Direction {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        let d = Self::new(Vector3::from(v))?;
        if (Vector3::from(v).norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "direction {v:?} is not a unit vector"
            )));
        }
        Ok(d)
    }
}

impl From<Direction> for [f64; 3] {
    fn from(d: Direction) -> Self {
        [d.0.x, d.0.y, d.0.z]
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// Accepts `x`, `y`, `z` (optionally negated with `-`) or `theta,phi` in degrees.
impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("cannot parse direction {s:?}"));
        let (negate, body) = match s.strip_prefix('-') {
            Some(rest) if matches!(rest, "x" | "y" | "z") => (true, rest),
            _ => (false, s),
        };
        let axis = match body {
            "x" => Some(Self::x()),
            "y" => Some(Self::y()),
            "z" => Some(Self::z()),
            _ => None,
        };
        if let Some(d) = axis {
            return Ok(if negate { -d } else { d });
        }
        let sep = if body.contains(',') { ',' } else { ':' };
        let mut parts = body.split(sep);
        let (Some(t), Some(p), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad());
        };
        let theta: f64 = t.trim().parse().map_err(|_| bad())?;
        let phi: f64 = p.trim().parse().map_err(|_| bad())?;
        if !theta.is_finite() || !phi.is_finite() {
            return Err(bad());
        }
        Ok(Self::from_spherical(theta.to_radians(), phi.to_radians()))
    }
}
