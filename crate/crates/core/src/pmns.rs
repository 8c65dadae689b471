//! Lepton mixing matrix built from three mixing angles, the Dirac phase and
//! two Majorana phases.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::numerics::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flavor {
    #[serde(rename = "e")]
    Electron,
    #[serde(rename = "mu")]
    Muon,
    #[serde(rename = "tau")]
    Tau,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::Electron, Flavor::Muon, Flavor::Tau];

    pub fn index(self) -> usize {
        match self {
            Flavor::Electron => 0,
            Flavor::Muon => 1,
            Flavor::Tau => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Flavor::Electron => "e",
            Flavor::Muon => "mu",
            Flavor::Tau => "tau",
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "e" | "electron" | "nu_e" => Ok(Flavor::Electron),
            "mu" | "μ" | "muon" | "nu_mu" => Ok(Flavor::Muon),
            "tau" | "τ" | "nu_tau" => Ok(Flavor::Tau),
            other => Err(Error::UnknownFlavor(other.to_string())),
        }
    }
}

/// Mixing angles and CP phases, all in radians.
///
/// The default values are global-fit style numbers chosen so the simulator
/// runs out of the box; they are meant to be replaced by whatever fit the
/// user wants to study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingParams {
    pub theta12: f64,
    pub theta13: f64,
    pub theta23: f64,
    pub delta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl Default for MixingParams {
    fn default() -> Self {
        Self {
            theta12: 0.5836,
            theta13: 0.1485,
            theta23: 0.7954,
            delta: 0.0,
            alpha1: 0.0,
            alpha2: 0.0,
        }
    }
}

impl MixingParams {
    pub fn zero() -> Self {
        Self {
            theta12: 0.0,
            theta13: 0.0,
            theta23: 0.0,
            delta: 0.0,
            alpha1: 0.0,
            alpha2: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        finite("theta12", self.theta12)?;
        finite("theta13", self.theta13)?;
        finite("theta23", self.theta23)?;
        finite("delta", self.delta)?;
        finite("alpha1", self.alpha1)?;
        finite("alpha2", self.alpha2)?;
        Ok(())
    }
}

/// Unitary 3x3 mixing matrix, rows indexed by flavor and columns by mass state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmnsMatrix {
    u: Matrix3<Complex64>,
}

impl PmnsMatrix {
    pub fn identity() -> Self {
        Self {
            u: Matrix3::identity(),
        }
    }

    /// Wraps an arbitrary matrix without checking unitarity.
    pub fn from_matrix_unchecked(u: Matrix3<Complex64>) -> Self {
        Self { u }
    }

    pub fn matrix(&self) -> &Matrix3<Complex64> {
        &self.u
    }

    pub fn to_dynamic(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(3, 3, |i, j| self.u[(i, j)])
    }

    /// `U_{αj}` with `j` a zero-based mass index.
    pub fn element(&self, alpha: Flavor, j: usize) -> Complex64 {
        self.u[(alpha.index(), j)]
    }

    /// Coefficients of `|ν_α⟩` on the mass basis: `(U*_{α1}, U*_{α2}, U*_{α3})`.
    pub fn flavor_coefficients(&self, alpha: Flavor) -> [Complex64; 3] {
        let row = alpha.index();
        [
            self.u[(row, 0)].conj(),
            self.u[(row, 1)].conj(),
            self.u[(row, 2)].conj(),
        ]
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.u.iter().all(|z| z.im.abs() <= tol)
    }
}

/// `U = R23 · R13(δ) · R12 · diag(e^{iα1/2}, e^{iα2/2}, 1)`
pub fn build_pmns(params: &MixingParams) -> Result<PmnsMatrix> {
    params.validate()?;
    let re = |x: f64| Complex64::new(x, 0.0);
    let zero = re(0.0);
    let one = re(1.0);
    let (s12, c12) = params.theta12.sin_cos();
    let (s13, c13) = params.theta13.sin_cos();
    let (s23, c23) = params.theta23.sin_cos();
    let dirac = Complex64::from_polar(1.0, params.delta);

    #[rustfmt::skip]
    let r23 = Matrix3::new(
        one,  zero,      zero,
        zero, re(c23),   re(s23),
        zero, re(-s23),  re(c23),
    );
    #[rustfmt::skip]
    let r13 = Matrix3::new(
        re(c13),             zero, dirac.conj() * s13,
        zero,                one,  zero,
        -(dirac * s13),      zero, re(c13),
    );
    #[rustfmt::skip]
    let r12 = Matrix3::new(
        re(c12),  re(s12), zero,
        re(-s12), re(c12), zero,
        zero,     zero,    one,
    );
    let majorana = Matrix3::from_diagonal(&nalgebra::Vector3::new(
        Complex64::from_polar(1.0, params.alpha1 / 2.0),
        Complex64::from_polar(1.0, params.alpha2 / 2.0),
        one,
    ));

    Ok(PmnsMatrix {
        u: r23 * r13 * r12 * majorana,
    })
}

pub fn flavor_coefficients(pmns: &PmnsMatrix, alpha: Flavor) -> [Complex64; 3] {
    pmns.flavor_coefficients(alpha)
}
