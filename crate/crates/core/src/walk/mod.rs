//! Six-level discrete-time quantum walk.
//!
//! The coin space is spanned by `ζ1..ζ6 = |1↑⟩, |1↓⟩, |2↑⟩, |2↓⟩, |3↑⟩, |3↓⟩`;
//! each mass sector `j` gets its own rotation coin with angle `θ_j` and a
//! spin-dependent shift. At fixed momentum the shift is diagonal, so one step
//! of the walk on sector `j` is the 2x2 unitary
//!
//! ```text
//! W_j(k̃) = diag(e^{-ik̃}, e^{+ik̃}) · [[cos θ_j, sin θ_j], [-sin θ_j, cos θ_j]]
//! ```
//!
//! with eigenvalues `e^{∓iφ_j}`, `cos φ_j = cos θ_j cos k̃`.

mod encoding;
mod lattice;

pub use encoding::{encoded_walk, encoding_table, CoinBasisEncoding, Encoding};
pub use lattice::{lattice_step, plane_wave, LatticeSpec};

use std::fmt;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::numerics::ComplexMatrix;

/// Angles above this (in magnitude) leave the small-parameter regime where
/// the walk reproduces Dirac dynamics.
pub const DIRAC_REGIME_LIMIT: f64 = 0.3;

pub const COIN_DIM: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    /// Coin angle per mass sector, radians.
    pub theta: [f64; 3],
    /// Dimensionless momentum `k a / ħ`, radians.
    pub ktilde: f64,
    /// Time step in seconds; bookkeeping only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_seconds: Option<f64>,
    /// Lattice spacing in meters; bookkeeping only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_meters: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeWarning {
    pub quantity: String,
    pub value: f64,
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {} rad exceeds {} rad; outside the Dirac regime",
            self.quantity, self.value, DIRAC_REGIME_LIMIT
        )
    }
}

impl WalkParams {
    pub fn new(theta: [f64; 3], ktilde: f64) -> Result<Self> {
        let params = Self {
            theta,
            ktilde,
            dt_seconds: None,
            a_meters: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        finite("theta1", self.theta[0])?;
        finite("theta2", self.theta[1])?;
        finite("theta3", self.theta[2])?;
        finite("ktilde", self.ktilde)?;
        Ok(())
    }

    pub fn with_ktilde(&self, ktilde: f64) -> Self {
        Self { ktilde, ..*self }
    }

    pub fn regime_warnings(&self) -> Vec<RegimeWarning> {
        let mut out = Vec::new();
        for (j, &t) in self.theta.iter().enumerate() {
            if t.abs() > DIRAC_REGIME_LIMIT {
                out.push(RegimeWarning {
                    quantity: format!("theta{}", j + 1),
                    value: t,
                });
            }
        }
        if self.ktilde.abs() > DIRAC_REGIME_LIMIT {
            out.push(RegimeWarning {
                quantity: "ktilde".into(),
                value: self.ktilde,
            });
        }
        out
    }

    /// Per-step dispersion phases of the three sectors.
    pub fn phases(&self) -> [f64; 3] {
        self.theta.map(|t| dispersion_phase(t, self.ktilde))
    }
}

/// Rotation coin acting on `(|j↑⟩, |j↓⟩)`.
pub fn coin_block(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// Momentum-space eigenvalues of the shift: `(e^{-ik̃}, e^{+ik̃})` for the ↑ and ↓ components.
pub fn shift_phases(ktilde: f64) -> (Complex64, Complex64) {
    let up = Complex64::from_polar(1.0, -ktilde);
    (up, up.conj())
}

/// One walk step on a single sector at fixed momentum: shift after coin.
pub fn walk_block(theta: f64, ktilde: f64) -> Matrix2<Complex64> {
    let coin = coin_block(theta).map(|x| Complex64::new(x, 0.0));
    let (up, down) = shift_phases(ktilde);
    Matrix2::new(
        up * coin[(0, 0)],
        up * coin[(0, 1)],
        down * coin[(1, 0)],
        down * coin[(1, 1)],
    )
}

/// Block-diagonal 6x6 walk operator at the momentum in `params`.
pub fn six_level_walk(params: &WalkParams) -> ComplexMatrix {
    let mut w = ComplexMatrix::zeros(COIN_DIM, COIN_DIM);
    for (j, &theta) in params.theta.iter().enumerate() {
        let block = walk_block(theta, params.ktilde);
        w.fixed_view_mut::<2, 2>(2 * j, 2 * j).copy_from(&block);
    }
    w
}

/// Phase per step `φ = arccos(cos θ cos k̃) ∈ [0, π]` of the positive-energy mode.
///
/// Evaluated as `atan2(sin φ, cos φ)` with `sin²φ = sin²θ + cos²θ sin²k̃`, which
/// stays accurate where `arccos` loses digits near `φ = 0`.
pub fn dispersion_phase(theta: f64, ktilde: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let (sk, ck) = ktilde.sin_cos();
    let sin_phase = (s * s + c * c * sk * sk).sqrt();
    sin_phase.atan2(c * ck)
}

/// `φ(θ_j, k̃) - φ(θ_r, k̃)` without cancellation.
///
/// From `cos φ_r - cos φ_j = cos k̃ (cos θ_r - cos θ_j)`, both sides written
/// as products of sines:
///
/// ```text
/// sin((φ_j - φ_r)/2) = cos k̃ sin((θ_j + θ_r)/2) sin((θ_j - θ_r)/2) / sin((φ_j + φ_r)/2)
/// ```
///
/// This keeps full relative precision when the masses are tiny next to the
/// momentum, where the two phases agree to every printed digit.
pub fn phase_difference(theta_j: f64, theta_r: f64, ktilde: f64) -> f64 {
    let (pj, pr) = (dispersion_phase(theta_j, ktilde), dispersion_phase(theta_r, ktilde));
    let direct = pj - pr;
    let denominator = (0.5 * (pj + pr)).sin();
    if direct.abs() > 0.5 || denominator == 0.0 {
        return direct;
    }
    let numerator =
        ktilde.cos() * (0.5 * (theta_j + theta_r)).sin() * (0.5 * (theta_j - theta_r)).sin();
    2.0 * (numerator / denominator).asin()
}

/// Positive-energy eigenvector `(f, g)` of one sector, eigenvalue `e^{-iφ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassEigenmode {
    /// 1-based sector index.
    pub sector: usize,
    pub phase: f64,
    pub f: Complex64,
    pub g: Complex64,
}

impl MassEigenmode {
    pub fn spinor(&self) -> Vector2<Complex64> {
        Vector2::new(self.f, self.g)
    }

    /// Partner eigenvector with eigenvalue `e^{+iφ}`, orthogonal to `(f, g)`.
    pub fn partner(&self) -> Vector2<Complex64> {
        Vector2::new(-self.g.conj(), self.f.conj())
    }

    /// `⟨self|other⟩` over the two spin components.
    pub fn overlap(&self, other: &MassEigenmode) -> Complex64 {
        self.f.conj() * other.f + self.g.conj() * other.g
    }

    /// The spinor placed in its sector of the six-level coin space.
    pub fn embedded(&self) -> [Complex64; COIN_DIM] {
        let mut v = [Complex64::new(0.0, 0.0); COIN_DIM];
        v[2 * (self.sector - 1)] = self.f;
        v[2 * (self.sector - 1) + 1] = self.g;
        v
    }
}

/// Positive-energy eigenvector of `walk_block(theta, ktilde)`:
///
/// ```text
/// f = sin θ e^{-ik̃} / D,   g = i (cos θ sin k̃ - sin φ) / D,
/// D = sqrt(sin²θ + (cos θ sin k̃ - sin φ)²)
/// ```
///
/// When `D` vanishes with `sin φ > 0` (massless sector moving right) the mode is
/// the limit `(e^{-ik̃}, 0)`. At `sin φ = 0` both eigenvalues coincide and the
/// mode is undefined.
pub fn mass_eigenmode(sector: usize, theta: f64, ktilde: f64) -> Result<MassEigenmode> {
    if !(1..=3).contains(&sector) {
        return Err(Error::BadSector(sector));
    }
    finite("theta", theta)?;
    finite("ktilde", ktilde)?;

    let (s, c) = theta.sin_cos();
    let sk = ktilde.sin();
    let phase = dispersion_phase(theta, ktilde);
    // 1 - cos²θ cos²k̃ rewritten to keep precision when both angles are small.
    let sin_phase = (s * s + c * c * sk * sk).sqrt();
    if sin_phase == 0.0 {
        return Err(Error::DegenerateMode { theta, ktilde });
    }
    let csk = c * sk;
    let h = if csk >= 0.0 {
        -(s * s) / (csk + sin_phase)
    } else {
        csk - sin_phase
    };
    let norm = s.hypot(h);
    let (f, g) = if norm == 0.0 {
        (Complex64::from_polar(1.0, -ktilde), Complex64::new(0.0, 0.0))
    } else {
        (
            Complex64::from_polar(s / norm, -ktilde),
            Complex64::new(0.0, h / norm),
        )
    };
    Ok(MassEigenmode {
        sector,
        phase,
        f,
        g,
    })
}

/// The three sector eigenmodes at the momentum in `params`.
pub fn mass_eigenmodes(params: &WalkParams) -> Result<[MassEigenmode; 3]> {
    Ok([
        mass_eigenmode(1, params.theta[0], params.ktilde)?,
        mass_eigenmode(2, params.theta[1], params.ktilde)?,
        mass_eigenmode(3, params.theta[2], params.ktilde)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::unitarity_defect;
    use std::f64::consts::{FRAC_PI_2, PI};

    const FIG2_THETA: [f64; 3] = [0.001, 0.00615654, 0.0664688];

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coin_examples() {
        assert_eq!(coin_block(0.0), Matrix2::identity());
        let q = coin_block(FRAC_PI_2);
        assert!((q - Matrix2::new(0.0, 1.0, -1.0, 0.0)).abs().max() < 1e-16);
        let small = coin_block(0.001);
        // cos(0.001) = 0.99999950000004166667 (direct evaluation)
        assert!((small[(0, 0)] - 0.999_999_500_000_041_7).abs() < 1e-16);
        assert_eq!(small[(0, 1)], 0.001f64.sin());
        assert!((small[(0, 1)] - 0.001).abs() < 1e-9);
        assert_eq!(small[(1, 0)], -small[(0, 1)]);
        let gram = small.transpose() * small;
        assert!((gram - Matrix2::identity()).abs().max() < 1e-15);
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_phases(0.0), (c(1.0, 0.0), c(1.0, 0.0)));
        let (u, d) = shift_phases(PI);
        assert!((u - c(-1.0, 0.0)).norm() < 1e-15 && (d - c(-1.0, 0.0)).norm() < 1e-15);
        let (u, d) = shift_phases(0.01);
        assert!((u - c(0.01f64.cos(), -0.01f64.sin())).norm() < 1e-17);
        assert!((d - c(0.01f64.cos(), 0.01f64.sin())).norm() < 1e-17);
        assert!((u.norm() - 1.0).abs() < 1e-16);
    }

    #[test]
    fn walk_block_limits() {
        assert_eq!(walk_block(0.0, 0.0), Matrix2::identity());
        let k = 0.37;
        let w = walk_block(0.0, k);
        let (u, d) = shift_phases(k);
        assert_eq!(w, Matrix2::new(u, c(0.0, 0.0), c(0.0, 0.0), d));
    }

    #[test]
    fn walk_block_trace_and_eigenphase() {
        let (theta, k) = (0.001, 0.01);
        let w = walk_block(theta, k);
        let tr = w.trace();
        assert!((tr.re - 2.0 * theta.cos() * k.cos()).abs() < 1e-14);
        assert!(tr.im.abs() < 1e-14);
        // arccos(cos 0.001 cos 0.01) from 40-digit evaluation
        let phi = 0.010_049_873_962_714_27;
        assert!((dispersion_phase(theta, k) - phi).abs() < 1e-15);
        // eigenvalues e^{±iφ}: both satisfy λ² - tr λ + det = 0
        for sign in [1.0, -1.0] {
            let lambda = Complex64::from_polar(1.0, sign * phi);
            let char_poly = lambda * lambda - tr * lambda + w.determinant();
            assert!(char_poly.norm() < 1e-14);
        }
    }

    #[test]
    fn six_level_walk_examples() {
        let id = six_level_walk(&WalkParams::new([0.0; 3], 0.0).unwrap());
        assert_eq!(id, ComplexMatrix::identity(6, 6));

        let w = six_level_walk(&WalkParams::new(FIG2_THETA, 0.01).unwrap());
        assert!(unitarity_defect(&w).unwrap() <= 1e-14);
        for i in 0..6 {
            for j in 0..6 {
                if i / 2 != j / 2 {
                    assert_eq!(w[(i, j)], c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn phase_difference_keeps_digits() {
        // 60-digit references
        let d = phase_difference(0.00615654, 0.001, 0.01);
        assert!((d / 0.001_693_282_398_637_597_970_6 - 1.0).abs() < 1e-13);
        let d = phase_difference(0.0664688, 0.00615654, 0.01);
        assert!((d / 0.055_472_571_403_941_603_163 - 1.0).abs() < 1e-13);
        let k = 0.015_192_674_488_095_104;
        let d21 = phase_difference(1.315_685_610_669_036e-13, 0.0, k);
        let d31 = phase_difference(7.531_008_743_748_744e-13, 0.0, k);
        assert!((d21 / 5.696_480_371_544_612_276_7e-25 - 1.0).abs() < 1e-12);
        assert!((d31 / d21 - 32.764_387_510_733_971_6).abs() < 1e-10);
        assert_eq!(phase_difference(0.3, 0.3, 0.2), 0.0);
        assert_eq!(phase_difference(-0.3, 0.3, 0.2), 0.0);
        assert!((phase_difference(2.0, 0.1, 0.4) - (dispersion_phase(2.0, 0.4) - dispersion_phase(0.1, 0.4))).abs() < 1e-15);
    }

    #[test]
    fn dispersion_examples() {
        for k in [0.0, 0.2, -0.7, 2.5] {
            assert!((dispersion_phase(0.0, k) - f64::abs(k)).abs() < 1e-12);
        }
        for t in [0.0, 0.3, -1.1] {
            assert!((dispersion_phase(t, 0.0) - f64::abs(t)).abs() < 1e-12);
        }
        // 40-digit reference: 0.067215727765293470922
        assert!((dispersion_phase(0.0664688, 0.01) - 0.067_215_727_765_293_47).abs() < 1e-15);
    }

    fn residual(mode: &MassEigenmode, theta: f64, k: f64) -> f64 {
        let w = walk_block(theta, k);
        let v = mode.spinor();
        let lambda = Complex64::from_polar(1.0, -mode.phase);
        (w * v - v * lambda).norm()
    }

    #[test]
    fn eigenmode_at_fig2_point() {
        let m = mass_eigenmode(1, 0.001, 0.01).unwrap();
        assert!(residual(&m, 0.001, 0.01) <= 1e-12);
        assert!((m.f.norm_sqr() + m.g.norm_sqr() - 1.0).abs() < 1e-12);
        // f, g from a 40-digit evaluation of the closed form
        assert!((m.f - c(0.998_708_547_493_434_4, -0.009_987_418_391_100_162)).norm() < 1e-14);
        assert!((m.g - c(0.0, -0.049_814_542_429_250_38)).norm() < 1e-14);
    }

    #[test]
    fn eigenmode_at_rest() {
        let theta: f64 = 0.5;
        let m = mass_eigenmode(2, theta, 0.0).unwrap();
        // At k̃ = 0 the mode is (1, -i)/√2 for every θ in (0, π).
        assert!((m.f - c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((m.g - c(0.0, -std::f64::consts::FRAC_1_SQRT_2)).norm() < 1e-15);
        let w = walk_block(theta, 0.0);
        let lhs = w * m.spinor();
        let rhs = m.spinor() * Complex64::from_polar(1.0, -theta);
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn massless_mode_uses_limit() {
        let m = mass_eigenmode(1, 0.0, 0.2).unwrap();
        assert!((m.f - Complex64::from_polar(1.0, -0.2)).norm() < 1e-15);
        assert_eq!(m.g, c(0.0, 0.0));
        assert!(residual(&m, 0.0, 0.2) < 1e-15);
        let left = mass_eigenmode(1, 0.0, -0.2).unwrap();
        assert!(residual(&left, 0.0, -0.2) < 1e-15);
        let near = mass_eigenmode(1, 1e-9, 0.2).unwrap();
        assert!((near.spinor() - m.spinor()).norm() < 1e-8);
    }

    #[test]
    fn degenerate_point_is_an_error() {
        assert!(matches!(
            mass_eigenmode(1, 0.0, 0.0),
            Err(Error::DegenerateMode { .. })
        ));
        assert!(matches!(mass_eigenmode(4, 0.1, 0.1), Err(Error::BadSector(4))));
    }

    #[test]
    fn partner_is_orthogonal_eigenvector() {
        let (theta, k) = (0.3, -0.8);
        let m = mass_eigenmode(3, theta, k).unwrap();
        let p = m.partner();
        assert!((m.spinor().dotc(&p)).norm() < 1e-15);
        let w = walk_block(theta, k);
        let lambda = Complex64::from_polar(1.0, m.phase);
        assert!((w * p - p * lambda).norm() < 1e-14);
    }

    #[test]
    fn regime_warnings_flag_large_angles() {
        let p = WalkParams::new(FIG2_THETA, 0.01).unwrap();
        assert!(p.regime_warnings().is_empty());
        let p = WalkParams::new([0.001, 0.5, 0.0], -0.4).unwrap();
        let names: Vec<_> = p.regime_warnings().into_iter().map(|w| w.quantity).collect();
        assert_eq!(names, ["theta2", "ktilde"]);
        assert!(WalkParams::new([f64::INFINITY, 0.0, 0.0], 0.0).is_err());
    }
}
