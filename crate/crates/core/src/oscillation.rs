//! Flavor states on the six-level walk, their evolution, and the continuum
//! oscillation formula used as an independent cross-check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::pmns::{Flavor, PmnsMatrix};
use crate::walk::{
    dispersion_phase, mass_eigenmode, phase_difference, six_level_walk, walk_block, RegimeWarning, WalkParams,
    COIN_DIM,
};

pub mod constants {
    /// Reduced Planck constant, J·s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Speed of light, m/s.
    pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
    /// One electronvolt in joules.
    pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;
    /// Planck time, s.
    pub const PLANCK_TIME: f64 = 5.3912e-44;
    /// Planck length, m.
    pub const PLANCK_LENGTH: f64 = 1.6162e-35;
    /// `Δm² L c³ / (4 E ħ)` per eV²·km/GeV.
    pub const OSCILLATION_PHASE_FACTOR: f64 = 1.27;
}

/// Mass-state pairs `(j, r)` with `j > r`, zero-based: (2,1), (3,1), (3,2).
pub const MASS_PAIRS: [(usize, usize); 3] = [(1, 0), (2, 0), (2, 1)];

/// Mass-squared splittings (eV²), beam energy (GeV) and baseline (km).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub dm21_sq: f64,
    pub dm31_sq: f64,
    pub dm32_sq: f64,
    pub energy_gev: f64,
    pub baseline_km: f64,
}

impl PhysicalParams {
    /// Normal-ordering splittings from the global fit used in the literature
    /// examples, 1 GeV beam, zero baseline.
    pub fn normal_ordering() -> Self {
        Self {
            dm21_sq: 7.50e-5,
            dm31_sq: 2.457e-3,
            dm32_sq: 2.382e-3,
            energy_gev: 1.0,
            baseline_km: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        finite("dm21_sq", self.dm21_sq)?;
        finite("dm31_sq", self.dm31_sq)?;
        finite("dm32_sq", self.dm32_sq)?;
        finite("energy_gev", self.energy_gev)?;
        finite("baseline_km", self.baseline_km)?;
        let mismatch = self.dm31_sq - self.dm21_sq - self.dm32_sq;
        if mismatch.abs() > 1e-9 {
            return Err(Error::InvalidPhysical(format!(
                "dm31_sq must equal dm21_sq + dm32_sq, off by {mismatch:e} eV^2"
            )));
        }
        if self.energy_gev <= 0.0 {
            return Err(Error::InvalidPhysical(format!(
                "energy_gev must be positive, got {}",
                self.energy_gev
            )));
        }
        if self.baseline_km < 0.0 {
            return Err(Error::InvalidPhysical(format!(
                "baseline_km must be non-negative, got {}",
                self.baseline_km
            )));
        }
        Ok(())
    }

    /// Splittings in [`MASS_PAIRS`] order.
    pub fn splittings(&self) -> [f64; 3] {
        [self.dm21_sq, self.dm31_sq, self.dm32_sq]
    }
}

/// Six coin amplitudes at a single momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlavorState {
    pub amplitudes: [Complex64; COIN_DIM],
    pub ktilde: f64,
}

impl FlavorState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &FlavorState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// `|ν_α⟩ = Σ_j U*_{αj} |ν_j⟩` with `|ν_j⟩` the positive-energy mode of sector `j`.
pub fn prepare_flavor(alpha: Flavor, pmns: &PmnsMatrix, params: &WalkParams) -> Result<FlavorState> {
    let coefficients = pmns.flavor_coefficients(alpha);
    let mut amplitudes = [Complex64::new(0.0, 0.0); COIN_DIM];
    for (j, coefficient) in coefficients.iter().enumerate() {
        let mode = mass_eigenmode(j + 1, params.theta[j], params.ktilde)?;
        amplitudes[2 * j] = coefficient * mode.f;
        amplitudes[2 * j + 1] = coefficient * mode.g;
    }
    Ok(FlavorState {
        amplitudes,
        ktilde: params.ktilde,
    })
}

/// `W^steps |state⟩`, evaluated in each sector's eigenbasis.
///
/// The coin angles come from `params`; the momentum is the state's own.
pub fn evolve(state: &FlavorState, params: &WalkParams, steps: u64) -> FlavorState {
    let n = steps as f64;
    let mut amplitudes = state.amplitudes;
    for (j, &theta) in params.theta.iter().enumerate() {
        let (a, b) = (state.amplitudes[2 * j], state.amplitudes[2 * j + 1]);
        match mass_eigenmode(j + 1, theta, state.ktilde) {
            Ok(mode) => {
                let (plus, minus) = (mode.spinor(), mode.partner());
                let c_plus = plus[0].conj() * a + plus[1].conj() * b;
                let c_minus = minus[0].conj() * a + minus[1].conj() * b;
                let forward = Complex64::from_polar(1.0, -n * mode.phase);
                let p = c_plus * forward;
                let m = c_minus * forward.conj();
                amplitudes[2 * j] = p * plus[0] + m * minus[0];
                amplitudes[2 * j + 1] = p * plus[1] + m * minus[1];
            }
            Err(_) => {
                // sin φ = 0: the block is ±identity.
                let lambda = walk_block(theta, state.ktilde)[(0, 0)];
                let scale = lambda.powi(steps.min(i32::MAX as u64) as i32);
                amplitudes[2 * j] = a * scale;
                amplitudes[2 * j + 1] = b * scale;
            }
        }
    }
    FlavorState {
        amplitudes,
        ktilde: state.ktilde,
    }
}

/// `W^steps |state⟩` by repeated multiplication with the 6x6 walk matrix.
pub fn evolve_by_matrix_power(state: &FlavorState, params: &WalkParams, steps: u64) -> FlavorState {
    let w = six_level_walk(&params.with_ktilde(state.ktilde));
    let mut v = nalgebra::DVector::from_column_slice(&state.amplitudes);
    for _ in 0..steps {
        v = &w * v;
    }
    let mut amplitudes = [Complex64::new(0.0, 0.0); COIN_DIM];
    amplitudes.copy_from_slice(v.as_slice());
    FlavorState {
        amplitudes,
        ktilde: state.ktilde,
    }
}

/// `|Σ_j U*_{αj} U_{βj} e^{-i n φ_j}|²`
pub fn transition_probability(
    alpha: Flavor,
    beta: Flavor,
    pmns: &PmnsMatrix,
    params: &WalkParams,
    steps: u64,
) -> f64 {
    probability_from_phases(alpha, beta, pmns, &params.phases(), steps)
}

pub(crate) fn probability_from_phases(
    alpha: Flavor,
    beta: Flavor,
    pmns: &PmnsMatrix,
    phases: &[f64; 3],
    steps: u64,
) -> f64 {
    if steps == 0 {
        return if alpha == beta { 1.0 } else { 0.0 };
    }
    let n = steps as f64;
    let amplitude: Complex64 = (0..3)
        .map(|j| {
            pmns.element(alpha, j).conj()
                * pmns.element(beta, j)
                * Complex64::from_polar(1.0, -n * phases[j])
        })
        .sum();
    amplitude.norm_sqr()
}

/// The interference formula
///
/// ```text
/// P = δ_αβ - 4 Σ_{j>r} Re(X_jr) sin²(x_jr) + 2 Σ_{j>r} Im(X_jr) sin(2 x_jr),
/// X_jr = U*_{αj} U_{βj} U_{αr} U*_{βr}
/// ```
///
/// with `phase_args[p] = x_jr` for the pairs in [`MASS_PAIRS`].
pub fn oscillation_formula(
    alpha: Flavor,
    beta: Flavor,
    pmns: &PmnsMatrix,
    phase_args: &[f64; 3],
) -> f64 {
    let mut p = if alpha == beta { 1.0 } else { 0.0 };
    for (&(j, r), &x) in MASS_PAIRS.iter().zip(phase_args) {
        let quartic = pmns.element(alpha, j).conj()
            * pmns.element(beta, j)
            * pmns.element(alpha, r)
            * pmns.element(beta, r).conj();
        let s = x.sin();
        p += -4.0 * quartic.re * s * s + 2.0 * quartic.im * (2.0 * x).sin();
    }
    p
}

/// `1.27 Δm²[eV²] L[km] / E[GeV]`
pub fn phase_argument(dm_sq: f64, baseline_km: f64, energy_gev: f64) -> Result<f64> {
    if !(energy_gev > 0.0) {
        return Err(Error::InvalidPhysical(format!(
            "energy_gev must be positive, got {energy_gev}"
        )));
    }
    Ok(constants::OSCILLATION_PHASE_FACTOR * dm_sq * baseline_km / energy_gev)
}

/// Vacuum oscillation probability for a beam of energy `E` after baseline `L`.
pub fn continuum_probability(
    alpha: Flavor,
    beta: Flavor,
    pmns: &PmnsMatrix,
    phys: &PhysicalParams,
) -> Result<f64> {
    phys.validate()?;
    let mut args = [0.0; 3];
    for (arg, dm) in args.iter_mut().zip(phys.splittings()) {
        *arg = phase_argument(dm, phys.baseline_km, phys.energy_gev)?;
    }
    Ok(oscillation_formula(alpha, beta, pmns, &args))
}

/// Walk counterpart of the continuum phase arguments: `n (φ_j - φ_r) / 2`.
pub fn walk_phase_arguments(params: &WalkParams, steps: u64) -> [f64; 3] {
    let n = steps as f64;
    MASS_PAIRS.map(|(j, r)| {
        n * phase_difference(params.theta[j], params.theta[r], params.ktilde) / 2.0
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappedParams {
    pub walk: WalkParams,
    pub warnings: Vec<RegimeWarning>,
}

/// `θ_j = m_j c² δt / ħ`, `k̃ = k c δt / ħ`, with energies given in eV.
pub fn map_physical_to_walk(
    masses_ev: [f64; 3],
    momentum_ev: f64,
    dt_seconds: f64,
) -> Result<MappedParams> {
    if !(dt_seconds > 0.0) || !dt_seconds.is_finite() {
        return Err(Error::InvalidPhysical(format!(
            "dt_seconds must be positive, got {dt_seconds}"
        )));
    }
    for &m in &masses_ev {
        if !(m >= 0.0) || !m.is_finite() {
            return Err(Error::InvalidPhysical(format!(
                "rest masses must be non-negative, got {m}"
            )));
        }
    }
    finite("momentum_ev", momentum_ev)?;
    let to_angle = |energy_ev: f64| energy_ev * constants::ELECTRON_VOLT * dt_seconds / constants::HBAR;
    let walk = WalkParams {
        theta: masses_ev.map(to_angle),
        ktilde: to_angle(momentum_ev),
        dt_seconds: Some(dt_seconds),
        a_meters: Some(constants::SPEED_OF_LIGHT * dt_seconds),
    };
    let warnings = walk.regime_warnings();
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(MappedParams { walk, warnings })
}

/// Rest energies `m_j c² = θ_j ħ / δt` in eV implied by a walk.
pub fn implied_masses_ev(theta: &[f64; 3], dt_seconds: f64) -> [f64; 3] {
    theta.map(|t| t * constants::HBAR / dt_seconds / constants::ELECTRON_VOLT)
}

/// Chooses `θ2`, `θ3` so that a run of `steps` walk steps reproduces the
/// continuum phases at `phys.baseline_km`:
/// `steps (φ_j - φ_1) / 2 = 1.27 Δm²_j1 L / E` for `j = 2, 3`.
///
/// `θ1` and `k̃` are inputs; the equations are solved by bisection on the
/// exact dispersion relation.
pub fn match_splittings(
    phys: &PhysicalParams,
    theta1: f64,
    ktilde: f64,
    steps: u64,
) -> Result<WalkParams> {
    phys.validate()?;
    finite("theta1", theta1)?;
    finite("ktilde", ktilde)?;
    if steps == 0 {
        return Err(Error::InvalidPhysical(
            "matching splittings needs a positive step count".into(),
        ));
    }
    if !(phys.baseline_km > 0.0) {
        return Err(Error::InvalidPhysical(
            "matching splittings needs a positive baseline_km".into(),
        ));
    }
    let phi1 = dispersion_phase(theta1, ktilde);
    let solve = |dm_sq: f64| -> Result<f64> {
        let target = phi1 + 2.0 * phase_argument(dm_sq, phys.baseline_km, phys.energy_gev)? / steps as f64;
        bisect_theta(target, theta1.abs(), ktilde)
    };
    let theta2 = solve(phys.dm21_sq)?;
    let theta3 = solve(phys.dm31_sq)?;
    WalkParams::new([theta1, theta2, theta3], ktilde)
}

/// Smallest `θ ≥ lower` with `dispersion_phase(θ, k̃) = target`.
fn bisect_theta(target: f64, lower: f64, ktilde: f64) -> Result<f64> {
    let upper = std::f64::consts::FRAC_PI_2;
    let phase = |t: f64| dispersion_phase(t, ktilde);
    if target < phase(lower) || target > phase(upper) {
        return Err(Error::InvalidPhysical(format!(
            "no coin angle in [{lower}, pi/2] gives step phase {target}"
        )));
    }
    let (mut lo, mut hi) = (lower, upper);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phase(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepFrequencies {
    pub phases: [f64; 3],
    /// `(φ3 - φ1) / (φ2 - φ1)`
    pub ratio: f64,
}

pub fn step_frequencies(params: &WalkParams) -> Result<StepFrequencies> {
    let [t1, t2, t3] = params.theta;
    let slow = phase_difference(t2, t1, params.ktilde);
    if slow == 0.0 {
        return Err(Error::DegenerateFrequencies(slow));
    }
    Ok(StepFrequencies {
        phases: params.phases(),
        ratio: phase_difference(t3, t1, params.ktilde) / slow,
    })
}
