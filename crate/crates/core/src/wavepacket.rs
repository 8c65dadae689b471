//! Gaussian superpositions of momentum modes: the coin state left after
//! tracing out position, wavepacket-averaged oscillation probabilities, and
//! the flavor-resolved density over the momentum grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::numerics::{
    entropy_of_eigenvalues, hermitian_eigensystem, hermitian_part, hermiticity_defect,
    von_neumann_entropy, ComplexMatrix, PSD_TOL,
};
use crate::oscillation::transition_probability;
use crate::pmns::{Flavor, PmnsMatrix};
use crate::walk::{mass_eigenmode, MassEigenmode, WalkParams, COIN_DIM};

/// Momentum window `[k̃0 - ε, k̃0 + ε]` sampled every `spacing`, weighted by
/// `e^{-ξ (k̃ - k̃0)²}`. `epsilon = 0` is a single momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavepacketSpec {
    pub ktilde0: f64,
    pub epsilon: f64,
    pub xi: f64,
    pub spacing: f64,
}

impl Default for WavepacketSpec {
    fn default() -> Self {
        Self {
            ktilde0: 0.01,
            epsilon: 0.02,
            xi: 100.0,
            spacing: 0.001,
        }
    }
}

impl WavepacketSpec {
    pub fn delta(ktilde0: f64) -> Self {
        Self {
            ktilde0,
            epsilon: 0.0,
            ..Self::default()
        }
    }

    pub fn is_delta(&self) -> bool {
        self.epsilon == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        finite("ktilde0", self.ktilde0)?;
        finite("epsilon", self.epsilon)?;
        finite("xi", self.xi)?;
        finite("spacing", self.spacing)?;
        if self.xi < 0.0 {
            return Err(Error::InvalidWavepacket(format!(
                "xi must be non-negative, got {}",
                self.xi
            )));
        }
        if self.is_delta() {
            return Ok(());
        }
        if self.epsilon < 0.0 {
            return Err(Error::InvalidWavepacket(format!(
                "epsilon must be positive (or 0 for a single momentum), got {}",
                self.epsilon
            )));
        }
        if !(self.spacing > 0.0) {
            return Err(Error::InvalidWavepacket(format!(
                "spacing must be positive, got {}",
                self.spacing
            )));
        }
        if self.epsilon < self.spacing {
            return Err(Error::InvalidWavepacket(format!(
                "epsilon {} is smaller than spacing {}",
                self.epsilon, self.spacing
            )));
        }
        Ok(())
    }

    /// Number of grid points, `floor(2ε / spacing) + 1`.
    pub fn len(&self) -> usize {
        if self.is_delta() {
            1
        } else {
            (2.0 * self.epsilon / self.spacing + 1e-9).floor() as usize + 1
        }
    }

    /// Offsets `k̃ - k̃0` in ascending order. When the window is an exact
    /// multiple of the spacing the offsets are built from the centre out, so
    /// that `+δ` and `-δ` are exact negatives of each other.
    pub fn offsets(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let m = self.len();
        if m == 1 {
            return Ok(vec![0.0]);
        }
        let span = (m - 1) as f64 * self.spacing;
        let centered = (span - 2.0 * self.epsilon).abs() <= 1e-9 * self.epsilon;
        let mid = (m - 1) as f64 / 2.0;
        Ok((0..m)
            .map(|i| {
                if centered {
                    (i as f64 - mid) * self.spacing
                } else {
                    -self.epsilon + i as f64 * self.spacing
                }
            })
            .collect())
    }

    /// Grid momenta `k̃0 + offset`.
    pub fn grid(&self) -> Result<Vec<f64>> {
        Ok(self
            .offsets()?
            .into_iter()
            .map(|d| self.ktilde0 + d)
            .collect())
    }
}

/// `p(k) = e^{-ξ(k̃-k̃0)²/2} / √(Σ e^{-ξ(k̃-k̃0)²})`
pub fn gaussian_amplitudes(spec: &WavepacketSpec) -> Result<Vec<f64>> {
    let offsets = spec.offsets()?;
    if offsets.is_empty() {
        return Err(Error::InvalidWavepacket("momentum grid is empty".into()));
    }
    let half: Vec<f64> = offsets
        .iter()
        .map(|d| (-0.5 * spec.xi * d * d).exp())
        .collect();
    let total: f64 = half.iter().map(|h| h * h).sum();
    if !(total > 0.0) {
        return Err(Error::InvalidWavepacket(
            "Gaussian weights underflow on this grid".into(),
        ));
    }
    let norm = total.sqrt();
    Ok(half.into_iter().map(|h| h / norm).collect())
}

/// Reduced 6x6 coin state.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinDensity {
    pub rho: ComplexMatrix,
}

/// Flavor-resolved density over the momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FlavorMomentumDensity {
    /// `(ρ + ρ†) / 2`, divided by its trace.
    pub rho: ComplexMatrix,
    /// Trace before normalization.
    pub raw_trace: f64,
    /// `max |ρ - ρ†|` before Hermitization.
    pub raw_hermiticity_defect: f64,
}

/// Mass eigenmodes and weights of a flavor wavepacket, computed once and
/// reused for every step count.
#[derive(Debug, Clone)]
pub struct PacketEvolution {
    grid: Vec<f64>,
    amplitudes: Vec<f64>,
    modes: Vec<[MassEigenmode; 3]>,
    coefficients: [Complex64; 3],
}

impl PacketEvolution {
    /// `walk.ktilde` is ignored; every grid momentum gets its own modes.
    pub fn new(
        spec: &WavepacketSpec,
        pmns: &PmnsMatrix,
        walk: &WalkParams,
        source: Flavor,
    ) -> Result<Self> {
        walk.validate()?;
        let grid = spec.grid()?;
        let amplitudes = gaussian_amplitudes(spec)?;
        let modes = grid
            .iter()
            .map(|&k| sector_modes(&walk.theta, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            amplitudes,
            modes,
            coefficients: pmns.flavor_coefficients(source),
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// `W_k^n |ν_α^k⟩ = Σ_j U*_{αj} e^{-inφ_j(k)} |ν_j^k⟩`
    pub fn coin_state(&self, index: usize, steps: u64) -> [Complex64; COIN_DIM] {
        let n = steps as f64;
        let mut out = [Complex64::new(0.0, 0.0); COIN_DIM];
        for (j, mode) in self.modes[index].iter().enumerate() {
            let c = self.coefficients[j] * Complex64::from_polar(1.0, -n * mode.phase);
            out[2 * j] = c * mode.f;
            out[2 * j + 1] = c * mode.g;
        }
        out
    }

    /// `ρ_c(n) = Σ_k |p(k)|² W_k^n |ν_α^k⟩⟨ν_α^k| (W_k^n)†`
    pub fn coin_density(&self, steps: u64) -> CoinDensity {
        let mut rho = ComplexMatrix::zeros(COIN_DIM, COIN_DIM);
        for (index, &p) in self.amplitudes.iter().enumerate() {
            let w = p * p;
            let psi = self.coin_state(index, steps);
            for a in 0..COIN_DIM {
                for b in 0..COIN_DIM {
                    rho[(a, b)] += psi[a] * psi[b].conj() * w;
                }
            }
        }
        CoinDensity { rho }
    }
}

fn sector_modes(theta: &[f64; 3], ktilde: f64) -> Result<[MassEigenmode; 3]> {
    Ok([
        mass_eigenmode(1, theta[0], ktilde)?,
        mass_eigenmode(2, theta[1], ktilde)?,
        mass_eigenmode(3, theta[2], ktilde)?,
    ])
}

pub fn reduced_coin_density(
    spec: &WavepacketSpec,
    pmns: &PmnsMatrix,
    walk: &WalkParams,
    alpha: Flavor,
    steps: u64,
) -> Result<CoinDensity> {
    Ok(PacketEvolution::new(spec, pmns, walk, alpha)?.coin_density(steps))
}

/// Entanglement between coin and position, in nats.
pub fn spin_space_entropy(rho: &CoinDensity) -> Result<f64> {
    von_neumann_entropy(&rho.rho)
}

/// `Σ_k |p(k)|² P_n(α → β; k̃)`
pub fn wavepacket_probability(
    spec: &WavepacketSpec,
    pmns: &PmnsMatrix,
    walk: &WalkParams,
    alpha: Flavor,
    beta: Flavor,
    steps: u64,
) -> Result<f64> {
    let grid = spec.grid()?;
    let amplitudes = gaussian_amplitudes(spec)?;
    Ok(grid
        .iter()
        .zip(&amplitudes)
        .map(|(&k, &p)| {
            p * p * transition_probability(alpha, beta, pmns, &walk.with_ktilde(k), steps)
        })
        .sum())
}

/// Precomputed pieces of the flavor-resolved momentum density.
///
/// ```text
/// ρ_α[k', k''] = p(k') p(k'') Σ_{m,n} U*_{sn} U_{sm} U*_{αm} U_{αn}
///                A_mn[k', k''] e^{-i N (φ_n(k') - φ_m(k''))}
/// A_mn[k', k''] = Σ_k |p(k)|² ⟨ν_m^{k''}|ν_m^k⟩ ⟨ν_n^k|ν_n^{k'}⟩
/// ```
///
/// with `s` the source flavor and `N` the step count. `A` does not depend on
/// `N`, so each step costs `O(9 M²)`.
#[derive(Debug, Clone)]
pub struct CorrelationEvolution {
    amplitudes: Vec<f64>,
    /// `phases[k][j] = φ_j(k̃)`
    phases: Vec<[f64; 3]>,
    /// `kernel[m][n] = A_mn`
    kernel: [[ComplexMatrix; 3]; 3],
    pmns: PmnsMatrix,
    source: Flavor,
}

impl CorrelationEvolution {
    pub fn new(
        spec: &WavepacketSpec,
        pmns: &PmnsMatrix,
        walk: &WalkParams,
        source: Flavor,
    ) -> Result<Self> {
        walk.validate()?;
        let grid = spec.grid()?;
        let amplitudes = gaussian_amplitudes(spec)?;
        let modes = grid
            .iter()
            .map(|&k| sector_modes(&walk.theta, k))
            .collect::<Result<Vec<_>>>()?;
        let m = grid.len();

        // overlap[j][(a, b)] = ⟨ν_j^a|ν_j^b⟩
        let overlap: [ComplexMatrix; 3] = std::array::from_fn(|j| {
            ComplexMatrix::from_fn(m, m, |a, b| modes[a][j].overlap(&modes[b][j]))
        });
        let kernel = std::array::from_fn(|mi| {
            std::array::from_fn(|ni| {
                ComplexMatrix::from_fn(m, m, |kp, kpp| {
                    (0..m)
                        .map(|k| {
                            overlap[mi][(kpp, k)]
                                * overlap[ni][(k, kp)]
                                * (amplitudes[k] * amplitudes[k])
                        })
                        .sum()
                })
            })
        });
        Ok(Self {
            amplitudes,
            phases: modes.iter().map(|ms| ms.map(|mode| mode.phase)).collect(),
            kernel,
            pmns: *pmns,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    /// The un-normalized density exactly as the sum above defines it.
    pub fn raw_density(&self, alpha: Flavor, steps: u64) -> ComplexMatrix {
        let m = self.len();
        let n = steps as f64;
        let u = |f: Flavor, j: usize| self.pmns.element(f, j);
        let (s, a) = (self.source, alpha);
        let weight: [[Complex64; 3]; 3] = std::array::from_fn(|mi| {
            std::array::from_fn(|ni| {
                u(s, ni).conj() * u(s, mi) * u(a, mi).conj() * u(a, ni)
            })
        });
        // rotor[k][j] = e^{-i N φ_j(k)}
        let rotor: Vec<[Complex64; 3]> = self
            .phases
            .iter()
            .map(|ph| ph.map(|p| Complex64::from_polar(1.0, -n * p)))
            .collect();

        ComplexMatrix::from_fn(m, m, |kp, kpp| {
            let mut acc = Complex64::new(0.0, 0.0);
            for mi in 0..3 {
                for ni in 0..3 {
                    acc += weight[mi][ni]
                        * self.kernel[mi][ni][(kp, kpp)]
                        * rotor[kp][ni]
                        * rotor[kpp][mi].conj();
                }
            }
            acc * (self.amplitudes[kp] * self.amplitudes[kpp])
        })
    }

    pub fn density(&self, alpha: Flavor, steps: u64) -> Result<FlavorMomentumDensity> {
        let raw = self.raw_density(alpha, steps);
        let (defect, _, _) = hermiticity_defect(&raw)?;
        let hermitian = hermitian_part(&raw);
        let raw_trace = hermitian.trace().re;
        if !(raw_trace > 0.0) {
            return Err(Error::TraceDeviation { trace: raw_trace });
        }
        Ok(FlavorMomentumDensity {
            rho: hermitian.unscale(raw_trace),
            raw_trace,
            raw_hermiticity_defect: defect,
        })
    }
}

pub fn flavor_position_density(
    spec: &WavepacketSpec,
    pmns: &PmnsMatrix,
    walk: &WalkParams,
    source: Flavor,
    alpha: Flavor,
    steps: u64,
) -> Result<FlavorMomentumDensity> {
    CorrelationEvolution::new(spec, pmns, walk, source)?.density(alpha, steps)
}

/// Von Neumann entropy of the trace-normalized density, in nats.
pub fn flavor_correlation_entropy(rho: &FlavorMomentumDensity) -> Result<f64> {
    von_neumann_entropy(&rho.rho)
}

/// `-Σ λ ln λ` over the eigenvalues of the Hermitized density before
/// normalization, i.e. of `raw_trace · rho`.
pub fn unnormalized_correlation_entropy(rho: &FlavorMomentumDensity) -> Result<f64> {
    let spectrum = hermitian_eigensystem(&rho.rho)?;
    let mut scaled = Vec::with_capacity(spectrum.dim());
    for l in spectrum.eigenvalues {
        if l < -PSD_TOL {
            return Err(Error::NotPositive { eigenvalue: l });
        }
        scaled.push(l.max(0.0) * rho.raw_trace);
    }
    Ok(entropy_of_eigenvalues(&scaled))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillation::{evolve, prepare_flavor};
    use crate::pmns::{build_pmns, MixingParams};

    const THETA: [f64; 3] = [0.001, 0.00615654, 0.0664688];

    fn walk() -> WalkParams {
        WalkParams::new(THETA, 0.01).unwrap()
    }

    fn pmns() -> PmnsMatrix {
        build_pmns(&MixingParams::default()).unwrap()
    }

    fn spec(epsilon: f64) -> WavepacketSpec {
        WavepacketSpec {
            epsilon,
            ..WavepacketSpec::default()
        }
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(spec(0.02).len(), 41);
        assert_eq!(spec(0.01).len(), 21);
        assert_eq!(spec(0.15).len(), 301);
        assert_eq!(WavepacketSpec::delta(0.01).len(), 1);
        let g = spec(0.02).grid().unwrap();
        assert!((g[0] - (-0.01)).abs() < 1e-15);
        assert!((g[40] - 0.03).abs() < 1e-15);
        assert_eq!(g[20], 0.01);
    }

    #[test]
    fn invalid_specs() {
        let mut s = spec(0.0005);
        assert!(s.validate().is_err());
        s = spec(-0.1);
        assert!(s.validate().is_err());
        s = WavepacketSpec {
            spacing: 0.0,
            ..spec(0.02)
        };
        assert!(s.validate().is_err());
        s = WavepacketSpec {
            xi: f64::NAN,
            ..spec(0.02)
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn amplitudes_normalized_and_symmetric() {
        assert_eq!(gaussian_amplitudes(&WavepacketSpec::delta(0.3)).unwrap(), vec![1.0]);
        let p = gaussian_amplitudes(&spec(0.02)).unwrap();
        assert_eq!(p.len(), 41);
        let total: f64 = p.iter().map(|x| x * x).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for i in 0..20 {
            assert_eq!(p[i], p[40 - i]);
        }
        assert!(p.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn coin_state_matches_spectral_evolution() {
        let u = pmns();
        let w = walk();
        let packet = PacketEvolution::new(&spec(0.02), &u, &w, Flavor::Electron).unwrap();
        let k = packet.grid()[7];
        let direct = evolve(&prepare_flavor(Flavor::Electron, &u, &w.with_ktilde(k)).unwrap(), &w, 900);
        let fast = packet.coin_state(7, 900);
        for (a, b) in direct.amplitudes.iter().zip(&fast) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn delta_packet_is_pure() {
        let u = pmns();
        for n in [0, 1, 100, 1000] {
            let rho = reduced_coin_density(&WavepacketSpec::delta(0.01), &u, &walk(), Flavor::Electron, n)
                .unwrap();
            assert!(spin_space_entropy(&rho).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_coin_density_is_a_state() {
        let rho = reduced_coin_density(&spec(0.05), &pmns(), &walk(), Flavor::Electron, 1000).unwrap();
        let (defect, _, _) = hermiticity_defect(&rho.rho).unwrap();
        assert!(defect <= 1e-12);
        assert!((rho.rho.trace().re - 1.0).abs() < 1e-10);
        let s = spin_space_entropy(&rho).unwrap();
        assert!(s > 0.0 && s < 6f64.ln());
    }

    #[test]
    fn initial_coin_density_has_no_phases() {
        let u = pmns();
        let w = walk();
        let s = spec(0.02);
        let rho = reduced_coin_density(&s, &u, &w, Flavor::Muon, 0).unwrap();
        let mut expected = ComplexMatrix::zeros(6, 6);
        for (k, p) in s.grid().unwrap().into_iter().zip(gaussian_amplitudes(&s).unwrap()) {
            let v = prepare_flavor(Flavor::Muon, &u, &w.with_ktilde(k)).unwrap().amplitudes;
            for a in 0..6 {
                for b in 0..6 {
                    expected[(a, b)] += v[a] * v[b].conj() * p * p;
                }
            }
        }
        assert!((rho.rho - expected).norm() < 1e-14);
    }

    #[test]
    fn maximally_mixed_coin_entropy() {
        let rho = CoinDensity {
            rho: ComplexMatrix::identity(6, 6).unscale(6.0),
        };
        assert!((spin_space_entropy(&rho).unwrap() - 6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn delta_probability_is_single_momentum_probability() {
        let u = pmns();
        let w = walk();
        for beta in Flavor::ALL {
            let a = wavepacket_probability(&WavepacketSpec::delta(0.01), &u, &w, Flavor::Electron, beta, 333)
                .unwrap();
            let b = transition_probability(Flavor::Electron, beta, &u, &w, 333);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn wavepacket_probabilities_sum_to_one() {
        let u = pmns();
        let total: f64 = Flavor::ALL
            .iter()
            .map(|&b| wavepacket_probability(&spec(0.02), &u, &walk(), Flavor::Electron, b, 450).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_momentum_correlation_is_scalar() {
        let d = flavor_position_density(&WavepacketSpec::delta(0.01), &pmns(), &walk(), Flavor::Electron, Flavor::Muon, 77)
            .unwrap();
        assert_eq!(d.rho.nrows(), 1);
        assert!((d.rho[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(flavor_correlation_entropy(&d).unwrap().abs() < 1e-15);
    }

    #[test]
    fn raw_correlation_density_is_hermitian() {
        let s = WavepacketSpec {
            epsilon: 0.002,
            ..WavepacketSpec::default()
        };
        assert_eq!(s.len(), 5);
        for alpha in Flavor::ALL {
            let d = flavor_position_density(&s, &pmns(), &walk(), Flavor::Electron, alpha, 1500).unwrap();
            assert!(d.raw_hermiticity_defect <= 1e-10);
            assert!((d.rho.trace().re - 1.0).abs() < 1e-12);
            let e = flavor_correlation_entropy(&d).unwrap();
            assert!(e >= 0.0 && e <= 5f64.ln() + 1e-9);
        }
    }

    /// Brute-force triple sum over `k, m, n` without the precomputed kernel.
    #[test]
    fn kernel_matches_direct_sum() {
        let s = WavepacketSpec {
            epsilon: 0.003,
            ..WavepacketSpec::default()
        };
        let u = pmns();
        let w = walk();
        let grid = s.grid().unwrap();
        let p = gaussian_amplitudes(&s).unwrap();
        let modes: Vec<_> = grid.iter().map(|&k| sector_modes(&w.theta, k).unwrap()).collect();
        let steps = 640u64;
        let (src, alpha) = (Flavor::Electron, Flavor::Tau);
        let m = grid.len();
        let mut direct = ComplexMatrix::zeros(m, m);
        for kp in 0..m {
            for kpp in 0..m {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..m {
                    for mi in 0..3 {
                        for ni in 0..3 {
                            let c = u.element(src, ni).conj()
                                * u.element(src, mi)
                                * u.element(alpha, mi).conj()
                                * u.element(alpha, ni);
                            let ov = modes[kpp][mi].overlap(&modes[k][mi]) * modes[k][ni].overlap(&modes[kp][ni]);
                            let phase = Complex64::from_polar(
                                1.0,
                                -(steps as f64) * (modes[kp][ni].phase - modes[kpp][mi].phase),
                            );
                            acc += c * ov * phase * (p[k] * p[k] * p[kp] * p[kpp]);
                        }
                    }
                }
                direct[(kp, kpp)] = acc;
            }
        }
        let fast = CorrelationEvolution::new(&s, &u, &w, src).unwrap().raw_density(alpha, steps);
        assert!((fast - direct).norm() < 1e-14);
    }

    #[test]
    fn unnormalized_entropy_scales_spectrum() {
        let d = FlavorMomentumDensity {
            rho: ComplexMatrix::identity(2, 2).unscale(2.0),
            raw_trace: 0.5,
            raw_hermiticity_defect: 0.0,
        };
        // eigenvalues 1/4, 1/4
        assert!((unnormalized_correlation_entropy(&d).unwrap() - 0.5 * 4f64.ln()).abs() < 1e-15);
        assert!((flavor_correlation_entropy(&d).unwrap() - 2f64.ln()).abs() < 1e-15);
    }
}
