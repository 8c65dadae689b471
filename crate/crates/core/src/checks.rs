//! Invariant checks shared by the `validate` mode and the test suites. Each
//! returns the measured defect; callers compare it with a tolerance.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::numerics::{unitarity_defect, von_neumann_entropy, ComplexMatrix};
use crate::oscillation::{
    evolve, evolve_by_matrix_power, oscillation_formula, prepare_flavor, transition_probability,
    walk_phase_arguments,
};
use crate::pmns::{Flavor, PmnsMatrix};
use crate::walk::{
    encoded_walk, encoding_table, lattice_step, mass_eigenmode, plane_wave, six_level_walk,
    walk_block, Encoding, LatticeSpec, WalkParams,
};
use crate::wavepacket::{PacketEvolution, WavepacketSpec};

/// Seed for the random parameter draws of [`validation_suites`].
pub const VALIDATION_SEED: u64 = 0x6e75_7761_6c6b;

/// One row of a validation report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suite {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Suite {
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
        }
    }
}

/// `max |W†W - I|` of the six-level walk.
pub fn walk_unitarity_defect(params: &WalkParams) -> f64 {
    unitarity_defect(&six_level_walk(params)).expect("walk matrix is square")
}

/// `(‖W_j v - e^{-iφ} v‖, ||f|² + |g|² - 1|)` for the positive mode of one sector.
pub fn eigen_residual(theta: f64, ktilde: f64) -> Result<(f64, f64)> {
    let mode = mass_eigenmode(1, theta, ktilde)?;
    let v = mode.spinor();
    let lhs = walk_block(theta, ktilde) * v;
    let rhs = v * Complex64::from_polar(1.0, -mode.phase);
    Ok(((lhs - rhs).norm(), (v.norm_squared() - 1.0).abs()))
}

/// `max_n |Σ_β P(α → β, n) - 1|` over `0 ≤ n ≤ steps`.
pub fn conservation_defect(pmns: &PmnsMatrix, walk: &WalkParams, source: Flavor, steps: u64) -> f64 {
    (0..=steps)
        .map(|n| {
            let total: f64 = Flavor::ALL
                .iter()
                .map(|&b| transition_probability(source, b, pmns, walk, n))
                .sum();
            (total - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest gap between the walk probability and the interference formula fed
/// with the walk's own phase differences, over all flavor pairs and `n ≤ steps`.
pub fn bridge_defect(pmns: &PmnsMatrix, walk: &WalkParams, steps: u64) -> f64 {
    let mut worst = 0.0f64;
    for n in 0..=steps {
        let args = walk_phase_arguments(walk, n);
        for a in Flavor::ALL {
            for b in Flavor::ALL {
                let walk_p = transition_probability(a, b, pmns, walk, n);
                let formula = oscillation_formula(a, b, pmns, &args);
                worst = worst.max((walk_p - formula).abs());
            }
        }
    }
    worst
}

/// Spectral evolution against repeated multiplication by the walk matrix.
pub fn matrix_power_defect(pmns: &PmnsMatrix, walk: &WalkParams, source: Flavor, steps: u64) -> Result<f64> {
    let state = prepare_flavor(source, pmns, walk)?;
    let a = evolve(&state, walk, steps);
    let b = evolve_by_matrix_power(&state, walk, steps);
    Ok(a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// Evolves the plane wave of flavor `source` at every allowed lattice momentum
/// with [`lattice_step`] and compares each amplitude with the momentum-space
/// spectral evolution. Returns the largest per-amplitude deviation.
pub fn lattice_defect(
    theta: &[f64; 3],
    pmns: &PmnsMatrix,
    source: Flavor,
    half_size: usize,
    steps: u64,
) -> Result<f64> {
    let lattice = LatticeSpec::new(half_size)?;
    let mut worst = 0.0f64;
    for k in lattice.allowed_momenta() {
        let walk = WalkParams::new(*theta, k)?;
        let coin = prepare_flavor(source, pmns, &walk)?;
        let mut state = plane_wave(&lattice, k, &coin.amplitudes);
        for _ in 0..steps {
            state = lattice_step(&state, theta, &lattice)?;
        }
        let expected = plane_wave(&lattice, k, &evolve(&coin, &walk, steps).amplitudes);
        for (x, y) in state.iter().zip(&expected) {
            worst = worst.max((x - y).norm());
        }
    }
    Ok(worst)
}

/// `max |E - W|` between the register-space walk read back into `ζ` order
/// and the canonical six-level walk.
pub fn encoding_defect(encoding: Encoding, walk: &WalkParams) -> Result<f64> {
    let table = encoding_table(encoding.name())?;
    let canonical = six_level_walk(walk);
    let diff: ComplexMatrix = table.to_canonical(&encoded_walk(encoding, walk)) - canonical;
    Ok(diff.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Coin-position entropy of a single-momentum packet, maximized over the
/// sampled steps.
pub fn delta_entropy(pmns: &PmnsMatrix, walk: &WalkParams, source: Flavor, samples: &[u64]) -> Result<f64> {
    let packet = PacketEvolution::new(&WavepacketSpec::delta(walk.ktilde), pmns, walk, source)?;
    let mut worst = 0.0f64;
    for &n in samples {
        worst = worst.max(von_neumann_entropy(&packet.coin_density(n).rho)?.abs());
    }
    Ok(worst)
}

/// Largest `(|Tr ρ_c - 1|, max(0, -λ_min), S_e)` over the sampled steps.
pub fn coin_density_defects(
    spec: &WavepacketSpec,
    pmns: &PmnsMatrix,
    walk: &WalkParams,
    source: Flavor,
    samples: &[u64],
) -> Result<(f64, f64, f64)> {
    let packet = PacketEvolution::new(spec, pmns, walk, source)?;
    let (mut trace, mut negativity, mut entropy) = (0.0f64, 0.0f64, 0.0f64);
    for &n in samples {
        let rho = packet.coin_density(n).rho;
        trace = trace.max((rho.trace().re - 1.0).abs());
        let spectrum = crate::numerics::hermitian_eigensystem(&rho)?;
        let lowest = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        negativity = negativity.max(-lowest);
        entropy = entropy.max(von_neumann_entropy(&rho)?);
    }
    Ok((trace, negativity, entropy))
}

fn random_draws(rng: &mut ChaCha8Rng, count: usize) -> Vec<([f64; 3], f64)> {
    use std::f64::consts::PI;
    (0..count)
        .map(|_| {
            let theta = [
                rng.random_range(-PI..PI),
                rng.random_range(-PI..PI),
                rng.random_range(-PI..PI),
            ];
            (theta, rng.random_range(-PI..PI))
        })
        .collect()
}

/// Every invariant suite, evaluated for the given walk and mixing matrix plus
/// a fixed set of random walk parameters.
pub fn validation_suites(
    pmns: &PmnsMatrix,
    walk: &WalkParams,
    source: Flavor,
    encoding: Encoding,
    steps: u64,
    wavepackets: &[WavepacketSpec],
) -> Result<Vec<Suite>> {
    let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
    let draws = random_draws(&mut rng, 200);
    let mut suites = Vec::new();

    suites.push(Suite::at_most(
        "pmns_unitarity",
        unitarity_defect(&pmns.to_dynamic())?,
        1e-12,
    ));

    let mut unitarity = walk_unitarity_defect(walk);
    for (theta, k) in &draws {
        unitarity = unitarity.max(walk_unitarity_defect(&WalkParams::new(*theta, *k)?));
    }
    suites.push(Suite::at_most("walk_unitarity", unitarity, 1e-13));

    let (mut residual, mut norm) = (0.0f64, 0.0f64);
    for (theta, k) in draws.iter().chain(std::iter::once(&(walk.theta, walk.ktilde))) {
        for &t in theta {
            if let Ok((r, d)) = eigen_residual(t, *k) {
                residual = residual.max(r);
                norm = norm.max(d);
            }
        }
    }
    suites.push(Suite::at_most("eigen_residual", residual, 1e-12));
    suites.push(Suite::at_most("eigen_normalization", norm, 1e-12));

    suites.push(Suite::at_most(
        "probability_conservation",
        conservation_defect(pmns, walk, source, steps),
        1e-12,
    ));
    suites.push(Suite::at_most("bridge_identity", bridge_defect(pmns, walk, steps), 1e-10));
    suites.push(Suite::at_most(
        "spectral_vs_matrix_power",
        matrix_power_defect(pmns, walk, source, steps.min(1000))?,
        1e-9,
    ));
    suites.push(Suite::at_most(
        "lattice_equivalence",
        lattice_defect(&walk.theta, pmns, source, 20, 50)?,
        1e-10,
    ));
    let mut encodings = vec![encoding];
    encodings.extend(Encoding::ALL.into_iter().filter(|&e| e != encoding));
    for e in encodings {
        suites.push(Suite::at_most(
            format!("encoding_equivalence.{e}"),
            encoding_defect(e, walk)?,
            0.0,
        ));
    }

    let samples: Vec<u64> = [0, 1, 10, 100, 1000, steps]
        .into_iter()
        .filter(|&n| n <= steps)
        .collect();
    suites.push(Suite::at_most(
        "delta_wavepacket_purity",
        delta_entropy(pmns, walk, source, &samples)?,
        1e-12,
    ));
    for spec in wavepackets {
        let (trace, negativity, entropy) = coin_density_defects(spec, pmns, walk, source, &samples)?;
        let tag = format!("eps={}", spec.epsilon);
        suites.push(Suite::at_most(format!("coin_density_trace.{tag}"), trace, 1e-10));
        suites.push(Suite::at_most(format!("coin_density_psd.{tag}"), negativity, 1e-10));
        suites.push(Suite::at_most(
            format!("coin_entropy_max.{tag}"),
            entropy,
            6f64.ln() + 1e-9,
        ));
    }
    Ok(suites)
}
