//! Position-space walk on a periodic lattice of `2N + 1` sites.
//!
//! Used as an independent check of the momentum-space evolution: a plane wave
//! `e^{ik̃x}` with `k̃ = 2πm/(2N+1)` is an exact eigenstate of the cyclic shift.

use num_complex::Complex64;

use super::{coin_block, COIN_DIM};
use crate::error::{Error, Result};

/// Sites `x ∈ {-N, ..., N}` with `N + 1 ≡ -N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSpec {
    half_size: usize,
}

impl LatticeSpec {
    pub fn new(half_size: usize) -> Result<Self> {
        if half_size == 0 {
            return Err(Error::EmptyLattice);
        }
        Ok(Self { half_size })
    }

    pub fn half_size(&self) -> usize {
        self.half_size
    }

    pub fn sites(&self) -> usize {
        2 * self.half_size + 1
    }

    /// Number of amplitudes in a state: six coin components per site.
    pub fn state_len(&self) -> usize {
        COIN_DIM * self.sites()
    }

    pub fn positions(&self) -> impl Iterator<Item = i64> {
        let n = self.half_size as i64;
        -n..=n
    }

    /// Offset of `(coin, x)` in the flat state, coin-major.
    pub fn offset(&self, coin: usize, x: i64) -> usize {
        let n = self.half_size as i64;
        let site = (x + n).rem_euclid(self.sites() as i64) as usize;
        coin * self.sites() + site
    }

    /// Momenta `2πm/(2N+1)`, `m = -N..=N`, for which plane waves are periodic.
    pub fn allowed_momenta(&self) -> Vec<f64> {
        let sites = self.sites() as f64;
        self.positions()
            .map(|m| 2.0 * std::f64::consts::PI * m as f64 / sites)
            .collect()
    }
}

/// `coin ⊗ e^{ik̃x} / √(2N+1)`; normalized when `coin` is.
pub fn plane_wave(lattice: &LatticeSpec, ktilde: f64, coin: &[Complex64; COIN_DIM]) -> Vec<Complex64> {
    let norm = (lattice.sites() as f64).sqrt().recip();
    let mut state = vec![Complex64::new(0.0, 0.0); lattice.state_len()];
    for x in lattice.positions() {
        let wave = Complex64::from_polar(norm, ktilde * x as f64);
        for (c, &amp) in coin.iter().enumerate() {
            state[lattice.offset(c, x)] = amp * wave;
        }
    }
    state
}

/// One step: rotate each sector's coin at every site, then move ↑ components
/// one site right and ↓ components one site left, cyclically.
pub fn lattice_step(
    state: &[Complex64],
    theta: &[f64; 3],
    lattice: &LatticeSpec,
) -> Result<Vec<Complex64>> {
    if state.len() != lattice.state_len() {
        return Err(Error::ShapeMismatch {
            expected: lattice.state_len(),
            found: state.len(),
        });
    }
    let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }

    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for (j, &t) in theta.iter().enumerate() {
        let coin = coin_block(t);
        let (up, down) = (2 * j, 2 * j + 1);
        for x in lattice.positions() {
            let a = state[lattice.offset(up, x)];
            let b = state[lattice.offset(down, x)];
            let new_up = a * coin[(0, 0)] + b * coin[(0, 1)];
            let new_down = a * coin[(1, 0)] + b * coin[(1, 1)];
            out[lattice.offset(up, x + 1)] = new_up;
            out[lattice.offset(down, x - 1)] = new_down;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta(lattice: &LatticeSpec, coin: usize, x: i64) -> Vec<Complex64> {
        let mut s = vec![Complex64::new(0.0, 0.0); lattice.state_len()];
        s[lattice.offset(coin, x)] = Complex64::new(1.0, 0.0);
        s
    }

    #[test]
    fn free_shift_moves_up_right() {
        let lat = LatticeSpec::new(5).unwrap();
        let out = lattice_step(&delta(&lat, 2, 0), &[0.0; 3], &lat).unwrap();
        assert_eq!(out[lat.offset(2, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(out.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn down_component_wraps_around() {
        let lat = LatticeSpec::new(4).unwrap();
        let out = lattice_step(&delta(&lat, 1, -4), &[0.0; 3], &lat).unwrap();
        assert_eq!(out[lat.offset(1, 4)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn shape_and_norm_checks() {
        let lat = LatticeSpec::new(3).unwrap();
        let short = vec![Complex64::new(1.0, 0.0); 5];
        assert!(matches!(
            lattice_step(&short, &[0.1; 3], &lat),
            Err(Error::ShapeMismatch { expected: 42, found: 5 })
        ));
        let mut unnormalized = delta(&lat, 0, 0);
        unnormalized[0] = Complex64::new(2.0, 0.0);
        assert!(matches!(
            lattice_step(&unnormalized, &[0.1; 3], &lat),
            Err(Error::NotNormalized { .. })
        ));
        assert!(LatticeSpec::new(0).is_err());
    }

    #[test]
    fn allowed_momenta_make_periodic_plane_waves() {
        let lat = LatticeSpec::new(3).unwrap();
        let ks = lat.allowed_momenta();
        assert_eq!(ks.len(), 7);
        for k in ks {
            let wrap = Complex64::from_polar(1.0, k * lat.sites() as f64);
            assert!((wrap - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
