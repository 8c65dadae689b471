//! Small dense complex linear algebra: Hermitian eigensystems, unitarity checks
//! and the von Neumann entropy.

use std::cmp::Ordering;

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Absolute Hermiticity tolerance accepted by [`hermitian_eigensystem`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-8;
/// Eigenvalues in `[-PSD_TOL, 0)` are treated as rounding noise and clipped.
pub const PSD_TOL: f64 = 1e-10;

/// Eigenvalues sorted descending with orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Rebuilds `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(lambda);
        }
        scaled * v.adjoint()
    }
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn ensure_square(a: &ComplexMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

/// Largest `|A[i][j] - conj(A[j][i])|` together with the entry pair where it occurs.
pub fn hermiticity_defect(a: &ComplexMatrix) -> Result<(f64, usize, usize)> {
    let n = ensure_square(a)?;
    let mut worst = (0.0, 0, 0);
    for i in 0..n {
        for j in i..n {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            if d > worst.0 {
                worst = (d, i, j);
            }
        }
    }
    Ok(worst)
}

/// `(A + A†) / 2`
pub fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()).scale(0.5)
}

fn normalize_phase(v: &mut [Complex64]) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cutoff = 1e-12 * scale.max(f64::MIN_POSITIVE);
    if let Some(lead) = v.iter().find(|z| z.norm() > cutoff).copied() {
        let phase = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

fn lexicographic(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x
            .re
            .total_cmp(&y.re)
            .then_with(|| x.im.total_cmp(&y.im));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back in descending order. Each eigenvector is rotated so
/// that its first non-negligible component is real and positive; exactly tied
/// eigenvalues are ordered by lexicographic comparison of those normalized
/// vectors so that the output is reproducible.
pub fn hermitian_eigensystem(a: &ComplexMatrix) -> Result<Spectrum> {
    let n = ensure_square(a)?;
    let (defect, row, col) = hermiticity_defect(a)?;
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { row, col, defect });
    }

    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|j| {
            let mut v: Vec<Complex64> = eig.eigenvectors.column(j).iter().copied().collect();
            normalize_phase(&mut v);
            (eig.eigenvalues[j], v)
        })
        .collect();

    pairs.sort_by(|(la, va), (lb, vb)| {
        lb.total_cmp(la).then_with(|| lexicographic(va, vb))
    });

    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    for (j, (lambda, v)) in pairs.into_iter().enumerate() {
        eigenvalues.push(lambda);
        for (i, z) in v.into_iter().enumerate() {
            eigenvectors[(i, j)] = z;
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Shannon sum `-Σ λ ln λ` over an already validated spectrum, with `0 ln 0 = 0`.
pub(crate) fn entropy_of_eigenvalues(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum()
}

/// Von Neumann entropy `-Tr ρ ln ρ` in nats.
///
/// `rho` must be Hermitian with unit trace (within [`TRACE_TOL`]). Eigenvalues
/// down to `-PSD_TOL` are clipped to zero; anything more negative is rejected.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    ensure_square(rho)?;
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
        return Err(Error::TraceDeviation { trace: trace.re });
    }
    let spectrum = hermitian_eigensystem(rho)?;
    let mut clipped = spectrum.eigenvalues;
    for l in clipped.iter_mut() {
        if *l < -PSD_TOL {
            return Err(Error::NotPositive { eigenvalue: *l });
        }
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    Ok(entropy_of_eigenvalues(&clipped))
}

/// `max |(U†U - I)_ij|`
pub fn unitarity_defect(u: &ComplexMatrix) -> Result<f64> {
    let n = ensure_square(u)?;
    let gram = u.adjoint() * u;
    let defect = gram - ComplexMatrix::identity(n, n);
    Ok(max_abs(&defect))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn real(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_row_slice(
            rows,
            cols,
            &data.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>(),
        )
    }

    fn diag(values: &[f64]) -> ComplexMatrix {
        let n = values.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    #[test]
    fn identity_spectrum() {
        let s = hermitian_eigensystem(&ComplexMatrix::identity(3, 3)).unwrap();
        assert_eq!(s.eigenvalues.len(), 3);
        for l in &s.eigenvalues {
            assert!((l - 1.0).abs() < 1e-14);
        }
        let gram = s.eigenvectors.adjoint() * &s.eigenvectors;
        assert!(max_abs(&(gram - ComplexMatrix::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn diagonal_spectrum_is_sorted_descending() {
        let s = hermitian_eigensystem(&diag(&[-1.0, 2.0])).unwrap();
        assert!((s.eigenvalues[0] - 2.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-14);
        assert!((s.eigenvectors[(1, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((s.eigenvectors[(0, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pauli_x_eigenvectors() {
        let s = hermitian_eigensystem(&real(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-14);
        let plus = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
        let minus = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2];
        for i in 0..2 {
            assert!((s.eigenvectors[(i, 0)].re - plus[i]).abs() < 1e-14);
            assert!((s.eigenvectors[(i, 1)].re - minus[i]).abs() < 1e-14);
            assert!(s.eigenvectors[(i, 0)].im.abs() < 1e-14);
        }
    }

    #[test]
    fn first_component_is_real_positive() {
        let i = Complex64::i();
        let a = ComplexMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(1.0, 0.0), i, -i, Complex64::new(1.0, 0.0)],
        );
        let s = hermitian_eigensystem(&a).unwrap();
        for j in 0..2 {
            let lead = s.eigenvectors[(0, j)];
            assert!(lead.re > 0.0 && lead.im.abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eigensystem(&rect),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
        let skew = real(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.5, 0.0]);
        match hermitian_eigensystem(&skew) {
            Err(Error::NotHermitian { row, col, defect }) => {
                assert_eq!((row, col), (1, 2));
                assert!((defect - 0.5).abs() < 1e-15);
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn entropy_reference_values() {
        let mut pure = ComplexMatrix::zeros(3, 3);
        let v = [0.6, 0.0, 0.8];
        for i in 0..3 {
            for j in 0..3 {
                pure[(i, j)] = Complex64::new(v[i] * v[j], 0.0);
            }
        }
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);

        let mixed = ComplexMatrix::identity(6, 6).scale(1.0 / 6.0);
        assert!((von_neumann_entropy(&mixed).unwrap() - 6f64.ln()).abs() < 1e-12);
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.791759).abs() < 1e-6);

        let half = diag(&[0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
        assert!((von_neumann_entropy(&half).unwrap() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn entropy_clips_tiny_negatives_and_rejects_large_ones() {
        let tiny = diag(&[1.0 + 1e-12, -1e-12]);
        assert!(von_neumann_entropy(&tiny).unwrap().abs() < 1e-10);

        let bad = diag(&[1.1, -0.1]);
        assert!(matches!(
            von_neumann_entropy(&bad),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn entropy_rejects_bad_trace() {
        match von_neumann_entropy(&diag(&[0.5, 0.4])) {
            Err(Error::TraceDeviation { trace }) => assert!((trace - 0.9).abs() < 1e-15),
            other => panic!("expected TraceDeviation, got {other:?}"),
        }
    }

    #[test]
    fn unitarity_defect_examples() {
        assert_eq!(unitarity_defect(&ComplexMatrix::identity(4, 4)).unwrap(), 0.0);

        let t: f64 = 0.73;
        let rot = real(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!(unitarity_defect(&rot).unwrap() <= 1e-15);

        let mut broken = ComplexMatrix::identity(3, 3);
        broken.row_mut(1).fill(Complex64::new(0.0, 0.0));
        assert!(unitarity_defect(&broken).unwrap() >= 1.0);

        assert!(matches!(
            unitarity_defect(&ComplexMatrix::zeros(2, 1)),
            Err(Error::NotSquare { .. })
        ));
    }
}
