//! Small dense complex linear algebra shared by the physics modules.
//!
//! Matrices are fixed-size `nalgebra` types. Two-qubit operators use the
//! convention that qubit 0 is the most significant bit of the basis index,
//! so `kron(a, b)` applies `a` to qubit 0 and `b` to qubit 1.

use nalgebra::{DMatrix, Matrix2, Matrix3, Matrix4, SMatrix, SymmetricEigen, Vector4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat2 = Matrix2<C64>;
pub type CMat3 = Matrix3<C64>;
pub type CMat4 = Matrix4<C64>;
pub type CVec4 = Vector4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// `exp(i * phase)`.
#[inline]
pub fn cis(phase: f64) -> C64 {
    C64::from_polar(1.0, phase)
}

/// Largest entry modulus.
pub fn max_abs<const R: usize, const C: usize>(m: &SMatrix<C64, R, C>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max |(U U^dagger - 1)_ij|`.
pub fn unitarity_residual<const N: usize>(u: &SMatrix<C64, N, N>) -> f64 {
    max_abs(&(u * u.adjoint() - SMatrix::<C64, N, N>::identity()))
}

/// `max |(H - H^dagger)_ij|`.
pub fn hermiticity_residual<const N: usize>(h: &SMatrix<C64, N, N>) -> f64 {
    max_abs(&(h - h.adjoint()))
}

/// Distance between two matrices modulo a global phase.
///
/// The phase is aligned with `arg tr(W^dagger U)`, which is the minimiser of the
/// Frobenius distance and an upper bound for the max-norm minimum.
pub fn phase_aligned_distance<const N: usize>(
    u: &SMatrix<C64, N, N>,
    w: &SMatrix<C64, N, N>,
) -> f64 {
    let overlap = (w.adjoint() * u).trace();
    let phase = if overlap.norm() > 1e-300 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    max_abs(&(u - w * phase))
}

/// Tensor product of two single-qubit operators, `a` on qubit 0 (MSB).
pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    CMat4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

pub fn pauli_x() -> CMat2 {
    CMat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> CMat2 {
    CMat2::new(ZERO, -I, I, ZERO)
}

pub fn pauli_z() -> CMat2 {
    CMat2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn det2(m: &CMat2) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back ascending. Each eigenvector is rescaled so its
/// largest-modulus component is real and positive (ties resolved towards the
/// lowest index), which makes the output deterministic.
pub fn hermitian_eigen<const N: usize>(h: &SMatrix<C64, N, N>) -> ([f64; N], SMatrix<C64, N, N>) {
    // Symmetrise first so rounding noise in the input cannot leak into the solver.
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let dynamic = DMatrix::from_iterator(N, N, sym.iter().copied());
    let eig = SymmetricEigen::new(dynamic);

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut values = [0.0; N];
    let mut vectors = SMatrix::<C64, N, N>::zeros();
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = eig.eigenvalues[src];
        let mut col: Vec<C64> = eig.eigenvectors.column(src).iter().copied().collect();
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut pivot = 0;
        for (k, z) in col.iter().enumerate() {
            if z.norm() > col[pivot].norm() * (1.0 + 1e-12) {
                pivot = k;
            }
        }
        let fix = col[pivot].conj() / (col[pivot].norm() * norm);
        for z in col.iter_mut() {
            *z *= fix;
        }
        col[pivot] = C64::new(col[pivot].norm(), 0.0);
        for (r, z) in col.into_iter().enumerate() {
            vectors[(r, dst)] = z;
        }
    }
    (values, vectors)
}

/// Zeroes eigenvalues that are indistinguishable from rounding, i.e. below
/// `64 ε` times the spectral radius. Square roots amplify such noise from
/// `1e-17` to `3e-9`.
pub(crate) fn floor_rounding(values: &mut [f64]) {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor = 64.0 * f64::EPSILON * scale;
    for v in values.iter_mut() {
        if *v <= floor {
            *v = 0.0;
        }
    }
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub(crate) fn psd_sqrt<const N: usize>(h: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    let (mut values, vectors) = hermitian_eigen(h);
    floor_rounding(&mut values);
    let mut diag = SMatrix::<C64, N, N>::zeros();
    for (k, v) in values.iter().enumerate() {
        diag[(k, k)] = C64::new(v.sqrt(), 0.0);
    }
    vectors * diag * vectors.adjoint()
}

/// Diagonal matrix from a list of entries.
pub fn diag3(d: [C64; 3]) -> CMat3 {
    CMat3::from_diagonal(&nalgebra::Vector3::new(d[0], d[1], d[2]))
}

pub fn diag4(d: [C64; 4]) -> CMat4 {
    CMat4::from_diagonal(&nalgebra::Vector4::new(d[0], d[1], d[2], d[3]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_puts_first_factor_on_msb() {
        let m = kron(&pauli_x(), &CMat2::identity());
        // |00> -> |10>
        assert_eq!(m[(2, 0)], ONE);
        assert_eq!(m[(0, 0)], ZERO);
    }

    #[test]
    fn eigen_reconstructs_and_sorts() {
        let h = CMat3::new(
            C64::new(2.0, 0.0),
            C64::new(0.3, 0.4),
            C64::new(-0.1, 0.2),
            C64::new(0.3, -0.4),
            C64::new(-1.0, 0.0),
            C64::new(0.5, 0.0),
            C64::new(-0.1, -0.2),
            C64::new(0.5, 0.0),
            C64::new(0.7, 0.0),
        );
        let (vals, vecs) = hermitian_eigen(&h);
        assert!(vals[0] <= vals[1] && vals[1] <= vals[2]);
        let d = diag3([vals[0].into(), vals[1].into(), vals[2].into()]);
        assert!(max_abs(&(vecs * d * vecs.adjoint() - h)) < 1e-13);
        assert!(unitarity_residual(&vecs) < 1e-13);
        for c in 0..3 {
            let col = vecs.column(c);
            let big = col.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
            let pivot = col
                .iter()
                .find(|z| z.norm() >= big * (1.0 - 1e-12))
                .unwrap();
            assert!(pivot.im.abs() < 1e-15 && pivot.re > 0.0);
        }
    }

    #[test]
    fn eigen_handles_degenerate_spectrum() {
        let h = diag3([ONE, ONE, C64::new(2.0, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&h);
        assert!((vals[0] - 1.0).abs() < 1e-15 && (vals[2] - 2.0).abs() < 1e-15);
        assert!(unitarity_residual(&vecs) < 1e-14);
    }

    #[test]
    fn phase_aligned_distance_ignores_global_phase() {
        let u = kron(&pauli_x(), &pauli_z());
        let w = u * cis(0.7);
        assert!(phase_aligned_distance(&u, &w) < 1e-15);
        assert!(phase_aligned_distance(&u, &CMat4::identity()) > 0.5);
    }
}
