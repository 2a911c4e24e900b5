//! Small fixed-size linear algebra shared by the rest of the crate.
//!
//! Basis order is |00⟩, |01⟩, |10⟩, |11⟩ with the first tensor factor being
//! qubit A. Pauli matrices follow the usual convention σ¹ = X, σ² = Y, σ³ = Z.

use core::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Matrix4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub(crate) const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Pauli matrix σⁱ for `i` in 1..=3; `i = 0` is the identity.
pub fn pauli(i: usize) -> Mat2 {
    let (o, z, j) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match i {
        0 => Mat2::new(o, z, z, o),
        1 => Mat2::new(z, o, o, z),
        2 => Mat2::new(z, -j, j, z),
        3 => Mat2::new(o, z, z, -o),
        _ => panic!("pauli index {i} out of range"),
    }
}

pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// The two-qubit SWAP permutation.
pub fn swap_gate() -> Mat4 {
    let mut s = Mat4::zeros();
    for i in 0..4 {
        let (hi, lo) = (i / 2, i % 2);
        s[(lo * 2 + hi, i)] = c(1.0, 0.0);
    }
    s
}

/// Projector onto the singlet |Ψ⁻⟩ = (|01⟩ − |10⟩)/√2.
pub fn singlet_projector() -> Mat4 {
    let h = c(0.5, 0.0);
    let z = c(0.0, 0.0);
    Mat4::new(
        z, z, z, z, //
        z, h, -h, z, //
        z, -h, h, z, //
        z, z, z, z,
    )
}

/// Σᵢ σⁱ ⊗ σⁱ built from the Pauli matrices.
pub fn pauli_dot_sum() -> Mat4 {
    (1..=3).map(|i| kron2(&pauli(i), &pauli(i))).sum()
}

pub(crate) fn max_abs(m: &Mat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian 4×4 matrix in ascending order.
pub fn hermitian_eigenvalues(m: &Mat4) -> [f64; 4] {
    let eig = m.symmetric_eigen();
    let mut v = [0.0; 4];
    for (dst, src) in v.iter_mut().zip(eig.eigenvalues.iter()) {
        *dst = *src;
    }
    v.sort_by(f64::total_cmp);
    v
}

/// Normalized discriminant below which the trigonometric solver hands over to
/// an iterative one: near a double eigenvalue `acos` loses half the digits.
const SYM3_DEGENERACY: f64 = 1e-10;

/// Eigenvalues of a real symmetric 3×3 matrix, sorted descending.
///
/// Uses the closed-form trigonometric solution of the characteristic cubic
/// of the shifted and scaled matrix, falling back to nalgebra's iterative
/// symmetric eigensolver when two eigenvalues nearly coincide.
pub fn sym3_eigenvalues(a: &Matrix3<f64>) -> [f64; 3] {
    let off = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
    let mut ev = if off == 0.0 {
        [a[(0, 0)], a[(1, 1)], a[(2, 2)]]
    } else {
        let q = a.trace() / 3.0;
        let p2 =
            (a[(0, 0)] - q).powi(2) + (a[(1, 1)] - q).powi(2) + (a[(2, 2)] - q).powi(2) + 2.0 * off;
        let p = libm::sqrt(p2 / 6.0);
        let b = (a - Matrix3::identity() * q) / p;
        let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
        if 1.0 - r * r < SYM3_DEGENERACY {
            sym3_iterative(a)
        } else {
            let phi = libm::acos(r) / 3.0;
            let e1 = q + 2.0 * p * libm::cos(phi);
            let e3 = q + 2.0 * p * libm::cos(phi + 2.0 * PI / 3.0);
            [e1, 3.0 * q - e1 - e3, e3]
        }
    };
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

fn sym3_iterative(a: &Matrix3<f64>) -> [f64; 3] {
    let e = a.symmetric_eigen().eigenvalues;
    [e[0], e[1], e[2]]
}
