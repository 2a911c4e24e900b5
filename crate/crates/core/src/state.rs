//! Two-qubit density matrices, their Bloch decomposition, named families and
//! seeded random states.

use alloc::format;
use alloc::string::ToString;

use nalgebra::{Matrix3, Vector3};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigenvalues, kron2, max_abs, pauli, swap_gate, Mat2, Mat4, C64};
use crate::rng::substream;

/// Tolerance for the Hermitian, unit-trace and positivity checks.
pub const STATE_TOL: f64 = 1e-10;

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    matrix: Mat4,
}

impl TwoQubitState {
    /// Validate `matrix` as a density operator.
    pub fn new(matrix: Mat4) -> Result<Self> {
        let deviation = max_abs(&(matrix - matrix.adjoint()));
        if !(deviation <= STATE_TOL) {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if !((trace.re - 1.0).abs() <= STATE_TOL && trace.im.abs() <= STATE_TOL) {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        let min_eigenvalue = hermitian_eigenvalues(&matrix)[0];
        if min_eigenvalue < -STATE_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: Mat4::identity() * c(0.25, 0.0),
        }
    }

    /// |ψ⟩⟨ψ| for the normalized amplitude vector in the |00⟩,|01⟩,|10⟩,|11⟩ basis.
    pub fn pure(amplitudes: [C64; 4]) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !(norm2 > 1e-24) || !norm2.is_finite() {
            return Err(Error::InvalidParameter {
                family: "pure",
                reason: "amplitude vector must be finite and nonzero".to_string(),
            });
        }
        let scale = 1.0 / libm::sqrt(norm2);
        let v = nalgebra::Vector4::from_iterator(amplitudes.iter().map(|a| a * scale));
        Self::new(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        (self.matrix * self.matrix).trace().re
    }

    /// The state with the two qubits exchanged, SWAP·ρ·SWAP.
    pub fn swapped(&self) -> Self {
        let s = swap_gate();
        Self {
            matrix: s * self.matrix * s,
        }
    }

    /// (U_A ⊗ U_B) ρ (U_A ⊗ U_B)†. The unitaries are not checked.
    pub fn local_rotated(&self, ua: &Mat2, ub: &Mat2) -> Self {
        let u = kron2(ua, ub);
        Self {
            matrix: u * self.matrix * u.adjoint(),
        }
    }

    pub fn bloch(&self) -> BlochForm {
        decompose(self)
    }
}

/// Local Bloch vectors and correlation matrix of a two-qubit state:
/// ρ = ¼(𝕀⊗𝕀 + Σ xᵢσⁱ⊗𝕀 + Σ yᵢ𝕀⊗σⁱ + Σ tᵢⱼσⁱ⊗σʲ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochForm {
    pub x: Vector3<f64>,
    pub y: Vector3<f64>,
    pub t: Matrix3<f64>,
}

impl BlochForm {
    pub fn zero() -> Self {
        Self {
            x: Vector3::zeros(),
            y: Vector3::zeros(),
            t: Matrix3::zeros(),
        }
    }

    /// Build the operator without any validity check.
    pub fn to_matrix(&self) -> Mat4 {
        let mut m = Mat4::identity();
        for i in 0..3 {
            m += kron2(&pauli(i + 1), &pauli(0)) * c(self.x[i], 0.0);
            m += kron2(&pauli(0), &pauli(i + 1)) * c(self.y[i], 0.0);
            for j in 0..3 {
                m += kron2(&pauli(i + 1), &pauli(j + 1)) * c(self.t[(i, j)], 0.0);
            }
        }
        m * c(0.25, 0.0)
    }

    /// Rebuild the density matrix; rejects entries outside [−1, 1] and
    /// results that are not positive semidefinite.
    pub fn reconstruct(&self) -> Result<TwoQubitState> {
        let named = self
            .x
            .iter()
            .enumerate()
            .map(|(i, v)| (format!("x{}", i + 1), *v))
            .chain(
                self.y
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (format!("y{}", i + 1), *v)),
            )
            .chain((0..9).map(|k| {
                (
                    format!("t{}{}", k / 3 + 1, k % 3 + 1),
                    self.t[(k / 3, k % 3)],
                )
            }));
        for (name, value) in named {
            if !(value.abs() <= 1.0 + STATE_TOL) {
                return Err(Error::BlochOutOfRange { name, value });
            }
        }
        let matrix = self.to_matrix();
        let min_eigenvalue = hermitian_eigenvalues(&matrix)[0];
        if min_eigenvalue < -STATE_TOL {
            return Err(Error::NonPhysicalBloch { min_eigenvalue });
        }
        Ok(TwoQubitState { matrix })
    }

    /// ‖x‖² + ‖y‖² + ‖T‖², which equals 4·tr(ρ²) − 1.
    pub fn norm_sqr(&self) -> f64 {
        self.x.norm_squared() + self.y.norm_squared() + self.t.norm_squared()
    }
}

/// Bloch components by direct traces: xᵢ = tr((σⁱ⊗𝕀)ρ), yᵢ = tr((𝕀⊗σⁱ)ρ),
/// tᵢⱼ = tr((σⁱ⊗σʲ)ρ).
pub fn decompose(state: &TwoQubitState) -> BlochForm {
    let rho = state.matrix();
    let expect = |i: usize, j: usize| (kron2(&pauli(i), &pauli(j)) * rho).trace().re;
    let mut b = BlochForm::zero();
    for i in 0..3 {
        b.x[i] = expect(i + 1, 0);
        b.y[i] = expect(0, i + 1);
        for j in 0..3 {
            b.t[(i, j)] = expect(i + 1, j + 1);
        }
    }
    b
}

/// Single-qubit density matrix (𝕀 + r·σ)/2.
pub fn qubit_state(r: &[f64; 3]) -> Mat2 {
    let mut m = pauli(0);
    for (i, v) in r.iter().enumerate() {
        m += pauli(i + 1) * c(*v, 0.0);
    }
    m * c(0.5, 0.0)
}

/// Named state families used for tests, sweeps and the CLI.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// p|Ψ⁻⟩⟨Ψ⁻| + (1 − p)𝕀/4, p ∈ [0, 1].
    Werner {
        p: f64,
    },
    /// (𝕀 + Σ cᵢ σⁱ⊗σⁱ)/4 with (c₁, c₂, c₃) in the physical tetrahedron.
    BellDiagonal {
        c: [f64; 3],
    },
    Pure {
        amplitudes: [C64; 4],
    },
    /// ρ_A ⊗ ρ_B from two Bloch vectors in the unit ball.
    Product {
        a: [f64; 3],
        b: [f64; 3],
    },
    /// p₁|ψ₁⟩⟨ψ₁|⊗ρ₁ + (1 − p₁)|ψ₂⟩⟨ψ₂|⊗ρ₂ where |ψ₁⟩ has polar angles
    /// (θ, φ) and |ψ₂⟩ is orthogonal to it.
    ClassicalAB {
        p1: f64,
        theta: f64,
        phi: f64,
        rho1: [f64; 3],
        rho2: [f64; 3],
    },
}

impl Family {
    pub const NAMES: [&'static str; 5] =
        ["werner", "bell_diagonal", "pure", "product", "classical_AB"];

    pub fn from_params(name: &str, params: &[f64]) -> Result<Self> {
        let expect = |family: &'static str, n: usize| {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::ParameterCount {
                    family,
                    expected: n,
                    got: params.len(),
                })
            }
        };
        let v3 = |s: &[f64]| [s[0], s[1], s[2]];
        match name {
            "werner" => {
                expect("werner", 1)?;
                Ok(Family::Werner { p: params[0] })
            }
            "bell_diagonal" => {
                expect("bell_diagonal", 3)?;
                Ok(Family::BellDiagonal { c: v3(params) })
            }
            "pure" => {
                expect("pure", 8)?;
                let mut amplitudes = [C64::new(0.0, 0.0); 4];
                for (k, a) in amplitudes.iter_mut().enumerate() {
                    *a = C64::new(params[2 * k], params[2 * k + 1]);
                }
                Ok(Family::Pure { amplitudes })
            }
            "product" => {
                expect("product", 6)?;
                Ok(Family::Product {
                    a: v3(params),
                    b: v3(&params[3..]),
                })
            }
            "classical_AB" | "classical_ab" => {
                expect("classical_AB", 9)?;
                Ok(Family::ClassicalAB {
                    p1: params[0],
                    theta: params[1],
                    phi: params[2],
                    rho1: v3(&params[3..]),
                    rho2: v3(&params[6..]),
                })
            }
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }

    pub fn state(&self) -> Result<TwoQubitState> {
        let bad = |family: &'static str, reason: &str| Error::InvalidParameter {
            family,
            reason: reason.to_string(),
        };
        let in_ball = |r: &[f64; 3]| {
            r.iter().all(|v| v.is_finite())
                && r.iter().map(|v| v * v).sum::<f64>() <= 1.0 + STATE_TOL
        };
        match self {
            Family::Werner { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(bad("werner", "p must lie in [0, 1]"));
                }
                let mut b = BlochForm::zero();
                b.t = Matrix3::identity() * -*p;
                b.reconstruct()
            }
            Family::BellDiagonal { c: cs } => {
                let [c1, c2, c3] = *cs;
                // eigenvalues of the Bell-diagonal state
                let weights = [
                    1.0 - c1 - c2 - c3,
                    1.0 - c1 + c2 + c3,
                    1.0 + c1 - c2 + c3,
                    1.0 + c1 + c2 - c3,
                ];
                if cs.iter().any(|v| !v.is_finite()) || weights.iter().any(|w| *w < -STATE_TOL) {
                    return Err(bad(
                        "bell_diagonal",
                        "(c1, c2, c3) lies outside the physical tetrahedron",
                    ));
                }
                let mut b = BlochForm::zero();
                b.t = Matrix3::from_diagonal(&Vector3::new(c1, c2, c3));
                b.reconstruct()
            }
            Family::Pure { amplitudes } => TwoQubitState::pure(*amplitudes),
            Family::Product { a, b } => {
                if !in_ball(a) || !in_ball(b) {
                    return Err(bad("product", "Bloch vectors must lie in the unit ball"));
                }
                TwoQubitState::new(kron2(&qubit_state(a), &qubit_state(b)))
            }
            Family::ClassicalAB {
                p1,
                theta,
                phi,
                rho1,
                rho2,
            } => {
                if !(0.0..=1.0).contains(p1) {
                    return Err(bad("classical_AB", "p1 must lie in [0, 1]"));
                }
                if !theta.is_finite() || !phi.is_finite() {
                    return Err(bad("classical_AB", "angles must be finite"));
                }
                if !in_ball(rho1) || !in_ball(rho2) {
                    return Err(bad(
                        "classical_AB",
                        "Bloch vectors must lie in the unit ball",
                    ));
                }
                let n = [
                    libm::sin(*theta) * libm::cos(*phi),
                    libm::sin(*theta) * libm::sin(*phi),
                    libm::cos(*theta),
                ];
                let proj1 = qubit_state(&n);
                let proj2 = qubit_state(&[-n[0], -n[1], -n[2]]);
                let m = kron2(&proj1, &qubit_state(rho1)) * c(*p1, 0.0)
                    + kron2(&proj2, &qubit_state(rho2)) * c(1.0 - p1, 0.0);
                TwoQubitState::new(m)
            }
        }
    }
}

/// Convenience wrapper around [`Family::from_params`] and [`Family::state`].
pub fn make_family(name: &str, params: &[f64]) -> Result<TwoQubitState> {
    Family::from_params(name, params)?.state()
}

/// Seeded random state ρ = GG†/tr(GG†) with G a 4×`rank` matrix of i.i.d.
/// standard complex Gaussians.
///
/// # Panics
/// If `rank` is not in 1..=4.
pub fn random_state(seed: u64, rank: usize) -> TwoQubitState {
    assert!((1..=4).contains(&rank), "rank must be in 1..=4, got {rank}");
    let mut rng = substream(seed, rank as u64);
    let g = nalgebra::Matrix4::<C64>::from_fn(|_, col| {
        if col < rank {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let m = g * g.adjoint();
    let tr = m.trace().re;
    let mut matrix = m / c(tr, 0.0);
    // exact Hermitian symmetry
    matrix = (matrix + matrix.adjoint()) * c(0.5, 0.0);
    TwoQubitState { matrix }
}

/// Seeded Haar-random single-qubit unitary.
pub fn random_unitary2(seed: u64) -> Mat2 {
    let mut rng = substream(seed, 0x5500);
    let mut q: [f64; 4] = [0.0; 4];
    for v in q.iter_mut() {
        *v = StandardNormal.sample(&mut rng);
    }
    let n = libm::sqrt(q.iter().map(|v| v * v).sum::<f64>());
    let [a, b, cc, d] = q.map(|v| v / n);
    // unit quaternion → SU(2)
    Mat2::new(
        C64::new(a, b),
        C64::new(cc, d),
        C64::new(-cc, d),
        C64::new(a, -b),
    )
}
