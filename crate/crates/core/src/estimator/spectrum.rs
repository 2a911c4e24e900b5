//! Eigenvalues of K from its first three power sums.

use core::f64::consts::PI;

use crate::error::{Error, Result};

use super::MomentTriple;

/// How strictly to treat a complex root pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumRoute {
    /// Moments from exact outcomes: a complex pair signals a bug upstream.
    Exact,
    /// Moments from finite samples: complex pairs are expected noise.
    Sampled,
}

/// Imaginary parts at or above this are rejected on the exact route.
///
/// A double root perturbed by rounding noise δ in the moments splits into a
/// complex pair with imaginary part ~√δ; moments assembled from the outcome
/// polynomials carry δ ≈ 1e-13, so pairs up to a few 1e-7 are rounding.
pub const EXACT_IMAG_TOL: f64 = 1e-5;

/// Central moments Σ(λ − λ̄)² and Σ(λ − λ̄)³ at or below this, relative to
/// 1 + scaleᵏ, are taken as a triple root. Exact outcome polynomials carry
/// an absolute rounding floor near 1e-15 from their constant terms.
const TRIPLE_ROOT_TOL: f64 = 1e-12;

const ARG_SNAP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    /// real parts, clamped at zero, sorted descending
    pub values: [f64; 3],
    /// largest imaginary part among the cubic's roots
    pub imag: f64,
    /// some root had a negative real part before clamping
    pub clamped: bool,
}

impl Spectrum {
    pub fn is_noisy(&self) -> bool {
        self.imag > 0.0 || self.clamped
    }
}

/// Elementary symmetric polynomials from power sums (Newton's identities).
pub fn elementary_symmetric(m: &MomentTriple) -> [f64; 3] {
    let e1 = m.m1;
    let e2 = (m.m1 * m.m1 - m.m2) / 2.0;
    let e3 = (m.m1 * m.m1 * m.m1 - 3.0 * m.m1 * m.m2 + 2.0 * m.m3) / 6.0;
    [e1, e2, e3]
}

/// Roots of the characteristic cubic λ³ − e₁λ² + e₂λ − e₃ whose power sums
/// are `m`, by the trigonometric solution of the depressed cubic.
pub fn eigenvalues_from_moments(m: &MomentTriple, route: SpectrumRoute) -> Result<Spectrum> {
    let shift = m.m1 / 3.0;
    // central moments of the roots, then λ = t + λ̄ with t³ + p t + q = 0
    let m2c = m.m2 - m.m1 * m.m1 / 3.0;
    let m3c = m.m3 - m.m1 * m.m2 + 2.0 * m.m1 * m.m1 * m.m1 / 9.0;
    let p = -m2c / 2.0;
    let q = -m3c / 3.0;

    let scale =
        m.m1.abs()
            .max(libm::sqrt(m.m2.abs()))
            .max(libm::cbrt(m.m3.abs()));
    let (mut t, imag) = if m2c.abs() <= TRIPLE_ROOT_TOL * (1.0 + scale * scale)
        && m3c.abs() <= TRIPLE_ROOT_TOL * (1.0 + scale * scale * scale)
    {
        ([0.0; 3], 0.0)
    } else {
        depressed_roots(p, q)
    };

    if route == SpectrumRoute::Exact && imag >= EXACT_IMAG_TOL {
        return Err(Error::ComplexSpectrum(imag));
    }

    let mut clamped = false;
    for v in t.iter_mut() {
        *v += shift;
        if *v < 0.0 {
            clamped = true;
            *v = 0.0;
        }
    }
    t.sort_by(|a, b| b.total_cmp(a));
    Ok(Spectrum {
        values: t,
        imag,
        clamped,
    })
}

/// Real parts of the roots of t³ + p t + q and the magnitude of the
/// imaginary part of the complex pair (zero when all roots are real).
fn depressed_roots(p: f64, q: f64) -> ([f64; 3], f64) {
    if p < 0.0 {
        let r = libm::sqrt(-p / 3.0);
        let mut arg = 3.0 * q / (2.0 * p) / r;
        // a double root lands a few ulps either side of |arg| = 1
        if (arg.abs() - 1.0).abs() <= ARG_SNAP {
            arg = arg.signum();
        }
        if arg.abs() <= 1.0 {
            let theta = libm::acos(arg) / 3.0;
            return (
                [
                    2.0 * r * libm::cos(theta),
                    2.0 * r * libm::cos(theta - 2.0 * PI / 3.0),
                    2.0 * r * libm::cos(theta - 4.0 * PI / 3.0),
                ],
                0.0,
            );
        }
        let t1 = -libm::copysign(2.0 * r * libm::cosh(libm::acosh(arg.abs()) / 3.0), q);
        complex_pair(t1, q)
    } else if p > 0.0 {
        let r = libm::sqrt(p / 3.0);
        let arg = 3.0 * q / (2.0 * p) / r;
        let t1 = -2.0 * r * libm::sinh(libm::asinh(arg) / 3.0);
        complex_pair(t1, q)
    } else {
        complex_pair(libm::cbrt(-q), q)
    }
}

/// Given the real root t₁ of t³ + p t + q, the other two are u ± iv with
/// u = −t₁/2 and u² + v² = −q/t₁.
fn complex_pair(t1: f64, q: f64) -> ([f64; 3], f64) {
    let u = -t1 / 2.0;
    let v2 = if t1 != 0.0 { -q / t1 - u * u } else { 0.0 };
    let v = libm::sqrt(v2.max(0.0));
    ([t1, u, u], v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_sums(l: [f64; 3]) -> MomentTriple {
        MomentTriple {
            m1: l.iter().sum(),
            m2: l.iter().map(|x| x * x).sum(),
            m3: l.iter().map(|x| x * x * x).sum(),
        }
    }

    #[test]
    fn rank_one() {
        let s = eigenvalues_from_moments(
            &MomentTriple {
                m1: 2.0,
                m2: 4.0,
                m3: 8.0,
            },
            SpectrumRoute::Exact,
        )
        .unwrap();
        let [e1, e2, e3] = elementary_symmetric(&MomentTriple {
            m1: 2.0,
            m2: 4.0,
            m3: 8.0,
        });
        assert_eq!((e1, e2, e3), (2.0, 0.0, 0.0));
        assert!(
            (s.values[0] - 2.0).abs() < 1e-12
                && s.values[1].abs() < 1e-12
                && s.values[2].abs() < 1e-12,
            "{s:?}"
        );
    }

    #[test]
    fn zero_moments() {
        let s = eigenvalues_from_moments(&MomentTriple::default(), SpectrumRoute::Exact).unwrap();
        assert_eq!(s.values, [0.0; 3]);
    }

    #[test]
    fn triple_root() {
        for p in [0.1f64, 0.5, 0.9, 1.0] {
            let l = p * p;
            let s = eigenvalues_from_moments(
                &MomentTriple {
                    m1: 3.0 * l,
                    m2: 3.0 * l * l,
                    m3: 3.0 * l * l * l,
                },
                SpectrumRoute::Exact,
            )
            .unwrap();
            for v in s.values {
                assert!((v - l).abs() < 1e-14, "{v} vs {l}");
            }
        }
    }

    #[test]
    fn distinct_and_double_roots() {
        for l in [
            [1.5, 0.7, 0.2],
            [1.0, 0.3, 0.3],
            [0.8, 0.8, 0.1],
            [1.2, 0.4, 0.0],
        ] {
            let s = eigenvalues_from_moments(&power_sums(l), SpectrumRoute::Exact).unwrap();
            for (a, b) in s.values.iter().zip(l) {
                assert!((a - b).abs() < 1e-7, "{l:?} -> {:?}", s.values);
            }
        }
    }

    #[test]
    fn complex_pair_is_rejected_only_on_exact_route() {
        // power sums of {1, 0.5 ± 0.2i}
        let m = MomentTriple {
            m1: 2.0,
            m2: 1.0 + 2.0 * (0.25 - 0.04),
            m3: 1.0 + 2.0 * (0.125 - 3.0 * 0.5 * 0.04),
        };
        assert!(matches!(
            eigenvalues_from_moments(&m, SpectrumRoute::Exact),
            Err(Error::ComplexSpectrum(_))
        ));
        let s = eigenvalues_from_moments(&m, SpectrumRoute::Sampled).unwrap();
        assert!((s.imag - 0.2).abs() < 1e-12);
        assert!((s.values[0] - 1.0).abs() < 1e-12 && (s.values[1] - 0.5).abs() < 1e-12);
        assert!(s.is_noisy());
    }

    #[test]
    fn negative_roots_are_clamped() {
        let s = eigenvalues_from_moments(&power_sums([1.0, 0.5, -0.01]), SpectrumRoute::Sampled)
            .unwrap();
        assert!(s.clamped);
        assert_eq!(s.values[2], 0.0);
    }
}
