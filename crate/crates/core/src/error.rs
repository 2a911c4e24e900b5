use alloc::string::String;

/// Everything that can go wrong inside the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |ρ - ρ†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace} (must be 1 within 1e-10)")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error(
        "Bloch data does not describe a physical state (smallest eigenvalue {min_eigenvalue:e})"
    )]
    NonPhysicalBloch { min_eigenvalue: f64 },

    #[error("Bloch entry {name} = {value} lies outside [-1, 1]")]
    BlochOutOfRange { name: String, value: f64 },

    #[error("unknown state family `{0}`")]
    UnknownFamily(String),

    #[error("family `{family}` expects {expected} parameters, got {got}")]
    ParameterCount {
        family: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameter for family `{family}`: {reason}")]
    InvalidParameter {
        family: &'static str,
        reason: String,
    },

    #[error("invalid pairing layout: {0}")]
    InvalidLayout(String),

    #[error("dense oracle supports at most 4 copies, layout has {0}")]
    TooManyCopies(usize),

    #[error("expectation value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),

    #[error("outcome probability {0:e} is negative beyond rounding")]
    NegativeProbability(f64),

    #[error("outcome distribution sums to {0} instead of 1")]
    DistributionNotNormalized(f64),

    #[error("moments give complex eigenvalues (imaginary part {0:e}) on the exact route")]
    ComplexSpectrum(f64),

    #[error("layout factor has no matching standard projector")]
    UnmatchedFactor,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// True for violations of an internal numerical contract, as opposed to
    /// invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ImaginaryResidue(_)
                | Error::NegativeProbability(_)
                | Error::DistributionNotNormalized(_)
                | Error::ComplexSpectrum(_)
                | Error::UnmatchedFactor
        )
    }
}
