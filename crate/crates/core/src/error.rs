use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the kernels, the junction algebra and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{op}: {reason}")]
    Domain { op: &'static str, reason: String },

    #[error("coupling matrix {name} is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { name: &'static str, deviation: f64 },

    /// The Neumann block `A` cannot be inverted, so the tilde basis does not exist.
    #[error("Neumann-component coupling not representable: A is singular (condition number {condition:.3e})")]
    SingularNeumannBlock { condition: f64 },

    /// `Q(z) - Ã` is numerically singular: `z` is (close to) an eigenvalue.
    #[error("spectral point: Q(z) - Ã is singular (condition number {condition:.3e}, |det| = {:.3e})", determinant.norm())]
    SpectralPoint { determinant: Complex64, condition: f64 },

    #[error("extrapolated limit did not converge (spread {residual:.3e})")]
    Extrapolation { residual: f64 },

    /// The plane Krein function is not real at `-kappa_b^2`.
    #[error("kappa_b = {kappa_b} is inside the essential spectrum (Im G_ren = {imag:.3e})")]
    EssentialSpectrum { kappa_b: f64, imag: f64 },

    #[error("degenerate eigenvalue design: {reason}")]
    DegenerateDesign { reason: String },

    /// The reflection amplitude has a pole at a real momentum.
    #[error("reflection amplitude has a pole on the real axis at k = {k}")]
    PoleOnAxis { k: f64 },
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }

    /// Short stable identifier, used in machine-readable reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::SingularNeumannBlock { .. } => "singular_neumann_block",
            Error::SpectralPoint { .. } => "spectral_point",
            Error::Extrapolation { .. } => "extrapolation",
            Error::EssentialSpectrum { .. } => "essential_spectrum",
            Error::DegenerateDesign { .. } => "degenerate_design",
            Error::PoleOnAxis { .. } => "pole_on_axis",
        }
    }
}
