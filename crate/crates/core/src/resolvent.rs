//! Resolvent kernel of the coupled Hamiltonian `H_A` by Krein's formula
//!
//! ```text
//! G_A(p, p'; z) = G0(p, p'; z) - γ(p; z) [Q(z) - Ã]⁻¹ γ*(p'; z)
//! ```
//!
//! kept in factored form: `γ(p; z) = G0(p, junction; z)` is a 2×4 block and
//! `γ*(p'; z) = G0(junction, p'; z)` a 4×2 block, so the correction is never
//! assembled as an operator.

use nalgebra::{Matrix2x4, Matrix4x2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::junction::{krein_denominator_tilde, tilde_transform, CouplingMatrices, KreinDenominator, TildeMatrix};
use crate::lead_green::{lead_green, LeadPoint};
use crate::plane_green::{spin_orbit_green, PlanePoint, SpinMatrix2, SpinOrbitParams};
use crate::specfun::SpectralPoint;

/// A point of the hybrid configuration space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConfigPoint {
    Lead(LeadPoint),
    Plane(PlanePoint),
}

impl ConfigPoint {
    pub fn lead(x: f64) -> Result<Self> {
        Ok(Self::Lead(LeadPoint::new(x)?))
    }

    pub fn plane(x1: f64, x2: f64) -> Self {
        Self::Plane(PlanePoint::new(x1, x2))
    }

    fn check_off_junction(&self, op: &'static str) -> Result<()> {
        let at_junction = match self {
            ConfigPoint::Lead(x) => x.x() == 0.0,
            ConfigPoint::Plane(x) => x.x1 == 0.0 && x.x2 == 0.0,
        };
        if at_junction {
            return Err(Error::domain(op, "point coincides with the junction"));
        }
        Ok(())
    }
}

/// `G0(p, junction; z)`: spin rows, boundary-space columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceBlock(pub Matrix2x4<Complex64>);

pub fn trace_kernel(p: ConfigPoint, z: SpectralPoint, so: &SpinOrbitParams) -> Result<TraceBlock> {
    p.check_off_junction("trace_kernel")?;
    let mut t = Matrix2x4::zeros();
    match p {
        ConfigPoint::Lead(x) => {
            let g = lead_green(x, LeadPoint::JUNCTION, z)?;
            t[(0, 0)] = g;
            t[(1, 1)] = g;
        }
        ConfigPoint::Plane(x) => {
            let g = spin_orbit_green(x, PlanePoint::ORIGIN, z, so)?;
            t.fixed_view_mut::<2, 2>(0, 2).copy_from(&g.0);
        }
    }
    Ok(TraceBlock(t))
}

/// `G0(junction, p; z)`, which equals `trace_kernel(p, conj z)†` by the kernel
/// symmetry; computed at `z` so that flagged real energies need no lower limit.
pub fn junction_kernel(p: ConfigPoint, z: SpectralPoint, so: &SpinOrbitParams) -> Result<Matrix4x2<Complex64>> {
    p.check_off_junction("junction_kernel")?;
    let mut t = Matrix4x2::zeros();
    match p {
        ConfigPoint::Lead(x) => {
            let g = lead_green(LeadPoint::JUNCTION, x, z)?;
            t[(0, 0)] = g;
            t[(1, 1)] = g;
        }
        ConfigPoint::Plane(x) => {
            let g = spin_orbit_green(PlanePoint::ORIGIN, x, z, so)?;
            t.fixed_view_mut::<2, 2>(2, 0).copy_from(&g.0);
        }
    }
    Ok(t)
}

/// Decoupled kernel `G0(p, p'; z)`; zero between lead and plane.
pub fn decoupled_green(p: ConfigPoint, p_prime: ConfigPoint, z: SpectralPoint, so: &SpinOrbitParams) -> Result<SpinMatrix2> {
    match (p, p_prime) {
        (ConfigPoint::Lead(x), ConfigPoint::Lead(y)) => {
            Ok(SpinMatrix2::scalar(lead_green(x, y, z)?))
        }
        (ConfigPoint::Plane(x), ConfigPoint::Plane(y)) => spin_orbit_green(x, y, z, so),
        _ => Ok(SpinMatrix2::zeros()),
    }
}

/// Resolvent of `H_A` at a fixed `z`, holding the inverted denominator.
#[derive(Debug, Clone)]
pub struct KreinResolvent {
    z: SpectralPoint,
    so: SpinOrbitParams,
    denominator: KreinDenominator,
}

impl KreinResolvent {
    pub fn new(z: SpectralPoint, so: &SpinOrbitParams, m: &CouplingMatrices) -> Result<Self> {
        let tilde = tilde_transform(m)?;
        Self::with_tilde(z, so, &tilde)
    }

    pub fn with_tilde(z: SpectralPoint, so: &SpinOrbitParams, tilde: &TildeMatrix) -> Result<Self> {
        Ok(Self {
            z,
            so: *so,
            denominator: krein_denominator_tilde(z, so, tilde)?,
        })
    }

    pub fn denominator(&self) -> &KreinDenominator {
        &self.denominator
    }

    /// The rank-limited correction `γ(p) [Q - Ã]⁻¹ γ*(p')`.
    pub fn correction(&self, p: ConfigPoint, p_prime: ConfigPoint) -> Result<SpinMatrix2> {
        let left = trace_kernel(p, self.z, &self.so)?;
        let right = junction_kernel(p_prime, self.z, &self.so)?;
        Ok(SpinMatrix2(left.0 * self.denominator.inverse * right))
    }

    pub fn green(&self, p: ConfigPoint, p_prime: ConfigPoint) -> Result<SpinMatrix2> {
        let free = decoupled_green(p, p_prime, self.z, &self.so)?;
        Ok(free - self.correction(p, p_prime)?)
    }
}

/// `G_A(p, p'; z)` for a single pair of points.
pub fn full_green(
    p: ConfigPoint,
    p_prime: ConfigPoint,
    z: SpectralPoint,
    so: &SpinOrbitParams,
    m: &CouplingMatrices,
) -> Result<SpinMatrix2> {
    KreinResolvent::new(z, so, m)?.green(p, p_prime)
}
