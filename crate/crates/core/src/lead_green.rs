//! Halfline lead with Neumann boundary condition at the junction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{sqrt_minus, ComplexScalar, SpectralPoint};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A coordinate `x >= 0` on the lead.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LeadPoint(f64);

impl LeadPoint {
    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::domain("LeadPoint", format!("x = {x} must be finite and >= 0")));
        }
        Ok(Self(x))
    }

    pub const JUNCTION: LeadPoint = LeadPoint(0.0);

    pub fn x(&self) -> f64 {
        self.0
    }
}

/// `sqrt(z) := i sqrt(-z)`, so `Im sqrt(z) >= 0` and `e^{i sqrt(z) x}` decays
/// (or is outgoing for `z = k^2 + i0`, where it equals `k`).
pub fn lead_momentum(z: SpectralPoint) -> ComplexScalar {
    I * sqrt_minus(z)
}

/// `G_lead(x, x'; z) = (i/sqrt z) cos(sqrt z x<) e^{i sqrt z x>}`; the full
/// spin block is this scalar times `σ0`.
pub fn lead_green(x: LeadPoint, x_prime: LeadPoint, z: SpectralPoint) -> Result<ComplexScalar> {
    z.require_admissible(0.0, "lead_green")?;
    let k = lead_momentum(z);
    if k == Complex64::new(0.0, 0.0) {
        return Err(Error::domain("lead_green", "z = 0 (threshold of the lead spectrum)"));
    }
    let (lo, hi) = if x.0 <= x_prime.0 { (x.0, x_prime.0) } else { (x_prime.0, x.0) };
    // cos(k lo) e^{ik hi} written without the growing factor e^{-ik lo}
    let product = ((I * k * (hi + lo)).exp() + (I * k * (hi - lo)).exp()) * 0.5;
    Ok(I / k * product)
}

/// `i / sqrt z`, the lead entry of the Krein function.
pub fn lead_diagonal(z: SpectralPoint) -> Result<ComplexScalar> {
    lead_green(LeadPoint::JUNCTION, LeadPoint::JUNCTION, z)
}
