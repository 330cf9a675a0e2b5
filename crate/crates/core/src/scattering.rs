//! Scattering of a particle sent in along the lead.
//!
//! The incident wave `ψ⁰ = (cos kx · spin, 0)` satisfies the Neumann condition
//! of the decoupled system. The coupled generalized eigenfunction is
//!
//! ```text
//! ψ = ψ⁰ - γ(·; z) [Q(z) - Ã]⁻¹ u,    z = k² + i0,
//! ```
//!
//! with `u = (spin, 0)` the junction data of `ψ⁰`. On the lead this is
//! `α e^{-ikx} + β e^{ikx}` for every `x > 0`, and `β/α` is the reflection
//! amplitude, which has the spin-independent closed form
//!
//! ```text
//! R(k) = -[(a + ik)(g - d) + |c|²] / [(a - ik)(g - d) + |c|²].
//! ```

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::junction::{krein_denominator, BoundaryData, CouplingMatrices, KreinDenominator, SpinIndependentCoupling, Spinor};
use crate::lead_green::{lead_green, lead_momentum, LeadPoint};
use crate::plane_green::{effective_momenta, q_helper, renormalized_scalar, spin_orbit_green, PlanePoint, SpinOrbitParams};
use crate::specfun::SpectralPoint;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The denominator of `R` counts as zero below this relative size.
pub const POLE_TOLERANCE: f64 = 1e-14;
/// Offsets used by the finite-`ε` validation mode.
pub const EPSILON_LADDER: [f64; 3] = [1e-4, 1e-6, 1e-8];
/// Far-field fit window `[5/k, 50/k]` and its minimum sample count.
pub const FAR_FIELD_WINDOW: (f64, f64) = (5.0, 50.0);
pub const FAR_FIELD_MIN_SAMPLES: usize = 64;
/// Radii at which the plane data `L0`, `L1` are read off.
const PLANE_PROBE_RADII: [f64; 2] = [1e-6, 2e-6];
/// Step of the lead extrapolation stencil.
const LEAD_PROBE_STEP: f64 = 1e-3;

/// Incident momentum `k > 0`; the energy is `k² + i0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ScatteringMomentum(f64);

impl ScatteringMomentum {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::domain("ScatteringMomentum", format!("k = {k} must be finite and > 0")));
        }
        Ok(Self(k))
    }

    pub fn k(&self) -> f64 {
        self.0
    }

    pub fn energy(&self) -> SpectralPoint {
        SpectralPoint::momentum(self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionResult {
    pub r: Complex64,
    /// `|R|²`.
    pub probability: f64,
    /// `1 - |R|²`, the probability of passing into the plane.
    pub transmission: f64,
}

impl ReflectionResult {
    fn new(r: Complex64) -> Self {
        let probability = r.norm_sqr();
        Self {
            r,
            probability,
            transmission: 1.0 - probability,
        }
    }
}

/// `-[(a + i√z)(g - d) + |c|²] / [(a - i√z)(g - d) + |c|²]` at any admissible `z`.
fn closed_form(sqrt_z: Complex64, g: Complex64, a: f64, c2: f64, d: f64, k_label: f64) -> Result<Complex64> {
    let gd = g - d;
    let num = (a + I * sqrt_z) * gd + c2;
    let den = (a - I * sqrt_z) * gd + c2;
    let scale = ((a - I * sqrt_z) * gd).norm() + c2;
    if den.norm() <= POLE_TOLERANCE * scale || den.norm() == 0.0 {
        return Err(Error::PoleOnAxis { k: k_label });
    }
    Ok(-num / den)
}

/// Reflection amplitude for a lead-incident particle; it does not depend on
/// the incident spin.
pub fn reflection_amplitude(k: ScatteringMomentum, c: &SpinIndependentCoupling, p: &SpinOrbitParams) -> Result<ReflectionResult> {
    let z = k.energy();
    let g = renormalized_scalar(z, p)?;
    closed_form(Complex64::new(k.0, 0.0), g, c.a, c.c.norm_sqr(), c.d, k.0).map(ReflectionResult::new)
}

/// The same closed form with the spinless plane value `Q(k² + i0)`.
pub fn spinless_reference_reflection(k: ScatteringMomentum, a: f64, c: Complex64, d: f64) -> Result<Complex64> {
    let q = q_helper(k.energy())?;
    let kk = Complex64::new(k.0, 0.0);
    let gd = q - d;
    let c2 = c.norm_sqr();
    let den = (a - I * kk) * gd + c2;
    if den.norm() <= POLE_TOLERANCE * (((a - I * kk) * gd).norm() + c2) || den.norm() == 0.0 {
        return Err(Error::PoleOnAxis { k: k.0 });
    }
    Ok(-((a + I * kk) * gd + c2) / den)
}

/// The closed form continued to a general energy `z` off the axis, with
/// `√z` from the lead branch.
pub fn reflection_at(z: SpectralPoint, c: &SpinIndependentCoupling, p: &SpinOrbitParams) -> Result<Complex64> {
    let g = renormalized_scalar(z, p)?;
    closed_form(lead_momentum(z), g, c.a, c.c.norm_sqr(), c.d, z.z().re.max(0.0).sqrt())
}

/// Validation mode: `R` at `k² + iε` for `ε` in [`EPSILON_LADDER`],
/// extrapolated to `ε = 0` by the interpolating quadratic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonLadder {
    pub samples: [(f64, Complex64); 3],
    pub extrapolated: Complex64,
}

pub fn epsilon_ladder_reflection(k: ScatteringMomentum, c: &SpinIndependentCoupling, p: &SpinOrbitParams) -> Result<EpsilonLadder> {
    let mut samples = [(0.0, Complex64::new(0.0, 0.0)); 3];
    for (slot, &eps) in samples.iter_mut().zip(EPSILON_LADDER.iter()) {
        let z = SpectralPoint::new(Complex64::new(k.0 * k.0, eps));
        *slot = (eps, reflection_at(z, c, p)?);
    }
    // Lagrange interpolation evaluated at 0
    let mut extrapolated = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        let mut weight = 1.0;
        for j in 0..3 {
            if i != j {
                weight *= samples[j].0 / (samples[j].0 - samples[i].0);
            }
        }
        extrapolated += samples[i].1 * weight;
    }
    Ok(EpsilonLadder { samples, extrapolated })
}

/// The generalized eigenfunction for a given incident spin, evaluable at
/// any point off the junction.
#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    k: ScatteringMomentum,
    spin: Spinor,
    so: SpinOrbitParams,
    coupling: CouplingMatrices,
    /// `[Q - Ã]⁻¹ u`, ordered (lead↑, lead↓, plane↑, plane↓).
    weights: Vector4<Complex64>,
    denominator: KreinDenominator,
}

impl ScatteringSolution {
    pub fn new(k: ScatteringMomentum, spin: Spinor, c: &SpinIndependentCoupling, p: &SpinOrbitParams) -> Result<Self> {
        let norm = spin.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain("scattering_state", "incident spin must be a nonzero finite spinor"));
        }
        let coupling = c.to_matrices();
        let denominator = krein_denominator(k.energy(), p, &coupling)?;
        let u = Vector4::new(spin[0], spin[1], Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let weights = denominator.inverse * u;
        Ok(Self {
            k,
            spin,
            so: *p,
            coupling,
            weights,
            denominator,
        })
    }

    pub fn momentum(&self) -> ScatteringMomentum {
        self.k
    }

    pub fn spin(&self) -> Spinor {
        self.spin
    }

    pub fn weights(&self) -> Vector4<Complex64> {
        self.weights
    }

    pub fn denominator(&self) -> &KreinDenominator {
        &self.denominator
    }

    /// `cos kx · spin - G_lead(x, 0) w_lead`.
    pub fn lead_value(&self, x: LeadPoint) -> Result<Spinor> {
        if x.x() == 0.0 {
            return Err(Error::domain("scattering_state", "lead sample at the junction"));
        }
        let g = lead_green(x, LeadPoint::JUNCTION, self.k.energy())?;
        let incident = self.spin * Complex64::new((self.k.0 * x.x()).cos(), 0.0);
        Ok(incident - Spinor::new(self.weights[0], self.weights[1]) * g)
    }

    /// `-G_J(x, 0) w_plane`.
    pub fn plane_value(&self, x: PlanePoint) -> Result<Spinor> {
        let w = Spinor::new(self.weights[2], self.weights[3]);
        if w == Spinor::zeros() {
            // decoupled plane: the kernel need not be evaluated at all
            if x == PlanePoint::ORIGIN {
                return Err(Error::domain("scattering_state", "plane sample at the junction"));
            }
            return Ok(Spinor::zeros());
        }
        let g = spin_orbit_green(x, PlanePoint::ORIGIN, self.k.energy(), &self.so)?;
        Ok(-(g.0 * w))
    }

    pub fn sample(&self, lead: &[LeadPoint], plane: &[PlanePoint]) -> Result<ScatteringState> {
        Ok(ScatteringState {
            k: self.k,
            spin: self.spin,
            lead: lead.iter().map(|&x| Ok((x, self.lead_value(x)?))).collect::<Result<_>>()?,
            plane: plane.iter().map(|&x| Ok((x, self.plane_value(x)?))).collect::<Result<_>>()?,
        })
    }

    /// Junction data read off numerically from point values: the lead value
    /// and derivative by polynomial extrapolation, `L0` and `L1` from the
    /// logarithmic profile averaged over opposite directions (which removes
    /// the terms odd in the direction).
    pub fn extracted_boundary_data(&self) -> Result<BoundaryData> {
        let h = LEAD_PROBE_STEP / self.k.0.max(1.0);
        let mut f = [Spinor::zeros(); 4];
        for (j, slot) in f.iter_mut().enumerate() {
            *slot = self.lead_value(LeadPoint::new((j + 1) as f64 * h)?)?;
        }
        // cubic through x = h..4h, value and slope at 0
        let lead_value = f[0] * Complex64::from(4.0) - f[1] * Complex64::from(6.0) + f[2] * Complex64::from(4.0) - f[3];
        let lead_derivative = (f[0] * Complex64::from(-13.0 / 3.0) + f[1] * Complex64::from(19.0 / 2.0)
            - f[2] * Complex64::from(7.0)
            + f[3] * Complex64::from(11.0 / 6.0))
            / Complex64::from(h);

        let averaged = |r: f64| -> Result<Spinor> {
            let mut sum = Spinor::zeros();
            for (x1, x2) in [(r, 0.0), (-r, 0.0), (0.0, r), (0.0, -r)] {
                sum += self.plane_value(PlanePoint::new(x1, x2))?;
            }
            Ok(sum / Complex64::from(4.0))
        };
        let [r1, r2] = PLANE_PROBE_RADII;
        let (f1, f2) = (averaged(r1)?, averaged(r2)?);
        // f(r) = -L0 ln r / 2π + L1
        let l0 = (f2 - f1) * Complex64::from(-2.0 * PI / (r2 / r1).ln());
        let l1 = f1 + l0 * Complex64::from(r1.ln() / (2.0 * PI));
        Ok(BoundaryData {
            lead_value,
            lead_derivative,
            l0,
            l1,
        })
    }

    /// Residual of the coupling conditions on [`Self::extracted_boundary_data`].
    pub fn junction_residual(&self) -> Result<f64> {
        Ok(self.coupling.boundary_residual(&self.extracted_boundary_data()?))
    }

    /// Fits each plane spinor component along the ray `direction` on
    /// `r ∈ [r0, 2 r0]` to outgoing cylindrical waves
    /// `r^{-1/2} (A e^{i(q-κ)r} + B e^{i(q+κ)r})`, `q = sqrt(k² + κ²)`, and
    /// returns the largest relative residual. With `κ = 0` the two waves
    /// coincide and a single one is fitted.
    pub fn plane_far_field_residual(&self, direction: (f64, f64), r0: f64, samples: usize) -> Result<f64> {
        let norm = direction.0.hypot(direction.1);
        if !(norm > 0.0) || !(r0 > 0.0) || samples < 8 {
            return Err(Error::domain("plane_far_field_residual", "need a nonzero direction, r0 > 0 and >= 8 samples"));
        }
        let m = effective_momenta(self.k.energy(), &self.so);
        // ζ± = -i(q ∓ κ) on the axis, so e^{-ζ r} = e^{i(q ∓ κ) r}
        let waves: Vec<Complex64> = if self.so.kappa() == 0.0 {
            vec![-m.zeta_plus]
        } else {
            vec![-m.zeta_plus, -m.zeta_minus]
        };
        let radii: Vec<f64> = (0..samples).map(|i| r0 * (1.0 + i as f64 / (samples - 1) as f64)).collect();
        let values = radii
            .iter()
            .map(|&r| self.plane_value(PlanePoint::new(r * direction.0 / norm, r * direction.1 / norm)))
            .collect::<Result<Vec<_>>>()?;
        let basis = DMatrix::from_fn(samples, waves.len(), |i, j| (waves[j] * radii[i]).exp() / radii[i].sqrt());
        let mut worst = 0.0f64;
        for comp in 0..2 {
            let y = DVector::from_iterator(samples, values.iter().map(|v| v[comp]));
            let scale = y.norm();
            if scale == 0.0 {
                continue;
            }
            let fit = least_squares(&basis, &y)?;
            worst = worst.max((&basis * fit - &y).norm() / scale);
        }
        Ok(worst)
    }
}

fn least_squares(basis: &DMatrix<Complex64>, y: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    basis
        .clone()
        .svd(true, true)
        .solve(y, 1e-14)
        .map_err(|e| Error::domain("least_squares", e.to_string()))
}

/// Sampled generalized eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringState {
    pub k: ScatteringMomentum,
    pub spin: Spinor,
    pub lead: Vec<(LeadPoint, Spinor)>,
    pub plane: Vec<(PlanePoint, Spinor)>,
}

/// Coefficients of `α e^{-ikx} + β e^{ikx}` fitted to the lead component
/// along the incident spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldFit {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub ratio: Complex64,
    /// Relative least-squares residual of the fit.
    pub residual: f64,
    /// Relative size of the lead component orthogonal to the incident spin.
    pub spin_leakage: f64,
    pub samples: usize,
}

impl ScatteringState {
    /// Least-squares fit over the lead samples inside `[5/k, 50/k]`.
    pub fn far_field_fit(&self) -> Result<FarFieldFit> {
        let k = self.k.0;
        let (lo, hi) = (FAR_FIELD_WINDOW.0 / k, FAR_FIELD_WINDOW.1 / k);
        let window: Vec<&(LeadPoint, Spinor)> = self.lead.iter().filter(|(x, _)| x.x() >= lo && x.x() <= hi).collect();
        if window.len() < FAR_FIELD_MIN_SAMPLES {
            return Err(Error::domain(
                "far_field_fit",
                format!("{} lead samples in [5/k, 50/k], need {}", window.len(), FAR_FIELD_MIN_SAMPLES),
            ));
        }
        let n = window.len();
        let s2 = self.spin.norm_squared();
        let along: Vec<Complex64> = window.iter().map(|(_, v)| self.spin.dotc(v) / s2).collect();
        let leak = window
            .iter()
            .zip(&along)
            .map(|((_, v), a)| (v - self.spin * *a).norm())
            .fold(0.0, f64::max);
        let basis = DMatrix::from_fn(n, 2, |i, j| {
            let x = window[i].0.x();
            (I * if j == 0 { -k } else { k } * x).exp()
        });
        let y = DVector::from_vec(along);
        let fit = least_squares(&basis, &y)?;
        let (alpha, beta) = (fit[0], fit[1]);
        if alpha.norm() == 0.0 {
            return Err(Error::domain("far_field_fit", "no incoming wave in the lead samples"));
        }
        let scale = y.norm();
        Ok(FarFieldFit {
            alpha,
            beta,
            ratio: beta / alpha,
            residual: (&basis * &fit - &y).norm() / scale,
            spin_leakage: leak / window.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max),
            samples: n,
        })
    }
}

/// Evenly spaced lead points covering the far-field window.
pub fn far_field_window(k: ScatteringMomentum, samples: usize) -> Vec<LeadPoint> {
    let (lo, hi) = (FAR_FIELD_WINDOW.0 / k.0, FAR_FIELD_WINDOW.1 / k.0);
    (0..samples)
        .map(|i| LeadPoint::new(lo + (hi - lo) * i as f64 / (samples - 1).max(1) as f64).expect("window points are positive"))
        .collect()
}

/// The generalized eigenfunction sampled at the given points.
pub fn scattering_state(
    k: ScatteringMomentum,
    spin: Spinor,
    lead_samples: &[LeadPoint],
    plane_samples: &[PlanePoint],
    c: &SpinIndependentCoupling,
    p: &SpinOrbitParams,
) -> Result<ScatteringState> {
    ScatteringSolution::new(k, spin, c, p)?.sample(lead_samples, plane_samples)
}
