//! Coupling of the lead to the plane at the junction.
//!
//! A coupling is given by 2×2 matrices `(A, C, D)` in the boundary conditions
//!
//! ```text
//! ψ'_lead(0+) = A ψ_lead(0+) + C* L0(ψ_plane)
//! L1(ψ_plane) = C ψ_lead(0+) + D L0(ψ_plane)
//! ```
//!
//! where `ψ_plane(x) = -L0 ln|x| / 2π + L1 + o(1)` near the origin. For regular
//! `A` the same conditions read `Ã Γ1 ψ = Γ2 ψ` in the tilde basis
//! `Γ1 ψ = (-ψ'_lead(0+), L0)`, `Γ2 ψ = (ψ_lead(0+), L1)`, and the Krein
//! function `Q(z)` is the Weyl function of that pair.
//!
//! Four-component vectors are ordered `(lead ↑, lead ↓, plane ↑, plane ↓)`.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lead_green::lead_diagonal;
use crate::plane_green::{renormalized_green, SpinMatrix2, SpinOrbitParams};
use crate::specfun::SpectralPoint;

/// Tolerance for the Hermiticity of `A`, `D` and `Ã`.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Condition number above which a matrix is treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e14;

pub type Matrix4c = Matrix4<Complex64>;
pub type Spinor = Vector2<Complex64>;

/// Dimensionful constants of the spin-orbit Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalScales {
    /// Rashba or Dresselhaus constant (energy × length).
    pub alpha: f64,
    pub m_star: f64,
    pub hbar: f64,
}

impl PhysicalScales {
    pub fn new(alpha: f64, m_star: f64, hbar: f64) -> Result<Self> {
        if !alpha.is_finite() || !(m_star > 0.0) || !(hbar > 0.0) || !m_star.is_finite() || !hbar.is_finite() {
            return Err(Error::domain(
                "PhysicalScales",
                "alpha must be finite; m_star and hbar must be positive and finite",
            ));
        }
        Ok(Self { alpha, m_star, hbar })
    }
}

/// `κ = m* α / ħ^2`.
pub fn reduce_units(s: &PhysicalScales) -> f64 {
    s.m_star * s.alpha / (s.hbar * s.hbar)
}

/// Validated coupling matrices with Hermitian `A` and `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMatrices {
    a: SpinMatrix2,
    c: SpinMatrix2,
    d: SpinMatrix2,
}

impl CouplingMatrices {
    pub fn a(&self) -> &SpinMatrix2 {
        &self.a
    }

    pub fn c(&self) -> &SpinMatrix2 {
        &self.c
    }

    pub fn d(&self) -> &SpinMatrix2 {
        &self.d
    }

    /// The lead and the plane are decoupled.
    pub fn is_decoupled(&self) -> bool {
        self.c.max_abs() == 0.0
    }

    /// The 4×4 block matrix `[[A, C*], [C, D]]`.
    pub fn block_matrix(&self) -> Matrix4c {
        let mut m = Matrix4c::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.a.0);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.c.0.adjoint());
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&self.c.0);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.d.0);
        m
    }

    /// Residual of the boundary conditions for the given boundary values.
    pub fn boundary_residual(&self, data: &BoundaryData) -> f64 {
        let first = data.lead_derivative - self.a.0 * data.lead_value - self.c.0.adjoint() * data.l0;
        let second = data.l1 - self.c.0 * data.lead_value - self.d.0 * data.l0;
        first.norm().max(second.norm())
    }
}

/// Checks Hermiticity of `A` and `D` and returns the coupling.
pub fn validate_coupling(a: SpinMatrix2, c: SpinMatrix2, d: SpinMatrix2) -> Result<CouplingMatrices> {
    for (name, m) in [("A", &a), ("C", &c), ("D", &d)] {
        if !m.is_finite() {
            return Err(Error::domain("validate_coupling", format!("{name} has non-finite entries")));
        }
    }
    for (name, m) in [("A", &a), ("D", &d)] {
        let deviation = m.hermiticity_defect();
        if deviation > HERMITICITY_TOLERANCE {
            return Err(Error::NotHermitian { name, deviation });
        }
    }
    Ok(CouplingMatrices { a, c, d })
}

/// Spin-independent coupling `A = a σ0`, `C = c σ0`, `D = d σ0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinIndependentCoupling {
    pub a: f64,
    pub c: Complex64,
    pub d: f64,
}

impl SpinIndependentCoupling {
    pub fn new(a: f64, c: Complex64, d: f64) -> Result<Self> {
        if !(a.is_finite() && c.re.is_finite() && c.im.is_finite() && d.is_finite()) {
            return Err(Error::domain("SpinIndependentCoupling", "parameters must be finite"));
        }
        Ok(Self { a, c, d })
    }

    /// Thin-fibre coupling of radius `rho`, see [`natural_coupling`].
    pub fn natural(rho: f64) -> Result<Self> {
        check_radius(rho)?;
        Self::new(
            1.0 / (2.0 * rho),
            Complex64::new(1.0 / (2.0 * std::f64::consts::PI * rho).sqrt(), 0.0),
            -rho.ln(),
        )
    }

    pub fn to_matrices(&self) -> CouplingMatrices {
        CouplingMatrices {
            a: SpinMatrix2::scalar(Complex64::new(self.a, 0.0)),
            c: SpinMatrix2::scalar(self.c),
            d: SpinMatrix2::scalar(Complex64::new(self.d, 0.0)),
        }
    }

    /// Recovers the scalars when every block is a multiple of `σ0`.
    pub fn from_matrices(m: &CouplingMatrices) -> Option<Self> {
        let scalar = |s: &SpinMatrix2| {
            (s.max_diff(&SpinMatrix2::scalar(s.get(0, 0))) == 0.0).then(|| s.get(0, 0))
        };
        Some(Self {
            a: scalar(&m.a)?.re,
            c: scalar(&m.c)?,
            d: scalar(&m.d)?.re,
        })
    }
}

fn check_radius(rho: f64) -> Result<()> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::domain("natural_coupling", format!("fibre radius rho = {rho} must be > 0")));
    }
    Ok(())
}

/// `A = σ0 / 2ρ`, `C = σ0 / sqrt(2πρ)`, `D = -σ0 ln ρ` for a fibre of radius `ρ`.
pub fn natural_coupling(rho: f64) -> Result<CouplingMatrices> {
    Ok(SpinIndependentCoupling::natural(rho)?.to_matrices())
}

/// Coupling matrix in the tilde basis; Hermitian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TildeMatrix(pub Matrix4c);

impl TildeMatrix {
    /// Residual of `Ã Γ1 ψ - Γ2 ψ` for the given boundary values.
    pub fn boundary_residual(&self, data: &BoundaryData) -> f64 {
        (self.0 * data.gamma1() - data.gamma2()).norm()
    }
}

/// `Ã = [[-A⁻¹, -A⁻¹C*], [-CA⁻¹, D - CA⁻¹C*]]`. Requires regular `A`.
pub fn tilde_transform(m: &CouplingMatrices) -> Result<TildeMatrix> {
    let a = m.a.0;
    let condition = condition_number2(&a);
    let a_inv = match a.try_inverse() {
        Some(inv) if condition <= SINGULAR_CONDITION => inv,
        _ => return Err(Error::SingularNeumannBlock { condition }),
    };
    let c = m.c.0;
    let c_star = c.adjoint();
    let mut t = Matrix4c::zeros();
    t.fixed_view_mut::<2, 2>(0, 0).copy_from(&(-a_inv));
    t.fixed_view_mut::<2, 2>(0, 2).copy_from(&(-(a_inv * c_star)));
    t.fixed_view_mut::<2, 2>(2, 0).copy_from(&(-(c * a_inv)));
    t.fixed_view_mut::<2, 2>(2, 2).copy_from(&(m.d.0 - c * a_inv * c_star));

    let scale = t.iter().map(|x| x.norm()).fold(1.0, f64::max);
    let defect = (t - t.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
    if defect > HERMITICITY_TOLERANCE * scale {
        return Err(Error::NotHermitian { name: "Ã", deviation: defect });
    }
    // remove the rounding-level anti-Hermitian part
    Ok(TildeMatrix((t + t.adjoint()) * Complex64::new(0.5, 0.0)))
}

/// Boundary values of a state at the junction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    pub lead_value: Spinor,
    pub lead_derivative: Spinor,
    pub l0: Spinor,
    pub l1: Spinor,
}

impl BoundaryData {
    /// Completes `(ψ_lead(0+), L0)` to boundary data satisfying the coupling.
    pub fn satisfying(m: &CouplingMatrices, lead_value: Spinor, l0: Spinor) -> Self {
        Self {
            lead_value,
            lead_derivative: m.a.0 * lead_value + m.c.0.adjoint() * l0,
            l0,
            l1: m.c.0 * lead_value + m.d.0 * l0,
        }
    }

    /// `(-ψ'_lead(0+), L0)`.
    pub fn gamma1(&self) -> Vector4<Complex64> {
        Vector4::new(-self.lead_derivative[0], -self.lead_derivative[1], self.l0[0], self.l0[1])
    }

    /// `(ψ_lead(0+), L1)`.
    pub fn gamma2(&self) -> Vector4<Complex64> {
        Vector4::new(self.lead_value[0], self.lead_value[1], self.l1[0], self.l1[1])
    }
}

/// Admissibility of a general condition `𝒜 (ψ(0), L0) + ℬ (ψ'(0), L1) = 0`:
/// `(𝒜|ℬ)` has rank four and `𝒜ℬ*` is Hermitian. Only the `ℬ = -I` family
/// is used for dynamics.
pub fn check_general_condition(a: &Matrix4c, b: &Matrix4c) -> Result<()> {
    let mut joined = nalgebra::SMatrix::<Complex64, 4, 8>::zeros();
    joined.fixed_view_mut::<4, 4>(0, 0).copy_from(a);
    joined.fixed_view_mut::<4, 4>(0, 4).copy_from(b);
    let sv = joined.transpose().svd(false, false).singular_values;
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    let smallest = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(largest > 0.0) || smallest <= largest / SINGULAR_CONDITION {
        return Err(Error::domain("check_general_condition", "(A|B) does not have rank four"));
    }
    let ab = a * b.adjoint();
    let deviation = (ab - ab.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
    if deviation > HERMITICITY_TOLERANCE * largest * largest {
        return Err(Error::NotHermitian { name: "AB*", deviation });
    }
    Ok(())
}

/// The Krein function `Q(z) = diag(i/sqrt(z) σ0, G_ren(z))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KreinMatrix(pub Matrix4c);

impl KreinMatrix {
    pub fn lead_entry(&self) -> Complex64 {
        self.0[(0, 0)]
    }

    pub fn plane_entry(&self) -> Complex64 {
        self.0[(2, 2)]
    }
}

pub fn krein_matrix(z: SpectralPoint, p: &SpinOrbitParams) -> Result<KreinMatrix> {
    let lead = lead_diagonal(z)?;
    let plane = renormalized_green(z, p)?;
    let mut q = Matrix4c::zeros();
    q[(0, 0)] = lead;
    q[(1, 1)] = lead;
    q.fixed_view_mut::<2, 2>(2, 2).copy_from(&plane.0);
    Ok(KreinMatrix(q))
}

/// `Q(z) - Ã` together with its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KreinDenominator {
    pub matrix: Matrix4c,
    pub inverse: Matrix4c,
    pub determinant: Complex64,
    pub condition: f64,
}

/// `Q(z) - Ã` without inverting it.
pub fn denominator_matrix(z: SpectralPoint, p: &SpinOrbitParams, tilde: &TildeMatrix) -> Result<Matrix4c> {
    Ok(krein_matrix(z, p)?.0 - tilde.0)
}

/// `Q(z) - Ã` and `[Q(z) - Ã]⁻¹`; fails with [`Error::SpectralPoint`] when
/// the condition number exceeds [`SINGULAR_CONDITION`].
pub fn krein_denominator(z: SpectralPoint, p: &SpinOrbitParams, m: &CouplingMatrices) -> Result<KreinDenominator> {
    let tilde = tilde_transform(m)?;
    krein_denominator_tilde(z, p, &tilde)
}

pub fn krein_denominator_tilde(z: SpectralPoint, p: &SpinOrbitParams, tilde: &TildeMatrix) -> Result<KreinDenominator> {
    let matrix = denominator_matrix(z, p, tilde)?;
    let determinant = matrix.determinant();
    let condition = condition_number4(&matrix);
    match matrix.try_inverse() {
        Some(inverse) if condition <= SINGULAR_CONDITION => Ok(KreinDenominator {
            matrix,
            inverse,
            determinant,
            condition,
        }),
        _ => Err(Error::SpectralPoint { determinant, condition }),
    }
}

/// Singular values of a 4×4 complex matrix, largest first.
pub fn singular_values4(m: &Matrix4c) -> [f64; 4] {
    let sv = SVD::new(*m, false, false).singular_values;
    let mut out = [sv[0], sv[1], sv[2], sv[3]];
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

fn condition_number4(m: &Matrix4c) -> f64 {
    let sv = singular_values4(m);
    if sv[3] == 0.0 {
        f64::INFINITY
    } else {
        sv[0] / sv[3]
    }
}

fn condition_number2(m: &Matrix2<Complex64>) -> f64 {
    let sv = SVD::new(*m, false, false).singular_values;
    let (hi, lo) = (sv[0].max(sv[1]), sv[0].min(sv[1]));
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}
