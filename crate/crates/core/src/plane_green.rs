//! The spin-orbit plane: reduced Hamiltonian `H_J = -Δ σ0 + 2κ U_J`, its
//! 2×2 Green matrix and the renormalized diagonal value used as the plane
//! entry of the Krein function.

use std::f64::consts::{LN_2, PI};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{digamma_one, macdonald_k, macdonald_pair, principal_ln, sqrt_minus, ComplexScalar, SpectralPoint};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Which linear-in-momentum coupling acts in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinOrbitKind {
    /// `U_R = σ1 k2 - σ2 k1`
    Rashba,
    /// `U_D = σ2 k2 - σ1 k1`
    Dresselhaus,
}

/// Interaction kind and dimensionless strength `κ >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinOrbitParams {
    kind: SpinOrbitKind,
    kappa: f64,
}

impl SpinOrbitParams {
    /// Builds the parameters from a signed strength.
    ///
    /// `H_J(-κ) = σ3 H_J(κ) σ3`, so a negative strength is stored as `|κ|`.
    /// Scalar quantities (renormalized Green's function, bound states,
    /// reflection) are unaffected; the off-diagonal kernel entries of the
    /// stored operator differ from the signed one by a sign.
    pub fn new(kind: SpinOrbitKind, kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::domain("SpinOrbitParams", "kappa must be finite"));
        }
        Ok(Self {
            kind,
            kappa: kappa.abs(),
        })
    }

    pub fn rashba(kappa: f64) -> Result<Self> {
        Self::new(SpinOrbitKind::Rashba, kappa)
    }

    pub fn dresselhaus(kappa: f64) -> Result<Self> {
        Self::new(SpinOrbitKind::Dresselhaus, kappa)
    }

    /// No spin-orbit coupling.
    pub fn free() -> Self {
        Self {
            kind: SpinOrbitKind::Rashba,
            kappa: 0.0,
        }
    }

    pub fn kind(&self) -> SpinOrbitKind {
        self.kind
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Bottom of the essential spectrum of `H_J`, `-κ^2`.
    pub fn spectrum_bottom(&self) -> f64 {
        -self.kappa * self.kappa
    }
}

/// A 2×2 complex matrix acting on spin space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMatrix2(pub Matrix2<Complex64>);

impl SpinMatrix2 {
    pub fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self(Matrix2::new(a11, a12, a21, a22))
    }

    pub fn zeros() -> Self {
        Self(Matrix2::zeros())
    }

    /// `λ σ0`.
    pub fn scalar(lambda: Complex64) -> Self {
        Self::new(lambda, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), lambda)
    }

    pub fn sigma0() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn sigma1() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self::new(z, o, o, z)
    }

    pub fn sigma2() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::new(z, -I, I, z)
    }

    pub fn sigma3() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self::new(o, z, z, -o)
    }

    /// Pauli matrix by index, `0..=3`.
    pub fn pauli(index: usize) -> Option<Self> {
        match index {
            0 => Some(Self::sigma0()),
            1 => Some(Self::sigma1()),
            2 => Some(Self::sigma2()),
            3 => Some(Self::sigma3()),
            _ => None,
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Deviation from Hermiticity, `max |a_ij - conj(a_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_diff(&self.adjoint())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl std::ops::Add for SpinMatrix2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl std::ops::Sub for SpinMatrix2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl std::ops::Mul for SpinMatrix2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl std::ops::Mul<Complex64> for SpinMatrix2 {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        Self(self.0 * rhs)
    }
}

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub x1: f64,
    pub x2: f64,
}

impl PlanePoint {
    pub const ORIGIN: PlanePoint = PlanePoint { x1: 0.0, x2: 0.0 };

    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn distance(&self, other: &PlanePoint) -> f64 {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }
}

/// `ζ± = sqrt(-(z + κ^2)) ± iκ`, together with the common root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveMomenta {
    pub zeta_plus: ComplexScalar,
    pub zeta_minus: ComplexScalar,
    /// `sqrt(-(z + κ^2))` on the module branch.
    pub root: ComplexScalar,
}

pub fn effective_momenta(z: SpectralPoint, p: &SpinOrbitParams) -> EffectiveMomenta {
    let root = sqrt_minus(z.shifted(p.kappa * p.kappa));
    let shift = Complex64::new(0.0, p.kappa);
    EffectiveMomenta {
        zeta_plus: root + shift,
        zeta_minus: root - shift,
        root,
    }
}

/// `G0(x, x'; z) = K0(sqrt(-z) |x - x'|) / 2π`, the free scalar kernel.
pub fn free_green(x: PlanePoint, x_prime: PlanePoint, z: SpectralPoint) -> Result<ComplexScalar> {
    z.require_admissible(0.0, "free_green")?;
    let r = x.distance(&x_prime);
    if r == 0.0 {
        return Err(Error::domain("free_green", "coincident points"));
    }
    let k0 = macdonald_k(0, sqrt_minus(z) * r)?;
    Ok(k0 / (2.0 * PI))
}

fn checked_momenta(z: SpectralPoint, p: &SpinOrbitParams, op: &'static str) -> Result<EffectiveMomenta> {
    z.require_admissible(p.spectrum_bottom(), op)?;
    let m = effective_momenta(z, p);
    if m.root == Complex64::new(0.0, 0.0) {
        return Err(Error::domain(op, "z + kappa^2 = 0 (bottom of the essential spectrum)"));
    }
    Ok(m)
}

/// The 2×2 resolvent kernel of `H_J`.
pub fn spin_orbit_green(
    x: PlanePoint,
    x_prime: PlanePoint,
    z: SpectralPoint,
    p: &SpinOrbitParams,
) -> Result<SpinMatrix2> {
    let m = checked_momenta(z, p, "spin_orbit_green")?;
    let (d1, d2) = (x.x1 - x_prime.x1, x.x2 - x_prime.x2);
    let r = d1.hypot(d2);
    if r == 0.0 {
        return Err(Error::domain("spin_orbit_green", "coincident points"));
    }
    let (k0p, k1p) = macdonald_pair(m.zeta_plus * r)?;
    let (k0m, k1m) = macdonald_pair(m.zeta_minus * r)?;
    let mixing = p.kappa / (I * m.root);

    let diag = (-(mixing) * (k0p - k0m) + k0p + k0m) / (4.0 * PI);

    // Σ_ν ν ζ^ν K1(ζ^ν r), shared by both off-diagonal entries
    let signed_sum = m.zeta_plus * k1p - m.zeta_minus * k1m;
    let common = signed_sum / (4.0 * PI * I * m.root * r);
    let (upper, lower) = match p.kind {
        SpinOrbitKind::Rashba => (Complex64::new(-d1, d2), Complex64::new(d1, d2)),
        SpinOrbitKind::Dresselhaus => (Complex64::new(d2, -d1), -Complex64::new(d2, d1)),
    };
    Ok(SpinMatrix2::new(diag, upper * common, lower * common, diag))
}

/// `Q(z) = (ψ(1) - ln(-z)/2 + ln 2) / 2π`, the renormalized scalar kernel.
///
/// `ln(-z)/2` is evaluated as `ln(sqrt_minus(z))`, which keeps the branch
/// aligned with the square roots used elsewhere.
pub fn q_helper(z: SpectralPoint) -> Result<ComplexScalar> {
    z.require_admissible(0.0, "q_helper")?;
    if z.z() == Complex64::new(0.0, 0.0) {
        return Err(Error::domain("q_helper", "z = 0"));
    }
    let half_log = principal_ln(sqrt_minus(z), "q_helper")?;
    Ok((digamma_one() - half_log + LN_2) / (2.0 * PI))
}

/// Scalar part of the renormalized Green's function `G_ren(z) = g σ0`.
pub fn renormalized_scalar(z: SpectralPoint, p: &SpinOrbitParams) -> Result<ComplexScalar> {
    let m = checked_momenta(z, p, "renormalized_green")?;
    let q = q_helper(z)?;
    if p.kappa == 0.0 {
        return Ok(q);
    }
    // ln(ζ+/ζ-) taken as ln ζ+ - ln ζ-: both have Re >= 0, so this is the
    // branch that the coincidence limit of the kernel produces.
    let log_ratio = principal_ln(m.zeta_plus, "renormalized_green")?
        - principal_ln(m.zeta_minus, "renormalized_green")?;
    Ok(q + p.kappa / (2.0 * I * m.root) * log_ratio / (2.0 * PI))
}

/// `G_ren(z)`, the diagonal value of the plane kernel after removing the
/// `-ln|x - x'| / 2π` divergence. Always a multiple of `σ0`.
pub fn renormalized_green(z: SpectralPoint, p: &SpinOrbitParams) -> Result<SpinMatrix2> {
    renormalized_scalar(z, p).map(SpinMatrix2::scalar)
}

/// Result of the numerical coincidence limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEstimate {
    pub value: SpinMatrix2,
    /// Difference between the last two extrapolated estimates.
    pub spread: f64,
    /// Number of radii used.
    pub radii_used: usize,
}

/// Successive extrapolated estimates must differ by less than this.
pub const LIMIT_TOLERANCE: f64 = 1e-8;

/// `2^-k` for `k = 3..=22`.
pub fn default_radii() -> Vec<f64> {
    (3..=22).map(|k| 2f64.powi(-k)).collect()
}

/// Numerical oracle for [`renormalized_green`]: extrapolates
/// `G_J(x, x + r e; z) + ln(r)/2π σ0` to `r -> 0` along `radii`.
pub fn renormalized_green_oracle(z: SpectralPoint, p: &SpinOrbitParams, radii: &[f64]) -> Result<SpinMatrix2> {
    renormalized_green_limit(z, p, radii, PlanePoint::ORIGIN, (1.0, 0.0)).map(|e| e.value)
}

/// Same as [`renormalized_green_oracle`] with an explicit base point and
/// approach direction.
///
/// The subtracted kernel behaves as `c0 + r (c1 + c2 ln r) + r^2 (c3 + c4 ln r) + O(r^3 ln r)`
/// (the off-diagonal entries carry the odd powers), so each estimate fits
/// that five-term model exactly on five consecutive radii.
pub fn renormalized_green_limit(
    z: SpectralPoint,
    p: &SpinOrbitParams,
    radii: &[f64],
    base: PlanePoint,
    direction: (f64, f64),
) -> Result<LimitEstimate> {
    const WINDOW: usize = 5;
    let norm = direction.0.hypot(direction.1);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::domain("renormalized_green_oracle", "direction must be a nonzero vector"));
    }
    if radii.len() < WINDOW + 1 {
        return Err(Error::domain(
            "renormalized_green_oracle",
            format!("need at least {} radii", WINDOW + 1),
        ));
    }
    if radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain(
            "renormalized_green_oracle",
            "radii must be positive and strictly decreasing",
        ));
    }
    let e = (direction.0 / norm, direction.1 / norm);

    let mut samples = Vec::with_capacity(radii.len());
    for &r in radii {
        let x = PlanePoint::new(base.x1 + r * e.0, base.x2 + r * e.1);
        let g = spin_orbit_green(base, x, z, p)?;
        samples.push(g + SpinMatrix2::scalar(Complex64::new(r.ln() / (2.0 * PI), 0.0)));
    }

    let mut previous: Option<SpinMatrix2> = None;
    let mut spread = f64::INFINITY;
    for end in WINDOW..=radii.len() {
        let window = &radii[end - WINDOW..end];
        let estimate = extrapolate_window(window, &samples[end - WINDOW..end])?;
        if let Some(prev) = previous {
            spread = estimate.max_diff(&prev);
            if spread < LIMIT_TOLERANCE {
                return Ok(LimitEstimate {
                    value: estimate,
                    spread,
                    radii_used: end,
                });
            }
        }
        previous = Some(estimate);
    }
    Err(Error::Extrapolation { residual: spread })
}

fn extrapolate_window(radii: &[f64], samples: &[SpinMatrix2]) -> Result<SpinMatrix2> {
    let scale = radii[0];
    let basis = |r: f64| {
        let t = r / scale;
        let l = t.ln();
        [1.0, t, t * l, t * t, t * t * l]
    };
    let rows: Vec<[f64; 5]> = radii.iter().map(|&r| basis(r)).collect();
    let design = nalgebra::Matrix5::from_fn(|i, j| rows[i][j]);
    let lu = design.lu();
    let mut out = SpinMatrix2::zeros();
    for row in 0..2 {
        for col in 0..2 {
            let re = nalgebra::Vector5::from_fn(|i, _| samples[i].get(row, col).re);
            let im = nalgebra::Vector5::from_fn(|i, _| samples[i].get(row, col).im);
            let (cre, cim) = match (lu.solve(&re), lu.solve(&im)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::Extrapolation { residual: f64::INFINITY }),
            };
            out.0[(row, col)] = Complex64::new(cre[0], cim[0]);
        }
    }
    Ok(out)
}
