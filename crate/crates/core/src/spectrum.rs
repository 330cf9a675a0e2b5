//! Bound states of `H_A` for spin-independent couplings.
//!
//! With `ψ_lead = e^{-κ_b x}` and `ψ_plane = G_J(·, 0; -κ_b^2) v`, the boundary
//! conditions reduce to the scalar condition
//!
//! ```text
//! (κ_b + a) (g(-κ_b^2) - d) + |c|^2 = 0,    g = scalar part of G_ren
//! ```
//!
//! which is exactly `det(Q(-κ_b^2) - Ã) = 0` (lead entry `i/sqrt z = 1/κ_b`).
//! Roots are bracketed on a grid and refined by bisection; each one is then
//! checked against the smallest singular value of the 4×4 junction matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::junction::{denominator_matrix, singular_values4, tilde_transform, Matrix4c, SpinIndependentCoupling};
use crate::plane_green::{renormalized_scalar, SpinOrbitParams};
use crate::specfun::SpectralPoint;

/// `|Im g|` above this means the energy is not below the essential spectrum.
pub const REALITY_TOLERANCE: f64 = 1e-10;
/// Threshold used when mapping out the reality region.
pub const REGION_TOLERANCE: f64 = 1e-12;
pub const GRID_POINTS: usize = 1000;
pub const ROOT_TOLERANCE: f64 = 1e-10;
/// A root passes the duality check when `σ_min / σ_max` of the junction
/// matrix is below this.
pub const DUALITY_TOLERANCE: f64 = 1e-8;
const TANGENT_TOLERANCE: f64 = 1e-12;

/// `κ_b > 0`, the decay rate of a bound state at energy `-κ_b^2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BindingParameter(f64);

impl BindingParameter {
    pub fn new(kappa_b: f64) -> Result<Self> {
        if !(kappa_b > 0.0) || !kappa_b.is_finite() {
            return Err(Error::domain("BindingParameter", format!("kappa_b = {kappa_b} must be > 0")));
        }
        Ok(Self(kappa_b))
    }

    pub fn from_energy(e: f64) -> Result<Self> {
        if !(e < 0.0) {
            return Err(Error::domain("BindingParameter", format!("energy {e} must be negative")));
        }
        Self::new((-e).sqrt())
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn energy(&self) -> f64 {
        -self.0 * self.0
    }
}

/// Real scalar part of `G_ren(-κ_b^2)`, or an error when it is not real.
pub fn real_plane_value(kb: BindingParameter, p: &SpinOrbitParams) -> Result<f64> {
    let g = renormalized_scalar(SpectralPoint::above(kb.energy()), p)?;
    if g.im.abs() > REALITY_TOLERANCE {
        return Err(Error::EssentialSpectrum {
            kappa_b: kb.0,
            imag: g.im,
        });
    }
    Ok(g.re)
}

/// `(κ_b + a)(g - d) + |c|^2`.
pub fn bound_state_residual(kb: BindingParameter, c: &SpinIndependentCoupling, p: &SpinOrbitParams) -> Result<f64> {
    let g = real_plane_value(kb, p)?;
    Ok((kb.0 + c.a) * (g - c.d) + c.c.norm_sqr())
}

/// The `d` that puts an eigenvalue at `e0`: `d = g(e0) + |c|^2 / (κ0 + a)`.
pub fn design_coupling_for_eigenvalue(e0: f64, a: f64, c: Complex64, p: &SpinOrbitParams) -> Result<f64> {
    let kb = BindingParameter::from_energy(e0)?;
    let g = real_plane_value(kb, p)?;
    let denom = kb.0 + a;
    if denom == 0.0 {
        return Err(Error::DegenerateDesign {
            reason: format!("kappa_0 = {} equals -a; the lead factor vanishes identically", kb.0),
        });
    }
    Ok(g + c.norm_sqr() / denom)
}

/// Interval of `κ_b` to scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SearchInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::domain("SearchInterval", format!("need 0 < lo < hi, got ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    /// `(κ + 1e-6, κ + 50]`, just below the essential spectrum.
    pub fn below_essential_spectrum(p: &SpinOrbitParams) -> Self {
        Self {
            lo: p.kappa() + 1e-6,
            hi: p.kappa() + 50.0,
        }
    }

    /// Grid that is geometric in the distance from the nearest singular
    /// point of `g` (`κ` or `0`), so it resolves roots close to it.
    pub fn grid(&self, p: &SpinOrbitParams, n: usize) -> Vec<f64> {
        let base = if self.lo > p.kappa() { p.kappa() } else { 0.0 };
        let (t0, t1) = (self.lo - base, self.hi - base);
        let ratio = (t1 / t0).ln() / (n - 1) as f64;
        (0..n)
            .map(|i| match i {
                0 => self.lo,
                _ if i == n - 1 => self.hi,
                _ => base + t0 * (ratio * i as f64).exp(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// Bracketed by a sign change.
    Simple,
    /// Touches zero without changing sign (double root).
    Tangent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    pub energy: f64,
    pub kappa_b: f64,
    pub residual: f64,
    pub kind: RootKind,
    /// `|det|` of the 4×4 junction matrix at the root.
    pub determinant: f64,
    /// `σ_min / σ_max` of the same matrix.
    pub singular_ratio: f64,
}

impl BoundState {
    pub fn passes_duality(&self) -> bool {
        self.singular_ratio < DUALITY_TOLERANCE
    }
}

/// The junction matrix whose singularity characterises eigenvalues:
/// `Q(-κ_b^2) - Ã` when `a != 0`, otherwise the untransformed boundary
/// system `[[-κ_b - a, -c̄], [-c, g - d]] ⊗ σ0`.
pub fn junction_matrix(kb: BindingParameter, c: &SpinIndependentCoupling, p: &SpinOrbitParams) -> Result<Matrix4c> {
    let z = SpectralPoint::above(kb.energy());
    match tilde_transform(&c.to_matrices()) {
        Ok(tilde) => denominator_matrix(z, p, &tilde),
        Err(Error::SingularNeumannBlock { .. }) => {
            let g = renormalized_scalar(z, p)?;
            let blocks = [
                [Complex64::new(-kb.0 - c.a, 0.0), -c.c.conj()],
                [-c.c, g - c.d],
            ];
            Ok(Matrix4c::from_fn(|i, j| if i % 2 == j % 2 { blocks[i / 2][j / 2] } else { Complex64::new(0.0, 0.0) }))
        }
        Err(e) => Err(e),
    }
}

/// `(|det|, σ_min/σ_max)` of [`junction_matrix`].
pub fn duality_check(kb: BindingParameter, c: &SpinIndependentCoupling, p: &SpinOrbitParams) -> Result<(f64, f64)> {
    let m = junction_matrix(kb, c, p)?;
    let sv = singular_values4(&m);
    Ok((m.determinant().norm(), sv[3] / sv[0]))
}

/// Sampled `Im g(-κ_b^2)` and the measured region where it vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct RealityReport {
    pub kappa: f64,
    /// `(κ_b, Im g)` on `(0, κ)`, approached from the upper half-plane.
    pub exploratory: Vec<(f64, f64)>,
    /// Largest `|Im g|` over the scanned search interval.
    pub search_max_imag: f64,
    /// `g` was real on every sample with `κ_b` above this value.
    pub measured_lower_edge: f64,
    /// Whether `g` was also real on every sample in `(0, κ)`.
    pub real_below_kappa: bool,
}

pub fn reality_report(p: &SpinOrbitParams, search: &SearchInterval, samples: usize) -> Result<RealityReport> {
    let kappa = p.kappa();
    let mut exploratory = Vec::new();
    if kappa > 0.0 {
        for i in 1..=samples {
            let kb = kappa * i as f64 / (samples + 1) as f64;
            let g = renormalized_scalar(SpectralPoint::above(-kb * kb), p)?;
            exploratory.push((kb, g.im));
        }
    }
    let mut search_max_imag = 0.0f64;
    let mut edge = 0.0f64;
    for kb in search.grid(p, samples.max(2)) {
        let g = renormalized_scalar(SpectralPoint::above(-kb * kb), p)?;
        search_max_imag = search_max_imag.max(g.im.abs());
        if g.im.abs() >= REGION_TOLERANCE {
            edge = edge.max(kb);
        }
    }
    for &(kb, im) in &exploratory {
        if im.abs() >= REGION_TOLERANCE {
            edge = edge.max(kb);
        }
    }
    let real_below_kappa = exploratory.iter().all(|(_, im)| im.abs() < REGION_TOLERANCE);
    Ok(RealityReport {
        kappa,
        exploratory,
        search_max_imag,
        measured_lower_edge: edge,
        real_below_kappa,
    })
}

/// All bound states with `κ_b` in `search`, ordered by increasing `κ_b`.
///
/// Fails when any grid point lies outside the region where `g` is real.
pub fn find_bound_states(c: &SpinIndependentCoupling, p: &SpinOrbitParams, search: &SearchInterval) -> Result<Vec<BoundState>> {
    let grid = search.grid(p, GRID_POINTS);
    let residual = |kb: f64| bound_state_residual(BindingParameter::new(kb)?, c, p);
    let values = grid.iter().map(|&kb| residual(kb)).collect::<Result<Vec<f64>>>()?;

    let mut roots = Vec::new();
    for i in 0..grid.len() - 1 {
        let (f0, f1) = (values[i], values[i + 1]);
        if f0 == 0.0 {
            roots.push((grid[i], RootKind::Simple));
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            roots.push((bisect(&residual, grid[i], grid[i + 1], f0)?, RootKind::Simple));
        } else if i > 0 && is_local_min(values[i - 1], f0, f1) {
            if let Some(kb) = tangent_root(&residual, grid[i - 1], grid[i + 1])? {
                roots.push((kb, RootKind::Tangent));
            }
        }
    }
    if *values.last().unwrap() == 0.0 {
        roots.push((*grid.last().unwrap(), RootKind::Simple));
    }

    roots
        .into_iter()
        .map(|(kb, kind)| {
            let b = BindingParameter::new(kb)?;
            let (determinant, singular_ratio) = duality_check(b, c, p)?;
            Ok(BoundState {
                energy: b.energy(),
                kappa_b: kb,
                residual: residual(kb)?,
                kind,
                determinant,
                singular_ratio,
            })
        })
        .collect()
}

fn is_local_min(prev: f64, cur: f64, next: f64) -> bool {
    prev.signum() == cur.signum() && cur.signum() == next.signum() && cur.abs() < prev.abs() && cur.abs() < next.abs()
}

fn bisect(f: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    // run to machine resolution; the contract only needs ROOT_TOLERANCE
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    debug_assert!(hi - lo <= ROOT_TOLERANCE);
    Ok(0.5 * (lo + hi))
}

fn tangent_root(f: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<Option<f64>> {
    // golden-section search for the minimum of |f|
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?.abs(), f(x2)?.abs());
    while hi - lo > ROOT_TOLERANCE * 1e-2 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1)?.abs();
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2)?.abs();
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((f(x)?.abs() < TANGENT_TOLERANCE).then_some(x))
}
