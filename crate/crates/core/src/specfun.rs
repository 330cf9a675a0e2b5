//! Complex special functions and the branch conventions shared by every kernel.
//!
//! All square roots of the form `sqrt(-z)` are taken on the principal branch
//! (cut along the negative real axis of the radicand), so the result always has
//! a non-negative real part. Real energies on the continuous spectrum are
//! approached from the upper half-plane (limiting absorption), which makes
//! `sqrt(-(E + i0)) = -i sqrt(E)` for `E > 0`.
//!
//! The MacDonald functions `K0` and `K1` are evaluated on the closed right
//! half-plane `Re w >= 0`, which is exactly the set of arguments produced by
//! the effective momenta under this convention.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Alias used for all scalar intermediate values.
pub type ComplexScalar = Complex64;

/// `psi(1) = -gamma`, the digamma function at one.
pub const DIGAMMA_ONE: f64 = -0.577_215_664_901_532_9;

const EULER_GAMMA: f64 = -DIGAMMA_ONE;

/// Returns `psi(1)`, minus the Euler-Mascheroni constant.
pub fn digamma_one() -> f64 {
    DIGAMMA_ONE
}

/// A complex energy, with an explicit marker for real energies that are
/// reached as boundary values from the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    z: Complex64,
    from_above: bool,
}

impl SpectralPoint {
    /// A point with no boundary flag. Use [`SpectralPoint::above`] for real
    /// energies on a continuous spectrum.
    pub fn new(z: Complex64) -> Self {
        Self {
            z,
            from_above: false,
        }
    }

    /// The real energy `e + i0`.
    pub fn above(e: f64) -> Self {
        Self {
            z: Complex64::new(e, 0.0),
            from_above: true,
        }
    }

    /// The lead energy `k^2 + i0`.
    pub fn momentum(k: f64) -> Self {
        Self::above(k * k)
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn is_from_above(&self) -> bool {
        self.from_above
    }

    /// Whether the point sits on the real axis.
    pub fn is_real(&self) -> bool {
        self.z.im == 0.0
    }

    /// `z + delta` with the same boundary flag.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            z: self.z + delta,
            from_above: self.from_above,
        }
    }

    /// The complex-conjugate point. `None` for a flagged real point, whose
    /// conjugate would be a limit from below.
    pub fn conj(&self) -> Option<Self> {
        if self.from_above && self.is_real() {
            None
        } else {
            Some(Self::new(self.z.conj()))
        }
    }

    /// Fails when `z` is an unflagged real number at or above `threshold`,
    /// i.e. on a continuous spectrum starting at `threshold`.
    pub fn require_admissible(&self, threshold: f64, op: &'static str) -> Result<()> {
        if !self.z.re.is_finite() || !self.z.im.is_finite() {
            return Err(Error::domain(op, "spectral parameter is not finite"));
        }
        if self.is_real() && self.z.re >= threshold && !self.from_above {
            return Err(Error::domain(
                op,
                format!(
                    "real z = {} lies on the continuous spectrum [{threshold}, inf); use SpectralPoint::above",
                    self.z.re
                ),
            ));
        }
        Ok(())
    }
}

impl From<Complex64> for SpectralPoint {
    fn from(z: Complex64) -> Self {
        Self::new(z)
    }
}

impl From<f64> for SpectralPoint {
    fn from(e: f64) -> Self {
        Self::new(Complex64::new(e, 0.0))
    }
}

/// `sqrt(-z)` with `Re >= 0`. Real non-negative `z` is always read as the
/// limit from the upper half-plane.
pub fn sqrt_minus(z: SpectralPoint) -> ComplexScalar {
    let z = z.z;
    if z.im == 0.0 {
        if z.re <= 0.0 {
            Complex64::new((-z.re).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, -z.re.sqrt())
        }
    } else {
        (-z).sqrt()
    }
}

/// Principal logarithm, with `ln(0)` reported as a domain error.
pub fn principal_ln(w: ComplexScalar, op: &'static str) -> Result<ComplexScalar> {
    if w.re == 0.0 && w.im == 0.0 {
        return Err(Error::domain(op, "logarithm of zero"));
    }
    Ok(w.ln())
}

// Below this modulus the ascending series is used.
const SERIES_RADIUS: f64 = 2.0;
// Above this modulus the Hankel asymptotic expansion reaches full precision.
const ASYMPTOTIC_RADIUS: f64 = 18.0;
const MAX_TERMS: usize = 500;

/// `K_order(w)` for `order` in `{0, 1}` and `Re w >= 0`, `w != 0`.
pub fn macdonald_k(order: u32, w: ComplexScalar) -> Result<ComplexScalar> {
    let (k0, k1) = macdonald_pair(w)?;
    match order {
        0 => Ok(k0),
        1 => Ok(k1),
        _ => Err(Error::domain(
            "macdonald_k",
            format!("order {order} not supported (only 0 and 1)"),
        )),
    }
}

/// `(K0(w), K1(w))` on the closed right half-plane.
pub fn macdonald_pair(w: ComplexScalar) -> Result<(ComplexScalar, ComplexScalar)> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::domain("macdonald_k", "argument is not finite"));
    }
    if w.re == 0.0 && w.im == 0.0 {
        return Err(Error::domain(
            "macdonald_k",
            "K_nu has a singularity at w = 0",
        ));
    }
    if w.re < 0.0 {
        return Err(Error::domain(
            "macdonald_k",
            format!("argument {w} is in the left half-plane"),
        ));
    }
    let r = w.norm();
    let pair = if r <= SERIES_RADIUS {
        ascending_series(w)
    } else if r >= ASYMPTOTIC_RADIUS {
        hankel_asymptotic(w)
    } else {
        steed_continued_fraction(w)
    };
    if !(pair.0.re.is_finite() && pair.0.im.is_finite() && pair.1.re.is_finite() && pair.1.im.is_finite()) {
        return Err(Error::domain("macdonald_k", format!("non-finite result at w = {w}")));
    }
    Ok(pair)
}

fn ascending_series(w: Complex64) -> (Complex64, Complex64) {
    let y = w * w * 0.25;
    let log_term = (w * 0.5).ln() + EULER_GAMMA;

    // K0 = -(ln(w/2) + gamma) I0 + sum H_k y^k / (k!)^2
    // K1 = 1/w + ln(w/2) I1 - (w/4) sum (psi(k+1) + psi(k+2)) y^k / (k! (k+1)!)
    let mut term0 = Complex64::new(1.0, 0.0); // y^k / (k!)^2
    let mut term1 = Complex64::new(1.0, 0.0); // y^k / (k! (k+1)!)
    let mut i0 = term0;
    let mut i1_sum = term1;
    let mut k0_tail = Complex64::new(0.0, 0.0);
    let mut k1_tail = term1 * (1.0 - 2.0 * EULER_GAMMA); // psi(1) + psi(2)
    let mut harmonic = 0.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term0 = term0 * y / (kf * kf);
        term1 = term1 * y / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        let psi_k1 = harmonic - EULER_GAMMA;
        let psi_k2 = harmonic + 1.0 / (kf + 1.0) - EULER_GAMMA;
        i0 += term0;
        i1_sum += term1;
        k0_tail += term0 * harmonic;
        k1_tail += term1 * (psi_k1 + psi_k2);
        if term0.norm() * (1.0 + harmonic) < 1e-18 * i0.norm().max(k0_tail.norm())
            && term1.norm() * (2.0 + 2.0 * harmonic) < 1e-18 * i1_sum.norm().max(k1_tail.norm())
        {
            break;
        }
    }
    let i1 = w * 0.5 * i1_sum;
    let k0 = -log_term * i0 + k0_tail;
    let k1 = w.inv() + (w * 0.5).ln() * i1 - w * 0.25 * k1_tail;
    (k0, k1)
}

fn hankel_asymptotic(w: Complex64) -> (Complex64, Complex64) {
    // K_nu(w) ~ sqrt(pi / 2w) e^{-w} sum_k a_k(nu) / w^k,
    // a_k(nu) = prod_{j=1..k} (4 nu^2 - (2j - 1)^2) / (8 j)
    let prefactor = (Complex64::new(FRAC_PI_2, 0.0) / w).sqrt() * (-w).exp();
    let inv = w.inv();
    let series = |mu: f64| {
        let mut sum = Complex64::new(1.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        let mut last = f64::INFINITY;
        for j in 1..MAX_TERMS {
            let odd = (2 * j - 1) as f64;
            let next = term * inv * ((mu - odd * odd) / (8.0 * j as f64));
            let size = next.norm();
            if size >= last {
                break;
            }
            term = next;
            sum += term;
            last = size;
            if size < 1e-17 {
                break;
            }
        }
        sum
    };
    (prefactor * series(0.0), prefactor * series(4.0))
}

fn steed_continued_fraction(w: Complex64) -> (Complex64, Complex64) {
    // Temme's normalisation of Steed's CF2 for nu = 0, valid for Re w >= 0.
    let one = Complex64::new(1.0, 0.0);
    let a1 = 0.25;
    let mut b = (one + w) * 2.0;
    let mut d = b.inv();
    let mut delh = d;
    let mut h = d;
    let mut q1 = Complex64::new(0.0, 0.0);
    let mut q2 = one;
    let mut q = Complex64::new(a1, 0.0);
    let mut c = Complex64::new(a1, 0.0);
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 2..20 * MAX_TERMS {
        a -= 2.0 * (i - 1) as f64;
        c = -c * a / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = (b + d * a).inv();
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1e-17 * s.norm() {
            break;
        }
    }
    h *= a1;
    let k0 = (Complex64::new(FRAC_PI_2, 0.0) / w).sqrt() * (-w).exp() / s;
    let k1 = k0 * (w + 0.5 - h) / w;
    (k0, k1)
}
