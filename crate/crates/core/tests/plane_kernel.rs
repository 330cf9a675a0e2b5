use hybrid_plane::plane_green::*;
use hybrid_plane::specfun::SpectralPoint;
use num_complex::Complex64;
use proptest::prelude::*;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Applies `(-Δ - z) σ0 + 2κ U_J` by central differences to column `col` of
/// `G(·, source; z)` at `x`. Returns (residual norm, size of the largest term).
fn pde_residual(x: PlanePoint, source: PlanePoint, z: f64, p: &SpinOrbitParams, col: usize, h: f64) -> (f64, f64) {
    let zp = SpectralPoint::from(z);
    let f = |dx: f64, dy: f64| {
        let g = spin_orbit_green(PlanePoint::new(x.x1 + dx, x.x2 + dy), source, zp, p).unwrap();
        [g.get(0, col), g.get(1, col)]
    };
    let c = f(0.0, 0.0);
    let (e, w, n, s) = (f(h, 0.0), f(-h, 0.0), f(0.0, h), f(0.0, -h));
    let mut residual = 0.0;
    let mut scale = 0.0f64;
    for comp in 0..2 {
        let lap = (e[comp] + w[comp] + n[comp] + s[comp] - c[comp] * 4.0) / (h * h);
        let other = 1 - comp;
        let d1 = (e[other] - w[other]) / (2.0 * h);
        let d2 = (n[other] - s[other]) / (2.0 * h);
        // rows of U_R: (∂1 - i∂2) f2 and (-∂1 - i∂2) f1
        // rows of U_D: (i∂1 - ∂2) f2 and (i∂1 + ∂2) f1
        let u = match (p.kind(), comp) {
            (SpinOrbitKind::Rashba, 0) => d1 - I * d2,
            (SpinOrbitKind::Rashba, _) => -d1 - I * d2,
            (SpinOrbitKind::Dresselhaus, 0) => I * d1 - d2,
            (SpinOrbitKind::Dresselhaus, _) => I * d1 + d2,
        };
        let so = u * (2.0 * p.kappa());
        let value = -lap - c[comp] * z + so;
        residual += value.norm_sqr();
        scale = scale.max(lap.norm()).max((c[comp] * z).norm()).max(so.norm());
    }
    (residual.sqrt(), scale)
}

#[test]
fn kernel_solves_the_spin_orbit_equation() {
    let source = PlanePoint::new(0.1, -0.2);
    for kind in [SpinOrbitKind::Rashba, SpinOrbitKind::Dresselhaus] {
        for kappa in [0.0, 0.7, 1.5] {
            let p = SpinOrbitParams::new(kind, kappa).unwrap();
            for &(r, t) in &[(0.5, 0.0), (0.8, 1.1), (1.3, -2.0), (2.0, 2.9), (3.1, 0.4)] {
                let x = PlanePoint::new(source.x1 + r * f64::cos(t), source.x2 + r * f64::sin(t));
                for col in 0..2 {
                    let (res, scale) = pde_residual(x, source, -5.0, &p, col, 1e-3);
                    assert!(res <= 1e-3 * scale, "{kind:?} kappa={kappa} r={r} col={col}: {res:e} vs {scale:e}");
                }
            }
        }
    }
}

#[test]
fn renormalized_green_agrees_with_coincidence_limit() {
    let radii = default_radii();
    for kappa in [0.0, 0.5, 1.0, 2.0] {
        for z in [Complex64::new(-1.0, 0.0), Complex64::new(-5.0, 0.0), Complex64::new(-10.0, 0.0), Complex64::new(-3.0, -2.0)] {
            let p = SpinOrbitParams::rashba(kappa).unwrap();
            // -1 with kappa >= 1 is on the plane continuum: take the upper limit
            let zp = if z.im == 0.0 && z.re >= p.spectrum_bottom() {
                SpectralPoint::above(z.re)
            } else {
                SpectralPoint::new(z)
            };
            if z.re == -1.0 && kappa == 1.0 {
                continue; // z + κ² = 0
            }
            let closed = renormalized_green(zp, &p).unwrap();
            let limit = renormalized_green_oracle(zp, &p, &radii).unwrap();
            assert!(closed.max_diff(&limit) < 1e-6, "kappa={kappa} z={z}: {closed:?} vs {limit:?}");
        }
    }
}

#[test]
fn coincidence_limit_is_direction_and_position_independent() {
    let p = SpinOrbitParams::dresselhaus(1.0).unwrap();
    let z = SpectralPoint::new(Complex64::new(-3.0, -2.0));
    let radii = default_radii();
    let a = renormalized_green_limit(z, &p, &radii, PlanePoint::ORIGIN, (1.0, 0.0)).unwrap().value;
    let b = renormalized_green_limit(z, &p, &radii, PlanePoint::ORIGIN, (0.0, 1.0)).unwrap().value;
    let c = renormalized_green_limit(z, &p, &radii, PlanePoint::new(3.0, -2.0), (1.0, 0.0)).unwrap().value;
    assert!(a.max_diff(&b) < 1e-8);
    assert!(a.max_diff(&c) < 1e-8);
}

#[test]
fn spinless_limit_at_minus_four() {
    let limit = renormalized_green_oracle(SpectralPoint::from(-4.0), &SpinOrbitParams::free(), &default_radii()).unwrap();
    assert!(limit.max_diff(&SpinMatrix2::scalar(Complex64::new(-0.091_866_726_299_154_03, 0.0))) < 1e-6);
}

#[test]
fn imaginary_part_is_one_quarter_at_positive_energy() {
    for kappa in [0.0, 0.3, 1.0, 3.0] {
        let p = SpinOrbitParams::rashba(kappa).unwrap();
        for k in [0.01, 0.1, 1.0, 2.5, 10.0, 100.0] {
            let g = renormalized_scalar(SpectralPoint::momentum(k), &p).unwrap();
            assert!((g.im - 0.25).abs() < 1e-10, "kappa={kappa} k={k}: {g}");
        }
    }
}

#[test]
fn renormalized_green_is_continuous_onto_the_real_axis() {
    let p = SpinOrbitParams::rashba(1.2).unwrap();
    for e in [-3.0, -0.5, 0.7, 4.0] {
        let on_axis = renormalized_scalar(SpectralPoint::above(e), &p).unwrap();
        let near = renormalized_scalar(SpectralPoint::new(Complex64::new(e, 1e-10)), &p).unwrap();
        assert!((on_axis - near).norm() < 1e-8, "E={e}");
    }
}

#[test]
fn reality_region_is_below_the_essential_spectrum() {
    let kappa = 1.0;
    let p = SpinOrbitParams::rashba(kappa).unwrap();
    for kb in [1.0001, 1.5, 3.0, 20.0] {
        let g = renormalized_scalar(SpectralPoint::above(-kb * kb), &p).unwrap();
        assert!(g.im.abs() < 1e-12, "kb={kb}: {g}");
    }
    for kb in [0.1, 0.5, 0.9] {
        let g = renormalized_scalar(SpectralPoint::above(-kb * kb), &p).unwrap();
        assert!(g.im.abs() > 1e-3, "kb={kb}: {g}");
    }
}

#[test]
fn small_kappa_is_continuous() {
    let p = SpinOrbitParams::rashba(1e-8).unwrap();
    let (x, y) = (PlanePoint::new(0.3, 0.4), PlanePoint::new(-1.0, 0.2));
    for z in [SpectralPoint::from(-2.0), SpectralPoint::momentum(1.3), SpectralPoint::new(Complex64::new(1.0, 1.0))] {
        let g = spin_orbit_green(x, y, z, &p).unwrap();
        let g0 = SpinMatrix2::scalar(free_green(x, y, z).unwrap());
        assert!(g.max_diff(&g0) <= 1e-6);
    }
}

proptest! {
    #[test]
    fn kernel_adjoint_symmetry(
        x1 in -3.0..3.0f64, x2 in -3.0..3.0f64,
        y1 in -3.0..3.0f64, y2 in -3.0..3.0f64,
        zr in -8.0..8.0f64, zi in 0.05..5.0f64,
        kappa in 0.0..2.5f64, dressel in any::<bool>(),
    ) {
        let x = PlanePoint::new(x1, x2);
        let y = PlanePoint::new(y1, y2);
        prop_assume!(x.distance(&y) > 1e-3);
        let kind = if dressel { SpinOrbitKind::Dresselhaus } else { SpinOrbitKind::Rashba };
        let p = SpinOrbitParams::new(kind, kappa).unwrap();
        for im in [zi, -zi] {
            let z = SpectralPoint::new(Complex64::new(zr, im));
            let g = spin_orbit_green(x, y, z, &p).unwrap();
            let h = spin_orbit_green(y, x, z.conj().unwrap(), &p).unwrap();
            prop_assert!(g.adjoint().max_diff(&h) <= 1e-12 * g.max_abs().max(1.0));
        }
    }

    #[test]
    fn sqrt_minus_branch(zr in -50.0..50.0f64, zi in 1e-6..50.0f64) {
        use hybrid_plane::specfun::sqrt_minus;
        let z = SpectralPoint::new(Complex64::new(zr, zi));
        let w = sqrt_minus(z);
        prop_assert!(w.re > 0.0);
        prop_assert!((w * w + z.z()).norm() < 1e-12 * z.z().norm().max(1.0));
        prop_assert_eq!(sqrt_minus(z.conj().unwrap()), w.conj());
    }
}
