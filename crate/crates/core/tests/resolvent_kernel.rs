use hybrid_plane::junction::{validate_coupling, SpinIndependentCoupling};
use hybrid_plane::plane_green::{SpinMatrix2, SpinOrbitParams};
use hybrid_plane::resolvent::{full_green, ConfigPoint, KreinResolvent};
use hybrid_plane::specfun::SpectralPoint;
use hybrid_plane::spectrum::design_coupling_for_eigenvalue;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn point(lead: bool, a: f64, b: f64) -> ConfigPoint {
    if lead {
        ConfigPoint::lead(a.abs() + 0.05).unwrap()
    } else {
        ConfigPoint::plane(a, b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coupled_kernel_adjoint_symmetry(
        lead_p in any::<bool>(), lead_q in any::<bool>(),
        a1 in -2.0..2.0f64, a2 in -2.0..2.0f64, b1 in -2.0..2.0f64, b2 in -2.0..2.0f64,
        zr in -4.0..4.0f64, zi in 0.1..3.0f64,
        kappa in 0.0..1.5f64,
        ca in -2.0..2.0f64, cr in -1.0..1.0f64, ci in -1.0..1.0f64, cd in -1.0..1.0f64,
        matrix_coupling in any::<bool>(),
    ) {
        prop_assume!(ca.abs() > 0.1);
        let p = point(lead_p, a1, a2);
        let q = point(lead_q, b1, b2);
        if let (ConfigPoint::Plane(x), ConfigPoint::Plane(y)) = (p, q) {
            prop_assume!(x.distance(&y) > 1e-2);
        }
        prop_assume!(a1.hypot(a2) > 1e-2 && b1.hypot(b2) > 1e-2);
        let so = SpinOrbitParams::rashba(kappa).unwrap();
        let m = if matrix_coupling {
            // genuinely spin-dependent coupling
            let a = SpinMatrix2::sigma0() * c(ca, 0.0) + SpinMatrix2::sigma3() * c(0.05, 0.0);
            let cc = SpinMatrix2::sigma0() * c(cr, ci) + SpinMatrix2::sigma1() * c(0.2, 0.0);
            let d = SpinMatrix2::sigma0() * c(cd, 0.0) + SpinMatrix2::sigma2() * c(0.3, 0.0);
            validate_coupling(a, cc, d).unwrap()
        } else {
            SpinIndependentCoupling::new(ca, c(cr, ci), cd).unwrap().to_matrices()
        };
        let z = SpectralPoint::new(c(zr, zi));
        let g = full_green(p, q, z, &so, &m).unwrap();
        let h = full_green(q, p, z.conj().unwrap(), &so, &m).unwrap();
        prop_assert!(g.adjoint().max_diff(&h) <= 1e-10 * g.max_abs().max(1.0));
    }
}

#[test]
fn kernel_blows_up_at_a_designed_eigenvalue() {
    let so = SpinOrbitParams::dresselhaus(0.5).unwrap();
    let e0 = -2.0;
    let (a, cc) = (0.3, c(0.8, 0.1));
    let d = design_coupling_for_eigenvalue(e0, a, cc, &so).unwrap();
    let m = SpinIndependentCoupling::new(a, cc, d).unwrap().to_matrices();
    let (p, q) = (ConfigPoint::lead(0.4).unwrap(), ConfigPoint::plane(0.3, -0.2));
    let size = |eta: f64| {
        KreinResolvent::new(SpectralPoint::new(c(e0, eta)), &so, &m)
            .unwrap()
            .green(p, q)
            .unwrap()
            .max_abs()
    };
    let (s1, s2, s3) = (size(1e-3), size(1e-4), size(1e-5));
    // simple pole: magnitude grows like 1/η
    assert!((s2 / s1 - 10.0).abs() < 0.1, "{s1} {s2}");
    assert!((s3 / s2 - 10.0).abs() < 0.01, "{s2} {s3}");
    // away from it the kernel stays bounded
    let far = KreinResolvent::new(SpectralPoint::new(c(e0 - 0.5, 1e-5)), &so, &m).unwrap().green(p, q).unwrap();
    assert!(far.max_abs() < 1e-2 * s3);
}

#[test]
fn real_point_on_the_eigenvalue_is_rejected() {
    let so = SpinOrbitParams::rashba(1.0).unwrap();
    let d = design_coupling_for_eigenvalue(-4.0, 0.5, c(1.0, 0.0), &so).unwrap();
    let m = SpinIndependentCoupling::new(0.5, c(1.0, 0.0), d).unwrap().to_matrices();
    let r = KreinResolvent::new(SpectralPoint::from(-4.0), &so, &m);
    assert!(matches!(r, Err(hybrid_plane::Error::SpectralPoint { .. })));
}
