//! K0/K1 against the frozen 50-digit table in `data/macdonald_table.csv`.

use hybrid_plane::specfun::{macdonald_k, macdonald_pair};
use num_complex::Complex64;

const TABLE: &str = include_str!("data/macdonald_table.csv");

fn rows() -> Vec<(Complex64, Complex64, Complex64)> {
    TABLE
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (
                Complex64::new(v[0], v[1]),
                Complex64::new(v[2], v[3]),
                Complex64::new(v[4], v[5]),
            )
        })
        .collect()
}

#[test]
fn table_has_enough_points() {
    let rows = rows();
    assert!(rows.len() >= 200);
    assert!(rows.iter().filter(|r| r.0.re == 0.0).count() >= 20);
}

#[test]
fn matches_table_to_1e12() {
    let mut worst = 0.0f64;
    for (w, k0, k1) in rows() {
        let (a0, a1) = macdonald_pair(w).unwrap();
        let e0 = ((a0 - k0) / k0).norm();
        let e1 = ((a1 - k1) / k1).norm();
        worst = worst.max(e0).max(e1);
        assert!(e0 <= 1e-12, "K0({w}): got {a0}, want {k0}, rel {e0:e}");
        assert!(e1 <= 1e-12, "K1({w}): got {a1}, want {k1}, rel {e1:e}");
    }
    eprintln!("worst relative error {worst:e}");
}

#[test]
fn derivative_of_k0_is_minus_k1() {
    let h = 1e-5;
    for &r in &[0.3, 1.1, 2.5, 6.0, 13.0, 21.0] {
        for &t in &[0.0, 0.4, -0.9, 1.3, std::f64::consts::FRAC_PI_2 * 0.999] {
            let w = Complex64::from_polar(r, t);
            let dh = Complex64::new(h * r, 0.0);
            let d = (macdonald_k(0, w + dh).unwrap() - macdonald_k(0, w - dh).unwrap()) / (dh * 2.0);
            let k1 = macdonald_k(1, w).unwrap();
            assert!(((d + k1) / k1).norm() < 1e-6, "w = {w}");
        }
    }
}

#[test]
fn conjugation_symmetry() {
    for &r in &[0.01, 0.8, 3.0, 9.0, 30.0] {
        for &t in &[0.2, 0.9, 1.5] {
            let w = Complex64::from_polar(r, t);
            for order in 0..2 {
                let a = macdonald_k(order, w.conj()).unwrap();
                let b = macdonald_k(order, w).unwrap().conj();
                assert!(((a - b) / b).norm() < 1e-14);
            }
        }
    }
}
