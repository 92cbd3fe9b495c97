//! Closed forms shared by the integration tests, written in `t = x²`.
#![allow(dead_code)]

use qesdx::qpoly::{PolyC, QuasiWave, RationalT};
use qesdx::sextic::RationalPotential;
use qesdx::Complex64;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn poly(coeffs: &[f64]) -> PolyC {
    PolyC::from_real(coeffs)
}

pub fn rat(num: &[f64], den: &[f64]) -> RationalT {
    RationalT::new(poly(num), poly(den)).unwrap()
}

/// `k / (t − root)^m`
pub fn pole(k: f64, root: f64, m: u32) -> RationalT {
    RationalT::pole(c(k), c(root), m)
}

pub fn sum(terms: &[RationalT]) -> RationalPotential {
    let total = terms.iter().fold(RationalT::zero(), |acc, r| &acc + r);
    RationalPotential::new(total)
}

pub fn wave(sigma: f64, num: &[f64], den: &[f64]) -> QuasiWave {
    QuasiWave::new(c(1.0), 0.5, 1, sigma, poly(num), poly(den)).unwrap()
}

fn sqrt4s1(s: f64) -> f64 {
    (4.0 * s + 1.0).sqrt()
}

/// Sector polynomials of the `a = 1/2`, `M = 2` model, lowest energy first.
pub fn sector_polys(s: f64) -> [PolyC; 3] {
    let r = sqrt4s1(s);
    [
        poly(&[4.0 * s, 2.0 * r, 1.0]),
        poly(&[-4.0 * s - 2.0, 0.0, 1.0]),
        poly(&[4.0 * s, -2.0 * r, 1.0]),
    ]
}

/// Reducible second-order potential, with `sign = +1`, or its type-1
/// counterpart with `sign = −1`, as printed.
pub fn printed_v2(s: f64, sign: f64) -> RationalPotential {
    let r = sign * sqrt4s1(s);
    let d = poly(&[4.0 * s + 2.0, 2.0 * r, 1.0]);
    let lin = RationalT::new(poly(&[-8.0 * r, 8.0]), d.clone()).unwrap();
    let sq = RationalT::new(poly(&[0.0, -32.0]), &d * &d).unwrap();
    sum(&[
        RationalT::poly(poly(&[0.0, -(2.0 * s - 1.0), 0.0, 0.25])),
        pole(8.0 * s, 0.0, 1),
        lin,
        sq,
    ])
}

/// First-step potential built on the ground state.
pub fn printed_v1(s: f64) -> RationalPotential {
    let r = sqrt4s1(s);
    sum(&[
        RationalT::poly(poly(&[0.0, -2.0 * (s + 1.0), 0.0, 0.25])),
        pole(4.0 * s * s - 0.25, 0.0, 1),
        pole(4.0 * (1.0 + r), 1.0 - r, 1),
        pole(4.0 * (1.0 - r), -1.0 - r, 1),
        pole(8.0 * (1.0 - r), 1.0 - r, 2),
        pole(-8.0 * (1.0 + r), -1.0 - r, 2),
        rat(&[-8.0 * r], &[4.0 * s, 2.0 * r, 1.0]),
    ])
}

/// First-step potential built on the highest sector state.
pub fn printed_v1_type1(s: f64) -> RationalPotential {
    let r = sqrt4s1(s);
    sum(&[
        RationalT::poly(poly(&[0.0, -2.0 * (s + 1.0), 0.0, 0.25])),
        pole(4.0 * s * s - 0.25, 0.0, 1),
        pole(4.0 * (1.0 + r), r - 1.0, 1),
        pole(4.0 * (1.0 - r), r + 1.0, 1),
        pole(8.0 * (1.0 + r), r + 1.0, 2),
        pole(-8.0 * (1.0 - r), r - 1.0, 2),
        rat(&[8.0 * r], &[4.0 * s, -2.0 * r, 1.0]),
    ])
}

/// Final potential of the conjugate-pair construction on `(1/2, 2, 0)`.
pub fn printed_nu2() -> RationalPotential {
    let q = poly(&[20.0, 0.0, 4.0, 0.0, 1.0]);
    sum(&[
        RationalT::poly(poly(&[0.0, 1.0, 0.0, 0.25])),
        pole(0.75, 0.0, 1),
        RationalT::new(poly(&[0.0, -96.0, 0.0, 16.0]), q.clone()).unwrap(),
        RationalT::new(poly(&[0.0, 0.0, 0.0, -2048.0]), &q * &q).unwrap(),
    ])
}

/// Test points avoiding `x = √2` and `x = 2`.
pub fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.37) / n as f64)
        .collect()
}

pub fn max_grid_gap(a: &RationalPotential, b: &RationalPotential, xs: &[f64]) -> f64 {
    xs.iter()
        .map(|&x| {
            let (va, vb) = (a.eval(x).unwrap(), b.eval(x).unwrap());
            (va - vb).norm() / (1.0 + va.norm())
        })
        .fold(0.0, f64::max)
}
