use num_complex::Complex64;

use crate::qpoly::{QuasiWave, RationalT};
use crate::sextic::RationalPotential;

/// Positive real denominator roots `t* > 0` (the origin is excluded).
pub fn pole_scan(r: &RationalT) -> Vec<f64> {
    r.positive_real_poles()
}

/// True iff every canonical coefficient has `|Im c| < 1e−9·(1 + |c|)`.
pub fn realness_check(v: &RationalPotential) -> bool {
    v.rational().max_relative_imag() < 1e-9
}

/// True when `w̄ = −w`, i.e. the function is purely imaginary on the real
/// axis (the Wronskian of a conjugate pair has this property).
pub fn is_purely_imaginary(w: &QuasiWave) -> bool {
    if w.is_zero() {
        return true;
    }
    match w.add(&w.conj()) {
        Ok(sum) => sum.is_zero(),
        Err(_) => false,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Normalizability {
    pub normalizable: bool,
    /// `sigma ∈ (−1/2, 1/2]`: square integrable but singular derivative at
    /// the origin.
    pub weakly: bool,
    /// Positive real poles of the denominator, in `t`.
    pub poles: Vec<f64>,
    /// `∫ |f|² dx` over `[1e−3, 6]`.
    pub quadrature: f64,
    /// Share of that integral coming from `[1e−3, 1e−2]`; close to one when
    /// the origin is not integrable.
    pub origin_fraction: f64,
}

/// Normalizability on `(0, ∞)`. At infinity the quartic Gaussian always wins,
/// so the verdict is `sigma > −1/2` and no pole on the half line.
pub fn normalizability(f: &QuasiWave) -> Normalizability {
    let poles = f.den().factors().iter()
        .filter(|(r, _)| r.re > 1e-8 && r.im.abs() < 1e-8)
        .map(|(r, _)| r.re)
        .collect::<Vec<_>>();
    let origin_ok = f.sigma() > -0.5;
    let (quadrature, origin_fraction) = if poles.is_empty() && !f.is_zero() {
        let near = log_simpson(f, 1e-3, 1e-2);
        let far = log_simpson(f, 1e-2, 6.0);
        let total = near + far;
        (total, if total > 0.0 { near / total } else { 0.0 })
    } else {
        (f64::INFINITY, f64::NAN)
    };
    Normalizability {
        normalizable: origin_ok && poles.is_empty() && f.k() >= 1 && !f.is_zero(),
        weakly: origin_ok && f.sigma() <= 0.5,
        poles,
        quadrature,
        origin_fraction,
    }
}

pub fn normalizable(f: &QuasiWave) -> bool {
    normalizability(f).normalizable
}

/// Simpson's rule for `∫ |f|² dx` in the variable `u = ln x`.
fn log_simpson(f: &QuasiWave, lo: f64, hi: f64) -> f64 {
    let n = 2000;
    let (u0, u1) = (lo.ln(), hi.ln());
    let h = (u1 - u0) / n as f64;
    let g = |u: f64| {
        let x = u.exp();
        f.eval(x).map_or(f64::NAN, |v: Complex64| v.norm_sqr() * x)
    };
    let mut s = g(u0) + g(u1);
    for i in 1..n {
        s += g(u0 + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}
