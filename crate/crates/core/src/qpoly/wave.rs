//! Quasi-polynomial wavefunctions `c·exp(−k·a·x⁴/4)·x^σ·N(x²)/D(x²)`.

use num_complex::Complex64;

use super::poly::{combine, PolyC};
use super::rational::{RationalT, RootProduct};
use super::roots::cluster_roots;
use super::CLUSTER_TOL;
use crate::error::{Error, Result};

const SIGMA_TOL: f64 = 1e-9;

/// Closed-form function `scale·exp(−k·a·x⁴/4)·x^sigma·num(x²)/den(x²)`.
///
/// Canonical form: `num` monic with `num(0) ≠ 0`, `den` monic with
/// `den(0) ≠ 0` (every power of `x` at the origin lives in `sigma`), and
/// `num`, `den` coprime. The zero function has `scale = 0` and empty `num`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiWave {
    scale: Complex64,
    a: f64,
    k: u32,
    sigma: f64,
    num: PolyC,
    den: RootProduct,
}

impl QuasiWave {
    pub fn new(scale: Complex64, a: f64, k: u32, sigma: f64, num: PolyC, den: PolyC) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("stiffness must be positive, got {a}")));
        }
        let rat = RationalT::new(num, den)?;
        Ok(Self::from_rational(scale, a, k, sigma, rat))
    }

    /// `exp(−k·a·x⁴/4)·x^sigma·poly(x²)`
    pub fn from_poly(a: f64, k: u32, sigma: f64, poly: PolyC) -> Self {
        Self::from_rational(Complex64::new(1.0, 0.0), a, k, sigma, RationalT::poly(poly))
    }

    pub fn from_rational(scale: Complex64, a: f64, k: u32, sigma: f64, rat: RationalT) -> Self {
        if rat.is_zero() || scale == Complex64::new(0.0, 0.0) {
            return Self::zero(a, k);
        }
        let mut sigma = sigma;
        let mut num = rat.num().clone();
        let zeros = num.low_order_zeros();
        if zeros > 0 {
            num = num.shift_down(zeros);
            sigma += 2.0 * zeros as f64;
        }
        let mut den = rat.den().clone();
        let origin = den.zero_multiplicity();
        if origin > 0 {
            den.remove(Complex64::new(0.0, 0.0), origin);
            sigma -= 2.0 * origin as f64;
        }
        let lead = num.leading().expect("nonzero numerator");
        Self {
            scale: scale * lead,
            a,
            k,
            sigma,
            num: num.monic(),
            den,
        }
    }

    pub fn zero(a: f64, k: u32) -> Self {
        Self {
            scale: Complex64::new(0.0, 0.0),
            a,
            k,
            sigma: 0.0,
            num: PolyC::zero(),
            den: RootProduct::one(),
        }
    }

    pub fn scale(&self) -> Complex64 {
        self.scale
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn num(&self) -> &PolyC {
        &self.num
    }
    pub fn den(&self) -> &RootProduct {
        &self.den
    }
    pub fn den_poly(&self) -> PolyC {
        self.den.expand()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `scale·num/den` as a rational function of `t`.
    pub fn rational(&self) -> RationalT {
        RationalT::from_parts(self.num.scale(self.scale), self.den.clone())
    }

    /// Same function with a new overall constant.
    pub fn with_scale(&self, scale: Complex64) -> Self {
        let mut out = self.clone();
        if out.is_zero() {
            return out;
        }
        if scale == Complex64::new(0.0, 0.0) {
            return Self::zero(self.a, self.k);
        }
        out.scale = scale;
        out
    }

    pub fn scaled_by(&self, c: Complex64) -> Self {
        self.with_scale(self.scale * c)
    }

    pub fn conj(&self) -> Self {
        Self {
            scale: self.scale.conj(),
            a: self.a,
            k: self.k,
            sigma: self.sigma,
            num: self.num.conj(),
            den: self.den.conj(),
        }
    }

    fn check_same_a(&self, other: &Self) -> Result<()> {
        if (self.a - other.a).abs() > 1e-12 * self.a.abs().max(other.a.abs()) {
            return Err(Error::Domain(format!(
                "mismatched stiffness: {} vs {}",
                self.a, other.a
            )));
        }
        Ok(())
    }

    /// d/dx, exact: the result has the same `a` and `k` and
    /// `sigma − 1` before canonicalization.
    pub fn derivative(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        // f' = c·e·x^{σ−1}·[(σ − k·a·t²)·R + 2t·R'(t)]
        // No cancellation is possible: every denominator root is nonzero and
        // gains one order.
        let r = RationalT::from_parts_unreduced(self.num.clone(), self.den.clone());
        let (d_num, d_den) = r.derivative_parts();
        let q = d_den.cofactor(&self.den);
        let outer = PolyC::from_real(&[self.sigma, 0.0, -(self.k as f64) * self.a]);
        let inner = PolyC::from_real(&[0.0, 2.0]);
        let num = &(&(&outer * &self.num) * &q) + &(&inner * &d_num);
        let body = RationalT::from_parts_unreduced(num, d_den);
        Self::from_rational(self.scale, self.a, self.k, self.sigma - 1.0, body)
    }

    /// Multiplication by `x^{x_power}·r(x²)`.
    pub fn mul_rational(&self, r: &RationalT, x_power: i32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let body = &self.rational() * r;
        Self::from_rational(
            Complex64::new(1.0, 0.0),
            self.a,
            self.k,
            self.sigma + x_power as f64,
            body,
        )
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_a(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.a, self.k + other.k));
        }
        let body = &self.rational() * &other.rational();
        Ok(Self::from_rational(
            Complex64::new(1.0, 0.0),
            self.a,
            self.k + other.k,
            self.sigma + other.sigma,
            body,
        ))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_same_a(other)?;
        if other.is_zero() {
            return Err(Error::Domain("division by the zero function".into()));
        }
        let k = self.k.checked_sub(other.k).ok_or_else(|| {
            Error::Domain("quotient would grow like exp(+a·x⁴)".into())
        })?;
        if self.is_zero() {
            return Ok(Self::zero(self.a, k));
        }
        let body = self.rational().div(&other.rational())?;
        Ok(Self::from_rational(
            Complex64::new(1.0, 0.0),
            self.a,
            k,
            self.sigma - other.sigma,
            body,
        ))
    }

    /// Numerators of several waves rewritten over a common `x`-power and a
    /// common denominator, without cancellation. Returns the base sigma and
    /// the aligned numerators.
    pub(crate) fn align(items: &[&QuasiWave]) -> Result<(f64, RootProduct, Vec<PolyC>)> {
        let live: Vec<&&QuasiWave> = items.iter().filter(|w| !w.is_zero()).collect();
        let Some(first) = live.first() else {
            return Ok((0.0, RootProduct::one(), vec![PolyC::zero(); items.len()]));
        };
        for w in &live {
            first.check_same_a(w)?;
            if w.k != first.k {
                return Err(Error::Domain(format!(
                    "mismatched exponential multiplicity: {} vs {}",
                    first.k, w.k
                )));
            }
        }
        let base = live.iter().map(|w| w.sigma).fold(f64::INFINITY, f64::min);
        let mut shifted = Vec::with_capacity(items.len());
        for w in items {
            if w.is_zero() {
                shifted.push(RationalT::zero());
                continue;
            }
            let steps = (w.sigma - base) / 2.0;
            if (steps - steps.round()).abs() > SIGMA_TOL {
                return Err(Error::Domain(format!(
                    "x-powers {} and {} differ by a non-even amount",
                    w.sigma, base
                )));
            }
            shifted.push(RationalT::from_parts(
                w.num.scale(w.scale).shift_up(steps.round() as usize),
                w.den.clone(),
            ));
        }
        let refs: Vec<&RationalT> = shifted.iter().collect();
        let (lcm, nums) = RationalT::align(&refs);
        Ok((base, lcm, nums))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_a(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let (base, lcm, nums) = Self::align(&[self, other])?;
        let body = RationalT::from_parts(combine(&nums[0], &nums[1], 1.0), lcm);
        Ok(Self::from_rational(Complex64::new(1.0, 0.0), self.a, self.k, base, body))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled_by(Complex64::new(-1.0, 0.0)))
    }

    /// Value at a real point `x > 0` (or any `x` when sigma is an integer).
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        self.eval_complex(Complex64::new(x, 0.0))
    }

    /// Value at complex `x`, using the principal branch of `x^sigma`.
    pub fn eval_complex(&self, x: Complex64) -> Result<Complex64> {
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if x.norm() == 0.0 {
            if self.sigma > 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            if self.sigma < 0.0 {
                return Err(Error::Pole { location: Complex64::new(0.0, 0.0) });
            }
        }
        let t = x * x;
        let r = RationalT::from_parts(self.num.clone(), self.den.clone()).eval(t)?;
        let gauss = (-(self.k as f64) * self.a * t * t / 4.0).exp();
        let power = if self.sigma == self.sigma.round() && self.sigma.abs() < 64.0 {
            x.powi(self.sigma as i32)
        } else {
            x.powf(self.sigma)
        };
        Ok(self.scale * gauss * power * r)
    }

    /// True when both describe the same function up to a constant factor.
    pub fn proportional_to(&self, other: &Self, tol: f64) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        self.k == other.k
            && (self.a - other.a).abs() <= 1e-12 * self.a
            && (self.sigma - other.sigma).abs() <= SIGMA_TOL
            && self.num.relative_distance(&other.num) <= tol
            && self.den_poly().relative_distance(&other.den_poly()) <= tol
    }
}

/// `W(x) = x·g(x²)`, the form taken by `−(ln f)′` of every quasi-polynomial
/// wave.
#[derive(Clone, Debug, PartialEq)]
pub struct Superpotential {
    pub g: RationalT,
}

impl Superpotential {
    pub fn new(g: RationalT) -> Self {
        Self { g }
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        Ok(self.g.eval(Complex64::new(x * x, 0.0))? * x)
    }

    /// `dW/dx = g + 2t·g'(t)` as a function of `t`.
    pub fn derivative_t(&self) -> RationalT {
        let two_t = RationalT::poly(PolyC::from_real(&[0.0, 2.0]));
        &self.g + &(&two_t * &self.g.derivative())
    }

    /// `W² = t·g²` as a function of `t`.
    pub fn square_t(&self) -> RationalT {
        let t = RationalT::poly(PolyC::from_real(&[0.0, 1.0]));
        &t * &(&self.g * &self.g)
    }

    pub fn conj(&self) -> Self {
        Self { g: self.g.conj() }
    }
}

/// `W = −f′/f` written as `x·g(x²)`.
pub fn qw_log_derivative(f: &QuasiWave) -> Result<Superpotential> {
    if f.is_zero() {
        return Err(Error::Domain("logarithmic derivative of the zero function".into()));
    }
    // −f′/f = k·a·x³ − σ/x − 2x·N′/N + 2x·D′/D
    let mut g = &RationalT::poly(PolyC::from_real(&[0.0, f.k as f64 * f.a]))
        + &RationalT::pole(Complex64::new(-f.sigma, 0.0), Complex64::new(0.0, 0.0), 1);
    if f.num.degree().unwrap_or(0) > 0 {
        let roots = f.num.roots()?;
        for (r, m) in cluster_roots(&roots, CLUSTER_TOL) {
            g = &g + &RationalT::pole(Complex64::new(-2.0 * m as f64, 0.0), r, 1);
        }
    }
    for &(r, m) in f.den.factors() {
        g = &g + &RationalT::pole(Complex64::new(2.0 * m as f64, 0.0), r, 1);
    }
    Ok(Superpotential::new(g))
}

pub fn qw_derivative(f: &QuasiWave) -> QuasiWave {
    f.derivative()
}

/// `W(f, g) = f·g′ − f′·g`
pub fn qw_wronskian2(f: &QuasiWave, g: &QuasiWave) -> Result<QuasiWave> {
    f.check_same_a(g)?;
    let lhs = f.mul(&g.derivative())?;
    let rhs = f.derivative().mul(g)?;
    lhs.sub(&rhs)
}

/// 3×3 Wronskian determinant of `(f, g, h)`.
pub fn qw_wronskian3(f: &QuasiWave, g: &QuasiWave, h: &QuasiWave) -> Result<QuasiWave> {
    f.check_same_a(g)?;
    f.check_same_a(h)?;
    let (f1, g1, h1) = (f.derivative(), g.derivative(), h.derivative());
    let (f2, g2, h2) = (f1.derivative(), g1.derivative(), h1.derivative());
    let minor = |p1: &QuasiWave, q2: &QuasiWave, q1: &QuasiWave, p2: &QuasiWave| -> Result<QuasiWave> {
        p1.mul(q2)?.sub(&q1.mul(p2)?)
    };
    let a = f.mul(&minor(&g1, &h2, &h1, &g2)?)?;
    let b = g.mul(&minor(&f1, &h2, &h1, &f2)?)?;
    let c = h.mul(&minor(&f1, &g2, &g1, &f2)?)?;
    a.sub(&b)?.add(&c)
}

pub fn qw_eval(f: &QuasiWave, x: f64) -> Result<Complex64> {
    f.eval(x)
}

pub fn rat_eval(r: &RationalT, t: Complex64) -> Result<Complex64> {
    r.eval(t)
}
