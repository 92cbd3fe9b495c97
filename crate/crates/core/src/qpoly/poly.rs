//! Dense polynomials in `t = x²` with complex coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::roots;
use super::{NOISE_TOL, ZERO_TOL};
use crate::error::{Error, Result};

/// Dense polynomial `Σ c_n tⁿ`; index `n` holds the coefficient of `tⁿ`.
///
/// Canonical form has no trailing zero coefficients, so the zero polynomial
/// is the empty coefficient list.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PolyC {
    coeffs: Vec<Complex64>,
}

impl PolyC {
    /// Builds a polynomial, chopping coefficients below the zero tolerance
    /// relative to its own largest coefficient.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let reference = max_abs(&coeffs);
        Self::with_reference(coeffs, reference)
    }

    /// Builds a polynomial, treating as zero anything smaller than
    /// `ZERO_TOL * reference` in either real or imaginary part.
    pub fn with_reference(coeffs: Vec<Complex64>, reference: f64) -> Self {
        Self::with_reference_tol(coeffs, reference, ZERO_TOL)
    }

    pub fn with_reference_tol(mut coeffs: Vec<Complex64>, reference: f64, tol: f64) -> Self {
        assert!(
            coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()),
            "non-finite polynomial coefficient"
        );
        let cut = tol * reference;
        for c in coeffs.iter_mut() {
            if c.re.abs() <= cut {
                c.re = 0.0;
            }
            if c.im.abs() <= cut {
                c.im = 0.0;
            }
        }
        while coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Builds a polynomial from a computed result. A component is zeroed when
    /// it is below `ZERO_TOL` times the magnitude of the operands that produced
    /// that coefficient (`refs[i]`), or at rounding level relative to the
    /// largest of them.
    pub fn with_references(mut coeffs: Vec<Complex64>, refs: &[f64]) -> Self {
        let global = refs.iter().copied().fold(0.0, f64::max);
        for (c, r) in coeffs.iter_mut().zip(refs) {
            let cut = (ZERO_TOL * r).max(NOISE_TOL * global);
            if c.re.abs() <= cut {
                c.re = 0.0;
            }
            if c.im.abs() <= cut {
                c.im = 0.0;
            }
        }
        Self::exact(coeffs)
    }

    /// Builds a polynomial without any chopping beyond dropping exact
    /// trailing zeros.
    pub fn exact(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::exact(vec![c])
    }

    /// `c·tⁿ`
    pub fn monomial(c: Complex64, n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = c;
        Self::exact(coeffs)
    }

    /// The linear factor `t − r`.
    pub fn linear(root: Complex64) -> Self {
        Self::exact(vec![-root, Complex64::new(1.0, 0.0)])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Complex64> {
        self.coeffs.last().copied()
    }

    /// Coefficient of `tⁿ` (zero beyond the degree).
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.coeffs)
    }

    /// `Σ |c_n|·|t|ⁿ`, the natural scale of an evaluation at `t`.
    pub fn abs_eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c.norm())
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &c)| c * n as f64)
            .collect();
        Self::exact(coeffs)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return Self::zero();
        }
        Self::exact(self.coeffs.iter().map(|&x| x * c).collect())
    }

    pub fn conj(&self) -> Self {
        Self::exact(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Divides by the leading coefficient; the zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lead) => self.scale(lead.inv()),
            None => Self::zero(),
        }
    }

    /// Multiplication by `tⁿ`.
    pub fn shift_up(&self, n: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    /// Number of vanishing low-order coefficients (the order of the zero at
    /// `t = 0`).
    pub fn low_order_zeros(&self) -> usize {
        self.coeffs
            .iter()
            .take_while(|c| c.re == 0.0 && c.im == 0.0)
            .count()
    }

    /// Division by `tⁿ`, discarding the low coefficients.
    pub fn shift_down(&self, n: usize) -> Self {
        Self::exact(self.coeffs.iter().skip(n).copied().collect())
    }

    /// Synthetic division by `t − r`, returning quotient and remainder.
    pub fn div_linear(&self, root: Complex64) -> (Self, Complex64) {
        let (quot, _, rem) = self.deflate(root);
        (Self::exact(quot), rem)
    }

    /// Horner deflation: quotient coefficients, their absolute-value
    /// counterparts, and the remainder.
    pub(crate) fn deflate(&self, root: Complex64) -> (Vec<Complex64>, Vec<f64>, Complex64) {
        if self.coeffs.is_empty() {
            return (Vec::new(), Vec::new(), Complex64::new(0.0, 0.0));
        }
        let n = self.coeffs.len();
        let mut quot = vec![Complex64::new(0.0, 0.0); n - 1];
        let mut refs = vec![0.0; n - 1];
        let mut acc = Complex64::new(0.0, 0.0);
        let mut acc_abs = 0.0;
        for i in (0..n).rev() {
            acc = acc * root + self.coeffs[i];
            acc_abs = acc_abs * root.norm() + self.coeffs[i].norm();
            if i > 0 {
                quot[i - 1] = acc;
                refs[i - 1] = acc_abs;
            }
        }
        (quot, refs, acc)
    }

    /// Roots with multiplicity, sorted by (real part, imaginary part).
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        poly_roots(self)
    }

    /// Euclidean remainder-free comparison helper: largest coefficient
    /// difference relative to the larger operand.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let scale = self.max_abs().max(other.max_abs());
        if scale == 0.0 {
            return 0.0;
        }
        (0..n)
            .map(|i| (self.coeff(i) - other.coeff(i)).norm())
            .fold(0.0, f64::max)
            / scale
    }

    /// Largest `|Im c|` relative to `1 + |c|` over all coefficients.
    pub fn max_relative_imag(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.im.abs() / (1.0 + c.norm()))
            .fold(0.0, f64::max)
    }
}

fn max_abs(coeffs: &[Complex64]) -> f64 {
    coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `p + sign·q` with per-coefficient chopping.
pub(crate) fn combine(p: &PolyC, q: &PolyC, sign: f64) -> PolyC {
    let n = p.coeffs.len().max(q.coeffs.len());
    let coeffs = (0..n).map(|i| p.coeff(i) + q.coeff(i) * sign).collect();
    let refs: Vec<f64> = (0..n).map(|i| p.coeff(i).norm() + q.coeff(i).norm()).collect();
    PolyC::with_references(coeffs, &refs)
}

impl Add for &PolyC {
    type Output = PolyC;
    fn add(self, rhs: &PolyC) -> PolyC {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &PolyC {
    type Output = PolyC;
    fn sub(self, rhs: &PolyC) -> PolyC {
        combine(self, rhs, -1.0)
    }
}

impl Neg for &PolyC {
    type Output = PolyC;
    fn neg(self) -> PolyC {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &PolyC {
    type Output = PolyC;
    fn mul(self, rhs: &PolyC) -> PolyC {
        if self.is_zero() || rhs.is_zero() {
            return PolyC::zero();
        }
        let n = self.coeffs.len() + rhs.coeffs.len() - 1;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        let mut refs = vec![0.0; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
                refs[i + j] += a.norm() * b.norm();
            }
        }
        PolyC::with_references(coeffs, &refs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for PolyC {
            type Output = PolyC;
            fn $m(self, rhs: PolyC) -> PolyC {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for PolyC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate().rev() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            match n {
                0 => {}
                1 => write!(f, "·t")?,
                _ => write!(f, "·t^{n}")?,
            }
        }
        Ok(())
    }
}

/// Roots of a nonzero polynomial of degree ≥ 1, with multiplicity, sorted by
/// (real part, imaginary part).
pub fn poly_roots(p: &PolyC) -> Result<Vec<Complex64>> {
    match p.degree() {
        None => return Err(Error::Domain("roots of the zero polynomial".into())),
        Some(0) => return Err(Error::Domain("roots of a constant polynomial".into())),
        _ => {}
    }
    let zeros = p.low_order_zeros();
    let rest = p.shift_down(zeros);
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    if rest.degree().unwrap_or(0) > 0 {
        out.extend(roots::companion_roots(&rest)?);
    }
    sort_roots(&mut out);
    Ok(out)
}

/// Monic polynomial `Π (t − r_k)`.
pub fn roots_to_poly(roots: &[Complex64]) -> PolyC {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * r;
        }
        coeffs = next;
    }
    // Conjugate-closed root sets give real coefficients up to rounding.
    let reference = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let cut = 1e-14 * reference.max(1.0);
    if is_conjugate_closed(roots) {
        for c in coeffs.iter_mut() {
            if c.im.abs() <= cut {
                c.im = 0.0;
            }
        }
    }
    PolyC::exact(coeffs)
}

fn is_conjugate_closed(roots: &[Complex64]) -> bool {
    let mut used = vec![false; roots.len()];
    'outer: for (i, r) in roots.iter().enumerate() {
        if used[i] {
            continue;
        }
        let tol = 1e-12 * (1.0 + r.norm());
        if r.im.abs() <= tol {
            used[i] = true;
            continue;
        }
        for j in (i + 1)..roots.len() {
            if !used[j] && (roots[j] - r.conj()).norm() <= tol {
                used[i] = true;
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

pub(crate) fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}
