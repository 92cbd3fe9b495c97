//! Rational functions of `t = x²` with factored monic denominators.
//!
//! Denominators are kept as products of linear factors `Π (t − r_i)^{m_i}`.
//! A polynomial is rooted once when it first becomes a denominator; every
//! later operation (products, derivatives, common denominators) works on the
//! stored roots, so repeated factors never have to be recovered from an
//! expanded polynomial.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::poly::{combine, sort_roots, PolyC};
use super::roots::cluster_roots;
use super::{CLUSTER_TOL, ROOT_MATCH_TOL, SCREEN_TOL};
use crate::error::{Error, Result};

/// Monic polynomial stored by its distinct roots and multiplicities.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RootProduct {
    factors: Vec<(Complex64, u32)>,
}

fn roots_match(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= ROOT_MATCH_TOL * a.norm().max(1.0)
}


impl RootProduct {
    pub fn one() -> Self {
        Self::default()
    }

    /// Factors a polynomial (the leading coefficient is dropped).
    pub fn from_poly(p: &PolyC) -> Result<Self> {
        match p.degree() {
            None => Err(Error::Domain("zero denominator".into())),
            Some(0) => Ok(Self::one()),
            Some(_) => {
                let roots = p.roots()?;
                Ok(Self::from_roots(&roots))
            }
        }
    }

    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut out = Self::one();
        for (r, m) in cluster_roots(roots, CLUSTER_TOL) {
            out.push(r, m);
        }
        out
    }

    pub fn from_factors(factors: &[(Complex64, u32)]) -> Self {
        let mut out = Self::one();
        for &(r, m) in factors {
            out.push(r, m);
        }
        out
    }

    fn push(&mut self, root: Complex64, mult: u32) {
        if mult == 0 {
            return;
        }
        match self.factors.iter_mut().find(|(r, _)| roots_match(*r, root)) {
            Some((_, m)) => *m += mult,
            None => self.factors.push((root, mult)),
        }
    }

    pub fn factors(&self) -> &[(Complex64, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(|&(_, m)| m as usize).sum()
    }

    pub fn multiplicity_of(&self, root: Complex64) -> u32 {
        self.factors
            .iter()
            .find(|(r, _)| roots_match(*r, root))
            .map_or(0, |&(_, m)| m)
    }

    /// Roots with multiplicity, sorted.
    pub fn roots(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self
            .factors
            .iter()
            .flat_map(|&(r, m)| std::iter::repeat(r).take(m as usize))
            .collect();
        sort_roots(&mut out);
        out
    }

    pub fn expand(&self) -> PolyC {
        let mut p = PolyC::one();
        for &(r, m) in &self.factors {
            for _ in 0..m {
                p = mul_linear(&p, r);
            }
        }
        p
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.factors
            .iter()
            .map(|&(r, m)| (t - r).powu(m))
            .product()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for &(r, m) in &other.factors {
            out.push(r, m);
        }
        out
    }

    /// Least common multiple together with the cofactors `lcm/self`,
    /// `lcm/other`.
    pub fn lcm(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for &(r, m) in &other.factors {
            match out.factors.iter_mut().find(|(x, _)| roots_match(*x, r)) {
                Some((_, mm)) => *mm = (*mm).max(m),
                None => out.factors.push((r, m)),
            }
        }
        out
    }

    /// `self / other`, assuming `other` divides `self`.
    pub fn cofactor(&self, other: &Self) -> PolyC {
        let mut p = PolyC::one();
        for &(r, m) in &self.factors {
            let mo = other.multiplicity_of(r);
            debug_assert!(mo <= m);
            for _ in 0..m.saturating_sub(mo) {
                p = mul_linear(&p, r);
            }
        }
        p
    }

    /// Product of the distinct linear factors.
    pub fn radical(&self) -> Self {
        Self {
            factors: self.factors.iter().map(|&(r, _)| (r, 1)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            factors: self.factors.iter().map(|&(r, m)| (r.conj(), m)).collect(),
        }
    }

    /// Removes `count` copies of the factor at `root` (saturating).
    pub fn remove(&mut self, root: Complex64, count: u32) {
        if let Some(pos) = self.factors.iter().position(|(r, _)| roots_match(*r, root)) {
            let m = &mut self.factors[pos].1;
            *m = m.saturating_sub(count);
            if *m == 0 {
                self.factors.remove(pos);
            }
        }
    }

    /// Multiplicity of the root at `t = 0`.
    pub fn zero_multiplicity(&self) -> u32 {
        self.factors
            .iter()
            .find(|(r, _)| r.norm() <= ROOT_MATCH_TOL)
            .map_or(0, |&(_, m)| m)
    }
}

fn mul_linear(p: &PolyC, root: Complex64) -> PolyC {
    let c = p.coeffs();
    let mut out = vec![Complex64::new(0.0, 0.0); c.len() + 1];
    for (i, &x) in c.iter().enumerate() {
        out[i + 1] += x;
        out[i] -= x * root;
    }
    PolyC::exact(out)
}

/// Rational function `num(t)/den(t)` with monic factored denominator.
///
/// Canonical values share no root between numerator and denominator (up to
/// the root-matching tolerance); the zero function has denominator 1.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RationalT {
    num: PolyC,
    den: RootProduct,
}

impl RationalT {
    /// Simplifies `num/den`, cancelling common roots.
    pub fn new(num: PolyC, den: PolyC) -> Result<Self> {
        let lead = den
            .leading()
            .ok_or_else(|| Error::Domain("rational function with zero denominator".into()))?;
        let num = num.scale(lead.inv());
        let den = RootProduct::from_poly(&den)?;
        Ok(Self::from_parts(num, den))
    }

    /// Builds from an already-factored denominator, cancelling common roots.
    pub fn from_parts(num: PolyC, den: RootProduct) -> Self {
        let mut r = Self { num, den };
        r.reduce();
        r
    }

    pub fn poly(p: PolyC) -> Self {
        Self {
            num: p,
            den: RootProduct::one(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::poly(PolyC::constant(c))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `c / (t − r)^m`
    pub fn pole(c: Complex64, root: Complex64, mult: u32) -> Self {
        Self::from_parts(PolyC::constant(c), RootProduct::from_factors(&[(root, mult)]))
    }

    pub fn num(&self) -> &PolyC {
        &self.num
    }

    pub fn den(&self) -> &RootProduct {
        &self.den
    }

    /// Expanded monic denominator.
    pub fn den_poly(&self) -> PolyC {
        self.den.expand()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancels numerator roots that match denominator roots.
    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = RootProduct::one();
            return;
        }
        let mut num_roots: Option<Vec<(Complex64, u32)>> = None;
        let factors = self.den.factors.clone();
        for (root, mult) in factors {
            let value = self.num.eval(root).norm();
            if value > SCREEN_TOL * self.num.abs_eval(root.norm()) {
                continue;
            }
            let roots = match &mut num_roots {
                Some(r) => r,
                None => num_roots.insert(numerator_roots(&self.num)),
            };
            let Some(entry) = roots.iter_mut().find(|(r, m)| *m > 0 && roots_match(*r, root)) else {
                continue;
            };
            let count = entry.1.min(mult);
            entry.1 -= count;
            for _ in 0..count {
                let (quot, refs, _) = self.num.deflate(root);
                self.num = PolyC::with_references(quot, &refs);
            }
            self.den.remove(root, count);
        }
    }

    /// Re-runs cancellation with the default tolerances; idempotent on
    /// canonical values.
    pub fn simplify(&self) -> Self {
        Self::from_parts(self.num.clone(), self.den.clone())
    }

    pub fn eval(&self, t: Complex64) -> Result<Complex64> {
        if let Some(&(r, _)) = self.den.factors.iter().find(|(r, _)| roots_match(*r, t)) {
            return Err(Error::Pole { location: r });
        }
        Ok(self.num.eval(t) / self.den.eval(t))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return Self::zero();
        }
        Self {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            num: self.num.conj(),
            den: self.den.conj(),
        }
    }

    /// Multiplication by `tⁿ`.
    pub fn shift_up(&self, n: u32) -> Self {
        Self::from_parts(self.num.shift_up(n as usize), self.den.clone())
    }

    /// Division by `tⁿ`.
    pub fn shift_down(&self, n: u32) -> Self {
        Self::from_parts(
            self.num.clone(),
            self.den.mul(&RootProduct::from_factors(&[(Complex64::new(0.0, 0.0), n)])),
        )
    }

    /// d/dt. Differentiation never cancels a denominator root, so the
    /// result is built without a cancellation pass.
    pub fn derivative(&self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        let (num, den) = self.derivative_parts();
        Self { num, den }
    }

    /// `(N'·Q − N·Σ m_i Q/(t − r_i), D·Q)` with `Q` the product of the
    /// distinct denominator factors; `(N/D)' = first/second`.
    pub(crate) fn derivative_parts(&self) -> (PolyC, RootProduct) {
        let q = self.den.radical();
        let q_poly = q.expand();
        let mut sum = PolyC::zero();
        for (i, &(_, m)) in self.den.factors.iter().enumerate() {
            let others = RootProduct {
                factors: self
                    .den
                    .factors
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &(r, _))| (r, 1))
                    .collect(),
            };
            sum = &sum + &others.expand().scale(Complex64::new(m as f64, 0.0));
        }
        let num = &(&self.num.derivative() * &q_poly) - &(&self.num * &sum);
        (num, self.den.mul(&q))
    }

    /// `num/den` as given, without a cancellation pass.
    pub(crate) fn from_parts_unreduced(num: PolyC, den: RootProduct) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        Self { num, den }
    }

    pub fn recip(&self) -> Result<Self> {
        let lead = self
            .num
            .leading()
            .ok_or_else(|| Error::Domain("reciprocal of the zero function".into()))?;
        let den = RootProduct::from_poly(&self.num)?;
        let num = self.den.expand().scale(lead.inv());
        Ok(Self::from_parts(num, den))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    /// Numerators of several rationals rewritten over their common
    /// denominator, without any cancellation.
    pub fn align(items: &[&RationalT]) -> (RootProduct, Vec<PolyC>) {
        let lcm = items
            .iter()
            .fold(RootProduct::one(), |acc, r| acc.lcm(&r.den));
        let nums = items
            .iter()
            .map(|r| PolyC::exact((&r.num * &lcm.cofactor(&r.den)).into_coeffs()))
            .collect();
        (lcm, nums)
    }

    /// Largest coefficient of `self − other` over a common denominator,
    /// relative to the larger of the two aligned numerators.
    pub fn relative_mismatch(&self, other: &Self) -> f64 {
        let (_, nums) = Self::align(&[self, other]);
        let reference = nums[0].max_abs().max(nums[1].max_abs());
        if reference == 0.0 {
            return 0.0;
        }
        let n = nums[0].coeffs().len().max(nums[1].coeffs().len());
        (0..n)
            .map(|i| (nums[0].coeff(i) - nums[1].coeff(i)).norm())
            .fold(0.0, f64::max)
            / reference
    }

    /// True when both are equal coefficient-wise over a common denominator
    /// within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.relative_mismatch(other) <= tol
    }

    /// Residue-like coefficient of `1/t`: the value of `t·r(t)` at `t = 0`
    /// when the pole at the origin is simple, zero when there is none.
    pub fn simple_pole_at_origin(&self) -> Result<Complex64> {
        match self.den.zero_multiplicity() {
            0 => Ok(Complex64::new(0.0, 0.0)),
            1 => {
                let mut rest = self.den.clone();
                rest.remove(Complex64::new(0.0, 0.0), 1);
                Ok(self.num.coeff(0) / rest.eval(Complex64::new(0.0, 0.0)))
            }
            m => Err(Error::Domain(format!("pole of order {m} at the origin"))),
        }
    }

    /// Denominator roots (with multiplicity) that lie on the positive real
    /// axis, excluding the origin.
    pub fn positive_real_poles(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .den
            .factors
            .iter()
            .filter(|(r, _)| r.re > 1e-8 && r.im.abs() < 1e-8)
            .map(|(r, _)| r.re)
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// Largest `|Im c|/(1 + |c|)` over numerator and expanded denominator.
    pub fn max_relative_imag(&self) -> f64 {
        let num = self.num.scale(Complex64::new(1.0 / self.num.max_abs().max(f64::MIN_POSITIVE), 0.0));
        num.max_relative_imag().max(self.den_poly().max_relative_imag())
    }
}

/// Clustered roots of a numerator, with multiplicity.
fn numerator_roots(num: &PolyC) -> Vec<(Complex64, u32)> {
    if num.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    match num.roots() {
        Ok(roots) => cluster_roots(&roots, CLUSTER_TOL),
        Err(_) => Vec::new(),
    }
}

fn add_impl(p: &RationalT, q: &RationalT, sign: f64) -> RationalT {
    if q.is_zero() {
        return p.clone();
    }
    if p.is_zero() {
        return q.scale(Complex64::new(sign, 0.0));
    }
    let lcm = p.den.lcm(&q.den);
    let a = &p.num * &lcm.cofactor(&p.den);
    let b = &q.num * &lcm.cofactor(&q.den);
    RationalT::from_parts(combine(&a, &b, sign), lcm)
}

impl Add for &RationalT {
    type Output = RationalT;
    fn add(self, rhs: &RationalT) -> RationalT {
        add_impl(self, rhs, 1.0)
    }
}

impl Sub for &RationalT {
    type Output = RationalT;
    fn sub(self, rhs: &RationalT) -> RationalT {
        add_impl(self, rhs, -1.0)
    }
}

impl Neg for &RationalT {
    type Output = RationalT;
    fn neg(self) -> RationalT {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &RationalT {
    type Output = RationalT;
    fn mul(self, rhs: &RationalT) -> RationalT {
        if self.is_zero() || rhs.is_zero() {
            return RationalT::zero();
        }
        RationalT::from_parts(&self.num * &rhs.num, self.den.mul(&rhs.den))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalT {
            type Output = RationalT;
            fn $m(self, rhs: RationalT) -> RationalT {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Cancels common factors of `num/den` by matching roots.
pub fn rat_simplify(r: &RationalT) -> RationalT {
    r.simplify()
}
