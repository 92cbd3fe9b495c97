use num_complex::Complex64;

use crate::darboux::{DarbouxOperator, FirstOrderOp};
use crate::error::Result;
use crate::qpoly::{PolyC, QuasiWave, RationalT};
use crate::sextic::RationalPotential;

/// Normalized residual tolerance for exact-algebra checks.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualReport {
    /// Largest coefficient of the residual numerator, normalized.
    pub max_norm_coeff: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn from_value(max_norm_coeff: f64, tol: f64) -> Self {
        Self {
            max_norm_coeff,
            pass: max_norm_coeff.is_finite() && max_norm_coeff < tol,
        }
    }
}

/// Sum `Σ c_i·w_i` over a common x-power and denominator, returned as
/// (largest coefficient of the sum, largest coefficient of each term).
fn combination(terms: &[(Complex64, &QuasiWave)]) -> Result<(f64, Vec<f64>)> {
    let waves: Vec<&QuasiWave> = terms.iter().map(|(_, w)| *w).collect();
    let (_, _, nums) = QuasiWave::align(&waves)?;
    let len = nums.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    let scaled: Vec<PolyC> = nums
        .iter()
        .zip(terms)
        .map(|(p, (c, _))| p.scale(*c))
        .collect();
    let sum_max = (0..len)
        .map(|i| scaled.iter().map(|p| p.coeff(i)).sum::<Complex64>().norm())
        .fold(0.0, f64::max);
    Ok((sum_max, scaled.iter().map(|p| p.max_abs()).collect()))
}

/// `−f″ + V·f`
pub fn hamiltonian_apply(v: &RationalPotential, f: &QuasiWave) -> Result<QuasiWave> {
    let kinetic = f.derivative().derivative().scaled_by(Complex64::new(-1.0, 0.0));
    kinetic.add(&f.mul_rational(v.rational(), 0))
}

/// Exact residual of `(−d²/dx² + V − E) f` in the closed algebra.
pub fn residual(v: &RationalPotential, energy: Complex64, f: &QuasiWave) -> ResidualReport {
    residual_with_tol(v, energy, f, RESIDUAL_TOL)
}

pub fn residual_with_tol(
    v: &RationalPotential,
    energy: Complex64,
    f: &QuasiWave,
    tol: f64,
) -> ResidualReport {
    if f.is_zero() {
        return ResidualReport::from_value(f64::NAN, tol);
    }
    let f2 = f.derivative().derivative();
    let vf = f.mul_rational(v.rational(), 0);
    let terms = [
        (Complex64::new(-1.0, 0.0), &f2),
        (Complex64::new(1.0, 0.0), &vf),
        (-energy, f),
    ];
    match combination(&terms) {
        Ok((sum, maxima)) => {
            let reference = if maxima[1] > 0.0 {
                maxima[1]
            } else {
                maxima.iter().copied().fold(0.0, f64::max)
            };
            ResidualReport::from_value(sum / reference, tol)
        }
        Err(_) => ResidualReport::from_value(f64::INFINITY, tol),
    }
}

/// Sampled counterpart of [`residual`]: the largest
/// `|(−f″ + V f − E f)(x)| / max(1, |V f|(x))` over the given points.
pub fn sampled_residual(
    v: &RationalPotential,
    energy: Complex64,
    f: &QuasiWave,
    xs: &[f64],
) -> Result<f64> {
    let f2 = f.derivative().derivative();
    let mut worst: f64 = 0.0;
    for &x in xs {
        let fx = f.eval(x)?;
        let vfx = v.eval(x)? * fx;
        let r = -f2.eval(x)? + vfx - energy * fx;
        worst = worst.max(r.norm() / vfx.norm().max(1.0));
    }
    Ok(worst)
}

/// `L(H_in f) − H_out(L f)` computed exactly; zero when `L` intertwines the
/// two Hamiltonians. Normalized by the largest of the four terms
/// `L f″`, `L(V_in f)`, `(L f)″`, `V_out·L f`.
pub fn intertwine_check<O: DarbouxOperator + ?Sized>(
    op: &O,
    v_in: &RationalPotential,
    v_out: &RationalPotential,
    f: &QuasiWave,
) -> Result<ResidualReport> {
    let l_f2 = op.apply(&f.derivative().derivative())?;
    let l_vf = op.apply(&f.mul_rational(v_in.rational(), 0))?;
    let lf = op.apply(f)?;
    let lf2 = lf.derivative().derivative();
    let v_lf = lf.mul_rational(v_out.rational(), 0);
    let pieces = [&l_f2, &l_vf, &lf2, &v_lf];
    if pieces.iter().all(|w| w.is_zero()) {
        return Ok(ResidualReport::from_value(0.0, RESIDUAL_TOL));
    }
    let one = Complex64::new(1.0, 0.0);
    let (sum, maxima) = combination(&[(-one, &l_f2), (one, &l_vf), (one, &lf2), (-one, &v_lf)])?;
    let reference = maxima.iter().copied().fold(0.0, f64::max);
    Ok(ResidualReport::from_value(sum / reference, RESIDUAL_TOL))
}

/// Checks `V0 = W² − W′ + α` and `V1 = W² + W′ + α` as rational identities;
/// reports the worse of the two.
pub fn factorization_check(
    op: &FirstOrderOp,
    v0: &RationalPotential,
    v1: &RationalPotential,
) -> ResidualReport {
    let (minus, plus) = factorized_potentials(op);
    let worst = v0
        .rational()
        .relative_mismatch(&minus)
        .max(v1.rational().relative_mismatch(&plus));
    ResidualReport::from_value(worst, RESIDUAL_TOL)
}

/// `(W² − W′ + α, W² + W′ + α)` as functions of `t`.
pub fn factorized_potentials(op: &FirstOrderOp) -> (RationalT, RationalT) {
    let sq = op.w.square_t();
    let d = op.w.derivative_t();
    let alpha = RationalT::constant(op.alpha);
    (&(&sq - &d) + &alpha, &(&sq + &d) + &alpha)
}

/// Grid version of [`factorization_check`]:
/// `max |V − (W² ∓ W′ + α)| / (1 + |V|)` over the given points.
pub fn factorization_grid_check(
    op: &FirstOrderOp,
    v0: &RationalPotential,
    v1: &RationalPotential,
    xs: &[f64],
) -> Result<f64> {
    let (minus, plus) = factorized_potentials(op);
    let mut worst: f64 = 0.0;
    for &x in xs {
        let t = Complex64::new(x * x, 0.0);
        let a = v0.eval(x)?;
        let b = v1.eval(x)?;
        worst = worst.max((a - minus.eval(t)?).norm() / (1.0 + a.norm()));
        worst = worst.max((b - plus.eval(t)?).norm() / (1.0 + b.norm()));
    }
    Ok(worst)
}
