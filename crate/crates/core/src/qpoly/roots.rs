//! Companion-matrix polynomial rooting and root clustering.

use num_complex::Complex64;

use super::poly::{sort_roots, PolyC};
use super::CLUSTER_TOL;
use crate::error::Result;
use crate::linalg::{hessenberg_eigenvalues, Matrix};

/// Roots of a polynomial with nonzero constant term, as eigenvalues of its
/// companion matrix, each polished by a few Newton steps.
pub(crate) fn companion_roots(p: &PolyC) -> Result<Vec<Complex64>> {
    let monic = p.monic();
    let n = monic.degree().unwrap_or(0);
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![-monic.coeff(0)]);
    }
    let mut companion = Matrix::zeros(n);
    for j in 0..n {
        companion.set(0, j, -monic.coeff(n - 1 - j));
    }
    for i in 1..n {
        companion.set(i, i - 1, Complex64::new(1.0, 0.0));
    }
    let raw = hessenberg_eigenvalues(&companion)?;
    let mut roots = Vec::with_capacity(n);
    for (center, m) in cluster_roots(&raw, CLUSTER_TOL) {
        // A root of multiplicity m is simple for the (m−1)-th derivative.
        let mut q = monic.clone();
        for _ in 1..m {
            q = q.derivative();
        }
        let z = newton_polish(&q, &q.derivative(), center);
        roots.extend(std::iter::repeat(z).take(m as usize));
    }
    sort_roots(&mut roots);
    Ok(roots)
}

fn newton_polish(p: &PolyC, dp: &PolyC, mut z: Complex64) -> Complex64 {
    let mut best = p.eval(z).norm();
    for _ in 0..4 {
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - p.eval(z) / d;
        let val = p.eval(next).norm();
        if val < best {
            best = val;
            z = next;
        } else {
            break;
        }
    }
    z
}

/// Groups roots that lie within `tol·max(1, |r|)` of each other; each
/// cluster is replaced by its mean and its size. Multiple roots split by
/// rounding (≈ ε^{1/m}) are merged back this way.
pub fn cluster_roots(roots: &[Complex64], tol: f64) -> Vec<(Complex64, u32)> {
    let mut out: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    for &r in roots {
        match out
            .iter_mut()
            .find(|(center, _)| (*center - r).norm() <= tol * center.norm().max(1.0))
        {
            Some((center, members)) => {
                members.push(r);
                *center = members.iter().sum::<Complex64>() / members.len() as f64;
            }
            None => out.push((r, vec![r])),
        }
    }
    out.into_iter()
        .map(|(center, members)| (center, members.len() as u32))
        .collect()
}
