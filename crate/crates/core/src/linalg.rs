//! Small dense complex linear algebra: Hessenberg QR eigenvalues and null
//! spaces. Matrices here never exceed a few dozen rows.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    fn at(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_upper_hessenberg(&self) -> bool {
        (0..self.n).all(|i| (0..i.saturating_sub(1)).all(|j| self.get(i, j) == Complex64::new(0.0, 0.0)))
    }

    /// `self − shift·I`
    pub fn shifted(&self, shift: Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            *out.at(i, i) -= shift;
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues of an upper Hessenberg matrix by shifted complex QR with
/// Wilkinson shifts and diagonal balancing.
pub fn hessenberg_eigenvalues(mat: &Matrix) -> Result<Vec<Complex64>> {
    if !mat.is_upper_hessenberg() {
        return Err(Error::Domain("matrix is not upper Hessenberg".into()));
    }
    let n = mat.dim();
    let mut h = mat.clone();
    balance(&mut h);
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(eig);
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // Look for a negligible subdiagonal entry in the active block.
        let mut lo = hi;
        while lo > 0 {
            let s = h.get(lo - 1, lo - 1).norm() + h.get(lo, lo).norm();
            let s = if s == 0.0 { h.norm_max() } else { s };
            if h.get(lo, lo - 1).norm() <= f64::EPSILON * s {
                h.set(lo, lo - 1, Complex64::new(0.0, 0.0));
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h.get(hi, hi);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > MAX_SWEEPS_PER_EIGENVALUE * n {
            return Err(Error::Numerical(format!(
                "QR iteration did not converge for a {n}×{n} matrix"
            )));
        }
        let shift = if iter % 10 == 0 {
            // Exceptional shift to break cycles.
            h.get(hi, hi) + Complex64::new(h.get(hi, hi - 1).norm(), 0.5 * h.get(hi, hi - 1).norm())
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
    eig[0] = h.get(0, 0);
    Ok(eig)
}

fn wilkinson_shift(h: &Matrix, hi: usize) -> Complex64 {
    let a = h.get(hi - 1, hi - 1);
    let b = h.get(hi - 1, hi);
    let c = h.get(hi, hi - 1);
    let d = h.get(hi, hi);
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let mu1 = half_tr + disc;
    let mu2 = half_tr - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// One explicit shifted QR step on the active block `lo..=hi`.
fn qr_sweep(h: &mut Matrix, lo: usize, hi: usize, shift: Complex64) {
    for k in lo..=hi {
        *h.at(k, k) -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h.get(k, k), h.get(k + 1, k));
        for j in k..=hi {
            let x = h.get(k, j);
            let y = h.get(k + 1, j);
            h.set(k, j, x * c + s * y);
            h.set(k + 1, j, -s.conj() * x + y * c);
        }
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        for i in lo..=(k + 1).min(hi) {
            let x = h.get(i, k);
            let y = h.get(i, k + 1);
            h.set(i, k, x * c + y * s.conj());
            h.set(i, k + 1, -x * s + y * c);
        }
    }
    for k in lo..=hi {
        *h.at(k, k) += shift;
    }
}

/// Rotation `[[c, s], [−s̄, c]]` (real `c`) annihilating `g` against `f`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fa = f.norm();
    let ga = g.norm();
    if ga == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if fa == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let r = fa.hypot(ga);
    let c = fa / r;
    let s = (f / fa) * g.conj() / r;
    (c, s)
}

/// Parlett–Reinsch diagonal balancing; preserves the Hessenberg pattern.
fn balance(h: &mut Matrix) {
    let n = h.dim();
    let radix = 2.0f64;
    let mut done = false;
    let mut sweeps = 0;
    while !done && sweeps < 100 {
        done = true;
        sweeps += 1;
        for i in 0..n {
            let mut row = 0.0;
            let mut col = 0.0;
            for j in 0..n {
                if j != i {
                    col += h.get(j, i).norm();
                    row += h.get(i, j).norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let mut g = row / radix;
            let mut f = 1.0;
            let s = col + row;
            while col < g {
                f *= radix;
                col *= radix * radix;
            }
            g = row * radix;
            while col > g {
                f /= radix;
                col /= radix * radix;
            }
            if (col + row) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    *h.at(i, j) /= f;
                }
                for j in 0..n {
                    *h.at(j, i) *= f;
                }
            }
        }
    }
}

/// Basis of the null space of `mat`, by Gaussian elimination with complete
/// pivoting. A pivot counts as zero when it falls below `rank_tol` times the
/// largest entry of the matrix.
pub fn null_space(mat: &Matrix, rank_tol: f64) -> Vec<Vec<Complex64>> {
    let n = mat.dim();
    let scale = mat.norm_max().max(f64::MIN_POSITIVE);
    let mut a = mat.clone();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    for step in 0..n {
        let mut best = (step, step, 0.0);
        for i in step..n {
            for j in step..n {
                let v = a.get(i, j).norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= rank_tol * scale {
            break;
        }
        let (pi, pj, _) = best;
        for j in 0..n {
            let tmp = a.get(step, j);
            a.set(step, j, a.get(pi, j));
            a.set(pi, j, tmp);
        }
        for i in 0..n {
            let tmp = a.get(i, step);
            a.set(i, step, a.get(i, pj));
            a.set(i, pj, tmp);
        }
        col_perm.swap(step, pj);
        let pivot = a.get(step, step);
        for j in step..n {
            let v = a.get(step, j) / pivot;
            a.set(step, j, v);
        }
        for i in 0..n {
            if i == step {
                continue;
            }
            let factor = a.get(i, step);
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in step..n {
                let v = a.get(i, j) - factor * a.get(step, j);
                a.set(i, j, v);
            }
        }
        rank += 1;
    }
    // Reduced form: x_pivot = −Σ a[p][free]·x_free.
    (rank..n)
        .map(|free| {
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            v[col_perm[free]] = Complex64::new(1.0, 0.0);
            for p in 0..rank {
                v[col_perm[p]] = -a.get(p, free);
            }
            v
        })
        .collect()
}
