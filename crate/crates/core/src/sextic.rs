//! The radial sextic oscillator
//! `V₀ = a²x⁶ − 2a(2M + 2s + 1)x² + 4(s − 1/4)(s − 3/4)/x²`, its analytic
//! sector and the `s → 1 − s` covariance.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hessenberg_eigenvalues, null_space, Matrix};
use crate::oracle::{normalizable, residual};
use crate::qpoly::{cluster_roots, poly_roots, roots_to_poly, PolyC, QuasiWave, RationalT};

/// Potential `V(x) = num(x²)/den(x²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalPotential {
    rat: RationalT,
}

impl RationalPotential {
    pub fn new(rat: RationalT) -> Self {
        Self { rat }
    }

    pub fn rational(&self) -> &RationalT {
        &self.rat
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        self.rat.eval(Complex64::new(x * x, 0.0))
    }

    /// Coefficient `c` of the `c/x²` term.
    pub fn centrifugal(&self) -> Result<Complex64> {
        self.rat.simple_pole_at_origin()
    }

    /// Degree in `t` and coefficient of the dominant term at large `t`.
    pub fn leading_term(&self) -> (i64, Complex64) {
        let num = self.rat.num();
        let deg = num.degree().map_or(0, |d| d as i64) - self.rat.den().degree() as i64;
        (deg, num.leading().unwrap_or_default())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.rat.conj())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rat.approx_eq(&other.rat, tol)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SexticModel {
    pub a: f64,
    pub s: f64,
    pub m: u32,
    pub v0: RationalPotential,
}

pub fn build_model(a: f64, s: f64, m: u32) -> Result<SexticModel> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("a must be positive, got {a}")));
    }
    if !s.is_finite() {
        return Err(Error::Domain("s must be finite".into()));
    }
    let linear = -2.0 * a * (2.0 * m as f64 + 2.0 * s + 1.0);
    let centrifugal = 4.0 * (s - 0.25) * (s - 0.75);
    // Written over the denominator t.
    let num = PolyC::from_real(&[centrifugal, 0.0, linear, 0.0, a * a]);
    let rat = RationalT::from_parts(
        num,
        crate::qpoly::RootProduct::from_factors(&[(Complex64::new(0.0, 0.0), 1)]),
    );
    Ok(SexticModel {
        a,
        s,
        m,
        v0: RationalPotential::new(rat),
    })
}

impl SexticModel {
    /// Origin exponent `2s − 1/2` of the analytic sector.
    pub fn sector_sigma(&self) -> f64 {
        2.0 * self.s - 0.5
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralEntry {
    pub energy: Complex64,
    pub wave: QuasiWave,
    /// Sector polynomial `P(t)` with monic top coefficient, before the
    /// origin zeros are folded into the wave's exponent.
    pub poly: PolyC,
    pub index: usize,
    pub physical: bool,
}

impl SpectralEntry {
    /// Positive real roots of the wave's numerator: nodes on `(0, ∞)`.
    pub fn nodes(&self) -> Result<usize> {
        if self.wave.num().degree().unwrap_or(0) == 0 {
            return Ok(0);
        }
        Ok(self
            .wave
            .num()
            .roots()?
            .iter()
            .filter(|r| r.re > 1e-8 && r.im.abs() < 1e-8)
            .count())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JordanDeficiency {
    pub energy: Complex64,
    pub algebraic: usize,
    pub geometric: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub entries: Vec<SpectralEntry>,
    /// Sum of the closure-matrix eigenvalues (zero in exact arithmetic).
    pub trace: Complex64,
    pub deficiencies: Vec<JordanDeficiency>,
}

/// Matrix of `E·c = A·c` from the three-term recurrence
/// `4(n+1)(n+2s)·c_{n+1} + E·c_n + 4a(M−n+1)·c_{n−1} = 0`, `n = 0..=M`.
pub fn closure_matrix(model: &SexticModel) -> Matrix {
    let n = model.m as usize + 1;
    let mut a = Matrix::zeros(n);
    for row in 0..n {
        let r = row as f64;
        if row + 1 < n {
            a.set(row, row + 1, Complex64::new(-4.0 * (r + 1.0) * (r + 2.0 * model.s), 0.0));
        }
        if row >= 1 {
            a.set(
                row,
                row - 1,
                Complex64::new(-4.0 * model.a * (model.m as f64 - r + 1.0), 0.0),
            );
        }
    }
    a
}

pub fn is_real_energy(e: Complex64) -> bool {
    e.im.abs() < 1e-9 * (1.0 + e.norm())
}

/// All eigenpairs of the closure system, sorted by (Re E, Im E).
pub fn qes_spectrum(model: &SexticModel) -> Result<Spectrum> {
    let mat = closure_matrix(model);
    let eig = hessenberg_eigenvalues(&mat)?;
    let trace: Complex64 = eig.iter().sum();
    let scale = mat.norm_max().max(1.0);
    let clusters = cluster_roots(&eig, 1e-5 * scale);

    let mut raw = Vec::new();
    let mut deficiencies = Vec::new();
    for (energy, mult) in clusters {
        let energy = if is_real_energy(energy) {
            Complex64::new(energy.re, 0.0)
        } else {
            energy
        };
        let basis = null_space(&mat.shifted(energy), 1e-8);
        if basis.is_empty() {
            return Err(Error::Numerical(format!(
                "empty null space at eigenvalue {energy} (multiplicity {mult}) of the {}×{} closure matrix",
                mat.dim(),
                mat.dim()
            )));
        }
        if basis.len() < mult as usize {
            deficiencies.push(JordanDeficiency {
                energy,
                algebraic: mult as usize,
                geometric: basis.len(),
            });
        }
        for vec in basis {
            let poly = PolyC::new(vec).monic();
            raw.push((energy, poly));
        }
    }
    raw.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));

    let mut entries = Vec::with_capacity(raw.len());
    for (index, (energy, poly)) in raw.into_iter().enumerate() {
        let wave = QuasiWave::from_poly(model.a, 1, model.sector_sigma(), poly.clone());
        let report = residual(&model.v0, energy, &wave);
        if !report.pass {
            return Err(Error::Consistency(format!(
                "sector state at E = {energy} fails its residual check ({:e})",
                report.max_norm_coeff
            )));
        }
        let physical = is_real_energy(energy) && normalizable(&wave);
        entries.push(SpectralEntry {
            energy,
            wave,
            poly,
            index,
            physical,
        });
    }
    Ok(Spectrum {
        entries,
        trace,
        deficiencies,
    })
}

/// `s → 1 − s`, `M → M + 2s − 1`; leaves `V₀` unchanged.
pub fn covariant_model(model: &SexticModel) -> Result<SexticModel> {
    let two_s = 2.0 * model.s;
    if (two_s - two_s.round()).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "covariance needs integer 2s, got s = {}",
            model.s
        )));
    }
    let m_new = model.m as i64 + two_s.round() as i64 - 1;
    if m_new < 0 {
        return Err(Error::Domain(format!(
            "covariant sector size M + 2s − 1 = {m_new} is negative"
        )));
    }
    build_model(model.a, 1.0 - model.s, m_new as u32)
}

/// Non-real-energy solutions of the original potential obtained from the
/// covariant model's sector, as conjugate pairs ordered `(Im E < 0, Im E > 0)`.
pub fn complex_solutions(model: &SexticModel) -> Result<Vec<(SpectralEntry, SpectralEntry)>> {
    let cov = covariant_model(model)?;
    let spectrum = qes_spectrum(&cov)?;
    let mut complex: Vec<SpectralEntry> = Vec::new();
    for entry in spectrum.entries {
        if is_real_energy(entry.energy) {
            continue;
        }
        let report = residual(&model.v0, entry.energy, &entry.wave);
        if !report.pass {
            return Err(Error::Consistency(format!(
                "covariant solution at E = {} does not solve the original equation ({:e})",
                entry.energy, report.max_norm_coeff
            )));
        }
        complex.push(SpectralEntry {
            physical: false,
            ..entry
        });
    }
    complex.sort_by(|a, b| a.energy.im.total_cmp(&b.energy.im).then(a.energy.re.total_cmp(&b.energy.re)));
    let mut pairs = Vec::new();
    let mut used = vec![false; complex.len()];
    for i in 0..complex.len() {
        if used[i] || complex[i].energy.im > 0.0 {
            continue;
        }
        let target = complex[i].energy.conj();
        let partner = (0..complex.len()).find(|&j| {
            !used[j] && j != i && (complex[j].energy - target).norm() <= 1e-8 * (1.0 + target.norm())
        });
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
                pairs.push((complex[i].clone(), complex[j].clone()));
            }
            None => {
                return Err(Error::Consistency(format!(
                    "complex energy {} has no conjugate partner",
                    complex[i].energy
                )))
            }
        }
    }
    Ok(pairs)
}

/// Roots of the sector polynomial.
pub fn bethe_roots(entry: &SpectralEntry) -> Result<Vec<Complex64>> {
    if entry.poly.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let roots = poly_roots(&entry.poly)?;
    let rebuilt = roots_to_poly(&roots);
    let mismatch = rebuilt.relative_distance(&entry.poly.monic());
    if mismatch > 1e-8 {
        return Err(Error::Consistency(format!(
            "elementary-symmetric reconstruction of the sector polynomial is off by {mismatch:e}"
        )));
    }
    Ok(roots)
}

/// How the double sum over `k ≠ l` in the root identity is counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairCounting {
    /// Every ordered pair `(k, l)`, `k ≠ l`.
    Ordered,
    /// Each unordered pair `{k, l}` once.
    Unordered,
}

/// Largest magnitude of the root identity
/// `Σ_k (4a x⁴ − 8s)/(x² − α_k) − Σ_{k≠l} 4x²/((x² − α_k)(x² − α_l)) − 4aM x² − E`
/// over ten sample points, with ordered pair counting.
pub fn verify_bethe_identity(model: &SexticModel, energy: Complex64, roots: &[Complex64]) -> Result<f64> {
    verify_bethe_identity_with(model, energy, roots, PairCounting::Ordered)
}

pub fn verify_bethe_identity_with(
    model: &SexticModel,
    energy: Complex64,
    roots: &[Complex64],
    counting: PairCounting,
) -> Result<f64> {
    if roots.len() != model.m as usize {
        return Err(Error::Domain(format!(
            "expected {} roots, got {}",
            model.m,
            roots.len()
        )));
    }
    let pair_weight = match counting {
        PairCounting::Ordered => 1.0,
        PairCounting::Unordered => 0.5,
    };
    let (a, s, m) = (model.a, model.s, model.m as f64);
    let mut worst: f64 = 0.0;
    for j in 0..10 {
        let mut x = 0.45 + 0.23 * j as f64;
        // Step away from the root loci.
        while roots.iter().any(|r| (Complex64::new(x * x, 0.0) - r).norm() < 1e-3) {
            x += 0.0137;
        }
        let t = Complex64::new(x * x, 0.0);
        let mut lhs = Complex64::new(0.0, 0.0);
        for r in roots {
            lhs += (4.0 * a * x.powi(4) - 8.0 * s) / (t - r);
        }
        let mut pairs = Complex64::new(0.0, 0.0);
        for (k, rk) in roots.iter().enumerate() {
            for (l, rl) in roots.iter().enumerate() {
                if k != l {
                    pairs += 4.0 * t / ((t - rk) * (t - rl));
                }
            }
        }
        lhs -= pairs * pair_weight;
        lhs -= 4.0 * a * m * t + energy;
        worst = worst.max(lhs.norm());
    }
    Ok(worst)
}
