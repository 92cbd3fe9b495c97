//! Numerov shooting for bound states of `−y″ + V y = E y` on the half line.
//!
//! Levels are isolated by node counting of the outward solution (the count is
//! monotone in `E`), then refined by bisection on the mismatch between
//! outward and inward solutions at a fixed matching point.

use crate::error::{Error, Result};
use crate::sextic::RationalPotential;

use super::diagnostics::realness_check;

#[derive(Clone, Debug, PartialEq)]
pub struct NumerovConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub step: f64,
    pub e_lo: f64,
    pub e_hi: f64,
    /// Final bracket width for each level.
    pub bisection_tol: f64,
    /// Bracket width at which node-count bisection hands over to matching.
    pub handover_width: f64,
}

impl NumerovConfig {
    /// Box chosen so that `a·x_max⁴/4 = 60`.
    pub fn for_stiffness(a: f64, e_lo: f64, e_hi: f64) -> Self {
        Self {
            x_min: 1e-3,
            x_max: (240.0 / a).powf(0.25),
            step: 5e-4,
            e_lo,
            e_hi,
            bisection_tol: 1e-8,
            handover_width: 1e-4,
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.x_min > 0.0 && self.x_max > self.x_min) {
            return Err(Error::Domain("need 0 < x_min < x_max".into()));
        }
        if !(self.step > 0.0 && self.step < 0.01) {
            return Err(Error::Domain(format!("step {} outside (0, 0.01)", self.step)));
        }
        if !(self.e_hi > self.e_lo) {
            return Err(Error::Domain("empty energy window".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumerovLevel {
    pub energy: f64,
    /// Node count of the level (its index in the spectrum).
    pub nodes: usize,
}

struct Grid {
    xs: Vec<f64>,
    v: Vec<f64>,
    h: f64,
    sigma: f64,
    decay: f64,
}

impl Grid {
    fn new(v: &RationalPotential, cfg: &NumerovConfig) -> Result<Self> {
        let (lo, hi) = (cfg.x_min * cfg.x_min, cfg.x_max * cfg.x_max);
        if let Some(&pole) = v.rational().positive_real_poles().iter().find(|&&p| p >= lo && p <= hi) {
            return Err(Error::Domain(format!(
                "potential has a pole at x = {:.10} (t = {pole:.10}) inside the integration box",
                pole.sqrt()
            )));
        }
        if !realness_check(v) {
            return Err(Error::Domain("Numerov shooting needs a real potential".into()));
        }
        let c = v.centrifugal()?.re;
        if 1.0 + 4.0 * c < 0.0 {
            return Err(Error::Domain(format!("centrifugal coefficient {c} below −1/4")));
        }
        let sigma = 0.5 * (1.0 + (1.0 + 4.0 * c).sqrt());
        let (deg, lead) = v.leading_term();
        let decay = if deg == 3 && lead.re > 0.0 { lead.re.sqrt() } else { 1.0 };
        let n = ((cfg.x_max - cfg.x_min) / cfg.step).ceil() as usize + 1;
        let h = (cfg.x_max - cfg.x_min) / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| cfg.x_min + h * i as f64).collect();
        let v = xs
            .iter()
            .map(|&x| v.eval(x).map(|z| z.re))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { xs, v, h, sigma, decay })
    }

    fn len(&self) -> usize {
        self.xs.len()
    }

    /// Outward solution and its node count.
    fn outward(&self, e: f64, upto: usize) -> (Vec<f64>, usize) {
        let h2 = self.h * self.h / 12.0;
        let mut y = vec![0.0; upto + 1];
        y[0] = self.xs[0].powf(self.sigma);
        y[1] = self.xs[1].powf(self.sigma);
        let mut nodes = 0;
        for i in 1..upto {
            let fm = self.v[i - 1] - e;
            let f0 = self.v[i] - e;
            let fp = self.v[i + 1] - e;
            y[i + 1] = (2.0 * (1.0 + 5.0 * h2 * f0) * y[i] - (1.0 - h2 * fm) * y[i - 1]) / (1.0 - h2 * fp);
            if y[i + 1] == 0.0 || y[i + 1].signum() != y[i].signum() {
                nodes += 1;
            }
            let m = y[i + 1].abs();
            if m > 1e150 {
                for v in y.iter_mut().take(i + 2) {
                    *v /= m;
                }
            }
        }
        (y, nodes)
    }

    /// Inward solution from the decaying asymptote, down to index `from`.
    fn inward(&self, e: f64, from: usize) -> Vec<f64> {
        let n = self.len();
        let h2 = self.h * self.h / 12.0;
        let mut y = vec![0.0; n];
        let asym = |x: f64| (-self.decay * x.powi(4) / 4.0 + self.decay * self.xs[n - 1].powi(4) / 4.0).exp();
        y[n - 1] = asym(self.xs[n - 1]);
        y[n - 2] = asym(self.xs[n - 2]);
        for i in (from + 1..n - 1).rev() {
            let fp = self.v[i + 1] - e;
            let f0 = self.v[i] - e;
            let fm = self.v[i - 1] - e;
            y[i - 1] = (2.0 * (1.0 + 5.0 * h2 * f0) * y[i] - (1.0 - h2 * fp) * y[i + 1]) / (1.0 - h2 * fm);
            let m = y[i - 1].abs();
            if m > 1e150 {
                for v in y.iter_mut().skip(i - 1) {
                    *v /= m;
                }
            }
        }
        y
    }

    fn node_count(&self, e: f64) -> usize {
        self.outward(e, self.len() - 1).1
    }

    /// Sign of the discrete Wronskian of outward and inward solutions at `m`.
    fn mismatch(&self, e: f64, m: usize) -> f64 {
        let (out, _) = self.outward(e, m + 1);
        let inw = self.inward(e, m - 1);
        let w = out[m] * (inw[m + 1] - inw[m - 1]) - inw[m] * (out[m + 1] - out[m - 1]);
        let norm = (out[m].abs() + out[m + 1].abs()) * (inw[m].abs() + inw[m + 1].abs());
        w / norm
    }

    /// Outermost classical turning point for energy `e`, clamped inside.
    fn matching_index(&self, e: f64) -> usize {
        let n = self.len();
        let last = (0..n).rev().find(|&i| self.v[i] < e).unwrap_or(n / 2);
        last.clamp(n / 8, n - n / 8)
    }
}

/// Bound-state energies of a real potential inside `[e_lo, e_hi]`.
pub fn numerov_spectrum(v: &RationalPotential, cfg: &NumerovConfig) -> Result<Vec<NumerovLevel>> {
    cfg.validate()?;
    let grid = Grid::new(v, cfg)?;
    let n_lo = grid.node_count(cfg.e_lo);
    let n_hi = grid.node_count(cfg.e_hi);
    let mut levels = Vec::with_capacity(n_hi.saturating_sub(n_lo));
    for n in n_lo..n_hi {
        // Bracket: count(lo) ≤ n < count(hi).
        let (mut lo, mut hi) = (cfg.e_lo, cfg.e_hi);
        while hi - lo > cfg.handover_width {
            let mid = 0.5 * (lo + hi);
            if grid.node_count(mid) <= n {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let m = grid.matching_index(0.5 * (lo + hi));
        let (flo, fhi) = (grid.mismatch(lo, m), grid.mismatch(hi, m));
        if flo.is_finite() && fhi.is_finite() && flo.signum() != fhi.signum() {
            let mut f_lo = flo;
            while hi - lo > cfg.bisection_tol {
                let mid = 0.5 * (lo + hi);
                let fm = grid.mismatch(mid, m);
                if fm.signum() == f_lo.signum() {
                    lo = mid;
                    f_lo = fm;
                } else {
                    hi = mid;
                }
            }
        } else {
            while hi - lo > cfg.bisection_tol {
                let mid = 0.5 * (lo + hi);
                if grid.node_count(mid) <= n {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        levels.push(NumerovLevel {
            energy: 0.5 * (lo + hi),
            nodes: n,
        });
    }
    Ok(levels)
}
