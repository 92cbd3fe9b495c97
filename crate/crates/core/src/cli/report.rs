use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::job::Job;
use crate::darboux::ChainKind;
use crate::error::Result;
use crate::oracle::residual_with_tol;
use crate::qpoly::{PolyC, QuasiWave, RationalT};
use crate::sextic::RationalPotential;

/// Complex number as `[re, im]`.
pub type Pair = [f64; 2];

pub fn pair(c: Complex64) -> Pair {
    [c.re, c.im]
}

pub fn coeff_list(p: &PolyC) -> Vec<Pair> {
    p.coeffs().iter().map(|&c| pair(c)).collect()
}

fn poly_from(list: &[Pair]) -> PolyC {
    PolyC::exact(list.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
}

/// A potential `num(x²)/den(x²)`, coefficients lowest order first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialRecord {
    pub name: String,
    pub num: Vec<Pair>,
    pub den: Vec<Pair>,
    /// Positive real poles in `t = x²`.
    pub poles: Vec<f64>,
    pub real: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numerov: Option<Vec<f64>>,
}

impl PotentialRecord {
    pub fn from_potential(name: &str, v: &RationalPotential, poles: Vec<f64>, real: bool) -> Self {
        let r = v.rational();
        Self {
            name: name.to_string(),
            num: coeff_list(r.num()),
            den: coeff_list(&r.den_poly()),
            poles,
            real,
            numerov: None,
        }
    }

    pub fn potential(&self) -> Result<RationalPotential> {
        Ok(RationalPotential::new(RationalT::new(poly_from(&self.num), poly_from(&self.den))?))
    }
}

/// `scale·exp(−k·a·x⁴/4)·x^sigma·num(x²)/den(x²)` solving `H f = E f` for
/// the named potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct StateRecord {
    pub name: String,
    pub potential: String,
    pub E_re: f64,
    pub E_im: f64,
    pub sigma: f64,
    pub k: u32,
    pub scale: Pair,
    pub num: Vec<Pair>,
    pub den: Vec<Pair>,
    pub physical: bool,
    pub residual: f64,
    pub pass: bool,
}

impl StateRecord {
    pub fn energy(&self) -> Complex64 {
        Complex64::new(self.E_re, self.E_im)
    }

    pub fn wave(&self, a: f64) -> Result<QuasiWave> {
        let [re, im] = self.scale;
        QuasiWave::new(
            Complex64::new(re, im),
            a,
            self.k,
            self.sigma,
            poly_from(&self.num),
            poly_from(&self.den),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value.is_finite() && value < tolerance,
        }
    }
}

/// Summary for the final potential of the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_residual: f64,
    pub poles: Vec<f64>,
    pub real: bool,
    pub numerov: Option<Vec<f64>>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub job: Job,
    pub tolerance: f64,
    pub classification: Option<ChainKind>,
    /// The requested construction has a singular or non-real final potential.
    pub invalid: bool,
    pub potentials: Vec<PotentialRecord>,
    pub states: Vec<StateRecord>,
    pub diagnostics: Diagnostics,
    pub pass: bool,
}

impl Report {
    pub fn potential(&self, name: &str) -> Option<&PotentialRecord> {
        self.potentials.iter().find(|p| p.name == name)
    }

    pub fn state(&self, name: &str) -> Option<&StateRecord> {
        self.states.iter().find(|s| s.name == name)
    }

    pub fn failing_states(&self) -> impl Iterator<Item = &StateRecord> {
        self.states.iter().filter(|s| !s.pass)
    }

    pub fn failing_checks(&self) -> impl Iterator<Item = &Check> {
        self.diagnostics.checks.iter().filter(|c| !c.pass)
    }

    /// 0 on pass, 2 on a failed check, 3 for an invalid construction.
    pub fn exit_code(&self) -> i32 {
        if !self.pass {
            2
        } else if self.invalid {
            3
        } else {
            0
        }
    }
}

/// Recomputes every state's residual from the report's coefficient lists
/// and returns the largest.
pub fn reverify(report: &Report) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for state in &report.states {
        let v = report
            .potential(&state.potential)
            .ok_or_else(|| {
                crate::Error::Consistency(format!(
                    "state {} refers to unknown potential {}",
                    state.name, state.potential
                ))
            })?
            .potential()?;
        let wave = state.wave(report.job.model.a)?;
        let r = residual_with_tol(&v, state.energy(), &wave, report.tolerance);
        worst = worst.max(r.max_norm_coeff);
    }
    Ok(worst)
}
