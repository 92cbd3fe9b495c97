//! First- and second-order Darboux transformations and chain classification.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{normalizable, pole_scan, realness_check, residual};
use crate::qpoly::{
    qw_log_derivative, qw_wronskian2, qw_wronskian3, PolyC, QuasiWave, RationalT, Superpotential,
};
use crate::sextic::{is_real_energy, qes_spectrum, RationalPotential, SexticModel, SpectralEntry};

/// Proportionality tolerance for comparing mapped states across routes.
const ROUTE_TOL: f64 = 1e-8;

/// Anything that maps closed-family functions to closed-family functions.
pub trait DarbouxOperator {
    fn apply(&self, f: &QuasiWave) -> Result<QuasiWave>;
}

/// `L = d/dx + W` with `W = −(ln ψ)′` for a solution `ψ` of `(H − α)ψ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrderOp {
    pub w: Superpotential,
    pub alpha: Complex64,
    pub source: QuasiWave,
}

impl DarbouxOperator for FirstOrderOp {
    fn apply(&self, f: &QuasiWave) -> Result<QuasiWave> {
        apply_first_order(self, f)
    }
}

/// Builds the operator from `psi` and returns it with `V₁ = V₀ + 2W′`.
pub fn first_order(
    v0: &RationalPotential,
    psi: &QuasiWave,
    alpha: Complex64,
) -> Result<(FirstOrderOp, RationalPotential)> {
    let report = residual(v0, alpha, psi);
    if !report.pass {
        return Err(Error::NotTransformationFunction {
            max_norm_coeff: report.max_norm_coeff,
        });
    }
    let w = qw_log_derivative(psi)?;
    let v1 = shifted_potential(v0, &w);
    Ok((
        FirstOrderOp {
            w,
            alpha,
            source: psi.clone(),
        },
        v1,
    ))
}

/// `V + 2W′`
fn shifted_potential(v: &RationalPotential, w: &Superpotential) -> RationalPotential {
    let dw = w.derivative_t();
    RationalPotential::new(v.rational() + &dw.scale(Complex64::new(2.0, 0.0)))
}

/// `f′ + W·f`
pub fn apply_first_order(op: &FirstOrderOp, f: &QuasiWave) -> Result<QuasiWave> {
    f.derivative().add(&f.mul_rational(&op.w.g, 1))
}

/// `−g′ + W·g`, the reverse transformation.
pub fn apply_adjoint(op: &FirstOrderOp, g: &QuasiWave) -> Result<QuasiWave> {
    g.derivative()
        .scaled_by(Complex64::new(-1.0, 0.0))
        .add(&g.mul_rational(&op.w.g, 1))
}

/// Second-order operator `f ↦ W(ψa, ψb, f)/W(ψa, ψb)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondOrderOp {
    pub wa: QuasiWave,
    pub wb: QuasiWave,
    /// Factorization energies of `wa` and `wb`.
    pub energies: (Complex64, Complex64),
    pub wron: QuasiWave,
    pub v2: RationalPotential,
}

impl DarbouxOperator for SecondOrderOp {
    fn apply(&self, f: &QuasiWave) -> Result<QuasiWave> {
        apply_second_order(self, f)
    }
}

/// `V₂ = V₀ − 2 (ln W(ψa, ψb))″`
pub fn second_order(
    v0: &RationalPotential,
    a: &SpectralEntry,
    b: &SpectralEntry,
) -> Result<SecondOrderOp> {
    for entry in [a, b] {
        let report = residual(v0, entry.energy, &entry.wave);
        if !report.pass {
            return Err(Error::NotTransformationFunction {
                max_norm_coeff: report.max_norm_coeff,
            });
        }
    }
    let wron = qw_wronskian2(&a.wave, &b.wave)?;
    if wron.is_zero() {
        return Err(Error::DegeneratePair);
    }
    let lw = qw_log_derivative(&wron)?;
    let v2 = shifted_potential(v0, &lw);
    Ok(SecondOrderOp {
        wa: a.wave.clone(),
        wb: b.wave.clone(),
        energies: (a.energy, b.energy),
        wron,
        v2,
    })
}

pub fn apply_second_order(op: &SecondOrderOp, f: &QuasiWave) -> Result<QuasiWave> {
    qw_wronskian3(&op.wa, &op.wb, f)?.div(&op.wron)
}

fn mapped_entry(
    v: &RationalPotential,
    energy: Complex64,
    wave: QuasiWave,
    index: usize,
    regular_potential: bool,
) -> Result<SpectralEntry> {
    let report = residual(v, energy, &wave);
    if !report.pass {
        return Err(Error::Consistency(format!(
            "mapped state {index} at E = {energy} fails its residual check ({:e})",
            report.max_norm_coeff
        )));
    }
    let physical = regular_potential && is_real_energy(energy) && normalizable(&wave);
    Ok(SpectralEntry {
        energy,
        poly: wave.num().clone(),
        wave,
        index,
        physical,
    })
}

/// The constant `c` with `f = c·g`, checked on sample points; `None` when
/// the two differ by more than `tol` relative.
fn sampled_ratio(f: &QuasiWave, g: &QuasiWave, tol: f64) -> Option<Complex64> {
    if f.k() != g.k() || (f.sigma() - g.sigma()).abs() > 1e-9 {
        return None;
    }
    let mut pairs = Vec::new();
    for x in [0.35, 0.6, 0.9, 1.2, 1.5, 1.9, 2.4] {
        pairs.push((f.eval(x).ok()?, g.eval(x).ok()?));
    }
    let &(fr, gr) = pairs.iter().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))?;
    if gr.norm() == 0.0 {
        return None;
    }
    let c = fr / gr;
    let scale = pairs.iter().map(|(a, _)| a.norm()).fold(0.0, f64::max);
    pairs
        .iter()
        .all(|&(a, b)| (a - c * b).norm() <= tol * scale)
        .then_some(c)
}

/// Two first-order steps on the ground states of `H₀` and then `H₁`.
#[derive(Clone, Debug)]
pub struct ReducibleChain {
    pub sector: Vec<SpectralEntry>,
    pub step0: FirstOrderOp,
    pub v1: RationalPotential,
    /// `φ_N = L₀ψ_N`, `N = 1..=M`.
    pub intermediate: Vec<SpectralEntry>,
    pub step1: FirstOrderOp,
    pub v2: RationalPotential,
    /// `χ_N = L₁φ_N`, `N = 2..=M`.
    pub mapped: Vec<SpectralEntry>,
    /// The same transformation as a single Wronskian operator.
    pub wronskian_op: SecondOrderOp,
    /// Mismatch of `W₁` against `−W₀ + (E₁ − E₀)P₀P₁/W₀₁`.
    pub w1_identity_mismatch: f64,
    /// Whether the bracket form
    /// `[−E₀P₀W₁N + E₁P₁W₀N − E_N P_N W₀₁]/W₀₁` agrees with `χ_N` for every
    /// `N ≥ 2`.
    pub bracket_form_agrees: bool,
}

pub fn reducible_chain(model: &SexticModel) -> Result<ReducibleChain> {
    if model.m == 0 {
        return Err(Error::Domain(
            "a two-step chain needs M ≥ 1 (there is no first excited sector state)".into(),
        ));
    }
    let sector = qes_spectrum(model)?.entries;
    let (psi0, psi1) = (&sector[0], &sector[1]);
    let v0 = &model.v0;

    let (step0, v1) = first_order(v0, &psi0.wave, psi0.energy)?;
    let v1_regular = pole_scan(v1.rational()).is_empty();
    let mut intermediate = Vec::new();
    for entry in &sector[1..] {
        let phi = apply_first_order(&step0, &entry.wave)?;
        intermediate.push(mapped_entry(&v1, entry.energy, phi, entry.index, v1_regular)?);
    }

    let (step1, v2) = first_order(&v1, &intermediate[0].wave, intermediate[0].energy)?;
    let v2_regular = pole_scan(v2.rational()).is_empty();
    let mut mapped = Vec::new();
    for phi in &intermediate[1..] {
        let chi = apply_first_order(&step1, &phi.wave)?;
        mapped.push(mapped_entry(&v2, phi.energy, chi, phi.index, v2_regular)?);
    }

    let wronskian_op = second_order(v0, psi0, psi1)?;
    if !wronskian_op.v2.approx_eq(&v2, ROUTE_TOL) {
        return Err(Error::Consistency(
            "two-step potential differs from the Wronskian form".into(),
        ));
    }
    for (entry, chi) in sector[2..].iter().zip(mapped.iter_mut()) {
        let direct = apply_second_order(&wronskian_op, &entry.wave)?;
        let Some(ratio) = sampled_ratio(&chi.wave, &direct, ROUTE_TOL) else {
            return Err(Error::Consistency(format!(
                "state {} differs between the two-step and Wronskian routes",
                entry.index
            )));
        };
        // the Wronskian route comes out fully reduced
        chi.wave = direct.scaled_by(ratio);
        chi.poly = chi.wave.num().clone();
    }

    let expected_w1 = w1_from_sector(psi0, psi1, &step0.w)?;
    let w1_identity_mismatch = step1.w.g.relative_mismatch(&expected_w1);

    let mut bracket_form_agrees = true;
    for (entry, chi) in sector[2..].iter().zip(&mapped) {
        let bracket = bracket_state(model, psi0, psi1, entry)?;
        bracket_form_agrees &= sampled_ratio(&bracket, &chi.wave, ROUTE_TOL).is_some();
    }

    Ok(ReducibleChain {
        sector,
        step0,
        v1,
        intermediate,
        step1,
        v2,
        mapped,
        wronskian_op,
        w1_identity_mismatch,
        bracket_form_agrees,
    })
}

/// `t`-Wronskian `P_K P_N′ − P_N P_K′`; the x-Wronskian of `P_K(x²)`,
/// `P_N(x²)` is `2x` times this.
fn t_wronskian(pk: &PolyC, pn: &PolyC) -> PolyC {
    &(pk * &pn.derivative()) - &(pn * &pk.derivative())
}

/// `g` of `−W₀ + (E₁ − E₀)·P₀P₁/W₀₁`.
fn w1_from_sector(
    psi0: &SpectralEntry,
    psi1: &SpectralEntry,
    w0: &Superpotential,
) -> Result<RationalT> {
    let w01 = t_wronskian(&psi0.poly, &psi1.poly).shift_up(1).scale(Complex64::new(2.0, 0.0));
    let ratio = RationalT::new(&psi0.poly * &psi1.poly, w01)?;
    Ok(&ratio.scale(psi1.energy - psi0.energy) - &w0.g)
}

/// `exp(−a x⁴/4)·x^{2s−1/2}·[−E₀P₀W₁N + E₁P₁W₀N − E_N P_N W₀₁]/W₀₁`
fn bracket_state(
    model: &SexticModel,
    psi0: &SpectralEntry,
    psi1: &SpectralEntry,
    psin: &SpectralEntry,
) -> Result<QuasiWave> {
    let (p0, p1, pn) = (&psi0.poly, &psi1.poly, &psin.poly);
    let w01 = t_wronskian(p0, p1);
    let body = &(&(p0 * &t_wronskian(p1, pn)).scale(-psi0.energy)
        + &(p1 * &t_wronskian(p0, pn)).scale(psi1.energy))
        - &(pn * &w01).scale(psin.energy);
    let rat = RationalT::new(body, w01)?;
    Ok(QuasiWave::from_rational(
        Complex64::new(1.0, 0.0),
        model.a,
        1,
        model.sector_sigma(),
        rat,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainKind {
    Reducible,
    IrreducibleType1,
    IrreducibleType2,
    Invalid,
}

/// Which transformation function the intermediate step is built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FirstFactor {
    A,
    B,
}

/// One way of splitting the second-order operator into two first-order
/// steps.
#[derive(Clone, Debug)]
pub struct IntermediateStep {
    pub first: FirstFactor,
    pub op: FirstOrderOp,
    pub v1: RationalPotential,
    /// Positive real singularities (in `t`) of the intermediate step.
    pub poles: Vec<f64>,
    pub real: bool,
}

#[derive(Clone, Debug)]
pub struct ChainReport {
    pub kind: ChainKind,
    /// The reported intermediate step; `None` only if neither order yields
    /// a first-order step.
    pub intermediate: Option<IntermediateStep>,
    /// Both factorization orders.
    pub alternatives: Vec<IntermediateStep>,
    pub conjugate_pair: bool,
    pub op: SecondOrderOp,
    pub v2_poles: Vec<f64>,
    pub v2_real: bool,
    pub mapped: Vec<SpectralEntry>,
}

impl ChainReport {
    pub fn v1(&self) -> Option<&RationalPotential> {
        self.intermediate.as_ref().map(|s| &s.v1)
    }
    pub fn v1_poles(&self) -> &[f64] {
        self.intermediate.as_ref().map_or(&[], |s| &s.poles)
    }
    pub fn v1_real(&self) -> bool {
        self.intermediate.as_ref().is_some_and(|s| s.real)
    }
    pub fn v2(&self) -> &RationalPotential {
        &self.op.v2
    }
}

fn intermediate_step(
    v0: &RationalPotential,
    first: FirstFactor,
    entry: &SpectralEntry,
) -> Result<IntermediateStep> {
    let (op, v1) = first_order(v0, &entry.wave, entry.energy)?;
    let mut poles = pole_scan(v1.rational());
    if entry.wave.num().degree().unwrap_or(0) > 0 {
        for r in entry.wave.num().roots()? {
            if r.re > 1e-8 && r.im.abs() < 1e-8 && !poles.iter().any(|p| (p - r.re).abs() < 1e-8 * r.re.max(1.0)) {
                poles.push(r.re);
            }
        }
    }
    poles.sort_by(f64::total_cmp);
    let real = realness_check(&v1);
    Ok(IntermediateStep {
        first,
        op,
        v1,
        poles,
        real,
    })
}

/// Classifies the second-order transformation built on `a` and `b` and maps
/// every other state of `states` through it.
///
/// The intermediate step reported is the first factorization order that is
/// real and regular; failing that, for a conjugate pair the one starting
/// from `a`, and otherwise the one starting from the higher-energy function.
pub fn classify_chain(
    v0: &RationalPotential,
    a: &SpectralEntry,
    b: &SpectralEntry,
    states: &[SpectralEntry],
) -> Result<ChainReport> {
    let op = second_order(v0, a, b)?;
    let conjugate_pair = a.wave.conj().proportional_to(&b.wave, ROUTE_TOL)
        && (a.energy.conj() - b.energy).norm() <= 1e-8 * (1.0 + a.energy.norm())
        && !is_real_energy(a.energy);

    let alternatives: Vec<IntermediateStep> = [(FirstFactor::A, a), (FirstFactor::B, b)]
        .into_iter()
        .filter_map(|(which, e)| intermediate_step(v0, which, e).ok())
        .collect();
    let regular = alternatives.iter().find(|s| s.real && s.poles.is_empty());
    let intermediate = match regular {
        Some(step) => Some(step.clone()),
        None if conjugate_pair => alternatives.iter().find(|s| s.first == FirstFactor::A).cloned(),
        None => {
            let preferred = if b.energy.re > a.energy.re {
                FirstFactor::B
            } else {
                FirstFactor::A
            };
            alternatives
                .iter()
                .find(|s| s.first == preferred)
                .or(alternatives.first())
                .cloned()
        }
    };

    let v2_poles = pole_scan(op.v2.rational());
    let v2_real = realness_check(&op.v2);
    let kind = match &intermediate {
        _ if !v2_poles.is_empty() || !v2_real => ChainKind::Invalid,
        Some(step) if step.real && step.poles.is_empty() => ChainKind::Reducible,
        Some(step) if step.real => ChainKind::IrreducibleType1,
        Some(_) if conjugate_pair => ChainKind::IrreducibleType2,
        _ => ChainKind::Invalid,
    };

    let regular_v2 = v2_poles.is_empty();
    let mut mapped = Vec::new();
    for state in states {
        if state.wave.proportional_to(&a.wave, ROUTE_TOL)
            || state.wave.proportional_to(&b.wave, ROUTE_TOL)
        {
            continue;
        }
        let chi = apply_second_order(&op, &state.wave)?;
        if chi.is_zero() {
            continue;
        }
        mapped.push(mapped_entry(&op.v2, state.energy, chi, state.index, regular_v2 && v2_real)?);
    }

    Ok(ChainReport {
        kind,
        intermediate,
        alternatives,
        conjugate_pair,
        op,
        v2_poles,
        v2_real,
        mapped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sextic::build_model;

    #[test]
    fn kernel_of_first_order_op() {
        let m = build_model(0.5, 2.0, 2).unwrap();
        let spec = qes_spectrum(&m).unwrap().entries;
        let (op, _) = first_order(&m.v0, &spec[0].wave, spec[0].energy).unwrap();
        assert!(apply_first_order(&op, &spec[0].wave).unwrap().is_zero());
        assert!(apply_adjoint(&op, &QuasiWave::zero(0.5, 1)).unwrap().is_zero());
    }

    #[test]
    fn rejects_non_solutions() {
        let m = build_model(0.5, 2.0, 2).unwrap();
        let spec = qes_spectrum(&m).unwrap().entries;
        let err = first_order(&m.v0, &spec[0].wave, spec[0].energy + 0.1).unwrap_err();
        assert!(matches!(err, Error::NotTransformationFunction { .. }));
    }

    #[test]
    fn proportional_pair_is_degenerate() {
        let m = build_model(0.5, 2.0, 2).unwrap();
        let spec = qes_spectrum(&m).unwrap().entries;
        let mut twin = spec[0].clone();
        twin.wave = twin.wave.scaled_by(Complex64::new(3.0, 0.0));
        assert!(matches!(
            second_order(&m.v0, &spec[0], &twin),
            Err(Error::DegeneratePair)
        ));
    }

    #[test]
    fn m0_chain_is_a_domain_error() {
        let m = build_model(0.5, 2.0, 0).unwrap();
        assert!(reducible_chain(&m).is_err());
    }
}
