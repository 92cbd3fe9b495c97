use num_complex::Complex64;

use super::job::{Action, Construction, Job};
use super::report::{coeff_list, pair, Check, Diagnostics, PotentialRecord, Report, StateRecord};
use crate::darboux::{
    apply_first_order, classify_chain, first_order, reducible_chain, ChainKind, ChainReport,
};
use crate::error::Error;
use crate::oracle::{
    factorization_check, intertwine_check, numerov_spectrum, pole_scan, realness_check,
    residual_with_tol, sampled_residual, NumerovConfig,
};
use crate::sextic::{
    build_model, complex_solutions, is_real_energy, qes_spectrum, RationalPotential, SexticModel,
    SpectralEntry,
};

/// Sampled residual bound for states whose exact residual passes.
const SAMPLED_TOL: f64 = 1e-6;
/// Numerov levels and analytic energies agree within this.
const NUMEROV_TOL: f64 = 1e-4;
/// Margin added below and above the sector energies for the Numerov window.
const WINDOW_MARGIN: f64 = 10.0;
const SAMPLE_POINTS: usize = 20;

/// Why a job produced no report.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// The job asks for something the model cannot provide (exit code 1).
    #[error("input error: {0}")]
    Input(String),
    /// A library consistency or numerical check failed (exit code 2).
    #[error("verification failure: {0}")]
    Failure(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 1,
            Self::Failure(_) => 2,
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_)
            | Error::DegeneratePair
            | Error::NotTransformationFunction { .. }
            | Error::Pole { .. } => Self::Input(e.to_string()),
            Error::Numerical(_) | Error::Consistency(_) => Self::Failure(e.to_string()),
        }
    }
}

struct Built {
    potentials: Vec<(String, RationalPotential)>,
    /// (name, potential name, entry)
    states: Vec<(String, String, SpectralEntry)>,
    classification: Option<ChainKind>,
    chain: Option<ChainReport>,
    first: Option<crate::darboux::FirstOrderOp>,
}

impl Built {
    fn potential(&self, name: &str) -> &RationalPotential {
        &self.potentials.iter().find(|(n, _)| n == name).expect("known potential").1
    }

    fn states_on<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a SpectralEntry> + 'a {
        self.states.iter().filter(move |(_, p, _)| p == name).map(|(_, _, e)| e)
    }

    fn final_name(&self) -> &str {
        &self.potentials.last().expect("V0 is always present").0
    }
}

fn name_states(prefix: &str, potential: &str, entries: &[SpectralEntry]) -> Vec<(String, String, SpectralEntry)> {
    entries
        .iter()
        .map(|e| (format!("{prefix}_{}", e.index), potential.to_string(), e.clone()))
        .collect()
}

fn push_chain(built: &mut Built, report: ChainReport) {
    if let Some(v1) = report.v1() {
        built.potentials.push(("V1".into(), v1.clone()));
    }
    built.potentials.push(("V2".into(), report.v2().clone()));
    built.states.extend(name_states("chi", "V2", &report.mapped));
    built.classification = Some(report.kind);
    built.chain = Some(report);
}

fn build(job: &Job, model: &SexticModel, sector: &[SpectralEntry]) -> Result<Built, RunError> {
    let mut built = Built {
        potentials: vec![("V0".into(), model.v0.clone())],
        states: name_states("psi", "V0", sector),
        classification: None,
        chain: None,
        first: None,
    };
    match job.construction() {
        Construction::None => {}
        Construction::FirstOrder(i) => {
            let source = &sector[i];
            let (op, v1) = first_order(&model.v0, &source.wave, source.energy)?;
            let regular = pole_scan(v1.rational()).is_empty() && realness_check(&v1);
            let mut mapped = Vec::new();
            for entry in sector.iter().filter(|e| e.index != i) {
                let wave = apply_first_order(&op, &entry.wave)?;
                let physical = regular && entry.physical && crate::oracle::normalizable(&wave);
                mapped.push(SpectralEntry {
                    energy: entry.energy,
                    poly: wave.num().clone(),
                    wave,
                    index: entry.index,
                    physical,
                });
            }
            built.potentials.push(("V1".into(), v1));
            built.states.extend(name_states("phi", "V1", &mapped));
            built.first = Some(op);
        }
        Construction::Pair(i, j) => {
            let report = classify_chain(&model.v0, &sector[i], &sector[j], sector)?;
            push_chain(&mut built, report);
        }
        Construction::GroundChain => {
            let chain = reducible_chain(model)?;
            let report = classify_chain(&model.v0, &sector[0], &sector[1], sector)?;
            built.potentials.push(("V1".into(), chain.v1.clone()));
            built.states.extend(name_states("phi", "V1", &chain.intermediate));
            built.potentials.push(("V2".into(), chain.v2.clone()));
            built.states.extend(name_states("chi", "V2", &chain.mapped));
            built.classification = Some(report.kind);
            built.chain = Some(report);
        }
        Construction::ConjPair => {
            let pairs = complex_solutions(model)?;
            let (a, b) = pairs.first().ok_or_else(|| {
                RunError::Input(format!(
                    "(a, s, M) = ({}, {}, {}) has no complex-energy solution pair",
                    model.a, model.s, model.m
                ))
            })?;
            built.states.push(("psi_c0".into(), "V0".into(), a.clone()));
            built.states.push(("psi_c1".into(), "V0".into(), b.clone()));
            let report = classify_chain(&model.v0, a, b, sector)?;
            push_chain(&mut built, report);
        }
    }
    if job.action == Action::Classify {
        built.states.retain(|(_, p, _)| p == "V0");
    }
    Ok(built)
}

fn potential_record(name: &str, v: &RationalPotential, built: &Built) -> PotentialRecord {
    let mut poles = pole_scan(v.rational());
    if name == "V1" {
        if let Some(step) = built.chain.as_ref().and_then(|c| c.intermediate.as_ref()) {
            poles = step.poles.clone();
        }
    }
    PotentialRecord::from_potential(name, v, poles, realness_check(v))
}

fn state_record(name: &str, potential: &str, entry: &SpectralEntry, v: &RationalPotential, tol: f64) -> StateRecord {
    let r = residual_with_tol(v, entry.energy, &entry.wave, tol);
    let w = &entry.wave;
    StateRecord {
        name: name.to_string(),
        potential: potential.to_string(),
        E_re: entry.energy.re,
        E_im: entry.energy.im,
        sigma: w.sigma(),
        k: w.k(),
        scale: pair(w.scale()),
        num: coeff_list(w.num()),
        den: coeff_list(&w.den_poly()),
        physical: entry.physical,
        residual: r.max_norm_coeff,
        pass: r.pass,
    }
}

/// Grid points of the job that keep half a spacing away from every pole.
fn sample_points(job: &Job, v: &RationalPotential, wave_poles: &[f64]) -> Vec<f64> {
    let h = job.grid.spacing();
    let mut poles: Vec<f64> = pole_scan(v.rational()).iter().map(|t| t.sqrt()).collect();
    poles.extend(wave_poles.iter().map(|t| t.sqrt()));
    let xs: Vec<f64> = job
        .grid
        .xs()
        .into_iter()
        .filter(|x| poles.iter().all(|p| (x - p).abs() > 0.5 * h))
        .collect();
    let stride = (xs.len() / SAMPLE_POINTS).max(1);
    xs.into_iter().step_by(stride).take(SAMPLE_POINTS).collect()
}

fn numerov_levels(v: &RationalPotential, a: f64, window: (f64, f64)) -> Result<Vec<f64>, RunError> {
    let cfg = NumerovConfig::for_stiffness(a, window.0, window.1);
    Ok(numerov_spectrum(v, &cfg)?.iter().map(|l| l.energy).collect())
}

fn contains_all(levels: &[f64], energies: &[f64]) -> f64 {
    energies
        .iter()
        .map(|e| levels.iter().map(|l| (l - e).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn same_levels(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn verify(
    job: &Job,
    model: &SexticModel,
    built: &Built,
    records: &mut [PotentialRecord],
) -> Result<Vec<Check>, RunError> {
    let mut checks = Vec::new();

    for (name, potential, entry) in &built.states {
        let v = built.potential(potential);
        let report = residual_with_tol(v, entry.energy, &entry.wave, crate::oracle::RESIDUAL_TOL);
        let wave_poles: Vec<f64> = entry.wave.den().factors().iter()
            .filter(|(r, _)| r.re > 1e-8 && r.im.abs() < 1e-8)
            .map(|(r, _)| r.re)
            .collect();
        let xs = sample_points(job, v, &wave_poles);
        let sampled = sampled_residual(v, entry.energy, &entry.wave, &xs)?;
        // The sampled verdict must agree with the exact one.
        let agrees = (sampled < SAMPLED_TOL) == report.pass;
        checks.push(Check {
            name: format!("sampled residual of {name}"),
            value: sampled,
            tolerance: SAMPLED_TOL,
            pass: agrees,
        });
    }

    if let Some(op) = &built.first {
        let r = factorization_check(op, &model.v0, built.potential("V1"));
        checks.push(Check::below("factorization V0, V1", r.max_norm_coeff, crate::oracle::RESIDUAL_TOL));
        let mut worst: f64 = 0.0;
        for (_, _, entry) in built.states.iter().filter(|(_, p, _)| p == "V0") {
            let r = intertwine_check(op, &model.v0, built.potential("V1"), &entry.wave)?;
            worst = worst.max(r.max_norm_coeff);
        }
        checks.push(Check::below("intertwining V0 → V1", worst, crate::oracle::RESIDUAL_TOL));
    }
    if let Some(chain) = &built.chain {
        if let Some(step) = &chain.intermediate {
            let r = factorization_check(&step.op, &model.v0, &step.v1);
            checks.push(Check::below("factorization V0, V1", r.max_norm_coeff, crate::oracle::RESIDUAL_TOL));
        }
        let mut worst: f64 = 0.0;
        for (_, _, entry) in built.states.iter().filter(|(_, p, _)| p == "V0") {
            let r = intertwine_check(&chain.op, &model.v0, chain.v2(), &entry.wave)?;
            worst = worst.max(r.max_norm_coeff);
        }
        checks.push(Check::below("intertwining V0 → V2", worst, crate::oracle::RESIDUAL_TOL));
    }

    let sector_energies: Vec<f64> = built
        .states_on("V0")
        .filter(|e| e.physical)
        .map(|e| e.energy.re)
        .collect();
    if sector_energies.is_empty() {
        return Ok(checks);
    }
    let lo = sector_energies.iter().copied().fold(f64::INFINITY, f64::min) - WINDOW_MARGIN;
    let hi = sector_energies.iter().copied().fold(f64::NEG_INFINITY, f64::max) + WINDOW_MARGIN;

    let mut levels_by_name = Vec::new();
    for record in records.iter_mut() {
        if !record.real || !record.poles.is_empty() {
            continue;
        }
        let v = built.potential(&record.name);
        if !pole_scan(v.rational()).is_empty() {
            continue;
        }
        let levels = numerov_levels(v, model.a, (lo, hi))?;
        let expected: Vec<f64> = built
            .states_on(&record.name)
            .filter(|e| e.physical && is_real_energy(e.energy))
            .map(|e| e.energy.re)
            .filter(|e| *e > lo && *e < hi)
            .collect();
        checks.push(Check::below(
            format!("numerov levels of {} contain its analytic states", record.name),
            contains_all(&levels, &expected),
            NUMEROV_TOL,
        ));
        levels_by_name.push((record.name.clone(), levels.clone()));
        record.numerov = Some(levels);
    }

    let levels = |name: &str| levels_by_name.iter().find(|(n, _)| n == name).map(|(_, l)| l.clone());
    match (job.construction(), levels("V0"), levels("V2")) {
        (Construction::GroundChain, Some(l0), Some(l2)) => {
            let deleted: Vec<f64> = l0.iter().skip(2).copied().collect();
            checks.push(Check::below(
                "numerov spectrum of V2 is that of V0 without its two lowest levels",
                same_levels(&deleted, &l2),
                NUMEROV_TOL,
            ));
        }
        (Construction::ConjPair, Some(l0), Some(l2)) => {
            checks.push(Check::below(
                "numerov spectrum of V2 equals that of V0",
                same_levels(&l0, &l2),
                NUMEROV_TOL,
            ));
        }
        _ => {}
    }
    Ok(checks)
}

/// Runs a validated job with the given residual tolerance.
pub fn run_job(job: &Job, tolerance: f64) -> Result<Report, RunError> {
    let model = build_model(job.model.a, job.model.s, job.model.m)?;
    let sector = qes_spectrum(&model)?.entries;
    let built = build(job, &model, &sector)?;

    let mut potentials: Vec<PotentialRecord> = built
        .potentials
        .iter()
        .map(|(name, v)| potential_record(name, v, &built))
        .collect();
    let states: Vec<StateRecord> = built
        .states
        .iter()
        .map(|(name, p, e)| state_record(name, p, e, built.potential(p), tolerance))
        .collect();

    let checks = if job.action == Action::Verify {
        verify(job, &model, &built, &mut potentials)?
    } else {
        Vec::new()
    };

    let last = potentials.last().expect("V0 is always present");
    let invalid = match built.classification {
        Some(kind) => kind == ChainKind::Invalid,
        None => built.final_name() != "V0" && (!last.poles.is_empty() || !last.real),
    };
    let max_residual = states.iter().map(|s| s.residual).fold(0.0, f64::max);
    let pass = states.iter().all(|s| s.pass) && checks.iter().all(|c| c.pass);
    let diagnostics = Diagnostics {
        max_residual,
        poles: last.poles.clone(),
        real: last.real,
        numerov: last.numerov.clone(),
        checks,
    };
    Ok(Report {
        job: job.clone(),
        tolerance,
        classification: built.classification,
        invalid,
        potentials,
        states,
        diagnostics,
        pass,
    })
}

/// Energies of the V0 sector in the report, in order.
pub fn sector_energies(report: &Report) -> Vec<Complex64> {
    report
        .states
        .iter()
        .filter(|s| s.potential == "V0" && s.name.starts_with("psi_") && !s.name.starts_with("psi_c"))
        .map(|s| s.energy())
        .collect()
}
