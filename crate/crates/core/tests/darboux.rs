mod common;

use common::*;
use qesdx::darboux::{
    apply_adjoint, apply_first_order, apply_second_order, classify_chain, first_order,
    reducible_chain, second_order, ChainKind, FirstFactor,
};
use qesdx::oracle::{factorization_grid_check, pole_scan, realness_check, residual};
use qesdx::qpoly::{PolyC, QuasiWave, RationalT};
use qesdx::sextic::{build_model, complex_solutions, qes_spectrum, SexticModel, SpectralEntry};
use qesdx::{Complex64, Error};

fn model(s: f64, m: u32) -> (SexticModel, Vec<SpectralEntry>) {
    let model = build_model(0.5, s, m).unwrap();
    let sector = qes_spectrum(&model).unwrap().entries;
    (model, sector)
}

fn r(s: f64) -> f64 {
    (4.0 * s + 1.0).sqrt()
}

#[test]
fn first_step_on_single_state() {
    for (a, s) in [(0.5, 2.0), (1.0, 1.5), (0.3, 0.8)] {
        let m = build_model(a, s, 0).unwrap();
        let psi = &qes_spectrum(&m).unwrap().entries[0];
        let (_, v1) = first_order(&m.v0, &psi.wave, c(0.0)).unwrap();
        let expected = sum(&[
            RationalT::poly(poly(&[0.0, -4.0 * a * (s - 1.0), 0.0, a * a])),
            pole(4.0 * s * s - 0.25, 0.0, 1),
        ]);
        assert!(v1.approx_eq(&expected, 1e-10), "a = {a}, s = {s}");
    }
}

#[test]
fn first_steps_of_m2() {
    for s in [0.25, 1.0, 2.0] {
        let (m, sector) = model(s, 2);
        let (_, v1) = first_order(&m.v0, &sector[0].wave, c(-4.0 * r(s))).unwrap();
        assert!(v1.approx_eq(&printed_v1(s), 1e-9), "s = {s}");
        let (_, v1) = first_order(&m.v0, &sector[2].wave, c(4.0 * r(s))).unwrap();
        assert!(v1.approx_eq(&printed_v1_type1(s), 1e-9), "s = {s}");
    }
    let (m, sector) = model(2.0, 2);
    let (_, v1) = first_order(&m.v0, &sector[2].wave, sector[2].energy).unwrap();
    let mut poles = pole_scan(v1.rational());
    poles.sort_by(f64::total_cmp);
    assert_eq!(poles.len(), 2);
    assert!((poles[0] - 2.0).abs() < 1e-9 && (poles[1] - 4.0).abs() < 1e-9);
}

#[test]
fn wrong_energy_is_rejected() {
    let (m, sector) = model(2.0, 2);
    let err = first_order(&m.v0, &sector[1].wave, sector[1].energy + c(0.5)).unwrap_err();
    assert!(matches!(err, Error::NotTransformationFunction { .. }));
}

#[test]
fn mapped_first_step_states() {
    for s in [1.0, 2.0] {
        let (m, sector) = model(s, 2);
        let (op, _) = first_order(&m.v0, &sector[0].wave, sector[0].energy).unwrap();
        assert!(apply_first_order(&op, &sector[0].wave).unwrap().is_zero());
        let sigma = 2.0 * s + 0.5;
        let den = [4.0 * s, 2.0 * r(s), 1.0];
        let phi1 = apply_first_order(&op, &sector[1].wave).unwrap();
        assert!(phi1.proportional_to(&wave(sigma, &[4.0 * s + 2.0, 2.0 * r(s), 1.0], &den), 1e-9));
        let phi2 = apply_first_order(&op, &sector[2].wave).unwrap();
        assert!(phi2.proportional_to(&wave(sigma, &[-4.0 * s, 0.0, 1.0], &den), 1e-9));

        for (n, phi) in [(1, &phi1), (2, &phi2)] {
            let back = apply_adjoint(&op, phi).unwrap();
            let gap = sector[n].energy - sector[0].energy;
            assert!((gap - c(4.0 * r(s) * n as f64)).norm() < 1e-9);
            let expected = sector[n].wave.scaled_by(gap);
            assert!(back.sub(&expected).unwrap().is_zero(), "s = {s}, N = {n}");
        }
        assert!(apply_adjoint(&op, &QuasiWave::zero(0.5, 1)).unwrap().is_zero());
    }
}

#[test]
fn second_order_potentials() {
    for s in [0.25, 0.75] {
        let (m, sector) = model(s, 2);
        let op = second_order(&m.v0, &sector[0], &sector[1]).unwrap();
        assert!(op.v2.approx_eq(&printed_v2(s, 1.0), 1e-9), "s = {s}");
        let op = second_order(&m.v0, &sector[1], &sector[2]).unwrap();
        assert!(op.v2.approx_eq(&printed_v2(s, -1.0), 1e-9), "s = {s}");
    }

    let (m, sector) = model(2.0, 2);
    let op = second_order(&m.v0, &sector[0], &sector[1]).unwrap();
    let factors = op.v2.rational().den().factors().to_vec();
    for root in [Complex64::new(-3.0, 1.0), Complex64::new(-3.0, -1.0)] {
        assert!(factors.iter().any(|(f, mult)| (f - root).norm() < 1e-8 && *mult == 2), "{factors:?}");
    }
    assert!(pole_scan(op.v2.rational()).is_empty());
    let op = second_order(&m.v0, &sector[1], &sector[2]).unwrap();
    let factors = op.v2.rational().den().factors().to_vec();
    assert!(factors.iter().any(|(f, _)| (f - Complex64::new(3.0, 1.0)).norm() < 1e-8));
    assert!(pole_scan(op.v2.rational()).is_empty());

    let m = build_model(0.5, 2.0, 0).unwrap();
    let (a, b) = complex_solutions(&m).unwrap().remove(0);
    let op = second_order(&m.v0, &a, &b).unwrap();
    assert!(op.v2.approx_eq(&printed_nu2(), 1e-9));
    assert!(matches!(second_order(&m.v0, &a, &a), Err(Error::DegeneratePair)));
}

#[test]
fn second_order_states() {
    let (m, sector) = model(2.0, 2);
    let op = second_order(&m.v0, &sector[0], &sector[1]).unwrap();
    for psi in &sector[..2] {
        assert!(apply_second_order(&op, &psi.wave).unwrap().is_zero());
    }
    let chi2 = apply_second_order(&op, &sector[2].wave).unwrap();
    assert!(chi2.proportional_to(&wave(5.5, &[1.0], &[10.0, 6.0, 1.0]), 1e-9));

    let op = second_order(&m.v0, &sector[1], &sector[2]).unwrap();
    let chi0 = apply_second_order(&op, &sector[0].wave).unwrap();
    assert!(chi0.proportional_to(&wave(5.5, &[1.0], &[10.0, -6.0, 1.0]), 1e-9));
    assert!(residual(&op.v2, sector[0].energy, &chi0).pass);

    let m = build_model(0.5, 2.0, 0).unwrap();
    let psi0 = qes_spectrum(&m).unwrap().entries.remove(0);
    let (a, b) = complex_solutions(&m).unwrap().remove(0);
    let op = second_order(&m.v0, &a, &b).unwrap();
    let chi = apply_second_order(&op, &psi0.wave).unwrap();
    assert!(chi.proportional_to(&wave(1.5, &[6.0, 0.0, 1.0], &[20.0, 0.0, 4.0, 0.0, 1.0]), 1e-9));
    assert!(residual(&op.v2, c(0.0), &chi).pass);
}

#[test]
fn two_step_chain() {
    for s in [0.5, 1.0, 2.0] {
        let (m, _) = model(s, 2);
        let chain = reducible_chain(&m).unwrap();
        assert_eq!((chain.sector.len(), chain.intermediate.len(), chain.mapped.len()), (3, 2, 1));
        assert!(chain.v1.approx_eq(&printed_v1(s), 1e-9));
        assert!(chain.wronskian_op.v2.approx_eq(&chain.v2, 1e-9));
        assert!(chain.w1_identity_mismatch < 1e-9);
        assert!(chain.bracket_form_agrees);
        let sigma = 2.0 * s + 1.5;
        let chi = wave(sigma, &[1.0], &[4.0 * s + 2.0, 2.0 * r(s), 1.0]);
        assert!(chain.mapped[0].wave.proportional_to(&chi, 1e-9));
        assert!(chain.mapped[0].physical);
    }
    let (m, _) = model(1.0, 4);
    let chain = reducible_chain(&m).unwrap();
    assert_eq!((chain.intermediate.len(), chain.mapped.len()), (4, 3));
    assert!(chain.bracket_form_agrees);
    for (chi, entry) in chain.mapped.iter().zip(&chain.sector[2..]) {
        assert!((chi.energy - entry.energy).norm() < 1e-9);
        assert!(residual(&chain.v2, chi.energy, &chi.wave).pass);
        assert_eq!(chi.wave.den().degree(), 6, "state {}", chi.index);
        assert!(chi.physical);
    }

    let (m, _) = model(2.0, 0);
    assert!(matches!(reducible_chain(&m), Err(Error::Domain(_))));
}

#[test]
fn classification_examples() {
    let (m, sector) = model(2.0, 2);
    let report = classify_chain(&m.v0, &sector[0], &sector[1], &sector).unwrap();
    assert_eq!(report.kind, ChainKind::Reducible);
    assert!(report.v1_poles().is_empty() && report.v1_real());
    let roots = report.v1().unwrap().rational().den().roots();
    assert!(roots.iter().any(|r| (r - c(-2.0)).norm() < 1e-9));
    assert!(roots.iter().any(|r| (r - c(-4.0)).norm() < 1e-9));
    assert_eq!(report.mapped.len(), 1);
    assert!((report.mapped[0].energy - c(12.0)).norm() < 1e-9);

    let report = classify_chain(&m.v0, &sector[1], &sector[2], &sector).unwrap();
    assert_eq!(report.kind, ChainKind::IrreducibleType1);
    let poles = report.v1_poles();
    assert_eq!(poles.len(), 2);
    assert!((poles[0] - 2.0).abs() < 1e-9 && (poles[1] - 4.0).abs() < 1e-9);
    assert_eq!(report.intermediate.as_ref().unwrap().first, FirstFactor::B);
    assert!(report.v2_poles.is_empty() && report.v2_real);

    let report = classify_chain(&m.v0, &sector[0], &sector[2], &sector).unwrap();
    assert_eq!(report.kind, ChainKind::Invalid);
    assert!(!report.v2_poles.is_empty());

    let m0 = build_model(0.5, 2.0, 0).unwrap();
    let states = qes_spectrum(&m0).unwrap().entries;
    let (a, b) = complex_solutions(&m0).unwrap().remove(0);
    let report = classify_chain(&m0.v0, &a, &b, &states).unwrap();
    assert_eq!(report.kind, ChainKind::IrreducibleType2);
    assert!(report.conjugate_pair);
    assert!(!report.v1_real());
    assert!(report.v2_real && report.v2_poles.is_empty());
    assert_eq!(report.mapped.len(), 1);
}

#[test]
fn construction_invariants() {
    for s in [0.5, 1.0, 2.0] {
        let (m, sector) = model(s, 2);
        let xs: Vec<f64> = (0..40).map(|i| 0.2 + 3.8 * i as f64 / 39.0).collect();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let report = classify_chain(&m.v0, &sector[i], &sector[j], &sector).unwrap();
            let (deg, lead) = report.v2().leading_term();
            assert_eq!(deg, 3);
            assert!((lead - c(0.25)).norm() < 1e-12);
            let c2 = report.v2().centrifugal().unwrap();
            for chi in &report.mapped {
                let sigma = chi.wave.sigma();
                assert!((c(sigma * (sigma - 1.0)) - c2).norm() < 1e-8, "s = {s}, ({i}, {j})");
            }
            for step in &report.alternatives {
                let grid: Vec<f64> = xs
                    .iter()
                    .copied()
                    .filter(|x| step.poles.iter().all(|p| (x * x - p).abs() > 1e-3))
                    .collect();
                let gap = factorization_grid_check(&step.op, &m.v0, &step.v1, &grid).unwrap();
                assert!(gap < 1e-8, "s = {s}: {gap}");
                assert!(realness_check(&step.v1));
            }
        }
    }
}

#[test]
fn factorization_constant_is_the_energy() {
    let (m, sector) = model(1.0, 2);
    let (op, _) = first_order(&m.v0, &sector[1].wave, sector[1].energy).unwrap();
    assert_eq!(op.alpha, sector[1].energy);
    let twisted = QuasiWave::from_poly(0.5, 1, 1.5, PolyC::from_real(&[1.0, 1.0]));
    assert!(first_order(&m.v0, &twisted, c(0.0)).is_err());
}
