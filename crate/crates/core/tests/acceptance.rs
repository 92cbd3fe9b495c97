//! Acceptance criteria 1 to 10. Runs without the libtest harness and prints
//! one line per criterion; exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use qesdx::darboux::{
    apply_adjoint, apply_first_order, classify_chain, reducible_chain, second_order, ChainKind,
    DarbouxOperator, FirstOrderOp,
};
use qesdx::oracle::{
    factorization_grid_check, intertwine_check, numerov_spectrum, realness_check, residual,
    NumerovConfig,
};
use qesdx::qpoly::{PolyC, QuasiWave};
use qesdx::sextic::{
    bethe_roots, build_model, complex_solutions, covariant_model, qes_spectrum,
    verify_bethe_identity, verify_bethe_identity_with, PairCounting, RationalPotential,
    SexticModel, SpectralEntry,
};
use qesdx::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

const S_VALUES: [f64; 4] = [0.25, 0.75, 1.0, 2.0];

fn model(s: f64, m: u32) -> SexticModel {
    build_model(0.5, s, m).unwrap()
}

fn sector(s: f64) -> Result<Vec<SpectralEntry>, String> {
    Ok(qes_spectrum(&model(s, 2)).map_err(err)?.entries)
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in S_VALUES {
        let entries = sector(s)?;
        ensure!(entries.len() == 3, "s = {s}: {} sector states", entries.len());
        let e = 4.0 * (4.0 * s + 1.0).sqrt();
        for ((entry, expect_e), expect_p) in entries.iter().zip([-e, 0.0, e]).zip(sector_polys(s)) {
            let de = (entry.energy - c(expect_e)).norm();
            let dp = entry.poly.relative_distance(&expect_p);
            ensure!(de < 1e-10, "s = {s}: E = {} vs {expect_e}", entry.energy);
            ensure!(dp < 1e-10, "s = {s}: polynomial {} off by {dp:e}", entry.poly);
            worst = worst.max(de).max(dp);
        }
    }
    Ok(format!("4 values of s, worst deviation {worst:.1e}"))
}

fn criterion_2() -> Outcome {
    let m = model(2.0, 2);
    let chain = reducible_chain(&m).map_err(err)?;
    let d_v1 = chain.v1.rational().relative_mismatch(printed_v1(2.0).rational());
    ensure!(d_v1 < 1e-9, "V1 mismatch {d_v1:e}");
    let phi1 = wave(4.5, &[10.0, 6.0, 1.0], &[8.0, 6.0, 1.0]);
    let phi2 = wave(4.5, &[-8.0, 0.0, 1.0], &[8.0, 6.0, 1.0]);
    ensure!(chain.intermediate[0].wave.proportional_to(&phi1, 1e-9), "phi1 = {:?}", chain.intermediate[0].wave);
    ensure!(chain.intermediate[1].wave.proportional_to(&phi2, 1e-9), "phi2 = {:?}", chain.intermediate[1].wave);
    let chi2 = wave(5.5, &[1.0], &[10.0, 6.0, 1.0]);
    ensure!(chain.mapped.len() == 1, "{} mapped states", chain.mapped.len());
    ensure!(chain.mapped[0].wave.proportional_to(&chi2, 1e-9), "chi2 = {:?}", chain.mapped[0].wave);
    ensure!((chain.mapped[0].energy - c(12.0)).norm() < 1e-10, "chi2 energy {}", chain.mapped[0].energy);
    ensure!(chain.wronskian_op.v2.approx_eq(&chain.v2, 1e-9), "two-step and Wronskian V2 differ");

    let report = classify_chain(&m.v0, &chain.sector[0], &chain.sector[1], &chain.sector).map_err(err)?;
    ensure!(report.kind == ChainKind::Reducible, "classified {:?}", report.kind);
    ensure!(report.v1_poles().is_empty(), "V1 poles {:?}", report.v1_poles());
    Ok(format!("V1 mismatch {d_v1:.1e}, classification Reducible"))
}

fn criterion_3() -> Outcome {
    let xs = grid(40, 0.2, 3.0);
    let mut worst: f64 = 0.0;
    for s in [0.25, 0.75] {
        let entries = sector(s)?;
        let m = model(s, 2);
        let red = second_order(&m.v0, &entries[0], &entries[1]).map_err(err)?;
        let t1 = second_order(&m.v0, &entries[1], &entries[2]).map_err(err)?;
        let d_red = max_grid_gap(&red.v2, &printed_v2(s, 1.0), &xs);
        let d_t1 = max_grid_gap(&t1.v2, &printed_v2(s, -1.0), &xs);
        ensure!(d_red < 1e-9, "s = {s}: reducible V2 off printed form by {d_red:e}");
        ensure!(d_t1 < 1e-9, "s = {s}: sign-flipped V2 off printed form by {d_t1:e}");
        worst = worst.max(d_red).max(d_t1);
    }
    let s = 2.0;
    let entries = sector(s)?;
    let op = second_order(&model(s, 2).v0, &entries[0], &entries[1]).map_err(err)?;
    let engine = op.v2.centrifugal().map_err(err)?;
    let sigma = 2.0 * s + 1.5;
    let indicial = sigma * (sigma - 1.0);
    ensure!((engine - c(indicial)).norm() < 1e-9, "centrifugal {engine} vs σ(σ−1) = {indicial}");
    ensure!((indicial - (4.0 * s * s + 4.0 * s + 0.75)).abs() < 1e-12, "indicial identity");
    let printed = printed_v2(s, 1.0).centrifugal().map_err(err)?.re;
    Ok(format!(
        "s = 1/4, 3/4 match to {worst:.1e}; s = 2 engine 1/x² coefficient {} vs printed {printed}",
        engine.re
    ))
}

fn criterion_4() -> Outcome {
    let m = model(2.0, 2);
    let entries = sector(2.0)?;
    let report = classify_chain(&m.v0, &entries[1], &entries[2], &entries).map_err(err)?;
    ensure!(report.kind == ChainKind::IrreducibleType1, "classified {:?}", report.kind);
    let poles = report.v1_poles();
    ensure!(
        poles.len() == 2 && (poles[0] - 2.0).abs() < 1e-8 && (poles[1] - 4.0).abs() < 1e-8,
        "V1 poles {poles:?}"
    );
    let v1 = report.v1().ok_or("no intermediate potential")?;
    let d_v1 = v1.rational().relative_mismatch(printed_v1_type1(2.0).rational());
    ensure!(d_v1 < 1e-9, "V1 off printed form by {d_v1:e}");
    let chi0 = wave(5.5, &[1.0], &[10.0, -6.0, 1.0]);
    let mapped = report.mapped.iter().find(|e| e.index == 0).ok_or("ψ0 not mapped")?;
    ensure!(mapped.wave.proportional_to(&chi0, 1e-9), "chi0 = {:?}", mapped.wave);
    ensure!(report.v2_poles.is_empty(), "V2 poles {:?}", report.v2_poles);
    let target = poly(&[10.0, -6.0, 1.0]).roots().map_err(err)?;
    ensure!(
        target.iter().all(|r| report.v2().rational().den().multiplicity_of(*r) >= 1),
        "V2 denominator lacks t²−6t+10"
    );
    Ok("IrreducibleType1, V1 poles {2, 4}, V2 regular".into())
}

fn type2_parts() -> Result<(SexticModel, Vec<SpectralEntry>, SpectralEntry, SpectralEntry), String> {
    let m = model(2.0, 0);
    let states = qes_spectrum(&m).map_err(err)?.entries;
    let pairs = complex_solutions(&m).map_err(err)?;
    ensure!(pairs.len() == 1, "{} conjugate pairs", pairs.len());
    let (a, b) = pairs.into_iter().next().unwrap();
    Ok((m, states, a, b))
}

fn criterion_5() -> Outcome {
    let m = model(2.0, 0);
    let cov = covariant_model(&m).map_err(err)?;
    ensure!(cov.a == 0.5 && cov.s == -1.0 && cov.m == 3, "covariant model ({}, {}, {})", cov.a, cov.s, cov.m);
    let (m, states, a, b) = type2_parts()?;
    let e = 4.0 * 5f64.sqrt();
    ensure!((a.energy - Complex64::new(0.0, -e)).norm() < 1e-9, "E_a = {}", a.energy);
    ensure!((b.energy - Complex64::new(0.0, e)).norm() < 1e-9, "E_b = {}", b.energy);
    let report = classify_chain(&m.v0, &a, &b, &states).map_err(err)?;
    let d_nu = report.v2().rational().relative_mismatch(printed_nu2().rational());
    ensure!(d_nu < 1e-9, "ν2 off printed form by {d_nu:e}");
    ensure!(realness_check(report.v2()), "ν2 not real");
    ensure!(report.kind == ChainKind::IrreducibleType2, "classified {:?}", report.kind);
    let expect = wave(1.5, &[6.0, 0.0, 1.0], &[20.0, 0.0, 4.0, 0.0, 1.0]);
    ensure!(report.mapped.len() == 1, "{} mapped states", report.mapped.len());
    ensure!(report.mapped[0].wave.proportional_to(&expect, 1e-9), "mapped = {:?}", report.mapped[0].wave);
    ensure!(report.mapped[0].energy.norm() < 1e-10, "mapped energy {}", report.mapped[0].energy);
    Ok(format!("E = ±{e:.6}i, ν2 mismatch {d_nu:.1e}, IrreducibleType2"))
}

/// Every (potential, energy, state) triple produced by criteria 1 to 5.
fn all_states() -> Result<Vec<(String, RationalPotential, Complex64, QuasiWave)>, String> {
    let mut out = Vec::new();
    for s in S_VALUES {
        let m = model(s, 2);
        let entries = sector(s)?;
        for e in &entries {
            out.push((format!("s={s} ψ{}", e.index), m.v0.clone(), e.energy, e.wave.clone()));
        }
        let chain = reducible_chain(&m).map_err(err)?;
        for e in &chain.intermediate {
            out.push((format!("s={s} φ{}", e.index), chain.v1.clone(), e.energy, e.wave.clone()));
        }
        for e in &chain.mapped {
            out.push((format!("s={s} χ{}", e.index), chain.v2.clone(), e.energy, e.wave.clone()));
        }
        let t1 = classify_chain(&m.v0, &entries[1], &entries[2], &entries).map_err(err)?;
        for e in &t1.mapped {
            out.push((format!("s={s} type-1 χ{}", e.index), t1.v2().clone(), e.energy, e.wave.clone()));
        }
    }
    let (m, states, a, b) = type2_parts()?;
    out.push(("ψ (complex)".into(), m.v0.clone(), a.energy, a.wave.clone()));
    out.push(("ψ̄ (complex)".into(), m.v0.clone(), b.energy, b.wave.clone()));
    let report = classify_chain(&m.v0, &a, &b, &states).map_err(err)?;
    for e in &report.mapped {
        out.push(("type-2 mapped ψ0".into(), report.v2().clone(), e.energy, e.wave.clone()));
    }
    Ok(out)
}

fn criterion_6() -> Outcome {
    let states = all_states()?;
    let mut worst: f64 = 0.0;
    for (label, v, e, f) in &states {
        let r = residual(v, *e, f);
        ensure!(r.pass, "{label}: residual {:e}", r.max_norm_coeff);
        worst = worst.max(r.max_norm_coeff);
    }
    Ok(format!("{} states, worst residual {worst:.1e}", states.len()))
}

/// Every first-order operator built in criteria 1 to 5, with its potentials.
fn first_order_ops() -> Result<Vec<(String, FirstOrderOp, RationalPotential, RationalPotential)>, String> {
    let mut out = Vec::new();
    for s in S_VALUES {
        let m = model(s, 2);
        let chain = reducible_chain(&m).map_err(err)?;
        out.push((format!("s={s} L0"), chain.step0.clone(), m.v0.clone(), chain.v1.clone()));
        out.push((format!("s={s} L1"), chain.step1.clone(), chain.v1.clone(), chain.v2.clone()));
        let entries = sector(s)?;
        let t1 = classify_chain(&m.v0, &entries[1], &entries[2], &entries).map_err(err)?;
        for alt in &t1.alternatives {
            out.push((format!("s={s} type-1 {:?}", alt.first), alt.op.clone(), m.v0.clone(), alt.v1.clone()));
        }
    }
    let (m, states, a, b) = type2_parts()?;
    let report = classify_chain(&m.v0, &a, &b, &states).map_err(err)?;
    for alt in &report.alternatives {
        out.push((format!("type-2 {:?}", alt.first), alt.op.clone(), m.v0.clone(), alt.v1.clone()));
    }
    Ok(out)
}

fn criterion_7() -> Outcome {
    let xs = grid(40, 0.2, 3.0);
    let ops = first_order_ops()?;
    let mut worst: f64 = 0.0;
    for (label, op, v0, v1) in &ops {
        let gap = factorization_grid_check(op, v0, v1, &xs).map_err(err)?;
        ensure!(gap < 1e-8, "{label}: factorization gap {gap:e}");
        worst = worst.max(gap);
    }
    let chain = reducible_chain(&model(2.0, 2)).map_err(err)?;
    for entry in &chain.sector[1..] {
        let lf = apply_first_order(&chain.step0, &entry.wave).map_err(err)?;
        let back = apply_adjoint(&chain.step0, &lf).map_err(err)?;
        ensure!(back.proportional_to(&entry.wave, 1e-9), "L†Lψ{} not proportional to ψ{}", entry.index, entry.index);
        let x = 1.1;
        let ratio = back.eval(x).map_err(err)? / entry.wave.eval(x).map_err(err)?;
        let expect = entry.energy - chain.step0.alpha;
        ensure!((ratio - expect).norm() < 1e-8 * expect.norm(), "L†Lψ{} eigenvalue {ratio} vs {expect}", entry.index);
    }
    Ok(format!("{} operators, worst on-grid gap {worst:.1e}; L†L checked for N = 1, 2", ops.len()))
}

fn random_wave(rng: &mut ChaCha8Rng) -> QuasiWave {
    let deg = rng.gen_range(0..=3);
    let num: Vec<Complex64> = (0..=deg)
        .map(|_| Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let den = if rng.gen_bool(0.5) {
        PolyC::from_real(&[rng.gen_range(1.0..5.0), rng.gen_range(0.5..3.0), 1.0])
    } else {
        PolyC::one()
    };
    let sigma = rng.gen_range(0..8) as f64 * 0.5 - 0.25;
    QuasiWave::new(c(1.0), 0.5, 1, sigma, PolyC::new(num), den).unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e71c);
    let mut ops: Vec<(String, Box<dyn DarbouxOperator>, RationalPotential, RationalPotential)> = Vec::new();
    for (label, op, v0, v1) in first_order_ops()? {
        ops.push((label, Box::new(op), v0, v1));
    }
    for s in S_VALUES {
        let m = model(s, 2);
        let entries = sector(s)?;
        for (i, j) in [(0, 1), (1, 2)] {
            let op = second_order(&m.v0, &entries[i], &entries[j]).map_err(err)?;
            let v2 = op.v2.clone();
            ops.push((format!("s={s} second-order ({i},{j})"), Box::new(op), m.v0.clone(), v2));
        }
    }
    let (m, _, a, b) = type2_parts()?;
    let op = second_order(&m.v0, &a, &b).map_err(err)?;
    let v2 = op.v2.clone();
    ops.push(("type-2 second-order".into(), Box::new(op), m.v0.clone(), v2));

    let mut worst: f64 = 0.0;
    for (label, op, v_in, v_out) in &ops {
        for trial in 0..5 {
            let f = random_wave(&mut rng);
            let r = intertwine_check(op.as_ref(), v_in, v_out, &f).map_err(err)?;
            ensure!(r.pass, "{label}, trial {trial}: intertwining residual {:e}", r.max_norm_coeff);
            worst = worst.max(r.max_norm_coeff);
        }
    }
    Ok(format!("{} operators × 5 functions, worst residual {worst:.1e}", ops.len()))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let m = model(1.0, 2);
    let cfg = NumerovConfig::for_stiffness(0.5, -15.0, 25.0);
    let v0_levels = numerov_spectrum(&m.v0, &cfg).map_err(err)?;
    ensure!(v0_levels.len() >= 3, "only {} levels for V0", v0_levels.len());
    let e = 80f64.sqrt();
    for (level, (expect, nodes)) in v0_levels.iter().zip([(-e, 0), (0.0, 1), (e, 2)]) {
        ensure!((level.energy - expect).abs() < 1e-4, "V0 level {} vs {expect}", level.energy);
        ensure!(level.nodes == nodes, "V0 level {} has {} nodes", level.energy, level.nodes);
    }
    let chain = reducible_chain(&m).map_err(err)?;
    let v2_levels = numerov_spectrum(&chain.v2, &cfg).map_err(err)?;
    let expect: Vec<f64> = v0_levels[2..].iter().map(|l| l.energy).collect();
    let got: Vec<f64> = v2_levels.iter().map(|l| l.energy).collect();
    ensure!(got.len() == expect.len(), "V2 levels {got:?} vs {expect:?}");
    for (g, x) in got.iter().zip(&expect) {
        ensure!((g - x).abs() < 1e-4, "V2 level {g} vs {x}");
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(elapsed < 30.0, "took {elapsed:.1} s");
    Ok(format!("V0 {} levels, V2 {} levels in window, {elapsed:.1} s", v0_levels.len(), got.len()))
}

fn criterion_10() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in [0.25, 0.75, 1.0, 2.0, 3.5] {
        let m = build_model(0.5, s, 1).map_err(err)?;
        let e = (32.0 * 0.5 * s).sqrt();
        let alpha = 8.0 * s / e;
        let r = verify_bethe_identity(&m, c(e), &[c(alpha)]).map_err(err)?;
        ensure!(r < 1e-10, "M = 1, s = {s}: residual {r:e}");
        worst = worst.max(r);
        for entry in qes_spectrum(&m).map_err(err)?.entries {
            let roots = bethe_roots(&entry).map_err(err)?;
            let r = verify_bethe_identity(&m, entry.energy, &roots).map_err(err)?;
            ensure!(r < 1e-10, "M = 1, s = {s}, E = {}: residual {r:e}", entry.energy);
        }
    }
    let m = model(2.0, 2);
    let mut ordered: f64 = 0.0;
    let mut unordered: f64 = 0.0;
    for entry in qes_spectrum(&m).map_err(err)?.entries {
        let roots = bethe_roots(&entry).map_err(err)?;
        ordered = ordered.max(verify_bethe_identity_with(&m, entry.energy, &roots, PairCounting::Ordered).map_err(err)?);
        unordered =
            unordered.max(verify_bethe_identity_with(&m, entry.energy, &roots, PairCounting::Unordered).map_err(err)?);
    }
    Ok(format!(
        "M = 1 worst {worst:.1e}; M = 2, s = 2: ordered pairs {ordered:.1e}, unordered pairs {unordered:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("analytic sector", criterion_1),
        ("reducible chain", criterion_2),
        ("pinned second-order potentials", criterion_3),
        ("type-1 chain", criterion_4),
        ("type-2 chain", criterion_5),
        ("residual suite", criterion_6),
        ("factorization and adjoint identities", criterion_7),
        ("intertwining", criterion_8),
        ("Numerov oracle", criterion_9),
        ("Bethe identity", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
