use std::fmt::Write;

use num_complex::Complex64;

use super::report::{PotentialRecord, Report};
use crate::darboux::ChainKind;
use crate::qpoly::RationalT;

/// Terms below this fraction of the largest displayed magnitude are dropped.
const DISPLAY_TOL: f64 = 1e-10;

/// Ten significant digits, integers without a decimal point.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let y: f64 = format!("{x:.9e}").parse().unwrap_or(x);
    if y.fract() == 0.0 && y.abs() < 1e15 {
        format!("{}", y as i64)
    } else {
        y.to_string()
    }
}

fn is_real(c: Complex64, scale: f64) -> bool {
    c.im.abs() <= DISPLAY_TOL * scale.max(1.0)
}

fn fmt_c(c: Complex64) -> String {
    let c = Complex64::new(chop(c.re, c.norm()), chop(c.im, c.norm()));
    if is_real(c, c.norm()) {
        return fmt_num(c.re);
    }
    if c.re.abs() <= DISPLAY_TOL * c.norm() {
        return format!("{}i", fmt_num(c.im));
    }
    let sign = if c.im < 0.0 { '−' } else { '+' };
    format!("({} {sign} {}i)", fmt_num(c.re), fmt_num(c.im.abs()))
}

/// Rounding dust relative to `scale` (and below 1e−12 absolute) becomes zero.
fn chop(x: f64, scale: f64) -> f64 {
    if x.abs() <= DISPLAY_TOL * scale.max(1.0) * 1e-2 {
        0.0
    } else {
        x
    }
}

fn sup(n: u32) -> String {
    if n == 1 {
        return String::new();
    }
    n.to_string()
        .chars()
        .map(|d| ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'][d as usize - '0' as usize])
        .collect()
}

/// `x^{2n}`
fn x_pow(n: usize) -> String {
    if n == 0 {
        String::new()
    } else {
        format!("x{}", sup(2 * n as u32))
    }
}

/// A signed term: `negative` applies to the text.
struct Term {
    negative: bool,
    text: String,
}

fn join(terms: &[Term]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        match (i, t.negative) {
            (0, true) => out.push('−'),
            (0, false) => {}
            (_, true) => out.push_str(" − "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&t.text);
    }
    out
}

/// `c·body`, with the sign of a real `c` pulled out.
fn coeff_term(c: Complex64, body: &str, scale: f64) -> Term {
    if is_real(c, scale) {
        let mag = c.re.abs();
        let num = fmt_num(mag);
        let text = match (num.as_str(), body) {
            (n, "") => n.to_string(),
            ("1", b) if !b.starts_with('/') => b.to_string(),
            (n, b) => format!("{n}{b}"),
        };
        Term { negative: c.re < 0.0, text }
    } else {
        let text = fmt_c(c);
        match text.strip_prefix('-') {
            Some(_) => Term { negative: true, text: format!("{}{body}", fmt_c(-c)) },
            None => Term { negative: false, text: format!("{text}{body}") },
        }
    }
}

fn poly_terms(coeffs: &[Complex64], scale: f64) -> Vec<Term> {
    coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| c.norm() > DISPLAY_TOL * scale)
        .map(|(n, &c)| coeff_term(c, &x_pow(n), scale))
        .collect()
}

/// Quotient and remainder of `num / den`.
fn divmod(num: &[Complex64], den: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let dn = den.len() - 1;
    if num.len() <= dn {
        return (Vec::new(), num.to_vec());
    }
    let mut rem = num.to_vec();
    let mut quot = vec![Complex64::default(); num.len() - dn];
    let lead = den[dn];
    for i in (0..quot.len()).rev() {
        let q = rem[i + dn] / lead;
        quot[i] = q;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= q * d;
        }
    }
    rem.truncate(dn);
    (quot, rem)
}

/// Taylor coefficients of `p` at `r`, orders `0..n`.
fn taylor(p: &[Complex64], r: Complex64, n: usize) -> Vec<Complex64> {
    let mut work = p.to_vec();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        if work.is_empty() {
            out.push(Complex64::default());
            continue;
        }
        // Synthetic division by (t − r): remainder is the next coefficient.
        let mut acc = Complex64::default();
        let mut quot = vec![Complex64::default(); work.len().saturating_sub(1)];
        for i in (0..work.len()).rev() {
            acc = acc * r + work[i];
            if i > 0 {
                quot[i - 1] = acc;
            }
        }
        out.push(acc);
        work = quot;
    }
    out
}

/// Series of `(d + u)^(−m)` to order `n`.
fn inverse_power_series(d: Complex64, m: u32, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n);
    let mut c = d.powi(-(m as i32));
    for k in 0..n {
        out.push(c);
        c *= -(m as f64 + k as f64) / ((k + 1) as f64) / d;
    }
    out
}

fn series_mul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| (0..=k).map(|i| a.get(i).copied().unwrap_or_default() * b.get(k - i).copied().unwrap_or_default()).sum())
        .collect()
}

/// Partial-fraction coefficients: for each denominator factor `(r, m)`,
/// `c_j` of `c_j/(t − r)^j`, `j = 1..=m`.
fn partial_fractions(rem: &[Complex64], factors: &[(Complex64, u32)]) -> Vec<(Complex64, Vec<Complex64>)> {
    factors
        .iter()
        .enumerate()
        .map(|(i, &(r, m))| {
            let n = m as usize;
            let mut g = taylor(rem, r, n);
            for (j, &(rj, mj)) in factors.iter().enumerate() {
                if j != i {
                    g = series_mul(&g, &inverse_power_series(r - rj, mj, n), n);
                }
            }
            // g_k multiplies (t − r)^{k − m}.
            let coeffs = (1..=n).map(|j| g[n - j]).collect();
            (r, coeffs)
        })
        .collect()
}

fn power(base: String, j: usize) -> String {
    if j == 1 {
        base
    } else {
        format!("{base}{}", sup(j as u32))
    }
}

/// `x² − r` for a real root.
fn shifted_x2(r: f64) -> String {
    if r > 0.0 {
        format!("(x² − {})", fmt_num(r))
    } else {
        format!("(x² + {})", fmt_num(-r))
    }
}

/// The potential as polynomial part plus partial fractions in `x²`.
pub fn render_potential(r: &RationalT, real: bool) -> String {
    let num = r.num().coeffs();
    let den = r.den_poly();
    let scale = num.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    let (quot, rem) = divmod(num, den.coeffs());
    let mut terms = poly_terms(&quot, scale);

    let mut factors: Vec<(Complex64, u32)> = r.den().factors().to_vec();
    factors.sort_by(|a, b| {
        let origin = |r: Complex64| r.norm() > DISPLAY_TOL;
        origin(a.0).cmp(&origin(b.0)).then(a.0.re.total_cmp(&b.0.re)).then(a.0.im.total_cmp(&b.0.im))
    });
    for (root, coeffs) in partial_fractions(&rem, &factors) {
        let root_real = is_real(root, root.norm());
        if real && !root_real {
            if root.im < 0.0 {
                continue;
            }
            // c/(t − r)^j + conj = 2Re[c (t − r̄)^j] / q(t)^j
            let q = [root.norm_sqr(), -2.0 * root.re, 1.0];
            let q_text = join(&poly_terms(&q.map(|v| Complex64::new(v, 0.0)), 1.0));
            for (j, c) in coeffs.iter().enumerate().map(|(j, c)| (j + 1, *c)) {
                if c.norm() <= DISPLAY_TOL * scale {
                    continue;
                }
                let mut lin = vec![Complex64::new(1.0, 0.0)];
                for _ in 0..j {
                    let mut next = vec![Complex64::default(); lin.len() + 1];
                    for (k, &v) in lin.iter().enumerate() {
                        next[k + 1] += v;
                        next[k] -= v * root.conj();
                    }
                    lin = next;
                }
                let numer: Vec<Complex64> = lin.iter().map(|&v| Complex64::new(2.0 * (c * v).re, 0.0)).collect();
                let numer_terms = poly_terms(&numer, scale);
                let den_text = power(format!("({q_text})"), j);
                if numer_terms.len() == 1 {
                    let t = &numer_terms[0];
                    terms.push(Term { negative: t.negative, text: format!("{}/{den_text}", t.text) });
                } else {
                    // Pull the leading sign out of the numerator.
                    let negative = numer_terms[0].negative;
                    let numer_terms: Vec<Term> = numer_terms
                        .into_iter()
                        .map(|t| Term { negative: t.negative != negative, text: t.text })
                        .collect();
                    terms.push(Term {
                        negative,
                        text: format!("({})/{den_text}", join(&numer_terms)),
                    });
                }
            }
            continue;
        }
        for (j, c) in coeffs.iter().enumerate().map(|(j, c)| (j + 1, *c)) {
            if c.norm() <= DISPLAY_TOL * scale {
                continue;
            }
            let den_text = if root.norm() <= DISPLAY_TOL {
                x_pow(j)
            } else if root_real {
                power(shifted_x2(root.re), j)
            } else {
                let shift = fmt_c(-root);
                let base = match shift.strip_prefix('-') {
                    Some(rest) => format!("(x² − {rest})"),
                    None => format!("(x² + {shift})"),
                };
                power(base, j)
            };
            let c = if real { Complex64::new(c.re, 0.0) } else { c };
            terms.push(coeff_term(c, &format!("/{den_text}"), scale));
        }
    }
    join(&terms)
}

fn potential_line(p: &PotentialRecord) -> String {
    let body = match p.potential() {
        Ok(v) => render_potential(v.rational(), p.real),
        Err(e) => format!("<{e}>"),
    };
    format!("{}(x) = {body}", p.name)
}

fn energy(re: f64, im: f64) -> String {
    let scale = re.hypot(im).max(1.0);
    fmt_c(Complex64::new(chop(re, scale * 1e4), chop(im, scale * 1e4)))
}

fn list(values: &[f64]) -> String {
    values.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(", ")
}

/// Human-readable summary of a report.
pub fn render_report(report: &Report) -> String {
    let job = &report.job;
    let mut out = String::new();
    let chain: Vec<String> = job.chain.iter().map(|s| s.to_string()).collect();
    let _ = writeln!(
        out,
        "{:?} job for a = {}, s = {}, M = {}{}",
        job.action,
        fmt_num(job.model.a),
        fmt_num(job.model.s),
        job.model.m,
        if chain.is_empty() { String::new() } else { format!(", chain [{}]", chain.join(", ")) }
    );
    if let Some(kind) = report.classification {
        let _ = writeln!(out, "classification: {kind:?}");
    }
    if let Some(v1) = report.potential("V1") {
        let status = if !v1.real {
            "complex-valued".to_string()
        } else if v1.poles.is_empty() {
            "real, regular".to_string()
        } else {
            format!("real, singular at x² = {}", list(&v1.poles))
        };
        if report.potential("V2").is_some() {
            let _ = writeln!(out, "intermediate potential: {status}");
        }
    }
    if report.invalid || report.classification == Some(ChainKind::Invalid) {
        let last = report.potentials.last();
        let why = match last {
            Some(p) if !p.real => "final potential is not real".to_string(),
            Some(p) => format!("final potential is singular at x² = {}", list(&p.poles)),
            None => String::new(),
        };
        let _ = writeln!(out, "invalid construction: {why}");
    }

    out.push_str("\npotentials:\n");
    for p in &report.potentials {
        let _ = writeln!(out, "  {}", potential_line(p));
        if !p.poles.is_empty() {
            let _ = writeln!(out, "    poles at x² = {}", list(&p.poles));
        }
        if let Some(levels) = &p.numerov {
            let shown: Vec<f64> = levels.iter().map(|&e| chop(e, 1e6)).collect();
            let _ = writeln!(out, "    numerov levels: {}", list(&shown));
        }
    }

    out.push_str("\nstates:\n");
    for s in &report.states {
        let _ = writeln!(
            out,
            "  {:<8} on {:<3} E = {:<16} {:<12} residual {:.1e}{}",
            s.name,
            s.potential,
            energy(s.E_re, s.E_im),
            if s.physical { "physical" } else { "formal" },
            s.residual,
            if s.pass { "" } else { "  FAIL" }
        );
    }

    if !report.diagnostics.checks.is_empty() {
        out.push_str("\nchecks:\n");
        for c in &report.diagnostics.checks {
            let _ = writeln!(
                out,
                "  {} {}: {:.1e} (tolerance {:.0e})",
                if c.pass { "ok  " } else { "FAIL" },
                c.name,
                c.value,
                c.tolerance
            );
        }
    }

    out.push('\n');
    let failing: Vec<_> = report.failing_states().collect();
    if failing.is_empty() {
        let _ = writeln!(
            out,
            "all residuals pass (max {:.1e}, tolerance {:.0e})",
            report.diagnostics.max_residual, report.tolerance
        );
    } else {
        let _ = writeln!(out, "residual failures (tolerance {:.0e}):", report.tolerance);
        for s in failing {
            let _ = writeln!(
                out,
                "  {} on {} at E = {}: residual {:.3e}",
                s.name,
                s.potential,
                energy(s.E_re, s.E_im),
                s.residual
            );
        }
    }
    for c in report.failing_checks() {
        let _ = writeln!(out, "failed check: {}", c.name);
    }
    let _ = writeln!(
        out,
        "verdict: {}",
        match report.exit_code() {
            0 => "pass",
            3 => "invalid construction",
            _ => "verification failure",
        }
    );
    out
}
