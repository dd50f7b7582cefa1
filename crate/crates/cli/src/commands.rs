//! The four commands. Each returns a report and an exit status.

use jacobi_spectral::charfn::{charfn_ratio, qpochhammer_reference, CharFn};
use jacobi_spectral::identities::identity_suite;
use jacobi_spectral::spectrum::{find_spectrum, section_eigenvalues, SpectrumOptions};
use jacobi_spectral::verify::{run_suite, VerifyConfig};
use jacobi_spectral::{CoefficientSource, Complex64, Family};

use crate::config::RunConfig;
use crate::error::{exit, CliError};
use crate::report::{Cell, Report};

/// A finished command: its report and the process exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub status: i32,
}

pub const SPECTRUM_COLUMNS: [&str; 9] =
    ["index", "lambda", "residual", "tail_bound", "bracket_lo", "bracket_hi", "oracle_value", "oracle_gap", "sign_change"];

pub const CHARFN_COLUMNS: [&str; 8] =
    ["z", "f_partial", "tail_bound", "f_ratio", "ratio_gap", "closed_form", "closed_gap", "certified"];

pub const VERIFY_COLUMNS: [&str; 6] = ["check", "measured", "threshold", "passed", "skipped", "detail"];

pub const IDENTITY_COLUMNS: [&str; 7] = ["identity", "q", "cases", "max_gap", "max_tail", "threshold", "passed"];

fn spectral_source(cfg: &RunConfig) -> Result<CoefficientSource, CliError> {
    let src = cfg.source()?;
    src.require_determinate().map_err(CliError::from_config)?;
    Ok(src)
}

/// Eigenvalues of the configured operator with brackets and oracle values.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let src = spectral_source(cfg)?;
    let gamma = cfg
        .gamma(&src)
        .ok_or_else(|| CliError::Config("spectrum needs gamma (asserted lower spectral bound)".into()))?;
    if !(gamma > 0.0) {
        return Err(CliError::Config(format!("spectrum needs gamma > 0, got {gamma}")));
    }
    let mut report = Report::new("spectrum", cfg, SPECTRUM_COLUMNS.to_vec());
    report.note("gamma", gamma);
    if cfg.k == 0 {
        return Ok(Outcome { report, status: exit::OK });
    }
    let opts = SpectrumOptions { tol: cfg.tolerances.eig_tol, max_terms: cfg.tolerances.max_terms, ..SpectrumOptions::default() };
    let res = find_spectrum(&src, cfg.k, &opts).map_err(CliError::from_run)?;
    let oracle = if res.unresolved.is_empty() {
        Vec::new()
    } else {
        section_eigenvalues(&src, opts.oracle_section.max(cfg.k), cfg.k, 0.0).map_err(CliError::from_run)?
    };
    let mut found = res.eigenvalues.iter().peekable();
    for index in 1..=cfg.k {
        match found.peek() {
            Some(e) if e.index == index => {
                report.push(vec![
                    index.into(),
                    e.lambda.into(),
                    e.residual.into(),
                    e.tail_bound.into(),
                    e.bracket.0.into(),
                    e.bracket.1.into(),
                    e.oracle_value.into(),
                    e.oracle_gap.into(),
                    e.sign_change.into(),
                ]);
                found.next();
            }
            _ => {
                let o = oracle[index - 1];
                report.push(vec![
                    index.into(),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    o.into(),
                    Cell::Empty,
                    false.into(),
                ]);
            }
        }
    }
    report.note("section", res.section);
    let status = if res.unresolved.is_empty() {
        exit::OK
    } else {
        report.note("unresolved", serde_json::to_value(&res.unresolved).unwrap_or_default());
        exit::FAILED
    };
    Ok(Outcome { report, status })
}

/// `F_sigma(z) = (z + sigma; q)_inf / (sigma; q)_inf` for ASC-II shifted by `sigma`.
fn closed_form(src: &CoefficientSource, z: f64) -> Option<f64> {
    match src.family() {
        Family::Asc2 { q, .. } => {
            let s = src.shift();
            Some(qpochhammer_reference(Complex64::new(z + s, 0.0), *q, s).re)
        }
        Family::Table { .. } => None,
    }
}

/// Characteristic function on a real grid by both routes, plus the closed form.
pub fn cmd_charfn(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let grid = cfg.grid.ok_or_else(|| CliError::Config("charfn needs a grid (--grid MIN:MAX:POINTS)".into()))?;
    let src = spectral_source(cfg)?;
    let mut f = CharFn::new(&src, cfg.tolerances.max_terms).map_err(CliError::from_run)?;
    let mut report = Report::new("charfn", cfg, CHARFN_COLUMNS.to_vec());
    let mut uncertified = 0usize;
    for z in grid.values() {
        let zc = Complex64::new(z, 0.0);
        let p = f.partial_sum(zc, cfg.tolerances.atol).map_err(CliError::from_run)?;
        let r = charfn_ratio(&src, zc, cfg.tolerances.ratio_terms).map_err(CliError::from_run)?;
        let closed = closed_form(&src, z);
        if !p.certified {
            uncertified += 1;
        }
        report.push(vec![
            z.into(),
            p.value.re.into(),
            p.total_bound().into(),
            r.value.re.into(),
            (p.value - r.value).norm().into(),
            closed.into(),
            closed.map(|c| (p.value.re - c).abs()).into(),
            p.certified.into(),
        ]);
    }
    report.note("uncertified_points", uncertified);
    Ok(Outcome { report, status: exit::OK })
}

/// Structural identity suite.
pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let src = cfg.source()?;
    let mut vc = VerifyConfig { gamma: cfg.gamma, precision: cfg.precision()?, ..VerifyConfig::default() };
    if let Some(r) = cfg.tolerances.rtol {
        vc.wronskian_rtol = r;
        vc.resolvent_rtol = r;
    }
    let rep = run_suite(&src, &vc).map_err(CliError::from_run)?;
    let mut report = Report::new("verify", cfg, VERIFY_COLUMNS.to_vec());
    report.note("precision_digits", rep.precision.digits());
    for c in &rep.checks {
        report.push(vec![
            c.name.into(),
            c.measured.into(),
            c.threshold.into(),
            c.passed.into(),
            c.skipped.into(),
            c.detail.clone().into(),
        ]);
    }
    let status = if rep.all_passed() { exit::OK } else { exit::FAILED };
    Ok(Outcome { report, status })
}

/// q-series identity gaps per identity and `q`.
pub fn cmd_identities(cfg: &RunConfig) -> Result<Outcome, CliError> {
    for &q in &cfg.identities.q_list {
        if !(q > 0.0 && q < 1.0) {
            return Err(CliError::Config(format!("every q must lie in (0,1), got {q}")));
        }
    }
    let rows = identity_suite(&cfg.identities.grid()).map_err(CliError::from_run)?;
    let mut report = Report::new("identities", cfg, IDENTITY_COLUMNS.to_vec());
    let mut ok = true;
    for r in &rows {
        ok &= r.passed;
        report.push(vec![
            r.identity.into(),
            r.q.into(),
            r.cases.into(),
            r.max_gap.into(),
            r.max_tail.into(),
            r.threshold.into(),
            r.passed.into(),
        ]);
    }
    Ok(Outcome { report, status: if ok { exit::OK } else { exit::FAILED } })
}
