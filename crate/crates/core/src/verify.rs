//! Identity suite: structural checks on a coefficient source, each reported
//! with its measured maximum and the threshold it is held to.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::charfn::{charfn_ratio, CharFn, DEFAULT_MAX_TERMS};
use crate::error::{Error, Result};
use crate::green::{assoc_by_substitution, green_block_in, phat_values_in, q_values_in, resolvent_identity_check_in};
use crate::precision::{DoubleDouble, Precision, Real};
use crate::qseries::{w_factorization_check_in, QParams};
use crate::recurrence::{phat_pairs, q_pairs};
use crate::second_kind::{second_kind_by_weyl, second_kind_values, trace_inverse, KappaTable, SeriesOptions};
use crate::source::{CoefficientSource, Family};
use crate::spectrum::{find_spectrum, SpectrumOptions};

/// Result of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
    pub skipped: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn at_most(name: &'static str, measured: f64, threshold: f64) -> Self {
        CheckOutcome { name, measured, threshold, passed: measured <= threshold, skipped: false, detail: String::new() }
    }

    fn skipped(name: &'static str, why: impl Into<String>) -> Self {
        CheckOutcome {
            name,
            measured: f64::NAN,
            threshold: f64::NAN,
            passed: true,
            skipped: true,
            detail: why.into(),
        }
    }

    fn failed(name: &'static str, why: impl Into<String>) -> Self {
        CheckOutcome {
            name,
            measured: f64::NAN,
            threshold: f64::NAN,
            passed: false,
            skipped: false,
            detail: why.into(),
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub precision: Precision,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Suite parameters. Thresholds default to the values the identities are
/// expected to meet in binary64.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Asserted lower bound of the spectrum; taken from the family if absent.
    pub gamma: Option<f64>,
    pub precision: Precision,
    /// Highest index in the recurrence, sign and kappa checks.
    pub max_index: usize,
    /// Largest block for the Wronskian, Green and resolvent checks.
    pub max_block: usize,
    pub random_tables: usize,
    pub seed: u64,
    /// Eigenvalues used in the trace reconciliation.
    pub trace_eigenvalues: usize,
    pub recurrence_rtol: f64,
    pub wronskian_rtol: f64,
    pub resolvent_rtol: f64,
    pub factorization_tol: f64,
    pub two_route_rtol: f64,
    pub trace_atol: f64,
    /// Points `z` for the per-term and growth bounds.
    pub z_grid: Vec<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            gamma: None,
            precision: Precision::Binary64,
            max_index: 40,
            max_block: 12,
            random_tables: 5,
            seed: 20240607,
            trace_eigenvalues: 40,
            recurrence_rtol: 1e-12,
            wronskian_rtol: 1e-10,
            resolvent_rtol: 1e-10,
            factorization_tol: 1e-12,
            two_route_rtol: 1e-10,
            trace_atol: 1e-6,
            z_grid: (0..=16).map(|i| -4.0 + 0.5 * i as f64).collect(),
        }
    }
}

/// Random diagonally dominant table (hence positive definite) of `size` rows.
pub fn random_positive_table(rng: &mut impl RngExt, size: usize) -> CoefficientSource {
    let alphas: Vec<f64> = (0..size).map(|_| rng.random_range(0.2..1.5)).collect();
    let betas: Vec<f64> = (0..size)
        .map(|n| {
            let left = if n > 0 { alphas[n - 1] } else { 0.0 };
            left + alphas[n] + rng.random_range(0.1..2.0)
        })
        .collect();
    CoefficientSource::table(alphas, betas).expect("finite entries")
}

fn table_len(src: &CoefficientSource) -> Option<usize> {
    match src.family() {
        Family::Table { betas, .. } => Some(betas.len()),
        Family::Asc2 { .. } => None,
    }
}

/// A real point below the spectrum: the configured floor minus one, or the
/// Gershgorin lower end of the stored table minus one.
fn point_below(src: &CoefficientSource, gamma: Option<f64>, rows: usize) -> Result<f64> {
    if let Some(g) = gamma.or(src.spectral_floor()) {
        return Ok(g - 1.0);
    }
    let mut lo = f64::INFINITY;
    for n in 0..rows {
        let a_prev = if n > 0 { src.alpha(n - 1)?.abs() } else { 0.0 };
        let a_next = src.alpha(n).map(f64::abs).unwrap_or(0.0);
        lo = lo.min(src.beta(n)? - a_prev - a_next);
    }
    Ok(lo - 1.0)
}

fn recurrence_residual<R: Real>(src: &CoefficientSource, z: f64, count: usize) -> Result<f64> {
    let p = phat_values_in::<R>(src, R::from_f64(z), count + 1)?;
    let zr = R::from_f64(z);
    let mut worst = 0.0f64;
    for n in 0..count {
        let (alpha_n, beta_n) = src.coeffs_in::<R>(n)?;
        let a = alpha_n * p[n + 1];
        let b = (beta_n - zr) * p[n];
        let c = if n > 0 { src.coeffs_in::<R>(n - 1)?.0 * p[n - 1] } else { R::zero() };
        let scale = (a.abs() + b.abs() + c.abs()).to_f64();
        if scale > 0.0 {
            worst = worst.max((a + b + c).abs().to_f64() / scale);
        }
    }
    Ok(worst)
}

/// Largest relative gap between the telescoped Wronskian form of `Q_m^(n)`
/// and forward substitution. With `literal` set, the plain difference
/// `Q_m P_n - P_m Q_n` is compared instead.
pub fn wronskian_gap<R: Real>(src: &CoefficientSource, z: f64, block: usize, literal: bool) -> Result<f64> {
    let zr = R::from_f64(z);
    let p = phat_values_in::<R>(src, zr, block + 1)?;
    let q = q_values_in::<R>(src, zr, block + 1)?;
    let mut t = Vec::with_capacity(block);
    for j in 0..block {
        t.push(R::one() / (src.coeffs_in::<R>(j)?.0 * p[j] * p[j + 1]));
    }
    let mut worst = 0.0f64;
    for n in 0..block {
        let y = assoc_by_substitution::<R>(src, zr, n, block + 1)?;
        let mut sum = R::zero();
        for m in n + 1..=block {
            sum = sum + t[m - 1];
            let w = if literal { q[m] * p[n] - p[m] * q[n] } else { sum * p[m] * p[n] };
            let scale = y[m].abs().to_f64().max(f64::MIN_POSITIVE);
            worst = worst.max((w - y[m]).abs().to_f64() / scale);
        }
    }
    Ok(worst)
}

struct Suite<'a> {
    src: &'a CoefficientSource,
    cfg: &'a VerifyConfig,
    rows: usize,
}

impl Suite<'_> {
    fn recurrence<R: Real>(&self) -> Result<CheckOutcome> {
        let count = self.cfg.max_index.min(self.rows.saturating_sub(1));
        let mut worst = 0.0f64;
        for z in [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0] {
            worst = worst.max(recurrence_residual::<R>(self.src, z, count)?);
        }
        Ok(CheckOutcome::at_most("recurrence_residual", worst, self.cfg.recurrence_rtol)
            .with_detail(format!("n <= {count}, z in [-1, 3]")))
    }

    fn wronskian<R: Real>(&self) -> Result<CheckOutcome> {
        let block = self.cfg.max_block.min(self.rows.saturating_sub(1));
        let z0 = point_below(self.src, self.cfg.gamma, self.rows)?;
        let mut worst = 0.0f64;
        for z in [z0, z0 - 1.0, z0 - 4.0] {
            worst = worst.max(wronskian_gap::<R>(self.src, z, block, false)?);
        }
        Ok(CheckOutcome::at_most("wronskian_vs_substitution", worst, self.cfg.wronskian_rtol)
            .with_detail(format!("m <= {block}")))
    }

    fn green<R: Real>(&self) -> Result<CheckOutcome> {
        let size = self.cfg.max_block.min(self.rows);
        let g = green_block_in::<R>(self.src, size)?;
        let r = g.right_inverse_residual(self.src)?;
        Ok(CheckOutcome::at_most("green_right_inverse", r, self.cfg.resolvent_rtol).with_detail(format!("N = {size}")))
    }

    fn resolvent<R: Real>(&self) -> Result<CheckOutcome> {
        let mut worst = 0.0f64;
        let mut sources = vec![self.src.clone()];
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        for _ in 0..self.cfg.random_tables {
            sources.push(random_positive_table(&mut rng, self.cfg.max_block + 1));
        }
        let top = self.cfg.max_block.min(self.rows);
        for (i, s) in sources.iter().enumerate() {
            let top = if i == 0 { top } else { self.cfg.max_block };
            for size in 2..=top {
                for x in [0.1, 0.3, -0.5] {
                    worst = worst.max(resolvent_identity_check_in::<R>(s, x, size)?);
                }
            }
        }
        Ok(CheckOutcome::at_most("resolvent_identity", worst, self.cfg.resolvent_rtol)
            .with_detail(format!("source plus {} random tables, N <= {}", self.cfg.random_tables, self.cfg.max_block)))
    }

    fn factorization<R: Real>(&self) -> Result<CheckOutcome> {
        let Family::Asc2 { q, a } = *self.src.family() else {
            return Ok(CheckOutcome::skipped("w_factorization", "only defined for the Al-Salam-Carlitz II family"));
        };
        if self.src.shift() != 0.0 {
            // The factorization is of the unshifted matrix.
        }
        let g = w_factorization_check_in::<R>(QParams::new(q, a)?, 10)?;
        Ok(CheckOutcome::at_most("w_factorization", g.max_rel, self.cfg.factorization_tol)
            .with_detail(format!("N = 10, absolute gap {:e}", g.max_abs)))
    }

    fn positivity(&self) -> CheckOutcome {
        let count = self.cfg.max_index.min(self.rows.saturating_sub(1));
        let mut min_alpha = f64::INFINITY;
        for n in 0..count {
            if let Ok(a) = self.src.alpha(n) {
                min_alpha = min_alpha.min(a);
            }
        }
        let mut c = CheckOutcome {
            name: "positivity",
            measured: min_alpha,
            threshold: 0.0,
            passed: min_alpha > 0.0,
            skipped: false,
            detail: format!("min alpha_n over n < {count}"),
        };
        if let Err(e) = self.src.check_positive_alphas(count) {
            c.passed = false;
            c.detail = e.to_string();
        }
        c
    }

    fn sign_pattern(&self) -> Result<CheckOutcome> {
        let count = self.cfg.max_index.min(self.rows.saturating_sub(1)) + 1;
        let zero = Complex64::new(0.0, 0.0);
        let p = phat_pairs(self.src, zero, count)?;
        let q = q_pairs(self.src, zero, count)?;
        let mut bad = 0usize;
        let mut first = None;
        for n in 0..count {
            let sp = if n % 2 == 0 { 1.0 } else { -1.0 };
            let ok_p = p[n].phase().re == sp;
            let ok_q = n == 0 || q[n].phase().re == -sp;
            if !(ok_p && ok_q) {
                bad += 1;
                first.get_or_insert(n);
            }
        }
        let mut c = CheckOutcome::at_most("sign_pattern", bad as f64, 0.0);
        c.detail = match first {
            Some(n) => format!("first violation at n = {n}"),
            None => format!("n <= {}", count - 1),
        };
        Ok(c)
    }

    fn kappa(&self, table: &KappaTable) -> CheckOutcome {
        let count = (self.cfg.max_index + 1).min(table.len());
        let kmin = table.kappas()[..count].iter().copied().fold(f64::INFINITY, f64::min);
        let decreasing = (1..count).all(|n| table.w0_over_p0(n) < table.w0_over_p0(n - 1));
        let mut c = CheckOutcome {
            name: "kappa_positive_ratio_decreasing",
            measured: kmin,
            threshold: 0.0,
            passed: kmin > 0.0 && decreasing,
            skipped: false,
            detail: format!("min kappa_n over n <= {}", count - 1),
        };
        if !decreasing {
            c.detail.push_str("; w_n(0)/P_n(0) not strictly decreasing");
        }
        c
    }

    fn two_route(&self) -> Result<CheckOutcome> {
        let gamma = self.cfg.gamma.or(self.src.spectral_floor()).unwrap_or(0.0);
        let count = 30;
        let mut worst = 0.0f64;
        for z in [gamma - 1.0, gamma - 0.5, 0.0f64.min(gamma - 0.25)] {
            let a = second_kind_values(self.src, z, gamma, count, SeriesOptions::default())?;
            let b = second_kind_by_weyl(self.src, z, count, 1 << 14)?;
            for (x, y) in a.values.iter().zip(&b) {
                worst = worst.max((x - y).abs() / y.abs().max(f64::MIN_POSITIVE));
            }
        }
        Ok(CheckOutcome::at_most("two_route_wn", worst, self.cfg.two_route_rtol).with_detail(format!("n < {count}")))
    }

    fn trace(&self) -> Result<CheckOutcome> {
        let k = self.cfg.trace_eigenvalues;
        let tr = trace_inverse(self.src, 1e-14, DEFAULT_MAX_TERMS)?;
        let spec = find_spectrum(self.src, k, &SpectrumOptions::default())?;
        if !spec.unresolved.is_empty() {
            return Ok(CheckOutcome::failed("trace_reconciliation", format!("unresolved eigenvalues {:?}", spec.unresolved)));
        }
        let eigs = spec.values();
        let sum = reciprocal_sum_with_tail(&eigs);
        Ok(CheckOutcome::at_most("trace_reconciliation", (sum - tr.value).abs(), self.cfg.trace_atol)
            .with_detail(format!("trace {:.15}, {k} eigenvalues plus tail {:.15}", tr.value, sum)))
    }

    fn per_term(&self, f: &CharFn) -> Result<CheckOutcome> {
        let count = (self.cfg.max_index + 1).min(f.kappas().len());
        let mut worst = 0.0f64;
        for &z in &self.cfg.z_grid {
            let zc = Complex64::new(z, 0.0);
            let mags = f.term_magnitudes(zc, count)?;
            for (n, m) in mags.iter().enumerate() {
                let b = f.per_term_bound(zc, n).unwrap_or(f64::INFINITY);
                worst = worst.max(m / b);
            }
        }
        Ok(CheckOutcome::at_most("per_term_bound", worst, 1.0).with_detail("max |w_n(0) P_n(z)| / (exp(|z| S) kappa_n)"))
    }

    fn growth(&self, f: &mut CharFn) -> Result<CheckOutcome> {
        let s = f.kappa_total();
        let mut worst = 0.0f64;
        for &z in &self.cfg.z_grid {
            let v = f.partial_sum(Complex64::new(z, 0.0), 1e-12)?;
            worst = worst.max(v.value.norm() / (2.0 * s * z.abs()).exp());
        }
        Ok(CheckOutcome::at_most("order_one_growth", worst, 1.0).with_detail("max |F(z)| / exp(2 S |z|)"))
    }

    fn two_method(&self, f: &mut CharFn) -> Result<CheckOutcome> {
        let mut worst = 0.0f64;
        for &z in &self.cfg.z_grid {
            let zc = Complex64::new(z, 0.0);
            let a = f.partial_sum(zc, 1e-13)?;
            let b = charfn_ratio(self.src, zc, 200)?;
            worst = worst.max((a.value - b.value).norm() / (a.total_bound() + b.total_bound() + 1e-13));
        }
        Ok(CheckOutcome::at_most("charfn_two_method", worst, 1.0).with_detail("max gap / combined bounds"))
    }
}

/// `sum 1/lambda_j` over the supplied eigenvalues plus a geometric tail
/// extrapolated from the last few ratios.
pub fn reciprocal_sum_with_tail(eigs: &[f64]) -> f64 {
    let mut sum = 0.0;
    for l in eigs.iter().rev() {
        sum += 1.0 / l;
    }
    if eigs.len() >= 2 {
        let start = eigs.len().saturating_sub(6);
        let r = eigs[start..].windows(2).map(|w| w[0] / w[1]).fold(0.0f64, f64::max);
        if r < 1.0 {
            sum += r / (1.0 - r) / eigs[eigs.len() - 1];
        }
    }
    sum
}

fn run_generic<R: Real>(suite: &Suite, out: &mut Vec<CheckOutcome>) -> Result<()> {
    out.push(suite.recurrence::<R>()?);
    out.push(suite.wronskian::<R>()?);
    out.push(suite.green::<R>()?);
    out.push(suite.resolvent::<R>()?);
    out.push(suite.factorization::<R>()?);
    Ok(())
}

fn guarded(name: &'static str, r: Result<CheckOutcome>) -> CheckOutcome {
    r.unwrap_or_else(|e| CheckOutcome::failed(name, e.to_string()))
}

/// Runs the whole suite on `src`.
pub fn run_suite(src: &CoefficientSource, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let rows = table_len(src).unwrap_or(usize::MAX);
    if rows < 3 {
        return Err(Error::InvalidParameter("verification needs at least three rows".into()));
    }
    let suite = Suite { src, cfg, rows };
    let mut checks = Vec::new();
    match cfg.precision {
        Precision::Binary64 => run_generic::<f64>(&suite, &mut checks)?,
        Precision::DoubleDouble => run_generic::<DoubleDouble>(&suite, &mut checks)?,
    }
    let positivity = suite.positivity();
    let positive = positivity.passed;
    checks.push(positivity);

    let needs_pd = "needs a positive-definite source";
    let needs_infinite = "needs an infinite family";
    if !positive {
        for name in ["sign_pattern", "kappa_positive_ratio_decreasing", "two_route_wn", "trace_reconciliation"] {
            checks.push(CheckOutcome::skipped(name, needs_pd));
        }
        for name in ["per_term_bound", "order_one_growth", "charfn_two_method"] {
            checks.push(CheckOutcome::skipped(name, needs_pd));
        }
        return Ok(VerifyReport { precision: cfg.precision, checks });
    }
    checks.push(guarded("sign_pattern", suite.sign_pattern()));
    if !src.is_infinite() {
        for name in [
            "kappa_positive_ratio_decreasing",
            "two_route_wn",
            "trace_reconciliation",
            "per_term_bound",
            "order_one_growth",
            "charfn_two_method",
        ] {
            checks.push(CheckOutcome::skipped(name, needs_infinite));
        }
        return Ok(VerifyReport { precision: cfg.precision, checks });
    }
    match CharFn::new(src, DEFAULT_MAX_TERMS) {
        Ok(mut f) => {
            checks.push(suite.kappa(f.kappas()));
            checks.push(guarded("two_route_wn", suite.two_route()));
            checks.push(guarded("trace_reconciliation", suite.trace()));
            checks.push(guarded("per_term_bound", suite.per_term(&f)));
            checks.push(guarded("order_one_growth", suite.growth(&mut f)));
            checks.push(guarded("charfn_two_method", suite.two_method(&mut f)));
        }
        Err(e) => {
            for name in [
                "kappa_positive_ratio_decreasing",
                "two_route_wn",
                "trace_reconciliation",
                "per_term_bound",
                "order_one_growth",
                "charfn_two_method",
            ] {
                checks.push(CheckOutcome::failed(name, e.to_string()));
            }
        }
    }
    Ok(VerifyReport { precision: cfg.precision, checks })
}
