//! q-Pochhammer symbols, basic hypergeometric sums and the closed forms of
//! the Al-Salam–Carlitz II family, plus the summation identities they obey.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::precision::{DoubleDouble, Real};
use crate::source::CoefficientSource;

const EPS: f64 = f64::EPSILON;
/// Per-factor cutoff for infinite products: `|x| q^j < 2^-60`.
const FACTOR_CUTOFF: f64 = 8.673617379884035e-19;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("q must lie in (0,1), got {q}")));
    }
    Ok(())
}

/// Parameters of the Al-Salam–Carlitz II family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParams {
    pub q: f64,
    pub a: f64,
}

impl QParams {
    pub fn new(q: f64, a: f64) -> Result<Self> {
        check_q(q)?;
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("a must be positive, got {a}")));
        }
        Ok(QParams { q, a })
    }

    /// `0 < a <= q`, the regime in which the moment problem is determinate
    /// and the shifted matrix has a trace-class inverse.
    pub fn determinate(q: f64, a: f64) -> Result<Self> {
        let p = Self::new(q, a)?;
        if a > q {
            return Err(Error::InvalidParameter(format!(
                "a = {a} exceeds q = {q}; the family is indeterminate for q < a < 1/q"
            )));
        }
        Ok(p)
    }

    /// Indeterminate exactly when `q < a < 1/q`.
    pub fn is_indeterminate(&self) -> bool {
        self.q < self.a && self.a < 1.0 / self.q
    }

    pub fn source(&self) -> CoefficientSource {
        CoefficientSource::asc2(self.q, self.a).expect("validated parameters")
    }
}

/// Length of a Pochhammer product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QCount {
    Finite(usize),
    Infinite,
}

/// Pochhammer value with the bound on the dropped factors (zero for finite products).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PochValue {
    pub value: Complex64,
    pub trunc_bound: f64,
    pub factors: usize,
}

fn factor(x: Complex64, qj: f64) -> Complex64 {
    let f = c(1.0) - x * qj;
    // A factor that is zero up to rounding (x = q^-k) is taken as exactly zero.
    if x.im == 0.0 && f.norm() <= 4.0 * EPS * (x.re * qj).abs().max(1.0) {
        c(0.0)
    } else {
        f
    }
}

/// `(x; q)_n = prod_{j<n} (1 - x q^j)`; the infinite product stops once
/// `|x| q^j < 2^-60` and records a bound on the remaining factors.
pub fn qpoch(x: Complex64, q: f64, n: QCount) -> Result<PochValue> {
    check_q(q)?;
    let mut value = c(1.0);
    let mut qj = 1.0;
    let mut j = 0usize;
    match n {
        QCount::Finite(n) => {
            while j < n {
                value *= factor(x, qj);
                qj *= q;
                j += 1;
            }
            Ok(PochValue { value, trunc_bound: 0.0, factors: n })
        }
        QCount::Infinite => {
            let ax = x.norm();
            while ax * qj >= FACTOR_CUTOFF {
                value *= factor(x, qj);
                qj *= q;
                j += 1;
            }
            // |sum_{k>=j} ln(1 - x q^k)| <= |x| q^j / ((1-q)(1-|x| q^j))
            let b = ax * qj / ((1.0 - q) * (1.0 - ax * qj));
            Ok(PochValue { value, trunc_bound: value.norm() * b.exp_m1(), factors: j })
        }
    }
}

pub fn qpoch_finite(x: Complex64, q: f64, n: usize) -> Complex64 {
    qpoch(x, q, QCount::Finite(n)).map(|p| p.value).unwrap_or(c(f64::NAN))
}

pub fn qpoch_inf(x: Complex64, q: f64) -> Complex64 {
    qpoch(x, q, QCount::Infinite).map(|p| p.value).unwrap_or(c(f64::NAN))
}

/// `(q; q)_n` for real `q`.
pub fn qfactorial(q: f64, n: usize) -> f64 {
    let mut p = 1.0;
    let mut qk = q;
    for _ in 0..n {
        p *= 1.0 - qk;
        qk *= q;
    }
    p
}

/// Truncated series value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumOptions {
    pub atol: f64,
    pub max_terms: usize,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions { atol: 1e-18, max_terms: 100_000 }
    }
}

/// Sums `sum_n t_n` given `t_0` and the term ratio `t_{n+1}/t_n`.
///
/// Stops once the last ten terms are all below `atol (1 - r)`, with `r` the
/// largest ratio observed over them; the tail is bounded by `|t| r / (1 - r)`.
fn sum_hypergeometric(
    first: Complex64,
    mut ratio: impl FnMut(usize) -> Result<Complex64>,
    opts: SumOptions,
) -> Result<SeriesValue> {
    const RUN: usize = 10;
    let mut sum = c(0.0);
    let mut term = first;
    let mut run = 0usize;
    let mut r_max = 0.0f64;
    for n in 0..opts.max_terms {
        sum += term;
        if term == c(0.0) {
            return Ok(SeriesValue { value: sum, tail_bound: 0.0, terms: n + 1 });
        }
        let r = ratio(n)?;
        let next = term * r;
        let rn = r.norm();
        if run == 0 {
            r_max = rn;
        } else {
            r_max = r_max.max(rn);
        }
        if r_max < 1.0 && term.norm() < opts.atol * (1.0 - r_max) {
            run += 1;
        } else {
            run = 0;
        }
        if run >= RUN {
            let tail = next.norm() / (1.0 - r_max);
            return Ok(SeriesValue { value: sum, tail_bound: tail, terms: n + 1 });
        }
        term = next;
    }
    Err(Error::NonConvergence { terms: opts.max_terms, last_term: term.norm() })
}

/// `2phi1(a, b; c; q, z) = sum_n (a;q)_n (b;q)_n / ((c;q)_n (q;q)_n) z^n`.
pub fn phi21(a: Complex64, b: Complex64, cc: Complex64, q: f64, z: Complex64, opts: SumOptions) -> Result<SeriesValue> {
    check_q(q)?;
    sum_hypergeometric(
        c(1.0),
        |n| {
            let qn = q.powi(n as i32);
            let den = (c(1.0) - cc * qn) * (1.0 - q * qn);
            if den.norm() == 0.0 {
                return Err(Error::InvalidParameter(format!("2phi1 lower parameter {cc} hits a pole")));
            }
            Ok((c(1.0) - a * qn) * (c(1.0) - b * qn) / den * z)
        },
        opts,
    )
}

/// Lemma-side comparison for `2phi1(a, q; qc; q, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityGap {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub gap: f64,
    /// Truncation bound on the series side.
    pub tail_bound: f64,
    /// Whether a removable singularity was evaluated by its limit.
    pub limit_route: bool,
}

impl IdentityGap {
    fn new(lhs: SeriesValue, rhs: Complex64, limit_route: bool) -> Self {
        IdentityGap { lhs: lhs.value, rhs, gap: (lhs.value - rhs).norm(), tail_bound: lhs.tail_bound, limit_route }
    }
}

fn check_lower_parameter(cc: Complex64, q: f64) -> Result<()> {
    // c in {1, 1/q, 1/q^2, ...} iff some factor 1 - c q^k vanishes.
    let mut qk = 1.0;
    while cc.norm() * qk >= 0.5 {
        if (c(1.0) - cc * qk).norm() <= 4.0 * EPS {
            return Err(Error::InvalidParameter(format!("c = {cc} is a non-positive power of q")));
        }
        qk *= q;
    }
    Ok(())
}

/// `2phi1(a, q; qc; q, q) = ((1-c)/(a-c)) (1 - (a;q)_inf / (c;q)_inf)`; at
/// `a = c` the right side is replaced by its limit `(1-c) sum_j q^j/(1 - c q^j)`.
pub fn lemma_2phi1(a: Complex64, cc: Complex64, q: f64) -> Result<IdentityGap> {
    check_q(q)?;
    check_lower_parameter(cc, q)?;
    let lhs = phi21(a, c(q), cc * q, q, c(q), SumOptions::default())?;
    if a == cc {
        let s = sum_hypergeometric(
            c(1.0) / (c(1.0) - cc),
            |n| {
                let qn = q.powi(n as i32);
                Ok((c(1.0) - cc * qn) / (c(1.0) - cc * qn * q) * q)
            },
            SumOptions::default(),
        )?;
        return Ok(IdentityGap::new(lhs, (c(1.0) - cc) * s.value, true));
    }
    let rhs = (c(1.0) - cc) / (a - cc) * (c(1.0) - qpoch_inf(a, q) / qpoch_inf(cc, q));
    Ok(IdentityGap::new(lhs, rhs, false))
}

/// `F(a, c) = 1 - ((a - c)/(1 - c)) 2phi1(a, q; qc; q, q)`.
pub fn lemma_f(a: Complex64, cc: Complex64, q: f64) -> Result<Complex64> {
    check_q(q)?;
    check_lower_parameter(cc, q)?;
    let s = phi21(a, c(q), cc * q, q, c(q), SumOptions::default())?;
    Ok(c(1.0) - (a - cc) / (c(1.0) - cc) * s.value)
}

/// `|F(a,c) - ((1-a)/(1-c)) F(qa, qc)| / max(1, |F(a,c)|)`.
pub fn lemma_relation_gap(a: Complex64, cc: Complex64, q: f64) -> Result<f64> {
    let lhs = lemma_f(a, cc, q)?;
    let rhs = (c(1.0) - a) / (c(1.0) - cc) * lemma_f(a * q, cc * q, q)?;
    Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
}

/// `2phi1(a, b; c; q, c/(ab))` against `(c/a;q)(c/b;q) / ((c;q)(c/(ab);q))`.
pub fn qgauss_check(a: Complex64, b: Complex64, cc: Complex64, q: f64) -> Result<IdentityGap> {
    check_q(q)?;
    let arg = cc / (a * b);
    if !(arg.norm() < 1.0) {
        return Err(Error::InvalidParameter(format!("q-Gauss needs |c/(ab)| < 1, got {}", arg.norm())));
    }
    check_lower_parameter(cc, q)?;
    let lhs = phi21(a, b, cc, q, arg, SumOptions::default())?;
    let rhs = qpoch_inf(cc / a, q) * qpoch_inf(cc / b, q) / (qpoch_inf(cc, q) * qpoch_inf(arg, q));
    Ok(IdentityGap::new(lhs, rhs, false))
}

/// `sum_l ((u;q)_l / (q;q)_l) z^l` against `(uz;q)_inf / (z;q)_inf`.
pub fn qbinomial_check(u: Complex64, z: Complex64, q: f64) -> Result<IdentityGap> {
    check_q(q)?;
    if !(z.norm() < 1.0) {
        return Err(Error::InvalidParameter(format!("q-binomial needs |z| < 1, got {}", z.norm())));
    }
    let lhs = sum_hypergeometric(
        c(1.0),
        |l| {
            let ql = q.powi(l as i32);
            Ok((c(1.0) - u * ql) / (1.0 - q * ql) * z)
        },
        SumOptions::default(),
    )?;
    let rhs = qpoch_inf(u * z, q) / qpoch_inf(z, q);
    Ok(IdentityGap::new(lhs, rhs, false))
}

/// `V_n^(a)(x; q)` and the orthonormal `P_n(x)` from the explicit finite sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asc2Poly {
    pub v: Complex64,
    pub phat: Complex64,
}

/// Explicit-sum evaluation:
/// `V_n = (-a)^n q^(-n(n-1)/2) (q;q)_n sum_k (x;q)_k a^-k / ((q;q)_{n-k} (q;q)_k)`
/// and `P_n = q^(n^2/2) a^(-n/2) V_n / sqrt((q;q)_n)`.
pub fn asc2_polynomial(params: QParams, x: Complex64, n: usize) -> Asc2Poly {
    let QParams { q, a } = params;
    let qq: Vec<f64> = (0..=n).map(|k| qfactorial(q, k)).collect();
    let nf = n as f64;
    // P_n = (-1)^n (aq)^(n/2) sqrt((q;q)_n) sum_k (x;q)_k a^(-k) / ((q;q)_{n-k} (q;q)_k)
    let mut sum = c(0.0);
    let mut xk = c(1.0);
    for k in 0..=n {
        let kf = k as f64;
        let w = (0.5 * nf * (a * q).ln() - kf * a.ln()).exp() / (qq[n - k] * qq[k]);
        sum += xk * w;
        xk *= c(1.0) - x * q.powi(k as i32);
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let phat = sum * (sign * qq[n].sqrt());
    let ln_vscale = nf * nf * 0.5 * q.ln() - 0.5 * nf * a.ln();
    let v = phat * qq[n].sqrt() / ln_vscale.exp();
    Asc2Poly { v, phat }
}

/// `P_n(a) = (-1)^n (q/a)^(n/2) / sqrt((q;q)_n)`.
pub fn asc2_phat_at_a(params: QParams, n: usize) -> f64 {
    let QParams { q, a } = params;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * (q / a).powf(0.5 * n as f64) / qfactorial(q, n).sqrt()
}

/// Both sides of `1 - (z-a) sum_n w_n(a) P_n(z) = (z;q)_inf / (a;q)_inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropositionCheck {
    pub series_side: Complex64,
    pub product_side: Complex64,
    pub gap: f64,
    /// Certified truncation bound on the series side.
    pub tail_bound: f64,
    /// Floating-point error estimate on the series side.
    pub rounding_bound: f64,
    pub terms: usize,
}

/// Series side from the closed forms of `w_n(a)` and `P_n(z)`, product side
/// from the Pochhammer symbols. Requires `0 < a <= q`.
pub fn proposition_asc2(params: QParams, z: Complex64, atol: f64) -> Result<PropositionCheck> {
    let QParams { q, a } = QParams::determinate(params.q, params.a)?;
    let u = z - a;
    let du = u.norm();
    let qq_inf = qpoch_inf(c(q), q).re;
    // kappa_n <= q^n / ((q;q)_inf (1-a)), so sum_{n>=N} kappa_n <= q^N / ((1-q)(q;q)_inf(1-a)).
    let tail_kappa = |nn: usize| q.powi(nn as i32) / ((1.0 - q) * qq_inf * (1.0 - a));
    let max_n = 4000usize;

    // Inner sums s_n = sum_{j>=n} (q;q)_j a^j, computed backwards from a cutoff far past max use.
    let mut kappas = Vec::new();
    let mut ln_prod = 0.0f64; // ln prod_{k<N} (1 + |u| kappa_k)
    let mut n_terms = 0usize;
    let mut bound = f64::INFINITY;
    let inner_len = |nn: usize| nn + 8 + (60.0 * 2f64.ln() / -a.ln()).ceil() as usize;
    // First pass: choose N from the closed-form kappas (cheap).
    let kappa_closed = |nn: usize| -> f64 {
        let mut s = 0.0;
        let mut qqj = qfactorial(q, nn);
        let mut aj = a.powi(nn as i32);
        let mut j = nn;
        while j < inner_len(nn) {
            s += qqj * aj;
            j += 1;
            qqj *= 1.0 - q.powi(j as i32);
            aj *= a;
        }
        (q / a).powi(nn as i32) / qfactorial(q, nn) * s
    };
    while n_terms < max_n {
        let t = tail_kappa(n_terms);
        bound = du * t * (ln_prod + du * t).exp();
        if bound <= atol || du == 0.0 {
            break;
        }
        let k = kappa_closed(n_terms);
        kappas.push(k);
        ln_prod += (du * k).ln_1p();
        n_terms += 1;
    }
    if du == 0.0 {
        bound = 0.0;
    }
    if bound > atol {
        return Err(Error::Uncertified { atol, max_terms: max_n, partial: f64::NAN, bound });
    }

    // Suffix sums of (q;q)_j a^j for j < n_terms.
    let cut = inner_len(n_terms);
    let mut terms_j = Vec::with_capacity(cut);
    let mut qqj = 1.0;
    let mut aj = 1.0;
    for j in 0..cut {
        terms_j.push(qqj * aj);
        qqj *= 1.0 - q.powi(j as i32 + 1);
        aj *= a;
    }
    let mut suffix = vec![0.0; cut + 1];
    for j in (0..cut).rev() {
        suffix[j] = suffix[j + 1] + terms_j[j];
    }

    let mut sum = c(0.0);
    let mut abs_sum = 0.0;
    for n in 0..n_terms {
        let wn = asc2_phat_at_a(QParams { q, a }, n) * suffix[n];
        let p = asc2_polynomial(QParams { q, a }, z, n).phat;
        let t = p * wn;
        sum += t;
        abs_sum += (n as f64 + 4.0) * t.norm();
    }
    let series_side = c(1.0) - u * sum;
    let product_side = qpoch_inf(z, q) / qpoch_inf(c(a), q);
    Ok(PropositionCheck {
        series_side,
        product_side,
        gap: (series_side - product_side).norm(),
        tail_bound: bound,
        rounding_bound: 4.0 * EPS * (1.0 + du * abs_sum),
        terms: n_terms,
    })
}

/// Maximum deviation of `W W^T + I` from the leading block of `J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationGap {
    pub max_abs: f64,
    /// Deviation relative to `max(1, |J_mn|)`.
    pub max_rel: f64,
}

/// Builds the lower-bidiagonal `W` with `W_nn = sqrt(a) q^(-n/2)` and
/// `W_{n+1,n} = q^(-(n+1)/2) sqrt(1 - q^(n+1))` and compares `W W^T + I`
/// with `J` entry by entry over the leading `size x size` block.
pub fn w_factorization_check_in<R: Real>(params: QParams, size: usize) -> Result<FactorizationGap> {
    if size < 2 {
        return Err(Error::InvalidParameter(format!("block size must be >= 2, got {size}")));
    }
    let QParams { q, a } = params;
    let src = params.source();
    let qr = R::from_f64(q);
    let sq = qr.sqrt();
    let sa = R::from_f64(a).sqrt();
    let diag: Vec<R> = (0..size).map(|n| sa * sq.powi(-(n as i32))).collect();
    let sub: Vec<R> = (0..size)
        .map(|n| sq.powi(-(n as i32 + 1)) * (R::one() - qr.powi(n as i32 + 1)).sqrt())
        .collect();
    let w = |m: usize, k: usize| -> R {
        if m == k {
            diag[k]
        } else if m == k + 1 {
            sub[k]
        } else {
            R::zero()
        }
    };
    let mut gap = FactorizationGap { max_abs: 0.0, max_rel: 0.0 };
    for m in 0..size {
        for n in 0..size {
            let mut s = if m == n { R::one() } else { R::zero() };
            for k in 0..=m.min(n) {
                s = s + w(m, k) * w(n, k);
            }
            let j = if m == n {
                src.beta_in::<R>(m)?
            } else if m == n + 1 {
                src.coeffs_in::<R>(n)?.0
            } else if n == m + 1 {
                src.coeffs_in::<R>(m)?.0
            } else {
                R::zero()
            };
            let d = (s - j).abs().to_f64();
            gap.max_abs = gap.max_abs.max(d);
            gap.max_rel = gap.max_rel.max(d / j.abs().to_f64().max(1.0));
        }
    }
    Ok(gap)
}

/// Runs the comparison in double-double: the entries grow like `q^-n`, so
/// binary64 rounding alone already reaches ~1e-12 in absolute terms at `n = 10`.
pub fn w_factorization_check(params: QParams, size: usize) -> Result<FactorizationGap> {
    w_factorization_check_in::<DoubleDouble>(params, size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pochhammer_small_cases() {
        assert_eq!(qpoch_finite(c(0.7), 0.3, 0), c(1.0));
        assert_relative_eq!(qpoch_finite(c(0.5), 0.5, 2).re, 0.375, max_relative = 1e-15);
        let inf = qpoch(c(0.5), 0.5, QCount::Infinite).unwrap();
        assert_relative_eq!(inf.value.re, 0.2887880950866024, max_relative = 1e-15);
        assert!(inf.trunc_bound < 1e-17);
    }

    #[test]
    fn pochhammer_vanishes_at_inverse_powers() {
        for &q in &[0.5, 0.3, 0.7] {
            for k in 0..5 {
                let v = qpoch_inf(c(q.powi(-k)), q);
                assert_eq!(v, c(0.0), "q = {q}, k = {k}");
            }
        }
    }

    #[test]
    fn pochhammer_recursion() {
        let x = Complex64::new(0.3, -0.7);
        let q = 0.6;
        for n in 0..20 {
            let lhs = qpoch_finite(x, q, n + 1);
            let rhs = qpoch_finite(x, q, n) * (c(1.0) - x * q.powi(n as i32));
            assert!((lhs - rhs).norm() <= 1e-15 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn lemma_examples() {
        let g = lemma_2phi1(c(0.0), c(0.25), 0.5).unwrap();
        assert!(g.gap <= 1e-12, "{g:?}");
        let g = lemma_2phi1(c(0.25), c(0.5), 0.5).unwrap();
        assert!(g.gap <= 1e-12, "{g:?}");
        let g = lemma_2phi1(c(0.4), c(0.4), 0.5).unwrap();
        assert!(g.limit_route);
        assert!(g.gap <= 1e-10, "{g:?}");
        assert!(lemma_2phi1(c(0.3), c(2.0), 0.5).is_err());
        assert!(lemma_2phi1(c(0.3), c(1.0), 0.5).is_err());
    }

    #[test]
    fn qgauss_examples() {
        let q = 0.5;
        let g = qgauss_check(c(q), c(q), c(q * q * q), q).unwrap();
        assert!(g.gap <= 1e-12, "{g:?}");
        let q = 0.3;
        let g = qgauss_check(c(q * q), c(q), c(q.powi(4)), q).unwrap();
        assert!(g.gap <= 1e-12, "{g:?}");
        assert!(qgauss_check(c(0.1), c(0.1), c(0.5), 0.5).is_err());
    }

    #[test]
    fn qbinomial_examples() {
        let g = qbinomial_check(c(0.5), c(0.5), 0.5).unwrap();
        assert_relative_eq!(g.rhs.re, 2.0, max_relative = 1e-15);
        assert!(g.gap <= 1e-12);
        let g = qbinomial_check(c(0.9), c(0.0), 0.5).unwrap();
        assert_eq!(g.lhs, c(1.0));
        assert_eq!(g.rhs, c(1.0));
        let g = qbinomial_check(c(0.0), c(0.3), 0.5).unwrap();
        assert!(g.gap <= 1e-12);
        assert!(qbinomial_check(c(0.0), c(1.0), 0.5).is_err());
    }

    #[test]
    fn asc2_polynomial_values() {
        let p = QParams::new(0.5, 0.5).unwrap();
        let v0 = asc2_polynomial(p, c(1.7), 0);
        assert_eq!(v0.v, c(1.0));
        assert_eq!(v0.phat, c(1.0));
        let p2 = asc2_polynomial(p, c(0.5), 2);
        assert_relative_eq!(p2.phat.re, 1.632993161855452, max_relative = 1e-13);
        assert_relative_eq!(asc2_phat_at_a(p, 2), 1.632993161855452, max_relative = 1e-14);
        // V_1(x) = x - 1 - a
        let v1 = asc2_polynomial(p, c(2.0), 1);
        assert_relative_eq!(v1.v.re, 2.0 - 1.5, max_relative = 1e-14);
    }

    #[test]
    fn proposition_examples() {
        let p = QParams::new(0.5, 0.5).unwrap();
        let r = proposition_asc2(p, c(0.5), 1e-14).unwrap();
        assert_eq!(r.series_side, c(1.0));
        assert_relative_eq!(r.product_side.re, 1.0, max_relative = 1e-15);
        let r = proposition_asc2(p, c(0.25), 1e-14).unwrap();
        assert!(r.gap <= 1e-10, "{r:?}");
        assert_relative_eq!(r.product_side.re, 2.0, max_relative = 1e-14);
        let r = proposition_asc2(p, c(2.0), 1e-14).unwrap();
        assert_eq!(r.product_side, c(0.0));
        assert!(r.series_side.norm() <= r.tail_bound + r.rounding_bound + 1e-12, "{r:?}");
        assert!(proposition_asc2(QParams::new(0.5, 0.7).unwrap(), c(0.1), 1e-12).is_err());
    }

    #[test]
    fn w_factorization() {
        let p = QParams::new(0.5, 0.5).unwrap();
        let g = w_factorization_check(p, 10).unwrap();
        assert!(g.max_abs <= 1e-12, "{g:?}");
        let g = w_factorization_check_in::<f64>(p, 10).unwrap();
        assert!(g.max_rel <= 1e-14, "{g:?}");
        let g = w_factorization_check(QParams::new(0.3, 0.1).unwrap(), 8).unwrap();
        assert!(g.max_abs <= 1e-12, "{g:?}");
        assert!(w_factorization_check(p, 1).is_err());
    }

    #[test]
    fn determinacy_gate() {
        assert!(QParams::new(0.5, 0.7).unwrap().is_indeterminate());
        assert!(!QParams::new(0.5, 0.5).unwrap().is_indeterminate());
        assert!(QParams::determinate(0.5, 0.5).is_ok());
        assert!(QParams::determinate(0.5, 0.5000001).is_err());
    }
}
