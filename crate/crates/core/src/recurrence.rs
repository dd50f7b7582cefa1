//! Three-term recurrences: orthonormal polynomials, polynomials of the second
//! kind and associated polynomials.
//!
//! Every recurrence runs on a pair of consecutive values sharing one binary
//! exponent. The pair is rescaled by an exact power of two whenever its
//! larger entry leaves `[2^-64, 2^64]`, so nothing overflows however fast the
//! values grow and no rounding is introduced by the rescaling. Since
//! the pair is advanced without dividing by the current value, an exact zero
//! of `P_n(z)` on the path needs no special treatment: the next step simply
//! carries `P_{n+1}` forward.

use num_complex::Complex64;

use crate::error::Result;
use crate::scaled::{exponent_of, ldexp, Scaled};
use crate::source::CoefficientSource;

const RESCALE_HI: f64 = 18446744073709551616.0; // 2^64
const RESCALE_LO: f64 = 1.0 / RESCALE_HI;

/// Two consecutive recurrence values `(y_n, y_{n+1})` with a shared scale.
///
/// For the orthonormal polynomials this represents `(P_n(z), P_{n+1}(z))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPolyPair {
    n: usize,
    exp: i64,
    cur: Complex64,
    next: Complex64,
}

impl ScaledPolyPair {
    fn new(n: usize, exp: i64, cur: Complex64, next: Complex64) -> Self {
        let m = cur.norm().max(next.norm());
        if m.is_finite() && (m > RESCALE_HI || (m < RESCALE_LO && m > 0.0)) {
            let e = exponent_of(m);
            let sc = |z: Complex64| Complex64::new(ldexp(z.re, -e), ldexp(z.im, -e));
            ScaledPolyPair { n, exp: exp + e, cur: sc(cur), next: sc(next) }
        } else {
            ScaledPolyPair { n, exp, cur, next }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `y_n` as a scaled number.
    pub fn current(&self) -> Scaled {
        Scaled::new(self.cur, self.exp)
    }

    /// `y_{n+1}` as a scaled number.
    pub fn following(&self) -> Scaled {
        Scaled::new(self.next, self.exp)
    }

    /// `y_{n+1} / y_n`, or `None` when `y_n` is exactly zero.
    pub fn ratio(&self) -> Option<Complex64> {
        if self.cur == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some(self.next / self.cur)
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.cur == Complex64::new(0.0, 0.0)
    }

    /// `ln |y_n|`.
    pub fn log_mag(&self) -> f64 {
        self.current().ln_abs()
    }

    /// `y_n / |y_n|` (the sign for real arguments).
    pub fn phase(&self) -> Complex64 {
        self.current().phase()
    }

    /// Plain `y_n`; may overflow for large `n`.
    pub fn value(&self) -> Complex64 {
        self.current().to_complex()
    }

    /// Plain `y_{n+1}`.
    pub fn next_value(&self) -> Complex64 {
        self.following().to_complex()
    }
}

/// Advances a pair by one index using `alpha_{n+1} y_{n+2} = (z - beta_{n+1}) y_{n+1} - alpha_n y_n`.
pub(crate) fn step(src: &CoefficientSource, z: Complex64, pair: &ScaledPolyPair) -> Result<ScaledPolyPair> {
    let n = pair.n;
    let alpha_n = src.alpha(n)?;
    let (alpha_n1, beta_n1) = src.coeffs(n + 1)?;
    let y = ((z - beta_n1) * pair.next - alpha_n * pair.cur) / alpha_n1;
    Ok(ScaledPolyPair::new(n + 1, pair.exp, pair.next, y))
}

fn phat_start(src: &CoefficientSource, z: Complex64) -> Result<ScaledPolyPair> {
    let (alpha0, beta0) = src.coeffs(0)?;
    Ok(ScaledPolyPair::new(0, 0, Complex64::new(1.0, 0.0), (z - beta0) / alpha0))
}

fn q_start(src: &CoefficientSource) -> Result<ScaledPolyPair> {
    let alpha0 = src.alpha(0)?;
    Ok(ScaledPolyPair::new(0, 0, Complex64::new(0.0, 0.0), Complex64::new(1.0 / alpha0, 0.0)))
}

fn walk(
    src: &CoefficientSource,
    z: Complex64,
    start: ScaledPolyPair,
    count: usize,
) -> Result<Vec<ScaledPolyPair>> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return Ok(out);
    }
    let mut pair = start;
    out.push(pair);
    while out.len() < count {
        pair = step(src, z, &pair)?;
        out.push(pair);
    }
    Ok(out)
}

/// Pairs `(P_n(z), P_{n+1}(z))` for `n = 0..count`.
pub fn phat_pairs(src: &CoefficientSource, z: Complex64, count: usize) -> Result<Vec<ScaledPolyPair>> {
    walk(src, z, phat_start(src, z)?, count)
}

/// Pairs `(Q_n(z), Q_{n+1}(z))` for `n = 0..count`.
pub fn q_pairs(src: &CoefficientSource, z: Complex64, count: usize) -> Result<Vec<ScaledPolyPair>> {
    walk(src, z, q_start(src)?, count)
}

/// `(P_n(z), P_{n+1}(z))` with `P_0 = 1`, `P_1 = (z - beta_0)/alpha_0`.
pub fn eval_phat(src: &CoefficientSource, z: Complex64, n: usize) -> Result<ScaledPolyPair> {
    let mut pair = phat_start(src, z)?;
    for _ in 0..n {
        pair = step(src, z, &pair)?;
    }
    Ok(pair)
}

/// `Q_n(z)` with `Q_0 = 0`, `Q_1 = 1/alpha_0`.
pub fn eval_q(src: &CoefficientSource, z: Complex64, n: usize) -> Result<Scaled> {
    let mut pair = q_start(src)?;
    for _ in 0..n {
        pair = step(src, z, &pair)?;
    }
    Ok(pair.current())
}

/// Associated polynomial `Q_m^(n)(z)`, the solution of `(J - z) y = e_n` that
/// vanishes up to index `n`.
///
/// The Wronskian form `Q_m P_n - P_m Q_n` cancels badly once `Q_k / P_k` has
/// settled, so it is evaluated telescoped as
/// `P_m P_n sum_{n <= j < m} 1 / (alpha_j P_j P_{j+1})`, which is the same
/// quantity since `Q_k = P_k sum_{j<k} 1 / (alpha_j P_j P_{j+1})`. Below the
/// spectrum the summands share one sign. If some `P_j` on the way is zero the
/// plain difference is used.
pub fn eval_q_assoc(src: &CoefficientSource, z: Complex64, m: usize, n: usize) -> Result<Scaled> {
    if m <= n {
        return Ok(Scaled::ZERO);
    }
    let p = phat_pairs(src, z, m + 1)?;
    let q = q_pairs(src, z, m + 1)?;
    assoc_from_tables(src, &p, &q, m, n)
}

/// `Q_m^(n)` from precomputed tables of pairs (index `k` holds `y_k`).
pub(crate) fn assoc_from_tables(
    src: &CoefficientSource,
    p: &[ScaledPolyPair],
    q: &[ScaledPolyPair],
    m: usize,
    n: usize,
) -> Result<Scaled> {
    if m <= n {
        return Ok(Scaled::ZERO);
    }
    if (n..=m).any(|k| p[k].is_exact_zero()) {
        let a = q[m].current() * p[n].current();
        let b = p[m].current() * q[n].current();
        return Ok(a.sub(&b));
    }
    let mut sum = Scaled::ZERO;
    for j in n..m {
        let t = (p[j].current() * p[j + 1].current()).scale_by(src.alpha(j)?).recip();
        sum = sum.add(&t);
    }
    Ok(sum * p[m].current() * p[n].current())
}

/// Unit roundoff multiple charged per recurrence step; covers the rounding
/// of the coefficients themselves and of the complex arithmetic.
const STEP_ROUNDING: f64 = 8.0 * f64::EPSILON;

/// `(P_n(z), P_{n+1}(z))` together with a first-order running bound on the
/// accumulated rounding error of each entry.
///
/// Near a zero of the limit the computed values are a nearly minimal
/// solution, and forward evaluation loses relative accuracy; the running
/// bound tracks that loss instead of assuming it away.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedPair {
    n: usize,
    exp: i64,
    cur: Complex64,
    next: Complex64,
    err_cur: f64,
    err_next: f64,
}

impl TrackedPair {
    fn new(n: usize, exp: i64, cur: Complex64, next: Complex64, err_cur: f64, err_next: f64) -> Self {
        let m = cur.norm().max(next.norm()).max(err_cur).max(err_next);
        if m.is_finite() && (m > RESCALE_HI || (m < RESCALE_LO && m > 0.0)) {
            let e = exponent_of(m);
            let sc = |z: Complex64| Complex64::new(ldexp(z.re, -e), ldexp(z.im, -e));
            TrackedPair {
                n,
                exp: exp + e,
                cur: sc(cur),
                next: sc(next),
                err_cur: ldexp(err_cur, -e),
                err_next: ldexp(err_next, -e),
            }
        } else {
            TrackedPair { n, exp, cur, next, err_cur, err_next }
        }
    }

    /// Starts at `n = 0` with `P_0 = 1`.
    pub fn start(src: &CoefficientSource, z: Complex64) -> Result<Self> {
        let (alpha0, beta0) = src.coeffs(0)?;
        let p1 = (z - beta0) / alpha0;
        let e1 = STEP_ROUNDING * (z.norm() + beta0.abs()) / alpha0;
        Ok(TrackedPair::new(0, 0, Complex64::new(1.0, 0.0), p1, 0.0, e1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn current(&self) -> Scaled {
        Scaled::new(self.cur, self.exp)
    }

    /// `ln` of the error bound on `P_n(z)`.
    pub fn ln_error(&self) -> f64 {
        if self.err_cur == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.err_cur.ln() + self.exp as f64 * std::f64::consts::LN_2
        }
    }

    pub fn step(&self, src: &CoefficientSource, z: Complex64) -> Result<Self> {
        let n = self.n;
        let alpha_n = src.alpha(n)?;
        let (alpha_n1, beta_n1) = src.coeffs(n + 1)?;
        let zb = z - beta_n1;
        let y = (zb * self.next - alpha_n * self.cur) / alpha_n1;
        let propagated = (zb.norm() * self.err_next + alpha_n * self.err_cur) / alpha_n1;
        let local = STEP_ROUNDING
            * (((z.norm() + beta_n1.abs()) * self.next.norm() + alpha_n * self.cur.norm()) / alpha_n1 + y.norm());
        Ok(TrackedPair::new(n + 1, self.exp, self.next, y, self.err_next, propagated + local))
    }
}
