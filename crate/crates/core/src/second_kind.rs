//! Functions of the second kind `w_n(z)`, the Weyl function `w(z) = w_0(z)`,
//! the diagonal `kappa_n = w_n(0) P_n(0)` of the inverse and its trace.
//!
//! Below the spectrum (`z < gamma`) every quantity is a suffix of the series
//! `sum_j 1 / (alpha_j P_j(z) P_{j+1}(z))`, whose terms share one sign, so
//! suffix sums are accumulated backwards without cancellation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::green::{phat_values_in, q_values_in};
use crate::precision::{DoubleDouble, Real};
use crate::recurrence::{eval_phat, eval_q, step, ScaledPolyPair};
use crate::scaled::Scaled;
use crate::source::CoefficientSource;
use crate::tail::GeometricTail;

/// Truncation controls for the inner series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    pub atol: f64,
    pub max_terms: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions { atol: 1e-14, max_terms: 1000 }
    }
}

/// Relative truncation target for suffix sums: `2^-60`.
const LN_REL_TARGET: f64 = -41.58883083359672;

enum StopRule {
    Absolute(f64),
    /// Tail below `2^-60 |S_{k}|` where `k` is the given index.
    RelativeTo(usize),
}

/// Terms `t_j = 1 / (alpha_j P_j P_{j+1})` with backward suffix sums.
struct SuffixSeries {
    pairs: Vec<ScaledPolyPair>,
    suffix: Vec<Scaled>,
    ln_tail: f64,
}

impl SuffixSeries {
    fn build(src: &CoefficientSource, z: Complex64, rule: StopRule, max_terms: usize) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut terms: Vec<Scaled> = Vec::new();
        let mut tail = GeometricTail::new();
        let mut reference = Scaled::ZERO;
        let mut pair = eval_phat(src, z, 0)?;
        loop {
            let j = pairs.len();
            if j >= max_terms {
                let last = terms.last().map(|t| t.abs()).unwrap_or(f64::NAN);
                return Err(Error::NonConvergence { terms: j, last_term: last });
            }
            if j > 0 {
                pair = step(src, z, &pair)?;
            }
            let p = pair.current();
            let pn = pair.following();
            if p.is_zero() || pn.is_zero() {
                return Err(Error::PositivityViolated {
                    index: if p.is_zero() { j } else { j + 1 },
                    detail: format!("P_n vanishes at z = {z}; z is not below the spectrum"),
                });
            }
            let t = (p * pn).scale_by(src.alpha(j)?).recip();
            tail.push_ln(t.ln_abs());
            terms.push(t);
            pairs.push(pair);

            let done = match rule {
                StopRule::Absolute(atol) => tail.ln_bound().map(|b| b <= atol.ln()).unwrap_or(false),
                StopRule::RelativeTo(k) => {
                    if j >= k {
                        reference = reference.add(&t);
                    }
                    j >= k
                        && tail
                            .ln_bound()
                            .map(|b| b <= reference.ln_abs() + LN_REL_TARGET)
                            .unwrap_or(false)
                }
            };
            if done {
                break;
            }
        }
        let ln_tail = tail.ln_bound().unwrap_or(f64::INFINITY);
        let mut suffix = vec![Scaled::ZERO; terms.len()];
        let mut acc = Scaled::ZERO;
        for j in (0..terms.len()).rev() {
            acc = terms[j].add(&acc);
            suffix[j] = acc;
        }
        Ok(SuffixSeries { pairs, suffix, ln_tail })
    }
}

fn require_below(z: f64, gamma: f64) -> Result<()> {
    if !(z < gamma) {
        return Err(Error::InvalidParameter(format!(
            "evaluation point {z} is not below the spectral floor {gamma}"
        )));
    }
    Ok(())
}

/// Weyl function value with its truncation data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// `w(z) = -sum_j 1 / (alpha_j P_j(z) P_{j+1}(z))` for real `z < gamma`.
pub fn weyl(src: &CoefficientSource, z: f64, gamma: f64, opts: SeriesOptions) -> Result<WeylValue> {
    require_below(z, gamma)?;
    let s = SuffixSeries::build(src, Complex64::new(z, 0.0), StopRule::Absolute(opts.atol), opts.max_terms)?;
    Ok(WeylValue { value: -s.suffix[0].to_f64(), tail_bound: s.ln_tail.exp(), terms: s.pairs.len() })
}

/// `-Q_n(z) / P_n(z)`, which tends to `w(z)` as `n` grows.
pub fn markov_ratio(src: &CoefficientSource, z: f64, n: usize) -> Result<f64> {
    let zc = Complex64::new(z, 0.0);
    let q = eval_q(src, zc, n)?;
    let p = eval_phat(src, zc, n)?.current();
    Ok(-(q * p.recip()).to_f64())
}

/// `w_n(z)` for `n < count` at a real point below the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondKindTable {
    pub z: f64,
    /// `w_n(z)`, `n = 0..count`.
    pub values: Vec<f64>,
    /// `kappa_n = w_n(0) P_n(0)`, present only when `z == 0`.
    pub kappas: Option<Vec<f64>>,
    /// Number of inner-series terms summed.
    pub trunc_len: usize,
    /// Bound on the relative truncation error of every reported value.
    pub tail_bound: f64,
}

/// `w_n(z) = -(sum_{j >= n} 1/(alpha_j P_j P_{j+1})) P_n(z)` for `n < count`.
pub fn second_kind_values(
    src: &CoefficientSource,
    z: f64,
    gamma: f64,
    count: usize,
    opts: SeriesOptions,
) -> Result<SecondKindTable> {
    require_below(z, gamma)?;
    if count == 0 {
        return Ok(SecondKindTable { z, values: vec![], kappas: None, trunc_len: 0, tail_bound: 0.0 });
    }
    let s = SuffixSeries::build(src, Complex64::new(z, 0.0), StopRule::RelativeTo(count - 1), opts.max_terms)?;
    let w: Vec<Scaled> = (0..count).map(|n| -(s.suffix[n] * s.pairs[n].current())).collect();
    let kappas = (z == 0.0).then(|| {
        w.iter().zip(&s.pairs).map(|(wn, p)| (*wn * p.current()).to_f64()).collect()
    });
    let rel = (s.ln_tail - s.suffix[count - 1].ln_abs()).exp();
    Ok(SecondKindTable {
        z,
        values: w.iter().map(Scaled::to_f64).collect(),
        kappas,
        trunc_len: s.pairs.len(),
        tail_bound: rel,
    })
}

/// `w_n(z)` for complex `z` off the real axis by the same suffix series.
/// Uncertified: the same-sign argument only holds below the spectrum.
pub fn second_kind_values_complex(
    src: &CoefficientSource,
    z: Complex64,
    count: usize,
    opts: SeriesOptions,
) -> Result<Vec<Complex64>> {
    if count == 0 {
        return Ok(vec![]);
    }
    let s = SuffixSeries::build(src, z, StopRule::RelativeTo(count - 1), opts.max_terms)?;
    Ok((0..count).map(|n| -(s.suffix[n] * s.pairs[n].current()).to_complex()).collect())
}

/// The second route `w_n(z) = w(z) P_n(z) + Q_n(z)`, evaluated entirely in
/// double-double so that the cancellation between the two products (which
/// grows geometrically with `n`) stays below binary64 resolution.
pub fn second_kind_by_weyl(src: &CoefficientSource, z: f64, count: usize, max_terms: usize) -> Result<Vec<f64>> {
    type D = DoubleDouble;
    let zr = D::from_f64(z);
    let mut len = (2 * count).max(64);
    loop {
        let p = phat_values_in::<D>(src, zr, len + 1)?;
        let mut w = D::zero();
        let mut tail = GeometricTail::new();
        let mut converged = false;
        for j in 0..len {
            let t = D::one() / (src.coeffs_in::<D>(j)?.0 * p[j] * p[j + 1]);
            w = w - t;
            tail.push(t.abs().to_f64());
            if j >= count {
                if let Some(b) = tail.bound() {
                    if b <= 1e-30 * w.abs().to_f64() {
                        converged = true;
                        break;
                    }
                }
            }
        }
        if converged {
            let q = q_values_in::<D>(src, zr, count)?;
            return Ok((0..count).map(|n| (w * p[n] + q[n]).to_f64()).collect());
        }
        if len >= max_terms {
            return Err(Error::NonConvergence { terms: len, last_term: f64::NAN });
        }
        len = (2 * len).min(max_terms);
    }
}

/// Diagonal of `J^{-1}` with partial sums and a geometric tail estimate.
///
/// Built once per source and shared read-only by the characteristic-function
/// and spectrum code.
#[derive(Debug, Clone)]
pub struct KappaTable {
    p0: Vec<ScaledPolyPair>,
    suffix: Vec<Scaled>,
    kappas: Vec<f64>,
    partial: Vec<f64>,
    /// `sum_{start <= n < len} kappa_n`, accumulated backwards.
    suffix_kappa: Vec<f64>,
    tail: f64,
    inner_rel: f64,
}

impl KappaTable {
    /// `kappa_n` for `n < count`, with inner suffixes summed to relative
    /// accuracy `2^-60`.
    pub fn build(src: &CoefficientSource, count: usize, max_terms: usize) -> Result<Self> {
        if !src.is_infinite() {
            return Err(Error::FiniteSource);
        }
        if count == 0 {
            return Err(Error::InvalidParameter("kappa table needs at least one entry".into()));
        }
        let s = SuffixSeries::build(src, Complex64::new(0.0, 0.0), StopRule::RelativeTo(count - 1), max_terms)?;
        let mut kappas = Vec::with_capacity(count);
        let mut partial = Vec::with_capacity(count + 1);
        let mut tail = GeometricTail::new();
        let mut acc = 0.0;
        partial.push(0.0);
        for n in 0..count {
            let p = s.pairs[n].current();
            let k = -(s.suffix[n] * p * p);
            let kv = k.to_f64();
            if !(k.phase().re > 0.0) {
                return Err(Error::PositivityViolated {
                    index: n,
                    detail: format!("kappa_{n} = {kv:e} is not positive"),
                });
            }
            tail.push_ln(k.ln_abs());
            acc += kv;
            kappas.push(kv);
            partial.push(acc);
        }
        let tail_est = tail.bound().unwrap_or(f64::INFINITY);
        let mut suffix_kappa = vec![0.0; count + 1];
        for n in (0..count).rev() {
            suffix_kappa[n] = suffix_kappa[n + 1] + kappas[n];
        }
        let inner_rel = (s.ln_tail - s.suffix[count - 1].ln_abs()).exp();
        Ok(KappaTable {
            p0: s.pairs[..count].to_vec(),
            suffix: s.suffix[..count].to_vec(),
            kappas,
            partial,
            suffix_kappa,
            tail: tail_est,
            inner_rel,
        })
    }

    /// Grows the table (doubling) until the tail of `sum kappa_n` is at most
    /// `target`.
    pub fn with_tail_below(src: &CoefficientSource, target: f64, max_terms: usize) -> Result<Self> {
        let mut count = 32.min(max_terms.max(1));
        loop {
            let inner_cap = max_terms.max(count + 64);
            let t = KappaTable::build(src, count, inner_cap)?;
            if t.tail <= target {
                return Ok(t);
            }
            if count >= max_terms {
                return Err(Error::Uncertified {
                    atol: target,
                    max_terms,
                    partial: t.partial_sum(),
                    bound: t.tail,
                });
            }
            count = (2 * count).min(max_terms);
        }
    }

    pub fn len(&self) -> usize {
        self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappas.is_empty()
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    /// `sum_{k < n} kappa_k`.
    pub fn partial_sums(&self) -> &[f64] {
        &self.partial[1..]
    }

    pub fn partial_sum(&self) -> f64 {
        *self.partial.last().unwrap_or(&0.0)
    }

    /// Geometric estimate of `sum_{n >= len} kappa_n`.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Relative accuracy of the inner suffix sums.
    pub fn inner_relative_error(&self) -> f64 {
        self.inner_rel
    }

    /// Upper estimate of `tr J^{-1} = sum kappa_n`.
    pub fn total_upper(&self) -> f64 {
        (self.partial_sum() + self.tail) * (1.0 + self.inner_rel)
    }

    /// Estimate of `sum_{n >= start} kappa_n`.
    pub fn tail_from(&self, start: usize) -> f64 {
        let start = start.min(self.len());
        self.suffix_kappa[start] * (1.0 + self.inner_rel) + self.tail
    }

    /// `w_n(0)` as a scaled number.
    pub fn w0(&self, n: usize) -> Scaled {
        -(self.suffix[n] * self.p0[n].current())
    }

    /// `P_n(0)` as a scaled number.
    pub fn p0(&self, n: usize) -> Scaled {
        self.p0[n].current()
    }

    /// `w_n(0) / P_n(0) = -sum_{j >= n} t_j(0)`.
    pub fn w0_over_p0(&self, n: usize) -> f64 {
        -self.suffix[n].to_f64()
    }
}

/// `kappa_n` for `n < count` together with partial sums and a tail estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaSequence {
    pub kappas: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub tail_estimate: f64,
}

pub fn kappa_sequence(src: &CoefficientSource, count: usize, max_terms: usize) -> Result<KappaSequence> {
    let t = KappaTable::build(src, count, max_terms.max(count + 64))?;
    Ok(KappaSequence {
        kappas: t.kappas().to_vec(),
        partial_sums: t.partial_sums().to_vec(),
        tail_estimate: t.tail(),
    })
}

/// `tr J^{-1}` with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceValue {
    pub value: f64,
    pub error_bound: f64,
    pub terms: usize,
}

/// `tr J^{-1} = sum_n kappa_n`, summed until the tail is at most `atol`.
pub fn trace_inverse(src: &CoefficientSource, atol: f64, max_terms: usize) -> Result<TraceValue> {
    let t = KappaTable::with_tail_below(src, atol, max_terms)?;
    let value = t.partial_sum();
    Ok(TraceValue {
        value,
        error_bound: t.tail() + value * t.inner_relative_error(),
        terms: t.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn shifted() -> CoefficientSource {
        CoefficientSource::asc2(0.5, 0.5).unwrap().with_shift(0.5)
    }

    /// Closed-form oracle: w(a) = sum_j (q;q)_j a^j.
    fn weyl_at_a(q: f64, a: f64) -> f64 {
        let mut s = 0.0;
        let mut qq = 1.0;
        let mut ap = 1.0;
        for j in 0..400 {
            s += qq * ap;
            qq *= 1.0 - q.powi(j + 1);
            ap *= a;
        }
        s
    }

    #[test]
    fn weyl_matches_closed_form() {
        let src = CoefficientSource::asc2(0.5, 0.5).unwrap();
        let w = weyl(&src, 0.5, 1.0, SeriesOptions::default()).unwrap();
        assert_relative_eq!(w.value, weyl_at_a(0.5, 0.5), max_relative = 1e-14);
        assert_relative_eq!(w.value, 1.4224238098267952, max_relative = 1e-14);
        assert!(w.value > 0.0);
    }

    #[test]
    fn weyl_rejects_points_on_the_spectrum() {
        let src = CoefficientSource::asc2(0.5, 0.5).unwrap();
        assert!(weyl(&src, 1.0, 1.0, SeriesOptions::default()).is_err());
    }

    #[test]
    fn markov_limit() {
        let src = CoefficientSource::asc2(0.5, 0.5).unwrap();
        let w = weyl(&src, 0.3, 1.0, SeriesOptions::default()).unwrap().value;
        let m = markov_ratio(&src, 0.3, 50).unwrap();
        assert!((w - m).abs() < 1e-8);
    }

    #[test]
    fn w0_is_weyl() {
        let src = shifted();
        let t = second_kind_values(&src, -1.0, 0.5, 5, SeriesOptions::default()).unwrap();
        let w = weyl(&src, -1.0, 0.5, SeriesOptions { atol: 1e-17, max_terms: 1000 }).unwrap();
        assert_relative_eq!(t.values[0], w.value, max_relative = 1e-15);
        assert!(t.kappas.is_none());
    }

    #[test]
    fn closed_form_wn_at_a() {
        // w_2(a) = (1/sqrt((q;q)_2)) (q/a) sum_{j>=2} (q;q)_j a^j
        let (q, a) = (0.5, 0.5);
        let t = second_kind_values(&shifted(), 0.0, 0.5, 3, SeriesOptions::default()).unwrap();
        let qq2 = (1.0 - q) * (1.0 - q * q);
        let tail = weyl_at_a(q, a) - 1.0 - (1.0 - q) * a;
        let expect = (q / a) * tail / qq2.sqrt();
        assert_relative_eq!(t.values[2], expect, max_relative = 1e-12);
        assert!(t.kappas.is_some());
    }

    #[test]
    fn kappa_basic_properties() {
        let seq = kappa_sequence(&shifted(), 30, 1000).unwrap();
        let w = weyl(&shifted(), 0.0, 0.5, SeriesOptions::default()).unwrap().value;
        assert_relative_eq!(seq.kappas[0], w, max_relative = 1e-14);
        assert!(seq.kappas.iter().all(|&k| k > 0.0));
        assert!(seq.partial_sums.windows(2).all(|p| p[1] > p[0]));
        let r = seq.kappas[29] / seq.kappas[28];
        assert!(r < 1.0);
    }

    #[test]
    fn trace_of_shifted_asc2() {
        // Independent series sum_n 1/(q^-n - a)
        let oracle: f64 = (0..200).map(|n| 1.0 / (0.5f64.powi(-n) - 0.5)).sum();
        let t = trace_inverse(&shifted(), 1e-12, 1000).unwrap();
        assert!((t.value - oracle).abs() < 1e-10, "{} vs {}", t.value, oracle);
        assert!((t.value - 3.2133903048305835).abs() < 1e-10);
        assert!(t.value >= seq_first());
    }

    fn seq_first() -> f64 {
        kappa_sequence(&shifted(), 1, 1000).unwrap().kappas[0]
    }

    #[test]
    fn table_sources_have_no_tail() {
        let src = CoefficientSource::table(vec![1.0; 4], vec![3.0; 5]).unwrap();
        assert_eq!(KappaTable::build(&src, 3, 100).unwrap_err(), Error::FiniteSource);
    }
}
