//! The characteristic function `F(z) = 1 - z sum_n w_n(0) P_n(z)`, whose
//! zeros are the eigenvalues of `J`.
//!
//! Two evaluation routes are provided: the certified partial sum and the
//! limit of `P_n(z) / P_n(0)`. Products over known eigenvalues and the
//! q-Pochhammer closed form serve as references.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qseries::qpoch_inf;
use crate::recurrence::{phat_pairs, TrackedPair};
use crate::scaled::Scaled;
use crate::second_kind::KappaTable;
use crate::source::CoefficientSource;

/// Default cap on the number of `kappa_n` the evaluator will compute.
pub const DEFAULT_MAX_TERMS: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    PartialSum,
    RatioLimit,
}

/// One evaluation of `F(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharFnValue {
    pub z: Complex64,
    pub value: Complex64,
    /// Truncation bound. Certified for the partial sum, a successive
    /// difference for the ratio route.
    pub tail_bound: f64,
    /// Floating-point error estimate of the computed terms.
    pub rounding_bound: f64,
    pub method: Method,
    pub terms_used: usize,
    /// True when `tail_bound` is a proven bound meeting the request.
    pub certified: bool,
}

impl CharFnValue {
    pub fn total_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

/// Partial-sum result kept in scaled form, so that `|F|` far beyond the
/// double range (large `z`) still yields a usable sign and magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledCharFn {
    pub value: Scaled,
    /// `ln` of the certified truncation bound.
    pub ln_tail: f64,
    /// `ln` of the rounding estimate.
    pub ln_rounding: f64,
    pub terms: usize,
    pub certified: bool,
}

impl ScaledCharFn {
    /// `ln` of tail plus rounding.
    pub fn ln_total_bound(&self) -> f64 {
        ln_add(self.ln_tail, self.ln_rounding)
    }

    /// Whether the computed value is provably nonzero with the reported sign.
    pub fn sign_is_certain(&self) -> bool {
        !self.value.is_zero() && self.ln_total_bound() < self.value.ln_abs()
    }
}

fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// When to stop adding terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    /// Truncation bound at most this absolute value.
    Absolute(f64),
    /// Truncation bound at most this fraction of the computed `|F(z)|`.
    Relative(f64),
}

/// Partial-sum evaluator sharing one `kappa` table across evaluations.
#[derive(Debug, Clone)]
pub struct CharFn {
    src: CoefficientSource,
    table: KappaTable,
    max_terms: usize,
}

impl CharFn {
    /// Builds the `kappa` table; the source must be an infinite,
    /// positive-definite family with trace-class inverse.
    pub fn new(src: &CoefficientSource, max_terms: usize) -> Result<Self> {
        src.require_determinate()?;
        let table = KappaTable::with_tail_below(src, 1e-40, max_terms)?;
        Ok(CharFn { src: src.clone(), table, max_terms })
    }

    pub fn source(&self) -> &CoefficientSource {
        &self.src
    }

    pub fn kappas(&self) -> &KappaTable {
        &self.table
    }

    /// Upper estimate of `sum kappa_n`.
    pub fn kappa_total(&self) -> f64 {
        self.table.total_upper()
    }

    fn grow(&mut self) -> Result<bool> {
        let len = self.table.len();
        if len >= self.max_terms {
            return Ok(false);
        }
        let next = (2 * len).min(self.max_terms);
        self.table = KappaTable::build(&self.src, next, self.max_terms.max(next + 64))?;
        Ok(true)
    }

    /// `F(z)` as a scaled number.
    ///
    /// Truncating after `N` terms leaves `z sum_{n>=N} w_n(0) P_n(z)`. Writing
    /// `P_n(z)/P_n(0)` through elementary symmetric sums of the roots gives
    /// `|w_n(0) P_n(z)| <= kappa_n prod_{k<n} (1 + |z| kappa_k)`, hence the
    /// bound `|z| T_N prod_{k<N} (1 + |z| kappa_k) exp(|z| T_N)` with
    /// `T_N = sum_{n>=N} kappa_n`.
    pub fn eval_scaled(&mut self, z: Complex64, target: Target) -> Result<ScaledCharFn> {
        if z == Complex64::new(0.0, 0.0) {
            return Ok(ScaledCharFn {
                value: Scaled::ONE,
                ln_tail: f64::NEG_INFINITY,
                ln_rounding: f64::NEG_INFINITY,
                terms: 0,
                certified: true,
            });
        }
        loop {
            let r = self.eval_with_table(z, target)?;
            if r.certified || !self.grow()? {
                return Ok(r);
            }
        }
    }

    fn eval_with_table(&self, z: Complex64, target: Target) -> Result<ScaledCharFn> {
        let az = z.norm();
        let ln_z = az.ln();
        let len = self.table.len();
        let inner = self.table.inner_relative_error();
        let mut sum = Scaled::ZERO;
        let mut ln_abs_sum = f64::NEG_INFINITY;
        // First-order bound on the error of the accumulated terms.
        let mut ln_term_err = f64::NEG_INFINITY;
        let mut ln_prod = 0.0f64;
        let mut pair = TrackedPair::start(&self.src, z)?;
        let mut best: Option<ScaledCharFn> = None;
        for n in 0..=len {
            let t_n = self.table.tail_from(n);
            let ln_tail = ln_z + t_n.ln() + ln_prod + az * t_n;
            let value = Scaled::ONE.sub(&(sum * Scaled::from_complex(z)));
            let ln_sum_err = ln_add(ln_term_err, (2.0 * f64::EPSILON * (n as f64 + 1.0)).ln() + ln_abs_sum);
            let ln_rounding = ln_add(f64::EPSILON.ln(), ln_z + ln_sum_err);
            let goal = match target {
                Target::Absolute(atol) => atol.ln(),
                Target::Relative(rel) => value.ln_abs() + rel.ln(),
            };
            let candidate = ScaledCharFn { value, ln_tail, ln_rounding, terms: n, certified: ln_tail <= goal };
            if candidate.certified {
                return Ok(candidate);
            }
            best = Some(candidate);
            if n == len {
                break;
            }
            if n > 0 {
                pair = pair.step(&self.src, z)?;
            }
            let w = self.table.w0(n);
            let term = w * pair.current();
            let ln_w = w.ln_abs();
            let err = ln_add(ln_w + pair.ln_error(), term.ln_abs() + (inner + 4.0 * f64::EPSILON).ln());
            ln_term_err = ln_add(ln_term_err, err);
            ln_abs_sum = ln_add(ln_abs_sum, term.ln_abs());
            sum = sum.add(&term);
            ln_prod += (az * self.table.kappas()[n]).ln_1p();
        }
        Ok(best.expect("loop runs at least once"))
    }

    /// Certified partial sum with absolute truncation target `atol`.
    pub fn partial_sum(&mut self, z: Complex64, atol: f64) -> Result<CharFnValue> {
        let r = self.eval_scaled(z, Target::Absolute(atol))?;
        Ok(CharFnValue {
            z,
            value: r.value.to_complex(),
            tail_bound: r.ln_tail.exp(),
            rounding_bound: r.ln_rounding.exp(),
            method: Method::PartialSum,
            terms_used: r.terms,
            certified: r.certified,
        })
    }

    /// Upper bound `exp(|z| S) kappa_n` on the size of the `n`-th term.
    pub fn per_term_bound(&self, z: Complex64, n: usize) -> Option<f64> {
        let k = *self.table.kappas().get(n)?;
        Some((z.norm() * self.kappa_total()).exp() * k)
    }

    /// `|w_n(0) P_n(z)|` for `n < count`.
    pub fn term_magnitudes(&self, z: Complex64, count: usize) -> Result<Vec<f64>> {
        let count = count.min(self.table.len());
        let pairs = phat_pairs(&self.src, z, count)?;
        Ok((0..count).map(|n| (self.table.w0(n) * pairs[n].current()).abs()).collect())
    }
}

/// `F(z)` by the certified partial sum.
pub fn charfn_partial_sum(src: &CoefficientSource, z: Complex64, atol: f64) -> Result<CharFnValue> {
    CharFn::new(src, DEFAULT_MAX_TERMS)?.partial_sum(z, atol)
}

/// `F(z)` as `P_n(z) / P_n(0)` at `n = n_max`; the tail bound is the change
/// over the last step and is heuristic only.
pub fn charfn_ratio(src: &CoefficientSource, z: Complex64, n_max: usize) -> Result<CharFnValue> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("ratio route needs n_max >= 1".into()));
    }
    src.check_positive_alphas(n_max)?;
    let pz = phat_pairs(src, z, n_max + 1)?;
    let p0 = phat_pairs(src, Complex64::new(0.0, 0.0), n_max + 1)?;
    let ratio = |n: usize| -> Result<Scaled> {
        let d = p0[n].current();
        if d.is_zero() {
            return Err(Error::PositivityViolated {
                index: n,
                detail: "P_n(0) vanishes, so J is not positive definite".into(),
            });
        }
        Ok(pz[n].current() * d.recip())
    };
    let last = ratio(n_max)?;
    let prev = ratio(n_max - 1)?;
    let value = last.to_complex();
    let n = n_max as f64;
    Ok(CharFnValue {
        z,
        value,
        tail_bound: last.sub(&prev).abs(),
        rounding_bound: 4.0 * f64::EPSILON * (n + 2.0) * value.norm(),
        method: Method::RatioLimit,
        terms_used: n_max,
        certified: false,
    })
}

/// Finite product over known eigenvalues with a bound for the missing factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HadamardValue {
    pub value: Complex64,
    pub tail_bound: f64,
    /// Estimated `sum_{n > N} 1 / lambda_n`.
    pub tail_sum: f64,
    /// Largest ratio `lambda_n / lambda_{n+1}` over the last few eigenvalues.
    pub tail_ratio: f64,
}

/// `prod_n (1 - z / lambda_n)` over the supplied eigenvalues.
///
/// The missing reciprocals are extrapolated geometrically from the last five
/// ratios; the remaining factors then move the product by at most
/// `|P| (exp(|z| s) - 1)`. With fewer than two eigenvalues the list is taken
/// as the whole spectrum.
pub fn hadamard_product(eigs: &[f64], z: Complex64) -> Result<HadamardValue> {
    if eigs.is_empty() {
        return Err(Error::InvalidParameter("no eigenvalues supplied".into()));
    }
    for (i, w) in eigs.windows(2).enumerate() {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidParameter(format!("eigenvalues not strictly increasing at index {i}")));
        }
    }
    if !(eigs[0] > 0.0) {
        return Err(Error::InvalidParameter("eigenvalues must be positive".into()));
    }
    let mut value = Complex64::new(1.0, 0.0);
    for &l in eigs {
        value *= Complex64::new(1.0, 0.0) - z / l;
    }
    if eigs.len() < 2 {
        return Ok(HadamardValue { value, tail_bound: 0.0, tail_sum: 0.0, tail_ratio: 0.0 });
    }
    let start = eigs.len().saturating_sub(6);
    let r = eigs[start..].windows(2).map(|w| w[0] / w[1]).fold(0.0f64, f64::max);
    if r >= 1.0 || r >= crate::tail::MAX_RATIO {
        return Err(Error::Uncertified {
            atol: 0.0,
            max_terms: eigs.len(),
            partial: value.norm(),
            bound: f64::INFINITY,
        });
    }
    let last = eigs[eigs.len() - 1];
    let s = r / (1.0 - r) / last;
    Ok(HadamardValue { value, tail_bound: value.norm() * (z.norm() * s).exp_m1(), tail_sum: s, tail_ratio: r })
}

/// `(z; q)_inf / (a; q)_inf`.
pub fn qpochhammer_reference(z: Complex64, q: f64, a: f64) -> Complex64 {
    qpoch_inf(z, q) / qpoch_inf(Complex64::new(a, 0.0), q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn shifted(q: f64, a: f64) -> CoefficientSource {
        CoefficientSource::asc2(q, a).unwrap().with_shift(a)
    }

    #[test]
    fn value_at_origin_is_one() {
        let src = shifted(0.5, 0.5);
        let v = charfn_partial_sum(&src, c(0.0), 1e-14).unwrap();
        assert_eq!(v.value, c(1.0));
        assert_eq!(v.tail_bound, 0.0);
        let r = charfn_ratio(&src, c(0.0), 40).unwrap();
        assert_eq!(r.value, c(1.0));
    }

    #[test]
    fn closed_form_points() {
        let src = shifted(0.5, 0.5);
        let v = charfn_partial_sum(&src, c(-0.25), 1e-14).unwrap();
        assert!(v.certified);
        assert!((v.value - c(2.0)).norm() <= v.total_bound() + 1e-12, "{v:?}");
        let v = charfn_partial_sum(&src, c(0.5), 1e-14).unwrap();
        assert!(v.value.norm() <= v.total_bound() + 1e-12, "{v:?}");
        let r = charfn_ratio(&src, c(-0.25), 80).unwrap();
        assert!((r.value - c(2.0)).norm() <= 1e-9, "{r:?}");
    }

    #[test]
    fn complex_argument_matches_reference() {
        let (q, a) = (0.3, 0.3);
        let src = shifted(q, a);
        let z = Complex64::new(1.1, -0.7);
        let v = charfn_partial_sum(&src, z, 1e-13).unwrap();
        let reference = qpochhammer_reference(z + a, q, a);
        assert!((v.value - reference).norm() <= v.total_bound() + 1e-12, "{v:?} vs {reference}");
    }

    #[test]
    fn large_argument_stays_finite_in_scaled_form() {
        let src = shifted(0.5, 0.5);
        let mut f = CharFn::new(&src, DEFAULT_MAX_TERMS).unwrap();
        for (k, d) in [(5, 1e-12), (20, 1e-9), (39, 1e-5)] {
            let lambda = 2f64.powi(k) - 0.5;
            let below = f.eval_scaled(c(lambda * (1.0 - d)), Target::Relative(1e-3)).unwrap();
            let above = f.eval_scaled(c(lambda * (1.0 + d)), Target::Relative(1e-3)).unwrap();
            assert!(below.sign_is_certain() && above.sign_is_certain(), "{k}: {below:?} {above:?}");
            assert!(below.value.phase().re * above.value.phase().re < 0.0);
        }
    }

    #[test]
    fn hadamard_examples() {
        let h = hadamard_product(&[2.0], c(2.0)).unwrap();
        assert_eq!(h.value, c(0.0));
        let h = hadamard_product(&[1.0, 3.0], c(0.0)).unwrap();
        assert_eq!(h.value, c(1.0));
        let eigs: Vec<f64> = (0..40).map(|n| 2f64.powi(n) - 0.5).collect();
        let h = hadamard_product(&eigs, c(-0.25)).unwrap();
        assert!((h.value - c(2.0)).norm() <= h.tail_bound + 1e-12, "{h:?}");
        assert!(hadamard_product(&[1.0, 1.0], c(0.0)).is_err());
        assert!(hadamard_product(&[1.0, 1.05, 1.1, 1.15], c(0.0)).is_err());
    }

    #[test]
    fn reference_examples() {
        assert_eq!(qpochhammer_reference(c(0.5), 0.5, 0.5), c(1.0));
        assert_eq!(qpochhammer_reference(c(4.0), 0.5, 0.5), c(0.0));
        assert!((qpochhammer_reference(c(0.25), 0.5, 0.5) - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn finite_tables_are_rejected() {
        let src = CoefficientSource::table(vec![1.0, 1.0], vec![3.0, 3.0, 3.0]).unwrap();
        assert_eq!(charfn_partial_sum(&src, c(0.5), 1e-12).unwrap_err(), Error::FiniteSource);
    }
}
