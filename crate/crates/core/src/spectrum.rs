//! Eigenvalues of `J` as the zeros of the characteristic function, with the
//! finite sections of `J` as bracketing oracle.
//!
//! Eigenvalues of the `N x N` section decrease strictly in `N` towards the
//! eigenvalues of `J`, so two sections give an upper end and a gap estimate
//! for each bracket. A sign change of `F`, certified by its truncation and
//! rounding bounds, then confirms the zero and bisection refines it.

use num_complex::Complex64;

use crate::charfn::{CharFn, ScaledCharFn, Target, DEFAULT_MAX_TERMS};
use crate::error::{Error, Result};
use crate::source::CoefficientSource;

/// Leading `N x N` block of a Jacobi matrix, shift applied.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedTridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TruncatedTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidParameter("empty matrix".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter(format!(
                "{} off-diagonal entries for {} diagonal entries",
                offdiag.len(),
                diag.len()
            )));
        }
        if let Some(i) = offdiag.iter().position(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::PositivityViolated { index: i, detail: format!("off-diagonal entry {}", offdiag[i]) });
        }
        if diag.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidParameter("diagonal entries must be finite".into()));
        }
        Ok(TruncatedTridiagonal { diag, offdiag })
    }

    /// The `n x n` section of `src`.
    pub fn from_source(src: &CoefficientSource, n: usize) -> Result<Self> {
        let diag = (0..n).map(|i| src.beta(i)).collect::<Result<Vec<_>>>()?;
        let offdiag = (0..n.saturating_sub(1)).map(|i| src.alpha(i)).collect::<Result<Vec<_>>>()?;
        Self::new(diag, offdiag)
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Number of eigenvalues strictly below `x`, from the signs of the
    /// pivots of `T - x = L D L^T`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = self.diag[0] - x;
        for i in 0..self.size() {
            if i > 0 {
                let e = self.offdiag[i - 1];
                // e * (e / d) keeps e^2 from overflowing for large entries
                d = (self.diag[i] - x) - e * (e / d);
            }
            if d == 0.0 {
                // perturb an exact zero pivot to the negative side of x
                d = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing every eigenvalue.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.size();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.offdiag[i - 1] } else { 0.0 } + if i + 1 < n { self.offdiag[i] } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Eigenvalue `j` (0-based, increasing) by bisection on the Sturm count.
    /// Stops at width `tol` or at the floating resolution of the value.
    pub fn eigenvalue(&self, j: usize, tol: f64) -> Result<f64> {
        if j >= self.size() {
            return Err(Error::InvalidParameter(format!("eigenvalue index {j} beyond size {}", self.size())));
        }
        let (glo, ghi) = self.gershgorin();
        let mut lo = glo;
        // Search upwards from a modest bound first; the Gershgorin upper end
        // of a rapidly growing matrix is far beyond the low eigenvalues.
        let mut hi = glo.abs().max(1.0);
        while self.sturm_count(hi) <= j && hi < ghi {
            lo = hi;
            hi = (2.0 * hi).min(ghi);
        }
        if self.sturm_count(hi) <= j {
            hi = ghi + f64::EPSILON * ghi.abs().max(1.0);
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tol || hi - lo <= 4.0 * f64::EPSILON * mid.abs() || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.sturm_count(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// The `k` smallest eigenvalues, each within `tol` (or floating resolution).
    pub fn sturm_eigenvalues(&self, k: usize, tol: f64) -> Result<Vec<f64>> {
        if k > self.size() {
            return Err(Error::InvalidParameter(format!("requested {k} eigenvalues of a {0}x{0} matrix", self.size())));
        }
        (0..k).map(|j| self.eigenvalue(j, tol)).collect()
    }
}

/// `sturm_eigenvalues` on the `n x n` section of `src`.
pub fn section_eigenvalues(src: &CoefficientSource, n: usize, k: usize, tol: f64) -> Result<Vec<f64>> {
    TruncatedTridiagonal::from_source(src, n)?.sturm_eigenvalues(k, tol)
}

/// How a reported bracket was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketSource {
    /// Finite-section values had stabilized along the doubling ladder.
    Ladder,
    /// The ladder hit its cap before stabilizing; the bracket is heuristic
    /// until the sign change confirms it.
    LadderCapped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOptions {
    /// Target bracket width.
    pub tol: f64,
    /// Largest section size on the ladder.
    pub max_section: usize,
    /// Times a bracket may be widened before the index is reported unresolved.
    pub max_widen: usize,
    /// Section size for the reported oracle values.
    pub oracle_section: usize,
    pub max_terms: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { tol: 1e-10, max_section: 4096, max_widen: 8, oracle_section: 400, max_terms: DEFAULT_MAX_TERMS }
    }
}

/// One located eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenvalue {
    /// 1-based index in increasing order.
    pub index: usize,
    pub lambda: f64,
    /// `|F(lambda)|`.
    pub residual: f64,
    /// Truncation plus rounding bound of that evaluation.
    pub tail_bound: f64,
    /// `max(|F(lo)|, |F(hi)|)` at the final bracket; the residual of a simple
    /// zero inside the bracket is expected below this.
    pub residual_scale: f64,
    pub bracket: (f64, f64),
    pub oracle_value: f64,
    pub oracle_gap: f64,
    /// Whether `F` had certified opposite signs at the bracket ends.
    pub sign_change: bool,
    pub provenance: BracketSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<Eigenvalue>,
    /// 1-based indices that could not be confirmed.
    pub unresolved: Vec<usize>,
    /// Section size at which the ladder stopped.
    pub section: usize,
}

impl SpectrumResult {
    pub fn values(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.lambda).collect()
    }
}

fn resolution(x: f64) -> f64 {
    8.0 * f64::EPSILON * x.abs()
}

fn sign_of(v: &ScaledCharFn) -> Option<f64> {
    if v.sign_is_certain() {
        Some(v.value.phase().re.signum())
    } else {
        None
    }
}

fn eval(f: &mut CharFn, x: f64) -> Result<ScaledCharFn> {
    f.eval_scaled(Complex64::new(x, 0.0), Target::Relative(0.25))
}

/// Locates the `k` smallest eigenvalues of `src` as zeros of `F`.
pub fn find_spectrum(src: &CoefficientSource, k: usize, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let mut f = CharFn::new(src, opts.max_terms)?;

    // Ladder N = 4k, 8k, ... until sections N and 2N agree to 0.01 tol.
    let want = k + 1;
    let mut n = 4 * want;
    let mut coarse = section_eigenvalues(src, n, want, 0.0)?;
    let (fine, provenance, section) = loop {
        let m = 2 * n;
        let fine = section_eigenvalues(src, m, want, 0.0)?;
        let stable = coarse
            .iter()
            .zip(&fine)
            .all(|(c, fv)| (c - fv).abs() <= 0.01 * opts.tol.max(resolution(*fv)));
        if stable {
            break (fine, BracketSource::Ladder, m);
        }
        if m >= opts.max_section {
            break (fine, BracketSource::LadderCapped, m);
        }
        coarse = fine;
        n = m;
    };
    let oracle = section_eigenvalues(src, opts.oracle_section.max(k), k, 0.0)?;

    let mut eigenvalues = Vec::with_capacity(k);
    let mut unresolved = Vec::new();
    for j in 0..k {
        let x = fine[j];
        let gap = (coarse[j] - x).abs();
        let floor = if j == 0 { f64::NEG_INFINITY } else { 0.5 * (fine[j - 1] + x) };
        let ceil = 0.5 * (x + fine[j + 1]);
        let mut pad = opts.tol.max(resolution(x)).max(3.0 * gap);
        let mut found = None;
        for _ in 0..=opts.max_widen {
            let lo = (x - pad).max(floor);
            let hi = (x + opts.tol.max(resolution(x)) + pad / 3.0).min(ceil);
            let flo = eval(&mut f, lo)?;
            let fhi = eval(&mut f, hi)?;
            if let (Some(slo), Some(shi)) = (sign_of(&flo), sign_of(&fhi)) {
                if slo != shi {
                    found = Some(((lo, slo, flo), (hi, fhi)));
                    break;
                }
            }
            pad *= 4.0;
        }
        let Some(((mut lo, slo, mut flo), (mut hi, mut fhi))) = found else {
            unresolved.push(j + 1);
            continue;
        };
        loop {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= opts.tol || hi - lo <= resolution(mid) || mid <= lo || mid >= hi {
                break;
            }
            let fm = eval(&mut f, mid)?;
            match sign_of(&fm) {
                Some(s) if s == slo => {
                    lo = mid;
                    flo = fm;
                }
                Some(_) => {
                    hi = mid;
                    fhi = fm;
                }
                // F is below its error bounds: the zero is resolved as far as
                // the evaluation allows.
                None => break,
            }
        }
        let lambda = 0.5 * (lo + hi);
        let at = eval(&mut f, lambda)?;
        eigenvalues.push(Eigenvalue {
            index: j + 1,
            lambda,
            residual: at.value.abs(),
            tail_bound: at.ln_total_bound().exp(),
            residual_scale: flo.value.abs().max(fhi.value.abs()),
            bracket: (lo, hi),
            oracle_value: oracle[j],
            oracle_gap: (lambda - oracle[j]).abs(),
            sign_change: true,
            provenance,
        });
    }
    Ok(SpectrumResult { eigenvalues, unresolved, section })
}

/// `|lambda_j - x_{N,j}|` for the supplied eigenvalues.
pub fn oracle_gaps(src: &CoefficientSource, eigs: &[f64], n: usize) -> Result<Vec<f64>> {
    let x = section_eigenvalues(src, n, eigs.len(), 0.0)?;
    Ok(eigs.iter().zip(&x).map(|(l, xv)| (l - xv).abs()).collect())
}

/// Finds `k` eigenvalues and compares them with the `N x N` section.
pub fn oracle_compare(src: &CoefficientSource, k: usize, n: usize) -> Result<Vec<f64>> {
    let res = find_spectrum(src, k, &SpectrumOptions::default())?;
    if !res.unresolved.is_empty() {
        return Err(Error::Uncertified {
            atol: SpectrumOptions::default().tol,
            max_terms: k,
            partial: f64::NAN,
            bound: f64::INFINITY,
        });
    }
    oracle_gaps(src, &res.values(), n)
}

/// Samples `F` at `samples` points strictly between consecutive eigenvalues
/// (keeping `tol` away from each) and returns the first interval index with a
/// certified sign change, if any.
pub fn extra_sign_change(src: &CoefficientSource, eigs: &[f64], tol: f64, samples: usize) -> Result<Option<usize>> {
    let mut f = CharFn::new(src, DEFAULT_MAX_TERMS)?;
    for (i, w) in eigs.windows(2).enumerate() {
        let lo = w[0] + tol.max(resolution(w[0]));
        let hi = w[1] - tol.max(resolution(w[1]));
        let mut prev: Option<f64> = None;
        for s in 0..samples {
            let x = lo + (hi - lo) * s as f64 / (samples - 1).max(1) as f64;
            if let Some(sg) = sign_of(&eval(&mut f, x)?) {
                if prev.is_some_and(|p| p != sg) {
                    return Ok(Some(i));
                }
                prev = Some(sg);
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_by_two_closed_form() {
        let src = CoefficientSource::asc2(0.5, 0.5).unwrap();
        let t = TruncatedTridiagonal::from_source(&src, 2).unwrap();
        assert_eq!(t.diag(), &[1.5, 3.0]);
        let e = t.sturm_eigenvalues(2, 1e-15).unwrap();
        let r = 1.0625f64.sqrt();
        assert_relative_eq!(e[0], 2.25 - r, max_relative = 1e-14);
        assert_relative_eq!(e[1], 2.25 + r, max_relative = 1e-14);
        assert_relative_eq!(e[0], 1.2192235935955849, max_relative = 1e-14);
        assert_relative_eq!(e[1], 3.280776406404415, max_relative = 1e-14);
    }

    #[test]
    fn one_by_one() {
        let t = TruncatedTridiagonal::new(vec![2.5], vec![]).unwrap();
        assert_eq!(t.sturm_eigenvalues(1, 1e-14).unwrap()[0], 2.5);
        assert!(t.sturm_eigenvalues(2, 1e-14).is_err());
    }

    #[test]
    fn sturm_count_handles_huge_entries() {
        let src = CoefficientSource::asc2(0.5, 0.5).unwrap();
        let t = TruncatedTridiagonal::from_source(&src, 400).unwrap();
        assert_eq!(t.sturm_count(0.0), 0);
        assert_eq!(t.sturm_count(1.5), 1);
        assert_eq!(t.sturm_count(1e200), 400);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(TruncatedTridiagonal::new(vec![1.0, 2.0], vec![0.0]).is_err());
        assert!(TruncatedTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
    }

    #[test]
    fn asc2_spectrum_small() {
        let src = CoefficientSource::asc2(0.3, 0.3).unwrap();
        let r = find_spectrum(&src, 4, &SpectrumOptions::default()).unwrap();
        assert!(r.unresolved.is_empty());
        let expect = [1.0, 10.0 / 3.0, 100.0 / 9.0, 1000.0 / 27.0];
        for (e, x) in r.eigenvalues.iter().zip(expect) {
            assert!((e.lambda - x).abs() <= 1e-9, "{e:?}");
            assert!(e.sign_change);
        }
    }
}
