//! Coefficient sources for semi-infinite Jacobi matrices.
//!
//! A source hands out the off-diagonal `alpha_n` and the shifted diagonal
//! `beta_n - shift` for any index it covers. Two kinds exist: the
//! Al-Salam–Carlitz II family, which is infinite, and explicit finite tables.

use crate::error::{Error, Result};
use crate::precision::Real;

/// Which coefficient family backs a [`CoefficientSource`].
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Al-Salam–Carlitz II: `alpha_n^2 = a q^(-2n-1) (1 - q^(n+1))`, `beta_n = (a+1) q^(-n)`.
    Asc2 { q: f64, a: f64 },
    /// Finite tables; `alphas.len() >= betas.len() - 1`.
    Table { alphas: Vec<f64>, betas: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSource {
    family: Family,
    shift: f64,
}

impl CoefficientSource {
    /// Al-Salam–Carlitz II source with `0 < q < 1` and `a > 0`.
    pub fn asc2(q: f64, a: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!("q must lie in (0,1), got {q}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("a must be positive, got {a}")));
        }
        Ok(CoefficientSource { family: Family::Asc2 { q, a }, shift: 0.0 })
    }

    /// Explicit table. Entries are not required to be positive here; see
    /// [`CoefficientSource::check_positive_alphas`].
    pub fn table(alphas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if betas.len() < 2 {
            return Err(Error::InvalidParameter("table needs at least two diagonal entries".into()));
        }
        if alphas.len() + 1 < betas.len() {
            return Err(Error::InvalidParameter(format!(
                "table has {} off-diagonal entries for {} diagonal entries",
                alphas.len(),
                betas.len()
            )));
        }
        if alphas.iter().chain(betas.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("table entries must be finite".into()));
        }
        Ok(CoefficientSource { family: Family::Table { alphas, betas }, shift: 0.0 })
    }

    /// Same source presenting `beta_n - shift`.
    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.family, Family::Asc2 { .. })
    }

    /// Number of diagonal entries available; `None` for infinite families.
    pub fn len(&self) -> Option<usize> {
        match &self.family {
            Family::Asc2 { .. } => None,
            Family::Table { betas, .. } => Some(betas.len()),
        }
    }

    /// True only for a table with no rows.
    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// ASC-II parameters `(q, a)` if this is the builtin family.
    pub fn asc2_params(&self) -> Option<(f64, f64)> {
        match self.family {
            Family::Asc2 { q, a } => Some((q, a)),
            Family::Table { .. } => None,
        }
    }

    pub fn alpha(&self, n: usize) -> Result<f64> {
        match &self.family {
            Family::Asc2 { q, a } => Ok(asc2_alpha(*q, *a, n)),
            Family::Table { alphas, .. } => alphas
                .get(n)
                .copied()
                .ok_or(Error::IndexOutOfRange { index: n, len: alphas.len() }),
        }
    }

    pub fn beta(&self, n: usize) -> Result<f64> {
        match &self.family {
            Family::Asc2 { q, a } => Ok((a + 1.0) * q.powi(-(n as i32)) - self.shift),
            Family::Table { betas, .. } => betas
                .get(n)
                .map(|b| b - self.shift)
                .ok_or(Error::IndexOutOfRange { index: n, len: betas.len() }),
        }
    }

    /// `(alpha_n, beta_n - shift)`.
    pub fn coeffs(&self, n: usize) -> Result<(f64, f64)> {
        Ok((self.alpha(n)?, self.beta(n)?))
    }

    /// Coefficients evaluated in a wider carrier. For ASC-II the closed forms
    /// are re-evaluated in `R`; table entries are exact binary values.
    pub fn coeffs_in<R: Real>(&self, n: usize) -> Result<(R, R)> {
        match &self.family {
            Family::Asc2 { q, a } => {
                let qr = R::from_f64(*q);
                let ar = R::from_f64(*a);
                let qn = qr.powi(n as i32 + 1);
                let alpha = (ar * (R::one() - qn) / qr).sqrt() * qr.powi(-(n as i32));
                let beta = (ar + R::one()) * qr.powi(-(n as i32)) - R::from_f64(self.shift);
                Ok((alpha, beta))
            }
            Family::Table { .. } => Ok((R::from_f64(self.alpha(n)?), self.beta_in::<R>(n)?)),
        }
    }

    /// Diagonal entry in a wider carrier, for the last row of a truncation
    /// where no off-diagonal partner is stored.
    pub fn beta_in<R: Real>(&self, n: usize) -> Result<R> {
        match &self.family {
            Family::Asc2 { q, a } => {
                let qr = R::from_f64(*q);
                Ok((R::from_f64(*a) + R::one()) * qr.powi(-(n as i32)) - R::from_f64(self.shift))
            }
            Family::Table { betas, .. } => betas
                .get(n)
                .map(|b| R::from_f64(*b) - R::from_f64(self.shift))
                .ok_or(Error::IndexOutOfRange { index: n, len: betas.len() }),
        }
    }

    /// Reports the first non-positive off-diagonal entry among the first
    /// `count` indices (all stored ones for tables when `count` exceeds them).
    pub fn check_positive_alphas(&self, count: usize) -> Result<()> {
        let limit = match &self.family {
            Family::Table { alphas, .. } => count.min(alphas.len()),
            Family::Asc2 { .. } => count,
        };
        for n in 0..limit {
            let a = self.alpha(n)?;
            if !(a > 0.0) {
                return Err(Error::PositivityViolated {
                    index: n,
                    detail: format!("alpha_{n} = {a} is not positive"),
                });
            }
        }
        Ok(())
    }

    /// Rejects ASC-II parameters in the indeterminate regime `q < a < 1/q`.
    pub fn require_determinate(&self) -> Result<()> {
        if let Family::Asc2 { q, a } = self.family {
            if a > q {
                return Err(Error::InvalidParameter(format!(
                    "ASC-II with a = {a} > q = {q} is outside the determinate regime 0 < a <= q"
                )));
            }
        }
        Ok(())
    }

    /// Asserted lower bound of the spectrum of the shifted operator, when the
    /// family provides one (`J >= 1` for ASC-II).
    pub fn spectral_floor(&self) -> Option<f64> {
        match self.family {
            Family::Asc2 { .. } => Some(1.0 - self.shift),
            Family::Table { .. } => None,
        }
    }
}

/// `alpha_n = sqrt(a) q^(-n-1/2) sqrt(1 - q^(n+1))`, written so that the
/// square never overflows.
fn asc2_alpha(q: f64, a: f64, n: usize) -> f64 {
    let qn1 = q.powi(n as i32 + 1);
    (a * (1.0 - qn1) / q).sqrt() * q.powi(-(n as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn asc2_first_entries() {
        let src = CoefficientSource::asc2(0.5, 0.5).unwrap();
        let (a0, b0) = src.coeffs(0).unwrap();
        assert_relative_eq!(a0, 0.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(b0, 1.5, max_relative = 1e-15);

        let shifted = src.with_shift(0.5);
        let (a1, b1) = shifted.coeffs(1).unwrap();
        assert_relative_eq!(a1, 3f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(b1, 2.5, max_relative = 1e-15);
    }

    #[test]
    fn asc2_alpha_squared_matches_formula() {
        let (q, a) = (0.3, 0.2);
        let src = CoefficientSource::asc2(q, a).unwrap();
        for n in 0..40 {
            let al = src.alpha(n).unwrap();
            let expect = a * q.powi(-2 * n as i32 - 1) * (1.0 - q.powi(n as i32 + 1));
            assert_relative_eq!(al * al, expect, max_relative = 1e-13);
        }
    }

    #[test]
    fn table_lookup_and_bounds() {
        let src = CoefficientSource::table(vec![1.0], vec![2.0, 2.0]).unwrap();
        assert_eq!(src.coeffs(0).unwrap(), (1.0, 2.0));
        assert_eq!(src.beta(1).unwrap(), 2.0);
        assert_eq!(src.alpha(1), Err(Error::IndexOutOfRange { index: 1, len: 1 }));
        assert!(src.coeffs(2).is_err());
        assert_eq!(src.len(), Some(2));
    }

    #[test]
    fn table_shape_validation() {
        assert!(CoefficientSource::table(vec![], vec![1.0, 2.0]).is_err());
        assert!(CoefficientSource::table(vec![1.0], vec![1.0]).is_err());
        assert!(CoefficientSource::table(vec![1.0, 1.0], vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn invalid_asc2_parameters() {
        assert!(CoefficientSource::asc2(1.0, 0.5).is_err());
        assert!(CoefficientSource::asc2(0.5, 0.0).is_err());
        assert!(CoefficientSource::asc2(0.5, 0.7).unwrap().require_determinate().is_err());
        assert!(CoefficientSource::asc2(0.5, 0.5).unwrap().require_determinate().is_ok());
    }

    #[test]
    fn negative_alpha_is_flagged() {
        let src = CoefficientSource::table(vec![1.0, -0.5], vec![3.0, 3.0, 3.0]).unwrap();
        assert!(matches!(
            src.check_positive_alphas(10),
            Err(Error::PositivityViolated { index: 1, .. })
        ));
    }

    #[test]
    fn wide_coefficients_agree_with_binary64() {
        use crate::precision::DoubleDouble;
        let src = CoefficientSource::asc2(0.5, 0.25).unwrap().with_shift(0.25);
        for n in 0..20 {
            let (a, b) = src.coeffs(n).unwrap();
            let (ad, bd) = src.coeffs_in::<DoubleDouble>(n).unwrap();
            assert_relative_eq!(ad.to_f64(), a, max_relative = 1e-15);
            assert_relative_eq!(bd.to_f64(), b, max_relative = 1e-15);
        }
    }
}
