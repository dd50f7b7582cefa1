//! Green matrix of a Jacobi matrix: the strictly lower triangular right
//! inverse with entries `G[m][n] = Q_m^(n)(0)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::precision::Real;
use crate::recurrence::{assoc_from_tables, phat_pairs, q_pairs};
use crate::source::CoefficientSource;

/// Leading `size x size` block of the Green matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenBlock<R = f64> {
    size: usize,
    entries: Vec<R>,
}

impl<R: Real> GreenBlock<R> {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, m: usize, n: usize) -> R {
        self.entries[m * self.size + n]
    }

    pub fn row(&self, m: usize) -> &[R] {
        &self.entries[m * self.size..(m + 1) * self.size]
    }

    /// Largest relative deviation of `(J G)[m][n]` from `delta_mn` over the
    /// interior rows `m < size - 1` (the last row needs `G[size][n]`).
    pub fn right_inverse_residual(&self, src: &CoefficientSource) -> Result<f64> {
        let n_sz = self.size;
        let mut worst = 0.0f64;
        for m in 0..n_sz.saturating_sub(1) {
            let (alpha_m, beta_m) = src.coeffs_in::<R>(m)?;
            let alpha_prev = if m > 0 { Some(src.coeffs_in::<R>(m - 1)?.0) } else { None };
            for n in 0..n_sz {
                let mut terms = vec![beta_m * self.get(m, n), alpha_m * self.get(m + 1, n)];
                if let Some(ap) = alpha_prev {
                    terms.push(ap * self.get(m - 1, n));
                }
                let delta = if m == n { R::one() } else { R::zero() };
                let sum = terms.iter().fold(R::zero(), |acc, &t| acc + t);
                let scale = terms.iter().fold(delta, |acc, &t| acc + t.abs());
                let scale = scale.to_f64();
                if scale > 0.0 {
                    worst = worst.max((sum - delta).abs().to_f64() / scale);
                }
            }
        }
        Ok(worst)
    }
}

fn check_size(size: usize) -> Result<()> {
    if size < 2 {
        return Err(Error::InvalidParameter(format!("Green block size must be >= 2, got {size}")));
    }
    Ok(())
}

/// Green block from the overflow-safe recurrences and the Wronskian form
/// `Q_m^(n) = Q_m P_n - P_m Q_n`, evaluated as in [`crate::recurrence::eval_q_assoc`].
pub fn green_block(src: &CoefficientSource, size: usize) -> Result<GreenBlock<f64>> {
    check_size(size)?;
    let zero = Complex64::new(0.0, 0.0);
    let p = phat_pairs(src, zero, size)?;
    let q = q_pairs(src, zero, size)?;
    let mut entries = vec![0.0; size * size];
    for m in 0..size {
        for n in 0..m {
            entries[m * size + n] = assoc_from_tables(src, &p, &q, m, n)?.to_f64();
        }
    }
    Ok(GreenBlock { size, entries })
}

/// Green block evaluated in the carrier `R` with plain recurrences and the
/// telescoped form `P_m P_n sum_{n <= j < m} 1 / (alpha_j P_j P_{j+1})`.
/// Falls back to `Q_m P_n - P_m Q_n` if some `P_j(0)` vanishes.
pub fn green_block_in<R: Real>(src: &CoefficientSource, size: usize) -> Result<GreenBlock<R>> {
    check_size(size)?;
    let p = phat_values_in::<R>(src, R::zero(), size)?;
    let mut entries = vec![R::zero(); size * size];
    if p.iter().any(|v| v.to_f64() == 0.0) {
        let q = q_values_in::<R>(src, R::zero(), size)?;
        for m in 0..size {
            for n in 0..m {
                entries[m * size + n] = q[m] * p[n] - p[m] * q[n];
            }
        }
        return Ok(GreenBlock { size, entries });
    }
    let mut t = Vec::with_capacity(size);
    for j in 0..size.saturating_sub(1) {
        t.push(R::one() / (src.coeffs_in::<R>(j)?.0 * p[j] * p[j + 1]));
    }
    for n in 0..size {
        let mut sum = R::zero();
        for m in n + 1..size {
            sum = sum + t[m - 1];
            entries[m * size + n] = sum * p[m] * p[n];
        }
    }
    Ok(GreenBlock { size, entries })
}

fn run_in<R: Real>(src: &CoefficientSource, x: R, y0: R, y1: R, count: usize) -> Result<Vec<R>> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return Ok(out);
    }
    out.push(y0);
    if count == 1 {
        return Ok(out);
    }
    out.push(y1);
    for k in 1..count - 1 {
        let (alpha_k, beta_k) = src.coeffs_in::<R>(k)?;
        let alpha_prev = src.coeffs_in::<R>(k - 1)?.0;
        let next = ((x - beta_k) * out[k] - alpha_prev * out[k - 1]) / alpha_k;
        out.push(next);
    }
    Ok(out)
}

/// `P_0(x), ..., P_{count-1}(x)` by the unscaled recurrence in carrier `R`.
pub fn phat_values_in<R: Real>(src: &CoefficientSource, x: R, count: usize) -> Result<Vec<R>> {
    let (alpha0, beta0) = src.coeffs_in::<R>(0)?;
    run_in(src, x, R::one(), (x - beta0) / alpha0, count)
}

/// `Q_0(x), ..., Q_{count-1}(x)` by the unscaled recurrence in carrier `R`.
pub fn q_values_in<R: Real>(src: &CoefficientSource, x: R, count: usize) -> Result<Vec<R>> {
    let alpha0 = src.coeffs_in::<R>(0)?.0;
    run_in(src, x, R::zero(), R::one() / alpha0, count)
}

/// Solves `(J - x) y = e_n` with `y_0 = ... = y_n = 0` row by row; returns
/// `y_0 .. y_{count-1}`. Independent of the Wronskian route.
pub fn assoc_by_substitution<R: Real>(
    src: &CoefficientSource,
    x: R,
    n: usize,
    count: usize,
) -> Result<Vec<R>> {
    let mut y = vec![R::zero(); count];
    if count <= n + 1 {
        return Ok(y);
    }
    // Row n: alpha_n y_{n+1} = 1.
    y[n + 1] = R::one() / src.coeffs_in::<R>(n)?.0;
    // Row m > n: alpha_m y_{m+1} + (beta_m - x) y_m + alpha_{m-1} y_{m-1} = 0.
    for m in n + 1..count - 1 {
        let (alpha_m, beta_m) = src.coeffs_in::<R>(m)?;
        let alpha_prev = src.coeffs_in::<R>(m - 1)?.0;
        y[m + 1] = -((beta_m - x) * y[m] + alpha_prev * y[m - 1]) / alpha_m;
    }
    Ok(y)
}

/// Largest relative component of `(I - x G) P(x) - P(0)` over the leading
/// `size` entries, evaluated in carrier `R`.
pub fn resolvent_identity_check_in<R: Real>(src: &CoefficientSource, x: f64, size: usize) -> Result<f64> {
    let g = green_block_in::<R>(src, size)?;
    let xr = R::from_f64(x);
    let px = phat_values_in::<R>(src, xr, size)?;
    let p0 = phat_values_in::<R>(src, R::zero(), size)?;
    let mut worst = 0.0f64;
    for n in 0..size {
        let mut acc = px[n] - p0[n];
        let mut scale = px[n].abs() + p0[n].abs();
        for (k, &pk) in px.iter().enumerate().take(n) {
            let t = xr * g.get(n, k) * pk;
            acc = acc - t;
            scale = scale + t.abs();
        }
        let scale = scale.to_f64();
        if scale > 0.0 {
            worst = worst.max(acc.abs().to_f64() / scale);
        }
    }
    Ok(worst)
}

/// Binary64 form of [`resolvent_identity_check_in`].
pub fn resolvent_identity_check(src: &CoefficientSource, x: f64, size: usize) -> Result<f64> {
    check_size(size)?;
    resolvent_identity_check_in::<f64>(src, x, size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::DoubleDouble;
    use approx::assert_relative_eq;

    fn asc() -> CoefficientSource {
        CoefficientSource::asc2(0.5, 0.5).unwrap()
    }

    #[test]
    fn strictly_lower_triangular() {
        let g = green_block(&asc(), 8).unwrap();
        for m in 0..8 {
            for n in m..8 {
                assert_eq!(g.get(m, n), 0.0);
            }
        }
        assert_relative_eq!(g.get(1, 0), 2f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn right_inverse_on_interior_rows() {
        let src = asc();
        let g = green_block(&src, 6).unwrap();
        assert!(g.right_inverse_residual(&src).unwrap() < 1e-13);
        let gd = green_block_in::<DoubleDouble>(&src, 6).unwrap();
        assert!(gd.right_inverse_residual(&src).unwrap() < 1e-28);
    }

    #[test]
    fn resolvent_identity_at_zero_is_exact() {
        assert_eq!(resolvent_identity_check(&asc(), 0.0, 10).unwrap(), 0.0);
    }

    #[test]
    fn resolvent_identity_asc2() {
        let r = resolvent_identity_check(&asc(), 0.3, 12).unwrap();
        assert!(r <= 1e-10, "residual {r:e}");
    }

    #[test]
    fn substitution_matches_wronskian() {
        let src = asc();
        let direct = assoc_by_substitution::<f64>(&src, 0.0, 1, 3).unwrap();
        let g = green_block(&src, 3).unwrap();
        assert_relative_eq!(direct[2], g.get(2, 1), max_relative = 1e-13);
        assert_eq!(direct[1], 0.0);
    }

    #[test]
    fn block_size_validated() {
        assert!(green_block(&asc(), 1).is_err());
    }
}
