//! Grid driver for the q-series identity checks.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qseries::{lemma_2phi1, lemma_relation_gap, qbinomial_check, qgauss_check, IdentityGap};

/// Parameter grid for [`identity_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityGrid {
    pub q_list: Vec<f64>,
    /// Random `(a, c)` pairs per `q` for the functional relation.
    pub relation_samples: usize,
    pub seed: u64,
    pub gap_tol: f64,
    pub relation_tol: f64,
}

impl Default for IdentityGrid {
    fn default() -> Self {
        IdentityGrid { q_list: vec![0.3, 0.5, 0.7], relation_samples: 20, seed: 20240607, gap_tol: 1e-10, relation_tol: 1e-12 }
    }
}

/// Largest gap of one identity at one `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub identity: &'static str,
    pub q: f64,
    pub cases: usize,
    pub max_gap: f64,
    /// Largest series truncation bound among the cases (zero for the relation).
    pub max_tail: f64,
    pub threshold: f64,
    pub passed: bool,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn row(identity: &'static str, q: f64, gaps: &[IdentityGap], threshold: f64) -> IdentityRow {
    let max_gap = gaps.iter().map(|g| g.gap).fold(0.0, f64::max);
    let max_tail = gaps.iter().map(|g| g.tail_bound).fold(0.0, f64::max);
    IdentityRow { identity, q, cases: gaps.len(), max_gap, max_tail, threshold, passed: max_gap <= threshold }
}

/// q-binomial cases `(u, z)`.
pub fn qbinomial_cases(q: f64) -> Vec<(Complex64, Complex64)> {
    let us = [c(0.0, 0.0), c(q, 0.0), c(0.3, 0.0), c(-0.5, 0.0), c(0.2, 0.4)];
    let zs = [c(0.0, 0.0), c(0.3, 0.0), c(0.5, 0.0), c(-0.4, 0.0), c(0.0, 0.25)];
    us.iter().flat_map(|&u| zs.iter().map(move |&z| (u, z))).collect()
}

/// q-Gauss cases `(a, b, c)`, all with `|c/(ab)| < 1`.
pub fn qgauss_cases(q: f64) -> Vec<(Complex64, Complex64, Complex64)> {
    let p = |k: i32| c(q.powi(k), 0.0);
    vec![
        (p(1), p(1), p(3)),
        (p(2), p(1), p(4)),
        (p(1), p(2), p(4)),
        (p(2), p(2), p(5)),
        (c(-0.5, 0.0), c(0.8, 0.0), c(0.2, 0.0)),
        (c(0.5, 0.5), c(0.9, 0.0), c(0.3, 0.1)),
    ]
}

/// Lemma cases `(a, c)`, including `a = c` and `a = qc`.
pub fn lemma_cases(q: f64) -> Vec<(Complex64, Complex64)> {
    let az = [c(0.0, 0.0), c(0.25, 0.0), c(-0.3, 0.0), c(0.1, 0.2)];
    let cs = [c(0.25, 0.0), c(0.5, 0.0), c(-0.4, 0.0), c(0.1, 0.2)];
    let mut out: Vec<_> = az.iter().flat_map(|&a| cs.iter().map(move |&cc| (a, cc))).collect();
    out.extend(cs.iter().map(|&cc| (cc * q, cc)));
    out
}

/// Runs the q-binomial, q-Gauss and lemma checks plus the lemma's functional
/// relation for every `q` in the grid. An empty `q_list` gives an empty report.
pub fn identity_suite(grid: &IdentityGrid) -> Result<Vec<IdentityRow>> {
    if !(grid.gap_tol > 0.0 && grid.relation_tol > 0.0) {
        return Err(Error::InvalidParameter("identity tolerances must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut out = Vec::new();
    for &q in &grid.q_list {
        let gaps = qbinomial_cases(q).into_iter().map(|(u, z)| qbinomial_check(u, z, q)).collect::<Result<Vec<_>>>()?;
        out.push(row("q_binomial", q, &gaps, grid.gap_tol));
        let gaps = qgauss_cases(q).into_iter().map(|(a, b, cc)| qgauss_check(a, b, cc, q)).collect::<Result<Vec<_>>>()?;
        out.push(row("q_gauss", q, &gaps, grid.gap_tol));
        let gaps = lemma_cases(q).into_iter().map(|(a, cc)| lemma_2phi1(a, cc, q)).collect::<Result<Vec<_>>>()?;
        out.push(row("lemma_2phi1", q, &gaps, grid.gap_tol));
        let mut worst = 0.0f64;
        for _ in 0..grid.relation_samples {
            let a = c(rng.random_range(-0.9..0.9), 0.0);
            let cc = c(rng.random_range(-0.9..0.9), 0.0);
            worst = worst.max(lemma_relation_gap(a, cc, q)?);
        }
        out.push(IdentityRow {
            identity: "lemma_relation",
            q,
            cases: grid.relation_samples,
            max_gap: worst,
            max_tail: 0.0,
            threshold: grid.relation_tol,
            passed: worst <= grid.relation_tol,
        });
    }
    Ok(out)
}
