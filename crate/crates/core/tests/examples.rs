//! Worked examples for each public operation, with independent oracles.

use approx::assert_relative_eq;
use jacobi_spectral::charfn::{charfn_partial_sum, charfn_ratio, hadamard_product, qpochhammer_reference};
use jacobi_spectral::green::{assoc_by_substitution, green_block, resolvent_identity_check};
use jacobi_spectral::qseries::{asc2_polynomial, qpoch, qpoch_inf, QCount, QParams};
use jacobi_spectral::recurrence::{eval_phat, eval_q, eval_q_assoc};
use jacobi_spectral::second_kind::{
    kappa_sequence, markov_ratio, second_kind_values, trace_inverse, weyl, SeriesOptions,
};
use jacobi_spectral::spectrum::{find_spectrum, oracle_gaps, SpectrumOptions, TruncatedTridiagonal};
use jacobi_spectral::{CoefficientSource, Complex64, Error};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn asc(q: f64, a: f64) -> CoefficientSource {
    CoefficientSource::asc2(q, a).unwrap()
}

/// `(q;q)_n` by direct product.
fn qq(q: f64, n: usize) -> f64 {
    (1..=n).map(|k| 1.0 - q.powi(k as i32)).product()
}

#[test]
fn coefficients() {
    let (a0, b0) = asc(0.5, 0.5).coeffs(0).unwrap();
    assert_relative_eq!(a0, 0.5f64.sqrt(), max_relative = 1e-15);
    assert_eq!(b0, 1.5);
    let (a1, b1) = asc(0.5, 0.5).with_shift(0.5).coeffs(1).unwrap();
    assert_relative_eq!(a1, 3f64.sqrt(), max_relative = 1e-15);
    assert_eq!(b1, 2.5);
    let t = CoefficientSource::table(vec![1.0], vec![2.0, 2.0]).unwrap();
    assert_eq!(t.coeffs(0).unwrap(), (1.0, 2.0));
    assert!(t.coeffs(5).is_err());
}

#[test]
fn orthonormal_polynomials_at_a() {
    let src = asc(0.5, 0.5);
    assert_eq!(eval_phat(&src, c(0.5), 0).unwrap().value(), c(1.0));
    assert_relative_eq!(eval_phat(&src, c(0.5), 1).unwrap().value().re, -2f64.sqrt(), max_relative = 1e-14);
    let p3 = eval_phat(&src, c(0.5), 3).unwrap().value().re;
    assert_relative_eq!(p3, -1.0 / qq(0.5, 3).sqrt(), max_relative = 1e-14);
    assert_relative_eq!(p3, -1.7457431, max_relative = 1e-7);
}

#[test]
fn polynomials_of_second_kind() {
    let src = asc(0.5, 0.5);
    assert!(eval_q(&src, c(0.7), 0).unwrap().is_zero());
    assert_relative_eq!(eval_q(&src, c(3.0), 1).unwrap().to_f64(), 2f64.sqrt(), max_relative = 1e-15);
    // Q_2 = P_2 sum_{j<2} 1/(alpha_j P_j P_{j+1}).
    let z = c(0.5);
    let p: Vec<f64> = (0..3).map(|n| eval_phat(&src, z, n).unwrap().value().re).collect();
    let s: f64 = (0..2).map(|j| 1.0 / (src.alpha(j).unwrap() * p[j] * p[j + 1])).sum();
    assert_relative_eq!(eval_q(&src, z, 2).unwrap().to_f64(), s * p[2], max_relative = 1e-14);
}

#[test]
fn associated_polynomials() {
    let src = asc(0.5, 0.5);
    assert!(eval_q_assoc(&src, c(0.0), 2, 3).unwrap().is_zero());
    assert_relative_eq!(
        eval_q_assoc(&src, c(0.4), 1, 0).unwrap().to_f64(),
        eval_q(&src, c(0.4), 1).unwrap().to_f64(),
        max_relative = 1e-15
    );
    let y = assoc_by_substitution::<f64>(&src, 0.0, 1, 3).unwrap();
    assert_relative_eq!(eval_q_assoc(&src, c(0.0), 2, 1).unwrap().to_f64(), y[2], max_relative = 1e-12);
}

#[test]
fn green_block_examples() {
    let src = asc(0.5, 0.5);
    let g = green_block(&src, 6).unwrap();
    assert_relative_eq!(g.get(1, 0), 2f64.sqrt(), max_relative = 1e-15);
    assert_eq!(g.get(2, 4), 0.0);
    assert!(g.right_inverse_residual(&src).unwrap() < 1e-13);
    assert!(green_block(&src, 1).is_err());
}

#[test]
fn resolvent_identity_examples() {
    assert_eq!(resolvent_identity_check(&asc(0.5, 0.5), 0.0, 8).unwrap(), 0.0);
    assert!(resolvent_identity_check(&asc(0.5, 0.5), 0.3, 12).unwrap() <= 1e-10);
    let t = CoefficientSource::table(vec![0.4, 0.7, 0.3, 0.9, 0.5], vec![2.0, 2.5, 1.9, 2.2, 3.0]).unwrap();
    assert!(resolvent_identity_check(&t, 0.1, 5).unwrap() <= 1e-12);
}

#[test]
fn weyl_function() {
    let (q, a) = (0.5, 0.5);
    let src = asc(q, a).with_shift(a);
    // Oracle: sum_j (q;q)_j a^j.
    let oracle: f64 = (0..200).map(|j| qq(q, j) * a.powi(j as i32)).sum();
    let w = weyl(&src, 0.0, 1.0 - a, SeriesOptions::default()).unwrap();
    assert_relative_eq!(w.value, oracle, max_relative = 1e-13);
    assert!((w.value - 1.42242).abs() < 2e-5);
    let w3 = weyl(&src, 0.3, 1.0 - a, SeriesOptions::default()).unwrap();
    assert!(w3.value > 0.0);
    assert!((markov_ratio(&src, 0.3, 50).unwrap() - w3.value).abs() < 1e-8);
    assert!(weyl(&src, 0.6, 1.0 - a, SeriesOptions::default()).is_err());
}

#[test]
fn second_kind_closed_form() {
    let (q, a) = (0.5, 0.5);
    let src = asc(q, a).with_shift(a);
    let t = second_kind_values(&src, 0.0, 1.0 - a, 4, SeriesOptions::default()).unwrap();
    let tail: f64 = (2..200).map(|j| qq(q, j) * a.powi(j as i32)).sum();
    let w2 = (q / a) / qq(q, 2).sqrt() * tail;
    assert!((t.values[2] - w2).abs() <= 1e-12);
    let w = weyl(&src, 0.0, 1.0 - a, SeriesOptions::default()).unwrap();
    assert_relative_eq!(t.values[0], w.value, max_relative = 1e-14);
    assert!(t.kappas.is_some());
}

#[test]
fn kappas_and_trace() {
    let (q, a) = (0.5, 0.5);
    let src = asc(q, a).with_shift(a);
    let ks = kappa_sequence(&src, 40, 4000).unwrap();
    assert!(ks.kappas.iter().all(|&k| k > 0.0));
    assert!(ks.partial_sums.windows(2).all(|w| w[1] > w[0]));
    let oracle: f64 = (0..200).map(|n| 1.0 / (q.powi(-n) - a)).sum();
    let tr = trace_inverse(&src, 1e-12, 100_000).unwrap();
    assert!((tr.value - oracle).abs() <= 1e-10);
    assert!((tr.value - 3.21339).abs() < 1e-5);
    assert!(tr.value >= ks.kappas[0]);
    let w = weyl(&src, 0.0, 1.0 - a, SeriesOptions::default()).unwrap();
    assert_relative_eq!(ks.kappas[0], w.value, max_relative = 1e-13);
    // Closed form: kappa_n = (q/a)^n / (q;q)_n * sum_{j>=n} (q;q)_j a^j.
    for n in [1usize, 5, 12] {
        let tail: f64 = (n..300).map(|j| qq(q, j) * a.powi(j as i32)).sum();
        let k = (q / a).powi(n as i32) / qq(q, n) * tail;
        assert_relative_eq!(ks.kappas[n], k, max_relative = 1e-12);
    }
}

#[test]
fn characteristic_function_values() {
    let src = asc(0.5, 0.5).with_shift(0.5);
    let zero = charfn_partial_sum(&src, c(0.0), 1e-14).unwrap();
    assert_eq!(zero.value, c(1.0));
    assert_eq!(charfn_ratio(&src, c(0.0), 30).unwrap().value, c(1.0));
    let two = charfn_partial_sum(&src, c(-0.25), 1e-13).unwrap();
    assert!((two.value - c(2.0)).norm() <= two.total_bound() + 1e-12);
    let at_eig = charfn_partial_sum(&src, c(0.5), 1e-13).unwrap();
    assert!(at_eig.value.norm() <= at_eig.total_bound() + 1e-12);
    let r = charfn_ratio(&src, c(-0.25), 80).unwrap();
    assert!((r.value - c(2.0)).norm() <= 1e-9);
    assert!(!r.certified);
}

#[test]
fn hadamard_and_reference() {
    let (q, a) = (0.5f64, 0.5);
    let h = hadamard_product(&[2.0, 5.0], c(0.0)).unwrap();
    assert_eq!(h.value, c(1.0));
    assert_eq!(hadamard_product(&[2.0], c(2.0)).unwrap().value, c(0.0));
    let eigs: Vec<f64> = (0..30).map(|n| q.powi(-n) - a).collect();
    let h = hadamard_product(&eigs, c(-0.25)).unwrap();
    assert!((h.value - c(2.0)).norm() <= h.tail_bound);
    assert!(hadamard_product(&[1.0, 1.0], c(0.1)).is_err());
    assert_eq!(qpochhammer_reference(c(a), q, a), c(1.0));
    assert_eq!(qpochhammer_reference(c(8.0), q, a), c(0.0));
    assert_relative_eq!(qpochhammer_reference(c(0.25), q, a).re, 2.0, max_relative = 1e-15);
}

#[test]
fn sturm_examples() {
    let t = TruncatedTridiagonal::from_source(&asc(0.5, 0.5), 2).unwrap();
    let e = t.sturm_eigenvalues(2, 1e-14).unwrap();
    let d = 1.0625f64.sqrt();
    assert!((e[0] - (2.25 - d)).abs() < 1e-13);
    assert!((e[1] - (2.25 + d)).abs() < 1e-13);
    let one = TruncatedTridiagonal::from_source(&asc(0.5, 0.5), 1).unwrap();
    assert_eq!(one.sturm_eigenvalues(1, 1e-14).unwrap()[0], 1.5);
    let src = asc(0.5, 0.5);
    for j in 1..=3 {
        let xs: Vec<f64> = (j..=j + 30)
            .map(|n| TruncatedTridiagonal::from_source(&src, n).unwrap().eigenvalue(j - 1, 0.0).unwrap())
            .collect();
        // Strict until the root reaches its limit to binary64 resolution.
        let limit = 0.5f64.powi(-(j as i32 - 1));
        for w in xs.windows(2) {
            assert!(w[1] < w[0] || (w[0] - limit).abs() < 1e-14 * limit, "{w:?}");
        }
    }
}

#[test]
fn spectrum_examples() {
    let res = find_spectrum(&asc(0.5, 0.5).with_shift(0.5), 6, &SpectrumOptions::default()).unwrap();
    for (j, l) in res.values().iter().enumerate() {
        assert!((l - (2f64.powi(j as i32) - 0.5)).abs() <= 1e-10);
    }
    let res = find_spectrum(&asc(0.3, 0.3), 4, &SpectrumOptions::default()).unwrap();
    let want = [1.0, 10.0 / 3.0, 100.0 / 9.0, 1000.0 / 27.0];
    for (l, w) in res.values().iter().zip(want) {
        assert!((l - w).abs() <= 1e-10 * w.max(1.0), "{l} vs {w}");
    }
}

#[test]
fn oracle_examples() {
    let src = asc(0.5, 0.5).with_shift(0.5);
    let eigs = [0.5, 1.5, 3.5, 7.5];
    let g200 = oracle_gaps(&src, &eigs, 200).unwrap();
    assert!(g200.iter().all(|&g| g <= 1e-8));
    let g100 = oracle_gaps(&src, &eigs, 100).unwrap();
    assert!(g100.iter().zip(&g200).all(|(a, b)| a >= b));
    let g1 = oracle_gaps(&src, &eigs[..1], 1).unwrap();
    assert_eq!(g1[0], 0.5);
}

#[test]
fn pochhammer_examples() {
    let q = 0.5;
    assert_eq!(qpoch(c(0.3), q, QCount::Finite(0)).unwrap().value, c(1.0));
    assert_eq!(qpoch(c(0.5), q, QCount::Finite(2)).unwrap().value, c(0.375));
    let oracle: f64 = (1..=60).map(|k| 1.0 - q.powi(k)).product();
    assert_relative_eq!(qpoch_inf(c(q), q).re, oracle, max_relative = 1e-15);
    assert!((oracle - 0.2887880951).abs() < 1e-10);
    for q in [0.3, 0.5, 0.7, 0.9] {
        let lhs = qpoch_inf(c(q), q).re;
        let rhs = (1.0 - q) * qpoch_inf(c(q * q), q).re;
        assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
    }
}

#[test]
fn closed_form_polynomials_match_recurrence() {
    let params = QParams::new(0.5, 0.5).unwrap();
    let src = params.source();
    for n in 0..=25 {
        for i in 0..=8 {
            let x = -1.0 + 0.5 * i as f64;
            let closed = asc2_polynomial(params, c(x), n).phat;
            let rec = eval_phat(&src, c(x), n).unwrap().value();
            assert!((closed - rec).norm() <= 1e-9 * rec.norm().max(1e-300), "n={n} x={x}");
        }
    }
}

#[test]
fn determinacy_gate() {
    assert!(QParams::determinate(0.5, 0.7).is_err());
    assert!(QParams::determinate(0.5, 0.5).is_ok());
    let src = asc(0.5, 0.7);
    assert!(matches!(charfn_partial_sum(&src, c(0.1), 1e-10), Err(Error::InvalidParameter(_))));
}
