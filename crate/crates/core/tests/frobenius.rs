mod common;

use common::{check_basis, riemann_data, riemann_operator};
use num_bigint::BigInt;
use pfhodge::exact_algebra::mp::{MpComplex, dist_f64};
use pfhodge::exact_algebra::rational::{BigQ, factorial, q, qi};
use pfhodge::exact_algebra::{LogSeries, PowerSeries};
use pfhodge::frobenius::{apply_operator, eval_log_series, frobenius_basis, hypergeometric_series};
use pfhodge::pf_operator::{PFOperator, Point};
use pfhodge::presets;
use proptest::prelude::*;

fn holomorphic(op: &PFOperator, n: usize) -> PowerSeries {
    let b = frobenius_basis(op, &Point::zero(), n).unwrap();
    b.solutions.iter().find(|s| s.leading_log == 0).unwrap().series.terms[0].clone()
}

fn fq(n: u64) -> BigQ {
    BigQ::from_integer(factorial(n))
}

#[test]
fn legendre_holomorphic_solution() {
    let g = holomorphic(&presets::operator("legendre").unwrap(), 12);
    for n in 0..12u64 {
        // (binomial(2n, n) / 4^n)^2
        let c = fq(2 * n) / (fq(n) * fq(n)) / BigQ::from_integer(BigInt::from(4).pow(n as u32));
        assert_eq!(g.coeff(n as usize), &(c.clone() * c));
    }
    assert_eq!(&g.coeffs()[..3], &[qi(1), q(1, 4), q(9, 64)]);
}

#[test]
fn quartic_holomorphic_matches_factorial_formula() {
    let op = presets::operator("quartic").unwrap();
    let g = holomorphic(&op, 15);
    let h = hypergeometric_series(&[q(1, 4), q(1, 2), q(3, 4)], &[qi(1), qi(1)], 15).unwrap();
    assert_eq!(g, h);
    for n in 0..15u64 {
        let want = fq(4 * n) / (fq(n).pow(4) * BigQ::from_integer(BigInt::from(4).pow(4 * n as u32)));
        assert_eq!(g.coeff(n as usize), &want);
    }
    let resid = apply_operator(&op, &LogSeries::new(qi(0), vec![h])).unwrap();
    assert!(resid.is_zero());
}

#[test]
fn mum_log_structure() {
    let op = presets::operator("quartic").unwrap();
    let b = frobenius_basis(&op, &Point::zero(), 10).unwrap();
    let logs: Vec<usize> = b.solutions.iter().map(|s| s.series.log_degree()).collect();
    assert_eq!(logs, [0, 1, 2]);
    for s in &b.solutions {
        // the top log power carries the holomorphic period, leading coefficient 1
        let top = &s.series.terms[s.leading_log];
        assert_eq!(top.coeff(0), &qi(1));
        assert_eq!(top, &b.solutions[0].series.terms[0]);
    }
}

#[test]
fn order_one_operator() {
    let op = PFOperator::parse("theta - 2/3", "z").unwrap();
    let b = frobenius_basis(&op, &Point::zero(), 6).unwrap();
    assert_eq!(b.solutions.len(), 1);
    let s = &b.solutions[0].series;
    assert_eq!(s.mu, q(2, 3));
    assert_eq!(s.terms[0], PowerSeries::one(6));
}

#[test]
fn theta_on_log_monomial() {
    // L = theta; theta(z^mu log z) = mu z^mu log z + z^mu
    let op = PFOperator::parse("theta", "z").unwrap();
    let y = LogSeries::new(q(1, 2), vec![PowerSeries::zero(4), PowerSeries::one(4)]);
    let out = apply_operator(&op, &y).unwrap();
    assert_eq!(out.terms[0], PowerSeries::one(4));
    assert_eq!(out.terms[1], PowerSeries::constant(q(1, 2), 4));
}

#[test]
fn hypergeometric_coefficients() {
    let h = hypergeometric_series(&[q(1, 3), q(2, 3)], &[qi(1)], 4).unwrap();
    assert_eq!(h.coeffs(), &[qi(1), q(2, 9), q(10, 81), q(560, 6561)]);
    let z = hypergeometric_series(&[qi(0), q(1, 2)], &[qi(1)], 5).unwrap();
    assert_eq!(z, PowerSeries::one(5));
    assert!(hypergeometric_series(&[qi(1)], &[qi(-2)], 5).is_err());
}

#[test]
fn geometric_series_value() {
    let y = LogSeries::new(qi(0), vec![PowerSeries::new(vec![qi(1); 120], 120)]);
    let z = MpComplex::from_q(&q(1, 2), 256);
    let e = eval_log_series(&y, &z, 0).unwrap();
    assert!(dist_f64(&e.value, &MpComplex::from_i64(2, 256)) < 1e-30);
    assert!(e.tail_log10 < -30.0);
}

/// 1 / AGM(1, sqrt(1 - u)) = 2F1(1/2, 1/2; 1; u).
fn agm_oracle(u: &BigQ, p: usize) -> MpComplex {
    let mut a = MpComplex::one(p);
    let mut b = MpComplex::from_q(&(qi(1) - u), p).root(2).unwrap();
    let half = MpComplex::from_q(&q(1, 2), p);
    for _ in 0..40 {
        let a2 = a.add(&b).mul(&half);
        let b2 = a.mul(&b).root(2).unwrap();
        a = a2;
        b = b2;
    }
    a.inv().unwrap()
}

#[test]
fn legendre_period_two_methods() {
    let op = presets::operator("legendre").unwrap();
    let g = holomorphic(&op, 200);
    let u = q(1, 2);
    let e = eval_log_series(&LogSeries::new(qi(0), vec![g]), &MpComplex::from_q(&u, 256), 0).unwrap();
    assert!(dist_f64(&e.value, &agm_oracle(&u, 256)) < 1e-20);
}

#[test]
fn branch_shift_of_pure_log() {
    let y = LogSeries::new(qi(0), vec![PowerSeries::zero(3), PowerSeries::one(3)]);
    let z = MpComplex::from_q(&q(1, 3), 128);
    let a = eval_log_series(&y, &z, 0).unwrap().value;
    let b = eval_log_series(&y, &z, 1).unwrap().value;
    let two_pi = 2.0 * std::f64::consts::PI;
    let (re, im) = b.sub(&a).to_f64();
    assert!(re.abs() < 1e-30 && (im - two_pi).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn random_operators_are_solved((alpha, beta, s) in riemann_data()) {
        let op = riemann_operator(&alpha, &beta, &s);
        for p in [Point::zero(), Point::Finite(s.clone()), Point::Infinity] {
            check_basis(&op, &p, 12)?;
        }
    }
}
