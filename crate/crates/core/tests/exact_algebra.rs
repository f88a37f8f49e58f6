use pfhodge::exact_algebra::rational::{BigQ, fmt_q, parse_rational, q, qi};
use pfhodge::exact_algebra::{Poly, PowerSeries, QExpansion, RatFunc};
use pfhodge::qforms;
use proptest::prelude::*;

fn ps(c: &[BigQ], order: usize) -> PowerSeries {
    PowerSeries::new(c.to_vec(), order)
}

fn ints(c: &[i64]) -> Vec<BigQ> {
    c.iter().map(|&x| qi(x)).collect()
}

fn rat(num: &[i64], den: &[i64]) -> RatFunc {
    RatFunc::new(Poly::from_ints(num), Poly::from_ints(den)).unwrap()
}

#[test]
fn partial_fraction_sum() {
    // 1/z + 1/(1-z) = 1/(z(1-z))
    let a = rat(&[1], &[0, 1]);
    let b = rat(&[1], &[1, -1]);
    assert_eq!(a.add(&b), rat(&[1], &[0, 1, -1]));
}

#[test]
fn quartic_b2_times_z() {
    let b2 = rat(&[6, -9], &[0, 2, -2]);
    let p = b2.mul(&RatFunc::var());
    assert_eq!(p, rat(&[6, -9], &[2, -2]));
    assert_eq!(p.den().degree(), Some(1));
}

#[test]
fn ratfunc_self_division() {
    let f = rat(&[3, 0, 1], &[1, 5, -2]);
    assert_eq!(f.div(&f).unwrap(), RatFunc::one());
    assert!(f.div(&RatFunc::zero()).is_err());
}

#[test]
fn ratfunc_canonical_form() {
    let f = rat(&[-2, 2], &[-4, 0, 4]);
    assert!(f.den().leading() == qi(1));
    assert_eq!(f, rat(&[1], &[2, 2]));
}

#[test]
fn geometric_series_inverse() {
    let s = ps(&ints(&[1, -1]), 10);
    let inv = s.inverse().unwrap();
    assert_eq!(inv, ps(&ints(&[1; 10]), 10));
    assert_eq!(inv.inverse().unwrap(), s);
}

#[test]
fn zero_constant_term_has_no_inverse() {
    assert!(ps(&ints(&[0, 1]), 5).inverse().is_err());
}

#[test]
fn e4_inverse_times_e4() {
    let e4 = qforms::eisenstein(4, 30).unwrap();
    let prod = e4.mul(&e4.inverse().unwrap());
    let one = QExpansion::constant(qi(1), 30);
    assert!(prod.sub(&one).vanishes_to(&qi(30)));
}

#[test]
fn perfect_square_root() {
    let s = ps(&ints(&[1, 2, 1]), 8);
    assert_eq!(s.nth_root(2).unwrap(), ps(&ints(&[1, 1]), 8));
}

#[test]
fn fourth_root_extends_ramification() {
    // q^2 (16 + q) -> q^(1/2) (2 + ...)
    let s = QExpansion::new(1, 2, ps(&ints(&[16, 1]), 10));
    let r = s.nth_root(4).unwrap();
    assert_eq!(r.leading_exponent(), Some(q(1, 2)));
    assert_eq!(r.leading_coeff(), Some(&qi(2)));
    let back = r.powi(4).unwrap();
    assert!(back.sub(&s).vanishes_to(&qi(11)));
}

#[test]
fn root_needs_rational_leading_coefficient() {
    let s = ps(&ints(&[2, 1]), 5);
    assert!(s.nth_root(2).is_err());
}

fn lagrange_oracle(n: usize) -> Vec<BigQ> {
    // revert(q + q^2): coefficients (-1)^(k-1) Catalan(k-1)
    let mut out = vec![qi(0)];
    let mut cat = qi(1);
    for k in 1..n {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        out.push(cat.clone() * qi(sign));
        let m = (k - 1) as i64;
        cat = cat * qi(2 * (2 * m + 1)) / qi(m + 2);
    }
    out
}

#[test]
fn reversion_of_q_plus_q2() {
    let t = ps(&ints(&[0, 1, 1]), 12);
    let r = t.reversion().unwrap();
    assert_eq!(r.coeffs(), lagrange_oracle(12).as_slice());
    assert_eq!(&r.coeffs()[..5], ints(&[0, 1, -1, 2, -5]).as_slice());
}

#[test]
fn reversion_identity_and_failure() {
    let id: PowerSeries = PowerSeries::var(7);
    assert_eq!(id.reversion().unwrap(), id);
    assert!(ps(&ints(&[0, 0, 1]), 5).reversion().is_err());
    assert!(ps(&ints(&[1, 1]), 5).reversion().is_err());
}

#[test]
fn theta_on_monomials_and_constants() {
    let s = ps(&ints(&[5, 0, 0, 1]), 6);
    assert_eq!(s.theta(), ps(&ints(&[0, 0, 0, 3]), 6));
    assert!(ps(&ints(&[7]), 4).theta().is_zero());
}

#[test]
fn theta_of_eta_is_e2_over_24() {
    let n = 40;
    let eta = qforms::eta(n);
    let e2 = qforms::eisenstein(2, n).unwrap();
    let lhs = eta.theta();
    let rhs = eta.mul(&e2).scale(&q(1, 24));
    assert!(lhs.sub(&rhs).vanishes_to(&(qi(n as i64) + q(1, 24))));
}

#[test]
fn rational_parsing() {
    assert_eq!(parse_rational("-3/6"), Some(q(-1, 2)));
    assert_eq!(parse_rational("0.25"), Some(q(1, 4)));
    assert_eq!(fmt_q(&q(4, -6)), "-2/3");
    assert_eq!(parse_rational("x"), None);
}

#[test]
fn poly_rational_roots() {
    // (X - 1/4)(X - 1/2)^2
    let p = &(&Poly::linear_root(&q(1, 4)) * &Poly::linear_root(&q(1, 2))) * &Poly::linear_root(&q(1, 2));
    let (roots, rest) = p.rational_roots().unwrap();
    assert_eq!(roots, vec![(q(1, 4), 1), (q(1, 2), 2)]);
    assert_eq!(rest.degree(), Some(0));
}

#[test]
fn truncation_order_propagates() {
    let a = ps(&ints(&[1, 1]), 10);
    let b = ps(&ints(&[1, 2]), 6);
    assert_eq!(a.mul(&b).order(), 6);
    assert_eq!(a.add(&b).order(), 6);
}

fn small_q() -> impl Strategy<Value = BigQ> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| q(n, d))
}

fn series_with(c0: Option<BigQ>, n: usize) -> impl Strategy<Value = PowerSeries> {
    prop::collection::vec(small_q(), n).prop_map(move |mut v| {
        if let Some(c) = &c0 {
            v[0] = c.clone();
        }
        PowerSeries::new(v, n)
    })
}

fn poly_strategy() -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_q(), 0..5).prop_map(Poly::new)
}

fn ratfunc_strategy() -> impl Strategy<Value = RatFunc> {
    (poly_strategy(), poly_strategy()).prop_filter_map("zero denominator", |(a, b)| RatFunc::new(a, b).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_ring_laws(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
    }

    #[test]
    fn ratfunc_ring_laws(a in ratfunc_strategy(), b in ratfunc_strategy(), c in ratfunc_strategy()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.sub(&a), RatFunc::zero());
    }

    #[test]
    fn series_ring_laws(a in series_with(None, 8), b in series_with(None, 8), c in series_with(None, 8)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }

    #[test]
    fn reversion_round_trip(mut s in series_with(Some(qi(0)), 10), lin in small_q()) {
        prop_assume!(lin != qi(0));
        s.set_coeff(1, lin);
        let r = s.reversion().unwrap();
        prop_assert_eq!(s.compose(&r).unwrap(), PowerSeries::var(10));
        prop_assert_eq!(r.compose(&s).unwrap(), PowerSeries::var(10));
        prop_assert_eq!(r.reversion().unwrap(), s);
    }

    #[test]
    fn nth_root_power_back(s in series_with(Some(qi(1)), 9), n in 1u32..6) {
        let r = s.nth_root(n).unwrap();
        prop_assert_eq!(r.pow(n), s);
    }

    #[test]
    fn inverse_is_involution(s in series_with(None, 9)) {
        prop_assume!(s.coeff(0) != &qi(0));
        let inv = s.inverse().unwrap();
        prop_assert_eq!(s.mul(&inv), PowerSeries::one(9));
        prop_assert_eq!(inv.inverse().unwrap(), s);
    }

    #[test]
    fn theta_leibniz(a in series_with(None, 8), b in series_with(None, 8)) {
        prop_assert_eq!(a.mul(&b).theta(), a.theta().mul(&b).add(&a.mul(&b.theta())));
    }

    #[test]
    fn fractional_theta_leibniz(a in series_with(Some(qi(1)), 8), b in series_with(Some(qi(3)), 8), e in 0i64..7, f in 0i64..7) {
        let x = QExpansion::new(3, e, a);
        let y = QExpansion::new(2, f, b);
        let lhs = x.mul(&y).theta();
        let rhs = x.theta().mul(&y).add(&x.mul(&y.theta()));
        prop_assert!(lhs.sub(&rhs).vanishes_to(&lhs.precision()));
    }
}
