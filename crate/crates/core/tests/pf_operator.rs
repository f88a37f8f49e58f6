mod common;

use common::{riemann_data, riemann_operator};
use pfhodge::Error;
use pfhodge::exact_algebra::rational::{BigQ, q, qi};
use pfhodge::exact_algebra::{Poly, RatFunc};
use pfhodge::pf_operator::{OperatorDocument, PFOperator, Point, PointClass};
use pfhodge::presets;
use proptest::prelude::*;

fn rat(num: &[i64], den: &[i64]) -> RatFunc {
    RatFunc::new(Poly::from_ints(num), Poly::from_ints(den)).unwrap()
}

fn qs(v: &[(i64, i64)]) -> Vec<BigQ> {
    v.iter().map(|&(n, d)| q(n, d)).collect()
}

fn exps(op: &PFOperator, p: &str) -> Vec<BigQ> {
    op.exponents_at(&Point::parse(p).unwrap()).unwrap().exponents
}

#[test]
fn quartic_parses_to_monic_theta_form() {
    let op = presets::operator("quartic").unwrap();
    assert_eq!(op.rank(), 3);
    // b2 = -(3/2) z/(1-z)
    assert_eq!(op.coeffs[2], rat(&[0, 3], &[-2, 2]));
    assert_eq!(op.coeffs[1], rat(&[0, 11], &[-16, 16]));
    assert_eq!(op.coeffs[0], rat(&[0, 3], &[-32, 32]));
}

#[test]
fn cubic_and_order_one() {
    let op = PFOperator::parse("theta^2 - z*(theta+1/3)*(theta+2/3)", "z").unwrap();
    assert_eq!(op.coeffs[1], rat(&[0, 1], &[-1, 1]));
    assert_eq!(op.coeffs[0], rat(&[0, 2], &[-9, 9]));
    let t = PFOperator::parse("theta", "z").unwrap();
    assert_eq!(t.rank(), 1);
    assert!(t.coeffs[0].is_zero());
}

#[test]
fn theta_commutes_past_z() {
    // theta*z = z*theta + z
    let a = PFOperator::parse("theta^2 - theta*z", "z").unwrap();
    let b = PFOperator::parse("theta^2 - z*theta - z", "z").unwrap();
    assert_eq!(a, b);
}

#[test]
fn parse_errors_carry_position() {
    match PFOperator::parse("theta^2 + * z", "z") {
        Err(Error::Parse { offset, .. }) => assert!(offset > 0),
        other => panic!("{other:?}"),
    }
    assert!(PFOperator::parse("z", "z").is_err());
}

#[test]
fn dz_form_of_theta_squared() {
    let op = PFOperator::parse("theta^2", "z").unwrap();
    let a = op.to_dz_form();
    // z^2 D^2 + z D  ->  D^2 + (1/z) D
    assert_eq!(a[1], rat(&[1], &[0, 1]));
    assert!(a[0].is_zero());
}

#[test]
fn legendre_dz_form() {
    let op = presets::operator("legendre").unwrap();
    let a = op.to_dz_form();
    assert_eq!(a[1], rat(&[1, -2], &[0, 1, -1]));
    assert_eq!(a[0], rat(&[-1], &[0, 4, -4]));
}

#[test]
fn quartic_exponent_table() {
    let op = presets::operator("quartic").unwrap();
    assert_eq!(exps(&op, "0"), qs(&[(0, 1), (0, 1), (0, 1)]));
    assert_eq!(exps(&op, "1"), qs(&[(0, 1), (1, 2), (1, 1)]));
    assert_eq!(exps(&op, "inf"), qs(&[(1, 4), (1, 2), (3, 4)]));
    let pts: Vec<String> = op.singular_points().unwrap().iter().map(|r| r.point.to_string()).collect();
    assert_eq!(pts, ["0", "1", "inf"]);
    assert_eq!(op.exponents_at(&Point::zero()).unwrap().class, PointClass::Mum);
}

#[test]
fn indicial_polynomials() {
    let op = presets::operator("quartic").unwrap();
    assert_eq!(op.indicial_polynomial().unwrap(), Poly::monomial(qi(1), 3));
    let at_inf = op.localize(&Point::Infinity).unwrap().indicial_polynomial().unwrap();
    let want = &(&Poly::linear_root(&q(1, 4)) * &Poly::linear_root(&q(1, 2))) * &Poly::linear_root(&q(3, 4));
    assert_eq!(at_inf, want);
    let leg = presets::operator("legendre").unwrap();
    let p = leg.localize(&Point::Infinity).unwrap().indicial_polynomial().unwrap();
    assert_eq!(p, &Poly::linear_root(&q(1, 2)) * &Poly::linear_root(&q(1, 2)));
}

#[test]
fn legendre_cubic_quintic_tables() {
    let leg = presets::operator("legendre").unwrap();
    assert_eq!(exps(&leg, "0"), qs(&[(0, 1), (0, 1)]));
    assert_eq!(exps(&leg, "1"), qs(&[(0, 1), (0, 1)]));
    assert_eq!(exps(&leg, "inf"), qs(&[(1, 2), (1, 2)]));
    let cub = presets::operator("cubic").unwrap();
    assert_eq!(exps(&cub, "inf"), qs(&[(1, 3), (2, 3)]));
    let quin = presets::operator("quintic").unwrap();
    let r = quin.exponents_at(&Point::parse("1").unwrap()).unwrap();
    assert_eq!(r.exponents, qs(&[(0, 1), (1, 1), (1, 1), (2, 1)]));
    assert_eq!(r.class, PointClass::RegularSingular);
    assert_eq!(exps(&quin, "inf"), qs(&[(1, 5), (2, 5), (3, 5), (4, 5)]));
}

#[test]
fn smooth_point_and_theta_power() {
    let quin = presets::operator("quintic").unwrap();
    let r = quin.exponents_at(&Point::parse("1/2").unwrap()).unwrap();
    assert_eq!(r.exponents, qs(&[(0, 1), (1, 1), (2, 1), (3, 1)]));
    assert_eq!(r.class, PointClass::Smooth);
    let t = PFOperator::parse("theta^3", "z").unwrap();
    let pts: Vec<String> = t.singular_points().unwrap().iter().map(|r| r.point.to_string()).collect();
    assert_eq!(pts, ["0", "inf"]);
}

#[test]
fn localize_at_zero_is_identity() {
    let op = presets::operator("cubic").unwrap();
    assert_eq!(op.localize(&Point::zero()).unwrap(), op);
}

#[test]
fn irregular_and_irrational() {
    let op = PFOperator::parse("theta^2 - z", "z").unwrap();
    assert!(matches!(op.exponents_at(&Point::Infinity), Err(Error::Irregular { .. })));
    let op = PFOperator::parse("theta^2 - 2", "z").unwrap();
    match op.exponents_at(&Point::zero()) {
        Err(Error::IrrationalExponents { approx, .. }) => {
            assert_eq!(approx.len(), 2);
            assert!(approx.iter().any(|(re, _)| (re - 2f64.sqrt()).abs() < 1e-9));
        }
        other => panic!("{other:?}"),
    }
    let op = PFOperator::parse("(1 - 2*z^2)*theta^2 - z", "z").unwrap();
    assert!(matches!(op.candidate_points(), Err(Error::IrrationalSingularity { .. })));
}

#[test]
fn apparent_and_shifted_points() {
    // annihilator of {1, z^2 - 2z}
    let op = PFOperator::from_theta_strings(&["0".into(), "(1-2*z)/(z-1)".into()], "z").unwrap();
    let r = op.exponents_at(&Point::parse("1").unwrap()).unwrap();
    assert_eq!(r.exponents, qs(&[(0, 1), (2, 1)]));
    assert_eq!(r.class, PointClass::Apparent);
    // annihilator of {z^2, z^3}
    let op = PFOperator::parse("(theta-2)*(theta-3)", "z").unwrap();
    assert_eq!(op.exponents_at(&Point::zero()).unwrap().class, PointClass::RegularCyclicShift(2));
    assert_eq!(op.exponents_at(&Point::Infinity).unwrap().class, PointClass::RegularCyclicShift(-3));
}

#[test]
fn hbar_deformation() {
    let op = presets::operator("quartic").unwrap();
    assert_eq!(op.hbar_deform(&qi(1)).unwrap(), op);
    let d = op.hbar_deform(&qi(2)).unwrap();
    assert_eq!(d.coeffs[2], op.coeffs[2].scale(&q(1, 2)));
    assert_eq!(d.coeffs[1], op.coeffs[1].scale(&q(1, 4)));
    assert_eq!(d.coeffs[0], op.coeffs[0].scale(&q(1, 8)));
    assert!(op.hbar_deform(&qi(0)).is_err());
    // exponents at the MUM point survive the grading, those at infinity do not
    assert_eq!(exps(&d, "0"), exps(&op, "0"));
    assert_ne!(d.localize(&Point::Infinity).unwrap().indicial_polynomial().unwrap(), op.localize(&Point::Infinity).unwrap().indicial_polynomial().unwrap());
}

#[test]
fn documents_round_trip() {
    for name in presets::names() {
        let doc = presets::document(name).unwrap();
        let json = serde_json::to_string(&doc).unwrap();
        let back = OperatorDocument::from_str_auto(&json).unwrap();
        assert_eq!(back.name, doc.name);
        if doc.parameters.is_empty() {
            assert_eq!(back.to_operator().unwrap(), doc.to_operator().unwrap());
        }
    }
    let doc = OperatorDocument::from_str_auto("name = \"t\"\ntheta_coefficients = [\"z/(1-z)\", \"0\"]\n").unwrap();
    assert_eq!(doc.to_operator().unwrap().rank(), 2);
}

#[test]
fn template_instantiation() {
    let doc = presets::document("vhs14").unwrap();
    assert!(doc.to_operator().is_err());
    let (m1, m2) = (q(1, 8), q(3, 8));
    let op = doc.instantiate(&[("mu1", &m1), ("mu2", &m2)]).unwrap().to_operator().unwrap();
    assert_eq!(exps(&op, "inf"), qs(&[(1, 8), (3, 8), (5, 8), (7, 8)]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_operator_exponents((alpha, beta, s) in riemann_data()) {
        let op = riemann_operator(&alpha, &beta, &s);
        let r = alpha.len();
        let (mut a, mut b) = (alpha.clone(), beta.clone());
        a.sort();
        b.sort();
        prop_assert_eq!(exps(&op, "0"), a.clone());
        prop_assert_eq!(op.exponents_at(&Point::Infinity).unwrap().exponents, b.clone());
        // at s: 0, 1, ..., r-2 and (r-1) - sum alpha - sum beta
        let gamma = qi(r as i64 - 1) - a.iter().sum::<BigQ>() - b.iter().sum::<BigQ>();
        let mut want: Vec<BigQ> = (0..r as i64 - 1).map(qi).collect();
        want.push(gamma);
        want.sort();
        prop_assert_eq!(op.exponents_at(&Point::Finite(s.clone())).unwrap().exponents, want);
        let reps = op.singular_points().unwrap();
        prop_assert_eq!(PFOperator::fuchs_sum(&reps, r), qi(-((r * (r - 1)) as i64)));
    }

    #[test]
    fn localization_round_trip((alpha, beta, s) in riemann_data()) {
        let op = riemann_operator(&alpha, &beta, &s);
        for p in [Point::zero(), Point::Finite(s.clone()), Point::Infinity] {
            let direct = op.exponents_at(&p).unwrap().exponents;
            let loc = op.localize(&p).unwrap();
            prop_assert_eq!(loc.exponents_at(&Point::zero()).unwrap().exponents, direct);
        }
        // infinity twice returns the operator
        let back = op.localize(&Point::Infinity).unwrap().localize(&Point::Infinity).unwrap();
        prop_assert_eq!(back, op.clone());
    }

    #[test]
    fn dz_form_round_trip((alpha, beta, s) in riemann_data()) {
        let op = riemann_operator(&alpha, &beta, &s);
        let back = PFOperator::from_dz_form("z", &op.to_dz_form()).unwrap();
        prop_assert_eq!(back, op);
    }

    #[test]
    fn indicial_polynomial_reads_constant_terms((alpha, beta, s) in riemann_data()) {
        let op = riemann_operator(&alpha, &beta, &s);
        let p = op.indicial_polynomial().unwrap();
        for (i, b) in op.coeffs.iter().enumerate() {
            prop_assert_eq!(p.coeff(i), b.eval(&qi(0)).unwrap());
        }
        prop_assert_eq!(p.coeff(op.rank()), qi(1));
    }
}
