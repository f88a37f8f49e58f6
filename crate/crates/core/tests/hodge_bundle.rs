mod common;

use common::{synthetic, telescoping_holds};
use pfhodge::exact_algebra::rational::{BigQ, fmt_q, q, qi};
use pfhodge::hodge_bundle::{ExponentTable, PointData};
use pfhodge::pf_operator::{PFOperator, Point, PointClass};
use pfhodge::presets;
use proptest::prelude::*;

fn table(name: &str) -> ExponentTable {
    ExponentTable::from_operator(&presets::operator(name).unwrap()).unwrap()
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

#[test]
fn quartic_bundle() {
    let t = table("quartic");
    let d = t.decompose();
    assert_eq!(d.singular, strs(&["0", "1", "inf"]));
    assert!(d.apparent.is_empty() && d.shifted.is_empty());
    assert_eq!(t.deg_hodge_line().unwrap(), 0);
    assert_eq!(t.deg_graded(1).unwrap(), -1);
    assert_eq!(t.splitting_genus0().unwrap(), [0, -1, -1]);
    let orders = t.higgs_orders(0).unwrap();
    assert_eq!(orders.iter().find(|(p, _)| *p == Point::Infinity).unwrap().1, 0);
    let r = t.report().unwrap();
    assert_eq!(r.parabolic_degrees, strs(&["1/4", "0", "-1/4"]));
    // exponents 0, 1/2, 1 at the conifold: spread exactly 1
    assert_eq!(r.spread_flags, strs(&["1"]));
}

#[test]
fn quintic_bundle() {
    let t = table("quintic");
    assert_eq!(t.deg_hodge_line().unwrap(), 0);
    assert_eq!(t.deg_graded(2).unwrap(), -1);
    assert_eq!(t.splitting_genus0().unwrap(), [0, 0, -1, -1]);
    let at1 = t.higgs_orders(1).unwrap();
    assert_eq!(at1.iter().find(|(p, _)| p.to_string() == "1").unwrap().1, 0);
    let r = t.report().unwrap();
    assert_eq!(r.parabolic_degrees, strs(&["1/5", "2/5", "-2/5", "-1/5"]));
    // the conifold spread is 2; the point is flagged, the degrees are still produced
    assert_eq!(r.spread_flags, strs(&["1"]));
}

#[test]
fn curves() {
    for (name, pd) in [("legendre", ["1/2", "-1/2"]), ("cubic", ["1/3", "-1/3"])] {
        let t = table(name);
        assert_eq!(t.deg_graded(0).unwrap(), 0);
        assert_eq!(t.splitting_genus0().unwrap(), [0, -1]);
        assert_eq!(t.report().unwrap().parabolic_degrees, strs(&pd));
    }
}

#[test]
fn theta_squared_divisor() {
    let t = ExponentTable::from_operator(&PFOperator::parse("theta^2", "z").unwrap()).unwrap();
    let d = t.decompose();
    assert_eq!(d.singular, strs(&["0", "inf"]));
    assert!(d.apparent.is_empty() && d.shifted.is_empty());
}

#[test]
fn apparent_point_enters_d_a() {
    let op = PFOperator::from_theta_strings(&["0".into(), "(1-2*z)/(z-1)".into()], "z").unwrap();
    let t = ExponentTable::from_operator(&op).unwrap();
    assert!(t.decompose().apparent.contains(&"1".to_string()));
    let o = t.higgs_orders(0).unwrap();
    assert_eq!(o.iter().find(|(p, _)| p.to_string() == "1").unwrap().1, 1);
}

#[test]
fn shifted_point_contributes_its_shift() {
    let base = table("legendre");
    let mut t = base.clone();
    t.points.push(PointData { point: Point::Finite(q(1, 2)), class: PointClass::RegularCyclicShift(2), exponents: vec![qi(2), qi(3)] });
    assert_eq!(t.deg_hodge_line().unwrap() - base.deg_hodge_line().unwrap(), 2);
    assert_eq!(t.decompose().shifted, vec![("1/2".to_string(), 2)]);
}

#[test]
fn vhs14_template() {
    let doc = presets::document("vhs14").unwrap();
    for (a, b) in [(q(1, 5), q(2, 5)), (q(1, 8), q(3, 8)), (q(1, 6), q(1, 4)), (q(1, 10), q(3, 10)), (q(1, 12), q(5, 12))] {
        let op = doc.instantiate(&[("mu1", &a), ("mu2", &b)]).unwrap().to_operator().unwrap();
        let t = ExponentTable::from_operator(&op).unwrap();
        let want: Vec<String> = [a.clone(), b.clone(), -b.clone(), -a.clone()].iter().map(fmt_q).collect();
        assert_eq!(t.report().unwrap().parabolic_degrees, want);
        for k in 0..4 {
            assert_eq!(t.parabolic_degree(k).unwrap(), -t.parabolic_degree(3 - k).unwrap());
        }
    }
}

#[test]
fn genus_and_range_errors() {
    let mut t = table("cubic");
    assert!(t.deg_graded(2).is_err());
    assert!(t.higgs_orders(1).is_err());
    t.genus = 1;
    assert!(t.splitting_genus0().is_err());
}

#[test]
fn weights_complement_exponents() {
    for name in presets::names().into_iter().filter(|n| *n != "vhs14") {
        for p in &table(name).points {
            for (nu, mu) in ExponentTable::weights(p).iter().zip(&p.exponents) {
                assert!((nu + mu).is_integer());
                assert!(*nu > qi(-1) && *nu <= qi(0));
            }
        }
    }
}

#[test]
fn telescoping_on_presets() {
    for name in ["quartic", "legendre", "cubic", "quintic"] {
        assert!(telescoping_holds(&table(name)), "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn telescoping_on_random_tables(t in synthetic()) {
        prop_assert!(telescoping_holds(&t));
        prop_assert_eq!(t.deg_graded(0).unwrap(), t.deg_hodge_line().unwrap());
    }

    #[test]
    fn rescaling_leaves_hodge_line_degree(t in synthetic(), i in 0usize..6, j in 0usize..6) {
        let n = t.points.len();
        let (i, j) = (i % n, j % n);
        prop_assume!(i != j);
        let mut s = t.clone();
        for e in s.points[i].exponents.iter_mut() { *e += qi(1); }
        for e in s.points[j].exponents.iter_mut() { *e -= qi(1); }
        prop_assert_eq!(s.deg_hodge_line().unwrap(), t.deg_hodge_line().unwrap());
    }

    #[test]
    fn parabolic_sum_consistency(t in synthetic()) {
        // sum_k pdeg = sum_k deg - sum of all weights at singular points
        let sing = |c: &PointClass| matches!(c, PointClass::Mum | PointClass::RegularSingular);
        let total: BigQ = (0..t.rank).map(|k| t.parabolic_degree(k).unwrap()).sum();
        let degs: i64 = (0..t.rank).map(|k| t.deg_graded(k).unwrap()).sum();
        let w: BigQ = t.points.iter().filter(|p| sing(&p.class)).flat_map(ExponentTable::weights).sum();
        prop_assert_eq!(total, qi(degs) - w);
    }
}
