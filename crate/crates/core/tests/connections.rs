use pfhodge::connections::{self, ExamplePreset, Jet2, PresetSeries, mat_norm};
use pfhodge::exact_algebra::MpComplex;
use pfhodge::exact_algebra::mp::dist_f64;
use pfhodge::exact_algebra::rational::{q, qi};
use pfhodge::exact_algebra::RatFunc;
use pfhodge::pf_operator::PFOperator;
use pfhodge::{Error, presets};

const BITS: usize = 256;

fn taus() -> Vec<MpComplex> {
    ["3i/2", "2i", "1/4+3i/2"].iter().map(|t| connections::tau_value(t, BITS).unwrap()).collect()
}

fn series(name: &str, order: usize) -> PresetSeries {
    PresetSeries::new(&ExamplePreset::load(name).unwrap(), order).unwrap()
}

#[test]
fn gauge_equivalence_at_samples() {
    let one = MpComplex::one(BITS);
    for name in ["quartic", "legendre", "cubic"] {
        let ps = series(name, 40);
        for tau in taus() {
            let s = ps.sample(&tau).unwrap();
            let rep = connections::verify_gauge(&s, &one).unwrap();
            assert!(rep.max_residual() < 1e-30, "{name}: {rep:?}");
            assert!(rep.phi_dagger_agreement < 1e-30);
            assert!(rep.metric_agreement < 1e-30);
            assert!(!rep.ring.is_empty());
        }
    }
}

#[test]
fn residual_does_not_depend_on_hbar() {
    let ps = series("quartic", 40);
    let s = ps.sample(&connections::tau_value("2i", BITS).unwrap()).unwrap();
    for h in ["1", "1/2", "2", "i", "1/3+i"] {
        let (re, im) = connections::parse_tau(h).unwrap();
        let hb = MpComplex::from_q_pair(&re, &im, BITS);
        let (r10, r01) = connections::gauge_residual(&s, &hb).unwrap();
        assert!(mat_norm(&r10) < 1e-30, "hbar = {h}");
        assert!(mat_norm(&r01) < 1e-30, "hbar = {h}");
    }
}

#[test]
fn perturbed_coefficient_is_detected() {
    let ps = series("cubic", 40);
    let mut s = ps.sample(&connections::tau_value("2i", BITS).unwrap()).unwrap();
    let eps = MpComplex::from_q(&q(1, 1000), BITS);
    s.b[1] = s.b[1].add(&Jet2::constant(&eps, s.b[1].deg()));
    let hb = MpComplex::from_i64(3, BITS);
    let (r10, _) = connections::gauge_residual(&s, &hb).unwrap();
    // the last column carries ℏ^{r-1-i} b_i, so rank 2 sees eps itself
    assert!((mat_norm(&r10) - 1e-3).abs() < 1e-12, "{}", mat_norm(&r10));
}

#[test]
fn hitchin_equation_and_ring() {
    let ps = series("legendre", 40);
    let s = ps.sample(&connections::tau_value("1/4+3i/2", BITS).unwrap()).unwrap();
    assert!(mat_norm(&connections::hitchin_residual(&s).unwrap()) < 1e-30);
    for r in connections::verify_ring_relations(&s).unwrap() {
        assert!(r.value < 1e-30, "{}", r.name);
    }
}

#[test]
fn metric_is_poincare() {
    let ps = series("quartic", 40);
    let tau = connections::tau_value("2i", BITS).unwrap();
    let (analytic, fd, g) = connections::poincare_check(&ps, &tau, 20).unwrap();
    // five-point stencil with step 2^-20 has error of order h^2
    assert!(dist_f64(&analytic, &fd) < 1e-9 * (1.0 + analytic.to_f64().0.abs()));
    // constant curvature: ∂∂̄ log G = (2/w) G
    let w = ExamplePreset::load("quartic").unwrap().weight as i64;
    let want = g.mul(&MpComplex::from_q(&q(2, w), BITS));
    assert!(dist_f64(&analytic, &want) < 1e-30 * (1.0 + want.to_f64().0.abs()));
}

#[test]
fn sample_matches_direct_evaluation() {
    let ps = series("legendre", 60);
    let tau = connections::tau_value("2i", BITS).unwrap();
    let s = ps.sample(&tau).unwrap();
    // Legendre z = lambda(tau)/.. is real on the imaginary axis
    assert!(s.z.to_f64().1.abs() < 1e-40);
    assert!(s.z.to_f64().0 > 0.0 && s.z.to_f64().0 < 1.0);
    assert!(s.tail_log10 < -30.0);
}

#[test]
fn lower_half_plane_rejected() {
    let ps = series("cubic", 10);
    let t = MpComplex::from_q_pair(&qi(0), &qi(-1), 128);
    assert!(ps.sample(&t).is_err());
    assert!(connections::tau_value("1-2i", 128).is_err());
}

#[test]
fn constraint_relation() {
    let op = presets::operator("quartic").unwrap();
    let one = connections::verify_ring_constraint(&op, &qi(1)).unwrap();
    assert!(one.is_zero());
    assert!(one.graded.is_zero());
    let two = connections::verify_ring_constraint(&op, &qi(2)).unwrap();
    assert!(!two.is_zero());
    assert!(two.graded.is_zero());
    // the literal residual is sum_k hbar^k c_k
    let sum = two.by_hbar_power[0].add(&two.by_hbar_power[1].scale(&qi(2))).add(&two.by_hbar_power[2].scale(&qi(4)));
    assert_eq!(sum, two.literal);
    assert!(matches!(connections::verify_ring_constraint(&presets::operator("legendre").unwrap(), &qi(1)), Err(Error::Unsupported(_))));
    assert!(connections::verify_ring_constraint(&op, &qi(0)).is_err());
}

#[test]
fn constraint_is_affine_in_b0() {
    let op = presets::operator("quartic").unwrap();
    let a = op.to_dz_form();
    let eps = q(1, 7);
    let mut b = a.clone();
    b[0] = b[0].add(&RatFunc::constant(eps.clone()));
    let shifted = PFOperator::from_dz_form("z", &b).unwrap();
    let r = connections::verify_ring_constraint(&shifted, &qi(1)).unwrap();
    assert_eq!(r.literal, RatFunc::constant(qi(6) * eps));
    let trivial = PFOperator::from_dz_form("z", &[RatFunc::zero(), RatFunc::zero(), RatFunc::zero()]).unwrap();
    assert!(connections::verify_ring_constraint(&trivial, &qi(5)).unwrap().is_zero());
}

#[test]
fn conformal_limit() {
    let h = [qi(1), q(1, 3), qi(7)];
    for r in [qi(1), qi(2), q(1, 5)] {
        let c = connections::conformal_limit_check(3, &r, &h).unwrap();
        assert!(c.higgs_identity && c.metric_identity);
    }
    assert!(connections::conformal_limit_check(3, &qi(-1), &h).is_err());
    assert!(connections::conformal_limit_check(2, &qi(2), &h).is_err());
}

#[test]
fn oper_matrix_shape() {
    let op = presets::operator("cubic").unwrap();
    let z = q(1, 3);
    let m = connections::oper_matrix_exact(&op, &z).unwrap();
    let a = op.to_dz_form();
    assert_eq!(m.len(), 2);
    assert_eq!(m[1][0], qi(1));
    for i in 0..2 {
        assert_eq!(m[i][1], -a[i].eval(&z).unwrap());
    }
    let p = 128;
    let h = MpComplex::from_i64(2, p);
    let c = connections::oper_matrix(&op, &h, &MpComplex::from_q(&z, p)).unwrap();
    assert_eq!(c.rank(), 2);
    // sub-diagonal 1/ℏ
    assert!(dist_f64(&c.one_zero[1][0], &MpComplex::from_q(&q(1, 2), p)) < 1e-30);
}

#[test]
fn tau_parsing() {
    let cases = [("2i", (qi(0), qi(2))), ("1.5i", (qi(0), q(3, 2))), ("3i/2", (qi(0), q(3, 2))), ("1/4+3i/2", (q(1, 4), q(3, 2))), ("0.25 + 1.5i", (q(1, 4), q(3, 2))), ("-i", (qi(0), qi(-1))), ("i", (qi(0), qi(1)))];
    for (s, want) in cases {
        assert_eq!(connections::parse_tau(s).unwrap(), want, "{s}");
    }
    assert!(connections::parse_tau("2j").is_err());
    assert!(connections::parse_tau("").is_err());
}

#[test]
fn presets_with_modular_data() {
    assert_eq!(ExamplePreset::available(), vec!["quartic", "legendre", "cubic"]);
    assert!(ExamplePreset::load("quintic").is_err());
    assert_eq!(ExamplePreset::load("quartic").unwrap().kahler_formula(), "e^(-K) = 2 |A^2|^2 Im(tau)^2");
}

#[test]
fn residual_shrinks_with_order_above_the_rounding_floor() {
    // at order 40 the truncation error is already below 2^-256, so compare small orders
    let tau = connections::tau_value("3i/2", BITS).unwrap();
    let one = MpComplex::one(BITS);
    for name in ["quartic", "legendre", "cubic"] {
        let r: Vec<f64> = [4, 8].iter().map(|&n| connections::verify_gauge(&series(name, n).sample(&tau).unwrap(), &one).unwrap().max_residual()).collect();
        assert!(r[0] / r[1] > 1e4, "{name}: {r:?}");
    }
}
