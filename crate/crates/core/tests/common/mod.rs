// Random Fuchsian operators, synthetic exponent tables and oracles shared by several test files.
#![allow(dead_code)]

use pfhodge::exact_algebra::rational::{BigQ, floor, fmt_q, q, qi};
use pfhodge::frobenius::{apply_operator, frobenius_basis};
use pfhodge::hodge_bundle::{ExponentTable, PointData};
use pfhodge::pf_operator::{PFOperator, Point, PointClass};
use proptest::test_runner::TestCaseError;
use proptest::prelude::*;

pub fn factor(c: &BigQ) -> String {
    if *c < BigQ::from_integer(0.into()) { format!("(theta-{})", fmt_q(&-c.clone())) } else { format!("(theta+{})", fmt_q(c)) }
}

/// `prod (theta - alpha_i) - (z/s) prod (theta + beta_i)`: exponents alpha at 0, beta at infinity,
/// singular at s.
pub fn riemann_operator(alpha: &[BigQ], beta: &[BigQ], s: &BigQ) -> PFOperator {
    let lhs: Vec<String> = alpha.iter().map(|a| factor(&-a.clone())).collect();
    let rhs: Vec<String> = beta.iter().map(factor).collect();
    let src = format!("{} - {}*z*{}", lhs.join("*"), fmt_q(&s.recip()), rhs.join("*"));
    PFOperator::parse(&src, "z").unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub fn exponent() -> impl Strategy<Value = BigQ> {
    (-6i64..=6, prop::sample::select(vec![1i64, 2, 3, 4, 6])).prop_map(|(n, d)| q(n, d))
}

pub fn location() -> impl Strategy<Value = BigQ> {
    (prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3, 5]), prop::sample::select(vec![1i64, 2, 3])).prop_map(|(n, d)| q(n, d))
}

/// (rank, alpha, beta, singular location).
pub fn riemann_data() -> impl Strategy<Value = (Vec<BigQ>, Vec<BigQ>, BigQ)> {
    (2usize..=3).prop_flat_map(|r| (prop::collection::vec(exponent(), r), prop::collection::vec(exponent(), r), location()))
}

/// Independent telescoping check: deg(k+1) - deg(k) = deg Div(phi^k) - (|D| + 2g - 2).
pub fn telescoping_holds(t: &ExponentTable) -> bool {
    use num_traits::ToPrimitive;
    let hat_a = |c: &PointClass| matches!(c, PointClass::Apparent | PointClass::RegularCyclicShift(_));
    let in_d = |c: &PointClass| matches!(c, PointClass::Apparent | PointClass::Mum | PointClass::RegularSingular);
    let d = t.points.iter().filter(|p| in_d(&p.class)).count() as i64;
    let n_hat_a = t.points.iter().filter(|p| hat_a(&p.class)).count() as i64;
    let fl = |p: &PointData, k: usize| floor(&p.exponents[k]).to_i64().unwrap();
    for k in 0..t.rank - 1 {
        let div: i64 = t.points.iter().map(|p| fl(p, k + 1) - fl(p, k)).sum::<i64>() - n_hat_a;
        let lhs = t.deg_graded(k + 1).unwrap() - t.deg_graded(k).unwrap();
        if lhs != div - (d + 2 * t.genus as i64 - 2) || div != t.deg_higgs_divisor(k).unwrap() {
            return false;
        }
    }
    true
}

fn point_data() -> impl Strategy<Value = (u8, Vec<(i64, i64)>)> {
    (0u8..4, prop::collection::vec((-8i64..8, prop::sample::select(vec![1i64, 2, 3, 5])), 4))
}

pub fn synthetic() -> impl Strategy<Value = ExponentTable> {
    (2usize..=4, 0u32..3, prop::collection::vec(point_data(), 1..6)).prop_map(|(r, g, pts)| {
        let points = pts
            .into_iter()
            .enumerate()
            .map(|(i, (c, raw))| {
                let mut ex: Vec<BigQ> = raw.iter().take(r).map(|&(n, d)| q(n, d)).collect();
                let class = match c {
                    0 => PointClass::RegularSingular,
                    1 => PointClass::Mum,
                    2 => {
                        ex = (0..r as i64).map(|j| qi(2 * j + 1)).collect();
                        PointClass::Apparent
                    }
                    _ => {
                        ex = (0..r as i64).map(|j| qi(3 + j)).collect();
                        PointClass::RegularCyclicShift(3)
                    }
                };
                ex.sort();
                PointData { point: Point::Finite(qi(i as i64)), class, exponents: ex }
            })
            .collect();
        ExponentTable { rank: r, genus: g, points }
    })
}

/// Frobenius basis at p: zero residual, exponents as in the table, independent leading data.
pub fn check_basis(op: &PFOperator, p: &Point, n: usize) -> Result<(), TestCaseError> {
    let b = frobenius_basis(op, p, n).unwrap();
    let loc = op.localize(p).unwrap();
    prop_assert_eq!(b.solutions.len(), op.rank());
    let mut leading: Vec<(BigQ, usize)> = Vec::new();
    for s in &b.solutions {
        let resid = apply_operator(&loc, &s.series).unwrap();
        prop_assert!(resid.is_zero(), "residual at {}", p);
        prop_assert_eq!(resid.order(), n);
        let g = &s.series.terms[s.leading_log];
        let v = g.valuation().unwrap();
        leading.push((s.series.mu.clone() + qi(v as i64), s.leading_log));
    }
    let mut got: Vec<BigQ> = b.solutions.iter().map(|s| s.series.mu.clone()).collect();
    got.sort();
    prop_assert_eq!(got, op.exponents_at(p).unwrap().exponents);
    let k = leading.len();
    leading.sort();
    leading.dedup();
    prop_assert_eq!(leading.len(), k, "leading data not independent");
    Ok(())
}

