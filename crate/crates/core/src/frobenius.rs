//! Local solution bases at a regular singular point, by differentiating the
//! Frobenius series with respect to the exponent.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_algebra::mp::MpComplex;
use crate::exact_algebra::rational::{BigQ, factorial, qi};
use crate::exact_algebra::{LogSeries, Poly, PowerSeries};
use crate::numeric::{self, Evaluated};
use crate::pf_operator::{PFOperator, Point};

/// The operator multiplied by a common denominator, as `sum_k z^k f_k(theta)`.
struct Recurrence {
    f: Vec<Poly>,
}

impl Recurrence {
    fn new(op: &PFOperator) -> Result<Self> {
        let r = op.rank();
        let mut den = Poly::one();
        for b in &op.coeffs {
            let g = Poly::gcd(&den, b.den());
            den = (&den * b.den()).div_exact(&g)?;
        }
        if den.coeff(0).is_zero() {
            return Err(Error::Irregular { point: "0".into(), index: 0, order: 1 });
        }
        let mut p: Vec<Poly> = op.coeffs.iter().map(|b| (b.num() * &den).div_exact(b.den())).collect::<Result<_>>()?;
        p.push(den);
        let kmax = p.iter().map(|x| x.degree().unwrap_or(0)).max().unwrap_or(0);
        let f = (0..=kmax).map(|k| Poly::new((0..=r).map(|i| p[i].coeff(k)).collect())).collect();
        Ok(Recurrence { f })
    }
}

/// One local solution and where it sits in the basis.
#[derive(Clone, Debug)]
pub struct LocalSolution {
    pub series: LogSeries,
    /// Power of log at the leading coefficient z^mu.
    pub leading_log: usize,
}

#[derive(Clone, Debug)]
pub struct FrobeniusBasis {
    pub point: Point,
    pub order: usize,
    pub solutions: Vec<LocalSolution>,
}

fn eps_poly(p: &Poly, at: &BigQ, prec: usize) -> PowerSeries {
    PowerSeries::from_poly(&p.shift(at), prec)
}

/// Solutions with leading exponent `rho`; `above` counts exponents in the same class mod Z that exceed rho.
fn solutions_for(rec: &Recurrence, rho: &BigQ, mult: usize, above: usize, n: usize) -> Result<Vec<LocalSolution>> {
    let kprec = 2 * above + mult;
    let mut c: Vec<PowerSeries> = Vec::with_capacity(n);
    c.push(PowerSeries::one(kprec).shift_up(above).truncate(kprec));
    let kmax = rec.f.len() - 1;
    for m in 1..n {
        let mut num = PowerSeries::zero(kprec);
        for k in 1..=m.min(kmax) {
            if rec.f[k].is_zero() {
                continue;
            }
            let fk = eps_poly(&rec.f[k], &(rho + qi((m - k) as i64)), kprec);
            num = num.sub(&fk.mul(&c[m - k]));
        }
        let den = eps_poly(&rec.f[0], &(rho + qi(m as i64)), kprec);
        let t = den.valuation().ok_or_else(|| Error::Invalid("indicial polynomial vanishes identically".into()))?;
        let num = num.shift_down(t).map_err(|_| Error::Invalid(format!("Frobenius recursion has no solution at step {m}")))?;
        let den = den.shift_down(t)?;
        let cm = num.div(&den)?;
        c.push(cm);
    }
    if c.iter().any(|cn| cn.order() < above + mult) {
        return Err(Error::Precision("exponent-derivative series truncated too early".into()));
    }
    let mut out = Vec::with_capacity(mult);
    for j in above..above + mult {
        let norm = BigQ::from_integer(factorial((j - above) as u64));
        let terms = (0..=j)
            .map(|k| {
                let w = &norm / BigQ::from_integer(factorial(k as u64));
                let v: Vec<BigQ> = c.iter().map(|cn| cn.coeffs().get(j - k).cloned().unwrap_or_else(BigQ::zero) * &w).collect();
                PowerSeries::new(v, n)
            })
            .collect();
        out.push(LocalSolution { series: LogSeries::new(rho.clone(), terms), leading_log: j - above });
    }
    Ok(out)
}

fn exponent_groups(exponents: &[BigQ]) -> Vec<(BigQ, usize, usize)> {
    let mut distinct: Vec<(BigQ, usize)> = Vec::new();
    for e in exponents {
        match distinct.iter_mut().find(|(x, _)| x == e) {
            Some(d) => d.1 += 1,
            None => distinct.push((e.clone(), 1)),
        }
    }
    distinct.sort();
    distinct
        .iter()
        .map(|(rho, m)| {
            let above = distinct
                .iter()
                .filter(|(x, _)| x > rho && (x - rho).is_integer())
                .map(|(_, k)| *k)
                .sum();
            (rho.clone(), *m, above)
        })
        .collect()
}

/// Basis of solutions at 0 of an operator already localized there.
pub fn local_basis(op: &PFOperator, exponents: &[BigQ], order: usize) -> Result<Vec<LocalSolution>> {
    let rec = Recurrence::new(op)?;
    let mut out = Vec::new();
    for (rho, m, above) in exponent_groups(exponents) {
        out.extend(solutions_for(&rec, &rho, m, above, order.max(1))?);
    }
    Ok(out)
}

/// Frobenius basis at a point, to the given truncation order.
pub fn frobenius_basis(op: &PFOperator, point: &Point, order: usize) -> Result<FrobeniusBasis> {
    let loc = op.localize(point)?;
    let ex = loc.local_exponents(point)?;
    Ok(FrobeniusBasis { point: point.clone(), order, solutions: local_basis(&loc, &ex, order)? })
}

/// Highest log power among local solutions at 0 of a localized operator.
pub fn max_log_degree(loc: &PFOperator, exponents: &[BigQ]) -> Result<usize> {
    let spread = match (exponents.first(), exponents.last()) {
        (Some(a), Some(b)) => (b - a).floor().to_integer().try_into().unwrap_or(0usize),
        _ => 0,
    };
    let basis = local_basis(loc, exponents, spread + 3)?;
    Ok(basis.iter().map(|s| s.series.log_degree()).max().unwrap_or(0))
}

/// `L y` for a log series centred at 0, truncated at the order of `y`.
pub fn apply_operator(op: &PFOperator, y: &LogSeries) -> Result<LogSeries> {
    let n = y.order();
    let theta = |s: &LogSeries| -> LogSeries {
        let kmax = s.terms.len();
        let terms = (0..kmax)
            .map(|k| {
                let g = &s.terms[k];
                let mut t = g.theta().add(&g.scale(&s.mu));
                if k + 1 < kmax {
                    t = t.add(&s.terms[k + 1].scale(&qi((k + 1) as i64)));
                }
                t
            })
            .collect();
        LogSeries { mu: s.mu.clone(), terms }
    };
    let r = op.rank();
    let mut powers = vec![y.clone()];
    for _ in 0..r {
        let next = theta(powers.last().unwrap());
        powers.push(next);
    }
    let mut acc = powers[r].clone();
    for (i, b) in op.coeffs.iter().enumerate() {
        let bs = b.taylor(n)?;
        for (k, t) in powers[i].terms.iter().enumerate() {
            acc.terms[k] = acc.terms[k].add(&t.mul(&bs));
        }
    }
    Ok(LogSeries::new(acc.mu.clone(), acc.terms))
}

/// Coefficients of `pFq(a; b; z)` through z^{order-1}.
pub fn hypergeometric_series(upper: &[BigQ], lower: &[BigQ], order: usize) -> Result<PowerSeries> {
    for b in lower {
        if *b <= BigQ::zero() && b.is_integer() {
            return Err(Error::Invalid(format!("lower parameter {b} is a non-positive integer")));
        }
    }
    let mut c = vec![BigQ::zero(); order];
    if order > 0 {
        c[0] = BigQ::one();
    }
    for n in 1..order {
        let k = qi((n - 1) as i64);
        let mut t = c[n - 1].clone();
        for a in upper {
            t *= a + &k;
        }
        for b in lower {
            t /= b + &k;
        }
        t /= qi(n as i64);
        c[n] = t;
    }
    Ok(PowerSeries::new(c, order))
}

/// Value of a log series at a complex point, with log z on the chosen branch.
pub fn eval_log_series(y: &LogSeries, z: &MpComplex, branch: i64) -> Result<Evaluated> {
    let p = z.prec();
    let two_pi_i = MpComplex::new(astro_float::BigFloat::from_u64(0, p), crate::exact_algebra::mp::bf_pi(p).mul(&astro_float::BigFloat::from_u64(2, 64), p, crate::exact_algebra::mp::RM));
    let lz = z.ln().ok_or_else(|| Error::Numeric("log of zero".into()))?.add(&two_pi_i.mul(&MpComplex::from_i64(branch, p)));
    let zmu = lz.mul(&MpComplex::from_q(&y.mu, p)).exp();
    let mut value = MpComplex::zero(p);
    let mut tail = f64::NEG_INFINITY;
    let mut lpow = MpComplex::one(p);
    for g in &y.terms {
        let e = numeric::eval_series(g, z);
        value = value.add(&e.value.mul(&lpow));
        tail = tail.max(e.tail_log10 + lpow.log10_abs());
        lpow = lpow.mul(&lz);
    }
    Ok(Evaluated { value: value.mul(&zmu), tail_log10: tail + zmu.log10_abs() })
}
