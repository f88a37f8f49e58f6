//! Mirror map at a MUM point, its inverse, the Yukawa coupling of the operator
//! and comparison of both with modular expressions.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_algebra::rational::{BigQ, fmt_q, qi};
use crate::exact_algebra::{Poly, PowerSeries, QExpansion, RatFunc};
use crate::frobenius;
use crate::pf_operator::{PFOperator, Point};

#[derive(Clone, Debug)]
pub struct MirrorMapData {
    /// Holomorphic period, constant term 1.
    pub pi0: PowerSeries,
    /// Holomorphic part of the single-log solution, `h(0) = 0`.
    pub h: PowerSeries,
    /// `h / pi0`, so that `2 pi i tau = log z + h/pi0`.
    pub tau_series: PowerSeries,
    /// Inverse mirror map z(q).
    pub z_of_q: PowerSeries,
    pub order: usize,
}

/// Frobenius data at 0 and the inverse mirror map, through O(z^order).
pub fn mirror_map(op: &PFOperator, order: usize) -> Result<MirrorMapData> {
    let r = op.rank();
    let rep = op.exponents_at(&Point::zero())?;
    if !rep.exponents.iter().all(|e| e.is_zero()) || rep.log_degree + 1 != r {
        return Err(Error::NotMum(format!(
            "exponents at 0 are [{}] with log degree {}",
            rep.exponents.iter().map(fmt_q).collect::<Vec<_>>().join(", "),
            rep.log_degree
        )));
    }
    let basis = frobenius::frobenius_basis(op, &Point::zero(), order)?;
    let by_log = |k: usize| basis.solutions.iter().find(|s| s.leading_log == k);
    let pi0 = by_log(0).ok_or_else(|| Error::Mismatch("no holomorphic solution".into()))?.series.terms[0].clone();
    let h = match by_log(1) {
        Some(s) => s.series.terms[0].clone(),
        None => PowerSeries::zero(order),
    };
    let tau_series = h.div(&pi0)?;
    // Q = z exp(h/pi0), then invert
    let big_q = PowerSeries::var(order).mul(&tau_series.exp()?);
    let z_of_q = big_q.reversion()?;
    Ok(MirrorMapData { pi0, h, tau_series, z_of_q, order })
}

/// The substitution `Q = scale * q^exponent` identifying the mirror coordinate with a modular one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    #[serde(serialize_with = "ser_q")]
    pub scale: BigQ,
    #[serde(serialize_with = "ser_q")]
    pub exponent: BigQ,
    /// The comparison was made on `1 - z` against `1 - candidate`.
    pub complemented: bool,
}

impl Calibration {
    pub fn identity() -> Self {
        Calibration { scale: BigQ::one(), exponent: BigQ::one(), complemented: false }
    }
}

fn ser_q<S: serde::Serializer>(x: &BigQ, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResult {
    pub calibration: Calibration,
    pub order: usize,
    /// Nonzero residual terms below the requested order.
    pub residual: Vec<(String, String)>,
    pub verified_through: String,
    pub holds: bool,
}

/// `f(scale * q^exponent)` as a q-expansion.
pub fn substitute_calibrated(f: &PowerSeries, cal: &Calibration) -> Result<QExpansion> {
    QExpansion::from_series(f.scale_var(&cal.scale)).scale_argument(&cal.exponent)
}

fn residual_result(cal: Calibration, resid: &QExpansion, order: usize) -> IdentityResult {
    let need = qi(order as i64);
    let trunc = resid.truncate_to(&need);
    let residual: Vec<(String, String)> = trunc.terms().into_iter().map(|(e, c)| (fmt_q(&e), fmt_q(&c))).collect();
    let p = resid.precision();
    IdentityResult {
        calibration: cal,
        order,
        holds: residual.is_empty() && p >= need,
        verified_through: fmt_q(if p < need { &p } else { &need }),
        residual,
    }
}

/// z-order needed so that z(s q^e) is known through O(q^order).
fn z_order_for(order: usize, exponent: &BigQ) -> usize {
    let n = (qi(order as i64) / exponent).ceil().to_integer();
    let n: usize = n.try_into().unwrap_or(usize::MAX);
    n + 1
}

/// Finds the calibration from leading terms and compares `z(s q^e)` with the candidate.
pub fn verify_modular_identity(op: &PFOperator, candidate: &QExpansion, order: usize) -> Result<IdentityResult> {
    let (target, complemented) = match candidate.leading_exponent() {
        Some(e) if e > BigQ::zero() => (candidate.clone(), false),
        Some(e) if e.is_zero() && candidate.leading_coeff().is_some_and(|c| c.is_one()) => {
            let one = QExpansion::constant(BigQ::one(), order + 1);
            (one.sub(candidate), true)
        }
        _ => return Err(Error::Mismatch("candidate must vanish at q = 0, or equal 1 there".into())),
    };
    let exponent = target.leading_exponent().ok_or_else(|| Error::Mismatch("candidate minus 1 vanishes identically".into()))?;
    let scale = target.leading_coeff().unwrap().clone();
    let cal = Calibration { scale, exponent, complemented };
    let data = mirror_map(op, z_order_for(order, &cal.exponent))?;
    verify_map_calibrated(&data, &target, cal, order)
}

fn verify_map_calibrated(data: &MirrorMapData, target: &QExpansion, cal: Calibration, order: usize) -> Result<IdentityResult> {
    let zq = substitute_calibrated(&data.z_of_q, &cal)?;
    Ok(residual_result(cal, &zq.sub(target), order))
}

/// Compares `pi0(z(s q^e))` with the candidate under a given calibration.
pub fn verify_period_identity(op: &PFOperator, cal: &Calibration, candidate: &QExpansion, order: usize) -> Result<IdentityResult> {
    let data = mirror_map(op, z_order_for(order, &cal.exponent))?;
    let p = data.pi0.compose(&data.z_of_q)?;
    let pq = substitute_calibrated(&p, cal)?;
    Ok(residual_result(cal.clone(), &pq.sub(candidate), order))
}

/// `c = kappa * z^{e_0} * prod (1 - z/a_i)^{e_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct YukawaCoupling {
    pub kappa: BigQ,
    pub zero_exponent: BigQ,
    /// (a_i, e_i) for the nonzero poles of the logarithmic derivative.
    pub factors: Vec<(BigQ, BigQ)>,
}

impl YukawaCoupling {
    /// `d/dz log c` as a rational function.
    pub fn log_derivative(&self) -> RatFunc {
        let mut acc = RatFunc::zero();
        if !self.zero_exponent.is_zero() {
            acc = acc.add(&RatFunc::var().inv().unwrap().scale(&self.zero_exponent));
        }
        for (a, e) in &self.factors {
            let lin = RatFunc::from_poly(Poly::linear_root(a));
            acc = acc.add(&lin.inv().unwrap().scale(e));
        }
        acc
    }

    /// c itself when all exponents are integers.
    pub fn to_ratfunc(&self) -> Result<RatFunc> {
        let to_i = |e: &BigQ| -> Result<i64> {
            if !e.is_integer() {
                return Err(Error::Invalid(format!("exponent {} is not an integer", fmt_q(e))));
            }
            e.to_integer().try_into().map_err(|_| Error::Invalid("exponent too large".into()))
        };
        let mut c = RatFunc::constant(self.kappa.clone()).mul(&RatFunc::var().pow(to_i(&self.zero_exponent)?)?);
        for (a, e) in &self.factors {
            // 1 - z/a
            let f = RatFunc::from_poly(Poly::new(vec![BigQ::one(), -a.recip()]));
            c = c.mul(&f.pow(to_i(e)?)?);
        }
        Ok(c)
    }

    pub fn display_in(&self, var: &str) -> String {
        let mut parts = Vec::new();
        if !self.kappa.is_one() {
            parts.push(fmt_q(&self.kappa));
        }
        if !self.zero_exponent.is_zero() {
            parts.push(format!("{var}^({})", fmt_q(&self.zero_exponent)));
        }
        for (a, e) in &self.factors {
            let base = if a.is_one() { format!("(1 - {var})") } else { format!("(1 - {var}/{})", fmt_q(a)) };
            parts.push(format!("{base}^({})", fmt_q(e)));
        }
        if parts.is_empty() { "1".into() } else { parts.join(" * ") }
    }
}

/// Solves `d/dz log c = -(2/3) b_2` (rank 3) or `-b_1` (rank 2), with `b_i` the d/dz-form coefficients.
pub fn solve_yukawa(op: &PFOperator) -> Result<YukawaCoupling> {
    let a = op.to_dz_form();
    let f = match op.rank() {
        3 => a[2].scale(&BigQ::new((-2).into(), 3.into())),
        2 => a[1].neg(),
        r => return Err(Error::Unsupported(format!("Yukawa coupling for rank {r}"))),
    };
    let (poles, rest) = f.rational_poles()?;
    if rest.degree().unwrap_or(0) > 0 {
        return Err(Error::IrrationalSingularity { factor: rest.display_in(&op.var) });
    }
    if let Some((a, m)) = poles.iter().find(|(_, m)| *m > 1) {
        return Err(Error::Invalid(format!("pole of order {m} at {} in the logarithmic derivative", fmt_q(a))));
    }
    if f.num().degree().unwrap_or(0) >= f.den().degree().unwrap_or(0) && !f.is_zero() {
        return Err(Error::Invalid("logarithmic derivative has a polynomial part".into()));
    }
    let dden = f.den().derivative();
    let mut out = YukawaCoupling { kappa: BigQ::one(), zero_exponent: BigQ::zero(), factors: Vec::new() };
    for (a, _) in poles {
        let res = f.num().eval(&a) / dden.eval(&a);
        if a.is_zero() {
            out.zero_exponent = res;
        } else {
            out.factors.push((a, res));
        }
    }
    Ok(out)
}
