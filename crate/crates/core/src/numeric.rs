//! Evaluation of exact series at arbitrary-precision complex points.

use crate::exact_algebra::mp::MpComplex;
use crate::exact_algebra::rational::BigQ;
use crate::exact_algebra::{PowerSeries, QExpansion};

/// A value together with an estimate of log10 of the neglected tail.
#[derive(Clone, Debug)]
pub struct Evaluated {
    pub value: MpComplex,
    pub tail_log10: f64,
}

/// Horner evaluation of a truncated series at x.
///
/// The tail estimate extrapolates the size of the last known terms
/// geometrically; it is an estimate, not a rigorous bound.
pub fn eval_series(s: &PowerSeries<BigQ>, x: &MpComplex) -> Evaluated {
    let p = x.prec();
    let mut acc = MpComplex::zero(p);
    for c in s.coeffs().iter().rev() {
        acc = acc.mul(x);
        if !c.numer().sign().eq(&num_bigint::Sign::NoSign) {
            acc = acc.add(&MpComplex::from_q(c, p));
        }
    }
    Evaluated { value: acc, tail_log10: tail_estimate(s, x) }
}

fn log10_q(c: &BigQ) -> f64 {
    let n = c.numer().bits() as f64;
    let d = c.denom().bits() as f64;
    // coarse magnitude from bit lengths, refined with the leading digits
    let lead = |b: &num_bigint::BigInt| -> f64 {
        let bits = b.bits();
        let shift = bits.saturating_sub(60);
        let top: num_bigint::BigInt = b >> shift;
        let t: f64 = top.to_string().parse::<f64>().unwrap_or(1.0).abs();
        t.log10() + shift as f64 * std::f64::consts::LOG10_2
    };
    let _ = (n, d);
    lead(c.numer()) - lead(c.denom())
}

pub fn tail_estimate(s: &PowerSeries<BigQ>, x: &MpComplex) -> f64 {
    let n = s.order();
    if n == 0 {
        return f64::INFINITY;
    }
    let lx = x.log10_abs();
    if !lx.is_finite() {
        return f64::NEG_INFINITY;
    }
    let win = (n / 4).max(1);
    let mag = |range: std::ops::Range<usize>| -> Option<f64> {
        range
            .filter_map(|i| {
                let c = s.coeff(i);
                if c.numer().bits() == 0 { None } else { Some(log10_q(c)) }
            })
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
    };
    let last = mag(n - win..n);
    let prev = if n >= 2 * win { mag(n - 2 * win..n - win) } else { None };
    let Some(last) = last.or(prev) else {
        // no nonzero terms seen near the end: assume the next term is no larger than the last known size
        return lx * n as f64;
    };
    let growth = match prev {
        Some(p) => ((last - p) / win as f64).max(0.0),
        None => 0.0,
    };
    let ratio = lx + growth;
    if ratio >= 0.0 {
        return f64::INFINITY;
    }
    let r = 10f64.powf(ratio);
    last + growth * win as f64 + lx * n as f64 - (1.0 - r).log10()
}

/// Value of a q-expansion at q = exp(2 pi i tau), with tail estimate.
pub fn eval_qexp(f: &QExpansion, tau: &MpComplex) -> Evaluated {
    let p = tau.prec();
    let m = f.ramification() as i64;
    let two_pi_i = MpComplex::new(astro_float::BigFloat::from_u64(0, p), crate::exact_algebra::mp::bf_pi(p).mul(&astro_float::BigFloat::from_u64(2, 64), p, crate::exact_algebra::mp::RM));
    let t = two_pi_i.mul(tau).div(&MpComplex::from_i64(m, p)).unwrap().exp();
    let inner = eval_series(f.series(), &t);
    let lead = t.powi(f.val_num()).unwrap_or_else(|| MpComplex::zero(p));
    let ll = lead.log10_abs();
    Evaluated { value: inner.value.mul(&lead), tail_log10: inner.tail_log10 + ll }
}

pub fn two_pi_i(p: usize) -> MpComplex {
    MpComplex::new(astro_float::BigFloat::from_u64(0, p), crate::exact_algebra::mp::bf_pi(p).mul(&astro_float::BigFloat::from_u64(2, 64), p, crate::exact_algebra::mp::RM))
}
