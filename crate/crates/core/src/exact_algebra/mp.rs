//! Arbitrary-precision complex numbers over `astro_float::BigFloat`.

use std::cell::{Cell, RefCell};
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::{BigInt, Sign};


use super::rational::BigQ;
use super::series::Coeff;

pub const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
    static DEFAULT_BITS: Cell<usize> = const { Cell::new(256) };
}

pub fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Precision used for constants created without an explicit precision.
pub fn default_bits() -> usize {
    DEFAULT_BITS.with(|b| b.get())
}

/// Runs `f` with a different default precision, restoring the old one afterwards.
pub fn with_default_bits<R>(bits: usize, f: impl FnOnce() -> R) -> R {
    let old = DEFAULT_BITS.with(|b| b.replace(bits));
    let r = f();
    DEFAULT_BITS.with(|b| b.set(old));
    r
}

fn prec(x: &BigFloat) -> usize {
    x.precision().filter(|&p| p > 0).unwrap_or(64)
}

pub fn bf_int(n: &BigInt, p: usize) -> BigFloat {
    let mag = n.magnitude();
    let digits = mag.to_u32_digits();
    let bits = (digits.len() * 32).max(64) + 64;
    let shift = BigFloat::from_u64(1u64 << 32, 64);
    let mut acc = BigFloat::from_u64(0, bits);
    for d in digits.iter().rev() {
        acc = acc.mul(&shift, bits, RM).add(&BigFloat::from_u64(*d as u64, 64), bits, RM);
    }
    let mut acc = if n.sign() == Sign::Minus { acc.neg() } else { acc };
    if bits > p {
        acc.set_precision(p.max(64), RM).expect("precision");
    }
    acc
}

pub fn bf_q(x: &BigQ, p: usize) -> BigFloat {
    let n = bf_int(x.numer(), p + 64);
    let d = bf_int(x.denom(), p + 64);
    n.div(&d, p, RM)
}

pub fn bf_pi(p: usize) -> BigFloat {
    with_consts(|cc| cc.pi(p, RM))
}

pub fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let s = with_consts(|cc| x.format(Radix::Dec, RM, cc)).unwrap_or_default();
    s.parse::<f64>().unwrap_or(f64::NAN)
}

pub fn bf_atan2(y: &BigFloat, x: &BigFloat, p: usize) -> BigFloat {
    let pi = bf_pi(p);
    if x.is_zero() {
        if y.is_zero() {
            return BigFloat::from_u64(0, p);
        }
        let h = pi.div(&BigFloat::from_u64(2, 64), p, RM);
        return if y.is_negative() { h.neg() } else { h };
    }
    let a = with_consts(|cc| y.div(x, p + 32, RM).atan(p + 32, RM, cc));
    let r = if x.is_positive() {
        a
    } else if y.is_negative() {
        a.sub(&pi, p + 32, RM)
    } else {
        a.add(&pi, p + 32, RM)
    };
    let mut r = r;
    r.set_precision(p, RM).expect("precision");
    r
}

/// log10 of |x|, approximate.
pub fn bf_log10_abs(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let e = x.exponent().unwrap_or(0) as f64;
    let m = bf_to_f64(&x.abs().div(&pow2(x.exponent().unwrap_or(0)), 64, RM));
    (m.log2() + e) * std::f64::consts::LOG10_2
}

fn pow2(e: i32) -> BigFloat {
    let two = BigFloat::from_u64(2, 64);
    if e >= 0 { two.powi(e as usize, 64, RM) } else { BigFloat::from_u64(1, 64).div(&two.powi((-e) as usize, 64, RM), 64, RM) }
}

#[derive(Clone, Debug)]
pub struct MpComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl PartialEq for MpComplex {
    fn eq(&self, o: &Self) -> bool {
        self.re.cmp(&o.re) == Some(0) && self.im.cmp(&o.im) == Some(0)
    }
}

impl MpComplex {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        MpComplex { re, im }
    }

    pub fn zero(p: usize) -> Self {
        Self::new(BigFloat::from_u64(0, p), BigFloat::from_u64(0, p))
    }

    pub fn one(p: usize) -> Self {
        Self::from_i64(1, p)
    }

    pub fn i(p: usize) -> Self {
        Self::new(BigFloat::from_u64(0, p), BigFloat::from_u64(1, p))
    }

    pub fn from_i64(n: i64, p: usize) -> Self {
        Self::new(BigFloat::from_i64(n, p), BigFloat::from_u64(0, p))
    }

    pub fn from_f64(re: f64, im: f64, p: usize) -> Self {
        Self::new(BigFloat::from_f64(re, p), BigFloat::from_f64(im, p))
    }

    pub fn from_q(x: &BigQ, p: usize) -> Self {
        Self::new(bf_q(x, p), BigFloat::from_u64(0, p))
    }

    pub fn from_q_pair(re: &BigQ, im: &BigQ, p: usize) -> Self {
        Self::new(bf_q(re, p), bf_q(im, p))
    }

    pub fn from_real(re: BigFloat) -> Self {
        let p = prec(&re);
        Self::new(re, BigFloat::from_u64(0, p))
    }

    pub fn prec(&self) -> usize {
        prec(&self.re).max(prec(&self.im))
    }

    fn p2(&self, o: &Self) -> usize {
        self.prec().max(o.prec())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.p2(o);
        Self::new(self.re.add(&o.re, p, RM), self.im.add(&o.im, p, RM))
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.p2(o);
        Self::new(self.re.sub(&o.re, p, RM), self.im.sub(&o.im, p, RM))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.p2(o);
        let q = p + 32;
        let re = self.re.mul(&o.re, q, RM).sub(&self.im.mul(&o.im, q, RM), p, RM);
        let im = self.re.mul(&o.im, q, RM).add(&self.im.mul(&o.re, q, RM), p, RM);
        Self::new(re, im)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg())
    }

    pub fn scale(&self, r: &BigFloat) -> Self {
        let p = self.prec().max(prec(r));
        Self::new(self.re.mul(r, p, RM), self.im.mul(r, p, RM))
    }

    pub fn mul_i(&self) -> Self {
        Self::new(self.im.neg(), self.re.clone())
    }

    pub fn abs2(&self) -> BigFloat {
        let p = self.prec() + 32;
        self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM)
    }

    pub fn abs(&self) -> BigFloat {
        let p = self.prec();
        with_consts(|cc| {
            let _ = cc;
            self.abs2().sqrt(p, RM)
        })
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let p = self.prec();
        let d = self.abs2();
        Some(Self::new(self.re.div(&d, p, RM), self.im.neg().div(&d, p, RM)))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        let p = self.p2(o);
        let d = o.abs2();
        if d.is_zero() {
            return None;
        }
        let q = p + 32;
        let re = self.re.mul(&o.re, q, RM).add(&self.im.mul(&o.im, q, RM), q, RM).div(&d, p, RM);
        let im = self.im.mul(&o.re, q, RM).sub(&self.re.mul(&o.im, q, RM), q, RM).div(&d, p, RM);
        Some(Self::new(re, im))
    }

    pub fn powi(&self, n: i64) -> Option<Self> {
        let b = if n < 0 { self.inv()? } else { self.clone() };
        let mut r = Self::one(self.prec());
        let mut base = b;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Some(r)
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let q = p + 32;
        with_consts(|cc| {
            let m = self.re.exp(q, RM, cc);
            let c = self.im.cos(q, RM, cc);
            let s = self.im.sin(q, RM, cc);
            Self::new(m.mul(&c, p, RM), m.mul(&s, p, RM))
        })
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let p = self.prec();
        let r = with_consts(|cc| self.abs2().ln(p + 32, RM, cc)).div(&BigFloat::from_u64(2, 64), p, RM);
        Some(Self::new(r, bf_atan2(&self.im, &self.re, p)))
    }

    /// Principal k-th root.
    pub fn root(&self, k: u32) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let l = self.ln()?;
        let kk = BigFloat::from_u64(k as u64, 64);
        let p = self.prec();
        Some(Self::new(l.re.div(&kk, p, RM), l.im.div(&kk, p, RM)).exp())
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (bf_to_f64(&self.re), bf_to_f64(&self.im))
    }

    /// log10 |self|
    pub fn log10_abs(&self) -> f64 {
        bf_log10_abs(&self.abs())
    }

    pub fn is_finite(&self) -> bool {
        !(self.re.is_nan() || self.im.is_nan() || self.re.is_inf() || self.im.is_inf())
    }
}

impl fmt::Display for MpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.to_f64();
        if b >= 0.0 { write!(f, "{a:e}+{b:e}i") } else { write!(f, "{a:e}{b:e}i") }
    }
}

impl Coeff for MpComplex {
    fn czero() -> Self {
        Self::zero(default_bits())
    }
    fn cone() -> Self {
        Self::one(default_bits())
    }
    fn from_q(q: &BigQ) -> Self {
        Self::from_q(q, default_bits())
    }
    fn from_int(n: i64) -> Self {
        Self::from_i64(n, default_bits())
    }
    fn cadd(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn csub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn cmul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn cneg(&self) -> Self {
        self.neg()
    }
    fn cinv(&self) -> Option<Self> {
        self.inv()
    }
    fn cis_zero(&self) -> bool {
        self.is_zero()
    }
    fn croot(&self, k: u32) -> Option<Self> {
        self.root(k)
    }
    fn cdiv(&self, o: &Self) -> Option<Self> {
        self.div(o)
    }
}

/// Rational approximation check helper: |a - b| as a float.
pub fn dist_f64(a: &MpComplex, b: &MpComplex) -> f64 {
    let d = a.sub(b);
    let (x, y) = d.to_f64();
    x.hypot(y)
}
