//! Truncated power series with explicit truncation order.
//!
//! A `PowerSeries` of order `N` knows the coefficients of `z^0 .. z^{N-1}` and
//! nothing beyond; every operation reports the largest order it can guarantee.

use std::fmt::Debug;

use num_traits::{One, Zero};

use super::rational::{BigQ, nth_root, qi};
use crate::error::{Error, Result};

/// Scalar field a series can carry.
pub trait Coeff: Clone + Debug + PartialEq {
    fn czero() -> Self;
    fn cone() -> Self;
    fn from_q(q: &BigQ) -> Self;
    fn from_int(n: i64) -> Self {
        Self::from_q(&qi(n))
    }
    fn cadd(&self, o: &Self) -> Self;
    fn csub(&self, o: &Self) -> Self;
    fn cmul(&self, o: &Self) -> Self;
    fn cneg(&self) -> Self;
    fn cinv(&self) -> Option<Self>;
    fn cis_zero(&self) -> bool;
    /// A k-th root, exact where the field requires it.
    fn croot(&self, k: u32) -> Option<Self>;
    fn cdiv(&self, o: &Self) -> Option<Self> {
        o.cinv().map(|i| self.cmul(&i))
    }
}

impl Coeff for BigQ {
    fn czero() -> Self {
        BigQ::zero()
    }
    fn cone() -> Self {
        BigQ::one()
    }
    fn from_q(q: &BigQ) -> Self {
        q.clone()
    }
    fn cadd(&self, o: &Self) -> Self {
        self + o
    }
    fn csub(&self, o: &Self) -> Self {
        self - o
    }
    fn cmul(&self, o: &Self) -> Self {
        self * o
    }
    fn cneg(&self) -> Self {
        -self
    }
    fn cinv(&self) -> Option<Self> {
        if self.is_zero() { None } else { Some(self.recip()) }
    }
    fn cis_zero(&self) -> bool {
        self.is_zero()
    }
    fn croot(&self, k: u32) -> Option<Self> {
        nth_root(self, k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries<C = BigQ> {
    coeffs: Vec<C>,
}

impl<C: Coeff> PowerSeries<C> {
    /// Coefficients `c[0..order]`; missing entries are zero, extra entries are dropped.
    pub fn new(mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.resize(order, C::czero());
        PowerSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(C::cone(), order)
    }

    pub fn constant(c: C, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// The series z.
    pub fn var(order: usize) -> Self {
        Self::new(vec![C::czero(), C::cone()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &C {
        &self.coeffs[i]
    }

    pub fn set_coeff(&mut self, i: usize, c: C) {
        self.coeffs[i] = c;
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot raise the order of a truncated series");
        Self::new(self.coeffs[..order].to_vec(), order)
    }

    /// Index of the first nonzero known coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.cis_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        Self::new((0..n).map(|i| self.coeffs[i].cadd(&o.coeffs[i])).collect(), n)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        Self::new((0..n).map(|i| self.coeffs[i].csub(&o.coeffs[i])).collect(), n)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.cneg()).collect(), self.order())
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.cmul(c)).collect(), self.order())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut v = vec![C::czero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.cis_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().take(n - i).enumerate() {
                if !b.cis_zero() {
                    v[i + j] = v[i + j].cadd(&a.cmul(b));
                }
            }
        }
        Self::new(v, n)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::one(self.order());
        let mut b = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.order();
        if n == 0 {
            return Err(Error::Precision("inverse of a series with no known coefficients".into()));
        }
        let inv0 = self.coeffs[0].cinv().ok_or(Error::DivisionByZero)?;
        let mut r = vec![C::czero(); n];
        r[0] = inv0.clone();
        for k in 1..n {
            let mut s = C::czero();
            for j in 1..=k {
                let a = &self.coeffs[j];
                if !a.cis_zero() {
                    s = s.cadd(&a.cmul(&r[k - j]));
                }
            }
            r[k] = s.cmul(&inv0).cneg();
        }
        Ok(Self::new(r, n))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inverse()?))
    }

    /// Division by z^k; the first k coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if k > self.order() {
            return Err(Error::Precision(format!("cannot divide by z^{k} a series of order {}", self.order())));
        }
        if self.coeffs[..k].iter().any(|c| !c.cis_zero()) {
            return Err(Error::Invalid(format!("series is not divisible by z^{k}")));
        }
        Ok(Self::new(self.coeffs[k..].to_vec(), self.order() - k))
    }

    /// Multiplication by z^k.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut v = vec![C::czero(); k];
        v.extend(self.coeffs.iter().cloned());
        let n = v.len();
        Self::new(v, n)
    }

    pub fn derivative(&self) -> Self {
        let n = self.order().saturating_sub(1);
        Self::new((0..n).map(|i| self.coeffs[i + 1].cmul(&C::from_int((i + 1) as i64))).collect(), n)
    }

    /// z d/dz
    pub fn theta(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().map(|(i, c)| c.cmul(&C::from_int(i as i64))).collect(), self.order())
    }

    /// f(z^k)
    pub fn substitute_power(&self, k: usize) -> Self {
        assert!(k >= 1);
        let n = self.order() * k;
        let mut v = vec![C::czero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * k] = c.clone();
        }
        Self::new(v, n)
    }

    /// f(c z)
    pub fn scale_var(&self, c: &C) -> Self {
        let mut p = C::cone();
        let mut v = Vec::with_capacity(self.order());
        for a in &self.coeffs {
            v.push(a.cmul(&p));
            p = p.cmul(c);
        }
        let n = self.order();
        Self::new(v, n)
    }

    /// f(g) for g with g(0) = 0.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if g.order() == 0 {
            return Err(Error::Precision("composition with a series with no known coefficients".into()));
        }
        if !g.coeffs[0].cis_zero() {
            return Err(Error::Invalid("inner series of a composition must vanish at 0".into()));
        }
        let v = g.valuation().unwrap_or(g.order());
        let n = g.order().min(self.order().saturating_mul(v.max(1)));
        let g = g.truncate(n);
        let mut acc = Self::zero(n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&g);
            acc.coeffs[0] = acc.coeffs[0].cadd(c);
        }
        Ok(acc)
    }

    /// Compositional inverse of a series with f(0) = 0 and invertible f'(0).
    pub fn reversion(&self) -> Result<Self> {
        let n = self.order();
        if n < 2 {
            return Err(Error::Precision("reversion needs at least the linear coefficient".into()));
        }
        if !self.coeffs[0].cis_zero() {
            return Err(Error::Invalid("reversion requires f(0) = 0".into()));
        }
        let a1inv = self.coeffs[1].cinv().ok_or(Error::DivisionByZero)?;
        // Newton: g <- g - (f(g) - z) / f'(g), doubling the correct prefix.
        let mut g = Self::new(vec![C::czero(), a1inv], 2);
        let fp = self.derivative();
        let mut cur = 2;
        while cur < n {
            cur = (2 * cur).min(n);
            let gg = Self::new(g.coeffs.clone(), cur);
            let f_of_g = self.truncate(cur).compose(&gg)?;
            let resid = f_of_g.sub(&Self::var(cur));
            let dfg = fp.truncate(cur - 1).compose(&gg.truncate(cur - 1))?;
            let dfg = Self::new(dfg.coeffs, cur);
            let corr = resid.div(&dfg)?;
            g = gg.sub(&corr);
        }
        Ok(g)
    }

    /// f^alpha for f(0) = 1.
    pub fn pow_rational(&self, alpha: &BigQ) -> Result<Self> {
        let n = self.order();
        if n == 0 {
            return Ok(self.clone());
        }
        if self.coeffs[0] != C::cone() {
            return Err(Error::Invalid("rational power requires constant term 1".into()));
        }
        let a = C::from_q(alpha);
        let mut y = vec![C::czero(); n];
        y[0] = C::cone();
        let ap1 = a.cadd(&C::cone());
        for k in 1..n {
            let mut s = C::czero();
            for j in 1..=k {
                let fj = &self.coeffs[j];
                if fj.cis_zero() {
                    continue;
                }
                let w = ap1.cmul(&C::from_int(j as i64)).csub(&C::from_int(k as i64));
                s = s.cadd(&w.cmul(fj).cmul(&y[k - j]));
            }
            y[k] = s.cdiv(&C::from_int(k as i64)).unwrap();
        }
        Ok(Self::new(y, n))
    }

    /// A k-th root; the constant term must have a k-th root in the field.
    pub fn nth_root(&self, k: u32) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::Precision("root of a series with no known coefficients".into()));
        }
        let c0 = self.coeffs[0].clone();
        let r0 = c0
            .croot(k)
            .ok_or_else(|| Error::Invalid(format!("constant term {c0:?} has no exact {k}-th root")))?;
        let inv = c0.cinv().ok_or(Error::DivisionByZero)?;
        let unit = self.scale(&inv);
        Ok(unit.pow_rational(&BigQ::new(1.into(), (k as i64).into()))?.scale(&r0))
    }

    pub fn exp(&self) -> Result<Self> {
        let n = self.order();
        if n == 0 {
            return Ok(self.clone());
        }
        if !self.coeffs[0].cis_zero() {
            return Err(Error::Invalid("exp requires f(0) = 0".into()));
        }
        // y' = f' y  =>  k y_k = sum_j j f_j y_{k-j}
        let mut y = vec![C::czero(); n];
        y[0] = C::cone();
        for k in 1..n {
            let mut s = C::czero();
            for j in 1..=k {
                if !self.coeffs[j].cis_zero() {
                    s = s.cadd(&self.coeffs[j].cmul(&C::from_int(j as i64)).cmul(&y[k - j]));
                }
            }
            y[k] = s.cdiv(&C::from_int(k as i64)).unwrap();
        }
        Ok(Self::new(y, n))
    }

    pub fn log(&self) -> Result<Self> {
        let n = self.order();
        if n == 0 {
            return Ok(self.clone());
        }
        if self.coeffs[0] != C::cone() {
            return Err(Error::Invalid("log requires f(0) = 1".into()));
        }
        let q = self.theta().div(self)?;
        let v = q
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { C::czero() } else { c.cdiv(&C::from_int(i as i64)).unwrap() })
            .collect();
        Ok(Self::new(v, n))
    }

    pub fn eval(&self, x: &C) -> C {
        let mut acc = C::czero();
        for c in self.coeffs.iter().rev() {
            acc = acc.cmul(x).cadd(c);
        }
        acc
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> PowerSeries<D> {
        PowerSeries::new(self.coeffs.iter().map(f).collect(), self.order())
    }
}

impl PowerSeries<BigQ> {
    pub fn from_poly(p: &super::poly::Poly, order: usize) -> Self {
        Self::new(p.coeffs().iter().take(order).cloned().collect(), order)
    }
}
