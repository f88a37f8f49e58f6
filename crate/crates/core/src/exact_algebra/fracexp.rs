//! Series in a fractional power of the variable, `q^{val/m} * (c_0 + c_1 q^{1/m} + ...)`.

use num_integer::Integer;
use num_traits::Zero;

use super::rational::{BigQ, q as rq};
use super::series::{Coeff, PowerSeries};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct FracExpSeries<C = BigQ> {
    ram: u32,
    val: i64,
    series: PowerSeries<C>,
}

/// Rational-coefficient q-expansion.
pub type QExpansion = FracExpSeries<BigQ>;

impl<C: Coeff> FracExpSeries<C> {
    /// `q^{val/ram} * series(q^{1/ram})`.
    pub fn new(ram: u32, val: i64, series: PowerSeries<C>) -> Self {
        assert!(ram >= 1);
        let mut s = FracExpSeries { ram, val, series };
        s.normalize();
        s
    }

    pub fn from_series(series: PowerSeries<C>) -> Self {
        Self::new(1, 0, series)
    }

    /// Zero known up to (but not including) q^{prec_num/ram}.
    pub fn zero_to(ram: u32, prec_num: i64) -> Self {
        FracExpSeries { ram, val: prec_num, series: PowerSeries::zero(0) }
    }

    pub fn constant(c: C, order: usize) -> Self {
        Self::new(1, 0, PowerSeries::constant(c, order))
    }

    fn normalize(&mut self) {
        let k = self.series.valuation().unwrap_or(self.series.order());
        if k > 0 {
            self.series = self.series.shift_down(k).unwrap();
            self.val += k as i64;
        }
        if self.ram > 1 && !self.series.is_zero() {
            self.reduce_ramification();
        }
    }

    /// Rewrites in the coarsest variable q^{1/m} the nonzero terms allow. The known
    /// range is rounded down to whole steps of the coarser variable.
    fn reduce_ramification(&mut self) {
        let mut g = (self.ram as i64).gcd(&self.val);
        for (i, c) in self.series.coeffs().iter().enumerate() {
            if g == 1 {
                return;
            }
            if !c.cis_zero() {
                g = g.gcd(&(i as i64));
            }
        }
        if g <= 1 {
            return;
        }
        let g = g as usize;
        let len = self.series.order() / g;
        let v: Vec<C> = (0..len).map(|j| self.series.coeff(j * g).clone()).collect();
        self.series = PowerSeries::new(v, len);
        self.ram /= g as u32;
        self.val /= g as i64;
    }

    /// Multiplication by q^e.
    pub fn shift_exponent(&self, e: &BigQ) -> Self {
        let den: u32 = e.denom().try_into().expect("small denominator");
        let m = self.ram.lcm(&den);
        let s = self.with_ramification(m);
        let add = e * BigQ::from_integer((m as i64).into());
        let add: i64 = add.to_integer().try_into().expect("small exponent");
        Self::new(m, s.val + add, s.series)
    }

    pub fn ramification(&self) -> u32 {
        self.ram
    }

    /// Leading exponent numerator over the ramification index.
    pub fn val_num(&self) -> i64 {
        self.val
    }

    pub fn series(&self) -> &PowerSeries<C> {
        &self.series
    }

    pub fn is_zero(&self) -> bool {
        self.series.is_zero()
    }

    pub fn leading_exponent(&self) -> Option<BigQ> {
        if self.is_zero() { None } else { Some(rq(self.val, self.ram as i64)) }
    }

    pub fn leading_coeff(&self) -> Option<&C> {
        if self.is_zero() { None } else { Some(self.series.coeff(0)) }
    }

    /// Exponent up to which the expansion is known: O(q^precision).
    pub fn precision(&self) -> BigQ {
        rq(self.val + self.series.order() as i64, self.ram as i64)
    }

    /// Coefficient of q^e; `None` if e is beyond the known precision.
    pub fn coeff_at(&self, e: &BigQ) -> Option<C> {
        if *e >= self.precision() {
            return None;
        }
        let scaled = e * BigQ::from_integer((self.ram as i64).into());
        if !scaled.is_integer() {
            return Some(C::czero());
        }
        let idx = scaled.to_integer() - num_bigint::BigInt::from(self.val);
        if idx < num_bigint::BigInt::zero() {
            return Some(C::czero());
        }
        let i: usize = idx.try_into().ok()?;
        Some(self.series.coeff(i).clone())
    }

    /// Nonzero terms as (exponent, coefficient).
    pub fn terms(&self) -> Vec<(BigQ, C)> {
        self.series
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.cis_zero())
            .map(|(i, c)| (rq(self.val + i as i64, self.ram as i64), c.clone()))
            .collect()
    }

    /// Same series written with ramification `m`, a multiple of the current one.
    pub fn with_ramification(&self, m: u32) -> Self {
        assert!(m.is_multiple_of(self.ram), "ramification must be extended by a multiple");
        let k = (m / self.ram) as usize;
        if k == 1 {
            return self.clone();
        }
        FracExpSeries { ram: m, val: self.val * k as i64, series: self.series.substitute_power(k) }
    }

    fn common(&self, o: &Self) -> (Self, Self) {
        let m = self.ram.lcm(&o.ram);
        (self.with_ramification(m), o.with_ramification(m))
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        let prec = (a.val + a.series.order() as i64).min(b.val + b.series.order() as i64);
        let val = a.val.min(b.val);
        let len = (prec - val).max(0) as usize;
        let lift = |s: &Self| -> Vec<C> {
            let mut v = vec![C::czero(); len];
            for (i, c) in s.series.coeffs().iter().enumerate() {
                let j = (s.val - val) as usize + i;
                if j < len {
                    v[j] = c.clone();
                }
            }
            v
        };
        let (va, vb) = (lift(&a), lift(&b));
        let sum: Vec<C> = va.iter().zip(vb.iter()).map(|(x, y)| x.cadd(y)).collect();
        if len == 0 {
            return Self::zero_to(a.ram, prec);
        }
        Self::new(a.ram, val, PowerSeries::new(sum, len))
    }

    pub fn neg(&self) -> Self {
        FracExpSeries { ram: self.ram, val: self.val, series: self.series.neg() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.ram, self.val, self.series.scale(c))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        if a.is_zero() || b.is_zero() {
            // the known precision of a product with a zero factor
            let pa = a.val + a.series.order() as i64;
            let pb = b.val + b.series.order() as i64;
            let p = if a.is_zero() && b.is_zero() {
                pa + pb
            } else if a.is_zero() {
                pa + b.val
            } else {
                pb + a.val
            };
            return Self::zero_to(a.ram, p);
        }
        Self::new(a.ram, a.val + b.val, a.series.mul(&b.series))
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::new(self.ram, -self.val, self.series.inverse()?))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inverse()?))
    }

    pub fn powi(&self, n: i64) -> Result<Self> {
        let b = if n < 0 { self.inverse()? } else { self.clone() };
        if b.is_zero() {
            return Ok(Self::zero_to(b.ram, b.val * n.max(1)));
        }
        let series = b.series.pow(n.unsigned_abs() as u32);
        Ok(Self::new(b.ram, b.val * n.abs(), series))
    }

    /// k-th root, extending the ramification minimally.
    pub fn nth_root(&self, k: u32) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Invalid("root of a series with no known nonzero term".into()));
        }
        let g = (self.val.unsigned_abs() as u32).gcd(&k).max(1);
        let g = if self.val == 0 { k } else { g };
        let step = k / g;
        let root = self.series.nth_root(k)?;
        let m = self.ram * step;
        let val = self.val / g as i64;
        let r = FracExpSeries::new(1, 0, root).relabel_ram(self.ram).with_ramification(m).with_leading(val);
        Ok(Self::new(r.ram, r.val, r.series))
    }

    fn relabel_ram(mut self, m: u32) -> Self {
        self.ram = m;
        self
    }

    fn with_leading(mut self, val: i64) -> Self {
        self.val += val;
        self
    }

    /// q d/dq
    pub fn theta(&self) -> Self
    where
        C: Coeff,
    {
        let m = C::from_int(self.ram as i64).cinv().unwrap();
        let v: Vec<C> = self
            .series
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c.cmul(&C::from_int(self.val + i as i64)).cmul(&m))
            .collect();
        let n = v.len();
        if n == 0 {
            return self.clone();
        }
        Self::new(self.ram, self.val, PowerSeries::new(v, n))
    }

    /// Substitution q -> q^(a/b) for a positive rational a/b.
    pub fn scale_argument(&self, factor: &BigQ) -> Result<Self> {
        if *factor <= BigQ::zero() {
            return Err(Error::Invalid("argument scale must be positive".into()));
        }
        let a: usize = factor.numer().try_into().map_err(|_| Error::Invalid("scale too large".into()))?;
        let b: u32 = factor.denom().try_into().map_err(|_| Error::Invalid("scale too large".into()))?;
        Ok(Self::new(self.ram * b, self.val * a as i64, self.series.substitute_power(a)))
    }

    /// Keeps terms with exponent below `e`.
    pub fn truncate_to(&self, e: &BigQ) -> Self {
        if *e >= self.precision() {
            return self.clone();
        }
        let n = (e * BigQ::from_integer((self.ram as i64).into())).ceil().to_integer();
        let n: i64 = (&n).try_into().unwrap_or(i64::MAX);
        let len = (n - self.val).max(0) as usize;
        if len == 0 {
            return Self::zero_to(self.ram, n);
        }
        Self::new(self.ram, self.val, self.series.truncate(len))
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> FracExpSeries<D> {
        FracExpSeries { ram: self.ram, val: self.val, series: self.series.map(f) }
    }

    /// Is this zero through O(q^e)?
    pub fn vanishes_to(&self, e: &BigQ) -> bool {
        self.precision() >= *e && (self.is_zero() || rq(self.val, self.ram as i64) >= *e)
    }
}

impl FracExpSeries<BigQ> {
    /// Rational power of a series with positive rational leading coefficient that is a perfect power.
    pub fn pow_q(&self, e: &BigQ) -> Result<Self> {
        if e.is_integer() {
            let n: i64 = e.to_integer().try_into().map_err(|_| Error::Invalid("exponent too large".into()))?;
            return self.powi(n);
        }
        let num: i64 = e.numer().try_into().map_err(|_| Error::Invalid("exponent too large".into()))?;
        let den: u32 = e.denom().try_into().map_err(|_| Error::Invalid("exponent too large".into()))?;
        self.powi(num)?.nth_root(den)
    }
}
