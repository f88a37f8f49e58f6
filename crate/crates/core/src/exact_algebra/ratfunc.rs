use std::fmt;

use num_traits::{One, Zero};

use super::poly::Poly;
use super::rational::BigQ;
use super::series::{Coeff, PowerSeries};
use crate::error::{Error, Result};

/// Reduced quotient of polynomials with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = Poly::gcd(&num, &den);
        let num = num.div_exact(&g)?;
        let den = den.div_exact(&g)?;
        let l = den.leading().recip();
        Ok(RatFunc { num: num.scale(&l), den: den.scale(&l) })
    }

    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Self::constant(BigQ::one())
    }

    pub fn constant(c: BigQ) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn var() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den).unwrap()
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&(&self.num * &o.den) - &(&o.num * &self.den), &self.den * &o.den).unwrap()
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.num, &self.den * &o.den).unwrap()
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn scale(&self, c: &BigQ) -> Self {
        Self::new(self.num.scale(c), self.den.clone()).unwrap()
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one().div(self)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let b = if e < 0 { self.inv()? } else { self.clone() };
        let mut r = Self::one();
        for _ in 0..e.unsigned_abs() {
            r = r.mul(&b);
        }
        Ok(r)
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(n, &self.den * &self.den).unwrap()
    }

    /// Value at a rational point; `None` at a pole.
    pub fn eval(&self, x: &BigQ) -> Option<BigQ> {
        let d = self.den.eval(x);
        if d.is_zero() { None } else { Some(self.num.eval(x) / d) }
    }

    pub fn eval_with<C: Coeff>(&self, x: &C) -> Option<C> {
        self.num.eval_with(x).cdiv(&self.den.eval_with(x))
    }

    /// Order of vanishing at a (negative for a pole); `None` for the zero function.
    pub fn order_at(&self, a: &BigQ) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.num.root_multiplicity(a) as i64 - self.den.root_multiplicity(a) as i64)
    }

    /// Order of vanishing at infinity.
    pub fn order_at_infinity(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.den.degree().unwrap() as i64 - self.num.degree().unwrap() as i64)
    }

    /// f(w + a)
    pub fn shift(&self, a: &BigQ) -> Self {
        Self::new(self.num.shift(a), self.den.shift(a)).unwrap()
    }

    /// f(c w)
    pub fn scale_var(&self, c: &BigQ) -> Self {
        Self::new(self.num.scale_var(c), self.den.scale_var(c)).unwrap()
    }

    /// f(1/w)
    pub fn invert_var(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let n = self.num.degree().unwrap().max(self.den.degree().unwrap());
        Self::new(self.num.reverse(n), self.den.reverse(n)).unwrap()
    }

    /// Taylor expansion at 0; errors if 0 is a pole.
    pub fn taylor(&self, order: usize) -> Result<PowerSeries<BigQ>> {
        if self.den.coeff(0).is_zero() {
            return Err(Error::Invalid(format!("{self} has a pole at 0")));
        }
        let n = PowerSeries::from_poly(&self.num, order);
        let d = PowerSeries::from_poly(&self.den, order);
        n.div(&d)
    }

    /// Finite poles as monic irreducible-free factor data: rational poles with multiplicity
    /// and the part of the denominator without rational roots.
    pub fn rational_poles(&self) -> Result<(Vec<(BigQ, usize)>, Poly)> {
        if self.den.degree() == Some(0) {
            return Ok((Vec::new(), Poly::one()));
        }
        self.den.rational_roots()
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.is_polynomial() {
            return self.num.display_in(var);
        }
        format!("({})/({})", self.num.display_in(var), self.den.display_in(var))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("z"))
    }
}
