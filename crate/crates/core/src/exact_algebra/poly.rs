use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{BigQ, divisors, fmt_q, qi};
use super::series::Coeff;
use crate::error::{Error, Result};

/// Dense univariate polynomial over the rationals, ascending coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigQ>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigQ::one())
    }

    pub fn constant(c: BigQ) -> Self {
        Self::new(vec![c])
    }

    /// The monomial x.
    pub fn x() -> Self {
        Self::new(vec![BigQ::zero(), BigQ::one()])
    }

    pub fn monomial(c: BigQ, k: usize) -> Self {
        let mut v = vec![BigQ::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// x - a
    pub fn linear_root(a: &BigQ) -> Self {
        Self::new(vec![-a.clone(), BigQ::one()])
    }

    pub fn new(mut coeffs: Vec<BigQ>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| qi(v)).collect())
    }

    pub fn coeffs(&self) -> &[BigQ] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigQ {
        self.coeffs.get(i).cloned().unwrap_or_else(BigQ::zero)
    }

    pub fn leading(&self) -> BigQ {
        self.coeffs.last().cloned().unwrap_or_else(BigQ::zero)
    }

    pub fn scale(&self, c: &BigQ) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading().recip();
        self.scale(&l)
    }

    pub fn eval(&self, x: &BigQ) -> BigQ {
        let mut acc = BigQ::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_with<C: Coeff>(&self, x: &C) -> C {
        let mut acc = C::czero();
        for c in self.coeffs.iter().rev() {
            acc = acc.cmul(x).cadd(&C::from_q(c));
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * qi(i as i64)).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = Poly::one();
        for _ in 0..n {
            r = &r * self;
        }
        r
    }

    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quo = vec![BigQ::zero(); r.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            quo[k] = c;
        }
        r.truncate(dd);
        Ok((Poly::new(quo), Poly::new(r)))
    }

    /// Exact quotient; errors if d does not divide self.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::Invalid(format!("{d} does not divide {self}")));
        }
        Ok(q)
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.primitive_rational();
        }
        a.monic()
    }

    /// Rescales to keep coefficient growth down during Euclid; same up to a unit.
    fn primitive_rational(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let ints = self.integer_coefficients();
        Poly::new(ints.into_iter().map(BigQ::from_integer).collect())
    }

    /// Primitive integer coefficients with positive leading coefficient.
    pub fn integer_coefficients(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let l = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * BigQ::from_integer(l.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sgn = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        for c in ints.iter_mut() {
            *c = &*c / &g * &sgn;
        }
        ints
    }

    /// p(x + a)
    pub fn shift(&self, a: &BigQ) -> Poly {
        let mut acc = Poly::zero();
        let lin = Poly::new(vec![a.clone(), BigQ::one()]);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Poly::constant(c.clone());
        }
        acc
    }

    /// p(c x)
    pub fn scale_var(&self, c: &BigQ) -> Poly {
        let mut p = BigQ::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &p);
            p *= c;
        }
        Poly::new(out)
    }

    /// x^n p(1/x), for n >= deg p.
    pub fn reverse(&self, n: usize) -> Poly {
        let mut v = vec![BigQ::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[n - i] = c.clone();
        }
        Poly::new(v)
    }

    /// Multiplicity of a as a root.
    pub fn root_multiplicity(&self, a: &BigQ) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Poly::linear_root(a);
        let mut p = self.clone();
        let mut m = 0;
        loop {
            let (quo, r) = p.div_rem(&lin).unwrap();
            if !r.is_zero() {
                return m;
            }
            m += 1;
            p = quo;
        }
    }

    /// Rational roots with multiplicity, plus the cofactor without rational roots.
    pub fn rational_roots(&self) -> Result<(Vec<(BigQ, usize)>, Poly)> {
        if self.is_zero() {
            return Err(Error::Invalid("roots of the zero polynomial".into()));
        }
        let mut rest = self.monic();
        let mut roots = Vec::new();
        let z = BigQ::zero();
        let m0 = rest.root_multiplicity(&z);
        if m0 > 0 {
            roots.push((z, m0));
            rest = rest.div_exact(&Poly::monomial(BigQ::one(), m0))?;
        }
        if rest.degree().unwrap_or(0) == 0 {
            return Ok((roots, rest));
        }
        let ints = rest.integer_coefficients();
        let a0 = ints.first().unwrap().clone();
        let an = ints.last().unwrap().clone();
        let (Some(dp), Some(dq)) = (divisors(&a0), divisors(&an)) else {
            return Err(Error::Unsupported(format!("coefficients of {rest} too large to search for rational roots")));
        };
        let mut cands: Vec<BigQ> = Vec::new();
        for p in &dp {
            for qd in &dq {
                for s in [1i64, -1] {
                    let c = BigQ::new(p * BigInt::from(s), qd.clone());
                    if !cands.contains(&c) {
                        cands.push(c);
                    }
                }
            }
        }
        cands.sort();
        for c in cands {
            if rest.degree().unwrap_or(0) == 0 {
                break;
            }
            let m = rest.root_multiplicity(&c);
            if m > 0 {
                rest = rest.div_exact(&Poly::linear_root(&c).pow(m as u32))?;
                roots.push((c, m));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        Ok((roots, rest))
    }

    /// Complex root approximations (Durand-Kerner), for diagnostics only.
    pub fn approx_roots(&self) -> Vec<(f64, f64)> {
        let n = match self.degree() {
            Some(n) if n > 0 => n,
            _ => return Vec::new(),
        };
        let m = self.monic();
        let c: Vec<f64> = m.coeffs.iter().map(super::rational::to_f64).collect();
        let eval = |x: (f64, f64)| {
            let mut acc = (0.0, 0.0);
            for a in c.iter().rev() {
                acc = (acc.0 * x.0 - acc.1 * x.1 + a, acc.0 * x.1 + acc.1 * x.0);
            }
            acc
        };
        let mut z: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let t = 0.4 + 0.9 * k as f64;
                let r = 0.9f64.powi(k as i32) + 0.5;
                (r * t.cos(), r * t.sin())
            })
            .collect();
        for _ in 0..500 {
            for i in 0..n {
                let num = eval(z[i]);
                let mut den = (1.0, 0.0);
                for j in 0..n {
                    if i != j {
                        let d = (z[i].0 - z[j].0, z[i].1 - z[j].1);
                        den = (den.0 * d.0 - den.1 * d.1, den.0 * d.1 + den.1 * d.0);
                    }
                }
                let dd = den.0 * den.0 + den.1 * den.1;
                if dd == 0.0 {
                    continue;
                }
                let q = ((num.0 * den.0 + num.1 * den.1) / dd, (num.1 * den.0 - num.0 * den.1) / dd);
                z[i] = (z[i].0 - q.0, z[i].1 - q.1);
            }
        }
        z
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if mono.is_empty() {
                out.push_str(&fmt_q(&a));
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{mono}", fmt_q(&a)));
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("z"))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![BigQ::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($t:ident, $tr:ident, $m:ident) => {
        impl $tr for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Poly, Add, add);
forward_owned!(Poly, Sub, sub);
forward_owned!(Poly, Mul, mul);
