//! Helpers around the exact rational type.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type BigQ = num_rational::BigRational;

pub fn q(n: i64, d: i64) -> BigQ {
    BigQ::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> BigQ {
    BigQ::from_integer(BigInt::from(n))
}

pub fn floor(x: &BigQ) -> BigInt {
    x.floor().to_integer()
}

pub fn is_integer(x: &BigQ) -> bool {
    x.denom().is_one()
}

pub fn to_f64(x: &BigQ) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale both down by a common power of two
            let bits = x.numer().bits().max(x.denom().bits());
            let shift = bits.saturating_sub(1000);
            let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

fn int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        if k.is_multiple_of(2) {
            return None;
        }
        return int_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n { Some(r) } else { None }
}

/// Exact k-th root of a rational, when one exists.
pub fn nth_root(x: &BigQ, k: u32) -> Option<BigQ> {
    if k == 0 {
        return None;
    }
    let n = int_root(x.numer(), k)?;
    let d = int_root(x.denom(), k)?;
    Some(BigQ::new(n, d))
}

pub fn pow_i(x: &BigQ, e: i64) -> BigQ {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// Parses `7`, `-3/4`, `0.25`, `1e-3`.
pub fn parse_rational(s: &str) -> Option<BigQ> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((a, b)) = s.split_once('/') {
        let n = parse_rational(a)?;
        let d = parse_rational(b)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{ip}{fp}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = exp - fp.len() as i64;
    let ten = qi(10);
    let mut v = BigQ::from_integer(n) * pow_i(&ten, scale);
    if neg {
        v = -v;
    }
    Some(v)
}

pub fn fmt_q(x: &BigQ) -> String {
    if x.denom().is_one() { x.numer().to_string() } else { format!("{}/{}", x.numer(), x.denom()) }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

/// Positive divisors of |n| by trial division; `None` when n is too large to factor this way.
pub fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let mut m = n.abs();
    if m.is_zero() {
        return None;
    }
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(10_000_000u64);
    while &p * &p <= m {
        if p > limit {
            return None;
        }
        let mut e = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e > 0 {
            primes.push((p.clone(), e));
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if !m.is_one() {
        primes.push((m, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    Some(divs)
}

pub fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

pub fn sign_of(x: &BigQ) -> Sign {
    x.numer().sign()
}
