//! Fuchsian differential operators written in the Euler derivation `theta = z d/dz`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dsl::{self, Algebra};
use crate::error::{Error, Result};
use crate::exact_algebra::rational::{BigQ, fmt_q, parse_rational, q, qi};
use crate::exact_algebra::{Poly, RatFunc};
use crate::frobenius;

/// A point of the projective line.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Finite(BigQ),
    Infinity,
}

impl Point {
    pub fn parse(s: &str) -> Result<Point> {
        let t = s.trim().to_ascii_lowercase();
        if t == "inf" || t == "infinity" || t == "∞" {
            return Ok(Point::Infinity);
        }
        parse_rational(&t).map(Point::Finite).ok_or_else(|| Error::Invalid(format!("bad point '{s}'")))
    }

    pub fn zero() -> Point {
        Point::Finite(BigQ::zero())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(a) => f.write_str(&fmt_q(a)),
            Point::Infinity => f.write_str("inf"),
        }
    }
}

/// Local type of a point, decided from exponents and the logarithmic structure of solutions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointClass {
    Smooth,
    /// Exponents k, k+1, ..., k+r-1 with no logarithms, k != 0.
    RegularCyclicShift(i64),
    /// Integral exponents, no logarithms, not consecutive.
    Apparent,
    /// All exponents 0 with a single maximal Jordan block.
    Mum,
    RegularSingular,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentReport {
    pub point: Point,
    /// Ascending, repeated by multiplicity.
    pub exponents: Vec<BigQ>,
    pub class: PointClass,
    /// Highest power of log among local solutions.
    pub log_degree: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PFOperator {
    pub var: String,
    /// `b_0 .. b_{r-1}` of `theta^r + b_{r-1} theta^{r-1} + ... + b_0`.
    pub coeffs: Vec<RatFunc>,
    pub genus: u32,
    pub labels: BTreeMap<String, String>,
}

/// Element of Q[z]<theta> in normal order: `sum_j P_j(z) theta^j`.
#[derive(Clone, Debug, PartialEq)]
struct Weyl(Vec<Poly>);

struct WeylCtx {
    var: String,
}

impl Weyl {
    fn trim(mut v: Vec<Poly>) -> Weyl {
        while v.last().is_some_and(|p| p.is_zero()) {
            v.pop();
        }
        Weyl(v)
    }

    fn as_constant(&self) -> Option<BigQ> {
        match self.0.len() {
            0 => Some(BigQ::zero()),
            1 if self.0[0].degree().unwrap_or(0) == 0 => Some(self.0[0].coeff(0)),
            _ => None,
        }
    }
}

/// theta applied to a polynomial as a function.
fn theta_poly(p: &Poly) -> Poly {
    Poly::new(p.coeffs().iter().enumerate().map(|(i, c)| c * qi(i as i64)).collect())
}

impl Algebra for Weyl {
    type Ctx = WeylCtx;

    fn constant(_: &Self::Ctx, c: &BigQ) -> Result<Self> {
        Ok(Weyl::trim(vec![Poly::constant(c.clone())]))
    }

    fn symbol(ctx: &Self::Ctx, name: &str, offset: usize) -> Result<Self> {
        if name == ctx.var {
            Ok(Weyl(vec![Poly::x()]))
        } else if matches!(name, "theta" | "θ" | "Theta" | "T") {
            Ok(Weyl(vec![Poly::zero(), Poly::one()]))
        } else {
            Err(Error::Parse { offset, message: format!("unknown symbol '{name}'") })
        }
    }

    fn add(&self, o: &Self) -> Result<Self> {
        let n = self.0.len().max(o.0.len());
        let z = Poly::zero();
        Ok(Weyl::trim((0..n).map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z)).collect()))
    }

    fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg()?)
    }

    fn mul(&self, o: &Self) -> Result<Self> {
        if self.0.is_empty() || o.0.is_empty() {
            return Ok(Weyl(Vec::new()));
        }
        let mut out = vec![Poly::zero(); self.0.len() + o.0.len() - 1];
        for (a, p) in self.0.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (b, qp) in o.0.iter().enumerate() {
                if qp.is_zero() {
                    continue;
                }
                // P theta^a Q theta^b = sum_k C(a,k) P (theta^k Q) theta^{a-k+b}
                let mut tq = qp.clone();
                for k in 0..=a {
                    let c = BigQ::from_integer(crate::exact_algebra::rational::binomial(a as u64, k as u64));
                    let term = (p * &tq).scale(&c);
                    out[a - k + b] = &out[a - k + b] + &term;
                    tq = theta_poly(&tq);
                }
            }
        }
        Ok(Weyl::trim(out))
    }

    fn div(&self, o: &Self, offset: usize) -> Result<Self> {
        match o.as_constant() {
            Some(c) if !c.is_zero() => Ok(Weyl(self.0.iter().map(|p| p.scale(&c.recip())).collect())),
            Some(_) => Err(Error::DivisionByZero),
            None => Err(Error::Parse { offset, message: "operators may only be divided by nonzero constants".into() }),
        }
    }

    fn neg(&self) -> Result<Self> {
        Ok(Weyl(self.0.iter().map(|p| -p).collect()))
    }

    fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return match self.as_constant() {
                Some(c) if !c.is_zero() => Self::constant(&WeylCtx { var: String::new() }, &crate::exact_algebra::rational::pow_i(&c, e)),
                _ => Err(Error::Invalid("negative powers are only allowed for constants".into())),
            };
        }
        let mut r = Weyl(vec![Poly::one()]);
        for _ in 0..e {
            r = r.mul(self)?;
        }
        Ok(r)
    }
}

/// Rational functions of one variable, for coefficient lists.
#[derive(Clone, Debug)]
struct RatAlg(RatFunc);

impl Algebra for RatAlg {
    type Ctx = WeylCtx;

    fn constant(_: &Self::Ctx, c: &BigQ) -> Result<Self> {
        Ok(RatAlg(RatFunc::constant(c.clone())))
    }
    fn symbol(ctx: &Self::Ctx, name: &str, offset: usize) -> Result<Self> {
        if name == ctx.var {
            Ok(RatAlg(RatFunc::var()))
        } else {
            Err(Error::Parse { offset, message: format!("unknown symbol '{name}'") })
        }
    }
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(RatAlg(self.0.add(&o.0)))
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Ok(RatAlg(self.0.sub(&o.0)))
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(RatAlg(self.0.mul(&o.0)))
    }
    fn div(&self, o: &Self, _: usize) -> Result<Self> {
        Ok(RatAlg(self.0.div(&o.0)?))
    }
    fn neg(&self) -> Result<Self> {
        Ok(RatAlg(self.0.neg()))
    }
    fn pow(&self, e: i64) -> Result<Self> {
        Ok(RatAlg(self.0.pow(e)?))
    }
}

pub fn parse_ratfunc(src: &str, var: &str) -> Result<RatFunc> {
    let e = dsl::parse(src)?;
    Ok(dsl::eval::<RatAlg>(&e, &WeylCtx { var: var.to_string() })?.0)
}

/// Stirling numbers of the second kind S(n, k), 0 <= k <= n.
fn stirling2(n: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); n + 1]; n + 1];
    s[0][0] = BigInt::one();
    for i in 1..=n {
        for k in 1..=i {
            s[i][k] = &s[i - 1][k - 1] + BigInt::from(k) * &s[i - 1][k];
        }
    }
    s
}

/// Signed Stirling numbers of the first kind: z^j D^j = sum_k s(j, k) theta^k.
fn stirling1(n: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); n + 1]; n + 1];
    s[0][0] = BigInt::one();
    for i in 1..=n {
        for k in 1..=i {
            s[i][k] = &s[i - 1][k - 1] - BigInt::from(i - 1) * &s[i - 1][k];
        }
    }
    s
}

fn zpow(k: i64) -> RatFunc {
    RatFunc::var().pow(k).unwrap()
}

impl PFOperator {
    pub fn new(var: &str, coeffs: Vec<RatFunc>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("operator must have order at least 1".into()));
        }
        Ok(PFOperator { var: var.to_string(), coeffs, genus: 0, labels: BTreeMap::new() })
    }

    /// Parses e.g. `theta^3 - z*(theta+1/4)*(theta+1/2)*(theta+3/4)`.
    pub fn parse(src: &str, var: &str) -> Result<Self> {
        let e = dsl::parse(src)?;
        let w = dsl::eval::<Weyl>(&e, &WeylCtx { var: var.to_string() })?;
        let r = w.0.len().checked_sub(1).filter(|&r| r >= 1).ok_or_else(|| Error::Invalid("operator has no theta terms".into()))?;
        let lead = w.0[r].clone();
        let coeffs = (0..r).map(|j| RatFunc::new(w.0[j].clone(), lead.clone())).collect::<Result<Vec<_>>>()?;
        Self::new(var, coeffs)
    }

    /// From the list `b_0, ..., b_{r-1}` of rational-function expressions.
    pub fn from_theta_strings(items: &[String], var: &str) -> Result<Self> {
        let coeffs = items.iter().map(|s| parse_ratfunc(s, var)).collect::<Result<Vec<_>>>()?;
        Self::new(var, coeffs)
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients `a_0 .. a_{r-1}` of the monic form `D^r + sum a_j D^j`, `D = d/dz`.
    pub fn to_dz_form(&self) -> Vec<RatFunc> {
        let r = self.rank();
        let s = stirling2(r);
        let mut c: Vec<RatFunc> = self.coeffs.clone();
        c.push(RatFunc::one());
        (0..r)
            .map(|j| {
                let mut acc = RatFunc::zero();
                for (k, ck) in c.iter().enumerate().skip(j) {
                    if !s[k][j].is_zero() {
                        acc = acc.add(&ck.scale(&BigQ::from_integer(s[k][j].clone())));
                    }
                }
                acc.mul(&zpow(j as i64 - r as i64))
            })
            .collect()
    }

    /// Inverse of [`to_dz_form`](Self::to_dz_form).
    pub fn from_dz_form(var: &str, a: &[RatFunc]) -> Result<Self> {
        let r = a.len();
        let s = stirling1(r);
        let mut b = vec![RatFunc::zero(); r + 1];
        for k in 0..=r {
            if !s[r][k].is_zero() {
                b[k] = b[k].add(&RatFunc::constant(BigQ::from_integer(s[r][k].clone())));
            }
        }
        for (j, aj) in a.iter().enumerate() {
            let t = aj.mul(&zpow((r - j) as i64));
            for k in 0..=j {
                if !s[j][k].is_zero() {
                    b[k] = b[k].add(&t.scale(&BigQ::from_integer(s[j][k].clone())));
                }
            }
        }
        debug_assert!(b[r] == RatFunc::one());
        b.truncate(r);
        Self::new(var, b)
    }

    /// The operator in a local coordinate `w` at the point: `w = z - a`, or `w = 1/z` at infinity.
    pub fn localize(&self, p: &Point) -> Result<PFOperator> {
        let mut out = match p {
            Point::Finite(a) if a.is_zero() => self.clone(),
            Point::Finite(a) => {
                let dz: Vec<RatFunc> = self.to_dz_form().iter().map(|f| f.shift(a)).collect();
                Self::from_dz_form(&self.var, &dz)?
            }
            Point::Infinity => {
                let r = self.rank();
                let coeffs = self
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, b)| {
                        let f = b.invert_var();
                        if (r - i) % 2 == 1 { f.neg() } else { f }
                    })
                    .collect();
                Self::new(&self.var, coeffs)?
            }
        };
        out.genus = self.genus;
        Ok(out)
    }

    /// Errors unless every theta-coefficient is holomorphic at 0.
    pub fn check_fuchsian_at_zero(&self, label: &Point) -> Result<()> {
        for (i, b) in self.coeffs.iter().enumerate() {
            if let Some(o) = b.order_at(&BigQ::zero())
                && o < 0 {
                    return Err(Error::Irregular { point: label.to_string(), index: i, order: -o });
                }
        }
        Ok(())
    }

    /// `X^r + sum b_i(0) X^i` of an operator already localized at 0.
    pub fn indicial_polynomial(&self) -> Result<Poly> {
        let mut c: Vec<BigQ> = Vec::with_capacity(self.rank() + 1);
        for b in &self.coeffs {
            c.push(b.eval(&BigQ::zero()).ok_or_else(|| Error::Irregular { point: "0".into(), index: c.len(), order: 1 })?);
        }
        c.push(BigQ::one());
        Ok(Poly::new(c))
    }

    /// Local exponents at 0 of a localized operator, ascending with multiplicity.
    pub fn local_exponents(&self, label: &Point) -> Result<Vec<BigQ>> {
        self.check_fuchsian_at_zero(label)?;
        let p = self.indicial_polynomial()?;
        let (roots, rest) = p.rational_roots()?;
        if rest.degree().unwrap_or(0) > 0 {
            return Err(Error::IrrationalExponents { point: label.to_string(), approx: rest.approx_roots() });
        }
        let mut ex = Vec::new();
        for (r, m) in roots {
            ex.extend(std::iter::repeat_n(r, m));
        }
        ex.sort();
        Ok(ex)
    }

    pub fn exponents_at(&self, p: &Point) -> Result<ExponentReport> {
        let loc = self.localize(p)?;
        let exponents = loc.local_exponents(p)?;
        let log_degree = frobenius::max_log_degree(&loc, &exponents)?;
        let r = self.rank();
        let all_int = exponents.iter().all(|e| e.is_integer());
        let class = if all_int && log_degree == 0 {
            let k = &exponents[0];
            let consecutive = exponents.iter().enumerate().all(|(i, e)| *e == k + qi(i as i64));
            match (consecutive, k.is_zero()) {
                (true, true) => PointClass::Smooth,
                (true, false) => PointClass::RegularCyclicShift(k.to_integer().try_into().unwrap_or(i64::MAX)),
                _ => PointClass::Apparent,
            }
        } else if exponents.iter().all(|e| e.is_zero()) && log_degree + 1 == r {
            PointClass::Mum
        } else {
            PointClass::RegularSingular
        };
        Ok(ExponentReport { point: p.clone(), exponents, class, log_degree })
    }

    /// Candidate points: 0, infinity and every finite pole of a coefficient.
    pub fn candidate_points(&self) -> Result<Vec<Point>> {
        let mut pts = vec![Point::zero()];
        for b in &self.coeffs {
            let (poles, rest) = b.rational_poles()?;
            if rest.degree().unwrap_or(0) > 0 {
                return Err(Error::IrrationalSingularity { factor: rest.display_in(&self.var) });
            }
            for (a, _) in poles {
                let p = Point::Finite(a);
                if !pts.contains(&p) {
                    pts.push(p);
                }
            }
        }
        pts.sort();
        pts.push(Point::Infinity);
        Ok(pts)
    }

    /// Every non-smooth point with its exponents and class.
    pub fn singular_points(&self) -> Result<Vec<ExponentReport>> {
        let mut out = Vec::new();
        for p in self.candidate_points()? {
            let rep = self.exponents_at(&p)?;
            if rep.class != PointClass::Smooth {
                out.push(rep);
            }
        }
        Ok(out)
    }

    /// `b_i -> b_i / hbar^{r-i}`: the operator of `hbar theta` in place of `theta`.
    pub fn hbar_deform(&self, hbar: &BigQ) -> Result<PFOperator> {
        if hbar.is_zero() {
            return Err(Error::Invalid("hbar must be nonzero".into()));
        }
        let r = self.rank();
        let mut out = self.clone();
        for (i, b) in out.coeffs.iter_mut().enumerate() {
            *b = b.scale(&crate::exact_algebra::rational::pow_i(hbar, -((r - i) as i64)));
        }
        Ok(out)
    }

    /// Sum over the given points of (sum of exponents - r(r-1)/2), which equals -r(r-1)
    /// when the list contains every singular point of a Fuchsian operator on the line.
    pub fn fuchs_sum(reports: &[ExponentReport], r: usize) -> BigQ {
        let base = q((r * (r - 1) / 2) as i64, 1);
        reports.iter().map(|rep| rep.exponents.iter().fold(BigQ::zero(), |a, e| a + e) - &base).fold(BigQ::zero(), |a, b| a + b)
    }

    pub fn display(&self) -> String {
        let r = self.rank();
        let mut parts = vec![format!("theta^{r}")];
        for i in (0..r).rev() {
            let b = &self.coeffs[i];
            if b.is_zero() {
                continue;
            }
            let t = match i {
                0 => String::new(),
                1 => "*theta".to_string(),
                _ => format!("*theta^{i}"),
            };
            parts.push(format!("({}){t}", b.display_in(&self.var)));
        }
        parts.join(" + ")
    }
}

/// Serialized operator input.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct OperatorDocument {
    pub name: String,
    #[serde(default = "default_var")]
    pub variable: String,
    #[serde(default)]
    pub operator: Option<String>,
    #[serde(default)]
    pub theta_coefficients: Option<Vec<String>>,
    #[serde(default)]
    pub genus: u32,
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
    #[serde(default)]
    pub parameters: Vec<String>,
    #[serde(default)]
    pub expected: Option<Expected>,
    #[serde(default)]
    pub mirror: Option<MirrorSpec>,
}

fn default_var() -> String {
    "z".into()
}

/// Golden values a document may carry; checked by `analyze`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Expected {
    #[serde(default)]
    pub exponents: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub splitting: Option<Vec<i64>>,
    #[serde(default)]
    pub parabolic_degrees: Option<Vec<String>>,
}

/// Modular data attached to an operator.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct MirrorSpec {
    pub level: String,
    pub map: String,
    pub period: String,
    #[serde(default)]
    pub kahler_coefficient: Option<String>,
}

impl OperatorDocument {
    pub fn from_str_auto(src: &str) -> Result<Self> {
        let t = src.trim_start();
        if t.starts_with('{') {
            serde_json::from_str(src).map_err(|e| Error::Invalid(format!("json: {e}")))
        } else {
            toml::from_str(src).map_err(|e| Error::Invalid(format!("toml: {e}")))
        }
    }

    /// Replaces `{name}` placeholders by parameter values.
    pub fn instantiate(&self, values: &[(&str, &BigQ)]) -> Result<Self> {
        for p in &self.parameters {
            if !values.iter().any(|(k, _)| k == p) {
                return Err(Error::Invalid(format!("missing parameter '{p}'")));
            }
        }
        let mut d = self.clone();
        d.operator = d.operator.map(|s| dsl::instantiate(&s, values));
        d.theta_coefficients = d.theta_coefficients.map(|v| v.iter().map(|s| dsl::instantiate(s, values)).collect());
        d.parameters.clear();
        Ok(d)
    }

    pub fn to_operator(&self) -> Result<PFOperator> {
        if !self.parameters.is_empty() {
            return Err(Error::Invalid(format!("document '{}' is a template; supply {:?}", self.name, self.parameters)));
        }
        let mut op = match (&self.operator, &self.theta_coefficients) {
            (Some(s), None) => PFOperator::parse(s, &self.variable)?,
            (None, Some(c)) => PFOperator::from_theta_strings(c, &self.variable)?,
            _ => return Err(Error::Invalid("document needs exactly one of 'operator' or 'theta_coefficients'".into())),
        };
        op.genus = self.genus;
        op.labels = self.labels.clone();
        Ok(op)
    }
}
