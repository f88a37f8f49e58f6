//! q-expansions of Eisenstein series, the eta function, theta constants and the
//! generators of the graded differential rings of modular forms for small levels.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::dsl::{self, Algebra};
use crate::error::{Error, Result};
use crate::exact_algebra::mp::{self, MpComplex};
use crate::exact_algebra::rational::{BigQ, fmt_q, nth_root, pow_i, q, qi};
use crate::exact_algebra::{PowerSeries, QExpansion};
use crate::numeric::{self, Evaluated};

/// Number of extra q-orders carried through intermediate steps.
const MARGIN: usize = 6;

fn qseries(coeffs: Vec<BigQ>, order: usize) -> QExpansion {
    QExpansion::from_series(PowerSeries::new(coeffs, order))
}

/// E_k for k in {2, 4, 6}, known through O(q^order).
pub fn eisenstein(k: u32, order: usize) -> Result<QExpansion> {
    let c = match k {
        2 => qi(-24),
        4 => qi(240),
        6 => qi(-504),
        _ => return Err(Error::Unsupported(format!("E_{k}"))),
    };
    let mut v = vec![BigQ::zero(); order];
    if order > 0 {
        v[0] = BigQ::one();
    }
    // Lambert series: sum_m m^{k-1} q^m / (1 - q^m)
    for m in 1..order {
        let w = &c * qi((m as i64).pow(k - 1));
        let mut n = m;
        while n < order {
            v[n] += &w;
            n += m;
        }
    }
    Ok(qseries(v, order))
}

/// prod_{n >= 1} (1 - q^n) through O(q^order).
pub fn euler_product(order: usize) -> PowerSeries {
    let mut p = PowerSeries::one(order);
    for n in 1..order {
        let mut f = vec![BigQ::zero(); order];
        f[0] = BigQ::one();
        f[n] = -BigQ::one();
        p = p.mul(&PowerSeries::new(f, order));
    }
    p
}

/// eta(tau) = q^{1/24} prod (1 - q^n), known through O(q^{order + 1/24}).
pub fn eta(order: usize) -> QExpansion {
    QExpansion::from_series(euler_product(order)).shift_exponent(&q(1, 24))
}

/// theta_2 = sum_{n in Z + 1/2} q^{n^2/2}, known through O(q^order).
pub fn theta2(order: usize) -> QExpansion {
    let len = 8 * order;
    let mut v = vec![BigQ::zero(); len];
    let mut n = 1usize;
    while n * n < len {
        v[n * n] = qi(2);
        n += 2;
    }
    QExpansion::new(8, 0, PowerSeries::new(v, len))
}

fn theta34(order: usize, alternating: bool) -> QExpansion {
    let len = 2 * order;
    let mut v = vec![BigQ::zero(); len];
    v[0] = BigQ::one();
    let mut n = 1usize;
    while n * n < len {
        let s = if alternating && n % 2 == 1 { -2 } else { 2 };
        v[n * n] = qi(s);
        n += 1;
    }
    QExpansion::new(2, 0, PowerSeries::new(v, len))
}

/// theta_3 = sum_{n in Z} q^{n^2/2}.
pub fn theta3(order: usize) -> QExpansion {
    theta34(order, false)
}

/// theta_4 = sum_{n in Z} (-1)^n q^{n^2/2}.
pub fn theta4(order: usize) -> QExpansion {
    theta34(order, true)
}

/// f(tau) -> f(N tau) for a positive rational N.
pub fn scale_argument(f: &QExpansion, n: &BigQ) -> Result<QExpansion> {
    f.scale_argument(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Level {
    /// The full modular group, written 1*.
    One,
    Two,
    Three,
    Four,
}

impl Level {
    pub fn parse(s: &str) -> Result<Level> {
        match s.trim() {
            "1" | "1*" => Ok(Level::One),
            "2" => Ok(Level::Two),
            "3" => Ok(Level::Three),
            "4" => Ok(Level::Four),
            _ => Err(Error::Invalid(format!("unknown level '{s}'; expected 1*, 2, 3 or 4"))),
        }
    }

    pub fn all() -> [Level; 4] {
        [Level::One, Level::Two, Level::Three, Level::Four]
    }

    /// The exponent r with A^r = B^r + C^r.
    pub fn r(self) -> u32 {
        match self {
            Level::One => 6,
            Level::Two => 4,
            Level::Three => 3,
            Level::Four => 2,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::One => "1*",
            Level::Two => "2",
            Level::Three => "3",
            Level::Four => "4",
        })
    }
}

/// `base^{power/index} * series`, for series whose natural normalisation carries a radical.
#[derive(Clone, Debug, PartialEq)]
pub struct RadicalQExp {
    pub base: BigQ,
    pub index: u32,
    /// In 0 .. index.
    pub power: u32,
    pub series: QExpansion,
}

impl RadicalQExp {
    pub fn rational(series: QExpansion) -> Self {
        RadicalQExp { base: BigQ::one(), index: 1, power: 0, series }
    }

    /// Normalised so that the radical power lies in 0 .. index, pulling out whole powers of the base.
    fn make(base: BigQ, index: u32, power: i64, series: QExpansion) -> Self {
        if index == 1 || base.is_one() {
            return Self::rational(series);
        }
        let i = index as i64;
        let whole = power.div_euclid(i);
        let rest = power.rem_euclid(i) as u32;
        let series = series.scale(&pow_i(&base, whole));
        if rest == 0 {
            return RadicalQExp { base, index, power: 0, series };
        }
        RadicalQExp { base, index, power: rest, series }
    }

    pub fn is_rational(&self) -> bool {
        self.power == 0
    }

    pub fn to_rational(&self) -> Result<QExpansion> {
        if self.power != 0 {
            return Err(Error::Invalid(format!(
                "expression carries an irrational factor {}^({}/{})",
                fmt_q(&self.base),
                self.power,
                self.index
            )));
        }
        Ok(self.series.clone())
    }

    pub fn describe_prefactor(&self) -> String {
        if self.power == 0 { "1".into() } else { format!("{}^({}/{})", fmt_q(&self.base), self.power, self.index) }
    }
}

/// Splits off an irrational k-th root of the leading coefficient.
fn root_with_radical(s: &QExpansion, k: u32) -> Result<RadicalQExp> {
    let c0 = s.leading_coeff().ok_or_else(|| Error::Invalid("root of a vanishing series".into()))?.clone();
    if nth_root(&c0, k).is_some() {
        return Ok(RadicalQExp::rational(s.nth_root(k)?));
    }
    if c0 < BigQ::zero() && k.is_multiple_of(2) {
        return Err(Error::Invalid("even root of a series with negative leading coefficient".into()));
    }
    let unit = s.scale(&c0.recip()).nth_root(k)?;
    Ok(RadicalQExp::make(c0, k, 1, unit))
}

/// Generators A, B, C, E of the differential ring attached to a level.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub level: Level,
    /// Working truncation order; constants in expressions are carried this far.
    pub working_order: usize,
    pub a: QExpansion,
    pub b: QExpansion,
    pub c: RadicalQExp,
    pub e: QExpansion,
}

impl GeneratorSet {
    pub fn r(&self) -> u32 {
        self.level.r()
    }

    /// C^r as a rational series.
    pub fn c_pow_r(&self) -> Result<QExpansion> {
        let r = self.r() as i64;
        let c = &self.c;
        let s = c.series.powi(r)?;
        RadicalQExp::make(c.base.clone(), c.index, c.power as i64 * r, s).to_rational()
    }
}

/// A, B, C, E for a level, each known through at least O(q^order).
pub fn generators(level: Level, order: usize) -> Result<GeneratorSet> {
    let m = order + MARGIN;
    let et = eta(m);
    let et_n = |n: i64| scale_argument(&et, &qi(n));
    let two = qi(2);
    let (a, b, c) = match level {
        Level::One => {
            let e4 = eisenstein(4, m)?;
            let e6 = eisenstein(6, m)?;
            let e4_32 = e4.nth_root(2)?.powi(3)?;
            let a = e4.nth_root(4)?;
            let b = root_with_radical(&e4_32.add(&e6).scale(&two.recip()), 6)?.to_rational()?;
            let c = root_with_radical(&e4_32.sub(&e6).scale(&two.recip()), 6)?;
            (a, b, c)
        }
        Level::Two => {
            let e2t = et_n(2)?;
            let s = e2t.powi(24)?.scale(&qi(64)).add(&et.powi(24)?);
            let a = s.nth_root(4)?.div(&et.powi(2)?.mul(&e2t.powi(2)?))?;
            let b = et.powi(4)?.div(&e2t.powi(2)?)?;
            let c = RadicalQExp::make(qi(8), 2, 1, e2t.powi(4)?.div(&et.powi(2)?)?);
            (a, b, c)
        }
        Level::Three => {
            let e3t = et_n(3)?;
            let s = e3t.powi(12)?.scale(&qi(27)).add(&et.powi(12)?);
            let a = s.nth_root(3)?.div(&et.mul(&e3t))?;
            let b = et.powi(3)?.div(&e3t)?;
            let c = RadicalQExp::rational(e3t.powi(3)?.div(&et)?.scale(&qi(3)));
            (a, b, c)
        }
        Level::Four => {
            let e2t = et_n(2)?;
            let e4t = et_n(4)?;
            let s = e4t.powi(8)?.scale(&qi(16)).add(&et.powi(8)?);
            let a = s.nth_root(2)?.div(&e2t.powi(2)?)?;
            let alt = e2t.powi(10)?.div(&et.powi(4)?.mul(&e4t.powi(4)?))?;
            if !a.sub(&alt).vanishes_to(&qi(order as i64)) {
                return Err(Error::Mismatch("the two eta expressions for A at level 4 differ".into()));
            }
            let b = et.powi(4)?.div(&e2t.powi(2)?)?;
            let c = RadicalQExp::rational(e4t.powi(4)?.div(&e2t.powi(2)?)?.scale(&qi(4)));
            (a, b, c)
        }
    };
    let r = level.r() as i64;
    let bc = b.powi(r)?.mul(&c.series.powi(r)?);
    let e = bc.theta().div(&bc)?;
    let set = GeneratorSet { level, working_order: m, a, b, c, e };
    let need = qi(order as i64);
    for (name, p) in [("A", set.a.precision()), ("B", set.b.precision()), ("C", set.c.series.precision()), ("E", set.e.precision())] {
        if p < need {
            return Err(Error::Precision(format!("generator {name} known only through q^{}", fmt_q(&p))));
        }
    }
    Ok(set)
}

/// One checked identity: the residual must vanish through O(q^order).
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub verified_through: String,
    pub holds: bool,
    /// Leading nonzero residual term, if any.
    pub first_defect: Option<String>,
}

pub fn check_zero(name: &str, resid: &QExpansion, order: usize) -> IdentityCheck {
    let need = qi(order as i64);
    let enough = resid.precision() >= need;
    let trunc = resid.truncate_to(&need);
    let first = trunc.terms().into_iter().next().map(|(e, c)| format!("{} q^{}", fmt_q(&c), fmt_q(&e)));
    IdentityCheck {
        name: name.into(),
        verified_through: fmt_q(&resid.precision().min(need)),
        holds: enough && first.is_none(),
        first_defect: if enough { first } else { Some(format!("known only through q^{}", fmt_q(&resid.precision()))) },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RingReport {
    pub level: String,
    pub order: usize,
    pub c_prefactor: String,
    pub checks: Vec<IdentityCheck>,
}

impl RingReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Residuals of the differential relations and of A^r = B^r + C^r.
pub fn verify_differential_ring(level: Level, order: usize) -> Result<RingReport> {
    let g = generators(level, order)?;
    let r = g.r() as i64;
    let k = q(1, 2 * r);
    let a2 = g.a.powi(2)?;
    let br = g.b.powi(r)?;
    let cr = g.c_pow_r()?;
    let ar = g.a.powi(r)?;
    let mut checks = Vec::new();
    checks.push(check_zero("A^r - B^r - C^r", &ar.sub(&br).sub(&cr), order));
    let da = g.a.theta().sub(&g.a.mul(&g.e.add(&cr.sub(&br).div(&g.a.powi(r - 2)?)?)).scale(&k));
    checks.push(check_zero("dA - A(E + (C^r - B^r)/A^(r-2))/2r", &da, order));
    let db = g.b.theta().sub(&g.b.mul(&g.e.sub(&a2)).scale(&k));
    checks.push(check_zero("dB - B(E - A^2)/2r", &db, order));
    let cs = &g.c.series;
    let dc = cs.theta().sub(&cs.mul(&g.e.add(&a2)).scale(&k));
    checks.push(check_zero("dC - C(E + A^2)/2r", &dc, order));
    let de = g.e.theta().sub(&g.e.powi(2)?.sub(&a2.powi(2)?).scale(&k));
    checks.push(check_zero("dE - (E^2 - A^4)/2r", &de, order));
    Ok(RingReport { level: level.to_string(), order, c_prefactor: g.c.describe_prefactor(), checks })
}

/// Classical identities among Eisenstein series, eta and theta constants.
pub fn verify_classical(order: usize) -> Result<Vec<IdentityCheck>> {
    let m = order + MARGIN;
    let e2 = eisenstein(2, m)?;
    let e4 = eisenstein(4, m)?;
    let e6 = eisenstein(6, m)?;
    let twelve = q(1, 12);
    let mut out = Vec::new();
    out.push(check_zero("dE2 - (E2^2 - E4)/12", &e2.theta().sub(&e2.powi(2)?.sub(&e4).scale(&twelve)), order));
    out.push(check_zero("dE4 - (E2 E4 - E6)/3", &e4.theta().sub(&e2.mul(&e4).sub(&e6).scale(&q(1, 3))), order));
    out.push(check_zero("dE6 - (E2 E6 - E4^2)/2", &e6.theta().sub(&e2.mul(&e6).sub(&e4.powi(2)?).scale(&q(1, 2))), order));
    let delta = e4.powi(3)?.sub(&e6.powi(2)?).scale(&q(1, 1728));
    let et = eta(m);
    out.push(check_zero("(E4^3 - E6^2)/1728 - eta^24", &delta.sub(&et.powi(24)?), order));
    out.push(check_zero("d log eta - E2/24", &et.theta().div(&et)?.sub(&e2.scale(&q(1, 24))), order));
    let (t2, t3, t4) = (theta2(m), theta3(m), theta4(m));
    out.push(check_zero("theta3^4 - theta2^4 - theta4^4", &t3.powi(4)?.sub(&t2.powi(4)?).sub(&t4.powi(4)?), order));
    let eta_half = scale_argument(&eta(2 * m), &q(1, 2))?;
    let eta2 = scale_argument(&et, &qi(2))?;
    out.push(check_zero("theta4 - eta(tau/2)^2/eta", &t4.sub(&eta_half.powi(2)?.div(&et)?), order));
    out.push(check_zero("theta2 - 2 eta(2tau)^2/eta", &t2.sub(&eta2.powi(2)?.div(&et)?.scale(&qi(2))), order));
    Ok(out)
}

/// Compares the level-2 generators with theta-constant expressions, including
/// variants of A. Returns each candidate and whether it matches.
pub fn quartic_theta_forms(order: usize) -> Result<Vec<IdentityCheck>> {
    let g = generators(Level::Two, order)?;
    let m = order + MARGIN;
    let (t2, t3, t4) = (theta2(m), theta3(m), theta4(m));
    let two = qi(2);
    let t2_2 = scale_argument(&t2, &two)?;
    let t3_2 = scale_argument(&t3, &two)?;
    let t4_2 = scale_argument(&t4, &two)?;
    let e2 = eisenstein(2, m)?;
    let e2_2 = scale_argument(&e2, &two)?;
    let mut out = vec![check_zero("B - theta4(2tau)^2", &g.b.sub(&t4_2.powi(2)?), order)];
    // C carries sqrt(8): compare C^4 = 64 (C/sqrt 8)^4 with theta2^8/4
    out.push(check_zero("C^4 - theta2^8/4", &g.c_pow_r()?.sub(&t2.powi(8)?.scale(&q(1, 4))), order));
    out.push(check_zero("E - (2 E2(2tau) + E2)/3", &g.e.sub(&e2_2.scale(&two).add(&e2).scale(&q(1, 3))), order));
    out.push(check_zero("A - (theta2 + theta3)^(1/2)", &g.a.sub(&t2.add(&t3).nth_root(2)?), order));
    out.push(check_zero("A - (theta2(2tau)^4 + theta3(2tau)^4)^(1/2)", &g.a.sub(&t2_2.powi(4)?.add(&t3_2.powi(4)?).nth_root(2)?), order));
    out.push(check_zero("A - ((theta3^4 + theta4^4)/2)^(1/2)", &g.a.sub(&t3.powi(4)?.add(&t4.powi(4)?).scale(&q(1, 2)).nth_root(2)?), order));
    Ok(out)
}

/// Checks the level-4 generators against theta constants of 2 tau.
pub fn level4_theta_forms(order: usize) -> Result<Vec<IdentityCheck>> {
    let g = generators(Level::Four, order)?;
    let m = order + MARGIN;
    let two = qi(2);
    let t3_2 = scale_argument(&theta3(m), &two)?;
    let t4_2 = scale_argument(&theta4(m), &two)?;
    let et = eta(m);
    let e2t = scale_argument(&et, &two)?;
    let e4t = scale_argument(&et, &qi(4))?;
    Ok(vec![
        check_zero("A - theta3(2tau)^2", &g.a.sub(&t3_2.powi(2)?), order),
        check_zero("B - theta4(2tau)^2", &g.b.sub(&t4_2.powi(2)?), order),
        check_zero("A - eta(2tau)^10/(eta^4 eta(4tau)^4)", &g.a.sub(&e2t.powi(10)?.div(&et.powi(4)?.mul(&e4t.powi(4)?))?), order),
    ])
}

/// Value at tau, failing if the tail estimate is above `max_tail_log10`.
pub fn eval_numeric(f: &QExpansion, tau: &MpComplex, max_tail_log10: f64) -> Result<Evaluated> {
    if tau.im.is_negative() || tau.im.is_zero() {
        return Err(Error::Numeric("tau must lie in the upper half-plane".into()));
    }
    let v = numeric::eval_qexp(f, tau);
    if v.tail_log10 > max_tail_log10 {
        return Err(Error::Numeric(format!("truncation tail ~1e{:.1} exceeds tolerance 1e{max_tail_log10:.1}", v.tail_log10)));
    }
    Ok(v)
}

/// E2(tau) - 3/(pi Im tau).
pub fn e2_hat(order: usize, tau: &MpComplex) -> Result<Evaluated> {
    let e2 = eisenstein(2, order)?;
    let v = numeric::eval_qexp(&e2, tau);
    let p = tau.prec();
    let corr = astro_float::BigFloat::from_u64(3, 64).div(&mp::bf_pi(p).mul(&tau.im, p, mp::RM), p, mp::RM);
    Ok(Evaluated { value: v.value.sub(&MpComplex::from_real(corr)), tail_log10: v.tail_log10 })
}

/// Expressions over A, B, C, E.
#[derive(Clone, Debug)]
struct GenValue(RadicalQExp);

impl Algebra for GenValue {
    type Ctx = GeneratorSet;

    fn constant(g: &GeneratorSet, c: &BigQ) -> Result<Self> {
        Ok(GenValue(RadicalQExp::rational(QExpansion::constant(c.clone(), g.working_order))))
    }

    fn symbol(g: &GeneratorSet, name: &str, offset: usize) -> Result<Self> {
        Ok(GenValue(match name {
            "A" => RadicalQExp::rational(g.a.clone()),
            "B" => RadicalQExp::rational(g.b.clone()),
            "C" => g.c.clone(),
            "E" => RadicalQExp::rational(g.e.clone()),
            _ => return Err(Error::Parse { offset, message: format!("unknown symbol '{name}'; use A, B, C, E") }),
        }))
    }

    fn add(&self, o: &Self) -> Result<Self> {
        let (a, b) = (&self.0, &o.0);
        if a.series.is_zero() {
            return Ok(o.clone());
        }
        if a.power != b.power && !b.series.is_zero() {
            return Err(Error::Invalid("sum of terms with different radical factors".into()));
        }
        Ok(GenValue(RadicalQExp { series: a.series.add(&b.series), ..a.clone() }))
    }

    fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg()?)
    }

    fn mul(&self, o: &Self) -> Result<Self> {
        let (a, b) = (&self.0, &o.0);
        let (base, index) = if a.power != 0 { (a.base.clone(), a.index) } else { (b.base.clone(), b.index) };
        Ok(GenValue(RadicalQExp::make(base, index, (a.power + b.power) as i64, a.series.mul(&b.series))))
    }

    fn div(&self, o: &Self, _: usize) -> Result<Self> {
        self.mul(&o.pow(-1)?)
    }

    fn neg(&self) -> Result<Self> {
        Ok(GenValue(RadicalQExp { series: self.0.series.neg(), ..self.0.clone() }))
    }

    fn pow(&self, e: i64) -> Result<Self> {
        let a = &self.0;
        Ok(GenValue(RadicalQExp::make(a.base.clone(), a.index, a.power as i64 * e, a.series.powi(e)?)))
    }
}

/// Evaluates an expression such as `4*B^4*(A^4-B^4)/A^8` as a q-expansion.
pub fn eval_expression(g: &GeneratorSet, src: &str) -> Result<RadicalQExp> {
    let e = dsl::parse(src)?;
    Ok(dsl::eval::<GenValue>(&e, g)?.0)
}
