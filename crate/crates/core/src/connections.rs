//! Oper and non-abelian Hodge connection matrices for the presets, the gauge
//! transformation relating them, the differential-ring relations among K, G and the
//! operator coefficients, and their numeric verification at sample points.
//!
//! Matrix convention: a connection `d + M du + M' dū` acts on a frame `e` by
//! `∇ e_j = sum_i e_i M_ij`. Entries are scalar coefficients of `du` and `dū`.
//! The GM frame is `(ω₀, ℏ∇ω₀, ℏ²∇²ω₀)` and the NAH frame `(ω₀, ℏφω₀, ℏ²φ²ω₀)`;
//! with `N = (A^ℏ)^{-1}` the GM frame equals the NAH frame times `N^{-1}`.

use astro_float::BigFloat;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_algebra::mp::{self, MpComplex, RM};
use crate::exact_algebra::rational::{BigQ, fmt_q, parse_rational, pow_i, q, qi};
use crate::exact_algebra::{PowerSeries, QExpansion, RatFunc};
use crate::numeric;
use crate::pf_operator::PFOperator;
use crate::presets;
use crate::qforms::{self, Level};

/// Highest total derivative order carried in the local jets.
const JET: usize = 5;

/// Geometric data attached to a bundled operator.
#[derive(Clone, Debug)]
pub struct ExamplePreset {
    pub name: String,
    pub op: PFOperator,
    pub level: Level,
    /// Weight w = rank - 1.
    pub weight: u32,
    /// `e^{-K} = kappa |pi0|^2 (Im tau)^w`.
    pub kahler_coefficient: BigQ,
    pub map_expr: String,
    pub period_expr: String,
}

impl ExamplePreset {
    pub fn load(name: &str) -> Result<Self> {
        let doc = presets::document(name)?;
        let m = doc.mirror.clone().ok_or_else(|| Error::Unsupported(format!("preset '{name}' has no modular data")))?;
        let op = doc.to_operator()?;
        let r = op.rank();
        if !(2..=3).contains(&r) {
            return Err(Error::Unsupported(format!("connection data for rank {r}")));
        }
        let kappa = match &m.kahler_coefficient {
            Some(s) => parse_rational(s).ok_or_else(|| Error::Invalid(format!("bad Kähler coefficient '{s}'")))?,
            None => BigQ::one(),
        };
        Ok(ExamplePreset {
            name: doc.name.clone(),
            level: Level::parse(&m.level)?,
            weight: (r - 1) as u32,
            kahler_coefficient: kappa,
            map_expr: m.map,
            period_expr: m.period,
            op,
        })
    }

    pub fn rank(&self) -> usize {
        self.op.rank()
    }

    pub fn kahler_formula(&self) -> String {
        let w = self.weight;
        let im = if w == 1 { "Im(tau)".to_string() } else { format!("Im(tau)^{w}") };
        format!("e^(-K) = {} |{}|^2 {}", fmt_q(&self.kahler_coefficient), self.period_expr, im)
    }

    /// Names of presets carrying modular data.
    pub fn available() -> Vec<&'static str> {
        presets::names().into_iter().filter(|n| ExamplePreset::load(n).is_ok()).collect()
    }
}

/// Truncated bivariate Taylor expansion in `(δu, δū)` of total degree at most `deg`.
/// Coefficient `(a, b)` multiplies `δu^a δū^b`.
#[derive(Clone, Debug)]
pub struct Jet2 {
    deg: usize,
    p: usize,
    c: Vec<MpComplex>,
}

impl Jet2 {
    fn idx(&self, a: usize, b: usize) -> usize {
        a * (self.deg + 1) + b
    }

    pub fn zero(deg: usize, p: usize) -> Self {
        Jet2 { deg, p, c: vec![MpComplex::zero(p); (deg + 1) * (deg + 1)] }
    }

    pub fn constant(x: &MpComplex, deg: usize) -> Self {
        let mut j = Self::zero(deg, x.prec());
        j.c[0] = x.clone();
        j
    }

    /// From Taylor coefficients of a holomorphic function of δu.
    pub fn from_hol(t: &[MpComplex], deg: usize, p: usize) -> Self {
        let mut j = Self::zero(deg, p);
        for (a, x) in t.iter().enumerate().take(deg + 1) {
            let i = j.idx(a, 0);
            j.c[i] = x.clone();
        }
        j
    }

    /// The conjugate function, a series in δū.
    pub fn from_antihol(t: &[MpComplex], deg: usize, p: usize) -> Self {
        let mut j = Self::zero(deg, p);
        for (b, x) in t.iter().enumerate().take(deg + 1) {
            let i = j.idx(0, b);
            j.c[i] = x.conj();
        }
        j
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn coeff(&self, a: usize, b: usize) -> &MpComplex {
        &self.c[self.idx(a, b)]
    }

    pub fn value(&self) -> MpComplex {
        self.c[0].clone()
    }

    fn p(&self) -> usize {
        self.p
    }

    fn zip(&self, o: &Self, f: impl Fn(&MpComplex, &MpComplex) -> MpComplex) -> Self {
        let d = self.deg.min(o.deg);
        let mut out = Self::zero(d, self.p());
        for a in 0..=d {
            for b in 0..=d - a {
                let i = out.idx(a, b);
                out.c[i] = f(self.coeff(a, b), o.coeff(a, b));
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |x, y| x.add(y))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |x, y| x.sub(y))
    }

    pub fn scale(&self, s: &MpComplex) -> Self {
        Jet2 { deg: self.deg, p: self.p, c: self.c.iter().map(|x| x.mul(s)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = self.deg.min(o.deg);
        let mut out = Self::zero(d, self.p());
        for a1 in 0..=d {
            for b1 in 0..=d - a1 {
                let x = self.coeff(a1, b1);
                if x.is_zero() {
                    continue;
                }
                for a2 in 0..=d - a1 - b1 {
                    for b2 in 0..=d - a1 - b1 - a2 {
                        let y = o.coeff(a2, b2);
                        if y.is_zero() {
                            continue;
                        }
                        let i = out.idx(a1 + a2, b1 + b2);
                        out.c[i] = out.c[i].add(&x.mul(y));
                    }
                }
            }
        }
        out
    }

    /// (self / c0 - 1), nilpotent.
    fn unit_part(&self) -> Result<(MpComplex, Self)> {
        let c0 = self.value();
        let inv = c0.inv().ok_or(Error::DivisionByZero)?;
        let mut x = self.scale(&inv);
        x.c[0] = MpComplex::zero(self.p());
        Ok((c0, x))
    }

    pub fn inv(&self) -> Result<Self> {
        let (c0, x) = self.unit_part()?;
        let mut acc = Self::constant(&MpComplex::one(self.p()), self.deg);
        let mut pw = acc.clone();
        let neg_x = x.scale(&MpComplex::from_i64(-1, self.p()));
        for _ in 0..self.deg {
            pw = pw.mul(&neg_x);
            acc = acc.add(&pw);
        }
        Ok(acc.scale(&c0.inv().unwrap()))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// Principal logarithm.
    pub fn log(&self) -> Result<Self> {
        let (c0, x) = self.unit_part()?;
        let p = self.p();
        let mut acc = Self::constant(&c0.ln().ok_or(Error::DivisionByZero)?, self.deg);
        let mut pw = Self::constant(&MpComplex::one(p), self.deg);
        for n in 1..=self.deg {
            pw = pw.mul(&x);
            let s = MpComplex::from_q(&q(if n % 2 == 1 { 1 } else { -1 }, n as i64), p);
            acc = acc.add(&pw.scale(&s));
        }
        Ok(acc)
    }

    /// ∂/∂u, lowering the degree by one.
    pub fn du(&self) -> Self {
        let d = self.deg.saturating_sub(1);
        let mut out = Self::zero(d, self.p());
        for a in 0..=d {
            for b in 0..=d - a {
                let i = out.idx(a, b);
                out.c[i] = self.coeff(a + 1, b).mul(&MpComplex::from_i64((a + 1) as i64, self.p()));
            }
        }
        out
    }

    /// ∂/∂ū, lowering the degree by one.
    pub fn dubar(&self) -> Self {
        let d = self.deg.saturating_sub(1);
        let mut out = Self::zero(d, self.p());
        for a in 0..=d {
            for b in 0..=d - a {
                let i = out.idx(a, b);
                out.c[i] = self.coeff(a, b + 1).mul(&MpComplex::from_i64((b + 1) as i64, self.p()));
            }
        }
        out
    }
}

/// Square complex matrices.
pub type CMat = Vec<Vec<MpComplex>>;

pub fn mat_zero(r: usize, p: usize) -> CMat {
    vec![vec![MpComplex::zero(p); r]; r]
}

pub fn mat_identity(r: usize, p: usize) -> CMat {
    let mut m = mat_zero(r, p);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = MpComplex::one(p);
    }
    m
}

fn mat_prec(a: &CMat) -> usize {
    a.iter().flatten().map(MpComplex::prec).max().unwrap_or(64)
}

pub fn mat_mul(a: &CMat, b: &CMat) -> CMat {
    let r = a.len();
    let p = mat_prec(a).max(mat_prec(b));
    let mut out = mat_zero(r, p);
    for i in 0..r {
        for j in 0..r {
            let mut acc = MpComplex::zero(p);
            for k in 0..r {
                if !a[i][k].is_zero() && !b[k][j].is_zero() {
                    acc = acc.add(&a[i][k].mul(&b[k][j]));
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn mat_sub(a: &CMat, b: &CMat) -> CMat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.sub(v)).collect()).collect()
}

pub fn mat_add(a: &CMat, b: &CMat) -> CMat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.add(v)).collect()).collect()
}

pub fn mat_scale(a: &CMat, s: &MpComplex) -> CMat {
    a.iter().map(|x| x.iter().map(|u| u.mul(s)).collect()).collect()
}

pub fn mat_conj_transpose(a: &CMat) -> CMat {
    let r = a.len();
    (0..r).map(|i| (0..r).map(|j| a[j][i].conj()).collect()).collect()
}

/// Gauss-Jordan with partial pivoting.
pub fn mat_inv(a: &CMat) -> Result<CMat> {
    let r = a.len();
    let p = mat_prec(a);
    let mut m = a.clone();
    let mut inv = mat_identity(r, p);
    for col in 0..r {
        let piv = (col..r)
            .max_by(|&i, &j| m[i][col].log10_abs().partial_cmp(&m[j][col].log10_abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap();
        if m[piv][col].is_zero() {
            return Err(Error::Numeric("singular matrix".into()));
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col].inv().unwrap();
        for j in 0..r {
            m[col][j] = m[col][j].mul(&d);
            inv[col][j] = inv[col][j].mul(&d);
        }
        for i in 0..r {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..r {
                    m[i][j] = m[i][j].sub(&f.mul(&m[col][j]));
                    inv[i][j] = inv[i][j].sub(&f.mul(&inv[col][j]));
                }
            }
        }
    }
    Ok(inv)
}

/// Largest entry modulus.
pub fn mat_norm(a: &CMat) -> f64 {
    a.iter().flatten().map(|x| mp::bf_to_f64(&x.abs())).fold(0.0, f64::max)
}

fn mat_f64(a: &CMat) -> Vec<Vec<(f64, f64)>> {
    a.iter().map(|row| row.iter().map(|x| x.to_f64()).collect()).collect()
}

/// A connection form at one point, in a named frame.
#[derive(Clone, Debug)]
pub struct ConnectionForm {
    pub frame: String,
    pub one_zero: CMat,
    pub zero_one: CMat,
}

impl ConnectionForm {
    pub fn rank(&self) -> usize {
        self.one_zero.len()
    }
}

/// `(1/ℏ)` times the companion matrix of the operator's d/dz coefficients at z.
///
/// The coefficients are read as the ℏ-graded ones in `(ℏ∇)^r ω = -Σ b_i (ℏ∇)^i ω`.
pub fn oper_matrix(op: &PFOperator, hbar: &MpComplex, z: &MpComplex) -> Result<ConnectionForm> {
    let r = op.rank();
    let p = z.prec().max(hbar.prec());
    let inv_h = hbar.inv().ok_or_else(|| Error::Invalid("hbar must be nonzero".into()))?;
    let a = op.to_dz_form();
    let mut m = mat_zero(r, p);
    for i in 1..r {
        m[i][i - 1] = MpComplex::one(p);
    }
    for (i, b) in a.iter().enumerate() {
        let v = b.eval_with(z).ok_or_else(|| Error::Numeric(format!("coefficient b_{i} has a pole at the sample point")))?;
        m[i][r - 1] = v.neg();
    }
    Ok(ConnectionForm { frame: "GM".into(), one_zero: mat_scale(&m, &inv_h), zero_one: mat_zero(r, p) })
}

/// Exact oper matrix at a rational point, ℏ = 1.
pub fn oper_matrix_exact(op: &PFOperator, z: &BigQ) -> Result<Vec<Vec<BigQ>>> {
    let r = op.rank();
    let a = op.to_dz_form();
    let mut m = vec![vec![BigQ::zero(); r]; r];
    for i in 1..r {
        m[i][i - 1] = BigQ::one();
    }
    for (i, b) in a.iter().enumerate() {
        m[i][r - 1] = -b.eval(z).ok_or_else(|| Error::Invalid(format!("coefficient b_{i} has a pole at {}", fmt_q(z))))?;
    }
    Ok(m)
}

/// The q-series of a preset at one truncation order, with their q d/dq derivatives.
#[derive(Clone, Debug)]
pub struct PresetSeries {
    pub preset: ExamplePreset,
    pub order: usize,
    /// theta^k of z(q), k = 0..=JET.
    pub z: Vec<QExpansion>,
    /// theta^k of pi0(q).
    pub period: Vec<QExpansion>,
}

impl PresetSeries {
    pub fn new(preset: &ExamplePreset, order: usize) -> Result<Self> {
        let g = qforms::generators(preset.level, order)?;
        let z0 = qforms::eval_expression(&g, &preset.map_expr)?.to_rational()?.truncate_to(&qi(order as i64));
        let f0 = qforms::eval_expression(&g, &preset.period_expr)?.to_rational()?.truncate_to(&qi(order as i64));
        let mut z = vec![z0];
        let mut period = vec![f0];
        for k in 0..JET {
            z.push(z[k].theta());
            period.push(period[k].theta());
        }
        Ok(PresetSeries { preset: preset.clone(), order, z, period })
    }

    /// Local geometry at tau; the precision of tau sets the working precision.
    pub fn sample(&self, tau: &MpComplex) -> Result<GeometrySample> {
        let p = tau.prec();
        mp::with_default_bits(p, || self.sample_inner(tau))
    }

    fn sample_inner(&self, tau: &MpComplex) -> Result<GeometrySample> {
        let p = tau.prec();
        if !tau.im.is_positive() {
            return Err(Error::Numeric("tau must lie in the upper half-plane".into()));
        }
        let tpi = numeric::two_pi_i(p);
        let mut tail = f64::NEG_INFINITY;
        let mut derivs = |series: &[QExpansion]| -> Vec<MpComplex> {
            let mut out = Vec::new();
            let mut fac = MpComplex::one(p);
            for (k, s) in series.iter().enumerate() {
                let v = numeric::eval_qexp(s, tau);
                tail = tail.max(v.tail_log10 + fac.log10_abs());
                out.push(v.value.mul(&fac));
                if k < series.len() - 1 {
                    fac = fac.mul(&tpi);
                }
            }
            out
        };
        let zd = derivs(&self.z);
        let fd = derivs(&self.period);
        if zd[1].is_zero() {
            return Err(Error::Numeric("dz/dtau vanishes at the sample".into()));
        }
        // Taylor coefficients in δτ
        let taylor = |d: &[MpComplex], skip0: bool| -> PowerSeries<MpComplex> {
            let mut fac = BigQ::one();
            let v: Vec<MpComplex> = d
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    if k > 0 {
                        fac /= qi(k as i64);
                    }
                    if skip0 && k == 0 { MpComplex::zero(p) } else { x.mul(&MpComplex::from_q(&fac, p)) }
                })
                .collect();
            PowerSeries::new(v, JET + 1)
        };
        let dz = taylor(&zd, true);
        let dtau = dz.reversion()?;
        let f_u = taylor(&fd, false).compose(&dtau)?;
        let mut tau_u: Vec<MpComplex> = dtau.coeffs().to_vec();
        tau_u[0] = tau.clone();

        let th = Jet2::from_hol(&tau_u, JET, p);
        let tb = Jet2::from_antihol(&tau_u, JET, p);
        let fh = Jet2::from_hol(f_u.coeffs(), JET, p);
        let fb = Jet2::from_antihol(f_u.coeffs(), JET, p);
        // Im tau = (tau - taubar) / 2i
        let half_over_i = MpComplex::from_q_pair(&BigQ::zero(), &q(-1, 2), p);
        let im = th.sub(&tb).scale(&half_over_i);
        let w = self.preset.weight as i64;
        let kappa = MpComplex::from_q(&self.preset.kahler_coefficient, p);
        let e_mk = fh.mul(&fb).mul(&pow_jet(&im, w)).scale(&kappa);
        let k = e_mk.log()?.scale(&MpComplex::from_i64(-1, p));

        let u0 = zd[0].clone();
        let b = self
            .preset
            .op
            .to_dz_form()
            .iter()
            .enumerate()
            .map(|(i, rf)| ratfunc_jet(rf, &u0, p).map_err(|_| Error::Numeric(format!("coefficient b_{i} has a pole at the sample point"))))
            .collect::<Result<Vec<_>>>()?;
        let b = b.iter().map(|s| Jet2::from_hol(s.coeffs(), JET, p)).collect();
        Ok(GeometrySample {
            preset: self.preset.name.clone(),
            rank: self.preset.rank(),
            weight: self.preset.weight,
            order: self.order,
            bits: p,
            tau: tau.clone(),
            z: u0,
            dz_dtau: zd[1].clone(),
            period: fd[0].clone(),
            tail_log10: tail,
            k,
            b,
        })
    }
}

fn pow_jet(x: &Jet2, n: i64) -> Jet2 {
    let mut acc = Jet2::constant(&MpComplex::one(x.p()), x.deg);
    for _ in 0..n {
        acc = acc.mul(x);
    }
    acc
}

/// Taylor expansion of a rational function at a complex point.
fn ratfunc_jet(f: &RatFunc, u0: &MpComplex, p: usize) -> Result<PowerSeries<MpComplex>> {
    let x = PowerSeries::new(vec![u0.clone(), MpComplex::one(p)], JET + 1);
    let horner = |c: &[BigQ]| {
        let mut acc = PowerSeries::zero(JET + 1);
        for a in c.iter().rev() {
            acc = acc.mul(&x).add(&PowerSeries::constant(MpComplex::from_q(a, p), JET + 1));
        }
        acc
    };
    let num = horner(f.num().coeffs());
    let den = horner(f.den().coeffs());
    num.div(&den)
}

/// Local geometric data at a point of the upper half-plane.
#[derive(Clone, Debug)]
pub struct GeometrySample {
    pub preset: String,
    pub rank: usize,
    pub weight: u32,
    pub order: usize,
    pub bits: usize,
    pub tau: MpComplex,
    pub z: MpComplex,
    pub dz_dtau: MpComplex,
    pub period: MpComplex,
    /// Estimated log10 of the largest neglected q-series tail.
    pub tail_log10: f64,
    /// Jet of K in (δu, δū).
    pub k: Jet2,
    /// Jets of the d/dz coefficients b_0 .. b_{r-1}.
    pub b: Vec<Jet2>,
}

impl GeometrySample {
    fn p(&self) -> usize {
        self.bits
    }

    pub fn k_u(&self) -> Jet2 {
        self.k.du()
    }

    pub fn k_uu(&self) -> Jet2 {
        self.k.du().du()
    }

    /// G = ∂_u ∂_ū K.
    pub fn metric(&self) -> Jet2 {
        self.k.du().dubar()
    }

    /// Γ = ∂_u log G.
    pub fn christoffel(&self) -> Result<Jet2> {
        Ok(self.metric().log()?.du())
    }

    /// w |dτ/du|² / (4 Im² τ), the metric from its closed form.
    pub fn metric_closed_form(&self) -> MpComplex {
        let p = self.p();
        let tu = self.dz_dtau.inv().unwrap();
        let im = MpComplex::from_real(self.tau.im.clone());
        let num = MpComplex::from_real(tu.abs2()).mul(&MpComplex::from_i64(self.weight as i64, p));
        num.div(&im.mul(&im).mul(&MpComplex::from_i64(4, p))).unwrap()
    }

    pub fn summary(&self) -> Result<SampleSummary> {
        let c = |x: MpComplex| x.to_f64();
        Ok(SampleSummary {
            preset: self.preset.clone(),
            tau: c(self.tau.clone()),
            order: self.order,
            bits: self.bits,
            z: c(self.z.clone()),
            dz_dtau: c(self.dz_dtau.clone()),
            period: c(self.period.clone()),
            k: c(self.k.value()),
            k_u: c(self.k_u().value()),
            metric: c(self.metric().value()),
            christoffel: c(self.christoffel()?.value()),
            b: self.b.iter().map(|j| c(j.value())).collect(),
            tail_log10: self.tail_log10,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleSummary {
    pub preset: String,
    pub tau: (f64, f64),
    pub order: usize,
    pub bits: usize,
    pub z: (f64, f64),
    pub dz_dtau: (f64, f64),
    pub period: (f64, f64),
    pub k: (f64, f64),
    pub k_u: (f64, f64),
    pub metric: (f64, f64),
    pub christoffel: (f64, f64),
    pub b: Vec<(f64, f64)>,
    pub tail_log10: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
}

fn residual(name: &str, x: &MpComplex) -> Residual {
    Residual { name: name.into(), value: mp::bf_to_f64(&x.abs()) }
}

/// |LHS - RHS| of the differential-ring relations at a sample. With ℏ-graded
/// coefficients `ℏ^{r-i} b_i` every ℏ cancels, so the residuals do not depend on ℏ.
pub fn verify_ring_relations(s: &GeometrySample) -> Result<Vec<Residual>> {
    let p = s.p();
    let n = |k: i64, d: i64| MpComplex::from_q(&q(k, d), p);
    let ku = s.k_u().value();
    let kuu = s.k_uu().value();
    let gam = s.christoffel()?.value();
    match s.rank {
        3 => {
            let b2 = s.b[2].value();
            let b1 = s.b[1].value();
            let db2 = s.b[2].du().value();
            let r1 = gam.sub(&ku).add(&b2.mul(&n(1, 3)));
            let rhs = ku.mul(&ku).mul(&n(1, 2)).sub(&b2.mul(&ku).mul(&n(1, 3))).sub(&b2.mul(&b2).mul(&n(1, 9))).sub(&db2.mul(&n(1, 6))).add(&b1.mul(&n(1, 2)));
            Ok(vec![residual("Gamma - K_u + b2/3", &r1), residual("dK_u - (K_u^2/2 - b2 K_u/3 - b2^2/9 - b2'/6 + b1/2)", &kuu.sub(&rhs))])
        }
        2 => {
            let b1 = s.b[1].value();
            let b0 = s.b[0].value();
            let r1 = gam.sub(&ku.mul(&n(2, 1))).add(&b1);
            let r2 = kuu.sub(&ku.mul(&ku)).add(&b1.mul(&ku)).sub(&b0);
            Ok(vec![residual("Gamma - 2 K_u + b1", &r1), residual("dK_u - K_u^2 + b1 K_u - b0", &r2)])
        }
        r => Err(Error::Unsupported(format!("ring relations for rank {r}"))),
    }
}

fn jet_mat_value(m: &[Vec<Jet2>]) -> CMat {
    m.iter().map(|r| r.iter().map(Jet2::value).collect()).collect()
}

fn jet_mat_map(m: &[Vec<Jet2>], f: impl Fn(&Jet2) -> Jet2) -> Vec<Vec<Jet2>> {
    m.iter().map(|r| r.iter().map(&f).collect()).collect()
}

/// `h^{-1}∂h` diagonal entries `jΓ - K_u` as jets.
fn chern_diagonal(s: &GeometrySample) -> Result<Vec<Jet2>> {
    let ku = s.k_u();
    let gam = s.christoffel()?;
    let p = s.p();
    Ok((0..s.rank).map(|j| gam.scale(&MpComplex::from_i64(j as i64, p)).sub(&ku)).collect())
}

/// Higgs field, its adjoint and the Chern connection in the NAH frame.
#[derive(Clone, Debug)]
pub struct NahMatrices {
    pub phi: CMat,
    pub phi_dagger: CMat,
    /// `h^{-1} φ̄ᵀ h`, for comparison with `phi_dagger`.
    pub phi_dagger_from_metric: CMat,
    pub chern: CMat,
    pub hermitian_metric: Vec<MpComplex>,
}

pub fn nah_matrices(s: &GeometrySample) -> Result<NahMatrices> {
    let r = s.rank;
    let p = s.p();
    let g = s.metric().value();
    let mut phi = mat_zero(r, p);
    let mut phi_dagger = mat_zero(r, p);
    for i in 1..r {
        phi[i][i - 1] = MpComplex::one(p);
        phi_dagger[i - 1][i] = g.clone();
    }
    // h = e^{-K} diag(1, G, G^2, ...)
    let e_mk = s.k.value().neg().exp();
    let mut h = Vec::with_capacity(r);
    let mut acc = e_mk;
    for _ in 0..r {
        h.push(acc.clone());
        acc = acc.mul(&g);
    }
    let mut hm = mat_zero(r, p);
    let mut him = mat_zero(r, p);
    for i in 0..r {
        hm[i][i] = h[i].clone();
        him[i][i] = h[i].inv().ok_or(Error::DivisionByZero)?;
    }
    let from_metric = mat_mul(&mat_mul(&him, &mat_conj_transpose(&phi)), &hm);
    let diag = chern_diagonal(s)?;
    let mut chern = mat_zero(r, p);
    for i in 0..r {
        chern[i][i] = diag[i].value();
    }
    Ok(NahMatrices { phi, phi_dagger, phi_dagger_from_metric: from_metric, chern, hermitian_metric: h })
}

/// `[D_u, D_ū] + [φ, φ†]` with `D = d + h^{-1}∂h`.
pub fn hitchin_residual(s: &GeometrySample) -> Result<CMat> {
    let n = nah_matrices(s)?;
    let diag = chern_diagonal(s)?;
    let r = s.rank;
    let mut curv = mat_zero(r, s.p());
    for i in 0..r {
        curv[i][i] = diag[i].dubar().value().neg();
    }
    let comm = mat_sub(&mat_mul(&n.phi, &n.phi_dagger), &mat_mul(&n.phi_dagger, &n.phi));
    Ok(mat_add(&curv, &comm))
}

/// The NAH connection at ζ = ℏ: `φ/ℏ + h^{-1}∂h` in du and `ℏφ†` in dū.
pub fn nah_connection(s: &GeometrySample, hbar: &MpComplex) -> Result<ConnectionForm> {
    let n = nah_matrices(s)?;
    let inv_h = hbar.inv().ok_or_else(|| Error::Invalid("hbar must be nonzero".into()))?;
    Ok(ConnectionForm {
        frame: "NAH".into(),
        one_zero: mat_add(&mat_scale(&n.phi, &inv_h), &n.chern),
        zero_one: mat_scale(&n.phi_dagger, hbar),
    })
}

fn gauge_jets(s: &GeometrySample, hbar: &MpComplex) -> Result<Vec<Vec<Jet2>>> {
    let p = s.p();
    let d = s.k.deg();
    let one = Jet2::constant(&MpComplex::one(p), d);
    let zero = Jet2::zero(d, p);
    let ku = s.k_u();
    let hj = |x: &Jet2, k: i64| x.scale(&hbar.powi(k).unwrap());
    match s.rank {
        2 => Ok(vec![vec![one.clone(), hj(&ku, 1)], vec![zero, one]]),
        3 => {
            let third = MpComplex::from_q(&q(1, 3), p);
            let b2 = &s.b[2];
            let e02 = hj(&s.k_uu().add(&b2.mul(&ku).scale(&third)), 2);
            let e12 = hj(&ku.add(&b2.scale(&third)), 1);
            Ok(vec![vec![one.clone(), hj(&ku, 1), e02], vec![zero.clone(), one.clone(), e12], vec![zero.clone(), zero, one]])
        }
        r => Err(Error::Unsupported(format!("gauge matrix for rank {r}"))),
    }
}

/// `N = (A^ℏ)^{-1}`, upper unipotent.
pub fn gauge_matrix(s: &GeometrySample, hbar: &MpComplex) -> Result<CMat> {
    Ok(jet_mat_value(&gauge_jets(s, hbar)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct GaugeReport {
    pub preset: String,
    pub tau: (f64, f64),
    pub hbar: (f64, f64),
    pub order: usize,
    pub bits: usize,
    pub tail_log10: f64,
    pub one_zero: f64,
    pub zero_one: f64,
    pub hitchin: f64,
    pub ring: Vec<Residual>,
    pub phi_dagger_agreement: f64,
    pub metric_agreement: f64,
    pub one_zero_matrix: Vec<Vec<(f64, f64)>>,
}

impl GaugeReport {
    pub fn max_residual(&self) -> f64 {
        let ring = self.ring.iter().map(|r| r.value).fold(0.0, f64::max);
        self.one_zero.max(self.zero_one).max(self.hitchin).max(ring)
    }
}

/// Residual matrices of `N ∇_NAH N^{-1}` against the GM oper, (1,0) and (0,1) parts.
pub fn gauge_residual(s: &GeometrySample, hbar: &MpComplex) -> Result<(CMat, CMat)> {
    let r = s.rank;
    let p = s.p();
    let nj = gauge_jets(s, hbar)?;
    let n = jet_mat_value(&nj);
    let dn = jet_mat_value(&jet_mat_map(&nj, Jet2::du));
    let dbn = jet_mat_value(&jet_mat_map(&nj, Jet2::dubar));
    let ninv = mat_inv(&n)?;
    let nah = nah_connection(s, hbar)?;
    // GM oper with ℏ-graded coefficients ℏ^{r-i} b_i
    let mut gm = mat_zero(r, p);
    let inv_h = hbar.inv().unwrap();
    for i in 1..r {
        gm[i][i - 1] = inv_h.clone();
    }
    for (i, b) in s.b.iter().enumerate() {
        let bi = b.value().mul(&hbar.powi((r - i) as i64).unwrap());
        gm[i][r - 1] = bi.neg().mul(&inv_h);
    }
    let r10 = mat_sub(&mat_sub(&mat_mul(&mat_mul(&n, &nah.one_zero), &ninv), &mat_mul(&dn, &ninv)), &gm);
    let r01 = mat_sub(&mat_mul(&mat_mul(&n, &nah.zero_one), &ninv), &mat_mul(&dbn, &ninv));
    Ok((r10, r01))
}

/// All numeric checks at one sample.
pub fn verify_gauge(s: &GeometrySample, hbar: &MpComplex) -> Result<GaugeReport> {
    let (r10, r01) = gauge_residual(s, hbar)?;
    let n = nah_matrices(s)?;
    let hit = hitchin_residual(s)?;
    let ring = verify_ring_relations(s)?;
    let metric_agreement = mp::bf_to_f64(&s.metric().value().sub(&s.metric_closed_form()).abs());
    Ok(GaugeReport {
        preset: s.preset.clone(),
        tau: s.tau.to_f64(),
        hbar: hbar.to_f64(),
        order: s.order,
        bits: s.bits,
        tail_log10: s.tail_log10,
        one_zero: mat_norm(&r10),
        zero_one: mat_norm(&r01),
        hitchin: mat_norm(&hit),
        ring,
        phi_dagger_agreement: mat_norm(&mat_sub(&n.phi_dagger, &n.phi_dagger_from_metric)),
        metric_agreement,
        one_zero_matrix: mat_f64(&r10),
    })
}

/// ∂_u∂_ū log G from the jets, by a five-point Laplacian in τ, and G itself.
pub fn poincare_check(series: &PresetSeries, tau: &MpComplex, step_log2: i32) -> Result<(MpComplex, MpComplex, MpComplex)> {
    let p = tau.prec();
    let s0 = series.sample(tau)?;
    let analytic = s0.christoffel()?.dubar().value();
    let hstep = BigFloat::from_u64(1, p).div(&BigFloat::from_u64(2, 64).powi(step_log2 as usize, p, RM), p, RM);
    let log_g = |t: &MpComplex| -> Result<MpComplex> { series.sample(t)?.metric().value().ln().ok_or(Error::DivisionByZero) };
    let zero = BigFloat::from_u64(0, p);
    let offsets = [
        MpComplex::new(hstep.clone(), zero.clone()),
        MpComplex::new(hstep.neg(), zero.clone()),
        MpComplex::new(zero.clone(), hstep.clone()),
        MpComplex::new(zero, hstep.neg()),
    ];
    let c = log_g(tau)?;
    let mut acc = c.mul(&MpComplex::from_i64(-4, p));
    for o in &offsets {
        acc = acc.add(&log_g(&tau.add(o))?);
    }
    let h2 = MpComplex::from_real(hstep.mul(&hstep, p, RM));
    // ∂τ∂τ̄ = Δ/4, then the chain rule |dτ/du|²
    let lap = acc.div(&h2.mul(&MpComplex::from_i64(4, p))).unwrap();
    let tu2 = MpComplex::from_real(s0.dz_dtau.inv().unwrap().abs2());
    Ok((analytic, lap.mul(&tu2), s0.metric().value()))
}

/// Outcome of the rescaling identities `g_R^{-1} φ g_R = R φ` and `g_R† h g_R = h_R`.
#[derive(Clone, Debug, Serialize)]
pub struct ConformalCheck {
    pub rank: usize,
    pub r: String,
    pub higgs_identity: bool,
    pub metric_identity: bool,
}

type QMat = Vec<Vec<BigQ>>;

fn qmat_mul(a: &QMat, b: &QMat) -> QMat {
    let r = a.len();
    (0..r).map(|i| (0..r).map(|j| (0..r).fold(BigQ::zero(), |acc, k| acc + &a[i][k] * &b[k][j])).collect()).collect()
}

fn qdiag(d: &[BigQ]) -> QMat {
    let r = d.len();
    (0..r).map(|i| (0..r).map(|j| if i == j { d[i].clone() } else { BigQ::zero() }).collect()).collect()
}

/// Exact check with `g_R = diag(1, R^{-1}, ..., R^{1-r})` and a diagonal metric `h`.
pub fn conformal_limit_check(rank: usize, r: &BigQ, h: &[BigQ]) -> Result<ConformalCheck> {
    if *r <= BigQ::zero() {
        return Err(Error::Invalid("R must be positive".into()));
    }
    if h.len() != rank {
        return Err(Error::Invalid(format!("metric has {} entries, rank is {rank}", h.len())));
    }
    let g: Vec<BigQ> = (0..rank).map(|i| pow_i(r, -(i as i64))).collect();
    let ginv: Vec<BigQ> = g.iter().map(|x| x.recip()).collect();
    let mut phi = vec![vec![BigQ::zero(); rank]; rank];
    for i in 1..rank {
        phi[i][i - 1] = BigQ::one();
    }
    let lhs = qmat_mul(&qmat_mul(&qdiag(&ginv), &phi), &qdiag(&g));
    let rphi: QMat = phi.iter().map(|row| row.iter().map(|x| x * r).collect()).collect();
    // g is real diagonal, so g† = g
    let hr = qmat_mul(&qmat_mul(&qdiag(&g), &qdiag(h)), &qdiag(&g));
    let expect: Vec<BigQ> = h.iter().enumerate().map(|(i, x)| x * pow_i(r, -2 * i as i64)).collect();
    Ok(ConformalCheck { rank, r: fmt_q(r), higgs_identity: lhs == rphi, metric_identity: hr == qdiag(&expect) })
}

/// Residual of `ℏ²∂²b₂ + 2ℏb₂∂b₂ - 3ℏ∂b₁ + (4/9)b₂³ - 2b₁b₂ + 6b₀` for a rank-3 operator.
#[derive(Clone, Debug)]
pub struct ConstraintResidual {
    pub hbar: BigQ,
    /// With the operator's d/dz coefficients used as they are.
    pub literal: RatFunc,
    /// Coefficients of ℏ⁰, ℏ¹, ℏ² in the literal residual.
    pub by_hbar_power: [RatFunc; 3],
    /// With the ℏ-graded coefficients `ℏ^{3-i} b_i`; equals ℏ³ times the ℏ = 1 residual.
    pub graded: RatFunc,
}

impl ConstraintResidual {
    pub fn is_zero(&self) -> bool {
        self.literal.is_zero()
    }
}

fn constraint_expr(b2: &RatFunc, b1: &RatFunc, b0: &RatFunc, hbar: &BigQ) -> [RatFunc; 3] {
    let db2 = b2.derivative();
    let c0 = b2.pow(3).unwrap().scale(&q(4, 9)).sub(&b1.mul(b2).scale(&qi(2))).add(&b0.scale(&qi(6)));
    let c1 = b2.mul(&db2).scale(&qi(2)).sub(&b1.derivative().scale(&qi(3))).scale(hbar);
    let c2 = db2.derivative().scale(&(hbar * hbar));
    [c0, c1, c2]
}

pub fn verify_ring_constraint(op: &PFOperator, hbar: &BigQ) -> Result<ConstraintResidual> {
    if op.rank() != 3 {
        return Err(Error::Unsupported(format!("the constraint applies to rank 3, operator has rank {}", op.rank())));
    }
    if hbar.is_zero() {
        return Err(Error::Invalid("hbar must be nonzero".into()));
    }
    let a = op.to_dz_form();
    let parts = constraint_expr(&a[2], &a[1], &a[0], &BigQ::one());
    let literal = constraint_expr(&a[2], &a[1], &a[0], hbar).iter().fold(RatFunc::zero(), |acc, x| acc.add(x));
    let g = |i: usize| a[i].scale(&pow_i(hbar, (3 - i) as i64));
    let graded = constraint_expr(&g(2), &g(1), &g(0), hbar).iter().fold(RatFunc::zero(), |acc, x| acc.add(x));
    Ok(ConstraintResidual { hbar: hbar.clone(), literal, by_hbar_power: parts, graded })
}

/// Parses values such as `2i`, `1.5i`, `3i/2`, `1/4+3i/2` or `0.25 + 1.5i`.
pub fn parse_tau(s: &str) -> Result<(BigQ, BigQ)> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Invalid(format!("cannot read '{s}' as a complex number"));
    let mut terms: Vec<String> = Vec::new();
    let mut cur = String::new();
    for (i, c) in t.chars().enumerate() {
        if (c == '+' || c == '-') && i > 0 && !cur.ends_with(['e', 'E']) {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(c);
    }
    terms.push(cur);
    let (mut re, mut im) = (BigQ::zero(), BigQ::zero());
    for term in terms {
        if term.contains('i') {
            let body = term.replacen('i', "", 1).replace('*', "");
            let body = match body.as_str() {
                "" | "+" => "1".to_string(),
                "-" => "-1".to_string(),
                b if b.starts_with('/') || b.starts_with("+/") || b.starts_with("-/") => b.replacen('/', "1/", 1),
                b => b.to_string(),
            };
            im += parse_rational(&body).ok_or_else(bad)?;
        } else {
            re += parse_rational(&term).ok_or_else(bad)?;
        }
    }
    Ok((re, im))
}

pub fn tau_value(s: &str, bits: usize) -> Result<MpComplex> {
    let (re, im) = parse_tau(s)?;
    if im <= BigQ::zero() {
        return Err(Error::Invalid(format!("tau = {s} is not in the upper half-plane")));
    }
    Ok(MpComplex::from_q_pair(&re, &im, bits))
}
