//! Degrees of the graded pieces of the parabolic Hodge bundle attached to a
//! Fuchsian operator, read off from local exponents.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_algebra::rational::{BigQ, floor, fmt_q};
use crate::pf_operator::{PFOperator, Point, PointClass};

#[derive(Clone, Debug, PartialEq)]
pub struct PointData {
    pub point: Point,
    pub class: PointClass,
    /// Ascending, repeated by multiplicity; length equals the rank.
    pub exponents: Vec<BigQ>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentTable {
    pub rank: usize,
    pub genus: u32,
    pub points: Vec<PointData>,
}

/// Singular points (`D_s`), apparent points (`D_a`) and regular points where the
/// period vanishes to a fixed order (`D_omega`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorDecomposition {
    pub singular: Vec<String>,
    pub apparent: Vec<String>,
    pub shifted: Vec<(String, i64)>,
}

impl DivisorDecomposition {
    /// |D| = |D_s| + |D_a|
    pub fn d(&self) -> i64 {
        (self.singular.len() + self.apparent.len()) as i64
    }

    /// |D_a| + |D_omega|
    pub fn d_hat_a(&self) -> i64 {
        (self.apparent.len() + self.shifted.len()) as i64
    }
}

impl ExponentTable {
    pub fn from_operator(op: &PFOperator) -> Result<Self> {
        let points = op
            .singular_points()?
            .into_iter()
            .map(|r| PointData { point: r.point, class: r.class, exponents: r.exponents })
            .collect();
        Ok(ExponentTable { rank: op.rank(), genus: op.genus, points })
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.points {
            if p.exponents.len() != self.rank {
                return Err(Error::Invalid(format!("point {} has {} exponents, rank is {}", p.point, p.exponents.len(), self.rank)));
            }
            if p.exponents.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Invalid(format!("exponents at {} are not sorted", p.point)));
            }
        }
        Ok(())
    }

    fn is_hat_a(p: &PointData) -> bool {
        matches!(p.class, PointClass::Apparent | PointClass::RegularCyclicShift(_))
    }

    fn is_s(p: &PointData) -> bool {
        matches!(p.class, PointClass::Mum | PointClass::RegularSingular)
    }

    pub fn decompose(&self) -> DivisorDecomposition {
        let mut d = DivisorDecomposition { singular: Vec::new(), apparent: Vec::new(), shifted: Vec::new() };
        for p in &self.points {
            match p.class {
                PointClass::Mum | PointClass::RegularSingular => d.singular.push(p.point.to_string()),
                PointClass::Apparent => d.apparent.push(p.point.to_string()),
                PointClass::RegularCyclicShift(k) => d.shifted.push((p.point.to_string(), k)),
                PointClass::Smooth => {}
            }
        }
        d
    }

    fn euler_term(&self) -> i64 {
        let d = self.decompose();
        d.d_hat_a() + d.d() + 2 * self.genus as i64 - 2
    }

    /// deg of the k-th graded piece, k = 0 .. r-1.
    pub fn deg_graded(&self, k: usize) -> Result<i64> {
        self.check_k(k)?;
        let s: BigInt = self.points.iter().map(|p| floor(&p.exponents[k])).sum();
        Ok(s.to_i64().unwrap() - k as i64 * self.euler_term())
    }

    pub fn deg_hodge_line(&self) -> Result<i64> {
        self.deg_graded(0)
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k >= self.rank {
            return Err(Error::Invalid(format!("graded index {k} out of range for rank {}", self.rank)));
        }
        Ok(())
    }

    /// Vanishing orders of the k-th Higgs component at each listed point, k = 0 .. r-2.
    pub fn higgs_orders(&self, k: usize) -> Result<Vec<(Point, i64)>> {
        if k + 1 >= self.rank {
            return Err(Error::Invalid(format!("Higgs index {k} out of range for rank {}", self.rank)));
        }
        Ok(self
            .points
            .iter()
            .map(|p| {
                let v = floor(&p.exponents[k + 1]) - floor(&p.exponents[k]);
                let v = v.to_i64().unwrap() - if Self::is_hat_a(p) { 1 } else { 0 };
                (p.point.clone(), v)
            })
            .collect())
    }

    /// Degree of the divisor of the k-th Higgs component.
    pub fn deg_higgs_divisor(&self, k: usize) -> Result<i64> {
        Ok(self.higgs_orders(k)?.iter().map(|(_, v)| v).sum())
    }

    /// nu_j = floor(mu_j) - mu_j, in (-1, 0].
    pub fn weights(p: &PointData) -> Vec<BigQ> {
        p.exponents.iter().map(|e| BigQ::from_integer(floor(e)) - e).collect()
    }

    pub fn parabolic_degree(&self, k: usize) -> Result<BigQ> {
        let d = BigQ::from_integer(self.deg_graded(k)?.into());
        let s: BigQ = self.points.iter().filter(|p| Self::is_s(p)).map(|p| Self::weights(p)[k].clone()).fold(BigQ::zero(), |a, b| a + b);
        Ok(d - s)
    }

    pub fn splitting_genus0(&self) -> Result<Vec<i64>> {
        if self.genus != 0 {
            return Err(Error::Invalid(format!("splitting type needs genus 0, curve has genus {}", self.genus)));
        }
        (0..self.rank).map(|k| self.deg_graded(k)).collect()
    }

    /// Points where the spread of exponents is at least 1; the degree formula is
    /// still applied there, this list only flags them.
    pub fn spread_flags(&self) -> Vec<String> {
        self.points
            .iter()
            .filter(|p| Self::is_s(p))
            .filter(|p| p.exponents.last().unwrap() - p.exponents.first().unwrap() >= BigQ::from_integer(1.into()))
            .map(|p| p.point.to_string())
            .collect()
    }

    pub fn report(&self) -> Result<ParabolicReport> {
        self.validate()?;
        let r = self.rank;
        let decomposition = self.decompose();
        let points = self
            .points
            .iter()
            .map(|p| {
                let w = Self::weights(p);
                let alphas: Vec<BigQ> = w.iter().map(|x| -x.clone()).collect();
                let mut distinct: Vec<BigQ> = alphas.clone();
                distinct.sort();
                distinct.dedup();
                let filtration = distinct
                    .iter()
                    .map(|a| FiltrationStep { weight: fmt_q(a), dimension: alphas.iter().filter(|x| *x >= a).count() })
                    .collect();
                PointReport {
                    point: p.point.to_string(),
                    class: format!("{:?}", p.class),
                    exponents: p.exponents.iter().map(fmt_q).collect(),
                    weights: w.iter().map(fmt_q).collect(),
                    filtration,
                }
            })
            .collect();
        let degrees = (0..r).map(|k| self.deg_graded(k)).collect::<Result<Vec<_>>>()?;
        let parabolic_degrees = (0..r).map(|k| self.parabolic_degree(k).map(|x| fmt_q(&x))).collect::<Result<Vec<_>>>()?;
        let higgs = (0..r.saturating_sub(1))
            .map(|k| {
                Ok(HiggsReport {
                    index: k,
                    orders: self.higgs_orders(k)?.into_iter().map(|(p, v)| (p.to_string(), v)).collect(),
                    divisor_degree: self.deg_higgs_divisor(k)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let strongly_parabolic = self.strongly_parabolic()?;
        Ok(ParabolicReport {
            rank: r,
            genus: self.genus,
            decomposition,
            points,
            degrees,
            parabolic_degrees,
            higgs,
            strongly_parabolic,
            spread_flags: self.spread_flags(),
        })
    }

    /// True when at every singular point, whenever two consecutive weights agree the
    /// corresponding Higgs component vanishes there.
    pub fn strongly_parabolic(&self) -> Result<bool> {
        for k in 0..self.rank.saturating_sub(1) {
            let orders = self.higgs_orders(k)?;
            for (p, (_, v)) in self.points.iter().zip(orders.iter()) {
                if !Self::is_s(p) {
                    continue;
                }
                let w = Self::weights(p);
                if w[k] == w[k + 1] && *v < 1 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiltrationStep {
    pub weight: String,
    pub dimension: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointReport {
    pub point: String,
    pub class: String,
    pub exponents: Vec<String>,
    pub weights: Vec<String>,
    pub filtration: Vec<FiltrationStep>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HiggsReport {
    pub index: usize,
    pub orders: Vec<(String, i64)>,
    pub divisor_degree: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParabolicReport {
    pub rank: usize,
    pub genus: u32,
    pub decomposition: DivisorDecomposition,
    pub points: Vec<PointReport>,
    pub degrees: Vec<i64>,
    pub parabolic_degrees: Vec<String>,
    pub higgs: Vec<HiggsReport>,
    pub strongly_parabolic: bool,
    pub spread_flags: Vec<String>,
}
