use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{inverse_square, rational_strings, PermutationOracle, Provenance, SeriesError, SeriesTruncation};
use crate::numberings::KOrderTable;

/// `c_n = 1 / (sigma^n(k))^2` for `n = 1..=horizon`.
pub fn psi_perm<P: PermutationOracle + ?Sized>(sigma: &P, k: u64, horizon: usize) -> Result<SeriesTruncation, SeriesError> {
    let mut x = k;
    let mut coefficients = Vec::with_capacity(horizon);
    for n in 1..=horizon {
        x = sigma.apply(x).ok_or(SeriesError::OrbitUndefined { k, n: n as i64 })?;
        coefficients.push(inverse_square(x));
    }
    Ok(SeriesTruncation { start: 1, coefficients, provenance: Provenance::PsiPerm { k } })
}

/// `constant * z^power / (1 - z^period)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormTerm {
    #[serde(with = "rational_strings::one")]
    pub constant: BigRational,
    pub power: usize,
    pub period: usize,
}

/// A finite sum of geometric terms; every pole is simple and sits at a root
/// of unity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalClosedForm {
    pub k: u64,
    pub terms: Vec<ClosedFormTerm>,
}

impl RationalClosedForm {
    /// Coefficients of `z^1..=z^horizon`.
    pub fn expand(&self, horizon: usize) -> SeriesTruncation {
        let mut coefficients = vec![BigRational::zero(); horizon];
        for t in &self.terms {
            for n in (t.power..=horizon).step_by(t.period.max(1)).filter(|&n| n >= 1) {
                coefficients[n - 1] += &t.constant;
            }
        }
        let period = self.terms.iter().map(|t| t.period).max().unwrap_or(0);
        SeriesTruncation { start: 1, coefficients, provenance: Provenance::ClosedForm { k: self.k, period } }
    }

    /// Exact value at a rational point inside the unit disk.
    pub fn eval(&self, z: &BigRational) -> Option<BigRational> {
        if z.abs() >= BigRational::one() {
            return None;
        }
        Some(self.terms.iter().map(|t| &t.constant * pow(z, t.power) / (BigRational::one() - pow(z, t.period))).sum())
    }
}

fn pow(z: &BigRational, e: usize) -> BigRational {
    num_traits::pow(z.clone(), e)
}

/// Closed form of `psi_perm` for a finite orbit: with period `L` and orbit
/// values `v_a = sigma^a(k)`, the sum of `z^a / (v_a^2 (1 - z^L))`.
pub fn finite_orbit_rational<P: PermutationOracle + ?Sized>(sigma: &P, k: u64, window: usize) -> Result<RationalClosedForm, SeriesError> {
    let mut values = Vec::new();
    let mut x = k;
    for n in 1..=window {
        x = sigma.apply(x).ok_or(SeriesError::OrbitUndefined { k, n: n as i64 })?;
        values.push(x);
        if x == k {
            let period = values.len();
            let terms = values.iter().enumerate().map(|(i, &v)| ClosedFormTerm { constant: inverse_square(v), power: i + 1, period }).collect();
            return Ok(RationalClosedForm { k, terms });
        }
    }
    Err(SeriesError::InfiniteOrbitWithinWindow { k, window })
}

/// A power series known only at scattered exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseSeries {
    #[serde(with = "rational_strings::one")]
    pub constant: BigRational,
    #[serde(with = "rational_strings::map")]
    pub terms: BTreeMap<u64, BigRational>,
}

/// `Phi(k, sigma; z) = 1/k^2 + sum_n z^{K(n)} / (sigma_K^n(k))^2` for
/// `n = 1..=horizon`, where `sigma_K = K sigma K^{-1}`.
pub fn phi_korder<P: PermutationOracle + ?Sized>(sigma: &P, k: u64, korder: &KOrderTable, horizon: usize) -> Result<SparseSeries, SeriesError> {
    let points = korder_orbit(sigma, k, korder, horizon)?;
    let terms = points.iter().map(|&(exp, v)| (exp, inverse_square(v))).collect();
    Ok(SparseSeries { constant: inverse_square(k), terms })
}

/// `(K(n), sigma_K^n(k))` for `n = 1..=horizon`.
fn korder_orbit<P: PermutationOracle + ?Sized>(sigma: &P, k: u64, korder: &KOrderTable, horizon: usize) -> Result<Vec<(u64, u64)>, SeriesError> {
    let outside = |what: String| SeriesError::OutsideCertifiedPrefix(what);
    let mut x = korder.element(k).ok_or_else(|| outside(format!("K^-1({k})")))?;
    let mut out = Vec::with_capacity(horizon);
    for n in 1..=horizon as u64 {
        x = sigma.apply(x).ok_or(SeriesError::OrbitUndefined { k, n: n as i64 })?;
        let v = korder.rank(x).ok_or_else(|| outside(format!("K({x}) at step {n}")))?;
        let exp = korder.rank(n).ok_or_else(|| outside(format!("K({n})")))?;
        out.push((exp, v));
    }
    Ok(out)
}

/// Tightest `c1, c2` with `c1 K(n) <= sigma_K^n(k) <= c2 K(n)` on a window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KBoundReport {
    pub k: u64,
    pub points: usize,
    #[serde(with = "rational_strings::one")]
    pub c1: BigRational,
    #[serde(with = "rational_strings::one")]
    pub c2: BigRational,
}

pub fn korder_bounds<P: PermutationOracle + ?Sized>(sigma: &P, k: u64, korder: &KOrderTable, horizon: usize) -> Result<KBoundReport, SeriesError> {
    let points = korder_orbit(sigma, k, korder, horizon)?;
    let ratios: Vec<BigRational> = points.iter().map(|&(exp, v)| BigRational::new(BigInt::from(v), BigInt::from(exp))).collect();
    let c1 = ratios.iter().min().cloned().unwrap_or_else(BigRational::zero);
    let c2 = ratios.iter().max().cloned().unwrap_or_else(BigRational::zero);
    Ok(KBoundReport { k, points: points.len(), c1, c2 })
}
