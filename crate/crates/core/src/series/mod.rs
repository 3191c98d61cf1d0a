//! Generating series attached to programs and permutations: the halting
//! series `Psi`, its inversion, the translation permutation `tau_f`,
//! bounded shifts, closed forms for finite orbits and the K-ordered `Phi`.

mod classify;
mod orbit;
mod perm;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{run, BudgetPolicy, EvalOutcome, MachineError, Program};

pub use classify::{classify_series, classify_sparse, ClassifyOptions, Classification, Verdict};
pub use orbit::{finite_orbit_rational, korder_bounds, phi_korder, psi_perm, ClosedFormTerm, KBoundReport, RationalClosedForm, SparseSeries};
pub use perm::{
    bounded_shift_estimate, from_signed, to_signed, FinitePermutation, IntegerTranslation, PermutationOracle, ShiftBoundEstimate, ShiftPermutation,
    ShiftVerdict, Tau,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("halting status of {0} is not certified")]
    UncertifiedInput(u64),
    #[error("malformed series: {0}")]
    MalformedSeries(String),
    #[error("no repetition in the orbit of {k} within {window} steps")]
    InfiniteOrbitWithinWindow { k: u64, window: usize },
    #[error("orbit of {k} leaves the domain at step {n}")]
    OrbitUndefined { k: u64, n: i64 },
    #[error("outside the certified prefix: {0}")]
    OutsideCertifiedPrefix(String),
    #[error("inconclusive: {reason}")]
    Inconclusive { reason: String, abel_partial_sum: f64 },
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Certified status of a program at one input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FnValue {
    Defined { value: u64 },
    Diverges,
    /// Halted with output 0, which is not a positive natural; treated as
    /// outside the domain, like divergence.
    ZeroOutput,
    Uncertified,
}

/// `f` extended by zero off its domain: `bar_f(x) = f(x)` where `f` halts
/// with a positive value, `0` where it certifiably does not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedFn {
    pub program: Program,
    pub policy: BudgetPolicy,
}

impl ExtendedFn {
    pub fn new(program: Program, policy: BudgetPolicy) -> ExtendedFn {
        ExtendedFn { program, policy }
    }

    pub fn status(&self, x: u64) -> Result<FnValue, SeriesError> {
        Ok(match run(&self.program, x, self.policy.step_budget, self.policy.space_budget)? {
            EvalOutcome::Halted { value: 0, .. } => FnValue::ZeroOutput,
            EvalOutcome::Halted { value, .. } => FnValue::Defined { value },
            EvalOutcome::ProvenDivergent { .. } => FnValue::Diverges,
            EvalOutcome::Unknown { .. } => FnValue::Uncertified,
        })
    }

    pub fn bar_f(&self, x: u64) -> Result<u64, SeriesError> {
        match self.status(x)? {
            FnValue::Defined { value } => Ok(value),
            FnValue::Diverges | FnValue::ZeroOutput => Ok(0),
            FnValue::Uncertified => Err(SeriesError::UncertifiedInput(x)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Psi { k: u64, bar_f: u64 },
    PsiPerm { k: u64 },
    ClosedForm { k: u64, period: usize },
    Other { label: String },
}

/// Exact coefficients `c_start, ..., c_horizon` of a power series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    pub start: usize,
    #[serde(with = "rational_strings")]
    pub coefficients: Vec<BigRational>,
    pub provenance: Provenance,
}

impl SeriesTruncation {
    pub fn horizon(&self) -> usize {
        (self.start + self.coefficients.len()).saturating_sub(1)
    }

    /// Coefficient of `z^n`, zero below the start.
    pub fn coeff(&self, n: usize) -> Option<&BigRational> {
        n.checked_sub(self.start).and_then(|i| self.coefficients.get(i))
    }

    /// Partial sum at a real point, for diagnostics.
    pub fn eval_f64(&self, z: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * z + to_f64(c)) * z.powi(self.start as i32)
    }
}

pub(crate) fn to_f64(q: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

pub(crate) fn inverse_square(v: u64) -> BigRational {
    let v = BigInt::from(v);
    BigRational::new(BigInt::one(), &v * &v)
}

/// `c_n = 1 / (1 + n bar_f(k))^2` for `n = 0..=horizon`.
pub fn psi_coeffs(ef: &ExtendedFn, k: u64, horizon: usize) -> Result<SeriesTruncation, SeriesError> {
    let f = ef.bar_f(k)?;
    Ok(psi_coeffs_for_value(k, f, horizon))
}

/// The same series from a known value of `bar_f(k)`.
pub fn psi_coeffs_for_value(k: u64, bar_f: u64, horizon: usize) -> SeriesTruncation {
    let f = BigInt::from(bar_f);
    let coefficients = (0..=horizon)
        .map(|n| {
            let d = BigInt::one() + &f * BigInt::from(n);
            BigRational::new(BigInt::one(), &d * &d)
        })
        .collect();
    SeriesTruncation { start: 0, coefficients, provenance: Provenance::Psi { k, bar_f } }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Reconstruction {
    Value { value: u64 },
    Diverges,
}

/// Recovers `f(k) = sqrt(1 / c_1) - 1` exactly.
pub fn reconstruct_f(s: &SeriesTruncation) -> Result<Reconstruction, SeriesError> {
    let malformed = |m: &str| Err(SeriesError::MalformedSeries(m.to_string()));
    if s.start != 0 {
        return malformed("series must start at z^0");
    }
    match s.coefficients.first() {
        Some(c0) if c0.is_one() => {}
        Some(_) => return malformed("c_0 is not 1"),
        None => return malformed("empty series"),
    }
    let Some(c1) = s.coefficients.get(1) else {
        return malformed("horizon below 1");
    };
    if c1.is_one() {
        return if s.coefficients.iter().all(One::is_one) { Ok(Reconstruction::Diverges) } else { malformed("c_1 = 1 but the series is not constant") };
    }
    if !c1.is_positive() || !c1.numer().is_one() {
        return malformed("1/c_1 is not a natural");
    }
    let inv = c1.denom().magnitude().clone();
    let root: BigUint = inv.sqrt();
    if &root * &root != inv {
        return malformed("1/c_1 is not a perfect square");
    }
    let value = num_traits::ToPrimitive::to_u64(&(root - 1u32)).ok_or_else(|| SeriesError::MalformedSeries("value exceeds u64".into()))?;
    Ok(Reconstruction::Value { value })
}

/// Serializes rationals as `{"num": "...", "den": "..."}`.
pub(crate) mod rational_strings {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Fraction {
        num: String,
        den: String,
    }

    fn to_fraction(q: &BigRational) -> Fraction {
        Fraction { num: q.numer().to_string(), den: q.denom().to_string() }
    }

    fn from_fraction<E: serde::de::Error>(f: Fraction) -> Result<BigRational, E> {
        let num: BigInt = f.num.parse().map_err(E::custom)?;
        let den: BigInt = f.den.parse().map_err(E::custom)?;
        if den.is_zero() {
            return Err(E::custom("zero denominator"));
        }
        Ok(BigRational::new(num, den))
    }

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(to_fraction))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<Fraction>::deserialize(d)?.into_iter().map(from_fraction).collect()
    }

    pub mod one {
        use super::*;

        pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
            to_fraction(v).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
            from_fraction(Fraction::deserialize(d)?)
        }
    }

    pub mod map {
        use super::*;
        use std::collections::BTreeMap;

        pub fn serialize<K: ToString, S: Serializer>(v: &BTreeMap<K, BigRational>, s: S) -> Result<S::Ok, S::Error> {
            s.collect_map(v.iter().map(|(k, q)| (k.to_string(), to_fraction(q))))
        }

        pub fn deserialize<'de, K, D>(d: D) -> Result<BTreeMap<K, BigRational>, D::Error>
        where
            K: Ord + std::str::FromStr,
            K::Err: std::fmt::Display,
            D: Deserializer<'de>,
        {
            BTreeMap::<String, Fraction>::deserialize(d)?
                .into_iter()
                .map(|(k, f)| Ok((k.parse().map_err(D::Error::custom)?, from_fraction(f)?)))
                .collect()
        }
    }
}
