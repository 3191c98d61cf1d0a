use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::Algebra;

/// Laurent polynomial in `u = 1 - z` with exact rational coefficients.
/// Negative powers form the polar part.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AValue {
    #[serde(with = "crate::series::rational_strings::map")]
    terms: BTreeMap<i32, BigRational>,
}

impl AValue {
    pub fn zero() -> Self {
        AValue::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::one(), 0)
    }

    pub fn monomial(c: BigRational, exponent: i32) -> Self {
        Self::from_terms([(exponent, c)])
    }

    /// `u^-1`.
    pub fn pole() -> Self {
        Self::monomial(BigRational::one(), -1)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, BigRational)>) -> Self {
        let mut out = AValue::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    /// Rebases `sum c_n z^n` onto powers of `u` via `z = 1 - u`.
    pub fn from_z_polynomial(coefficients: &[BigRational]) -> Self {
        let mut out = AValue::zero();
        for (n, c) in coefficients.iter().enumerate() {
            let mut binom = BigInt::one();
            for j in 0..=n {
                let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                out.add_term(j as i32, c * BigRational::from_integer(&binom * sign));
                binom = binom * BigInt::from(n - j) / BigInt::from(j + 1);
            }
        }
        out
    }

    fn add_term(&mut self, e: i32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> &BTreeMap<i32, BigRational> {
        &self.terms
    }

    pub fn coefficient(&self, exponent: i32) -> BigRational {
        self.terms.get(&exponent).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn polar(&self) -> Self {
        AValue { terms: self.terms.range(..0).map(|(e, c)| (*e, c.clone())).collect() }
    }

    pub fn regular(&self) -> Self {
        AValue { terms: self.terms.range(0..).map(|(e, c)| (*e, c.clone())).collect() }
    }

    pub fn is_polar_free(&self) -> bool {
        self.terms.range(..0).next().is_none()
    }

    /// Nothing but negative powers and a constant.
    pub fn is_polar_plus_constant(&self) -> bool {
        self.terms.range(1..).next().is_none()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        AValue { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = AValue::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a + b, x * y);
            }
        }
        out
    }

    pub fn scale_big(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return AValue::zero();
        }
        AValue { terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect() }
    }

    /// Value at `u = 0`, i.e. `z = 1`, of the regular part.
    pub fn regular_at_zero(&self) -> BigRational {
        self.coefficient(0)
    }
}

/// Minimal subtraction: the projection onto negative powers of `u`.
pub fn pi_minus(v: &AValue) -> AValue {
    v.polar()
}

impl Algebra for AValue {
    fn zero() -> Self {
        AValue::zero()
    }
    fn one() -> Self {
        AValue::one()
    }
    fn add(&self, other: &Self) -> Self {
        AValue::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        AValue::mul(self, other)
    }
    fn scale(&self, c: Rational64) -> Self {
        self.scale_big(&BigRational::new((*c.numer()).into(), (*c.denom()).into()))
    }
}

impl fmt::Display for AValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let power = match e {
                0 => String::new(),
                1 => "u".to_string(),
                _ => format!("u^{e}"),
            };
            match (mag.is_one(), power.is_empty()) {
                (true, true) => f.write_str("1")?,
                (true, false) => f.write_str(&power)?,
                (false, true) => write!(f, "{mag}")?,
                (false, false) => write!(f, "{mag}·{power}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn random_value(rng: &mut ChaCha8Rng) -> AValue {
        let n = rng.gen_range(0..6);
        AValue::from_terms((0..n).map(|_| (rng.gen_range(-3..=5), q(rng.gen_range(-9..=9), rng.gen_range(1..=7)))))
    }

    #[test]
    fn display() {
        assert_eq!(AValue::pole().to_string(), "u^-1");
        assert_eq!(AValue::pole().neg().to_string(), "-u^-1");
        assert_eq!(AValue::from_terms([(0, q(5, 4)), (1, q(-1, 4))]).to_string(), "5/4 - 1/4·u");
        assert_eq!(AValue::zero().to_string(), "0");
        assert_eq!(AValue::from_terms([(-2, q(3, 1)), (0, q(1, 1))]).to_string(), "3·u^-2 + 1");
    }

    #[test]
    fn rebasing_from_z() {
        // 1 + z/4 with z = 1 - u
        let v = AValue::from_z_polynomial(&[q(1, 1), q(1, 4)]);
        assert_eq!(v, AValue::from_terms([(0, q(5, 4)), (1, q(-1, 4))]));
        // z^3 = 1 - 3u + 3u^2 - u^3
        let v = AValue::from_z_polynomial(&[q(0, 1), q(0, 1), q(0, 1), q(1, 1)]);
        assert_eq!(v, AValue::from_terms([(0, q(1, 1)), (1, q(-3, 1)), (2, q(3, 1)), (3, q(-1, 1))]));
    }

    #[test]
    fn rebasing_preserves_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let c: Vec<BigRational> = (0..rng.gen_range(1..10)).map(|_| q(rng.gen_range(-5..=5), rng.gen_range(1..=5))).collect();
            let v = AValue::from_z_polynomial(&c);
            let z = q(rng.gen_range(-4..=4), 3);
            let u = BigRational::one() - &z;
            let at_z: BigRational = c.iter().enumerate().map(|(n, c)| c * num_traits::pow(z.clone(), n)).sum();
            let at_u: BigRational = v.terms().iter().map(|(e, c)| c * num_traits::pow(u.clone(), *e as usize)).sum();
            assert_eq!(at_z, at_u);
        }
    }

    #[test]
    fn projector_examples() {
        assert_eq!(pi_minus(&AValue::pole()), AValue::pole());
        assert!(pi_minus(&AValue::from_terms([(0, q(5, 4)), (1, q(-1, 4))])).is_zero());
    }

    #[test]
    fn projector_is_idempotent_and_rota_baxter() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let (a, b) = (random_value(&mut rng), random_value(&mut rng));
            assert_eq!(pi_minus(&pi_minus(&a)), pi_minus(&a));
            assert_eq!(pi_minus(&a).add(&a.regular()), a);
            let lhs = pi_minus(&a).mul(&pi_minus(&b)).add(&pi_minus(&a.mul(&b)));
            let rhs = pi_minus(&a.mul(&pi_minus(&b))).add(&pi_minus(&pi_minus(&a).mul(&b)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn ring_laws_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (a, b, c) = (random_value(&mut rng), random_value(&mut rng), random_value(&mut rng));
            assert_eq!(a.mul(&b), b.mul(&a));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert!(a.sub(&a).is_zero());
        }
    }

    #[test]
    fn serde_roundtrip() {
        let v = AValue::from_terms([(-1, q(-1, 1)), (2, q(7, 3))]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<AValue>(&s).unwrap(), v);
    }
}
