//! The slowly growing pair numbering `N_R`: pairs `(k, l)` ranked by the
//! product `k * R_l`, ties broken by the smaller `l`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::NumberingError;

type ValueFn = Arc<dyn Fn(u64) -> BigRational + Send + Sync>;
type BoundFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type IntFn = Arc<dyn Fn(u64) -> Option<u64> + Send + Sync>;

/// How the reciprocal series `sum 1/R_l` is controlled.
#[derive(Clone)]
pub enum Certificate {
    /// `sum_l 1/R_l <= bound`.
    Convergent { bound: BigRational },
    /// `sum_{l<=M} 1/R_l <= f(M)` for an increasing `f`.
    Divergent { label: String, f: BoundFn },
}

/// A positive, nondecreasing rational sequence tending to infinity.
///
/// Monotonicity is what lets rank counting stop at the first `R_j`
/// exceeding the target product; [`RSequence::verify_prefix`] checks it
/// together with the certificate.
#[derive(Clone)]
pub struct RSequence {
    label: String,
    value: ValueFn,
    /// `R_l` as a machine integer where the sequence is integral and the
    /// value fits; rank counting then avoids big rationals.
    integer: Option<IntFn>,
    certificate: Certificate,
}

impl fmt::Debug for RSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RSequence").field("label", &self.label).finish()
    }
}

impl RSequence {
    pub fn new(label: impl Into<String>, value: impl Fn(u64) -> BigRational + Send + Sync + 'static, certificate: Certificate) -> RSequence {
        RSequence { label: label.into(), value: Arc::new(value), integer: None, certificate }
    }

    /// Adds a machine-integer view of the values, `None` where `R_l` does
    /// not fit. It must agree with the rational values wherever it is
    /// `Some`.
    pub fn with_integer_values(mut self, f: impl Fn(u64) -> Option<u64> + Send + Sync + 'static) -> RSequence {
        self.integer = Some(Arc::new(f));
        self
    }

    /// `R_l = 2^l`, with `sum 1/R_l = 1`.
    pub fn powers_of_two() -> RSequence {
        RSequence::new(
            "pow2",
            |l| BigRational::from_integer(BigInt::one() << l as usize),
            Certificate::Convergent { bound: BigRational::one() },
        )
        .with_integer_values(|l| (l < 64).then(|| 1u64 << l))
    }

    /// `R_l = l`, harmonic partial sums bounded by `1 + ln M`.
    pub fn identity() -> RSequence {
        RSequence::new(
            "identity",
            |l| BigRational::from_integer(BigInt::from(l)),
            Certificate::Divergent { label: "1+ln(M)".into(), f: Arc::new(|m: f64| 1.0 + m.ln()) },
        )
        .with_integer_values(Some)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub fn value_at(&self, l: u64) -> BigRational {
        (self.value)(l)
    }

    /// `k * R_l` as a machine integer, when the fast path covers it.
    fn int_product(&self, k: u64, l: u64) -> Option<u64> {
        k.checked_mul(self.integer.as_ref()?(l)?)
    }

    /// `R_j` for `j = 1, 2, ...` while `R_j <= w`; needs the fast path.
    fn int_values_upto(&self, w: u64) -> impl Iterator<Item = u64> + '_ {
        let f = self.integer.as_ref().expect("integer fast path");
        (1..).map_while(move |j| f(j).filter(|&rj| rj <= w))
    }

    /// Checks positivity, monotonicity and the certificate on `1..=n`.
    pub fn verify_prefix(&self, n: u64) -> Result<(), NumberingError> {
        let mut prev: Option<BigRational> = None;
        // exact partial sums for a rational bound; the divergent bound is
        // real-valued, and exact harmonic sums grow unmanageable
        let mut partial = BigRational::zero();
        let mut partial_f = 0.0f64;
        for l in 1..=n {
            let r = self.value_at(l);
            if !r.is_positive() {
                return Err(NumberingError::CertificateViolation(format!("R_{l} = {r} is not positive")));
            }
            if prev.as_ref().is_some_and(|p| &r < p) {
                return Err(NumberingError::CertificateViolation(format!("R_{l} decreases")));
            }
            match &self.certificate {
                Certificate::Convergent { bound } => {
                    partial += r.recip();
                    if &partial > bound {
                        return Err(NumberingError::CertificateViolation(format!("partial sum to {l} exceeds {bound}")));
                    }
                }
                Certificate::Divergent { f, label } => {
                    partial_f += r.recip().to_f64().unwrap_or(0.0);
                    if partial_f > f(l as f64) {
                        return Err(NumberingError::CertificateViolation(format!("partial sum to {l} exceeds {label}")));
                    }
                }
            }
            prev = Some(r);
        }
        Ok(())
    }

    /// Growth bound for the rank of a pair with product `w = k R_l`.
    pub fn rank_bound(&self, w: &BigRational) -> RankBound {
        let w1 = w + BigRational::one();
        match &self.certificate {
            Certificate::Convergent { bound } => RankBound::Exact(bound * w1),
            Certificate::Divergent { f, .. } => {
                let x = w1.to_f64().unwrap_or(f64::INFINITY);
                RankBound::Real(x * f(x))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RankBound {
    Exact(BigRational),
    Real(f64),
}

impl RankBound {
    pub fn admits(&self, rank: &BigUint) -> bool {
        match self {
            RankBound::Exact(b) => &BigRational::from_integer(BigInt::from(rank.clone())) <= b,
            RankBound::Real(b) => rank.to_f64().unwrap_or(f64::INFINITY) <= *b,
        }
    }
}

fn product(k: u64, r: &BigRational) -> BigRational {
    r * BigRational::from_integer(BigInt::from(k))
}

/// The order `<_R` on pairs.
pub fn nr_compare(a: (u64, u64), b: (u64, u64), r: &RSequence) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let wa = product(a.0, &r.value_at(a.1));
    let wb = product(b.0, &r.value_at(b.1));
    wa.cmp(&wb).then(a.1.cmp(&b.1))
}

/// Number of `i >= 1` with `i * rj < w`, and whether `w / rj` is a natural.
fn count_below(w: &BigRational, rj: &BigRational) -> (BigUint, bool) {
    if w.is_integer() && rj.is_integer() {
        if let (Some(wi), Some(ri)) = (w.numer().to_u128(), rj.numer().to_u128()) {
            let (q, rem) = wi.div_rem(&ri);
            return if rem == 0 { (BigUint::from(q - 1), true) } else { (BigUint::from(q), false) };
        }
    }
    let ratio = w / rj;
    let exact = ratio.is_integer();
    let ceil = ratio.ceil().to_integer();
    let below = (ceil - BigInt::one()).to_biguint().unwrap_or_default();
    (below, exact)
}

/// Rank of `(k, l)` under `<_R`, counted directly:
/// `1 + #{(i,j) : i R_j < k R_l} + #{j < l : k R_l / R_j is a natural}`.
pub fn nr_number(k: u64, l: u64, r: &RSequence) -> Result<BigUint, NumberingError> {
    if k == 0 || l == 0 {
        return Err(NumberingError::OutOfRange(format!("({k},{l}) must be positive")));
    }
    if let Some(w) = r.int_product(k, l) {
        let mut rank: u128 = 1;
        for (j, rj) in (1..).zip(r.int_values_upto(w)) {
            let (q, rem) = (w / rj, w % rj);
            rank += u128::from(if rem == 0 { q - 1 } else { q });
            if rem == 0 && j < l {
                rank += 1;
            }
        }
        return check_bound(k, l, &product(k, &r.value_at(l)), BigUint::from(rank), r);
    }
    let w = product(k, &r.value_at(l));
    let mut rank = BigUint::one();
    let mut j = 1u64;
    loop {
        let rj = r.value_at(j);
        if rj > w {
            break;
        }
        let (below, exact) = count_below(&w, &rj);
        rank += below;
        if exact && j < l {
            rank += 1u32;
        }
        j += 1;
    }
    check_bound(k, l, &w, rank, r)
}

fn check_bound(k: u64, l: u64, w: &BigRational, rank: BigUint, r: &RSequence) -> Result<BigUint, NumberingError> {
    if !r.rank_bound(w).admits(&rank) {
        return Err(NumberingError::CertificateViolation(format!("N_R({k},{l}) = {rank} exceeds its growth bound")));
    }
    Ok(rank)
}

/// `card V_R(M)`: pairs with `k R_l <= M`.
pub fn shell_card(m: &BigUint, r: &RSequence) -> BigUint {
    if let Some(mi) = m.to_u64().filter(|_| r.integer.is_some()) {
        return r.int_values_upto(mi).map(|rj| u128::from(mi / rj)).sum::<u128>().into();
    }
    let mr = BigRational::from_integer(BigInt::from(m.clone()));
    let mut total = BigUint::zero();
    let mut j = 1u64;
    loop {
        let rj = r.value_at(j);
        if rj > mr {
            break;
        }
        total += (&mr / &rj).floor().to_integer().to_biguint().unwrap_or_default();
        j += 1;
    }
    total
}

/// Pairs of `V_R(m) \ V_R(m-1)` in `<_R` order.
pub fn shell(m: &BigUint, r: &RSequence) -> Vec<(u64, u64)> {
    if let Some(mi) = m.to_u64().filter(|&mi| mi > 0 && r.integer.is_some()) {
        let mut out: Vec<(u64, u64, u64)> = Vec::new();
        for (j, rj) in (1..).zip(r.int_values_upto(mi)) {
            out.extend(((mi - 1) / rj + 1..=mi / rj).map(|k| (k * rj, k, j)));
        }
        out.sort_unstable_by_key(|&(w, _, j)| (w, j));
        return out.into_iter().map(|(_, k, l)| (k, l)).collect();
    }
    let hi = BigRational::from_integer(BigInt::from(m.clone()));
    let lo = &hi - BigRational::one();
    let mut out: Vec<(BigRational, u64, u64)> = Vec::new();
    let mut j = 1u64;
    loop {
        let rj = r.value_at(j);
        if rj > hi {
            break;
        }
        let first = (&lo / &rj).floor().to_integer() + BigInt::one();
        let last = (&hi / &rj).floor().to_integer();
        let mut i = first;
        while i <= last {
            let k = i.to_u64().expect("shell element fits in u64");
            out.push((product(k, &rj), k, j));
            i += BigInt::one();
        }
        j += 1;
    }
    out.sort_by(|a, b| a.0.cmp(&b.0).then(a.2.cmp(&b.2)));
    out.into_iter().map(|(_, k, l)| (k, l)).collect()
}

/// Inverse of [`nr_number`]: locate the shell holding rank `n`, then index
/// into it.
pub fn nr_element(n: &BigUint, r: &RSequence) -> Result<(u64, u64), NumberingError> {
    if n.is_zero() {
        return Err(NumberingError::OutOfRange("rank 0".into()));
    }
    let mut hi = BigUint::one();
    while &shell_card(&hi, r) < n {
        hi <<= 1;
    }
    let mut lo = BigUint::zero();
    // invariant: card(lo) < n <= card(hi)
    while &hi - &lo > BigUint::one() {
        let mid: BigUint = (&lo + &hi) >> 1;
        if &shell_card(&mid, r) >= n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let before = shell_card(&lo, r);
    let idx = (n - before - 1u32).to_usize().ok_or(NumberingError::Overflow)?;
    shell(&hi, r).get(idx).copied().ok_or_else(|| NumberingError::CertificateViolation("shell indexing out of range".into()))
}

/// The first `count` pairs of `<_R`, built by sorting whole shells with
/// [`nr_compare`].
#[derive(Debug, Clone)]
pub struct NrTable {
    label: String,
    pairs: Vec<(u64, u64)>,
    index: HashMap<(u64, u64), u64>,
}

impl NrTable {
    pub fn build(r: &RSequence, count: usize) -> NrTable {
        let mut m = BigUint::one();
        while shell_card(&m, r) < BigUint::from(count) {
            m <<= 1;
        }
        let mr = BigRational::from_integer(BigInt::from(m));
        let mut pairs = Vec::new();
        let mut j = 1u64;
        loop {
            let rj = r.value_at(j);
            if rj > mr {
                break;
            }
            let top = (&mr / &rj).floor().to_integer().to_u64().expect("table bound fits in u64");
            pairs.extend((1..=top).map(|k| (k, j)));
            j += 1;
        }
        let mut keyed: Vec<(BigRational, (u64, u64))> = pairs.into_iter().map(|p| (product(p.0, &r.value_at(p.1)), p)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1 .1.cmp(&b.1 .1)));
        keyed.truncate(count);
        let pairs: Vec<(u64, u64)> = keyed.into_iter().map(|(_, p)| p).collect();
        let index = pairs.iter().enumerate().map(|(i, &p)| (p, i as u64 + 1)).collect();
        NrTable { label: r.label().to_string(), pairs, index }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pair with rank `n` (1-based).
    pub fn element(&self, n: u64) -> Option<(u64, u64)> {
        n.checked_sub(1).and_then(|i| self.pairs.get(i as usize)).copied()
    }

    pub fn number(&self, pair: (u64, u64)) -> Option<u64> {
        self.index.get(&pair).copied()
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }
}
