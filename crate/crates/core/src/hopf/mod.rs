//! The Hopf algebra of program descriptions: the free commutative algebra
//! on nonempty programs, with the coproduct summing over valid cuts. The
//! part that runs first is always the left tensor factor.
//!
//! Also: characters into Laurent polynomials in `u = 1 - z`, the
//! minimal-subtraction projector and the Birkhoff decomposition.

mod avalue;
mod character;
mod laws;
mod word;

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use smallvec::SmallVec;
use thiserror::Error;

pub use avalue::{pi_minus, AValue};
pub use character::{birkhoff_decompose, char_from_halting, segments, BirkhoffPair, Character, GeneratorCheck};
pub use laws::{check_laws, failed_laws, LawFailure, LawReport};
pub use word::{PackedWord, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HopfError {
    #[error("halting of generator [{0}] is not certified")]
    UncertifiedGenerator(String),
    #[error("character has no value on generator [{0}]")]
    MissingGenerator(String),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error("word does not fit the packed alphabet: {0}")]
    Unpackable(String),
}

/// Commutative product of generators, kept sorted. The empty product is
/// the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial<W>(SmallVec<[W; 6]>);

impl<W: Word> Monomial<W> {
    pub fn unit() -> Self {
        Monomial(SmallVec::new())
    }

    /// A single generator; the empty word is the unit.
    pub fn generator(w: W) -> Self {
        let mut v = SmallVec::new();
        if w.size() > 0 {
            v.push(w);
        }
        Monomial(v)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[W] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(Word::size).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if let [w] = other.factors() {
            let at = self.0.partition_point(|x| x <= w);
            let mut v = self.0.clone();
            v.insert(at, w.clone());
            return Monomial(v);
        }
        let mut v: SmallVec<[W; 6]> = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            if self.0[i] <= other.0[j] {
                v.push(self.0[i].clone());
                i += 1;
            } else {
                v.push(other.0[j].clone());
                j += 1;
            }
        }
        v.extend(self.0[i..].iter().cloned());
        v.extend(other.0[j..].iter().cloned());
        Monomial(v)
    }
}

impl<W: Word> fmt::Display for Monomial<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            write!(f, "[{w}]")?;
        }
        Ok(())
    }
}

/// Skips the gcd when both are integers, which is nearly always.
fn add(a: Rational64, b: Rational64) -> Rational64 {
    if a.is_integer() && b.is_integer() {
        Rational64::from_integer(a.numer() + b.numer())
    } else {
        a + b
    }
}

/// Sorts, merges equal keys and drops zero coefficients.
fn normalize<K: Ord>(mut terms: Vec<(K, Rational64)>) -> Vec<(K, Rational64)> {
    terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    terms.dedup_by(|next, kept| {
        let same = next.0 == kept.0;
        if same {
            kept.1 = add(kept.1, next.1);
        }
        same
    });
    terms.retain(|(_, c)| !c.is_zero());
    terms
}

fn write_terms<K>(f: &mut fmt::Formatter<'_>, terms: &[(K, Rational64)], key: impl Fn(&K) -> String) -> fmt::Result {
    if terms.is_empty() {
        return f.write_str("0");
    }
    for (i, (k, c)) in terms.iter().enumerate() {
        let neg = *c < Rational64::zero();
        let mag = if neg { -*c } else { *c };
        match (i, neg) {
            (0, true) => f.write_str("-")?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        if mag.is_one() {
            f.write_str(&key(k))?;
        } else {
            write!(f, "{mag} {}", key(k))?;
        }
    }
    Ok(())
}

/// Rational combination of monomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HopfElement<W> {
    terms: Vec<(Monomial<W>, Rational64)>,
}

impl<W: Word> HopfElement<W> {
    pub fn zero() -> Self {
        HopfElement { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Monomial::unit())
    }

    pub fn monomial(m: Monomial<W>) -> Self {
        HopfElement { terms: vec![(m, Rational64::one())] }
    }

    pub fn generator(w: W) -> Self {
        Self::monomial(Monomial::generator(w))
    }

    pub fn from_terms(terms: Vec<(Monomial<W>, Rational64)>) -> Self {
        HopfElement { terms: normalize(terms) }
    }

    pub fn terms(&self) -> &[(Monomial<W>, Rational64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial<W>) -> Rational64 {
        self.terms.binary_search_by(|(k, _)| k.cmp(m)).map_or(Rational64::zero(), |i| self.terms[i].1)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-Rational64::one()))
    }

    pub fn scale(&self, c: Rational64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        HopfElement { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.push((a.mul(b), x * y));
            }
        }
        Self::from_terms(out)
    }

    /// Degrees of the monomials present.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.iter().map(|(m, _)| m.degree()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }
}

impl<W: Word> fmt::Display for HopfElement<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms, |m| m.to_string())
    }
}

/// Rational combination of `N`-fold tensors of monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor<W, const N: usize> {
    terms: Vec<([Monomial<W>; N], Rational64)>,
}

impl<W: Word, const N: usize> Tensor<W, N> {
    pub fn from_terms(terms: Vec<([Monomial<W>; N], Rational64)>) -> Self {
        Tensor { terms: normalize(terms) }
    }

    pub fn terms(&self) -> &[([Monomial<W>; N], Rational64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<W: Word, const N: usize> fmt::Display for Tensor<W, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms, |ms| ms.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("⊗"))
    }
}

/// `(prefix, suffix)` pairs over the valid cuts of a generator.
pub fn coproduct_generator<W: Word>(w: &W) -> Vec<[Monomial<W>; 2]> {
    w.cuts()
        .into_iter()
        .map(|c| {
            let (a, b) = w.split(c);
            [Monomial::generator(a), Monomial::generator(b)]
        })
        .collect()
}

fn coproduct_monomial<W: Word>(m: &Monomial<W>, mut f: impl FnMut(Monomial<W>, Monomial<W>)) {
    match m.factors() {
        [] => f(Monomial::unit(), Monomial::unit()),
        [w] => {
            for c in w.cuts() {
                let (a, b) = w.split(c);
                f(Monomial::generator(a), Monomial::generator(b));
            }
        }
        ws => {
            let mut acc = vec![[Monomial::unit(), Monomial::unit()]];
            for w in ws {
                let parts = coproduct_generator(w);
                acc = acc.iter().flat_map(|[l, r]| parts.iter().map(move |[a, b]| [l.mul(a), r.mul(b)])).collect();
            }
            for [a, b] in acc {
                f(a, b);
            }
        }
    }
}

/// Extended to products as an algebra morphism.
pub fn coproduct<W: Word>(x: &HopfElement<W>) -> Tensor<W, 2> {
    let mut out = Vec::new();
    for (m, c) in &x.terms {
        coproduct_monomial(m, |a, b| out.push(([a, b], *c)));
    }
    Tensor::from_terms(out)
}

/// `(Delta ⊗ id)`.
pub fn coproduct_left<W: Word>(t: &Tensor<W, 2>) -> Tensor<W, 3> {
    let mut out = Vec::with_capacity(t.terms.len() * (t.terms.len() + 1));
    for ([a, b], c) in &t.terms {
        coproduct_monomial(a, |x, y| out.push(([x, y, b.clone()], *c)));
    }
    Tensor::from_terms(out)
}

/// `(id ⊗ Delta)`.
pub fn coproduct_right<W: Word>(t: &Tensor<W, 2>) -> Tensor<W, 3> {
    let mut out = Vec::with_capacity(t.terms.len() * (t.terms.len() + 1));
    for ([a, b], c) in &t.terms {
        coproduct_monomial(b, |x, y| out.push(([a.clone(), x, y], *c)));
    }
    Tensor::from_terms(out)
}

/// Coefficient of the unit.
pub fn counit<W: Word>(x: &HopfElement<W>) -> Rational64 {
    x.coefficient(&Monomial::unit())
}

/// `(epsilon ⊗ id)` and `(id ⊗ epsilon)` of a two-fold tensor.
pub fn counit_sides<W: Word>(t: &Tensor<W, 2>) -> (HopfElement<W>, HopfElement<W>) {
    let left = t.terms.iter().filter(|([a, _], _)| a.is_unit()).map(|([_, b], c)| (b.clone(), *c)).collect();
    let right = t.terms.iter().filter(|([_, b], _)| b.is_unit()).map(|([a, _], c)| (a.clone(), *c)).collect();
    (HopfElement::from_terms(left), HopfElement::from_terms(right))
}

/// Antipodes of every prefix of `w` at a valid cut, in cut order, from
///
/// `S([p]) = -[p] - sum over proper cuts of S([prefix]) [suffix]`.
///
/// The cuts of a prefix are exactly the cuts of `w` below it.
pub fn antipode_prefixes<W: Word>(w: &W) -> Vec<(usize, HopfElement<W>)> {
    let cuts = w.cuts();
    let mut out: Vec<(usize, HopfElement<W>)> = Vec::with_capacity(cuts.len());
    for &c in &cuts {
        if c == 0 {
            out.push((0, HopfElement::one()));
            continue;
        }
        let (prefix, _) = w.split(c);
        let mut terms = Vec::with_capacity(1 + out.iter().map(|(_, s)| s.terms.len()).sum::<usize>());
        terms.push((Monomial::generator(prefix.clone()), -Rational64::one()));
        for (j, s) in out.iter().skip(1) {
            let (_, mid) = prefix.split(*j);
            let g = Monomial::generator(mid);
            terms.extend(s.terms.iter().map(|(m, k)| (m.mul(&g), -*k)));
        }
        out.push((c, HopfElement::from_terms(terms)));
    }
    out
}

pub fn antipode_generator<W: Word>(w: &W) -> HopfElement<W> {
    antipode_prefixes(w).pop().map_or_else(HopfElement::one, |(_, s)| s)
}

/// Extended multiplicatively; the algebra is commutative.
pub fn antipode<W: Word>(x: &HopfElement<W>) -> HopfElement<W> {
    let mut out = HopfElement::zero();
    for (m, c) in &x.terms {
        let s = m.factors().iter().fold(HopfElement::one(), |acc, w| acc.mul(&antipode_generator(w)));
        out = out.add(&s.scale(*c));
    }
    out
}

/// A commutative algebra that characters and convolutions take values in.
pub trait Algebra: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: Rational64) -> Self;
}

impl<W: Word> Algebra for HopfElement<W> {
    fn zero() -> Self {
        HopfElement::zero()
    }
    fn one() -> Self {
        HopfElement::one()
    }
    fn add(&self, other: &Self) -> Self {
        HopfElement::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        HopfElement::mul(self, other)
    }
    fn scale(&self, c: Rational64) -> Self {
        HopfElement::scale(self, c)
    }
}

/// `(f * g)(x) = sum f(x') g(x'')` over the coproduct of `x`.
pub fn convolve<W: Word, V: Algebra, E>(
    f: impl Fn(&Monomial<W>) -> Result<V, E>,
    g: impl Fn(&Monomial<W>) -> Result<V, E>,
    x: &HopfElement<W>,
) -> Result<V, E> {
    let mut acc = V::zero();
    for ([a, b], c) in &coproduct(x).terms {
        acc = acc.add(&f(a)?.mul(&g(b)?).scale(*c));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{for_each_program, Alphabet, Instruction::*, Program};
    use std::convert::Infallible;

    fn prog(ins: &[crate::machine::Instruction]) -> Program {
        Program::new(ins.to_vec()).unwrap()
    }

    fn gen(ins: &[crate::machine::Instruction]) -> HopfElement<Program> {
        HopfElement::generator(prog(ins))
    }

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    /// Antipode from the closed form: alternating sum over all chains of
    /// cuts, each chain contributing the product of its segments.
    fn takeuchi<W: Word>(w: &W) -> HopfElement<W> {
        let cuts = w.cuts();
        let inner: Vec<usize> = cuts[1..cuts.len() - 1].to_vec();
        let mut terms = Vec::new();
        for mask in 0u32..(1 << inner.len()) {
            let mut points = vec![0];
            points.extend(inner.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &c)| c));
            points.push(w.size());
            let mut m = Monomial::unit();
            for pair in points.windows(2) {
                let (head, _) = w.split(pair[1]);
                let (_, seg) = head.split(pair[0]);
                m = m.mul(&Monomial::generator(seg));
            }
            let sign = if (points.len() - 1) % 2 == 0 { 1 } else { -1 };
            terms.push((m, r(sign)));
        }
        HopfElement::from_terms(terms)
    }

    #[test]
    fn single_instruction_is_primitive() {
        let a = prog(&[Inc(1)]);
        let d = coproduct(&HopfElement::generator(a.clone()));
        let want = Tensor::from_terms(vec![
            ([Monomial::generator(a.clone()), Monomial::unit()], r(1)),
            ([Monomial::unit(), Monomial::generator(a.clone())], r(1)),
        ]);
        assert_eq!(d, want);
        assert_eq!(d.to_string(), "1⊗[INC 1] + [INC 1]⊗1");
        assert_eq!(antipode(&HopfElement::generator(a.clone())), HopfElement::generator(a).scale(r(-1)));
    }

    #[test]
    fn two_instruction_coproduct() {
        let (a, b) = (prog(&[Inc(1)]), prog(&[Dec(2)]));
        let ab = prog(&[Inc(1), Dec(2)]);
        let d = coproduct(&HopfElement::generator(ab.clone()));
        assert_eq!(d.terms().len(), 3);
        assert_eq!(d.to_string(), "1⊗[INC 1; DEC 2] + [INC 1]⊗[DEC 2] + [INC 1; DEC 2]⊗1");
        // S([a,b]) = -[a,b] + [a][b]
        let s = antipode(&HopfElement::generator(ab.clone()));
        let want = HopfElement::generator(ab).scale(r(-1)).add(&HopfElement::generator(a).mul(&HopfElement::generator(b)));
        assert_eq!(s, want);
    }

    #[test]
    fn blocked_cut_makes_a_primitive() {
        let x = gen(&[Jz(1, 2), Inc(1)]);
        assert_eq!(coproduct(&x).terms().len(), 2);
        assert_eq!(antipode(&x), x.scale(r(-1)));
    }

    #[test]
    fn coproduct_of_products_is_multiplicative() {
        let x = gen(&[Inc(1), Inc(2)]);
        let y = gen(&[Dec(1)]);
        let lhs = coproduct(&x.mul(&y));
        // Delta(x) Delta(y) computed termwise
        let mut terms = Vec::new();
        for ([a, b], c) in coproduct(&x).terms() {
            for ([p, q], d) in coproduct(&y).terms() {
                terms.push(([a.mul(p), b.mul(q)], c * d));
            }
        }
        assert_eq!(lhs, Tensor::from_terms(terms));
        for ([a, b], _) in lhs.terms() {
            assert_eq!(a.degree() + b.degree(), 3);
        }
    }

    #[test]
    fn laws_on_products_and_sums() {
        let x = gen(&[Inc(1), Jmp(1), Dec(2)]).mul(&gen(&[Jz(2, -0), Inc(2)])).add(&gen(&[Inc(1)]).scale(r(3)));
        assert_eq!(coproduct_left(&coproduct(&x)), coproduct_right(&coproduct(&x)));
        let (l, rr) = counit_sides(&coproduct(&x));
        assert_eq!((l.clone(), rr), (x.clone(), x.clone()));
        let s_id = convolve::<_, _, Infallible>(|m| Ok(antipode(&HopfElement::monomial(m.clone()))), |m| Ok(HopfElement::monomial(m.clone())), &x).unwrap();
        assert_eq!(s_id, HopfElement::one().scale(counit(&x)));
    }

    #[test]
    fn antipode_matches_closed_form() {
        for_each_program(&Alphabet::new(2, 2), 4, |w| {
            let p = Program::new(w.to_vec()).unwrap();
            assert_eq!(antipode_generator(&p), takeuchi(&p), "{p}");
        });
    }

    #[test]
    fn counit_values() {
        assert_eq!(counit(&HopfElement::<Program>::one()), r(1));
        assert_eq!(counit(&gen(&[Inc(1)])), r(0));
    }

    #[test]
    fn convolution_is_associative_on_samples() {
        let id = |m: &Monomial<Program>| Ok::<_, Infallible>(HopfElement::monomial(m.clone()));
        let s = |m: &Monomial<Program>| Ok::<_, Infallible>(antipode(&HopfElement::monomial(m.clone())));
        for x in [gen(&[Inc(1), Dec(1), Inc(2)]), gen(&[Inc(1)]).mul(&gen(&[Jmp(1), Inc(2)]))] {
            // (S * id) * id = S * (id * id)
            let left = convolve(|m| convolve(s, id, &HopfElement::monomial(m.clone())), id, &x).unwrap();
            let right = convolve(s, |m| convolve(id, id, &HopfElement::monomial(m.clone())), &x).unwrap();
            assert_eq!(left, right);
            // the counit is the unit for convolution
            let eps = |m: &Monomial<Program>| Ok::<_, Infallible>(if m.is_unit() { HopfElement::one() } else { HopfElement::zero() });
            assert_eq!(convolve(eps, id, &x).unwrap(), x);
        }
    }
}
