use num_rational::Rational64;
use num_traits::One;
use serde::Serialize;

use super::{
    antipode_generator, antipode_prefixes, coproduct, counit_sides, HopfElement, HopfError, Monomial, PackedWord, Tensor, Word,
};
use crate::machine::{Alphabet, Instruction};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawFailure {
    pub program: String,
    pub law: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub max_size: usize,
    /// Generators checked, indexed by size.
    pub programs_by_size: Vec<u64>,
    pub failures: Vec<LawFailure>,
}

impl LawReport {
    pub fn programs(&self) -> u64 {
        self.programs_by_size.iter().sum()
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Coassociativity, grading, both counit laws and both antipode laws
/// `S * id = id * S = 0` on every nonempty valid program up to `max_size`.
///
/// Programs are grown right to left, so every suffix of the current
/// program is an ancestor whose antipode is already known; the right-hand
/// law then costs no extra antipodes. Those suffix antipodes never enter
/// the recursion that defines `S` of the program itself.
pub fn check_laws(alphabet: &Alphabet, max_size: usize) -> Result<LawReport, HopfError> {
    if max_size > PackedWord::MAX_LEN {
        return Err(HopfError::Unpackable(format!("size {max_size}")));
    }
    let letters = alphabet
        .letters()
        .iter()
        .map(|ins| Ok((*ins, PackedWord::pack(&[*ins])?)))
        .collect::<Result<Vec<_>, HopfError>>()?;
    let mut search = Search { letters, max_size, stack: Vec::new(), report: LawReport { max_size, programs_by_size: vec![0; max_size + 1], failures: Vec::new() } };
    let empty = PackedWord::pack(&[])?;
    search.grow(empty, i64::MAX);
    Ok(search.report)
}

struct Search {
    letters: Vec<(Instruction, PackedWord)>,
    max_size: usize,
    /// Antipodes along the current path; `stack[l]` belongs to the suffix
    /// of length `l`, when that suffix is a valid program.
    stack: Vec<Option<HopfElement<PackedWord>>>,
    report: LawReport,
}

impl Search {
    /// `lowest` is the smallest jump target relative to the start of `w`.
    fn grow(&mut self, w: PackedWord, lowest: i64) {
        let len = w.size();
        let valid = lowest >= 0;
        let antipode = if valid && len > 0 {
            self.report.programs_by_size[len] += 1;
            let stack = &self.stack;
            let (failed, s) = check(&w, |c| stack[len - c].as_ref().expect("suffix at a valid cut is valid"));
            for law in failed {
                self.report.failures.push(LawFailure { program: w.to_string(), law: law.to_string() });
            }
            Some(s)
        } else {
            valid.then(HopfElement::one)
        };
        self.stack.push(antipode);
        if len < self.max_size {
            let room = (self.max_size - len - 1) as i64;
            for i in 0..self.letters.len() {
                let (ins, letter) = self.letters[i];
                let target = ins.offset().map_or(i64::MAX, i64::from);
                if ins.offset().is_some() && target > len as i64 + 1 {
                    continue;
                }
                let lowest = (lowest.saturating_add(1)).min(target);
                if lowest.saturating_add(room) < 0 {
                    continue;
                }
                self.grow(letter.concat(w).expect("size checked up front"), lowest);
            }
        }
        self.stack.pop();
    }
}

/// Names of the laws that fail on one generator.
pub fn failed_laws<W: Word>(w: W) -> Vec<&'static str> {
    let suffixes: Vec<(usize, HopfElement<W>)> = w.cuts().into_iter().skip(1).map(|c| (c, antipode_generator(&w.split(c).1))).collect();
    check(&w, |c| &suffixes.iter().find(|(k, _)| *k == c).expect("valid cut").1).0
}

/// Failed laws and the antipode of `w`, given antipodes of its proper
/// suffixes at valid cuts.
fn check<'a, W: Word + 'a>(w: &W, suffix_antipode: impl Fn(usize) -> &'a HopfElement<W>) -> (Vec<&'static str>, HopfElement<W>) {
    let mut failed = Vec::new();
    let n = w.size();
    let x = HopfElement::generator(w.clone());
    let d = coproduct(&x);
    if d.terms().iter().any(|([a, b], _)| a.degree() + b.degree() != n) {
        failed.push("grading");
    }
    if !coassociative(w, &d) {
        failed.push("coassociativity");
    }
    let (left, right) = counit_sides(&d);
    if left != x || right != x {
        failed.push("counit");
    }

    let mut prefixes = antipode_prefixes(w);
    let mut s_id = Vec::new();
    for (c, s) in &prefixes {
        let g = Monomial::generator(w.split(*c).1);
        s_id.extend(s.terms().iter().map(|(m, k)| (m.mul(&g), *k)));
    }
    if !HopfElement::from_terms(s_id).is_zero() {
        failed.push("antipode S*id");
    }

    let s = prefixes.pop().map_or_else(HopfElement::one, |(_, s)| s);
    let mut id_s: Vec<(Monomial<W>, Rational64)> = s.terms().to_vec();
    for c in w.cuts().into_iter().skip(1) {
        let g = Monomial::generator(w.split(c).0);
        if c == n {
            id_s.push((g, Rational64::one()));
        } else {
            id_s.extend(suffix_antipode(c).terms().iter().map(|(m, k)| (m.mul(&g), *k)));
        }
    }
    if !HopfElement::from_terms(id_s).is_zero() {
        failed.push("antipode id*S");
    }
    (failed, s)
}

/// Compares `(Delta ⊗ id)` and `(id ⊗ Delta)` of a generator's coproduct
/// as sorted lists of word triples, the empty word standing for the unit.
fn coassociative<W: Word>(w: &W, d: &Tensor<W, 2>) -> bool {
    let empty = w.split(0).0;
    let word = |m: &Monomial<W>| match m.factors() {
        [] => Some(empty.clone()),
        [g] => Some(g.clone()),
        _ => None,
    };
    let mut left = Vec::with_capacity(2 * d.terms().len() * d.terms().len());
    let mut right = Vec::with_capacity(left.capacity());
    for ([a, b], c) in d.terms() {
        let (Some(a), Some(b)) = (word(a), word(b)) else {
            return false;
        };
        for k in a.cuts() {
            let (x, y) = a.split(k);
            left.push(([x, y, b.clone()], *c));
        }
        for k in b.cuts() {
            let (x, y) = b.split(k);
            right.push(([a.clone(), x, y], *c));
        }
    }
    left.sort_unstable();
    right.sort_unstable();
    left == right
}
