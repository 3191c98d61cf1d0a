use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use super::{convolve, pi_minus, AValue, HopfElement, HopfError, Monomial, Word};
use crate::machine::{BudgetPolicy, Program};
use crate::series::{psi_coeffs_for_value, ExtendedFn, FnValue};

/// Values on finitely many generators, extended multiplicatively.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Character<W: Ord> {
    values: BTreeMap<W, AValue>,
}

impl<W: Word> Character<W> {
    pub fn new(values: BTreeMap<W, AValue>) -> Self {
        Character { values }
    }

    pub fn values(&self) -> &BTreeMap<W, AValue> {
        &self.values
    }

    pub fn value(&self, w: &W) -> Result<&AValue, HopfError> {
        self.values.get(w).ok_or_else(|| HopfError::MissingGenerator(w.to_string()))
    }

    pub fn eval_monomial(&self, m: &Monomial<W>) -> Result<AValue, HopfError> {
        m.factors().iter().try_fold(AValue::one(), |acc, w| Ok(acc.mul(self.value(w)?)))
    }

    pub fn eval(&self, x: &HopfElement<W>) -> Result<AValue, HopfError> {
        x.terms().iter().try_fold(AValue::zero(), |acc, (m, c)| Ok(acc.add(&super::Algebra::scale(&self.eval_monomial(m)?, *c))))
    }
}

impl<W: Word> fmt::Display for Character<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (w, v) in &self.values {
            writeln!(f, "[{w}] ↦ {v}")?;
        }
        Ok(())
    }
}

/// Every nonempty piece of `w` between two valid cuts: the generators a
/// character must know to be evaluated on the coproduct of `w` and its
/// iterates.
pub fn segments<W: Word>(w: &W) -> Vec<W> {
    let cuts = w.cuts();
    let mut out = Vec::new();
    for (a, &j) in cuts.iter().enumerate().skip(1) {
        let (head, _) = w.split(j);
        for &i in &cuts[..a] {
            out.push(head.split(i).1);
        }
    }
    out
}

/// The halting character at `k`: a generator that provably diverges at `k`
/// (or outputs 0, which leaves the domain) maps to `u^-1`; a halting one
/// maps to the degree-`truncation` polynomial of its generating series,
/// rebased in `u`. Defined on the given programs and all their segments.
pub fn char_from_halting(k: u64, programs: &[Program], policy: &BudgetPolicy, truncation: usize) -> Result<Character<Program>, HopfError> {
    let generators: BTreeSet<Program> = programs.iter().flat_map(segments).collect();
    let values = generators
        .into_par_iter()
        .map(|p| {
            let status = ExtendedFn::new(p.clone(), *policy).status(k).map_err(|e| HopfError::Evaluation(e.to_string()))?;
            let v = match status {
                FnValue::Diverges | FnValue::ZeroOutput => AValue::pole(),
                FnValue::Defined { value } => AValue::from_z_polynomial(&psi_coeffs_for_value(k, value, truncation).coefficients),
                FnValue::Uncertified => return Err(HopfError::UncertifiedGenerator(p.to_string())),
            };
            Ok((p, v))
        })
        .collect::<Result<BTreeMap<_, _>, _>>()?;
    Ok(Character { values })
}

/// Outcome of the convolution identity and the pole conditions on one
/// generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorCheck<W> {
    pub generator: W,
    pub identity_holds: bool,
    pub plus_polar_free: bool,
    pub minus_polar: bool,
}

impl<W> GeneratorCheck<W> {
    pub fn passed(&self) -> bool {
        self.identity_holds && self.plus_polar_free && self.minus_polar
    }
}

#[derive(Debug, Clone)]
pub struct BirkhoffPair<W: Ord> {
    pub minus: Character<W>,
    pub plus: Character<W>,
    pub checks: Vec<GeneratorCheck<W>>,
}

impl<W: Word> BirkhoffPair<W> {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(GeneratorCheck::passed)
    }
}

/// Bogoliubov recursion, one degree at a time:
///
/// `phibar(p) = phi(p) + sum over proper cuts phi_-(prefix) phi(suffix)`,
/// `phi_-(p) = -pi(phibar(p))`, `phi_+(p) = phibar(p) - pi(phibar(p))`.
///
/// Then `phi_- * phi = phi_+` is recomputed from the full coproduct on
/// every generator of degree at most `grade_max`.
pub fn birkhoff_decompose<W: Word>(phi: &Character<W>, grade_max: usize) -> Result<BirkhoffPair<W>, HopfError> {
    let mut by_degree: BTreeMap<usize, Vec<&W>> = BTreeMap::new();
    for w in phi.values.keys().filter(|w| w.size() <= grade_max) {
        by_degree.entry(w.size()).or_default().push(w);
    }
    let mut minus = BTreeMap::new();
    let mut plus = BTreeMap::new();
    for level in by_degree.values() {
        let computed = level
            .par_iter()
            .map(|&w| {
                let mut bar = phi.value(w)?.clone();
                let cuts = w.cuts();
                for &c in &cuts[1..cuts.len() - 1] {
                    let (prefix, suffix) = w.split(c);
                    let m = minus.get(&prefix).ok_or_else(|| HopfError::MissingGenerator(prefix.to_string()))?;
                    bar = bar.add(&AValue::mul(m, phi.value(&suffix)?));
                }
                let polar = pi_minus(&bar);
                Ok((w.clone(), polar.neg(), bar.sub(&polar)))
            })
            .collect::<Result<Vec<_>, HopfError>>()?;
        for (w, m, p) in computed {
            minus.insert(w.clone(), m);
            plus.insert(w, p);
        }
    }
    let minus = Character { values: minus };
    let plus = Character { values: plus };
    let checks = plus
        .values
        .par_iter()
        .map(|(w, p)| {
            let x = HopfElement::generator(w.clone());
            let conv = convolve(|a| minus.eval_monomial(a), |b| phi.eval_monomial(b), &x)?;
            let m = minus.value(w)?;
            Ok(GeneratorCheck {
                generator: w.clone(),
                identity_holds: conv == *p,
                plus_polar_free: p.is_polar_free(),
                minus_polar: m.is_polar_plus_constant(),
            })
        })
        .collect::<Result<Vec<_>, HopfError>>()?;
    Ok(BirkhoffPair { minus, plus, checks })
}
