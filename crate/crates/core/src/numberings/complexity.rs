use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::universal::Universal;
use crate::machine::EvalOutcome;

/// One evaluated index of the universal sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub y: u64,
    pub input: u64,
    pub code: u64,
    pub outcome: EvalOutcome,
}

impl SweepRecord {
    pub fn resolved(&self) -> bool {
        self.outcome.is_certified()
    }

    /// Machine steps spent producing this record.
    pub fn steps(&self) -> u64 {
        match self.outcome {
            EvalOutcome::Halted { cost, .. } => cost.t,
            EvalOutcome::ProvenDivergent { cycle_start_step, period } => cycle_start_step + period,
            EvalOutcome::Unknown { budget } => budget,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityEntry {
    /// Least index found with this output.
    pub upper: u64,
    /// Every smaller index is resolved, so `upper` is exact.
    pub certified: bool,
}

/// Budgeted approximation of `C_u(x) = min { y : u(y) = x }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityTable {
    pub step_budget: u64,
    pub space_budget: u64,
    pub k_max: u64,
    pub r_label: String,
    pub entries: BTreeMap<u64, ComplexityEntry>,
    /// Largest `K` with every index `1..=K` resolved.
    pub resolved_prefix: u64,
    pub total_steps: u64,
    pub unknown: u64,
}

impl ComplexityTable {
    /// Assembles a table from records for indices `1..=k_max`, in any order.
    pub fn from_records(step_budget: u64, space_budget: u64, r_label: &str, mut records: Vec<SweepRecord>) -> ComplexityTable {
        records.sort_by_key(|r| r.y);
        let k_max = records.last().map_or(0, |r| r.y);
        let resolved_prefix = records
            .iter()
            .enumerate()
            .take_while(|(i, r)| r.y == *i as u64 + 1 && r.resolved())
            .count() as u64;
        let mut entries = BTreeMap::new();
        for rec in &records {
            if let Some(v) = rec.outcome.value() {
                entries.entry(v).or_insert(ComplexityEntry { upper: rec.y, certified: rec.y <= resolved_prefix + 1 });
            }
        }
        ComplexityTable {
            step_budget,
            space_budget,
            k_max,
            r_label: r_label.to_string(),
            entries,
            resolved_prefix,
            total_steps: records.iter().map(SweepRecord::steps).sum(),
            unknown: records.iter().filter(|r| !r.resolved()).count() as u64,
        }
    }

    pub fn upper_bound(&self, x: u64) -> Option<u64> {
        self.entries.get(&x).map(|e| e.upper)
    }

    /// Exact `C_u(x)` when certified.
    pub fn certified(&self, x: u64) -> Option<u64> {
        self.entries.get(&x).filter(|e| e.certified).map(|e| e.upper)
    }

    pub fn certified_values(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.entries.iter().filter(|(_, e)| e.certified).map(|(&x, e)| (x, e.upper))
    }

    /// Largest `X` such that every output in `1..=X` is certified.
    pub fn certified_prefix(&self) -> u64 {
        (1..).take_while(|&x| self.certified(x).is_some()).last().unwrap_or(0)
    }
}

pub fn sweep_record(u: &Universal, y: u64, step_budget: u64, space_budget: u64) -> SweepRecord {
    let (input, code) = u.split(y).expect("N_R is a bijection on positive indices");
    let outcome = crate::machine::run(&u.program(code), input, step_budget, space_budget).expect("inputs are positive");
    SweepRecord { y, input, code, outcome }
}

/// Sweeps `y = 1..=k_max` with the default universal evaluator.
pub fn complexity_table(step_budget: u64, k_max: u64) -> ComplexityTable {
    let u = Universal::with_capacity(super::RSequence::powers_of_two(), k_max as usize);
    complexity_table_with(&u, step_budget, 4096, k_max)
}

pub fn complexity_table_with(u: &Universal, step_budget: u64, space_budget: u64, k_max: u64) -> ComplexityTable {
    let records: Vec<SweepRecord> = (1..=k_max).into_par_iter().map(|y| sweep_record(u, y, step_budget, space_budget)).collect();
    ComplexityTable::from_records(step_budget, space_budget, u.r().label(), records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::CostTriple;

    fn rec(y: u64, outcome: EvalOutcome) -> SweepRecord {
        SweepRecord { y, input: y, code: 1, outcome }
    }

    fn halted(v: u64) -> EvalOutcome {
        EvalOutcome::Halted { value: v, cost: CostTriple::default() }
    }

    #[test]
    fn certification_stops_at_first_unknown() {
        let records = vec![
            rec(1, halted(5)),
            rec(2, EvalOutcome::ProvenDivergent { cycle_start_step: 0, period: 1 }),
            rec(3, halted(7)),
            rec(4, EvalOutcome::Unknown { budget: 10 }),
            rec(5, halted(9)),
            rec(6, halted(5)),
        ];
        let t = ComplexityTable::from_records(10, 10, "test", records);
        assert_eq!(t.resolved_prefix, 3);
        assert_eq!(t.certified(5), Some(1));
        assert_eq!(t.certified(7), Some(3));
        assert_eq!(t.certified(9), None);
        assert_eq!(t.upper_bound(9), Some(5));
        assert_eq!(t.unknown, 1);
    }

    #[test]
    fn record_order_does_not_matter() {
        let a: Vec<_> = (1..=6).map(|y| rec(y, halted(y % 3 + 1))).collect();
        let mut b = a.clone();
        b.reverse();
        assert_eq!(ComplexityTable::from_records(1, 1, "t", a), ComplexityTable::from_records(1, 1, "t", b));
    }

    #[test]
    fn complexities_are_positive_and_monotone_in_budget() {
        let small = complexity_table(2, 400);
        let large = complexity_table(8, 400);
        for (&x, e) in &small.entries {
            assert!(e.upper >= 1);
            assert!(large.upper_bound(x).unwrap() <= e.upper);
            if e.certified {
                assert_eq!(large.certified(x), Some(e.upper));
            }
        }
    }
}
