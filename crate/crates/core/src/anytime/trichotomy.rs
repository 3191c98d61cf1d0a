use serde::{Deserialize, Serialize};

use super::{AnytimeError, ScalePair};
use crate::machine::{run, BudgetPolicy, EvalOutcome, Program};
use crate::numberings::ComplexityTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Randomness {
    /// Certified `C_u(x) > x / phi(x)`.
    Random,
    /// Some index `<= x / phi(x)` already produces `x`.
    NotRandom,
    Unknown,
}

/// Upper bounds can refute randomness but only a certified entry can
/// establish it.
pub fn is_phi_random(x: u64, table: &ComplexityTable, scales: &ScalePair) -> Randomness {
    let threshold = scales.random_threshold(x);
    match table.upper_bound(x) {
        Some(c) if c as f64 <= threshold => Randomness::NotRandom,
        _ => match table.certified(x) {
            Some(c) if c as f64 > threshold => Randomness::Random,
            _ => Randomness::Unknown,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Halts with `f(x) <= psi(x)`.
    SmallValue,
    Diverges,
    /// Halts with a value that is not `phi`-random.
    NonRandomValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certainty {
    Certified,
    UpperBoundOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrichotomyRecord {
    pub x: u64,
    pub branch: Branch,
    pub certainty: Certainty,
    pub value: Option<u64>,
    /// On the non-random branch: whether `C(f(x)) <= f(x) / phi(f(x))`
    /// holds for the table's bound.
    pub complexity_bound_holds: Option<bool>,
}

/// A halting input whose large value could not be placed in a branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unsettled {
    pub x: u64,
    pub value: u64,
    pub randomness: Randomness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrichotomyReport {
    pub scales: String,
    pub x0: u64,
    pub records: Vec<TrichotomyRecord>,
    /// Inputs whose run exhausted the budget.
    pub unknown: Vec<u64>,
    /// Inputs below `x0`, where no claim is made.
    pub below_threshold: Vec<u64>,
    pub unsettled: Vec<Unsettled>,
}

impl TrichotomyReport {
    pub fn count(&self, branch: Branch) -> usize {
        self.records.iter().filter(|r| r.branch == branch).count()
    }
}

pub fn trichotomy_classify(
    p: &Program,
    inputs: std::ops::RangeInclusive<u64>,
    scales: &ScalePair,
    table: &ComplexityTable,
    policy: &BudgetPolicy,
) -> Result<TrichotomyReport, AnytimeError> {
    scales.validate(inputs.end().saturating_add(1))?;
    let mut report = TrichotomyReport {
        scales: scales.label.clone(),
        x0: scales.x0,
        records: Vec::new(),
        unknown: Vec::new(),
        below_threshold: Vec::new(),
        unsettled: Vec::new(),
    };
    for x in inputs {
        if x < scales.x0.max(1) {
            report.below_threshold.push(x);
            continue;
        }
        let record = |branch, certainty, value, bound| TrichotomyRecord { x, branch, certainty, value, complexity_bound_holds: bound };
        match run(p, x, policy.step_budget, policy.space_budget)? {
            EvalOutcome::Unknown { .. } => report.unknown.push(x),
            EvalOutcome::ProvenDivergent { .. } => report.records.push(record(Branch::Diverges, Certainty::Certified, None, None)),
            EvalOutcome::Halted { value, .. } => {
                if value as f64 <= scales.psi(x) {
                    report.records.push(record(Branch::SmallValue, Certainty::Certified, Some(value), None));
                    continue;
                }
                match is_phi_random(value, table, scales) {
                    Randomness::NotRandom => {
                        let c = table.upper_bound(value).expect("refutation comes from an entry");
                        let certainty = if table.certified(value).is_some() { Certainty::Certified } else { Certainty::UpperBoundOnly };
                        let holds = c as f64 <= scales.random_threshold(value);
                        report.records.push(record(Branch::NonRandomValue, certainty, Some(value), Some(holds)));
                    }
                    randomness => report.unsettled.push(Unsettled { x, value, randomness }),
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{CostTriple, Instruction::*};
    use crate::numberings::{complexity_table, SweepRecord};

    fn table_from_hits(hits: &[(u64, u64)], resolved: u64) -> ComplexityTable {
        // index y outputs hits[y-1].1 where given; every index up to
        // `resolved` is resolved
        let max_y = hits.iter().map(|h| h.0).max().unwrap_or(0).max(resolved);
        let records = (1..=max_y)
            .map(|y| {
                let outcome = match hits.iter().find(|h| h.0 == y) {
                    Some(&(_, v)) => EvalOutcome::Halted { value: v, cost: CostTriple::default() },
                    None if y <= resolved => EvalOutcome::ProvenDivergent { cycle_start_step: 0, period: 1 },
                    None => EvalOutcome::Unknown { budget: 1 },
                };
                SweepRecord { y, input: 1, code: 1, outcome }
            })
            .collect();
        ComplexityTable::from_records(1, 1, "injected", records)
    }

    #[test]
    fn randomness_verdicts() {
        let scales = ScalePair::default();
        let t = table_from_hits(&[(1, 100), (50, 200)], 10);
        assert_eq!(is_phi_random(100, &t, &scales), Randomness::NotRandom);
        // bound 50 > 200 / ln 202, uncertified: cannot refute, cannot certify
        assert_eq!(is_phi_random(200, &t, &scales), Randomness::Unknown);
        assert_eq!(is_phi_random(300, &t, &scales), Randomness::Unknown);
        let t = table_from_hits(&[(50, 200)], 60);
        assert_eq!(is_phi_random(200, &t, &scales), Randomness::Random);
    }

    #[test]
    fn randomness_matches_inequality_on_certified_prefix() {
        let table = complexity_table(64, 2000);
        let scales = ScalePair::default();
        for x in 1..=table.certified_prefix() {
            let c = table.certified(x).unwrap();
            let expected = if c as f64 > x as f64 / (x as f64 + 2.0).ln() { Randomness::Random } else { Randomness::NotRandom };
            assert_eq!(is_phi_random(x, &table, &scales), expected, "x={x}");
        }
    }

    #[test]
    fn identity_is_small_value() {
        let table = complexity_table(16, 100);
        let r = trichotomy_classify(&Program::empty(), 1..=40, &ScalePair::default(), &table, &BudgetPolicy::default()).unwrap();
        assert_eq!(r.below_threshold, (1..10).collect::<Vec<_>>());
        assert_eq!(r.count(Branch::SmallValue), 31);
        assert!(r.records.iter().all(|rec| rec.certainty == Certainty::Certified));
    }

    #[test]
    fn self_loop_diverges() {
        let table = complexity_table(16, 100);
        let p = Program::new(vec![Jmp(0)]).unwrap();
        let r = trichotomy_classify(&p, 10..=30, &ScalePair::default(), &table, &BudgetPolicy::default()).unwrap();
        assert_eq!(r.count(Branch::Diverges), 21);
    }

    #[test]
    fn unknown_runs_are_set_aside() {
        let table = complexity_table(16, 100);
        let p = Program::new(vec![Inc(1), Jmp(-1)]).unwrap();
        let r = trichotomy_classify(&p, 10..=12, &ScalePair::default(), &table, &BudgetPolicy::default()).unwrap();
        assert!(r.records.is_empty());
        assert_eq!(r.unknown, vec![10, 11, 12]);
    }

    #[test]
    fn non_random_branch_with_injected_table() {
        // doubling: x -> 2^x
        let p: Program = "
            JZ 1 +4
            DEC 1
            INC 2
            JMP -3
            INC 1
            JZ 2 +12
            DEC 2
            JZ 1 +5
            DEC 1
            INC 3
            INC 3
            JMP -4
            JZ 3 +4
            DEC 3
            INC 1
            JMP -3
            JMP -11
        "
        .parse()
        .unwrap();
        for x in 1..=8 {
            assert_eq!(run(&p, x, 1_000_000, 100_000).unwrap().value(), Some(1 << x));
        }
        // small even indices produce the powers of two, as a universal
        // machine with a short doubling program would; index 7 is unknown
        let hits: Vec<(u64, u64)> = (10..=14).map(|x| (2 * (x - 9), 1u64 << x)).collect();
        let table = table_from_hits(&hits, 5);
        let r = trichotomy_classify(&p, 10..=14, &ScalePair::default(), &table, &BudgetPolicy::new(10_000_000, 100_000)).unwrap();
        assert_eq!(r.count(Branch::NonRandomValue), 5);
        for rec in &r.records {
            assert_eq!(rec.complexity_bound_holds, Some(true));
            let expected = if rec.x - 9 <= 3 { Certainty::Certified } else { Certainty::UpperBoundOnly };
            assert_eq!(rec.certainty, expected);
        }

        // without the injected hits the branch cannot fire
        let table = complexity_table(16, 100);
        let r = trichotomy_classify(&p, 10..=12, &ScalePair::default(), &table, &BudgetPolicy::new(10_000_000, 100_000)).unwrap();
        assert_eq!(r.count(Branch::NonRandomValue), 0);
        assert_eq!(r.unsettled.len(), 3);
    }

    #[test]
    fn invalid_scales_rejected() {
        let table = complexity_table(4, 10);
        let bad = ScalePair::new("bad", |_| 2.0, |x| x + 1.0, 1);
        let err = trichotomy_classify(&Program::empty(), 1..=5, &bad, &table, &BudgetPolicy::default()).unwrap_err();
        assert!(matches!(err, AnytimeError::InvalidScales(_)));
    }
}
