use serde::{Deserialize, Serialize};

use super::AnytimeError;
use crate::machine::{compose_raw, parallel_eval, run, run_detailed, BudgetPolicy, CostTriple, EvalOutcome, Program};
use crate::numberings::ComplexityTable;

/// Smallest `c` with `C(cost(x)) <= c * x` over the covered points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostFit {
    pub constant: Option<f64>,
    /// Input attaining the constant.
    pub argmax: Option<u64>,
    pub points: usize,
    /// Halting inputs whose cost is zero, which has no complexity.
    pub skipped_zero: usize,
    /// Halting inputs whose cost value the table never produced.
    pub uncovered: usize,
}

impl CostFit {
    fn new() -> CostFit {
        CostFit { constant: None, argmax: None, points: 0, skipped_zero: 0, uncovered: 0 }
    }

    fn add(&mut self, x: u64, value: u64, table: &ComplexityTable) {
        if value == 0 {
            self.skipped_zero += 1;
            return;
        }
        let Some(c) = table.upper_bound(value) else {
            self.uncovered += 1;
            return;
        };
        self.points += 1;
        let ratio = c as f64 / x as f64;
        if self.constant.is_none_or(|best| ratio > best) {
            self.constant = Some(ratio);
            self.argmax = Some(x);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeComplexityReport {
    pub halting_inputs: usize,
    pub t: CostFit,
    pub m: CostFit,
    pub s: CostFit,
}

/// Fits `C(t(x)) <= c x`, and likewise for `m` and `s`, using the table's
/// upper bounds on the complexity of each cost value.
pub fn runtime_complexity_scan(
    p: &Program,
    inputs: std::ops::RangeInclusive<u64>,
    table: &ComplexityTable,
    policy: &BudgetPolicy,
) -> Result<RuntimeComplexityReport, AnytimeError> {
    let mut report = RuntimeComplexityReport { halting_inputs: 0, t: CostFit::new(), m: CostFit::new(), s: CostFit::new() };
    for x in inputs {
        if let Some(cost) = run(p, x, policy.step_budget, policy.space_budget)?.cost() {
            report.halting_inputs += 1;
            report.t.add(x, cost.t, table);
            report.m.add(x, cost.m, table);
            report.s.add(x, cost.s, table);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostAxiomReport {
    pub compositions_checked: usize,
    /// Pairs left out: the first part is not clean on the sample, one run
    /// is undetermined, or the intermediate value is zero.
    pub compositions_skipped: usize,
    pub parallel_checked: usize,
}

/// Checks the cost-estimate axioms on samples: cost is present exactly on
/// halting runs, `t` and `s` add under composition, and parallel joint time
/// is the maximum over members.
///
/// Each composition sample `(p, q, x)` means `p` after `q`, run on `x`.
pub fn cost_axiom_check(
    compositions: &[(Program, Program, u64)],
    parallel: &[Vec<(Program, u64)>],
    policy: &BudgetPolicy,
) -> Result<CostAxiomReport, AnytimeError> {
    let violation = |msg: String| Err(AnytimeError::AxiomViolation(msg));
    let mut report = CostAxiomReport::default();
    for (p, q, x) in compositions {
        let first = run_detailed(q, *x, policy.step_budget, policy.space_budget)?;
        let composite = run(&compose_raw(p, q), *x, policy.step_budget, policy.space_budget)?;
        check_defined(&composite, &format!("({p}) after ({q}) on {x}"))?;
        let (mid, cq, config) = match (first.outcome, first.final_config) {
            (EvalOutcome::Halted { value, cost }, Some(config)) if value > 0 => (value, cost, config),
            (EvalOutcome::ProvenDivergent { .. }, _) => {
                if composite.is_halted() {
                    return violation(format!("({p}) after ({q}) halts on {x} though ({q}) diverges"));
                }
                report.compositions_checked += 1;
                continue;
            }
            _ => {
                report.compositions_skipped += 1;
                continue;
            }
        };
        if config.registers.iter().any(|(&r, &v)| r != 1 && v != 0) {
            report.compositions_skipped += 1;
            continue;
        }
        let second = run(p, mid, policy.step_budget, policy.space_budget)?;
        match (second, composite) {
            (EvalOutcome::Halted { value, cost: cp }, EvalOutcome::Halted { value: v, cost: c }) => {
                if v != value {
                    return violation(format!("({p}) after ({q}) on {x} gives {v}, parts give {value}"));
                }
                if c.t != cq.t + cp.t || c.s != cq.s + cp.s {
                    return violation(format!("({p}) after ({q}) on {x}: cost {c:?} but parts {cq:?} + {cp:?}"));
                }
                report.compositions_checked += 1;
            }
            (EvalOutcome::Halted { .. }, EvalOutcome::ProvenDivergent { .. }) | (EvalOutcome::ProvenDivergent { .. }, EvalOutcome::Halted { .. }) => {
                return violation(format!("({p}) after ({q}) on {x}: halting disagrees with its parts"));
            }
            (EvalOutcome::ProvenDivergent { .. }, EvalOutcome::ProvenDivergent { .. }) => report.compositions_checked += 1,
            _ => report.compositions_skipped += 1,
        }
    }
    for spec in parallel {
        let joint = parallel_eval(spec, policy);
        let members = spec
            .iter()
            .map(|(p, x)| {
                let out = run(p, *x, policy.step_budget, policy.space_budget)?;
                check_defined(&out, &format!("({p}) on {x}"))?;
                Ok(out.cost())
            })
            .collect::<Result<Vec<Option<CostTriple>>, AnytimeError>>()?;
        let expected = members.iter().copied().collect::<Option<Vec<CostTriple>>>().map(|c| c.iter().map(|c| c.t).max().unwrap_or(0));
        if joint.joint.map(|j| j.t) != expected {
            return violation(format!("parallel joint time {:?} but member maximum {expected:?}", joint.joint.map(|j| j.t)));
        }
        report.parallel_checked += 1;
    }
    Ok(report)
}

fn check_defined(outcome: &EvalOutcome, what: &str) -> Result<(), AnytimeError> {
    if outcome.is_halted() != outcome.cost().is_some() {
        return Err(AnytimeError::AxiomViolation(format!("{what}: cost presence disagrees with halting")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{enumerate_programs, Alphabet, Instruction::*};
    use crate::numberings::complexity_table;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_program_skips_zero_costs() {
        let table = complexity_table(16, 200);
        let r = runtime_complexity_scan(&Program::empty(), 1..=20, &table, &BudgetPolicy::default()).unwrap();
        assert_eq!(r.halting_inputs, 20);
        assert_eq!(r.t.skipped_zero, 20);
        assert_eq!(r.t.constant, None);
    }

    #[test]
    fn single_step_constant_at_one() {
        let table = complexity_table(16, 200);
        let c1 = table.upper_bound(1).unwrap();
        let r = runtime_complexity_scan(&Program::new(vec![Inc(1)]).unwrap(), 1..=30, &table, &BudgetPolicy::default()).unwrap();
        assert_eq!(r.t.constant, Some(c1 as f64));
        assert_eq!(r.t.argmax, Some(1));
        assert_eq!(r.t.points, 30);
    }

    #[test]
    fn constant_does_not_grow_with_budget() {
        let p = Program::new(vec![Jz(1, 3), Dec(1), Jmp(-2), Inc(1)]).unwrap();
        let small = complexity_table(8, 3000);
        let large = complexity_table(16, 3000);
        let a = runtime_complexity_scan(&p, 1..=40, &small, &BudgetPolicy::default()).unwrap();
        let b = runtime_complexity_scan(&p, 1..=40, &large, &BudgetPolicy::default()).unwrap();
        for (fa, fb) in [(&a.t, &b.t), (&a.m, &b.m), (&a.s, &b.s)] {
            assert!(fb.uncovered <= fa.uncovered);
            if fa.uncovered == 0 {
                assert!(fb.constant.unwrap() <= fa.constant.unwrap());
            }
        }
    }

    #[test]
    fn empty_composition() {
        let r = cost_axiom_check(&[(Program::empty(), Program::empty(), 3)], &[], &BudgetPolicy::default()).unwrap();
        assert_eq!(r.compositions_checked, 1);
    }

    #[test]
    fn random_compositions_and_parallel_specs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pool = enumerate_programs(&Alphabet::new(2, 2), 3);
        let policy = BudgetPolicy::new(2000, 4096);
        let samples: Vec<_> = (0..200)
            .map(|_| (pool.choose(&mut rng).unwrap().clone(), pool.choose(&mut rng).unwrap().clone(), rng.gen_range(1..=30)))
            .collect();
        let specs: Vec<Vec<(Program, u64)>> = (0..100)
            .map(|_| (0..rng.gen_range(1..=4)).map(|_| (pool.choose(&mut rng).unwrap().clone(), rng.gen_range(1..=30))).collect())
            .collect();
        let r = cost_axiom_check(&samples, &specs, &policy).unwrap();
        assert_eq!(r.compositions_checked + r.compositions_skipped, 200);
        assert!(r.compositions_checked > 100);
        assert_eq!(r.parallel_checked, 100);
    }
}
