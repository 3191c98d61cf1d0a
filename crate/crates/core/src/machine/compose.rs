use serde::{Deserialize, Serialize};

use super::exec::{run_detailed, BudgetPolicy, CostTriple, EvalOutcome};
use super::{Instruction, MachineError, Program};

/// Runs `q` and falls through into `p`. Sizes add exactly.
pub fn compose_raw(p: &Program, q: &Program) -> Program {
    let mut v = Vec::with_capacity(p.size() + q.size());
    v.extend_from_slice(q.instructions());
    v.extend_from_slice(p.instructions());
    // Jumps inside each half stay inside it, and a jump to the end of q is
    // now the first instruction of p.
    Program(v)
}

/// Like [`compose_raw`], with a block between the halves that zeroes every
/// register other than 1 mentioned by `q`.
pub fn compose_hygienic(p: &Program, q: &Program) -> Program {
    let mut v = Vec::with_capacity(p.size() + q.size());
    v.extend_from_slice(q.instructions());
    for r in q.registers().into_iter().filter(|&r| r != 1) {
        v.extend_from_slice(&[Instruction::Jz(r, 3), Instruction::Dec(r), Instruction::Jmp(-2)]);
    }
    v.extend_from_slice(p.instructions());
    Program::new(v).expect("hygienic composition of valid programs is valid")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelOutcome {
    pub outcomes: Vec<Result<EvalOutcome, MachineError>>,
    /// Joint cost, present only when every member halted: time is the
    /// maximum, memory and space are summed.
    pub joint: Option<CostTriple>,
}

pub fn parallel_eval(spec: &[(Program, u64)], policy: &BudgetPolicy) -> ParallelOutcome {
    let outcomes: Vec<_> = spec
        .iter()
        .map(|(p, x)| run_detailed(p, *x, policy.step_budget, policy.space_budget).map(|e| e.outcome))
        .collect();
    let joint = outcomes
        .iter()
        .map(|o| o.as_ref().ok().and_then(EvalOutcome::cost))
        .try_fold(CostTriple::default(), |acc, c| {
            c.map(|c| CostTriple { t: acc.t.max(c.t), m: acc.m + c.m, s: acc.s + c.s })
        });
    ParallelOutcome { outcomes, joint }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HygieneVerdict {
    /// All halting samples left scratch registers at zero.
    Hygienic { halting_samples: usize },
    Violated { witness: u64, register: u32, value: u64 },
}

impl HygieneVerdict {
    pub fn is_hygienic(&self) -> bool {
        matches!(self, HygieneVerdict::Hygienic { .. })
    }
}

pub fn is_hygienic(p: &Program, samples: &[u64], policy: &BudgetPolicy) -> Result<HygieneVerdict, MachineError> {
    let mut halting = 0;
    for &x in samples {
        let exec = run_detailed(p, x, policy.step_budget, policy.space_budget)?;
        if let Some(cfg) = exec.final_config {
            halting += 1;
            if let Some((&register, &value)) = cfg.registers.iter().find(|(&r, _)| r != 1) {
                return Ok(HygieneVerdict::Violated { witness: x, register, value });
            }
        }
    }
    Ok(HygieneVerdict::Hygienic { halting_samples: halting })
}
