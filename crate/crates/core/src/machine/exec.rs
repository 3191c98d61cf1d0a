use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Instruction, MachineError, Program};

/// Runtime, peak footprint and cumulative footprint of a halted run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct CostTriple {
    pub t: u64,
    pub m: u64,
    pub s: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvalOutcome {
    Halted { value: u64, cost: CostTriple },
    /// The configuration seen at `cycle_start_step` recurred `period` steps later.
    ProvenDivergent { cycle_start_step: u64, period: u64 },
    Unknown { budget: u64 },
}

impl EvalOutcome {
    pub fn is_halted(&self) -> bool {
        matches!(self, EvalOutcome::Halted { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, EvalOutcome::ProvenDivergent { .. })
    }

    /// Halted or proven divergent.
    pub fn is_certified(&self) -> bool {
        !matches!(self, EvalOutcome::Unknown { .. })
    }

    pub fn value(&self) -> Option<u64> {
        match self {
            EvalOutcome::Halted { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn cost(&self) -> Option<CostTriple> {
        match self {
            EvalOutcome::Halted { cost, .. } => Some(*cost),
            _ => None,
        }
    }
}

/// Program counter plus the nonzero registers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MachineConfig {
    pub pc: usize,
    pub registers: BTreeMap<u32, u64>,
}

impl MachineConfig {
    fn from_dense(pc: usize, regs: &[u64]) -> MachineConfig {
        let registers = regs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &v)| v != 0)
            .map(|(r, &v)| (r as u32, v))
            .collect();
        MachineConfig { pc, registers }
    }

    pub fn register(&self, r: u32) -> u64 {
        self.registers.get(&r).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetPolicy {
    pub step_budget: u64,
    pub space_budget: u64,
}

impl Default for BudgetPolicy {
    fn default() -> Self {
        BudgetPolicy { step_budget: 100_000, space_budget: 4096 }
    }
}

impl BudgetPolicy {
    pub fn new(step_budget: u64, space_budget: u64) -> BudgetPolicy {
        BudgetPolicy { step_budget, space_budget }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub outcome: EvalOutcome,
    /// Final configuration when the run halted.
    pub final_config: Option<MachineConfig>,
}

fn footprint_of(v: u64) -> u64 {
    if v == 0 {
        0
    } else {
        1 + (64 - v.leading_zeros()) as u64
    }
}

/// Runs `p` on input `x` until it halts, a configuration repeats, or the
/// step budget runs out.
pub fn run(p: &Program, x: u64, step_budget: u64, space_budget: u64) -> Result<EvalOutcome, MachineError> {
    run_detailed(p, x, step_budget, space_budget).map(|e| e.outcome)
}

pub fn eval_fn(p: &Program, x: u64, policy: &BudgetPolicy) -> Result<EvalOutcome, MachineError> {
    run(p, x, policy.step_budget, policy.space_budget)
}

pub fn run_detailed(p: &Program, x: u64, step_budget: u64, space_budget: u64) -> Result<Execution, MachineError> {
    if x == 0 {
        return Err(MachineError::InvalidInput(x));
    }
    let code = p.instructions();
    let n = code.len();
    let mut regs = vec![0u64; p.max_register() as usize + 1];
    regs[1] = x;
    let mut footprint = footprint_of(x);
    let mut pc = 0usize;
    let mut cost = CostTriple::default();
    // Snapshots are taken just before jumps with offset <= 0; every cycle of
    // configurations passes through one of those.
    let mut seen: HashMap<(usize, Vec<u64>), u64> = HashMap::new();

    loop {
        if pc == n {
            let final_config = MachineConfig::from_dense(pc, &regs);
            return Ok(Execution {
                outcome: EvalOutcome::Halted { value: regs[1], cost },
                final_config: Some(final_config),
            });
        }
        if cost.t >= step_budget {
            return Ok(Execution { outcome: EvalOutcome::Unknown { budget: step_budget }, final_config: None });
        }
        let ins = code[pc];
        if matches!(ins.offset(), Some(d) if d <= 0) && footprint <= space_budget {
            let key = (pc, trimmed(&regs));
            if let Some(&first) = seen.get(&key) {
                return Ok(Execution {
                    outcome: EvalOutcome::ProvenDivergent { cycle_start_step: first, period: cost.t - first },
                    final_config: None,
                });
            }
            seen.insert(key, cost.t);
        }
        match ins {
            Instruction::Inc(r) => {
                let r = r as usize;
                footprint -= footprint_of(regs[r]);
                regs[r] += 1;
                footprint += footprint_of(regs[r]);
                pc += 1;
            }
            Instruction::Dec(r) => {
                let r = r as usize;
                footprint -= footprint_of(regs[r]);
                regs[r] = regs[r].saturating_sub(1);
                footprint += footprint_of(regs[r]);
                pc += 1;
            }
            Instruction::Jz(r, d) => {
                if regs[r as usize] == 0 {
                    pc = (pc as i64 + d as i64) as usize;
                } else {
                    pc += 1;
                }
            }
            Instruction::Jmp(d) => pc = (pc as i64 + d as i64) as usize,
        }
        cost.t += 1;
        cost.s += footprint;
        cost.m = cost.m.max(footprint);
    }
}

fn trimmed(regs: &[u64]) -> Vec<u64> {
    let end = regs.iter().rposition(|&v| v != 0).map_or(0, |i| i + 1);
    regs[..end].to_vec()
}

/// Configuration after exactly `steps` steps (or at halt, if earlier).
pub fn trace_config(p: &Program, x: u64, steps: u64) -> Result<MachineConfig, MachineError> {
    if x == 0 {
        return Err(MachineError::InvalidInput(x));
    }
    let code = p.instructions();
    let mut regs = vec![0u64; p.max_register() as usize + 1];
    regs[1] = x;
    let mut pc = 0usize;
    for _ in 0..steps {
        if pc == code.len() {
            break;
        }
        match code[pc] {
            Instruction::Inc(r) => {
                regs[r as usize] += 1;
                pc += 1;
            }
            Instruction::Dec(r) => {
                regs[r as usize] = regs[r as usize].saturating_sub(1);
                pc += 1;
            }
            Instruction::Jz(r, d) => {
                pc = if regs[r as usize] == 0 { (pc as i64 + d as i64) as usize } else { pc + 1 };
            }
            Instruction::Jmp(d) => pc = (pc as i64 + d as i64) as usize,
        }
    }
    Ok(MachineConfig::from_dense(pc, &regs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{Alphabet, for_each_program};
    use Instruction::*;

    fn prog(v: Vec<Instruction>) -> Program {
        Program::new(v).unwrap()
    }

    #[test]
    fn single_increment() {
        let out = run(&prog(vec![Inc(1)]), 5, 100, 100).unwrap();
        assert_eq!(out.value(), Some(6));
        assert_eq!(out.cost().unwrap().t, 1);
    }

    #[test]
    fn empty_program_is_identity_with_zero_cost() {
        let out = run(&Program::empty(), 7, 100, 100).unwrap();
        assert_eq!(out, EvalOutcome::Halted { value: 7, cost: CostTriple { t: 0, m: 0, s: 0 } });
    }

    #[test]
    fn self_jump_is_proven_divergent_after_one_step() {
        let out = run(&prog(vec![Jmp(0)]), 1, 100, 100).unwrap();
        assert_eq!(out, EvalOutcome::ProvenDivergent { cycle_start_step: 0, period: 1 });
    }

    #[test]
    fn eval_fn_examples() {
        let pol = BudgetPolicy::default();
        assert_eq!(eval_fn(&Program::empty(), 3, &pol).unwrap().value(), Some(3));
        assert_eq!(eval_fn(&prog(vec![Inc(1), Inc(1)]), 1, &pol).unwrap().value(), Some(3));
        let out = eval_fn(&prog(vec![Jz(1, 2), Jmp(0)]), 2, &pol).unwrap();
        assert!(out.is_divergent());
    }

    #[test]
    fn zero_input_rejected() {
        assert_eq!(run(&Program::empty(), 0, 10, 10), Err(MachineError::InvalidInput(0)));
    }

    #[test]
    fn unbounded_counter_is_unknown() {
        let p = prog(vec![Inc(1), Jmp(-1)]);
        assert_eq!(run(&p, 1, 50, 1000).unwrap(), EvalOutcome::Unknown { budget: 50 });
    }

    #[test]
    fn dec_saturates() {
        let p = prog(vec![Dec(1), Dec(1), Dec(1)]);
        assert_eq!(run(&p, 2, 10, 10).unwrap().value(), Some(0));
    }

    #[test]
    fn space_budget_disables_cycle_detection() {
        // r1 = 1000 has footprint 11; the loop never touches it
        let p = prog(vec![Jmp(0)]);
        assert!(run(&p, 1000, 100, 100).unwrap().is_divergent());
        assert_eq!(run(&p, 1000, 100, 5).unwrap(), EvalOutcome::Unknown { budget: 100 });
    }

    #[test]
    fn footprint_costs() {
        // x = 1: INC -> 2 (footprint 1+2=3), INC 2 -> r2=1 (3+2=5)
        let out = run(&prog(vec![Inc(1), Inc(2)]), 1, 10, 10).unwrap();
        assert_eq!(out.cost().unwrap(), CostTriple { t: 2, m: 5, s: 8 });
    }

    #[test]
    fn divergence_replays_to_same_configuration() {
        let alpha = Alphabet::new(2, 2);
        for n in 1..=4 {
            for_each_program(&alpha, n, |w| {
                let p = Program::new(w.to_vec()).unwrap();
                for x in 1..=4 {
                    if let EvalOutcome::ProvenDivergent { cycle_start_step, period } = run(&p, x, 200, 200).unwrap() {
                        assert!(period >= 1);
                        let a = trace_config(&p, x, cycle_start_step).unwrap();
                        let b = trace_config(&p, x, cycle_start_step + period).unwrap();
                        assert_eq!(a, b, "{p} on {x}");
                        assert!(a.pc < p.size());
                    }
                }
            });
        }
    }

    #[test]
    fn halted_costs_respect_m_le_s() {
        let alpha = Alphabet::new(2, 1);
        for_each_program(&alpha, 3, |w| {
            let p = Program::new(w.to_vec()).unwrap();
            if let Ok(EvalOutcome::Halted { cost, .. }) = run(&p, 3, 100, 100) {
                if cost.t >= 1 {
                    assert!(cost.m <= cost.s);
                }
            }
        });
    }
}
