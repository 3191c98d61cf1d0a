//! The time cut-off engine: `c * x^e` step budgets, scan reports, the
//! randomness/growth trichotomy and cost-estimate axiom checks.

mod cost;
mod scales;
mod trichotomy;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{run, EvalOutcome, MachineError, Program};

pub use cost::{cost_axiom_check, runtime_complexity_scan, CostAxiomReport, CostFit, RuntimeComplexityReport};
pub use scales::ScalePair;
pub use trichotomy::{is_phi_random, trichotomy_classify, Branch, Certainty, Randomness, TrichotomyRecord, TrichotomyReport, Unsettled};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnytimeError {
    #[error("invalid scales: {0}")]
    InvalidScales(String),
    #[error("cost axiom violated: {0}")]
    AxiomViolation(String),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Step budget `ceil(c * x^exponent)` for input `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutoffPolicy {
    pub c: Ratio<u64>,
    pub exponent: u32,
    pub space_budget: u64,
}

impl CutoffPolicy {
    pub fn new(c: Ratio<u64>, exponent: u32) -> CutoffPolicy {
        CutoffPolicy { c, exponent, space_budget: 4096 }
    }

    pub fn quadratic(c: u64) -> CutoffPolicy {
        CutoffPolicy::new(Ratio::from_integer(c), 2)
    }

    pub fn budget_of(&self, x: u64) -> u64 {
        let pow = (x as u128).saturating_pow(self.exponent);
        let num = pow.saturating_mul(*self.c.numer() as u128);
        let den = *self.c.denom() as u128;
        u64::try_from(num.div_ceil(den)).unwrap_or(u64::MAX)
    }
}

/// Runs with the cut-off budget. `Unknown` is the "not determined at x"
/// verdict and stays distinct from a divergence proof.
pub fn cutoff_run(p: &Program, x: u64, policy: &CutoffPolicy) -> Result<EvalOutcome, MachineError> {
    run(p, x, policy.budget_of(x), policy.space_budget)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub x: u64,
    pub budget: u64,
    pub halted: u64,
    pub proven_divergent: u64,
    pub unknown: u64,
    /// Programs halting within the reference super-budget.
    pub halted_super: u64,
    /// `halted / halted_super`, absent when nothing halts at all.
    pub halting_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub policy: CutoffPolicy,
    pub super_budget: u64,
    pub programs: usize,
    pub rows: Vec<ScanRow>,
}

pub fn cutoff_scan(programs: &[Program], inputs: std::ops::RangeInclusive<u64>, policy: &CutoffPolicy, super_budget: u64) -> Result<ScanReport, MachineError> {
    let rows = if programs.is_empty() {
        Vec::new()
    } else {
        inputs
            .map(|x| {
                let budget = policy.budget_of(x);
                let reference = super_budget.max(budget);
                let per_program: Vec<(EvalOutcome, bool)> = programs
                    .par_iter()
                    .map(|p| {
                        let out = run(p, x, budget, policy.space_budget)?;
                        let halts_super = match out {
                            EvalOutcome::Halted { .. } => true,
                            EvalOutcome::ProvenDivergent { .. } => false,
                            EvalOutcome::Unknown { .. } => run(p, x, reference, policy.space_budget)?.is_halted(),
                        };
                        Ok((out, halts_super))
                    })
                    .collect::<Result<_, MachineError>>()?;
                let count = |f: fn(&EvalOutcome) -> bool| per_program.iter().filter(|(o, _)| f(o)).count() as u64;
                let halted = count(EvalOutcome::is_halted);
                let halted_super = per_program.iter().filter(|(_, h)| *h).count() as u64;
                Ok(ScanRow {
                    x,
                    budget,
                    halted,
                    proven_divergent: count(EvalOutcome::is_divergent),
                    unknown: count(|o| !o.is_certified()),
                    halted_super,
                    halting_fraction: (halted_super > 0).then(|| halted as f64 / halted_super as f64),
                })
            })
            .collect::<Result<_, MachineError>>()?
    };
    Ok(ScanReport { policy: *policy, super_budget, programs: programs.len(), rows })
}
