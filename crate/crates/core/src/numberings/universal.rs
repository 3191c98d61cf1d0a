use num_bigint::BigUint;

use super::nr::{nr_element, NrTable, RSequence};
use super::NumberingError;
use crate::machine::{decode_program, run, EvalOutcome, MachineError, Program};

/// Surjective partial evaluator on the naturals: index `y` is split by
/// `N_R^{-1}` into an input `k` and a program code `j`, and `u(y)` is the
/// decoded program run on `k`. Non-canonical codes decode to the empty
/// program, so `u` is total in the code.
#[derive(Debug, Clone)]
pub struct Universal {
    r: RSequence,
    table: Option<NrTable>,
}

impl Universal {
    pub fn new(r: RSequence) -> Universal {
        Universal { r, table: None }
    }

    /// With `N_R` precomputed for indices `1..=capacity`.
    pub fn with_capacity(r: RSequence, capacity: usize) -> Universal {
        let table = NrTable::build(&r, capacity);
        Universal { r, table: Some(table) }
    }

    pub fn r(&self) -> &RSequence {
        &self.r
    }

    /// `(input, code)` for index `y`.
    pub fn split(&self, y: u64) -> Result<(u64, u64), NumberingError> {
        if let Some(pair) = self.table.as_ref().and_then(|t| t.element(y)) {
            return Ok(pair);
        }
        nr_element(&BigUint::from(y), &self.r)
    }

    pub fn program(&self, code: u64) -> Program {
        decode_program(&BigUint::from(code)).program
    }

    pub fn eval(&self, y: u64, step_budget: u64, space_budget: u64) -> Result<EvalOutcome, MachineError> {
        let (k, j) = self.split(y).map_err(|e| MachineError::InvalidProgram(e.to_string()))?;
        run(&self.program(j), k, step_budget, space_budget)
    }
}

impl Default for Universal {
    fn default() -> Self {
        Universal::new(RSequence::powers_of_two())
    }
}

pub fn universal_u(y: u64, step_budget: u64, space_budget: u64) -> Result<EvalOutcome, MachineError> {
    if y == 0 {
        return Err(MachineError::InvalidInput(0));
    }
    Universal::default().eval(y, step_budget, space_budget)
}
