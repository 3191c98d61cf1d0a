//! A four-opcode register machine with relative jumps.
//!
//! Programs halt by falling off the end. Register 1 carries the input and the
//! output; every other register starts at zero. Evaluation is budgeted and
//! classifies each run as halted, provably divergent (an exact configuration
//! repeated) or unknown (budget exhausted).

mod compose;
mod encode;
mod enumerate;
mod exec;
mod tabulate;
mod text;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use compose::{compose_hygienic, compose_raw, is_hygienic, parallel_eval, HygieneVerdict, ParallelOutcome};
pub use encode::{decode_program, encode_instruction, encode_program, Decoded};
pub use enumerate::{for_each_program, enumerate_programs, Alphabet};
pub use exec::{eval_fn, run, run_detailed, trace_config, BudgetPolicy, CostTriple, EvalOutcome, Execution, MachineConfig};
pub use tabulate::tab_translate;
pub use text::ParseError;

/// Largest register index a valid program may mention.
pub const MAX_REGISTER: u32 = 1024;
/// Largest instruction count of a valid program.
pub const MAX_PROGRAM_LEN: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum MachineError {
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("input must be a positive natural, got {0}")]
    InvalidInput(u64),
    #[error("duplicate table key {0}")]
    DuplicateKey(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Instruction {
    Inc(u32),
    Dec(u32),
    /// Jump by the offset when the register is zero.
    Jz(u32, i32),
    Jmp(i32),
}

impl Instruction {
    pub fn register(&self) -> Option<u32> {
        match *self {
            Instruction::Inc(r) | Instruction::Dec(r) | Instruction::Jz(r, _) => Some(r),
            Instruction::Jmp(_) => None,
        }
    }

    pub fn offset(&self) -> Option<i32> {
        match *self {
            Instruction::Jz(_, d) | Instruction::Jmp(d) => Some(d),
            _ => None,
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Instruction::Inc(r) => write!(f, "INC {r}"),
            Instruction::Dec(r) => write!(f, "DEC {r}"),
            Instruction::Jz(r, d) => write!(f, "JZ {r} {d:+}"),
            Instruction::Jmp(d) => write!(f, "JMP {d:+}"),
        }
    }
}

/// A validated instruction sequence.
///
/// Every jump target lies in `0..=len`; a target equal to `len` halts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Instruction>", into = "Vec<Instruction>")]
pub struct Program(Vec<Instruction>);

impl Program {
    pub fn new(instructions: Vec<Instruction>) -> Result<Program, MachineError> {
        validate(&instructions)?;
        Ok(Program(instructions))
    }

    pub fn empty() -> Program {
        Program(Vec::new())
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Registers mentioned anywhere in the program.
    pub fn registers(&self) -> BTreeSet<u32> {
        self.0.iter().filter_map(Instruction::register).collect()
    }

    pub(crate) fn max_register(&self) -> u32 {
        self.0.iter().filter_map(Instruction::register).max().unwrap_or(1).max(1)
    }

    /// Positions `i` at which the program splits into two valid programs
    /// with no jump crossing the boundary.
    pub fn valid_cuts(&self) -> Vec<usize> {
        valid_cuts(&self.0)
    }

    /// Splits at a valid cut into the part that runs first and the rest.
    pub fn split_at(&self, cut: usize) -> Option<(Program, Program)> {
        if cut > self.size() || !is_valid_cut(&self.0, cut) {
            return None;
        }
        Some((Program(self.0[..cut].to_vec()), Program(self.0[cut..].to_vec())))
    }
}

impl TryFrom<Vec<Instruction>> for Program {
    type Error = MachineError;

    fn try_from(v: Vec<Instruction>) -> Result<Self, Self::Error> {
        Program::new(v)
    }
}

impl From<Program> for Vec<Instruction> {
    fn from(p: Program) -> Self {
        p.0
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ins) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{ins}")?;
        }
        Ok(())
    }
}

fn validate(instructions: &[Instruction]) -> Result<(), MachineError> {
    let n = instructions.len();
    if n > MAX_PROGRAM_LEN {
        return Err(MachineError::InvalidProgram(format!("{n} instructions exceeds {MAX_PROGRAM_LEN}")));
    }
    for (i, ins) in instructions.iter().enumerate() {
        if let Some(r) = ins.register() {
            if r == 0 || r > MAX_REGISTER {
                return Err(MachineError::InvalidProgram(format!("register {r} at {i} out of 1..={MAX_REGISTER}")));
            }
        }
        if let Some(d) = ins.offset() {
            let target = i as i64 + d as i64;
            if target < 0 || target > n as i64 {
                return Err(MachineError::InvalidProgram(format!("jump at {i} with offset {d} leaves 0..={n}")));
            }
        }
    }
    Ok(())
}

pub(crate) fn is_valid_cut(instructions: &[Instruction], cut: usize) -> bool {
    instructions.iter().enumerate().all(|(s, ins)| match ins.offset() {
        None => true,
        Some(d) => {
            let t = s as i64 + d as i64;
            let c = cut as i64;
            let s = s as i64;
            !((s < c && t > c) || (s >= c && t < c))
        }
    })
}

pub(crate) fn valid_cuts(instructions: &[Instruction]) -> Vec<usize> {
    let n = instructions.len();
    // A jump from s to t blocks every cut strictly between them, and the cut
    // at s itself when it jumps backwards past s.
    let mut blocked = vec![false; n + 1];
    for (s, ins) in instructions.iter().enumerate() {
        if let Some(d) = ins.offset() {
            let t = (s as i64 + d as i64) as usize;
            if t > s {
                for b in blocked.iter_mut().take(t).skip(s + 1) {
                    *b = true;
                }
            } else if t < s {
                for b in blocked.iter_mut().take(s + 1).skip(t + 1) {
                    *b = true;
                }
            }
        }
    }
    (0..=n).filter(|&i| !blocked[i]).collect()
}
