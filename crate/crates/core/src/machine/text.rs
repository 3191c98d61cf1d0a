//! Line-oriented program text: `INC r`, `DEC r`, `JZ r d`, `JMP d`, with
//! `#` comments. A `;` also separates instructions.

use std::str::FromStr;

use thiserror::Error;

use super::{Instruction, MachineError, Program};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Invalid(#[from] MachineError),
}

impl FromStr for Instruction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let reg = |t: &str| t.parse::<u32>().map_err(|e| format!("bad register {t:?}: {e}"));
        let off = |t: &str| t.trim_start_matches('+').parse::<i32>().map_err(|e| format!("bad offset {t:?}: {e}"));
        match parts.as_slice() {
            [op, r] if op.eq_ignore_ascii_case("INC") => Ok(Instruction::Inc(reg(r)?)),
            [op, r] if op.eq_ignore_ascii_case("DEC") => Ok(Instruction::Dec(reg(r)?)),
            [op, r, d] if op.eq_ignore_ascii_case("JZ") => Ok(Instruction::Jz(reg(r)?, off(d)?)),
            [op, d] if op.eq_ignore_ascii_case("JMP") => Ok(Instruction::Jmp(off(d)?)),
            _ => Err(format!("unrecognized instruction {s:?}")),
        }
    }
}

impl FromStr for Program {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for stmt in line.split(';').map(str::trim).filter(|t| !t.is_empty()) {
                let ins = stmt.parse().map_err(|msg| ParseError::Syntax { line: i + 1, msg })?;
                out.push(ins);
            }
        }
        Ok(Program::new(out)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Instruction::*;

    #[test]
    fn parses_comments_and_signs() {
        let src = "# doubling-ish\nINC 1   # bump\n\nJZ 2 +2\nJMP -1\n";
        let p: Program = src.parse().unwrap();
        assert_eq!(p.instructions(), &[Inc(1), Jz(2, 2), Jmp(-1)]);
    }

    #[test]
    fn reports_line_numbers() {
        let err = "INC 1\nFOO 2".parse::<Program>().unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));
    }

    #[test]
    fn rejects_invalid_jumps() {
        assert!(matches!("JMP 5".parse::<Program>(), Err(ParseError::Invalid(_))));
    }
}
