use serde::{Deserialize, Serialize};

use super::{Instruction, Program};

/// A finite instruction alphabet: registers `1..=registers`, jump offsets
/// in `-max_offset..=max_offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    pub registers: u32,
    pub max_offset: i32,
}

impl Alphabet {
    pub fn new(registers: u32, max_offset: i32) -> Alphabet {
        Alphabet { registers, max_offset }
    }

    /// Letters in enumeration order: INC, DEC, JZ, JMP; registers and then
    /// offsets ascending.
    pub fn letters(&self) -> Vec<Instruction> {
        let regs = 1..=self.registers;
        let offs = -self.max_offset..=self.max_offset;
        let mut v: Vec<Instruction> = regs.clone().map(Instruction::Inc).collect();
        v.extend(regs.clone().map(Instruction::Dec));
        for r in regs {
            v.extend(offs.clone().map(|d| Instruction::Jz(r, d)));
        }
        v.extend(offs.map(Instruction::Jmp));
        v
    }
}

/// Calls `f` on every valid program of exactly `size` instructions, in
/// lexicographic order of letter indices.
pub fn for_each_program(alphabet: &Alphabet, size: usize, mut f: impl FnMut(&[Instruction])) {
    let letters = alphabet.letters();
    let mut buf = Vec::with_capacity(size);
    fill(&letters, size, &mut buf, &mut f);
}

fn fill(letters: &[Instruction], size: usize, buf: &mut Vec<Instruction>, f: &mut impl FnMut(&[Instruction])) {
    let pos = buf.len();
    if pos == size {
        f(buf);
        return;
    }
    for &ins in letters {
        if let Some(d) = ins.offset() {
            let t = pos as i64 + d as i64;
            if t < 0 || t > size as i64 {
                continue;
            }
        }
        buf.push(ins);
        fill(letters, size, buf, f);
        buf.pop();
    }
}

/// All valid programs of size `0..=max_size`, shortest first.
pub fn enumerate_programs(alphabet: &Alphabet, max_size: usize) -> Vec<Program> {
    let mut out = Vec::new();
    for n in 0..=max_size {
        for_each_program(alphabet, n, |w| out.push(Program(w.to_vec())));
    }
    out
}
