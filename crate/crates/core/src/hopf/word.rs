use std::fmt;
use std::hash::Hash;

use smallvec::SmallVec;

use super::HopfError;
use crate::machine::{Instruction, Program};

/// A program used as a Hopf generator.
pub trait Word: Clone + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync {
    fn size(&self) -> usize;

    /// Valid cut positions, ascending, always including `0` and `size`.
    fn cuts(&self) -> SmallVec<[usize; 9]>;

    /// Splits at a valid cut into the part that runs first and the rest.
    fn split(&self, at: usize) -> (Self, Self);
}

impl Word for Program {
    fn size(&self) -> usize {
        Program::size(self)
    }

    fn cuts(&self) -> SmallVec<[usize; 9]> {
        self.valid_cuts().into_iter().collect()
    }

    fn split(&self, at: usize) -> (Self, Self) {
        self.split_at(at).expect("split at a valid cut")
    }
}

const BITS: u32 = 7;
const MASK: u64 = (1 << BITS) - 1;
const LEN_SHIFT: u32 = 60;

/// Up to eight instructions over registers `1..=4` and offsets `-3..=3`,
/// seven bits each, with the length in the top four bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PackedWord(u64);

impl PackedWord {
    pub const MAX_LEN: usize = 8;

    pub fn pack(instructions: &[Instruction]) -> Result<PackedWord, HopfError> {
        if instructions.len() > Self::MAX_LEN {
            return Err(HopfError::Unpackable(format!("{} instructions", instructions.len())));
        }
        let mut bits = 0u64;
        for (i, ins) in instructions.iter().enumerate() {
            let code = encode(ins).ok_or_else(|| HopfError::Unpackable(ins.to_string()))?;
            bits |= code << (BITS * i as u32);
        }
        Ok(PackedWord(bits | (instructions.len() as u64) << LEN_SHIFT))
    }

    fn len(self) -> usize {
        (self.0 >> LEN_SHIFT) as usize
    }

    fn code(self, i: usize) -> u64 {
        self.0 >> (BITS * i as u32) & MASK
    }

    /// `self` followed by `rest`, if the result still fits.
    pub fn concat(self, rest: PackedWord) -> Option<PackedWord> {
        let (a, b) = (self.len(), rest.len());
        if a + b > Self::MAX_LEN {
            return None;
        }
        let body = |w: PackedWord| w.0 & ((1 << LEN_SHIFT) - 1);
        Some(PackedWord(body(self) | body(rest) << (BITS * a as u32) | ((a + b) as u64) << LEN_SHIFT))
    }

    pub fn instructions(self) -> Vec<Instruction> {
        (0..self.len()).map(|i| decode(self.code(i))).collect()
    }

    pub fn to_program(self) -> Program {
        Program::new(self.instructions()).expect("packed words hold valid programs")
    }
}

fn encode(ins: &Instruction) -> Option<u64> {
    let reg = |r: u32| (1..=4).contains(&r).then_some(u64::from(r - 1));
    let off = |d: i32| (-3..=3).contains(&d).then_some((d + 3) as u64);
    Some(match *ins {
        Instruction::Inc(r) => reg(r)? << 3,
        Instruction::Dec(r) => 1 << 5 | reg(r)? << 3,
        Instruction::Jz(r, d) => 2 << 5 | reg(r)? << 3 | off(d)?,
        Instruction::Jmp(d) => 3 << 5 | off(d)?,
    })
}

/// Cut positions blocked by instruction `code` at position `s`: a jump
/// from `s` to `t` blocks every cut strictly between them, and `s` itself
/// when it goes backwards.
const BLOCKED: [[u16; 128]; PackedWord::MAX_LEN] = {
    let mut table = [[0u16; 128]; PackedWord::MAX_LEN];
    let mut s = 0;
    while s < PackedWord::MAX_LEN {
        let mut code = 0;
        while code < 128 {
            if code >> 6 == 1 {
                let t = s as i64 + (code & 7) as i64 - 3;
                let (lo, hi) = if t > s as i64 { (s as i64 + 1, t) } else { (t + 1, s as i64 + 1) };
                let mut b = lo;
                while b < hi {
                    if b >= 0 {
                        table[s][code] |= 1 << b;
                    }
                    b += 1;
                }
            }
            code += 1;
        }
        s += 1;
    }
    table
};

fn decode(code: u64) -> Instruction {
    let r = (code >> 3 & 3) as u32 + 1;
    let d = (code & 7) as i32 - 3;
    match code >> 5 {
        0 => Instruction::Inc(r),
        1 => Instruction::Dec(r),
        2 => Instruction::Jz(r, d),
        _ => Instruction::Jmp(d),
    }
}

impl Word for PackedWord {
    fn size(&self) -> usize {
        self.len()
    }

    fn cuts(&self) -> SmallVec<[usize; 9]> {
        let n = self.len();
        let blocked = (0..n).fold(0u16, |acc, s| acc | BLOCKED[s][self.code(s) as usize]);
        let mut free = !blocked & ((1u16 << (n + 1)) - 1);
        let mut out = SmallVec::new();
        while free != 0 {
            out.push(free.trailing_zeros() as usize);
            free &= free - 1;
        }
        out
    }

    fn split(&self, at: usize) -> (Self, Self) {
        let n = self.len();
        let body = self.0 & ((1 << LEN_SHIFT) - 1);
        let cut = BITS * at as u32;
        let low = if at == 0 { 0 } else { body & ((1 << cut) - 1) };
        let high = if at >= Self::MAX_LEN { 0 } else { body >> cut };
        (PackedWord(low | (at as u64) << LEN_SHIFT), PackedWord(high | ((n - at) as u64) << LEN_SHIFT))
    }
}

impl fmt::Display for PackedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ins) in self.instructions().iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{ins}")?;
        }
        Ok(())
    }
}
