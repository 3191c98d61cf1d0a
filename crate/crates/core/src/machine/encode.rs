use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::{Instruction, Program, MAX_PROGRAM_LEN, MAX_REGISTER};
use crate::numberings::pairing::{pair_big, unpair_big, unzigzag, zigzag};

const TAG_INC: u32 = 0;
const TAG_DEC: u32 = 1;
const TAG_JZ: u32 = 2;
const TAG_JMP: u32 = 3;

/// Zero-based code of one instruction: the opcode tag paired with its
/// operand payload.
pub fn encode_instruction(ins: &Instruction) -> BigUint {
    let (tag, payload) = match *ins {
        Instruction::Inc(r) => (TAG_INC, BigUint::from(r - 1)),
        Instruction::Dec(r) => (TAG_DEC, BigUint::from(r - 1)),
        Instruction::Jz(r, d) => (TAG_JZ, pair_big(&BigUint::from(r - 1), &BigUint::from(zigzag(d as i64)))),
        Instruction::Jmp(d) => (TAG_JMP, BigUint::from(zigzag(d as i64))),
    };
    pair_big(&BigUint::from(tag), &payload)
}

/// Positive code of a program: `1 + pair(len, chain)` where the chain
/// right-folds the instruction codes with Cantor pairing.
pub fn encode_program(p: &Program) -> BigUint {
    let codes: Vec<BigUint> = p.instructions().iter().map(encode_instruction).collect();
    let body = match codes.split_last() {
        None => BigUint::zero(),
        Some((last, init)) => init.iter().rev().fold(last.clone(), |acc, c| pair_big(c, &acc)),
    };
    pair_big(&BigUint::from(p.size()), &body) + 1u32
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub program: Program,
    /// False when the code does not name a valid program; `program` is then
    /// the empty program.
    pub canonical: bool,
}

/// Total inverse of [`encode_program`].
pub fn decode_program(n: &BigUint) -> Decoded {
    match try_decode(n) {
        Some(program) => Decoded { program, canonical: true },
        None => Decoded { program: Program::empty(), canonical: false },
    }
}

fn try_decode(n: &BigUint) -> Option<Program> {
    if n.is_zero() {
        return None;
    }
    let (len, mut body) = unpair_big(&(n - 1u32));
    let len = len.to_usize().filter(|&l| l <= MAX_PROGRAM_LEN)?;
    if len == 0 {
        return body.is_zero().then(Program::empty);
    }
    let mut out = Vec::with_capacity(len);
    for _ in 0..len - 1 {
        let (head, rest) = unpair_big(&body);
        out.push(decode_instruction(&head)?);
        body = rest;
    }
    out.push(decode_instruction(&body)?);
    Program::new(out).ok()
}

fn decode_instruction(code: &BigUint) -> Option<Instruction> {
    let (tag, payload) = unpair_big(code);
    let register = |v: &BigUint| v.to_u32().and_then(|r| r.checked_add(1)).filter(|&r| r <= MAX_REGISTER);
    let offset = |v: &BigUint| unzigzag(v).and_then(|d| i32::try_from(d).ok());
    match tag.to_u32()? {
        TAG_INC => Some(Instruction::Inc(register(&payload)?)),
        TAG_DEC => Some(Instruction::Dec(register(&payload)?)),
        TAG_JZ => {
            let (r, d) = unpair_big(&payload);
            Some(Instruction::Jz(register(&r)?, offset(&d)?))
        }
        TAG_JMP => Some(Instruction::Jmp(offset(&payload)?)),
        _ => None,
    }
}
