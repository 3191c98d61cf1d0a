use std::collections::BTreeMap;

use super::{Instruction, MachineError, Program, MAX_PROGRAM_LEN};

/// Compiles a finite table `x -> y` into a program that halts with `y` on
/// each listed `x` and loops on a provable self-jump everywhere else.
///
/// Layout: move r1 into r2, count r2 down one step per level, and at level
/// `x` either branch to the handler writing `y` or to the shared `JMP 0`.
pub fn tab_translate(table: &[(u64, u64)]) -> Result<Program, MachineError> {
    let mut entries = BTreeMap::new();
    for &(x, y) in table {
        if x == 0 {
            return Err(MachineError::InvalidInput(0));
        }
        if entries.insert(x, y).is_some() {
            return Err(MachineError::DuplicateKey(x));
        }
    }
    let Some(&max_key) = entries.keys().next_back() else {
        return Ok(Program(vec![Instruction::Jmp(0)]));
    };

    let dispatch = 5usize;
    let fallback = dispatch + 2 * max_key as usize;
    let handler_len: usize = entries.values().map(|&y| y as usize + 1).sum();
    let len = fallback + 1 + handler_len;
    if len > MAX_PROGRAM_LEN {
        return Err(MachineError::InvalidProgram(format!("table compiles to {len} instructions")));
    }

    let mut handler_at = BTreeMap::new();
    let mut pos = fallback + 1;
    for (&x, &y) in &entries {
        handler_at.insert(x, pos);
        pos += y as usize + 1;
    }

    let rel = |from: usize, to: usize| (to as i64 - from as i64) as i32;
    let mut code = vec![
        Instruction::Jz(1, 4),
        Instruction::Dec(1),
        Instruction::Inc(2),
        Instruction::Jmp(-3),
        Instruction::Dec(2),
    ];
    for level in 1..=max_key {
        let here = code.len();
        let target = handler_at.get(&level).copied().unwrap_or(fallback);
        code.push(Instruction::Jz(2, rel(here, target)));
        code.push(Instruction::Dec(2));
    }
    code.push(Instruction::Jmp(0));
    for &y in entries.values() {
        code.extend(std::iter::repeat(Instruction::Inc(1)).take(y as usize));
        let here = code.len();
        code.push(Instruction::Jmp(rel(here, len)));
    }
    debug_assert_eq!(code.len(), len);
    Program::new(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{is_hygienic, run, BudgetPolicy};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_table_diverges_everywhere() {
        let p = tab_translate(&[]).unwrap();
        for x in 1..10 {
            assert!(run(&p, x, 100, 100).unwrap().is_divergent());
        }
    }

    #[test]
    fn single_entry() {
        let p = tab_translate(&[(1, 5)]).unwrap();
        assert_eq!(run(&p, 1, 1000, 1000).unwrap().value(), Some(5));
        assert!(run(&p, 2, 1000, 1000).unwrap().is_divergent());
    }

    #[test]
    fn duplicate_keys_rejected() {
        assert_eq!(tab_translate(&[(2, 1), (2, 3)]), Err(MachineError::DuplicateKey(2)));
    }

    #[test]
    fn agrees_with_table_on_random_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pol = BudgetPolicy::new(100_000, 10_000);
        for _ in 0..50 {
            let n = rng.gen_range(0..6);
            let mut table: BTreeMap<u64, u64> = BTreeMap::new();
            while table.len() < n {
                table.insert(rng.gen_range(1..25), rng.gen_range(0..30));
            }
            let pairs: Vec<_> = table.iter().map(|(&x, &y)| (x, y)).collect();
            let p = tab_translate(&pairs).unwrap();
            for x in 1..30 {
                let out = run(&p, x, pol.step_budget, pol.space_budget).unwrap();
                match table.get(&x) {
                    Some(&y) => assert_eq!(out.value(), Some(y)),
                    None => assert!(out.is_divergent(), "x={x}"),
                }
            }
            let keys: Vec<u64> = table.keys().copied().collect();
            assert!(is_hygienic(&p, &keys, &pol).unwrap().is_hygienic());
        }
    }
}
