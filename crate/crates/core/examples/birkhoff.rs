//! The Hopf algebra of programs: coproduct over valid cuts, antipode, and
//! the Birkhoff decomposition of the halting character.
//!
//!     cargo run --example birkhoff

use haltreg::hopf::{antipode, birkhoff_decompose, char_from_halting, coproduct, HopfElement};
use haltreg::machine::{BudgetPolicy, Program};

fn main() {
    let p: Program = "JMP +0; INC 1; JZ 2 +2; DEC 1".parse().unwrap();
    let x = HopfElement::generator(p.clone());
    println!("program [{p}], valid cuts {:?}", p.valid_cuts());
    println!("coproduct: {}", coproduct(&x));
    println!("antipode: {}", antipode(&x));

    let policy = BudgetPolicy::new(10_000, 4096);
    let phi = char_from_halting(1, &[p], &policy, 4).unwrap();
    println!("halting character at k = 1:\n{phi}");
    let pair = birkhoff_decompose(&phi, 4).unwrap();
    for check in &pair.checks {
        let w = &check.generator;
        println!("[{w}]");
        println!("  phi_- = {}", pair.minus.value(w).unwrap());
        println!("  phi_+ = {}", pair.plus.value(w).unwrap());
        println!("  identity {}", if check.passed() { "holds" } else { "FAILS" });
    }
}
