//! Parse, run, compose and encode register-machine programs.
//!
//!     cargo run --example machine

use haltreg::machine::{compose_hygienic, decode_program, encode_program, run, Program};

fn main() {
    // moves x into register 2 twice over, then back: doubles x
    let double: Program = "JZ 1 +5; DEC 1; INC 2; INC 2; JMP -4\nJZ 2 +4; DEC 2; INC 1; JMP -3".parse().unwrap();
    let inc: Program = "INC 1".parse().unwrap();
    let spin: Program = "JMP +0".parse().unwrap();
    let count_up: Program = "INC 2; JMP -1".parse().unwrap();

    for (name, p) in [("double", &double), ("inc", &inc), ("spin", &spin), ("count_up", &count_up)] {
        println!("{name}: {p}");
        println!("  on 5: {:?}", run(p, 5, 1000, 4096).unwrap());
    }

    // inc after double: x -> 2x + 1; the cleanup block zeroes double's scratch register
    let both = compose_hygienic(&inc, &double);
    println!("inc after double on 5: {:?}", run(&both, 5, 1000, 4096).unwrap().value());

    let code = encode_program(&inc);
    println!("code of [{inc}] = {code}, decodes to [{}]", decode_program(&code).program);
    println!("valid cuts of [{double}]: {:?}", double.valid_cuts());
}
