//! Explicit numberings of pairs and words, and the slowly growing `N_R`
//! numbering with its shells.
//!
//!     cargo run --example numberings

use num_bigint::BigUint;

use haltreg::numberings::nr::{shell, shell_card};
use haltreg::numberings::{bin_number, cantor_pair, cantor_unpair, nr_element, nr_number, RSequence};

fn main() {
    println!("binary words 1..8: {:?}", (1..=8).map(|n| bin_number(n).unwrap()).collect::<Vec<_>>());
    println!("Cantor 1..10: {:?}", (1..=10).map(|n| cantor_unpair(n).unwrap()).collect::<Vec<_>>());
    println!("cantor_pair(3, 4) = {}", cantor_pair(3, 4).unwrap());

    for r in [RSequence::powers_of_two(), RSequence::identity()] {
        println!("R = {}", r.label());
        let first: Vec<_> = (1..=12u32).map(|n| nr_element(&n.into(), &r).unwrap()).collect();
        println!("  first pairs: {first:?}");
        println!("  N_R(3, 5) = {}", nr_number(3, 5, &r).unwrap());
        for m in 6..=8u32 {
            let m = BigUint::from(m);
            println!("  shell {m}: {:?}, card V({m}) = {}", shell(&m, &r), shell_card(&m, &r));
        }
    }
}
