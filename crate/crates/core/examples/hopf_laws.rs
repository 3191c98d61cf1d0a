//! Checks the bialgebra and antipode laws on every valid program up to a
//! given size (default 6) over registers 1..=2 and jump offsets -2..=2.
//!
//!     cargo run --release --example hopf_laws -- 5

use std::time::Instant;

use haltreg::hopf::check_laws;
use haltreg::machine::Alphabet;

fn main() {
    let max_size = std::env::args().nth(1).map_or(6, |s| s.parse().expect("size"));
    let start = Instant::now();
    let report = check_laws(&Alphabet::new(2, 2), max_size).expect("alphabet fits packed words");
    for (size, n) in report.programs_by_size.iter().enumerate().skip(1) {
        println!("size {size}: {n} programs");
    }
    println!("{} generators, {} failures, {:.1?}", report.programs(), report.failures.len(), start.elapsed());
    for f in report.failures.iter().take(10) {
        println!("  {} fails {}", f.program, f.law);
    }
}
