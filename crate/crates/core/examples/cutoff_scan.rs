//! The time cut-off prescription: declare a run undefined once it exceeds
//! `c x^2` steps, and watch the verdicts settle as `c` grows.
//!
//!     cargo run --release --example cutoff_scan

use haltreg::anytime::{cutoff_scan, CutoffPolicy};
use haltreg::machine::{enumerate_programs, Alphabet};

fn main() {
    let programs = enumerate_programs(&Alphabet::new(2, 2), 2);
    println!("{} programs of size <= 2", programs.len());
    println!("   c  x  budget  halted  divergent  unknown  fraction");
    for c in [1, 2, 4, 8] {
        let report = cutoff_scan(&programs, 1..=4, &CutoffPolicy::quadratic(c), 100_000).unwrap();
        for row in &report.rows {
            let fraction = row.halting_fraction.map_or("-".to_string(), |f| format!("{f:.3}"));
            println!("{c:>4} {:>2} {:>7} {:>7} {:>10} {:>8}  {fraction}", row.x, row.budget, row.halted, row.proven_divergent, row.unknown);
        }
    }
}
