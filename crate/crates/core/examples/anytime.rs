//! Cost estimates and the randomness/growth trichotomy on a few programs.
//!
//!     cargo run --release --example anytime

use haltreg::anytime::{runtime_complexity_scan, trichotomy_classify, ScalePair};
use haltreg::machine::{BudgetPolicy, Program};
use haltreg::numberings::complexity_table;

fn main() {
    let policy = BudgetPolicy::new(10_000, 4096);
    let table = complexity_table(2000, 20_000);
    let scales = ScalePair::default();
    for text in ["INC 1; INC 1", "JZ 1 +2; JMP +0", "DEC 1; JZ 1 +2; JMP -2"] {
        let p: Program = text.parse().unwrap();
        let report = trichotomy_classify(&p, 1..=40, &scales, &table, &policy).unwrap();
        let branches: Vec<String> = report.records.iter().take(4).map(|r| format!("{}:{:?}", r.x, r.branch)).collect();
        println!("[{text}] {} ...; {} unknown, {} unsettled", branches.join(" "), report.unknown.len(), report.unsettled.len());
        let fit = runtime_complexity_scan(&p, 1..=40, &table, &policy).unwrap();
        println!("  C(t(x)) <= {:?} x over {} halting inputs", fit.t.constant, fit.halting_inputs);
    }
}
