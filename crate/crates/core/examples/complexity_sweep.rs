//! Sweeps the universal evaluator into a complexity table, resuming from
//! an on-disk cache, and derives the Kolmogorov order.
//!
//!     cargo run --release --example complexity_sweep -- [k_max] [cache dir]

use std::path::PathBuf;

use haltreg::cache::cached_complexity_table;
use haltreg::numberings::{kolmogorov_order, RSequence, Universal};

fn main() {
    let mut args = std::env::args().skip(1);
    let k_max: u64 = args.next().map_or(5000, |s| s.parse().expect("k_max"));
    let dir = args.next().map_or_else(|| std::env::temp_dir().join("haltreg-example-cache"), PathBuf::from);

    let u = Universal::with_capacity(RSequence::powers_of_two(), k_max as usize);
    let (table, stats) = cached_complexity_table(&dir, &u, 2000, 4096, k_max).expect("cache usable");
    println!("cache {}: {} reused, {} computed", dir.display(), stats.reused, stats.computed);
    println!(
        "{} indices, {} steps, {} unknown; certified prefix 1..={}",
        table.k_max,
        table.total_steps,
        table.unknown,
        table.certified_prefix()
    );
    for x in [1, 2, 3, 10, 100, 1000] {
        println!("  C({x}) <= {:?}, certified {:?}", table.upper_bound(x), table.certified(x));
    }

    let k = kolmogorov_order(&table).expect("nonempty certified set");
    let head: Vec<u64> = (1..=10).filter_map(|r| k.element(r)).collect();
    println!("K order starts {head:?}; c0 = {:?}", k.c0);
}
