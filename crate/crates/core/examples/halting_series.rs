//! Generating series of programs and permutations: the halting series and
//! its inversion, the pattern classifier, `tau_f`, and closed forms for
//! finite orbits.
//!
//!     cargo run --example halting_series

use haltreg::machine::{BudgetPolicy, Program};
use haltreg::series::{
    classify_series, finite_orbit_rational, psi_coeffs, psi_perm, reconstruct_f, ClassifyOptions, ExtendedFn, FinitePermutation, Tau,
};

fn main() {
    let policy = BudgetPolicy::new(10_000, 4096);
    // the summability test accepts an estimated tail below the tolerance;
    // for a halting program it is about 1/(f^2 N) at horizon N
    let opts = ClassifyOptions { tolerance: 1e-2, ..Default::default() };
    for text in ["INC 1; INC 1", "JMP +0", "DEC 1"] {
        let ef = ExtendedFn::new(text.parse::<Program>().unwrap(), policy);
        let s = psi_coeffs(&ef, 3, 64).unwrap();
        let head: Vec<String> = s.coefficients.iter().take(4).map(|c| c.to_string()).collect();
        println!("[{text}] at 3: {} ...", head.join(", "));
        println!("  reconstructs to {:?}", reconstruct_f(&s).unwrap());
        match classify_series(&s, &opts) {
            Ok(c) => println!("  classified {:?}, partial sum at z = 1: {:.4}", c.verdict, c.abel_partial_sum),
            Err(e) => println!("  {e}"),
        }
    }

    // fixed points of tau_f are the pairs whose y is outside the domain
    let ef = ExtendedFn::new("DEC 1; DEC 1".parse().unwrap(), policy);
    let tau = Tau { ef: &ef };
    for y in 1..=4 {
        println!("tau(5, {y}) = {:?}, fixed: {}", tau.apply((5, y)).unwrap(), tau.is_fixed(y).unwrap());
    }

    let sigma = FinitePermutation::from_cycles(&[vec![1, 2, 3], vec![4, 5]]).unwrap();
    let closed = finite_orbit_rational(&sigma, 1, 10).unwrap();
    println!("orbit of 1 under (1 2 3)(4 5): {closed:?}");
    assert_eq!(closed.expand(30).coefficients, psi_perm(&sigma, 1, 30).unwrap().coefficients);
    println!("  closed form matches the series to z^30");
}
