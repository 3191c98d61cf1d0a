use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{to_f64, Provenance, SeriesError, SeriesTruncation, SparseSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub min_horizon: usize,
    /// Largest estimated tail sum accepted as convergence.
    pub tolerance: f64,
    pub max_period: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { min_horizon: 32, tolerance: 1e-6, max_period: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// Eventually constant and nonzero: a simple pole at `z = 1`.
    PolarAtOne,
    /// Eventually periodic with this least period: simple poles at roots of
    /// unity.
    RootOfUnityRational { period: usize },
    /// Absolutely summable: analytic inside and continuous up to the circle.
    RegularOnDisk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub horizon: usize,
    /// Sum of the available coefficients, i.e. the truncation at `z = 1`.
    pub abel_partial_sum: f64,
    /// Estimated sum of the coefficients past the horizon, for summable
    /// series.
    pub tail_estimate: Option<f64>,
}

/// Sorts a truncation into one of three patterns by looking at the second
/// half of its coefficients. Periodicity is tested exactly; summability uses
/// a power-law fit `|c_n| ~ n^-p` between `N/2` and `N` and the integral
/// bound `|c_N| N / (p - 1)` on the tail.
pub fn classify_series(s: &SeriesTruncation, opts: &ClassifyOptions) -> Result<Classification, SeriesError> {
    let c = &s.coefficients;
    let abel = c.iter().map(to_f64).sum::<f64>();
    let inconclusive = |reason: String| Err(SeriesError::Inconclusive { reason, abel_partial_sum: abel });
    if s.horizon() < opts.min_horizon || c.len() < 4 {
        return inconclusive(format!("horizon {} below {}", s.horizon(), opts.min_horizon));
    }
    let done = |verdict, tail_estimate| Ok(Classification { verdict, horizon: s.horizon(), abel_partial_sum: abel, tail_estimate });

    let tail = &c[c.len() / 2..];
    let period = (1..=opts.max_period.min(tail.len() / 2)).find(|&p| tail.iter().zip(&tail[p..]).all(|(a, b)| a == b));
    if let Some(p) = period {
        if tail.iter().all(Zero::is_zero) {
            return done(Verdict::RegularOnDisk, Some(0.0));
        }
        return done(if p == 1 { Verdict::PolarAtOne } else { Verdict::RootOfUnityRational { period: p } }, None);
    }

    let mags: Vec<f64> = tail.iter().map(|q| to_f64(&q.abs())).collect();
    if mags.windows(2).any(|w| w[1] > w[0]) {
        return inconclusive("tail is neither periodic nor monotone".into());
    }
    let n = s.horizon() as f64;
    let (first, last) = (mags[0], mags[mags.len() - 1]);
    if last <= 0.0 {
        return done(Verdict::RegularOnDisk, Some(0.0));
    }
    let n0 = (s.start + c.len() / 2) as f64;
    let p = (first / last).ln() / (n / n0).ln();
    if !(p > 1.0) {
        return inconclusive(format!("tail decays like n^-{p:.3}, not summably"));
    }
    let estimate = last * n / (p - 1.0);
    if estimate >= opts.tolerance {
        return inconclusive(format!("estimated tail {estimate:.3e} not below {:.1e}", opts.tolerance));
    }
    done(Verdict::RegularOnDisk, Some(estimate))
}

/// Classifies the longest run of consecutive exponents `1..=M` of a sparse
/// series; exponents beyond a gap are unknown rather than zero.
pub fn classify_sparse(s: &SparseSeries, opts: &ClassifyOptions) -> Result<Classification, SeriesError> {
    let m = (1..).take_while(|e| s.terms.contains_key(e)).count();
    let dense = SeriesTruncation {
        start: 1,
        coefficients: (1..=m as u64).map(|e| s.terms[&e].clone()).collect(),
        provenance: Provenance::Other { label: "sparse prefix".into() },
    };
    let total = to_f64(&s.constant) + s.terms.values().map(to_f64).sum::<f64>();
    match classify_series(&dense, opts) {
        Ok(mut c) => {
            c.abel_partial_sum = total;
            Ok(c)
        }
        Err(SeriesError::Inconclusive { reason, .. }) => Err(SeriesError::Inconclusive { reason, abel_partial_sum: total }),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{psi_coeffs_for_value, psi_perm, FinitePermutation, ShiftPermutation};
    use num_rational::BigRational;

    #[test]
    fn all_ones_is_polar() {
        let c = classify_series(&psi_coeffs_for_value(1, 0, 64), &ClassifyOptions::default()).unwrap();
        assert_eq!(c.verdict, Verdict::PolarAtOne);
        assert_eq!(c.abel_partial_sum, 65.0);
    }

    #[test]
    fn transposition_is_periodic() {
        let t = FinitePermutation::from_cycles(&[vec![1, 2]]).unwrap();
        let c = classify_series(&psi_perm(&t, 1, 64).unwrap(), &ClassifyOptions::default()).unwrap();
        assert_eq!(c.verdict, Verdict::RootOfUnityRational { period: 2 });
        let t = FinitePermutation::from_cycles(&[vec![1, 2, 3], vec![4, 5]]).unwrap();
        let c = classify_series(&psi_perm(&t, 2, 64).unwrap(), &ClassifyOptions::default()).unwrap();
        assert_eq!(c.verdict, Verdict::RootOfUnityRational { period: 3 });
    }

    #[test]
    fn inverse_squares_are_regular_near_zeta_two() {
        // c_n = 1/(1+n)^2 from n = 0; the tail past N is about 1/N
        let s = psi_coeffs_for_value(1, 1, 2_000_000);
        let c = classify_series(&s, &ClassifyOptions::default()).unwrap();
        assert_eq!(c.verdict, Verdict::RegularOnDisk);
        let tail = c.tail_estimate.unwrap();
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(c.abel_partial_sum < zeta2);
        assert!(zeta2 - c.abel_partial_sum <= tail * 1.01);
        assert!(zeta2 - c.abel_partial_sum >= tail * 0.99);
    }

    #[test]
    fn short_or_slow_series_are_inconclusive() {
        let err = classify_series(&psi_coeffs_for_value(1, 1, 10), &ClassifyOptions::default()).unwrap_err();
        assert!(matches!(err, SeriesError::Inconclusive { .. }));
        // 1/(1+n)^2 at horizon 1000 leaves a tail near 1e-3
        let err = classify_series(&psi_coeffs_for_value(1, 1, 1000), &ClassifyOptions::default()).unwrap_err();
        assert!(matches!(err, SeriesError::Inconclusive { .. }));
        let loose = ClassifyOptions { tolerance: 1e-2, ..Default::default() };
        assert_eq!(classify_series(&psi_coeffs_for_value(1, 1, 1000), &loose).unwrap().verdict, Verdict::RegularOnDisk);
        // harmonic coefficients are not summable
        let s = SeriesTruncation {
            start: 1,
            coefficients: (1..=500).map(|n| BigRational::new(1.into(), n.into())).collect(),
            provenance: Provenance::Other { label: "harmonic".into() },
        };
        assert!(classify_series(&s, &ClassifyOptions::default()).is_err());
    }

    #[test]
    fn polynomial_is_regular() {
        let mut s = psi_coeffs_for_value(1, 2, 40);
        for c in s.coefficients.iter_mut().skip(5) {
            *c = BigRational::zero();
        }
        assert_eq!(classify_series(&s, &ClassifyOptions::default()).unwrap().verdict, Verdict::RegularOnDisk);
    }

    #[test]
    fn sparse_prefix() {
        let order = crate::numberings::KOrderTable::identity(100);
        let phi = crate::series::phi_korder(&ShiftPermutation, 1, &order, 99).unwrap();
        let loose = ClassifyOptions { tolerance: 1e-1, ..Default::default() };
        let c = classify_sparse(&phi, &loose).unwrap();
        assert_eq!(c.verdict, Verdict::RegularOnDisk);
        let id = FinitePermutation::identity();
        let phi = crate::series::phi_korder(&id, 3, &order, 40).unwrap();
        assert_eq!(classify_sparse(&phi, &ClassifyOptions::default()).unwrap().verdict, Verdict::PolarAtOne);
    }
}
