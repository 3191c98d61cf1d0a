use std::fmt;
use std::sync::Arc;

use super::AnytimeError;

/// A pair of growth scales `phi` (slow) and `psi` (fast) with the threshold
/// `x0` past which the monotonicity conditions are required to hold.
#[derive(Clone)]
pub struct ScalePair {
    pub label: String,
    pub phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub psi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub x0: u64,
}

impl fmt::Debug for ScalePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalePair").field("label", &self.label).field("x0", &self.x0).finish()
    }
}

impl Default for ScalePair {
    /// `phi(x) = ln(x + 2)`, `psi(x) = (x + 1)^1.5`, `x0 = 10`.
    fn default() -> Self {
        ScalePair::new("ln(x+2), (x+1)^1.5", |x| (x + 2.0).ln(), |x| (x + 1.0).powf(1.5), 10)
    }
}

impl ScalePair {
    pub fn new(
        label: &str,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        psi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        x0: u64,
    ) -> ScalePair {
        ScalePair { label: label.to_string(), phi: Arc::new(phi), psi: Arc::new(psi), x0 }
    }

    pub fn phi(&self, x: u64) -> f64 {
        (self.phi)(x as f64)
    }

    pub fn psi(&self, x: u64) -> f64 {
        (self.psi)(x as f64)
    }

    /// `x / phi(x)`: the randomness threshold.
    pub fn random_threshold(&self, x: u64) -> f64 {
        x as f64 / self.phi(x)
    }

    /// Checks pointwise on `x0..ceiling` that `phi`, `x / phi(x)`, `psi` and
    /// `psi(x) / (x * phi(psi(x)))` are all strictly increasing.
    pub fn validate(&self, ceiling: u64) -> Result<(), AnytimeError> {
        let fail = |x: u64, what: &str| Err(AnytimeError::InvalidScales(format!("{} at x = {x}: {what}", self.label)));
        let growth = |x: f64| {
            let p = (self.psi)(x);
            p / (x * (self.phi)(p))
        };
        for x in self.x0.max(1)..ceiling {
            let (a, b) = (x as f64, (x + 1) as f64);
            let (p0, p1) = ((self.phi)(a), (self.phi)(b));
            let (s0, s1) = ((self.psi)(a), (self.psi)(b));
            let (g0, g1) = (growth(a), growth(b));
            if ![p0, p1, s0, s1, g0, g1].iter().all(|v| v.is_finite() && *v > 0.0) {
                return fail(x, "not a positive real");
            }
            if p1 <= p0 {
                return fail(x, "phi not increasing");
            }
            if b / p1 <= a / p0 {
                return fail(x, "x / phi(x) not increasing");
            }
            if s1 <= s0 {
                return fail(x, "psi not increasing");
            }
            if g1 <= g0 {
                return fail(x, "psi(x) / (x phi(psi(x))) not increasing");
            }
        }
        Ok(())
    }
}
