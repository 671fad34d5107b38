//! Precision-parameterized numeric substrate.
//!
//! Everything downstream is generic over a [`PrecisionContext`] that fixes
//! the working precision in decimal digits (plus guard digits absorbed into
//! the mantissa) and the quadrature policy. All operations are pure
//! functions of their inputs and reproducible bit-for-bit for a fixed
//! context.

mod complex;
mod cubic;
mod pfq;
mod quad;

pub use complex::ComplexValue;
pub use cubic::solve_cubic;
pub use pfq::pfq;
pub use quad::{integrate_ray, integrate_segment, integrate_segment_vec};

use rug::Float;

/// Errors shared by every numeric module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A quadrature did not converge within the panel budget.
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),
    /// An input violated a documented domain restriction.
    #[error("domain violation: {0}")]
    Domain(String),
    /// A series diverges for the requested argument.
    #[error("series divergence: {0}")]
    Divergence(String),
    /// A Hankel pivot fell below the precision floor at degree `n`:
    /// insufficient precision or genuine nonexistence of `P_n`.
    #[error("pivot collapse at degree {n}: |pivot|/max = {ratio}")]
    PivotCollapse { n: usize, ratio: f64 },
    /// Two cubic roots are equidistant from the series prediction, so the
    /// analytic branch cannot be identified.
    #[error("branch ambiguity: {0}")]
    BranchAmbiguity(String),
    /// Evaluation point touches a branch cut.
    #[error("branch-cut contact: {0}")]
    CutContact(String),
    /// The ODE integrator's step size underflowed away from any pole.
    #[error("ODE step underflow at lambda = {0}")]
    StepUnderflow(f64),
    /// A pole fit's residual exceeded its acceptance threshold.
    #[error("pole fit rejected: {0}")]
    FitRejected(String),
    /// Asymptotic-seed truncation error exceeds the target tolerance.
    #[error("asymptotic seed not accurate enough: {0}")]
    SeedInaccurate(String),
    /// Richardson table for a limit did not stabilize.
    #[error("extrapolation failure: {0}")]
    ExtrapolationFailure(String),
    /// Evaluation outside the documented validity radius of a local map.
    #[error("radius violation: {0}")]
    RadiusViolation(String),
    /// Configuration or I/O error in the harness.
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Working precision plus quadrature policy, threaded through every numeric
/// call.
///
/// `digits` is the *target* precision in decimal digits; `guard_digits`
/// extra digits are carried in the mantissa so that results are trustworthy
/// to roughly `10^-digits` relative. Quadrature panels use `panel_nodes`
/// Gauss–Legendre nodes and may subdivide adaptively up to `max_panels`
/// panels per integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionContext {
    pub digits: u32,
    pub guard_digits: u32,
    pub panel_nodes: u32,
    pub max_panels: u32,
}

const LOG2_10: f64 = 3.321928094887362;

impl PrecisionContext {
    /// Context with the given decimal digits and default policy.
    ///
    /// Panics if `digits < 15` (below that, use `f64`).
    pub fn new(digits: u32) -> Self {
        assert!(digits >= 15, "PrecisionContext requires digits >= 15");
        Self {
            digits,
            guard_digits: 10,
            // Gauss–Legendre error decays exponentially in the node count
            // for analytic integrands, so the per-panel order scales with
            // the precision target; adaptivity covers the constant.
            panel_nodes: (digits * 3 / 5).clamp(24, 200),
            max_panels: 65_536,
        }
    }

    /// Default precision for a matrix-model computation of size `n`:
    /// the moment pipeline loses O(N) digits, so precision scales with N.
    pub fn for_model(n: u32) -> Self {
        Self::new(40.max(3 * n))
    }

    /// Mantissa length in bits (digits + guard digits, plus slack).
    pub fn prec(&self) -> u32 {
        (((self.digits + self.guard_digits) as f64) * LOG2_10).ceil() as u32 + 16
    }

    /// A fresh `Float` of this precision holding `v`.
    pub fn f<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.prec(), v)
    }

    /// π at working precision.
    pub fn pi(&self) -> Float {
        self.f(rug::float::Constant::Pi)
    }

    /// `10^-digits`, the relative tolerance targeted by iterative schemes.
    pub fn eps(&self) -> Float {
        let mut e = self.f(10);
        e.pow_assign_i32(-(self.digits as i32));
        e
    }

    /// `10^(-digits+guard)`, the accuracy actually guaranteed by results.
    pub fn eps_guarded(&self) -> Float {
        let mut e = self.f(10);
        e.pow_assign_i32(-(self.digits as i32) + self.guard_digits as i32);
        e
    }

    /// Complex zero at working precision.
    pub fn czero(&self) -> ComplexValue {
        ComplexValue::new(self.f(0), self.f(0))
    }

    /// Complex value from real/imag `f64` parts.
    pub fn c64(&self, re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(self.f(re), self.f(im))
    }

    /// Fixed-precision decimal string for bit-stable serialization.
    pub fn to_decimal(&self, x: &Float) -> String {
        format!("{:.*e}", self.digits as usize, x)
    }
}

trait PowAssignI32 {
    fn pow_assign_i32(&mut self, e: i32);
}

impl PowAssignI32 for Float {
    fn pow_assign_i32(&mut self, e: i32) {
        use rug::ops::PowAssign;
        self.pow_assign(e);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_context_maps_digits_to_bits() {
        let ctx = PrecisionContext::new(40);
        // 50 digits of mantissa need at least 167 bits.
        assert!(ctx.prec() >= 167);
        let x = ctx.f(2).sqrt();
        let sq = x.clone().square();
        let err = (sq - 2u32).abs();
        assert!(err < ctx.eps());
    }

    #[test]
    fn model_default_digits() {
        assert_eq!(PrecisionContext::for_model(10).digits, 40);
        assert_eq!(PrecisionContext::for_model(80).digits, 240);
    }

    #[test]
    #[should_panic]
    fn rejects_tiny_precision() {
        let _ = PrecisionContext::new(10);
    }
}
