//! Configurable-precision numerical laboratory for the cubic random matrix
//! model with potential `V(z; u) = z²/2 − u·z³` on rotated-ray contours.
//!
//! The crate computes every object needed to verify the model's double
//! scaling limit at desk scale:
//!
//! * [`numkernel`] — precision-parameterized real/complex arithmetic, cubic
//!   root finding, and adaptive segment/ray quadrature. Everything else
//!   sits on top of this substrate.
//! * [`equilibrium`] — closed-form equilibrium-measure data: endpoint cubics,
//!   densities, resolvents, the critical φ-function, the modified signed
//!   measure near criticality, and the local conformal maps at the right
//!   endpoint.
//! * [`painleve1`] — the Painlevé I transcendent `y″ = 6y² + λ`: asymptotic
//!   seeding on the negative axis, adaptive integration, pole detection with
//!   Laurent continuation, the Hamiltonian, and the antiderivative `Y″ = y`.
//! * [`orthopoly`] — moments, norms `h_n`, and recurrence coefficients
//!   `γ²_n`, `β_n` of the monic polynomials orthogonal with respect to
//!   `e^{−N·V}` on the contour `Γ = α·Γ₀ + (1−α)·Γ₁`.
//! * [`partition`] — partition function from norms, the Gaussian reference
//!   value (Selberg), free energy, the `t`-variable change, and the exact
//!   Toda identity as a finite-`N` test.
//! * [`scaling`] — the asymptotic predictions as executable formulas:
//!   regular free-energy series `F⁽⁰⁾`, `F⁽²⁾` (with a generic terminating
//!   hypergeometric evaluator), double-scaling variable maps,
//!   recurrence-coefficient predictions, the regular/singular partition
//!   split, and the zeros-vs-poles experiment.
//! * [`harness`] — named experiments behind a CLI with bit-stable result
//!   files.

pub mod equilibrium;
pub mod harness;
pub mod numkernel;
pub mod orthopoly;
pub mod painleve1;
pub mod partition;
pub mod scaling;

pub use numkernel::{ComplexValue, Error, PrecisionContext, Result};
