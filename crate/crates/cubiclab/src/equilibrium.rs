//! Equilibrium-measure data for the cubic external field `V(z) = z²/2 − u·z³`.
//!
//! For `0 ≤ u ≤ u_c = 3^{1/4}/18` the equilibrium measure lives on a single
//! interval `[a, b]` whose midpoint `x` satisfies `τ = u·x` with
//! `18τ³ − 9τ² + τ − 6u² = 0` (the branch vanishing at `u = 0`). The module
//! also provides the critical-point objects in the rescaled ζ-plane: the
//! critical density and resolvent on `[−1, 1]`, the φ-function
//! `φ_cr`, the modified signed measure `ψ_u` on `[σ_u, 1]` valid in a
//! neighborhood of `u_c`, and the local conformal maps `f`, `h_u` at the
//! right endpoint that define the double-scaling variable λ.

use crate::numkernel::{solve_cubic, ComplexValue, Error, PrecisionContext, Result};
use crate::numkernel::{integrate_segment, integrate_segment_vec};
use rug::ops::Pow;
use rug::Float;

/// Validity radius `|u − u_c|` of the modified-measure construction. The
/// underlying lemma only asserts "small"; this constant is the documented
/// choice, comfortably inside the region where the σ-cubic keeps a simple
/// real root near −1.
pub const MODIFIED_MEASURE_RADIUS: f64 = 1e-2;

/// Radius of the ζ-disc around 1 where the conformal maps are evaluated.
pub const CONFORMAL_RADIUS: f64 = 0.5;

/// The critical coupling `u_c = 3^{1/4}/18`.
pub fn u_critical(ctx: &PrecisionContext) -> Float {
    ctx.f(3).pow(ctx.f(0.25f64)) / 18u32
}

/// One-interval equilibrium data at coupling `u`.
#[derive(Debug, Clone)]
pub struct EquilibriumData {
    pub u: Float,
    /// `s = 108·√3·u²` ∈ [0, 1]; `s = 1` is criticality.
    pub s: Float,
    /// The endpoint-cubic branch `τ₃` with `τ₃ → 0` as `u → 0`.
    pub tau: Float,
    pub a: Float,
    pub b: Float,
    /// Interval midpoint `x = τ/u` (by series for tiny `u`).
    pub x_mid: Float,
    /// Interval half-width `y = 2/√(1−6τ)`.
    pub y_half: Float,
    /// Extra root of the density in ζ-coordinates; `+∞` at `u = 0`,
    /// decreasing to 1 at `u = u_c`.
    pub zeta0: Float,
}

/// Solves the endpoint cubic on the `τ₃` branch and fills the derived
/// endpoint data.
///
/// Rejects `u < 0` and `u > u_c` (two-cut / complex-endpoint territory is
/// out of scope). For `u < 10^(−digits/4)` the ratio `x = τ/u` is formed
/// from the series `τ₃ = 6u² + 324u⁴ + O(u⁶)` to avoid 0/0 cancellation.
pub fn solve_equilibrium(u: &Float, ctx: &PrecisionContext) -> Result<EquilibriumData> {
    let prec = ctx.prec();
    let uc = u_critical(ctx);
    if u.is_sign_negative() && !u.is_zero() {
        return Err(Error::Domain("solve_equilibrium: u < 0".into()));
    }
    if *u > Float::with_val(prec, &uc + &ctx.eps()) {
        return Err(Error::Domain(
            "solve_equilibrium: u > u_c (endpoints become complex)".into(),
        ));
    }
    let s = Float::with_val(prec, u.clone().square() * 108u32) * ctx.f(3).sqrt();

    let series_threshold = ctx.f(10).pow(-(ctx.digits as i32) / 4);
    let u2 = u.clone().square();
    let tau_series = Float::with_val(prec, &u2 * 6u32)
        + Float::with_val(prec, u2.clone().square() * 324u32);
    let (tau, x_mid) = if *u < series_threshold {
        // τ/u by the series; the dropped O(u⁶) term is below the precision
        // floor relative to τ ~ 6u² once u < 10^(−digits/4).
        let x = Float::with_val(prec, u * 6u32)
            + Float::with_val(prec, u.clone().square() * u) * 324u32;
        (tau_series, x)
    } else {
        let c0 = -(Float::with_val(prec, &u2 * 6u32));
        let roots = solve_cubic(&ctx.f(18), &ctx.f(-9), &ctx.f(1), &c0, ctx)?;
        // τ₃ is the smallest real root; cross-check against the series
        // predictor, which is closest to τ₃ on the whole branch.
        let mut best: Option<(Float, Float)> = None;
        for r in &roots {
            let d = (r.re.clone() - &tau_series).abs();
            match &best {
                Some((bd, _)) if *bd <= d => {}
                _ => best = Some((d, r.re.clone())),
            }
        }
        let tau = best.unwrap().1;
        let x = Float::with_val(prec, &tau / u);
        (tau, x)
    };

    let one_m6t = Float::with_val(prec, 1) - Float::with_val(prec, &tau * 6u32);
    let y_half = ctx.f(2) / one_m6t.clone().sqrt();
    let a = Float::with_val(prec, &x_mid - &y_half);
    let b = Float::with_val(prec, &x_mid + &y_half);
    let zeta0 = if u.is_zero() {
        Float::with_val(prec, rug::float::Special::Infinity)
    } else {
        one_m6t.pow(ctx.f(1.5f64)) / Float::with_val(prec, u * 6u32)
    };
    Ok(EquilibriumData {
        u: Float::with_val(prec, u),
        s,
        tau,
        a,
        b,
        x_mid,
        y_half,
        zeta0,
    })
}

/// Equilibrium density `ρ_u(z) = (1/2π)·√((z−a)(b−z))·(1 − 3uz − 3ux)` on
/// `[a, b]`.
pub fn density(eq: &EquilibriumData, z: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if *z < eq.a || *z > eq.b {
        return Err(Error::Domain("density: z outside [a, b]".into()));
    }
    let prec = ctx.prec();
    let root = (Float::with_val(prec, z - &eq.a) * Float::with_val(prec, &eq.b - z)).sqrt();
    let lin = Float::with_val(prec, 1)
        - Float::with_val(prec, &eq.u * z) * 3u32
        - Float::with_val(prec, &eq.u * &eq.x_mid) * 3u32;
    Ok(root * lin / (ctx.pi() * 2u32))
}

/// `∫ₐᵇ ρ_u`, via the substitution `z = x + y·sin θ` which removes the
/// square-root endpoint singularities.
pub fn density_mass(eq: &EquilibriumData, ctx: &PrecisionContext) -> Result<Float> {
    let prec = ctx.prec();
    let half_pi = ctx.pi() / 2u32;
    let g = |theta: &Float| -> ComplexValue {
        let (sin, cos) = theta.clone().sin_cos(Float::new(prec));
        let z = Float::with_val(prec, &eq.y_half * &sin) + &eq.x_mid;
        let rho = density(eq, &z, ctx).expect("interior point");
        ComplexValue::from_real(rho * Float::with_val(prec, &eq.y_half * &cos))
    };
    let v = integrate_segment(&g, &(-half_pi.clone()), &half_pi, ctx)?;
    Ok(v.re)
}

fn cut_guard(dist: &Float, scale: &Float, ctx: &PrecisionContext, what: &str) -> Result<()> {
    let tol = Float::with_val(dist.prec(), ctx.f(10).pow(-(ctx.digits as i32) / 2) * scale);
    if *dist < tol {
        return Err(Error::CutContact(format!("{what}: point too close to the cut")));
    }
    Ok(())
}

/// `√(ζ−1)·√(ζ+1)` with principal factors: the jumps on `(−∞,−1)` cancel,
/// leaving exactly the branch cut `[−1, 1]` and behavior `~ζ` at infinity.
fn sqrt_zeta2_minus_1(zeta: &ComplexValue) -> ComplexValue {
    let one = ComplexValue::one(zeta.prec());
    let m = (zeta - &one).sqrt();
    let p = (zeta + &one).sqrt();
    &m * &p
}

/// Critical φ-function
/// `φ_cr(ζ) = (2/3)·√(ζ²−1)·(ζ−2)(2ζ+1) + 2·log(ζ + √(ζ²−1))`,
/// analytic off `(−∞, 1]`, vanishing like `(8√2/5)(ζ−1)^{5/2}` at 1.
pub fn phi_cr(zeta: &ComplexValue, ctx: &PrecisionContext) -> Result<ComplexValue> {
    let prec = zeta.prec();
    if zeta.re < 1u32 {
        cut_guard(
            &zeta.im.clone().abs(),
            &zeta.abs().max(&Float::with_val(prec, 1)),
            ctx,
            "phi_cr",
        )?;
    }
    let one = ComplexValue::one(prec);
    let sq = sqrt_zeta2_minus_1(zeta);
    let two = ComplexValue::from_real(Float::with_val(prec, 2));
    let poly = &(zeta - &two) * &ComplexValue::new(
        Float::with_val(prec, zeta.re.clone() * 2u32 + 1u32),
        Float::with_val(prec, zeta.im.clone() * 2u32),
    );
    let term1 = (&sq * &poly).scale(&Float::with_val(prec, 2)).scale(&(Float::with_val(prec, 1) / 3u32));
    let term2 = (zeta + &sq).ln().scale(&Float::with_val(prec, 2));
    let _ = one;
    Ok(&term1 + &term2)
}

/// Analytic derivative `φ'_cr(ζ) = 4·(ζ+1)^{1/2}(ζ−1)^{3/2}` (used by the
/// finite-difference invariant tests).
pub fn phi_cr_deriv(zeta: &ComplexValue) -> ComplexValue {
    let prec = zeta.prec();
    let one = ComplexValue::one(prec);
    let m = zeta - &one;
    let val = &(&m.sqrt() * &m) * &(zeta + &one).sqrt();
    val.scale(&Float::with_val(prec, 4))
}

/// Critical resolvent `ω_cr(ζ) = −2ζ² + 2ζ + 1 + 2(ζ+1)^{1/2}(ζ−1)^{3/2}`,
/// cut on `[−1, 1]`, decaying like `1/ζ` at infinity.
///
/// Orientation convention: with principal-branch factors, the boundary
/// value from *below* the cut carries `+iπ·ρ_cr(x)`; the interval is
/// traversed so that the density side is the lower one.
pub fn resolvent_cr(zeta: &ComplexValue, ctx: &PrecisionContext) -> Result<ComplexValue> {
    let prec = zeta.prec();
    if zeta.re.clone().abs() <= 1u32 {
        cut_guard(&zeta.im.clone().abs(), &Float::with_val(prec, 1), ctx, "resolvent_cr")?;
    }
    let one = ComplexValue::one(prec);
    let m = zeta - &one;
    let sq_part = (&(&m.sqrt() * &m) * &(zeta + &one).sqrt()).scale(&Float::with_val(prec, 2));
    let poly = ComplexValue::new(
        Float::with_val(prec, 1) + Float::with_val(prec, zeta.re.clone() * 2u32)
            - Float::with_val(prec, (zeta.re.clone().square() - zeta.im.clone().square()) * 2u32),
        Float::with_val(prec, zeta.im.clone() * 2u32)
            - Float::with_val(prec, zeta.re.clone() * &zeta.im) * 4u32,
    );
    Ok(&poly + &sq_part)
}

/// Critical density `ρ_cr(x) = (2/π)(1−x)√(1−x²)` on `[−1, 1]`.
pub fn density_cr(x: &Float, ctx: &PrecisionContext) -> Float {
    let prec = ctx.prec();
    let root = (Float::with_val(prec, 1) - x.clone().square()).sqrt();
    (Float::with_val(prec, 1) - x) * root * 2u32 / ctx.pi()
}

/// Modified signed measure near criticality: density
/// `ψ_u(x) = −m_u(x)·√(x−σ_u)/(2π·√(1−x))` on `[σ_u, 1]` with
/// `m_u(ζ) = a₂(ζ−1)² + a₁(ζ−1) + a₀`.
#[derive(Debug, Clone)]
pub struct ModifiedMeasure {
    pub u: Float,
    pub sigma_u: Float,
    pub a0: Float,
    pub a1: Float,
    pub a2: Float,
}

impl ModifiedMeasure {
    /// The quadratic factor `m_u(ζ)`.
    pub fn m(&self, zeta: &ComplexValue) -> ComplexValue {
        let prec = zeta.prec();
        let one = ComplexValue::one(prec);
        let d = zeta - &one;
        let mut acc = ComplexValue::from_real(Float::with_val(prec, &self.a2));
        acc = &(&acc * &d) + &ComplexValue::from_real(Float::with_val(prec, &self.a1));
        &(&acc * &d) + &ComplexValue::from_real(Float::with_val(prec, &self.a0))
    }

    fn m_real(&self, x: &Float) -> Float {
        let prec = x.prec();
        let d = Float::with_val(prec, x - 1u32);
        (Float::with_val(prec, &self.a2 * &d) + &self.a1) * &d + &self.a0
    }

    /// `ψ_u(x)` for `σ_u < x < 1`.
    pub fn psi(&self, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
        if *x <= self.sigma_u || *x >= 1u32 {
            return Err(Error::Domain("psi: x outside (sigma_u, 1)".into()));
        }
        let prec = ctx.prec();
        let num = -self.m_real(x) * Float::with_val(prec, x - &self.sigma_u).sqrt();
        let den = (Float::with_val(prec, 1) - x).sqrt() * ctx.pi() * 2u32;
        Ok(num / den)
    }

    /// Total mass `∫_{σ_u}^{1} ψ_u` via `x = m + h·sin θ` with
    /// `m = (σ_u+1)/2`, `h = (1−σ_u)/2`: both square-root endpoint factors
    /// combine with `cos θ·dθ` into `(1+sin θ)`, leaving a smooth integrand
    /// `(h/2π)·(−m_u(x))·(1+sin θ)` on `[−π/2, π/2]`.
    pub fn mass(&self, ctx: &PrecisionContext) -> Result<Float> {
        let prec = ctx.prec();
        let mid = Float::with_val(prec, &self.sigma_u + 1u32) / 2u32;
        let half = (Float::with_val(prec, 1) - &self.sigma_u) / 2u32;
        let half_pi = ctx.pi() / 2u32;
        let g = |theta: &Float| -> ComplexValue {
            let sin = theta.clone().sin();
            let x = Float::with_val(prec, &half * &sin) + &mid;
            let v = -self.m_real(&x) * (Float::with_val(prec, &sin + 1u32));
            ComplexValue::from_real(v)
        };
        let v = integrate_segment(&g, &(-half_pi.clone()), &half_pi, ctx)?;
        Ok(v.re * half / (ctx.pi() * 2u32))
    }

    /// Location of the interior sign change of `ψ_u` closest to 1 (a zero
    /// of `m_u`), or `None` if `m_u` has no real zero in `(σ_u, 1)`.
    pub fn sign_change(&self, ctx: &PrecisionContext) -> Option<Float> {
        let prec = ctx.prec();
        // m_u(x) = a2 d² + a1 d + a0 in d = x − 1.
        let disc = self.a1.clone().square()
            - Float::with_val(prec, &self.a2 * &self.a0) * 4u32;
        if disc.is_sign_negative() {
            return None;
        }
        let sq = disc.sqrt();
        let d1 = (Float::with_val(prec, -&self.a1) + &sq) / Float::with_val(prec, &self.a2 * 2u32);
        let d2 = (Float::with_val(prec, -&self.a1) - &sq) / Float::with_val(prec, &self.a2 * 2u32);
        // Nearest to 1, i.e. smallest |d|, restricted to (σ_u − 1, 0).
        let mut best: Option<Float> = None;
        for d in [d1, d2] {
            let x = Float::with_val(prec, &d + 1u32);
            if x <= self.sigma_u || x >= 1u32 {
                continue;
            }
            match &best {
                Some(bx) if (bx.clone() - 1u32).abs() <= d.clone().abs() => {}
                _ => best = Some(x),
            }
        }
        best
    }
}

/// Builds the modified measure at `u` with `|u − u_c| ≤` the documented
/// radius. `σ_u` is the root of its cubic analytic in `u` with
/// `σ_{u_c} = −1`, selected by closeness to the perturbation series
/// `σ_u = −1 + 3^{7/4}(2−√3)(u−u_c) + O((u−u_c)²)`.
pub fn modified_measure(u: &Float, ctx: &PrecisionContext) -> Result<ModifiedMeasure> {
    let prec = ctx.prec();
    let uc = u_critical(ctx);
    let du = Float::with_val(prec, u - &uc);
    if du.clone().abs() > MODIFIED_MEASURE_RADIUS {
        return Err(Error::RadiusViolation(format!(
            "modified_measure: |u - u_c| = {} exceeds {MODIFIED_MEASURE_RADIUS}",
            du.to_f64().abs()
        )));
    }
    let s3 = ctx.f(3).sqrt();
    let p34 = ctx.f(3).pow(ctx.f(0.75f64)); // 3^{3/4}
    let p74 = Float::with_val(prec, &p34 * 3u32); // 3^{7/4}
    // The σ-cubic  −(1/8)(σ+1)(5σ²−14σ+13)
    //              −(3^{7/4}/4)(σ−1)(5σ²+(6√3−4)σ+7−2√3)·(u−u_c) = 0,
    // expanded in powers of σ.
    let k = Float::with_val(prec, &p74 * &du) / 4u32;
    let c3 = ctx.f(-5) / 8u32 - Float::with_val(prec, &k * 5u32);
    let c2 = ctx.f(9) / 8u32
        - Float::with_val(prec, &k * &(Float::with_val(prec, &s3 * 6u32) - 9u32));
    let c1 = ctx.f(1) / 8u32
        - Float::with_val(prec, &k * &(Float::with_val(prec, 11) - Float::with_val(prec, &s3 * 8u32)));
    let c0 = ctx.f(-13) / 8u32
        + Float::with_val(prec, &k * &(Float::with_val(prec, 7) - Float::with_val(prec, &s3 * 2u32)));
    let roots = solve_cubic(&c3, &c2, &c1, &c0, ctx)?;
    let predictor = ctx.f(-1)
        + Float::with_val(prec, &p74 * &du) * (Float::with_val(prec, 2) - &s3);
    let mut dists: Vec<(Float, &ComplexValue)> = roots
        .iter()
        .map(|r| {
            let d = (&ComplexValue::from_real(predictor.clone()) - r).abs();
            (d, r)
        })
        .collect();
    dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let (d_best, r_best) = (&dists[0].0, dists[0].1);
    let (d_next, r_next) = (&dists[1].0, dists[1].1);
    let root_sep = (r_next - r_best).abs();
    if !root_sep.is_zero()
        && (d_next.clone() - d_best).abs() < Float::with_val(prec, &root_sep * &ctx.f(1e-6f64))
    {
        return Err(Error::BranchAmbiguity(
            "modified_measure: two sigma roots equidistant from the series".into(),
        ));
    }
    let sigma = r_best.re.clone();

    // Coefficients of m_u from the endpoint equations.
    let a2 = ctx.f(-4) - Float::with_val(prec, &p74 * &du) * 8u32;
    let sp1 = Float::with_val(prec, &sigma + 1u32);
    let a1 = Float::with_val(prec, &sp1 * -2i32)
        - Float::with_val(prec, &p34 * &du)
            * 12u32
            * (Float::with_val(prec, &sigma + 1u32) + Float::with_val(prec, &s3 * 2u32));
    let a0 = -(Float::with_val(prec, &sp1 / 2u32))
        * (Float::with_val(prec, &sigma * 3u32) - 5u32)
        - Float::with_val(prec, &p74 * &du)
            * (Float::with_val(prec, sigma.clone().square() * 3u32)
                + Float::with_val(prec, &sigma * &(Float::with_val(prec, &s3 * 4u32) - 2u32))
                + 7u32);
    Ok(ModifiedMeasure {
        u: Float::with_val(prec, u),
        sigma_u: sigma,
        a0,
        a1,
        a2,
    })
}

/// Values of the endpoint conformal maps at one ζ-point.
#[derive(Debug, Clone)]
pub struct ConformalMapPoint {
    /// `f(ζ) = [(5/8)·φ_cr(ζ)]^{2/5} = 2^{1/5}(ζ−1) + O((ζ−1)²)`.
    pub f: ComplexValue,
    /// `h_u(ζ) = (1/20)^{1/5}·(φ_u − φ_cr)/φ_cr^{1/5}`, analytic at 1.
    pub h_u: ComplexValue,
    /// `λ = N^{4/5}·h_u(1)` by the closed-form limit
    /// `h_u(1) = 2^{−1/10}·(−a₀)·√(1−σ_u)`.
    pub lambda_at_1: Float,
}

/// Evaluates `f`, `h_u` at `ζ` (in the disc `|ζ−1| ≤ 0.5`, off `(−∞,1]`)
/// and the double-scaling value `λ = N^{4/5}·h_u(1)`.
///
/// `φ_u − φ_cr` is computed as a *single* quadrature of the difference of
/// integrands (substitution `s = 1 + τ²(ζ−1)` removes the endpoint
/// singularity), so no cancellation between two large φ-values occurs.
pub fn conformal_maps(
    mm: &ModifiedMeasure,
    zeta: &ComplexValue,
    n_param: u32,
    ctx: &PrecisionContext,
) -> Result<ConformalMapPoint> {
    let prec = ctx.prec();
    let one = ComplexValue::one(prec);
    let d = zeta - &one;
    if d.abs() > CONFORMAL_RADIUS {
        return Err(Error::RadiusViolation(
            "conformal_maps: zeta outside the disc around 1".into(),
        ));
    }
    if d.is_zero() {
        return Err(Error::Domain(
            "conformal_maps: use lambda_at_1 for the value at zeta = 1".into(),
        ));
    }

    // q(ζ) = φ_cr(ζ)/(ζ−1)^{5/2} is analytic and ≈ 8√2/5 near 1.
    let phi_c = phi_cr(zeta, ctx)?;
    let d_52 = &(&d.sqrt() * &d) * &d; // (ζ−1)^{5/2}
    let q = &phi_c / &d_52;
    let fifth = Float::with_val(prec, 1) / 5u32;
    let f_val = {
        let base = q.scale(&(Float::with_val(prec, 5) / 8u32));
        let two_fifth = Float::with_val(prec, 2) / 5u32;
        &d * &base.powf(&two_fifth)
    };

    // (φ_u − φ_cr)(ζ) = 2√(ζ−1)·∫₀¹ [(−m_u(s))√(s−σ_u) − 4(s−1)²√(s+1)] dτ,
    // s = 1 + τ²(ζ−1).
    let sigma_c = ComplexValue::from_real(mm.sigma_u.clone());
    let g = |tau: &Float, out: &mut Vec<ComplexValue>| {
        let s = &d.scale(&tau.clone().square()) + &one;
        let term_u = &(-&mm.m(&s)) * &(&s - &sigma_c).sqrt();
        let sm1 = &s - &one;
        let term_c = (&sm1.square() * &(&s + &one).sqrt()).scale(&Float::with_val(prec, 4));
        out.push(&term_u - &term_c);
    };
    let integral = integrate_segment_vec(
        &mut { g },
        &Float::new(prec),
        &Float::with_val(prec, 1),
        1,
        ctx,
    )?
    .into_iter()
    .next()
    .unwrap();
    let phi_diff = (&d.sqrt() * &integral).scale(&Float::with_val(prec, 2));

    // φ_cr^{1/5} = √(ζ−1)·q^{1/5} with the analytic fifth root of q.
    let phi_c_15 = &d.sqrt() * &q.powf(&fifth);
    let pref = (Float::with_val(prec, 1) / 20u32).pow(fifth.clone());
    let h_u = (&phi_diff / &phi_c_15).scale(&pref);

    // h_u(1) in closed form; λ = N^{4/5}·h_u(1).
    let h1 = Float::with_val(prec, 2).pow(ctx.f(-0.1f64))
        * -(mm.a0.clone())
        * (Float::with_val(prec, 1) - &mm.sigma_u).sqrt();
    let n45 = ctx.f(n_param).pow(ctx.f(0.8f64));
    Ok(ConformalMapPoint {
        f: f_val,
        h_u,
        lambda_at_1: n45 * h1,
    })
}
