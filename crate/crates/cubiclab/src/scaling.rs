//! Asymptotic predictions as executable formulas: the regular free-energy
//! series `F⁰`, `F²`, the double-scaling variable maps, the recurrence
//! predictions near the critical coupling, the regular/singular partition
//! split, and the zeros-vs-poles search.
//!
//! Critical constants used throughout:
//! `u_c = 3^{1/4}/18`, `c₁ = 2^{−12/5}·3^{−7/4}`, `c₂ = 2^{−7/5} = c₁/u_c`,
//! `γ²_c = √3`, `β_c = 3^{1/4}(√3 − 1)`, `t_c = 3·2^{−2/3}`.

use crate::equilibrium::u_critical;
use crate::numkernel::{pfq, ComplexValue, Error, PrecisionContext, Result};
use crate::orthopoly::ModelPoint;
use crate::partition::{log_partition, selberg_gue};
use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

/// The constants of the double-scaling limit.
#[derive(Debug, Clone)]
pub struct CriticalConstants {
    pub u_c: Float,
    pub c1: Float,
    pub c2: Float,
    pub gamma2_c: Float,
    pub beta_c: Float,
    pub t_c: Float,
}

impl CriticalConstants {
    pub fn new(ctx: &PrecisionContext) -> Self {
        let prec = ctx.prec();
        let u_c = u_critical(ctx);
        let c1 = ctx.f(2).pow(-ctx.f(12) / 5u32) * ctx.f(3).pow(-ctx.f(7) / 4u32);
        let c2 = ctx.f(2).pow(-ctx.f(7) / 5u32);
        let gamma2_c = ctx.f(3).sqrt();
        let beta_c = Float::with_val(prec, ctx.f(3).pow(ctx.f(0.25f64)) * (gamma2_c.clone() - 1u32));
        let t_c = ctx.f(2).pow(-ctx.f(2) / 3u32) * 3u32;
        Self {
            u_c,
            c1,
            c2,
            gamma2_c,
            beta_c,
            t_c,
        }
    }
}

/// Coefficient recurrence for the genus-zero series
/// `F⁰(u) = (1/2) Σ_j 72^j Γ(3j/2) u^{2j} / (Γ(j+3) Γ(j/2+1))`:
/// `c_1 = 6`, `c_2 = 216`, and stepping `j → j+2` shifts every Γ by
/// integers, giving an exact rational ratio.
fn f0_coefficient_ratio(j: usize, prec: u32) -> Float {
    let jf = Float::with_val(prec, j as u32);
    let num = Float::with_val(prec, &jf * 3u32) / 2u32;
    let mut r = Float::with_val(prec, 72 * 72);
    r *= num.clone();
    r *= num.clone() + 1u32;
    r *= num + 2u32;
    r /= Float::with_val(prec, &jf + 3u32);
    r /= Float::with_val(prec, &jf + 4u32);
    r /= Float::with_val(prec, &jf / 2u32) + 1u32;
    r
}

/// `d`-th derivative of `F⁰` by termwise differentiation of the series
/// (`d ∈ {0, 1, 2}`). Converges geometrically for `|u| < u_c`; at the
/// endpoint `u = u_c` the terms decay like `j^{d−7/2}`, so partial sums are
/// accelerated by a two-level Richardson scheme in the truncation index
/// (exponent ladder `5/2 − d`, `7/2 − d`). Endpoint accuracy is therefore
/// limited to roughly `10⁻⁷` regardless of the working precision.
pub fn f0_derivative(u: &Float, order: u32, ctx: &PrecisionContext) -> Result<Float> {
    if order > 2 {
        return Err(Error::Domain("f0_derivative: order must be 0, 1, or 2".into()));
    }
    let prec = ctx.prec();
    let uc = u_critical(ctx);
    let ua = u.clone().abs();
    if ua > Float::with_val(prec, &uc + &ctx.eps()) {
        return Err(Error::Divergence(format!(
            "F^(0) series diverges for |u| = {} > u_c",
            ua.to_f64()
        )));
    }
    if u.is_zero() {
        return Ok(ctx.f(0));
    }
    let u2 = u.clone().square();
    let u4 = u2.clone().square();
    // Interleaved coefficient streams c_1, c_3, ... and c_2, c_4, ...
    let mut c_odd = ctx.f(6);
    let mut c_even = ctx.f(216);
    let mut u_pow_odd = match order {
        0 => u2.clone(),
        1 => u.clone(),
        _ => ctx.f(1),
    };
    let mut u_pow_even = Float::with_val(prec, &u_pow_odd * &u2);
    let mut sum = ctx.f(0);
    let eps = ctx.eps();
    const J_CAP: usize = 40_000;
    const CHECKPOINTS: [usize; 3] = [10_000, 20_000, 40_000];
    let mut partials = Vec::new();
    let mut converged = false;
    for j in 1..=J_CAP {
        let (c, up) = if j % 2 == 1 {
            (&c_odd, &u_pow_odd)
        } else {
            (&c_even, &u_pow_even)
        };
        let tj = Float::with_val(prec, 2 * j as u32);
        let mut term = Float::with_val(prec, c * up);
        if order >= 1 {
            term *= &tj;
        }
        if order >= 2 {
            term *= Float::with_val(prec, &tj - 1u32);
        }
        sum += &term;
        if term.abs() < Float::with_val(prec, &eps * &(sum.clone().abs() + 1u32)) {
            converged = true;
            break;
        }
        if j % 2 == 1 {
            c_odd *= f0_coefficient_ratio(j, prec);
            u_pow_odd *= &u4;
        } else {
            c_even *= f0_coefficient_ratio(j, prec);
            u_pow_even *= &u4;
        }
        if CHECKPOINTS.contains(&j) {
            partials.push(sum.clone());
        }
    }
    if converged {
        return Ok(sum);
    }
    // Endpoint regime: S_J = S_∞ − a·J^{−p} − b·J^{−p−1} − …, p = 5/2 − d.
    let p = ctx.f(5) / 2u32 - order;
    let lvl = |a: &Float, b: &Float, q: &Float| -> Float {
        let w = ctx.f(2).pow(q.clone());
        Float::with_val(prec, &w * b - a) / Float::with_val(prec, w - 1u32)
    };
    let r1 = lvl(&partials[0], &partials[1], &p);
    let r2 = lvl(&partials[1], &partials[2], &p);
    Ok(lvl(&r1, &r2, &(p + 1u32)))
}

/// Genus-zero free-energy series `F⁰(u)`, convergent for `|u| ≤ u_c`.
pub fn f0(u: &Float, ctx: &PrecisionContext) -> Result<Float> {
    f0_derivative(u, 0, ctx)
}

/// Closed hypergeometric representation of `F⁰` used as a cross-check:
/// `F⁰ = 6u² + 216u⁴·₄F₃(1,1,4/3,5/3; 2,5/2,3; x) +
///  13608u⁶·₄F₃(1,3/2,11/6,13/6; 3,5/2,7/2; x)` with `x = 34992u⁴`.
pub fn f0_hypergeometric(u: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let prec = ctx.prec();
    let x = Float::with_val(prec, u.clone().square().square() * 34992u32);
    if x >= 1u32 {
        return Err(Error::Divergence(
            "hypergeometric representation needs 34992u⁴ < 1".into(),
        ));
    }
    let third = ctx.f(1) / 3u32;
    let sixth = ctx.f(1) / 6u32;
    let h1 = pfq(
        &[ctx.f(1), ctx.f(1), third.clone() + 1u32, third.clone() + Float::with_val(prec, &third + 1u32)],
        &[ctx.f(2), ctx.f(5) / 2u32, ctx.f(3)],
        &x,
        ctx,
    )?;
    let h2 = pfq(
        &[
            ctx.f(1),
            ctx.f(3) / 2u32,
            Float::with_val(prec, &sixth * 11u32),
            Float::with_val(prec, &sixth * 13u32),
        ],
        &[ctx.f(3), ctx.f(5) / 2u32, ctx.f(7) / 2u32],
        &x,
        ctx,
    )?;
    let u2 = u.clone().square();
    let u4 = u2.clone().square();
    let u6 = Float::with_val(prec, &u4 * &u2);
    Ok(Float::with_val(prec, &u2 * 6u32)
        + Float::with_val(prec, &u4 * 216u32) * h1
        + Float::with_val(prec, &u6 * 13608u32) * h2)
}

/// Genus-one free-energy series
/// `F²(u) = (5/48) Σ_j 72^j Γ(3j/2) T_j u^{2j} / ((3j+2) Γ(j+1) Γ(j/2+1))`
/// where `T_j = ₃F₂(1−j, 2, 6; 5, 1−3j/2; 3/2)` terminates after `j` terms.
/// Diverges (logarithmically) at `|u| = u_c`.
pub fn f2(u: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let prec = ctx.prec();
    let uc = u_critical(ctx);
    if u.clone().abs() >= uc {
        return Err(Error::Divergence("F^(2) series requires |u| < u_c".into()));
    }
    if u.is_zero() {
        return Ok(ctx.f(0));
    }
    let u2 = u.clone().square();
    let u4 = u2.clone().square();
    // Outer coefficients without the ₃F₂ factor; j → j+2 ratio is rational.
    let mut c_odd = ctx.f(3) / 2u32; // j = 1
    let mut c_even = Float::with_val(prec, ctx.f(5) * 5184u32) / 48u32 / 8u32; // j = 2: (5/48)·72²·Γ(3)/(8·Γ(3)Γ(2))
    let mut u_pow_odd = u2.clone();
    let mut u_pow_even = u2.clone().square();
    let mut sum = ctx.f(0);
    let eps = ctx.eps();
    for j in 1..=200_000usize {
        let (c, up) = if j % 2 == 1 {
            (&c_odd, &u_pow_odd)
        } else {
            (&c_even, &u_pow_even)
        };
        // Terminating ₃F₂ at argument 3/2.
        let mut t = ctx.f(1);
        let mut inner = ctx.f(1);
        for m in 0..(j - 1) {
            let mf = m as u32;
            let mut ratio = ctx.f(3) / 2u32;
            ratio *= Float::with_val(prec, 1i64 - j as i64 + m as i64);
            ratio *= mf + 2;
            ratio *= mf + 6;
            ratio /= mf + 5;
            ratio /= Float::with_val(prec, 1u32) - Float::with_val(prec, 3 * j as u32) / 2u32 + mf;
            ratio /= mf + 1;
            t *= ratio;
            inner += &t;
        }
        let term = Float::with_val(prec, c * up) * inner;
        sum += &term;
        if term.abs() < Float::with_val(prec, &eps * &(sum.clone().abs() + 1u32)) {
            return Ok(sum);
        }
        let jf = Float::with_val(prec, j as u32);
        let g = Float::with_val(prec, &jf * 3u32) / 2u32;
        let mut r = Float::with_val(prec, 72 * 72);
        r *= g.clone();
        r *= g.clone() + 1u32;
        r *= g + 2u32;
        r *= Float::with_val(prec, &jf * 3u32) + 2u32;
        r /= Float::with_val(prec, &jf * 3u32) + 8u32;
        r /= Float::with_val(prec, &jf + 1u32);
        r /= Float::with_val(prec, &jf + 2u32);
        r /= Float::with_val(prec, &jf / 2u32) + 1u32;
        if j % 2 == 1 {
            c_odd *= r;
            u_pow_odd *= &u4;
        } else {
            c_even *= r;
            u_pow_even *= &u4;
        }
    }
    Err(Error::Divergence(
        "F^(2) series did not converge within the term budget (u too close to u_c)".into(),
    ))
}

/// The finite part of `F²` at the critical point:
/// `D = lim_{u↑u_c} [F²(u) + (1/48)·ln(u_c − u)]`, by Richardson
/// extrapolation over `u_c − u = 10⁻²·2^{−k}`, `k = 0..5`, with the
/// half-integer exponent ladder of the critical expansion. Fails with an
/// extrapolation error unless the last two diagonal entries agree to three
/// digits.
pub fn d_constant(ctx: &PrecisionContext) -> Result<Float> {
    let prec = ctx.prec();
    let uc = u_critical(ctx);
    let levels = 6usize;
    let mut diag: Vec<Float> = Vec::with_capacity(levels);
    let mut rows: Vec<Vec<Float>> = Vec::with_capacity(levels);
    for k in 0..levels {
        let du = ctx.f(1e-2f64) / ctx.f(2).pow(ctx.f(k as u32));
        let u = Float::with_val(prec, &uc - &du);
        let g = f2(&u, ctx)? + du.ln() / 48u32;
        let mut row = vec![g];
        for (m, prev) in rows.last().map(|r| r.iter().enumerate()).into_iter().flatten() {
            let q = ctx.f((m + 1) as u32) / 2u32;
            let w = ctx.f(2).pow(q);
            let t = Float::with_val(prec, &w * row.last().unwrap() - prev)
                / Float::with_val(prec, w - 1u32);
            row.push(t);
        }
        diag.push(row.last().unwrap().clone());
        rows.push(row);
    }
    let last = &diag[levels - 1];
    let gap = Float::with_val(prec, last - &diag[levels - 2]).abs();
    let scale = last.clone().abs().max(&ctx.f(1));
    if gap > scale * 1e-3f64 {
        return Err(Error::ExtrapolationFailure(format!(
            "D-limit Richardson table did not stabilize: last gap {:e}",
            gap.to_f64()
        )));
    }
    Ok(last.clone())
}

/// `A`, `B`, `C`, `D` of the regular partition factor
/// `log Z_reg = N²[A + B(u−u_c) + C(u−u_c)²] + D`.
#[derive(Debug, Clone)]
pub struct CriticalExpansion {
    pub a: Float,
    pub b: Float,
    pub c: Float,
    pub d: Float,
}

pub fn critical_expansion(ctx: &PrecisionContext) -> Result<CriticalExpansion> {
    let uc = u_critical(ctx);
    Ok(CriticalExpansion {
        a: f0_derivative(&uc, 0, ctx)?,
        b: f0_derivative(&uc, 1, ctx)?,
        c: f0_derivative(&uc, 2, ctx)? / 2u32,
        d: d_constant(ctx)?,
    })
}

/// The conformal-variable map `φ(t) = ((√(1+t) − 1)/c₂)·(1+t)^{4/5}`,
/// with `φ(0) = 0`, `φ'(0) = 2^{2/5}`.
pub fn phi(t: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let prec = ctx.prec();
    let s = Float::with_val(prec, t + 1u32);
    if !(s.is_sign_positive() && !s.is_zero()) {
        return Err(Error::Domain("phi: requires t > -1".into()));
    }
    let c2 = CriticalConstants::new(ctx).c2;
    Ok(Float::with_val(prec, s.clone().sqrt() - 1u32) * s.pow(ctx.f(4) / 5u32) / c2)
}

fn phi_prime(t: &Float, ctx: &PrecisionContext) -> Float {
    let prec = ctx.prec();
    let s = Float::with_val(prec, t + 1u32);
    let c2 = CriticalConstants::new(ctx).c2;
    (s.clone().pow(ctx.f(3) / 10u32) * 13u32 / 10u32
        - s.pow(-ctx.f(1) / 5u32) * 4u32 / 5u32)
        / c2
}

/// Newton inverse of [`phi`] on its monotone branch through the origin
/// (`t > t_min ≈ −0.621`). The branch image is bounded below by
/// `φ(t_min) ≈ −0.467`; arguments below that are a radius violation.
pub fn phi_inv(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let prec = ctx.prec();
    if x.to_f64() <= -0.46 {
        return Err(Error::RadiusViolation(format!(
            "phi_inv: argument {} below the branch image",
            x.to_f64()
        )));
    }
    let c2 = CriticalConstants::new(ctx).c2;
    let mut t = Float::with_val(prec, &c2 * x) * 2u32;
    if t.to_f64() < -0.55 {
        t = ctx.f(-0.55f64);
    }
    let tol = ctx.eps_guarded();
    for _ in 0..200 {
        let step = (phi(&t, ctx)? - x) / phi_prime(&t, ctx);
        t -= &step;
        if t.to_f64() <= -0.62 {
            return Err(Error::RadiusViolation(
                "phi_inv: Newton iteration left the monotone branch".into(),
            ));
        }
        if step.abs() < Float::with_val(prec, &tol * &(t.clone().abs() + 1u32)) {
            return Ok(t);
        }
    }
    Err(Error::RadiusViolation("phi_inv: Newton did not converge".into()))
}

/// Double-scaling variables and recurrence predictions at one `(N, λ)`.
#[derive(Debug, Clone)]
pub struct ScalingPrediction {
    pub lambda: Float,
    pub v: Float,
    pub lambda_tilde: Float,
    pub v_tilde: Float,
    pub p2: Float,
    pub q2: Float,
    pub gamma2_pred: Float,
    pub beta_pred: Float,
}

/// `u(λ) = u_c + c₁·λ·N^{−4/5}`.
pub fn u_of_lambda(n: u32, lambda: &Float, ctx: &PrecisionContext) -> Float {
    let prec = ctx.prec();
    let cc = CriticalConstants::new(ctx);
    let mut r = Float::with_val(prec, &cc.c1 * lambda);
    r *= ctx.f(n).pow(-ctx.f(4) / 5u32);
    r += &cc.u_c;
    r
}

/// `λ(u) = N^{4/5}(u − u_c)/c₁` (complex `u` allowed).
pub fn lambda_of_u(n: u32, u: &ComplexValue, ctx: &PrecisionContext) -> ComplexValue {
    let cc = CriticalConstants::new(ctx);
    let scale = ctx.f(n).pow(ctx.f(4) / 5u32) / cc.c1;
    (u - &ComplexValue::from_real(cc.u_c)).scale(&scale)
}

/// Variable maps only: `v = N^{4/5}·φ⁻¹(λN^{−4/5})`, `ṽ = v + N^{−1/5}/2`,
/// `λ̃ = N^{4/5}·φ(ṽN^{−4/5})`. Prediction fields are left NaN.
pub fn scaling_maps(n: u32, lambda: &Float, ctx: &PrecisionContext) -> Result<ScalingPrediction> {
    let prec = ctx.prec();
    let n45 = ctx.f(n).pow(ctx.f(4) / 5u32);
    let x = Float::with_val(prec, lambda / &n45);
    let v = phi_inv(&x, ctx)? * &n45;
    let v_tilde = v.clone() + ctx.f(n).pow(-ctx.f(1) / 5u32) / 2u32;
    let lambda_tilde = phi(&Float::with_val(prec, &v_tilde / &n45), ctx)? * &n45;
    let nan = ctx.f(f64::NAN);
    Ok(ScalingPrediction {
        lambda: lambda.clone(),
        v,
        lambda_tilde,
        v_tilde,
        p2: nan.clone(),
        q2: nan.clone(),
        gamma2_pred: nan.clone(),
        beta_pred: nan,
    })
}

/// Fills the prediction from solution values of the scaling ODE:
/// `p₂(λ) = −2^{4/5}·√3·y(λ)`, `q₂ = 3^{−1/4}·p₂` evaluated at the shifted
/// variable `λ̃`, and
/// `γ²_pred = √3 + N^{−2/5}p₂(λ)`, `β_pred = β_c + N^{−2/5}q₂(λ̃)`.
/// When `y_tilde_value` is absent, `y_value` is reused for `q₂`; the two
/// choices differ only at order `N^{−3/5}` in `β_pred`.
pub fn predict_recurrence(
    n: u32,
    lambda: &Float,
    y_value: &Float,
    y_tilde_value: Option<&Float>,
    ctx: &PrecisionContext,
) -> Result<ScalingPrediction> {
    let prec = ctx.prec();
    let mut pred = scaling_maps(n, lambda, ctx)?;
    let cc = CriticalConstants::new(ctx);
    let factor = -ctx.f(2).pow(ctx.f(4) / 5u32) * ctx.f(3).sqrt();
    pred.p2 = Float::with_val(prec, &factor * y_value);
    let p2_tilde = Float::with_val(prec, &factor * y_tilde_value.unwrap_or(y_value));
    pred.q2 = p2_tilde * ctx.f(3).pow(-ctx.f(1) / 4u32);
    let n25 = ctx.f(n).pow(-ctx.f(2) / 5u32);
    pred.gamma2_pred = cc.gamma2_c + Float::with_val(prec, &pred.p2 * &n25);
    pred.beta_pred = cc.beta_c + Float::with_val(prec, &pred.q2 * &n25);
    Ok(pred)
}

/// Regular/singular split of the partition function near `u_c`.
#[derive(Debug, Clone)]
pub struct PartitionSplit {
    pub log_z_reg: ComplexValue,
    pub log_z_sing: Float,
    pub log_z_pred: ComplexValue,
}

/// `log Z_reg = N²[A + B(u−u_c) + C(u−u_c)²] + D`,
/// `log Z_sing = −Y(λ(u))`, and the full prediction adds the Gaussian
/// reference `log Z⁰` (the split is stated relative to the free-energy
/// normalization `F_N = (log Z − log Z⁰)/N²`).
pub fn partition_split_with(
    exp: &CriticalExpansion,
    u: &ComplexValue,
    n: u32,
    y_big_value: &Float,
    ctx: &PrecisionContext,
) -> PartitionSplit {
    let du = u - &ComplexValue::from_real(u_critical(ctx));
    let quad = &(&ComplexValue::from_real(exp.a.clone())
        + &du.scale(&exp.b))
        + &du.square().scale(&exp.c);
    let n2 = ctx.f(n).square();
    let log_z_reg = &quad.scale(&n2) + &ComplexValue::from_real(exp.d.clone());
    let log_z_sing = -y_big_value.clone();
    let log_z_pred = &(&log_z_reg + &ComplexValue::from_real(log_z_sing.clone()))
        + &ComplexValue::from_real(selberg_gue(n, ctx));
    PartitionSplit {
        log_z_reg,
        log_z_sing,
        log_z_pred,
    }
}

/// As [`partition_split_with`], computing the critical expansion on the
/// fly (expensive — cache [`critical_expansion`] across calls).
pub fn partition_split(
    u: &ComplexValue,
    n: u32,
    y_big_value: &Float,
    ctx: &PrecisionContext,
) -> Result<PartitionSplit> {
    Ok(partition_split_with(
        &critical_expansion(ctx)?,
        u,
        n,
        y_big_value,
        ctx,
    ))
}

/// One located zero of `Z_N(u)`.
#[derive(Debug, Clone)]
pub struct PartitionZero {
    pub u: ComplexValue,
    pub lambda: ComplexValue,
    pub log_abs_z: Float,
}

/// Outcome of the polar-grid zero search.
#[derive(Debug, Clone)]
pub struct ZeroSearchReport {
    pub zeros: Vec<PartitionZero>,
    /// Grid points where the moment pipeline failed (e.g. pivot collapse).
    pub failed_points: usize,
    pub median_log_abs: Float,
}

fn log_z_at(u: &ComplexValue, n: u32, ctx: &PrecisionContext) -> Result<ComplexValue> {
    let mp = ModelPoint::new(
        u.clone(),
        n,
        n as usize,
        ComplexValue::new(ctx.f(0.5f64), ctx.f(0)),
        ctx,
    )?;
    let m = crate::orthopoly::moments(&mp)?;
    let table = crate::orthopoly::recurrence_table(&m, &mp)?;
    log_partition(&table, n)
}

/// Searches for zeros of `Z_N(u)` inside the λ-disc of radius
/// `disc_radius_lambda` around the critical point. The grid is polar in λ
/// (16 angles, `grid/16` rings); cells with nonzero phase winding of `Z`
/// on their corners are refined by Newton iteration on `log Z`, and
/// candidates are accepted only if `log|Z|` falls `digits/4` decades below
/// the grid median. Grid points evaluate in parallel.
pub fn find_partition_zeros(
    n: u32,
    disc_radius_lambda: &Float,
    grid: usize,
    ctx: &PrecisionContext,
) -> Result<ZeroSearchReport> {
    let prec = ctx.prec();
    let angles = 16usize.min(grid.max(4));
    let rings = (grid / angles).max(2);
    let u_at = |lambda: &ComplexValue| -> ComplexValue {
        let cc = CriticalConstants::new(ctx);
        let scale = ctx.f(n).pow(-ctx.f(4) / 5u32);
        &ComplexValue::from_real(cc.u_c) + &lambda.scale(&Float::with_val(prec, &cc.c1 * &scale))
    };
    let lam = |i: usize, j: usize| -> ComplexValue {
        let r = Float::with_val(prec, disc_radius_lambda * (i as u32 + 1)) / (rings as u32);
        let theta = ctx.pi() * (2 * j as u32) / (angles as u32);
        ComplexValue::cis(&theta).scale(&r)
    };
    let points: Vec<(usize, usize)> = (0..rings)
        .flat_map(|i| (0..angles).map(move |j| (i, j)))
        .collect();
    let values: Vec<Option<ComplexValue>> = points
        .par_iter()
        .map(|&(i, j)| log_z_at(&u_at(&lam(i, j)), n, ctx).ok())
        .collect();
    let failed_points = values.iter().filter(|v| v.is_none()).count();
    let mut mags: Vec<Float> = values
        .iter()
        .flatten()
        .map(|v| v.re.clone())
        .collect();
    if mags.is_empty() {
        return Err(Error::Domain("zero search: every grid point failed".into()));
    }
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_log_abs = mags[mags.len() / 2].clone();
    let at = |i: usize, j: usize| &values[i * angles + j % angles];
    // Phase winding around each grid cell (corner arguments; coarse by
    // construction — Newton plus the magnitude filter reject false cells).
    let mut candidates: Vec<ComplexValue> = Vec::new();
    for i in 0..rings.saturating_sub(1) {
        for j in 0..angles {
            let corners = [at(i, j), at(i, j + 1), at(i + 1, j + 1), at(i + 1, j)];
            if corners.iter().any(|c| c.is_none()) {
                continue;
            }
            let args: Vec<Float> = corners
                .iter()
                .map(|c| c.as_ref().unwrap().im.clone())
                .collect();
            let mut winding = ctx.f(0);
            let two_pi = ctx.pi() * 2u32;
            for k in 0..4 {
                let mut d = Float::with_val(prec, &args[(k + 1) % 4] - &args[k]);
                while d > ctx.pi() {
                    d -= &two_pi;
                }
                while d < -ctx.pi() {
                    d += &two_pi;
                }
                winding += d;
            }
            if winding.abs() > ctx.pi() {
                // Cell centroid in λ.
                let c0 = lam(i, j);
                let c1 = lam(i, (j + 1) % angles);
                let c2v = lam(i + 1, (j + 1) % angles);
                let c3 = lam(i + 1, j);
                let centroid = (&(&c0 + &c1) + &(&c2v + &c3)).scale(&ctx.f(0.25f64));
                candidates.push(centroid);
            }
        }
    }
    // Newton refinement on log Z: u ← u − 1/(d log Z/du).
    let fd_step = {
        let cc = CriticalConstants::new(ctx);
        Float::with_val(prec, &cc.c1 * &ctx.f(n).pow(-ctx.f(4) / 5u32)) * 1e-4f64
    };
    let refined: Vec<Option<PartitionZero>> = candidates
        .par_iter()
        .map(|lambda0| {
            let mut u = u_at(lambda0);
            for _ in 0..16 {
                let h = ComplexValue::from_real(fd_step.clone());
                let fp = log_z_at(&(&u + &h), n, ctx).ok()?;
                let fm = log_z_at(&(&u - &h), n, ctx).ok()?;
                let deriv = (&fp - &fm).scale(&(fd_step.clone() * 2u32).recip());
                if deriv.abs() < ctx.f(1e-30f64) {
                    return None;
                }
                let step = deriv.recip();
                u = &u - &step;
                if step.abs() < Float::with_val(prec, &fd_step * &ctx.f(1e-4f64)) {
                    break;
                }
            }
            let log_z = log_z_at(&u, n, ctx).ok()?;
            Some(PartitionZero {
                lambda: lambda_of_u(n, &u, ctx),
                u,
                log_abs_z: log_z.re,
            })
        })
        .collect();
    let mut zeros: Vec<PartitionZero> = Vec::new();
    let depth = Float::with_val(prec, &median_log_abs - &(ctx.f(10).ln() * (ctx.digits / 4)));
    for z in refined.into_iter().flatten() {
        if z.log_abs_z > depth {
            continue;
        }
        let sep = Float::with_val(prec, disc_radius_lambda / (rings as u32)) / 2u32;
        if zeros
            .iter()
            .all(|other| (&other.lambda - &z.lambda).abs() > sep)
        {
            zeros.push(z);
        }
    }
    zeros.sort_by(|a, b| a.lambda.re.partial_cmp(&b.lambda.re).unwrap());
    Ok(ZeroSearchReport {
        zeros,
        failed_points,
        median_log_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_constants_are_self_consistent() {
        let c = PrecisionContext::new(60);
        let prec = c.prec();
        let cc = CriticalConstants::new(&c);
        assert!(
            (Float::with_val(prec, &cc.c1 / &cc.u_c) - &cc.c2).abs() < c.eps_guarded(),
            "c2 != c1/u_c"
        );
        // γ²_c is a double root of 72u_c²g³ − g² + 1.
        let g = &cc.gamma2_c;
        let uc2 = cc.u_c.clone().square();
        let p = Float::with_val(prec, uc2.clone() * 72u32) * g.clone().pow(3u32)
            - g.clone().square()
            + 1u32;
        let dp = Float::with_val(prec, uc2 * 216u32) * g.clone().square() - g.clone() * 2u32;
        assert!(p.abs() < c.eps_guarded(), "not a root");
        assert!(dp.abs() < c.eps_guarded(), "not a double root");
        let beta = Float::with_val(prec, g.clone() - 1u32)
            / Float::with_val(prec, Float::with_val(prec, &cc.u_c * 6u32) * g);
        assert!((beta - &cc.beta_c).abs() < c.eps_guarded());
    }

    #[test]
    fn free_energy_series_leading_terms() {
        let c = PrecisionContext::new(40);
        let u = c.f(1e-5f64);
        let u2 = u.clone().square();
        let f0v = f0(&u, &c).unwrap();
        assert!(
            (Float::with_val(c.prec(), &f0v / &u2) - 6u32).abs() < 1e-7,
            "F0 leading term"
        );
        let f2v = f2(&u, &c).unwrap();
        assert!(
            (Float::with_val(c.prec(), &f2v / &u2) - 1.5f64).abs() < 1e-7,
            "F2 leading term"
        );
        assert!(f0(&c.f(0), &c).unwrap().is_zero());
        assert!(f2(&c.f(0), &c).unwrap().is_zero());
        assert!(matches!(
            f2(&u_critical(&c), &c),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn f0_series_matches_hypergeometric_form() {
        let c = PrecisionContext::new(40);
        for frac in [0.5f64, 0.9] {
            let u = u_critical(&c) * c.f(frac);
            let a = f0(&u, &c).unwrap();
            let b = f0_hypergeometric(&u, &c).unwrap();
            assert!(
                (a.clone() - &b).abs() < 1e-20,
                "mismatch at {frac}·u_c: {:e}",
                (a - b).abs().to_f64()
            );
        }
    }

    #[test]
    fn f0_derivatives_match_finite_differences() {
        // Termwise-differentiated series versus central differences at an
        // interior point (where both are cheap and accurate).
        let c = PrecisionContext::new(40);
        let u = u_critical(&c) * c.f(0.6f64);
        let h = c.f(1e-8f64);
        let up = Float::with_val(c.prec(), &u + &h);
        let um = Float::with_val(c.prec(), &u - &h);
        let d1 = f0_derivative(&u, 1, &c).unwrap();
        let fd1 = (f0(&up, &c).unwrap() - f0(&um, &c).unwrap()) / (h.clone() * 2u32);
        assert!((d1 - fd1).abs() < 1e-12);
        let d2 = f0_derivative(&u, 2, &c).unwrap();
        let fd2 = (f0(&up, &c).unwrap() + f0(&um, &c).unwrap()
            - f0(&u, &c).unwrap() * 2u32)
            / h.clone().square();
        assert!((d2 - fd2).abs() < 1e-6);
    }

    #[test]
    fn phi_map_and_inverse() {
        let c = PrecisionContext::new(50);
        assert!(phi(&c.f(0), &c).unwrap().is_zero());
        // φ'(0) = 2^{2/5} by a central difference.
        let h = c.f(1e-10f64);
        let d = (phi(&h, &c).unwrap() - phi(&(-h.clone()), &c).unwrap())
            / (h.clone() * 2u32);
        let expect = c.f(2).pow(c.f(2) / 5u32);
        assert!((d - expect).abs() < 1e-8);
        for x in [-0.3f64, -0.05, 0.02, 0.4, 2.0] {
            let t = phi_inv(&c.f(x), &c).unwrap();
            let back = phi(&t, &c).unwrap();
            assert!((back - c.f(x)).abs() < c.eps_guarded(), "round trip at {x}");
        }
        assert!(matches!(
            phi_inv(&c.f(-0.5f64), &c),
            Err(Error::RadiusViolation(_))
        ));
    }

    #[test]
    fn scaling_map_matches_expansion() {
        // v(λ) = 2c₂λ − (11/5)c₂²λ²N^{−4/5} + O(N^{−8/5}).
        let c = PrecisionContext::new(50);
        let n = 10_000u32;
        let lambda = c.f(1.5f64);
        let pred = scaling_maps(n, &lambda, &c).unwrap();
        let cc = CriticalConstants::new(&c);
        let n45 = c.f(n).pow(-c.f(4) / 5u32);
        let first = Float::with_val(c.prec(), &cc.c2 * &lambda) * 2u32;
        let second = cc.c2.clone().square() * lambda.clone().square()
            * Float::with_val(c.prec(), &n45 * 11u32)
            / 5u32;
        let model = first - second;
        let err = (pred.v.clone() - model).abs();
        let n85 = c.f(n).pow(-c.f(8) / 5u32).to_f64();
        assert!(
            err.to_f64() < 100.0 * n85,
            "v expansion defect {:e} vs N^(-8/5) = {:e}",
            err.to_f64(),
            n85
        );
        // Round trip λ → v → λ.
        let back = phi(
            &Float::with_val(c.prec(), &pred.v * &n45),
            &c,
        )
        .unwrap()
            * c.f(n).pow(c.f(4) / 5u32);
        assert!((back - &lambda).abs() < c.eps_guarded());
        assert!(
            (pred.v_tilde.clone() - &pred.v - c.f(n).pow(-c.f(1) / 5u32) / 2u32).abs()
                < c.eps_guarded()
        );
    }

    #[test]
    fn recurrence_prediction_identities() {
        let c = PrecisionContext::new(50);
        let zero = c.f(0);
        let p = predict_recurrence(40, &zero, &zero, None, &c).unwrap();
        assert!((p.gamma2_pred.clone() - c.f(3).sqrt()).abs() < c.eps_guarded());
        let y = c.f(0.37f64);
        let p = predict_recurrence(40, &zero, &y, Some(&y), &c).unwrap();
        let ratio = Float::with_val(c.prec(), &p.p2 / &p.q2);
        assert!((ratio - c.f(3).pow(c.f(0.25f64))).abs() < c.eps_guarded());
        // With and without the shifted-variable value: β_pred differs at
        // order N^{−2/5}·(y(λ̃) − y(λ)) only.
        let y2 = c.f(0.38f64);
        let pa = predict_recurrence(40, &zero, &y, Some(&y2), &c).unwrap();
        let pb = predict_recurrence(40, &zero, &y, None, &c).unwrap();
        assert!((pa.gamma2_pred.clone() - &pb.gamma2_pred).abs() < c.eps_guarded());
        assert!((pa.beta_pred.clone() - &pb.beta_pred).abs() < 0.01);
    }

    #[test]
    fn d_constant_stabilizes() {
        let c = PrecisionContext::new(30);
        let d = d_constant(&c).unwrap();
        assert!(d.is_finite());
        // The limit removes the log divergence: F² near u_c minus the
        // fitted singular part must approach D.
        let uc = u_critical(&c);
        let du = c.f(1e-3f64);
        let u = Float::with_val(c.prec(), &uc - &du);
        let approx = f2(&u, &c).unwrap() + du.clone().ln() / 48u32;
        assert!(
            (approx - &d).abs() < 0.1,
            "D = {} is not the finite part",
            d.to_f64()
        );
    }

    #[test]
    fn zero_search_finds_nothing_in_a_small_disc() {
        // The first pole of the seeded trajectory sits at λ ≈ 2.49; a
        // λ-disc of radius 1 contains no partition zeros.
        let c = PrecisionContext::new(40);
        let report = find_partition_zeros(6, &c.f(1), 48, &c).unwrap();
        assert_eq!(report.failed_points, 0);
        assert!(
            report.zeros.is_empty(),
            "unexpected zeros: {:?}",
            report
                .zeros
                .iter()
                .map(|z| (z.lambda.re.to_f64(), z.lambda.im.to_f64()))
                .collect::<Vec<_>>()
        );
    }
}
