//! Monic orthogonal polynomials of the cubic weight `e^{−N·V(z;u)}`,
//! `V(z; u) = z²/2 − u·z³`, on the two-ray contour family
//! `Γ = α·Γ₀ + (1−α)·Γ₁`.
//!
//! `Γ₀` runs from `∞·e^{iπ}` to `∞·e^{iπ/5}` and `Γ₁` from `∞·e^{iπ}` to
//! `∞·e^{−iπ/5}`, so every moment is a combination of three outgoing ray
//! integrals: `m_k = α·I_k(π/5) + (1−α)·I_k(−π/5) − I_k(π)`.
//!
//! Orthogonality here is *bilinear* (`∫ P_m P_n w dz`, no conjugation), so
//! the Hankel moment matrix is factorized by a transpose-symmetric
//! triangular decomposition, never a Hermitian one. All moments along one
//! ray are computed in a single vectorized quadrature pass, which shares
//! the (expensive) weight evaluations across every power `z^k`.

use crate::numkernel::{integrate_segment_vec, ComplexValue, Error, PrecisionContext, Result};
use rug::Float;

/// One evaluation point of the model: cubic coupling `u`, matrix size `N`,
/// maximal polynomial degree `n_max`, and the contour weight `α`.
///
/// Construction verifies that `Re V → +∞` along all three rays (weight
/// decay), which for real `u ≥ 0` always holds and for complex `u` may
/// genuinely fail.
#[derive(Debug, Clone)]
pub struct ModelPoint {
    pub u: ComplexValue,
    pub n: u32,
    pub n_max: usize,
    pub alpha: ComplexValue,
    pub ctx: PrecisionContext,
}

impl ModelPoint {
    pub fn new(
        u: ComplexValue,
        n: u32,
        n_max: usize,
        alpha: ComplexValue,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        if n == 0 || n_max == 0 {
            return Err(Error::Domain("ModelPoint: N and n_max must be positive".into()));
        }
        for num in RAY_FIFTHS {
            ray_decay_coefficients(&u, num)?;
        }
        Ok(Self {
            u,
            n,
            n_max,
            alpha,
            ctx: ctx.clone(),
        })
    }
}

/// Ray angles as multiples of π/5: `{5, 1, −1}` ↔ `{π, π/5, −π/5}`.
const RAY_FIFTHS: [i32; 3] = [5, 1, -1];

/// Large-`r` growth coefficients of `Re V` on the ray `arg z = num·π/5`:
/// `Re V(r·e^{iθ}) = c₂·r² + c₃·r³` with `c₂ = cos(2θ)/2` and
/// `c₃ = −Re(u·e^{3iθ})`. Errors unless `Re V → +∞` along the ray.
fn ray_decay_coefficients(u: &ComplexValue, num: i32) -> Result<(f64, f64)> {
    let theta = num as f64 * std::f64::consts::PI / 5.0;
    let c2 = (2.0 * theta).cos() / 2.0;
    let (ur, ui) = (u.re.to_f64(), u.im.to_f64());
    let c3 = -(ur * (3.0 * theta).cos() - ui * (3.0 * theta).sin());
    if c3 > 1e-300 || (c3.abs() <= 1e-300 && c2 > 0.0) {
        Ok((c2, c3))
    } else {
        Err(Error::Domain(format!(
            "weight does not decay on the ray arg z = {num}π/5 (c2 = {c2:.3}, c3 = {c3:.3e})"
        )))
    }
}

/// Radius beyond which `|z^k·e^{−N·V}|` on the ray has fallen
/// `(digits + guard)` decades below the integrand's peak:
/// `φ(r) = N·Re V(r) − k·ln r` must rise that far above its minimum.
fn truncation_radius(mp: &ModelPoint, k: usize, num: i32) -> Result<f64> {
    let (c2, c3) = ray_decay_coefficients(&mp.u, num)?;
    let nn = mp.n as f64;
    let kk = k as f64;
    let phi = |r: f64| nn * (c2 * r * r + c3 * r * r * r) - kk * r.ln();
    let mut phi_min = f64::INFINITY;
    let mut r_min = 1e-4;
    let mut r = 1e-4;
    while r < 1e9 {
        let p = phi(r);
        if p < phi_min {
            phi_min = p;
            r_min = r;
        }
        r *= 1.05;
    }
    let target = phi_min
        + (mp.ctx.digits + mp.ctx.guard_digits) as f64 * std::f64::consts::LN_10
        + 12.0;
    let mut r = r_min;
    for _ in 0..4000 {
        if phi(r) >= target && phi(r * 1.2) >= target {
            return Ok(r);
        }
        r *= 1.05;
    }
    Err(Error::Domain(format!(
        "truncation radius not found on the ray arg z = {num}π/5"
    )))
}

/// `w(z) = e^{−N·V(z;u)}` at `z`.
fn weight(mp: &ModelPoint, z: &ComplexValue) -> ComplexValue {
    let prec = mp.ctx.prec();
    let z2 = z.square();
    let z3 = &z2 * z;
    let v = &z2.scale(&mp.ctx.f(0.5f64)) - &(&mp.u * &z3);
    v.scale(&Float::with_val(prec, -(mp.n as i32))).exp()
}

/// The contour combination `(ray multiple of π/5, coefficient)` defining
/// `Γ = α·Γ₀ + (1−α)·Γ₁`: both `Γᵢ` traverse the ray at π *inward*, hence
/// the fixed −1.
fn contour_terms(mp: &ModelPoint) -> [(i32, ComplexValue); 3] {
    let prec = mp.ctx.prec();
    let one = ComplexValue::one(prec);
    [
        (5, -&one),
        (1, mp.alpha.clone()),
        (-1, &one - &mp.alpha),
    ]
}

/// Moments `m_0 .. m_{2·n_max}` of the weight over `Γ`, one vectorized
/// quadrature pass per ray (all powers share the weight evaluations).
pub fn moments(mp: &ModelPoint) -> Result<Vec<ComplexValue>> {
    let ctx = &mp.ctx;
    let prec = ctx.prec();
    let k_max = 2 * mp.n_max;
    let dim = k_max + 1;
    let mut total = vec![ComplexValue::zero(prec); dim];
    for (num, cf) in contour_terms(mp) {
        if cf.is_zero() {
            continue;
        }
        let radius = truncation_radius(mp, k_max, num)?;
        let theta = Float::with_val(prec, ctx.pi() * num) / 5u32;
        let dirn = ComplexValue::cis(&theta);
        let mut g = |r: &Float, out: &mut Vec<ComplexValue>| {
            let z = dirn.scale(r);
            let mut acc = weight(mp, &z);
            for _ in 0..dim {
                out.push(acc.clone());
                acc = &acc * &z;
            }
        };
        let integral = integrate_segment_vec(&mut g, &ctx.f(0), &ctx.f(radius), dim, ctx)?;
        let phase = &dirn * &cf;
        for (t, val) in total.iter_mut().zip(integral.iter()) {
            *t = &*t + &(&phase * val);
        }
    }
    Ok(total)
}

/// `∫_Γ f(z)·w(z) dz` for an entire integrand `f` of polynomial growth at
/// most `z^{poly_degree}` (sets the truncation radius).
pub fn contour_integral(
    mp: &ModelPoint,
    poly_degree: usize,
    f: &dyn Fn(&ComplexValue) -> ComplexValue,
) -> Result<ComplexValue> {
    let ctx = &mp.ctx;
    let prec = ctx.prec();
    let mut total = ComplexValue::zero(prec);
    for (num, cf) in contour_terms(mp) {
        if cf.is_zero() {
            continue;
        }
        let radius = truncation_radius(mp, poly_degree, num)?;
        let theta = Float::with_val(prec, ctx.pi() * num) / 5u32;
        let dirn = ComplexValue::cis(&theta);
        let mut g = |r: &Float, out: &mut Vec<ComplexValue>| {
            let z = dirn.scale(r);
            out.push(&f(&z) * &weight(mp, &z));
        };
        let integral = integrate_segment_vec(&mut g, &ctx.f(0), &ctx.f(radius), 1, ctx)?;
        total = &total + &(&(&dirn * &cf) * &integral[0]);
    }
    Ok(total)
}

/// Norms and recurrence coefficients extracted from the Hankel moment
/// matrix: `h: h_0..h_{n_max}`, `gamma2: γ²_1..γ²_{n_max}` (use
/// [`RecurrenceTable::gamma2_n`]), `beta: β_0..β_{n_max−1}`.
#[derive(Debug, Clone)]
pub struct RecurrenceTable {
    pub moments: Vec<ComplexValue>,
    pub h: Vec<ComplexValue>,
    pub gamma2: Vec<ComplexValue>,
    pub beta: Vec<ComplexValue>,
    /// Smallest-to-largest pivot magnitude ratio of the factorization.
    pub condition_estimate: Float,
}

impl RecurrenceTable {
    pub fn n_max(&self) -> usize {
        self.gamma2.len()
    }

    /// `γ²_n` for `n = 1..=n_max`.
    pub fn gamma2_n(&self, n: usize) -> &ComplexValue {
        &self.gamma2[n - 1]
    }

    /// `β_n` for `n = 0..=n_max−1`.
    pub fn beta_n(&self, n: usize) -> &ComplexValue {
        &self.beta[n]
    }
}

/// Factorizes the Hankel matrix `H[i][j] = m_{i+j}` as `L·D·Lᵀ` under the
/// complex-*bilinear* form (transpose symmetry, no conjugation):
///
/// * pivots `d_n = h_n` (norms), `γ²_n = d_n/d_{n−1}`,
/// * `β_n = L[n+1][n] − L[n][n−1]` (with `L[0][−1] = 0`).
///
/// A pivot below `10^{−digits+guard}` of the largest one signals
/// insufficient precision or genuine nonexistence of `P_n` at that degree.
pub fn recurrence_table(moments: &[ComplexValue], mp: &ModelPoint) -> Result<RecurrenceTable> {
    let ctx = &mp.ctx;
    let prec = ctx.prec();
    let d = mp.n_max + 1;
    if moments.len() < 2 * mp.n_max + 1 {
        return Err(Error::Domain(format!(
            "recurrence_table: need {} moments, got {}",
            2 * mp.n_max + 1,
            moments.len()
        )));
    }
    let hm = |i: usize, j: usize| &moments[i + j];
    let mut low: Vec<Vec<ComplexValue>> = vec![vec![ComplexValue::zero(prec); d]; d];
    let mut piv: Vec<ComplexValue> = Vec::with_capacity(d);
    let mut max_abs = Float::new(prec);
    let mut min_abs = Float::new(prec);
    for j in 0..d {
        let mut pj = hm(j, j).clone();
        for k in 0..j {
            pj = &pj - &(&low[j][k].square() * &piv[k]);
        }
        let a = pj.abs();
        if j == 0 {
            if a.is_zero() {
                return Err(Error::PivotCollapse { n: 0, ratio: 0.0 });
            }
            max_abs = a.clone();
            min_abs = a;
        } else {
            if a < Float::with_val(prec, &ctx.eps_guarded() * &max_abs) {
                return Err(Error::PivotCollapse {
                    n: j,
                    ratio: (a / &max_abs).to_f64(),
                });
            }
            max_abs = max_abs.max(&a);
            min_abs = min_abs.min(&a);
        }
        for i in (j + 1)..d {
            let mut s = hm(i, j).clone();
            for k in 0..j {
                s = &s - &(&(&low[i][k] * &low[j][k]) * &piv[k]);
            }
            low[i][j] = &s / &pj;
        }
        low[j][j] = ComplexValue::one(prec);
        piv.push(pj);
    }
    let gamma2 = (1..d).map(|n| &piv[n] / &piv[n - 1]).collect();
    let beta = (0..mp.n_max)
        .map(|n| {
            if n == 0 {
                low[1][0].clone()
            } else {
                &low[n + 1][n] - &low[n][n - 1]
            }
        })
        .collect();
    Ok(RecurrenceTable {
        moments: moments.to_vec(),
        h: piv,
        gamma2,
        beta,
        condition_estimate: min_abs / max_abs,
    })
}

/// `P_n(z)` by the forward recurrence
/// `P_{k+1} = (z − β_k)·P_k − γ²_k·P_{k−1}` from `P_0 = 1`.
pub fn eval_polynomial(table: &RecurrenceTable, z: &ComplexValue, n: usize) -> Result<ComplexValue> {
    if n > table.n_max() {
        return Err(Error::Domain(format!(
            "eval_polynomial: degree {n} exceeds n_max = {}",
            table.n_max()
        )));
    }
    let prec = z.prec();
    let mut pm = ComplexValue::one(prec);
    if n == 0 {
        return Ok(pm);
    }
    let mut p = z - table.beta_n(0);
    for k in 1..n {
        let next = &(&(z - table.beta_n(k)) * &p) - &(table.gamma2_n(k) * &pm);
        pm = p;
        p = next;
    }
    Ok(p)
}

/// String-equation residuals — exact finite-`N` identities of the weight,
/// the module's strongest end-to-end oracle:
///
/// * `r1_n = 3u(γ²_n + β²_n + γ²_{n+1}) − β_n` for `n = 0..n_max−1`,
/// * `r2_n = γ²_n(1 − 3u(β_n + β_{n−1})) − n/N` for `n = 1..n_max−1`,
///
/// with `γ²_0 = 0`.
#[derive(Debug, Clone)]
pub struct StringResiduals {
    pub r1: Vec<ComplexValue>,
    pub r2: Vec<ComplexValue>,
}

impl StringResiduals {
    /// Largest residual magnitude across both families.
    pub fn max_abs(&self, prec: u32) -> Float {
        let mut worst = Float::new(prec);
        for r in self.r1.iter().chain(self.r2.iter()) {
            worst = worst.max(&r.abs());
        }
        worst
    }
}

pub fn string_residuals(table: &RecurrenceTable, mp: &ModelPoint) -> StringResiduals {
    let prec = mp.ctx.prec();
    let three_u = mp.u.scale(&mp.ctx.f(3));
    let g2 = |n: usize| {
        if n == 0 {
            ComplexValue::zero(prec)
        } else {
            table.gamma2_n(n).clone()
        }
    };
    let n_max = table.n_max();
    let mut r1 = Vec::with_capacity(n_max);
    for n in 0..n_max {
        let s = &(&g2(n) + &table.beta[n].square()) + &g2(n + 1);
        r1.push(&(&three_u * &s) - &table.beta[n]);
    }
    let mut r2 = Vec::with_capacity(n_max.saturating_sub(1));
    for n in 1..n_max {
        let b = &table.beta[n] + &table.beta[n - 1];
        let factor = &ComplexValue::one(prec) - &(&three_u * &b);
        let ratio = ComplexValue::from_real(mp.ctx.f(n as u32) / mp.ctx.f(mp.n));
        r2.push(&(&g2(n) * &factor) - &ratio);
    }
    StringResiduals { r1, r2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::u_critical;

    fn table_for(
        u: ComplexValue,
        n: u32,
        n_max: usize,
        alpha: ComplexValue,
        ctx: &PrecisionContext,
    ) -> RecurrenceTable {
        let mp = ModelPoint::new(u, n, n_max, alpha, ctx).unwrap();
        let m = moments(&mp).unwrap();
        recurrence_table(&m, &mp).unwrap()
    }

    #[test]
    fn gaussian_moments_and_recurrence() {
        // u = 0: the contour deforms to the real line, so the moments are
        // Gaussian and γ²_n = n/N, β_n = 0 for any α.
        let c = PrecisionContext::new(40);
        let n = 20u32;
        let mp = ModelPoint::new(c.czero(), n, 8, c.c64(0.3, 0.2), &c).unwrap();
        let m = moments(&mp).unwrap();
        let m0 = (c.pi() * 2u32 / n).sqrt();
        let tol = c.f(1e-30f64);
        assert!((m[0].re.clone() - &m0).abs() < tol, "m0 = {}", m[0].re);
        assert!(m[0].im.clone().abs() < tol);
        assert!(m[1].abs() < tol);
        assert!((m[2].re.clone() - Float::with_val(c.prec(), &m0 / n)).abs() < tol);
        let t = recurrence_table(&m, &mp).unwrap();
        for nn in 1..=8usize {
            let expect = c.f(nn as u32) / n;
            assert!(
                (t.gamma2_n(nn).re.clone() - &expect).abs() < tol,
                "gamma2_{nn}"
            );
            assert!(t.gamma2_n(nn).im.clone().abs() < tol);
        }
        for nn in 0..8usize {
            assert!(t.beta_n(nn).abs() < tol, "beta_{nn}");
        }
    }

    #[test]
    fn conjugate_contour_symmetry() {
        // For real u the rays of Γ₀ and Γ₁ are complex conjugates, so the
        // tables at α and 1−α are entrywise conjugate, and at α = 1/2
        // everything is real.
        let c = PrecisionContext::new(40);
        let u = ComplexValue::from_real(u_critical(&c) / 2u32);
        let ta = table_for(u.clone(), 6, 4, c.c64(0.3, 0.0), &c);
        let tb = table_for(u.clone(), 6, 4, c.c64(0.7, 0.0), &c);
        let tol = c.f(1e-20f64);
        for (a, b) in ta.gamma2.iter().zip(tb.gamma2.iter()) {
            assert!((&a.conj() - b).abs() < tol);
        }
        for (a, b) in ta.beta.iter().zip(tb.beta.iter()) {
            assert!((&a.conj() - b).abs() < tol);
        }
        let th = table_for(u, 6, 4, c.c64(0.5, 0.0), &c);
        for v in th.gamma2.iter().chain(th.beta.iter()).chain(th.h.iter()) {
            assert!(v.im.clone().abs() < tol, "imaginary leak {:e}", v.im.to_f64());
        }
    }

    #[test]
    fn string_residuals_vanish_and_scale_with_digits() {
        let run = |digits: u32| -> Float {
            let c = PrecisionContext::new(digits);
            let u = ComplexValue::from_real(u_critical(&c));
            let mp = ModelPoint::new(u, 10, 10, c.c64(0.5, 0.0), &c).unwrap();
            let m = moments(&mp).unwrap();
            let t = recurrence_table(&m, &mp).unwrap();
            string_residuals(&t, &mp).max_abs(c.prec())
        };
        let r50 = run(50);
        assert!(r50 < 1e-25, "residual at 50 digits: {:e}", r50.to_f64());
        let r60 = run(60);
        assert!(
            r60 < Float::with_val(r50.prec(), &r50 / 10u32),
            "no precision scaling: {:e} -> {:e}",
            r50.to_f64(),
            r60.to_f64()
        );
    }

    #[test]
    fn degree_shift_consistency() {
        let c = PrecisionContext::new(40);
        let u = ComplexValue::from_real(u_critical(&c) / 2u32);
        let t5 = table_for(u.clone(), 6, 5, c.c64(0.5, 0.0), &c);
        let t7 = table_for(u, 6, 7, c.c64(0.5, 0.0), &c);
        let tol = c.f(1e-25f64);
        for n in 1..=5usize {
            assert!((t5.gamma2_n(n) - t7.gamma2_n(n)).abs() < tol);
        }
        for n in 0..5usize {
            assert!((t5.beta_n(n) - t7.beta_n(n)).abs() < tol);
        }
    }

    #[test]
    fn polynomial_orthogonality_by_quadrature() {
        // Independent checks of the factorization through fresh contour
        // quadratures: ∫ P₂·z·w = 0 and ∫ P_n²·w = h_n.
        let c = PrecisionContext::new(40);
        let u = ComplexValue::from_real(u_critical(&c) / 2u32);
        let mp = ModelPoint::new(u, 6, 5, c.c64(0.5, 0.0), &c).unwrap();
        let m = moments(&mp).unwrap();
        let t = recurrence_table(&m, &mp).unwrap();
        let tol = c.f(1e-25f64);

        let i1 = contour_integral(&mp, 3, &|z| {
            &eval_polynomial(&t, z, 2).unwrap() * z
        })
        .unwrap();
        assert!(i1.abs() < tol, "P2 ⟂ z failed: {:e}", i1.abs().to_f64());

        for n in [0usize, 2, 3] {
            let i2 = contour_integral(&mp, 2 * n, &|z| {
                eval_polynomial(&t, z, n).unwrap().square()
            })
            .unwrap();
            assert!(
                (&i2 - &t.h[n]).abs() < tol,
                "norm mismatch at n = {n}: {:e}",
                (&i2 - &t.h[n]).abs().to_f64()
            );
        }

        // P₁ = z − β₀ with β₀ = m₁/m₀.
        let beta0 = &t.moments[1] / &t.moments[0];
        assert!((&beta0 - t.beta_n(0)).abs() < tol);
    }
}
