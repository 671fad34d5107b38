//! Adaptive composite Gauss–Legendre quadrature on segments and rays.
//!
//! Nodes and weights are computed once per (order, precision) pair by
//! Newton iteration on the Legendre recurrence and cached process-wide.
//! The adaptive engine integrates a *vector* of components in one pass so
//! that a full moment family `z^k·w(z)`, `k = 0..K`, shares every weight
//! evaluation; the scalar entry points are one-component wrappers.

use super::{ComplexValue, Error, PrecisionContext, Result};
use once_cell::sync::Lazy;
use rug::Float;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

type NodesWeights = Arc<(Vec<Float>, Vec<Float>)>;

static GL_CACHE: Lazy<Mutex<HashMap<(u32, u32), NodesWeights>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Gauss–Legendre nodes and weights of order `n` on [−1, 1] at `prec` bits.
pub(crate) fn gauss_legendre(n: u32, prec: u32) -> NodesWeights {
    if let Some(hit) = GL_CACHE.lock().unwrap().get(&(n, prec)) {
        return hit.clone();
    }
    let computed = Arc::new(compute_gauss_legendre(n, prec));
    GL_CACHE
        .lock()
        .unwrap()
        .entry((n, prec))
        .or_insert(computed)
        .clone()
}

/// Legendre P_n and P_{n−1} at `x` by the three-term recurrence.
fn legendre_pair(n: u32, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut pkm1 = Float::with_val(prec, 1);
    let mut pk = x.clone();
    for k in 2..=n {
        // k·P_k = (2k−1)·x·P_{k−1} − (k−1)·P_{k−2}
        let next = (Float::with_val(prec, x * &pk) * (2 * k - 1)
            - Float::with_val(prec, &pkm1 * (k - 1)))
            / k;
        pkm1 = pk;
        pk = Float::with_val(prec, next);
    }
    (pk, pkm1)
}

fn compute_gauss_legendre(n: u32, prec: u32) -> (Vec<Float>, Vec<Float>) {
    assert!(n >= 2);
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let mut nodes = vec![Float::new(prec); n as usize];
    let mut weights = vec![Float::new(prec); n as usize];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi-style initial guess, then Newton at full precision.
        // Newton squares the digit count each step, so a few dozen
        // iterations is far more than enough even at hundreds of digits.
        let mut x = Float::with_val(
            prec,
            pi.clone() * (4 * i + 3) / (4 * n + 2),
        )
        .cos();
        let one = Float::with_val(prec, 1);
        for _ in 0..64 {
            let (pn, pnm1) = legendre_pair(n, &x);
            // P'_n = n·(x·P_n − P_{n−1})/(x² − 1)
            let denom = x.clone().square() - &one;
            let dpn = Float::with_val(prec, &x * &pn);
            let dpn = (dpn - &pnm1) * n / denom;
            let step = pn / dpn;
            let converged = step.clone().abs()
                < Float::with_val(prec, Float::u_exp(1, -(prec as i32) + 8));
            x -= step;
            if converged {
                break;
            }
        }
        let (_, pnm1) = legendre_pair(n, &x);
        let denom = x.clone().square() - 1u32;
        let (pn_final, _) = legendre_pair(n, &x);
        let dpn = (Float::with_val(prec, &x * &pn_final) - &pnm1) * n / denom;
        let w = Float::with_val(prec, 2) / (Float::with_val(prec, 1) - x.clone().square())
            / dpn.square();
        let j = (n as usize) - 1 - (i as usize);
        nodes[i as usize] = -x.clone();
        weights[i as usize] = w.clone();
        nodes[j] = x;
        weights[j] = w;
    }
    if n % 2 == 1 {
        // Central node at x = 0 (the loop above computed it twice; make it
        // exactly zero for symmetry).
        let mid = (n as usize) / 2;
        nodes[mid] = Float::new(prec);
    }
    (nodes, weights)
}

/// One Gauss–Legendre panel of a vector integrand over [a, b].
fn panel(
    g: &mut dyn FnMut(&Float, &mut Vec<ComplexValue>),
    a: &Float,
    b: &Float,
    dim: usize,
    nw: &NodesWeights,
    prec: u32,
) -> (Vec<ComplexValue>, Vec<Float>) {
    let mid = Float::with_val(prec, a + b) / 2u32;
    let halfw = Float::with_val(prec, b - a) / 2u32;
    let mut acc = vec![ComplexValue::zero(prec); dim];
    // L1 mass per component: the attainable-accuracy scale. A component
    // whose integral is cancellation-small relative to its L1 mass cannot
    // be resolved below l1·roundoff no matter how deep the subdivision.
    let mut l1 = vec![Float::new(prec); dim];
    let mut vals: Vec<ComplexValue> = Vec::with_capacity(dim);
    for (x, w) in nw.0.iter().zip(nw.1.iter()) {
        let r = Float::with_val(prec, &halfw * x) + &mid;
        vals.clear();
        g(&r, &mut vals);
        debug_assert_eq!(vals.len(), dim);
        let scale = Float::with_val(prec, w * &halfw);
        for ((a_k, l_k), v_k) in acc.iter_mut().zip(l1.iter_mut()).zip(vals.iter()) {
            a_k.re += Float::with_val(prec, &v_k.re * &scale);
            a_k.im += Float::with_val(prec, &v_k.im * &scale);
            *l_k += v_k.abs() * scale.clone().abs();
        }
    }
    (acc, l1)
}

fn add_assign(dst: &mut [ComplexValue], src: &[ComplexValue]) {
    for (d, s) in dst.iter_mut().zip(src) {
        d.re += &s.re;
        d.im += &s.im;
    }
}

/// Adaptive integration of a vector of complex components over the real
/// segment [a, b]. All components share every integrand evaluation; the
/// subdivision stops when each component's coarse/fine discrepancy is below
/// `10^-digits` relative to that component's global magnitude.
pub fn integrate_segment_vec(
    g: &mut dyn FnMut(&Float, &mut Vec<ComplexValue>),
    a: &Float,
    b: &Float,
    dim: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<ComplexValue>> {
    let prec = ctx.prec();
    let nw = gauss_legendre(ctx.panel_nodes, prec);
    const INITIAL: u32 = 8;
    let width = Float::with_val(prec, b - a) / INITIAL;

    // Coarse pass fixes the per-component magnitude scale.
    let mut coarse: Vec<Vec<ComplexValue>> = Vec::with_capacity(INITIAL as usize);
    let mut est = vec![ComplexValue::zero(prec); dim];
    for i in 0..INITIAL {
        let pa = Float::with_val(prec, &width * i) + a;
        let pb = Float::with_val(prec, &width * (i + 1)) + a;
        let (val, _) = panel(g, &pa, &pb, dim, &nw, prec);
        add_assign(&mut est, &val);
        coarse.push(val);
    }
    let max_est = est
        .iter()
        .fold(Float::new(prec), |acc, v| acc.max(&v.abs()));
    let eps = ctx.eps();
    let floor = Float::with_val(prec, &max_est * &eps);
    let tol: Vec<Float> = est
        .iter()
        .map(|v| Float::with_val(prec, v.abs().max(&floor) * &eps) / INITIAL)
        .collect();
    let roundoff = ctx.eps_guarded();

    let mut budget: i64 = ctx.max_panels as i64;
    let mut total = vec![ComplexValue::zero(prec); dim];
    for (i, cv) in coarse.into_iter().enumerate() {
        let pa = Float::with_val(prec, &width * (i as u32)) + a;
        let pb = Float::with_val(prec, &width * (i as u32 + 1)) + a;
        let refined = refine(
            g, &pa, &pb, cv, &tol, &roundoff, dim, &nw, prec, &mut budget, 0,
        )?;
        add_assign(&mut total, &refined);
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    g: &mut dyn FnMut(&Float, &mut Vec<ComplexValue>),
    a: &Float,
    b: &Float,
    coarse: Vec<ComplexValue>,
    tol: &[Float],
    roundoff: &Float,
    dim: usize,
    nw: &NodesWeights,
    prec: u32,
    budget: &mut i64,
    depth: u32,
) -> Result<Vec<ComplexValue>> {
    *budget -= 2;
    if *budget < 0 {
        return Err(Error::QuadratureNonConvergence(
            "panel budget exhausted".into(),
        ));
    }
    if depth > 60 {
        return Err(Error::QuadratureNonConvergence(
            "maximum subdivision depth reached".into(),
        ));
    }
    let mid = Float::with_val(prec, a + b) / 2u32;
    let (left, l1_left) = panel(g, a, &mid, dim, nw, prec);
    let (right, l1_right) = panel(g, &mid, b, dim, nw, prec);
    let mut fine = left.clone();
    add_assign(&mut fine, &right);
    // A component is accepted at its requested tolerance or at the
    // roundoff floor of its L1 mass, whichever is reached first: below
    // the floor the discrepancy is arithmetic noise and further
    // subdivision cannot improve it.
    let accepted = fine
        .iter()
        .zip(coarse.iter())
        .zip(tol.iter())
        .zip(l1_left.iter().zip(l1_right.iter()))
        .all(|(((f, c), t), (ll, lr))| {
            let diff = (f - c).abs();
            if diff <= *t {
                return true;
            }
            let mass = Float::with_val(prec, ll + lr);
            diff <= Float::with_val(prec, &mass * roundoff)
        });
    if accepted {
        return Ok(fine);
    }
    let half_tol: Vec<Float> = tol
        .iter()
        .map(|t| Float::with_val(prec, t / 2u32))
        .collect();
    let mut l = refine(
        g, a, &mid, left, &half_tol, roundoff, dim, nw, prec, budget, depth + 1,
    )?;
    let r = refine(
        g, &mid, b, right, &half_tol, roundoff, dim, nw, prec, budget, depth + 1,
    )?;
    add_assign(&mut l, &r);
    Ok(l)
}

/// Adaptive integration of a single complex component over [a, b].
pub fn integrate_segment(
    g: &dyn Fn(&Float) -> ComplexValue,
    a: &Float,
    b: &Float,
    ctx: &PrecisionContext,
) -> Result<ComplexValue> {
    let mut wrapped = |r: &Float, out: &mut Vec<ComplexValue>| out.push(g(r));
    let v = integrate_segment_vec(&mut wrapped, a, b, 1, ctx)?;
    Ok(v.into_iter().next().unwrap())
}

/// `∫₀^R f(r·e^{iθ})·e^{iθ} dr` by adaptive panel quadrature.
///
/// The caller chooses the truncation radius `R` (see the weight-decay
/// policy in [`crate::orthopoly`]); the integrand must be analytic on the
/// ray segment.
pub fn integrate_ray(
    f: &dyn Fn(&ComplexValue) -> ComplexValue,
    theta: &Float,
    radius: &Float,
    ctx: &PrecisionContext,
) -> Result<ComplexValue> {
    let prec = ctx.prec();
    let dir = ComplexValue::cis(theta);
    let g = |r: &Float| -> ComplexValue {
        let z = dir.scale(r);
        &f(&z) * &dir
    };
    integrate_segment(&g, &Float::new(prec), radius, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40)
    }

    fn sqrt_half_pi(c: &PrecisionContext) -> Float {
        (c.pi() / 2u32).sqrt()
    }

    #[test]
    fn gaussian_half_line() {
        let c = ctx();
        let f = |z: &ComplexValue| (-z.square().scale(&c.f(0.5f64))).exp();
        let v = integrate_ray(&f, &c.f(0), &c.f(30), &c).unwrap();
        assert!((v.re.clone() - sqrt_half_pi(&c)).abs() < c.eps_guarded());
        assert!(v.im.clone().abs() < c.eps_guarded());
    }

    #[test]
    fn rotated_gaussian_matches_axis_by_cauchy() {
        let c = ctx();
        let f = |z: &ComplexValue| (-z.square().scale(&c.f(0.5f64))).exp();
        let axis = integrate_ray(&f, &c.f(0), &c.f(30), &c).unwrap();
        let theta = c.pi() / 5u32;
        // Decay along θ = π/5 goes like exp(−cos(2π/5)·r²/2); push R out.
        let rot = integrate_ray(&f, &theta, &c.f(30), &c).unwrap();
        assert!((&axis - &rot).abs() < c.eps_guarded() * axis.abs());
    }

    #[test]
    fn second_gaussian_moment() {
        let c = ctx();
        let f = |z: &ComplexValue| &z.square() * &(-z.square().scale(&c.f(0.5f64))).exp();
        let v = integrate_ray(&f, &c.f(0), &c.f(30), &c).unwrap();
        assert!((v.re.clone() - sqrt_half_pi(&c)).abs() < c.eps_guarded());
    }

    #[test]
    fn node_doubling_is_stable_on_the_weight_family() {
        // e^{−N(z²/2 − u z³)}·z^k along θ = π with N = 40, k = 80, u = u_c.
        let c = ctx();
        let mut c2 = c.clone();
        c2.panel_nodes *= 2;
        let n = 40u32;
        let uc = c.f(3).sqrt().sqrt() / 18u32;
        let k = 80i64;
        let f = |z: &ComplexValue| {
            let v = &z.square().scale(&c.f(0.5f64)) - &z.powi(3).scale(&uc);
            &(-v.scale(&c.f(n))).exp() * &z.powi(k)
        };
        let theta = c.pi();
        // R from N(R²/2 + u·R³) − k ln R ≥ (digits+guard)·ln 10.
        let radius = c.f(4);
        let a = integrate_ray(&f, &theta, &radius, &c).unwrap();
        let b = integrate_ray(&f, &theta, &radius, &c2).unwrap();
        assert!((&a - &b).abs() < c.eps_guarded() * a.abs());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut c = ctx();
        c.max_panels = 4;
        c.panel_nodes = 24;
        // A nasty integrand with an interior near-singularity.
        let g = |r: &Float| {
            let d = Float::with_val(r.prec(), r - &c.f(0.7f64));
            ComplexValue::from_real((d.square() + c.f(1e-30)).recip())
        };
        let out = integrate_segment(&g, &c.f(0), &c.f(1), &c);
        assert!(matches!(out, Err(Error::QuadratureNonConvergence(_))));
    }
}
