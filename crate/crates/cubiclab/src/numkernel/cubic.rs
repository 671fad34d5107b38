//! Closed-form cubic solver with a Newton polish.
//!
//! The laboratory's endpoint equations are cubics with real coefficients
//! whose *analytic branch* must be tracked through parameter sweeps, so the
//! solver is deterministic: Cardano's closed form at working precision,
//! one Newton polish per root (skipped near multiple roots where Newton
//! would degrade the closed form), and a documented sort order.

use super::{ComplexValue, Error, PrecisionContext, Result};
use rug::Float;

/// Solves `c3·x³ + c2·x² + c1·x + c0 = 0` over ℂ.
///
/// Returns the three roots (with multiplicity), sorted by descending real
/// part, ties broken by ascending imaginary part. Each root `r` satisfies
/// `|f(r)| ≤ 10^(−digits+guard) · max coefficient magnitude` for
/// well-scaled inputs.
pub fn solve_cubic(
    c3: &Float,
    c2: &Float,
    c1: &Float,
    c0: &Float,
    ctx: &PrecisionContext,
) -> Result<[ComplexValue; 3]> {
    if c3.is_zero() {
        return Err(Error::Domain("solve_cubic: leading coefficient is zero".into()));
    }
    let prec = ctx.prec();
    let f = |v: f64| Float::with_val(prec, v);

    // Depressed form t³ + p·t + q with x = t − c2/(3c3).
    let b = Float::with_val(prec, c2 / c3);
    let c = Float::with_val(prec, c1 / c3);
    let d = Float::with_val(prec, c0 / c3);
    let shift = Float::with_val(prec, &b / &f(3.0));
    let p = c.clone() - Float::with_val(prec, b.clone().square() / &f(3.0));
    let q = Float::with_val(prec, 2 * b.clone().square() * &b) / f(27.0)
        - Float::with_val(prec, &b * &c) / f(3.0)
        + d;

    let scale_pq = Float::with_val(prec, p.clone().abs().max(&q.clone().abs()));
    let roots_t: [ComplexValue; 3] = if scale_pq.is_zero() {
        // Triple root of the depressed cubic.
        [ComplexValue::zero(prec), ComplexValue::zero(prec), ComplexValue::zero(prec)]
    } else {
        // Cardano: w³ = −q/2 ± sqrt(q²/4 + p³/27), sign chosen to avoid
        // cancellation; t = w − p/(3w) over the three cube-root branches.
        let disc = Float::with_val(prec, q.clone().square() / &f(4.0))
            + Float::with_val(prec, p.clone().square() * &p) / f(27.0);
        let s = ComplexValue::from_real(disc).sqrt();
        let mq2 = ComplexValue::from_real(-Float::with_val(prec, &q / &f(2.0)));
        let cand_plus = &mq2 + &s;
        let cand_minus = &mq2 - &s;
        let w3 = if cand_plus.abs() >= cand_minus.abs() {
            cand_plus
        } else {
            cand_minus
        };
        let third = Float::with_val(prec, 1) / 3u32;
        let w = w3.powf(&third);
        // ω = e^{2πi/3}
        let half = Float::with_val(prec, -0.5f64);
        let s3h = Float::with_val(prec, 3).sqrt() / 2u32;
        let omega = ComplexValue::new(half.clone(), s3h.clone());
        let omega2 = ComplexValue::new(half, -s3h);
        let p3 = ComplexValue::from_real(Float::with_val(prec, &p / &f(3.0)));
        let root_from = |wk: ComplexValue| -> ComplexValue {
            &wk - &(&p3 / &wk)
        };
        [
            root_from(w.clone()),
            root_from(&w * &omega),
            root_from(&w * &omega2),
        ]
    };

    let coeff_scale = [c3, c2, c1, c0]
        .iter()
        .fold(Float::new(prec), |acc, v| acc.max(&(*v).clone().abs()));
    let eval = |z: &ComplexValue| -> ComplexValue {
        // Horner with the original coefficients.
        let mut acc = ComplexValue::from_real(Float::with_val(prec, c3));
        for cc in [c2, c1, c0] {
            acc = &(&acc * z) + &ComplexValue::from_real(Float::with_val(prec, cc));
        }
        acc
    };
    let eval_deriv = |z: &ComplexValue| -> ComplexValue {
        let mut acc = ComplexValue::from_real(Float::with_val(prec, 3 * c3.clone()));
        acc = &(&acc * z) + &ComplexValue::from_real(Float::with_val(prec, 2 * c2.clone()));
        &(&acc * z) + &ComplexValue::from_real(Float::with_val(prec, c1))
    };

    // Newton polish guarded against multiple roots: if |f'| is tiny the
    // closed form is already the best available and Newton would amplify
    // the cancellation error.
    let deriv_floor = {
        let mut t = ctx.f(10);
        use rug::ops::PowAssign;
        t.pow_assign(-(ctx.digits as i32) / 2);
        t * &coeff_scale
    };
    let mut roots: Vec<ComplexValue> = roots_t
        .into_iter()
        .map(|t| {
            let mut r = ComplexValue::new(t.re - &shift, t.im);
            for _ in 0..2 {
                let fv = eval(&r);
                let dv = eval_deriv(&r);
                if dv.abs() <= deriv_floor {
                    break;
                }
                let step = &fv / &dv;
                let r_next = &r - &step;
                if eval(&r_next).abs() <= fv.abs() {
                    r = r_next;
                } else {
                    break;
                }
            }
            // Snap near-real roots of a real cubic onto the axis.
            let axis_tol = ctx.eps_guarded() * (r.abs() + 1u32);
            if !r.im.is_zero() && r.im.clone().abs() < axis_tol {
                r.im = Float::new(prec);
            }
            r
        })
        .collect();

    roots.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    let mut it = roots.into_iter();
    Ok([it.next().unwrap(), it.next().unwrap(), it.next().unwrap()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40)
    }

    fn residual_ok(roots: &[ComplexValue; 3], c: [&Float; 4], ctx: &PrecisionContext) {
        let scale = c
            .iter()
            .fold(Float::new(ctx.prec()), |acc, v| acc.max(&(*v).clone().abs()));
        for r in roots {
            let mut acc = ComplexValue::from_real(c[0].clone());
            for cc in &c[1..] {
                acc = &(&acc * r) + &ComplexValue::from_real((*cc).clone());
            }
            assert!(
                acc.abs() <= ctx.eps_guarded() * &scale,
                "residual {} too large",
                acc.abs()
            );
        }
    }

    #[test]
    fn endpoint_cubic_at_u_zero() {
        // 18τ³ − 9τ² + τ = 0 → {1/3, 1/6, 0}
        let c = ctx();
        let (c3, c2, c1, c0) = (c.f(18), c.f(-9), c.f(1), c.f(0));
        let roots = solve_cubic(&c3, &c2, &c1, &c0, &c).unwrap();
        let expect = [c.f(1) / 3u32, c.f(1) / 6u32, c.f(0)];
        for (r, e) in roots.iter().zip(expect.iter()) {
            assert!((r.re.clone() - e).abs() < c.eps_guarded());
            assert!(r.im.is_zero());
        }
        residual_ok(&roots, [&c3, &c2, &c1, &c0], &c);
    }

    #[test]
    fn triple_root_zero() {
        let c = ctx();
        let roots = solve_cubic(&c.f(1), &c.f(0), &c.f(0), &c.f(0), &c).unwrap();
        for r in &roots {
            assert!(r.abs().is_zero());
        }
    }

    #[test]
    fn critical_double_root() {
        // 18τ³ − 9τ² + τ − 6u_c² = 0 with u_c = 3^{1/4}/18:
        // double root 1/6 − √3/18 and simple root 1/6 + √3/9.
        let c = ctx();
        let uc2 = c.f(3).sqrt() / 324u32; // u_c² = √3/324
        let c0 = -(c.f(6) * &uc2);
        let roots = solve_cubic(&c.f(18), &c.f(-9), &c.f(1), &c0, &c).unwrap();
        let s3 = c.f(3).sqrt();
        let single = c.f(1) / 6u32 + s3.clone() / 9u32;
        let double = c.f(1) / 6u32 - s3 / 18u32;
        // Sorted descending by real part: single root first.
        assert!((roots[0].re.clone() - &single).abs() < c.eps_guarded());
        // Double roots: accuracy is limited to half the working digits.
        let half_tol = {
            use rug::ops::Pow;
            c.f(10).pow(-(c.digits as i32) / 2 + 3)
        };
        assert!((roots[1].re.clone() - &double).abs() < half_tol);
        assert!((roots[2].re.clone() - &double).abs() < half_tol);
    }

    #[test]
    fn random_cubics_satisfy_residual_bound() {
        use rand::{Rng, SeedableRng};
        let c = ctx();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xC0FFEE);
        for _ in 0..1000 {
            let co: Vec<Float> = (0..4).map(|_| c.f(rng.gen_range(-1.0..1.0))).collect();
            if co[0].clone().abs() < 1e-3 {
                continue;
            }
            let roots = solve_cubic(&co[0], &co[1], &co[2], &co[3], &c).unwrap();
            residual_ok(&roots, [&co[0], &co[1], &co[2], &co[3]], &c);
        }
    }

    #[test]
    fn complex_pair_is_conjugate_sorted() {
        let c = ctx();
        // x³ + x = 0 → {0, ±i} as a set.
        let roots = solve_cubic(&c.f(1), &c.f(0), &c.f(1), &c.f(0), &c).unwrap();
        let mut ims: Vec<f64> = roots.iter().map(|r| r.im.to_f64()).collect();
        ims.sort_by(f64::total_cmp);
        for (got, want) in ims.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-30);
        }
        for r in &roots {
            assert!(r.re.clone().abs() < c.eps_guarded());
        }
    }
}
