//! Partition function from the orthogonal-polynomial norms, the Gaussian
//! (Selberg) reference value, free energy, the `t`-variable change, and the
//! exact Toda identity as a finite-`N` oracle.
//!
//! All partition quantities are carried in log space: `Z_N` spans thousands
//! of orders of magnitude already at modest `N`. The fundamental identity is
//! the Andréief/Heine product form `Z_N = N!·∏_{k<N} h_k`, so
//! `log Z_N = log N! + Σ log h_k` term by term (principal logs; for real
//! coupling every `h_k` is positive and no branch question arises).

use crate::numkernel::{ComplexValue, Error, PrecisionContext, Result};
use crate::orthopoly::{moments, recurrence_table, ModelPoint, RecurrenceTable};
use rug::ops::Pow;
use rug::Float;

/// Free energy and change-of-variable data at one model point.
#[derive(Debug, Clone)]
pub struct PartitionReport {
    pub model: ModelPoint,
    /// `log Z_N = log N! + Σ_{k<N} log h_k`.
    pub log_z: ComplexValue,
    /// `log Z_N⁰` of the Gaussian reference ensemble (Selberg closed form).
    pub log_z0: Float,
    /// `F_N = (log Z_N − log Z_N⁰)/N²`.
    pub f_n: ComplexValue,
    /// `t = 1/(4(3u)^{4/3})` (real `u > 0` only; NaN otherwise).
    pub t: Float,
    /// `F̃_N(t) = 2t^{3/2}/3 − ln(4t)/4 + F_N(u)`.
    pub f_tilde: ComplexValue,
}

/// `log Z_N` from the norm products. Requires `h_0..h_{N−1}`, i.e. a table
/// with `n_max ≥ N − 1`.
pub fn log_partition(table: &RecurrenceTable, n: u32) -> Result<ComplexValue> {
    let nn = n as usize;
    if table.h.len() < nn {
        return Err(Error::Domain(format!(
            "log_partition: need h_0..h_{}, table holds {}",
            nn - 1,
            table.h.len()
        )));
    }
    let prec = table.h[0].prec();
    let mut acc = ComplexValue::from_real(Float::with_val(prec, n + 1).ln_gamma());
    for h in table.h.iter().take(nn) {
        acc = &acc + &h.ln();
    }
    Ok(acc)
}

/// `log Z_N⁰` for the Gaussian weight `e^{−Nz²/2}` on the real line:
/// `Z_N⁰ = (2π)^{N/2} · N^{−N²/2} · ∏_{n=1}^{N} n!`.
pub fn selberg_gue(n: u32, ctx: &PrecisionContext) -> Float {
    let prec = ctx.prec();
    let two_pi = ctx.pi() * 2u32;
    let nf = ctx.f(n);
    let mut acc = two_pi.ln() * n / 2u32 - Float::with_val(prec, nf.clone().ln() * &nf) * &nf / 2u32;
    for k in 1..=n {
        acc += Float::with_val(prec, k + 1).ln_gamma();
    }
    acc
}

/// `t(u) = 1/(4(3u)^{4/3})` for real `u > 0`.
pub fn t_of_u(u: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !(u.is_finite() && u.is_sign_positive() && !u.is_zero()) {
        return Err(Error::Domain("t(u) requires real u > 0".into()));
    }
    let p = Float::with_val(ctx.prec(), u * 3u32).pow(ctx.f(4) / 3u32);
    Ok((p * 4u32).recip())
}

/// Inverse of [`t_of_u`]: `u(t) = (4t)^{−3/4}/3`.
pub fn u_of_t(t: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !(t.is_finite() && t.is_sign_positive() && !t.is_zero()) {
        return Err(Error::Domain("u(t) requires real t > 0".into()));
    }
    let p = Float::with_val(ctx.prec(), t * 4u32).pow(-ctx.f(3) / 4u32);
    Ok(p / 3u32)
}

/// `t_c = 3·2^{−2/3}`, image of `u_c` under [`t_of_u`].
pub fn t_critical(ctx: &PrecisionContext) -> Float {
    ctx.f(2).pow(-ctx.f(2) / 3u32) * 3u32
}

/// Full report at a model point: table → `log Z`, `F_N`, and (for real
/// positive `u`) the `t`-side free energy `F̃_N`.
pub fn partition_report(mp: &ModelPoint) -> Result<PartitionReport> {
    if mp.n_max + 1 < mp.n as usize {
        return Err(Error::Domain(
            "partition_report: n_max must be at least N − 1".into(),
        ));
    }
    let m = moments(mp)?;
    let table = recurrence_table(&m, mp)?;
    report_from_table(mp, &table)
}

/// As [`partition_report`] but reusing an existing table.
pub fn report_from_table(mp: &ModelPoint, table: &RecurrenceTable) -> Result<PartitionReport> {
    let ctx = &mp.ctx;
    let prec = ctx.prec();
    let log_z = log_partition(table, mp.n)?;
    let log_z0 = selberg_gue(mp.n, ctx);
    let n2 = ctx.f(mp.n).square();
    let f_n = (&log_z - &ComplexValue::from_real(log_z0.clone())).scale(&n2.clone().recip());
    let real_positive = mp.u.im.is_zero() && mp.u.re.is_sign_positive() && !mp.u.re.is_zero();
    let (t, f_tilde) = if real_positive {
        let t = t_of_u(&mp.u.re, ctx)?;
        let shift = Float::with_val(prec, t.clone().pow(ctx.f(3) / 2u32) * 2u32) / 3u32
            - Float::with_val(prec, t.clone() * 4u32).ln() / 4u32;
        (t.clone(), &f_n + &ComplexValue::from_real(shift))
    } else {
        (ctx.f(f64::NAN), f_n.clone())
    };
    Ok(PartitionReport {
        model: mp.clone(),
        log_z,
        log_z0,
        f_n,
        t,
        f_tilde,
    })
}

/// One Toda-identity evaluation: second central difference of `F̃_N` in `t`
/// against `γ̃²_{N,N}(t) = γ²_{N,N}(u)/(2√t)`.
#[derive(Debug, Clone)]
pub struct TodaCheck {
    pub lhs: Float,
    pub rhs: Float,
    pub residual: Float,
}

/// Tests the exact identity `d²F̃_N/dt² = γ̃²_{N,N}(t)` at `t(u)` with step
/// `h_step`. Each of the three evaluation points is a full independent
/// moment-table computation (no shared failure mode with the rhs); the
/// three points run concurrently.
pub fn toda_residual(u: &Float, n: u32, h_step: &Float, ctx: &PrecisionContext) -> Result<TodaCheck> {
    let prec = ctx.prec();
    let t0 = t_of_u(u, ctx)?;
    if Float::with_val(prec, &t0 - h_step) <= t_critical(ctx) {
        return Err(Error::Domain("toda_residual: t − h must stay above t_c".into()));
    }
    let ts = [
        Float::with_val(prec, &t0 - h_step),
        t0.clone(),
        Float::with_val(prec, &t0 + h_step),
    ];
    let mut reports: Vec<Option<Result<PartitionReport>>> = vec![None, None, None];
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for t in &ts {
            let ctx = ctx.clone();
            handles.push(scope.spawn(move || -> Result<PartitionReport> {
                let u_t = u_of_t(t, &ctx)?;
                let mp = ModelPoint::new(
                    ComplexValue::from_real(u_t),
                    n,
                    n as usize,
                    ComplexValue::new(ctx.f(0.5f64), ctx.f(0)),
                    &ctx,
                )?;
                partition_report(&mp)
            }));
        }
        for (slot, handle) in reports.iter_mut().zip(handles) {
            *slot = Some(handle.join().expect("Toda worker panicked"));
        }
    });
    let mut vals = Vec::with_capacity(3);
    for slot in reports {
        vals.push(slot.expect("Toda worker missing")?);
    }
    let mut lhs = vals[0].f_tilde.re.clone();
    lhs += &vals[2].f_tilde.re;
    lhs -= Float::with_val(prec, &vals[1].f_tilde.re * 2u32);
    lhs /= h_step.clone().square();
    // γ²_{N,N} at the center point.
    let center = &vals[1];
    let m = moments(&center.model)?;
    let table = recurrence_table(&m, &center.model)?;
    let rhs = Float::with_val(
        prec,
        &table.gamma2_n(n as usize).re / &Float::with_val(prec, t0.sqrt() * 2u32),
    );
    let residual = Float::with_val(prec, &lhs - &rhs);
    Ok(TodaCheck { lhs, rhs, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::u_critical;
    use crate::orthopoly::contour_integral;
    use crate::scaling::{f0, f2};

    fn model(u: Float, n: u32, ctx: &PrecisionContext) -> ModelPoint {
        ModelPoint::new(
            ComplexValue::from_real(u),
            n,
            n as usize,
            ComplexValue::new(ctx.f(0.5f64), ctx.f(0)),
            ctx,
        )
        .unwrap()
    }

    #[test]
    fn selberg_closed_forms() {
        let c = PrecisionContext::new(50);
        let z1 = selberg_gue(1, &c).exp();
        assert!((z1 - (c.pi() * 2u32).sqrt()).abs() < c.eps_guarded());
        let z2 = selberg_gue(2, &c).exp();
        assert!((z2 - c.pi()).abs() < c.eps_guarded());
    }

    #[test]
    fn gaussian_partition_matches_selberg() {
        let c = PrecisionContext::new(40);
        for n in [1u32, 3, 5] {
            let mp = ModelPoint::new(c.czero(), n, (n as usize).max(1), c.c64(0.5, 0.0), &c).unwrap();
            let rep = partition_report(&mp).unwrap();
            let diff = (rep.log_z.re.clone() - &rep.log_z0).abs();
            assert!(diff < 1e-25, "N = {n}: |Δ log Z| = {:e}", diff.to_f64());
            assert!(rep.log_z.im.clone().abs() < 1e-25);
        }
    }

    #[test]
    fn n2_partition_matches_brute_force_quadrature() {
        // Z_2 = ∫∫ (z1 − z2)² w(z1) w(z2) dz1 dz2 by nested contour
        // quadrature versus the norm-product identity Z_2 = 2!·h_0·h_1.
        let c = PrecisionContext::new(25);
        let u = Float::with_val(c.prec(), u_critical(&c) / 2u32);
        let mp = model(u, 2, &c);
        let rep = partition_report(&mp).unwrap();
        let brute = contour_integral(&mp, 4, &|z1| {
            contour_integral(&mp, 2, &|z2| (z1 - z2).square()).unwrap()
        })
        .unwrap();
        let diff = (&rep.log_z - &brute.ln()).abs();
        assert!(diff < 1e-15, "|Δ log Z_2| = {:e}", diff.to_f64());
    }

    #[test]
    fn t_change_of_variables_round_trips() {
        let c = PrecisionContext::new(50);
        let u = Float::with_val(c.prec(), u_critical(&c) / 2u32);
        let t = t_of_u(&u, &c).unwrap();
        let back = u_of_t(&t, &c).unwrap();
        assert!((back - &u).abs() < c.eps_guarded());
        let tc = t_critical(&c);
        let t_at_uc = t_of_u(&u_critical(&c), &c).unwrap();
        assert!((tc - t_at_uc).abs() < c.eps_guarded());
    }

    #[test]
    fn toda_residual_shrinks_quadratically_in_h() {
        let c = PrecisionContext::new(40);
        let u = Float::with_val(c.prec(), u_critical(&c) / 2u32);
        let big = toda_residual(&u, 6, &c.f(1e-2f64), &c).unwrap();
        let small = toda_residual(&u, 6, &c.f(1e-3f64), &c).unwrap();
        let r_big = big.residual.clone().abs();
        let r_small = small.residual.clone().abs();
        let ratio = Float::with_val(c.prec(), &r_big / &r_small).to_f64();
        assert!(
            (50.0..200.0).contains(&ratio),
            "expected O(h²) differencing: {:e} vs {:e} (ratio {ratio})",
            r_big.to_f64(),
            r_small.to_f64()
        );
    }

    #[test]
    fn free_energy_approaches_regular_expansion() {
        // |F_N − F⁰ − F²/N²| = O(N⁻⁴): going from N = 8 to N = 12 must
        // shrink the defect by well over (8/12)⁻² (ideal (12/8)⁴ ≈ 5).
        let defect = |n: u32| -> f64 {
            let c = PrecisionContext::for_model(n);
            let u = Float::with_val(c.prec(), u_critical(&c) / 2u32);
            let rep = partition_report(&model(u.clone(), n, &c)).unwrap();
            let expect = f0(&u, &c).unwrap()
                + f2(&u, &c).unwrap() / Float::with_val(c.prec(), n * n);
            (rep.f_n.re.clone() - expect).abs().to_f64()
        };
        let d8 = defect(8);
        let d12 = defect(12);
        assert!(
            d8 > 2.5 * d12,
            "defect did not shrink like N⁻⁴: {d8:e} vs {d12:e}"
        );
    }
}
