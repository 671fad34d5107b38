//! Generalized hypergeometric series `pFq` for real parameters.
//!
//! Two call patterns matter here: terminating inner sums (an upper
//! parameter is a non-positive integer, so the series is a finite exact
//! sum) and convergent infinite series summed until a geometric tail bound
//! is below the precision target.

use super::{Error, PrecisionContext, Result};
use rug::Float;

/// True if `x` is a non-positive integer to working exactness.
fn is_nonpositive_integer(x: &Float) -> bool {
    x.is_integer() && !x.is_sign_positive() || x.is_zero()
}

/// Sums `pFq(upper; lower; z) = Σ_n [Π(a_i)_n / Π(b_j)_n] zⁿ/n!`.
///
/// Terminates exactly when an upper parameter is a non-positive integer;
/// otherwise stops when the running geometric tail bound drops below
/// `10^-digits` relative. Signals divergence for `p = q+1` with `|z| > 1`
/// (and any `p > q+1` with `z ≠ 0`) unless the series terminates first.
pub fn pfq(upper: &[Float], lower: &[Float], z: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let prec = ctx.prec();
    for b in lower {
        if is_nonpositive_integer(b) {
            // Allowed only if an upper parameter terminates the series
            // strictly earlier (checked as we sum).
            let terminates_before = upper.iter().any(|a| {
                is_nonpositive_integer(a) && a.clone().abs() < b.clone().abs()
            });
            if !terminates_before {
                return Err(Error::Domain(format!(
                    "pfq: lower parameter {b} is a non-positive integer"
                )));
            }
        }
    }
    let terminating = upper.iter().any(is_nonpositive_integer);
    if !terminating {
        let (p, q) = (upper.len(), lower.len());
        let za = z.clone().abs();
        if p > q + 1 && !z.is_zero() {
            return Err(Error::Divergence("pfq: p > q+1 with z != 0".into()));
        }
        if p == q + 1 && za > 1u32 {
            return Err(Error::Divergence("pfq: p = q+1 needs |z| <= 1".into()));
        }
    }

    let eps = ctx.eps();
    let mut term = Float::with_val(prec, 1);
    let mut sum = Float::with_val(prec, 1);
    let max_terms: u64 = 100_000_000;
    for n in 0..max_terms {
        // Termination check before forming term n+1.
        if upper
            .iter()
            .any(|a| is_nonpositive_integer(a) && (a.clone() + n as u32).is_zero())
        {
            return Ok(sum);
        }
        let mut ratio = Float::with_val(prec, z);
        for a in upper {
            ratio *= Float::with_val(prec, a + n as u32);
        }
        for b in lower {
            ratio /= Float::with_val(prec, b + n as u32);
        }
        ratio /= n as u32 + 1;
        term *= &ratio;
        sum += &term;
        if !terminating {
            let r = ratio.abs();
            if r < 0.75 {
                // Tail ≤ |term|·r/(1−r) once the ratio is decreasing (it
                // is eventually monotone for convergent parameter sets).
                let tail = term.clone().abs() * &r / (Float::with_val(prec, 1) - &r);
                if tail < Float::with_val(prec, sum.clone().abs() * &eps) {
                    return Ok(sum);
                }
            }
        }
    }
    Err(Error::Divergence(
        "pfq: series did not converge within the term budget".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40)
    }

    #[test]
    fn value_at_zero_is_one() {
        let c = ctx();
        let v = pfq(&[c.f(0.3f64), c.f(2)], &[c.f(4.5f64)], &c.f(0), &c).unwrap();
        assert!((v - 1u32).abs() < c.eps());
    }

    #[test]
    fn gauss_2f1_log_closed_form() {
        // ₂F₁(1,1;2;1/2) = −ln(1−z)/z = 2 ln 2.
        let c = ctx();
        let v = pfq(&[c.f(1), c.f(1)], &[c.f(2)], &c.f(0.5f64), &c).unwrap();
        let expect = c.f(2).ln() * 2u32;
        assert!((v - expect).abs() < c.eps_guarded());
    }

    #[test]
    fn terminating_series_of_length_one() {
        // Upper parameter 0 (the j = 1 inner sum): value 1 regardless of
        // the other parameters.
        let c = ctx();
        let v = pfq(
            &[c.f(0), c.f(2), c.f(6)],
            &[c.f(5), c.f(-0.5f64)],
            &c.f(1.5f64),
            &c,
        )
        .unwrap();
        assert!((v - 1u32).abs() < c.eps());
    }

    #[test]
    fn terminating_sum_is_precision_independent() {
        let lo = PrecisionContext::new(30);
        let hi = PrecisionContext::new(120);
        let eval = |c: &PrecisionContext| {
            pfq(
                &[c.f(-3), c.f(2), c.f(6)],
                &[c.f(5), c.f(-5)],
                &c.f(1.5f64),
                c,
            )
            .unwrap()
        };
        let a = eval(&lo);
        let b = eval(&hi);
        assert!((a - b).abs() < lo.eps());
    }

    #[test]
    fn divergence_is_flagged() {
        let c = ctx();
        let out = pfq(&[c.f(1), c.f(1)], &[c.f(2)], &c.f(1.5f64), &c);
        assert!(matches!(out, Err(Error::Divergence(_))));
    }
}
