//! Behaviour of `s ↦ F(u^s - 1)` near `s = 0` for `F` in the fraction field of Λ.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::padic::{iwasawa_log, PadicNumber};
use crate::series::LambdaFraction;

#[derive(Clone, Debug)]
pub struct ProfileRow {
    pub k: u32,
    /// `F(u^s - 1)` at `s = p^k`.
    pub value: PadicNumber,
    /// Digits shared with the constant term of `F(u^s (1 + T) - 1)`.
    pub twist_agreement: i64,
    /// `s^{-r} F(u^s - 1)`.
    pub scaled: PadicNumber,
    pub scaled_error: i64,
    /// `Δ_s^r f(0) / (s^r r!)` for `f(s) = F(u^s - 1)`, when `r ≥ 0`.
    pub derivative: Option<PadicNumber>,
    pub derivative_error: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct MeromorphicProfile {
    pub r: i64,
    /// `log_p(u)`.
    pub c: PadicNumber,
    /// `c^r F*(0)`.
    pub target: PadicNumber,
    pub rows: Vec<ProfileRow>,
    pub values_agree: bool,
    pub scaled_converges: bool,
    pub derivative_converges: Option<bool>,
}

/// `x^{p^k}` by repeated `p`-th powers.
fn pow_p_k(x: &PadicNumber, p: u64, k: u32) -> Result<PadicNumber> {
    let mut y = x.clone();
    for _ in 0..k {
        y = y.pow(p as i64)?;
    }
    Ok(y)
}

fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, b| a * b)
}

fn binomial(n: i64, k: i64) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn error_digits(a: &PadicNumber, b: &PadicNumber) -> i64 {
    let d = a.sub(b);
    d.valuation().unwrap_or_else(|| d.abs_precision())
}

/// Each step of the window must gain at least one digit, unless the estimate already
/// matches the target to its full precision.
fn gains_digits(errors: &[(i64, bool)]) -> bool {
    errors.windows(2).all(|w| w[1].1 || w[1].0 >= w[0].0 + 1)
}

/// Evaluates `s ↦ F(u^s - 1)` at `s = p^k` for `k` in `window` and checks that the
/// order-`r` behaviour at `s = 0` is `c^r F*(0)` with `c = log_p(u)`.
///
/// `F` must carry enough `p`-adic precision: dividing by `s^r` costs `r·k` digits.
pub fn meromorphic_profile(
    f: &LambdaFraction,
    u: &PadicNumber,
    r: i64,
    window: std::ops::RangeInclusive<u32>,
) -> Result<MeromorphicProfile> {
    let p = f.prime();
    let (k_min, k_max) = (*window.start(), *window.end());
    if k_min < 1 || k_max < k_min + 1 {
        return Err(Error::PoleWindowTooSmall(format!("window {k_min}..={k_max} needs two points with k ≥ 1")));
    }
    let one = PadicNumber::one(p, u.rel_precision());
    let d = u.sub(&one);
    if d.is_zero() || d.val_or_abs() < 1 || (p == 2 && d.val_or_abs() < 2) {
        return Err(Error::Invalid("u must be a principal unit different from 1".into()));
    }
    if f.is_zero() {
        return Err(Error::IndeterminateAtPrecision("F vanishes at precision".into()));
    }
    if f.t_order() != r {
        return Err(Error::Invalid(format!("F has order {} at T = 0, not {r}", f.t_order())));
    }
    let c = iwasawa_log(u)?;
    let target = c.pow(r)?.mul(&f.leading_coefficient()?);
    let mut rows = Vec::new();
    for k in window {
        let s = PadicNumber::one(p, crate::linalg::ONE_PREC).shift(k as i64);
        let us = pow_p_k(u, p, k)?;
        let x = us.sub(&one);
        let value = f.eval(&x)?;
        let twisted = f.substitute_twist(&us)?;
        let twist_agreement = if twisted.t_order() == 0 {
            twisted.leading_coefficient()?.relative_agreement(&value)
        } else {
            -1
        };
        let scaled = value.div(&s.pow(r)?)?;
        let scaled_error = error_digits(&scaled, &target);
        let (derivative, derivative_error) = if r >= 0 {
            let mut acc = PadicNumber::exact_zero(p);
            for j in 0..=r {
                let uj = if j == 0 { one.clone() } else { us.pow(j)? };
                let fj = if j == 0 { f.eval(&PadicNumber::exact_zero(p))? } else { f.eval(&uj.sub(&one))? };
                let coef = binomial(r, j) * if (r - j) % 2 == 0 { 1 } else { -1 };
                acc = acc.add(&fj.mul(&PadicNumber::from_bigint(p, &coef, crate::linalg::ONE_PREC)));
            }
            let denom = s.pow(r)?.mul(&PadicNumber::from_bigint(p, &factorial(r), crate::linalg::ONE_PREC));
            let est = acc.div(&denom)?;
            let e = error_digits(&est, &target);
            (Some(est), Some(e))
        } else {
            (None, None)
        };
        rows.push(ProfileRow { k, value, twist_agreement, scaled, scaled_error, derivative, derivative_error });
    }
    let values_agree = rows.iter().all(|row| row.twist_agreement >= crate::padic::PRECISION_FLOOR as i64);
    let scaled: Vec<(i64, bool)> =
        rows.iter().map(|row| (row.scaled_error, row.scaled.sub(&target).is_zero())).collect();
    let scaled_converges = gains_digits(&scaled);
    let derivative_converges = if r >= 0 {
        let d: Vec<(i64, bool)> = rows
            .iter()
            .map(|row| {
                let est = row.derivative.as_ref().expect("r ≥ 0");
                (row.derivative_error.expect("r ≥ 0"), est.sub(&target).is_zero())
            })
            .collect();
        Some(gains_digits(&d))
    } else {
        None
    };
    Ok(MeromorphicProfile { r, c, target, rows, values_agree, scaled_converges, derivative_converges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::IwasawaSeries;

    const P: u64 = 5;

    fn frac(c: &[i64], prec: u32) -> LambdaFraction {
        LambdaFraction::from_series(&IwasawaSeries::from_i64s(P, c, prec, 30))
    }

    #[test]
    fn t_gives_the_logarithm() {
        let u = PadicNumber::from_i64(P, 1 + P as i64, 60);
        let prof = meromorphic_profile(&frac(&[0, 1], 60), &u, 1, 1..=5).unwrap();
        assert!(prof.scaled_converges);
        assert_eq!(prof.derivative_converges, Some(true));
        assert_eq!(prof.target, iwasawa_log(&u).unwrap());
        assert!(prof.values_agree);
    }

    #[test]
    fn second_order_zero() {
        let u = PadicNumber::from_i64(P, 1 + P as i64, 80);
        let prof = meromorphic_profile(&frac(&[0, 0, 3], 80), &u, 2, 1..=5).unwrap();
        let c = iwasawa_log(&u).unwrap();
        assert_eq!(prof.target, c.mul(&c).scale_i64(3));
        assert_eq!(prof.derivative_converges, Some(true));
    }

    #[test]
    fn simple_pole() {
        let u = PadicNumber::from_i64(P, 1 + P as i64, 80);
        let f = frac(&[2, 1], 80).div(&frac(&[0, 1], 80)).unwrap();
        let prof = meromorphic_profile(&f, &u, -1, 1..=4).unwrap();
        assert!(prof.scaled_converges);
        assert!(prof.derivative_converges.is_none());
    }

    #[test]
    fn window_checks() {
        let u = PadicNumber::from_i64(P, 6, 40);
        assert!(matches!(meromorphic_profile(&frac(&[1], 40), &u, 0, 1..=1), Err(Error::PoleWindowTooSmall(_))));
        assert!(matches!(meromorphic_profile(&frac(&[1], 40), &u, 0, 0..=3), Err(Error::PoleWindowTooSmall(_))));
    }
}
