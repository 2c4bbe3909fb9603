//! Truncated Laurent series `T^r · Σ_{i ≤ n} c_i T^i` over `Q_p` with `c_0 ≠ 0`.
//!
//! `Λ_(T)` embeds in `Q_p((T))`, and the `T`-adic valuation is the exponent `r`.
//! Unlike `LambdaFraction` nothing is cross-multiplied, so the size of the
//! coefficients tracks the value rather than the history of the computation.
//! Each coefficient keeps its own `p`-adic precision.

use std::fmt;

use crate::error::{Error, Result};
use crate::padic::PadicNumber;
use crate::series::{IwasawaSeries, LambdaFraction};

#[derive(Clone, Debug)]
pub struct LaurentSeries {
    p: u64,
    order: i64,
    /// `c_0, …, c_n`. For a zero every entry vanishes at its precision, and the entries
    /// still record how well that is known.
    coeffs: Vec<PadicNumber>,
    zero: bool,
}

impl LaurentSeries {
    pub fn zero(p: u64, t_prec: usize) -> Self {
        LaurentSeries { p, order: 0, coeffs: vec![PadicNumber::exact_zero(p); t_prec + 1], zero: true }
    }

    /// Drops leading coefficients that vanish at precision.
    fn from_raw(p: u64, order: i64, mut coeffs: Vec<PadicNumber>) -> Self {
        match coeffs.iter().position(|c| !c.is_zero()) {
            None => {
                if coeffs.is_empty() {
                    coeffs.push(PadicNumber::exact_zero(p));
                }
                LaurentSeries { p, order, coeffs, zero: true }
            }
            Some(k) => {
                coeffs.drain(..k);
                LaurentSeries { p, order: order + k as i64, coeffs, zero: false }
            }
        }
    }

    pub fn from_coeffs(p: u64, order: i64, coeffs: Vec<PadicNumber>) -> Self {
        Self::from_raw(p, order, coeffs)
    }

    pub fn from_series(f: &IwasawaSeries) -> Self {
        Self::from_coeffs(f.prime(), 0, f.coefficients())
    }

    pub fn from_fraction(f: &LambdaFraction) -> Result<Self> {
        if f.is_zero() {
            return Ok(Self::zero(f.prime(), f.t_prec()));
        }
        let num = Self::from_series(f.numerator());
        let den = Self::from_series(f.denominator());
        let mut q = num.div(&den)?;
        q.order += f.t_order();
        Ok(q)
    }

    pub fn one(p: u64, prec: u32, t_prec: usize) -> Self {
        let mut c = vec![PadicNumber::exact_zero(p); t_prec + 1];
        c[0] = PadicNumber::one(p, prec);
        LaurentSeries { p, order: 0, coeffs: c, zero: false }
    }

    pub fn t(p: u64, prec: u32, t_prec: usize) -> Self {
        let mut s = Self::one(p, prec, t_prec);
        s.order = 1;
        s
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn t_order(&self) -> i64 {
        self.order
    }

    /// Number of known coefficients past the first.
    pub fn t_prec(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    /// Smallest absolute `p`-adic precision among the coefficients.
    pub fn abs_precision(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs_precision()).min().unwrap_or(i64::MAX)
    }

    pub fn leading_coefficient(&self) -> Result<PadicNumber> {
        if self.zero {
            return Err(Error::IndeterminateAtPrecision("zero has no leading coefficient".into()));
        }
        Ok(self.coeffs[0].clone())
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        for c in r.coeffs.iter_mut() {
            *c = c.neg();
        }
        r
    }

    pub fn add(&self, o: &Self) -> Self {
        let r = self.order.min(o.order);
        // last known exponent
        let top = (self.order + self.t_prec() as i64).min(o.order + o.t_prec() as i64);
        if top < r {
            return LaurentSeries { p: self.p, order: top, coeffs: vec![PadicNumber::exact_zero(self.p)], zero: true };
        }
        let n = (top - r) as usize + 1;
        let mut c = vec![PadicNumber::exact_zero(self.p); n];
        for (src, off) in [(self, self.order - r), (o, o.order - r)] {
            for (i, x) in src.coeffs.iter().enumerate() {
                let k = i + off as usize;
                if k < n {
                    c[k] = c[k].add(x);
                }
            }
        }
        Self::from_raw(self.p, r, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.coeffs.len().min(o.coeffs.len());
        let mut c = vec![PadicNumber::exact_zero(self.p); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            for (j, b) in o.coeffs.iter().take(n - i).enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Self::from_raw(self.p, self.order + o.order, c)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.zero {
            return Err(Error::DivisionByZero);
        }
        let n = self.coeffs.len();
        let a0 = self.coeffs[0].inv()?;
        let mut b: Vec<PadicNumber> = Vec::with_capacity(n);
        b.push(a0.clone());
        for k in 1..n {
            let mut acc = PadicNumber::exact_zero(self.p);
            for i in 1..=k {
                acc = acc.add(&self.coeffs[i].mul(&b[k - i]));
            }
            b.push(acc.mul(&a0).neg());
        }
        Ok(LaurentSeries { p: self.p, order: -self.order, coeffs: b, zero: false })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn scale(&self, c: &PadicNumber) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x.mul(c)).collect();
        Self::from_raw(self.p, self.order, coeffs)
    }

    /// `T^{-r} · self`.
    pub fn unit_part(&self) -> Self {
        let mut r = self.clone();
        r.order = 0;
        r
    }

    /// Whether the difference vanishes at the available precision.
    pub fn eq_at_precision(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            return write!(f, "O(p^{}, T^{})", self.abs_precision(), self.order + self.coeffs.len() as i64);
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match self.order + i as i64 {
                0 => write!(f, "({})", c)?,
                1 => write!(f, "({})*T", c)?,
                e => write!(f, "({})*T^{}", c, e)?,
            }
        }
        write!(f, " + O(T^{})", self.order + self.coeffs.len() as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[i64]) -> LaurentSeries {
        LaurentSeries::from_series(&IwasawaSeries::from_i64s(5, c, 30, 10))
    }

    #[test]
    fn geometric_inverse() {
        // 1/(5 + T) = Σ (-1)^n T^n / 5^(n+1)
        let q = s(&[5, 1]).inv().unwrap();
        assert_eq!(q.t_order(), 0);
        assert_eq!(q.coefficients()[3].valuation(), Some(-4));
        assert!(q.mul(&s(&[5, 1])).eq_at_precision(&LaurentSeries::one(5, 30, 10)));
    }

    #[test]
    fn cancellation_raises_the_order() {
        let a = s(&[3, 2, 1]);
        let b = s(&[3, 2, 4]);
        let d = a.sub(&b);
        assert_eq!(d.t_order(), 2);
        assert_eq!(d.t_prec(), 8);
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn fractions_embed() {
        let f = LambdaFraction::from_series(&IwasawaSeries::from_i64s(5, &[0, 5, 1], 30, 10));
        let g = LambdaFraction::from_series(&IwasawaSeries::from_i64s(5, &[10, 1], 30, 10));
        let q = LaurentSeries::from_fraction(&f.div(&g).unwrap()).unwrap();
        assert_eq!(q.t_order(), 1);
        let back = q.mul(&LaurentSeries::from_fraction(&g).unwrap());
        assert!(back.eq_at_precision(&LaurentSeries::from_fraction(&f).unwrap()));
    }
}
