//! Truncated power series over `F_p`, used to test acyclicity after reduction mod p.

use crate::error::{Error, Result};
use crate::linalg::{Dvr, Field, Ring};
use crate::series::IwasawaSeries;
use num_traits::ToPrimitive;

const EXACT_T: usize = 1 << 30;

/// `Σ c_i T^i` known modulo `T^prec`; coefficients past `coeffs.len()` are zero.
#[derive(Clone, Debug)]
pub struct FpSeries {
    p: u64,
    coeffs: Vec<u64>,
    prec: usize,
}

impl FpSeries {
    pub fn new(p: u64, mut coeffs: Vec<u64>, prec: usize) -> Self {
        coeffs.truncate(prec);
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpSeries { p, coeffs, prec }
    }

    /// Reduction of an integral series modulo `p`.
    pub fn reduce(f: &IwasawaSeries) -> Result<Self> {
        let p = f.prime();
        let n = f.t_prec() + 1;
        let mut c = Vec::with_capacity(n);
        for x in f.coefficients() {
            if x.abs_precision() < 1 {
                return Err(Error::PrecisionExhausted("coefficient unknown mod p".into()));
            }
            let r = x
                .residue(1)
                .ok_or_else(|| Error::Invalid("reduction mod p of a non-integral series".into()))?;
            c.push(r.to_u64().unwrap_or(0));
        }
        Ok(Self::new(p, c, n))
    }

    fn get(&self, i: usize) -> u64 {
        *self.coeffs.get(i).unwrap_or(&0)
    }

    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    fn inv_mod(&self, a: u64) -> u64 {
        // a^(p-2) mod p
        let (mut base, mut e, mut acc) = (a % self.p, self.p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        acc
    }

    fn mul_impl(&self, o: &Self) -> Self {
        let va = self.valuation().unwrap_or(self.prec);
        let vb = o.valuation().unwrap_or(o.prec);
        let prec = (self.prec.saturating_add(vb)).min(o.prec.saturating_add(va)).min(EXACT_T);
        let len = (self.coeffs.len() + o.coeffs.len()).min(prec);
        let mut c = vec![0u64; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                c[i + j] = (c[i + j] + a * b) % self.p;
            }
        }
        Self::new(self.p, c, prec)
    }

    fn div_impl(&self, o: &Self) -> Result<Self> {
        let vb = o.valuation().ok_or(Error::DivisionByZero)?;
        let va = match self.valuation() {
            None => return Ok(Self::new(self.p, vec![], self.prec.saturating_sub(vb))),
            Some(v) => v,
        };
        if va < vb {
            return Err(Error::Invalid("quotient leaves F_p[[T]]".into()));
        }
        // unit parts are known modulo T^(prec - v); exact quotients are cut at a fixed length
        let n = (self.prec - va).min(o.prec - vb);
        let n_eff = if n >= EXACT_T { self.coeffs.len() + o.coeffs.len() + 64 } else { n };
        let b0inv = self.inv_mod(o.get(vb));
        let mut q = vec![0u64; n_eff];
        for i in 0..n_eff {
            let mut s = self.get(va + i);
            for j in 1..=i {
                s = (s + self.p * self.p - q[i - j] * o.get(vb + j) % self.p) % self.p;
            }
            q[i] = s * b0inv % self.p;
        }
        let shift = va - vb;
        let mut c = vec![0u64; shift];
        c.extend(q);
        Ok(Self::new(self.p, c, n_eff + shift))
    }
}

impl Ring for FpSeries {
    fn zero_like(&self) -> Self {
        FpSeries { p: self.p, coeffs: vec![], prec: EXACT_T }
    }
    fn one_like(&self) -> Self {
        FpSeries { p: self.p, coeffs: vec![1], prec: EXACT_T }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|i| (self.get(i) + o.get(i)) % self.p).collect();
        Self::new(self.p, c, self.prec.min(o.prec))
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_impl(o)
    }
    fn neg(&self) -> Self {
        let c = self.coeffs.iter().map(|&x| (self.p - x) % self.p).collect();
        Self::new(self.p, c, self.prec)
    }
}

impl Field for FpSeries {
    fn div(&self, o: &Self) -> Result<Self> {
        self.div_impl(o)
    }
    fn pivot_key(&self) -> (i64, i64) {
        (self.valuation().map_or(i64::MAX, |v| v as i64), 0)
    }
}

impl Dvr for FpSeries {
    fn dvr_val(&self) -> Option<i64> {
        self.valuation().map(|v| v as i64)
    }
    fn unit_part(&self) -> Result<Self> {
        let v = self.valuation().ok_or(Error::DivisionByZero)?;
        Ok(Self::new(self.p, self.coeffs[v..].to_vec(), self.prec - v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_by_unit() {
        let a = FpSeries::new(3, vec![1], 10);
        let b = FpSeries::new(3, vec![1, 1], 10);
        let q = a.div(&b).unwrap();
        // 1/(1+T) = 1 - T + T^2 - …
        assert_eq!(q.get(0), 1);
        assert_eq!(q.get(1), 2);
        assert_eq!(q.get(2), 1);
        assert!(q.mul(&b).sub(&a).is_zero());
    }
}
