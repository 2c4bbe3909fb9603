use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::dirichlet::DirichletCharacter;
use crate::error::Result;
use crate::padic::PadicNumber;

/// `B_0, …, B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n {
        // Σ_{k<m+1} C(m+1, k) B_k = 0
        let mut acc = BigRational::zero();
        let mut c = BigInt::one();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(c.clone()) * bk;
            c = c * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// `B_n(x) = Σ_k C(n, k) B_k x^{n-k}`.
pub fn bernoulli_polynomial(n: usize, x: &BigRational, b: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    let mut c = BigInt::one();
    for k in 0..=n {
        acc += BigRational::from_integer(c.clone()) * &b[k] * pow(x, n - k);
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    acc
}

fn pow(x: &BigRational, k: usize) -> BigRational {
    (0..k).fold(BigRational::one(), |a, _| a * x)
}

/// `Σ_e c_e ζ^e` with `ζ` a primitive `order`-th root of unity.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclotomicRational {
    pub order: u64,
    pub coeffs: Vec<BigRational>,
}

impl CyclotomicRational {
    /// The value as a rational number when only `1` and `ζ^{order/2} = -1` occur.
    pub fn to_rational(&self) -> Option<BigRational> {
        let m = self.order as usize;
        let mut c = self.coeffs.clone();
        if m % 2 == 0 {
            for e in m / 2..m {
                let x = std::mem::replace(&mut c[e], BigRational::zero());
                c[e - m / 2] -= x;
            }
        }
        let half = if m % 2 == 0 { m / 2 } else { m };
        if half <= 1 {
            return Some(c[0].clone());
        }
        if c[1..half].iter().all(|x| x.is_zero()) {
            Some(c[0].clone())
        } else {
            None
        }
    }

    pub fn to_padic(&self, chi: &DirichletCharacter, p: u64, prec: u32) -> Result<PadicNumber> {
        let mut acc = PadicNumber::exact_zero(p);
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z = chi.root(e as u64, p, prec)?;
            acc = acc.add(&z.mul(&PadicNumber::from_rational(p, c.numer(), c.denom(), prec)?));
        }
        Ok(acc)
    }
}

/// `B_{n,χ} = f^{n-1} Σ_{a=1}^{f} χ(a) B_n(a/f)` over the modulus `f` of `χ`.
pub fn generalized_bernoulli(n: usize, chi: &DirichletCharacter) -> CyclotomicRational {
    let f = chi.modulus();
    let b = bernoulli_numbers(n);
    let fr = BigRational::from_integer(BigInt::from(f));
    let mut coeffs = vec![BigRational::zero(); chi.order() as usize];
    for a in 1..=f {
        if let Some(e) = chi.index(a as i64) {
            let x = BigRational::new(BigInt::from(a), BigInt::from(f));
            coeffs[e as usize] += bernoulli_polynomial(n, &x, &b);
        }
    }
    let scale = if n == 0 { fr.recip() } else { pow(&fr, n - 1) };
    for c in coeffs.iter_mut() {
        *c *= &scale;
    }
    CyclotomicRational { order: chi.order(), coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn classical_numbers() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[12], q(-691, 2730));
        assert!(b[7].is_zero());
    }

    #[test]
    fn generalized_examples() {
        let c4 = DirichletCharacter::quadratic(-4).unwrap();
        assert_eq!(generalized_bernoulli(1, &c4).to_rational(), Some(q(-1, 2)));
        let c8 = DirichletCharacter::quadratic(8).unwrap();
        assert_eq!(generalized_bernoulli(2, &c8).to_rational(), Some(q(2, 1)));
        let t = DirichletCharacter::trivial();
        assert_eq!(generalized_bernoulli(2, &t).to_rational(), Some(q(1, 6)));
        assert_eq!(generalized_bernoulli(1, &t).to_rational(), Some(q(1, 2)));
    }
}
