//! `L_p(s, χ)` as a power series in `t = 1 - s`.
//!
//! With `F` a common multiple of `f_χ` and `q` (`q = 4` for `p = 2`),
//!
//! `L_p(s, χ) = 1/(F(s-1)) Σ_{a ≤ F, p ∤ a} χ(a) ⟨a⟩^{1-s} Σ_j C(1-s, j) B_j (F/a)^j`.
//!
//! Writing `g(t)` for the double sum, `⟨a⟩^t = exp(t log_p⟨a⟩)` and `C(t, j)` is a polynomial in `t`,
//! so `g` is a power series whose coefficients tend to zero; `L_p = -g(t) / (F t)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::bernoulli::bernoulli_numbers;
use super::dirichlet::DirichletCharacter;
use crate::error::{Error, Result};
use crate::padic::{iwasawa_log, split_p, PadicNumber};

/// Extra `p`-adic digits carried through the double sum.
pub const L_GUARD: u32 = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    /// The multiple `F` of the conductor used in the sum.
    pub f_cap: u64,
    /// Number of `t`-coefficients kept (and of Bernoulli terms per `a`).
    pub terms: usize,
    /// Absolute `p`-adic precision of the coefficients of `g`.
    pub working_digits: u32,
}

#[derive(Clone, Debug)]
pub struct LSeries {
    p: u64,
    chi: DirichletCharacter,
    g: Vec<PadicNumber>,
    f_cap: PadicNumber,
    truncation: Truncation,
}

fn rat_padic(p: u64, x: &BigRational, prec: u32) -> Result<PadicNumber> {
    PadicNumber::from_rational(p, x.numer(), x.denom(), prec)
}

/// `C(t, j)` for `j < n`, each truncated below `t^n`.
fn binomial_polys(n: usize) -> Vec<Vec<BigRational>> {
    let mut out: Vec<Vec<BigRational>> = vec![vec![BigRational::one()]];
    for j in 1..n {
        let prev = &out[j - 1];
        let shift = BigRational::from_integer(BigInt::from(j - 1));
        let denom = BigRational::from_integer(BigInt::from(j));
        let mut next = vec![BigRational::zero(); (prev.len() + 1).min(n)];
        for (i, c) in prev.iter().enumerate() {
            if i + 1 < n {
                next[i + 1] += c;
            }
            next[i] -= c * &shift;
        }
        for c in next.iter_mut() {
            *c /= &denom;
        }
        out.push(next);
    }
    out
}

impl LSeries {
    /// Builds `g` for the primitive character `chi` to absolute precision `prec + L_GUARD` after
    /// division by `F`.
    pub fn new(chi: &DirichletCharacter, p: u64, prec: u32) -> Result<Self> {
        let chi = chi.primitive();
        // Reject characters whose values are not in Z_p before doing any work.
        chi.root(0, p, 1)?;
        let (vp_f, rest) = split_p(p, &BigInt::from(chi.modulus()));
        let rest: u64 = rest.try_into().map_err(|_| Error::Invalid("conductor too large".into()))?;
        let v_min = match p {
            2 => 3,
            3 => 2,
            _ => 1,
        };
        let vf = vp_f.max(v_min);
        let f_cap = rest * p.pow(vf);
        let v_lambda = if p == 2 { 2.0 } else { 1.0 };
        let rate = (vf as f64).min(v_lambda) - 1.0 / (p - 1) as f64;
        let target = prec + L_GUARD + vf;
        let n = ((target as f64 + 2.0) / rate).ceil() as usize + 1;
        let rel = target + n as u32 + 2;

        let bern = bernoulli_numbers(n);
        let polys = binomial_polys(n);
        // c[j][i] = B_j · [t^i] C(t, j)
        let mut c: Vec<Vec<Option<PadicNumber>>> = Vec::with_capacity(n);
        for (j, poly) in polys.iter().enumerate() {
            let mut row = Vec::with_capacity(poly.len());
            for coef in poly {
                let v = &bern[j] * coef;
                row.push(if v.is_zero() { None } else { Some(rat_padic(p, &v, rel)?) });
            }
            c.push(row);
        }

        let residues: Vec<u64> = (1..=f_cap).filter(|a| a % p != 0 && chi.index(*a as i64).is_some()).collect();
        let parts: Vec<Result<Vec<PadicNumber>>> = residues
            .par_iter()
            .map(|&a| {
                let x = PadicNumber::from_rational(p, &BigInt::from(f_cap), &BigInt::from(a), rel)?;
                let mut xp = Vec::with_capacity(n);
                xp.push(PadicNumber::one(p, rel));
                for j in 1..n {
                    xp.push(xp[j - 1].mul(&x));
                }
                let mut poly = vec![PadicNumber::exact_zero(p); n];
                for (j, row) in c.iter().enumerate() {
                    for (i, cij) in row.iter().enumerate() {
                        if let Some(cij) = cij {
                            poly[i] = poly[i].add(&cij.mul(&xp[j]));
                        }
                    }
                }
                let lambda = iwasawa_log(&PadicNumber::from_i64(p, a as i64, rel))?;
                let mut e = Vec::with_capacity(n);
                e.push(PadicNumber::one(p, rel));
                for k in 1..n {
                    let next = e[k - 1].mul(&lambda).div(&PadicNumber::from_i64(p, k as i64, rel))?;
                    e.push(next);
                }
                let w = chi.value_padic(a as i64, p, rel)?;
                let mut prod = vec![PadicNumber::exact_zero(p); n];
                for (i, ei) in e.iter().enumerate() {
                    for (k, pk) in poly.iter().enumerate().take(n - i) {
                        prod[i + k] = prod[i + k].add(&ei.mul(pk));
                    }
                }
                Ok(prod.into_iter().map(|v| v.mul(&w)).collect())
            })
            .collect();
        let mut g = vec![PadicNumber::exact_zero(p); n];
        for part in parts {
            for (acc, v) in g.iter_mut().zip(part?) {
                *acc = acc.add(&v);
            }
        }
        let g: Vec<PadicNumber> = g.into_iter().map(|v| v.truncate(target as i64)).collect();
        if let Some(short) = g.iter().find(|v| v.abs_precision() < target as i64) {
            return Err(Error::PrecisionExhausted(format!(
                "coefficient known to {} digits, wanted {target}",
                short.abs_precision()
            )));
        }
        Ok(LSeries {
            p,
            chi,
            g,
            f_cap: PadicNumber::from_i64(p, f_cap as i64, rel),
            truncation: Truncation { f_cap, terms: n, working_digits: target },
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// The primitive character.
    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn truncation(&self) -> &Truncation {
        &self.truncation
    }

    /// `g_k`, the coefficients of the double sum in `t = 1 - s`.
    pub fn coefficients(&self) -> &[PadicNumber] {
        &self.g
    }

    fn check_s(&self, s: &PadicNumber) -> Result<PadicNumber> {
        if s.prime() != self.p {
            return Err(Error::Invalid("s lives over a different prime".into()));
        }
        if !s.is_zero() && s.valuation().unwrap_or(0) < 0 {
            return Err(Error::Invalid("s must lie in Z_p".into()));
        }
        Ok(PadicNumber::one(self.p, self.truncation.working_digits + 8).sub(s))
    }

    /// `Σ_{k ≥ 1} g_k t^{k-1}`.
    fn tail(&self, t: &PadicNumber) -> PadicNumber {
        let mut acc = PadicNumber::exact_zero(self.p);
        for gk in self.g[1..].iter().rev() {
            acc = acc.mul(t).add(gk);
        }
        acc
    }

    /// `L_p(s, χ)` without further Euler factors.
    pub fn value(&self, s: &PadicNumber) -> Result<PadicNumber> {
        let t = self.check_s(s)?;
        let mut num = self.tail(&t);
        if self.chi.is_trivial() {
            if t.is_zero() {
                return Err(Error::PoleAtOne);
            }
            num = num.add(&self.g[0].div(&t)?);
        }
        num.div(&self.f_cap).map(|v| v.neg())
    }

    /// `(s - 1) L_p(s, χ)`, computed without dividing by `s - 1`.
    pub fn times_s_minus_one(&self, s: &PadicNumber) -> Result<PadicNumber> {
        let t = self.check_s(s)?;
        let mut num = self.tail(&t).mul(&t);
        if self.chi.is_trivial() {
            num = num.add(&self.g[0]);
        }
        num.div(&self.f_cap)
    }

    /// Residue at `s = 1` (zero unless the character is trivial).
    pub fn residue(&self) -> Result<PadicNumber> {
        if self.chi.is_trivial() {
            self.g[0].div(&self.f_cap)
        } else {
            Ok(PadicNumber::exact_zero(self.p))
        }
    }

    /// The constant term of `L_p(s) - residue/(s - 1)` at `s = 1`.
    pub fn regular_part_at_one(&self) -> Result<PadicNumber> {
        Ok(self.g[1].div(&self.f_cap)?.neg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_match_direct_products() {
        let polys = binomial_polys(5);
        // C(t, 3) = (t^3 - 3t^2 + 2t)/6
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(polys[3], vec![q(0, 1), q(1, 3), q(-1, 2), q(1, 6)]);
    }

    #[test]
    fn residue_of_zeta() {
        for p in [2u64, 3, 5, 7] {
            let l = LSeries::new(&DirichletCharacter::trivial(), p, 20).unwrap();
            let expected = PadicNumber::from_rational(p, &BigInt::from(p - 1), &BigInt::from(p), 30).unwrap();
            assert!(l.residue().unwrap().agreement(&expected) >= 20);
        }
    }
}
