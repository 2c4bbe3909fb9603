//! Kubota–Leopoldt `p`-adic L-functions of Dirichlet characters with `S`-truncation.

mod bernoulli;
mod dirichlet;
mod lfunction;

use std::collections::BTreeSet;

use num_bigint::BigInt;

pub use bernoulli::{bernoulli_numbers, bernoulli_polynomial, generalized_bernoulli, CyclotomicRational};
pub use dirichlet::{is_fundamental, kronecker, DirichletCharacter};
pub use lfunction::{LSeries, Truncation, L_GUARD};

use crate::error::{Error, Result};
use crate::padic::{is_prime, iwasawa_log, padic_exp, PadicNumber, PRECISION_FLOOR};

/// `s - 1 = p^k` for `k` in this range when estimating limits at `s = 1`.
pub const LIMIT_WINDOW: std::ops::RangeInclusive<u32> = 1..=9;

fn check_primes(p: u64, s_set: &BTreeSet<u64>) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    if let Some(l) = s_set.iter().find(|l| !is_prime(**l)) {
        return Err(Error::Invalid(format!("{l} in S is not prime")));
    }
    Ok(())
}

/// `L_S(n, ρω^{n-1}) = -(B_{m,χ}/m) Π_{ℓ∈S, ℓ∤f_χ} (1 - χ(ℓ) ℓ^{m-1})` with `χ = (ρω^{n-1})` primitive
/// and `m = 1 - n`, embedded in `Q_p`.
pub fn lp_interpolated(n: i64, rho: &DirichletCharacter, s_set: &[u64], p: u64, prec: u32) -> Result<PadicNumber> {
    if n > 0 {
        return Err(Error::Invalid(format!("interpolation points are n ≤ 0, got {n}")));
    }
    let s_set: BTreeSet<u64> = s_set.iter().copied().collect();
    check_primes(p, &s_set)?;
    let chi = rho.mul(&DirichletCharacter::omega_power(p, n - 1))?.primitive();
    let m = (1 - n) as usize;
    let w = prec + 2 * L_GUARD;
    let b = generalized_bernoulli(m, &chi).to_padic(&chi, p, w)?;
    let mut value = b.div(&PadicNumber::from_i64(p, m as i64, w))?.neg();
    let f = chi.modulus();
    for &l in &s_set {
        if f % l == 0 {
            continue;
        }
        let lp = PadicNumber::from_bigint(p, &BigInt::from(l).pow(m as u32 - 1), w);
        let factor = PadicNumber::one(p, w).sub(&chi.value_padic(l as i64, p, w)?.mul(&lp));
        value = value.mul(&factor);
    }
    Ok(value)
}

#[derive(Clone, Debug)]
pub struct LpValue {
    pub value: PadicNumber,
    /// Set for odd characters, whose `p`-adic L-function vanishes identically.
    pub zero: bool,
    /// Absolute `p`-adic precision of `value`.
    pub digits: i64,
    pub truncation: Option<Truncation>,
}

#[derive(Clone, Debug)]
pub struct LeadingTerm {
    /// `⟨ρ, 1⟩`.
    pub order: i64,
    /// The limit of `(s - 1)^order L_{p,S}(s, ρ)` extrapolated from `s = 1 + p^k`.
    pub value: PadicNumber,
    /// Digits on which the last two extrapolants agree.
    pub certified_digits: i64,
    /// The same limit read off the expansion at `s = 1`.
    pub analytic: PadicNumber,
    pub route_agreement: i64,
    /// `(k, (s - 1)^order L_{p,S}(s, ρ))` at `s = 1 + p^k`.
    pub samples: Vec<(u32, PadicNumber)>,
    pub extrapolants: Vec<PadicNumber>,
}

/// `L_{p,S}(s, ρ)` for an even Dirichlet character `ρ` and a finite set `S ∋ p`.
#[derive(Clone, Debug)]
pub struct PadicL {
    p: u64,
    prec: u32,
    rho: DirichletCharacter,
    s_set: BTreeSet<u64>,
    series: Option<LSeries>,
}

impl PadicL {
    pub fn new(rho: &DirichletCharacter, s_set: &[u64], p: u64, prec: u32) -> Result<Self> {
        let s_set: BTreeSet<u64> = s_set.iter().copied().collect();
        check_primes(p, &s_set)?;
        if !s_set.contains(&p) {
            return Err(Error::Invalid(format!("S must contain p = {p}")));
        }
        let rho = rho.primitive();
        let series = if rho.is_even() { Some(LSeries::new(&rho, p, prec)?) } else { None };
        Ok(PadicL { p, prec, rho, s_set, series })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.rho
    }

    pub fn primes(&self) -> &BTreeSet<u64> {
        &self.s_set
    }

    /// `⟨ρ, 1⟩`: 1 for the trivial character, 0 otherwise.
    pub fn trivial_multiplicity(&self) -> i64 {
        i64::from(self.rho.is_trivial())
    }

    pub fn series(&self) -> Option<&LSeries> {
        self.series.as_ref()
    }

    fn work(&self) -> u32 {
        self.prec + 2 * L_GUARD
    }

    /// `E_ℓ(s) = 1 - ρω^{-1}(ℓ) ⟨ℓ⟩^{-s}`, or 1 when `ℓ` divides the conductor.
    pub fn euler_factor(&self, l: u64, s: &PadicNumber) -> Result<PadicNumber> {
        let (p, w) = (self.p, self.work());
        if l == p {
            return Err(Error::Invalid("the factor at p is built into L_p".into()));
        }
        if self.rho.modulus() % l == 0 {
            return Ok(PadicNumber::one(p, w));
        }
        let lp = PadicNumber::from_i64(p, l as i64, w);
        let omega = DirichletCharacter::omega_power(p, 1).value_padic(l as i64, p, w)?;
        let bracket = iwasawa_log(&lp)?;
        let power = padic_exp(&s.mul(&bracket).neg())?;
        let coef = self.rho.value_padic(l as i64, p, w)?.div(&omega)?;
        Ok(PadicNumber::one(p, w).sub(&coef.mul(&power)))
    }

    /// `Π_{ℓ ∈ S, ℓ ≠ p} E_ℓ(s)`.
    pub fn euler_product(&self, s: &PadicNumber) -> Result<PadicNumber> {
        let mut acc = PadicNumber::one(self.p, self.work());
        for &l in self.s_set.iter().filter(|&&l| l != self.p) {
            acc = acc.mul(&self.euler_factor(l, s)?);
        }
        Ok(acc)
    }

    pub fn value(&self, s: &PadicNumber) -> Result<LpValue> {
        let Some(series) = &self.series else {
            return Ok(LpValue { value: PadicNumber::exact_zero(self.p), zero: true, digits: crate::padic::EXACT, truncation: None });
        };
        let v = series.value(s)?.mul(&self.euler_product(s)?);
        Ok(LpValue { digits: v.abs_precision(), value: v, zero: false, truncation: Some(series.truncation().clone()) })
    }

    /// `(s - 1)^{⟨ρ,1⟩} L_{p,S}(s, ρ)`, finite at `s = 1`.
    pub fn scaled_value(&self, s: &PadicNumber) -> Result<PadicNumber> {
        let series = self.even_series()?;
        let core = if self.rho.is_trivial() { series.times_s_minus_one(s)? } else { series.value(s)? };
        Ok(core.mul(&self.euler_product(s)?))
    }

    fn even_series(&self) -> Result<&LSeries> {
        self.series.as_ref().ok_or_else(|| Error::Invalid("ρ is odd; its p-adic L-function is identically zero".into()))
    }

    /// The limit at `s = 1` read off the expansion: the residue times `Π E_ℓ(1)` for trivial `ρ`,
    /// else `L_p(1, ρ) Π E_ℓ(1)`.
    pub fn analytic_leading_term(&self) -> Result<PadicNumber> {
        let series = self.even_series()?;
        let core = if self.rho.is_trivial() { series.residue()? } else { series.regular_part_at_one()? };
        let one = PadicNumber::one(self.p, self.work());
        Ok(core.mul(&self.euler_product(&one)?))
    }

    /// `lim_{s→1} (s - 1)^{⟨ρ,1⟩} L_{p,S}(s, ρ)`, extrapolated from `s = 1 + p^k`, `k ∈ LIMIT_WINDOW`.
    pub fn leading_term_at_1(&self) -> Result<LeadingTerm> {
        let p = self.p;
        let w = self.work();
        let mut nodes = Vec::new();
        let mut samples = Vec::new();
        for k in LIMIT_WINDOW {
            let x = PadicNumber::one(p, w).shift(k as i64);
            let s = PadicNumber::one(p, w).add(&x);
            samples.push((k, self.scaled_value(&s)?));
            nodes.push(x);
        }
        let values: Vec<PadicNumber> = samples.iter().map(|(_, v)| v.clone()).collect();
        let extrapolants = extrapolate_to_zero(&nodes, &values)?;
        let n = extrapolants.len();
        let value = extrapolants[n - 1].clone();
        let certified_digits = value.relative_agreement(&extrapolants[n - 2]);
        let analytic = self.analytic_leading_term()?;
        if certified_digits < PRECISION_FLOOR as i64 {
            return Err(Error::NonConvergence(format!(
                "extrapolants at s = 1 agree to {certified_digits} digits: {} vs {}",
                extrapolants[n - 2], value
            )));
        }
        let route_agreement = value.relative_agreement(&analytic);
        Ok(LeadingTerm {
            order: self.trivial_multiplicity(),
            value,
            certified_digits,
            analytic,
            route_agreement,
            samples,
            extrapolants,
        })
    }
}

/// Neville's scheme at `x = 0`: entry `j` is the value at 0 of the polynomial through the
/// first `j + 1` points.
pub fn extrapolate_to_zero(xs: &[PadicNumber], ys: &[PadicNumber]) -> Result<Vec<PadicNumber>> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::PoleWindowTooSmall(format!("{} nodes", xs.len())));
    }
    let mut col: Vec<PadicNumber> = ys.to_vec();
    let mut out = vec![col[0].clone()];
    for level in 1..xs.len() {
        let mut next = Vec::with_capacity(col.len() - 1);
        for i in 0..col.len() - 1 {
            let (xi, xj) = (&xs[i], &xs[i + level]);
            let num = xj.mul(&col[i]).sub(&xi.mul(&col[i + 1]));
            next.push(num.div(&xj.sub(xi))?);
        }
        out.push(next[0].clone());
        col = next;
    }
    Ok(out)
}

/// `lp_value` for a single evaluation; build a [`PadicL`] to evaluate repeatedly.
pub fn lp_value(s: &PadicNumber, rho: &DirichletCharacter, s_set: &[u64], prec: u32) -> Result<LpValue> {
    PadicL::new(rho, s_set, s.prime(), prec)?.value(s)
}

pub fn leading_term_at_1(rho: &DirichletCharacter, s_set: &[u64], p: u64, prec: u32) -> Result<LeadingTerm> {
    PadicL::new(rho, s_set, p, prec)?.leading_term_at_1()
}

/// A direct sum of Dirichlet characters; its L-function is the product.
#[derive(Clone, Debug)]
pub struct CharacterSum {
    parts: Vec<PadicL>,
}

impl CharacterSum {
    pub fn new(chars: &[DirichletCharacter], s_set: &[u64], p: u64, prec: u32) -> Result<Self> {
        let parts = chars.iter().map(|c| PadicL::new(c, s_set, p, prec)).collect::<Result<_>>()?;
        Ok(CharacterSum { parts })
    }

    pub fn trivial_multiplicity(&self) -> i64 {
        self.parts.iter().map(PadicL::trivial_multiplicity).sum()
    }

    pub fn value(&self, s: &PadicNumber) -> Result<PadicNumber> {
        let mut acc = PadicNumber::one(s.prime(), s.rel_precision().max(1) + 64);
        for part in &self.parts {
            acc = acc.mul(&part.value(s)?.value);
        }
        Ok(acc)
    }

    pub fn leading_term_at_1(&self) -> Result<(i64, PadicNumber)> {
        let mut acc: Option<PadicNumber> = None;
        for part in &self.parts {
            let v = part.leading_term_at_1()?.value;
            acc = Some(match acc {
                None => v,
                Some(a) => a.mul(&v),
            });
        }
        let acc = acc.ok_or_else(|| Error::Invalid("empty character sum".into()))?;
        Ok((self.trivial_multiplicity(), acc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64, a: i64, b: i64, prec: u32) -> PadicNumber {
        PadicNumber::from_rational(p, &BigInt::from(a), &BigInt::from(b), prec).unwrap()
    }

    #[test]
    fn zeta_at_minus_one() {
        let t = DirichletCharacter::trivial();
        let v = lp_interpolated(-1, &t, &[3], 3, 20).unwrap();
        assert!(v.agreement(&q(3, 1, 6, 40)) >= 20);
        let w = lp_interpolated(-1, &t, &[2, 3], 3, 20).unwrap();
        assert!(w.agreement(&v.neg()) >= 20);
    }

    #[test]
    fn values_interpolate() {
        let p = 5;
        let chars = [DirichletCharacter::trivial(), DirichletCharacter::quadratic(8).unwrap()];
        for rho in &chars {
            let l = PadicL::new(rho, &[p, 2], p, 20).unwrap();
            for n in -4..=-1 {
                let s = PadicNumber::from_i64(p, n, 40);
                let a = l.value(&s).unwrap().value;
                let b = lp_interpolated(n, rho, &[p, 2], p, 20).unwrap();
                assert!(a.agreement(&b) >= 20, "n = {n}, {rho}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn residue_and_limit() {
        let l = PadicL::new(&DirichletCharacter::trivial(), &[5], 5, 20).unwrap();
        let lt = l.leading_term_at_1().unwrap();
        assert_eq!(lt.order, 1);
        assert!(lt.certified_digits >= 15);
        assert!(lt.value.agreement(&q(5, 4, 5, 40)) >= 15);
        assert!(lt.route_agreement >= 15);
    }

    #[test]
    fn euler_factor_at_one() {
        let rho = DirichletCharacter::quadratic(5).unwrap();
        let l = PadicL::new(&rho, &[7, 2, 3], 7, 20).unwrap();
        let one = PadicNumber::one(7, 40);
        for ell in [2u64, 3] {
            let want = q(7, ell as i64 - rho.value_int(ell as i64).unwrap(), ell as i64, 40);
            assert!(l.euler_factor(ell, &one).unwrap().agreement(&want) >= 20);
        }
    }

    #[test]
    fn odd_characters_vanish() {
        let rho = DirichletCharacter::quadratic(-4).unwrap();
        let v = lp_value(&PadicNumber::from_i64(5, 3, 20), &rho, &[5], 20).unwrap();
        assert!(v.zero && v.value.is_zero());
    }
}
