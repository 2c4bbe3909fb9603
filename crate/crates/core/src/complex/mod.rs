//! Bounded complexes of based free Λ-modules and their invariants.
//!
//! Degrees are cohomological and basis vectors are ordered by degree, then index.
//! The torsion of a based acyclic complex is
//! `τ = Π_i [d(b_{i-1}), h_i, b_i / c_i]^{(-1)^{i+1}}`, where `b_i` runs over the
//! standard vectors indexed by the lexicographically first pivot columns of `d^i`.
//! A pair `(C, u)` with `u ∈ Λ^×` has characteristic element `u · τ(C)`.

mod bockstein;
mod dvr;
mod json;
pub mod random;
mod torsion;

pub use bockstein::{
    euler_characteristic, hypertor, is_semisimple, presentation_scalar, r_gamma, BocksteinComplex,
    DegreeData, EulerCharacteristic, HypertorGroup, SemisimplicityCertificate,
};
pub use json::{ComplexDocument, ParsedComplex};
pub use dvr::{decompose_dvr, decompose_dvr_with, DvrComplex, DvrDecomposition, ElementaryKind, Summand};
pub use torsion::{
    char_element, leading_term_bockstein, leading_term_with, verify_gecp, verify_prop38, GecpReport,
    Prop38Report, RouteA, SignConvention,
};
pub(crate) use torsion::verify_with;

use crate::error::{Error, Result};
use crate::linalg::{pivot_columns, Matrix};
use crate::padic::PadicNumber;
use crate::series::IwasawaSeries;

/// Extra p-adic digits carried beyond the certified precision.
pub const GUARD_DIGITS: u32 = 10;

#[derive(Clone, Debug)]
pub struct BasedComplex {
    p: u64,
    p_prec: u32,
    t_prec: usize,
    lo: i64,
    ranks: Vec<usize>,
    diffs: Vec<Matrix<IwasawaSeries>>,
}

impl BasedComplex {
    /// `diffs[k]` is the differential out of degree `lo + k`.
    pub fn new(
        p: u64,
        p_prec: u32,
        t_prec: usize,
        lo: i64,
        ranks: Vec<usize>,
        diffs: Vec<Matrix<IwasawaSeries>>,
    ) -> Result<Self> {
        if ranks.is_empty() {
            if !diffs.is_empty() {
                return Err(Error::InconsistentDims("differentials on an empty complex".into()));
            }
        } else if diffs.len() != ranks.len() - 1 {
            return Err(Error::InconsistentDims(format!(
                "{} terms need {} differentials, got {}",
                ranks.len(),
                ranks.len() - 1,
                diffs.len()
            )));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.rows() != ranks[k + 1] || d.cols() != ranks[k] {
                return Err(Error::InconsistentDims(format!(
                    "differential in degree {} is {}x{}, expected {}x{}",
                    lo + k as i64,
                    d.rows(),
                    d.cols(),
                    ranks[k + 1],
                    ranks[k]
                )));
            }
        }
        let c = BasedComplex { p, p_prec, t_prec, lo, ranks, diffs };
        c.validate()?;
        Ok(c)
    }

    /// The zero complex.
    pub fn empty(p: u64, p_prec: u32, t_prec: usize) -> Self {
        BasedComplex { p, p_prec, t_prec, lo: 0, ranks: vec![], diffs: vec![] }
    }

    fn validate(&self) -> Result<()> {
        for k in 0..self.diffs.len().saturating_sub(1) {
            let dd = self.diffs[k + 1].mul(&self.diffs[k]);
            let bad = (0..dd.rows())
                .any(|i| (0..dd.cols()).any(|j| !dd.get(i, j).truncate_abs(self.p_prec as i64).is_zero()));
            if bad {
                return Err(Error::NotAComplex(self.lo + k as i64));
            }
        }
        Ok(())
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn p_prec(&self) -> u32 {
        self.p_prec
    }

    pub fn work_prec(&self) -> u32 {
        self.p_prec + GUARD_DIGITS
    }

    pub fn t_prec(&self) -> usize {
        self.t_prec
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Top degree; `lo - 1` for the zero complex.
    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, i: i64) -> usize {
        if i < self.lo || i > self.hi() {
            0
        } else {
            self.ranks[(i - self.lo) as usize]
        }
    }

    pub(crate) fn series_zero(&self) -> IwasawaSeries {
        IwasawaSeries::exact_zero(self.p, self.t_prec)
    }

    /// `d^i : C^i → C^{i+1}`; a zero matrix outside the stored range.
    pub fn diff(&self, i: i64) -> Matrix<IwasawaSeries> {
        if i >= self.lo && i < self.hi() {
            self.diffs[(i - self.lo) as usize].clone()
        } else {
            Matrix::zeros(self.rank(i + 1), self.rank(i), &self.series_zero())
        }
    }

    pub fn is_rank_balanced(&self) -> bool {
        let mut even = 0usize;
        let mut odd = 0usize;
        for i in self.degrees() {
            if i.rem_euclid(2) == 0 {
                even += self.rank(i);
            } else {
                odd += self.rank(i);
            }
        }
        even == odd
    }

    /// `C[r]`, with `d^i_{C[r]} = (-1)^r d^{i+r}_C`.
    pub fn shift(&self, r: i64) -> BasedComplex {
        let diffs = if r.rem_euclid(2) == 1 { self.diffs.iter().map(|d| d.neg()).collect() } else { self.diffs.clone() };
        BasedComplex { lo: self.lo - r, diffs, ranks: self.ranks.clone(), ..*self }
    }

    /// The cone of multiplication by `T`: degree `i` is `C^i ⊕ C^{i+1}` with
    /// differential `[[d^i, T], [0, -d^{i+1}]]`.
    pub fn cone(&self) -> BasedComplex {
        if self.ranks.is_empty() {
            return self.clone();
        }
        let z = self.series_zero();
        let t = IwasawaSeries::t(self.p, self.work_prec(), self.t_prec);
        let lo = self.lo - 1;
        let hi = self.hi();
        let ranks: Vec<usize> = (lo..=hi).map(|i| self.rank(i) + self.rank(i + 1)).collect();
        let mut diffs = Vec::new();
        for i in lo..hi {
            let (a, b, c) = (self.rank(i), self.rank(i + 1), self.rank(i + 2));
            let d_i = self.diff(i);
            let d_next = self.diff(i + 1);
            let m = Matrix::from_fn(b + c, a + b, &z, |r, col| {
                if r < b && col < a {
                    d_i.get(r, col).clone()
                } else if r < b {
                    if r == col - a {
                        t.clone()
                    } else {
                        z.clone()
                    }
                } else if col < a {
                    z.clone()
                } else {
                    d_next.get(r - b, col - a).neg()
                }
            });
            diffs.push(m);
        }
        BasedComplex { lo, ranks, diffs, ..*self }
    }

    /// Degreewise direct sum with the basis of `self` first.
    pub fn direct_sum(&self, o: &BasedComplex) -> Result<BasedComplex> {
        if self.p != o.p {
            return Err(Error::Invalid("direct sum of complexes over different primes".into()));
        }
        if self.ranks.is_empty() {
            return Ok(BasedComplex { p_prec: self.p_prec.min(o.p_prec), t_prec: self.t_prec.min(o.t_prec), ..o.clone() });
        }
        if o.ranks.is_empty() {
            return Ok(BasedComplex { p_prec: self.p_prec.min(o.p_prec), t_prec: self.t_prec.min(o.t_prec), ..self.clone() });
        }
        let lo = self.lo.min(o.lo);
        let hi = self.hi().max(o.hi());
        let ranks = (lo..=hi).map(|i| self.rank(i) + o.rank(i)).collect();
        let diffs = (lo..hi).map(|i| self.diff(i).block_diag(&o.diff(i))).collect();
        BasedComplex::new(self.p, self.p_prec.min(o.p_prec), self.t_prec.min(o.t_prec), lo, ranks, diffs)
    }

    /// Replaces `d^i` by `P_{i+1} d^i Q_i` where `Q_i` is a right inverse of `P_i`.
    pub fn conjugate(&self, p_mats: &[Matrix<IwasawaSeries>], p_invs: &[Matrix<IwasawaSeries>]) -> Result<BasedComplex> {
        let diffs = (0..self.diffs.len()).map(|k| p_mats[k + 1].mul(&self.diffs[k]).mul(&p_invs[k])).collect();
        BasedComplex::new(self.p, self.p_prec, self.t_prec, self.lo, self.ranks.clone(), diffs)
    }

    /// Reduction modulo `T`.
    pub fn at_zero(&self) -> ZpComplex {
        self.t_coefficient(0)
    }

    /// Matrices of the `T^k` coefficients of the differentials.
    pub fn t_coefficient(&self, k: usize) -> ZpComplex {
        let z = PadicNumber::exact_zero(self.p);
        ZpComplex {
            p: self.p,
            p_prec: self.p_prec,
            lo: self.lo,
            ranks: self.ranks.clone(),
            diffs: self.diffs.iter().map(|d| d.map(&z, |s| s.coeff(k))).collect(),
        }
    }

    /// Ranks over the fraction field of Λ and pivot columns realising them,
    /// found by specialising `T` at points of valuation one.
    pub fn generic_pivots(&self) -> Result<Vec<Vec<usize>>> {
        let w = self.work_prec();
        let points: Vec<PadicNumber> = [1i64, 2, 1 + self.p as i64, 3]
            .iter()
            .map(|&k| PadicNumber::from_i64(self.p, k * self.p as i64, w))
            .collect();
        let z = PadicNumber::exact_zero(self.p);
        let mut out = Vec::new();
        for d in &self.diffs {
            let mut best: Vec<usize> = Vec::new();
            for x in &points {
                let e = d.try_map(&z, |s| s.eval(x))?;
                let piv = pivot_columns(&e)?;
                if piv.len() > best.len() {
                    best = piv;
                }
                if best.len() == d.rows().min(d.cols()) {
                    break;
                }
            }
            out.push(best);
        }
        Ok(out)
    }

    /// Checks that the complex becomes acyclic over the fraction field of Λ.
    pub fn generic_acyclicity(&self) -> Result<Vec<Vec<usize>>> {
        let piv = self.generic_pivots()?;
        for i in self.degrees() {
            let k = (i - self.lo) as usize;
            let r_out = if k < piv.len() { piv[k].len() } else { 0 };
            let r_in = if k > 0 { piv[k - 1].len() } else { 0 };
            if self.ranks[k] != r_out + r_in {
                return Err(Error::NotTorsion(format!(
                    "degree {}: rank {} but generic ranks {} + {}",
                    i, self.ranks[k], r_in, r_out
                )));
            }
        }
        Ok(piv)
    }
}

/// Sign relating `τ(C[1])` to `τ(C)^{-1}` under the fixed convention.
pub fn shift_sign(c: &BasedComplex) -> i64 {
    let mut total = 0usize;
    let mut partial = 0usize;
    for i in c.lo()..c.hi() {
        partial += c.rank(i);
        total += partial;
    }
    if total % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign relating `τ(C ⊕ C')` to `τ(C)·τ(C')` for acyclic `C`, `C'`.
pub fn direct_sum_sign(c: &BasedComplex, o: &BasedComplex) -> Result<i64> {
    let rc = generic_ranks(c)?;
    let ro = generic_ranks(o)?;
    let lo = c.lo().min(o.lo());
    let hi = c.hi().max(o.hi());
    let mut s = 0usize;
    for i in lo..=hi {
        s += rc(i) * ro(i - 1);
    }
    Ok(if s % 2 == 0 { 1 } else { -1 })
}

fn generic_ranks(c: &BasedComplex) -> Result<impl Fn(i64) -> usize> {
    let piv = c.generic_pivots()?;
    let lo = c.lo();
    Ok(move |i: i64| {
        if i < lo || i - lo >= piv.len() as i64 {
            0
        } else {
            piv[(i - lo) as usize].len()
        }
    })
}

/// Element of `Λ^×` attached to a complex.
#[derive(Clone, Debug)]
pub struct Trivialization {
    unit: IwasawaSeries,
}

impl Trivialization {
    pub fn new(unit: IwasawaSeries) -> Result<Self> {
        if !unit.is_unit() {
            return Err(Error::NotAUnit(format!("trivialization {}", unit)));
        }
        Ok(Trivialization { unit })
    }

    pub fn identity(c: &BasedComplex) -> Self {
        Trivialization { unit: IwasawaSeries::one(c.prime(), c.work_prec(), c.t_prec()) }
    }

    pub fn unit(&self) -> &IwasawaSeries {
        &self.unit
    }

    /// The trivialization of `C[1]` representing the inverse class.
    pub fn shifted(&self, c: &BasedComplex) -> Result<Self> {
        let inv = self.unit.inverse()?;
        let s = PadicNumber::from_i64(c.prime(), shift_sign(c), crate::linalg::ONE_PREC);
        Ok(Trivialization { unit: inv.scale(&s) })
    }

    /// The trivialization of `C ⊕ C'` representing the product class.
    pub fn direct_sum(&self, c: &BasedComplex, o: &Trivialization, oc: &BasedComplex) -> Result<Self> {
        let s = PadicNumber::from_i64(c.prime(), direct_sum_sign(c, oc)?, crate::linalg::ONE_PREC);
        Ok(Trivialization { unit: self.unit.mul(&o.unit).scale(&s) })
    }
}

/// A complex of free `Z_p`-modules.
#[derive(Clone, Debug)]
pub struct ZpComplex {
    pub p: u64,
    pub p_prec: u32,
    pub lo: i64,
    pub ranks: Vec<usize>,
    pub diffs: Vec<Matrix<PadicNumber>>,
}

impl ZpComplex {
    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn rank(&self, i: i64) -> usize {
        if i < self.lo || i > self.hi() {
            0
        } else {
            self.ranks[(i - self.lo) as usize]
        }
    }

    pub fn diff(&self, i: i64) -> Matrix<PadicNumber> {
        if i >= self.lo && i < self.hi() {
            self.diffs[(i - self.lo) as usize].clone()
        } else {
            Matrix::zeros(self.rank(i + 1), self.rank(i), &PadicNumber::exact_zero(self.p))
        }
    }
}

/// Builds a series matrix from rows of integer polynomials in `T`.
pub fn series_matrix(p: u64, prec: u32, t_prec: usize, rows: &[Vec<Vec<i64>>]) -> Matrix<IwasawaSeries> {
    let z = IwasawaSeries::exact_zero(p, t_prec);
    let cols = rows.first().map_or(0, |r| r.len());
    Matrix::from_fn(rows.len(), cols, &z, |i, j| IwasawaSeries::from_i64s(p, &rows[i][j], prec, t_prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elementary(d: &[i64]) -> BasedComplex {
        let m = series_matrix(5, 40, 20, &[vec![d.to_vec()]]);
        BasedComplex::new(5, 30, 20, -1, vec![1, 1], vec![m]).unwrap()
    }

    #[test]
    fn cone_of_zero_complex_is_zero() {
        let c = BasedComplex::empty(5, 30, 20);
        assert!(c.cone().ranks().is_empty());
    }

    #[test]
    fn cone_of_isomorphism_is_acyclic_mod_t() {
        let c = elementary(&[1]).shift(1);
        let cone = c.cone();
        assert_eq!(cone.ranks(), &[1, 2, 1]);
        let h = hypertor(&cone).unwrap();
        assert!(h.groups.iter().all(|g| g.free_rank == 0 && g.torsion.is_empty()));
    }

    #[test]
    fn double_shift_restores_signs() {
        let c = elementary(&[0, 1, 3]);
        let a = c.shift(1).shift(1);
        let b = c.shift(2);
        assert_eq!(a.lo(), b.lo());
        assert!(a.diff(a.lo()).sub(&b.diff(b.lo())).is_zero());
        assert!(b.diff(b.lo()).sub(&c.diff(c.lo())).is_zero());
    }

    #[test]
    fn non_complex_rejected() {
        let d = series_matrix(5, 40, 20, &[vec![vec![1]]]);
        let e = series_matrix(5, 40, 20, &[vec![vec![0, 1]]]);
        let r = BasedComplex::new(5, 30, 20, 0, vec![1, 1, 1], vec![d, e]);
        assert_eq!(r.unwrap_err(), Error::NotAComplex(0));
    }
}
