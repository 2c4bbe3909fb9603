//! Splitting a complex over `R = Λ_(T)` into elementary pieces `[R --1--> R]`
//! and `[R --T--> R]`.

use rand::RngCore;

use super::BasedComplex;
use crate::error::{Error, Result};
use crate::linalg::{det_field, smith, Matrix};
use crate::laurent::LaurentSeries;
use crate::series::LambdaFraction;

type Mat = Matrix<LaurentSeries>;

/// A bounded complex of free `R`-modules, with entries expanded in `Q_p((T))`.
#[derive(Clone, Debug)]
pub struct DvrComplex {
    pub p: u64,
    pub lo: i64,
    pub ranks: Vec<usize>,
    pub diffs: Vec<Mat>,
    pub t_prec: usize,
}

impl DvrComplex {
    pub fn new(p: u64, t_prec: usize, lo: i64, ranks: Vec<usize>, diffs: Vec<Mat>) -> Result<Self> {
        if diffs.len() + 1 != ranks.len().max(1) {
            return Err(Error::InconsistentDims("one differential per pair of adjacent degrees".into()));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.rows() != ranks[k + 1] || d.cols() != ranks[k] {
                return Err(Error::InconsistentDims(format!("differential out of degree {}", lo + k as i64)));
            }
            for i in 0..d.rows() {
                for j in 0..d.cols() {
                    let x = d.get(i, j);
                    if !x.is_zero() && x.t_order() < 0 {
                        return Err(Error::Invalid(format!("entry {} has a pole at T = 0", x)));
                    }
                }
            }
        }
        for k in 0..diffs.len().saturating_sub(1) {
            if !diffs[k + 1].mul(&diffs[k]).is_zero() {
                return Err(Error::NotAComplex(lo + k as i64));
            }
        }
        Ok(DvrComplex { p, lo, ranks, diffs, t_prec })
    }

    /// Entries given as fractions `T^r · num/den`.
    pub fn from_fractions(p: u64, t_prec: usize, lo: i64, ranks: Vec<usize>, diffs: &[Matrix<LambdaFraction>]) -> Result<Self> {
        let z = LaurentSeries::zero(p, t_prec);
        let diffs = diffs.iter().map(|d| d.try_map(&z, LaurentSeries::from_fraction)).collect::<Result<Vec<_>>>()?;
        Self::new(p, t_prec, lo, ranks, diffs)
    }

    pub fn from_based(c: &BasedComplex) -> Self {
        let z = LaurentSeries::zero(c.prime(), c.t_prec());
        let diffs = c.degrees().take(c.ranks().len().saturating_sub(1)).map(|i| c.diff(i).map(&z, LaurentSeries::from_series)).collect();
        DvrComplex { p: c.prime(), lo: c.lo(), ranks: c.ranks().to_vec(), diffs, t_prec: c.t_prec() }
    }

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

    fn proto(&self) -> LaurentSeries {
        LaurentSeries::zero(self.p, self.t_prec)
    }

    pub fn diff(&self, i: i64) -> Mat {
        if i >= self.lo && i < self.hi() {
            self.diffs[(i - self.lo) as usize].clone()
        } else {
            Matrix::zeros(self.rank(i + 1), self.rank(i), &self.proto())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ElementaryKind {
    One,
    T,
}

/// `[R --h--> R]` with source in `degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Summand {
    pub degree: i64,
    pub kind: ElementaryKind,
}

/// In degree `i` the columns of `bases[i - lo]` are, in order, the sources of the
/// summands starting in degree `i` and the targets of those starting in `i - 1`.
#[derive(Clone, Debug)]
pub struct DvrDecomposition {
    pub lo: i64,
    pub summands: Vec<Summand>,
    pub bases: Vec<Mat>,
}

impl DvrDecomposition {
    fn sources(&self, i: i64) -> Vec<&Summand> {
        self.summands.iter().filter(|s| s.degree == i).collect()
    }

    /// Differential of the direct sum of summands in the new bases.
    pub fn model_diff(&self, i: i64, proto: &LaurentSeries) -> Mat {
        let src = self.sources(i);
        let next_src = self.sources(i + 1).len();
        let cols = src.len() + self.sources(i - 1).len();
        let rows = next_src + src.len();
        let t = LaurentSeries::t(proto.prime(), crate::linalg::ONE_PREC, proto.t_prec());
        let one = LaurentSeries::one(proto.prime(), crate::linalg::ONE_PREC, proto.t_prec());
        let mut m = Matrix::zeros(rows, cols, proto);
        for (q, s) in src.iter().enumerate() {
            m.set(next_src + q, q, if s.kind == ElementaryKind::T { t.clone() } else { one.clone() });
        }
        m
    }

    /// Counts of `[R --1--> R]` and `[R --T--> R]` summands.
    pub fn multiset(&self) -> (usize, usize) {
        let t = self.summands.iter().filter(|s| s.kind == ElementaryKind::T).count();
        (self.summands.len() - t, t)
    }

    /// Checks `d^i P_i = P_{i+1} E^i` and that every `P_i` is invertible over `R`.
    pub fn reassembles(&self, c: &DvrComplex) -> Result<bool> {
        let proto = c.proto();
        for (k, b) in self.bases.iter().enumerate() {
            let i = self.lo + k as i64;
            let det = det_field(b)?;
            if det.is_zero() || det.t_order() != 0 {
                return Ok(false);
            }
            if k + 1 < self.bases.len() {
                let lhs = c.diff(i).mul(b);
                let rhs = self.bases[k + 1].mul(&self.model_diff(i, &proto));
                let same = (0..lhs.rows()).all(|r| (0..lhs.cols()).all(|s| lhs.get(r, s).eq_at_precision(rhs.get(r, s))));
                if !same {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub fn decompose_dvr(c: &DvrComplex) -> Result<DvrDecomposition> {
    decompose_dvr_with(c, None)
}

/// As `decompose_dvr`, breaking ties between pivots with `rng`.
pub fn decompose_dvr_with(c: &DvrComplex, mut rng: Option<&mut dyn RngCore>) -> Result<DvrDecomposition> {
    let proto = c.proto();
    let lo = c.lo;
    let hi = c.hi();
    if c.ranks.is_empty() {
        return Ok(DvrDecomposition { lo, summands: vec![], bases: vec![] });
    }
    let len = c.ranks.len();
    let mut sources: Vec<Option<Mat>> = vec![None; len];
    let mut targets: Vec<Option<Mat>> = vec![None; len];
    let mut summands = Vec::new();
    // columns spanning the part of C^m not yet split off, with a left inverse
    let mut k_mat = Matrix::identity(c.rank(hi), &proto);
    let mut l_mat = Matrix::identity(c.rank(hi), &proto);
    let mut m = hi;
    while m > lo {
        let d = k_mat.cols();
        let n_prev = c.rank(m - 1);
        let y = l_mat.mul(&c.diff(m - 1));
        let s = match rng {
            Some(ref mut g) => smith(&y, Some(&mut **g))?,
            None => smith(&y, None)?,
        };
        if s.rank() < d {
            return Err(Error::NotSemisimpleOverR(format!("cohomology in degree {} has positive rank", m)));
        }
        if let Some(e) = s.exponents.iter().find(|&&e| e > 1) {
            return Err(Error::NotSemisimpleOverR(format!(
                "elementary divisor T^{} in degree {}: T kills no power below it",
                e, m
            )));
        }
        for &e in &s.exponents {
            summands.push(Summand { degree: m - 1, kind: if e == 0 { ElementaryKind::One } else { ElementaryKind::T } });
        }
        targets[(m - lo) as usize] = Some(k_mat.mul(&s.u_inv));
        let all_prev: Vec<usize> = (0..n_prev).collect();
        sources[(m - 1 - lo) as usize] = Some(s.v.select(&all_prev, &(0..d).collect::<Vec<_>>()));
        k_mat = s.v.select(&all_prev, &(d..n_prev).collect::<Vec<_>>());
        l_mat = s.v_inv.select(&(d..n_prev).collect::<Vec<_>>(), &all_prev);
        m -= 1;
    }
    if k_mat.cols() > 0 {
        return Err(Error::NotSemisimpleOverR(format!("cohomology in degree {} has positive rank", lo)));
    }
    summands.sort_by_key(|s| s.degree);
    let mut bases = Vec::new();
    for k in 0..len {
        let n = c.ranks[k];
        let empty = Matrix::zeros(n, 0, &proto);
        let src = sources[k].clone().unwrap_or_else(|| empty.clone());
        let tgt = targets[k].clone().unwrap_or(empty);
        bases.push(src.hcat(&tgt));
    }
    Ok(DvrDecomposition { lo, summands, bases })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::IwasawaSeries;

    fn lf(c: &[i64]) -> LaurentSeries {
        LaurentSeries::from_series(&IwasawaSeries::from_i64s(5, c, 40, 20))
    }

    fn two_term(rows: Vec<Vec<LaurentSeries>>) -> DvrComplex {
        let z = lf(&[0]);
        let m = Matrix::from_rows(rows, &z);
        let (r, c) = (m.rows(), m.cols());
        DvrComplex::new(5, 20, 0, vec![c, r], vec![m]).unwrap()
    }

    #[test]
    fn already_split() {
        let c = two_term(vec![vec![lf(&[0, 1]), lf(&[0])], vec![lf(&[0]), lf(&[1])]]);
        let d = decompose_dvr(&c).unwrap();
        assert_eq!(d.multiset(), (1, 1));
        assert!(d.reassembles(&c).unwrap());
    }

    #[test]
    fn jordan_block_is_not_semisimple() {
        let c = two_term(vec![vec![lf(&[0, 1]), lf(&[1])], vec![lf(&[0]), lf(&[0, 1])]]);
        assert!(matches!(decompose_dvr(&c), Err(Error::NotSemisimpleOverR(_))));
    }
}
