//! Hypertor groups `H_i(Γ, C) = H^{-i}(Z_p ⊗_Λ C)`, the Bockstein maps between
//! them, semisimplicity and the invariants read off from them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{BasedComplex, Trivialization};
use crate::error::{Error, Result};
use crate::linalg::{det_field, smith, Matrix, Smith};
use crate::padic::PadicNumber;

type Mat = Matrix<PadicNumber>;

/// `H^j(Z_p ⊗ C) ≅ Z_p^{free_rank} ⊕ ⊕ Z/p^e`.
#[derive(Clone, Debug)]
pub struct HypertorGroup {
    /// Cohomological degree `j`; the homological index is `-j`.
    pub degree: i64,
    pub free_rank: usize,
    pub torsion: Vec<i64>,
    /// Cycles in `C^j` lifting a basis of the free quotient, as columns.
    pub basis: Mat,
}

impl HypertorGroup {
    pub fn homological_index(&self) -> i64 {
        -self.degree
    }

    pub fn torsion_length(&self) -> i64 {
        self.torsion.iter().sum()
    }
}

/// Integral data behind one degree of the hypertor computation.
#[derive(Clone, Debug)]
pub struct DegreeData {
    /// Basis of `ker d_0^j` as columns.
    pub cycles: Mat,
    /// Coordinates of a cycle in the basis `cycles`.
    pub coords: Mat,
    /// Image of `d_0^{j-1}` in cycle coordinates.
    pub relations: Mat,
    /// Rank of `d_0^j`.
    pub d_rank: usize,
    rel: Smith<PadicNumber>,
}

impl DegreeData {
    fn free_projection(&self) -> Mat {
        let rho = self.rel.rank();
        let m = self.relations.rows();
        self.rel.u.select(&(rho..m).collect::<Vec<_>>(), &(0..m).collect::<Vec<_>>())
    }

    fn free_lift(&self) -> Mat {
        let rho = self.rel.rank();
        let m = self.relations.rows();
        self.rel.u_inv.select(&(0..m).collect::<Vec<_>>(), &(rho..m).collect::<Vec<_>>())
    }
}

#[derive(Clone, Debug)]
pub struct BocksteinComplex {
    pub p: u64,
    pub p_prec: u32,
    pub lo: i64,
    pub groups: Vec<HypertorGroup>,
    /// `maps[k]` is the Bockstein `H^{lo+k} → H^{lo+k+1}` on free parts, i.e. `B_{-(lo+k)}`.
    pub maps: Vec<Mat>,
    pub data: Vec<DegreeData>,
    /// Bockstein on cycle coordinates, including torsion classes.
    pub integral_maps: Vec<Mat>,
}

impl BocksteinComplex {
    pub fn hi(&self) -> i64 {
        self.lo + self.groups.len() as i64 - 1
    }

    /// `H_i(Γ, C)`.
    pub fn homological(&self, i: i64) -> Option<&HypertorGroup> {
        let j = -i;
        if j < self.lo || j > self.hi() {
            None
        } else {
            Some(&self.groups[(j - self.lo) as usize])
        }
    }

    fn free_rank(&self, j: i64) -> usize {
        if j < self.lo || j > self.hi() {
            0
        } else {
            self.groups[(j - self.lo) as usize].free_rank
        }
    }

    /// Bockstein out of cohomological degree `j` on free parts.
    pub fn map(&self, j: i64) -> Mat {
        let z = PadicNumber::exact_zero(self.p);
        if j >= self.lo && j < self.hi() {
            self.maps[(j - self.lo) as usize].clone()
        } else {
            Matrix::zeros(self.free_rank(j + 1), self.free_rank(j), &z)
        }
    }
}

pub(crate) fn certified_smith(m: &Mat, n: u32) -> Result<Smith<PadicNumber>> {
    let s = smith(m, None)?;
    if let Some(e) = s.exponents.iter().find(|&&e| e >= n as i64) {
        return Err(Error::PrecisionExhausted(format!(
            "elementary divisor p^{} is not below p^{}",
            e, n
        )));
    }
    Ok(s)
}

fn range(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn span(a: usize, b: usize) -> Vec<usize> {
    (a..b).collect()
}

pub fn hypertor(c: &BasedComplex) -> Result<BocksteinComplex> {
    let n = c.p_prec();
    let a0 = c.at_zero();
    let a1 = c.t_coefficient(1);
    let degrees: Vec<i64> = c.degrees().collect();

    let mut data: Vec<DegreeData> = Vec::new();
    for &j in &degrees {
        let s = certified_smith(&a0.diff(j), n)?;
        let nj = c.rank(j);
        let r = s.rank();
        let cycles = s.v.select(&range(nj), &span(r, nj));
        let coords = s.v_inv.select(&span(r, nj), &range(nj));
        let relations = coords.mul(&a0.diff(j - 1));
        let rel = certified_smith(&relations, n)?;
        data.push(DegreeData { cycles, coords, relations, d_rank: r, rel });
    }

    let mut groups = Vec::new();
    for (k, &j) in degrees.iter().enumerate() {
        let d = &data[k];
        let m = d.relations.rows();
        let free_rank = m - d.rel.rank();
        let torsion = d.rel.exponents.iter().copied().filter(|&e| e > 0).collect();
        let basis = d.cycles.mul(&d.free_lift());
        groups.push(HypertorGroup { degree: j, free_rank, torsion, basis });
    }

    let mut maps = Vec::new();
    let mut integral_maps = Vec::new();
    for k in 0..degrees.len().saturating_sub(1) {
        let j = degrees[k];
        let bmat = data[k + 1].coords.mul(&a1.diff(j).neg()).mul(&data[k].cycles);
        let beta = data[k + 1].free_projection().mul(&bmat).mul(&data[k].free_lift());
        integral_maps.push(bmat);
        maps.push(beta);
    }
    Ok(BocksteinComplex { p: c.prime(), p_prec: n, lo: c.lo(), groups, maps, data, integral_maps })
}

#[derive(Clone, Debug)]
pub struct SemisimplicityCertificate {
    pub verdict: bool,
    pub degrees: Vec<i64>,
    /// `dim H^j(Z_p ⊗ C) ⊗ Q_p`.
    pub h: Vec<usize>,
    /// Rank over `Q_p` of the Bockstein out of degree `j`.
    pub beta_rank: Vec<usize>,
    pub ker_dim: Vec<usize>,
    pub im_dim: Vec<usize>,
    /// Lengths of the cohomology of the Bockstein complex, when finite.
    pub lengths: Option<Vec<i64>>,
    /// `dim H^j(C)^Γ ⊗ Q_p`, when semisimple.
    pub g: Option<Vec<i64>>,
}

pub fn is_semisimple(c: &BasedComplex) -> Result<SemisimplicityCertificate> {
    let b = hypertor(c)?;
    certificate(c, &b)
}

pub(crate) fn certificate(c: &BasedComplex, b: &BocksteinComplex) -> Result<SemisimplicityCertificate> {
    let n = c.p_prec();
    let degrees: Vec<i64> = c.degrees().collect();
    let h: Vec<usize> = b.groups.iter().map(|g| g.free_rank).collect();
    let mut beta_rank = Vec::new();
    for &j in &degrees {
        beta_rank.push(certified_smith(&b.map(j), n)?.rank());
    }
    let mut ker_dim = Vec::new();
    let mut im_dim = Vec::new();
    for (k, _) in degrees.iter().enumerate() {
        ker_dim.push(h[k] - beta_rank[k]);
        im_dim.push(if k > 0 { beta_rank[k - 1] } else { 0 });
    }
    let verdict = ker_dim == im_dim;
    let (lengths, g) = if verdict {
        (Some(bockstein_lengths(c, b)?), Some(g_table(&degrees, &h)?))
    } else {
        (None, None)
    };
    Ok(SemisimplicityCertificate { verdict, degrees, h, beta_rank, ker_dim, im_dim, lengths, g })
}

fn g_table(degrees: &[i64], h: &[usize]) -> Result<Vec<i64>> {
    let mut g = vec![0i64; degrees.len()];
    let mut next = 0i64;
    for k in (0..degrees.len()).rev() {
        let v = h[k] as i64 - next;
        if v < 0 {
            return Err(Error::InconsistentDims(format!("g_{} = {} is negative", degrees[k], v)));
        }
        g[k] = v;
        next = v;
    }
    if let Some(&g0) = g.first() {
        if g0 != 0 {
            return Err(Error::InconsistentDims(format!(
                "invariants in the lowest degree {} have dimension {}",
                degrees[0], g0
            )));
        }
    }
    Ok(g)
}

/// Lengths of `H^j` of the Bockstein complex built on the full hypertor groups.
fn bockstein_lengths(c: &BasedComplex, b: &BocksteinComplex) -> Result<Vec<i64>> {
    let n = c.p_prec();
    let z = PadicNumber::exact_zero(c.prime());
    let len = b.groups.len();
    let mut out = Vec::new();
    for k in 0..len {
        let d = &b.data[k];
        let m = d.relations.rows();
        // cycles of the Bockstein: y with B y in the relation lattice of the next degree
        let kernel = if k + 1 < len {
            let bmat = &b.integral_maps[k];
            let rel_next = &b.data[k + 1].relations;
            let g = bmat.hcat(&rel_next.neg());
            let s = certified_smith(&g, n)?;
            let cols = g.cols();
            s.v.select(&range(m), &span(s.rank(), cols))
        } else {
            Matrix::identity(m, &z)
        };
        let mut image = d.relations.clone();
        if k > 0 {
            image = image.hcat(&b.integral_maps[k - 1]);
        }
        match lattice_index(&kernel, &image, n)? {
            Some(l) => out.push(l),
            None => {
                return Err(Error::NotSemisimple(format!(
                    "Bockstein cohomology in degree {} is infinite",
                    b.lo + k as i64
                )))
            }
        }
    }
    Ok(out)
}

/// Length of `L(outer) / L(inner)` for column lattices with `L(inner) ⊂ L(outer)`;
/// `None` when the quotient is infinite.
pub(crate) fn lattice_index(outer: &Mat, inner: &Mat, n: u32) -> Result<Option<i64>> {
    let s = certified_smith(outer, n)?;
    let r = s.rank();
    let rows = outer.rows();
    let ui = s.u.mul(inner);
    for i in r..rows {
        for j in 0..ui.cols() {
            if !ui.get(i, j).truncate(n as i64).is_zero() {
                return Err(Error::Invalid("inner lattice is not contained in the outer one".into()));
            }
        }
    }
    let coords = Matrix::from_fn(r, ui.cols(), &PadicNumber::exact_zero(outer.proto().prime()), |i, j| {
        ui.get(i, j).shift(-s.exponents[i])
    });
    let sc = certified_smith(&coords, n)?;
    if sc.rank() < r {
        return Ok(None);
    }
    Ok(Some(sc.exponents.iter().sum()))
}

pub fn r_gamma(c: &BasedComplex) -> Result<i64> {
    let cert = is_semisimple(c)?;
    r_gamma_from(&cert)
}

pub(crate) fn r_gamma_from(cert: &SemisimplicityCertificate) -> Result<i64> {
    if !cert.verdict {
        return Err(Error::NotSemisimple("Bockstein cohomology has positive rank".into()));
    }
    let g = cert.g.as_ref().expect("semisimple certificate carries g");
    Ok(cert.degrees.iter().zip(g).map(|(&j, &gj)| if (j + 1) % 2 == 0 { gj } else { -gj }).sum())
}

#[derive(Clone, Debug)]
pub struct EulerCharacteristic {
    pub chi_add: i64,
    pub chi_mult: BigRational,
    pub lengths: Vec<i64>,
}

/// `χ_add = Σ_j (-1)^{j+1} length H^j` of the Bockstein complex.
pub fn euler_characteristic(c: &BasedComplex, _a: &Trivialization) -> Result<EulerCharacteristic> {
    let cert = is_semisimple(c)?;
    euler_from(c.prime(), &cert)
}

pub(crate) fn euler_from(p: u64, cert: &SemisimplicityCertificate) -> Result<EulerCharacteristic> {
    if !cert.verdict {
        return Err(Error::NotSemisimple("Bockstein cohomology has positive rank".into()));
    }
    let lengths = cert.lengths.clone().expect("semisimple certificate carries lengths");
    let chi_add: i64 = cert
        .degrees
        .iter()
        .zip(&lengths)
        .map(|(&j, &l)| if (j + 1).rem_euclid(2) == 0 { l } else { -l })
        .sum();
    let pp = BigRational::from_integer(BigInt::from(p));
    let chi_mult = if chi_add >= 0 {
        num_traits::pow(pp, chi_add as usize)
    } else {
        BigRational::one() / num_traits::pow(pp, (-chi_add) as usize)
    };
    Ok(EulerCharacteristic { chi_add, chi_mult, lengths })
}

/// Scalar of the trivialization of a finite module presented by a square matrix,
/// together with the length of the module read off from its Smith form.
pub fn presentation_scalar(m: &Mat, n: u32) -> Result<(PadicNumber, i64)> {
    let det = det_field(m)?;
    let s = certified_smith(m, n)?;
    if s.rank() < m.rows() {
        return Err(Error::Invalid("presentation matrix is singular".into()));
    }
    Ok((det, s.exponents.iter().sum()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::series_matrix;

    fn elementary(d: &[i64]) -> BasedComplex {
        let m = series_matrix(5, 40, 20, &[vec![d.to_vec()]]);
        BasedComplex::new(5, 30, 20, -1, vec![1, 1], vec![m]).unwrap()
    }

    #[test]
    fn bockstein_of_t_is_minus_one() {
        let b = hypertor(&elementary(&[0, 1])).unwrap();
        assert_eq!(b.homological(1).unwrap().free_rank, 1);
        assert_eq!(b.homological(0).unwrap().free_rank, 1);
        assert_eq!(*b.map(-1).get(0, 0), PadicNumber::from_i64(5, -1, 30));
    }

    #[test]
    fn identity_complex_has_no_hypertor() {
        let b = hypertor(&elementary(&[1])).unwrap();
        assert!(b.groups.iter().all(|g| g.free_rank == 0 && g.torsion.is_empty()));
    }

    #[test]
    fn multiplication_by_p() {
        let c = elementary(&[5]);
        let b = hypertor(&c).unwrap();
        let h0 = b.homological(0).unwrap();
        assert_eq!((h0.free_rank, h0.torsion.clone()), (0, vec![1]));
        assert_eq!(b.homological(1).unwrap().free_rank, 0);
        let cert = is_semisimple(&c).unwrap();
        assert!(cert.verdict);
        assert_eq!(cert.lengths, Some(vec![0, 1]));
    }

    #[test]
    fn semisimplicity_examples() {
        assert!(is_semisimple(&elementary(&[0, 1])).unwrap().verdict);
        assert!(!is_semisimple(&elementary(&[0, 0, 1])).unwrap().verdict);
        assert_eq!(r_gamma(&elementary(&[0, 1])).unwrap(), -1);
        assert_eq!(r_gamma(&elementary(&[1])).unwrap(), 0);
    }

    #[test]
    fn presentation_scalar_matches_length() {
        let q = |x| PadicNumber::from_i64(5, x, 30);
        let m = Matrix::from_rows(vec![vec![q(25), q(3)], vec![q(0), q(10)]], &q(0));
        let (det, len) = presentation_scalar(&m, 30).unwrap();
        assert_eq!(det.valuation(), Some(len));
        assert_eq!(len, 3);
    }
}
