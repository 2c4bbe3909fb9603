//! Random trivialized complexes with known leading terms.
//!
//! A complex is a direct sum of pieces `[Λ --a--> Λ]` with `a ∈ {1, T, p^k}` placed
//! in random degrees, with basis indices interleaved, then conjugated by random
//! invertible matrices over Λ. The expected characteristic element is computed from
//! the pieces alone: a permutation parity per degree, the product of the `a`'s and
//! the determinants of the conjugators.

use rand::Rng;

use super::{BasedComplex, DvrComplex, Trivialization};
use crate::error::Result;
use crate::linalg::{Matrix, ONE_PREC};
use crate::padic::PadicNumber;
use crate::laurent::LaurentSeries;
use crate::series::{IwasawaSeries, LambdaFraction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceKind {
    One,
    T,
    PPow(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Piece {
    /// Degree of the source.
    pub degree: i64,
    pub kind: PieceKind,
}

#[derive(Clone, Debug)]
pub struct GeneratorOptions {
    pub max_pieces: usize,
    pub min_degree: i64,
    pub max_degree: i64,
    pub allow_t: bool,
    pub max_p_power: u32,
    pub conjugate: bool,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        GeneratorOptions { max_pieces: 4, min_degree: -2, max_degree: 1, allow_t: true, max_p_power: 2, conjugate: true }
    }
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub complex: BasedComplex,
    pub trivialization: Trivialization,
    pub pieces: Vec<Piece>,
    pub expected_char: LambdaFraction,
    pub expected_r: i64,
    pub expected_leading: PadicNumber,
    pub expected_ord: i64,
}

pub fn random_pieces<R: Rng + ?Sized>(rng: &mut R, opts: &GeneratorOptions) -> Vec<Piece> {
    let n = rng.gen_range(1..=opts.max_pieces);
    (0..n)
        .map(|_| {
            let degree = rng.gen_range(opts.min_degree..=opts.max_degree);
            let roll = rng.gen_range(0..10);
            let kind = if opts.allow_t && roll < 4 {
                PieceKind::T
            } else if opts.max_p_power > 0 && roll >= 7 {
                PieceKind::PPow(rng.gen_range(1..=opts.max_p_power))
            } else {
                PieceKind::One
            };
            Piece { degree, kind }
        })
        .collect()
}

/// Basis positions of each piece: `(source index, target index)` and the ranks.
fn layout(pieces: &[Piece]) -> (i64, Vec<usize>, Vec<(usize, usize)>) {
    let lo = pieces.iter().map(|q| q.degree).min().unwrap_or(0);
    let hi = pieces.iter().map(|q| q.degree + 1).max().unwrap_or(-1);
    let mut next = vec![0usize; (hi - lo + 1).max(0) as usize];
    let mut pos = Vec::new();
    for q in pieces {
        let k = (q.degree - lo) as usize;
        let s = next[k];
        next[k] += 1;
        let t = next[k + 1];
        next[k + 1] += 1;
        pos.push((s, t));
    }
    (lo, next, pos)
}

fn permutation_is_odd(list: &[usize]) -> bool {
    let mut inv = 0usize;
    for i in 0..list.len() {
        for j in (i + 1)..list.len() {
            if list[i] > list[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

/// `(sign, T-exponent, p-exponent)` of the torsion of the unconjugated sum.
pub fn oracle_torsion(pieces: &[Piece]) -> (i64, i64, i64) {
    let (lo, ranks, pos) = layout(pieces);
    let mut sign = 1i64;
    let mut r = 0i64;
    let mut ord = 0i64;
    for (k, &n) in ranks.iter().enumerate() {
        let i = lo + k as i64;
        let e = if (i + 1).rem_euclid(2) == 0 { 1 } else { -1 };
        let mut rows = Vec::new();
        for (q, piece) in pieces.iter().enumerate() {
            if piece.degree == i - 1 {
                rows.push(pos[q].1);
                match piece.kind {
                    PieceKind::One => {}
                    PieceKind::T => r += e,
                    PieceKind::PPow(k) => ord += e * k as i64,
                }
            }
        }
        let mut own: Vec<usize> = pieces.iter().enumerate().filter(|(_, q)| q.degree == i).map(|(q, _)| pos[q].0).collect();
        own.sort_unstable();
        rows.extend(own);
        debug_assert_eq!(rows.len(), n);
        if permutation_is_odd(&rows) {
            sign = -sign;
        }
    }
    (sign, r, ord)
}

fn random_poly<R: Rng + ?Sized>(rng: &mut R, p: u64, prec: u32, t_prec: usize, unit: bool) -> IwasawaSeries {
    let b = p as i64;
    let mut c: Vec<i64> = (0..3).map(|_| rng.gen_range(-b..=b)).collect();
    if unit {
        c[0] = rng.gen_range(1..b);
    }
    IwasawaSeries::from_i64s(p, &c, prec, t_prec)
}

/// A random invertible matrix over Λ with its inverse and determinant.
fn random_conjugator<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    p: u64,
    prec: u32,
    t_prec: usize,
) -> Result<(Matrix<IwasawaSeries>, Matrix<IwasawaSeries>, IwasawaSeries)> {
    let z = IwasawaSeries::exact_zero(p, t_prec);
    let mut m = Matrix::identity(n, &z);
    let mut inv = Matrix::identity(n, &z);
    let mut det = IwasawaSeries::one(p, ONE_PREC, t_prec);
    for i in 0..n {
        let u = random_poly(rng, p, prec, t_prec, true);
        let mut d = Matrix::identity(n, &z);
        d.set(i, i, u.clone());
        let mut di = Matrix::identity(n, &z);
        di.set(i, i, u.inverse()?);
        m = d.mul(&m);
        inv = inv.mul(&di);
        det = det.mul(&u);
    }
    if n > 1 {
        for _ in 0..2 * n {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let lam = random_poly(rng, p, prec, t_prec, false);
            let mut e = Matrix::identity(n, &z);
            e.set(a, b, lam.clone());
            let mut ei = Matrix::identity(n, &z);
            ei.set(a, b, lam.neg());
            m = e.mul(&m);
            inv = inv.mul(&ei);
        }
    }
    Ok((m, inv, det))
}

pub fn assemble(pieces: &[Piece], p: u64, p_prec: u32, t_prec: usize) -> Result<BasedComplex> {
    let w = p_prec + super::GUARD_DIGITS;
    let (lo, ranks, pos) = layout(pieces);
    let z = IwasawaSeries::exact_zero(p, t_prec);
    let mut diffs: Vec<Matrix<IwasawaSeries>> =
        (0..ranks.len().saturating_sub(1)).map(|k| Matrix::zeros(ranks[k + 1], ranks[k], &z)).collect();
    for (q, piece) in pieces.iter().enumerate() {
        let a = match piece.kind {
            PieceKind::One => IwasawaSeries::one(p, w, t_prec),
            PieceKind::T => IwasawaSeries::t(p, w, t_prec),
            PieceKind::PPow(k) => IwasawaSeries::constant(&PadicNumber::one(p, w).shift(k as i64), t_prec),
        };
        let k = (piece.degree - lo) as usize;
        diffs[k].set(pos[q].1, pos[q].0, a);
    }
    BasedComplex::new(p, p_prec, t_prec, lo, ranks, diffs)
}

pub fn random_semisimple<R: Rng + ?Sized>(
    rng: &mut R,
    p: u64,
    p_prec: u32,
    t_prec: usize,
    opts: &GeneratorOptions,
) -> Result<Generated> {
    let pieces = random_pieces(rng, opts);
    generate_from(rng, &pieces, p, p_prec, t_prec, opts.conjugate)
}

pub fn generate_from<R: Rng + ?Sized>(
    rng: &mut R,
    pieces: &[Piece],
    p: u64,
    p_prec: u32,
    t_prec: usize,
    conjugate: bool,
) -> Result<Generated> {
    let w = p_prec + super::GUARD_DIGITS;
    let base = assemble(pieces, p, p_prec, t_prec)?;
    let (sign, r, ord) = oracle_torsion(pieces);
    let unit = random_poly(rng, p, w, t_prec, true);
    let mut expected = LambdaFraction::from_series(&unit);
    let mut leading = unit.coeff(0);
    let complex = if conjugate {
        let mut mats = Vec::new();
        let mut invs = Vec::new();
        for (k, &n) in base.ranks().iter().enumerate() {
            let (m, inv, det) = random_conjugator(rng, n, p, w, t_prec)?;
            let i = base.lo() + k as i64;
            let f = LambdaFraction::from_series(&det);
            if (i + 1).rem_euclid(2) == 0 {
                expected = expected.mul(&f);
                leading = leading.mul(&det.coeff(0));
            } else {
                expected = expected.div(&f)?;
                leading = leading.div(&det.coeff(0))?;
            }
            mats.push(m);
            invs.push(inv);
        }
        base.conjugate(&mats, &invs)?
    } else {
        base
    };
    let t = LambdaFraction::from_series(&IwasawaSeries::t(p, ONE_PREC, t_prec));
    for _ in 0..r.abs() {
        expected = if r > 0 { expected.mul(&t) } else { expected.div(&t)? };
    }
    let scalar = PadicNumber::from_i64(p, sign, ONE_PREC).shift(ord);
    expected = expected.scale(&scalar);
    leading = leading.mul(&scalar);
    Ok(Generated {
        trivialization: Trivialization::new(unit)?,
        complex,
        pieces: pieces.to_vec(),
        expected_char: expected,
        expected_r: r,
        expected_leading: leading,
        expected_ord: ord,
    })
}

/// A complex over `R = Λ_(T)` built from pieces `1` and `T`, conjugated by random
/// matrices whose entries have denominators that are units in `R`.
pub fn random_dvr_complex<R: Rng + ?Sized>(
    rng: &mut R,
    pieces: &[Piece],
    p: u64,
    prec: u32,
    t_prec: usize,
) -> Result<DvrComplex> {
    let base = assemble(pieces, p, prec.saturating_sub(super::GUARD_DIGITS).max(1), t_prec)?;
    let plain = DvrComplex::from_based(&base);
    let z = LaurentSeries::zero(p, t_prec);
    let mut mats = Vec::new();
    let mut invs = Vec::new();
    for &n in base.ranks() {
        let (m, inv, _) = random_conjugator(rng, n, p, prec, t_prec)?;
        // a diagonal factor that is a unit of R but not of Λ
        let mut d = Matrix::identity(n, &z);
        let mut di = Matrix::identity(n, &z);
        for i in 0..n {
            let g = IwasawaSeries::from_i64s(p, &[p as i64 * rng.gen_range(1..4), rng.gen_range(1..p as i64)], prec, t_prec);
            let f = LaurentSeries::from_series(&g);
            di.set(i, i, f.inv()?);
            d.set(i, i, f);
        }
        mats.push(d.mul(&m.map(&z, LaurentSeries::from_series)));
        invs.push(inv.map(&z, LaurentSeries::from_series).mul(&di));
    }
    let diffs = (0..plain.diffs.len()).map(|k| mats[k + 1].mul(&plain.diffs[k]).mul(&invs[k])).collect();
    DvrComplex::new(p, t_prec, plain.lo, plain.ranks.clone(), diffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_on_single_t_piece() {
        let pieces = [Piece { degree: -1, kind: PieceKind::T }];
        assert_eq!(oracle_torsion(&pieces), (1, -1, 0));
    }

    #[test]
    fn oracle_sees_interleaving() {
        // two pieces out of degree 0: targets in degree 1 are 0 and 1, sources in degree 0 are 0 and 1
        let a = [Piece { degree: 0, kind: PieceKind::One }, Piece { degree: 1, kind: PieceKind::One }];
        // degree 1 holds the target of the first piece (index 0) and the source of the second (index 1)
        assert_eq!(oracle_torsion(&a).0, 1);
        let b = [Piece { degree: 1, kind: PieceKind::One }, Piece { degree: 0, kind: PieceKind::One }];
        // now the source of the first piece takes index 0 in degree 1 and the target takes index 1
        assert_eq!(oracle_torsion(&b).0, -1);
    }
}
