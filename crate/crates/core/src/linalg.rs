//! Dense matrices over the scalar types of the crate, determinants, pivot
//! columns, and Smith normal form over a discrete valuation ring.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::padic::PadicNumber;
use crate::laurent::LaurentSeries;
use crate::series::{IwasawaSeries, LambdaFraction};

/// Relative precision given to structural ones.
pub const ONE_PREC: u32 = 256;

pub trait Ring: Clone + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
}

pub trait Field: Ring {
    fn div(&self, o: &Self) -> Result<Self>;
    /// Lower is a better pivot.
    fn pivot_key(&self) -> (i64, i64);
}

/// Elements of a DVR embedded in its fraction field.
pub trait Dvr: Field {
    /// Valuation with respect to the uniformiser, `None` for zero.
    fn dvr_val(&self) -> Option<i64>;
    /// `self / π^v`.
    fn unit_part(&self) -> Result<Self>;
}

impl Ring for PadicNumber {
    fn zero_like(&self) -> Self {
        PadicNumber::exact_zero(self.prime())
    }
    fn one_like(&self) -> Self {
        PadicNumber::one(self.prime(), ONE_PREC)
    }
    fn is_zero(&self) -> bool {
        PadicNumber::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        PadicNumber::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        PadicNumber::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        PadicNumber::mul(self, o)
    }
    fn neg(&self) -> Self {
        PadicNumber::neg(self)
    }
}

impl Field for PadicNumber {
    fn div(&self, o: &Self) -> Result<Self> {
        PadicNumber::div(self, o)
    }
    fn pivot_key(&self) -> (i64, i64) {
        (self.val_or_abs(), -(self.rel_precision() as i64))
    }
}

impl Dvr for PadicNumber {
    fn dvr_val(&self) -> Option<i64> {
        self.valuation()
    }
    fn unit_part(&self) -> Result<Self> {
        match self.valuation() {
            None => Err(Error::DivisionByZero),
            Some(v) => Ok(self.shift(-v)),
        }
    }
}

impl Ring for IwasawaSeries {
    fn zero_like(&self) -> Self {
        IwasawaSeries::exact_zero(self.prime(), self.t_prec())
    }
    fn one_like(&self) -> Self {
        IwasawaSeries::one(self.prime(), ONE_PREC, self.t_prec())
    }
    fn is_zero(&self) -> bool {
        IwasawaSeries::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        IwasawaSeries::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        IwasawaSeries::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        IwasawaSeries::mul(self, o)
    }
    fn neg(&self) -> Self {
        IwasawaSeries::neg(self)
    }
}

impl Ring for LambdaFraction {
    fn zero_like(&self) -> Self {
        LambdaFraction::zero(self.prime(), self.t_prec())
    }
    fn one_like(&self) -> Self {
        LambdaFraction::one(self.prime(), ONE_PREC, self.t_prec())
    }
    fn is_zero(&self) -> bool {
        LambdaFraction::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        LambdaFraction::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        LambdaFraction::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        LambdaFraction::mul(self, o)
    }
    fn neg(&self) -> Self {
        LambdaFraction::neg(self)
    }
}

impl Field for LambdaFraction {
    fn div(&self, o: &Self) -> Result<Self> {
        LambdaFraction::div(self, o)
    }
    fn pivot_key(&self) -> (i64, i64) {
        if self.is_zero() {
            return (i64::MAX, i64::MAX);
        }
        let lead = self.numerator().coeff(0).val_or_abs() - self.denominator().coeff(0).val_or_abs();
        (self.t_order(), lead)
    }
}

impl Dvr for LambdaFraction {
    fn dvr_val(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.t_order())
        }
    }
    fn unit_part(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let t = self.t_prec();
        let tr = LambdaFraction::from_series(&IwasawaSeries::t(self.prime(), ONE_PREC, t));
        let mut u = self.clone();
        let r = self.t_order();
        for _ in 0..r.abs() {
            u = if r > 0 { u.div(&tr)? } else { u.mul(&tr) };
        }
        Ok(u)
    }
}

impl Ring for LaurentSeries {
    fn zero_like(&self) -> Self {
        LaurentSeries::zero(self.prime(), self.t_prec())
    }
    fn one_like(&self) -> Self {
        LaurentSeries::one(self.prime(), ONE_PREC, self.t_prec())
    }
    fn is_zero(&self) -> bool {
        LaurentSeries::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        LaurentSeries::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        LaurentSeries::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        LaurentSeries::mul(self, o)
    }
    fn neg(&self) -> Self {
        LaurentSeries::neg(self)
    }
}

impl Field for LaurentSeries {
    fn div(&self, o: &Self) -> Result<Self> {
        LaurentSeries::div(self, o)
    }
    fn pivot_key(&self) -> (i64, i64) {
        match self.leading_coefficient() {
            Ok(c) => (self.t_order(), c.val_or_abs()),
            Err(_) => (i64::MAX, i64::MAX),
        }
    }
}

impl Dvr for LaurentSeries {
    fn dvr_val(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.t_order())
        }
    }
    fn unit_part(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(LaurentSeries::unit_part(self))
    }
}

#[derive(Clone, Debug)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    proto: R,
    data: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn zeros(rows: usize, cols: usize, proto: &R) -> Self {
        let z = proto.zero_like();
        Matrix { rows, cols, proto: z.clone(), data: vec![z; rows * cols] }
    }

    pub fn identity(n: usize, proto: &R) -> Self {
        let mut m = Self::zeros(n, n, proto);
        for i in 0..n {
            m.set(i, i, proto.one_like());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<R>>, proto: &R) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c, proto);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, x) in row.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, proto: &R, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut m = Self::zeros(rows, cols, proto);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn proto(&self) -> &R {
        &self.proto
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: R) {
        self.data[i * self.cols + j] = x;
    }

    pub fn map<S: Ring>(&self, proto: &S, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix::from_fn(self.rows, self.cols, proto, |i, j| f(self.get(i, j)))
    }

    pub fn try_map<S: Ring>(&self, proto: &S, f: impl Fn(&R) -> Result<S>) -> Result<Matrix<S>> {
        let mut m = Matrix::zeros(self.rows, self.cols, proto);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, f(self.get(i, j))?);
            }
        }
        Ok(m)
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut m = Self::zeros(self.rows, o.cols, &self.proto);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = self.proto.zero_like();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                m.set(i, j, acc);
            }
        }
        m
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, &self.proto, |i, j| self.get(i, j).add(o.get(i, j)))
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, &self.proto, |i, j| self.get(i, j).sub(o.get(i, j)))
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.rows, self.cols, &self.proto, |i, j| self.get(i, j).neg())
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::from_fn(self.rows, self.cols, &self.proto, |i, j| self.get(i, j).mul(c))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, &self.proto, |i, j| self.get(j, i).clone())
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), &self.proto, |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn column(&self, j: usize) -> Vec<R> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Concatenates columns.
    pub fn hcat(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        Self::from_fn(self.rows, self.cols + o.cols, &self.proto, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                o.get(i, j - self.cols).clone()
            }
        })
    }

    /// Concatenates rows.
    pub fn vcat(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.cols);
        Self::from_fn(self.rows + o.rows, self.cols, &self.proto, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                o.get(i - self.rows, j).clone()
            }
        })
    }

    /// Block diagonal sum.
    pub fn block_diag(&self, o: &Self) -> Self {
        Self::from_fn(self.rows + o.rows, self.cols + o.cols, &self.proto, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                o.get(i - self.rows, j - self.cols).clone()
            } else {
                self.proto.zero_like()
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_a += c * row_b
    fn row_axpy(&mut self, a: usize, c: &R, b: usize) {
        for j in 0..self.cols {
            let x = self.get(b, j);
            if x.is_zero() {
                continue;
            }
            let v = self.get(a, j).add(&c.mul(x));
            self.set(a, j, v);
        }
    }

    /// col_a += c * col_b
    fn col_axpy(&mut self, a: usize, c: &R, b: usize) {
        for i in 0..self.rows {
            let x = self.get(i, b);
            if x.is_zero() {
                continue;
            }
            let v = self.get(i, a).add(&c.mul(x));
            self.set(i, a, v);
        }
    }

    fn scale_row(&mut self, a: usize, c: &R) {
        for j in 0..self.cols {
            let v = self.get(a, j).mul(c);
            self.set(a, j, v);
        }
    }

    fn scale_col(&mut self, a: usize, c: &R) {
        for i in 0..self.rows {
            let v = self.get(i, a).mul(c);
            self.set(i, a, v);
        }
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Determinant over a commutative ring by cofactor expansion with memoised minors.
pub fn det_ring<R: Ring>(m: &Matrix<R>) -> R {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return m.proto().one_like();
    }
    // minors[mask] = det of rows n-|mask|.. against the columns in mask
    let mut minors: Vec<Option<R>> = vec![None; 1 << n];
    minors[0] = Some(m.proto().one_like());
    for mask in 1usize..(1 << n) {
        let k = mask.count_ones() as usize;
        let row = n - k;
        let mut acc = m.proto().zero_like();
        let mut sign_pos = 0;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let a = m.get(row, j);
            if !a.is_zero() {
                let sub = minors[mask & !(1 << j)].as_ref().unwrap();
                let term = a.mul(sub);
                acc = if sign_pos % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            sign_pos += 1;
        }
        minors[mask] = Some(acc);
    }
    minors[(1 << n) - 1].take().unwrap()
}

/// Determinant over a field by elimination with best-pivot choice per column.
pub fn det_field<F: Field>(m: &Matrix<F>) -> Result<F> {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut det = m.proto().one_like();
    for k in 0..n {
        let best = (k..n).filter(|&i| !a.get(i, k).is_zero()).min_by_key(|&i| a.get(i, k).pivot_key());
        let Some(i) = best else {
            return Ok(m.proto().zero_like());
        };
        if i != k {
            a.swap_rows(i, k);
            det = det.neg();
        }
        let piv = a.get(k, k).clone();
        det = det.mul(&piv);
        for r in (k + 1)..n {
            if a.get(r, k).is_zero() {
                continue;
            }
            let f = a.get(r, k).div(&piv)?.neg();
            a.row_axpy(r, &f, k);
        }
    }
    Ok(det)
}

/// Lexicographically first maximal set of linearly independent columns.
pub fn pivot_columns<F: Field>(m: &Matrix<F>) -> Result<Vec<usize>> {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for j in 0..a.cols() {
        if row == a.rows() {
            break;
        }
        let best = (row..a.rows()).filter(|&i| !a.get(i, j).is_zero()).min_by_key(|&i| a.get(i, j).pivot_key());
        let Some(i) = best else { continue };
        a.swap_rows(i, row);
        let piv = a.get(row, j).clone();
        for r in (row + 1)..a.rows() {
            if a.get(r, j).is_zero() {
                continue;
            }
            let f = a.get(r, j).div(&piv)?.neg();
            a.row_axpy(r, &f, row);
        }
        pivots.push(j);
        row += 1;
    }
    Ok(pivots)
}

pub fn rank<F: Field>(m: &Matrix<F>) -> Result<usize> {
    Ok(pivot_columns(m)?.len())
}

/// `u · m · v = diag(π^{e_1}, …, π^{e_r}, 0, …)` with `e_1 ≤ e_2 ≤ …`.
#[derive(Clone, Debug)]
pub struct Smith<F> {
    pub u: Matrix<F>,
    pub u_inv: Matrix<F>,
    pub v: Matrix<F>,
    pub v_inv: Matrix<F>,
    pub exponents: Vec<i64>,
}

impl<F> Smith<F> {
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }
}

/// Smith normal form over a DVR, pivoting on an entry of least valuation.
/// With `rng`, ties between candidate pivots are broken at random.
pub fn smith<F: Dvr>(m: &Matrix<F>, mut rng: Option<&mut dyn rand::RngCore>) -> Result<Smith<F>> {
    let (r, c) = (m.rows(), m.cols());
    let proto = m.proto().clone();
    let mut a = m.clone();
    let mut u = Matrix::identity(r, &proto);
    let mut u_inv = Matrix::identity(r, &proto);
    let mut v = Matrix::identity(c, &proto);
    let mut v_inv = Matrix::identity(c, &proto);
    let mut exps = Vec::new();
    for k in 0..r.min(c) {
        let mut best: Option<(i64, usize, usize)> = None;
        let mut ties = Vec::new();
        for i in k..r {
            for j in k..c {
                if let Some(val) = a.get(i, j).dvr_val() {
                    match best {
                        Some((bv, _, _)) if val > bv => {}
                        Some((bv, _, _)) if val == bv => ties.push((i, j)),
                        _ => {
                            best = Some((val, i, j));
                            ties.clear();
                            ties.push((i, j));
                        }
                    }
                }
            }
        }
        let Some((val, mut pi, mut pj)) = best else { break };
        if let Some(g) = rng.as_deref_mut() {
            let pick = ties[g.gen_range(0..ties.len())];
            pi = pick.0;
            pj = pick.1;
        }
        a.swap_rows(k, pi);
        u.swap_rows(k, pi);
        u_inv.swap_cols(k, pi);
        a.swap_cols(k, pj);
        v.swap_cols(k, pj);
        v_inv.swap_rows(k, pj);
        let unit = a.get(k, k).unit_part()?;
        let s = proto.one_like().div(&unit)?;
        a.scale_row(k, &s);
        u.scale_row(k, &s);
        u_inv.scale_col(k, &unit);
        let piv = a.get(k, k).clone();
        for i in (k + 1)..r {
            if a.get(i, k).is_zero() {
                continue;
            }
            let f = a.get(i, k).div(&piv)?;
            a.row_axpy(i, &f.neg(), k);
            u.row_axpy(i, &f.neg(), k);
            u_inv.col_axpy(k, &f, i);
        }
        for j in (k + 1)..c {
            if a.get(k, j).is_zero() {
                continue;
            }
            let g = a.get(k, j).div(&piv)?;
            a.col_axpy(j, &g.neg(), k);
            v.col_axpy(j, &g.neg(), k);
            v_inv.row_axpy(k, &g, j);
        }
        for j in (k + 1)..c {
            a.set(k, j, proto.zero_like());
        }
        for i in (k + 1)..r {
            a.set(i, k, proto.zero_like());
        }
        exps.push(val);
    }
    // exponents come out non-decreasing because each pivot has least valuation in the remaining block
    Ok(Smith { u, u_inv, v, v_inv, exponents: exps })
}

/// Inversion parity of the arrangement `(rows not in J, rows in J)`.
pub fn complement_sign(n: usize, j: &[usize]) -> bool {
    let mut inversions = 0usize;
    for &a in j {
        inversions += (0..n).filter(|x| *x > a && !j.contains(x)).count();
    }
    inversions % 2 == 1
}

pub fn complement(n: usize, j: &[usize]) -> Vec<usize> {
    (0..n).filter(|x| !j.contains(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(x: i64) -> PadicNumber {
        PadicNumber::from_i64(5, x, 30)
    }

    fn mat(rows: &[&[i64]]) -> Matrix<PadicNumber> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect(), &q(0))
    }

    #[test]
    fn determinants_agree() {
        let m = mat(&[&[2, 1, 0], &[1, 3, 5], &[0, 5, 7]]);
        let a = det_ring(&m);
        let b = det_field(&m).unwrap();
        assert_eq!(a, q(2 * (21 - 25) - 7));
        assert_eq!(a, b);
    }

    #[test]
    fn smith_of_small_matrix() {
        let m = mat(&[&[5, 10], &[25, 3]]);
        let s = smith(&m, None).unwrap();
        assert_eq!(s.exponents, vec![0, 1]);
        let d = s.u.mul(&m).mul(&s.v);
        assert_eq!(*d.get(0, 0), q(1));
        assert!(d.get(0, 1).is_zero() && d.get(1, 0).is_zero());
        assert_eq!(d.get(1, 1).valuation(), Some(1));
        assert!(s.u.mul(&s.u_inv).sub(&Matrix::identity(2, &q(0))).is_zero());
        assert!(s.v_inv.mul(&s.v).sub(&Matrix::identity(2, &q(0))).is_zero());
    }

    #[test]
    fn pivots_skip_dependent_columns() {
        let m = mat(&[&[1, 2, 0], &[2, 4, 1]]);
        assert_eq!(pivot_columns(&m).unwrap(), vec![0, 2]);
    }
}
