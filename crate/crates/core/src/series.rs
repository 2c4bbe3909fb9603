//! Truncated power series in `Z_p[[T]]` (and `Q_p[[T]]`), Weierstrass preparation,
//! and normalised fractions `T^r · num/den` in the fraction field of Λ.
//!
//! A series is stored as `p^shift · Σ c_i T^i` with the `c_i` known modulo `p^prec`
//! and at least one `c_i` a unit, so every coefficient carries the same absolute
//! precision `shift + prec`. The series is known modulo `T^(t_prec + 1)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::padic::{p_pow, principal_pow, split_p, PadicNumber, EXACT};

pub const DEFAULT_T_PREC: usize = 40;

#[derive(Clone, Debug)]
pub struct IwasawaSeries {
    p: u64,
    shift: i64,
    coeffs: Vec<BigInt>,
    prec: u32,
}

impl IwasawaSeries {
    fn normalized(p: u64, shift: i64, mut coeffs: Vec<BigInt>, prec: u32) -> Self {
        let m = p_pow(p, prec);
        for c in coeffs.iter_mut() {
            if c.is_negative_or_big(&m) {
                *c = c.mod_floor(&m);
            }
        }
        let mut content = prec;
        for c in &coeffs {
            if c.is_zero() {
                continue;
            }
            if !(c % p).is_zero() {
                content = 0;
                break;
            }
            content = content.min(split_p(p, c).0);
        }
        if content == prec {
            return IwasawaSeries {
                p,
                shift: (shift + prec as i64).min(EXACT),
                coeffs: vec![BigInt::zero(); coeffs.len()],
                prec: 0,
            };
        }
        if content > 0 {
            let d = p_pow(p, content);
            for c in coeffs.iter_mut() {
                *c = &*c / &d;
            }
        }
        IwasawaSeries { p, shift: shift + content as i64, coeffs, prec: prec - content }
    }

    pub fn zero(p: u64, t_prec: usize, abs: i64) -> Self {
        IwasawaSeries { p, shift: abs.min(EXACT), coeffs: vec![BigInt::zero(); t_prec + 1], prec: 0 }
    }

    pub fn exact_zero(p: u64, t_prec: usize) -> Self {
        Self::zero(p, t_prec, EXACT)
    }

    pub fn constant(c: &PadicNumber, t_prec: usize) -> Self {
        let mut v = vec![PadicNumber::exact_zero(c.prime()); t_prec + 1];
        v[0] = c.clone();
        Self::from_coeffs(c.prime(), v)
    }

    pub fn one(p: u64, prec: u32, t_prec: usize) -> Self {
        Self::constant(&PadicNumber::one(p, prec), t_prec)
    }

    /// The series `T`.
    pub fn t(p: u64, prec: u32, t_prec: usize) -> Self {
        Self::from_i64s(p, &[0, 1], prec, t_prec)
    }

    pub fn from_i64s(p: u64, c: &[i64], prec: u32, t_prec: usize) -> Self {
        let mut v: Vec<BigInt> = c.iter().take(t_prec + 1).map(|&x| BigInt::from(x)).collect();
        v.resize(t_prec + 1, BigInt::zero());
        Self::normalized(p, 0, v, prec)
    }

    pub fn from_bigints(p: u64, c: &[BigInt], prec: u32, t_prec: usize) -> Self {
        let mut v: Vec<BigInt> = c.iter().take(t_prec + 1).cloned().collect();
        v.resize(t_prec + 1, BigInt::zero());
        Self::normalized(p, 0, v, prec)
    }

    /// Builds a series from p-adic coefficients; the common absolute precision is the minimum.
    pub fn from_coeffs(p: u64, c: Vec<PadicNumber>) -> Self {
        assert!(!c.is_empty());
        let abs = c.iter().map(|x| x.abs_precision()).min().unwrap();
        let live: Vec<&PadicNumber> = c.iter().filter(|x| !x.is_zero() && x.val_or_abs() < abs).collect();
        if live.is_empty() {
            return Self::zero(p, c.len() - 1, abs);
        }
        let m = live.iter().map(|x| x.val_or_abs()).min().unwrap();
        let prec = (abs - m) as u32;
        let coeffs = c
            .iter()
            .map(|x| {
                if x.is_zero() || x.val_or_abs() >= abs {
                    BigInt::zero()
                } else {
                    x.unit_digits() * p_pow(p, (x.val_or_abs() - m) as u32)
                }
            })
            .collect();
        Self::normalized(p, m, coeffs, prec)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn t_prec(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn abs_precision(&self) -> i64 {
        if self.is_zero() {
            self.shift
        } else {
            self.shift + self.prec as i64
        }
    }

    /// Valuation of the content (`μ` for an element of Λ).
    pub fn content_valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.shift)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.prec == 0
    }

    pub fn coeff(&self, i: usize) -> PadicNumber {
        if i >= self.coeffs.len() {
            panic!("coefficient {i} beyond T-precision {}", self.t_prec());
        }
        if self.is_zero() {
            return PadicNumber::zero(self.p, self.shift);
        }
        let c = &self.coeffs[i];
        if c.is_zero() {
            return PadicNumber::zero(self.p, self.abs_precision());
        }
        let (k, _) = split_p(self.p, c);
        PadicNumber::from_bigint(self.p, c, self.prec - k).shift(self.shift)
    }

    pub fn coefficients(&self) -> Vec<PadicNumber> {
        (0..self.coeffs.len()).map(|i| self.coeff(i)).collect()
    }

    /// Index of the first nonzero coefficient.
    pub fn t_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Caps the T-precision.
    pub fn truncate_t(&self, t_prec: usize) -> Self {
        if t_prec >= self.t_prec() {
            return self.clone();
        }
        let c = self.coeffs[..=t_prec].to_vec();
        Self::normalized(self.p, self.shift, c, self.prec)
    }

    /// Caps the absolute precision of all coefficients.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        if abs >= self.abs_precision() {
            return self.clone();
        }
        if abs <= self.shift {
            return Self::zero(self.p, self.t_prec(), abs);
        }
        Self::normalized(self.p, self.shift, self.coeffs.clone(), (abs - self.shift) as u32)
    }

    fn aligned(&self, o: &Self) -> (i64, i64, usize) {
        let abs = self.abs_precision().min(o.abs_precision());
        let t = self.t_prec().min(o.t_prec());
        let m = match (self.is_zero(), o.is_zero()) {
            (true, true) => abs,
            (true, false) => o.shift,
            (false, true) => self.shift,
            (false, false) => self.shift.min(o.shift),
        };
        (m.min(abs), abs, t)
    }

    fn scaled(&self, m: i64, t: usize) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![BigInt::zero(); t + 1];
        }
        let f = p_pow(self.p, (self.shift - m) as u32);
        self.coeffs[..=t].iter().map(|c| c * &f).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        let (m, abs, t) = self.aligned(o);
        if abs <= m {
            return Self::zero(self.p, t, abs);
        }
        let keep = |s: &Self| !s.is_zero() && s.shift < abs;
        let a = if keep(self) { self.scaled(m, t) } else { vec![BigInt::zero(); t + 1] };
        let b = if keep(o) { o.scaled(m, t) } else { vec![BigInt::zero(); t + 1] };
        let c = a.into_iter().zip(b).map(|(x, y)| x + y).collect();
        Self::normalized(self.p, m, c, (abs - m) as u32)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.coeffs.iter().map(|x| -x).collect();
        Self::normalized(self.p, self.shift, c, self.prec)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        let (ma, mb) = (self.t_prec(), o.t_prec());
        let oa = self.t_order().unwrap_or(ma + 1);
        let ob = o.t_order().unwrap_or(mb + 1);
        let t = (ma + ob).min(mb + oa).min(ma.max(mb));
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p, t, (self.shift + o.shift).min(EXACT));
        }
        let prec = self.prec.min(o.prec);
        let mut out = vec![BigInt::zero(); t + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(t + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(t + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::normalized(self.p, self.shift + o.shift, out, prec)
    }

    pub fn scale(&self, c: &PadicNumber) -> Self {
        self.mul(&Self::constant(c, self.t_prec()))
    }

    /// Divides by `T^k`; the first `k` coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if k > self.t_prec() {
            return Err(Error::IndeterminateAtPrecision(format!(
                "cannot divide by T^{k} at T-precision {}",
                self.t_prec()
            )));
        }
        if self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(Error::Invalid(format!("series not divisible by T^{k}")));
        }
        Ok(Self::normalized(self.p, self.shift, self.coeffs[k..].to_vec(), self.prec))
    }

    /// Multiplies by `T^k`, keeping the T-precision.
    pub fn shift_up(&self, k: usize) -> Self {
        let t = self.t_prec();
        let mut c = vec![BigInt::zero(); k.min(t + 1)];
        c.extend(self.coeffs.iter().take((t + 1).saturating_sub(k)).cloned());
        Self::normalized(self.p, self.shift, c, self.prec)
    }

    /// Discards the first `k` coefficients and divides by `T^k`.
    fn tau(&self, k: usize) -> Self {
        Self::normalized(self.p, self.shift, self.coeffs[k..].to_vec(), self.prec)
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.shift == 0 && !(&self.coeffs[0] % self.p).is_zero()
    }

    /// Inverse of a series whose constant term is a p-adic unit.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit("constant term is not a p-adic unit".into()));
        }
        let t = self.t_prec();
        let m = p_pow(self.p, self.prec);
        let a0inv = self.coeffs[0].extended_gcd(&m).x.mod_floor(&m);
        let mut g = vec![BigInt::zero(); t + 1];
        g[0] = a0inv.clone();
        for n in 1..=t {
            let mut s = BigInt::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    s += &self.coeffs[k] * &g[n - k];
                }
            }
            g[n] = (-(s * &a0inv)).mod_floor(&m);
        }
        Ok(Self::normalized(self.p, 0, g, self.prec))
    }

    /// Evaluates at `x` with `v(x) ≥ 1`; the unknown tail is bounded assuming integral coefficients.
    pub fn eval(&self, x: &PadicNumber) -> Result<PadicNumber> {
        if !x.is_zero() && x.val_or_abs() < 1 {
            return Err(Error::Invalid("evaluation point must have positive valuation".into()));
        }
        let vx = if x.is_zero() { x.abs_precision() } else { x.val_or_abs() };
        let t = self.t_prec();
        let tail = (t as i64 + 1).saturating_mul(vx).saturating_add(self.shift.min(0));
        let mut acc = self.coeff(t);
        for i in (0..t).rev() {
            acc = acc.mul(x).add(&self.coeff(i));
        }
        Ok(acc.truncate(tail))
    }

    /// `F(a(1+T) - 1)` for a principal unit `a`; coefficients keep only the digits the
    /// truncated input determines.
    pub fn substitute_twist(&self, a: &PadicNumber) -> Result<Self> {
        let p = self.p;
        let one = PadicNumber::one(p, a.rel_precision());
        let x = a.sub(&one);
        if x.is_zero() {
            return Ok(self.clone());
        }
        let vx = x.val_or_abs();
        if vx < 1 {
            return Err(Error::Invalid("twist needs a ≡ 1 mod p".into()));
        }
        let t = self.t_prec();
        let target = self.abs_precision().min(a.abs_precision());
        let lost = ((target - self.shift.min(0)) + vx - 1) / vx;
        let keep = (t as i64 + 1 - lost).max(0) as usize;
        let lin = Self::from_coeffs(p, {
            let mut v = vec![PadicNumber::exact_zero(p); t + 1];
            v[0] = x.clone();
            if t > 0 {
                v[1] = a.clone();
            }
            v
        });
        let mut acc = Self::constant(&self.coeff(t), t);
        for i in (0..t).rev() {
            acc = acc.mul(&lin).add(&Self::constant(&self.coeff(i), t));
        }
        if (t as i64 + 1) < lost {
            // no coefficient is known to `target`; the constant term is known to this much
            let known = self.shift.min(0) + (t as i64 + 1) * vx;
            return Ok(acc.truncate_t(0).truncate_abs(known.min(target)));
        }
        Ok(acc.truncate_t(keep.min(t)))
    }

    pub fn eq_at_precision(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    /// Largest `k` with `self ≡ o mod p^k` over the common T-range.
    pub fn agreement(&self, o: &Self) -> i64 {
        self.sub(o).shift
    }

    pub fn raw_coeffs(&self) -> (&[BigInt], i64, u32) {
        (&self.coeffs, self.shift, self.prec)
    }
}

trait BigExt {
    fn is_negative_or_big(&self, m: &BigInt) -> bool;
}

impl BigExt for BigInt {
    fn is_negative_or_big(&self, m: &BigInt) -> bool {
        self.sign() == num_bigint::Sign::Minus || self >= m
    }
}

impl PartialEq for IwasawaSeries {
    fn eq(&self, o: &Self) -> bool {
        self.p == o.p && self.eq_at_precision(o)
    }
}

impl fmt::Display for IwasawaSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O(p^{}) + O(T^{})", self.shift, self.t_prec() + 1);
        }
        let mut terms = Vec::new();
        for i in 0..self.coeffs.len() {
            if self.coeffs[i].is_zero() {
                continue;
            }
            let c = self.coeff(i);
            let c = signed_repr(&c);
            terms.push(match i {
                0 => c,
                1 => format!("{c}*T"),
                _ => format!("{c}*T^{i}"),
            });
            if terms.len() >= 6 {
                terms.push("...".into());
                break;
            }
        }
        write!(f, "{} + O(p^{}, T^{})", terms.join(" + "), self.abs_precision(), self.t_prec() + 1)
    }
}

/// Short rendering of a coefficient: a small rational when one matches, else `p^v*u`.
pub fn signed_repr(c: &PadicNumber) -> String {
    if let Some((a, b)) = c.rational_reconstruction() {
        if b.is_one() {
            return a.to_string();
        }
        return format!("{a}/{b}");
    }
    format!("[{c}]")
}

/// `p^mu · P · U` with `P` distinguished and `U` a unit.
#[derive(Clone, Debug)]
pub struct WeierstrassData {
    pub mu: i64,
    /// Coefficients of the monic polynomial, constant term first.
    pub distinguished: Vec<PadicNumber>,
    pub unit: IwasawaSeries,
}

impl WeierstrassData {
    pub fn lambda(&self) -> usize {
        self.distinguished.len() - 1
    }

    pub fn recombine(&self) -> IwasawaSeries {
        let p = self.unit.prime();
        let t = self.unit.t_prec();
        let mut poly = self.distinguished.clone();
        poly.resize(t + 1, PadicNumber::exact_zero(p));
        poly.truncate(t + 1);
        let pm = PadicNumber::one(p, crate::padic::DEFAULT_PREC + 64).shift(self.mu);
        IwasawaSeries::from_coeffs(p, poly).mul(&self.unit).scale(&pm)
    }
}

impl fmt::Display for WeierstrassData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poly: Vec<String> = self
            .distinguished
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => signed_repr(c),
                1 => format!("{}*T", signed_repr(c)),
                _ => format!("{}*T^{i}", signed_repr(c)),
            })
            .collect();
        write!(f, "p^{} * ({}) * [{}]", self.mu, poly.join(" + "), self.unit)
    }
}

/// Weierstrass preparation by successive approximation.
pub fn weierstrass_prepare(f: &IwasawaSeries) -> Result<WeierstrassData> {
    let p = f.p;
    if f.is_zero() {
        return Err(Error::IndeterminateAtPrecision(
            "all visible coefficients vanish at working precision".into(),
        ));
    }
    if f.shift < 0 {
        return Err(Error::Invalid("series is not in Λ (negative content valuation)".into()));
    }
    let mu = f.shift;
    let prime = BigInt::from(p);
    let n = f
        .coeffs
        .iter()
        .position(|c| !(c % &prime).is_zero())
        .expect("normalised series has a unit coefficient");
    let t = f.t_prec();
    let fp = IwasawaSeries { p, shift: 0, coeffs: f.coeffs.clone(), prec: f.prec };
    if n == 0 {
        return Ok(WeierstrassData {
            mu,
            distinguished: vec![PadicNumber::one(p, f.prec)],
            unit: fp,
        });
    }
    if 2 * n > t {
        return Err(Error::IndeterminateAtPrecision(format!(
            "first unit coefficient at T^{n} needs T-precision at least {}, have {t}",
            2 * n
        )));
    }
    let mut low = fp.coeffs.clone();
    for c in low.iter_mut().skip(n) {
        *c = BigInt::zero();
    }
    let b = IwasawaSeries::normalized(p, 0, low, fp.prec);
    let h = fp.tau(n);
    let hinv = h.inverse()?;
    let one = IwasawaSeries::one(p, fp.prec, t - n);
    let mut q = hinv.clone();
    let bound = (fp.prec as usize + 2) * (t + 1);
    let mut converged = false;
    for _ in 0..bound {
        let mut padded = q.coeffs.clone();
        padded.resize(t + 1, BigInt::zero());
        let qp = IwasawaSeries { coeffs: padded, ..q.clone() };
        let next = hinv.mul(&one.sub(&qp.mul(&b).tau(n)));
        if next.eq_at_precision(&q) && next.abs_precision() >= q.abs_precision() {
            q = next;
            converged = true;
            break;
        }
        q = next;
    }
    if !converged {
        return Err(Error::IndeterminateAtPrecision("Weierstrass iteration did not settle".into()));
    }
    // f is only known mod T^{t+1}; coefficient i of q (and of the unit) is then known to
    // ⌊(t+1-i)/n⌋ - 1 digits. The unit keeps the coefficients known to half the best.
    let known = |i: usize| ((t + 1 - i) / n) as i64 - 1;
    let qf = q.mul(&fp);
    let mut poly: Vec<PadicNumber> = (0..n).map(|i| qf.coeff(i).truncate(known(n))).collect();
    poly.push(PadicNumber::one(p, fp.prec));
    let half = (known(0) / 2).min(fp.prec as i64);
    let keep = (t + 1).saturating_sub(n * (half as usize + 2)).min(t - n);
    let unit = q.inverse()?.truncate_t(keep).truncate_abs(known(keep));
    Ok(WeierstrassData { mu, distinguished: poly, unit })
}

/// An element of the fraction field of Λ in the form `T^r · num / den` with
/// `num(0)` and `den(0)` nonzero, or zero.
#[derive(Clone, Debug)]
pub struct LambdaFraction {
    t_order: i64,
    num: IwasawaSeries,
    den: IwasawaSeries,
    zero: bool,
}

impl LambdaFraction {
    pub fn zero(p: u64, t_prec: usize) -> Self {
        LambdaFraction {
            t_order: 0,
            num: IwasawaSeries::exact_zero(p, t_prec),
            den: IwasawaSeries::one(p, crate::padic::DEFAULT_PREC, t_prec),
            zero: true,
        }
    }

    pub fn one(p: u64, prec: u32, t_prec: usize) -> Self {
        Self::from_series(&IwasawaSeries::one(p, prec, t_prec))
    }

    pub fn from_series(f: &IwasawaSeries) -> Self {
        let one = IwasawaSeries::one(f.p, f.prec.max(1) + 64, f.t_prec());
        normalize_fraction(f, &one).unwrap_or_else(|_| Self::zero(f.p, f.t_prec()))
    }

    pub fn prime(&self) -> u64 {
        self.num.p
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn t_order(&self) -> i64 {
        self.t_order
    }

    pub fn numerator(&self) -> &IwasawaSeries {
        &self.num
    }

    pub fn denominator(&self) -> &IwasawaSeries {
        &self.den
    }

    pub fn t_prec(&self) -> usize {
        self.num.t_prec().min(self.den.t_prec())
    }

    /// `G(0) = F*(0)`.
    pub fn leading_coefficient(&self) -> Result<PadicNumber> {
        if self.zero {
            return Err(Error::IndeterminateAtPrecision("zero has no leading coefficient".into()));
        }
        self.num.coeff(0).div(&self.den.coeff(0))
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.zero || o.zero {
            return Self::zero(self.prime(), self.t_prec().min(o.t_prec()));
        }
        LambdaFraction {
            t_order: self.t_order + o.t_order,
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
            zero: false,
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.zero {
            return Err(Error::DivisionByZero);
        }
        Ok(LambdaFraction {
            t_order: -self.t_order,
            num: self.den.clone(),
            den: self.num.clone(),
            zero: false,
        })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        r.num = r.num.neg();
        r
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.zero {
            return o.clone();
        }
        if o.zero {
            return self.clone();
        }
        let r = self.t_order.min(o.t_order);
        let a = self.num.mul(&o.den).shift_up((self.t_order - r) as usize);
        let b = o.num.mul(&self.den).shift_up((o.t_order - r) as usize);
        let num = a.add(&b);
        let den = self.den.mul(&o.den);
        match num.t_order() {
            None => Self::zero(self.prime(), num.t_prec()),
            Some(k) => LambdaFraction {
                t_order: r + k as i64,
                num: num.shift_down(k).expect("leading zeros checked"),
                den,
                zero: false,
            },
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &PadicNumber) -> Self {
        if c.is_zero() {
            return Self::zero(self.prime(), self.t_prec());
        }
        let mut r = self.clone();
        r.num = r.num.scale(c);
        r
    }

    /// Equality by cross-multiplication at the available precision.
    pub fn eq_at_precision(&self, o: &Self) -> bool {
        match (self.zero, o.zero) {
            (true, true) => true,
            (false, false) => {
                self.t_order == o.t_order && self.num.mul(&o.den).eq_at_precision(&o.num.mul(&self.den))
            }
            _ => false,
        }
    }

    /// Digits of agreement of the normalised forms (`-1` when the orders differ).
    pub fn agreement(&self, o: &Self) -> i64 {
        if self.zero || o.zero || self.t_order != o.t_order {
            return -1;
        }
        self.num.mul(&o.den).agreement(&o.num.mul(&self.den))
    }

    /// `x^r · num(x) / den(x)` for `v(x) ≥ 1`.
    pub fn eval(&self, x: &PadicNumber) -> Result<PadicNumber> {
        if self.zero {
            return Ok(PadicNumber::zero(self.prime(), self.num.abs_precision()));
        }
        if x.is_zero() {
            return match self.t_order {
                r if r < 0 => Err(Error::PoleAtZero),
                0 => self.leading_coefficient(),
                _ => Ok(PadicNumber::zero(self.prime(), x.abs_precision())),
            };
        }
        let n = self.num.eval(x)?;
        let d = self.den.eval(x)?;
        Ok(n.div(&d)?.mul(&x.pow(self.t_order)?))
    }

    /// The series `G = num/den` in `Q_p[[T]]` (display only; precision may degrade).
    pub fn unit_series(&self) -> Result<IwasawaSeries> {
        let d0 = self.den.coeff(0);
        let d0inv = d0.inv()?;
        let den = self.den.scale(&d0inv);
        Ok(self.num.mul(&den.inverse()?).scale(&d0inv))
    }

    pub fn weierstrass(&self) -> Result<(WeierstrassData, WeierstrassData)> {
        Ok((weierstrass_prepare(&self.num)?, weierstrass_prepare(&self.den)?))
    }

    /// `F(a(1+T) - 1)` as a fraction (twist by a character of Γ).
    pub fn substitute_twist(&self, a: &PadicNumber) -> Result<Self> {
        if self.zero {
            return Ok(self.clone());
        }
        let p = self.prime();
        let t = self.t_prec();
        let lin = {
            let x = a.sub(&PadicNumber::one(p, a.rel_precision()));
            let mut v = vec![PadicNumber::exact_zero(p); t + 1];
            v[0] = x;
            v[1] = a.clone();
            IwasawaSeries::from_coeffs(p, v)
        };
        let mut num = self.num.substitute_twist(a)?;
        let mut den = self.den.substitute_twist(a)?;
        let factor = lin.truncate_t(num.t_prec().min(den.t_prec()));
        if self.t_order >= 0 {
            for _ in 0..self.t_order {
                num = num.mul(&factor);
            }
        } else {
            for _ in 0..(-self.t_order) {
                den = den.mul(&factor);
            }
        }
        normalize_fraction(&num, &den)
    }
}

impl PartialEq for LambdaFraction {
    fn eq(&self, o: &Self) -> bool {
        self.eq_at_precision(o)
    }
}

impl fmt::Display for LambdaFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            return write!(f, "0");
        }
        write!(f, "T^{} * ({}) / ({})", self.t_order, self.num, self.den)
    }
}

/// Puts `num/den` in the form `T^r · num'/den'` with nonzero constant terms.
pub fn normalize_fraction(num: &IwasawaSeries, den: &IwasawaSeries) -> Result<LambdaFraction> {
    let a = num
        .t_order()
        .ok_or_else(|| Error::IndeterminateAtPrecision("numerator vanishes at precision".into()))?;
    let b = den
        .t_order()
        .ok_or_else(|| Error::IndeterminateAtPrecision("denominator vanishes at precision".into()))?;
    Ok(LambdaFraction {
        t_order: a as i64 - b as i64,
        num: num.shift_down(a)?,
        den: den.shift_down(b)?,
        zero: false,
    })
}

/// `F(u^s - 1)`.
pub fn substitute_cyclotomic(f: &LambdaFraction, u: &PadicNumber, s: &PadicNumber) -> Result<PadicNumber> {
    let x = principal_pow(u, s)?.sub(&PadicNumber::one(u.prime(), u.rel_precision()));
    if s.is_zero() && f.t_order() < 0 {
        return Err(Error::PoleAtZero);
    }
    f.eval(&x)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u64 = 5;

    fn s(c: &[i64]) -> IwasawaSeries {
        IwasawaSeries::from_i64s(P, c, 30, 40)
    }

    #[test]
    fn product_of_conjugates() {
        assert_eq!(s(&[1, 1]).mul(&s(&[1, -1])), s(&[1, 0, -1]));
    }

    #[test]
    fn geometric_inverse() {
        let inv = s(&[1, 1]).inverse().unwrap();
        for k in 0..=40 {
            let expect = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(inv.coeff(k), PadicNumber::from_i64(P, expect, 30));
        }
        assert!(matches!(s(&[0, 1]).inverse(), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn weierstrass_examples() {
        let w = weierstrass_prepare(&s(&[0, 1])).unwrap();
        assert_eq!((w.mu, w.lambda()), (0, 1));
        assert_eq!(w.unit, s(&[1]));

        let w = weierstrass_prepare(&s(&[5, 5])).unwrap();
        assert_eq!((w.mu, w.lambda()), (1, 0));
        assert_eq!(w.unit, s(&[1, 1]));

        // (T^2 - 5)(1 + T) = -5 - 5T + T^2 + T^3
        let w = weierstrass_prepare(&s(&[-5, -5, 1, 1])).unwrap();
        assert_eq!((w.mu, w.lambda()), (0, 2));
        assert_eq!(w.distinguished[0], PadicNumber::from_i64(P, -5, 30));
        assert!(w.distinguished[1].is_zero());
        assert_eq!(w.unit, s(&[1, 1]).truncate_t(w.unit.t_prec()));
    }

    #[test]
    fn normalize_examples() {
        let f = normalize_fraction(&s(&[0, 0, 3, 1]), &s(&[1])).unwrap();
        assert_eq!(f.t_order(), 2);
        assert_eq!(f.leading_coefficient().unwrap(), PadicNumber::from_i64(P, 3, 30));
        let eps = s(&[2, 1, 3]);
        let f = normalize_fraction(&eps, &s(&[0, 1])).unwrap();
        assert_eq!(f.t_order(), -1);
        assert_eq!(f.leading_coefficient().unwrap(), PadicNumber::from_i64(P, 2, 30));
    }

    #[test]
    fn cyclotomic_substitution() {
        let t = LambdaFraction::from_series(&s(&[0, 1]));
        let u = PadicNumber::from_i64(P, 6, 30);
        let one = PadicNumber::from_i64(P, 1, 30);
        assert_eq!(substitute_cyclotomic(&t, &u, &one).unwrap(), PadicNumber::from_i64(P, 5, 30));
        let inv_t = t.inv().unwrap();
        let zero = PadicNumber::zero(P, 30);
        assert_eq!(substitute_cyclotomic(&inv_t, &u, &zero), Err(Error::PoleAtZero));
    }
}
