//! Elements of Q_p with tracked precision.
//!
//! A nonzero value is `p^val * unit` with `unit` known modulo `p^prec`, so its
//! absolute precision is `val + prec`. A zero carries only an absolute precision.

use std::cell::RefCell;
use std::cmp::{min, Ordering};
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_PREC: u32 = 30;
pub const PRECISION_FLOOR: u32 = 5;
/// Absolute precision carried by structural zeros (matrix padding, exact literals).
pub const EXACT: i64 = 1 << 40;

thread_local! {
    static POWERS: RefCell<HashMap<u64, Vec<BigInt>>> = RefCell::new(HashMap::new());
}

/// `p^k`, cached per thread.
pub fn p_pow(p: u64, k: u32) -> BigInt {
    POWERS.with(|cell| {
        let mut map = cell.borrow_mut();
        let v = map.entry(p).or_insert_with(|| vec![BigInt::one()]);
        while v.len() <= k as usize {
            let next = v.last().unwrap() * p;
            v.push(next);
        }
        v[k as usize].clone()
    })
}

/// Splits a nonzero integer as `p^k * u` with `p ∤ u`.
pub fn split_p(p: u64, x: &BigInt) -> (u32, BigInt) {
    debug_assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut k = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&pb);
        if !r.is_zero() {
            return (k, y);
        }
        y = q;
        k += 1;
    }
}

pub fn v_p_int(p: u64, x: i64) -> u32 {
    if x == 0 {
        return u32::MAX;
    }
    let mut x = x.unsigned_abs();
    let mut k = 0;
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    k
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

#[derive(Clone, Debug)]
pub struct PadicNumber {
    p: u64,
    val: i64,
    unit: BigInt,
    prec: u32,
}

impl PadicNumber {
    pub fn zero(p: u64, abs: i64) -> Self {
        PadicNumber { p, val: abs.min(EXACT), unit: BigInt::zero(), prec: 0 }
    }

    pub fn exact_zero(p: u64) -> Self {
        Self::zero(p, EXACT)
    }

    /// The value `x * p^val` known modulo `p^abs`.
    fn from_parts(p: u64, val: i64, x: BigInt, abs: i64) -> Self {
        if abs <= val || x.is_zero() {
            return Self::zero(p, abs);
        }
        let m = (abs - val) as u32;
        let x = x.mod_floor(&p_pow(p, m));
        if x.is_zero() {
            return Self::zero(p, abs);
        }
        let (k, u) = split_p(p, &x);
        PadicNumber { p, val: val + k as i64, unit: u, prec: m - k }
    }

    /// An integer with `prec` digits of relative precision.
    pub fn from_bigint(p: u64, x: &BigInt, prec: u32) -> Self {
        if x.is_zero() {
            return Self::zero(p, prec as i64);
        }
        let (k, u) = split_p(p, x);
        PadicNumber { p, val: k as i64, unit: u.mod_floor(&p_pow(p, prec)), prec }
    }

    pub fn from_i64(p: u64, x: i64, prec: u32) -> Self {
        Self::from_bigint(p, &BigInt::from(x), prec)
    }

    pub fn from_rational(p: u64, num: &BigInt, den: &BigInt, prec: u32) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero(p, prec as i64));
        }
        let (a, ua) = split_p(p, num);
        let (b, ub) = split_p(p, den);
        let m = p_pow(p, prec);
        let inv = mod_inverse(&ub.mod_floor(&m), &m).ok_or(Error::DivisionByZero)?;
        Ok(PadicNumber {
            p,
            val: a as i64 - b as i64,
            unit: (ua * inv).mod_floor(&m),
            prec,
        })
    }

    pub fn one(p: u64, prec: u32) -> Self {
        PadicNumber { p, val: 0, unit: BigInt::one(), prec }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    /// Valuation, or the absolute precision for a zero.
    pub fn val_or_abs(&self) -> i64 {
        self.val
    }

    pub fn abs_precision(&self) -> i64 {
        if self.is_zero() {
            self.val
        } else {
            self.val + self.prec as i64
        }
    }

    pub fn rel_precision(&self) -> u32 {
        self.prec
    }

    pub fn unit_digits(&self) -> &BigInt {
        &self.unit
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.val == 0
    }

    pub fn is_integral(&self) -> bool {
        self.val >= 0
    }

    /// Reduces the absolute precision to at most `abs`.
    pub fn truncate(&self, abs: i64) -> Self {
        if abs >= self.abs_precision() {
            return self.clone();
        }
        if self.is_zero() || abs <= self.val {
            return Self::zero(self.p, abs);
        }
        let prec = (abs - self.val) as u32;
        PadicNumber {
            p: self.p,
            val: self.val,
            unit: self.unit.mod_floor(&p_pow(self.p, prec)),
            prec,
        }
    }

    /// Caps the relative precision.
    pub fn with_rel_precision(&self, prec: u32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.truncate(self.val + prec as i64)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let m = p_pow(self.p, self.prec);
        PadicNumber { p: self.p, val: self.val, unit: &m - &self.unit, prec: self.prec }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        let abs = min(self.abs_precision(), o.abs_precision());
        let a_live = !self.is_zero() && self.val < abs;
        let b_live = !o.is_zero() && o.val < abs;
        match (a_live, b_live) {
            (false, false) => Self::zero(self.p, abs),
            (true, false) => self.truncate(abs),
            (false, true) => o.truncate(abs),
            (true, true) => {
                let m = min(self.val, o.val);
                let x = &self.unit * p_pow(self.p, (self.val - m) as u32)
                    + &o.unit * p_pow(self.p, (o.val - m) as u32);
                Self::from_parts(self.p, m, x, abs)
            }
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        if self.is_zero() || o.is_zero() {
            let abs = (self.val + o.val).min(EXACT);
            return Self::zero(self.p, abs);
        }
        let prec = min(self.prec, o.prec);
        let unit = (&self.unit * &o.unit).mod_floor(&p_pow(self.p, prec));
        PadicNumber { p: self.p, val: self.val + o.val, unit, prec }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = p_pow(self.p, self.prec);
        let unit = mod_inverse(&self.unit, &m).ok_or(Error::DivisionByZero)?;
        Ok(PadicNumber { p: self.p, val: -self.val, unit, prec: self.prec })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.p, (self.val - o.val).min(EXACT)));
        }
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        if k == 0 {
            return Ok(Self::one(self.p, self.prec.max(1)));
        }
        if self.is_zero() {
            return Ok(Self::zero(self.p, (self.val * k).min(EXACT)));
        }
        let mut result = Self::one(self.p, self.prec);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Ok(result)
    }

    /// Multiplies by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut r = self.clone();
        r.val = (r.val + k).min(EXACT);
        r
    }

    pub fn scale_i64(&self, c: i64) -> Self {
        self.mul(&Self::from_i64(self.p, c, self.prec.max(1) + 64))
    }

    /// `p`-adic distance exponent: `v(self - o)`, or the joint precision if they agree.
    pub fn agreement(&self, o: &Self) -> i64 {
        self.sub(o).val
    }

    /// Number of digits past the leading digit of `self` on which `self` and `o` agree.
    pub fn relative_agreement(&self, o: &Self) -> i64 {
        let base = if self.is_zero() { 0 } else { self.val };
        self.agreement(o) - base
    }

    /// Representative in `[0, p^abs)` when the value is integral.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        if self.val < 0 {
            return None;
        }
        Some(&self.unit * p_pow(self.p, self.val as u32))
    }

    /// Residue modulo `p^k` of an integral value.
    pub fn residue(&self, k: u32) -> Option<BigInt> {
        self.to_integer().map(|x| x.mod_floor(&p_pow(self.p, k)))
    }

    /// Small rational `a/b` congruent to the value at its precision, if one exists.
    pub fn rational_reconstruction(&self) -> Option<(BigInt, BigInt)> {
        if self.is_zero() {
            return Some((BigInt::zero(), BigInt::one()));
        }
        let m = p_pow(self.p, self.prec);
        let bound = m.sqrt() / 2;
        let (mut r0, mut r1) = (m.clone(), self.unit.clone());
        let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
        while r1 > bound {
            let q = &r0 / &r1;
            let r2 = &r0 - &q * &r1;
            let t2 = &t0 - &q * &t1;
            r0 = r1;
            r1 = r2;
            t0 = t1;
            t1 = t2;
        }
        if t1.is_zero() || t1.abs() > bound {
            return None;
        }
        let (mut a, mut b) = (r1, t1);
        if b.is_negative() {
            a = -a;
            b = -b;
        }
        if self.val >= 0 {
            a *= p_pow(self.p, self.val as u32);
        } else {
            b *= p_pow(self.p, (-self.val) as u32);
        }
        let g = a.gcd(&b);
        Some((a / &g, b / g))
    }

    pub fn check_floor(&self, floor: u32) -> Result<()> {
        if !self.is_zero() && self.prec < floor {
            return Err(Error::PrecisionExhausted(format!(
                "{} digits left, floor {}",
                self.prec, floor
            )));
        }
        Ok(())
    }
}

impl PartialEq for PadicNumber {
    /// Agreement modulo the smaller of the two absolute precisions.
    fn eq(&self, o: &Self) -> bool {
        self.p == o.p && self.sub(o).is_zero()
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0, mod {}^{}", self.p, self.val)
        } else {
            write!(f, "v={}, unit={}, mod {}^{}", self.val, self.unit, self.p, self.prec)
        }
    }
}

impl PadicNumber {
    /// `x/y` rendered exactly when a small rational matches, else the digit form.
    pub fn pretty(&self) -> String {
        match self.rational_reconstruction() {
            Some((a, b)) if b.is_one() => format!("{a} ({self})"),
            Some((a, b)) => format!("{a}/{b} ({self})"),
            None => self.to_string(),
        }
    }
}

/// Teichmüller representative: the `(p-1)`-st root of unity congruent to `a` mod `p`.
pub fn teichmuller(a: &PadicNumber) -> Result<PadicNumber> {
    if !a.is_unit() {
        return Err(Error::NotAUnit(a.to_string()));
    }
    let p = a.p;
    let prec = a.prec;
    let m = p_pow(p, prec);
    let e = p_pow(p, prec.saturating_sub(1));
    let w = a.unit.modpow(&e, &m);
    Ok(PadicNumber { p, val: 0, unit: w, prec })
}

/// Smallest generator of `(Z/p)^×`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let n = p - 1;
    let mut factors = Vec::new();
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    let pb = BigInt::from(p);
    (2..p)
        .find(|&g| factors.iter().all(|&q| !BigInt::from(g).modpow(&BigInt::from(n / q), &pb).is_one()))
        .expect("a primitive root exists")
}

/// Order of the group of roots of unity in `Z_p`.
pub fn root_order(p: u64) -> u64 {
    if p == 2 {
        2
    } else {
        p - 1
    }
}

/// `ζ^k` for the fixed generator `ζ` of the roots of unity in `Z_p`:
/// `ζ = ω(g)` for the least primitive root `g`, and `ζ = -1` when `p = 2`.
pub fn root_of_unity(p: u64, k: i64, prec: u32) -> PadicNumber {
    let m = root_order(p) as i64;
    let k = k.rem_euclid(m);
    if p == 2 {
        return PadicNumber::from_i64(p, if k == 0 { 1 } else { -1 }, prec);
    }
    let z = teichmuller(&PadicNumber::from_i64(p, primitive_root(p) as i64, prec)).expect("unit");
    z.pow(k).expect("unit power")
}

/// `⟨a⟩ = a / ω(a)`, a principal unit.
pub fn principal_part(a: &PadicNumber) -> Result<PadicNumber> {
    a.div(&teichmuller(a)?)
}

fn log_principal(x: &PadicNumber) -> Result<PadicNumber> {
    let p = x.p;
    let one = PadicNumber::one(p, x.prec);
    let y = x.sub(&one);
    let target = x.abs_precision();
    if y.is_zero() {
        return Ok(PadicNumber::zero(p, target));
    }
    let vy = y.val;
    if vy < 1 {
        return Err(Error::Invalid("logarithm series needs x ≡ 1 mod p".into()));
    }
    let mut sum = PadicNumber::zero(p, target);
    let mut power = y.clone();
    let mut k: i64 = 1;
    loop {
        let lower = k * vy - log_p_floor(p, k);
        if k > 1 && lower >= target {
            break;
        }
        let term = power.div(&PadicNumber::from_i64(p, k, x.prec + 64))?;
        sum = if k % 2 == 1 { sum.add(&term) } else { sum.sub(&term) };
        power = power.mul(&y);
        k += 1;
    }
    Ok(sum.truncate(target))
}

fn log_p_floor(p: u64, k: i64) -> i64 {
    let mut e = 0;
    let mut q = p as i64;
    while q <= k {
        e += 1;
        q = q.saturating_mul(p as i64);
    }
    e
}

/// `log_p⟨u⟩` for a unit `u`.
pub fn iwasawa_log(u: &PadicNumber) -> Result<PadicNumber> {
    if !u.is_unit() {
        return Err(Error::NotAUnit(u.to_string()));
    }
    log_principal(&principal_part(u)?)
}

/// `exp(y)` for `v(y) ≥ 1`.
pub fn padic_exp(y: &PadicNumber) -> Result<PadicNumber> {
    let p = y.p;
    if y.is_zero() {
        return Ok(PadicNumber::one(p, y.abs_precision().clamp(1, u32::MAX as i64) as u32));
    }
    if y.val < 1 {
        return Err(Error::Invalid("exponential series needs v(y) ≥ 1".into()));
    }
    let target = y.abs_precision();
    let rel = target.max(1) as u32;
    let mut sum = PadicNumber::one(p, rel);
    let mut term = PadicNumber::one(p, rel + 64);
    let mut k: i64 = 1;
    loop {
        // v(y^k / k!) ≥ k v(y) - (k - 1)/(p - 1)
        let lower = k * y.val - (k - 1) / (p as i64 - 1);
        if lower >= target + 1 {
            break;
        }
        term = term.mul(y).div(&PadicNumber::from_i64(p, k, rel + 64))?;
        sum = sum.add(&term);
        k += 1;
    }
    Ok(sum.truncate(target))
}

/// `u^s = exp(s log u)` for a principal unit `u` and `s ∈ Z_p`.
pub fn principal_pow(u: &PadicNumber, s: &PadicNumber) -> Result<PadicNumber> {
    let d = u.sub(&PadicNumber::one(u.p, u.prec));
    if !d.is_zero() && d.val < 1 {
        return Err(Error::Invalid("u must be ≡ 1 mod p".into()));
    }
    padic_exp(&s.mul(&log_principal(u)?))
}

/// Square root of a unit by Newton iteration from `seed`, a square root mod `p`.
pub fn hensel_sqrt(a: &PadicNumber, seed: i64) -> Result<PadicNumber> {
    let p = a.p;
    if !a.is_unit() {
        return Err(Error::NotAUnit(a.to_string()));
    }
    let a_res = a.residue(1).unwrap().to_i64().unwrap();
    let euler = BigInt::from(a_res).modpow(&BigInt::from((p - 1) / 2), &BigInt::from(p));
    if !euler.is_one() {
        return Err(Error::NotASquare(format!("{a_res} is a non-residue mod {p}")));
    }
    if (seed * seed - a_res).rem_euclid(p as i64) != 0 {
        return Err(Error::NotASquare(format!("seed {seed} does not square to {a_res} mod {p}")));
    }
    let prec = a.prec;
    let half = PadicNumber::from_rational(p, &BigInt::one(), &BigInt::from(2), prec)?;
    let mut x = PadicNumber::from_i64(p, seed, prec);
    let mut digits = 1u32;
    while digits < prec {
        x = x.add(&a.div(&x)?).mul(&half);
        digits *= 2;
    }
    x = x.add(&a.div(&x)?).mul(&half);
    Ok(x)
}

impl PartialOrd for PadicNumber {
    /// Orders by valuation only; used for pivot choice.
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.val_or_abs().cmp(&o.val_or_abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(p: u64, x: i64) -> PadicNumber {
        PadicNumber::from_i64(p, x, DEFAULT_PREC)
    }

    #[test]
    fn valuation_of_p_squared_times_three() {
        let x = n(5, 75);
        assert_eq!(x.valuation(), Some(2));
        assert_eq!(x.unit_digits(), &BigInt::from(3));
    }

    #[test]
    fn half_mod_125() {
        let h = n(5, 1).div(&n(5, 2)).unwrap();
        assert_eq!(h.residue(3).unwrap(), BigInt::from(63));
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(n(5, 1).div(&PadicNumber::zero(5, 30)), Err(Error::DivisionByZero));
    }

    #[test]
    fn division_costs_precision() {
        let x = n(5, 7).div(&n(5, 25)).unwrap();
        assert_eq!(x.valuation(), Some(-2));
        assert_eq!(x.abs_precision(), 28);
    }

    #[test]
    fn cancellation_is_tracked() {
        let a = n(7, 1 + 7 * 7 * 7);
        let b = n(7, 1);
        let d = a.sub(&b);
        assert_eq!(d.valuation(), Some(3));
        assert_eq!(d.abs_precision(), 30);
        assert_eq!(d.rel_precision(), 27);
    }

    #[test]
    fn teichmuller_of_two_mod_25() {
        let w = teichmuller(&n(5, 2)).unwrap();
        assert_eq!(w.residue(2).unwrap(), BigInt::from(7));
        assert_eq!(w.pow(4).unwrap(), n(5, 1));
        assert_eq!(teichmuller(&n(5, 1)).unwrap(), n(5, 1));
    }

    #[test]
    fn log_of_one_is_zero() {
        assert!(iwasawa_log(&n(7, 1)).unwrap().is_zero());
    }

    #[test]
    fn hensel_examples() {
        let r = hensel_sqrt(&n(7, 2), 3).unwrap();
        assert_eq!(r.mul(&r), n(7, 2));
        assert_eq!(r.residue(1).unwrap(), BigInt::from(3));
        assert_eq!(hensel_sqrt(&n(7, 4), 2).unwrap(), n(7, 2));
        assert!(matches!(hensel_sqrt(&n(7, 3), 1), Err(Error::NotASquare(_))));
    }

    #[test]
    fn rational_reconstruction_recovers_sixth() {
        let x = n(3, 1).div(&n(3, 6)).unwrap();
        let (a, b) = x.rational_reconstruction().unwrap();
        assert_eq!((a, b), (BigInt::from(1), BigInt::from(6)));
    }
}
