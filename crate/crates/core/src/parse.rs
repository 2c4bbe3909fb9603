//! Literals for series and group-ring elements: integers, rationals, `p`, `T`,
//! group generators `g0, g1, …`, with `+ - * / ^` and parentheses.
//!
//! ```
//! use iwasawa_descent::parse::parse_poly;
//! let f = parse_poly("(1 - g0) + p*T*g1", 5).unwrap();
//! assert_eq!(f.terms.len(), 3);
//! ```

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::padic::PadicNumber;
use crate::series::IwasawaSeries;

/// `T^t · Π g_k^{e_k}`; trailing zero exponents are trimmed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub t: u32,
    pub g: Vec<u32>,
}

impl Monomial {
    fn one() -> Self {
        Monomial { t: 0, g: vec![] }
    }

    fn mul(&self, o: &Self) -> Self {
        let n = self.g.len().max(o.g.len());
        let mut g: Vec<u32> = (0..n).map(|i| self.g.get(i).unwrap_or(&0) + o.g.get(i).unwrap_or(&0)).collect();
        while g.last() == Some(&0) {
            g.pop();
        }
        Monomial { t: self.t + o.t, g }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    pub terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    fn monomial(m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, BigRational::one());
        Poly { terms }
    }

    fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            let e = terms.entry(m.clone()).or_insert_with(BigRational::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(m);
            }
        }
        Poly { terms }
    }

    fn neg(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out = Poly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out = out.add(&Poly { terms: [(m1.mul(m2), c1 * c2)].into_iter().collect() });
            }
        }
        out
    }

    fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// Largest generator index used, plus one.
    pub fn generators(&self) -> usize {
        self.terms.keys().map(|m| m.g.len()).max().unwrap_or(0)
    }

    /// Coefficient series of each group element: `g` exponents reduced modulo `orders`.
    pub fn group_components(&self, p: u64, prec: u32, t_prec: usize, orders: &[u64]) -> Result<BTreeMap<Vec<u64>, IwasawaSeries>> {
        if self.generators() > orders.len() {
            return Err(Error::Parse(format!("generator g{} is not in the group", self.generators() - 1)));
        }
        let mut acc: BTreeMap<Vec<u64>, Vec<PadicNumber>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u64> = (0..orders.len()).map(|i| *m.g.get(i).unwrap_or(&0) as u64 % orders[i]).collect();
            if m.t as usize > t_prec {
                continue;
            }
            let x = PadicNumber::from_rational(p, c.numer(), c.denom(), prec)?;
            let v = acc.entry(key).or_insert_with(|| vec![PadicNumber::exact_zero(p); t_prec + 1]);
            v[m.t as usize] = v[m.t as usize].add(&x);
        }
        Ok(acc.into_iter().map(|(k, v)| (k, IwasawaSeries::from_coeffs(p, v))).collect())
    }

    /// The series, rejecting group generators.
    pub fn to_series(&self, p: u64, prec: u32, t_prec: usize) -> Result<IwasawaSeries> {
        if self.generators() > 0 {
            return Err(Error::Parse("group generators in a plain series".into()));
        }
        let comps = self.group_components(p, prec, t_prec, &[])?;
        Ok(comps.into_values().next().unwrap_or_else(|| IwasawaSeries::exact_zero(p, t_prec)))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    P,
    T,
    G(u32),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let txt: String = chars[st..i].iter().collect();
            out.push(Tok::Num(txt.parse().map_err(|_| Error::Parse(txt.clone()))?));
        } else if c == 'p' {
            out.push(Tok::P);
            i += 1;
        } else if c == 'T' {
            out.push(Tok::T);
            i += 1;
        } else if c == 'g' {
            i += 1;
            let st = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if st == i {
                return Err(Error::Parse(format!("generator without index in {:?}", s)));
            }
            let txt: String = chars[st..i].iter().collect();
            out.push(Tok::G(txt.parse().map_err(|_| Error::Parse(txt.clone()))?));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected {:?} in {:?}", c, s)));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    p: u64,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = if self.eat('-') { self.term()?.neg() } else { self.term()? };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.add(&self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power()?);
            } else if self.eat('/') {
                let d = self.power()?.as_constant().ok_or_else(|| Error::Parse("division by a non-constant".into()))?;
                if d.is_zero() {
                    return Err(Error::Parse("division by zero".into()));
                }
                acc = acc.mul(&Poly::constant(d.recip()));
            } else if matches!(self.peek(), Some(Tok::P | Tok::T | Tok::G(_)) | Some(Tok::Op('('))) {
                // juxtaposition such as 2T or 3(1+T)
                acc = acc.mul(&self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let e = match self.toks.get(self.pos) {
                Some(Tok::Num(n)) => n.to_u32().ok_or_else(|| Error::Parse("exponent too large".into()))?,
                _ => return Err(Error::Parse("exponent must be an integer".into())),
            };
            self.pos += 1;
            let mut acc = Poly::constant(BigRational::one());
            for _ in 0..e {
                acc = acc.mul(&base);
            }
            if neg {
                let c = acc.as_constant().ok_or_else(|| Error::Parse("negative power of a non-constant".into()))?;
                if c.is_zero() {
                    return Err(Error::Parse("division by zero".into()));
                }
                acc = Poly::constant(c.recip());
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        let t = self.toks.get(self.pos).cloned().ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        match t {
            Tok::Num(n) => Ok(Poly::constant(BigRational::from_integer(n))),
            Tok::P => Ok(Poly::constant(BigRational::from_integer(BigInt::from(self.p)))),
            Tok::T => Ok(Poly::monomial(Monomial { t: 1, g: vec![] })),
            Tok::G(k) => {
                let mut g = vec![0; k as usize + 1];
                g[k as usize] = 1;
                Ok(Poly::monomial(Monomial { t: 0, g }))
            }
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Tok::Op('-') => Ok(self.power()?.neg()),
            Tok::Op(c) => Err(Error::Parse(format!("unexpected '{}'", c))),
        }
    }
}

pub fn parse_poly(s: &str, p: u64) -> Result<Poly> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut ps = Parser { toks, pos: 0, p };
    let e = ps.expr()?;
    if ps.pos != ps.toks.len() {
        return Err(Error::Parse(format!("trailing input in {:?}", s)));
    }
    Ok(e)
}

pub fn parse_series(s: &str, p: u64, prec: u32, t_prec: usize) -> Result<IwasawaSeries> {
    parse_poly(s, p)?.to_series(p, prec, t_prec)
}

/// Parses an integer or a fraction such as `-3/4`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let e = parse_poly(s, 0)?;
    e.as_constant().ok_or_else(|| Error::Parse(format!("{:?} is not a number", s)))
}

/// Renders a rational for reports.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else if q.is_negative() {
        format!("-{}/{}", -q.numer(), q.denom())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_literals() {
        let f = parse_series("1 + 2*T", 5, 20, 10).unwrap();
        assert_eq!(f, IwasawaSeries::from_i64s(5, &[1, 2], 20, 10));
        let g = parse_series("(1+T)^2 - p*T^3", 5, 20, 10).unwrap();
        assert_eq!(g, IwasawaSeries::from_i64s(5, &[1, 2, 1, -5], 20, 10));
        let h = parse_series("1/2*T", 5, 20, 10).unwrap();
        assert_eq!(h.coeff(1).scale_i64(2), PadicNumber::from_i64(5, 1, 20));
    }

    #[test]
    fn group_ring_literal() {
        let f = parse_poly("(1 - g0) + p*T*g1", 7).unwrap();
        let comps = f.group_components(7, 20, 5, &[2, 3]).unwrap();
        assert_eq!(comps.len(), 3);
        assert_eq!(comps[&vec![1, 0]], IwasawaSeries::from_i64s(7, &[-1], 20, 5));
        assert_eq!(comps[&vec![0, 1]], IwasawaSeries::from_i64s(7, &[0, 7], 20, 5));
    }

    #[test]
    fn errors() {
        assert!(parse_poly("1 +", 5).is_err());
        assert!(parse_poly("T / T", 5).is_err());
        assert!(parse_poly("x", 5).is_err());
        assert!(parse_series("g0", 5, 10, 5).is_err());
    }
}
