use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::padic::{primitive_root, root_of_unity, root_order, PadicNumber};

/// A Dirichlet character whose values are roots of unity of order dividing `order`.
///
/// `table[a]` is `Some(e)` with `χ(a) = ζ_order^e` when `gcd(a, modulus) = 1`. Characters built
/// from the Teichmüller character remember their prime, and `ζ_order` is then the power
/// of the generator from [`root_of_unity`]; for other characters the values are `±1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    order: u64,
    table: Vec<Option<u64>>,
    prime: Option<u64>,
}

/// Kronecker symbol `(d/n)` for `n ≥ 1`.
pub fn kronecker(d: i64, n: u64) -> i64 {
    let mut n = n;
    let mut result = 1i64;
    while n % 2 == 0 {
        n /= 2;
        if d % 2 == 0 {
            return 0;
        }
        if d.rem_euclid(8) == 3 || d.rem_euclid(8) == 5 {
            result = -result;
        }
    }
    // Jacobi symbol (d/n) for odd n
    let mut a = d.rem_euclid(n as i64) as u64;
    let mut m = n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if m % 8 == 3 || m % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// Whether `d` is a fundamental discriminant.
pub fn is_fundamental(d: i64) -> bool {
    let squarefree = |m: i64| {
        let m = m.unsigned_abs();
        (2..).take_while(|k| k * k <= m).all(|k| m % (k * k) != 0)
    };
    if d == 1 {
        return true;
    }
    match d.rem_euclid(4) {
        1 => squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
        }
        _ => false,
    }
}

impl DirichletCharacter {
    pub fn trivial() -> Self {
        DirichletCharacter { modulus: 1, order: 1, table: vec![Some(0)], prime: None }
    }

    /// `a ↦ (d/a)` for a fundamental discriminant `d`.
    pub fn quadratic(d: i64) -> Result<Self> {
        if !is_fundamental(d) {
            return Err(Error::Invalid(format!("{d} is not a fundamental discriminant")));
        }
        if d == 1 {
            return Ok(Self::trivial());
        }
        let f = d.unsigned_abs();
        let table = (0..f)
            .map(|a| match if a == 0 { 0 } else { kronecker(d, a) } {
                0 => None,
                1 => Some(0),
                _ => Some(1),
            })
            .collect();
        Ok(DirichletCharacter { modulus: f, order: 2, table, prime: None })
    }

    /// The primitive quadratic character of conductor `f`, the even one when both exist.
    pub fn quadratic_of_conductor(f: u64) -> Result<Self> {
        let f = f as i64;
        if is_fundamental(f) {
            Self::quadratic(f)
        } else if is_fundamental(-f) {
            Self::quadratic(-f)
        } else {
            Err(Error::Invalid(format!("no primitive quadratic character of conductor {f}")))
        }
    }

    /// `ω^k` for the Teichmüller character of `p` (of conductor 4 when `p = 2`).
    pub fn omega_power(p: u64, k: i64) -> Self {
        if p == 2 {
            let table = vec![None, Some(0), None, Some(k.rem_euclid(2) as u64)];
            return DirichletCharacter { modulus: 4, order: 2, table, prime: Some(2) };
        }
        let m = root_order(p);
        let g = primitive_root(p);
        let mut table = vec![None; p as usize];
        let mut x = 1u64;
        for j in 0..m {
            table[x as usize] = Some(((j as i64 * k).rem_euclid(m as i64)) as u64);
            x = x * g % p;
        }
        DirichletCharacter { modulus: p, order: m, table, prime: Some(p) }
    }

    /// Parses `mod=8; kind=quadratic`, `mod=5; kind=omega^2`, `mod=1`, `d=-4`.
    pub fn parse(s: &str, p: u64) -> Result<Self> {
        let mut modulus: Option<u64> = None;
        let mut kind = None;
        let mut disc: Option<i64> = None;
        for part in s.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value in {part:?}")))?;
            let v = v.trim();
            match k.trim() {
                "mod" => {
                    let m = if v == "p" { p } else { v.parse().map_err(|_| Error::Parse(format!("bad modulus {v:?}")))? };
                    modulus = Some(m);
                }
                "kind" => kind = Some(v.to_string()),
                "d" => disc = Some(v.parse().map_err(|_| Error::Parse(format!("bad discriminant {v:?}")))?),
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        if let Some(d) = disc {
            return Self::quadratic(d);
        }
        let modulus = modulus.ok_or_else(|| Error::Parse("missing mod".into()))?;
        match kind.as_deref() {
            Some("trivial") => Ok(Self::trivial()),
            None if modulus == 1 => Ok(Self::trivial()),
            None | Some("quadratic") => Self::quadratic_of_conductor(modulus),
            Some(k) if k.starts_with("omega") => {
                let e = match k.strip_prefix("omega").unwrap() {
                    "" => 1,
                    rest => rest
                        .trim_start_matches('^')
                        .trim_matches(|c| c == '(' || c == ')')
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad exponent in {k:?}")))?,
                };
                let expected = if p == 2 { 4 } else { p };
                if modulus != expected {
                    return Err(Error::UnsupportedCharacterOrder {
                        p,
                        detail: format!("the Teichmüller character of {p} has modulus {expected}, not {modulus}"),
                    });
                }
                Ok(Self::omega_power(p, e))
            }
            Some(k) => Err(Error::Parse(format!("unknown character kind {k:?}"))),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn prime(&self) -> Option<u64> {
        self.prime
    }

    /// `e` with `χ(a) = ζ_order^e`, or `None` when `gcd(a, modulus) > 1`.
    pub fn index(&self, a: i64) -> Option<u64> {
        self.table[a.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn is_trivial(&self) -> bool {
        self.table.iter().all(|v| v.map_or(true, |e| e == 0))
    }

    pub fn is_even(&self) -> bool {
        self.index(-1) == Some(0)
    }

    /// Whether all values are `0` or `±1`.
    pub fn is_rational(&self) -> bool {
        self.table.iter().flatten().all(|&e| 2 * e % self.order == 0)
    }

    /// `χ(a)` as an integer when it is `0` or `±1`.
    pub fn value_int(&self, a: i64) -> Option<i64> {
        match self.index(a) {
            None => Some(0),
            Some(0) => Some(1),
            Some(e) if 2 * e == self.order => Some(-1),
            _ => None,
        }
    }

    fn check_prime(&self, p: u64) -> Result<()> {
        if let Some(q) = self.prime {
            if q != p {
                return Err(Error::UnsupportedCharacterOrder { p, detail: format!("character built from ω of {q}") });
            }
        }
        if root_order(p) % self.order != 0 {
            return Err(Error::UnsupportedCharacterOrder { p, detail: format!("values of order {} are not in Z_{p}", self.order) });
        }
        Ok(())
    }

    /// `ζ_order^e` in `Z_p`.
    pub fn root(&self, e: u64, p: u64, prec: u32) -> Result<PadicNumber> {
        self.check_prime(p)?;
        Ok(root_of_unity(p, (e * (root_order(p) / self.order)) as i64, prec))
    }

    /// `χ(a)` in `Z_p`.
    pub fn value_padic(&self, a: i64, p: u64, prec: u32) -> Result<PadicNumber> {
        match self.index(a) {
            None => Ok(PadicNumber::exact_zero(p)),
            Some(e) => self.root(e, p, prec),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let prime = match (self.prime, o.prime) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Invalid("product of Teichmüller powers for different primes".into()));
            }
            (a, b) => a.or(b),
        };
        let modulus = self.modulus.lcm(&o.modulus);
        let order = self.order.lcm(&o.order);
        let (sa, sb) = (order / self.order, order / o.order);
        let table = (0..modulus as i64)
            .map(|a| match (self.index(a), o.index(a)) {
                (Some(x), Some(y)) => Some((x * sa + y * sb) % order),
                _ => None,
            })
            .collect();
        Ok(DirichletCharacter { modulus, order, table, prime }.reduce_order())
    }

    pub fn pow(&self, k: i64) -> Self {
        let table = self.table.iter().map(|v| v.map(|e| ((e as i64 * k).rem_euclid(self.order as i64)) as u64)).collect();
        DirichletCharacter { table, ..self.clone() }.reduce_order()
    }

    /// Shrinks `order` to the exact order of the character, keeping the prime tag only
    /// when a value is not `±1`.
    fn reduce_order(mut self) -> Self {
        let g = self.table.iter().flatten().fold(self.order, |acc, &e| acc.gcd(&e));
        let g = if g == 0 { self.order } else { g };
        let new = self.order / g;
        for v in self.table.iter_mut().flatten() {
            *v /= g;
        }
        self.order = new.max(1);
        if self.order <= 2 {
            self.prime = None;
        }
        self
    }

    pub fn conductor(&self) -> u64 {
        let n = self.modulus;
        let mut divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
        divisors.sort_unstable();
        for f in divisors {
            let ok = (0..n as i64).all(|a| match self.index(a) {
                Some(e) if a as u64 % f == 1 % f => e == 0,
                _ => true,
            });
            if ok {
                return f;
            }
        }
        n
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Self {
        let f = self.conductor();
        if f == self.modulus {
            return self.clone();
        }
        let table = (0..f)
            .map(|b| {
                if b.gcd(&f) != 1 {
                    return None;
                }
                (0..self.modulus / f).map(|k| (b + k * f) as i64).find_map(|a| self.index(a))
            })
            .collect();
        DirichletCharacter { modulus: f, table, ..self.clone() }.reduce_order()
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() && self.modulus == 1 {
            return write!(f, "trivial");
        }
        let vals: Vec<String> = (1..self.modulus as i64)
            .filter_map(|a| {
                self.index(a).map(|e| match self.value_int(a) {
                    Some(v) => format!("{a}:{v}"),
                    None => format!("{a}:ζ{}^{e}", self.order),
                })
            })
            .collect();
        write!(f, "mod {} [{}]", self.modulus, vals.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_values() {
        assert_eq!(kronecker(8, 3), -1);
        assert_eq!(kronecker(8, 7), 1);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(12, 11), 1);
        assert_eq!(kronecker(12, 5), -1);
    }

    #[test]
    fn quadratic_characters() {
        let c8 = DirichletCharacter::parse("mod=8; kind=quadratic", 7).unwrap();
        assert!(c8.is_even() && c8.is_primitive());
        assert_eq!([1, 3, 5, 7].map(|a| c8.value_int(a).unwrap()), [1, -1, -1, 1]);
        let c4 = DirichletCharacter::parse("mod=4", 7).unwrap();
        assert!(!c4.is_even());
        assert_eq!(DirichletCharacter::quadratic_of_conductor(5).unwrap().conductor(), 5);
    }

    #[test]
    fn omega_and_products() {
        let w = DirichletCharacter::omega_power(5, 1);
        assert_eq!(w.order(), 4);
        assert!(!w.is_even());
        let w4 = w.pow(4);
        assert!(w4.is_trivial());
        assert_eq!(w4.primitive().modulus(), 1);
        let w2 = w.pow(2);
        assert!(w2.is_rational());
        let c = DirichletCharacter::quadratic(5).unwrap();
        // ω^2 is the Legendre symbol mod 5
        assert!(w2.mul(&c).unwrap().primitive().is_trivial());
        let v = w.value_padic(2, 5, 20).unwrap();
        assert_eq!(v.pow(4).unwrap(), PadicNumber::one(5, 20));
        assert!(PadicNumber::from_i64(5, 2, 20).sub(&v).valuation().unwrap() >= 1);
    }
}
