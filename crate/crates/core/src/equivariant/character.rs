use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::padic::{root_of_unity, root_order, PadicNumber};

/// A character of `Δ = Z/d_1 × … × Z/d_k` with values in the roots of unity of `Z_p`.
///
/// The value on the `i`-th generator is `ζ^{e_i}`, where `ζ` is the fixed generator of
/// the roots of unity in `Z_p` (see [`root_of_unity`]).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteCharacter {
    p: u64,
    delta: Vec<u64>,
    exps: Vec<u64>,
}

/// Checks that every invariant factor divides the number of roots of unity in `Z_p`.
pub fn check_group(p: u64, delta: &[u64]) -> Result<()> {
    let m = root_order(p);
    for &d in delta {
        if d == 0 || m % d != 0 {
            return Err(Error::UnsupportedCharacterOrder {
                p,
                detail: format!("Z/{d} has characters outside Z_p (roots of unity in Z_p have order dividing {m})"),
            });
        }
    }
    Ok(())
}

impl FiniteCharacter {
    pub fn new(p: u64, delta: Vec<u64>, exps: Vec<u64>) -> Result<Self> {
        check_group(p, &delta)?;
        if exps.len() != delta.len() {
            return Err(Error::InconsistentDims(format!(
                "{} generators but {} values",
                delta.len(),
                exps.len()
            )));
        }
        let m = root_order(p);
        let exps: Vec<u64> = exps.into_iter().map(|e| e % m).collect();
        for (i, (&d, &e)) in delta.iter().zip(&exps).enumerate() {
            if (d * e) % m != 0 {
                return Err(Error::UnsupportedCharacterOrder {
                    p,
                    detail: format!("value on g{i} has order {} not dividing {d}", m / m.gcd(&e)),
                });
            }
        }
        Ok(FiniteCharacter { p, delta, exps })
    }

    pub fn trivial(p: u64, delta: Vec<u64>) -> Result<Self> {
        let n = delta.len();
        Self::new(p, delta, vec![0; n])
    }

    /// Every character of `Δ`, the trivial one first.
    pub fn all(p: u64, delta: &[u64]) -> Result<Vec<Self>> {
        check_group(p, delta)?;
        let m = root_order(p);
        let mut out = vec![vec![]];
        for &d in delta {
            let step = m / d;
            out = out
                .into_iter()
                .flat_map(|v: Vec<u64>| {
                    (0..d).map(move |j| {
                        let mut w = v.clone();
                        w.push(j * step);
                        w
                    })
                })
                .collect();
        }
        Ok(out.into_iter().map(|exps| FiniteCharacter { p, delta: delta.to_vec(), exps }).collect())
    }

    /// Parses `"delta=[2,4]; values=[-1, zeta4]"`. Values are `1`, `-1`, `zetaK` or
    /// `zetaK^j`, where `zetaK = ζ^{m/K}` and `m` is the number of roots of unity in `Z_p`.
    pub fn parse(s: &str, p: u64) -> Result<Self> {
        let mut delta = None;
        let mut values = None;
        for part in s.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, val) = part.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value in {part:?}")))?;
            let list = val.trim().strip_prefix('[').and_then(|v| v.strip_suffix(']'));
            let list = list.ok_or_else(|| Error::Parse(format!("expected a bracketed list in {part:?}")))?;
            let items: Vec<String> = list.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect();
            match key.trim() {
                "delta" => {
                    let d: std::result::Result<Vec<u64>, _> = items.iter().map(|x| x.parse::<u64>()).collect();
                    delta = Some(d.map_err(|e| Error::Parse(format!("bad group order: {e}")))?);
                }
                "values" => values = Some(items),
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        let delta = delta.ok_or_else(|| Error::Parse("missing delta".into()))?;
        let values = values.unwrap_or_else(|| vec!["1".to_string(); delta.len()]);
        check_group(p, &delta)?;
        let exps = values.iter().map(|v| parse_root(v, p)).collect::<Result<Vec<_>>>()?;
        Self::new(p, delta, exps)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn delta(&self) -> &[u64] {
        &self.delta
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    pub fn group_order(&self) -> u64 {
        self.delta.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// `k` with `χ(g) = ζ^k`; `g` lists exponents of the generators.
    pub fn index_at(&self, g: &[u64]) -> u64 {
        let m = root_order(self.p);
        self.exps.iter().zip(g).fold(0, |acc, (&e, &x)| (acc + e * (x % m)) % m)
    }

    pub fn value_at(&self, g: &[u64], prec: u32) -> PadicNumber {
        root_of_unity(self.p, self.index_at(g) as i64, prec)
    }

    pub fn conj(&self) -> Self {
        let m = root_order(self.p);
        FiniteCharacter { p: self.p, delta: self.delta.clone(), exps: self.exps.iter().map(|&e| (m - e) % m).collect() }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.p != o.p || self.delta != o.delta {
            return Err(Error::Invalid("characters of different groups".into()));
        }
        let m = root_order(self.p);
        let exps = self.exps.iter().zip(&o.exps).map(|(a, b)| (a + b) % m).collect();
        Ok(FiniteCharacter { p: self.p, delta: self.delta.clone(), exps })
    }

    /// Elements of `Δ` as exponent vectors, in lexicographic order.
    pub fn elements(delta: &[u64]) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &d in delta {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u64>| {
                    (0..d).map(move |j| {
                        let mut w = v.clone();
                        w.push(j);
                        w
                    })
                })
                .collect();
        }
        out
    }
}

fn parse_root(v: &str, p: u64) -> Result<u64> {
    let m = root_order(p);
    let v = v.replace(' ', "");
    match v.as_str() {
        "1" => return Ok(0),
        "-1" => {
            if m % 2 != 0 {
                return Err(Error::UnsupportedCharacterOrder { p, detail: "-1 needs an even root order".into() });
            }
            return Ok(m / 2);
        }
        _ => {}
    }
    let rest = v.strip_prefix("zeta").ok_or_else(|| Error::Parse(format!("unknown character value {v:?}")))?;
    let (k, j) = match rest.split_once('^') {
        Some((k, j)) => (k, j.trim_matches(|c| c == '(' || c == ')')),
        None => (rest, "1"),
    };
    let k: u64 = k.parse().map_err(|_| Error::Parse(format!("bad root order in {v:?}")))?;
    let j: i64 = j.parse().map_err(|_| Error::Parse(format!("bad exponent in {v:?}")))?;
    if k == 0 || m % k != 0 {
        return Err(Error::UnsupportedCharacterOrder { p, detail: format!("no primitive {k}-th root of unity in Z_{p}") });
    }
    Ok(((j.rem_euclid(k as i64) as u64) * (m / k)) % m)
}

fn format_root(e: u64, m: u64) -> String {
    if e == 0 {
        return "1".into();
    }
    if 2 * e == m {
        return "-1".into();
    }
    let k = m / m.gcd(&e);
    let j = e / (m / k);
    if j == 1 {
        format!("zeta{k}")
    } else {
        format!("zeta{k}^{j}")
    }
}

impl fmt::Display for FiniteCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = root_order(self.p);
        let d: Vec<String> = self.delta.iter().map(|x| x.to_string()).collect();
        let v: Vec<String> = self.exps.iter().map(|&e| format_root(e, m)).collect();
        write!(f, "delta=[{}]; values=[{}]", d.join(","), v.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        let c = FiniteCharacter::parse("delta=[2,4]; values=[-1, zeta4]", 5).unwrap();
        assert_eq!(c.exponents(), &[2, 1]);
        assert_eq!(c.to_string(), "delta=[2,4]; values=[-1, zeta4]");
        let z = c.value_at(&[0, 1], 20);
        assert_eq!(z.pow(4).unwrap(), PadicNumber::one(5, 20));
        assert_ne!(z.pow(2).unwrap(), PadicNumber::one(5, 20));
    }

    #[test]
    fn rejects_orders_outside_zp() {
        assert!(matches!(FiniteCharacter::all(5, &[3]), Err(Error::UnsupportedCharacterOrder { .. })));
        assert!(FiniteCharacter::parse("delta=[2]; values=[zeta4]", 5).is_err());
        assert_eq!(FiniteCharacter::all(7, &[2, 3]).unwrap().len(), 6);
        assert_eq!(FiniteCharacter::all(2, &[2]).unwrap().len(), 2);
    }

    #[test]
    fn orthogonality() {
        let p = 7;
        let delta = [6];
        let chars = FiniteCharacter::all(p, &delta).unwrap();
        for a in &chars {
            for b in &chars {
                let mut s = PadicNumber::exact_zero(p);
                for g in FiniteCharacter::elements(&delta) {
                    s = s.add(&a.value_at(&g, 20).mul(&b.conj().value_at(&g, 20)));
                }
                let expect = if a == b { 6 } else { 0 };
                assert_eq!(s, PadicNumber::from_i64(p, expect, 20));
            }
        }
    }
}
