//! The JSON document describing a trivialized complex.
//!
//! ```json
//! { "p": 5, "p_prec": 30, "t_prec": 40, "degrees": [-1, 0], "ranks": [2, 2],
//!   "differentials": { "-1": [["T", "0"], ["0", "1"]] },
//!   "trivialization_unit": "1 + 2*T" }
//! ```
//!
//! `degrees` lists every degree, or gives `[lo, hi]`. Missing differentials are zero.
//! Equivariant documents add `"delta": [d_1, d_2, …]` and may use `g0, g1, …` in entries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BasedComplex, Trivialization, GUARD_DIGITS};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::padic::DEFAULT_PREC;
use crate::parse::{parse_poly, parse_series, Poly};
use crate::series::{IwasawaSeries, DEFAULT_T_PREC};

fn default_p_prec() -> u32 {
    DEFAULT_PREC
}

fn default_t_prec() -> usize {
    DEFAULT_T_PREC
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexDocument {
    pub p: u64,
    #[serde(default = "default_p_prec")]
    pub p_prec: u32,
    #[serde(default = "default_t_prec")]
    pub t_prec: usize,
    #[serde(default)]
    pub degrees: Vec<i64>,
    #[serde(default)]
    pub ranks: Vec<usize>,
    #[serde(default)]
    pub differentials: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub trivialization_unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<u64>>,
}

#[derive(Clone, Debug)]
pub struct ParsedComplex {
    pub complex: BasedComplex,
    pub trivialization: Trivialization,
}

impl ComplexDocument {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn lo(&self) -> Result<i64> {
        if self.ranks.is_empty() {
            return Ok(self.degrees.first().copied().unwrap_or(0));
        }
        let lo = *self.degrees.first().ok_or_else(|| Error::Parse("missing degrees".into()))?;
        let consecutive = self.degrees.windows(2).all(|w| w[1] == w[0] + 1);
        let ok = if self.degrees.len() == self.ranks.len() {
            consecutive
        } else {
            self.degrees.len() == 2 && self.degrees[1] - self.degrees[0] + 1 == self.ranks.len() as i64
        };
        if !ok {
            return Err(Error::Parse("degrees must list consecutive degrees or give [lo, hi] matching ranks".into()));
        }
        Ok(lo)
    }

    pub(crate) fn check_prec(&self) -> Result<()> {
        if self.p < 2 || !crate::padic::is_prime(self.p) {
            return Err(Error::Parse(format!("{} is not a prime", self.p)));
        }
        if self.p_prec == 0 || self.t_prec == 0 {
            return Err(Error::Parse("precisions must be positive".into()));
        }
        Ok(())
    }

    /// Raw entry polynomials of the differential out of degree `i`, shape-checked.
    pub fn raw_diff(&self, i: i64) -> Result<Vec<Vec<Poly>>> {
        let lo = self.lo()?;
        let k = (i - lo) as usize;
        let (rows, cols) = (self.ranks[k + 1], self.ranks[k]);
        match self.differentials.get(&i.to_string()) {
            None => Ok(vec![vec![Poly::default(); cols]; rows]),
            Some(m) => {
                if m.len() != rows || m.iter().any(|r| r.len() != cols) {
                    return Err(Error::InconsistentDims(format!(
                        "differential \"{}\" must be {}x{}",
                        i, rows, cols
                    )));
                }
                m.iter().map(|r| r.iter().map(|e| parse_poly(e, self.p)).collect()).collect()
            }
        }
    }

    pub(crate) fn check_keys(&self, lo: i64) -> Result<()> {
        for key in self.differentials.keys() {
            let i: i64 = key.parse().map_err(|_| Error::Parse(format!("bad degree key {:?}", key)))?;
            if i < lo || i >= lo + self.ranks.len() as i64 - 1 {
                return Err(Error::Parse(format!("differential out of degree {} lies outside the complex", i)));
            }
        }
        Ok(())
    }

    pub fn to_complex(&self) -> Result<ParsedComplex> {
        self.check_prec()?;
        if self.delta.is_some() {
            return Err(Error::Parse("equivariant document; use the equivariant loader".into()));
        }
        let w = self.p_prec + GUARD_DIGITS;
        let lo = self.lo()?;
        let complex = if self.ranks.is_empty() {
            if !self.differentials.is_empty() {
                return Err(Error::Parse("differentials on an empty complex".into()));
            }
            BasedComplex::empty(self.p, self.p_prec, self.t_prec)
        } else {
            self.check_keys(lo)?;
            let z = IwasawaSeries::exact_zero(self.p, self.t_prec);
            let mut diffs = Vec::new();
            for k in 0..self.ranks.len() - 1 {
                let raw = self.raw_diff(lo + k as i64)?;
                let mut m = Matrix::zeros(self.ranks[k + 1], self.ranks[k], &z);
                for (r, row) in raw.iter().enumerate() {
                    for (c, e) in row.iter().enumerate() {
                        m.set(r, c, e.to_series(self.p, w, self.t_prec)?);
                    }
                }
                diffs.push(m);
            }
            BasedComplex::new(self.p, self.p_prec, self.t_prec, lo, self.ranks.clone(), diffs)?
        };
        let unit = match &self.trivialization_unit {
            Some(s) => parse_series(s, self.p, w, self.t_prec)?,
            None => IwasawaSeries::one(self.p, w, self.t_prec),
        };
        Ok(ParsedComplex { complex, trivialization: Trivialization::new(unit)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_example_document() {
        let doc = r#"{ "p": 5, "p_prec": 30, "t_prec": 40, "degrees": [-1, 0], "ranks": [2, 2],
            "differentials": { "-1": [["T", "0"], ["0", "1"]] }, "trivialization_unit": "1 + 2*T" }"#;
        let parsed = ComplexDocument::from_json(doc).unwrap().to_complex().unwrap();
        assert_eq!(parsed.complex.lo(), -1);
        assert_eq!(parsed.complex.ranks(), &[2, 2]);
    }

    #[test]
    fn rejects_bad_shapes() {
        let doc = r#"{ "p": 5, "degrees": [0, 1], "ranks": [1, 1], "differentials": { "0": [["1", "2"]] } }"#;
        assert!(ComplexDocument::from_json(doc).unwrap().to_complex().is_err());
    }
}
