use std::collections::BTreeMap;
use std::fmt;

use super::character::FiniteCharacter;
use crate::error::{Error, Result};
use crate::linalg::{Ring, ONE_PREC};
use crate::padic::PadicNumber;
use crate::series::IwasawaSeries;

/// An element `Σ_g c_g g` of `Z_p[Δ][[T]]`, keyed by exponent vectors of `g`.
#[derive(Clone, Debug)]
pub struct GroupSeries {
    p: u64,
    t_prec: usize,
    delta: Vec<u64>,
    comps: BTreeMap<Vec<u64>, IwasawaSeries>,
}

impl GroupSeries {
    pub fn from_components(p: u64, t_prec: usize, delta: &[u64], comps: BTreeMap<Vec<u64>, IwasawaSeries>) -> Result<Self> {
        for g in comps.keys() {
            if g.len() != delta.len() || g.iter().zip(delta).any(|(x, d)| x >= d) {
                return Err(Error::InconsistentDims(format!("{g:?} is not an element of Δ = {delta:?}")));
            }
        }
        Ok(GroupSeries { p, t_prec, delta: delta.to_vec(), comps })
    }

    /// `f · 1`.
    pub fn scalar(f: &IwasawaSeries, delta: &[u64]) -> Self {
        let mut comps = BTreeMap::new();
        comps.insert(vec![0; delta.len()], f.clone());
        GroupSeries { p: f.prime(), t_prec: f.t_prec(), delta: delta.to_vec(), comps }
    }

    pub fn exact_zero(p: u64, t_prec: usize, delta: &[u64]) -> Self {
        GroupSeries { p, t_prec, delta: delta.to_vec(), comps: BTreeMap::new() }
    }

    pub fn delta(&self) -> &[u64] {
        &self.delta
    }

    pub fn components(&self) -> &BTreeMap<Vec<u64>, IwasawaSeries> {
        &self.comps
    }

    pub fn component(&self, g: &[u64]) -> IwasawaSeries {
        self.comps.get(g).cloned().unwrap_or_else(|| IwasawaSeries::exact_zero(self.p, self.t_prec))
    }

    /// `Σ_g χ(g) c_g`.
    pub fn evaluate(&self, chi: &FiniteCharacter, prec: u32) -> IwasawaSeries {
        let mut acc = IwasawaSeries::exact_zero(self.p, self.t_prec);
        for (g, c) in &self.comps {
            let idx = chi.index_at(g);
            acc = if idx == 0 { acc.add(c) } else { acc.add(&c.scale(&chi.value_at(g, prec))) };
        }
        acc
    }

    /// `Σ_g χ(g) c_g g`.
    pub fn twisted(&self, chi: &FiniteCharacter, prec: u32) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|(g, c)| {
                let v = if chi.index_at(g) == 0 { c.clone() } else { c.scale(&chi.value_at(g, prec)) };
                (g.clone(), v)
            })
            .collect();
        GroupSeries { comps, ..self.clone() }
    }

    /// The element with character components `F_χ`: `c_g = |Δ|^{-1} Σ_χ χ(g)^{-1} F_χ`.
    pub fn from_character_components(
        p: u64,
        t_prec: usize,
        delta: &[u64],
        parts: &BTreeMap<FiniteCharacter, IwasawaSeries>,
        prec: u32,
    ) -> Result<Self> {
        let chars = FiniteCharacter::all(p, delta)?;
        let order: u64 = delta.iter().product();
        let inv = PadicNumber::from_i64(p, order as i64, prec + 64).inv()?;
        let mut comps = BTreeMap::new();
        for g in FiniteCharacter::elements(delta) {
            let mut acc = IwasawaSeries::exact_zero(p, t_prec);
            for chi in &chars {
                let f = parts
                    .get(chi)
                    .ok_or_else(|| Error::MissingComponent(chi.to_string()))?;
                acc = acc.add(&f.scale(&chi.conj().value_at(&g, prec)));
            }
            let c = acc.scale(&inv);
            if !c.is_zero() {
                comps.insert(g, c);
            }
        }
        Ok(GroupSeries { p, t_prec, delta: delta.to_vec(), comps })
    }

    fn add_key(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).zip(&self.delta).map(|((x, y), d)| (x + y) % d).collect()
    }
}

impl Ring for GroupSeries {
    fn zero_like(&self) -> Self {
        GroupSeries { comps: BTreeMap::new(), ..self.clone() }
    }
    fn one_like(&self) -> Self {
        Self::scalar(&IwasawaSeries::one(self.p, ONE_PREC, self.t_prec), &self.delta)
    }
    fn is_zero(&self) -> bool {
        self.comps.values().all(|c| c.is_zero())
    }
    fn add(&self, o: &Self) -> Self {
        let mut comps = self.comps.clone();
        for (g, c) in &o.comps {
            let e = comps.entry(g.clone()).or_insert_with(|| IwasawaSeries::exact_zero(self.p, self.t_prec));
            *e = e.add(c);
        }
        GroupSeries { comps, ..self.clone() }
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let mut comps: BTreeMap<Vec<u64>, IwasawaSeries> = BTreeMap::new();
        for (g, a) in &self.comps {
            for (h, b) in &o.comps {
                let k = self.add_key(g, h);
                let prod = a.mul(b);
                match comps.get_mut(&k) {
                    Some(e) => *e = e.add(&prod),
                    None => {
                        comps.insert(k, prod);
                    }
                }
            }
        }
        GroupSeries { comps, ..self.clone() }
    }
    fn neg(&self) -> Self {
        GroupSeries { comps: self.comps.iter().map(|(g, c)| (g.clone(), c.neg())).collect(), ..self.clone() }
    }
}

impl fmt::Display for GroupSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .comps
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, c)| {
                let word: Vec<String> =
                    g.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| if e == 1 { format!("g{i}") } else { format!("g{i}^{e}") }).collect();
                if word.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{}", word.join("*"))
                }
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}
