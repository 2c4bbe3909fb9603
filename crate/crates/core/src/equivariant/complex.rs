use std::collections::BTreeMap;

use super::character::{check_group, FiniteCharacter};
use super::fp::FpSeries;
use super::group::GroupSeries;
use crate::complex::{char_element, is_semisimple, leading_term_bockstein, r_gamma, BasedComplex, ComplexDocument, Trivialization, GUARD_DIGITS};
use crate::error::{Error, Result};
use crate::linalg::{smith, Matrix};
use crate::padic::PadicNumber;
use crate::series::{IwasawaSeries, LambdaFraction};

/// A bounded complex of based free `Z_p[Δ][[T]]`-modules.
#[derive(Clone, Debug)]
pub struct EquivariantComplex {
    p: u64,
    p_prec: u32,
    t_prec: usize,
    delta: Vec<u64>,
    lo: i64,
    ranks: Vec<usize>,
    diffs: Vec<Matrix<GroupSeries>>,
}

/// A unit of `Z_p[Δ][[T]]` trivializing an equivariant complex.
#[derive(Clone, Debug)]
pub struct EquivariantTrivialization {
    unit: GroupSeries,
}

impl EquivariantComplex {
    /// `diffs[k]` is the differential out of degree `lo + k`. Every character component
    /// must square to zero.
    pub fn new(
        p: u64,
        p_prec: u32,
        t_prec: usize,
        delta: Vec<u64>,
        lo: i64,
        ranks: Vec<usize>,
        diffs: Vec<Matrix<GroupSeries>>,
    ) -> Result<Self> {
        check_group(p, &delta)?;
        if !ranks.is_empty() && diffs.len() != ranks.len() - 1 || ranks.is_empty() && !diffs.is_empty() {
            return Err(Error::InconsistentDims("one differential per pair of adjacent degrees".into()));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.rows() != ranks[k + 1] || d.cols() != ranks[k] {
                return Err(Error::InconsistentDims(format!("differential in degree {} has the wrong shape", lo + k as i64)));
            }
        }
        let c = EquivariantComplex { p, p_prec, t_prec, delta, lo, ranks, diffs };
        for chi in FiniteCharacter::all(p, &c.delta)? {
            c.component(&chi)?;
        }
        Ok(c)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn p_prec(&self) -> u32 {
        self.p_prec
    }

    pub fn t_prec(&self) -> usize {
        self.t_prec
    }

    pub fn delta(&self) -> &[u64] {
        &self.delta
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn diff(&self, i: i64) -> Option<&Matrix<GroupSeries>> {
        if i < self.lo {
            return None;
        }
        self.diffs.get((i - self.lo) as usize)
    }

    pub fn characters(&self) -> Result<Vec<FiniteCharacter>> {
        FiniteCharacter::all(self.p, &self.delta)
    }

    fn work_prec(&self) -> u32 {
        self.p_prec + GUARD_DIGITS
    }

    fn check_character(&self, chi: &FiniteCharacter) -> Result<()> {
        if chi.prime() != self.p || chi.delta() != self.delta.as_slice() {
            return Err(Error::UnsupportedCharacterOrder {
                p: self.p,
                detail: format!("{chi} is not a character of Δ = {:?}", self.delta),
            });
        }
        Ok(())
    }

    fn component(&self, chi: &FiniteCharacter) -> Result<BasedComplex> {
        let w = self.work_prec();
        let z = IwasawaSeries::exact_zero(self.p, self.t_prec);
        let diffs = self.diffs.iter().map(|d| d.map(&z, |e| e.evaluate(chi, w))).collect();
        BasedComplex::new(self.p, self.p_prec, self.t_prec, self.lo, self.ranks.clone(), diffs)
    }

    /// Lifts a plain complex with `Δ` acting trivially on the basis.
    pub fn from_based(c: &BasedComplex, delta: Vec<u64>) -> Result<Self> {
        let proto = GroupSeries::exact_zero(c.prime(), c.t_prec(), &delta);
        let diffs = (c.lo()..c.hi()).map(|i| c.diff(i).map(&proto, |s| GroupSeries::scalar(s, &delta))).collect();
        Self::new(c.prime(), c.p_prec(), c.t_prec(), delta, c.lo(), c.ranks().to_vec(), diffs)
    }

    /// Degreewise direct sum with the basis of `self` first.
    pub fn direct_sum(&self, o: &EquivariantComplex) -> Result<Self> {
        if self.p != o.p || self.delta != o.delta {
            return Err(Error::Invalid("direct sum over different group rings".into()));
        }
        if self.ranks.is_empty() {
            return Ok(o.clone());
        }
        if o.ranks.is_empty() {
            return Ok(self.clone());
        }
        let rank = |c: &EquivariantComplex, i: i64| {
            if i < c.lo || i >= c.lo + c.ranks.len() as i64 {
                0
            } else {
                c.ranks[(i - c.lo) as usize]
            }
        };
        let proto = GroupSeries::exact_zero(self.p, self.t_prec.min(o.t_prec), &self.delta);
        let diff = |c: &EquivariantComplex, i: i64| match c.diff(i) {
            Some(d) => d.clone(),
            None => Matrix::zeros(rank(c, i + 1), rank(c, i), &proto),
        };
        let lo = self.lo.min(o.lo);
        let hi = (self.lo + self.ranks.len() as i64).max(o.lo + o.ranks.len() as i64) - 1;
        let ranks = (lo..=hi).map(|i| rank(self, i) + rank(o, i)).collect();
        let diffs = (lo..hi).map(|i| diff(self, i).block_diag(&diff(o, i))).collect();
        Self::new(self.p, self.p_prec.min(o.p_prec), self.t_prec.min(o.t_prec), self.delta.clone(), lo, ranks, diffs)
    }

    /// Reads a document whose entries may involve the generators `g0, g1, …` of `Δ`.
    pub fn from_document(doc: &ComplexDocument) -> Result<(Self, EquivariantTrivialization)> {
        doc.check_prec()?;
        let delta = doc.delta.clone().unwrap_or_default();
        check_group(doc.p, &delta)?;
        let (p, t_prec) = (doc.p, doc.t_prec);
        let w = doc.p_prec + GUARD_DIGITS;
        let lo = doc.lo()?;
        let proto = GroupSeries::exact_zero(p, t_prec, &delta);
        let mut diffs = Vec::new();
        if doc.ranks.is_empty() && !doc.differentials.is_empty() {
            return Err(Error::Parse("differentials on an empty complex".into()));
        }
        doc.check_keys(lo)?;
        for k in 0..doc.ranks.len().saturating_sub(1) {
            let raw = doc.raw_diff(lo + k as i64)?;
            let mut m = Matrix::zeros(doc.ranks[k + 1], doc.ranks[k], &proto);
            for (r, row) in raw.iter().enumerate() {
                for (c, e) in row.iter().enumerate() {
                    let comps = e.group_components(p, w, t_prec, &delta)?;
                    m.set(r, c, GroupSeries::from_components(p, t_prec, &delta, comps)?);
                }
            }
            diffs.push(m);
        }
        let complex = Self::new(p, doc.p_prec, t_prec, delta.clone(), lo, doc.ranks.clone(), diffs)?;
        let unit = match &doc.trivialization_unit {
            Some(s) => {
                let poly = crate::parse::parse_poly(s, p)?;
                GroupSeries::from_components(p, t_prec, &delta, poly.group_components(p, w, t_prec, &delta)?)?
            }
            None => GroupSeries::scalar(&IwasawaSeries::one(p, w, t_prec), &delta),
        };
        let triv = EquivariantTrivialization::new(unit, p, w)?;
        Ok((complex, triv))
    }
}

impl EquivariantTrivialization {
    /// Requires every character component of `unit` to be a unit of Λ.
    pub fn new(unit: GroupSeries, p: u64, prec: u32) -> Result<Self> {
        for chi in FiniteCharacter::all(p, unit.delta())? {
            if !unit.evaluate(&chi, prec).is_unit() {
                return Err(Error::NotAUnit(format!("trivialization at {chi}")));
            }
        }
        Ok(EquivariantTrivialization { unit })
    }

    pub fn identity(c: &EquivariantComplex) -> Self {
        let one = IwasawaSeries::one(c.p, c.work_prec(), c.t_prec);
        EquivariantTrivialization { unit: GroupSeries::scalar(&one, &c.delta) }
    }

    pub fn unit(&self) -> &GroupSeries {
        &self.unit
    }

    pub fn twist(&self, rho: &FiniteCharacter, prec: u32) -> Result<Trivialization> {
        Trivialization::new(self.unit.evaluate(rho, prec))
    }

    pub fn twist_equivariant(&self, rho: &FiniteCharacter, prec: u32) -> Self {
        EquivariantTrivialization { unit: self.unit.twisted(rho, prec) }
    }
}

/// The component of `C` along each character of `Δ`; the group ring decomposes as
/// `Z_p[Δ][[T]] ⊗ Q_p ≅ Π_χ Q_p ⊗ Λ` through `g ↦ (χ(g))_χ`.
pub fn decompose_by_characters(c: &EquivariantComplex) -> Result<BTreeMap<FiniteCharacter, BasedComplex>> {
    let mut out = BTreeMap::new();
    for chi in c.characters()? {
        let comp = c.component(&chi)?;
        out.insert(chi, comp);
    }
    let back = reassemble(c.p, c.p_prec, c.t_prec, &c.delta, &out)?;
    let agree = agreement(c, &back);
    let needed = c.p_prec as i64 - crate::padic::v_p_int(c.p, c.delta.iter().product::<u64>() as i64) as i64;
    if agree < needed {
        return Err(Error::Disagreement(format!("reassembly agrees to {agree} digits only")));
    }
    Ok(out)
}

/// Inverse of [`decompose_by_characters`].
pub fn reassemble(
    p: u64,
    p_prec: u32,
    t_prec: usize,
    delta: &[u64],
    parts: &BTreeMap<FiniteCharacter, BasedComplex>,
) -> Result<EquivariantComplex> {
    let chars = FiniteCharacter::all(p, delta)?;
    let first = parts.get(&chars[0]).ok_or_else(|| Error::MissingComponent(chars[0].to_string()))?;
    let (lo, ranks) = (first.lo(), first.ranks().to_vec());
    for chi in &chars {
        let c = parts.get(chi).ok_or_else(|| Error::MissingComponent(chi.to_string()))?;
        if c.ranks() != ranks.as_slice() || (!ranks.is_empty() && c.lo() != lo) {
            return Err(Error::InconsistentDims(format!("component {chi} has a different shape")));
        }
    }
    let w = p_prec + GUARD_DIGITS;
    let proto = GroupSeries::exact_zero(p, t_prec, delta);
    let mut diffs = Vec::new();
    for k in 0..ranks.len().saturating_sub(1) {
        let i = lo + k as i64;
        let mut m = Matrix::zeros(ranks[k + 1], ranks[k], &proto);
        for r in 0..ranks[k + 1] {
            for col in 0..ranks[k] {
                let entry: BTreeMap<FiniteCharacter, IwasawaSeries> =
                    parts.iter().map(|(chi, c)| (chi.clone(), c.diff(i).get(r, col).clone())).collect();
                m.set(r, col, GroupSeries::from_character_components(p, t_prec, delta, &entry, w)?);
            }
        }
        diffs.push(m);
    }
    EquivariantComplex::new(p, p_prec, t_prec, delta.to_vec(), lo, ranks, diffs)
}

/// Number of p-adic digits to which the two complexes agree entrywise.
pub fn agreement(a: &EquivariantComplex, b: &EquivariantComplex) -> i64 {
    if a.ranks != b.ranks || a.lo != b.lo && !a.ranks.is_empty() {
        return -1;
    }
    let mut best = i64::MAX;
    for (x, y) in a.diffs.iter().zip(&b.diffs) {
        for r in 0..x.rows() {
            for c in 0..x.cols() {
                let (u, v) = (x.get(r, c), y.get(r, c));
                let keys: std::collections::BTreeSet<&Vec<u64>> = u.components().keys().chain(v.components().keys()).collect();
                for g in keys {
                    best = best.min(u.component(g).agreement(&v.component(g)));
                }
            }
        }
    }
    best
}

/// `C_ρ`: the group ring coefficients evaluated at `ρ`.
pub fn twist(c: &EquivariantComplex, rho: &FiniteCharacter) -> Result<BasedComplex> {
    c.check_character(rho)?;
    c.component(rho)
}

/// `C` with the coefficient of each `g` multiplied by `ρ(g)`, so that
/// `twist(twist_equivariant(C, ρ), χ) = twist(C, ρχ)`.
pub fn twist_equivariant(c: &EquivariantComplex, rho: &FiniteCharacter) -> Result<EquivariantComplex> {
    c.check_character(rho)?;
    let w = c.work_prec();
    let proto = GroupSeries::exact_zero(c.p, c.t_prec, &c.delta);
    let diffs = c.diffs.iter().map(|d| d.map(&proto, |e| e.twisted(rho, w))).collect();
    EquivariantComplex::new(c.p, c.p_prec, c.t_prec, c.delta.clone(), c.lo, c.ranks.clone(), diffs)
}

fn at_rho(e: Error, rho: &FiniteCharacter) -> Error {
    match e {
        Error::NotSemisimple(s) | Error::NotTorsion(s) => Error::NotSemisimpleAtRho(format!("{rho}: {s}")),
        other => other,
    }
}

/// Leading term at `ρ` of the pair `(C, a)`.
pub fn leading_term_at(c: &EquivariantComplex, a: &EquivariantTrivialization, rho: &FiniteCharacter) -> Result<PadicNumber> {
    let comp = twist(c, rho)?;
    let triv = a.twist(rho, c.work_prec())?;
    let cert = is_semisimple(&comp).map_err(|e| at_rho(e, rho))?;
    if !cert.verdict {
        return Err(Error::NotSemisimpleAtRho(rho.to_string()));
    }
    leading_term_bockstein(&comp, &triv).map_err(|e| at_rho(e, rho))
}

/// Order of vanishing at `ρ`.
pub fn r_g_at(c: &EquivariantComplex, rho: &FiniteCharacter) -> Result<i64> {
    r_gamma(&twist(c, rho)?).map_err(|e| at_rho(e, rho))
}

/// Characteristic element of `(C, a)` component by component.
pub fn char_components(
    c: &EquivariantComplex,
    a: &EquivariantTrivialization,
) -> Result<BTreeMap<FiniteCharacter, LambdaFraction>> {
    let mut out = BTreeMap::new();
    for chi in c.characters()? {
        let comp = twist(c, &chi)?;
        let triv = a.twist(&chi, c.work_prec())?;
        out.insert(chi, char_element(&comp, &triv)?);
    }
    Ok(out)
}

/// `ρ_*(F)` for `F` given by its character components.
pub fn evaluate_k1(f: &BTreeMap<FiniteCharacter, LambdaFraction>, rho: &FiniteCharacter) -> Result<LambdaFraction> {
    f.get(rho).cloned().ok_or_else(|| Error::MissingComponent(rho.to_string()))
}

#[derive(Clone, Debug)]
pub struct DescentReport {
    pub character: FiniteCharacter,
    pub via_k1: PadicNumber,
    pub via_twist: PadicNumber,
    pub r_k1: i64,
    pub r_twist: i64,
    pub agreement: i64,
}

/// Compares `(ρ_* ch(C, a))*(0)` with the leading term of the twisted pair.
pub fn descent_square(c: &EquivariantComplex, a: &EquivariantTrivialization, rho: &FiniteCharacter) -> Result<DescentReport> {
    let comp = twist(c, rho)?;
    let triv = a.twist(rho, c.work_prec())?;
    let f = char_element(&comp, &triv)?;
    let mut k1 = BTreeMap::new();
    k1.insert(rho.clone(), f);
    let f = evaluate_k1(&k1, rho)?;
    let via_k1 = f.leading_coefficient()?;
    let via_twist = leading_term_at(c, a, rho)?;
    let r_twist = r_g_at(c, rho)?;
    let agreement = via_k1.relative_agreement(&via_twist);
    Ok(DescentReport { character: rho.clone(), via_k1, via_twist, r_k1: f.t_order(), r_twist, agreement })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorsionClass {
    /// Cohomology finitely generated over `Z_p[Δ]`.
    STorsion,
    /// Cohomology killed by an element of `S` after inverting `p`.
    SStarTorsion,
    Neither,
}

impl std::fmt::Display for TorsionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TorsionClass::STorsion => "S-torsion",
            TorsionClass::SStarTorsion => "S*-torsion",
            TorsionClass::Neither => "neither",
        })
    }
}

/// Each component is first tested for acyclicity over the fraction field of Λ; an
/// acyclic component is S-torsion exactly when its reduction modulo `p` stays acyclic
/// over `F_p((T))`, ranks there being read modulo `T^{t_prec+1}`.
pub fn torsion_class(c: &EquivariantComplex) -> Result<TorsionClass> {
    let mut class = TorsionClass::STorsion;
    for comp in decompose_by_characters(c)?.values() {
        match comp.generic_acyclicity() {
            Ok(_) => {}
            Err(Error::NotTorsion(_)) => return Ok(TorsionClass::Neither),
            Err(e) => return Err(e),
        }
        if !reduction_is_acyclic(comp)? {
            class = TorsionClass::SStarTorsion;
        }
    }
    Ok(class)
}

fn reduction_is_acyclic(c: &BasedComplex) -> Result<bool> {
    let proto = FpSeries::new(c.prime(), vec![], c.t_prec() + 1);
    let mut ranks = Vec::new();
    for i in c.lo()..c.hi() {
        let m = c.diff(i).try_map(&proto, FpSeries::reduce)?;
        ranks.push(smith(&m, None)?.rank());
    }
    for i in c.degrees() {
        let k = (i - c.lo()) as usize;
        let out = ranks.get(k).copied().unwrap_or(0);
        let inc = if k > 0 { ranks[k - 1] } else { 0 };
        if out + inc != c.rank(i) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(s: &str) -> (EquivariantComplex, EquivariantTrivialization) {
        EquivariantComplex::from_document(&ComplexDocument::from_json(s).unwrap()).unwrap()
    }

    #[test]
    fn sigma_minus_one_splits() {
        let (c, _) = doc(r#"{ "p": 5, "degrees": [0, 1], "ranks": [1, 1], "delta": [2],
            "differentials": { "0": [["g0 - 1"]] } }"#);
        let parts = decompose_by_characters(&c).unwrap();
        let v: Vec<PadicNumber> = parts.values().map(|b| b.diff(0).get(0, 0).coeff(0)).collect();
        assert!(v[0].is_zero());
        assert_eq!(v[1], PadicNumber::from_i64(5, -2, 20));
        let rho = FiniteCharacter::parse("delta=[2]; values=[-1]", 5).unwrap();
        assert_eq!(twist(&c, &rho).unwrap().diff(0).get(0, 0).coeff(0), PadicNumber::from_i64(5, -2, 20));
        assert_eq!(torsion_class(&c).unwrap(), TorsionClass::Neither);
    }

    #[test]
    fn trivial_group_is_the_plain_complex() {
        let s = r#"{ "p": 5, "degrees": [-1, 0], "ranks": [1, 1], "differentials": { "-1": [["T"]] },
            "trivialization_unit": "1 + 2*T" }"#;
        let (c, a) = doc(s);
        let plain = ComplexDocument::from_json(s).unwrap().to_complex().unwrap();
        let rho = FiniteCharacter::trivial(5, vec![]).unwrap();
        let lt = leading_term_at(&c, &a, &rho).unwrap();
        assert_eq!(lt, leading_term_bockstein(&plain.complex, &plain.trivialization).unwrap());
        assert_eq!(r_g_at(&c, &rho).unwrap(), -1);
        assert_eq!(torsion_class(&c).unwrap(), TorsionClass::STorsion);
    }

    #[test]
    fn p_is_only_s_star_torsion() {
        let (c, _) = doc(r#"{ "p": 5, "degrees": [-1, 0], "ranks": [1, 1], "delta": [2],
            "differentials": { "-1": [["p"]] } }"#);
        assert_eq!(torsion_class(&c).unwrap(), TorsionClass::SStarTorsion);
    }

    #[test]
    fn twists_compose() {
        let (c, _) = doc(r#"{ "p": 5, "degrees": [0, 1], "ranks": [1, 1], "delta": [4],
            "differentials": { "0": [["T + g0 + p*g0^3"]] } }"#);
        let chars = c.characters().unwrap();
        for rho in &chars {
            let back = twist(&twist_equivariant(&c, rho).unwrap(), &rho.conj()).unwrap();
            let plain = twist(&c, &chars[0]).unwrap();
            assert!(back.diff(0).get(0, 0).eq_at_precision(plain.diff(0).get(0, 0)));
        }
    }
}
