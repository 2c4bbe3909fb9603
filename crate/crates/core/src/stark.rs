//! `p`-adic class number formulas at `s = 1` for `Q` and real quadratic fields.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kubota_leopoldt::{extrapolate_to_zero, is_fundamental, DirichletCharacter, PadicL, LIMIT_WINDOW};
use crate::padic::{hensel_sqrt, iwasawa_log, PadicNumber, PRECISION_FLOOR};

/// `(a + b√m)/c` with `m` the squarefree part of the discriminant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticUnit {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldData {
    pub label: String,
    /// Discriminant; 1 for `Q`.
    pub d: i64,
    pub h: u64,
    #[serde(default = "QuadraticUnit::one")]
    pub unit: QuadraticUnit,
    #[serde(default = "one_u64")]
    pub chi_mod: u64,
    /// Square roots of `m` modulo `p`, keyed by `p`.
    #[serde(default)]
    pub sqrt_seeds: BTreeMap<String, i64>,
}

fn one_u64() -> u64 {
    1
}

impl QuadraticUnit {
    fn one() -> Self {
        QuadraticUnit { a: 1, b: 0, c: 1 }
    }
}

impl FieldData {
    pub fn rationals() -> Self {
        FieldData { label: "Q".into(), d: 1, h: 1, unit: QuadraticUnit::one(), chi_mod: 1, sqrt_seeds: BTreeMap::new() }
    }

    fn quadratic(label: &str, d: i64, unit: (i64, i64, i64), seeds: &[(u64, i64)]) -> Self {
        FieldData {
            label: label.into(),
            d,
            h: 1,
            unit: QuadraticUnit { a: unit.0, b: unit.1, c: unit.2 },
            chi_mod: d as u64,
            sqrt_seeds: seeds.iter().map(|(p, s)| (p.to_string(), *s)).collect(),
        }
    }

    /// `Q`, `Q(√2)`, `Q(√5)`, `Q(√3)`.
    pub fn catalogue() -> Vec<FieldData> {
        vec![
            Self::rationals(),
            Self::quadratic("Q(sqrt2)", 8, (1, 1, 1), &[(7, 3), (17, 6), (23, 5), (31, 8)]),
            Self::quadratic("Q(sqrt5)", 5, (1, 1, 2), &[(11, 4), (19, 9), (29, 11), (31, 6)]),
            Self::quadratic("Q(sqrt3)", 12, (2, 1, 1), &[(11, 5), (13, 4), (23, 7)]),
        ]
    }

    /// Looks up a catalogue label, accepting `Q(sqrt2)`, `Q(√2)` and `sqrt2`.
    pub fn by_label(label: &str) -> Result<Self> {
        let norm = label.replace('√', "sqrt").replace(['(', ')'], "").to_lowercase();
        let norm = norm.trim_start_matches('q');
        Self::catalogue()
            .into_iter()
            .find(|f| f.label.replace(['(', ')'], "").to_lowercase().trim_start_matches('q') == norm)
            .ok_or_else(|| Error::Invalid(format!("unknown field {label:?}")))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: FieldData = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 1 {
            return Ok(());
        }
        if self.d < 0 || !is_fundamental(self.d) {
            return Err(Error::Invalid(format!("{} is not a real quadratic discriminant", self.d)));
        }
        if self.chi_mod != self.d as u64 {
            return Err(Error::Invalid(format!("character modulus {} differs from |d| = {}", self.chi_mod, self.d)));
        }
        let QuadraticUnit { a, b, c } = self.unit;
        let m = self.squarefree_part();
        let norm = (a as i128 * a as i128 - m as i128 * b as i128 * b as i128, c as i128 * c as i128);
        if b == 0 || !(c == 1 || c == 2) || (norm.0 != norm.1 && norm.0 != -norm.1) {
            return Err(Error::Invalid(format!("({a} + {b}√{m})/{c} is not a unit of norm ±1")));
        }
        if c == 2 && (m % 4 != 1 || (a - b) % 2 != 0) {
            return Err(Error::Invalid("half-integral unit outside the maximal order".into()));
        }
        Ok(())
    }

    pub fn degree(&self) -> u32 {
        if self.d == 1 {
            1
        } else {
            2
        }
    }

    /// `m` with `d = m` or `d = 4m`.
    pub fn squarefree_part(&self) -> i64 {
        if self.d % 4 == 0 {
            self.d / 4
        } else {
            self.d
        }
    }

    pub fn character(&self) -> Result<DirichletCharacter> {
        if self.d == 1 {
            Ok(DirichletCharacter::trivial())
        } else {
            DirichletCharacter::quadratic(self.d)
        }
    }

    fn seed(&self, p: u64) -> Result<i64> {
        self.sqrt_seeds.get(&p.to_string()).copied().ok_or_else(|| Error::UnsupportedPrime {
            p,
            detail: format!("no square-root seed for {} at {p}", self.label),
        })
    }

    /// `√m` in `Z_p` from the stored seed, or from `p - seed` when `flip` is set.
    pub fn sqrt_m(&self, p: u64, prec: u32, flip: bool) -> Result<PadicNumber> {
        if self.d % p as i64 == 0 {
            return Err(Error::UnsupportedPrime { p, detail: format!("{p} ramifies in {}", self.label) });
        }
        let seed = self.seed(p)?;
        let seed = if flip { p as i64 - seed } else { seed };
        let m = PadicNumber::from_i64(p, self.squarefree_part(), prec);
        hensel_sqrt(&m, seed).map_err(|e| Error::UnsupportedPrime { p, detail: e.to_string() })
    }

    /// `√d` under the same embedding as [`FieldData::sqrt_m`].
    pub fn sqrt_d(&self, p: u64, prec: u32, flip: bool) -> Result<PadicNumber> {
        let r = self.sqrt_m(p, prec, flip)?;
        Ok(if self.d % 4 == 0 { r.scale_i64(2) } else { r })
    }
}

/// `log_p` of the fundamental unit under the embedding fixed by the seed; 1 for `Q`.
pub fn padic_regulator(field: &FieldData, p: u64, prec: u32, flip: bool) -> Result<PadicNumber> {
    if field.d == 1 {
        return Ok(PadicNumber::one(p, prec));
    }
    let root = field.sqrt_m(p, prec, flip)?;
    let QuadraticUnit { a, b, c } = field.unit;
    let num = PadicNumber::from_i64(p, a, prec).add(&root.scale_i64(b));
    let eps = num.div(&PadicNumber::from_i64(p, c, prec))?;
    iwasawa_log(&eps)
}

fn rational(p: u64, a: i64, b: i64, prec: u32) -> Result<PadicNumber> {
    PadicNumber::from_rational(p, &BigInt::from(a), &BigInt::from(b), prec)
}

/// `Π_{ℓ ∈ S, ℓ ≠ p, ℓ ∤ f} (1 - χ(ℓ)/ℓ)` in exact rational arithmetic.
fn rational_euler_product(chi: &DirichletCharacter, s_set: &[u64], p: u64, prec: u32) -> Result<PadicNumber> {
    let mut acc = PadicNumber::one(p, prec);
    let mut seen = std::collections::BTreeSet::new();
    for &l in s_set {
        if l == p || !seen.insert(l) || chi.modulus() % l == 0 {
            continue;
        }
        let v = chi.value_int(l as i64).ok_or_else(|| Error::Invalid("character is not rational".into()))?;
        acc = acc.mul(&rational(p, l as i64 - v, l as i64, prec)?);
    }
    Ok(acc)
}

/// `u / v ≡ ±1`: returns the sign and the digits on which `u = ±v`.
fn signed_agreement(u: &PadicNumber, v: &PadicNumber) -> (i8, i64) {
    let plus = u.relative_agreement(v);
    let minus = u.relative_agreement(&v.neg());
    if plus >= minus {
        (1, plus)
    } else {
        (-1, minus)
    }
}

#[derive(Clone, Debug)]
pub struct StarkReport {
    pub field: String,
    pub p: u64,
    pub s_set: Vec<u64>,
    /// `L_{p,S}(1, ρ)`.
    pub analytic: PadicNumber,
    pub analytic_certified: i64,
    /// `E_S (1 - ρ(p)/p) 2 h R_p / √d`.
    pub closed_form: PadicNumber,
    pub regulator: PadicNumber,
    /// `analytic / closed_form ≈ sign`.
    pub sign: i8,
    pub digits: i64,
    /// Digits on which the closed form is unchanged by `√d ↦ -√d`.
    pub flip_invariance: i64,
}

fn closed_form(field: &FieldData, p: u64, s_set: &[u64], prec: u32, flip: bool) -> Result<(PadicNumber, PadicNumber)> {
    let chi = field.character()?;
    let reg = padic_regulator(field, p, prec, flip)?;
    let euler = rational_euler_product(&chi, s_set, p, prec)?;
    let at_p = if chi.modulus() % p == 0 {
        PadicNumber::one(p, prec)
    } else {
        let v = chi.value_int(p as i64).expect("rational character");
        rational(p, p as i64 - v, p as i64, prec)?
    };
    let scale = PadicNumber::from_i64(p, 2 * field.h as i64, prec);
    let v = euler.mul(&at_p).mul(&scale).mul(&reg).div(&field.sqrt_d(p, prec, flip)?)?;
    Ok((v, reg))
}

fn check_s(field: &FieldData, p: u64, s_set: &[u64]) -> Result<()> {
    if !s_set.contains(&p) {
        return Err(Error::Invalid(format!("S must contain p = {p}")));
    }
    let d = field.d.unsigned_abs();
    for l in 2..=d {
        if d % l == 0 && crate::padic::is_prime(l) && !s_set.contains(&l) {
            return Err(Error::Invalid(format!("S must contain the ramified prime {l}")));
        }
    }
    Ok(())
}

/// `L_{p,S}(1, ρ) = ±E_S (1 - ρ(p)/p) 2h R_p/√d` for the quadratic character of a real quadratic field.
pub fn stark_check_quadratic(field: &FieldData, p: u64, s_set: &[u64], prec: u32) -> Result<StarkReport> {
    field.validate()?;
    if field.d == 1 {
        return Err(Error::Invalid("use residue_check_trivial for Q".into()));
    }
    check_s(field, p, s_set)?;
    let w = prec + 2 * crate::kubota_leopoldt::L_GUARD;
    let (rhs, regulator) = closed_form(field, p, s_set, w, false)?;
    let (flipped, _) = closed_form(field, p, s_set, w, true)?;
    let l = PadicL::new(&field.character()?, s_set, p, prec)?;
    let lead = l.leading_term_at_1()?;
    let (sign, digits) = signed_agreement(&lead.value, &rhs);
    let report = StarkReport {
        field: field.label.clone(),
        p,
        s_set: l.primes().iter().copied().collect(),
        analytic: lead.value,
        analytic_certified: lead.certified_digits,
        closed_form: rhs.clone(),
        regulator,
        sign,
        digits,
        flip_invariance: rhs.relative_agreement(&flipped),
    };
    if report.digits < PRECISION_FLOOR as i64 {
        return Err(Error::Disagreement(format!("{}: L_p(1) = {} but closed form {}", field.label, report.analytic, report.closed_form)));
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct ResidueReport {
    pub p: u64,
    pub s_set: Vec<u64>,
    pub residue: PadicNumber,
    pub certified_digits: i64,
    /// `(1 - 1/p) Π_{ℓ ∈ S, ℓ ≠ p} (1 - 1/ℓ)`.
    pub expected: PadicNumber,
    pub digits: i64,
}

/// `lim_{s→1} (s - 1) ζ_{p,S}(s) = (1 - 1/p) Π_{ℓ ∈ S∖{p}} (1 - 1/ℓ)`.
pub fn residue_check_trivial(p: u64, s_set: &[u64], prec: u32) -> Result<ResidueReport> {
    let w = prec + 2 * crate::kubota_leopoldt::L_GUARD;
    let l = PadicL::new(&DirichletCharacter::trivial(), s_set, p, prec)?;
    let lead = l.leading_term_at_1()?;
    let expected = rational(p, p as i64 - 1, p as i64, w)?.mul(&rational_euler_product(
        &DirichletCharacter::trivial(),
        s_set,
        p,
        w,
    )?);
    let digits = lead.value.relative_agreement(&expected);
    if digits < PRECISION_FLOOR as i64 {
        return Err(Error::Disagreement(format!("residue {} but expected {}", lead.value, expected)));
    }
    Ok(ResidueReport {
        p,
        s_set: l.primes().iter().copied().collect(),
        residue: lead.value,
        certified_digits: lead.certified_digits,
        expected,
        digits,
    })
}

#[derive(Clone, Debug)]
pub struct DedekindReport {
    pub field: String,
    pub p: u64,
    /// `lim (s - 1) ζ_{E,p,S}(s)` as the product of the two character limits.
    pub residue: PadicNumber,
    /// `2^{[E:Q]-1} h R_p e_p / √d` with the Euler factors of `E` at `S`.
    pub expected: PadicNumber,
    pub sign: i8,
    pub digits: i64,
}

/// Residue of the `p`-adic Dedekind zeta function of a real quadratic field with `p` split.
pub fn dedekind_residue_check(field: &FieldData, p: u64, s_set: &[u64], prec: u32) -> Result<DedekindReport> {
    field.validate()?;
    if field.d == 1 {
        let r = residue_check_trivial(p, s_set, prec)?;
        return Ok(DedekindReport { field: field.label.clone(), p, residue: r.residue, expected: r.expected, sign: 1, digits: r.digits });
    }
    check_s(field, p, s_set)?;
    let chi = field.character()?;
    if chi.value_int(p as i64) != Some(1) {
        return Err(Error::UnsupportedPrime { p, detail: format!("{p} does not split in {}", field.label) });
    }
    let w = prec + 2 * crate::kubota_leopoldt::L_GUARD;
    let triv = PadicL::new(&DirichletCharacter::trivial(), s_set, p, prec)?.leading_term_at_1()?;
    let quad = PadicL::new(&chi, s_set, p, prec)?.leading_term_at_1()?;
    let residue = triv.value.mul(&quad.value);
    // Euler factors of E: Π_{v | ℓ} (1 - 1/Nv) = (1 - 1/ℓ)(1 - χ(ℓ)/ℓ)
    let one_minus = rational(p, p as i64 - 1, p as i64, w)?;
    let e_p = one_minus.mul(&one_minus);
    let factors = rational_euler_product(&DirichletCharacter::trivial(), s_set, p, w)?
        .mul(&rational_euler_product(&chi, s_set, p, w)?);
    let reg = padic_regulator(field, p, w, false)?;
    let expected = PadicNumber::from_i64(p, 2 * field.h as i64, w)
        .mul(&reg)
        .mul(&e_p)
        .mul(&factors)
        .div(&field.sqrt_d(p, w, false)?)?;
    let (sign, digits) = signed_agreement(&residue, &expected);
    if digits < PRECISION_FLOOR as i64 {
        return Err(Error::Disagreement(format!("{}: residue {} but expected {}", field.label, residue, expected)));
    }
    Ok(DedekindReport { field: field.label.clone(), p, residue, expected, sign, digits })
}

#[derive(Clone, Debug)]
pub struct GammaRow {
    /// `χ_cyc(γ)`.
    pub u: PadicNumber,
    /// `c_γ = log_p χ_cyc(γ)`.
    pub c_gamma: PadicNumber,
    /// Order in `T = γ - 1` of the L-function viewed as a function of `T`.
    pub t_order: i64,
    /// Leading coefficient in `T`.
    pub zeta_star: PadicNumber,
    pub zeta_certified: i64,
    /// `c_γ^{t_order} · zeta_star`.
    pub leading_term: PadicNumber,
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub field: String,
    pub p: u64,
    pub s_set: Vec<u64>,
    /// `⟨ρ, 1⟩`.
    pub multiplicity: i64,
    pub rows: Vec<GammaRow>,
    /// Digits on which the leading terms of all rows agree.
    pub gamma_agreement: i64,
    /// The closed form on the regulator side.
    pub regulator_side: PadicNumber,
    pub sign: i8,
    pub regulator_agreement: i64,
}

/// The leading term at `T = 0` of `T ↦ L_{p,S}(1 + log_p(1+T)/c_γ, ρ)`, estimated at
/// `T = u^{p^k} - 1`, scaled by `c_γ^{ord_T}`.
pub fn leading_term_via_gamma(l: &PadicL, u: &PadicNumber) -> Result<GammaRow> {
    let p = l.prime();
    let w = l.precision() + 2 * crate::kubota_leopoldt::L_GUARD;
    let one = PadicNumber::one(p, w);
    let c_gamma = iwasawa_log(u)?;
    if c_gamma.is_zero() || c_gamma.valuation().unwrap_or(0) < 1 {
        return Err(Error::Invalid("χ_cyc(γ) must be a principal unit of infinite order".into()));
    }
    let r = l.trivial_multiplicity();
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    let mut uk = u.clone();
    for k in 0..=*LIMIT_WINDOW.end() {
        if k >= *LIMIT_WINDOW.start() {
            let t = uk.sub(&one);
            let y = iwasawa_log(&uk)?.div(&c_gamma)?;
            let scaled = l.scaled_value(&one.add(&y))?;
            // T^r ζ(T) = (T/y)^r (s - 1)^r L(s)
            let v = if r == 0 { scaled } else { t.div(&y)?.pow(r)?.mul(&scaled) };
            nodes.push(t);
            values.push(v);
        }
        uk = uk.pow(p as i64)?;
    }
    let ex = extrapolate_to_zero(&nodes, &values)?;
    let n = ex.len();
    let zeta_star = ex[n - 1].clone();
    let zeta_certified = zeta_star.relative_agreement(&ex[n - 2]);
    let leading_term = c_gamma.pow(-r)?.mul(&zeta_star);
    Ok(GammaRow { u: u.clone(), c_gamma, t_order: -r, zeta_star, zeta_certified, leading_term })
}

/// Recomputes `L*_{p,S}(1, ρ)` through the `T`-variable of each `γ` and compares with the
/// closed form; `ρ` is trivial for `Q` and the quadratic character otherwise.
pub fn interpolation_identity_check(
    field: &FieldData,
    p: u64,
    s_set: &[u64],
    gammas: &[PadicNumber],
    prec: u32,
) -> Result<IdentityReport> {
    field.validate()?;
    check_s(field, p, s_set)?;
    if gammas.is_empty() {
        return Err(Error::Invalid("no choice of γ given".into()));
    }
    let w = prec + 2 * crate::kubota_leopoldt::L_GUARD;
    let l = PadicL::new(&field.character()?, s_set, p, prec)?;
    let rows = gammas.iter().map(|u| leading_term_via_gamma(&l, u)).collect::<Result<Vec<_>>>()?;
    let gamma_agreement = rows
        .iter()
        .flat_map(|a| rows.iter().map(move |b| a.leading_term.relative_agreement(&b.leading_term)))
        .min()
        .unwrap_or(0);
    let regulator_side = if field.d == 1 {
        rational(p, p as i64 - 1, p as i64, w)?.mul(&rational_euler_product(&DirichletCharacter::trivial(), s_set, p, w)?)
    } else {
        closed_form(field, p, s_set, w, false)?.0
    };
    let (sign, regulator_agreement) = signed_agreement(&rows[0].leading_term, &regulator_side);
    if gamma_agreement < PRECISION_FLOOR as i64 || regulator_agreement < PRECISION_FLOOR as i64 {
        return Err(Error::Disagreement(format!(
            "{}: γ-routes agree to {gamma_agreement} digits, regulator side to {regulator_agreement}",
            field.label
        )));
    }
    Ok(IdentityReport {
        field: field.label.clone(),
        p,
        s_set: l.primes().iter().copied().collect(),
        multiplicity: l.trivial_multiplicity(),
        rows,
        gamma_agreement,
        regulator_side,
        sign,
        regulator_agreement,
    })
}

/// `1 + p` and `(1 + p)^2` (`5` and `25` for `p = 2`).
pub fn default_gammas(p: u64, prec: u32) -> Vec<PadicNumber> {
    let base = if p == 2 { 5 } else { 1 + p as i64 };
    let u = PadicNumber::from_i64(p, base, prec);
    vec![u.clone(), u.mul(&u)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_units_are_units() {
        for f in FieldData::catalogue() {
            f.validate().unwrap();
        }
        let json = r#"{ "label": "Q(sqrt2)", "d": 8, "h": 1, "unit": {"a":1,"b":1,"c":1}, "chi_mod": 8, "sqrt_seeds": {"7": 3, "23": 5} }"#;
        let f = FieldData::from_json(json).unwrap();
        assert_eq!(f.squarefree_part(), 2);
        let bad = json.replace("\"b\":1", "\"b\":2");
        assert!(FieldData::from_json(&bad).is_err());
    }

    #[test]
    fn regulator_flips_with_the_embedding() {
        let f = FieldData::by_label("Q(sqrt2)").unwrap();
        let a = padic_regulator(&f, 7, 30, false).unwrap();
        let b = padic_regulator(&f, 7, 30, true).unwrap();
        assert!(a.agreement(&b.neg()) >= 29);
        assert!(padic_regulator(&f, 2, 30, false).is_err());
        assert!(padic_regulator(&f, 11, 30, false).is_err());
        assert!(padic_regulator(&FieldData::rationals(), 5, 30, false).unwrap().sub(&PadicNumber::one(5, 30)).is_zero());
    }

    #[test]
    fn residues() {
        let r = residue_check_trivial(7, &[2, 7], 20).unwrap();
        assert!(r.digits >= 15);
        let want = rational(7, 3, 7, 30).unwrap();
        assert!(r.expected.agreement(&want) >= 20);
    }

    #[test]
    fn sqrt5_at_eleven() {
        let f = FieldData::by_label("sqrt5").unwrap();
        let r = stark_check_quadratic(&f, 11, &[5, 11], 20).unwrap();
        assert!(r.digits >= 15 && r.flip_invariance >= 15);
        let z = dedekind_residue_check(&f, 11, &[5, 11], 20).unwrap();
        assert!(z.digits >= 15);
    }
}
