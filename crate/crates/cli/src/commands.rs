use std::path::Path;

use serde_json::{json, Value};

use iwasawa_descent::complex::{
    decompose_dvr, hypertor, is_semisimple, verify_gecp, verify_prop38, BasedComplex, ComplexDocument, DvrComplex,
    ElementaryKind, Trivialization,
};
use iwasawa_descent::equivariant::{descent_square, torsion_class, EquivariantComplex};
use iwasawa_descent::kubota_leopoldt::{lp_interpolated, DirichletCharacter, PadicL, Truncation};
use iwasawa_descent::padic::{PadicNumber, PRECISION_FLOOR};
use iwasawa_descent::parse::{format_rational, parse_rational};
use iwasawa_descent::selftest::{run_all, suite, SelftestConfig};
use iwasawa_descent::stark::{
    default_gammas, interpolation_identity_check, residue_check_trivial, stark_check_quadratic, FieldData,
};
use iwasawa_descent::{Error, Result};

use crate::output::{padic, show, Report};

/// Flags shared by every command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub prime: Option<u64>,
    pub p_prec: Option<u32>,
    pub t_prec: Option<usize>,
    pub seed: u64,
    pub trials: Option<usize>,
    pub s_set: Option<Vec<u64>>,
}

impl RunConfig {
    pub fn p_prec(&self) -> u32 {
        self.p_prec.unwrap_or(30)
    }

    pub fn t_prec(&self) -> usize {
        self.t_prec.unwrap_or(40)
    }

    pub fn check(&self) -> Result<()> {
        if self.p_prec.is_some_and(|n| n < 10) || self.t_prec.is_some_and(|m| m < 10) {
            return Err(Error::Invalid("certified runs need --p-prec ≥ 10 and --t-prec ≥ 10".into()));
        }
        Ok(())
    }

    pub fn prime(&self) -> Result<u64> {
        self.prime.ok_or_else(|| Error::Invalid("--prime is required".into()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "prime": self.prime,
            "p_prec": self.p_prec(),
            "t_prec": self.t_prec(),
            "seed": self.seed,
            "trials": self.trials,
            "S": self.s_set,
        })
    }

    /// `S` as given, with `p` and `extra` added.
    fn primes_with(&self, p: u64, extra: &[u64]) -> Vec<u64> {
        let mut s = self.s_set.clone().unwrap_or_default();
        s.push(p);
        s.extend_from_slice(extra);
        s.sort_unstable();
        s.dedup();
        s
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Applies the command-line overrides to a complex document.
fn load_document(path: &Path, cfg: &RunConfig) -> Result<ComplexDocument> {
    let mut doc = ComplexDocument::from_json(&read(path)?)?;
    if let Some(p) = cfg.prime {
        doc.p = p;
    }
    if let Some(n) = cfg.p_prec {
        doc.p_prec = n;
    }
    if let Some(m) = cfg.t_prec {
        doc.t_prec = m;
    }
    Ok(doc)
}

pub fn analyze(path: &Path, with_dvr: bool, cfg: &RunConfig) -> Result<Report> {
    let doc = load_document(path, cfg)?;
    let mut r = Report::new();
    r.set("p", json!(doc.p));
    r.set("p_prec", json!(doc.p_prec));
    r.set("t_prec", json!(doc.t_prec));
    if doc.delta.is_some() {
        analyze_equivariant(&doc, &mut r)?;
        return Ok(r);
    }
    let parsed = doc.to_complex()?;
    let c = &parsed.complex;
    r.line(format!("complex over Z_{}[[T]], degrees {}..{}, ranks {:?}", c.prime(), c.lo(), c.hi(), c.ranks()));
    r.set("degrees", json!([c.lo(), c.hi()]));
    r.set("ranks", json!(c.ranks()));
    analyze_based(c, &parsed.trivialization, &mut r)?;
    if with_dvr {
        let d = dvr_report(&DvrComplex::from_based(c))?;
        for l in d.text {
            r.line(l);
        }
        r.ok &= d.ok;
        r.set("dvr", Value::Object(d.json));
    }
    Ok(r)
}

fn analyze_based(c: &BasedComplex, a: &Trivialization, r: &mut Report) -> Result<()> {
    let b = hypertor(c)?;
    r.line("hypertor H_i = H^{-i}(Z_p ⊗ C):");
    let mut table = Vec::new();
    for g in &b.groups {
        r.line(format!("  H_{:<3} free rank {}, torsion {:?}", g.homological_index(), g.free_rank, g.torsion));
        table.push(json!({ "degree": g.degree, "index": g.homological_index(), "free_rank": g.free_rank, "torsion": g.torsion }));
    }
    r.set("hypertor", json!(table));
    let cert = is_semisimple(c)?;
    r.line(format!("Bockstein ranks {:?} (degrees {:?})", cert.beta_rank, cert.degrees));
    r.line(format!("semisimple: {}", cert.verdict));
    r.set(
        "semisimplicity",
        json!({
            "verdict": cert.verdict,
            "degrees": cert.degrees,
            "h": cert.h,
            "bockstein_rank": cert.beta_rank,
            "kernel_dim": cert.ker_dim,
            "image_dim": cert.im_dim,
            "lengths": cert.lengths,
            "g": cert.g,
        }),
    );
    if !cert.verdict {
        r.line("leading term not defined: the Bockstein complex is not acyclic over Q_p");
        return Ok(());
    }
    if !c.is_rank_balanced() {
        r.line("leading term not defined: ranks in even and odd degrees differ");
        return Ok(());
    }
    let prop = verify_prop38(c, a)?;
    r.line(format!("r_Γ = {}, order of ch = {}", prop.r_gamma, prop.r_char));
    r.line(format!("leading term (Bockstein route)       {}", show(&prop.bockstein_leading)));
    r.line(format!("leading term (characteristic route)  {}", show(&prop.char_leading)));
    r.line(format!("routes agree to {} digits", prop.agreement));
    let ch = &prop.char_element;
    let mut ch_json = json!({ "t_order": ch.t_order(), "fraction": ch.to_string() });
    match ch.weierstrass() {
        Ok((num, den)) => {
            r.line(format!("ch = T^{} · {} / {}", ch.t_order(), num, den));
            ch_json["weierstrass"] = json!({
                "numerator": { "mu": num.mu, "lambda": num.lambda(), "form": num.to_string() },
                "denominator": { "mu": den.mu, "lambda": den.lambda(), "form": den.to_string() },
            });
        }
        Err(e) => r.line(format!("ch = {} (no Weierstrass form: {e})", ch)),
    }
    r.set("r_gamma", json!(prop.r_gamma));
    r.set("characteristic_element", ch_json);
    r.set(
        "leading_term",
        json!({
            "bockstein_route": padic(&prop.bockstein_leading),
            "characteristic_route": padic(&prop.char_leading),
            "agreement": prop.agreement,
        }),
    );
    let e = verify_gecp(c, a)?;
    r.line(format!(
        "χ_add = {}, χ_mult = {}, ord_p(leading term) = {}",
        e.chi_add,
        format_rational(&e.chi_mult),
        e.ord_leading
    ));
    r.set(
        "euler_characteristic",
        json!({ "chi_add": e.chi_add, "chi_mult": format_rational(&e.chi_mult), "ord_leading": e.ord_leading, "holds": e.holds }),
    );
    if !e.holds {
        r.fail(format!("χ_add = {} but the leading term has valuation {}", e.chi_add, e.ord_leading));
    }
    Ok(())
}

fn analyze_equivariant(doc: &ComplexDocument, r: &mut Report) -> Result<()> {
    let (c, a) = EquivariantComplex::from_document(doc)?;
    r.line(format!("complex over Z_{}[Δ][[T]], Δ = {:?}, ranks {:?}", c.prime(), c.delta(), c.ranks()));
    r.set("delta", json!(c.delta()));
    r.set("ranks", json!(c.ranks()));
    let class = torsion_class(&c)?;
    r.line(format!("torsion class: {class}"));
    r.set("torsion_class", json!(class.to_string()));
    let mut rows = Vec::new();
    for rho in c.characters()? {
        let row = match descent_square(&c, &a, &rho) {
            Ok(d) => {
                r.line(format!("  ρ = {}: r = {}, leading term {}, routes agree to {}", rho, d.r_twist, show(&d.via_twist), d.agreement));
                if d.r_k1 != d.r_twist || d.agreement < (c.p_prec() as i64).min(PRECISION_FLOOR as i64) {
                    r.fail(format!("descent routes differ at ρ = {rho}"));
                }
                json!({
                    "character": rho.to_string(),
                    "r": d.r_twist,
                    "r_k1": d.r_k1,
                    "leading_term": padic(&d.via_twist),
                    "via_k1": padic(&d.via_k1),
                    "agreement": d.agreement,
                })
            }
            Err(e) => {
                r.line(format!("  ρ = {}: {}", rho, e));
                json!({ "character": rho.to_string(), "error": e.to_string() })
            }
        };
        rows.push(row);
    }
    r.set("characters", json!(rows));
    Ok(())
}

fn dvr_report(c: &DvrComplex) -> Result<Report> {
    let mut r = Report::new();
    let d = decompose_dvr(c)?;
    let kind = |k: ElementaryKind| if k == ElementaryKind::T { "T" } else { "1" };
    let summands: Vec<Value> = d.summands.iter().map(|s| json!({ "degree": s.degree, "map": kind(s.kind) })).collect();
    let (ones, ts) = d.multiset();
    r.line(format!("over Λ_(T): {ones} summand(s) [R --1--> R], {ts} summand(s) [R --T--> R]"));
    for s in &d.summands {
        r.line(format!("  [R --{}--> R] from degree {}", kind(s.kind), s.degree));
    }
    let bases: Vec<Value> = d
        .bases
        .iter()
        .map(|b| json!((0..b.rows()).map(|i| (0..b.cols()).map(|j| b.get(i, j).to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()))
        .collect();
    let reassembles = d.reassembles(c)?;
    r.line(format!("bases reassemble the complex: {reassembles}"));
    if !reassembles {
        r.fail("the new bases do not conjugate the complex to the sum of summands");
    }
    r.set("summands", json!(summands));
    r.set("counts", json!({ "one": ones, "t": ts }));
    r.set("bases", json!(bases));
    r.set("reassembles", json!(reassembles));
    Ok(r)
}

pub fn decompose(path: &Path, cfg: &RunConfig) -> Result<Report> {
    let doc = load_document(path, cfg)?;
    if doc.delta.is_some() {
        return Err(Error::Invalid("decompose takes a complex over Λ; twist equivariant documents first".into()));
    }
    let parsed = doc.to_complex()?;
    dvr_report(&DvrComplex::from_based(&parsed.complex))
}

fn truncation_json(t: &Truncation) -> Value {
    json!({ "F": t.f_cap, "terms": t.terms, "working_digits": t.working_digits })
}

fn parse_s(s: &str, p: u64, prec: u32) -> Result<(PadicNumber, Option<i64>)> {
    let q = parse_rational(s)?;
    let int = if q.is_integer() { q.numer().try_into().ok() } else { None };
    Ok((PadicNumber::from_rational(p, q.numer(), q.denom(), prec)?, int))
}

pub fn lp(chi: &str, s: &str, cfg: &RunConfig) -> Result<Report> {
    let p = cfg.prime()?;
    let n = cfg.p_prec();
    let rho = DirichletCharacter::parse(chi, p)?;
    let s_set = cfg.primes_with(p, &[]);
    let mut r = Report::new();
    let (s_val, s_int) = parse_s(s, p, n + 20)?;
    r.set("character", json!({ "spec": chi, "modulus": rho.primitive().modulus(), "even": rho.is_even(), "trivial": rho.is_trivial() }));
    r.set("s", json!(s));
    r.set("S", json!(s_set));
    r.line(format!("L_{{{p},S}}(s, χ) with χ: {chi}, S = {s_set:?}, s = {s}"));
    let l = PadicL::new(&rho, &s_set, p, n)?;
    if let Some(t) = l.series().map(|x| x.truncation()) {
        r.line(format!("truncation: F = {}, {} terms, {} working digits", t.f_cap, t.terms, t.working_digits));
        r.set("truncation", truncation_json(t));
    }
    let at_one = s_int == Some(1);
    if at_one && l.trivial_multiplicity() > 0 {
        let lead = l.leading_term_at_1()?;
        r.line(format!("pole of order {} at s = 1", lead.order));
        r.line(format!("leading term {}", show(&lead.value)));
        r.line(format!("certified digits {}, agreement with the t-expansion {}", lead.certified_digits, lead.route_agreement));
        r.set("pole", json!(true));
        r.set("order", json!(lead.order));
        r.set("leading_term", padic(&lead.value));
        r.set("certified_digits", json!(lead.certified_digits));
        r.set("route_agreement", json!(lead.route_agreement));
        if lead.route_agreement < PRECISION_FLOOR as i64 {
            r.fail("limit and t-expansion disagree");
        }
        return Ok(r);
    }
    let v = l.value(&s_val)?;
    r.set("pole", json!(false));
    r.set("vanishes_identically", json!(v.zero));
    r.set("value", padic(&v.value));
    r.set("digits", json!(v.digits));
    if v.zero {
        r.line("χ is odd: L_p vanishes identically");
    }
    r.line(format!("value {}", show(&v.value)));
    r.line(format!("digits {}", v.digits));
    if let Some(k) = s_int.filter(|k| *k <= 0) {
        let oracle = lp_interpolated(k, &rho, &s_set, p, n)?;
        let agree = v.value.relative_agreement(&oracle).min(n as i64);
        let need = (n as i64 - 8).max((n as i64).min(PRECISION_FLOOR as i64));
        r.line(format!("Bernoulli interpolation {} agrees to {agree} digits (need {need})", show(&oracle)));
        r.set("interpolation", json!({ "oracle": padic(&oracle), "agreement": agree, "required": need }));
        if !v.zero && agree < need {
            r.fail("value differs from the Bernoulli interpolation");
        }
    }
    Ok(r)
}

fn load_field(spec: &str) -> Result<FieldData> {
    let path = Path::new(spec);
    if spec == "Q" {
        Ok(FieldData::rationals())
    } else if path.is_file() {
        FieldData::from_json(&read(path)?)
    } else {
        FieldData::by_label(spec)
    }
}

fn ramified(field: &FieldData) -> Vec<u64> {
    let d = field.d.unsigned_abs();
    (2..=d).filter(|l| d % l == 0 && iwasawa_descent::padic::is_prime(*l)).collect()
}

pub fn stark(field: &str, cfg: &RunConfig) -> Result<Report> {
    let p = cfg.prime()?;
    let n = cfg.p_prec();
    let field = load_field(field)?;
    let s_set = cfg.primes_with(p, &ramified(&field));
    let mut r = Report::new();
    r.set("field", json!(field.label));
    r.set("S", json!(s_set));
    r.line(format!("{} at p = {p}, S = {s_set:?}", field.label));
    if field.d == 1 {
        let res = residue_check_trivial(p, &s_set, n)?;
        r.line(format!("residue of ζ_{{p,S}} at s = 1: {}", show(&res.residue)));
        r.line(format!("expected (1 - 1/p)·E_S: {}", show(&res.expected)));
        r.line(format!("agreement {} digits, certified {}", res.digits, res.certified_digits));
        r.set(
            "residue",
            json!({ "value": padic(&res.residue), "expected": padic(&res.expected), "digits": res.digits, "certified": res.certified_digits }),
        );
    } else {
        let st = stark_check_quadratic(&field, p, &s_set, n)?;
        r.line(format!("L_{{p,S}}(1, ρ)       {}", show(&st.analytic)));
        r.line(format!("closed form          {}", show(&st.closed_form)));
        r.line(format!("regulator log_p(ε)   {}", show(&st.regulator)));
        r.line(format!("sign {:+}, agreement {} digits, √d flip invariance {}", st.sign, st.digits, st.flip_invariance));
        r.set(
            "stark",
            json!({
                "analytic": padic(&st.analytic),
                "analytic_certified": st.analytic_certified,
                "closed_form": padic(&st.closed_form),
                "regulator": padic(&st.regulator),
                "sign": st.sign,
                "digits": st.digits,
                "flip_invariance": st.flip_invariance,
            }),
        );
        if st.flip_invariance < st.digits.min(PRECISION_FLOOR as i64) {
            r.fail("closed form changes under √d ↦ -√d");
        }
    }
    let id = interpolation_identity_check(&field, p, &s_set, &default_gammas(p, n + 20), n)?;
    let mut rows = Vec::new();
    for g in &id.rows {
        r.line(format!(
            "γ with χ_cyc(γ) = {}: c_γ-route leading term {} ({} digits)",
            show(&g.u),
            show(&g.leading_term),
            g.zeta_certified
        ));
        rows.push(json!({
            "u": padic(&g.u),
            "c_gamma": padic(&g.c_gamma),
            "t_order": g.t_order,
            "zeta_star": padic(&g.zeta_star),
            "zeta_certified": g.zeta_certified,
            "leading_term": padic(&g.leading_term),
        }));
    }
    r.line(format!("γ-independence {} digits, regulator side agreement {} (sign {:+})", id.gamma_agreement, id.regulator_agreement, id.sign));
    r.set(
        "interpolation_identity",
        json!({
            "multiplicity": id.multiplicity,
            "rows": rows,
            "gamma_agreement": id.gamma_agreement,
            "regulator_side": padic(&id.regulator_side),
            "regulator_agreement": id.regulator_agreement,
            "sign": id.sign,
        }),
    );
    Ok(r)
}

pub fn selftest(suites: &[u32], parallel: bool, corrupt_sign: bool, cfg: &RunConfig) -> Result<Report> {
    let st = SelftestConfig {
        seed: cfg.seed,
        p_prec: cfg.p_prec(),
        t_prec: cfg.t_prec(),
        trials: cfg.trials,
        parallel,
        corrupt_sign,
    };
    let reports = if suites.is_empty() {
        run_all(&st)
    } else {
        suites.iter().map(|&id| suite(&st, id)).collect::<Result<Vec<_>>>()?
    };
    let mut r = Report::new();
    let mut rows = Vec::new();
    for s in &reports {
        r.line(s.line());
        for note in &s.notes {
            r.line(format!("    {note}"));
        }
        if !s.passed() {
            r.ok = false;
        }
        // timings stay out of the machine-readable report so that it is reproducible
        rows.push(json!({
            "id": s.id,
            "name": s.name,
            "passed": s.passed(),
            "trials": s.trials,
            "failures": s.failures,
            "min_digits": s.min_digits,
            "required_digits": s.required_digits,
            "notes": s.notes,
        }));
    }
    r.set("suites", json!(rows));
    r.set("corrupt_sign", json!(corrupt_sign));
    Ok(r)
}
