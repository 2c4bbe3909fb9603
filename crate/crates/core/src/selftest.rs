//! Seeded property suites over random complexes and the L-function checks.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::random::{random_dvr_complex, random_pieces, random_semisimple, GeneratorOptions, PieceKind};
use crate::complex::{verify_with, SignConvention};
use crate::complex::{char_element, decompose_dvr, verify_gecp, DvrComplex, Trivialization};
use crate::equivariant::meromorphic_profile;
use crate::error::{Error, Result};
use crate::kubota_leopoldt::{lp_interpolated, DirichletCharacter, PadicL};
use crate::linalg::Matrix;
use crate::padic::{PadicNumber, PRECISION_FLOOR};
use crate::laurent::LaurentSeries;
use crate::series::{IwasawaSeries, LambdaFraction};
use crate::stark::{default_gammas, interpolation_identity_check, residue_check_trivial, stark_check_quadratic, FieldData};

#[derive(Clone, Debug)]
pub struct SelftestConfig {
    pub seed: u64,
    pub p_prec: u32,
    pub t_prec: usize,
    /// Replaces every suite's trial count when set.
    pub trials: Option<usize>,
    pub parallel: bool,
    /// Drops the sign correction in the Bockstein route; the route suite must then fail.
    pub corrupt_sign: bool,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { seed: 2024, p_prec: 30, t_prec: 40, trials: None, parallel: false, corrupt_sign: false }
    }
}

impl SelftestConfig {
    fn trials(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    /// A digit requirement stated at `N = 30`, lowered one-for-one with `N`.
    pub fn required(&self, at_30: i64) -> i64 {
        let lowered = at_30 - (30 - self.p_prec as i64).max(0);
        lowered.max(at_30.min(PRECISION_FLOOR as i64))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub id: u32,
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Smallest number of digits of agreement seen, where digits are measured.
    pub min_digits: Option<i64>,
    pub required_digits: Option<i64>,
    pub seconds: f64,
    /// The first few failures.
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }

    pub fn line(&self) -> String {
        let digits = match (self.min_digits, self.required_digits) {
            (Some(d), Some(r)) => format!(", digits {d} (need {r})"),
            (Some(d), None) => format!(", digits {d}"),
            _ => String::new(),
        };
        format!(
            "{} criterion {} {}: {}/{} ok{}, {:.1}s",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.trials - self.failures,
            self.trials,
            digits,
            self.seconds
        )
    }
}

/// Outcome of one trial: `Ok(digits)` or a failure message.
type Trial = std::result::Result<Option<i64>, String>;

fn trial_rng(seed: u64, suite: u32, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((suite as u64) << 48));
    rng.set_stream(trial as u64);
    rng
}

fn run<F>(cfg: &SelftestConfig, id: u32, name: &str, n: usize, required: Option<i64>, f: F) -> SuiteReport
where
    F: Fn(usize) -> Trial + Sync,
{
    let start = Instant::now();
    let results: Vec<Trial> = if cfg.parallel { (0..n).into_par_iter().map(&f).collect() } else { (0..n).map(&f).collect() };
    let mut failures = 0;
    let mut notes = Vec::new();
    let mut min_digits: Option<i64> = None;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(d) => {
                if let Some(d) = d {
                    min_digits = Some(min_digits.map_or(d, |m| m.min(d)));
                    if required.is_some_and(|req| d < req) {
                        failures += 1;
                        if notes.len() < 5 {
                            notes.push(format!("trial {i}: {d} digits"));
                        }
                    }
                }
            }
            Err(e) => {
                failures += 1;
                if notes.len() < 5 {
                    notes.push(format!("trial {i}: {e}"));
                }
            }
        }
    }
    SuiteReport {
        id,
        name: name.into(),
        trials: n,
        failures,
        min_digits,
        required_digits: required,
        seconds: start.elapsed().as_secs_f64(),
        notes,
    }
}

const PRIMES: [u64; 3] = [3, 5, 7];

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

/// Both routes to the leading term on random semisimple pairs, against the generator's oracle.
pub fn suite_routes(cfg: &SelftestConfig) -> SuiteReport {
    let conv = if cfg.corrupt_sign { SignConvention::OmitCorrection } else { SignConvention::Standard };
    let opts = GeneratorOptions::default();
    let req = cfg.required(25);
    run(cfg, 1, "route agreement", cfg.trials(500), Some(req), |i| {
        let p = PRIMES[i % 3];
        let mut rng = trial_rng(cfg.seed, 1, i);
        let g = random_semisimple(&mut rng, p, cfg.p_prec, cfg.t_prec, &opts).map_err(e)?;
        let rep = verify_with(&g.complex, &g.trivialization, conv).map_err(e)?;
        if rep.r_char != g.expected_r {
            return Err(format!("order {} but the construction has {}", rep.r_char, g.expected_r));
        }
        if rep.char_leading != g.expected_leading {
            return Err(format!("leading term {} but the construction has {}", rep.char_leading.pretty(), g.expected_leading.pretty()));
        }
        Ok(Some(rep.agreement))
    })
}

/// `[[T, 1], [0, T]]` from degree 0 to degree 1: not a sum of elementary complexes.
fn jordan_block(p: u64, t_prec: usize) -> Result<DvrComplex> {
    let lf = |c: &[i64]| LaurentSeries::from_series(&IwasawaSeries::from_i64s(p, c, 40, t_prec));
    let rows = vec![vec![lf(&[0, 1]), lf(&[1])], vec![lf(&[0]), lf(&[0, 1])]];
    DvrComplex::new(p, t_prec, 0, vec![2, 2], vec![Matrix::from_rows(rows, &lf(&[0]))])
}

/// Splitting conjugated complexes over `Λ_(T)` into `[R --1--> R]` and `[R --T--> R]`.
pub fn suite_dvr(cfg: &SelftestConfig) -> SuiteReport {
    let opts = GeneratorOptions { max_p_power: 0, ..Default::default() };
    let n = cfg.trials(200);
    let t_prec = cfg.t_prec;
    run(cfg, 2, "DVR decomposition", n + 1, None, |i| {
        if i == n {
            return match decompose_dvr(&jordan_block(5, t_prec).map_err(e)?) {
                Err(Error::NotSemisimpleOverR(_)) => Ok(None),
                other => Err(format!("[[T,1],[0,T]] was not rejected: {other:?}")),
            };
        }
        let p = PRIMES[i % 3];
        let mut rng = trial_rng(cfg.seed, 2, i);
        let pieces = random_pieces(&mut rng, &opts);
        let c = random_dvr_complex(&mut rng, &pieces, p, cfg.p_prec, t_prec).map_err(e)?;
        let d = decompose_dvr(&c).map_err(e)?;
        let t = pieces.iter().filter(|q| q.kind == PieceKind::T).count();
        if d.multiset() != (pieces.len() - t, t) {
            return Err(format!("multiset {:?} but built from {:?}", d.multiset(), pieces));
        }
        if !d.reassembles(&c).map_err(e)? {
            return Err("bases do not reassemble the complex".into());
        }
        Ok(None)
    })
}

/// `χ_add = ord_p L*` and `χ_mult = p^{χ_add}`.
pub fn suite_euler(cfg: &SelftestConfig) -> SuiteReport {
    let opts = GeneratorOptions::default();
    run(cfg, 3, "Euler characteristic", cfg.trials(500), None, |i| {
        let p = PRIMES[i % 3];
        let mut rng = trial_rng(cfg.seed, 3, i);
        let g = random_semisimple(&mut rng, p, cfg.p_prec, cfg.t_prec, &opts).map_err(e)?;
        let rep = verify_gecp(&g.complex, &g.trivialization).map_err(e)?;
        let pk = BigRational::from_integer(BigInt::from(p).pow(rep.chi_add.unsigned_abs() as u32));
        let want = if rep.chi_add >= 0 { pk } else { BigRational::one() / pk };
        if !rep.holds || rep.chi_add != g.expected_ord {
            return Err(format!("χ_add = {} but ord L* = {} (construction {})", rep.chi_add, rep.ord_leading, g.expected_ord));
        }
        if rep.chi_mult != want {
            return Err(format!("χ_mult = {} is not p^{}", rep.chi_mult, rep.chi_add));
        }
        Ok(None)
    })
}

fn random_unit_poly(rng: &mut ChaCha8Rng, p: u64, prec: u32, t_prec: usize) -> IwasawaSeries {
    let b = p as i64;
    let mut c: Vec<i64> = (0..4).map(|_| rng.gen_range(-b * b..=b * b)).collect();
    c[0] = rng.gen_range(1..b) + b * rng.gen_range(0..b);
    IwasawaSeries::from_i64s(p, &c, prec, t_prec)
}

/// `T^r G / H` with `G, H` units of Λ and `r ∈ [-3, 3]`.
pub fn random_fraction(rng: &mut ChaCha8Rng, p: u64, prec: u32, t_prec: usize) -> Result<(i64, LambdaFraction)> {
    let r: i64 = rng.gen_range(-3..=3);
    let g = LambdaFraction::from_series(&random_unit_poly(rng, p, prec, t_prec));
    let h = LambdaFraction::from_series(&random_unit_poly(rng, p, prec, t_prec));
    let t = LambdaFraction::from_series(&IwasawaSeries::t(p, prec, t_prec));
    let mut f = g.div(&h)?;
    for _ in 0..r.abs() {
        f = if r > 0 { f.mul(&t) } else { f.div(&t)? };
    }
    Ok((r, f))
}

/// `s ↦ F(u^s - 1)` near 0 for random `F`, `u = 1 + p`, `s = p^k`, `k = 6..12`.
pub fn suite_calculus(cfg: &SelftestConfig) -> SuiteReport {
    let window = 6..=12u32;
    run(cfg, 4, "leading coefficient calculus", cfg.trials(100), None, |i| {
        let p = PRIMES[i % 3];
        let mut rng = trial_rng(cfg.seed, 4, i);
        let k_max = *window.end();
        let w = cfg.p_prec + 10 + 4 * (k_max + 2);
        let (r, f) = random_fraction(&mut rng, p, w, cfg.t_prec.min(30)).map_err(e)?;
        let u = PadicNumber::from_i64(p, 1 + p as i64, w);
        let prof = meromorphic_profile(&f, &u, r, window.clone()).map_err(e)?;
        if !prof.scaled_converges {
            let errs: Vec<i64> = prof.rows.iter().map(|x| x.scaled_error).collect();
            return Err(format!("r = {r}: scaled errors {errs:?}"));
        }
        if prof.derivative_converges == Some(false) {
            let errs: Vec<Option<i64>> = prof.rows.iter().map(|x| x.derivative_error).collect();
            return Err(format!("r = {r}: finite-difference errors {errs:?}"));
        }
        Ok(None)
    })
}

fn quadratic_discriminants() -> [i64; 4] {
    [5, 8, 12, 13]
}

/// `L_{p,S}(n, ρ)` against the Bernoulli formula for `n = -1..-8`.
pub fn suite_interpolation(cfg: &SelftestConfig) -> SuiteReport {
    let mut cases = Vec::new();
    for p in PRIMES {
        let mut chars = vec![DirichletCharacter::trivial()];
        chars.extend(quadratic_discriminants().iter().map(|&d| DirichletCharacter::quadratic(d).expect("fundamental")));
        for rho in chars {
            for s_set in [vec![p], vec![p, 2]] {
                cases.push((p, rho.clone(), s_set));
            }
        }
    }
    let req = cfg.required(cfg.p_prec as i64 - 8).max(1);
    let cases = &cases;
    let mut rep = run(cfg, 5, "interpolation", cases.len(), Some(req), |i| {
        let (p, rho, s_set) = &cases[i];
        let l = PadicL::new(rho, s_set, *p, cfg.p_prec).map_err(e)?;
        let mut worst = i64::MAX;
        for n in -8..=-1 {
            let s = PadicNumber::from_i64(*p, n, cfg.p_prec + 20);
            let v = l.value(&s).map_err(e)?.value;
            let o = lp_interpolated(n, rho, s_set, *p, cfg.p_prec).map_err(e)?;
            worst = worst.min(o.relative_agreement(&v));
        }
        Ok(Some(worst))
    });
    rep.name = format!("interpolation ({} characters × n = -8..-1)", cases.len());
    rep
}

/// `lim (s - 1) ζ_{p,S}(s)` against `(1 - 1/p) Π (1 - 1/ℓ)`.
pub fn suite_residue(cfg: &SelftestConfig) -> SuiteReport {
    let cases: Vec<(u64, Vec<u64>)> = PRIMES.iter().flat_map(|&p| [(p, vec![p]), (p, vec![p, 2])]).collect();
    let req = cfg.required(12);
    run(cfg, 6, "residue of the p-adic zeta function", cases.len(), Some(req), |i| {
        let (p, s_set) = &cases[i];
        let r = residue_check_trivial(*p, s_set, cfg.p_prec).map_err(e)?;
        Ok(Some(r.digits.min(r.certified_digits)))
    })
}

/// `L_p(1, χ_d) = ±E_S (1 - χ(p)/p) 2h log_p ε / √d`.
pub fn suite_stark(cfg: &SelftestConfig) -> SuiteReport {
    let cases = [("Q(sqrt2)", 7u64, vec![2u64, 7]), ("Q(sqrt5)", 11, vec![5, 11])];
    let req = cfg.required(15);
    run(cfg, 7, "class number formula", cases.len(), Some(req), |i| {
        let (label, p, s_set) = &cases[i];
        let f = FieldData::by_label(label).map_err(e)?;
        let r = stark_check_quadratic(&f, *p, s_set, cfg.p_prec).map_err(e)?;
        if r.flip_invariance < req {
            return Err(format!("closed form changes under √d ↦ -√d beyond {} digits", r.flip_invariance));
        }
        Ok(Some(r.digits))
    })
}

/// The leading term at `s = 1` through the `T`-variable of `γ` with `χ_cyc(γ) ∈ {1+p, (1+p)²}`.
pub fn suite_gamma(cfg: &SelftestConfig) -> SuiteReport {
    let mut cases: Vec<(FieldData, u64, Vec<u64>)> =
        PRIMES.iter().flat_map(|&p| [(FieldData::rationals(), p, vec![p]), (FieldData::rationals(), p, vec![p, 2])]).collect();
    cases.push((FieldData::by_label("Q(sqrt2)").expect("catalogue"), 7, vec![2, 7]));
    cases.push((FieldData::by_label("Q(sqrt5)").expect("catalogue"), 11, vec![5, 11]));
    let req = cfg.required(12);
    let cases = &cases;
    run(cfg, 8, "independence of γ", cases.len(), Some(req), |i| {
        let (field, p, s_set) = &cases[i];
        let gammas = default_gammas(*p, cfg.p_prec + 20);
        let r = interpolation_identity_check(field, *p, s_set, &gammas, cfg.p_prec).map_err(e)?;
        Ok(Some(r.gamma_agreement.min(r.regulator_agreement)))
    })
}

/// `[C ⊕ C', a ⊕ a'] = [C, a][C', a']` and `[C[1], a^{-1}] = [C, a]^{-1}`.
pub fn suite_k1(cfg: &SelftestConfig) -> SuiteReport {
    let opts = GeneratorOptions::default();
    let n = cfg.trials(100);
    let t_prec = cfg.t_prec.min(20);
    run(cfg, 9, "K1 relations", 2 * n, None, |i| {
        let p = PRIMES[i % 3];
        let mut rng = trial_rng(cfg.seed, 9, i);
        let g = random_semisimple(&mut rng, p, cfg.p_prec, t_prec, &opts).map_err(e)?;
        let ch = char_element(&g.complex, &g.trivialization).map_err(e)?;
        if i < n {
            let h = random_semisimple(&mut rng, p, cfg.p_prec, t_prec, &opts).map_err(e)?;
            let sum = g.complex.direct_sum(&h.complex).map_err(e)?;
            let a: Trivialization = g.trivialization.direct_sum(&g.complex, &h.trivialization, &h.complex).map_err(e)?;
            let lhs = char_element(&sum, &a).map_err(e)?;
            let rhs = ch.mul(&char_element(&h.complex, &h.trivialization).map_err(e)?);
            if !lhs.eq_at_precision(&rhs) {
                return Err(format!("direct sum of {:?} and {:?} is not multiplicative", g.pieces, h.pieces));
            }
        } else {
            let shifted = g.complex.shift(1);
            let a = g.trivialization.shifted(&g.complex).map_err(e)?;
            let prod = char_element(&shifted, &a).map_err(e)?.mul(&ch);
            if !prod.eq_at_precision(&LambdaFraction::one(p, cfg.p_prec + 10, t_prec)) {
                return Err(format!("shift of {:?} is not the inverse class", g.pieces));
            }
        }
        Ok(None)
    })
}

/// The suite for criterion `id` (1 to 9).
pub fn suite(cfg: &SelftestConfig, id: u32) -> Result<SuiteReport> {
    Ok(match id {
        1 => suite_routes(cfg),
        2 => suite_dvr(cfg),
        3 => suite_euler(cfg),
        4 => suite_calculus(cfg),
        5 => suite_interpolation(cfg),
        6 => suite_residue(cfg),
        7 => suite_stark(cfg),
        8 => suite_gamma(cfg),
        9 => suite_k1(cfg),
        _ => return Err(Error::Invalid(format!("no suite {id}"))),
    })
}

pub fn run_all(cfg: &SelftestConfig) -> Vec<SuiteReport> {
    (1..=9).map(|id| suite(cfg, id).expect("ids 1..=9 exist")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_follow_precision() {
        let mut cfg = SelftestConfig::default();
        assert_eq!(cfg.required(25), 25);
        cfg.p_prec = 10;
        assert_eq!(cfg.required(25), 5);
        assert_eq!(cfg.required(3), 3);
    }

    #[test]
    fn small_runs_pass() {
        let cfg = SelftestConfig { trials: Some(4), t_prec: 20, ..Default::default() };
        for id in [1, 2, 3, 4, 9] {
            let r = suite(&cfg, id).unwrap();
            assert!(r.passed(), "{}: {:?}", r.line(), r.notes);
        }
    }
}
