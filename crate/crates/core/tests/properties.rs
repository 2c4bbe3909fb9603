use proptest::prelude::*;

use iwasawa_descent::equivariant::FiniteCharacter;
use iwasawa_descent::kubota_leopoldt::DirichletCharacter;
use iwasawa_descent::kubota_leopoldt::{lp_interpolated, PadicL};
use iwasawa_descent::laurent::LaurentSeries;
use iwasawa_descent::padic::{hensel_sqrt, iwasawa_log, teichmuller, PadicNumber};
use iwasawa_descent::series::{weierstrass_prepare, IwasawaSeries};
use iwasawa_descent::Error;

const PREC: u32 = 30;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11])
}

fn unit(p: u64, x: i64) -> PadicNumber {
    let x = if x % p as i64 == 0 { x + 1 } else { x };
    PadicNumber::from_i64(p, x, PREC)
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-1000i64..1000, 1..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_laws(p in prime(), a in -10_000i64..10_000, b in -10_000i64..10_000, c in 1i64..10_000) {
        let (x, y) = (PadicNumber::from_i64(p, a, PREC), PadicNumber::from_i64(p, b, PREC));
        let z = PadicNumber::from_i64(p, c, PREC).shift(-2);
        prop_assert!(x.add(&y).sub(&y) == x);
        prop_assert!(x.mul(&y.add(&z)) == x.mul(&y).add(&x.mul(&z)));
        prop_assert!(x.mul(&z).div(&z).unwrap() == x);
        if let (Some(vx), Some(vz)) = (x.valuation(), z.valuation()) {
            prop_assert_eq!(x.mul(&z).valuation(), Some(vx + vz));
        }
    }

    #[test]
    fn log_is_a_homomorphism(p in prime(), a in 1i64..1_000_000, b in 1i64..1_000_000) {
        let (u, v) = (unit(p, a), unit(p, b));
        let lhs = iwasawa_log(&u.mul(&v)).unwrap();
        let rhs = iwasawa_log(&u).unwrap().add(&iwasawa_log(&v).unwrap());
        prop_assert!(lhs == rhs, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn teichmuller_is_a_root_of_unity(p in prime(), a in 1i64..1_000_000) {
        let u = unit(p, a);
        let w = teichmuller(&u).unwrap();
        prop_assert!(w.pow(p as i64 - 1).unwrap() == PadicNumber::one(p, PREC));
        prop_assert!(w.sub(&u).val_or_abs() >= 1);
    }

    #[test]
    fn hensel_square_roots(p in prime(), a in 1i64..1_000_000) {
        let u = unit(p, a);
        let sq = u.mul(&u);
        let seed = u.residue(1).unwrap().to_string().parse::<i64>().unwrap();
        let r = hensel_sqrt(&sq, seed).unwrap();
        prop_assert!(r.mul(&r) == sq);
    }

    #[test]
    fn series_products_associate(p in prime(), f in coeffs(), g in coeffs(), h in coeffs()) {
        let s = |c: &[i64]| IwasawaSeries::from_i64s(p, c, PREC, 12);
        let (f, g, h) = (s(&f), s(&g), s(&h));
        prop_assert!(f.mul(&g).mul(&h).eq_at_precision(&f.mul(&g.mul(&h))));
        prop_assert!(f.mul(&g).eq_at_precision(&g.mul(&f)));
    }

    #[test]
    fn unit_series_invert(p in prime(), c0 in 1i64..1000, rest in coeffs()) {
        let mut c = vec![if c0 % p as i64 == 0 { c0 + 1 } else { c0 }];
        c.extend(rest);
        let f = IwasawaSeries::from_i64s(p, &c, PREC, 12);
        let g = f.inverse().unwrap();
        prop_assert!(f.mul(&g).eq_at_precision(&IwasawaSeries::one(p, PREC, 12)));
    }

    #[test]
    fn weierstrass_recombines(p in prime(), c in coeffs(), k in 0u32..3) {
        let f = IwasawaSeries::from_i64s(p, &c, PREC, 12);
        prop_assume!(!f.is_zero());
        let f = f.scale(&PadicNumber::one(p, PREC).shift(k as i64));
        match weierstrass_prepare(&f) {
            Ok(w) => prop_assert!(w.recombine().eq_at_precision(&f)),
            Err(Error::IndeterminateAtPrecision(_)) => {
                let n = (0..=12).find(|&i| f.coeff(i).val_or_abs() == k as i64).unwrap();
                prop_assert!(2 * n > 12);
            }
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn twists_compose(p in prime(), c in coeffs(), i in 1i64..50, j in 1i64..50) {
        let f = IwasawaSeries::from_i64s(p, &c, PREC, 12);
        let one = PadicNumber::one(p, PREC);
        let a = one.add(&PadicNumber::from_i64(p, i * p as i64, PREC));
        let b = one.add(&PadicNumber::from_i64(p, j * p as i64, PREC));
        let twice = f.substitute_twist(&a).unwrap().substitute_twist(&b).unwrap();
        let once = f.substitute_twist(&a.mul(&b)).unwrap();
        prop_assert!(twice.eq_at_precision(&once));
    }

    #[test]
    fn laurent_field_laws(p in prime(), f in coeffs(), g in coeffs(), e in 0i64..3) {
        let s = |c: &[i64]| LaurentSeries::from_series(&IwasawaSeries::from_i64s(p, c, PREC, 12));
        let (x, y) = (s(&f), s(&g));
        prop_assume!(!y.is_zero());
        let y = y.mul(&LaurentSeries::t(p, PREC, 12).scale(&PadicNumber::one(p, PREC).shift(e)));
        let q = x.div(&y).unwrap();
        prop_assert!(q.mul(&y).eq_at_precision(&x), "{} / {} = {}", x, y, q);
        prop_assert!(x.add(&y).sub(&y).eq_at_precision(&x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn character_orthogonality(
        p in prop::sample::select(vec![5u64, 7, 13]),
        shape in prop::sample::select(vec![vec![2u64], vec![2, 2], vec![3], vec![4], vec![2, 6], vec![6]]),
    ) {
        let m = iwasawa_descent::padic::root_order(p);
        prop_assume!(shape.iter().all(|d| m % d == 0));
        let chars = FiniteCharacter::all(p, &shape).unwrap();
        let elements = FiniteCharacter::elements(&shape);
        prop_assert_eq!(chars.len(), elements.len());
        for chi in &chars {
            let sum = elements.iter().fold(PadicNumber::exact_zero(p), |acc, g| acc.add(&chi.value_at(g, PREC)));
            let expected = if chi.is_trivial() { elements.len() as i64 } else { 0 };
            prop_assert!(sum == PadicNumber::from_i64(p, expected, PREC), "{}: {}", chi, sum);
            prop_assert!(chi.mul(&chi.conj()).unwrap().is_trivial());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn euler_factors_remove_and_restore(
        d in prop::sample::select(vec![1i64, 5, 8, 12, 13]),
        l in prop::sample::select(vec![2u64, 7, 11]),
        s_num in -20i64..20,
    ) {
        let p = 3;
        let chi = if d == 1 { DirichletCharacter::trivial() } else { DirichletCharacter::quadratic(d).unwrap() };
        let s = PadicNumber::from_i64(p, s_num, PREC).shift(1);
        let s = PadicNumber::one(p, PREC).add(&s);
        let small = PadicL::new(&chi, &[p], p, PREC).unwrap();
        let big = PadicL::new(&chi, &[p, l], p, PREC).unwrap();
        let e = big.euler_factor(l, &s).unwrap();
        let (a, b) = (small.scaled_value(&s).unwrap(), big.scaled_value(&s).unwrap());
        prop_assert!(a.mul(&e) == b);
        if !e.is_zero() {
            prop_assert!(b.div(&e).unwrap() == a);
        }
    }

    #[test]
    fn interpolation_matches_bernoulli(
        d in prop::sample::select(vec![1i64, 5, 8, 12, 13]),
        n in -6i64..1,
    ) {
        let p = 5;
        let chi = if d == 1 { DirichletCharacter::trivial() } else { DirichletCharacter::quadratic(d).unwrap() };
        let l = PadicL::new(&chi, &[p], p, PREC).unwrap();
        let v = l.value(&PadicNumber::from_i64(p, n, PREC)).unwrap().value;
        let oracle = lp_interpolated(n, &chi, &[p], p, PREC).unwrap();
        prop_assert!(v.agreement(&oracle) >= PREC as i64 - 8, "{} vs {}", v, oracle);
    }
}
