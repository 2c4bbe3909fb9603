use iwasawa_descent::complex::random::{random_semisimple, GeneratorOptions};
use iwasawa_descent::complex::{char_element, leading_term_bockstein, verify_gecp};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_complexes_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = GeneratorOptions::default();
    let mut bad = 0;
    for trial in 0..200 {
        let g = random_semisimple(&mut rng, 5, 30, 20, &opts).unwrap();
        let ch = char_element(&g.complex, &g.trivialization).unwrap();
        let b = ch.eq_at_precision(&g.expected_char);
        let la = leading_term_bockstein(&g.complex, &g.trivialization).unwrap();
        let a = la == g.expected_leading;
        let e = verify_gecp(&g.complex, &g.trivialization).unwrap();
        if !(a && b && e.holds && e.chi_add == g.expected_ord) {
            bad += 1;
            println!("trial {trial}: pieces {:?} routeB {b} routeA {a} ({} vs {}) gecp {} chi {} ord {}", g.pieces, la.pretty(), g.expected_leading.pretty(), e.holds, e.chi_add, g.expected_ord);
        }
    }
    assert_eq!(bad, 0);
}

#[test]
fn shift_and_direct_sum_relations() {
    use iwasawa_descent::complex::Trivialization;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = GeneratorOptions::default();
    for _ in 0..100 {
        let g = random_semisimple(&mut rng, 5, 30, 20, &opts).unwrap();
        let h = random_semisimple(&mut rng, 5, 30, 20, &opts).unwrap();
        let ch = char_element(&g.complex, &g.trivialization).unwrap();
        let shifted = g.complex.shift(1);
        let ts = g.trivialization.shifted(&g.complex).unwrap();
        let chs = char_element(&shifted, &ts).unwrap();
        assert!(chs.mul(&ch).eq_at_precision(&iwasawa_descent::series::LambdaFraction::one(5, 40, 20)), "shift");
        let sum = g.complex.direct_sum(&h.complex).unwrap();
        let tsum: Trivialization = g.trivialization.direct_sum(&g.complex, &h.trivialization, &h.complex).unwrap();
        let chh = char_element(&h.complex, &h.trivialization).unwrap();
        let chsum = char_element(&sum, &tsum).unwrap();
        assert!(chsum.eq_at_precision(&ch.mul(&chh)), "sum {:?} {:?}", g.pieces, h.pieces);
        let la = leading_term_bockstein(&sum, &tsum).unwrap();
        assert_eq!(la, leading_term_bockstein(&g.complex, &g.trivialization).unwrap().mul(&leading_term_bockstein(&h.complex, &h.trivialization).unwrap()));
    }
}
