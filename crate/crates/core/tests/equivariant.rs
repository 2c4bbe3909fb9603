use iwasawa_descent::complex::random::GeneratorOptions;
use iwasawa_descent::equivariant::random::random_equivariant;
use iwasawa_descent::equivariant::{
    agreement, char_components, decompose_by_characters, descent_square, evaluate_k1, leading_term_at, r_g_at,
    reassemble, twist, twist_equivariant, EquivariantTrivialization, FiniteCharacter,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_equivariant_pairs_descend() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = GeneratorOptions { max_pieces: 3, ..Default::default() };
    for (p, delta) in [(5u64, vec![2u64]), (7, vec![3]), (5, vec![2, 2])] {
        for _ in 0..8 {
            let g = random_equivariant(&mut rng, p, 30, 20, &delta, &opts).unwrap();
            let parts = decompose_by_characters(&g.complex).unwrap();
            let back = reassemble(p, 30, 20, &delta, &parts).unwrap();
            assert!(agreement(&g.complex, &back) >= 30);
            let chars = char_components(&g.complex, &g.trivialization).unwrap();
            for (chi, plain) in &g.components {
                assert!(evaluate_k1(&chars, chi).unwrap().eq_at_precision(&plain.expected_char));
                assert_eq!(leading_term_at(&g.complex, &g.trivialization, chi).unwrap(), plain.expected_leading);
                assert_eq!(r_g_at(&g.complex, chi).unwrap(), plain.expected_r);
                let d = descent_square(&g.complex, &g.trivialization, chi).unwrap();
                assert!(d.agreement >= 30 && d.r_k1 == d.r_twist);
            }
        }
    }
}

#[test]
fn twisting_permutes_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let opts = GeneratorOptions { max_pieces: 2, ..Default::default() };
    let delta = vec![4u64];
    let g = random_equivariant(&mut rng, 5, 30, 20, &delta, &opts).unwrap();
    let chars = FiniteCharacter::all(5, &delta).unwrap();
    let rho = &chars[1];
    let tw = twist_equivariant(&g.complex, rho).unwrap();
    let ta: EquivariantTrivialization = g.trivialization.twist_equivariant(rho, 40);
    for chi in &chars {
        let moved = rho.mul(chi).unwrap();
        let lhs = leading_term_at(&tw, &ta, chi).unwrap();
        assert_eq!(lhs, g.components[&moved].expected_leading);
        let a = twist(&tw, chi).unwrap();
        let b = twist(&g.complex, &moved).unwrap();
        assert_eq!(a.ranks(), b.ranks());
    }
}

#[test]
fn additivity_over_direct_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let opts = GeneratorOptions { max_pieces: 2, ..Default::default() };
    let delta = vec![2u64];
    for _ in 0..5 {
        let a = random_equivariant(&mut rng, 3, 30, 20, &delta, &opts).unwrap();
        let b = random_equivariant(&mut rng, 3, 30, 20, &delta, &opts).unwrap();
        let sum = a.complex.direct_sum(&b.complex).unwrap();
        for chi in FiniteCharacter::all(3, &delta).unwrap() {
            let r = r_g_at(&sum, &chi).unwrap();
            assert_eq!(r, r_g_at(&a.complex, &chi).unwrap() + r_g_at(&b.complex, &chi).unwrap());
        }
    }
}
