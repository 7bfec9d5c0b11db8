use k3lab::models::{catalog, EndoFieldDesc, EndoKind};
use k3lab::monodromy::{
    block_matrix, component_group_order, group_closure, jump_character_predict, mat_mul_int, verify_centralizer,
    verify_normalizer_det, CharacterDesc, OrderFlag, SignedPermutation,
};
use k3lab::Error;
use proptest::prelude::*;

fn signed_perm(d: usize) -> impl Strategy<Value = SignedPermutation> {
    (Just((0..d).collect::<Vec<usize>>()).prop_shuffle(), prop::collection::vec(0u8..2, d))
        .prop_map(|(pi, a)| SignedPermutation::new(pi, a).unwrap())
}

fn pair(max_d: usize) -> impl Strategy<Value = (SignedPermutation, SignedPermutation, usize)> {
    (1..=max_d).prop_flat_map(|d| (signed_perm(d), signed_perm(d), 1usize..=3))
}

/// Sign from the cycle decomposition.
fn perm_sign(p: &[usize]) -> i8 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut len = 0;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

proptest! {
    #[test]
    fn block_matrix_is_a_homomorphism((s, t, b) in pair(4)) {
        let st = s.compose(&t);
        prop_assert_eq!(block_matrix(&st, b), mat_mul_int(&block_matrix(&s, b), &block_matrix(&t, b)));
        let img = s.to_s2d();
        let composed: Vec<usize> = t.to_s2d().iter().map(|&j| img[j]).collect();
        prop_assert_eq!(st.to_s2d(), composed);
    }

    #[test]
    fn sign_is_the_sign_in_s2d((s, t, _b) in pair(5)) {
        prop_assert_eq!(s.sgn_2d(), perm_sign(&s.to_s2d()));
        prop_assert_eq!(s.compose(&t).sgn_2d(), s.sgn_2d() * t.sgn_2d());
    }

    #[test]
    fn conjugation_is_central((s, _t, _b) in pair(5)) {
        let c = SignedPermutation::conjugation(s.d());
        prop_assert_eq!(c.compose(&s), s.compose(&c));
        prop_assert_eq!(SignedPermutation::identity(s.d()).compose(&s), s.clone());
    }
}

#[test]
fn normalizer_determinants_exhaustive() {
    for d in 1..=3 {
        for b in 1..=3 {
            let r = verify_normalizer_det(d, b);
            assert!(r.passed(), "d={} b={}: {:?}", d, b, r.violations);
            assert_eq!(r.checked, (1 << d) * (1..=d).product::<usize>());
        }
    }
}

#[test]
fn centralizer_blocks() {
    for (d, b) in [(1, 1), (2, 2), (3, 2), (2, 3)] {
        let r = verify_centralizer(d, b, 8, 7);
        assert!(r.ok(), "d={} b={}: {:?}", d, b, r);
    }
}

#[test]
fn catalog_actions_respect_the_embedding_bound() {
    let cat = catalog();
    for s in cat.surfaces.iter().filter(|s| s.endo.is_cm()) {
        let d = s.endo.d();
        let g = group_closure(&s.endo.galois_action);
        let bound = (1usize << d) * (1..=d).product::<usize>();
        assert_eq!(g.len() % s.endo.degree as usize, 0, "{}", s.name);
        assert_eq!(bound % g.len(), 0, "{}", s.name);
        if s.endo.normal {
            assert_eq!(g.len(), s.endo.degree as usize, "{}", s.name);
        }
        let c = SignedPermutation::conjugation(d);
        assert!(g.contains(&c), "{}: complex conjugation missing", s.name);
        assert!(g.iter().all(|x| x.compose(&c) == c.compose(x)));
    }
}

#[test]
fn predictions_for_the_catalog() {
    let cat = catalog();
    let expect = [("X1", "(-1/.)", 2), ("X2", "(5/.)", 4), ("X3", "trivial", 4), ("X4", "(-1/.)", 6)];
    for (name, chr, order) in expect {
        let s = cat.surface(name).unwrap();
        assert_eq!(jump_character_predict(&s.endo, s.picard_rank).unwrap().to_string(), chr, "{}", name);
        assert_eq!(component_group_order(&s.endo, s.ke_over_k), (order, OrderFlag::Exact), "{}", name);
    }
    let x5 = cat.surface("X5").unwrap();
    assert_eq!(component_group_order(&x5.endo, x5.ke_over_k), (2, OrderFlag::Exact));
    assert!(matches!(
        jump_character_predict(&x5.endo, x5.picard_rank).unwrap(),
        CharacterDesc::SignOfAction { resolved: Some(-1), .. }
    ));
    let x6 = cat.surface("X6").unwrap();
    assert!(matches!(jump_character_predict(&x6.endo, x6.picard_rank), Err(Error::NotCm(_))));
    assert_eq!(component_group_order(&x6.endo, x6.ke_over_k).1, OrderFlag::LowerBoundDivisor);
}

#[test]
fn parity_rule_for_raw_pairs() {
    let e = EndoFieldDesc {
        name: "Q(sqrt-163)".into(),
        degree: 2,
        kind: EndoKind::CmImagQuadratic { delta: 163 },
        galois_action: vec![SignedPermutation::conjugation(1)],
        normal: true,
        conjectural: false,
    };
    assert_eq!(jump_character_predict(&e, 18).unwrap(), CharacterDesc::Trivial);
    assert_eq!(jump_character_predict(&e, 20).unwrap(), CharacterDesc::Kronecker(-163));
    assert!(jump_character_predict(&e, 19).is_err());
}
