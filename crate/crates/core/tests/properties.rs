use dehn_core::changemaker::{enumerate_changemakers, is_changemaker};
use dehn_core::deficiency::{
    central_labels, deficiency_rational, integral_minimisers, sum_identity_check, symmetry_check,
    validate_vh, KnotDData,
};
use dehn_core::embedding::{
    normalize, search_embedding, verify_embedding, EmbeddingMatrix, FormBlock, SearchOptions,
};
use dehn_core::oracles::subset_sums_cover;
use dehn_core::plumbing::{
    build_matrix, enumerate_k, lens_d_invariants, push_down, square, ClassIndexer,
};
use dehn_core::{hj_evaluate, hj_expand, Rational, SurgerySlope};
use num_integer::Integer;
use proptest::prelude::*;

fn slope(max_p: u64, max_q: u64) -> impl Strategy<Value = SurgerySlope> {
    (1..=max_p, 1..=max_q)
        .prop_filter("coprime", |(p, q)| p.gcd(q) == 1)
        .prop_map(|(p, q)| hj_expand(p, q).unwrap())
}

fn knot_data() -> impl Strategy<Value = KnotDData> {
    prop::collection::vec(0i64..=10, 1..=8).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        KnotDData::from_v(v)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hj_round_trip(s in slope(1_000_000, 1_000_000)) {
        let value = hj_evaluate(s.word()).unwrap();
        prop_assert_eq!(value, Rational::new((s.p() as i64).into(), (s.q() as i64).into()));
        prop_assert!(s.word()[1..].iter().all(|&a| a >= 2));
    }

    #[test]
    fn changemaker_predicate_matches_subset_sums(v in prop::collection::vec(0u64..=20, 0..=12)) {
        let signed: Vec<i64> = v.iter().map(|&x| x as i64).collect();
        prop_assert_eq!(is_changemaker(&signed).unwrap(), subset_sums_cover(&v));
    }

    #[test]
    fn enumerated_changemakers_are_changemakers(norm in 0u64..=30, max_len in 0usize..=10) {
        for c in enumerate_changemakers(norm, max_len) {
            let signed: Vec<i64> = c.values().iter().map(|&x| x as i64).collect();
            prop_assert!(is_changemaker(&signed).unwrap());
            prop_assert_eq!(c.norm(), norm);
            prop_assert!(c.len() <= max_len);
        }
    }

    #[test]
    fn push_down_shifts_square_and_keeps_class(s in slope(40, 40), pick in any::<prop::sample::Index>(), v in any::<prop::sample::Index>()) {
        let q = build_matrix(&s);
        let family = enumerate_k(&s);
        let k = &family.members[pick.index(family.len())];
        let i = v.index(s.len());
        let pushed = push_down(k, &q, i).unwrap();
        let shift = 4 * (k.coords()[i] - s.word()[i]);
        prop_assert_eq!(
            square(&pushed, &q).unwrap() - square(k, &q).unwrap(),
            Rational::from_integer(shift.into())
        );
        let indexer = ClassIndexer::new(&q);
        prop_assert_eq!(indexer.index(k), indexer.index(&pushed));
    }

    #[test]
    fn k_hits_every_class_once(s in slope(40, 80)) {
        let indexer = ClassIndexer::new(&build_matrix(&s));
        let mut seen: Vec<u64> = enumerate_k(&s).members.iter().map(|k| indexer.index(k)).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..s.p()).collect::<Vec<_>>());
    }

    #[test]
    fn lens_d_values_are_shifted_quarters(s in slope(30, 30)) {
        for (k, d) in lens_d_invariants(&s) {
            prop_assert_eq!(k.len(), s.len());
            let scaled = d * Rational::from_integer((4 * s.p() as i64).into());
            prop_assert!(scaled.is_integer());
        }
    }

    #[test]
    fn deficiency_identities(data in knot_data(), s in slope(80, 160)) {
        let checked = validate_vh(&data).unwrap();
        prop_assert!(sum_identity_check(&checked, &s).holds);
        prop_assert!(symmetry_check(&checked, &s).holds);
        let table = deficiency_rational(&checked, &s);
        prop_assert!(table.values.iter().all(|x| x % 2 == 0));
        let minimisers = integral_minimisers(&checked, s.n());
        for label in central_labels(s.n()) {
            prop_assert!(minimisers.indices.contains(&label));
        }
    }

    #[test]
    fn normalization_is_idempotent(
        entries in prop::collection::vec(-2i64..=2, 16),
        b in 0usize..=4,
    ) {
        let rows: Vec<Vec<i64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
        let a = EmbeddingMatrix::new(rows, b).unwrap();
        let na = normalize(&a);
        prop_assert_eq!(na.negative_gram(), a.negative_gram());
        prop_assert_eq!(normalize(&na), na);
    }
}

fn small_blocks() -> impl Strategy<Value = FormBlock> {
    (slope(12, 12), prop::collection::vec(1i64..=5, 0..=3)).prop_filter_map(
        "rank bound",
        |(s, diag)| {
            if s.len() + diag.len() > 7 {
                return None;
            }
            let b = diag.len();
            let qx = (0..b)
                .map(|i| (0..b).map(|j| if i == j { -diag[i] } else { 0 }).collect())
                .collect();
            FormBlock::new(qx, &s).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn certificates_verify_and_are_normal(blocks in small_blocks()) {
        let out = search_embedding(&blocks, &SearchOptions::default()).unwrap();
        if let Some(cert) = &out.certificate {
            let v = verify_embedding(cert, &blocks).unwrap();
            prop_assert!(v.ok());
            prop_assert_eq!(v.sigma, out.sigma.clone());
            prop_assert_eq!(&normalize(cert), cert);
            if blocks.slope().q() > 1 {
                let w = cert.w_rows();
                prop_assert_eq!(w[0].iter().map(|x| x * x).sum::<i64>(), blocks.slope().n() as i64);
            }
        }
        let parallel = search_embedding(&blocks, &SearchOptions { workers: 3, ..Default::default() }).unwrap();
        prop_assert_eq!(parallel, out);
    }
}
