use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tracegraph_core::query::compute_visibility;
use tracegraph_core::testkit::{brute_force_visibility, check_query_properties, random_kb, random_query_frame, with_selection};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_brute_force_on_every_subset(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kb = random_kb(&mut rng, 60, 150);
        let (frame, candidates) = random_query_frame(&mut rng, &kb, 6);
        for mask in 0..(1u64 << candidates.len()) {
            let q = with_selection(&frame, &candidates, mask);
            let got = compute_visibility(&kb, &q).unwrap();
            prop_assert_eq!(&got.visible, &brute_force_visibility(&kb, &q));
            prop_assert_eq!(got.revision, kb.revision());
            if let Err(e) = check_query_properties(&kb, &q) {
                prop_assert!(false, "{}", e);
            }
        }
    }
}

#[test]
fn dense_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let kb = random_kb(&mut rng, 200, 600);
        let (frame, candidates) = random_query_frame(&mut rng, &kb, 6);
        let mask = rng.gen_range(0..(1u64 << candidates.len()));
        let q = with_selection(&frame, &candidates, mask);
        assert_eq!(compute_visibility(&kb, &q).unwrap().visible, brute_force_visibility(&kb, &q));
        check_query_properties(&kb, &q).unwrap();
    }
}
