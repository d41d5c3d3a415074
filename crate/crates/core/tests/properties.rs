use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use ilkit_core::algebra::agreement;
use ilkit_core::calculus::{Instantiation, Schema};
use ilkit_core::checks::load_corpus_dir;
use ilkit_core::formula::{parse, Formula, FormulaEnumerator};
use ilkit_core::frame::{parse_frame_text, random_frame, random_valuation, to_text, Model};
use ilkit_core::semantics::{check_bisim, extension, max_bisim, Bisimulation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pool() -> &'static [Formula] {
    static POOL: OnceLock<Vec<Formula>> = OnceLock::new();
    POOL.get_or_init(|| FormulaEnumerator::new(&["p", "q"], 2, 4).collect_all())
}

fn random_model(n: usize, seed: u64) -> Model {
    let fr = Arc::new(random_frame(n, seed));
    let v = random_valuation(n, &["p", "q", "r"], &mut ChaCha8Rng::seed_from_u64(seed ^ 0x9e37));
    Model::new(fr, v)
}

#[test]
fn corpus_files_round_trip_through_text() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let entries = load_corpus_dir(&dir).unwrap();
    assert_eq!(entries.len(), 8);
    for e in entries {
        let back = parse_frame_text(&to_text(&e.frame, Some(&e.valuation))).unwrap();
        assert!(*back.frame == *e.frame, "{}", e.name);
        assert!(back.valuation == e.valuation, "{}", e.name);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_frames_obey_the_laws(n in 1usize..9, seed: u64) {
        let fr = random_frame(n, seed);
        prop_assert!(fr.validate().is_ok());
    }

    #[test]
    fn axioms_hold_in_random_models(n in 1usize..8, seed: u64) {
        let m = random_model(n, seed);
        for s in Schema::ALL {
            let f = s.instantiate(&Instantiation::standard());
            prop_assert!(extension(&m, &f).is_full(), "{} fails", s.text());
        }
    }

    #[test]
    fn translation_agrees_with_forcing(n in 1usize..7, seed: u64, i in 0usize..60840) {
        let m = random_model(n, seed);
        prop_assert!(agreement(&m, &pool()[i % pool().len()]));
    }

    #[test]
    fn printing_round_trips(i in 0usize..60840) {
        let f = &pool()[i % pool().len()];
        prop_assert_eq!(&parse(&f.to_string()).unwrap(), f);
        prop_assert_eq!(&parse(&format!("{f:#}")).unwrap(), f);
    }

    #[test]
    fn largest_bisimulation_is_one_and_preserves_truth(n in 1usize..6, seed: u64, i in 0usize..60840) {
        let m = random_model(n, seed);
        let z = max_bisim(&m, &m);
        prop_assert!((0..n).all(|w| z.contains(w, w)));
        let pairs: Vec<_> = z.pairs().collect();
        prop_assert!(check_bisim(&Bisimulation::new(m.clone(), m.clone(), pairs.iter().copied())).is_ok());
        let f = &pool()[i % pool().len()];
        let ext = extension(&m, f);
        prop_assert!(pairs.iter().all(|&(a, b)| ext.contains(a) == ext.contains(b)));
    }
}
