use shuffle_core::harness::{run_property, PropertyId, TermGen};

#[test]
fn catalog_holds_on_random_larger_terms() {
    for seed in [1, 2, 3] {
        let gen = TermGen::random(11, &["x", "y", "z"], seed, 300);
        for &id in PropertyId::ALL {
            let r = run_property(id, &gen, 2000).unwrap();
            assert!(r.passed(), "seed {}: {}", seed, r.to_json_line());
        }
    }
}

#[test]
fn random_corpus_is_reproducible() {
    let a = run_property(PropertyId::Confluence, &TermGen::random(9, &["x"], 42, 100), 500).unwrap();
    let b = run_property(PropertyId::Confluence, &TermGen::random(9, &["x"], 42, 100), 500).unwrap();
    assert_eq!((a.corpus_size, a.checked, a.undecided), (b.corpus_size, b.checked, b.undecided));
    assert_eq!(a.seed, Some(42));
}

#[test]
fn oversized_exhaustive_corpus_is_refused() {
    assert!(run_property(PropertyId::Confluence, &TermGen::exhaustive(40, &["x"]), 10).is_err());
}
