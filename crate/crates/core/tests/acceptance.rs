//! End-to-end suite: one test per top-level guarantee of the pipeline, so a
//! run prints exactly one pass/fail line for each.

use std::collections::BTreeSet;
use std::time::Instant;

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use solvsph::combinatorial_data::{
    canonical_torus, validate, CombinatorialDatum, TorusData,
};
use solvsph::enumeration::{
    canonical_form, classify, elementary_transform, enumerate_data, verify_transform, UpTo,
};
use solvsph::lie_algebra::ChevalleyAlgebra;
use solvsph::marked_roots::{derive_admissible_pairs, table1_pairs, MarkedPair};
use solvsph::reconstruction::{build_model, extract_datum, from_subspaces, is_regular};
use solvsph::root_system::build_root_system;
use solvsph::sphericity::{criterion, oracle_open_orbit};
use solvsph::{Error, QSubspace, Rat};

fn algebra(label: &str) -> ChevalleyAlgebra {
    let rs = build_root_system(label).expect("valid type label");
    ChevalleyAlgebra::new(rs).expect("algebra construction")
}

#[test]
fn admissible_pair_derivation_matches_reference_tables() {
    let start = Instant::now();
    for label in [
        "A1", "A2", "A3", "A4", "B2", "B3", "B4", "C3", "C4", "D4", "G2", "F4",
    ] {
        let rs = build_root_system(label).expect("valid type label");
        let derived: BTreeSet<MarkedPair> = derive_admissible_pairs(&rs, rs.rank())
            .expect("derivation succeeds")
            .into_iter()
            .collect();
        let table: BTreeSet<MarkedPair> = table1_pairs(&rs).into_iter().collect();
        assert_eq!(
            derived, table,
            "derived admissible pairs differ from the reference table for {label}"
        );
    }
    assert!(
        start.elapsed().as_secs() < 60,
        "reference-table comparison exceeded its time budget"
    );
}

#[test]
fn sphericity_criterion_agrees_with_the_open_orbit_oracle() {
    for (which, label) in ["A1", "A1xA1", "A2", "B2", "G2"].into_iter().enumerate() {
        let alg = algebra(label);
        let rs = alg.root_system();
        let rank = rs.rank();
        let data = enumerate_data(rs, rank).expect("enumeration succeeds");

        for d in &data {
            let model = build_model(&alg, d).expect("enumerated data are buildable");
            assert!(
                criterion(rs, &model),
                "criterion rejects an enumerated datum of {label}: {d:?}"
            );
            assert!(
                oracle_open_orbit(&alg, &model, 5, 42).expect("oracle runs"),
                "oracle finds no open orbit for an enumerated datum of {label}: {d:?}"
            );
        }

        // Seeded mutants shrink the torus past the canonical kernel.  Every
        // well-formed mutant must keep criterion and oracle in agreement, and
        // at least fifty per system must actually lose sphericity.
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + which as u64);
        let pool: Vec<&CombinatorialDatum> =
            data.iter().filter(|d| !d.pairs().is_empty()).collect();
        assert!(!pool.is_empty(), "no mutable data in {label}");
        let mut negatives = 0;
        let mut attempts = 0;
        while negatives < 50 {
            attempts += 1;
            assert!(attempts <= 4000, "mutant generation stalled for {label}");
            let d = pool[rng.gen_range(0..pool.len())];
            let model = build_model(&alg, d).expect("buildable");
            let mut rows: Vec<Vec<Rat>> = d.torus().kernel().basis().to_vec();
            if attempts % 3 == 0 {
                // collapsing the torus entirely always destroys sphericity
                // once something is marked
                for i in 0..rank {
                    let mut row = vec![Rat::zero(); rank];
                    row[i] = Rat::from_integer(1.into());
                    rows.push(row);
                }
            } else {
                for _ in 0..rng.gen_range(1..=rank) {
                    rows.push(
                        (0..rank)
                            .map(|_| Rat::from_integer(rng.gen_range(-2..=2i64).into()))
                            .collect(),
                    );
                }
            }
            let kernel = QSubspace::from_rows(rank, rows);
            if kernel.dim() == d.torus().kernel().dim() {
                continue;
            }
            let mutant = from_subspaces(&alg, TorusData::new(kernel), model.n_basis().clone())
                .expect("torus shrinks keep the model well-formed");
            let c = criterion(rs, &mutant);
            let o = oracle_open_orbit(&alg, &mutant, 5, 42).expect("oracle runs");
            assert_eq!(
                c, o,
                "criterion and oracle disagree on a mutated model in {label} (seed datum {d:?})"
            );
            if !c {
                negatives += 1;
            }
        }
    }
}

#[test]
fn built_models_round_trip_and_close_under_bracket() {
    for label in [
        "A1", "A1xA1", "A1xA1xA1", "A2", "A2xA1", "A3", "B2", "B2xA1", "B3", "C3", "G2", "G2xA1",
    ] {
        let alg = algebra(label);
        let rs = alg.root_system();
        for d in enumerate_data(rs, 3).expect("enumeration succeeds") {
            let model = build_model(&alg, &d).expect("enumerated data are buildable");

            let embedded: Vec<Vec<Rat>> = model
                .n_basis()
                .basis()
                .iter()
                .map(|row| alg.embed_upper(row))
                .collect();
            let span = QSubspace::from_rows(alg.dim(), embedded.clone());
            for x in &embedded {
                for y in &embedded {
                    let z = alg.bracket(x, y).expect("bracket");
                    assert!(
                        span.contains(&z),
                        "nilpotent part of a {label} model is not bracket-closed: {d:?}"
                    );
                }
            }

            let back = extract_datum(&alg, model.s_basis(), model.n_basis())
                .expect("built models extract");
            assert_eq!(back, d, "round trip drifted for a datum of {label}");
        }
    }
}

#[test]
fn elementary_transforms_match_their_algebraic_conjugations() {
    let mut checked = 0;
    for label in ["A2", "A3", "B2"] {
        let alg = algebra(label);
        let rs = alg.root_system();
        for d in enumerate_data(rs, rs.rank()).expect("enumeration succeeds") {
            let model = build_model(&alg, &d).expect("buildable");
            for i in 0..rs.rank() {
                let simple = rs.simple(i);
                if !d.pairs().iter().any(|p| p.root == simple) {
                    continue;
                }
                if !is_regular(rs, &model, &simple).expect("marked root") {
                    continue;
                }
                assert!(
                    verify_transform(&alg, &d, i).expect("verification runs"),
                    "transform at a{} disagrees with conjugation for a {label} datum: {d:?}",
                    i + 1
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 0, "no applicable transformations were exercised");
}

#[test]
fn canonical_forms_are_orbit_invariants_with_frozen_class_counts() {
    const BOUND: usize = 1_000_000;
    for (label, torus_classes, group_classes) in [
        ("A1", 2, 2),
        ("A1xA1", 5, 5),
        ("A2", 7, 5),
        ("B2", 8, 6),
        ("G2", 9, 7),
    ] {
        let alg = algebra(label);
        let rs = alg.root_system();
        let by_torus = classify(&alg, UpTo::TorusConjugacy, rs.rank(), BOUND)
            .expect("classification succeeds");
        let by_group =
            classify(&alg, UpTo::GConjugacy, rs.rank(), BOUND).expect("classification succeeds");
        assert_eq!(by_torus.len(), torus_classes, "class count drifted for {label}");
        assert_eq!(by_group.len(), group_classes, "class count drifted for {label}");

        for entry in &by_torus {
            let canon = canonical_form(&alg, &entry.datum, BOUND).expect("orbit fits the bound");
            assert_eq!(
                canonical_form(&alg, &canon, BOUND).expect("orbit fits the bound"),
                canon,
                "canonical form is not idempotent for a {label} datum"
            );
            for i in 0..rs.rank() {
                match elementary_transform(&alg, &entry.datum, i) {
                    Ok(image) => assert_eq!(
                        canonical_form(&alg, &image, BOUND).expect("orbit fits the bound"),
                        canon,
                        "a transformation at a{} changed the canonical form of a {label} datum",
                        i + 1
                    ),
                    Err(Error::TransformNotApplicable(_)) => {}
                    Err(e) => panic!("unexpected transform failure in {label}: {e}"),
                }
            }
        }

        let path = format!(
            "{}/../../tables/{label}.json",
            env!("CARGO_MANIFEST_DIR")
        );
        let stored: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(&path).expect("committed snapshot present"),
        )
        .expect("snapshot parses");
        let fresh = json!({
            "system": rs.label().to_string(),
            "up_to": "g-conjugacy",
            "entries": by_group
                .iter()
                .map(|e| json!({
                    "datum": serde_json::to_value(e.datum.to_dto(rs)).expect("datum serializes"),
                    "orbit_id": e.orbit_id,
                    "canonical": e.canonical,
                    "flagged": e.flagged,
                }))
                .collect::<Vec<_>>(),
        });
        assert_eq!(stored, fresh, "committed classification snapshot for {label} is stale");
    }
}

// Every way of splitting `k` items into unlabeled nonempty groups.
fn all_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new()];
    for item in 0..k {
        let mut next = Vec::new();
        for partial in &out {
            for slot in 0..partial.len() {
                let mut grown: Vec<Vec<usize>> = partial.clone();
                grown[slot].push(item);
                next.push(grown);
            }
            let mut grown = partial.clone();
            grown.push(vec![item]);
            next.push(grown);
        }
        out = next;
    }
    out
}

#[test]
fn pruned_enumeration_matches_naive_generate_and_filter() {
    for label in ["A1", "A1xA1", "A2", "B2", "G2"] {
        let rs = build_root_system(label).expect("valid type label");
        let fast: BTreeSet<CombinatorialDatum> = enumerate_data(&rs, 2)
            .expect("enumeration succeeds")
            .into_iter()
            .collect();

        let pairs = derive_admissible_pairs(&rs, 2).expect("derivation succeeds");
        let mut naive = BTreeSet::new();
        for mask in 0u32..(1 << pairs.len()) {
            let subset: Vec<MarkedPair> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect();
            for blocks in all_partitions(subset.len()) {
                let torus = canonical_torus(rs.rank(), &subset, &blocks);
                let Ok(d) = CombinatorialDatum::new(&rs, subset.clone(), blocks, torus) else {
                    continue;
                };
                if validate(&rs, &d).is_valid() {
                    naive.insert(d);
                }
            }
        }
        assert_eq!(naive, fast, "naive and pruned enumerations differ for {label}");
    }
}
