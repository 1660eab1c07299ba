//! Randomized property suites (≥1000 cases each) over the algebraic core:
//! action laws, isometry, the distance spectrum, text round trips, and the
//! design-theoretic conversions.

mod common;

use common::{arb_iso, arb_perm, arb_scramble, scrambled_normalized_rows};
use molskit::code::{separability_partition, PermutationCode};
use molskit::data::{load_dataset, DATASET_NAMES};
use molskit::dm::{code_to_dm, dm_to_code, DifferenceMatrix};
use molskit::iso::{act, orbit, IsoElement, IsoGroup};
use molskit::latin::{code_to_mols, mols_to_code};
use molskit::perm::{format_cycles, parse_cycles};
use molskit::Permutation;
use proptest::prelude::*;

const CASES: u32 = 1200;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    // Suite 1: act is a right action — compatible with composition, and
    // the identity isometry acts trivially.
    #[test]
    fn act_satisfies_the_right_action_laws(
        (w, g, h) in (4usize..=7).prop_flat_map(|n| (arb_perm(n), arb_iso(n), arb_iso(n)))
    ) {
        let gh = g.compose(&h).unwrap();
        prop_assert_eq!(
            act(&w, &gh).unwrap(),
            act(&act(&w, &g).unwrap(), &h).unwrap()
        );
        let id = IsoElement::identity(w.degree());
        prop_assert_eq!(act(&w, &id).unwrap(), w.clone());
        // Acting by g then g⁻¹ restores the word.
        prop_assert_eq!(act(&act(&w, &g).unwrap(), &g.inverse()).unwrap(), w);
    }

    // Suite 2: every isometry preserves the Hamming distance.
    #[test]
    fn act_is_an_isometry(
        (p, q, g) in (4usize..=7).prop_flat_map(|n| (arb_perm(n), arb_perm(n), arb_iso(n)))
    ) {
        let d = p.hamming_distance(&q).unwrap();
        let pd = act(&p, &g).unwrap().hamming_distance(&act(&q, &g).unwrap()).unwrap();
        prop_assert_eq!(pd, d);
    }

    // Suite 3: the Hamming distance between permutations is never 1, and
    // is zero exactly on equal words.
    #[test]
    fn hamming_distance_is_never_one(
        (p, q) in (2usize..=9).prop_flat_map(|n| (arb_perm(n), arb_perm(n)))
    ) {
        let d = p.hamming_distance(&q).unwrap();
        prop_assert_ne!(d, 1);
        prop_assert_eq!(d == 0, p == q);
    }

    // Suite 4 (randomized half): cycle text round-trips exactly, and the
    // canonical rendering is a fixpoint of format ∘ parse.
    #[test]
    fn cycle_text_round_trips(
        p in (1usize..=10).prop_flat_map(arb_perm)
    ) {
        let text = format_cycles(&p);
        let back = parse_cycles(&text, p.degree()).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(format_cycles(&back), text);
    }
}

/// Suite 4 (exhaustive half): every generator and representative word in
/// the shipped datasets renders and re-parses byte-exactly.
#[test]
fn dataset_generator_words_round_trip_byte_exact() {
    let mut words_seen = 0usize;
    for name in DATASET_NAMES {
        let ds = load_dataset(name).unwrap();
        let mut words: Vec<(usize, Permutation)> = Vec::new();
        words.extend(ds.egens.iter().map(|(_, w)| (ds.n, w.clone())));
        words.extend(ds.isogens.iter().map(|(_, e)| (2 * ds.n, e.inner().clone())));
        words.extend(ds.representatives.iter().map(|(_, w)| (ds.n, w.clone())));
        for (degree, w) in words {
            let text = format_cycles(&w);
            let back = parse_cycles(&text, degree).unwrap();
            assert_eq!(back, w, "{name}: {text}");
            assert_eq!(format_cycles(&back), text, "{name}: {text}");
            words_seen += 1;
        }
    }
    assert!(words_seen >= 30, "expected to cover all dataset words, saw {words_seen}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    // Suite 5: dm → code → dm fixes the code exactly and is idempotent on
    // the matrix (code_to_dm emits the canonical normalized form). The
    // scrambles permute rows and columns and add per-row and per-column
    // constants over the classical base matrices in `common::dm_pool`.
    #[test]
    fn dm_code_round_trips_are_stable(s in arb_scramble()) {
        let (g, rows) = scrambled_normalized_rows(&s);
        let dm = DifferenceMatrix::new(g.clone(), 1, rows).unwrap();
        let code = dm_to_code(&dm).unwrap();
        let normalized = code_to_dm(&code, &g).unwrap();
        prop_assert_eq!(&dm_to_code(&normalized).unwrap(), &code);
        prop_assert_eq!(&code_to_dm(&code, &g).unwrap(), &normalized);
        // The normal form is a fixpoint.
        prop_assert_eq!(&code_to_dm(&dm_to_code(&normalized).unwrap(), &g).unwrap(), &normalized);
    }

    // Suite 6: code → MOLS → code preserves the word set over randomly
    // isometry-shifted affine codes.
    #[test]
    fn mols_code_round_trips_preserve_the_word_set(
        (p, g) in prop_oneof![Just(5usize), Just(7)].prop_flat_map(|p| (Just(p), arb_iso(p)))
    ) {
        let mut words = Vec::new();
        for a in 1..p as u16 {
            for b in 0..p as u16 {
                let images: Vec<u16> = (0..p as u16).map(|x| (a * x + b) % p as u16).collect();
                let w = Permutation::from_images(images).unwrap();
                words.push(act(&w, &g).unwrap());
            }
        }
        let code = PermutationCode::new(p, words).unwrap();
        let part = separability_partition(&code).unwrap();
        let mols = code_to_mols(&part).unwrap();
        prop_assert_eq!(mols.len(), p - 1);
        prop_assert_eq!(&mols_to_code(&mols).unwrap(), &code);
    }

    // Suite 7: orbit sizes divide the group order (orbit–stabilizer), over
    // random cyclic subgroups of Iso(n).
    #[test]
    fn orbit_sizes_divide_the_group_order(
        (w, g) in (4usize..=8).prop_flat_map(|n| (arb_perm(n), arb_iso(n)))
    ) {
        let u = IsoGroup::generate(vec![g], 20_000).unwrap();
        let orb = orbit(&w, &u).unwrap();
        prop_assert_eq!(u.order() % orb.len(), 0);
    }

    // Suite 7 continued: the same divisibility over arbitrary two-generator
    // subgroups, exhaustible at n = 4 (|Iso(4)| = 1152).
    #[test]
    fn two_generator_subgroup_orbits_divide(
        (w, g, h) in (Just(4usize)).prop_flat_map(|n| (arb_perm(n), arb_iso(n), arb_iso(n)))
    ) {
        let u = IsoGroup::generate(vec![g, h], 1200).unwrap();
        let orb = orbit(&w, &u).unwrap();
        prop_assert_eq!(u.order() % orb.len(), 0);
    }
}
