//! Exhaustive enumeration of valid combinatorial data, elementary
//! transformations between them, and canonical orbit representatives.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num::Zero;
use rayon::prelude::*;

use crate::combinatorial_data::{
    canonical_torus, compatible_fused, compatible_unfused, CombinatorialDatum, TorusData,
};
use crate::lie_algebra::ChevalleyAlgebra;
use crate::linalg::{mat_vec, Subspace};
use crate::marked_roots::{derive_admissible_pairs, MarkedPair};
use crate::reconstruction::{build_model, extract_datum, is_regular};
use crate::root_system::{RootSystem, SupportSet};
use crate::{Error, Rat, Result};

/// One datum with its place in the conjugacy-class structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationEntry {
    pub datum: CombinatorialDatum,
    pub orbit_id: usize,
    pub canonical: bool,
    /// Isolated: a singleton orbit with no applicable transformation at all,
    /// recorded as its own class pending a finer equivalence test.
    pub flagged: bool,
}

/// Which equivalence the listing is quotiented by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpTo {
    TorusConjugacy,
    GConjugacy,
}

// No marked support may sit inside the union of the other marked supports.
fn supports_independent(sets: &[SupportSet]) -> bool {
    (0..sets.len()).all(|i| {
        let union = sets
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(SupportSet::empty(), |acc, (_, s)| acc.union(s));
        !sets[i].is_subset_of(&union)
    })
}

// All fusion partitions of 0..k compatible with the two pairwise relations:
// `must` forces two items into one block, `may` permits it.
fn partitions_under(
    k: usize,
    must: &impl Fn(usize, usize) -> bool,
    may: &impl Fn(usize, usize) -> bool,
) -> Vec<Vec<Vec<usize>>> {
    fn place(
        i: usize,
        k: usize,
        must: &impl Fn(usize, usize) -> bool,
        may: &impl Fn(usize, usize) -> bool,
        blocks: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if i == k {
            out.push(blocks.clone());
            return;
        }
        let mut forced = None;
        for (bi, block) in blocks.iter().enumerate() {
            if block.iter().any(|&j| must(i, j)) {
                if forced.replace(bi).is_some() {
                    return; // two distinct blocks both claim the item
                }
            }
        }
        let allowed = |block: &[usize]| block.iter().all(|&j| may(i, j));
        match forced {
            Some(bi) => {
                if allowed(&blocks[bi]) {
                    blocks[bi].push(i);
                    place(i + 1, k, must, may, blocks, out);
                    blocks[bi].pop();
                }
            }
            None => {
                for bi in 0..blocks.len() {
                    if allowed(&blocks[bi]) {
                        blocks[bi].push(i);
                        place(i + 1, k, must, may, blocks, out);
                        blocks[bi].pop();
                    }
                }
                blocks.push(vec![i]);
                place(i + 1, k, must, may, blocks, out);
                blocks.pop();
            }
        }
    }
    let mut out = Vec::new();
    place(0, k, must, may, &mut Vec::new(), &mut out);
    out
}

// Every datum over a fixed marked set: one per admissible fusion partition,
// each with the largest compatible torus.
fn data_for_marked_set(
    rs: &RootSystem,
    chosen: &[MarkedPair],
) -> Result<Vec<CombinatorialDatum>> {
    let must = |i: usize, j: usize| !compatible_unfused(rs, &chosen[i], &chosen[j]);
    let may = |i: usize, j: usize| compatible_fused(rs, &chosen[i], &chosen[j]);
    let mut out = Vec::new();
    for blocks in partitions_under(chosen.len(), &must, &may) {
        let torus = canonical_torus(rs.rank(), chosen, &blocks);
        let datum = CombinatorialDatum::new(rs, chosen.to_vec(), blocks, torus)?;
        debug_assert!(
            crate::combinatorial_data::validate(rs, &datum).is_valid(),
            "enumerated datum failed validation: {datum:?}"
        );
        out.push(datum);
    }
    Ok(out)
}

fn grow(
    rs: &RootSystem,
    pairs: &[MarkedPair],
    chosen_idx: Vec<usize>,
    acc: &mut Vec<CombinatorialDatum>,
) -> Result<()> {
    let chosen: Vec<MarkedPair> = chosen_idx.iter().map(|&i| pairs[i].clone()).collect();
    let supports: Vec<SupportSet> = chosen.iter().map(|p| p.root.support()).collect();
    if !supports_independent(&supports) {
        return Ok(()); // stays violated in every superset
    }
    acc.extend(data_for_marked_set(rs, &chosen)?);
    let last = *chosen_idx.last().expect("branch roots are nonempty");
    for next in last + 1..pairs.len() {
        let candidate = &pairs[next];
        let coexists = chosen.iter().all(|p| {
            p.root != candidate.root
                && (compatible_unfused(rs, p, candidate) || compatible_fused(rs, p, candidate))
        });
        if coexists {
            let mut extended = chosen_idx.clone();
            extended.push(next);
            grow(rs, pairs, extended, acc)?;
        }
    }
    Ok(())
}

/// All valid data over `rs` with the largest compatible torus, sorted.
pub fn enumerate_data(rs: &RootSystem, rank_cap: usize) -> Result<Vec<CombinatorialDatum>> {
    if rs.rank() > rank_cap {
        return Err(Error::RankCapExceeded {
            rank: rs.rank(),
            cap: rank_cap,
        });
    }
    let pairs = derive_admissible_pairs(rs, rank_cap)?;
    let mut out = data_for_marked_set(rs, &[])?;
    let branches: Vec<Result<Vec<CombinatorialDatum>>> = (0..pairs.len())
        .into_par_iter()
        .map(|first| {
            let mut acc = Vec::new();
            grow(rs, &pairs, vec![first], &mut acc)?;
            Ok(acc)
        })
        .collect();
    for branch in branches {
        out.extend(branch?);
    }
    out.sort();
    Ok(out)
}

// Reflection acting on a rational vector of root coordinates.
fn reflect_vec(rs: &RootSystem, alpha: usize, v: &[Rat]) -> Vec<Rat> {
    let pairing: Rat = (0..rs.rank())
        .map(|j| Rat::from_integer(rs.cartan(alpha, j).into()) * &v[j])
        .sum();
    let mut out = v.to_vec();
    out[alpha] -= pairing;
    out
}

/// Conjugate a datum by the reflection at a regular marked simple root: the
/// other marked roots reflect, and the root itself either disappears into
/// them or stays marked on its own.
pub fn elementary_transform(
    alg: &ChevalleyAlgebra,
    d: &CombinatorialDatum,
    alpha: usize,
) -> Result<CombinatorialDatum> {
    let rs = alg.root_system();
    let simple = rs.simple(alpha);
    let position = d
        .pairs()
        .iter()
        .position(|p| p.root == simple)
        .ok_or_else(|| {
            Error::TransformNotApplicable(format!("a{} is not a marked simple root", alpha + 1))
        })?;
    let model = build_model(alg, d)?;
    if !is_regular(rs, &model, &simple)? {
        return Err(Error::TransformNotApplicable(format!(
            "marked root a{} is not regular",
            alpha + 1
        )));
    }

    let mut images: Vec<MarkedPair> = Vec::new();
    for (i, p) in d.pairs().iter().enumerate() {
        if i != position {
            images.push(MarkedPair {
                root: rs.reflect(alpha, &p.root),
                pi: p.pi,
            });
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for block in d.blocks() {
        let renumbered: Vec<usize> = block
            .iter()
            .filter(|&&i| i != position)
            .map(|&i| if i < position { i } else { i - 1 })
            .collect();
        if !renumbered.is_empty() {
            blocks.push(renumbered);
        }
    }

    let case_one = images.iter().any(|p| p.root.support().contains(alpha));
    if !case_one {
        images.push(MarkedPair {
            root: simple,
            pi: alpha,
        });
        blocks.push(vec![images.len() - 1]);
    }
    let kernel_rows: Vec<Vec<Rat>> = d
        .torus()
        .kernel()
        .basis()
        .iter()
        .map(|row| reflect_vec(rs, alpha, row))
        .collect();
    let torus = TorusData::new(Subspace::from_rows(rs.rank(), kernel_rows));
    CombinatorialDatum::new(rs, images, blocks, torus)
}

/// Check a transformation semantically: conjugate the built model by the
/// reflection's algebra action, re-extract, and compare with the
/// combinatorial formula.
pub fn verify_transform(alg: &ChevalleyAlgebra, d: &CombinatorialDatum, alpha: usize) -> Result<bool> {
    let expected = elementary_transform(alg, d, alpha)?;
    let model = build_model(alg, d)?;
    let w = alg.weyl_action(alpha)?;
    let npos = alg.num_positive();

    let mut s_rows = Vec::new();
    for row in model.s_basis().basis() {
        let moved = mat_vec(&w, &alg.embed_cartan(row));
        if moved[..2 * npos].iter().any(|x| !x.is_zero()) {
            return Err(Error::InternalConsistency(
                "conjugated torus part left the torus".into(),
            ));
        }
        s_rows.push(moved[2 * npos..].to_vec());
    }
    let mut n_rows = Vec::new();
    for row in model.n_basis().basis() {
        let moved = mat_vec(&w, &alg.embed_upper(row));
        if moved[npos..].iter().any(|x| !x.is_zero()) {
            return Err(Error::InternalConsistency(
                "conjugated nilpotent part left the positive side".into(),
            ));
        }
        n_rows.push(moved[..npos].to_vec());
    }
    let extracted = extract_datum(
        alg,
        &Subspace::from_rows(alg.rank(), s_rows),
        &Subspace::from_rows(npos, n_rows),
    )?;
    Ok(extracted == expected)
}

// The datum whose transformation at alpha merges the simple root into the
// others and lands on `e`, if that datum exists and is valid.  Together with
// the forward step (which covers the involutive case on its own) this makes
// orbits closed under the equivalence the transformations generate.
fn case_one_preimage(
    alg: &ChevalleyAlgebra,
    e: &CombinatorialDatum,
    alpha: usize,
) -> Result<Option<CombinatorialDatum>> {
    let rs = alg.root_system();
    let simple = rs.simple(alpha);
    if e.pairs().iter().any(|p| p.root == simple)
        || !e.pairs().iter().any(|p| p.root.support().contains(alpha))
    {
        return Ok(None);
    }
    let mut pairs: Vec<MarkedPair> = e
        .pairs()
        .iter()
        .map(|p| MarkedPair {
            root: rs.reflect(alpha, &p.root),
            pi: p.pi,
        })
        .collect();
    let mut blocks = e.blocks().to_vec();
    pairs.push(MarkedPair {
        root: simple,
        pi: alpha,
    });
    blocks.push(vec![pairs.len() - 1]);
    let kernel_rows: Vec<Vec<Rat>> = e
        .torus()
        .kernel()
        .basis()
        .iter()
        .map(|row| reflect_vec(rs, alpha, row))
        .collect();
    let torus = TorusData::new(Subspace::from_rows(rs.rank(), kernel_rows));
    let Ok(candidate) = CombinatorialDatum::new(rs, pairs, blocks, torus) else {
        return Ok(None);
    };
    if !crate::combinatorial_data::validate(rs, &candidate).is_valid() {
        return Ok(None);
    }
    match elementary_transform(alg, &candidate, alpha) {
        Ok(image) if image == *e => Ok(Some(candidate)),
        Ok(_) => Err(Error::InternalConsistency(
            "preimage construction disagrees with the transformation".into(),
        )),
        Err(Error::TransformNotApplicable(_)) => Ok(None),
        Err(err) => Err(err),
    }
}

// Closure of a datum under the equivalence generated by the transformations,
// plus whether any transformation applies anywhere in the orbit.
fn orbit(
    alg: &ChevalleyAlgebra,
    d: &CombinatorialDatum,
    orbit_bound: usize,
) -> Result<(BTreeSet<CombinatorialDatum>, bool)> {
    let rank = alg.rank();
    let mut seen = BTreeSet::from([d.clone()]);
    let mut queue = VecDeque::from([d.clone()]);
    let mut any_applicable = false;
    while let Some(current) = queue.pop_front() {
        let mut reached = Vec::new();
        for alpha in 0..rank {
            match elementary_transform(alg, &current, alpha) {
                Ok(next) => {
                    any_applicable = true;
                    reached.push(next);
                }
                Err(Error::TransformNotApplicable(_)) => {}
                Err(e) => return Err(e),
            }
            if let Some(previous) = case_one_preimage(alg, &current, alpha)? {
                any_applicable = true;
                reached.push(previous);
            }
        }
        for next in reached {
            if seen.insert(next.clone()) {
                if seen.len() > orbit_bound {
                    return Err(Error::OrbitBoundExceeded(orbit_bound));
                }
                queue.push_back(next);
            }
        }
    }
    Ok((seen, any_applicable))
}

/// Least member of the datum's orbit under the total order on data.
pub fn canonical_form(
    alg: &ChevalleyAlgebra,
    d: &CombinatorialDatum,
    orbit_bound: usize,
) -> Result<CombinatorialDatum> {
    let (members, _) = orbit(alg, d, orbit_bound)?;
    Ok(members.into_iter().next().expect("orbit contains its seed"))
}

/// Enumerate and organize into conjugacy classes; `GConjugacy` keeps only the
/// canonical representative of each orbit.
pub fn classify(
    alg: &ChevalleyAlgebra,
    up_to: UpTo,
    rank_cap: usize,
    orbit_bound: usize,
) -> Result<Vec<ClassificationEntry>> {
    let rs = alg.root_system();
    let data = enumerate_data(rs, rank_cap)?;
    let mut canon_of: BTreeMap<CombinatorialDatum, (CombinatorialDatum, bool)> = BTreeMap::new();
    for d in &data {
        if canon_of.contains_key(d) {
            continue;
        }
        let (members, any_applicable) = orbit(alg, d, orbit_bound)?;
        let canon = members.iter().next().expect("orbit nonempty").clone();
        // isolation is only worth review when something is marked: the bare
        // Borel datum is alone in its class for dimension reasons
        let flagged = members.len() == 1 && !any_applicable && !d.pairs().is_empty();
        for member in members {
            canon_of.insert(member, (canon.clone(), flagged));
        }
    }
    let ids: BTreeMap<&CombinatorialDatum, usize> = data
        .iter()
        .map(|d| &canon_of[d].0)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    let mut entries = Vec::new();
    for d in &data {
        let (canon, flagged) = &canon_of[d];
        let canonical = d == canon;
        if up_to == UpTo::GConjugacy && !canonical {
            continue;
        }
        entries.push(ClassificationEntry {
            datum: d.clone(),
            orbit_id: ids[canon],
            canonical,
            flagged: *flagged,
        });
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::{build_root_system, Root};

    fn algebra(label: &str) -> ChevalleyAlgebra {
        ChevalleyAlgebra::new(build_root_system(label).unwrap()).unwrap()
    }

    fn counts(label: &str) -> (usize, usize) {
        let alg = algebra(label);
        let torus = classify(&alg, UpTo::TorusConjugacy, 4, 1_000_000).unwrap();
        let classes = classify(&alg, UpTo::GConjugacy, 4, 1_000_000).unwrap();
        (torus.len(), classes.len())
    }

    #[test]
    fn frozen_class_counts() {
        assert_eq!(counts("A1"), (2, 2));
        assert_eq!(counts("A1xA1"), (5, 5));
        assert_eq!(counts("A2"), (7, 5));
        assert_eq!(counts("B2"), (8, 6));
        assert_eq!(counts("G2"), (9, 7));
    }

    #[test]
    fn empty_marked_set_is_always_first() {
        for label in ["A1", "A2", "B2", "G2", "A1xA1", "A3"] {
            let rs = build_root_system(label).unwrap();
            let data = enumerate_data(&rs, 4).unwrap();
            assert!(data[0].pairs().is_empty(), "{label}");
            assert!(data[0].torus().kernel().is_zero());
        }
    }

    #[test]
    fn rank_cap_is_enforced() {
        let rs = build_root_system("B3").unwrap();
        assert!(matches!(
            enumerate_data(&rs, 2),
            Err(Error::RankCapExceeded { rank: 3, cap: 2 })
        ));
    }

    #[test]
    fn transform_merges_the_reflected_pair() {
        let alg = algebra("A2");
        let rs = alg.root_system();
        let data = enumerate_data(rs, 4).unwrap();
        let unfused = data
            .iter()
            .find(|d| d.pairs().len() == 2 && d.blocks().len() == 2)
            .unwrap();
        let at_first = elementary_transform(&alg, unfused, 0).unwrap();
        assert_eq!(at_first.pairs().len(), 1);
        assert_eq!(at_first.pairs()[0].root, Root::new(vec![1, 1]));
        assert_eq!(at_first.pairs()[0].pi, 1);
        let at_second = elementary_transform(&alg, unfused, 1).unwrap();
        assert_eq!(at_second.pairs()[0].root, Root::new(vec![1, 1]));
        assert_eq!(at_second.pairs()[0].pi, 0);
    }

    #[test]
    fn lone_simple_root_transform_is_an_involution() {
        let alg = algebra("A1");
        let rs = alg.root_system();
        let data = enumerate_data(rs, 4).unwrap();
        let marked = &data[1];
        assert_eq!(marked.pairs().len(), 1);
        let once = elementary_transform(&alg, marked, 0).unwrap();
        assert_eq!(&once, marked);
        let twice = elementary_transform(&alg, &once, 0).unwrap();
        assert_eq!(&twice, marked);
    }

    #[test]
    fn inapplicable_transforms_are_refused() {
        let alg = algebra("A1xA1");
        let rs = alg.root_system();
        let data = enumerate_data(rs, 4).unwrap();
        let fused = data.iter().find(|d| d.blocks().iter().any(|b| b.len() == 2)).unwrap();
        // fused simple roots are marked but not regular
        assert!(matches!(
            elementary_transform(&alg, fused, 0),
            Err(Error::TransformNotApplicable(_))
        ));
        // nothing marked at all
        assert!(matches!(
            elementary_transform(&alg, &data[0], 0),
            Err(Error::TransformNotApplicable(_))
        ));
    }

    #[test]
    fn conjugation_matches_the_combinatorial_formula() {
        let alg = algebra("A2");
        let rs = alg.root_system();
        for d in enumerate_data(rs, 4).unwrap() {
            for alpha in 0..rs.rank() {
                match elementary_transform(&alg, &d, alpha) {
                    Ok(_) => assert!(verify_transform(&alg, &d, alpha).unwrap()),
                    Err(Error::TransformNotApplicable(_)) => {}
                    Err(e) => panic!("unexpected failure: {e}"),
                }
            }
        }
    }

    #[test]
    fn canonical_form_is_orbit_constant_and_idempotent() {
        let alg = algebra("A2");
        let rs = alg.root_system();
        for d in enumerate_data(rs, 4).unwrap() {
            let canon = canonical_form(&alg, &d, 1_000_000).unwrap();
            assert_eq!(canonical_form(&alg, &canon, 1_000_000).unwrap(), canon);
            for alpha in 0..rs.rank() {
                if let Ok(next) = elementary_transform(&alg, &d, alpha) {
                    assert_eq!(canonical_form(&alg, &next, 1_000_000).unwrap(), canon);
                }
            }
        }
    }

    #[test]
    fn merged_marked_roots_share_an_orbit() {
        let alg = algebra("A2");
        let rs = alg.root_system();
        let data = enumerate_data(rs, 4).unwrap();
        let unfused = data
            .iter()
            .find(|d| d.pairs().len() == 2 && d.blocks().len() == 2)
            .unwrap();
        let composites: Vec<&CombinatorialDatum> =
            data.iter().filter(|d| d.pairs().len() == 1 && d.pairs()[0].root == Root::new(vec![1, 1])).collect();
        assert_eq!(composites.len(), 2);
        for c in composites {
            assert_eq!(
                canonical_form(&alg, c, 1_000_000).unwrap(),
                canonical_form(&alg, unfused, 1_000_000).unwrap()
            );
        }
    }

    #[test]
    fn isolated_data_are_flagged() {
        let alg = algebra("B2");
        let entries = classify(&alg, UpTo::GConjugacy, 4, 1_000_000).unwrap();
        // exactly one canonical entry per orbit
        let ids: BTreeSet<usize> = entries.iter().map(|e| e.orbit_id).collect();
        assert_eq!(ids.len(), entries.len());
        // the fused simple pair and the composite root marked through its
        // first node admit no transformation anywhere
        let flagged: Vec<&ClassificationEntry> = entries.iter().filter(|e| e.flagged).collect();
        assert_eq!(flagged.len(), 2);
        for e in &entries {
            assert!(e.canonical);
        }
    }

    #[test]
    fn orbit_bound_is_respected() {
        let alg = algebra("A2");
        let rs = alg.root_system();
        let data = enumerate_data(rs, 4).unwrap();
        let unfused = data
            .iter()
            .find(|d| d.pairs().len() == 2 && d.blocks().len() == 2)
            .unwrap();
        assert!(matches!(
            canonical_form(&alg, unfused, 1),
            Err(Error::OrbitBoundExceeded(1))
        ));
    }
}
