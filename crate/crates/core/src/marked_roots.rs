//! Admissible marked roots: the closed-form table of admissible pairs and an
//! independent derivation of the same set from the exactly-one-summand rule.

use crate::error::{Error, Result};
use crate::root_system::{Root, RootSystem, Series};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A positive root together with its associated simple root (by node index).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkedPair {
    pub root: Root,
    pub pi: usize,
}

impl fmt::Display for MarkedPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [pi=a{}]", self.root, self.pi + 1)
    }
}

/// Closure of one admissible pair: every root forced to be marked, with its
/// associated simple root, plus every root forced to be unmarked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedClosure {
    pub pairs: Vec<MarkedPair>,
    pub unmarked: Vec<Root>,
}

impl MarkedClosure {
    pub fn roots(&self) -> impl Iterator<Item = &Root> + '_ {
        self.pairs.iter().map(|p| &p.root)
    }

    pub fn pi_of(&self, root: &Root) -> Option<usize> {
        self.pairs.iter().find(|p| &p.root == root).map(|p| p.pi)
    }
}

// Constraint state threaded through the fixpoint: a root is either marked
// (optionally with its associated simple root already determined) or unmarked.
#[derive(Clone, Default)]
struct MarkState {
    assoc: BTreeMap<Root, Option<usize>>,
    unmarked: BTreeSet<Root>,
    expanded: BTreeSet<Root>,
}

impl MarkState {
    fn force_marked(&mut self, root: Root) -> Result<()> {
        if self.unmarked.contains(&root) {
            return Err(Error::NotAdmissible(format!(
                "{root} is forced both marked and unmarked"
            )));
        }
        self.assoc.entry(root).or_insert(None);
        Ok(())
    }

    fn force_unmarked(&mut self, root: Root) -> Result<()> {
        if self.assoc.contains_key(&root) {
            return Err(Error::NotAdmissible(format!(
                "{root} is forced both marked and unmarked"
            )));
        }
        self.unmarked.insert(root);
        Ok(())
    }
}

/// Applies the exactly-one-summand-marked rule to every marked root whose
/// associated simple root is known, until nothing new is forced.
fn propagate(rs: &RootSystem, state: &mut MarkState) -> Result<()> {
    loop {
        let Some((beta, pi)) = state
            .assoc
            .iter()
            .find(|(r, a)| a.is_some() && !state.expanded.contains(r))
            .map(|(r, a)| (r.clone(), a.unwrap()))
        else {
            return Ok(());
        };
        state.expanded.insert(beta.clone());
        for (b1, b2) in rs.decompositions(&beta) {
            match (b1.support().contains(pi), b2.support().contains(pi)) {
                (true, true) => {
                    return Err(Error::NotAdmissible(format!(
                        "both summands of {beta} = {b1} + {b2} contain a{}",
                        pi + 1
                    )));
                }
                (true, false) => {
                    state.force_unmarked(b1)?;
                    state.force_marked(b2)?;
                }
                (false, true) => {
                    state.force_unmarked(b2)?;
                    state.force_marked(b1)?;
                }
                (false, false) => unreachable!("pi lies in the support of the sum"),
            }
        }
    }
}

/// Resolves every marked root without an associated simple root, requiring a
/// unique globally consistent choice each time.
fn complete(rs: &RootSystem, mut state: MarkState) -> Result<MarkState> {
    propagate(rs, &mut state)?;
    let Some(beta) = state
        .assoc
        .iter()
        .find(|(_, a)| a.is_none())
        .map(|(r, _)| r.clone())
    else {
        return Ok(state);
    };
    let mut successes = Vec::new();
    for delta in beta.support().iter() {
        let mut trial = state.clone();
        trial.assoc.insert(beta.clone(), Some(delta));
        if let Ok(done) = complete(rs, trial) {
            successes.push(done);
        }
    }
    match successes.len() {
        1 => Ok(successes.pop().unwrap()),
        0 => Err(Error::NotAdmissible(format!(
            "no associated simple root is consistent for {beta}"
        ))),
        _ => Err(Error::NotAdmissible(format!(
            "the associated simple root of {beta} is not unique"
        ))),
    }
}

/// Closure of the pair `(alpha, pi)` under the exactly-one-summand-marked rule.
///
/// Fails with the violated rule if the pair is not admissible.
pub fn build_closure(rs: &RootSystem, alpha: &Root, pi: usize) -> Result<MarkedClosure> {
    assert!(rs.is_positive_root(alpha), "closure of a non-positive root");
    assert!(alpha.support().contains(pi), "pi outside the support");
    let mut state = MarkState::default();
    state.assoc.insert(alpha.clone(), Some(pi));
    let done = complete(rs, state)?;
    let pairs = done
        .assoc
        .into_iter()
        .map(|(root, a)| MarkedPair { root, pi: a.expect("complete resolves every root") })
        .collect();
    Ok(MarkedClosure { pairs, unmarked: done.unmarked.into_iter().collect() })
}

/// Every admissible pair, derived solely from the closure fixpoint.
///
/// Independent of [`table1_pairs`]; the two must agree on every system.
pub fn derive_admissible_pairs(rs: &RootSystem, component_cap: usize) -> Result<Vec<MarkedPair>> {
    for &(_, rank) in &rs.label().0 {
        if rank > component_cap {
            return Err(Error::ComponentCapExceeded { rank, cap: component_cap });
        }
    }
    let mut out = Vec::new();
    for alpha in rs.positive_roots() {
        for delta in alpha.support().iter() {
            if build_closure(rs, alpha, delta).is_ok() {
                out.push(MarkedPair { root: alpha.clone(), pi: delta });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Every admissible pair, read off the closed-form table row patterns.
///
/// The sub-diagram generated by the support of each root is classified first,
/// so the row patterns are matched in the sub-diagram's own standard numbering.
pub fn table1_pairs(rs: &RootSystem) -> Vec<MarkedPair> {
    let mut out = Vec::new();
    for alpha in rs.positive_roots() {
        let support = alpha.support();
        let comp = &rs
            .classify_support(&support)
            .expect("root supports induce valid diagrams")[0];
        let local: Vec<i64> = comp.nodes.iter().map(|&n| alpha.coeffs()[n]).collect();
        let m = comp.rank;
        if local.iter().all(|&c| c == 1) {
            for delta in support.iter() {
                out.push(MarkedPair { root: alpha.clone(), pi: delta });
            }
            continue;
        }
        match comp.series {
            Series::B => {
                // 1, ..., 1, 2 with any long simple root associated
                if local[..m - 1].iter().all(|&c| c == 1) && local[m - 1] == 2 {
                    for &node in &comp.nodes[..m - 1] {
                        out.push(MarkedPair { root: alpha.clone(), pi: node });
                    }
                }
            }
            Series::C => {
                // 2, ..., 2, 1 with the long simple root associated
                if local[..m - 1].iter().all(|&c| c == 2) && local[m - 1] == 1 {
                    out.push(MarkedPair { root: alpha.clone(), pi: comp.nodes[m - 1] });
                }
            }
            Series::F => {
                // 2, 2, 1, 1 with either long simple root associated
                if local == [2, 2, 1, 1] {
                    for &node in &comp.nodes[2..] {
                        out.push(MarkedPair { root: alpha.clone(), pi: node });
                    }
                }
            }
            Series::G => {
                // 2, 1 or 3, 1 with the long simple root associated
                if local == [2, 1] || local == [3, 1] {
                    out.push(MarkedPair { root: alpha.clone(), pi: comp.nodes[1] });
                }
            }
            Series::A | Series::D | Series::E => {}
        }
    }
    out.sort();
    out
}
