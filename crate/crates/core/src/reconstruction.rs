//! Realize combinatorial data as concrete subalgebras of the ambient Lie
//! algebra, and read the data back off a subalgebra in standard position.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};

use crate::combinatorial_data::{root_vector, tau_classes, CombinatorialDatum, TorusData};
use crate::lie_algebra::ChevalleyAlgebra;
use crate::linalg::{nullspace, Subspace};
use crate::marked_roots::{build_closure, MarkedPair};
use crate::root_system::{Root, RootSystem};
use crate::{Error, Rat, Result};

/// A standardly embedded connected solvable subgroup, presented on the Lie
/// algebra side: a subtorus part `s` (in coroot coordinates) and a nilpotent
/// part `n` (in positive root-space coordinates).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupModel {
    torus: TorusData,
    psi: Vec<MarkedPair>,
    s_basis: Subspace<Rat>,
    n_basis: Subspace<Rat>,
    datum: Option<CombinatorialDatum>,
}

impl SubgroupModel {
    pub fn torus(&self) -> &TorusData {
        &self.torus
    }

    /// Every marked root with its association, maximal and subordinate alike.
    /// Populated only for models built from a datum; raw-subspace models keep
    /// it empty and answer markedness questions through `is_marked`.
    pub fn psi(&self) -> &[MarkedPair] {
        &self.psi
    }

    pub fn s_basis(&self) -> &Subspace<Rat> {
        &self.s_basis
    }

    pub fn n_basis(&self) -> &Subspace<Rat> {
        &self.n_basis
    }

    pub fn datum(&self) -> Option<&CombinatorialDatum> {
        self.datum.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.s_basis.dim() + self.n_basis.dim()
    }

    /// Whether the root space of `root` sticks out of `n`.
    pub fn is_marked(&self, rs: &RootSystem, root: &Root) -> bool {
        match rs.positive_index(root) {
            Some(i) => !self.n_basis.contains(&unit(self.n_basis.ambient(), i)),
            None => false,
        }
    }

    /// The whole subalgebra `s + n` as a subspace of the ambient algebra.
    pub fn embedded(&self, alg: &ChevalleyAlgebra) -> Result<Subspace<Rat>> {
        if self.s_basis.ambient() != alg.rank() || self.n_basis.ambient() != alg.num_positive() {
            return Err(Error::AlgebraMismatch);
        }
        let mut rows: Vec<Vec<Rat>> = self
            .s_basis
            .basis()
            .iter()
            .map(|r| alg.embed_cartan(r))
            .collect();
        rows.extend(self.n_basis.basis().iter().map(|r| alg.embed_upper(r)));
        Ok(Subspace::from_rows(alg.dim(), rows))
    }
}

fn unit(ambient: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); ambient];
    v[i] = Rat::one();
    v
}

/// Union of the closures of a datum's maximal marked roots: the complete
/// marked set with associations.
pub fn full_marked_set(rs: &RootSystem, d: &CombinatorialDatum) -> Result<Vec<MarkedPair>> {
    let mut assoc: BTreeMap<Root, usize> = BTreeMap::new();
    let mut unmarked: BTreeSet<Root> = BTreeSet::new();
    for pair in d.pairs() {
        let closure = build_closure(rs, &pair.root, pair.pi)?;
        for member in &closure.pairs {
            if let Some(&prev) = assoc.get(&member.root) {
                if prev != member.pi {
                    return Err(Error::ConflictingClosures(format!(
                        "{} is associated with both a{} and a{}",
                        member.root,
                        prev + 1,
                        member.pi + 1
                    )));
                }
            }
            assoc.insert(member.root.clone(), member.pi);
        }
        unmarked.extend(closure.unmarked.iter().cloned());
    }
    if let Some(root) = assoc.keys().find(|r| unmarked.contains(*r)) {
        return Err(Error::ConflictingClosures(format!(
            "{root} is marked in one closure and unmarked in another"
        )));
    }
    Ok(assoc
        .into_iter()
        .map(|(root, pi)| MarkedPair { root, pi })
        .collect())
}

// The subtorus s is cut out of t by the kernel characters: a character row k
// kills h iff (C^T k) . h = 0 with C the Cartan matrix, since a_j(h_i) is
// exactly the Cartan pairing.
fn s_from_kernel(rs: &RootSystem, torus: &TorusData) -> Result<Subspace<Rat>> {
    let rank = rs.rank();
    let eqs: Vec<Vec<Rat>> = torus
        .kernel()
        .basis()
        .iter()
        .map(|row| {
            (0..rank)
                .map(|i| {
                    (0..rank)
                        .map(|j| Rat::from_integer(rs.cartan(i, j).into()) * &row[j])
                        .sum()
                })
                .collect()
        })
        .collect();
    let s = nullspace(&eqs, rank);
    if s.dim() != torus.s_rank() {
        return Err(Error::InternalConsistency(
            "subtorus dimension disagrees with the kernel corank".into(),
        ));
    }
    Ok(s)
}

// Kernel of the character restriction determined by a subtorus: all rational
// root-lattice vectors vanishing on every s basis element.
fn kernel_from_s(rs: &RootSystem, s_basis: &Subspace<Rat>) -> Subspace<Rat> {
    let rank = rs.rank();
    let eqs: Vec<Vec<Rat>> = s_basis
        .basis()
        .iter()
        .map(|c| {
            (0..rank)
                .map(|j| {
                    (0..rank)
                        .map(|i| Rat::from_integer(rs.cartan(i, j).into()) * &c[i])
                        .sum()
                })
                .collect()
        })
        .collect();
    nullspace(&eqs, rank)
}

fn class_span(npos: usize, class: &[usize]) -> Subspace<Rat> {
    Subspace::from_rows(npos, class.iter().map(|&i| unit(npos, i)).collect())
}

// Bracket of two elements of the positive part, in positive coordinates.
fn u_bracket(alg: &ChevalleyAlgebra, v: &[Rat], w: &[Rat]) -> Result<Vec<Rat>> {
    let full = alg.bracket(&alg.embed_upper(v), &alg.embed_upper(w))?;
    Ok(full[..alg.num_positive()].to_vec())
}

fn bracket_closed(alg: &ChevalleyAlgebra, n: &Subspace<Rat>) -> Result<bool> {
    let rows = n.basis();
    for (i, v) in rows.iter().enumerate() {
        for w in &rows[i + 1..] {
            if !n.contains(&u_bracket(alg, v, w)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn graded_by(n: &Subspace<Rat>, classes: &[Vec<usize>]) -> bool {
    let total: usize = classes
        .iter()
        .map(|c| n.intersect(&class_span(n.ambient(), c)).dim())
        .sum();
    total == n.dim()
}

/// Wrap a user-supplied subtorus and nilpotent part as a model, after checking
/// that `n` is stable under the subtorus and closed under the bracket.
pub fn from_subspaces(
    alg: &ChevalleyAlgebra,
    torus: TorusData,
    n_basis: Subspace<Rat>,
) -> Result<SubgroupModel> {
    let rs = alg.root_system();
    if n_basis.ambient() != alg.num_positive() || torus.kernel().ambient() != rs.rank() {
        return Err(Error::AlgebraMismatch);
    }
    let classes = tau_classes(rs, &torus);
    if !graded_by(&n_basis, &classes) {
        return Err(Error::NotStandardForm(
            "n is not graded by the torus weight classes".into(),
        ));
    }
    if !bracket_closed(alg, &n_basis)? {
        return Err(Error::NotStandardForm(
            "n is not closed under the bracket".into(),
        ));
    }
    let s_basis = s_from_kernel(rs, &torus)?;
    Ok(SubgroupModel {
        torus,
        psi: Vec::new(),
        s_basis,
        n_basis,
        datum: None,
    })
}

/// Build the model of a datum: `s` from the torus kernel, `n` spanned by the
/// unmarked root vectors together with one difference chain per weight class
/// of fused marked roots, signs resolved by the bracket-closure search.
pub fn build_model(alg: &ChevalleyAlgebra, d: &CombinatorialDatum) -> Result<SubgroupModel> {
    let rs = alg.root_system();
    let npos = rs.num_positive();
    let positives = rs.positive_roots();
    let psi = full_marked_set(rs, d)?;
    let marked: BTreeSet<&Root> = psi.iter().map(|p| &p.root).collect();
    let s_basis = s_from_kernel(rs, d.torus())?;
    let classes = tau_classes(rs, d.torus());

    let mut fixed_rows: Vec<Vec<Rat>> = Vec::new();
    let mut chains: Vec<Vec<usize>> = Vec::new();
    let mut marked_classes = 0usize;
    for class in &classes {
        let marked_members: Vec<usize> = class
            .iter()
            .copied()
            .filter(|&i| marked.contains(&positives[i]))
            .collect();
        for &i in class {
            if !marked_members.contains(&i) {
                fixed_rows.push(unit(npos, i));
            }
        }
        if !marked_members.is_empty() {
            marked_classes += 1;
        }
        if marked_members.len() >= 2 {
            chains.push(marked_members);
        }
    }

    let bits: usize = chains.iter().map(|c| c.len() - 1).sum();
    if bits >= u64::BITS as usize {
        return Err(Error::InternalConsistency(
            "sign search space exceeds 64 bits".into(),
        ));
    }
    let mut found = None;
    for assignment in 0u64..(1u64 << bits) {
        let mut rows = fixed_rows.clone();
        let mut cursor = 0;
        for chain in &chains {
            let mut prev_sign = 1i64;
            for pair in chain.windows(2) {
                let sign = if (assignment >> cursor) & 1 == 1 { -1 } else { 1 };
                cursor += 1;
                let mut row = vec![Rat::zero(); npos];
                row[pair[0]] = Rat::from_integer(prev_sign.into());
                row[pair[1]] = Rat::from_integer((-sign).into());
                rows.push(row);
                prev_sign = sign;
            }
        }
        let candidate = Subspace::from_rows(npos, rows);
        if bracket_closed(alg, &candidate)? {
            found = Some(candidate);
            break;
        }
    }
    let n_basis = found.ok_or(Error::NoClosingSigns)?;

    if n_basis.dim() != npos - marked_classes {
        return Err(Error::InternalConsistency(
            "nilpotent part has the wrong dimension".into(),
        ));
    }
    for root in &marked {
        let i = rs.positive_index(root).expect("marked roots are positive");
        if n_basis.contains(&unit(npos, i)) {
            return Err(Error::InternalConsistency(format!(
                "marked root space g_{root} fell inside n"
            )));
        }
    }

    Ok(SubgroupModel {
        torus: d.torus().clone(),
        psi,
        s_basis,
        n_basis,
        datum: Some(d.clone()),
    })
}

/// Read the combinatorial datum back off a subalgebra in standard position.
pub fn extract_datum(
    alg: &ChevalleyAlgebra,
    s_basis: &Subspace<Rat>,
    n_basis: &Subspace<Rat>,
) -> Result<CombinatorialDatum> {
    let rs = alg.root_system();
    let rank = rs.rank();
    let npos = rs.num_positive();
    let positives = rs.positive_roots();
    if s_basis.ambient() != rank || n_basis.ambient() != npos {
        return Err(Error::AlgebraMismatch);
    }

    let kernel = kernel_from_s(rs, s_basis);
    let torus = TorusData::new(kernel);
    let classes = tau_classes(rs, &torus);
    if !graded_by(n_basis, &classes) {
        return Err(Error::NotStandardForm(
            "n is not graded by the torus weight classes".into(),
        ));
    }
    if !bracket_closed(alg, n_basis)? {
        return Err(Error::NotStandardForm(
            "n is not closed under the bracket".into(),
        ));
    }

    let is_marked: Vec<bool> = (0..npos)
        .map(|i| !n_basis.contains(&unit(npos, i)))
        .collect();

    // Recover each marked root's association: the unique support node such
    // that in every decomposition exactly one summand is marked, the marked
    // summand avoids the node, and the unmarked one contains it.
    let mut assoc: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..npos {
        if !is_marked[i] {
            continue;
        }
        let beta = &positives[i];
        let decomps = rs.decompositions(beta);
        let mut candidates = Vec::new();
        for delta in beta.support().iter() {
            let fits = decomps.iter().all(|(g1, g2)| {
                let m1 = is_marked[rs.positive_index(g1).expect("summands are positive")];
                let m2 = is_marked[rs.positive_index(g2).expect("summands are positive")];
                if m1 == m2 {
                    return false;
                }
                let (kept, dropped) = if m1 { (g1, g2) } else { (g2, g1) };
                !kept.support().contains(delta) && dropped.support().contains(delta)
            });
            if fits {
                candidates.push(delta);
            }
        }
        match candidates.as_slice() {
            [delta] => {
                assoc.insert(i, *delta);
            }
            [] => {
                return Err(Error::NotStandardForm(format!(
                    "marked root {beta} admits no association"
                )))
            }
            _ => {
                return Err(Error::NotStandardForm(format!(
                    "marked root {beta} admits several associations"
                )))
            }
        }
    }

    // Cross-check every marked root's closure against the actual markings and
    // record which marked roots sit inside another root's closure.
    let mut subordinate: BTreeSet<usize> = BTreeSet::new();
    let mut closure_members: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (&i, &pi) in &assoc {
        let beta = &positives[i];
        let closure = build_closure(rs, beta, pi)
            .map_err(|e| Error::NotStandardForm(format!("marked root {beta}: {e}")))?;
        let mut members = BTreeSet::new();
        for member in &closure.pairs {
            let j = rs
                .positive_index(&member.root)
                .expect("closure members are positive");
            if !is_marked[j] || assoc[&j] != member.pi {
                return Err(Error::NotStandardForm(format!(
                    "markings disagree with the closure of {beta}"
                )));
            }
            members.insert(j);
            if j != i {
                subordinate.insert(j);
            }
        }
        for u in &closure.unmarked {
            let j = rs
                .positive_index(u)
                .expect("closure members are positive");
            if is_marked[j] {
                return Err(Error::NotStandardForm(format!(
                    "{u} is marked but the closure of {beta} forces it unmarked"
                )));
            }
        }
        closure_members.insert(i, members);
    }

    let maximal: Vec<usize> = assoc
        .keys()
        .copied()
        .filter(|i| !subordinate.contains(i))
        .collect();
    let covered: BTreeSet<usize> = maximal
        .iter()
        .flat_map(|i| closure_members[i].iter().copied())
        .collect();
    if !assoc.keys().all(|i| covered.contains(i)) {
        return Err(Error::NotStandardForm(
            "marked set is not generated by its maximal roots".into(),
        ));
    }

    let pairs: Vec<MarkedPair> = maximal
        .iter()
        .map(|&i| MarkedPair {
            root: positives[i].clone(),
            pi: assoc[&i],
        })
        .collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (k, pair) in pairs.iter().enumerate() {
        let home = blocks.iter_mut().find(|block| {
            let diff = pair.root.sub(&pairs[block[0]].root);
            torus.kernel().contains(&root_vector(&diff))
        });
        match home {
            Some(block) => block.push(k),
            None => blocks.push(vec![k]),
        }
    }
    CombinatorialDatum::new(rs, pairs, blocks, torus)
}

/// Whether a marked root's chain coordinate is absent from `n`: its root
/// vector can then be scaled independently, which is what the elementary
/// transformations require.
pub fn is_regular(rs: &RootSystem, m: &SubgroupModel, root: &Root) -> Result<bool> {
    if !m.is_marked(rs, root) {
        return Err(Error::BadDatum(format!(
            "{root} is not a marked root of this model"
        )));
    }
    let i = rs.positive_index(root).expect("marked roots are positive");
    Ok(m.n_basis.basis().iter().all(|row| row[i].is_zero()))
}
