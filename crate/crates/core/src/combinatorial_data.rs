//! Combinatorial data for a connected solvable subgroup and its validator.

use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::marked_roots::{table1_pairs, MarkedPair};
use crate::root_system::{Root, RootSystem, SupportSet};
use crate::Rat;
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// The subtorus, described by the kernel of the character restriction map on
/// the rational root space.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorusData {
    kernel: Subspace<Rat>,
    s_rank: usize,
}

impl TorusData {
    pub fn new(kernel: Subspace<Rat>) -> Self {
        let s_rank = kernel.ambient() - kernel.dim();
        TorusData { kernel, s_rank }
    }

    pub fn kernel(&self) -> &Subspace<Rat> {
        &self.kernel
    }

    pub fn s_rank(&self) -> usize {
        self.s_rank
    }
}

/// A candidate classification datum: marked roots with associated simple
/// roots, a fusion partition, and a subtorus.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CombinatorialDatum {
    pairs: Vec<MarkedPair>,
    blocks: Vec<Vec<usize>>,
    torus: TorusData,
}

/// A root's coefficient vector over the rationals.
pub fn root_vector(r: &Root) -> Vec<Rat> {
    r.coeffs().iter().map(|&c| Rat::from_integer(c.into())).collect()
}

impl CombinatorialDatum {
    /// Builds a datum, sorting the marked pairs into the global root order and
    /// canonicalizing the fusion partition. Fails on structural defects only;
    /// the classification conditions are checked by [`validate`].
    pub fn new(
        rs: &RootSystem,
        pairs: Vec<MarkedPair>,
        blocks: Vec<Vec<usize>>,
        torus: TorusData,
    ) -> Result<Self> {
        let bad = |msg: String| Error::BadDatum(msg);
        for p in &pairs {
            if !rs.is_positive_root(&p.root) {
                return Err(bad(format!("{} is not a positive root of {}", p.root, rs.label())));
            }
            if p.pi >= rs.rank() || !p.root.support().contains(p.pi) {
                return Err(bad(format!("associated simple root outside the support: {p}")));
            }
        }
        let k = pairs.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&x, &y| pairs[x].cmp(&pairs[y]));
        let mut position = vec![0usize; k];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let mut sorted: Vec<MarkedPair> = order.iter().map(|&i| pairs[i].clone()).collect();
        if sorted.windows(2).any(|w| w[0].root == w[1].root) {
            return Err(bad("duplicate marked root".into()));
        }
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|b| {
                let mut b: Vec<usize> = b
                    .into_iter()
                    .map(|i| position.get(i).copied().ok_or_else(|| bad(format!("fusion index {i} out of range"))))
                    .collect::<Result<_>>()?;
                b.sort_unstable();
                if b.is_empty() {
                    return Err(bad("empty fusion block".into()));
                }
                Ok(b)
            })
            .collect::<Result<_>>()?;
        blocks.sort();
        let mut seen: Vec<usize> = blocks.iter().flatten().copied().collect();
        seen.sort_unstable();
        if seen != (0..k).collect::<Vec<_>>() {
            return Err(bad("fusion blocks do not partition the marked set".into()));
        }
        if torus.kernel().ambient() != rs.rank() {
            return Err(bad("kernel ambient dimension differs from the rank".into()));
        }
        sorted.shrink_to_fit();
        Ok(CombinatorialDatum { pairs: sorted, blocks, torus })
    }

    pub fn pairs(&self) -> &[MarkedPair] {
        &self.pairs
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn torus(&self) -> &TorusData {
        &self.torus
    }

    /// Block id of each marked pair.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.pairs.len()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                out[i] = b;
            }
        }
        out
    }
}

/// Joint span of the differences within each fusion block.
pub fn difference_span(rank: usize, pairs: &[MarkedPair], blocks: &[Vec<usize>]) -> Subspace<Rat> {
    let mut rows = Vec::new();
    for block in blocks {
        for w in block.windows(2) {
            rows.push(root_vector(&pairs[w[0]].root.sub(&pairs[w[1]].root)));
        }
    }
    Subspace::from_rows(rank, rows)
}

/// Coordinate span of the union of the marked supports.
pub fn support_span(rank: usize, pairs: &[MarkedPair]) -> Subspace<Rat> {
    let union = pairs
        .iter()
        .fold(SupportSet::empty(), |acc, p| acc.union(&p.root.support()));
    let rows = union
        .iter()
        .map(|i| {
            let mut row = vec![Rat::zero(); rank];
            row[i] = Rat::one();
            row
        })
        .collect();
    Subspace::from_rows(rank, rows)
}

/// The largest subtorus compatible with the fusion partition: the kernel is
/// exactly the span of the in-block differences.
pub fn canonical_torus(rank: usize, pairs: &[MarkedPair], blocks: &[Vec<usize>]) -> TorusData {
    TorusData::new(difference_span(rank, pairs, blocks))
}

/// Partition of the positive roots (by index) into fibers of the restricted
/// character map: two roots land together iff their difference lies in the
/// torus kernel.  Classes are ordered by first member, members ascending.
pub fn tau_classes(rs: &RootSystem, torus: &TorusData) -> Vec<Vec<usize>> {
    let positives = rs.positive_roots();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, root) in positives.iter().enumerate() {
        let home = classes.iter_mut().find(|class| {
            let diff = root.sub(&positives[class[0]]);
            torus.kernel().contains(&root_vector(&diff))
        });
        match home {
            Some(class) => class.push(i),
            None => classes.push(vec![i]),
        }
    }
    classes
}

/// Whether the two supports share no node.
pub fn supports_disjoint(a: &MarkedPair, b: &MarkedPair) -> bool {
    a.root.support().is_disjoint_from(&b.root.support())
}

/// The single shared node of the two supports, provided it is terminal with
/// respect to both.
fn shared_terminal(rs: &RootSystem, a: &MarkedPair, b: &MarkedPair) -> Option<usize> {
    let meet = a.root.support().intersection(&b.root.support());
    let mut nodes = meet.iter();
    let delta = nodes.next()?;
    if nodes.next().is_some() {
        return None;
    }
    let terminal = |p: &MarkedPair| rs.is_terminal(delta, &p.root.support()).unwrap();
    (terminal(a) && terminal(b)).then_some(delta)
}

/// Supports meeting in a single terminal node that is neither association.
pub fn meets_at_foreign_terminal(rs: &RootSystem, a: &MarkedPair, b: &MarkedPair) -> bool {
    matches!(shared_terminal(rs, a, b), Some(delta) if a.pi != delta && b.pi != delta)
}

/// Supports meeting in a single terminal node that is both associations, with
/// both roots staying roots after subtracting it.
pub fn meets_at_shared_association(rs: &RootSystem, a: &MarkedPair, b: &MarkedPair) -> bool {
    let Some(delta) = shared_terminal(rs, a, b) else {
        return false;
    };
    let simple = Root::simple(rs.rank(), delta);
    a.pi == delta
        && b.pi == delta
        && rs.is_positive_root(&a.root.sub(&simple))
        && rs.is_positive_root(&b.root.sub(&simple))
}

/// Matches the branched shape: the union of the supports is a tree with one
/// degree-3 node, both roots have all coefficients 1, and each support is a
/// chain through that node consisting of its own branch plus the shared spine.
/// Returns the spine (the support intersection).
fn branch_shape(rs: &RootSystem, a: &MarkedPair, b: &MarkedPair) -> Option<SupportSet> {
    if a.root.coeffs().iter().any(|&c| c > 1) || b.root.coeffs().iter().any(|&c| c > 1) {
        return None;
    }
    let (sa, sb) = (a.root.support(), b.root.support());
    let meet = sa.intersection(&sb);
    if meet.is_empty() || sa.is_subset_of(&sb) || sb.is_subset_of(&sa) {
        return None;
    }
    let union = sa.union(&sb);
    let degree =
        |s: &SupportSet, n: usize| s.iter().filter(|&m| m != n && rs.adjacent(n, m)).count();
    let mut centers = union.iter().filter(|&n| degree(&union, n) >= 3);
    let c0 = centers.next()?;
    if centers.next().is_some() || degree(&union, c0) != 3 || !meet.contains(c0) {
        return None;
    }
    if degree(&sa, c0) != 2 || degree(&sb, c0) != 2 {
        return None;
    }
    let connected = |s: &SupportSet| {
        let mut todo: Vec<usize> = s.iter().take(1).collect();
        let mut seen = SupportSet::from_nodes(todo.iter().copied());
        while let Some(n) = todo.pop() {
            let next: Vec<usize> =
                s.iter().filter(|&m| !seen.contains(m) && rs.adjacent(n, m)).collect();
            for m in next {
                seen.insert(m);
                todo.push(m);
            }
        }
        seen == *s
    };
    (connected(&sa.minus(&meet)) && connected(&sb.minus(&meet))).then_some(meet)
}

/// Branched shape with both associations outside the shared spine.
pub fn branched_outside_overlap(rs: &RootSystem, a: &MarkedPair, b: &MarkedPair) -> bool {
    matches!(branch_shape(rs, a, b), Some(spine) if !spine.contains(a.pi) && !spine.contains(b.pi))
}

/// Branched shape with a common association on the shared spine.
pub fn branched_with_shared_association(rs: &RootSystem, a: &MarkedPair, b: &MarkedPair) -> bool {
    a.pi == b.pi && matches!(branch_shape(rs, a, b), Some(spine) if spine.contains(a.pi))
}

/// Compatibility required of marked pairs in different fusion blocks.
pub fn compatible_unfused(rs: &RootSystem, a: &MarkedPair, b: &MarkedPair) -> bool {
    supports_disjoint(a, b)
        || meets_at_foreign_terminal(rs, a, b)
        || branched_outside_overlap(rs, a, b)
}

/// Compatibility required of marked pairs in the same fusion block.
pub fn compatible_fused(rs: &RootSystem, a: &MarkedPair, b: &MarkedPair) -> bool {
    compatible_unfused(rs, a, b)
        || meets_at_shared_association(rs, a, b)
        || branched_with_shared_association(rs, a, b)
}

/// One checked condition: whether it held, and the offenders if not.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub ok: bool,
    pub offenders: Vec<String>,
}

impl Verdict {
    fn pass() -> Self {
        Verdict { ok: true, offenders: Vec::new() }
    }

    fn fail(&mut self, offender: String) {
        self.ok = false;
        self.offenders.push(offender);
    }
}

/// Outcome of checking a datum against every classification condition.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    /// Every marked pair appears in the admissibility table.
    pub admissible: Verdict,
    /// Pairs in different blocks are compatibly placed.
    pub unfused_compatible: Verdict,
    /// Pairs in one block are compatibly placed, shared associations allowed.
    pub fused_compatible: Verdict,
    /// No marked support lies inside the union of the others.
    pub supports_independent: Verdict,
    /// The kernel restricted to the marked span equals the fusion differences.
    pub kernel_matches_fusion: Verdict,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.admissible.ok
            && self.unfused_compatible.ok
            && self.fused_compatible.ok
            && self.supports_independent.ok
            && self.kernel_matches_fusion.ok
    }

    /// Condition names paired with their verdicts, in reporting order.
    pub fn named(&self) -> [(&'static str, &Verdict); 5] {
        [
            ("admissible", &self.admissible),
            ("unfused-compatible", &self.unfused_compatible),
            ("fused-compatible", &self.fused_compatible),
            ("supports-independent", &self.supports_independent),
            ("kernel-matches-fusion", &self.kernel_matches_fusion),
        ]
    }
}

/// Checks every classification condition on a datum.
pub fn validate(rs: &RootSystem, d: &CombinatorialDatum) -> ValidationReport {
    let table: BTreeSet<MarkedPair> = table1_pairs(rs).into_iter().collect();
    let mut admissible = Verdict::pass();
    for p in d.pairs() {
        if !table.contains(p) {
            admissible.fail(p.to_string());
        }
    }

    let block_of = d.block_of();
    let mut unfused = Verdict::pass();
    let mut fused = Verdict::pass();
    for i in 0..d.pairs().len() {
        for j in i + 1..d.pairs().len() {
            let (a, b) = (&d.pairs()[i], &d.pairs()[j]);
            if block_of[i] == block_of[j] {
                if !compatible_fused(rs, a, b) {
                    fused.fail(format!("{a} vs {b}"));
                }
            } else if !compatible_unfused(rs, a, b) {
                unfused.fail(format!("{a} vs {b}"));
            }
        }
    }

    let mut supports = Verdict::pass();
    for (i, p) in d.pairs().iter().enumerate() {
        let others = d
            .pairs()
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(SupportSet::empty(), |acc, (_, q)| acc.union(&q.root.support()));
        if p.root.support().is_subset_of(&others) {
            supports.fail(p.to_string());
        }
    }

    let mut kernel = Verdict::pass();
    let restricted = d.torus().kernel().intersect(&support_span(rs.rank(), d.pairs()));
    if restricted != difference_span(rs.rank(), d.pairs(), d.blocks()) {
        kernel.fail("kernel restricted to the marked span differs from the fusion differences".into());
    }

    ValidationReport {
        admissible,
        unfused_compatible: unfused,
        fused_compatible: fused,
        supports_independent: supports,
        kernel_matches_fusion: kernel,
    }
}

/// Serialized form of a datum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatumDto {
    pub system: String,
    /// Kernel basis rows; entries are rationals rendered as strings.
    pub kernel: Vec<Vec<String>>,
    /// Marked roots as simple-root coefficient vectors.
    #[serde(rename = "M")]
    pub m: Vec<Vec<i64>>,
    /// Associated simple roots, 1-based, parallel to `M`.
    pub pi: Vec<usize>,
    /// Fusion blocks of 0-based indices into `M`.
    pub sim: Vec<Vec<usize>>,
}

impl CombinatorialDatum {
    pub fn to_dto(&self, rs: &RootSystem) -> DatumDto {
        DatumDto {
            system: rs.label().to_string(),
            kernel: self
                .torus
                .kernel()
                .basis()
                .iter()
                .map(|row| row.iter().map(Rat::to_string).collect())
                .collect(),
            m: self.pairs.iter().map(|p| p.root.coeffs().to_vec()).collect(),
            pi: self.pairs.iter().map(|p| p.pi + 1).collect(),
            sim: self.blocks.clone(),
        }
    }

    pub fn from_dto(rs: &RootSystem, dto: &DatumDto) -> Result<Self> {
        let bad = |msg: String| Error::BadDatum(msg);
        if dto.system != rs.label().to_string() {
            return Err(bad(format!(
                "datum is for {} but the system is {}",
                dto.system,
                rs.label()
            )));
        }
        if dto.pi.len() != dto.m.len() {
            return Err(bad("pi and M have different lengths".into()));
        }
        let pairs = dto
            .m
            .iter()
            .zip(&dto.pi)
            .map(|(coeffs, &pi1)| {
                if pi1 == 0 {
                    return Err(bad("pi entries are 1-based".into()));
                }
                Ok(MarkedPair { root: Root::new(coeffs.clone()), pi: pi1 - 1 })
            })
            .collect::<Result<_>>()?;
        let rows = dto
            .kernel
            .iter()
            .map(|row| {
                if row.len() != rs.rank() {
                    return Err(bad("kernel row length differs from the rank".into()));
                }
                row.iter()
                    .map(|s| s.parse::<Rat>().map_err(|e| bad(format!("bad rational {s:?}: {e}"))))
                    .collect()
            })
            .collect::<Result<Vec<Vec<Rat>>>>()?;
        let torus = TorusData::new(Subspace::from_rows(rs.rank(), rows));
        CombinatorialDatum::new(rs, pairs, dto.sim.clone(), torus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::build_root_system;

    fn rs(label: &str) -> RootSystem {
        build_root_system(label).unwrap()
    }

    fn mp(coeffs: &[i64], pi: usize) -> MarkedPair {
        MarkedPair { root: Root::new(coeffs.to_vec()), pi }
    }

    fn full_torus(rank: usize) -> TorusData {
        TorusData::new(Subspace::zero(rank))
    }

    #[test]
    fn disjoint_supports() {
        assert!(supports_disjoint(&mp(&[1, 0], 0), &mp(&[0, 1], 1)));
        assert!(!supports_disjoint(&mp(&[1, 1], 0), &mp(&[0, 1], 1)));
    }

    #[test]
    fn foreign_terminal_meeting() {
        let a3 = rs("A3");
        assert!(meets_at_foreign_terminal(&a3, &mp(&[1, 1, 0], 0), &mp(&[0, 1, 1], 2)));
        // association on the shared node
        assert!(!meets_at_foreign_terminal(&a3, &mp(&[1, 1, 0], 1), &mp(&[0, 1, 1], 2)));
        // shared node interior to one support
        assert!(!meets_at_foreign_terminal(&a3, &mp(&[1, 1, 1], 0), &mp(&[0, 1, 0], 1)));
    }

    #[test]
    fn shared_association_meeting() {
        let a3 = rs("A3");
        assert!(meets_at_shared_association(&a3, &mp(&[1, 1, 0], 1), &mp(&[0, 1, 1], 1)));
        assert!(!meets_at_shared_association(&a3, &mp(&[1, 1, 0], 0), &mp(&[0, 1, 1], 1)));
        // subtracting the shared node must leave a root
        let b3 = rs("B3");
        assert!(!meets_at_shared_association(&b3, &mp(&[0, 1, 2], 1), &mp(&[1, 1, 0], 1)));
    }

    #[test]
    fn branched_shapes_on_d4() {
        let d4 = rs("D4");
        let a = mp(&[1, 1, 0, 1], 0);
        let b = mp(&[0, 1, 1, 1], 2);
        assert!(branched_outside_overlap(&d4, &a, &b));
        assert!(!branched_outside_overlap(&d4, &mp(&[1, 1, 0, 1], 3), &b));
        // common association on the spine, at its end or at the center
        assert!(branched_with_shared_association(&d4, &mp(&[1, 1, 0, 1], 3), &mp(&[0, 1, 1, 1], 3)));
        assert!(branched_with_shared_association(&d4, &mp(&[1, 1, 0, 1], 1), &mp(&[0, 1, 1, 1], 1)));
        assert!(!branched_with_shared_association(&d4, &a, &b));
    }

    #[test]
    fn branch_shape_rejects_near_misses() {
        let d4 = rs("D4");
        // same support: no branching
        assert!(branch_shape(&d4, &mp(&[1, 1, 1, 1], 0), &mp(&[1, 1, 1, 1], 2)).is_none());
        // nested supports
        assert!(branch_shape(&d4, &mp(&[1, 1, 1, 1], 0), &mp(&[0, 1, 1, 0], 2)).is_none());
        // chain union without a degree-3 node
        let a4 = rs("A4");
        assert!(branch_shape(&a4, &mp(&[1, 1, 1, 0], 0), &mp(&[0, 1, 1, 1], 3)).is_none());
        // coefficient above 1
        let b3 = rs("B3");
        assert!(branch_shape(&b3, &mp(&[1, 1, 2], 0), &mp(&[0, 1, 1], 1)).is_none());
    }

    #[test]
    fn predicates_are_symmetric() {
        let d4 = rs("D4");
        let table = crate::marked_roots::table1_pairs(&d4);
        for a in &table {
            for b in &table {
                if a.root == b.root {
                    continue;
                }
                assert_eq!(supports_disjoint(a, b), supports_disjoint(b, a));
                assert_eq!(
                    meets_at_foreign_terminal(&d4, a, b),
                    meets_at_foreign_terminal(&d4, b, a)
                );
                assert_eq!(
                    meets_at_shared_association(&d4, a, b),
                    meets_at_shared_association(&d4, b, a)
                );
                assert_eq!(
                    branched_outside_overlap(&d4, a, b),
                    branched_outside_overlap(&d4, b, a)
                );
                assert_eq!(
                    branched_with_shared_association(&d4, a, b),
                    branched_with_shared_association(&d4, b, a)
                );
                // shared-association meetings are never foreign-terminal meetings
                assert!(
                    !(meets_at_shared_association(&d4, a, b)
                        && meets_at_foreign_terminal(&d4, a, b))
                );
            }
        }
    }

    #[test]
    fn empty_datum_is_valid() {
        let a2 = rs("A2");
        let d = CombinatorialDatum::new(&a2, vec![], vec![], full_torus(2)).unwrap();
        assert!(validate(&a2, &d).is_valid());
    }

    #[test]
    fn single_marked_simple_root_is_valid() {
        let a1 = rs("A1");
        let d =
            CombinatorialDatum::new(&a1, vec![mp(&[1], 0)], vec![vec![0]], full_torus(1)).unwrap();
        assert!(validate(&a1, &d).is_valid());
    }

    #[test]
    fn covered_support_fails() {
        let a2 = rs("A2");
        let d = CombinatorialDatum::new(
            &a2,
            vec![mp(&[1, 1], 0), mp(&[0, 1], 1)],
            vec![vec![0], vec![1]],
            full_torus(2),
        )
        .unwrap();
        let report = validate(&a2, &d);
        assert!(!report.is_valid());
        assert!(!report.supports_independent.ok);
        assert_eq!(report.supports_independent.offenders, ["a2 [pi=a2]"]);
        assert!(report.admissible.ok);
    }

    #[test]
    fn inadmissible_pair_fails() {
        let b2 = rs("B2");
        let d = CombinatorialDatum::new(
            &b2,
            vec![mp(&[1, 2], 1)],
            vec![vec![0]],
            full_torus(2),
        )
        .unwrap();
        let report = validate(&b2, &d);
        assert!(!report.admissible.ok);
    }

    #[test]
    fn fusion_needs_matching_kernel() {
        let sys = rs("A1xA1");
        let pairs = vec![mp(&[1, 0], 0), mp(&[0, 1], 1)];
        let blocks = vec![vec![0, 1]];
        let torus = canonical_torus(2, &pairs, &blocks);
        assert_eq!(torus.s_rank(), 1);
        let d = CombinatorialDatum::new(&sys, pairs.clone(), blocks.clone(), torus).unwrap();
        assert!(validate(&sys, &d).is_valid());

        // a full torus leaves the difference outside the kernel
        let d = CombinatorialDatum::new(&sys, pairs.clone(), blocks.clone(), full_torus(2)).unwrap();
        assert!(!validate(&sys, &d).kernel_matches_fusion.ok);

        // an oversized kernel also fails
        let big = TorusData::new(Subspace::full(2));
        let d = CombinatorialDatum::new(&sys, pairs, blocks, big).unwrap();
        assert!(!validate(&sys, &d).kernel_matches_fusion.ok);
    }

    #[test]
    fn kernel_outside_marked_span_is_tolerated() {
        let a2 = rs("A2");
        let pairs = vec![mp(&[1, 0], 0)];
        let kernel = Subspace::from_rows(2, vec![vec![Rat::zero(), Rat::one()]]);
        let d = CombinatorialDatum::new(&a2, pairs, vec![vec![0]], TorusData::new(kernel)).unwrap();
        assert!(validate(&a2, &d).is_valid());
    }

    #[test]
    fn unfused_pairs_must_be_compatible() {
        let a2 = rs("A2");
        // two admissible pairs whose supports overlap badly
        let d = CombinatorialDatum::new(
            &a2,
            vec![mp(&[1, 1], 0), mp(&[1, 1], 1)],
            vec![vec![0], vec![1]],
            full_torus(2),
        );
        // same root twice is rejected structurally
        assert!(matches!(d, Err(Error::BadDatum(_))));

        let a3 = rs("A3");
        let pairs = vec![mp(&[1, 1, 0], 1), mp(&[0, 1, 1], 1)];
        let d = CombinatorialDatum::new(
            &a3,
            pairs.clone(),
            vec![vec![0], vec![1]],
            full_torus(3),
        )
        .unwrap();
        // shared association requires fusion
        assert!(!validate(&a3, &d).unfused_compatible.ok);
        let torus = canonical_torus(3, &pairs, &[vec![0, 1]]);
        let d = CombinatorialDatum::new(&a3, pairs, vec![vec![0, 1]], torus).unwrap();
        assert!(validate(&a3, &d).is_valid());
    }

    #[test]
    fn canonical_torus_spans_differences() {
        let pairs = vec![mp(&[1, 1, 0], 1), mp(&[0, 1, 1], 1)];
        let torus = canonical_torus(3, &pairs, &[vec![0, 1]]);
        assert_eq!(torus.s_rank(), 2);
        let diff: Vec<Rat> =
            [1, 0, -1].iter().map(|&c| Rat::from_integer(c.into())).collect();
        assert!(torus.kernel().contains(&diff));
    }

    #[test]
    fn construction_canonicalizes() {
        let a2 = rs("A2");
        // pairs out of order with matching block indices
        let d = CombinatorialDatum::new(
            &a2,
            vec![mp(&[1, 1], 1), mp(&[1, 0], 0)],
            vec![vec![1], vec![0]],
            full_torus(2),
        )
        .unwrap();
        assert_eq!(d.pairs()[0], mp(&[1, 0], 0));
        assert_eq!(d.pairs()[1], mp(&[1, 1], 1));
        assert_eq!(d.blocks(), [vec![0], vec![1]]);
        assert_eq!(d.block_of(), vec![0, 1]);
    }

    #[test]
    fn constructor_rejects_structural_defects() {
        let a2 = rs("A2");
        let errs = [
            CombinatorialDatum::new(&a2, vec![mp(&[2, 1], 0)], vec![vec![0]], full_torus(2)),
            CombinatorialDatum::new(&a2, vec![mp(&[1, 0], 1)], vec![vec![0]], full_torus(2)),
            CombinatorialDatum::new(&a2, vec![mp(&[1, 0], 0)], vec![], full_torus(2)),
            CombinatorialDatum::new(&a2, vec![mp(&[1, 0], 0)], vec![vec![0], vec![0]], full_torus(2)),
            CombinatorialDatum::new(&a2, vec![mp(&[1, 0], 0)], vec![vec![0]], full_torus(3)),
        ];
        for e in errs {
            assert!(matches!(e, Err(Error::BadDatum(_))));
        }
    }

    #[test]
    fn json_round_trip() {
        let a3 = rs("A3");
        let pairs = vec![mp(&[1, 1, 0], 1), mp(&[0, 1, 1], 1)];
        let torus = canonical_torus(3, &pairs, &[vec![0, 1]]);
        let d = CombinatorialDatum::new(&a3, pairs, vec![vec![0, 1]], torus).unwrap();
        let dto = d.to_dto(&a3);
        assert_eq!(dto.pi, [2, 2]);
        let text = serde_json::to_string_pretty(&dto).unwrap();
        let back: DatumDto = serde_json::from_str(&text).unwrap();
        assert_eq!(CombinatorialDatum::from_dto(&a3, &back).unwrap(), d);
    }

    #[test]
    fn fractional_kernel_round_trips() {
        let a2 = rs("A2");
        let row: Vec<Rat> = vec![
            Rat::from_integer(2.into()),
            Rat::from_integer((-1).into()),
        ];
        let torus = TorusData::new(Subspace::from_rows(2, vec![row]));
        let d = CombinatorialDatum::new(&a2, vec![], vec![], torus).unwrap();
        let dto = d.to_dto(&a2);
        assert_eq!(dto.kernel, [["1", "-1/2"]]);
        let back = CombinatorialDatum::from_dto(&a2, &dto).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn from_dto_rejects_bad_data() {
        let a2 = rs("A2");
        let base = CombinatorialDatum::new(&a2, vec![mp(&[1, 0], 0)], vec![vec![0]], full_torus(2))
            .unwrap()
            .to_dto(&a2);

        let mut dto = base.clone();
        dto.system = "B2".into();
        assert!(CombinatorialDatum::from_dto(&a2, &dto).is_err());

        let mut dto = base.clone();
        dto.pi = vec![0];
        assert!(CombinatorialDatum::from_dto(&a2, &dto).is_err());

        let mut dto = base.clone();
        dto.m = vec![vec![1, 1, 1]];
        assert!(CombinatorialDatum::from_dto(&a2, &dto).is_err());

        let mut dto = base.clone();
        dto.kernel = vec![vec!["1".into(), "x".into()]];
        assert!(CombinatorialDatum::from_dto(&a2, &dto).is_err());

        let mut dto = base;
        dto.sim = vec![vec![0, 1]];
        assert!(CombinatorialDatum::from_dto(&a2, &dto).is_err());
    }
}
