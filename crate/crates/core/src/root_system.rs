//! Root systems of semisimple type: construction from a type label, positive-root
//! closure, supports, decompositions, reflections, and sub-diagram classification.

use crate::error::{Error, Result};
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

/// Simple series letter of an irreducible component.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Series {
    fn letter(self) -> char {
        match self {
            Series::A => 'A',
            Series::B => 'B',
            Series::C => 'C',
            Series::D => 'D',
            Series::E => 'E',
            Series::F => 'F',
            Series::G => 'G',
        }
    }

    fn rank_valid(self, rank: usize) -> bool {
        match self {
            Series::A => rank >= 1,
            Series::B | Series::C => rank >= 2,
            Series::D => rank >= 3,
            Series::E => (6..=8).contains(&rank),
            Series::F => rank == 4,
            Series::G => rank == 2,
        }
    }
}

/// Semisimple type as an ordered list of irreducible components, e.g. `B2xA1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeLabel(pub Vec<(Series, usize)>);

impl TypeLabel {
    pub fn total_rank(&self) -> usize {
        self.0.iter().map(|&(_, r)| r).sum()
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(s, r)| format!("{}{}", s.letter(), r))
            .collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for TypeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadTypeLabel(s.to_string());
        let mut components = Vec::new();
        for part in s.split(['x', 'X']) {
            let part = part.trim();
            let mut chars = part.chars();
            let series = match chars.next().map(|c| c.to_ascii_uppercase()) {
                Some('A') => Series::A,
                Some('B') => Series::B,
                Some('C') => Series::C,
                Some('D') => Series::D,
                Some('E') => Series::E,
                Some('F') => Series::F,
                Some('G') => Series::G,
                _ => return Err(bad()),
            };
            let rank: usize = chars.as_str().parse().map_err(|_| bad())?;
            if !series.rank_valid(rank) {
                return Err(Error::RankOutOfRange { series: series.letter(), rank });
            }
            components.push((series, rank));
        }
        if components.is_empty() {
            return Err(bad());
        }
        Ok(TypeLabel(components))
    }
}

/// Element of the root lattice in simple-root coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Root {
    coeffs: Vec<i64>,
}

impl Root {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Root { coeffs }
    }

    pub fn simple(rank: usize, i: usize) -> Self {
        let mut coeffs = vec![0; rank];
        coeffs[i] = 1;
        Root { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn height(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0) && self.coeffs.iter().any(|&c| c > 0)
    }

    pub fn support(&self) -> SupportSet {
        let mut s = SupportSet::empty();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                s.insert(i);
            }
        }
        s
    }

    pub fn neg(&self) -> Root {
        Root { coeffs: self.coeffs.iter().map(|&c| -c).collect() }
    }

    pub fn add(&self, other: &Root) -> Root {
        Root { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Root) -> Root {
        Root { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }
}

// Global root order: graded lexicographic by height, then by coefficient vector.
impl Ord for Root {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.height(), &self.coeffs).cmp(&(other.height(), &other.coeffs))
    }
}

impl PartialOrd for Root {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, "{}", if c < 0 { "-" } else { "+" })?;
            }
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            write!(f, "a{}", i + 1)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Set of simple-root indices, stored as a bitset.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupportSet {
    bits: u64,
}

impl SupportSet {
    pub fn empty() -> Self {
        SupportSet { bits: 0 }
    }

    pub fn from_nodes(nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty();
        for n in nodes {
            s.insert(n);
        }
        s
    }

    pub fn insert(&mut self, node: usize) {
        assert!(node < 64, "node index out of range");
        self.bits |= 1 << node;
    }

    pub fn contains(&self, node: usize) -> bool {
        node < 64 && self.bits & (1 << node) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(|&n| self.contains(n))
    }

    pub fn union(&self, other: &Self) -> Self {
        SupportSet { bits: self.bits | other.bits }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        SupportSet { bits: self.bits & other.bits }
    }

    pub fn minus(&self, other: &Self) -> Self {
        SupportSet { bits: self.bits & !other.bits }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn is_disjoint_from(&self, other: &Self) -> bool {
        self.bits & other.bits == 0
    }
}

/// One irreducible piece of a classified sub-diagram.
///
/// `nodes[k]` is the ambient simple-root index sitting at position `k` of the
/// standard numbering for `(series, rank)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifiedComponent {
    pub series: Series,
    pub rank: usize,
    pub nodes: Vec<usize>,
}

/// Root system of a semisimple type, with positive roots listed in the global
/// graded lexicographic order.
#[derive(Clone, Debug)]
pub struct RootSystem {
    label: TypeLabel,
    cartan: Vec<Vec<i64>>,
    positive: Vec<Root>,
    index: HashMap<Vec<i64>, usize>,
    half_lengths: Vec<i64>,
}

/// Builds the root system for a semisimple type label such as `"B3"` or `"B2xA1"`.
pub fn build_root_system(label: &str) -> Result<RootSystem> {
    let label: TypeLabel = label.parse()?;
    RootSystem::from_label(label)
}

impl RootSystem {
    pub fn from_label(label: TypeLabel) -> Result<Self> {
        let n = label.total_rank();
        let mut cartan = vec![vec![0i64; n]; n];
        let mut comp_of = vec![0usize; n];
        let mut offset = 0;
        for (comp, &(series, rank)) in label.0.iter().enumerate() {
            let block = cartan_block(series, rank);
            for i in 0..rank {
                comp_of[offset + i] = comp;
                for j in 0..rank {
                    cartan[offset + i][offset + j] = block[i][j];
                }
            }
            offset += rank;
        }
        let half_lengths = symmetrizer(&cartan, &comp_of);
        let positive = positive_closure(&cartan);
        let index = positive
            .iter()
            .enumerate()
            .map(|(i, r)| (r.coeffs().to_vec(), i))
            .collect();
        Ok(RootSystem { label, cartan, positive, index, half_lengths })
    }

    pub fn label(&self) -> &TypeLabel {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    /// Cartan pairing of `alpha_j` against the coroot of `alpha_i`.
    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        self.cartan[i][j]
    }

    pub fn simple(&self, i: usize) -> Root {
        Root::simple(self.rank(), i)
    }

    /// Positive roots in the global graded lexicographic order.
    pub fn positive_roots(&self) -> &[Root] {
        &self.positive
    }

    pub fn num_positive(&self) -> usize {
        self.positive.len()
    }

    /// Position of a positive root in the global order.
    pub fn positive_index(&self, r: &Root) -> Option<usize> {
        self.index.get(r.coeffs()).copied()
    }

    pub fn is_root(&self, r: &Root) -> bool {
        self.index.contains_key(r.coeffs()) || self.index.contains_key(r.neg().coeffs())
    }

    pub fn is_positive_root(&self, r: &Root) -> bool {
        self.index.contains_key(r.coeffs())
    }

    /// Pairing of `r` against the coroot of the simple root `alpha_i`.
    pub fn pairing(&self, r: &Root, i: usize) -> i64 {
        r.coeffs()
            .iter()
            .enumerate()
            .map(|(j, &c)| c * self.cartan[i][j])
            .sum()
    }

    /// Reflection of `r` in the hyperplane orthogonal to the simple root `alpha_i`.
    pub fn reflect(&self, i: usize, r: &Root) -> Root {
        let p = self.pairing(r, i);
        let mut coeffs = r.coeffs().to_vec();
        coeffs[i] -= p;
        Root::new(coeffs)
    }

    /// Invariant inner product, integer-normalized so short roots have square 2.
    pub fn inner(&self, a: &Root, b: &Root) -> i64 {
        let mut acc = 0;
        for (i, &ai) in a.coeffs().iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.coeffs().iter().enumerate() {
                if bj != 0 {
                    acc += ai * bj * self.half_lengths[i] * self.cartan[i][j];
                }
            }
        }
        acc
    }

    /// Half squared length of a root; 1 for short roots, 2 or 3 for long ones.
    pub fn half_length(&self, r: &Root) -> i64 {
        let sq = self.inner(r, r);
        debug_assert_eq!(sq % 2, 0);
        sq / 2
    }

    /// All unordered decompositions of a positive root into two positive roots.
    pub fn decompositions(&self, alpha: &Root) -> Vec<(Root, Root)> {
        assert!(self.is_positive_root(alpha), "decompositions of a non-root");
        let ia = self.positive_index(alpha).unwrap();
        let mut out = Vec::new();
        for (ib, beta) in self.positive.iter().enumerate() {
            if ib >= ia {
                break;
            }
            let gamma = alpha.sub(beta);
            if let Some(ig) = self.positive_index(&gamma) {
                if ig > ib {
                    out.push((beta.clone(), gamma));
                }
            }
        }
        out
    }

    /// Whether two distinct simple roots are joined by an edge.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.cartan[i][j] != 0
    }

    /// Whether `delta` is an endpoint of the sub-diagram induced on `s`.
    ///
    /// Edge multiplicity is ignored; a node is terminal when exactly one other
    /// node of `s` is adjacent to it.
    pub fn is_terminal(&self, delta: usize, s: &SupportSet) -> Result<bool> {
        if !s.contains(delta) {
            return Err(Error::NodeOutsideSupport { node: delta });
        }
        let degree = s.iter().filter(|&j| self.adjacent(delta, j)).count();
        Ok(degree == 1)
    }

    /// Roots supported inside `s`, together with the classified type of the
    /// sub-diagram induced on `s`.
    pub fn generated_subsystem(&self, s: &SupportSet) -> Result<(TypeLabel, Vec<Root>)> {
        assert!(!s.is_empty(), "empty support");
        let comps = self.classify_support(s)?;
        let label = TypeLabel(comps.iter().map(|c| (c.series, c.rank)).collect());
        let roots = self
            .positive
            .iter()
            .filter(|r| r.support().is_subset_of(s))
            .cloned()
            .collect();
        Ok((label, roots))
    }

    /// Classifies each connected component of the sub-diagram induced on `s`,
    /// components ordered by their least node.
    pub fn classify_support(&self, s: &SupportSet) -> Result<Vec<ClassifiedComponent>> {
        let mut seen: HashSet<usize> = HashSet::new();
        let mut comps = Vec::new();
        for start in s.iter() {
            if seen.contains(&start) {
                continue;
            }
            let mut stack = vec![start];
            let mut nodes = Vec::new();
            while let Some(u) = stack.pop() {
                if !seen.insert(u) {
                    continue;
                }
                nodes.push(u);
                for v in s.iter() {
                    if self.adjacent(u, v) && !seen.contains(&v) {
                        stack.push(v);
                    }
                }
            }
            nodes.sort_unstable();
            comps.push(self.classify_connected(&nodes)?);
        }
        Ok(comps)
    }

    fn classify_connected(&self, nodes: &[usize]) -> Result<ClassifiedComponent> {
        let k = nodes.len();
        let deg = |u: usize| nodes.iter().filter(|&&v| self.adjacent(u, v)).count();
        let mult = |u: usize, v: usize| self.cartan[u][v] * self.cartan[v][u];
        let edges: Vec<(usize, usize)> = nodes
            .iter()
            .enumerate()
            .flat_map(|(i, &u)| nodes[i + 1..].iter().map(move |&v| (u, v)))
            .filter(|&(u, v)| self.adjacent(u, v))
            .collect();
        if edges.len() + 1 != k {
            return Err(Error::UnrecognizedDiagram);
        }

        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| mult(u, v) == 3) {
            if k != 2 {
                return Err(Error::UnrecognizedDiagram);
            }
            // position 0 is the short root: its row of the Cartan matrix holds the -3
            let (short, long) = if self.cartan[u][v] == -3 { (u, v) } else { (v, u) };
            return Ok(ClassifiedComponent { series: Series::G, rank: 2, nodes: vec![short, long] });
        }

        if edges.iter().any(|&(u, v)| mult(u, v) == 2) {
            // doubly laced diagrams are chains: B, C, or F4
            if nodes.iter().any(|&u| deg(u) > 2) {
                return Err(Error::UnrecognizedDiagram);
            }
            if k == 2 {
                let (u, v) = edges[0];
                // standard rank-2 orientation puts the long root first
                let (long, short) = if self.cartan[u][v] == -1 { (u, v) } else { (v, u) };
                return Ok(ClassifiedComponent { series: Series::B, rank: 2, nodes: vec![long, short] });
            }
            let mut chain = self.walk_chain(nodes);
            let t = (0..k - 1)
                .find(|&t| mult(chain[t], chain[t + 1]) == 2)
                .expect("a double edge exists");
            if t == 0 {
                chain.reverse();
            }
            let t = (0..k - 1)
                .find(|&t| mult(chain[t], chain[t + 1]) == 2)
                .unwrap();
            if t == k - 2 {
                let (a, b) = (chain[k - 2], chain[k - 1]);
                let series = if self.cartan[b][a] == -2 { Series::B } else { Series::C };
                return Ok(ClassifiedComponent { series, rank: k, nodes: chain });
            }
            if k == 4 && t == 1 {
                // F4: the two short roots come first
                let (a, b) = (chain[1], chain[2]);
                if self.cartan[a][b] != -2 {
                    chain.reverse();
                }
                return Ok(ClassifiedComponent { series: Series::F, rank: 4, nodes: chain });
            }
            return Err(Error::UnrecognizedDiagram);
        }

        // simply laced: A, D, or E by branch shape
        let forks: Vec<usize> = nodes.iter().copied().filter(|&u| deg(u) == 3).collect();
        if nodes.iter().any(|&u| deg(u) > 3) || forks.len() > 1 {
            return Err(Error::UnrecognizedDiagram);
        }
        if forks.is_empty() {
            let chain = if k == 1 { vec![nodes[0]] } else { self.walk_chain(nodes) };
            return Ok(ClassifiedComponent { series: Series::A, rank: k, nodes: chain });
        }
        let center = forks[0];
        let mut branches: Vec<Vec<usize>> = nodes
            .iter()
            .filter(|&&u| u != center && self.adjacent(u, center))
            .map(|&first| {
                let mut branch = vec![first];
                let mut prev = center;
                loop {
                    let last = *branch.last().unwrap();
                    match nodes
                        .iter()
                        .find(|&&v| v != prev && v != last && self.adjacent(v, last))
                    {
                        Some(&next) => {
                            prev = last;
                            branch.push(next);
                        }
                        None => break,
                    }
                }
                branch
            })
            .collect();
        branches.sort_by_key(|b| (b.len(), b[0]));
        let lens: Vec<usize> = branches.iter().map(Vec::len).collect();
        match lens.as_slice() {
            [1, 1, x] => {
                // D-type: the long branch reversed, then the center, then the fork ends
                let mut order: Vec<usize> = branches[2].iter().rev().copied().collect();
                order.push(center);
                order.push(branches[0][0]);
                order.push(branches[1][0]);
                Ok(ClassifiedComponent { series: Series::D, rank: x + 3, nodes: order })
            }
            [1, 2, x @ (2..=4)] => {
                let mut order = vec![0usize; k];
                order[0] = branches[1][1];
                order[1] = branches[0][0];
                order[2] = branches[1][0];
                order[3] = center;
                for (p, &u) in branches[2].iter().enumerate() {
                    order[4 + p] = u;
                }
                Ok(ClassifiedComponent { series: Series::E, rank: x + 4, nodes: order })
            }
            _ => Err(Error::UnrecognizedDiagram),
        }
    }

    fn walk_chain(&self, nodes: &[usize]) -> Vec<usize> {
        let deg = |u: usize| nodes.iter().filter(|&&v| self.adjacent(u, v)).count();
        let start = nodes
            .iter()
            .copied()
            .filter(|&u| deg(u) == 1)
            .min()
            .expect("chain has an endpoint");
        let mut chain = vec![start];
        let mut prev = usize::MAX;
        while chain.len() < nodes.len() {
            let last = *chain.last().unwrap();
            let next = nodes
                .iter()
                .copied()
                .find(|&v| v != prev && v != last && self.adjacent(v, last))
                .expect("chain continues");
            prev = last;
            chain.push(next);
        }
        chain
    }
}

fn cartan_block(series: Series, rank: usize) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0i64; rank]; rank];
    for i in 0..rank {
        a[i][i] = 2;
    }
    let mut edge = |i: usize, j: usize| {
        a[i][j] = -1;
        a[j][i] = -1;
    };
    match series {
        Series::A => {
            for i in 0..rank.saturating_sub(1) {
                edge(i, i + 1);
            }
        }
        Series::B => {
            for i in 0..rank - 1 {
                edge(i, i + 1);
            }
            // the last simple root is short
            a[rank - 1][rank - 2] = -2;
        }
        Series::C => {
            for i in 0..rank - 1 {
                edge(i, i + 1);
            }
            // the last simple root is long
            a[rank - 2][rank - 1] = -2;
        }
        Series::D => {
            for i in 0..rank - 2 {
                edge(i, i + 1);
            }
            edge(rank - 3, rank - 1);
        }
        Series::E => {
            edge(0, 2);
            for i in 2..rank - 1 {
                edge(i, i + 1);
            }
            edge(1, 3);
        }
        Series::F => {
            edge(0, 1);
            edge(1, 2);
            edge(2, 3);
            // nodes 0 and 1 are short, 2 and 3 long
            a[1][2] = -2;
        }
        Series::G => {
            edge(0, 1);
            // node 0 is short
            a[0][1] = -3;
        }
    }
    a
}

fn symmetrizer(cartan: &[Vec<i64>], comp_of: &[usize]) -> Vec<i64> {
    use num::rational::Ratio;
    let n = cartan.len();
    let mut d: Vec<Option<Ratio<i64>>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(Ratio::from_integer(1));
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if v != u && cartan[u][v] != 0 && d[v].is_none() {
                    // d_u * a_uv = d_v * a_vu
                    d[v] = Some(d[u].unwrap() * Ratio::new(cartan[u][v], cartan[v][u]));
                    stack.push(v);
                }
            }
        }
    }
    let d: Vec<Ratio<i64>> = d.into_iter().map(Option::unwrap).collect();
    let num_comps = comp_of.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = vec![0i64; n];
    for comp in 0..num_comps {
        let members: Vec<usize> = (0..n).filter(|&i| comp_of[i] == comp).collect();
        let min = members.iter().map(|&i| d[i]).min().unwrap();
        for &i in &members {
            let scaled = d[i] / min;
            assert!(scaled.is_integer(), "symmetrizer must scale to integers");
            out[i] = scaled.to_integer();
        }
    }
    out
}

fn positive_closure(cartan: &[Vec<i64>]) -> Vec<Root> {
    let n = cartan.len();
    let mut known: HashSet<Vec<i64>> = HashSet::new();
    let mut by_height: Vec<Vec<Root>> = vec![Vec::new()];
    let mut frontier: Vec<Root> = (0..n).map(|i| Root::simple(n, i)).collect();
    for r in &frontier {
        known.insert(r.coeffs().to_vec());
    }
    while !frontier.is_empty() {
        by_height.push(frontier.clone());
        let mut next = Vec::new();
        for beta in &frontier {
            for i in 0..n {
                // root string: beta + alpha_i is a root iff p - <beta, alpha_i^> >= 1
                let mut p = 0i64;
                let mut probe = beta.clone();
                loop {
                    probe.coeffs[i] -= 1;
                    if known.contains(probe.coeffs()) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let pairing: i64 = beta
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| c * cartan[i][j])
                    .sum();
                if p - pairing >= 1 {
                    let mut up = beta.clone();
                    up.coeffs[i] += 1;
                    if known.insert(up.coeffs().to_vec()) {
                        next.push(up);
                    }
                }
            }
        }
        frontier = next;
    }
    let mut all: Vec<Root> = by_height.into_iter().flatten().collect();
    all.sort();
    all
}
