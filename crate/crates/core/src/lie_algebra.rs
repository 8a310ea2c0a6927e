//! Chevalley basis of the semisimple Lie algebra attached to a root system.

use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::root_system::{Root, RootSystem};
use crate::Rat;
use num::rational::Ratio;
use num::{BigInt, Zero};
use std::collections::HashMap;

/// The Lie algebra over the rationals in its integral Chevalley basis.
///
/// Basis order: root vectors of the positive roots in the global root order,
/// then their negatives in the same order, then the simple coroots.
pub struct ChevalleyAlgebra {
    rs: RootSystem,
    npos: usize,
    dim: usize,
    signed: Vec<Root>,
    /// `N_{a,b}` for signed root indices; 0 when `a + b` is not a root.
    n_table: Vec<i64>,
    /// Coroot of each positive root in simple-coroot coordinates.
    coroot: Vec<Vec<i64>>,
}

// Structure constants for pairs of positive roots, keyed by positive index.
type PosTable = HashMap<(usize, usize), i64>;

fn rat64(n: i64) -> Ratio<i64> {
    Ratio::from_integer(n)
}

/// Largest `k >= 0` with `b - k a` still a root.
fn string_down(rs: &RootSystem, a: &Root, b: &Root) -> i64 {
    let mut p = 0;
    let mut r = b.sub(a);
    while rs.is_root(&r) {
        p += 1;
        r = r.sub(a);
    }
    p
}

/// `N_{a,b}` for roots of either sign, reduced to already-computed entries of
/// the positive-pair table; 0 when `a + b` is not a root.
fn n_any(rs: &RootSystem, pos: &PosTable, a: &Root, b: &Root) -> Ratio<i64> {
    if !rs.is_root(&a.add(b)) {
        return rat64(0);
    }
    let look = |x: &Root, y: &Root| {
        let key = (
            rs.positive_index(x).expect("positive root"),
            rs.positive_index(y).expect("positive root"),
        );
        rat64(*pos.get(&key).expect("entry computed at a smaller height"))
    };
    match (a.is_positive(), b.is_positive()) {
        (true, true) => look(a, b),
        (false, false) => -n_any(rs, pos, &a.neg(), &b.neg()),
        (false, true) => -n_any(rs, pos, b, a),
        (true, false) => {
            let nu = b.neg();
            let delta = a.sub(&nu);
            if rs.is_positive_root(&delta) {
                // (a, -nu, -delta) sums to zero
                -Ratio::new(rs.inner(&delta, &delta), rs.inner(a, a)) * look(&nu, &delta)
            } else {
                let delta = nu.sub(a);
                // (a, -nu, delta) sums to zero
                -Ratio::new(rs.inner(&delta, &delta), rs.inner(&nu, &nu)) * look(a, &delta)
            }
        }
    }
}

/// `N_{alpha,beta}` from the seed constant of the least-summand decomposition
/// of `gamma = alpha + beta`, via the Jacobi identity on `(xi, -alpha, -beta)`.
fn from_seed(
    rs: &RootSystem,
    pos: &PosTable,
    xi: &Root,
    eta: &Root,
    gamma: &Root,
    alpha: &Root,
    beta: &Root,
) -> Ratio<i64> {
    let term = |x: &Root, y: &Root| {
        let f = n_any(rs, pos, xi, &x.neg());
        if f.is_zero() {
            f
        } else {
            f * n_any(rs, pos, &xi.sub(x), &y.neg())
        }
    };
    let seed = n_any(rs, pos, xi, eta);
    let scale = Ratio::new(rs.inner(gamma, gamma), rs.inner(eta, eta)) / seed;
    scale * (term(alpha, beta) - term(beta, alpha))
}

fn consistency(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InternalConsistency(what.to_string()))
    }
}

impl ChevalleyAlgebra {
    pub fn new(rs: RootSystem) -> Result<Self> {
        let npos = rs.num_positive();
        let n = rs.rank();
        let dim = 2 * npos + n;

        let mut pos: PosTable = HashMap::new();
        // positive roots come in increasing height, so every constant referenced
        // below is already present when needed
        for gamma in rs.positive_roots() {
            let pairs = rs.decompositions(gamma);
            let Some((xi, eta)) = pairs.first() else { continue };
            let seed = string_down(&rs, xi, eta) + 1;
            let ix = rs.positive_index(xi).unwrap();
            let ie = rs.positive_index(eta).unwrap();
            pos.insert((ix, ie), seed);
            pos.insert((ie, ix), -seed);
            for (a, b) in &pairs[1..] {
                let nab = from_seed(&rs, &pos, xi, eta, gamma, a, b);
                let nba = from_seed(&rs, &pos, xi, eta, gamma, b, a);
                consistency(
                    nab.is_integer() && nba.is_integer() && nab == -nba.clone() && !nab.is_zero(),
                    "derived structure constant is not a nonzero antisymmetric integer",
                )?;
                let ia = rs.positive_index(a).unwrap();
                let ib = rs.positive_index(b).unwrap();
                pos.insert((ia, ib), nab.to_integer());
                pos.insert((ib, ia), nba.to_integer());
            }
        }

        let signed: Vec<Root> = rs
            .positive_roots()
            .iter()
            .cloned()
            .chain(rs.positive_roots().iter().map(Root::neg))
            .collect();
        let mut n_table = vec![0i64; 4 * npos * npos];
        for (i, a) in signed.iter().enumerate() {
            for (j, b) in signed.iter().enumerate() {
                if j == (i + npos) % (2 * npos) {
                    continue;
                }
                let v = n_any(&rs, &pos, a, b);
                consistency(v.is_integer(), "structure constant is not an integer")?;
                n_table[i * 2 * npos + j] = v.to_integer();
            }
        }

        let mut coroot = Vec::with_capacity(npos);
        for r in rs.positive_roots() {
            let dr = rs.half_length(r);
            let mut h = Vec::with_capacity(n);
            for (i, &k) in r.coeffs().iter().enumerate() {
                let c = Ratio::new(k * rs.half_length(&rs.simple(i)), dr);
                consistency(c.is_integer(), "coroot has a non-integer coordinate")?;
                h.push(c.to_integer());
            }
            coroot.push(h);
        }

        let alg = ChevalleyAlgebra { rs, npos, dim, signed, n_table, coroot };
        alg.verify()?;
        Ok(alg)
    }

    fn verify(&self) -> Result<()> {
        let m = 2 * self.npos;
        for i in 0..m {
            for j in 0..m {
                let v = self.n_table[i * m + j];
                consistency(v == -self.n_table[j * m + i], "antisymmetry fails")?;
                if j == (i + self.npos) % m || !self.rs.is_root(&self.signed[i].add(&self.signed[j]))
                {
                    continue;
                }
                let p = string_down(&self.rs, &self.signed[i], &self.signed[j]);
                consistency(v.abs() == p + 1, "constant magnitude disagrees with root string")?;
            }
        }
        // Jacobi identity over basis triples, exhaustively for small algebras
        // and on a deterministic stride above that
        let stride = if self.dim <= 150 { 1 } else { 37 };
        let mut acc = vec![0i64; self.dim];
        let mut count = 0usize;
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in j + 1..self.dim {
                    count += 1;
                    if count % stride != 0 {
                        continue;
                    }
                    acc.iter_mut().for_each(|a| *a = 0);
                    for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for (s, c) in self.basis_bracket(x, y) {
                            for (t, d) in self.basis_bracket(s, z) {
                                acc[t] += c * d;
                            }
                        }
                    }
                    consistency(acc.iter().all(|&a| a == 0), "Jacobi identity fails")?;
                }
            }
        }
        Ok(())
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    pub fn num_positive(&self) -> usize {
        self.npos
    }

    /// Basis index of the root vector of `r` (either sign).
    pub fn e_index(&self, r: &Root) -> Option<usize> {
        if r.is_positive() {
            self.rs.positive_index(r)
        } else {
            self.rs.positive_index(&r.neg()).map(|i| i + self.npos)
        }
    }

    /// Basis index of the `t`-th simple coroot.
    pub fn h_index(&self, t: usize) -> usize {
        2 * self.npos + t
    }

    pub fn basis_vector(&self, idx: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.dim];
        v[idx] = Rat::from_integer(1.into());
        v
    }

    /// Coordinates of the coroot of a positive root in the simple coroots.
    pub fn coroot_coords(&self, r: &Root) -> &[i64] {
        &self.coroot[self.rs.positive_index(r).expect("positive root")]
    }

    /// `N_{a,b}` for roots of either sign with `a + b` nonzero.
    pub fn n_constant(&self, a: &Root, b: &Root) -> i64 {
        let i = self.e_index(a).expect("root");
        let j = self.e_index(b).expect("root");
        assert!(j != (i + self.npos) % (2 * self.npos), "opposite roots");
        self.n_table[i * 2 * self.npos + j]
    }

    // Bracket of two basis vectors as a sparse integer vector.
    fn basis_bracket(&self, i: usize, j: usize) -> Vec<(usize, i64)> {
        let m = 2 * self.npos;
        match (i < m, j < m) {
            (true, true) => {
                if j == (i + self.npos) % m {
                    let (r, sign) = if i < self.npos { (i, 1) } else { (i - self.npos, -1) };
                    self.coroot[r]
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0)
                        .map(|(t, &c)| (m + t, sign * c))
                        .collect()
                } else {
                    let s = self.signed[i].add(&self.signed[j]);
                    match self.e_index(&s) {
                        Some(k) => vec![(k, self.n_table[i * m + j])],
                        None => vec![],
                    }
                }
            }
            (true, false) => {
                let p = self.rs.pairing(&self.signed[i], j - m);
                if p == 0 { vec![] } else { vec![(i, -p)] }
            }
            (false, true) => {
                let p = self.rs.pairing(&self.signed[j], i - m);
                if p == 0 { vec![] } else { vec![(j, p)] }
            }
            (false, false) => vec![],
        }
    }

    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = vec![Rat::zero(); self.dim];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                for (k, c) in self.basis_bracket(i, j) {
                    out[k] += xi * yj * Rat::from_integer(c.into());
                }
            }
        }
        Ok(out)
    }

    /// `exp(ad x)` applied to `y`; fails unless `ad x` is nilpotent.
    pub fn ad_exp(&self, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>> {
        let mut acc = y.to_vec();
        let mut term = y.to_vec();
        for k in 1..=self.dim + 1 {
            term = self.bracket(x, &term)?;
            if term.iter().all(Zero::is_zero) {
                return Ok(acc);
            }
            let kr = Rat::from_integer(BigInt::from(k));
            for (a, t) in acc.iter_mut().zip(term.iter_mut()) {
                *t /= &kr;
                *a += &*t;
            }
        }
        Err(Error::NotNilpotent)
    }

    /// Operator on the algebra realizing the simple reflection `r_i`, as the
    /// matrix of `exp(ad e_i) exp(-ad e_{-i}) exp(ad e_i)` (columns = images).
    pub fn weyl_action(&self, i: usize) -> Result<Vec<Vec<Rat>>> {
        let alpha = self.rs.simple(i);
        let i_f = self.e_index(&alpha.neg()).unwrap();
        let e = self.basis_vector(self.e_index(&alpha).unwrap());
        let mut mf = self.basis_vector(i_f);
        mf[i_f] = -mf[i_f].clone();
        let mut mat = vec![vec![Rat::zero(); self.dim]; self.dim];
        for j in 0..self.dim {
            let v = self.basis_vector(j);
            let v = self.ad_exp(&e, &v)?;
            let v = self.ad_exp(&mf, &v)?;
            let v = self.ad_exp(&e, &v)?;
            for (r, val) in v.into_iter().enumerate() {
                mat[r][j] = val;
            }
        }
        Ok(mat)
    }

    /// Embed a vector of simple-coroot coordinates into the algebra.
    pub fn embed_cartan(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.rank());
        let mut out = vec![Rat::zero(); self.dim];
        out[2 * self.npos..].clone_from_slice(v);
        out
    }

    /// Embed a vector of positive-root-vector coordinates into the algebra.
    pub fn embed_upper(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.npos);
        let mut out = vec![Rat::zero(); self.dim];
        out[..self.npos].clone_from_slice(v);
        out
    }

    /// Span of the positive root vectors and the Cartan subalgebra.
    pub fn borel(&self) -> Subspace<Rat> {
        let rows: Vec<Vec<Rat>> = (0..self.npos)
            .chain(2 * self.npos..self.dim)
            .map(|i| self.basis_vector(i))
            .collect();
        Subspace::from_rows(self.dim, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::build_root_system;
    use num::Signed;

    fn alg(label: &str) -> ChevalleyAlgebra {
        ChevalleyAlgebra::new(build_root_system(label).unwrap()).unwrap()
    }

    fn root(coeffs: &[i64]) -> Root {
        Root::new(coeffs.to_vec())
    }

    fn ints(alg: &ChevalleyAlgebra, v: &[Rat]) -> Vec<i64> {
        assert_eq!(v.len(), alg.dim());
        v.iter()
            .map(|x| {
                assert!(x.is_integer());
                i64::try_from(x.to_integer()).unwrap()
            })
            .collect()
    }

    #[test]
    fn sl2_relations() {
        let g = alg("A1");
        assert_eq!(g.dim(), 3);
        let (e, f, h) = (g.basis_vector(0), g.basis_vector(1), g.basis_vector(2));
        assert_eq!(ints(&g, &g.bracket(&h, &e).unwrap()), [2, 0, 0]);
        assert_eq!(ints(&g, &g.bracket(&h, &f).unwrap()), [0, -2, 0]);
        assert_eq!(ints(&g, &g.bracket(&e, &f).unwrap()), [0, 0, 1]);
    }

    #[test]
    fn ad_exp_on_sl2() {
        let g = alg("A1");
        let (e, f) = (g.basis_vector(0), g.basis_vector(1));
        // exp(ad e) f = f + h - e
        assert_eq!(ints(&g, &g.ad_exp(&e, &f).unwrap()), [-1, 1, 1]);
        assert!(matches!(
            g.ad_exp(&g.basis_vector(2), &e),
            Err(Error::NotNilpotent)
        ));
    }

    #[test]
    fn bracket_checks_dimensions() {
        let g = alg("A1");
        assert!(matches!(
            g.bracket(&vec![Rat::zero(); 2], &vec![Rat::zero(); 3]),
            Err(Error::AlgebraMismatch)
        ));
    }

    #[test]
    fn a2_constants_are_units() {
        let g = alg("A2");
        assert_eq!(g.n_constant(&root(&[0, 1]), &root(&[1, 0])), 1);
        assert_eq!(g.n_constant(&root(&[1, 0]), &root(&[0, 1])), -1);
        for a in g.root_system().positive_roots() {
            for b in g.root_system().positive_roots() {
                if g.root_system().is_root(&a.add(b)) {
                    assert_eq!(g.n_constant(a, b).abs(), 1);
                }
            }
        }
    }

    #[test]
    fn g2_constants_match_root_strings() {
        let g = alg("G2");
        assert_eq!(g.n_constant(&root(&[1, 0]), &root(&[1, 1])).abs(), 2);
        assert_eq!(g.n_constant(&root(&[1, 0]), &root(&[2, 1])).abs(), 3);
        assert_eq!(g.n_constant(&root(&[0, 1]), &root(&[3, 1])).abs(), 1);
    }

    #[test]
    fn coroots_of_long_roots() {
        let g = alg("B2");
        assert_eq!(g.coroot_coords(&root(&[1, 2])), [1, 1]);
        let g = alg("G2");
        assert_eq!(g.coroot_coords(&root(&[2, 1])), [2, 3]);
        assert_eq!(g.coroot_coords(&root(&[3, 2])), [1, 2]);
    }

    #[test]
    fn construction_verifies_across_types() {
        for label in ["A3", "B3", "C3", "D4", "F4", "G2", "A2xB2"] {
            ChevalleyAlgebra::new(build_root_system(label).unwrap()).unwrap();
        }
    }

    #[test]
    fn jacobi_through_public_bracket() {
        let g = alg("B2");
        let x = g.basis_vector(0);
        let y: Vec<Rat> = (0..g.dim()).map(|i| Rat::from_integer((i as i64 + 1).into())).collect();
        let z = g.basis_vector(g.h_index(1));
        let j1 = g.bracket(&g.bracket(&x, &y).unwrap(), &z).unwrap();
        let j2 = g.bracket(&g.bracket(&y, &z).unwrap(), &x).unwrap();
        let j3 = g.bracket(&g.bracket(&z, &x).unwrap(), &y).unwrap();
        for i in 0..g.dim() {
            assert!((j1[i].clone() + &j2[i] + &j3[i]).is_zero());
        }
    }

    #[test]
    fn weyl_action_permutes_root_spaces() {
        for label in ["A2", "B2"] {
            let g = alg(label);
            let rs = g.root_system();
            for i in 0..rs.rank() {
                let w = g.weyl_action(i).unwrap();
                for (s, r) in (0..2 * g.num_positive()).map(|s| (s, &g.signed[s])) {
                    let image = rs.reflect(i, r);
                    let target = g.e_index(&image).unwrap();
                    for row in 0..g.dim() {
                        if row == target {
                            assert_eq!(w[row][s].clone().abs(), Rat::from_integer(1.into()));
                        } else {
                            assert!(w[row][s].is_zero(), "{label} r_{i} col {s} row {row}");
                        }
                    }
                }
                // the Cartan subalgebra is preserved
                for t in 0..rs.rank() {
                    for row in 0..2 * g.num_positive() {
                        assert!(w[row][g.h_index(t)].is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn weyl_action_reflects_coroots() {
        // row-major under mat_vec: h_t goes to h_t - <a_t, a_i^>h_i, which
        // pins both the matrix layout and the direction of the pairing
        for label in ["B2", "G2", "A3"] {
            let g = alg(label);
            let rs = g.root_system();
            for i in 0..rs.rank() {
                let w = g.weyl_action(i).unwrap();
                for t in 0..rs.rank() {
                    let mut expected = vec![Rat::zero(); rs.rank()];
                    expected[t] += Rat::from_integer(1.into());
                    expected[i] -= Rat::from_integer(rs.cartan(t, i).into());
                    let moved = crate::linalg::mat_vec(&w, &g.embed_cartan(&{
                        let mut v = vec![Rat::zero(); rs.rank()];
                        v[t] = Rat::from_integer(1.into());
                        v
                    }));
                    assert_eq!(moved, g.embed_cartan(&expected), "{label} r_{i} on h_{t}");
                }
            }
        }
    }

    #[test]
    fn weyl_action_preserves_killing_form() {
        let g = alg("A2");
        let killing = |x: &[Rat], y: &[Rat]| -> Rat {
            let mut tr = Rat::zero();
            for j in 0..g.dim() {
                let col = g.bracket(y, &g.basis_vector(j)).unwrap();
                let col = g.bracket(x, &col).unwrap();
                tr += &col[j];
            }
            tr
        };
        let w = g.weyl_action(0).unwrap();
        let apply = |v: &[Rat]| crate::linalg::mat_vec(&w, v);
        for a in [0usize, 2, 7] {
            for b in [1usize, 3, 6] {
                let (x, y) = (g.basis_vector(a), g.basis_vector(b));
                assert_eq!(killing(&apply(&x), &apply(&y)), killing(&x, &y));
            }
        }
    }

    #[test]
    fn borel_has_expected_dimension() {
        let g = alg("A2");
        assert_eq!(g.borel().dim(), 5);
        assert_eq!(g.dim(), 8);
    }
}
