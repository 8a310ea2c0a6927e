//! Sphericity of a modeled subgroup: the exact per-weight-class criterion and
//! a randomized open-orbit oracle that cross-checks it on the group side.

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorial_data::{root_vector, tau_classes};
use crate::lie_algebra::ChevalleyAlgebra;
use crate::linalg::Subspace;
use crate::reconstruction::SubgroupModel;
use crate::root_system::RootSystem;
use crate::{Rat, Result};

/// One fiber of the restricted character map, with how far `n` falls short of
/// the full root-space sum over the fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightClass {
    /// Indices into the positive-root list, ascending.
    pub members: Vec<usize>,
    /// Codimension of `n`'s slice inside the fiber's root-space sum.
    pub complement: usize,
}

/// The fibers in deterministic order, each with its `n`-codimension.
pub fn weight_classes(rs: &RootSystem, m: &SubgroupModel) -> Vec<WeightClass> {
    let npos = rs.num_positive();
    tau_classes(rs, m.torus())
        .into_iter()
        .map(|members| {
            let rows = members
                .iter()
                .map(|&i| {
                    let mut row = vec![Rat::zero(); npos];
                    row[i] = Rat::one();
                    row
                })
                .collect();
            let slice = m.n_basis().intersect(&Subspace::from_rows(npos, rows));
            let complement = members.len() - slice.dim();
            WeightClass { members, complement }
        })
        .collect()
}

/// Exact sphericity test: every class may fall short by at most a line, and
/// the short classes' characters must stay independent modulo the kernel.
pub fn criterion(rs: &RootSystem, m: &SubgroupModel) -> bool {
    let classes = weight_classes(rs, m);
    if classes.iter().any(|c| c.complement > 1) {
        return false;
    }
    let kernel = m.torus().kernel();
    let mut rows: Vec<Vec<Rat>> = kernel.basis().to_vec();
    let mut expected = kernel.dim();
    for class in &classes {
        if class.complement == 1 {
            rows.push(root_vector(&rs.positive_roots()[class.members[0]]));
            expected += 1;
        }
    }
    Subspace::from_rows(rs.rank(), rows).dim() == expected
}

/// Randomized open-orbit test: true iff some sampled point g of the big cell
/// has b + Ad(g)h filling the whole algebra.  One-sided — a false can be a
/// miss, but with a few trials that is vanishingly unlikely.
pub fn oracle_open_orbit(
    alg: &ChevalleyAlgebra,
    m: &SubgroupModel,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let npos = alg.num_positive();
    let h = m.embedded(alg)?;
    let borel = alg.borel();
    for _ in 0..trials {
        let mut x_plus = vec![Rat::zero(); alg.dim()];
        let mut x_minus = vec![Rat::zero(); alg.dim()];
        for i in 0..npos {
            x_plus[i] = Rat::from_integer(rng.gen_range(1..=7i64).into());
            x_minus[npos + i] = Rat::from_integer(rng.gen_range(1..=7i64).into());
        }
        let mut moved = Vec::with_capacity(h.dim());
        for row in h.basis() {
            moved.push(alg.ad_exp(&x_minus, &alg.ad_exp(&x_plus, row)?)?);
        }
        let reached = borel.sum(&Subspace::from_rows(alg.dim(), moved));
        if reached.dim() == alg.dim() {
            return Ok(true);
        }
    }
    Ok(false)
}
