//! Exact linear algebra over a field-like scalar: canonical row-reduced subspaces.

use num::traits::{Num, Signed};
use std::fmt;

/// Field-like scalar the linear algebra is generic over.
///
/// Satisfied by `f32`/`f64` and by exact rationals; the rest of the crate
/// instantiates it with [`crate::Rat`] so that every computation is exact.
pub trait Scalar: Num + Signed + Clone + PartialEq + fmt::Debug {}

impl<T> Scalar for T where T: Num + Signed + Clone + PartialEq + fmt::Debug {}

/// Subspace of `T^n` stored as a reduced row echelon basis.
// invariant: rows nonzero, pivot columns strictly increasing, each pivot entry 1
// and alone in its column; equality of row data therefore decides subspace equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace<T> {
    ambient: usize,
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> Subspace<T> {
    /// Zero subspace of `T^ambient`.
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, rows: Vec::new() }
    }

    /// The whole space `T^ambient`.
    pub fn full(ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| {
                let mut row = vec![T::zero(); ambient];
                row[i] = T::one();
                row
            })
            .collect();
        Subspace { ambient, rows }
    }

    /// Span of the given vectors, each of length `ambient`.
    pub fn from_rows(ambient: usize, rows: Vec<Vec<T>>) -> Self {
        for row in &rows {
            assert_eq!(row.len(), ambient, "spanning vector has wrong length");
        }
        Subspace { ambient, rows: rref(rows, ambient) }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Canonical basis rows (reduced row echelon form).
    pub fn basis(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Whether `v` lies in the subspace.
    pub fn contains(&self, v: &[T]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector has wrong length");
        self.reduce(v).iter().all(T::is_zero)
    }

    /// Residue of `v` after eliminating all pivot coordinates; zero iff contained.
    pub fn reduce(&self, v: &[T]) -> Vec<T> {
        let mut v = v.to_vec();
        for row in &self.rows {
            let p = pivot_of(row).expect("stored rows are nonzero");
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x = x.clone() - f.clone() * r.clone();
                }
            }
        }
        v
    }

    /// Smallest subspace containing both operands.
    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient, "ambient dimensions differ");
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Subspace { ambient: self.ambient, rows: rref(rows, self.ambient) }
    }

    /// Intersection of the two subspaces.
    pub fn intersect(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient, "ambient dimensions differ");
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ambient);
        }
        // Solve sum_i a_i u_i = sum_j b_j v_j: one equation per ambient coordinate.
        let (p, q) = (self.dim(), other.dim());
        let equations: Vec<Vec<T>> = (0..self.ambient)
            .map(|c| {
                let mut row = Vec::with_capacity(p + q);
                row.extend(self.rows.iter().map(|u| u[c].clone()));
                row.extend(other.rows.iter().map(|v| T::zero() - v[c].clone()));
                row
            })
            .collect();
        let kernel = nullspace(&equations, p + q);
        let vectors = kernel
            .basis()
            .iter()
            .map(|z| {
                let mut x = vec![T::zero(); self.ambient];
                for (zi, u) in z[..p].iter().zip(&self.rows) {
                    for (xc, uc) in x.iter_mut().zip(u) {
                        *xc = xc.clone() + zi.clone() * uc.clone();
                    }
                }
                x
            })
            .collect();
        Self::from_rows(self.ambient, vectors)
    }

    /// Image of the subspace under `v -> f(v)`.
    pub fn map(&self, ambient: usize, f: impl Fn(&[T]) -> Vec<T>) -> Self {
        Self::from_rows(ambient, self.rows.iter().map(|r| f(r)).collect())
    }
}

/// Kernel of the linear map whose matrix rows are `equations` (each of length `cols`).
pub fn nullspace<T: Scalar>(equations: &[Vec<T>], cols: usize) -> Subspace<T> {
    for row in equations {
        assert_eq!(row.len(), cols, "equation has wrong length");
    }
    let reduced = rref(equations.to_vec(), cols);
    let pivots: Vec<usize> = reduced.iter().map(|r| pivot_of(r).unwrap()).collect();
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![T::zero(); cols];
        v[free] = T::one();
        for (row, &p) in reduced.iter().zip(&pivots) {
            v[p] = T::zero() - row[free].clone();
        }
        basis.push(v);
    }
    Subspace::from_rows(cols, basis)
}

/// Matrix-vector product for a matrix stored as rows.
pub fn mat_vec<T: Scalar>(rows: &[Vec<T>], v: &[T]) -> Vec<T> {
    rows.iter()
        .map(|row| {
            assert_eq!(row.len(), v.len(), "matrix and vector sizes differ");
            row.iter()
                .zip(v)
                .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
        })
        .collect()
}

fn pivot_of<T: Scalar>(row: &[T]) -> Option<usize> {
    row.iter().position(|x| !x.is_zero())
}

fn rref<T: Scalar>(mut rows: Vec<Vec<T>>, cols: usize) -> Vec<Vec<T>> {
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(r) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let lead = rows[pivot_row][col].clone();
        for x in rows[pivot_row].iter_mut() {
            *x = x.clone() / lead.clone();
        }
        for other in 0..rows.len() {
            if other != pivot_row && !rows[other][col].is_zero() {
                let f = rows[other][col].clone();
                for c in 0..cols {
                    let delta = f.clone() * rows[pivot_row][c].clone();
                    rows[other][c] = rows[other][c].clone() - delta;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.retain(|r| pivot_of(r).is_some());
    rows.sort_by_key(|r| pivot_of(r).unwrap());
    rows
}
