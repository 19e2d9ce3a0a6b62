//! Subspaces of `Q^n` in reduced echelon normal form.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::rational::{format_rat, Rat};

/// A subspace stored as the nonzero rows of the reduced row echelon form of
/// any spanning set. Two subspaces are equal iff their normal forms agree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rat>>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, &Mat::identity(ambient).to_rows())
    }

    pub fn span(ambient: usize, vectors: &[Vec<Rat>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        for v in vectors {
            assert_eq!(v.len(), ambient, "vector length differs from ambient dimension");
        }
        let m = Mat::from_rows(vectors.to_vec()).expect("rows have equal length");
        let (r, pivots) = m.rref();
        Subspace { ambient, basis: (0..pivots.len()).map(|i| r.row(i)).collect() }
    }

    /// Span of the columns of `m`.
    pub fn image(m: &Mat) -> Self {
        Self::span(m.rows(), &m.columns())
    }

    pub fn kernel(m: &Mat) -> Self {
        Self::span(m.cols(), &m.kernel())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    /// Basis vectors as the columns of an `ambient x dim` matrix.
    pub fn basis_matrix(&self) -> Mat {
        Mat::from_columns(self.ambient, &self.basis)
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        if v.iter().all(Zero::is_zero) {
            return true;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        Mat::from_rows(rows).expect("rows have equal length").rank() == self.dim()
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Self::span(self.ambient, &all)
    }

    /// Vectors annihilated by every basis vector under the dot product.
    pub fn annihilator(&self) -> Subspace {
        if self.basis.is_empty() {
            return Self::full(self.ambient);
        }
        Self::kernel(&Mat::from_rows(self.basis.clone()).expect("rows have equal length"))
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        let mut rows = self.annihilator().basis;
        rows.extend(other.annihilator().basis);
        if rows.is_empty() {
            return Self::full(self.ambient);
        }
        Self::kernel(&Mat::from_rows(rows).expect("rows have equal length"))
    }

    /// `M(self)`.
    pub fn map(&self, m: &Mat) -> Subspace {
        let vs: Vec<Vec<Rat>> = self.basis.iter().map(|v| m.mul_vec(v)).collect();
        Self::span(m.rows(), &vs)
    }

    /// `{v : M v in target}`.
    pub fn preimage(m: &Mat, target: &Subspace) -> Subspace {
        let ann = target.annihilator();
        if ann.is_zero() {
            return Self::full(m.cols());
        }
        let rows: Vec<Vec<Rat>> = ann.basis.iter().map(|a| m.transpose().mul_vec(a)).collect();
        Self::kernel(&Mat::from_rows(rows).expect("rows have equal length"))
    }

    /// Coordinates of `v` in the stored basis.
    pub fn coordinates(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        // echelon form: coordinate i is the entry of v at pivot column i
        let coords: Vec<Rat> = self
            .basis
            .iter()
            .map(|b| {
                let p = b.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero");
                v[p].clone()
            })
            .collect();
        let mut back = vec![Rat::zero(); self.ambient];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (x, y) in back.iter_mut().zip(b) {
                *x += c * y;
            }
        }
        if back.as_slice() != v {
            return Err(Error::Filtration("vector does not lie in subspace".into()));
        }
        Ok(coords)
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {})[", self.dim(), self.ambient)?;
        for v in &self.basis {
            let s: Vec<String> = v.iter().map(format_rat).collect();
            write!(f, " ({})", s.join(","))?;
        }
        write!(f, " ]")
    }
}
