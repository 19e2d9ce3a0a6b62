//! Matrices that are polynomial in `z_1..z_r` with truncated-series
//! coefficients in `q_1..q_r`, where `q_j = e^{z_j}`.
//!
//! The derivative `d/dz_j` acts on both parts: it differentiates the
//! z-polynomial and applies `theta_j` to the series coefficients.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{Mat, SeriesMatrix};
use crate::rational::Rat;
use crate::series::Monomial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMatrix {
    rows: usize,
    cols: usize,
    num_vars: usize,
    order: u32,
    /// z-exponent -> series coefficient matrix; zero matrices are not stored
    terms: BTreeMap<Monomial, SeriesMatrix>,
}

impl ZMatrix {
    pub fn zeros(rows: usize, cols: usize, num_vars: usize, order: u32) -> Self {
        ZMatrix { rows, cols, num_vars, order, terms: BTreeMap::new() }
    }

    pub fn from_series(m: &SeriesMatrix) -> Self {
        let mut out = Self::zeros(m.rows(), m.cols(), m.num_vars(), m.order());
        out.add_term(vec![0; m.num_vars()], m.clone());
        out
    }

    pub fn from_const(m: &Mat, num_vars: usize, order: u32) -> Self {
        Self::from_series(&SeriesMatrix::from_const(m, num_vars, order))
    }

    /// `exp(sum_j z_j N_j)` for commuting nilpotent `N_j`.
    pub fn exp_nilpotent_sum(ns: &[Mat], order: u32) -> Result<Self> {
        let r = ns.len();
        let n = ns.first().map(Mat::rows).unwrap_or(0);
        let mut x = Self::zeros(n, n, r, order);
        for (j, nj) in ns.iter().enumerate() {
            let mut e = vec![0; r];
            e[j] = 1;
            x.add_term(e, SeriesMatrix::from_const(nj, r, order));
        }
        let mut acc = Self::from_const(&Mat::identity(n), r, order);
        let mut power = acc.clone();
        for l in 1..=n + 1 {
            power = power.try_mul(&x)?;
            if power.is_zero() {
                return Ok(acc);
            }
            if l == n + 1 {
                break;
            }
            acc = acc.try_add(&power.scale(&(Rat::one() / crate::rational::factorial(l as u32))))?;
        }
        Err(Error::NotNilpotent)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &SeriesMatrix)> {
        self.terms.iter()
    }

    /// Coefficient of `z^e` (zero if absent).
    pub fn z_coefficient(&self, e: &[u32]) -> SeriesMatrix {
        self.terms
            .get(e)
            .cloned()
            .unwrap_or_else(|| SeriesMatrix::zeros(self.rows, self.cols, self.num_vars, self.order))
    }

    /// Value at `z = 0` as a series matrix.
    pub fn at_z_zero(&self) -> SeriesMatrix {
        self.z_coefficient(&vec![0; self.num_vars])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Monomial, m: SeriesMatrix) {
        assert_eq!(e.len(), self.num_vars, "z-exponent length differs from variable count");
        let m = m.truncate(self.order);
        let sum = match self.terms.remove(&e) {
            Some(old) => &old + &m,
            None => m,
        };
        let sum = if sum.order() < self.order { sum } else { sum.truncate(self.order) };
        if !sum.is_zero() {
            self.terms.insert(e, sum);
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::VarCountMismatch { left: self.num_vars, right: other.num_vars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape { op: "add", left: (self.rows, self.cols), right: (other.rows, other.cols) });
        }
        let mut out = self.clone();
        out.order = self.order.min(other.order);
        out.terms = out.terms.into_iter().map(|(e, m)| (e, m.truncate(out.order))).collect();
        for (e, m) in &other.terms {
            out.add_term(e.clone(), m.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&-Rat::one()))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape { op: "mul", left: (self.rows, self.cols), right: (other.rows, other.cols) });
        }
        let mut out = Self::zeros(self.rows, other.cols, self.num_vars, self.order.min(other.order));
        for (e1, a) in &self.terms {
            for (e2, b) in &other.terms {
                let e: Monomial = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                out.add_term(e, a.try_mul(b)?);
            }
        }
        Ok(out)
    }

    pub fn mul_series_left(&self, m: &SeriesMatrix) -> Result<Self> {
        self.check_series(m)?;
        let mut out = Self::zeros(m.rows(), self.cols, self.num_vars, self.order.min(m.order()));
        for (e, a) in &self.terms {
            out.add_term(e.clone(), m.try_mul(a)?);
        }
        Ok(out)
    }

    pub fn mul_series_right(&self, m: &SeriesMatrix) -> Result<Self> {
        self.check_series(m)?;
        let mut out = Self::zeros(self.rows, m.cols(), self.num_vars, self.order.min(m.order()));
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.try_mul(m)?);
        }
        Ok(out)
    }

    fn check_series(&self, m: &SeriesMatrix) -> Result<()> {
        if m.num_vars() != self.num_vars {
            return Err(Error::VarCountMismatch { left: self.num_vars, right: m.num_vars() });
        }
        Ok(())
    }

    pub fn mul_const_right(&self, m: &Mat) -> Result<Self> {
        let mut out = Self::zeros(self.rows, m.cols(), self.num_vars, self.order);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.mul_const_right(m)?);
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        ZMatrix {
            rows: self.cols,
            cols: self.rows,
            num_vars: self.num_vars,
            order: self.order,
            terms: self.terms.iter().map(|(e, m)| (e.clone(), m.transpose())).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Self::zeros(self.rows, self.cols, self.num_vars, self.order);
        if c.is_zero() {
            return out;
        }
        for (e, m) in &self.terms {
            out.terms.insert(e.clone(), m.scale(c));
        }
        out
    }

    /// `d/dz_j`, acting as `theta_j` on coefficients.
    pub fn derivative(&self, j: usize) -> Result<Self> {
        if j >= self.num_vars {
            return Err(Error::VarIndex { index: j, num_vars: self.num_vars });
        }
        let mut out = Self::zeros(self.rows, self.cols, self.num_vars, self.order);
        for (e, m) in &self.terms {
            out.add_term(e.clone(), m.theta(j)?);
            if e[j] > 0 {
                let mut e2 = e.clone();
                e2[j] -= 1;
                out.add_term(e2, m.scale(&Rat::from_integer(e[j].into())));
            }
        }
        Ok(out)
    }

    /// Columns `idx` as a new matrix.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, idx.len(), self.num_vars, self.order);
        let sel = Mat::from_fn(self.cols, idx.len(), |i, j| if idx[j] == i { Rat::one() } else { Rat::zero() });
        for (e, m) in &self.terms {
            out.add_term(e.clone(), m.mul_const_right(&sel).expect("shape matches"));
        }
        out
    }
}
