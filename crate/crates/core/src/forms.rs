//! Matrix-valued differential forms in the coframe `dz_1, ..., dz_r`.
//!
//! With `q_j = e^{z_j}` the derivative `d/dz_j` acts on a series as
//! `theta_j = q_j d/dq_j`, so a 1-form is just a list of series matrices.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{Mat, SeriesMatrix};
use crate::rational::Rat;
use crate::series::QSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogForm1 {
    components: Vec<SeriesMatrix>,
}

/// 2-form storing only the `dz_j ^ dz_k` components with `j < k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogForm2 {
    num_vars: usize,
    components: Vec<SeriesMatrix>,
}

fn pair_index(r: usize, j: usize, k: usize) -> usize {
    debug_assert!(j < k && k < r);
    // pairs enumerated (0,1), (0,2), ..., (1,2), ...
    j * r - j * (j + 1) / 2 + (k - j - 1)
}

impl LogForm1 {
    pub fn new(components: Vec<SeriesMatrix>) -> Result<Self> {
        if let Some(first) = components.first() {
            for c in &components {
                if c.shape() != first.shape() {
                    return Err(Error::Shape { op: "form", left: first.shape(), right: c.shape() });
                }
                if c.num_vars() != components.len() {
                    return Err(Error::VarCountMismatch { left: components.len(), right: c.num_vars() });
                }
            }
        }
        Ok(LogForm1 { components })
    }

    /// `sum_j N_j dz_j` for constant matrices.
    pub fn constant(ns: &[Mat], order: u32) -> Result<Self> {
        let r = ns.len();
        Self::new(ns.iter().map(|n| SeriesMatrix::from_const(n, r, order)).collect())
    }

    /// `dF = sum_j theta_j(F) dz_j`.
    pub fn exterior_derivative(f: &SeriesMatrix) -> Self {
        LogForm1 { components: (0..f.num_vars()).map(|j| f.theta(j).expect("index in range")).collect() }
    }

    pub fn num_vars(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, j: usize) -> &SeriesMatrix {
        &self.components[j]
    }

    pub fn components(&self) -> &[SeriesMatrix] {
        &self.components
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.num_vars() != other.num_vars() {
            return Err(Error::VarCountMismatch { left: self.num_vars(), right: other.num_vars() });
        }
        let comps = self.components.iter().zip(&other.components).map(|(a, b)| a.try_add(b)).collect::<Result<_>>()?;
        Ok(LogForm1 { components: comps })
    }

    pub fn transpose(&self) -> Self {
        LogForm1 { components: self.components.iter().map(SeriesMatrix::transpose).collect() }
    }

    /// Left multiplication of every component by a series matrix.
    pub fn mul_left(&self, m: &SeriesMatrix) -> Result<Self> {
        let comps = self.components.iter().map(|c| m.try_mul(c)).collect::<Result<_>>()?;
        Ok(LogForm1 { components: comps })
    }

    /// `d` of a 1-form: component `(j,k)` is `theta_j A_k - theta_k A_j`.
    pub fn exterior_derivative_2(&self) -> Result<LogForm2> {
        let r = self.num_vars();
        let mut comps = Vec::new();
        for j in 0..r {
            for k in j + 1..r {
                comps.push(self.components[k].theta(j)?.try_sub(&self.components[j].theta(k)?)?);
            }
        }
        Ok(LogForm2 { num_vars: r, components: comps })
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(SeriesMatrix::is_zero)
    }
}

/// `x ^ y` with component `A_j B_k - A_k B_j` on `dz_j ^ dz_k`.
pub fn wedge(x: &LogForm1, y: &LogForm1) -> Result<LogForm2> {
    if x.num_vars() != y.num_vars() {
        return Err(Error::VarCountMismatch { left: x.num_vars(), right: y.num_vars() });
    }
    let r = x.num_vars();
    let mut comps = Vec::new();
    for j in 0..r {
        for k in j + 1..r {
            let a = x.components[j].try_mul(&y.components[k])?;
            let b = x.components[k].try_mul(&y.components[j])?;
            comps.push(a.try_sub(&b)?);
        }
    }
    Ok(LogForm2 { num_vars: r, components: comps })
}

impl LogForm2 {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Component on `dz_j ^ dz_k`; for `j > k` the negated stored component.
    pub fn component(&self, j: usize, k: usize) -> SeriesMatrix {
        use std::cmp::Ordering;
        match j.cmp(&k) {
            Ordering::Less => self.components[pair_index(self.num_vars, j, k)].clone(),
            Ordering::Greater => -&self.components[pair_index(self.num_vars, k, j)],
            Ordering::Equal => {
                let c = &self.components[0];
                SeriesMatrix::zeros(c.rows(), c.cols(), c.num_vars(), c.order())
            }
        }
    }

    /// Stored components `((j, k), matrix)` with `j < k`.
    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), &SeriesMatrix)> {
        let r = self.num_vars;
        (0..r).flat_map(move |j| (j + 1..r).map(move |k| (j, k))).zip(self.components.iter())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.num_vars != other.num_vars {
            return Err(Error::VarCountMismatch { left: self.num_vars, right: other.num_vars });
        }
        let comps = self.components.iter().zip(&other.components).map(|(a, b)| a.try_add(b)).collect::<Result<_>>()?;
        Ok(LogForm2 { num_vars: self.num_vars, components: comps })
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(SeriesMatrix::is_zero)
    }

    /// First nonzero coefficient as `((j, k), (row, col), alpha)`, scanning
    /// monomials by increasing total degree.
    pub fn first_nonzero(&self) -> Option<((usize, usize), (usize, usize), Vec<u32>)> {
        let mut best: Option<((usize, usize), (usize, usize), Vec<u32>)> = None;
        for (pair, m) in self.pairs() {
            for (entry, s) in m.entries() {
                if let Some((alpha, _)) = s.leading_monomial() {
                    let better = match &best {
                        None => true,
                        Some((_, _, b)) => key(alpha) < key(b),
                    };
                    if better {
                        best = Some((pair, entry, alpha.clone()));
                    }
                }
            }
        }
        best
    }
}

fn key(alpha: &[u32]) -> (u32, Vec<u32>) {
    (alpha.iter().sum(), alpha.to_vec())
}

/// Which variable divides a monomial coefficient when integrating.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PivotChoice {
    #[default]
    First,
    Last,
}

/// The unique `F` with `F(0) = 0` and `dF = omega`.
pub fn primitive_of_closed_form(omega: &LogForm1) -> Result<SeriesMatrix> {
    primitive_of_closed_form_with(omega, PivotChoice::First)
}

pub fn primitive_of_closed_form_with(omega: &LogForm1, pivot: PivotChoice) -> Result<SeriesMatrix> {
    let r = omega.num_vars();
    let Some(first) = omega.components.first() else {
        return Err(Error::VarCountMismatch { left: 0, right: 0 });
    };
    let order = omega.components.iter().map(SeriesMatrix::order).min().unwrap_or(0);
    let mut out = SeriesMatrix::zeros(first.rows(), first.cols(), r, order);
    for i in 0..first.rows() {
        for c in 0..first.cols() {
            let comps: Vec<&QSeries> = omega.components.iter().map(|m| m.get(i, c)).collect();
            let mut monos: Vec<&Vec<u32>> = comps.iter().flat_map(|s| s.terms().map(|(a, _)| a)).collect();
            monos.sort();
            monos.dedup();
            let mut f = QSeries::zero(r, order);
            for alpha in monos {
                if alpha.iter().sum::<u32>() > order {
                    continue;
                }
                let nonzero: Vec<usize> = (0..r).filter(|&j| alpha[j] > 0).collect();
                let p = match pivot {
                    PivotChoice::First => nonzero.first(),
                    PivotChoice::Last => nonzero.last(),
                };
                let Some(&p) = p else {
                    let comp = (0..r).find(|&j| !comps[j].coeff(alpha).is_zero()).unwrap_or(0);
                    return Err(Error::FormConstantTerm { entry: (i, c), component: comp });
                };
                let value = comps[p].coeff(alpha) / Rat::from_integer(alpha[p].into());
                for k in 0..r {
                    if &value * Rat::from_integer(alpha[k].into()) != comps[k].coeff(alpha) {
                        return Err(Error::NotClosed { entry: (i, c), alpha: alpha.clone(), j: k, k: p });
                    }
                }
                f.add_term(alpha.clone(), value);
            }
            out.set(i, c, f);
        }
    }
    Ok(out)
}
