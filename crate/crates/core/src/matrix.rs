//! Dense matrices over `Q` and over truncated series.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rat, Rat};
use crate::series::{Monomial, QSeries};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Shape { op: "from_rows", left: (r, c), right: (1, row.len()) });
            }
            data.extend(row);
        }
        Ok(Mat { rows: r, cols: c, data })
    }

    /// Matrix whose columns are the given vectors (all of length `n`).
    pub fn from_columns(n: usize, cols: &[Vec<Rat>]) -> Self {
        Mat::from_fn(n, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        Mat::from_fn(rows.len(), c, |i, j| Rat::from_integer(rows[i][j].into()))
    }

    /// Matrix unit `E_{ij}` of the given shape.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Mat::zeros(rows, cols);
        m[(i, j)] = Rat::one();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn row(&self, i: usize) -> Vec<Rat> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rat>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn try_mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::Shape { op: "mul", left: self.shape(), right: other.shape() });
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Mat) -> Result<Mat> {
        if self.shape() != other.shape() {
            return Err(Error::Shape { op: "add", left: self.shape(), right: other.shape() });
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Mat) -> Result<Mat> {
        if self.shape() != other.shape() {
            return Err(Error::Shape { op: "sub", left: self.shape(), right: other.shape() });
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for (k, x) in v.iter().enumerate() {
                    let a = &self[(i, k)];
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    /// `u^T M v`.
    pub fn bilinear(&self, u: &[Rat], v: &[Rat]) -> Rat {
        let mv = self.mul_vec(v);
        u.iter().zip(&mv).map(|(a, b)| a * b).fold(Rat::zero(), |acc, x| acc + x)
    }

    pub fn commutator(&self, other: &Mat) -> Mat {
        &(self * other) - &(other * self)
    }

    pub fn pow(&self, n: u32) -> Mat {
        assert!(self.is_square());
        let mut acc = Mat::identity(self.rows);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// True when some power `N^k` with `k <= n` vanishes.
    pub fn is_nilpotent(&self) -> bool {
        self.is_square() && self.pow(self.rows as u32).is_zero()
    }

    /// `exp(tN)` for nilpotent `N` (a finite sum).
    pub fn exp_nilpotent(&self, t: &Rat) -> Result<Mat> {
        if !self.is_nilpotent() {
            return Err(Error::NotNilpotent);
        }
        let n = self.rows;
        let mut acc = Mat::identity(n);
        let mut term = Mat::identity(n);
        for l in 1..=n {
            term = (&term * self).scale(&(t / Rat::from_integer(l.into())));
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = &m[(r, j)] * &f;
                        m[(i, j)] -= v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space `{x : Mx = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::Shape { op: "inverse", left: self.shape(), right: self.shape() });
        }
        let n = self.rows;
        let aug = Mat::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Rat::one()
            } else {
                Rat::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::Singular);
        }
        Ok(Mat::from_fn(n, n, |i, j| r[(i, j + n)].clone()))
    }

    pub fn determinant(&self) -> Rat {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if !m[(i, c)].is_zero() {
                    let f = &m[(i, c)] / &piv;
                    for j in c..n {
                        let v = &m[(c, j)] * &f;
                        m[(i, j)] -= v;
                    }
                }
            }
        }
        det
    }

    /// Pivots of symmetric Gaussian elimination without pivoting (`LDL^T`).
    /// Returns `Err(k)` when the `k`-th leading pivot vanishes.
    pub fn ldl_pivots(&self) -> std::result::Result<Vec<Rat>, usize> {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut out = Vec::with_capacity(n);
        for c in 0..n {
            let piv = m[(c, c)].clone();
            if piv.is_zero() {
                return Err(c);
            }
            for i in c + 1..n {
                if !m[(i, c)].is_zero() {
                    let f = &m[(i, c)] / &piv;
                    for j in c..n {
                        let v = &m[(c, j)] * &f;
                        m[(i, j)] -= v;
                    }
                }
            }
            out.push(piv);
        }
        Ok(out)
    }

    /// Positive definiteness of a symmetric matrix via `LDL^T` pivot signs.
    /// On failure returns the index of the first non-positive pivot.
    pub fn positive_definite(&self) -> std::result::Result<(), usize> {
        match self.ldl_pivots() {
            Ok(p) => match p.iter().position(|x| !x.is_positive()) {
                Some(k) => Err(k),
                None => Ok(()),
            },
            Err(k) => Err(k),
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Mat {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        self.try_mul(rhs).expect("matrix shapes do not match")
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        self.try_add(rhs).expect("matrix shapes do not match")
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        self.try_sub(rhs).expect("matrix shapes do not match")
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.scale(&-Rat::one())
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rat).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Matrix with truncated-series entries. All entries share the variable
/// count and truncation order.
#[derive(Clone, PartialEq, Eq)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    num_vars: usize,
    order: u32,
    data: Vec<QSeries>,
}

impl SeriesMatrix {
    pub fn zeros(rows: usize, cols: usize, num_vars: usize, order: u32) -> Self {
        SeriesMatrix { rows, cols, num_vars, order, data: vec![QSeries::zero(num_vars, order); rows * cols] }
    }

    pub fn identity(n: usize, num_vars: usize, order: u32) -> Self {
        Self::from_const(&Mat::identity(n), num_vars, order)
    }

    pub fn from_const(m: &Mat, num_vars: usize, order: u32) -> Self {
        SeriesMatrix {
            rows: m.rows,
            cols: m.cols,
            num_vars,
            order,
            data: m.data.iter().map(|c| QSeries::constant(c.clone(), num_vars, order)).collect(),
        }
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        num_vars: usize,
        order: u32,
        mut f: impl FnMut(usize, usize) -> QSeries,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let s = f(i, j);
                if s.num_vars() != num_vars {
                    return Err(Error::VarCountMismatch { left: num_vars, right: s.num_vars() });
                }
                data.push(s.with_order(order.min(s.order())).with_order(order));
            }
        }
        Ok(SeriesMatrix { rows, cols, num_vars, order, data })
    }

    /// Assembles `sum_alpha M_alpha q^alpha` from coefficient matrices.
    pub fn from_coefficients<'a, I>(rows: usize, cols: usize, num_vars: usize, order: u32, coeffs: I) -> Self
    where
        I: IntoIterator<Item = (&'a Monomial, &'a Mat)>,
    {
        let mut out = Self::zeros(rows, cols, num_vars, order);
        for (alpha, m) in coeffs {
            for i in 0..rows {
                for j in 0..cols {
                    if !m[(i, j)].is_zero() {
                        out.data[i * cols + j].add_term(alpha.clone(), m[(i, j)].clone());
                    }
                }
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &QSeries {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: QSeries) {
        assert_eq!(s.num_vars(), self.num_vars, "series variable count differs from matrix");
        self.data[i * self.cols + j] = s.truncate(self.order).with_order(self.order);
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &QSeries)> {
        let cols = self.cols;
        self.data.iter().enumerate().map(move |(k, s)| ((k / cols, k % cols), s))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(QSeries::is_zero)
    }

    pub fn constant_term(&self) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).constant_term())
    }

    /// Coefficient matrix of `q^alpha`.
    pub fn coefficient(&self, alpha: &[u32]) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).coeff(alpha))
    }

    /// Every monomial that carries a nonzero coefficient in some entry.
    pub fn support(&self) -> Vec<Monomial> {
        let mut all: Vec<Monomial> = self.data.iter().flat_map(|s| s.terms().map(|(a, _)| a.clone())).collect();
        all.sort();
        all.dedup();
        all
    }

    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            num_vars: self.num_vars,
            order,
            data: self.data.iter().map(|s| s.truncate(order)).collect(),
        }
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::VarCountMismatch { left: self.num_vars, right: other.num_vars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        if self.shape() != other.shape() {
            return Err(Error::Shape { op: "add", left: self.shape(), right: other.shape() });
        }
        Ok(SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            num_vars: self.num_vars,
            order: self.order.min(other.order),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        if self.shape() != other.shape() {
            return Err(Error::Shape { op: "sub", left: self.shape(), right: other.shape() });
        }
        Ok(SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            num_vars: self.num_vars,
            order: self.order.min(other.order),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape { op: "mul", left: self.shape(), right: other.shape() });
        }
        let order = self.order.min(other.order);
        let mut out = Self::zeros(self.rows, other.cols, self.num_vars, order);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_const_left(&self, m: &Mat) -> Result<Self> {
        self.check_shape_left(m)?;
        let mut out = Self::zeros(m.rows(), self.cols, self.num_vars, self.order);
        for i in 0..m.rows() {
            for k in 0..m.cols() {
                let c = &m[(i, k)];
                if c.is_zero() {
                    continue;
                }
                for j in 0..self.cols {
                    let b = self.get(k, j);
                    if !b.is_zero() {
                        let idx = i * self.cols + j;
                        out.data[idx] = &out.data[idx] + &b.scale(c);
                    }
                }
            }
        }
        Ok(out)
    }

    fn check_shape_left(&self, m: &Mat) -> Result<()> {
        if m.cols() != self.rows {
            return Err(Error::Shape { op: "mul", left: m.shape(), right: self.shape() });
        }
        Ok(())
    }

    pub fn mul_const_right(&self, m: &Mat) -> Result<Self> {
        if self.cols != m.rows() {
            return Err(Error::Shape { op: "mul", left: self.shape(), right: m.shape() });
        }
        let mut out = Self::zeros(self.rows, m.cols(), self.num_vars, self.order);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..m.cols() {
                    let c = &m[(k, j)];
                    if !c.is_zero() {
                        let idx = i * m.cols() + j;
                        out.data[idx] = &out.data[idx] + &a.scale(c);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[self, m] = self*m - m*self` for a constant matrix `m`.
    pub fn commutator_const(&self, m: &Mat) -> Result<Self> {
        self.mul_const_right(m)?.try_sub(&self.mul_const_left(m)?)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        self.map(|s| s.scale(c))
    }

    pub fn scale_series(&self, s: &QSeries) -> Result<Self> {
        if s.num_vars() != self.num_vars {
            return Err(Error::VarCountMismatch { left: self.num_vars, right: s.num_vars() });
        }
        let mut out = self.map(|e| e * s);
        out.order = self.order.min(s.order());
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(&QSeries) -> QSeries) -> Self {
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            num_vars: self.num_vars,
            order: self.order,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        SeriesMatrix { rows: self.cols, cols: self.rows, num_vars: self.num_vars, order: self.order, data }
    }

    pub fn theta(&self, j: usize) -> Result<Self> {
        if j >= self.num_vars {
            return Err(Error::VarIndex { index: j, num_vars: self.num_vars });
        }
        Ok(self.map(|s| s.theta(j).expect("index checked")))
    }

    pub fn compose(&self, subs: &[QSeries]) -> Result<Self> {
        let out_vars = subs.first().map(|s| s.num_vars()).unwrap_or(0);
        let mut data = Vec::with_capacity(self.data.len());
        for s in &self.data {
            data.push(s.compose(subs)?);
        }
        let order = data.iter().map(|s| s.order()).min().unwrap_or(self.order);
        Ok(SeriesMatrix { rows: self.rows, cols: self.cols, num_vars: out_vars, order, data })
    }

    fn power_series(&self, coeff: impl Fn(usize) -> Rat, include_identity: bool) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Shape { op: "exp", left: self.shape(), right: self.shape() });
        }
        let n = self.rows;
        let mut acc = if include_identity {
            Self::identity(n, self.num_vars, self.order)
        } else {
            Self::zeros(n, n, self.num_vars, self.order)
        };
        let mut power = Self::identity(n, self.num_vars, self.order);
        for l in 1..=n + 1 {
            power = power.try_mul(self)?;
            if power.is_zero() {
                return Ok(acc);
            }
            if l == n + 1 {
                break;
            }
            acc = acc.try_add(&power.scale(&coeff(l)))?;
        }
        Err(Error::NotNilpotent)
    }

    /// `exp(X)` for a nilpotent series matrix.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        self.power_series(|l| Rat::new(1.into(), factorial(l)), true)
    }

    /// `log(self)` for a unipotent series matrix (`self - I` nilpotent).
    pub fn log_unipotent(&self) -> Result<Self> {
        let x = self.try_sub(&Self::identity(self.rows, self.num_vars, self.order))?;
        x.power_series(|l| Rat::new(if l % 2 == 1 { 1.into() } else { (-1).into() }, l.into()), false)
    }

    /// Inverse of a unipotent series matrix.
    pub fn inverse_unipotent(&self) -> Result<Self> {
        let x = self.try_sub(&Self::identity(self.rows, self.num_vars, self.order))?;
        x.power_series(|l| if l % 2 == 1 { -Rat::one() } else { Rat::one() }, true)
    }
}

fn factorial(n: usize) -> num_bigint::BigInt {
    (1..=n).fold(num_bigint::BigInt::one(), |acc, k| acc * k)
}

impl Add for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn add(self, rhs: &SeriesMatrix) -> SeriesMatrix {
        self.try_add(rhs).expect("series matrices are incompatible")
    }
}

impl Sub for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn sub(self, rhs: &SeriesMatrix) -> SeriesMatrix {
        self.try_sub(rhs).expect("series matrices are incompatible")
    }
}

impl Mul for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn mul(self, rhs: &SeriesMatrix) -> SeriesMatrix {
        self.try_mul(rhs).expect("series matrices are incompatible")
    }
}

impl Neg for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn neg(self) -> SeriesMatrix {
        self.map(|s| -s)
    }
}

impl fmt::Debug for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SeriesMatrix {}x{} (r={}, order={}) [", self.rows, self.cols, self.num_vars, self.order)?;
        for ((i, j), s) in self.entries() {
            if !s.is_zero() {
                writeln!(f, "  ({i},{j}): {s}")?;
            }
        }
        write!(f, "]")
    }
}
