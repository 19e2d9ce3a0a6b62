//! Truncated multivariate power series in `q_1..q_r` over exact rationals.
//!
//! A [`QSeries`] stores the coefficients of `q^alpha` for every multi-index
//! with total degree `|alpha| <= order`. Binary operations truncate to the
//! smaller of the two orders. Operator impls on references panic on a
//! variable-count mismatch; the `try_*` methods report it instead.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rat, parse_rat, Rat};

pub type Monomial = Vec<u32>;

pub fn total_degree(alpha: &[u32]) -> u32 {
    alpha.iter().sum()
}

/// All multi-indices in `num_vars` variables with total degree `<= order`,
/// graded by degree and lexicographic within a degree.
pub fn monomials_up_to(num_vars: usize, order: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..=order {
        let mut cur = vec![0u32; num_vars];
        push_degree(&mut out, &mut cur, 0, d);
    }
    out
}

fn push_degree(out: &mut Vec<Monomial>, cur: &mut Vec<u32>, pos: usize, left: u32) {
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k;
        push_degree(out, cur, pos + 1, left - k);
    }
    cur[pos] = 0;
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    num_vars: usize,
    order: u32,
    terms: BTreeMap<Monomial, Rat>,
}

impl QSeries {
    pub fn zero(num_vars: usize, order: u32) -> Self {
        QSeries { num_vars, order, terms: BTreeMap::new() }
    }

    pub fn one(num_vars: usize, order: u32) -> Self {
        Self::constant(Rat::one(), num_vars, order)
    }

    pub fn constant(c: Rat, num_vars: usize, order: u32) -> Self {
        let mut s = Self::zero(num_vars, order);
        s.insert(vec![0; num_vars], c);
        s
    }

    /// The coordinate function `q_{j+1}` (zero-based `j`).
    pub fn var(j: usize, num_vars: usize, order: u32) -> Self {
        let mut alpha = vec![0; num_vars];
        alpha[j] = 1;
        Self::monomial(alpha, Rat::one(), order)
    }

    pub fn monomial(alpha: Monomial, c: Rat, order: u32) -> Self {
        let mut s = Self::zero(alpha.len(), order);
        s.insert(alpha, c);
        s
    }

    pub fn from_terms<I>(num_vars: usize, order: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Rat)>,
    {
        let mut s = Self::zero(num_vars, order);
        for (alpha, c) in terms {
            if alpha.len() != num_vars {
                return Err(Error::VarCountMismatch { left: num_vars, right: alpha.len() });
            }
            s.add_term(alpha, c);
        }
        Ok(s)
    }

    fn insert(&mut self, alpha: Monomial, c: Rat) {
        if total_degree(&alpha) <= self.order && !c.is_zero() {
            self.terms.insert(alpha, c);
        }
    }

    /// Adds `c q^alpha`, dropping it if above the truncation order.
    pub fn add_term(&mut self, alpha: Monomial, c: Rat) {
        if c.is_zero() || total_degree(&alpha) > self.order {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&alpha);
                }
            }
            None => {
                self.terms.insert(alpha, c);
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha: &[u32]) -> Rat {
        self.terms.get(alpha).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&vec![0; self.num_vars])
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(|a| total_degree(a)).min()
    }

    /// The nonzero monomial of lowest degree (ties broken lexicographically).
    pub fn leading_monomial(&self) -> Option<(&Monomial, &Rat)> {
        let v = self.valuation()?;
        self.terms.iter().find(|(a, _)| total_degree(a) == v)
    }

    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        QSeries {
            num_vars: self.num_vars,
            order,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| total_degree(a) <= order)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    /// Same coefficients, truncation order lowered or raised. Raising the
    /// order is only meaningful for series known exactly (polynomials).
    pub fn with_order(&self, order: u32) -> Self {
        let mut s = self.truncate(order);
        s.order = order;
        s
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::VarCountMismatch { left: self.num_vars, right: other.num_vars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.truncate(other.order);
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.truncate(other.order);
        for (a, c) in &other.terms {
            out.add_term(a.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let order = self.order.min(other.order);
        let mut out = Self::zero(self.num_vars, order);
        for (a, ca) in &self.terms {
            let da = total_degree(a);
            if da > order {
                continue;
            }
            for (b, cb) in &other.terms {
                if da + total_degree(b) > order {
                    continue;
                }
                let ab: Monomial = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(ab, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars, self.order);
        }
        QSeries {
            num_vars: self.num_vars,
            order: self.order,
            terms: self.terms.iter().map(|(a, v)| (a.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.num_vars, self.order);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `q_j d/dq_j`: multiplies the coefficient of `q^alpha` by `alpha_j`.
    pub fn theta(&self, j: usize) -> Result<Self> {
        if j >= self.num_vars {
            return Err(Error::VarIndex { index: j, num_vars: self.num_vars });
        }
        let mut out = Self::zero(self.num_vars, self.order);
        for (a, c) in &self.terms {
            if a[j] != 0 {
                out.terms.insert(a.clone(), c * Rat::from_integer(a[j].into()));
            }
        }
        Ok(out)
    }

    /// Truncated exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if !c0.is_zero() {
            return Err(Error::ConstantTerm { expected: "0".into(), found: format_rat(&c0) });
        }
        let mut acc = Self::one(self.num_vars, self.order);
        let mut power = Self::one(self.num_vars, self.order);
        for n in 1..=self.order {
            power = &power * self;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power.scale(&Rat::new(1.into(), factorial_int(n)));
        }
        Ok(acc)
    }

    /// Truncated logarithm of a series with constant term 1.
    pub fn log(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if !c0.is_one() {
            return Err(Error::ConstantTerm { expected: "1".into(), found: format_rat(&c0) });
        }
        let x = self - &Self::one(self.num_vars, self.order);
        let mut acc = Self::zero(self.num_vars, self.order);
        let mut power = Self::one(self.num_vars, self.order);
        for n in 1..=self.order {
            power = &power * &x;
            if power.is_zero() {
                break;
            }
            let sign = if n % 2 == 1 { 1 } else { -1 };
            acc = &acc + &power.scale(&Rat::new(sign.into(), n.into()));
        }
        Ok(acc)
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::ConstantTerm { expected: "nonzero".into(), found: "0".into() });
        }
        let inv0 = c0.recip();
        // 1/f = inv0 * sum_n (1 - inv0 f)^n
        let x = &Self::one(self.num_vars, self.order) - &self.scale(&inv0);
        let mut acc = Self::one(self.num_vars, self.order);
        let mut power = Self::one(self.num_vars, self.order);
        for _ in 1..=self.order {
            power = &power * &x;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Ok(acc.scale(&inv0))
    }

    /// Substitutes `q_j -> subs[j]`. Every substituted series must have zero
    /// constant term; the result is truncated at the smallest order involved.
    pub fn compose(&self, subs: &[QSeries]) -> Result<Self> {
        if subs.len() != self.num_vars {
            return Err(Error::VarCountMismatch { left: self.num_vars, right: subs.len() });
        }
        let out_vars = subs.first().map(|s| s.num_vars).unwrap_or(0);
        let mut order = self.order;
        for s in subs {
            if s.num_vars != out_vars {
                return Err(Error::VarCountMismatch { left: out_vars, right: s.num_vars });
            }
            let c0 = s.constant_term();
            if !c0.is_zero() {
                return Err(Error::ConstantTerm { expected: "0".into(), found: format_rat(&c0) });
            }
            order = order.min(s.order);
        }
        // powers[j][k] = subs[j]^k
        let mut powers: Vec<Vec<QSeries>> = Vec::with_capacity(subs.len());
        for s in subs {
            let s = s.truncate(order);
            let mut row = vec![QSeries::one(out_vars, order)];
            for k in 1..=order as usize {
                let next = &row[k - 1] * &s;
                row.push(next);
            }
            powers.push(row);
        }
        let mut out = QSeries::zero(out_vars, order);
        for (a, c) in &self.terms {
            if total_degree(a) > order {
                continue;
            }
            let mut term = QSeries::constant(c.clone(), out_vars, order);
            for (j, &e) in a.iter().enumerate() {
                if e > 0 {
                    term = &term * &powers[j][e as usize];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    pub fn to_doc(&self) -> Vec<TermDoc> {
        self.terms
            .iter()
            .map(|(a, c)| TermDoc { alpha: a.clone(), coeff: format_rat(c) })
            .collect()
    }

    pub fn from_doc(doc: &[TermDoc], num_vars: usize, order: u32) -> Result<Self> {
        let mut terms = Vec::with_capacity(doc.len());
        for t in doc {
            terms.push((t.alpha.clone(), parse_rat(&t.coeff)?));
        }
        Self::from_terms(num_vars, order, terms)
    }
}

fn factorial_int(n: u32) -> num_bigint::BigInt {
    let mut acc = num_bigint::BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// One `{"alpha": [...], "coeff": "p/q"}` entry of a serialized series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub alpha: Vec<u32>,
    pub coeff: String,
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} [O({})]", self.order + 1)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut keys: Vec<&Monomial> = self.terms.keys().collect();
        keys.sort_by_key(|a| (total_degree(a), std::cmp::Reverse((*a).clone())));
        for a in keys {
            let c = &self.terms[a];
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = a
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(j, &e)| if e == 1 { format!("q{}", j + 1) } else { format!("q{}^{}", j + 1, e) })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", format_rat(c))?;
            } else if c.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "({})*{}", format_rat(c), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        self.try_add(rhs).expect("series variable counts differ")
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        self.try_sub(rhs).expect("series variable counts differ")
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        self.try_mul(rhs).expect("series variable counts differ")
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.scale(&-Rat::one())
    }
}
