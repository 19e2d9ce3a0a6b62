//! Asymptotic data of a period map near a maximally unipotent boundary
//! point: the `p_a` splitting of endomorphisms, the inductive solver for
//! `Gamma` from its `p_{-1}` part, coordinate changes and canonical
//! coordinates.
//!
//! Period maps are written `exp(sum_j z_j N_j) exp(Gamma(q)) F_0` with
//! `q_j = e^{z_j}`; the `z`-polynomial factor is kept symbolic.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::forms::{primitive_of_closed_form_with, wedge, LogForm1, PivotChoice};
use crate::hodge::{Bigrading, NilpotentOrbitData};
use crate::matrix::{Mat, SeriesMatrix};
use crate::rational::Rat;
use crate::report::Witness;
use crate::series::{total_degree, Monomial, QSeries};
use crate::zseries::ZMatrix;

/// Splitting `End(V) = sum_a p_a`, where `p_a` shifts the Hodge-Tate
/// bigrading `I^{p,p}` by `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieBigrading {
    basis: Mat,
    inverse: Mat,
    levels: Vec<usize>,
}

impl LieBigrading {
    pub fn new(bigrading: &Bigrading) -> Result<Self> {
        let (basis, levels) = bigrading.adapted_basis();
        let inverse = basis.inverse().map_err(|_| Error::NotHodgeTate("bigrading pieces do not span".into()))?;
        Ok(LieBigrading { basis, inverse, levels })
    }

    pub fn from_orbit(orbit: &NilpotentOrbitData) -> Result<Self> {
        let (_, b) = orbit.limiting_mhs()?;
        Self::new(&b)
    }

    /// The same splitting in the basis `basis * m`; `m` must be invertible
    /// and preserve every level.
    pub fn rebased(&self, m: &Mat) -> Result<Self> {
        let n = self.dim();
        if m.shape() != (n, n) {
            return Err(Error::Shape { op: "rebased", left: m.shape(), right: (n, n) });
        }
        for i in 0..n {
            for j in 0..n {
                if self.levels[i] != self.levels[j] && !m[(i, j)].is_zero() {
                    return Err(Error::NotInGradedPiece(format!("basis change mixes levels at ({i}, {j})")));
                }
            }
        }
        let basis = &self.basis * m;
        let inverse = basis.inverse()?;
        Ok(LieBigrading { basis, inverse, levels: self.levels.clone() })
    }

    /// Columns: a basis running through `I^{4,4}, ..., I^{0,0}`.
    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    /// Bigrading level `p` of every basis column.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    /// Largest `l` with `p_{-l}` possibly nonzero.
    pub fn depth(&self) -> usize {
        let hi = self.levels.iter().max().copied().unwrap_or(0);
        let lo = self.levels.iter().min().copied().unwrap_or(0);
        hi - lo
    }

    fn shift(&self, row: usize, col: usize) -> i32 {
        self.levels[row] as i32 - self.levels[col] as i32
    }

    pub fn to_adapted(&self, x: &Mat) -> Mat {
        &(&self.inverse * x) * &self.basis
    }

    pub fn from_adapted(&self, x: &Mat) -> Mat {
        &(&self.basis * x) * &self.inverse
    }

    pub fn to_adapted_series(&self, x: &SeriesMatrix) -> Result<SeriesMatrix> {
        x.mul_const_left(&self.inverse)?.mul_const_right(&self.basis)
    }

    pub fn from_adapted_series(&self, x: &SeriesMatrix) -> Result<SeriesMatrix> {
        x.mul_const_left(&self.basis)?.mul_const_right(&self.inverse)
    }

    fn mask(&self, a: i32) -> Mat {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| if self.shift(i, j) == a { Rat::one() } else { Rat::zero() })
    }

    /// The `p_a` component of an endomorphism.
    pub fn component(&self, x: &Mat, a: i32) -> Mat {
        let m = self.mask(a);
        let xs = self.to_adapted(x);
        let n = self.dim();
        self.from_adapted(&Mat::from_fn(n, n, |i, j| &xs[(i, j)] * &m[(i, j)]))
    }

    /// The `p_a` component of a series endomorphism.
    pub fn component_series(&self, x: &SeriesMatrix, a: i32) -> Result<SeriesMatrix> {
        let mut xs = self.to_adapted_series(x)?;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if self.shift(i, j) != a {
                    xs.set(i, j, QSeries::zero(x.num_vars(), x.order()));
                }
            }
        }
        self.from_adapted_series(&xs)
    }

    pub fn is_in(&self, x: &Mat, a: i32) -> bool {
        let xs = self.to_adapted(x);
        (0..self.dim()).all(|i| (0..self.dim()).all(|j| self.shift(i, j) == a || xs[(i, j)].is_zero()))
    }

    /// First adapted-basis entry `(row, col)` outside `p_a`.
    pub fn series_outside(&self, x: &SeriesMatrix, a: i32) -> Result<Option<(usize, usize)>> {
        let xs = self.to_adapted_series(x)?;
        let found = xs.entries().find(|((i, j), s)| self.shift(*i, *j) != a && !s.is_zero()).map(|(ij, _)| ij);
        Ok(found)
    }

    /// First adapted-basis entry `(row, col)` that is not strictly lowering.
    pub fn series_outside_negative(&self, x: &SeriesMatrix) -> Result<Option<(usize, usize)>> {
        let xs = self.to_adapted_series(x)?;
        let found = xs.entries().find(|((i, j), s)| self.shift(*i, *j) >= 0 && !s.is_zero()).map(|(ij, _)| ij);
        Ok(found)
    }
}

/// `Q X + X^T Q = 0`.
pub fn is_q_skew(q: &Mat, x: &Mat) -> bool {
    (&(q * x) + &(&x.transpose() * q)).is_zero()
}

/// A nilpotent orbit together with `Gamma(q)`, valued in the strictly
/// lowering part of the splitting and vanishing at `q = 0`. `Gamma` is
/// stored in ambient coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymptoticData {
    orbit: NilpotentOrbitData,
    gamma: SeriesMatrix,
    grading: LieBigrading,
}

impl AsymptoticData {
    pub fn new(orbit: NilpotentOrbitData, gamma: SeriesMatrix) -> Result<Self> {
        let grading = LieBigrading::from_orbit(&orbit)?;
        if gamma.shape() != (orbit.dim(), orbit.dim()) || gamma.num_vars() != orbit.r() {
            return Err(Error::Shape { op: "asymptotic data", left: gamma.shape(), right: (orbit.dim(), orbit.dim()) });
        }
        if !gamma.constant_term().is_zero() {
            return Err(Error::ConstantTerm { expected: "0".into(), found: "Gamma(0) != 0".into() });
        }
        if let Some((i, j)) = grading.series_outside_negative(&gamma)? {
            return Err(Error::NotInGradedPiece(format!("Gamma has a non-lowering entry at adapted ({i}, {j})")));
        }
        Ok(AsymptoticData { orbit, gamma, grading })
    }

    pub fn orbit(&self) -> &NilpotentOrbitData {
        &self.orbit
    }

    pub fn gamma(&self) -> &SeriesMatrix {
        &self.gamma
    }

    pub fn grading(&self) -> &LieBigrading {
        &self.grading
    }

    pub fn order(&self) -> u32 {
        self.gamma.order()
    }

    pub fn r(&self) -> usize {
        self.orbit.r()
    }

    /// `Gamma_{-1}`, the `p_{-1}` component.
    pub fn gamma_minus_one(&self) -> SeriesMatrix {
        self.grading.component_series(&self.gamma, -1).expect("shapes agree")
    }

    /// `G = exp(Gamma)`.
    pub fn g(&self) -> SeriesMatrix {
        self.gamma.exp_nilpotent().expect("Gamma is strictly lowering")
    }
}

fn check_r(grading: &LieBigrading, orbit: &NilpotentOrbitData, r: &SeriesMatrix) -> Result<()> {
    if r.shape() != (orbit.dim(), orbit.dim()) || r.num_vars() != orbit.r() {
        return Err(Error::Shape { op: "R", left: r.shape(), right: (orbit.dim(), orbit.dim()) });
    }
    if let Some((i, j)) = grading.series_outside(r, -1)? {
        return Err(Error::NotInGradedPiece(format!("R has an entry outside p_-1 at adapted ({i}, {j})")));
    }
    if !r.constant_term().is_zero() {
        return Err(Error::ConstantTerm { expected: "0".into(), found: "R(0) != 0".into() });
    }
    Ok(())
}

/// `dX_{-1} = sum_j (N_j + theta_j R) dz_j`.
pub fn dx_minus_one(orbit: &NilpotentOrbitData, r: &SeriesMatrix) -> Result<LogForm1> {
    let comps = orbit
        .nilpotents()
        .iter()
        .enumerate()
        .map(|(j, n)| SeriesMatrix::from_const(n, r.num_vars(), r.order()).try_add(&r.theta(j)?))
        .collect::<Result<Vec<_>>>()?;
    LogForm1::new(comps)
}

/// `dX_{-1} ^ dX_{-1} = 0`; witness `[j, k, row, col]` (ambient
/// coordinates) with the lowest-degree offending monomial.
pub fn check_integrability(orbit: &NilpotentOrbitData, r: &SeriesMatrix) -> Result<Option<Witness>> {
    let grading = LieBigrading::from_orbit(orbit)?;
    check_r(&grading, orbit, r)?;
    if orbit.r() < 2 {
        return Ok(None);
    }
    let dx = dx_minus_one(orbit, r)?;
    let w = wedge(&dx, &dx)?;
    Ok(w.first_nonzero().map(|((j, k), (row, col), alpha)| Witness::monomial(&[j, k, row, col], &alpha)))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverOptions {
    /// Variable used to integrate each monomial; the result does not
    /// depend on it for integrable input.
    pub pivot: PivotChoice,
}

/// `theta_j G - [G, N_j] - G theta_j R` for every `j`.
pub fn master_equation_residual(orbit: &NilpotentOrbitData, g: &SeriesMatrix, r: &SeriesMatrix) -> Result<Vec<SeriesMatrix>> {
    orbit
        .nilpotents()
        .iter()
        .enumerate()
        .map(|(j, n)| g.theta(j)?.try_sub(&g.commutator_const(n)?)?.try_sub(&g.try_mul(&r.theta(j)?)?))
        .collect()
}

fn first_residual(res: &[SeriesMatrix]) -> Option<(usize, Monomial)> {
    let mut best: Option<(usize, Monomial)> = None;
    for (j, m) in res.iter().enumerate() {
        for alpha in m.support() {
            if m.coefficient(&alpha).is_zero() {
                continue;
            }
            let better = match &best {
                None => true,
                Some((_, b)) => (total_degree(&alpha), &alpha) < (total_degree(b), b),
            };
            if better {
                best = Some((j, alpha));
            }
        }
    }
    best
}

pub fn solve_gamma(orbit: &NilpotentOrbitData, r: &SeriesMatrix) -> Result<AsymptoticData> {
    solve_gamma_with(orbit, r, SolverOptions::default())
}

/// The unique `Gamma` with `Gamma_{-1} = R` whose `G = exp(Gamma)` solves
/// `dG = [G, Theta] + G dR`, level by level:
/// `dG_{-l} = [G_{-l+1}, Theta] + G_{-l+1} dR`.
pub fn solve_gamma_with(orbit: &NilpotentOrbitData, r: &SeriesMatrix, opts: SolverOptions) -> Result<AsymptoticData> {
    let grading = LieBigrading::from_orbit(orbit)?;
    check_r(&grading, orbit, r)?;
    let (nv, order, n) = (r.num_vars(), r.order(), orbit.dim());
    let dr: Vec<SeriesMatrix> = (0..nv).map(|j| r.theta(j)).collect::<Result<_>>()?;
    let mut g = SeriesMatrix::identity(n, nv, order).try_add(r)?;
    let mut prev = r.clone();
    for level in 2..=grading.depth() {
        let comps = orbit
            .nilpotents()
            .iter()
            .zip(&dr)
            .map(|(nj, drj)| prev.commutator_const(nj)?.try_add(&prev.try_mul(drj)?))
            .collect::<Result<Vec<_>>>()?;
        let omega = LogForm1::new(comps)?;
        let next = primitive_of_closed_form_with(&omega, opts.pivot)
            .map_err(|e| Error::Solver { level, source: Box::new(e) })?;
        if next.is_zero() && prev.is_zero() {
            break;
        }
        g = g.try_add(&next)?;
        prev = next;
    }
    let res = master_equation_residual(orbit, &g, r)?;
    if let Some((j, alpha)) = first_residual(&res) {
        return Err(Error::MasterEquation { j, alpha });
    }
    AsymptoticData::new(orbit.clone(), g.log_unipotent()?)
}

/// The family of filtrations `Phi F_0` with
/// `Phi = exp(sum_j z_j N_j) exp(Gamma(q))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodFlag {
    pub frame: ZMatrix,
    /// `levels[p]`: basis of `F^p` as columns, `p = 0..=4`.
    pub levels: Vec<ZMatrix>,
}

impl PeriodFlag {
    pub fn get(&self, p: usize) -> &ZMatrix {
        &self.levels[p]
    }
}

pub fn period_flag(asym: &AsymptoticData) -> Result<PeriodFlag> {
    let orbit = asym.orbit();
    let frame = ZMatrix::exp_nilpotent_sum(orbit.nilpotents(), asym.order())?.mul_series_right(&asym.g())?;
    let levels = (0..orbit.f0().num_levels())
        .map(|p| frame.mul_const_right(&orbit.f0().get(p as i32).basis_matrix()))
        .collect::<Result<Vec<_>>>()?;
    Ok(PeriodFlag { frame, levels })
}

/// `Q(F^a, F^{5-a}) = 0` for `a = 1..4`; returns the first failing `a`.
pub fn check_isotropy(flag: &PeriodFlag, q: &Mat) -> Result<Option<usize>> {
    let top = flag.levels.len().saturating_sub(1);
    for a in 1..=top {
        let b = top + 1 - a;
        if b > top {
            continue;
        }
        let fa = &flag.levels[a];
        let fb = &flag.levels[b];
        let gram = fa.transpose().mul_const_right(q)?.try_mul(fb)?;
        if !gram.is_zero() {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// `E^{-1} dE - dX_{-1}` for `E = exp(sum z_j N_j) G`, expanded as
/// `G^{-1} N_j G + G^{-1} theta_j G - N_j - theta_j Gamma_{-1}`.
pub fn horizontality_residual(asym: &AsymptoticData) -> Result<Vec<SeriesMatrix>> {
    let g = asym.g();
    let ginv = g.inverse_unipotent()?;
    let r = asym.gamma_minus_one();
    asym.orbit()
        .nilpotents()
        .iter()
        .enumerate()
        .map(|(j, n)| {
            let conj = ginv.mul_const_right(n)?.try_mul(&g)?;
            let deriv = ginv.try_mul(&g.theta(j)?)?;
            conj.try_add(&deriv)?.try_sub(&SeriesMatrix::from_const(n, g.num_vars(), g.order()))?.try_sub(&r.theta(j)?)
        })
        .collect()
}

/// Simple coordinate change `s'_j = s_j f_j(s)` with `f_j(0) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateChange {
    f: Vec<QSeries>,
}

impl CoordinateChange {
    pub fn new(f: Vec<QSeries>) -> Result<Self> {
        let r = f.len();
        for (j, fj) in f.iter().enumerate() {
            if fj.num_vars() != r {
                return Err(Error::VarCountMismatch { left: r, right: fj.num_vars() });
            }
            if !fj.constant_term().is_one() {
                return Err(Error::NotSimpleChange { j, value: crate::rational::format_rat(&fj.constant_term()) });
            }
        }
        Ok(CoordinateChange { f })
    }

    pub fn identity(r: usize, order: u32) -> Self {
        CoordinateChange { f: vec![QSeries::one(r, order); r] }
    }

    pub fn factors(&self) -> &[QSeries] {
        &self.f
    }

    pub fn r(&self) -> usize {
        self.f.len()
    }

    pub fn is_identity(&self) -> bool {
        self.f.iter().all(|fj| fj.terms().all(|(a, c)| total_degree(a) == 0 && c.is_one()))
    }

    /// `s'_j(s) = s_j f_j(s)`.
    pub fn new_coordinates(&self) -> Vec<QSeries> {
        let r = self.r();
        self.f.iter().enumerate().map(|(j, fj)| fj * &QSeries::var(j, r, fj.order())).collect()
    }

    /// The change `s_j = s'_j g_j(s')` undoing this one, by fixed-point
    /// iteration `s = s' / f(s)`, each pass fixing one more degree.
    pub fn inverse(&self) -> Result<Self> {
        let r = self.r();
        let order = self.f.iter().map(QSeries::order).min().unwrap_or(0);
        let vars: Vec<QSeries> = (0..r).map(|j| QSeries::var(j, r, order)).collect();
        let mut g: Vec<QSeries> = vec![QSeries::one(r, order); r];
        for _ in 0..=order {
            let s: Vec<QSeries> = vars.iter().zip(&g).map(|(v, gj)| v * gj).collect();
            g = self.f.iter().map(|fj| fj.compose(&s)?.recip()).collect::<Result<_>>()?;
        }
        Self::new(g)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &CoordinateChange) -> Result<Self> {
        let s1 = self.new_coordinates();
        let f = self.f.iter().zip(&next.f).map(|(a, b)| Ok(a * &b.compose(&s1)?)).collect::<Result<Vec<_>>>()?;
        Self::new(f)
    }
}

/// `Gamma'(s')` with `exp Gamma'(s') = exp(-sum_j log f_j(s) N_j) exp Gamma(s)`
/// and `s = s(s')`.
pub fn change_coordinates(asym: &AsymptoticData, change: &CoordinateChange) -> Result<AsymptoticData> {
    let orbit = asym.orbit();
    if change.r() != orbit.r() {
        return Err(Error::VarCountMismatch { left: orbit.r(), right: change.r() });
    }
    let (n, nv, order) = (orbit.dim(), asym.gamma().num_vars(), asym.order());
    let mut shift = SeriesMatrix::zeros(n, n, nv, order);
    for (fj, nj) in change.factors().iter().zip(orbit.nilpotents()) {
        let l = fj.with_order(order).log()?;
        shift = shift.try_add(&SeriesMatrix::from_const(nj, nv, order).scale_series(&l)?)?;
    }
    let g = shift.scale(&-Rat::one()).exp_nilpotent()?.try_mul(&asym.g())?;
    let inv = change.inverse()?;
    let old: Vec<QSeries> = inv.new_coordinates();
    let gamma = g.log_unipotent()?.compose(&old)?;
    AsymptoticData::new(orbit.clone(), gamma)
}

/// Coefficients `gamma_j(s)` in `rho(Gamma_{-1}) = sum_j gamma_j rho(N_j)`,
/// where `rho` restricts to `I^{1,1} -> I^{0,0}`.
pub fn rho_component(asym: &AsymptoticData) -> Result<Vec<QSeries>> {
    rho_component_in(asym, asym.grading())
}

/// [`rho_component`] computed in the frame of another bigrading basis of
/// the same splitting.
pub fn rho_component_in(asym: &AsymptoticData, grading: &LieBigrading) -> Result<Vec<QSeries>> {
    let orbit = asym.orbit();
    let r = orbit.r();
    let rows: Vec<usize> = (0..grading.dim()).filter(|&i| grading.levels()[i] == 0).collect();
    let cols: Vec<usize> = (0..grading.dim()).filter(|&i| grading.levels()[i] == 1).collect();
    if rows.len() != 1 || cols.len() != r {
        return Err(Error::NotMaximallyUnipotent(format!(
            "dim I^(0,0) = {}, dim I^(1,1) = {}, r = {r}",
            rows.len(),
            cols.len()
        )));
    }
    let m = Mat::from_fn(r, r, |j, c| grading.to_adapted(&orbit.nilpotents()[j])[(rows[0], cols[c])].clone());
    let minv = m
        .inverse()
        .map_err(|_| Error::NotMaximallyUnipotent("rho(N_j) do not span Hom(I^(1,1), I^(0,0))".into()))?;
    let x = grading.to_adapted_series(&asym.gamma_minus_one())?;
    let (nv, order) = (x.num_vars(), x.order());
    Ok((0..r)
        .map(|j| {
            let mut acc = QSeries::zero(nv, order);
            for c in 0..r {
                if !minv[(c, j)].is_zero() {
                    acc = &acc + &x.get(rows[0], cols[c]).scale(&minv[(c, j)]);
                }
            }
            acc
        })
        .collect())
}

/// The simple change `q_j = s_j exp(gamma_j(s))` and the data in the new
/// coordinates, whose `rho` component vanishes.
pub fn canonical_coordinates(asym: &AsymptoticData) -> Result<(CoordinateChange, AsymptoticData)> {
    let gamma = rho_component(asym)?;
    let change = CoordinateChange::new(gamma.iter().map(QSeries::exp).collect::<Result<_>>()?)?;
    let out = change_coordinates(asym, &change)?;
    Ok((change, out))
}
