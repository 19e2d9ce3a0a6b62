//! Filtrations, Hodge-Tate mixed Hodge structures, polarizations and
//! nilpotent orbits in weight four.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::frobenius::{validate_frobenius, FrobeniusAlgebra, GradedBasisSpec};
use crate::matrix::Mat;
use crate::rational::Rat;
use crate::report::{ValidationReport, Witness};
use crate::subspace::Subspace;

/// Weight of the variations handled here.
pub const WEIGHT: i32 = 4;

/// Increasing filtration `W_l`, stored for `l = min..min+levels.len()`.
/// Below the stored range it is zero, above it the whole space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncFiltration {
    ambient: usize,
    min: i32,
    levels: Vec<Subspace>,
}

impl IncFiltration {
    pub fn new(ambient: usize, min: i32, levels: Vec<Subspace>) -> Result<Self> {
        for w in levels.windows(2) {
            if !w[1].contains_space(&w[0]) {
                return Err(Error::Filtration("increasing filtration is not nested".into()));
            }
        }
        Ok(IncFiltration { ambient, min, levels })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn get(&self, l: i32) -> Subspace {
        if l < self.min {
            return Subspace::zero(self.ambient);
        }
        match self.levels.get((l - self.min) as usize) {
            Some(s) => s.clone(),
            None => Subspace::full(self.ambient),
        }
    }

    /// Indices `l` where `W_l != W_{l-1}`.
    pub fn jumps(&self) -> Vec<i32> {
        let (lo, hi) = self.range();
        (lo..=hi).filter(|&l| self.get(l) != self.get(l - 1)).collect()
    }

    /// Index range outside of which the filtration is constant.
    pub fn range(&self) -> (i32, i32) {
        (self.min, self.min + self.levels.len() as i32)
    }

    /// `W[-k]` with `W[-k]_l = W_{l-k}`.
    pub fn shift(&self, k: i32) -> Self {
        IncFiltration { ambient: self.ambient, min: self.min + k, levels: self.levels.clone() }
    }

    /// Equality as filtrations, independent of the stored range.
    pub fn same_as(&self, other: &IncFiltration) -> bool {
        let lo = self.min.min(other.min) - 1;
        let hi = (self.min + self.levels.len() as i32).max(other.min + other.levels.len() as i32) + 1;
        (lo..=hi).all(|l| self.get(l) == other.get(l))
    }
}

/// Decreasing filtration `F^p`, stored for `p = 0..levels.len()`. For
/// `p < 0` it is the whole space, beyond the stored range zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    ambient: usize,
    levels: Vec<Subspace>,
}

impl Flag {
    pub fn new(ambient: usize, levels: Vec<Subspace>) -> Result<Self> {
        for w in levels.windows(2) {
            if !w[0].contains_space(&w[1]) {
                return Err(Error::Filtration("decreasing filtration is not nested".into()));
            }
        }
        Ok(Flag { ambient, levels })
    }

    /// `F^p` spanned by the basis vectors of degree `<= 8 - 2p`, for the
    /// graded basis `T_0..T_m`.
    pub fn from_grading(bs: GradedBasisSpec) -> Self {
        let n = bs.dim();
        let levels = (0..=4)
            .map(|p| {
                let vs: Vec<Vec<Rat>> = (0..n)
                    .filter(|&a| bs.degree(a) <= 8 - 2 * p as u32)
                    .map(|a| unit_vector(n, a))
                    .collect();
                Subspace::span(n, &vs)
            })
            .collect();
        Flag { ambient: n, levels }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn get(&self, p: i32) -> Subspace {
        if p < 0 {
            return Subspace::full(self.ambient);
        }
        self.levels.get(p as usize).cloned().unwrap_or_else(|| Subspace::zero(self.ambient))
    }

    /// Image of the flag under an invertible matrix.
    pub fn map(&self, g: &Mat) -> Flag {
        Flag { ambient: self.ambient, levels: self.levels.iter().map(|s| s.map(g)).collect() }
    }
}

pub(crate) fn unit_vector(n: usize, i: usize) -> Vec<Rat> {
    (0..n).map(|k| if k == i { Rat::one() } else { Rat::zero() }).collect()
}

/// Hodge-Tate bigrading: `pieces[p] = I^{p,p}`, `p = 0..=4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bigrading {
    ambient: usize,
    pieces: Vec<Subspace>,
}

impl Bigrading {
    pub fn piece(&self, p: usize) -> &Subspace {
        &self.pieces[p]
    }

    pub fn pieces(&self) -> &[Subspace] {
        &self.pieces
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Basis matrix whose columns run through `I^{4,4}, I^{3,3}, ..., I^{0,0}`
    /// together with the level `p` of every column.
    pub fn adapted_basis(&self) -> (Mat, Vec<usize>) {
        let mut cols = Vec::new();
        let mut levels = Vec::new();
        for p in (0..self.pieces.len()).rev() {
            for v in self.pieces[p].basis() {
                cols.push(v.clone());
                levels.push(p);
            }
        }
        (Mat::from_columns(self.ambient, &cols), levels)
    }
}

/// Smallest `d` with `N^d = 0`, if at most `n`.
fn nilpotency_index(n: &Mat) -> Option<u32> {
    let mut p = Mat::identity(n.rows());
    for d in 0..=n.rows() as u32 {
        if p.is_zero() {
            return Some(d);
        }
        p = &p * n;
    }
    None
}

/// `W(N)[-k]`: the monodromy weight filtration of `N`, centered at `k`.
pub fn weight_filtration(n: &Mat, k: i32) -> Result<IncFiltration> {
    let dim = n.rows();
    let idx = nilpotency_index(n).ok_or(Error::NotNilpotent)?;
    let d = idx.saturating_sub(1) as i32;
    let powers: Vec<Mat> = (0..=idx + 1).map(|e| n.pow(e)).collect();
    let kernels: Vec<Subspace> = powers.iter().map(Subspace::kernel).collect();
    let images: Vec<Subspace> = powers.iter().map(Subspace::image).collect();
    let mut levels = Vec::new();
    for l in -d..=d {
        let mut w = Subspace::zero(dim);
        for kk in 0..=d {
            let im = (kk - l).max(0) as usize;
            if im < images.len() {
                w = w.sum(&kernels[(kk + 1) as usize].intersect(&images[im]));
            }
        }
        levels.push(w);
    }
    let centered = IncFiltration::new(dim, -d, levels)?;
    debug_assert!(satisfies_weight_properties(n, &centered, 0));
    Ok(centered.shift(k))
}

/// The two characterizing properties of `W(N)[-k]`: `N W_l ⊆ W_{l-2}` and
/// `N^l : gr_{k+l} -> gr_{k-l}` bijective for `l >= 0`.
pub fn satisfies_weight_properties(n: &Mat, w: &IncFiltration, k: i32) -> bool {
    let (lo, hi) = w.range();
    for l in lo - 1..=hi + 1 {
        if !w.get(l - 2).contains_space(&w.get(l).map(n)) {
            return false;
        }
    }
    let span = (hi - k).max(k - lo) + 1;
    for l in 0..=span {
        let top = w.get(k + l);
        let below_top = w.get(k + l - 1);
        let bottom_prev = w.get(k - l - 1);
        let nl = n.pow(l as u32);
        // injective on gr: {v in W_{k+l} : N^l v in W_{k-l-1}} = W_{k+l-1}
        let kernel = Subspace::preimage(&nl, &bottom_prev).intersect(&top);
        if kernel != below_top {
            return false;
        }
        // dimensions of the two graded pieces agree
        let gr_top = top.dim() - below_top.dim();
        let gr_bottom = w.get(k - l).dim() - bottom_prev.dim();
        if gr_top != gr_bottom {
            return false;
        }
    }
    true
}

/// `I^{p,p} = F^p ∩ W_{2p}`, verified to split `(W, F)` exactly.
pub fn hodge_tate_bigrading(w: &IncFiltration, f: &Flag) -> Result<Bigrading> {
    let n = w.ambient();
    let pieces: Vec<Subspace> = (0..=4).map(|p| f.get(p).intersect(&w.get(2 * p))).collect();
    let total: usize = pieces.iter().map(Subspace::dim).sum();
    let sum = pieces.iter().fold(Subspace::zero(n), |acc, s| acc.sum(s));
    if total != n || sum.dim() != n {
        return Err(Error::NotHodgeTate(format!("dim sum of F^p ∩ W_2p is {total} (span {}), ambient {n}", sum.dim())));
    }
    let (lo, hi) = w.range();
    for l in lo - 1..=hi + 1 {
        let rebuilt = (0..=4).filter(|&p| 2 * p <= l).fold(Subspace::zero(n), |acc, p| acc.sum(&pieces[p as usize]));
        if rebuilt != w.get(l) {
            return Err(Error::NotHodgeTate(format!("W_{l} is not the sum of I^(p,p) with 2p <= {l}")));
        }
    }
    for a in 0..=5 {
        let rebuilt = (a..=4).fold(Subspace::zero(n), |acc, p| acc.sum(&pieces[p as usize]));
        if rebuilt != f.get(a) {
            return Err(Error::NotHodgeTate(format!("F^{a} is not the sum of I^(p,p) with p >= {a}")));
        }
    }
    Ok(Bigrading { ambient: n, pieces })
}

/// `Q(v_a, v_b) = (-1)^a B(v_a, v_b)` for `v_a` of degree `2a`.
pub fn q_from_b(b: &Mat, bs: GradedBasisSpec) -> Result<Mat> {
    bs.check_dim(b.rows())?;
    Ok(Mat::from_fn(b.rows(), b.cols(), |i, j| {
        if (bs.degree(i) / 2) % 2 == 1 {
            -b[(i, j)].clone()
        } else {
            b[(i, j)].clone()
        }
    }))
}

/// Inverse of [`q_from_b`] (the same sign flip).
pub fn b_from_q(q: &Mat, bs: GradedBasisSpec) -> Result<Mat> {
    q_from_b(q, bs)
}

/// `Q(F^a, F^{5-a}) = 0` for all `a`; returns the first failing `a`.
fn isotropy_failure(f: &Flag, q: &Mat) -> Option<i32> {
    (0..=5).find(|&a| {
        let x = f.get(a);
        let y = f.get(WEIGHT + 1 - a);
        x.basis().iter().any(|u| y.basis().iter().any(|v| !q.bilinear(u, v).is_zero()))
    })
}

/// The polarized mixed Hodge structure conditions for `(W, F, N, Q)` in
/// weight four, plus the requirement that `N` lowers `F` by one step.
pub fn check_pmhs(w: &IncFiltration, f: &Flag, n: &Mat, q: &Mat) -> ValidationReport {
    let mut rep = ValidationReport::new();

    let nil = n.pow(WEIGHT as u32 + 1).is_zero();
    rep.record("nilpotency", (!nil).then(|| Witness::detail("N^5 != 0")));

    let wn = if nil { weight_filtration(n, WEIGHT).ok() } else { None };
    let w_ok = wn.as_ref().is_some_and(|wn| wn.same_as(w));
    let w_fail = (!w_ok).then(|| {
        let (lo, hi) = w.range();
        let first = wn.as_ref().and_then(|wn| (lo - 1..=hi + 1).find(|&l| wn.get(l) != w.get(l)));
        match first {
            Some(l) => Witness::indices(&[l.max(0) as usize]).with_detail(format!("W_{l} differs from W(N)[-4]_{l}")),
            None => Witness::detail("W(N) unavailable"),
        }
    });
    rep.record("weight_filtration", w_fail);

    rep.record(
        "isotropy",
        isotropy_failure(f, q).map(|a| Witness::indices(&[a as usize]).with_detail(format!("Q(F^{a}, F^{}) != 0", 5 - a))),
    );

    let morph = (0..=4).find(|&p| !f.get(p - 1).contains_space(&f.get(p).map(n)));
    rep.record("n_morphism", morph.map(|p| Witness::indices(&[p as usize]).with_detail(format!("N F^{p} not in F^{}", p - 1))));

    match hodge_tate_bigrading(w, f) {
        Err(e) => rep.fail("polarization", Witness::detail(e.to_string())),
        Ok(bigr) => {
            let mut failure = None;
            for l in 0..=WEIGHT {
                if (WEIGHT + l) % 2 == 1 {
                    continue;
                }
                let p = ((WEIGHT + l) / 2) as usize;
                let prim = bigr.piece(p).intersect(&Subspace::kernel(&n.pow(l as u32 + 1)));
                if prim.is_zero() {
                    continue;
                }
                let nl = n.pow(l as u32);
                let basis = prim.basis();
                let gram = Mat::from_fn(basis.len(), basis.len(), |i, j| q.bilinear(&basis[i], &nl.mul_vec(&basis[j])));
                if !gram.is_symmetric() {
                    failure = Some(Witness::indices(&[l as usize]).with_detail("Q(u, N^l v) not symmetric"));
                    break;
                }
                if let Err(k) = gram.positive_definite() {
                    failure = Some(Witness::indices(&[l as usize, k]).with_detail(format!(
                        "Q(u, N^{l} v) not positive definite on primitive part of dim {} (pivot {k})",
                        basis.len()
                    )));
                    break;
                }
            }
            rep.record("polarization", failure);
        }
    }
    rep
}

/// Commuting nilpotents `N_1..N_r`, limiting flag `F_0` and pairing `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentOrbitData {
    n: usize,
    ns: Vec<Mat>,
    f0: Flag,
    q: Mat,
}

impl NilpotentOrbitData {
    /// Checks shapes, pairwise commutation, `N_j^5 = 0`, `Q` symmetric and
    /// nondegenerate, and `Q(N u, v) + Q(u, N v) = 0`.
    pub fn new(ns: Vec<Mat>, f0: Flag, q: Mat) -> Result<Self> {
        let n = q.rows();
        if q.shape() != (n, n) || f0.ambient() != n || ns.iter().any(|m| m.shape() != (n, n)) {
            return Err(Error::InvalidOrbit("inconsistent dimensions".into()));
        }
        if !q.is_symmetric() || q.determinant().is_zero() {
            return Err(Error::InvalidOrbit("Q must be symmetric and nondegenerate".into()));
        }
        for (j, a) in ns.iter().enumerate() {
            if !a.pow(WEIGHT as u32 + 1).is_zero() {
                return Err(Error::InvalidOrbit(format!("N_{} is not nilpotent of order <= 5", j + 1)));
            }
            if !(&(&a.transpose() * &q) + &(&q * a)).is_zero() {
                return Err(Error::InvalidOrbit(format!("N_{} is not Q-skew", j + 1)));
            }
            for (k, b) in ns.iter().enumerate().skip(j + 1) {
                if !a.commutator(b).is_zero() {
                    return Err(Error::InvalidOrbit(format!("N_{} and N_{} do not commute", j + 1, k + 1)));
                }
            }
        }
        Ok(NilpotentOrbitData { n, ns, f0, q })
    }

    /// The orbit `exp(sum z_j L_{T_j}) F_0` of a graded Frobenius algebra,
    /// with `F_0^p` spanned by degrees `<= 8-2p` and `Q` from `B`.
    pub fn from_algebra(alg: &FrobeniusAlgebra) -> Result<Self> {
        let bs = alg.basis();
        let ns = (1..=bs.r).map(|j| alg.mult_matrix(bs.t2(j))).collect();
        Self::new(ns, Flag::from_grading(bs), q_from_b(alg.bform(), bs)?)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.ns.len()
    }

    pub fn nilpotents(&self) -> &[Mat] {
        &self.ns
    }

    pub fn f0(&self) -> &Flag {
        &self.f0
    }

    pub fn q(&self) -> &Mat {
        &self.q
    }

    /// `sum_j lambda_j N_j`.
    pub fn combination(&self, lambda: &[Rat]) -> Mat {
        self.ns.iter().zip(lambda).fold(Mat::zeros(self.n, self.n), |acc, (m, l)| &acc + &m.scale(l))
    }

    pub fn barycenter(&self) -> Mat {
        self.combination(&vec![Rat::one(); self.r()])
    }

    /// `W(C)[-4]` computed at the barycenter, and the bigrading it forms
    /// with `F_0`.
    pub fn limiting_mhs(&self) -> Result<(IncFiltration, Bigrading)> {
        let w = weight_filtration(&self.barycenter(), WEIGHT)?;
        let b = hodge_tate_bigrading(&w, &self.f0)?;
        Ok((w, b))
    }

    /// Interior cone points used as the default certificate: the barycenter
    /// and `sum_k N_k + N_j` for every `j`.
    pub fn certificate_points(&self) -> Vec<Vec<Rat>> {
        let r = self.r();
        let mut pts = vec![vec![Rat::one(); r]];
        for j in 0..r {
            let mut l = vec![Rat::one(); r];
            l[j] = Rat::from_integer(2.into());
            pts.push(l);
        }
        pts
    }
}

/// True iff `W(sum lambda_j N_j)` is the same for the default certificate
/// points and every supplied sample. All entries must be positive.
pub fn cone_independence(orbit: &NilpotentOrbitData, samples: &[Vec<Rat>]) -> Result<bool> {
    let r = orbit.r();
    for s in samples {
        if s.len() != r || s.iter().any(|x| *x <= Rat::zero()) {
            return Err(Error::InvalidOrbit("cone samples must have r positive entries".into()));
        }
    }
    let reference = weight_filtration(&orbit.barycenter(), WEIGHT)?;
    for s in orbit.certificate_points().iter().chain(samples) {
        if !weight_filtration(&orbit.combination(s), WEIGHT)?.same_as(&reference) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn point_label(lambda: &[Rat]) -> String {
    let parts: Vec<String> = lambda.iter().map(crate::rational::format_rat).collect();
    format!("({})", parts.join(","))
}

/// Certifies a nilpotent orbit: cone independence of `W`, and the PMHS
/// conditions for `(W, F_0, N, Q)` at the barycenter, at `sum N_k + N_j`
/// for each `j`, and at each extra sample. Repeated points are checked once.
pub fn check_nilpotent_orbit(orbit: &NilpotentOrbitData, samples: &[Vec<Rat>]) -> ValidationReport {
    let mut rep = ValidationReport::new();
    match cone_independence(orbit, samples) {
        Ok(true) => rep.pass("cone_independence"),
        Ok(false) => rep.fail("cone_independence", Witness::detail("W(N) differs across the cone")),
        Err(e) => rep.fail("cone_independence", Witness::detail(e.to_string())),
    }
    let mut seen: Vec<&Vec<Rat>> = Vec::new();
    let points = orbit.certificate_points();
    for s in points.iter().chain(samples) {
        if seen.contains(&s) {
            continue;
        }
        seen.push(s);
        let n = orbit.combination(s);
        let label = format!("pmhs{}", point_label(s));
        match weight_filtration(&n, WEIGHT) {
            Ok(w) => rep.merge(&label, check_pmhs(&w, orbit.f0(), &n, orbit.q())),
            Err(e) => rep.fail(label, Witness::detail(e.to_string())),
        }
    }
    rep
}

/// `dim I^{4,4} = 1`, `dim I^{3,3} = r`, and `N_j(I^{4,4})` span `I^{3,3}`.
pub fn check_max_unipotent(orbit: &NilpotentOrbitData) -> ValidationReport {
    let mut rep = ValidationReport::new();
    let (_, bigr) = match orbit.limiting_mhs() {
        Ok(x) => x,
        Err(e) => {
            rep.fail("hodge_tate", Witness::detail(e.to_string()));
            return rep;
        }
    };
    rep.pass("hodge_tate");
    let top = bigr.piece(4);
    rep.record("top_dimension", (top.dim() != 1).then(|| Witness::detail(format!("dim I^(4,4) = {}", top.dim()))));
    let next = bigr.piece(3);
    rep.record(
        "next_dimension",
        (next.dim() != orbit.r()).then(|| Witness::detail(format!("dim I^(3,3) = {}, r = {}", next.dim(), orbit.r()))),
    );
    let images: Vec<Vec<Rat>> =
        top.basis().iter().flat_map(|e| orbit.nilpotents().iter().map(move |m| m.mul_vec(e))).collect();
    let span = Subspace::span(orbit.dim(), &images);
    rep.record(
        "span",
        (span != *next).then(|| Witness::detail(format!("N_j(I^(4,4)) spans dim {}, I^(3,3) has dim {}", span.dim(), next.dim()))),
    );
    rep
}

/// Result of [`product_from_orbit`]: the algebra in the graded basis whose
/// vectors are the columns of `basis` (ambient coordinates).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitProduct {
    pub algebra: FrobeniusAlgebra,
    pub basis: Mat,
}

impl OrbitProduct {
    /// Product of two ambient vectors.
    pub fn multiply(&self, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>> {
        let sinv = self.basis.inverse()?;
        let z = self.algebra.multiply(&sinv.mul_vec(x), &sinv.mul_vec(y));
        Ok(self.basis.mul_vec(&z))
    }
}

/// The unique graded product with unit `e0` such that `N_j(e0) * v = N_j v`
/// and `v * v' = B(v, v') e0^*` on `I^{2,2}`, where `Q(e0, e0^*) = 1`.
///
/// Graded basis: `e0`, `N_j e0`, the echelon basis of `I^{2,2}`, the
/// `B`-dual basis of `N_j e0` inside `I^{1,1}`, and `e0^*`.
pub fn product_from_orbit(orbit: &NilpotentOrbitData, e0: &[Rat]) -> Result<OrbitProduct> {
    let mu = check_max_unipotent(orbit);
    if let Some(f) = mu.failures().next() {
        let w = f.witness.as_ref().map(|w| w.to_string()).unwrap_or_default();
        return Err(Error::NotMaximallyUnipotent(format!("{}: {w}", f.name)));
    }
    let (_, bigr) = orbit.limiting_mhs()?;
    let n = orbit.dim();
    let r = orbit.r();
    let q = orbit.q();
    if e0.len() != n || e0.iter().all(Zero::is_zero) || !bigr.piece(4).contains(e0) {
        return Err(Error::InvalidOrbit("e0 must be a nonzero vector of I^(4,4)".into()));
    }
    let u: Vec<Vec<Rat>> = orbit.nilpotents().iter().map(|m| m.mul_vec(e0)).collect();
    let v4: Vec<Vec<Rat>> = bigr.piece(2).basis().to_vec();
    let s = v4.len();
    // B(u_j, y) = -Q(u_j, y) for u_j of degree 2
    let y6 = bigr.piece(1).basis().to_vec();
    if y6.len() != r {
        return Err(Error::InvalidOrbit(format!("dim I^(1,1) = {} differs from r = {r}", y6.len())));
    }
    let m = Mat::from_fn(r, r, |j, l| -q.bilinear(&u[j], &y6[l]));
    let minv = m.inverse().map_err(|_| Error::Degenerate("pairing between N_j e0 and I^(1,1)".into()))?;
    let w6: Vec<Vec<Rat>> = (0..r)
        .map(|l| {
            let mut v = vec![Rat::zero(); n];
            for (k, y) in y6.iter().enumerate() {
                for (x, c) in v.iter_mut().zip(y) {
                    *x += &minv[(k, l)] * c;
                }
            }
            v
        })
        .collect();
    let bottom = bigr.piece(0).basis();
    if bottom.len() != 1 {
        return Err(Error::InvalidOrbit(format!("dim I^(0,0) = {}", bottom.len())));
    }
    let pairing = q.bilinear(e0, &bottom[0]);
    if pairing.is_zero() {
        return Err(Error::Degenerate("Q(e0, I^(0,0)) = 0".into()));
    }
    let e0_star: Vec<Rat> = bottom[0].iter().map(|x| x / &pairing).collect();

    let bs = GradedBasisSpec::new(r, s);
    if bs.dim() != n {
        return Err(Error::InvalidOrbit(format!("graded dimensions 1+{r}+{s}+{r}+1 do not add up to {n}")));
    }
    let mut cols = vec![e0.to_vec()];
    cols.extend(u.iter().cloned());
    cols.extend(v4.iter().cloned());
    cols.extend(w6);
    cols.push(e0_star.clone());
    let basis = Mat::from_columns(n, &cols);
    let sinv = basis.inverse().map_err(|_| Error::InvalidOrbit("graded basis is not a basis".into()))?;
    let sign = |a: usize| if (bs.degree(a) / 2) % 2 == 1 { -Rat::one() } else { Rat::one() };
    let bform = Mat::from_fn(n, n, |a, b| sign(a) * q.bilinear(&cols[a], &cols[b]));
    let ns = orbit.nilpotents();
    let product = |a: usize, b: usize| -> Vec<Rat> {
        let (lo, hi) = if bs.degree(a) <= bs.degree(b) { (a, b) } else { (b, a) };
        let ambient = match bs.degree(lo) {
            0 => cols[hi].clone(),
            2 => ns[lo - 1].mul_vec(&cols[hi]),
            4 if bs.degree(hi) == 4 => {
                let c = q.bilinear(&cols[lo], &cols[hi]);
                e0_star.iter().map(|x| x * &c).collect()
            }
            _ => vec![Rat::zero(); n],
        };
        sinv.mul_vec(&ambient)
    };
    let algebra = FrobeniusAlgebra::from_fn(bs, bform, product)?;
    let rep = validate_frobenius(&algebra);
    if let Some(f) = rep.failures().next() {
        let w = f.witness.as_ref().map(|w| w.to_string()).unwrap_or_default();
        return Err(Error::InvalidOrbit(format!("induced product fails {} ({w})", f.name)));
    }
    Ok(OrbitProduct { algebra, basis })
}
