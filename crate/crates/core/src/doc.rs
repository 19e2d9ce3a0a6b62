//! JSON documents: algebras, classical and quantum potentials, nilpotent
//! orbits, asymptotic data and coordinate changes. Rationals are strings
//! `"p"` or `"p/q"`; floats are rejected by the schema.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{AsymptoticData, CoordinateChange};
use crate::error::{Error, Result};
use crate::frobenius::{classical_potential, CubicPotential, FrobeniusAlgebra, GradedBasisSpec};
use crate::hodge::{Flag, NilpotentOrbitData};
use crate::matrix::{Mat, SeriesMatrix};
use crate::quantum::QuantumPotential;
use crate::rational::{format_rat, parse_rat, Rat};
use crate::series::{QSeries, TermDoc};
use crate::subspace::Subspace;

pub const SCHEMA_VERSION: u32 = 1;

fn default_version() -> u32 {
    SCHEMA_VERSION
}

fn check_version(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Parse(format!("unsupported schema version {v}")));
    }
    Ok(())
}

fn field(path: &str, e: Error) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{path}: {m}")),
        other => Error::Parse(format!("{path}: {other}")),
    }
}

pub type MatrixDoc = Vec<Vec<String>>;
pub type SeriesMatrixDoc = Vec<Vec<Vec<TermDoc>>>;

pub fn mat_to_doc(m: &Mat) -> MatrixDoc {
    m.to_rows().iter().map(|row| row.iter().map(format_rat).collect()).collect()
}

pub fn mat_from_doc(doc: &MatrixDoc, path: &str) -> Result<Mat> {
    let rows = doc
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter().enumerate().map(|(j, x)| parse_rat(x).map_err(|e| field(&format!("{path}[{i}][{j}]"), e))).collect()
        })
        .collect::<Result<Vec<Vec<Rat>>>>()?;
    if rows.is_empty() {
        return Err(Error::Parse(format!("{path}: empty matrix")));
    }
    Mat::from_rows(rows).map_err(|e| field(path, e))
}

fn vec_from_doc(doc: &[String], path: &str) -> Result<Vec<Rat>> {
    doc.iter().enumerate().map(|(i, x)| parse_rat(x).map_err(|e| field(&format!("{path}[{i}]"), e))).collect()
}

pub fn series_to_doc(s: &QSeries) -> Vec<TermDoc> {
    s.to_doc()
}

pub fn series_from_doc(doc: &[TermDoc], num_vars: usize, order: u32, path: &str) -> Result<QSeries> {
    QSeries::from_doc(doc, num_vars, order).map_err(|e| field(path, e))
}

pub fn series_matrix_to_doc(m: &SeriesMatrix) -> SeriesMatrixDoc {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_doc()).collect()).collect()
}

pub fn series_matrix_from_doc(doc: &SeriesMatrixDoc, num_vars: usize, order: u32, path: &str) -> Result<SeriesMatrix> {
    let rows = doc.len();
    let cols = doc.first().map(Vec::len).unwrap_or(0);
    if rows == 0 || doc.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse(format!("{path}: ragged or empty series matrix")));
    }
    let mut out = SeriesMatrix::zeros(rows, cols, num_vars, order);
    for (i, row) in doc.iter().enumerate() {
        for (j, terms) in row.iter().enumerate() {
            out.set(i, j, series_from_doc(terms, num_vars, order, &format!("{path}[{i}][{j}]"))?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    pub a: usize,
    pub b: usize,
    /// Coordinates of `T_a * T_b` in `T_0..T_m`.
    pub coeffs: Vec<String>,
}

/// Structure constants and pairing of a graded algebra. Products not listed
/// are zero; an entry for `(a, b)` also sets `(b, a)` unless that pair is
/// listed separately.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    #[serde(default = "default_version")]
    pub version: u32,
    pub r: usize,
    pub s: usize,
    #[serde(rename = "B")]
    pub b: MatrixDoc,
    pub product: Vec<ProductEntry>,
}

impl AlgebraDoc {
    pub fn from_algebra(alg: &FrobeniusAlgebra) -> Self {
        let bs = alg.basis();
        let n = bs.dim();
        let mut product = Vec::new();
        for a in 0..n {
            for b in a..n {
                let v = alg.product(a, b);
                if v.iter().any(|x| *x != Rat::from_integer(0.into())) || alg.product(b, a) != v {
                    product.push(ProductEntry { a, b, coeffs: v.iter().map(format_rat).collect() });
                }
                let w = alg.product(b, a);
                if a != b && w != v {
                    product.push(ProductEntry { a: b, b: a, coeffs: w.iter().map(format_rat).collect() });
                }
            }
        }
        AlgebraDoc { version: SCHEMA_VERSION, r: bs.r, s: bs.s, b: mat_to_doc(alg.bform()), product }
    }

    /// Builds the algebra without validating the axioms.
    pub fn to_algebra(&self) -> Result<FrobeniusAlgebra> {
        check_version(self.version)?;
        let bs = GradedBasisSpec::new(self.r, self.s);
        let n = bs.dim();
        let b = mat_from_doc(&self.b, "B")?;
        if b.shape() != (n, n) {
            return Err(Error::Parse(format!("B: expected {n}x{n}, found {}x{}", b.rows(), b.cols())));
        }
        let mut table: Vec<Option<(Vec<Rat>, bool)>> = vec![None; n * n];
        for (i, e) in self.product.iter().enumerate() {
            let path = format!("product[{i}]");
            if e.a >= n || e.b >= n {
                return Err(Error::Parse(format!("{path}: index out of range 0..{n}")));
            }
            if e.coeffs.len() != n {
                return Err(Error::Parse(format!("{path}.coeffs: expected {n} entries")));
            }
            let v = vec_from_doc(&e.coeffs, &format!("{path}.coeffs"))?;
            if table[e.a * n + e.b].as_ref().is_some_and(|(_, explicit)| *explicit) {
                return Err(Error::Parse(format!("{path}: duplicate entry for ({}, {})", e.a, e.b)));
            }
            table[e.a * n + e.b] = Some((v.clone(), true));
            if table[e.b * n + e.a].is_none() {
                table[e.b * n + e.a] = Some((v, false));
            }
        }
        let zero = vec![Rat::from_integer(0.into()); n];
        FrobeniusAlgebra::from_fn(bs, b, |a, c| table[a * n + c].as_ref().map(|(v, _)| v.clone()).unwrap_or_else(|| zero.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialDoc {
    /// Exponents of `z_0..z_m`.
    pub exps: Vec<u32>,
    pub coeff: String,
}

/// A classical cubic potential `phi_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialDoc {
    #[serde(default = "default_version")]
    pub version: u32,
    pub r: usize,
    pub s: usize,
    pub monomials: Vec<MonomialDoc>,
}

impl PotentialDoc {
    pub fn from_potential(p: &CubicPotential) -> Self {
        let bs = p.basis();
        let monomials = p.terms().map(|(e, c)| MonomialDoc { exps: e.clone(), coeff: format_rat(c) }).collect();
        PotentialDoc { version: SCHEMA_VERSION, r: bs.r, s: bs.s, monomials }
    }

    pub fn to_potential(&self) -> Result<CubicPotential> {
        check_version(self.version)?;
        let bs = GradedBasisSpec::new(self.r, self.s);
        let terms = self
            .monomials
            .iter()
            .enumerate()
            .map(|(i, m)| {
                if m.exps.len() != bs.dim() {
                    return Err(Error::Parse(format!("monomials[{i}].exps: expected {} exponents", bs.dim())));
                }
                Ok((m.exps.clone(), parse_rat(&m.coeff).map_err(|e| field(&format!("monomials[{i}].coeff"), e))?))
            })
            .collect::<Result<Vec<_>>>()?;
        CubicPotential::new(bs, terms)
    }
}

/// The classical part of a quantum potential, given either as an algebra or
/// as a cubic potential.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassicalDoc {
    Algebra(AlgebraDoc),
    Potential(PotentialDoc),
}

impl ClassicalDoc {
    pub fn to_potential(&self) -> Result<CubicPotential> {
        match self {
            ClassicalDoc::Algebra(a) => classical_potential(&a.to_algebra()?),
            ClassicalDoc::Potential(p) => p.to_potential(),
        }
    }
}

/// `phi_0 + sum_a z_{r+a} psi^a(q)`, truncated at total degree `order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumDoc {
    #[serde(default = "default_version")]
    pub version: u32,
    pub classical: ClassicalDoc,
    pub psi: Vec<Vec<TermDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
}

impl QuantumDoc {
    pub fn from_potential(p: &QuantumPotential) -> Self {
        QuantumDoc {
            version: SCHEMA_VERSION,
            classical: ClassicalDoc::Potential(PotentialDoc::from_potential(p.classical())),
            psi: p.psi().iter().map(QSeries::to_doc).collect(),
            order: Some(p.order()),
        }
    }

    /// `order` overrides the document's own order; the default is 6.
    pub fn to_potential(&self, order: Option<u32>) -> Result<QuantumPotential> {
        check_version(self.version)?;
        let order = effective_order(order, self.order)?;
        let classical = self.classical.to_potential()?;
        let r = classical.basis().r;
        let psi = self
            .psi
            .iter()
            .enumerate()
            .map(|(a, t)| series_from_doc(t, r, order, &format!("psi[{a}]")))
            .collect::<Result<Vec<_>>>()?;
        QuantumPotential::new(classical, psi, order)
    }
}

pub const DEFAULT_ORDER: u32 = 6;

/// Command-line order, else the document's, else [`DEFAULT_ORDER`].
pub fn effective_order(flag: Option<u32>, doc: Option<u32>) -> Result<u32> {
    let order = flag.or(doc).unwrap_or(DEFAULT_ORDER);
    if order == 0 {
        return Err(Error::Parse("order must be at least 1".into()));
    }
    Ok(order)
}

/// Nilpotent orbit: `N` lists the matrices `N_1..N_r`, `F0[p]` lists
/// vectors spanning `F_0^p` for `p = 0..=4`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitDoc {
    #[serde(default = "default_version")]
    pub version: u32,
    pub n: usize,
    #[serde(rename = "N")]
    pub ns: Vec<MatrixDoc>,
    #[serde(rename = "F0")]
    pub f0: Vec<Vec<Vec<String>>>,
    #[serde(rename = "Q")]
    pub q: MatrixDoc,
}

impl OrbitDoc {
    pub fn from_orbit(o: &NilpotentOrbitData) -> Self {
        let f0 = (0..o.f0().num_levels())
            .map(|p| o.f0().get(p as i32).basis().iter().map(|v| v.iter().map(format_rat).collect()).collect())
            .collect();
        OrbitDoc {
            version: SCHEMA_VERSION,
            n: o.dim(),
            ns: o.nilpotents().iter().map(mat_to_doc).collect(),
            f0,
            q: mat_to_doc(o.q()),
        }
    }

    pub fn to_orbit(&self) -> Result<NilpotentOrbitData> {
        check_version(self.version)?;
        let n = self.n;
        let ns = self
            .ns
            .iter()
            .enumerate()
            .map(|(j, m)| mat_from_doc(m, &format!("N[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        if ns.is_empty() {
            return Err(Error::Parse("N: at least one nilpotent is required".into()));
        }
        let levels = self
            .f0
            .iter()
            .enumerate()
            .map(|(p, vs)| {
                let vecs = vs
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        if v.len() != n {
                            return Err(Error::Parse(format!("F0[{p}][{i}]: expected {n} entries")));
                        }
                        vec_from_doc(v, &format!("F0[{p}][{i}]"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Subspace::span(n, &vecs))
            })
            .collect::<Result<Vec<_>>>()?;
        let f0 = Flag::new(n, levels)?;
        let q = mat_from_doc(&self.q, "Q")?;
        NilpotentOrbitData::new(ns, f0, q)
    }
}

/// Orbit together with either `R` (the `p_{-1}` part, solver input) or the
/// full `Gamma`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymDoc {
    #[serde(default = "default_version")]
    pub version: u32,
    pub orbit: OrbitDoc,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r_matrix: Option<SeriesMatrixDoc>,
    #[serde(rename = "Gamma", default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<SeriesMatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
}

impl AsymDoc {
    pub fn from_asym(a: &AsymptoticData) -> Self {
        AsymDoc {
            version: SCHEMA_VERSION,
            orbit: OrbitDoc::from_orbit(a.orbit()),
            r_matrix: None,
            gamma: Some(series_matrix_to_doc(a.gamma())),
            order: Some(a.order()),
        }
    }

    pub fn orbit(&self) -> Result<NilpotentOrbitData> {
        check_version(self.version)?;
        self.orbit.to_orbit()
    }

    pub fn r_matrix(&self, orbit: &NilpotentOrbitData, order: u32) -> Result<SeriesMatrix> {
        let doc = self.r_matrix.as_ref().ok_or_else(|| Error::Parse("missing field R".into()))?;
        series_matrix_from_doc(doc, orbit.r(), order, "R")
    }

    pub fn to_asym(&self, order: Option<u32>) -> Result<AsymptoticData> {
        let orbit = self.orbit()?;
        let order = effective_order(order, self.order)?;
        let doc = self.gamma.as_ref().ok_or_else(|| Error::Parse("missing field Gamma".into()))?;
        let gamma = series_matrix_from_doc(doc, orbit.r(), order, "Gamma")?;
        AsymptoticData::new(orbit, gamma)
    }
}

/// Solver output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaDoc {
    #[serde(rename = "Gamma")]
    pub gamma: SeriesMatrixDoc,
    pub residual_max_degree_checked: u32,
}

/// Simple coordinate change `s'_j = s_j f_j(s)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChangeDoc {
    pub f: Vec<Vec<TermDoc>>,
    pub order: u32,
}

impl ChangeDoc {
    pub fn from_change(c: &CoordinateChange, order: u32) -> Self {
        ChangeDoc { f: c.factors().iter().map(QSeries::to_doc).collect(), order }
    }

    pub fn to_change(&self) -> Result<CoordinateChange> {
        let r = self.f.len();
        let f = self
            .f
            .iter()
            .enumerate()
            .map(|(j, t)| series_from_doc(t, r, self.order, &format!("f[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        CoordinateChange::new(f)
    }
}
