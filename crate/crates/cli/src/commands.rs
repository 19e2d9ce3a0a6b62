use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use qvhs::asymptotics::{
    canonical_coordinates, check_integrability, master_equation_residual, rho_component, solve_gamma, AsymptoticData,
};
use qvhs::doc::{effective_order, series_matrix_to_doc, AlgebraDoc, AsymDoc, ChangeDoc, GammaDoc, QuantumDoc};
use qvhs::frobenius::{algebra_from_potential, check_classical_wdvv, classical_potential, validate_frobenius};
use qvhs::hodge::{check_max_unipotent, check_nilpotent_orbit, product_from_orbit, q_from_b, NilpotentOrbitData};
use qvhs::quantum::{
    build_connection, check_flatness, check_q_flatness, check_transversality, check_wdvv, gamma_from_potential,
    potential_from_gamma, xi_check, QuantumPotential,
};
use qvhs::report::{ValidationReport, Witness};
use qvhs::{Error, Rat};

use crate::output::Report;
use crate::{Cli, Command, CommonArgs};

pub fn run(cli: &Cli) -> Result<Report, String> {
    let start = Instant::now();
    let common = &cli.common;
    let mut report = match &cli.command {
        Command::CheckFrobenius { algebra } => check_frobenius(algebra, common)?,
        Command::CheckWdvv { potential } => cmd_check_wdvv(potential, common)?,
        Command::BuildVhs { potential } => build_vhs(potential, common)?,
        Command::RecoverPotential { asym, expect } => recover_potential(asym, expect.as_deref(), common)?,
        Command::CanonicalCoords { asym } => canonical_coords(asym, common)?,
        Command::SolveGamma { asym } => cmd_solve_gamma(asym, common)?,
    };
    if common.timing {
        report.timing_ms = Some(start.elapsed().as_millis());
    }
    Ok(report)
}

fn read_doc<T: DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load<T>(path: &Path, r: qvhs::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("{}: {e}", path.display()))
}

fn emit<T: Serialize>(common: &CommonArgs, doc: &T, report: &mut Report) -> Result<(), String> {
    if let Some(path) = &common.emit {
        let text = serde_json::to_string_pretty(doc).map_err(|e| e.to_string())? + "\n";
        fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?;
        report.emitted = Some(path.display().to_string());
    }
    Ok(())
}

/// Indices and monomial of a library error, for failure reports.
pub fn error_witness(e: &Error) -> Witness {
    let w = match e {
        Error::Solver { level, source } => {
            let inner = error_witness(source);
            let mut indices = vec![*level];
            indices.extend(inner.indices);
            Witness { indices, alpha: inner.alpha, detail: String::new() }
        }
        Error::NotClosed { entry, alpha, j, k } => Witness::monomial(&[entry.0, entry.1, *j, *k], alpha),
        Error::Integrability { a, k, alpha } => Witness::monomial(&[*a, *k], alpha),
        Error::MasterEquation { j, alpha } => Witness::monomial(&[*j], alpha),
        Error::NotFlat { j, k, alpha } => Witness::monomial(&[*j, *k], alpha),
        Error::Associativity(idx) => Witness::indices(idx),
        _ => Witness::detail(""),
    };
    w.with_detail(e.to_string())
}

fn cone_samples(common: &CommonArgs, r: usize) -> Vec<Vec<Rat>> {
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    (0..common.cone_samples)
        .map(|_| (0..r).map(|_| Rat::from_integer(rng.gen_range(1i64..=9).into())).collect())
        .collect()
}

fn load_potential(path: &Path, common: &CommonArgs) -> Result<QuantumPotential, String> {
    let doc: QuantumDoc = read_doc(path)?;
    load(path, doc.to_potential(common.order))
}

fn load_asym(path: &Path, common: &CommonArgs) -> Result<AsymptoticData, String> {
    let doc: AsymDoc = read_doc(path)?;
    load(path, doc.to_asym(common.order))
}

fn check_frobenius(path: &Path, common: &CommonArgs) -> Result<Report, String> {
    let doc: AlgebraDoc = read_doc(path)?;
    let alg = load(path, doc.to_algebra())?;
    let mut rep = ValidationReport::new();
    let axioms = validate_frobenius(&alg);
    let valid = axioms.passed();
    rep.merge("frobenius", axioms);
    if valid {
        match classical_potential(&alg) {
            Ok(phi) => {
                let w = check_classical_wdvv(&phi).map_err(|e| e.to_string())?;
                rep.record("potential/associativity", w.map(|w| Witness::indices(&w)));
                let back = algebra_from_potential(&phi).map(|b| b == alg);
                rep.record("potential/roundtrip", (!matches!(back, Ok(true))).then(|| Witness::detail("algebra differs")));
            }
            Err(e) => rep.fail("potential", error_witness(&e)),
        }
    }
    let order = effective_order(common.order, None).map_err(|e| e.to_string())?;
    Ok(Report::new("check-frobenius", order, rep))
}

fn cmd_check_wdvv(path: &Path, common: &CommonArgs) -> Result<Report, String> {
    let pot = load_potential(path, common)?;
    let mut rep = ValidationReport::new();
    rep.merge("wdvv", check_wdvv(&pot));
    rep.record("flatness", check_flatness(&build_connection(&pot)));
    rep.record("xi", xi_check(&pot));
    Ok(Report::new("check-wdvv", pot.order(), rep))
}

fn build_vhs(path: &Path, common: &CommonArgs) -> Result<Report, String> {
    let pot = load_potential(path, common)?;
    let alg = load(path, pot.classical_algebra())?;
    let bs = pot.basis();
    let mut rep = ValidationReport::new();
    let conn = build_connection(&pot);
    rep.record("connection/flatness", check_flatness(&conn));
    let q = q_from_b(alg.bform(), bs).map_err(|e| e.to_string())?;
    rep.record("connection/q_flatness", check_q_flatness(&conn, &q));
    rep.record("connection/transversality", check_transversality(&conn, bs));
    let residue = conn
        .residues()
        .iter()
        .enumerate()
        .find(|(j, m)| **m != alg.mult_matrix(bs.t2(j + 1)))
        .map(|(j, _)| Witness::indices(&[j]));
    rep.record("connection/residues", residue);

    let orbit = NilpotentOrbitData::from_algebra(&alg).map_err(|e| e.to_string())?;
    rep.merge("orbit", check_nilpotent_orbit(&orbit, &cone_samples(common, orbit.r())));
    rep.merge("max_unipotent", check_max_unipotent(&orbit));

    let mut report = match gamma_from_potential(&pot).and_then(|g| AsymptoticData::new(orbit, g.gamma)) {
        Ok(asym) => {
            let g = asym.g();
            let res = master_equation_residual(asym.orbit(), &g, &asym.gamma_minus_one()).map_err(|e| e.to_string())?;
            let bad = res.iter().position(|m| !m.is_zero()).map(|j| Witness::indices(&[j]));
            rep.record("gamma/master_equation", bad);
            let mut report = Report::new("build-vhs", pot.order(), rep);
            emit(common, &AsymDoc::from_asym(&asym), &mut report)?;
            report
        }
        Err(e) => {
            rep.fail("gamma", error_witness(&e));
            Report::new("build-vhs", pot.order(), rep)
        }
    };
    report.passed = report.checks.passed();
    Ok(report)
}

fn recover_potential(path: &Path, expect: Option<&Path>, common: &CommonArgs) -> Result<Report, String> {
    let asym = load_asym(path, common)?;
    let order = asym.order();
    let mut rep = ValidationReport::new();
    let recovered = asym
        .orbit()
        .limiting_mhs()
        .and_then(|(_, b)| {
            let e0 = b.piece(4).basis().first().cloned().ok_or(Error::NotMaximallyUnipotent("I^(4,4) = 0".into()))?;
            product_from_orbit(asym.orbit(), &e0)
        })
        .and_then(|prod| potential_from_gamma(&asym, &prod));
    let pot = match recovered {
        Ok(p) => {
            rep.pass("recovery");
            p
        }
        Err(e) => {
            rep.fail("recovery", error_witness(&e));
            return Ok(Report::new("recover-potential", order, rep));
        }
    };
    if let Some(expect) = expect {
        let doc: QuantumDoc = read_doc(expect)?;
        let want = load(expect, doc.to_potential(Some(order)))?;
        let w = if want.classical() != pot.classical() {
            Some(Witness::detail("classical part differs"))
        } else {
            pot.psi().iter().zip(want.psi()).position(|(a, b)| a != b).map(|a| Witness::indices(&[a]).with_detail("psi differs"))
        };
        rep.record("roundtrip", w);
    }
    let mut report = Report::new("recover-potential", order, rep);
    emit(common, &QuantumDoc::from_potential(&pot), &mut report)?;
    Ok(report)
}

/// Output of `canonical-coords`: the change and the data in the new
/// coordinates.
#[derive(Debug, Serialize, Deserialize)]
pub struct CanonicalDoc {
    pub change: ChangeDoc,
    pub data: AsymDoc,
}

fn nonzero_rho(asym: &AsymptoticData) -> qvhs::Result<Option<Witness>> {
    let rho = rho_component(asym)?;
    Ok(rho.iter().position(|g| !g.is_zero()).map(|j| {
        let alpha = rho[j].leading_monomial().map(|(a, _)| a.clone()).unwrap_or_default();
        Witness::monomial(&[j], &alpha)
    }))
}

fn canonical_coords(path: &Path, common: &CommonArgs) -> Result<Report, String> {
    let asym = load_asym(path, common)?;
    let order = asym.order();
    let mut rep = ValidationReport::new();
    let (change, canon) = match canonical_coordinates(&asym) {
        Ok(x) => x,
        Err(e) => {
            rep.fail("canonical_coordinates", error_witness(&e));
            return Ok(Report::new("canonical-coords", order, rep));
        }
    };
    rep.pass("canonical_coordinates");
    let simple = change.factors().iter().position(|f| f.constant_term() != Rat::from_integer(1.into()));
    rep.record("simple_change", simple.map(|j| Witness::indices(&[j])));
    rep.record("rho_vanishes", nonzero_rho(&canon).map_err(|e| e.to_string())?);
    let idem = canonical_coordinates(&canon).map(|(c, _)| c.is_identity());
    rep.record("idempotent", (!matches!(idem, Ok(true))).then(|| Witness::detail("second application is not the identity")));
    let mut report = Report::new("canonical-coords", order, rep);
    let doc = CanonicalDoc { change: ChangeDoc::from_change(&change, order), data: AsymDoc::from_asym(&canon) };
    emit(common, &doc, &mut report)?;
    Ok(report)
}

fn cmd_solve_gamma(path: &Path, common: &CommonArgs) -> Result<Report, String> {
    let doc: AsymDoc = read_doc(path)?;
    let orbit = load(path, doc.orbit())?;
    let order = effective_order(common.order, doc.order).map_err(|e| e.to_string())?;
    let r = load(path, doc.r_matrix(&orbit, order))?;
    let mut rep = ValidationReport::new();
    match check_integrability(&orbit, &r) {
        Ok(w) => rep.record("integrability", w),
        Err(e) => {
            rep.fail("input", error_witness(&e));
            return Ok(Report::new("solve-gamma", order, rep));
        }
    }
    let asym = match solve_gamma(&orbit, &r) {
        Ok(a) => {
            rep.pass("solver");
            a
        }
        Err(e) => {
            rep.fail("solver", error_witness(&e));
            return Ok(Report::new("solve-gamma", order, rep));
        }
    };
    let res = master_equation_residual(&orbit, &asym.g(), &r).map_err(|e| e.to_string())?;
    rep.record("master_equation", res.iter().position(|m| !m.is_zero()).map(|j| Witness::indices(&[j])));
    rep.record("p_minus_one", (asym.gamma_minus_one() != r).then(|| Witness::detail("p_-1 block differs from R")));
    let mut report = Report::new("solve-gamma", order, rep);
    let out = GammaDoc { gamma: series_matrix_to_doc(asym.gamma()), residual_max_degree_checked: order };
    emit(common, &out, &mut report)?;
    Ok(report)
}
