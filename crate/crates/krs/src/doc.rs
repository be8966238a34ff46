//! JSON documents: algebras, modules, and certificates. Integers are
//! serialized in decimal and reduced mod p on load; `emit` output is
//! deterministic so identical inputs and seed give byte-identical files.

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::idempotent::{is_local, is_primitive, LocalityVerdict, VerdictMethod};
use crate::krs::{ConjugationCertificate, Decomposition, EquivalenceCertificate};
use crate::matrix::Mat;
use crate::module::{end_algebra, Module, Morphism};
use crate::oracle::{lemma3_check, Lemma3Entry, OracleBudget};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

pub fn mat_rows(m: &Mat) -> Vec<Vec<u64>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn rows_mat(field: Fp, cols: usize, rows: &[Vec<u64>]) -> Result<Mat> {
    Mat::from_rows(field, cols, rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDocument {
    pub p: u64,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_names: Option<Vec<String>>,
    /// dim x dim x dim, constants[i][j][k] = coefficient of b_k in b_i * b_j.
    pub structure_constants: Vec<Vec<Vec<u64>>>,
    pub unit: Vec<u64>,
}

impl AlgebraDocument {
    pub fn from_algebra(a: &Algebra) -> Self {
        let n = a.dim();
        let structure_constants = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| a.constant(i, j, k)).collect())
                    .collect()
            })
            .collect();
        AlgebraDocument {
            p: a.field().p(),
            dim: n,
            basis_names: None,
            structure_constants,
            unit: a.unit().to_vec(),
        }
    }

    pub fn to_algebra(&self) -> Result<Algebra> {
        let field = Fp::new(self.p)?;
        let n = self.dim;
        if self.structure_constants.len() != n {
            return Err(Error::InvalidAlgebra("structure_constants outer length != dim".into()));
        }
        let mut flat = Vec::with_capacity(n * n * n);
        for plane in &self.structure_constants {
            if plane.len() != n {
                return Err(Error::InvalidAlgebra("structure_constants middle length != dim".into()));
            }
            for row in plane {
                if row.len() != n {
                    return Err(Error::InvalidAlgebra("structure_constants inner length != dim".into()));
                }
                flat.extend_from_slice(row);
            }
        }
        if let Some(names) = &self.basis_names {
            if names.len() != n {
                return Err(Error::InvalidAlgebra("basis_names length != dim".into()));
            }
        }
        let a = Algebra::new(field, n, flat, self.unit.clone())?;
        let violations = a.validate();
        if let Some(v) = violations.first() {
            return Err(Error::InvalidAlgebra(format!("{v:?}")));
        }
        Ok(a)
    }
}

/// An algebra given inline or as a path to another JSON file, resolved
/// relative to the referring document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Path(String),
    Inline(AlgebraDocument),
}

impl AlgebraRef {
    pub fn resolve(&self, base_dir: &Path) -> Result<AlgebraDocument> {
        match self {
            AlgebraRef::Inline(doc) => Ok(doc.clone()),
            AlgebraRef::Path(rel) => {
                let text = std::fs::read_to_string(base_dir.join(rel))
                    .map_err(|e| Error::Parse(format!("cannot read {rel}: {e}")))?;
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{rel}: {e}")))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleDocument {
    pub algebra: AlgebraRef,
    pub dim: usize,
    /// One dim x dim matrix per algebra basis element.
    pub action: Vec<Vec<Vec<u64>>>,
}

impl ModuleDocument {
    pub fn from_module(m: &Module) -> Self {
        ModuleDocument {
            algebra: AlgebraRef::Inline(AlgebraDocument::from_algebra(m.algebra())),
            dim: m.dim(),
            action: m.action().iter().map(mat_rows).collect(),
        }
    }

    pub fn to_module(&self, base_dir: &Path) -> Result<Module> {
        let algebra = Arc::new(self.algebra.resolve(base_dir)?.to_algebra()?);
        let f = algebra.field();
        let action = self
            .action
            .iter()
            .map(|rows| {
                if rows.len() != self.dim {
                    return Err(Error::InvalidModule("action matrix row count != dim".into()));
                }
                rows_mat(f, self.dim, rows)
            })
            .collect::<Result<Vec<_>>>()?;
        let m = Module::new(algebra, self.dim, action)?;
        let violations = m.validate();
        if let Some(v) = violations.first() {
            return Err(Error::InvalidModule(v.clone()));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum VerdictMethodDoc {
    Exhaustive,
    MonteCarlo { trials: u32, failure_bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalityDoc {
    pub local: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u64>>,
    #[serde(flatten)]
    pub method: VerdictMethodDoc,
}

impl LocalityDoc {
    pub fn from_verdict(v: &LocalityVerdict) -> Self {
        LocalityDoc {
            local: v.local,
            witness: v.witness.clone(),
            method: match v.method {
                VerdictMethod::Exhaustive => VerdictMethodDoc::Exhaustive,
                VerdictMethod::MonteCarlo { trials, failure_bound } => {
                    VerdictMethodDoc::MonteCarlo { trials, failure_bound }
                }
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummandDoc {
    pub dim: usize,
    pub action: Vec<Vec<Vec<u64>>>,
    /// summand -> parent, dim x parent_dim.
    pub injection: Vec<Vec<u64>>,
    /// parent -> summand, parent_dim x dim.
    pub projection: Vec<Vec<u64>>,
    pub locality: LocalityDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionPayload {
    pub module: ModuleDocument,
    pub summands: Vec<SummandDoc>,
    /// Coordinates of e_j = i_j o p_j in the canonical End basis, present
    /// when the complete primitive orthogonal idempotent set was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idempotent_set: Option<Vec<Vec<u64>>>,
}

impl DecompositionPayload {
    pub fn from_decomposition(d: &Decomposition, idempotent_set: Option<Vec<Vec<u64>>>) -> Self {
        let summands = (0..d.summands.len())
            .map(|j| SummandDoc {
                dim: d.summands[j].dim(),
                action: d.summands[j].action().iter().map(mat_rows).collect(),
                injection: mat_rows(d.injections[j].mat()),
                projection: mat_rows(d.projections[j].mat()),
                locality: LocalityDoc::from_verdict(&d.locality[j]),
            })
            .collect();
        DecompositionPayload {
            module: ModuleDocument::from_module(&d.parent),
            summands,
            idempotent_set,
        }
    }

    pub fn to_decomposition(&self, base_dir: &Path) -> Result<Decomposition> {
        let parent = self.module.to_module(base_dir)?;
        let algebra = Arc::clone(parent.algebra());
        let f = algebra.field();
        let mut summands = Vec::new();
        let mut injections = Vec::new();
        let mut projections = Vec::new();
        let mut locality = Vec::new();
        for s in &self.summands {
            let action = s
                .action
                .iter()
                .map(|rows| rows_mat(f, s.dim, rows))
                .collect::<Result<Vec<_>>>()?;
            let module = Module::new(Arc::clone(&algebra), s.dim, action)?;
            let inj = Morphism::new(
                module.clone(),
                parent.clone(),
                rows_mat(f, parent.dim(), &s.injection)?,
            )?;
            let proj = Morphism::new(
                parent.clone(),
                module.clone(),
                rows_mat(f, s.dim, &s.projection)?,
            )?;
            summands.push(module);
            injections.push(inj);
            projections.push(proj);
            locality.push(LocalityVerdict {
                local: s.locality.local,
                witness: s.locality.witness.clone(),
                method: match s.locality.method {
                    VerdictMethodDoc::Exhaustive => VerdictMethod::Exhaustive,
                    VerdictMethodDoc::MonteCarlo { trials, failure_bound } => {
                        VerdictMethod::MonteCarlo { trials, failure_bound }
                    }
                },
            });
        }
        Ok(Decomposition { parent, summands, injections, projections, locality })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalityPayload {
    /// The module whose endomorphism algebra was analyzed.
    pub module: ModuleDocument,
    /// End(module) in the canonical Hom-basis coordinates.
    pub end_algebra: AlgebraDocument,
    pub verdict: LocalityDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalencePayload {
    pub left: DecompositionPayload,
    pub right: DecompositionPayload,
    pub sigma: Vec<usize>,
    /// isos[j]: left summand j -> right summand sigma[j].
    pub isos: Vec<Vec<Vec<u64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugationPayload {
    pub algebra: AlgebraDocument,
    pub e_set: Vec<Vec<u64>>,
    pub f_set: Vec<Vec<u64>>,
    pub sigma: Vec<usize>,
    pub a: Vec<u64>,
    pub a_inv: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma3EntryDoc {
    pub idempotent: Vec<u64>,
    pub primitive: bool,
    pub corner_trivial: bool,
    pub ideal_indecomposable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Payload {
    pub algebra: AlgebraDocument,
    pub budget: u64,
    pub entries: Vec<Lemma3EntryDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLineDoc {
    pub label: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainTheoremPayload {
    pub modules: Vec<NamedModuleDoc>,
    pub budget: u64,
    pub lines: Vec<CheckLineDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedModuleDoc {
    pub name: String,
    pub module: ModuleDocument,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertKind {
    Decomposition,
    Equivalence,
    Conjugation,
    Locality,
    Lemma3,
    MainTheorem,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub kind: CertKind,
    pub payload: serde_json::Value,
    pub engine_version: String,
    pub seed: u64,
}

fn to_value<T: Serialize>(t: &T) -> Result<serde_json::Value> {
    serde_json::to_value(t).map_err(|e| Error::Parse(e.to_string()))
}

fn from_value<T: for<'de> Deserialize<'de>>(v: &serde_json::Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("payload: {e}")))
}

impl CertificateDocument {
    pub fn new<T: Serialize>(kind: CertKind, payload: &T, seed: u64) -> Result<Self> {
        Ok(CertificateDocument {
            kind,
            payload: to_value(payload)?,
            engine_version: crate::ENGINE_VERSION.to_string(),
            seed,
        })
    }

    pub fn emit(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// Offline recheck: every equation in the certificate is recomputed by
    /// exact arithmetic. Returns the list of checked equations; fails with
    /// the first violated one named.
    pub fn verify(&self, base_dir: &Path, budget: u64) -> Result<Vec<String>> {
        match self.kind {
            CertKind::Decomposition => {
                verify_decomposition(&from_value(&self.payload)?, base_dir, budget)
            }
            CertKind::Equivalence => verify_equivalence(&from_value(&self.payload)?, base_dir, budget),
            CertKind::Conjugation => verify_conjugation(&from_value(&self.payload)?, budget, self.seed),
            CertKind::Locality => verify_locality(&from_value(&self.payload)?, base_dir, budget),
            CertKind::Lemma3 => verify_lemma3(&from_value(&self.payload)?),
            CertKind::MainTheorem => {
                verify_main_theorem_cert(&from_value(&self.payload)?, base_dir, self.seed)
            }
        }
    }
}

fn fail(eq: impl Into<String>) -> Error {
    Error::VerificationFailed(eq.into())
}

fn verify_decomposition(
    payload: &DecompositionPayload,
    base_dir: &Path,
    budget: u64,
) -> Result<Vec<String>> {
    let mut checked = Vec::new();
    let d = payload
        .to_decomposition(base_dir)
        .map_err(|e| fail(format!("decomposition reconstruction: {e}")))?;
    d.verify().map_err(|e| fail(format!("biproduct identities: {e}")))?;
    checked.push("sum i_j p_j = id, p_j i_l = delta_jl, all morphisms intertwine".to_string());
    for (j, v) in d.locality.iter().enumerate() {
        if !v.local {
            return Err(fail(format!("summand {j} verdict is NotLocal")));
        }
        if v.is_exhaustive() {
            let end = end_algebra(&d.summands[j])?;
            let recheck = is_local(&end.algebra, budget, 0)?;
            if !(recheck.local && recheck.is_exhaustive()) {
                return Err(fail(format!("summand {j}: End re-scan is not exhaustively local")));
            }
            checked.push(format!("summand {j}: End(X_{j}) exhaustively local"));
        } else {
            checked.push(format!("summand {j}: Local at Monte Carlo confidence (flagged)"));
        }
    }
    if let Some(set) = &payload.idempotent_set {
        let end = end_algebra(&d.parent)?;
        if set.len() != d.summands.len() {
            return Err(fail("idempotent set size != summand count"));
        }
        for (j, coords) in set.iter().enumerate() {
            let mat = end.matrix_of(coords)?;
            if mat != d.idempotent_matrix(j)? {
                return Err(fail(format!("e_{j} != i_{j} p_{j} in End coordinates")));
            }
        }
        let flags = end.algebra.check_idempotent_set(set)?;
        if !flags.all() {
            return Err(fail("idempotent set not complete orthogonal"));
        }
        for (j, coords) in set.iter().enumerate() {
            let v = is_primitive(&end.algebra, coords, budget, 0)?;
            if !v.primitive {
                return Err(fail(format!("e_{j} not primitive")));
            }
        }
        checked.push(format!(
            "complete orthogonal primitive idempotent set of size {}",
            set.len()
        ));
    }
    Ok(checked)
}

fn verify_locality(payload: &LocalityPayload, base_dir: &Path, budget: u64) -> Result<Vec<String>> {
    let mut checked = Vec::new();
    let m = payload.module.to_module(base_dir)?;
    if m.dim() == 0 {
        return Err(fail("locality certificate on the zero module"));
    }
    let end = end_algebra(&m)?;
    if AlgebraDocument::from_algebra(&end.algebra) != payload.end_algebra {
        return Err(fail("embedded End algebra differs from recomputed End(M)"));
    }
    checked.push("End(M) structure constants match".to_string());
    let e = payload.end_algebra.to_algebra()?;
    match (&payload.verdict.witness, payload.verdict.local) {
        (Some(w), false) => {
            if !e.is_idempotent(w) || e.is_zero_element(w) || e.is_unit_element(w) {
                return Err(fail("witness is not a nontrivial idempotent"));
            }
            checked.push("NotLocal witness w^2 = w, w != 0, w != 1".to_string());
        }
        (None, true) => match payload.verdict.method {
            VerdictMethodDoc::Exhaustive => {
                let recheck = is_local(&e, budget, 0)?;
                if !(recheck.local && recheck.is_exhaustive()) {
                    return Err(fail("exhaustive re-scan contradicts the Local verdict"));
                }
                checked.push("exhaustive re-scan: only trivial idempotents".to_string());
            }
            VerdictMethodDoc::MonteCarlo { .. } => {
                checked.push("Local at Monte Carlo confidence (flagged, not refutable offline)".to_string());
            }
        },
        _ => return Err(fail("verdict shape invalid: witness iff not local")),
    }
    Ok(checked)
}

fn verify_equivalence(
    payload: &EquivalencePayload,
    base_dir: &Path,
    budget: u64,
) -> Result<Vec<String>> {
    let mut checked = Vec::new();
    if payload.left.module != payload.right.module {
        return Err(fail("the two decompositions are not of the same module document"));
    }
    checked.extend(
        verify_decomposition(&payload.left, base_dir, budget)?
            .into_iter()
            .map(|c| format!("left: {c}")),
    );
    checked.extend(
        verify_decomposition(&payload.right, base_dir, budget)?
            .into_iter()
            .map(|c| format!("right: {c}")),
    );
    let left = payload.left.to_decomposition(base_dir)?;
    let right = payload.right.to_decomposition(base_dir)?;
    let f = left.parent.algebra().field();
    if payload.isos.len() != left.summands.len() || payload.sigma.len() != left.summands.len() {
        return Err(fail("sigma/iso arity mismatch"));
    }
    let mut isos = Vec::new();
    for (j, rows) in payload.isos.iter().enumerate() {
        let t = *payload
            .sigma
            .get(j)
            .filter(|&&t| t < right.summands.len())
            .ok_or_else(|| fail("sigma index out of range"))?;
        let mat = rows_mat(f, right.summands[t].dim(), rows)?;
        isos.push(
            Morphism::new(left.summands[j].clone(), right.summands[t].clone(), mat)
                .map_err(|e| fail(format!("iso {j} not an intertwiner: {e}")))?,
        );
    }
    let cert = EquivalenceCertificate { sigma: payload.sigma.clone(), isos };
    cert.verify(&left, &right)
        .map_err(|e| fail(format!("equivalence: {e}")))?;
    checked.push("sigma is a permutation and every iso is an invertible intertwiner".to_string());
    Ok(checked)
}

fn verify_conjugation(payload: &ConjugationPayload, budget: u64, seed: u64) -> Result<Vec<String>> {
    let mut checked = Vec::new();
    let algebra = payload.algebra.to_algebra()?;
    for (name, set) in [("e_set", &payload.e_set), ("f_set", &payload.f_set)] {
        let flags = algebra.check_idempotent_set(set)?;
        if !flags.all() {
            return Err(fail(format!("{name} is not a complete orthogonal idempotent set")));
        }
        for (j, e) in set.iter().enumerate() {
            if !is_primitive(&algebra, e, budget, seed)?.primitive {
                return Err(fail(format!("{name}[{j}] is not primitive")));
            }
        }
        checked.push(format!("{name}: complete orthogonal primitive"));
    }
    let cert = ConjugationCertificate {
        sigma: payload.sigma.clone(),
        a: payload.a.clone(),
        a_inv: payload.a_inv.clone(),
    };
    cert.verify(&algebra, &payload.e_set, &payload.f_set)
        .map_err(|e| fail(format!("conjugation: {e}")))?;
    checked.push("a a_inv = a_inv a = 1".to_string());
    for j in 0..payload.e_set.len() {
        checked.push(format!("f_{} = a e_{j} a_inv", payload.sigma[j]));
    }
    Ok(checked)
}

fn verify_lemma3(payload: &Lemma3Payload) -> Result<Vec<String>> {
    let mut checked = Vec::new();
    let algebra = Arc::new(payload.algebra.to_algebra()?);
    let budget = OracleBudget { max_elements: payload.budget };
    let recomputed = lemma3_check(&algebra, budget)?;
    if recomputed.len() != payload.entries.len() {
        return Err(fail("entry count differs from the exhaustive re-scan"));
    }
    for (j, (got, want)) in recomputed.iter().zip(&payload.entries).enumerate() {
        let Lemma3Entry { idempotent, primitive, corner_trivial, ideal_indecomposable } = got;
        if *idempotent != want.idempotent
            || *primitive != want.primitive
            || *corner_trivial != want.corner_trivial
            || *ideal_indecomposable != want.ideal_indecomposable
        {
            return Err(fail(format!("entry {j} differs from the exhaustive re-scan")));
        }
        if !got.agrees() {
            return Err(fail(format!(
                "entry {j}: the three predicates disagree (theorem violation)"
            )));
        }
        checked.push(format!(
            "idempotent {j}: primitive = corner-trivial = ideal-indecomposable = {}",
            got.primitive
        ));
    }
    Ok(checked)
}

fn verify_main_theorem_cert(
    payload: &MainTheoremPayload,
    base_dir: &Path,
    seed: u64,
) -> Result<Vec<String>> {
    let modules = payload
        .modules
        .iter()
        .map(|nm| Ok((nm.name.clone(), nm.module.to_module(base_dir)?)))
        .collect::<Result<Vec<_>>>()?;
    let report = crate::krs::verify_main_theorem(&modules, seed, payload.budget)?;
    if report.lines.len() != payload.lines.len() {
        return Err(fail("check count differs from the re-run"));
    }
    let mut checked = Vec::new();
    for (got, want) in report.lines.iter().zip(&payload.lines) {
        if got.label != want.label || got.passed != want.passed {
            return Err(fail(format!("check '{}' differs from the re-run", want.label)));
        }
        if !got.passed {
            return Err(fail(format!("check '{}' failed", got.label)));
        }
        checked.push(got.label.clone());
    }
    Ok(checked)
}
