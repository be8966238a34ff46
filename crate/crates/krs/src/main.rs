use clap::{Args, Parser, Subcommand};
use krs::doc::{
    mat_rows, AlgebraDocument, CertKind, CertificateDocument, CheckLineDoc, ConjugationPayload,
    DecompositionPayload, EquivalencePayload, Lemma3EntryDoc, Lemma3Payload, LocalityDoc,
    LocalityPayload, MainTheoremPayload, ModuleDocument, NamedModuleDoc,
};
use krs::error::Error;
use krs::idempotent::is_local;
use krs::krs::{
    check_equivalence, conjugator, idempotents_from_decomposition, krs_decompose,
    verify_main_theorem, Decomposition,
};
use krs::module::end_algebra;
use krs::oracle::{lemma3_check, oracle_decompose, OracleBudget};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

const DEFAULT_BUDGET: u64 = 1 << 16;
const DEFAULT_TRIALS: u32 = 128;

/// Exact Krull-Remak-Schmidt decompositions over prime fields, with
/// machine-checkable certificates.
#[derive(Parser)]
#[command(name = "krs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// All randomness flows from this seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exhaustive scans run only when p^dim <= budget.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random trials per isomorphism search when enumeration is infeasible.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Check algebra/module/certificate documents against their invariants.
    Validate { paths: Vec<PathBuf> },
    /// Decompose a module into summands with local endomorphism algebras.
    Decompose {
        module: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Analyze End(M): one module gives a locality certificate; several
    /// modules give the full main-theorem report over them.
    Endo {
        modules: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Decompose and emit the complete primitive orthogonal idempotent set.
    Idempotents {
        module: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Certify two decomposition certificates equivalent.
    Equiv {
        cert1: PathBuf,
        cert2: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Conjugate one complete primitive orthogonal idempotent set to another.
    Conjugate {
        algebra: PathBuf,
        /// JSON array of idempotent coordinate vectors.
        idems1: PathBuf,
        idems2: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive ground truth: lemma3 report for an algebra, brute-force
    /// decomposition for a module.
    Oracle {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Recheck a certificate offline; extra inputs must match the embedded
    /// documents.
    Verify {
        certificate: PathBuf,
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::BudgetExceeded(_) => 4,
        Error::IsoSearchInconclusive | Error::InconclusiveLocality => 3,
        _ => 1,
    }
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn read_json(path: &Path) -> Result<serde_json::Value, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_module(path: &Path) -> Result<krs::module::Module, Error> {
    let doc: ModuleDocument = serde_json::from_value(read_json(path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    doc.to_module(&base_dir(path))
}

fn emit(cert: &CertificateDocument, out: &Option<PathBuf>) -> Result<(), Error> {
    let text = cert.emit()?;
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn decomposition_flagged(d: &Decomposition) -> bool {
    !d.fully_certified()
}

fn cmd_validate(paths: &[PathBuf]) -> Result<u8, Error> {
    let mut failures = 0;
    for path in paths {
        let value = read_json(path)?; // malformed JSON -> exit 2
        let report: Result<String, String> = if value.get("kind").is_some() {
            serde_json::from_value::<CertificateDocument>(value)
                .map(|c| format!("certificate ({:?})", c.kind))
                .map_err(|e| e.to_string())
        } else if value.get("action").is_some() {
            serde_json::from_value::<ModuleDocument>(value)
                .map_err(|e| e.to_string())
                .and_then(|d| {
                    d.to_module(&base_dir(path))
                        .map(|m| format!("module (dim {})", m.dim()))
                        .map_err(|e| e.to_string())
                })
        } else {
            serde_json::from_value::<AlgebraDocument>(value)
                .map_err(|e| e.to_string())
                .and_then(|d| {
                    d.to_algebra()
                        .map(|a| format!("algebra (p={}, dim {})", a.field().p(), a.dim()))
                        .map_err(|e| e.to_string())
                })
        };
        match report {
            Ok(kind) => println!("ok   {}: {kind}", path.display()),
            Err(msg) => {
                println!("FAIL {}: {msg}", path.display());
                failures += 1;
            }
        }
    }
    Ok(if failures == 0 { 0 } else { 1 })
}

fn cmd_decompose(
    module_path: &Path,
    common: &Common,
    with_idempotents: bool,
) -> Result<u8, Error> {
    let m = load_module(module_path)?;
    let d = krs_decompose(&m, common.seed, common.budget)?;
    let set = if with_idempotents && m.dim() > 0 {
        Some(idempotents_from_decomposition(&d, common.budget, common.seed)?.elements)
    } else {
        None
    };
    let payload = DecompositionPayload::from_decomposition(&d, set);
    let cert = CertificateDocument::new(CertKind::Decomposition, &payload, common.seed)?;
    emit(&cert, &common.out)?;
    Ok(if decomposition_flagged(&d) { 3 } else { 0 })
}

fn cmd_endo(paths: &[PathBuf], common: &Common) -> Result<u8, Error> {
    if paths.is_empty() {
        return Err(Error::Parse("endo needs at least one module file".into()));
    }
    if paths.len() == 1 {
        let m = load_module(&paths[0])?;
        let end = end_algebra(&m)?;
        let verdict = is_local(&end.algebra, common.budget, common.seed)?;
        let flagged = !verdict.is_exhaustive();
        let payload = LocalityPayload {
            module: ModuleDocument::from_module(&m),
            end_algebra: AlgebraDocument::from_algebra(&end.algebra),
            verdict: LocalityDoc::from_verdict(&verdict),
        };
        let cert = CertificateDocument::new(CertKind::Locality, &payload, common.seed)?;
        emit(&cert, &common.out)?;
        return Ok(if flagged { 3 } else { 0 });
    }
    let mut modules = Vec::new();
    let mut named = Vec::new();
    for path in paths {
        let m = load_module(path)?;
        let name = path.display().to_string();
        named.push(NamedModuleDoc { name: name.clone(), module: ModuleDocument::from_module(&m) });
        modules.push((name, m));
    }
    let report = verify_main_theorem(&modules, common.seed, common.budget)?;
    let payload = MainTheoremPayload {
        modules: named,
        budget: common.budget,
        lines: report
            .lines
            .iter()
            .map(|l| CheckLineDoc { label: l.label.clone(), passed: l.passed })
            .collect(),
    };
    let cert = CertificateDocument::new(CertKind::MainTheorem, &payload, common.seed)?;
    emit(&cert, &common.out)?;
    Ok(if report.all_passed() { 0 } else { 1 })
}

fn load_decomposition_cert(path: &Path) -> Result<(DecompositionPayload, Decomposition), Error> {
    let cert = CertificateDocument::load(path)?;
    if cert.kind != CertKind::Decomposition {
        return Err(Error::Parse(format!(
            "{}: expected a decomposition certificate",
            path.display()
        )));
    }
    let payload: DecompositionPayload = serde_json::from_value(cert.payload)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let d = payload.to_decomposition(&base_dir(path))?;
    Ok((payload, d))
}

fn cmd_equiv(cert1: &Path, cert2: &Path, common: &Common) -> Result<u8, Error> {
    let (p1, d1) = load_decomposition_cert(cert1)?;
    let (p2, d2) = load_decomposition_cert(cert2)?;
    if p1.module != p2.module {
        return Err(Error::MatchingFailed(
            "certificates decompose different module documents".into(),
        ));
    }
    let eq = check_equivalence(&d1, &d2, common.seed, common.trials)?;
    let payload = EquivalencePayload {
        left: p1,
        right: p2,
        sigma: eq.sigma.clone(),
        isos: eq.isos.iter().map(|m| mat_rows(m.mat())).collect(),
    };
    let cert = CertificateDocument::new(CertKind::Equivalence, &payload, common.seed)?;
    emit(&cert, &common.out)?;
    Ok(0)
}

fn load_idempotent_sets(path: &Path) -> Result<Vec<Vec<u64>>, Error> {
    serde_json::from_value(read_json(path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn cmd_conjugate(
    algebra_path: &Path,
    idems1: &Path,
    idems2: &Path,
    common: &Common,
) -> Result<u8, Error> {
    let doc: AlgebraDocument = serde_json::from_value(read_json(algebra_path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", algebra_path.display())))?;
    let algebra = Arc::new(doc.to_algebra()?);
    let e_set = load_idempotent_sets(idems1)?;
    let f_set = load_idempotent_sets(idems2)?;
    let c = conjugator(&algebra, &e_set, &f_set, common.seed, common.budget, common.trials)?;
    let payload = ConjugationPayload {
        algebra: doc,
        e_set,
        f_set,
        sigma: c.sigma,
        a: c.a,
        a_inv: c.a_inv,
    };
    let cert = CertificateDocument::new(CertKind::Conjugation, &payload, common.seed)?;
    emit(&cert, &common.out)?;
    Ok(0)
}

fn cmd_oracle(input: &Path, common: &Common) -> Result<u8, Error> {
    let value = read_json(input)?;
    let budget = OracleBudget { max_elements: common.budget };
    if value.get("action").is_some() {
        let doc: ModuleDocument = serde_json::from_value(value)
            .map_err(|e| Error::Parse(format!("{}: {e}", input.display())))?;
        let m = doc.to_module(&base_dir(input))?;
        let d = oracle_decompose(&m, budget)?;
        let payload = DecompositionPayload::from_decomposition(&d, None);
        let cert = CertificateDocument::new(CertKind::Decomposition, &payload, common.seed)?;
        emit(&cert, &common.out)?;
        return Ok(0);
    }
    let doc: AlgebraDocument = serde_json::from_value(value)
        .map_err(|e| Error::Parse(format!("{}: {e}", input.display())))?;
    let algebra = Arc::new(doc.to_algebra()?);
    let entries = lemma3_check(&algebra, budget)?;
    let payload = Lemma3Payload {
        algebra: doc,
        budget: common.budget,
        entries: entries
            .iter()
            .map(|e| Lemma3EntryDoc {
                idempotent: e.idempotent.clone(),
                primitive: e.primitive,
                corner_trivial: e.corner_trivial,
                ideal_indecomposable: e.ideal_indecomposable,
            })
            .collect(),
    };
    let cert = CertificateDocument::new(CertKind::Lemma3, &payload, common.seed)?;
    emit(&cert, &common.out)?;
    Ok(0)
}

/// Documents embedded in a certificate payload that supplied inputs may be
/// checked against, normalized: modules with the algebra resolved inline.
fn embedded_docs(cert: &CertificateDocument) -> (Vec<ModuleDocument>, Vec<AlgebraDocument>) {
    let p = &cert.payload;
    let mut module_values = Vec::new();
    let mut algebra_values = Vec::new();
    if let Some(v) = p.get("module") {
        module_values.push(v.clone());
    }
    for key in ["algebra", "end_algebra"] {
        if let Some(v) = p.get(key) {
            algebra_values.push(v.clone());
        }
    }
    for side in ["left", "right"] {
        if let Some(v) = p.get(side).and_then(|s| s.get("module")) {
            module_values.push(v.clone());
        }
    }
    if let Some(mods) = p.get("modules").and_then(|m| m.as_array()) {
        for nm in mods {
            if let Some(v) = nm.get("module") {
                module_values.push(v.clone());
            }
        }
    }
    let modules: Vec<ModuleDocument> = module_values
        .into_iter()
        .filter_map(|v| serde_json::from_value(v).ok())
        .collect();
    let mut algebras: Vec<AlgebraDocument> = algebra_values
        .into_iter()
        .filter_map(|v| serde_json::from_value(v).ok())
        .collect();
    for m in &modules {
        if let krs::doc::AlgebraRef::Inline(a) = &m.algebra {
            algebras.push(a.clone());
        }
    }
    (modules, algebras)
}

fn cmd_verify(cert_path: &Path, inputs: &[PathBuf], common: &Common) -> Result<u8, Error> {
    let cert = CertificateDocument::load(cert_path)?;
    let (modules, algebras) = embedded_docs(&cert);
    for input in inputs {
        let value = read_json(input)?;
        let matched = if value.get("action").is_some() {
            let doc: ModuleDocument = serde_json::from_value(value)
                .map_err(|e| Error::Parse(format!("{}: {e}", input.display())))?;
            // normalize: resolve the algebra reference inline
            let resolved = krs::doc::AlgebraRef::Inline(doc.algebra.resolve(&base_dir(input))?);
            let normalized = ModuleDocument { algebra: resolved, ..doc };
            modules.iter().any(|m| {
                m.dim == normalized.dim
                    && m.action == normalized.action
                    && match (&m.algebra, &normalized.algebra) {
                        (krs::doc::AlgebraRef::Inline(a), krs::doc::AlgebraRef::Inline(b)) => {
                            a == b
                        }
                        _ => false,
                    }
            })
        } else {
            let doc: AlgebraDocument = serde_json::from_value(value)
                .map_err(|e| Error::Parse(format!("{}: {e}", input.display())))?;
            algebras.contains(&doc)
        };
        if !matched {
            return Err(Error::VerificationFailed(format!(
                "{} does not match any document embedded in the certificate",
                input.display()
            )));
        }
    }
    let checked = cert.verify(&base_dir(cert_path), common.budget)?;
    for line in &checked {
        println!("checked: {line}");
    }
    println!("ok: {} equations re-verified", checked.len());
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Validate { paths } => cmd_validate(paths),
        Command::Decompose { module, common } => cmd_decompose(module, common, false),
        Command::Idempotents { module, common } => cmd_decompose(module, common, true),
        Command::Endo { modules, common } => cmd_endo(modules, common),
        Command::Equiv { cert1, cert2, common } => cmd_equiv(cert1, cert2, common),
        Command::Conjugate { algebra, idems1, idems2, common } => {
            cmd_conjugate(algebra, idems1, idems2, common)
        }
        Command::Oracle { input, common } => cmd_oracle(input, common),
        Command::Verify { certificate, inputs, common } => cmd_verify(certificate, inputs, common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
