use crate::algebra::{element_count, index_to_element, Algebra};
use crate::error::{Error, Result};
use crate::idempotent::{
    is_local, is_primitive, split_idempotent, LocalityVerdict, PrimitivityVerdict,
};
use crate::matrix::Mat;
use crate::module::{
    direct_sum_over, end_algebra, find_isomorphism, right_ideal_module, EndAlgebra, IsoResult,
    Module, Morphism,
};
use std::sync::Arc;

/// A direct sum decomposition with full certificates: injections,
/// projections, and one locality verdict per summand's endomorphism algebra.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub parent: Module,
    pub summands: Vec<Module>,
    /// injections[j]: summand_j -> parent.
    pub injections: Vec<Morphism>,
    /// projections[j]: parent -> summand_j.
    pub projections: Vec<Morphism>,
    pub locality: Vec<LocalityVerdict>,
}

impl Decomposition {
    /// Endomorphism matrix of e_j = i_j o p_j (apply the projection, then the
    /// injection).
    pub fn idempotent_matrix(&self, j: usize) -> Result<Mat> {
        self.projections[j].mat().mul(self.injections[j].mat())
    }

    /// Re-checks every biproduct identity and that all verdicts are Local.
    pub fn verify(&self) -> Result<()> {
        let n = self.summands.len();
        if self.injections.len() != n || self.projections.len() != n || self.locality.len() != n {
            return Err(Error::InvalidDecomposition("certificate arity mismatch".into()));
        }
        if n == 0 && self.parent.dim() != 0 {
            return Err(Error::InvalidDecomposition(
                "empty summand list on a nonzero module".into(),
            ));
        }
        let f = self.parent.algebra().field();
        let mut total = Mat::zero(f, self.parent.dim(), self.parent.dim());
        for j in 0..n {
            if !self.summands[j].is_valid() {
                return Err(Error::InvalidDecomposition(format!("summand {j} invalid")));
            }
            if !self.injections[j].is_intertwiner() || !self.projections[j].is_intertwiner() {
                return Err(Error::InvalidDecomposition(format!(
                    "injection/projection {j} not a morphism"
                )));
            }
            for l in 0..n {
                // p_j o i_l: summand_l -> summand_j
                let comp = self.injections[l].mat().mul(self.projections[j].mat())?;
                if j == l {
                    if !comp.is_identity() {
                        return Err(Error::InvalidDecomposition(format!("p_{j} i_{j} != id")));
                    }
                } else if !comp.is_zero() {
                    return Err(Error::InvalidDecomposition(format!("p_{j} i_{l} != 0")));
                }
            }
            total = total.add(&self.idempotent_matrix(j)?)?;
            if !self.locality[j].local {
                return Err(Error::InvalidDecomposition(format!(
                    "summand {j} has a NotLocal verdict"
                )));
            }
        }
        if n > 0 && !total.is_identity() {
            return Err(Error::InvalidDecomposition("sum of i_j p_j != id".into()));
        }
        Ok(())
    }

    /// True if every locality verdict was reached exhaustively.
    pub fn fully_certified(&self) -> bool {
        self.locality.iter().all(|v| v.is_exhaustive())
    }
}

/// What a decomposition probe reports about one module: either a nontrivial
/// idempotent endomorphism to split along, or a terminal locality verdict.
pub enum ProbeResult {
    Split(Morphism),
    Terminal(LocalityVerdict),
}

/// Generic recursive splitter shared by the engine and the brute oracle;
/// only the idempotent discovery differs.
pub fn decompose_with(
    m: &Module,
    probe: &mut dyn FnMut(&Module) -> Result<ProbeResult>,
) -> Result<Decomposition> {
    if m.dim() == 0 {
        return Ok(Decomposition {
            parent: m.clone(),
            summands: vec![],
            injections: vec![],
            projections: vec![],
            locality: vec![],
        });
    }
    match probe(m)? {
        ProbeResult::Terminal(verdict) => Ok(Decomposition {
            parent: m.clone(),
            summands: vec![m.clone()],
            injections: vec![Morphism::identity(m)],
            projections: vec![Morphism::identity(m)],
            locality: vec![verdict],
        }),
        ProbeResult::Split(e) => {
            let (d1, d2) = split_idempotent(m, &e)?;
            let mut summands = Vec::new();
            let mut injections = Vec::new();
            let mut projections = Vec::new();
            let mut locality = Vec::new();
            for datum in [d1, d2] {
                let child = decompose_with(&datum.summand, probe)?;
                for j in 0..child.summands.len() {
                    summands.push(child.summands[j].clone());
                    injections.push(child.injections[j].then(&datum.section)?);
                    projections.push(datum.retraction.then(&child.projections[j])?);
                    locality.push(child.locality[j].clone());
                }
            }
            Ok(Decomposition {
                parent: m.clone(),
                summands,
                injections,
                projections,
                locality,
            })
        }
    }
}

/// Krull-Remak-Schmidt decomposition: recursively split along nontrivial
/// idempotents of End until every summand's endomorphism algebra is
/// certified local.
pub fn krs_decompose(m: &Module, seed: u64, budget: u64) -> Result<Decomposition> {
    if !m.is_valid() {
        return Err(Error::InvalidModule("krs_decompose on invalid module".into()));
    }
    let mut counter = 0u64;
    decompose_with(m, &mut |summand| {
        let end = end_algebra(summand)?;
        counter += 1;
        let child_seed = seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(counter);
        let verdict = is_local(&end.algebra, budget, child_seed)?;
        match &verdict.witness {
            Some(w) => {
                let mat = end.matrix_of(w)?;
                Ok(ProbeResult::Split(Morphism::new_unchecked(
                    summand.clone(),
                    summand.clone(),
                    mat,
                )?))
            }
            None => Ok(ProbeResult::Terminal(verdict)),
        }
    })
}

/// Permutation and invertible intertwiners witnessing equivalence of two
/// decompositions: isos[j] maps left summand j to right summand sigma[j].
#[derive(Debug, Clone)]
pub struct EquivalenceCertificate {
    pub sigma: Vec<usize>,
    pub isos: Vec<Morphism>,
}

impl EquivalenceCertificate {
    pub fn verify(&self, left: &Decomposition, right: &Decomposition) -> Result<()> {
        let n = left.summands.len();
        if right.summands.len() != n || self.sigma.len() != n || self.isos.len() != n {
            return Err(Error::VerificationFailed("equivalence arity mismatch".into()));
        }
        let mut seen = vec![false; n];
        for j in 0..n {
            let t = self.sigma[j];
            if t >= n || seen[t] {
                return Err(Error::VerificationFailed("sigma is not a permutation".into()));
            }
            seen[t] = true;
            let iso = &self.isos[j];
            if iso.source() != &left.summands[j] || iso.target() != &right.summands[t] {
                return Err(Error::VerificationFailed(format!("iso {j} endpoints wrong")));
            }
            if !iso.is_intertwiner() || !iso.is_isomorphism() {
                return Err(Error::VerificationFailed(format!("iso {j} not invertible")));
            }
        }
        Ok(())
    }
}

/// Trials used per isomorphism search in matching procedures.
pub const MATCH_TRIALS: u32 = 128;

/// Matches the summands of two decompositions pairwise up to isomorphism.
/// Greedy matching is complete here because isomorphism is transitive.
pub fn check_equivalence(
    left: &Decomposition,
    right: &Decomposition,
    seed: u64,
    trials: u32,
) -> Result<EquivalenceCertificate> {
    let n = left.summands.len();
    if right.summands.len() != n {
        return Err(Error::MatchingFailed(format!(
            "summand counts differ ({} vs {}): theorem-level inconsistency for valid inputs",
            n,
            right.summands.len()
        )));
    }
    let mut used = vec![false; n];
    let mut sigma = vec![0usize; n];
    let mut isos: Vec<Option<Morphism>> = vec![None; n];
    for j in 0..n {
        let mut inconclusive = false;
        for l in 0..n {
            if used[l] || left.summands[j].dim() != right.summands[l].dim() {
                continue;
            }
            match find_isomorphism(&left.summands[j], &right.summands[l], seed, trials)? {
                IsoResult::Iso(iso) => {
                    used[l] = true;
                    sigma[j] = l;
                    isos[j] = Some(iso);
                    break;
                }
                IsoResult::Inconclusive => inconclusive = true,
                IsoResult::NotIsomorphic => {}
            }
        }
        if isos[j].is_none() {
            return if inconclusive {
                Err(Error::IsoSearchInconclusive)
            } else {
                Err(Error::MatchingFailed(format!("no partner for left summand {j}")))
            };
        }
    }
    let cert = EquivalenceCertificate {
        sigma,
        isos: isos.into_iter().map(|o| o.expect("filled above")).collect(),
    };
    cert.verify(left, right)?;
    Ok(cert)
}

/// The complete set of primitive orthogonal idempotents e_j = i_j p_j inside
/// End(parent), with per-element primitivity verdicts.
#[derive(Debug)]
pub struct CompleteIdempotentSet {
    pub end: EndAlgebra,
    pub elements: Vec<Vec<u64>>,
    pub primitivity: Vec<PrimitivityVerdict>,
}

pub fn idempotents_from_decomposition(
    d: &Decomposition,
    budget: u64,
    seed: u64,
) -> Result<CompleteIdempotentSet> {
    d.verify()?;
    let end = end_algebra(&d.parent)?;
    let mut elements = Vec::with_capacity(d.summands.len());
    for j in 0..d.summands.len() {
        let mat = d.idempotent_matrix(j)?;
        let coords = end
            .coords_of(&mat)?
            .ok_or_else(|| Error::InvalidDecomposition(format!("e_{j} not in End span")))?;
        elements.push(coords);
    }
    let flags = end.algebra.check_idempotent_set(&elements)?;
    if !flags.all() {
        return Err(Error::InvalidDecomposition(
            "i_j p_j do not form a complete orthogonal idempotent set".into(),
        ));
    }
    let mut primitivity = Vec::with_capacity(elements.len());
    for e in &elements {
        let v = is_primitive(&end.algebra, e, budget, seed)?;
        if !v.primitive {
            return Err(Error::InvalidDecomposition(
                "a summand idempotent is not primitive".into(),
            ));
        }
        primitivity.push(v);
    }
    Ok(CompleteIdempotentSet { end, elements, primitivity })
}

/// Unit a with a * a_inv = 1 and f_{sigma(j)} = a * e_j * a_inv, witnessing
/// conjugacy of two complete primitive orthogonal idempotent sets.
#[derive(Debug, Clone)]
pub struct ConjugationCertificate {
    pub sigma: Vec<usize>,
    pub a: Vec<u64>,
    pub a_inv: Vec<u64>,
}

impl ConjugationCertificate {
    pub fn verify(
        &self,
        algebra: &Algebra,
        e_set: &[Vec<u64>],
        f_set: &[Vec<u64>],
    ) -> Result<()> {
        let n = e_set.len();
        if f_set.len() != n || self.sigma.len() != n {
            return Err(Error::VerificationFailed("conjugation arity mismatch".into()));
        }
        let mut seen = vec![false; n];
        for &t in &self.sigma {
            if t >= n || seen[t] {
                return Err(Error::VerificationFailed("sigma is not a permutation".into()));
            }
            seen[t] = true;
        }
        let unit = algebra.unit().to_vec();
        if algebra.mul(&self.a, &self.a_inv) != unit || algebra.mul(&self.a_inv, &self.a) != unit {
            return Err(Error::VerificationFailed("a * a_inv != 1".into()));
        }
        for (j, e) in e_set.iter().enumerate() {
            let conj = algebra.mul(&algebra.mul(&self.a, e), &self.a_inv);
            if conj != f_set[self.sigma[j]] {
                return Err(Error::VerificationFailed(format!(
                    "f_sigma({j}) != a e_{j} a_inv"
                )));
            }
        }
        Ok(())
    }
}

/// Builds the conjugating unit a = sum_j x_j from mutually inverse pairs
/// x_j in f_{sigma(j)} L e_j, y_j in e_j L f_{sigma(j)} extracted from
/// isomorphisms of the right ideals e_j L and f_{sigma(j)} L.
pub fn conjugator(
    algebra: &Arc<Algebra>,
    e_set: &[Vec<u64>],
    f_set: &[Vec<u64>],
    seed: u64,
    budget: u64,
    trials: u32,
) -> Result<ConjugationCertificate> {
    for (name, set) in [("first", e_set), ("second", f_set)] {
        let flags = algebra.check_idempotent_set(set)?;
        if !flags.all() {
            return Err(Error::NotCompleteOrthogonalPrimitive(format!(
                "{name} set is not a complete orthogonal idempotent set"
            )));
        }
        for e in set {
            if !is_primitive(algebra, e, budget, seed)?.primitive {
                return Err(Error::NotCompleteOrthogonalPrimitive(format!(
                    "{name} set contains a non-primitive idempotent"
                )));
            }
        }
    }
    let n = e_set.len();
    if f_set.len() != n {
        return Err(Error::MatchingFailed(format!(
            "idempotent set sizes differ ({n} vs {}): contradicts uniqueness for valid inputs",
            f_set.len()
        )));
    }
    let e_ideals: Vec<_> = e_set
        .iter()
        .map(|e| right_ideal_module(algebra, e))
        .collect::<Result<Vec<_>>>()?;
    let f_ideals: Vec<_> = f_set
        .iter()
        .map(|f| right_ideal_module(algebra, f))
        .collect::<Result<Vec<_>>>()?;
    let mut used = vec![false; n];
    let mut sigma = vec![0usize; n];
    let mut a = algebra.zero_element();
    let mut a_inv = algebra.zero_element();
    for (j, (e_ideal, e_incl)) in e_ideals.iter().enumerate() {
        let mut found = false;
        let mut inconclusive = false;
        for (l, (f_ideal, f_incl)) in f_ideals.iter().enumerate() {
            if used[l] || e_ideal.dim() != f_ideal.dim() {
                continue;
            }
            let iso = match find_isomorphism(e_ideal, f_ideal, seed, trials)? {
                IsoResult::Iso(iso) => iso,
                IsoResult::Inconclusive => {
                    inconclusive = true;
                    continue;
                }
                IsoResult::NotIsomorphic => continue,
            };
            // x_j = theta(e_j), y_j = theta^{-1}(f_l), both inside Lambda
            let e_red = e_incl.mat().row_reduce();
            let e_coords = e_incl
                .mat()
                .coords_in_echelon_rows(&e_red.pivots, &e_set[j])?
                .ok_or_else(|| Error::InvalidAlgebra("e_j outside its own ideal".into()))?;
            let x = f_incl.mat().apply_row(&iso.mat().apply_row(&e_coords)?)?;
            let f_red = f_incl.mat().row_reduce();
            let f_coords = f_incl
                .mat()
                .coords_in_echelon_rows(&f_red.pivots, &f_set[l])?
                .ok_or_else(|| Error::InvalidAlgebra("f_l outside its own ideal".into()))?;
            let theta_inv = iso.mat().invert()?;
            let y = e_incl.mat().apply_row(&theta_inv.apply_row(&f_coords)?)?;
            // sanity: x y = f_l and y x = e_j
            if algebra.mul(&x, &y) != f_set[l] || algebra.mul(&y, &x) != e_set[j] {
                return Err(Error::MatchingFailed(
                    "extracted pair does not satisfy the inverse relations".into(),
                ));
            }
            used[l] = true;
            sigma[j] = l;
            a = algebra.add(&a, &x);
            a_inv = algebra.add(&a_inv, &y);
            found = true;
            break;
        }
        if !found {
            return if inconclusive {
                Err(Error::IsoSearchInconclusive)
            } else {
                Err(Error::MatchingFailed(format!(
                    "no isomorphic partner ideal for e_{j}: contradicts uniqueness for valid inputs"
                )))
            };
        }
    }
    let cert = ConjugationCertificate { sigma, a, a_inv };
    cert.verify(algebra, e_set, f_set)?;
    Ok(cert)
}

/// Given a KRS decomposition of X and a direct summand X' (as a split
/// idempotent), selects indices of summands whose direct sum with X' is
/// isomorphic to X, and returns the explicit verifying isomorphism.
pub fn cancel_complement(
    d: &Decomposition,
    x_prime: &crate::idempotent::SplitDatum,
    seed: u64,
    budget: u64,
) -> Result<(Vec<usize>, Morphism)> {
    d.verify()?;
    let x = &d.parent;
    if x_prime.e.source() != x {
        return Err(Error::InvalidDecomposition("split datum on a different parent".into()));
    }
    // complement summand: split along the same idempotent again
    let (_, comp) = split_idempotent(x, &x_prime.e)?;
    let comp_dec = krs_decompose(&comp.summand, seed, budget)?;
    // match complement KRS summands injectively into d's summands
    let mut used = vec![false; d.summands.len()];
    let mut selected = Vec::new();
    let mut isos = Vec::new();
    for cs in &comp_dec.summands {
        let mut found = false;
        for (idx, s) in d.summands.iter().enumerate() {
            if used[idx] || s.dim() != cs.dim() {
                continue;
            }
            if let IsoResult::Iso(iso) = find_isomorphism(s, cs, seed, MATCH_TRIALS)? {
                used[idx] = true;
                selected.push(idx);
                isos.push(iso);
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::MatchingFailed(
                "complement summand has no partner in the decomposition".into(),
            ));
        }
    }
    // assemble theta: (sum of selected summands) ++ X' -> X
    let mut parts: Vec<Module> = selected.iter().map(|&i| d.summands[i].clone()).collect();
    parts.push(x_prime.summand.clone());
    let (sum, _, projections) = direct_sum_over(x.algebra(), &parts)?;
    let f = x.algebra().field();
    let mut theta = Mat::zero(f, sum.dim(), x.dim());
    for (m, iso) in isos.iter().enumerate() {
        // selected part -> complement summand -> complement -> X
        let block = projections[m]
            .then(iso)?
            .then(&comp_dec.injections[m])?
            .then(&comp.section)?;
        theta = theta.add(block.mat())?;
    }
    let block = projections[selected.len()].then(&x_prime.section)?;
    theta = theta.add(block.mat())?;
    let theta = Morphism::new_unchecked(sum, x.clone(), theta)?;
    if !theta.is_intertwiner() || !theta.is_isomorphism() {
        return Err(Error::MatchingFailed(
            "assembled cancellation map is not an isomorphism".into(),
        ));
    }
    Ok((selected, theta))
}

/// One line of the main-theorem report.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub label: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Default)]
pub struct MainTheoremReport {
    pub lines: Vec<CheckLine>,
}

impl MainTheoremReport {
    pub fn all_passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    fn push(&mut self, label: String, passed: bool) {
        self.lines.push(CheckLine { label, passed });
    }
}

/// Runs the executable form of the main theorem over a corpus of modules:
/// (a) every module decomposes, (b) sampled idempotents of End split and
/// round-trip, (c) End local iff KRS length 1 on each summand and on the
/// module itself, (d) KRS length equals the size of the complete primitive
/// orthogonal idempotent set.
pub fn verify_main_theorem(
    modules: &[(String, Module)],
    seed: u64,
    budget: u64,
) -> Result<MainTheoremReport> {
    let mut report = MainTheoremReport::default();
    for (name, m) in modules {
        if !m.is_valid() {
            report.push(format!("{name}: module valid"), false);
            continue;
        }
        let dec = match krs_decompose(m, seed, budget) {
            Ok(d) => d,
            Err(_) => {
                report.push(format!("{name}: krs_decompose succeeds"), false);
                continue;
            }
        };
        report.push(
            format!("{name}: krs_decompose succeeds and verifies"),
            dec.verify().is_ok()
                && dec.summands.iter().map(Module::dim).sum::<usize>() == m.dim(),
        );
        if m.dim() == 0 {
            report.push(format!("{name}: zero module has empty decomposition"), dec.summands.is_empty());
            continue;
        }
        // (b) split idempotents: sample End idempotents
        let end = end_algebra(m)?;
        let mut split_ok = true;
        for e_coords in sample_end_idempotents(&end, &dec, budget)? {
            let e = Morphism::new_unchecked(m.clone(), m.clone(), end.matrix_of(&e_coords)?)?;
            match split_idempotent(m, &e) {
                Ok((d1, d2)) => {
                    let ok = d1.verify()
                        && d2.verify()
                        && d1.summand.dim() + d2.summand.dim() == m.dim()
                        && d1
                            .section
                            .mat()
                            .vstack(d2.section.mat())
                            .map(|b| b.is_invertible())
                            .unwrap_or(false);
                    if !ok {
                        split_ok = false;
                    }
                }
                Err(_) => split_ok = false,
            }
        }
        report.push(format!("{name}: sampled idempotents split and round-trip"), split_ok);
        // (c) locality iff indecomposability
        let mut loc_ok = true;
        let mut targets: Vec<Module> = vec![m.clone()];
        targets.extend(dec.summands.iter().cloned());
        for t in &targets {
            if t.dim() == 0 {
                continue;
            }
            let e = end_algebra(t)?;
            let local = is_local(&e.algebra, budget, seed)?.local;
            let len = krs_decompose(t, seed, budget)?.summands.len();
            if local != (len == 1) {
                loc_ok = false;
            }
        }
        report.push(format!("{name}: End local iff indecomposable"), loc_ok);
        // (d) KRS length equals complete primitive orthogonal set size
        let size_ok = idempotents_from_decomposition(&dec, budget, seed)
            .map(|set| set.elements.len() == dec.summands.len())
            .unwrap_or(false);
        report.push(format!("{name}: KRS length = primitive idempotent set size"), size_ok);
    }
    Ok(report)
}

/// Idempotents of End to exercise: exhaustive scan when the coefficient
/// space is small, otherwise 0, 1, and the decomposition idempotents.
fn sample_end_idempotents(
    end: &EndAlgebra,
    dec: &Decomposition,
    budget: u64,
) -> Result<Vec<Vec<u64>>> {
    let p = end.algebra.field().p();
    let k = end.algebra.dim();
    if let Ok(count) = element_count(p, k, budget) {
        let mut out = Vec::new();
        for idx in 0..count {
            let x = index_to_element(p, k, idx);
            if end.algebra.is_idempotent(&x) {
                out.push(x);
            }
        }
        return Ok(out);
    }
    let mut out = vec![end.algebra.zero_element(), end.algebra.unit().to_vec()];
    for j in 0..dec.summands.len() {
        let mat = dec.idempotent_matrix(j)?;
        if let Some(c) = end.coords_of(&mat)? {
            out.push(c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::module::direct_sum;

    const BUDGET: u64 = 1 << 16;

    #[test]
    fn decompose_examples() {
        // zero module
        let prod = Arc::new(corpus::product_f2_f2().unwrap());
        let z = Module::zero(Arc::clone(&prod));
        let d = krs_decompose(&z, 0, BUDGET).unwrap();
        assert!(d.summands.is_empty());
        d.verify().unwrap();

        // regular module of UT_2(F_2): dims {2, 1}
        let ut = Arc::new(corpus::upper_triangular_2x2(2).unwrap());
        let d = krs_decompose(&ut.regular_module().unwrap(), 0, BUDGET).unwrap();
        d.verify().unwrap();
        let mut dims: Vec<usize> = d.summands.iter().map(Module::dim).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 2]);

        // F_2^2 over F_2: two 1-dim summands
        let f2 = Arc::new(corpus::field_algebra(2).unwrap());
        let reg = f2.regular_module().unwrap();
        let (two, _, _) = direct_sum(&[reg.clone(), reg]).unwrap();
        let d = krs_decompose(&two, 0, BUDGET).unwrap();
        d.verify().unwrap();
        assert_eq!(d.summands.len(), 2);
    }

    #[test]
    fn equivalence_examples() {
        let ut = Arc::new(corpus::upper_triangular_2x2(2).unwrap());
        let reg = ut.regular_module().unwrap();
        let d = krs_decompose(&reg, 0, BUDGET).unwrap();

        // reflexivity
        let cert = check_equivalence(&d, &d, 0, MATCH_TRIALS).unwrap();
        cert.verify(&d, &d).unwrap();

        // reversed listing
        let rev = Decomposition {
            parent: d.parent.clone(),
            summands: d.summands.iter().rev().cloned().collect(),
            injections: d.injections.iter().rev().cloned().collect(),
            projections: d.projections.iter().rev().cloned().collect(),
            locality: d.locality.iter().rev().cloned().collect(),
        };
        let cert = check_equivalence(&d, &rev, 0, MATCH_TRIALS).unwrap();
        cert.verify(&d, &rev).unwrap();
        assert_eq!(cert.sigma, vec![1, 0]);

        // reseeded decomposition
        let d2 = krs_decompose(&reg, 12345, BUDGET).unwrap();
        let cert = check_equivalence(&d, &d2, 7, MATCH_TRIALS).unwrap();
        cert.verify(&d, &d2).unwrap();
    }

    #[test]
    fn idempotent_set_examples() {
        // singleton
        let dnum = Arc::new(corpus::dual_numbers(2).unwrap());
        let d = krs_decompose(&dnum.regular_module().unwrap(), 0, BUDGET).unwrap();
        let set = idempotents_from_decomposition(&d, BUDGET, 0).unwrap();
        assert_eq!(set.elements.len(), 1);
        assert_eq!(set.elements[0], set.end.algebra.unit().to_vec());

        // upper triangular: two primitive orthogonal idempotents summing to 1
        let ut = Arc::new(corpus::upper_triangular_2x2(2).unwrap());
        let d = krs_decompose(&ut.regular_module().unwrap(), 0, BUDGET).unwrap();
        let set = idempotents_from_decomposition(&d, BUDGET, 0).unwrap();
        assert_eq!(set.elements.len(), 2);
        assert!(set.end.algebra.check_idempotent_set(&set.elements).unwrap().all());
        assert!(set.primitivity.iter().all(|v| v.primitive));
    }

    #[test]
    fn conjugator_identity_and_reorder() {
        let m2 = Arc::new(corpus::matrix_algebra_2x2(2).unwrap());
        let e11 = corpus::m2_unit_element(&m2, 0, 0);
        let e22 = corpus::m2_unit_element(&m2, 1, 1);
        let set = vec![e11.clone(), e22.clone()];

        let cert = conjugator(&m2, &set, &set, 0, BUDGET, MATCH_TRIALS).unwrap();
        cert.verify(&m2, &set, &set).unwrap();

        // e11 L and e22 L are isomorphic, so any permutation can be returned
        let rev = vec![e22, e11];
        let cert = conjugator(&m2, &set, &rev, 0, BUDGET, MATCH_TRIALS).unwrap();
        cert.verify(&m2, &set, &rev).unwrap();
    }

    #[test]
    fn conjugator_conjugated_set() {
        let m2 = Arc::new(corpus::matrix_algebra_2x2(2).unwrap());
        let e11 = corpus::m2_unit_element(&m2, 0, 0);
        let e22 = corpus::m2_unit_element(&m2, 1, 1);
        let set = vec![e11, e22];
        // g = [[1,1],[0,1]] as algebra element E11 + E12 + E22
        let g = vec![1u64, 1, 0, 1];
        assert!(m2.is_invertible_element(&g));
        // g_inv = [[1,1],[0,1]] over F_2 (involution)
        let g_inv = g.clone();
        assert!(m2.is_unit_element(&m2.mul(&g, &g_inv)));
        let conj_set: Vec<Vec<u64>> = set
            .iter()
            .map(|e| m2.mul(&m2.mul(&g, e), &g_inv))
            .collect();
        let cert = conjugator(&m2, &set, &conj_set, 0, BUDGET, MATCH_TRIALS).unwrap();
        cert.verify(&m2, &set, &conj_set).unwrap();
    }

    #[test]
    fn conjugator_rejects_bad_sets() {
        let prod = Arc::new(corpus::product_f2_f2().unwrap());
        // {1} is complete but not primitive in F_2 x F_2
        let set = vec![prod.unit().to_vec()];
        assert!(matches!(
            conjugator(&prod, &set, &set, 0, BUDGET, MATCH_TRIALS),
            Err(Error::NotCompleteOrthogonalPrimitive(_))
        ));
        // incomplete set
        let set = vec![vec![1, 0]];
        assert!(matches!(
            conjugator(&prod, &set, &set, 0, BUDGET, MATCH_TRIALS),
            Err(Error::NotCompleteOrthogonalPrimitive(_))
        ));
    }

    #[test]
    fn cancel_examples() {
        let ut = Arc::new(corpus::upper_triangular_2x2(2).unwrap());
        let reg = ut.regular_module().unwrap();
        let d = krs_decompose(&reg, 0, BUDGET).unwrap();
        let f = ut.field();
        let n = reg.dim();

        // X' = X (e = id): all indices... complement is zero
        let id = Morphism::identity(&reg);
        let (datum, _) = split_idempotent(&reg, &id).unwrap();
        let (idx, theta) = cancel_complement(&d, &datum, 0, BUDGET).unwrap();
        assert!(idx.is_empty());
        assert!(theta.is_isomorphism());

        // X' = 0 (e = 0): complement is X, all summands selected
        let zero = Morphism::new(reg.clone(), reg.clone(), Mat::zero(f, n, n)).unwrap();
        let (datum, _) = split_idempotent(&reg, &zero).unwrap();
        let (idx, theta) = cancel_complement(&d, &datum, 0, BUDGET).unwrap();
        assert_eq!(idx.len(), d.summands.len());
        assert!(theta.is_isomorphism());

        // X' = the 1-dim projective summand: the 2-dim summand is selected
        let one_dim = d
            .summands
            .iter()
            .position(|s| s.dim() == 1)
            .expect("1-dim summand exists");
        let e_mat = d.idempotent_matrix(one_dim).unwrap();
        let e = Morphism::new_unchecked(reg.clone(), reg.clone(), e_mat).unwrap();
        let (datum, _) = split_idempotent(&reg, &e).unwrap();
        let (idx, theta) = cancel_complement(&d, &datum, 0, BUDGET).unwrap();
        assert_eq!(idx.len(), 1);
        assert_eq!(d.summands[idx[0]].dim(), 2);
        assert!(theta.is_isomorphism());
    }

    #[test]
    fn main_theorem_on_known_corpus() {
        let dnum = Arc::new(corpus::dual_numbers(2).unwrap());
        let prod = Arc::new(corpus::product_f2_f2().unwrap());
        let ut = Arc::new(corpus::upper_triangular_2x2(2).unwrap());
        let zero = Module::zero(Arc::clone(&prod));
        let modules = vec![
            ("zero".to_string(), zero),
            ("reg F_2[x]/(x^2)".to_string(), dnum.regular_module().unwrap()),
            ("reg F_2xF_2".to_string(), prod.regular_module().unwrap()),
            ("reg UT_2(F_2)".to_string(), ut.regular_module().unwrap()),
        ];
        let report = verify_main_theorem(&modules, 0, BUDGET).unwrap();
        assert!(report.all_passed(), "{:?}", report.lines);
        // KRS lengths 1, 2, 2
        let d = krs_decompose(&modules[1].1, 0, BUDGET).unwrap();
        assert_eq!(d.summands.len(), 1);
        let d = krs_decompose(&modules[2].1, 0, BUDGET).unwrap();
        assert_eq!(d.summands.len(), 2);
        let d = krs_decompose(&modules[3].1, 0, BUDGET).unwrap();
        assert_eq!(d.summands.len(), 2);
    }

    #[test]
    fn summand_idempotents_of_local_summands_are_primitive() {
        // for each summand with certified-local End, i_j o p_j is primitive in End(X)
        let ut = Arc::new(corpus::upper_triangular_2x2(3).unwrap());
        let reg = ut.regular_module().unwrap();
        let d = krs_decompose(&reg, 0, BUDGET).unwrap();
        let set = idempotents_from_decomposition(&d, BUDGET, 0).unwrap();
        for (j, v) in set.primitivity.iter().enumerate() {
            assert!(v.primitive, "summand {j} idempotent not primitive");
        }
    }
}
