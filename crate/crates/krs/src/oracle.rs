//! Exhaustive ground truth on tiny instances. Nothing here is randomized;
//! these scans are the fixed point every engine verdict is compared against.

use crate::algebra::{element_count, index_to_element, Algebra};
use crate::error::{Error, Result};
use crate::module::{end_algebra, Module};

/// Enumeration ceiling: scans run only when p^dim <= max_elements.
#[derive(Debug, Clone, Copy)]
pub struct OracleBudget {
    pub max_elements: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_elements: 1 << 16 }
    }
}

/// All idempotents of the algebra, in counter order (which is canonical for
/// a fixed basis).
pub fn enumerate_idempotents(algebra: &Algebra, budget: OracleBudget) -> Result<Vec<Vec<u64>>> {
    let p = algebra.field().p();
    let n = algebra.dim();
    let count = element_count(p, n, budget.max_elements)?;
    let mut out = Vec::new();
    for idx in 0..count {
        let x = index_to_element(p, n, idx);
        if algebra.is_idempotent(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Primitivity by definition: no pair of nonzero orthogonal idempotents sums
/// to e. (For e = 0 the scan is vacuous and reports true.)
pub fn oracle_is_primitive(algebra: &Algebra, e: &[u64], budget: OracleBudget) -> Result<bool> {
    if !algebra.is_idempotent(e) {
        return Err(Error::NotIdempotent);
    }
    let idems = enumerate_idempotents(algebra, budget)?;
    for f in &idems {
        if algebra.is_zero_element(f) {
            continue;
        }
        let g = algebra.sub(e, f);
        if algebra.is_zero_element(&g) {
            continue;
        }
        if algebra.is_idempotent(&g)
            && algebra.is_zero_element(&algebra.mul(f, &g))
            && algebra.is_zero_element(&algebra.mul(&g, f))
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First nontrivial idempotent of End(M) in scan order, or None if End(M)
/// has only trivial idempotents.
fn scan_end_idempotent(m: &Module, budget: OracleBudget) -> Result<Option<crate::module::Morphism>> {
    let end = end_algebra(m)?;
    let p = m.algebra().field().p();
    let k = end.algebra.dim();
    let count = element_count(p, k, budget.max_elements)?;
    for idx in 0..count {
        let coords = index_to_element(p, k, idx);
        if end.algebra.is_idempotent(&coords)
            && !end.algebra.is_zero_element(&coords)
            && !end.algebra.is_unit_element(&coords)
        {
            let mat = end.matrix_of(&coords)?;
            return Ok(Some(crate::module::Morphism::new_unchecked(
                m.clone(),
                m.clone(),
                mat,
            )?));
        }
    }
    Ok(None)
}

/// Exhaustive decomposition: repeatedly split the first nontrivial
/// idempotent of End. Terminal summands have End with only trivial
/// idempotents, hence local.
pub fn oracle_decompose(m: &Module, budget: OracleBudget) -> Result<crate::krs::Decomposition> {
    crate::krs::decompose_with(m, &mut |summand| {
        Ok(match scan_end_idempotent(summand, budget)? {
            Some(e) => crate::krs::ProbeResult::Split(e),
            None => crate::krs::ProbeResult::Terminal(crate::idempotent::LocalityVerdict {
                local: true,
                witness: None,
                method: crate::idempotent::VerdictMethod::Exhaustive,
            }),
        })
    })
}

/// One row of the three-way check on a nonzero idempotent e: primitivity by
/// scan, triviality of the corner's idempotents, and indecomposability of
/// the right ideal e*Lambda.
#[derive(Debug, Clone)]
pub struct Lemma3Entry {
    pub idempotent: Vec<u64>,
    pub primitive: bool,
    pub corner_trivial: bool,
    pub ideal_indecomposable: bool,
}

impl Lemma3Entry {
    pub fn agrees(&self) -> bool {
        self.primitive == self.corner_trivial && self.corner_trivial == self.ideal_indecomposable
    }
}

/// Computes the three predicates independently for every nonzero idempotent
/// of the algebra.
pub fn lemma3_check(algebra: &std::sync::Arc<Algebra>, budget: OracleBudget) -> Result<Vec<Lemma3Entry>> {
    let mut out = Vec::new();
    for e in enumerate_idempotents(algebra, budget)? {
        if algebra.is_zero_element(&e) {
            continue;
        }
        let primitive = oracle_is_primitive(algebra, &e, budget)?;
        let corner = algebra.corner(&e)?;
        let corner_trivial = enumerate_idempotents(&corner.algebra, budget)?.len() == 2
            || corner.algebra.dim() == 0;
        let (ideal, _) = crate::module::right_ideal_module(algebra, &e)?;
        let ideal_indecomposable = oracle_decompose(&ideal, budget)?.summands.len() == 1;
        out.push(Lemma3Entry { idempotent: e, primitive, corner_trivial, ideal_indecomposable });
    }
    Ok(out)
}
