//! Builders for the small reference algebras used across the test suites and
//! the verification harness.

use crate::algebra::Algebra;
use crate::error::Result;
use crate::field::Fp;
use std::sync::Arc;

/// F_p itself as a 1-dimensional algebra.
pub fn field_algebra(p: u64) -> Result<Algebra> {
    Algebra::new(Fp::new(p)?, 1, vec![1], vec![1])
}

/// F_p[x]/(x^2), basis {1, x}.
pub fn dual_numbers(p: u64) -> Result<Algebra> {
    let f = Fp::new(p)?;
    let mut c = vec![0u64; 8];
    // 1*1 = 1, 1*x = x*1 = x, x*x = 0
    c[(0 * 2 + 0) * 2 + 0] = 1;
    c[(0 * 2 + 1) * 2 + 1] = 1;
    c[(1 * 2 + 0) * 2 + 1] = 1;
    Algebra::new(f, 2, c, vec![1, 0])
}

/// F_2 x F_2 with componentwise product.
pub fn product_f2_f2() -> Result<Algebra> {
    let f = Fp::new(2)?;
    let mut c = vec![0u64; 8];
    c[(0 * 2 + 0) * 2 + 0] = 1;
    c[(1 * 2 + 1) * 2 + 1] = 1;
    Algebra::new(f, 2, c, vec![1, 1])
}

/// F_4 presented as a 2-dimensional F_2-algebra, basis {1, w} with
/// w^2 = w + 1.
pub fn f4_over_f2() -> Result<Algebra> {
    let f = Fp::new(2)?;
    let mut c = vec![0u64; 8];
    c[(0 * 2 + 0) * 2 + 0] = 1;
    c[(0 * 2 + 1) * 2 + 1] = 1;
    c[(1 * 2 + 0) * 2 + 1] = 1;
    c[(1 * 2 + 1) * 2 + 0] = 1;
    c[(1 * 2 + 1) * 2 + 1] = 1;
    Algebra::new(f, 2, c, vec![1, 0])
}

/// Full 2x2 matrix algebra over F_p, basis E11, E12, E21, E22 in that order.
pub fn matrix_algebra_2x2(p: u64) -> Result<Algebra> {
    let f = Fp::new(p)?;
    let n = 4usize;
    let mut c = vec![0u64; n * n * n];
    // E_{ab} E_{cd} = delta_{bc} E_{ad}
    for a in 0..2 {
        for b in 0..2 {
            for d in 0..2 {
                let i = a * 2 + b;
                let j = b * 2 + d;
                let k = a * 2 + d;
                c[(i * n + j) * n + k] = 1;
            }
        }
    }
    Algebra::new(f, n, c, vec![1, 0, 0, 1])
}

/// Coefficient vector of the matrix unit E_{ij} in `matrix_algebra_2x2`.
pub fn m2_unit_element(a: &Algebra, i: usize, j: usize) -> Vec<u64> {
    a.basis_element(i * 2 + j)
}

/// Upper-triangular 2x2 matrices over F_p, basis {E11, E12, E22}.
pub fn upper_triangular_2x2(p: u64) -> Result<Algebra> {
    let f = Fp::new(p)?;
    let n = 3usize;
    let mut c = vec![0u64; n * n * n];
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    c[idx(0, 0, 0)] = 1; // E11 E11 = E11
    c[idx(0, 1, 1)] = 1; // E11 E12 = E12
    c[idx(1, 2, 1)] = 1; // E12 E22 = E12
    c[idx(2, 2, 2)] = 1; // E22 E22 = E22
    Algebra::new(f, n, c, vec![1, 0, 1])
}

/// The fixed acceptance corpus, with names.
pub fn acceptance_corpus() -> Result<Vec<(&'static str, Arc<Algebra>)>> {
    Ok(vec![
        ("F_2", Arc::new(field_algebra(2)?)),
        ("F_3", Arc::new(field_algebra(3)?)),
        ("F_2[x]/(x^2)", Arc::new(dual_numbers(2)?)),
        ("F_2 x F_2", Arc::new(product_f2_f2()?)),
        ("F_4", Arc::new(f4_over_f2()?)),
        ("M_2(F_2)", Arc::new(matrix_algebra_2x2(2)?)),
        ("UT_2(F_2)", Arc::new(upper_triangular_2x2(2)?)),
        ("UT_2(F_3)", Arc::new(upper_triangular_2x2(3)?)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_corpus_algebra_validates() {
        for (name, a) in acceptance_corpus().unwrap() {
            assert!(a.is_valid(), "{name} fails algebra axioms");
        }
    }
}
