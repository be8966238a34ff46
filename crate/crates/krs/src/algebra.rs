use crate::error::{Error, Result};
use crate::field::Fp;
use crate::matrix::Mat;
use crate::module::Module;
use std::sync::Arc;

/// Finite-dimensional associative unital F_p-algebra presented by structure
/// constants: `constants[i][j][k]` is the coefficient of basis vector b_k in
/// the product b_i * b_j. Elements are coefficient vectors of length `dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    field: Fp,
    dim: usize,
    /// n^3 entries, index (i * n + j) * n + k.
    constants: Vec<u64>,
    unit: Vec<u64>,
}

/// One violated axiom instance found by `validate`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraViolation {
    /// Associativity fails at (b_i * b_j) * b_k vs b_i * (b_j * b_k), coordinate l.
    Associativity { i: usize, j: usize, k: usize, l: usize },
    /// unit * b_i != b_i or b_i * unit != b_i.
    UnitLaw { i: usize },
}

impl Algebra {
    /// Constructs without validating the algebra axioms; callers that accept
    /// external input should run `validate` afterwards.
    pub fn new(field: Fp, dim: usize, constants: Vec<u64>, unit: Vec<u64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be >= 1".into()));
        }
        if constants.len() != dim * dim * dim {
            return Err(Error::InvalidAlgebra(format!(
                "expected {} structure constants, got {}",
                dim * dim * dim,
                constants.len()
            )));
        }
        if unit.len() != dim {
            return Err(Error::InvalidAlgebra("unit vector has wrong length".into()));
        }
        let p = field.p();
        Ok(Algebra {
            field,
            dim,
            constants: constants.into_iter().map(|v| v % p).collect(),
            unit: unit.into_iter().map(|v| v % p).collect(),
        })
    }

    pub fn field(&self) -> Fp {
        self.field
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn unit(&self) -> &[u64] {
        &self.unit
    }
    pub fn constants(&self) -> &[u64] {
        &self.constants
    }

    #[inline]
    pub fn constant(&self, i: usize, j: usize, k: usize) -> u64 {
        self.constants[(i * self.dim + j) * self.dim + k]
    }

    pub fn zero_element(&self) -> Vec<u64> {
        vec![0; self.dim]
    }

    pub fn basis_element(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.dim];
        v[i] = 1;
        v
    }

    /// Exhaustive axiom check; every violated quadruple or unit index is
    /// reported.
    pub fn validate(&self) -> Vec<AlgebraViolation> {
        let f = self.field;
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut lhs = 0u64;
                        let mut rhs = 0u64;
                        for m in 0..n {
                            lhs = f.add(lhs, f.mul(self.constant(i, j, m), self.constant(m, k, l)));
                            rhs = f.add(rhs, f.mul(self.constant(j, k, m), self.constant(i, m, l)));
                        }
                        if lhs != rhs {
                            out.push(AlgebraViolation::Associativity { i, j, k, l });
                        }
                    }
                }
            }
        }
        for i in 0..n {
            let b = self.basis_element(i);
            if self.mul(&self.unit, &b) != b || self.mul(&b, &self.unit) != b {
                out.push(AlgebraViolation::UnitLaw { i });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Bilinear product of coefficient vectors.
    pub fn mul(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let f = self.field;
        let n = self.dim;
        let mut out = vec![0u64; n];
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0 {
                    continue;
                }
                let xy = f.mul(x[i], y[j]);
                for k in 0..n {
                    let c = self.constant(i, j, k);
                    if c != 0 {
                        out[k] = f.add(out[k], f.mul(xy, c));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter().zip(y).map(|(&a, &b)| self.field.add(a, b)).collect()
    }

    pub fn sub(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter().zip(y).map(|(&a, &b)| self.field.sub(a, b)).collect()
    }

    pub fn is_zero_element(&self, x: &[u64]) -> bool {
        x.iter().all(|&v| v == 0)
    }

    pub fn is_unit_element(&self, x: &[u64]) -> bool {
        x == self.unit.as_slice()
    }

    pub fn is_idempotent(&self, x: &[u64]) -> bool {
        self.mul(x, x) == x
    }

    /// Matrix of y -> x * y in the algebra basis, column convention:
    /// column i holds the coordinates of x * b_i, so
    /// left_mul_matrix(x * y) = left_mul_matrix(x) * left_mul_matrix(y).
    /// x is invertible in the algebra iff this matrix is invertible.
    pub fn left_mul_matrix(&self, x: &[u64]) -> Mat {
        let mut m = Mat::zero(self.field, self.dim, self.dim);
        for i in 0..self.dim {
            let col = self.mul(x, &self.basis_element(i));
            for k in 0..self.dim {
                m.set(k, i, col[k]);
            }
        }
        m
    }

    /// Matrix of y -> y * x (the right-regular action of x).
    pub fn right_mul_matrix(&self, x: &[u64]) -> Mat {
        let mut m = Mat::zero(self.field, self.dim, self.dim);
        for i in 0..self.dim {
            let row = self.mul(&self.basis_element(i), x);
            for k in 0..self.dim {
                m.set(i, k, row[k]);
            }
        }
        m
    }

    pub fn is_invertible_element(&self, x: &[u64]) -> bool {
        self.left_mul_matrix(x).is_invertible()
    }

    /// Evaluate a polynomial at an algebra element (Horner).
    pub fn eval_poly(&self, poly: &crate::poly::Poly, x: &[u64]) -> Vec<u64> {
        let f = self.field;
        let mut acc = self.zero_element();
        for &c in poly.coeffs().iter().rev() {
            acc = self.mul(&acc, x);
            let unit_c: Vec<u64> = self.unit.iter().map(|&u| f.mul(u, c)).collect();
            acc = self.add(&acc, &unit_c);
        }
        acc
    }

    /// Flags for a candidate set of idempotents: each element idempotent,
    /// pairwise orthogonal, and summing to the unit.
    pub fn check_idempotent_set(&self, set: &[Vec<u64>]) -> Result<IdempotentSetFlags> {
        for e in set {
            if e.len() != self.dim {
                return Err(Error::AlgebraMismatch);
            }
        }
        let each_idempotent = set.iter().all(|e| self.is_idempotent(e));
        let mut pairwise_orthogonal = true;
        for (i, e) in set.iter().enumerate() {
            for (j, f) in set.iter().enumerate() {
                if i != j
                    && (!self.is_zero_element(&self.mul(e, f))
                        || !self.is_zero_element(&self.mul(f, e)))
                {
                    pairwise_orthogonal = false;
                }
            }
        }
        let mut sum = self.zero_element();
        for e in set {
            sum = self.add(&sum, e);
        }
        let complete = sum == self.unit;
        Ok(IdempotentSetFlags { each_idempotent, pairwise_orthogonal, complete })
    }

    /// Corner algebra e * A * e for an idempotent e, with an echelon-canonical
    /// basis of the corner subspace.
    pub fn corner(&self, e: &[u64]) -> Result<Corner> {
        if !self.is_idempotent(e) {
            return Err(Error::NotIdempotent);
        }
        let f = self.field;
        let n = self.dim;
        // span of { e * b_i * e }
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            rows.push(self.mul(&self.mul(e, &self.basis_element(i)), e));
        }
        let span = Mat::from_rows(f, n, &rows)?;
        let red = span.row_reduce();
        let k = red.rank;
        let mut embed_rows = Vec::with_capacity(k);
        for r in 0..k {
            embed_rows.push(red.rref.row(r).to_vec());
        }
        let embed = Mat::from_rows(f, n, &embed_rows)?;
        let pivots = red.pivots;
        if k == 0 {
            // e = 0: corner is the zero ring, not representable as a unital
            // algebra of dim >= 1
            return Err(Error::ZeroIdempotent);
        }
        let coords = |v: &[u64]| -> Result<Vec<u64>> {
            embed
                .coords_in_echelon_rows(&pivots, v)?
                .ok_or_else(|| Error::InvalidAlgebra("corner product left the corner span".into()))
        };
        let mut constants = vec![0u64; k * k * k];
        for a in 0..k {
            for b in 0..k {
                let prod = self.mul(embed.row(a), embed.row(b));
                let c = coords(&prod)?;
                for l in 0..k {
                    constants[(a * k + b) * k + l] = c[l];
                }
            }
        }
        let unit = coords(e)?;
        let algebra = Algebra::new(f, k, constants, unit)?;
        Ok(Corner { algebra, embed, pivots })
    }

    /// The right-regular module: the algebra acting on itself by right
    /// multiplication.
    pub fn regular_module(self: &Arc<Self>) -> Result<Module> {
        if !self.is_valid() {
            return Err(Error::InvalidAlgebra("regular module of invalid algebra".into()));
        }
        let action: Vec<Mat> = (0..self.dim)
            .map(|i| self.right_mul_matrix(&self.basis_element(i)))
            .collect();
        Module::new(Arc::clone(self), self.dim, action)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdempotentSetFlags {
    pub each_idempotent: bool,
    pub pairwise_orthogonal: bool,
    pub complete: bool,
}

impl IdempotentSetFlags {
    pub fn all(&self) -> bool {
        self.each_idempotent && self.pairwise_orthogonal && self.complete
    }
}

/// Corner algebra eAe with its embedding back into the parent. The embed
/// matrix rows are an echelon basis of the corner subspace, so projection to
/// corner coordinates is a pivot-column read.
#[derive(Debug, Clone)]
pub struct Corner {
    pub algebra: Algebra,
    /// corner_dim x parent_dim; corner coords (row) * embed = parent coords.
    pub embed: Mat,
    pub pivots: Vec<usize>,
}

impl Corner {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn embed_element(&self, v: &[u64]) -> Result<Vec<u64>> {
        self.embed.apply_row(v)
    }

    /// Parent coords -> corner coords; None if outside the corner subspace.
    pub fn project_element(&self, v: &[u64]) -> Result<Option<Vec<u64>>> {
        self.embed.coords_in_echelon_rows(&self.pivots, v)
    }
}

/// Enumerate all p^dim coefficient vectors in lexicographic counter order.
/// Shared by exhaustive searches; errors if the count exceeds `max_elements`.
pub fn element_count(p: u64, dim: usize, max_elements: u64) -> Result<u64> {
    let mut count: u128 = 1;
    for _ in 0..dim {
        count *= p as u128;
        if count > max_elements as u128 {
            return Err(Error::BudgetExceeded(count));
        }
    }
    Ok(count as u64)
}

pub fn index_to_element(p: u64, dim: usize, mut idx: u64) -> Vec<u64> {
    let mut v = vec![0u64; dim];
    for slot in v.iter_mut() {
        *slot = idx % p;
        idx /= p;
    }
    v
}
