use crate::error::{Error, Result};
use crate::field::Fp;
use crate::poly::Poly;

/// Dense matrix over F_p, row-major. Zero-row and zero-column matrices are
/// first-class (kernels of invertible maps, zero modules).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    field: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// Result of Gaussian elimination: reduced row echelon form, rank, pivot
/// columns of the rref, and a canonical right-kernel basis (one row per free
/// column, ordered by free column).
#[derive(Debug, Clone)]
pub struct RowReduction {
    pub rref: Mat,
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub kernel: Mat,
}

impl Mat {
    pub fn new(field: Fp, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        let data = data.into_iter().map(|v| v % field.p()).collect();
        Ok(Mat { field, rows, cols, data })
    }

    pub fn zero(field: Fp, rows: usize, cols: usize) -> Self {
        Mat { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Fp, n: usize) -> Self {
        let mut m = Mat::zero(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(field: Fp, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            data.extend_from_slice(r);
        }
        Mat::new(field, rows.len(), cols, data)
    }

    pub fn field(&self) -> Fp {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.field.p();
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self.get(i, j) == u64::from(i == j))
            })
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zero(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other)?;
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(Mat { field: f, rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other)?;
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(Mat { field: f, rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: u64) -> Mat {
        let f = self.field;
        Mat {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, c % f.p())).collect(),
        }
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let p = f.p();
        let mut out = Mat::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cell = &mut out.data[i * other.cols + j];
                    *cell = (*cell + a * other.get(k, j)) % p;
                }
            }
        }
        Ok(out)
    }

    /// Row-vector application: v * self.
    pub fn apply_row(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "row vector of length {} against {} rows",
                v.len(),
                self.rows
            )));
        }
        let f = self.field;
        let mut out = vec![0u64; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a % f.p() == 0 {
                continue;
            }
            for j in 0..self.cols {
                out[j] = f.add(out[j], f.mul(a % f.p(), self.get(i, j)));
            }
        }
        Ok(out)
    }

    fn check_same_shape(&self, other: &Mat) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Gauss-Jordan elimination. The kernel basis rows v satisfy
    /// self * v^T = 0 and carry a 1 in their free column, zeros in every
    /// other free column, so coordinates in the kernel can be read off.
    pub fn row_reduce(&self) -> RowReduction {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    m.data.swap(pr * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.get(row, col)).expect("pivot nonzero");
            for c in 0..m.cols {
                let v = f.mul(m.get(row, c), inv);
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in 0..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        let rank = pivots.len();
        let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
        let mut kernel = Mat::zero(f, free.len(), m.cols);
        for (k, &fc) in free.iter().enumerate() {
            kernel.set(k, fc, 1);
            for (r, &pc) in pivots.iter().enumerate() {
                kernel.set(k, pc, f.neg(m.get(r, fc)));
            }
        }
        RowReduction { rref: m, rank, pivots, kernel }
    }

    pub fn rank(&self) -> usize {
        self.row_reduce().rank
    }

    /// Solve self * x = b (column convention). None when b is outside the
    /// column space.
    pub fn solve(&self, b: &[u64]) -> Result<Option<Vec<u64>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "rhs length {} against {} rows",
                b.len(),
                self.rows
            )));
        }
        let f = self.field;
        let mut aug = Mat::zero(f, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r] % f.p());
        }
        let red = aug.row_reduce();
        if red.pivots.contains(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0u64; self.cols];
        for (r, &pc) in red.pivots.iter().enumerate() {
            x[pc] = red.rref.get(r, self.cols);
        }
        Ok(Some(x))
    }

    pub fn invert(&self) -> Result<Mat> {
        if self.rows != self.cols {
            return Err(Error::NotSquare);
        }
        let f = self.field;
        let n = self.rows;
        let mut aug = Mat::zero(f, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let red = aug.row_reduce();
        if red.rank < n || red.pivots.iter().take(n).ne((0..n).collect::<Vec<_>>().iter()) {
            return Err(Error::Singular);
        }
        let mut inv = Mat::zero(f, n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, red.rref.get(r, n + c));
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Minimal polynomial: Krylov iteration from each standard basis vector,
    /// lcm of the local minimal polynomials.
    pub fn min_poly(&self) -> Result<Poly> {
        if self.rows != self.cols {
            return Err(Error::NotSquare);
        }
        let f = self.field;
        let n = self.rows;
        if n == 0 {
            return Ok(Poly::one(f));
        }
        let mut m = Poly::one(f);
        for i in 0..n {
            let local = self.local_min_poly(i)?;
            let g = m.gcd(&local)?;
            m = m.mul(&local.divrem(&g)?.0).monic();
            if m.degree() == Some(n) {
                break;
            }
        }
        Ok(m)
    }

    fn local_min_poly(&self, start: usize) -> Result<Poly> {
        let f = self.field;
        let n = self.rows;
        let mut v = vec![0u64; n];
        v[start] = 1;
        let mut krylov: Vec<Vec<u64>> = vec![v.clone()];
        loop {
            let last = krylov.last().unwrap();
            let next = self.apply_row(last)?;
            // test dependence of `next` on the krylov rows
            let stack = Mat::from_rows(f, n, &krylov)?;
            if let Some(coeffs) = stack.transpose().solve(&next)? {
                // next = sum coeffs_j krylov_j  =>  t^d - sum coeffs_j t^j
                let d = krylov.len();
                let mut poly = vec![0u64; d + 1];
                for (j, &c) in coeffs.iter().enumerate() {
                    poly[j] = f.neg(c);
                }
                poly[d] = 1;
                return Ok(Poly::new(f, poly));
            }
            krylov.push(next);
        }
    }

    /// Evaluate a polynomial at this (square) matrix.
    pub fn eval_poly(&self, poly: &Poly) -> Result<Mat> {
        if self.rows != self.cols {
            return Err(Error::NotSquare);
        }
        let f = self.field;
        let mut acc = Mat::zero(f, self.rows, self.rows);
        for &c in poly.coeffs().iter().rev() {
            acc = acc.mul(self)?;
            for i in 0..self.rows {
                acc.set(i, i, f.add(acc.get(i, i), c));
            }
        }
        Ok(acc)
    }

    /// Stack other below self.
    pub fn vstack(&self, other: &Mat) -> Result<Mat> {
        if self.field != other.field || self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat::new(self.field, self.rows + other.rows, self.cols, data)
    }

    /// Coordinates of v in the row space of an echelon basis produced by
    /// `row_reduce` (rref rows with the given pivot columns). None when v is
    /// outside the span.
    pub fn coords_in_echelon_rows(&self, pivots: &[usize], v: &[u64]) -> Result<Option<Vec<u64>>> {
        if v.len() != self.cols || pivots.len() != self.rows {
            return Err(Error::DimensionMismatch("echelon coordinates".into()));
        }
        let coords: Vec<u64> = pivots.iter().map(|&c| v[c] % self.field.p()).collect();
        let recon = self.apply_row(&coords)?;
        if recon
            .iter()
            .zip(v)
            .all(|(&a, &b)| a == b % self.field.p())
        {
            Ok(Some(coords))
        } else {
            Ok(None)
        }
    }
}
