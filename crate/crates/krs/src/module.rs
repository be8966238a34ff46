use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Finite-dimensional right module over a structure-constant algebra, given
/// by one action matrix per algebra basis vector. Row-vector convention:
/// module vectors are rows and v * a = v * rho(a), so rho(ab) = rho(a)rho(b).
#[derive(Debug, Clone)]
pub struct Module {
    algebra: Arc<Algebra>,
    dim: usize,
    action: Vec<Mat>,
}

impl PartialEq for Module {
    fn eq(&self, other: &Self) -> bool {
        *self.algebra == *other.algebra && self.dim == other.dim && self.action == other.action
    }
}

impl Module {
    pub fn new(algebra: Arc<Algebra>, dim: usize, action: Vec<Mat>) -> Result<Self> {
        if action.len() != algebra.dim() {
            return Err(Error::InvalidModule(format!(
                "need {} action matrices, got {}",
                algebra.dim(),
                action.len()
            )));
        }
        for m in &action {
            if m.rows() != dim || m.cols() != dim || m.field() != algebra.field() {
                return Err(Error::InvalidModule("action matrix shape mismatch".into()));
            }
        }
        Ok(Module { algebra, dim, action })
    }

    pub fn zero(algebra: Arc<Algebra>) -> Self {
        let n = algebra.dim();
        let f = algebra.field();
        Module {
            algebra,
            dim: 0,
            action: (0..n).map(|_| Mat::zero(f, 0, 0)).collect(),
        }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn action(&self) -> &[Mat] {
        &self.action
    }

    /// Action matrix of an arbitrary algebra element.
    pub fn action_of(&self, x: &[u64]) -> Mat {
        let f = self.algebra.field();
        let mut out = Mat::zero(f, self.dim, self.dim);
        for (i, m) in self.action.iter().enumerate() {
            if x[i] % f.p() != 0 {
                out = out.add(&m.scale(x[i])).expect("same shape");
            }
        }
        out
    }

    /// Representation-axiom check: the unit acts as the identity and the
    /// action respects the structure constants. Returns human-readable
    /// violation descriptions; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.algebra.dim();
        let f = self.algebra.field();
        if !self.action_of(self.algebra.unit()).is_identity() {
            out.push("unit does not act as the identity".to_string());
        }
        for i in 0..n {
            for j in 0..n {
                let lhs = self.action[i].mul(&self.action[j]).expect("square");
                let mut rhs = Mat::zero(f, self.dim, self.dim);
                for k in 0..n {
                    let c = self.algebra.constant(i, j, k);
                    if c != 0 {
                        rhs = rhs.add(&self.action[k].scale(c)).expect("same shape");
                    }
                }
                if lhs != rhs {
                    out.push(format!("action not multiplicative at basis pair ({i}, {j})"));
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

/// Module morphism: an intertwining matrix between two right modules.
/// Row convention: the map is v -> v * matrix, so the matrix is
/// dim(source) x dim(target).
#[derive(Debug, Clone, PartialEq)]
pub struct Morphism {
    source: Module,
    target: Module,
    mat: Mat,
}

impl Morphism {
    /// Builds and checks the intertwining relations.
    pub fn new(source: Module, target: Module, mat: Mat) -> Result<Self> {
        let m = Morphism::new_unchecked(source, target, mat)?;
        if !m.is_intertwiner() {
            return Err(Error::InvalidModule("matrix does not intertwine the actions".into()));
        }
        Ok(m)
    }

    pub fn new_unchecked(source: Module, target: Module, mat: Mat) -> Result<Self> {
        if *source.algebra != *target.algebra {
            return Err(Error::AlgebraMismatch);
        }
        if mat.rows() != source.dim || mat.cols() != target.dim {
            return Err(Error::DimensionMismatch(format!(
                "morphism matrix {}x{} between modules of dims {} and {}",
                mat.rows(),
                mat.cols(),
                source.dim,
                target.dim
            )));
        }
        Ok(Morphism { source, target, mat })
    }

    pub fn identity(m: &Module) -> Self {
        Morphism {
            source: m.clone(),
            target: m.clone(),
            mat: Mat::identity(m.algebra.field(), m.dim),
        }
    }

    pub fn source(&self) -> &Module {
        &self.source
    }
    pub fn target(&self) -> &Module {
        &self.target
    }
    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn is_intertwiner(&self) -> bool {
        self.source
            .action
            .iter()
            .zip(&self.target.action)
            .all(|(rs, rt)| {
                rs.mul(&self.mat).expect("shape") == self.mat.mul(rt).expect("shape")
            })
    }

    /// self then other (diagrammatic order): source(self) -> target(other).
    pub fn then(&self, other: &Morphism) -> Result<Morphism> {
        if self.target != other.source {
            return Err(Error::DimensionMismatch("composition endpoint mismatch".into()));
        }
        Ok(Morphism {
            source: self.source.clone(),
            target: other.target.clone(),
            mat: self.mat.mul(&other.mat)?,
        })
    }

    pub fn is_injective(&self) -> bool {
        self.mat.rank() == self.mat.rows()
    }

    pub fn is_surjective(&self) -> bool {
        self.mat.rank() == self.mat.cols()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.mat.rows() == self.mat.cols() && self.mat.is_invertible()
    }
}

/// Basis of Hom(M, N) in canonical echelon order, with coordinate read-off.
#[derive(Debug, Clone)]
pub struct HomSpace {
    source: Module,
    target: Module,
    /// Flattened morphism matrices as echelon kernel rows.
    flat: Mat,
    free_cols: Vec<usize>,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.flat.rows()
    }

    pub fn basis(&self) -> Result<Vec<Morphism>> {
        (0..self.dim()).map(|i| self.basis_morphism(i)).collect()
    }

    pub fn basis_morphism(&self, i: usize) -> Result<Morphism> {
        let mat = Mat::new(
            self.source.algebra.field(),
            self.source.dim,
            self.target.dim,
            self.flat.row(i).to_vec(),
        )?;
        Morphism::new_unchecked(self.source.clone(), self.target.clone(), mat)
    }

    /// Morphism with the given coordinate vector.
    pub fn from_coords(&self, coords: &[u64]) -> Result<Morphism> {
        let flat = self.flat.apply_row(coords)?;
        let mat = Mat::new(
            self.source.algebra.field(),
            self.source.dim,
            self.target.dim,
            flat,
        )?;
        Morphism::new_unchecked(self.source.clone(), self.target.clone(), mat)
    }

    /// Coordinates of a morphism matrix in this basis; None if it is not an
    /// intertwiner in the span.
    pub fn coords_of(&self, mat: &Mat) -> Result<Option<Vec<u64>>> {
        if mat.rows() != self.source.dim || mat.cols() != self.target.dim {
            return Err(Error::DimensionMismatch("hom coordinates".into()));
        }
        self.flat.coords_in_echelon_rows(&self.free_cols, mat.data())
    }
}

/// Solve the intertwining equations rho_M(b_i) F = F rho_N(b_i) exactly.
pub fn hom_space(m: &Module, n: &Module) -> Result<HomSpace> {
    if *m.algebra != *n.algebra {
        return Err(Error::AlgebraMismatch);
    }
    let f = m.algebra.field();
    let na = m.algebra.dim();
    let (dm, dn) = (m.dim, n.dim);
    let unknowns = dm * dn;
    let mut sys = Mat::zero(f, na * unknowns, unknowns);
    let mut eq = 0usize;
    for i in 0..na {
        let rs = &m.action[i];
        let rt = &n.action[i];
        for r in 0..dm {
            for c in 0..dn {
                // coefficient of F[a][b] in (rs * F - F * rt)[r][c]
                for a in 0..dm {
                    let v = rs.get(r, a);
                    if v != 0 {
                        let col = a * dn + c;
                        sys.set(eq, col, f.add(sys.get(eq, col), v));
                    }
                }
                for b in 0..dn {
                    let v = rt.get(b, c);
                    if v != 0 {
                        let col = r * dn + b;
                        sys.set(eq, col, f.sub(sys.get(eq, col), v));
                    }
                }
                eq += 1;
            }
        }
    }
    let red = sys.row_reduce();
    let free_cols: Vec<usize> = (0..unknowns).filter(|c| !red.pivots.contains(c)).collect();
    Ok(HomSpace {
        source: m.clone(),
        target: n.clone(),
        flat: red.kernel,
        free_cols,
    })
}

pub fn hom_basis(m: &Module, n: &Module) -> Result<Vec<Morphism>> {
    hom_space(m, n)?.basis()
}

/// Endomorphism algebra of a module in Hom-basis coordinates. The algebra
/// product is composition: (x * y)(v) = x(y(v)), i.e. matrix(y) * matrix(x)
/// in the row convention.
#[derive(Debug, Clone)]
pub struct EndAlgebra {
    pub algebra: Arc<Algebra>,
    pub hom: HomSpace,
}

impl EndAlgebra {
    /// Endomorphism matrix of the element with the given coordinates.
    pub fn matrix_of(&self, coords: &[u64]) -> Result<Mat> {
        Ok(self.hom.from_coords(coords)?.mat().clone())
    }

    pub fn coords_of(&self, mat: &Mat) -> Result<Option<Vec<u64>>> {
        self.hom.coords_of(mat)
    }
}

pub fn end_algebra(m: &Module) -> Result<EndAlgebra> {
    if m.dim == 0 {
        return Err(Error::ZeroModule);
    }
    let hom = hom_space(m, m)?;
    let k = hom.dim();
    let f = m.algebra.field();
    let mut constants = vec![0u64; k * k * k];
    for i in 0..k {
        let mi = hom.basis_morphism(i)?;
        for j in 0..k {
            let mj = hom.basis_morphism(j)?;
            // product b_i * b_j is the composition "apply b_j, then b_i"
            let prod = mj.mat().mul(mi.mat())?;
            let coords = hom
                .coords_of(&prod)?
                .ok_or_else(|| Error::InvalidModule("End is not closed under composition".into()))?;
            for (l, &c) in coords.iter().enumerate() {
                constants[(i * k + j) * k + l] = c;
            }
        }
    }
    let unit = hom
        .coords_of(&Mat::identity(f, m.dim))?
        .ok_or_else(|| Error::InvalidModule("identity is not an intertwiner".into()))?;
    let algebra = Arc::new(Algebra::new(f, k, constants, unit)?);
    Ok(EndAlgebra { algebra, hom })
}

/// Kernel of a morphism as a module with its inclusion. The kernel basis is
/// echelon-canonical, so membership coordinates are pivot reads.
pub fn kernel_module(phi: &Morphism) -> Result<(Module, Morphism)> {
    let f = phi.source.algebra.field();
    let m = phi.source.dim;
    // left kernel: rows v with v * mat = 0
    let red = phi.mat.transpose().row_reduce();
    let basis = red.kernel.clone();
    let free_cols: Vec<usize> = (0..m).filter(|c| !red.pivots.contains(c)).collect();
    let k = basis.rows();
    let mut action = Vec::with_capacity(phi.source.action.len());
    for rho in &phi.source.action {
        let mut a = Mat::zero(f, k, k);
        for r in 0..k {
            let img = rho.apply_row(basis.row(r)).map_err(|_| Error::NotSquare)?;
            // re-express in the kernel basis; the kernel is action-stable
            // because phi intertwines
            let img = {
                let mut v = vec![0u64; m];
                v.copy_from_slice(&img);
                v
            };
            let coords = basis
                .coords_in_echelon_rows(&free_cols, &img)?
                .ok_or_else(|| Error::InvalidModule("kernel not action-stable".into()))?;
            for c in 0..k {
                a.set(r, c, coords[c]);
            }
        }
        action.push(a);
    }
    let kernel = Module::new(Arc::clone(&phi.source.algebra), k, action)?;
    let incl = Morphism::new_unchecked(kernel.clone(), phi.source.clone(), basis)?;
    Ok((kernel, incl))
}

/// Direct sum with block injections and projections satisfying
/// p_j i_j = id, p_j i_l = 0 (j != l), sum_j i_j p_j = id.
pub fn direct_sum(parts: &[Module]) -> Result<(Module, Vec<Morphism>, Vec<Morphism>)> {
    let algebra = match parts.first() {
        Some(p) => Arc::clone(&p.algebra),
        None => return Err(Error::InvalidModule("direct sum needs an ambient algebra".into())),
    };
    direct_sum_over(&algebra, parts)
}

/// Direct sum allowing the empty family (yields the zero module).
pub fn direct_sum_over(
    algebra: &Arc<Algebra>,
    parts: &[Module],
) -> Result<(Module, Vec<Morphism>, Vec<Morphism>)> {
    for p in parts {
        if *p.algebra != **algebra {
            return Err(Error::AlgebraMismatch);
        }
    }
    let f = algebra.field();
    let total: usize = parts.iter().map(|p| p.dim).sum();
    let n = algebra.dim();
    let mut action = vec![Mat::zero(f, total, total); n];
    let mut offsets = Vec::with_capacity(parts.len());
    let mut off = 0usize;
    for p in parts {
        offsets.push(off);
        for i in 0..n {
            for r in 0..p.dim {
                for c in 0..p.dim {
                    action[i].set(off + r, off + c, p.action[i].get(r, c));
                }
            }
        }
        off += p.dim;
    }
    let sum = Module::new(Arc::clone(algebra), total, action)?;
    let mut injections = Vec::with_capacity(parts.len());
    let mut projections = Vec::with_capacity(parts.len());
    for (j, p) in parts.iter().enumerate() {
        let mut inj = Mat::zero(f, p.dim, total);
        let mut proj = Mat::zero(f, total, p.dim);
        for r in 0..p.dim {
            inj.set(r, offsets[j] + r, 1);
            proj.set(offsets[j] + r, r, 1);
        }
        injections.push(Morphism::new_unchecked(p.clone(), sum.clone(), inj)?);
        projections.push(Morphism::new_unchecked(sum.clone(), p.clone(), proj)?);
    }
    Ok((sum, injections, projections))
}

/// Smallest submodule of `parent` containing the given row vectors, with its
/// inclusion.
pub fn submodule_closure(parent: &Module, generators: &[Vec<u64>]) -> Result<(Module, Morphism)> {
    let f = parent.algebra.field();
    let m = parent.dim;
    let mut rows: Vec<Vec<u64>> = generators.to_vec();
    loop {
        let span = Mat::from_rows(f, m, &rows)?;
        let red = span.row_reduce();
        let mut basis_rows: Vec<Vec<u64>> = (0..red.rank).map(|r| red.rref.row(r).to_vec()).collect();
        let before = basis_rows.len();
        for rho in &parent.action {
            for r in 0..before {
                basis_rows.push(rho.apply_row(&basis_rows[r])?);
            }
        }
        let closed = Mat::from_rows(f, m, &basis_rows)?;
        let closed_red = closed.row_reduce();
        if closed_red.rank == before {
            // stable; build the module on the echelon basis
            let basis = Mat::from_rows(
                f,
                m,
                &(0..before)
                    .map(|r| red.rref.row(r).to_vec())
                    .collect::<Vec<_>>(),
            )?;
            let free = red.pivots.clone();
            let k = before;
            let mut action = Vec::with_capacity(parent.action.len());
            for rho in &parent.action {
                let mut a = Mat::zero(f, k, k);
                for r in 0..k {
                    let img = rho.apply_row(basis.row(r))?;
                    let coords = basis
                        .coords_in_echelon_rows(&free, &img)?
                        .ok_or_else(|| Error::InvalidModule("closure not stable".into()))?;
                    for c in 0..k {
                        a.set(r, c, coords[c]);
                    }
                }
                action.push(a);
            }
            let sub = Module::new(Arc::clone(&parent.algebra), k, action)?;
            let incl = Morphism::new_unchecked(sub.clone(), parent.clone(), basis)?;
            return Ok((sub, incl));
        }
        rows = (0..closed_red.rank)
            .map(|r| closed_red.rref.row(r).to_vec())
            .collect();
    }
}

/// Outcome of an isomorphism search.
#[derive(Debug, Clone)]
pub enum IsoResult {
    Iso(Morphism),
    NotIsomorphic,
    Inconclusive,
}

/// Coefficient-space size above which `find_isomorphism` stops enumerating
/// and falls back to random sampling.
pub const ISO_ENUMERATION_LIMIT: u64 = 1 << 16;

/// Searches Hom(M, N) for an invertible intertwiner. Exhaustive over the
/// coefficient space when p^dim(Hom) is small, otherwise seeded random
/// sampling with `trials` attempts.
pub fn find_isomorphism(m: &Module, n: &Module, seed: u64, trials: u32) -> Result<IsoResult> {
    if *m.algebra != *n.algebra {
        return Err(Error::AlgebraMismatch);
    }
    if m.dim != n.dim {
        return Ok(IsoResult::NotIsomorphic);
    }
    if m.dim == 0 {
        let iso = Morphism::new_unchecked(m.clone(), n.clone(), Mat::zero(m.algebra.field(), 0, 0))?;
        return Ok(IsoResult::Iso(iso));
    }
    let hom = hom_space(m, n)?;
    let k = hom.dim();
    if k == 0 {
        return Ok(IsoResult::NotIsomorphic);
    }
    let p = m.algebra.field().p();
    if crate::algebra::element_count(p, k, ISO_ENUMERATION_LIMIT).is_ok() {
        let count = crate::algebra::element_count(p, k, ISO_ENUMERATION_LIMIT)?;
        for idx in 1..count {
            let coords = crate::algebra::index_to_element(p, k, idx);
            let cand = hom.from_coords(&coords)?;
            if cand.is_isomorphism() {
                return Ok(IsoResult::Iso(cand));
            }
        }
        return Ok(IsoResult::NotIsomorphic);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let coords: Vec<u64> = (0..k).map(|_| rng.gen_range(0..p)).collect();
        let cand = hom.from_coords(&coords)?;
        if cand.is_isomorphism() {
            return Ok(IsoResult::Iso(cand));
        }
    }
    Ok(IsoResult::Inconclusive)
}

/// Report of the corner isomorphism End(e*A) = e*A*e, h -> h(e), verified on
/// computed bases.
#[derive(Debug, Clone)]
pub struct PhiReport {
    pub end_dim: usize,
    pub corner_dim: usize,
    /// end_dim x corner_dim; End coordinates (row) * matrix = corner coordinates.
    pub matrix: Mat,
    pub bijective: bool,
    pub multiplicative: bool,
    pub unit_preserved: bool,
}

impl PhiReport {
    pub fn is_ring_isomorphism(&self) -> bool {
        self.bijective && self.multiplicative && self.unit_preserved
    }
}

/// Builds the summand e*Lambda of the regular module together with its
/// inclusion.
pub fn right_ideal_module(algebra: &Arc<Algebra>, e: &[u64]) -> Result<(Module, Morphism)> {
    let regular = algebra.regular_module()?;
    let generators: Vec<Vec<u64>> = (0..algebra.dim())
        .map(|i| algebra.mul(e, &algebra.basis_element(i)))
        .collect();
    submodule_closure(&regular, &generators)
}

pub fn phi_corner_iso(algebra: &Arc<Algebra>, e: &[u64]) -> Result<PhiReport> {
    if !algebra.is_idempotent(e) {
        return Err(Error::NotIdempotent);
    }
    if algebra.is_zero_element(e) {
        return Err(Error::ZeroIdempotent);
    }
    let (ideal, incl) = right_ideal_module(algebra, e)?;
    let end = end_algebra(&ideal)?;
    let corner = algebra.corner(e)?;
    let k = end.algebra.dim();
    let f = algebra.field();
    // e in ideal coordinates
    let incl_red = incl.mat().clone();
    let idx_pivots: Vec<usize> = {
        // inclusion rows come out of submodule_closure in echelon form
        let red = incl_red.row_reduce();
        red.pivots
    };
    let e_coords = incl_red
        .coords_in_echelon_rows(&idx_pivots, e)?
        .ok_or_else(|| Error::InvalidAlgebra("e does not lie in e*Lambda".into()))?;
    let mut phi = Mat::zero(f, k, corner.dim());
    for i in 0..k {
        let h = end.hom.basis_morphism(i)?;
        let img_ideal = h.mat().apply_row(&e_coords)?;
        let img_parent = incl.mat().apply_row(&img_ideal)?;
        let cc = corner
            .project_element(&img_parent)?
            .ok_or_else(|| Error::InvalidAlgebra("h(e) left the corner subspace".into()))?;
        for j in 0..corner.dim() {
            phi.set(i, j, cc[j]);
        }
    }
    let bijective = k == corner.dim() && phi.is_invertible();
    let mut multiplicative = true;
    for i in 0..k {
        for j in 0..k {
            let prod = end.algebra.mul(
                &end.algebra.basis_element(i),
                &end.algebra.basis_element(j),
            );
            let lhs = phi.apply_row(&prod)?;
            let rhs = corner.algebra.mul(phi.row(i), phi.row(j));
            if lhs != rhs {
                multiplicative = false;
            }
        }
    }
    let unit_preserved = phi.apply_row(end.algebra.unit())? == corner.algebra.unit();
    Ok(PhiReport {
        end_dim: k,
        corner_dim: corner.dim(),
        matrix: phi,
        bijective,
        multiplicative,
        unit_preserved,
    })
}

/// Alternating chain of epimorphisms and monomorphisms
/// X_n ->> X_{n+1} >-> X_n.
#[derive(Debug, Clone)]
pub struct BiChain {
    pub modules: Vec<Module>,
    /// steps[n] = (alpha_n: X_n -> X_{n+1}, beta_n: X_{n+1} -> X_n).
    pub steps: Vec<(Morphism, Morphism)>,
}

impl BiChain {
    pub fn validate(&self) -> Result<()> {
        if self.modules.len() != self.steps.len() + 1 {
            return Err(Error::InvalidChain("module/step count mismatch".into()));
        }
        for (n, (alpha, beta)) in self.steps.iter().enumerate() {
            if alpha.source() != &self.modules[n] || alpha.target() != &self.modules[n + 1] {
                return Err(Error::InvalidChain(format!("alpha_{n} endpoints wrong")));
            }
            if beta.source() != &self.modules[n + 1] || beta.target() != &self.modules[n] {
                return Err(Error::InvalidChain(format!("beta_{n} endpoints wrong")));
            }
            if !alpha.is_intertwiner() || !beta.is_intertwiner() {
                return Err(Error::InvalidChain(format!("step {n} not a morphism")));
            }
            if !alpha.is_surjective() {
                return Err(Error::InvalidChain(format!("alpha_{n} not epic")));
            }
            if !beta.is_injective() {
                return Err(Error::InvalidChain(format!("beta_{n} not monic")));
            }
        }
        Ok(())
    }

    /// Least N such that every alpha_n, beta_n with n >= N in the prefix is
    /// an isomorphism; None when the prefix ends before stabilization.
    pub fn stabilize(&self) -> Result<Option<usize>> {
        self.validate()?;
        let iso = |n: usize| {
            let (a, b) = &self.steps[n];
            a.is_isomorphism() && b.is_isomorphism()
        };
        let mut n = self.steps.len();
        while n > 0 && iso(n - 1) {
            n -= 1;
        }
        if n == self.steps.len() && !self.steps.is_empty() {
            return Ok(None);
        }
        Ok(Some(n))
    }
}

/// Random submodule of a small free module over `algebra`, retried until the
/// dimension is at most `max_dim`. Used to build varied, always-valid test
/// modules.
pub fn random_module(algebra: &Arc<Algebra>, max_dim: usize, seed: u64) -> Result<Module> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let regular = algebra.regular_module()?;
    let p = algebra.field().p();
    loop {
        let copies = rng.gen_range(1..=3usize);
        let (free, _, _) = direct_sum_over(algebra, &vec![regular.clone(); copies])?;
        let gens: Vec<Vec<u64>> = (0..rng.gen_range(1..=2usize))
            .map(|_| (0..free.dim()).map(|_| rng.gen_range(0..p)).collect())
            .collect();
        let (sub, _) = submodule_closure(&free, &gens)?;
        if sub.dim() <= max_dim {
            return Ok(sub);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn arc(a: Algebra) -> Arc<Algebra> {
        Arc::new(a)
    }

    #[test]
    fn validate_module_examples() {
        let a = arc(corpus::dual_numbers(2).unwrap());
        assert!(Module::zero(Arc::clone(&a)).is_valid());
        assert!(a.regular_module().unwrap().is_valid());

        // break the unit action
        let f = a.field();
        let bad = Module::new(
            Arc::clone(&a),
            1,
            vec![Mat::zero(f, 1, 1), Mat::zero(f, 1, 1)],
        )
        .unwrap();
        assert!(!bad.is_valid());
    }

    #[test]
    fn hom_examples() {
        let a = arc(corpus::dual_numbers(2).unwrap());
        let reg = a.regular_module().unwrap();
        // End of the regular module of F_2[x]/(x^2) is 2-dimensional
        let homs = hom_basis(&reg, &reg).unwrap();
        assert_eq!(homs.len(), 2);
        // identity is in the span
        let hs = hom_space(&reg, &reg).unwrap();
        assert!(hs
            .coords_of(&Mat::identity(a.field(), 2))
            .unwrap()
            .is_some());

        // simples of UT_2 at e11 and e22 are not isomorphic: Hom = 0
        let ut = arc(corpus::upper_triangular_2x2(2).unwrap());
        let s1 = simple_ut2(&ut, 0);
        let s2 = simple_ut2(&ut, 2);
        assert!(hom_basis(&s1, &s2).unwrap().is_empty());
    }

    /// 1-dimensional UT_2 module where E_{ii} (basis index i) acts as 1 and
    /// the other basis vectors act as 0.
    fn simple_ut2(a: &Arc<Algebra>, unit_idx: usize) -> Module {
        let f = a.field();
        let action: Vec<Mat> = (0..3)
            .map(|i| {
                Mat::new(f, 1, 1, vec![u64::from(i == unit_idx)]).unwrap()
            })
            .collect();
        let m = Module::new(Arc::clone(a), 1, action).unwrap();
        assert!(m.is_valid());
        m
    }

    #[test]
    fn end_algebra_examples() {
        // simple 1-dim module over F_2: End = F_2
        let a = arc(corpus::field_algebra(2).unwrap());
        let reg = a.regular_module().unwrap();
        let end = end_algebra(&reg).unwrap();
        assert_eq!(end.algebra.dim(), 1);
        assert!(end.algebra.is_valid());

        // End of regular F_2[x]/(x^2): 2-dimensional
        let d = arc(corpus::dual_numbers(2).unwrap());
        let end = end_algebra(&d.regular_module().unwrap()).unwrap();
        assert_eq!(end.algebra.dim(), 2);
        assert!(end.algebra.is_valid());

        // F_2^2 over F_2: End = M_2(F_2), dim 4
        let f2 = arc(corpus::field_algebra(2).unwrap());
        let reg = f2.regular_module().unwrap();
        let (sum, _, _) = direct_sum(&[reg.clone(), reg]).unwrap();
        let end = end_algebra(&sum).unwrap();
        assert_eq!(end.algebra.dim(), 4);
        assert!(end.algebra.is_valid());

        assert!(matches!(
            end_algebra(&Module::zero(Arc::clone(&f2))),
            Err(Error::ZeroModule)
        ));
    }

    #[test]
    fn kernel_examples() {
        let d = arc(corpus::dual_numbers(2).unwrap());
        let reg = d.regular_module().unwrap();
        // kernel of identity = 0
        let (k, _) = kernel_module(&Morphism::identity(&reg)).unwrap();
        assert_eq!(k.dim(), 0);
        // kernel of zero = whole module
        let z = Morphism::new(
            reg.clone(),
            reg.clone(),
            Mat::zero(d.field(), 2, 2),
        )
        .unwrap();
        let (k, incl) = kernel_module(&z).unwrap();
        assert_eq!(k.dim(), 2);
        assert!(incl.is_injective());
        // kernel of the action of x is 1-dimensional
        let x_action = reg.action_of(&d.basis_element(1));
        let phi = Morphism::new(reg.clone(), reg.clone(), x_action).unwrap();
        let (k, incl) = kernel_module(&phi).unwrap();
        assert_eq!(k.dim(), 1);
        assert!(k.is_valid());
        // phi o incl = 0
        assert!(incl.then(&phi).unwrap().mat().is_zero());
    }

    #[test]
    fn kernel_is_a_weak_kernel() {
        // any psi with phi o psi = 0 factors uniquely through the inclusion
        let d = arc(corpus::dual_numbers(2).unwrap());
        let reg = d.regular_module().unwrap();
        let x_action = reg.action_of(&d.basis_element(1));
        let phi = Morphism::new(reg.clone(), reg.clone(), x_action.clone()).unwrap();
        let (k, incl) = kernel_module(&phi).unwrap();
        // psi = x-action itself: phi o psi = x^2 = 0
        let psi = Morphism::new(reg.clone(), reg.clone(), x_action).unwrap();
        assert!(psi.then(&phi).unwrap().mat().is_zero());
        // factor: solve psi = theta o incl row by row
        let f = d.field();
        let mut theta = Mat::zero(f, reg.dim(), k.dim());
        for r in 0..reg.dim() {
            let rhs = psi.mat().row(r).to_vec();
            // incl matrix is k.dim() x reg.dim(); solve c * incl = rhs
            let sol = incl.mat().transpose().solve(&rhs).unwrap().unwrap();
            for c in 0..k.dim() {
                theta.set(r, c, sol[c]);
            }
        }
        assert_eq!(theta.mul(incl.mat()).unwrap(), *psi.mat());
        // uniqueness: incl is injective, so the factorization is unique
        assert!(incl.is_injective());
    }

    #[test]
    fn direct_sum_identities() {
        let f2 = arc(corpus::field_algebra(2).unwrap());
        let reg = f2.regular_module().unwrap();
        // empty family over the algebra
        let (z, _, _) = direct_sum_over(&f2, &[]).unwrap();
        assert_eq!(z.dim(), 0);
        // single part
        let (s, i, p) = direct_sum(&[reg.clone()]).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(i[0].mat().is_identity());
        assert!(p[0].mat().is_identity());
        // two parts
        let (s, inj, proj) = direct_sum(&[reg.clone(), reg.clone()]).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.is_valid());
        let f = f2.field();
        let mut total = Mat::zero(f, 2, 2);
        for j in 0..2 {
            for l in 0..2 {
                let comp = proj[j].then(&inj[l]).unwrap();
                let _ = comp;
                let pi = inj[j].then(&proj[l]).unwrap();
                if j == l {
                    assert!(pi.mat().is_identity());
                } else {
                    assert!(pi.mat().is_zero());
                }
            }
            total = total
                .add(&proj[j].then(&inj[j]).unwrap().mat().clone())
                .unwrap();
        }
        assert!(total.is_identity());
    }

    #[test]
    fn find_isomorphism_examples() {
        let d = arc(corpus::dual_numbers(2).unwrap());
        let reg = d.regular_module().unwrap();
        match find_isomorphism(&reg, &reg, 0, 32).unwrap() {
            IsoResult::Iso(m) => assert!(m.is_isomorphism()),
            _ => panic!("self-isomorphism not found"),
        }

        let ut = arc(corpus::upper_triangular_2x2(2).unwrap());
        let s1 = simple_ut2(&ut, 0);
        let s2 = simple_ut2(&ut, 2);
        assert!(matches!(
            find_isomorphism(&s1, &s2, 0, 32).unwrap(),
            IsoResult::NotIsomorphic
        ));

        // basis-permuted copy of the regular module
        let f = d.field();
        let perm = Mat::new(f, 2, 2, vec![0, 1, 1, 0]).unwrap();
        let perm_inv = perm.invert().unwrap();
        let action: Vec<Mat> = reg
            .action()
            .iter()
            .map(|a| perm_inv.mul(a).unwrap().mul(&perm).unwrap())
            .collect();
        let twisted = Module::new(Arc::clone(&d), 2, action).unwrap();
        assert!(twisted.is_valid());
        match find_isomorphism(&reg, &twisted, 0, 64).unwrap() {
            IsoResult::Iso(m) => assert!(m.is_isomorphism() && m.is_intertwiner()),
            r => panic!("expected isomorphism, got {r:?}"),
        }
    }

    #[test]
    fn hom_dimension_invariant_under_conjugation() {
        use rand::{Rng, SeedableRng};
        let ut = arc(corpus::upper_triangular_2x2(2).unwrap());
        let reg = ut.regular_module().unwrap();
        let f = ut.field();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let base = hom_basis(&reg, &reg).unwrap().len();
        for _ in 0..10 {
            let g = loop {
                let data: Vec<u64> = (0..9).map(|_| rng.gen_range(0..2)).collect();
                let g = Mat::new(f, 3, 3, data).unwrap();
                if g.is_invertible() {
                    break g;
                }
            };
            let ginv = g.invert().unwrap();
            let action: Vec<Mat> = reg
                .action()
                .iter()
                .map(|a| ginv.mul(a).unwrap().mul(&g).unwrap())
                .collect();
            let twisted = Module::new(Arc::clone(&ut), 3, action).unwrap();
            assert!(twisted.is_valid());
            assert_eq!(hom_basis(&twisted, &twisted).unwrap().len(), base);
        }
    }

    #[test]
    fn phi_examples() {
        // e = 1: End(regular) = Lambda
        let d = arc(corpus::dual_numbers(2).unwrap());
        let r = phi_corner_iso(&d, &d.unit().to_vec()).unwrap();
        assert_eq!(r.end_dim, 2);
        assert_eq!(r.corner_dim, 2);
        assert!(r.is_ring_isomorphism());

        let prod = arc(corpus::product_f2_f2().unwrap());
        let r = phi_corner_iso(&prod, &[1, 0]).unwrap();
        assert_eq!(r.end_dim, 1);
        assert_eq!(r.corner_dim, 1);
        assert!(r.is_ring_isomorphism());

        let m2 = arc(corpus::matrix_algebra_2x2(2).unwrap());
        let e11 = corpus::m2_unit_element(&m2, 0, 0);
        let r = phi_corner_iso(&m2, &e11).unwrap();
        assert_eq!(r.end_dim, 1);
        assert_eq!(r.corner_dim, 1);
        assert!(r.is_ring_isomorphism());
    }

    #[test]
    fn bichain_examples() {
        let f2 = arc(corpus::field_algebra(2).unwrap());
        let reg = f2.regular_module().unwrap();
        // constant identity chain stabilizes at 0
        let chain = BiChain {
            modules: vec![reg.clone(), reg.clone(), reg.clone()],
            steps: vec![
                (Morphism::identity(&reg), Morphism::identity(&reg)),
                (Morphism::identity(&reg), Morphism::identity(&reg)),
            ],
        };
        assert_eq!(chain.stabilize().unwrap(), Some(0));

        // F_2^2 ->> F_2 >-> ... then constant: stabilizes at 1
        let (two, _, proj) = direct_sum(&[reg.clone(), reg.clone()]).unwrap();
        let alpha0 = proj[0].clone();
        let f = f2.field();
        let beta0 = Morphism::new(reg.clone(), two.clone(), Mat::new(f, 1, 2, vec![1, 0]).unwrap())
            .unwrap();
        let chain = BiChain {
            modules: vec![two, reg.clone(), reg.clone()],
            steps: vec![
                (alpha0, beta0),
                (Morphism::identity(&reg), Morphism::identity(&reg)),
            ],
        };
        assert_eq!(chain.stabilize().unwrap(), Some(1));

        // prefix ending on a non-isomorphism step: not stabilized
        let (two, _, proj) = direct_sum(&[reg.clone(), reg.clone()]).unwrap();
        let alpha0 = proj[0].clone();
        let beta0 = Morphism::new(reg.clone(), two.clone(), Mat::new(f, 1, 2, vec![1, 0]).unwrap())
            .unwrap();
        let chain = BiChain {
            modules: vec![two, reg.clone()],
            steps: vec![(alpha0, beta0)],
        };
        assert_eq!(chain.stabilize().unwrap(), None);

        // invalid chain: alpha not epic
        let z = Morphism::new(reg.clone(), reg.clone(), Mat::zero(f, 1, 1)).unwrap();
        let chain = BiChain {
            modules: vec![reg.clone(), reg.clone()],
            steps: vec![(z.clone(), Morphism::identity(&reg))],
        };
        assert!(matches!(chain.stabilize(), Err(Error::InvalidChain(_))));
    }

    #[test]
    fn bichain_stabilizes_within_dimension_bound() {
        // dimension is non-increasing along a valid bi-chain, so any valid
        // prefix longer than dim X_0 that ends in identities stabilizes
        let f2 = arc(corpus::field_algebra(2).unwrap());
        let reg = f2.regular_module().unwrap();
        let (two, _, proj) = direct_sum(&[reg.clone(), reg.clone()]).unwrap();
        let f = f2.field();
        let beta0 = Morphism::new(reg.clone(), two.clone(), Mat::new(f, 1, 2, vec![0, 1]).unwrap())
            .unwrap();
        let mut modules = vec![two.clone(), reg.clone()];
        let mut steps = vec![(proj[1].clone(), beta0)];
        for _ in 0..3 {
            modules.push(reg.clone());
            steps.push((Morphism::identity(&reg), Morphism::identity(&reg)));
        }
        let chain = BiChain { modules, steps };
        let n = chain.stabilize().unwrap();
        assert_eq!(n, Some(1));
    }

    #[test]
    fn random_modules_are_valid() {
        let ut = arc(corpus::upper_triangular_2x2(3).unwrap());
        for seed in 0..10 {
            let m = random_module(&ut, 8, seed).unwrap();
            assert!(m.is_valid());
            assert!(m.dim() <= 8);
        }
    }
}
