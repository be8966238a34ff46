use crate::error::{Error, Result};
use crate::field::Fp;
use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Univariate polynomial over F_p. Coefficients indexed by degree; the
/// leading coefficient is nonzero unless the polynomial is zero (empty vec).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    field: Fp,
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(field: Fp, mut coeffs: Vec<u64>) -> Self {
        for c in &mut coeffs {
            *c %= field.p();
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: Fp) -> Self {
        Poly { field, coeffs: vec![] }
    }

    pub fn one(field: Fp) -> Self {
        Poly { field, coeffs: vec![1] }
    }

    pub fn constant(field: Fp, c: u64) -> Self {
        Poly::new(field, vec![c])
    }

    /// The monomial t.
    pub fn t(field: Fp) -> Self {
        Poly { field, coeffs: vec![0, 1] }
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0u64; n];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.field.add(self.coeff(i), other.coeff(i));
        }
        Poly::new(self.field, out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0u64; n];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.field.sub(self.coeff(i), other.coeff(i));
        }
        Poly::new(self.field, out)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = self.field.add(out[i + j], self.field.mul(a, b));
            }
        }
        Poly::new(self.field, out)
    }

    pub fn scale(&self, c: u64) -> Poly {
        Poly::new(
            self.field,
            self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect(),
        )
    }

    pub fn monic(&self) -> Poly {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&lc) => {
                if lc == 1 {
                    self.clone()
                } else {
                    self.scale(self.field.inv(lc).expect("leading coefficient nonzero"))
                }
            }
        }
    }

    /// Euclidean division: self = q * div + r with deg r < deg div.
    pub fn divrem(&self, div: &Poly) -> Result<(Poly, Poly)> {
        if div.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let f = self.field;
        let dlc_inv = f.inv(*div.coeffs.last().unwrap())?;
        let dd = div.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = f.mul(rem[i], dlc_inv);
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &dc) in div.coeffs.iter().enumerate() {
                rem[i - dd + j] = f.sub(rem[i - dd + j], f.mul(c, dc));
            }
        }
        Ok((Poly::new(f, quot), Poly::new(f, rem)))
    }

    pub fn rem(&self, div: &Poly) -> Result<Poly> {
        Ok(self.divrem(div)?.1)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(self.field);
        }
        let out: Vec<u64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.field.mul(c, (i as u64) % self.field.p()))
            .collect();
        Poly::new(self.field, out)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = self.field.add(self.field.mul(acc, x), c);
        }
        acc
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// Extended gcd: returns (g, u, v) monic with u*self + v*other = g.
    pub fn egcd(&self, other: &Poly) -> Result<(Poly, Poly, Poly)> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let f = self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1)?;
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return Ok((r0, s0, t0));
        }
        let lc_inv = f.inv(*r0.coeffs.last().unwrap())?;
        Ok((r0.scale(lc_inv), s0.scale(lc_inv), t0.scale(lc_inv)))
    }

    /// self^exp mod m, exponent given as a big integer.
    pub fn pow_mod(&self, exp: &BigUint, m: &Poly) -> Result<Poly> {
        let mut acc = Poly::one(self.field).rem(m)?;
        let mut base = self.rem(m)?;
        for i in 0..exp.bits() {
            if exp.bit(i) {
                acc = acc.mul(&base).rem(m)?;
            }
            base = base.mul(&base).rem(m)?;
        }
        Ok(acc)
    }

    /// Full factorization of a monic polynomial of degree >= 1 into monic
    /// irreducible powers, sorted by (degree, lexicographic coefficients).
    /// Squarefree split, then distinct-degree, then Cantor-Zassenhaus
    /// equal-degree splitting driven by `seed`.
    pub fn factor(&self, seed: u64) -> Result<Vec<(Poly, u32)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !self.is_monic() {
            return Err(Error::NotMonic);
        }
        if self.degree() == Some(0) {
            return Err(Error::ZeroPolynomial);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out: Vec<(Poly, u32)> = Vec::new();
        for (sqfree, mult) in self.squarefree_decomposition()? {
            for irr in sqfree.factor_squarefree(&mut rng)? {
                out.push((irr, mult));
            }
        }
        out.sort_by(|a, b| {
            (a.0.coeffs.len(), &a.0.coeffs).cmp(&(b.0.coeffs.len(), &b.0.coeffs))
        });
        Ok(out)
    }

    /// Squarefree decomposition in characteristic p: returns pairwise coprime
    /// monic squarefree polynomials with multiplicities whose powers multiply
    /// back to self.
    fn squarefree_decomposition(&self) -> Result<Vec<(Poly, u32)>> {
        let f = self.field;
        let p = f.p();
        let mut parts: Vec<(Poly, u32)> = Vec::new();
        let mut work = self.monic();
        let mut outer_mult = 1u32;
        loop {
            let d = work.derivative();
            if d.is_zero() {
                // work = h(t^p); in F_p the p-th root keeps every p-th coefficient
                let mut root = Vec::new();
                let mut i = 0usize;
                while i < work.coeffs.len() {
                    root.push(work.coeffs[i]);
                    i += p as usize;
                }
                work = Poly::new(f, root);
                outer_mult *= p as u32;
                if work.degree() == Some(0) {
                    break;
                }
                continue;
            }
            let g = work.gcd(&d)?;
            // w = product of squarefree parts at multiplicity not divisible by p
            let mut w = work.divrem(&g)?.0;
            let mut g = g;
            let mut i = 1u32;
            while w.degree() != Some(0) {
                let y = w.gcd(&g)?;
                let fac = w.divrem(&y)?.0;
                if fac.degree().map(|d| d >= 1).unwrap_or(false) {
                    parts.push((fac.monic(), i * outer_mult));
                }
                w = y;
                g = g.divrem(&w)?.0;
                i += 1;
            }
            if g.degree() == Some(0) || g.is_zero() {
                break;
            }
            work = g;
            // remaining g = product of factors with multiplicity divisible by p,
            // handled by the derivative-zero branch on the next pass
        }
        Ok(parts)
    }

    /// Factor a monic squarefree polynomial into monic irreducibles.
    fn factor_squarefree(&self, rng: &mut ChaCha8Rng) -> Result<Vec<Poly>> {
        let f = self.field;
        let p = BigUint::from(f.p());
        let mut out = Vec::new();
        let t = Poly::t(f);
        let mut work = self.monic();
        let mut frob = t.pow_mod(&p, &work)?; // t^(p^d) mod work, d tracked below
        let mut d = 1usize;
        while let Some(deg) = work.degree() {
            if deg == 0 {
                break;
            }
            if deg < 2 * d {
                // remainder is irreducible
                out.push(work.monic());
                break;
            }
            let split = frob.sub(&t).gcd(&work)?;
            if split.degree().map(|e| e >= 1).unwrap_or(false) {
                out.extend(split.equal_degree_factor(d, rng)?);
                work = work.divrem(&split)?.0;
                frob = frob.rem(&work)?;
            }
            frob = frob.pow_mod(&p, &work)?;
            d += 1;
        }
        Ok(out)
    }

    /// Cantor-Zassenhaus equal-degree splitting: self is monic squarefree,
    /// a product of irreducibles all of degree d.
    fn equal_degree_factor(&self, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Poly>> {
        let deg = self.degree().unwrap_or(0);
        if deg == d {
            return Ok(vec![self.monic()]);
        }
        let f = self.field;
        let p = f.p();
        loop {
            let a = Poly::new(f, (0..deg).map(|_| rng.gen_range(0..p)).collect());
            if a.degree().map(|e| e < 1).unwrap_or(true) {
                continue;
            }
            let g = if p == 2 {
                // trace map a + a^2 + a^4 + ... + a^(2^(d-1))
                let mut tr = a.rem(self)?;
                let mut pw = a.rem(self)?;
                for _ in 1..d {
                    pw = pw.mul(&pw).rem(self)?;
                    tr = tr.add(&pw);
                }
                tr.gcd(self)?
            } else {
                // a^((p^d - 1) / 2) - 1
                let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
                let b = a.pow_mod(&e, self)?;
                b.sub(&Poly::one(f)).gcd(self)?
            };
            if let Some(gd) = g.degree() {
                if gd >= 1 && gd < deg {
                    let rest = self.divrem(&g)?.0;
                    let mut out = g.equal_degree_factor(d, rng)?;
                    out.extend(rest.equal_degree_factor(d, rng)?);
                    return Ok(out);
                }
            }
        }
    }

    /// CRT projector: given monic m with at least two distinct irreducible
    /// factors and a nonempty proper subset `part` of factor indices
    /// (into the canonical `factor` output), returns h with deg h < deg m,
    /// h = 1 modulo the selected factor powers and h = 0 modulo the rest.
    pub fn crt_split(&self, part: &[usize], seed: u64) -> Result<Poly> {
        let factors = self.factor(seed)?;
        if factors.len() < 2 {
            return Err(Error::NoCoprimeSplit);
        }
        if part.is_empty() || part.len() >= factors.len() {
            return Err(Error::InvalidPart);
        }
        let mut seen = vec![false; factors.len()];
        for &i in part {
            if i >= factors.len() || seen[i] {
                return Err(Error::InvalidPart);
            }
            seen[i] = true;
        }
        let f = self.field;
        let mut sel = Poly::one(f);
        let mut com = Poly::one(f);
        for (i, (q, mult)) in factors.iter().enumerate() {
            let mut power = Poly::one(f);
            for _ in 0..*mult {
                power = power.mul(q);
            }
            if seen[i] {
                sel = sel.mul(&power);
            } else {
                com = com.mul(&power);
            }
        }
        // u*sel + v*com = 1; h = v*com is 1 mod sel, 0 mod com
        let (g, _u, v) = sel.egcd(&com)?;
        if g.degree() != Some(0) {
            return Err(Error::NoCoprimeSplit);
        }
        v.mul(&com).rem(self)
    }
}
