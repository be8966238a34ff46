use crate::error::{Error, Result};

/// A prime field F_p, 2 <= p <= 2^31 - 1. Elements are `u64` values fully
/// reduced modulo p; products fit in `u64` without overflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || p > (1 << 31) - 1 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Fp { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a % self.p == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.p - 2))
    }

    /// Reduce a signed integer into [0, p).
    pub fn reduce_i64(&self, v: i64) -> u64 {
        let p = self.p as i64;
        (v.rem_euclid(p)) as u64
    }
}

/// Deterministic Miller-Rabin, valid for all n < 3_215_031_751.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7] {
        let mut x = mod_pow_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mod_pow_u128(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b = base as u128 % m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites_and_accepts_primes() {
        assert!(Fp::new(2).is_ok());
        assert!(Fp::new(3).is_ok());
        assert!(Fp::new(2147483647).is_ok()); // 2^31 - 1 is prime
        assert!(Fp::new(1).is_err());
        assert!(Fp::new(4).is_err());
        assert!(Fp::new(561).is_err()); // Carmichael
        assert!(Fp::new(0).is_err());
    }

    #[test]
    fn inverse_examples() {
        let f7 = Fp::new(7).unwrap();
        assert_eq!(f7.inv(1).unwrap(), 1);
        let f5 = Fp::new(5).unwrap();
        assert_eq!(f5.inv(2).unwrap(), 3);
        assert_eq!(f5.inv(4).unwrap(), 4);
        assert_eq!(f5.inv(0), Err(Error::ZeroInverse));
    }

    #[test]
    fn inverse_is_an_involution() {
        let f = Fp::new(101).unwrap();
        for a in 1..101 {
            assert_eq!(f.inv(f.inv(a).unwrap()).unwrap(), a);
        }
    }
}
