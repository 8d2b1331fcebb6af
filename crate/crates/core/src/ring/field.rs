//! The residue field F_q = F_p[x]/(g) with a fixed modulus g.

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Coefficients (low degree first) of a polynomial over F_p from its base-p code.
fn poly_from_code(mut code: u64, p: u64, len: usize) -> Vec<u64> {
    let mut c = vec![0; len];
    for slot in c.iter_mut() {
        *slot = code % p;
        code /= p;
    }
    c
}

/// Remainder of `a` modulo the monic polynomial `m` (both low degree first, `m` includes its leading 1).
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > dm {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let base = r.len() - dm;
            for i in 0..dm {
                r[base + i] = (r[base + i] + (p - lead) * m[i]) % p;
            }
        }
    }
    r
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(monic: &[u64], p: u64) -> bool {
    let deg = monic.len() - 1;
    for d in 1..=deg / 2 {
        for code in 0..p.pow(d as u32) {
            let mut div = poly_from_code(code, p, d);
            div.push(1);
            if poly_rem(monic, &div, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lowest non-leading coefficients of the smallest monic irreducible of degree `f`,
/// ordered by the base-p code `c_0 + c_1 p + ... + c_{f-1} p^{f-1}`.
pub fn smallest_irreducible(p: u64, f: u32) -> Result<Vec<u64>> {
    let total = p.checked_pow(f).ok_or(Error::NoIrreducible { p, f })?;
    for code in 0..total {
        let mut g = poly_from_code(code, p, f as usize);
        g.push(1);
        if is_irreducible(&g, p) {
            g.pop();
            return Ok(g);
        }
    }
    Err(Error::NoIrreducible { p, f })
}

#[derive(Debug, Clone)]
pub struct ResidueField {
    p: u64,
    f: u32,
    q: u64,
    modulus: Vec<u64>,
    p_pows: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl ResidueField {
    pub fn new(p: u64, f: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let q = p.checked_pow(f).ok_or_else(|| Error::InvalidParams("q overflows".into()))?;
        if q > u32::MAX as u64 {
            return Err(Error::InvalidParams("residue field too large".into()));
        }
        let modulus = smallest_irreducible(p, f)?;
        let p_pows = (0..f).map(|i| p.pow(i)).collect();
        let mut field = ResidueField { p, f, q, modulus, p_pows, exp: Vec::new(), log: Vec::new() };
        field.build_log_tables()?;
        Ok(field)
    }

    fn slow_mul(&self, a: u64, b: u64) -> u64 {
        let f = self.f as usize;
        let (pa, pb) = (poly_from_code(a, self.p, f), poly_from_code(b, self.p, f));
        let mut prod = vec![0u64; 2 * f - 1];
        for (i, &x) in pa.iter().enumerate() {
            for (j, &y) in pb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let mut m = self.modulus.clone();
        m.push(1);
        let r = poly_rem(&prod, &m, self.p);
        r.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn slow_pow(&self, a: u64, mut e: u64) -> u64 {
        let (mut base, mut acc) = (a, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_log_tables(&mut self) -> Result<()> {
        let order = self.q - 1;
        let factors = prime_factors(order);
        let generator = (1..self.q)
            .find(|&g| factors.iter().all(|&r| self.slow_pow(g, order / r) != 1))
            .ok_or_else(|| Error::Internal("no primitive element".into()))?;
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; self.q as usize];
        let mut x = 1u64;
        for i in 0..order {
            exp.push(x as u32);
            log[x as usize] = i as u32;
            x = self.slow_mul(x, generator);
        }
        if x != 1 || log.iter().skip(1).any(|&l| l == u32::MAX) {
            return Err(Error::Internal("log table incomplete".into()));
        }
        self.exp = exp;
        self.log = log;
        Ok(())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Non-leading coefficients of the modulus, low degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn check(&self, a: u32) -> Result<u32> {
        if (a as u64) < self.q {
            Ok(a)
        } else {
            Err(Error::NotAResidue(a as u64))
        }
    }

    /// Base-p coefficient vector of an element.
    pub fn coefficients(&self, a: u32) -> Vec<u64> {
        poly_from_code(a as u64, self.p, self.f as usize)
    }

    pub fn from_coefficients(&self, c: &[u64]) -> u32 {
        c.iter().zip(&self.p_pows).map(|(&ci, &pw)| (ci % self.p) * pw).sum::<u64>() as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.f == 1 {
            return ((a as u64 + b as u64) % self.p) as u32;
        }
        let (mut a, mut b) = (a as u64, b as u64);
        let mut out = 0;
        for &pw in &self.p_pows {
            out += ((a % self.p + b % self.p) % self.p) * pw;
            a /= self.p;
            b /= self.p;
        }
        out as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        let mut a = a as u64;
        let mut out = 0;
        for &pw in &self.p_pows {
            out += ((self.p - a % self.p) % self.p) * pw;
            a /= self.p;
        }
        out as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q - 1;
        let l = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % n;
        self.exp[l as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.q - 1;
        let l = (n - self.log[a as usize] as u64) % n;
        Some(self.exp[l as usize])
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q as u32
    }

    pub fn units(&self) -> impl Iterator<Item = u32> {
        1..self.q as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(3) && is_prime(101));
        assert!(!is_prime(1) && !is_prime(9) && !is_prime(0));
    }

    #[test]
    fn smallest_moduli() {
        assert_eq!(smallest_irreducible(2, 1).unwrap(), vec![0]);
        assert_eq!(smallest_irreducible(2, 2).unwrap(), vec![1, 1]); // x^2+x+1
        assert_eq!(smallest_irreducible(2, 3).unwrap(), vec![1, 1, 0]); // x^3+x+1
        assert_eq!(smallest_irreducible(3, 2).unwrap(), vec![1, 0]); // x^2+1
        assert_eq!(smallest_irreducible(2, 4).unwrap(), vec![1, 1, 0, 0]); // x^4+x+1
    }

    #[test]
    fn field_axioms_small() {
        for (p, f) in [(2, 1), (3, 1), (2, 2), (2, 3), (3, 2), (2, 4), (5, 1)] {
            let k = ResidueField::new(p, f).unwrap();
            for a in k.elements() {
                assert_eq!(k.add(a, k.neg(a)), 0);
                if a != 0 {
                    assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
                }
                for b in k.elements() {
                    assert_eq!(k.mul(a, b), k.slow_mul(a as u64, b as u64) as u32);
                    if a != 0 && b != 0 {
                        assert_ne!(k.mul(a, b), 0, "zero divisor in F_{}", k.order());
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_composite() {
        assert_eq!(ResidueField::new(4, 1).unwrap_err(), Error::NotPrime(4));
    }
}
