//! Exact arithmetic in O/𝔭^N for an extension of Q_p with residue degree `f`
//! and ramification index `e`.
//!
//! The concrete model is `W[y]/(y^e - p)` where `W = Z_p[x]/(g)` and `g` is the
//! smallest monic irreducible of degree `f` over F_p. The uniformizer is `y`.
//! Elements are stored by their canonical index `Σ d_n q^n`, where
//! `x = Σ ψ(d_n) y^n` and ψ is the Teichmüller section. Truncating the index
//! modulo `q^k` is the projection to O/𝔭^k, so an element of level `k` is the
//! same index as its Teichmüller-digit section at any higher level.

mod field;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use field::{is_irreducible, is_prime, smallest_irreducible, ResidueField};

pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 20;
const MAX_ENUMERATION_CAP: u64 = 1 << 32;
const MAX_SLOTS: usize = 32;

type Coeffs = [u64; MAX_SLOTS];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u64; 4]", into = "[u64; 4]")]
pub struct RingParams {
    pub p: u64,
    pub f: u32,
    pub e: u32,
    pub n: u32,
}

impl RingParams {
    pub fn new(p: u64, f: u32, e: u32, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if f == 0 || e == 0 || n == 0 {
            return Err(Error::InvalidParams(format!("f, e, N must be >= 1 (got f={f}, e={e}, N={n})")));
        }
        let params = RingParams { p, f, e, n };
        let total: u32 = (0..e).map(|j| params.precision(n, j)).sum();
        if total != n || e * n.div_ceil(e) < n {
            return Err(Error::Internal("inconsistent precision bookkeeping".into()));
        }
        Ok(params)
    }

    /// Residue field size q = p^f.
    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }

    /// q^k, if it fits.
    pub fn order_at(&self, k: u32) -> Option<u64> {
        self.q().checked_pow(k)
    }

    /// `ceil((level - j) / e)`: p-adic precision of the coefficient of `y^j` at `level`.
    pub fn precision(&self, level: u32, j: u32) -> u32 {
        level.saturating_sub(j).div_ceil(self.e)
    }
}

impl fmt::Display for RingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.p, self.f, self.e, self.n)
    }
}

impl FromStr for RingParams {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim_matches(|c| c == '(' || c == ')').split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("ring must be p,f,e,N: {s:?}")));
        }
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad integer {t:?}")));
        let to32 = |v: u64| u32::try_from(v).map_err(|_| Error::Parse(format!("{v} too large")));
        RingParams::new(num(parts[0])?, to32(num(parts[1])?)?, to32(num(parts[2])?)?, to32(num(parts[3])?)?)
    }
}

impl TryFrom<[u64; 4]> for RingParams {
    type Error = Error;
    fn try_from(v: [u64; 4]) -> Result<Self> {
        let to32 = |x: u64| u32::try_from(x).map_err(|_| Error::Parse(format!("{x} too large")));
        RingParams::new(v[0], to32(v[1])?, to32(v[2])?, to32(v[3])?)
    }
}

impl From<RingParams> for [u64; 4] {
    fn from(r: RingParams) -> Self {
        [r.p, r.f as u64, r.e as u64, r.n as u64]
    }
}

/// An element of O/𝔭^level, identified by its canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElem {
    level: u32,
    index: u64,
}

impl RingElem {
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Canonical index `Σ d_n q^n`.
    pub fn index(&self) -> u64 {
        self.index
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
}

/// Descriptor of O/𝔭^N: parameters, residue field and conversion tables.
pub struct Ring {
    params: RingParams,
    field: ResidueField,
    q: u64,
    q_pows: Vec<u64>,
    f: usize,
    y_slots: usize,
    slots: usize,
    mods: Coeffs,
    radix: Coeffs,
    big_mod: u64,
    digit_to_coeff: Vec<u32>,
    coeff_to_digit: Vec<u32>,
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ring").field("params", &self.params).field("residue_poly", &self.field.modulus()).finish()
    }
}

impl Ring {
    pub fn new(params: RingParams) -> Result<Arc<Ring>> {
        Ring::with_cap(params, DEFAULT_ENUMERATION_CAP)
    }

    pub fn from_parts(p: u64, f: u32, e: u32, n: u32) -> Result<Arc<Ring>> {
        Ring::new(RingParams::new(p, f, e, n)?)
    }

    pub fn with_cap(params: RingParams, cap: u64) -> Result<Arc<Ring>> {
        let params = RingParams::new(params.p, params.f, params.e, params.n)?;
        let cap = cap.min(MAX_ENUMERATION_CAP);
        let order = params.order_at(params.n).filter(|&o| o <= cap).ok_or(Error::CapExceeded {
            what: "ring order q^N",
            needed: (params.q() as u128).saturating_pow(params.n),
            cap: cap as u128,
        })?;
        let field = ResidueField::new(params.p, params.f)?;
        let q = params.q();
        let f = params.f as usize;
        let y_slots = params.e.min(params.n) as usize;
        let slots = f * y_slots;
        if slots > MAX_SLOTS {
            return Err(Error::InvalidParams("too many coefficient slots".into()));
        }
        let mut mods = [1u64; MAX_SLOTS];
        let mut radix = [0u64; MAX_SLOTS];
        let mut r = 1u64;
        for j in 0..y_slots {
            let m = params.p.pow(params.precision(params.n, j as u32));
            for i in 0..f {
                mods[j * f + i] = m;
                radix[j * f + i] = r;
                r *= m;
            }
        }
        if r != order {
            return Err(Error::Internal(format!("coefficient space {r} != q^N {order}")));
        }
        let big_mod = mods[0];
        let q_pows = (0..=params.n).map(|k| q.pow(k)).collect();
        let mut ring = Ring {
            params,
            field,
            q,
            q_pows,
            f,
            y_slots,
            slots,
            mods,
            radix,
            big_mod,
            digit_to_coeff: Vec::new(),
            coeff_to_digit: Vec::new(),
        };
        ring.build_tables(order)?;
        Ok(Arc::new(ring))
    }

    fn build_tables(&mut self, order: u64) -> Result<()> {
        let teich: Vec<Coeffs> = (0..self.q as u32).map(|a| self.teichmuller_coeffs(a)).collect::<Result<_>>()?;
        let mut d2c = vec![0u32; order as usize];
        let mut c2d = vec![u32::MAX; order as usize];
        c2d[0] = 0;
        for i in 1..order as usize {
            let d0 = i % self.q as usize;
            let rest = self.unpack(d2c[i / self.q as usize] as u64);
            let c = self.add_coeffs(&teich[d0], &self.mul_y(&rest));
            let ci = self.pack(&c) as usize;
            if c2d[ci] != u32::MAX {
                return Err(Error::Internal("digit expansion is not injective".into()));
            }
            d2c[i] = ci as u32;
            c2d[ci] = i as u32;
        }
        self.digit_to_coeff = d2c;
        self.coeff_to_digit = c2d;
        Ok(())
    }

    fn teichmuller_coeffs(&self, alpha: u32) -> Result<Coeffs> {
        let mut z = [0u64; MAX_SLOTS];
        for (i, c) in self.field.coefficients(alpha).into_iter().enumerate() {
            z[i] = c % self.mods[i];
        }
        for _ in 0..=self.params.n + 1 {
            let next = self.pow_coeffs(&z, self.q);
            if next == z {
                return Ok(z);
            }
            z = next;
        }
        Err(Error::Internal(format!("Teichmüller iteration did not converge for {alpha}")))
    }

    fn unpack(&self, mut ci: u64) -> Coeffs {
        let mut c = [0u64; MAX_SLOTS];
        for (s, slot) in c.iter_mut().enumerate().take(self.slots) {
            *slot = ci % self.mods[s];
            ci /= self.mods[s];
        }
        c
    }

    fn pack(&self, c: &Coeffs) -> u64 {
        (0..self.slots).map(|s| c[s] * self.radix[s]).sum()
    }

    fn add_coeffs(&self, a: &Coeffs, b: &Coeffs) -> Coeffs {
        let mut c = [0u64; MAX_SLOTS];
        for s in 0..self.slots {
            c[s] = (a[s] + b[s]) % self.mods[s];
        }
        c
    }

    fn neg_coeffs(&self, a: &Coeffs) -> Coeffs {
        let mut c = [0u64; MAX_SLOTS];
        for s in 0..self.slots {
            c[s] = (self.mods[s] - a[s]) % self.mods[s];
        }
        c
    }

    fn mul_y(&self, a: &Coeffs) -> Coeffs {
        let f = self.f;
        let mut c = [0u64; MAX_SLOTS];
        for j in 0..self.y_slots {
            for i in 0..f {
                let v = a[j * f + i];
                if j + 1 < self.y_slots {
                    c[(j + 1) * f + i] = v % self.mods[(j + 1) * f + i];
                } else if self.y_slots == self.params.e as usize {
                    // y^e = p
                    c[i] = (c[i] + v * self.params.p) % self.mods[i];
                }
            }
        }
        c
    }

    fn mul_coeffs(&self, a: &Coeffs, b: &Coeffs) -> Coeffs {
        let f = self.f;
        let m = self.big_mod;
        let e = self.params.e as usize;
        let g = self.field.modulus();
        let mut out = [0u64; MAX_SLOTS];
        let mut prod = [0u64; 2 * MAX_SLOTS];
        for j in 0..self.y_slots {
            let aj = &a[j * f..(j + 1) * f];
            if aj.iter().all(|&v| v == 0) {
                continue;
            }
            for k in 0..self.y_slots {
                let t = j + k;
                let (slot, factor) = if t < self.y_slots {
                    (t, 1)
                } else if self.y_slots == e {
                    (t - e, self.params.p % m)
                } else {
                    continue;
                };
                let bk = &b[k * f..(k + 1) * f];
                if bk.iter().all(|&v| v == 0) {
                    continue;
                }
                prod[..2 * f].fill(0);
                for (i1, &x) in aj.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (i2, &y) in bk.iter().enumerate() {
                        prod[i1 + i2] = (prod[i1 + i2] + x * y % m) % m;
                    }
                }
                for d in (f..2 * f - 1).rev() {
                    let lead = prod[d];
                    if lead != 0 {
                        for (i, &gi) in g.iter().enumerate() {
                            let sub = lead * gi % m;
                            prod[d - f + i] = (prod[d - f + i] + m - sub) % m;
                        }
                        prod[d] = 0;
                    }
                }
                for (o, &c) in out[slot * f..(slot + 1) * f].iter_mut().zip(&prod[..f]) {
                    *o = (*o + c * factor % m) % m;
                }
            }
        }
        for (o, &md) in out.iter_mut().zip(&self.mods).take(self.slots) {
            *o %= md;
        }
        out
    }

    fn pow_coeffs(&self, a: &Coeffs, mut exp: u64) -> Coeffs {
        let mut acc = [0u64; MAX_SLOTS];
        acc[0] = 1 % self.mods[0];
        let mut base = *a;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_coeffs(&acc, &base);
            }
            base = self.mul_coeffs(&base, &base);
            exp >>= 1;
        }
        acc
    }

    #[inline]
    fn coeffs_of(&self, index: u64) -> Coeffs {
        self.unpack(self.digit_to_coeff[index as usize] as u64)
    }

    #[inline]
    fn index_of(&self, c: &Coeffs) -> u64 {
        self.coeff_to_digit[self.pack(c) as usize] as u64
    }

    // ---- public surface ----

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn field(&self) -> &ResidueField {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Top level N.
    pub fn level(&self) -> u32 {
        self.params.n
    }

    /// |O/𝔭^k| = q^k.
    pub fn order(&self, k: u32) -> u64 {
        self.q_pows[k as usize]
    }

    pub fn check_level(&self, k: u32) -> Result<()> {
        if k > self.params.n {
            Err(Error::LevelOverflow { level: k, max: self.params.n })
        } else {
            Ok(())
        }
    }

    pub fn decode(&self, level: u32, index: u64) -> Result<RingElem> {
        self.check_level(level)?;
        let size = self.order(level);
        if index >= size {
            return Err(Error::IndexOutOfRange { index, size });
        }
        Ok(RingElem { level, index })
    }

    pub fn encode(&self, a: RingElem) -> u64 {
        a.index
    }

    pub fn zero(&self, level: u32) -> RingElem {
        RingElem { level, index: 0 }
    }

    pub fn one(&self, level: u32) -> RingElem {
        RingElem { level, index: (level > 0) as u64 }
    }

    /// The image of the rational integer `n`.
    pub fn from_int(&self, level: u32, n: i64) -> Result<RingElem> {
        self.check_level(level)?;
        let m = self.big_mod as i128;
        let mut c = [0u64; MAX_SLOTS];
        c[0] = ((n as i128).rem_euclid(m) as u64) % self.mods[0];
        Ok(RingElem { level, index: self.index_of(&c) % self.order(level) })
    }

    /// The uniformizer y at `level`.
    pub fn uniformizer(&self, level: u32) -> Result<RingElem> {
        self.check_level(level)?;
        Ok(RingElem { level, index: if level >= 2 { self.q } else { 0 } })
    }

    /// Teichmüller lift ψ(α) at the top level.
    pub fn teichmuller(&self, alpha: u32) -> Result<RingElem> {
        self.field.check(alpha)?;
        Ok(RingElem { level: self.params.n, index: alpha as u64 })
    }

    /// ψ_{0,k}(α).
    pub fn teichmuller_at(&self, alpha: u32, level: u32) -> Result<RingElem> {
        self.field.check(alpha)?;
        self.check_level(level)?;
        Ok(RingElem { level, index: alpha as u64 % self.order(level) })
    }

    /// Coefficients `c_{ij}` (slot `j*f + i`) of the top-level section of `a`.
    pub fn coefficients(&self, a: RingElem) -> Vec<u64> {
        self.coeffs_of(a.index)[..self.slots].to_vec()
    }

    /// Builds a top-level element from coefficients `c_{ij}` (slot `j*f + i`).
    pub fn from_coefficients(&self, c: &[u64]) -> Result<RingElem> {
        if c.len() != self.slots {
            return Err(Error::LengthMismatch(c.len(), self.slots));
        }
        let mut cc = [0u64; MAX_SLOTS];
        for (s, &v) in c.iter().enumerate() {
            cc[s] = v % self.mods[s];
        }
        Ok(RingElem { level: self.params.n, index: self.index_of(&cc) })
    }

    // Index-level kernels: inputs are indices below q^level, which double as
    // their top-level sections; outputs are reduced back to `level`.

    #[inline]
    pub fn add_idx(&self, level: u32, a: u64, b: u64) -> u64 {
        let c = self.add_coeffs(&self.coeffs_of(a), &self.coeffs_of(b));
        self.index_of(&c) % self.q_pows[level as usize]
    }

    #[inline]
    pub fn sub_idx(&self, level: u32, a: u64, b: u64) -> u64 {
        let c = self.add_coeffs(&self.coeffs_of(a), &self.neg_coeffs(&self.coeffs_of(b)));
        self.index_of(&c) % self.q_pows[level as usize]
    }

    #[inline]
    pub fn neg_idx(&self, level: u32, a: u64) -> u64 {
        self.index_of(&self.neg_coeffs(&self.coeffs_of(a))) % self.q_pows[level as usize]
    }

    #[inline]
    pub fn mul_idx(&self, level: u32, a: u64, b: u64) -> u64 {
        self.index_of(&self.mul_coeffs(&self.coeffs_of(a), &self.coeffs_of(b))) % self.q_pows[level as usize]
    }

    fn same_level(a: RingElem, b: RingElem) -> Result<u32> {
        if a.level != b.level {
            Err(Error::LevelMismatch { left: a.level, right: b.level })
        } else {
            Ok(a.level)
        }
    }

    pub fn arith(&self, op: ArithOp, a: RingElem, b: RingElem) -> Result<RingElem> {
        let level = Ring::same_level(a, b)?;
        self.check_level(level)?;
        let index = match op {
            ArithOp::Add => self.add_idx(level, a.index, b.index),
            ArithOp::Sub => self.sub_idx(level, a.index, b.index),
            ArithOp::Mul => self.mul_idx(level, a.index, b.index),
            ArithOp::Neg => self.neg_idx(level, a.index),
        };
        Ok(RingElem { level, index })
    }

    pub fn add(&self, a: RingElem, b: RingElem) -> Result<RingElem> {
        self.arith(ArithOp::Add, a, b)
    }

    pub fn sub(&self, a: RingElem, b: RingElem) -> Result<RingElem> {
        self.arith(ArithOp::Sub, a, b)
    }

    pub fn mul(&self, a: RingElem, b: RingElem) -> Result<RingElem> {
        self.arith(ArithOp::Mul, a, b)
    }

    pub fn neg(&self, a: RingElem) -> RingElem {
        RingElem { level: a.level, index: self.neg_idx(a.level, a.index) }
    }

    pub fn pow(&self, a: RingElem, exp: u64) -> RingElem {
        let c = self.pow_coeffs(&self.coeffs_of(a.index), exp);
        RingElem { level: a.level, index: self.index_of(&c) % self.order(a.level) }
    }

    /// Largest k with a ∈ 𝔭^k, with val(0) = level.
    pub fn val(&self, a: RingElem) -> u32 {
        self.val_idx(a.level, a.index)
    }

    pub fn val_idx(&self, level: u32, mut index: u64) -> u32 {
        if index == 0 {
            return level;
        }
        let mut v = 0;
        while index.is_multiple_of(self.q) {
            index /= self.q;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self, a: RingElem) -> bool {
        a.level > 0 && !a.index.is_multiple_of(self.q)
    }

    /// π_{𝔭^k}.
    pub fn project(&self, a: RingElem, k: u32) -> Result<RingElem> {
        if k > a.level {
            return Err(Error::LevelOverflow { level: k, max: a.level });
        }
        Ok(RingElem { level: k, index: a.index % self.order(k) })
    }

    /// Teichmüller digits `(d_0, ..., d_{level-1})`.
    pub fn digits(&self, a: RingElem) -> Vec<u32> {
        let mut idx = a.index;
        (0..a.level)
            .map(|_| {
                let d = (idx % self.q) as u32;
                idx /= self.q;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<RingElem> {
        let level = digits.len() as u32;
        self.check_level(level)?;
        let mut index = 0u64;
        for &d in digits.iter().rev() {
            self.field.check(d)?;
            index = index * self.q + d as u64;
        }
        Ok(RingElem { level, index })
    }

    /// π_𝔭(a) as a residue-field element.
    pub fn residue(&self, a: RingElem) -> u32 {
        (a.index % self.q) as u32
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self, a: RingElem) -> Result<RingElem> {
        if !self.is_unit(a) {
            return Err(Error::NotAUnit);
        }
        let level = a.level;
        let r = self.field.inv(self.residue(a)).ok_or(Error::NotAUnit)?;
        // Newton: x <- x (2 - a x)
        let two = self.from_int(level, 2)?;
        let mut x = RingElem { level, index: r as u64 };
        for _ in 0..=64 {
            let ax = self.mul(a, x)?;
            let next = self.mul(x, self.sub(two, ax)?)?;
            if next == x {
                break;
            }
            x = next;
        }
        if self.mul(a, x)? != self.one(level) {
            return Err(Error::Internal("Newton inversion failed".into()));
        }
        Ok(x)
    }

    pub fn elements(&self, level: u32) -> impl Iterator<Item = RingElem> {
        (0..self.order(level)).map(move |index| RingElem { level, index })
    }
}
