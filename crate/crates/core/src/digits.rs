//! Digit calculus: sections ψ_{k,N}, child labels θ_x̄ and the carry cocycle.
//!
//! Because elements are stored by their Teichmüller-digit index, the section
//! ψ_{k,N} keeps the index and only raises the level, and θ_x̄(α) appends the
//! digit α.

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElem};

/// ψ_{k,N}(x̄): the element of level `target` with the digits of `x̄` followed by zeros.
pub fn section(ring: &Ring, x: RingElem, target: u32) -> Result<RingElem> {
    if x.level() > target {
        return Err(Error::LevelOverflow { level: x.level(), max: target });
    }
    ring.decode(target, x.index())
}

/// θ_x̄(α) = π_{𝔭^{n+1}}(ψ_n(x̄) + ψ(α)𝔭^n).
pub fn child_label(ring: &Ring, x: RingElem, alpha: u32) -> Result<RingElem> {
    let n = x.level();
    ring.check_level(n + 1)?;
    ring.field().check(alpha)?;
    ring.decode(n + 1, x.index() + alpha as u64 * ring.order(n))
}

/// Signature shared by the cocycle and substitutes injected by test harnesses.
pub type CocycleFn = fn(&Ring, u32, RingElem, RingElem) -> Result<u32>;

/// The carry σ_{α,k}(x̄₁, x̄₂): the unique σ ∈ 𝔣 with
/// ψ_k(x̄₁ + ψ_{0,k}(α)x̄₂) − ψ_k(x̄₁) − ψ(α)ψ_k(x̄₂) + ψ(σ)𝔭^k ∈ 𝔭^{k+1}.
///
/// Found by trying every σ; more or fewer than one solution is an internal fault.
pub fn cocycle(ring: &Ring, alpha: u32, x1: RingElem, x2: RingElem) -> Result<u32> {
    if x1.level() != x2.level() {
        return Err(Error::LevelMismatch { left: x1.level(), right: x2.level() });
    }
    let k = x1.level();
    ring.check_level(k + 1)?;
    ring.field().check(alpha)?;
    let a_k = ring.teichmuller_at(alpha, k)?;
    let sum = ring.add(x1, ring.mul(a_k, x2)?)?;
    let up = k + 1;
    let lift = |x: RingElem| section(ring, x, up);
    let a_up = ring.teichmuller_at(alpha, up)?;
    let defect = ring.sub(ring.sub(lift(sum)?, lift(x1)?)?, ring.mul(a_up, lift(x2)?)?)?;
    if ring.val(defect) < k {
        return Err(Error::Internal("section defect is not in 𝔭^k".into()));
    }
    let mut found = None;
    for sigma in ring.field().elements() {
        let shift = ring.decode(up, sigma as u64 * ring.order(k))?;
        if ring.val(ring.add(defect, shift)?) >= up {
            if found.is_some() {
                return Err(Error::Internal("carry is not unique".into()));
            }
            found = Some(sigma);
        }
    }
    found.ok_or_else(|| Error::Internal("no carry solves the defining membership".into()))
}

/// Checks θ_{x̄₁}(α₁) + ψ_{0,k+1}(α)θ_{x̄₂}(α₂) = θ_x̄(β) with x̄ = x̄₁ + ψ_{0,k}(α)x̄₂
/// and β = α₁ + αα₂ + σ_{α,k}(x̄₁, x̄₂). Returns `false` on a mismatch.
pub fn child_carry_consistent(
    ring: &Ring,
    cocycle_fn: CocycleFn,
    alpha: u32,
    x1: RingElem,
    x2: RingElem,
    a1: u32,
    a2: u32,
) -> Result<bool> {
    let k = x1.level();
    let fld = ring.field();
    let x = ring.add(x1, ring.mul(ring.teichmuller_at(alpha, k)?, x2)?)?;
    let lhs = ring
        .add(child_label(ring, x1, a1)?, ring.mul(ring.teichmuller_at(alpha, k + 1)?, child_label(ring, x2, a2)?)?)?;
    let sigma = cocycle_fn(ring, alpha, x1, x2)?;
    let beta = fld.add(fld.add(a1, fld.mul(alpha, a2)), sigma);
    Ok(lhs == child_label(ring, x, beta)?)
}

/// For a section `s` of π_𝔭 into level 2 (given as the second digit of
/// each lift), returns `(x₁, x₂)` with s(x₁) + s(x₂) ≠ s(x₁ + x₂), if any.
pub fn section_defect(ring: &Ring, second_digit: &[u32]) -> Result<Option<(u32, u32)>> {
    ring.check_level(2)?;
    let q = ring.q();
    if second_digit.len() as u64 != q {
        return Err(Error::LengthMismatch(second_digit.len(), q as usize));
    }
    let lift = |a: u32| -> Result<RingElem> {
        ring.field().check(second_digit[a as usize])?;
        ring.decode(2, a as u64 + second_digit[a as usize] as u64 * q)
    };
    let fld = ring.field();
    for x1 in fld.elements() {
        for x2 in fld.elements() {
            if ring.add(lift(x1)?, lift(x2)?)? != lift(fld.add(x1, x2))? {
                return Ok(Some((x1, x2)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn ring(p: u64, f: u32, e: u32, n: u32) -> Arc<Ring> {
        Ring::from_parts(p, f, e, n).unwrap()
    }

    #[test]
    fn sections_pad_with_zero_digits() {
        let r = ring(2, 1, 1, 3);
        let one = r.decode(2, 1).unwrap();
        assert_eq!(section(&r, one, 3).unwrap().index(), 1);
        assert_eq!(section(&r, r.zero(1), 3).unwrap(), r.zero(3));
        assert!(section(&r, r.zero(3), 2).is_err());
        let r = ring(3, 1, 1, 2);
        let two = r.decode(1, 2).unwrap();
        let lifted = section(&r, two, 2).unwrap();
        assert_eq!(lifted, r.from_int(2, 8).unwrap());
        assert_eq!(r.project(lifted, 1).unwrap(), two);
    }

    #[test]
    fn child_labels_append_a_digit() {
        let r = ring(2, 1, 1, 2);
        assert_eq!(child_label(&r, r.zero(1), 1).unwrap(), r.from_int(2, 2).unwrap());
        let r = ring(3, 1, 1, 2);
        let two = r.decode(1, 2).unwrap();
        assert_eq!(child_label(&r, two, 2).unwrap(), r.from_int(2, 5).unwrap());
        assert_eq!(child_label(&r, two, 0).unwrap(), section(&r, two, 2).unwrap());
        assert!(child_label(&r, r.zero(2), 0).is_err());
    }

    #[test]
    fn binary_carry() {
        let r = ring(2, 1, 1, 2);
        let one = r.decode(1, 1).unwrap();
        assert_eq!(cocycle(&r, 1, one, one).unwrap(), 1);
        assert_eq!(cocycle(&r, 1, one, r.zero(1)).unwrap(), 0);
    }

    /// Solves the defining membership in plain integers mod p^{k+1}.
    fn integer_cocycle(p: u64, k: u32, alpha: u64, x1: u64, x2: u64) -> u64 {
        let m = p.pow(k + 1);
        let teich: Vec<u64> = (0..p)
            .map(|a| (0..m).find(|&z| z % p == a && (0..p).fold(1, |acc, _| acc * z % m) == z).unwrap())
            .collect();
        let mk = p.pow(k);
        // greedy Teichmüller digit extraction, then re-summation mod p^{k+1}
        let psi_k = |mut x: u64| {
            let mut acc = 0;
            for i in 0..k {
                let d = (x % p) as usize;
                acc = (acc + teich[d] * p.pow(i)) % m;
                x = ((x + m - teich[d]) % mk) / p;
            }
            acc
        };
        let s = (x1 + teich[alpha as usize] % mk * x2) % mk;
        let defect = (psi_k(s) + 2 * m - psi_k(x1) - teich[alpha as usize] * psi_k(x2) % m) % m;
        let sols: Vec<u64> = (0..p).filter(|&sg| (defect + teich[sg as usize] * mk).is_multiple_of(m)).collect();
        assert_eq!(sols.len(), 1);
        sols[0]
    }

    #[test]
    fn cocycle_matches_integer_oracle() {
        for (p, n) in [(3, 3), (5, 2), (2, 4)] {
            let r = ring(p, 1, 1, n);
            for k in 0..n {
                for alpha in 0..p as u32 {
                    for x1 in r.elements(k) {
                        for x2 in r.elements(k) {
                            // integers mod p^k for the oracle
                            let i1 = int_of(&r, x1, p);
                            let i2 = int_of(&r, x2, p);
                            let want = integer_cocycle(p, k, alpha as u64, i1, i2);
                            assert_eq!(cocycle(&r, alpha, x1, x2).unwrap() as u64, want);
                        }
                    }
                }
            }
        }
        let r = ring(3, 1, 1, 3);
        let two = r.decode(1, 2).unwrap();
        assert_eq!(cocycle(&r, 2, r.zero(1), two).unwrap() as u64, integer_cocycle(3, 1, 2, 0, 2));
    }

    fn int_of(r: &Ring, x: RingElem, p: u64) -> u64 {
        // x at level k as an integer mod p^k via the unramified coefficient view
        let top = section(r, x, r.level()).unwrap();
        r.coefficients(top)[0] % p.pow(x.level())
    }

    #[test]
    fn carry_consistency_on_small_rings() {
        for (p, f, e, n) in [(2, 1, 1, 3), (3, 1, 1, 3), (2, 2, 1, 2), (2, 1, 2, 3), (3, 1, 2, 2)] {
            let r = ring(p, f, e, n);
            for k in 0..n {
                for alpha in r.field().elements() {
                    for x1 in r.elements(k) {
                        for x2 in r.elements(k) {
                            for a1 in r.field().elements() {
                                for a2 in r.field().elements() {
                                    assert!(child_carry_consistent(&r, cocycle, alpha, x1, x2, a1, a2).unwrap());
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn teichmuller_section_is_not_additive() {
        for p in [2, 3, 5] {
            let r = ring(p, 1, 1, 2);
            let zeros = vec![0; p as usize];
            assert!(section_defect(&r, &zeros).unwrap().is_some());
        }
    }
}
