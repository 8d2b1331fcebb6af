use num_traits::One;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sets::{combine, GradedProfile, RingSet, SetOp};

/// Π_i max(1, (1/(m_i l_i) + 1/q)^{−1}).
pub fn scalar_sum_bound(a: &GradedProfile, b: &GradedProfile) -> Result<Rational> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let q = a.q() as i128;
    let mut acc = Rational::one();
    for (&m, &l) in a.m().iter().zip(b.m()) {
        let ml = (m * l) as i128;
        // (1/(ml) + 1/q)^{-1} = q·ml / (q + ml)
        let term = Rational::new(q * ml, q + ml);
        if term > Rational::one() {
            acc *= term;
        }
    }
    Ok(acc)
}

/// max over ω ∈ Ω of |A + ωB|, with the first residue attaining it.
pub fn empirical_scalar_sum(a: &RingSet, b: &RingSet) -> Result<(usize, u32)> {
    let ring = a.ring();
    let mut best = (0usize, 0u32);
    for alpha in ring.field().units() {
        let w = ring.teichmuller_at(alpha, b.level())?;
        let size = combine(SetOp::Sum, a, &b.dilate(w)?)?.len();
        if size > best.0 {
            best = (size, alpha);
        }
    }
    Ok(best)
}
