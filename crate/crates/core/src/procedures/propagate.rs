use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rational::{ceil_mul, floor_mul, is_unit_interval_open, Rational};
use crate::sets::{combine_with, gen_set_with, Budget, RingSet, SetOp};

use super::bg::{bg_cover_set, congruence_ball, verify_certificate, BGCertificate};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessStatus {
    pub j: u32,
    pub valuation: u32,
    pub witness: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropagationReport {
    /// N_m = ⌊ε₂^{m−1}N⌋.
    pub n_m: u32,
    pub witnesses: Vec<WitnessStatus>,
    /// ⌈ε₂^m N⌉.
    pub target_exponent: u32,
    pub covered: bool,
    pub assembled_size: usize,
    /// Power j with scalars drawn from Π_j(Ω ∪ {1}); Ω is a group, so 1.
    pub scalar_power: u32,
}

/// Lifts a certificate for π_{N_m}(A) to coverage of π(𝔭^{⌈ε₂^m N⌉}O) by
/// L + x₁L + ⋯ + x_J L, where L = ⟨A⟩_C + Σψ(ω_i)⟨A⟩_C and x_j ∈ A − A has
/// valuation ⌊jε₂^m N⌋ for 1 ≤ j ≤ J = ⌊ε₂^{−m}⌋.
pub fn bg_propagate(
    a: &RingSet,
    m: u32,
    eps2: &Rational,
    cert: &BGCertificate,
    budget: &mut Budget,
) -> Result<PropagationReport> {
    if m == 0 || !is_unit_interval_open(eps2) {
        return Err(Error::Precondition("need m ≥ 1 and 0 < ε₂ < 1".into()));
    }
    let ring = a.ring().clone();
    let n = a.level();
    let n_m = floor_mul(&eps2.pow(m as i32 - 1), n);
    if cert.level != n_m {
        return Err(Error::LevelMismatch { left: n_m, right: cert.level });
    }
    if n_m == 0 || !verify_certificate(&a.project(n_m)?, cert, budget)? {
        return Err(Error::Precondition("certificate does not hold at level N_m".into()));
    }

    let diffs = combine_with(Exec::default(), SetOp::Diff, a, a)?;
    let step = eps2.pow(m as i32);
    let count = (Rational::one() / step).floor().to_integer() as u32;
    let mut witnesses = Vec::with_capacity(count as usize);
    for j in 1..=count {
        let v = floor_mul(&(step * Rational::from_integer(j as i128)), n).min(n);
        let witness = diffs.indices().find(|&x| ring.val_idx(n, x) == v);
        if witness.is_none() {
            return Err(Error::MissingWitness(format!("j = {j}: no element of A − A has valuation {v}")));
        }
        witnesses.push(WitnessStatus { j, valuation: v, witness });
    }

    let g = gen_set_with(Exec::default(), a, cert.c, budget)?;
    let layer = bg_cover_set(&g, &cert.scalars)?;
    let mut assembled = layer.clone();
    for w in &witnesses {
        let x = ring.decode(n, w.witness.expect("checked above"))?;
        let term = layer.dilate(x)?;
        budget.charge("propagation pair operations", assembled.len() as u128 * term.len() as u128)?;
        assembled = combine_with(Exec::default(), SetOp::Sum, &assembled, &term)?;
    }
    let target_exponent = if step.is_zero() { 0 } else { ceil_mul(&step, n).min(n) };
    let target = congruence_ball(&ring, n, target_exponent)?;
    Ok(PropagationReport {
        n_m,
        witnesses,
        target_exponent,
        covered: target.is_subset(&assembled),
        assembled_size: assembled.len(),
        scalar_power: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procedures::bg_search;
    use crate::rational::rat;
    use crate::ring::Ring;

    #[test]
    fn whole_ring_is_covered() {
        let r = Ring::from_parts(2, 1, 1, 4).unwrap();
        let a = RingSet::full(&r, 4).unwrap();
        let cert = bg_search(&a, &rat(1, 2), 1, 2).unwrap().unwrap();
        let rep = bg_propagate(&a, 1, &rat(1, 2), &cert, &mut Budget::default()).unwrap();
        assert_eq!(rep.n_m, 4);
        assert!(rep.covered);
        assert_eq!(rep.witnesses.len(), 2);
    }

    #[test]
    fn mod8_with_every_valuation() {
        let r = Ring::from_parts(2, 1, 1, 3).unwrap();
        let a = RingSet::from_ints(&r, 3, [0, 1, 2, 4]).unwrap();
        let eps2 = rat(1, 3);
        let cert = bg_search(&a, &eps2, 1, 3).unwrap().unwrap();
        let rep = bg_propagate(&a, 1, &eps2, &cert, &mut Budget::default()).unwrap();
        assert_eq!(rep.witnesses.iter().map(|w| w.valuation).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(rep.covered);
    }

    #[test]
    fn second_stage_uses_lower_level() {
        let r = Ring::from_parts(3, 1, 1, 4).unwrap();
        let a = RingSet::from_ints(&r, 4, [0, 1, 3, 9, 27, 5]).unwrap();
        let eps2 = rat(1, 2);
        let top = a.project(2).unwrap();
        let cert = bg_search(&top, &eps2, 2, 3).unwrap().unwrap();
        let rep = bg_propagate(&a, 2, &eps2, &cert, &mut Budget::default()).unwrap();
        assert_eq!(rep.n_m, 2);
        assert_eq!(rep.witnesses.len(), 4);
        assert_eq!(rep.target_exponent, 1);
    }

    #[test]
    fn missing_valuation_one() {
        let r = Ring::from_parts(2, 1, 1, 3).unwrap();
        let a = RingSet::from_ints(&r, 3, [0, 1]).unwrap();
        let eps2 = rat(1, 3);
        let cert = bg_search(&a, &eps2, 1, 3).unwrap().unwrap();
        assert!(matches!(bg_propagate(&a, 1, &eps2, &cert, &mut Budget::default()), Err(Error::MissingWitness(_))));
    }
}
