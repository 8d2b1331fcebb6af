//! Sets satisfying projection lower bounds and valuation-witness hypotheses.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{ceil_power, Rational};
use crate::ring::Ring;
use crate::sets::RingSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraints {
    /// |π_i(A)| ≥ q^{iε} for 1 ≤ i ≤ N.
    pub eps: Rational,
    /// For each v, some a₁, a₂ ∈ A with val(a₁ − a₂) = v.
    pub valuations: Vec<u32>,
    /// Extra uniformly random elements added after the constraints are met.
    pub extra: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisCheck {
    pub holds: bool,
    pub first_short_level: Option<u32>,
    pub missing_valuations: Vec<u32>,
}

/// Builds a set meeting `constraints` and checks it with [`verify_hypotheses`]
/// before returning it.
pub fn generate_set<R: Rng>(rng: &mut R, ring: &Arc<Ring>, c: &Constraints) -> Result<RingSet> {
    let n = ring.level();
    if c.eps < Rational::from_integer(0) || c.eps > Rational::from_integer(1) {
        return Err(Error::Precondition(format!("unsatisfiable: ε = {} outside [0, 1]", c.eps)));
    }
    if let Some(&v) = c.valuations.iter().find(|&&v| v >= n) {
        return Err(Error::Precondition(format!(
            "unsatisfiable: valuation {v} needs a nonzero element below level {n}"
        )));
    }
    let mut a = RingSet::from_indices(ring, n, [0])?;
    let y = ring.uniformizer(n).unwrap_or_else(|_| ring.one(n));
    for &v in &c.valuations {
        a.insert(ring.pow(y, v as u64));
    }
    let top = ring.order(n);
    for i in 1..=n {
        let need = ceil_power(ring.q(), &(c.eps * Rational::from_integer(i as i128)));
        let m = ring.order(i);
        let mut have: BTreeSet<u64> = a.indices().map(|x| x % m).collect();
        let mut missing: Vec<u64> = (0..m).filter(|x| !have.contains(x)).collect();
        while (have.len() as u128) < need {
            let class = missing.swap_remove(rng.gen_range(0..missing.len()));
            let lift = class + m * rng.gen_range(0..top / m);
            a.insert_index(lift)?;
            have.insert(class);
        }
    }
    for _ in 0..c.extra {
        a.insert_index(rng.gen_range(0..top))?;
    }
    let check = verify_hypotheses(&a, c);
    if !check.holds {
        return Err(Error::Internal(format!("generated set fails its hypotheses: {check:?}")));
    }
    Ok(a)
}

/// Recomputes projections and difference valuations from the ring
/// arithmetic, independently of the sampler.
pub fn verify_hypotheses(a: &RingSet, c: &Constraints) -> HypothesisCheck {
    let ring = a.ring();
    let n = a.level();
    let elems: Vec<_> = a.elements().collect();
    let mut first_short_level = None;
    for i in 1..=n {
        let classes: BTreeSet<u64> = elems.iter().filter_map(|&x| ring.project(x, i).ok()).map(|x| x.index()).collect();
        let exponent = c.eps * Rational::from_integer(i as i128);
        if crate::rational::cmp_with_power(classes.len() as u128, ring.q(), &exponent) == std::cmp::Ordering::Less {
            first_short_level = Some(i);
            break;
        }
    }
    let mut seen = BTreeSet::new();
    for &x in &elems {
        for &z in &elems {
            if let Ok(d) = ring.sub(x, z) {
                seen.insert(ring.val(d));
            }
        }
    }
    let missing_valuations: Vec<u32> = c.valuations.iter().copied().filter(|v| !seen.contains(v)).collect();
    HypothesisCheck {
        holds: !elems.is_empty() && first_short_level.is_none() && missing_valuations.is_empty(),
        first_short_level,
        missing_valuations,
    }
}
