//! Random instances for the suites and the acceptance tests.

use std::sync::Arc;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::density::TailSet;
use crate::error::Result;
use crate::measures::{Carrier, FiniteMeasure};
use crate::rational::Rational;
use crate::ring::Ring;
use crate::sets::{GradedProfile, RingSet};

pub fn pick_ring<R: Rng>(rng: &mut R, rings: &[Arc<Ring>]) -> Arc<Ring> {
    rings.choose(rng).expect("nonempty ring list").clone()
}

/// A uniformly random subset of O/𝔭^level with size in [1, max_size].
pub fn random_set<R: Rng>(rng: &mut R, ring: &Arc<Ring>, level: u32, max_size: usize) -> Result<RingSet> {
    let n = ring.order(level) as usize;
    let size = rng.gen_range(1..=max_size.min(n).max(1));
    RingSet::from_indices(ring, level, index::sample(rng, n, size).into_iter().map(|i| i as u64))
}

/// A random set containing 0 and 1.
pub fn random_set_with_unit<R: Rng>(rng: &mut R, ring: &Arc<Ring>, level: u32, max_size: usize) -> Result<RingSet> {
    let mut a = random_set(rng, ring, level, max_size)?;
    a.insert_index(0)?;
    a.insert_index(1 % ring.order(level))?;
    Ok(a)
}

pub fn random_profile<R: Rng>(rng: &mut R, n: usize, q: u64) -> Result<GradedProfile> {
    GradedProfile::new((0..n).map(|_| rng.gen_range(1..=q)).collect(), q)
}

/// A regular set with a random profile: each vertex at depth i keeps m_i
/// random children.
pub fn random_regular_set<R: Rng>(rng: &mut R, ring: &Arc<Ring>, level: u32) -> Result<RingSet> {
    let q = ring.q();
    let profile = random_profile(rng, level as usize, q)?;
    regular_set_with_profile(rng, ring, &profile)
}

pub fn regular_set_with_profile<R: Rng>(rng: &mut R, ring: &Arc<Ring>, profile: &GradedProfile) -> Result<RingSet> {
    let q = ring.q();
    let mut layer = vec![0u64];
    for (i, &m) in profile.m().iter().enumerate() {
        let step = ring.order(i as u32);
        let mut next = Vec::with_capacity(layer.len() * m as usize);
        for &v in &layer {
            for d in index::sample(rng, q as usize, m as usize) {
                next.push(v + d as u64 * step);
            }
        }
        layer = next;
    }
    RingSet::from_indices(ring, profile.len() as u32, layer)
}

/// Random integer weights in [0, 9] on a carrier, not all zero.
pub fn random_measure<R: Rng>(rng: &mut R, carrier: Carrier) -> Result<FiniteMeasure> {
    let n = carrier.size();
    let mut counts: Vec<u64> = (0..n).map(|_| if rng.gen_bool(0.5) { rng.gen_range(0..10) } else { 0 }).collect();
    if counts.iter().all(|&c| c == 0) {
        counts[rng.gen_range(0..n)] = 1;
    }
    FiniteMeasure::from_counts(carrier, &counts)
}

/// A tail set containing 0 with threshold at most `t_max`.
pub fn random_tail_set<R: Rng>(rng: &mut R, t_max: u64) -> TailSet {
    let t = rng.gen_range(1..=t_max);
    let p = rng.gen_range(0.05..0.9);
    let elems: Vec<u64> = std::iter::once(0).chain((1..t).filter(|_| rng.gen_bool(p))).collect();
    if rng.gen_bool(0.2) {
        TailSet::finite(elems)
    } else {
        TailSet::with_tail(elems, t)
    }
}

/// A rational in (0, 1) with denominator at most `max_den`.
pub fn random_unit_rational<R: Rng>(rng: &mut R, max_den: i128) -> Rational {
    let d = rng.gen_range(2..=max_den);
    Rational::new(rng.gen_range(1..d), d)
}

/// Random subset of the residue field containing 0 and 1.
pub fn random_field_subset<R: Rng>(rng: &mut R, q: u32) -> Vec<u32> {
    let mut b = vec![0, 1];
    b.extend((2..q).filter(|_| rng.gen_bool(0.3)));
    b
}
