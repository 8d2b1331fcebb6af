use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rational::{ceil_mul, floor_mul, is_unit_interval_open, Rational};
use crate::ring::Ring;
use crate::sets::{combine_with, gen_set_with, Budget, RingSet, SetOp};

/// A bounded-generation certificate: π(𝔭^{⌈εN⌉}O) ⊆ ⟨A⟩_C + Σ_i ψ(α_i)⟨A⟩_C at `level`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BGCertificate {
    pub scalars: Vec<u32>,
    pub c: u32,
    #[serde(with = "crate::rational::pair")]
    pub eps: Rational,
    pub level: u32,
    pub verified: bool,
}

impl BGCertificate {
    pub fn k(&self) -> usize {
        self.scalars.len()
    }

    /// Exponent t with target π(𝔭^t O).
    pub fn target_exponent(&self) -> u32 {
        ceil_mul(&self.eps, self.level).min(self.level)
    }
}

/// π_{𝔭^level}(𝔭^t O): the indices divisible by q^t.
pub fn congruence_ball(ring: &std::sync::Arc<Ring>, level: u32, t: u32) -> Result<RingSet> {
    ring.check_level(level)?;
    let t = t.min(level);
    let step = ring.order(t) as usize;
    RingSet::from_indices(ring, level, (0..ring.order(level)).step_by(step))
}

/// G + ψ(α₁)G + ⋯ + ψ(α_k)G.
pub fn bg_cover_set(g: &RingSet, scalars: &[u32]) -> Result<RingSet> {
    cover_with(Exec::default(), g, scalars, &mut Budget::unlimited())
}

fn cover_with(exec: Exec, g: &RingSet, scalars: &[u32], budget: &mut Budget) -> Result<RingSet> {
    let ring = g.ring().clone();
    let mut acc = g.clone();
    for &alpha in scalars {
        let d = scaled(&ring, g, alpha)?;
        budget.charge("coverage pair operations", acc.len() as u128 * d.len() as u128)?;
        acc = combine_with(exec, SetOp::Sum, &acc, &d)?;
    }
    Ok(acc)
}

fn scaled(ring: &Ring, g: &RingSet, alpha: u32) -> Result<RingSet> {
    if ring.field().check(alpha)? == 0 {
        return Err(Error::NotAUnit);
    }
    g.dilate(ring.teichmuller_at(alpha, g.level())?)
}

/// Recomputes the coverage claimed by `cert` for `a`.
pub fn verify_certificate(a: &RingSet, cert: &BGCertificate, budget: &mut Budget) -> Result<bool> {
    if cert.level != a.level() {
        return Err(Error::LevelMismatch { left: a.level(), right: cert.level });
    }
    let g = gen_set_with(Exec::default(), a, cert.c, budget)?;
    let cover = cover_with(Exec::default(), &g, &cert.scalars, budget)?;
    let target = congruence_ball(a.ring(), a.level(), cert.target_exponent())?;
    Ok(target.is_subset(&cover))
}

pub fn bg_search(a: &RingSet, eps: &Rational, max_k: u32, max_c: u32) -> Result<Option<BGCertificate>> {
    bg_search_with(Exec::default(), a, eps, max_k, max_c, &mut Budget::default())
}

/// Smallest (k, then C) certificate. Scalars are chosen greedily by new
/// coverage, lowest residue on ties, with an exhaustive pass for k ≤ 3.
pub fn bg_search_with(
    exec: Exec,
    a: &RingSet,
    eps: &Rational,
    max_k: u32,
    max_c: u32,
    budget: &mut Budget,
) -> Result<Option<BGCertificate>> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if *eps < Rational::from_integer(0) {
        return Err(Error::Precondition("ε must be non-negative".into()));
    }
    let level = a.level();
    let mut cert = BGCertificate { scalars: vec![], c: 1, eps: *eps, level, verified: false };
    let target = congruence_ball(a.ring(), level, cert.target_exponent())?;
    let mut gens: Vec<RingSet> = Vec::new();
    for c in 1..=max_c {
        gens.push(gen_set_with(exec, a, c, budget)?);
    }
    for k in 0..=max_k {
        for c in 1..=max_c {
            let g = &gens[c as usize - 1];
            if c > 1 && *g == gens[c as usize - 2] {
                continue;
            }
            if let Some(scalars) = find_scalars(exec, g, k, &target, budget)? {
                cert.scalars = scalars;
                cert.c = c;
                let cover = cover_with(exec, g, &cert.scalars, budget)?;
                cert.verified = target.is_subset(&cover);
                debug_assert!(cert.verified);
                return Ok(Some(cert));
            }
        }
    }
    Ok(None)
}

fn find_scalars(exec: Exec, g: &RingSet, k: u32, target: &RingSet, budget: &mut Budget) -> Result<Option<Vec<u32>>> {
    if target.is_subset(g) {
        return Ok((k == 0).then(Vec::new));
    }
    if k == 0 {
        return Ok(None);
    }
    let ring = g.ring().clone();
    let units: Vec<u32> = ring.field().units().collect();
    let dil: Vec<RingSet> = units.iter().map(|&u| scaled(&ring, g, u)).collect::<Result<_>>()?;

    let mut s = g.clone();
    let mut chosen = Vec::new();
    for _ in 0..k {
        let mut best: Option<(usize, usize, RingSet)> = None;
        for (i, d) in dil.iter().enumerate() {
            budget.charge("greedy scalar pair operations", s.len() as u128 * d.len() as u128)?;
            let next = combine_with(exec, SetOp::Sum, &s, d)?;
            let cov = next.bits().intersection_count(target.bits());
            if best.as_ref().is_none_or(|b| cov > b.0) {
                best = Some((cov, i, next));
            }
        }
        let (_, i, next) = best.expect("residue field has a unit");
        chosen.push(units[i]);
        s = next;
        if target.is_subset(&s) {
            chosen.resize(k as usize, units[i]);
            return Ok(Some(chosen));
        }
    }
    if k > 3 {
        return Ok(None);
    }
    let mut tuple = Vec::with_capacity(k as usize);
    if exhaustive(exec, g, &dil, k as usize, 0, target, &mut tuple, budget)? {
        return Ok(Some(tuple.into_iter().map(|i| units[i]).collect()));
    }
    Ok(None)
}

/// Depth-first over non-decreasing index tuples; the sum is symmetric in the scalars.
#[allow(clippy::too_many_arguments)]
fn exhaustive(
    exec: Exec,
    s: &RingSet,
    dil: &[RingSet],
    depth: usize,
    start: usize,
    target: &RingSet,
    tuple: &mut Vec<usize>,
    budget: &mut Budget,
) -> Result<bool> {
    if depth == 0 {
        return Ok(target.is_subset(s));
    }
    for i in start..dil.len() {
        budget.charge("exhaustive scalar pair operations", s.len() as u128 * dil[i].len() as u128)?;
        let next = combine_with(exec, SetOp::Sum, s, &dil[i])?;
        tuple.push(i);
        if exhaustive(exec, &next, dil, depth - 1, i, target, tuple, budget)? {
            return Ok(true);
        }
        tuple.pop();
    }
    Ok(false)
}

/// Two tuples in ⟨A⟩_{2C}^{k+1} with equal l-value whose difference leaves 𝔭^d.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionWitness {
    pub x: Vec<u64>,
    pub x_prime: Vec<u64>,
    /// Coordinate of least valuation in x − x′; 0 is the unscaled one.
    pub pivot: usize,
    pub pivot_val: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectivityCertificate {
    pub certificate: BGCertificate,
    #[serde(with = "crate::rational::pair")]
    pub delta0: Rational,
    /// ⌊δ₀N⌋.
    pub closeness: u32,
    /// Pair operations spent by the exhaustive scan.
    pub scanned: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReduceOutcome {
    Reduction {
        certificate: BGCertificate,
        /// The 8C constant of the reduction step, before any escalation.
        nominal_c: u32,
        collision: CollisionWitness,
    },
    Injective(InjectivityCertificate),
}

/// Either drops one scalar at the price of ε + δ₀ and a larger C, or
/// certifies that l(x) = x₀ + Σψ(α_i)x_i is injective modulo 𝔭^{⌊δ₀N⌋}
/// on ⟨A⟩_{2C}^{k+1}.
///
/// Collisions are found through the difference set D = G − G: l(x) = l(x′)
/// iff l(x − x′) = 0, so a layered reachability over partial sums of
/// ψ(α_i)D, tracking whether a coordinate of valuation below d was used,
/// decides the same question as a pairwise scan.
pub fn reduce_or_inject(
    a: &RingSet,
    cert: &BGCertificate,
    delta0: &Rational,
    budget: &mut Budget,
) -> Result<ReduceOutcome> {
    if !cert.verified {
        return Err(Error::Precondition("certificate is not verified".into()));
    }
    if !is_unit_interval_open(delta0) {
        return Err(Error::Precondition("δ₀ must lie in (0, 1)".into()));
    }
    if cert.level != a.level() {
        return Err(Error::LevelMismatch { left: a.level(), right: cert.level });
    }
    let exec = Exec::default();
    let ring = a.ring().clone();
    let level = a.level();
    let d = floor_mul(delta0, level);
    let start = budget.remaining;

    let g2 = gen_set_with(exec, a, 2 * cert.c, budget)?;
    budget.charge("difference set pair operations", g2.len() as u128 * g2.len() as u128)?;
    let diffs = combine_with(exec, SetOp::Diff, &g2, &g2)?;
    let low_diffs = RingSet::from_indices(&ring, level, diffs.indices().filter(|&z| ring.val_idx(level, z) < d))?;

    let mut coeffs = vec![1u32];
    coeffs.extend(&cert.scalars);
    let weights: Vec<u64> =
        coeffs.iter().map(|&c| ring.teichmuller_at(c, level).map(|w| w.index())).collect::<Result<_>>()?;

    let mut any = vec![RingSet::from_indices(&ring, level, [0])?];
    let mut low = vec![RingSet::empty(&ring, level)?];
    for (i, &w) in weights.iter().enumerate() {
        let w = ring.decode(level, w)?;
        let dw = diffs.dilate(w)?;
        let lw = low_diffs.dilate(w)?;
        budget.charge("collision scan pair operations", (any[i].len() + low[i].len()) as u128 * dw.len() as u128)?;
        let next_any = combine_with(exec, SetOp::Sum, &any[i], &dw)?;
        let mut next_low = if low[i].is_empty() {
            RingSet::empty(&ring, level)?
        } else {
            combine_with(exec, SetOp::Sum, &low[i], &dw)?
        };
        if !lw.is_empty() {
            next_low = next_low.union(&combine_with(exec, SetOp::Sum, &any[i], &lw)?)?;
        }
        any.push(next_any);
        low.push(next_low);
    }

    if !low[weights.len()].contains_index(0) {
        return Ok(ReduceOutcome::Injective(InjectivityCertificate {
            certificate: cert.clone(),
            delta0: *delta0,
            closeness: d,
            scanned: start - budget.remaining,
        }));
    }

    // walk back from 0 ∈ low[k+1] to a difference vector z
    let mut z = vec![0u64; weights.len()];
    let mut v = 0u64;
    let mut in_low = true;
    for i in (0..weights.len()).rev() {
        let w = weights[i];
        let mut step = None;
        for cand in diffs.indices() {
            let u = ring.sub_idx(level, v, ring.mul_idx(level, w, cand));
            let cand_low = ring.val_idx(level, cand) < d;
            if in_low {
                if low[i].contains_index(u) {
                    step = Some((cand, u, true));
                    break;
                }
                if cand_low && any[i].contains_index(u) {
                    step = Some((cand, u, false));
                    break;
                }
            } else if any[i].contains_index(u) {
                step = Some((cand, u, false));
                break;
            }
        }
        let (cand, u, flag) = step.ok_or_else(|| Error::Internal("collision backtrack failed".into()))?;
        z[i] = cand;
        v = u;
        in_low = flag;
    }
    debug_assert!(v == 0 && !in_low);

    let mut x = Vec::with_capacity(z.len());
    let mut x_prime = Vec::with_capacity(z.len());
    for &zi in &z {
        let xi = g2
            .indices()
            .find(|&xi| g2.contains_index(ring.sub_idx(level, xi, zi)))
            .ok_or_else(|| Error::Internal("difference without a preimage".into()))?;
        x.push(xi);
        x_prime.push(ring.sub_idx(level, xi, zi));
    }
    let (pivot, pivot_val) = z
        .iter()
        .enumerate()
        .map(|(i, &zi)| (i, ring.val_idx(level, zi)))
        .min_by_key(|&(i, v)| (v, i))
        .expect("at least one coordinate");
    debug_assert!(pivot_val < d);

    // drop the pivot coordinate and renormalise so the leading coefficient is 1
    let field = ring.field();
    let mut rest: Vec<u32> = coeffs.iter().enumerate().filter(|&(i, _)| i != pivot).map(|(_, &c)| c).collect();
    let lead_inv = field.inv(rest[0]).ok_or(Error::NotAUnit)?;
    for c in rest.iter_mut() {
        *c = field.mul(*c, lead_inv);
    }
    rest.remove(0);

    let nominal_c = 8 * cert.c;
    let limit = (16 * cert.c * cert.c).max(nominal_c);
    let mut next = BGCertificate { scalars: rest, c: nominal_c, eps: cert.eps + delta0, level, verified: false };
    loop {
        if verify_certificate(a, &next, budget)? {
            next.verified = true;
            break;
        }
        if next.c >= limit {
            break;
        }
        next.c = (next.c * 2).min(limit);
    }
    Ok(ReduceOutcome::Reduction {
        certificate: next,
        nominal_c,
        collision: CollisionWitness { x, x_prime, pivot, pivot_val },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureCheck {
    pub closed: bool,
    /// Indices at level ⌊δ₀N⌋ whose sum leaves the set.
    pub witness: Option<(u64, u64)>,
}

/// Whether π_{𝔭^{⌊δ₀N⌋}}(⟨A⟩_C ∩ π(𝔭^{⌈εN⌉}O)) is closed under addition.
pub fn additive_closure_check(a: &RingSet, c: u32, eps: &Rational, delta0: &Rational) -> Result<ClosureCheck> {
    let level = a.level();
    let d = floor_mul(delta0, level).min(level);
    if d < 1 {
        return Err(Error::Precondition("⌊δ₀N⌋ must be at least 1".into()));
    }
    let ring = a.ring();
    let g = gen_set_with(Exec::default(), a, c, &mut Budget::default())?;
    let ball = congruence_ball(ring, level, ceil_mul(eps, level))?;
    let x = g.intersection(&ball)?.project(d)?;
    let mut seen = BitSet::new(ring.order(d) as usize);
    for i in x.indices() {
        seen.insert(i as usize);
    }
    for i in x.indices() {
        for j in x.indices() {
            if !seen.contains(ring.add_idx(d, i, j) as usize) {
                return Ok(ClosureCheck { closed: false, witness: Some((i, j)) });
            }
        }
    }
    Ok(ClosureCheck { closed: true, witness: None })
}

#[cfg(test)]
mod tests;
