//! Exact-rational probability measures on rings, residue fields and plain
//! finite sets, with entropy and additive energy.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::digits::{child_label, CocycleFn};
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};
use crate::ring::{ResidueField, Ring, RingElem};
use crate::sets::RingSet;

#[derive(Clone)]
pub enum Carrier {
    /// O/𝔭^level; level 1 is the residue field.
    Ring { ring: Arc<Ring>, level: u32 },
    /// {0, …, n−1} with no arithmetic.
    Plain(usize),
}

impl std::fmt::Debug for Carrier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Carrier::Ring { ring, level } => write!(f, "Ring{}@{}", ring.params(), level),
            Carrier::Plain(n) => write!(f, "Plain({n})"),
        }
    }
}

impl PartialEq for Carrier {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Carrier::Ring { ring: a, level: la }, Carrier::Ring { ring: b, level: lb }) => {
                a.params() == b.params() && la == lb
            }
            (Carrier::Plain(a), Carrier::Plain(b)) => a == b,
            _ => false,
        }
    }
}

impl Carrier {
    pub fn ring(ring: &Arc<Ring>, level: u32) -> Self {
        Carrier::Ring { ring: ring.clone(), level }
    }

    pub fn size(&self) -> usize {
        match self {
            Carrier::Ring { ring, level } => ring.order(*level) as usize,
            Carrier::Plain(n) => *n,
        }
    }

    fn ring_parts(&self) -> Result<(&Arc<Ring>, u32)> {
        match self {
            Carrier::Ring { ring, level } => Ok((ring, *level)),
            Carrier::Plain(_) => Err(Error::CarrierMismatch),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasure {
    carrier: Carrier,
    weights: Vec<Rational>,
}

impl FiniteMeasure {
    pub fn new(carrier: Carrier, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != carrier.size() {
            return Err(Error::LengthMismatch(weights.len(), carrier.size()));
        }
        if weights.iter().any(|w| *w < Rational::zero()) {
            return Err(Error::Precondition("negative weight".into()));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::Precondition(format!("weights sum to {total}, not 1")));
        }
        Ok(FiniteMeasure { carrier, weights })
    }

    /// Normalizes non-negative integer weights.
    pub fn from_counts(carrier: Carrier, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptySet);
        }
        let t = total as i128;
        FiniteMeasure::new(carrier, counts.iter().map(|&c| Rational::new(c as i128, t)).collect())
    }

    pub fn uniform(carrier: Carrier) -> Result<Self> {
        let n = carrier.size();
        FiniteMeasure::from_counts(carrier, &vec![1; n])
    }

    pub fn point_mass(carrier: Carrier, at: usize) -> Result<Self> {
        let size = carrier.size();
        let mut counts = vec![0; size];
        *counts.get_mut(at).ok_or(Error::IndexOutOfRange { index: at as u64, size: size as u64 })? = 1;
        FiniteMeasure::from_counts(carrier, &counts)
    }

    /// 𝒫_A, the probability counting measure of a finite set.
    pub fn counting(a: &RingSet) -> Result<Self> {
        let carrier = Carrier::ring(a.ring(), a.level());
        let mut counts = vec![0; carrier.size()];
        for i in a.indices() {
            counts[i as usize] = 1;
        }
        FiniteMeasure::from_counts(carrier, &counts)
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> Rational {
        self.weights[i]
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.iter().enumerate().filter(|(_, w)| !w.is_zero()).map(|(i, _)| i)
    }

    /// Pushforward under an index map into `target`.
    fn push(&self, target: Carrier, map: impl Fn(usize) -> usize) -> FiniteMeasure {
        let mut w = vec![Rational::zero(); target.size()];
        for i in self.support() {
            w[map(i)] += self.weights[i];
        }
        FiniteMeasure { carrier: target, weights: w }
    }

    /// π_{𝔭^k}[μ].
    pub fn project(&self, k: u32) -> Result<FiniteMeasure> {
        let (ring, level) = self.carrier.ring_parts()?;
        if k > level {
            return Err(Error::LevelOverflow { level: k, max: level });
        }
        let m = ring.order(k) as usize;
        Ok(self.push(Carrier::ring(ring, k), |i| i % m))
    }

    /// μ_x̄(α) = π_{𝔭^{n+1}}[μ](θ_x̄(α)) / π_{𝔭^n}[μ](x̄), a measure on 𝔣.
    pub fn conditional(&self, x: RingElem) -> Result<FiniteMeasure> {
        let (ring, _) = self.carrier.ring_parts()?;
        let n = x.level();
        let base = self.project(n)?.weight(x.index() as usize);
        if base.is_zero() {
            return Err(Error::NullFiber);
        }
        let up = self.project(n + 1)?;
        let weights = ring
            .field()
            .elements()
            .map(|a| Ok(up.weight(child_label(ring, x, a)?.index() as usize) / base))
            .collect::<Result<Vec<_>>>()?;
        FiniteMeasure::new(Carrier::ring(ring, 1), weights)
    }

    /// μ ∗ ν, the pushforward of μ × ν under addition.
    pub fn convolve(&self, other: &FiniteMeasure) -> Result<FiniteMeasure> {
        if self.carrier != other.carrier {
            return Err(Error::CarrierMismatch);
        }
        let (ring, level) = self.carrier.ring_parts()?;
        let mut w = vec![Rational::zero(); self.carrier.size()];
        let right: Vec<usize> = other.support().collect();
        for i in self.support() {
            for &j in &right {
                w[ring.add_idx(level, i as u64, j as u64) as usize] += self.weights[i] * other.weights[j];
            }
        }
        Ok(FiniteMeasure { carrier: self.carrier.clone(), weights: w })
    }

    /// Pushforward under x ↦ c·x.
    pub fn dilate(&self, c: RingElem) -> Result<FiniteMeasure> {
        let (ring, level) = self.carrier.ring_parts()?;
        if c.level() != level {
            return Err(Error::LevelMismatch { left: c.level(), right: level });
        }
        Ok(self.push(self.carrier.clone(), |i| ring.mul_idx(level, c.index(), i as u64) as usize))
    }

    /// λ_β(μ)(•) = μ(• − β).
    pub fn translate(&self, beta: RingElem) -> Result<FiniteMeasure> {
        let (ring, level) = self.carrier.ring_parts()?;
        if beta.level() != level {
            return Err(Error::LevelMismatch { left: beta.level(), right: level });
        }
        Ok(self.push(self.carrier.clone(), |i| ring.add_idx(level, i as u64, beta.index()) as usize))
    }

    /// ‖μ‖₂² = Σ μ(x)².
    pub fn l2_norm_sq(&self) -> Rational {
        self.weights.iter().map(|w| w * w).sum()
    }

    /// H(μ) with the natural logarithm.
    pub fn entropy(&self) -> f64 {
        entropy_of(self.weights.iter().map(to_f64))
    }

    /// Convex combination Σ c_i μ_i over a common carrier.
    pub fn mixture(parts: &[(Rational, FiniteMeasure)]) -> Result<FiniteMeasure> {
        let first = parts.first().ok_or(Error::EmptySet)?;
        let carrier = first.1.carrier.clone();
        let mut w = vec![Rational::zero(); carrier.size()];
        for (c, m) in parts {
            if m.carrier != carrier {
                return Err(Error::CarrierMismatch);
            }
            for i in m.support() {
                w[i] += c * m.weights[i];
            }
        }
        FiniteMeasure::new(carrier, w)
    }
}

fn entropy_of(ps: impl Iterator<Item = f64>) -> f64 {
    ps.filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

/// A partition of a carrier, given by a block label per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    blocks: usize,
}

impl Partition {
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let blocks = labels.iter().max().map_or(0, |m| m + 1);
        Partition { labels, blocks }
    }

    /// Singletons.
    pub fn discrete(n: usize) -> Self {
        Partition::from_labels((0..n).collect())
    }

    /// One block.
    pub fn trivial(n: usize) -> Self {
        Partition::from_labels(vec![0; n])
    }

    /// Fibers of π_{𝔭^k} on O/𝔭^level.
    pub fn level(ring: &Ring, level: u32, k: u32) -> Result<Self> {
        if k > level {
            return Err(Error::LevelOverflow { level: k, max: level });
        }
        let m = ring.order(k) as usize;
        Ok(Partition::from_labels((0..ring.order(level) as usize).map(|i| i % m).collect()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// True if every block of `self` lies inside a block of `coarse`.
    pub fn refines(&self, coarse: &Partition) -> bool {
        if self.labels.len() != coarse.labels.len() {
            return false;
        }
        let mut owner = vec![usize::MAX; self.blocks];
        for (fine, &c) in self.labels.iter().zip(&coarse.labels) {
            if owner[*fine] == usize::MAX {
                owner[*fine] = c;
            } else if owner[*fine] != c {
                return false;
            }
        }
        true
    }

    fn block_masses(&self, mu: &FiniteMeasure) -> Vec<Rational> {
        let mut m = vec![Rational::zero(); self.blocks];
        for i in mu.support() {
            m[self.labels[i]] += mu.weights[i];
        }
        m
    }
}

/// H(μ; ℬ) = H of the block masses.
pub fn partition_entropy(mu: &FiniteMeasure, part: &Partition) -> Result<f64> {
    if part.len() != mu.weights.len() {
        return Err(Error::LengthMismatch(part.len(), mu.weights.len()));
    }
    Ok(entropy_of(part.block_masses(mu).iter().map(to_f64)))
}

/// H(μ; ℬ₂ | ℬ₁) = Σ_{C ∈ ℬ₁} μ(C) H(μ_C; ℬ₂) for ℬ₂ refining ℬ₁.
pub fn cond_entropy(mu: &FiniteMeasure, fine: &Partition, coarse: &Partition) -> Result<f64> {
    if fine.len() != mu.weights.len() || coarse.len() != mu.weights.len() {
        return Err(Error::LengthMismatch(fine.len(), mu.weights.len()));
    }
    if !fine.refines(coarse) {
        return Err(Error::NonRefining);
    }
    let coarse_mass = coarse.block_masses(mu);
    let fine_mass = fine.block_masses(mu);
    let mut owner = vec![0usize; fine.blocks];
    for (f, &c) in fine.labels.iter().zip(&coarse.labels) {
        owner[*f] = c;
    }
    let mut total = 0.0;
    for (c, cm) in coarse_mass.iter().enumerate() {
        if cm.is_zero() {
            continue;
        }
        let inner =
            entropy_of(fine_mass.iter().enumerate().filter(|(f, _)| owner[*f] == c).map(|(_, m)| to_f64(&(m / cm))));
        total += to_f64(cm) * inner;
    }
    Ok(total)
}

/// E(X, Y) = #{(x₁, y₁, x₂, y₂) : x₁ + y₁ = x₂ + y₂}.
pub fn energy(x: &RingSet, y: &RingSet) -> Result<u128> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    if x.params() != y.params() || x.level() != y.level() {
        return Err(Error::CarrierMismatch);
    }
    let ring = x.ring();
    let level = x.level();
    let mut reps = vec![0u128; ring.order(level) as usize];
    let ys: Vec<u64> = y.indices().collect();
    for a in x.indices() {
        for &b in &ys {
            reps[ring.add_idx(level, a, b) as usize] += 1;
        }
    }
    Ok(reps.iter().map(|r| r * r).sum())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AverageEnergy {
    /// (1/|𝔣^×|) Σ_{α ∈ 𝔣^×} ‖𝒫_Ā ∗ α𝒫_B̄‖₂².
    pub empirical: Rational,
    /// 1/(|Ā||B̄|) + (|Ā|−1)(|B̄|−1)/(|𝔣^×||Ā||B̄|).
    pub closed_form: Rational,
}

/// The averaged scalar energy of two subsets of 𝔣, both enumerated and in closed form.
pub fn avg_scalar_energy(field: &ResidueField, a: &[u32], b: &[u32]) -> Result<AverageEnergy> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    for &v in a.iter().chain(b) {
        field.check(v)?;
    }
    let q = field.order() as usize;
    let (na, nb) = (a.len() as i128, b.len() as i128);
    let units = (q - 1) as i128;
    let mut total = 0u128;
    let mut reps = vec![0u128; q];
    for alpha in field.units() {
        reps.fill(0);
        for &x in a {
            for &y in b {
                reps[field.add(x, field.mul(alpha, y)) as usize] += 1;
            }
        }
        total += reps.iter().map(|r| r * r).sum::<u128>();
    }
    let empirical = Rational::new(total as i128, units * (na * nb) * (na * nb));
    let closed_form = Rational::new(1, na * nb) + Rational::new((na - 1) * (nb - 1), units * na * nb);
    Ok(AverageEnergy { empirical, closed_form })
}

/// The upper bound 1/(|Ā||B̄|) + 1/|𝔣| on the averaged energy.
pub fn avg_energy_bound(na: usize, nb: usize, q: u64) -> Rational {
    Rational::new(1, (na * nb) as i128) + Rational::new(1, q as i128)
}

/// Right-hand side of the conditional-convolution decomposition: for μ, ν on
/// O/𝔭^N, a unit residue α and x̄ at level k < N,
/// Σ_{x̄₁ + ψ(α)x̄₂ = x̄} (π_k[μ](x̄₁)π_k[ν](x̄₂)/π_k[μ∗ψ(α)ν](x̄)) · λ_σ(μ_x̄₁ ∗ αν_x̄₂)
/// with σ = σ_{α,k}(x̄₁, x̄₂).
pub fn convolution_conditional_mixture(
    mu: &FiniteMeasure,
    nu: &FiniteMeasure,
    alpha: u32,
    x: RingElem,
    cocycle_fn: CocycleFn,
) -> Result<FiniteMeasure> {
    if mu.carrier != nu.carrier {
        return Err(Error::CarrierMismatch);
    }
    let (ring, _) = mu.carrier.ring_parts()?;
    let k = x.level();
    let fld = ring.field();
    let pa = mu.project(k)?;
    let pb = nu.project(k)?;
    let a_k = ring.teichmuller_at(alpha, k)?;
    let mut parts = Vec::new();
    let mut z = Rational::zero();
    for x1 in pa.support() {
        for x2 in pb.support() {
            let e1 = ring.decode(k, x1 as u64)?;
            let e2 = ring.decode(k, x2 as u64)?;
            if ring.add(e1, ring.mul(a_k, e2)?)? != x {
                continue;
            }
            let w = pa.weight(x1) * pb.weight(x2);
            z += w;
            let c1 = mu.conditional(e1)?;
            let c2 = nu.conditional(e2)?;
            let sigma = cocycle_fn(ring, alpha, e1, e2)?;
            let mut cw = vec![Rational::zero(); fld.order() as usize];
            for a1 in c1.support() {
                for a2 in c2.support() {
                    let beta = fld.add(fld.add(a1 as u32, fld.mul(alpha, a2 as u32)), sigma);
                    cw[beta as usize] += c1.weight(a1) * c2.weight(a2);
                }
            }
            parts.push((w, FiniteMeasure::new(Carrier::ring(ring, 1), cw)?));
        }
    }
    if z.is_zero() {
        return Err(Error::NullFiber);
    }
    let parts: Vec<_> = parts.into_iter().map(|(w, m)| (w / z, m)).collect();
    FiniteMeasure::mixture(&parts)
}

/// Σ_{x̄₁, x̄₂} π_k[μ](x̄₁)π_k[ν](x̄₂) H(μ_x̄₁ ∗ αν_x̄₂), the lower bound for
/// H(μ ∗ ψ(α)ν; ℬ_{k+1} | ℬ_k).
pub fn fiber_average_entropy(mu: &FiniteMeasure, nu: &FiniteMeasure, alpha: u32, k: u32) -> Result<f64> {
    let (ring, _) = mu.carrier.ring_parts()?;
    let fld = ring.field();
    let pa = mu.project(k)?;
    let pb = nu.project(k)?;
    let mut total = 0.0;
    let conds_b: Vec<(usize, FiniteMeasure)> =
        pb.support().map(|x2| Ok((x2, nu.conditional(ring.decode(k, x2 as u64)?)?))).collect::<Result<_>>()?;
    for x1 in pa.support() {
        let c1 = mu.conditional(ring.decode(k, x1 as u64)?)?;
        for (x2, c2) in &conds_b {
            let mut cw = vec![Rational::zero(); fld.order() as usize];
            for a1 in c1.support() {
                for a2 in c2.support() {
                    cw[fld.add(a1 as u32, fld.mul(alpha, a2 as u32)) as usize] += c1.weight(a1) * c2.weight(a2);
                }
            }
            let h = entropy_of(cw.iter().map(to_f64));
            total += to_f64(&(pa.weight(x1) * pb.weight(*x2))) * h;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests;
