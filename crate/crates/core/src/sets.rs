//! Subsets of O/𝔭^k as bit vectors over canonical indices.

use std::fmt;
use std::sync::Arc;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::exec::{fold_chunks, Exec};
use crate::ring::{Ring, RingElem, RingParams};

const CHUNK: usize = 64;

/// Default cap on pair operations spent inside one `gen_set` call.
pub const DEFAULT_OP_BUDGET: u128 = 1 << 36;

#[derive(Clone)]
pub struct RingSet {
    ring: Arc<Ring>,
    level: u32,
    bits: BitSet,
    card: usize,
}

impl PartialEq for RingSet {
    fn eq(&self, other: &Self) -> bool {
        self.ring.params() == other.ring.params() && self.level == other.level && self.bits == other.bits
    }
}

impl Eq for RingSet {}

impl fmt::Debug for RingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.ring.params(), self.level)?;
        f.debug_set().entries(self.bits.iter()).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Sum,
    Diff,
    Prod,
}

impl RingSet {
    pub fn empty(ring: &Arc<Ring>, level: u32) -> Result<Self> {
        ring.check_level(level)?;
        let size = ring.order(level) as usize;
        Ok(RingSet { ring: ring.clone(), level, bits: BitSet::new(size), card: 0 })
    }

    /// The whole of O/𝔭^level.
    pub fn full(ring: &Arc<Ring>, level: u32) -> Result<Self> {
        ring.check_level(level)?;
        let size = ring.order(level) as usize;
        Ok(RingSet { ring: ring.clone(), level, bits: BitSet::full(size), card: size })
    }

    pub fn from_indices<I: IntoIterator<Item = u64>>(ring: &Arc<Ring>, level: u32, indices: I) -> Result<Self> {
        let mut s = RingSet::empty(ring, level)?;
        for i in indices {
            s.insert_index(i)?;
        }
        Ok(s)
    }

    /// Elements given as rational integers (reduced into the ring).
    pub fn from_ints<I: IntoIterator<Item = i64>>(ring: &Arc<Ring>, level: u32, ints: I) -> Result<Self> {
        let mut s = RingSet::empty(ring, level)?;
        for n in ints {
            s.insert(ring.from_int(level, n)?);
        }
        Ok(s)
    }

    pub fn from_bits(ring: &Arc<Ring>, level: u32, bits: BitSet) -> Result<Self> {
        ring.check_level(level)?;
        if bits.universe() as u64 != ring.order(level) {
            return Err(Error::LengthMismatch(bits.universe(), ring.order(level) as usize));
        }
        let card = bits.count();
        Ok(RingSet { ring: ring.clone(), level, bits, card })
    }

    pub fn insert_index(&mut self, index: u64) -> Result<bool> {
        let size = self.ring.order(self.level);
        if index >= size {
            return Err(Error::IndexOutOfRange { index, size });
        }
        let fresh = self.bits.insert(index as usize);
        self.card += fresh as usize;
        Ok(fresh)
    }

    pub fn insert(&mut self, a: RingElem) -> bool {
        debug_assert_eq!(a.level(), self.level);
        let fresh = self.bits.insert(a.index() as usize);
        self.card += fresh as usize;
        fresh
    }

    pub fn contains_index(&self, index: u64) -> bool {
        self.bits.contains(index as usize)
    }

    pub fn contains(&self, a: RingElem) -> bool {
        a.level() == self.level && self.contains_index(a.index())
    }

    pub fn len(&self) -> usize {
        self.card
    }

    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    pub fn is_full(&self) -> bool {
        self.card as u64 == self.ring.order(self.level)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn params(&self) -> RingParams {
        self.ring.params()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    /// Canonical indices in increasing order.
    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter().map(|i| i as u64)
    }

    pub fn elements(&self) -> impl Iterator<Item = RingElem> + '_ {
        let level = self.level;
        let ring = &self.ring;
        self.indices().map(move |i| ring.decode(level, i).expect("member index in range"))
    }

    pub fn is_subset(&self, other: &RingSet) -> bool {
        self.level == other.level && self.bits.is_subset(&other.bits)
    }

    pub fn union(&self, other: &RingSet) -> Result<RingSet> {
        self.check_compatible(other)?;
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        RingSet::from_bits(&self.ring, self.level, bits)
    }

    pub fn intersection(&self, other: &RingSet) -> Result<RingSet> {
        self.check_compatible(other)?;
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        RingSet::from_bits(&self.ring, self.level, bits)
    }

    fn check_compatible(&self, other: &RingSet) -> Result<()> {
        if self.ring.params() != other.ring.params() {
            return Err(Error::RingMismatch { left: self.ring.params(), right: other.ring.params() });
        }
        if self.level != other.level {
            return Err(Error::LevelMismatch { left: self.level, right: other.level });
        }
        Ok(())
    }

    /// π_{𝔭^k}(A).
    pub fn project(&self, k: u32) -> Result<RingSet> {
        if k > self.level {
            return Err(Error::LevelOverflow { level: k, max: self.level });
        }
        let m = self.ring.order(k);
        RingSet::from_indices(&self.ring, k, self.indices().map(|i| i % m))
    }

    /// Members lying over the residue class `xi` of level `k`.
    pub fn fiber(&self, xi: RingElem) -> Result<RingSet> {
        if xi.level() > self.level {
            return Err(Error::LevelOverflow { level: xi.level(), max: self.level });
        }
        let m = self.ring.order(xi.level());
        RingSet::from_indices(&self.ring, self.level, self.indices().filter(|i| i % m == xi.index()))
    }

    /// {c·a : a ∈ A}.
    pub fn dilate(&self, c: RingElem) -> Result<RingSet> {
        if c.level() != self.level {
            return Err(Error::LevelMismatch { left: c.level(), right: self.level });
        }
        let ring = &self.ring;
        RingSet::from_indices(ring, self.level, self.indices().map(|a| ring.mul_idx(self.level, c.index(), a)))
    }

    /// {a + t : a ∈ A}.
    pub fn translate(&self, t: RingElem) -> Result<RingSet> {
        if t.level() != self.level {
            return Err(Error::LevelMismatch { left: t.level(), right: self.level });
        }
        let ring = &self.ring;
        RingSet::from_indices(ring, self.level, self.indices().map(|a| ring.add_idx(self.level, a, t.index())))
    }
}

/// {a ∘ b : a ∈ A, b ∈ B} for ∘ ∈ {+, −, ·}.
pub fn combine(op: SetOp, a: &RingSet, b: &RingSet) -> Result<RingSet> {
    combine_with(Exec::default(), op, a, b)
}

pub fn combine_with(exec: Exec, op: SetOp, a: &RingSet, b: &RingSet) -> Result<RingSet> {
    a.check_compatible(b)?;
    let ring = a.ring.as_ref();
    let level = a.level;
    let size = ring.order(level) as usize;
    let left: Vec<u64> = a.indices().collect();
    let right: Vec<u64> = b.indices().collect();
    let bits = fold_chunks(
        exec,
        &left,
        CHUNK,
        || BitSet::new(size),
        |mut acc, chunk| {
            for &x in chunk {
                for &y in &right {
                    let z = match op {
                        SetOp::Sum => ring.add_idx(level, x, y),
                        SetOp::Diff => ring.sub_idx(level, x, y),
                        SetOp::Prod => ring.mul_idx(level, x, y),
                    };
                    acc.insert(z as usize);
                }
            }
            acc
        },
        |mut l, r| {
            l.union_with(&r);
            l
        },
    );
    RingSet::from_bits(&a.ring, level, bits)
}

/// Pair-operation budget shared across the steps of a computation.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub remaining: u128,
}

impl Budget {
    pub fn new(ops: u128) -> Self {
        Budget { remaining: ops }
    }

    pub fn unlimited() -> Self {
        Budget { remaining: u128::MAX }
    }

    pub fn charge(&mut self, what: &'static str, ops: u128) -> Result<()> {
        if ops > self.remaining {
            return Err(Error::CapExceeded { what, needed: ops, cap: self.remaining });
        }
        self.remaining -= ops;
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_OP_BUDGET)
    }
}

/// j-fold iterate of a combinator: A ∘ A ∘ ⋯ ∘ A with `j` operands.
fn iterate(exec: Exec, op: SetOp, a: &RingSet, j: u32, budget: &mut Budget) -> Result<RingSet> {
    if j == 0 {
        return Err(Error::Precondition("iterate needs at least one operand".into()));
    }
    let mut acc = a.clone();
    for _ in 1..j {
        budget.charge("set combinator pair operations", acc.len() as u128 * a.len() as u128)?;
        let next = combine_with(exec, op, &acc, a)?;
        let stable = next == acc;
        acc = next;
        // the sequence X_{i+1} = X_i ∘ A is determined by X_i
        if stable || (op == SetOp::Sum && acc.is_full()) {
            break;
        }
    }
    Ok(acc)
}

/// Σ_j A: sums of exactly j elements.
pub fn sumset_fold(a: &RingSet, j: u32) -> Result<RingSet> {
    iterate(Exec::default(), SetOp::Sum, a, j, &mut Budget::unlimited())
}

/// Π_j A: products of exactly j elements.
pub fn prodset_fold(a: &RingSet, j: u32) -> Result<RingSet> {
    iterate(Exec::default(), SetOp::Prod, a, j, &mut Budget::unlimited())
}

/// ⟨A⟩_C = Σ_C Π_C A − Σ_C Π_C A.
pub fn gen_set(a: &RingSet, c: u32) -> Result<RingSet> {
    gen_set_with(Exec::default(), a, c, &mut Budget::default())
}

pub fn gen_set_with(exec: Exec, a: &RingSet, c: u32, budget: &mut Budget) -> Result<RingSet> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if c == 0 {
        return Err(Error::Precondition("C must be positive".into()));
    }
    let guard = c as u128 * a.ring.order(a.level) as u128;
    if guard > budget.remaining {
        return Err(Error::CapExceeded { what: "C·|ring| for gen_set", needed: guard, cap: budget.remaining });
    }
    let prods = iterate(exec, SetOp::Prod, a, c, budget)?;
    let sums = iterate(exec, SetOp::Sum, &prods, c, budget)?;
    if sums.is_full() {
        return Ok(sums);
    }
    budget.charge("difference set pair operations", sums.len() as u128 * sums.len() as u128)?;
    combine_with(exec, SetOp::Diff, &sums, &sums)
}

/// The tuple (m₀, …, m_{N−1}) of a regular set, with m_i ≤ q.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedProfile {
    m: Vec<u64>,
    q: u64,
}

impl GradedProfile {
    pub fn new(m: Vec<u64>, q: u64) -> Result<Self> {
        if let Some(&bad) = m.iter().find(|&&mi| mi == 0 || mi > q) {
            return Err(Error::Precondition(format!("profile entry {bad} outside [1, {q}]")));
        }
        Ok(GradedProfile { m, q })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn m(&self) -> &[u64] {
        &self.m
    }

    /// x_i = log m_i / log q as the exact pair (m_i, q) of log arguments.
    pub fn x_pair(&self, i: usize) -> (u64, u64) {
        (self.m[i], self.q)
    }

    pub fn x(&self, i: usize) -> f64 {
        (self.m[i] as f64).ln() / (self.q as f64).ln()
    }

    /// m₀⋯m_{k−1} = |π_{𝔭^k}(A)|.
    pub fn prefix_product(&self, k: usize) -> u128 {
        self.m[..k].iter().map(|&v| v as u128).product()
    }

    pub fn total(&self) -> u128 {
        self.prefix_product(self.m.len())
    }
}

/// Children counts of each vertex of π_{𝔭^n}(A) at every level n.
fn level_projections(a: &RingSet) -> Vec<BitSet> {
    let ring = &a.ring;
    let mut levels = vec![a.bits.clone()];
    for n in (0..a.level).rev() {
        let m = ring.order(n);
        let mut b = BitSet::new(m as usize);
        for i in levels.last().unwrap().iter() {
            b.insert(i % m as usize);
        }
        levels.push(b);
    }
    levels.reverse();
    levels
}

/// The profile of A if every vertex of π_{𝔭^n}(A) has the same number of children.
pub fn regularity_profile(a: &RingSet) -> Option<GradedProfile> {
    if a.is_empty() {
        return None;
    }
    let ring = &a.ring;
    let levels = level_projections(a);
    let mut m = Vec::with_capacity(a.level as usize);
    for n in 0..a.level as usize {
        let modulus = ring.order(n as u32) as usize;
        let mut counts = vec![0u64; modulus];
        for c in levels[n + 1].iter() {
            counts[c % modulus] += 1;
        }
        let mut common = None;
        for v in levels[n].iter() {
            match common {
                None => common = Some(counts[v]),
                Some(c) if c != counts[v] => return None,
                _ => {}
            }
        }
        m.push(common.unwrap_or(0));
    }
    GradedProfile::new(m, ring.q()).ok()
}

/// Extracts a regular subset A' ⊆ A.
///
/// Works from the leaves up. At each level every surviving subtree below has
/// the same shape, so keeping vertices with at least `m` surviving children
/// (pruned to the `m` smallest-index ones) retains `m · #{vertices}` subtrees;
/// `m` is chosen to maximise that, preferring larger `m` on ties. This is at
/// least as large as keeping the heaviest dyadic class of child counts, which
/// gives |A'| ≥ |A| / (2(⌊log₂ q⌋ + 1))^N.
pub fn regularize(a: &RingSet) -> Result<(RingSet, GradedProfile)> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let ring = &a.ring;
    let top = a.level as usize;
    let q = ring.q() as usize;
    // survivors[n]: level-n vertices kept as parents; kept[n]: level-n vertices kept as children
    let mut survivors: Vec<BitSet> = vec![BitSet::new(0); top + 1];
    let mut kept: Vec<BitSet> = vec![BitSet::new(0); top + 1];
    survivors[top] = a.bits.clone();
    let mut m = vec![0u64; top];
    for n in (0..top).rev() {
        let modulus = ring.order(n as u32) as usize;
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); modulus];
        for c in survivors[n + 1].iter() {
            children[c % modulus].push(c);
        }
        let mut hist = vec![0usize; q + 1];
        for ch in &children {
            hist[ch.len()] += 1;
        }
        let mut best = (0usize, 0usize);
        let mut at_least = 0usize;
        for t in (1..=q).rev() {
            at_least += hist[t];
            if t * at_least > best.0 * best.1 {
                best = (t, at_least);
            }
        }
        let mt = best.0;
        m[n] = mt as u64;
        let mut parents = BitSet::new(modulus);
        let mut keep = BitSet::new(ring.order(n as u32 + 1) as usize);
        for (v, ch) in children.iter().enumerate() {
            if ch.len() >= mt {
                parents.insert(v);
                // children arrive in increasing index order
                for &c in &ch[..mt] {
                    keep.insert(c);
                }
            }
        }
        survivors[n] = parents;
        kept[n + 1] = keep;
    }
    // top-down: a vertex survives if it was kept and its parent survives
    let mut alive = BitSet::new(1);
    alive.insert(0);
    for n in 0..top {
        let modulus = ring.order(n as u32);
        let mut next = BitSet::new(ring.order(n as u32 + 1) as usize);
        for c in kept[n + 1].iter() {
            if alive.contains(c % modulus as usize) {
                next.insert(c);
            }
        }
        alive = next;
    }
    let out = RingSet::from_bits(ring, a.level, alive)?;
    let profile = GradedProfile::new(m, ring.q())?;
    Ok((out, profile))
}

/// Guaranteed size factor of `regularize`: (2(⌊log₂ q⌋ + 1))^N.
pub fn regularize_loss_bound(q: u64, n: u32) -> u128 {
    let classes = 64 - q.leading_zeros() as u128;
    (2 * classes).pow(n)
}

/// gr_j(X) = π_𝔭({x : 𝔭^j x ∈ X}), by enumerating x over the whole level.
pub fn graded(x: &RingSet, j: u32) -> Result<Vec<u32>> {
    let ring = &x.ring;
    let level = x.level;
    if j >= level {
        return Err(Error::LevelOverflow { level: j, max: level.saturating_sub(1) });
    }
    let pj = ring.pow(ring.uniformizer(level)?, j as u64);
    let mut seen = vec![false; ring.q() as usize];
    for z in 0..ring.order(level) {
        if x.contains_index(ring.mul_idx(level, z, pj.index())) {
            seen[(z % ring.q()) as usize] = true;
        }
    }
    Ok((0..ring.q() as u32).filter(|&a| seen[a as usize]).collect())
}

/// J(X) = {j : gr_j(X) contains a nonzero residue}, through `graded`.
pub fn j_set_graded(x: &RingSet) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for j in 0..x.level {
        if graded(x, j)?.iter().any(|&a| a != 0) {
            out.push(j);
        }
    }
    Ok(out)
}

/// J(X) = {val(s) : s ∈ X, s ≠ 0}.
pub fn j_set(x: &RingSet) -> Vec<u32> {
    let mut seen = vec![false; x.level as usize];
    for i in x.indices().filter(|&i| i != 0) {
        seen[x.ring.val_idx(x.level, i) as usize] = true;
    }
    (0..x.level).filter(|&j| seen[j as usize]).collect()
}

/// π_{𝔭^{N₂}}(𝔭^{N₁}ℤx) ⊆ π_{𝔭^{N₂}}(S) for the unit `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentWitness {
    pub x: RingElem,
    pub n1: u32,
    pub n2: u32,
}

impl SegmentWitness {
    pub fn length(&self) -> u32 {
        self.n2 - self.n1
    }
}

/// The cyclic group generated by `g` (top-level index), listed from 0.
fn multiples(ring: &Ring, level: u32, g: u64) -> Vec<u64> {
    let mut out = vec![0u64];
    let mut cur = g;
    while cur != 0 {
        out.push(cur);
        cur = ring.add_idx(level, cur, g);
    }
    out
}

/// Verifies a segment witness against `s` by direct enumeration.
pub fn verify_segment(s: &RingSet, w: &SegmentWitness) -> Result<bool> {
    let ring = &s.ring;
    if w.n1 >= w.n2 || w.n2 > s.level || !ring.is_unit(w.x) {
        return Ok(false);
    }
    let level = w.x.level();
    let y = ring.pow(ring.uniformizer(level)?, w.n1 as u64);
    let g = ring.mul(y, w.x)?;
    let proj = s.project(w.n2)?;
    let m = ring.order(w.n2);
    Ok(multiples(ring, level, g.index()).into_iter().all(|v| proj.contains_index(v % m)))
}

/// Scans units x in index order and levels N₁ < N₂ for the longest segment
/// inside `s`; ties go to the smaller N₁, then the smaller x.
pub fn segment_search(s: &RingSet, min_length: u32) -> Result<Option<SegmentWitness>> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let ring = &s.ring;
    let top = s.level;
    if top == 0 {
        return Ok(None);
    }
    let levels = level_projections(s);
    let mut best: Option<SegmentWitness> = None;
    for n1 in 0..top {
        let best_len = best.map_or(0, |w| w.length());
        if top - n1 <= best_len {
            break;
        }
        let y = ring.pow(ring.uniformizer(top)?, n1 as u64);
        // x matters modulo 𝔭^{top − n1}
        let span = ring.order(top - n1);
        for xi in (0..span).filter(|i| i % ring.q() != 0) {
            let x = ring.decode(top, xi)?;
            let g = ring.mul(y, x)?;
            let mults = multiples(ring, top, g.index());
            let mut n2 = n1;
            while n2 < top {
                let m = ring.order(n2 + 1) as usize;
                if mults.iter().all(|&v| levels[n2 as usize + 1].contains(v as usize % m)) {
                    n2 += 1;
                } else {
                    break;
                }
            }
            if n2 - n1 > best.map_or(0, |w| w.length()) {
                best = Some(SegmentWitness { x, n1, n2 });
                if n2 == top {
                    break;
                }
            }
        }
    }
    Ok(best.filter(|w| w.length() >= min_length.max(1)))
}

#[cfg(test)]
mod tests;
