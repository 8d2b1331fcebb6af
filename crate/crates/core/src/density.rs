//! Schnirelmann density, Mann sums and the B/T statistics of graded profiles.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{ceil_mul, Rational};
use crate::sets::GradedProfile;

/// F ∪ [t, ∞) with F ⊆ [0, t), or just the finite set F when `tail` is false.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TailSet {
    below: Vec<bool>,
    tail: bool,
}

impl TailSet {
    pub fn finite<I: IntoIterator<Item = u64>>(elems: I) -> Self {
        let elems: Vec<u64> = elems.into_iter().collect();
        let t = elems.iter().max().map_or(0, |m| m + 1) as usize;
        let mut below = vec![false; t];
        for e in elems {
            below[e as usize] = true;
        }
        TailSet { below, tail: false }
    }

    /// `elems ∪ [t, ∞)`; elements at or above `t` are absorbed into the tail.
    pub fn with_tail<I: IntoIterator<Item = u64>>(elems: I, t: u64) -> Self {
        let mut below = vec![false; t as usize];
        for e in elems.into_iter().filter(|&e| e < t) {
            below[e as usize] = true;
        }
        TailSet { below, tail: true }.normalized()
    }

    /// ℤ^{≥0}.
    pub fn naturals() -> Self {
        TailSet { below: Vec::new(), tail: true }
    }

    // Pulls the tail threshold down past members just below it.
    fn normalized(mut self) -> Self {
        if self.tail {
            while self.below.last() == Some(&true) {
                self.below.pop();
            }
        } else {
            while self.below.last() == Some(&false) {
                self.below.pop();
            }
        }
        self
    }

    pub fn contains(&self, n: u64) -> bool {
        match self.below.get(n as usize) {
            Some(&b) => b,
            None => self.tail,
        }
    }

    pub fn has_tail(&self) -> bool {
        self.tail
    }

    /// Tail threshold t (for finite sets, one past the largest element).
    pub fn threshold(&self) -> u64 {
        self.below.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        !self.tail && self.below.iter().all(|&b| !b)
    }

    pub fn min(&self) -> Option<u64> {
        self.below.iter().position(|&b| b).map(|i| i as u64).or(if self.tail { Some(self.threshold()) } else { None })
    }

    pub fn is_naturals(&self) -> bool {
        self.tail && self.below.is_empty()
    }

    /// Members below `bound`.
    pub fn members_below(&self, bound: u64) -> impl Iterator<Item = u64> + '_ {
        (0..bound).filter(move |&n| self.contains(n))
    }

    /// |X ∩ [1, n]|.
    pub fn count_up_to(&self, n: u64) -> u64 {
        let t = self.threshold();
        let finite = self.below.iter().skip(1).take(n.min(t.saturating_sub(1)) as usize).filter(|&&b| b).count() as u64;
        let tail = if self.tail && n >= t.max(1) { n - t.max(1) + 1 } else { 0 };
        finite + tail
    }
}

/// σ(X) = inf_{n ≥ 1} |X ∩ [1, n]| / n.
///
/// For n ≥ t the ratio is 1 − (t − 1 − |F ∩ [1, t)|)/n, non-decreasing in n,
/// so the infimum is attained on [1, 2t]; finite sets have density 0.
pub fn schnirelmann(x: &TailSet) -> Rational {
    if !x.tail {
        return Rational::zero();
    }
    schnirelmann_witness(x).0
}

/// σ(X) with the first n attaining it.
pub fn schnirelmann_witness(x: &TailSet) -> (Rational, u64) {
    if !x.tail {
        return (Rational::zero(), u64::MAX);
    }
    let window = (2 * x.threshold()).max(1);
    let mut best = (Rational::one(), 1);
    for n in 1..=window {
        let r = Rational::new(x.count_up_to(n) as i128, n as i128);
        if r < best.0 {
            best = (r, n);
        }
    }
    best
}

/// X + Y.
pub fn sumset(x: &TailSet, y: &TailSet) -> TailSet {
    let (Some(mx), Some(my)) = (x.min(), y.min()) else {
        return TailSet::finite([]);
    };
    let tail_from = match (x.tail, y.tail) {
        (true, true) => Some((my + x.threshold()).min(mx + y.threshold())),
        (true, false) => Some(my + x.threshold()),
        (false, true) => Some(mx + y.threshold()),
        (false, false) => None,
    };
    let bound = tail_from.unwrap_or(x.threshold() + y.threshold());
    let ys: Vec<u64> = y.members_below(bound).collect();
    let mut below = vec![false; bound as usize];
    for a in x.members_below(bound) {
        for &b in &ys {
            if a + b < bound {
                below[(a + b) as usize] = true;
            }
        }
    }
    TailSet { below, tail: tail_from.is_some() }.normalized()
}

/// Σ_k X; Σ_0 X = {0}.
pub fn kfold_sum(x: &TailSet, k: u32) -> TailSet {
    let mut acc = TailSet::finite([0]);
    for _ in 0..k {
        acc = sumset(&acc, x);
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MannOutcome {
    pub holds: bool,
    pub sum_is_naturals: bool,
    pub sigma_x: Rational,
    pub sigma_y: Rational,
    pub sigma_sum: Rational,
    /// An n with |(X+Y) ∩ [1, n]| < n(σ(X) + σ(Y)) when `holds` is false.
    pub witness: Option<u64>,
}

/// Checks X + Y = ℤ^{≥0} or σ(X + Y) ≥ σ(X) + σ(Y).
pub fn mann_check(x: &TailSet, y: &TailSet) -> Result<MannOutcome> {
    if !x.contains(0) || !y.contains(0) {
        return Err(Error::MissingZero);
    }
    let s = sumset(x, y);
    let sigma_x = schnirelmann(x);
    let sigma_y = schnirelmann(y);
    let (sigma_sum, at) = schnirelmann_witness(&s);
    let sigma_sum = if s.tail { sigma_sum } else { Rational::zero() };
    let naturals = s.is_naturals();
    let holds = naturals || sigma_sum >= sigma_x + sigma_y;
    let witness = if holds {
        None
    } else if s.tail {
        Some(at)
    } else {
        // a finite sum eventually has ratio below any positive target
        let target = sigma_x + sigma_y;
        (1..).find(|&n| Rational::new(s.count_up_to(n) as i128, n as i128) < target)
    };
    Ok(MannOutcome { holds, sum_is_naturals: naturals, sigma_x, sigma_y, sigma_sum, witness })
}

/// B = {i : x_i ≠ 0} and T = {i : x_i ≥ 1/2} of a profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileStats {
    pub n: usize,
    pub nonzero: Vec<bool>,
    pub large: Vec<bool>,
}

pub fn profile_stats(profile: &GradedProfile) -> ProfileStats {
    let q = profile.q() as u128;
    ProfileStats {
        n: profile.len(),
        nonzero: profile.m().iter().map(|&m| m > 1).collect(),
        // x_i ≥ 1/2 ⟺ m_i² ≥ q
        large: profile.m().iter().map(|&m| (m as u128) * (m as u128) >= q).collect(),
    }
}

impl ProfileStats {
    pub fn from_sets(n: usize, b: &[usize], t: &[usize]) -> Result<Self> {
        let mut nonzero = vec![false; n];
        let mut large = vec![false; n];
        for &i in b {
            *nonzero.get_mut(i).ok_or(Error::IndexOutOfRange { index: i as u64, size: n as u64 })? = true;
        }
        for &i in t {
            *large.get_mut(i).ok_or(Error::IndexOutOfRange { index: i as u64, size: n as u64 })? = true;
            nonzero[i] = true;
        }
        Ok(ProfileStats { n, nonzero, large })
    }

    pub fn b(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.nonzero[i]).collect()
    }

    pub fn t(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.large[i]).collect()
    }

    /// D_T(k) = |(T ∩ [0, N−1−k]) ∖ (T − k)|.
    pub fn d_t(&self, k: usize) -> usize {
        if k >= self.n {
            return 0;
        }
        (0..self.n - k).filter(|&i| self.large[i] && !self.large[i + k]).count()
    }

    /// D_T(k) = |((T + k) ∩ [0, N−1]) ∖ T|, the shifted form.
    pub fn d_t_shifted(&self, k: usize) -> usize {
        self.t().into_iter().map(|i| i + k).filter(|&j| j < self.n && !self.large[j]).count()
    }

    /// (1/N) Σ_{k<N} D_T(k).
    pub fn avg_d_t(&self) -> Rational {
        if self.n == 0 {
            return Rational::zero();
        }
        let s: usize = (0..self.n).map(|k| self.d_t(k)).sum();
        Rational::new(s as i128, self.n as i128)
    }

    /// The k maximising D_T(k) on [lo, N−1], smallest on ties.
    pub fn argmax_d_t(&self, lo: usize) -> Option<(usize, usize)> {
        (lo..self.n).map(|k| (k, self.d_t(k))).fold(None, |best, (k, d)| match best {
            Some((_, bd)) if bd >= d => best,
            _ => Some((k, d)),
        })
    }
}

/// Σ_{i<l} x_i ≥ lε for all integers l in [Nδ, N], and x₀, x₁ ≠ 0: the
/// hypotheses under which the interval cover holds.
pub fn cover_hypotheses_hold(profile: &GradedProfile, eps: &Rational, delta: &Rational) -> bool {
    let n = profile.len();
    if n < 2 || profile.m()[0] == 1 || profile.m()[1] == 1 {
        return false;
    }
    let lo = ceil_mul(delta, n as u32) as usize;
    (lo..=n).all(|l| prefix_at_least(profile, l, eps))
}

/// m₀⋯m_{l−1} ≥ q^{lε}, exactly.
fn prefix_at_least(profile: &GradedProfile, l: usize, eps: &Rational) -> bool {
    let (a, b) = (eps.numer().to_u64().unwrap_or(0), eps.denom().to_u64().unwrap_or(1));
    let mut lhs = BigUint::one();
    for &m in &profile.m()[..l] {
        lhs *= BigUint::from(m);
    }
    let lhs = lhs.pow(b as u32);
    let rhs = BigUint::from(profile.q()).pow((l as u64 * a) as u32);
    lhs >= rhs
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalCover {
    pub covered: bool,
    /// Open interval (lo, N) that was checked, as integer bounds.
    pub lo: u64,
    pub max_summands: usize,
    /// One decomposition per covered integer, in increasing order.
    pub witnesses: Vec<(u64, Vec<usize>)>,
    pub first_gap: Option<u64>,
}

/// Checks that every integer in (⌈1/ε⌉δN, N) is a sum of at most 3⌈1/ε⌉
/// elements of B, and records one decomposition per integer.
pub fn large_interval_cover(stats: &ProfileStats, eps: &Rational, delta: &Rational) -> Result<IntervalCover> {
    if *eps <= Rational::zero() {
        return Err(Error::Precondition("ε must be positive".into()));
    }
    let inv = (Rational::one() / eps).ceil().to_integer();
    let budget = 3 * inv as usize;
    let n = stats.n as u64;
    let left = Rational::from_integer(inv) * delta * Rational::from_integer(n as i128);
    let lo = left.floor().to_integer().max(0) as u64;
    // fewest summands reaching each total, with the last summand used
    let b = stats.b();
    let mut fewest = vec![usize::MAX; stats.n];
    let mut last = vec![0usize; stats.n];
    if stats.n > 0 {
        fewest[0] = 0;
    }
    for s in 1..stats.n {
        for &e in b.iter().filter(|&&e| e > 0 && e <= s) {
            if fewest[s - e] != usize::MAX && fewest[s - e] + 1 < fewest[s] {
                fewest[s] = fewest[s - e] + 1;
                last[s] = e;
            }
        }
    }
    let mut witnesses = Vec::new();
    let mut first_gap = None;
    for m in (lo + 1)..n {
        let mu = m as usize;
        if fewest[mu] > budget {
            first_gap.get_or_insert(m);
            continue;
        }
        let mut parts = Vec::new();
        let mut s = mu;
        while s > 0 {
            parts.push(last[s]);
            s -= last[s];
        }
        parts.reverse();
        witnesses.push((m, parts));
    }
    Ok(IntervalCover { covered: first_gap.is_none(), lo, max_summands: budget, witnesses, first_gap })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AverageDReport {
    /// (1/N) Σ D_T(k).
    pub average: Rational,
    /// N ε³ / 16, as displayed with the averaged sum.
    pub displayed_bound: Rational,
    /// Σ D_T(k) against N² ε³ / 16, the form reached in the argument.
    pub sum: Rational,
    pub sum_bound: Rational,
}

pub fn average_d_report(stats: &ProfileStats, eps: &Rational) -> AverageDReport {
    let n = Rational::from_integer(stats.n as i128);
    let e3 = eps * eps * eps;
    let average = stats.avg_d_t();
    AverageDReport {
        average,
        displayed_bound: n * e3 / Rational::from_integer(16),
        sum: average * n,
        sum_bound: n * n * e3 / Rational::from_integer(16),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn density_examples() {
        assert_eq!(schnirelmann(&TailSet::with_tail([0], 1)), rat(1, 1));
        assert_eq!(schnirelmann(&TailSet::with_tail([0, 2], 4)), rat(0, 1));
        assert_eq!(schnirelmann(&TailSet::with_tail([0, 1], 3)), rat(1, 2));
        assert_eq!(schnirelmann_witness(&TailSet::with_tail([0, 1], 3)).1, 2);
        assert_eq!(schnirelmann(&TailSet::finite([0, 1, 2])), rat(0, 1));
        assert_eq!(schnirelmann(&TailSet::naturals()), rat(1, 1));
    }

    /// Brute-force σ over a long window.
    fn sigma_oracle(x: &TailSet) -> Rational {
        (1..400u64).map(|n| rat((1..=n).filter(|&i| x.contains(i)).count() as i128, n as i128)).min().unwrap()
    }

    #[test]
    fn density_matches_long_window() {
        let mut state = 7u64;
        for _ in 0..300 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let t = (state >> 40) % 20;
            let elems: Vec<u64> = (0..t).filter(|i| (state >> (i % 30)) & 1 == 1).collect();
            let x = TailSet::with_tail(elems, t);
            assert_eq!(schnirelmann(&x), sigma_oracle(&x));
        }
    }

    #[test]
    fn mann_examples() {
        let x = TailSet::with_tail([0, 1], 4);
        assert_eq!(schnirelmann(&x), rat(1, 3));
        let s = sumset(&x, &x);
        assert_eq!(s, TailSet::with_tail([0, 1, 2], 4));
        let out = mann_check(&x, &x).unwrap();
        assert!(out.holds);
        assert_eq!(out.sigma_sum, rat(2, 3));
        let out = mann_check(&TailSet::naturals(), &x).unwrap();
        assert!(out.holds && out.sum_is_naturals);
        assert_eq!(mann_check(&TailSet::with_tail([1], 3), &x), Err(Error::MissingZero));
    }

    #[test]
    fn sumset_matches_bruteforce() {
        let mut state = 99u64;
        for _ in 0..300 {
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                state >> 33
            };
            let tx = next() % 12;
            let ty = next() % 12;
            let bits_x = next();
            let bits_y = next();
            let x = TailSet::with_tail((0..tx).filter(|i| bits_x >> i & 1 == 1), tx);
            let y = if next() % 3 == 0 {
                TailSet::finite((0..ty).filter(|i| bits_y >> i & 1 == 1))
            } else {
                TailSet::with_tail((0..ty).filter(|i| bits_y >> i & 1 == 1), ty)
            };
            let s = sumset(&x, &y);
            for n in 0..60 {
                let want = (0..=n).any(|a| x.contains(a) && y.contains(n - a));
                assert_eq!(s.contains(n), want, "{x:?} + {y:?} at {n}");
            }
        }
    }

    #[test]
    fn kfold_sums() {
        let x = TailSet::finite([0, 1]);
        assert_eq!(kfold_sum(&x, 3), TailSet::finite([0, 1, 2, 3]));
        assert_eq!(kfold_sum(&x, 0), TailSet::finite([0]));
    }

    #[test]
    fn d_t_examples() {
        let s = ProfileStats::from_sets(4, &[0, 2], &[0, 2]).unwrap();
        assert_eq!(s.d_t(1), 2);
        assert_eq!(s.d_t_shifted(1), 2);
        for k in 0..4 {
            assert_eq!(s.d_t(0), 0);
            assert_eq!(s.d_t(k), s.d_t_shifted(k));
        }
    }

    #[test]
    fn interval_cover_example() {
        let s = ProfileStats::from_sets(6, &[0, 1, 2], &[]).unwrap();
        let cover = large_interval_cover(&s, &rat(1, 2), &rat(1, 100)).unwrap();
        assert!(cover.covered);
        assert_eq!(cover.max_summands, 6);
        assert_eq!(cover.witnesses.len(), 5);
        for (m, parts) in &cover.witnesses {
            assert_eq!(parts.iter().sum::<usize>() as u64, *m);
        }
        let sparse = ProfileStats::from_sets(20, &[0, 7], &[]).unwrap();
        let cover = large_interval_cover(&sparse, &rat(1, 1), &rat(0, 1)).unwrap();
        assert!(!cover.covered);
        assert_eq!(cover.first_gap, Some(1));
    }

    #[test]
    fn profile_stats_use_exact_threshold() {
        let p = GradedProfile::new(vec![1, 2, 3, 5], 9).unwrap();
        let s = profile_stats(&p);
        assert_eq!(s.b(), vec![1, 2, 3]);
        assert_eq!(s.t(), vec![2, 3]);
    }

    #[test]
    fn cover_hypotheses() {
        let p = GradedProfile::new(vec![5, 5, 1, 1], 5).unwrap();
        assert!(cover_hypotheses_hold(&p, &rat(1, 2), &rat(0, 1)));
        assert!(!cover_hypotheses_hold(&p, &rat(3, 4), &rat(0, 1)));
        let p = GradedProfile::new(vec![1, 5, 5, 5], 5).unwrap();
        assert!(!cover_hypotheses_hold(&p, &rat(1, 10), &rat(0, 1)));
    }
}
