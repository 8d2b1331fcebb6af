use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rational::{cmp_with_power, Rational};
use crate::ring::ResidueField;
use crate::sets::{gen_set_with, j_set, regularity_profile, Budget, GradedProfile, RingSet, SetOp};

fn field_fold(field: &ResidueField, a: &[bool], b: &[bool], op: SetOp) -> Vec<bool> {
    let mut out = vec![false; a.len()];
    for x in (0..a.len()).filter(|&x| a[x]) {
        for y in (0..b.len()).filter(|&y| b[y]) {
            let (x, y) = (x as u32, y as u32);
            let z = match op {
                SetOp::Sum => field.add(x, y),
                SetOp::Diff => field.sub(x, y),
                SetOp::Prod => field.mul(x, y),
            };
            out[z as usize] = true;
        }
    }
    out
}

fn mask(field: &ResidueField, b: &[u32]) -> Result<Vec<bool>> {
    let mut m = vec![false; field.order() as usize];
    for &x in b {
        m[field.check(x)? as usize] = true;
    }
    Ok(m)
}

fn listed(m: &[bool]) -> Vec<u32> {
    (0..m.len()).filter(|&i| m[i]).map(|i| i as u32).collect()
}

/// ⟨B⟩_C computed inside the residue field.
pub fn field_gen_set(field: &ResidueField, b: &[u32], c: u32) -> Result<Vec<u32>> {
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    if c == 0 {
        return Err(Error::Precondition("C must be positive".into()));
    }
    let base = mask(field, b)?;
    let mut prods = base.clone();
    for _ in 1..c {
        prods = field_fold(field, &prods, &base, SetOp::Prod);
    }
    let mut sums = prods.clone();
    for _ in 1..c {
        sums = field_fold(field, &sums, &prods, SetOp::Sum);
    }
    Ok(listed(&field_fold(field, &sums, &sums, SetOp::Diff)))
}

/// Contains 0 and 1 and is closed under +, −, · and inversion.
pub fn is_subfield(field: &ResidueField, s: &[u32]) -> bool {
    let Ok(m) = mask(field, s) else { return false };
    if !m[0] || m.len() < 2 || !m[1] {
        return false;
    }
    s.iter().all(|&x| {
        field.inv(x).map_or(x == 0, |i| m[i as usize])
            && s.iter()
                .all(|&y| m[field.add(x, y) as usize] && m[field.sub(x, y) as usize] && m[field.mul(x, y) as usize])
    })
}

/// Closes `b` under the field operations by fixpoint iteration.
pub fn field_closure_oracle(field: &ResidueField, b: &[u32]) -> Result<Vec<u32>> {
    let mut m = mask(field, b)?;
    m[0] = true;
    let one = 1 % m.len();
    m[one] = true;
    loop {
        let cur = listed(&m);
        let mut grew = false;
        let mut add = |z: u32| {
            if !m[z as usize] {
                m[z as usize] = true;
                grew = true;
            }
        };
        for &x in &cur {
            add(field.neg(x));
            if let Some(i) = field.inv(x) {
                add(i);
            }
            for &y in &cur {
                add(field.add(x, y));
                add(field.mul(x, y));
            }
        }
        if !grew {
            return Ok(listed(&m));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubfieldClosure {
    pub elements: Vec<u32>,
    /// Smallest C with ⟨B⟩_C equal to the subfield.
    pub c_min: u32,
    /// The C in the doubling sequence at which closure was first observed.
    pub c_stable: u32,
}

/// Doubles C until ⟨B⟩_C is a subfield, then finds the least such C.
pub fn subfield_closure(field: &ResidueField, b: &[u32]) -> Result<SubfieldClosure> {
    let m = mask(field, b)?;
    if !m[0] || !m[1] {
        return Err(Error::Precondition("B must contain 0 and 1".into()));
    }
    let mut c = 1u32;
    let elements = loop {
        let s = field_gen_set(field, b, c)?;
        if is_subfield(field, &s) {
            break s;
        }
        c = c.checked_mul(2).ok_or(Error::Overflow("subfield closure C"))?;
    };
    let mut c_min = 1;
    while field_gen_set(field, b, c_min)? != elements {
        c_min += 1;
    }
    Ok(SubfieldClosure { elements, c_min, c_stable: c })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct E0Report {
    pub e0: u32,
    /// A was replaced by λ(A − A) to bring 0 and 1 into it.
    pub normalized: bool,
    pub lambda: Option<u64>,
    /// 2C₁ ≥ p and N > e, so p ∈ ⟨A⟩_{2C₁} forces e₀ ≤ e.
    pub bound_applies: bool,
}

/// e₀ = min(J(⟨A⟩_{2C₁}) ∖ {0}).
pub fn e0_detect(a: &RingSet, c1: u32, budget: &mut Budget) -> Result<E0Report> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let ring = a.ring().clone();
    let level = a.level();
    let (set, lambda) = if a.contains_index(0) && a.contains_index(1 % ring.order(level)) {
        (a.clone(), None)
    } else {
        let diffs = crate::sets::combine_with(Exec::default(), SetOp::Diff, a, a)?;
        let u = diffs
            .indices()
            .find(|&i| ring.val_idx(level, i) == 0)
            .ok_or_else(|| Error::Precondition("A − A contains no unit".into()))?;
        let inv = ring.inverse(ring.decode(level, u)?)?;
        (diffs.dilate(inv)?, Some(inv.index()))
    };
    let g = gen_set_with(Exec::default(), &set, 2 * c1, budget)?;
    let e0 = j_set(&g)
        .into_iter()
        .find(|&j| j > 0)
        .ok_or_else(|| Error::MissingWitness("J(⟨A⟩_{2C₁}) has no positive element".into()))?;
    let params = ring.params();
    let bound_applies = 2 * c1 as u64 >= params.p && level > params.e;
    if bound_applies && e0 > params.e {
        return Err(Error::Internal(format!("e₀ = {e0} exceeds e = {}", params.e)));
    }
    Ok(E0Report { e0, normalized: lambda.is_some(), lambda, bound_applies })
}

/// The fiber of `a` over the residue class of its least element at level
/// `k`, translated to 0 and divided by 𝔭^k.
fn renormalized_fiber(a: &RingSet, xi: u64, k: u32) -> Result<(RingSet, u64)> {
    let ring = a.ring();
    let level = a.level();
    let m = ring.order(k);
    let x0 = a.indices().find(|&i| i % m == xi).ok_or(Error::NullFiber)?;
    let b = a.indices().filter(|&i| i % m == xi).map(|i| ring.sub_idx(level, i, x0) / m);
    Ok((RingSet::from_indices(ring, level - k, b)?, x0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailExtract {
    pub n_bar: u32,
    /// M = N − n̄.
    pub m: u32,
    pub b: RingSet,
    /// N′ with x₀ + 𝔭^{N′}B ⊆ A′; here N′ = n̄.
    pub n_prime: u32,
    pub offset: u64,
    pub profile: GradedProfile,
    /// |π_i(B)| ≥ q^{iε/4} for 1 ≤ i ≤ M.
    pub size_bounds_hold: bool,
}

/// n̄ = max{k ∈ [1, N−1] : m₀⋯m_{k−1} < q^{kε/4}} and the tail set B above it.
pub fn tail_extract(a: &RingSet, eps: &Rational) -> Result<TailExtract> {
    let profile = regularity_profile(a).ok_or_else(|| Error::Precondition("set is not regular".into()))?;
    let ring = a.ring();
    let q = ring.q();
    let n = a.level();
    let quarter = eps / Rational::from_integer(4);
    let n_bar = (1..n)
        .filter(|&k| {
            cmp_with_power(profile.prefix_product(k as usize), q, &(quarter * Rational::from_integer(k as i128)))
                == std::cmp::Ordering::Less
        })
        .max()
        .unwrap_or(0);
    let first = a.indices().next().ok_or(Error::EmptySet)?;
    let (b, offset) = renormalized_fiber(a, first % ring.order(n_bar), n_bar)?;
    let m = n - n_bar;
    let mut size_bounds_hold = true;
    for i in 1..=m {
        let size = b.project(i)?.len() as u128;
        if cmp_with_power(size, q, &(quarter * Rational::from_integer(i as i128))) == std::cmp::Ordering::Less {
            size_bounds_hold = false;
        }
    }
    let profile = regularity_profile(&b).ok_or_else(|| Error::Internal("tail set lost regularity".into()))?;
    Ok(TailExtract { n_bar, m, b, n_prime: n_bar, offset, profile, size_bounds_hold })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargeSetReport {
    pub n0: u32,
    /// Densest residue class at level n₀, least index on ties.
    pub xi: u64,
    pub offset: u64,
    pub b: RingSet,
    /// Least C ≤ cap with ⟨B⟩_C everything; None if the cap was reached.
    pub saturation: Option<u32>,
    pub cap: u32,
}

/// n₀ = max{k ∈ [1, N−1] : max_ξ |A ∩ fiber_k(ξ)| > q^{−3k/4}|A|}, the
/// densest fiber renormalised to O/𝔭^{N−n₀}, and its saturation constant.
pub fn large_set_cover(a: &RingSet, cap: u32, budget: &mut Budget) -> Result<LargeSetReport> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let ring = a.ring();
    let q = ring.q();
    let n = a.level();
    let total = BigUint::from(a.len());
    let densest = |k: u32| -> (u64, usize) {
        let m = ring.order(k);
        let mut counts = vec![0usize; m as usize];
        for i in a.indices() {
            counts[(i % m) as usize] += 1;
        }
        let (xi, &c) = counts.iter().enumerate().max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(&x.0))).expect("nonempty");
        (xi as u64, c)
    };
    // c > q^{−3k/4}|A|  ⇔  c⁴ q^{3k} > |A|⁴
    let n0 = (1..n)
        .filter(|&k| BigUint::from(densest(k).1).pow(4) * BigUint::from(q).pow(3 * k) > total.pow(4))
        .max()
        .unwrap_or(0);
    let xi = densest(n0).0;
    let (b, offset) = renormalized_fiber(a, xi, n0)?;
    let mut saturation = None;
    for c in 1..=cap {
        if gen_set_with(Exec::default(), &b, c, budget)?.is_full() {
            saturation = Some(c);
            break;
        }
    }
    Ok(LargeSetReport { n0, xi, offset, b, saturation, cap })
}
