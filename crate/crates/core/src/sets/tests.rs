use super::*;
use std::collections::BTreeSet;

fn ring(p: u64, f: u32, e: u32, n: u32) -> Arc<Ring> {
    Ring::from_parts(p, f, e, n).unwrap()
}

fn ints(r: &Arc<Ring>, level: u32, xs: &[i64]) -> RingSet {
    RingSet::from_ints(r, level, xs.iter().copied()).unwrap()
}

#[test]
fn combinators_on_mod_eight() {
    let r = ring(2, 1, 1, 3);
    let a = ints(&r, 3, &[0, 1]);
    assert_eq!(combine(SetOp::Diff, &a, &a).unwrap(), ints(&r, 3, &[0, 1, 7]));
    assert_eq!(combine(SetOp::Prod, &a, &a).unwrap(), a);
    let r9 = ring(3, 1, 1, 2);
    let t = ints(&r9, 2, &[1, 8]);
    assert_eq!(combine(SetOp::Prod, &t, &t).unwrap(), t);
}

#[test]
fn sequential_and_parallel_agree() {
    let r = ring(3, 1, 1, 5);
    let a = RingSet::from_indices(&r, 5, (0..243).filter(|i| i % 7 == 3 || i % 11 == 0)).unwrap();
    let b = RingSet::from_indices(&r, 5, (0..243).filter(|i| i % 5 == 1)).unwrap();
    for op in [SetOp::Sum, SetOp::Diff, SetOp::Prod] {
        assert_eq!(
            combine_with(Exec::Sequential, op, &a, &b).unwrap(),
            combine_with(Exec::Parallel, op, &a, &b).unwrap()
        );
    }
}

/// Brute force over all words of C products and C summands.
fn gen_set_oracle(r: &Ring, a: &[u64], level: u32, c: u32) -> BTreeSet<u64> {
    let mut prods: BTreeSet<u64> = a.iter().copied().collect();
    for _ in 1..c {
        prods = prods.iter().flat_map(|&x| a.iter().map(move |&y| r.mul_idx(level, x, y))).collect();
    }
    let mut sums = prods.clone();
    for _ in 1..c {
        sums = sums.iter().flat_map(|&x| prods.iter().map(move |&y| r.add_idx(level, x, y))).collect();
    }
    sums.iter().flat_map(|&x| sums.iter().map(move |&y| r.sub_idx(level, x, y))).collect()
}

#[test]
fn gen_set_examples() {
    let r = ring(2, 1, 1, 3);
    let a = ints(&r, 3, &[0, 1]);
    assert_eq!(gen_set(&a, 1).unwrap(), ints(&r, 3, &[0, 1, 7]));
    assert_eq!(gen_set(&a, 2).unwrap(), ints(&r, 3, &[0, 1, 2, 6, 7]));
    let full = RingSet::full(&r, 3).unwrap();
    assert_eq!(gen_set(&full, 3).unwrap(), full);
    for c in 1..5 {
        let want = gen_set_oracle(&r, &[0, 1], 3, c);
        assert_eq!(gen_set(&a, c).unwrap().indices().collect::<BTreeSet<_>>(), want);
    }
}

#[test]
fn gen_set_matches_oracle_without_zero_or_one() {
    let r = ring(3, 1, 2, 3);
    let a = RingSet::from_indices(&r, 3, [2, 5, 13]).unwrap();
    for c in 1..4 {
        let want = gen_set_oracle(&r, &[2, 5, 13], 3, c);
        assert_eq!(gen_set(&a, c).unwrap().indices().collect::<BTreeSet<_>>(), want);
    }
}

#[test]
fn gen_set_budget() {
    let r = ring(2, 1, 1, 8);
    let a = ints(&r, 8, &[0, 1, 3]);
    let mut tight = Budget::new(100);
    assert!(matches!(gen_set_with(Exec::Sequential, &a, 4, &mut tight), Err(Error::CapExceeded { .. })));
    assert_eq!(gen_set(&RingSet::empty(&r, 8).unwrap(), 1), Err(Error::EmptySet));
}

#[test]
fn regularity_examples() {
    let r = ring(2, 1, 1, 3);
    assert_eq!(regularity_profile(&ints(&r, 3, &[0, 4])).unwrap().m(), &[1, 1, 2]);
    let r4 = ring(2, 1, 1, 2);
    assert_eq!(regularity_profile(&RingSet::full(&r4, 2).unwrap()).unwrap().m(), &[2, 2]);
    assert!(regularity_profile(&ints(&r4, 2, &[0, 1, 3])).is_none());
}

#[test]
fn regularize_examples() {
    let r4 = ring(2, 1, 1, 2);
    let full = RingSet::full(&r4, 2).unwrap();
    let (out, prof) = regularize(&full).unwrap();
    assert_eq!(out, full);
    assert_eq!(prof.m(), &[2, 2]);
    let (out, prof) = regularize(&ints(&r4, 2, &[0, 1, 3])).unwrap();
    assert_eq!(out, ints(&r4, 2, &[1, 3]));
    assert_eq!(prof.m(), &[1, 2]);
    let r = ring(3, 1, 1, 3);
    let single = ints(&r, 3, &[17]);
    let (out, prof) = regularize(&single).unwrap();
    assert_eq!(out, single);
    assert_eq!(prof.m(), &[1, 1, 1]);
}

#[test]
fn regularize_keeps_regular_sets_and_bound() {
    let r = ring(3, 1, 1, 4);
    let mut state = 12345u64;
    for _ in 0..200 {
        let mut s = RingSet::empty(&r, 4).unwrap();
        for i in 0..81 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            if (state >> 33).is_multiple_of(3) {
                s.insert_index(i).unwrap();
            }
        }
        if s.is_empty() {
            continue;
        }
        let (out, prof) = regularize(&s).unwrap();
        assert!(out.is_subset(&s));
        assert_eq!(regularity_profile(&out).as_ref(), Some(&prof));
        assert_eq!(out.len() as u128, prof.total());
        assert!(out.len() as u128 * regularize_loss_bound(3, 4) >= s.len() as u128);
        assert_eq!(regularize(&out).unwrap().0, out);
        for k in 0..=4 {
            assert_eq!(out.project(k).unwrap().len() as u128, prof.prefix_product(k as usize));
        }
    }
}

#[test]
fn graded_pieces_and_j() {
    let r = ring(2, 1, 1, 3);
    assert_eq!(graded(&ints(&r, 3, &[4]), 2).unwrap(), vec![1]);
    assert_eq!(j_set(&ints(&r, 3, &[2, 4])), vec![1, 2]);
    assert_eq!(j_set_graded(&ints(&r, 3, &[2, 4])).unwrap(), vec![1, 2]);
    assert!(j_set(&ints(&r, 3, &[0])).is_empty());
    let rr = ring(3, 2, 2, 3);
    let x = RingSet::from_indices(&rr, 3, [0, 9, 81, 100, 200]).unwrap();
    assert_eq!(j_set(&x), j_set_graded(&x).unwrap());
}

#[test]
fn segment_examples() {
    let r = ring(2, 1, 1, 3);
    let w = segment_search(&ints(&r, 3, &[0, 2, 4, 6]), 1).unwrap().unwrap();
    assert_eq!((w.x.index(), w.n1, w.n2), (1, 1, 3));
    let full = RingSet::full(&r, 3).unwrap();
    let w = segment_search(&full, 1).unwrap().unwrap();
    assert_eq!((w.x.index(), w.n1, w.n2), (1, 0, 3));
    assert!(verify_segment(&full, &w).unwrap());
    assert_eq!(segment_search(&ints(&r, 3, &[0, 1]), 2).unwrap(), None);
    assert_eq!(segment_search(&ints(&r, 3, &[0, 1]), 1).unwrap().unwrap().length(), 1);
}

#[test]
fn project_and_fiber() {
    let r = ring(2, 1, 1, 3);
    let a = ints(&r, 3, &[1, 5, 6]);
    assert_eq!(a.project(2).unwrap(), RingSet::from_indices(&r, 2, [1, 2]).unwrap());
    let xi = r.decode(2, 1).unwrap();
    assert_eq!(a.fiber(xi).unwrap(), ints(&r, 3, &[1, 5]));
}
