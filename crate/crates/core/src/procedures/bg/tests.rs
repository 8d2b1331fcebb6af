use super::*;
use crate::rational::rat;
use crate::ring::Ring;
use crate::sets::gen_set;

fn set(p: u64, n: u32, ints: &[i64]) -> RingSet {
    let r = Ring::from_parts(p, 1, 1, n).unwrap();
    RingSet::from_ints(&r, n, ints.iter().copied()).unwrap()
}

#[test]
fn ball_counts() {
    let r = Ring::from_parts(3, 1, 1, 3).unwrap();
    assert_eq!(congruence_ball(&r, 3, 0).unwrap().len(), 27);
    assert_eq!(congruence_ball(&r, 3, 1).unwrap().len(), 9);
    assert_eq!(congruence_ball(&r, 3, 3).unwrap().len(), 1);
}

#[test]
fn f3_pair_is_covered_without_scalars() {
    let a = set(3, 1, &[0, 1]);
    let cert = bg_search(&a, &rat(0, 1), 2, 2).unwrap().unwrap();
    // A − A is already all of F₃
    assert_eq!((cert.k(), cert.c), (0, 1));
    assert!(cert.verified);
    let with_scalars = BGCertificate { scalars: vec![1, 2], c: 1, eps: rat(0, 1), level: 1, verified: false };
    assert!(verify_certificate(&a, &with_scalars, &mut Budget::default()).unwrap());
    // the raw sum {0,1} + 2{0,1} alone covers F₃ as well
    let raw = bg_cover_set(&a, &[2]).unwrap();
    assert!(raw.is_full());
}

#[test]
fn whole_ring_and_mod4() {
    let r = Ring::from_parts(2, 1, 1, 3).unwrap();
    let full = RingSet::full(&r, 3).unwrap();
    let cert = bg_search(&full, &rat(0, 1), 2, 4).unwrap().unwrap();
    assert_eq!((cert.k(), cert.c), (0, 1));

    let a = set(2, 2, &[0, 1]);
    let cert = bg_search(&a, &rat(0, 1), 2, 4).unwrap().unwrap();
    assert_eq!((cert.k(), cert.c), (0, 2));
}

#[test]
fn search_prefers_scalars_over_larger_c() {
    let a = set(3, 2, &[0, 1]);
    let cert = bg_search(&a, &rat(1, 2), 3, 3).unwrap().unwrap();
    assert!(verify_certificate(&a, &cert, &mut Budget::default()).unwrap());
    for c in 1..cert.c {
        let g = gen_set(&a, c).unwrap();
        let target = congruence_ball(a.ring(), 2, cert.target_exponent()).unwrap();
        assert!(!target.is_subset(&g));
    }
}

#[test]
fn empty_set_and_budget() {
    let r = Ring::from_parts(2, 1, 1, 2).unwrap();
    let e = RingSet::empty(&r, 2).unwrap();
    assert_eq!(bg_search(&e, &rat(0, 1), 1, 1), Err(Error::EmptySet));
    let a = set(2, 6, &[0, 1, 3, 7]);
    let r = bg_search_with(Exec::Sequential, &a, &rat(0, 1), 3, 4, &mut Budget::new(10));
    assert!(matches!(r, Err(Error::CapExceeded { .. })));
}

#[test]
fn reduction_on_whole_mod4() {
    let r = Ring::from_parts(2, 1, 1, 2).unwrap();
    let a = RingSet::full(&r, 2).unwrap();
    let cert = BGCertificate { scalars: vec![1], c: 1, eps: rat(0, 1), level: 2, verified: true };
    match reduce_or_inject(&a, &cert, &rat(1, 2), &mut Budget::default()).unwrap() {
        ReduceOutcome::Reduction { certificate, nominal_c, collision } => {
            assert_eq!(certificate.k(), 0);
            assert_eq!(nominal_c, 8);
            assert_eq!(certificate.c, 8);
            assert_eq!(certificate.eps, rat(1, 2));
            assert!(certificate.verified);
            assert!(collision.pivot_val < 1);
            let l = |x: &[u64]| r.add_idx(2, x[0], x[1]);
            assert_eq!(l(&collision.x), l(&collision.x_prime));
        }
        other => panic!("expected a reduction, got {other:?}"),
    }
}

#[test]
fn zero_set_and_k0_are_injective() {
    let a = set(2, 3, &[0]);
    let cert = BGCertificate { scalars: vec![1], c: 1, eps: rat(1, 1), level: 3, verified: true };
    assert!(verify_certificate(&a, &cert, &mut Budget::default()).unwrap());
    assert!(matches!(
        reduce_or_inject(&a, &cert, &rat(1, 3), &mut Budget::default()).unwrap(),
        ReduceOutcome::Injective(_)
    ));

    let a = set(2, 3, &[0, 1, 2]);
    let cert = bg_search(&a, &rat(0, 1), 0, 4).unwrap().unwrap();
    assert!(matches!(
        reduce_or_inject(&a, &cert, &rat(2, 3), &mut Budget::default()).unwrap(),
        ReduceOutcome::Injective(_)
    ));
}

#[test]
fn unverified_certificate_rejected() {
    let a = set(2, 2, &[0, 1]);
    let cert = BGCertificate { scalars: vec![], c: 1, eps: rat(0, 1), level: 2, verified: false };
    assert!(reduce_or_inject(&a, &cert, &rat(1, 2), &mut Budget::default()).is_err());
}

/// Pairwise scan over ⟨A⟩_{2C}^{k+1} for k = 1.
fn brute_violation(a: &RingSet, cert: &BGCertificate, d: u32) -> bool {
    let ring = a.ring();
    let n = a.level();
    let g2: Vec<u64> = gen_set(a, 2 * cert.c).unwrap().indices().collect();
    let w = ring.teichmuller_at(cert.scalars[0], n).unwrap().index();
    let l = |x0: u64, x1: u64| ring.add_idx(n, x0, ring.mul_idx(n, w, x1));
    for &x0 in &g2 {
        for &x1 in &g2 {
            for &y0 in &g2 {
                for &y1 in &g2 {
                    if l(x0, x1) == l(y0, y1)
                        && (ring.val_idx(n, ring.sub_idx(n, x0, y0)) < d
                            || ring.val_idx(n, ring.sub_idx(n, x1, y1)) < d)
                    {
                        return true;
                    }
                }
            }
        }
    }
    false
}

#[test]
fn collision_scan_matches_pairwise_oracle() {
    let r = Ring::from_parts(2, 1, 1, 4).unwrap();
    let mut seen = (0, 0);
    for mask in 1u64..64 {
        let elems: Vec<u64> = (0..6).filter(|b| mask >> b & 1 == 1).map(|b| [0, 2, 4, 8, 6, 12][b as usize]).collect();
        let a = RingSet::from_indices(&r, 4, elems).unwrap();
        let cert = BGCertificate { scalars: vec![1], c: 1, eps: rat(1, 1), level: 4, verified: true };
        for d in 1..4u32 {
            let delta0 = rat(d as i128, 4);
            let out = reduce_or_inject(&a, &cert, &delta0, &mut Budget::default()).unwrap();
            let brute = brute_violation(&a, &cert, d);
            assert_eq!(matches!(out, ReduceOutcome::Reduction { .. }), brute, "{a:?} d={d}");
            if let ReduceOutcome::Reduction { certificate, .. } = out {
                assert!(certificate.verified);
                seen.0 += 1;
            } else {
                seen.1 += 1;
            }
        }
    }
    assert!(seen.0 > 0 && seen.1 > 0);
}

#[test]
fn closure_examples() {
    let a = set(2, 3, &[0, 2, 4, 6]);
    assert!(additive_closure_check(&a, 1, &rat(1, 3), &rat(2, 3)).unwrap().closed);
    let a = set(2, 3, &[0, 1, 2]);
    let r = Ring::from_parts(2, 1, 1, 3).unwrap();
    let x = additive_closure_check(&a, 1, &rat(1, 3), &rat(1, 1)).unwrap();
    assert!(!x.closed);
    let (i, j) = x.witness.unwrap();
    assert_eq!(r.add_idx(3, i, j), 4);
    let full = RingSet::full(&r, 3).unwrap();
    assert!(additive_closure_check(&full, 1, &rat(0, 1), &rat(1, 3)).unwrap().closed);
    assert!(additive_closure_check(&full, 1, &rat(0, 1), &rat(1, 4)).is_err());
}

#[test]
fn injectivity_implies_closure_when_delta_exceeds_eps() {
    let r = Ring::from_parts(2, 1, 1, 4).unwrap();
    let mut checked = 0;
    for mask in 0u64..32 {
        let mut elems = vec![0u64, 1];
        elems.extend((0..5).filter(|b| mask >> b & 1 == 1).map(|b| [2u64, 4, 6, 8, 12][b as usize]));
        let a = RingSet::from_indices(&r, 4, elems).unwrap();
        let eps = rat(1, 4);
        let Some(cert) = bg_search(&a, &eps, 1, 2).unwrap() else { continue };
        for delta0 in [rat(1, 2), rat(3, 4)] {
            if let ReduceOutcome::Injective(_) = reduce_or_inject(&a, &cert, &delta0, &mut Budget::default()).unwrap() {
                assert!(additive_closure_check(&a, cert.c, &eps, &delta0).unwrap().closed);
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn certificate_serde_round_trip() {
    let cert = BGCertificate { scalars: vec![1, 2], c: 3, eps: rat(1, 3), level: 2, verified: true };
    let json = serde_json::to_string(&cert).unwrap();
    assert!(json.contains("[1,3]"));
    assert_eq!(serde_json::from_str::<BGCertificate>(&json).unwrap(), cert);
}
