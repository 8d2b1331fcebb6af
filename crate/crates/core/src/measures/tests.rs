use super::*;
use crate::digits::cocycle;
use crate::rational::rat;
use crate::ring::ResidueField;

fn ring(p: u64, f: u32, e: u32, n: u32) -> Arc<Ring> {
    Ring::from_parts(p, f, e, n).unwrap()
}

fn set(r: &Arc<Ring>, level: u32, xs: &[i64]) -> RingSet {
    RingSet::from_ints(r, level, xs.iter().copied()).unwrap()
}

#[test]
fn conditional_examples() {
    let r = ring(2, 1, 1, 3);
    let mu = FiniteMeasure::counting(&set(&r, 3, &[0, 1, 4])).unwrap();
    let c = mu.conditional(r.zero(1)).unwrap();
    assert_eq!(c.weights(), &[rat(1, 1), rat(0, 1)]);
    let uni = FiniteMeasure::uniform(Carrier::ring(&r, 3)).unwrap();
    for x in r.elements(2) {
        assert_eq!(uni.conditional(x).unwrap().weights(), &[rat(1, 2), rat(1, 2)]);
    }
    assert_eq!(mu.conditional(r.decode(2, 2).unwrap()), Err(Error::NullFiber));
}

#[test]
fn conditional_of_regular_set_is_uniform() {
    let r = ring(3, 1, 1, 3);
    let a = RingSet::from_indices(&r, 3, [0, 1, 9, 10, 18, 19]).unwrap();
    let prof = crate::sets::regularity_profile(&a).unwrap();
    assert_eq!(prof.m(), &[2, 1, 3]);
    let mu = FiniteMeasure::counting(&a).unwrap();
    for k in 0..3 {
        for x in a.project(k).unwrap().elements() {
            let c = mu.conditional(x).unwrap();
            let m = prof.m()[k as usize] as i128;
            assert_eq!(c.support().count() as i128, m);
            assert!(c.support().all(|i| c.weight(i) == rat(1, m)));
        }
    }
}

#[test]
fn convolution_examples() {
    let r = ring(2, 1, 1, 2);
    let c = Carrier::ring(&r, 2);
    let a = FiniteMeasure::counting(&set(&r, 2, &[0, 1])).unwrap();
    let conv = a.convolve(&a).unwrap();
    assert_eq!(conv.weights(), &[rat(1, 4), rat(1, 2), rat(1, 4), rat(0, 1)]);
    let delta = FiniteMeasure::point_mass(c.clone(), 0).unwrap();
    assert_eq!(delta.convolve(&conv).unwrap(), conv);
    assert_eq!(conv.dilate(r.zero(2)).unwrap(), delta);
    let shifted = a.translate(r.one(2)).unwrap();
    assert_eq!(shifted.weights(), &[rat(0, 1), rat(1, 2), rat(1, 2), rat(0, 1)]);
    let other = FiniteMeasure::uniform(Carrier::Plain(4)).unwrap();
    assert_eq!(a.convolve(&other), Err(Error::CarrierMismatch));
}

#[test]
fn entropy_examples() {
    let u = FiniteMeasure::uniform(Carrier::Plain(4)).unwrap();
    assert!((u.entropy() - 4f64.ln()).abs() < 1e-12);
    assert!((u.entropy() - 1.386294).abs() < 1e-6);
    assert_eq!(FiniteMeasure::point_mass(Carrier::Plain(3), 2).unwrap().entropy(), 0.0);
    let m = FiniteMeasure::new(Carrier::Plain(3), vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
    assert!((m.entropy() - 1.5 * 2f64.ln()).abs() < 1e-12);
    assert!((m.entropy() - 1.039721).abs() < 1e-6);
}

#[test]
fn chain_rule_and_refinement() {
    let r = ring(2, 1, 1, 3);
    let mu = FiniteMeasure::counting(&set(&r, 3, &[0, 1, 3, 6, 7])).unwrap();
    let fine = Partition::discrete(8);
    for k in 0..=3 {
        let coarse = Partition::level(&r, 3, k).unwrap();
        let chain = partition_entropy(&mu, &coarse).unwrap() + cond_entropy(&mu, &fine, &coarse).unwrap();
        assert!((chain - mu.entropy()).abs() < 1e-12);
    }
    let b1 = Partition::level(&r, 3, 1).unwrap();
    let b2 = Partition::level(&r, 3, 2).unwrap();
    assert_eq!(cond_entropy(&mu, &b1, &b2), Err(Error::NonRefining));
    assert!(cond_entropy(&mu, &b2, &b1).unwrap() >= 0.0);
}

#[test]
fn weights_must_sum_to_one() {
    assert!(FiniteMeasure::new(Carrier::Plain(2), vec![rat(1, 2), rat(1, 3)]).is_err());
    assert!(FiniteMeasure::new(Carrier::Plain(2), vec![rat(3, 2), rat(-1, 2)]).is_err());
}

#[test]
fn energy_examples() {
    let r = ring(5, 1, 1, 1);
    let x = set(&r, 1, &[0, 1]);
    assert_eq!(energy(&x, &x).unwrap(), 6);
    let f5 = ResidueField::new(5, 1).unwrap();
    let avg = avg_scalar_energy(&f5, &[0, 1], &[0, 1]).unwrap();
    assert_eq!(avg.empirical, rat(5, 16));
    assert_eq!(avg.closed_form, rat(5, 16));
    let all: Vec<u32> = (0..5).collect();
    let avg = avg_scalar_energy(&f5, &all, &[0, 2, 3]).unwrap();
    assert_eq!(avg.empirical, avg.closed_form);
    assert!(avg.empirical <= avg_energy_bound(5, 3, 5));
    assert_eq!(avg.empirical, rat(1, 5));
}

#[test]
fn energy_equals_l2_norm_of_convolution() {
    let r = ring(3, 1, 1, 2);
    let x = set(&r, 2, &[0, 1, 4, 7]);
    let y = set(&r, 2, &[2, 3, 8]);
    let cx = FiniteMeasure::counting(&x).unwrap();
    let cy = FiniteMeasure::counting(&y).unwrap();
    let norm = cx.convolve(&cy).unwrap().l2_norm_sq();
    assert_eq!(norm * rat(16 * 9, 1), rat(energy(&x, &y).unwrap() as i128, 1));
}

#[test]
fn decomposition_matches_direct_conditional() {
    for (p, f, e, n) in [(2, 1, 1, 3), (3, 1, 1, 2), (2, 2, 1, 2)] {
        let r = ring(p, f, e, n);
        let a = RingSet::from_indices(&r, n, (0..r.order(n)).filter(|i| i % 3 != 1)).unwrap();
        let b = RingSet::from_indices(&r, n, (0..r.order(n)).filter(|i| i % 2 == 0)).unwrap();
        let mu = FiniteMeasure::counting(&a).unwrap();
        let nu = FiniteMeasure::counting(&b).unwrap();
        for alpha in r.field().units() {
            let conv = mu.convolve(&nu.dilate(r.teichmuller(alpha).unwrap()).unwrap()).unwrap();
            for k in 0..n {
                for x in conv.project(k).unwrap().support() {
                    let xe = r.decode(k, x as u64).unwrap();
                    let direct = conv.conditional(xe).unwrap();
                    let mix = convolution_conditional_mixture(&mu, &nu, alpha, xe, cocycle).unwrap();
                    assert_eq!(direct, mix);
                }
                let fine = Partition::level(&r, n, k + 1).unwrap();
                let coarse = Partition::level(&r, n, k).unwrap();
                let lhs = cond_entropy(&conv, &fine, &coarse).unwrap();
                let rhs = fiber_average_entropy(&mu, &nu, alpha, k).unwrap();
                assert!(lhs >= rhs - 1e-9);
            }
        }
    }
}
