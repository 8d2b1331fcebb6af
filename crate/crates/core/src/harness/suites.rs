//! Randomised invariant suites, one per library layer.

use std::str::FromStr;
use std::sync::Arc;

use rand::seq::index;
use rand::Rng;
use serde_json::{json, Value};

use crate::density::{cover_hypotheses_hold, large_interval_cover, mann_check, ProfileStats};
use crate::digits::{child_carry_consistent, cocycle, section, section_defect, CocycleFn};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Exec};
use crate::measures::{
    avg_scalar_energy, cond_entropy, convolution_conditional_mixture, fiber_average_entropy, partition_entropy,
    Carrier, FiniteMeasure, Partition,
};
use crate::procedures::{
    additive_closure_check, bg_search_with, e0_detect, empirical_scalar_sum, field_closure_oracle, is_subfield,
    reduce_or_inject, scalar_sum_bound, subfield_closure, verify_certificate, ReduceOutcome,
};
use crate::rational::{format_rational, rat, to_f64, Rational};
use crate::ring::{ResidueField, Ring, RingParams};
use crate::sets::{
    combine, gen_set_with, j_set, j_set_graded, regularity_profile, regularize, regularize_loss_bound, Budget, SetOp,
};

use super::report::Report;
use super::sample::*;
use super::setfile::witness_value;
use super::trial_rng;

/// Tolerance for floating-point entropy comparisons.
pub const ENTROPY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Ring,
    Digits,
    Sets,
    Measures,
    Density,
    Procedures,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Ring, Suite::Digits, Suite::Sets, Suite::Measures, Suite::Density, Suite::Procedures];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ring => "ring",
            Suite::Digits => "digits",
            Suite::Sets => "sets",
            Suite::Measures => "measures",
            Suite::Density => "density",
            Suite::Procedures => "procedures",
            Suite::All => "all",
        }
    }

    /// Rings sampled when no ring is fixed by the configuration.
    fn default_rings(self) -> &'static [(u64, u32, u32, u32)] {
        match self {
            Suite::Ring => {
                &[(2, 1, 1, 6), (3, 1, 1, 4), (2, 2, 1, 3), (2, 1, 2, 4), (3, 2, 1, 2), (5, 1, 1, 3), (2, 1, 3, 5)]
            }
            Suite::Digits => &[(2, 1, 1, 4), (3, 1, 1, 3), (2, 2, 1, 2), (2, 1, 2, 4), (3, 1, 2, 3), (5, 1, 1, 2)],
            Suite::Sets => &[(2, 1, 1, 8), (3, 1, 1, 5), (2, 2, 1, 4), (2, 1, 2, 6), (5, 1, 1, 3)],
            Suite::Measures => &[(2, 1, 1, 3), (3, 1, 1, 3), (2, 2, 1, 2), (2, 1, 2, 4)],
            Suite::Procedures => &[(2, 1, 1, 4), (3, 1, 1, 3), (5, 1, 1, 2), (2, 2, 1, 2), (2, 1, 2, 4)],
            Suite::Density | Suite::All => &[],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ring" => Suite::Ring,
            "digits" => Suite::Digits,
            "sets" => Suite::Sets,
            "measures" => Suite::Measures,
            "density" => Suite::Density,
            "procedures" => Suite::Procedures,
            "all" => Suite::All,
            _ => return Err(Error::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

#[derive(Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: u64,
    pub ring: Option<RingParams>,
    /// Pair-operation cap per trial.
    pub cap: u128,
    pub exec: Exec,
    /// The carry used by the digit and measure checks; replaceable for negative controls.
    pub cocycle: CocycleFn,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0, trials: 100, ring: None, cap: 1 << 32, exec: Exec::default(), cocycle }
    }
}

/// A deliberately wrong carry, shifted by one, for negative-control runs.
pub fn off_by_one_cocycle(ring: &Ring, alpha: u32, x1: crate::RingElem, x2: crate::RingElem) -> Result<u32> {
    let s = cocycle(ring, alpha, x1, x2)?;
    Ok(ring.field().add(s, 1))
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Report> {
    let mut report = Report::new(&format!("suite {}", suite.name()));
    report.param("seed", cfg.seed).param("trials", cfg.trials).param("cap", cfg.cap.to_string());
    if let Some(p) = cfg.ring {
        report.param("ring", p);
    }
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    for s in suites {
        let rings: Vec<Arc<Ring>> = match cfg.ring {
            Some(p) => vec![Ring::new(p)?],
            None => {
                s.default_rings().iter().map(|&(p, f, e, n)| Ring::from_parts(p, f, e, n)).collect::<Result<_>>()?
            }
        };
        let trials = map_indexed(cfg.exec, cfg.trials as usize, |t| run_trial(s, cfg, &rings, t as u64));
        let mut passed = 0u64;
        for r in trials {
            if r.failures() == 0 {
                passed += 1;
            }
            report.absorb(r);
        }
        report.record(json!({"suite": s.name(), "trials": cfg.trials, "clean_trials": passed}));
    }
    Ok(report)
}

fn run_trial(suite: Suite, cfg: &SuiteConfig, rings: &[Arc<Ring>], t: u64) -> Report {
    let mut rep = Report::new(suite.name());
    let mut rng = trial_rng(cfg.seed, t);
    let mut budget = Budget::new(cfg.cap);
    let ctx = Ctx { seed: cfg.seed, trial: t, suite: suite.name() };
    let out = match suite {
        Suite::Ring => ring_trial(&mut rep, &mut rng, rings, &ctx),
        Suite::Digits => digits_trial(&mut rep, &mut rng, rings, &ctx, cfg.cocycle),
        Suite::Sets => sets_trial(&mut rep, &mut rng, rings, &ctx, &mut budget),
        Suite::Measures => measures_trial(&mut rep, &mut rng, rings, &ctx, cfg.cocycle),
        Suite::Density => density_trial(&mut rep, &mut rng, &ctx),
        Suite::Procedures => procedures_trial(&mut rep, &mut rng, rings, &ctx, &mut budget),
        Suite::All => unreachable!("expanded by run_suite"),
    };
    match out {
        Ok(()) => {}
        Err(e @ Error::CapExceeded { .. }) => rep.cap(ctx.tag(json!({"error": e.to_string()}))),
        Err(e) => rep.check("no_unexpected_error", false, || ctx.tag(json!({"error": e.to_string()}))),
    }
    rep
}

struct Ctx {
    seed: u64,
    trial: u64,
    suite: &'static str,
}

impl Ctx {
    fn tag(&self, detail: Value) -> Value {
        json!({"suite": self.suite, "seed": self.seed, "trial": self.trial, "detail": detail})
    }
}

fn ring_trial<R: Rng>(rep: &mut Report, rng: &mut R, rings: &[Arc<Ring>], ctx: &Ctx) -> Result<()> {
    let ring = pick_ring(rng, rings);
    let n = ring.level();
    let size = ring.order(n);
    let a = ring.decode(n, rng.gen_range(0..size))?;
    let b = ring.decode(n, rng.gen_range(0..size))?;
    let params = ring.params();
    let w = |extra: Value| ctx.tag(json!({"ring": params, "a": a.index(), "b": b.index(), "extra": extra}));

    rep.check("digit_round_trip", ring.from_digits(&ring.digits(a))? == a, || w(json!(null)));

    let q = ring.q() as u32;
    let (al, be) = (rng.gen_range(0..q), rng.gen_range(0..q));
    let prod = ring.teichmuller(ring.field().mul(al, be))?;
    let split = ring.mul(ring.teichmuller(al)?, ring.teichmuller(be)?)?;
    rep.check("teichmuller_multiplicative", prod == split, || w(json!({"alpha": al, "beta": be})));

    let k = rng.gen_range(0..=n);
    rep.check("projection_is_truncation", ring.project(a, k)?.index() == a.index() % ring.order(k), || {
        w(json!({"k": k}))
    });

    let (va, vb, vs) = (ring.val(a), ring.val(b), ring.val(ring.add(a, b)?));
    let ok = vs >= va.min(vb) && (va == vb || vs == va.min(vb));
    rep.check("valuation_ultrametric", ok, || w(json!({"val": [va, vb, vs]})));

    let k = rng.gen_range(0..=n);
    let shell = (0..size).filter(|&i| ring.val_idx(n, i) >= k).count() as u64;
    rep.check("valuation_ball_count", shell == ring.order(n - k), || w(json!({"k": k, "count": shell})));
    Ok(())
}

/// Whether σ satisfies the defining membership, and how many σ do.
fn carry_solutions(
    ring: &Ring,
    alpha: u32,
    x1: crate::RingElem,
    x2: crate::RingElem,
    sigma: u32,
) -> Result<(bool, usize)> {
    let k = x1.level();
    let up = k + 1;
    let sum = ring.add(x1, ring.mul(ring.teichmuller_at(alpha, k)?, x2)?)?;
    let defect = ring.sub(
        ring.sub(section(ring, sum, up)?, section(ring, x1, up)?)?,
        ring.mul(ring.teichmuller_at(alpha, up)?, section(ring, x2, up)?)?,
    )?;
    let pk = ring.pow(ring.uniformizer(up).unwrap_or_else(|_| ring.zero(up)), k as u64);
    let works = |s: u32| -> Result<bool> {
        let term = ring.mul(ring.teichmuller_at(s, up)?, pk)?;
        Ok(ring.add(defect, term)? == ring.zero(up))
    };
    let count = ring.field().elements().map(works).collect::<Result<Vec<_>>>()?.into_iter().filter(|&b| b).count();
    Ok((works(sigma)?, count))
}

fn digits_trial<R: Rng>(rep: &mut Report, rng: &mut R, rings: &[Arc<Ring>], ctx: &Ctx, carry: CocycleFn) -> Result<()> {
    let ring = pick_ring(rng, rings);
    let n = ring.level();
    let q = ring.q() as u32;
    let k = rng.gen_range(0..n);
    let x1 = ring.decode(k, rng.gen_range(0..ring.order(k)))?;
    let x2 = ring.decode(k, rng.gen_range(0..ring.order(k)))?;
    let alpha = rng.gen_range(1..q);
    let (a1, a2) = (rng.gen_range(0..q), rng.gen_range(0..q));
    let params = ring.params();
    let w = || {
        ctx.tag(json!({"ring": params, "k": k, "x1": x1.index(), "x2": x2.index(), "alpha": alpha, "a1": a1, "a2": a2}))
    };

    let sigma = carry(&ring, alpha, x1, x2)?;
    let (ok, count) = carry_solutions(&ring, alpha, x1, x2, sigma)?;
    rep.check("cocycle_membership", ok, w);
    rep.check("cocycle_unique", count == 1, w);
    rep.check("child_carry_consistent", child_carry_consistent(&ring, carry, alpha, x1, x2, a1, a2)?, w);

    if params.e == 1 && n >= 2 && params.p <= 5 {
        let digits: Vec<u32> = (0..q).map(|_| rng.gen_range(0..q)).collect();
        let defect = section_defect(&ring, &digits)?;
        rep.check("section_has_defect", defect.is_some(), || ctx.tag(json!({"ring": params, "section": digits})));
    } else {
        rep.skip("section_has_defect");
    }
    Ok(())
}

fn sets_trial<R: Rng>(
    rep: &mut Report,
    rng: &mut R,
    rings: &[Arc<Ring>],
    ctx: &Ctx,
    budget: &mut Budget,
) -> Result<()> {
    let ring = pick_ring(rng, rings);
    let n = ring.level();
    let x1 = random_set(rng, &ring, n, 12)?;
    let x2 = random_set(rng, &ring, n, 12)?;
    let w = |extra: Value| ctx.tag(json!({"x1": witness_value(&x1), "x2": witness_value(&x2), "extra": extra}));

    let j1 = j_set(&x1);
    let j2 = j_set(&x2);
    let jp = j_set(&combine(SetOp::Prod, &x1, &x2)?);
    let bad = j1.iter().flat_map(|&a| j2.iter().map(move |&b| a + b)).find(|&s| s < n && !jp.contains(&s));
    rep.check("j_additive_under_products", bad.is_none(), || w(json!({"missing": bad})));

    let units: Vec<u64> = (0..ring.order(n)).filter(|&i| ring.val_idx(n, i) == 0).collect();
    let lambda = ring.decode(n, units[rng.gen_range(0..units.len())])?;
    rep.check("j_unit_invariant", j_set(&x1.dilate(lambda)?) == j1, || w(json!({"lambda": lambda.index()})));
    rep.check("j_matches_graded", j_set_graded(&x1)? == j1, || w(json!(null)));

    let a = random_set_with_unit(rng, &ring, n, 5)?;
    let c = rng.gen_range(1..=3);
    let small = gen_set_with(Exec::Sequential, &a, c, budget)?;
    let large = gen_set_with(Exec::Sequential, &a, c + 1, budget)?;
    rep.check("gen_set_monotone", small.is_subset(&large), || ctx.tag(json!({"set": witness_value(&a), "C": c})));

    let (reg, profile) = regularize(&x1)?;
    let bound = regularize_loss_bound(ring.q(), n);
    let ok = reg.is_subset(&x1)
        && regularity_profile(&reg).as_ref() == Some(&profile)
        && (reg.len() as u128) * bound >= x1.len() as u128;
    rep.check("regularize_guarantee", ok, || w(json!({"kept": reg.len()})));

    let r = random_regular_set(rng, &ring, n)?;
    let prof = regularity_profile(&r).ok_or_else(|| Error::Internal("sampled set is not regular".into()))?;
    let ok = (0..=n).all(|k| r.project(k).map(|p| p.len() as u128 == prof.prefix_product(k as usize)).unwrap_or(false));
    rep.check("regular_projection_sizes", ok, || ctx.tag(json!({"set": witness_value(&r)})));
    Ok(())
}

fn measures_trial<R: Rng>(
    rep: &mut Report,
    rng: &mut R,
    rings: &[Arc<Ring>],
    ctx: &Ctx,
    carry: CocycleFn,
) -> Result<()> {
    let ring = pick_ring(rng, rings);
    let n = ring.level();
    let carrier = Carrier::ring(&ring, n);
    let mu = random_measure(rng, carrier.clone())?;
    let nu = random_measure(rng, carrier.clone())?;
    let mw = |m: &FiniteMeasure| m.weights().iter().map(format_rational).collect::<Vec<_>>();
    let params = ring.params();

    let k = rng.gen_range(0..=n);
    let coarse = Partition::level(&ring, n, k)?;
    let fine = Partition::discrete(carrier.size());
    let chain = partition_entropy(&mu, &coarse)? + cond_entropy(&mu, &fine, &coarse)?;
    rep.check("entropy_chain_rule", (mu.entropy() - chain).abs() <= ENTROPY_TOL, || {
        ctx.tag(json!({"ring": params, "k": k, "mu": mw(&mu)}))
    });

    let c = Rational::new(rng.gen_range(0..=10), 10);
    let mix = FiniteMeasure::mixture(&[(c, mu.clone()), (Rational::from_integer(1) - c, nu.clone())])?;
    let lower = to_f64(&c) * mu.entropy() + to_f64(&(Rational::from_integer(1) - c)) * nu.entropy();
    rep.check("entropy_concave", mix.entropy() >= lower - ENTROPY_TOL, || {
        ctx.tag(json!({"ring": params, "c": format_rational(&c), "mu": mw(&mu), "nu": mw(&nu)}))
    });
    let support = mu.support().count() as f64;
    rep.check("entropy_support_bound", mu.entropy() <= support.ln() + ENTROPY_TOL, || ctx.tag(json!({"mu": mw(&mu)})));
    rep.check("entropy_collision_bound", mu.entropy() >= -to_f64(&mu.l2_norm_sq()).ln() - ENTROPY_TOL, || {
        ctx.tag(json!({"mu": mw(&mu)}))
    });

    // conditional convolution of two regular counting measures
    let a = random_regular_set(rng, &ring, n)?;
    let b = random_regular_set(rng, &ring, n)?;
    let pa = FiniteMeasure::counting(&a)?;
    let pb = FiniteMeasure::counting(&b)?;
    let alpha = rng.gen_range(1..ring.q() as u32);
    let conv = pa.convolve(&pb.dilate(ring.teichmuller_at(alpha, n)?)?)?;
    let k = rng.gen_range(0..n);
    let proj = conv.project(k)?;
    let supp: Vec<usize> = proj.support().collect();
    let x = ring.decode(k, supp[rng.gen_range(0..supp.len())] as u64)?;
    let lhs = conv.conditional(x)?;
    let rhs = convolution_conditional_mixture(&pa, &pb, alpha, x, carry)?;
    let w = || ctx.tag(json!({"a": witness_value(&a), "b": witness_value(&b), "alpha": alpha, "k": k, "x": x.index()}));
    rep.check("conditional_convolution_decomposition", lhs == rhs, w);

    let h = cond_entropy(&conv, &Partition::level(&ring, n, k + 1)?, &Partition::level(&ring, n, k)?)?;
    let avg = fiber_average_entropy(&pa, &pb, alpha, k)?;
    rep.check("conditional_entropy_lower_bound", h >= avg - ENTROPY_TOL, w);

    let field = ring.field();
    let q = field.order() as usize;
    let (na, nb) = (rng.gen_range(1..=q), rng.gen_range(1..=q));
    let sa: Vec<u32> = index::sample(rng, q, na).into_iter().map(|i| i as u32).collect();
    let sb: Vec<u32> = index::sample(rng, q, nb).into_iter().map(|i| i as u32).collect();
    let e = avg_scalar_energy(field, &sa, &sb)?;
    rep.check("averaged_energy_identity", e.empirical == e.closed_form, || {
        ctx.tag(json!({"q": q, "a": sa, "b": sb, "empirical": format_rational(&e.empirical)}))
    });
    Ok(())
}

fn density_trial<R: Rng>(rep: &mut Report, rng: &mut R, ctx: &Ctx) -> Result<()> {
    let x = random_tail_set(rng, 24);
    let y = random_tail_set(rng, 24);
    let m = mann_check(&x, &y)?;
    rep.check("mann_inequality", m.holds, || {
        ctx.tag(json!({"x": format!("{x:?}"), "y": format!("{y:?}"), "witness": m.witness}))
    });

    let n = rng.gen_range(1..=64usize);
    let p = rng.gen_range(0.1..0.9);
    let t: Vec<usize> = (0..n).filter(|_| rng.gen_bool(p)).collect();
    let stats = ProfileStats::from_sets(n, &t, &t)?;
    let mut bad = None;
    'outer: for k1 in 0..n {
        for k2 in 0..n - k1 {
            if stats.d_t(k1 + k2) > stats.d_t(k1) + stats.d_t(k2) {
                bad = Some((k1, k2));
                break 'outer;
            }
        }
    }
    rep.check("d_t_subadditive", bad.is_none(), || ctx.tag(json!({"n": n, "t": t, "pair": bad})));
    let agree = (0..n).all(|k| stats.d_t(k) == stats.d_t_shifted(k));
    rep.check("d_t_formulas_agree", agree, || ctx.tag(json!({"n": n, "t": t})));

    let q = [2u64, 3, 4, 5, 7, 8, 9][rng.gen_range(0..7)];
    let len = rng.gen_range(2..=24);
    let lo = if rng.gen_bool(0.7) { 2.min(q) } else { 1 };
    let profile = crate::sets::GradedProfile::new((0..len).map(|_| rng.gen_range(lo..=q)).collect(), q)?;
    let eps = random_unit_rational(rng, 6);
    let delta = random_unit_rational(rng, 6);
    if cover_hypotheses_hold(&profile, &eps, &delta) {
        let cover = large_interval_cover(&crate::density::profile_stats(&profile), &eps, &delta)?;
        rep.check("large_interval_cover", cover.covered, || {
            ctx.tag(json!({"profile": profile.m(), "q": q, "eps": format_rational(&eps), "delta": format_rational(&delta), "gap": cover.first_gap}))
        });
    } else {
        rep.skip("large_interval_cover");
    }
    Ok(())
}

fn procedures_trial<R: Rng>(
    rep: &mut Report,
    rng: &mut R,
    rings: &[Arc<Ring>],
    ctx: &Ctx,
    budget: &mut Budget,
) -> Result<()> {
    let ring = pick_ring(rng, rings);
    let n = ring.level();

    let a = random_regular_set(rng, &ring, n)?;
    let b = random_regular_set(rng, &ring, n)?;
    let (pa, pb) = (regularity_profile(&a).expect("regular"), regularity_profile(&b).expect("regular"));
    let bound = scalar_sum_bound(&pa, &pb)?;
    let (best, omega) = empirical_scalar_sum(&a, &b)?;
    rep.check("scalar_sum_lower_bound", Rational::from_integer(best as i128) >= bound, || {
        ctx.tag(json!({"a": witness_value(&a), "b": witness_value(&b), "max": best, "omega": omega, "bound": format_rational(&bound)}))
    });

    let (fp, ff) = [(2u64, 2u32), (2, 3), (3, 2), (2, 4)][rng.gen_range(0..4)];
    let field = ResidueField::new(fp, ff)?;
    let bset = random_field_subset(rng, field.order() as u32);
    let closure = subfield_closure(&field, &bset)?;
    let ok = is_subfield(&field, &closure.elements) && closure.elements == field_closure_oracle(&field, &bset)?;
    rep.check("subfield_closure_matches_oracle", ok, || ctx.tag(json!({"p": fp, "f": ff, "b": bset})));

    let a = random_set_with_unit(rng, &ring, n, 4)?;
    let eps = [rat(0, 1), rat(1, 4), rat(1, 2)][rng.gen_range(0..3)];
    let delta0 = [rat(1, 4), rat(1, 2), rat(3, 4)][rng.gen_range(0..3)];
    let w = |extra: Value| {
        ctx.tag(json!({"set": witness_value(&a), "eps": format_rational(&eps), "delta0": format_rational(&delta0), "extra": extra}))
    };
    let Some(found) = bg_search_with(Exec::Sequential, &a, &eps, 1, 2, budget)? else {
        rep.skip("reduction_reverified");
        rep.skip("injectivity_implies_closure");
        return e0_check(rep, rng, &ring, ctx, budget);
    };
    // a padded certificate with one more scalar still covers, since 0 ∈ ⟨A⟩_C
    let mut padded = found.clone();
    padded.scalars.push(rng.gen_range(1..ring.q() as u32));
    for cert in [found, padded] {
        match reduce_or_inject(&a, &cert, &delta0, budget)? {
            ReduceOutcome::Reduction { certificate, .. } => {
                let ok = certificate.verified && verify_certificate(&a, &certificate, budget)?;
                rep.check("reduction_reverified", ok, || w(json!({"from": cert, "certificate": certificate})));
            }
            ReduceOutcome::Injective(_) => {
                if delta0 > eps && crate::rational::floor_mul(&delta0, n) >= 1 {
                    let closed = additive_closure_check(&a, cert.c, &eps, &delta0)?;
                    rep.check("injectivity_implies_closure", closed.closed, || {
                        w(json!({"certificate": cert, "pair": closed.witness}))
                    });
                } else {
                    rep.skip("injectivity_implies_closure");
                }
            }
        }
    }
    e0_check(rep, rng, &ring, ctx, budget)
}

fn e0_check<R: Rng>(rep: &mut Report, rng: &mut R, ring: &Arc<Ring>, ctx: &Ctx, budget: &mut Budget) -> Result<()> {
    let n = ring.level();
    let c1 = rng.gen_range(1..=3);
    let params = ring.params();
    if 2 * c1 as u64 >= params.p && n > params.e {
        let a = random_set(rng, ring, n, 5)?;
        let out = e0_detect(&a, c1, budget);
        let ok = match &out {
            Ok(r) => r.e0 <= params.e,
            Err(Error::Precondition(_)) => true,
            Err(_) => false,
        };
        rep.check("e0_at_most_e", ok, || {
            ctx.tag(json!({"set": witness_value(&a), "C1": c1, "outcome": format!("{out:?}")}))
        });
    } else {
        rep.skip("e0_at_most_e");
    }
    Ok(())
}
