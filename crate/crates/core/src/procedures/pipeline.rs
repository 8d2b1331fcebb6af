use crate::error::Result;
use crate::exec::Exec;
use crate::rational::{rat, Rational};
use crate::sets::{gen_set_with, regularize, segment_search, Budget, RingSet, SegmentWitness};

use super::bg::{bg_search_with, reduce_or_inject, BGCertificate, ReduceOutcome};
use super::closure::{e0_detect, tail_extract};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub eps: Rational,
    pub delta0: Rational,
    pub c1: u32,
    pub max_k: u32,
    pub max_c: u32,
    /// Largest C tried for the final segment search in ⟨A⟩_C.
    pub segment_max_c: u32,
    pub op_budget: u128,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            eps: rat(1, 2),
            delta0: rat(1, 2),
            c1: 1,
            max_k: 2,
            max_c: 3,
            segment_max_c: 4,
            op_budget: crate::sets::DEFAULT_OP_BUDGET,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub regular_size: usize,
    pub profile: Vec<u64>,
    pub n_bar: u32,
    pub tail_level: u32,
    pub tail_size: usize,
    pub size_bounds_hold: bool,
    pub e0: Option<u32>,
    pub certificate: Option<BGCertificate>,
    /// Certificates produced by successive reductions.
    pub reductions: Vec<BGCertificate>,
    pub injective: bool,
    pub segment: Option<SegmentWitness>,
    pub segment_c: Option<u32>,
    /// Stages that stopped early, with the reason.
    pub notes: Vec<String>,
}

/// regularize → tail_extract → e0_detect → bg_search / reduce_or_inject on
/// the tail set, then a segment search in ⟨A⟩_C for increasing C.
pub fn run_pipeline(a: &RingSet, cfg: &PipelineConfig) -> Result<PipelineReport> {
    let exec = Exec::default();
    let mut budget = Budget::new(cfg.op_budget);
    let mut notes = Vec::new();
    let (reg, profile) = regularize(a)?;
    let tail = tail_extract(&reg, &cfg.eps)?;

    let e0 = match e0_detect(&tail.b, cfg.c1, &mut budget) {
        Ok(r) => Some(r.e0),
        Err(e) => {
            notes.push(format!("e0_detect: {e}"));
            None
        }
    };

    let mut reductions = Vec::new();
    let mut injective = false;
    let certificate = match bg_search_with(exec, &tail.b, &cfg.eps, cfg.max_k, cfg.max_c, &mut budget) {
        Ok(c) => c,
        Err(e) => {
            notes.push(format!("bg_search: {e}"));
            None
        }
    };
    if certificate.is_none() && notes.iter().all(|n| !n.starts_with("bg_search")) {
        notes.push("bg_search: no certificate within k and C limits".into());
    }
    let mut current = certificate.clone();
    while let Some(cert) = current.take() {
        match reduce_or_inject(&tail.b, &cert, &cfg.delta0, &mut budget) {
            Ok(ReduceOutcome::Injective(_)) => injective = true,
            Ok(ReduceOutcome::Reduction { certificate, .. }) => {
                if certificate.verified && certificate.k() < cert.k() {
                    current = Some(certificate.clone());
                } else {
                    notes.push("reduce_or_inject: reduced certificate failed verification".into());
                }
                reductions.push(certificate);
            }
            Err(e) => notes.push(format!("reduce_or_inject: {e}")),
        }
    }

    let mut segment = None;
    let mut segment_c = None;
    for c in 1..=cfg.segment_max_c {
        let g = gen_set_with(exec, a, c, &mut budget)?;
        if let Some(w) = segment_search(&g, 1)? {
            segment = Some(w);
            segment_c = Some(c);
            break;
        }
    }

    Ok(PipelineReport {
        regular_size: reg.len(),
        profile: profile.m().to_vec(),
        n_bar: tail.n_bar,
        tail_level: tail.m,
        tail_size: tail.b.len(),
        size_bounds_hold: tail.size_bounds_hold,
        e0,
        certificate,
        reductions,
        injective,
        segment,
        segment_c,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;
    use crate::sets::verify_segment;

    #[test]
    fn pipeline_on_small_sets() {
        let r = Ring::from_parts(2, 1, 1, 6).unwrap();
        let a = RingSet::from_ints(&r, 6, [0, 1, 2, 3, 5, 8, 13, 21, 34]).unwrap();
        let rep = run_pipeline(&a, &PipelineConfig::default()).unwrap();
        let w = rep.segment.unwrap();
        assert!(w.length() >= 1);
        let g = gen_set_with(Exec::default(), &a, rep.segment_c.unwrap(), &mut Budget::default()).unwrap();
        assert!(verify_segment(&g, &w).unwrap());
        assert_eq!(rep.profile.len(), 6);
    }

    #[test]
    fn pipeline_on_singleton() {
        let r = Ring::from_parts(3, 1, 1, 3).unwrap();
        let a = RingSet::from_ints(&r, 3, [4]).unwrap();
        let rep = run_pipeline(&a, &PipelineConfig::default()).unwrap();
        assert!(rep.segment.is_none());
        assert!(rep.e0.is_none());
    }
}
