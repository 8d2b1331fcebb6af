//! Constructive procedures from the sum-product arguments: scalar-sum bounds,
//! bounded-generation certificates and their reduction, subfield closure,
//! e₀ detection, tail extraction, large-set covering, propagation, and the
//! end-to-end segment pipeline.

mod bg;
mod closure;
mod pipeline;
mod propagate;
mod scalar_sum;

pub use bg::{
    additive_closure_check, bg_cover_set, bg_search, bg_search_with, congruence_ball, reduce_or_inject,
    verify_certificate, BGCertificate, ClosureCheck, CollisionWitness, InjectivityCertificate, ReduceOutcome,
};
pub use closure::{
    e0_detect, field_closure_oracle, field_gen_set, is_subfield, large_set_cover, subfield_closure, tail_extract,
    E0Report, LargeSetReport, SubfieldClosure, TailExtract,
};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineReport};
pub use propagate::{bg_propagate, PropagationReport, WitnessStatus};
pub use scalar_sum::{empirical_scalar_sum, scalar_sum_bound};
