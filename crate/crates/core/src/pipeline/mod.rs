//! End-to-end runs: subdivide the moduli complex so that all forgetful
//! images are unions of cones, pull back, and check the hypotheses.

mod demo;
mod gamma;
mod report;

pub use demo::{dr_support, figure1_demo, figure1_type, support_cones, DrSupport, SupportCone};
pub use gamma::{
    build_gamma_subdivision, labeled_types, nu_check, product_types, pullback_map_complexes, run_pipeline, NuCheck,
    NuFailure, Run, RunOptions,
};
pub use report::{Check, InsertedRay, Report, ReportInputs, SubdivisionSummary, Witness, SCOPE};
