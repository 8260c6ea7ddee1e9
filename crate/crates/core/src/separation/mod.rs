//! SRG separation tests: is `SRG(H1)^-1` disjoint from `-tau SRG(H2)` for all
//! `tau` in `(0, 1]`, frequency by frequency?

mod methods;
mod sweep;

pub use methods::{separate, separate_disk, separate_hull, separate_naive, Method, SeparationQuery, SeparationResult, TauSweep};
pub use sweep::{
    check_hypotheses, reduce_verdict, sweep_feedback, ChordSide, FeedbackVerdict, FrequencyResult, FrequencyTester,
    Status, SweepConfig,
};
