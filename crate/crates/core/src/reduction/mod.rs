//! Reduction of the Airy connection to a diagonal canonical form.

pub mod canonical;
pub mod connection;
pub mod equivalence;

pub mod series_matrix;

pub use canonical::{
    bv_reduce, replay, CanonicalModel, CanonicalRepr, GaugeStep, GaugeStepRepr, ReduceOptions, Reduction, ReductionRepr,
};
pub use connection::{
    companion_connection, explicit_second_stage, gauge, shear, spectral_reduce_step, standard_triple,
    StepNormalization,
};

pub use equivalence::{formal_equivalence, EquivalenceReport, Verdict};
pub use series_matrix::SeriesMatrix;
