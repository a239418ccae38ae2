//! Strong maximal operator, rectangle averages, the Rubio de Francia iteration, and
//! separable singular integrals.

pub mod cz;
pub mod maximal;
pub mod rdf;
pub mod sliding;

pub use cz::{
    commutator, cz_apply, kernel_condition_check, AxisKernel, KernelConditionReport, SamplePlan, SeparableKernel,
};
pub use maximal::{rect_average_p, strong_maximal, MaximalVariant};
pub use rdf::{estimate_c, rubio_de_francia, rubio_de_francia_partials, CEstimate, RdfOutput};
