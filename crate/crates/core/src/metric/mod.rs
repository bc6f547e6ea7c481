//! The projective metric `delta` on P^1, Mobius actions, and discrete
//! energies of finite point sets over R/C and Q_p.

mod energy;
mod point;

pub use energy::{
    delta, discrepancy, discrepancy_pairwise, discrete_potential, mc_energy_estimate,
    neg_log_delta, padic_delta_exponent, sample_batch, Discrepancy, LogMultiple, PointSampler,
    PointSet, STREAM_CHUNK,
};
pub use point::{FieldContext, MobiusMap, ProjectivePoint};
