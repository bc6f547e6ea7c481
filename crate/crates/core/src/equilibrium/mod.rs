//! Minimal-energy measures on P^1(R) and P^1(Q_p).

pub mod quadrature;
mod padic;
mod real;

pub use padic::{
    ball_mass_padic, minimal_energy_padic, minimal_energy_padic_series, sphere_mass_padic,
    PadicEquilibrium, DEFAULT_SAMPLE_PRECISION,
};
pub use real::{
    density_real, minimal_energy_real, minimal_energy_real_series, potential_real, real_mass,
    zeta3, RealEquilibrium, DEFAULT_QUAD_TOL, DEFAULT_TABLE_SIZE,
};

use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::metric::{FieldContext, PointSampler, ProjectivePoint};

/// Either equilibrium sampler behind one type.
#[derive(Clone, Debug)]
pub enum EquilibriumSampler {
    Real(RealEquilibrium),
    Padic(PadicEquilibrium),
}

impl EquilibriumSampler {
    pub fn for_context(ctx: FieldContext) -> Result<Self> {
        Ok(match ctx {
            FieldContext::Archimedean => EquilibriumSampler::Real(RealEquilibrium::new()?),
            FieldContext::Padic { prime, precision } => {
                EquilibriumSampler::Padic(PadicEquilibrium::new(prime, precision)?)
            }
        })
    }

    /// The minimal energy of the measure being sampled.
    pub fn minimal_energy(&self) -> Result<f64> {
        match self {
            EquilibriumSampler::Real(_) => Ok(minimal_energy_real()),
            EquilibriumSampler::Padic(s) => minimal_energy_padic(s.prime()),
        }
    }
}

impl PointSampler for EquilibriumSampler {
    fn context(&self) -> FieldContext {
        match self {
            EquilibriumSampler::Real(s) => s.context(),
            EquilibriumSampler::Padic(s) => s.context(),
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<ProjectivePoint> {
        match self {
            EquilibriumSampler::Real(s) => s.sample(rng),
            EquilibriumSampler::Padic(s) => s.sample(rng),
        }
    }
}
