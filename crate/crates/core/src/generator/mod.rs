//! Ring-tower topology, design parameters and their expansion into solver inputs.

mod expand;
mod params;
mod ring;
mod sample;

pub use expand::{expand_params, ring_frequency, MappingConfig};
pub use params::{DesignParams, ParamName, PARAM_COUNT, SCHEMA_VERSION};
pub use ring::TopologySpec;
pub use sample::{parse_override, sample_params, sample_seed, Overrides, ParamOverride};
