use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::params::{DesignParams, ParamName};
use super::ring::TopologySpec;
use crate::cem::CemInputs;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::vector::Vec3;

/// Physical ranges the unit-interval parameters are mapped onto.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MappingConfig {
    pub radius_min: f64,
    pub radius_span: f64,
    /// Largest relative modulation of the per-trail start radius.
    pub start_modulation: f64,
    pub load_min: f64,
    pub load_span: f64,
    /// Deviation shift spans `[-deviation_shift, +deviation_shift]`.
    pub deviation_shift: f64,
    pub deviation_amplitude: f64,
    pub drop_min: f64,
    pub drop_span: f64,
    /// Smallest allowed plane-to-plane drop; keeps planes strictly descending.
    pub drop_floor: f64,
    /// Largest across-layer frequency.
    pub layer_frequency_max: usize,
}

impl Default for MappingConfig {
    fn default() -> Self {
        Self {
            radius_min: 2.0,
            radius_span: 8.0,
            start_modulation: 0.5,
            load_min: 0.1,
            load_span: 1.9,
            deviation_shift: 10.0,
            deviation_amplitude: 5.0,
            drop_min: 0.2,
            drop_span: 1.8,
            drop_floor: 0.05,
            layer_frequency_max: 10,
        }
    }
}

/// Integer frequency `round(max * value / 100)` with ties rounded up.
pub fn ring_frequency(value: u8, max: usize) -> usize {
    (max * usize::from(value) + 50) / 100
}

/// Expands the nineteen parameters into the full set of solver inputs:
/// one force per ring member, one plane per non-start vertex, the start
/// positions on the (modulated) circle and the nodal load.
pub fn expand_params<T: Scalar>(
    p: &DesignParams,
    spec: &TopologySpec,
    cfg: &MappingConfig,
) -> Result<CemInputs<T>> {
    spec.check()?;
    use ParamName::*;
    let (n, m) = (spec.n_trails, spec.n_layers);
    let u = |name: ParamName| T::lit(p.unit(name));
    let c = T::lit;
    let tau = T::TAU();
    let pi = T::PI();
    let nf = T::from_usize_lossy(n);
    let mf = T::from_usize_lossy(m);
    let lmax = cfg.layer_frequency_max;
    let ring_phase = |f: usize, j: usize| tau * T::from_usize_lossy(f * j % n.max(1)) / nf;
    let layer_phase = |f: usize, d: usize| tau * T::from_usize_lossy(f) * T::from_usize_lossy(d) / mf;

    let radius = c(cfg.radius_min) + c(cfg.radius_span) * u(Radius);
    let amp_c = c(cfg.start_modulation) * u(StartRadiusModulation);
    let f_c = ring_frequency(p.get(StartRadiusFrequency), n);
    let start_positions = (0..n)
        .map(|j| {
            let rj = radius * (T::one() + amp_c * ring_phase(f_c, j).sin());
            let angle = tau * T::from_usize_lossy(j) / nf;
            (spec.vertex(0, j), Vec3::new(rj * angle.cos(), rj * angle.sin(), T::zero()))
        })
        .collect();

    let load = c(cfg.load_min) + c(cfg.load_span) * u(Load);

    let f_g = ring_frequency(p.get(DeviationEnvelopeFrequency), lmax);
    let f_b = ring_frequency(p.get(DeviationPhaseFrequency), lmax);
    let f_e = ring_frequency(p.get(DeviationRingFrequency), n);
    let shift = c(2.0 * cfg.deviation_shift) * u(DeviationShift) - c(cfg.deviation_shift);
    let amplitude = c(cfg.deviation_amplitude) * u(DeviationAmplitude);
    let mut deviation_forces = BTreeMap::new();
    for d in 0..m {
        let envelope = (c(2.0) * u(DeviationEnvelopeShift) - T::one())
            + u(DeviationEnvelopeAmplitude)
                * (layer_phase(f_g, d) + tau * u(DeviationEnvelopePhase)).sin();
        let phase = tau * u(DeviationPhaseShift)
            + pi * u(DeviationPhaseAmplitude) * layer_phase(f_b, d).sin();
        for j in 0..n {
            let force = shift + amplitude * envelope * (ring_phase(f_e, j) + phase).sin();
            deviation_forces.insert(spec.deviation_member(d, j), force);
        }
    }

    let f_a = ring_frequency(p.get(HeightEnvelopeFrequency), lmax);
    let f_h = ring_frequency(p.get(DropRingFrequency), n);
    let base_drop = c(cfg.drop_min) + c(cfg.drop_span) * u(BaseDrop);
    let mut plane_heights = BTreeMap::new();
    for j in 0..n {
        let mut z = T::zero();
        for d in 1..=m {
            let envelope = u(HeightEnvelopeShift) + u(HeightEnvelopeAmplitude) * layer_phase(f_a, d).sin();
            let drop = (base_drop * (T::one() + envelope * ring_phase(f_h, j).sin())).max(c(cfg.drop_floor));
            z = z - drop;
            plane_heights.insert(spec.vertex(d, j), z);
        }
    }

    Ok(CemInputs { deviation_forces, plane_heights, radius, load, start_positions })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> DesignParams {
        DesignParams::uniform(37).unwrap()
    }

    #[test]
    fn frequency_rounding() {
        assert_eq!(ring_frequency(0, 20), 0);
        assert_eq!(ring_frequency(100, 20), 20);
        assert_eq!(ring_frequency(12, 20), 2);
        assert_eq!(ring_frequency(13, 20), 3);
        assert_eq!(ring_frequency(5, 10), 1);
        assert_eq!(ring_frequency(4, 10), 0);
    }

    #[test]
    fn zero_amplitude_gives_constant_forces() {
        let p = base().with(ParamName::DeviationAmplitude, 0).unwrap().with(ParamName::DeviationShift, 80).unwrap();
        let inputs = expand_params::<f64>(&p, &TopologySpec::default(), &MappingConfig::default()).unwrap();
        for f in inputs.deviation_forces.values() {
            assert!((f - 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn raw_value_count() {
        let spec = TopologySpec::default();
        let inputs = expand_params::<f64>(&base(), &spec, &MappingConfig::default()).unwrap();
        assert_eq!(inputs.deviation_forces.len(), 400);
        // 400 plane heights plus 20 start planes fixed at z = 0
        assert_eq!(inputs.plane_heights.len() + inputs.start_positions.len(), 420);
        assert_eq!(inputs.deviation_forces.len() + 420 + 1, 821);
        assert!(inputs.start_positions.values().all(|p| p.z == 0.0));
    }

    #[test]
    fn planes_descend_along_every_trail() {
        let spec = TopologySpec::default();
        let mut p = base();
        p.set(ParamName::HeightEnvelopeShift, 100).unwrap();
        p.set(ParamName::HeightEnvelopeAmplitude, 100).unwrap();
        p.set(ParamName::DropRingFrequency, 30).unwrap();
        let inputs = expand_params::<f64>(&p, &spec, &MappingConfig::default()).unwrap();
        for j in 0..spec.n_trails {
            let mut prev = 0.0;
            for d in 1..=spec.n_layers {
                let z = inputs.plane_heights[&spec.vertex(d, j)];
                assert!(z <= prev - 0.05 + 1e-12);
                prev = z;
            }
        }
    }

    #[test]
    fn physical_ranges() {
        let spec = TopologySpec::default();
        let lo = expand_params::<f64>(&DesignParams::uniform(0).unwrap(), &spec, &MappingConfig::default()).unwrap();
        let hi = expand_params::<f64>(&DesignParams::uniform(100).unwrap(), &spec, &MappingConfig::default()).unwrap();
        assert_eq!((lo.radius, hi.radius), (2.0, 10.0));
        assert!((lo.load - 0.1).abs() < 1e-15 && (hi.load - 2.0).abs() < 1e-15);
    }
}
