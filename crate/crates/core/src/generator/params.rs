use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version string of the parameter schema; written into every artifact.
pub const SCHEMA_VERSION: &str = "formspace-params/1";

pub const PARAM_COUNT: usize = 19;

macro_rules! design_params {
    ($( $variant:ident => $field:ident : $label:literal ),* $(,)?) => {
        /// The nineteen integer design parameters, in schema order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum ParamName {
            $($variant),*
        }

        impl ParamName {
            pub const ALL: [ParamName; PARAM_COUNT] = [$(ParamName::$variant),*];

            /// Name used in files, flags and the service.
            pub fn label(self) -> &'static str {
                match self {
                    $(ParamName::$variant => $label),*
                }
            }
        }

        impl FromStr for ParamName {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($label => Ok(ParamName::$variant),)*
                    other => Err(Error::Argument(format!("unknown parameter {other:?}"))),
                }
            }
        }

        #[derive(Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        struct ParamsRepr {
            $(#[serde(rename = $label)] $field: u8,)*
            seed: u64,
        }

        impl From<DesignParams> for ParamsRepr {
            fn from(p: DesignParams) -> Self {
                ParamsRepr {
                    $($field: p.get(ParamName::$variant),)*
                    seed: p.seed,
                }
            }
        }

        impl TryFrom<ParamsRepr> for DesignParams {
            type Error = Error;

            fn try_from(r: ParamsRepr) -> Result<Self> {
                let mut values = [0u8; PARAM_COUNT];
                $(values[ParamName::$variant as usize] = r.$field;)*
                DesignParams::new(values, r.seed)
            }
        }
    };
}

design_params! {
    HeightEnvelopeShift => a_a: "A_A",
    HeightEnvelopeAmplitude => b_a: "B_A",
    HeightEnvelopeFrequency => c_a: "C_A",
    BaseDrop => a_h: "A_H",
    DropRingFrequency => c_h: "C_H",
    DeviationPhaseShift => a_b: "A_B",
    DeviationPhaseAmplitude => b_b: "B_B",
    DeviationPhaseFrequency => c_b: "C_B",
    StartRadiusModulation => b_c: "B_C",
    StartRadiusFrequency => c_c: "C_C",
    DeviationShift => a_d: "A_D",
    DeviationAmplitude => b_d: "B_D",
    DeviationEnvelopeShift => e: "E",
    DeviationEnvelopeAmplitude => f: "F",
    DeviationEnvelopePhase => f_e: "F_E",
    DeviationEnvelopeFrequency => g: "G",
    DeviationRingFrequency => g_e: "G_E",
    Radius => r: "R",
    Load => l: "L",
}

impl Serialize for ParamName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for ParamName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One point of the design space: nineteen integers in `0..=100` plus the
/// seed that drew them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "ParamsRepr", try_from = "ParamsRepr")]
pub struct DesignParams {
    values: [u8; PARAM_COUNT],
    pub seed: u64,
}

impl DesignParams {
    pub const MAX: u8 = 100;

    pub fn new(values: [u8; PARAM_COUNT], seed: u64) -> Result<Self> {
        if let Some(i) = values.iter().position(|&v| v > Self::MAX) {
            return Err(Error::Argument(format!(
                "parameter {} = {} outside 0..=100",
                ParamName::ALL[i],
                values[i]
            )));
        }
        Ok(Self { values, seed })
    }

    /// Every parameter set to `v`.
    pub fn uniform(v: u8) -> Result<Self> {
        Self::new([v; PARAM_COUNT], 0)
    }

    pub fn get(&self, name: ParamName) -> u8 {
        self.values[name as usize]
    }

    pub fn set(&mut self, name: ParamName, v: u8) -> Result<()> {
        if v > Self::MAX {
            return Err(Error::Argument(format!("parameter {name} = {v} outside 0..=100")));
        }
        self.values[name as usize] = v;
        Ok(())
    }

    pub fn with(mut self, name: ParamName, v: u8) -> Result<Self> {
        self.set(name, v)?;
        Ok(self)
    }

    pub fn values(&self) -> &[u8; PARAM_COUNT] {
        &self.values
    }

    /// Unit-interval value `x / 100`.
    pub fn unit(&self, name: ParamName) -> f64 {
        f64::from(self.get(name)) / 100.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for p in ParamName::ALL {
            assert_eq!(p.label().parse::<ParamName>().unwrap(), p);
        }
        assert!("A_C".parse::<ParamName>().is_err());
    }

    #[test]
    fn serde_uses_labels_and_validates_range() {
        let p = DesignParams::uniform(7).unwrap().with(ParamName::DeviationRingFrequency, 12).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"G_E\":12"));
        assert_eq!(serde_json::from_str::<DesignParams>(&json).unwrap(), p);
        let bad = json.replace("\"G_E\":12", "\"G_E\":101");
        assert!(serde_json::from_str::<DesignParams>(&bad).is_err());
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(DesignParams::uniform(101).is_err());
        let mut p = DesignParams::uniform(0).unwrap();
        assert!(p.set(ParamName::Load, 200).is_err());
    }
}
