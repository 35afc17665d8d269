use std::collections::BTreeMap;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::params::{DesignParams, ParamName, PARAM_COUNT};
use crate::error::{Error, Result};

/// Replacement for the uniform `0..=100` draw of one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamOverride {
    Fixed(u8),
    /// Inclusive subrange.
    Range(u8, u8),
}

impl ParamOverride {
    pub fn check(&self) -> Result<()> {
        match *self {
            ParamOverride::Fixed(v) if v > DesignParams::MAX => {
                Err(Error::Argument(format!("fixed value {v} outside 0..=100")))
            }
            ParamOverride::Range(lo, hi) if hi > DesignParams::MAX || lo > hi => {
                Err(Error::Argument(format!("range {lo}..{hi} is empty or outside 0..=100")))
            }
            _ => Ok(()),
        }
    }

    fn bounds(&self) -> (u8, u8) {
        match *self {
            ParamOverride::Fixed(v) => (v, v),
            ParamOverride::Range(lo, hi) => (lo, hi),
        }
    }
}

pub type Overrides = BTreeMap<ParamName, ParamOverride>;

/// Parses `NAME=V` or `NAME=LO..HI`.
impl FromStr for ParamOverride {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<u8>()
                .map_err(|_| Error::Argument(format!("bad override value {t:?}")))
        };
        let o = match s.split_once("..") {
            Some((lo, hi)) => ParamOverride::Range(num(lo)?, num(hi)?),
            None => ParamOverride::Fixed(num(s)?),
        };
        o.check()?;
        Ok(o)
    }
}

/// Parses a `NAME=V` / `NAME=LO..HI` override flag.
pub fn parse_override(s: &str) -> Result<(ParamName, ParamOverride)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| Error::Argument(format!("override {s:?} is not NAME=VALUE")))?;
    Ok((name.trim().parse()?, value.parse()?))
}

/// Seed of sample `index` in a corpus drawn with `corpus_seed`.
pub fn sample_seed(corpus_seed: u64, index: u64) -> u64 {
    corpus_seed ^ index
}

/// Draws one parameter vector. Each parameter has its own ChaCha8 stream,
/// so overriding one parameter never shifts the draws of the others.
pub fn sample_params(seed: u64, overrides: &Overrides) -> Result<DesignParams> {
    let mut values = [0u8; PARAM_COUNT];
    for (i, name) in ParamName::ALL.iter().enumerate() {
        let (lo, hi) = match overrides.get(name) {
            Some(o) => {
                o.check()?;
                o.bounds()
            }
            None => (0, DesignParams::MAX),
        };
        values[i] = if lo == hi {
            lo
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64 + 1);
            rng.gen_range(lo..=hi)
        };
    }
    DesignParams::new(values, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_override_holds() {
        let o = Overrides::from([(ParamName::DeviationPhaseShift, ParamOverride::Fixed(5))]);
        for s in 0..200 {
            assert_eq!(sample_params(s, &o).unwrap().get(ParamName::DeviationPhaseShift), 5);
        }
    }

    #[test]
    fn range_override_holds() {
        let o = Overrides::from([(ParamName::DeviationRingFrequency, ParamOverride::Range(8, 12))]);
        let mut seen = std::collections::BTreeSet::new();
        for s in 0..500 {
            let v = sample_params(s, &o).unwrap().get(ParamName::DeviationRingFrequency);
            assert!((8..=12).contains(&v));
            seen.insert(v);
        }
        assert_eq!(seen.len(), 5);
    }

    #[test]
    fn same_seed_same_params() {
        let a = sample_params(42, &Overrides::new()).unwrap();
        let b = sample_params(42, &Overrides::new()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_params(43, &Overrides::new()).unwrap());
    }

    #[test]
    fn override_leaves_other_streams_alone() {
        let free = sample_params(9, &Overrides::new()).unwrap();
        let o = Overrides::from([(ParamName::Radius, ParamOverride::Range(10, 20))]);
        let held = sample_params(9, &o).unwrap();
        for name in ParamName::ALL {
            if name != ParamName::Radius {
                assert_eq!(free.get(name), held.get(name));
            }
        }
    }

    #[test]
    fn draws_cover_the_full_range() {
        let mut lo = 100;
        let mut hi = 0;
        for s in 0..3000 {
            let v = sample_params(s, &Overrides::new()).unwrap().get(ParamName::Load);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert_eq!((lo, hi), (0, 100));
    }

    #[test]
    fn override_parsing() {
        assert_eq!(parse_override("A_B=5").unwrap(), (ParamName::DeviationPhaseShift, ParamOverride::Fixed(5)));
        assert_eq!(
            parse_override("G_E=8..12").unwrap(),
            (ParamName::DeviationRingFrequency, ParamOverride::Range(8, 12))
        );
        assert!(parse_override("G_E=12..8").is_err());
        assert!(parse_override("G_E=101").is_err());
        assert!(parse_override("Q=1").is_err());
        assert!(parse_override("G_E").is_err());
    }
}
