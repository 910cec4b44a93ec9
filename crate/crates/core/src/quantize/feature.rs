use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lld::{FeatureFlag, UtteranceFeatureVector};

/// An utterance-level feature that can be quantized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Feature {
    F0Mean,
    F1Mean,
    F2Mean,
    SpectralFlux,
    SlopeV0_500,
    SlopeV500_1500,
}

impl Feature {
    pub const ALL: [Feature; 6] = [
        Feature::F0Mean,
        Feature::F1Mean,
        Feature::F2Mean,
        Feature::SpectralFlux,
        Feature::SlopeV0_500,
        Feature::SlopeV500_1500,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::F0Mean => "f0_mean",
            Feature::F1Mean => "f1_mean",
            Feature::F2Mean => "f2_mean",
            Feature::SpectralFlux => "spectral_flux",
            Feature::SlopeV0_500 => "slope_v0_500",
            Feature::SlopeV500_1500 => "slope_v500_1500",
        }
    }

    /// The openSMILE-style functional name.
    pub fn opensmile_name(self) -> &'static str {
        match self {
            Feature::F0Mean => "F0semitoneFrom27.5Hz_sma3nz_amean",
            Feature::F1Mean => "F1frequency_sma3nz_amean",
            Feature::F2Mean => "F2frequency_sma3nz_amean",
            Feature::SpectralFlux => "spectralFlux_sma3_amean",
            Feature::SlopeV0_500 => "slopeV0-500_sma3nz_amean",
            Feature::SlopeV500_1500 => "slopeV500-1500_sma3nz_amean",
        }
    }

    pub fn value(self, v: &UtteranceFeatureVector) -> f64 {
        match self {
            Feature::F0Mean => v.f0_mean_hz,
            Feature::F1Mean => v.f1_mean_hz,
            Feature::F2Mean => v.f2_mean_hz,
            Feature::SpectralFlux => v.spectral_flux_mean,
            Feature::SlopeV0_500 => v.slope_v0_500,
            Feature::SlopeV500_1500 => v.slope_v500_1500,
        }
    }

    /// True when the utterance carries no measurement of this feature, so
    /// its 0 is a placeholder rather than a value.
    pub fn is_missing(self, v: &UtteranceFeatureVector) -> bool {
        let has = |flag| v.flags.contains(&flag);
        match self {
            Feature::SpectralFlux => has(FeatureFlag::FluxAllZero),
            Feature::F1Mean | Feature::F2Mean => {
                has(FeatureFlag::AllUnvoiced) || has(FeatureFlag::NoFormants)
            }
            Feature::F0Mean | Feature::SlopeV0_500 | Feature::SlopeV500_1500 => {
                has(FeatureFlag::AllUnvoiced)
            }
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = Error;

    /// Accepts the short names, the openSMILE names, and the underscore-free
    /// spellings such as `F1frequencysma3nzamean`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let squash = |x: &str| {
            x.chars()
                .filter(|c| c.is_ascii_alphanumeric())
                .collect::<String>()
                .to_ascii_lowercase()
        };
        let wanted = squash(s);
        Feature::ALL
            .into_iter()
            .find(|f| {
                squash(f.name()) == wanted
                    || squash(f.opensmile_name()) == wanted
                    || (*f == Feature::SpectralFlux && wanted == "spectralfluxsma3nzamean")
            })
            .ok_or_else(|| Error::UnknownFeature(s.to_string()))
    }
}

impl TryFrom<String> for Feature {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Feature> for String {
    fn from(f: Feature) -> Self {
        f.name().to_string()
    }
}
