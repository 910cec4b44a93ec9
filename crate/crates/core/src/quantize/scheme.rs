use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lld::UtteranceFeatureVector;
use crate::quantize::combination::FeatureSource;
use crate::quantize::stats::CorpusStats;

pub const NUM_CLASSES: usize = 3;

/// One of the three quantization classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct ClassId(u8);

impl ClassId {
    pub const LOW: ClassId = ClassId(0);
    pub const MID: ClassId = ClassId(1);
    pub const HIGH: ClassId = ClassId(2);

    pub fn new(id: u8) -> Result<Self> {
        Self::try_from(id)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u8> for ClassId {
    type Error = Error;

    fn try_from(id: u8) -> Result<Self> {
        if (id as usize) < NUM_CLASSES {
            Ok(ClassId(id))
        } else {
            Err(Error::InvalidClass(id))
        }
    }
}

impl From<ClassId> for u8 {
    fn from(c: ClassId) -> u8 {
        c.0
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Two cut points. Class 0 is `(-inf, b1)`, class 1 `[b1, b2)`, class 2
/// `[b2, +inf)`; values outside the corpus range clamp into the end classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boundaries {
    b1: f64,
    b2: f64,
}

impl Boundaries {
    pub fn new(b1: f64, b2: f64) -> Result<Self> {
        if !(b1.is_finite() && b2.is_finite() && b1 < b2) {
            return Err(Error::InvalidBoundaries { b1, b2 });
        }
        Ok(Self { b1, b2 })
    }

    pub fn lower(&self) -> f64 {
        self.b1
    }

    pub fn upper(&self) -> f64 {
        self.b2
    }

    pub fn classify(&self, value: f64) -> Result<ClassId> {
        if !value.is_finite() {
            return Err(Error::NonFiniteValue(value));
        }
        Ok(if value < self.b1 {
            ClassId::LOW
        } else if value < self.b2 {
            ClassId::MID
        } else {
            ClassId::HIGH
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationScheme {
    pub name: String,
    pub source: FeatureSource,
    pub boundaries: Boundaries,
    pub class_semantics: [String; NUM_CLASSES],
}

impl QuantizationScheme {
    pub fn classify(&self, value: f64) -> Result<ClassId> {
        self.boundaries.classify(value)
    }

    /// Evaluates the source on `vector`, then classifies.
    pub fn classify_vector(&self, vector: &UtteranceFeatureVector) -> Result<(f64, ClassId)> {
        let value = self.source.evaluate(vector);
        Ok((value, self.classify(value)?))
    }

    pub fn semantics(&self, class: ClassId) -> &str {
        &self.class_semantics[class.index()]
    }
}

pub fn classify(value: f64, scheme: &QuantizationScheme) -> Result<ClassId> {
    scheme.classify(value)
}

pub fn build_scheme_from_boundaries(
    name: impl Into<String>,
    source: FeatureSource,
    b1: f64,
    b2: f64,
    semantics: [String; NUM_CLASSES],
) -> Result<QuantizationScheme> {
    Ok(QuantizationScheme {
        name: name.into(),
        source,
        boundaries: Boundaries::new(b1, b2)?,
        class_semantics: semantics,
    })
}

/// Cut points at the corpus quantiles `p1 < p2`.
pub fn build_scheme_from_quantiles(
    name: impl Into<String>,
    source: FeatureSource,
    stats: &CorpusStats,
    p1: f64,
    p2: f64,
    semantics: [String; NUM_CLASSES],
) -> Result<QuantizationScheme> {
    if !(p1 > 0.0 && p1 < p2 && p2 < 1.0) {
        return Err(Error::InvalidQuantiles { p1, p2 });
    }
    let (b1, b2) = (stats.quantile(p1), stats.quantile(p2));
    if b1 >= b2 {
        return Err(Error::DegenerateQuantiles { p1, p2, value: b1 });
    }
    build_scheme_from_boundaries(name, source, b1, b2, semantics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantize::feature::Feature;

    fn labels() -> [String; 3] {
        ["less warmth/cold".into(), "neutral".into(), "highest warmth".into()]
    }

    fn scheme(b1: f64, b2: f64) -> QuantizationScheme {
        build_scheme_from_boundaries("s", FeatureSource::Single(Feature::F1Mean), b1, b2, labels())
            .unwrap()
    }

    #[test]
    fn lower_inclusive_intervals() {
        let s = scheme(0.3, 0.44);
        let ids: Vec<u8> = [0.29, 0.3, 0.43999, 0.44, 0.45]
            .iter()
            .map(|&v| s.classify(v).unwrap().into())
            .collect();
        assert_eq!(ids, vec![0, 1, 1, 2, 2]);
    }

    #[test]
    fn out_of_range_values_clamp() {
        let s = scheme(515.5, 540.5);
        assert_eq!(s.classify(-1e9).unwrap(), ClassId::LOW);
        assert_eq!(s.classify(1e9).unwrap(), ClassId::HIGH);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            build_scheme_from_boundaries("s", FeatureSource::Single(Feature::F1Mean), 1.0, 1.0, labels()),
            Err(Error::InvalidBoundaries { .. })
        ));
        assert!(matches!(scheme(0.0, 1.0).classify(f64::NAN), Err(Error::NonFiniteValue(_))));
        assert!(ClassId::new(3).is_err());
    }

    #[test]
    fn quantile_scheme() {
        let stats = CorpusStats::from_values("x", (1..=100).map(f64::from).collect()).unwrap();
        let s = build_scheme_from_quantiles(
            "q",
            FeatureSource::Single(Feature::F1Mean),
            &stats,
            1.0 / 3.0,
            2.0 / 3.0,
            labels(),
        )
        .unwrap();
        assert!((s.boundaries.lower() - 34.0).abs() < 1e-9);
        assert!((s.boundaries.upper() - 67.0).abs() < 1e-9);

        let flat = CorpusStats::from_values("x", vec![4.0; 10]).unwrap();
        assert!(matches!(
            build_scheme_from_quantiles("q", FeatureSource::Single(Feature::F1Mean), &flat, 0.3, 0.6, labels()),
            Err(Error::DegenerateQuantiles { .. })
        ));
        assert!(matches!(
            build_scheme_from_quantiles("q", FeatureSource::Single(Feature::F1Mean), &stats, 0.6, 0.3, labels()),
            Err(Error::InvalidQuantiles { .. })
        ));
    }
}
