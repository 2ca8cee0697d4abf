//! Phoneme inventory, IPA tokenization and feature-based phoneme distances.
//!
//! Consonants carry six coordinates (articulation zone, airflow, voicing,
//! lateral, sibilant, coarticulated) and vowels five (zone, openness,
//! roundness, length, nasality). Distances are L1 over those coordinates.

mod inventory;
mod tokenize;

pub use inventory::{InventoryStats, PhonemeInventory, INVENTORY_HEADER};
pub use tokenize::{tokenize, Transcription};

use std::fmt;

use thiserror::Error;

/// Airflow coordinates allowed for consonants.
pub const AIRFLOW_VALUES: [u8; 7] = [0, 4, 5, 6, 7, 8, 9];

pub const AIRFLOW_NASAL: u8 = 0;
pub const AIRFLOW_PLOSIVE: u8 = 4;
pub const AIRFLOW_AFFRICATE: u8 = 5;
pub const AIRFLOW_FRICATIVE: u8 = 6;
pub const AIRFLOW_APPROXIMANT: u8 = 7;
pub const AIRFLOW_TAP: u8 = 8;
pub const AIRFLOW_TRILL: u8 = 9;

const VOWEL_ZONE_MIN: f64 = -5.0 / 3.0;
const VOWEL_ZONE_MAX: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IpaError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("inventory is empty")]
    EmptyInventory,
    #[error("duplicate phoneme symbol {0:?}")]
    DuplicateSymbol(String),
    #[error("phoneme {symbol:?}: {message}")]
    FeatureOutOfRange { symbol: String, message: String },
    #[error("inventory distance invariant violated: {0}")]
    DistanceInvariant(String),
    #[error("unknown symbol {text:?} at index {index} (byte offset {byte_offset})")]
    UnknownSymbol {
        index: usize,
        byte_offset: usize,
        text: String,
    },
    #[error("cannot compare {left:?} ({left_kind}) with {right:?} ({right_kind})")]
    KindMismatch {
        left: String,
        left_kind: PhonemeKind,
        right: String,
        right_kind: PhonemeKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhonemeKind {
    Consonant,
    Vowel,
}

impl fmt::Display for PhonemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhonemeKind::Consonant => f.write_str("consonant"),
            PhonemeKind::Vowel => f.write_str("vowel"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsonantFeatures {
    /// 0 bilabial .. 11 glottal; coarticulated consonants sit at the mean of two zones.
    pub zone: f64,
    pub airflow: u8,
    pub voiced: bool,
    pub lateral: bool,
    pub sibilant: bool,
    pub coarticulated: bool,
}

impl ConsonantFeatures {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=11.0).contains(&self.zone) {
            return Err(format!("zone {} outside [0, 11]", self.zone));
        }
        let doubled = self.zone * 2.0;
        if (doubled - doubled.round()).abs() > 1e-12 {
            return Err(format!(
                "zone {} is not an integer or half-integer",
                self.zone
            ));
        }
        let half_integer = (self.zone - self.zone.round()).abs() > 1e-12;
        if half_integer && !self.coarticulated {
            return Err(format!(
                "half-integer zone {} requires the coarticulated flag",
                self.zone
            ));
        }
        if !AIRFLOW_VALUES.contains(&self.airflow) {
            return Err(format!(
                "airflow {} not one of {AIRFLOW_VALUES:?}",
                self.airflow
            ));
        }
        Ok(())
    }

    fn coordinates(&self) -> [f64; 6] {
        [
            self.zone,
            f64::from(self.airflow),
            flag(self.voiced),
            flag(self.lateral),
            flag(self.sibilant),
            flag(self.coarticulated),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VowelFeatures {
    /// Horizontal position in the vowel trapezoid, front edge negative, back edge 1.
    pub zone: f64,
    /// Open -1, mid 0, close 1.
    pub openness: f64,
    pub rounded: bool,
    pub long: bool,
    pub nasal: bool,
}

impl VowelFeatures {
    pub fn validate(&self) -> Result<(), String> {
        if !(VOWEL_ZONE_MIN - 1e-12..=VOWEL_ZONE_MAX + 1e-12).contains(&self.zone) {
            return Err(format!("zone {} outside [-5/3, 1]", self.zone));
        }
        if !(-1.0..=1.0).contains(&self.openness) {
            return Err(format!("openness {} outside [-1, 1]", self.openness));
        }
        Ok(())
    }

    fn coordinates(&self) -> [f64; 5] {
        [
            self.zone,
            self.openness,
            flag(self.rounded),
            flag(self.long),
            flag(self.nasal),
        ]
    }
}

fn flag(value: bool) -> f64 {
    if value {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Features {
    Consonant(ConsonantFeatures),
    Vowel(VowelFeatures),
}

/// One IPA segment together with its feature coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Phoneme {
    symbol: String,
    features: Features,
}

impl Phoneme {
    pub fn consonant(symbol: impl Into<String>, features: ConsonantFeatures) -> Self {
        Phoneme {
            symbol: symbol.into(),
            features: Features::Consonant(features),
        }
    }

    pub fn vowel(symbol: impl Into<String>, features: VowelFeatures) -> Self {
        Phoneme {
            symbol: symbol.into(),
            features: Features::Vowel(features),
        }
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn features(&self) -> &Features {
        &self.features
    }

    pub fn kind(&self) -> PhonemeKind {
        match self.features {
            Features::Consonant(_) => PhonemeKind::Consonant,
            Features::Vowel(_) => PhonemeKind::Vowel,
        }
    }

    pub fn is_vowel(&self) -> bool {
        self.kind() == PhonemeKind::Vowel
    }

    pub fn is_consonant(&self) -> bool {
        self.kind() == PhonemeKind::Consonant
    }

    fn validate(&self) -> Result<(), IpaError> {
        if self.symbol.is_empty() {
            return Err(IpaError::FeatureOutOfRange {
                symbol: String::new(),
                message: "empty symbol".into(),
            });
        }
        let checked = match &self.features {
            Features::Consonant(c) => c.validate(),
            Features::Vowel(v) => v.validate(),
        };
        checked.map_err(|message| IpaError::FeatureOutOfRange {
            symbol: self.symbol.clone(),
            message,
        })
    }
}

fn kind_mismatch(x: &Phoneme, y: &Phoneme) -> IpaError {
    IpaError::KindMismatch {
        left: x.symbol.clone(),
        left_kind: x.kind(),
        right: y.symbol.clone(),
        right_kind: y.kind(),
    }
}

fn l1<const N: usize>(a: [f64; N], b: [f64; N]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum()
}

/// L1 distance over the six consonant coordinates.
pub fn consonant_distance(x: &Phoneme, y: &Phoneme) -> Result<f64, IpaError> {
    match (&x.features, &y.features) {
        (Features::Consonant(a), Features::Consonant(b)) => {
            Ok(l1(a.coordinates(), b.coordinates()))
        }
        _ => Err(kind_mismatch(x, y)),
    }
}

/// L1 distance over the five vowel coordinates.
pub fn vowel_distance(x: &Phoneme, y: &Phoneme) -> Result<f64, IpaError> {
    match (&x.features, &y.features) {
        (Features::Vowel(a), Features::Vowel(b)) => Ok(l1(a.coordinates(), b.coordinates())),
        _ => Err(kind_mismatch(x, y)),
    }
}

/// Distance of two same-kind phonemes.
pub fn phoneme_distance(x: &Phoneme, y: &Phoneme) -> Result<f64, IpaError> {
    match x.kind() {
        PhonemeKind::Consonant => consonant_distance(x, y),
        PhonemeKind::Vowel => vowel_distance(x, y),
    }
}

/// Cost of substituting `y` for `x`: the phoneme distance scaled by
/// `a_con` or `a_vow` depending on the kind.
pub fn substitution_weight(
    x: &Phoneme,
    y: &Phoneme,
    a_con: f64,
    a_vow: f64,
) -> Result<f64, IpaError> {
    match x.kind() {
        PhonemeKind::Consonant => Ok(a_con * consonant_distance(x, y)?),
        PhonemeKind::Vowel => Ok(a_vow * vowel_distance(x, y)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundled() -> &'static PhonemeInventory {
        PhonemeInventory::bundled()
    }

    fn ph(symbol: &str) -> &'static Phoneme {
        bundled().get(symbol).unwrap()
    }

    #[test]
    fn consonant_distance_examples() {
        assert_eq!(consonant_distance(ph("p"), ph("p")).unwrap(), 0.0);
        assert_eq!(consonant_distance(ph("p"), ph("b")).unwrap(), 1.0);
        assert_eq!(consonant_distance(ph("t"), ph("s")).unwrap(), 3.0);
    }

    #[test]
    fn vowel_distance_examples() {
        assert_eq!(vowel_distance(ph("i"), ph("i")).unwrap(), 0.0);
        assert_eq!(vowel_distance(ph("i"), ph("y")).unwrap(), 1.0);
        assert_eq!(vowel_distance(ph("a"), ph("a\u{303}")).unwrap(), 1.0);
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        assert!(matches!(
            consonant_distance(ph("p"), ph("a")),
            Err(IpaError::KindMismatch { .. })
        ));
        assert!(vowel_distance(ph("p"), ph("a")).is_err());
        assert!(substitution_weight(ph("a"), ph("p"), 0.3, 0.3).is_err());
    }

    #[test]
    fn substitution_weight_examples() {
        let w = substitution_weight(ph("p"), ph("b"), 0.3, 0.3).unwrap();
        assert!((w - 0.3).abs() < 1e-15);
        assert_eq!(
            substitution_weight(ph("k"), ph("k"), 0.3, 0.3).unwrap(),
            0.0
        );
        // close front unrounded vs long nasal open back rounded: the widest vowel pair
        let w = substitution_weight(ph("i"), ph("ɒ\u{303}ː"), 0.3, 0.3).unwrap();
        assert!((w - 2.3).abs() < 1e-12, "{w}");
    }

    #[test]
    fn consonant_feature_validation() {
        let mut f = ConsonantFeatures {
            zone: 4.5,
            airflow: AIRFLOW_APPROXIMANT,
            voiced: true,
            lateral: false,
            sibilant: false,
            coarticulated: false,
        };
        assert!(f.validate().is_err());
        f.coarticulated = true;
        assert!(f.validate().is_ok());
        f.airflow = 3;
        assert!(f.validate().is_err());
        f.airflow = AIRFLOW_TRILL;
        f.zone = 12.0;
        assert!(f.validate().is_err());
    }

    #[test]
    fn vowel_feature_validation() {
        let mut v = VowelFeatures {
            zone: -5.0 / 3.0,
            openness: 1.0,
            rounded: false,
            long: false,
            nasal: false,
        };
        assert!(v.validate().is_ok());
        v.zone = -1.7;
        assert!(v.validate().is_err());
        v.zone = 0.0;
        v.openness = 1.5;
        assert!(v.validate().is_err());
    }
}
