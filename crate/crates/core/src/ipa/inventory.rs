use std::collections::HashMap;
use std::sync::OnceLock;

use super::tokenize::normalize_symbol;
use super::{
    consonant_distance, vowel_distance, ConsonantFeatures, IpaError, Phoneme, PhonemeKind,
    VowelFeatures,
};

/// First line of every inventory file.
pub const INVENTORY_HEADER: &str = "lexsim-inventory 1";

const BUNDLED: &str = include_str!("../../data/phonemes.tsv");

const MIN_CONSONANT_DISTANCE: f64 = 1.0;
const MIN_VOWEL_DISTANCE: f64 = 0.25;
const MAX_VOWEL_DISTANCE: f64 = 23.0 / 3.0;
const EPS: f64 = 1e-9;

/// Immutable set of phonemes keyed by IPA symbol.
#[derive(Debug, Clone)]
pub struct PhonemeInventory {
    entries: Vec<Phoneme>,
    index: HashMap<String, usize>,
    longest_symbol: usize,
    consonants: usize,
    vowels: usize,
}

/// Extremes of the pairwise phoneme distances within an inventory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InventoryStats {
    pub consonants: usize,
    pub vowels: usize,
    pub min_consonant_distance: f64,
    pub max_consonant_distance: f64,
    pub min_vowel_distance: f64,
    pub max_vowel_distance: f64,
}

impl PhonemeInventory {
    /// The inventory shipped with the crate (`data/phonemes.tsv`).
    pub fn bundled() -> &'static PhonemeInventory {
        static INVENTORY: OnceLock<PhonemeInventory> = OnceLock::new();
        INVENTORY.get_or_init(|| {
            PhonemeInventory::parse(BUNDLED).expect("bundled phoneme inventory is valid")
        })
    }

    /// Parses the line-oriented inventory format.
    ///
    /// ```text
    /// lexsim-inventory 1
    /// p   C  0    4         0  0  0  0      # symbol kind zone airflow voiced lateral sibilant coarticulated
    /// i   V  -5/3 1         0  0  0         # symbol kind zone openness rounded long nasal
    /// ```
    ///
    /// Fields are whitespace separated, `#` starts a comment and numbers may
    /// be written as fractions.
    pub fn parse(text: &str) -> Result<Self, IpaError> {
        let mut lines = text.lines().enumerate();
        let header = lines
            .by_ref()
            .map(|(i, l)| (i, strip_comment(l)))
            .find(|(_, l)| !l.is_empty());
        match header {
            Some((_, l)) if l.split_whitespace().eq(INVENTORY_HEADER.split_whitespace()) => {}
            Some((i, l)) => {
                return Err(IpaError::Parse {
                    line: i + 1,
                    message: format!("expected header {INVENTORY_HEADER:?}, found {l:?}"),
                })
            }
            None => return Err(IpaError::EmptyInventory),
        }

        let mut phonemes = Vec::new();
        for (i, raw) in lines {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| IpaError::Parse {
                line: i + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let symbol = normalize_symbol(fields[0]);
            let kind = fields.get(1).copied().unwrap_or("");
            let numbers = fields[2..]
                .iter()
                .map(|f| parse_number(f).ok_or_else(|| parse_err(format!("bad number {f:?}"))))
                .collect::<Result<Vec<f64>, _>>();
            let phoneme = match kind {
                "C" => {
                    let v = numbers?;
                    if v.len() != 6 {
                        return Err(parse_err(format!(
                            "consonant {symbol:?} needs 6 features, found {}",
                            v.len()
                        )));
                    }
                    Phoneme::consonant(
                        symbol,
                        ConsonantFeatures {
                            zone: v[0],
                            airflow: parse_airflow(v[1])
                                .ok_or_else(|| parse_err(format!("bad airflow {}", v[1])))?,
                            voiced: parse_flag(v[2]).ok_or_else(|| parse_err("voiced".into()))?,
                            lateral: parse_flag(v[3]).ok_or_else(|| parse_err("lateral".into()))?,
                            sibilant: parse_flag(v[4])
                                .ok_or_else(|| parse_err("sibilant".into()))?,
                            coarticulated: parse_flag(v[5])
                                .ok_or_else(|| parse_err("coarticulated".into()))?,
                        },
                    )
                }
                "V" => {
                    let v = numbers?;
                    if v.len() != 5 {
                        return Err(parse_err(format!(
                            "vowel {symbol:?} needs 5 features, found {}",
                            v.len()
                        )));
                    }
                    Phoneme::vowel(
                        symbol,
                        VowelFeatures {
                            zone: v[0],
                            openness: v[1],
                            rounded: parse_flag(v[2]).ok_or_else(|| parse_err("rounded".into()))?,
                            long: parse_flag(v[3]).ok_or_else(|| parse_err("long".into()))?,
                            nasal: parse_flag(v[4]).ok_or_else(|| parse_err("nasal".into()))?,
                        },
                    )
                }
                other => return Err(parse_err(format!("kind must be C or V, found {other:?}"))),
            };
            phonemes.push(phoneme);
        }
        Self::from_phonemes(phonemes)
    }

    /// Validates and indexes a list of phonemes.
    ///
    /// Besides per-feature ranges this checks that distinct consonants are
    /// at least 1 apart and distinct vowels at least 0.25 apart (unless
    /// their features coincide, which marks an alias such as `g`/`ɡ`).
    pub fn from_phonemes(phonemes: Vec<Phoneme>) -> Result<Self, IpaError> {
        if phonemes.is_empty() {
            return Err(IpaError::EmptyInventory);
        }
        let mut index = HashMap::with_capacity(phonemes.len());
        for (i, p) in phonemes.iter().enumerate() {
            p.validate()?;
            if index.insert(p.symbol.clone(), i).is_some() {
                return Err(IpaError::DuplicateSymbol(p.symbol.clone()));
            }
        }

        let mut offending = Vec::new();
        for (i, x) in phonemes.iter().enumerate() {
            for y in &phonemes[i + 1..] {
                if x.kind() != y.kind() {
                    continue;
                }
                let (d, floor) = match x.kind() {
                    PhonemeKind::Consonant => (consonant_distance(x, y)?, MIN_CONSONANT_DISTANCE),
                    PhonemeKind::Vowel => (vowel_distance(x, y)?, MIN_VOWEL_DISTANCE),
                };
                if d > EPS && d < floor - EPS {
                    offending.push(format!("{}/{} = {d}", x.symbol, y.symbol));
                }
                if x.kind() == PhonemeKind::Vowel && d > MAX_VOWEL_DISTANCE + EPS {
                    offending.push(format!("{}/{} = {d}", x.symbol, y.symbol));
                }
            }
        }
        if !offending.is_empty() {
            return Err(IpaError::DistanceInvariant(offending.join(", ")));
        }

        let consonants = phonemes.iter().filter(|p| p.is_consonant()).count();
        Ok(PhonemeInventory {
            longest_symbol: phonemes
                .iter()
                .map(|p| p.symbol.chars().count())
                .max()
                .unwrap_or(0),
            vowels: phonemes.len() - consonants,
            consonants,
            entries: phonemes,
            index,
        })
    }

    pub fn get(&self, symbol: &str) -> Option<&Phoneme> {
        self.index.get(symbol).map(|&i| &self.entries[i])
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.index.contains_key(symbol)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn consonant_count(&self) -> usize {
        self.consonants
    }

    pub fn vowel_count(&self) -> usize {
        self.vowels
    }

    /// Phonemes in file order.
    pub fn phonemes(&self) -> &[Phoneme] {
        &self.entries
    }

    pub fn consonants(&self) -> impl Iterator<Item = &Phoneme> {
        self.entries.iter().filter(|p| p.is_consonant())
    }

    pub fn vowels(&self) -> impl Iterator<Item = &Phoneme> {
        self.entries.iter().filter(|p| p.is_vowel())
    }

    pub(crate) fn longest_symbol(&self) -> usize {
        self.longest_symbol
    }

    /// Minimum nonzero and maximum pairwise distances per kind. Kinds with
    /// fewer than two phonemes report NaN.
    pub fn stats(&self) -> InventoryStats {
        let extremes = |items: Vec<&Phoneme>| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for (i, x) in items.iter().enumerate() {
                for y in &items[i + 1..] {
                    let d = match x.kind() {
                        PhonemeKind::Consonant => consonant_distance(x, y),
                        PhonemeKind::Vowel => vowel_distance(x, y),
                    }
                    .expect("same kind");
                    if d > EPS {
                        lo = lo.min(d);
                    }
                    hi = hi.max(d);
                }
            }
            if hi.is_finite() {
                (lo, hi)
            } else {
                (f64::NAN, f64::NAN)
            }
        };
        let (min_c, max_c) = extremes(self.consonants().collect());
        let (min_v, max_v) = extremes(self.vowels().collect());
        InventoryStats {
            consonants: self.consonants,
            vowels: self.vowels,
            min_consonant_distance: min_c,
            max_consonant_distance: max_c,
            min_vowel_distance: min_v,
            max_vowel_distance: max_v,
        }
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_number(text: &str) -> Option<f64> {
    match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.parse().ok()?;
            let den: f64 = den.parse().ok()?;
            (den != 0.0).then(|| num / den)
        }
        None => text.parse().ok(),
    }
}

fn parse_flag(value: f64) -> Option<bool> {
    if value == 0.0 {
        Some(false)
    } else if value == 1.0 {
        Some(true)
    } else {
        None
    }
}

fn parse_airflow(value: f64) -> Option<u8> {
    (value.fract() == 0.0 && (0.0..=9.0).contains(&value)).then_some(value as u8)
}
