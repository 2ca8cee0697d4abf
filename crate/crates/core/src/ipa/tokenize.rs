use super::{IpaError, Phoneme, PhonemeInventory};

const LENGTH_MARK: char = 'ː';
const COMBINING_TILDE: char = '\u{303}';

/// Ordered phonemes of one word, with its consonant and vowel substrings.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcription {
    source: String,
    phonemes: Vec<Phoneme>,
    consonants: Vec<Phoneme>,
    vowels: Vec<Phoneme>,
}

impl Transcription {
    pub fn from_phonemes(phonemes: Vec<Phoneme>) -> Self {
        let source = phonemes.iter().map(Phoneme::symbol).collect();
        Self::with_source(source, phonemes)
    }

    fn with_source(source: String, phonemes: Vec<Phoneme>) -> Self {
        let (vowels, consonants) = phonemes.iter().cloned().partition(Phoneme::is_vowel);
        Transcription {
            source,
            phonemes,
            consonants,
            vowels,
        }
    }

    /// The IPA string this transcription was read from.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn phonemes(&self) -> &[Phoneme] {
        &self.phonemes
    }

    /// Consonants in their original order.
    pub fn consonants(&self) -> &[Phoneme] {
        &self.consonants
    }

    /// Vowels in their original order.
    pub fn vowels(&self) -> &[Phoneme] {
        &self.vowels
    }

    pub fn len(&self) -> usize {
        self.phonemes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phonemes.is_empty()
    }

    /// Concatenation of the canonical phoneme symbols.
    pub fn render(&self) -> String {
        self.phonemes.iter().map(Phoneme::symbol).collect()
    }
}

struct Unit {
    ch: char,
    index: usize,
    byte: usize,
}

fn precomposed_nasal(ch: char) -> Option<char> {
    Some(match ch {
        'ã' => 'a',
        'ẽ' => 'e',
        'ĩ' => 'i',
        'õ' => 'o',
        'ũ' => 'u',
        'ỹ' => 'y',
        _ => return None,
    })
}

fn is_discarded(ch: char) -> bool {
    matches!(ch, 'ˈ' | 'ˌ' | '.' | '\u{361}' | '\u{35c}') || ch.is_whitespace()
}

fn normalize(ipa: &str) -> Vec<Unit> {
    let mut units: Vec<Unit> = Vec::with_capacity(ipa.len());
    for (index, (byte, ch)) in ipa.char_indices().enumerate() {
        if is_discarded(ch) {
            continue;
        }
        let unit = |ch| Unit { ch, index, byte };
        if let Some(base) = precomposed_nasal(ch) {
            units.push(unit(base));
            units.push(unit(COMBINING_TILDE));
        } else if ch == ':' {
            units.push(unit(LENGTH_MARK));
        } else if ch == COMBINING_TILDE && units.last().is_some_and(|u| u.ch == LENGTH_MARK) {
            // nasal mark written after the length mark
            let at = units.len() - 1;
            units.insert(at, unit(COMBINING_TILDE));
        } else {
            units.push(unit(ch));
        }
    }
    units
}

/// Canonical spelling used for inventory keys.
pub(crate) fn normalize_symbol(symbol: &str) -> String {
    normalize(symbol).into_iter().map(|u| u.ch).collect()
}

/// Splits an IPA string into inventory phonemes by greedy longest match.
///
/// Stress marks, syllable dots, whitespace and tie bars are dropped; `:` is
/// read as `ː`; precomposed nasal vowels are decomposed. A length mark after
/// a consonant doubles it. Anything else that does not match is an error.
pub fn tokenize(ipa: &str, inv: &PhonemeInventory) -> Result<Transcription, IpaError> {
    let units = normalize(ipa);
    let mut phonemes: Vec<Phoneme> = Vec::new();
    let mut pos = 0;
    let mut key = String::new();
    while pos < units.len() {
        let longest = inv.longest_symbol().min(units.len() - pos);
        let mut matched = None;
        for len in (1..=longest).rev() {
            key.clear();
            key.extend(units[pos..pos + len].iter().map(|u| u.ch));
            if let Some(p) = inv.get(&key) {
                matched = Some((p, len));
                break;
            }
        }
        match matched {
            Some((p, len)) => {
                phonemes.push(p.clone());
                pos += len;
            }
            None if units[pos].ch == LENGTH_MARK
                && phonemes.last().is_some_and(Phoneme::is_consonant) =>
            {
                let geminate = phonemes.last().cloned().expect("checked");
                phonemes.push(geminate);
                pos += 1;
            }
            None => {
                let unit = &units[pos];
                let text = ipa[unit.byte..]
                    .chars()
                    .next()
                    .map(String::from)
                    .unwrap_or_default();
                return Err(IpaError::UnknownSymbol {
                    index: unit.index,
                    byte_offset: unit.byte,
                    text,
                });
            }
        }
    }
    Ok(Transcription::with_source(ipa.to_string(), phonemes))
}
