//! Walks the bundled phoneme inventory: counts, a few feature vectors and
//! the spread of pairwise distances.

use lexsim::ipa::{phoneme_distance, PhonemeInventory};

fn main() {
    let inv = PhonemeInventory::bundled();
    let stats = inv.stats();
    println!(
        "{} phonemes: {} consonants, {} vowels",
        inv.len(),
        stats.consonants,
        stats.vowels
    );
    println!(
        "consonant distances in [{:.3}, {:.3}], vowel distances in [{:.3}, {:.3}]",
        stats.min_consonant_distance,
        stats.max_consonant_distance,
        stats.min_vowel_distance,
        stats.max_vowel_distance
    );

    for symbol in ["p", "b", "ʁ", "i", "ɔ"] {
        let p = inv.get(symbol).expect("bundled symbol");
        println!("{symbol:>2}: {:?}", p.features());
    }

    for (x, y) in [("p", "b"), ("p", "k"), ("s", "ʃ"), ("i", "e"), ("i", "u")] {
        let d = phoneme_distance(inv.get(x).unwrap(), inv.get(y).unwrap()).unwrap();
        println!("d({x}, {y}) = {d:.3}");
    }
}
