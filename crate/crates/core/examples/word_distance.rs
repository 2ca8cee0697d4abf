//! Tokenizes a few transcriptions and compares them with the weighted
//! edit distance.
//!
//! ```text
//! cargo run --example word_distance -- ɹɛd ʁœð koːχ
//! ```

use lexsim::distance::{substring_distances, word_distance, EditWeights};
use lexsim::ipa::{tokenize, PhonemeInventory};

fn main() {
    let mut words: Vec<String> = std::env::args().skip(1).collect();
    if words.is_empty() {
        words = ["ɹɛd", "ʁœð", "koːχ", "rɔt"].map(String::from).to_vec();
    }
    let inv = PhonemeInventory::bundled();
    let w = EditWeights::default();

    let parsed: Vec<_> = words
        .iter()
        .map(|s| match tokenize(s, inv) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("{s}: {e}");
                std::process::exit(1);
            }
        })
        .collect();
    for t in &parsed {
        let symbols: Vec<&str> = t.phonemes().iter().map(|p| p.symbol()).collect();
        println!("{:<8} -> {}", t.source(), symbols.join(" "));
    }
    println!();
    for (i, p) in parsed.iter().enumerate() {
        for q in &parsed[i + 1..] {
            let (dc, dv) = substring_distances(p, q, &w).unwrap();
            let d = word_distance(p, q, &w).unwrap();
            println!(
                "{} ~ {}: consonants {dc:.3}, vowels {dv:.3}, combined {d:.3}",
                p.source(),
                q.source()
            );
        }
    }
}
