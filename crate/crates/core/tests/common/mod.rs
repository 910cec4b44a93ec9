#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use voicetraits::synth::{resonator_vowel, silence, Resonance};
use voicetraits::write_wav;

pub const SR: u32 = 22050;

pub struct SyntheticCorpus {
    pub metadata: PathBuf,
    pub audio_dir: PathBuf,
    pub voiced: usize,
}

/// `n` vowels with spread formants and pitch, plus one silent file and one
/// metadata row whose audio is missing.
pub fn write_corpus(dir: &Path, n: usize) -> SyntheticCorpus {
    let audio_dir = dir.join("wavs");
    fs::create_dir_all(&audio_dir).unwrap();
    let mut meta = String::new();
    for i in 0..n {
        let id = format!("LJ001-{i:04}");
        let t = i as f64 / n.max(2) as f64;
        let audio = resonator_vowel(
            110.0 + 150.0 * t,
            &[
                Resonance { freq_hz: 420.0 + 300.0 * t, bandwidth_hz: 80.0 },
                Resonance { freq_hz: 1900.0 - 500.0 * t, bandwidth_hz: 120.0 },
            ],
            0.4,
            SR,
            0.3 + 0.5 * t,
        );
        write_wav(audio_dir.join(format!("{id}.wav")), &audio).unwrap();
        meta.push_str(&format!("{id}|Printing, in the only sense {i}.|Printing, in the only sense {i}.\n"));
    }
    write_wav(audio_dir.join("LJ002-0000.wav"), &silence(0.4, SR)).unwrap();
    meta.push_str("LJ002-0000|A pause.|A pause.\n");
    meta.push_str("LJ002-0001|Never recorded.|Never recorded.\n");
    let metadata = dir.join("metadata.csv");
    fs::write(&metadata, meta).unwrap();
    SyntheticCorpus { metadata, audio_dir, voiced: n }
}
