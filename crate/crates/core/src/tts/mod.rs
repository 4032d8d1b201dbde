//! Text to speech: normalization, grapheme-to-phoneme, prosody and a cascade
//! formant synthesizer producing PCM16 mono audio.

pub mod dsp;
pub mod g2p;
pub mod normalize;
pub mod numbers;
pub mod phoneme;
pub mod synth;
pub mod voice;
pub mod wav;

use thiserror::Error;

pub use normalize::{normalize_text, split_sentences, Token};
pub use phoneme::Phoneme;
pub use synth::{
    plan_prosody, synthesize, AudioClip, PhonemeEvent, SynthesisParams, Utterance, PEAK, SAMPLE_RATE,
};
pub use voice::{list_voices, voice, VoiceProfile, VoiceSummary, DEFAULT_VOICE};
pub use wav::{decode_wav, encode_wav, wav_header};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TtsError {
    #[error("bad synthesis parameters: {0}")]
    BadParams(String),
    #[error("unknown voice {0:?}")]
    UnknownVoice(String),
    #[error("bad voice file: {0}")]
    BadVoice(String),
    #[error("bad lexicon at line {0}")]
    BadLexicon(usize),
    #[error("malformed wav: {0}")]
    MalformedWav(String),
}

/// Phonemes per sentence plus symbols normalization could not read.
/// Sentences with nothing to say are dropped; pause tokens become SIL.
pub fn text_to_phonemes(text: &str) -> (Vec<Vec<Phoneme>>, Vec<String>) {
    let mut dropped = Vec::new();
    let mut out = Vec::new();
    for s in split_sentences(text) {
        let (phones, d) = sentence_phonemes(&s);
        dropped.extend(d);
        if !phones.is_empty() {
            out.push(phones);
        }
    }
    (out, dropped)
}

/// Phonemes of one already-split sentence; empty when nothing is speakable.
pub fn sentence_phonemes(sentence: &str) -> (Vec<Phoneme>, Vec<String>) {
    let n = normalize_text(sentence);
    let phones = n
        .tokens
        .iter()
        .flat_map(|t| match t {
            Token::Word(w) => g2p::g2p(w),
            Token::Pause => vec![Phoneme::SIL],
        })
        .collect();
    (phones, n.dropped)
}

pub fn plan_text(text: &str, params: &SynthesisParams) -> Result<Utterance, TtsError> {
    let v = voice(&params.voice)?;
    let (sentences, dropped) = text_to_phonemes(text);
    for d in dropped {
        log::warn!("dropping unreadable symbol {d:?}");
    }
    plan_prosody(&sentences, v, params)
}

pub fn speak(text: &str, params: &SynthesisParams) -> Result<AudioClip, TtsError> {
    let u = plan_text(text, params)?;
    Ok(synthesize(&u, voice(&params.voice)?, SAMPLE_RATE))
}
