//! Prosody planning and cascade formant synthesis.

use serde::{Deserialize, Serialize};

use super::dsp::{glottal_flow, Lcg, Resonator};
use super::phoneme::Phoneme;
use super::voice::{Formant, VoiceProfile};
use super::TtsError;

pub const SAMPLE_RATE: u32 = 22_050;
/// Per-sentence peak after normalization, before volume gain.
pub const PEAK: f64 = 0.89 * 32767.0;
pub const INTER_SENTENCE_PAUSE_MS: f64 = 400.0;
pub const FORMANT_GLIDE_MS: f64 = 30.0;
/// Fraction of base f0 lost between a sentence's start and end.
pub const F0_DECLINATION: f64 = 0.10;
pub const RATE_RANGE: std::ops::RangeInclusive<f64> = 0.5..=3.0;
pub const VOLUME_RANGE: std::ops::RangeInclusive<f64> = 0.0..=1.0;

/// Gain applied to noise relative to the glottal source.
const NOISE_GAIN: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisParams {
    pub rate: f64,
    pub volume: f64,
    pub voice: String,
}

impl Default for SynthesisParams {
    fn default() -> Self {
        SynthesisParams { rate: 1.0, volume: 1.0, voice: super::voice::DEFAULT_VOICE.to_string() }
    }
}

impl SynthesisParams {
    pub fn validate(&self) -> Result<(), TtsError> {
        check_rate(self.rate)?;
        check_volume(self.volume)
    }
}

pub fn check_rate(rate: f64) -> Result<(), TtsError> {
    if RATE_RANGE.contains(&rate) {
        Ok(())
    } else {
        Err(TtsError::BadParams(format!("rate {rate} outside 0.5..=3.0")))
    }
}

pub fn check_volume(volume: f64) -> Result<(), TtsError> {
    if VOLUME_RANGE.contains(&volume) {
        Ok(())
    } else {
        Err(TtsError::BadParams(format!("volume {volume} outside 0.0..=1.0")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhonemeEvent {
    pub phoneme: Phoneme,
    pub duration_ms: f64,
    /// Zero for unvoiced events.
    pub f0: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Utterance {
    pub sentences: Vec<Vec<PhonemeEvent>>,
    pub inter_sentence_pause_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AudioClip {
    pub sample_rate: u32,
    pub samples: Vec<i16>,
}

impl AudioClip {
    pub fn duration_secs(&self) -> f64 {
        if self.sample_rate == 0 {
            0.0
        } else {
            self.samples.len() as f64 / f64::from(self.sample_rate)
        }
    }
}

pub fn ms_to_samples(ms: f64, sample_rate: u32) -> usize {
    (ms * f64::from(sample_rate) / 1000.0).round() as usize
}

/// Durations scale by 1/rate; f0 falls linearly over each sentence's planned
/// time; every event carries `volume` as amplitude.
pub fn plan_prosody(
    sentences: &[Vec<Phoneme>],
    voice: &VoiceProfile,
    params: &SynthesisParams,
) -> Result<Utterance, TtsError> {
    params.validate()?;
    let sentences = sentences.iter().map(|s| plan_sentence(s, voice, params.rate, params.volume)).collect();
    Ok(Utterance { sentences, inter_sentence_pause_ms: INTER_SENTENCE_PAUSE_MS / params.rate })
}

pub fn plan_sentence(phonemes: &[Phoneme], voice: &VoiceProfile, rate: f64, volume: f64) -> Vec<PhonemeEvent> {
    let durations: Vec<f64> = phonemes.iter().map(|&p| voice.entry(p).duration_ms / rate).collect();
    let total: f64 = durations.iter().sum();
    let mut start = 0.0;
    phonemes
        .iter()
        .zip(&durations)
        .map(|(&p, &d)| {
            let voiced = voice.entry(p).voiced && p != Phoneme::SIL;
            let f0 = if voiced { voice.base_f0 * (1.0 - F0_DECLINATION * start / total) } else { 0.0 };
            start += d;
            PhonemeEvent { phoneme: p, duration_ms: d, f0, amplitude: volume }
        })
        .collect()
}

/// Unit-volume samples for one sentence, peak-normalized to [`PEAK`].
/// Oscillator, noise and filter state start fresh for every sentence.
pub fn render_sentence(events: &[PhonemeEvent], voice: &VoiceProfile, sample_rate: u32) -> Vec<f64> {
    let sr = f64::from(sample_rate);
    let total: usize = events.iter().map(|e| ms_to_samples(e.duration_ms, sample_rate)).sum();
    let glide = ms_to_samples(FORMANT_GLIDE_MS, sample_rate).max(1);
    let mut out = Vec::with_capacity(total);
    let mut res = [Resonator::default(); 3];
    let mut noise = Lcg::new(Lcg::SEED);
    let mut phase = 0.0f64;
    let mut prev_flow = 0.0f64;
    let mut prev_targets: Option<[Formant; 3]> = None;

    for e in events {
        let entry = voice.entry(e.phoneme);
        let targets = entry.formants;
        let from = prev_targets.unwrap_or(targets);
        let n = ms_to_samples(e.duration_ms, sample_rate);
        let silent = e.phoneme == Phoneme::SIL;
        for j in 0..n {
            if j <= glide {
                let t = j as f64 / glide as f64;
                for (k, r) in res.iter_mut().enumerate() {
                    let f = from[k].freq + (targets[k].freq - from[k].freq) * t;
                    let b = from[k].bw + (targets[k].bw - from[k].bw) * t;
                    r.set(f, b, sr);
                }
            }
            let src = if silent {
                0.0
            } else if e.f0 > 0.0 {
                phase += e.f0 / sr;
                phase -= phase.floor();
                let flow = glottal_flow(phase);
                let d = flow - prev_flow;
                prev_flow = flow;
                d
            } else {
                NOISE_GAIN * noise.next_f64()
            };
            let y = res.iter_mut().fold(src, |x, r| r.step(x));
            out.push(y);
        }
        prev_targets = Some(targets);
    }
    let peak = out.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if peak > 0.0 {
        let scale = PEAK / peak;
        for v in &mut out {
            *v *= scale;
        }
    }
    out
}

/// Volume gain and rounding to PCM16.
pub fn quantize(x: f64, gain: f64) -> i16 {
    (x * gain).round().clamp(-32768.0, 32767.0) as i16
}

/// Per-event amplitudes of one sentence applied to its unit render.
pub fn quantize_sentence(events: &[PhonemeEvent], unit: &[f64], sample_rate: u32, out: &mut Vec<i16>) {
    let mut at = 0;
    for e in events {
        let n = ms_to_samples(e.duration_ms, sample_rate);
        out.extend(unit[at..at + n].iter().map(|&x| quantize(x, e.amplitude)));
        at += n;
    }
}

pub fn synthesize(utterance: &Utterance, voice: &VoiceProfile, sample_rate: u32) -> AudioClip {
    let pause = ms_to_samples(utterance.inter_sentence_pause_ms, sample_rate);
    let mut samples = Vec::new();
    for (i, events) in utterance.sentences.iter().enumerate() {
        if i > 0 {
            samples.resize(samples.len() + pause, 0);
        }
        let unit = render_sentence(events, voice, sample_rate);
        quantize_sentence(events, &unit, sample_rate, &mut samples);
    }
    AudioClip { sample_rate, samples }
}
