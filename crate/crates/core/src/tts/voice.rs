use std::sync::OnceLock;

use serde::Serialize;

use super::phoneme::Phoneme;
use super::TtsError;

pub const DEFAULT_VOICE: &str = "adult-male";

const BUNDLED: [&str; 2] = [
    include_str!("../../data/voices/adult_male.voice"),
    include_str!("../../data/voices/adult_female.voice"),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Formant {
    pub freq: f64,
    pub bw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhonemeEntry {
    pub voiced: bool,
    pub duration_ms: f64,
    pub formants: [Formant; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoiceProfile {
    pub name: String,
    pub base_f0: f64,
    entries: Vec<PhonemeEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoiceSummary {
    pub name: String,
    pub base_f0: f64,
}

impl VoiceProfile {
    pub fn entry(&self, p: Phoneme) -> &PhonemeEntry {
        &self.entries[p.index()]
    }

    pub fn summary(&self) -> VoiceSummary {
        VoiceSummary { name: self.name.clone(), base_f0: self.base_f0 }
    }

    /// Checks table invariants against a sample rate.
    pub fn validate(&self, sample_rate: u32) -> Result<(), TtsError> {
        let bad = |m: String| Err(TtsError::BadVoice(format!("{}: {m}", self.name)));
        if !(50.0..=400.0).contains(&self.base_f0) {
            return bad(format!("base_f0 {} outside 50..=400", self.base_f0));
        }
        if self.entries.len() != Phoneme::COUNT {
            return bad("incomplete phoneme table".into());
        }
        let nyquist = f64::from(sample_rate) / 2.0;
        for p in Phoneme::all() {
            let e = self.entry(p);
            if !(e.duration_ms > 0.0 && e.duration_ms.is_finite()) {
                return bad(format!("{p}: duration must be positive"));
            }
            for f in &e.formants {
                if !(f.freq > 0.0 && f.freq < nyquist && f.bw > 0.0 && f.bw.is_finite()) {
                    return bad(format!("{p}: formant {} Hz / {} Hz out of range", f.freq, f.bw));
                }
            }
        }
        Ok(())
    }
}

/// Parses the text table format documented in the bundled voice files.
pub fn parse_voice(text: &str) -> Result<VoiceProfile, TtsError> {
    let mut name = None;
    let mut base_f0 = None;
    let mut entries: Vec<Option<PhonemeEntry>> = vec![None; Phoneme::COUNT];
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |m: &str| TtsError::BadVoice(format!("line {}: {m}", n + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[..] {
            ["name", v] => name = Some(v.to_string()),
            ["base_f0", v] => base_f0 = Some(v.parse::<f64>().map_err(|_| bad("bad base_f0"))?),
            [p, voiced, dur, f1, b1, f2, b2, f3, b3] => {
                let p: Phoneme = p.parse().map_err(|_| bad("unknown phoneme"))?;
                let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
                let voiced = match voiced {
                    "0" => false,
                    "1" => true,
                    _ => return Err(bad("voiced flag must be 0 or 1")),
                };
                let slot = &mut entries[p.index()];
                if slot.is_some() {
                    return Err(bad("duplicate phoneme"));
                }
                *slot = Some(PhonemeEntry {
                    voiced,
                    duration_ms: num(dur)?,
                    formants: [
                        Formant { freq: num(f1)?, bw: num(b1)? },
                        Formant { freq: num(f2)?, bw: num(b2)? },
                        Formant { freq: num(f3)?, bw: num(b3)? },
                    ],
                });
            }
            _ => return Err(bad("unrecognized line")),
        }
    }
    let name = name.ok_or_else(|| TtsError::BadVoice("missing name".into()))?;
    let base_f0 = base_f0.ok_or_else(|| TtsError::BadVoice(format!("{name}: missing base_f0")))?;
    let entries = entries
        .into_iter()
        .enumerate()
        .map(|(i, e)| e.ok_or_else(|| TtsError::BadVoice(format!("{name}: no row for {}", super::phoneme::INVENTORY[i]))))
        .collect::<Result<_, _>>()?;
    Ok(VoiceProfile { name, base_f0, entries })
}

pub fn bundled_voices() -> &'static [VoiceProfile] {
    static VOICES: OnceLock<Vec<VoiceProfile>> = OnceLock::new();
    VOICES.get_or_init(|| BUNDLED.iter().map(|t| parse_voice(t).expect("bundled voice parses")).collect())
}

pub fn list_voices() -> Vec<VoiceSummary> {
    bundled_voices().iter().map(VoiceProfile::summary).collect()
}

pub fn voice(name: &str) -> Result<&'static VoiceProfile, TtsError> {
    bundled_voices().iter().find(|v| v.name == name).ok_or_else(|| TtsError::UnknownVoice(name.to_string()))
}
