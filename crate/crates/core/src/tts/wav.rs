//! Canonical 44-byte-header PCM16 mono WAV.

use super::synth::AudioClip;
use super::TtsError;

pub const HEADER_LEN: usize = 44;

/// Header for `n_samples` samples; RIFF size is `36 + 2n`.
pub fn wav_header(sample_rate: u32, n_samples: usize) -> [u8; HEADER_LEN] {
    let data_len = u32::try_from(n_samples * 2).unwrap_or(u32::MAX - 36);
    let mut h = [0u8; HEADER_LEN];
    h[0..4].copy_from_slice(b"RIFF");
    h[4..8].copy_from_slice(&(36 + data_len).to_le_bytes());
    h[8..12].copy_from_slice(b"WAVE");
    h[12..16].copy_from_slice(b"fmt ");
    h[16..20].copy_from_slice(&16u32.to_le_bytes());
    h[20..22].copy_from_slice(&1u16.to_le_bytes());
    h[22..24].copy_from_slice(&1u16.to_le_bytes());
    h[24..28].copy_from_slice(&sample_rate.to_le_bytes());
    h[28..32].copy_from_slice(&(sample_rate * 2).to_le_bytes());
    h[32..34].copy_from_slice(&2u16.to_le_bytes());
    h[34..36].copy_from_slice(&16u16.to_le_bytes());
    h[36..40].copy_from_slice(b"data");
    h[40..44].copy_from_slice(&data_len.to_le_bytes());
    h
}

pub fn samples_to_bytes(samples: &[i16]) -> Vec<u8> {
    samples.iter().flat_map(|s| s.to_le_bytes()).collect()
}

pub fn encode_wav(clip: &AudioClip) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + clip.samples.len() * 2);
    out.extend_from_slice(&wav_header(clip.sample_rate, clip.samples.len()));
    out.extend(clip.samples.iter().flat_map(|s| s.to_le_bytes()));
    out
}

/// Accepts exactly the layout [`encode_wav`] produces.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioClip, TtsError> {
    let bad = |m: &str| Err(TtsError::MalformedWav(m.to_string()));
    if bytes.len() < HEADER_LEN {
        return bad("shorter than header");
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let u16_at = |i: usize| u16::from_le_bytes(bytes[i..i + 2].try_into().expect("2 bytes"));
    if &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" || &bytes[12..16] != b"fmt " || &bytes[36..40] != b"data" {
        return bad("bad chunk ids");
    }
    if u32_at(16) != 16 || u16_at(20) != 1 || u16_at(22) != 1 || u16_at(34) != 16 {
        return bad("not PCM16 mono");
    }
    let sample_rate = u32_at(24);
    if sample_rate == 0 || u32_at(28) != sample_rate.wrapping_mul(2) || u16_at(32) != 2 {
        return bad("inconsistent rates");
    }
    let data_len = u32_at(40) as usize;
    if data_len % 2 != 0 || bytes.len() != HEADER_LEN + data_len || u32_at(4) as usize != 36 + data_len {
        return bad("length mismatch");
    }
    let samples = bytes[HEADER_LEN..].chunks_exact(2).map(|c| i16::from_le_bytes([c[0], c[1]])).collect();
    Ok(AudioClip { sample_rate, samples })
}
