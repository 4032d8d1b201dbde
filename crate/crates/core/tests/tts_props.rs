use lectern::tts::normalize::{normalize_text, render_tokens};
use lectern::tts::{decode_wav, encode_wav, speak, AudioClip, SynthesisParams};
use proptest::prelude::*;

proptest! {
    #[test]
    fn wav_roundtrip(rate in 1u32..96_000, samples in proptest::collection::vec(any::<i16>(), 0..2000)) {
        let clip = AudioClip { sample_rate: rate, samples };
        let bytes = encode_wav(&clip);
        prop_assert_eq!(bytes.len(), 44 + 2 * clip.samples.len());
        prop_assert_eq!(decode_wav(&bytes).unwrap(), clip);
    }

    #[test]
    fn decode_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
        let _ = decode_wav(&bytes);
    }

    #[test]
    fn normalization_is_idempotent(s in "[A-Za-z0-9 ,.;:!?&%'()\\-]{0,60}") {
        let once = normalize_text(&s).tokens;
        prop_assert_eq!(normalize_text(&render_tokens(&once)).tokens, once);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn synthesis_is_deterministic_and_bounded(words in proptest::collection::vec("[a-z]{1,8}", 1..6), vol in 0.0f64..=1.0) {
        let text = words.join(" ");
        let p = SynthesisParams { volume: vol, ..Default::default() };
        let a = speak(&text, &p).unwrap();
        prop_assert_eq!(&a, &speak(&text, &p).unwrap());
        let limit = (0.89 * 32767.0 * vol).round() as i32 + 1;
        prop_assert!(a.samples.iter().all(|&s| i32::from(s).abs() <= limit));
    }
}
