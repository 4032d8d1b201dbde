use lectern::text::{apply_highlights, format_saved, parse_saved, search_text, HighlightSpan, Rgb};
use proptest::prelude::*;

/// Quadratic reference scanner with the same resume-after-match rule.
fn naive(hay: &[char], needle: &[char]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i + needle.len() <= hay.len() {
        if (0..needle.len()).all(|k| hay[i + k] == needle[k]) {
            out.push((i, i + needle.len()));
            i += needle.len();
        } else {
            i += 1;
        }
    }
    out
}

fn small_alphabet(max: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop::sample::select(vec!['a', 'b', 'c', 'é']), 0..=max)
        .prop_map(|v| v.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn search_matches_naive_scanner(hay in small_alphabet(200), needle in small_alphabet(5)) {
        prop_assume!(!needle.is_empty());
        let got: Vec<_> = search_text(&hay, &needle, true, Rgb::YELLOW)
            .unwrap()
            .iter()
            .map(|s| (s.start, s.end))
            .collect();
        let h: Vec<char> = hay.chars().collect();
        let n: Vec<char> = needle.chars().collect();
        prop_assert_eq!(got, naive(&h, &n));
    }

    #[test]
    fn highlights_are_lossless(text in small_alphabet(120), needle in small_alphabet(3)) {
        prop_assume!(!needle.is_empty());
        let spans = search_text(&text, &needle, true, Rgb::RED).unwrap();
        let segs = apply_highlights(&text, &spans).unwrap();
        let joined: String = segs.iter().map(|s| s.text.as_str()).collect();
        prop_assert_eq!(joined, text);
        prop_assert_eq!(segs.iter().filter(|s| s.color.is_some()).count(), spans.len());
    }

    #[test]
    fn arbitrary_disjoint_spans_are_lossless(text in "[a-z ]{0,80}", cuts in proptest::collection::btree_set(0usize..80, 0..12)) {
        let n = text.chars().count();
        let cuts: Vec<usize> = cuts.into_iter().filter(|&c| c <= n).collect();
        let spans: Vec<HighlightSpan> = cuts
            .chunks_exact(2)
            .map(|w| HighlightSpan { start: w[0], end: w[1], color: Rgb(1, 2, 3) })
            .collect();
        let segs = apply_highlights(&text, &spans).unwrap();
        prop_assert_eq!(segs.iter().map(|s| s.text.as_str()).collect::<String>(), text);
    }

    #[test]
    fn saved_text_roundtrip(pages in proptest::collection::vec("[^\x0c]{0,40}", 1..5)) {
        prop_assert_eq!(parse_saved(&format_saved(&pages)), pages);
    }
}
