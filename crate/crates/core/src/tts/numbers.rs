pub const MAX_SPELLED: u32 = 999_999;

const ONES: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
    "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
];

const TENS: [&str; 10] = ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"];

/// English cardinal words for `0..=999_999`, without "and" or hyphens.
pub fn number_words(n: u32) -> Option<Vec<&'static str>> {
    if n > MAX_SPELLED {
        return None;
    }
    if n == 0 {
        return Some(vec![ONES[0]]);
    }
    let mut out = Vec::new();
    let (thousands, rest) = (n / 1000, n % 1000);
    if thousands > 0 {
        below_thousand(thousands, &mut out);
        out.push("thousand");
    }
    if rest > 0 {
        below_thousand(rest, &mut out);
    }
    Some(out)
}

fn below_thousand(n: u32, out: &mut Vec<&'static str>) {
    debug_assert!((1..1000).contains(&n));
    let (h, r) = (n / 100, n % 100);
    if h > 0 {
        out.push(ONES[h as usize]);
        out.push("hundred");
    }
    if r >= 20 {
        out.push(TENS[(r / 10) as usize]);
        if r % 10 > 0 {
            out.push(ONES[(r % 10) as usize]);
        }
    } else if r > 0 {
        out.push(ONES[r as usize]);
    }
}

pub fn digit_word(d: char) -> Option<&'static str> {
    d.to_digit(10).map(|v| ONES[v as usize])
}
