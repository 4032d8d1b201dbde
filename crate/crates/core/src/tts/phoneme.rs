use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

/// ARPAbet without stress marks, plus `SIL` for pauses.
pub const INVENTORY: [&str; 40] = [
    "AA", "AE", "AH", "AO", "AW", "AY", "B", "CH", "D", "DH", "EH", "ER", "EY", "F", "G", "HH", "IH", "IY", "JH", "K",
    "L", "M", "N", "NG", "OW", "OY", "P", "R", "S", "SH", "T", "TH", "UH", "UW", "V", "W", "Y", "Z", "ZH", "SIL",
];

/// Index into [`INVENTORY`]; always valid.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phoneme(u8);

impl Phoneme {
    pub const COUNT: usize = INVENTORY.len();
    pub const SIL: Phoneme = Phoneme(39);

    pub fn from_index(i: usize) -> Option<Self> {
        (i < Self::COUNT).then_some(Phoneme(i as u8))
    }

    pub fn index(self) -> usize {
        usize::from(self.0)
    }

    pub fn name(self) -> &'static str {
        INVENTORY[self.index()]
    }

    pub fn all() -> impl Iterator<Item = Phoneme> {
        (0..Self::COUNT as u8).map(Phoneme)
    }
}

impl fmt::Debug for Phoneme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Phoneme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Phoneme {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown phoneme {0:?}")]
pub struct UnknownPhoneme(pub String);

impl FromStr for Phoneme {
    type Err = UnknownPhoneme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        INVENTORY
            .iter()
            .position(|&p| p == s)
            .map(|i| Phoneme(i as u8))
            .ok_or_else(|| UnknownPhoneme(s.to_string()))
    }
}

/// Parses a whitespace-separated phoneme list.
pub fn parse_phonemes(s: &str) -> Result<Vec<Phoneme>, UnknownPhoneme> {
    s.split_whitespace().map(str::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for p in Phoneme::all() {
            assert_eq!(p.name().parse::<Phoneme>().unwrap(), p);
        }
        assert_eq!("SIL".parse::<Phoneme>().unwrap(), Phoneme::SIL);
        assert!("QQ".parse::<Phoneme>().is_err());
    }
}
