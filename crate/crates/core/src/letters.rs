//! Letters are stored as `u8` values `0..26` with `A = 0`.
//!
//! The classical numbering `A = 1, ..., Z = 26 ≡ 0` differs only by a
//! constant, so shifts and differences are the same in either convention.

use crate::{Error, Result};

pub const ALPHABET: usize = 26;

/// Parses a string of letters, ignoring ASCII whitespace. Lowercase is accepted.
pub fn parse(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .filter(|c| !c.is_ascii_whitespace())
        .map(|c| {
            if c.is_ascii_alphabetic() {
                Ok(c.to_ascii_uppercase() as u8 - b'A')
            } else {
                Err(Error::InvalidLetter(c))
            }
        })
        .collect()
}

pub fn render(letters: &[u8]) -> String {
    letters.iter().map(|&l| to_char(l)).collect()
}

pub fn to_char(letter: u8) -> char {
    (b'A' + letter % 26) as char
}

/// Classical numbering, `A = 1` through `Z = 26`.
pub fn number(letter: u8) -> u8 {
    letter % 26 + 1
}

pub fn add(a: u8, b: u8) -> u8 {
    (a + b) % 26
}

pub fn sub(a: u8, b: u8) -> u8 {
    (a + 26 - b % 26) % 26
}
